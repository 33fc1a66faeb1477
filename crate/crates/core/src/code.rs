//! Rank-metric codes: container, exact and sampled distance, verification,
//! the multilevel lift and dot-dropping subcodes.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ferrers::{nu_min, Dot, FerrersDiagram};
use crate::gf::{Elem, Field};
use crate::matrix::{rank_in_place, GfMatrix};
use crate::rng::{uniform_elem, TrialRng};

/// Default cap on the number of enumerated items.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// The enumeration budget, overridable through `FERRO_BUDGET`.
pub fn enumeration_budget() -> u64 {
    std::env::var("FERRO_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// An F_q-linear space of `m × n` matrices given by an ordered basis.
#[derive(Clone, PartialEq, Eq)]
pub struct RankMetricCode {
    field: Field,
    m: usize,
    n: usize,
    basis: Vec<GfMatrix>,
    shape: Option<FerrersDiagram>,
    delta: Option<usize>,
}

impl fmt::Debug for RankMetricCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RankMetricCode")
            .field("q", &self.field.order())
            .field("m", &self.m)
            .field("n", &self.n)
            .field("dim", &self.basis.len())
            .field("shape", &self.shape.as_ref().map(|s| s.to_string()))
            .field("delta", &self.delta)
            .finish()
    }
}

impl RankMetricCode {
    /// Checks sizes, field and linear independence.
    pub fn new(field: &Field, m: usize, n: usize, basis: Vec<GfMatrix>) -> Result<Self> {
        for b in &basis {
            if (b.rows(), b.cols()) != (m, n) {
                return Err(Error::Dimension(format!("basis matrix is {}x{}, expected {m}x{n}", b.rows(), b.cols())));
            }
            if **b.field() != **field {
                return Err(Error::Dimension("basis matrix over a different field".into()));
            }
        }
        let code = RankMetricCode { field: field.clone(), m, n, basis, shape: None, delta: None };
        if code.flattened().rank() != code.dim() {
            return Err(Error::Precondition("basis matrices are linearly dependent".into()));
        }
        Ok(code)
    }

    /// Declares a shape; every basis matrix must be supported inside it.
    pub fn with_shape(mut self, shape: FerrersDiagram) -> Result<Self> {
        if (shape.m(), shape.n()) != (self.m, self.n) {
            return Err(Error::Shape(format!("diagram {shape} does not fit {}x{}", self.m, self.n)));
        }
        if let Some((k, d)) = self.first_outside(&shape) {
            return Err(Error::Shape(format!("basis matrix {k} is nonzero at {d} outside {shape}")));
        }
        self.shape = Some(shape);
        Ok(self)
    }

    pub fn with_delta(mut self, delta: usize) -> Self {
        self.delta = Some(delta);
        self
    }

    fn first_outside(&self, shape: &FerrersDiagram) -> Option<(usize, Dot)> {
        self.basis.iter().enumerate().find_map(|(k, b)| {
            (0..self.m)
                .flat_map(|i| (0..self.n).map(move |j| (i, j)))
                .find(|&(i, j)| !b.get(i, j).is_zero() && !shape.contains(i + 1, j + 1))
                .map(|(i, j)| (k, Dot::new(i + 1, j + 1)))
        })
    }

    /// True when every basis matrix has support inside `shape`.
    pub fn has_shape(&self, shape: &FerrersDiagram) -> bool {
        (shape.m(), shape.n()) == (self.m, self.n) && self.first_outside(shape).is_none()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GfMatrix] {
        &self.basis
    }

    pub fn shape(&self) -> Option<&FerrersDiagram> {
        self.shape.as_ref()
    }

    pub fn delta(&self) -> Option<usize> {
        self.delta
    }

    /// The `k × mn` matrix whose rows are the flattened basis matrices.
    pub fn flattened(&self) -> GfMatrix {
        let mn = self.m * self.n;
        let data = self.basis.iter().flat_map(|b| b.data().iter().copied()).collect();
        GfMatrix::from_data(&self.field, self.basis.len(), mn, data)
    }

    /// `Σ λ_i B_i`.
    pub fn codeword(&self, coeffs: &[Elem]) -> GfMatrix {
        assert_eq!(coeffs.len(), self.dim(), "coefficient count");
        let mut acc = GfMatrix::zeros(&self.field, self.m, self.n);
        for (&c, b) in coeffs.iter().zip(&self.basis) {
            acc.add_scaled(c, b);
        }
        acc
    }

    /// Membership of a matrix in the code.
    pub fn contains(&self, a: &GfMatrix) -> bool {
        let row = GfMatrix::from_data(&self.field, 1, self.m * self.n, a.data().to_vec());
        self.flattened().vstack(&row).rank() == self.dim()
    }

    /// Number of projective points `(q^k − 1)/(q − 1)`.
    pub fn projective_count(&self) -> u128 {
        let q = self.field.order() as u128;
        (q.pow(self.dim() as u32) - 1) / (q - 1)
    }
}

/// How the minimum distance is determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    /// Every projective point, within the given budget.
    Exact { budget: u64 },
    /// Uniform random nonzero codewords.
    Sampled { samples: u64, seed: u64 },
}

impl DistanceMode {
    pub fn exact() -> Self {
        DistanceMode::Exact { budget: enumeration_budget() }
    }
}

/// Outcome of a distance computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    /// The minimum rank seen; exact, or an upper bound on the distance when sampled.
    pub value: usize,
    pub exact: bool,
    pub examined: u64,
}

struct Task {
    lead: usize,
    prefix: u64,
}

/// Walks projective representatives: first nonzero coordinate 1, the tail
/// of `inner` coordinates in odometer order with incremental updates.
struct Walker<'a> {
    code: &'a RankMetricCode,
    inner: usize,
}

impl Walker<'_> {
    fn tasks(&self) -> Vec<Task> {
        let q = self.code.field.order() as u64;
        let k = self.code.dim();
        let mut out = Vec::new();
        for lead in 0..k {
            let free = k - 1 - lead;
            let outer = free - free.min(self.inner);
            for prefix in 0..q.pow(outer as u32) {
                out.push(Task { lead, prefix });
            }
        }
        out
    }

    /// Calls `visit` with each flattened codeword of the task until it returns false.
    fn run(&self, task: &Task, mut visit: impl FnMut(&[Elem]) -> bool) -> u64 {
        let code = self.code;
        let f = &*code.field;
        let q = f.order();
        let k = code.dim();
        let free = k - 1 - task.lead;
        let inner = free.min(self.inner);
        let outer = free - inner;
        let mut cur = code.basis[task.lead].data().to_vec();
        let mut p = task.prefix;
        for pos in (task.lead + 1..task.lead + 1 + outer).rev() {
            let d = (p % q as u64) as u32;
            p /= q as u64;
            if d != 0 {
                add_scaled(f, &mut cur, Elem(d), code.basis[pos].data());
            }
        }
        let first_inner = k - inner;
        let mut digits = vec![0u32; inner];
        let mut count = 0u64;
        loop {
            count += 1;
            if !visit(&cur) {
                return count;
            }
            let mut i = inner;
            loop {
                if i == 0 {
                    return count;
                }
                i -= 1;
                let old = digits[i];
                let new = if old + 1 < q { old + 1 } else { 0 };
                digits[i] = new;
                let delta = f.sub(Elem(new), Elem(old));
                add_scaled(f, &mut cur, delta, code.basis[first_inner + i].data());
                if new != 0 {
                    break;
                }
            }
        }
    }
}

#[inline]
fn add_scaled(f: &crate::gf::FieldCtx, acc: &mut [Elem], s: Elem, b: &[Elem]) {
    for (a, &x) in acc.iter_mut().zip(b) {
        if !x.is_zero() {
            *a = f.add(*a, f.mul(s, x));
        }
    }
}

fn check_budget(code: &RankMetricCode, budget: u64) -> Result<()> {
    let needed = code.projective_count();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn walker(code: &RankMetricCode) -> Walker<'_> {
    let q = code.field.order() as f64;
    let inner = ((4096f64).ln() / q.ln()).floor().max(1.0) as usize;
    Walker { code, inner }
}

/// Exact minimum rank over all nonzero codewords.
pub fn exact_min_rank(code: &RankMetricCode, budget: u64) -> Result<DistanceReport> {
    if code.dim() == 0 {
        return Err(Error::Precondition("distance of the zero code".into()));
    }
    check_budget(code, budget)?;
    let w = walker(code);
    let (m, n) = (code.m, code.n);
    let f = &*code.field;
    let (value, examined) = w
        .tasks()
        .par_iter()
        .map(|t| {
            let mut scratch = vec![Elem::ZERO; m * n];
            let mut best = usize::MAX;
            let count = w.run(t, |cw| {
                scratch.copy_from_slice(cw);
                best = best.min(rank_in_place(f, &mut scratch, m, n));
                true
            });
            (best, count)
        })
        .reduce(|| (usize::MAX, 0), |a, b| (a.0.min(b.0), a.1 + b.1));
    Ok(DistanceReport { value, exact: true, examined })
}

/// Searches for a nonzero codeword of rank below `bound`, stopping at the first one.
pub fn has_codeword_below(code: &RankMetricCode, bound: usize, budget: u64) -> Result<bool> {
    if code.dim() == 0 {
        return Ok(false);
    }
    check_budget(code, budget)?;
    let w = walker(code);
    let (m, n) = (code.m, code.n);
    let f = &*code.field;
    let found = AtomicBool::new(false);
    w.tasks().par_iter().for_each(|t| {
        if found.load(Ordering::Relaxed) {
            return;
        }
        let mut scratch = vec![Elem::ZERO; m * n];
        w.run(t, |cw| {
            scratch.copy_from_slice(cw);
            if rank_in_place(f, &mut scratch, m, n) < bound {
                found.store(true, Ordering::Relaxed);
                return false;
            }
            !found.load(Ordering::Relaxed)
        });
    });
    Ok(found.into_inner())
}

/// Minimum rank distance, exactly or as a sampled upper bound.
pub fn min_rank_distance(code: &RankMetricCode, mode: DistanceMode) -> Result<DistanceReport> {
    match mode {
        DistanceMode::Exact { budget } => exact_min_rank(code, budget),
        DistanceMode::Sampled { samples, seed } => {
            if code.dim() == 0 {
                return Err(Error::Precondition("distance of the zero code".into()));
            }
            let rng = TrialRng::new(seed);
            let q = code.field.order();
            let value = (0..samples)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng.stream(t);
                    loop {
                        let c: Vec<Elem> = (0..code.dim()).map(|_| uniform_elem(&mut r, q)).collect();
                        if c.iter().any(|e| !e.is_zero()) {
                            return code.codeword(&c).rank();
                        }
                    }
                })
                .min()
                .unwrap_or(usize::MAX);
            Ok(DistanceReport { value, exact: false, examined: samples })
        }
    }
}

/// Verdict of a maximality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Maximal,
    NotMaximal,
    /// Sampling found no violation, which proves nothing.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub dimension: usize,
    pub nu_min: usize,
    pub delta: usize,
    pub shape_ok: bool,
    pub distance: DistanceReport,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn is_maximal(&self) -> bool {
        self.verdict == Verdict::Maximal
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension: {}", self.dimension)?;
        writeln!(f, "nu_min: {}", self.nu_min)?;
        writeln!(f, "delta: {}", self.delta)?;
        writeln!(f, "shape ok: {}", self.shape_ok)?;
        if self.distance.exact {
            writeln!(f, "distance: {} (exact)", self.distance.value)?;
        } else {
            writeln!(f, "distance: <= {} (sampled bound)", self.distance.value)?;
        }
        writeln!(f, "codewords examined: {}", self.distance.examined)?;
        let v = match self.verdict {
            Verdict::Maximal => "maximal",
            Verdict::NotMaximal => "not maximal",
            Verdict::Inconclusive => "inconclusive",
        };
        write!(f, "verdict: {v}")
    }
}

/// Checks dimension against `ν_min`, support inside `shape` and distance at least `delta`.
pub fn verify_maximal(
    code: &RankMetricCode,
    shape: &FerrersDiagram,
    delta: usize,
    mode: DistanceMode,
) -> Result<VerificationReport> {
    let bound = nu_min(shape, delta)?;
    let shape_ok = code.has_shape(shape);
    let distance = min_rank_distance(code, mode)?;
    let dims_ok = code.dim() == bound;
    let verdict = if !shape_ok || !dims_ok || distance.value < delta {
        Verdict::NotMaximal
    } else if distance.exact {
        Verdict::Maximal
    } else {
        Verdict::Inconclusive
    };
    Ok(VerificationReport { dimension: code.dim(), nu_min: bound, delta, shape_ok, distance, verdict })
}

/// Pivot columns (1-based) `t_{i−1} + i` of the lift, with `t_i = |{j : c_j ≤ i}|`.
pub fn lift_pivots(shape: &FerrersDiagram) -> Vec<usize> {
    (1..=shape.m())
        .map(|i| shape.cols().iter().filter(|&&c| c < i).count() + i)
        .collect()
}

/// Embeds a shaped `m × n` matrix into an `m × (m + n)` echelon matrix.
pub fn lift_matrix(a: &GfMatrix, shape: &FerrersDiagram) -> Result<GfMatrix> {
    let (m, n) = (shape.m(), shape.n());
    if (a.rows(), a.cols()) != (m, n) {
        return Err(Error::Dimension(format!("matrix is {}x{}, shape is {m}x{n}", a.rows(), a.cols())));
    }
    for i in 0..m {
        for j in 0..n {
            if !a.get(i, j).is_zero() && !shape.contains(i + 1, j + 1) {
                return Err(Error::Shape(format!("entry at {} outside {shape}", Dot::new(i + 1, j + 1))));
            }
        }
    }
    let pivots = lift_pivots(shape);
    let mut out = GfMatrix::zeros(a.field(), m, m + n);
    let mut next_pivot = 0;
    let mut next_col = 0;
    for c in 1..=m + n {
        if next_pivot < m && pivots[next_pivot] == c {
            out.set(next_pivot, c - 1, Elem::ONE);
            next_pivot += 1;
        } else {
            for i in 0..m {
                out.set(i, c - 1, a.get(i, next_col));
            }
            next_col += 1;
        }
    }
    Ok(out)
}

/// Lifts every basis matrix.
pub fn lift_to_rref(code: &RankMetricCode, shape: &FerrersDiagram) -> Result<Vec<GfMatrix>> {
    code.basis().iter().map(|b| lift_matrix(b, shape)).collect()
}

/// The subcode of codewords vanishing at `pos`, of dimension `k − 1`.
pub fn subcode_dropping_position(code: &RankMetricCode, pos: Dot) -> Result<RankMetricCode> {
    if pos.row == 0 || pos.col == 0 || pos.row > code.m || pos.col > code.n {
        return Err(Error::Shape(format!("position {pos} outside the matrix")));
    }
    if let Some(s) = &code.shape {
        if !s.contains(pos.row, pos.col) {
            return Err(Error::Shape(format!("position {pos} outside {s}")));
        }
    }
    let (i, j) = (pos.row - 1, pos.col - 1);
    let f = &code.field;
    let Some(p) = (0..code.dim()).rev().find(|&k| !code.basis[k].get(i, j).is_zero()) else {
        return Err(Error::Precondition(format!("every basis matrix vanishes at {pos}")));
    };
    let pivot = &code.basis[p];
    let inv = f.inv(pivot.get(i, j));
    let basis: Vec<GfMatrix> = (0..code.dim())
        .filter(|&k| k != p)
        .map(|k| {
            let b = &code.basis[k];
            let mut out = b.clone();
            out.add_scaled(f.neg(f.mul(b.get(i, j), inv)), pivot);
            out
        })
        .collect();
    let shape = code.shape.as_ref().map(|s| s.without(pos).unwrap_or_else(|| s.clone()));
    let mut out = RankMetricCode::new(f, code.m, code.n, basis)?;
    if let Some(s) = shape {
        out = out.with_shape(s)?;
    }
    out.delta = code.delta;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn unit(f: &Field, m: usize, n: usize, i: usize, j: usize) -> GfMatrix {
        let mut a = GfMatrix::zeros(f, m, n);
        a.set(i, j, Elem::ONE);
        a
    }

    #[test]
    fn standard_basis_code_has_distance_one() {
        let f = make_field(2, 1).unwrap();
        let shape: FerrersDiagram = "1,2,2@2".parse().unwrap();
        let basis = shape.dots().map(|d| unit(&f, 2, 3, d.row - 1, d.col - 1)).collect();
        let code = RankMetricCode::new(&f, 2, 3, basis).unwrap().with_shape(shape).unwrap();
        let r = min_rank_distance(&code, DistanceMode::exact()).unwrap();
        assert_eq!((r.value, r.examined), (1, 31));
    }

    #[test]
    fn identity_code_has_full_distance() {
        let f = make_field(3, 1).unwrap();
        let code = RankMetricCode::new(&f, 4, 4, vec![GfMatrix::identity(&f, 4)]).unwrap();
        assert_eq!(min_rank_distance(&code, DistanceMode::exact()).unwrap().value, 4);
    }

    #[test]
    fn dependent_basis_rejected() {
        let f = make_field(2, 1).unwrap();
        let i = GfMatrix::identity(&f, 2);
        assert!(RankMetricCode::new(&f, 2, 2, vec![i.clone(), i]).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let f = make_field(2, 1).unwrap();
        let basis = (0..4).map(|k| unit(&f, 2, 2, k / 2, k % 2)).collect();
        let code = RankMetricCode::new(&f, 2, 2, basis).unwrap();
        assert!(matches!(
            min_rank_distance(&code, DistanceMode::Exact { budget: 10 }),
            Err(Error::BudgetExceeded { needed: 15, .. })
        ));
    }

    #[test]
    fn lift_pivot_examples() {
        assert_eq!(lift_pivots(&"1,2,4,4,5@5".parse().unwrap()), vec![1, 3, 5, 6, 9]);
        assert_eq!(lift_pivots(&FerrersDiagram::rectangle(3, 2)), vec![1, 2, 3]);
        let f = make_field(2, 1).unwrap();
        let shape: FerrersDiagram = "1,2,4,4,5@5".parse().unwrap();
        let z = lift_matrix(&GfMatrix::zeros(&f, 5, 5), &shape).unwrap();
        let (r, piv) = z.rref();
        assert_eq!(r, z);
        assert_eq!(piv, vec![0, 2, 4, 5, 8]);
    }

    #[test]
    fn dropping_an_absent_position_fails() {
        let f = make_field(2, 1).unwrap();
        let code = RankMetricCode::new(&f, 2, 2, vec![unit(&f, 2, 2, 0, 0)]).unwrap();
        assert!(subcode_dropping_position(&code, Dot::new(2, 2)).is_err());
        let sub = subcode_dropping_position(&code, Dot::new(1, 1)).unwrap();
        assert_eq!(sub.dim(), 0);
    }
}
