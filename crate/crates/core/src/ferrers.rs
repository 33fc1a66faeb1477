//! Ferrers diagrams and the combinatorics of their dimension bound.
//!
//! A diagram `[c_1, …, c_n]` inside an `m × n` grid is top- and
//! right-aligned: column `j` holds the dots in rows `1..=c_j`. Positions
//! are 1-based `(row, column)` pairs throughout this module.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A dot position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dot {
    pub row: usize,
    pub col: usize,
}

impl Dot {
    pub fn new(row: usize, col: usize) -> Self {
        Dot { row, col }
    }
}

impl fmt::Display for Dot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Column counts of a Ferrers diagram with `m` ambient rows.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FerrersDiagram {
    m: usize,
    cols: Vec<usize>,
}

impl FerrersDiagram {
    pub fn new(m: usize, cols: Vec<usize>) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::Shape("diagram needs at least one column".into()));
        }
        if cols.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Shape(format!("column counts {cols:?} are not nondecreasing")));
        }
        if cols.iter().any(|&c| c > m) {
            return Err(Error::Shape(format!("column count exceeds {m} rows")));
        }
        Ok(FerrersDiagram { m, cols })
    }

    /// The full `m × n` rectangle.
    pub fn rectangle(m: usize, n: usize) -> Self {
        FerrersDiagram { m, cols: vec![m; n] }
    }

    /// The upper triangle `[1, 2, …, n]` in an `n × n` grid.
    pub fn upper_triangular(n: usize) -> Self {
        FerrersDiagram { m: n, cols: (1..=n).collect() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// No empty first column and no empty last row: `c_1 > 0` and `c_n = m`.
    pub fn is_proper(&self) -> bool {
        self.cols.first().is_some_and(|&c| c > 0) && self.cols.last() == Some(&self.m)
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// `c_j` for 1-based `j`.
    pub fn c(&self, j: usize) -> usize {
        self.cols[j - 1]
    }

    /// Number of dots.
    pub fn size(&self) -> usize {
        self.cols.iter().sum()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (1..=self.n()).contains(&col) && row >= 1 && row <= self.cols[col - 1]
    }

    /// All dots, column by column, top to bottom.
    pub fn dots(&self) -> impl Iterator<Item = Dot> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| (1..=c).map(move |i| Dot::new(i, j + 1)))
    }

    /// Dots whose individual removal leaves a Ferrers diagram.
    pub fn corners(&self) -> Vec<Dot> {
        (0..self.n())
            .filter(|&j| self.cols[j] > 0 && (j == 0 || self.cols[j - 1] < self.cols[j]))
            .map(|j| Dot::new(self.cols[j], j + 1))
            .collect()
    }

    /// The diagram without `dot`, when that is again a Ferrers diagram.
    pub fn without(&self, dot: Dot) -> Option<FerrersDiagram> {
        self.corners().contains(&dot).then(|| {
            let mut cols = self.cols.clone();
            cols[dot.col - 1] -= 1;
            FerrersDiagram { m: self.m, cols }
        })
    }

    /// True when every dot of `self` is a dot of `other`.
    pub fn is_subdiagram_of(&self, other: &FerrersDiagram) -> bool {
        self.n() == other.n() && self.cols.iter().zip(&other.cols).all(|(a, b)| a <= b)
    }

    /// Drops empty columns and empty rows.
    pub fn normalize(&self) -> FerrersDiagram {
        let cols: Vec<usize> = self.cols.iter().copied().filter(|&c| c > 0).collect();
        let m = cols.last().copied().unwrap_or(0);
        if cols.is_empty() {
            return FerrersDiagram { m: 0, cols: vec![0] };
        }
        FerrersDiagram { m, cols }
    }

    /// Reflection in the anti-diagonal: an `n × m` diagram whose column `j`
    /// is row `m + 1 − j` of `self`.
    pub fn transpose(&self) -> FerrersDiagram {
        let cols = (1..=self.m)
            .map(|j| self.cols.iter().filter(|&&c| c >= self.m + 1 - j).count())
            .collect();
        FerrersDiagram { m: self.n(), cols }
    }
}

impl fmt::Display for FerrersDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.cols.iter().map(|c| c.to_string()).collect();
        write!(f, "{}@{}", c.join(","), self.m)
    }
}

impl FromStr for FerrersDiagram {
    type Err = Error;

    /// Parses `c1,c2,…,cn` with an optional `@m` suffix; `m` defaults to `c_n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (body, m) = match s.split_once('@') {
            Some((b, m)) => (b, Some(m)),
            None => (s, None),
        };
        let body = body.trim_end_matches(']');
        let cols = body
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad column count {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let m = match m {
            Some(m) => m.trim().parse().map_err(|_| Error::Parse(format!("bad row count {m:?}")))?,
            None => cols.last().copied().unwrap_or(0),
        };
        FerrersDiagram::new(m, cols)
    }
}

/// The values `ν_0, …, ν_{δ−1}` and their minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundProfile {
    pub delta: usize,
    pub nu: Vec<usize>,
    pub nu_min: usize,
    /// Indices `j` with `ν_j = ν_min`.
    pub argmin: Vec<usize>,
}

fn check_delta(f: &FerrersDiagram, delta: usize) -> Result<()> {
    if delta == 0 || delta > f.n() {
        return Err(Error::Precondition(format!("delta {delta} outside 1..={}", f.n())));
    }
    Ok(())
}

/// `ν_j = Σ_{t=1}^{n−δ+1+j} max(c_t − j, 0)` for `j < δ`.
pub fn nu_profile(f: &FerrersDiagram, delta: usize) -> Result<BoundProfile> {
    check_delta(f, delta)?;
    let n = f.n();
    let nu: Vec<usize> = (0..delta)
        .map(|j| f.cols[..n - delta + 1 + j].iter().map(|&c| c.saturating_sub(j)).sum())
        .collect();
    let nu_min = *nu.iter().min().expect("delta >= 1");
    let argmin = (0..delta).filter(|&j| nu[j] == nu_min).collect();
    Ok(BoundProfile { delta, nu, nu_min, argmin })
}

pub fn nu_min(f: &FerrersDiagram, delta: usize) -> Result<usize> {
    Ok(nu_profile(f, delta)?.nu_min)
}

/// Corner dots whose removal leaves `ν_min` unchanged.
pub fn pending_dots(f: &FerrersDiagram, delta: usize) -> Result<Vec<Dot>> {
    let base = nu_min(f, delta)?;
    let mut out = Vec::new();
    for d in f.corners() {
        let g = f.without(d).expect("corner");
        if nu_min(&g, delta)? == base {
            out.push(d);
        }
    }
    Ok(out)
}

/// Single-corner removals that lower `ν_min` by exactly one.
pub fn reduction_children(f: &FerrersDiagram, delta: usize) -> Result<Vec<FerrersDiagram>> {
    let base = nu_min(f, delta)?;
    let mut out = Vec::new();
    for d in f.corners() {
        let g = f.without(d).expect("corner");
        if base > 0 && nu_min(&g, delta)? == base - 1 {
            out.push(g);
        }
    }
    Ok(out)
}

/// All diagrams reachable from `root` through repeated [`reduction_children`] steps,
/// `root` included.
pub fn reduction_closure(root: &FerrersDiagram, delta: usize) -> Result<BTreeSet<FerrersDiagram>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![root.clone()];
    while let Some(f) = stack.pop() {
        if seen.insert(f.clone()) {
            stack.extend(reduction_children(&f, delta)?);
        }
    }
    Ok(seen)
}

/// Positions of the diagonal `D_r = {(i, j) : j − i = n − r}` inside the `m × n` grid,
/// top to bottom.
pub fn diagonal(m: usize, n: usize, r: usize) -> Vec<Dot> {
    (1..=m)
        .filter_map(|i| {
            let j = i as isize + n as isize - r as isize;
            (1..=n as isize).contains(&j).then(|| Dot::new(i, j as usize))
        })
        .collect()
}

/// `|D_r ∩ F|` for `r = 1, …, m`.
pub fn diagonal_intersections(f: &FerrersDiagram) -> Vec<usize> {
    (1..=f.m)
        .map(|r| diagonal(f.m, f.n(), r).iter().filter(|d| f.contains(d.row, d.col)).count())
        .collect()
}

/// `Σ_r max(|D_r ∩ F| − δ + 1, 0)` and whether it attains `ν_min`.
pub fn mds_constructible(f: &FerrersDiagram, delta: usize) -> Result<(bool, usize)> {
    let bound = nu_min(f, delta)?;
    let sum = diagonal_intersections(f)
        .iter()
        .map(|&k| (k + 1).saturating_sub(delta))
        .sum();
    Ok((sum == bound, sum))
}

/// The first `(α, s)` such that `D_s` is an MDS diagonal for the subdiagram
/// `F_(α)` left after deleting the top `α` rows and the right `δ−1−α` columns.
pub fn mds_diagonal(f: &FerrersDiagram, delta: usize) -> Result<Option<(usize, usize)>> {
    let profile = nu_profile(f, delta)?;
    let (m, n) = (f.m, f.n());
    for &alpha in &profile.argmin {
        let last_col = n - (delta - 1 - alpha);
        let inner = |d: &Dot| d.row > alpha && d.col <= last_col;
        let lowest = f
            .dots()
            .filter(|d| inner(d))
            .map(|d| n + d.row - d.col)
            .max();
        let Some(lowest) = lowest else { continue };
        for s in 1..=m {
            if s < lowest {
                continue;
            }
            let diag = diagonal(m, n, s);
            let outside = diag.iter().filter(|d| f.contains(d.row, d.col) && !inner(d)).count();
            let on = diag.iter().filter(|d| f.contains(d.row, d.col) && inner(d)).count();
            if outside == delta - 1 && on > 0 {
                return Ok(Some((alpha, s)));
            }
        }
    }
    Ok(None)
}

fn check_delta_ge2(f: &FerrersDiagram, delta: usize) -> Result<()> {
    check_delta(f, delta)?;
    if delta < 2 {
        return Err(Error::Precondition("delta must be at least 2".into()));
    }
    Ok(())
}

/// `ε = Σ_{t>ℓ} (m − c_t)` for `ℓ = n − δ + 1`.
pub fn staircase_epsilon(f: &FerrersDiagram, delta: usize) -> usize {
    let l = f.n() + 1 - delta;
    f.cols[l..].iter().map(|&c| f.m - c).sum()
}

/// `c_t ≤ c_{ℓ+1} − ε(ℓ+1−t)` for all `t ≤ ℓ`.
pub fn staircase_check(f: &FerrersDiagram, delta: usize) -> Result<bool> {
    check_delta_ge2(f, delta)?;
    let l = f.n() + 1 - delta;
    let eps = staircase_epsilon(f, delta) as i64;
    let pivot = f.cols[l] as i64;
    Ok((1..=l).all(|t| f.cols[t - 1] as i64 <= pivot - eps * (l as i64 + 1 - t as i64)))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `c_ℓ = c_{ℓ+1} < m`, `gcd(c_ℓ, m) = 1` and `ν_min = ν_0`.
pub fn not_subfield_realizable(f: &FerrersDiagram, delta: usize) -> Result<bool> {
    check_delta_ge2(f, delta)?;
    let l = f.n() + 1 - delta;
    let (cl, cl1) = (f.cols[l - 1], f.cols[l]);
    let profile = nu_profile(f, delta)?;
    Ok(cl == cl1 && cl < f.m && gcd(cl, f.m) == 1 && profile.nu_min == profile.nu[0])
}

/// Which alternative of the `δ = n` classification applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaNCase {
    /// `c_t < t` for some `t`, so `ν_min = 0`.
    Zero,
    /// `ν_min = ν_j` for some `j > 0`.
    A,
    /// `ν_min = ν_0 < ν_j` for all `j > 0`.
    B,
}

/// The equivalent conditions of the `δ = n` classification and their values.
#[derive(Clone, Debug)]
pub struct DeltaNReport {
    pub profile: BoundProfile,
    pub case: DeltaNCase,
    /// `min{c_t − t + 1}`.
    pub c_min: i64,
    pub mds_constructible: bool,
    /// Maximal codes exist over the algebraic closure: `c_min = ν_min`.
    pub closure_maximal: bool,
    pub conditions: Vec<(&'static str, bool)>,
    /// All listed conditions agree.
    pub consistent: bool,
}

pub fn delta_n_classification(f: &FerrersDiagram) -> Result<DeltaNReport> {
    let n = f.n();
    if n > f.m {
        return Err(Error::Precondition(format!("delta = n = {n} exceeds m = {}", f.m)));
    }
    let profile = nu_profile(f, n)?;
    let c = &f.cols;
    let zero_test = (1..=n).any(|t| c[t - 1] < t);
    let c_min = (1..=n).map(|t| c[t - 1] as i64 - t as i64 + 1).min().expect("n >= 1");
    let (mds, _) = mds_constructible(f, n)?;
    let closure_maximal = c_min.max(0) as usize == profile.nu_min;
    let (case, conditions) = if zero_test {
        (DeltaNCase::Zero, vec![("nu_min = 0", profile.nu_min == 0)])
    } else if profile.argmin.iter().any(|&j| j > 0) {
        let iv = (1..=n).any(|s| c[s - 1] == s && (1..s).all(|t| c[t - 1] < s));
        (
            DeltaNCase::A,
            vec![
                ("mds-constructible", mds),
                ("maximal over closure", closure_maximal),
                ("nu_min = 1", profile.nu_min == 1),
                ("c_s = s with c_t <= s-1 before", iv),
            ],
        )
    } else {
        (
            DeltaNCase::B,
            vec![
                ("mds-constructible", mds),
                ("maximal over closure", closure_maximal),
                ("c_1 = min(c_t - t + 1)", c[0] as i64 == c_min),
            ],
        )
    };
    let consistent = conditions.iter().all(|x| x.1 == conditions[0].1);
    Ok(DeltaNReport { profile, case, c_min, mds_constructible: mds, closure_maximal, conditions, consistent })
}

/// All diagrams with `n` columns in an `m`-row grid, lexicographically.
pub fn enumerate_diagrams(m: usize, n: usize) -> impl Iterator<Item = FerrersDiagram> {
    let mut next = Some(vec![0usize; n]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        let mut j = n;
        while j > 0 {
            j -= 1;
            if succ[j] < m {
                let v = succ[j] + 1;
                for x in &mut succ[j..] {
                    *x = v;
                }
                next = Some(succ);
                break;
            }
        }
        Some(FerrersDiagram { m, cols: cur })
    })
}
