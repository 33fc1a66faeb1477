//! Constructions of Ferrers-diagram codes. Every constructor returns a
//! [`RankMetricCode`] with its shape and designed distance attached.

use crate::code::{enumeration_budget, RankMetricCode};
use crate::error::{Error, Result};
use crate::ferrers::{diagonal, diagonal_intersections, nu_min, nu_profile, staircase_check, FerrersDiagram};
use crate::gf::{
    complete_basis, extend_field, field_of_order, linear_map_from_basis_images, subfield_element, Elem, Field,
    OrderedBasis,
};
use crate::matrix::{GfMatrix, Subspace};

/// Parameters of a Gabidulin code over `GF(q^m)`.
#[derive(Clone, Debug)]
pub struct GabidulinSpec {
    pub base: Field,
    pub m: usize,
    pub n: usize,
    pub delta: usize,
    /// Evaluation points in `GF(q^m)`; `1, α, …, α^{n−1}` when absent.
    pub points: Option<Vec<Elem>>,
}

impl GabidulinSpec {
    pub fn new(q: u32, m: usize, n: usize, delta: usize) -> Result<Self> {
        Ok(Self::over(&field_of_order(q)?, m, n, delta))
    }

    pub fn over(base: &Field, m: usize, n: usize, delta: usize) -> Self {
        GabidulinSpec { base: base.clone(), m, n, delta, points: None }
    }

    pub fn with_points(mut self, points: Vec<Elem>) -> Self {
        self.points = Some(points);
        self
    }

    /// `ℓ = n − δ + 1`.
    pub fn l(&self) -> usize {
        self.n + 1 - self.delta
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > self.m {
            return Err(Error::Precondition(format!("need 1 <= n <= m, got n={} m={}", self.n, self.m)));
        }
        if self.delta == 0 || self.delta > self.n {
            return Err(Error::Precondition(format!("delta {} outside 1..={}", self.delta, self.n)));
        }
        Ok(())
    }
}

/// A Gabidulin code with its Moore matrix and the basis used for `φ_B`.
#[derive(Clone, Debug)]
pub struct Gabidulin {
    pub ext: Field,
    pub points: Vec<Elem>,
    /// Rows `g^{q^r}` for `r < ℓ`.
    pub moore: GfMatrix,
    pub basis: OrderedBasis,
    pub code: RankMetricCode,
}

/// `φ_B(v)`: column `j` holds the coordinates of `v_j`.
pub fn phi(basis: &OrderedBasis, v: &[Elem]) -> GfMatrix {
    let base = basis.field().coefficient_field();
    let cols: Vec<Vec<Elem>> = v.iter().map(|&x| basis.coords(x)).collect();
    GfMatrix::from_fn(&base, basis.len(), v.len(), |i, j| cols[j][i])
}

/// Dimension over the coefficient field of the span of `elems`.
pub fn fq_rank(ext: &Field, elems: &[Elem]) -> usize {
    let base = ext.coefficient_field();
    let rows: Vec<Vec<Elem>> = elems.iter().map(|&e| ext.coeffs(e)).collect();
    GfMatrix::from_fn(&base, rows.len(), ext.degree(), |i, j| rows[i][j]).rank()
}

pub fn gabidulin(spec: &GabidulinSpec) -> Result<Gabidulin> {
    spec.validate()?;
    let ext = extend_field(&spec.base, spec.m)?;
    let points = match &spec.points {
        Some(g) => {
            if g.len() != spec.n {
                return Err(Error::Dimension(format!("{} points for length {}", g.len(), spec.n)));
            }
            if g.iter().any(|x| x.0 >= ext.order()) {
                return Err(Error::Precondition("point outside the extension field".into()));
            }
            g.clone()
        }
        None => (0..spec.n).map(|i| ext.pow(ext.primitive(), i as u64)).collect(),
    };
    if fq_rank(&ext, &points) != spec.n {
        return Err(Error::DependentBasis);
    }
    let l = spec.l();
    let mut rows = vec![points.clone()];
    for r in 1..l {
        let next = rows[r - 1].iter().map(|&x| ext.frobenius(x)).collect();
        rows.push(next);
    }
    let moore = GfMatrix::from_fn(&ext, l, spec.n, |r, j| rows[r][j]);
    let basis = OrderedBasis::polynomial(&ext);
    let mut mats = Vec::with_capacity(l * spec.m);
    for row in &rows {
        for &x in basis.elements() {
            let v: Vec<Elem> = row.iter().map(|&g| ext.mul(x, g)).collect();
            mats.push(phi(&basis, &v));
        }
    }
    let code = RankMetricCode::new(&spec.base, spec.m, spec.n, mats)?
        .with_shape(FerrersDiagram::rectangle(spec.m, spec.n))?
        .with_delta(spec.delta);
    Ok(Gabidulin { ext, points, moore, basis, code })
}

/// A generator `(I_ℓ | A)` of an `GF(q^m)`-linear MRD code.
#[derive(Clone, Debug)]
pub struct SystematicMrdGenerator {
    ext: Field,
    g: GfMatrix,
}

impl SystematicMrdGenerator {
    /// Checks the systematic form and that `1, a_{1j}, …, a_{ℓj}` are independent for every column.
    pub fn new(ext: &Field, g: GfMatrix) -> Result<Self> {
        let (l, n) = (g.rows(), g.cols());
        if **g.field() != **ext || l == 0 || l > n || n > ext.degree() {
            return Err(Error::Dimension(format!("bad generator {l}x{n} over GF({})", ext.order())));
        }
        for i in 0..l {
            for j in 0..l {
                if g.get(i, j) != if i == j { Elem::ONE } else { Elem::ZERO } {
                    return Err(Error::Precondition("generator is not of the form (I | A)".into()));
                }
            }
        }
        for j in l..n {
            let mut col = vec![Elem::ONE];
            col.extend((0..l).map(|i| g.get(i, j)));
            if fq_rank(ext, &col) != l + 1 {
                return Err(Error::Precondition(format!("column {} of A fails the independence test", j - l + 1)));
            }
        }
        Ok(SystematicMrdGenerator { ext: ext.clone(), g })
    }

    pub fn field(&self) -> &Field {
        &self.ext
    }

    pub fn generator(&self) -> &GfMatrix {
        &self.g
    }

    pub fn l(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    pub fn delta(&self) -> usize {
        self.n() + 1 - self.l()
    }

    /// Entry `a_{ij}` of `A`, 0-based.
    pub fn a(&self, i: usize, j: usize) -> Elem {
        self.g.get(i, self.l() + j)
    }

    /// `{φ_B(uG) : u_t ∈ spaces[t]}` with each space given by spanning elements.
    fn subcode(&self, basis: &OrderedBasis, spaces: &[&[Elem]]) -> Result<RankMetricCode> {
        let base = self.ext.coefficient_field();
        let mut mats = Vec::new();
        for (t, space) in spaces.iter().enumerate() {
            for &y in space.iter() {
                let v: Vec<Elem> = self.g.row(t).iter().map(|&x| self.ext.mul(y, x)).collect();
                mats.push(phi(basis, &v));
            }
        }
        RankMetricCode::new(&base, self.ext.degree(), self.n(), mats)
    }

    /// The full code `φ_B(rowsp G)` over the polynomial basis.
    pub fn code(&self) -> Result<RankMetricCode> {
        let basis = OrderedBasis::polynomial(&self.ext);
        let spaces = vec![basis.elements(); self.l()];
        Ok(self.subcode(&basis, &spaces)?.with_delta(self.delta()))
    }
}

pub fn systematic_generator(spec: &GabidulinSpec) -> Result<SystematicMrdGenerator> {
    let gab = gabidulin(spec)?;
    let (r, pivots) = gab.moore.rref();
    if pivots != (0..spec.l()).collect::<Vec<_>>() {
        return Err(Error::Precondition("leading minor of the Moore matrix vanishes".into()));
    }
    SystematicMrdGenerator::new(&gab.ext, r)
}

/// True when every nonzero codeword of `rowsp G` has F_q-rank at least `n − ℓ + 1`,
/// checked on one representative per `GF(q^m)`-scalar class.
pub fn is_mrd(ext: &Field, g: &GfMatrix) -> Result<bool> {
    let (l, n) = (g.rows(), g.cols());
    let big = ext.order() as u128;
    let needed = (big.pow(l as u32) - 1) / (big - 1);
    let budget = enumeration_budget();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let delta = n + 1 - l;
    let base = ext.coefficient_field();
    let m = ext.degree();
    for lead in 0..l {
        let free = l - 1 - lead;
        let mut tail = vec![0u32; free];
        loop {
            let mut word = g.row(lead).to_vec();
            for (k, &x) in tail.iter().enumerate() {
                if x != 0 {
                    for (w, &e) in word.iter_mut().zip(g.row(lead + 1 + k)) {
                        *w = ext.add(*w, ext.mul(Elem(x), e));
                    }
                }
            }
            let coords = GfMatrix::from_fn(&base, n, m, |j, i| ext.coeffs(word[j])[i]);
            if coords.rank() < delta {
                return Ok(false);
            }
            let mut k = 0;
            while k < free {
                tail[k] += 1;
                if tail[k] < ext.order() {
                    break;
                }
                tail[k] = 0;
                k += 1;
            }
            if k == free {
                break;
            }
        }
    }
    Ok(true)
}

fn check_fits(f: &FerrersDiagram, delta: usize, gen: &SystematicMrdGenerator) -> Result<usize> {
    if f.m() != gen.field().degree() || f.n() != gen.n() {
        return Err(Error::Dimension(format!(
            "diagram {f} does not match a generator over GF({}) of length {}",
            gen.field().order(),
            gen.n()
        )));
    }
    if delta != gen.delta() {
        return Err(Error::Precondition(format!("generator has distance {}, need {delta}", gen.delta())));
    }
    Ok(f.n() + 1 - delta)
}

/// Subcode with `u_t ∈ ⟨x_1, …, x_{c_t}⟩` when the last `δ−1` columns are full.
pub fn construct_fn1(
    f: &FerrersDiagram,
    delta: usize,
    gen: &SystematicMrdGenerator,
    basis: &OrderedBasis,
) -> Result<RankMetricCode> {
    let l = check_fits(f, delta, gen)?;
    if **basis.field() != **gen.field() {
        return Err(Error::Dimension("basis over a different field".into()));
    }
    if f.cols()[l..].iter().any(|&c| c != f.m()) {
        return Err(Error::Precondition(format!("the last {} columns of {f} are not full", delta - 1)));
    }
    let spaces: Vec<&[Elem]> = f.cols()[..l].iter().map(|&c| &basis.elements()[..c]).collect();
    Ok(gen.subcode(basis, &spaces)?.with_shape(f.clone())?.with_delta(delta))
}

/// Subcode of an MRD code for diagrams below the staircase, with a basis built
/// from the flag `V_i = ⟨y_1, …, y_i⟩` of `chain` (powers of α by default).
pub fn construct_staircase(
    f: &FerrersDiagram,
    delta: usize,
    gen: &SystematicMrdGenerator,
    chain: Option<&OrderedBasis>,
) -> Result<RankMetricCode> {
    let l = check_fits(f, delta, gen)?;
    if !staircase_check(f, delta)? {
        return Err(Error::Precondition(format!("{f} violates the staircase condition for delta {delta}")));
    }
    let profile = nu_profile(f, delta)?;
    if profile.nu_min != profile.nu[0] {
        return Err(Error::Precondition(format!("nu_min < nu_0 for {f}")));
    }
    let ext = gen.field();
    let base = ext.coefficient_field();
    let m = ext.degree();
    let poly = OrderedBasis::polynomial(ext);
    let chain = match chain {
        Some(c) if **c.field() == **ext => c.clone(),
        Some(_) => return Err(Error::Dimension("chain over a different field".into())),
        None => OrderedBasis::powers(ext, ext.primitive())?,
    };
    let flag = |i: usize| -> Subspace {
        let rows: Vec<Vec<Elem>> = chain.elements()[..i].iter().map(|&y| ext.coeffs(y)).collect();
        Subspace::span(&base, m, &rows)
    };
    let c = f.cols();
    let mut w = Vec::with_capacity(l);
    for t in 0..l {
        let mut acc = Subspace::full(&base, m);
        for j in 0..f.n() - l {
            let scaled = crate::matrix::scaled_subspace(&flag(c[l + j]), ext.inv(gen.a(t, j)), &poly)?;
            acc = acc.intersect(&scaled)?;
        }
        w.push(acc);
    }
    let mut span = Subspace::zero(&base, m);
    let mut xs: Vec<Vec<Elem>> = Vec::with_capacity(m);
    for t in 0..l {
        let mut u = flag(c[l]);
        for wj in &w[t..] {
            u = u.intersect(wj)?;
        }
        assert!(u.dim() >= c[t], "intersection bound violated at column {}", t + 1);
        while xs.len() < c[t] {
            let v = u.first_vector_outside(&span).expect("dimension checked");
            span = span.with_vector(&v);
            xs.push(v);
        }
    }
    for target in c[l..].iter().copied().chain([m]) {
        let v_target = flag(target);
        while xs.len() < target {
            let v = v_target.first_vector_outside(&span).expect("span lies in the flag");
            span = span.with_vector(&v);
            xs.push(v);
        }
    }
    let basis = OrderedBasis::new(ext, xs.iter().map(|v| ext.from_coeffs(v)).collect())?;
    let spaces: Vec<&[Elem]> = c[..l].iter().map(|&ct| &basis.elements()[..ct]).collect();
    Ok(gen.subcode(&basis, &spaces)?.with_shape(f.clone())?.with_delta(delta))
}

/// Builds on the subdiagram cut at row `m̂` and pads back to `F`; covers diagrams whose
/// last `δ−1` columns reach row `n`, or whose last `δ−2` do and which satisfy the staircase.
pub fn construct_ctn(f: &FerrersDiagram, delta: usize, q: u32) -> Result<RankMetricCode> {
    let (m, n) = (f.m(), f.n());
    if delta < 2 || delta > n {
        return Err(Error::Precondition(format!("delta {delta} outside 2..={n}")));
    }
    if n > m {
        return Err(Error::Precondition(format!("need n <= m, got {n} > {m}")));
    }
    let l = n + 1 - delta;
    let c = f.cols();
    let tail = |from: usize| c[from..].iter().all(|&x| x >= n);
    let m_hat;
    let code = if tail(l) {
        m_hat = c[l - 1].max(n);
        let small = FerrersDiagram::new(m_hat, c.iter().map(|&x| x.min(m_hat)).collect())?;
        let gen = systematic_generator(&GabidulinSpec::new(q, m_hat, n, delta)?)?;
        let basis = OrderedBasis::polynomial(gen.field());
        construct_fn1(&small, delta, &gen, &basis)?
    } else if tail(l + 1) {
        m_hat = n;
        let small = FerrersDiagram::new(n, c.iter().map(|&x| x.min(n)).collect())?;
        if !staircase_check(&small, delta)? {
            return Err(Error::Precondition(format!("{f} violates the staircase condition below row {n}")));
        }
        let gen = systematic_generator(&GabidulinSpec::new(q, n, n, delta)?)?;
        construct_staircase(&small, delta, &gen, None)?
    } else {
        return Err(Error::Precondition(format!("the last columns of {f} do not reach row {n}")));
    };
    let field = code.field().clone();
    let pad = GfMatrix::zeros(&field, m - m_hat, n);
    let mats = code.basis().iter().map(|b| b.vstack(&pad)).collect();
    let out = RankMetricCode::new(&field, m, n, mats)?.with_shape(f.clone())?.with_delta(delta);
    let bound = nu_min(f, delta)?;
    if out.dim() != bound {
        return Err(Error::Precondition(format!("dimension {} differs from nu_min {bound}", out.dim())));
    }
    Ok(out)
}

fn frob_pow(ext: &Field, x: Elem, k: usize) -> Elem {
    (0..k % ext.degree()).fold(x, |y, _| ext.frobenius(y))
}

/// `Tr(x) = Σ x^{q^i}` down to the coefficient field.
fn trace(ext: &Field, x: Elem) -> Elem {
    let mut acc = Elem::ZERO;
    let mut y = x;
    for _ in 0..ext.degree() {
        acc = ext.add(acc, y);
        y = ext.frobenius(y);
    }
    acc
}

/// Coefficients `c_i` of `Σ c_i x^{q^i}`, the monic linearized polynomial vanishing exactly on `span`.
fn subspace_polynomial(ext: &Field, span: &[Elem]) -> Vec<Elem> {
    let q = ext.base_order() as u64;
    let mut c = vec![Elem::ONE];
    for &v in span {
        let pv = eval_linearized(ext, &c, v);
        let lambda = ext.pow(pv, q - 1);
        let mut next = vec![Elem::ZERO; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] = ext.add(next[i + 1], ext.frobenius(ci));
            next[i] = ext.sub(next[i], ext.mul(lambda, ci));
        }
        c = next;
    }
    c
}

fn eval_linearized(ext: &Field, c: &[Elem], x: Elem) -> Elem {
    let mut acc = Elem::ZERO;
    let mut y = x;
    for &ci in c {
        acc = ext.add(acc, ext.mul(ci, y));
        y = ext.frobenius(y);
    }
    acc
}

/// The matrix of an F_q-linear map of `ext` on polynomial coordinates.
fn map_matrix(ext: &Field, f: impl Fn(Elem) -> Elem) -> GfMatrix {
    let basis = OrderedBasis::polynomial(ext);
    let images: Vec<Vec<Elem>> = basis.elements().iter().map(|&e| ext.coeffs(f(e))).collect();
    GfMatrix::from_fn(&ext.coefficient_field(), ext.degree(), ext.degree(), |i, j| images[j][i])
}

/// A length-`m` MRD generator `(I | A)` with first `A`-column `a`, built as the dual of a
/// Gabidulin code containing `(−a, 1, 0, …, 0)`. That vector is the image of the evaluation
/// points under a linearized polynomial of q-degree `m − ℓ − 1` whose image is `⟨1, a⟩`,
/// namely a Frobenius twist of the trace adjoint of a subspace polynomial.
fn mrd_dual_route(ext: &Field, a: &[Elem]) -> Result<GfMatrix> {
    let m = ext.degree();
    let l = a.len();
    let w = l + 1;
    let s = m - w;
    let base = ext.coefficient_field();
    let mut span = vec![Elem::ONE];
    span.extend_from_slice(a);
    let shifted: Vec<Elem> = span.iter().map(|&x| frob_pow(ext, x, w)).collect();
    let poly = OrderedBasis::polynomial(ext);
    let form = GfMatrix::from_fn(&base, w, m, |i, j| trace(ext, ext.mul(shifted[i], poly.elements()[j])));
    let perp = form.kernel();
    let perp: Vec<Elem> = (0..perp.rows()).map(|i| poly.combine(perp.row(i))).collect();
    let c = subspace_polynomial(ext, &perp);
    let mut f = vec![Elem::ZERO; s + 1];
    for (i, &ci) in c.iter().enumerate() {
        f[s - i] = frob_pow(ext, ci, m - i + s);
    }
    let fm = map_matrix(ext, |x| eval_linearized(ext, &f, x));
    let kernel = fm.kernel();
    let mut h: Vec<Elem> = a.iter().map(|&x| ext.neg(x)).collect();
    h.push(Elem::ONE);
    let mut points = Vec::with_capacity(m);
    for &y in &h {
        let target = ext.coeffs(y);
        let aug = fm.hstack(&GfMatrix::from_fn(&base, m, 1, |i, _| target[i]));
        let (r, pivots) = aug.rref();
        if pivots.contains(&m) {
            return Err(Error::Precondition("image of the linearized map misses <1, a>".into()));
        }
        let mut x = vec![Elem::ZERO; m];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, m);
        }
        points.push(poly.combine(&x));
    }
    points.extend((0..kernel.rows()).map(|i| poly.combine(kernel.row(i))));
    if points.len() != m || fq_rank(ext, &points) != m {
        return Err(Error::Precondition("evaluation points are dependent".into()));
    }
    let k = m - l;
    let mut rows = vec![points];
    for r in 1..k {
        let next = rows[r - 1].iter().map(|&x| ext.frobenius(x)).collect();
        rows.push(next);
    }
    let dual = GfMatrix::from_fn(ext, k, m, |r, j| rows[r][j]);
    let (g, pivots) = dual.kernel().rref();
    if pivots != (0..l).collect::<Vec<_>>() {
        return Err(Error::Precondition("dual code is not systematic".into()));
    }
    let rows: Vec<usize> = (0..l).collect();
    Ok(g.submatrix(&rows, &(0..m).collect::<Vec<_>>()))
}

/// An MRD generator `(I | A)` over `ext` whose first column of `A` is `a`.
///
/// First tries the Gabidulin generator pushed through the F_q-linear field map
/// sending `1 ↦ 1` and its first `A`-column to `a`; when that image is not MRD,
/// uses the dual construction and punctures it to length `n`.
pub fn mrd_with_first_column(ext: &Field, n: usize, a: &[Elem]) -> Result<SystematicMrdGenerator> {
    let l = a.len();
    let m = ext.degree();
    if l == 0 || l >= n || n > m {
        return Err(Error::Precondition(format!("need 1 <= len(a) < n <= m, got {l}, {n}, {m}")));
    }
    let mut target = vec![Elem::ONE];
    target.extend_from_slice(a);
    if fq_rank(ext, &target) != l + 1 {
        return Err(Error::Precondition("1, a_1, ..., a_l are linearly dependent".into()));
    }
    let base = ext.coefficient_field();
    let src = systematic_generator(&GabidulinSpec::over(&base, m, n, n + 1 - l))?;
    let mut source = vec![Elem::ONE];
    source.extend((0..l).map(|i| src.a(i, 0)));
    let domain = complete_basis(ext, &source)?;
    let images = complete_basis(ext, &target)?;
    let map = linear_map_from_basis_images(&domain, images.elements())?;
    let mapped = map.apply_matrix(src.generator());
    let g = if is_mrd(ext, &mapped)? { mapped } else { mrd_dual_route(ext, a)?.truncate_cols(n) };
    if (0..l).any(|i| g.get(i, l) != a[i]) || !is_mrd(ext, &g)? {
        return Err(Error::Precondition("failed to build an MRD generator with the given column".into()));
    }
    SystematicMrdGenerator::new(ext, g)
}

/// The code on `[b,…,b, ℓ+1,…,ℓ+1, m,…,m]` from a subspace invariant under
/// the generator of `GF(q^b)`.
pub fn construct_invariance(q: u32, m: usize, n: usize, delta: usize, b: usize) -> Result<RankMetricCode> {
    if !(3 <= delta && delta <= n && n <= m) {
        return Err(Error::Precondition(format!("need 3 <= delta <= n <= m, got {delta}, {n}, {m}")));
    }
    let l = n + 1 - delta;
    if b == 1 {
        return Err(Error::Precondition("b = 1 gives the full-column case; use fn1".into()));
    }
    if b == 0 || b >= m || m % b != 0 || (l + 1) % b != 0 {
        return Err(Error::Precondition(format!("b = {b} must be a proper divisor of gcd({m}, {})", l + 1)));
    }
    let ext = extend_field(&field_of_order(q)?, m)?;
    let alpha = ext.primitive();
    let beta = subfield_element(&ext, b)?;
    let s = (l + 1) / b - 1;
    let term = |i: usize, j: usize| ext.mul(ext.pow(alpha, i as u64), ext.pow(beta, j as u64));
    let v: Vec<Elem> = (0..=s).flat_map(|i| (0..b).map(move |j| (i, j))).map(|(i, j)| term(i, j)).collect();
    let mut column: Vec<Elem> = (1..=s).flat_map(|i| (0..b).map(move |j| (i, j))).map(|(i, j)| term(i, j)).collect();
    column.extend((1..b).map(|j| term(0, j)));
    let gen = mrd_with_first_column(&ext, n, &column)?;
    let basis = complete_basis(&ext, &v)?;
    let spaces: Vec<&[Elem]> =
        (0..l).map(|t| if t < l + 1 - b { &basis.elements()[..b] } else { &basis.elements()[..l + 1] }).collect();
    let mut cols = vec![b; l + 1 - b];
    cols.extend(std::iter::repeat(l + 1).take(b));
    cols.extend(std::iter::repeat(m).take(delta - 2));
    let shape = FerrersDiagram::new(m, cols)?;
    Ok(gen.subcode(&basis, &spaces)?.with_shape(shape)?.with_delta(delta))
}

/// Companion matrix of the modulus of `GF(q^m)` over `GF(q)`.
pub fn companion_matrix(ext: &Field) -> GfMatrix {
    let base = ext.coefficient_field();
    let m = ext.degree();
    let f = ext.modulus();
    GfMatrix::from_fn(&base, m, m, |i, j| {
        if j == m - 1 {
            base.neg(f[i])
        } else if i == j + 1 {
            Elem::ONE
        } else {
            Elem::ZERO
        }
    })
}

/// `⟨I, C, …, C^{i−1}⟩` with the last `t` columns deleted, on `[i, i+1, …, m, …, m]`.
pub fn construct_companion(q: u32, m: usize, i: usize, t: usize) -> Result<RankMetricCode> {
    if m == 0 || i == 0 || i > m || t >= i {
        return Err(Error::Precondition(format!("need 1 <= i <= m and t < i, got m={m} i={i} t={t}")));
    }
    let base = field_of_order(q)?;
    let n = m - t;
    let c = if m == 1 { GfMatrix::identity(&base, 1) } else { companion_matrix(&extend_field(&base, m)?) };
    let mut mats = Vec::with_capacity(i);
    let mut power = GfMatrix::identity(&base, m);
    for _ in 0..i {
        mats.push(power.truncate_cols(n));
        power = power.mul(&c);
    }
    let shape = FerrersDiagram::new(m, (1..=n).map(|j| (i - 1 + j).min(m)).collect())?;
    Ok(RankMetricCode::new(&base, m, n, mats)?.with_shape(shape)?.with_delta(n))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// True when every `k × k` minor of a `k × len` matrix is nonzero.
pub fn all_maximal_minors_nonzero(g: &GfMatrix) -> bool {
    let rows: Vec<usize> = (0..g.rows()).collect();
    combinations(g.cols(), g.rows())
        .iter()
        .all(|cols| g.submatrix(&rows, cols).det().map_or(false, |d| !d.is_zero()))
}

/// Systematic generator of an `[len, k]` MDS code: Reed–Solomon, extended by
/// the point at infinity when `len = q + 1`.
pub fn mds_generator(field: &Field, len: usize, k: usize) -> Result<GfMatrix> {
    if k == 0 || k > len {
        return Err(Error::Precondition(format!("need 1 <= k <= len, got k={k} len={len}")));
    }
    let g = if k == len {
        GfMatrix::identity(field, len)
    } else if k == 1 {
        GfMatrix::from_fn(field, 1, len, |_, _| Elem::ONE)
    } else if k == len - 1 {
        let minus_one = field.neg(Elem::ONE);
        GfMatrix::from_fn(field, k, len, |i, j| {
            if j == k || i == j {
                if j == k {
                    minus_one
                } else {
                    Elem::ONE
                }
            } else {
                Elem::ZERO
            }
        })
    } else {
        let q = field.order() as usize;
        if len > q + 1 {
            return Err(Error::FieldTooSmall { q: q as u32, needed: (len - 1) as u32 });
        }
        let vander = GfMatrix::from_fn(field, k, len, |r, j| {
            if j == q {
                if r == k - 1 {
                    Elem::ONE
                } else {
                    Elem::ZERO
                }
            } else {
                let mut acc = Elem::ONE;
                for _ in 0..r {
                    acc = field.mul(acc, Elem(j as u32));
                }
                acc
            }
        });
        vander.rref().0
    };
    if len <= 8 {
        assert!(all_maximal_minors_nonzero(&g), "MDS generator with a vanishing minor");
    }
    Ok(g)
}

/// A code built diagonal by diagonal, with the flag telling whether it attains `ν_min`.
#[derive(Clone, Debug)]
pub struct MdsDiagonalCode {
    pub code: RankMetricCode,
    pub diagonal_sum: usize,
    pub maximal: bool,
}

/// MDS codewords placed on the diagonals of `F` with at least `δ` dots.
pub fn construct_mds_diagonal(f: &FerrersDiagram, delta: usize, q: u32) -> Result<MdsDiagonalCode> {
    let bound = nu_min(f, delta)?;
    let base = field_of_order(q)?;
    let (m, n) = (f.m(), f.n());
    let inter = diagonal_intersections(f);
    let mut mats = Vec::new();
    for (idx, &len) in inter.iter().enumerate() {
        if len < delta {
            continue;
        }
        let k = len + 1 - delta;
        let g = mds_generator(&base, len, k)?;
        let dots: Vec<_> = diagonal(m, n, idx + 1).into_iter().filter(|d| f.contains(d.row, d.col)).collect();
        for r in 0..k {
            let mut a = GfMatrix::zeros(&base, m, n);
            for (j, d) in dots.iter().enumerate() {
                a.set(d.row - 1, d.col - 1, g.get(r, j));
            }
            mats.push(a);
        }
    }
    let diagonal_sum = mats.len();
    let code = RankMetricCode::new(&base, m, n, mats)?.with_shape(f.clone())?.with_delta(delta);
    Ok(MdsDiagonalCode { code, diagonal_sum, maximal: diagonal_sum == bound })
}

/// The three explicit upper-triangular matrices for an irreducible `x² − dx − c`.
pub fn construct_upper_triangular_explicit(n: usize, q: u32, c: u32, d: u32) -> Result<RankMetricCode> {
    if n < 2 {
        return Err(Error::Precondition("need n >= 2".into()));
    }
    let base = field_of_order(q)?;
    if c >= q || d >= q {
        return Err(Error::Precondition(format!("coefficients must lie in 0..{q}")));
    }
    let (c, d) = (Elem(c), Elem(d));
    let has_root = base.elements().any(|x| base.sub(base.sub(base.mul(x, x), base.mul(d, x)), c).is_zero());
    if has_root {
        return Err(Error::Reducible);
    }
    let minus_one = base.neg(Elem::ONE);
    let a1 = GfMatrix::from_fn(&base, n, n, |i, j| if i == j && i > 0 { Elem::ONE } else { Elem::ZERO });
    let a2 = GfMatrix::from_fn(&base, n, n, |i, j| if j == i + 1 { Elem::ONE } else { Elem::ZERO });
    let mut a3 = GfMatrix::zeros(&base, n, n);
    for i in 0..n {
        let entries = if i == 0 {
            [Elem::ONE, d, minus_one]
        } else if i % 2 == 1 {
            [Elem::ZERO, Elem::ZERO, Elem::ONE]
        } else {
            [c, d, minus_one]
        };
        for (k, &e) in entries.iter().enumerate() {
            if i + k < n {
                a3.set(i, i + k, e);
            }
        }
    }
    Ok(RankMetricCode::new(&base, n, n, vec![a1, a2, a3])?
        .with_shape(FerrersDiagram::upper_triangular(n))?
        .with_delta(n - 1))
}

fn border(a: &GfMatrix, col: &[Elem], corner: Elem) -> GfMatrix {
    let k = a.rows();
    GfMatrix::from_fn(a.field(), k + 1, k + 1, |i, j| match (i < k, j < k) {
        (true, true) => a.get(i, j),
        (true, false) => col[i],
        (false, true) => Elem::ZERO,
        (false, false) => corner,
    })
}

/// Grows the triple `E11, E22, E12` one size at a time by bordering.
pub fn construct_upper_triangular_recursive(n: usize, q: u32) -> Result<RankMetricCode> {
    if n < 2 {
        return Err(Error::Precondition("need n >= 2".into()));
    }
    let f = field_of_order(q)?;
    let unit = |i: usize, j: usize| GfMatrix::from_fn(&f, 2, 2, |a, b| if (a, b) == (i, j) { Elem::ONE } else { Elem::ZERO });
    let (mut a, mut b, mut c) = (unit(0, 0), unit(1, 1), unit(0, 1));
    for k in 2..n {
        let col_a = Subspace::from_rows(&a.transpose());
        let col_b = Subspace::from_rows(&b.transpose());
        let v = col_b.first_vector_outside(&col_a).expect("colsp(B) is not inside colsp(A)");
        let directions: Vec<(Elem, Elem)> =
            std::iter::once((Elem::ZERO, Elem::ONE)).chain(f.elements().map(|mu| (Elem::ONE, mu))).collect();
        let singular: Vec<(Elem, Elem, GfMatrix)> = directions
            .into_iter()
            .filter_map(|(lam, mu)| {
                let mut mix = a.scale(lam);
                mix.add_scaled(mu, &b);
                (mix.rank() < k).then_some((lam, mu, mix))
            })
            .collect();
        let w = Subspace::full(&f, k)
            .vectors()
            .find(|w| {
                singular.iter().all(|(lam, mu, mix)| {
                    let target: Vec<Elem> =
                        v.iter().zip(w).map(|(&x, &y)| f.add(f.mul(*lam, x), f.mul(*mu, y))).collect();
                    !mix.colspace_contains(&target).expect("sizes agree")
                })
            })
            .expect("a suitable w always exists");
        let zero = vec![Elem::ZERO; k];
        let (a_hat, c_hat, b_hat) = (border(&a, &v, Elem::ZERO), border(&b, &w, Elem::ZERO), border(&c, &zero, Elem::ONE));
        a = a_hat;
        b = b_hat;
        c = c_hat;
    }
    Ok(RankMetricCode::new(&f, n, n, vec![a, b, c])?
        .with_shape(FerrersDiagram::upper_triangular(n))?
        .with_delta(n - 1))
}

/// Four matrices on `[1,3,3,4]` assembled around a `[3×3;3]`-MRD basis `B_1, B_2, B_3`
/// whose first columns are the unit vectors.
pub fn construct_f1334(q: u32) -> Result<RankMetricCode> {
    let mrd = construct_companion(q, 3, 3, 0)?;
    let f = mrd.field().clone();
    let mut bs: Vec<GfMatrix> = mrd.basis().to_vec();
    if bs[0].get(1, 1).is_zero() {
        let swap = GfMatrix::from_rows(&f, &[vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        bs = bs.iter().map(|b| swap.mul(b)).collect();
        bs.swap(1, 2);
    }
    let mut mats = Vec::with_capacity(4);
    for b in &bs {
        mats.push(GfMatrix::from_fn(&f, 4, 4, |i, j| if i < 3 && j >= 1 { b.get(i, j - 1) } else { Elem::ZERO }));
    }
    mats.push(GfMatrix::from_fn(&f, 4, 4, |i, j| if i == j && i != 1 { Elem::ONE } else { Elem::ZERO }));
    let shape = FerrersDiagram::new(4, vec![1, 3, 3, 4])?;
    Ok(RankMetricCode::new(&f, 4, 4, mats)?.with_shape(shape)?.with_delta(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{verify_maximal, DistanceMode};
    use crate::gf::make_field;

    fn assert_maximal(code: &RankMetricCode, dim: usize) {
        let shape = code.shape().expect("shape").clone();
        let delta = code.delta().expect("delta");
        let r = verify_maximal(code, &shape, delta, DistanceMode::exact()).unwrap();
        assert_eq!(r.dimension, dim);
        assert!(r.is_maximal(), "{r}");
        assert_eq!(r.distance.value, delta);
    }

    #[test]
    fn gabidulin_small() {
        let g = gabidulin(&GabidulinSpec::new(2, 3, 3, 2).unwrap()).unwrap();
        assert_maximal(&g.code, 6);
        let g = gabidulin(&GabidulinSpec::new(2, 4, 2, 2).unwrap()).unwrap();
        assert_maximal(&g.code, 4);
        let g = gabidulin(&GabidulinSpec::new(3, 2, 2, 1).unwrap()).unwrap();
        assert_maximal(&g.code, 4);
    }

    #[test]
    fn dependent_points_rejected() {
        let spec = GabidulinSpec::new(2, 3, 2, 2).unwrap().with_points(vec![Elem(1), Elem(1)]);
        assert!(matches!(gabidulin(&spec), Err(Error::DependentBasis)));
    }

    #[test]
    fn systematic_form_has_entries_outside_base() {
        let gen = systematic_generator(&GabidulinSpec::new(2, 4, 4, 3).unwrap()).unwrap();
        for i in 0..gen.l() {
            for j in 0..gen.n() - gen.l() {
                assert!(gen.a(i, j).0 >= 2);
            }
        }
        assert_eq!(min_rank(&gen.code().unwrap()), 3);
    }

    fn min_rank(code: &RankMetricCode) -> usize {
        crate::code::exact_min_rank(code, 1 << 24).unwrap().value
    }

    #[test]
    fn fn1_on_123() {
        let gen = systematic_generator(&GabidulinSpec::new(2, 3, 3, 2).unwrap()).unwrap();
        let f: FerrersDiagram = "1,2,3".parse().unwrap();
        let basis = OrderedBasis::polynomial(gen.field());
        assert_maximal(&construct_fn1(&f, 2, &gen, &basis).unwrap(), 3);
        let g: FerrersDiagram = "1,2,2".parse::<FerrersDiagram>().unwrap();
        let g = FerrersDiagram::new(3, g.cols().to_vec()).unwrap();
        assert!(construct_fn1(&g, 2, &gen, &basis).is_err());
    }

    #[test]
    fn staircase_example() {
        let f: FerrersDiagram = "1,2,4,5,6,6".parse().unwrap();
        let gen = systematic_generator(&GabidulinSpec::new(2, 6, 6, 4).unwrap()).unwrap();
        assert_maximal(&construct_staircase(&f, 4, &gen, None).unwrap(), 7);
    }

    #[test]
    fn ctn_paths() {
        let f: FerrersDiagram = "3,4,5,6,6,7".parse().unwrap();
        assert_maximal(&construct_ctn(&f, 5, 2).unwrap(), 7);
        let f: FerrersDiagram = "2,4,4,5,5".parse().unwrap();
        assert_maximal(&construct_ctn(&f, 3, 2).unwrap(), 10);
    }

    #[test]
    fn first_column_prescribed() {
        let gf2 = make_field(2, 1).unwrap();
        let ext = extend_field(&gf2, 5).unwrap();
        let al = ext.primitive();
        for n in [3, 4, 5] {
            for l in 1..n {
                let a: Vec<Elem> = (1..=l).map(|i| ext.pow(al, (3 * i) as u64)).collect();
                let gen = mrd_with_first_column(&ext, n, &a).unwrap();
                assert!((0..l).all(|i| gen.a(i, 0) == a[i]));
                assert!(is_mrd(&ext, gen.generator()).unwrap());
            }
        }
        let src = systematic_generator(&GabidulinSpec::over(&gf2, 5, 4, 3)).unwrap();
        let a: Vec<Elem> = (0..2).map(|i| src.a(i, 0)).collect();
        assert_eq!(mrd_with_first_column(&ext, 4, &a).unwrap().generator(), src.generator());
    }

    #[test]
    fn invariance_224466() {
        assert_maximal(&construct_invariance(2, 6, 6, 4, 2).unwrap(), 8);
        assert!(construct_invariance(2, 6, 6, 4, 1).is_err());
    }

    #[test]
    fn invariance_2244() {
        let c = construct_invariance(2, 4, 4, 4, 2).unwrap();
        assert_eq!(c.shape().unwrap().cols(), &[2, 2, 4, 4]);
        assert_maximal(&c, 2);
    }

    #[test]
    fn companion_codes() {
        assert_maximal(&construct_companion(2, 3, 2, 0).unwrap(), 2);
        assert_maximal(&construct_companion(3, 3, 3, 1).unwrap(), 3);
        assert_maximal(&construct_companion(2, 4, 1, 0).unwrap(), 1);
    }

    #[test]
    fn mds_generators_are_mds() {
        let f = make_field(3, 1).unwrap();
        for len in 1..=4 {
            for k in 1..=len {
                let g = mds_generator(&f, len, k).unwrap();
                assert!(all_maximal_minors_nonzero(&g));
            }
        }
        assert!(mds_generator(&f, 5, 2).is_err());
    }

    #[test]
    fn mds_diagonal_example() {
        let f: FerrersDiagram = "1,2,2,4,7".parse().unwrap();
        let out = construct_mds_diagonal(&f, 3, 3).unwrap();
        assert!(out.maximal);
        assert_maximal(&out.code, 5);
    }

    #[test]
    fn upper_triangular() {
        assert_maximal(&construct_upper_triangular_explicit(4, 2, 1, 1).unwrap(), 3);
        assert_maximal(&construct_upper_triangular_explicit(2, 2, 1, 1).unwrap(), 3);
        assert!(matches!(construct_upper_triangular_explicit(3, 2, 0, 1), Err(Error::Reducible)));
        for n in 2..=5 {
            assert_maximal(&construct_upper_triangular_recursive(n, 2).unwrap(), 3);
        }
    }

    #[test]
    fn f1334() {
        assert_maximal(&construct_f1334(2).unwrap(), 4);
        assert_maximal(&construct_f1334(3).unwrap(), 4);
    }
}
