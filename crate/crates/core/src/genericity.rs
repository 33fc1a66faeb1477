//! Spectrum-free counts, exact proportion formulas and Monte-Carlo
//! estimates of how often random shaped codes are maximal.

use std::fmt;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::code::enumeration_budget;
use crate::error::{Error, Result};
use crate::ferrers::{nu_profile, Dot, FerrersDiagram};
use crate::gf::{field_of_order, Elem, FieldCtx};
use crate::matrix::{rank_in_place, spectrum_free_slice};
use crate::rng::{uniform_elem, TrialRng};

fn big(q: u64) -> BigInt {
    BigInt::from(q)
}

fn qpow(q: u64, e: usize) -> BigInt {
    num::pow(big(q), e)
}

fn ratio(a: BigInt, b: BigInt) -> BigRational {
    BigRational::new(a, b)
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `|GL_n(F_q)| = ∏_{j<n} (q^n − q^j)`.
pub fn gamma_n(n: usize, q: u64) -> BigInt {
    (0..n).map(|j| qpow(q, n) - qpow(q, j)).product()
}

/// `a_j(q) = (−1)^j ∏_{l=1}^{j} 1/(q^l − 1)`.
fn a_coeff(j: usize, q: u64) -> BigRational {
    let den: BigInt = (1..=j).map(|l| qpow(q, l) - 1).product();
    let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    ratio(sign, den)
}

fn truncated_mul(a: &[BigRational], b: &[BigRational], deg: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); deg + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// The number of `n × n` matrices over `F_q` without eigenvalues in `F_q`, from the
/// weak-composition sum `γ_n Σ_{j≤n} Σ_{i_1+…+i_{q−1}=j} a_{i_1}⋯a_{i_{q−1}}`.
pub fn s_n_exact(n: usize, q: u64) -> BigInt {
    let a: Vec<BigRational> = (0..=n).map(|j| a_coeff(j, q)).collect();
    let mut power = vec![BigRational::zero(); n + 1];
    power[0] = BigRational::one();
    let mut base = a;
    let mut e = q - 1;
    while e > 0 {
        if e & 1 == 1 {
            power = truncated_mul(&power, &base, n);
        }
        base = truncated_mul(&base, &base, n);
        e >>= 1;
    }
    let sum: BigRational = power.into_iter().sum();
    let s = sum * BigRational::from_integer(gamma_n(n, q));
    assert!(s.is_integer(), "spectrum-free count is not an integer");
    s.to_integer()
}

/// Coefficients `[u^k]` for `k ≤ n_max` of `(1−u)^{−1} ∏_{r≥1} (1 − u/q^r)^{q−1}`.
///
/// The infinite product `P` satisfies `P(u) = (1 − u/q)^{q−1} P(u/q)`, which fixes
/// its coefficients recursively and exactly.
pub fn series_coefficients(n_max: usize, q: u64) -> Vec<BigRational> {
    let qr = BigRational::from_integer(big(q));
    let inv_q = qr.recip();
    let c: Vec<BigRational> = (0..q as usize)
        .map(|i| {
            let binom = num::integer::binomial(big(q - 1), big(i as u64));
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            BigRational::from_integer(binom * sign) * num::pow(inv_q.clone(), i)
        })
        .collect();
    let mut p = vec![BigRational::one()];
    for k in 1..=n_max {
        let mut rhs = BigRational::zero();
        for i in 1..c.len().min(k + 1) {
            rhs += &c[i] * num::pow(inv_q.clone(), k - i) * &p[k - i];
        }
        let lhs = BigRational::one() - num::pow(inv_q.clone(), k);
        p.push(rhs / lhs);
    }
    let mut acc = BigRational::zero();
    p.into_iter()
        .map(|x| {
            acc += x;
            acc.clone()
        })
        .collect()
}

/// Compares the series coefficients with `s_n(q)/γ_n(q)` for `n ≤ n_max`.
pub fn s_n_series_check(n_max: usize, q: u64) -> Result<bool> {
    if n_max > 8 {
        return Err(Error::Precondition("series check supports n_max <= 8".into()));
    }
    let series = series_coefficients(n_max, q);
    Ok((0..=n_max).all(|n| series[n] == ratio(s_n_exact(n, q), gamma_n(n, q))))
}

/// `∏_{r=1}^{terms} (1 − q^{−r})^q` in floating point.
pub fn pi_q(q: u64, terms: usize) -> f64 {
    let qf = q as f64;
    let log: f64 = (1..=terms).map(|r| (-qf.powi(-(r as i32))).ln_1p()).sum();
    (qf * log).exp()
}

/// The same partial product as an exact rational.
pub fn pi_q_exact(q: u64, terms: usize) -> BigRational {
    (1..=terms)
        .map(|r| {
            let qr = qpow(q, r);
            num::pow(ratio(&qr - 1, qr), q as usize)
        })
        .product()
}

/// Proportion of `[m×2;2]`-MRD codes among `m`-dimensional codes in `F_q^{m×2}`.
pub fn proportion_m2_mrd(m: usize, q: u64) -> BigRational {
    let sf = ratio(s_n_exact(m, q), qpow(q, m * m));
    sf * mrd_conversion(m, 2, q)
}

/// `∏_{i<m} (q^{mn} − q^{i+m(n−1)}) / (q^{mn} − q^i)`.
pub fn mrd_conversion(m: usize, n: usize, q: u64) -> BigRational {
    let top = qpow(q, m * n);
    (0..m)
        .map(|i| ratio(&top - qpow(q, i + m * (n - 1)), &top - qpow(q, i)))
        .product()
}

/// `(s_m(q)/q^{m²})^{(δ−1)ℓ}`.
pub fn upper_bound_randmrd(m: usize, n: usize, delta: usize, q: u64) -> Result<BigRational> {
    if n == 0 || n > m || delta == 0 || delta > n {
        return Err(Error::Precondition(format!("need 1 <= delta <= n <= m, got {delta}, {n}, {m}")));
    }
    let l = n + 1 - delta;
    let base = ratio(s_n_exact(m, q), qpow(q, m * m));
    Ok(num::pow(base, (delta - 1) * l))
}

/// `s_3(q)/q^9 · ∏_{i=2}^{4} (1 − q^{−i}) · (q^7 − 2q^4 + q)/q^7`.
pub fn upper_bound_f1334(q: u64) -> BigRational {
    let mut r = ratio(s_n_exact(3, q), qpow(q, 9));
    for i in 2..=4 {
        let qi = qpow(q, i);
        r *= ratio(&qi - 1, qi);
    }
    r * ratio(qpow(q, 7) - 2 * qpow(q, 4) + big(q), qpow(q, 7))
}

/// How tuples of matrices are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Independent uniform entries on every dot.
    Uniform,
    /// The `k`-th dot of the first `ℓ` columns (column-major) is the unit of the `k`-th
    /// matrix; the remaining dots are uniform. Requires `ν_min = ν_0`.
    Normalized,
}

/// Exhaustive enumeration or Monte-Carlo sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ProportionReport {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    /// `3·sqrt(p̂(1−p̂)/trials)`; zero in exact mode.
    pub ci3sigma: f64,
    pub seed: Option<u64>,
    pub exact: bool,
    /// The estimate rescaled to the proportion among all codes of the same dimension.
    pub converted: f64,
}

impl ProportionReport {
    fn new(successes: u64, trials: u64, mode: EstimateMode, factor: &BigRational) -> Self {
        let estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let (ci3sigma, seed, exact) = match mode {
            EstimateMode::Exact => (0.0, None, true),
            EstimateMode::Sampled { seed, .. } => {
                (3.0 * (estimate * (1.0 - estimate) / trials.max(1) as f64).sqrt(), Some(seed), false)
            }
        };
        let converted = if exact {
            to_f64(&(ratio(big(successes), big(trials.max(1))) * factor))
        } else {
            estimate * to_f64(factor)
        };
        ProportionReport { successes, trials, estimate, ci3sigma, seed, exact, converted }
    }

    /// True when `value` lies in `estimate ± ci3sigma`.
    pub fn within_3sigma(&self, value: f64) -> bool {
        (self.estimate - value).abs() <= self.ci3sigma
    }

    /// The trailing CSV fields `successes,trials,estimate,ci3sigma,seed`.
    pub fn csv_fields(&self) -> String {
        let ci = if self.exact { "exact".to_string() } else { format!("{:.3e}", self.ci3sigma) };
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        format!("{},{},{:.7e},{},{}", self.successes, self.trials, self.estimate, ci, seed)
    }
}

pub const CSV_HEADER_TAIL: &str = "successes,trials,estimate,ci3sigma,seed";

impl fmt::Display for ProportionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} = {:.7e}", self.successes, self.trials, self.estimate)?;
        if !self.exact {
            write!(f, " ± {:.2e} (3σ)", self.ci3sigma)?;
        }
        write!(f, ", converted {:.7e}", self.converted)
    }
}

/// True when every nonzero combination of the `k` flat `m × n` matrices has rank at least `delta`.
fn combinations_have_rank(f: &FieldCtx, mats: &[Elem], k: usize, m: usize, n: usize, delta: usize) -> bool {
    if delta <= 1 {
        return true;
    }
    let size = m * n;
    let q = f.order();
    let mut cur = vec![Elem::ZERO; size];
    let mut scratch = vec![Elem::ZERO; size];
    let mut digits = vec![0u32; k];
    for lead in 0..k {
        cur.copy_from_slice(&mats[lead * size..(lead + 1) * size]);
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            scratch.copy_from_slice(&cur);
            if rank_in_place(f, &mut scratch, m, n) < delta {
                return false;
            }
            let mut j = lead + 1;
            while j < k {
                let old = Elem(digits[j]);
                digits[j] = (digits[j] + 1) % q;
                let diff = f.sub(Elem(digits[j]), old);
                let src = &mats[j * size..(j + 1) * size];
                for (c, &s) in cur.iter_mut().zip(src) {
                    *c = f.add(*c, f.mul(diff, s));
                }
                if digits[j] != 0 {
                    break;
                }
                j += 1;
            }
            if j == k {
                break;
            }
        }
    }
    true
}

fn independent(f: &FieldCtx, mats: &[Elem], k: usize, size: usize) -> bool {
    let mut buf = mats.to_vec();
    rank_in_place(f, &mut buf, k, size) == k
}

struct ShapeSampler {
    m: usize,
    n: usize,
    k: usize,
    delta: usize,
    /// Flat offsets of dots filled at random.
    free: Vec<usize>,
    /// Flat offsets of the unit dots in normalized mode.
    units: Vec<usize>,
    sampling: Sampling,
}

impl ShapeSampler {
    fn new(f: &FerrersDiagram, delta: usize, sampling: Sampling) -> Result<Self> {
        let profile = nu_profile(f, delta)?;
        let k = profile.nu_min;
        if k == 0 {
            return Err(Error::Precondition(format!("nu_min of {f} for delta {delta} is zero")));
        }
        let (m, n) = (f.m(), f.n());
        let l = n + 1 - delta;
        let flat = |d: &Dot| (d.row - 1) * n + (d.col - 1);
        let (units, free): (Vec<usize>, Vec<usize>) = match sampling {
            Sampling::Uniform => (Vec::new(), f.dots().map(|d| flat(&d)).collect()),
            Sampling::Normalized => {
                if profile.nu[0] != k {
                    return Err(Error::Precondition("normalized sampling needs nu_min = nu_0".into()));
                }
                let units = f.dots().filter(|d| d.col <= l).map(|d| flat(&d)).collect();
                let free = f.dots().filter(|d| d.col > l).map(|d| flat(&d)).collect();
                (units, free)
            }
        };
        Ok(ShapeSampler { m, n, k, delta, free, units, sampling })
    }

    fn size(&self) -> usize {
        self.m * self.n
    }

    /// Places the units; the free entries are written by the caller.
    fn template(&self) -> Vec<Elem> {
        let mut buf = vec![Elem::ZERO; self.k * self.size()];
        for (i, &u) in self.units.iter().enumerate() {
            buf[i * self.size() + u] = Elem::ONE;
        }
        buf
    }

    fn accept(&self, f: &FieldCtx, buf: &[Elem]) -> bool {
        (self.sampling == Sampling::Normalized || independent(f, buf, self.k, self.size()))
            && combinations_have_rank(f, buf, self.k, self.m, self.n, self.delta)
    }

    /// `|T̂|/|T|` divided by the success probability of this sampling.
    fn conversion(&self, q: u64) -> BigRational {
        let big_f = self.free.len() + self.units.len();
        let top = qpow(q, big_f);
        match self.sampling {
            Sampling::Uniform => {
                let den: BigInt = (0..self.k).map(|i| &top - qpow(q, i)).product();
                ratio(qpow(q, big_f * self.k), den)
            }
            Sampling::Normalized => (0..self.k)
                .map(|i| ratio(&top - qpow(q, i + big_f - self.k), &top - qpow(q, i)))
                .product(),
        }
    }
}

fn sample_loop(trials: u64, seed: u64, check: impl Fn(&mut rand_chacha::ChaCha8Rng) -> bool + Sync) -> u64 {
    let rng = TrialRng::new(seed);
    (0..trials).into_par_iter().filter(|&t| check(&mut rng.stream(t))).count() as u64
}

/// Probability that `ν_min` random matrices of shape `F` span a maximal code,
/// with the proportion among all `ν_min`-dimensional shaped codes as `converted`.
pub fn proportion_generic(
    f: &FerrersDiagram,
    delta: usize,
    q: u32,
    sampling: Sampling,
    mode: EstimateMode,
) -> Result<ProportionReport> {
    let field = field_of_order(q)?;
    let s = ShapeSampler::new(f, delta, sampling)?;
    let factor = s.conversion(q as u64);
    let cells = s.k * s.free.len();
    match mode {
        EstimateMode::Exact => {
            let total = (q as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
            let budget = enumeration_budget();
            if total > budget as u128 {
                return Err(Error::BudgetExceeded { needed: total, budget });
            }
            let successes = (0..total as u64)
                .into_par_iter()
                .filter(|&idx| {
                    let mut buf = s.template();
                    let mut x = idx;
                    for i in 0..s.k {
                        for &off in &s.free {
                            buf[i * s.size() + off] = Elem((x % q as u64) as u32);
                            x /= q as u64;
                        }
                    }
                    s.accept(&field, &buf)
                })
                .count() as u64;
            Ok(ProportionReport::new(successes, total as u64, mode, &factor))
        }
        EstimateMode::Sampled { trials, seed } => {
            let successes = sample_loop(trials, seed, |rng| {
                let mut buf = s.template();
                for i in 0..s.k {
                    for &off in &s.free {
                        buf[i * s.size() + off] = uniform_elem(rng, q);
                    }
                }
                s.accept(&field, &buf)
            });
            Ok(ProportionReport::new(successes, trials, mode, &factor))
        }
    }
}

/// True when every nonzero `F_q`-combination of the `k` square matrices is spectrum-free.
fn all_combinations_spectrum_free(f: &FieldCtx, mats: &[Elem], k: usize, m: usize, scratch: &mut [Elem]) -> bool {
    let size = m * m;
    let q = f.order();
    let mut cur = vec![Elem::ZERO; size];
    let mut digits = vec![0u32; k];
    for lead in 0..k {
        cur.copy_from_slice(&mats[lead * size..(lead + 1) * size]);
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            if !spectrum_free_slice(f, &cur, m, scratch) {
                return false;
            }
            let mut j = lead + 1;
            while j < k {
                let old = Elem(digits[j]);
                digits[j] = (digits[j] + 1) % q;
                let diff = f.sub(Elem(digits[j]), old);
                for (c, &s) in cur.iter_mut().zip(&mats[j * size..(j + 1) * size]) {
                    *c = f.add(*c, f.mul(diff, s));
                }
                if digits[j] != 0 {
                    break;
                }
                j += 1;
            }
            if j == k {
                break;
            }
        }
    }
    true
}

/// All spectrum-free `m × m` matrices, as a membership table over the base-`q` encoding
/// `Σ a_k q^k` of the row-major entries, plus the list of members.
fn spectrum_free_table(f: &FieldCtx, m: usize) -> Result<(Vec<bool>, Vec<Vec<Elem>>)> {
    let q = f.order() as u64;
    let total = (q as u128).checked_pow((m * m) as u32).unwrap_or(u128::MAX);
    let budget = enumeration_budget();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    let decode = |idx: u64| -> Vec<Elem> {
        let mut x = idx;
        (0..m * m)
            .map(|_| {
                let d = Elem((x % q) as u32);
                x /= q;
                d
            })
            .collect()
    };
    let table: Vec<bool> = (0..total as u64)
        .into_par_iter()
        .map_init(
            || vec![Elem::ZERO; m * m],
            |scratch, idx| spectrum_free_slice(f, &decode(idx), m, scratch),
        )
        .collect();
    let members = (0..total as u64).filter(|&i| table[i as usize]).map(decode).collect();
    Ok((table, members))
}

fn encode(mat: &[Elem], q: u64) -> usize {
    mat.iter().rev().fold(0u64, |acc, e| acc * q + e.0 as u64) as usize
}

/// Counts `k`-tuples of spectrum-free matrices all of whose nonzero combinations are spectrum-free.
fn count_spectrum_free_tuples(f: &FieldCtx, m: usize, k: usize) -> Result<u64> {
    let (table, members) = spectrum_free_table(f, m)?;
    let q = f.order() as u64;
    fn extend(
        f: &FieldCtx,
        q: u64,
        table: &[bool],
        members: &[Vec<Elem>],
        prefix: &mut Vec<Vec<Elem>>,
        k: usize,
    ) -> u64 {
        if prefix.len() == k {
            return 1;
        }
        let depth = prefix.len();
        let mut count = 0;
        let mut combo = vec![Elem::ZERO; members.first().map_or(0, |x| x.len())];
        for cand in members {
            let mut ok = true;
            let mut digits = vec![0u32; depth];
            'outer: loop {
                let mut j = 0;
                while j < depth {
                    digits[j] = (digits[j] + 1) % q as u32;
                    if digits[j] != 0 {
                        break;
                    }
                    j += 1;
                }
                if j == depth {
                    break 'outer;
                }
                combo.copy_from_slice(cand);
                for (p, &d) in prefix.iter().zip(&digits) {
                    if d != 0 {
                        for (c, &x) in combo.iter_mut().zip(p) {
                            *c = f.add(*c, f.mul(Elem(d), x));
                        }
                    }
                }
                if !table[encode(&combo, q)] {
                    ok = false;
                    break;
                }
            }
            if ok {
                prefix.push(cand.clone());
                count += extend(f, q, table, members, prefix, k);
                prefix.pop();
            }
        }
        count
    }
    if k == 0 {
        return Ok(1);
    }
    Ok(members
        .par_iter()
        .map(|first| {
            let mut prefix = vec![first.clone()];
            extend(f, q, &table, &members, &mut prefix, k)
        })
        .sum())
}

/// `|V̂_q|/|V_q|` for `[m×n;n]`-MRD codes: the fraction of `(M_1, …, M_{n−1})` in
/// `(F_q^{m×m})^{n−1}` whose nonzero combinations are all spectrum-free.
pub fn mrd_proportion_normalized(m: usize, n: usize, delta: usize, q: u32, mode: EstimateMode) -> Result<ProportionReport> {
    if delta != n || n < 2 || n > m {
        return Err(Error::Precondition(format!("need delta = n with 2 <= n <= m, got {delta}, {n}, {m}")));
    }
    let field = field_of_order(q)?;
    let k = n - 1;
    let factor = mrd_conversion(m, n, q as u64);
    match mode {
        EstimateMode::Exact => {
            let total = (q as u128).checked_pow((m * m * k) as u32).unwrap_or(u128::MAX);
            if total > u64::MAX as u128 {
                return Err(Error::BudgetExceeded { needed: total, budget: u64::MAX });
            }
            let successes = count_spectrum_free_tuples(&field, m, k)?;
            Ok(ProportionReport::new(successes, total as u64, mode, &factor))
        }
        EstimateMode::Sampled { trials, seed } => {
            let size = m * m;
            let successes = sample_loop(trials, seed, |rng| {
                let mats: Vec<Elem> = (0..k * size).map(|_| uniform_elem(rng, q)).collect();
                let mut scratch = vec![Elem::ZERO; size];
                all_combinations_spectrum_free(&field, &mats, k, m, &mut scratch)
            });
            Ok(ProportionReport::new(successes, trials, mode, &factor))
        }
    }
}

/// Exhaustive count of spectrum-free `n × n` matrices over `F_q`.
pub fn count_spectrum_free(n: usize, q: u32) -> Result<u64> {
    let field = field_of_order(q)?;
    Ok(spectrum_free_table(&field, n)?.1.len() as u64)
}

/// One row of a limit scan.
#[derive(Clone, Debug)]
pub struct LimitRow {
    pub q: u32,
    pub report: ProportionReport,
}

/// Uniform-sampling estimates of `P_{q_0^r}` for `r = 1, …, r_max`.
pub fn genericity_limit_scan(
    f: &FerrersDiagram,
    delta: usize,
    q0: u32,
    r_max: u32,
    trials: u64,
    seed: u64,
) -> Result<Vec<LimitRow>> {
    (1..=r_max)
        .map(|r| {
            let q = q0
                .checked_pow(r)
                .filter(|&q| q <= crate::gf::MAX_ORDER as u32)
                .ok_or(Error::FieldTooLarge((q0 as u64).saturating_pow(r)))?;
            let report = proportion_generic(f, delta, q, Sampling::Uniform, EstimateMode::Sampled { trials, seed })?;
            Ok(LimitRow { q, report })
        })
        .collect()
}

/// `Σ_{j=0}^{n} (−1)^j / j!`, the large-`q` limit of `s_n(q)/q^{n²}`.
pub fn derangement_limit(n: usize) -> BigRational {
    let mut fact = BigInt::one();
    let mut sum = BigRational::zero();
    for j in 0..=n {
        if j > 0 {
            fact *= j;
        }
        let term = ratio(BigInt::one(), fact.clone());
        sum += if j % 2 == 0 { term } else { -term };
    }
    sum
}
