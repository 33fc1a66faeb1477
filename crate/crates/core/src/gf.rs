//! Finite fields GF(p^k) and extension towers with table-driven arithmetic.
//!
//! Every field is identified by its prime, the chain of moduli from the
//! prime-level field upward, and the resulting order `q`. Elements are
//! serialized as integers in `[0, q)`: the coefficient vector over the
//! immediate base field is expanded in base `q_base`, constant term least
//! significant. Since the base field uses the same encoding, this is the
//! base-`p` digit expansion of the flattened coefficient vector, and base
//! field elements embed as the integers below `q_base`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::GfMatrix;

/// Largest field order supported by the lookup tables.
pub const MAX_ORDER: u64 = 1 << 20;

const TABLE_LIMIT: u32 = 256;

/// A field element in its integer serialization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shared handle to an immutable field context.
pub type Field = Arc<FieldCtx>;

/// Arithmetic context of a finite field.
pub struct FieldCtx {
    p: u32,
    order: u32,
    prime_degree: usize,
    degree: usize,
    base_order: u32,
    base: Option<Field>,
    modulus: Vec<Elem>,
    primitive: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_tab: Option<Vec<u32>>,
    mul_tab: Option<Vec<u32>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("order", &self.order)
            .field("tower", &self.tower())
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p && self.order == other.order && self.moduli() == other.moduli())
    }
}

impl Eq for FieldCtx {}

/// Coefficient arithmetic of the field a modulus lives over.
#[derive(Clone, Copy)]
enum Coeffs<'a> {
    Prime(u32),
    Ext(&'a FieldCtx),
}

impl Coeffs<'_> {
    fn order(self) -> u32 {
        match self {
            Coeffs::Prime(p) => p,
            Coeffs::Ext(f) => f.order,
        }
    }

    fn add(self, a: u32, b: u32) -> u32 {
        match self {
            Coeffs::Prime(p) => (a + b) % p,
            Coeffs::Ext(f) => f.add(Elem(a), Elem(b)).0,
        }
    }

    fn sub(self, a: u32, b: u32) -> u32 {
        match self {
            Coeffs::Prime(p) => (a + p - b) % p,
            Coeffs::Ext(f) => f.sub(Elem(a), Elem(b)).0,
        }
    }

    fn mul(self, a: u32, b: u32) -> u32 {
        match self {
            Coeffs::Prime(p) => ((a as u64 * b as u64) % p as u64) as u32,
            Coeffs::Ext(f) => f.mul(Elem(a), Elem(b)).0,
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients low-degree first.
fn poly_rem(k: Coeffs, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = k.sub(r[shift + i], k.mul(lead, c));
            }
        }
        r.pop();
    }
    r
}

fn poly_mulmod(k: Coeffs, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = k.add(prod[i + j], k.mul(x, y));
        }
    }
    let mut r = poly_rem(k, &prod, m);
    r.resize(m.len() - 1, 0);
    r
}

fn digits_of(mut v: u64, radix: u32, len: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(len);
    for _ in 0..len {
        d.push((v % radix as u64) as u32);
        v /= radix as u64;
    }
    d
}

fn undigits(d: &[u32], radix: u32) -> u64 {
    d.iter().rev().fold(0u64, |acc, &x| acc * radix as u64 + x as u64)
}

/// True when the monic polynomial `f` (low-degree first) is irreducible over `k`:
/// no root and no monic factor of degree 2..=deg/2.
fn irreducible_over(k: Coeffs, f: &[u32]) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let q = k.order();
    for x in 0..q {
        let v = f.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x), c));
        if v == 0 {
            return false;
        }
    }
    for e in 2..=d / 2 {
        let count = (q as u64).pow(e as u32);
        for idx in 0..count {
            let mut g = digits_of(idx, q, e);
            g.push(1);
            if poly_rem(k, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `d` over `k`, ordered by the integer
/// encoding of its non-leading coefficients.
fn smallest_irreducible(k: Coeffs, d: usize) -> Option<Vec<u32>> {
    let q = k.order();
    if d == 1 {
        return Some(vec![0, 1]);
    }
    let count = (q as u64).checked_pow(d as u32)?;
    (0..count).find_map(|idx| {
        let mut f = digits_of(idx, q, d);
        f.push(1);
        irreducible_over(k, &f).then_some(f)
    })
}

impl FieldCtx {
    fn build(p: u32, base: Option<Field>, modulus: Vec<u32>) -> Result<FieldCtx> {
        let degree = modulus.len() - 1;
        let (base_order, prime_degree) = match &base {
            None => (p, degree),
            Some(b) => (b.order, b.prime_degree * degree),
        };
        let order = (base_order as u64).checked_pow(degree as u32).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(Error::FieldTooLarge(order));
        }
        let order = order as u32;
        let k = match &base {
            None => Coeffs::Prime(p),
            Some(b) => Coeffs::Ext(b),
        };
        if !irreducible_over(k, &modulus) {
            return Err(Error::Reducible);
        }

        let to_poly = |v: u32| digits_of(v as u64, base_order, degree);
        let from_poly = |d: &[u32]| undigits(d, base_order) as u32;
        let mulmod = |a: u32, b: u32| from_poly(&poly_mulmod(k, &to_poly(a), &to_poly(b), &modulus));
        let pow = |a: u32, mut e: u64| {
            let (mut r, mut b) = (1u32, a);
            while e > 0 {
                if e & 1 == 1 {
                    r = mulmod(r, b);
                }
                b = mulmod(b, b);
                e >>= 1;
            }
            r
        };

        let group = order as u64 - 1;
        let factors = prime_factors(group);
        let primitive = (1..order)
            .find(|&g| factors.iter().all(|&r| pow(g, group / r) != 1))
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![u32::MAX; order as usize];
        let mut x = 1u32;
        for i in 0..group as usize {
            exp[i] = x;
            exp[i + group as usize] = x;
            log[x as usize] = i as u32;
            x = mulmod(x, primitive);
        }

        let neg = (0..order)
            .map(|v| {
                let d: Vec<u32> = digits_of(v as u64, p, prime_degree)
                    .into_iter()
                    .map(|c| (p - c) % p)
                    .collect();
                undigits(&d, p) as u32
            })
            .collect();

        let mut ctx = FieldCtx {
            p,
            order,
            prime_degree,
            degree,
            base_order,
            base,
            modulus: modulus.into_iter().map(Elem).collect(),
            primitive: Elem(primitive),
            exp,
            log,
            neg,
            add_tab: None,
            mul_tab: None,
        };
        if order <= TABLE_LIMIT {
            let n = order as usize;
            let mut add = vec![0u32; n * n];
            let mut mul = vec![0u32; n * n];
            for a in 0..order {
                for b in 0..order {
                    add[a as usize * n + b as usize] = ctx.add_digits(a, b);
                    mul[a as usize * n + b as usize] = ctx.mul_log(a, b);
                }
            }
            ctx.add_tab = Some(add);
            ctx.mul_tab = Some(mul);
        }
        Ok(ctx)
    }

    /// Rebuilds a field from its prime and explicit tower moduli (bottom level first).
    pub fn from_moduli(p: u32, moduli: &[Vec<u32>]) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let mut field: Option<Field> = None;
        for m in moduli {
            if m.len() < 2 || *m.last().unwrap() != 1 {
                return Err(Error::Parse("modulus must be monic of degree >= 1".into()));
            }
            let bound = field.as_ref().map_or(p, |f| f.order);
            if m.iter().any(|&c| c >= bound) {
                return Err(Error::Parse("modulus coefficient out of range".into()));
            }
            field = Some(Arc::new(FieldCtx::build(p, field.clone(), m.clone())?));
        }
        field.ok_or_else(|| Error::Parse("empty tower".into()))
    }

    #[inline]
    fn add_digits(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (p, mut a, mut b) = (self.p, a, b);
        let (mut r, mut scale) = (0u32, 1u32);
        while a > 0 || b > 0 {
            r += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale = scale.wrapping_mul(p);
        }
        r
    }

    #[inline]
    fn mul_log(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if let Some(t) = &self.add_tab {
            return Elem(t[a.index() * self.order as usize + b.index()]);
        }
        Elem(self.add_digits(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if let Some(t) = &self.mul_tab {
            return Elem(t[a.index() * self.order as usize + b.index()]);
        }
        Elem(self.mul_log(a.0, b.0))
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(!a.is_zero(), "inverse of zero");
        let g = self.order - 1;
        Elem(self.exp[((g - self.log[a.index()]) % g) as usize])
    }

    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let g = (self.order - 1) as u64;
        let l = (self.log[a.index()] as u64 * (e % g)) % g;
        Elem(self.exp[l as usize])
    }

    /// `α^i` for the primitive element α.
    #[inline]
    pub fn exp(&self, i: u64) -> Elem {
        Elem(self.exp[(i % (self.order as u64 - 1)) as usize])
    }

    /// Discrete logarithm to the primitive element; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.index()])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Field order q.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree over the prime field.
    pub fn prime_degree(&self) -> usize {
        self.prime_degree
    }

    /// Degree over the immediate base field.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base_order(&self) -> u32 {
        self.base_order
    }

    pub fn base(&self) -> Option<&Field> {
        self.base.as_ref()
    }

    /// Monic modulus over the immediate base, constant term first.
    pub fn modulus(&self) -> &[Elem] {
        &self.modulus
    }

    /// Degrees of each tower level, bottom first.
    pub fn tower(&self) -> Vec<usize> {
        let mut t = self.base.as_ref().map_or_else(Vec::new, |b| b.tower());
        t.push(self.degree);
        t
    }

    /// Moduli of each tower level, bottom first.
    pub fn moduli(&self) -> Vec<Vec<u32>> {
        let mut t = self.base.as_ref().map_or_else(Vec::new, |b| b.moduli());
        t.push(self.modulus.iter().map(|e| e.0).collect());
        t
    }

    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    /// Coefficients over the immediate base, constant term first.
    pub fn coeffs(&self, a: Elem) -> Vec<Elem> {
        digits_of(a.0 as u64, self.base_order, self.degree)
            .into_iter()
            .map(Elem)
            .collect()
    }

    pub fn from_coeffs(&self, c: &[Elem]) -> Elem {
        assert_eq!(c.len(), self.degree, "coefficient vector length");
        let d: Vec<u32> = c.iter().map(|e| e.0).collect();
        Elem(undigits(&d, self.base_order) as u32)
    }

    /// True when `a` lies in the immediate base field.
    pub fn in_base(&self, a: Elem) -> bool {
        a.0 < self.base_order
    }

    /// Context of the coefficient field: the base level, or GF(p) for a single-level field.
    pub fn coefficient_field(&self) -> Field {
        match &self.base {
            Some(b) => b.clone(),
            None => make_field(self.p, 1).expect("prime field"),
        }
    }

    /// The image `a^{q_base}` under the Frobenius of the immediate base.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.base_order as u64)
    }

    pub fn to_poly_string(&self, a: Elem) -> String {
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match (i, c.0) {
                (0, v) => v.to_string(),
                (1, 1) => "x".into(),
                (1, v) => format!("{v}x"),
                (i, 1) => format!("x^{i}"),
                (i, v) => format!("{v}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// GF(p^k) over the prime field with the smallest irreducible modulus.
pub fn make_field(p: u32, k: usize) -> Result<Field> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if k == 0 {
        return Err(Error::Precondition("field degree must be at least 1".into()));
    }
    if (p as u64).checked_pow(k as u32).map_or(true, |q| q > MAX_ORDER) {
        return Err(Error::FieldTooLarge((p as u64).saturating_pow(k as u32)));
    }
    let modulus = smallest_irreducible(Coeffs::Prime(p), k).expect("irreducibles exist in every degree");
    Ok(Arc::new(FieldCtx::build(p, None, modulus)?))
}

/// GF(q) for a prime power `q`, built over its prime field.
pub fn field_of_order(q: u32) -> Result<Field> {
    if q < 2 {
        return Err(Error::Precondition(format!("{q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2");
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r != 1 {
        return Err(Error::Precondition(format!("{q} is not a prime power")));
    }
    make_field(p, k)
}

/// Degree-`m` extension of `base` with the smallest irreducible modulus over `base`.
pub fn extend_field(base: &Field, m: usize) -> Result<Field> {
    if m == 0 {
        return Err(Error::Precondition("extension degree must be at least 1".into()));
    }
    if m == 1 {
        return Ok(base.clone());
    }
    if (base.order as u64).checked_pow(m as u32).map_or(true, |q| q > MAX_ORDER) {
        return Err(Error::FieldTooLarge((base.order as u64).saturating_pow(m as u32)));
    }
    let modulus = smallest_irreducible(Coeffs::Ext(base), m).expect("irreducibles exist in every degree");
    Ok(Arc::new(FieldCtx::build(base.p, Some(base.clone()), modulus)?))
}

/// Smallest element of multiplicative order q − 1.
pub fn primitive_element(ctx: &FieldCtx) -> Elem {
    ctx.primitive
}

/// The generator `α^((q^m−1)/(q^b−1))` of the subfield of order `q^b`, where q is the base order.
pub fn subfield_element(ctx: &FieldCtx, b: usize) -> Result<Elem> {
    let m = ctx.degree;
    if b == 0 || m % b != 0 {
        return Err(Error::Precondition(format!("{b} does not divide {m}")));
    }
    let q = ctx.base_order as u64;
    let e = (q.pow(m as u32) - 1) / (q.pow(b as u32) - 1);
    Ok(ctx.pow(ctx.primitive, e))
}

/// An ordered basis of an extension over its immediate base field.
#[derive(Clone, Debug)]
pub struct OrderedBasis {
    ext: Field,
    elements: Vec<Elem>,
    inverse: GfMatrix,
}

impl OrderedBasis {
    pub fn new(ext: &Field, elements: Vec<Elem>) -> Result<Self> {
        let m = ext.degree;
        if elements.len() != m {
            return Err(Error::Dimension(format!("basis needs {m} elements, got {}", elements.len())));
        }
        let base = ext.coefficient_field();
        let cols = GfMatrix::from_fn(&base, m, m, |i, j| ext.coeffs(elements[j])[i]);
        let inverse = cols.inverse().ok_or(Error::DependentBasis)?;
        Ok(OrderedBasis { ext: ext.clone(), elements, inverse })
    }

    /// The basis `1, x, …, x^{m−1}` of the polynomial representation.
    pub fn polynomial(ext: &Field) -> Self {
        let b = ext.base_order;
        let elements = (0..ext.degree).map(|i| Elem(b.pow(i as u32))).collect();
        OrderedBasis::new(ext, elements).expect("polynomial basis is independent")
    }

    /// The basis `1, a, …, a^{m−1}` for an element of full degree.
    pub fn powers(ext: &Field, a: Elem) -> Result<Self> {
        let elements = (0..ext.degree).map(|i| ext.pow(a, i as u64)).collect();
        OrderedBasis::new(ext, elements)
    }

    pub fn field(&self) -> &Field {
        &self.ext
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Coordinates of `a` over the base field.
    pub fn coords(&self, a: Elem) -> Vec<Elem> {
        self.inverse.mul_vec(&self.ext.coeffs(a))
    }

    /// The element with the given coordinates.
    pub fn combine(&self, coords: &[Elem]) -> Elem {
        let base = self.inverse.field();
        let mut acc = Elem::ZERO;
        for (&c, &x) in coords.iter().zip(&self.elements) {
            acc = self.ext.add(acc, self.ext.mul(c, x));
        }
        debug_assert!(coords.iter().all(|c| c.0 < base.order()));
        acc
    }
}

/// Coordinate vector `[a]_B`.
pub fn coordinates(a: Elem, basis: &OrderedBasis) -> Vec<Elem> {
    basis.coords(a)
}

/// Completes `partial` to a basis by appending, one at a time, the
/// lexicographically smallest coordinate vector that enlarges the span.
pub fn complete_basis(ext: &Field, partial: &[Elem]) -> Result<OrderedBasis> {
    let base = ext.coefficient_field();
    let m = ext.degree;
    let mut span = crate::matrix::Subspace::zero(&base, m);
    let mut elems = Vec::with_capacity(m);
    for &x in partial {
        let c = ext.coeffs(x);
        if span.contains(&c) {
            return Err(Error::DependentBasis);
        }
        span = span.with_vector(&c);
        elems.push(x);
    }
    let ambient = crate::matrix::Subspace::full(&base, m);
    while elems.len() < m {
        let v = ambient.first_vector_outside(&span).expect("span is proper");
        span = span.with_vector(&v);
        elems.push(ext.from_coeffs(&v));
    }
    OrderedBasis::new(ext, elems)
}

/// An F_q-linear endomorphism of an extension, stored as a matrix on polynomial coordinates.
#[derive(Clone, Debug)]
pub struct LinearMap {
    ext: Field,
    matrix: GfMatrix,
}

impl LinearMap {
    pub fn apply(&self, a: Elem) -> Elem {
        self.ext.from_coeffs(&self.matrix.mul_vec(&self.ext.coeffs(a)))
    }

    pub fn is_bijective(&self) -> bool {
        self.matrix.rank() == self.matrix.rows()
    }

    pub fn matrix(&self) -> &GfMatrix {
        &self.matrix
    }

    /// Entrywise application to a matrix over the extension.
    pub fn apply_matrix(&self, m: &GfMatrix) -> GfMatrix {
        GfMatrix::from_fn(m.field(), m.rows(), m.cols(), |i, j| self.apply(m.get(i, j)))
    }
}

/// The unique F_q-linear map sending `domain[i]` to `images[i]`.
pub fn linear_map_from_basis_images(domain: &OrderedBasis, images: &[Elem]) -> Result<LinearMap> {
    let ext = domain.field();
    let m = ext.degree;
    if images.len() != m {
        return Err(Error::Dimension(format!("need {m} images, got {}", images.len())));
    }
    let base = ext.coefficient_field();
    let img = GfMatrix::from_fn(&base, m, m, |i, j| ext.coeffs(images[j])[i]);
    Ok(LinearMap { ext: ext.clone(), matrix: img.mul(&domain.inverse) })
}
