use std::sync::Arc;

use ferro_core::gf::{extend_field, make_field, subfield_element, OrderedBasis};
use ferro_core::{Elem, Field};
use proptest::prelude::*;

fn fields() -> Vec<Field> {
    let gf4 = make_field(2, 2).unwrap();
    vec![
        make_field(2, 1).unwrap(),
        make_field(3, 1).unwrap(),
        make_field(7, 1).unwrap(),
        gf4.clone(),
        make_field(2, 3).unwrap(),
        make_field(3, 2).unwrap(),
        make_field(5, 2).unwrap(),
        extend_field(&gf4, 2).unwrap(),
        extend_field(&make_field(3, 1).unwrap(), 3).unwrap(),
    ]
}

fn elem(f: &Field, x: u32) -> Elem {
    Elem(x % f.order())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn field_axioms(fi in 0usize..9, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = &fields()[fi];
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a)), Elem::ONE);
        }
    }

    #[test]
    fn frobenius_additive(fi in 0usize..9, a in any::<u32>(), b in any::<u32>()) {
        let f = &fields()[fi];
        let (a, b) = (elem(f, a), elem(f, b));
        let q = f.base_order() as u64;
        prop_assert_eq!(f.frobenius(a), f.pow(a, q));
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
    }

    #[test]
    fn coordinates_linear_bijection(fi in 3usize..9, a in any::<u32>(), b in any::<u32>(), s in any::<u32>()) {
        let ext = &fields()[fi];
        let base = ext.coefficient_field();
        let basis = OrderedBasis::powers(ext, ext.primitive()).unwrap();
        let (a, b) = (elem(ext, a), elem(ext, b));
        let s = elem(&base, s);
        prop_assert_eq!(basis.combine(&basis.coords(a)), a);
        let mut embed = vec![Elem::ZERO; ext.degree()];
        embed[0] = s;
        let lhs = basis.coords(ext.add(ext.mul(ext.from_coeffs(&embed), a), b));
        let rhs: Vec<Elem> = basis.coords(a).iter().zip(basis.coords(b))
            .map(|(&x, y)| base.add(base.mul(s, x), y)).collect();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn coordinates_bijective_exhaustive() {
    for ext in fields().iter().skip(3) {
        let basis = OrderedBasis::polynomial(ext);
        let mut seen = std::collections::HashSet::new();
        for a in ext.elements() {
            assert!(seen.insert(basis.coords(a)));
        }
        assert_eq!(seen.len(), ext.order() as usize);
    }
}

#[test]
fn subfield_generator() {
    for (p, k, b) in [(2u32, 4usize, 2usize), (2, 6, 3), (2, 6, 2), (3, 4, 2), (2, 6, 1)] {
        let f = make_field(p, k).unwrap();
        let beta = subfield_element(&f, b).unwrap();
        let qb = (p as u64).pow(b as u32);
        assert_eq!(f.pow(beta, qb), beta);
        let order = (1..qb).find(|&e| f.pow(beta, e) == Elem::ONE).unwrap();
        assert_eq!(order, qb - 1);
    }
    assert!(subfield_element(&make_field(2, 6).unwrap(), 4).is_err());
}

#[test]
fn construction_is_deterministic() {
    for (p, k) in [(2u32, 8usize), (3, 5), (5, 3), (7, 2)] {
        let a = make_field(p, k).unwrap();
        let b = make_field(p, k).unwrap();
        assert_eq!(a.moduli(), b.moduli());
        let ea = extend_field(&a, 2).unwrap();
        let eb = extend_field(&b, 2).unwrap();
        assert_eq!(ea.moduli(), eb.moduli());
        assert!(Arc::ptr_eq(&extend_field(&a, 1).unwrap(), &a));
    }
}
