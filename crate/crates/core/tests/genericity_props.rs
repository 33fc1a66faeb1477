use std::collections::HashSet;

use ferro_core::code::exact_min_rank;
use ferro_core::ferrers::nu_min;
use ferro_core::genericity::{
    mrd_proportion_normalized, proportion_generic, s_n_exact, s_n_series_check, EstimateMode, Sampling,
};
use ferro_core::gf::make_field;
use ferro_core::matrix::Subspace;
use ferro_core::{Elem, FerrersDiagram, Field, GfMatrix, RankMetricCode};
use num::{BigInt, ToPrimitive};

/// Spectrum-free matrices over a prime field, counted with integer determinants.
fn brute_spectrum_free(n: usize, q: u32) -> u64 {
    fn det(a: &[i64], n: usize, q: i64) -> i64 {
        if n == 1 {
            return a[0].rem_euclid(q);
        }
        let mut acc = 0;
        for c in 0..n {
            let minor: Vec<i64> = (1..n)
                .flat_map(|r| (0..n).filter(move |&k| k != c).map(move |k| (r, k)))
                .map(|(r, k)| a[r * n + k])
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            acc += sign * a[c] * det(&minor, n - 1, q);
        }
        acc.rem_euclid(q)
    }
    let total = (q as u64).pow((n * n) as u32);
    (0..total)
        .filter(|&idx| {
            let mut x = idx;
            let m: Vec<i64> = (0..n * n)
                .map(|_| {
                    let d = (x % q as u64) as i64;
                    x /= q as u64;
                    d
                })
                .collect();
            (0..q as i64).all(|l| {
                let shifted: Vec<i64> =
                    m.iter().enumerate().map(|(k, &v)| if k % (n + 1) == 0 { v - l } else { v }).collect();
                det(&shifted, n, q as i64) != 0
            })
        })
        .count() as u64
}

#[test]
fn s_n_matches_enumeration() {
    for (n, q) in [(1usize, 2u32), (1, 3), (2, 2), (2, 3), (3, 2), (2, 5)] {
        assert_eq!(s_n_exact(n, q as u64), BigInt::from(brute_spectrum_free(n, q)), "n={n} q={q}");
    }
    assert_eq!(ferro_core::genericity::count_spectrum_free(2, 4).unwrap(), s_n_exact(2, 4).to_u64().unwrap());
}

#[test]
fn series_agrees() {
    for q in [2, 3] {
        assert!(s_n_series_check(4, q).unwrap());
    }
    assert!(s_n_series_check(9, 2).is_err());
}

fn shaped_space(f: &FerrersDiagram, q: u32) -> (Field, Vec<GfMatrix>) {
    let field = make_field(q, 1).unwrap();
    let units: Vec<GfMatrix> = f
        .dots()
        .map(|d| GfMatrix::from_fn(&field, f.m(), f.n(), |i, j| if (i + 1, j + 1) == (d.row, d.col) { Elem::ONE } else { Elem::ZERO }))
        .collect();
    (field, units)
}

/// `|T̂|/|T|` by listing every `N`-dimensional subspace of shaped matrices.
fn direct_proportion(f: &FerrersDiagram, delta: usize, q: u32) -> (usize, usize) {
    let n_dim = nu_min(f, delta).unwrap();
    let (field, units) = shaped_space(f, q);
    let size = units.len();
    let all = Subspace::full(&field, size);
    let vecs: Vec<Vec<Elem>> = all.vectors().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut good = 0;
    fn grow(cur: Subspace, start: usize, dim: usize, vecs: &[Vec<Elem>], out: &mut Vec<Subspace>) {
        if cur.dim() == dim {
            out.push(cur);
            return;
        }
        for i in start..vecs.len() {
            if !cur.contains(&vecs[i]) {
                grow(cur.with_vector(&vecs[i]), i + 1, dim, vecs, out);
            }
        }
    }
    let mut spaces = Vec::new();
    grow(Subspace::zero(&field, size), 0, n_dim, &vecs, &mut spaces);
    for s in spaces {
        if !seen.insert(s.basis().flatten()) {
            continue;
        }
        let mats: Vec<GfMatrix> = (0..s.dim())
            .map(|r| {
                let mut a = GfMatrix::zeros(&field, f.m(), f.n());
                for (c, u) in s.basis().row(r).iter().zip(&units) {
                    a.add_scaled(*c, u);
                }
                a
            })
            .collect();
        let code = RankMetricCode::new(&field, f.m(), f.n(), mats).unwrap();
        if exact_min_rank(&code, u64::MAX).unwrap().value >= delta {
            good += 1;
        }
    }
    (good, seen.len())
}

#[test]
fn exact_conversion_matches_subspace_count() {
    let mut checked = 0;
    for (d, delta, sampling) in [
        ("1,2@2", 2, Sampling::Uniform),
        ("1,2,2@2", 2, Sampling::Uniform),
        ("2,2@2", 2, Sampling::Uniform),
        ("2,2@2", 2, Sampling::Normalized),
        ("1,2,2@2", 2, Sampling::Normalized),
    ] {
        let f: FerrersDiagram = d.parse().unwrap();
        checked += 1;
        let (good, total) = direct_proportion(&f, delta, 2);
        let r = match proportion_generic(&f, delta, 2, sampling, EstimateMode::Exact) {
            Ok(r) => r,
            Err(_) => {
                assert_eq!(sampling, Sampling::Normalized);
                checked -= 1;
                continue;
            }
        };
        assert!((r.converted - good as f64 / total as f64).abs() < 1e-12, "{d} {sampling:?}: {} vs {good}/{total}", r.converted);
    }
    assert!(checked >= 4);
}

#[test]
fn delta_two_reduces_to_spectrum_free() {
    for (m, q) in [(3usize, 2u32), (2, 3)] {
        let r = mrd_proportion_normalized(m, 2, 2, q, EstimateMode::Sampled { trials: 40_000, seed: 11 }).unwrap();
        let p = s_n_exact(m, q as u64).to_f64().unwrap() / (q as f64).powi((m * m) as i32);
        assert!(r.within_3sigma(p), "{} vs {p}", r.estimate);
        let exact = mrd_proportion_normalized(m, 2, 2, q, EstimateMode::Exact).unwrap();
        assert_eq!(BigInt::from(exact.successes), s_n_exact(m, q as u64));
    }
}

#[test]
fn estimates_are_reproducible_across_threads() {
    let f: FerrersDiagram = "1,3,3,4@4".parse().unwrap();
    let mode = EstimateMode::Sampled { trials: 30_000, seed: 21 };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let a = proportion_generic(&f, 3, 2, Sampling::Normalized, mode).unwrap();
                let b = mrd_proportion_normalized(3, 3, 3, 2, EstimateMode::Sampled { trials: 30_000, seed: 21 }).unwrap();
                (a.successes, b.successes, a.csv_fields(), b.csv_fields())
            })
    };
    let one = run(1);
    assert_eq!(one, run(1));
    assert_eq!(one, run(3));
}
