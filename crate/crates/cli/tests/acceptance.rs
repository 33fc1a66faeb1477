//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Sub-checks listed in `KNOWN_RED` are expected to fail; the run succeeds when
//! every other sub-check passes and every known-red one still fails.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use ferro_cli::survey::survey;
use ferro_core::code::{verify_maximal, DistanceMode};
use ferro_core::construct::{
    construct_companion, construct_f1334, construct_fn1, construct_invariance, construct_mds_diagonal,
    construct_staircase, construct_upper_triangular_explicit, construct_upper_triangular_recursive, gabidulin,
    systematic_generator, GabidulinSpec,
};
use ferro_core::ferrers::{
    delta_n_classification, enumerate_diagrams, mds_constructible, mds_diagonal, nu_min, nu_profile, pending_dots,
    DeltaNCase,
};
use ferro_core::genericity::{
    mrd_proportion_normalized, pi_q, proportion_generic, proportion_m2_mrd, s_n_exact, s_n_series_check,
    upper_bound_f1334, upper_bound_randmrd, EstimateMode, Sampling,
};
use ferro_core::gf::OrderedBasis;
use ferro_core::{FerrersDiagram, RankMetricCode};
use num::{BigInt, BigRational, ToPrimitive};

const KNOWN_RED: &[&str] = &["6a", "6b"];

struct Sub {
    id: &'static str,
    ok: bool,
    detail: String,
}

fn sub(id: &'static str, ok: bool, detail: impl Into<String>) -> Sub {
    Sub { id, ok, detail: detail.into() }
}

fn diagram(s: &str) -> FerrersDiagram {
    s.parse().expect("diagram")
}

fn criterion_1() -> Vec<Sub> {
    let mut out = Vec::new();
    for (d, delta, want) in [
        ("1,3,3,4@4", 3, 4),
        ("2,2,4,4,6,6@6", 4, 8),
        ("2,2,5,5,5@5", 5, 2),
        ("1,2,2,4,7@7", 3, 5),
        ("4,4,6,6@6", 4, 4),
    ] {
        let got = nu_min(&diagram(d), delta).unwrap();
        out.push(sub("1", got == want, format!("[{d}] delta {delta}: nu_min {got}, want {want}")));
    }
    let p = nu_profile(&diagram("2,2,4,4,6,6@6"), 4).unwrap();
    out.push(sub("1", p.nu.iter().all(|&v| v == 8), format!("[2,2,4,4,6,6] nu {:?}", p.nu)));

    let big = diagram("2,4,4,6,8@8");
    let small = diagram("2,4,4,5,5@8");
    let target = nu_min(&big, 3).unwrap();
    let mut cur = big.clone();
    let mut removed = 0;
    while cur != small {
        let next = pending_dots(&cur, 3)
            .unwrap()
            .into_iter()
            .filter(|d| !small.contains(d.row, d.col))
            .find_map(|d| cur.without(d));
        match next {
            Some(g) => {
                cur = g;
                removed += 1;
            }
            None => break,
        }
    }
    let ok = cur == small && removed == 4 && nu_min(&small, 3).unwrap() == target;
    out.push(sub("1", ok, format!("[2,4,4,6,8] -> [{cur}] by {removed} pending dots, nu_min {target}")));
    out
}

fn check_code(name: &str, code: RankMetricCode, shape: FerrersDiagram, delta: usize, dim: usize) -> Sub {
    match verify_maximal(&code, &shape, delta, DistanceMode::exact()) {
        Ok(r) => sub(
            "2",
            r.is_maximal() && r.distance.value == delta && code.dim() == dim,
            format!("{name}: dim {}, d {}, {:?}", code.dim(), r.distance.value, r.verdict),
        ),
        Err(e) => sub("2", false, format!("{name}: {e}")),
    }
}

fn shape_of(code: &RankMetricCode) -> FerrersDiagram {
    code.shape().cloned().unwrap_or_else(|| FerrersDiagram::rectangle(code.m(), code.n()))
}

fn criterion_2() -> Vec<Sub> {
    let mut out = Vec::new();
    for (m, n, delta) in [(3, 3, 2), (4, 2, 2)] {
        let g = gabidulin(&GabidulinSpec::new(2, m, n, delta).unwrap()).unwrap();
        let dim = m * (n - delta + 1);
        out.push(check_code(&format!("gabidulin {m}x{n} d{delta}"), g.code, FerrersDiagram::rectangle(m, n), delta, dim));
    }
    let f = diagram("1,2,3@3");
    let gen = systematic_generator(&GabidulinSpec::new(2, 3, 3, 2).unwrap()).unwrap();
    let c = construct_fn1(&f, 2, &gen, &OrderedBasis::polynomial(gen.field())).unwrap();
    out.push(check_code("fn1 [1,2,3]", c, f, 2, 3));
    let f = diagram("1,2,4,5,6,6@6");
    let gen = systematic_generator(&GabidulinSpec::new(2, 6, 6, 4).unwrap()).unwrap();
    let c = construct_staircase(&f, 4, &gen, None).unwrap();
    out.push(check_code("staircase [1,2,4,5,6,6]", c, f, 4, 7));
    let c = construct_invariance(2, 6, 6, 4, 2).unwrap();
    out.push(check_code("invariance b=2", c, diagram("2,2,4,4,6,6@6"), 4, 8));
    let c = construct_companion(2, 3, 2, 0).unwrap();
    let s = shape_of(&c);
    out.push(check_code("companion m=3 i=2", c, s, 3, 2));
    let f = diagram("1,2,2,4,7@7");
    let c = construct_mds_diagonal(&f, 3, 3).unwrap().code;
    out.push(check_code("mds-diagonal [1,2,2,4,7] q=3", c, f, 3, 5));
    let c = construct_upper_triangular_explicit(4, 2, 1, 1).unwrap();
    out.push(check_code("upper-triangular explicit n=4", c, FerrersDiagram::upper_triangular(4), 3, 3));
    for n in 3..=5 {
        let c = construct_upper_triangular_recursive(n, 2).unwrap();
        out.push(check_code(&format!("upper-triangular recursive n={n}"), c, FerrersDiagram::upper_triangular(n), n - 1, 3));
    }
    for q in [2, 3] {
        let c = construct_f1334(q).unwrap();
        out.push(check_code(&format!("[1,3,3,4] q={q}"), c, diagram("1,3,3,4@4"), 3, 4));
    }
    out
}

/// Arithmetic of F_q for q prime or q = 4, written without the library.
struct SmallField {
    q: usize,
}

impl SmallField {
    fn add(&self, a: usize, b: usize) -> usize {
        if self.q == 4 { a ^ b } else { (a + b) % self.q }
    }

    fn neg(&self, a: usize) -> usize {
        if self.q == 4 { a } else { (self.q - a) % self.q }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if self.q != 4 {
            return a * b % self.q;
        }
        let mut r = 0;
        for i in 0..2 {
            if b >> i & 1 == 1 {
                r ^= a << i;
            }
        }
        if r & 4 != 0 {
            r ^= 0b111;
        }
        r
    }

    fn det(&self, a: &[usize], n: usize) -> usize {
        if n == 1 {
            return a[0];
        }
        let mut acc = 0;
        for c in 0..n {
            let minor: Vec<usize> =
                (1..n).flat_map(|r| (0..n).filter(move |&k| k != c).map(move |k| a[r * n + k])).collect();
            let t = self.mul(a[c], self.det(&minor, n - 1));
            acc = self.add(acc, if c % 2 == 0 { t } else { self.neg(t) });
        }
        acc
    }
}

fn oracle_spectrum_free(n: usize, q: usize) -> u64 {
    let f = SmallField { q };
    let total = q.pow((n * n) as u32);
    (0..total)
        .filter(|&idx| {
            let m: Vec<usize> = (0..n * n).map(|k| idx / q.pow(k as u32) % q).collect();
            (0..q).all(|l| {
                let shifted: Vec<usize> =
                    m.iter().enumerate().map(|(k, &v)| if k % (n + 1) == 0 { f.add(v, f.neg(l)) } else { v }).collect();
                f.det(&shifted, n) != 0
            })
        })
        .count() as u64
}

fn criterion_3() -> Vec<Sub> {
    let mut out = Vec::new();
    for (n, q, expected) in [(1, 2, Some(0)), (1, 3, Some(0)), (2, 2, Some(2)), (2, 3, Some(18)), (2, 4, Some(72)), (3, 2, Some(48))] {
        let oracle = oracle_spectrum_free(n, q);
        let got = s_n_exact(n, q as u64);
        let ok = got == BigInt::from(oracle) && expected.map_or(true, |e| e == oracle);
        out.push(sub("3", ok, format!("s_{n}({q}) = {got}, oracle {oracle}")));
    }
    for q in [2, 3] {
        let ok = s_n_series_check(4, q).unwrap_or(false);
        out.push(sub("3", ok, format!("series check n <= 4, q = {q}")));
    }
    out
}

fn rounds_to(x: &BigRational, printed: &str) -> bool {
    let decimals = printed.split('.').nth(1).map_or(0, str::len);
    let v = x.to_f64().unwrap();
    format!("{v:.decimals$}") == printed
}

fn criterion_4() -> Vec<Sub> {
    let mut out = Vec::new();
    for (q, terms, want) in [(2, 100, 0.0833986), (31, 200, 0.349996)] {
        let v = pi_q(q, terms);
        out.push(sub("4", (v - want).abs() < 1e-6, format!("pi({q}, {terms}) = {v:.7}")));
    }
    for (q, printed) in [(2, "0.008"), (3, "0.0313"), (5, "0.065"), (7, "0.083"), (11, "0.102")] {
        let v = upper_bound_randmrd(4, 3, 3, q).unwrap();
        out.push(sub("4", rounds_to(&v, printed), format!("bound q={q}: {:.6}, printed {printed}", v.to_f64().unwrap())));
    }
    for (q, printed) in [(2, "0.044"), (3, "0.1376")] {
        let v = upper_bound_f1334(q);
        out.push(sub("4", rounds_to(&v, printed), format!("[1,3,3,4] bound q={q}: {:.6}", v.to_f64().unwrap())));
    }
    out
}

fn criterion_5() -> Vec<Sub> {
    let invertible = |a: u8| (a & 1) * (a >> 3 & 1) ^ (a >> 1 & 1) * (a >> 2 & 1) == 1;
    let mut spaces = HashSet::new();
    for a in 1u8..16 {
        for b in 1u8..16 {
            if a != b {
                let mut s = [a, b, a ^ b];
                s.sort_unstable();
                spaces.insert(s);
            }
        }
    }
    let good = spaces.iter().filter(|s| s.iter().all(|&x| invertible(x))).count();
    let exact = proportion_m2_mrd(2, 2);
    let want = BigRational::new(2.into(), 35.into());
    let ok = spaces.len() == 35 && exact == want && BigRational::new(good.into(), spaces.len().into()) == want;
    vec![sub("5", ok, format!("{exact} vs enumeration {good}/{}", spaces.len()))]
}

fn criterion_6() -> Vec<Sub> {
    let mut out = Vec::new();
    for (id, q, want) in [("6a", 3, 0.0000689), ("6b", 5, 0.0001913)] {
        let r = mrd_proportion_normalized(4, 3, 3, q, EstimateMode::Sampled { trials: 10_000_000, seed: 1 }).unwrap();
        out.push(sub(id, r.within_3sigma(want), format!("[4x3;3]_{q}: {r}, reference {want}")));
    }
    let r = proportion_generic(&diagram("1,3,3,4@4"), 3, 2, Sampling::Normalized, EstimateMode::Sampled { trials: 1_000_000, seed: 1 })
        .unwrap();
    out.push(sub("6c", r.within_3sigma(0.00042), format!("[1,3,3,4]_2: {r}")));
    let r = proportion_generic(&diagram("2,2,4,4,6,6@6"), 4, 2, Sampling::Uniform, EstimateMode::Sampled { trials: 1_000_000, seed: 1 })
        .unwrap();
    out.push(sub("6d", r.successes == 0, format!("[2,2,4,4,6,6]_2: {} successes", r.successes)));
    out
}

fn criterion_7() -> Vec<Sub> {
    let r = mrd_proportion_normalized(4, 3, 3, 2, EstimateMode::Exact).unwrap();
    vec![sub("7", (r.estimate - 0.0005357).abs() < 5e-7, format!("exhaustive [4x3;3]_2: {r}"))]
}

fn criterion_8() -> Vec<Sub> {
    let mut bad = Vec::new();
    let mut pairs = 0;
    for m in 1..=6 {
        for n in 1..=6 {
            for f in enumerate_diagrams(m, n) {
                for delta in 1..=n {
                    let nu = nu_min(&f, delta).unwrap();
                    let (mds, sum) = mds_constructible(&f, delta).unwrap();
                    if sum > nu {
                        bad.push(format!("diagonal sum {f} d{delta}"));
                    }
                    if m > 5 || n > 5 {
                        continue;
                    }
                    pairs += 1;
                    let diag = mds_diagonal(&f, delta).unwrap().is_some();
                    let equivalence = if nu == 0 { mds && !diag } else { mds == diag };
                    if !equivalence {
                        bad.push(format!("mds {f} d{delta}"));
                    }
                    for d in f.corners() {
                        let v = nu_min(&f.without(d).unwrap(), delta).unwrap();
                        if v + 1 < nu || v > nu {
                            bad.push(format!("removal {f} d{delta} {d}"));
                        }
                    }
                }
                if n <= m {
                    let r = delta_n_classification(&f).unwrap();
                    if r.case == DeltaNCase::B {
                        let c = f.cols();
                        let c_min = (0..n).map(|t| c[t] as i64 - t as i64).min().unwrap();
                        if r.mds_constructible != (c[0] as i64 == c_min) || !r.consistent {
                            bad.push(format!("delta = n {f}"));
                        }
                    }
                }
            }
        }
    }
    let detail = if bad.is_empty() { format!("{pairs} pairs with m, n <= 5, delta = n classes up to 6") } else { bad[..bad.len().min(5)].join("; ") };
    vec![sub("8", bad.is_empty(), detail)]
}

fn closure(root: FerrersDiagram, delta: usize) -> BTreeSet<FerrersDiagram> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![root];
    while let Some(f) = stack.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        let nu = nu_min(&f, delta).unwrap();
        for d in f.corners() {
            let g = f.without(d).unwrap();
            if nu_min(&g, delta).unwrap() + 1 == nu {
                stack.push(g);
            }
        }
    }
    seen
}

fn criterion_9() -> Vec<Sub> {
    let rows = survey(4, 4, 3, None).unwrap();
    let full = closure(FerrersDiagram::rectangle(4, 4), 3);
    let tri = closure(FerrersDiagram::upper_triangular(4), 3);
    let mut leftover = Vec::new();
    let mut mismatched = Vec::new();
    for r in &rows {
        let expect = match (full.contains(&r.diagram), tri.contains(&r.diagram)) {
            _ if r.nu_min == 0 => "-",
            (true, true) => "full+triangular",
            (true, false) => "full",
            (false, true) => "triangular",
            (false, false) if r.diagram.is_proper() => "ad-hoc only",
            (false, false) => "smaller grid",
        };
        if expect != r.reduction {
            mismatched.push(r.diagram.to_string());
        }
        if expect == "ad-hoc only" {
            leftover.push(r.diagram.to_string());
        }
    }
    let ok = rows.len() == 70 && mismatched.is_empty() && leftover == ["1,3,3,4@4"];
    vec![sub("9", ok, format!("{} diagrams, leftover {leftover:?}, mismatched {mismatched:?}", rows.len()))]
}

fn main() {
    let criteria: [(&str, fn() -> Vec<Sub>); 9] = [
        ("bounds", criterion_1),
        ("constructions", criterion_2),
        ("spectrum-free counts", criterion_3),
        ("tables", criterion_4),
        ("exact small proportion", criterion_5),
        ("Monte-Carlo", criterion_6),
        ("exhaustive q=2", criterion_7),
        ("combinatorial equivalences", criterion_8),
        ("survey", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let subs = run();
        let elapsed = start.elapsed().as_secs_f64();
        let pass = subs.iter().all(|s| s.ok);
        println!("{} criterion {} ({name}) [{elapsed:.1}s]", if pass { "PASS" } else { "FAIL" }, k + 1);
        for s in &subs {
            let known = KNOWN_RED.contains(&s.id);
            let tag = match (s.ok, known) {
                (true, false) => "ok",
                (false, true) => "known red",
                _ => "UNEXPECTED",
            };
            println!("    [{tag}] {}", s.detail);
            if s.ok == known {
                unexpected.push(s.detail.clone());
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
