//! One classification row per Ferrers diagram of a grid.

use std::collections::BTreeSet;

use ferro_core::construct::{
    construct_companion, construct_ctn, construct_f1334, construct_fn1, construct_mds_diagonal,
    construct_staircase, construct_upper_triangular_recursive, gabidulin, systematic_generator, GabidulinSpec,
};
use ferro_core::ferrers::{
    enumerate_diagrams, mds_constructible, mds_diagonal, not_subfield_realizable,
    nu_profile, reduction_closure, staircase_check,
};
use ferro_core::gf::OrderedBasis;
use ferro_core::{Error, FerrersDiagram, Result};

pub const MAX_DIAGRAMS: u128 = 1_000_000;

pub const HEADER: &str =
    "diagram,proper,nu_min,diagonal_sum,mds_constructible,mds_diagonal,staircase,not_subfield_realizable,constructors,reduction";

#[derive(Clone, Debug)]
pub struct SurveyRow {
    pub diagram: FerrersDiagram,
    pub nu_min: usize,
    pub diagonal_sum: usize,
    pub mds_constructible: bool,
    pub mds_diagonal: Option<(usize, usize)>,
    pub staircase: bool,
    pub not_subfield_realizable: bool,
    pub constructors: Vec<&'static str>,
    pub reduction: &'static str,
}

impl SurveyRow {
    pub fn csv(&self) -> String {
        let diag = self.mds_diagonal.map_or_else(|| "-".to_string(), |(a, s)| format!("D{a}:{s}"));
        let cons = if self.constructors.is_empty() { "-".to_string() } else { self.constructors.join(";") };
        format!(
            "\"{}\",{},{},{},{},{},{},{},{},{}",
            self.diagram,
            self.diagram.is_proper(),
            self.nu_min,
            self.diagonal_sum,
            self.mds_constructible,
            diag,
            self.staircase,
            self.not_subfield_realizable,
            cons,
            self.reduction
        )
    }
}

fn binomial(a: u128, b: u128) -> u128 {
    (0..b).fold(1u128, |acc, i| acc.saturating_mul(a - i) / (i + 1))
}

/// Constructors from the library that produce a maximal code for `(F; δ)` over `F_q`.
fn constructors(f: &FerrersDiagram, delta: usize, q: u32, nu_min: usize) -> Vec<&'static str> {
    let (m, n) = (f.m(), f.n());
    let mut out = Vec::new();
    if nu_min == 0 || delta < 2 {
        return out;
    }
    let hits = |r: Result<usize>| matches!(r, Ok(d) if d == nu_min);
    if f.cols().iter().all(|&c| c == m) && hits(GabidulinSpec::new(q, m, n, delta).and_then(|s| gabidulin(&s)).map(|g| g.code.dim())) {
        out.push("gabidulin");
    }
    if n <= m {
        if let Ok(gen) = GabidulinSpec::new(q, m, n, delta).and_then(|s| systematic_generator(&s)) {
            if hits(construct_fn1(f, delta, &gen, &OrderedBasis::polynomial(gen.field())).map(|c| c.dim())) {
                out.push("fn1");
            }
            if hits(construct_staircase(f, delta, &gen, None).map(|c| c.dim())) {
                out.push("staircase");
            }
        }
    }
    if hits(construct_ctn(f, delta, q).map(|c| c.dim())) {
        out.push("ctn");
    }
    if matches!(construct_mds_diagonal(f, delta, q), Ok(r) if r.maximal) {
        out.push("mds-diagonal");
    }
    if delta == n && n <= m {
        let i = f.c(1);
        let pattern = (1..=n).all(|j| f.c(j) == (i + j - 1).min(m));
        if i >= 1 && m >= n && pattern && hits(construct_companion(q, m, i, m - n).map(|c| c.dim())) {
            out.push("companion");
        }
    }
    if m == n && *f == FerrersDiagram::upper_triangular(n) && delta + 1 == n && hits(construct_upper_triangular_recursive(n, q).map(|c| c.dim())) {
        out.push("ut-recursive");
    }
    if f.to_string() == "1,3,3,4@4" && delta == 3 && hits(construct_f1334(q).map(|c| c.dim())) {
        out.push("f1334");
    }
    out
}

/// Classifies every diagram of the `m × n` grid. Constructors are attempted over
/// `F_q` when `q` is given.
pub fn survey(m: usize, n: usize, delta: usize, q: Option<u32>) -> Result<Vec<SurveyRow>> {
    let count = binomial((m + n) as u128, n as u128);
    if count > MAX_DIAGRAMS {
        return Err(Error::BudgetExceeded { needed: count, budget: MAX_DIAGRAMS as u64 });
    }
    let from_full = reduction_closure(&FerrersDiagram::rectangle(m, n), delta)?;
    let from_ut: BTreeSet<FerrersDiagram> = if m == n {
        reduction_closure(&FerrersDiagram::upper_triangular(n), delta)?
    } else {
        BTreeSet::new()
    };
    enumerate_diagrams(m, n)
        .map(|f| {
            let profile = nu_profile(&f, delta)?;
            let nu_min = profile.nu_min;
            let (mds, diagonal_sum) = mds_constructible(&f, delta)?;
            let diag = mds_diagonal(&f, delta)?;
            let staircase = delta >= 2 && staircase_check(&f, delta)?;
            let nsr = delta >= 2 && not_subfield_realizable(&f, delta)?;
            let reduction = match (from_full.contains(&f), from_ut.contains(&f)) {
                _ if nu_min == 0 => "-",
                (true, true) => "full+triangular",
                (true, false) => "full",
                (false, true) => "triangular",
                (false, false) if f.is_proper() => "ad-hoc only",
                (false, false) => "smaller grid",
            };
            let constructors = q.map_or_else(Vec::new, |q| constructors(&f, delta, q, nu_min));
            Ok(SurveyRow {
                diagram: f,
                nu_min,
                diagonal_sum,
                mds_constructible: mds,
                mds_diagonal: diag,
                staircase,
                not_subfield_realizable: nsr,
                constructors,
                reduction,
            })
        })
        .collect()
}
