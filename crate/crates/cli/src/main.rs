use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational, ToPrimitive};

use ferro_cli::codefile::{self, CodeFile};
use ferro_cli::survey;
use ferro_core::code::{lift_pivots, lift_to_rref, verify_maximal};
use ferro_core::construct::{
    construct_companion, construct_ctn, construct_f1334, construct_fn1, construct_invariance, construct_mds_diagonal,
    construct_staircase, construct_upper_triangular_explicit, construct_upper_triangular_recursive, gabidulin,
    systematic_generator, GabidulinSpec,
};
use ferro_core::ferrers::{
    delta_n_classification, mds_constructible, mds_diagonal, not_subfield_realizable, nu_profile, pending_dots,
    staircase_check, staircase_epsilon,
};
use ferro_core::genericity::{
    count_spectrum_free, derangement_limit, genericity_limit_scan, mrd_proportion_normalized, pi_q, pi_q_exact,
    proportion_generic, s_n_exact, upper_bound_f1334, upper_bound_randmrd, EstimateMode, Sampling, CSV_HEADER_TAIL,
};
use ferro_core::gf::OrderedBasis;
use ferro_core::{DistanceMode, Error, FerrersDiagram, GfMatrix, RankMetricCode, Verdict};

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Ferrers-diagram rank-metric codes: bounds, constructions, verification and proportions.
#[derive(Parser)]
#[command(name = "ferro", version)]
struct Cli {
    /// Worker threads for parallel enumeration and trial loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print ν_0, …, ν_{δ−1} and ν_min.
    Bound {
        /// Diagram as `c1,c2,…,cn@m`.
        diagram: FerrersDiagram,
        #[arg(long)]
        delta: usize,
    },
    /// Pending dots, MDS-constructibility, staircase and realizability predicates.
    Analyze {
        diagram: FerrersDiagram,
        #[arg(long)]
        delta: usize,
    },
    /// Build a code and write it in the RMC text format.
    Construct(ConstructArgs),
    /// Check that a code file holds a maximal code.
    Verify {
        file: PathBuf,
        /// Overrides the declared shape.
        #[arg(long)]
        shape: Option<FerrersDiagram>,
        /// Overrides the declared distance.
        #[arg(long)]
        delta: Option<usize>,
        /// `exact` or `sampled:<samples>:<seed>`.
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Print the lifted generator matrices in reduced row echelon form.
    Lift {
        file: PathBuf,
        #[arg(long)]
        shape: Option<FerrersDiagram>,
    },
    /// CSV classification of every diagram in an m × n grid.
    Survey {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        /// Attempt the library constructors over F_q.
        #[arg(long)]
        q: Option<u32>,
    },
    /// Proportion of maximal codes among random shaped codes.
    #[command(subcommand)]
    Proportion(ProportionCmd),
    /// Exact counts.
    #[command(subcommand)]
    Count(CountCmd),
    /// Limits and closed-form bounds as q grows.
    Limits(LimitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Gabidulin,
    Fn1,
    Staircase,
    Ctn,
    Invariance,
    Companion,
    MdsDiagonal,
    UtExplicit,
    UtRecursive,
    F1334,
}

#[derive(Args)]
struct ConstructArgs {
    method: Method,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<usize>,
    /// Diagram for fn1, staircase, ctn and mds-diagonal.
    #[arg(long)]
    diagram: Option<FerrersDiagram>,
    /// Subfield degree for invariance.
    #[arg(long)]
    b: Option<usize>,
    /// Number of companion powers.
    #[arg(long)]
    i: Option<usize>,
    /// Deleted columns for companion.
    #[arg(long, default_value_t = 0)]
    t: usize,
    /// Constant term of x² − dx − c for ut-explicit.
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate every tuple instead of sampling.
    #[arg(long)]
    exhaustive: bool,
}

impl TrialArgs {
    fn mode(&self) -> EstimateMode {
        if self.exhaustive {
            EstimateMode::Exact
        } else {
            EstimateMode::Sampled { trials: self.trials, seed: self.seed }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Uniform,
    Normalized,
}

#[derive(Subcommand)]
enum ProportionCmd {
    /// Spectrum-free tuples giving [m×n;n]-MRD codes in normal form.
    Mrd {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// ν_min random matrices of shape F spanning a maximal code.
    Generic {
        diagram: FerrersDiagram,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "uniform")]
        sampling: SamplingArg,
        #[command(flatten)]
        trials: TrialArgs,
    },
}

#[derive(Subcommand)]
enum CountCmd {
    /// n × n matrices over F_q without eigenvalues in F_q.
    SpectrumFree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        /// Evaluate the closed formula instead of enumerating.
        #[arg(long)]
        formula: bool,
    },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    q: u32,
    /// Factors in the partial product for π(q).
    #[arg(long, default_value_t = 100)]
    terms: usize,
    /// Print the exact partial product as well.
    #[arg(long)]
    exact: bool,
    /// Also estimate P_{q^r} for this diagram, r = 1..=r-max.
    #[arg(long)]
    diagram: Option<FerrersDiagram>,
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long, default_value_t = 3)]
    r_max: u32,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAIL } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    }
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::BudgetExceeded { .. })));
            ExitCode::from(if budget { EXIT_BUDGET } else { EXIT_FAIL })
        }
    }
}

fn run(cmd: Cmd) -> anyhow::Result<u8> {
    match cmd {
        Cmd::Bound { diagram, delta } => bound(&diagram, delta),
        Cmd::Analyze { diagram, delta } => analyze(&diagram, delta),
        Cmd::Construct(args) => construct(args),
        Cmd::Verify { file, shape, delta, mode } => verify(&file, shape, delta, &mode),
        Cmd::Lift { file, shape } => lift(&file, shape),
        Cmd::Survey { m, n, delta, q } => {
            println!("{}", survey::HEADER);
            for row in survey::survey(m, n, delta, q)? {
                println!("{}", row.csv());
            }
            Ok(0)
        }
        Cmd::Proportion(p) => proportion(p),
        Cmd::Count(CountCmd::SpectrumFree { n, q, formula }) => {
            let v = if formula { s_n_exact(n, q as u64).to_string() } else { count_spectrum_free(n, q)?.to_string() };
            println!("{v}");
            Ok(0)
        }
        Cmd::Limits(args) => limits(args),
    }
}

fn bound(f: &FerrersDiagram, delta: usize) -> anyhow::Result<u8> {
    let p = nu_profile(f, delta)?;
    println!("diagram: {f}");
    println!("delta: {delta}");
    for (j, v) in p.nu.iter().enumerate() {
        println!("nu_{j}: {v}");
    }
    println!("nu_min: {}", p.nu_min);
    Ok(0)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(f: &FerrersDiagram, delta: usize) -> anyhow::Result<u8> {
    let p = nu_profile(f, delta)?;
    println!("diagram: {f}");
    println!("nu_min: {}", p.nu_min);
    if p.nu_min == 0 {
        println!("all predicates vacuous");
        return Ok(0);
    }
    let argmin: Vec<String> = p.argmin.iter().map(|j| j.to_string()).collect();
    println!("attained at j: {}", argmin.join(","));
    let pend: Vec<String> = pending_dots(f, delta)?.iter().map(|d| d.to_string()).collect();
    println!("pending dots: {}", if pend.is_empty() { "none".into() } else { pend.join(" ") });
    let (mds, sum) = mds_constructible(f, delta)?;
    println!("diagonal sum: {sum}");
    println!("MDS-constructible: {}", yes(mds));
    match mds_diagonal(f, delta)? {
        Some((a, s)) => println!("MDS diagonal: D_{s} for alpha = {a}"),
        None => println!("MDS diagonal: none"),
    }
    if delta >= 2 {
        println!("staircase epsilon: {}", staircase_epsilon(f, delta));
        println!("staircase condition: {}", yes(staircase_check(f, delta)?));
        println!("not subfield-realizable: {}", yes(not_subfield_realizable(f, delta)?));
    }
    if delta == f.n() && f.n() <= f.m() {
        let r = delta_n_classification(f)?;
        println!("delta = n case: {:?}", r.case);
        println!("maximal over the algebraic closure: {}", yes(r.closure_maximal));
        for (name, v) in &r.conditions {
            println!("  {name}: {}", yes(*v));
        }
    }
    Ok(0)
}

fn need<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("--{flag} is required for this method"))
}

fn build(a: &ConstructArgs) -> anyhow::Result<RankMetricCode> {
    let q = a.q;
    let code = match a.method {
        Method::Gabidulin => {
            let spec = GabidulinSpec::new(q, need(a.m, "m")?, need(a.n, "n")?, need(a.delta, "delta")?)?;
            gabidulin(&spec)?.code
        }
        Method::Fn1 | Method::Staircase => {
            let f = need(a.diagram.clone(), "diagram")?;
            let delta = need(a.delta, "delta")?;
            let gen = systematic_generator(&GabidulinSpec::new(q, f.m(), f.n(), delta)?)?;
            if matches!(a.method, Method::Fn1) {
                construct_fn1(&f, delta, &gen, &OrderedBasis::polynomial(gen.field()))?
            } else {
                construct_staircase(&f, delta, &gen, None)?
            }
        }
        Method::Ctn => construct_ctn(&need(a.diagram.clone(), "diagram")?, need(a.delta, "delta")?, q)?,
        Method::Invariance => {
            construct_invariance(q, need(a.m, "m")?, need(a.n, "n")?, need(a.delta, "delta")?, need(a.b, "b")?)?
        }
        Method::Companion => construct_companion(q, need(a.m, "m")?, need(a.i, "i")?, a.t)?,
        Method::MdsDiagonal => {
            let r = construct_mds_diagonal(&need(a.diagram.clone(), "diagram")?, need(a.delta, "delta")?, q)?;
            if !r.maximal {
                eprintln!("note: diagonal sum {} is below nu_min", r.diagonal_sum);
            }
            r.code
        }
        Method::UtExplicit => construct_upper_triangular_explicit(need(a.n, "n")?, q, need(a.c, "c")?, need(a.d, "d")?)?,
        Method::UtRecursive => construct_upper_triangular_recursive(need(a.n, "n")?, q)?,
        Method::F1334 => construct_f1334(q)?,
    };
    Ok(code)
}

fn construct(a: ConstructArgs) -> anyhow::Result<u8> {
    let code = build(&a)?;
    let text = codefile::serialize(&code);
    let mut status = 0;
    let summary = if a.no_verify {
        format!("dimension: {}", code.dim())
    } else {
        let shape = code.shape().cloned().unwrap_or_else(|| FerrersDiagram::rectangle(code.m(), code.n()));
        let delta = code.delta().context("constructed code has no declared distance")?;
        let report = verify_maximal(&code, &shape, delta, DistanceMode::exact())?;
        if !report.is_maximal() {
            status = EXIT_FAIL;
        }
        report.to_string()
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(status)
}

fn load(path: &PathBuf) -> anyhow::Result<CodeFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(codefile::parse(&text)?)
}

fn parse_mode(s: &str) -> anyhow::Result<DistanceMode> {
    if s == "exact" {
        return Ok(DistanceMode::exact());
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["sampled", n, seed] => Ok(DistanceMode::Sampled {
            samples: n.parse().context("sample count")?,
            seed: seed.parse().context("seed")?,
        }),
        _ => bail!("mode must be `exact` or `sampled:<samples>:<seed>`, got `{s}`"),
    }
}

fn verify(path: &PathBuf, shape: Option<FerrersDiagram>, delta: Option<usize>, mode: &str) -> anyhow::Result<u8> {
    let file = load(path)?;
    let code = &file.code;
    let shape = shape
        .or(file.shape.clone())
        .unwrap_or_else(|| FerrersDiagram::rectangle(code.m(), code.n()));
    let delta = delta.or(file.delta).context("no distance declared; pass --delta")?;
    let report = verify_maximal(code, &shape, delta, parse_mode(mode)?)?;
    println!("shape: {shape}");
    println!("{report}");
    Ok(match report.verdict {
        Verdict::Maximal => 0,
        Verdict::NotMaximal => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn print_matrix(a: &GfMatrix) {
    for r in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|c| a.get(r, c).0.to_string()).collect();
        println!("{}", row.join(" "));
    }
}

fn lift(path: &PathBuf, shape: Option<FerrersDiagram>) -> anyhow::Result<u8> {
    let file = load(path)?;
    let shape = shape.or(file.shape.clone()).context("lifting needs a shape; pass --shape")?;
    let pivots: Vec<String> = lift_pivots(&shape).iter().map(|p| p.to_string()).collect();
    println!("pivots: {}", pivots.join(","));
    for (i, g) in lift_to_rref(&file.code, &shape)?.iter().enumerate() {
        println!();
        println!("lift {i}");
        print_matrix(g);
    }
    Ok(0)
}

fn proportion(p: ProportionCmd) -> anyhow::Result<u8> {
    let (params, header, report) = match p {
        ProportionCmd::Mrd { m, n, delta, q, trials } => {
            let r = mrd_proportion_normalized(m, n, delta, q, trials.mode())?;
            (format!("{m},{n},{delta},{q}"), "m,n,delta,q", r)
        }
        ProportionCmd::Generic { diagram, delta, q, sampling, trials } => {
            let s = match sampling {
                SamplingArg::Uniform => Sampling::Uniform,
                SamplingArg::Normalized => Sampling::Normalized,
            };
            let r = proportion_generic(&diagram, delta, q, s, trials.mode())?;
            (format!("\"{diagram}\",{delta},{q}"), "diagram,delta,q", r)
        }
    };
    println!("{header},{CSV_HEADER_TAIL}");
    println!("{params},{}", report.csv_fields());
    eprintln!("proportion among all codes of this dimension: {:.6e}", report.converted);
    Ok(0)
}

fn limits(a: LimitArgs) -> anyhow::Result<u8> {
    let q = a.q as u64;
    println!("pi({q}) ~ {:.7}", pi_q(q, a.terms));
    if a.exact {
        println!("partial product over {} terms: {}", a.terms, pi_q_exact(q, a.terms));
    }
    println!("s_n(q)/q^(n^2) vs sum_(j<=n) (-1)^j/j!:");
    for n in 1..=6usize {
        let s = num_ratio(s_n_exact(n, q), q, n * n);
        println!("  n={n}: {s:.7} vs {:.7}", ratio_f64(&derangement_limit(n)));
    }
    println!("upper bound for [4x3;3]-MRD: {:.4}", ratio_f64(&upper_bound_randmrd(4, 3, 3, q)?));
    println!("upper bound for [1,3,3,4;3]: {:.4}", ratio_f64(&upper_bound_f1334(q)));
    if let Some(f) = a.diagram {
        let delta = need(a.delta, "delta")?;
        println!("q,{CSV_HEADER_TAIL}");
        for row in genericity_limit_scan(&f, delta, a.q, a.r_max, a.trials, a.seed)? {
            println!("{},{}", row.q, row.report.csv_fields());
        }
    }
    Ok(0)
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn num_ratio(s: BigInt, q: u64, e: usize) -> f64 {
    ratio_f64(&BigRational::new(s, num::pow(BigInt::from(q), e)))
}
