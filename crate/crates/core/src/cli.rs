//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 bound violation,
//! 3 hypothesis failure. CSV goes to `--output` (or to
//! `$GIBBSBOUND_OUT_DIR/<subcommand>.csv`, or stdout); the human-readable
//! report goes to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{check_hightemp, BoundReport, Estimator, PNorm, TestFunction, Theorem};
use crate::dynamics::{
    check_b_norm, contraction_rho, expected_hamming_after, glauber_step, greedy_coupled_step,
    influence_cap, influence_matrix, influence_sum, mc_coupled_hamming, taylor_influence_bound,
    ChainState, CouplingPair, InfluenceKind,
};
use crate::error::{Error, Result};
use crate::graph::{GraphView, Motif};
use crate::harness::{compute_bound, florentine_demo, verify_bound, Budget, Verdict};
use crate::meanfield::{
    finite_n_fixed_points, ising_fixed_point, solve_fixed_points, FixedPoint, IsingBranch, PhiPoly,
    DEFAULT_GRID, DEFAULT_TOL,
};
use crate::models::{read_model, write_model, ErgmModel, GibbsModel, IsingModel, Model, ProductLaw, MAX_EXACT_DIM};
use crate::stats::substream;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GIBBSBOUND_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gibbsbound", version, about = "Mean-field distance bounds for Gibbs measures")]
struct Cli {
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// CSV destination.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots of the mean-field equation with their stability.
    Fixedpoint(FixedpointArgs),
    /// Evaluate a bound and its hypotheses.
    Bound(BoundArgs),
    /// Run Glauber dynamics and record densities.
    Simulate(SimulateArgs),
    /// Run a greedy coupling from adjacent states.
    Couple(CoupleArgs),
    /// Influence matrix entries and norms.
    Influence(InfluenceArgs),
    /// Compare a bound with an estimated or exact gap.
    Verify(VerifyArgs),
    /// Worked examples.
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
    },
    /// Write a model file template.
    Init(InitArgs),
}

#[derive(Debug, Args)]
struct ModelArg {
    /// Model file (TOML).
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct FixedpointArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_parser = parse_theorem)]
    theorem: Theorem,
    /// edge_density, hom:<motif>, or linear:<csv file>.
    #[arg(long, default_value = "edge_density")]
    test_function: String,
    /// Index of the fixed point to use when several exist.
    #[arg(long)]
    root: Option<usize>,
    #[arg(long, default_value = "1", value_parser = parse_pnorm)]
    pnorm: PNorm,
    /// Monte Carlo size for expectations when enumeration is too large.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    /// Record every this many steps.
    #[arg(long, default_value_t = 100)]
    every: u64,
    /// empty, complete, or er:<a>.
    #[arg(long, default_value = "empty")]
    init: String,
}

#[derive(Debug, Args)]
struct CoupleArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    /// Coordinate on which the two starts differ.
    #[arg(long, default_value_t = 0)]
    site: usize,
    /// empty, complete, or er:<a>.
    #[arg(long, default_value = "empty")]
    init: String,
    /// Instead of one trajectory, estimate the one-step E d_H from this
    /// many random adjacent pairs.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Also report the state-dependent refined influence estimate with the
    /// minimum taken per pair.
    #[arg(long)]
    per_edge: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Exact,
    Analytic,
}

#[derive(Debug, Args)]
struct InfluenceArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "analytic")]
    kind: KindArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_parser = parse_theorem)]
    theorem: Theorem,
    #[arg(long, default_value = "edge_density")]
    test_function: String,
    #[arg(long)]
    root: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 30_000)]
    samples: usize,
    #[arg(long)]
    burn: Option<u64>,
    /// Largest N handled by exact enumeration.
    #[arg(long, default_value_t = 12)]
    exact_limit: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoKind {
    Florentine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Template {
    EdgeOnly,
    Twostar,
    Triangle,
    Florentine,
    IsingComplete,
    IsingCycle,
}

#[derive(Debug, Args)]
struct InitArgs {
    #[arg(value_enum)]
    template: Template,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<f64>,
    /// Ising inverse temperature.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

fn parse_theorem(s: &str) -> std::result::Result<Theorem, String> {
    s.parse::<Theorem>().map_err(|e| e.to_string())
}

fn parse_pnorm(s: &str) -> std::result::Result<PNorm, String> {
    s.parse::<PNorm>().map_err(|e| e.to_string())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) | Error::NoContraction(_) => EXIT_HYPOTHESIS,
        _ => EXIT_USAGE,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fixedpoint(_) => "fixedpoint",
        Command::Bound(_) => "bound",
        Command::Simulate(_) => "simulate",
        Command::Couple(_) => "couple",
        Command::Influence(_) => "influence",
        Command::Verify(_) => "verify",
        Command::Demo { .. } => "demo",
        Command::Init(_) => "init",
    }
}

fn sink(cli: &Cli, ext: &str) -> Result<Box<dyn Write>> {
    let path = match (&cli.output, std::env::var_os(OUT_DIR_ENV)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir)?;
            Some(dir.join(format!("{}.{ext}", command_name(&cli.command))))
        }
        (None, None) => None,
    };
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn csv_writer(cli: &Cli) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(sink(cli, "csv")?))
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Fixedpoint(a) => cmd_fixedpoint(cli, a),
        Command::Bound(a) => cmd_bound(cli, a),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Couple(a) => cmd_couple(cli, a),
        Command::Influence(a) => cmd_influence(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Demo { which: DemoKind::Florentine } => cmd_florentine(cli),
        Command::Init(a) => cmd_init(cli, a),
    }
}

fn ergm_roots(m: &ErgmModel) -> Result<Vec<FixedPoint>> {
    solve_fixed_points(&PhiPoly::from_model(m), DEFAULT_GRID, DEFAULT_TOL)
}

/// The single root, or the one chosen with `--root`.
fn select_root(model: &Model, root: Option<usize>) -> Result<Option<FixedPoint>> {
    let Model::Ergm(m) = model else {
        return Ok(None);
    };
    let roots = ergm_roots(m)?;
    match (roots.len(), root) {
        (0, _) => Err(Error::Domain("φ(a) = a has no root".into())),
        (_, Some(k)) => roots
            .get(k)
            .copied()
            .map(Some)
            .ok_or_else(|| Error::Domain(format!("--root {k} but only {} roots", roots.len()))),
        (1, None) => Ok(Some(roots[0])),
        (k, None) => Err(Error::Domain(format!(
            "φ(a) = a has {k} roots; choose one with --root (see the fixedpoint subcommand)"
        ))),
    }
}

fn parse_test_function(spec: &str, model: &Model) -> Result<TestFunction> {
    let dim = model.dim();
    if spec == "edge_density" {
        return Ok(TestFunction::edge_density(dim));
    }
    if let Some(m) = spec.strip_prefix("hom:") {
        let Model::Ergm(e) = model else {
            return Err(Error::Domain("hom-density test functions need an ERGM".into()));
        };
        return TestFunction::hom_density(m.parse::<Motif>()?, e.n());
    }
    if let Some(path) = spec.strip_prefix("linear:") {
        let text = std::fs::read_to_string(path)?;
        return TestFunction::linear_from_csv(&text, dim);
    }
    Err(Error::Parse(format!(
        "unknown test function {spec:?} (edge_density, hom:<motif>, linear:<file>)"
    )))
}

fn print_report(r: &BoundReport) {
    eprintln!("theorem: {}", r.theorem);
    match r.value {
        Some(v) => eprintln!("bound: {v}"),
        None => eprintln!("bound: not established (formula value {})", r.formula_value),
    }
    eprintln!("convention: {}", r.convention);
    for h in &r.hypotheses {
        let tag = if h.required { "required" } else { "info" };
        let mark = if h.ok { "ok" } else { "FAIL" };
        eprintln!("  [{tag}] {mark:4} {}: {}", h.name, h.detail);
    }
    for (k, v) in &r.constants {
        eprintln!("  {k} = {v}");
    }
}

fn cmd_fixedpoint(cli: &Cli, a: &FixedpointArgs) -> Result<i32> {
    let model = read_model(&a.model.model)?;
    let mut w = csv_writer(cli)?;
    match &model {
        Model::Ergm(m) => {
            let p = PhiPoly::from_model(m);
            let roots = solve_fixed_points(&p, a.grid, a.tol)?;
            w.write_record(["index", "a_star", "phi_prime", "stable", "marginal", "unique"])?;
            for (k, r) in roots.iter().enumerate() {
                w.write_record([
                    k.to_string(),
                    r.a_star.to_string(),
                    r.phi_prime.to_string(),
                    r.stable.to_string(),
                    r.marginal.to_string(),
                    r.unique.to_string(),
                ])?;
            }
            let finite = finite_n_fixed_points(m, a.grid, a.tol)?;
            eprintln!("{} root(s) of φ(a) = a", roots.len());
            eprintln!("roots of the finite-n equation: {finite:?}");
            let ht = check_hightemp(&p, &roots, m.n());
            eprintln!("high-temperature check: {} ({})", if ht.ok { "ok" } else { "no" }, ht.detail);
            if let Some(e) = ht.eps_max {
                eprintln!("largest ε with contraction: {e}");
            }
        }
        Model::Ising(m) => {
            w.write_record(["branch", "site", "p"])?;
            for (name, branch) in [("symmetric", IsingBranch::Symmetric), ("positive", IsingBranch::Positive)] {
                let p = ising_fixed_point(m, a.tol, branch)?;
                for (s, v) in p.iter().enumerate() {
                    w.write_record([name.to_string(), s.to_string(), v.to_string()])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn estimator_for(model: &Model, samples: usize, seed: Option<u64>, theorem: Theorem) -> Result<Estimator> {
    let needs = matches!(theorem, Theorem::Key1 | Theorem::KeyPnorm) && model.dim() > MAX_EXACT_DIM;
    match (needs, seed) {
        (false, _) => Ok(Estimator::Exact),
        (true, Some(seed)) => Ok(Estimator::MonteCarlo { samples, seed }),
        (true, None) => Err(Error::Domain(format!(
            "N = {} is too large to enumerate; pass --seed for Monte Carlo",
            model.dim()
        ))),
    }
}

fn cmd_bound(cli: &Cli, a: &BoundArgs) -> Result<i32> {
    let model = read_model(&a.model.model)?;
    let fp = select_root(&model, a.root)?;
    let h = parse_test_function(&a.test_function, &model)?;
    let est = estimator_for(&model, a.samples, a.seed, a.theorem)?;
    let r = compute_bound(&model, a.theorem, fp.as_ref(), &h, est, a.pnorm)?;
    let mut w = csv_writer(cli)?;
    w.write_record(["theorem", "test_function", "value", "formula_value", "delta_norm", "hypotheses_ok", "a_star"])?;
    w.write_record([
        r.theorem.to_string(),
        h.name(),
        r.value.map_or(String::new(), |v| v.to_string()),
        r.formula_value.to_string(),
        r.delta_norm.map_or(String::new(), |v| v.to_string()),
        r.hypotheses_ok().to_string(),
        fp.map_or(String::new(), |f| f.a_star.to_string()),
    ])?;
    w.flush()?;
    print_report(&r);
    Ok(if r.hypotheses_ok() { EXIT_OK } else { EXIT_HYPOTHESIS })
}

fn initial_state(spec: &str, dim: usize, seed: u64) -> Result<crate::graph::Config> {
    use crate::graph::Config;
    match spec {
        "empty" => Ok(Config::zeros(dim)),
        "complete" => Ok(Config::ones(dim)),
        s => match s.strip_prefix("er:").map(str::parse::<f64>) {
            Some(Ok(p)) => {
                let law = ProductLaw::constant(dim, p)?;
                Ok(law.sample(&mut substream(seed, u64::MAX)))
            }
            _ => Err(Error::Parse(format!("unknown initial state {s:?} (empty, complete, er:<a>)"))),
        },
    }
}

fn density_columns(model: &Model) -> Vec<String> {
    match model {
        Model::Ergm(m) => m.terms()[1..]
            .iter()
            .map(|(h, _)| format!("density_{}", h.label()))
            .collect(),
        Model::Ising(_) => vec!["magnetization".into()],
    }
}

fn densities(model: &Model, x: &crate::graph::Config) -> Vec<f64> {
    match model {
        Model::Ergm(m) => {
            let g = GraphView::new(m.n(), x);
            m.terms()[1..]
                .iter()
                .map(|(h, _)| {
                    crate::graph::injection_count(h, &g).expect("motif fits") as f64
                        / (m.n() as f64).powi(h.v() as i32)
                })
                .collect()
        }
        Model::Ising(_) => vec![2.0 * x.count_ones() as f64 / x.len() as f64 - 1.0],
    }
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<i32> {
    let model = read_model(&a.model.model)?;
    let dim = model.dim();
    let x0 = initial_state(&a.init, dim, a.seed)?;
    let mut st = ChainState::new(x0, a.seed, 0);
    let mut w = csv_writer(cli)?;
    let mut header = vec!["step".to_string(), "edge_density".to_string()];
    header.extend(density_columns(&model));
    w.write_record(&header)?;
    let every = a.every.max(1);
    let row = |st: &ChainState, w: &mut csv::Writer<Box<dyn Write>>| -> Result<()> {
        let mut rec = vec![st.step.to_string(), (st.x.count_ones() as f64 / dim as f64).to_string()];
        rec.extend(densities(&model, &st.x).iter().map(f64::to_string));
        w.write_record(&rec)?;
        Ok(())
    };
    row(&st, &mut w)?;
    while st.step < a.steps {
        glauber_step(&model, &mut st);
        if st.step.is_multiple_of(every) || st.step == a.steps {
            row(&st, &mut w)?;
        }
    }
    w.flush()?;
    eprintln!("{} steps from {} with seed {}", a.steps, a.init, a.seed);
    Ok(EXIT_OK)
}

fn cmd_couple(cli: &Cli, a: &CoupleArgs) -> Result<i32> {
    let model = read_model(&a.model.model)?;
    let dim = model.dim();
    let rho = match &model {
        Model::Ergm(m) => contraction_rho(m, None, None).ok().map(|r| r.rho),
        Model::Ising(m) => Some(crate::dynamics::ising_rho(m)).filter(|r| *r > 0.0),
    };
    let mut w = csv_writer(cli)?;
    if let Some(pairs) = a.pairs {
        let init = match a.init.strip_prefix("er:").map(str::parse::<f64>) {
            Some(Ok(p)) => ProductLaw::constant(dim, p)?,
            _ => ProductLaw::uniform(dim),
        };
        let e = mc_coupled_hamming(&model, &init, pairs, a.reps, a.seed)?;
        w.write_record(["pairs", "reps", "mean_hamming", "se", "one_minus_rho"])?;
        w.write_record([
            pairs.to_string(),
            a.reps.to_string(),
            e.value.to_string(),
            e.se.to_string(),
            rho.map_or(String::new(), |r| (1.0 - r).to_string()),
        ])?;
        w.flush()?;
        if let Some(r) = rho {
            let ok = e.value <= 1.0 - r + 3.0 * e.se;
            eprintln!(
                "one-step E d_H = {} ± {} vs 1 - ρ = {}: {}",
                e.value,
                e.se,
                1.0 - r,
                if ok { "contracts" } else { "EXCEEDS" }
            );
        }
        return Ok(EXIT_OK);
    }
    if a.site >= dim {
        return Err(Error::Domain(format!("--site {} outside 0..{dim}", a.site)));
    }
    let x0 = initial_state(&a.init, dim, a.seed)?;
    let exact = expected_hamming_after(&model, &x0.with(a.site, true), &x0.with(a.site, false));
    eprintln!("exact one-step E d_H from the start: {exact}");
    if let Some(r) = rho {
        eprintln!("1 - ρ = {}", 1.0 - r);
    }
    eprintln!("influence sum at the start: {}", influence_sum(&model, &x0, a.site));
    if let Model::Ergm(m) = &model {
        eprintln!("cap ½|Φ|'(1) = {}", influence_cap(m));
        if a.per_edge {
            eprintln!("per-pair refined estimate: {}", taylor_influence_bound(m, &x0, a.site));
        }
    }
    let mut pair = CouplingPair::adjacent(&x0, a.site, a.seed, 0)?;
    w.write_record(["step", "hamming", "site", "q_u", "q_v", "mismatch"])?;
    w.write_record(["0".to_string(), pair.hamming().to_string(), a.site.to_string(), String::new(), String::new(), String::new()])?;
    while pair.step < a.steps && !pair.coalesced() {
        let up = greedy_coupled_step(&model, &mut pair);
        w.write_record([
            pair.step.to_string(),
            pair.hamming().to_string(),
            up.site.to_string(),
            up.q_u.to_string(),
            up.q_v.to_string(),
            up.mismatch.to_string(),
        ])?;
    }
    w.flush()?;
    if pair.coalesced() {
        eprintln!("coalesced after {} steps", pair.step);
    } else {
        eprintln!("not coalesced after {} steps (d_H = {})", pair.step, pair.hamming());
    }
    Ok(EXIT_OK)
}

fn cmd_influence(cli: &Cli, a: &InfluenceArgs) -> Result<i32> {
    let model = read_model(&a.model.model)?;
    let kind = match a.kind {
        KindArg::Exact => InfluenceKind::Exact,
        KindArg::Analytic => InfluenceKind::AnalyticBound,
    };
    let r = influence_matrix(&model, kind)?;
    let mut w = csv_writer(cli)?;
    w.write_record(["r", "s", "value"])?;
    for i in 0..r.dim() {
        for j in 0..r.dim() {
            w.write_record([i.to_string(), j.to_string(), r.entries[(i, j)].to_string()])?;
        }
    }
    w.flush()?;
    for p in [PNorm::One, PNorm::Two, PNorm::Inf] {
        let c = check_b_norm(&r.entries, p);
        eprintln!(
            "‖R‖_{p} = {}  ‖B‖_{p} = {}  1 - ε/N = {}  {}",
            c.r_norm,
            c.b_norm,
            c.limit,
            if c.holds { "ok" } else { "FAIL" }
        );
    }
    if let Model::Ergm(m) = &model {
        eprintln!("½|Φ|'(1) = {}", influence_cap(m));
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<i32> {
    let model = read_model(&a.model.model)?;
    let fp = select_root(&model, a.root)?;
    let h = parse_test_function(&a.test_function, &model)?;
    let budget = Budget {
        samples: a.samples,
        seed: a.seed,
        exact_limit: a.exact_limit,
        burn: a.burn,
    };
    let run = verify_bound(&model, fp.as_ref(), &h, a.theorem, &budget)?;
    let mut w = csv_writer(cli)?;
    w.write_record([
        "theorem", "test_function", "bound", "e_x", "e_x_se", "e_z", "e_z_se", "gap", "gap_half_width",
        "exact", "verdict",
    ])?;
    w.write_record([
        run.report.theorem.to_string(),
        run.test_function.clone(),
        run.bound.to_string(),
        run.e_x.value.to_string(),
        run.e_x.se.to_string(),
        run.e_z.value.to_string(),
        run.e_z.se.to_string(),
        run.gap.value.to_string(),
        run.gap.half_width().to_string(),
        run.exact_gap.is_some().to_string(),
        run.verdict.name().to_string(),
    ])?;
    w.flush()?;
    print_report(&run.report);
    eprintln!(
        "gap {} (99% half-width {}) vs bound {}: {}",
        run.gap.value,
        run.gap.half_width(),
        run.bound,
        run.verdict.name()
    );
    Ok(match run.verdict {
        Verdict::BoundHolds => EXIT_OK,
        Verdict::Inconclusive => {
            eprintln!("warning: inconclusive at this budget");
            EXIT_OK
        }
        Verdict::BoundViolatedWithinCi => EXIT_VIOLATION,
    })
}

fn cmd_florentine(cli: &Cli) -> Result<i32> {
    let r = florentine_demo()?;
    let mut w = csv_writer(cli)?;
    w.write_record(["quantity", "value"])?;
    let rows: [(&str, String); 9] = [
        ("a_star", format!("{:.6}", r.a_star_rounded)),
        ("displayed_value", format!("{:.7}", r.displayed_value)),
        ("proposition_value", format!("{:.6}", r.proposition_value)),
        ("a_star_unrounded", r.a_star.to_string()),
        ("displayed_value_unrounded_root", r.displayed_value_exact_root.to_string()),
        ("vertices", r.vertices.to_string()),
        ("edges", r.edges.to_string()),
        ("isolated", r.isolated.to_string()),
        ("two_star_injections", r.two_star_injections.to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()])?;
    }
    w.flush()?;
    eprint!("{}", r.summary());
    Ok(EXIT_OK)
}

fn template(a: &InitArgs) -> Result<Model> {
    use crate::harness::{FLORENTINE_BETA1, FLORENTINE_BETA2, FLORENTINE_N};
    Ok(match a.template {
        Template::EdgeOnly => Model::Ergm(ErgmModel::edge_only(a.n.unwrap_or(4), a.beta1.unwrap_or(0.0))?),
        Template::Twostar => Model::Ergm(ErgmModel::two_star(
            a.n.unwrap_or(20),
            a.beta1.unwrap_or(-0.5),
            a.beta2.unwrap_or(0.5),
        )?),
        Template::Triangle => Model::Ergm(ErgmModel::triangle(
            a.n.unwrap_or(10),
            a.beta1.unwrap_or(-1.0),
            a.beta2.unwrap_or(0.05),
        )?),
        Template::Florentine => Model::Ergm(ErgmModel::two_star(
            a.n.unwrap_or(FLORENTINE_N),
            a.beta1.unwrap_or(FLORENTINE_BETA1),
            a.beta2.unwrap_or(FLORENTINE_BETA2),
        )?),
        Template::IsingComplete => Model::Ising(IsingModel::complete(a.n.unwrap_or(6), a.beta.unwrap_or(0.5))?),
        Template::IsingCycle => Model::Ising(IsingModel::cycle(a.n.unwrap_or(6), a.beta.unwrap_or(0.5))?),
    })
}

fn cmd_init(cli: &Cli, a: &InitArgs) -> Result<i32> {
    let model = template(a)?;
    let mut out = sink(cli, "toml")?;
    out.write_all(write_model(&model).as_bytes())?;
    out.flush()?;
    eprintln!("template with N = {} coordinates", model.dim());
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(dispatch(["gibbsbound", "--bogus"]), EXIT_USAGE);
        assert_eq!(dispatch(["gibbsbound", "simulate", "--model", "x.toml"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(dispatch(["gibbsbound", "--help"]), EXIT_OK);
    }

    #[test]
    fn missing_model_file_is_a_config_error() {
        assert_eq!(
            dispatch(["gibbsbound", "fixedpoint", "--model", "/nonexistent/model.toml"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn error_classes_map_to_codes() {
        assert_eq!(exit_code(&Error::Hypothesis("x".into())), EXIT_HYPOTHESIS);
        assert_eq!(exit_code(&Error::NoContraction("x".into())), EXIT_HYPOTHESIS);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
    }
}
