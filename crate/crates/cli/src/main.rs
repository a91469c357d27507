//! `prg`: generate graphs, certify them and run the numeric experiments.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use prg_core::census::{census_report_with_budget, Budget, CountMode};
use prg_core::certifier::{certify, CertifyConfig, DEFAULT_SAMPLED_TUPLES};
use prg_core::clique::{clique_regime, planted_certification_experiment};
use prg_core::diagnostics::{diag_report, FunctionalMode, GoodSetParams};
use prg_core::ergm::{concentration_experiment, solve_fixed_point, ErgmModel};
use prg_core::generators::{
    default_switches, gen_binary, gen_er, gen_ergm, gen_geometric, gen_regular_switch, plant_clique,
};
use prg_core::geometric::{
    bivariate_tail_mc, dglu_check, gaussian_norm_check, tau_n, threshold_tpd, willink_bounds,
};
use prg_core::io::{read_path, write_path, Format};
use prg_core::{Error, Graph};

use output::{Envelope, OutputFormat};

#[derive(Parser, Debug)]
#[command(name = "prg", version, about = "Pseudo-random graph generation, certification and motif census")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PRG_THREADS")]
    threads: Option<usize>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Generate a graph and write it to a file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check degree and co-degree assumptions and report the admissible motif size.
    Certify(CertifyArgs),
    /// Count induced motifs and compare against G(n, p).
    Census(CensusArgs),
    /// Error functional, recursion bounds and good-vertex fractions.
    Diag(DiagArgs),
    /// Edge-triangle exponential random graph model.
    #[command(subcommand)]
    Ergm(ErgmCommand),
    /// Random geometric graph numerics.
    #[command(subcommand)]
    Geom(GeomCommand),
    /// Clique counts and planted-clique certification.
    #[command(subcommand)]
    Clique(CliqueCommand),
}

#[derive(Args, Debug, Serialize)]
struct GraphOut {
    /// Output graph file; `.prgb` selects the binary format, anything else an edge list.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum GenCommand {
    /// Erdős–Rényi G(n, p).
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Random d-regular graph by double-edge switching.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Switch proposals (default 10·n·d).
        #[arg(long)]
        switches: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Binary graph on odd-weight k-bit vectors.
    Binary {
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Spherical random geometric graph.
    Geom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Edge-triangle ERGM sampled by Glauber dynamics.
    Ergm {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 500)]
        sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Plant a clique into an existing graph.
    Plant {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
}

#[derive(Args, Debug, Serialize)]
struct ReportOut {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CertifyArgs {
    input: PathBuf,
    /// Test against this density instead of the observed one.
    #[arg(long)]
    assume_p: Option<f64>,
    #[arg(long, default_value_t = 3.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    c0_prime: f64,
    #[arg(long, default_value_t = 4)]
    max_order: usize,
    /// Random tuples per order when orders 3 and 4 are sampled.
    #[arg(long, default_value_t = DEFAULT_SAMPLED_TUPLES)]
    tuples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum CensusMode {
    Exact,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
struct CensusArgs {
    input: PathBuf,
    #[arg(long)]
    s: usize,
    /// Reference density (defaults to the observed one).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = CensusMode::Exact)]
    mode: CensusMode,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Work budget for exact counting.
    #[arg(long, default_value_t = Budget::default().0)]
    budget: u128,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum DiagMode {
    Exact,
    Sampled,
    Auto,
}

#[derive(Args, Debug, Serialize)]
struct DiagArgs {
    input: PathBuf,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 4)]
    max_r: usize,
    #[arg(long, default_value_t = 32.0)]
    c_star: f64,
    #[arg(long, default_value_t = 3.0)]
    c_tilde: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Good-set exponent (default C̄₀ ln ln n / ((1−δ) ln n), capped at 1).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = DiagMode::Auto)]
    mode: DiagMode,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum ErgmCommand {
    /// Solve p = φ(p²) and classify the regime.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = prg_core::ergm::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = prg_core::ergm::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Degree and co-degree concentration over sampled replicas.
    Experiment {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        sweeps: usize,
        #[arg(long, default_value_t = 5)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportOut,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum GeomCommand {
    /// Threshold, asymptotic and tail-bound checks.
    Check {
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Dimensions for the threshold and asymptotic checks.
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10000])]
        d: Vec<usize>,
        #[arg(long, default_value_t = 5.0)]
        kappa: f64,
        #[arg(long, default_value_t = 10.0)]
        kappa_p: f64,
        /// Vertex count used for τ_n.
        #[arg(long, default_value_t = 10_000.0)]
        n: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportOut,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum CliqueCommand {
    /// Poisson mean, overlap profile and total-variation bound.
    Regime {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Certify G(n, 1/2) with a planted clique of size ⌈c n^{1/2−ε}⌉.
    Experiment {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 3.0)]
        certify_c: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        seeds: Vec<u64>,
        #[command(flatten)]
        report: ReportOut,
    },
}

/// Failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Format(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 3, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure { code: 2, message: "--threads must be at least 1".into() });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 2, message: e.to_string() })?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) -> CliResult<()> {
    Ok(())
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    read_path(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn write_graph(g: &Graph, path: &Path) -> CliResult<Value> {
    write_path(g, path, Format::from_path(path))?;
    Ok(json!({ "path": path, "n": g.n(), "edges": g.edge_count() }))
}

fn seed_of(command: &Command) -> Option<u64> {
    match command {
        Command::Gen(
            GenCommand::Er { seed, .. }
            | GenCommand::Regular { seed, .. }
            | GenCommand::Geom { seed, .. }
            | GenCommand::Ergm { seed, .. }
            | GenCommand::Plant { seed, .. },
        ) => Some(*seed),
        Command::Certify(a) => Some(a.seed),
        Command::Census(a) => Some(a.seed),
        Command::Diag(a) => Some(a.seed),
        Command::Ergm(ErgmCommand::Experiment { seed, .. }) => Some(*seed),
        Command::Geom(GeomCommand::Check { seed, .. }) => Some(*seed),
        _ => None,
    }
}

fn report_path(command: &Command) -> Option<&Path> {
    let out = match command {
        Command::Gen(_) => return None,
        Command::Certify(a) => &a.report,
        Command::Census(a) => &a.report,
        Command::Diag(a) => &a.report,
        Command::Ergm(ErgmCommand::Solve { report, .. } | ErgmCommand::Experiment { report, .. }) => report,
        Command::Geom(GeomCommand::Check { report, .. }) => report,
        Command::Clique(CliqueCommand::Regime { report, .. } | CliqueCommand::Experiment { report, .. }) => report,
    };
    out.out.as_deref()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

fn run(cli: &Cli) -> CliResult<()> {
    let (name, result, table) = execute(&cli.command)?;
    let envelope = Envelope::new(name, to_value(&cli.command), seed_of(&cli.command), cli.threads, result);
    output::emit(&envelope, cli.format, table, report_path(&cli.command))
}

/// Runs a command, returning its name, result and the key of its main table for CSV.
fn execute(command: &Command) -> CliResult<(&'static str, Value, Option<&'static str>)> {
    Ok(match command {
        Command::Gen(g) => {
            let (name, graph, out) = match g {
                GenCommand::Er { n, p, seed, out } => ("gen er", gen_er(*n, *p, *seed)?, out),
                GenCommand::Regular { n, d, switches, seed, out } => {
                    let s = switches.unwrap_or_else(|| default_switches(*n, *d));
                    ("gen regular", gen_regular_switch(*n, *d, s, *seed)?, out)
                }
                GenCommand::Binary { k, out } => ("gen binary", gen_binary(*k)?, out),
                GenCommand::Geom { n, d, p, seed, out } => ("gen geom", gen_geometric(*n, *d, *p, *seed)?, out),
                GenCommand::Ergm { n, beta, gamma, sweeps, seed, out } => {
                    let m = ErgmModel::new(*beta, *gamma)?;
                    let fp = solve_fixed_point(&m, prg_core::ergm::DEFAULT_GRID, prg_core::ergm::DEFAULT_TOL)?;
                    if fp.regime != prg_core::ergm::Regime::HighTemperature {
                        eprintln!("warning: ({beta}, {gamma}) is not in the high-temperature regime ({:?})", fp.regime);
                    }
                    ("gen ergm", gen_ergm(*n, &m, *sweeps, *seed), out)
                }
                GenCommand::Plant { input, r, seed, out } => {
                    ("gen plant", plant_clique(&read_graph(input)?, *r, *seed)?, out)
                }
            };
            (name, write_graph(&graph, &out.output)?, None)
        }
        Command::Certify(a) => {
            let g = read_graph(&a.input)?;
            let config = CertifyConfig {
                p: a.assume_p,
                c: a.c,
                c0_prime: a.c0_prime,
                sampled_tuples: a.tuples,
                seed: a.seed,
                max_order: a.max_order,
            };
            ("certify", to_value(&certify(&g, &config)?), Some("orders"))
        }
        Command::Census(a) => {
            let g = read_graph(&a.input)?;
            let p = match a.p {
                Some(p) => p,
                None => prg_core::certifier::estimate_p(&g)?,
            };
            let mode = match a.mode {
                CensusMode::Exact => CountMode::Exact,
                CensusMode::Sampled => CountMode::Sampled { samples: a.samples, seed: a.seed },
            };
            let report = census_report_with_budget(&g, p, a.s, mode, Budget(a.budget))?;
            ("census", to_value(&report), Some("classes"))
        }
        Command::Diag(a) => {
            let g = read_graph(&a.input)?;
            let p = match a.p {
                Some(p) => p,
                None => prg_core::certifier::estimate_p(&g)?,
            };
            let params = match a.epsilon {
                Some(eps) => GoodSetParams::new(a.c_tilde, eps, a.delta, p)?,
                None => GoodSetParams::with_default_epsilon(g.n(), a.c_tilde, a.delta, p)?,
            };
            let mode = match a.mode {
                DiagMode::Exact => FunctionalMode::Exact,
                DiagMode::Sampled => FunctionalMode::Sampled { samples: a.samples, seed: a.seed },
                DiagMode::Auto => FunctionalMode::Auto { samples: a.samples, seed: a.seed },
            };
            let report = diag_report(&g, p, a.max_r, a.c_star, &params, mode)?;
            ("diag", to_value(&report), Some("E_n"))
        }
        Command::Ergm(ErgmCommand::Solve { beta, gamma, grid, tol, .. }) => {
            let m = ErgmModel::new(*beta, *gamma)?;
            let fp = solve_fixed_point(&m, *grid, *tol)?;
            let mut v = to_value(&fp);
            v["beta"] = json!(beta);
            v["gamma"] = json!(gamma);
            if let Some((p, slope)) = fp.unique_root() {
                v["p_star"] = json!(p);
                v["slope"] = json!(slope);
            }
            ("ergm solve", v, None)
        }
        Command::Ergm(ErgmCommand::Experiment { beta, gamma, n, sweeps, replicas, seed, .. }) => {
            let m = ErgmModel::new(*beta, *gamma)?;
            let e = concentration_experiment(&m, *n, *sweeps, *replicas, *seed)?;
            if let Some(w) = &e.warning {
                eprintln!("warning: {w}");
            }
            ("ergm experiment", to_value(&e), Some("replicas"))
        }
        Command::Geom(GeomCommand::Check { p, d, kappa, kappa_p, n, samples, seed, .. }) => {
            ("geom check", geom_battery(*p, d, *kappa, *kappa_p, *n, *samples, *seed)?, Some("checks"))
        }
        Command::Clique(CliqueCommand::Regime { n, r, .. }) => {
            ("clique regime", to_value(&clique_regime(*n, *r)?), Some("a_s_log"))
        }
        Command::Clique(CliqueCommand::Experiment { n, epsilon, c, delta, certify_c, seeds, .. }) => {
            let rep = planted_certification_experiment(*n, *epsilon, *c, *delta, *certify_c, seeds)?;
            ("clique experiment", to_value(&rep), Some("runs"))
        }
    })
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    p: f64,
    d: Option<usize>,
    h: Option<f64>,
    rho: Option<f64>,
    value: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    pass: bool,
}

fn geom_battery(p: f64, dims: &[usize], kappa: f64, kappa_p: f64, n: f64, samples: usize, seed: u64) -> CliResult<Value> {
    let mut checks = Vec::new();
    for (i, &d) in dims.iter().enumerate() {
        let t = threshold_tpd(p, d)?;
        let exact = prg_core::geometric::edge_probability(t.t, d)?;
        checks.push(CheckRow {
            check: "threshold",
            p,
            d: Some(d),
            h: None,
            rho: None,
            value: t.t,
            lower: None,
            upper: None,
            pass: (exact - p).abs() < 1e-10,
        });
        match dglu_check(p, d, kappa) {
            Ok(c) => checks.push(CheckRow {
                check: "dglu",
                p,
                d: Some(d),
                h: None,
                rho: None,
                value: c.lhs,
                lower: Some(c.kappa_min),
                upper: Some(c.rhs),
                pass: c.holds,
            }),
            Err(Error::PreconditionFailed { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        let tau = tau_n(n, d as f64, kappa_p)?;
        checks.push(CheckRow { check: "tau_n", p, d: Some(d), h: None, rho: None, value: tau, lower: None, upper: None, pass: true });
        let norm = gaussian_norm_check(d, samples, prg_core::rng::derive_seed(seed, i as u64))?;
        checks.push(CheckRow {
            check: "gaussian_norm",
            p,
            d: Some(d),
            h: None,
            rho: None,
            value: norm.failure_rate,
            lower: None,
            upper: Some(norm.allowed),
            pass: norm.holds,
        });
    }
    let tail_samples = samples.max(1000);
    for (i, h) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        for (j, rho) in [0.0, 0.3, 0.8].into_iter().enumerate() {
            let b = willink_bounds(h, rho)?;
            let mc = bivariate_tail_mc(h, rho, tail_samples, prg_core::rng::derive_seed(seed, 1000 + (3 * i + j) as u64))?;
            let slack = 5.0 * mc.stderr.max(1.0 / tail_samples as f64);
            checks.push(CheckRow {
                check: "willink",
                p,
                d: None,
                h: Some(h),
                rho: Some(rho),
                value: mc.estimate,
                lower: Some(b.lower),
                upper: Some(b.upper),
                pass: b.lower - slack <= mc.estimate && mc.estimate <= b.upper + slack,
            });
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(json!({ "checks": checks, "all_pass": all_pass }))
}
