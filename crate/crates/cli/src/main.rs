//! `persist-reduce`: command-line front end for persistent feature reduction.
//!
//! Exit codes: 0 ok, 1 I/O, 2 malformed input, 3 reduction conditions
//! violated (report still written), 4 geometric failure (cone not pointed,
//! degenerate polytope, point outside the cone), 5 solver non-convergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use persist_core::experiments::{
    self, exp_bench_reduction, exp_etacv_heatmap, exp_raycount, ExperimentConfig, ExperimentKind,
    KRule, Manifest,
};
use persist_core::geometry::{
    face_report, facet_enumerate, gauge_value, interior_screen, tangent_necessary_check,
    vertex_noncover_check,
};
use persist_core::json::{
    to_json_string, CvResultDoc, ExtremeRaySetDoc, FaceReportDoc, NoncoverDoc, PolytopeDoc,
    ReductionReportDoc, SolveResultDoc,
};
use persist_core::numerics::{read_matrix_csv, read_vector_csv, write_matrix_csv, Rng};
use persist_core::reduction::{persistent_reduce, LossSpec};
use persist_core::solver::{constrained_gauge, kfold_cv, lasso_path, lasso_symmetrized, lqq_support_oracle, nn_lasso_cd};
use persist_core::{extray, Error, Matrix, RaySet, Tolerances, Vector};
use serde_json::json;

const GLMNET_NOTE: &str = "Weights follow the objective ||X b - y||^2 + eta ||b||_1. \
A glmnet lambda (objective (1/2n)||X b - y||^2 + lambda ||b||_1) corresponds to eta = 2 n lambda.";

#[derive(Parser)]
#[command(name = "persist-reduce", version, about = "Persistent feature reduction for sparse regression")]
struct Cli {
    /// Worker threads (default: PERSIST_REDUCE_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the kept column set and check its conditions.
    #[command(after_help = GLMNET_NOTE)]
    Reduce(ReduceArgs),
    /// Identify the extreme rays of the cone spanned by the columns of Z.
    Extray(ExtrayArgs),
    /// Solve a regression problem with a reference solver.
    #[command(after_help = GLMNET_NOTE)]
    Solve(SolveArgs),
    /// K-fold cross-validation over a log-spaced weight grid.
    #[command(after_help = GLMNET_NOTE)]
    Cv(CvArgs),
    /// Polytope and data-condition utilities.
    Geom(GeomArgs),
    /// Run a seeded experiment and write its artifacts.
    Exp(ExpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Ls,
    Mahalanobis,
    Lqq,
    Bregman,
}

#[derive(Args)]
struct ReduceArgs {
    /// Design matrix CSV (n rows, p columns).
    #[arg(long)]
    x: PathBuf,
    /// Response vector CSV (not used by the Mahalanobis loss).
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long, value_enum)]
    loss: LossArg,
    #[arg(long, allow_negative_numbers = true)]
    eta: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Overrides the default gamma of the loss.
    #[arg(long)]
    gamma: Option<f64>,
    /// Mahalanobis quadratic form matrix CSV.
    #[arg(long)]
    a: Option<PathBuf>,
    /// Mahalanobis linear term CSV.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Mahalanobis constant.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtrayArgs {
    /// Rays as the columns of an n x p CSV matrix.
    #[arg(long)]
    z: PathBuf,
    /// Base vector CSV; searched for when absent.
    #[arg(long)]
    g: Option<PathBuf>,
    /// Use the brute-force baseline.
    #[arg(long)]
    brute: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Nnlasso,
    Lasso,
    Constrained,
    Lqq,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Regularization weight (ignored by the constrained method).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, value_enum, default_value = "nnlasso")]
    method: Method,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 100)]
    n_eta: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the full-data path: one row per weight, the weight first.
    #[arg(long)]
    path_csv: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("op").required(true).args(["facets", "face", "noncover", "tangent", "interior", "gauge"])))]
struct GeomArgs {
    /// Facets of conv(V).
    #[arg(long)]
    facets: bool,
    /// Face objects of conv(V) relative to y.
    #[arg(long)]
    face: bool,
    /// Vertex non-cover check of X and y.
    #[arg(long)]
    noncover: bool,
    /// Per-column tangent check of X and y.
    #[arg(long)]
    tangent: bool,
    /// Columns strictly inside the hull of the others and the origin.
    #[arg(long)]
    interior: bool,
    /// Gauge of theta with respect to conv(M).
    #[arg(long)]
    gauge: bool,
    #[arg(long)]
    v: Option<PathBuf>,
    #[arg(long)]
    x: Option<PathBuf>,
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long)]
    m: Option<PathBuf>,
    #[arg(long)]
    theta: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpName {
    Etacv,
    Raycount,
    Bench,
}

#[derive(Args)]
struct ExpArgs {
    #[arg(value_enum)]
    name: ExpName,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Comma-separated, ascending column counts.
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<usize>>,
    /// Noise level; negative for pure-noise responses.
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Fixed number of nonzeros (heatmap) or planted extreme rays (bench).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    n_eta: Option<usize>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => 1,
            Error::ConditionViolated(_) => 3,
            Error::NotPointed
            | Error::DegenerateRay(_)
            | Error::Infeasible
            | Error::DegenerateDimension
            | Error::NotInPos => 4,
            Error::NotConverged | Error::MaxIterations(_) => 5,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type CmdResult = Result<u8, Failure>;

fn matrix(path: &Path) -> Result<Matrix, Failure> {
    read_matrix_csv(path).map_err(|e| Failure::from(e).with_path(path))
}

fn vector(path: &Path) -> Result<Vector, Failure> {
    read_vector_csv(path).map_err(|e| Failure::from(e).with_path(path))
}

impl Failure {
    fn with_path(mut self, path: &Path) -> Self {
        self.msg = format!("{}: {}", path.display(), self.msg);
        self
    }
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref().ok_or_else(|| usage(format!("--{flag} is required")))
}

fn emit<S: serde::Serialize>(out: Option<&Path>, doc: &S) -> Result<(), Failure> {
    let s = to_json_string(doc)?;
    match out {
        Some(p) => std::fs::write(p, s).map_err(|e| Failure::from(Error::from(e)).with_path(p)),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn cmd_reduce(a: &ReduceArgs, tol: &Tolerances) -> CmdResult {
    let x = matrix(&a.x)?;
    let alpha = a.alpha.unwrap_or(1.0);
    let y = || -> Result<Vector, Failure> { vector(need(&a.y, "y")?) };
    let q = || a.q.ok_or_else(|| usage("--q is required for this loss"));
    let mut spec = match a.loss {
        LossArg::Ls => LossSpec::least_squares(y()?, alpha)?,
        LossArg::Lqq => LossSpec::lqq(y()?, q()?, alpha)?,
        LossArg::Bregman => LossSpec::bregman(y()?, q()?, alpha)?,
        LossArg::Mahalanobis => {
            let am = matrix(need(&a.a, "a")?)?;
            let b = vector(need(&a.b, "b")?)?;
            let c = a.c.ok_or_else(|| usage("--c is required for the mahalanobis loss"))?;
            LossSpec::mahalanobis(am, b, c, alpha, tol)?
        }
    };
    if let Some(g) = a.gamma {
        spec = spec.with_gamma(g)?;
    }
    let report = persistent_reduce(&x, &spec, a.eta, tol)?;
    emit(a.out.as_deref(), &ReductionReportDoc::from(&report))?;
    if let Err(e) = report.check() {
        eprintln!("warning: {e}");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_extray(a: &ExtrayArgs, tol: &Tolerances) -> CmdResult {
    let z = matrix(&a.z)?;
    let g = a.g.as_deref().map(vector).transpose()?;
    let set = RaySet::from_columns(&z, g, tol)?;
    let r = if a.brute {
        extray::ext_ray_brute(&set, tol)?
    } else {
        extray::ext_ray_id(&set, tol)?
    };
    emit(a.out.as_deref(), &ExtremeRaySetDoc::from(&r))?;
    Ok(0)
}

fn cmd_solve(a: &SolveArgs, tol: &Tolerances) -> CmdResult {
    let x = matrix(&a.x)?;
    let y = vector(&a.y)?;
    let r = match a.method {
        Method::Nnlasso => nn_lasso_cd(&x, &y, a.eta, None, tol)?,
        Method::Lasso => lasso_symmetrized(&x, &y, a.eta, tol)?,
        Method::Constrained => constrained_gauge(&x, &y, tol)?,
        Method::Lqq => lqq_support_oracle(&x, &y, a.eta, a.q, tol)?,
    };
    emit(a.out.as_deref(), &SolveResultDoc::from(&r))?;
    if !(r.converged && r.kkt_ok) {
        eprintln!("warning: solver did not certify optimality");
        return Ok(5);
    }
    Ok(0)
}

fn cmd_cv(a: &CvArgs, tol: &Tolerances) -> CmdResult {
    let x = matrix(&a.x)?;
    let y = vector(&a.y)?;
    let cv = kfold_cv(&x, &y, a.folds, a.n_eta, &Rng::new(a.seed), tol)?;
    if let Some(path) = &a.path_csv {
        let betas = lasso_path(&x, &y, &cv.eta_grid, tol);
        let rows: Vec<Vec<f64>> = cv
            .eta_grid
            .iter()
            .zip(&betas)
            .map(|(&eta, b)| std::iter::once(eta).chain(b.iter().copied()).collect())
            .collect();
        write_matrix_csv(path, &Matrix::from_rows(&rows)?)?;
    }
    emit(a.out.as_deref(), &CvResultDoc::from(&cv))?;
    Ok(0)
}

fn cmd_geom(a: &GeomArgs, tol: &Tolerances) -> CmdResult {
    let out = a.out.as_deref();
    if a.facets {
        let k = facet_enumerate(&matrix(need(&a.v, "v")?)?, tol)?;
        emit(out, &PolytopeDoc::from(&k))?;
    } else if a.face {
        let k = facet_enumerate(&matrix(need(&a.v, "v")?)?, tol)?;
        let y = vector(need(&a.y, "y")?)?;
        emit(out, &FaceReportDoc::from(&face_report(&k, &y, tol)?))?;
    } else if a.noncover {
        let x = matrix(need(&a.x, "x")?)?;
        let y = vector(need(&a.y, "y")?)?;
        emit(out, &NoncoverDoc::from(&vertex_noncover_check(&x, &y, tol)))?;
    } else if a.tangent {
        let x = matrix(need(&a.x, "x")?)?;
        let y = vector(need(&a.y, "y")?)?;
        emit(out, &json!({ "per_index": tangent_necessary_check(&x, &y, tol) }))?;
    } else if a.interior {
        let x = matrix(need(&a.x, "x")?)?;
        let idx: Vec<usize> = interior_screen(&x, tol).iter().map(|i| i + 1).collect();
        emit(out, &json!({ "interior": idx }))?;
    } else {
        let m = matrix(need(&a.m, "m")?)?;
        let theta = vector(need(&a.theta, "theta")?)?;
        let (value, lambda) = gauge_value(&m, &theta, tol)?;
        emit(out, &json!({ "value": value, "lambda": lambda.to_vec() }))?;
    }
    Ok(0)
}

fn cmd_exp(a: &ExpArgs) -> CmdResult {
    let kind = match a.name {
        ExpName::Etacv => ExperimentKind::EtaCvHeatmap,
        ExpName::Raycount => ExperimentKind::RayCount,
        ExpName::Bench => ExperimentKind::ReductionBench,
    };
    let mut cfg = ExperimentConfig::default_for(kind, a.seed);
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(n) = &a.n_list {
        cfg.n_list = n.clone();
    }
    if let Some(p) = &a.p_list {
        cfg.p_list = p.clone();
    }
    if let Some(s) = a.sigma {
        cfg.sigma = s;
    }
    if let Some(k) = a.k {
        cfg.k_rule = KRule::Fixed(k);
    }
    if let Some(f) = a.folds {
        cfg.folds = f;
    }
    if let Some(m) = a.n_eta {
        cfg.n_eta = m;
    }
    cfg.validate()?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure::from(Error::from(e)).with_path(&a.out_dir))?;
    let dir = &a.out_dir;
    let outputs: Vec<&str> = match kind {
        ExperimentKind::EtaCvHeatmap => {
            let grid = exp_etacv_heatmap(&cfg)?;
            write_text(&dir.join("heatmap.pgm"), &experiments::heatmap_pgm(&grid.fraction))?;
            write_text(&dir.join("heatmap_1se.pgm"), &experiments::heatmap_pgm(&grid.fraction_1se))?;
            experiments::write_fractions_csv(&dir.join("fractions.csv"), &grid)?;
            let lo = *cfg.n_list.iter().min().unwrap_or(&1);
            let hi = *cfg.n_list.iter().max().unwrap_or(&1);
            experiments::reference_lines_csv(&dir.join("reference_lines.csv"), lo, hi)?;
            vec!["heatmap.pgm", "heatmap_1se.pgm", "fractions.csv", "reference_lines.csv"]
        }
        ExperimentKind::RayCount => {
            experiments::write_raycount_csv(&dir.join("raycount.csv"), &exp_raycount(&cfg)?)?;
            vec!["raycount.csv"]
        }
        ExperimentKind::ReductionBench => {
            experiments::write_bench_csv(&dir.join("bench.csv"), &exp_bench_reduction(&cfg)?)?;
            vec!["bench.csv"]
        }
    };
    let manifest = Manifest::new(&cfg, outputs.iter().map(|s| s.to_string()).collect());
    experiments::write_manifest(&dir.join("manifest.json"), &manifest)?;
    Ok(0)
}

fn write_text(path: &Path, s: &str) -> Result<(), Failure> {
    std::fs::write(path, s).map_err(|e| Failure::from(Error::from(e)).with_path(path))
}

fn init_threads(flag: Option<usize>) -> Result<(), Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("PERSIST_REDUCE_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| usage(format!("PERSIST_REDUCE_THREADS: not a count: {v}")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(usage("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    init_threads(cli.threads)?;
    let tol = Tolerances::default();
    match &cli.cmd {
        Cmd::Reduce(a) => cmd_reduce(a, &tol),
        Cmd::Extray(a) => cmd_extray(a, &tol),
        Cmd::Solve(a) => cmd_solve(a, &tol),
        Cmd::Cv(a) => cmd_cv(a, &tol),
        Cmd::Geom(a) => cmd_geom(a, &tol),
        Cmd::Exp(a) => cmd_exp(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
