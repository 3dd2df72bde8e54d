//! `vvp`: convergence studies, adaptive runs, assumption checks and gradient
//! checks for the velocity, vorticity and pressure optimal control solvers.
//!
//! Exit status: 0 on success, 2 on invalid arguments, 1 on solver failure.

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use vvp::adapt::{adaptive_loop, AdaptiveOptions};
use vvp::fem::FeFunction;
use vvp::optctl::{gradient_check, FixedPointOptions};
use vvp::problems::{Problem, ProblemId};
use vvp::scheme::{Discretization, SchemeKind, SchemeParams};
use vvp::study::{check_assumptions, level_mesh, rate_table, run_convergence, write_csv, RunRecord, ERROR_COLUMNS};

use config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "vvp", version, about = "Optimal control of generalized Oseen flow in velocity, vorticity and pressure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform refinement study against the exact solution; writes `<problem>_<scheme>_convergence.csv`.
    Convergence(Opts),
    /// Solve, estimate, mark and refine; writes `<problem>_<scheme>_adaptive.csv`.
    Adaptive(Opts),
    /// Report the margins of the coefficient assumptions.
    Check(Opts),
    /// Compare the reduced gradient with centered finite differences.
    Gradcheck(Opts),
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Problem id: smooth, layer, lshape or tshape.
    #[arg(long)]
    problem: Option<ProblemId>,
    /// Discretization: cg or dg.
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// Polynomial degree: 1 for cg, 0 or 1 for dg.
    #[arg(long)]
    k: Option<usize>,
    /// Number of uniform levels (gradcheck uses the finest).
    #[arg(long)]
    levels: Option<usize>,
    /// Dörfler marking fraction.
    #[arg(long)]
    theta: Option<f64>,
    /// Stop adaptivity once the unknown count exceeds this.
    #[arg(long)]
    max_dofs: Option<usize>,
    #[arg(long)]
    rho1: Option<f64>,
    #[arg(long)]
    rho2: Option<f64>,
    #[arg(long)]
    a11: Option<f64>,
    #[arg(long)]
    c11: Option<f64>,
    #[arg(long)]
    d11: Option<f64>,
    /// Control cost.
    #[arg(long)]
    gamma: Option<f64>,
    /// Fixed-point tolerance on successive controls.
    #[arg(long)]
    tol: Option<f64>,
    /// Maximum fixed-point iterations per solve.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory (default: $VVP_OUT, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the random gradient-check directions.
    #[arg(long)]
    seed: Option<u64>,
    /// Write zero in the `seconds` column so output is reproducible.
    #[arg(long)]
    no_timing: bool,
    /// `key = value` settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
}

impl From<vvp::Error> for Failure {
    fn from(e: vvp::Error) -> Self {
        match e {
            vvp::Error::InvalidArgument(_) | vvp::Error::UnknownDomain(_) | vvp::Error::UnknownProblem(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Solver(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Solver(format!("{}: {e}", path.display()))
}

/// Fully resolved settings.
#[derive(Debug)]
struct Settings {
    problem: Problem,
    params: SchemeParams,
    levels: usize,
    theta: f64,
    max_dofs: usize,
    fixed_point: FixedPointOptions,
    out: PathBuf,
    seed: u64,
    timing: bool,
}

impl Settings {
    fn resolve(opts: &Opts, default_levels: usize) -> Result<Self, Failure> {
        let file = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                ConfigFile::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        macro_rules! pick {
            ($field:ident, $ty:ty) => {
                match opts.$field.clone() {
                    Some(v) => Some(v),
                    None => file.get::<$ty>(stringify!($field)).map_err(Failure::Usage)?,
                }
            };
        }
        let gamma = pick!(gamma, f64).unwrap_or(1.0);
        if !(gamma > 0.0) {
            return Err(Failure::Usage(format!("gamma must be positive, got {gamma}")));
        }
        let problem = Problem::new(pick!(problem, ProblemId).unwrap_or(ProblemId::Smooth), gamma);
        let kind = pick!(scheme, SchemeKind).unwrap_or(SchemeKind::Cg);
        let mut params = SchemeParams::new(kind, &problem);
        let k = pick!(k, usize);
        match kind {
            SchemeKind::Cg if k.is_some_and(|k| k != 1) => {
                return Err(Failure::Usage("the cg scheme is fixed at k = 1".into()));
            }
            SchemeKind::Cg => {}
            SchemeKind::Dg => params.degree = k.unwrap_or(0),
        }
        if let Some(v) = pick!(rho1, f64) {
            params.rho1 = v;
        }
        if let Some(v) = pick!(rho2, f64) {
            params.rho2 = v;
        }
        if let Some(v) = pick!(a11, f64) {
            params.a11 = v;
        }
        if let Some(v) = pick!(c11, f64) {
            params.c11 = v;
        }
        if let Some(v) = pick!(d11, f64) {
            params.d11 = v;
        }
        params.validate()?;
        let mut fixed_point = FixedPointOptions::default();
        if let Some(v) = pick!(tol, f64) {
            fixed_point.tol = v;
        }
        if let Some(v) = pick!(max_iter, usize) {
            fixed_point.max_iter = v;
        }
        let levels = pick!(levels, usize).unwrap_or(default_levels);
        if levels == 0 {
            return Err(Failure::Usage("levels must be at least 1".into()));
        }
        let out = match pick!(out, PathBuf) {
            Some(p) => p,
            None => std::env::var_os("VVP_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
        };
        let no_timing = opts.no_timing || file.get::<bool>("no_timing").map_err(Failure::Usage)?.unwrap_or(false);
        Ok(Settings {
            problem,
            params,
            levels,
            theta: pick!(theta, f64).unwrap_or(0.5),
            max_dofs: pick!(max_dofs, usize).unwrap_or(100_000),
            fixed_point,
            out,
            seed: pick!(seed, u64).unwrap_or(0),
            timing: !no_timing,
        })
    }

    fn output(&self, suffix: &str) -> Result<(PathBuf, BufWriter<File>), Failure> {
        fs::create_dir_all(&self.out).map_err(|e| io_failure(&self.out, e))?;
        let path = self.out.join(format!("{}_{}_{suffix}", self.problem.id, self.params.kind));
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }
}

fn write_records(s: &Settings, suffix: &str, records: &[RunRecord]) -> Result<PathBuf, Failure> {
    let (path, mut w) = s.output(suffix)?;
    write_csv(records, &mut w, s.timing).and_then(|_| w.flush()).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

fn progress(r: &RunRecord) {
    let err = r.errors.map(|e| format!(" total error {:.4e}", e.total())).unwrap_or_default();
    let warn = if r.converged { "" } else { " (fixed point not converged)" };
    eprintln!(
        "level {:>2}: {:>8} unknowns, h = {:.4e}, eta = {:.4e}{err}, {} iterations{warn}",
        r.level, r.dofs_total, r.h, r.estimate.eta_total, r.iterations
    );
}

fn convergence(opts: &Opts) -> Result<(), Failure> {
    let s = Settings::resolve(opts, 4)?;
    let records = run_convergence(&s.problem, &s.params, s.levels, &s.fixed_point, progress)?;
    let path = write_records(&s, "convergence.csv", &records)?;
    if let Some(rates) = rate_table(&records) {
        println!("rates between consecutive levels");
        println!("level  {}", ERROR_COLUMNS.map(|c| format!("{c:>14}")).join(""));
        for (i, row) in rates.iter().enumerate() {
            println!("{:>5}  {}", i + 1, row.map(|r| format!("{r:>14.3}")).join(""));
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn adaptive(opts: &Opts) -> Result<(), Failure> {
    let s = Settings::resolve(opts, 4)?;
    let aopts = AdaptiveOptions { theta: s.theta, max_dofs: s.max_dofs, fixed_point: s.fixed_point, ..Default::default() };
    let steps = adaptive_loop(&s.problem, &s.params, &aopts, |st| progress(&st.record))?;
    let records: Vec<RunRecord> = steps.iter().map(|st| st.record.clone()).collect();
    let path = write_records(&s, "adaptive.csv", &records)?;
    println!("wrote {}", path.display());
    if let Some(last) = steps.last() {
        let (p, mut w) = s.output("adaptive_indicators.csv")?;
        last.indicators.write_heatmap(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(&p, e))?;
        println!("wrote {}", p.display());
        let (p, mut w) = s.output("adaptive_mesh.txt")?;
        last.mesh.write_dump(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(&p, e))?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn check(opts: &Opts) -> Result<(), Failure> {
    let s = Settings::resolve(opts, 1)?;
    let r = check_assumptions(&s.problem, &s.params)?;
    println!("problem {}", s.problem.id);
    println!("nu0                         {:.6e}", r.nu0);
    println!("sigma_min                   {:.6e}", r.sigma_min);
    println!("||grad nu||_inf             {:.6e}", r.grad_nu_inf);
    println!("||div beta||_0              {:.6e}", r.div_beta_l2);
    println!("reaction margin             {:+.6e}", r.reaction_margin);
    println!("divergence margin           {:+.6e}", r.divergence_margin);
    println!("dg coercivity margin        {:+.6e}", r.dg_margin);
    println!("augmentation constants ok   {}", r.augmentation_ok);
    println!("conforming assumptions hold {}", r.ok());
    println!("dg assumptions hold         {}", r.dg_ok());
    if !r.ok() {
        eprintln!("warning: sufficient conditions violated; solves may still succeed");
    }
    Ok(())
}

fn gradcheck(opts: &Opts) -> Result<(), Failure> {
    let s = Settings::resolve(opts, 1)?;
    let mesh = Arc::new(level_mesh(&s.problem, s.levels - 1)?);
    let disc = Discretization::new(&s.problem, &s.params, mesh)?;
    let (a, b) = s.problem.bounds;
    let mut u = FeFunction::zeros(disc.control_space().clone());
    u.coeffs.iter_mut().for_each(|c| *c = 0.5 * (a + b));
    let r = gradient_check(&disc, &u, 1e-4, 5, s.seed)?;
    println!("unknowns {}", disc.dofs_total());
    println!("relative mismatch, discrete adjoint   {:.3e}", r.transposed);
    println!("relative mismatch, consistent adjoint {:.3e}", r.consistent);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Convergence(o) => convergence(o),
        Command::Adaptive(o) => adaptive(o),
        Command::Check(o) => check(o),
        Command::Gradcheck(o) => gradcheck(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("see `vvp --help`");
            ExitCode::from(2)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
