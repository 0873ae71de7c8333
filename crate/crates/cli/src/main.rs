//! `qes`: solve, tabulate, verify, scan and plot quasi-exactly solvable
//! spectra of the H2 and H4 isotonic oscillators.
//!
//! Exit codes:
//! 0 success; 1 usage error; 2 solver failure or missing branch;
//! 3 only complex branches; 4 finite-difference grid too coarse;
//! 5 a comparison or verification threshold failed.

mod config;
mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qes_core::models::ModelSpec;
use qes_core::oracle::{verify_branch, FdGrid, VerifyReport};
use qes_core::spectra::{
    enumerate_levels, normalize, normalized_psi, scan_parameters, Branch, ScanGrid, SpectrumReport, DEFAULT_NORM_RMAX,
};
use qes_core::tables::{compare_table, TableId, TABLE_TOL};
use qes_core::{threads, QesError};
use rayon::prelude::*;
use serde::Serialize;

use config::{Format, ModelArgs, OutputArgs, SolverArgs};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_COMPLEX_ONLY: u8 = 3;
const EXIT_GRID: u8 = 4;
const EXIT_CHECK: u8 = 5;

/// Residual ceiling for the ODE and Schrödinger checks of `verify`.
const RESIDUAL_TOL: f64 = 1e-8;
/// Largest accepted distance between `E` and the nearest FD eigenvalue.
const FD_TOL: f64 = 1e-4;
/// Starts per scan sample unless overridden.
const SCAN_STARTS: usize = 5000;

#[derive(Parser, Debug)]
#[command(name = "qes", version, about = "Quasi-exactly solvable spectra of the H2 and H4 isotonic oscillators")]
struct Cli {
    /// More diagnostics on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate all branches of one model.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute a reference table and compare it entry by entry.
    Table {
        /// table1, table2 or table3.
        which: TableId,
        /// Restrict to these rows.
        #[arg(long = "l", value_delimiter = ',')]
        ell: Vec<i32>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check branches against the ODE, the Schrödinger equation and a
    /// finite-difference spectrum of the reconstructed potential.
    Verify(VerifyArgs),
    /// Count real and complex H4 table-mode branches over a range of gamma.
    Scan(ScanArgs),
    /// Draw the reconstructed potential and normalized wavefunction.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Finite-difference grid points.
    #[arg(long, default_value_t = qes_core::oracle::DEFAULT_N)]
    grid_n: usize,
    /// Outer wall of the finite-difference grid.
    #[arg(long, default_value_t = qes_core::oracle::DEFAULT_R_MAX)]
    r_max: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Verify the branches matched to a reference table instead.
    #[arg(long, conflicts_with = "input")]
    table: Option<TableId>,
    /// Verify the branches of a saved JSON report.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Only this branch (index into the report's branch list).
    #[arg(long)]
    branch: Option<usize>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 1.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = 100.0)]
    gamma_max: f64,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Branch index into the report's branch list.
    #[arg(long, conflicts_with = "nu")]
    branch: Option<usize>,
    /// Real branch with `ν` closest to this value.
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    r_min: f64,
    #[arg(long, default_value_t = 10.0)]
    r_max: f64,
    /// Samples in the CSV sidecar and the curves.
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: m.into() }
    }
}

impl From<QesError> for Failure {
    fn from(e: QesError) -> Self {
        let code = match e {
            QesError::Domain(_) | QesError::NonSquare { .. } | QesError::Parse(_) => EXIT_USAGE,
            _ => EXIT_SOLVER,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_SOLVER, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let verbose = cli.verbose;
    let result = threads::install(move || match cli.command {
        Command::Solve { model, solver, output } => cmd_solve(&model, &solver, &output, verbose),
        Command::Table { which, ell, solver, output } => cmd_table(which, &ell, &solver, &output, verbose),
        Command::Verify(args) => cmd_verify(&args, verbose),
        Command::Scan(args) => cmd_scan(&args, verbose),
        Command::Plot(args) => cmd_plot(&args, verbose),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qes: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn log(verbose: u8, level: u8, msg: impl FnOnce() -> String) {
    if verbose >= level {
        eprintln!("{}", msg());
    }
}

fn cmd_solve(m: &ModelArgs, s: &SolverArgs, o: &OutputArgs, verbose: u8) -> Outcome {
    let (cfg, _) = config::resolve(m, s, o, Format::Json, qes_core::SolverConfig::default().starts).map_err(Failure::usage)?;
    let model = cfg.single().map_err(Failure::usage)?;
    let t = Instant::now();
    let report = enumerate_levels(model, cfg.mode, &cfg.solver)?;
    log(verbose, 1, || {
        format!(
            "{} branches ({} real, {} complex) in {:.2?}; stats {:?}",
            report.branches.len(),
            report.real_count(),
            report.complex_count(),
            t.elapsed(),
            report.stats
        )
    });
    let text = match cfg.format {
        Format::Json => output::json(&report),
        Format::Csv => output::spectrum_csv(&report),
    };
    output::emit(cfg.out.as_deref(), &text)?;
    Ok(if report.branches.is_empty() {
        eprintln!("qes: no solutions found");
        EXIT_SOLVER
    } else if report.real_count() == 0 {
        eprintln!("qes: only complex branches ({})", report.complex_count());
        EXIT_COMPLEX_ONLY
    } else {
        EXIT_OK
    })
}

fn cmd_table(which: TableId, ell: &[i32], s: &SolverArgs, o: &OutputArgs, verbose: u8) -> Outcome {
    let file = config::FileConfig::default();
    let solver = config::solver_config(s, &file, qes_core::SolverConfig::default().starts).map_err(Failure::usage)?;
    let ells: Vec<i32> = if ell.is_empty() { which.ells().collect() } else { ell.to_vec() };
    let t = Instant::now();
    let report = compare_table(which, &ells, &solver)?;
    let text = match o.format.unwrap_or(Format::Csv) {
        Format::Csv => output::table_csv(&report),
        Format::Json => output::json(&report),
    };
    output::emit(o.out.as_deref(), &text)?;
    eprintln!(
        "{which}: {} entries, max |delta| = {:.3e} (tolerance {TABLE_TOL:e}) in {:.2?}",
        report.entries.len(),
        report.max_delta,
        t.elapsed()
    );
    log(verbose, 1, || {
        report
            .entries
            .iter()
            .map(|e| format!("  l={} {}: delta {:?}", e.reference.ell, e.reference.branch, e.delta))
            .collect::<Vec<_>>()
            .join("\n")
    });
    if !report.missing.is_empty() {
        for (l, b) in &report.missing {
            eprintln!("qes: missing branch {b} at l = {l}");
        }
        return Ok(EXIT_SOLVER);
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK })
}

#[derive(Serialize)]
struct VerifiedBranch {
    model: ModelSpec,
    index: usize,
    branch: Branch,
    verification: VerifyReport,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyOutput {
    grid_n: usize,
    r_max: f64,
    branches: Vec<VerifiedBranch>,
}

fn branch_passes(v: &VerifyReport) -> bool {
    v.ode_residual <= RESIDUAL_TOL
        && v.schrodinger_residual.is_some_and(|r| r <= RESIDUAL_TOL)
        && v.fd.is_some_and(|f| f.distance <= FD_TOL)
}

fn verifiable(b: &Branch) -> bool {
    b.is_real() && b.flags.roots_real && b.flags.normalizable
}

/// `(model, index, branch)` triples selected for verification.
fn verify_targets(args: &VerifyArgs) -> Result<Vec<(ModelSpec, usize, Branch)>, Failure> {
    let pick = |model: &ModelSpec, report: &SpectrumReport| -> Result<Vec<(ModelSpec, usize, Branch)>, Failure> {
        match args.branch {
            Some(i) => {
                let b = report
                    .branches
                    .get(i)
                    .ok_or_else(|| Failure::usage(format!("no branch {i}; the report has {}", report.branches.len())))?;
                Ok(vec![(model.clone(), i, b.clone())])
            }
            None => Ok(report
                .branches
                .iter()
                .enumerate()
                .filter(|(_, b)| verifiable(b))
                .map(|(i, b)| (model.clone(), i, b.clone()))
                .collect()),
        }
    };
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)?;
        let report: SpectrumReport =
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad report {}: {e}", path.display())))?;
        return pick(&report.spec, &report);
    }
    if let Some(table) = args.table {
        let file = config::FileConfig::load(args.model.config.as_deref()).map_err(Failure::usage)?;
        let solver = config::solver_config(&args.solver, &file, qes_core::SolverConfig::default().starts)
            .map_err(Failure::usage)?;
        let ells: Vec<i32> = if args.model.ell.is_empty() { table.ells().collect() } else { args.model.ell.clone() };
        let report = compare_table(table, &ells, &solver)?;
        if let Some((l, b)) = report.missing.first() {
            return Err(Failure { code: EXIT_SOLVER, message: format!("missing branch {b} at l = {l}") });
        }
        return Ok(report
            .entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.computed.clone().map(|b| (table.model(e.reference.ell), i, b)))
            .collect());
    }
    let (cfg, _) = config::resolve(&args.model, &args.solver, &args.output, Format::Json, qes_core::SolverConfig::default().starts)
        .map_err(Failure::usage)?;
    let mut out = Vec::new();
    for model in &cfg.models {
        let report = enumerate_levels(model, cfg.mode, &cfg.solver)?;
        out.extend(pick(model, &report)?);
    }
    Ok(out)
}

fn cmd_verify(args: &VerifyArgs, verbose: u8) -> Outcome {
    let targets = verify_targets(args)?;
    if targets.is_empty() {
        return Err(Failure { code: EXIT_SOLVER, message: "no real normalizable branch to verify".into() });
    }
    let t = Instant::now();
    let results: Vec<Result<VerifiedBranch, QesError>> = targets
        .into_par_iter()
        .map(|(model, index, branch)| {
            let grid = FdGrid::for_ell(model.ell(), args.grid.r_max, args.grid.grid_n)?;
            let verification = verify_branch(&model, &branch.params(), &grid)?;
            let passed = branch_passes(&verification);
            Ok(VerifiedBranch { model, index, branch, verification, passed })
        })
        .collect();
    let branches = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    log(verbose, 1, || format!("verified {} branches in {:.2?}", branches.len(), t.elapsed()));
    let out = VerifyOutput { grid_n: args.grid.grid_n, r_max: args.grid.r_max, branches };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&out),
        Format::Csv => verify_csv(&out),
    };
    output::emit(args.output.out.as_deref(), &text)?;

    for b in &out.branches {
        let v = &b.verification;
        log(verbose, 1, || {
            format!(
                "l={} nu={:.6} E={:.6}: ode {:.1e}, schrodinger {:?}, fd {:?}, {}",
                b.model.ell(),
                b.branch.nu,
                b.branch.energy,
                v.ode_residual,
                v.schrodinger_residual,
                v.fd.map(|f| f.distance),
                if b.passed { "pass" } else { "FAIL" }
            )
        });
    }
    let coarse: Vec<&VerifiedBranch> = out.branches.iter().filter(|b| b.verification.fd.is_some_and(|f| !f.converged)).collect();
    if !coarse.is_empty() {
        for b in &coarse {
            let f = b.verification.fd.expect("fd present");
            eprintln!(
                "qes: grid too coarse for l = {} nu = {:.6}: convergence ratio {:.3} (expected near 4); raise --grid-n",
                b.model.ell(),
                b.branch.nu,
                f.ratio
            );
        }
        return Ok(EXIT_GRID);
    }
    let failed = out.branches.iter().filter(|b| !b.passed).count();
    if failed > 0 {
        eprintln!("qes: {failed} of {} branches failed verification", out.branches.len());
        return Ok(EXIT_CHECK);
    }
    Ok(EXIT_OK)
}

fn verify_csv(out: &VerifyOutput) -> String {
    use output::sig10;
    let mut s = String::from(
        "ell,index,nu,E,ode_residual,schrodinger_residual,fd_eigenvalue,fd_distance,fd_ratio,converged,printed_discrepancy,passed\n",
    );
    for b in &out.branches {
        let v = &b.verification;
        let o = |x: Option<f64>| x.map(sig10).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            b.model.ell(),
            b.index,
            sig10(b.branch.nu),
            sig10(b.branch.energy),
            sig10(v.ode_residual),
            o(v.schrodinger_residual),
            o(v.fd.map(|f| f.eigenvalue)),
            o(v.fd.map(|f| f.distance)),
            o(v.fd.map(|f| f.ratio)),
            v.fd.is_some_and(|f| f.converged) as u8,
            o(v.printed_potential_discrepancy),
            b.passed as u8
        ));
    }
    s
}

fn cmd_scan(args: &ScanArgs, verbose: u8) -> Outcome {
    let file = config::FileConfig::load(args.model.config.as_deref()).map_err(Failure::usage)?;
    if matches!(args.model.model.or(file.model), Some(config::ModelId::H2)) {
        return Err(Failure::usage("scan is defined for h4 only"));
    }
    if args.model.omega.is_some() || args.model.gamma.is_some() || args.model.rho.is_some() {
        return Err(Failure::usage("scan sets gamma itself (use --gamma-min/--gamma-max) and solves for rho"));
    }
    let n = args.model.n.or(file.n).ok_or_else(|| Failure::usage("--n is required"))?;
    let ells = if args.model.ell.is_empty() { file.ell.clone().unwrap_or_default() } else { args.model.ell.clone() };
    let ell = match ells.as_slice() {
        [l] => *l,
        _ => return Err(Failure::usage("scan takes a single --l value")),
    };
    let samples = args.samples.or(file.samples).unwrap_or(50);
    let solver = config::solver_config(&args.solver, &file, SCAN_STARTS).map_err(Failure::usage)?;
    let t = Instant::now();
    let grid = scan_parameters(n, ell, (args.gamma_min, args.gamma_max), samples, &solver)?;
    log(verbose, 1, || format!("scan of {samples} samples in {:.2?}", t.elapsed()));
    let text = match args.output.format.or(file.format).unwrap_or(Format::Csv) {
        Format::Csv => output::scan_csv(&grid),
        Format::Json => output::json(&grid),
    };
    output::emit(args.output.out.as_deref().or(file.out.as_deref()), &text)?;
    eprint!("{}", output::scan_counts(&grid));
    for s in grid.samples.iter().filter(|s| s.error.is_some()) {
        eprintln!("qes: gamma = {}: {}", s.gamma, s.error.as_deref().unwrap_or_default());
    }
    Ok(scan_exit(&grid))
}

fn scan_exit(grid: &ScanGrid) -> u8 {
    if grid.solved_fraction() >= 0.9 {
        EXIT_OK
    } else {
        EXIT_SOLVER
    }
}

fn plot_title(model: &ModelSpec, b: &Branch) -> String {
    let couplings = match model {
        ModelSpec::H2(s) => format!("H2  ω = {}", s.omega),
        ModelSpec::H4(s) => format!("H4  γ = {}  ρ = {:.6}", s.gamma, b.rho.unwrap_or(s.rho)),
    };
    format!("{couplings}  n = {}  ℓ = {}  ν = {:.6}  E = {:.6}", model.n(), model.ell(), b.nu, b.energy)
}

fn plot_one(model: &ModelSpec, b: &Branch, args: &PlotArgs, dir: &Path) -> Result<(PathBuf, PathBuf), Failure> {
    let p = b.params();
    let gauge = qes_core::models::Gauge::new(model, &p)?;
    let m = args.points.max(2);
    let r: Vec<f64> = (0..m).map(|i| args.r_min + (args.r_max - args.r_min) * i as f64 / (m - 1) as f64).collect();
    let v: Vec<f64> = r.iter().map(|&x| gauge.reconstructed_potential(x)).collect();
    let (psi, normalized) = match normalize(model, &p, DEFAULT_NORM_RMAX.max(args.r_max), 1e-10) {
        Ok(norm) => (r.iter().map(|&x| normalized_psi(model, &p, &norm, x)).collect::<Result<Vec<_>, _>>()?, true),
        Err(_) => {
            let raw: Vec<f64> = r.iter().map(|&x| gauge.value(x)).collect();
            let peak = raw.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
            (raw.iter().map(|x| x / peak).collect(), false)
        }
    };
    let mut title = plot_title(model, b);
    if !normalized {
        title.push_str("  (Ψ scaled to unit peak)");
    }
    let stem = format!("{}_n{}_l{}_nu{:.5}", model.id(), model.n(), model.ell(), b.nu);
    std::fs::create_dir_all(dir)?;
    let svg_path = dir.join(format!("{stem}.svg"));
    let csv_path = dir.join(format!("{stem}.csv"));
    let series = svg::Series { r, v, psi };
    std::fs::write(&svg_path, svg::render(&series, b.energy, &title))?;
    let mut csv = String::from("r,V,psi\n");
    for i in 0..series.r.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            output::sig10(series.r[i]),
            output::sig10(series.v[i]),
            output::sig10(series.psi[i])
        ));
    }
    std::fs::write(&csv_path, csv)?;
    Ok((svg_path, csv_path))
}

fn cmd_plot(args: &PlotArgs, verbose: u8) -> Outcome {
    if !(args.r_min > 0.0 && args.r_max > args.r_min) {
        return Err(Failure::usage("plot needs 0 < --r-min < --r-max"));
    }
    let no_output = OutputArgs::default();
    let (cfg, _) = config::resolve(&args.model, &args.solver, &no_output, Format::Json, qes_core::SolverConfig::default().starts)
        .map_err(Failure::usage)?;
    for model in &cfg.models {
        let report = enumerate_levels(model, cfg.mode, &cfg.solver)?;
        let chosen: Vec<&Branch> = if let Some(i) = args.branch {
            vec![report.branches.get(i).ok_or_else(|| Failure::usage(format!("no branch {i} at l = {}", model.ell())))?]
        } else if let Some(nu) = args.nu {
            let best = report
                .branches
                .iter()
                .filter(|b| b.is_real())
                .min_by(|a, b| (a.nu - nu).abs().total_cmp(&(b.nu - nu).abs()))
                .ok_or_else(|| Failure { code: EXIT_COMPLEX_ONLY, message: format!("no real branch at l = {}", model.ell()) })?;
            vec![best]
        } else {
            report.branches.iter().filter(|b| b.is_real() && b.flags.roots_real).collect()
        };
        for b in chosen {
            if !(b.is_real() && b.flags.roots_real) {
                return Err(Failure::usage(format!(
                    "branch nu = {}{:+}i, E = {}{:+}i at l = {} is complex and cannot be plotted",
                    b.nu,
                    b.nu_im,
                    b.energy,
                    b.energy_im,
                    model.ell()
                )));
            }
            let (svg_path, csv_path) = plot_one(model, b, args, &args.out)?;
            println!("{}", svg_path.display());
            println!("{}", csv_path.display());
            log(verbose, 1, || format!("plotted l = {} nu = {:.6}", model.ell(), b.nu));
        }
    }
    Ok(EXIT_OK)
}
