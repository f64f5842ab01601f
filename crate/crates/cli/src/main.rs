use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{debug, info};

use semilin_core::harness::{
    bounds_for_config, run_convergence_study, run_degradation_study, run_selftest, HarnessError, StudyConfig,
    StudyKind,
};
use semilin_core::mesh::{knupp_quality, mesh_stats, read_mesh, SimplexMesh};

const USAGE: u8 = 2;
const FAILURE: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "semilin", version, about = "P1 finite elements for semilinear elliptic problems")]
struct Cli {
    /// Study configuration (JSON); used when a subcommand omits its file argument
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the CSV output path of `run`
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Logs Newton residuals and per-level progress
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Overrides the probe seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a convergence or degradation study
    Run {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
    },
    /// Print statistics and a quality histogram for a mesh file
    MeshInfo { mesh: PathBuf },
    /// Print the a-priori bounds for a configuration
    Bounds {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
    },
    /// Run the built-in oracle checks
    Selftest,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Self {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SEMILIN_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("SEMILIN_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot configure thread pool: {e}")))?;
    debug!("using {threads} worker threads");
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { file } => run(cli, file.as_deref()),
        Command::MeshInfo { mesh } => mesh_info(mesh),
        Command::Bounds { file } => {
            let cfg = load_config(cli, file.as_deref())?;
            print!("{}", bounds_for_config(&cfg)?);
            Ok(())
        }
        Command::Selftest => selftest(),
    }
}

fn load_config(cli: &Cli, positional: Option<&Path>) -> Result<StudyConfig, Failure> {
    let path = positional
        .or(cli.config.as_deref())
        .ok_or_else(|| Failure::usage("a configuration file is required (positional or --config)"))?;
    let mut cfg = StudyConfig::from_file(path)?;
    if let Some(out) = &cli.output {
        cfg.output_path = Some(out.clone());
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.verbose {
        cfg.newton.verbose = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, positional: Option<&Path>) -> Result<(), Failure> {
    let cfg = load_config(cli, positional)?;
    info!("running {:?} study in {}D", cfg.study, cfg.dim);
    let csv = match cfg.study {
        StudyKind::Convergence => run_convergence_study(&cfg)?.table.to_csv(),
        StudyKind::Degradation => run_degradation_study(&cfg)?.to_csv(),
    };
    match &cfg.output_path {
        Some(path) => info!("wrote {}", path.display()),
        None => print!("{csv}"),
    }
    Ok(())
}

fn mesh_info(path: &Path) -> Result<(), Failure> {
    let mesh = read_mesh(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let s = mesh_stats(&mesh);
    println!("dim: {}", mesh.dim());
    println!("n_vertices: {}", s.n_vertices);
    println!("n_cells: {}", s.n_cells);
    println!("n_interior_dofs: {}", s.n_interior_dofs);
    println!("h_max: {}", s.h_max);
    println!("h_min: {}", s.h_min);
    println!("min_angle: {}", s.min_angle_deg);
    println!("max_angle: {}", s.max_angle_deg);
    println!("min_quality: {}", s.min_quality);
    println!("max_quality: {}", s.max_quality);
    println!("quality histogram:");
    for (k, count) in quality_histogram(&mesh, 10).iter().enumerate() {
        println!("  [{:.1}, {:.1}{} {count}", k as f64 / 10.0, (k + 1) as f64 / 10.0, if k == 9 { "]" } else { ")" });
    }
    Ok(())
}

fn quality_histogram(mesh: &SimplexMesh, bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for c in 0..mesh.n_cells() {
        let q = knupp_quality(&mesh.cell_points(c), mesh.dim());
        let k = ((q * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

fn selftest() -> Result<(), Failure> {
    let cases = run_selftest();
    let failed = cases.iter().filter(|c| !c.passed).count();
    for c in &cases {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if failed == 0 {
        println!("{} checks passed", cases.len());
        Ok(())
    } else {
        Err(Failure {
            code: FAILURE,
            message: format!("{failed} of {} self-test checks failed", cases.len()),
        })
    }
}
