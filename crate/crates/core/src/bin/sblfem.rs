use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sblfem::meshing::{build_mesh_1d, build_sbl_mesh_disk};
use sblfem::study::{run_study, write_report, StudyConfig};
use sblfem::verify::{self, Suite};

#[derive(Parser)]
#[command(
    name = "sblfem",
    version,
    about = "rp-FEM convergence studies on spectral boundary layer meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 1D C1 study; writes results.csv, fit.json and plot.gp.
    Study1d(StudyArgs),
    /// 2D mixed study on the disk; writes results.csv, fit.json and plot.gp.
    Study2d(StudyArgs),
    /// Runs a check suite and prints a JSON summary; exits nonzero on failure.
    Verify {
        #[arg(value_enum, default_value = "ALL")]
        suite: Suite,
    },
    /// Writes the SBL mesh for one (eps, p) to <out>/mesh.json.
    DumpMesh(MeshArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// TOML config file; the flags below override its keys.
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    p_min: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    dimension: u8,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    #[arg(long, default_value_t = 4)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.5)]
    rho0: f64,
    #[arg(long, default_value_t = 8)]
    n_sectors: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn load_config(dimension: u8, args: StudyArgs) -> sblfem::Result<StudyConfig> {
    let mut cfg = match &args.config {
        Some(path) => StudyConfig::from_file(path)?,
        None if dimension == 1 => {
            StudyConfig::new_1d("layered", vec![1e-2, 1e-4, 1e-6, 1e-8], 3, 12)
        }
        None => StudyConfig::new_2d("bessel", vec![1e-2, 1e-4, 1e-6], 2, 8),
    };
    if cfg.dimension != dimension {
        return Err(sblfem::Error::Config(format!(
            "config is for dimension {}, subcommand expects {dimension}",
            cfg.dimension
        )));
    }
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = args.p_min {
        cfg.p_min = v;
    }
    if let Some(v) = args.p_max {
        cfg.p_max = v;
    }
    if let Some(v) = args.kappa {
        cfg.kappa = v;
    }
    if let Some(v) = args.problem {
        cfg.problem = v;
    }
    if let Some(v) = args.out {
        cfg.out = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn study(dimension: u8, args: StudyArgs) -> sblfem::Result<()> {
    let cfg = load_config(dimension, args)?;
    let report = run_study(&cfg)?;
    write_report(&report, &cfg.out)?;
    for fit in &report.fits {
        match fit.envelope {
            Some(f) => println!(
                "{:>9}: envelope beta = {:.4}, R^2 = {:.4}",
                fit.norm, f.beta, f.r2
            ),
            None => println!("{:>9}: envelope fit unavailable", fit.norm),
        }
    }
    let failed = report.rows.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        eprintln!("{failed} run(s) failed; see the status column");
    }
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn dump_mesh(args: MeshArgs) -> sblfem::Result<()> {
    let json = if args.dimension == 1 {
        serde_json::to_string_pretty(&build_mesh_1d(args.kappa, args.p, args.eps)?)?
    } else {
        serde_json::to_string_pretty(&build_sbl_mesh_disk(
            args.rho0,
            args.n_sectors,
            args.kappa,
            args.p,
            args.eps,
        )?)?
    };
    std::fs::create_dir_all(&args.out)?;
    let path = Path::new(&args.out).join("mesh.json");
    std::fs::write(&path, json)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study1d(a) => study(1, a),
        Command::Study2d(a) => study(2, a),
        Command::DumpMesh(a) => dump_mesh(a),
        Command::Verify { suite } => {
            let summary = verify::run(suite);
            match serde_json::to_string_pretty(&summary) {
                // a closed pipe is not a failure of the suite
                Ok(s) => {
                    let _ = writeln!(std::io::stdout(), "{s}");
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            }
            return if summary.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
