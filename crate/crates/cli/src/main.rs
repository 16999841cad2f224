use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use epitaxy_cli::{
    emit_plotdata, emit_timeseries, exit, exit_code, parse_config, write_verdict, ConfigError,
};
use epitaxy_core::dynamics::Checkpoint;
use epitaxy_core::experiments::Report;
use epitaxy_core::semigroup::{kernel_l1_constant, kernel_second_derivative_l1};
use epitaxy_core::Error;

#[derive(Parser)]
#[command(name = "epitaxy", version, about = "Gradient-bound experiments for thin-film epitaxy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides `out_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent sub-runs (overrides `workers` in the config).
        #[arg(long)]
        workers: Option<usize>,
        /// Continue the main evolution from a checkpoint file.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Print the kernel constants for one (gamma, dimension) pair.
    Constants {
        #[arg(long, default_value_t = 4.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Run {
            config,
            out,
            workers,
            resume,
        } => run(&config, out, workers, resume.as_deref()),
        Command::Constants { gamma, dim } => constants(gamma, dim),
        Command::Validate { config } => match parse_config(&config) {
            Ok(c) => {
                println!("{}: ok ({})", config.display(), c.experiment.name());
                exit::CONFIRMED
            }
            Err(e) => {
                eprintln!("invalid config: {e}");
                exit::INVALID_CONFIG
            }
        },
    };
    ExitCode::from(code as u8)
}

fn fail(e: Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } => {
            eprintln!("invalid config: {}", ConfigError::from(e));
            exit::INVALID_CONFIG
        }
        other => {
            eprintln!("error: {other}");
            exit::COMPUTE_ERROR
        }
    }
}

fn run(config: &Path, out: Option<PathBuf>, workers: Option<usize>, resume: Option<&Path>) -> i32 {
    let cfg = match parse_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid config: {e}");
            return exit::INVALID_CONFIG;
        }
    };
    let out = out.or(cfg.out_dir).unwrap_or_else(|| PathBuf::from("out"));
    let workers = workers.or(cfg.workers).unwrap_or(1).max(1);
    let start = Instant::now();
    let report = match resume {
        Some(path) => {
            let snapshot = match fs::read(path) {
                Ok(bytes) => Checkpoint::from_bytes(&bytes),
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return exit::INVALID_CONFIG;
                }
            };
            snapshot.and_then(|c| cfg.experiment.resume(&c))
        }
        None => cfg.experiment.run(workers),
    };
    let mut report = match report {
        Ok(r) => r,
        Err(e @ Error::Checkpoint(_)) => {
            eprintln!("bad checkpoint: {e}");
            return exit::INVALID_CONFIG;
        }
        Err(e) => return fail(e),
    };
    if cfg.timing {
        report.verdict.runtime_s = Some(start.elapsed().as_secs_f64());
    }
    if let Err(e) = write_outputs(&report, &out) {
        eprintln!("error writing {}: {e}", out.display());
        return exit::COMPUTE_ERROR;
    }
    let v = &report.verdict;
    match &v.reason {
        Some(r) => println!("{}: {} ({r})", v.experiment, v.outcome),
        None => println!("{}: {}", v.experiment, v.outcome),
    }
    exit_code(v.outcome)
}

fn write_outputs(report: &Report, out: &Path) -> std::io::Result<()> {
    fs::create_dir_all(out)?;
    write_verdict(&report.verdict, &out.join("verdict.json"))?;
    if let Some(traj) = &report.trajectory {
        emit_timeseries(traj, &out.join("timeseries.csv"))?;
        let snapshot = Checkpoint {
            t: traj.times.last().copied().unwrap_or(0.0),
            nu: report.verdict.model.nu,
            gamma: report.verdict.model.gamma,
            field: traj.final_state.clone(),
        };
        fs::write(out.join("checkpoint.bin"), snapshot.to_bytes())?;
    }
    if !report.series.is_empty() {
        emit_plotdata(&report.series, &out.join("plots"))?;
    }
    Ok(())
}

fn constants(gamma: f64, dim: usize) -> i32 {
    let c = match kernel_l1_constant(dim, gamma) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    println!("gamma = {gamma}, d = {dim}");
    println!("{:<6} {:>22} {:>22} {:>22} {:>10}", "", "value", "lobes", "primitive", "error");
    println!(
        "{:<6} {:>22.16} {:>22.16} {:>22.16} {:>10.2e}",
        "C", c.value, c.lobes, c.primitive, c.error
    );
    if dim == 1 {
        match kernel_second_derivative_l1(gamma) {
            Ok(a) => println!(
                "{:<6} {:>22.16} {:>22.16} {:>22.16} {:>10.2e}",
                "A1", a.value, a.lobes, a.primitive, a.error
            ),
            Err(e) => return fail(e),
        }
    }
    exit::CONFIRMED
}
