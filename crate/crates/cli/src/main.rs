//! `rotflow`: run simulations, verification suites and file utilities.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 a run stopped on
//! its divergence guard (or a verification suite failed a check).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rotflow::diagnostics;
use rotflow::forcing::{self, ForcingSpec};
use rotflow::io::{self, SnapshotFile, SnapshotParams};
use rotflow::{config::RunConfig, runner, verify, Grid};

#[derive(Parser)]
#[command(name = "rotflow", version, about = "Rotational Burgers and Kuramoto-Sivashinsky solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation described by a key = value config file.
    Run { config: PathBuf },
    /// Run a named verification suite and print its pass/fail table.
    Verify {
        /// One of core-identities, scheme-2d, blowup, damped-absorbing, kse,
        /// helicity-3d, headline, determinism.
        suite: String,
    },
    /// Print the shell energy spectrum of a snapshot as `k,E_k` CSV.
    Spectrum { file: PathBuf },
    /// Generate a seeded annulus force and write it as a snapshot at t = 0.
    ForcingGen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long)]
        grashof: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: u8,
        #[arg(long)]
        out: PathBuf,
    },
}

fn cmd_run(path: &Path) -> ExitCode {
    let cfg = match RunConfig::from_file(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match runner::run_config(&cfg) {
        Ok(s) => {
            println!("output: {}", s.output_dir.display());
            match &s.diverged {
                None => {
                    println!("completed {} steps to t={}", s.steps, s.t);
                    ExitCode::SUCCESS
                }
                Some(d) => {
                    println!("diverged at step {} (t={}): {}", d.step, d.t, d.reason);
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_verify(suite: &str) -> ExitCode {
    match verify::run_suite(suite) {
        Ok(report) => {
            print!("{}", report.table());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn spectrum_of(file: &Path) -> rotflow::Result<String> {
    let snap = SnapshotFile::read(file)?;
    let spectrum = match snap.dim {
        2 => diagnostics::energy_spectrum(&snap.to_field::<2>()?),
        _ => diagnostics::energy_spectrum(&snap.to_field::<3>()?),
    };
    Ok(io::spectrum_csv(&spectrum))
}

fn forcing_gen<const D: usize>(spec: &ForcingSpec, n: usize, out: &Path) -> rotflow::Result<()> {
    let f = forcing::generate(spec, Grid::<D>::new(n)?)?;
    let params = SnapshotParams {
        nu: spec.nu,
        ..SnapshotParams::default()
    };
    io::write_snapshot(out, f.field(), params)
}

fn report(result: rotflow::Result<()>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Verify { suite } => cmd_verify(&suite),
        Command::Spectrum { file } => report(spectrum_of(&file).map(|csv| print!("{csv}"))),
        Command::ForcingGen {
            seed,
            kmin,
            kmax,
            grashof,
            nu,
            n,
            dim,
            out,
        } => {
            let spec = ForcingSpec::new(seed, kmin, kmax, grashof, nu);
            report(match dim {
                2 => forcing_gen::<2>(&spec, n, &out),
                3 => forcing_gen::<3>(&spec, n, &out),
                d => {
                    eprintln!("error: --dim must be 2 or 3, got {d}");
                    return ExitCode::from(1);
                }
            })
        }
    }
}
