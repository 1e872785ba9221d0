use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use mpc_forge::engine::{Backend, Conversion, Family, Validation};
use mpc_forge::kernels::Kernel;
use mpc_forge::transport::BandwidthCap;
use mpc_forge_bench::{emit_report, run_benchmark, sweep, BenchConfig, Format, SweepMatrix};

/// Benchmark secure-computation kernels across protocol families.
#[derive(Parser, Debug)]
#[command(name = "mpc-forge", version)]
struct Args {
    #[arg(long, default_value = "rep3-ring")]
    family: Family,
    #[arg(long, default_value = "compare")]
    kernel: Kernel,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    bits: u32,
    /// Defaults to the family's fixed count, or 3.
    #[arg(long)]
    parties: Option<usize>,
    /// 1g, 5g, 10g, 20g, unlimited, or a custom rate.
    #[arg(long, default_value = "unlimited")]
    bandwidth: String,
    /// Seconds.
    #[arg(long, default_value_t = 600)]
    timeout: u64,
    #[arg(long, default_value = "mem")]
    backend: Backend,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    validation: Option<Validation>,
    #[arg(long)]
    conversion: Option<Conversion>,
    /// Sweep file of `key = a, b, c` lines; overrides the single-cell flags.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Report destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

fn run(args: Args) -> mpc_forge::Result<()> {
    let reports = match &args.sweep {
        Some(path) => sweep(&SweepMatrix::from_kv(&std::fs::read_to_string(path)?)?),
        None => {
            let mut c = BenchConfig::new(args.family, args.kernel, args.n, args.bits);
            if let Some(p) = args.parties {
                c.parties = p;
            }
            c.bandwidth = BandwidthCap::parse(&args.bandwidth)?;
            c.timeout = Duration::from_secs(args.timeout);
            c.backend = args.backend;
            c.seed = args.seed;
            c.validation = args.validation;
            c.conversion = args.conversion;
            vec![run_benchmark(&c)?]
        }
    };
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    };
    emit_report(&reports, args.format, &mut out)?;
    if args.format == Format::Json {
        writeln!(out)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
