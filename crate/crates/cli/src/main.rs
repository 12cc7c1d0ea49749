//! Benchmark harness for swept-rule 2D domain decomposition.
//!
//! Subcommands: `run` a single simulation, `bench` a configuration sweep,
//! `model` the analytic cost curves, `verify` engines against the serial
//! oracle. Every config-file key has a matching flag; flags override the
//! file.

mod commands;
mod config;
mod report;
mod resolve;

use clap::{Args, Parser, Subcommand};
use config::Settings;
use std::path::PathBuf;
use std::process::ExitCode;
use swept2d_core::engines::EngineError;

#[derive(Parser)]
#[command(
    name = "swept2d",
    about = "Swept-rule 2D space-time decomposition benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write the gathered field snapshot and a CSV
    /// report row.
    Run(RunArgs),
    /// Sweep subdomain sizes and engines, reporting median per-sub-step
    /// times as CSV.
    Bench(BenchArgs),
    /// Evaluate the analytic cost model and report the optimal subdomain
    /// size.
    Model(ModelArgs),
    /// Exhaustively compare swept and classic engines against the serial
    /// oracle, bitwise.
    Verify(VerifyArgs),
}

/// Keys shared by run and bench; every `[section] key` in the config file
/// has a `--section-key`-style flag here.
#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Configuration file: flat `key = value` lines under `[section]`
    /// headers, `#` comments.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Kernel: identity | increment | wide-stencil | wave | euler.
    #[arg(long)]
    kernel: Option<String>,
    /// Engine: serial | classic | swept.
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    px: Option<u32>,
    #[arg(long)]
    py: Option<u32>,
    /// Points per subdomain side (even, >= 4).
    #[arg(long)]
    n: Option<usize>,
    /// Swept cycles to run (each advances n sub-steps).
    #[arg(long)]
    cycles: Option<u64>,
    /// Sub-steps to run; for the swept engine must be a multiple of n.
    #[arg(long)]
    substeps: Option<u64>,
    /// Transport: inproc | tcp.
    #[arg(long)]
    transport: Option<String>,
    /// Injected one-way latency in microseconds.
    #[arg(long)]
    tau_us: Option<f64>,
    /// Roster file for the tcp transport (`rank cx cy host port` lines).
    #[arg(long)]
    roster: Option<PathBuf>,
    /// This process's rank index (tcp transport).
    #[arg(long)]
    rank: Option<u32>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snapshot_out: Option<PathBuf>,
    #[arg(long)]
    report_out: Option<PathBuf>,
    /// Transport receive timeout, seconds.
    #[arg(long)]
    timeout_s: Option<f64>,
    #[arg(long)]
    wave_cfl: Option<f64>,
    #[arg(long)]
    wave_sigma_frac: Option<f64>,
    #[arg(long)]
    wave_amplitude: Option<f64>,
    #[arg(long)]
    euler_lx: Option<f64>,
    #[arg(long)]
    euler_ly: Option<f64>,
    #[arg(long)]
    euler_nx: Option<usize>,
    #[arg(long)]
    euler_ny: Option<usize>,
    #[arg(long)]
    euler_dt: Option<f64>,
    #[arg(long)]
    euler_gamma: Option<f64>,
    #[arg(long)]
    euler_rho: Option<f64>,
    #[arg(long)]
    euler_mach: Option<f64>,
    #[arg(long)]
    euler_p: Option<f64>,
    #[arg(long)]
    euler_obstacle: Option<bool>,
    #[arg(long)]
    euler_obstacle_strength: Option<f64>,
    #[arg(long)]
    euler_obstacle_sigma: Option<f64>,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path).map_err(|e| CliError::Usage(e.to_string()))?,
            None => Settings::default(),
        };
        s.set_opt("run", "kernel", self.kernel.as_ref());
        s.set_opt("run", "engine", self.engine.as_ref());
        s.set_opt("run", "px", self.px);
        s.set_opt("run", "py", self.py);
        s.set_opt("run", "n", self.n);
        s.set_opt("run", "cycles", self.cycles);
        s.set_opt("run", "substeps", self.substeps);
        s.set_opt("run", "transport", self.transport.as_ref());
        s.set_opt("run", "tau_us", self.tau_us);
        s.set_opt("run", "roster", self.roster.as_ref().map(|p| p.display()));
        s.set_opt("run", "rank", self.rank);
        s.set_opt("run", "reps", self.reps);
        s.set_opt("run", "warmup", self.warmup);
        s.set_opt("run", "seed", self.seed);
        s.set_opt(
            "run",
            "snapshot_out",
            self.snapshot_out.as_ref().map(|p| p.display()),
        );
        s.set_opt(
            "run",
            "report_out",
            self.report_out.as_ref().map(|p| p.display()),
        );
        s.set_opt("run", "timeout_s", self.timeout_s);
        s.set_opt("wave", "cfl", self.wave_cfl);
        s.set_opt("wave", "sigma_frac", self.wave_sigma_frac);
        s.set_opt("wave", "amplitude", self.wave_amplitude);
        s.set_opt("euler", "lx", self.euler_lx);
        s.set_opt("euler", "ly", self.euler_ly);
        s.set_opt("euler", "nx", self.euler_nx);
        s.set_opt("euler", "ny", self.euler_ny);
        s.set_opt("euler", "dt", self.euler_dt);
        s.set_opt("euler", "gamma", self.euler_gamma);
        s.set_opt("euler", "rho", self.euler_rho);
        s.set_opt("euler", "mach", self.euler_mach);
        s.set_opt("euler", "p", self.euler_p);
        s.set_opt("euler", "obstacle", self.euler_obstacle);
        s.set_opt("euler", "obstacle_strength", self.euler_obstacle_strength);
        s.set_opt("euler", "obstacle_sigma", self.euler_obstacle_sigma);
        Ok(s)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Subdomain sides to sweep, comma separated.
    #[arg(long)]
    n_list: Option<String>,
    /// Engines to sweep, comma separated (classic,swept).
    #[arg(long)]
    engines: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Compute seconds per sub-step per point.
    #[arg(long)]
    s: Option<f64>,
    /// One-way latency in seconds.
    #[arg(long)]
    tau: Option<f64>,
    /// Latency preset: ec2 | gige | 100gige | infiniband.
    #[arg(long)]
    interconnect: Option<String>,
    /// Compute preset: fe-thread | fv-thread | fd-thread | fe-gpu | fv-gpu | fd-gpu.
    #[arg(long)]
    compute: Option<String>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Output CSV path for the model curve.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    max_px: Option<u32>,
    #[arg(long)]
    max_py: Option<u32>,
    /// Subdomain sides to verify, comma separated.
    #[arg(long)]
    n_list: Option<String>,
    /// Kernels to verify, comma separated.
    #[arg(long)]
    kernels: Option<String>,
    /// Deliberately mis-wire bridge panels to prove divergences are caught.
    #[arg(long, default_value_t = false)]
    inject_fault: bool,
}

/// Error category decides the exit code: usage/config 2, numeric 3,
/// transport 4, anything else 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Transport(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Transport(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("error: usage: {m}"),
            CliError::Numeric(m) => format!("error: numeric: {m}"),
            CliError::Transport(m) => format!("error: transport: {m}"),
            CliError::Other(m) => format!("error: {m}"),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> CliError {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else if e.is_transport() || matches!(e, EngineError::Protocol { .. }) {
            CliError::Transport(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => args
            .common
            .settings()
            .and_then(|s| commands::run::cmd_run(&s)),
        Command::Bench(args) => args.common.settings().and_then(|mut s| {
            s.set_opt("bench", "n_list", args.n_list.as_ref());
            s.set_opt("bench", "engines", args.engines.as_ref());
            s.set_opt("bench", "out", args.out.as_ref().map(|p| p.display()));
            commands::bench::cmd_bench(&s)
        }),
        Command::Model(args) => {
            let settings = match &args.config {
                Some(path) => Settings::from_file(path)
                    .map_err(|e| CliError::Usage(e.to_string())),
                None => Ok(Settings::default()),
            };
            settings.and_then(|mut s| {
                s.set_opt("model", "s", args.s);
                s.set_opt("model", "tau", args.tau);
                s.set_opt("model", "interconnect", args.interconnect.as_ref());
                s.set_opt("model", "compute", args.compute.as_ref());
                s.set_opt("model", "n_min", args.n_min);
                s.set_opt("model", "n_max", args.n_max);
                s.set_opt("model", "out", args.out.as_ref().map(|p| p.display()));
                commands::model::cmd_model(&s)
            })
        }
        Command::Verify(args) => args.common.settings().and_then(|mut s| {
            s.set_opt("verify", "max_px", args.max_px);
            s.set_opt("verify", "max_py", args.max_py);
            s.set_opt("verify", "n_list", args.n_list.as_ref());
            s.set_opt("verify", "kernels", args.kernels.as_ref());
            s.set("verify", "inject_fault", args.inject_fault);
            commands::verify::cmd_verify(&s)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
