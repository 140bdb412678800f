use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quanputer::config::RawConfig;
use quanputer::{find_preset, list_scenarios, run_scenario, CliError, RunRequest, RunResult};

#[derive(Parser)]
#[command(name = "quanputer", version, about = "Run quanputer scenarios and convergence checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Override a configuration value, `section.key=value`
    #[arg(long = "set", value_name = "K=V")]
    set: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct KindArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Bch,
    Kernel,
}

#[derive(Subcommand)]
enum Command {
    /// List built-in scenarios
    List,
    /// Run a built-in scenario by name
    Run {
        preset: String,
        #[command(flatten)]
        common: Common,
    },
    /// Verify the commutator identities or the kinetic kernel with defaults
    Verify {
        target: VerifyTarget,
        /// Number of eps values in the sweep
        #[arg(long)]
        eps_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    Dynsys(KindArgs),
    Quantum(KindArgs),
    Liouville(KindArgs),
    #[command(name = "verify-bch")]
    VerifyBch(KindArgs),
    #[command(name = "verify-kernel")]
    VerifyKernel(KindArgs),
    #[command(name = "convergence-trotter")]
    ConvergenceTrotter(KindArgs),
    #[command(name = "convergence-commutator")]
    ConvergenceCommutator(KindArgs),
}

fn request(kind: &str, mut config: RawConfig, preset: Option<&str>, common: &Common) -> Result<RunRequest, CliError> {
    for assignment in &common.set {
        config.set(assignment)?;
    }
    Ok(RunRequest {
        kind: kind.to_string(),
        config,
        preset: preset.map(str::to_string),
        out_dir: common.out.clone(),
        seed: common.seed,
    })
}

fn dispatch(command: Command) -> Result<Option<RunResult>, CliError> {
    let req = match command {
        Command::List => {
            print!("{}", list_scenarios());
            return Ok(None);
        }
        Command::Run { preset, common } => {
            let p = find_preset(&preset).ok_or_else(|| CliError::Usage(format!("unknown scenario `{preset}`; see `quanputer list`")))?;
            request(p.kind, p.raw_config()?, Some(p.name), &common)?
        }
        Command::Verify {
            target,
            eps_points,
            common,
        } => {
            let (kind, key) = match target {
                VerifyTarget::Bch => ("verify-bch", "verify.eps_points"),
                VerifyTarget::Kernel => ("verify-kernel", "kernel.eps_points"),
            };
            let mut config = RawConfig::default();
            if let Some(n) = eps_points {
                config.set(&format!("{key}={n}"))?;
            }
            request(kind, config, None, &common)?
        }
        Command::Dynsys(a) => kind_request("dynsys", &a)?,
        Command::Quantum(a) => kind_request("quantum", &a)?,
        Command::Liouville(a) => kind_request("liouville", &a)?,
        Command::VerifyBch(a) => kind_request("verify-bch", &a)?,
        Command::VerifyKernel(a) => kind_request("verify-kernel", &a)?,
        Command::ConvergenceTrotter(a) => kind_request("convergence-trotter", &a)?,
        Command::ConvergenceCommutator(a) => kind_request("convergence-commutator", &a)?,
    };
    run_scenario(&req).map(Some)
}

fn kind_request(kind: &str, a: &KindArgs) -> Result<RunRequest, CliError> {
    request(kind, RawConfig::from_file(&a.config)?, None, &a.common)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(result)) => {
            for line in &result.outcome.summary {
                println!("{line}");
            }
            for w in &result.outcome.warnings {
                eprintln!("warning: {w}");
            }
            for c in &result.outcome.checks {
                println!("{}", c.line());
            }
            println!("outputs written to {}", result.out_dir.display());
            ExitCode::from(result.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
