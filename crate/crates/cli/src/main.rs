use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldcu::SchemeFlavor;
use ldcu_cli::{cmd_compare, cmd_convergence, cmd_run, parse_config, CliError, RunConfig};

/// Low-dissipation central-upwind Euler solver.
#[derive(Debug, Parser)]
#[command(name = "ldcu", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Replace a configuration field, e.g. `--override nx=400`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration.
    Run(Common),
    /// Run several flux flavors on the same configuration.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "new,old")]
        flavors: Vec<SchemeFlavor>,
    },
    /// Measure L1 errors and observed orders over a list of resolutions.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&common.config).map_err(|source| CliError::Io {
        path: common.config.clone(),
        source,
    })?;
    parse_config(&text, &common.overrides)
}

fn print_report(path: &Path, text: &str) {
    println!("# {}", path.display());
    print!("{text}");
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run(common) => {
            let cfg = load(&common)?;
            let summary = cmd_run(&cfg, &common.out)?;
            print_report(&common.out.join("report.txt"), &summary.report.to_string());
        }
        Command::Compare { common, flavors } => {
            let cfg = load(&common)?;
            let report = cmd_compare(&cfg, &flavors, &common.out)?;
            print_report(&common.out.join("compare.txt"), &report.to_string());
        }
        Command::Convergence { common, resolutions } => {
            let cfg = load(&common)?;
            let report = cmd_convergence(&cfg, &resolutions, &common.out)?;
            print_report(&common.out.join("convergence.txt"), &report.to_string());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
