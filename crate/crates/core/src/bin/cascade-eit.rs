use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cascade_eit::config::parse_config_with_overrides;
use cascade_eit::run::{describe, run_command, Command, RunError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Coupled and coupling-free susceptibility versus probe detuning.
    Spectrum,
    /// Transparency-dip contrast and width.
    Dip,
    /// Dip contrast versus probe Rabi frequency.
    Sweep,
    /// Probe group index at the configured detuning.
    Groupindex,
    /// Residual two-photon Doppler widths.
    Residual,
    /// Propagation through the lamp and the three detection channels.
    Propagate,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Dip => Command::Dip,
            Cmd::Sweep => Command::Sweep,
            Cmd::Groupindex => Command::GroupIndex,
            Cmd::Residual => Command::Residual,
            Cmd::Propagate => Command::Propagate,
        }
    }
}

/// Steady-state EIT/CPT spectra of a Doppler-broadened open cascade.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Configuration file (`section.key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output prefix; writes <prefix>.csv and <prefix>.json.
    #[arg(long)]
    out: PathBuf,
    /// Extra `section.key=value` settings applied after the file.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&cli.config)?;
    let config = parse_config_with_overrides(&text, &cli.overrides)?;
    let record = run_command(cli.command.into(), &config, &cli.out)?;
    eprintln!(
        "{} finished in {:.2} s, wrote {}",
        cli.command.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default(),
        record.wall_clock_seconds,
        record.csv_file
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", describe(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
