mod commands;
mod config;
mod error;
mod figures;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::DynamicsOutput;
use crate::config::Config;
use crate::error::CliError;
use crate::output::Table;

#[derive(Parser, Debug)]
#[command(name = "dotforge", version, about = "Couplings, gate design and dynamics for stacked quantum dot pairs")]
struct Cli {
    /// INI config file with [material], [dot_I], [dot_II], [field], [sweep], ... sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config value, e.g. --set dot_I.base_half=6 (repeatable).
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "DOTFORGE_THREADS")]
    threads: Option<usize>,
    /// Relative tolerance of the k-space quadratures.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print the merged effective config and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound and unbound levels of the 1D finite well in [well].
    Wells,
    /// Data set behind one figure.
    Figure {
        /// One of fig5, fig8, fig10, fig12, fig13, fig14, fig15, fig16, fig17, fig18.
        name: String,
    },
    /// JSON design report for the molecule in the config.
    Design {
        /// Also evaluate the full k-space Förster integral (zero field only).
        #[arg(long)]
        full: bool,
    },
    /// Simulate a protocol: forster-switch, cnot, entangler or hadamard-wait.
    Dynamics { protocol: String },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_table(table: &Table, cli: &Cli) -> Result<(), CliError> {
    let mut w = sink(&cli.out)?;
    match cli.format {
        Format::Csv => table.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table.to_json()).map_err(|e| CliError::Other(e.to_string()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut overrides = cli.set.clone();
    if let Some(tol) = cli.tol {
        overrides.push(format!("coulomb.tol={tol}"));
    }
    let cfg = Config::load(cli.config.as_deref(), &overrides)?;
    if cli.print_config {
        let mut w = sink(&cli.out)?;
        w.write_all(cfg.effective().as_bytes())?;
        w.flush()?;
        return Ok(());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Config("no subcommand given; use wells, figure, design or dynamics".into()));
    };
    match command {
        Command::Wells => emit_table(&commands::wells(&cfg)?, cli),
        Command::Figure { name } => {
            let table = figures::build(name, &cfg)?;
            emit_table(&table, cli)?;
            if table.flagged.is_empty() {
                Ok(())
            } else {
                let rows: Vec<String> = table.flagged.iter().map(|r| (r + 1).to_string()).collect();
                Err(CliError::Numerical(format!(
                    "quadrature did not converge in data rows {}; values written are best estimates",
                    rows.join(", ")
                )))
            }
        }
        Command::Design { full } => {
            let report = commands::design(&cfg, *full)?;
            let mut w = sink(&cli.out)?;
            serde_json::to_writer_pretty(&mut w, &report.json).map_err(|e| CliError::Other(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
            if report.converged {
                Ok(())
            } else {
                Err(CliError::Numerical("full Förster integral did not converge; report written".into()))
            }
        }
        Command::Dynamics { protocol } => {
            let run = commands::dynamics(&cfg, protocol)?;
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            match run.output {
                DynamicsOutput::Trajectory(t) => emit_table(&commands::trajectory_table(&t), cli),
                DynamicsOutput::Gate(t) => emit_table(&t, cli),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
