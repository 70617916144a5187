use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hnoma_cli::{presets, run_sweep, run_validation, write_rows, CliError, Format, SweepSpec, ValidateOptions};

#[derive(Parser)]
#[command(name = "hnoma", version, about = "Hybrid NOMA underperformance probabilities: sweeps, figures, validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one sweep document and write its table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Monte Carlo trials per grid point.
        #[arg(long)]
        trials: Option<u64>,
        /// Quadrature nodes of the closed-form engine.
        #[arg(long)]
        nc: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Reproduce one figure; writes one table per curve into the directory.
    Figure {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Cross-check Monte Carlo, closed form, numeric integration and the
    /// high-SNR form; exits with status 1 on any failure.
    Validate {
        /// Sweep document (object or array) whose grid points are checked.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Perturb β inside the closed-form engines only (negative control).
        #[arg(long, hide = true, default_value_t = 0.0)]
        corrupt_beta: f64,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write_table(spec: &SweepSpec, path: &Path, format: Format) -> Result<usize, CliError> {
    let rows = run_sweep(spec)?;
    let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    write_rows(&rows, format, BufWriter::new(file))?;
    Ok(rows.len())
}

fn override_spec(spec: &mut SweepSpec, trials: Option<u64>, nc: Option<usize>, seed: Option<u64>) {
    if let Some(t) = trials {
        spec.trials = t;
    }
    if let Some(n) = nc {
        spec.n_c = n;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config, out, trials, nc, seed, format } => {
            let mut spec = SweepSpec::from_json(&read(&config)?)?;
            override_spec(&mut spec, trials, nc, seed);
            let rows = write_table(&spec, &out, format)?;
            eprintln!("wrote {rows} rows to {}", out.display());
        }
        Command::Figure { name, out, trials, seed, format } => {
            fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
            for mut spec in presets::preset(&name)? {
                override_spec(&mut spec, trials, None, seed);
                let path = out.join(format!("{name}_{}.{}", spec.name, format.extension()));
                let rows = write_table(&spec, &path, format)?;
                eprintln!("wrote {rows} rows to {}", path.display());
            }
        }
        Command::Validate { config, trials, seed, corrupt_beta } => {
            let specs = match config {
                Some(path) => SweepSpec::many_from_json(&read(&path)?)?,
                None => hnoma_cli::default_specs(),
            };
            let opts = ValidateOptions { trials, seed, corrupt_beta, ..Default::default() };
            let report = run_validation(&specs, &opts)?;
            for check in &report.checks {
                println!("{check}");
            }
            let failed: Vec<_> = report.failures().map(|c| format!("{} ({})", c.invariant, c.context)).collect();
            println!("{} checks, {} failed", report.checks.len(), failed.len());
            if !failed.is_empty() {
                return Err(CliError::Validation(failed.join(", ")));
            }
        }
    }
    Ok(())
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
