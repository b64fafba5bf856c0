use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use catdap_cli::commands::{self, Output, Overrides};
use catdap_cli::dot::DEFAULT_AIC_MARGIN;
use catdap_cli::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "catdap",
    version,
    about = "Threshold discovery and conditional model ranking for mixed data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed for all random draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of half-split iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Thresholds per search grid (columns may set their own).
    #[arg(long)]
    grid_size: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for reports and the manifest.
    #[arg(long, default_value = "catdap-out")]
    out_dir: PathBuf,
    /// Print nothing on stdout.
    #[arg(long)]
    quiet: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            iterations: self.iterations,
            grid_size: self.grid_size,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find thresholds and rank every predictor subset for each analysis.
    Analyze {
        /// CSV file with a header row.
        input: PathBuf,
        /// JSON config (column schema and analyses) or a previous manifest.
        #[arg(long)]
        config: PathBuf,
        /// Models within this AIC of the minimum add dashed edges.
        #[arg(long, default_value_t = DEFAULT_AIC_MARGIN)]
        aic_margin: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the three-case simulation study.
    Simulate {
        /// Previous simulate manifest to repeat.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Averaged thresholds only.
    Discretize {
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Also fit equal-width histograms with up to this many sections.
        #[arg(long)]
        histogram_max: Option<usize>,
        /// Also write the binarized data as CSV.
        #[arg(long)]
        binarized: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print a saved JSON report as text.
    Render {
        report: PathBuf,
        /// Also write a DOT diagram with this AIC margin.
        #[arg(long)]
        dot: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn finish(output: Output, out_dir: &std::path::Path, quiet: bool) -> Result<()> {
    output.write_to(out_dir)?;
    if !quiet {
        std::io::stdout()
            .write_all(output.stdout.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            input,
            config,
            aic_margin,
            common,
        } => {
            let config =
                commands::apply_overrides(commands::load_run_config(&config)?, common.overrides())?;
            let out = commands::with_threads(common.threads, || {
                commands::analyze(&input, &config, aic_margin)
            })??;
            finish(out, &common.out_dir, common.quiet)
        }
        Command::Simulate { config, common } => {
            let settings = commands::simulation_settings(config.as_deref(), common.overrides())?;
            let out = commands::with_threads(common.threads, || commands::simulate(&settings))??;
            finish(out, &common.out_dir, common.quiet)
        }
        Command::Discretize {
            input,
            config,
            histogram_max,
            binarized,
            common,
        } => {
            let config =
                commands::apply_overrides(commands::load_run_config(&config)?, common.overrides())?;
            let out = commands::with_threads(common.threads, || {
                commands::discretize(&input, &config, histogram_max, binarized)
            })??;
            finish(out, &common.out_dir, common.quiet)
        }
        Command::Render {
            report,
            dot,
            out_dir,
        } => finish(commands::render(&report, dot)?, &out_dir, false),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("catdap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
