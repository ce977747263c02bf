use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdae::config::{self, ExperimentConfig};
use sdae::experiment::{self, Layout};
use sdae::{format, Error, Result};

/// Stacked denoising autoencoders for synthetic geophysical data.
#[derive(Parser)]
#[command(name = "sdae", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write training, validation and test datasets.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Also write every dataset as CSV next to the binary file.
        #[arg(long)]
        csv: bool,
    },
    /// Train every configured model.
    Train(Common),
    /// Run the trained models (and ensemble) on the test set, then evaluate.
    Denoise(Common),
    /// Score saved outputs against the clean test data.
    Evaluate(Common),
    /// Write plot-ready CSV files from a finished run.
    ExportPlots(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Run seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory; overrides the config's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = config::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let out = match (&self.out, &cfg.out_dir) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => PathBuf::from(o),
            (None, None) => return Err(Error::config("no run directory: pass --out or set out_dir")),
        };
        Ok((cfg, out))
    }
}

fn print_report(dir: &Path) -> Result<()> {
    let path = Layout::new(dir).report();
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, csv } => {
            let (cfg, out) = common.resolve()?;
            for path in experiment::generate(&cfg, &out)? {
                if csv {
                    let set = format::load_dataset(&path)?;
                    format::export_dataset_csv(path.with_extension("csv"), &set)?;
                }
                println!("wrote {}", path.display());
            }
        }
        Command::Train(common) => {
            let (cfg, out) = common.resolve()?;
            for m in experiment::train(&cfg, &out)? {
                let best = m.history.best_valid().map_or("none".to_string(), |v| format!("{v:.6}"));
                println!("{}: {} epochs, best validation loss {best}", m.name, m.history.epochs.len());
            }
        }
        Command::Denoise(common) => {
            let (cfg, out) = common.resolve()?;
            experiment::denoise(&cfg, &out)?;
            print_report(&out)?;
        }
        Command::Evaluate(common) => {
            let (cfg, out) = common.resolve()?;
            experiment::evaluate(&cfg, &out)?;
            print_report(&out)?;
        }
        Command::ExportPlots(common) => {
            let (cfg, out) = common.resolve()?;
            for path in experiment::export_plots(&cfg, &out)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
