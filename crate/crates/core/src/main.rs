use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use facediv_core::config::{BinConfig, ExtractConfig};
use facediv_core::manifest::Manifest;
use facediv_core::pipeline::{load_features, run_extract, run_report, write_extract, write_report};

#[derive(Parser)]
#[command(name = "facediv", version, about = "Facial coding schemes and dataset diversity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the feature table from a manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// TOML extraction config (quality policy and extractor settings).
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Summarize a feature table as a diversity report.
    Report {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// TOML binning config.
        #[arg(long)]
        bins: Option<PathBuf>,
    },
    /// Check a manifest without reading images.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
}

const PARTIAL: u8 = 2;

fn run(cli: Cli) -> facediv_core::Result<u8> {
    match cli.command {
        Command::Extract { manifest, out, policy, workers } => {
            let cfg = match policy {
                Some(p) => ExtractConfig::load(&p)?,
                None => ExtractConfig::default(),
            };
            let m = Manifest::load(&manifest)?;
            let result = run_extract(&m, &cfg, workers)?;
            write_extract(&result, &out)?;
            eprintln!(
                "{} records: {} accepted, {} rejected",
                m.records.len(),
                result.table.rows.len(),
                result.rejections.len()
            );
            Ok(if result.is_partial() { PARTIAL } else { 0 })
        }
        Command::Report { features, out, bins } => {
            let bins = match bins {
                Some(p) => BinConfig::load(&p)?,
                None => BinConfig::default(),
            };
            let table = load_features(&features)?;
            let rep = run_report(&table, &bins)?;
            write_report(&rep, &out)?;
            let absent = rep.rows.iter().filter(|r| r.scores.is_none()).count();
            Ok(if absent > 0 { PARTIAL } else { 0 })
        }
        Command::Validate { manifest } => {
            let m = Manifest::load(&manifest)?;
            println!("{}: {} valid records", manifest.display(), m.records.len());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
