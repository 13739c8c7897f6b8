use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncml::experiments::{experiment_kinds, run_suite, write_outputs, OutputFormat, SuiteConfig, Verdict};

#[derive(Parser)]
#[command(name = "ncml", version, about = "Multilinear Fourier and Schur multiplier experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a TOML configuration.
    Run {
        config: PathBuf,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Run only the named experiments.
        #[arg(long = "only")]
        only: Vec<String>,
    },
    /// List experiment kinds, or the experiments of a configuration.
    ListExperiments { config: Option<PathBuf> },
    /// Parse and check a configuration without running it.
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> ncml::Result<ExitCode> {
    match cli.command {
        Command::Run { config, seed, out, jobs, format, only } => {
            let mut cfg = SuiteConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let only = (!only.is_empty()).then_some(only);
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                builder = builder.num_threads(j);
            }
            let pool = builder.build().map_err(|e| ncml::Error::Config(e.to_string()))?;
            let reports = pool.install(|| run_suite(&cfg, only.as_deref()))?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            let manifest = write_outputs(&out, &cfg, &reports, format)?;
            let mut failed = 0;
            for r in &reports {
                let f = r.rows.iter().filter(|row| row.pass == Verdict::Fail).count();
                failed += f;
                println!("{:<28} {:>6} rows {:>5} failed {:>8.2}s", r.id, r.rows.len(), f, r.seconds);
            }
            println!("config {}  total {:.2}s  -> {}", &manifest.config_hash[..12], manifest.total_seconds, out.display());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ListExperiments { config: None } => {
            for (kind, what) in experiment_kinds() {
                println!("{kind:<22} {what}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ListExperiments { config: Some(path) } => {
            let cfg = SuiteConfig::load(&path)?;
            for (id, spec) in &cfg.experiment {
                println!("{id:<28} {}", spec.kind());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let cfg = SuiteConfig::load(&config)?;
            println!("ok: {} experiments", cfg.experiment.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}
