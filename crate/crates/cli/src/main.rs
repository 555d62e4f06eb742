use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use semiclassical_cli::config::{preset, ExperimentConfig, ExperimentKind};
use semiclassical_cli::output::{write_error_file, OutputDir};
use semiclassical_cli::{run_experiment, RunError};

#[derive(Parser, Debug)]
#[command(name = "semiclassical", version, about = "Run Schrödinger, Wigner and Liouville inverse-problem experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file; keys override the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Shipped preset: paper-5.2, desk or identity.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, env = "SEMICLASSICAL_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    ForwardWigner,
    ForwardLiouville,
    ForwardSchrodinger,
    Representative,
    SweepEpsilon,
    SvdStudy,
    IdentityCheck,
    Reconstruct,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::ForwardWigner => ExperimentKind::ForwardWigner,
            Command::ForwardLiouville => ExperimentKind::ForwardLiouville,
            Command::ForwardSchrodinger => ExperimentKind::ForwardSchrodinger,
            Command::Representative => ExperimentKind::Representative,
            Command::SweepEpsilon => ExperimentKind::SweepEpsilon,
            Command::SvdStudy => ExperimentKind::SvdStudy,
            Command::IdentityCheck => ExperimentKind::IdentityCheck,
            Command::Reconstruct => ExperimentKind::Reconstruct,
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let base = match &cli.preset {
        Some(name) => Some(preset(name).ok_or_else(|| {
            semiclassical_cli::ConfigErrors(vec![format!("unknown preset '{name}'; expected paper-5.2, desk or identity")])
        })?),
        None => None,
    };
    let text = cli.config.as_ref().map(std::fs::read_to_string).transpose()?;
    if base.is_none() && text.is_none() {
        return Err(semiclassical_cli::ConfigErrors(vec!["no configuration: pass --config and/or --preset".into()]).into());
    }
    Ok(ExperimentConfig::parse_layered(base, text.as_deref())?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads).max(1);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("warning: thread pool already initialised: {e}");
    }
    let start = Instant::now();
    let result = load(&cli).and_then(|cfg| {
        let mut out = OutputDir::create(&cli.out)?;
        run_experiment(kind, &cfg, &mut out)?;
        out.write_manifest(kind.name(), &cfg.emit(), threads, start.elapsed().as_secs_f64())?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, category) = e.code();
            eprintln!("error: {e}");
            if let Err(io) = write_error_file(&cli.out, kind.name(), code, category, &e.to_string()) {
                eprintln!("error: could not write error file: {io}");
            }
            ExitCode::from(code)
        }
    }
}
