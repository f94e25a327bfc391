use anyhow::{bail, Context, Result};
use catchup_cli::{acceptance, catalog, config::Scenario, run};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "catchup", version, about = "Catching-up solver for sweeping processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a built-in scenario name) and write its artifacts.
    Run {
        config: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subset of csv,svg.
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<String>>,
    },
    /// Validate a scenario without solving it.
    Verify { config: String },
    /// Inspect the built-in scenarios.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run the acceptance suite.
    Acceptance,
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

fn load(config: &str) -> Result<Scenario> {
    let path = Path::new(config);
    if path.exists() {
        Scenario::load(path)
    } else if catalog::source(config).is_some() {
        catalog::load(config)
    } else {
        bail!("{config}: no such file or built-in scenario")
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out_dir, seed, format } => {
            let s = run::with_overrides(load(&config)?, seed, format)?;
            let dir = out_dir
                .or_else(|| s.output.dir.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            let rec = run::run(&s, &dir).with_context(|| format!("running {}", s.name))?;
            for e in &rec.experiments {
                println!("{:<22} {:<16} {}", e.kind, e.status.to_string(), e.message);
            }
            println!("report: {}", dir.join("report.json").display());
            if !rec.passed {
                std::process::exit(1);
            }
        }
        Command::Verify { config } => {
            let s = load(&config)?;
            let (_, report) = run::verify(&s)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            println!("OK");
        }
        Command::Catalog { action: CatalogAction::List } => {
            for s in catalog::all()? {
                println!("{:<28} {}", s.name, s.description);
            }
        }
        Command::Acceptance => {
            let results = acceptance::run_all();
            for r in &results {
                println!("{r}");
            }
            if !results.iter().all(|r| r.passed) {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
