use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use simsim::experiment::{parse_houses, run_campaign, Algorithm, CampaignFile, Preset};
use simsim::sim::simulate_traced;
use simsim::{load_catalog, Catalog, SimConfig, Validation};

#[derive(Parser)]
#[command(
    name = "simsim",
    version,
    about = "Evolve furnished rooms for a simulated agent"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded campaign of one algorithm.
    Run(RunArgs),
    /// Print ASCII renders of a house file or an archive export.
    Render {
        file: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Check a catalog file against the catalog rules.
    ValidateCatalog {
        file: PathBuf,
        /// Skip the required-object and balance checks.
        #[arg(long)]
        no_required_objects: bool,
    },
    /// Simulate one house and report its fitness.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Print one JSON line per tick.
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with any of the settings below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    /// desk (pop 50, 200 generations, 5 runs) or full (100, 1000, 20).
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    mc_threshold: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    novelty_threshold: Option<f64>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write a tick trace of each run's best house.
    #[arg(long)]
    trace: bool,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
        .map_err(|e: simsim::experiment::ExperimentError| e.to_string())
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
        .map_err(|e: simsim::experiment::ExperimentError| e.to_string())
}

impl RunArgs {
    fn into_layer(self) -> (Option<PathBuf>, CampaignFile) {
        let layer = CampaignFile {
            algorithm: self.algorithm,
            preset: self.preset,
            runs: self.runs,
            seed: self.seed,
            pop: self.pop,
            generations: self.generations,
            mc_threshold: self.mc_threshold,
            k: self.k,
            novelty_threshold: self.novelty_threshold,
            catalog: self.catalog,
            out: self.out,
            jobs: self.jobs,
            trace: self.trace.then_some(true),
            ..CampaignFile::default()
        };
        (self.config, layer)
    }
}

fn catalog_or_default(path: Option<&Path>) -> Result<Catalog> {
    match path {
        Some(p) => load_catalog(p, Validation::Strict)
            .with_context(|| format!("loading catalog {}", p.display())),
        None => Ok(Catalog::default_catalog()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(args: RunArgs) -> Result<()> {
    let (config, flags) = args.into_layer();
    let base = match config {
        Some(path) => CampaignFile::load(&path)?,
        None => CampaignFile::default(),
    };
    let spec = base.merge(flags).resolve()?;
    let summary = run_campaign(&spec)?;
    println!(
        "{} runs of {} written to {}",
        summary.runs,
        summary.algorithm,
        spec.out_dir.display()
    );
    if let Some(a) = summary.archive {
        println!("archive size: mean {:.2} std {:.2}", a.mean, a.std_dev);
    }
    println!(
        "best fitness: mean {:.4} std {:.4} max {:.4}",
        summary.best_fitness.mean, summary.best_fitness.std_dev, summary.max_best_fitness
    );
    println!(
        "final population average fitness: mean {:.4}",
        summary.final_avg_fitness.mean
    );
    Ok(())
}

fn render(file: &Path, catalog: Option<&Path>) -> Result<()> {
    let catalog = catalog_or_default(catalog)?;
    let text = read(file)?;
    let houses = parse_houses(&text).with_context(|| format!("parsing {}", file.display()))?;
    let many = text.trim_start().starts_with('[');
    for (i, (label, house)) in houses.iter().enumerate() {
        house
            .validate(&catalog)
            .with_context(|| format!("{}: {label}", file.display()))?;
        if many {
            if i > 0 {
                println!();
            }
            println!("== {label} ==");
        }
        print!("{}", house.render_ascii(&catalog));
    }
    Ok(())
}

fn validate_catalog(file: &Path, relaxed: bool) -> Result<()> {
    let validation = if relaxed {
        Validation::NoRequiredObjects
    } else {
        Validation::Strict
    };
    let catalog = load_catalog(file, validation)?;
    println!("{}: {} objects ok", file.display(), catalog.len());
    Ok(())
}

fn simulate_file(file: &Path, catalog: Option<&Path>, trace: bool) -> Result<()> {
    let catalog = catalog_or_default(catalog)?;
    let houses =
        parse_houses(&read(file)?).with_context(|| format!("parsing {}", file.display()))?;
    let config = SimConfig::default();
    for (label, house) in &houses {
        house.validate(&catalog)?;
        let (result, ticks) = simulate_traced(house, &config, &catalog);
        if trace {
            for t in &ticks {
                println!("{}", serde_json::to_string(t)?);
            }
        }
        match result.death_tick {
            Some(t) => println!("{label}: died at tick {t}, fitness {:.4}", result.fitness),
            None => println!("{label}: survived, fitness {:.4}", result.fitness),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Render { file, catalog } => render(&file, catalog.as_deref()),
        Command::ValidateCatalog {
            file,
            no_required_objects,
        } => validate_catalog(&file, no_required_objects),
        Command::Simulate {
            file,
            catalog,
            trace,
        } => simulate_file(&file, catalog.as_deref(), trace),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
