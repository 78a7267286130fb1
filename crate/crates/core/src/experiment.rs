//! Seeded multi-run campaigns and their on-disk outputs.
//!
//! Layout under the output directory:
//!
//! ```text
//! summary.json          per-run results and cross-run statistics
//! fitness_curve.csv     generation, mean average fitness, mean best fitness
//! novelty_curve.csv     generation, mean archive size, mean novel additions (novelty runs)
//! run_000/
//!   generations.csv     one row per generation (per child for the hillclimber)
//!   archive.json        novelty runs: archived houses with fitness and sparseness
//!   champion.json       hillclimber runs: the final champion
//!   best_trace.json     with tracing on: tick trace of the run's best house
//! ```
//!
//! Run `i` uses seed `base_seed + i`. Every output is a pure function of the
//! `ExperimentSpec`, so repeated campaigns are byte-identical.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{load_catalog, Catalog, CatalogError, Validation};
use crate::exec::{with_jobs, Execution};
use crate::house::{House, HouseDocument, HouseError};
use crate::mutation::MutationConfig;
use crate::search::{
    run_novelty_search, run_one_plus_one, ArchiveSampling, GenerationStats, Individual,
    NoveltyReference, SearchConfig, SearchError,
};
use crate::sim::{simulate_traced, SimConfig, TickRecord};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    House(#[from] HouseError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Ns,
    Mcns,
    McnsH,
    OnePlusOne,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Ns,
        Algorithm::Mcns,
        Algorithm::McnsH,
        Algorithm::OnePlusOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ns => "ns",
            Algorithm::Mcns => "mcns",
            Algorithm::McnsH => "mcns-h",
            Algorithm::OnePlusOne => "one-plus-one",
        }
    }

    /// Minimal criterion used unless overridden.
    pub fn default_mc_threshold(self) -> f64 {
        match self {
            Algorithm::Mcns => 0.1,
            Algorithm::McnsH => 0.2,
            Algorithm::Ns | Algorithm::OnePlusOne => 0.0,
        }
    }

    pub fn has_archive(self) -> bool {
        self != Algorithm::OnePlusOne
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ExperimentError::Invalid(format!("unknown algorithm `{s}`")))
    }
}

/// Named budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Population 50, 200 generations, 5 runs.
    Desk,
    /// Population 100, 1000 generations, 20 runs.
    Full,
}

impl Preset {
    /// `(pop_size, generations, runs)`.
    pub fn budget(self) -> (usize, usize, usize) {
        match self {
            Preset::Desk => (50, 200, 5),
            Preset::Full => (100, 1000, 20),
        }
    }
}

impl FromStr for Preset {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Preset::Desk),
            "full" => Ok(Preset::Full),
            _ => Err(ExperimentError::Invalid(format!("unknown preset `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub base_seed: u64,
    /// Search settings shared by every run; the seed field is replaced per run.
    pub search: SearchConfig,
    /// Catalog file; the shipped catalog when absent.
    pub catalog: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Upper bound on worker threads.
    pub jobs: Option<usize>,
    /// Write a tick trace of each run's best house.
    pub trace: bool,
}

impl ExperimentSpec {
    /// Full-scale defaults for `algorithm`: 20 runs of population 100 over
    /// 1000 generations.
    pub fn new(algorithm: Algorithm, out_dir: impl Into<PathBuf>) -> Self {
        Self::from_preset(algorithm, Preset::Full, out_dir)
    }

    pub fn from_preset(algorithm: Algorithm, preset: Preset, out_dir: impl Into<PathBuf>) -> Self {
        let (pop_size, generations, runs) = preset.budget();
        Self {
            algorithm,
            runs,
            base_seed: 0,
            search: SearchConfig {
                pop_size,
                generations,
                mc_threshold: algorithm.default_mc_threshold(),
                ..SearchConfig::default()
            },
            catalog: None,
            out_dir: out_dir.into(),
            jobs: None,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.runs == 0 {
            return Err(ExperimentError::Invalid("runs must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(ExperimentError::Invalid("jobs must be positive".into()));
        }
        self.search.validate()?;
        Ok(())
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn load_catalog(&self) -> Result<Catalog, ExperimentError> {
        match &self.catalog {
            Some(path) => Ok(load_catalog(path, Validation::Strict)?),
            None => Ok(Catalog::default_catalog()),
        }
    }
}

/// Every campaign setting as optional values, for config files and flags.
///
/// Later layers win in [`CampaignFile::merge`]; [`CampaignFile::resolve`]
/// fills what is still unset from the preset (desk by default).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub algorithm: Option<Algorithm>,
    pub preset: Option<Preset>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub pop: Option<usize>,
    pub generations: Option<usize>,
    pub mc_threshold: Option<f64>,
    pub k: Option<usize>,
    pub novelty_threshold: Option<f64>,
    pub novelty_reference: Option<NoveltyReference>,
    pub archive_sampling: Option<ArchiveSampling>,
    pub strict_viability: Option<bool>,
    pub catalog: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub trace: Option<bool>,
    pub sim: Option<SimConfig>,
    pub mutation: Option<MutationConfig>,
}

impl CampaignFile {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml_str(&text).map_err(|message| ExperimentError::Format {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Overlays every value set in `top`.
    pub fn merge(self, top: CampaignFile) -> CampaignFile {
        CampaignFile {
            algorithm: top.algorithm.or(self.algorithm),
            preset: top.preset.or(self.preset),
            runs: top.runs.or(self.runs),
            seed: top.seed.or(self.seed),
            pop: top.pop.or(self.pop),
            generations: top.generations.or(self.generations),
            mc_threshold: top.mc_threshold.or(self.mc_threshold),
            k: top.k.or(self.k),
            novelty_threshold: top.novelty_threshold.or(self.novelty_threshold),
            novelty_reference: top.novelty_reference.or(self.novelty_reference),
            archive_sampling: top.archive_sampling.or(self.archive_sampling),
            strict_viability: top.strict_viability.or(self.strict_viability),
            catalog: top.catalog.or(self.catalog),
            out: top.out.or(self.out),
            jobs: top.jobs.or(self.jobs),
            trace: top.trace.or(self.trace),
            sim: top.sim.or(self.sim),
            mutation: top.mutation.or(self.mutation),
        }
    }

    pub fn resolve(self) -> Result<ExperimentSpec, ExperimentError> {
        let algorithm = self
            .algorithm
            .ok_or_else(|| ExperimentError::Invalid("no algorithm given".into()))?;
        let out = self
            .out
            .ok_or_else(|| ExperimentError::Invalid("no output directory given".into()))?;
        let mut spec =
            ExperimentSpec::from_preset(algorithm, self.preset.unwrap_or(Preset::Desk), out);
        let s = &mut spec.search;
        if let Some(v) = self.pop {
            s.pop_size = v;
        }
        if let Some(v) = self.generations {
            s.generations = v;
        }
        if let Some(v) = self.mc_threshold {
            s.mc_threshold = v;
        }
        if let Some(v) = self.k {
            s.k = v;
        }
        if let Some(v) = self.novelty_threshold {
            s.novelty_threshold = v;
        }
        if let Some(v) = self.novelty_reference {
            s.novelty_reference = v;
        }
        if let Some(v) = self.archive_sampling {
            s.archive_sampling = v;
        }
        if let Some(v) = self.strict_viability {
            s.strict_viability = v;
        }
        if let Some(v) = self.sim {
            s.sim = v;
        }
        if let Some(v) = self.mutation {
            s.mutation = v;
        }
        if let Some(v) = self.runs {
            spec.runs = v;
        }
        if let Some(v) = self.seed {
            spec.base_seed = v;
        }
        spec.catalog = self.catalog;
        spec.jobs = self.jobs;
        spec.trace = self.trace.unwrap_or(false);
        spec.validate()?;
        Ok(spec)
    }
}

/// Result of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    /// Absent for the hillclimber.
    pub archive_size: Option<usize>,
    pub best_fitness: f64,
    /// Population average fitness in the last generation.
    pub final_avg_fitness: f64,
    /// Best fitness in the last generation's population.
    pub final_population_best: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Stat {
            mean,
            std_dev: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub base_seed: u64,
    pub config: SearchConfig,
    pub per_run: Vec<RunSummary>,
    /// Absent for the hillclimber.
    pub archive: Option<Stat>,
    pub best_fitness: Stat,
    /// Highest best fitness over all runs.
    pub max_best_fitness: f64,
    pub final_avg_fitness: Stat,
    pub final_population_best: Stat,
    /// A single run: standard deviations are 0 by construction.
    pub degenerate: bool,
}

/// Archive export record: the house document plus insertion metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRecord {
    #[serde(flatten)]
    pub house: HouseDocument,
    pub fitness: f64,
    pub effective_fitness: f64,
    /// Absent when the entry had no neighbors.
    pub sparseness: Option<f64>,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChampionRecord {
    #[serde(flatten)]
    pub house: HouseDocument,
    pub fitness: f64,
    pub improvements: usize,
}

struct RunOutput {
    summary: RunSummary,
    stats: Vec<GenerationStats>,
}

/// Runs every seeded run of `spec` and writes the campaign outputs.
pub fn run_campaign(spec: &ExperimentSpec) -> Result<CampaignSummary, ExperimentError> {
    spec.validate()?;
    let catalog = spec.load_catalog()?;
    let out = &spec.out_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;

    let results = with_jobs(spec.jobs, || {
        Execution::default().map_range(spec.runs, |run| execute_run(spec, &catalog, run))
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let summary = summarize(spec, &runs);
    write_json(&out.join("summary.json"), &summary)?;
    let stats: Vec<&[GenerationStats]> = runs.iter().map(|r| r.stats.as_slice()).collect();
    write_fitness_curve(&out.join("fitness_curve.csv"), &stats)?;
    if spec.algorithm.has_archive() {
        write_novelty_curve(&out.join("novelty_curve.csv"), &stats)?;
    }
    Ok(summary)
}

fn execute_run(
    spec: &ExperimentSpec,
    catalog: &Catalog,
    run: usize,
) -> Result<RunOutput, ExperimentError> {
    let seed = spec.run_seed(run);
    let config = SearchConfig {
        seed,
        ..spec.search.clone()
    };
    let dir = spec.out_dir.join(format!("run_{run:03}"));
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;

    let (summary, stats, best) = if spec.algorithm.has_archive() {
        let result = run_novelty_search(&config, catalog, Execution::default())?;
        let records: Vec<ArchiveRecord> = result
            .archive
            .entries()
            .iter()
            .map(|e| ArchiveRecord {
                house: e.individual.house.to_document(),
                fitness: e.individual.fitness,
                effective_fitness: e.individual.effective_fitness,
                sparseness: e.sparseness.is_finite().then_some(e.sparseness),
                generation: e.generation,
            })
            .collect();
        write_json(&dir.join("archive.json"), &records)?;
        let last = result.stats.last().expect("at least one generation");
        let summary = RunSummary {
            run,
            seed,
            archive_size: Some(result.archive.len()),
            best_fitness: result.best_fitness(),
            final_avg_fitness: last.avg_fitness,
            final_population_best: last.population_best,
        };
        (summary, result.stats, result.best)
    } else {
        let result = run_one_plus_one(&config, catalog)?;
        write_json(
            &dir.join("champion.json"),
            &ChampionRecord {
                house: result.best.house.to_document(),
                fitness: result.best.fitness,
                improvements: result.improvements,
            },
        )?;
        let last = result.stats.last().expect("budget is positive");
        let summary = RunSummary {
            run,
            seed,
            archive_size: None,
            best_fitness: result.best_fitness(),
            final_avg_fitness: last.avg_fitness,
            final_population_best: last.population_best,
        };
        (summary, result.stats, result.best)
    };

    write_generations(&dir.join("generations.csv"), &stats)?;
    if spec.trace {
        write_trace(&dir.join("best_trace.json"), &best, &config.sim, catalog)?;
    }
    Ok(RunOutput { summary, stats })
}

fn summarize(spec: &ExperimentSpec, runs: &[RunOutput]) -> CampaignSummary {
    let per_run: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let pick = |f: fn(&RunSummary) -> f64| per_run.iter().map(f).collect::<Vec<_>>();
    let best = pick(|r| r.best_fitness);
    let archive = spec
        .algorithm
        .has_archive()
        .then(|| Stat::of(&pick(|r| r.archive_size.unwrap_or(0) as f64)));
    CampaignSummary {
        algorithm: spec.algorithm,
        runs: spec.runs,
        base_seed: spec.base_seed,
        config: spec.search.clone(),
        archive,
        best_fitness: Stat::of(&best),
        max_best_fitness: best.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        final_avg_fitness: Stat::of(&pick(|r| r.final_avg_fitness)),
        final_population_best: Stat::of(&pick(|r| r.final_population_best)),
        degenerate: spec.runs == 1,
        per_run,
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, ExperimentError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_generations(path: &Path, stats: &[GenerationStats]) -> Result<(), ExperimentError> {
    let mut w = csv_writer(path)?;
    for row in stats {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Mean over runs of each generation's row; runs are truncated to the
/// shortest.
fn mean_rows<'a>(
    runs: &[&'a [GenerationStats]],
    f: impl Fn(&'a GenerationStats) -> f64,
) -> Vec<f64> {
    let len = runs.iter().map(|r| r.len()).min().unwrap_or(0);
    (0..len)
        .map(|g| runs.iter().map(|r| f(&r[g])).sum::<f64>() / runs.len() as f64)
        .collect()
}

/// Writes `generation, avg_fitness, best_fitness, population_best`, each the
/// mean over runs.
pub fn write_fitness_curve(
    path: &Path,
    runs: &[&[GenerationStats]],
) -> Result<(), ExperimentError> {
    if runs.is_empty() {
        return Err(ExperimentError::Invalid("no runs to aggregate".into()));
    }
    let avg = mean_rows(runs, |s| s.avg_fitness);
    let best = mean_rows(runs, |s| s.best_fitness);
    let pop_best = mean_rows(runs, |s| s.population_best);
    let mut w = csv_writer(path)?;
    w.write_record([
        "generation",
        "avg_fitness",
        "best_fitness",
        "population_best",
    ])
    .map_err(csv_err(path))?;
    for g in 0..avg.len() {
        w.write_record([
            g.to_string(),
            avg[g].to_string(),
            best[g].to_string(),
            pop_best[g].to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes `generation, archive_size, novel_added`, each the mean over runs.
pub fn write_novelty_curve(
    path: &Path,
    runs: &[&[GenerationStats]],
) -> Result<(), ExperimentError> {
    if runs.is_empty() {
        return Err(ExperimentError::Invalid("no runs to aggregate".into()));
    }
    let size = mean_rows(runs, |s| s.archive_size as f64);
    let added = mean_rows(runs, |s| s.novel_added as f64);
    let mut w = csv_writer(path)?;
    w.write_record(["generation", "archive_size", "novel_added"])
        .map_err(csv_err(path))?;
    for g in 0..size.len() {
        w.write_record([g.to_string(), size[g].to_string(), added[g].to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_trace(
    path: &Path,
    best: &Individual,
    sim: &SimConfig,
    catalog: &Catalog,
) -> Result<(), ExperimentError> {
    let (result, ticks) = simulate_traced(&best.house, sim, catalog);
    #[derive(Serialize)]
    struct Trace<'a> {
        fitness: f64,
        died: bool,
        death_tick: Option<u32>,
        ticks: &'a [TickRecord],
    }
    write_json(
        path,
        &Trace {
            fitness: result.fitness,
            died: result.died,
            death_tick: result.death_tick,
            ticks: &ticks,
        },
    )
}

/// Reads generations.csv rows back.
pub fn read_generations(path: &Path) -> Result<Vec<GenerationStats>, ExperimentError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<Result<Vec<_>, _>>()
        .map_err(csv_err(path))
}

/// Parses either a single house document or an array of them (such as an
/// archive export). Each house comes with a display label; array elements
/// are labelled by index.
pub fn parse_houses(text: &str) -> Result<Vec<(String, House)>, HouseError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| HouseError::Parse(e.to_string()))?;
    let (docs, many) = match value {
        serde_json::Value::Array(items) => (items, true),
        other => (vec![other], false),
    };
    docs.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let fitness = v.get("fitness").and_then(serde_json::Value::as_f64);
            let doc: HouseDocument = serde_json::from_value(v)
                .map_err(|e| HouseError::Parse(format!("house {i}: {e}")))?;
            let house = House::from_document(&doc)?;
            let mut label = if many {
                format!("house {i}")
            } else {
                "house".to_string()
            };
            if let Some(f) = fitness {
                label.push_str(&format!(" (fitness {f:.4})"));
            }
            Ok((label, house))
        })
        .collect()
}
