//! Experiment orchestration: repetitions over (algorithm, objective) cells,
//! probes, and result persistence.

mod persist;
mod probes;

pub use persist::{load_results, sanitize, write_results, CellSummary, LoadedResults, Manifest, ManifestCell};
pub(crate) use persist::snapshot_csv as persist_snapshot_csv;
pub use probes::{
    bounce_probe, dynamics_probe, shift_invariance_probe, BounceReport, DynamicsReport, ShiftProbeReport,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run, Algorithm, AlgorithmId};
use crate::benchmarks::{resolve, Counted, Objective, ObjectiveSpec, Shift};
use crate::error::{Error, Result};
use crate::stats::{abf, ComparisonReport, SampleSet};
use crate::trace::RunTrace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveEntry {
    pub name: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub shift: Shift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    pub objectives: Vec<ObjectiveEntry>,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub snapshot: bool,
    /// Bonferroni factor; defaults to the number of algorithm pairs.
    #[serde(default)]
    pub correction: Option<usize>,
}

fn default_dim() -> usize {
    2
}
fn default_algorithms() -> Vec<String> {
    ["rs", "sso", "sso-code", "asso"].map(String::from).to_vec()
}
fn default_population() -> usize {
    50
}
fn default_iterations() -> usize {
    100
}
fn default_repetitions() -> usize {
    30
}

impl ExperimentConfig {
    /// Defaults (N = 50, L = 100, R = 30, seed 0) over the given cells.
    pub fn new(algorithms: &[&str], objectives: Vec<ObjectiveEntry>) -> Self {
        ExperimentConfig {
            algorithms: algorithms.iter().map(|s| s.to_string()).collect(),
            objectives,
            population_size: default_population(),
            iterations: default_iterations(),
            repetitions: default_repetitions(),
            base_seed: 0,
            snapshot: false,
            correction: None,
        }
    }

    pub fn seed_for(&self, repetition: usize) -> u64 {
        self.base_seed.wrapping_add(repetition as u64)
    }

    /// Resolves every id; the error names the first offending one.
    pub fn resolve(&self) -> Result<(Vec<Algorithm>, Vec<ObjectiveSpec>)> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.algorithms.is_empty() || self.objectives.is_empty() {
            return Err(Error::config("need at least one algorithm and one objective"));
        }
        let algorithms = self
            .algorithms
            .iter()
            .map(|id| {
                let alg = Algorithm::from_id(id, self.population_size, self.iterations)?;
                alg.config.validate().map_err(|e| Error::config(format!("algorithm \"{id}\": {e}")))?;
                Ok(alg)
            })
            .collect::<Result<Vec<_>>>()?;
        let objectives = self
            .objectives
            .iter()
            .map(|o| {
                resolve(&o.name, o.dim, &o.shift).map_err(|e| match e {
                    Error::Config(_) => e,
                    other => Error::config(format!("objective \"{}\": {other}", o.name)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ids: Vec<&str> = objectives.iter().map(|o| o.name()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config(format!("objective \"{}\" listed twice", w[0])));
        }
        Ok((algorithms, objectives))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub algorithm: String,
    pub objective: String,
    pub traces: Vec<RunTrace>,
    pub abf: Vec<f64>,
    /// Objective calls made by each repetition.
    pub evaluations: Vec<u64>,
}

impl CellResult {
    pub fn final_bests(&self) -> Vec<f64> {
        self.traces.iter().map(RunTrace::final_fitness).collect()
    }

    pub fn samples(&self) -> Result<SampleSet> {
        SampleSet::new(self.algorithm.clone(), self.final_bests())
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.traces.iter().map(|t| t.seed).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub config: ExperimentConfig,
    /// Objective-major, algorithms in config order.
    pub cells: Vec<CellResult>,
}

impl ResultSet {
    pub fn cell(&self, algorithm: &str, objective: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.algorithm == algorithm && c.objective == objective)
    }

    pub fn objectives(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.objective) {
                out.push(c.objective.clone());
            }
        }
        out
    }

    pub fn trace_count(&self) -> usize {
        self.cells.iter().map(|c| c.traces.len()).sum()
    }

    /// Pairwise comparison per objective; needs at least 2 repetitions.
    pub fn reports(&self) -> Result<Vec<ComparisonReport>> {
        self.objectives()
            .into_iter()
            .map(|obj| {
                let samples = self
                    .cells
                    .iter()
                    .filter(|c| c.objective == obj)
                    .map(CellResult::samples)
                    .collect::<Result<Vec<_>>>()?;
                Ok(ComparisonReport::build(obj, &samples, self.config.correction))
            })
            .collect()
    }
}

fn run_one(alg: &Algorithm, objective: &ObjectiveSpec, seed: u64, record: bool) -> Result<(RunTrace, u64)> {
    let mut counted = Counted::new(objective.clone());
    let trace = run(alg, &mut counted, seed, record)?;
    let expected = alg.config.evaluation_budget();
    if counted.count() != expected {
        return Err(Error::Data(format!(
            "{} on {} used {} evaluations, budget is {expected}",
            alg.label,
            counted.id(),
            counted.count()
        )));
    }
    Ok((trace, counted.count()))
}

/// Runs every (algorithm, objective, repetition) with seed
/// `base_seed + repetition`. Repetitions run in parallel; the assembled
/// result does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultSet> {
    let (algorithms, objectives) = cfg.resolve()?;
    let jobs: Vec<(usize, usize, usize)> = (0..objectives.len())
        .flat_map(|o| (0..algorithms.len()).map(move |a| (o, a)))
        .flat_map(|(o, a)| (0..cfg.repetitions).map(move |r| (o, a, r)))
        .collect();
    let outputs = jobs
        .par_iter()
        .map(|&(o, a, r)| run_one(&algorithms[a], &objectives[o], cfg.seed_for(r), cfg.snapshot))
        .collect::<Result<Vec<_>>>()?;

    let mut outputs = outputs.into_iter();
    let mut cells = Vec::with_capacity(objectives.len() * algorithms.len());
    for obj in &objectives {
        for alg in &algorithms {
            let (traces, evaluations): (Vec<_>, Vec<_>) = outputs.by_ref().take(cfg.repetitions).unzip();
            cells.push(CellResult {
                algorithm: alg.label.clone(),
                objective: obj.name().to_string(),
                abf: abf(&traces)?,
                traces,
                evaluations,
            });
        }
    }
    Ok(ResultSet { config: cfg.clone(), cells })
}

/// Re-runs one repetition of one cell from the seed schedule.
pub fn rerun_cell(cfg: &ExperimentConfig, algorithm: &str, objective: &str, repetition: usize) -> Result<RunTrace> {
    let (algorithms, objectives) = cfg.resolve()?;
    let alg = algorithms
        .iter()
        .find(|a| a.label == algorithm)
        .ok_or_else(|| Error::config(format!("algorithm \"{algorithm}\" not in experiment")))?;
    let obj = objectives
        .iter()
        .find(|o| o.name() == objective)
        .ok_or_else(|| Error::config(format!("objective \"{objective}\" not in experiment")))?;
    Ok(run_one(alg, obj, cfg.seed_for(repetition), cfg.snapshot)?.0)
}

/// Shorthand used by the probes and the CLI.
pub(crate) fn preset_for(id: &str, population_size: usize, iterations: usize) -> Result<(AlgorithmId, Algorithm)> {
    let parsed: AlgorithmId = id.parse()?;
    Ok((parsed, Algorithm::preset(parsed, population_size, iterations)))
}
