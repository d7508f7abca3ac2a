//! On-disk layout of a result set:
//!
//! ```text
//! manifest.json                 config, seed schedule, generator, cell index
//! traces/<alg>__<obj>.csv       repetition,seed,iteration,best_fitness
//! abf/<alg>__<obj>.csv          iteration,abf
//! report_<obj>.json             pairwise comparison for one objective
//! snapshots/<alg>__<obj>__r<k>.csv   only when snapshots were recorded
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CellResult, ExperimentConfig, ResultSet};
use crate::error::{Error, Result};
use crate::rng::GENERATOR_NAME;
use crate::stats::{abf_curves, ComparisonReport, SampleSet};

pub const SEED_SCHEDULE: &str = "seed = base_seed + repetition";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestCell {
    pub algorithm: String,
    pub objective: String,
    pub seeds: Vec<u64>,
    pub evaluations_per_trace: u64,
    pub traces_file: String,
    pub abf_file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub generator: String,
    pub seed_schedule: String,
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub cells: Vec<ManifestCell>,
    #[serde(default)]
    pub files: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Manifest {
            command: command.to_string(),
            generator: GENERATOR_NAME.to_string(),
            seed_schedule: SEED_SCHEDULE.to_string(),
            parameters,
            cells: Vec::new(),
            files: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// File-name-safe form of an id.
pub fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '.') { c } else { '_' })
        .collect()
}

fn cell_stem(algorithm: &str, objective: &str) -> String {
    format!("{}__{}", sanitize(algorithm), sanitize(objective))
}

/// Final-best curves of one cell, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub algorithm: String,
    pub objective: String,
    pub seeds: Vec<u64>,
    pub curves: Vec<Vec<f64>>,
}

impl CellSummary {
    pub fn final_bests(&self) -> Vec<f64> {
        self.curves.iter().filter_map(|c| c.last().copied()).collect()
    }

    pub fn abf(&self) -> Result<Vec<f64>> {
        abf_curves(self.curves.iter().map(Vec::as_slice))
    }
}

impl From<&CellResult> for CellSummary {
    fn from(c: &CellResult) -> Self {
        CellSummary {
            algorithm: c.algorithm.clone(),
            objective: c.objective.clone(),
            seeds: c.seeds(),
            curves: c.traces.iter().map(|t| t.best_per_iteration.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadedResults {
    pub manifest: Manifest,
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
}

impl LoadedResults {
    pub fn objectives(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.objective) {
                out.push(c.objective.clone());
            }
        }
        out
    }

    pub fn reports(&self) -> Result<Vec<ComparisonReport>> {
        reports_from(&self.cells, self.config.correction)
    }
}

pub(crate) fn reports_from(cells: &[CellSummary], correction: Option<usize>) -> Result<Vec<ComparisonReport>> {
    let mut objectives: Vec<&str> = Vec::new();
    for c in cells {
        if !objectives.contains(&c.objective.as_str()) {
            objectives.push(&c.objective);
        }
    }
    objectives
        .into_iter()
        .map(|obj| {
            let samples = cells
                .iter()
                .filter(|c| c.objective == obj)
                .map(|c| SampleSet::new(c.algorithm.clone(), c.final_bests()))
                .collect::<Result<Vec<_>>>()?;
            Ok(ComparisonReport::build(obj, &samples, correction))
        })
        .collect()
}

/// Writes the result directory; the manifest is written last.
pub fn write_results(results: &ResultSet, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir.join("traces"))?;
    fs::create_dir_all(dir.join("abf"))?;
    let mut manifest = Manifest::new("run", serde_json::to_value(&results.config)?);
    manifest.notes.push(format!(
        "population_size = {} for every cell; iterations are numbered 1..={} and exclude the initial evaluation sweep",
        results.config.population_size, results.config.iterations
    ));

    for cell in &results.cells {
        let stem = cell_stem(&cell.algorithm, &cell.objective);
        let traces_file = format!("traces/{stem}.csv");
        let abf_file = format!("abf/{stem}.csv");

        let mut text = String::from("repetition,seed,iteration,best_fitness\n");
        for (r, t) in cell.traces.iter().enumerate() {
            for (i, f) in t.best_per_iteration.iter().enumerate() {
                writeln!(text, "{r},{},{},{f}", t.seed, i + 1).expect("string write");
            }
        }
        fs::write(dir.join(&traces_file), text)?;

        let mut text = String::from("iteration,abf\n");
        for (i, v) in cell.abf.iter().enumerate() {
            writeln!(text, "{},{v}", i + 1).expect("string write");
        }
        fs::write(dir.join(&abf_file), text)?;

        if results.config.snapshot {
            fs::create_dir_all(dir.join("snapshots"))?;
            for (r, t) in cell.traces.iter().enumerate() {
                let file = format!("snapshots/{stem}__r{r}.csv");
                fs::write(dir.join(&file), snapshot_csv(t.start.as_ref(), t.snapshots.as_deref().unwrap_or(&[])))?;
                manifest.files.push(file);
            }
        }

        manifest.cells.push(ManifestCell {
            algorithm: cell.algorithm.clone(),
            objective: cell.objective.clone(),
            seeds: cell.seeds(),
            evaluations_per_trace: cell.evaluations.first().copied().unwrap_or(0),
            traces_file,
            abf_file,
        });
    }

    if results.config.repetitions >= 2 {
        for report in results.reports()? {
            let file = format!("report_{}.json", sanitize(&report.objective));
            fs::write(dir.join(&file), serde_json::to_string_pretty(&report)? + "\n")?;
            manifest.files.push(file);
        }
    }
    manifest.write(dir)?;
    Ok(manifest)
}

/// `iteration,member,x0,..` with iteration 0 for the start positions.
pub(crate) fn snapshot_csv(start: Option<&Vec<Vec<f64>>>, snapshots: &[Vec<Vec<f64>>]) -> String {
    let dim = start
        .and_then(|s| s.first())
        .or_else(|| snapshots.first().and_then(|s| s.first()))
        .map_or(0, Vec::len);
    let mut text = String::from("iteration,member");
    for j in 0..dim {
        write!(text, ",x{j}").expect("string write");
    }
    text.push('\n');
    let frames = start.map(|s| (0, s)).into_iter().chain(snapshots.iter().enumerate().map(|(i, s)| (i + 1, s)));
    for (it, frame) in frames {
        for (m, pos) in frame.iter().enumerate() {
            write!(text, "{it},{m}").expect("string write");
            for v in pos {
                write!(text, ",{v}").expect("string write");
            }
            text.push('\n');
        }
    }
    text
}

fn parse_traces(text: &str, file: &str) -> Result<Vec<Vec<f64>>> {
    let bad = |line: usize, what: &str| Error::Data(format!("{file}:{line}: {what}"));
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("repetition,seed,iteration,best_fitness") {
        return Err(bad(1, "missing header"));
    }
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for (k, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(bad(k + 2, "expected 4 columns"));
        }
        let rep: usize = cols[0].parse().map_err(|_| bad(k + 2, "bad repetition"))?;
        let fit: f64 = cols[3].parse().map_err(|_| bad(k + 2, "bad fitness"))?;
        if rep == curves.len() {
            curves.push(Vec::new());
        } else if rep + 1 != curves.len() {
            return Err(bad(k + 2, "repetitions out of order"));
        }
        curves[rep].push(fit);
    }
    Ok(curves)
}

/// Reads a directory written by [`write_results`].
pub fn load_results(dir: &Path) -> Result<LoadedResults> {
    let text = fs::read_to_string(dir.join("manifest.json"))
        .map_err(|e| Error::Data(format!("{}: {e}", dir.join("manifest.json").display())))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.command != "run" {
        return Err(Error::Data(format!("manifest is from \"{}\", not a run", manifest.command)));
    }
    let config: ExperimentConfig = serde_json::from_value(manifest.parameters.clone())?;
    if manifest.cells.is_empty() {
        return Err(Error::Data("manifest lists no cells".into()));
    }
    let cells = manifest
        .cells
        .iter()
        .map(|c| {
            let path = dir.join(&c.traces_file);
            let text =
                fs::read_to_string(&path).map_err(|e| Error::Data(format!("missing traces {}: {e}", path.display())))?;
            let curves = parse_traces(&text, &c.traces_file)?;
            if curves.len() != c.seeds.len() {
                return Err(Error::Data(format!(
                    "{}: {} repetitions, manifest lists {}",
                    c.traces_file,
                    curves.len(),
                    c.seeds.len()
                )));
            }
            Ok(CellSummary {
                algorithm: c.algorithm.clone(),
                objective: c.objective.clone(),
                seeds: c.seeds.clone(),
                curves,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedResults { manifest, config, cells })
}
