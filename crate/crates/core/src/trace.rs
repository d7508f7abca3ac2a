//! Per-repetition run record.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Candidate;

/// Positions of every member at one iteration.
pub type Snapshot = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm_id: String,
    pub objective_id: String,
    pub seed: u64,
    /// Best-so-far fitness after each of the `L` steps.
    pub best_per_iteration: Vec<f64>,
    pub final_best: Candidate,
    /// Post-initialization positions, recorded together with `snapshots`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Snapshot>,
    /// Member positions after each step (length `L`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<Vec<Snapshot>>,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.best_per_iteration.len()
    }

    pub fn final_fitness(&self) -> f64 {
        self.best_per_iteration.last().copied().or(self.final_best.fitness).unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// `iteration,best_fitness`, iterations numbered from 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iteration,best_fitness")?;
        for (i, f) in self.best_per_iteration.iter().enumerate() {
            writeln!(w, "{},{}", i + 1, f)?;
        }
        Ok(())
    }

    /// Reads the fitness column written by [`RunTrace::write_csv`].
    pub fn read_csv_fitness<R: BufRead>(r: R) -> Result<Vec<f64>> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim) != Some("iteration,best_fitness") {
            return Err(Error::Data("missing trace CSV header".into()));
        }
        let mut out = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            let (it, f) = line
                .split_once(',')
                .ok_or_else(|| Error::Data(format!("trace CSV row {}: expected 2 columns", k + 1)))?;
            if it.trim().parse::<usize>().ok() != Some(k + 1) {
                return Err(Error::Data(format!("trace CSV row {}: bad iteration index", k + 1)));
            }
            out.push(
                f.trim()
                    .parse()
                    .map_err(|_| Error::Data(format!("trace CSV row {}: bad fitness", k + 1)))?,
            );
        }
        Ok(out)
    }
}
