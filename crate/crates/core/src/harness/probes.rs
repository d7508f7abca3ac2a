//! Diagnostics: translation invariance, origin collapse under random
//! fitness, and leader bouncing on far-from-origin boxes.

use serde::{Deserialize, Serialize};

use super::preset_for;
use crate::algorithms::{run, run_observed, Algorithm, AlgorithmConfig, LeaderRule, LeaderStats};
use crate::benchmarks::{lookup, Evaluator, Objective, ObjectiveSpec};
use crate::error::{Error, Result};
use crate::space::Bounds;
use crate::trace::Snapshot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftProbeReport {
    pub algorithm: String,
    pub objective: String,
    pub shift: Vec<f64>,
    pub seed: u64,
    /// Largest |shifted - shift - base| over every coordinate of every
    /// recorded position (start included).
    pub max_deviation: f64,
    /// The same maximum per frame; index 0 is the start.
    pub deviation_per_iteration: Vec<f64>,
    pub base_final: f64,
    pub shifted_final: f64,
}

/// Runs `algorithm` on the registered objective and on its translation by
/// `shift` with the same seed, and compares trajectories after undoing the
/// translation.
pub fn shift_invariance_probe(
    algorithm: &str,
    objective: &str,
    dim: usize,
    shift: &[f64],
    seed: u64,
    population_size: usize,
    iterations: usize,
) -> Result<ShiftProbeReport> {
    let (_, alg) = preset_for(algorithm, population_size, iterations)?;
    let mut base = lookup(objective, dim)?;
    let mut moved = base.shifted(shift)?;
    let a = run(&alg, &mut base, seed, true)?;
    let b = run(&alg, &mut moved, seed, true)?;

    let frames = |t: &crate::trace::RunTrace| -> Vec<Snapshot> {
        t.start.iter().cloned().chain(t.snapshots.clone().unwrap_or_default()).collect()
    };
    let deviation_per_iteration: Vec<f64> = frames(&a)
        .iter()
        .zip(frames(&b))
        .map(|(fa, fb)| {
            fa.iter()
                .zip(&fb)
                .flat_map(|(pa, pb)| pa.iter().zip(pb).zip(shift).map(|((x, y), s)| (y - s - x).abs()))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(ShiftProbeReport {
        algorithm: algorithm.to_string(),
        objective: objective.to_string(),
        shift: shift.to_vec(),
        seed,
        max_deviation: deviation_per_iteration.iter().copied().fold(0.0, f64::max),
        deviation_per_iteration,
        base_final: a.final_fitness(),
        shifted_final: b.final_fitness(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub preset: String,
    pub bounds: Bounds,
    pub population_size: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Member that drags the follower sub-chain (highlighted in plots).
    pub head_index: usize,
    /// Positions after initialization, before the first step.
    pub start: Snapshot,
    /// Positions after each of the `iterations` steps.
    pub snapshots: Vec<Snapshot>,
}

impl DynamicsReport {
    pub fn centroid(&self, frame: &Snapshot) -> Vec<f64> {
        let d = self.bounds.dim();
        let mut c = vec![0.0; d];
        for p in frame {
            c.iter_mut().zip(p).for_each(|(a, b)| *a += b);
        }
        c.iter_mut().for_each(|v| *v /= frame.len() as f64);
        c
    }

    pub fn final_frame(&self) -> &Snapshot {
        self.snapshots.last().unwrap_or(&self.start)
    }

    pub fn final_centroid_norm(&self) -> f64 {
        self.centroid(self.final_frame()).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest coordinate magnitude of member 0 in the last frame.
    pub fn final_leader_max_abs(&self) -> f64 {
        self.final_frame()[0].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn final_max_abs(&self) -> f64 {
        self.final_frame().iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Runs a salp preset for `iterations` steps on the random-fitness probe
/// over a box symmetric about the origin, recording every position.
pub fn dynamics_probe(
    preset: &str,
    bounds: &Bounds,
    iterations: usize,
    population_size: usize,
    seed: u64,
) -> Result<DynamicsReport> {
    if !bounds.is_symmetric() {
        return Err(Error::config("dynamics probe needs bounds symmetric about the origin (lower = -upper)"));
    }
    let (id, alg) = preset_for(preset, population_size, iterations)?;
    let AlgorithmConfig::Sso(cfg) = &alg.config else {
        return Err(Error::config(format!("dynamics probe needs a salp preset, got \"{id}\"")));
    };
    let head_index = cfg.head_index();
    let mut objective = ObjectiveSpec::random_fitness(bounds.clone(), seed);
    let trace = run(&alg, &mut objective, seed, true)?;
    Ok(DynamicsReport {
        preset: id.to_string(),
        bounds: bounds.clone(),
        population_size,
        iterations,
        seed,
        head_index,
        start: trace.start.unwrap_or_default(),
        snapshots: trace.snapshots.unwrap_or_default(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BounceReport {
    pub exponent: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub population_size: usize,
    pub seed: u64,
    pub leader_rule: LeaderRule,
    /// Leader-rule coordinates produced over the whole run.
    pub coordinates: usize,
    /// How many of them fell outside the box before clipping.
    pub outside: usize,
    pub fraction: f64,
}

/// Runs the `sso` preset (or its amended-rule twin) on the sphere over
/// `[10^k, 10^k + 1]^2` and counts pre-clip leader coordinates outside the box.
pub fn bounce_probe(
    exponent: f64,
    iterations: usize,
    population_size: usize,
    seed: u64,
    leader_rule: LeaderRule,
) -> Result<BounceReport> {
    if iterations == 0 {
        return Err(Error::config("iterations must be at least 1"));
    }
    let lower = 10f64.powf(exponent);
    let upper = lower + 1.0;
    let bounds = Bounds::uniform(2, lower, upper)?;
    let mut objective = ObjectiveSpec::new("sphere", bounds, Evaluator::Sphere)?;
    let (_, mut alg) = preset_for("sso", population_size, iterations)?;
    if let AlgorithmConfig::Sso(c) = &mut alg.config {
        c.leader_rule = leader_rule;
    }
    if leader_rule == LeaderRule::Amended {
        alg = Algorithm { label: "sso-amended-rule".into(), ..alg };
    }
    let mut total = LeaderStats::default();
    run_observed(&alg, &mut objective, seed, false, |s| total.merge(s))?;
    debug_assert_eq!(objective.bounds().lower()[0], lower);
    Ok(BounceReport {
        exponent,
        lower,
        upper,
        iterations,
        population_size,
        seed,
        leader_rule,
        coordinates: total.coordinates,
        outside: total.outside,
        fraction: total.outside as f64 / total.coordinates as f64,
    })
}
