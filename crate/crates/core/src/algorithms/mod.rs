//! Optimizers behind a common `run` entry point.

pub mod de;
pub mod random_search;
pub mod sso;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use de::{binomial_crossover, de_step, mutant, DeConfig};
pub use random_search::random_search_step;
pub use sso::{
    c1_coefficient, follower_update, leader_move, leader_update_amended, leader_update_published, sso_step,
    LeaderRule, LeaderStats, PopulationSplit, SsoConfig,
};

use crate::benchmarks::Objective;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::uniform_init;
use crate::trace::RunTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Sso,
    SsoStrict,
    SsoCode,
    Asso,
    SsoNofood,
    SsoCodeNofood,
    RandomSearch,
    De,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        AlgorithmId::Sso,
        AlgorithmId::SsoStrict,
        AlgorithmId::SsoCode,
        AlgorithmId::Asso,
        AlgorithmId::SsoNofood,
        AlgorithmId::SsoCodeNofood,
        AlgorithmId::RandomSearch,
        AlgorithmId::De,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Sso => "sso",
            AlgorithmId::SsoStrict => "sso-strict",
            AlgorithmId::SsoCode => "sso-code",
            AlgorithmId::Asso => "asso",
            AlgorithmId::SsoNofood => "sso-nofood",
            AlgorithmId::SsoCodeNofood => "sso-code-nofood",
            AlgorithmId::RandomSearch => "rs",
            AlgorithmId::De => "de",
        }
    }

    pub fn is_salp(self) -> bool {
        !matches!(self, AlgorithmId::RandomSearch | AlgorithmId::De)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm id \"{s}\"")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RsConfig {
    pub population_size: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmConfig {
    Sso(SsoConfig),
    RandomSearch(RsConfig),
    De(DeConfig),
}

impl AlgorithmConfig {
    pub fn preset(id: AlgorithmId, population_size: usize, iterations: usize) -> Self {
        use LeaderRule::*;
        use PopulationSplit::*;
        let sso = |leader_rule, population_split, c3_threshold, food_attraction| {
            AlgorithmConfig::Sso(SsoConfig {
                leader_rule,
                population_split,
                c3_threshold,
                food_attraction,
                population_size,
                iterations,
            })
        };
        match id {
            AlgorithmId::Sso => sso(Published, PaperChain, 0.5, true),
            AlgorithmId::SsoStrict => sso(Published, PaperChain, 0.0, true),
            AlgorithmId::SsoCode => sso(Published, CodeHalves, 0.5, true),
            AlgorithmId::Asso => sso(Amended, CodeHalves, 0.5, true),
            AlgorithmId::SsoNofood => sso(Published, PaperChain, 0.5, false),
            AlgorithmId::SsoCodeNofood => sso(Published, CodeHalves, 0.5, false),
            AlgorithmId::RandomSearch => AlgorithmConfig::RandomSearch(RsConfig { population_size, iterations }),
            AlgorithmId::De => AlgorithmConfig::De(DeConfig::new(population_size, iterations)),
        }
    }

    pub fn population_size(&self) -> usize {
        match self {
            AlgorithmConfig::Sso(c) => c.population_size,
            AlgorithmConfig::RandomSearch(c) => c.population_size,
            AlgorithmConfig::De(c) => c.population_size,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            AlgorithmConfig::Sso(c) => c.iterations,
            AlgorithmConfig::RandomSearch(c) => c.iterations,
            AlgorithmConfig::De(c) => c.iterations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmConfig::Sso(c) => c.validate(),
            AlgorithmConfig::De(c) => c.validate(),
            AlgorithmConfig::RandomSearch(c) => {
                if c.population_size == 0 || c.iterations == 0 {
                    Err(Error::config("random search needs population_size >= 1 and iterations >= 1"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Objective calls made by one run.
    pub fn evaluation_budget(&self) -> u64 {
        let (n, l) = (self.population_size() as u64, self.iterations() as u64);
        match self {
            AlgorithmConfig::RandomSearch(_) => n * l,
            _ => n * (l + 1),
        }
    }
}

/// A labelled configuration; the label is what traces record as the
/// algorithm id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Algorithm {
    pub label: String,
    pub config: AlgorithmConfig,
}

impl Algorithm {
    pub fn preset(id: AlgorithmId, population_size: usize, iterations: usize) -> Self {
        Algorithm { label: id.to_string(), config: AlgorithmConfig::preset(id, population_size, iterations) }
    }

    /// Preset lookup by id string.
    pub fn from_id(id: &str, population_size: usize, iterations: usize) -> Result<Self> {
        Ok(Self::preset(id.parse()?, population_size, iterations))
    }
}

/// Initializes, evaluates, then performs `L` steps, recording best-so-far
/// fitness after every step. With `record` set, member positions are kept
/// after initialization (`start`) and after every step.
///
/// Random search skips the initial sweep: its first batch is step 1.
pub fn run<O: Objective + ?Sized>(
    algorithm: &Algorithm,
    objective: &mut O,
    seed: u64,
    record: bool,
) -> Result<RunTrace> {
    run_observed(algorithm, objective, seed, record, |_| {})
}

/// [`run`] that also reports per-step leader statistics for salp variants.
pub fn run_observed<O, F>(
    algorithm: &Algorithm,
    objective: &mut O,
    seed: u64,
    record: bool,
    mut observe: F,
) -> Result<RunTrace>
where
    O: Objective + ?Sized,
    F: FnMut(LeaderStats),
{
    let cfg = &algorithm.config;
    cfg.validate()?;
    objective.reseed(seed);
    let mut rng = RngStream::new(seed);
    let iterations = cfg.iterations();
    let n = cfg.population_size();
    let mut best_per_iteration = Vec::with_capacity(iterations);
    let mut snapshots = record.then(|| Vec::with_capacity(iterations));

    let (final_best, start) = match cfg {
        AlgorithmConfig::RandomSearch(_) => {
            let mut best = None;
            for _ in 0..iterations {
                let (b, batch) = random_search::random_search_batch(best.as_ref(), objective, n, &mut rng);
                best_per_iteration.push(b.fitness.expect("evaluated"));
                if let Some(s) = snapshots.as_mut() {
                    s.push(batch);
                }
                best = Some(b);
            }
            (best.expect("iterations >= 1"), None)
        }
        AlgorithmConfig::Sso(_) | AlgorithmConfig::De(_) => {
            let mut chain = uniform_init(objective.bounds(), n, &mut rng)?;
            for m in &mut chain.members {
                m.fitness = Some(objective.evaluate(&m.position));
            }
            chain.update_food();
            let start = record.then(|| chain.positions());
            for iter in 1..=iterations {
                match cfg {
                    AlgorithmConfig::Sso(c) => observe(sso_step(&mut chain, objective, c, iter, &mut rng)?),
                    AlgorithmConfig::De(c) => de_step(&mut chain, objective, c, &mut rng)?,
                    AlgorithmConfig::RandomSearch(_) => unreachable!(),
                }
                let food = chain.food.as_ref().expect("food set after evaluation");
                best_per_iteration.push(food.fitness.expect("food is evaluated"));
                if let Some(s) = snapshots.as_mut() {
                    s.push(chain.positions());
                }
            }
            (chain.food.expect("food set after evaluation"), start)
        }
    };

    Ok(RunTrace {
        algorithm_id: algorithm.label.clone(),
        objective_id: objective.id().to_string(),
        seed,
        best_per_iteration,
        final_best,
        start,
        snapshots,
    })
}
