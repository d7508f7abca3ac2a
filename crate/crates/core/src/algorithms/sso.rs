//! Salp swarm leader/follower rules and the per-iteration step.

use serde::{Deserialize, Serialize};

use crate::benchmarks::Objective;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{clip_in_place, Bounds, Candidate, SalpChain};

/// How the leader perturbs the food position along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaderRule {
    /// `F ± c1((ub - lb)c2 + lb)`: the step carries the absolute lower bound.
    Published,
    /// `F ± c1 c2 (ub - lb)`: depends on the box width only.
    Amended,
}

/// Which members use the leader rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationSplit {
    /// Only member 0 leads; every other member follows its predecessor.
    PaperChain,
    /// The first ceil(N/2) members lead independently, the rest follow.
    CodeHalves,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsoConfig {
    pub leader_rule: LeaderRule,
    pub population_split: PopulationSplit,
    /// The "+" branch fires when `c3 >= c3_threshold`.
    pub c3_threshold: f64,
    /// When false the leader moves around the origin instead of the food.
    pub food_attraction: bool,
    pub population_size: usize,
    pub iterations: usize,
}

impl SsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.c3_threshold) {
            return Err(Error::config(format!(
                "c3_threshold must lie in [0, 1], got {}",
                self.c3_threshold
            )));
        }
        Ok(())
    }

    /// Number of members updated by the leader rule.
    pub fn leader_count(&self) -> usize {
        match self.population_split {
            PopulationSplit::PaperChain => 1,
            PopulationSplit::CodeHalves => self.population_size.div_ceil(2),
        }
    }

    /// Index of the member that drags the follower sub-chain.
    pub fn head_index(&self) -> usize {
        self.leader_count() - 1
    }
}

/// `2 exp(-(4 l / L)^2)`.
pub fn c1_coefficient(iter: usize, total: usize) -> Result<f64> {
    if total == 0 {
        return Err(Error::config("total iterations must be at least 1"));
    }
    let r = 4.0 * iter as f64 / total as f64;
    Ok(2.0 * (-r * r).exp())
}

/// One coordinate of a leader update given explicit draws.
#[inline]
pub fn leader_move(rule: LeaderRule, food: f64, lower: f64, upper: f64, c1: f64, c2: f64, positive: bool) -> f64 {
    let step = match rule {
        LeaderRule::Published => c1 * ((upper - lower) * c2 + lower),
        LeaderRule::Amended => c1 * c2 * (upper - lower),
    };
    if positive {
        food + step
    } else {
        food - step
    }
}

fn leader_update(
    rule: LeaderRule,
    food: &[f64],
    bounds: &Bounds,
    c1: f64,
    c3_threshold: f64,
    rng: &mut RngStream,
) -> Vec<f64> {
    (0..bounds.dim())
        .map(|j| {
            let c2 = rng.uniform();
            let c3 = rng.uniform();
            leader_move(rule, food[j], bounds.lower()[j], bounds.upper()[j], c1, c2, c3 >= c3_threshold)
        })
        .collect()
}

/// Published leader rule. Draws `c2` then `c3` per axis; the result is not
/// clipped.
pub fn leader_update_published(
    food: &[f64],
    bounds: &Bounds,
    c1: f64,
    c3_threshold: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Error::check_dim(bounds.dim(), food.len())?;
    Ok(leader_update(LeaderRule::Published, food, bounds, c1, c3_threshold, rng))
}

/// Amended leader rule, same draw order and count as the published one.
pub fn leader_update_amended(
    food: &[f64],
    bounds: &Bounds,
    c1: f64,
    c3_threshold: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Error::check_dim(bounds.dim(), food.len())?;
    Ok(leader_update(LeaderRule::Amended, food, bounds, c1, c3_threshold, rng))
}

/// Coordinate-wise midpoint of `current` and `predecessor`.
pub fn follower_update(current: &[f64], predecessor: &[f64]) -> Result<Vec<f64>> {
    Error::check_dim(current.len(), predecessor.len())?;
    Ok(current.iter().zip(predecessor).map(|(a, b)| 0.5 * (a + b)).collect())
}

/// Leader-rule coordinates produced in one step and how many of them landed
/// outside the box before clipping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderStats {
    pub leader_updates: usize,
    pub follower_updates: usize,
    pub coordinates: usize,
    pub outside: usize,
}

impl LeaderStats {
    pub fn merge(&mut self, other: LeaderStats) {
        self.leader_updates += other.leader_updates;
        self.follower_updates += other.follower_updates;
        self.coordinates += other.coordinates;
        self.outside += other.outside;
    }
}

/// Advances the chain by one iteration `iter` in `1..=cfg.iterations`.
///
/// Members are swept in order. Leaders use the food (or the origin when food
/// attraction is off); followers average with their predecessor's position
/// from this same sweep, before any repair. Once the sweep is done every
/// member is clipped and evaluated, then the food is updated once.
pub fn sso_step<O: Objective + ?Sized>(
    chain: &mut SalpChain,
    objective: &mut O,
    cfg: &SsoConfig,
    iter: usize,
    rng: &mut RngStream,
) -> Result<LeaderStats> {
    let bounds = objective.bounds().clone();
    let d = bounds.dim();
    let food = match (&chain.food, cfg.food_attraction) {
        (Some(f), true) => f.position.clone(),
        (Some(_), false) => vec![0.0; d],
        (None, _) => return Err(Error::config("sso_step needs an evaluated chain with food set")),
    };
    if chain.len() < 2 {
        return Err(Error::config("salp chain needs at least 2 members"));
    }
    let c1 = c1_coefficient(iter, cfg.iterations)?;
    let leaders = match cfg.population_split {
        PopulationSplit::PaperChain => 1,
        PopulationSplit::CodeHalves => chain.len().div_ceil(2),
    };

    let mut stats = LeaderStats::default();
    for i in 0..chain.len() {
        let next = if i < leaders {
            let x = leader_update(cfg.leader_rule, &food, &bounds, c1, cfg.c3_threshold, rng);
            stats.leader_updates += 1;
            stats.coordinates += d;
            stats.outside += x
                .iter()
                .zip(bounds.lower().iter().zip(bounds.upper()))
                .filter(|(v, (l, u))| *v < *l || *v > *u)
                .count();
            x
        } else {
            stats.follower_updates += 1;
            follower_update(&chain.members[i].position, &chain.members[i - 1].position)?
        };
        chain.members[i] = Candidate::unevaluated(next);
    }
    for m in &mut chain.members {
        clip_in_place(&mut m.position, &bounds);
        m.fitness = Some(objective.evaluate(&m.position));
    }
    chain.update_food();
    Ok(stats)
}
