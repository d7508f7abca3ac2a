//! DE/rand/1/bin with clipping repair and greedy one-to-one selection.

use serde::{Deserialize, Serialize};

use crate::benchmarks::Objective;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{clip_in_place, Candidate, SalpChain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeConfig {
    /// Differential weight F.
    #[serde(default = "default_weight")]
    pub weight: f64,
    /// Binomial crossover rate CR.
    #[serde(default = "default_crossover")]
    pub crossover_rate: f64,
    pub population_size: usize,
    pub iterations: usize,
}

fn default_weight() -> f64 {
    0.3
}

fn default_crossover() -> f64 {
    0.5
}

impl DeConfig {
    pub fn new(population_size: usize, iterations: usize) -> Self {
        DeConfig { weight: default_weight(), crossover_rate: default_crossover(), population_size, iterations }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight > 0.0 && self.weight <= 2.0) {
            return Err(Error::config(format!("weight must lie in (0, 2], got {}", self.weight)));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::config(format!(
                "crossover_rate must lie in [0, 1], got {}",
                self.crossover_rate
            )));
        }
        if self.population_size < 4 {
            return Err(Error::config(format!(
                "DE needs population_size >= 4, got {}",
                self.population_size
            )));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations must be at least 1"));
        }
        Ok(())
    }
}

/// `base + weight * (a - b)`.
pub fn mutant(base: &[f64], a: &[f64], b: &[f64], weight: f64) -> Vec<f64> {
    base.iter().zip(a).zip(b).map(|((x, p), q)| x + weight * (p - q)).collect()
}

/// Binomial crossover. Draws `j_rand` first, then one uniform per axis
/// (including `j_rand`, so the draw count does not depend on CR).
pub fn binomial_crossover(target: &[f64], mutant: &[f64], crossover_rate: f64, rng: &mut RngStream) -> Vec<f64> {
    let j_rand = rng.index(target.len());
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (t, m))| {
            let u = rng.uniform();
            if u < crossover_rate || j == j_rand {
                *m
            } else {
                *t
            }
        })
        .collect()
}

/// Three mutually distinct indices in `0..n`, all different from `target`,
/// by rejection.
fn pick_three(n: usize, target: usize, rng: &mut RngStream) -> [usize; 3] {
    let mut out = [usize::MAX; 3];
    for k in 0..3 {
        out[k] = loop {
            let r = rng.index(n);
            if r != target && !out[..k].contains(&r) {
                break r;
            }
        };
    }
    out
}

/// One generation. Trials are built from the current population, then each
/// replaces its target iff its fitness is no worse.
pub fn de_step<O: Objective + ?Sized>(
    population: &mut SalpChain,
    objective: &mut O,
    cfg: &DeConfig,
    rng: &mut RngStream,
) -> Result<()> {
    let n = population.len();
    if n < 4 {
        return Err(Error::config(format!("DE needs at least 4 members, got {n}")));
    }
    let bounds = objective.bounds().clone();
    let trials: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let [r1, r2, r3] = pick_three(n, i, rng);
            let m = &population.members;
            let v = mutant(&m[r1].position, &m[r2].position, &m[r3].position, cfg.weight);
            let mut trial = binomial_crossover(&m[i].position, &v, cfg.crossover_rate, rng);
            clip_in_place(&mut trial, &bounds);
            trial
        })
        .collect();
    for (member, trial) in population.members.iter_mut().zip(trials) {
        let f = objective.evaluate(&trial);
        let keep = match member.fitness {
            Some(current) => f <= current,
            None => true,
        };
        if keep {
            *member = Candidate::evaluated(trial, f);
        }
    }
    population.update_food();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::lookup;
    use crate::space::uniform_init;
    use proptest::prelude::*;

    #[test]
    fn mutant_example() {
        let v = mutant(&[1.0, 1.0], &[2.0, 2.0], &[0.0, 0.0], 0.3);
        assert!((v[0] - 1.6).abs() < 1e-15 && (v[1] - 1.6).abs() < 1e-15);
    }

    #[test]
    fn crossover_rate_zero_keeps_all_but_j_rand() {
        let mut rng = RngStream::new(3);
        let t = [0.0; 6];
        let m = [1.0; 6];
        for _ in 0..50 {
            let trial = binomial_crossover(&t, &m, 0.0, &mut rng);
            assert_eq!(trial.iter().filter(|v| **v == 1.0).count(), 1);
        }
    }

    #[test]
    fn crossover_rate_one_takes_mutant() {
        let mut rng = RngStream::new(3);
        let t = [0.0; 6];
        let m = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(binomial_crossover(&t, &m, 1.0, &mut rng), m.to_vec());
    }

    #[test]
    fn pick_three_distinct() {
        let mut rng = RngStream::new(8);
        for _ in 0..1000 {
            let [a, b, c] = pick_three(4, 2, &mut rng);
            assert!(a != b && b != c && a != c);
            assert!(![a, b, c].contains(&2));
        }
    }

    #[test]
    fn rejects_small_population_and_bad_params() {
        let mut obj = lookup("sphere", 2).unwrap();
        let mut rng = RngStream::new(0);
        let mut pop = uniform_init(obj.bounds(), 3, &mut rng).unwrap();
        assert!(de_step(&mut pop, &mut obj, &DeConfig::new(3, 10), &mut rng).is_err());
        assert!(DeConfig::new(3, 10).validate().is_err());
        assert!(DeConfig { weight: 0.0, ..DeConfig::new(10, 10) }.validate().is_err());
        assert!(DeConfig { weight: 2.5, ..DeConfig::new(10, 10) }.validate().is_err());
        assert!(DeConfig { crossover_rate: 1.5, ..DeConfig::new(10, 10) }.validate().is_err());
        assert!(DeConfig::new(10, 10).validate().is_ok());
    }

    #[test]
    fn defaults_from_json() {
        let c: DeConfig = serde_json::from_str(r#"{"population_size": 50, "iterations": 100}"#).unwrap();
        assert_eq!((c.weight, c.crossover_rate), (0.3, 0.5));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn selection_never_worsens_a_member(seed in any::<u64>()) {
            let mut obj = lookup("rastrigin", 3).unwrap();
            let mut rng = RngStream::new(seed);
            let mut pop = uniform_init(obj.bounds(), 8, &mut rng).unwrap();
            for m in &mut pop.members {
                m.fitness = Some(obj.evaluate(&m.position));
            }
            pop.update_food();
            let cfg = DeConfig::new(8, 5);
            for _ in 0..5 {
                let before: Vec<f64> = pop.members.iter().map(|m| m.fitness.unwrap()).collect();
                let best_before = pop.food.as_ref().unwrap().fitness.unwrap();
                de_step(&mut pop, &mut obj, &cfg, &mut rng).unwrap();
                for (m, b) in pop.members.iter().zip(&before) {
                    prop_assert!(m.fitness.unwrap() <= *b);
                    prop_assert!(obj.bounds().contains(&m.position));
                }
                prop_assert!(pop.food.as_ref().unwrap().fitness.unwrap() <= best_before);
            }
        }
    }
}
