//! Memoryless random search: a fresh uniform batch every iteration.

use crate::benchmarks::Objective;
use crate::rng::RngStream;
use crate::space::{uniform_point, Candidate};

/// Draws and evaluates `n` uniform points; returns the batch best unless the
/// incumbent is at least as good.
pub fn random_search_step<O: Objective + ?Sized>(
    best: Option<&Candidate>,
    objective: &mut O,
    n: usize,
    rng: &mut RngStream,
) -> Candidate {
    random_search_batch(best, objective, n, rng).0
}

pub(crate) fn random_search_batch<O: Objective + ?Sized>(
    best: Option<&Candidate>,
    objective: &mut O,
    n: usize,
    rng: &mut RngStream,
) -> (Candidate, Vec<Vec<f64>>) {
    let bounds = objective.bounds().clone();
    let batch: Vec<Vec<f64>> = (0..n).map(|_| uniform_point(&bounds, rng)).collect();
    let mut winner = best.cloned();
    for x in &batch {
        let c = Candidate::evaluated(x.clone(), objective.evaluate(x));
        if c.improves_on(winner.as_ref()) {
            winner = Some(c);
        }
    }
    let winner = winner.expect("random search needs n >= 1 or an incumbent");
    (winner, batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{lookup, Counted, ObjectiveSpec};
    use crate::space::Bounds;

    #[test]
    fn never_worse_than_incumbent() {
        let mut obj = lookup("sphere", 2).unwrap();
        let mut rng = RngStream::new(1);
        let mut best = random_search_step(None, &mut obj, 50, &mut rng);
        for _ in 0..20 {
            let next = random_search_step(Some(&best), &mut obj, 50, &mut rng);
            assert!(next.fitness.unwrap() <= best.fitness.unwrap());
            best = next;
        }
    }

    #[test]
    fn budget_is_n_per_step() {
        let mut obj = Counted::new(lookup("ackley", 2).unwrap());
        let mut rng = RngStream::new(1);
        let mut best = None;
        for _ in 0..7 {
            best = Some(random_search_step(best.as_ref(), &mut obj, 50, &mut rng));
        }
        assert_eq!(obj.count(), 350);
    }

    #[test]
    fn constant_objective() {
        let mut obj = ObjectiveSpec::custom("const", Bounds::uniform(2, -1.0, 1.0).unwrap(), |_| 4.25);
        let c = random_search_step(None, &mut obj, 10, &mut RngStream::new(0));
        assert_eq!(c.fitness, Some(4.25));
    }
}
