//! Box-bounded search spaces, candidates and the ordered salp chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Axis-aligned box `[lower, upper]` with `lower[j] < upper[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds")]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawBounds> for Bounds {
    type Error = Error;
    fn try_from(raw: RawBounds) -> Result<Self> {
        Bounds::new(raw.lower, raw.upper)
    }
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::config("bounds need at least one dimension"));
        }
        Error::check_dim(lower.len(), upper.len())?;
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::config(format!(
                    "bounds dimension {j}: need finite lower < upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// The same interval `[lower, upper]` on every one of `dim` axes.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Bounds::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.lower).zip(&self.upper).all(|((v, l), u)| l <= v && v <= u)
    }

    /// `lower == -upper` on every axis.
    pub fn is_symmetric(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| *l == -*u)
    }

    /// Translate the box by `shift`, coordinate-wise.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        Error::check_dim(self.dim(), shift.len())?;
        Bounds::new(
            self.lower.iter().zip(shift).map(|(l, s)| l + s).collect(),
            self.upper.iter().zip(shift).map(|(u, s)| u + s).collect(),
        )
    }
}

/// Coordinate-wise projection onto the box.
pub fn clip(position: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    Error::check_dim(bounds.dim(), position.len())?;
    let mut out = position.to_vec();
    clip_in_place(&mut out, bounds);
    Ok(out)
}

pub(crate) fn clip_in_place(position: &mut [f64], bounds: &Bounds) {
    for ((x, l), u) in position.iter_mut().zip(&bounds.lower).zip(&bounds.upper) {
        *x = x.max(*l).min(*u);
    }
}

/// A position and its fitness; `None` until evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub fitness: Option<f64>,
}

impl Candidate {
    pub fn unevaluated(position: Vec<f64>) -> Self {
        Candidate { position, fitness: None }
    }

    pub fn evaluated(position: Vec<f64>, fitness: f64) -> Self {
        Candidate { position, fitness: Some(fitness) }
    }

    /// Strictly better than `other`. Unevaluated candidates are never better,
    /// and anything evaluated beats an unevaluated one.
    pub fn improves_on(&self, other: Option<&Candidate>) -> bool {
        match (self.fitness, other.and_then(|o| o.fitness)) {
            (Some(_), None) => true,
            (Some(a), Some(b)) => a < b,
            (None, _) => false,
        }
    }
}

/// Ordered population. Index 0 heads the chain; `food` is the best candidate
/// seen so far (minimization).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalpChain {
    pub members: Vec<Candidate>,
    pub food: Option<Candidate>,
}

impl SalpChain {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|c| c.position.clone()).collect()
    }

    /// Replace `food` with the first strictly better evaluated member, if any.
    pub fn update_food(&mut self) {
        let mut best: Option<&Candidate> = None;
        for m in &self.members {
            if m.improves_on(best) {
                best = Some(m);
            }
        }
        if let Some(b) = best {
            if b.improves_on(self.food.as_ref()) {
                self.food = Some(b.clone());
            }
        }
    }
}

/// Draws `n` positions uniformly in the box. Member-major, dimension-minor:
/// exactly `n * D` uniform draws.
pub fn uniform_init(bounds: &Bounds, n: usize, rng: &mut RngStream) -> Result<SalpChain> {
    if n < 2 {
        return Err(Error::config(format!("population size must be at least 2, got {n}")));
    }
    let members = (0..n)
        .map(|_| Candidate::unevaluated(uniform_point(bounds, rng)))
        .collect();
    Ok(SalpChain { members, food: None })
}

pub(crate) fn uniform_point(bounds: &Bounds, rng: &mut RngStream) -> Vec<f64> {
    (0..bounds.dim())
        .map(|j| bounds.lower[j] + rng.uniform() * bounds.width(j))
        // l + u*w can round up to the upper edge for large offsets
        .zip(&bounds.upper)
        .map(|(x, u)| x.min(*u))
        .collect()
}
