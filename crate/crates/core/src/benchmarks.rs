//! Objective registry: standard test functions, a random-fitness probe and the
//! shift transform.
//!
//! Formulas (all minimized, optimum 0):
//!
//! | name         | f(x)                                                        | default box     |
//! |--------------|-------------------------------------------------------------|-----------------|
//! | `sphere`     | Σ x²                                                        | [-100, 100]^D   |
//! | `rosenbrock` | Σ 100(x_{j+1} - x_j²)² + (1 - x_j)², D ≥ 2                  | [-30, 30]^D     |
//! | `ackley`     | -20 exp(-0.2 √mean(x²)) - exp(mean(cos 2πx)) + 20 + e       | [-100, 100]^D   |
//! | `alpine`     | Σ \|x sin x + 0.1 x\|                                       | [-10, 10]^D     |
//! | `rastrigin`  | 10D + Σ x² - 10 cos 2πx                                     | [-100, 100]^D   |
//! | `random`     | fresh U[0,1) draw, independent of x                         | [-100, 100]^D   |

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::Bounds;

/// Mixed into the run seed to derive the random-fitness stream, so the
/// objective's draws never alias the optimizer's.
const NOISE_SALT: u64 = 0x6a09_e667_f3bc_c908;

pub const NAMES: [&str; 6] = ["sphere", "rosenbrock", "ackley", "alpine", "rastrigin", "random"];

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Dimension { expected: 2, found: x.len() });
    }
    Ok(rosenbrock_unchecked(x))
}

fn rosenbrock_unchecked(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cos = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    let v = -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E;
    // 20 + e - 20 - e leaves a few ulps at the optimum
    v.max(0.0)
}

pub fn alpine(x: &[f64]) -> f64 {
    x.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

pub fn random_fitness(_x: &[f64], rng: &mut RngStream) -> f64 {
    rng.uniform()
}

/// Something an optimizer can minimize over a box.
pub trait Objective {
    fn id(&self) -> &str;
    fn bounds(&self) -> &Bounds;
    fn evaluate(&mut self, x: &[f64]) -> f64;
    /// Re-seed any internal randomness from a run seed. Deterministic
    /// objectives ignore this.
    fn reseed(&mut self, _seed: u64) {}
}

pub type CustomFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Evaluator {
    Sphere,
    Rosenbrock,
    Ackley,
    Alpine,
    Rastrigin,
    RandomFitness(Box<RngStream>),
    /// Extension point for externally defined functions (e.g. loaded from
    /// shift/rotation data).
    Custom(CustomFn),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Sphere => f.write_str("Sphere"),
            Evaluator::Rosenbrock => f.write_str("Rosenbrock"),
            Evaluator::Ackley => f.write_str("Ackley"),
            Evaluator::Alpine => f.write_str("Alpine"),
            Evaluator::Rastrigin => f.write_str("Rastrigin"),
            Evaluator::RandomFitness(r) => write!(f, "RandomFitness(seed={})", r.seed()),
            Evaluator::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A named objective over a (possibly translated) box.
#[derive(Clone, Debug)]
pub struct ObjectiveSpec {
    name: String,
    base_bounds: Bounds,
    shift: Vec<f64>,
    bounds: Bounds,
    evaluator: Evaluator,
    scratch: Vec<f64>,
}

impl ObjectiveSpec {
    pub fn new(name: impl Into<String>, base_bounds: Bounds, evaluator: Evaluator) -> Result<Self> {
        if matches!(evaluator, Evaluator::Rosenbrock) && base_bounds.dim() < 2 {
            return Err(Error::Dimension { expected: 2, found: base_bounds.dim() });
        }
        let d = base_bounds.dim();
        Ok(ObjectiveSpec {
            name: name.into(),
            bounds: base_bounds.clone(),
            base_bounds,
            shift: vec![0.0; d],
            evaluator,
            scratch: vec![0.0; d],
        })
    }

    pub fn custom<F>(name: impl Into<String>, bounds: Bounds, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, bounds, Evaluator::Custom(Arc::new(f))).expect("custom objectives have no dimension floor")
    }

    /// The random-fitness probe over `bounds`, drawing from `seed`.
    pub fn random_fitness(bounds: Bounds, seed: u64) -> Self {
        Self::new("random", bounds, Evaluator::RandomFitness(Box::new(RngStream::new(seed ^ NOISE_SALT))))
            .expect("random fitness has no dimension floor")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.base_bounds.dim()
    }

    pub fn base_bounds(&self) -> &Bounds {
        &self.base_bounds
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// Same function with bounds moved by `s` and `x ↦ base(x - s)`.
    /// Shifts compose additively.
    pub fn shifted(&self, s: &[f64]) -> Result<Self> {
        Error::check_dim(self.dimension(), s.len())?;
        let mut out = self.clone();
        out.bounds = self.bounds.translated(s)?;
        for (acc, v) in out.shift.iter_mut().zip(s) {
            *acc += v;
        }
        out.name = format!("{}+shift({})", self.name, shift_tag(s));
        Ok(out)
    }

    /// Evaluate the untranslated function; `x` is in base coordinates.
    pub fn evaluate_base(&mut self, x: &[f64]) -> f64 {
        match &mut self.evaluator {
            Evaluator::Sphere => sphere(x),
            Evaluator::Rosenbrock => rosenbrock_unchecked(x),
            Evaluator::Ackley => ackley(x),
            Evaluator::Alpine => alpine(x),
            Evaluator::Rastrigin => rastrigin(x),
            Evaluator::RandomFitness(rng) => random_fitness(x, rng),
            Evaluator::Custom(f) => f(x),
        }
    }
}

impl Objective for ObjectiveSpec {
    fn id(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&mut self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension());
        let mut buf = std::mem::take(&mut self.scratch);
        for ((b, v), s) in buf.iter_mut().zip(x).zip(&self.shift) {
            *b = v - s;
        }
        let f = self.evaluate_base(&buf);
        self.scratch = buf;
        f
    }

    fn reseed(&mut self, seed: u64) {
        if let Evaluator::RandomFitness(rng) = &mut self.evaluator {
            **rng = RngStream::new(seed ^ NOISE_SALT);
        }
    }
}

fn shift_tag(s: &[f64]) -> String {
    match s.first() {
        Some(first) if s.iter().all(|v| v == first) => format!("{first:e}"),
        _ => s.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";"),
    }
}

/// Counts evaluations of the wrapped objective.
#[derive(Clone, Debug)]
pub struct Counted<O> {
    inner: O,
    count: u64,
}

impl<O: Objective> Counted<O> {
    pub fn new(inner: O) -> Self {
        Counted { inner, count: 0 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: Objective> Objective for Counted<O> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn bounds(&self) -> &Bounds {
        self.inner.bounds()
    }

    fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        self.inner.evaluate(x)
    }

    fn reseed(&mut self, seed: u64) {
        self.inner.reseed(seed)
    }
}

/// Default (untranslated) box for a registered function.
pub fn default_bounds(name: &str, dim: usize) -> Result<Bounds> {
    let half = match name {
        "sphere" | "ackley" | "rastrigin" | "random" => 100.0,
        "rosenbrock" => 30.0,
        "alpine" => 10.0,
        other => return Err(Error::config(format!("unknown objective \"{other}\""))),
    };
    Bounds::uniform(dim, -half, half)
}

/// Registry lookup by name with the default box.
pub fn lookup(name: &str, dim: usize) -> Result<ObjectiveSpec> {
    let bounds = default_bounds(name, dim)?;
    let evaluator = match name {
        "sphere" => Evaluator::Sphere,
        "rosenbrock" => Evaluator::Rosenbrock,
        "ackley" => Evaluator::Ackley,
        "alpine" => Evaluator::Alpine,
        "rastrigin" => Evaluator::Rastrigin,
        "random" => return Ok(ObjectiveSpec::random_fitness(bounds, 0)),
        _ => unreachable!("default_bounds rejects unknown names"),
    };
    ObjectiveSpec::new(name, bounds, evaluator)
}

/// A shift given either as one value broadcast to every axis or as a full
/// vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shift {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Default for Shift {
    fn default() -> Self {
        Shift::Scalar(0.0)
    }
}

impl Shift {
    pub fn to_vector(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            Shift::Scalar(s) => Ok(vec![*s; dim]),
            Shift::Vector(v) => {
                Error::check_dim(dim, v.len())?;
                Ok(v.clone())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Shift::Scalar(s) => *s == 0.0,
            Shift::Vector(v) => v.iter().all(|s| *s == 0.0),
        }
    }
}

/// Registry lookup plus an optional translation. A zero shift keeps the plain
/// name.
pub fn resolve(name: &str, dim: usize, shift: &Shift) -> Result<ObjectiveSpec> {
    let base = lookup(name, dim)?;
    if shift.is_zero() {
        Ok(base)
    } else {
        base.shifted(&shift.to_vector(dim)?)
    }
}
