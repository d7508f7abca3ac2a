//! ABF curves, two-sided Mann–Whitney U with Bonferroni correction, and the
//! asterisk significance classes.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::trace::RunTrace;

/// Largest smaller-sample size for which the exact null distribution is used
/// (tie-free data only).
pub const EXACT_CUTOFF: usize = 10;

/// Element-wise mean of best-so-far curves.
pub fn abf(traces: &[RunTrace]) -> Result<Vec<f64>> {
    let first = traces.first().ok_or_else(|| Error::Shape("abf of zero traces".into()))?;
    for t in traces {
        if t.algorithm_id != first.algorithm_id || t.objective_id != first.objective_id {
            return Err(Error::Shape(format!(
                "abf mixes cells ({}, {}) and ({}, {})",
                first.algorithm_id, first.objective_id, t.algorithm_id, t.objective_id
            )));
        }
    }
    abf_curves(traces.iter().map(|t| t.best_per_iteration.as_slice()))
}

pub fn abf_curves<'a, I>(curves: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut sum: Option<Vec<f64>> = None;
    let mut count = 0usize;
    for c in curves {
        match sum.as_mut() {
            None => sum = Some(c.to_vec()),
            Some(s) => {
                if s.len() != c.len() {
                    return Err(Error::Shape(format!("trace lengths differ: {} vs {}", s.len(), c.len())));
                }
                s.iter_mut().zip(c).for_each(|(a, b)| *a += b);
            }
        }
        count += 1;
    }
    let mut sum = sum.ok_or_else(|| Error::Shape("abf of zero traces".into()))?;
    sum.iter_mut().for_each(|v| *v /= count as f64);
    Ok(sum)
}

/// Final-best fitnesses of one algorithm on one objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if values.len() < 2 {
            return Err(Error::Shape(format!("sample \"{label}\" needs at least 2 values")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Shape(format!("sample \"{label}\" contains non-finite value {v}")));
        }
        Ok(SampleSet { label, values })
    }

    pub fn median(&self) -> f64 {
        let s = sorted(&self.values);
        quantile_sorted(&s, 0.5)
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    s
}

/// Linear-interpolation quantile (type 7) of already sorted data.
pub fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    if s.is_empty() {
        return f64::NAN;
    }
    let h = (s.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

/// Box-plot summary: quartiles plus whiskers at the most extreme data within
/// 1.5 IQR of the box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxSummary {
    pub fn of(values: &[f64]) -> Self {
        let s = sorted(values);
        let q1 = quantile_sorted(&s, 0.25);
        let q3 = quantile_sorted(&s, 0.75);
        let iqr = q3 - q1;
        let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let inside: Vec<f64> = s.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence).collect();
        BoxSummary {
            min: s[0],
            q1,
            median: quantile_sorted(&s, 0.5),
            q3,
            max: s[s.len() - 1],
            whisker_low: inside.first().copied().unwrap_or(q1),
            whisker_high: inside.last().copied().unwrap_or(q3),
            outliers: s.iter().copied().filter(|v| *v < lo_fence || *v > hi_fence).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PMethod {
    Exact,
    Normal,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U of the first sample: pairs where it is larger, ties counting 1/2.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub method: PMethod,
}

/// Midranks (1-based, ties averaged) of the pooled data.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&i, &j| pooled[i].partial_cmp(&pooled[j]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut k = 0;
    while k < idx.len() {
        let mut e = k + 1;
        while e < idx.len() && pooled[idx[e]] == pooled[idx[k]] {
            e += 1;
        }
        let r = (k + 1 + e) as f64 / 2.0;
        for &i in &idx[k..e] {
            ranks[i] = r;
        }
        if e - k > 1 {
            ties.push(e - k);
        }
        k = e;
    }
    (ranks, ties)
}

/// Frequencies of U = 0..=n*m under the null for tie-free samples of sizes n
/// and m. Built from the recurrence on the position of the largest element.
fn u_null_counts(n: usize, m: usize) -> Vec<f64> {
    // table[j] holds the counts for (i, j) while sweeping i upward
    let mut table: Vec<Vec<f64>> = (0..=m).map(|_| vec![1.0]).collect();
    for i in 1..=n {
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        next.push(vec![1.0]);
        for j in 1..=m {
            let mut c = vec![0.0; i * j + 1];
            // largest element from the first sample: it beats all j others
            for (u, v) in table[j].iter().enumerate() {
                c[u + j] += v;
            }
            // largest from the second sample: contributes nothing
            for (u, v) in next[j - 1].iter().enumerate() {
                c[u] += v;
            }
            next.push(c);
        }
        table = next;
    }
    table.swap_remove(m)
}

fn exact_two_sided(u: f64, n: usize, m: usize) -> f64 {
    let counts = u_null_counts(n, m);
    let total: f64 = counts.iter().sum();
    let k = u.round() as usize;
    let lower: f64 = counts[..=k].iter().sum::<f64>() / total;
    let upper: f64 = counts[k..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Two-sided Mann–Whitney U test.
///
/// Exact null distribution when the data are tie-free and the smaller sample
/// has at most [`EXACT_CUTOFF`] values; otherwise the normal approximation
/// with tie-corrected variance and a 0.5 continuity correction. If every
/// value is identical the test is degenerate and `p = 1`.
pub fn mann_whitney_u(a: &SampleSet, b: &SampleSet) -> MannWhitney {
    mann_whitney_u_values(&a.values, &b.values)
}

pub fn mann_whitney_u_values(a: &[f64], b: &[f64]) -> MannWhitney {
    mann_whitney_u_with(a, b, None)
}

/// [`mann_whitney_u_values`] with the p-value method forced. `Some(Exact)`
/// falls back to the normal approximation when the data contain ties;
/// `None` picks automatically.
pub fn mann_whitney_u_with(a: &[f64], b: &[f64], method: Option<PMethod>) -> MannWhitney {
    let (n, m) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum: f64 = ranks[..n].iter().sum();
    let u = rank_sum - (n * (n + 1)) as f64 / 2.0;

    let exact = match method {
        None => ties.is_empty() && n.min(m) <= EXACT_CUTOFF,
        Some(PMethod::Exact) => ties.is_empty(),
        Some(_) => false,
    };
    if exact {
        return MannWhitney { u, p: exact_two_sided(u, n, m), method: PMethod::Exact };
    }
    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (total * (total - 1.0));
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_term);
    if var <= 0.0 {
        return MannWhitney { u, p: 1.0, method: PMethod::Degenerate };
    }
    let z = ((u - nf * mf / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    MannWhitney { u, p: (2.0 * std_normal_sf(z)).min(1.0), method: PMethod::Normal }
}

/// `min(1, m p)`.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "****")]
    P0001,
    #[serde(rename = "***")]
    P001,
    #[serde(rename = "**")]
    P01,
    #[serde(rename = "*")]
    P05,
    #[serde(rename = "ns")]
    NotSignificant,
}

impl Significance {
    pub fn as_str(self) -> &'static str {
        match self {
            Significance::P0001 => "****",
            Significance::P001 => "***",
            Significance::P01 => "**",
            Significance::P05 => "*",
            Significance::NotSignificant => "ns",
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn significance_class(p_adj: f64) -> Significance {
    if p_adj <= 0.0001 {
        Significance::P0001
    } else if p_adj <= 0.001 {
        Significance::P001
    } else if p_adj <= 0.01 {
        Significance::P01
    } else if p_adj <= 0.05 {
        Significance::P05
    } else {
        Significance::NotSignificant
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub a: String,
    pub b: String,
    pub u: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub class: Significance,
    pub method: PMethod,
    pub median_a: f64,
    pub median_b: f64,
}

/// All pairwise tests for one objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub objective: String,
    /// Bonferroni factor applied to every raw p-value.
    pub correction: usize,
    pub pairs: Vec<PairComparison>,
}

impl ComparisonReport {
    /// Tests every unordered pair of samples, in input order. The correction
    /// factor defaults to the number of pairs.
    pub fn build(objective: impl Into<String>, samples: &[SampleSet], correction: Option<usize>) -> Self {
        let k = samples.len();
        let m = correction.unwrap_or(k * k.saturating_sub(1) / 2).max(1);
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (&samples[i], &samples[j]);
                let t = mann_whitney_u(a, b);
                let p_adjusted = bonferroni(t.p, m);
                pairs.push(PairComparison {
                    a: a.label.clone(),
                    b: b.label.clone(),
                    u: t.u,
                    p_raw: t.p,
                    p_adjusted,
                    class: significance_class(p_adjusted),
                    method: t.method,
                    median_a: a.median(),
                    median_b: b.median(),
                });
            }
        }
        ComparisonReport { objective: objective.into(), correction: m, pairs }
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairComparison> {
        self.pairs.iter().find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }

    fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.pairs {
            for l in [p.a.as_str(), p.b.as_str()] {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out
    }

    /// Symmetric matrix; each off-diagonal cell is `adjusted_p class`.
    pub fn write_csv_matrix<W: Write>(&self, mut w: W) -> Result<()> {
        let labels = self.labels();
        write!(w, "algorithm")?;
        for l in &labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for r in &labels {
            write!(w, "{r}")?;
            for c in &labels {
                match self.pair(r, c) {
                    Some(p) if r != c => write!(w, ",{:e} {}", p.p_adjusted, p.class)?,
                    _ => write!(w, ",-")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Candidate;
    use proptest::prelude::*;

    fn trace(v: Vec<f64>) -> RunTrace {
        RunTrace {
            algorithm_id: "a".into(),
            objective_id: "o".into(),
            seed: 0,
            final_best: Candidate::evaluated(vec![0.0], *v.last().unwrap()),
            best_per_iteration: v,
            start: None,
            snapshots: None,
        }
    }

    fn s(v: &[f64]) -> SampleSet {
        SampleSet::new("x", v.to_vec()).unwrap()
    }

    /// Brute force: every way to choose which pooled ranks go to the first
    /// sample, counting splits whose U is at least as far from the mean.
    fn enumerate_two_sided(n: usize, m: usize, u_obs: f64) -> f64 {
        let total = n + m;
        let mut extreme = 0u64;
        let mut all = 0u64;
        let mean = (n * m) as f64 / 2.0;
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let rank_sum: usize = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
            let u = rank_sum as f64 - (n * (n + 1)) as f64 / 2.0;
            all += 1;
            if (u - mean).abs() >= (u_obs - mean).abs() - 1e-9 {
                extreme += 1;
            }
        }
        extreme as f64 / all as f64
    }

    #[test]
    fn abf_examples() {
        assert_eq!(abf(&[trace(vec![1.0, 1.0]), trace(vec![3.0, 3.0])]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(abf(&[trace(vec![5.0, 2.0])]).unwrap(), vec![5.0, 2.0]);
        let many: Vec<RunTrace> = (0..30).map(|_| trace(vec![0.7; 4])).collect();
        assert!(abf(&many).unwrap().iter().all(|v| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn abf_rejects_mixed_lengths_and_cells() {
        assert!(matches!(abf(&[trace(vec![1.0]), trace(vec![1.0, 2.0])]), Err(Error::Shape(_))));
        let mut other = trace(vec![1.0]);
        other.algorithm_id = "b".into();
        assert!(abf(&[trace(vec![1.0]), other]).is_err());
        assert!(abf(&[]).is_err());
    }

    #[test]
    fn exact_example_matches_enumeration() {
        let r = mann_whitney_u(&s(&[1.0, 2.0, 3.0]), &s(&[4.0, 5.0, 6.0]));
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, PMethod::Exact);
        assert!((r.p - 0.1).abs() < 1e-15);
        assert!((enumerate_two_sided(3, 3, 0.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn null_counts_match_enumeration() {
        for (n, m) in [(2, 3), (4, 4), (5, 7), (3, 9)] {
            let counts = u_null_counts(n, m);
            let total: f64 = counts.iter().sum();
            let binom: f64 = (1..=n).map(|k| (m + k) as f64 / k as f64).product();
            assert!((total - binom).abs() < 1e-6);
            for u in 0..=(n * m) {
                let p = exact_two_sided(u as f64, n, m);
                let q = enumerate_two_sided(n, m, u as f64);
                assert!((p - q.min(1.0)).abs() < 1e-12, "n={n} m={m} u={u}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn identical_samples_not_significant() {
        let r = mann_whitney_u(&s(&[1.0, 2.0, 3.0, 4.0]), &s(&[1.0, 2.0, 3.0, 4.0]));
        assert!(r.p >= 0.99);
        let d = mann_whitney_u(&s(&[2.0; 5]), &s(&[2.0; 7]));
        assert_eq!((d.p, d.method), (1.0, PMethod::Degenerate));
    }

    #[test]
    fn large_separated_samples_use_normal() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| 100.0 + i as f64).collect();
        let r = mann_whitney_u(&s(&a), &s(&b));
        assert_eq!(r.method, PMethod::Normal);
        assert_eq!(r.u, 0.0);
        // z = (450 - 0.5) / sqrt(900 * 61 / 12); 2 * norm.sf(z) from scipy
        assert!((r.p - 3.019859359162157e-11).abs() / 3.02e-11 < 1e-9, "{}", r.p);
    }

    #[test]
    fn bonferroni_examples() {
        assert!((bonferroni(0.01, 6) - 0.06).abs() < 1e-15);
        assert_eq!(bonferroni(0.3, 5), 1.0);
        assert_eq!(bonferroni(0.042, 1), 0.042);
    }

    #[test]
    fn significance_examples() {
        assert_eq!(significance_class(0.00005), Significance::P0001);
        assert_eq!(significance_class(0.0001), Significance::P0001);
        assert_eq!(significance_class(0.0005), Significance::P001);
        assert_eq!(significance_class(0.005), Significance::P01);
        assert_eq!(significance_class(0.03), Significance::P05);
        assert_eq!(significance_class(0.05), Significance::P05);
        assert_eq!(significance_class(0.2), Significance::NotSignificant);
        assert_eq!(serde_json::to_string(&Significance::P001).unwrap(), "\"***\"");
    }

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new("a", vec![1.0]).is_err());
        assert!(SampleSet::new("a", vec![1.0, f64::NAN]).is_err());
        assert_eq!(s(&[3.0, 1.0, 2.0, 10.0]).median(), 2.5);
    }

    #[test]
    fn box_summary_whiskers() {
        let b = BoxSummary::of(&[1.0, 2.0, 3.0, 4.0, 100.0]);
        assert_eq!((b.q1, b.median, b.q3), (2.0, 3.0, 4.0));
        assert_eq!(b.whisker_high, 4.0);
        assert_eq!(b.outliers, vec![100.0]);
    }

    #[test]
    fn report_pairs_and_matrix() {
        let samples: Vec<SampleSet> = (0..4)
            .map(|k| SampleSet::new(format!("alg{k}"), (0..30).map(|i| (k * 100 + i) as f64).collect()).unwrap())
            .collect();
        let r = ComparisonReport::build("sphere", &samples, None);
        assert_eq!(r.pairs.len(), 6);
        assert_eq!(r.correction, 6);
        assert!(r.pairs.iter().all(|p| p.class == Significance::P0001));
        let mut buf = Vec::new();
        r.write_csv_matrix(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("algorithm,alg0,alg1,alg2,alg3\nalg0,-,"));
    }

    #[test]
    fn all_equal_samples_are_ns() {
        let samples: Vec<SampleSet> = (0..3).map(|k| SampleSet::new(format!("a{k}"), vec![1.5; 30]).unwrap()).collect();
        let r = ComparisonReport::build("o", &samples, None);
        assert!(r.pairs.iter().all(|p| p.class == Significance::NotSignificant));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn u_plus_u_prime_is_nm(
            a in prop::collection::vec(-5i32..5, 2..25),
            b in prop::collection::vec(-5i32..5, 2..25),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let x = mann_whitney_u_values(&a, &b);
            let y = mann_whitney_u_values(&b, &a);
            prop_assert_eq!(x.u + y.u, (a.len() * b.len()) as f64);
            prop_assert!((x.p - y.p).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&x.p));
        }

        #[test]
        fn bonferroni_monotone(p in 0.0f64..1.0, q in 0.0f64..1.0, m in 1usize..50, k in 1usize..50) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(bonferroni(lo, m) <= bonferroni(hi, m));
            let (m1, m2) = if m <= k { (m, k) } else { (k, m) };
            prop_assert!(bonferroni(p, m1) <= bonferroni(p, m2));
        }

        #[test]
        fn abf_preserves_monotonicity(
            curves in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 12), 1..8)
        ) {
            let mono: Vec<Vec<f64>> = curves
                .into_iter()
                .map(|c| c.iter().scan(f64::INFINITY, |m, v| { *m = m.min(*v); Some(*m) }).collect())
                .collect();
            let avg = abf_curves(mono.iter().map(|c| c.as_slice())).unwrap();
            prop_assert!(avg.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }
}
