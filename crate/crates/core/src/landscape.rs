//! Truth landscapes: Brownian motion values known exactly on a random set of
//! anchor points.
//!
//! A landscape lives on `[0, L]`. Anchors are a homogeneous Poisson process
//! of the configured intensity on the open interval, plus pinned boundary
//! anchors at `0` and `L` so every task location has a bracketing pair. The
//! truth value at `0` is zero and anchor values are generated sequentially by
//! independent Gaussian increments in sorted order, which reproduces the
//! exact Brownian joint law in O(n).
//!
//! Between consecutive anchors the conditional truth is a Brownian bridge:
//! the posterior mean interpolates linearly and the posterior variance is
//! `(x - a)(b - x) / (b - a)`, zero at the anchors and maximal mid-gap.
//!
//! Statistics reported by the Monte Carlo pipelines exclude tasks whose
//! containing gap touches a boundary anchor: the two edge gaps are artifacts
//! of pinning, and the interior gaps carry the stationary length-biased law.

use crate::rng::{seeded_rng, Rng};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("intensity must be positive and finite, got {0}")]
    BadIntensity(f64),
    #[error("domain length must be positive and finite, got {0}")]
    BadDomainLength(f64),
    #[error("location {x} lies outside the domain [0, {domain_length}]")]
    OutOfDomain { x: f64, domain_length: f64 },
    #[error("location {0} coincides with an anchor; its containing gap is undefined")]
    AnchorHit(f64),
    #[error("anchor list invalid: {0}")]
    BadAnchors(&'static str),
}

/// Parameters of a Poisson-anchored landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeConfig {
    pub intensity: f64,
    pub domain_length: f64,
    pub seed: u64,
}

impl LandscapeConfig {
    pub fn new(intensity: f64, domain_length: f64, seed: u64) -> Result<Self, LandscapeError> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(LandscapeError::BadIntensity(intensity));
        }
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(LandscapeError::BadDomainLength(domain_length));
        }
        Ok(Self { intensity, domain_length, seed })
    }
}

/// An inter-anchor interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub left: f64,
    pub right: f64,
}

impl Gap {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// A task location together with its position within its containing gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSample {
    pub location: f64,
    /// (location - gap.left) / gap.length, in (0, 1).
    pub relative_position: f64,
}

/// Posterior of the truth value at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub variance: f64,
}

/// Where a location falls relative to the anchor set.
enum Bracket {
    /// Exactly on anchor `i`.
    Anchor(usize),
    /// Strictly between anchors `i` and `i + 1`.
    Between(usize),
}

/// Sorted anchor locations and the known truth values at them.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeSet {
    anchors: Vec<f64>,
    values: Vec<f64>,
}

impl KnowledgeSet {
    /// Build from explicit parts. Anchors must start at 0, be strictly
    /// increasing and finite, and pair one value per anchor.
    pub fn from_parts(anchors: Vec<f64>, values: Vec<f64>) -> Result<Self, LandscapeError> {
        if anchors.len() < 2 {
            return Err(LandscapeError::BadAnchors("need at least the two boundary anchors"));
        }
        if anchors.len() != values.len() {
            return Err(LandscapeError::BadAnchors("anchor and value counts differ"));
        }
        if anchors[0] != 0.0 {
            return Err(LandscapeError::BadAnchors("first anchor must sit at 0"));
        }
        if !anchors.iter().all(|a| a.is_finite()) || !values.iter().all(|v| v.is_finite()) {
            return Err(LandscapeError::BadAnchors("anchors and values must be finite"));
        }
        if !anchors.windows(2).all(|w| w[0] < w[1]) {
            return Err(LandscapeError::BadAnchors("anchors must be strictly increasing"));
        }
        Ok(Self { anchors, values })
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain_length(&self) -> f64 {
        *self.anchors.last().expect("nonempty by construction")
    }

    /// Anchors strictly inside the domain.
    pub fn interior_anchor_count(&self) -> usize {
        self.anchors.len() - 2
    }

    /// Consecutive-anchor gaps, boundary gaps included.
    pub fn gaps(&self) -> impl Iterator<Item = Gap> + '_ {
        self.anchors.windows(2).map(|w| Gap { left: w[0], right: w[1] })
    }

    /// Gaps whose endpoints are both interior anchors' neighbors, i.e. the
    /// first and last gap (which touch the pinned boundary) are dropped.
    pub fn interior_gaps(&self) -> impl Iterator<Item = Gap> + '_ {
        let n = self.anchors.len();
        self.anchors[1..n - 1].windows(2).map(|w| Gap { left: w[0], right: w[1] })
    }

    fn bracket(&self, x: f64) -> Result<Bracket, LandscapeError> {
        let len = self.domain_length();
        if !(x >= 0.0 && x <= len) {
            return Err(LandscapeError::OutOfDomain { x, domain_length: len });
        }
        let idx = self.anchors.partition_point(|&a| a < x);
        if self.anchors[idx] == x {
            Ok(Bracket::Anchor(idx))
        } else {
            Ok(Bracket::Between(idx - 1))
        }
    }

    /// Brownian-bridge posterior at `x`: linear mean interpolation between
    /// the bracketing anchors, variance (x - a)(b - x)/(b - a). Exact value
    /// and zero variance on an anchor.
    pub fn posterior_at(&self, x: f64) -> Result<PosteriorSummary, LandscapeError> {
        match self.bracket(x)? {
            Bracket::Anchor(i) => Ok(PosteriorSummary { mean: self.values[i], variance: 0.0 }),
            Bracket::Between(i) => {
                let (a, b) = (self.anchors[i], self.anchors[i + 1]);
                let (va, vb) = (self.values[i], self.values[i + 1]);
                let w = (x - a) / (b - a);
                Ok(PosteriorSummary {
                    mean: va + w * (vb - va),
                    variance: (x - a) * (b - x) / (b - a),
                })
            }
        }
    }

    /// Draw one truth value at `x` from the bridge posterior. On an anchor
    /// the stored value is returned and no randomness is consumed.
    pub fn sample_bridge_value_with(&self, x: f64, rng: &mut Rng) -> Result<f64, LandscapeError> {
        let post = self.posterior_at(x)?;
        if post.variance == 0.0 {
            return Ok(post.mean);
        }
        let z: f64 = StandardNormal.sample(rng);
        Ok(post.mean + post.variance.sqrt() * z)
    }

    /// Seeded wrapper around [`Self::sample_bridge_value_with`].
    pub fn sample_bridge_value(&self, x: f64, noise_seed: u64) -> Result<f64, LandscapeError> {
        self.sample_bridge_value_with(x, &mut seeded_rng(noise_seed))
    }

    /// The gap containing `x`, plus the task's relative position inside it.
    /// Anchor hits are rejected: the containing gap of an anchor point is
    /// genuinely undefined rather than a boundary case.
    pub fn containing_gap(&self, x: f64) -> Result<(Gap, TaskSample), LandscapeError> {
        match self.bracket(x)? {
            Bracket::Anchor(_) => Err(LandscapeError::AnchorHit(x)),
            Bracket::Between(i) => {
                let gap = Gap { left: self.anchors[i], right: self.anchors[i + 1] };
                let t = (x - gap.left) / gap.length();
                Ok((gap, TaskSample { location: x, relative_position: t }))
            }
        }
    }

    /// True when the containing gap of `x` touches neither boundary anchor.
    pub fn is_interior(&self, x: f64) -> bool {
        match self.bracket(x) {
            Ok(Bracket::Between(i)) => i >= 1 && i + 2 < self.anchors.len(),
            _ => false,
        }
    }

    /// Draw task locations uniformly on the domain, keeping only interior
    /// ones (containing gap away from both boundary gaps, no anchor hits).
    pub fn sample_interior_tasks(&self, count: usize, rng: &mut Rng) -> Vec<f64> {
        let len = self.domain_length();
        let mut out = Vec::with_capacity(count);
        // In expectation only ~2/n draws are rejected; the hard cap guards
        // against degenerate anchor sets where almost nothing is interior.
        let mut budget = 64 * (count as u64 + 16);
        while out.len() < count && budget > 0 {
            budget -= 1;
            let x = rng.gen_range(0.0..len);
            if self.is_interior(x) {
                out.push(x);
            }
        }
        out
    }

    /// Insert an anchor with a known value, keeping anchors sorted. The
    /// location must lie strictly inside the domain and off existing anchors.
    pub fn insert_anchor(&mut self, x: f64, value: f64) -> Result<(), LandscapeError> {
        if !value.is_finite() {
            return Err(LandscapeError::BadAnchors("anchor value must be finite"));
        }
        match self.bracket(x)? {
            Bracket::Anchor(_) => Err(LandscapeError::AnchorHit(x)),
            Bracket::Between(i) => {
                self.anchors.insert(i + 1, x);
                self.values.insert(i + 1, value);
                Ok(())
            }
        }
    }

    /// Build a knowledge set from raw interior anchors on `[0, length]`,
    /// pinning the boundary anchors and drawing Brownian values (value 0 at
    /// the origin, independent Gaussian increments across sorted anchors).
    pub(crate) fn from_interior_anchors(
        mut interior: Vec<f64>,
        length: f64,
        rng: &mut Rng,
    ) -> Self {
        interior.sort_by(f64::total_cmp);
        interior.dedup();
        interior.retain(|&x| x > 0.0 && x < length);
        let mut anchors = Vec::with_capacity(interior.len() + 2);
        anchors.push(0.0);
        anchors.extend_from_slice(&interior);
        anchors.push(length);
        let mut values = Vec::with_capacity(anchors.len());
        values.push(0.0);
        for w in anchors.windows(2) {
            let dx = w[1] - w[0];
            let z: f64 = StandardNormal.sample(rng);
            let prev = *values.last().expect("seeded with origin value");
            values.push(prev + dx.sqrt() * z);
        }
        Self { anchors, values }
    }
}

/// Sample a Poisson-anchored landscape. Draw order (count, then locations,
/// then values) is fixed; callers rely on it for reproducibility.
pub fn sample_knowledge_points(config: &LandscapeConfig) -> KnowledgeSet {
    let mut rng = seeded_rng(config.seed);
    let rate = config.intensity * config.domain_length;
    let count = Poisson::new(rate).expect("validated rate").sample(&mut rng) as usize;
    let interior: Vec<f64> =
        (0..count).map(|_| rng.gen_range(0.0..config.domain_length)).collect();
    KnowledgeSet::from_interior_anchors(interior, config.domain_length, &mut rng)
}

/// Sampler for the length-biased gap that a uniform task lands in: under
/// Poisson anchors of intensity `lambda` this is Gamma(shape 2, rate lambda),
/// mean 2/lambda.
#[derive(Debug, Clone)]
pub struct LengthBiasedGaps {
    dist: Gamma<f64>,
    rng: Rng,
}

impl LengthBiasedGaps {
    pub fn sample(&mut self) -> f64 {
        self.dist.sample(&mut self.rng)
    }
}

impl Iterator for LengthBiasedGaps {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        Some(self.sample())
    }
}

/// Build a [`LengthBiasedGaps`] sampler.
pub fn length_biased_gap_sampler(
    intensity: f64,
    seed: u64,
) -> Result<LengthBiasedGaps, LandscapeError> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(LandscapeError::BadIntensity(intensity));
    }
    Ok(LengthBiasedGaps {
        dist: Gamma::new(2.0, 1.0 / intensity).expect("validated shape and scale"),
        rng: seeded_rng(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{estimate_from_samples, ks_statistic, ks_threshold};
    use crate::rng::seeded_rng;

    fn flat_set(anchors: &[f64]) -> KnowledgeSet {
        KnowledgeSet::from_parts(anchors.to_vec(), vec![0.0; anchors.len()]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(LandscapeConfig::new(0.0, 1.0, 0).is_err());
        assert!(LandscapeConfig::new(-1.0, 1.0, 0).is_err());
        assert!(LandscapeConfig::new(1.0, 0.0, 0).is_err());
        assert!(LandscapeConfig::new(1.0, f64::INFINITY, 0).is_err());
        assert!(LandscapeConfig::new(1.0, 1.0, 0).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let config = LandscapeConfig::new(2.0, 5.0, 77).unwrap();
        let a = sample_knowledge_points(&config);
        let b = sample_knowledge_points(&config);
        assert_eq!(a, b);
        let c = sample_knowledge_points(&LandscapeConfig::new(2.0, 5.0, 78).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn anchor_count_matches_intensity() {
        // One long landscape: count / L estimates lambda with SE sqrt(L)/L.
        let config = LandscapeConfig::new(1.0, 1_000_000.0, 11).unwrap();
        let ks = sample_knowledge_points(&config);
        let rate = ks.interior_anchor_count() as f64 / config.domain_length;
        let se = (config.intensity / config.domain_length).sqrt();
        assert!((rate - 1.0).abs() < 3.0 * se, "rate {rate}, se {se}");
    }

    #[test]
    fn mean_spacing_matches_inverse_intensity() {
        let config = LandscapeConfig::new(4.0, 100_000.0, 3).unwrap();
        let ks = sample_knowledge_points(&config);
        let spacings: Vec<f64> = ks.interior_gaps().map(|g| g.length()).collect();
        let est = estimate_from_samples(&spacings);
        assert!((est.mean - 0.25).abs() < 3.0 * est.se, "{est:?}");
    }

    #[test]
    fn structural_invariants_hold() {
        let ks = sample_knowledge_points(&LandscapeConfig::new(3.0, 50.0, 9).unwrap());
        let anchors = ks.anchors();
        assert_eq!(anchors[0], 0.0);
        assert_eq!(*anchors.last().unwrap(), 50.0);
        assert!(anchors.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ks.values().len(), anchors.len());
        assert_eq!(ks.values()[0], 0.0);
    }

    #[test]
    fn posterior_mid_gap_and_quarter_points() {
        let ks = flat_set(&[0.0, 4.0]);
        let mid = ks.posterior_at(2.0).unwrap();
        assert_eq!(mid.variance, 1.0);
        let quarter = ks.posterior_at(1.0).unwrap();
        assert_eq!(quarter.variance, 0.75);
    }

    #[test]
    fn posterior_interpolates_mean() {
        let ks = KnowledgeSet::from_parts(vec![0.0, 2.0, 6.0], vec![0.0, 1.0, -3.0]).unwrap();
        let p = ks.posterior_at(4.0).unwrap();
        assert!((p.mean - (1.0 + 0.5 * (-4.0))).abs() < 1e-15);
        assert!((p.variance - 2.0 * 2.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn posterior_on_anchor_is_exact() {
        let ks = KnowledgeSet::from_parts(vec![0.0, 2.0, 6.0], vec![0.0, 1.5, -3.0]).unwrap();
        let p = ks.posterior_at(2.0).unwrap();
        assert_eq!(p.mean, 1.5);
        assert_eq!(p.variance, 0.0);
    }

    #[test]
    fn posterior_rejects_out_of_domain() {
        let ks = flat_set(&[0.0, 4.0]);
        assert!(matches!(ks.posterior_at(-0.1), Err(LandscapeError::OutOfDomain { .. })));
        assert!(matches!(ks.posterior_at(4.1), Err(LandscapeError::OutOfDomain { .. })));
        assert!(matches!(ks.posterior_at(f64::NAN), Err(LandscapeError::OutOfDomain { .. })));
    }

    #[test]
    fn bridge_sample_on_anchor_returns_value_exactly() {
        let ks = KnowledgeSet::from_parts(vec![0.0, 2.0, 6.0], vec![0.0, 1.5, -3.0]).unwrap();
        assert_eq!(ks.sample_bridge_value(2.0, 123).unwrap(), 1.5);
    }

    #[test]
    fn bridge_sample_seed_behaviour() {
        let ks = flat_set(&[0.0, 4.0]);
        let a = ks.sample_bridge_value(2.0, 5).unwrap();
        let b = ks.sample_bridge_value(2.0, 5).unwrap();
        let c = ks.sample_bridge_value(2.0, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bridge_sample_variance_matches_formula() {
        let ks = flat_set(&[0.0, 4.0]);
        let mut rng = seeded_rng(21);
        let draws: Vec<f64> =
            (0..40_000).map(|_| ks.sample_bridge_value_with(2.0, &mut rng).unwrap()).collect();
        let est = estimate_from_samples(&draws);
        assert!(est.mean.abs() < 3.0 * est.se, "mean {est:?}");
        let n = draws.len() as f64;
        let var = draws.iter().map(|d| (d - est.mean).powi(2)).sum::<f64>() / (n - 1.0);
        // SE of the sample variance of a normal is sigma^2 sqrt(2/(n-1)).
        let var_se = 1.0 * (2.0 / (n - 1.0)).sqrt();
        assert!((var - 1.0).abs() < 3.0 * var_se, "var {var}");
    }

    #[test]
    fn containing_gap_examples() {
        let ks = flat_set(&[0.0, 3.0, 10.0]);
        let (gap, task) = ks.containing_gap(4.0).unwrap();
        assert_eq!((gap.left, gap.right), (3.0, 10.0));
        assert!((task.relative_position - 1.0 / 7.0).abs() < 1e-15);
        let (gap, task) = ks.containing_gap(1.5).unwrap();
        assert_eq!((gap.left, gap.right), (0.0, 3.0));
        assert_eq!(task.relative_position, 0.5);
    }

    #[test]
    fn containing_gap_rejects_anchor_hit() {
        let ks = flat_set(&[0.0, 3.0, 10.0]);
        assert!(matches!(ks.containing_gap(3.0), Err(LandscapeError::AnchorHit(_))));
        assert!(matches!(ks.containing_gap(0.0), Err(LandscapeError::AnchorHit(_))));
    }

    #[test]
    fn interior_task_filter() {
        let ks = flat_set(&[0.0, 1.0, 2.0, 3.0, 10.0]);
        assert!(!ks.is_interior(0.5)); // first gap
        assert!(ks.is_interior(1.5));
        assert!(ks.is_interior(2.5));
        assert!(!ks.is_interior(5.0)); // last gap
        assert!(!ks.is_interior(2.0)); // anchor
    }

    #[test]
    fn uniform_interior_tasks_see_length_biased_gaps() {
        // Gap containing a uniform task has mean 2/lambda, not 1/lambda.
        let config = LandscapeConfig::new(1.0, 50_000.0, 31).unwrap();
        let ks = sample_knowledge_points(&config);
        let mut rng = seeded_rng(32);
        let tasks = ks.sample_interior_tasks(40_000, &mut rng);
        let gaps: Vec<f64> =
            tasks.iter().map(|&x| ks.containing_gap(x).unwrap().0.length()).collect();
        let est = estimate_from_samples(&gaps);
        assert!((est.mean - 2.0).abs() < 3.0 * est.se, "{est:?}");
    }

    #[test]
    fn length_biased_sampler_moments() {
        // Gamma(2, lambda): mean 2/lambda, second moment 6/lambda^2.
        let samples: Vec<f64> =
            length_biased_gap_sampler(0.5, 8).unwrap().take(200_000).collect();
        let est = estimate_from_samples(&samples);
        assert!((est.mean - 4.0).abs() < 3.0 * est.se, "{est:?}");
        let sq: Vec<f64> = samples.iter().map(|x| x * x).collect();
        let est2 = estimate_from_samples(&sq);
        assert!((est2.mean - 24.0).abs() < 3.0 * est2.se, "{est2:?}");
    }

    #[test]
    fn length_biased_sampler_matches_pipeline_distribution() {
        let config = LandscapeConfig::new(1.0, 50_000.0, 41).unwrap();
        let ks = sample_knowledge_points(&config);
        let mut rng = seeded_rng(42);
        let empirical: Vec<f64> = ks
            .sample_interior_tasks(30_000, &mut rng)
            .iter()
            .map(|&x| ks.containing_gap(x).unwrap().0.length())
            .collect();
        let direct: Vec<f64> =
            length_biased_gap_sampler(1.0, 43).unwrap().take(30_000).collect();
        let d = ks_statistic(&empirical, &direct);
        assert!(d < ks_threshold(empirical.len(), direct.len(), 0.01), "KS = {d}");
    }

    #[test]
    fn length_biased_sampler_rejects_bad_intensity() {
        assert!(length_biased_gap_sampler(0.0, 1).is_err());
        assert!(length_biased_gap_sampler(f64::NAN, 1).is_err());
    }

    #[test]
    fn from_parts_validation() {
        assert!(KnowledgeSet::from_parts(vec![0.0], vec![0.0]).is_err());
        assert!(KnowledgeSet::from_parts(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(KnowledgeSet::from_parts(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(KnowledgeSet::from_parts(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(KnowledgeSet::from_parts(vec![0.0, f64::NAN], vec![0.0, 0.0]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Bridge variance is symmetric in the relative position and
            // bounded by a quarter of the gap length. The mirrored query
            // point rounds to about eps*gap, and the variance slope in x is
            // at most 1, so symmetry holds to eps*gap absolutely on top of
            // the relative term.
            #[test]
            fn variance_symmetric_and_bounded(
                gap in 1e-6f64..1e6,
                t in 1e-9f64..0.5,
            ) {
                let ks = flat_set(&[0.0, gap]);
                let lo = ks.posterior_at(t * gap).unwrap().variance;
                let hi = ks.posterior_at((1.0 - t) * gap).unwrap().variance;
                prop_assert!((lo - hi).abs() <= 1e-12 * lo + 16.0 * f64::EPSILON * gap);
                prop_assert!(lo <= gap / 4.0 * (1.0 + 1e-12));
            }

            // Posterior mean stays within the bracketing anchor values.
            #[test]
            fn mean_stays_in_anchor_hull(
                v0 in -10.0f64..10.0,
                v1 in -10.0f64..10.0,
                t in 0.0f64..1.0,
            ) {
                let ks = KnowledgeSet::from_parts(vec![0.0, 1.0], vec![v0, v1]).unwrap();
                let m = ks.posterior_at(t).unwrap().mean;
                prop_assert!(m >= v0.min(v1) - 1e-12 && m <= v0.max(v1) + 1e-12);
            }
        }
    }
}
