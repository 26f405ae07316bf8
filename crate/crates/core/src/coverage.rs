//! Coverage scaling and gap-shape effects.
//!
//! Three themes:
//! - scaling as coupling: an intensity increase is realized as superposing an
//!   independent thinning onto the existing anchor set, so posterior variance
//!   falls pointwise, not just on average;
//! - gap families beyond exponential: renewal landscapes with Gamma,
//!   deterministic, or Pareto spacings, their length-bias multipliers
//!   `1 + CV^2`, and the benchmark/experienced reliability wedge;
//! - audits: discrete gap lists, gap splitting, and a planar Voronoi check of
//!   the size-bias identity `E[V*] = E[V^2]/E[V]`.

use crate::landscape::{KnowledgeSet, LandscapeError};
use crate::mc::estimate_from_samples;
use crate::rng::{seeded_rng, Rng};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, Poisson};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("{0}")]
    Landscape(#[from] LandscapeError),
    #[error("family parameter invalid: {0}")]
    BadFamily(String),
    #[error("scaled intensity must exceed the base intensity (got {base} -> {scaled})")]
    NotAScaleUp { base: f64, scaled: f64 },
    #[error("experienced mean is unbounded: {0}")]
    UnboundedExperiencedMean(String),
    #[error("regularity index must lie in [0,1], got {0}")]
    BadRegularity(f64),
    #[error("{0}")]
    BadArgument(String),
    #[error("gap list file, line {line}: {message}")]
    BadGapFile { line: usize, message: String },
}

/// Stationary gap-length families, all normalized to mean `1/lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapFamily {
    /// Exponential gaps: the Poisson-anchor case, CV = 1.
    Exponential { intensity: f64 },
    /// Gamma(shape, rate shape*lambda): CV = 1/sqrt(shape).
    Gamma { shape: f64, intensity: f64 },
    /// Every gap exactly `1/lambda`: CV = 0.
    Deterministic { intensity: f64 },
    /// Pareto Type-I with tail index alpha and scale `(alpha-1)/(alpha lambda)`
    /// so the mean stays `1/lambda`; requires alpha > 1.
    Pareto { tail_index: f64, intensity: f64 },
}

/// A possibly divergent moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    fn required(self, what: &str) -> Result<f64, CoverageError> {
        self.finite().ok_or_else(|| CoverageError::UnboundedExperiencedMean(what.to_string()))
    }
}

/// Closed-form gap moments and the length-bias multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMoments {
    pub mean: f64,
    pub second: Moment,
    pub third: Moment,
    pub cv: Moment,
    /// `E[X*]/E[X] = 1 + CV^2`.
    pub multiplier: Moment,
}

impl GapFamily {
    pub fn intensity(&self) -> f64 {
        match *self {
            GapFamily::Exponential { intensity }
            | GapFamily::Gamma { intensity, .. }
            | GapFamily::Deterministic { intensity }
            | GapFamily::Pareto { intensity, .. } => intensity,
        }
    }

    pub fn validate(&self) -> Result<(), CoverageError> {
        let intensity = self.intensity();
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(CoverageError::BadFamily(format!("intensity must be positive, got {intensity}")));
        }
        match *self {
            GapFamily::Gamma { shape, .. } if !(shape.is_finite() && shape > 0.0) => Err(
                CoverageError::BadFamily(format!("gamma shape must be positive, got {shape}")),
            ),
            GapFamily::Pareto { tail_index, .. } if !(tail_index.is_finite() && tail_index > 1.0) => {
                Err(CoverageError::BadFamily(format!(
                    "pareto tail index must exceed 1 for a finite mean gap, got {tail_index}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Pareto scale parameter that normalizes the mean to `1/lambda`.
    fn pareto_scale(tail_index: f64, intensity: f64) -> f64 {
        (tail_index - 1.0) / (tail_index * intensity)
    }

    /// Draw one gap length.
    pub fn sample_gap(&self, rng: &mut Rng) -> f64 {
        match *self {
            GapFamily::Exponential { intensity } => {
                rand_distr::Exp::new(intensity).expect("validated").sample(rng)
            }
            GapFamily::Gamma { shape, intensity } => {
                Gamma::new(shape, 1.0 / (shape * intensity)).expect("validated").sample(rng)
            }
            GapFamily::Deterministic { intensity } => 1.0 / intensity,
            GapFamily::Pareto { tail_index, intensity } => {
                let u: f64 = rng.gen(); // in [0, 1); 1-u in (0, 1] keeps the power finite
                Self::pareto_scale(tail_index, intensity) * (1.0 - u).powf(-1.0 / tail_index)
            }
        }
    }

    /// Draw one length-biased gap, the gap containing a uniform task. For
    /// Gamma-family gaps with rate b the reweighted law is Gamma(shape+1, b);
    /// deterministic gaps are their own length-biased law; Pareto falls back
    /// to rejection against the (finite-mean) envelope.
    pub fn sample_length_biased_gap(&self, rng: &mut Rng) -> Result<f64, CoverageError> {
        match *self {
            GapFamily::Exponential { intensity } => {
                Ok(Gamma::new(2.0, 1.0 / intensity).expect("validated").sample(rng))
            }
            GapFamily::Gamma { shape, intensity } => {
                Ok(Gamma::new(shape + 1.0, 1.0 / (shape * intensity)).expect("validated").sample(rng))
            }
            GapFamily::Deterministic { intensity } => Ok(1.0 / intensity),
            GapFamily::Pareto { tail_index, intensity } => {
                // x f(x) ~ Pareto(tail_index - 1) up to scale; exact inverse-CDF.
                if tail_index <= 2.0 {
                    return Err(CoverageError::UnboundedExperiencedMean(format!(
                        "pareto tail index {tail_index} <= 2: length-biased mean diverges"
                    )));
                }
                let u: f64 = rng.gen();
                Ok(Self::pareto_scale(tail_index, intensity)
                    * (1.0 - u).powf(-1.0 / (tail_index - 1.0)))
            }
        }
    }
}

/// Closed-form moments for a validated family.
pub fn gap_moments(family: &GapFamily) -> Result<GapMoments, CoverageError> {
    family.validate()?;
    let l = family.intensity();
    let (second, third) = match *family {
        GapFamily::Exponential { .. } => {
            (Moment::Finite(2.0 / (l * l)), Moment::Finite(6.0 / (l * l * l)))
        }
        GapFamily::Gamma { shape: a, .. } => (
            Moment::Finite((1.0 + 1.0 / a) / (l * l)),
            Moment::Finite((1.0 + 1.0 / a) * (1.0 + 2.0 / a) / (l * l * l)),
        ),
        GapFamily::Deterministic { .. } => {
            (Moment::Finite(1.0 / (l * l)), Moment::Finite(1.0 / (l * l * l)))
        }
        GapFamily::Pareto { tail_index: al, .. } => {
            let xm = GapFamily::pareto_scale(al, l);
            let second = if al > 2.0 {
                Moment::Finite(al * xm * xm / (al - 2.0))
            } else {
                Moment::Divergent
            };
            let third = if al > 3.0 {
                Moment::Finite(al * xm * xm * xm / (al - 3.0))
            } else {
                Moment::Divergent
            };
            (second, third)
        }
    };
    let mean = 1.0 / l;
    let cv = match second {
        Moment::Finite(m2) => Moment::Finite((m2 / (mean * mean) - 1.0).max(0.0).sqrt()),
        Moment::Divergent => Moment::Divergent,
    };
    let multiplier = match cv {
        Moment::Finite(c) => Moment::Finite(1.0 + c * c),
        Moment::Divergent => Moment::Divergent,
    };
    Ok(GapMoments { mean, second, third, cv, multiplier })
}

/// Mean experienced variance `(1 + CV^2) / (6 lambda)`; errors when the
/// second gap moment diverges (Pareto tail index <= 2), since no finite
/// target exists.
pub fn experienced_variance_general(family: &GapFamily) -> Result<f64, CoverageError> {
    let moments = gap_moments(family)?;
    let multiplier = moments.multiplier.required("experienced variance needs a finite second gap moment")?;
    Ok(multiplier / (6.0 * family.intensity()))
}

/// Renewal landscape: i.i.d. spacings from `family` walked from the origin,
/// boundary-pinned like the Poisson construction.
pub fn renewal_landscape(
    family: &GapFamily,
    domain_length: f64,
    seed: u64,
) -> Result<KnowledgeSet, CoverageError> {
    family.validate()?;
    if !(domain_length.is_finite() && domain_length > 0.0) {
        return Err(CoverageError::BadArgument(format!(
            "domain length must be positive, got {domain_length}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut anchors = Vec::new();
    let mut position = 0.0;
    loop {
        position += family.sample_gap(&mut rng);
        if position >= domain_length {
            break;
        }
        anchors.push(position);
    }
    Ok(KnowledgeSet::from_interior_anchors(anchors, domain_length, &mut rng))
}

/// Scale a base landscape from `lambda0` to `lambda_s` by superposing an
/// independent Poisson(lambda_s - lambda0) anchor set. New anchor values are
/// drawn left to right from the bridge posterior given everything already
/// known, so the joint law is the lambda_s landscape while posterior variance
/// can only fall: every probe satisfies `sigma_s^2(x) <= sigma_0^2(x)`.
pub fn couple_and_scale(
    base: &KnowledgeSet,
    lambda0: f64,
    lambda_s: f64,
    seed: u64,
) -> Result<KnowledgeSet, CoverageError> {
    if !(lambda0.is_finite() && lambda0 > 0.0) || !(lambda_s.is_finite() && lambda_s > 0.0) {
        return Err(CoverageError::BadArgument(format!(
            "intensities must be positive, got {lambda0} and {lambda_s}"
        )));
    }
    if lambda_s <= lambda0 {
        return Err(CoverageError::NotAScaleUp { base: lambda0, scaled: lambda_s });
    }
    let mut rng = seeded_rng(seed);
    let length = base.domain_length();
    let rate = (lambda_s - lambda0) * length;
    let count = Poisson::new(rate).expect("positive rate").sample(&mut rng) as usize;
    let mut new_anchors: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..length)).collect();
    new_anchors.sort_by(f64::total_cmp);
    let mut scaled = base.clone();
    for x in new_anchors {
        // Skip boundary-exact or duplicate draws (measure zero).
        if x <= 0.0 || scaled.anchors().binary_search_by(|a| a.total_cmp(&x)).is_ok() {
            continue;
        }
        let value = scaled.sample_bridge_value_with(x, &mut rng)?;
        scaled.insert_anchor(x, value)?;
    }
    Ok(scaled)
}

/// Regularity knob `r` in [0,1] mapping linearly to gap dispersion CV = 1-r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityIndex {
    r: f64,
}

impl RegularityIndex {
    pub fn new(r: f64) -> Result<Self, CoverageError> {
        if r.is_finite() && (0.0..=1.0).contains(&r) {
            Ok(Self { r })
        } else {
            Err(CoverageError::BadRegularity(r))
        }
    }

    pub fn value(&self) -> f64 {
        self.r
    }

    pub fn cv(&self) -> f64 {
        1.0 - self.r
    }
}

/// Benchmark vs. experienced reliability at one (lambda, q, CV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeReport {
    /// `6 lambda q`: the ratio a gap-uniform benchmark sees.
    pub r_bench: f64,
    /// `6 lambda q / (1 + CV^2)`: the ratio experienced by uniform tasks.
    pub r_exp: f64,
    /// `r_exp / r_bench = 1 / (1 + CV^2)`.
    pub ratio: f64,
}

pub fn reliability_wedge(intensity: f64, q: f64, cv: f64) -> Result<WedgeReport, CoverageError> {
    if !(intensity.is_finite() && intensity > 0.0) || !(q.is_finite() && q > 0.0) {
        return Err(CoverageError::BadArgument(format!(
            "intensity and stakes must be positive, got {intensity}, {q}"
        )));
    }
    if !(cv.is_finite() && cv >= 0.0) {
        return Err(CoverageError::BadArgument(format!("CV must be nonnegative, got {cv}")));
    }
    let r_bench = 6.0 * intensity * q;
    let ratio = 1.0 / (1.0 + cv * cv);
    Ok(WedgeReport { r_bench, r_exp: r_bench * ratio, ratio })
}

/// Marginal rate of substitution between scale and regularity on the blind
/// value surface: `2 (1-r) lambda / (1 + (1-r)^2)`.
pub fn mrs_scale_regularity(intensity: f64, regularity: RegularityIndex) -> Result<f64, CoverageError> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(CoverageError::BadArgument(format!(
            "intensity must be positive, got {intensity}"
        )));
    }
    let cv = regularity.cv();
    Ok(2.0 * cv * intensity / (1.0 + cv * cv))
}

/// Drop in mean experienced variance from splitting one gap of length `x`
/// (inside a domain of total length `l`) at fraction `alpha`:
/// `alpha (1-alpha) x^2 / (3 l)`.
pub fn split_gap_gain(x: f64, alpha: f64, l: f64) -> Result<f64, CoverageError> {
    if !(x.is_finite() && x > 0.0 && l.is_finite() && l > 0.0 && x <= l) {
        return Err(CoverageError::BadArgument(format!(
            "need 0 < gap <= domain, got gap {x}, domain {l}"
        )));
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
        return Err(CoverageError::BadArgument(format!(
            "split fraction must lie strictly inside (0,1), got {alpha}"
        )));
    }
    Ok(alpha * (1.0 - alpha) * x * x / (3.0 * l))
}

/// Audit of a finite gap list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteVarianceReport {
    /// Mean variance experienced by uniform tasks: `sum X^2 / (6 sum X)`.
    pub user_mean: f64,
    /// Mean variance a gap-uniform audit reports: `L / (6 n)`.
    pub gap_uniform_mean: f64,
    /// `user_mean / gap_uniform_mean = n sum X^2 / (sum X)^2 = 1 + CV^2`.
    pub penalty: f64,
    /// Mean gap a uniform task lands in: `sum X^2 / sum X`.
    pub experienced_mean_gap: f64,
    /// Plain average gap: `sum X / n`.
    pub naive_mean_gap: f64,
}

pub fn discrete_experienced_variance(gaps: &[f64]) -> Result<DiscreteVarianceReport, CoverageError> {
    if gaps.is_empty() {
        return Err(CoverageError::BadArgument("gap list is empty".into()));
    }
    if let Some(bad) = gaps.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(CoverageError::BadArgument(format!("gap lengths must be positive, got {bad}")));
    }
    let n = gaps.len() as f64;
    let total: f64 = gaps.iter().sum();
    let total_sq: f64 = gaps.iter().map(|g| g * g).sum();
    Ok(DiscreteVarianceReport {
        user_mean: total_sq / (6.0 * total),
        gap_uniform_mean: total / (6.0 * n),
        penalty: n * total_sq / (total * total),
        experienced_mean_gap: total_sq / total,
        naive_mean_gap: total / n,
    })
}

/// Read a gap list from CSV with header `gap_length`, one length per row.
pub fn read_gap_lengths_csv(content: &str) -> Result<Vec<f64>, CoverageError> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "gap_length" => {}
        Some((_, header)) => {
            return Err(CoverageError::BadGapFile {
                line: 1,
                message: format!("expected header 'gap_length', got '{}'", header.trim()),
            })
        }
        None => return Err(CoverageError::BadGapFile { line: 1, message: "empty file".into() }),
    }
    let mut gaps = Vec::new();
    for (idx, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| CoverageError::BadGapFile {
            line: idx + 1,
            message: format!("not a number: '{trimmed}'"),
        })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(CoverageError::BadGapFile {
                line: idx + 1,
                message: format!("gap length must be positive, got {value}"),
            });
        }
        gaps.push(value);
    }
    Ok(gaps)
}

/// Conditional experienced mean gap among gaps below a cap, for Pareto
/// families: `E[X^2 1(X<=c)] / E[X 1(X<=c)]`. Grows without bound as the cap
/// rises whenever the tail index is at most 2, which is the diagnostic the
/// divergence flag points at.
pub fn pareto_truncated_growth(
    tail_index: f64,
    intensity: f64,
    caps: &[f64],
) -> Result<Vec<(f64, f64)>, CoverageError> {
    let family = GapFamily::Pareto { tail_index, intensity };
    family.validate()?;
    let xm = GapFamily::pareto_scale(tail_index, intensity);
    let al = tail_index;
    let mut out = Vec::with_capacity(caps.len());
    for &c in caps {
        if !(c.is_finite() && c > xm) {
            return Err(CoverageError::BadArgument(format!(
                "cap must exceed the pareto scale {xm}, got {c}"
            )));
        }
        let first = al * xm.powf(al) * (xm.powf(1.0 - al) - c.powf(1.0 - al)) / (al - 1.0);
        let second = if (al - 2.0).abs() < 1e-12 {
            2.0 * xm * xm * (c / xm).ln()
        } else {
            al * xm.powf(al) * (c.powf(2.0 - al) - xm.powf(2.0 - al)) / (2.0 - al)
        };
        out.push((c, second / first));
    }
    Ok(out)
}

/// Outcome of the planar Voronoi size-bias check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiReport {
    /// Average estimated cell area (box area / n by construction).
    pub typical_mean: f64,
    /// Mean estimated area of the cell containing an independent probe.
    pub size_biased_mean_empirical: f64,
    /// `sum A^2 / sum A` over the estimated areas.
    pub size_biased_mean_identity: f64,
    /// Combined standard error for the empirical-vs-identity comparison.
    pub combined_se: f64,
}

/// Scatter `n_points` uniformly in a `box_side` square, estimate each Voronoi
/// cell's area by nearest-anchor probe counting, and compare the size-biased
/// mean cell area measured two ways.
///
/// Two independent probe batches of `n_probes` each are used: batch one
/// estimates areas (`area = box * count / n_probes`), batch two draws fresh
/// probes and averages the batch-one area of the cell each probe lands in.
/// With a single batch the two estimators are the same arithmetic expression
/// and the comparison would be vacuous. Error accounting: the empirical side
/// uses the batch-two sample SE; the identity side uses a multinomial delta
/// method on the batch-one counts, variance `(4/N)(sum p^3 - (sum p^2)^2)`
/// on `sum p_hat^2`.
pub fn voronoi_size_bias_check(
    n_points: usize,
    box_side: f64,
    n_probes: usize,
    seed: u64,
) -> Result<VoronoiReport, CoverageError> {
    if n_points == 0 {
        return Err(CoverageError::BadArgument("need at least one point".into()));
    }
    if n_probes == 0 {
        return Err(CoverageError::BadArgument("need at least one probe".into()));
    }
    if !(box_side.is_finite() && box_side > 0.0) {
        return Err(CoverageError::BadArgument(format!("box side must be positive, got {box_side}")));
    }
    let mut rng = seeded_rng(seed);
    let points: Vec<(f64, f64)> = (0..n_points)
        .map(|_| (rng.gen_range(0.0..box_side), rng.gen_range(0.0..box_side)))
        .collect();
    for (i, a) in points.iter().enumerate() {
        for b in points.iter().skip(i + 1) {
            if a == b {
                return Err(CoverageError::BadArgument(
                    "degenerate configuration: coincident points under this seed".into(),
                ));
            }
        }
    }
    let nearest = |x: f64, y: f64| -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, &(px, py)) in points.iter().enumerate() {
            let d = (x - px) * (x - px) + (y - py) * (y - py);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    };
    let box_area = box_side * box_side;

    // Batch one: areas by probe counting.
    let mut counts = vec![0u64; n_points];
    for _ in 0..n_probes {
        let (x, y) = (rng.gen_range(0.0..box_side), rng.gen_range(0.0..box_side));
        counts[nearest(x, y)] += 1;
    }
    let np = n_probes as f64;
    let areas: Vec<f64> = counts.iter().map(|&c| box_area * c as f64 / np).collect();
    let typical_mean = areas.iter().sum::<f64>() / n_points as f64;

    let p_hat: Vec<f64> = counts.iter().map(|&c| c as f64 / np).collect();
    let sum_p2: f64 = p_hat.iter().map(|p| p * p).sum();
    let sum_p3: f64 = p_hat.iter().map(|p| p * p * p).sum();
    let identity = box_area * sum_p2; // sum A^2 / sum A with sum A = box_area
    let identity_var = box_area * box_area * (4.0 / np) * (sum_p3 - sum_p2 * sum_p2).max(0.0);

    // Batch two: independent probes looking up batch-one areas.
    let landed: Vec<f64> = (0..n_probes)
        .map(|_| {
            let (x, y) = (rng.gen_range(0.0..box_side), rng.gen_range(0.0..box_side));
            areas[nearest(x, y)]
        })
        .collect();
    let empirical = estimate_from_samples(&landed);

    Ok(VoronoiReport {
        typical_mean,
        size_biased_mean_empirical: empirical.mean,
        size_biased_mean_identity: identity,
        combined_se: (empirical.se * empirical.se + identity_var).sqrt(),
    })
}

/// Mean posterior variance over uniform interior tasks of a renewal
/// landscape, pooled over replicate landscapes. The measured statistic behind
/// [`experienced_variance_general`].
pub fn renewal_variance_mc(
    family: &GapFamily,
    domain_length: f64,
    replicates: u64,
    tasks_per_landscape: usize,
    base_seed: u64,
) -> Result<crate::mc::McEstimate, CoverageError> {
    family.validate()?;
    let mut all = Vec::with_capacity(replicates as usize * tasks_per_landscape);
    for i in 0..replicates {
        let ks = renewal_landscape(family, domain_length, crate::rng::derive_seed(base_seed, 2 * i))?;
        let mut task_rng = crate::rng::derived_rng(base_seed, 2 * i + 1);
        for x in ks.sample_interior_tasks(tasks_per_landscape, &mut task_rng) {
            all.push(ks.posterior_at(x)?.variance);
        }
    }
    Ok(estimate_from_samples(&all))
}
