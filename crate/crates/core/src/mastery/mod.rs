//! Mastery dynamics: learning an error landscape well enough to delegate.
//!
//! A delegator watches an agent work at grid locations, fits a Gaussian
//! process to noisy error observations, and delegates only where the
//! conservative estimate `mean + sqrt(beta) * sd` stays at or below the
//! stakes. This module provides the active-learning loop (uncertainty
//! sampling with realized-information accounting and a hitting-time speed
//! limit), the abstention-trap construction for compactly supported
//! kernels, the one-step spillover bound for a targeted improvement, the
//! safe-fringe geometry of a single bridge gap, and the two-margin
//! accounting identity for delegated value.

pub mod gp;
pub mod kernel;

pub use gp::{Belief, GpModel};
pub use kernel::{Kernel, MaternSmoothness};

use crate::mc::{estimate_from_samples, McEstimate};
use crate::rng::{derive_seed, seeded_rng};
use rand_distr::{Distribution, Normal};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MasteryError {
    #[error("invalid kernel: {0}")]
    BadKernel(String),
    #[error("observation noise variance must be positive and finite, got {0}")]
    BadNoise(f64),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("invalid error map: {0}")]
    BadMap(String),
    #[error("{0}")]
    MismatchedGrid(&'static str),
    #[error("gram factorization failed even with jitter ({size} observations)")]
    FactorizationFailed { size: usize },
    #[error("intervention point {location} is outside the current safe set")]
    OutOfSafeSet { location: f64 },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error("trap construction precondition violated: {0}")]
    TrapPrecondition(&'static str),
}

/// Default confidence multiplier for the conservative estimate, a two-sigma
/// band on the error map.
pub const DEFAULT_BETA: f64 = 4.0;

fn validate_grid(grid: &[f64]) -> Result<(), String> {
    if grid.is_empty() {
        return Err("grid must be nonempty".to_string());
    }
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(format!("grid locations must be finite, got {bad}"));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(format!("grid must be strictly increasing, got {} then {}", w[0], w[1]));
    }
    Ok(())
}

/// Settings for a mastery run: confidence multiplier, stakes, task grid,
/// and number of probes.
#[derive(Debug, Clone, PartialEq)]
pub struct MasteryConfig {
    beta: f64,
    stakes: f64,
    grid: Vec<f64>,
    horizon: usize,
}

impl MasteryConfig {
    /// `beta` may be zero, which turns the conservative estimate into the
    /// plain posterior mean.
    pub fn new(beta: f64, stakes: f64, grid: Vec<f64>, horizon: usize) -> Result<Self, MasteryError> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(MasteryError::BadConfig(format!(
                "confidence multiplier must be finite and nonnegative, got {beta}"
            )));
        }
        if !(stakes.is_finite() && stakes > 0.0) {
            return Err(MasteryError::BadConfig(format!(
                "stakes must be positive and finite, got {stakes}"
            )));
        }
        validate_grid(&grid).map_err(MasteryError::BadConfig)?;
        if horizon == 0 {
            return Err(MasteryError::BadConfig("horizon must be at least one probe".to_string()));
        }
        Ok(Self { beta, stakes, grid, horizon })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn stakes(&self) -> f64 {
        self.stakes
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

/// A ground-truth error magnitude at each grid location.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap {
    locations: Vec<f64>,
    values: Vec<f64>,
}

impl ErrorMap {
    pub fn new(locations: Vec<f64>, values: Vec<f64>) -> Result<Self, MasteryError> {
        validate_grid(&locations).map_err(MasteryError::BadMap)?;
        if values.len() != locations.len() {
            return Err(MasteryError::BadMap(format!(
                "{} locations vs {} values",
                locations.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(MasteryError::BadMap(format!(
                "error values must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(Self { locations, values })
    }

    pub fn from_fn(locations: &[f64], f: impl Fn(f64) -> f64) -> Result<Self, MasteryError> {
        Self::new(locations.to_vec(), locations.iter().map(|&x| f(x)).collect())
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// Upper confidence estimate `mean + sqrt(beta) * sd` of the error at `x`.
pub fn conservative_estimate(model: &GpModel, beta: f64, x: f64) -> Result<f64, MasteryError> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "confidence multiplier must be finite and nonnegative, got {beta}"
        )));
    }
    let b = model.posterior(x)?;
    Ok(b.mean + beta.sqrt() * b.variance.sqrt())
}

/// Grid indices whose conservative estimate stays at or below the stakes.
pub fn safe_set(
    model: &GpModel,
    beta: f64,
    stakes: f64,
    grid: &[f64],
) -> Result<Vec<usize>, MasteryError> {
    if !(stakes.is_finite() && stakes > 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "stakes must be positive and finite, got {stakes}"
        )));
    }
    let mut safe = Vec::new();
    for (i, &x) in grid.iter().enumerate() {
        if conservative_estimate(model, beta, x)? <= stakes {
            safe.push(i);
        }
    }
    Ok(safe)
}

/// Per-location delegation decision over the grid.
pub fn delegation_policy(
    model: &GpModel,
    beta: f64,
    stakes: f64,
    grid: &[f64],
) -> Result<Vec<bool>, MasteryError> {
    let safe = safe_set(model, beta, stakes, grid)?;
    let mut policy = vec![false; grid.len()];
    for i in safe {
        policy[i] = true;
    }
    Ok(policy)
}

/// One probe of an uncertainty-sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// 1-based probe number.
    pub step: usize,
    pub grid_index: usize,
    pub location: f64,
    /// Noisy error observation returned by the probe.
    pub observation: f64,
    /// Largest posterior variance over the grid after the probe.
    pub worst_uncertainty: f64,
    /// Cumulative information picked up so far, in nats.
    pub realized_information: f64,
    pub safe_set_size: usize,
}

/// Full record of an uncertainty-sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct MasteryTrace {
    /// Largest posterior variance over the grid before any probe.
    pub prior_worst_uncertainty: f64,
    pub noise_variance: f64,
    pub steps: Vec<TraceStep>,
    /// First probe count at which the worst uncertainty fell to the noise
    /// floor; `Some(0)` when the prior already satisfies it, `None` when
    /// the run ended above the floor.
    pub hitting_time: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MasteryRun {
    pub model: GpModel,
    pub trace: MasteryTrace,
}

/// Probe the largest-variance grid point for `horizon` steps, observing the
/// true map plus Gaussian noise, and record uncertainty, information, and
/// safe-set growth. Ties in the variance argmax resolve to the smallest
/// grid index.
pub fn uncertainty_sampling_run(
    true_map: &ErrorMap,
    mut model: GpModel,
    config: &MasteryConfig,
    seed: u64,
) -> Result<MasteryRun, MasteryError> {
    if config.grid() != true_map.locations() {
        return Err(MasteryError::MismatchedGrid("run grid must equal the error map locations"));
    }
    let grid = config.grid();
    let noise_variance = model.noise_variance();
    let noise = Normal::new(0.0, noise_variance.sqrt()).expect("noise validated by the model");
    let mut rng = seeded_rng(seed);
    let sqrt_beta = config.beta().sqrt();
    let worst = |beliefs: &[Belief]| {
        beliefs.iter().map(|b| b.variance).fold(f64::NEG_INFINITY, f64::max)
    };
    let safe_count = |beliefs: &[Belief]| {
        beliefs
            .iter()
            .filter(|b| b.mean + sqrt_beta * b.variance.sqrt() <= config.stakes())
            .count()
    };

    let mut beliefs = model.posterior_grid(grid)?;
    let prior_worst_uncertainty = worst(&beliefs);
    let mut hitting_time = (prior_worst_uncertainty <= noise_variance).then_some(0);
    let mut information = 0.0;
    let mut steps = Vec::with_capacity(config.horizon());
    for step in 1..=config.horizon() {
        let mut best = 0;
        for i in 1..beliefs.len() {
            if beliefs[i].variance > beliefs[best].variance {
                best = i;
            }
        }
        information += 0.5 * (1.0 + beliefs[best].variance / noise_variance).ln();
        let observation = true_map.values()[best] + noise.sample(&mut rng);
        model.observe(grid[best], observation)?;
        beliefs = model.posterior_grid(grid)?;
        let worst_uncertainty = worst(&beliefs);
        if hitting_time.is_none() && worst_uncertainty <= noise_variance {
            hitting_time = Some(step);
        }
        steps.push(TraceStep {
            step,
            grid_index: best,
            location: grid[best],
            observation,
            worst_uncertainty,
            realized_information: information,
            safe_set_size: safe_count(&beliefs),
        });
    }
    Ok(MasteryRun {
        model,
        trace: MasteryTrace {
            prior_worst_uncertainty,
            noise_variance,
            steps,
            hitting_time,
        },
    })
}

/// Steps after the hitting time whose worst uncertainty exceeds the
/// information budget `4 * noise * I_t / (t - t0)`. Empty when the hitting
/// time was never reached, in which case the bound is vacuous.
pub fn speed_limit_violations(trace: &MasteryTrace) -> Vec<usize> {
    let Some(t0) = trace.hitting_time else {
        return Vec::new();
    };
    trace
        .steps
        .iter()
        .filter(|s| s.step > t0)
        .filter(|s| {
            let budget =
                4.0 * trace.noise_variance * s.realized_information / (s.step - t0) as f64;
            s.worst_uncertainty > budget
        })
        .map(|s| s.step)
        .collect()
}

/// One probe of a trapped run: what was chosen (None on abstention), what
/// came back, and how large the safe set was at choice time.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapStep {
    pub step: usize,
    pub choice: Option<(usize, f64)>,
    pub observation: Option<f64>,
    pub safe_set_size: usize,
}

/// Paired records of the same policy run against the baseline map and
/// against a hidden map that is better outside the explored region.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapReport {
    pub baseline: Vec<TrapStep>,
    pub hidden: Vec<TrapStep>,
    /// First step at which the two records differ.
    pub divergence_step: Option<usize>,
}

/// Run the safe uncertainty-sampling policy in two worlds that share prior
/// data and per-step noise but answer probes from different maps. With a
/// compactly supported kernel, a hidden map at or below the baseline, and
/// exact agreement wherever the prior data has covariance, the records stay
/// bit-identical until a probe lands where the maps differ; absent forced
/// probes the policy cannot reach such a point, so the better hidden world
/// is never discovered. `forced_probes` are `(step, grid_index)` overrides
/// that probe regardless of safety.
#[allow(clippy::too_many_arguments)]
pub fn abstention_trap_experiment(
    map: &ErrorMap,
    hidden: &ErrorMap,
    prior: &[(f64, f64)],
    config: &MasteryConfig,
    kernel: Kernel,
    noise_variance: f64,
    forced_probes: &[(usize, usize)],
    seed: u64,
) -> Result<TrapReport, MasteryError> {
    let Some(radius) = kernel.support_radius() else {
        return Err(MasteryError::TrapPrecondition(
            "the construction needs a compactly supported kernel",
        ));
    };
    if map.locations() != hidden.locations() {
        return Err(MasteryError::MismatchedGrid("baseline and hidden maps must share locations"));
    }
    if config.grid() != map.locations() {
        return Err(MasteryError::MismatchedGrid("run grid must equal the error map locations"));
    }
    if hidden.values().iter().zip(map.values()).any(|(h, m)| h > m) {
        return Err(MasteryError::TrapPrecondition(
            "hidden map must lie at or below the baseline map",
        ));
    }
    for &(p, v) in prior {
        if !p.is_finite() || !v.is_finite() {
            return Err(MasteryError::BadArgument(format!(
                "prior observations must be finite, got ({p}, {v})"
            )));
        }
    }
    for (i, &x) in config.grid().iter().enumerate() {
        let reachable = prior.iter().any(|&(p, _)| (x - p).abs() < radius);
        if reachable && map.values()[i].to_bits() != hidden.values()[i].to_bits() {
            return Err(MasteryError::TrapPrecondition(
                "maps must agree exactly wherever the prior data has covariance",
            ));
        }
    }
    let mut forced = HashMap::new();
    for &(step, index) in forced_probes {
        if step == 0 || step > config.horizon() {
            return Err(MasteryError::BadArgument(format!(
                "forced probe step {step} outside 1..={}",
                config.horizon()
            )));
        }
        if index >= config.grid().len() {
            return Err(MasteryError::BadArgument(format!(
                "forced probe index {index} outside the grid"
            )));
        }
        if forced.insert(step, index).is_some() {
            return Err(MasteryError::BadArgument(format!("duplicate forced probe at step {step}")));
        }
    }

    let build = || -> Result<GpModel, MasteryError> {
        let mut model = GpModel::new(kernel, noise_variance)?;
        for &(p, v) in prior {
            model.observe(p, v)?;
        }
        Ok(model)
    };
    let mut worlds = [(build()?, map), (build()?, hidden)];
    let mut records: [Vec<TrapStep>; 2] = [Vec::new(), Vec::new()];
    let noise = Normal::new(0.0, noise_variance.sqrt()).expect("noise validated by the model");
    let sqrt_beta = config.beta().sqrt();
    for step in 1..=config.horizon() {
        // One disturbance per step, derived from the step number alone, so
        // both worlds see the same draw even after their histories diverge.
        let eta = noise.sample(&mut seeded_rng(derive_seed(seed, step as u64)));
        for ((model, world_map), record) in worlds.iter_mut().zip(records.iter_mut()) {
            let beliefs = model.posterior_grid(config.grid())?;
            let safe: Vec<usize> = (0..beliefs.len())
                .filter(|&i| {
                    beliefs[i].mean + sqrt_beta * beliefs[i].variance.sqrt() <= config.stakes()
                })
                .collect();
            let chosen = forced.get(&step).copied().or_else(|| {
                let mut best: Option<usize> = None;
                for &i in &safe {
                    if best.is_none_or(|b| beliefs[i].variance > beliefs[b].variance) {
                        best = Some(i);
                    }
                }
                best
            });
            let (choice, observation) = match chosen {
                Some(i) => {
                    let y = world_map.values()[i] + eta;
                    model.observe(config.grid()[i], y)?;
                    (Some((i, config.grid()[i])), Some(y))
                }
                None => (None, None),
            };
            record.push(TrapStep { step, choice, observation, safe_set_size: safe.len() });
        }
    }
    let [baseline, hidden_record] = records;
    let divergence_step =
        baseline.iter().zip(&hidden_record).position(|(a, b)| a != b).map(|k| k + 1);
    Ok(TrapReport { baseline, hidden: hidden_record, divergence_step })
}

/// Spillover of one targeted improvement onto a single grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub location: f64,
    pub prior_vhat: f64,
    pub expected_vhat: McEstimate,
    /// Drop of the conservative estimate, `prior_vhat` minus the post-probe
    /// value, averaged over the observation noise.
    pub drop: McEstimate,
    /// Guaranteed drop `cov / (var + noise) * margin` from the update rule.
    pub bound: f64,
}

/// Monte Carlo check of the one-step spillover bound around an intervention.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierReport {
    pub intervention_location: f64,
    pub improved_value: f64,
    /// Margin by which the intervention beats the current belief there.
    pub improvement_margin: f64,
    pub points: Vec<FrontierPoint>,
}

/// Observe `improved_value` plus noise at a point inside the current safe
/// set, many times from `seed`, and measure how the conservative estimate
/// moves at every grid point against the guaranteed drop.
#[allow(clippy::too_many_arguments)]
pub fn frontier_spillover_step(
    model: &GpModel,
    beta: f64,
    stakes: f64,
    grid: &[f64],
    intervention_location: f64,
    improved_value: f64,
    n_mc: u64,
    seed: u64,
) -> Result<FrontierReport, MasteryError> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "confidence multiplier must be finite and nonnegative, got {beta}"
        )));
    }
    if !(stakes.is_finite() && stakes > 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "stakes must be positive and finite, got {stakes}"
        )));
    }
    if grid.is_empty() {
        return Err(MasteryError::BadArgument("grid must be nonempty".to_string()));
    }
    if !improved_value.is_finite() {
        return Err(MasteryError::BadArgument(format!(
            "improved value must be finite, got {improved_value}"
        )));
    }
    if n_mc == 0 {
        return Err(MasteryError::BadArgument("need at least one noise draw".to_string()));
    }
    let sqrt_beta = beta.sqrt();
    let at = model.posterior(intervention_location)?;
    // Comparison kept in the NaN-rejecting direction: membership must fail
    // if the score is not a number.
    let safe = at.mean + sqrt_beta * at.variance.sqrt() <= stakes;
    if !safe {
        return Err(MasteryError::OutOfSafeSet { location: intervention_location });
    }
    let improvement_margin = at.mean - improved_value;
    let denominator = at.variance + model.noise_variance();
    let mut prior_points = Vec::with_capacity(grid.len());
    for &x in grid {
        let b = model.posterior(x)?;
        let covariance = model.posterior_covariance(x, intervention_location)?;
        prior_points.push((
            x,
            b.mean + sqrt_beta * b.variance.sqrt(),
            covariance / denominator * improvement_margin,
        ));
    }
    let noise =
        Normal::new(0.0, model.noise_variance().sqrt()).expect("noise validated by the model");
    let mut rng = seeded_rng(seed);
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(n_mc as usize); grid.len()];
    for _ in 0..n_mc {
        let mut next = model.clone();
        next.observe(intervention_location, improved_value + noise.sample(&mut rng))?;
        for (i, &x) in grid.iter().enumerate() {
            let b = next.posterior(x)?;
            draws[i].push(b.mean + sqrt_beta * b.variance.sqrt());
        }
    }
    let points = prior_points
        .into_iter()
        .zip(draws)
        .map(|((location, prior_vhat, bound), values)| {
            let drops: Vec<f64> = values.iter().map(|v| prior_vhat - v).collect();
            FrontierPoint {
                location,
                prior_vhat,
                expected_vhat: estimate_from_samples(&values),
                drop: estimate_from_samples(&drops),
                bound,
            }
        })
        .collect();
    Ok(FrontierReport { intervention_location, improved_value, improvement_margin, points })
}

/// Safe region of one bridge gap under the idealized posterior whose
/// variance at depth `d` into a gap of length `x` is `d (x - d) / x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FringeDescription {
    WholeGapSafe,
    /// Only a strip of `length` next to each anchor is safe; the middle
    /// `unsafe_middle = gap - 2 length` is not.
    Fringes { length: f64, unsafe_middle: f64 },
}

/// The whole gap is safe iff `gap <= 4 stakes`. Otherwise the safe fringe
/// depth is `(gap - sqrt(gap (gap - 4 stakes))) / 2`, computed in the
/// algebraically equal form `2 stakes gap / (gap + sqrt(...))` which avoids
/// cancellation for wide gaps.
pub fn bridge_fringe(gap: f64, stakes: f64) -> Result<FringeDescription, MasteryError> {
    if !(gap.is_finite() && gap > 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "gap length must be positive and finite, got {gap}"
        )));
    }
    if !(stakes.is_finite() && stakes > 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "stakes must be positive and finite, got {stakes}"
        )));
    }
    if gap <= 4.0 * stakes {
        return Ok(FringeDescription::WholeGapSafe);
    }
    let root = (gap * (gap - 4.0 * stakes)).sqrt();
    let length = 2.0 * stakes * gap / (gap + root);
    Ok(FringeDescription::Fringes { length, unsafe_middle: gap - 2.0 * length })
}

/// Split of a delegated-value change into improvement on already-delegated
/// tasks and the value of tasks entering or leaving the delegated set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMarginReport {
    pub realized_before: f64,
    pub realized_after: f64,
    /// Value gained on tasks delegated before, from their errors improving.
    pub intensive: f64,
    /// Value of membership changes, priced at the new error map.
    pub extensive: f64,
    /// `intensive + extensive`, equal to `realized_after - realized_before`.
    pub total: f64,
}

/// Decompose the change in weighted delegated value between two error maps
/// and two delegation policies on the same task list. Each delegated task
/// contributes `weight * (1 - error / stakes)`; tasks kept by people
/// contribute zero.
pub fn two_margin_decomposition(
    before: &[f64],
    after: &[f64],
    policy_before: &[bool],
    policy_after: &[bool],
    weights: &[f64],
    stakes: f64,
) -> Result<TwoMarginReport, MasteryError> {
    let n = before.len();
    if n == 0 {
        return Err(MasteryError::BadArgument("need at least one task".to_string()));
    }
    if after.len() != n || policy_before.len() != n || policy_after.len() != n || weights.len() != n
    {
        return Err(MasteryError::BadArgument(format!(
            "mismatched lengths: {} before, {} after, {} and {} policy entries, {} weights",
            n,
            after.len(),
            policy_before.len(),
            policy_after.len(),
            weights.len()
        )));
    }
    if !(stakes.is_finite() && stakes > 0.0) {
        return Err(MasteryError::BadArgument(format!(
            "stakes must be positive and finite, got {stakes}"
        )));
    }
    if let Some(bad) = before.iter().chain(after).find(|v| !v.is_finite()) {
        return Err(MasteryError::BadArgument(format!("error values must be finite, got {bad}")));
    }
    if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(MasteryError::BadArgument(format!(
            "weights must be finite and nonnegative, got {bad}"
        )));
    }
    let weight_sum: f64 = weights.iter().sum();
    if (weight_sum - 1.0).abs() > 1e-9 {
        return Err(MasteryError::BadArgument(format!(
            "weights must sum to one, got {weight_sum}"
        )));
    }

    let mut realized_before = 0.0;
    let mut realized_after = 0.0;
    let mut intensive = 0.0;
    let mut extensive = 0.0;
    for i in 0..n {
        let w = weights[i];
        let p0 = if policy_before[i] { 1.0 } else { 0.0 };
        let p1 = if policy_after[i] { 1.0 } else { 0.0 };
        let utility_after = 1.0 - after[i] / stakes;
        realized_before += w * p0 * (1.0 - before[i] / stakes);
        realized_after += w * p1 * utility_after;
        intensive += w * p0 * (before[i] - after[i]) / stakes;
        extensive += w * (p1 - p0) * utility_after;
    }
    Ok(TwoMarginReport {
        realized_before,
        realized_after,
        intensive,
        extensive,
        total: intensive + extensive,
    })
}

pub fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Cumulative realized information of a full uncertainty-sampling run, per
/// kernel. The curve depends only on probe locations, never on observed
/// values, so it is a clean fingerprint of how fast a kernel family lets
/// uncertainty drain.
#[derive(Debug, Clone, PartialEq)]
pub struct GainCurve {
    pub kernel: String,
    pub realized_information: Vec<f64>,
}

pub fn information_gain_curves(
    kernels: &[Kernel],
    grid: &[f64],
    noise_variance: f64,
    horizon: usize,
    seed: u64,
) -> Result<Vec<GainCurve>, MasteryError> {
    let map = ErrorMap::new(grid.to_vec(), vec![0.0; grid.len()])?;
    let config = MasteryConfig::new(DEFAULT_BETA, 1.0, grid.to_vec(), horizon)?;
    kernels
        .iter()
        .enumerate()
        .map(|(k, kernel)| {
            let model = GpModel::new(*kernel, noise_variance)?;
            let run = uncertainty_sampling_run(&map, model, &config, derive_seed(seed, k as u64))?;
            Ok(GainCurve {
                kernel: kernel.label(),
                realized_information: run
                    .trace
                    .steps
                    .iter()
                    .map(|s| s.realized_information)
                    .collect(),
            })
        })
        .collect()
}
