//! Two-mode inference economics.
//!
//! Reasoning acts as a noisy pseudo-anchor: paying a per-task cost `kappa`
//! replaces local variance `v` with the harmonic contraction
//! `v nf / (v + nf)` against a noise floor `nf`. Utilities are measured so a
//! hypothetical zero-error reasoning pass would net `1 - kappa`. This module
//! covers the per-task mode policy (fast answer, reasoned answer, abstain),
//! blanket mode choice for a blind user, the option value of per-task
//! selection, and the length-bias amplification of reasoning value.

use crate::mc::{run_chunked, McEstimate};
use crate::reliability::normalized_variance;
use crate::rng::derive_seed;
use rand::Rng as _;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReasoningError {
    #[error("stakes must be positive and finite, got {0}")]
    BadStakes(f64),
    #[error("reasoning cost must be nonnegative and finite, got {0}")]
    BadCost(f64),
    #[error("noise floor must be positive and finite, got {0}")]
    BadNoiseFloor(f64),
    #[error("reliability ratio must be positive and finite, got {0}")]
    BadRatio(f64),
    #[error("intensity must be positive and finite, got {0}")]
    BadIntensity(f64),
    #[error("variance must be nonnegative and finite, got {0}")]
    BadVariance(f64),
    #[error("policy was built for stakes {policy}, asked to decide at stakes {given}")]
    InconsistentStakes { given: f64, policy: f64 },
    #[error("need at least {minimum} samples, got {given}")]
    TooFewSamples { given: u64, minimum: u64 },
}

/// Cost and quality of the reasoning mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReasoningConfig {
    cost: f64,
    noise_floor: f64,
}

impl ReasoningConfig {
    pub fn new(cost: f64, noise_floor: f64) -> Result<Self, ReasoningError> {
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(ReasoningError::BadCost(cost));
        }
        if !(noise_floor.is_finite() && noise_floor > 0.0) {
            return Err(ReasoningError::BadNoiseFloor(noise_floor));
        }
        Ok(Self { cost, noise_floor })
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn noise_floor(&self) -> f64 {
        self.noise_floor
    }

    /// Noise floor in normalized-variance units under anchor intensity
    /// `lambda`: `rho = 3 lambda nf`.
    pub fn normalized_floor(&self, intensity: f64) -> Result<f64, ReasoningError> {
        if intensity.is_finite() && intensity > 0.0 {
            Ok(3.0 * intensity * self.noise_floor)
        } else {
            Err(ReasoningError::BadIntensity(intensity))
        }
    }
}

/// Post-reasoning variance `v nf / (v + nf)`; at most `min(v, nf)`, tends to
/// the floor as `v` grows.
pub fn reasoning_variance(v: f64, noise_floor: f64) -> f64 {
    assert!(v >= 0.0, "baseline variance must be nonnegative, got {v}");
    assert!(noise_floor > 0.0, "noise floor must be positive, got {noise_floor}");
    v * noise_floor / (v + noise_floor)
}

/// Gross variance reduction `v - reasoning_variance(v) = v^2 / (v + nf)`;
/// increasing and convex in `v`.
pub fn reasoning_gain(v: f64, noise_floor: f64) -> f64 {
    assert!(v >= 0.0, "baseline variance must be nonnegative, got {v}");
    assert!(noise_floor > 0.0, "noise floor must be positive, got {noise_floor}");
    v * v / (v + noise_floor)
}

/// The three per-task modes, in tie-break priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fast,
    Reason,
    Abstain,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Fast => "fast",
            Mode::Reason => "reason",
            Mode::Abstain => "abstain",
        }
    }
}

/// Mode regions as a function of baseline variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyRegime {
    /// Reasoning is dominated everywhere: fast iff `v <= stakes`, else abstain.
    NeverReason,
    /// Fast below `entry`, reason on `[entry, break_even]`, abstain above.
    /// `break_even` is `+inf` when reasoning never drops below abstention.
    Thresholds { entry: f64, break_even: f64 },
}

/// A mode policy bound to the `(stakes, cost, noise floor)` it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePolicy {
    stakes: f64,
    config: ReasoningConfig,
    regime: PolicyRegime,
}

impl ModePolicy {
    pub fn stakes(&self) -> f64 {
        self.stakes
    }

    pub fn config(&self) -> ReasoningConfig {
        self.config
    }

    pub fn regime(&self) -> PolicyRegime {
        self.regime
    }

    /// `(entry, break_even)` in the thresholds regime.
    pub fn thresholds(&self) -> Option<(f64, f64)> {
        match self.regime {
            PolicyRegime::Thresholds { entry, break_even } => Some((entry, break_even)),
            PolicyRegime::NeverReason => None,
        }
    }
}

/// A decided mode with the utilities it was decided from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDecision {
    pub choice: Mode,
    pub fast_utility: f64,
    pub reason_utility: f64,
}

fn validate_stakes(stakes: f64) -> Result<(), ReasoningError> {
    if stakes.is_finite() && stakes > 0.0 {
        Ok(())
    } else {
        Err(ReasoningError::BadStakes(stakes))
    }
}

/// Utility of answering fast at baseline variance `v`: `1 - v/q`.
pub fn fast_utility(v: f64, stakes: f64) -> f64 {
    1.0 - v / stakes
}

/// Utility of reasoning at baseline variance `v`:
/// `1 - kappa - reasoning_variance(v)/q`.
pub fn reason_utility(v: f64, stakes: f64, config: &ReasoningConfig) -> f64 {
    1.0 - config.cost - reasoning_variance(v, config.noise_floor) / stakes
}

/// Build the cutoff policy for one `(stakes, cost, noise floor)` triple.
///
/// Reasoning is dominated everywhere exactly when `cost > q/(q + nf)`; at the
/// boundary equality the thresholds regime applies (the reasoning region
/// degenerates to the single point `v = q`, where the fast tie-break wins
/// anyway). Otherwise the entry threshold solves the fast/reason
/// indifference quadratic and the break-even point solves reason/abstain
/// indifference, infinite when the noise floor is low enough that reasoning
/// stays profitable at any variance.
pub fn cutoff_policy(
    stakes: f64,
    cost: f64,
    noise_floor: f64,
) -> Result<ModePolicy, ReasoningError> {
    validate_stakes(stakes)?;
    let config = ReasoningConfig::new(cost, noise_floor)?;
    let regime = if cost > stakes / (stakes + noise_floor) {
        PolicyRegime::NeverReason
    } else {
        let kq = cost * stakes;
        let entry = 0.5 * (kq + (kq * kq + 4.0 * kq * noise_floor).sqrt());
        let margin = (1.0 - cost) * stakes;
        let break_even = if noise_floor <= margin {
            f64::INFINITY
        } else {
            margin * noise_floor / (noise_floor - margin)
        };
        PolicyRegime::Thresholds { entry, break_even }
    };
    Ok(ModePolicy { stakes, config, regime })
}

/// Pick the best mode at baseline variance `v`, with ties resolved fast over
/// reason over abstain. `stakes` must match the policy's own, which guards
/// against pairing a policy with the wrong task distribution.
pub fn decide_mode(v: f64, stakes: f64, policy: &ModePolicy) -> Result<ModeDecision, ReasoningError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(ReasoningError::BadVariance(v));
    }
    if stakes != policy.stakes {
        return Err(ReasoningError::InconsistentStakes { given: stakes, policy: policy.stakes });
    }
    let u_f = fast_utility(v, stakes);
    let u_t = reason_utility(v, stakes, &policy.config);
    let choice = match policy.regime {
        // Reasoning is strictly dominated; only the fast break-even matters.
        PolicyRegime::NeverReason => {
            if v <= stakes {
                Mode::Fast
            } else {
                Mode::Abstain
            }
        }
        PolicyRegime::Thresholds { .. } => {
            if u_f >= u_t && u_f >= 0.0 {
                Mode::Fast
            } else if u_t >= 0.0 {
                Mode::Reason
            } else {
                Mode::Abstain
            }
        }
    };
    Ok(ModeDecision { choice, fast_utility: u_f, reason_utility: u_t })
}

/// Blanket-mode comparison for a blind user at reliability ratio `R`.
#[derive(Debug, Clone)]
pub struct BlindModeReport {
    /// Always-fast payoff `1 - 1/R`, exact.
    pub fast: f64,
    /// Always-reason payoff `1 - kappa - E[Z rho/(Z+rho)]/R`, estimated.
    pub reason: McEstimate,
    /// `max(0, fast, reason)` at the estimated mean.
    pub best_blanket: f64,
    /// Which blanket mode attains the max (ties: fast, reason, abstain).
    pub blanket_mode: Mode,
}

fn blanket_argmax(fast: f64, reason: f64) -> (f64, Mode) {
    if fast >= reason && fast >= 0.0 {
        (fast, Mode::Fast)
    } else if reason >= 0.0 {
        (reason, Mode::Reason)
    } else {
        (0.0, Mode::Abstain)
    }
}

/// Estimate the always-reason payoff against the exact always-fast payoff.
/// `rho` is the noise floor in normalized-variance units; the sampler works
/// on the scale-free normalized variance directly, so no landscape is built.
pub fn blind_mode_values(
    ratio: f64,
    cost: f64,
    rho: f64,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<BlindModeReport, ReasoningError> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(ReasoningError::BadRatio(ratio));
    }
    if !(cost.is_finite() && cost >= 0.0) {
        return Err(ReasoningError::BadCost(cost));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(ReasoningError::BadNoiseFloor(rho));
    }
    if n == 0 {
        return Err(ReasoningError::TooFewSamples { given: 0, minimum: 1 });
    }
    let contracted = run_chunked(n, seed, workers, |rng| {
        let z = normalized_variance(rng);
        z * rho / (z + rho)
    });
    let fast = 1.0 - 1.0 / ratio;
    let reason_mean = 1.0 - cost - contracted.mean / ratio;
    let reason = McEstimate { mean: reason_mean, se: contracted.se / ratio, n: contracted.n };
    let (best_blanket, blanket_mode) = blanket_argmax(fast, reason_mean);
    Ok(BlindModeReport { fast, reason, best_blanket, blanket_mode })
}

/// How baseline variance is distributed across tasks in the option-value
/// experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceLaw {
    /// Variance experienced by uniform tasks on Poisson anchors at this
    /// intensity: `Z/(3 lambda)` with `Z` the normalized variance.
    PoissonGapExperience { intensity: f64 },
    /// Every task at the same baseline variance; kills the option value.
    Fixed { variance: f64 },
}

impl VarianceLaw {
    fn validate(&self) -> Result<(), ReasoningError> {
        match *self {
            VarianceLaw::PoissonGapExperience { intensity } => {
                if intensity.is_finite() && intensity > 0.0 {
                    Ok(())
                } else {
                    Err(ReasoningError::BadIntensity(intensity))
                }
            }
            VarianceLaw::Fixed { variance } => {
                if variance.is_finite() && variance >= 0.0 {
                    Ok(())
                } else {
                    Err(ReasoningError::BadVariance(variance))
                }
            }
        }
    }

    fn sample(&self, rng: &mut crate::rng::Rng) -> f64 {
        match *self {
            VarianceLaw::PoissonGapExperience { intensity } => {
                normalized_variance(rng) / (3.0 * intensity)
            }
            VarianceLaw::Fixed { variance } => variance,
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            // E[Z] = 1 in normalized units.
            VarianceLaw::PoissonGapExperience { intensity } => 1.0 / (3.0 * intensity),
            VarianceLaw::Fixed { variance } => variance,
        }
    }
}

/// Option value of per-task mode selection over the best blanket mode.
#[derive(Debug, Clone)]
pub struct OptionValueReport {
    /// `E[max(0, U_F, U_T)]` over the task distribution.
    pub calibrated_modes: McEstimate,
    /// Exact blanket fast payoff `1 - E[v]/q`.
    pub blind_fast: f64,
    /// Estimated blanket reason payoff (independent pilot pass).
    pub blind_reason: McEstimate,
    /// `max(0, blind_fast, blind_reason)`.
    pub blind_modes: f64,
    /// The blanket mode the blind user settles on.
    pub blanket_mode: Mode,
    /// Paired estimate of `calibrated_modes - blind_modes`: every sample is
    /// the per-task best minus the blanket mode's payoff on the same task,
    /// so samples are nonnegative and the comparison needs no cross-run
    /// variance.
    pub gap: McEstimate,
}

/// Estimate the option value of selective reasoning under `law`.
///
/// Two passes with independently derived seeds: a pilot pass estimates the
/// always-reason payoff to pick the blanket mode, then the paired pass
/// scores per-task selection against that fixed blanket on common draws.
pub fn option_value_with_law(
    law: VarianceLaw,
    stakes: f64,
    cost: f64,
    noise_floor: f64,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<OptionValueReport, ReasoningError> {
    law.validate()?;
    validate_stakes(stakes)?;
    let config = ReasoningConfig::new(cost, noise_floor)?;
    const MIN_SAMPLES: u64 = 10_000;
    if n < MIN_SAMPLES {
        return Err(ReasoningError::TooFewSamples { given: n, minimum: MIN_SAMPLES });
    }

    let pilot = run_chunked(n, derive_seed(seed, 0), workers, |rng| {
        let v = law.sample(rng);
        reasoning_variance(v, noise_floor) / stakes
    });
    let blind_fast = 1.0 - law.mean() / stakes;
    let blind_reason_mean = 1.0 - cost - pilot.mean;
    let blind_reason = McEstimate { mean: blind_reason_mean, se: pilot.se, n: pilot.n };
    let (blind_modes, blanket_mode) = blanket_argmax(blind_fast, blind_reason_mean);

    let main_seed = derive_seed(seed, 1);
    let calibrated_modes = run_chunked(n, main_seed, workers, |rng| {
        let v = law.sample(rng);
        let u_f = fast_utility(v, stakes);
        let u_t = reason_utility(v, stakes, &config);
        u_f.max(u_t).max(0.0)
    });
    // Same seed and per-draw consumption as above, so draws pair one-to-one.
    let gap = run_chunked(n, main_seed, workers, |rng| {
        let v = law.sample(rng);
        let u_f = fast_utility(v, stakes);
        let u_t = reason_utility(v, stakes, &config);
        let best = u_f.max(u_t).max(0.0);
        let blanket = match blanket_mode {
            Mode::Fast => u_f,
            Mode::Reason => u_t,
            Mode::Abstain => 0.0,
        };
        best - blanket
    });

    Ok(OptionValueReport {
        calibrated_modes,
        blind_fast,
        blind_reason,
        blind_modes,
        blanket_mode,
        gap,
    })
}

/// Option value under the Poisson-anchor task distribution at `intensity`.
pub fn option_value_mc(
    intensity: f64,
    stakes: f64,
    cost: f64,
    noise_floor: f64,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<OptionValueReport, ReasoningError> {
    option_value_with_law(
        VarianceLaw::PoissonGapExperience { intensity },
        stakes,
        cost,
        noise_floor,
        n,
        seed,
        workers,
    )
}

/// Gross reasoning gain under gap-uniform vs task-uniform sampling.
#[derive(Debug, Clone)]
pub struct AmplificationReport {
    /// `E[gain(X a)]` with `X ~ Exp(lambda)`: what a gap-uniform audit sees.
    pub benchmark_gain: McEstimate,
    /// `E[gain(X* a)]` with `X* ~ Gamma(2, lambda)`: what tasks experience.
    pub experienced_gain: McEstimate,
    /// Paired difference experienced minus benchmark, nonnegative samplewise
    /// under the coupling `X* = X + Exp(lambda)`.
    pub amplification: McEstimate,
}

/// Compare the mean gross reasoning gain over a random gap against the gain
/// over the gap containing a random task. The two gap draws are coupled by
/// `X* = X + Exp(lambda)`, so the length-biased draw dominates samplewise and
/// the difference estimate carries only the coupling's own variance.
pub fn inspection_amplification_mc(
    intensity: f64,
    noise_floor: f64,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<AmplificationReport, ReasoningError> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(ReasoningError::BadIntensity(intensity));
    }
    if !(noise_floor.is_finite() && noise_floor > 0.0) {
        return Err(ReasoningError::BadNoiseFloor(noise_floor));
    }
    const MIN_SAMPLES: u64 = 10_000;
    if n < MIN_SAMPLES {
        return Err(ReasoningError::TooFewSamples { given: n, minimum: MIN_SAMPLES });
    }
    let exp = Exp::new(intensity).expect("validated intensity");
    // One coupled draw: (gap, extra, relative position). All three passes
    // consume identically so the same seed yields the same triples.
    let draw = move |rng: &mut crate::rng::Rng| {
        let x = exp.sample(rng);
        let extra = exp.sample(rng);
        let t: f64 = rng.gen();
        (x, x + extra, t * (1.0 - t))
    };
    let benchmark_gain = run_chunked(n, seed, workers, |rng| {
        let (x, _, a) = draw(rng);
        reasoning_gain(x * a, noise_floor)
    });
    let experienced_gain = run_chunked(n, seed, workers, |rng| {
        let (_, x_star, a) = draw(rng);
        reasoning_gain(x_star * a, noise_floor)
    });
    let amplification = run_chunked(n, seed, workers, |rng| {
        let (x, x_star, a) = draw(rng);
        reasoning_gain(x_star * a, noise_floor) - reasoning_gain(x * a, noise_floor)
    });
    Ok(AmplificationReport { benchmark_gain, experienced_gain, amplification })
}
