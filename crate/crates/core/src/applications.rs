//! Provider comparison under convex error losses and organizational
//! adoption wedges.
//!
//! Everything here prices a provider by the error variance its users
//! actually experience, `sigma^2 = X* t (1 - t)` over the visit-weighted
//! gap `X*`, under a gamma regularity family indexed by the anchor rate
//! and the gap coefficient of variation. Convex losses add a fourth-moment
//! term, which is where dispersion bites hardest; the adoption and
//! delegation wedges translate the same moments into benchmark-reliability
//! windows where headline numbers and experience disagree.

use crate::reliability::{
    blind_value, cost_of_blindness, BlindnessMethod, ReliabilityError, ReliabilityIndex,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApplicationsError {
    #[error("anchor intensity must be positive and finite, got {0}")]
    BadIntensity(f64),
    #[error("gap coefficient of variation must be finite and nonnegative, got {0}")]
    BadDispersion(f64),
    #[error("stakes must be positive and finite, got {0}")]
    BadStakes(f64),
    #[error("convexity weight must be finite and nonnegative, got {0}")]
    BadConvexity(f64),
    #[error("cost must be finite and nonnegative, got {0}")]
    BadCost(f64),
    #[error("benchmark reliability must be positive and finite, got {0}")]
    BadReliability(f64),
    #[error("no single crossing: {0}")]
    NoSingleCrossing(String),
    #[error(transparent)]
    Reliability(#[from] ReliabilityError),
}

/// A provider's anchor process under gamma regularity: anchor rate and gap
/// coefficient of variation. `cv = 0` is the deterministic-gap limit,
/// `cv = 1` the Poisson case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProviderProfile {
    intensity: f64,
    cv: f64,
}

impl ProviderProfile {
    pub fn new(intensity: f64, cv: f64) -> Result<Self, ApplicationsError> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(ApplicationsError::BadIntensity(intensity));
        }
        if !(cv.is_finite() && cv >= 0.0) {
            return Err(ApplicationsError::BadDispersion(cv));
        }
        Ok(Self { intensity, cv })
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn cv(&self) -> f64 {
        self.cv
    }
}

/// Stakes with a convex loss term: a task pays
/// `1 - sigma^2 / stakes - convexity (sigma^2 / stakes)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexStakes {
    stakes: f64,
    convexity: f64,
}

impl ConvexStakes {
    pub fn new(stakes: f64, convexity: f64) -> Result<Self, ApplicationsError> {
        if !(stakes.is_finite() && stakes > 0.0) {
            return Err(ApplicationsError::BadStakes(stakes));
        }
        if !(convexity.is_finite() && convexity >= 0.0) {
            return Err(ApplicationsError::BadConvexity(convexity));
        }
        Ok(Self { stakes, convexity })
    }

    pub fn stakes(&self) -> f64 {
        self.stakes
    }

    pub fn convexity(&self) -> f64 {
        self.convexity
    }
}

/// Organization-side frictions: the price of checking an answer and the
/// worker's private cost of doing the task unaided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrgParams {
    verification_cost: f64,
    effort_cost: f64,
}

impl OrgParams {
    pub fn new(verification_cost: f64, effort_cost: f64) -> Result<Self, ApplicationsError> {
        for cost in [verification_cost, effort_cost] {
            if !(cost.is_finite() && cost >= 0.0) {
                return Err(ApplicationsError::BadCost(cost));
            }
        }
        Ok(Self { verification_cost, effort_cost })
    }

    pub fn verification_cost(&self) -> f64 {
        self.verification_cost
    }

    pub fn effort_cost(&self) -> f64 {
        self.effort_cost
    }
}

/// First two moments of the experienced error variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMoments {
    /// `E[sigma^2] = (1 + cv^2) / (6 intensity)`.
    pub second: f64,
    /// `E[sigma^4] = (1 + cv^2)(1 + 2 cv^2) / (30 intensity^2)`.
    pub fourth: f64,
}

/// Visit-weighted moments of the error variance for a gamma-family provider.
pub fn sigma_moments(profile: &ProviderProfile) -> SigmaMoments {
    let c2 = profile.cv * profile.cv;
    let lambda = profile.intensity;
    SigmaMoments {
        second: (1.0 + c2) / (6.0 * lambda),
        fourth: (1.0 + c2) * (1.0 + 2.0 * c2) / (30.0 * lambda * lambda),
    }
}

/// The same moments as a benchmark sees them, sampling gaps uniformly
/// instead of by visit. The second moment loses its `1 + cv^2` inflation;
/// the fourth keeps one power of it.
pub fn benchmark_sigma_moments(profile: &ProviderProfile) -> SigmaMoments {
    let c2 = profile.cv * profile.cv;
    let lambda = profile.intensity;
    SigmaMoments {
        second: 1.0 / (6.0 * lambda),
        fourth: (1.0 + c2) / (30.0 * lambda * lambda),
    }
}

/// Experienced-to-benchmark ratio of the fourth error moment, `1 + 2 cv^2`.
/// Dispersion hurts convex losses one inflation factor more than linear
/// ones.
pub fn fourth_moment_amplification(profile: &ProviderProfile) -> f64 {
    1.0 + 2.0 * profile.cv * profile.cv
}

/// Expected value of blind delegation under convex losses:
/// `1 - E[sigma^2]/q - convexity E[sigma^4]/q^2`. With zero convexity this
/// is the plain blind value at the experienced reliability.
pub fn convex_blind_value(profile: &ProviderProfile, stakes: &ConvexStakes) -> f64 {
    let m = sigma_moments(profile);
    let q = stakes.stakes;
    1.0 - m.second / q - stakes.convexity * m.fourth / (q * q)
}

/// Stakes level at which two providers swap ranks under convex losses:
/// `q* = convexity (v_first - v_second) / (m_second - m_first)`.
///
/// Requires the single-crossing ordering: the first provider has the lower
/// mean error but the heavier tail (larger fourth moment). Above `q*` the
/// first provider wins, below it the second does.
pub fn sorting_cutoff(
    first: &ProviderProfile,
    second: &ProviderProfile,
    convexity: f64,
) -> Result<f64, ApplicationsError> {
    if !(convexity.is_finite() && convexity > 0.0) {
        return Err(ApplicationsError::BadConvexity(convexity));
    }
    let a = sigma_moments(first);
    let b = sigma_moments(second);
    if !(a.second < b.second && a.fourth > b.fourth) {
        return Err(ApplicationsError::NoSingleCrossing(format!(
            "need mean {} < {} and tail {} > {}",
            a.second, b.second, a.fourth, b.fourth
        )));
    }
    Ok(convexity * (a.fourth - b.fourth) / (b.second - a.second))
}

/// Half-open window `[lower, upper)` of benchmark reliability values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkWindow {
    pub lower: f64,
    pub upper: f64,
}

impl BenchmarkWindow {
    pub fn is_empty(&self) -> bool {
        self.upper <= self.lower
    }

    pub fn contains(&self, r_bench: f64) -> bool {
        self.lower <= r_bench && r_bench < self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdoptionCall {
    /// Even the benchmark number says walk away.
    NoAdopt,
    /// The benchmark clears the bar but experienced reliability does not.
    OverAdopt,
    Aligned,
}

impl AdoptionCall {
    pub fn label(&self) -> &'static str {
        match self {
            AdoptionCall::NoAdopt => "no-adopt",
            AdoptionCall::OverAdopt => "over-adopt",
            AdoptionCall::Aligned => "aligned",
        }
    }
}

fn validate_cv(cv: f64) -> Result<f64, ApplicationsError> {
    if !(cv.is_finite() && cv >= 0.0) {
        return Err(ApplicationsError::BadDispersion(cv));
    }
    Ok(cv)
}

fn validate_r_bench(r_bench: f64) -> Result<f64, ApplicationsError> {
    if !(r_bench.is_finite() && r_bench > 0.0) {
        return Err(ApplicationsError::BadReliability(r_bench));
    }
    Ok(r_bench)
}

/// Benchmark reliabilities that pass a gap-uniform evaluation while blind
/// use actually loses: `[1, 1 + cv^2)`. Empty for regular gaps.
pub fn over_adoption_interval(cv: f64) -> Result<BenchmarkWindow, ApplicationsError> {
    let cv = validate_cv(cv)?;
    Ok(BenchmarkWindow { lower: 1.0, upper: 1.0 + cv * cv })
}

/// Compare the benchmark's adopt call with the experienced one at a given
/// benchmark reliability. Experienced reliability is `r_bench / (1 + cv^2)`
/// and both rules adopt at weakly positive utility.
pub fn classify_adoption(cv: f64, r_bench: f64) -> Result<AdoptionCall, ApplicationsError> {
    let cv = validate_cv(cv)?;
    let r_bench = validate_r_bench(r_bench)?;
    if r_bench < 1.0 {
        Ok(AdoptionCall::NoAdopt)
    } else if r_bench < 1.0 + cv * cv {
        Ok(AdoptionCall::OverAdopt)
    } else {
        Ok(AdoptionCall::Aligned)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelegationCall {
    /// Not even the worker wants to hand the task over.
    NoDelegate,
    /// The worker delegates to dodge the effort cost while the organization
    /// loses value on the task.
    OverDelegate,
    Aligned,
}

impl DelegationCall {
    pub fn label(&self) -> &'static str {
        match self {
            DelegationCall::NoDelegate => "no-delegate",
            DelegationCall::OverDelegate => "over-delegate",
            DelegationCall::Aligned => "aligned",
        }
    }
}

/// Benchmark reliabilities where a worker who saves `effort_cost` by
/// delegating does so against the organization's interest:
/// `[(1 + cv^2)/(1 + effort_cost), 1 + cv^2)`. Shrinks to empty as the
/// effort cost vanishes.
pub fn over_delegation_region(
    cv: f64,
    effort_cost: f64,
) -> Result<BenchmarkWindow, ApplicationsError> {
    let cv = validate_cv(cv)?;
    if !(effort_cost.is_finite() && effort_cost > 0.0) {
        return Err(ApplicationsError::BadCost(effort_cost));
    }
    let upper = 1.0 + cv * cv;
    Ok(BenchmarkWindow { lower: upper / (1.0 + effort_cost), upper })
}

/// The worker delegates when blind utility beats doing it themselves,
/// `1 - (1 + cv^2)/r_bench >= -effort_cost`; the organization wants
/// delegation only at weakly positive blind utility.
pub fn classify_delegation(
    cv: f64,
    effort_cost: f64,
    r_bench: f64,
) -> Result<DelegationCall, ApplicationsError> {
    let region = over_delegation_region(cv, effort_cost)?;
    let r_bench = validate_r_bench(r_bench)?;
    if r_bench < region.lower {
        Ok(DelegationCall::NoDelegate)
    } else if r_bench < region.upper {
        Ok(DelegationCall::OverDelegate)
    } else {
        Ok(DelegationCall::Aligned)
    }
}

/// Whether paying `verification_cost` per task to run in calibrated mode
/// beats staying blind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationDecision {
    /// Value of calibration over blindness at these parameters.
    pub gain: f64,
    /// True exactly when the cost is strictly below the gain.
    pub verify: bool,
}

pub fn verification_decision(
    intensity: f64,
    stakes: f64,
    verification_cost: f64,
) -> Result<VerificationDecision, ApplicationsError> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(ApplicationsError::BadIntensity(intensity));
    }
    if !(stakes.is_finite() && stakes > 0.0) {
        return Err(ApplicationsError::BadStakes(stakes));
    }
    if !(verification_cost.is_finite() && verification_cost >= 0.0) {
        return Err(ApplicationsError::BadCost(verification_cost));
    }
    let r = ReliabilityIndex::new(3.0 * intensity * stakes)?;
    let gain = cost_of_blindness(r, BlindnessMethod::ClosedForm)?.mean;
    Ok(VerificationDecision { gain, verify: verification_cost < gain })
}

/// Blind utility at an experienced reliability derived from a benchmark
/// one; convenience for wedge tables.
pub fn blind_utility_from_benchmark(cv: f64, r_bench: f64) -> Result<f64, ApplicationsError> {
    let cv = validate_cv(cv)?;
    let r_bench = validate_r_bench(r_bench)?;
    let r_exp = ReliabilityIndex::new(r_bench / (1.0 + cv * cv))?;
    Ok(blind_value(r_exp).utility)
}
