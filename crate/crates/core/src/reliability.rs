//! Delegation value under blind and calibrated use.
//!
//! Stakes enter as a tolerance `q`: delegating a task with posterior variance
//! `sigma^2` pays `1 - sigma^2 / q`. Everything scale-free is indexed by the
//! reliability ratio `R = 3 lambda q`, because the experienced variance under
//! Poisson anchors of intensity lambda has mean `1/(3 lambda)`.
//!
//! Two usage disciplines:
//! - blind: delegate everything; expected payoff `1 - 1/R`, worth adopting
//!   only when `R >= 1`.
//! - calibrated: delegate only where the payoff is nonnegative, i.e. keep
//!   `max(0, 1 - sigma^2/q)`. Its value `U_C(R)` exceeds the blind value by
//!   the cost of blindness `Delta_B(R)`, available in closed form through
//!   modified Bessel functions, by quadrature, and by Monte Carlo.
//!
//! The normalized variance `Z = 3 lambda sigma^2` has mean one and a
//! lambda-free law (`Z = 3 G t(1-t)` with `G ~ Gamma(2,1)`, `t` uniform), so
//! every curve here is a one-dimensional function of `R`.

use crate::mc::{run_chunked, McEstimate};
use crate::quad::{integrate, QuadError, QuadSpec};
use crate::rng::Rng;
use crate::{bessel, landscape::LandscapeError};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReliabilityError {
    #[error("reliability ratio must be positive and finite, got {0}")]
    BadRatio(f64),
    #[error("stakes must be positive and finite, got {0}")]
    BadStakes(f64),
    #[error("intensity must be positive and finite, got {0}")]
    BadIntensity(f64),
    #[error("blind marginal return is undefined at the adoption kink R = 1")]
    BlindKink,
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("bessel evaluation failed: {0}")]
    Bessel(#[from] bessel::BesselError),
}

/// Stakes tolerance `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StakesProfile {
    q: f64,
}

impl StakesProfile {
    pub fn new(q: f64) -> Result<Self, ReliabilityError> {
        if q.is_finite() && q > 0.0 {
            Ok(Self { q })
        } else {
            Err(ReliabilityError::BadStakes(q))
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// The scale-free reliability ratio `R = 3 lambda q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityIndex {
    r: f64,
}

impl ReliabilityIndex {
    pub fn new(r: f64) -> Result<Self, ReliabilityError> {
        if r.is_finite() && r > 0.0 {
            Ok(Self { r })
        } else {
            Err(ReliabilityError::BadRatio(r))
        }
    }

    /// From primitives: `R = 3 lambda q`.
    pub fn from_parts(intensity: f64, stakes: StakesProfile) -> Result<Self, ReliabilityError> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(ReliabilityError::BadIntensity(intensity));
        }
        Self::new(3.0 * intensity * stakes.q())
    }

    pub fn value(&self) -> f64 {
        self.r
    }
}

/// Mean posterior variance experienced by a uniform task under Poisson
/// anchors: `1 / (3 lambda)`.
pub fn expected_experienced_variance(intensity: f64) -> Result<f64, ReliabilityError> {
    if intensity.is_finite() && intensity > 0.0 {
        Ok(1.0 / (3.0 * intensity))
    } else {
        Err(ReliabilityError::BadIntensity(intensity))
    }
}

/// Blind delegation: expected utility and the adopt/reject verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlindValue {
    pub utility: f64,
    pub adopt: bool,
}

/// `1 - 1/R`, adopted exactly when `R >= 1`.
pub fn blind_value(r: ReliabilityIndex) -> BlindValue {
    let utility = 1.0 - 1.0 / r.value();
    BlindValue { utility, adopt: r.value() >= 1.0 }
}

/// One draw of the normalized variance `Z = 3 G t (1 - t)`, `G ~ Gamma(2,1)`,
/// `t ~ U(0,1)`. `E[Z] = 1` for every intensity.
pub fn normalized_variance(rng: &mut Rng) -> f64 {
    let g = Gamma::new(2.0, 1.0).expect("fixed parameters").sample(rng);
    let t: f64 = rng.gen();
    3.0 * g * t * (1.0 - t)
}

/// `(1 + u) e^{-u}` with the `u -> infinity` limit handled explicitly, so
/// integrands stay finite at gap endpoints where `u = R / (3 t (1-t))`
/// diverges.
fn decay_weight(u: f64) -> f64 {
    if u > 746.0 {
        // exp underflows to zero well before 746; avoids inf * 0 at u = inf.
        0.0
    } else {
        (1.0 + u) * (-u).exp()
    }
}

/// Calibrated-use value
/// `U_C(R) = int_0^1 [1 - 6a/R + (1 + 6a/R) exp(-R/(3a))] dt`, `a = t(1-t)`.
pub fn calibrated_value(r: ReliabilityIndex, spec: &QuadSpec) -> Result<f64, ReliabilityError> {
    let rr = r.value();
    let result = integrate(
        |t| {
            let a = t * (1.0 - t);
            if a == 0.0 {
                return 1.0;
            }
            let u = rr / (3.0 * a);
            1.0 - 6.0 * a / rr + (1.0 + 6.0 * a / rr) * (-u).exp()
        },
        0.0,
        1.0,
        spec,
    )?;
    Ok(result.value)
}

/// How the cost of blindness is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum BlindnessMethod {
    /// Bessel closed form `(2/9) e^{-2R/3} [R K0(2R/3) + (3 - R) K1(2R/3)]`.
    ClosedForm,
    /// Direct quadrature of `int_0^1 (1 + 6a/R) exp(-R/(3a)) dt`.
    Quadrature(QuadSpec),
    /// Monte Carlo mean of `(Z/R - 1)_+` over the normalized variance law.
    MonteCarlo { n: u64, seed: u64, workers: usize },
}

/// Cost of blindness `Delta_B(R) = U_C(R) - (1 - 1/R)`, evaluated by the
/// requested method. The Monte Carlo variant reports its standard error; the
/// deterministic variants report `se = 0, n = 0`.
pub fn cost_of_blindness(
    r: ReliabilityIndex,
    method: BlindnessMethod,
) -> Result<McEstimate, ReliabilityError> {
    let rr = r.value();
    match method {
        BlindnessMethod::ClosedForm => {
            let z = 2.0 * rr / 3.0;
            let value = 2.0 / 9.0 * (-z).exp() * (rr * bessel::k0(z)? + (3.0 - rr) * bessel::k1(z)?);
            Ok(McEstimate { mean: value, se: 0.0, n: 0 })
        }
        BlindnessMethod::Quadrature(spec) => {
            let result = integrate(
                |t| {
                    let a = t * (1.0 - t);
                    if a == 0.0 {
                        return 0.0;
                    }
                    (1.0 + 6.0 * a / rr) * (-rr / (3.0 * a)).exp()
                },
                0.0,
                1.0,
                &spec,
            )?;
            Ok(McEstimate { mean: result.value, se: 0.0, n: 0 })
        }
        BlindnessMethod::MonteCarlo { n, seed, workers } => {
            Ok(run_chunked(n, seed, workers, |rng| {
                (normalized_variance(rng) / rr - 1.0).max(0.0)
            }))
        }
    }
}

/// Share of tasks a calibrated user delegates:
/// `s_C(R) = Pr(Z < R) = int_0^1 [1 - (1 + u) exp(-u)] dt`, `u = R/(3a)`.
pub fn use_share(r: ReliabilityIndex, spec: &QuadSpec) -> Result<f64, ReliabilityError> {
    let rr = r.value();
    let result = integrate(
        |t| {
            let a = t * (1.0 - t);
            if a == 0.0 {
                return 1.0;
            }
            1.0 - decay_weight(rr / (3.0 * a))
        },
        0.0,
        1.0,
        spec,
    )?;
    Ok(result.value)
}

/// Which value curve a marginal return differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalMode {
    Blind,
    Calibrated,
}

/// Marginal return of the reliability ratio.
///
/// Blind: `0` below the adoption kink, `1/R^2` above it, undefined at `R = 1`.
/// Calibrated: `(1/R^2) E[Z 1{Z < R}]`, computed by quadrature using the
/// Gamma(2,1) partial mean `E[G 1{G<c}] = 2 - e^{-c}(c^2 + 2c + 2)`.
pub fn marginal_return(
    r: ReliabilityIndex,
    mode: MarginalMode,
    spec: &QuadSpec,
) -> Result<f64, ReliabilityError> {
    let rr = r.value();
    match mode {
        MarginalMode::Blind => {
            if rr == 1.0 {
                Err(ReliabilityError::BlindKink)
            } else if rr < 1.0 {
                Ok(0.0)
            } else {
                Ok(1.0 / (rr * rr))
            }
        }
        MarginalMode::Calibrated => {
            let result = integrate(
                |t| {
                    let a = t * (1.0 - t);
                    if a == 0.0 {
                        return 0.0;
                    }
                    let c = rr / (3.0 * a);
                    let partial = if c > 746.0 {
                        2.0
                    } else {
                        2.0 - (-c).exp() * (c * c + 2.0 * c + 2.0)
                    };
                    3.0 * a * partial
                },
                0.0,
                1.0,
                spec,
            )?;
            Ok(result.value / (rr * rr))
        }
    }
}

/// Landscape-pipeline estimate of a value curve point: sample Poisson
/// landscapes at `intensity`, draw interior tasks, and average the blind or
/// calibrated payoff at stakes `q`. Used to reconcile the analytic curves
/// with the simulation path they summarize.
pub fn pipeline_value_mc(
    intensity: f64,
    stakes: StakesProfile,
    calibrated: bool,
    n_landscapes: u64,
    tasks_per_landscape: usize,
    base_seed: u64,
) -> Result<McEstimate, LandscapeError> {
    use crate::landscape::{sample_knowledge_points, LandscapeConfig};
    use crate::mc::estimate_from_samples;
    use crate::rng::derived_rng;

    // Domain sized for ~2000 anchors so edge-gap exclusion costs little.
    let domain = 2000.0 / intensity;
    let q = stakes.q();
    let mut payoffs = Vec::with_capacity((n_landscapes as usize) * tasks_per_landscape);
    for i in 0..n_landscapes {
        let config = LandscapeConfig::new(intensity, domain, crate::rng::derive_seed(base_seed, 2 * i))?;
        let ks = sample_knowledge_points(&config);
        let mut task_rng = derived_rng(base_seed, 2 * i + 1);
        for x in ks.sample_interior_tasks(tasks_per_landscape, &mut task_rng) {
            let variance = ks.posterior_at(x)?.variance;
            let raw = 1.0 - variance / q;
            payoffs.push(if calibrated { raw.max(0.0) } else { raw });
        }
    }
    Ok(estimate_from_samples(&payoffs))
}
