//! Modified Bessel functions of the second kind, orders zero and one.
//!
//! Two regimes, crossing over at z = 2:
//! - z <= 2: ascending series built on I0/I1 and harmonic-number sums. All
//!   series terms are positive, so the only cancellation is against the log
//!   prefactor, which costs at most a couple of digits near the crossover.
//! - z > 2: Steed's continued fraction (the Thompson-Barnett CF2 recurrence),
//!   which converges to machine precision in a few dozen iterations.
//!
//! Target accuracy is 1e-10 relative over z in [1e-3, 50]; the test suite
//! pins the implementation against direct quadrature of
//! K_nu(z) = int_0^inf exp(-z cosh u) cosh(nu u) du.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BesselError {
    #[error("argument must be positive and finite, got {0}")]
    BadArgument(f64),
    #[error("order must be 0 or 1, got {0}")]
    BadOrder(u8),
    #[error("continued fraction failed to converge at z = {0}")]
    NoConvergence(f64),
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const CROSSOVER: f64 = 2.0;
const SERIES_MAX_TERMS: usize = 80;
const CF_MAX_ITER: usize = 10_000;

/// K_nu(z) for nu in {0, 1}.
pub fn bessel_k(order: u8, z: f64) -> Result<f64, BesselError> {
    match order {
        0 => k0(z),
        1 => k1(z),
        other => Err(BesselError::BadOrder(other)),
    }
}

/// K_0(z).
pub fn k0(z: f64) -> Result<f64, BesselError> {
    check_argument(z)?;
    if z <= CROSSOVER {
        Ok(k0_series(z))
    } else {
        Ok(k_cf2(z)?.0)
    }
}

/// K_1(z).
pub fn k1(z: f64) -> Result<f64, BesselError> {
    check_argument(z)?;
    if z <= CROSSOVER {
        Ok(k1_series(z))
    } else {
        Ok(k_cf2(z)?.1)
    }
}

fn check_argument(z: f64) -> Result<(), BesselError> {
    if z.is_finite() && z > 0.0 {
        Ok(())
    } else {
        Err(BesselError::BadArgument(z))
    }
}

/// K0 via the ascending series:
/// K0(z) = -(ln(z/2) + gamma) I0(z) + sum_{k>=1} (z^2/4)^k / (k!)^2 * H_k.
fn k0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let log_half_z = (0.5 * z).ln();
    let mut term = 1.0; // (z^2/4)^k / (k!)^2 at k = 0
    let mut i0 = 1.0;
    let mut hk = 0.0;
    let mut hsum = 0.0;
    for k in 1..=SERIES_MAX_TERMS {
        term *= q / (k as f64 * k as f64);
        i0 += term;
        hk += 1.0 / k as f64;
        hsum += term * hk;
        if term * (1.0 + hk) < f64::EPSILON * (i0 + hsum.abs()) {
            break;
        }
    }
    -(log_half_z + EULER_GAMMA) * i0 + hsum
}

/// K1 via the ascending series:
/// K1(z) = 1/z + ln(z/2) I1(z)
///         - (z/4) sum_{k>=0} (H_k + H_{k+1} - 2 gamma) (z^2/4)^k / (k!(k+1)!).
fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let log_half_z = (0.5 * z).ln();
    let mut term = 1.0; // (z^2/4)^k / (k!(k+1)!) at k = 0
    let mut i1_sum = 1.0;
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut psi_sum = term * (hk + hk1 - 2.0 * EULER_GAMMA);
    for k in 1..=SERIES_MAX_TERMS {
        term *= q / (k as f64 * (k + 1) as f64);
        i1_sum += term;
        hk += 1.0 / k as f64;
        hk1 += 1.0 / (k + 1) as f64;
        psi_sum += term * (hk + hk1 - 2.0 * EULER_GAMMA);
        if term * (1.0 + hk + hk1) < f64::EPSILON * (i1_sum + psi_sum.abs()) {
            break;
        }
    }
    let i1 = 0.5 * z * i1_sum;
    1.0 / z + log_half_z * i1 - 0.25 * z * psi_sum
}

/// (K0, K1) by Steed's continued fraction, valid for z > 2 where it
/// converges rapidly. Specialization of the order-nu recurrence to nu = 0.
fn k_cf2(z: f64) -> Result<(f64, f64), BesselError> {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut a = -a1;
    let mut c = a1;
    let mut q = c;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..=CF_MAX_ITER {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(BesselError::NoConvergence(z));
    }
    let h = a1 * h;
    let k0 = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    Ok((k0, k1))
}

/// Leading large-argument form sqrt(pi / 2z) e^{-z}, shared by both orders.
pub fn k_asymptotic_envelope(z: f64) -> f64 {
    (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadSpec};

    /// Oracle: direct quadrature of the defining integral
    /// K_nu(z) = int_0^inf exp(-z cosh u) cosh(nu u) du, truncated where the
    /// integrand underflows.
    fn k_by_integral(order: u8, z: f64) -> f64 {
        let upper = (800.0 / z).acosh();
        let spec = QuadSpec { abs_tol: 1e-320, rel_tol: 5e-14, max_subdivisions: 8000 };
        integrate(
            |u| {
                let e = (-z * u.cosh()).exp();
                if order == 0 {
                    e
                } else {
                    e * u.cosh()
                }
            },
            0.0,
            upper,
            &spec,
        )
        .expect("oracle quadrature converges")
        .value
    }

    #[test]
    fn matches_integral_representation_across_range() {
        // Includes both sides of the z = 2 crossover and the acceptance grid.
        for &z in &[1e-3, 0.01, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 10.0, 25.0, 40.0, 50.0] {
            let oracle0 = k_by_integral(0, z);
            let oracle1 = k_by_integral(1, z);
            let got0 = k0(z).unwrap();
            let got1 = k1(z).unwrap();
            assert!(
                ((got0 - oracle0) / oracle0).abs() < 1e-10,
                "K0({z}): {got0:.16e} vs {oracle0:.16e}"
            );
            assert!(
                ((got1 - oracle1) / oracle1).abs() < 1e-10,
                "K1({z}): {got1:.16e} vs {oracle1:.16e}"
            );
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen verbatim at oracle output precision
    fn pinned_reference_values() {
        // Frozen from the integral-representation oracle above.
        let cases = [
            (0u8, 1.0, 4.210_244_382_407_083_3e-1),
            (1, 1.0, 6.019_072_301_972_345_7e-1),
            (0, 2.0, 1.138_938_727_495_334_3e-1),
            (1, 2.0, 1.398_658_818_165_224_3e-1),
            (0, 10.0, 1.778_006_231_616_765_0e-5),
            (1, 10.0, 1.864_877_345_382_559_0e-5),
        ];
        for (order, z, want) in cases {
            let got = bessel_k(order, z).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "K{order}({z}) = {got:.16e}, want {want:.16e}"
            );
        }
    }

    #[test]
    fn small_argument_limits() {
        // z K1(z) -> 1 and K0(z) + ln(z/2) -> -gamma as z -> 0.
        let z = 1e-3;
        assert!((z * k1(z).unwrap() - 1.0).abs() < 1e-5);
        // Correction term is (z^2/4)(1 - ln(z/2) - gamma) ~ 2e-6 at z = 1e-3.
        assert!((k0(z).unwrap() + (z / 2.0).ln() + EULER_GAMMA).abs() < 1e-5);
        // The limit sharpens as z shrinks.
        let closer = 1e-4 * k1(1e-4).unwrap() - 1.0;
        let farther = 1e-2 * k1(1e-2).unwrap() - 1.0;
        assert!(closer.abs() < farther.abs());
    }

    #[test]
    fn large_argument_envelope_ratio_tends_to_one() {
        let ratio = |z: f64| k0(z).unwrap() / k_asymptotic_envelope(z);
        // K0/envelope = 1 - 1/(8z) + O(z^-2).
        assert!((ratio(10.0) - 1.0).abs() < 0.02);
        assert!((ratio(40.0) - 1.0).abs() < 0.005);
        assert!((ratio(40.0) - 1.0).abs() < (ratio(10.0) - 1.0).abs());
        let ratio1 = |z: f64| k1(z).unwrap() / k_asymptotic_envelope(z);
        assert!((ratio1(40.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn positivity_and_monotonicity() {
        let mut prev0 = f64::INFINITY;
        let mut prev1 = f64::INFINITY;
        for i in 0..200 {
            let z = 1e-3 + i as f64 * 0.25;
            let v0 = k0(z).unwrap();
            let v1 = k1(z).unwrap();
            assert!(v0 > 0.0 && v1 > 0.0);
            assert!(v0 < prev0 && v1 < prev1, "not decreasing at z = {z}");
            assert!(v1 > v0, "K1 > K0 must hold at z = {z}");
            prev0 = v0;
            prev1 = v1;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(k0(0.0), Err(BesselError::BadArgument(_))));
        assert!(matches!(k0(-1.0), Err(BesselError::BadArgument(_))));
        assert!(matches!(k1(f64::NAN), Err(BesselError::BadArgument(_))));
        assert!(matches!(bessel_k(2, 1.0), Err(BesselError::BadOrder(2))));
    }
}
