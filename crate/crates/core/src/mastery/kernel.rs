//! Covariance kernels for the reliability-map prior.
//!
//! All kernels are normalized so k(x,x) = 1. The compact-support family is a
//! polynomial taper that is exactly zero beyond its radius, which is what
//! makes "statistically disconnected" regions possible; the smooth families
//! only decay.

use super::MasteryError;

/// Matern smoothness levels with closed-form kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaternSmoothness {
    Half,
    ThreeHalves,
    FiveHalves,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// Squared-exponential: exp(-r^2 / (2 l^2)).
    Rbf { length_scale: f64 },
    /// Matern with the given smoothness and length scale.
    Matern { smoothness: MaternSmoothness, length_scale: f64 },
    /// Wendland taper (1-u)^4 (4u+1) on u = r/radius, identically zero for
    /// r >= radius; positive definite on the line, value 1 at the origin,
    /// strictly decreasing to 0 at the radius.
    CompactSupport { radius: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<(), MasteryError> {
        let scale = match *self {
            Kernel::Rbf { length_scale } | Kernel::Matern { length_scale, .. } => length_scale,
            Kernel::CompactSupport { radius } => radius,
        };
        if scale.is_finite() && scale > 0.0 {
            Ok(())
        } else {
            Err(MasteryError::BadKernel(format!(
                "kernel scale must be positive and finite, got {scale}"
            )))
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let r = (x - y).abs();
        match *self {
            Kernel::Rbf { length_scale } => {
                let u = r / length_scale;
                (-0.5 * u * u).exp()
            }
            Kernel::Matern { smoothness, length_scale } => {
                let u = r / length_scale;
                match smoothness {
                    MaternSmoothness::Half => (-u).exp(),
                    MaternSmoothness::ThreeHalves => {
                        let s = 3f64.sqrt() * u;
                        (1.0 + s) * (-s).exp()
                    }
                    MaternSmoothness::FiveHalves => {
                        let s = 5f64.sqrt() * u;
                        (1.0 + s + s * s / 3.0) * (-s).exp()
                    }
                }
            }
            Kernel::CompactSupport { radius } => {
                let u = r / radius;
                if u >= 1.0 {
                    0.0
                } else {
                    let w = 1.0 - u;
                    let w2 = w * w;
                    w2 * w2 * (4.0 * u + 1.0)
                }
            }
        }
    }

    /// Distance beyond which the kernel is exactly zero, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            Kernel::CompactSupport { radius } => Some(radius),
            _ => None,
        }
    }

    /// Short identifier for tables and CSV output.
    pub fn label(&self) -> String {
        match *self {
            Kernel::Rbf { length_scale } => format!("rbf({length_scale})"),
            Kernel::Matern { smoothness, length_scale } => {
                let nu = match smoothness {
                    MaternSmoothness::Half => "1/2",
                    MaternSmoothness::ThreeHalves => "3/2",
                    MaternSmoothness::FiveHalves => "5/2",
                };
                format!("matern({nu},{length_scale})")
            }
            Kernel::CompactSupport { radius } => format!("compact({radius})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kernels() -> Vec<Kernel> {
        vec![
            Kernel::Rbf { length_scale: 0.7 },
            Kernel::Matern { smoothness: MaternSmoothness::Half, length_scale: 0.7 },
            Kernel::Matern { smoothness: MaternSmoothness::ThreeHalves, length_scale: 0.7 },
            Kernel::Matern { smoothness: MaternSmoothness::FiveHalves, length_scale: 0.7 },
            Kernel::CompactSupport { radius: 0.7 },
        ]
    }

    #[test]
    fn unit_diagonal_and_bounded() {
        for k in all_kernels() {
            assert_eq!(k.evaluate(1.3, 1.3), 1.0, "{k:?}");
            for r in [0.01, 0.1, 0.5, 1.0, 5.0] {
                let v = k.evaluate(0.0, r);
                assert!((0.0..=1.0).contains(&v), "{k:?} at {r}: {v}");
                assert_eq!(v, k.evaluate(r, 0.0));
            }
        }
    }

    #[test]
    fn compact_support_is_exactly_zero_outside() {
        let k = Kernel::CompactSupport { radius: 0.5 };
        assert_eq!(k.evaluate(0.0, 0.5), 0.0);
        assert_eq!(k.evaluate(0.0, 0.500001), 0.0);
        assert_eq!(k.evaluate(0.0, 10.0), 0.0);
        assert!(k.evaluate(0.0, 0.499) > 0.0);
        // Strictly decreasing inside the support.
        let mut prev = 1.0;
        for i in 1..=100 {
            let v = k.evaluate(0.0, 0.5 * i as f64 / 100.0);
            assert!(v < prev, "not decreasing at step {i}");
            prev = v;
        }
    }

    #[test]
    fn smooth_kernels_decay_but_never_vanish() {
        for k in [
            Kernel::Rbf { length_scale: 1.0 },
            Kernel::Matern { smoothness: MaternSmoothness::ThreeHalves, length_scale: 1.0 },
        ] {
            assert!(k.evaluate(0.0, 3.0) > 0.0);
            assert!(k.evaluate(0.0, 3.0) < k.evaluate(0.0, 1.0));
            assert_eq!(k.support_radius(), None);
        }
    }

    #[test]
    fn validation() {
        assert!(Kernel::Rbf { length_scale: 0.0 }.validate().is_err());
        assert!(Kernel::CompactSupport { radius: -1.0 }.validate().is_err());
        assert!(Kernel::Matern {
            smoothness: MaternSmoothness::Half,
            length_scale: f64::NAN
        }
        .validate()
        .is_err());
        for k in all_kernels() {
            assert!(k.validate().is_ok());
        }
    }

    #[test]
    fn labels_are_distinct() {
        let labels: Vec<String> = all_kernels().iter().map(|k| k.label()).collect();
        let mut dedup = labels.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), labels.len());
    }
}
