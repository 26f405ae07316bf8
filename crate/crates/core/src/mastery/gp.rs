//! Gaussian-process regression over a one-dimensional task space.
//!
//! The model keeps a growing Cholesky factor of the gram-plus-noise system,
//! so each new observation extends the factor by one row instead of
//! refitting. Posterior queries use the identities
//! `mean(x) = z(x) . u` and `var(x) = k(x,x) - |z(x)|^2` with
//! `z(x) = L^-1 k_vec(x)` and `u = L^-1 y`.

use super::kernel::Kernel;
use super::MasteryError;

/// Posterior moments of the latent map at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Belief {
    pub mean: f64,
    pub variance: f64,
}

/// Lower-triangular factor stored row by row, grown one observation at a
/// time.
#[derive(Debug, Clone, PartialEq)]
struct LowerFactor {
    rows: Vec<Vec<f64>>,
}

impl LowerFactor {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    /// Forward-substitute L z = b.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.rows.len());
        let mut z = Vec::with_capacity(b.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = b[i];
            for (j, zj) in z.iter().enumerate() {
                acc -= row[j] * zj;
            }
            z.push(acc / row[i]);
        }
        z
    }

    /// Append the row for a new point with covariances `cov` against the
    /// existing points and `diag` on its own diagonal (kernel variance plus
    /// noise plus jitter). Fails when the pivot is not strictly positive.
    fn extend(&mut self, cov: &[f64], diag: f64) -> Result<(), ()> {
        let mut row = self.solve(cov);
        let pivot_sq = diag - row.iter().map(|v| v * v).sum::<f64>();
        if !(pivot_sq.is_finite() && pivot_sq > 0.0) {
            return Err(());
        }
        row.push(pivot_sq.sqrt());
        self.rows.push(row);
        Ok(())
    }
}

/// GP regression state: kernel, observation noise, data, and the factored
/// gram system.
#[derive(Debug, Clone, PartialEq)]
pub struct GpModel {
    kernel: Kernel,
    noise_variance: f64,
    locations: Vec<f64>,
    targets: Vec<f64>,
    factor: LowerFactor,
    /// `L^-1 targets`, extended alongside the factor.
    u: Vec<f64>,
    /// Diagonal inflation applied on the last (re)factorization; zero unless
    /// the escalation ladder was needed.
    jitter: f64,
}

/// Jitter ladder: relative steps applied to `1 + max gram diagonal`,
/// escalating tenfold from 1e-10 to 1e-6 before giving up.
const JITTER_STEPS: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

impl GpModel {
    pub fn new(kernel: Kernel, noise_variance: f64) -> Result<Self, MasteryError> {
        kernel.validate()?;
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(MasteryError::BadNoise(noise_variance));
        }
        Ok(Self {
            kernel,
            noise_variance,
            locations: Vec::new(),
            targets: Vec::new(),
            factor: LowerFactor::new(),
            u: Vec::new(),
            jitter: 0.0,
        })
    }

    /// Build a model from a full dataset in one factorization pass.
    pub fn fit(
        kernel: Kernel,
        noise_variance: f64,
        locations: &[f64],
        targets: &[f64],
    ) -> Result<Self, MasteryError> {
        let mut model = Self::new(kernel, noise_variance)?;
        if locations.len() != targets.len() {
            return Err(MasteryError::BadArgument(format!(
                "{} locations vs {} targets",
                locations.len(),
                targets.len()
            )));
        }
        for (&x, &y) in locations.iter().zip(targets) {
            if !x.is_finite() || !y.is_finite() {
                return Err(MasteryError::BadArgument(format!(
                    "observations must be finite, got ({x}, {y})"
                )));
            }
        }
        model.locations = locations.to_vec();
        model.targets = targets.to_vec();
        model.refactor()?;
        Ok(model)
    }

    pub fn kernel(&self) -> &Kernel {
        self.kernel_ref()
    }

    fn kernel_ref(&self) -> &Kernel {
        &self.kernel
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn observations(&self) -> (&[f64], &[f64]) {
        (&self.locations, &self.targets)
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    fn covariances_against_data(&self, x: f64) -> Vec<f64> {
        self.locations.iter().map(|&xi| self.kernel.evaluate(x, xi)).collect()
    }

    /// Factor the whole system from scratch, walking the jitter ladder.
    fn refactor(&mut self) -> Result<(), MasteryError> {
        let n = self.locations.len();
        let scale = 1.0 + 1.0; // unit-diagonal kernels: 1 + max gram diagonal
        let mut ladder = vec![0.0];
        ladder.extend(JITTER_STEPS.iter().map(|s| s * scale));
        'ladder: for &jitter in &ladder {
            let mut factor = LowerFactor::new();
            let mut u = Vec::new();
            for i in 0..n {
                let cov: Vec<f64> = (0..i)
                    .map(|j| self.kernel.evaluate(self.locations[i], self.locations[j]))
                    .collect();
                let diag = 1.0 + self.noise_variance + jitter;
                if factor.extend(&cov, diag).is_err() {
                    continue 'ladder;
                }
                let row = factor.rows.last().expect("just pushed");
                let mut acc = self.targets[i];
                for (j, uj) in u.iter().enumerate() {
                    acc -= row[j] * uj;
                }
                u.push(acc / row[i]);
            }
            self.factor = factor;
            self.u = u;
            self.jitter = jitter;
            return Ok(());
        }
        Err(MasteryError::FactorizationFailed { size: n })
    }

    /// Absorb one observation by extending the factor. Falls back to a full
    /// refactorization with jitter escalation if the extension loses
    /// positive definiteness.
    pub fn observe(&mut self, x: f64, y: f64) -> Result<(), MasteryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(MasteryError::BadArgument(format!(
                "observations must be finite, got ({x}, {y})"
            )));
        }
        let cov = self.covariances_against_data(x);
        let diag = 1.0 + self.noise_variance + self.jitter;
        self.locations.push(x);
        self.targets.push(y);
        if self.factor.extend(&cov, diag).is_ok() {
            let row = self.factor.rows.last().expect("just pushed");
            let mut acc = y;
            for (j, uj) in self.u.iter().enumerate() {
                acc -= row[j] * uj;
            }
            self.u.push(acc / row[row.len() - 1]);
            Ok(())
        } else {
            self.refactor()
        }
    }

    /// Posterior moments at `x`; the prior (mean 0, variance k(x,x)) when no
    /// data has been observed. Variance is clipped to [0, k(x,x)].
    pub fn posterior(&self, x: f64) -> Result<Belief, MasteryError> {
        if !x.is_finite() {
            return Err(MasteryError::BadArgument(format!("query location must be finite, got {x}")));
        }
        let prior = self.kernel.evaluate(x, x);
        if self.is_empty() {
            return Ok(Belief { mean: 0.0, variance: prior });
        }
        let z = self.factor.solve(&self.covariances_against_data(x));
        let mean = z.iter().zip(&self.u).map(|(a, b)| a * b).sum::<f64>();
        let reduction: f64 = z.iter().map(|v| v * v).sum();
        Ok(Belief { mean, variance: (prior - reduction).clamp(0.0, prior) })
    }

    /// Posterior covariance between two locations:
    /// `k(x,y) - z(x) . z(y)`.
    pub fn posterior_covariance(&self, x: f64, y: f64) -> Result<f64, MasteryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(MasteryError::BadArgument(format!(
                "query locations must be finite, got ({x}, {y})"
            )));
        }
        let prior = self.kernel.evaluate(x, y);
        if self.is_empty() {
            return Ok(prior);
        }
        let zx = self.factor.solve(&self.covariances_against_data(x));
        let zy = self.factor.solve(&self.covariances_against_data(y));
        Ok(prior - zx.iter().zip(&zy).map(|(a, b)| a * b).sum::<f64>())
    }

    /// Posterior moments over a whole grid.
    pub fn posterior_grid(&self, grid: &[f64]) -> Result<Vec<Belief>, MasteryError> {
        grid.iter().map(|&x| self.posterior(x)).collect()
    }
}
