//! Characteristic triplets, sampling schemes and the analytic characteristic
//! exponent. Everything downstream uses these values as ground truth.

pub(crate) mod jumps;

pub use jumps::{JumpLaw, JumpMeasureSpec, Moment};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};

/// Characteristic triplet `(σ², b, ν)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub sigma2: f64,
    pub drift: f64,
    pub jumps: JumpMeasureSpec,
}

/// Equidistant observation design: `n` increments at spacing `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingScheme {
    pub n: usize,
    pub delta: f64,
}

impl SamplingScheme {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(LevyError::InvalidParameter("n must be at least 1".into()));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LevyError::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        let scheme = Self { n, delta };
        if !scheme.in_nominal_band() {
            log::warn!("delta = {delta} lies outside [1/n, 1] for n = {n}");
        }
        Ok(scheme)
    }

    /// `Δ ∈ [1/n, 1]`.
    pub fn in_nominal_band(&self) -> bool {
        self.delta >= 1.0 / self.n as f64 && self.delta <= 1.0
    }

    /// Observation horizon `nΔ`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }
}

/// One grid point of [`LevyTriplet::bg_bias_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasMargin {
    pub u: f64,
    /// `Re(ψ(u) + σ²u²/2)`.
    pub value: f64,
    /// `-R|u|^β`.
    pub lower: f64,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub beta: f64,
    pub r: f64,
    pub points: Vec<BiasMargin>,
    pub pass: bool,
}

impl LevyTriplet {
    pub fn new(sigma2: f64, drift: f64, jumps: JumpMeasureSpec) -> Result<Self> {
        let t = Self { sigma2, drift, jumps };
        t.validate()?;
        Ok(t)
    }

    pub fn brownian(sigma2: f64) -> Self {
        Self { sigma2, drift: 0.0, jumps: JumpMeasureSpec::Zero }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(LevyError::InvalidParameter(format!("sigma2 must be >= 0, got {}", self.sigma2)));
        }
        if !self.drift.is_finite() {
            return Err(LevyError::InvalidParameter("drift must be finite".into()));
        }
        self.jumps.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)
            .map_err(|e| LevyError::Parse { line: e.line() as u64, message: e.to_string() })?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("triplet serializes")
    }

    /// Characteristic exponent `ψ(u) = ibu - σ²u²/2 + ∫(e^{iux} - 1 - iux)ν(dx)`.
    pub fn psi(&self, u: f64) -> Result<Complex64> {
        Ok(Complex64::new(-0.5 * self.sigma2 * u * u, self.drift * u) + self.jumps.psi(u)?)
    }

    pub fn psi_d1(&self, u: f64) -> Result<Complex64> {
        Ok(Complex64::new(-self.sigma2 * u, self.drift) + self.jumps.psi_d1(u)?)
    }

    /// `ψ''(u) = -σ² - ∫x² e^{iux} ν(dx)`, the negated Fourier transform of
    /// `ν_σ(dx) = x²ν(dx) + σ²δ₀(dx)`.
    pub fn psi_d2(&self, u: f64) -> Result<Complex64> {
        Ok(self.jumps.psi_d2(u)? - self.sigma2)
    }

    /// `φ_n(u) = exp(Δψ(u))`.
    pub fn char_fn(&self, scheme: &SamplingScheme, u: f64) -> Result<Complex64> {
        Ok((scheme.delta * self.psi(u)?).exp())
    }

    /// `(φ_n, φ_n', φ_n'')` at `u`.
    pub fn char_fn_with_derivatives(&self, scheme: &SamplingScheme, u: f64) -> Result<[Complex64; 3]> {
        let d = scheme.delta;
        let phi = self.char_fn(scheme, u)?;
        let p1 = self.psi_d1(u)?;
        let p2 = self.psi_d2(u)?;
        Ok([phi, d * p1 * phi, (d * p2 + d * d * p1 * p1) * phi])
    }

    /// Noise level `sqrt(|φ_n(u)|^{-2} - 1) / (√n Δ)` of the empirical exponent.
    pub fn noise_level(&self, scheme: &SamplingScheme, u: f64) -> Result<f64> {
        // |φ|^{-2} = exp(-2Δ Re ψ); work in the exponent to avoid underflow
        let log_inv_sq = -2.0 * scheme.delta * self.psi(u)?.re;
        if log_inv_sq > 700.0 {
            return Err(LevyError::FloorBreach { u, modulus: (-0.5 * log_inv_sq).exp() });
        }
        Ok(log_inv_sq.exp_m1().max(0.0).sqrt() / ((scheme.n as f64).sqrt() * scheme.delta))
    }

    /// `ν_σ(ℝ) = σ² + ∫x²ν(dx)`.
    pub fn nu_sigma_mass(&self) -> Moment {
        match self.jumps.even_moment(2) {
            Moment::Finite(m) => Moment::Finite(self.sigma2 + m),
            Moment::Infinite => Moment::Infinite,
        }
    }

    /// Checks `Re(ψ(u) + σ²u²/2) ∈ [-R|u|^β, 0]` on every grid point.
    pub fn bg_bias_bound_check(&self, beta: f64, r: f64, grid: &[f64]) -> Result<BiasReport> {
        let mut points = Vec::with_capacity(grid.len());
        for &u in grid {
            let value = self.psi(u)?.re + 0.5 * self.sigma2 * u * u;
            let lower = -r * u.abs().powf(beta);
            let slack = 1e-12 * (1.0 + lower.abs());
            points.push(BiasMargin { u, value, lower, inside: value >= lower - slack && value <= slack });
        }
        let pass = points.iter().all(|p| p.inside);
        Ok(BiasReport { beta, r, points, pass })
    }

    /// Membership in `BG(β, R)` via the moment integral.
    pub fn in_bg_class(&self, beta: f64, r: f64) -> Result<bool> {
        Ok(match self.jumps.bg_integral(beta)? {
            Moment::Finite(v) => v <= r,
            Moment::Infinite => false,
        })
    }

    /// Decay class `𝒟(σ̄)`: `Re ψ(u) ∈ [-(σ̄²/2)(1 + u²), 0]` on the grid.
    pub fn in_decay_class(&self, sigma_bar2: f64, grid: &[f64]) -> Result<bool> {
        for &u in grid {
            let re = self.psi(u)?.re;
            if re > 1e-12 || re < -0.5 * sigma_bar2 * (1.0 + u * u) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Short human-readable description used as sample provenance.
    pub fn describe(&self) -> String {
        serde_json::to_string(self).expect("triplet serializes")
    }
}
