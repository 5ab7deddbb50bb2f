//! Parametric jump measures and their contribution to the characteristic exponent.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_li, gamma_ui};
use std::f64::consts::PI;

use crate::error::{LevyError, Result};
use crate::quad;

const QUAD_TOL: f64 = 1e-10;

/// Value of a moment-type integral of the jump measure, which may diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

/// Law of a single jump of a compound Poisson process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    PointMass { at: f64 },
    Gaussian { mean: f64, sd: f64 },
    Laplace { location: f64, scale: f64 },
    /// Mass `p` at `a` and `1 - p` at `b`.
    TwoPoint { a: f64, b: f64, p: f64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpLaw::PointMass { at } => at.is_finite(),
            JumpLaw::Gaussian { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            JumpLaw::Laplace { location, scale } => {
                location.is_finite() && scale.is_finite() && scale > 0.0
            }
            JumpLaw::TwoPoint { a, b, p } => {
                a.is_finite() && b.is_finite() && (0.0..=1.0).contains(&p)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(LevyError::InvalidParameter(format!("jump law {self:?}")))
        }
    }

    /// Characteristic function of one jump and its first two derivatives.
    pub fn cf_with_derivatives(&self, u: f64) -> [Complex64; 3] {
        let i = Complex64::i();
        match *self {
            JumpLaw::PointMass { at } => {
                let f = (i * u * at).exp();
                [f, i * at * f, -at * at * f]
            }
            JumpLaw::Gaussian { mean, sd } => {
                let s2 = sd * sd;
                let f = (i * u * mean - 0.5 * s2 * u * u).exp();
                let g = i * mean - s2 * u;
                [f, g * f, (g * g - s2) * f]
            }
            JumpLaw::Laplace { location, scale } => {
                let b2 = scale * scale;
                let q = 1.0 + b2 * u * u;
                let f = (i * u * location).exp() / q;
                let l1 = i * location - 2.0 * b2 * u / q;
                let l2 = -2.0 * b2 * (1.0 - b2 * u * u) / (q * q);
                [f, l1 * f, (l2 + l1 * l1) * f]
            }
            JumpLaw::TwoPoint { a, b, p } => {
                let fa = (i * u * a).exp();
                let fb = (i * u * b).exp();
                [
                    p * fa + (1.0 - p) * fb,
                    p * i * a * fa + (1.0 - p) * i * b * fb,
                    -(p * a * a * fa + (1.0 - p) * b * b * fb),
                ]
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::PointMass { at } => at,
            JumpLaw::Gaussian { mean, .. } => mean,
            JumpLaw::Laplace { location, .. } => location,
            JumpLaw::TwoPoint { a, b, p } => p * a + (1.0 - p) * b,
        }
    }

    /// Raw moment `E[J^k]`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        match *self {
            JumpLaw::PointMass { at } => at.powi(k as i32),
            JumpLaw::TwoPoint { a, b, p } => p * a.powi(k as i32) + (1.0 - p) * b.powi(k as i32),
            JumpLaw::Gaussian { mean, sd } => {
                // E[J^k] = mean E[J^{k-1}] + (k-1) sd² E[J^{k-2}]
                let (mut prev, mut cur) = (1.0, mean);
                if k == 0 {
                    return 1.0;
                }
                for j in 2..=k {
                    let next = mean * cur + (j - 1) as f64 * sd * sd * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            }
            JumpLaw::Laplace { location, scale } => {
                // J = location + scale L, E[L^{2j}] = (2j)!
                (0..=k)
                    .filter(|j| j % 2 == 0)
                    .map(|j| {
                        binomial(k, j)
                            * location.powi((k - j) as i32)
                            * scale.powi(j as i32)
                            * factorial(j)
                    })
                    .sum()
            }
        }
    }

    /// `E[g(J)]` for a function `g` that is smooth away from `breaks`.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, breaks: &[f64]) -> Result<f64> {
        match *self {
            JumpLaw::PointMass { at } => Ok(g(at)),
            JumpLaw::TwoPoint { a, b, p } => Ok(p * g(a) + (1.0 - p) * g(b)),
            JumpLaw::Gaussian { mean, sd } => {
                let dens = move |x: f64| {
                    let z = (x - mean) / sd;
                    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
                };
                integrate_real_line(|x| g(x) * dens(x), mean, breaks)
            }
            JumpLaw::Laplace { location, scale } => {
                let dens = move |x: f64| (-(x - location).abs() / scale).exp() / (2.0 * scale);
                integrate_real_line(|x| g(x) * dens(x), location, breaks)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            JumpLaw::PointMass { at } => at,
            JumpLaw::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            JumpLaw::Laplace { location, scale } => {
                let e1: f64 = Exp1.sample(rng);
                let e2: f64 = Exp1.sample(rng);
                location + scale * (e1 - e2)
            }
            JumpLaw::TwoPoint { a, b, p } => {
                if rng.random::<f64>() < p {
                    a
                } else {
                    b
                }
            }
        }
    }
}

fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, breaks: &[f64]) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().chain([center]).collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let lo = pts[0];
    let hi = *pts.last().unwrap();
    let mut total = quad::integrate_to_infinity(|x| f(x), hi, QUAD_TOL)?;
    total += quad::integrate_to_infinity(|x| f(-x), -lo, QUAD_TOL)?;
    for w in pts.windows(2) {
        total += quad::integrate(&f, w[0], w[1], QUAD_TOL)?;
    }
    Ok(total)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Parametric Lévy (jump) measure. Stable and tempered-stable measures are
/// symmetric with density `scale·|x|^{-1-index}` (times `exp(-tempering·|x|)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpMeasureSpec {
    CompoundPoisson { intensity: f64, jump_law: JumpLaw },
    Stable { index: f64, scale: f64 },
    TemperedStable { index: f64, scale: f64, tempering: f64 },
    /// Gamma process: density `shape·x^{-1}·exp(-rate·x)` on `x > 0`.
    Gamma { shape: f64, rate: f64 },
    Zero,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LevyError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_index(v: f64) -> Result<()> {
    if v > 0.0 && v < 2.0 {
        Ok(())
    } else {
        Err(LevyError::InvalidParameter(format!("index must lie in (0, 2), got {v}")))
    }
}

/// Constant `C` in `∫(cos(ux) - 1)|x|^{-1-β}dx = -C|u|^β`.
pub(crate) fn stable_constant(beta: f64) -> f64 {
    if (beta - 1.0).abs() < 1e-9 {
        PI
    } else {
        2.0 * gamma(1.0 - beta) * (PI * beta / 2.0).cos() / beta
    }
}

impl JumpMeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpMeasureSpec::CompoundPoisson { intensity, jump_law } => {
                positive("intensity", *intensity)?;
                jump_law.validate()
            }
            JumpMeasureSpec::Stable { index, scale } => {
                check_index(*index)?;
                positive("scale", *scale)
            }
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                check_index(*index)?;
                positive("scale", *scale)?;
                positive("tempering", *tempering)
            }
            JumpMeasureSpec::Gamma { shape, rate } => {
                positive("shape", *shape)?;
                positive("rate", *rate)
            }
            JumpMeasureSpec::Zero => Ok(()),
        }
    }

    /// Jump part of the exponent, `∫(e^{iux} - 1 - iux) ν(dx)`. For the
    /// symmetric stable measure the compensator vanishes by symmetry and the
    /// integral is taken in the symmetric sense.
    pub fn psi(&self, u: f64) -> Result<Complex64> {
        if u == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let i = Complex64::i();
        Ok(match *self {
            JumpMeasureSpec::Zero => Complex64::new(0.0, 0.0),
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => {
                let [f, _, _] = jump_law.cf_with_derivatives(u);
                intensity * (f - 1.0 - i * u * jump_law.mean())
            }
            JumpMeasureSpec::Stable { index, scale } => {
                Complex64::new(-scale * stable_constant(index) * u.abs().powf(index), 0.0)
            }
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                let r = u.hypot(tempering);
                let a = u.atan2(tempering);
                let v = if (index - 1.0).abs() < 1e-8 {
                    -2.0 * scale * (u * a - 0.5 * tempering * (1.0 + (u / tempering).powi(2)).ln())
                } else {
                    2.0 * scale
                        * gamma(-index)
                        * (r.powf(index) * (index * a).cos() - tempering.powf(index))
                };
                Complex64::new(v, 0.0)
            }
            JumpMeasureSpec::Gamma { shape, rate } => {
                -shape * (1.0 - i * u / rate).ln() - i * u * shape / rate
            }
        })
    }

    /// First derivative of the jump part of the exponent.
    pub fn psi_d1(&self, u: f64) -> Result<Complex64> {
        let i = Complex64::i();
        Ok(match *self {
            JumpMeasureSpec::Zero => Complex64::new(0.0, 0.0),
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => {
                let [_, d1, _] = jump_law.cf_with_derivatives(u);
                intensity * (d1 - i * jump_law.mean())
            }
            JumpMeasureSpec::Stable { index, scale } => {
                if u == 0.0 {
                    if index > 1.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        return Err(LevyError::DivergentIntegral(
                            "stable exponent is not differentiable at 0 for index <= 1".into(),
                        ));
                    }
                } else {
                    Complex64::new(
                        -scale * stable_constant(index) * index * u.abs().powf(index - 1.0) * u.signum(),
                        0.0,
                    )
                }
            }
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                let r = u.hypot(tempering);
                let a = u.atan2(tempering);
                let v = if (index - 1.0).abs() < 1e-8 {
                    -2.0 * scale * a
                } else {
                    -2.0 * scale * gamma(1.0 - index) * r.powf(index - 1.0) * ((1.0 - index) * a).sin()
                };
                Complex64::new(v, 0.0)
            }
            JumpMeasureSpec::Gamma { shape, rate } => {
                i * shape / (rate - i * u) - i * shape / rate
            }
        })
    }

    /// Second derivative of the jump part, `-∫x² e^{iux} ν(dx)`.
    pub fn psi_d2(&self, u: f64) -> Result<Complex64> {
        Ok(match *self {
            JumpMeasureSpec::Zero => Complex64::new(0.0, 0.0),
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => {
                let [_, _, d2] = jump_law.cf_with_derivatives(u);
                intensity * d2
            }
            JumpMeasureSpec::Stable { .. } => {
                return Err(LevyError::DivergentIntegral(
                    "stable measure has infinite second moment".into(),
                ))
            }
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                let r = u.hypot(tempering);
                let a = u.atan2(tempering);
                Complex64::new(
                    -2.0 * scale * gamma(2.0 - index) * r.powf(index - 2.0) * ((2.0 - index) * a).cos(),
                    0.0,
                )
            }
            JumpMeasureSpec::Gamma { shape, rate } => {
                let d = Complex64::new(rate, -u);
                -shape / (d * d)
            }
        })
    }

    /// Even moment `∫x^k ν(dx)` for even `k ≥ 2`.
    pub fn even_moment(&self, k: u32) -> Moment {
        assert!(k >= 2 && k % 2 == 0, "even moment order must be even and >= 2");
        match *self {
            JumpMeasureSpec::Zero => Moment::Finite(0.0),
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => {
                Moment::Finite(intensity * jump_law.raw_moment(k))
            }
            JumpMeasureSpec::Stable { .. } => Moment::Infinite,
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                let k = k as f64;
                Moment::Finite(2.0 * scale * gamma(k - index) * tempering.powf(index - k))
            }
            JumpMeasureSpec::Gamma { shape, rate } => {
                Moment::Finite(shape * gamma(k as f64) * rate.powi(-(k as i32)))
            }
        }
    }

    /// `∫x ν(dx)`, the mean jump per unit time used by the compensator.
    pub fn first_moment(&self) -> f64 {
        match *self {
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => intensity * jump_law.mean(),
            JumpMeasureSpec::Gamma { shape, rate } => shape / rate,
            _ => 0.0,
        }
    }

    /// `∫(2^{1-β}|x|^β ∨ x²) ν(dx)`, the intensity appearing in `BG(β, R)`.
    pub fn bg_integral(&self, beta: f64) -> Result<Moment> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(LevyError::InvalidParameter(format!("BG index must lie in (0, 2], got {beta}")));
        }
        let c = 2f64.powf(1.0 - beta);
        // |x|^{2-β} >= 2^{1-β} beyond the crossover
        let cross = if beta < 2.0 { c.powf(1.0 / (2.0 - beta)) } else { 0.0 };
        let g = move |x: f64| (c * x.abs().powf(beta)).max(x * x);
        Ok(match *self {
            JumpMeasureSpec::Zero => Moment::Finite(0.0),
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => {
                Moment::Finite(intensity * jump_law.expect(g, &[-cross, 0.0, cross])?)
            }
            JumpMeasureSpec::Stable { .. } => Moment::Infinite,
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                if beta <= index {
                    Moment::Infinite
                } else {
                    let s_low = beta - index;
                    let low = c * tempering.powf(-s_low) * gamma_li(s_low, tempering * cross);
                    let high = tempering.powf(index - 2.0) * gamma_ui(2.0 - index, tempering * cross);
                    Moment::Finite(2.0 * scale * (low + high))
                }
            }
            JumpMeasureSpec::Gamma { shape, rate } => {
                let low = c * rate.powf(-beta) * gamma_li(beta, rate * cross);
                let high = rate.powi(-2) * gamma_ui(2.0, rate * cross);
                Moment::Finite(shape * (low + high))
            }
        })
    }
}
