//! Empirical characteristic function, its derivatives, the empirical
//! characteristic exponent and the analytic covariance diagnostics.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::model::{LevyTriplet, SamplingScheme};
use crate::sampler::IncrementSample;

/// Default modulus floor below which `φ̂` is not divided by or logged.
pub const DEFAULT_FLOOR: f64 = 1e-8;

/// `φ̂_n` and its first two derivatives on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcfEvaluation {
    pub grid: Vec<f64>,
    pub phi_hat: Vec<Complex64>,
    pub phi_hat_d1: Vec<Complex64>,
    pub phi_hat_d2: Vec<Complex64>,
    pub n: usize,
    pub delta: f64,
}

impl EcfEvaluation {
    /// Builds an evaluation from given values, e.g. analytic injections.
    pub fn from_values(
        grid: Vec<f64>,
        phi_hat: Vec<Complex64>,
        phi_hat_d1: Vec<Complex64>,
        phi_hat_d2: Vec<Complex64>,
        n: usize,
        delta: f64,
    ) -> Result<Self> {
        let m = grid.len();
        if phi_hat.len() != m || phi_hat_d1.len() != m || phi_hat_d2.len() != m {
            return Err(LevyError::InvalidParameter("grid and value lengths differ".into()));
        }
        Ok(Self { grid, phi_hat, phi_hat_d1, phi_hat_d2, n, delta })
    }

    /// Noiseless evaluation: the analytic `φ_n` and derivatives of `triplet`.
    pub fn analytic(triplet: &LevyTriplet, scheme: &SamplingScheme, grid: &[f64]) -> Result<Self> {
        let mut phi = Vec::with_capacity(grid.len());
        let mut d1 = Vec::with_capacity(grid.len());
        let mut d2 = Vec::with_capacity(grid.len());
        for &u in grid {
            let [a, b, c] = triplet.char_fn_with_derivatives(scheme, u)?;
            phi.push(a);
            d1.push(b);
            d2.push(c);
        }
        Self::from_values(grid.to_vec(), phi, d1, d2, scheme.n, scheme.delta)
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.phi_hat.iter().map(|z| z.norm()).collect()
    }
}

/// Direct evaluation of `φ̂_n`, `φ̂_n'`, `φ̂_n''` at arbitrary frequencies.
pub fn ecf(sample: &IncrementSample, grid: &[f64]) -> EcfEvaluation {
    let n = sample.len();
    let inv = 1.0 / n as f64;
    let mut phi = Vec::with_capacity(grid.len());
    let mut d1 = Vec::with_capacity(grid.len());
    let mut d2 = Vec::with_capacity(grid.len());
    for &u in grid {
        let (mut c0, mut s0, mut c1, mut s1, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &x in &sample.values {
            let (s, c) = (u * x).sin_cos();
            let x2 = x * x;
            c0 += c;
            s0 += s;
            c1 += x * c;
            s1 += x * s;
            c2 += x2 * c;
            s2 += x2 * s;
        }
        phi.push(Complex64::new(c0 * inv, s0 * inv));
        // (ix)e^{iux} and (ix)²e^{iux}
        d1.push(Complex64::new(-s1 * inv, c1 * inv));
        d2.push(Complex64::new(-c2 * inv, -s2 * inv));
    }
    EcfEvaluation {
        grid: grid.to_vec(),
        phi_hat: phi,
        phi_hat_d1: d1,
        phi_hat_d2: d2,
        n,
        delta: sample.delta(),
    }
}

/// `φ̂_n` alone at a single frequency.
pub fn ecf_at(values: &[f64], u: f64) -> Complex64 {
    let (mut c0, mut s0) = (0.0, 0.0);
    for &x in values {
        let (s, c) = (u * x).sin_cos();
        c0 += c;
        s0 += s;
    }
    let inv = 1.0 / values.len() as f64;
    Complex64::new(c0 * inv, s0 * inv)
}

/// `φ̂_n` alone on an arbitrary grid.
pub fn ecf_values(values: &[f64], grid: &[f64]) -> Vec<Complex64> {
    grid.iter().map(|&u| ecf_at(values, u)).collect()
}

const LANES: usize = 4;
const ANCHOR: usize = 64;

struct Sums {
    re: [Vec<f64>; 3],
    im: [Vec<f64>; 3],
}

fn accumulate_block<const N: usize>(xs: &[f64; N], step: f64, sums: &mut Sums) {
    let nodes = sums.re[0].len();
    let mut wr = [0.0; N];
    let mut wi = [0.0; N];
    let mut x2 = [0.0; N];
    for l in 0..N {
        let (s, c) = (step * xs[l]).sin_cos();
        wr[l] = c;
        wi[l] = s;
        x2[l] = xs[l] * xs[l];
    }
    let mut j0 = 0;
    while j0 < nodes {
        let mut zr = [0.0; N];
        let mut zi = [0.0; N];
        for l in 0..N {
            let (s, c) = (j0 as f64 * step * xs[l]).sin_cos();
            zr[l] = c;
            zi[l] = s;
        }
        let end = (j0 + ANCHOR).min(nodes);
        for j in j0..end {
            let (mut a0r, mut a0i, mut a1r, mut a1i, mut a2r, mut a2i) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for l in 0..N {
                a0r += zr[l];
                a0i += zi[l];
                a1r += xs[l] * zr[l];
                a1i += xs[l] * zi[l];
                a2r += x2[l] * zr[l];
                a2i += x2[l] * zi[l];
                let r = zr[l] * wr[l] - zi[l] * wi[l];
                zi[l] = zr[l] * wi[l] + zi[l] * wr[l];
                zr[l] = r;
            }
            sums.re[0][j] += a0r;
            sums.im[0][j] += a0i;
            sums.re[1][j] += a1r;
            sums.im[1][j] += a1i;
            sums.re[2][j] += a2r;
            sums.im[2][j] += a2i;
        }
        j0 = end;
    }
}

/// `φ̂_n` and derivatives on the uniform grid `u_j = j·step`, `j = 0..nodes`,
/// using a rotation recurrence that is re-anchored with exact phases every
/// 64 nodes. Agrees with [`ecf`] to rounding error but costs a complex
/// multiply instead of a `sin_cos` per sample and node.
pub fn ecf_uniform(sample: &IncrementSample, step: f64, nodes: usize) -> EcfEvaluation {
    let n = sample.len();
    let mut sums = Sums {
        re: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
        im: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
    };
    let mut chunks = sample.values.chunks_exact(LANES);
    for c in &mut chunks {
        let xs: &[f64; LANES] = c.try_into().expect("chunk has LANES elements");
        accumulate_block(xs, step, &mut sums);
    }
    for &x in chunks.remainder() {
        accumulate_block(&[x], step, &mut sums);
    }
    let inv = 1.0 / n as f64;
    let grid: Vec<f64> = (0..nodes).map(|j| j as f64 * step).collect();
    let phi = (0..nodes).map(|j| Complex64::new(sums.re[0][j] * inv, sums.im[0][j] * inv)).collect();
    let d1 = (0..nodes).map(|j| Complex64::new(-sums.im[1][j] * inv, sums.re[1][j] * inv)).collect();
    let d2 = (0..nodes).map(|j| Complex64::new(-sums.re[2][j] * inv, -sums.im[2][j] * inv)).collect();
    EcfEvaluation { grid, phi_hat: phi, phi_hat_d1: d1, phi_hat_d2: d2, n, delta: sample.delta() }
}

/// Sample mean and centred second and fourth moments (divisor `n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub mean: f64,
    pub m2: f64,
    pub m4: f64,
}

pub fn ecf_moments(values: &[f64]) -> Result<SampleMoments> {
    if values.len() < 2 {
        return Err(LevyError::SampleTooSmall(format!("moments need n >= 2, got {}", values.len())));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    Ok(SampleMoments { mean, m2: m2 / n, m4: m4 / n })
}

/// Guards applied while unwrapping the phase of `φ̂_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnwrapOptions {
    /// Minimal admissible `|φ̂_n|`.
    pub floor: f64,
    /// Largest admissible phase change between neighbouring path points.
    /// Wrapped phase differences always lie in `(-π, π]`, so a guard at `π`
    /// could never fire; the default is `π/2`.
    pub max_phase_step: f64,
}

impl Default for UnwrapOptions {
    fn default() -> Self {
        Self { floor: DEFAULT_FLOOR, max_phase_step: PI / 2.0 }
    }
}

/// `ψ̂_n = Δ⁻¹ log φ̂_n` along the continuous branch with `ψ̂_n(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalExponent {
    pub grid: Vec<f64>,
    pub psi_hat: Vec<Complex64>,
    pub unwrap_ok: Vec<bool>,
    pub delta: f64,
}

impl EmpiricalExponent {
    /// First grid point whose branch could not be certified.
    pub fn first_failure(&self) -> Option<f64> {
        self.grid
            .iter()
            .zip(&self.unwrap_ok)
            .filter(|(_, ok)| !**ok)
            .map(|(u, _)| *u)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
    }

    pub fn require_ok(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(u) => Err(LevyError::WindingAmbiguity {
                u,
                reason: "phase could not be unwrapped continuously from 0".into(),
            }),
        }
    }
}

fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Unwraps `values` along the ordered path starting from phase 0 at `u = 0`.
/// Returns the continuous phases and a per-point flag that becomes false from
/// the first guard violation onwards.
fn unwrap_path(values: &[Complex64], opts: &UnwrapOptions) -> (Vec<f64>, Vec<bool>) {
    let mut phases = Vec::with_capacity(values.len());
    let mut ok = Vec::with_capacity(values.len());
    let mut prev = 0.0;
    let mut good = true;
    for z in values {
        let step = wrap(z.arg() - prev);
        if z.norm() < opts.floor || step.abs() >= opts.max_phase_step {
            good = false;
        }
        prev += step;
        phases.push(prev);
        ok.push(good);
    }
    (phases, ok)
}

/// Distinguished logarithm taken along the evaluation grid itself, outward
/// from 0 in both directions. The grid must be sorted and fine enough to
/// follow the phase.
pub fn distinguished_log(ecf: &EcfEvaluation, opts: &UnwrapOptions) -> Result<EmpiricalExponent> {
    if ecf.grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(LevyError::InvalidParameter("grid must be sorted".into()));
    }
    let m = ecf.grid.len();
    let split = ecf.grid.partition_point(|&u| u < 0.0);
    let mut psi = vec![Complex64::new(0.0, 0.0); m];
    let mut flags = vec![true; m];
    let mut fill = |idx: Vec<usize>| {
        let vals: Vec<Complex64> = idx.iter().map(|&i| ecf.phi_hat[i]).collect();
        let (phases, ok) = unwrap_path(&vals, opts);
        for (k, &i) in idx.iter().enumerate() {
            psi[i] = Complex64::new(ecf.phi_hat[i].norm().ln(), phases[k]) / ecf.delta;
            flags[i] = ok[k];
        }
    };
    fill((split..m).collect());
    fill((0..split).rev().collect());
    for (i, &u) in ecf.grid.iter().enumerate() {
        if u == 0.0 {
            psi[i] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(EmpiricalExponent { grid: ecf.grid.clone(), psi_hat: psi, unwrap_ok: flags, delta: ecf.delta })
}

/// Dense-path step for which the analytic model predicts phase increments
/// below `π/4` on `[0, u_max]`.
pub fn model_dense_step(triplet: &LevyTriplet, scheme: &SamplingScheme, u_max: f64) -> f64 {
    let probes = 512;
    let mut slope: f64 = 0.0;
    for k in 1..=probes {
        let u = u_max * k as f64 / probes as f64;
        if let Ok(d) = triplet.psi_d1(u) {
            slope = slope.max((scheme.delta * d.im).abs());
        }
    }
    let coarse = u_max / 64.0;
    if slope > 0.0 {
        coarse.min(PI / (4.0 * slope))
    } else {
        coarse
    }
}

/// Distinguished logarithm at arbitrary grid points, unwrapped along a dense
/// uniform path of spacing at most `dense_step` computed from the sample.
pub fn empirical_exponent(
    sample: &IncrementSample,
    grid: &[f64],
    dense_step: f64,
    opts: &UnwrapOptions,
) -> Result<EmpiricalExponent> {
    if !(dense_step > 0.0) {
        return Err(LevyError::InvalidParameter("dense step must be positive".into()));
    }
    let u_max = grid.iter().fold(0.0f64, |a, &u| a.max(u.abs()));
    let nodes = (u_max / dense_step).ceil() as usize + 1;
    let step = if nodes > 1 { u_max / (nodes - 1) as f64 } else { 1.0 };
    let path = ecf_uniform(sample, step, nodes);
    // the first path node is u = 0 itself
    let (phases, ok) = unwrap_path(&path.phi_hat[1..], opts);
    let point = ecf_values(&sample.values, grid);
    let delta = sample.delta();
    let mut psi = Vec::with_capacity(grid.len());
    let mut flags = Vec::with_capacity(grid.len());
    for (&u, z) in grid.iter().zip(point) {
        let a = u.abs();
        if a == 0.0 {
            psi.push(Complex64::new(0.0, 0.0));
            flags.push(true);
            continue;
        }
        let zp = if u < 0.0 { z.conj() } else { z };
        let j = ((a / step).round() as usize).min(nodes - 1);
        let (base, base_ok) = if j == 0 { (0.0, true) } else { (phases[j - 1], ok[j - 1]) };
        let d = wrap(zp.arg() - base);
        let good = base_ok && zp.norm() >= opts.floor && d.abs() < opts.max_phase_step;
        let mut v = Complex64::new(zp.norm().ln(), base + d) / delta;
        if u < 0.0 {
            v = v.conj();
        }
        psi.push(v);
        flags.push(good);
    }
    Ok(EmpiricalExponent { grid: grid.to_vec(), psi_hat: psi, unwrap_ok: flags, delta })
}

/// `ψ̂_n'' = Δ⁻¹[φ̂''/φ̂ - (φ̂'/φ̂)²]`, the exact second log-derivative.
pub fn psi_hat_d2(ecf: &EcfEvaluation, floor: f64) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(ecf.grid.len());
    for k in 0..ecf.grid.len() {
        let f = ecf.phi_hat[k];
        if f.norm() < floor {
            return Err(LevyError::FloorBreach { u: ecf.grid[k], modulus: f.norm() });
        }
        let l1 = ecf.phi_hat_d1[k] / f;
        out.push((ecf.phi_hat_d2[k] / f - l1 * l1) / ecf.delta);
    }
    Ok(out)
}

/// `Cov_ℂ(φ̂_n(u), φ̂_n(v)) = (φ_n(u - v) - φ_n(u)φ_n(-v)) / n`.
pub fn ecf_cov(triplet: &LevyTriplet, scheme: &SamplingScheme, u: f64, v: f64) -> Result<Complex64> {
    let a = triplet.char_fn(scheme, u - v)?;
    let b = triplet.char_fn(scheme, u)? * triplet.char_fn(scheme, -v)?;
    Ok((a - b) / scheme.n as f64)
}

/// Asymptotic covariance of `√n(Re, Im)(φ̂_n(U) - φ_n(U))`.
pub fn clt_covariance(triplet: &LevyTriplet, scheme: &SamplingScheme, u: f64) -> Result<[[f64; 2]; 2]> {
    let p1 = triplet.char_fn(scheme, u)?;
    let p2 = triplet.char_fn(scheme, 2.0 * u)?;
    let s11 = 0.5 * (1.0 + p2.re - 2.0 * p1.re * p1.re);
    let s12 = 0.5 * (p2.im - 2.0 * p1.re * p1.im);
    let s22 = 0.5 * (1.0 - p2.re - 2.0 * p1.im * p1.im);
    Ok([[s11, s12], [s12, s22]])
}

/// Asymptotic standard deviation of `√n(|φ̂_n(U)| - |φ_n(U)|)` by the delta
/// method applied to [`clt_covariance`].
pub fn modulus_clt_sd(triplet: &LevyTriplet, scheme: &SamplingScheme, u: f64) -> Result<f64> {
    let s = clt_covariance(triplet, scheme, u)?;
    let p = triplet.char_fn(scheme, u)?;
    let r = p.norm();
    if r == 0.0 {
        return Err(LevyError::StatisticUndefined("modulus map is not differentiable at 0".into()));
    }
    let (a, b) = (p.re / r, p.im / r);
    Ok((a * a * s[0][0] + 2.0 * a * b * s[0][1] + b * b * s[1][1]).max(0.0).sqrt())
}

/// Outcome of checking `|φ̂_n| ≥ ½|φ_n|` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodEventReport {
    pub holds: bool,
    /// `min |φ̂_n(u)| / |φ_n(u)|` over the grid.
    pub min_ratio: f64,
    pub argmin: f64,
}

/// Checks the good event against arbitrary reference moduli.
pub fn good_event_against(ecf: &EcfEvaluation, reference: &[f64]) -> GoodEventReport {
    let mut min_ratio = f64::INFINITY;
    let mut argmin = 0.0;
    for ((&u, z), &r) in ecf.grid.iter().zip(&ecf.phi_hat).zip(reference) {
        let ratio = z.norm() / r;
        if ratio < min_ratio {
            min_ratio = ratio;
            argmin = u;
        }
    }
    GoodEventReport { holds: min_ratio >= 0.5, min_ratio, argmin }
}

/// Checks the good event against the analytic `φ_n` of the null triplet.
pub fn good_event(ecf: &EcfEvaluation, triplet: &LevyTriplet, scheme: &SamplingScheme) -> Result<GoodEventReport> {
    let reference = ecf
        .grid
        .iter()
        .map(|&u| triplet.char_fn(scheme, u).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(good_event_against(ecf, &reference))
}

/// Writes `u, Re φ̂, Im φ̂, |φ̂|, Re ψ̂, Im ψ̂, unwrap_ok` rows.
pub fn write_diagnostics<W: Write>(ecf: &EcfEvaluation, exponent: &EmpiricalExponent, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "re_phi_hat", "im_phi_hat", "abs_phi_hat", "re_psi_hat", "im_psi_hat", "unwrap_ok"])
        .map_err(|e| LevyError::Io(e.to_string()))?;
    for k in 0..ecf.grid.len() {
        let z = ecf.phi_hat[k];
        let p = exponent.psi_hat[k];
        w.write_record([
            format!("{:.16e}", ecf.grid[k]),
            format!("{:.16e}", z.re),
            format!("{:.16e}", z.im),
            format!("{:.16e}", z.norm()),
            format!("{:.16e}", p.re),
            format!("{:.16e}", p.im),
            exponent.unwrap_ok[k].to_string(),
        ])
        .map_err(|e| LevyError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
