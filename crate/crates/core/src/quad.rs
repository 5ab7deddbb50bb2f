//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) for the analytic
//! oracles and composite Simpson for the smoothed L² statistic.

use crate::error::{LevyError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

struct Piece {
    a: f64,
    b: f64,
    est: f64,
    err: f64,
}

/// Returns (Kronrod estimate, |Kronrod - Gauss| error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over the finite interval `[a, b]`
/// with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    // globally adaptive: always bisect the piece with the largest error
    let (est, err) = gk15(&f, a, b);
    let mut pieces = vec![Piece { a, b, est, err }];
    let mut frozen_est = 0.0;
    let mut frozen_err = 0.0;
    loop {
        let total: f64 = frozen_est + pieces.iter().map(|p| p.est).sum::<f64>();
        let total_err: f64 = frozen_err + pieces.iter().map(|p| p.err).sum::<f64>();
        if total_err <= tol.max(4.0 * f64::EPSILON * total.abs()) {
            return Ok(total);
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(LevyError::Quadrature(format!(
                "no convergence on [{a}, {b}] (error estimate {total_err:e})"
            )));
        };
        if pieces.len() + 1 >= MAX_INTERVALS {
            return Err(LevyError::Quadrature(format!(
                "interval budget exhausted on [{a}, {b}] (error estimate {total_err:e})"
            )));
        }
        let p = pieces.swap_remove(i);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b || (p.b - p.a) < 1e-14 * (p.a.abs() + p.b.abs()) {
            // cannot resolve further in floating point
            frozen_est += p.est;
            frozen_err += p.err;
            continue;
        }
        let (le, lr) = gk15(&f, p.a, m);
        let (re, rr) = gk15(&f, m, p.b);
        pieces.push(Piece { a: p.a, b: m, est: le, err: lr });
        pieces.push(Piece { a: m, b: p.b, est: re, err: rr });
    }
}

/// Integral of `f` over `[a, ∞)` via the substitution `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let x = a + t / s;
        let v = f(x) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Composite Simpson rule on `intervals` (even) equal sub-intervals, given the
/// integrand values at the `intervals + 1` equispaced nodes.
pub fn simpson_nodes(values: &[f64], step: f64) -> f64 {
    let m = values.len() - 1;
    debug_assert!(m >= 2 && m % 2 == 0, "Simpson needs an even number of intervals");
    let mut acc = values[0] + values[m];
    for (k, v) in values.iter().enumerate().take(m).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

/// Composite Simpson integral of `f` over `[a, b]` with `intervals` (rounded up
/// to even) sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) & !1;
    let step = (b - a) / m as f64;
    let values: Vec<f64> = (0..=m).map(|k| f(a + k as f64 * step)).collect();
    simpson_nodes(&values, step)
}
