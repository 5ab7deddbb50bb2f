//! Exact simulation of i.i.d. increments and CSV input/output.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{LevyError, Result};
use crate::model::jumps::stable_constant;
use crate::model::{JumpMeasureSpec, LevyTriplet, SamplingScheme};

/// Identifies one independent random stream. Different keys never share
/// state, so replications can run on any thread in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub cell: u64,
    pub replication: u64,
}

impl StreamKey {
    pub fn new(seed: u64, cell: u64, replication: u64) -> Self {
        Self { seed, cell, replication }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.cell.to_le_bytes());
        key[16..24].copy_from_slice(&self.replication.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Triplet(String),
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Triplet(t) => f.write_str(t),
            Provenance::External => f.write_str("external"),
        }
    }
}

/// `n` increments observed at spacing `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSample {
    pub values: Vec<f64>,
    pub scheme: SamplingScheme,
    pub provenance: Provenance,
    pub seed: Option<u64>,
}

impl IncrementSample {
    /// Wraps externally obtained increments.
    pub fn external(values: Vec<f64>, delta: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(LevyError::EmptySample);
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(LevyError::InvalidParameter(format!("increment {k} is not finite")));
        }
        let scheme = SamplingScheme::new(values.len(), delta)?;
        Ok(Self { values, scheme, provenance: Provenance::External, seed: None })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.scheme.delta
    }
}

/// Per-increment draw of the jump part, with constants precomputed once.
enum JumpDraw {
    None,
    CompoundPoisson { counts: Poisson<f64>, law: crate::model::JumpLaw, compensator: f64 },
    Stable { index: f64, scale: f64 },
    TemperedStable { pieces: usize, index: f64, scale: f64, tempering: f64 },
    Gamma { law: Gamma<f64>, compensator: f64 },
}

impl JumpDraw {
    fn new(spec: &JumpMeasureSpec, delta: f64) -> Result<Self> {
        Ok(match *spec {
            JumpMeasureSpec::Zero => JumpDraw::None,
            JumpMeasureSpec::CompoundPoisson { intensity, ref jump_law } => JumpDraw::CompoundPoisson {
                counts: Poisson::new(intensity * delta)
                    .map_err(|e| LevyError::InvalidParameter(format!("poisson mean: {e}")))?,
                law: jump_law.clone(),
                compensator: delta * intensity * jump_law.mean(),
            },
            JumpMeasureSpec::Stable { index, scale } => JumpDraw::Stable {
                index,
                scale: (delta * scale * stable_constant(index)).powf(1.0 / index),
            },
            JumpMeasureSpec::TemperedStable { index, scale, tempering } => {
                if index >= 1.0 {
                    return Err(LevyError::Unsupported(format!(
                        "exact simulation of tempered stable increments needs index < 1, got {index}"
                    )));
                }
                // log of the rejection acceptance probability over the whole step
                let log_accept = delta * scale * gamma(1.0 - index) / index * tempering.powf(index);
                let pieces = ((log_accept / std::f64::consts::LN_2).ceil() as usize).max(1);
                let sub = delta / pieces as f64;
                JumpDraw::TemperedStable {
                    pieces,
                    index,
                    scale: (sub * scale * gamma(1.0 - index) / index).powf(1.0 / index),
                    tempering,
                }
            }
            JumpMeasureSpec::Gamma { shape, rate } => JumpDraw::Gamma {
                law: Gamma::new(shape * delta, 1.0 / rate)
                    .map_err(|e| LevyError::InvalidParameter(format!("gamma law: {e}")))?,
                compensator: delta * shape / rate,
            },
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpDraw::None => 0.0,
            JumpDraw::CompoundPoisson { counts, law, compensator } => {
                let k = counts.sample(rng) as u64;
                let mut s = 0.0;
                for _ in 0..k {
                    s += law.sample(rng);
                }
                s - compensator
            }
            JumpDraw::Stable { index, scale } => scale * symmetric_stable(*index, rng),
            JumpDraw::TemperedStable { pieces, index, scale, tempering } => {
                let mut s = 0.0;
                for _ in 0..*pieces {
                    s += tempered_positive(*index, *scale, *tempering, rng);
                    s -= tempered_positive(*index, *scale, *tempering, rng);
                }
                s
            }
            JumpDraw::Gamma { law, compensator } => law.sample(rng) - compensator,
        }
    }
}

/// Chambers–Mallows–Stuck draw with characteristic function `exp(-|u|^β)`.
fn symmetric_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    if (beta - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    (beta * v).sin() / v.cos().powf(1.0 / beta) * ((v - beta * v).cos() / w).powf((1.0 - beta) / beta)
}

/// Kanter draw with Laplace transform `exp(-s^β)`, `β ∈ (0, 1)`.
fn positive_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    // open interval keeps sin(πU) away from zero
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    (beta * u).sin() / u.sin().powf(1.0 / beta) * (((1.0 - beta) * u).sin() / e).powf((1.0 - beta) / beta)
}

/// One-sided tempered stable by exponential-tilt rejection from a positive
/// stable proposal.
fn tempered_positive<R: Rng + ?Sized>(beta: f64, scale: f64, tempering: f64, rng: &mut R) -> f64 {
    loop {
        let y = scale * positive_stable(beta, rng);
        if rng.random::<f64>() <= (-tempering * y).exp() {
            return y;
        }
    }
}

/// Draws `scheme.n` increments from the stream identified by `key`.
pub fn simulate_stream(triplet: &LevyTriplet, scheme: &SamplingScheme, key: StreamKey) -> Result<IncrementSample> {
    triplet.validate()?;
    let values = draw_increments(triplet, scheme, &mut key.rng())?;
    Ok(IncrementSample {
        values,
        scheme: *scheme,
        provenance: Provenance::Triplet(triplet.describe()),
        seed: Some(key.seed),
    })
}

/// Draws `scheme.n` increments using the base stream of `seed`.
pub fn simulate(triplet: &LevyTriplet, scheme: &SamplingScheme, seed: u64) -> Result<IncrementSample> {
    simulate_stream(triplet, scheme, StreamKey::new(seed, 0, 0))
}

/// Draws increments from an arbitrary generator.
pub fn draw_increments<R: Rng + ?Sized>(
    triplet: &LevyTriplet,
    scheme: &SamplingScheme,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let delta = scheme.delta;
    let jumps = JumpDraw::new(&triplet.jumps, delta)?;
    let shift = triplet.drift * delta;
    let sd = (triplet.sigma2 * delta).sqrt();
    let mut values = Vec::with_capacity(scheme.n);
    for _ in 0..scheme.n {
        let mut x = shift;
        if sd > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            x += sd * z;
        }
        x += jumps.draw(rng);
        values.push(x);
    }
    Ok(values)
}

/// Reads increments from CSV: header line `increment`, one value per line,
/// `#` comment lines allowed. A comment of the form `# delta=<value>` supplies
/// the spacing when `delta` is `None`.
pub fn load_csv(path: impl AsRef<Path>, delta: Option<f64>) -> Result<IncrementSample> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| LevyError::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_csv(file, delta)
}

pub fn read_csv<R: Read>(input: R, delta: Option<f64>) -> Result<IncrementSample> {
    let mut header_delta = None;
    let mut values = Vec::new();
    let mut saw_header = false;
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("delta=") {
                header_delta = Some(v.trim().parse::<f64>().map_err(|e| LevyError::Parse {
                    line: line_no,
                    message: format!("bad delta comment: {e}"),
                })?);
            }
            continue;
        }
        if !saw_header {
            if trimmed != "increment" {
                return Err(LevyError::Parse {
                    line: line_no,
                    message: format!("expected header \"increment\", found {trimmed:?}"),
                });
            }
            saw_header = true;
            continue;
        }
        let v = trimmed.parse::<f64>().map_err(|e| LevyError::Parse {
            line: line_no,
            message: format!("not a number: {trimmed:?} ({e})"),
        })?;
        if !v.is_finite() {
            return Err(LevyError::Parse { line: line_no, message: format!("non-finite value {trimmed:?}") });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(LevyError::EmptySample);
    }
    let delta = delta.or(header_delta).ok_or_else(|| {
        LevyError::InvalidParameter("observation distance unknown: pass delta or add a '# delta=' line".into())
    })?;
    IncrementSample::external(values, delta)
}

/// Writes the sample with 17 significant digits, so that reading it back
/// reproduces every value bit for bit.
pub fn write_csv<W: Write>(sample: &IncrementSample, mut out: W) -> Result<()> {
    writeln!(out, "# delta={:e}", sample.scheme.delta)?;
    if let Some(seed) = sample.seed {
        writeln!(out, "# seed={seed}")?;
    }
    writeln!(out, "increment")?;
    for v in &sample.values {
        writeln!(out, "{v:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_csv(sample: &IncrementSample, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())
        .map_err(|e| LevyError::Io(format!("{}: {e}", path.as_ref().display())))?;
    write_csv(sample, std::io::BufWriter::new(file))
}
