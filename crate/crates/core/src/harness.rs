//! Reproducible Monte Carlo level and power studies.
//!
//! Replication `r` of cell `c` draws from the stream `(seed, c, r)`, so results
//! do not depend on thread count or scheduling.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::jump_tests::{bg_test, jump_presence_test, upper_quantile, BgRegime, BgTestConfig};
use crate::measure_test::{calibrate_measure, measure_test, MeasureCalibration, MeasureTestConfig, NuSigmaSpec};
use crate::model::{JumpMeasureSpec, LevyTriplet, SamplingScheme};
use crate::outcome::TestOutcome;
use crate::sampler::{simulate_stream, StreamKey};
use crate::vol_tests::{separation_rate, vol_test_positive, vol_test_zero, zero_vol_bias_scale, VolTestConfig};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "LEVY_LAB_THREADS";

/// Test under study, with its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSpec {
    VolPositive { config: VolTestConfig },
    VolZero { config: VolTestConfig },
    JumpPresence { r: f64, kappa: f64 },
    BgIndex {
        beta0: f64,
        rho: f64,
        k: f64,
        sigma_bar_sq: f64,
        eps: f64,
        regime: BgRegime,
        /// Point-weight locations (regime one).
        #[serde(default)]
        eta: Option<(f64, f64)>,
        /// Vanishing order (regime two).
        #[serde(default)]
        m: Option<usize>,
    },
    Measure { null: LevyTriplet, config: MeasureTestConfig, calibration_replications: usize },
}

impl TestSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TestSpec::VolPositive { .. } => "vol_positive",
            TestSpec::VolZero { .. } => "vol_zero",
            TestSpec::JumpPresence { .. } => "jump_presence",
            TestSpec::BgIndex { .. } => "bg_index",
            TestSpec::Measure { .. } => "measure_l2",
        }
    }

    /// Checks that `triplet` lies in the null class of the test.
    pub fn check_null_member(&self, triplet: &LevyTriplet) -> Result<()> {
        let fail = |why: String| Err(LevyError::InvalidParameter(format!("null panel triplet {}: {why}", triplet.describe())));
        match self {
            TestSpec::VolPositive { config } | TestSpec::VolZero { config } => {
                let want = if matches!(self, TestSpec::VolPositive { .. }) { config.sigma0_sq } else { 0.0 };
                if (triplet.sigma2 - want).abs() > 1e-12 * (1.0 + want) {
                    return fail(format!("sigma^2 = {} but the null fixes {want}", triplet.sigma2));
                }
                if !triplet.in_bg_class(config.beta, config.r)? {
                    return fail(format!("outside BG({}, {})", config.beta, config.r));
                }
                let grid: Vec<f64> = (1..=32).map(|k| 0.5 * k as f64).collect();
                if !triplet.bg_bias_bound_check(config.beta, config.r, &grid)?.pass {
                    return fail("violates the exponent bias bound".into());
                }
            }
            TestSpec::JumpPresence { .. } => {
                if triplet.jumps != JumpMeasureSpec::Zero {
                    return fail("the null has no jumps".into());
                }
            }
            TestSpec::BgIndex { sigma_bar_sq, .. } => {
                let grid: Vec<f64> = (0..=64).map(|k| 0.25 * k as f64).collect();
                if !triplet.in_decay_class(*sigma_bar_sq, &grid)? {
                    return fail(format!("outside the decay class with sigma_bar^2 = {sigma_bar_sq}"));
                }
            }
            TestSpec::Measure { null, .. } => {
                if triplet != null {
                    return fail("differs from the fully specified null".into());
                }
            }
        }
        Ok(())
    }

    /// Resolves per-scheme state; the measure test is calibrated here.
    pub fn prepare(&self, scheme: &SamplingScheme, seed: u64) -> Result<PreparedTest> {
        Ok(match self {
            TestSpec::VolPositive { config } => {
                config.validate()?;
                PreparedTest::VolPositive(*config)
            }
            TestSpec::VolZero { config } => {
                config.validate()?;
                PreparedTest::VolZero(*config)
            }
            TestSpec::JumpPresence { r, kappa } => PreparedTest::JumpPresence { r: *r, kappa: *kappa },
            TestSpec::BgIndex { beta0, rho, k, sigma_bar_sq, eps, regime, eta, m } => {
                let c = match regime {
                    BgRegime::One => {
                        BgTestConfig::regime_one(*beta0, *rho, *k, *sigma_bar_sq, *eps, eta.unwrap_or((0.5, 0.25)))?
                    }
                    BgRegime::Two => BgTestConfig::regime_two(*beta0, *rho, *k, *sigma_bar_sq, *eps, m.unwrap_or(2))?,
                };
                PreparedTest::BgIndex(c)
            }
            TestSpec::Measure { null, config, calibration_replications } => {
                let nu = NuSigmaSpec::new(null.clone())?;
                let cal = calibrate_measure(&nu, scheme, config, *calibration_replications, seed)?;
                PreparedTest::Measure { null: nu, config: *config, calibration: cal }
            }
        })
    }
}

/// A test ready to run on samples of one scheme.
#[derive(Debug, Clone)]
pub enum PreparedTest {
    VolPositive(VolTestConfig),
    VolZero(VolTestConfig),
    JumpPresence { r: f64, kappa: f64 },
    BgIndex(BgTestConfig),
    Measure { null: NuSigmaSpec, config: MeasureTestConfig, calibration: MeasureCalibration },
}

impl PreparedTest {
    pub fn run(&self, sample: &crate::sampler::IncrementSample) -> Result<TestOutcome> {
        match self {
            PreparedTest::VolPositive(c) => vol_test_positive(sample, c),
            PreparedTest::VolZero(c) => vol_test_zero(sample, c),
            PreparedTest::JumpPresence { r, kappa } => jump_presence_test(sample, *r, *kappa),
            PreparedTest::BgIndex(c) => bg_test(sample, c),
            PreparedTest::Measure { null, config, calibration } => measure_test(sample, null, config, calibration),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub triplet: LevyTriplet,
    /// Nominal distance from the null, as reported in the result.
    #[serde(default)]
    pub separation: Option<f64>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyPlan {
    pub test: TestSpec,
    pub null_panel: Vec<LevyTriplet>,
    #[serde(default)]
    pub alternatives: Vec<Alternative>,
    pub schemes: Vec<SamplingScheme>,
    pub replications: usize,
    pub seed: u64,
    /// Share replication streams across all cells of a scheme.
    #[serde(default)]
    pub coupled: bool,
}

impl StudyPlan {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| LevyError::InvalidParameter(format!("study plan: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(LevyError::InvalidParameter("replications must be positive".into()));
        }
        if self.schemes.is_empty() {
            return Err(LevyError::InvalidParameter("plan has no sampling schemes".into()));
        }
        if self.null_panel.is_empty() && self.alternatives.is_empty() {
            return Err(LevyError::InvalidParameter("plan has no triplets".into()));
        }
        for t in &self.null_panel {
            t.validate()?;
            self.test.check_null_member(t)?;
        }
        for a in &self.alternatives {
            a.triplet.validate()?;
        }
        for s in &self.schemes {
            SamplingScheme::new(s.n, s.delta)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Null,
    Alternative,
}

/// Aggregate over the replications of one (triplet, scheme) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: usize,
    pub hypothesis: Hypothesis,
    pub label: String,
    pub separation: Option<f64>,
    pub n: usize,
    pub delta: f64,
    pub replications: usize,
    pub rejections: usize,
    pub acceptances: usize,
    /// Runtime failures and good-event misses.
    pub failures: usize,
    pub rejection_rate: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    pub mean_statistic: Option<f64>,
    pub median_statistic: Option<f64>,
    pub good_event_frequency: Option<f64>,
    pub failure_reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub test: String,
    pub seed: u64,
    pub cells: Vec<CellResult>,
    /// Not serialized, so repeated runs stay byte-identical.
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

impl StudyResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("study result serializes")
    }

    /// One row per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "cell",
            "hypothesis",
            "label",
            "separation",
            "n",
            "delta",
            "replications",
            "rejections",
            "acceptances",
            "failures",
            "rejection_rate",
            "wilson_lower",
            "wilson_upper",
            "mean_statistic",
            "median_statistic",
            "good_event_frequency",
        ])
        .map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                c.cell.to_string(),
                match c.hypothesis {
                    Hypothesis::Null => "null".into(),
                    Hypothesis::Alternative => "alternative".into(),
                },
                c.label.clone(),
                opt(c.separation),
                c.n.to_string(),
                format!("{:.17e}", c.delta),
                c.replications.to_string(),
                c.rejections.to_string(),
                c.acceptances.to_string(),
                c.failures.to_string(),
                format!("{:.17e}", c.rejection_rate),
                format!("{:.17e}", c.wilson_lower),
                format!("{:.17e}", c.wilson_upper),
                opt(c.mean_statistic),
                opt(c.median_statistic),
                opt(c.good_event_frequency),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> LevyError {
    LevyError::Io(e.to_string())
}

/// Wilson score interval for `k` successes in `m` trials.
pub fn wilson_interval(k: usize, m: usize, z: f64) -> (f64, f64) {
    if m == 0 {
        return (0.0, 1.0);
    }
    let m = m as f64;
    let p = k as f64 / m;
    let z2 = z * z;
    let denom = 1.0 + z2 / m;
    let centre = (p + z2 / (2.0 * m)) / denom;
    let half = z * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt() / denom;
    let lower = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let upper = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lower, upper)
}

/// Two-sided 95% normal quantile used for the Wilson intervals.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

enum Rep {
    Decided { reject: bool, statistic: f64, good_event: Option<bool> },
    Failed(String),
}

fn replicate(test: &PreparedTest, triplet: &LevyTriplet, scheme: &SamplingScheme, key: StreamKey) -> Result<Rep> {
    let sample = simulate_stream(triplet, scheme, key)?;
    match test.run(&sample) {
        Ok(out) => {
            if out.diagnostics.good_event == Some(false) {
                return Ok(Rep::Failed("good event missed".into()));
            }
            Ok(Rep::Decided { reject: out.rejects(), statistic: out.statistic, good_event: out.diagnostics.good_event })
        }
        Err(e) if e.is_runtime_failure() => Ok(Rep::Failed(e.to_string())),
        Err(e) => Err(e),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v
            .trim()
            .parse()
            .map_err(|_| LevyError::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(k.max(1));
    }
    b.build().map_err(|e| LevyError::InvalidParameter(format!("thread pool: {e}")))
}

/// Runs `replications` replications of one cell with streams `(seed, stream, r)`.
#[allow(clippy::too_many_arguments)]
fn run_cell(
    test: &PreparedTest,
    triplet: &LevyTriplet,
    scheme: &SamplingScheme,
    seed: u64,
    stream: u64,
    replications: usize,
    cell: usize,
    hypothesis: Hypothesis,
    label: String,
    separation: Option<f64>,
) -> Result<CellResult> {
    let reps: Vec<Rep> = (0..replications)
        .into_par_iter()
        .map(|r| replicate(test, triplet, scheme, StreamKey::new(seed, stream, r as u64)))
        .collect::<Result<_>>()?;
    let (mut rejections, mut acceptances) = (0, 0);
    let mut stats = Vec::new();
    let mut ge = (0usize, 0usize);
    let mut failure_reasons: Vec<String> = Vec::new();
    for r in reps {
        match r {
            Rep::Decided { reject, statistic, good_event } => {
                if reject {
                    rejections += 1;
                } else {
                    acceptances += 1;
                }
                if statistic.is_finite() {
                    stats.push(statistic);
                }
                if let Some(g) = good_event {
                    ge.1 += 1;
                    if g {
                        ge.0 += 1;
                    }
                }
            }
            Rep::Failed(why) => {
                if why == "good event missed" {
                    ge.1 += 1;
                }
                if !failure_reasons.contains(&why) {
                    failure_reasons.push(why);
                }
            }
        }
    }
    let failures = replications - rejections - acceptances;
    let (wl, wu) = wilson_interval(rejections, replications, WILSON_Z);
    let mean = (!stats.is_empty()).then(|| stats.iter().sum::<f64>() / stats.len() as f64);
    let median = (!stats.is_empty()).then(|| upper_quantile(&mut stats, 0.5));
    Ok(CellResult {
        cell,
        hypothesis,
        label,
        separation,
        n: scheme.n,
        delta: scheme.delta,
        replications,
        rejections,
        acceptances,
        failures,
        rejection_rate: rejections as f64 / replications as f64,
        wilson_lower: wl,
        wilson_upper: wu,
        mean_statistic: mean,
        median_statistic: median,
        good_event_frequency: (ge.1 > 0).then(|| ge.0 as f64 / ge.1 as f64),
        failure_reasons,
    })
}

/// Runs every (triplet, scheme) cell of the plan: null rows first, then
/// alternatives, scheme by scheme.
pub fn run_study(plan: &StudyPlan) -> Result<StudyResult> {
    plan.validate()?;
    let start = Instant::now();
    let pool = thread_pool()?;
    let cells = pool.install(|| -> Result<Vec<CellResult>> {
        let mut cells = Vec::new();
        for (si, scheme) in plan.schemes.iter().enumerate() {
            let test = plan.test.prepare(scheme, plan.seed)?;
            let rows = plan
                .null_panel
                .iter()
                .map(|t| (Hypothesis::Null, t, t.describe(), None))
                .chain(plan.alternatives.iter().map(|a| {
                    (
                        Hypothesis::Alternative,
                        &a.triplet,
                        a.label.clone().unwrap_or_else(|| a.triplet.describe()),
                        a.separation,
                    )
                }));
            for (hyp, triplet, label, sep) in rows {
                let cell = cells.len();
                let stream = if plan.coupled { si as u64 } else { cell as u64 };
                cells.push(run_cell(&test, triplet, scheme, plan.seed, stream, plan.replications, cell, hyp, label, sep)?);
            }
        }
        Ok(cells)
    })?;
    Ok(StudyResult {
        test: plan.test.name().into(),
        seed: plan.seed,
        cells,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Direction of the volatility perturbation in a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPlan {
    /// `vol_positive` or `vol_zero`.
    pub test: TestSpec,
    /// Null triplet; alternatives change only `σ²`.
    pub base: LevyTriplet,
    pub multipliers: Vec<f64>,
    pub schemes: Vec<SamplingScheme>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_direction")]
    pub direction: LadderDirection,
}

fn default_direction() -> LadderDirection {
    LadderDirection::Up
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub n: usize,
    pub delta: f64,
    pub multiplier: f64,
    /// Alternative `σ²`.
    pub sigma2: f64,
    pub rate: f64,
    pub rejection_rate: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    pub failures: usize,
}

/// Power against `σ₁² = σ₀²(1 ± c·r_n)` (positive-volatility test) or
/// `σ₁² = c·b_n` with the zero-volatility bias scale `b_n`, for each multiplier
/// `c`. All multipliers of a scheme share streams, so `c = 0` reproduces the
/// level row.
pub fn rate_ladder(plan: &LadderPlan) -> Result<Vec<LadderRow>> {
    if plan.replications == 0 {
        return Err(LevyError::InvalidParameter("replications must be positive".into()));
    }
    plan.base.validate()?;
    plan.test.check_null_member(&plan.base)?;
    let pool = thread_pool()?;
    pool.install(|| {
        let mut rows = Vec::new();
        for (si, scheme) in plan.schemes.iter().enumerate() {
            let scheme = SamplingScheme::new(scheme.n, scheme.delta)?;
            let test = plan.test.prepare(&scheme, plan.seed)?;
            let (rate, shift): (f64, Box<dyn Fn(f64) -> f64>) = match &plan.test {
                TestSpec::VolPositive { config } => {
                    let r = separation_rate(config, &scheme)?;
                    let s0 = config.sigma0_sq;
                    let sign = if plan.direction == LadderDirection::Up { 1.0 } else { -1.0 };
                    (r, Box::new(move |c| s0 * (1.0 + sign * c * r)))
                }
                TestSpec::VolZero { config } => {
                    let b = zero_vol_bias_scale(config, &scheme);
                    (b, Box::new(move |c| c * b))
                }
                other => {
                    return Err(LevyError::Unsupported(format!("rate ladder for {}", other.name())));
                }
            };
            for &c in &plan.multipliers {
                let sigma2 = shift(c);
                if sigma2 < 0.0 {
                    return Err(LevyError::InvalidParameter(format!("multiplier {c} gives negative sigma^2")));
                }
                let mut t = plan.base.clone();
                t.sigma2 = sigma2;
                let cell = run_cell(
                    &test,
                    &t,
                    &scheme,
                    plan.seed,
                    si as u64,
                    plan.replications,
                    rows.len(),
                    if c == 0.0 { Hypothesis::Null } else { Hypothesis::Alternative },
                    String::new(),
                    Some(c),
                )?;
                rows.push(LadderRow {
                    n: scheme.n,
                    delta: scheme.delta,
                    multiplier: c,
                    sigma2,
                    rate,
                    rejection_rate: cell.rejection_rate,
                    wilson_lower: cell.wilson_lower,
                    wilson_upper: cell.wilson_upper,
                    failures: cell.failures,
                });
            }
        }
        Ok(rows)
    })
}

pub fn write_ladder_csv<W: Write>(rows: &[LadderRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
