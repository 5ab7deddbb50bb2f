use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levy_lab::ecf::ecf_moments;
use levy_lab::harness::{rate_ladder, run_study, write_ladder_csv, LadderPlan, StudyPlan};
use levy_lab::jump_tests::{bg_test, calibrate_jump_kappa, jump_presence_test, BgTestConfig};
use levy_lab::measure_test::{
    calibrate_measure, measure_test, BandLimitedKernel, MeasureTestConfig, NuSigmaSpec,
};
use levy_lab::sampler::{load_csv, save_csv, write_csv};
use levy_lab::vol_tests::{vol_test_positive, vol_test_zero, VolTestConfig};
use levy_lab::{IncrementSample, LevyError, LevyTriplet, SamplingScheme, TestOutcome};

const EXIT_REJECT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "levy-lab", version, about = "Characteristic-function tests for Levy processes")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate increments of a triplet to CSV.
    Simulate {
        #[arg(long)]
        triplet: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Volatility test (positive null, or zero null when --sigma0 is 0).
    TestVol {
        /// Null volatility sigma_0 (not squared).
        #[arg(long)]
        sigma0: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
        kappa: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kurtosis test for the presence of jumps.
    TestJumps {
        #[arg(long = "R")]
        r: f64,
        /// Band constant; calibrated under a Brownian null when absent.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        calib_reps: usize,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Blumenthal-Getoor index test.
    TestBg {
        #[arg(long)]
        beta0: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long = "K")]
        k: f64,
        /// Decay-class volatility bound sigma_bar (not squared).
        #[arg(long)]
        sigma_bar: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        regime: u8,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        eta1: f64,
        #[arg(long, default_value_t = 0.25)]
        eta2: f64,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smoothed L2 test of the jump measure against a fully specified null.
    TestMeasure {
        #[arg(long)]
        null: PathBuf,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Sobolev index (small-delta regime); 2 when absent.
        #[arg(long, conflicts_with = "c")]
        s: Option<f64>,
        /// Bandwidth constant (low-frequency regime).
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        calib_reps: usize,
        #[arg(long, value_enum, default_value_t = KernelArg::Bump)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 1024)]
        intervals: usize,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo study from a JSON plan.
    Study {
        #[arg(long)]
        plan: PathBuf,
        /// Base seed; replaces the plan's seed.
        #[arg(long)]
        seed: u64,
        /// Read the plan as a separation-rate ladder.
        #[arg(long)]
        ladder: bool,
        /// JSON result (ladder: CSV rows); stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flat per-cell CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    SmallDelta,
    LowFreq,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Bump,
    RaisedCosine,
}

/// Increments from a CSV file, or simulated from a triplet.
#[derive(Args)]
struct InputArgs {
    #[arg(long, conflicts_with = "triplet", required_unless_present = "triplet")]
    input: Option<PathBuf>,
    /// Simulate the input from this triplet instead (needs --n and --seed).
    #[arg(long, requires_all = ["n", "seed"])]
    triplet: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Sampling interval; read from the CSV header when absent.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Outcome JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_triplet(path: &Path) -> Result<LevyTriplet, LevyError> {
    let text = fs::read_to_string(path).map_err(|e| LevyError::Io(format!("{}: {e}", path.display())))?;
    LevyTriplet::from_json(&text)
}

impl InputArgs {
    fn load(&self) -> Result<IncrementSample, LevyError> {
        if let Some(path) = &self.input {
            return load_csv(path, self.delta);
        }
        let triplet = read_triplet(self.triplet.as_ref().expect("clap enforces an input"))?;
        let delta = self.delta.ok_or_else(|| LevyError::InvalidParameter("--delta is required to simulate".into()))?;
        let scheme = SamplingScheme::new(self.n.expect("clap requires --n"), delta)?;
        levy_lab::simulate(&triplet, &scheme, self.seed.expect("clap requires --seed"))
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), LevyError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| LevyError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| LevyError::Io(e.to_string()))
        }
    }
}

fn emit_outcome(outcome: &TestOutcome, output: &OutputArgs) -> Result<u8, LevyError> {
    emit(&outcome.to_json(), output.out.as_deref())?;
    if outcome.diagnostics.good_event == Some(false) {
        eprintln!("error: good event missed; the decision is not covered by the test's guarantees");
        return Ok(EXIT_RUNTIME);
    }
    Ok(if outcome.rejects() { EXIT_REJECT } else { 0 })
}

fn run(cmd: Command) -> Result<u8, LevyError> {
    match cmd {
        Command::Simulate { triplet, n, delta, seed, out } => {
            let t = read_triplet(&triplet)?;
            let sample = levy_lab::simulate(&t, &SamplingScheme::new(n, delta)?, seed)?;
            match out {
                Some(p) => save_csv(&sample, p)?,
                None => write_csv(&sample, io::stdout().lock())?,
            }
            Ok(0)
        }
        Command::TestVol { sigma0, beta, r, kappa, alpha, input, output } => {
            let sample = input.load()?;
            let mut config = VolTestConfig::new(sigma0 * sigma0, beta, r, kappa.unwrap_or(f64::NAN));
            config.kappa = kappa;
            config.alpha = alpha;
            let outcome =
                if sigma0 == 0.0 { vol_test_zero(&sample, &config)? } else { vol_test_positive(&sample, &config)? };
            emit_outcome(&outcome, &output)
        }
        Command::TestJumps { r, kappa, alpha, calib_reps, input, output } => {
            let sample = input.load()?;
            let kappa = match kappa {
                Some(k) => k,
                None => {
                    let m = ecf_moments(&sample.values)?;
                    let null = LevyTriplet::brownian(m.m2 / sample.delta());
                    let seed = input.seed.unwrap_or(0);
                    let cal = calibrate_jump_kappa(&[null], &sample.scheme, r, alpha, calib_reps, seed)?;
                    log::info!("calibrated kappa = {} from {calib_reps} replications", cal.kappa);
                    cal.kappa
                }
            };
            emit_outcome(&jump_presence_test(&sample, r, kappa)?, &output)
        }
        Command::TestBg { beta0, rho, k, sigma_bar, eps, regime, m, eta1, eta2, input, output } => {
            let sample = input.load()?;
            let s2 = sigma_bar * sigma_bar;
            let config = if regime == 1 {
                BgTestConfig::regime_one(beta0, rho, k, s2, eps, (eta1, eta2))?
            } else {
                BgTestConfig::regime_two(beta0, rho, k, s2, eps, m)?
            };
            emit_outcome(&bg_test(&sample, &config)?, &output)
        }
        Command::TestMeasure { null, regime, s, c, alpha, calib_reps, kernel, intervals, input, output } => {
            let sample = input.load()?;
            let nu = NuSigmaSpec::new(read_triplet(&null)?)?;
            let mut config = match regime {
                RegimeArg::SmallDelta => {
                    let s = s.unwrap_or_else(|| {
                        log::warn!("no Sobolev index given; using s = 2");
                        2.0
                    });
                    MeasureTestConfig::small_delta(s, alpha)
                }
                RegimeArg::LowFreq => {
                    let c = c.ok_or_else(|| LevyError::InvalidParameter("--c is required for low-freq".into()))?;
                    MeasureTestConfig::low_frequency(c, alpha)
                }
            };
            config.kernel = match kernel {
                KernelArg::Bump => BandLimitedKernel::Bump,
                KernelArg::RaisedCosine => BandLimitedKernel::RaisedCosine,
            };
            config.intervals = intervals;
            let cal = calibrate_measure(&nu, &sample.scheme, &config, calib_reps, input.seed.unwrap_or(0))?;
            if cal.failures > 0 {
                log::warn!("{} calibration replications breached the floor", cal.failures);
            }
            emit_outcome(&measure_test(&sample, &nu, &config, &cal)?, &output)
        }
        Command::Study { plan, seed, ladder, out, csv } => {
            let text = fs::read_to_string(&plan).map_err(|e| LevyError::Io(format!("{}: {e}", plan.display())))?;
            if ladder {
                let mut p: LadderPlan = serde_json::from_str(&text)
                    .map_err(|e| LevyError::InvalidParameter(format!("ladder plan: {e}")))?;
                p.seed = seed;
                let rows = rate_ladder(&p)?;
                let mut buf = Vec::new();
                write_ladder_csv(&rows, &mut buf)?;
                emit(String::from_utf8_lossy(&buf).trim_end(), out.as_deref())?;
            } else {
                let mut p = StudyPlan::from_json(&text)?;
                p.seed = seed;
                let result = run_study(&p)?;
                log::info!("study finished in {:.1} s", result.wall_clock_secs);
                emit(&result.to_json(), out.as_deref())?;
                if let Some(path) = csv {
                    let f = fs::File::create(&path).map_err(|e| LevyError::Io(format!("{}: {e}", path.display())))?;
                    result.write_csv(f)?;
                }
            }
            Ok(0)
        }
    }
}

fn exit_code(e: &LevyError) -> u8 {
    match e {
        LevyError::InvalidParameter(_)
        | LevyError::Unsupported(_)
        | LevyError::RegimePrecondition(_)
        | LevyError::SampleTooSmall(_)
        | LevyError::Parse { .. }
        | LevyError::EmptySample
        | LevyError::Io(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
