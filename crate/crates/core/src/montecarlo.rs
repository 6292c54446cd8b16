//! Seeded Monte-Carlo SER estimation and diversity-order fitting.
//!
//! A sweep runs one point per SNR value. Every trial draws a fresh channel
//! (quasi-static block fading), a fresh payload, and fresh noise, all keyed
//! by `(point seed, trial index)` through [`crate::seed::derive`], so counts
//! are independent of worker count and scheduling. Early stopping is
//! checked on fixed-size trial batches ([`BATCH_TRIALS`]) for the same
//! reason: the set of executed trials depends only on the spec.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{apply_mimo_channel, build_equivalent_channel, generate_rayleigh_channels};
use crate::config::{SystemConfig, ValidatedConfig};
use crate::constellation::Constellation;
use crate::modem::{component_dft, remove_cyclic_prefix, transmit_frames};
use crate::receiver::{
    detect_symbols, equalizer_bank, ml_detect, mmse_equalize, subcarrier_matrices_with,
    SubcarrierBasis,
};
use crate::seed;
use crate::{Error, Result};

/// Early-stop granularity in trials. Constant so that results never depend
/// on how a batch is split across workers.
pub const BATCH_TRIALS: u64 = 256;

/// System flavor of a sweep; a label plus a constraint on the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    CddVofdm,
    /// CDD-OFDM is the `K = 1` special case.
    CddOfdm,
    /// Single-antenna V-OFDM is the `N_t = 1` special case.
    Vofdm,
    /// Conventional OFDM is the `K = 1`, `N_t = 1` special case.
    Ofdm,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::CddVofdm => "cdd-vofdm",
            Mode::CddOfdm => "cdd-ofdm",
            Mode::Vofdm => "vofdm",
            Mode::Ofdm => "ofdm",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "cdd-vofdm" => Some(Mode::CddVofdm),
            "cdd-ofdm" => Some(Mode::CddOfdm),
            "vofdm" => Some(Mode::Vofdm),
            "ofdm" => Some(Mode::Ofdm),
            _ => None,
        }
    }

    /// The mode only constrains the parameters; it never changes the
    /// simulation itself, so special cases collapse point-for-point.
    pub fn check(self, cfg: &SystemConfig) -> Result<()> {
        let (needs_k1, needs_nt1) = match self {
            Mode::CddVofdm => (false, false),
            Mode::CddOfdm => (true, false),
            Mode::Vofdm => (false, true),
            Mode::Ofdm => (true, true),
        };
        if needs_k1 && cfg.k != 1 {
            return Err(Error::ModeMismatch {
                mode: self.as_str(),
                requirement: "K = 1",
            });
        }
        if needs_nt1 && cfg.nt != 1 {
            return Err(Error::ModeMismatch {
                mode: self.as_str(),
                requirement: "N_t = 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Mmse,
    Ml,
}

impl Detector {
    pub fn as_str(self) -> &'static str {
        match self {
            Detector::Mmse => "mmse",
            Detector::Ml => "ml",
        }
    }

    pub fn parse(s: &str) -> Option<Detector> {
        match s {
            "mmse" => Some(Detector::Mmse),
            "ml" => Some(Detector::Ml),
            _ => None,
        }
    }
}

/// Everything a sweep needs; `cfg.rho` is ignored and replaced per point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub cfg: SystemConfig,
    /// SNR grid in dB, strictly increasing.
    pub snr_grid_db: Vec<f64>,
    /// Trial cap per point.
    pub max_trials: u64,
    /// Stop a point early once this many symbol errors accumulate
    /// (publishable points want at least 100).
    pub target_errors: u64,
    pub master_seed: u64,
    pub mode: Mode,
    pub detector: Detector,
    /// Zero noise injection while the equalizer keeps the grid SNR; used
    /// for perfect-recovery checks.
    pub noiseless: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<ValidatedConfig> {
        if self.snr_grid_db.is_empty()
            || self.snr_grid_db.iter().any(|s| s.is_nan())
            || self.snr_grid_db.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::GridNotIncreasing);
        }
        if self.max_trials == 0 {
            return Err(Error::NonPositive { name: "max_trials" });
        }
        if self.target_errors == 0 {
            return Err(Error::NonPositive { name: "target_errors" });
        }
        self.mode.check(&self.cfg)?;
        self.cfg.clone().with_rho(1.0).validate()
    }

    /// Slope fits consider points with at least `target_errors / 2` errors.
    pub fn qualify_errors(&self) -> u64 {
        (self.target_errors / 2).max(1)
    }
}

/// Accumulated `(trials, symbol errors)` counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialCounts {
    pub trials: u64,
    pub errors: u64,
}

impl core::ops::AddAssign for TrialCounts {
    fn add_assign(&mut self, rhs: TrialCounts) {
        self.trials += rhs.trials;
        self.errors += rhs.errors;
    }
}

/// One SNR point of a measured curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    /// `errors / (trials * N * K)`.
    pub ser: f64,
    /// Binomial standard error `sqrt(ser (1 - ser) / (trials * N * K))`.
    pub stderr: f64,
}

impl SerPoint {
    pub fn new(snr_db: f64, counts: TrialCounts, symbols_per_trial: usize) -> SerPoint {
        let total = (counts.trials * symbols_per_trial as u64) as f64;
        let ser = counts.errors as f64 / total;
        SerPoint {
            snr_db,
            trials: counts.trials,
            errors: counts.errors,
            ser,
            stderr: (ser * (1.0 - ser) / total).sqrt(),
        }
    }
}

/// Measured SER over an SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SerCurve {
    pub points: Vec<SerPoint>,
}

/// Immutable per-point state shared by every trial of that point.
#[derive(Debug, Clone)]
pub struct PointContext {
    cfg: ValidatedConfig,
    constellation: Constellation,
    basis: SubcarrierBasis,
    detector: Detector,
    noise_std: f64,
    point_seed: u64,
}

impl PointContext {
    pub fn new(spec: &SweepSpec, snr_db: f64, point_seed: u64) -> Result<PointContext> {
        spec.validate()?;
        let rho = 10.0_f64.powf(snr_db / 10.0);
        let cfg = spec.cfg.clone().with_rho(rho).validate()?;
        let constellation = Constellation::new(cfg.rate_bits())?;
        let basis = SubcarrierBasis::new(cfg.n(), cfg.k());
        let noise_std = if spec.noiseless { 0.0 } else { rho.recip().sqrt() };
        Ok(PointContext {
            cfg,
            constellation,
            basis,
            detector: spec.detector,
            noise_std,
            point_seed,
        })
    }

    pub fn cfg(&self) -> &ValidatedConfig {
        &self.cfg
    }

    /// Run one trial: draw channel and payload, push a frame through the
    /// chain, detect, and count symbol errors.
    pub fn run_trial(&self, trial: u64) -> Result<u64> {
        let base = seed::derive(self.point_seed, trial);
        let cfg = &self.cfg;
        let ch = generate_rayleigh_channels(cfg, seed::derive(base, 0));

        let m = self.constellation.len();
        let points = self.constellation.points();
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(base, 1));
        let sent: Vec<usize> = (0..cfg.nk()).map(|_| rng.random_range(0..m)).collect();
        let payload: Vec<Complex64> = sent.iter().map(|&i| points[i]).collect();

        let frames = transmit_frames(&payload, cfg)?;
        let rx = apply_mimo_channel(&frames, &ch, self.noise_std, seed::derive(base, 2))?;
        let rx_freq = component_dft(&remove_cyclic_prefix(&rx, cfg)?);

        let eq = build_equivalent_channel(&ch, cfg);
        let chans = subcarrier_matrices_with(&eq, cfg, &self.basis);
        let decided = match self.detector {
            Detector::Mmse => {
                let bank = equalizer_bank(&chans, cfg.rho())?;
                detect_symbols(&mmse_equalize(&rx_freq, &bank)?, &bank, &self.constellation)
            }
            Detector::Ml => ml_detect(&rx_freq, &chans, &self.constellation)?,
        };
        Ok(decided
            .iter()
            .zip(&sent)
            .filter(|(a, b)| a != b)
            .count() as u64)
    }

    /// Run a contiguous trial range sequentially.
    pub fn run_range(&self, trials: Range<u64>) -> Result<TrialCounts> {
        let mut counts = TrialCounts::default();
        for t in trials {
            counts.errors += self.run_trial(t)?;
            counts.trials += 1;
        }
        Ok(counts)
    }
}

/// Seed for point `index` of a sweep.
pub fn point_seed(master_seed: u64, index: usize) -> u64 {
    seed::derive(master_seed, index as u64)
}

/// Batch loop with early stopping; `run_batch` maps a trial range to its
/// counts (sequentially or across workers - the totals are the same).
pub fn run_point_with<F>(max_trials: u64, target_errors: u64, mut run_batch: F) -> Result<TrialCounts>
where
    F: FnMut(Range<u64>) -> Result<TrialCounts>,
{
    let mut counts = TrialCounts::default();
    while counts.trials < max_trials {
        let batch = BATCH_TRIALS.min(max_trials - counts.trials);
        counts += run_batch(counts.trials..counts.trials + batch)?;
        if counts.errors >= target_errors {
            break;
        }
    }
    Ok(counts)
}

/// Run one SNR point sequentially.
pub fn run_point(spec: &SweepSpec, snr_db: f64, point_seed: u64) -> Result<TrialCounts> {
    let ctx = PointContext::new(spec, snr_db, point_seed)?;
    run_point_with(spec.max_trials, spec.target_errors, |range| {
        ctx.run_range(range)
    })
}

/// Run a whole sweep sequentially; the parallel harness in the companion
/// crate produces identical counts by construction.
pub fn run_sweep(spec: &SweepSpec) -> Result<SerCurve> {
    spec.validate()?;
    let symbols = spec.cfg.n * spec.cfg.k;
    let points = spec
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let counts = run_point(spec, snr_db, point_seed(spec.master_seed, i))?;
            Ok(SerPoint::new(snr_db, counts, symbols))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SerCurve { points })
}

/// Least-squares slope of `log10(SER)` versus SNR(dB) over the last
/// `window` points with at least `min_errors` errors; the diversity
/// estimate is `-10 * slope`.
pub fn estimate_diversity(points: &[SerPoint], window: usize, min_errors: u64) -> Result<f64> {
    let needed = window.max(2);
    let qualifying: Vec<&SerPoint> = points
        .iter()
        .filter(|p| p.errors >= min_errors && p.ser > 0.0)
        .collect();
    if window < 2 || qualifying.len() < window {
        return Err(Error::InsufficientData {
            needed,
            available: qualifying.len(),
        });
    }
    let tail = &qualifying[qualifying.len() - window..];
    let n = tail.len() as f64;
    let mean_x: f64 = tail.iter().map(|p| p.snr_db).sum::<f64>() / n;
    let mean_y: f64 = tail.iter().map(|p| p.ser.log10()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for p in tail {
        let dx = p.snr_db - mean_x;
        num += dx * (p.ser.log10() - mean_y);
        den += dx * dx;
    }
    Ok(-10.0 * num / den)
}

/// Diversity order `min(floor(2^-R K), N_t L) + 1` of the MMSE receiver.
///
/// The formula assumes the full-diversity delay progression; check
/// [`ValidatedConfig::full_diversity_shifts`] before relying on it.
pub fn predict_diversity(cfg: &ValidatedConfig) -> u64 {
    let rate_limited = if cfg.rate_bits() >= usize::BITS {
        0
    } else {
        cfg.k() >> cfg.rate_bits()
    } as u64;
    rate_limited.min((cfg.nt() * cfg.l()) as u64) + 1
}
