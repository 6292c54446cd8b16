//! `vofdm` - CDD-V-OFDM baseband simulator CLI.

use std::fs::File;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vofdm_core::channel::{build_equivalent_channel, check_overlap};
use vofdm_core::config::{SystemConfig, ValidatedConfig};
use vofdm_core::montecarlo::{estimate_diversity, predict_diversity, Detector, Mode, SweepSpec};
use vofdm_sim::csvout::{curve_to_plot, CsvSink};
use vofdm_sim::manifest::RunManifest;
use vofdm_sim::sweep::run_sweep_with;
use vofdm_sim::{channel_io, config_file, verify, SimError};

#[derive(Parser)]
#[command(
    name = "vofdm",
    version,
    about = "Cyclic-delay-diversity vector-OFDM link simulator",
    long_about = "Simulates the CDD-V-OFDM transmit chain over multipath MIMO Rayleigh \
                  fading with per-subcarrier MMSE or joint-ML detection, and measures \
                  symbol-error-rate curves and diversity orders."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an SNR sweep and write SER results as CSV.
    Sweep(SweepArgs),
    /// Print the predicted MMSE diversity order for a config.
    Predict(PredictArgs),
    /// Run the model-equivalence and shift-equivalence suites.
    Verify(VerifyArgs),
    /// Print the equivalent-channel layout for a config and a CIR file.
    ChannelDemo(ChannelDemoArgs),
}

/// System parameters; flags override config-file keys of the same name.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// Config file with `key = value` lines (keys: n, k, nt, l, gamma,
    /// delta_bar, rate_bits, mode, detector).
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
    /// Number of vector subcarriers (component DFT size).
    #[arg(long)]
    n: Option<usize>,
    /// Vector size (symbols per vector).
    #[arg(long)]
    k: Option<usize>,
    /// Transmit antenna count.
    #[arg(long)]
    nt: Option<usize>,
    /// Channel length per antenna, in taps.
    #[arg(long)]
    l: Option<usize>,
    /// Cyclic prefix length in vectors (default ceil(L/K) + 1).
    #[arg(long)]
    gamma: Option<usize>,
    /// Comma list of per-antenna vector delays (default m * ceil(L/K)).
    #[arg(long, value_name = "LIST")]
    delta_bar: Option<String>,
    /// Bits per symbol (1, 2, 3, 4 or 6).
    #[arg(long)]
    rate_bits: Option<u32>,
    /// System flavor: cdd-vofdm, cdd-ofdm, vofdm or ofdm.
    #[arg(long)]
    mode: Option<String>,
    /// Detector: mmse or ml.
    #[arg(long)]
    detector: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// First SNR point in dB.
    #[arg(long, default_value_t = 0.0)]
    snr_start: f64,
    /// Last SNR point in dB (inclusive).
    #[arg(long, default_value_t = 20.0)]
    snr_stop: f64,
    /// SNR step in dB.
    #[arg(long, default_value_t = 5.0)]
    snr_step: f64,
    /// Trial cap per SNR point.
    #[arg(long, default_value_t = 100_000)]
    max_trials: u64,
    /// Stop a point early after this many symbol errors.
    #[arg(long, default_value_t = 300)]
    target_errors: u64,
    /// Master seed (falls back to the VOFDM_SEED env var, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count (default: machine parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Also write two-column `snr_db ser` plot data here.
    #[arg(long, value_name = "PATH")]
    plot_out: Option<String>,
    /// Inject zero noise while the equalizer keeps the grid SNR.
    #[arg(long, default_value_t = false)]
    noiseless: bool,
    /// Fit window (points) for the diversity-slope summary.
    #[arg(long, default_value_t = 3)]
    slope_window: usize,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Master seed for the randomized cases.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of randomized keystone systems.
    #[arg(long, default_value_t = 100)]
    cases: usize,
}

#[derive(Args, Debug)]
struct ChannelDemoArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Channel file: one line per antenna, `re,im` taps space-separated.
    #[arg(long, value_name = "PATH")]
    cir: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Verify(args) => cmd_verify(args),
        Command::ChannelDemo(args) => cmd_channel_demo(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    /// Bad arguments, unreadable config, invalid parameters: exit 2.
    Usage(String),
    /// Failure while simulating or writing results: exit 1.
    Run(String),
}

/// Merge config file and flags into a raw system config plus mode/detector.
fn resolve_config(args: &ConfigArgs) -> Result<(SystemConfig, Mode, Detector), CliError> {
    let file = match &args.config {
        Some(path) => {
            config_file::load_config(path).map_err(|e| CliError::Usage(e.to_string()))?
        }
        None => config_file::FileConfig::default(),
    };
    let require = |flag: Option<usize>, key: Option<usize>, name: &str| {
        flag.or(key)
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `{name}`")))
    };
    let n = require(args.n, file.n, "n")?;
    let k = require(args.k, file.k, "k")?;
    let nt = require(args.nt, file.nt, "nt")?;
    let l = require(args.l, file.l, "l")?;
    let rate_bits = args
        .rate_bits
        .or(file.rate_bits)
        .ok_or_else(|| CliError::Usage("missing required parameter `rate_bits`".into()))?;

    let mut cfg = SystemConfig::new(n, k, nt, l, rate_bits);
    if let Some(gamma) = args.gamma.or(file.gamma) {
        cfg = cfg.with_gamma(gamma);
    }
    if let Some(list) = &args.delta_bar {
        let shifts = list
            .split(',')
            .map(|part| part.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("bad --delta-bar list `{list}`")))?;
        cfg = cfg.with_shifts(shifts);
    } else if let Some(shifts) = file.delta_bar {
        cfg = cfg.with_shifts(shifts);
    }

    let mode = match &args.mode {
        Some(name) => {
            Mode::parse(name).ok_or_else(|| CliError::Usage(format!("unknown mode `{name}`")))?
        }
        None => file.mode.unwrap_or(Mode::CddVofdm),
    };
    let detector = match &args.detector {
        Some(name) => Detector::parse(name)
            .ok_or_else(|| CliError::Usage(format!("unknown detector `{name}`")))?,
        None => file.detector.unwrap_or(Detector::Mmse),
    };
    Ok((cfg, mode, detector))
}

fn validate_for_cli(cfg: &SystemConfig) -> Result<ValidatedConfig, CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("VOFDM_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::Usage(format!("bad VOFDM_SEED value `{text}`"))),
        Err(_) => Ok(0),
    }
}

fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(CliError::Usage(
            "need snr-start <= snr-stop and snr-step > 0".into(),
        ));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let snr = start + step * i as f64;
        if snr > stop + 1e-9 {
            break;
        }
        grid.push(snr);
        i += 1;
    }
    Ok(grid)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, CliError> {
    let (cfg, mode, detector) = resolve_config(&args.config)?;
    let spec = SweepSpec {
        cfg,
        snr_grid_db: snr_grid(args.snr_start, args.snr_stop, args.snr_step)?,
        max_trials: args.max_trials,
        target_errors: args.target_errors,
        master_seed: resolve_seed(args.seed)?,
        mode,
        detector,
        noiseless: args.noiseless,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }

    let out_name = args.out.clone().unwrap_or_else(|| "<stdout>".to_string());
    let manifest = RunManifest::new(&spec, &out_name);
    eprintln!("{manifest}");

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot create {path}: {e}")))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut csv = CsvSink::new(sink);
    let curve = run_sweep_with(&spec, workers, |point| {
        csv.write_point(&spec, point).map_err(SimError::Io)
    })
    .map_err(|e| CliError::Run(e.to_string()))?;

    if let Some(path) = &args.plot_out {
        std::fs::write(path, curve_to_plot(&curve.points))
            .map_err(|e| CliError::Run(format!("cannot write {path}: {e}")))?;
    }

    // Predicted-vs-measured summary on stderr so the CSV stays clean.
    let vcfg = validate_for_cli(&spec.cfg)?;
    let predicted = predict_diversity(&vcfg);
    match estimate_diversity(&curve.points, args.slope_window, spec.qualify_errors()) {
        Ok(fitted) => eprintln!(
            "# diversity: predicted={predicted} fitted={fitted:.2} (window {})",
            args.slope_window
        ),
        Err(_) => eprintln!("# diversity: predicted={predicted} fitted=n/a (too few qualifying points)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_predict(args: PredictArgs) -> Result<ExitCode, CliError> {
    let (cfg, _, _) = resolve_config(&args.config)?;
    // The prediction presumes full diversity, so also enforce the antenna
    // capacity floor(N*K/L) here.
    let vcfg = cfg
        .validate_full_diversity()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if !vcfg.full_diversity_shifts() {
        eprintln!(
            "warning: delta_bar does not satisfy the full-diversity progression; \
             the prediction assumes it"
        );
    }
    println!("diversity={}", predict_diversity(&vcfg));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let (outcomes, all_passed) = verify::run_all(args.seed, args.cases);
    for outcome in &outcomes {
        println!("{}", outcome.line());
    }
    if all_passed {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("some checks FAILED");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_channel_demo(args: ChannelDemoArgs) -> Result<ExitCode, CliError> {
    let (mut cfg, _, _) = resolve_config(&args.config)?;
    let ch = channel_io::load_channel(&args.cir).map_err(|e| CliError::Usage(e.to_string()))?;
    if ch.nt() != cfg.nt {
        return Err(CliError::Usage(format!(
            "channel file has {} antennas but config says nt = {}",
            ch.nt(),
            cfg.nt
        )));
    }
    if ch.taps() != cfg.l {
        return Err(CliError::Usage(format!(
            "channel file has {} taps per antenna but config says l = {}",
            ch.taps(),
            cfg.l
        )));
    }
    cfg.rho = 1.0;
    let vcfg = validate_for_cli(&cfg)?;
    let eq = build_equivalent_channel(&ch, &vcfg);

    println!(
        "equivalent channel: N*K = {} taps, delays delta = {:?}",
        vcfg.nk(),
        vcfg.delta()
    );
    for (t, tap) in eq.taps().iter().enumerate() {
        if tap.norm_sqr() > 0.0 {
            println!("  h_eqv[{t:3}] = {:+.6} {:+.6}j", tap.re, tap.im);
        }
    }
    for s in 0..vcfg.k() {
        let taps: Vec<String> = eq
            .polyphase(s)
            .iter()
            .map(|tap| format!("{:+.3}{:+.3}j", tap.re, tap.im))
            .collect();
        println!("polyphase {s}: [{}]", taps.join(", "));
    }
    let report = check_overlap(&vcfg);
    if report.full_diversity {
        println!("supports: pairwise disjoint (full spatial+multipath diversity)");
    } else {
        println!("supports: overlapping pairs {:?}", report.overlapping_pairs);
    }
    println!(
        "predicted MMSE diversity order: {}",
        predict_diversity(&vcfg)
    );
    Ok(ExitCode::SUCCESS)
}
