//! Runtime verification suites behind `vofdm verify`.
//!
//! Two suites: the model-equivalence keystone (time-domain chain versus the
//! equivalent-channel convolution and the per-subcarrier matrix model) and
//! the cyclic-shift equivalence suite (vector-level versus symbol-level
//! shifts, including the non-divisible counterexamples). All checks are
//! seeded and print deterministically.

use vofdm_core::channel::{
    apply_mimo_channel, build_equivalent_channel, generate_rayleigh_channels,
};
use vofdm_core::config::{SystemConfig, ValidatedConfig};
use vofdm_core::constellation::Constellation;
use vofdm_core::modem::{
    block_into_vectors, component_dft, component_idft, cyclic_shift_vectors,
    remove_cyclic_prefix, transmit_frames,
};
use vofdm_core::receiver::subcarrier_matrices;
use vofdm_core::seed;
use vofdm_core::Complex64;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {} - {}", self.name, self.detail)
    }
}

fn cyclic_convolve(h: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (lag, &tap) in h.iter().enumerate() {
                acc += tap * x[(t + n - lag) % n];
            }
            acc
        })
        .collect()
}

fn rel_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    let num: f64 = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = want.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

/// Deterministic case sampler spanning K in {1,2,4,8}, N_t in {1,2,4},
/// N in {8,16,32}, L <= Gamma*K, arbitrary shifts.
fn sample_config(case: usize, rng: &mut ChaCha8Rng) -> ValidatedConfig {
    let k = [1usize, 2, 4, 8][case % 4];
    let nt = [1usize, 2, 4][(case / 4) % 3];
    let n = [8usize, 16, 32][(case / 12) % 3];
    let rate = [1u32, 2, 4][case % 3];
    let max_l = (2 * k).min(n - 2);
    let l = rng.random_range(1..=max_l.max(1));
    let mut shifts = vec![0usize];
    for _ in 1..nt {
        shifts.push(rng.random_range(0..n));
    }
    SystemConfig::new(n, k, nt, l, rate)
        .with_shifts(shifts)
        .validate()
        .expect("sampled config must validate")
}

/// Keystone model equivalence over `cases` random systems at zero noise.
pub fn keystone_suite(master_seed: u64, cases: usize, tolerance: f64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let mut worst_time = 0.0f64;
    let mut worst_model = 0.0f64;
    for case in 0..cases {
        let cfg = sample_config(case, &mut rng);
        let cons = Constellation::new(cfg.rate_bits()).unwrap();
        let payload: Vec<Complex64> = (0..cfg.nk())
            .map(|_| cons.points()[rng.random_range(0..cons.len())])
            .collect();
        let ch = generate_rayleigh_channels(&cfg, seed::derive(master_seed, case as u64));

        let frames = transmit_frames(&payload, &cfg).unwrap();
        let rx = apply_mimo_channel(&frames, &ch, 0.0, 0).unwrap();
        let stripped = remove_cyclic_prefix(&rx, &cfg).unwrap();

        // Route A: cyclic convolution with the equivalent channel.
        let unshifted = component_idft(&block_into_vectors(&payload, cfg.k()).unwrap());
        let eq = build_equivalent_channel(&ch, &cfg);
        let scale = cfg.antenna_scale();
        let conv: Vec<Complex64> = cyclic_convolve(eq.taps(), unshifted.as_flat())
            .into_iter()
            .map(|s| s * scale)
            .collect();
        worst_time = worst_time.max(rel_error(stripped.as_flat(), &conv));

        // Route B: per-subcarrier matrix model after the component DFT.
        let freq = component_dft(&stripped);
        let chans = subcarrier_matrices(&eq, &cfg);
        let x = block_into_vectors(&payload, cfg.k()).unwrap();
        let mut model = Vec::with_capacity(cfg.nk());
        for (q, chan) in chans.iter().enumerate() {
            model.extend(chan.matrix.matvec(x.vector(q)));
        }
        worst_model = worst_model.max(rel_error(freq.as_flat(), &model));
    }
    vec![
        CheckOutcome {
            name: "time-domain equivalence",
            passed: worst_time <= tolerance,
            detail: format!(
                "{cases} systems, worst relative error {worst_time:.3e} (tolerance {tolerance:.0e})"
            ),
        },
        CheckOutcome {
            name: "subcarrier model equivalence",
            passed: worst_model <= tolerance,
            detail: format!(
                "{cases} systems, worst relative error {worst_model:.3e} (tolerance {tolerance:.0e})"
            ),
        },
    ]
}

/// Vector-level versus symbol-level cyclic shift equivalence.
pub fn shift_equivalence_suite(master_seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ 0x5348_4946);
    let mut out = Vec::new();

    // Equality for shifts that are whole vectors, N=8, K in {2,4}.
    let n = 8usize;
    let mut equal_checks = 0usize;
    let mut equal_ok = true;
    for k in [2usize, 4] {
        for _ in 0..1000 {
            let seq: Vec<Complex64> = (0..n * k)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            for delta_bar in 0..n {
                let vb = block_into_vectors(&seq, k).unwrap();
                let via_vec = cyclic_shift_vectors(&vb, delta_bar).unwrap().into_flat();
                let nk = n * k;
                let shift = k * delta_bar;
                let via_sym: Vec<Complex64> =
                    (0..nk).map(|t| seq[(t + nk - shift) % nk]).collect();
                equal_ok &= via_vec == via_sym;
                equal_checks += 1;
            }
        }
    }
    out.push(CheckOutcome {
        name: "vector shift = symbol shift by K*delta",
        passed: equal_ok,
        detail: format!("{equal_checks} exact comparisons at N=8, K in {{2,4}}"),
    });

    // Counterexamples for symbol shifts not divisible by K (N=4, K=2).
    let (cn, ck) = (4usize, 2usize);
    let nk = cn * ck;
    let witness: Vec<Complex64> = (0..nk).map(|t| Complex64::new(t as f64, 0.0)).collect();
    let mut counter_ok = true;
    for sym_shift in (0..nk).filter(|s| s % ck != 0) {
        let target: Vec<Complex64> = (0..nk).map(|t| witness[(t + nk - sym_shift) % nk]).collect();
        let vb = block_into_vectors(&witness, ck).unwrap();
        for delta_bar in 0..cn {
            let candidate = cyclic_shift_vectors(&vb, delta_bar).unwrap().into_flat();
            counter_ok &= candidate != target;
        }
    }
    out.push(CheckOutcome {
        name: "non-divisible symbol shifts have no vector equivalent",
        passed: counter_ok,
        detail: "exhaustive at N=4, K=2".to_string(),
    });

    out
}

/// Run every suite; returns the outcomes and whether all passed.
pub fn run_all(master_seed: u64, cases: usize) -> (Vec<CheckOutcome>, bool) {
    let mut outcomes = keystone_suite(master_seed, cases, 1e-10);
    outcomes.extend(shift_equivalence_suite(master_seed));
    let all_passed = outcomes.iter().all(|o| o.passed);
    (outcomes, all_passed)
}
