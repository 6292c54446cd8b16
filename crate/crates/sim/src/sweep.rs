//! Worker-parallel sweep execution.
//!
//! Trials inside each early-stop batch are split into contiguous chunks
//! across workers; counts are summed, so totals equal the sequential run
//! bit-for-bit whatever the worker count.

use std::ops::Range;

use vofdm_core::montecarlo::{
    point_seed, run_point_with, PointContext, SerCurve, SerPoint, SweepSpec, TrialCounts,
};

use crate::SimResult;

/// Run one trial range with up to `workers` threads.
fn run_range_parallel(
    ctx: &PointContext,
    range: Range<u64>,
    workers: usize,
) -> vofdm_core::Result<TrialCounts> {
    let len = range.end - range.start;
    if workers <= 1 || len < 2 {
        return ctx.run_range(range);
    }
    let workers = workers.min(len as usize);
    let chunk = len.div_ceil(workers as u64);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let start = range.start + chunk * w as u64;
                let end = (start + chunk).min(range.end);
                scope.spawn(move || ctx.run_range(start..end))
            })
            .collect();
        let mut counts = TrialCounts::default();
        for handle in handles {
            counts += handle.join().expect("worker thread panicked")?;
        }
        Ok(counts)
    })
}

/// Run one SNR point with the given worker count.
pub fn run_point_parallel(
    spec: &SweepSpec,
    snr_db: f64,
    seed: u64,
    workers: usize,
) -> SimResult<TrialCounts> {
    let ctx = PointContext::new(spec, snr_db, seed)?;
    Ok(run_point_with(spec.max_trials, spec.target_errors, |range| {
        run_range_parallel(&ctx, range, workers)
    })?)
}

/// Run the whole sweep, invoking `on_point` as each SNR point completes
/// (CSV flushing, progress lines).
pub fn run_sweep_with<F>(spec: &SweepSpec, workers: usize, mut on_point: F) -> SimResult<SerCurve>
where
    F: FnMut(&SerPoint) -> SimResult<()>,
{
    spec.validate()?;
    let symbols = spec.cfg.n * spec.cfg.k;
    let mut points = Vec::with_capacity(spec.snr_grid_db.len());
    for (i, &snr_db) in spec.snr_grid_db.iter().enumerate() {
        let counts = run_point_parallel(spec, snr_db, point_seed(spec.master_seed, i), workers)?;
        let point = SerPoint::new(snr_db, counts, symbols);
        on_point(&point)?;
        points.push(point);
    }
    Ok(SerCurve { points })
}

/// Run the whole sweep and collect the curve.
pub fn run_sweep_parallel(spec: &SweepSpec, workers: usize) -> SimResult<SerCurve> {
    run_sweep_with(spec, workers, |_| Ok(()))
}
