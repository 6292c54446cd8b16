//! Sweep results as CSV.
//!
//! Fixed schema; the header is written once and rows are flushed per SNR
//! point so partial runs stay usable. Identical specs and seeds produce
//! byte-identical files regardless of worker count.

use std::io::Write;

use vofdm_core::montecarlo::{SerPoint, SweepSpec};

pub const CSV_HEADER: &str = "snr_db,trials,errors,ser,stderr,mode,detector,n,k,nt,l,rate_bits,seed";

pub fn format_row(spec: &SweepSpec, point: &SerPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        point.snr_db,
        point.trials,
        point.errors,
        point.ser,
        point.stderr,
        spec.mode.as_str(),
        spec.detector.as_str(),
        spec.cfg.n,
        spec.cfg.k,
        spec.cfg.nt,
        spec.cfg.l,
        spec.cfg.rate_bits,
        spec.master_seed
    )
}

/// Incremental CSV writer; flushes after every row.
pub struct CsvSink<W: Write> {
    w: W,
    header_written: bool,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Self {
        CsvSink {
            w,
            header_written: false,
        }
    }

    pub fn write_point(&mut self, spec: &SweepSpec, point: &SerPoint) -> std::io::Result<()> {
        if !self.header_written {
            writeln!(self.w, "{CSV_HEADER}")?;
            self.header_written = true;
        }
        writeln!(self.w, "{}", format_row(spec, point))?;
        self.w.flush()
    }

    pub fn into_inner(self) -> W {
        self.w
    }
}

/// Whole curve as one CSV string.
pub fn curve_to_csv(spec: &SweepSpec, points: &[SerPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for point in points {
        out.push_str(&format_row(spec, point));
        out.push('\n');
    }
    out
}

/// Two-column `snr_db ser` plot data, gnuplot-friendly.
pub fn curve_to_plot(points: &[SerPoint]) -> String {
    let mut out = String::new();
    for point in points {
        out.push_str(&format!("{} {}\n", point.snr_db, point.ser));
    }
    out
}
