//! Channel dump/load: one line per antenna, taps as `re,im` pairs
//! separated by spaces, 17 significant digits.

use std::io::Write;

use vofdm_core::channel::ChannelSet;
use vofdm_core::Complex64;

use crate::{SimError, SimResult};

pub fn write_channel(ch: &ChannelSet, mut w: impl Write) -> std::io::Result<()> {
    for cir in ch.cirs() {
        let mut first = true;
        for tap in cir {
            if !first {
                write!(w, " ")?;
            }
            write!(w, "{:.16e},{:.16e}", tap.re, tap.im)?;
            first = false;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn parse_channel(text: &str, path: &str) -> SimResult<ChannelSet> {
    let mut cirs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let taps = content
            .split_whitespace()
            .map(|pair| {
                let (re, im) = pair.split_once(',').ok_or_else(|| SimError::Parse {
                    path: path.into(),
                    line,
                    msg: format!("expected `re,im`, got `{pair}`"),
                })?;
                let parse = |s: &str| {
                    s.parse::<f64>().map_err(|_| SimError::Parse {
                        path: path.into(),
                        line,
                        msg: format!("bad float `{s}`"),
                    })
                };
                Ok(Complex64::new(parse(re)?, parse(im)?))
            })
            .collect::<SimResult<Vec<_>>>()?;
        cirs.push(taps);
    }
    ChannelSet::new(cirs).map_err(SimError::Core)
}

pub fn save_channel(ch: &ChannelSet, path: &str) -> SimResult<()> {
    let mut file = std::fs::File::create(path)?;
    write_channel(ch, &mut file)?;
    Ok(())
}

pub fn load_channel(path: &str) -> SimResult<ChannelSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Invalid(format!("cannot read channel file {path}: {e}")))?;
    parse_channel(&text, path)
}
