//! Plain-text config files: one `key = value` per line.
//!
//! Recognized keys: `n, k, nt, l, gamma, delta_bar, rate_bits, mode,
//! detector`. `delta_bar` is a comma list. Blank lines and `#` comments are
//! allowed; unknown or repeated keys are errors. Every key is optional
//! here - the CLI layer decides what must be present and lets flags
//! override file values.

use vofdm_core::montecarlo::{Detector, Mode};

use crate::{SimError, SimResult};

/// Parsed key/value config; `None` means the key was absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub nt: Option<usize>,
    pub l: Option<usize>,
    pub gamma: Option<usize>,
    pub delta_bar: Option<Vec<usize>>,
    pub rate_bits: Option<u32>,
    pub mode: Option<Mode>,
    pub detector: Option<Detector>,
}

pub fn parse_config(text: &str, path: &str) -> SimResult<FileConfig> {
    let mut out = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| SimError::Parse {
            path: path.into(),
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let err = |msg: String| SimError::Parse {
            path: path.into(),
            line,
            msg,
        };
        let dup = |name: &str| err(format!("duplicate key `{name}`"));

        match key {
            "n" => set_usize(&mut out.n, value, "n").map_err(err)?,
            "k" => set_usize(&mut out.k, value, "k").map_err(err)?,
            "nt" => set_usize(&mut out.nt, value, "nt").map_err(err)?,
            "l" => set_usize(&mut out.l, value, "l").map_err(err)?,
            "gamma" => set_usize(&mut out.gamma, value, "gamma").map_err(err)?,
            "rate_bits" => {
                if out.rate_bits.is_some() {
                    return Err(dup("rate_bits"));
                }
                out.rate_bits = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("bad rate_bits value `{value}`")))?,
                );
            }
            "delta_bar" => {
                if out.delta_bar.is_some() {
                    return Err(dup("delta_bar"));
                }
                let shifts = value
                    .split(',')
                    .map(|part| part.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| err(format!("bad delta_bar list `{value}`")))?;
                out.delta_bar = Some(shifts);
            }
            "mode" => {
                if out.mode.is_some() {
                    return Err(dup("mode"));
                }
                out.mode =
                    Some(Mode::parse(value).ok_or_else(|| err(format!("unknown mode `{value}`")))?);
            }
            "detector" => {
                if out.detector.is_some() {
                    return Err(dup("detector"));
                }
                out.detector = Some(
                    Detector::parse(value)
                        .ok_or_else(|| err(format!("unknown detector `{value}`")))?,
                );
            }
            unknown => {
                return Err(err(format!("unknown key `{unknown}`")));
            }
        }
    }
    Ok(out)
}

fn set_usize(slot: &mut Option<usize>, value: &str, name: &str) -> Result<(), String> {
    if slot.is_some() {
        return Err(format!("duplicate key `{name}`"));
    }
    *slot = Some(
        value
            .parse()
            .map_err(|_| format!("bad {name} value `{value}`"))?,
    );
    Ok(())
}

pub fn load_config(path: &str) -> SimResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Invalid(format!("cannot read config {path}: {e}")))?;
    parse_config(&text, path)
}
