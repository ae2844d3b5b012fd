//! Parsers for the compact command-line value syntaxes.

use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use nqkd::keyrate::PartyCount;
use nqkd::noise::{NoiseConfig, Topology};

/// Party counts: `3`, `2..8`, `inf`, or comma-separated combinations.
pub fn party_list(s: &str) -> Result<Vec<PartyCount>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let lo: usize = a.trim().parse().with_context(|| format!("bad range start in `{part}`"))?;
            let hi: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .with_context(|| format!("bad range end in `{part}`"))?;
            if lo > hi {
                bail!("empty range `{part}`");
            }
            for n in lo..=hi {
                out.push(PartyCount::from_str(&n.to_string())?);
            }
        } else {
            out.push(PartyCount::from_str(part)?);
        }
    }
    if out.is_empty() {
        bail!("no party counts given");
    }
    Ok(out)
}

pub fn finite_parties(list: &[PartyCount], min: usize) -> Result<Vec<usize>> {
    list.iter()
        .map(|p| match *p {
            PartyCount::Finite(n) if n >= min => Ok(n),
            PartyCount::Finite(n) => Err(anyhow!("N = {n} is below the minimum of {min} here")),
            PartyCount::Infinite => Err(anyhow!("N = inf is only supported for QBER quantities")),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    Q,
    FG,
    FC,
    N,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = anyhow::Error;

    /// `var:start:stop:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, steps] = parts[..] else {
            bail!("sweep must look like var:start:stop:steps, got `{s}`");
        };
        let var = match var.to_ascii_lowercase().replace('_', "").as_str() {
            "q" => SweepVar::Q,
            "fg" => SweepVar::FG,
            "fc" => SweepVar::FC,
            "n" => SweepVar::N,
            other => bail!("unknown sweep variable `{other}` (expected Q, fG, fC or N)"),
        };
        let start: f64 = start.parse().with_context(|| format!("bad sweep start `{start}`"))?;
        let stop: f64 = stop.parse().with_context(|| format!("bad sweep stop `{stop}`"))?;
        let steps: usize = steps.parse().with_context(|| format!("bad step count `{steps}`"))?;
        if steps < 2 {
            bail!("a sweep needs at least 2 steps");
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            bail!("empty sweep range [{start}, {stop}]");
        }
        if var == SweepVar::N && (start.fract() != 0.0 || stop.fract() != 0.0 || start < 2.0) {
            bail!("an N sweep needs integer bounds of at least 2");
        }
        Ok(Self {
            var,
            start,
            stop,
            steps,
        })
    }
}

/// `gate:0.05` or `channel:0.02`.
pub fn noise(s: &str, topology: Topology) -> Result<NoiseConfig> {
    let (model, value) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("noise must look like gate:VALUE or channel:VALUE, got `{s}`"))?;
    let v: f64 = value.parse().with_context(|| format!("bad noise value `{value}`"))?;
    let cfg = match model.to_ascii_lowercase().as_str() {
        "gate" => NoiseConfig::Gate { f_g: v, topology },
        "channel" => NoiseConfig::Channel { f_c: v, topology },
        other => bail!("unknown noise model `{other}`"),
    };
    cfg.validate()?;
    Ok(cfg)
}
