use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Values read from a flat `key = value` simulation config. Blank lines and
/// lines starting with `#` are ignored.
#[derive(Debug, Default)]
pub struct FileConfig {
    pub p0: Option<f64>,
    pub lambda_p: Option<f64>,
    pub q0: Option<f64>,
    pub lambda_e: Option<f64>,
    pub spike_at: Option<Vec<u32>>,
    /// Explicit `spike = q0,lambda_e,t_fire` lines.
    pub spikes: Vec<(f64, f64, u32)>,
    pub steps: Option<u32>,
    pub seed_node: Option<String>,
    pub seed: Option<u64>,
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| anyhow::anyhow!("line {line}: bad value `{v}` for `{key}`"))
}

pub fn parse_steps(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().with_context(|| format!("bad step `{x}`")))
        .collect()
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = FileConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let Some((key, value)) = s.split_once('=') else {
                bail!("line {line}: expected key=value");
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "p0" => cfg.p0 = Some(num(line, key, value)?),
                "lambda_p" => cfg.lambda_p = Some(num(line, key, value)?),
                "q0" => cfg.q0 = Some(num(line, key, value)?),
                "lambda_e" => cfg.lambda_e = Some(num(line, key, value)?),
                "spike_at" => cfg.spike_at = Some(parse_steps(value).with_context(|| format!("line {line}"))?),
                "spike" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        bail!("line {line}: spike needs q0,lambda_e,t_fire");
                    }
                    cfg.spikes.push((
                        num(line, key, parts[0])?,
                        num(line, key, parts[1])?,
                        num(line, key, parts[2])?,
                    ));
                }
                "steps" => cfg.steps = Some(num(line, key, value)?),
                "seed_node" => cfg.seed_node = Some(value.to_owned()),
                "seed" | "rng_seed" => cfg.seed = Some(num(line, key, value)?),
                other => bail!("line {line}: unknown key `{other}`"),
            }
        }
        Ok(cfg)
    }
}
