//! Discrete-time cascade simulator with ground-truth labels.
//!
//! At step `t` every non-activated node draws two independent Bernoulli
//! trials: one with the peer hazard built from neighbors activated at earlier
//! steps, one with the external hazard built from the spikes fired so far.
//! A single success activates the node with that label; a double success is
//! attributed by a fair coin and flagged.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cascade::{Cascade, Horizon};
use crate::error::{Error, Result};
use crate::estimator::{hazard, PeerParams};
use crate::graph::{Network, NodeId};

/// External event of strength `q0` at step `t_fire`, decaying at rate `lambda_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalSpike {
    pub q0: f64,
    pub lambda_e: f64,
    pub t_fire: u32,
}

impl ExternalSpike {
    pub fn new(q0: f64, lambda_e: f64, t_fire: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&q0) {
            return Err(Error::invalid(format!("q0 must lie in [0, 1] (got {q0})")));
        }
        if !(lambda_e >= 0.0) || !lambda_e.is_finite() {
            return Err(Error::invalid(format!("lambda_e must be finite and >= 0 (got {lambda_e})")));
        }
        Ok(ExternalSpike { q0, lambda_e, t_fire })
    }

    /// Activation probability contributed at `step` (zero before firing).
    pub fn strength_at(&self, step: u32) -> f64 {
        if step < self.t_fire {
            0.0
        } else {
            self.q0 * (-self.lambda_e * f64::from(step - self.t_fire)).exp()
        }
    }
}

/// Combined external hazard at `step`: spikes act as independent causes.
pub fn external_hazard(spikes: &[ExternalSpike], step: u32) -> f64 {
    1.0 - spikes.iter().map(|s| 1.0 - s.strength_at(step)).product::<f64>()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedNode {
    #[default]
    Random,
    Fixed(NodeId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub peer: PeerParams,
    pub spikes: Vec<ExternalSpike>,
    pub steps: u32,
    pub seed_node: SeedNode,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    /// Peer `p0 = 0.03`, `lambda_p = 0.02`; spikes `q0 = 0.2`, `lambda_e = 0.3` at steps 5 and 15.
    fn default() -> Self {
        SimConfig {
            peer: PeerParams { p0: 0.03, lambda: 0.02 },
            spikes: vec![
                ExternalSpike { q0: 0.2, lambda_e: 0.3, t_fire: 5 },
                ExternalSpike { q0: 0.2, lambda_e: 0.3, t_fire: 15 },
            ],
            steps: 40,
            seed_node: SeedNode::Random,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Peer,
    External,
    Seed,
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroundTruth::Peer => "peer",
            GroundTruth::External => "external",
            GroundTruth::Seed => "seed",
        })
    }
}

impl std::str::FromStr for GroundTruth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peer" => Ok(GroundTruth::Peer),
            "external" => Ok(GroundTruth::External),
            "seed" => Ok(GroundTruth::Seed),
            other => Err(Error::invalid(format!("unknown ground-truth label `{other}`"))),
        }
    }
}

/// Simulated cascade (times are step indices, horizon `[0, steps]`) with the cause of every activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledCascade {
    pub cascade: Cascade,
    pub labels: Vec<Option<GroundTruth>>,
    pub both_fired: Vec<bool>,
}

impl LabeledCascade {
    pub fn seed(&self) -> NodeId {
        self.labels
            .iter()
            .position(|l| *l == Some(GroundTruth::Seed))
            .expect("simulated cascades have a seed")
    }

    pub fn count(&self, label: GroundTruth) -> usize {
        self.labels.iter().filter(|l| **l == Some(label)).count()
    }
}

pub fn simulate(net: &Network, cfg: &SimConfig) -> Result<LabeledCascade> {
    let n = net.node_count();
    if n == 0 {
        return Err(Error::EmptyInput("network has no nodes"));
    }
    if cfg.steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let seed = match cfg.seed_node {
        SeedNode::Random => rng.gen_range(0..n),
        SeedNode::Fixed(i) if i < n => i,
        SeedNode::Fixed(i) => return Err(Error::invalid(format!("seed node {i} not in network"))),
    };

    let mut times: Vec<Option<f64>> = vec![None; n];
    let mut labels: Vec<Option<GroundTruth>> = vec![None; n];
    let mut both_fired = vec![false; n];
    times[seed] = Some(0.0);
    labels[seed] = Some(GroundTruth::Seed);

    let mut fresh: Vec<(NodeId, GroundTruth, bool)> = Vec::new();
    for step in 1..=cfg.steps {
        let t = f64::from(step);
        let h_ext = external_hazard(&cfg.spikes, step);
        for i in 0..n {
            if times[i].is_some() {
                continue;
            }
            // `times` only holds earlier steps here, so same-step activations cannot spread
            let h_peer = hazard(net.neighbors(i), &times, cfg.peer, t);
            let by_peer = rng.gen::<f64>() < h_peer;
            let by_ext = rng.gen::<f64>() < h_ext;
            match (by_peer, by_ext) {
                (false, false) => {}
                (true, false) => fresh.push((i, GroundTruth::Peer, false)),
                (false, true) => fresh.push((i, GroundTruth::External, false)),
                (true, true) => {
                    let label = if rng.gen::<bool>() {
                        GroundTruth::Peer
                    } else {
                        GroundTruth::External
                    };
                    fresh.push((i, label, true));
                }
            }
        }
        for (i, label, both) in fresh.drain(..) {
            times[i] = Some(t);
            labels[i] = Some(label);
            both_fired[i] = both;
        }
    }

    let horizon = Horizon::new(0.0, f64::from(cfg.steps))?;
    let activations = times.iter().enumerate().filter_map(|(i, t)| t.map(|t| (i, t)));
    Ok(LabeledCascade {
        cascade: Cascade::new(n, activations, Some(horizon))?,
        labels,
        both_fired,
    })
}
