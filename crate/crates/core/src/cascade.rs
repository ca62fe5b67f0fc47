//! Activation cascades: one optional activation time per node on a single
//! scalar timeline (epoch seconds for data, step indices for simulations).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Observation interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub start: f64,
    pub end: f64,
}

impl Horizon {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() || end < start {
            return Err(Error::invalid(format!("bad horizon [{start}, {end}]")));
        }
        Ok(Horizon { start, end })
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    times: Vec<Option<f64>>,
    horizon: Horizon,
}

impl Cascade {
    /// Builds a cascade over `node_count` nodes. With no explicit horizon it
    /// spans the earliest to the latest activation (`[0, 0]` when empty).
    pub fn new(
        node_count: usize,
        activations: impl IntoIterator<Item = (NodeId, f64)>,
        horizon: Option<Horizon>,
    ) -> Result<Self> {
        let mut times = vec![None; node_count];
        for (node, t) in activations {
            if node >= node_count {
                return Err(Error::invalid(format!("activation for node {node} outside network")));
            }
            if !t.is_finite() {
                return Err(Error::invalid(format!("non-finite activation time for node {node}")));
            }
            if times[node].replace(t).is_some() {
                return Err(Error::invalid(format!("node {node} activated more than once")));
            }
        }
        let horizon = match horizon {
            Some(h) => h,
            None => {
                let mut it = times.iter().flatten().copied();
                match it.next() {
                    None => Horizon { start: 0.0, end: 0.0 },
                    Some(first) => {
                        let (lo, hi) = it.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t)));
                        Horizon { start: lo, end: hi }
                    }
                }
            }
        };
        if let Some((node, t)) = times
            .iter()
            .enumerate()
            .find_map(|(i, t)| t.filter(|&t| !horizon.contains(t)).map(|t| (i, t)))
        {
            return Err(Error::invalid(format!(
                "activation of node {node} at {t} outside horizon [{}, {}]",
                horizon.start, horizon.end
            )));
        }
        Ok(Cascade { times, horizon })
    }

    pub fn node_count(&self) -> usize {
        self.times.len()
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn activation_time(&self, node: NodeId) -> Option<f64> {
        self.times[node]
    }

    pub fn times(&self) -> &[Option<f64>] {
        &self.times
    }

    pub fn activated_count(&self) -> usize {
        self.times.iter().flatten().count()
    }

    /// `(node, time)` pairs sorted by time, then node id.
    pub fn activations(&self) -> Vec<(NodeId, f64)> {
        let mut out: Vec<(NodeId, f64)> = self
            .times
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Keeps only activations inside `horizon`; the rest become never-activated.
    pub fn restricted(&self, horizon: Horizon) -> Cascade {
        let times = self
            .times
            .iter()
            .map(|t| t.filter(|&t| horizon.contains(t)))
            .collect();
        Cascade { times, horizon }
    }

    /// Same cascade over a network whose nodes were renamed by `perm`.
    pub fn permuted(&self, perm: &[NodeId]) -> Cascade {
        let mut times = vec![None; self.times.len()];
        for (old, &new) in perm.iter().enumerate() {
            times[new] = self.times[old];
        }
        Cascade {
            times,
            horizon: self.horizon,
        }
    }
}

/// Time window `[t - delta, t]`. Series windows after the first are opened at
/// the lower end so that tumbling windows partition the timeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t: f64,
    pub delta: f64,
    pub closed_start: bool,
}

impl Window {
    /// Closed window `[t - delta, t]`.
    pub fn new(t: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() || !t.is_finite() {
            return Err(Error::invalid(format!("window needs finite t and delta > 0 (got t={t}, delta={delta})")));
        }
        Ok(Window {
            t,
            delta,
            closed_start: true,
        })
    }

    /// Window `(t - delta, t]`.
    pub fn half_open(t: f64, delta: f64) -> Result<Self> {
        Window::new(t, delta).map(|w| Window {
            closed_start: false,
            ..w
        })
    }

    pub fn start(&self) -> f64 {
        self.t - self.delta
    }

    pub fn contains(&self, time: f64) -> bool {
        let lower = if self.closed_start {
            time >= self.start()
        } else {
            time > self.start()
        };
        lower && time <= self.t
    }
}

/// Nodes whose activation time falls inside the window, ascending.
pub fn newly_activated(cascade: &Cascade, window: &Window) -> Vec<NodeId> {
    cascade
        .times
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_some_and(|t| window.contains(t)))
        .map(|(i, _)| i)
        .collect()
}

/// Nodes with activation time in `(t, +inf)`, never-activated nodes included.
pub fn non_activated(cascade: &Cascade, t: f64) -> Vec<NodeId> {
    cascade
        .times
        .iter()
        .enumerate()
        .filter(|(_, ti)| is_non_activated(**ti, t))
        .map(|(i, _)| i)
        .collect()
}

#[inline]
pub(crate) fn is_non_activated(activation: Option<f64>, t: f64) -> bool {
    activation.map_or(true, |ti| ti > t)
}

/// Activation counts per bin `[start + k*bin, start + (k+1)*bin)` covering the
/// horizon, optionally restricted to `subset`.
pub fn activity_histogram(
    cascade: &Cascade,
    bin: f64,
    subset: Option<&HashSet<NodeId>>,
) -> Result<Vec<(f64, usize)>> {
    if !(bin > 0.0) || !bin.is_finite() {
        return Err(Error::invalid(format!("histogram bin must be > 0 (got {bin})")));
    }
    let Horizon { start, end } = cascade.horizon;
    let bins = ((end - start) / bin).floor() as usize + 1;
    let mut counts = vec![0usize; bins];
    for (node, t) in cascade.times.iter().enumerate() {
        let Some(t) = t else { continue };
        if subset.is_some_and(|s| !s.contains(&node)) {
            continue;
        }
        let k = (((t - start) / bin).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (start + k as f64 * bin, c))
        .collect())
}
