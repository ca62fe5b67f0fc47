//! Peer vs. external decomposition of an activation cascade.
//!
//! Every activated neighbor `k` of node `i` transfers influence
//! `p0 * exp(-lambda * (t - t_k))`, independently, so the probability that
//! `i` has been activated by its peers by time `t` is
//!
//! ```text
//! p_i(t) = 1 - prod_{k in N(i), t_k < t} (1 - p0 * exp(-lambda * (t - t_k)))
//! ```
//!
//! The threshold `mu(t)` is the mean of `p_i(t)` over nodes still
//! non-activated at `t` (activation time in `(t, +inf)`). A node that
//! activated inside a window is attributed to peers when `p_i(t) - mu(t) >= 0`
//! and to external influence otherwise, with one override: when both are
//! exactly zero the activation has no peer explanation and is external.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{is_non_activated, newly_activated, Cascade, Horizon, Window};
use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};

/// Two hours, in seconds.
pub const DEFAULT_DELTA: f64 = 7200.0;

/// Exponential peer-influence kernel `p0 * exp(-lambda * dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeerParams {
    pub p0: f64,
    pub lambda: f64,
}

impl PeerParams {
    pub fn new(p0: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::invalid(format!("p0 must lie in [0, 1] (got {p0})")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be finite and >= 0 (got {lambda})")));
        }
        Ok(PeerParams { p0, lambda })
    }

    /// Influence of a neighbor that activated `elapsed` time units ago.
    #[inline]
    pub fn kernel(&self, elapsed: f64) -> f64 {
        self.p0 * (-self.lambda * elapsed).exp()
    }
}

impl Default for PeerParams {
    fn default() -> Self {
        PeerParams { p0: 0.6, lambda: 0.001 }
    }
}

/// Where `p_i` and `mu` are evaluated for a node activated inside a window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalAt {
    /// Both at the window end `t`.
    #[default]
    WindowEnd,
    /// Both at the node's own activation time `t_i`.
    ActivationTime,
}

impl FromStr for EvalAt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window-end" => Ok(EvalAt::WindowEnd),
            "activation-time" => Ok(EvalAt::ActivationTime),
            other => Err(Error::invalid(format!(
                "eval-at must be `window-end` or `activation-time` (got `{other}`)"
            ))),
        }
    }
}

impl fmt::Display for EvalAt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalAt::WindowEnd => "window-end",
            EvalAt::ActivationTime => "activation-time",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribution {
    Peer,
    External,
}

impl fmt::Display for Attribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attribution::Peer => "peer",
            Attribution::External => "external",
        })
    }
}

/// Probability that `node` has been activated by its already-activated
/// neighbors by time `t`. Neighbors activated exactly at `t` do not count.
pub fn peer_probability(net: &Network, cascade: &Cascade, params: PeerParams, node: NodeId, t: f64) -> f64 {
    hazard(net.neighbors(node), cascade.times(), params, t)
}

/// `1 - prod (1 - kernel(t - t_k))` over `neighbors` with `t_k < t`, summed
/// in log space in the given (ascending) neighbor order.
pub(crate) fn hazard(neighbors: &[NodeId], times: &[Option<f64>], params: PeerParams, t: f64) -> f64 {
    let earlier = neighbors.iter().filter_map(|&k| times[k].filter(|&tk| tk < t));
    // -expm1(sum ln1p(-x)) keeps tiny kernels (fast decay) from cancelling to 0
    let log_survive: f64 = earlier.map(|tk| (-params.kernel(t - tk)).ln_1p()).sum();
    if log_survive == 0.0 {
        return 0.0;
    }
    -log_survive.exp_m1()
}

/// Mean-field threshold at `t` and the number of non-activated nodes it averages over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanField {
    pub mu: f64,
    pub non_activated: usize,
}

/// Mean of [`peer_probability`] over nodes non-activated at `t`.
/// Fails with [`Error::Saturated`] when no such node remains.
pub fn mean_nonactivated_probability(
    net: &Network,
    cascade: &Cascade,
    params: PeerParams,
    t: f64,
) -> Result<MeanField> {
    let probs: Vec<Option<f64>> = (0..net.node_count())
        .into_par_iter()
        .map(|i| is_non_activated(cascade.activation_time(i), t).then(|| peer_probability(net, cascade, params, i, t)))
        .collect();
    mean_of(probs.iter().flatten().copied(), t)
}

fn mean_of(values: impl Iterator<Item = f64>, t: f64) -> Result<MeanField> {
    // sequential in node order so the result does not depend on thread count
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), p| (s + p, n + 1));
    if n == 0 {
        return Err(Error::Saturated { t });
    }
    Ok(MeanField {
        mu: sum / n as f64,
        non_activated: n,
    })
}

/// Threshold rule, including the zero/zero override.
#[inline]
pub fn attribute(p: f64, mu: f64) -> Attribution {
    if mu == 0.0 && p == 0.0 {
        Attribution::External
    } else if p - mu >= 0.0 {
        Attribution::Peer
    } else {
        Attribution::External
    }
}

/// Per-node outcome inside one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeClassification {
    pub node: NodeId,
    pub activation_time: f64,
    pub eval_time: f64,
    pub p: f64,
    pub mu: f64,
    pub label: Attribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowDecomposition {
    pub window: Window,
    pub newly_activated_count: usize,
    pub peer_count: usize,
    pub external_count: usize,
    pub peer_nodes: Vec<NodeId>,
    pub external_nodes: Vec<NodeId>,
    /// Threshold at the window end.
    pub mu: f64,
    pub nodes: Vec<NodeClassification>,
}

/// Decomposes the window's newly activated nodes, evaluating at the window end.
pub fn decompose_window(
    net: &Network,
    cascade: &Cascade,
    params: PeerParams,
    window: &Window,
) -> Result<WindowDecomposition> {
    decompose_window_with(net, cascade, params, window, EvalAt::WindowEnd)
}

pub fn decompose_window_with(
    net: &Network,
    cascade: &Cascade,
    params: PeerParams,
    window: &Window,
    eval_at: EvalAt,
) -> Result<WindowDecomposition> {
    let t = window.t;
    let newly = newly_activated(cascade, window);

    // one pass over nodes: p_i(t) for every node that is either non-activated
    // at t or newly activated in this window
    let probs: Vec<Option<f64>> = (0..net.node_count())
        .into_par_iter()
        .map(|i| {
            let ti = cascade.activation_time(i);
            let wanted = is_non_activated(ti, t) || ti.is_some_and(|ti| window.contains(ti));
            wanted.then(|| peer_probability(net, cascade, params, i, t))
        })
        .collect();
    let field = mean_of(
        (0..net.node_count())
            .filter(|&i| is_non_activated(cascade.activation_time(i), t))
            .map(|i| probs[i].expect("computed for non-activated nodes")),
        t,
    )?;

    let nodes: Vec<NodeClassification> = match eval_at {
        EvalAt::WindowEnd => newly
            .iter()
            .map(|&i| {
                let p = probs[i].expect("computed for newly activated nodes");
                NodeClassification {
                    node: i,
                    activation_time: cascade.activation_time(i).expect("newly activated"),
                    eval_time: t,
                    p,
                    mu: field.mu,
                    label: attribute(p, field.mu),
                }
            })
            .collect(),
        EvalAt::ActivationTime => {
            let mut mu_at: HashMap<u64, f64> = HashMap::new();
            let mut out = Vec::with_capacity(newly.len());
            for &i in &newly {
                let ti = cascade.activation_time(i).expect("newly activated");
                let mu = match mu_at.get(&ti.to_bits()) {
                    Some(&mu) => mu,
                    None => {
                        let mu = mean_nonactivated_probability(net, cascade, params, ti)?.mu;
                        mu_at.insert(ti.to_bits(), mu);
                        mu
                    }
                };
                let p = peer_probability(net, cascade, params, i, ti);
                out.push(NodeClassification {
                    node: i,
                    activation_time: ti,
                    eval_time: ti,
                    p,
                    mu,
                    label: attribute(p, mu),
                });
            }
            out
        }
    };

    let (peer_nodes, external_nodes): (Vec<NodeId>, Vec<NodeId>) = {
        let mut peer = Vec::new();
        let mut external = Vec::new();
        for c in &nodes {
            match c.label {
                Attribution::Peer => peer.push(c.node),
                Attribution::External => external.push(c.node),
            }
        }
        (peer, external)
    };
    Ok(WindowDecomposition {
        window: *window,
        newly_activated_count: newly.len(),
        peer_count: peer_nodes.len(),
        external_count: external_nodes.len(),
        peer_nodes,
        external_nodes,
        mu: field.mu,
        nodes,
    })
}

/// Window layout of a series over `horizon`.
///
/// Window `k` ends at `start + delta + k * stride`; the last window is cut at
/// the horizon end. A window's lower bound is closed only when it coincides
/// with the horizon start, so with `stride == delta` every activation lands in
/// exactly one window.
pub fn series_windows(horizon: Horizon, delta: f64, stride: f64) -> Result<Vec<Window>> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("delta must be > 0 (got {delta})")));
    }
    if !(stride > 0.0) || !stride.is_finite() {
        return Err(Error::invalid(format!("stride must be > 0 (got {stride})")));
    }
    let Horizon { start, end } = horizon;
    let make = |lower: f64, t: f64| -> Result<Window> {
        if lower <= start {
            Window::new(t, t - start)
        } else {
            Window::half_open(t, t - lower)
        }
    };
    let mut windows = Vec::new();
    let mut k = 0usize;
    loop {
        let lower = start + k as f64 * stride;
        let t = lower + delta;
        if t >= end {
            if lower < end {
                windows.push(make(lower, end)?);
            } else if windows.is_empty() {
                // zero-length horizon: one window that still reaches back to the start
                windows.push(Window::new(end, delta)?);
            }
            break;
        }
        windows.push(make(lower, t)?);
        k += 1;
    }
    Ok(windows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceSeries {
    pub params: PeerParams,
    pub delta: f64,
    pub stride: f64,
    pub eval_at: EvalAt,
    pub windows: Vec<WindowDecomposition>,
    /// End of the first window at which no non-activated node remained.
    pub saturated_at: Option<f64>,
    /// Activations left unclassified because the network saturated.
    pub unclassified_activations: usize,
}

impl InfluenceSeries {
    pub fn total_newly_activated(&self) -> usize {
        self.windows.iter().map(|w| w.newly_activated_count).sum()
    }

    pub fn total_peer(&self) -> usize {
        self.windows.iter().map(|w| w.peer_count).sum()
    }

    pub fn total_external(&self) -> usize {
        self.windows.iter().map(|w| w.external_count).sum()
    }

    /// Final label of each classified node; later windows overwrite earlier ones when windows overlap.
    pub fn labels(&self) -> HashMap<NodeId, Attribution> {
        self.windows
            .iter()
            .flat_map(|w| w.nodes.iter().map(|c| (c.node, c.label)))
            .collect()
    }
}

/// Decomposes every window of the horizon. Stops at the first saturated window.
pub fn influence_series(
    net: &Network,
    cascade: &Cascade,
    params: PeerParams,
    delta: f64,
    stride: f64,
    eval_at: EvalAt,
) -> Result<InfluenceSeries> {
    influence_series_over(net, cascade, params, cascade.horizon(), delta, stride, eval_at)
}

/// Like [`influence_series`] but with windows laid over `period` only.
/// Activations outside the period still act as influencers.
pub fn influence_series_over(
    net: &Network,
    cascade: &Cascade,
    params: PeerParams,
    period: Horizon,
    delta: f64,
    stride: f64,
    eval_at: EvalAt,
) -> Result<InfluenceSeries> {
    let mut series = InfluenceSeries {
        params,
        delta,
        stride,
        eval_at,
        windows: Vec::new(),
        saturated_at: None,
        unclassified_activations: 0,
    };
    for window in series_windows(period, delta, stride)? {
        match decompose_window_with(net, cascade, params, &window, eval_at) {
            Ok(d) => series.windows.push(d),
            Err(Error::Saturated { t }) => {
                series.saturated_at = Some(t);
                series.unclassified_activations = cascade
                    .times()
                    .iter()
                    .flatten()
                    .filter(|&&ti| ti <= period.end)
                    .filter(|&&ti| ti > window.start() || (window.closed_start && ti == window.start()))
                    .count();
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(series)
}

/// Prior-work rule: external iff no neighbor activated strictly before the node itself.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineSplit {
    pub peer_nodes: Vec<NodeId>,
    pub external_nodes: Vec<NodeId>,
}

pub fn baseline_external(net: &Network, cascade: &Cascade, window: &Window) -> BaselineSplit {
    let mut split = BaselineSplit::default();
    for i in newly_activated(cascade, window) {
        let ti = cascade.activation_time(i).expect("newly activated");
        let has_prior_friend = net
            .neighbors(i)
            .iter()
            .any(|&k| cascade.activation_time(k).is_some_and(|tk| tk < ti));
        if has_prior_friend {
            split.peer_nodes.push(i);
        } else {
            split.external_nodes.push(i);
        }
    }
    split
}

/// Baseline counts over the same window layout as [`influence_series`].
pub fn baseline_series(
    net: &Network,
    cascade: &Cascade,
    delta: f64,
    stride: f64,
) -> Result<Vec<(Window, BaselineSplit)>> {
    Ok(series_windows(cascade.horizon(), delta, stride)?
        .into_iter()
        .map(|w| {
            let split = baseline_external(net, cascade, &w);
            (w, split)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::Horizon;

    fn params(p0: f64, lambda: f64) -> PeerParams {
        PeerParams::new(p0, lambda).unwrap()
    }

    fn star(leaves: usize) -> Network {
        Network::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn no_activated_neighbors_gives_zero() {
        let net = star(3);
        let c = Cascade::new(4, [], Some(Horizon::new(0.0, 10.0).unwrap())).unwrap();
        assert_eq!(peer_probability(&net, &c, params(0.5, 0.1), 1, 5.0), 0.0);
    }

    #[test]
    fn neighbor_at_t_excluded_neighbor_just_before_counts() {
        let net = star(2);
        let c = Cascade::new(3, [(0, 10.0)], None).unwrap();
        assert_eq!(peer_probability(&net, &c, params(0.5, 0.01), 1, 10.0), 0.0);
        let p = peer_probability(&net, &c, params(0.5, 0.01), 1, 10.0 + 1e-9);
        assert!((p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn lambda_zero_two_neighbors() {
        let net = Network::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let c = Cascade::new(3, [(0, 1.0), (1, 3.0)], Some(Horizon::new(0.0, 10.0).unwrap())).unwrap();
        let p = peer_probability(&net, &c, params(0.5, 0.0), 2, 8.0);
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn one_neighbor_one_decay_length_ago() {
        // 0.6 * e^-1 from a 30-digit mpmath evaluation
        const EXPECTED: f64 = 0.220_727_664_702_865_4;
        let net = star(1);
        let c = Cascade::new(2, [(0, 0.0)], Some(Horizon::new(0.0, 1000.0).unwrap())).unwrap();
        let p = peer_probability(&net, &c, params(0.6, 0.001), 1, 1000.0);
        assert!((p - EXPECTED).abs() < 1e-12, "{p}");
    }

    #[test]
    fn tiny_kernel_stays_positive() {
        let net = star(1);
        let c = Cascade::new(2, [(0, 0.0)], Some(Horizon::new(0.0, 5000.0).unwrap())).unwrap();
        let p = peer_probability(&net, &c, params(0.1, 0.01), 1, 3600.0);
        let expected = 0.1 * (-36.0f64).exp();
        assert!(p > 0.0);
        assert!(((p - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn log_space_matches_direct_on_hub() {
        let leaves = 100;
        let net = star(leaves);
        let acts: Vec<(usize, f64)> = (1..=leaves).map(|l| (l, l as f64)).collect();
        let c = Cascade::new(leaves + 1, acts.iter().copied(), Some(Horizon::new(0.0, 200.0).unwrap())).unwrap();
        let pp = params(0.05, 0.01);
        let p = peer_probability(&net, &c, pp, 0, 150.0);
        let direct: f64 = acts.iter().map(|&(_, tk)| 1.0 - 0.05 * (-0.01 * (150.0 - tk)).exp()).product();
        assert!((p - (1.0 - direct)).abs() < 1e-12);
    }

    #[test]
    fn mu_is_zero_without_activations() {
        let net = star(4);
        let c = Cascade::new(5, [], Some(Horizon::new(0.0, 5.0).unwrap())).unwrap();
        let f = mean_nonactivated_probability(&net, &c, params(0.5, 0.0), 1.0).unwrap();
        assert_eq!(f.mu, 0.0);
        assert_eq!(f.non_activated, 5);
    }

    #[test]
    fn mu_star_center_activated() {
        let net = star(4);
        let c = Cascade::new(5, [(0, 0.0)], Some(Horizon::new(0.0, 5.0).unwrap())).unwrap();
        let f = mean_nonactivated_probability(&net, &c, params(0.5, 0.0), 1.0).unwrap();
        assert!((f.mu - 0.5).abs() < 1e-15);
        assert_eq!(f.non_activated, 4);
    }

    #[test]
    fn mu_on_path() {
        let net = Network::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = Cascade::new(4, [(0, 0.0)], Some(Horizon::new(0.0, 5.0).unwrap())).unwrap();
        let f = mean_nonactivated_probability(&net, &c, params(0.5, 0.0), 1.0).unwrap();
        assert!((f.mu - 0.5 / 3.0).abs() < 1e-15);
        assert_eq!(f.non_activated, 3);
    }

    #[test]
    fn mu_saturated_errors() {
        let net = star(1);
        let c = Cascade::new(2, [(0, 0.0), (1, 1.0)], None).unwrap();
        assert!(matches!(
            mean_nonactivated_probability(&net, &c, params(0.5, 0.0), 1.0),
            Err(Error::Saturated { .. })
        ));
    }

    #[test]
    fn seed_window_is_external() {
        let net = star(4);
        let c = Cascade::new(5, [(0, 0.0)], Some(Horizon::new(0.0, 10.0).unwrap())).unwrap();
        let d = decompose_window(&net, &c, params(0.5, 0.0), &Window::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(d.external_nodes, vec![0]);
        assert_eq!(d.peer_count, 0);
    }

    #[test]
    fn p0_zero_everything_external() {
        let net = star(4);
        let c = Cascade::new(5, [(0, 0.0), (1, 1.0), (2, 2.0)], Some(Horizon::new(0.0, 10.0).unwrap())).unwrap();
        let d = decompose_window(&net, &c, params(0.0, 0.0), &Window::new(2.0, 2.0).unwrap()).unwrap();
        assert_eq!(d.external_count, 3);
        assert_eq!(d.peer_count, 0);
    }

    #[test]
    fn tie_with_positive_mu_is_peer() {
        assert_eq!(attribute(0.3, 0.3), Attribution::Peer);
        assert_eq!(attribute(0.0, 0.0), Attribution::External);
        assert_eq!(attribute(0.1, 0.2), Attribution::External);
    }

    #[test]
    fn baseline_tie_rule() {
        let net = Network::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = Cascade::new(3, [(0, 5.0), (1, 5.0), (2, 6.0)], None).unwrap();
        let split = baseline_external(&net, &c, &Window::new(6.0, 10.0).unwrap());
        assert_eq!(split.external_nodes, vec![0, 1]);
        assert_eq!(split.peer_nodes, vec![2]);
    }

    #[test]
    fn windows_tile_the_horizon() {
        let w = series_windows(Horizon::new(0.0, 10.0).unwrap(), 3.0, 3.0).unwrap();
        let ends: Vec<f64> = w.iter().map(|w| w.t).collect();
        assert_eq!(ends, vec![3.0, 6.0, 9.0, 10.0]);
        assert!(w[0].closed_start && !w[1].closed_start);
        assert_eq!(w[3].start(), 9.0);
    }

    #[test]
    fn windows_sliding() {
        let w = series_windows(Horizon::new(0.0, 4.0).unwrap(), 2.0, 1.0).unwrap();
        let spans: Vec<(f64, f64)> = w.iter().map(|w| (w.start(), w.t)).collect();
        assert_eq!(spans, vec![(0.0, 2.0), (1.0, 3.0), (2.0, 4.0)]);
    }

    #[test]
    fn windows_short_horizon() {
        let w = series_windows(Horizon::new(0.0, 1.0).unwrap(), 5.0, 5.0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].start(), w[0].t), (0.0, 1.0));
        let w = series_windows(Horizon::new(0.0, 0.0).unwrap(), 5.0, 5.0).unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn eval_at_parses() {
        assert_eq!("activation-time".parse::<EvalAt>().unwrap(), EvalAt::ActivationTime);
        assert!("later".parse::<EvalAt>().is_err());
    }

    #[test]
    fn saturated_series_stops() {
        let net = Network::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = Cascade::new(3, [(0, 0.0), (1, 1.0), (2, 2.0)], None).unwrap();
        let s = influence_series(&net, &c, params(0.5, 0.0), 1.0, 1.0, EvalAt::WindowEnd).unwrap();
        assert_eq!(s.saturated_at, Some(2.0));
        assert_eq!(s.unclassified_activations, 1);
        assert_eq!(s.total_newly_activated() + s.unclassified_activations, 3);
    }
}
