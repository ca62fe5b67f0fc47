//! Grid calibration of the peer kernel against a target peer-activated share.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{Cascade, Horizon};
use crate::error::{Error, Result};
use crate::estimator::{influence_series_over, EvalAt, InfluenceSeries, PeerParams, DEFAULT_DELTA};
use crate::graph::Network;

pub const DEFAULT_TOLERANCE: f64 = 0.02;
pub const ONE_DAY: f64 = 86_400.0;

/// Referral share used as the default target: 17587 of 25154 first-day visitors.
pub const REFERRAL_TARGET: f64 = 17_587.0 / 25_154.0;

/// The kernel used for the illustrative estimate, `(lambda, p0)`.
pub const ILLUSTRATIVE_PICK: (f64, f64) = (0.001, 0.6);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lambda_values: Vec<f64>,
    pub p0_values: Vec<f64>,
}

impl Default for GridSpec {
    /// lambda: 7 log-spaced points on [1e-4, 1e-2]; p0: 0.1, 0.2, ..., 0.9.
    fn default() -> Self {
        GridSpec {
            lambda_values: log_space(1e-4, 1e-2, 7),
            p0_values: (1..=9).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

/// `n` points evenly spaced in log10 between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n)
                .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub period: Horizon,
    pub target: f64,
    pub tolerance: f64,
    pub delta: f64,
    pub eval_at: EvalAt,
}

impl SweepOptions {
    /// First day after the first activation, target = referral share, two-hour windows.
    pub fn for_cascade(cascade: &Cascade) -> Self {
        SweepOptions {
            period: first_day(cascade),
            target: REFERRAL_TARGET,
            tolerance: DEFAULT_TOLERANCE,
            delta: DEFAULT_DELTA,
            eval_at: EvalAt::WindowEnd,
        }
    }
}

/// `[first activation, first activation + 24h]`, clipped to the horizon.
pub fn first_day(cascade: &Cascade) -> Horizon {
    let h = cascade.horizon();
    let first = cascade
        .times()
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let start = if first.is_finite() { first } else { h.start };
    Horizon {
        start,
        end: (start + ONE_DAY).min(h.end).max(start),
    }
}

fn fraction_of(series: &InfluenceSeries, period: Horizon) -> Result<f64> {
    let total = series.total_newly_activated();
    if total == 0 {
        return Err(Error::UndefinedFraction {
            start: period.start,
            end: period.end,
        });
    }
    Ok(series.total_peer() as f64 / total as f64)
}

/// Share of activations inside `period` attributed to peers, over tumbling windows of length `delta`.
pub fn peer_fraction(
    net: &Network,
    cascade: &Cascade,
    params: PeerParams,
    period: Horizon,
    delta: f64,
    eval_at: EvalAt,
) -> Result<f64> {
    let series = influence_series_over(net, cascade, params, period, delta, delta, eval_at)?;
    fraction_of(&series, period)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub lambda: f64,
    pub p0: f64,
    pub peer_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    pub lambda_values: Vec<f64>,
    pub p0_values: Vec<f64>,
    pub options: SweepOptions,
    /// `fractions[l][p]` for `lambda_values[l]`, `p0_values[p]`.
    pub fractions: Vec<Vec<f64>>,
    pub selected: Vec<GridPoint>,
    /// Closest point to the target when nothing lies within tolerance.
    pub nearest: Option<GridPoint>,
    /// The illustrative `(0.001, 0.6)` kernel, when the grid contains it.
    pub illustrative: Option<GridPoint>,
    /// Largest pairwise L1 distance between normalized per-window peer curves of the selected points.
    pub selected_curve_spread: Option<f64>,
}

impl CalibrationGrid {
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        self.lambda_values.iter().enumerate().flat_map(move |(l, &lambda)| {
            self.p0_values.iter().enumerate().map(move |(p, &p0)| GridPoint {
                lambda,
                p0,
                peer_fraction: self.fractions[l][p],
            })
        })
    }

    pub fn is_selected(&self, point: &GridPoint) -> bool {
        (point.peer_fraction - self.options.target).abs() <= self.options.tolerance
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

pub fn sweep(net: &Network, cascade: &Cascade, grid: &GridSpec, opts: SweepOptions) -> Result<CalibrationGrid> {
    if grid.lambda_values.is_empty() || grid.p0_values.is_empty() {
        return Err(Error::invalid("calibration grid is empty"));
    }
    if !(0.0..=1.0).contains(&opts.target) || !(opts.tolerance >= 0.0) {
        return Err(Error::invalid("target must lie in [0, 1] and tolerance be >= 0"));
    }
    let cells: Vec<(f64, f64)> = grid
        .lambda_values
        .iter()
        .flat_map(|&l| grid.p0_values.iter().map(move |&p| (l, p)))
        .collect();
    // cells are independent; collect keeps grid order regardless of scheduling
    let evaluated: Vec<(f64, Vec<usize>)> = cells
        .par_iter()
        .map(|&(lambda, p0)| {
            let params = PeerParams::new(p0, lambda)?;
            let series =
                influence_series_over(net, cascade, params, opts.period, opts.delta, opts.delta, opts.eval_at)?;
            let curve = series.windows.iter().map(|w| w.peer_count).collect();
            Ok((fraction_of(&series, opts.period)?, curve))
        })
        .collect::<Result<_>>()?;

    let np = grid.p0_values.len();
    let fractions: Vec<Vec<f64>> = evaluated
        .chunks(np)
        .map(|row| row.iter().map(|(f, _)| *f).collect())
        .collect();
    let mut out = CalibrationGrid {
        lambda_values: grid.lambda_values.clone(),
        p0_values: grid.p0_values.clone(),
        options: opts,
        fractions,
        selected: Vec::new(),
        nearest: None,
        illustrative: None,
        selected_curve_spread: None,
    };
    let points: Vec<GridPoint> = out.points().collect();
    let mut selected_curves = Vec::new();
    for (point, (_, curve)) in points.iter().zip(&evaluated) {
        if out.is_selected(point) {
            out.selected.push(*point);
            selected_curves.push(normalized(curve));
        }
        if close(point.lambda, ILLUSTRATIVE_PICK.0) && close(point.p0, ILLUSTRATIVE_PICK.1) {
            out.illustrative = Some(*point);
        }
    }
    if out.selected.is_empty() {
        out.nearest = points
            .iter()
            .min_by(|a, b| {
                (a.peer_fraction - opts.target)
                    .abs()
                    .total_cmp(&(b.peer_fraction - opts.target).abs())
            })
            .copied();
    }
    if selected_curves.len() >= 2 {
        let mut spread: f64 = 0.0;
        for i in 0..selected_curves.len() {
            for j in i + 1..selected_curves.len() {
                let d: f64 = selected_curves[i]
                    .iter()
                    .zip(&selected_curves[j])
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                spread = spread.max(d);
            }
        }
        out.selected_curve_spread = Some(spread);
    }
    Ok(out)
}

fn normalized(curve: &[usize]) -> Vec<f64> {
    let total: usize = curve.iter().sum();
    if total == 0 {
        return vec![0.0; curve.len()];
    }
    curve.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` when either side is constant or lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman correlations of peer fraction with `p0` and with `lambda`, pooled over the grid.
pub fn grid_trends(grid: &CalibrationGrid) -> (Option<f64>, Option<f64>) {
    let points: Vec<GridPoint> = grid.points().collect();
    let f: Vec<f64> = points.iter().map(|p| p.peer_fraction).collect();
    let p0: Vec<f64> = points.iter().map(|p| p.p0).collect();
    let lambda: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    (spearman(&p0, &f), spearman(&lambda, &f))
}
