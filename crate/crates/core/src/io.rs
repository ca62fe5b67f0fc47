//! CSV and JSON formats.
//!
//! Inputs: edge lists (`source,target`), id maps (`dense_id,original_id`),
//! attributes (`id,vote,age,gender,locality`), activations (`id,timestamp`),
//! group labels (`id,group`), and simulator ground truth (`id,label,both_fired`).

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::calibrator::CalibrationGrid;
use crate::cascade::{Cascade, Horizon};
use crate::error::{Error, Result};
use crate::estimator::{BaselineSplit, EvalAt, InfluenceSeries, PeerParams};
use crate::graph::{load_network, LoadReport, Network, NodeAttributes, NodeId};
use crate::homophily::{AgeGapHistogram, MixingMatrix, SameFractionHistogram};
use crate::simulator::{GroundTruth, LabeledCascade};
use crate::Window;

/// One parsed CSV row with its 1-based line number.
struct Row {
    line: u64,
    fields: Vec<String>,
}

fn rows<R: Read>(reader: R, skip_header: bool) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(line, e.to_string())
        })?;
        if k == 0 && skip_header {
            continue;
        }
        let line = rec.position().map_or(k as u64 + 1, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        out.push(Row {
            line,
            fields: rec.iter().map(str::to_owned).collect(),
        });
    }
    Ok(out)
}

fn expect_columns(row: &Row, n: usize) -> Result<()> {
    if row.fields.len() != n {
        return Err(Error::parse(
            row.line,
            format!("expected {n} columns, found {}", row.fields.len()),
        ));
    }
    Ok(())
}

fn first_is(rows: &[Row], header: &[&str]) -> bool {
    rows.first().is_some_and(|r| {
        r.fields.len() == header.len() && r.fields.iter().zip(header).all(|(a, b)| a.eq_ignore_ascii_case(b))
    })
}

/// Raw `(source, target)` id pairs. With `has_header` the first row is skipped.
pub fn read_edge_rows<R: Read>(reader: R, has_header: bool) -> Result<Vec<(String, String)>> {
    rows(reader, has_header)?
        .into_iter()
        .map(|row| {
            expect_columns(&row, 2)?;
            if row.fields.iter().any(String::is_empty) {
                return Err(Error::parse(row.line, "empty node id"));
            }
            let mut f = row.fields.into_iter();
            Ok((f.next().unwrap(), f.next().unwrap()))
        })
        .collect()
}

pub fn read_network<R: Read>(reader: R, has_header: bool) -> Result<(Network, LoadReport)> {
    load_network(read_edge_rows(reader, has_header)?)
}

/// `dense_id,original_id` table; dense ids must be exactly `0..n`.
pub fn read_id_map<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut table = rows(reader, false)?;
    if first_is(&table, &["dense_id", "original_id"]) {
        table.remove(0);
    }
    let mut ids = vec![None; table.len()];
    for row in table {
        expect_columns(&row, 2)?;
        let dense: usize = row.fields[0]
            .parse()
            .map_err(|_| Error::parse(row.line, format!("bad dense id `{}`", row.fields[0])))?;
        let slot = ids
            .get_mut(dense)
            .ok_or_else(|| Error::parse(row.line, format!("dense id {dense} out of range")))?;
        if slot.replace(row.fields[1].clone()).is_some() {
            return Err(Error::parse(row.line, format!("dense id {dense} repeated")));
        }
    }
    ids.into_iter()
        .enumerate()
        .map(|(i, id)| id.ok_or_else(|| Error::invalid(format!("id map lacks dense id {i}"))))
        .collect()
}

/// Network from a dense-id edge list plus its id map (the serialized form
/// written by [`write_network`]). Isolated nodes survive through the map.
pub fn read_network_with_id_map<R: Read, M: Read>(edges: R, has_header: bool, id_map: M) -> Result<(Network, LoadReport)> {
    let ids = read_id_map(id_map)?;
    let n = ids.len();
    let mut pairs = Vec::new();
    for row in rows(edges, has_header)? {
        expect_columns(&row, 2)?;
        let parse = |s: &str| -> Result<NodeId> {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v < n)
                .ok_or_else(|| Error::parse(row.line, format!("`{s}` is not a dense id below {n}")))
        };
        pairs.push((parse(&row.fields[0])?, parse(&row.fields[1])?));
    }
    Network::with_ids(ids, pairs)
}

/// Dense-id edge list (`source,target`, header included).
pub fn write_edge_list<W: Write>(net: &Network, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["source", "target"])?;
    for (u, v) in net.edges() {
        w.write_record([u.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_id_map<W: Write>(net: &Network, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dense_id", "original_id"])?;
    for (i, id) in net.original_ids().iter().enumerate() {
        w.write_record([i.to_string(), id.clone()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the edge list and id map that [`read_network_with_id_map`] reads back.
pub fn write_network<W1: Write, W2: Write>(net: &Network, edges: W1, id_map: W2) -> Result<()> {
    write_edge_list(net, edges)?;
    write_id_map(net, id_map)
}

/// Attributes keyed by original id. Rows for ids absent from `net` are
/// skipped and counted; missing values are empty fields.
pub fn read_attributes<R: Read>(reader: R, net: &Network) -> Result<(NodeAttributes, usize)> {
    let mut table = rows(reader, false)?;
    if first_is(&table, &["id", "vote", "age", "gender", "locality"]) {
        table.remove(0);
    }
    let mut attrs = NodeAttributes::empty(net.node_count());
    let mut skipped = 0;
    let opt = |s: &str| (!s.is_empty()).then(|| s.to_owned());
    for row in table {
        expect_columns(&row, 5)?;
        let Some(i) = net.node_of(&row.fields[0]) else {
            skipped += 1;
            continue;
        };
        attrs.vote[i] = opt(&row.fields[1]);
        attrs.age[i] = match row.fields[2].as_str() {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .ok()
                    .filter(|a| a.is_finite())
                    .ok_or_else(|| Error::parse(row.line, format!("bad age `{s}`")))?,
            ),
        };
        attrs.gender[i] = opt(&row.fields[3]);
        attrs.locality[i] = opt(&row.fields[4]);
    }
    if skipped > 0 {
        warn!("attributes: skipped {skipped} row(s) for ids not in the network");
    }
    Ok((attrs, skipped))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeFormat {
    /// Integer or float seconds (or simulation steps).
    #[default]
    Numeric,
    /// RFC 3339 / ISO-8601; naive timestamps are taken as UTC.
    Iso8601,
}

impl std::str::FromStr for TimeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(TimeFormat::Numeric),
            "iso8601" | "iso-8601" => Ok(TimeFormat::Iso8601),
            other => Err(Error::invalid(format!("time format must be `numeric` or `iso8601` (got `{other}`)"))),
        }
    }
}

/// Parses `+HH:MM`, `-HH`, `HHMM`-style offsets into seconds.
pub fn parse_utc_offset(s: &str) -> Result<i64> {
    let bad = || Error::invalid(format!("bad UTC offset `{s}`"));
    let (sign, rest) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => (1, s),
    };
    let digits: String = rest.chars().filter(|c| *c != ':').collect();
    if digits.is_empty() || digits.len() > 4 || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let (h, m) = if digits.len() <= 2 {
        (digits.parse::<i64>().map_err(|_| bad())?, 0)
    } else {
        let split = digits.len() - 2;
        (
            digits[..split].parse::<i64>().map_err(|_| bad())?,
            digits[split..].parse::<i64>().map_err(|_| bad())?,
        )
    };
    if h > 23 || m > 59 {
        return Err(bad());
    }
    Ok(sign * (h * 3600 + m * 60))
}

fn parse_time(s: &str, format: TimeFormat, utc_offset: i64) -> Option<f64> {
    match format {
        TimeFormat::Numeric => s.parse::<f64>().ok().filter(|t| t.is_finite()),
        TimeFormat::Iso8601 => {
            let utc = DateTime::parse_from_rfc3339(s)
                .map(|d| d.timestamp_millis())
                .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f").map(|d| d.and_utc().timestamp_millis()))
                .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%.f").map(|d| d.and_utc().timestamp_millis()))
                .ok()?;
            Some(utc as f64 / 1000.0 + utc_offset as f64)
        }
    }
}

/// `(original id, time)` rows. A leading `id,timestamp` header is skipped.
/// `utc_offset` (seconds) shifts ISO timestamps onto a local clock.
pub fn read_activations<R: Read>(reader: R, format: TimeFormat, utc_offset: i64) -> Result<Vec<(String, f64)>> {
    let mut table = rows(reader, false)?;
    if first_is(&table, &["id", "timestamp"]) {
        table.remove(0);
    }
    table
        .into_iter()
        .map(|row| {
            expect_columns(&row, 2)?;
            let t = parse_time(&row.fields[1], format, utc_offset)
                .ok_or_else(|| Error::parse(row.line, format!("bad timestamp `{}`", row.fields[1])))?;
            Ok((row.fields[0].clone(), t))
        })
        .collect()
}

/// Maps activation rows onto `net`. Ids not in the network are skipped and
/// counted; activations outside an explicit `horizon` are dropped and counted.
pub fn build_cascade(
    net: &Network,
    activations: &[(String, f64)],
    horizon: Option<Horizon>,
) -> Result<(Cascade, CascadeReport)> {
    let mut report = CascadeReport::default();
    let mut kept = Vec::with_capacity(activations.len());
    let mut seen = HashSet::new();
    for (id, t) in activations {
        let Some(i) = net.node_of(id) else {
            report.unknown_ids += 1;
            continue;
        };
        if horizon.is_some_and(|h| !h.contains(*t)) {
            report.outside_horizon += 1;
            continue;
        }
        if !seen.insert(i) {
            return Err(Error::invalid(format!("node `{id}` activated more than once")));
        }
        kept.push((i, *t));
    }
    if report.unknown_ids > 0 {
        warn!("activations: skipped {} row(s) for ids not in the network", report.unknown_ids);
    }
    Ok((Cascade::new(net.node_count(), kept, horizon)?, report))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub unknown_ids: usize,
    pub outside_horizon: usize,
}

/// Nodes of `net` belonging to `group` in an `id,group` table.
pub fn read_group<R: Read>(reader: R, net: &Network, group: &str) -> Result<HashSet<NodeId>> {
    let mut table = rows(reader, false)?;
    if first_is(&table, &["id", "group"]) {
        table.remove(0);
    }
    let mut out = HashSet::new();
    for row in table {
        expect_columns(&row, 2)?;
        if row.fields[1] == group {
            if let Some(i) = net.node_of(&row.fields[0]) {
                out.insert(i);
            }
        }
    }
    Ok(out)
}

/// Ground-truth labels keyed by dense id.
pub fn read_ground_truth<R: Read>(reader: R, net: &Network) -> Result<HashMap<NodeId, GroundTruth>> {
    let mut table = rows(reader, false)?;
    if first_is(&table, &["id", "label", "both_fired"]) {
        table.remove(0);
    }
    let mut out = HashMap::new();
    for row in table {
        expect_columns(&row, 3)?;
        let label: GroundTruth = row.fields[1]
            .parse()
            .map_err(|_| Error::parse(row.line, format!("bad label `{}`", row.fields[1])))?;
        let i = net
            .node_of(&row.fields[0])
            .ok_or_else(|| Error::UnknownNode(row.fields[0].clone()))?;
        out.insert(i, label);
    }
    Ok(out)
}

/// `id,timestamp` for every activated node, ordered by time then id.
pub fn write_activations<W: Write>(net: &Network, cascade: &Cascade, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "timestamp"])?;
    for (i, t) in cascade.activations() {
        w.write_record([net.original_id(i).to_owned(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `id,label,both_fired` for every activated node, ordered like [`write_activations`].
pub fn write_ground_truth<W: Write>(net: &Network, sim: &LabeledCascade, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "label", "both_fired"])?;
    for (i, _) in sim.cascade.activations() {
        let label = sim.labels[i].expect("activated nodes carry a label");
        w.write_record([net.original_id(i).to_owned(), label.to_string(), sim.both_fired[i].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `window_end,newly_activated,peer_count,external_count,mu`.
pub fn write_series<W: Write>(series: &InfluenceSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["window_end", "newly_activated", "peer_count", "external_count", "mu"])?;
    for d in &series.windows {
        w.write_record([
            d.window.t.to_string(),
            d.newly_activated_count.to_string(),
            d.peer_count.to_string(),
            d.external_count.to_string(),
            d.mu.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `id,t_i,window_end,p_i,mu,label`, one row per classification.
pub fn write_node_labels<W: Write>(net: &Network, series: &InfluenceSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "t_i", "window_end", "p_i", "mu", "label"])?;
    for d in &series.windows {
        for c in &d.nodes {
            w.write_record([
                net.original_id(c.node).to_owned(),
                c.activation_time.to_string(),
                d.window.t.to_string(),
                c.p.to_string(),
                c.mu.to_string(),
                c.label.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `window_end,newly_activated,peer_count,external_count` under the baseline rule.
pub fn write_baseline_series<W: Write>(baseline: &[(Window, BaselineSplit)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["window_end", "newly_activated", "peer_count", "external_count"])?;
    for (win, split) in baseline {
        let (p, e) = (split.peer_nodes.len(), split.external_nodes.len());
        w.write_record([win.t.to_string(), (p + e).to_string(), p.to_string(), e.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRowJson {
    pub window_start: f64,
    pub window_end: f64,
    pub newly_activated: usize,
    pub peer_count: usize,
    pub external_count: usize,
    pub mu: f64,
}

/// JSON mirror of the series CSV, with the run parameters attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub params: PeerParams,
    pub delta: f64,
    pub stride: f64,
    pub eval_at: EvalAt,
    pub saturated_at: Option<f64>,
    pub unclassified_activations: usize,
    pub total_peer: usize,
    pub total_external: usize,
    pub windows: Vec<SeriesRowJson>,
}

impl From<&InfluenceSeries> for SeriesJson {
    fn from(s: &InfluenceSeries) -> Self {
        SeriesJson {
            params: s.params,
            delta: s.delta,
            stride: s.stride,
            eval_at: s.eval_at,
            saturated_at: s.saturated_at,
            unclassified_activations: s.unclassified_activations,
            total_peer: s.total_peer(),
            total_external: s.total_external(),
            windows: s
                .windows
                .iter()
                .map(|d| SeriesRowJson {
                    window_start: d.window.start(),
                    window_end: d.window.t,
                    newly_activated: d.newly_activated_count,
                    peer_count: d.peer_count,
                    external_count: d.external_count,
                    mu: d.mu,
                })
                .collect(),
        }
    }
}

pub fn write_series_json<W: Write>(series: &InfluenceSeries, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &SeriesJson::from(series))?;
    Ok(())
}

/// `lambda,p0,peer_fraction,selected`.
pub fn write_grid<W: Write>(grid: &CalibrationGrid, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["lambda", "p0", "peer_fraction", "selected"])?;
    for p in grid.points() {
        w.write_record([
            p.lambda.to_string(),
            p.p0.to_string(),
            p.peer_fraction.to_string(),
            grid.is_selected(&p).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `bin_start,count`.
pub fn write_histogram<W: Write>(bins: &[(f64, usize)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_start", "count"])?;
    for (start, count) in bins {
        w.write_record([start.to_string(), count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_same_fraction<W: Write>(h: &SameFractionHistogram, writer: W) -> Result<()> {
    let bins: Vec<(f64, usize)> = h.bin_starts.iter().copied().zip(h.counts.iter().copied()).collect();
    write_histogram(&bins, writer)
}

/// `category_u,category_v,count` in row-major order.
pub fn write_mixing<W: Write>(m: &MixingMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["category_u", "category_v", "count"])?;
    for (a, row) in m.categories.iter().zip(&m.counts) {
        for (b, c) in m.categories.iter().zip(row) {
            w.write_record([a.clone(), b.clone(), c.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_age_gaps<W: Write>(h: &AgeGapHistogram, writer: W) -> Result<()> {
    write_histogram(&h.counts, writer)
}
