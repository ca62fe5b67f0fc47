//! Attribute homophily over the friendship network.
//!
//! Nodes with a missing value are left out of each metric and counted, never imputed.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Network, NodeAttributes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Categorical {
    Vote,
    Gender,
    Locality,
    /// Age bands `under-18`, `18-30`, `30-50`, `50+`.
    AgeBand,
}

impl FromStr for Categorical {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vote" => Ok(Categorical::Vote),
            "gender" => Ok(Categorical::Gender),
            "locality" => Ok(Categorical::Locality),
            "age_band" | "age-band" => Ok(Categorical::AgeBand),
            "age" => Err(Error::invalid("`age` is numeric; use `age_band` or the age-gap distribution")),
            other => Err(Error::UnknownAttribute(other.to_owned())),
        }
    }
}

pub fn age_band(age: f64) -> &'static str {
    if age < 18.0 {
        "under-18"
    } else if age < 30.0 {
        "18-30"
    } else if age < 50.0 {
        "30-50"
    } else {
        "50+"
    }
}

/// Per-node category under `attr`; `None` when missing.
pub fn categories(attrs: &NodeAttributes, attr: Categorical) -> Vec<Option<String>> {
    match attr {
        Categorical::Vote => attrs.vote.clone(),
        Categorical::Gender => attrs.gender.clone(),
        Categorical::Locality => attrs.locality.clone(),
        Categorical::AgeBand => attrs.age.iter().map(|a| a.map(|a| age_band(a).to_owned())).collect(),
    }
}

fn check_size(net: &Network, attrs: &NodeAttributes) -> Result<()> {
    if attrs.node_count() != net.node_count() {
        return Err(Error::invalid(format!(
            "attribute table covers {} nodes, network has {}",
            attrs.node_count(),
            net.node_count()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SameFractionHistogram {
    /// Per node: share of neighbors (with a known value) sharing its value.
    pub fractions: Vec<Option<f64>>,
    /// Lower edges of the equal-width bins on `[0, 1]`; 1.0 falls in the last bin.
    pub bin_starts: Vec<f64>,
    pub counts: Vec<usize>,
    pub excluded_missing: usize,
    /// Nodes with a value but no neighbor carrying one.
    pub excluded_no_neighbors: usize,
}

pub fn same_fraction_histogram(
    net: &Network,
    attrs: &NodeAttributes,
    attribute: &str,
    bins: usize,
) -> Result<SameFractionHistogram> {
    let attr: Categorical = attribute.parse()?;
    if bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    check_size(net, attrs)?;
    let values = categories(attrs, attr);
    let mut out = SameFractionHistogram {
        fractions: vec![None; net.node_count()],
        bin_starts: (0..bins).map(|k| k as f64 / bins as f64).collect(),
        counts: vec![0; bins],
        excluded_missing: 0,
        excluded_no_neighbors: 0,
    };
    for (i, own) in values.iter().enumerate() {
        let Some(own) = own else {
            out.excluded_missing += 1;
            continue;
        };
        let (mut same, mut known) = (0usize, 0usize);
        for &j in net.neighbors(i) {
            if let Some(other) = &values[j] {
                known += 1;
                same += usize::from(other == own);
            }
        }
        if known == 0 {
            out.excluded_no_neighbors += 1;
            continue;
        }
        let f = same as f64 / known as f64;
        out.fractions[i] = Some(f);
        out.counts[((f * bins as f64) as usize).min(bins - 1)] += 1;
    }
    Ok(out)
}

/// Edge counts by category pair. An edge between categories `a != b` adds
/// one half to both `(a, b)` and `(b, a)`; a same-category edge adds one to
/// `(a, a)`. The matrix is symmetric and sums to the number of counted edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingMatrix {
    pub categories: Vec<String>,
    pub counts: Vec<Vec<f64>>,
    pub edges_counted: usize,
    pub edges_skipped: usize,
    /// Newman assortativity coefficient; `None` when only one category occurs.
    pub assortativity: Option<f64>,
}

pub fn mixing_matrix(net: &Network, attrs: &NodeAttributes, attribute: &str) -> Result<MixingMatrix> {
    let attr: Categorical = attribute.parse()?;
    check_size(net, attrs)?;
    let values = categories(attrs, attr);
    let mut names: Vec<String> = values.iter().flatten().cloned().collect();
    names.sort();
    names.dedup();
    let index = |v: &str| names.binary_search_by(|n| n.as_str().cmp(v)).expect("category collected");
    let k = names.len();
    let mut counts = vec![vec![0.0; k]; k];
    let (mut counted, mut skipped) = (0usize, 0usize);
    for (u, v) in net.edges() {
        match (&values[u], &values[v]) {
            (Some(a), Some(b)) => {
                let (a, b) = (index(a), index(b));
                if a == b {
                    counts[a][a] += 1.0;
                } else {
                    counts[a][b] += 0.5;
                    counts[b][a] += 0.5;
                }
                counted += 1;
            }
            _ => skipped += 1,
        }
    }
    let assortativity = if counted == 0 {
        None
    } else {
        let total = counted as f64;
        let trace: f64 = (0..k).map(|a| counts[a][a] / total).sum();
        let row_sq: f64 = counts
            .iter()
            .map(|row| {
                let a = row.iter().sum::<f64>() / total;
                a * a
            })
            .sum();
        (row_sq < 1.0).then(|| (trace - row_sq) / (1.0 - row_sq))
    };
    Ok(MixingMatrix {
        categories: names,
        counts,
        edges_counted: counted,
        edges_skipped: skipped,
        assortativity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeGapHistogram {
    pub bin_width: f64,
    /// `(bin start, edge count)` for non-empty bins, ascending.
    pub counts: Vec<(f64, usize)>,
    pub edges_skipped: usize,
}

/// Histogram of `|age_u - age_v|` over edges with both ages known.
pub fn age_gap_distribution(net: &Network, attrs: &NodeAttributes, bin_width: f64) -> Result<AgeGapHistogram> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::invalid(format!("bin width must be > 0 (got {bin_width})")));
    }
    check_size(net, attrs)?;
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    let mut skipped = 0;
    for (u, v) in net.edges() {
        match (attrs.age[u], attrs.age[v]) {
            (Some(a), Some(b)) => *bins.entry(((a - b).abs() / bin_width).floor() as i64).or_default() += 1,
            _ => skipped += 1,
        }
    }
    Ok(AgeGapHistogram {
        bin_width,
        counts: bins.into_iter().map(|(k, c)| (k as f64 * bin_width, c)).collect(),
        edges_skipped: skipped,
    })
}
