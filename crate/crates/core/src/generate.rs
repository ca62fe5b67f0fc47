//! Synthetic networks for fixtures and desk-scale experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Network;

/// G(n, p) random graph.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Network> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Network::from_edges(n, edges)
}

/// Discrete power-law degree sequence `P(k) ~ k^-exponent` on `[min_degree, max_degree]`,
/// drawn by inverse transform. The total is made even by bumping one entry.
pub fn power_law_degrees(
    n: usize,
    exponent: f64,
    min_degree: usize,
    max_degree: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if exponent <= 1.0 || min_degree == 0 || max_degree < min_degree {
        return Err(Error::invalid("power-law degrees need exponent > 1 and 1 <= min <= max"));
    }
    let weights: Vec<f64> = (min_degree..=max_degree)
        .map(|k| (k as f64).powf(-exponent))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let k = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
            min_degree + k
        })
        .collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        degrees[0] += 1;
    }
    Ok(degrees)
}

/// Erased configuration model: random stub matching, then self-loops and
/// multi-edges are discarded. Realized degrees can fall slightly below the targets.
pub fn configuration_model(degrees: &[usize], seed: u64) -> Result<Network> {
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(node, &d)| std::iter::repeat(node).take(d))
        .collect();
    if stubs.len() % 2 == 1 {
        return Err(Error::invalid("degree sum must be even"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    stubs.shuffle(&mut rng);
    let edges = stubs.chunks_exact(2).map(|pair| (pair[0], pair[1]));
    Network::from_edges(degrees.len(), edges)
}
