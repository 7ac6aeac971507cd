//! Shared fixtures for unit tests.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::MixedGraph;
use crate::linalg::Vector;
use crate::param::{BlockParameter, ChainModel, ModelParameter};

pub fn figure_one() -> MixedGraph {
    let mut g = MixedGraph::new([
        "spend", "strat", "salar", "top10", "tstsc", "rejr", "pacc", "apgra",
    ])
    .unwrap();
    for (a, b) in [("spend", "strat"), ("spend", "salar"), ("strat", "salar")] {
        g.add_undirected(a, b).unwrap();
    }
    for (a, b) in [("pacc", "rejr"), ("pacc", "top10"), ("rejr", "tstsc"), ("top10", "tstsc")] {
        g.add_undirected(a, b).unwrap();
    }
    for (from, to) in [
        ("salar", "pacc"),
        ("salar", "rejr"),
        ("spend", "rejr"),
        ("spend", "top10"),
        ("strat", "top10"),
        ("salar", "tstsc"),
        ("spend", "tstsc"),
        ("pacc", "apgra"),
        ("salar", "apgra"),
        ("tstsc", "apgra"),
    ] {
        g.add_directed(from, to).unwrap();
    }
    g
}

/// Random chain graph on `n` vertices: a random partition into connected
/// undirected blocks, with directed edges from earlier to later blocks.
/// Vertex insertion order is shuffled so it differs from the chain order.
pub fn random_chain_graph<R: Rng>(rng: &mut R, n: usize) -> MixedGraph {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut g = MixedGraph::new(labels.iter().map(|i| format!("v{i}"))).unwrap();
    // chain order is v0, v1, ... ; cut it into blocks
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < n {
        let size = rng.random_range(1..=3usize).min(n - i);
        blocks.push((i..i + size).collect());
        i += size;
    }
    let name = |v: usize| format!("v{v}");
    for block in &blocks {
        for k in 1..block.len() {
            let j = rng.random_range(0..k);
            g.add_undirected(&name(block[k]), &name(block[j])).unwrap();
        }
        for a in 0..block.len() {
            for b in (a + 1)..block.len() {
                let (u, v) = (g.vertex(&name(block[a])).unwrap(), g.vertex(&name(block[b])).unwrap());
                if !g.has_undirected(u, v) && rng.random_bool(0.5) {
                    g.add_undirected(&name(block[a]), &name(block[b])).unwrap();
                }
            }
        }
    }
    for (bi, block) in blocks.iter().enumerate() {
        for earlier in &blocks[..bi] {
            for &p in earlier {
                for &c in block {
                    if rng.random_bool(0.4) {
                        g.add_directed(&name(p), &name(c)).unwrap();
                    }
                }
            }
        }
    }
    g
}

/// Random point of the parameter space; each concentration block is made
/// diagonally dominant.
pub fn random_theta<R: Rng>(model: &ChainModel, rng: &mut R) -> ModelParameter {
    let blocks = model
        .layouts
        .iter()
        .map(|l| {
            let beta = Vector::from_fn(l.p(), |_, _| rng.random_range(-1.0..1.0));
            let k = l.size();
            let mut omega = Vector::zeros(l.q());
            let mut row_sum = alloc::vec![0.0; k];
            for (idx, &(i, j)) in l.omega_entries.iter().enumerate() {
                if i != j {
                    let x: f64 = rng.random_range(-0.8..0.8);
                    omega[idx] = x;
                    row_sum[i] += x.abs();
                    row_sum[j] += x.abs();
                }
            }
            for i in 0..k {
                omega[i] = row_sum[i] + rng.random_range(0.5..1.5);
            }
            BlockParameter {
                component: l.component,
                beta,
                omega,
            }
        })
        .collect();
    ModelParameter { blocks }
}

/// Figure-one parameter with the middle component set to the published
/// MLE column; the other blocks are arbitrary but valid.
pub fn table_one_theta(model: &ChainModel) -> ModelParameter {
    let mut theta = ModelParameter::identity(model);
    let g = &model.graph;
    let l = &model.layouts[1];
    let v = |s: &str| g.vertex(s).unwrap();
    let local = |s: &str| l.vertices.iter().position(|&w| w == v(s)).unwrap();
    let parent = |s: &str| l.parents.iter().position(|&w| w == v(s)).unwrap();
    let mut b = crate::linalg::Mat::zeros(l.size(), l.parents.len());
    for (child, par, x) in [
        ("pacc", "salar", -0.53),
        ("rejr", "salar", 0.26),
        ("rejr", "spend", 0.30),
        ("top10", "spend", 0.98),
        ("top10", "strat", 0.44),
        ("tstsc", "salar", 0.26),
        ("tstsc", "spend", 0.49),
    ] {
        b[(local(child), parent(par))] = x;
    }
    let mut om = crate::linalg::Mat::zeros(l.size(), l.size());
    for (a, c, x) in [
        ("pacc", "pacc", 1.46),
        ("rejr", "rejr", 1.64),
        ("top10", "top10", 2.99),
        ("tstsc", "tstsc", 3.39),
        ("pacc", "rejr", -0.33),
        ("pacc", "top10", -0.16),
        ("rejr", "tstsc", -0.65),
        ("top10", "tstsc", -1.76),
    ] {
        om[(local(a), local(c))] = x;
        om[(local(c), local(a))] = x;
    }
    theta.blocks[1].beta = l.beta_from_matrix(&b);
    theta.blocks[1].omega = l.omega_from_matrix(&om);
    theta
}
