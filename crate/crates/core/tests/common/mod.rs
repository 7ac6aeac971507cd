#![allow(dead_code)]

use ampcg_core::linalg::Vector;
use ampcg_core::{BlockParameter, ChainModel, MixedGraph, ModelParameter};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random chain graph with shuffled vertex order; blocks of one to three
/// connected vertices, directed edges from earlier to later blocks.
pub fn random_chain_graph<R: Rng>(rng: &mut R, n: usize) -> MixedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let name = |v: usize| format!("v{v}");
    let mut g = MixedGraph::new(order.iter().map(|&v| name(v))).unwrap();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < n {
        let size = rng.random_range(1..=3usize).min(n - i);
        blocks.push((i..i + size).collect());
        i += size;
    }
    for block in &blocks {
        for k in 1..block.len() {
            let j = rng.random_range(0..k);
            g.add_undirected(&name(block[k]), &name(block[j])).unwrap();
        }
        if block.len() == 3 && rng.random_bool(0.5) {
            let (a, c) = (name(block[0]), name(block[2]));
            let (u, w) = (g.vertex(&a).unwrap(), g.vertex(&c).unwrap());
            if !g.has_undirected(u, w) {
                g.add_undirected(&a, &c).unwrap();
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

pub fn random_theta<R: Rng>(model: &ChainModel, rng: &mut R) -> ModelParameter {
    let blocks = model
        .layouts
        .iter()
        .map(|l| {
            let beta = Vector::from_fn(l.p(), |_, _| rng.random_range(-1.0..1.0));
            let mut omega = Vector::zeros(l.q());
            let mut row_sum = vec![0.0; l.size()];
            for (k, &(i, j)) in l.omega_entries.iter().enumerate() {
                if i != j {
                    let x: f64 = rng.random_range(-0.8..0.8);
                    omega[k] = x;
                    row_sum[i] += x.abs();
                    row_sum[j] += x.abs();
                }
            }
            for (i, s) in row_sum.iter().enumerate() {
                omega[i] = s + rng.random_range(0.5..1.5);
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

/// Two correlated parents feeding a three-vertex path `a -- b -- c`.
pub fn path_model() -> ChainModel {
    let mut g = MixedGraph::new(["u1", "u2", "a", "b", "c"]).unwrap();
    g.add_undirected("u1", "u2").unwrap();
    g.add_undirected("a", "b").unwrap();
    g.add_undirected("b", "c").unwrap();
    for (p, c) in [("u1", "a"), ("u1", "b"), ("u2", "b"), ("u2", "c")] {
        g.add_directed(p, c).unwrap();
    }
    ChainModel::new(g).unwrap()
}

/// Four-cycle component with two parents.
pub fn cycle_model() -> ChainModel {
    let mut g = MixedGraph::new(["p1", "p2", "a", "b", "c", "d"]).unwrap();
    for (x, y) in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")] {
        g.add_undirected(x, y).unwrap();
    }
    for (p, c) in [("p1", "a"), ("p1", "c"), ("p2", "b"), ("p2", "d")] {
        g.add_directed(p, c).unwrap();
    }
    ChainModel::new(g).unwrap()
}
