//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::path::Path;

use ampcg::graph_file;
use ampcg_core::linalg::{Mat, Vector};
use ampcg_core::param::BlockLayout;
use ampcg_core::{BlockParameter, ChainModel, MixedGraph, ModelParameter};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn university_model() -> ChainModel {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/university.graph");
    ChainModel::new(graph_file::read(&path).unwrap()).unwrap()
}

/// Parameter for the university graph: the middle component carries the
/// published MLE values, the other two are arbitrary but non-trivial.
pub fn university_theta(model: &ChainModel) -> ModelParameter {
    let g = &model.graph;
    let v = |s: &str| g.vertex(s).unwrap();
    let mut theta = ModelParameter::identity(model);
    let fill = |theta: &mut ModelParameter, c: usize, betas: &[(&str, &str, f64)], omegas: &[(&str, &str, f64)]| {
        let l = &model.layouts[c];
        for &(child, parent, x) in betas {
            let k = l
                .beta_entries
                .iter()
                .position(|&(i, j)| l.vertices[i] == v(child) && l.parents[j] == v(parent))
                .unwrap();
            theta.blocks[c].beta[k] = x;
        }
        for &(a, b, x) in omegas {
            let k = l
                .omega_entries
                .iter()
                .position(|&(i, j)| {
                    let (p, q) = (l.vertices[i], l.vertices[j]);
                    (p, q) == (v(a), v(b)) || (p, q) == (v(b), v(a))
                })
                .unwrap();
            theta.blocks[c].omega[k] = x;
        }
    };
    fill(
        &mut theta,
        0,
        &[],
        &[
            ("spend", "spend", 1.8),
            ("strat", "strat", 1.4),
            ("salar", "salar", 2.1),
            ("spend", "strat", -0.5),
            ("spend", "salar", -0.9),
            ("strat", "salar", 0.3),
        ],
    );
    fill(
        &mut theta,
        1,
        &[
            ("pacc", "salar", -0.53),
            ("rejr", "salar", 0.26),
            ("rejr", "spend", 0.30),
            ("top10", "spend", 0.98),
            ("top10", "strat", 0.44),
            ("tstsc", "salar", 0.26),
            ("tstsc", "spend", 0.49),
        ],
        &[
            ("pacc", "pacc", 1.46),
            ("rejr", "rejr", 1.64),
            ("top10", "top10", 2.99),
            ("tstsc", "tstsc", 3.39),
            ("pacc", "rejr", -0.33),
            ("pacc", "top10", -0.16),
            ("rejr", "tstsc", -0.65),
            ("top10", "tstsc", -1.76),
        ],
    );
    fill(
        &mut theta,
        2,
        &[("apgra", "salar", 0.31), ("apgra", "tstsc", 0.42), ("apgra", "pacc", -0.17)],
        &[("apgra", "apgra", 2.4)],
    );
    theta
}

/// Random chain graph: consecutive blocks of one to three vertices, each
/// connected, with directed edges only from earlier to later blocks. The
/// vertex order in the graph is shuffled.
pub fn random_chain_graph<R: Rng>(rng: &mut R, n: usize) -> MixedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let name = |v: usize| format!("x{v}");
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
        for a in 0..block.len() {
            for b in a + 1..block.len() {
                let (u, w) = (g.vertex(&name(block[a])).unwrap(), g.vertex(&name(block[b])).unwrap());
                if !g.has_undirected(u, w) && rng.random_bool(0.5) {
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

/// Random parameter with diagonally dominant concentration blocks.
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

/// Random symmetric positive-definite matrix `A A' / m + 0.1 I`.
pub fn random_spd<R: Rng>(rng: &mut R, k: usize) -> Mat {
    let m = k + 3;
    let a = Mat::from_fn(k, m, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() / m as f64 + Mat::identity(k, k) * 0.1
}

/// `B` (tau x pa) and `Omega` (tau x tau) built from the layout's entry lists.
pub fn block_matrices(l: &BlockLayout, beta: &[f64], omega: &[f64]) -> (Mat, Mat) {
    let mut b = Mat::zeros(l.size(), l.parents.len());
    for (&(i, j), &x) in l.beta_entries.iter().zip(beta) {
        b[(i, j)] = x;
    }
    let mut om = Mat::zeros(l.size(), l.size());
    for (&(i, j), &x) in l.omega_entries.iter().zip(omega) {
        om[(i, j)] = x;
        om[(j, i)] = x;
    }
    (b, om)
}

/// Moments of one component, taken directly from a full covariance.
pub fn moments(l: &BlockLayout, s: &Mat) -> (Mat, Mat, Mat) {
    let pick = |rows: &[usize], cols: &[usize]| Mat::from_fn(rows.len(), cols.len(), |i, j| s[(rows[i], cols[j])]);
    (
        pick(&l.vertices, &l.vertices),
        pick(&l.vertices, &l.parents),
        pick(&l.parents, &l.parents),
    )
}

fn residual(s_tt: &Mat, s_tp: &Mat, s_pp: &Mat, b: &Mat) -> Mat {
    s_tt - b * s_tp.transpose() - s_tp * b.transpose() + b * s_pp * b.transpose()
}

/// Per-observation block log-likelihood `1/2 log|Omega| - 1/2 tr(Omega S(beta))`.
pub fn oracle_loglik(l: &BlockLayout, s: &Mat, beta: &[f64], omega: &[f64]) -> f64 {
    let (s_tt, s_tp, s_pp) = moments(l, s);
    let (b, om) = block_matrices(l, beta, omega);
    let r = residual(&s_tt, &s_tp, &s_pp, &b);
    0.5 * om.determinant().ln() - 0.5 * (&om * r).trace()
}

/// Max-norms of the two sets of likelihood equations
/// `P'vec(Omega (S_tp - B S_pp)) = 0` and `Q'vec(Omega^{-1} - S(beta)) = 0`.
pub fn likelihood_equations(l: &BlockLayout, s: &Mat, p: &BlockParameter) -> (f64, f64) {
    let (s_tt, s_tp, s_pp) = moments(l, s);
    let (b, om) = block_matrices(l, p.beta.as_slice(), p.omega.as_slice());
    let m = &om * (&s_tp - &b * &s_pp);
    let eq_beta = l.beta_entries.iter().map(|&(i, j)| m[(i, j)].abs()).fold(0.0, f64::max);
    let d = om.try_inverse().unwrap() - residual(&s_tt, &s_tp, &s_pp, &b);
    let eq_omega = l
        .omega_entries
        .iter()
        .map(|&(i, j)| if i == j { d[(i, i)].abs() } else { 2.0 * d[(i, j)].abs() })
        .fold(0.0, f64::max);
    (eq_beta, eq_omega)
}

/// Maximizes `1/2 log|K| - 1/2 tr(K T)` over concentration matrices with
/// zeros off `edges` by damped Newton iteration on the free entries.
pub fn newton_concentration(target: &Mat, edges: &[(usize, usize)]) -> Mat {
    let k = target.nrows();
    let free: Vec<(usize, usize)> = (0..k).map(|i| (i, i)).chain(edges.iter().copied()).collect();
    let basis: Vec<Mat> = free
        .iter()
        .map(|&(i, j)| {
            let mut e = Mat::zeros(k, k);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            e
        })
        .collect();
    let objective = |x: &Mat| match x.clone().cholesky() {
        Some(c) => {
            let logdet: f64 = c.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            0.5 * logdet - 0.5 * (x * target).trace()
        }
        None => f64::NEG_INFINITY,
    };
    let mut kk = Mat::from_diagonal(&target.diagonal().map(|d| 1.0 / d));
    for _ in 0..200 {
        let sigma = kk.clone().try_inverse().unwrap();
        let diff = &sigma - target;
        let grad = Vector::from_iterator(free.len(), free.iter().map(|&(i, j)| if i == j { 0.5 * diff[(i, i)] } else { diff[(i, j)] }));
        if grad.amax() < 1e-15 {
            break;
        }
        let se: Vec<Mat> = basis.iter().map(|e| &sigma * e).collect();
        let hess = Mat::from_fn(free.len(), free.len(), |a, b| -0.5 * (&se[a] * &se[b]).trace());
        let step = -hess.try_inverse().unwrap() * &grad;
        let mut t = 1.0;
        let f0 = objective(&kk);
        loop {
            let mut cand = kk.clone();
            for (x, e) in step.iter().zip(&basis) {
                cand += e * (t * x);
            }
            if objective(&cand) >= f0 - 1e-15 || t < 1e-12 {
                kk = cand;
                break;
            }
            t *= 0.5;
        }
    }
    kk
}
