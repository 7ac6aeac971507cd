//! Iterative proportional fitting for Gaussian graphical models: the MLE
//! of a concentration matrix with a prescribed zero pattern.

use alloc::vec::Vec;

use crate::cliques::{adjacency_from_cliques, perfect_clique_sequence};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, spd_inverse, submatrix, symmetrize, Mat};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpfConfig {
    /// Largest tolerated |fitted - target| over diagonal and edge entries.
    pub tolerance: f64,
    /// Maximum number of full sweeps over the cliques.
    pub max_iterations: usize,
}

impl Default for IpfConfig {
    fn default() -> Self {
        IpfConfig {
            tolerance: 1e-10,
            max_iterations: 5000,
        }
    }
}

impl IpfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::Config(alloc::format!(
                "IPF needs tolerance > 0 and max_iterations >= 1, got {} and {}",
                self.tolerance,
                self.max_iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpfResult {
    pub concentration: Mat,
    /// Full clique sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    pub final_gap: f64,
}

fn moment_gap(k: &Mat, target: &Mat, cliques: &[Vec<usize>]) -> Result<f64> {
    let sigma = spd_inverse(k).ok_or(Error::NotPositiveDefinite("IPF iterate"))?;
    let mut gap: f64 = 0.0;
    for c in cliques {
        for &i in c {
            for &j in c {
                gap = gap.max((sigma[(i, j)] - target[(i, j)]).abs());
            }
        }
    }
    Ok(gap)
}

/// Fits the concentration matrix whose zero pattern is given by `cliques`
/// (pairs not sharing a clique are zero) so that the implied covariance
/// matches `target` on every clique.
///
/// Starts from `diag(1 / target_vv)` and sweeps the cliques in the given
/// order; each clique update is the exact conditional maximiser
/// `K_cc <- (T_cc)^{-1} + K_cr K_rr^{-1} K_rc`.
pub fn ipf_fit(target: &Mat, cliques: &[Vec<usize>], cfg: &IpfConfig) -> Result<IpfResult> {
    cfg.validate()?;
    let k = target.nrows();
    if target.ncols() != k {
        return Err(Error::Dimension("IPF target must be square".into()));
    }
    if cholesky(target).is_none() {
        return Err(Error::NotPositiveDefinite("IPF target"));
    }
    let mut covered = alloc::vec![false; k];
    for c in cliques {
        for &v in c {
            if v >= k {
                return Err(Error::Dimension(alloc::format!("clique member {v} out of range")));
            }
            covered[v] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(Error::Config("cliques must cover every vertex".into()));
    }

    // per-clique pieces that do not change across sweeps
    let prepared: Vec<(Vec<usize>, Vec<usize>, Mat)> = cliques
        .iter()
        .map(|c| {
            let rest: Vec<usize> = (0..k).filter(|v| !c.contains(v)).collect();
            let t_inv = spd_inverse(&submatrix(target, c, c)).ok_or(Error::NotPositiveDefinite("clique margin"))?;
            Ok((c.clone(), rest, t_inv))
        })
        .collect::<Result<_>>()?;

    let mut conc = Mat::from_diagonal(&target.diagonal().map(|x| 1.0 / x));
    let mut gap = moment_gap(&conc, target, cliques)?;
    let mut iterations = 0;
    while gap > cfg.tolerance && iterations < cfg.max_iterations {
        for (c, rest, t_inv) in &prepared {
            let mut block = t_inv.clone();
            if !rest.is_empty() {
                let k_cr = submatrix(&conc, c, rest);
                let k_rr = submatrix(&conc, rest, rest);
                let chol = cholesky(&k_rr).ok_or(Error::NotPositiveDefinite("IPF iterate"))?;
                block += &k_cr * chol.solve(&k_cr.transpose());
            }
            symmetrize(&mut block);
            for (a, &i) in c.iter().enumerate() {
                for (b, &j) in c.iter().enumerate() {
                    conc[(i, j)] = block[(a, b)];
                }
            }
        }
        iterations += 1;
        gap = moment_gap(&conc, target, cliques)?;
    }
    Ok(IpfResult {
        concentration: conc,
        iterations,
        converged: gap <= cfg.tolerance,
        final_gap: gap,
    })
}

/// Closed-form MLE for a decomposable pattern: padded inverses of the
/// clique margins minus padded inverses of the separator margins, taken
/// along a perfect sequence of cliques. `None` if the pattern is not
/// chordal.
pub fn ipf_closed_form(target: &Mat, cliques: &[Vec<usize>]) -> Option<Mat> {
    let k = target.nrows();
    let seq = perfect_clique_sequence(&adjacency_from_cliques(k, cliques))?;
    let mut conc = Mat::zeros(k, k);
    let mut seen: Vec<usize> = Vec::new();
    for c in &seq {
        add_padded(&mut conc, target, c, 1.0)?;
        let sep: Vec<usize> = c.iter().copied().filter(|v| seen.contains(v)).collect();
        if !sep.is_empty() {
            add_padded(&mut conc, target, &sep, -1.0)?;
        }
        seen.extend(c.iter().copied().filter(|v| !seen.contains(v)).collect::<Vec<_>>());
    }
    symmetrize(&mut conc);
    Some(conc)
}

fn add_padded(conc: &mut Mat, target: &Mat, set: &[usize], sign: f64) -> Option<()> {
    let inv = spd_inverse(&submatrix(target, set, set))?;
    for (a, &i) in set.iter().enumerate() {
        for (b, &j) in set.iter().enumerate() {
            conc[(i, j)] += sign * inv[(a, b)];
        }
    }
    Some(())
}
