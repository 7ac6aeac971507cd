//! Block log-likelihood, its derivatives, the Fisher information and the
//! deviance.
//!
//! Everything is on the per-observation scale: the block log-likelihood is
//! `1/2 log|Omega| - 1/2 tr(Omega S(beta))` with the `2 pi` constant
//! dropped. The score is the true gradient of that function, so the
//! omega part carries the factor 1/2.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{log_det_spd, spd_inverse, submatrix, symmetrize, trace_product, Mat, Vector};
use crate::param::{model_dimension, sigma_from_params, BlockLayout, BlockParameter, ChainModel, ModelParameter};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Second moments of centred data: `S = X X' / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    pub cov: Mat,
    pub n: usize,
    pub labels: Vec<String>,
}

impl SampleMoments {
    pub fn new(cov: Mat, n: usize, labels: Vec<String>) -> Result<Self> {
        let v = cov.nrows();
        if cov.ncols() != v || labels.len() != v {
            return Err(Error::Dimension(alloc::format!(
                "covariance is {}x{} with {} labels",
                cov.nrows(),
                cov.ncols(),
                labels.len()
            )));
        }
        let scale = cov.amax().max(1.0);
        for i in 0..v {
            if cov[(i, i)] < 0.0 {
                return Err(Error::Dimension(alloc::format!("negative variance at {}", labels[i])));
            }
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::Dimension(alloc::format!(
                        "covariance not symmetric at ({}, {})",
                        labels[i],
                        labels[j]
                    )));
                }
            }
        }
        let mut cov = cov;
        symmetrize(&mut cov);
        Ok(SampleMoments { cov, n, labels })
    }

    /// Moments of a `|V| x n` data matrix (variables in rows). With
    /// `center`, row means are subtracted first.
    pub fn from_data(data: &Mat, labels: Vec<String>, center: bool) -> Result<Self> {
        let n = data.ncols();
        if n == 0 {
            return Err(Error::Dimension("no observations".into()));
        }
        let mut x = data.clone();
        if center {
            for mut row in x.row_iter_mut() {
                let mean = row.sum() / n as f64;
                row.add_scalar_mut(-mean);
            }
        }
        let cov = (&x * x.transpose()) / n as f64;
        Self::new(cov, n, labels)
    }

    pub fn block(&self, layout: &BlockLayout) -> BlockMoments {
        BlockMoments {
            s_tt: submatrix(&self.cov, &layout.vertices, &layout.vertices),
            s_tp: submatrix(&self.cov, &layout.vertices, &layout.parents),
            s_pp: submatrix(&self.cov, &layout.parents, &layout.parents),
        }
    }
}

/// The three sub-blocks of `S` one component needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMoments {
    pub s_tt: Mat,
    pub s_tp: Mat,
    pub s_pp: Mat,
}

/// Gradient of the block log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockScore {
    pub d_beta: Vector,
    pub d_omega: Vector,
}

impl BlockScore {
    pub fn max_norm(&self) -> f64 {
        self.d_beta.amax().max(self.d_omega.amax())
    }

    /// Max-norm of the likelihood equations themselves. The omega equations
    /// are `Q'vec(Omega^{-1} - S(beta)) = 2 d_omega`, so this bounds
    /// [`max_norm`](Self::max_norm) from above.
    pub fn equation_norm(&self) -> f64 {
        self.d_beta.amax().max(2.0 * self.d_omega.amax())
    }
}

/// Second derivatives of the block log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianBlocks {
    pub beta_beta: Mat,
    pub omega_omega: Mat,
    pub beta_omega: Mat,
}

impl HessianBlocks {
    pub fn full(&self) -> Mat {
        let (p, q) = (self.beta_beta.nrows(), self.omega_omega.nrows());
        let mut h = Mat::zeros(p + q, p + q);
        h.view_mut((0, 0), (p, p)).copy_from(&self.beta_beta);
        h.view_mut((p, p), (q, q)).copy_from(&self.omega_omega);
        h.view_mut((0, p), (p, q)).copy_from(&self.beta_omega);
        h.view_mut((p, 0), (q, p)).copy_from(&self.beta_omega.transpose());
        h
    }
}

/// `S(beta) = S_tt - B S_pt - S_tp B' + B S_pp B'`.
pub fn residual_cov(m: &BlockMoments, layout: &BlockLayout, beta: &Vector) -> Mat {
    if layout.parents.is_empty() {
        return m.s_tt.clone();
    }
    let b = layout.b_matrix(beta);
    let cross = &b * m.s_tp.transpose();
    let mut r = &m.s_tt - &cross - cross.transpose() + &b * &m.s_pp * b.transpose();
    symmetrize(&mut r);
    r
}

fn omega_checked(layout: &BlockLayout, block: &BlockParameter) -> Result<Mat> {
    Ok(layout.assemble(block)?.1)
}

pub fn block_loglik(m: &BlockMoments, layout: &BlockLayout, block: &BlockParameter) -> Result<f64> {
    let omega = omega_checked(layout, block)?;
    let logdet = log_det_spd(&omega).ok_or(Error::OutOfDomain {
        component: layout.component,
    })?;
    let s = residual_cov(m, layout, &block.beta);
    Ok(0.5 * logdet - 0.5 * trace_product(&omega, &s))
}

pub fn score(m: &BlockMoments, layout: &BlockLayout, block: &BlockParameter) -> Result<BlockScore> {
    let omega = omega_checked(layout, block)?;
    let omega_inv = spd_inverse(&omega).ok_or(Error::OutOfDomain {
        component: layout.component,
    })?;
    let d_beta = if layout.p() == 0 {
        Vector::zeros(0)
    } else {
        // vec(Omega S_tp) - (S_pp (x) Omega) vec(B) = vec(Omega (S_tp - B S_pp))
        let b = layout.b_matrix(&block.beta);
        let g = &omega * (&m.s_tp - &b * &m.s_pp);
        Vector::from_iterator(layout.p(), layout.beta_entries.iter().map(|&(i, j)| g[(i, j)]))
    };
    let diff = omega_inv - residual_cov(m, layout, &block.beta);
    let d_omega = Vector::from_iterator(
        layout.q(),
        layout
            .omega_entries
            .iter()
            .map(|&(i, j)| if i == j { 0.5 * diff[(i, i)] } else { diff[(i, j)] }),
    );
    Ok(BlockScore { d_beta, d_omega })
}

pub fn hessian_blocks(m: &BlockMoments, layout: &BlockLayout, block: &BlockParameter) -> Result<HessianBlocks> {
    let omega = omega_checked(layout, block)?;
    let omega_inv = spd_inverse(&omega).ok_or(Error::OutOfDomain {
        component: layout.component,
    })?;
    let p_map = &layout.maps.p_map;
    let q_map = &layout.maps.q_map;
    let beta_beta = -(p_map.transpose() * m.s_pp.kronecker(&omega) * p_map);
    let omega_omega = -0.5 * (q_map.transpose() * omega_inv.kronecker(&omega_inv) * q_map);
    let b = layout.b_matrix(&block.beta);
    let inner = m.s_tp.transpose() - &m.s_pp * b.transpose();
    let eye = Mat::identity(layout.size(), layout.size());
    let beta_omega = p_map.transpose() * inner.kronecker(&eye) * q_map;
    Ok(HessianBlocks {
        beta_beta,
        omega_omega,
        beta_omega,
    })
}

/// Per-observation Fisher information of one block. `sigma_pp` is the
/// covariance of the component's parents (the model's or the sample's);
/// the off-diagonal block is identically zero.
pub fn fisher_info_block(layout: &BlockLayout, block: &BlockParameter, sigma_pp: &Mat) -> Result<Mat> {
    let omega = omega_checked(layout, block)?;
    let omega_inv = spd_inverse(&omega).ok_or(Error::OutOfDomain {
        component: layout.component,
    })?;
    let (p, q) = (layout.p(), layout.q());
    let p_map = &layout.maps.p_map;
    let q_map = &layout.maps.q_map;
    let mut info = Mat::zeros(p + q, p + q);
    info.view_mut((0, 0), (p, p))
        .copy_from(&(p_map.transpose() * sigma_pp.kronecker(&omega) * p_map));
    info.view_mut((p, p), (q, q))
        .copy_from(&(0.5 * (q_map.transpose() * omega_inv.kronecker(&omega_inv) * q_map)));
    Ok(info)
}

/// Full-data log-likelihood including the Gaussian constant.
pub fn model_loglik(model: &ChainModel, theta: &ModelParameter, s: &SampleMoments) -> Result<f64> {
    let mut total = 0.0;
    for (layout, block) in model.layouts.iter().zip(&theta.blocks) {
        total += block_loglik(&s.block(layout), layout, block)?;
    }
    let n = s.n as f64;
    Ok(n * total - 0.5 * n * model.n_vertices() as f64 * LN_2PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviance {
    pub value: f64,
    pub df: usize,
}

/// `n [log|Sigma| - log|S| + tr(Sigma^{-1} S) - |V|]` at `Sigma = Sigma(theta)`.
pub fn deviance(model: &ChainModel, theta: &ModelParameter, s: &SampleMoments) -> Result<Deviance> {
    let sigma = sigma_from_params(model, theta)?;
    deviance_of_sigma(model, &sigma, s)
}

pub fn deviance_of_sigma(model: &ChainModel, sigma: &Mat, s: &SampleMoments) -> Result<Deviance> {
    let logdet_s = log_det_spd(&s.cov).ok_or_else(|| Error::Singular("sample covariance".into()))?;
    let logdet_sigma = log_det_spd(sigma).ok_or(Error::NotPositiveDefinite("fitted covariance"))?;
    let sigma_inv = spd_inverse(sigma).ok_or(Error::NotPositiveDefinite("fitted covariance"))?;
    let v = model.n_vertices() as f64;
    let value = s.n as f64 * (logdet_sigma - logdet_s + trace_product(&sigma_inv, &s.cov) - v);
    Ok(Deviance {
        value,
        df: model_dimension(model).df,
    })
}
