//! Sampling from a Gaussian AMP chain graph model and Wald-interval
//! coverage experiments.
//!
//! The generator is ChaCha8 (`rand_chacha`), seeded with `seed_from_u64`;
//! replication `r` of an experiment uses stream `r` of the same key.
//! Observations are drawn one at a time, components in chain order, each
//! as `X_tau = B_tau X_pa + L_tau Z` with `L_tau L_tau' = Omega_tau^{-1}`.

use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fit::{fit_model, FitConfig};
use crate::likelihood::SampleMoments;
use crate::linalg::{cholesky, spd_inverse, Mat};
use crate::param::{ChainModel, ModelParameter};

/// Two-sided 95% normal quantile.
pub const WALD_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub theta: ModelParameter,
    pub n: usize,
    pub seed: u64,
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `|V| x n` data matrix drawn from the model.
pub fn sample(model: &ChainModel, spec: &SimSpec) -> Result<Mat> {
    sample_with(model, &spec.theta, spec.n, &mut rng_for(spec.seed, 0))
}

pub fn sample_with<R: RngCore>(model: &ChainModel, theta: &ModelParameter, n: usize, rng: &mut R) -> Result<Mat> {
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    if theta.blocks.len() != model.layouts.len() {
        return Err(Error::Dimension("parameter does not match the model".into()));
    }
    let mut factors = Vec::with_capacity(model.layouts.len());
    for (layout, block) in model.layouts.iter().zip(&theta.blocks) {
        let (b, omega) = layout.assemble(block)?;
        let cov = spd_inverse(&omega).ok_or(Error::OutOfDomain {
            component: layout.component,
        })?;
        let l = cholesky(&cov)
            .ok_or(Error::OutOfDomain {
                component: layout.component,
            })?
            .unpack();
        factors.push((b, l));
    }

    let mut data = Mat::zeros(model.n_vertices(), n);
    let mut z: Vec<f64> = Vec::new();
    for col in 0..n {
        for (layout, (b, l)) in model.layouts.iter().zip(&factors) {
            let k = layout.size();
            z.clear();
            z.extend((0..k).map(|_| -> f64 { StandardNormal.sample(rng) }));
            for i in 0..k {
                let mut x = 0.0;
                for (j, &p) in layout.parents.iter().enumerate() {
                    x += b[(i, j)] * data[(p, col)];
                }
                for (j, zj) in z.iter().enumerate().take(i + 1) {
                    x += l[(i, j)] * zj;
                }
                data[(layout.vertices[i], col)] = x;
            }
        }
    }
    Ok(data)
}

/// Moments `X X' / n` of a sample (no centring: the model has mean zero).
pub fn sample_moments(model: &ChainModel, spec: &SimSpec) -> Result<SampleMoments> {
    let x = sample(model, spec)?;
    SampleMoments::from_data(&x, model.graph.labels().to_vec(), false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Beta,
    Omega,
}

/// Accumulated results for one scalar parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterCoverage {
    pub component: usize,
    pub kind: ParamKind,
    /// Position within the block's beta or omega vector.
    pub index: usize,
    pub truth: f64,
    pub covered: usize,
    pub count: usize,
    pub sum_error: f64,
    pub sum_sq_error: f64,
    pub sum_se: f64,
}

impl ParameterCoverage {
    pub fn coverage(&self) -> f64 {
        self.covered as f64 / self.count as f64
    }

    pub fn bias(&self) -> f64 {
        self.sum_error / self.count as f64
    }

    /// Monte-Carlo standard error of [`bias`](Self::bias).
    pub fn bias_std_error(&self) -> f64 {
        let c = self.count as f64;
        let var = (self.sum_sq_error - self.sum_error * self.sum_error / c) / (c - 1.0).max(1.0);
        libm::sqrt(var.max(0.0) / c)
    }

    pub fn rmse(&self) -> f64 {
        libm::sqrt(self.sum_sq_error / self.count as f64)
    }

    pub fn mean_se(&self) -> f64 {
        self.sum_se / self.count as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub replications: usize,
    /// Replications whose fit converged and were used.
    pub used: usize,
    /// Replications excluded because the fit failed or did not converge.
    pub excluded: usize,
    pub parameters: Vec<ParameterCoverage>,
}

/// Repeatedly samples from `theta0`, fits the model and records whether
/// each true parameter falls inside its `+-1.96 SE` interval.
pub fn coverage_experiment(
    model: &ChainModel,
    theta0: &ModelParameter,
    n: usize,
    replications: usize,
    seed: u64,
    cfg: &FitConfig,
) -> Result<CoverageReport> {
    let mut parameters = Vec::new();
    for (layout, block) in model.layouts.iter().zip(&theta0.blocks) {
        layout.assemble(block)?;
        let entries = block
            .beta
            .iter()
            .enumerate()
            .map(|(i, &t)| (ParamKind::Beta, i, t))
            .chain(block.omega.iter().enumerate().map(|(i, &t)| (ParamKind::Omega, i, t)));
        for (kind, index, truth) in entries {
            parameters.push(ParameterCoverage {
                component: layout.component,
                kind,
                index,
                truth,
                covered: 0,
                count: 0,
                sum_error: 0.0,
                sum_sq_error: 0.0,
                sum_se: 0.0,
            });
        }
    }
    let mut report = CoverageReport {
        replications,
        used: 0,
        excluded: 0,
        parameters,
    };
    for rep in 0..replications {
        let mut rng = rng_for(seed, rep as u64);
        let x = sample_with(model, theta0, n, &mut rng)?;
        let s = SampleMoments::from_data(&x, model.graph.labels().to_vec(), false)?;
        let fit = match fit_model(&s, model, cfg) {
            Ok(f) if f.converged() => f,
            _ => {
                report.excluded += 1;
                continue;
            }
        };
        report.used += 1;
        let mut slot = report.parameters.iter_mut();
        for b in &fit.blocks {
            let se = b.standard_errors.as_ref().expect("fit_model fills standard errors");
            let pairs = b
                .params
                .beta
                .iter()
                .zip(se.beta.iter())
                .chain(b.params.omega.iter().zip(se.omega.iter()));
            for (&est, &se) in pairs {
                let p = slot.next().expect("parameter layout matches");
                let err = est - p.truth;
                p.count += 1;
                p.sum_error += err;
                p.sum_sq_error += err * err;
                p.sum_se += se;
                if err.abs() <= WALD_Z * se {
                    p.covered += 1;
                }
            }
        }
    }
    Ok(report)
}
