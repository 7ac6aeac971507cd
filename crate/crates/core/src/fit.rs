//! Estimation drivers: the GLS step, the two-step estimator and the
//! alternating GLS / IPF algorithm, plus standard errors and assembly of
//! the full-model fit.
//!
//! Each component is fitted on its own. The alternation is
//!
//! ```text
//! beta  <- argmax_beta  l(beta, omega)   (closed-form GLS)
//! omega <- argmax_omega l(beta, omega)   (IPF on S(beta))
//! ```
//!
//! Both half-steps are exact partial maximisers, so the log-likelihood is
//! non-decreasing along the iterates and every accumulation point solves
//! the score equations. The driver stops on the score norm.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ipf::{ipf_fit, IpfConfig};
use crate::likelihood::{
    block_loglik, deviance_of_sigma, fisher_info_block, model_loglik, residual_cov, score, BlockMoments,
    SampleMoments,
};
use crate::linalg::{cholesky, spd_inverse, submatrix, Mat, Vector};
use crate::param::{sigma_from_params, BlockLayout, BlockParameter, ChainModel, ModelParameter};

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaInit {
    Identity,
    /// `diag(1 / S_vv)` over the component.
    DiagonalInverseVariance,
    /// One omega vector per component.
    User(Vec<Vector>),
}

/// Which covariance supplies `Sigma_{pa,pa}` in the Fisher information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InformationSource {
    /// The fitted model covariance `Sigma(theta_hat)`.
    Model,
    /// The sample covariance `S`.
    Sample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Stop once both sets of likelihood equations hold to this in max-norm.
    pub outer_tolerance: f64,
    pub max_outer_iterations: usize,
    pub omega_init: OmegaInit,
    pub ipf: IpfConfig,
    pub information: InformationSource,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            outer_tolerance: 1e-8,
            max_outer_iterations: 10_000,
            omega_init: OmegaInit::Identity,
            ipf: IpfConfig::default(),
            information: InformationSource::Model,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.outer_tolerance > 0.0) || self.max_outer_iterations == 0 {
            return Err(Error::Config(alloc::format!(
                "outer tolerance must be positive and max iterations >= 1, got {} and {}",
                self.outer_tolerance,
                self.max_outer_iterations
            )));
        }
        self.ipf.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Per-observation block log-likelihood after the (GLS, IPF) pair.
    pub loglik: f64,
    pub score_norm: f64,
    /// Max-norm of the parameter change over the pair.
    pub step_norm: f64,
    pub ipf_sweeps: usize,
    pub ipf_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    /// Allowed decrease between consecutive log-likelihood values.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardErrors {
    pub beta: Vector,
    pub omega: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockFit {
    pub params: BlockParameter,
    /// Filled in by [`fit_model`] once the fitted covariance is known.
    pub standard_errors: Option<StandardErrors>,
    pub trace: IterationTrace,
    pub converged: bool,
}

impl BlockFit {
    pub fn iterations(&self) -> usize {
        self.trace.records.len()
    }

    pub fn score_norm(&self) -> f64 {
        self.trace.records.last().map_or(f64::INFINITY, |r| r.score_norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub blocks: Vec<BlockFit>,
    pub theta: ModelParameter,
    pub sigma_hat: Mat,
    /// Full-data log-likelihood including the Gaussian constant.
    pub loglik: f64,
    pub deviance: f64,
    pub df: usize,
    pub n: usize,
}

impl ModelFit {
    pub fn converged(&self) -> bool {
        self.blocks.iter().all(|b| b.converged)
    }
}

/// Per-component outcome when at least one component could not be fitted.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} of {} components failed to fit", self.failures().count(), self.blocks.len())]
pub struct PartialFit {
    pub blocks: Vec<Result<BlockFit>>,
}

impl PartialFit {
    pub fn failures(&self) -> impl Iterator<Item = (usize, &Error)> {
        self.blocks
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.as_ref().err().map(|e| (i, e)))
    }
}

/// Rank condition `n >= |tau| + |pa(tau)|`.
pub fn check_rank_condition(layout: &BlockLayout, n: usize) -> Result<()> {
    let required = layout.size() + layout.parents.len();
    if n < required {
        return Err(Error::RankCondition {
            component: layout.component,
            n,
            required,
        });
    }
    Ok(())
}

fn rank_failure(layout: &BlockLayout, what: &str) -> Error {
    Error::Singular(alloc::format!(
        "{what} in component {} (rank condition n >= |tau| + |pa(tau)| = {} may be violated)",
        layout.component,
        layout.size() + layout.parents.len()
    ))
}

/// Closed-form maximiser over beta at fixed omega:
/// `beta = {P'[S_pp (x) Omega]P}^{-1} P' vec(Omega S_tp)`.
pub fn gls_step(m: &BlockMoments, layout: &BlockLayout, omega: &Vector) -> Result<Vector> {
    if layout.p() == 0 {
        return Ok(Vector::zeros(0));
    }
    let om = layout.omega_matrix(omega);
    if cholesky(&om).is_none() {
        return Err(Error::OutOfDomain {
            component: layout.component,
        });
    }
    let p_map = &layout.maps.p_map;
    let normal = p_map.transpose() * m.s_pp.kronecker(&om) * p_map;
    let rhs = p_map.transpose() * crate::linalg::vec(&(&om * &m.s_tp));
    let chol = cholesky(&normal).ok_or_else(|| rank_failure(layout, "singular GLS normal equations"))?;
    Ok(chol.solve(&rhs))
}

/// Per-vertex least squares on each vertex's own parents.
pub fn ols_beta(m: &BlockMoments, layout: &BlockLayout) -> Result<Vector> {
    let mut b = Mat::zeros(layout.size(), layout.parents.len());
    for i in 0..layout.size() {
        let cols: Vec<usize> = layout
            .beta_entries
            .iter()
            .filter(|&&(r, _)| r == i)
            .map(|&(_, c)| c)
            .collect();
        if cols.is_empty() {
            continue;
        }
        let s_pp = submatrix(&m.s_pp, &cols, &cols);
        let s_vp = submatrix(&m.s_tp, &[i], &cols);
        let chol = cholesky(&s_pp).ok_or_else(|| rank_failure(layout, "singular parent covariance"))?;
        let coef = chol.solve(&s_vp.transpose());
        for (k, &c) in cols.iter().enumerate() {
            b[(i, c)] = coef[k];
        }
    }
    Ok(layout.beta_from_matrix(&b))
}

/// IPF on the residual covariance at `beta`.
pub fn omega_step(m: &BlockMoments, layout: &BlockLayout, beta: &Vector, cfg: &IpfConfig) -> Result<(Vector, usize, bool)> {
    let target = residual_cov(m, layout, beta);
    let r = ipf_fit(&target, &layout.cliques, cfg).map_err(|e| match e {
        Error::NotPositiveDefinite(_) => rank_failure(layout, "singular residual covariance"),
        other => other,
    })?;
    Ok((layout.omega_from_matrix(&r.concentration), r.iterations, r.converged))
}

/// Regress each vertex on its own parents, then fit the undirected model
/// of the component to the residual covariance.
pub fn two_step_estimate(m: &BlockMoments, layout: &BlockLayout, ipf: &IpfConfig) -> Result<BlockParameter> {
    let beta = ols_beta(m, layout)?;
    let (omega, _, _) = omega_step(m, layout, &beta, ipf)?;
    Ok(BlockParameter {
        component: layout.component,
        beta,
        omega,
    })
}

fn initial_omega(m: &BlockMoments, layout: &BlockLayout, init: &OmegaInit) -> Result<Vector> {
    let diag = |f: &dyn Fn(usize) -> f64| {
        Vector::from_iterator(
            layout.q(),
            layout.omega_entries.iter().map(|&(i, j)| if i == j { f(i) } else { 0.0 }),
        )
    };
    match init {
        OmegaInit::Identity => Ok(diag(&|_| 1.0)),
        OmegaInit::DiagonalInverseVariance => {
            if (0..layout.size()).any(|i| !(m.s_tt[(i, i)] > 0.0)) {
                return Err(rank_failure(layout, "zero sample variance"));
            }
            Ok(diag(&|i| 1.0 / m.s_tt[(i, i)]))
        }
        OmegaInit::User(all) => {
            let omega = all
                .get(layout.component)
                .cloned()
                .ok_or_else(|| Error::Config(alloc::format!("no starting value for component {}", layout.component)))?;
            if omega.len() != layout.q() {
                return Err(Error::Dimension(alloc::format!(
                    "starting omega for component {} has length {}, expected {}",
                    layout.component,
                    omega.len(),
                    layout.q()
                )));
            }
            if cholesky(&layout.omega_matrix(&omega)).is_none() {
                return Err(Error::OutOfDomain {
                    component: layout.component,
                });
            }
            Ok(omega)
        }
    }
}

/// Alternating GLS / IPF fit of one component.
pub fn fit_component(s: &SampleMoments, model: &ChainModel, component: usize, cfg: &FitConfig) -> Result<BlockFit> {
    cfg.validate()?;
    let layout = model
        .layouts
        .get(component)
        .ok_or_else(|| Error::Config(alloc::format!("no component {component}")))?;
    check_rank_condition(layout, s.n)?;
    let m = s.block(layout);
    fit_block(&m, layout, cfg)
}

pub(crate) fn fit_block(m: &BlockMoments, layout: &BlockLayout, cfg: &FitConfig) -> Result<BlockFit> {
    let slack = 1e-12 + cfg.ipf.tolerance;
    let mut trace = IterationTrace {
        records: Vec::new(),
        slack,
    };
    let mut omega = initial_omega(m, layout, &cfg.omega_init)?;
    let mut current: Option<BlockParameter> = None;
    let mut converged = false;

    for iteration in 1..=cfg.max_outer_iterations {
        let beta = gls_step(m, layout, &omega)?;
        let (next_omega, ipf_sweeps, ipf_converged) = omega_step(m, layout, &beta, &cfg.ipf)?;
        omega = next_omega;
        let next = BlockParameter {
            component: layout.component,
            beta,
            omega: omega.clone(),
        };
        let loglik = block_loglik(m, layout, &next)?;
        let sc = score(m, layout, &next)?;
        let score_norm = sc.max_norm();
        let step_norm = current
            .as_ref()
            .map_or(f64::INFINITY, |c| (&c.stacked() - &next.stacked()).amax());
        if let Some(prev) = trace.records.last() {
            let drop = prev.loglik - loglik;
            if drop > slack {
                return Err(Error::LikelihoodDecrease {
                    component: layout.component,
                    iteration,
                    drop,
                });
            }
        }
        trace.records.push(IterationRecord {
            loglik,
            score_norm,
            step_norm,
            ipf_sweeps,
            ipf_converged,
        });
        current = Some(next);
        if sc.equation_norm() <= cfg.outer_tolerance {
            converged = true;
            break;
        }
    }
    Ok(BlockFit {
        params: current.expect("at least one iteration"),
        standard_errors: None,
        trace,
        converged,
    })
}

/// `sqrt(diag([n I(theta)_tau]^{-1}))` for every block. `covariance`
/// supplies `Sigma_{pa,pa}`: pass `Sigma(theta_hat)` or `S`.
pub fn standard_errors(model: &ChainModel, theta: &ModelParameter, covariance: &Mat, n: usize) -> Result<Vec<StandardErrors>> {
    model
        .layouts
        .iter()
        .zip(&theta.blocks)
        .map(|(layout, block)| {
            let sigma_pp = submatrix(covariance, &layout.parents, &layout.parents);
            let info = fisher_info_block(layout, block, &sigma_pp)? * n as f64;
            let inv = spd_inverse(&info)
                .ok_or_else(|| Error::Singular(alloc::format!("Fisher information of component {}", layout.component)))?;
            let se = inv.diagonal().map(libm::sqrt);
            Ok(StandardErrors {
                beta: se.rows(0, layout.p()).into_owned(),
                omega: se.rows(layout.p(), layout.q()).into_owned(),
            })
        })
        .collect()
}

/// Fits every component and assembles the model-level quantities.
pub fn fit_model(s: &SampleMoments, model: &ChainModel, cfg: &FitConfig) -> core::result::Result<ModelFit, PartialFit> {
    let blocks: Vec<Result<BlockFit>> = if let Err(e) = check_labels(s, model).and_then(|_| cfg.validate()) {
        model.layouts.iter().map(|_| Err(e.clone())).collect()
    } else {
        (0..model.layouts.len()).map(|c| fit_component(s, model, c, cfg)).collect()
    };
    if blocks.iter().any(|b| b.is_err()) {
        return Err(PartialFit { blocks });
    }
    let mut blocks: Vec<BlockFit> = blocks.into_iter().map(|b| b.expect("checked")).collect();
    let theta = ModelParameter {
        blocks: blocks.iter().map(|b| b.params.clone()).collect(),
    };
    let assemble = || -> Result<(Mat, f64, f64, usize, Vec<StandardErrors>)> {
        let sigma_hat = sigma_from_params(model, &theta)?;
        let loglik = model_loglik(model, &theta, s)?;
        let dev = deviance_of_sigma(model, &sigma_hat, s)?;
        let info_cov = match cfg.information {
            InformationSource::Model => &sigma_hat,
            InformationSource::Sample => &s.cov,
        };
        let se = standard_errors(model, &theta, info_cov, s.n)?;
        Ok((sigma_hat, loglik, dev.value, dev.df, se))
    };
    match assemble() {
        Ok((sigma_hat, loglik, deviance, df, se)) => {
            for (b, e) in blocks.iter_mut().zip(se) {
                b.standard_errors = Some(e);
            }
            Ok(ModelFit {
                blocks,
                theta,
                sigma_hat,
                loglik,
                deviance,
                df,
                n: s.n,
            })
        }
        Err(e) => Err(PartialFit {
            blocks: blocks.into_iter().map(|_| Err(e.clone())).collect(),
        }),
    }
}

fn check_labels(s: &SampleMoments, model: &ChainModel) -> Result<()> {
    if s.labels.as_slice() != model.graph.labels() {
        let want: Vec<String> = model.graph.labels().to_vec();
        return Err(Error::Dimension(alloc::format!(
            "sample labels {:?} do not match graph vertices {:?}",
            s.labels,
            want
        )));
    }
    Ok(())
}

/// The two-step estimate of every component.
pub fn two_step_model(s: &SampleMoments, model: &ChainModel, ipf: &IpfConfig) -> Result<ModelParameter> {
    check_labels(s, model)?;
    let blocks = model
        .layouts
        .iter()
        .map(|layout| {
            check_rank_condition(layout, s.n)?;
            two_step_estimate(&s.block(layout), layout, ipf)
        })
        .collect::<Result<_>>()?;
    Ok(ModelParameter { blocks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceDiagnostics {
    pub iterations: usize,
    /// Iterations (1-based) whose log-likelihood fell below the previous
    /// one by more than the trace's slack.
    pub monotonicity_violations: Vec<usize>,
    pub final_score_norm: f64,
    pub final_loglik: f64,
    /// Whether the parameter steps over the tail of the run are
    /// non-increasing, a heuristic for convergence to a single point.
    pub steps_contracting: bool,
}

pub fn convergence_report(trace: &IterationTrace) -> ConvergenceDiagnostics {
    let r = &trace.records;
    let monotonicity_violations = r
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].loglik - w[1].loglik > trace.slack)
        .map(|(i, _)| i + 2)
        .collect();
    let tail_start = r.len().saturating_sub(10).max(1);
    let tail = &r[tail_start.min(r.len())..];
    let steps_contracting = tail
        .windows(2)
        .all(|w| w[1].step_norm <= w[0].step_norm * (1.0 + 1e-6) + 1e-14);
    ConvergenceDiagnostics {
        iterations: r.len(),
        monotonicity_violations,
        final_score_norm: r.last().map_or(f64::INFINITY, |x| x.score_norm),
        final_loglik: r.last().map_or(f64::NEG_INFINITY, |x| x.loglik),
        steps_contracting,
    }
}
