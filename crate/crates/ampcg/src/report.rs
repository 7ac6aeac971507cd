//! Fit reports as JSON or as a plain-text table.

use std::fmt::Write as _;

use ampcg_core::linalg::Mat;
use ampcg_core::{convergence_report, ChainModel, ModelFit, ModelParameter};
use serde::Serialize;

use crate::params_json::{component_entries, ComponentParams};

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub vertices: Vec<String>,
    pub parents: Vec<String>,
    pub p: usize,
    pub q: usize,
    pub params: ComponentParams,
    pub standard_errors: Option<ComponentParams>,
    pub two_step: Option<ComponentParams>,
    pub iterations: usize,
    pub converged: bool,
    pub score_norm: f64,
    /// Iterations whose log-likelihood fell by more than the allowed slack.
    pub monotonicity_violations: Vec<usize>,
    pub steps_contracting: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub graph: Vec<String>,
    pub n: usize,
    pub components: Vec<ComponentReport>,
    pub loglik: f64,
    pub deviance: f64,
    pub df: usize,
    pub two_step_deviance: Option<f64>,
    pub sigma_hat: Vec<Vec<f64>>,
}

fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn build(
    model: &ChainModel,
    fit: &ModelFit,
    two_step: Option<&ModelParameter>,
    two_step_deviance: Option<f64>,
) -> FitReport {
    let g = &model.graph;
    let names = |vs: &[usize]| vs.iter().map(|&v| g.label(v).to_string()).collect::<Vec<_>>();
    let components = model
        .layouts
        .iter()
        .zip(&fit.blocks)
        .map(|(l, b)| (l, b, convergence_report(&b.trace)))
        .map(|(l, b, diag)| ComponentReport {
            vertices: names(&l.vertices),
            parents: names(&l.parents),
            p: l.p(),
            q: l.q(),
            params: component_entries(model, l.component, &b.params.beta, &b.params.omega),
            standard_errors: b
                .standard_errors
                .as_ref()
                .map(|se| component_entries(model, l.component, &se.beta, &se.omega)),
            two_step: two_step.map(|t| {
                let tb = &t.blocks[l.component];
                component_entries(model, l.component, &tb.beta, &tb.omega)
            }),
            iterations: b.iterations(),
            converged: b.converged,
            score_norm: b.score_norm(),
            monotonicity_violations: diag.monotonicity_violations,
            steps_contracting: diag.steps_contracting,
        })
        .collect();
    FitReport {
        graph: g.labels().to_vec(),
        n: fit.n,
        components,
        loglik: fit.loglik,
        deviance: fit.deviance,
        df: fit.df,
        two_step_deviance,
        sigma_hat: rows(&fit.sigma_hat),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.2}"))
}

/// One table per component: beta rows sorted by child then parent label,
/// then the omega entries (diagonal first).
pub fn render_text(r: &FitReport) -> String {
    let mut out = String::new();
    for c in &r.components {
        let _ = writeln!(out, "component {{{}}}", c.vertices.join(", "));
        if !c.parents.is_empty() {
            let _ = writeln!(out, "  parents {{{}}}", c.parents.join(", "));
        }
        let status = if c.converged { "converged" } else { "NOT converged" };
        let _ = writeln!(
            out,
            "  p = {}, q = {}, {} iterations, {status}, score {:.1e}",
            c.p, c.q, c.iterations, c.score_norm
        );
        if !c.monotonicity_violations.is_empty() {
            let _ = writeln!(out, "  log-likelihood decreased at iterations {:?}", c.monotonicity_violations);
        }
        let _ = writeln!(out, "  {:<24} {:>8} {:>8} {:>8}", "parameter", "MLE", "SE", "2-step");
        let mut beta: Vec<usize> = (0..c.params.beta.len()).collect();
        beta.sort_by(|&a, &b| {
            let (x, y) = (&c.params.beta[a], &c.params.beta[b]);
            (&x.to, &x.from).cmp(&(&y.to, &y.from))
        });
        for i in beta {
            let e = &c.params.beta[i];
            let name = format!("beta[{}, {}]", e.to, e.from);
            let se = c.standard_errors.as_ref().map(|s| s.beta[i].value);
            let ts = c.two_step.as_ref().map(|s| s.beta[i].value);
            let _ = writeln!(out, "  {name:<24} {:>8} {:>8} {:>8}", cell(Some(e.value)), cell(se), cell(ts));
        }
        for (i, e) in c.params.omega.iter().enumerate() {
            let name = format!("omega[{}, {}]", e.u, e.v);
            let se = c.standard_errors.as_ref().map(|s| s.omega[i].value);
            let ts = c.two_step.as_ref().map(|s| s.omega[i].value);
            let _ = writeln!(out, "  {name:<24} {:>8} {:>8} {:>8}", cell(Some(e.value)), cell(se), cell(ts));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "n = {}", r.n);
    let _ = writeln!(out, "log-likelihood = {:.4}", r.loglik);
    let _ = writeln!(out, "deviance = {:.2} on {} df", r.deviance, r.df);
    if let Some(d) = r.two_step_deviance {
        let _ = writeln!(out, "two-step deviance = {d:.2}");
    }
    out
}
