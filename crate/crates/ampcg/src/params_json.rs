//! JSON form of a model parameter: per component, `beta` as
//! `{from, to, value}` and `omega` as `{u, v, value}` entries.

use ampcg_core::linalg::Vector;
use ampcg_core::{BlockParameter, ChainModel, ModelParameter};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEntry {
    pub from: String,
    pub to: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub u: String,
    pub v: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentParams {
    pub vertices: Vec<String>,
    pub beta: Vec<BetaEntry>,
    pub omega: Vec<OmegaEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub components: Vec<ComponentParams>,
}

/// Entry-by-entry rendering of one block's vectors (estimates or standard
/// errors alike).
pub fn component_entries(model: &ChainModel, component: usize, beta: &Vector, omega: &Vector) -> ComponentParams {
    let g = &model.graph;
    let l = &model.layouts[component];
    ComponentParams {
        vertices: l.vertices.iter().map(|&v| g.label(v).to_string()).collect(),
        beta: l
            .beta_entries
            .iter()
            .zip(beta.iter())
            .map(|(&(i, j), &value)| BetaEntry {
                from: g.label(l.parents[j]).into(),
                to: g.label(l.vertices[i]).into(),
                value,
            })
            .collect(),
        omega: l
            .omega_entries
            .iter()
            .zip(omega.iter())
            .map(|(&(i, j), &value)| OmegaEntry {
                u: g.label(l.vertices[i]).into(),
                v: g.label(l.vertices[j]).into(),
                value,
            })
            .collect(),
    }
}

pub fn to_file(model: &ChainModel, theta: &ModelParameter) -> ParamsFile {
    ParamsFile {
        components: theta
            .blocks
            .iter()
            .map(|b| component_entries(model, b.component, &b.beta, &b.omega))
            .collect(),
    }
}

/// Matches entries to model parameters by label. Every parameter must be
/// given exactly once and nothing else may appear.
pub fn from_file(model: &ChainModel, file: &ParamsFile) -> Result<ModelParameter> {
    let g = &model.graph;
    let vid = |s: &str| g.vertex(s).ok_or_else(|| AppError::Input(format!("unknown vertex `{s}` in parameters")));
    let mut theta = ModelParameter {
        blocks: model
            .layouts
            .iter()
            .map(|l| BlockParameter {
                component: l.component,
                beta: Vector::from_element(l.p(), f64::NAN),
                omega: Vector::from_element(l.q(), f64::NAN),
            })
            .collect(),
    };
    let set = |slot: &mut f64, what: String, value: f64| -> Result<()> {
        if !slot.is_nan() {
            return Err(AppError::Input(format!("{what} given twice")));
        }
        *slot = value;
        Ok(())
    };
    for comp in &file.components {
        for e in &comp.beta {
            let (from, to) = (vid(&e.from)?, vid(&e.to)?);
            let c = model.decomposition.component_of[to];
            let l = &model.layouts[c];
            let pos = l.beta_entries.iter().position(|&(i, j)| l.vertices[i] == to && l.parents[j] == from);
            let k = pos.ok_or_else(|| AppError::Input(format!("no directed edge {} -> {}", e.from, e.to)))?;
            set(&mut theta.blocks[c].beta[k], format!("beta {} -> {}", e.from, e.to), e.value)?;
        }
        for e in &comp.omega {
            let (u, v) = (vid(&e.u)?, vid(&e.v)?);
            let c = model.decomposition.component_of[u];
            let l = &model.layouts[c];
            let pos = l.omega_entries.iter().position(|&(i, j)| {
                let (a, b) = (l.vertices[i], l.vertices[j]);
                (a, b) == (u, v) || (a, b) == (v, u)
            });
            let k = pos.ok_or_else(|| AppError::Input(format!("no omega entry for ({}, {})", e.u, e.v)))?;
            set(&mut theta.blocks[c].omega[k], format!("omega ({}, {})", e.u, e.v), e.value)?;
        }
    }
    for (b, l) in theta.blocks.iter().zip(&model.layouts) {
        if b.beta.iter().chain(b.omega.iter()).any(|x| x.is_nan()) {
            let names: Vec<&str> = l.vertices.iter().map(|&v| g.label(v)).collect();
            return Err(AppError::Input(format!(
                "missing parameters for component {{{}}}",
                names.join(", ")
            )));
        }
    }
    Ok(theta)
}

pub fn read(path: &std::path::Path, model: &ChainModel) -> Result<ModelParameter> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let file: ParamsFile = serde_json::from_str(&text)?;
    from_file(model, &file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_file;

    fn model() -> ChainModel {
        let g = graph_file::parse("node x\nnode a\nnode b\nx -> a\nx -> b\na -- b\n").unwrap();
        ChainModel::new(g).unwrap()
    }

    #[test]
    fn round_trip_through_json() {
        let m = model();
        let mut theta = ModelParameter::identity(&m);
        theta.blocks[1].beta[0] = 0.25;
        theta.blocks[1].omega[2] = -0.4;
        let json = serde_json::to_string(&to_file(&m, &theta)).unwrap();
        let back = from_file(&m, &serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, theta);
    }

    #[test]
    fn rejects_missing_duplicate_and_unknown() {
        let m = model();
        let mut f = to_file(&m, &ModelParameter::identity(&m));
        let mut missing = f.clone();
        missing.components[1].omega.pop();
        assert!(from_file(&m, &missing).is_err());
        let mut dup = f.clone();
        let e = dup.components[1].beta[0].clone();
        dup.components[1].beta.push(e);
        assert!(from_file(&m, &dup).is_err());
        f.components[1].beta[0].from = "b".into();
        assert!(from_file(&m, &f).is_err());
    }
}
