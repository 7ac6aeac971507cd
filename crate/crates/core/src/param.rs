//! The (B, Omega) parameterization: per-component parameter vectors, their
//! indicator maps, the covariance they induce and its inverse map.

use alloc::vec::Vec;

use crate::error::{Error, GraphError, PatternViolation, Result};
use crate::graph::{chain_components, component_cliques, ChainDecomposition, MixedGraph};
use crate::linalg::{cholesky, spd_inverse, submatrix, symmetrize, Mat, Vector};

/// Default relative tolerance used by [`identify_params`] to decide whether
/// a covariance matrix lies in the model.
pub const IDENTIFY_TOLERANCE: f64 = 1e-8;

/// 0/1 matrices with `vec(B_tau) = p_map * beta` and
/// `vec(Omega_tau) = q_map * omega` (column-stacking `vec`).
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMap {
    pub p_map: Mat,
    pub q_map: Mat,
}

/// Index bookkeeping for one chain component.
///
/// `beta` follows the `vec(B_tau)` order restricted to directed edges:
/// parents outer, children inner, both ascending in graph vertex order.
/// With complete parents `p_map` is therefore the identity. `omega` lists the
/// diagonal first, then the undirected edges in lexicographic order of
/// their local positions.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    pub component: usize,
    pub vertices: Vec<usize>,
    pub parents: Vec<usize>,
    /// (row in tau, column in pa(tau)) of each beta entry.
    pub beta_entries: Vec<(usize, usize)>,
    /// (i, j) local positions with i <= j of each omega entry.
    pub omega_entries: Vec<(usize, usize)>,
    /// Maximal cliques of the induced undirected graph, local indices.
    pub cliques: Vec<Vec<usize>>,
    pub maps: IndicatorMap,
}

impl BlockLayout {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn p(&self) -> usize {
        self.beta_entries.len()
    }

    pub fn q(&self) -> usize {
        self.omega_entries.len()
    }

    /// Whether every parent points into every vertex of the component, in
    /// which case `p_map` is the identity.
    pub fn has_complete_parents(&self) -> bool {
        self.p() == self.size() * self.parents.len()
    }

    pub fn is_complete(&self) -> bool {
        let k = self.size();
        self.q() == k + k * k.saturating_sub(1) / 2
    }

    pub fn b_matrix(&self, beta: &Vector) -> Mat {
        let mut b = Mat::zeros(self.size(), self.parents.len());
        for (&(i, j), &x) in self.beta_entries.iter().zip(beta.iter()) {
            b[(i, j)] = x;
        }
        b
    }

    pub fn omega_matrix(&self, omega: &Vector) -> Mat {
        let k = self.size();
        let mut m = Mat::zeros(k, k);
        for (&(i, j), &x) in self.omega_entries.iter().zip(omega.iter()) {
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
        m
    }

    pub fn beta_from_matrix(&self, b: &Mat) -> Vector {
        Vector::from_iterator(self.p(), self.beta_entries.iter().map(|&(i, j)| b[(i, j)]))
    }

    pub fn omega_from_matrix(&self, omega: &Mat) -> Vector {
        Vector::from_iterator(self.q(), self.omega_entries.iter().map(|&(i, j)| omega[(i, j)]))
    }

    fn check_lengths(&self, block: &BlockParameter) -> Result<()> {
        if block.beta.len() != self.p() || block.omega.len() != self.q() {
            return Err(Error::Dimension(alloc::format!(
                "component {} expects p = {}, q = {}; got {}, {}",
                self.component,
                self.p(),
                self.q(),
                block.beta.len(),
                block.omega.len()
            )));
        }
        Ok(())
    }

    /// `(B_tau, Omega_tau)` from a block parameter; fails if `Omega_tau` is
    /// not positive definite.
    pub fn assemble(&self, block: &BlockParameter) -> Result<(Mat, Mat)> {
        self.check_lengths(block)?;
        let b = self.b_matrix(&block.beta);
        let omega = self.omega_matrix(&block.omega);
        if cholesky(&omega).is_none() {
            return Err(Error::OutOfDomain {
                component: self.component,
            });
        }
        Ok((b, omega))
    }
}

/// Builds the indicator maps of one component.
pub fn build_indicator_maps(
    k: usize,
    n_parents: usize,
    beta_entries: &[(usize, usize)],
    omega_entries: &[(usize, usize)],
) -> IndicatorMap {
    let mut p_map = Mat::zeros(k * n_parents, beta_entries.len());
    for (col, &(i, j)) in beta_entries.iter().enumerate() {
        p_map[(i + j * k, col)] = 1.0;
    }
    let mut q_map = Mat::zeros(k * k, omega_entries.len());
    for (col, &(i, j)) in omega_entries.iter().enumerate() {
        q_map[(i + j * k, col)] = 1.0;
        q_map[(j + i * k, col)] = 1.0;
    }
    IndicatorMap { p_map, q_map }
}

fn layout_for(g: &MixedGraph, dec: &ChainDecomposition, component: usize) -> BlockLayout {
    let comp = &dec.components[component];
    let vertices = comp.vertices.clone();
    let parents = comp.parents.clone();
    let k = vertices.len();

    let mut beta_entries = Vec::new();
    for (j, &v) in parents.iter().enumerate() {
        for (i, &u) in vertices.iter().enumerate() {
            if g.has_directed(v, u) {
                beta_entries.push((i, j));
            }
        }
    }
    let mut omega_entries: Vec<(usize, usize)> = (0..k).map(|i| (i, i)).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            if g.has_undirected(vertices[i], vertices[j]) {
                omega_entries.push((i, j));
            }
        }
    }
    let cliques = component_cliques(g, &vertices)
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|v| vertices.iter().position(|&w| w == v).expect("clique member in component"))
                .collect()
        })
        .collect();
    let maps = build_indicator_maps(k, parents.len(), &beta_entries, &omega_entries);
    BlockLayout {
        component,
        vertices,
        parents,
        beta_entries,
        omega_entries,
        cliques,
        maps,
    }
}

/// A validated chain graph together with its decomposition and the
/// per-component layouts. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    pub graph: MixedGraph,
    pub decomposition: ChainDecomposition,
    pub layouts: Vec<BlockLayout>,
}

impl ChainModel {
    pub fn new(graph: MixedGraph) -> core::result::Result<Self, GraphError> {
        let decomposition = chain_components(&graph)?;
        let layouts = (0..decomposition.components.len())
            .map(|c| layout_for(&graph, &decomposition, c))
            .collect();
        Ok(ChainModel {
            graph,
            decomposition,
            layouts,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.len()
    }

    pub fn dimension(&self) -> ModelDimension {
        model_dimension(self)
    }
}

/// Parameters of one block-regression.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParameter {
    pub component: usize,
    pub beta: Vector,
    pub omega: Vector,
}

impl BlockParameter {
    /// `beta = 0`, `Omega_tau = I`.
    pub fn identity(layout: &BlockLayout) -> Self {
        let omega = Vector::from_iterator(
            layout.q(),
            layout.omega_entries.iter().map(|&(i, j)| if i == j { 1.0 } else { 0.0 }),
        );
        BlockParameter {
            component: layout.component,
            beta: Vector::zeros(layout.p()),
            omega,
        }
    }

    pub fn len(&self) -> usize {
        self.beta.len() + self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(beta, omega)` stacked into one vector.
    pub fn stacked(&self) -> Vector {
        Vector::from_iterator(self.len(), self.beta.iter().chain(self.omega.iter()).copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameter {
    pub blocks: Vec<BlockParameter>,
}

impl ModelParameter {
    pub fn identity(model: &ChainModel) -> Self {
        ModelParameter {
            blocks: model.layouts.iter().map(BlockParameter::identity).collect(),
        }
    }

    /// Largest absolute difference across all entries.
    pub fn max_abs_diff(&self, other: &ModelParameter) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (&a.stacked() - &b.stacked()).amax())
            .fold(0.0, f64::max)
    }
}

fn check_blocks(model: &ChainModel, theta: &ModelParameter) -> Result<()> {
    if theta.blocks.len() != model.layouts.len() {
        return Err(Error::Dimension(alloc::format!(
            "expected {} blocks, got {}",
            model.layouts.len(),
            theta.blocks.len()
        )));
    }
    Ok(())
}

/// Global `B` (zero outside the tau x pa(tau) slots) and block-diagonal
/// `Omega`, both over the graph's vertex order.
pub fn global_matrices(model: &ChainModel, theta: &ModelParameter) -> Result<(Mat, Mat)> {
    check_blocks(model, theta)?;
    let n = model.n_vertices();
    let mut b = Mat::zeros(n, n);
    let mut omega = Mat::zeros(n, n);
    for (layout, block) in model.layouts.iter().zip(&theta.blocks) {
        let (bt, ot) = layout.assemble(block)?;
        for (i, &u) in layout.vertices.iter().enumerate() {
            for (j, &v) in layout.parents.iter().enumerate() {
                b[(u, v)] = bt[(i, j)];
            }
            for (j, &v) in layout.vertices.iter().enumerate() {
                omega[(u, v)] = ot[(i, j)];
            }
        }
    }
    Ok((b, omega))
}

/// `Sigma = (I - B)^{-1} Omega^{-1} (I - B')^{-1}`.
pub fn sigma_from_params(model: &ChainModel, theta: &ModelParameter) -> Result<Mat> {
    let (b, _) = global_matrices(model, theta)?;
    let n = model.n_vertices();
    let mut omega_inv = Mat::zeros(n, n);
    for (layout, block) in model.layouts.iter().zip(&theta.blocks) {
        let inv = spd_inverse(&layout.omega_matrix(&block.omega)).ok_or(Error::OutOfDomain {
            component: layout.component,
        })?;
        for (i, &u) in layout.vertices.iter().enumerate() {
            for (j, &v) in layout.vertices.iter().enumerate() {
                omega_inv[(u, v)] = inv[(i, j)];
            }
        }
    }
    let a = Mat::identity(n, n) - b;
    // I - B is unit triangular in a topological vertex order, hence invertible
    let a_inv = a
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("I - B".into()))?;
    let mut sigma = &a_inv * omega_inv * a_inv.transpose();
    symmetrize(&mut sigma);
    Ok(sigma)
}

/// `Sigma^{-1} = (I - B)' Omega (I - B)`.
pub fn precision_from_params(model: &ChainModel, theta: &ModelParameter) -> Result<Mat> {
    let (b, omega) = global_matrices(model, theta)?;
    let n = model.n_vertices();
    let a = Mat::identity(n, n) - b;
    let mut k = a.transpose() * omega * a;
    symmetrize(&mut k);
    Ok(k)
}

/// Recovers the parameter from a covariance matrix of the model.
///
/// Each row of `B` comes from regressing a vertex on its own parents,
/// `B_{v,pa(v)} = Sigma_{v,pa(v)} Sigma_{pa(v),pa(v)}^{-1}`, and
/// `Omega_tau` inverts the tau-block of `(I - B) Sigma (I - B)'`. The result
/// is mapped back to a covariance and compared entrywise against `sigma`
/// with tolerance `rel_tol * max|sigma|`.
pub fn identify_params(model: &ChainModel, sigma: &Mat, rel_tol: f64) -> Result<ModelParameter> {
    let n = model.n_vertices();
    if sigma.nrows() != n || sigma.ncols() != n {
        return Err(Error::Dimension(alloc::format!(
            "covariance is {}x{}, graph has {} vertices",
            sigma.nrows(),
            sigma.ncols(),
            n
        )));
    }
    let mut sym = sigma.clone();
    symmetrize(&mut sym);
    if cholesky(&sym).is_none() {
        return Err(Error::NotPositiveDefinite("covariance matrix"));
    }

    let mut b = Mat::zeros(n, n);
    for v in 0..n {
        let pa = model.graph.parents(v);
        if pa.is_empty() {
            continue;
        }
        let s_pp = submatrix(&sym, &pa, &pa);
        let s_pv = submatrix(&sym, &pa, &[v]);
        let chol = cholesky(&s_pp).ok_or_else(|| {
            Error::Singular(alloc::format!("parent covariance of `{}`", model.graph.label(v)))
        })?;
        let coef = chol.solve(&s_pv);
        for (j, &u) in pa.iter().enumerate() {
            b[(v, u)] = coef[j];
        }
    }
    let a = Mat::identity(n, n) - &b;
    let resid = &a * &sym * a.transpose();

    let mut blocks = Vec::with_capacity(model.layouts.len());
    for layout in &model.layouts {
        let r = submatrix(&resid, &layout.vertices, &layout.vertices);
        let omega = spd_inverse(&r).ok_or(Error::OutOfDomain {
            component: layout.component,
        })?;
        let mut bt = Mat::zeros(layout.size(), layout.parents.len());
        for (i, &u) in layout.vertices.iter().enumerate() {
            for (j, &v) in layout.parents.iter().enumerate() {
                bt[(i, j)] = b[(u, v)];
            }
        }
        blocks.push(BlockParameter {
            component: layout.component,
            beta: layout.beta_from_matrix(&bt),
            omega: layout.omega_from_matrix(&omega),
        });
    }
    let theta = ModelParameter { blocks };

    let implied = sigma_from_params(model, &theta)?;
    let tol = rel_tol * sym.amax();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i..n {
            if (implied[(i, j)] - sym[(i, j)]).abs() > tol {
                violations.push(PatternViolation {
                    row: i,
                    col: j,
                    observed: sym[(i, j)],
                    implied: implied[(i, j)],
                });
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::NotInModel(violations));
    }
    Ok(theta)
}

/// Parameter counts per component, their total, and the degrees of
/// freedom relative to the saturated Gaussian model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDimension {
    /// `(p_tau, q_tau)` per component.
    pub blocks: Vec<(usize, usize)>,
    pub total: usize,
    pub df: usize,
}

pub fn model_dimension(model: &ChainModel) -> ModelDimension {
    let blocks: Vec<(usize, usize)> = model.layouts.iter().map(|l| (l.p(), l.q())).collect();
    let total = blocks.iter().map(|(p, q)| p + q).sum();
    let v = model.n_vertices();
    ModelDimension {
        blocks,
        total,
        df: v * (v + 1) / 2 - total,
    }
}
