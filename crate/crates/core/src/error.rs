use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// Structural problems with a mixed graph, kept apart from the numerical
/// errors so callers can tell a malformed file from a model that is not a
/// chain graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("conflicting edges between `{0}` and `{1}`")]
    ConflictingEdge(String, String),
    #[error("semi-directed cycle: {}", render_cycle(.0))]
    SemiDirectedCycle(Vec<CycleStep>),
    #[error("vertex set is not a chain component")]
    NotAComponent,
}

/// One hop of a semi-directed cycle, as reported by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStep {
    pub from: String,
    pub to: String,
    pub directed: bool,
}

pub(crate) fn render_cycle(steps: &[CycleStep]) -> String {
    let mut out = String::new();
    if let Some(first) = steps.first() {
        out.push_str(&first.from);
    }
    for s in steps {
        out.push_str(if s.directed { " -> " } else { " -- " });
        out.push_str(&s.to);
    }
    out
}

/// An entry of the covariance matrix that the model cannot reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternViolation {
    pub row: usize,
    pub col: usize,
    pub observed: f64,
    pub implied: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("concentration matrix of component {component} is not positive definite")]
    OutOfDomain { component: usize },
    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("covariance matrix is not in the model ({} offending entries)", .0.len())]
    NotInModel(Vec<PatternViolation>),
    #[error("singular {0}")]
    Singular(String),
    #[error(
        "rank condition violated for component {component}: need n >= |tau| + |pa(tau)| = {required}, got n = {n}"
    )]
    RankCondition {
        component: usize,
        n: usize,
        required: usize,
    },
    #[error("log-likelihood decreased by {drop:e} at iteration {iteration} of component {component}")]
    LikelihoodDecrease {
        component: usize,
        iteration: usize,
        drop: f64,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
