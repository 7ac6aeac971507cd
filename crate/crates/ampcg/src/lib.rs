//! File formats and command-line driver for fitting Gaussian AMP chain
//! graph models with `ampcg-core`.

pub mod cli;
pub mod csvio;
pub mod error;
pub mod graph_file;
pub mod params_json;
pub mod report;
