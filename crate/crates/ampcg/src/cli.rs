//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use ampcg_core::likelihood::deviance;
use ampcg_core::param::IDENTIFY_TOLERANCE;
use ampcg_core::sim::sample;
use ampcg_core::{
    identify_params, is_decomposable, maximal_cliques, model_dimension, two_step_model, ChainModel, Error,
    FitConfig, InformationSource, MixedGraph, OmegaInit, SampleMoments, SimSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{AppError, Result};
use crate::{csvio, graph_file, params_json, report};

#[derive(Debug, Parser)]
#[command(name = "ampcg", version, about = "Maximum likelihood fitting of Gaussian AMP chain graph models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model to data or to a covariance matrix.
    Fit(FitArgs),
    /// Draw a sample from the model at given parameters.
    Simulate(SimulateArgs),
    /// Recover the parameters of a covariance matrix that lies in the model.
    Identify(IdentifyArgs),
    /// Validate a graph and print its chain components and cliques.
    CheckGraph(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Init {
    Identity,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Information {
    Model,
    Sample,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Raw observations, one row per observation.
    #[arg(long, conflicts_with = "cov", required_unless_present = "cov")]
    pub data: Option<PathBuf>,
    /// Labelled covariance matrix; requires --n.
    #[arg(long, requires = "n")]
    pub cov: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Use the data as already centred.
    #[arg(long)]
    pub no_center: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Score max-norm at which the outer iteration stops.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = Init::Identity)]
    pub init: Init,
    #[arg(long, value_enum, default_value_t = Information::Model)]
    pub information: Information,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Parameter file in JSON.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub cov: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
}

/// Successful runs either converged or did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NotConverged,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::NotConverged => 2,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| AppError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| AppError::io("<stdout>", e)),
    }
}

fn load_model(path: &Path) -> Result<ChainModel> {
    Ok(ChainModel::new(graph_file::read(path)?)?)
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Fit(a) => fit(a),
        Command::Simulate(a) => simulate(a),
        Command::Identify(a) => identify(a),
        Command::CheckGraph(a) => check_graph(a),
    }
}

fn fit(a: FitArgs) -> Result<Outcome> {
    let model = load_model(&a.graph)?;
    let labels = model.graph.labels().to_vec();
    let s = match (&a.data, &a.cov) {
        (Some(d), _) => SampleMoments::from_data(&csvio::read_data_file(d, &model.graph)?, labels, !a.no_center)?,
        (None, Some(c)) => {
            let n = a.n.ok_or_else(|| AppError::Input("--cov needs --n".into()))?;
            SampleMoments::new(csvio::read_cov_file(c, &model.graph)?, n, labels)?
        }
        (None, None) => return Err(AppError::Input("one of --data or --cov is required".into())),
    };
    let cfg = FitConfig {
        outer_tolerance: a.tol,
        max_outer_iterations: a.max_iter,
        omega_init: match a.init {
            Init::Identity => OmegaInit::Identity,
            Init::Diagonal => OmegaInit::DiagonalInverseVariance,
        },
        information: match a.information {
            Information::Model => InformationSource::Model,
            Information::Sample => InformationSource::Sample,
        },
        ..FitConfig::default()
    };
    let fit = match ampcg_core::fit_model(&s, &model, &cfg) {
        Ok(f) => f,
        Err(partial) => {
            let mut numeric = true;
            for (c, e) in partial.failures() {
                let names: Vec<&str> = model.layouts[c].vertices.iter().map(|&v| model.graph.label(v)).collect();
                eprintln!("component {{{}}}: {e}", names.join(", "));
                numeric &= matches!(e, Error::LikelihoodDecrease { .. });
            }
            if numeric {
                return Ok(Outcome::NotConverged);
            }
            return Err(AppError::Model(partial.failures().next().expect("at least one failure").1.clone()));
        }
    };
    let two_step = two_step_model(&s, &model, &cfg.ipf).ok();
    let two_step_dev = two_step
        .as_ref()
        .and_then(|t| deviance(&model, t, &s).ok())
        .map(|d| d.value);
    let r = report::build(&model, &fit, two_step.as_ref(), two_step_dev);
    let text = match a.format {
        Format::Text => report::render_text(&r),
        Format::Json => serde_json::to_string_pretty(&r)? + "\n",
    };
    emit(a.out.as_deref(), &text)?;
    if fit.converged() {
        Ok(Outcome::Done)
    } else {
        eprintln!("warning: not every component converged");
        Ok(Outcome::NotConverged)
    }
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    let model = load_model(&a.graph)?;
    let theta = params_json::read(&a.params, &model)?;
    let x = sample(&model, &SimSpec { theta, n: a.n, seed: a.seed })?;
    let mut buf = Vec::new();
    csvio::write_data(&mut buf, &x, model.graph.labels())?;
    emit(a.out.as_deref(), &String::from_utf8(buf).expect("csv output is utf-8"))?;
    Ok(Outcome::Done)
}

fn identify(a: IdentifyArgs) -> Result<Outcome> {
    let model = load_model(&a.graph)?;
    let sigma = csvio::read_cov_file(&a.cov, &model.graph)?;
    let theta = match identify_params(&model, &sigma, IDENTIFY_TOLERANCE) {
        Ok(t) => t,
        Err(Error::NotInModel(v)) => {
            for p in v.iter().take(10) {
                eprintln!(
                    "entry ({}, {}): observed {:e}, implied {:e}",
                    model.graph.label(p.row),
                    model.graph.label(p.col),
                    p.observed,
                    p.implied
                );
            }
            return Err(AppError::Model(Error::NotInModel(v)));
        }
        Err(e) => return Err(e.into()),
    };
    let json = serde_json::to_string_pretty(&params_json::to_file(&model, &theta))? + "\n";
    emit(a.out.as_deref(), &json)?;
    Ok(Outcome::Done)
}

fn check_graph(a: CheckArgs) -> Result<Outcome> {
    let g: MixedGraph = graph_file::read(&a.graph)?;
    let model = ChainModel::new(g)?;
    let g = &model.graph;
    let dim = model_dimension(&model);
    let mut out = String::new();
    use std::fmt::Write as _;
    for (l, &(p, q)) in model.layouts.iter().zip(&dim.blocks) {
        let names = |vs: &[usize]| vs.iter().map(|&v| g.label(v)).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "component {{{}}} parents {{{}}} p = {p} q = {q}", names(&l.vertices), names(&l.parents));
        for c in maximal_cliques(g, &l.vertices)? {
            let _ = writeln!(out, "  clique {{{}}}", names(&c));
        }
        if !is_decomposable(g, &l.vertices)? {
            let _ = writeln!(out, "  not decomposable: IPF is iterative");
        }
    }
    let _ = writeln!(out, "parameters: {}", dim.total);
    let _ = writeln!(out, "df: {}", dim.df);
    emit(None, &out)?;
    Ok(Outcome::Done)
}
