//! CSV readers and writers for raw data and covariance matrices.
//!
//! Data files have one column per variable (header = graph labels, any
//! order) and one row per observation. Covariance files are square with a
//! header row and a leading label column.

use std::io::{Read, Write};
use std::path::Path;

use ampcg_core::linalg::Mat;
use ampcg_core::MixedGraph;

use crate::error::{AppError, Result};

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| AppError::io(path, e))
}

fn column_positions(header: &[String], g: &MixedGraph) -> Result<Vec<usize>> {
    for h in header {
        if g.vertex(h).is_none() {
            return Err(AppError::Input(format!("column `{h}` is not a vertex of the graph")));
        }
    }
    g.labels()
        .iter()
        .map(|l| {
            let hits: Vec<usize> = header.iter().enumerate().filter(|(_, h)| *h == l).map(|(i, _)| i).collect();
            match hits.as_slice() {
                [i] => Ok(*i),
                [] => Err(AppError::Input(format!("no column for vertex `{l}`"))),
                _ => Err(AppError::Input(format!("duplicate column for vertex `{l}`"))),
            }
        })
        .collect()
}

fn parse_value(cell: &str, row: usize) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| AppError::Format {
        line: row,
        message: format!("not a number: `{cell}`"),
    })
}

/// Reads observations into a `|V| x n` matrix in graph vertex order.
pub fn read_data<R: Read>(reader: R, g: &MixedGraph) -> Result<Mat> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let pos = column_positions(&header, g)?;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let obs = pos
            .iter()
            .map(|&p| parse_value(rec.get(p).unwrap_or(""), line))
            .collect::<Result<Vec<f64>>>()?;
        columns.push(obs);
    }
    if columns.is_empty() {
        return Err(AppError::Input("data file has no observations".into()));
    }
    Ok(Mat::from_fn(g.len(), columns.len(), |v, i| columns[i][v]))
}

pub fn read_data_file(path: &Path, g: &MixedGraph) -> Result<Mat> {
    read_data(open(path)?, g)
}

/// Reads a labelled square matrix and permutes it into graph vertex order.
pub fn read_cov<R: Read>(reader: R, g: &MixedGraph) -> Result<Mat> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().skip(1).map(str::to_string).collect();
    let col_pos = column_positions(&header, g)?;
    let mut row_labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        row_labels.push(rec.get(0).unwrap_or("").to_string());
        rows.push(rec.iter().skip(1).map(|c| parse_value(c, line)).collect::<Result<_>>()?);
    }
    if rows.len() != header.len() {
        return Err(AppError::Input(format!(
            "covariance matrix has {} columns but {} rows",
            header.len(),
            rows.len()
        )));
    }
    let row_pos = column_positions(&row_labels, g)?;
    Ok(Mat::from_fn(g.len(), g.len(), |a, b| rows[row_pos[a]][col_pos[b]]))
}

pub fn read_cov_file(path: &Path, g: &MixedGraph) -> Result<Mat> {
    read_cov(open(path)?, g)
}

/// Writes a `|V| x n` matrix as one row per observation.
pub fn write_data<W: Write>(writer: W, data: &Mat, labels: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(labels)?;
    for col in data.column_iter() {
        w.write_record(col.iter().map(|x| format!("{x:e}")))?;
    }
    w.flush().map_err(|e| AppError::io("<output>", e))?;
    Ok(())
}

pub fn write_cov<W: Write>(writer: W, cov: &Mat, labels: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(std::iter::once("").chain(labels.iter().map(String::as_str)))?;
    for (i, row) in cov.row_iter().enumerate() {
        w.write_record(std::iter::once(labels[i].clone()).chain(row.iter().map(|x| format!("{x:e}"))))?;
    }
    w.flush().map_err(|e| AppError::io("<output>", e))?;
    Ok(())
}
