//! File formats: matrices as JSON (`{"rows": 4, "cols": n, "data":
//! [row-major]}`) or CSV (4 lines of comma-separated numbers),
//! transforms as `{"g": [16 row-major], "d": [n]}`, and finite
//! structures / representation mappings as JSON objects.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::consistency::{FiniteStructure, RepresentationMap};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Parse a matrix from the JSON format, rejecting wrong counts and
/// non-finite entries.
pub fn matrix_from_json(text: &str) -> Result<DMatrix<f64>> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    if file.data.len() != file.rows * file.cols {
        return Err(Error::Parse(format!(
            "matrix data has {} entries, expected {} for {}x{}",
            file.data.len(),
            file.rows * file.cols,
            file.rows,
            file.cols
        )));
    }
    let m = DMatrix::from_row_slice(file.rows, file.cols, &file.data);
    reject_non_finite(&m)?;
    Ok(m)
}

/// Serialize a matrix to the JSON format (row-major data).
pub fn matrix_to_json(m: &DMatrix<f64>) -> String {
    let data: Vec<f64> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
        .collect();
    serde_json::to_string(&MatrixFile {
        rows: m.nrows(),
        cols: m.ncols(),
        data,
    })
    .expect("matrix serialization cannot fail")
}

/// Parse a matrix from CSV: one line per row, comma-separated numbers,
/// equal-length rows.
pub fn matrix_from_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Parse(format!("CSV line {}: {e}", lineno + 1)))?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "CSV line {} has {} fields, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("CSV input is empty".into()));
    }
    let nrows = rows.len();
    let ncols = rows[0].len();
    let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    reject_non_finite(&m)?;
    Ok(m)
}

/// Serialize a matrix to CSV.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| format!("{}", m[(i, j)]))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parse a matrix, picking the format from the file name: `.csv` is
/// CSV, anything else the JSON format.
pub fn matrix_from_named_text(name: &str, text: &str) -> Result<DMatrix<f64>> {
    if name.to_ascii_lowercase().ends_with(".csv") {
        matrix_from_csv(text)
    } else {
        matrix_from_json(text)
    }
}

fn reject_non_finite(m: &DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::Parse(format!(
                    "non-finite entry at row {i}, column {j}"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct TransformFile {
    g: Vec<f64>,
    d: Vec<f64>,
}

/// Parse a transform `{"g": [16 row-major], "d": [n]}` into its raw
/// parts (validation against tolerances happens at construction).
pub fn transform_from_json(text: &str) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let file: TransformFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("transform JSON: {e}")))?;
    if file.g.len() != 16 {
        return Err(Error::Parse(format!(
            "transform matrix needs 16 entries, got {}",
            file.g.len()
        )));
    }
    let g = DMatrix::from_row_slice(4, 4, &file.g);
    reject_non_finite(&g)?;
    let d = DVector::from_vec(file.d);
    for (i, v) in d.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite diagonal entry {i}")));
        }
    }
    Ok((g, d))
}

/// Serialize a transform to `{"g": [...], "d": [...]}`.
pub fn transform_to_json(g: &DMatrix<f64>, d: &DVector<f64>) -> String {
    let g_flat: Vec<f64> = (0..4).flat_map(|i| (0..4).map(move |j| g[(i, j)])).collect();
    serde_json::to_string(&TransformFile {
        g: g_flat,
        d: d.iter().copied().collect(),
    })
    .expect("transform serialization cannot fail")
}

#[derive(Debug, Serialize, Deserialize)]
struct RelationFile {
    arity: usize,
    tuples: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StructureFile {
    elements: Vec<String>,
    #[serde(default)]
    relations: BTreeMap<String, RelationFile>,
}

/// Parse a finite structure from JSON with named relation tuples.
pub fn structure_from_json(text: &str) -> Result<FiniteStructure> {
    let file: StructureFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("structure JSON: {e}")))?;
    let mut s = FiniteStructure::new(file.elements)?;
    for (name, rel) in &file.relations {
        let tuples: Vec<Vec<&str>> = rel
            .tuples
            .iter()
            .map(|t| t.iter().map(String::as_str).collect())
            .collect();
        s.add_relation(name, rel.arity, &tuples)?;
    }
    Ok(s)
}

/// Serialize a finite structure back to the JSON format.
pub fn structure_to_json(s: &FiniteStructure) -> String {
    let relations: BTreeMap<String, RelationFile> = s
        .relations()
        .iter()
        .map(|(name, rel)| {
            let tuples = rel
                .tuples
                .iter()
                .map(|t| t.iter().map(|&i| s.elements()[i].clone()).collect())
                .collect();
            (
                name.clone(),
                RelationFile {
                    arity: rel.arity,
                    tuples,
                },
            )
        })
        .collect();
    serde_json::to_string(&StructureFile {
        elements: s.elements().to_vec(),
        relations,
    })
    .expect("structure serialization cannot fail")
}

#[derive(Debug, Serialize, Deserialize)]
struct RepresentationFile {
    mapping: BTreeMap<String, String>,
}

/// Parse a representation `{"mapping": {"s": "i", ...}}` between the
/// given source and target structures.
pub fn representation_from_json(
    text: &str,
    source: &FiniteStructure,
    target: &FiniteStructure,
) -> Result<RepresentationMap> {
    let file: RepresentationFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("representation JSON: {e}")))?;
    let pairs: Vec<(&str, &str)> = file
        .mapping
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    RepresentationMap::from_name_pairs(source.clone(), target.clone(), &pairs)
}
