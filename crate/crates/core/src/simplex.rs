//! Simplex coordinates and their independent verification.
//!
//! [`extract`] turns an `Ô_{n+1}` member into `n + 1` vertices in the cube
//! `[-1/2, 1/2]^n`; [`verify`] then re-derives regularity, centring,
//! containment and circumradius from the raw coordinates alone.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ohat::{OhatMatrix, FIRST_COLUMN_TOL};

/// `n + 1` vertices in `ℝⁿ` (cube units) and the claimed common edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexEmbedding {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    edge_length: f64,
}

impl SimplexEmbedding {
    pub fn new(vertices: Vec<Vec<f64>>, edge_length: f64) -> Result<Self> {
        let dim = vertices.len().saturating_sub(1);
        if dim == 0 {
            return Err(Error::dim("a simplex needs at least two vertices"));
        }
        if let Some(bad) = vertices.iter().position(|v| v.len() != dim) {
            return Err(Error::dim(format!(
                "vertex {bad} has {} coordinates, expected {dim}",
                vertices[bad].len()
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) || !edge_length.is_finite() {
            return Err(Error::Parse("non-finite coordinate or edge length".into()));
        }
        Ok(SimplexEmbedding {
            dim,
            vertices,
            edge_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    /// `ℓ / √n`.
    pub fn edge_ratio(&self) -> f64 {
        edge_ratio(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&EmbeddingFile::from(self)).expect("finite values serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EmbeddingFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let s = SimplexEmbedding::new(file.vertices, file.edge_length)?;
        if file.dim != s.dim {
            return Err(Error::dim(format!(
                "header says dim {} but vertices have dim {}",
                file.dim, s.dim
            )));
        }
        Ok(s)
    }

    /// One vertex per row, no header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        for v in &self.vertices {
            w.write_record(v.iter().map(|x| x.to_string()))
                .map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`write_csv`]. The file carries no edge
    /// length, so the mean pairwise distance is taken as the claim; any
    /// irregularity then shows up as spread around that mean.
    ///
    /// [`write_csv`]: SimplexEmbedding::write_csv
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut vertices = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{f:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            vertices.push(row);
        }
        let provisional = SimplexEmbedding::new(vertices, 0.0)?;
        let dists = pairwise_distances(&provisional.vertices);
        let mean = dists.iter().sum::<f64>() / dists.len() as f64;
        Ok(SimplexEmbedding {
            edge_length: mean,
            ..provisional
        })
    }

    /// Loads JSON (when the file starts with `{`) or CSV.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if text.trim_start().starts_with('{') {
            SimplexEmbedding::from_json(&text)
        } else {
            SimplexEmbedding::read_csv(text.as_bytes())
        }
    }
}

/// On-disk JSON layout.
#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    dim: usize,
    edge_length: f64,
    #[serde(default)]
    edge_ratio: Option<f64>,
    vertices: Vec<Vec<f64>>,
}

impl From<&SimplexEmbedding> for EmbeddingFile {
    fn from(s: &SimplexEmbedding) -> Self {
        EmbeddingFile {
            dim: s.dim,
            edge_length: s.edge_length,
            edge_ratio: Some(s.edge_ratio()),
            vertices: s.vertices.clone(),
        }
    }
}

/// Vertices are the rows of `A₁ / (2‖A₁‖)`, which puts the largest
/// coordinate exactly on the cube boundary; the edge is `1/(√2·‖A₁‖)`.
pub fn extract(a: &OhatMatrix) -> Result<SimplexEmbedding> {
    let size = a.size();
    if size < 2 || !a.body().is_square() {
        return Err(Error::Invariant(format!(
            "extraction needs a square Ô matrix of size ≥ 2, got {}x{}",
            a.body().rows(),
            a.body().cols()
        )));
    }
    let root = 1.0 / (size as f64).sqrt();
    if a.body()
        .row_iter()
        .any(|r| (r[0] - root).abs() > FIRST_COLUMN_TOL)
    {
        return Err(Error::Invariant("first column is not (1/√n)·𝟙".into()));
    }
    let body = a.body().delete_first_column()?;
    let m = body.max_norm().value();
    let denom = 2.0 * m;
    let vertices = body
        .row_iter()
        .map(|r| r.iter().map(|x| x / denom).collect())
        .collect();
    SimplexEmbedding::new(vertices, 1.0 / (std::f64::consts::SQRT_2 * m))
}

/// `ℓ / √n`.
pub fn edge_ratio(s: &SimplexEmbedding) -> f64 {
    s.edge_length / (s.dim as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative deviation of any pairwise distance from the claimed edge.
    pub regularity: f64,
    /// Max-abs of the vertex average.
    pub barycenter: f64,
    /// How far a coordinate may exceed `1/2`.
    pub containment: f64,
    /// Relative deviation of vertex-to-centroid distances from `ℓ·√(n/(2n+2))`.
    pub circumradius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            regularity: 1e-8,
            barycenter: 1e-10,
            containment: 1e-12,
            circumradius: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub regularity_spread: f64,
    pub barycenter_norm: f64,
    /// `1/2 − max |coordinate|`; negative means a vertex is outside.
    pub containment_margin: f64,
    pub circumradius_error: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// Names of the metrics outside tolerance.
    pub fn failures(&self, tol: &Tolerances) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.regularity_spread <= tol.regularity) {
            out.push("regularity");
        }
        if !(self.barycenter_norm <= tol.barycenter) {
            out.push("barycenter");
        }
        if !(self.containment_margin >= -tol.containment) {
            out.push("containment");
        }
        if !(self.circumradius_error <= tol.circumradius) {
            out.push("circumradius");
        }
        out
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn pairwise_distances(vertices: &[Vec<f64>]) -> Vec<f64> {
    (0..vertices.len())
        .into_par_iter()
        .flat_map_iter(|i| (i + 1..vertices.len()).map(move |j| dist(&vertices[i], &vertices[j])))
        .collect()
}

/// Checks the embedding using only its coordinates and claimed edge.
pub fn verify(s: &SimplexEmbedding, tol: &Tolerances) -> Result<VerificationReport> {
    let n = s.dim;
    if n == 0 || s.vertices.len() != n + 1 || s.vertices.iter().any(|v| v.len() != n) {
        return Err(Error::dim(format!(
            "expected {} vertices of dimension {n}",
            n + 1
        )));
    }
    let ell = s.edge_length;
    let spread = if ell > 0.0 {
        (0..=n)
            .into_par_iter()
            .map(|i| {
                (i + 1..=n)
                    .map(|j| (dist(&s.vertices[i], &s.vertices[j]) - ell).abs() / ell)
                    .fold(0.0_f64, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    } else {
        f64::INFINITY
    };

    let count = (n + 1) as f64;
    let centroid: Vec<f64> = (0..n)
        .map(|k| s.vertices.iter().map(|v| v[k]).sum::<f64>() / count)
        .collect();
    let barycenter = centroid.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    let max_coord = s
        .vertices
        .iter()
        .flatten()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    let margin = 0.5 - max_coord;

    let radius = ell * (n as f64 / (2.0 * n as f64 + 2.0)).sqrt();
    let circ = if radius > 0.0 {
        s.vertices
            .iter()
            .map(|v| (dist(v, &centroid) - radius).abs() / radius)
            .fold(0.0_f64, f64::max)
    } else {
        f64::INFINITY
    };

    let mut report = VerificationReport {
        regularity_spread: spread,
        barycenter_norm: barycenter,
        containment_margin: margin,
        circumradius_error: circ,
        pass: false,
    };
    report.pass = report.failures(tol).is_empty();
    Ok(report)
}

/// Max-norm of `VVᵀ − (ℓ²/2)(I − J/(n+1))`: regularity and zero barycenter
/// restated as one matrix identity.
pub fn gram_deviation(s: &SimplexEmbedding) -> f64 {
    let n = s.dim;
    let ell2 = s.edge_length * s.edge_length;
    let diag = ell2 / 2.0 * (1.0 - 1.0 / (n + 1) as f64);
    let off = -ell2 / 2.0 / (n + 1) as f64;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            (i..=n)
                .map(|j| {
                    let g: f64 = s.vertices[i]
                        .iter()
                        .zip(&s.vertices[j])
                        .map(|(a, b)| a * b)
                        .sum();
                    (g - if i == j { diag } else { off }).abs()
                })
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn save(s: &SimplexEmbedding, path: &Path, csv: bool) -> Result<()> {
    let mut buf = Vec::new();
    if csv {
        s.write_csv(&mut buf)?;
    } else {
        buf.extend_from_slice(s.to_json().as_bytes());
        buf.push(b'\n');
    }
    std::fs::write(path, buf)?;
    Ok(())
}
