//! Operator specs in JSON and point/graph tables in CSV.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::base::FOperator;
use crate::error::{Error, Result};
use crate::monotone::{GraphSample, MonotoneOperator, Subdifferential};
use crate::point::Point;
use crate::potential::BuiltinPotential;
use crate::projector::{ConvexSet, ProjectorSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FSpec {
    Identity,
    Rotator {
        theta: f64,
    },
    PNormGradient {
        p: f64,
    },
    SmoothConvexGradient {
        potential: BuiltinPotential,
        #[serde(default)]
        strong_modulus: f64,
        #[serde(default)]
        lipschitz: Option<f64>,
    },
    LinearSpd {
        matrix: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ASpec {
    Identity,
    Zero,
    Linear {
        matrix: Vec<Vec<f64>>,
    },
    NormalConePoint {
        point: Vec<f64>,
    },
    NormalConeLine,
    NormalConeBall {
        center: Vec<f64>,
        radius: f64,
    },
    NormalConeWholeSpace,
    Subdifferential {
        potential: BuiltinPotential,
        #[serde(default)]
        strong_modulus: f64,
        #[serde(default)]
        lipschitz: Option<f64>,
    },
    FromGraph {
        pairs: Vec<(Vec<f64>, Vec<f64>)>,
    },
}

/// `{"F": {...}, "A": {...}, "dim": n}`; `A` may be omitted for
/// commands that only need `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(rename = "F")]
    pub f: FSpec,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ASpec>,
    pub dim: usize,
}

fn matrix_from_rows(rows: &[Vec<f64>], dim: usize) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse(format!("matrix must be {dim}×{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

impl OperatorSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| {
            Error::Parse(format!("operator spec line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn build_f(&self) -> Result<FOperator> {
        let f = match &self.f {
            FSpec::Identity => FOperator::identity(self.dim)?,
            FSpec::Rotator { theta } => FOperator::rotator(*theta)?,
            FSpec::PNormGradient { p } => FOperator::p_norm_gradient(*p, self.dim)?,
            FSpec::SmoothConvexGradient { potential, strong_modulus, lipschitz } => {
                FOperator::smooth_convex_gradient(potential.shared(), self.dim, *strong_modulus, *lipschitz)?
            }
            FSpec::LinearSpd { matrix } => FOperator::linear(matrix_from_rows(matrix, self.dim)?)?,
        };
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: f.dim() });
        }
        Ok(f)
    }

    pub fn build_a(&self) -> Result<MonotoneOperator> {
        let spec = self
            .a
            .as_ref()
            .ok_or_else(|| Error::Parse("operator spec has no \"A\" entry".into()))?;
        let a = match spec {
            ASpec::Identity => MonotoneOperator::identity(self.dim)?,
            ASpec::Zero => MonotoneOperator::zero(self.dim)?,
            ASpec::Linear { matrix } => MonotoneOperator::linear(matrix_from_rows(matrix, self.dim)?)?,
            ASpec::NormalConePoint { point } => MonotoneOperator::normal_cone_point(Point::new(point.clone())?),
            ASpec::NormalConeLine => MonotoneOperator::normal_cone_line(),
            ASpec::NormalConeBall { center, radius } => {
                MonotoneOperator::normal_cone_ball(Point::new(center.clone())?, *radius)?
            }
            ASpec::NormalConeWholeSpace => MonotoneOperator::normal_cone_whole_space(self.dim)?,
            ASpec::Subdifferential { potential, strong_modulus, lipschitz } => MonotoneOperator::subdifferential(
                Subdifferential {
                    potential: potential.shared(),
                    strong_modulus: *strong_modulus,
                    lipschitz: *lipschitz,
                },
                self.dim,
            )?,
            ASpec::FromGraph { pairs } => {
                let pairs = pairs
                    .iter()
                    .map(|(x, y)| Ok((Point::new(x.clone())?, Point::new(y.clone())?)))
                    .collect::<Result<Vec<_>>>()?;
                MonotoneOperator::from_graph(GraphSample::new(pairs)?)?
            }
        };
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
        }
        Ok(a)
    }

    /// The projector whose normal cone is `A`.
    pub fn projector(&self) -> Result<ProjectorSpec> {
        let set = match &self.a {
            Some(ASpec::NormalConePoint { point }) => ConvexSet::SinglePoint(Point::new(point.clone())?),
            Some(ASpec::NormalConeLine) => ConvexSet::HorizontalLine,
            Some(ASpec::NormalConeBall { center, radius }) => ConvexSet::Ball {
                center: Point::new(center.clone())?,
                radius: *radius,
            },
            Some(ASpec::NormalConeWholeSpace) => ConvexSet::WholeSpace,
            _ => return Err(Error::Parse("projection needs \"A\" to be a normal cone form".into())),
        };
        ProjectorSpec::new(set, self.build_f()?)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Numeric rows of a CSV with a mandatory header. Every row must have the
/// same width; `expected_width` pins it.
pub fn read_table<R: Read>(reader: R, expected_width: Option<usize>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("CSV header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse("CSV line 1: missing header row".into()));
    }
    if header.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Err(Error::Parse("CSV line 1: header row required, found numbers".into()));
    }
    let width = expected_width.unwrap_or(header.len());
    if header.len() != width {
        return Err(Error::Parse(format!("CSV line 1: expected {width} columns, header has {}", header.len())));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse(format!("CSV line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("CSV line {line}, column {}: bad number `{s}`", c + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Points of dimension `dim`, one per row.
pub fn read_points<R: Read>(reader: R, dim: usize) -> Result<Vec<Point>> {
    let (_, rows) = read_table(reader, Some(dim))?;
    rows.into_iter().map(Point::new).collect()
}

/// A graph sample with rows `x₁..xₙ, x*₁..x*ₙ`.
pub fn read_graph<R: Read>(reader: R) -> Result<GraphSample> {
    let (header, rows) = read_table(reader, None)?;
    if header.len() % 2 != 0 {
        return Err(Error::Parse(format!("graph CSV needs an even column count, got {}", header.len())));
    }
    let n = header.len() / 2;
    let pairs = rows
        .into_iter()
        .map(|r| Ok((Point::new(r[..n].to_vec())?, Point::new(r[n..].to_vec())?)))
        .collect::<Result<Vec<_>>>()?;
    GraphSample::new(pairs)
}

/// Writes a header and string rows.
pub fn write_table<W: Write>(writer: W, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::Parse(format!("CSV write: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Column names `{prefix}1..{prefix}n`.
pub fn coordinate_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Writes a graph sample with columns `x1..xn, xs1..xsn`.
pub fn write_graph<W: Write>(writer: W, g: &GraphSample) -> Result<()> {
    let mut header = coordinate_header("x", g.dim());
    header.extend(coordinate_header("xs", g.dim()));
    let rows: Vec<Vec<String>> = g
        .pairs()
        .iter()
        .map(|(x, y)| x.coords().iter().chain(y.coords()).map(|&v| format_number(v)).collect())
        .collect();
    write_table(writer, &header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ball_example() {
        let s = r#"{"F": {"kind": "rotator", "theta": 0.7853981634}, "A": {"form": "normal_cone_ball", "center": [0,0], "radius": 1.0}, "dim": 2}"#;
        let spec = OperatorSpec::from_json_str(s).unwrap();
        assert_eq!(spec.dim, 2);
        assert!(spec.build_a().is_ok());
        assert!(spec.build_f().is_ok());
        assert!(matches!(spec.projector().unwrap().set(), ConvexSet::Ball { .. }));
        let back = OperatorSpec::from_json_str(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn json_errors_carry_line_numbers() {
        let err = OperatorSpec::from_json_str("{\n\"F\": {\"kind\": \"bogus\"},\n\"dim\": 2}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn rotator_dim_mismatch() {
        let s = r#"{"F": {"kind": "rotator", "theta": 0.3}, "dim": 3}"#;
        assert!(OperatorSpec::from_json_str(s).unwrap().build_f().is_err());
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let g = GraphSample::from_scalars(&[(0.1, 1.0 / 3.0), (-2e-300, std::f64::consts::PI)]).unwrap();
        let mut buf = Vec::new();
        write_graph(&mut buf, &g).unwrap();
        let back = read_graph(buf.as_slice()).unwrap();
        assert_eq!(back.pairs(), g.pairs());
    }

    #[test]
    fn csv_requires_header_and_reports_lines() {
        assert!(read_points("1,2\n3,4\n".as_bytes(), 2).is_err());
        let err = read_points("x1,x2\n1,2\n3,oops\n".as_bytes(), 2).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = read_points("x1,x2\n1,2\n3\n".as_bytes(), 2).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
