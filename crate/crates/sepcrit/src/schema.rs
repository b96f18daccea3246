//! JSON documents for states and measurement families.
//!
//! Complex scalars are two-element arrays [re, im]; matrices are
//! row-major arrays of rows. Every document carries a "kind" tag
//! ("state", "mub", "mum", "gsic"), the dimension(s), parameters, and
//! the data payload. serde_json emits shortest-round-trip floats, so
//! parse(serialize(x)) reproduces x bit-exactly for finite values.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measurements::{GsicSet, MeasurementFamily, MubSet, MumSet};
use crate::tensor::{validate_density, CMatrix, DensityMatrix, Shape, ValidationReport};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document structure invalid: {0}")]
    Structure(String),
    #[error("parameter out of range: {0}")]
    ParamRange(String),
    #[error(transparent)]
    InvalidState(#[from] ValidationReport),
    #[error("expected a {expected} document, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
}

type CPair = [f64; 2];
type VectorData = Vec<CPair>;
type MatrixData = Vec<Vec<CPair>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MubParams {
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MumParams {
    pub count: usize,
    pub kappa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GsicParams {
    pub a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// One interchange document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    State {
        dims: Vec<usize>,
        data: MatrixData,
    },
    Mub {
        dim: usize,
        params: MubParams,
        data: Vec<Vec<VectorData>>,
    },
    Mum {
        dim: usize,
        params: MumParams,
        data: Vec<Vec<MatrixData>>,
    },
    Gsic {
        dim: usize,
        params: GsicParams,
        data: Vec<MatrixData>,
    },
}

fn encode_matrix(m: &CMatrix) -> MatrixData {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| [m.get(i, j).re, m.get(i, j).im])
                .collect()
        })
        .collect()
}

fn decode_matrix(data: &MatrixData, dim: usize, what: &str) -> Result<CMatrix, SchemaError> {
    if data.len() != dim || data.iter().any(|row| row.len() != dim) {
        return Err(SchemaError::Structure(format!(
            "{what}: expected a {dim}x{dim} matrix"
        )));
    }
    Ok(CMatrix::from_fn(dim, |i, j| {
        C64::new(data[i][j][0], data[i][j][1])
    }))
}

fn encode_vector(v: &[C64]) -> VectorData {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn decode_vector(data: &VectorData, dim: usize, what: &str) -> Result<Vec<C64>, SchemaError> {
    if data.len() != dim {
        return Err(SchemaError::Structure(format!(
            "{what}: expected a length-{dim} vector"
        )));
    }
    Ok(data.iter().map(|p| C64::new(p[0], p[1])).collect())
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::State { .. } => "state",
            Document::Mub { .. } => "mub",
            Document::Mum { .. } => "mum",
            Document::Gsic { .. } => "gsic",
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Document {
        Document::State {
            dims: rho.shape().dims().to_vec(),
            data: encode_matrix(rho.mat()),
        }
    }

    pub fn from_family(fam: &MeasurementFamily, t: Option<f64>) -> Document {
        match fam {
            MeasurementFamily::Mub(mub) => Document::Mub {
                dim: mub.dim(),
                params: MubParams { count: mub.count() },
                data: mub
                    .bases()
                    .iter()
                    .map(|basis| basis.iter().map(|v| encode_vector(v)).collect())
                    .collect(),
            },
            MeasurementFamily::Mum(mum) => Document::Mum {
                dim: mum.dim(),
                params: MumParams {
                    count: mum.count(),
                    kappa: mum.kappa(),
                    t,
                },
                data: mum
                    .groups()
                    .iter()
                    .map(|g| g.iter().map(encode_matrix).collect())
                    .collect(),
            },
            MeasurementFamily::Gsic(gsic) => Document::Gsic {
                dim: gsic.dim(),
                params: GsicParams { a: gsic.a(), t },
                data: gsic.ops().iter().map(encode_matrix).collect(),
            },
        }
    }

    /// Decode and fully validate a state document.
    pub fn to_state(&self) -> Result<DensityMatrix, SchemaError> {
        match self {
            Document::State { dims, data } => {
                let shape =
                    Shape::new(dims.clone()).map_err(|e| SchemaError::Structure(e.to_string()))?;
                let mat = decode_matrix(data, shape.total(), "state")?;
                Ok(validate_density(mat, shape)?)
            }
            other => Err(SchemaError::WrongKind {
                expected: "state",
                found: other.kind(),
            }),
        }
    }

    /// Decode a measurement family, checking structure and parameter
    /// ranges (the quantitative residuals are the validator's job).
    pub fn to_family(&self) -> Result<MeasurementFamily, SchemaError> {
        match self {
            Document::Mub { dim, params, data } => {
                let d = *dim;
                if d < 2 {
                    return Err(SchemaError::Structure("mub: dim must be ≥ 2".into()));
                }
                if data.len() != params.count || data.is_empty() {
                    return Err(SchemaError::Structure(format!(
                        "mub: declared count {} vs {} bases",
                        params.count,
                        data.len()
                    )));
                }
                let mut bases = Vec::with_capacity(data.len());
                for (b, basis) in data.iter().enumerate() {
                    if basis.len() != d {
                        return Err(SchemaError::Structure(format!(
                            "mub basis {b}: expected {d} vectors"
                        )));
                    }
                    let mut vecs = Vec::with_capacity(d);
                    for v in basis {
                        vecs.push(decode_vector(v, d, "mub vector")?);
                    }
                    bases.push(vecs);
                }
                Ok(MeasurementFamily::Mub(MubSet::new(d, bases)))
            }
            Document::Mum { dim, params, data } => {
                let d = *dim;
                if d < 2 {
                    return Err(SchemaError::Structure("mum: dim must be ≥ 2".into()));
                }
                if data.len() != params.count || data.is_empty() {
                    return Err(SchemaError::Structure(format!(
                        "mum: declared count {} vs {} groups",
                        params.count,
                        data.len()
                    )));
                }
                let kappa = params.kappa;
                if !(kappa > 1.0 / d as f64 && kappa <= 1.0 + 1e-9) {
                    return Err(SchemaError::ParamRange(format!(
                        "mum: κ = {kappa} outside (1/{d}, 1]"
                    )));
                }
                let mut groups = Vec::with_capacity(data.len());
                for (b, group) in data.iter().enumerate() {
                    if group.len() != d {
                        return Err(SchemaError::Structure(format!(
                            "mum group {b}: expected {d} operators"
                        )));
                    }
                    let mut ops = Vec::with_capacity(d);
                    for op in group {
                        ops.push(decode_matrix(op, d, "mum operator")?);
                    }
                    groups.push(ops);
                }
                Ok(MeasurementFamily::Mum(MumSet::new(d, kappa, groups)))
            }
            Document::Gsic { dim, params, data } => {
                let d = *dim;
                if d < 2 {
                    return Err(SchemaError::Structure("gsic: dim must be ≥ 2".into()));
                }
                if data.len() != d * d {
                    return Err(SchemaError::Structure(format!(
                        "gsic: expected {} operators, found {}",
                        d * d,
                        data.len()
                    )));
                }
                let a = params.a;
                let df = d as f64;
                if !(a > 1.0 / df.powi(3) && a <= 1.0 / (df * df) + 1e-9) {
                    return Err(SchemaError::ParamRange(format!(
                        "gsic: a = {a} outside (1/{d}³, 1/{d}²]"
                    )));
                }
                let mut ops = Vec::with_capacity(d * d);
                for op in data {
                    ops.push(decode_matrix(op, d, "gsic operator")?);
                }
                Ok(MeasurementFamily::Gsic(GsicSet::new(d, a, ops)))
            }
            other => Err(SchemaError::WrongKind {
                expected: "measurement",
                found: other.kind(),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Document, SchemaError> {
        Ok(serde_json::from_str(text)?)
    }
}
