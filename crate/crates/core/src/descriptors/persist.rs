//! On-disk forms of descriptors and motion curves.
//!
//! JSON: one record per item, `{id, kind, params: {n, lambda?}, values}` for
//! a descriptor or `{id, kind, params, points: [{t, values}]}` for a curve,
//! with an optional `class` label.
//!
//! Binary: a 16-byte little-endian header followed by the values as `f64`:
//!
//! | bytes  | field                                  |
//! |--------|----------------------------------------|
//! | 0..4   | magic `MSPC`                           |
//! | 4..6   | version `u16`                          |
//! | 6      | kind code `u8`                         |
//! | 7      | `n` as `u8`                            |
//! | 8..12  | `lambda` as `f32` (NaN when absent)    |
//! | 12..16 | value count `u32`                      |

use serde::{Deserialize, Serialize};

use super::{DescriptorKind, DescriptorParams, DescriptorVector};
use crate::error::{Error, Result};
use crate::motion::MotionCurve;

pub const BINARY_MAGIC: &[u8; 4] = b"MSPC";
pub const BINARY_VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub kind: DescriptorKind,
    pub params: DescriptorParams,
    pub values: Vec<f64>,
}

impl DescriptorRecord {
    pub fn new(id: impl Into<String>, class: Option<String>, d: DescriptorVector) -> Self {
        DescriptorRecord {
            id: id.into(),
            class,
            kind: d.kind,
            params: d.params,
            values: d.values,
        }
    }

    pub fn descriptor(&self) -> DescriptorVector {
        DescriptorVector {
            kind: self.kind,
            params: self.params,
            values: self.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub kind: DescriptorKind,
    pub params: DescriptorParams,
    /// Temporal filter radius the curve was built with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub points: Vec<CurvePoint>,
}

impl CurveRecord {
    pub fn new(id: impl Into<String>, class: Option<String>, window: Option<usize>, curve: &MotionCurve) -> Self {
        CurveRecord {
            id: id.into(),
            class,
            kind: curve.kind(),
            params: curve.params(),
            window,
            points: curve
                .points()
                .iter()
                .map(|(t, values)| CurvePoint {
                    t: *t,
                    values: values.clone(),
                })
                .collect(),
        }
    }

    pub fn curve(&self) -> Result<MotionCurve> {
        MotionCurve::new(
            self.kind,
            self.params,
            self.points.iter().map(|p| (p.t, p.values.clone())).collect(),
        )
    }
}

/// Either record shape, distinguished by `values` vs `points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureRecord {
    Descriptor(DescriptorRecord),
    Curve(CurveRecord),
}

impl FeatureRecord {
    pub fn id(&self) -> &str {
        match self {
            FeatureRecord::Descriptor(d) => &d.id,
            FeatureRecord::Curve(c) => &c.id,
        }
    }

    pub fn class(&self) -> Option<&str> {
        match self {
            FeatureRecord::Descriptor(d) => d.class.as_deref(),
            FeatureRecord::Curve(c) => c.class.as_deref(),
        }
    }

    pub fn kind(&self) -> DescriptorKind {
        match self {
            FeatureRecord::Descriptor(d) => d.kind,
            FeatureRecord::Curve(c) => c.kind,
        }
    }
}

pub fn encode_binary(d: &DescriptorVector) -> Result<Vec<u8>> {
    let n = u8::try_from(d.params.n)
        .map_err(|_| Error::Format(format!("n = {} does not fit the binary header", d.params.n)))?;
    let count = u32::try_from(d.values.len())
        .map_err(|_| Error::Format("too many values for the binary header".into()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * d.values.len());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    out.push(d.kind.code());
    out.push(n);
    out.extend_from_slice(&(d.params.lambda.map_or(f32::NAN, |l| l as f32)).to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    for v in &d.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_binary(bytes: &[u8]) -> Result<DescriptorVector> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("file shorter than the header".into()));
    }
    if &bytes[0..4] != BINARY_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != BINARY_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = DescriptorKind::from_code(bytes[6])
        .ok_or_else(|| Error::Format(format!("unknown kind code {}", bytes[6])))?;
    let n = bytes[7] as usize;
    let lambda = f32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * count {
        return Err(Error::Format(format!(
            "expected {count} values, found {} bytes",
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DescriptorVector {
        kind,
        params: DescriptorParams {
            n,
            lambda: (!lambda.is_nan()).then_some(lambda as f64),
        },
        values,
    })
}
