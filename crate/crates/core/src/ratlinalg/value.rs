use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, parse_rational, to_f64, FloatMatrix, RatMatrix, Rational};

/// A scalar that is exact when it could be computed exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Self::Exact(r) => Some(r),
            Self::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => to_f64(r),
            Self::Float(x) => *x,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(r) => f.write_str(&format_rational(r)),
            Self::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Exact(r) => s.serialize_str(&format_rational(r)),
            Self::Float(x) => s.serialize_f64(*x),
        }
    }
}

/// Strings parse as exact rationals, numbers as floats.
impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Exact(String),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Exact(s) => parse_rational(&s)
                .map(Self::Exact)
                .map_err(serde::de::Error::custom),
            Raw::Float(x) => Ok(Self::Float(x)),
        }
    }
}

/// A matrix that is exact when it could be computed exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixValue {
    Exact(RatMatrix),
    Float(FloatMatrix),
}

impl MatrixValue {
    pub fn rows(&self) -> usize {
        match self {
            Self::Exact(m) => m.rows(),
            Self::Float(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Self::Exact(m) => m.cols(),
            Self::Float(m) => m.cols(),
        }
    }

    pub fn exact(&self) -> Option<&RatMatrix> {
        match self {
            Self::Exact(m) => Some(m),
            Self::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> FloatMatrix {
        match self {
            Self::Exact(m) => m.to_float(),
            Self::Float(m) => m.clone(),
        }
    }

    pub fn get_f64(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Exact(m) => to_f64(m.get(i, j)),
            Self::Float(m) => m[(i, j)],
        }
    }
}

impl Serialize for MatrixValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Exact(m) => m.serialize(s),
            Self::Float(m) => {
                let rows: Vec<&[f64]> = (0..m.rows()).map(|i| m.row(i)).collect();
                rows.serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for MatrixValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Exact(RatMatrix),
            Float(Vec<Vec<f64>>),
        }
        match Raw::deserialize(d)? {
            Raw::Exact(m) => Ok(Self::Exact(m)),
            Raw::Float(rows) => FloatMatrix::from_rows(&rows)
                .map(Self::Float)
                .map_err(serde::de::Error::custom),
        }
    }
}

impl MatrixValue {
    /// `c' M d`.
    pub fn bilinear(&self, c: &[Rational], d: &[Rational]) -> Scalar {
        match self {
            Self::Exact(m) => {
                Scalar::Exact(m.bilinear(c, d).expect("dimensions checked by caller"))
            }
            Self::Float(m) => {
                let cf: Vec<f64> = c.iter().map(to_f64).collect();
                let df: Vec<f64> = d.iter().map(to_f64).collect();
                Scalar::Float(m.bilinear(&cf, &df))
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match self {
            Self::Exact(m) => Scalar::Exact(m.get(i, j).clone()),
            Self::Float(m) => Scalar::Float(m[(i, j)]),
        }
    }
}
