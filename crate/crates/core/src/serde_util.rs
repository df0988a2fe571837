//! Serde adapters for nalgebra types and extended reals.
//!
//! Matrices are written column-major as an array of columns. Infinite values
//! are written as the strings `"+inf"` and `"-inf"`.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Wire form of a possibly infinite real.
#[derive(Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum ExtReal {
    Num(f64),
    Inf(String),
}

impl ExtReal {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::Inf("+inf".into())
        } else if v == f64::NEG_INFINITY {
            ExtReal::Inf("-inf".into())
        } else {
            ExtReal::Num(v)
        }
    }

    pub fn to_f64(&self) -> Result<f64, String> {
        match self {
            ExtReal::Num(v) => Ok(*v),
            ExtReal::Inf(s) => match s.as_str() {
                "+inf" | "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(format!("expected number, \"+inf\" or \"-inf\", got {other:?}")),
            },
        }
    }
}

pub mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
        ExtReal::from_f64(*v).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        ExtReal::deserialize(de)?.to_f64().map_err(D::Error::custom)
    }
}

pub mod ext_f64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|x| ExtReal::from_f64(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
        Vec::<ExtReal>::deserialize(de)?
            .iter()
            .map(|e| e.to_f64().map_err(D::Error::custom))
            .collect()
    }
}

pub mod dvector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &DVector<f64>, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<DVector<f64>, D::Error> {
        Ok(DVector::from_vec(Vec::<f64>::deserialize(de)?))
    }
}

pub mod opt_dvector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<DVector<f64>>, ser: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => ser.serialize_some(v.as_slice()),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<Option<DVector<f64>>, D::Error> {
        Ok(Option::<Vec<f64>>::deserialize(de)?.map(DVector::from_vec))
    }
}

pub mod dmatrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(m.column_iter().map(|c| c.iter().copied().collect::<Vec<f64>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<DMatrix<f64>, D::Error> {
        let cols = Vec::<Vec<f64>>::deserialize(de)?;
        from_columns(&cols).map_err(D::Error::custom)
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
        let nrows = cols.first().map_or(0, |c| c.len());
        if let Some(bad) = cols.iter().position(|c| c.len() != nrows) {
            return Err(format!(
                "column {bad} has {} entries, expected {nrows}",
                cols[bad].len()
            ));
        }
        Ok(DMatrix::from_fn(nrows, cols.len(), |i, j| cols[j][i]))
    }
}

pub mod opt_dmatrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<DMatrix<f64>>, ser: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => ser.serialize_some(
                &m.column_iter()
                    .map(|c| c.iter().copied().collect::<Vec<f64>>())
                    .collect::<Vec<_>>(),
            ),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<Option<DMatrix<f64>>, D::Error> {
        match Option::<Vec<Vec<f64>>>::deserialize(de)? {
            Some(cols) => super::dmatrix::from_columns(&cols)
                .map(Some)
                .map_err(D::Error::custom),
            None => Ok(None),
        }
    }
}

pub mod dvector_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[DVector<f64>], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|x| x.as_slice()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<DVector<f64>>, D::Error> {
        Ok(Vec::<Vec<f64>>::deserialize(de)?
            .into_iter()
            .map(DVector::from_vec)
            .collect())
    }
}
