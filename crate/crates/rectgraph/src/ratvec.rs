//! Small helpers for exact rational vectors.

use num_traits::Zero;

use crate::scalar::Scalar;

pub type RatVec = Vec<Scalar>;

pub fn zero(n: usize) -> RatVec {
    vec![Scalar::zero(); n]
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> RatVec {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> RatVec {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[Scalar]) -> RatVec {
    a.iter().map(|x| -x).collect()
}

pub fn scale(a: &[Scalar], c: &Scalar) -> RatVec {
    a.iter().map(|x| x * c).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).fold(Scalar::zero(), |s, t| s + t)
}

pub fn norm2(a: &[Scalar]) -> Scalar {
    dot(a, a)
}

pub fn is_zero(a: &[Scalar]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn format(a: &[Scalar]) -> String {
    let parts: Vec<String> = a.iter().map(crate::scalar::format_scalar).collect();
    format!("({})", parts.join(", "))
}

/// Serde helpers rendering rational vectors as `"p/q"` strings.
pub mod serde_points {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::RatVec;

    pub fn serialize<S: Serializer>(points: &[RatVec], ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = points
            .iter()
            .map(|p| p.iter().map(crate::scalar::format_scalar).collect())
            .collect();
        serde::Serialize::serialize(&rows, ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<RatVec>, D::Error> {
        let rows: Vec<Vec<serde_json::Value>> = Deserialize::deserialize(de)?;
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|v| crate::scalar::scalar_from_json(v).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}
