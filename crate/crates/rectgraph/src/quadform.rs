//! Sparse symmetric quadratic forms in the formal variables `e_1 .. e_m`.
//!
//! A form is stored as an upper-triangular map `(i,j) -> q_ij` with `i <= j`;
//! the mixed monomial `e_i e_j` (`i < j`) carries one combined coefficient, so
//! the square of a vector contributes `2 a_i a_j` there.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::group::{GroupElement, IntVector};
use crate::scalar::{format_scalar, int, is_integer, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuadForm {
    m: usize,
    coeffs: BTreeMap<(usize, usize), Scalar>,
}

impl QuadForm {
    pub fn zero(m: usize) -> Self {
        QuadForm {
            m,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Scalar {
        let key = (i.min(j), i.max(j));
        self.coeffs.get(&key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: Scalar) {
        let key = (i.min(j), i.max(j));
        if v.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, v);
        }
    }

    pub fn add_coeff(&mut self, i: usize, j: usize, v: &Scalar) {
        let key = (i.min(j), i.max(j));
        let cur = self.coeffs.remove(&key).unwrap_or_else(Scalar::zero) + v;
        if !cur.is_zero() {
            self.coeffs.insert(key, cur);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &QuadForm) -> QuadForm {
        debug_assert_eq!(self.m, other.m);
        let mut out = self.clone();
        for (&(i, j), v) in &other.coeffs {
            out.add_coeff(i, j, v);
        }
        out
    }

    pub fn sub(&self, other: &QuadForm) -> QuadForm {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> QuadForm {
        if c.is_zero() {
            return QuadForm::zero(self.m);
        }
        QuadForm {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, v)| (k, v * c))
                .collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> QuadForm {
        self.scale(&int(c))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(is_integer)
    }

    /// Symmetric product of two linear forms: `(Σ u_i e_i)(Σ v_j e_j)`.
    pub fn from_linear_product(u: &IntVector, v: &IntVector) -> QuadForm {
        debug_assert_eq!(u.len(), v.len());
        let m = u.len();
        let mut out = QuadForm::zero(m);
        for i in 0..m {
            if u.0[i] == 0 {
                continue;
            }
            for j in 0..m {
                if v.0[j] == 0 {
                    continue;
                }
                out.add_coeff(i, j, &int(u.0[i] * v.0[j]));
            }
        }
        out
    }

    /// Extracts the coefficients of the mixed monomials `e_u e_h` (`h != u`),
    /// as a linear form over the basis; `e_u^2` is excluded.
    pub fn cu_extract(&self, u: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.m];
        for (&(i, j), v) in &self.coeffs {
            if i == j {
                continue;
            }
            if i == u {
                out[j] = v.clone();
            } else if j == u {
                out[i] = v.clone();
            }
        }
        out
    }
}

/// Full symmetric square `a^2`.
pub fn square_form(a: &IntVector) -> QuadForm {
    QuadForm::from_linear_product(a, a)
}

/// The diagonal lift `a -> Σ a_i e_i^2`.
pub fn l2_form(a: &IntVector) -> QuadForm {
    let mut out = QuadForm::zero(a.len());
    for (i, &c) in a.0.iter().enumerate() {
        if c != 0 {
            out.set_coeff(i, i, int(c));
        }
    }
    out
}

/// The quadratic invariant of a group element: `(σ/2)(a^2 + a^(2))`.
/// Integral whenever the translation part is integral.
pub fn c_form(g: &GroupElement) -> QuadForm {
    let a = &g.translation;
    let sum = square_form(a).add(&l2_form(a));
    sum.scale(&crate::scalar::ratio(g.sign.as_i64(), 2))
}

impl fmt::Display for QuadForm {
    /// Readable form like `e1^2-2e1e3+e3^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), v) in &self.coeffs {
            let s = format_scalar(v);
            if !s.starts_with('-') && !first {
                write!(f, "+")?;
            }
            if s == "1" {
                // coefficient 1 is implicit
            } else if s == "-1" {
                write!(f, "-")?;
            } else {
                write!(f, "{s}")?;
            }
            if i == j {
                write!(f, "e{}^2", i + 1)?;
            } else {
                write!(f, "e{}e{}", i + 1, j + 1)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for QuadForm {
    /// Sparse JSON object `{"i,j": "p/q", ...}` with 1-based indices.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (&(i, j), v) in &self.coeffs {
            map.serialize_entry(&format!("{},{}", i + 1, j + 1), &format_scalar(v))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for QuadForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, serde_json::Value> = BTreeMap::deserialize(deserializer)?;
        let mut out = QuadForm::zero(0);
        let mut max_index = 0usize;
        for (k, v) in &raw {
            let (i, j) = parse_key(k).map_err(D::Error::custom)?;
            max_index = max_index.max(i).max(j);
            let c = crate::scalar::scalar_from_json(v).map_err(D::Error::custom)?;
            out.add_coeff(i, j, &c);
        }
        out.m = max_index + 1;
        Ok(out)
    }
}

fn parse_key(k: &str) -> Result<(usize, usize), Error> {
    let (a, b) = k
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("bad monomial key {k:?}")))?;
    let i: usize = a
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad index {a:?}")))?;
    let j: usize = b
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad index {b:?}")))?;
    if i == 0 || j == 0 {
        return Err(Error::Parse("monomial indices are 1-based".into()));
    }
    Ok((i - 1, j - 1))
}

impl QuadForm {
    /// Parses the sparse JSON object form, fixing the variable count to `m`
    /// when it exceeds the largest index mentioned.
    pub fn from_json_str(s: &str, m: Option<usize>) -> Result<QuadForm, Error> {
        let mut q: QuadForm = serde_json::from_str(s)?;
        if let Some(m) = m {
            if q.m > m {
                return Err(Error::Dimension(format!(
                    "form mentions e{} but m = {m}",
                    q.m
                )));
            }
            q.m = m;
        }
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Sign;

    fn iv(v: &[i64]) -> IntVector {
        IntVector(v.to_vec())
    }

    #[test]
    fn square_and_diagonal_lift() {
        // a = e1+e2: a^2 = e1^2+e2^2+2e1e2, a^(2) = e1^2+e2^2
        let a = iv(&[1, 1]);
        assert_eq!(square_form(&a).to_string(), "e1^2+2e1e2+e2^2");
        assert_eq!(l2_form(&a).to_string(), "e1^2+e2^2");
        // a = e_i: both agree
        let e = iv(&[0, 1]);
        assert_eq!(square_form(&e), l2_form(&e));
        // a = -2e1
        let a = iv(&[-2, 0]);
        assert_eq!(square_form(&a).to_string(), "4e1^2");
        assert_eq!(l2_form(&a).to_string(), "-2e1^2");
    }

    #[test]
    fn c_form_examples() {
        // C(e1+e2) = e1^2+e2^2+e1e2
        let g = GroupElement::translation(iv(&[1, 1]));
        assert_eq!(c_form(&g).to_string(), "e1^2+e1e2+e2^2");
        // C(e1-e2) = e1^2-e1e2
        let g = GroupElement::translation(iv(&[1, -1]));
        assert_eq!(c_form(&g).to_string(), "e1^2-e1e2");
        // C(-2e1 τ) = -e1^2
        let g = GroupElement::flipped(iv(&[-2, 0]));
        assert_eq!(c_form(&g).to_string(), "-e1^2");
        // C((-e1-e3)τ) = -e1e3
        let g = GroupElement::flipped(iv(&[-1, 0, -1]));
        assert_eq!(c_form(&g).to_string(), "-e1e3");
    }

    #[test]
    fn c_form_is_integral_on_integral_input() {
        let g = GroupElement {
            translation: iv(&[3, -2, 1, -4]),
            sign: Sign::Tau,
        };
        assert!(c_form(&g).is_integral());
    }

    #[test]
    fn cu_extraction() {
        // Q = e1e2 + 3 e2e3 + e2^2, u = 2 (0-based 1) -> e1 + 3e3
        let mut q = QuadForm::zero(3);
        q.set_coeff(0, 1, int(1));
        q.set_coeff(1, 2, int(3));
        q.set_coeff(1, 1, int(1));
        assert_eq!(q.cu_extract(1), vec![int(1), int(0), int(3)]);
        // Q = e1^2, u = 1 -> 0
        let mut q = QuadForm::zero(2);
        q.set_coeff(0, 0, int(1));
        assert!(q.cu_extract(0).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn json_round_trip_and_shape() {
        let mut q = QuadForm::zero(3);
        q.set_coeff(0, 0, int(1));
        q.set_coeff(0, 2, int(-2));
        q.set_coeff(2, 2, int(1));
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"1,1":"1","1,3":"-2","3,3":"1"}"#);
        let back = QuadForm::from_json_str(&s, Some(3)).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn addition_cancels_exactly() {
        let a = iv(&[1, -1, 0]);
        let q = square_form(&a);
        assert!(q.sub(&q).is_zero());
    }
}
