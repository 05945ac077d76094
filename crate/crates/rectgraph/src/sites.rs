//! Tangential site sets and the exact energy machinery attached to them.
//!
//! A `SiteSet` holds the `m` vectors `v_1 .. v_m` in `Q^n` together with their
//! cached Gram matrix. The linear map `π` sends the formal basis vector `e_i`
//! to `v_i`; on quadratic forms it substitutes `e_i e_j -> (v_i, v_j)`. The
//! energy of a group element is the Gram evaluation of its quadratic
//! invariant and is the quantity preserved along graph edges.

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::group::{GroupElement, IntVector, Sign};
use crate::quadform::{c_form, QuadForm};
use crate::ratvec::{self, RatVec};
use crate::scalar::{format_scalar, is_integer, ratio, scalar_from_json, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSet {
    n: usize,
    m: usize,
    sites: Vec<RatVec>,
    gram: Vec<Vec<Scalar>>,
}

impl SiteSet {
    pub fn new(n: usize, sites: Vec<RatVec>) -> Result<Self, Error> {
        let m = sites.len();
        if n < 1 || m < n {
            return Err(Error::Invalid(format!(
                "need m >= n >= 1, got n = {n}, m = {m}"
            )));
        }
        if sites.iter().any(|v| v.len() != n) {
            return Err(Error::Dimension("site of wrong dimension".into()));
        }
        let gram = (0..m)
            .map(|i| (0..m).map(|j| ratvec::dot(&sites[i], &sites[j])).collect())
            .collect();
        Ok(SiteSet { n, m, sites, gram })
    }

    pub fn from_integer_sites(n: usize, sites: &[Vec<i64>]) -> Result<Self, Error> {
        SiteSet::new(
            n,
            sites
                .iter()
                .map(|v| v.iter().map(|&x| crate::scalar::int(x)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn site(&self, i: usize) -> &RatVec {
        &self.sites[i]
    }

    pub fn sites(&self) -> &[RatVec] {
        &self.sites
    }

    pub fn gram(&self, i: usize, j: usize) -> &Scalar {
        &self.gram[i][j]
    }

    pub fn all_integral(&self) -> bool {
        self.sites.iter().flatten().all(is_integer)
    }

    /// Index of a point inside the site set, if any.
    pub fn position_of(&self, x: &[Scalar]) -> Option<usize> {
        self.sites.iter().position(|v| v.as_slice() == x)
    }

    /// `π(Σ a_i e_i) = Σ a_i v_i`, exactly.
    pub fn pi_map(&self, a: &IntVector) -> Result<RatVec, Error> {
        if a.len() != self.m {
            return Err(Error::Dimension(format!(
                "pi: vector has {} coefficients, m = {}",
                a.len(),
                self.m
            )));
        }
        let mut out = ratvec::zero(self.n);
        for (i, &c) in a.0.iter().enumerate() {
            if c != 0 {
                out = ratvec::add(&out, &ratvec::scale(&self.sites[i], &crate::scalar::int(c)));
            }
        }
        Ok(out)
    }

    pub fn pi_map_rat(&self, a: &[Scalar]) -> Result<RatVec, Error> {
        if a.len() != self.m {
            return Err(Error::Dimension("pi: wrong length".into()));
        }
        let mut out = ratvec::zero(self.n);
        for (i, c) in a.iter().enumerate() {
            if !c.is_zero() {
                out = ratvec::add(&out, &ratvec::scale(&self.sites[i], c));
            }
        }
        Ok(out)
    }

    /// Group action on points: `(a,+)·x = -π(a) + x` and `(a,τ)·x = -π(a) - x`.
    /// The sign convention matches the conservation-law orientation of the
    /// underlying dynamics.
    pub fn act_point(&self, g: &GroupElement, x: &[Scalar]) -> Result<RatVec, Error> {
        if x.len() != self.n {
            return Err(Error::Dimension("act_point: point dimension".into()));
        }
        let t = ratvec::neg(&self.pi_map(&g.translation)?);
        Ok(match g.sign {
            Sign::Plus => ratvec::add(&t, x),
            Sign::Tau => ratvec::sub(&t, x),
        })
    }

    /// Gram substitution `e_i e_j -> (v_i, v_j)`, linear in the form.
    pub fn quad_eval(&self, q: &QuadForm) -> Result<Scalar, Error> {
        if q.m() > self.m {
            return Err(Error::Dimension(format!(
                "form over {} variables, m = {}",
                q.m(),
                self.m
            )));
        }
        let mut out = Scalar::zero();
        for (&(i, j), v) in q.iter() {
            out += v * &self.gram[i][j];
        }
        Ok(out)
    }

    /// Energy `K(g) = (σ/2)(|π(a)|^2 + Σ a_i |v_i|^2)`, the Gram evaluation of
    /// the quadratic invariant.
    pub fn k_energy(&self, g: &GroupElement) -> Result<Scalar, Error> {
        self.quad_eval(&c_form(g))
    }

    /// Energy on rational pairs `(a, σ)`, `a ∈ Q^m`; used when lifting from a
    /// rational preimage of a geometric root.
    pub fn k_energy_rat(&self, a: &[Scalar], sign: Sign) -> Result<Scalar, Error> {
        let pa = self.pi_map_rat(a)?;
        let mut diag = Scalar::zero();
        for (i, c) in a.iter().enumerate() {
            diag += c * &self.gram[i][i];
        }
        Ok((ratvec::norm2(&pa) + diag) * ratio(sign.as_i64(), 2))
    }

    /// Both sides of the energy composition law for `g = (b,ρ)` acting on
    /// `u = (a,σ)`:
    /// `K(g∘u)` and `σK(g) + K(u) + (ρ-1)(σ/2)|π(a)|^2 + σ(π(a),π(b))`.
    /// The two must agree identically.
    pub fn k_composition_check(
        &self,
        g: &GroupElement,
        u: &GroupElement,
    ) -> Result<(Scalar, Scalar), Error> {
        let composed = crate::group::compose(g, u)?;
        let lhs = self.k_energy(&composed)?;
        let sigma = crate::scalar::int(u.sign.as_i64());
        let rho = crate::scalar::int(g.sign.as_i64());
        let pa = self.pi_map(&u.translation)?;
        let pb = self.pi_map(&g.translation)?;
        let rhs = &sigma * self.k_energy(g)?
            + self.k_energy(u)?
            + (rho - crate::scalar::int(1)) * &sigma * ratio(1, 2) * ratvec::norm2(&pa)
            + sigma * ratvec::dot(&pa, &pb);
        Ok((lhs, rhs))
    }
}

impl Serialize for SiteSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("SiteSet", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        let rows: Vec<Vec<String>> = self
            .sites
            .iter()
            .map(|v| v.iter().map(format_scalar).collect())
            .collect();
        st.serialize_field("sites", &rows)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SiteSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            m: usize,
            sites: Vec<Vec<serde_json::Value>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.sites.len() != raw.m {
            return Err(D::Error::custom(format!(
                "declared m = {} but {} sites given",
                raw.m,
                raw.sites.len()
            )));
        }
        let mut sites = Vec::with_capacity(raw.m);
        for row in &raw.sites {
            let mut v = Vec::with_capacity(raw.n);
            for cell in row {
                v.push(scalar_from_json(cell).map_err(D::Error::custom)?);
            }
            sites.push(v);
        }
        SiteSet::new(raw.n, sites).map_err(D::Error::custom)
    }
}
