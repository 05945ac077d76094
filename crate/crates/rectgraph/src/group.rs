//! The group `G = Z^m ⋊ Z/2` acting on site space, its edge alphabet, and the
//! mass grading that identifies the index-two subgroup with vectors of mass
//! 0 or -2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Element of `Z^m` over the formal basis `e_1 .. e_m` (indices 0-based in code).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn zero(m: usize) -> Self {
        IntVector(vec![0; m])
    }

    /// `e_i` (0-based).
    pub fn basis(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        IntVector(v)
    }

    /// `e_i - e_j`.
    pub fn diff(m: usize, i: usize, j: usize) -> Self {
        let mut v = vec![0; m];
        v[i] += 1;
        v[j] -= 1;
        IntVector(v)
    }

    /// `-e_i - e_j` (also valid for `i == j`, giving `-2 e_i`).
    pub fn neg_sum(m: usize, i: usize, j: usize) -> Self {
        let mut v = vec![0; m];
        v[i] -= 1;
        v[j] -= 1;
        IntVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Coordinate sum; the mass grading of the group.
    pub fn mass(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        debug_assert_eq!(self.len(), other.len());
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        debug_assert_eq!(self.len(), other.len());
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, c: i64) -> IntVector {
        IntVector(self.0.iter().map(|x| c * x).collect())
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for IntVector {
    /// Formal combination like `e1-3e2+e3`, 1-based as in the written theory.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c > 0 && !first {
                write!(f, "+")?;
            }
            match c {
                1 => {}
                -1 => write!(f, "-")?,
                _ => write!(f, "{c}")?,
            }
            write!(f, "e{}", i + 1)?;
            first = false;
        }
        Ok(())
    }
}

/// Sign component: `+1` (pure translation) or the flip `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Tau,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Tau => -1,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Tau
        }
    }
}

/// Group element `(a, σ)`: the map `x -> a + σx` on `Z^m`, with `aτ = -τa`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub translation: IntVector,
    pub sign: Sign,
}

impl GroupElement {
    pub fn identity(m: usize) -> Self {
        GroupElement {
            translation: IntVector::zero(m),
            sign: Sign::Plus,
        }
    }

    pub fn translation(a: IntVector) -> Self {
        GroupElement {
            translation: a,
            sign: Sign::Plus,
        }
    }

    pub fn flipped(a: IntVector) -> Self {
        GroupElement {
            translation: a,
            sign: Sign::Tau,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sign == Sign::Plus && self.translation.is_zero()
    }

    pub fn m(&self) -> usize {
        self.translation.len()
    }
}

/// `g ∘ h`: apply `h` first. `(a,σ)∘(b,ρ) = (a + σb, σρ)`.
pub fn compose(g: &GroupElement, h: &GroupElement) -> Result<GroupElement, Error> {
    if g.m() != h.m() {
        return Err(Error::Dimension(format!(
            "compose: {} vs {}",
            g.m(),
            h.m()
        )));
    }
    let b = match g.sign {
        Sign::Plus => h.translation.clone(),
        Sign::Tau => h.translation.neg(),
    };
    Ok(GroupElement {
        translation: g.translation.add(&b),
        sign: g.sign.times(h.sign),
    })
}

/// Two-sided inverse: `(a,+)^{-1} = (-a,+)`, `(a,τ)^{-1} = (a,τ)`.
pub fn invert(g: &GroupElement) -> GroupElement {
    match g.sign {
        Sign::Plus => GroupElement::translation(g.translation.neg()),
        Sign::Tau => g.clone(),
    }
}

/// Edge alphabet of the Cayley graphs: black `e_i - e_j` and red `(-e_i-e_j)τ`,
/// `i != j`. Red labels are unordered and stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeLabel {
    Black { i: usize, j: usize },
    Red { i: usize, j: usize },
}

impl EdgeLabel {
    pub fn black(i: usize, j: usize) -> Result<Self, Error> {
        if i == j {
            return Err(Error::Invalid("black edge needs i != j".into()));
        }
        Ok(EdgeLabel::Black { i, j })
    }

    pub fn red(i: usize, j: usize) -> Result<Self, Error> {
        if i == j {
            return Err(Error::Invalid("red edge needs i != j".into()));
        }
        Ok(EdgeLabel::Red {
            i: i.min(j),
            j: i.max(j),
        })
    }

    pub fn is_red(&self) -> bool {
        matches!(self, EdgeLabel::Red { .. })
    }

    pub fn indices(&self) -> (usize, usize) {
        match *self {
            EdgeLabel::Black { i, j } | EdgeLabel::Red { i, j } => (i, j),
        }
    }

    /// The label as a group element.
    pub fn group_element(&self, m: usize) -> GroupElement {
        match *self {
            EdgeLabel::Black { i, j } => GroupElement::translation(IntVector::diff(m, i, j)),
            EdgeLabel::Red { i, j } => GroupElement::flipped(IntVector::neg_sum(m, i, j)),
        }
    }

    /// Translation part as a vector in `Z^m`.
    pub fn vector(&self, m: usize) -> IntVector {
        match *self {
            EdgeLabel::Black { i, j } => IntVector::diff(m, i, j),
            EdgeLabel::Red { i, j } => IntVector::neg_sum(m, i, j),
        }
    }

    /// `black(i,j)^{-1} = black(j,i)`; red labels are involutions.
    pub fn invert(&self) -> EdgeLabel {
        match *self {
            EdgeLabel::Black { i, j } => EdgeLabel::Black { i: j, j: i },
            red @ EdgeLabel::Red { .. } => red,
        }
    }

    /// All labels over `m` indices: `m(m-1)` black plus `m(m-1)/2` red.
    ///
    /// This alphabet is the single extension point for higher-degree
    /// variants of the graph family: those replace it with a larger edge
    /// set while everything downstream (adjacency, lifting, enumeration)
    /// consumes only the label list.
    pub fn alphabet(m: usize) -> Vec<EdgeLabel> {
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    out.push(EdgeLabel::Black { i, j });
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                out.push(EdgeLabel::Red { i, j });
            }
        }
        out
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EdgeLabel::Black { i, j } => write!(f, "e{}-e{}", i + 1, j + 1),
            EdgeLabel::Red { i, j } => write!(f, "-e{}-e{}", i + 1, j + 1),
        }
    }
}

/// Composite of a path read left to right: returns `l_k ∘ ... ∘ l_1`.
pub fn path_element(m: usize, labels: &[EdgeLabel]) -> GroupElement {
    let mut g = GroupElement::identity(m);
    for l in labels {
        g = compose(&l.group_element(m), &g).expect("fixed m");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector(v.to_vec())
    }

    #[test]
    fn mass_examples() {
        assert_eq!(iv(&[1, -1]).mass(), 0);
        assert_eq!(iv(&[-1, -1]).mass(), -2);
        assert_eq!(iv(&[1, -3, 1, 1]).mass(), 0);
    }

    #[test]
    fn composition_rules() {
        let m = 3;
        // (e1-e2,+) ∘ (e2-e3,+) = (e1-e3,+)
        let g = GroupElement::translation(IntVector::diff(m, 0, 1));
        let h = GroupElement::translation(IntVector::diff(m, 1, 2));
        assert_eq!(
            compose(&g, &h).unwrap(),
            GroupElement::translation(IntVector::diff(m, 0, 2))
        );
        // (-e1-e2,τ) ∘ (e3-e4,+) = (-e1-e2-e3+e4, τ)
        let m = 4;
        let g = GroupElement::flipped(IntVector::neg_sum(m, 0, 1));
        let h = GroupElement::translation(IntVector::diff(m, 2, 3));
        assert_eq!(
            compose(&g, &h).unwrap(),
            GroupElement::flipped(iv(&[-1, -1, -1, 1]))
        );
        // (aτ)^2 = identity
        let sq = compose(&g, &g).unwrap();
        assert!(sq.is_identity());
    }

    #[test]
    fn compose_dimension_mismatch() {
        let g = GroupElement::identity(2);
        let h = GroupElement::identity(3);
        assert!(compose(&g, &h).is_err());
    }

    #[test]
    fn path_sign_is_red_parity() {
        // the composite of any label sequence carries τ exactly when the
        // red count is odd
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let m = 4;
        let alphabet = EdgeLabel::alphabet(m);
        for _ in 0..200 {
            let len = rng.gen_range(1..=7);
            let labels: Vec<EdgeLabel> = (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            let reds = labels.iter().filter(|l| l.is_red()).count();
            let g = path_element(m, &labels);
            assert_eq!(
                g.sign,
                if reds % 2 == 0 { Sign::Plus } else { Sign::Tau }
            );
            // the mass grading agrees with the sign
            assert_eq!(g.translation.mass(), if reds % 2 == 0 { 0 } else { -2 });
        }
    }

    #[test]
    fn inverse_is_two_sided() {
        let m = 4;
        for g in [
            GroupElement::translation(iv(&[2, -1, 0, -1])),
            GroupElement::flipped(iv(&[1, 0, -3, 0])),
        ] {
            let gi = invert(&g);
            assert!(compose(&g, &gi).unwrap().is_identity());
            assert!(compose(&gi, &g).unwrap().is_identity());
        }
    }

    #[test]
    fn label_inverse() {
        let b = EdgeLabel::black(0, 1).unwrap();
        assert_eq!(b.invert(), EdgeLabel::Black { i: 1, j: 0 });
        let r = EdgeLabel::red(1, 0).unwrap();
        assert_eq!(r, EdgeLabel::Red { i: 0, j: 1 });
        assert_eq!(r.invert(), r);
        assert!(EdgeLabel::black(2, 2).is_err());
        assert!(EdgeLabel::red(2, 2).is_err());
    }

    #[test]
    fn alphabet_size() {
        assert_eq!(EdgeLabel::alphabet(4).len(), 12 + 6);
    }

    #[test]
    fn path_element_examples() {
        let m = 4;
        let g = path_element(m, &[EdgeLabel::black(0, 1).unwrap()]);
        assert_eq!(g, GroupElement::translation(IntVector::diff(m, 0, 1)));
        // three black steps with a common lower index compose to e1-3e2+e3+e4
        let g = path_element(
            m,
            &[
                EdgeLabel::black(0, 1).unwrap(),
                EdgeLabel::black(2, 1).unwrap(),
                EdgeLabel::black(3, 1).unwrap(),
            ],
        );
        assert_eq!(g, GroupElement::translation(iv(&[1, -3, 1, 1])));
    }

    #[test]
    fn display_forms() {
        assert_eq!(iv(&[1, -3, 1, 1]).to_string(), "e1-3e2+e3+e4");
        assert_eq!(iv(&[0, 0]).to_string(), "0");
        assert_eq!(EdgeLabel::black(0, 1).unwrap().to_string(), "e1-e2");
        assert_eq!(EdgeLabel::red(0, 2).unwrap().to_string(), "-e1-e3");
    }
}
