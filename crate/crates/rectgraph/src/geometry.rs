//! The geometric rectangle graph on exact points of `Q^n`.
//!
//! Two points are adjacent when they complete a rectangle with two sites:
//! either as adjacent rectangle corners (a black edge, `q = p + v_i - v_j`)
//! or as opposite corners (a red edge, `q = -p + v_i + v_j`). The incidence
//! conditions confine non-isolated points to finitely many spheres and
//! hyperplane pairs, which is what makes a finite window search complete.
//!
//! Orientation note for black edges: the pair `(i, j)` comes with two
//! parallel hyperplanes. The source condition used throughout
//! (`black_edge_holds`) is `(p, v_i - v_j) = (v_i, v_j) - |v_j|^2`, the plane
//! through `v_j`; the target `q = p + v_i - v_j` then lies on the plane
//! through `v_i`, which is the one `locus_data` reports. Either plane of the
//! pair seeds the same candidate set because the ordered index scan covers
//! both orientations.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::group::EdgeLabel;
use crate::ratvec::{self, RatVec};
use crate::scalar::{int, ratio, Scalar};
use crate::sites::SiteSet;

/// `true` iff `(p, v_i - v_j) = (v_i, v_j) - |v_j|^2`; then `q = p + v_i - v_j`
/// completes the rectangle and `|p|^2 + |v_i|^2 = |q|^2 + |v_j|^2`.
pub fn black_edge_holds(s: &SiteSet, p: &[Scalar], i: usize, j: usize) -> bool {
    assert_ne!(i, j, "black edge needs i != j");
    let d = ratvec::sub(s.site(i), s.site(j));
    ratvec::dot(p, &d) == s.gram(i, j) - s.gram(j, j)
}

/// `true` iff `|p|^2 - (p, v_i + v_j) = -(v_i, v_j)`; then `q = -p + v_i + v_j`
/// satisfies `|p|^2 + |q|^2 = |v_i|^2 + |v_j|^2` (p and q span a diameter of
/// the sphere attached to the pair).
pub fn red_edge_holds(s: &SiteSet, p: &[Scalar], i: usize, j: usize) -> bool {
    assert_ne!(i, j, "red edge needs i != j");
    let sum = ratvec::add(s.site(i), s.site(j));
    ratvec::norm2(p) - ratvec::dot(p, &sum) == -s.gram(i, j)
}

/// All rectangle-graph neighbors of `p`, with the edge label that produced
/// each one.
pub fn neighbors(s: &SiteSet, p: &[Scalar]) -> Vec<(RatVec, EdgeLabel)> {
    let m = s.m();
    let mut out: Vec<(RatVec, EdgeLabel)> = Vec::new();
    let mut seen: HashSet<(Vec<Scalar>, EdgeLabel)> = HashSet::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            if black_edge_holds(s, p, i, j) {
                let q = ratvec::add(p, &ratvec::sub(s.site(i), s.site(j)));
                let label = EdgeLabel::Black { i, j };
                if seen.insert((q.clone(), label)) {
                    out.push((q, label));
                }
            }
            if i < j && red_edge_holds(s, p, i, j) {
                let q = ratvec::sub(&ratvec::add(s.site(i), s.site(j)), p);
                let label = EdgeLabel::Red { i, j };
                if seen.insert((q.clone(), label)) {
                    out.push((q, label));
                }
            }
        }
    }
    out
}

/// Geometric locus carved out by a single edge label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Locus {
    /// Red pair: sphere with the two sites as diameter endpoints.
    Sphere { center: Vec<String>, radius2: String },
    /// Black pair: hyperplane through `v_i` orthogonal to `v_i - v_j`.
    Hyperplane { normal: Vec<String>, offset: String },
}

/// Sphere or hyperplane data for an edge label.
pub fn locus_data(s: &SiteSet, label: &EdgeLabel) -> Locus {
    match *label {
        EdgeLabel::Red { i, j } => {
            let center = ratvec::scale(&ratvec::add(s.site(i), s.site(j)), &ratio(1, 2));
            let d = ratvec::sub(s.site(i), s.site(j));
            let radius2 = ratvec::norm2(&d) * ratio(1, 4);
            Locus::Sphere {
                center: center.iter().map(crate::scalar::format_scalar).collect(),
                radius2: crate::scalar::format_scalar(&radius2),
            }
        }
        EdgeLabel::Black { i, j } => {
            let normal = ratvec::sub(s.site(i), s.site(j));
            let offset = ratvec::dot(s.site(i), &normal);
            Locus::Hyperplane {
                normal: normal.iter().map(crate::scalar::format_scalar).collect(),
                offset: crate::scalar::format_scalar(&offset),
            }
        }
    }
}

/// Window onto the lattice `(1/denom) Z^n`: coordinates range over
/// `[lo_k, hi_k]` and must have denominator dividing `denom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub denom: u32,
}

impl BoxSpec {
    pub fn cube(n: usize, lo: i64, hi: i64) -> Self {
        BoxSpec {
            lo: vec![lo; n],
            hi: vec![hi; n],
            denom: 1,
        }
    }

    /// Parses the `LO:HI` range text into a cube window.
    pub fn parse_cube(text: &str, n: usize, denom: u32) -> Result<Self, Error> {
        let (lo, hi) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("box must look like LO:HI, got {text:?}")))?;
        let lo: i64 = lo
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad box low bound {lo:?}")))?;
        let hi: i64 = hi
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad box high bound {hi:?}")))?;
        if lo > hi {
            return Err(Error::Parse(format!("empty box {text:?}")));
        }
        if denom == 0 {
            return Err(Error::Parse("window denominator must be positive".into()));
        }
        Ok(BoxSpec {
            lo: vec![lo; n],
            hi: vec![hi; n],
            denom,
        })
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    fn scaled_range(&self, k: usize) -> (BigInt, BigInt) {
        let q = BigInt::from(self.denom);
        (BigInt::from(self.lo[k]) * &q, BigInt::from(self.hi[k]) * &q)
    }

    /// Is `x` a lattice point of the window?
    pub fn contains(&self, x: &[Scalar]) -> bool {
        if x.len() != self.n() {
            return false;
        }
        let q = int(self.denom as i64);
        x.iter().enumerate().all(|(k, c)| {
            let y = c * &q;
            crate::scalar::is_integer(&y) && *c >= int(self.lo[k]) && *c <= int(self.hi[k])
        })
    }

    /// Is `x` inside the coordinate ranges (lattice membership not required)?
    pub fn within_bounds(&self, x: &[Scalar]) -> bool {
        x.len() == self.n()
            && x.iter()
                .enumerate()
                .all(|(k, c)| *c >= int(self.lo[k]) && *c <= int(self.hi[k]))
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
fn exact_sqrt(x: &Scalar) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let np = x.numer().sqrt();
    let dp = x.denom().sqrt();
    if &(&np * &np) == x.numer() && &(&dp * &dp) == x.denom() {
        Some(Scalar::new(np, dp))
    } else {
        None
    }
}

/// Lattice points of the window lying on at least one sphere or hyperplane.
///
/// Only such points can carry edges, so they are the complete seed set for
/// the component search. Enumeration fixes the first `n - 1` scaled
/// coordinates and solves the defining equation for the last one exactly.
fn candidate_points(s: &SiteSet, window: &BoxSpec) -> Vec<RatVec> {
    let n = s.n();
    let q = int(window.denom as i64);
    let mut out: HashSet<RatVec> = HashSet::new();

    // Distinct loci: hyperplanes (x·d = c) and spheres (|x|^2 - x·s + c = 0).
    let mut planes: Vec<(RatVec, Scalar)> = Vec::new();
    let mut spheres: Vec<(RatVec, Scalar)> = Vec::new();
    for i in 0..s.m() {
        for j in 0..s.m() {
            if i == j {
                continue;
            }
            let d = ratvec::sub(s.site(i), s.site(j));
            planes.push((d, s.gram(i, j) - s.gram(j, j)));
            if i < j {
                let sum = ratvec::add(s.site(i), s.site(j));
                spheres.push((sum, s.gram(i, j).clone()));
            }
        }
    }

    let mut prefix = vec![BigInt::zero(); n.saturating_sub(1)];
    enumerate_prefix(window, 0, &mut prefix, &mut |prefix| {
        let xp: Vec<Scalar> = prefix
            .iter()
            .map(|y| Scalar::new(y.clone(), BigInt::from(window.denom)))
            .collect();
        let (lo_n, hi_n) = window.scaled_range(n - 1);
        for (d, c) in &planes {
            // x·d = c with the last coordinate unknown.
            let partial = ratvec::dot(&xp, &d[..n - 1]);
            if d[n - 1].is_zero() {
                if &partial == c {
                    let mut y = lo_n.clone();
                    while y <= hi_n {
                        let mut pt = xp.clone();
                        pt.push(Scalar::new(y.clone(), BigInt::from(window.denom)));
                        out.insert(pt);
                        y += 1;
                    }
                }
            } else {
                let xn = (c - partial) / &d[n - 1];
                let scaled = &xn * &q;
                if crate::scalar::is_integer(&scaled) {
                    let y = scaled.to_integer();
                    if y >= lo_n && y <= hi_n {
                        let mut pt = xp.clone();
                        pt.push(xn);
                        out.insert(pt);
                    }
                }
            }
        }
        for (sum, c) in &spheres {
            // x_n^2 - sum_n x_n + (|xp|^2 - xp·sum' + c) = 0
            let rest = ratvec::norm2(&xp) - ratvec::dot(&xp, &sum[..n - 1]) + c;
            let b = &sum[n - 1];
            let disc = b * b - int(4) * &rest;
            let Some(root) = exact_sqrt(&disc) else {
                continue;
            };
            for sign in [1i64, -1] {
                let xn = (b + int(sign) * &root) * ratio(1, 2);
                let scaled = &xn * &q;
                if crate::scalar::is_integer(&scaled) {
                    let y = scaled.to_integer();
                    if y >= lo_n && y <= hi_n {
                        let mut pt = xp.clone();
                        pt.push(xn);
                        out.insert(pt);
                    }
                }
            }
        }
    });

    let mut v: Vec<RatVec> = out.into_iter().collect();
    v.sort();
    v
}

fn enumerate_prefix(
    window: &BoxSpec,
    k: usize,
    prefix: &mut Vec<BigInt>,
    f: &mut impl FnMut(&[BigInt]),
) {
    if k + 1 >= window.n() {
        f(prefix);
        return;
    }
    let (lo, hi) = window.scaled_range(k);
    let mut y = lo;
    while y <= hi {
        prefix[k] = y.clone();
        enumerate_prefix(window, k + 1, prefix, f);
        y += 1;
    }
}

/// One geometric edge of a component, stored once per unordered point pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeoEdge {
    /// Indices into the component's vertex list.
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// A connected piece of the rectangle graph inside the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    #[serde(with = "crate::ratvec::serde_points")]
    pub vertices: Vec<RatVec>,
    pub edges: Vec<GeoEdge>,
    /// Some neighbor fell outside the window; completeness is not claimed.
    pub touches_boundary: bool,
    /// Contains a site.
    pub is_special: bool,
}

impl Component {
    pub fn contains(&self, p: &[Scalar]) -> bool {
        self.vertices.iter().any(|v| v.as_slice() == p)
    }
}

/// Finds every connected component of the rectangle graph meeting the window
/// lattice. Components are grown by breadth-first search from the seed set of
/// site points plus all window points on at least one sphere or hyperplane;
/// any point with a neighbor outside the window is flagged.
pub fn components_in_box(s: &SiteSet, window: &BoxSpec) -> Result<Vec<Component>, Error> {
    if window.n() != s.n() || window.lo.len() != window.hi.len() {
        return Err(Error::Dimension("window dimension".into()));
    }
    if window.denom == 0 {
        return Err(Error::Invalid("window denominator must be positive".into()));
    }
    for v in s.sites() {
        if !window.contains(v) {
            return Err(Error::BoxExcludesSites);
        }
    }

    let mut candidates: HashSet<RatVec> = candidate_points(s, window).into_iter().collect();
    for v in s.sites() {
        candidates.insert(v.clone());
    }

    let mut sorted: Vec<RatVec> = candidates.iter().cloned().collect();
    sorted.sort();

    let mut assigned: HashMap<RatVec, usize> = HashMap::new();
    let mut components = Vec::new();
    for seed in sorted {
        if assigned.contains_key(&seed) {
            continue;
        }
        let id = components.len();
        let mut verts: Vec<RatVec> = Vec::new();
        let mut touches = false;
        let mut queue = VecDeque::new();
        assigned.insert(seed.clone(), id);
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            verts.push(p.clone());
            for (q, _) in neighbors(s, &p) {
                if !window.contains(&q) {
                    touches = true;
                    continue;
                }
                debug_assert!(candidates.contains(&q), "edge target must be a candidate");
                if !assigned.contains_key(&q) {
                    assigned.insert(q.clone(), id);
                    queue.push_back(q);
                }
            }
        }
        verts.sort();
        // One record per unordered pair, oriented from the lower vertex index.
        let index: HashMap<&RatVec, usize> =
            verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (a, p) in verts.iter().enumerate() {
            for (q, label) in neighbors(s, p) {
                let Some(&b) = index.get(&q) else { continue };
                if a < b && seen.insert((a, b, label)) {
                    edges.push(GeoEdge {
                        from: a,
                        to: b,
                        label,
                    });
                }
            }
        }
        let is_special = verts.iter().any(|v| s.position_of(v).is_some());
        components.push(Component {
            vertices: verts,
            edges,
            touches_boundary: touches,
            is_special,
        });
    }
    Ok(components)
}
