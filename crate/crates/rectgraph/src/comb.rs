//! Combinatorial graphs: full subgraphs of the Cayley graph on the mass-0/-2
//! vectors of `Z^m`, rooted at 0.
//!
//! Black vertices have mass 0 and red vertices mass -2; the composition law
//! on this identification is `a ∘ b = a + (η(a)+1) b`. Root changes multiply
//! by an inverse on the right, equivalence is root change plus a permutation
//! of the indices, and geometric components lift here by keeping only the
//! energy-preserving steps.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::group::{compose, invert, EdgeLabel, GroupElement, IntVector, Sign};
use crate::ratvec::{self, RatVec};
use crate::scalar::Scalar;
use crate::sites::SiteSet;

/// Valid vertex of the mass-graded Cayley graph?
pub fn valid_mass(a: &IntVector) -> bool {
    matches!(a.mass(), 0 | -2)
}

/// The group element a mass-0/-2 vector stands for.
pub fn vertex_element(a: &IntVector) -> GroupElement {
    debug_assert!(valid_mass(a));
    GroupElement {
        translation: a.clone(),
        sign: if a.mass() == 0 { Sign::Plus } else { Sign::Tau },
    }
}

/// Composition on the vector identification: `x ∘ y = x + (η(x)+1) y`.
pub fn compose_vertices(x: &IntVector, y: &IntVector) -> IntVector {
    let factor = x.mass() + 1;
    x.add(&y.scale(factor))
}

/// Inverse on the vector identification.
pub fn invert_vertex(x: &IntVector) -> IntVector {
    if x.mass() == 0 {
        x.neg()
    } else {
        x.clone()
    }
}

/// The label `ℓ` with `b = ℓ ∘ a`, if the two vertices are Cayley-adjacent.
pub fn cayley_adjacent(a: &IntVector, b: &IntVector) -> Option<EdgeLabel> {
    debug_assert!(valid_mass(a) && valid_mass(b));
    // black step: b - a = e_i - e_j
    let d = b.sub(a);
    if let Some(label) = diff_label(&d) {
        return Some(label);
    }
    // red step: a + b = -e_i - e_j
    let s = a.add(b);
    neg_sum_label(&s)
}

fn diff_label(d: &IntVector) -> Option<EdgeLabel> {
    let mut plus = None;
    let mut minus = None;
    for (k, &c) in d.0.iter().enumerate() {
        match c {
            0 => {}
            1 if plus.is_none() => plus = Some(k),
            -1 if minus.is_none() => minus = Some(k),
            _ => return None,
        }
    }
    match (plus, minus) {
        (Some(i), Some(j)) => Some(EdgeLabel::Black { i, j }),
        _ => None,
    }
}

fn neg_sum_label(s: &IntVector) -> Option<EdgeLabel> {
    let mut first = None;
    let mut second = None;
    for (k, &c) in s.0.iter().enumerate() {
        match c {
            0 => {}
            -1 => {
                if first.is_none() {
                    first = Some(k);
                } else if second.is_none() {
                    second = Some(k);
                } else {
                    return None;
                }
            }
            _ => return None,
        }
    }
    match (first, second) {
        (Some(i), Some(j)) => Some(EdgeLabel::Red { i, j }),
        _ => None,
    }
}

/// Edge of a combinatorial graph: `to = label ∘ from` (vertex indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CombEdge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// Rooted full subgraph of the Cayley graph, vertices sorted, 0 present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombGraph {
    m: usize,
    vertices: Vec<IntVector>,
    edges: Vec<CombEdge>,
}

impl CombGraph {
    /// Builds the full subgraph on the given vertex set.
    pub fn full_subgraph(m: usize, vertices: Vec<IntVector>) -> Result<Self, Error> {
        let mut vs: Vec<IntVector> = vertices;
        vs.sort();
        vs.dedup();
        if vs.iter().any(|v| v.len() != m) {
            return Err(Error::Dimension("vertex length != m".into()));
        }
        if let Some(bad) = vs.iter().find(|v| !valid_mass(v)) {
            return Err(Error::Invalid(format!(
                "vertex {bad} has mass {}",
                bad.mass()
            )));
        }
        if !vs.iter().any(|v| v.is_zero()) {
            return Err(Error::Invalid("graph must contain the root 0".into()));
        }
        let mut edges = Vec::new();
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                if let Some(label) = cayley_adjacent(&vs[a], &vs[b]) {
                    edges.push(CombEdge {
                        from: a,
                        to: b,
                        label,
                    });
                }
            }
        }
        edges.sort();
        Ok(CombGraph {
            m,
            vertices: vs,
            edges,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> &[IntVector] {
        &self.vertices
    }

    pub fn edges(&self) -> &[CombEdge] {
        &self.edges
    }

    /// Vertices other than the root.
    pub fn non_root_vertices(&self) -> impl Iterator<Item = &IntVector> {
        self.vertices.iter().filter(|v| !v.is_zero())
    }

    /// Vertex count including the root.
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &IntVector) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 0;
        while let Some(v) = queue.pop_front() {
            count += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertices.len()
    }

    /// Root change: right-composes every vertex with `g^{-1}`, so `g` lands on
    /// 0. The result is an equivalent graph.
    pub fn translate_root(&self, g: &IntVector) -> Result<CombGraph, Error> {
        if self.vertex_index(g).is_none() {
            return Err(Error::Invalid(format!("{g} is not a vertex")));
        }
        let gi = invert_vertex(g);
        let vs: Vec<IntVector> = self
            .vertices
            .iter()
            .map(|a| compose_vertices(a, &gi))
            .collect();
        CombGraph::full_subgraph(self.m, vs)
    }
}

/// Key identifying a graph up to root change and index permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<i64>);

/// Minimal encoding over all root choices and index permutations; equal keys
/// exactly characterize equivalent graphs.
pub fn canonical_key(g: &CombGraph) -> CanonicalKey {
    let m = g.m();
    let perms = permutations(m);
    let mut best: Option<Vec<i64>> = None;
    for root in g.vertices() {
        let translated = g.translate_root(root).expect("root is a vertex");
        for perm in &perms {
            let mut rows: Vec<Vec<i64>> = translated
                .vertices()
                .iter()
                .map(|v| {
                    let mut row = vec![0i64; m];
                    for (k, &c) in v.0.iter().enumerate() {
                        row[perm[k]] = c;
                    }
                    row
                })
                .collect();
            rows.sort();
            let mut flat = Vec::with_capacity(2 + rows.len() * m);
            flat.push(rows.len() as i64);
            flat.push(m as i64);
            for r in &rows {
                flat.extend_from_slice(r);
            }
            if best.as_ref().is_none_or(|b| &flat < b) {
                best = Some(flat);
            }
        }
    }
    CanonicalKey(best.expect("graph has at least the root"))
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m).collect();
    heap_permute(&mut idx, m, &mut out);
    out
}

fn heap_permute(idx: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(idx.clone());
        return;
    }
    for i in 0..k {
        heap_permute(idx, k - 1, out);
        if k.is_multiple_of(2) {
            idx.swap(i, k - 1);
        } else {
            idx.swap(0, k - 1);
        }
    }
}

/// Every connected combinatorial graph with at most `max_vertices` vertices
/// (root included), one representative per equivalence class, all vertex
/// coefficients `ℓ1`-bounded by `coeff_bound`.
///
/// Growth is by Cayley adjacency from the root, so every returned graph is
/// connected and reachable within `max_vertices - 1` steps; the natural
/// coefficient bound for that depth is `2 (max_vertices - 1)`.
pub fn enumerate_graphs(m: usize, max_vertices: usize, coeff_bound: i64) -> Vec<CombGraph> {
    assert!(max_vertices >= 1);
    let alphabet = EdgeLabel::alphabet(m);
    let root = IntVector::zero(m);
    let mut level: HashSet<Vec<IntVector>> = HashSet::new();
    level.insert(vec![root]);
    let mut all_sets: Vec<Vec<IntVector>> = vec![level.iter().next().unwrap().clone()];
    for _ in 1..max_vertices {
        let mut next: HashSet<Vec<IntVector>> = HashSet::new();
        for set in &level {
            for v in set {
                for l in &alphabet {
                    // w = l ∘ v; the mass of the label vector picks the rule
                    let w = compose_vertices(&l.vector(m), v);
                    if w.l1_norm() > coeff_bound || set.contains(&w) {
                        continue;
                    }
                    let mut bigger = set.clone();
                    bigger.push(w.clone());
                    bigger.sort();
                    next.insert(bigger);
                }
            }
        }
        all_sets.extend(next.iter().cloned());
        level = next;
        if level.is_empty() {
            break;
        }
    }
    // Deterministic representatives: scan in sorted order so each class is
    // represented by its least vertex set.
    all_sets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for set in all_sets {
        let g = CombGraph::full_subgraph(m, set).expect("valid grown set");
        debug_assert!(g.is_connected());
        let key = canonical_key(&g);
        if seen.insert(key) {
            out.push(g);
        }
    }
    out
}

/// Outcome of lifting the geometric component of `x` into the Cayley graph.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum LiftOutcome {
    /// Injective lift; the vertex map sends each combinatorial vertex to its
    /// geometric image.
    Lifted {
        graph: CombGraph,
        #[serde(serialize_with = "serialize_vertex_map")]
        vertex_map: Vec<(IntVector, RatVec)>,
    },
    /// Two distinct group elements hit the same geometric point; the witness
    /// stabilizes `x` and is not the identity.
    CircuitUnravel { witness: GroupElement },
    /// The combinatorial component outgrew the vertex budget.
    BudgetExceeded { explored: usize },
}

/// Lifts the component of `x` by breadth-first search from the identity,
/// keeping only energy-preserving steps. The preimage `p` (any rational
/// solution of `-π(p) = x`) exists whenever the sites span, and the resulting
/// graph does not depend on its choice.
pub fn lift_component(s: &SiteSet, x: &[Scalar], budget: usize) -> Result<LiftOutcome, Error> {
    if s.position_of(x).is_some() {
        return Err(Error::Invalid(
            "lift root must lie outside the sites".into(),
        ));
    }
    let p = preimage(s, x)?;
    let base_energy = s.k_energy_rat(&p, Sign::Plus)?;
    let m = s.m();
    let alphabet = EdgeLabel::alphabet(m);

    let keeps_energy = |g: &GroupElement| -> Result<bool, Error> {
        // energy of g ∘ (p, +) as a rational pair
        let gp: Vec<Scalar> = match g.sign {
            Sign::Plus => g
                .translation
                .0
                .iter()
                .zip(&p)
                .map(|(&a, b)| crate::scalar::int(a) + b)
                .collect(),
            Sign::Tau => g
                .translation
                .0
                .iter()
                .zip(&p)
                .map(|(&a, b)| crate::scalar::int(a) - b)
                .collect(),
        };
        Ok(s.k_energy_rat(&gp, g.sign)? == base_energy)
    };

    let root = IntVector::zero(m);
    let mut reached: Vec<IntVector> = vec![root.clone()];
    let mut seen: HashSet<IntVector> = HashSet::from([root.clone()]);
    let mut geo_of: HashMap<RatVec, IntVector> = HashMap::from([(x.to_vec(), root.clone())]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let v_elem = vertex_element(&v);
        for l in &alphabet {
            let w_elem = compose(&l.group_element(m), &v_elem)?;
            let w = w_elem.translation.clone();
            if seen.contains(&w) {
                continue;
            }
            if !keeps_energy(&w_elem)? {
                continue;
            }
            let y = s.act_point(&w_elem, x)?;
            if let Some(u) = geo_of.get(&y) {
                if *u != w {
                    let witness = compose(&invert(&vertex_element(u)), &w_elem)?;
                    debug_assert!(!witness.is_identity());
                    debug_assert_eq!(s.act_point(&witness, x)?, x.to_vec());
                    return Ok(LiftOutcome::CircuitUnravel { witness });
                }
                continue;
            }
            if reached.len() + 1 > budget {
                return Ok(LiftOutcome::BudgetExceeded {
                    explored: reached.len() + 1,
                });
            }
            seen.insert(w.clone());
            geo_of.insert(y, w.clone());
            reached.push(w.clone());
            queue.push_back(w);
        }
    }
    let graph = CombGraph::full_subgraph(m, reached)?;
    let mut vertex_map: Vec<(IntVector, RatVec)> =
        geo_of.into_iter().map(|(geo, v)| (v, geo)).collect();
    vertex_map.sort();
    Ok(LiftOutcome::Lifted { graph, vertex_map })
}

fn serialize_vertex_map<S: Serializer>(
    map: &[(IntVector, RatVec)],
    ser: S,
) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        vertex: &'a Vec<i64>,
        point: Vec<String>,
    }
    let rows: Vec<Entry> = map
        .iter()
        .map(|(v, p)| Entry {
            vertex: &v.0,
            point: p.iter().map(crate::scalar::format_scalar).collect(),
        })
        .collect();
    serde::Serialize::serialize(&rows, ser)
}

/// Any rational `p` with `-π(p) = x`; exists when the sites span `R^n`.
pub fn preimage(s: &SiteSet, x: &[Scalar]) -> Result<Vec<Scalar>, Error> {
    let n = s.n();
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|k| (0..s.m()).map(|i| s.site(i)[k].clone()).collect())
        .collect();
    let rhs = ratvec::neg(x);
    match crate::linalg::solve(&crate::linalg::Mat::new(rows), &rhs) {
        crate::linalg::LinSolve::Solved { particular, .. } => Ok(particular),
        crate::linalg::LinSolve::Inconsistent { .. } => Err(Error::Invalid(
            "no rational preimage: sites do not span".into(),
        )),
    }
}

impl Serialize for CombGraph {
    /// `{"m": m, "vertices": [[ints] ...]}`; edges are recomputed on load.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("CombGraph", 2)?;
        st.serialize_field("m", &self.m)?;
        let rows: Vec<&Vec<i64>> = self.vertices.iter().map(|v| &v.0).collect();
        st.serialize_field("vertices", &rows)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CombGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: usize,
            vertices: Vec<Vec<i64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        CombGraph::full_subgraph(raw.m, raw.vertices.into_iter().map(IntVector).collect())
            .map_err(D::Error::custom)
    }
}
