//! Realization systems of combinatorial graphs and their exact solutions.
//!
//! Each non-root vertex `h` of a combinatorial graph imposes one equation on
//! the root `x`: a linear one `(x, π(h)) = K(h)` when `h` is black and a
//! quadratic one `|x|^2 + (x, π(h)) = K(h)` when red. Quadratic rows are
//! reduced by differencing against one chosen quadratic row, the linear part
//! is solved exactly, and the outcome is classified. Vanishing of a
//! determinant that is formally nonzero indicts the sites, not the graph.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::comb::{vertex_element, CombGraph};
use crate::error::Error;
use crate::group::IntVector;
use crate::linalg::{integer_kernel, solve, LinSolve, Mat};
use crate::quadform::{c_form, QuadForm};
use crate::ratvec::{self, RatVec};
use crate::scalar::{int, ratio, Scalar};
use crate::sites::SiteSet;

/// One realization equation, kept symbolic: the coefficient vector is the
/// vertex itself and the right side is the Gram evaluation of its quadratic
/// invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationRow {
    /// The vertex that produced the row.
    pub vertex: IntVector,
    /// Red vertices give quadratic rows.
    pub quadratic: bool,
}

impl EquationRow {
    /// The symbolic right-hand side as a quadratic form in the sites.
    pub fn rhs_form(&self) -> QuadForm {
        c_form(&vertex_element(&self.vertex))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationSystem {
    pub m: usize,
    pub rows: Vec<EquationRow>,
}

/// One row per non-root vertex; linear iff the vertex is black.
///
/// Connectivity is not required: vertex sets such as `{0, -2e_i}` arise from
/// root changes of larger graphs and their systems are still meaningful.
pub fn build_system(g: &CombGraph) -> Result<EquationSystem, Error> {
    let rows = g
        .non_root_vertices()
        .map(|v| EquationRow {
            vertex: v.clone(),
            quadratic: v.mass() == -2,
        })
        .collect();
    Ok(EquationSystem { m: g.m(), rows })
}

/// Classification of the exact solution set of a realization system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealizationResult {
    /// Equations are incompatible at these sites: the row of `vertex` has the
    /// stated nonzero residual on the solution set of the others.
    NoSolution { vertex: IntVector, residual: Scalar },
    /// The quadratic completion has negative squared radius: no real points
    /// at all.
    NoRealPoints { radius2: Scalar },
    /// A single root, not a site.
    Unique { x: RatVec },
    /// A single root lying on a site.
    SpecialSolution { x: RatVec, site: usize },
    /// An affine family, optionally cut to a sphere of positive radius.
    /// With `sphere_radius2 = None`, solutions are `origin + span(basis)`;
    /// with `Some(ρ)`, they are the points `origin + Σ t_k basis_k` whose
    /// basis-Gram quadratic in `t` equals `ρ` (a nonempty real sphere around
    /// `origin`, which itself need not be a solution).
    Underdetermined {
        origin: RatVec,
        basis: Vec<RatVec>,
        sphere_radius2: Option<Scalar>,
    },
    /// A formally independent subsystem lost rank at these sites: a
    /// determinantal genericity constraint is violated by the sites.
    NonGenericSites { formal_rows: Vec<IntVector> },
}

impl Serialize for RealizationResult {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let fmt_vec = |v: &RatVec| -> Vec<String> {
            v.iter().map(crate::scalar::format_scalar).collect()
        };
        let mut map = ser.serialize_map(None)?;
        match self {
            RealizationResult::NoSolution { vertex, residual } => {
                map.serialize_entry("outcome", "no-solution")?;
                map.serialize_entry("vertex", &vertex.0)?;
                map.serialize_entry("residual", &crate::scalar::format_scalar(residual))?;
            }
            RealizationResult::NoRealPoints { radius2 } => {
                map.serialize_entry("outcome", "no-real-points")?;
                map.serialize_entry("radius2", &crate::scalar::format_scalar(radius2))?;
            }
            RealizationResult::Unique { x } => {
                map.serialize_entry("outcome", "unique")?;
                map.serialize_entry("x", &fmt_vec(x))?;
            }
            RealizationResult::SpecialSolution { x, site } => {
                map.serialize_entry("outcome", "special-solution")?;
                map.serialize_entry("x", &fmt_vec(x))?;
                map.serialize_entry("site", &(site + 1))?;
            }
            RealizationResult::Underdetermined {
                origin,
                basis,
                sphere_radius2,
            } => {
                map.serialize_entry("outcome", "underdetermined")?;
                map.serialize_entry("origin", &fmt_vec(origin))?;
                let rows: Vec<Vec<String>> = basis.iter().map(fmt_vec).collect();
                map.serialize_entry("basis", &rows)?;
                map.serialize_entry(
                    "sphere_radius2",
                    &sphere_radius2.as_ref().map(crate::scalar::format_scalar),
                )?;
            }
            RealizationResult::NonGenericSites { formal_rows } => {
                map.serialize_entry("outcome", "non-generic-sites")?;
                let rows: Vec<&Vec<i64>> = formal_rows.iter().map(|v| &v.0).collect();
                map.serialize_entry("formal_rows", &rows)?;
            }
        }
        map.end()
    }
}

impl RealizationResult {
    pub fn as_point(&self) -> Option<&RatVec> {
        match self {
            RealizationResult::Unique { x } | RealizationResult::SpecialSolution { x, .. } => {
                Some(x)
            }
            _ => None,
        }
    }
}

/// Solves the system at the given sites, exactly.
pub fn solve_numeric(s: &SiteSet, sys: &EquationSystem) -> Result<RealizationResult, Error> {
    if sys.m > s.m() {
        return Err(Error::Dimension(
            "system has more indices than sites".into(),
        ));
    }
    let n = s.n();

    struct LinRow {
        normal: RatVec,
        rhs: Scalar,
        formal: IntVector,
        provenance: IntVector,
    }
    let mut linear: Vec<LinRow> = Vec::new();
    let mut quad_rows: Vec<&EquationRow> = sys.rows.iter().filter(|r| r.quadratic).collect();
    quad_rows.sort_by(|a, b| a.vertex.cmp(&b.vertex));
    let pivot = quad_rows.first().cloned();
    for row in sys.rows.iter().filter(|r| !r.quadratic) {
        linear.push(LinRow {
            normal: s.pi_map(&row.vertex)?,
            rhs: s.quad_eval(&row.rhs_form())?,
            formal: row.vertex.clone(),
            provenance: row.vertex.clone(),
        });
    }
    if let Some(p) = &pivot {
        let p_normal = s.pi_map(&p.vertex)?;
        let p_rhs = s.quad_eval(&p.rhs_form())?;
        for row in quad_rows.iter().skip(1) {
            linear.push(LinRow {
                normal: ratvec::sub(&s.pi_map(&row.vertex)?, &p_normal),
                rhs: s.quad_eval(&row.rhs_form())? - &p_rhs,
                formal: row.vertex.sub(&p.vertex),
                provenance: row.vertex.clone(),
            });
        }
    }

    // Genericity audit: the sites must not collapse the formally expected
    // rank of the linear part.
    let formal_rows: Vec<Vec<i64>> = linear.iter().map(|r| r.formal.0.clone()).collect();
    let formal_rank = if formal_rows.is_empty() {
        0
    } else {
        Mat::from_int_rows(&formal_rows).rank()
    };
    let numeric_rank = if linear.is_empty() {
        0
    } else {
        Mat::new(linear.iter().map(|r| r.normal.clone()).collect()).rank()
    };
    if numeric_rank < formal_rank.min(n) {
        return Ok(RealizationResult::NonGenericSites {
            formal_rows: linear.iter().map(|r| r.formal.clone()).collect(),
        });
    }

    // Solve the linear part and audit every row on the resulting affine space.
    let rhs: Vec<Scalar> = linear.iter().map(|r| r.rhs.clone()).collect();
    let (x0, basis) = match solve(
        &Mat::new(linear.iter().map(|r| r.normal.clone()).collect::<Vec<_>>()),
        &rhs,
    ) {
        LinSolve::Solved {
            particular,
            nullspace,
        } => {
            if linear.is_empty() {
                (
                    ratvec::zero(n),
                    (0..n)
                        .map(|k| {
                            let mut v = ratvec::zero(n);
                            v[k] = int(1);
                            v
                        })
                        .collect::<Vec<_>>(),
                )
            } else {
                (particular, nullspace)
            }
        }
        LinSolve::Inconsistent { .. } => {
            // Witness: solve a maximal consistent subsystem and report the
            // first violated original row with its constant residual.
            let mut chosen: Vec<usize> = Vec::new();
            let mut rank = 0;
            for (i, r) in linear.iter().enumerate() {
                let mut rows: Vec<RatVec> =
                    chosen.iter().map(|&k| linear[k].normal.clone()).collect();
                rows.push(r.normal.clone());
                if Mat::new(rows).rank() > rank {
                    chosen.push(i);
                    rank += 1;
                }
            }
            let sub = Mat::new(chosen.iter().map(|&k| linear[k].normal.clone()).collect());
            let sub_rhs: Vec<Scalar> = chosen.iter().map(|&k| linear[k].rhs.clone()).collect();
            let LinSolve::Solved { particular, .. } = solve(&sub, &sub_rhs) else {
                unreachable!("independent subsystem is consistent");
            };
            for r in &linear {
                let residual = ratvec::dot(&r.normal, &particular) - &r.rhs;
                if !residual.is_zero() {
                    return Ok(RealizationResult::NoSolution {
                        vertex: r.provenance.clone(),
                        residual,
                    });
                }
            }
            unreachable!("inconsistent system must have a violated row");
        }
    };

    let classify_point = |x: RatVec| -> Result<RealizationResult, Error> {
        // soundness: every original row must hold exactly
        for row in &sys.rows {
            let lhs = if row.quadratic {
                ratvec::norm2(&x) + ratvec::dot(&x, &s.pi_map(&row.vertex)?)
            } else {
                ratvec::dot(&x, &s.pi_map(&row.vertex)?)
            };
            let residual = lhs - s.quad_eval(&row.rhs_form())?;
            if !residual.is_zero() {
                return Ok(RealizationResult::NoSolution {
                    vertex: row.vertex.clone(),
                    residual,
                });
            }
        }
        Ok(match s.position_of(&x) {
            Some(site) => RealizationResult::SpecialSolution { x, site },
            None => RealizationResult::Unique { x },
        })
    };

    if basis.is_empty() {
        return classify_point(x0);
    }
    let Some(pivot) = pivot else {
        return Ok(RealizationResult::Underdetermined {
            origin: x0,
            basis,
            sphere_radius2: None,
        });
    };

    // Substitute the affine family into the pivot quadratic row and complete
    // the square: t^T G t + l·t + c0 = 0 with G the (positive definite) Gram
    // matrix of the basis.
    let pb = s.pi_map(&pivot.vertex)?;
    let k_pivot = s.quad_eval(&pivot.rhs_form())?;
    let d = basis.len();
    let gram: Vec<Vec<Scalar>> = (0..d)
        .map(|k| (0..d).map(|l| ratvec::dot(&basis[k], &basis[l])).collect())
        .collect();
    let lin: Vec<Scalar> = (0..d)
        .map(|k| int(2) * ratvec::dot(&basis[k], &x0) + ratvec::dot(&basis[k], &pb))
        .collect();
    let c0 = ratvec::norm2(&x0) + ratvec::dot(&x0, &pb) - &k_pivot;
    let minus_half_l: Vec<Scalar> = lin.iter().map(|v| v * ratio(-1, 2)).collect();
    let LinSolve::Solved {
        particular: center_t,
        nullspace: gram_null,
    } = solve(&Mat::new(gram.clone()), &minus_half_l)
    else {
        unreachable!("Gram matrix of independent vectors is invertible");
    };
    debug_assert!(gram_null.is_empty());
    let gtc: Vec<Scalar> = (0..d).map(|k| ratvec::dot(&gram[k], &center_t)).collect();
    let rho = ratvec::dot(&center_t, &gtc) - c0;
    let mut center = x0.clone();
    for (k, t) in center_t.iter().enumerate() {
        center = ratvec::add(&center, &ratvec::scale(&basis[k], t));
    }
    if rho.is_negative() {
        return Ok(RealizationResult::NoRealPoints { radius2: rho });
    }
    if rho.is_zero() {
        return classify_point(center);
    }
    Ok(RealizationResult::Underdetermined {
        origin: center,
        basis,
        sphere_radius2: Some(rho),
    })
}

/// Lattice ranks of a graph's vertex set: overall and per color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankInfo {
    /// Number of non-root vertices.
    pub dimension: usize,
    pub rank: usize,
    pub black_rank: usize,
    pub red_rank: usize,
}

pub fn rank_info(g: &CombGraph) -> RankInfo {
    let all: Vec<Vec<i64>> = g.non_root_vertices().map(|v| v.0.clone()).collect();
    let black: Vec<Vec<i64>> = g
        .non_root_vertices()
        .filter(|v| v.mass() == 0)
        .map(|v| v.0.clone())
        .collect();
    let red: Vec<Vec<i64>> = g
        .non_root_vertices()
        .filter(|v| v.mass() == -2)
        .map(|v| v.0.clone())
        .collect();
    let rank_of = |rows: &[Vec<i64>]| {
        if rows.is_empty() {
            0
        } else {
            Mat::from_int_rows(rows).rank()
        }
    };
    RankInfo {
        dimension: all.len(),
        rank: rank_of(&all),
        black_rank: rank_of(&black),
        red_rank: rank_of(&red),
    }
}

/// A nonzero polynomial in the sites whose vanishing is necessary for the
/// graph to realize; exported as a sparse quadratic form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResonanceCertificate {
    pub poly: QuadForm,
    /// The relation that produced the certificate, over the graph's non-root
    /// vertices in sorted order.
    pub relation: Vec<i64>,
}

/// Combines the quadratic invariants along an integer relation among the
/// non-root vertices: a nonzero combination certifies an avoidable resonance,
/// a zero one marks the relation as resonant.
pub fn resonance_from_relation(
    g: &CombGraph,
    relation: &[i64],
) -> Result<Option<ResonanceCertificate>, Error> {
    let verts: Vec<&IntVector> = g.non_root_vertices().collect();
    if relation.len() != verts.len() {
        return Err(Error::Dimension("relation length".into()));
    }
    if relation.iter().all(|&c| c == 0) {
        return Err(Error::Invalid("relation must be nonzero".into()));
    }
    let mut sum = IntVector::zero(g.m());
    for (v, &c) in verts.iter().zip(relation) {
        sum = sum.add(&v.scale(c));
    }
    if !sum.is_zero() {
        return Err(Error::Invalid(
            "vector is not a relation among the vertices".into(),
        ));
    }
    let mut q = QuadForm::zero(g.m());
    for (v, &c) in verts.iter().zip(relation) {
        q = q.add(&c_form(&vertex_element(v)).scale_int(c));
    }
    Ok(if q.is_zero() {
        None
    } else {
        Some(ResonanceCertificate {
            poly: q,
            relation: relation.to_vec(),
        })
    })
}

/// Integer kernel basis of the non-root vertex lattice.
pub fn vertex_relations(g: &CombGraph) -> Vec<Vec<i64>> {
    let rows: Vec<Vec<i64>> = g.non_root_vertices().map(|v| v.0.clone()).collect();
    if rows.is_empty() {
        return Vec::new();
    }
    integer_kernel(&rows)
        .into_iter()
        .map(|v| {
            v.iter()
                .map(|x| i64::try_from(x).expect("small kernel entries"))
                .collect()
        })
        .collect()
}

/// Decision for a graph's generic realizability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GenericOutcome {
    /// Realization forces a nonzero polynomial in the sites to vanish.
    /// `certificates` carries the relation-derived quadratic resonances;
    /// `determinantal` marks obstructions detected through exact multi-sample
    /// solving of the determinantal system instead.
    AvoidableResonance {
        certificates: Vec<ResonanceCertificate>,
        determinantal: bool,
    },
    /// Realizations, if any, lie in the special component only.
    SpecialOnly,
    GenericallyRealizable,
}

/// Decides generic realizability for a graph with at most `2n + 2` vertices
/// (root included). Relations are inspected first: a nonzero certificate
/// settles the matter, and all-resonant relations route to the
/// degenerate-resonant conclusion (realization stays special). A
/// nondegenerate graph is then solved exactly on `samples` independently
/// sampled generic site sets; a nonzero polynomial cannot vanish on all of
/// them except with negligible probability, and the certificates stay exact
/// because every evaluation is rational.
pub fn generic_realization(
    g: &CombGraph,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<GenericOutcome, Error> {
    if g.order() > 2 * n + 2 {
        return Err(Error::BudgetExceeded(format!(
            "{} vertices exceeds 2n+2 = {}",
            g.order(),
            2 * n + 2
        )));
    }
    let relations = vertex_relations(g);
    if !relations.is_empty() {
        let mut certs = Vec::new();
        for rel in &relations {
            if let Some(cert) = resonance_from_relation(g, rel)? {
                certs.push(cert);
            }
        }
        return Ok(if certs.is_empty() {
            GenericOutcome::SpecialOnly
        } else {
            GenericOutcome::AvoidableResonance {
                certificates: certs,
                determinantal: false,
            }
        });
    }

    let sys = build_system(g)?;
    let m_eff = g.m().max(n);
    let mut realizable = 0usize;
    let mut special = 0usize;
    let mut obstructed = 0usize;
    let mut no_real = 0usize;
    let mut done = 0usize;
    let mut attempt = 0u64;
    while done < samples && attempt < 50 {
        let s = crate::constraints::sample_generic(
            n,
            m_eff,
            -25,
            25,
            seed.wrapping_add(attempt),
            500_000,
        )?;
        attempt += 1;
        match solve_numeric(&s, &sys)? {
            RealizationResult::NonGenericSites { .. } => continue,
            RealizationResult::NoSolution { .. } => obstructed += 1,
            RealizationResult::NoRealPoints { .. } => no_real += 1,
            RealizationResult::SpecialSolution { .. } => special += 1,
            RealizationResult::Unique { .. } | RealizationResult::Underdetermined { .. } => {
                realizable += 1
            }
        }
        done += 1;
    }
    if done < samples {
        return Err(Error::SamplingExhausted { tries: attempt });
    }
    Ok(if obstructed > 0 {
        GenericOutcome::AvoidableResonance {
            certificates: Vec::new(),
            determinantal: true,
        }
    } else if realizable > 0 {
        GenericOutcome::GenericallyRealizable
    } else {
        debug_assert_eq!(special + no_real, done);
        GenericOutcome::SpecialOnly
    })
}

/// Exact affine independence of a point list, with a vanishing affine
/// combination as the witness when dependent.
pub fn affine_independence(points: &[RatVec]) -> (bool, Option<Vec<Scalar>>) {
    if points.len() <= 1 {
        return (true, None);
    }
    let base = &points[0];
    let diffs: Vec<RatVec> = points[1..].iter().map(|p| ratvec::sub(p, base)).collect();
    let k = diffs.len();
    let cols = base.len();
    let mut t = vec![vec![Scalar::zero(); k]; cols];
    for (i, d) in diffs.iter().enumerate() {
        for (j, x) in d.iter().enumerate() {
            t[j][i] = x.clone();
        }
    }
    match solve(&Mat::new(t), &vec![Scalar::zero(); cols]) {
        LinSolve::Solved { nullspace, .. } if !nullspace.is_empty() => {
            let lam = &nullspace[0];
            let mut combo = Vec::with_capacity(points.len());
            let total: Scalar = lam.iter().fold(Scalar::zero(), |a, b| a + b);
            combo.push(-total);
            combo.extend(lam.iter().cloned());
            debug_assert!({
                let mut sum = ratvec::zero(cols);
                for (mu, p) in combo.iter().zip(points) {
                    sum = ratvec::add(&sum, &ratvec::scale(p, mu));
                }
                ratvec::is_zero(&sum)
                    && combo.iter().fold(Scalar::zero(), |a, b| a + b).is_zero()
            });
            (false, Some(combo))
        }
        _ => (true, None),
    }
}

/// Executable form of the colored-rank dichotomy: whenever one color has more
/// vertices than its rank, a relation exists in the full lattice.
pub fn colored_rank_audit(g: &CombGraph) -> bool {
    let info = rank_info(g);
    let blacks = g.non_root_vertices().filter(|v| v.mass() == 0).count();
    let reds = g.non_root_vertices().filter(|v| v.mass() == -2).count();
    if blacks == info.black_rank && reds == info.red_rank {
        return true;
    }
    !vertex_relations(g).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::CombGraph;

    fn iv(v: &[i64]) -> IntVector {
        IntVector(v.to_vec())
    }

    fn graph(m: usize, rows: &[&[i64]]) -> CombGraph {
        let mut vs: Vec<IntVector> = rows.iter().map(|r| iv(r)).collect();
        vs.push(IntVector::zero(m));
        CombGraph::full_subgraph(m, vs).unwrap()
    }

    fn sites(n: usize, rows: &[&[i64]]) -> SiteSet {
        SiteSet::from_integer_sites(n, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn system_rows_match_vertex_colors() {
        let g = graph(3, &[&[1, 0, -1], &[0, -1, 1], &[-1, -1, 0]]);
        let sys = build_system(&g).unwrap();
        assert_eq!(sys.rows.len(), 3);
        for row in &sys.rows {
            assert_eq!(row.quadratic, row.vertex.mass() == -2);
        }
        let red = sys.rows.iter().find(|r| r.quadratic).unwrap();
        assert_eq!(red.rhs_form().to_string(), "-e1e2");
    }

    #[test]
    fn overdetermined_black_system_is_obstructed_or_indicts_sites() {
        // three formally independent black vertices in dimension two: the
        // extra linear equation must either fail with a residual (the
        // determinant of the stacked system is a resonance at generic sites)
        // or report a rank collapse, never a silent answer
        let g = graph(4, &[&[1, -1, 0, 0], &[0, 0, 1, -1], &[1, 0, -1, 0]]);
        for seed in [41u64, 42, 43] {
            let s = crate::constraints::sample_generic(2, 4, -20, 20, seed, 500_000).unwrap();
            let sys = build_system(&g).unwrap();
            match solve_numeric(&s, &sys).unwrap() {
                RealizationResult::NoSolution { residual, .. } => assert!(!residual.is_zero()),
                RealizationResult::NonGenericSites { .. } => {}
                other => panic!("seed {seed}: unexpected outcome {other:?}"),
            }
        }
    }

    #[test]
    fn root_change_covariance_of_solutions() {
        // solving the root-translated graph recovers the action-translated
        // solution point
        let g = graph(4, &[&[-1, 0, 1, 0], &[0, -1, 1, 0], &[0, 0, -1, -1]]);
        let s = crate::constraints::sample_generic(2, 4, -20, 20, 23, 500_000).unwrap();
        let x = match solve_numeric(&s, &build_system(&g).unwrap()).unwrap() {
            RealizationResult::SpecialSolution { x, .. } => x,
            other => panic!("expected a pinned solution, got {other:?}"),
        };
        for root in g.vertices() {
            let translated = g.translate_root(root).unwrap();
            let expect = s
                .act_point(&vertex_element(root), &x)
                .expect("translated root point");
            match solve_numeric(&s, &build_system(&translated).unwrap()).unwrap() {
                RealizationResult::SpecialSolution { x: y, .. }
                | RealizationResult::Unique { x: y } => {
                    assert_eq!(y, expect, "root {root}");
                }
                other => panic!("root {root}: unexpected outcome {other:?}"),
            }
        }
    }

    #[test]
    fn single_red_vertex_gives_sphere() {
        // {0, -e1-e2}: one quadratic row, a full circle of real solutions
        let g = graph(2, &[&[-1, -1]]);
        let s = sites(2, &[&[1, 0], &[0, 1]]);
        let sys = build_system(&g).unwrap();
        match solve_numeric(&s, &sys).unwrap() {
            RealizationResult::Underdetermined {
                sphere_radius2: Some(r),
                origin,
                ..
            } => {
                assert_eq!(r, ratio(1, 2)); // |v1 - v2|^2 / 4
                assert_eq!(origin, vec![ratio(1, 2), ratio(1, 2)]);
            }
            other => panic!("expected sphere, got {other:?}"),
        }
    }

    #[test]
    fn double_red_step_pins_the_site() {
        // {0, -2e1}: |x - v1|^2 = 0 has the unique solution x = v1
        let g = graph(2, &[&[-2, 0]]);
        let s = sites(2, &[&[3, 1], &[1, 2]]);
        let sys = build_system(&g).unwrap();
        match solve_numeric(&s, &sys).unwrap() {
            RealizationResult::SpecialSolution { x, site } => {
                assert_eq!(site, 0);
                assert_eq!(x, s.site(0).clone());
            }
            other => panic!("expected the first site, got {other:?}"),
        }
    }

    #[test]
    fn impossible_red_vertex_has_no_real_points() {
        // {0, -3e1+e2}: positive definite completion, no real solutions
        let g = graph(2, &[&[-3, 1]]);
        let s = sites(2, &[&[3, 1], &[1, 2]]);
        let sys = build_system(&g).unwrap();
        match solve_numeric(&s, &sys).unwrap() {
            RealizationResult::NoRealPoints { radius2 } => assert!(radius2.is_negative()),
            other => panic!("expected no real points, got {other:?}"),
        }
    }

    #[test]
    fn shared_red_fan_solves_to_a_site() {
        // vertices e3-e1, e3-e2 black and -e3-e4 red: the equations force
        // x = v3 whenever the two black normals stay independent.
        let g = graph(4, &[&[-1, 0, 1, 0], &[0, -1, 1, 0], &[0, 0, -1, -1]]);
        let s = crate::constraints::sample_generic(2, 4, -20, 20, 23, 500_000).unwrap();
        let sys = build_system(&g).unwrap();
        match solve_numeric(&s, &sys).unwrap() {
            RealizationResult::SpecialSolution { x, site } => {
                assert_eq!(site, 2);
                assert_eq!(x, s.site(2).clone());
            }
            other => panic!("expected v3, got {other:?}"),
        }
    }

    #[test]
    fn triangle_with_red_closure_is_obstructed_generically() {
        // vertices e1-e3, e3-e2 black and -e2-e1 red: two linear rows pin x,
        // the quadratic row then fails for generic sites
        let g = graph(3, &[&[1, 0, -1], &[0, -1, 1], &[-1, -1, 0]]);
        let sys = build_system(&g).unwrap();
        for seed in [1u64, 2, 3] {
            let s = crate::constraints::sample_generic(2, 3, -20, 20, seed, 500_000).unwrap();
            match solve_numeric(&s, &sys).unwrap() {
                RealizationResult::NoSolution { residual, .. } => assert!(!residual.is_zero()),
                other => panic!("expected obstruction, got {other:?}"),
            }
        }
    }

    #[test]
    fn non_generic_sites_are_indicted() {
        // formally independent normals that collapse at these sites:
        // v1 - v2 is parallel to v3 - v2
        let g = graph(3, &[&[1, -1, 0], &[0, -1, 1]]);
        let s = sites(2, &[&[2, 2], &[1, 1], &[3, 3]]);
        let sys = build_system(&g).unwrap();
        match solve_numeric(&s, &sys).unwrap() {
            RealizationResult::NonGenericSites { formal_rows } => {
                assert_eq!(formal_rows.len(), 2)
            }
            other => panic!("expected site indictment, got {other:?}"),
        }
    }

    #[test]
    fn rank_info_examples() {
        let g = graph(2, &[&[1, -1]]);
        assert_eq!(
            rank_info(&g),
            RankInfo {
                dimension: 1,
                rank: 1,
                black_rank: 1,
                red_rank: 0
            }
        );
        // rank drops below dimension when a relation exists
        let g = graph(3, &[&[1, -1, 0], &[-1, 0, -1], &[0, 0, -2], &[-1, -1, 0]]);
        let info = rank_info(&g);
        assert_eq!(info.dimension, 4);
        assert_eq!(info.rank, 3);
        assert_eq!(info.black_rank, 1);
        assert_eq!(info.red_rank, 3);
    }

    #[test]
    fn resonance_certificate_for_rank_one_kernel() {
        // vertices sorted: -e1-e2, -e1-e3, -2e3, e1-e2
        let g = graph(3, &[&[1, -1, 0], &[-1, 0, -1], &[0, 0, -2], &[-1, -1, 0]]);
        let rels = vertex_relations(&g);
        assert_eq!(rels.len(), 1);
        let r = &rels[0];
        let normalized: Vec<i64> = if r[0] > 0 {
            r.clone()
        } else {
            r.iter().map(|x| -x).collect()
        };
        assert_eq!(normalized, vec![1, -2, 1, -1]);
        let cert = resonance_from_relation(&g, r).unwrap().unwrap();
        // ± (e1^2 - 2 e1e3 + e3^2), i.e. ± |v1 - v3|^2 after evaluation
        let pretty = cert.poly.to_string();
        assert!(
            pretty == "e1^2-2e1e3+e3^2" || pretty == "-e1^2+2e1e3-e3^2",
            "{pretty}"
        );
        let s = sites(2, &[&[1, 2], &[5, 1], &[2, -2]]);
        let val = s.quad_eval(&cert.poly).unwrap();
        let d = ratvec::sub(s.site(0), s.site(2));
        assert_eq!(val.abs(), ratvec::norm2(&d));
    }

    #[test]
    fn resonant_relation_gives_no_certificate() {
        // vertices e1-e2, -2e1, e1-e3, -e1-e3 with the cancelling relation
        let g = graph(3, &[&[1, -1, 0], &[-2, 0, 0], &[1, 0, -1], &[-1, 0, -1]]);
        let rels = vertex_relations(&g);
        assert_eq!(rels.len(), 1);
        assert!(resonance_from_relation(&g, &rels[0]).unwrap().is_none());
        assert!(resonance_from_relation(&g, &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn generic_outcomes() {
        // one black vertex: realizable with a hyperplane of solutions
        let g = graph(2, &[&[1, -1]]);
        assert_eq!(
            generic_realization(&g, 2, 3, 99).unwrap(),
            GenericOutcome::GenericallyRealizable
        );
        // the cancelling-relation graph is degenerate-resonant: special only
        let g = graph(3, &[&[1, -1, 0], &[-2, 0, 0], &[1, 0, -1], &[-1, 0, -1]]);
        assert_eq!(
            generic_realization(&g, 2, 3, 99).unwrap(),
            GenericOutcome::SpecialOnly
        );
        // rank-one kernel with a nonzero certificate
        let g = graph(3, &[&[1, -1, 0], &[-1, 0, -1], &[0, 0, -2], &[-1, -1, 0]]);
        match generic_realization(&g, 2, 3, 99).unwrap() {
            GenericOutcome::AvoidableResonance {
                certificates,
                determinantal,
            } => {
                assert!(!determinantal);
                assert_eq!(certificates.len(), 1);
            }
            other => panic!("expected resonance, got {other:?}"),
        }
        // budget guard
        let g = graph(2, &[&[1, -1]]);
        assert!(generic_realization(&g, 0, 1, 1).is_err());
    }

    #[test]
    fn affine_independence_cases() {
        let p = |v: &[i64]| -> RatVec { v.iter().map(|&x| int(x)).collect() };
        let (ok, w) = affine_independence(&[p(&[0, 0]), p(&[1, 0]), p(&[0, 1])]);
        assert!(ok && w.is_none());
        let (ok, w) = affine_independence(&[p(&[0, 0]), p(&[1, 1]), p(&[2, 2])]);
        assert!(!ok);
        let w = w.unwrap();
        assert!(w.iter().fold(Scalar::zero(), |a, b| a + b).is_zero());
        let (ok, _) = affine_independence(&[p(&[5, 7])]);
        assert!(ok);
    }

    #[test]
    fn colored_rank_dichotomy_holds_on_small_graphs() {
        for g in crate::comb::enumerate_graphs(3, 4, 6) {
            assert!(colored_rank_audit(&g), "graph {:?}", g.vertices());
        }
    }
}
