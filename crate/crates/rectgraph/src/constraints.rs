//! Genericity constraints on tangential sites and rejection sampling.
//!
//! The geometric structure theorems hold for sites avoiding a finite list of
//! polynomial equations. This module checks the five site-level constraints
//! exactly and samples integral site sets that pass all of them. The
//! determinantal constraints indexed by combinatorial graphs are not checked
//! here; the realization solver reports them lazily as `NonGenericSites`
//! when a determinant actually vanishes.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::group::IntVector;
use crate::linalg::Mat;
use crate::ratvec;
use crate::scalar::{format_scalar, int, Scalar};
use crate::sites::SiteSet;

/// Stable identifiers for the constraint families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintId {
    Span,
    RightAngle,
    EdgeCollision,
    SmallRelation,
    Sphere,
}

/// A reproducible witness of a violated constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Site matrix rank fell short of the ambient dimension.
    RankDeficit { rank: usize, needed: usize },
    /// `(v_a - v_b, v_a - v_c) = 0` for the triple `(a, b, c)` (1-based).
    RightAngleTriple { a: usize, b: usize, c: usize },
    /// `(v_i, v_j) = 0` (1-based, `i = j` allowed: a null site).
    OrthogonalPair { i: usize, j: usize },
    /// Distinct formal differences or sums with equal images (1-based pairs).
    EdgeCollision {
        first: (usize, usize),
        second: (usize, usize),
        sum: bool,
    },
    /// Nonzero `ν` with `Σ ν_i v_i = 0` inside the `ℓ1` ball.
    SmallRelation { nu: Vec<i64> },
    /// Mass `-2` vector `ν` and a pair `(i, j)` satisfying the sphere
    /// coincidence equation (1-based pair).
    SphereCoincidence { nu: Vec<i64>, i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ConstraintReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(mut self, other: ConstraintReport) -> ConstraintReport {
        self.violations.extend(other.violations);
        ConstraintReport::from_violations(self.violations)
    }
}

/// The sites must linearly span `R^n` (exact rank test).
pub fn check_span(s: &SiteSet) -> ConstraintReport {
    let mat = Mat::new(s.sites().to_vec());
    let rank = mat.rank();
    let mut violations = Vec::new();
    if rank < s.n() {
        violations.push(Violation {
            constraint: ConstraintId::Span,
            witness: Witness::RankDeficit {
                rank,
                needed: s.n(),
            },
        });
    }
    ConstraintReport::from_violations(violations)
}

/// No triangle of sites has a right angle, and no two sites are orthogonal
/// (`(v_i, v_j) != 0` for all `i, j`, including `i = j`).
pub fn check_no_right_angles(s: &SiteSet) -> ConstraintReport {
    let m = s.m();
    let mut violations = Vec::new();
    for i in 0..m {
        for j in i..m {
            if s.gram(i, j).is_zero() {
                violations.push(Violation {
                    constraint: ConstraintId::RightAngle,
                    witness: Witness::OrthogonalPair { i: i + 1, j: j + 1 },
                });
            }
        }
    }
    for a in 0..m {
        for b in 0..m {
            for c in b + 1..m {
                if a == b || a == c {
                    continue;
                }
                // angle at v_a in the triangle {a, b, c}
                let ab = ratvec::sub(s.site(a), s.site(b));
                let ac = ratvec::sub(s.site(a), s.site(c));
                if ratvec::dot(&ab, &ac).is_zero() {
                    violations.push(Violation {
                        constraint: ConstraintId::RightAngle,
                        witness: Witness::RightAngleTriple {
                            a: a + 1,
                            b: b + 1,
                            c: c + 1,
                        },
                    });
                }
            }
        }
    }
    ConstraintReport::from_violations(violations)
}

/// Distinct formal differences `e_i - e_j` must map to distinct `v_i - v_j`,
/// and distinct formal sums `e_i + e_j` to distinct `v_i + v_j`.
pub fn check_distinct_edges(s: &SiteSet) -> ConstraintReport {
    let m = s.m();
    let mut violations = Vec::new();
    let mut diffs: Vec<((usize, usize), Vec<Scalar>)> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                diffs.push(((i, j), ratvec::sub(s.site(i), s.site(j))));
            }
        }
    }
    for (a, (pa, va)) in diffs.iter().enumerate() {
        for (pb, vb) in diffs.iter().skip(a + 1) {
            if va == vb {
                violations.push(Violation {
                    constraint: ConstraintId::EdgeCollision,
                    witness: Witness::EdgeCollision {
                        first: (pa.0 + 1, pa.1 + 1),
                        second: (pb.0 + 1, pb.1 + 1),
                        sum: false,
                    },
                });
            }
        }
    }
    let mut sums: Vec<((usize, usize), Vec<Scalar>)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            sums.push(((i, j), ratvec::add(s.site(i), s.site(j))));
        }
    }
    for (a, (pa, va)) in sums.iter().enumerate() {
        for (pb, vb) in sums.iter().skip(a + 1) {
            if va == vb {
                violations.push(Violation {
                    constraint: ConstraintId::EdgeCollision,
                    witness: Witness::EdgeCollision {
                        first: (pa.0 + 1, pa.1 + 1),
                        second: (pb.0 + 1, pb.1 + 1),
                        sum: true,
                    },
                });
            }
        }
    }
    ConstraintReport::from_violations(violations)
}

/// Enumerates all nonzero `ν ∈ Z^m` with `Σ|ν_i| <= bound` up to global sign
/// (the first nonzero coordinate is taken positive).
fn l1_ball_half(m: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; m];
    fn rec(m: usize, budget: i64, pos: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if pos == m {
            if cur.iter().any(|&x| x != 0) {
                out.push(cur.clone());
            }
            return;
        }
        let leading_zero = cur[..pos].iter().all(|&x| x == 0);
        for v in -budget..=budget {
            if leading_zero && v < 0 {
                continue; // sign-symmetric half
            }
            cur[pos] = v;
            rec(m, budget - v.abs(), pos + 1, cur, out);
            cur[pos] = 0;
        }
    }
    rec(m, bound, 0, &mut cur, &mut out);
    out
}

/// Default bound for the small-relation and sphere constraints.
pub fn default_relation_bound(n: usize) -> i64 {
    4 * (n as i64 + 1)
}

/// No nonzero integer vector `ν` with `Σ|ν_i| <= bound` may satisfy
/// `Σ ν_i v_i = 0`.
///
/// Reading note: the constraint is applied to *all* nonzero `ν` in the `ℓ1`
/// ball, not only to mass-zero ones; this is the stronger of the two readings
/// and implies the mass-zero variant used downstream.
pub fn check_no_small_relations(s: &SiteSet, bound: i64) -> ConstraintReport {
    assert!(bound >= 1, "bound must be >= 1");
    let mut violations = Vec::new();
    for nu in l1_ball_half(s.m(), bound) {
        let v = IntVector(nu.clone());
        let img = s.pi_map(&v).expect("length m");
        if ratvec::is_zero(&img) {
            violations.push(Violation {
                constraint: ConstraintId::SmallRelation,
                witness: Witness::SmallRelation { nu },
            });
        }
    }
    ConstraintReport::from_violations(violations)
}

/// For every `ν` of mass `-2` with `Σ|ν_i| <= bound` and every pair `i < j`,
/// the sphere coincidence equation
/// `|Σ ν_h v_h|^2 + 2(Σ ν_h v_h, v_i + v_j) = -4 (v_i, v_j)`
/// must fail, except for the identically-satisfied `ν` supported on `{i, j}`
/// with entries in `{0, -2}` (those force the would-be new point into the
/// site set itself and are excluded by the right-angle constraint instead).
pub fn check_sphere_constraints(s: &SiteSet, bound: i64) -> ConstraintReport {
    let m = s.m();
    let mut violations = Vec::new();
    let mut candidates = l1_ball_half(m, bound);
    let negated: Vec<Vec<i64>> = candidates
        .iter()
        .map(|nu| nu.iter().map(|x| -x).collect())
        .collect();
    candidates.extend(negated);
    for nu in candidates {
        if nu.iter().sum::<i64>() != -2 {
            continue;
        }
        let w = s.pi_map(&IntVector(nu.clone())).expect("length m");
        let w2 = ratvec::norm2(&w);
        for i in 0..m {
            for j in i + 1..m {
                let carved = nu
                    .iter()
                    .enumerate()
                    .all(|(h, &x)| if h == i || h == j { x == 0 || x == -2 } else { x == 0 });
                if carved {
                    continue;
                }
                let vij = ratvec::add(s.site(i), s.site(j));
                let lhs = &w2 + int(2) * ratvec::dot(&w, &vij);
                let rhs = int(-4) * s.gram(i, j);
                if lhs == rhs {
                    violations.push(Violation {
                        constraint: ConstraintId::Sphere,
                        witness: Witness::SphereCoincidence {
                            nu: nu.clone(),
                            i: i + 1,
                            j: j + 1,
                        },
                    });
                }
            }
        }
    }
    ConstraintReport::from_violations(violations)
}

/// Runs all five site constraints with the given `ℓ1` bound.
pub fn check_all(s: &SiteSet, bound: i64) -> ConstraintReport {
    check_span(s)
        .merge(check_no_right_angles(s))
        .merge(check_distinct_edges(s))
        .merge(check_no_small_relations(s, bound))
        .merge(check_sphere_constraints(s, bound))
}

/// Rejection-samples an integral site set in `[lo, hi]^n` passing all checks.
/// Deterministic for a fixed seed.
pub fn sample_generic(
    n: usize,
    m: usize,
    lo: i64,
    hi: i64,
    seed: u64,
    max_tries: u64,
) -> Result<SiteSet, Error> {
    if lo > hi {
        return Err(Error::Invalid("empty coordinate box".into()));
    }
    let bound = default_relation_bound(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let sites: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect())
            .collect();
        let Ok(s) = SiteSet::from_integer_sites(n, &sites) else {
            continue;
        };
        if check_all(&s, bound).passed {
            return Ok(s);
        }
    }
    Err(Error::SamplingExhausted { tries: max_tries })
}

/// Re-evaluates a violation witness against the sites; used to guarantee every
/// reported witness reproduces its equation exactly.
pub fn witness_reproduces(s: &SiteSet, v: &Violation) -> bool {
    match &v.witness {
        Witness::RankDeficit { rank, needed } => {
            Mat::new(s.sites().to_vec()).rank() == *rank && *needed == s.n()
        }
        Witness::RightAngleTriple { a, b, c } => {
            let ab = ratvec::sub(s.site(a - 1), s.site(b - 1));
            let ac = ratvec::sub(s.site(a - 1), s.site(c - 1));
            ratvec::dot(&ab, &ac).is_zero()
        }
        Witness::OrthogonalPair { i, j } => s.gram(i - 1, j - 1).is_zero(),
        Witness::EdgeCollision { first, second, sum } => {
            let (i, j) = (first.0 - 1, first.1 - 1);
            let (h, k) = (second.0 - 1, second.1 - 1);
            if *sum {
                ratvec::add(s.site(i), s.site(j)) == ratvec::add(s.site(h), s.site(k))
            } else {
                ratvec::sub(s.site(i), s.site(j)) == ratvec::sub(s.site(h), s.site(k))
            }
        }
        Witness::SmallRelation { nu } => {
            ratvec::is_zero(&s.pi_map(&IntVector(nu.clone())).expect("length"))
        }
        Witness::SphereCoincidence { nu, i, j } => {
            let w = s.pi_map(&IntVector(nu.clone())).expect("length");
            let vij = ratvec::add(s.site(i - 1), s.site(j - 1));
            ratvec::norm2(&w) + int(2) * ratvec::dot(&w, &vij) == int(-4) * s.gram(i - 1, j - 1)
        }
    }
}

/// Human-oriented one-line description of a violation.
pub fn describe_violation(s: &SiteSet, v: &Violation) -> String {
    match &v.witness {
        Witness::RankDeficit { rank, needed } => format!("sites span rank {rank} < {needed}"),
        Witness::RightAngleTriple { a, b, c } => {
            format!("right angle at v{a} in triangle (v{a}, v{b}, v{c})")
        }
        Witness::OrthogonalPair { i, j } => {
            format!("(v{i}, v{j}) = {}", format_scalar(s.gram(i - 1, j - 1)))
        }
        Witness::EdgeCollision { first, second, sum } => format!(
            "v{}{}v{} = v{}{}v{}",
            first.0,
            if *sum { "+" } else { "-" },
            first.1,
            second.0,
            if *sum { "+" } else { "-" },
            second.1
        ),
        Witness::SmallRelation { nu } => {
            format!("Σ ν_i v_i = 0 for ν = {}", IntVector(nu.clone()))
        }
        Witness::SphereCoincidence { nu, i, j } => format!(
            "sphere coincidence for ν = {} at pair ({i}, {j})",
            IntVector(nu.clone())
        ),
    }
}
