//! Exact linear algebra over the rationals and integer kernel bases.
#![allow(clippy::needless_range_loop)]
//!
//! Everything here is dense and small (matrices of at most a few dozen rows),
//! so plain fraction-free-ish Gaussian elimination with `BigRational` entries
//! is both exact and fast enough.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Dense rational matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Scalar>>,
}

impl Mat {
    pub fn new(data: Vec<Vec<Scalar>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        debug_assert!(data.iter().all(|r| r.len() == cols));
        Mat { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![vec![Scalar::zero(); cols]; rows],
        }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Mat::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::scalar::int(x)).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        row_echelon(&mut m).len()
    }
}

/// Reduces `m` in place to row echelon form; returns the pivot column of each
/// nonzero row, in order.
fn row_echelon(m: &mut [Vec<Scalar>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Outcome of solving `A x = b` exactly.
#[derive(Debug, Clone)]
pub enum LinSolve {
    /// No solution; `row` indexes an inconsistent reduced row, with the
    /// nonzero residual after elimination.
    Inconsistent { row: usize, residual: Scalar },
    /// Full affine solution set `particular + span(nullspace)`.
    Solved {
        particular: Vec<Scalar>,
        nullspace: Vec<Vec<Scalar>>,
    },
}

/// Solves `A x = b` over the rationals, returning the full affine space.
pub fn solve(a: &Mat, b: &[Scalar]) -> LinSolve {
    assert_eq!(a.rows, b.len(), "rhs length");
    let cols = a.cols;
    let mut m: Vec<Vec<Scalar>> = a
        .data
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_echelon(&mut m);
    // A pivot in the rhs column means 0 = nonzero.
    if let Some(pos) = pivots.iter().position(|&c| c == cols) {
        return LinSolve::Inconsistent {
            row: pos,
            residual: m[pos][cols].clone(),
        };
    }
    let mut particular = vec![Scalar::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = m[r][cols].clone();
    }
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -m[r][free].clone();
        }
        nullspace.push(v);
    }
    LinSolve::Solved {
        particular,
        nullspace,
    }
}

/// Basis of the integer kernel lattice `{ n in Z^k : sum n_i rows_i = 0 }`.
///
/// Computed by Hermite-reducing the row matrix while tracking the unimodular
/// transform; the transform rows paired with zero HNF rows are a saturated
/// kernel basis.
pub fn integer_kernel(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let k = rows.len();
    if k == 0 {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..k {
                if !m[i][c].is_zero()
                    && best.is_none_or(|b| m[i][c].abs() < m[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            u.swap(pivot_row, b);
            if m[pivot_row][c].is_negative() {
                for x in m[pivot_row].iter_mut() {
                    *x = -x.clone();
                }
                for x in u[pivot_row].iter_mut() {
                    *x = -x.clone();
                }
            }
            let mut done = true;
            for i in 0..k {
                if i == pivot_row || m[i][c].is_zero() {
                    continue;
                }
                let q = div_floor_bigint(&m[i][c], &m[pivot_row][c]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let t = &m[pivot_row][j] * &q;
                        m[i][j] -= t;
                    }
                    for j in 0..k {
                        let t = &u[pivot_row][j] * &q;
                        u[i][j] -= t;
                    }
                }
                if i > pivot_row && !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot_row += 1;
                break;
            }
        }
        if pivot_row == k {
            break;
        }
    }
    let mut kernel: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..k {
        if m[i].iter().all(|x| x.is_zero()) {
            kernel.push(u[i].clone());
        }
    }
    debug_assert!(kernel.iter().all(|v| {
        let mut s = vec![BigInt::zero(); cols];
        for (i, c) in v.iter().enumerate() {
            for (j, &x) in rows[i].iter().enumerate() {
                s[j] += c * BigInt::from(x);
            }
        }
        s.iter().all(|x| x.is_zero())
    }));
    kernel
}

/// Row-style Hermite normal form of the lattice spanned by `gens`.
/// Returns a basis (independent rows, deterministic shape).
pub fn hermite_normal_form(gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let cols = gens[0].len();
    let mut rows: Vec<Vec<BigInt>> = gens.to_vec();
    let mut pivot_row = 0;
    for c in 0..cols {
        loop {
            // Find the row (>= pivot_row) with the smallest nonzero |entry| in column c.
            let mut best: Option<usize> = None;
            for i in pivot_row..rows.len() {
                if !rows[i][c].is_zero()
                    && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            if rows[pivot_row][c].is_negative() {
                for x in rows[pivot_row].iter_mut() {
                    *x = -x.clone();
                }
            }
            let mut done = true;
            for i in 0..rows.len() {
                if i == pivot_row || rows[i][c].is_zero() {
                    continue;
                }
                let q = div_floor_bigint(&rows[i][c], &rows[pivot_row][c]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let t = &rows[pivot_row][j] * &q;
                        rows[i][j] -= t;
                    }
                }
                // Rows above the pivot legitimately keep a reduced remainder.
                if i > pivot_row && !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot_row += 1;
                break;
            }
        }
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows
}

fn div_floor_bigint(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn rank_of_singular_matrix() {
        let m = Mat::from_int_rows(&[vec![1, 2], vec![2, 4], vec![3, 6]]);
        assert_eq!(m.rank(), 1);
        let id = Mat::from_int_rows(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(id.rank(), 2);
    }

    #[test]
    fn solve_unique() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = Mat::from_int_rows(&[vec![1, 1], vec![1, -1]]);
        match solve(&a, &[int(3), int(1)]) {
            LinSolve::Solved {
                particular,
                nullspace,
            } => {
                assert_eq!(particular, vec![int(2), int(1)]);
                assert!(nullspace.is_empty());
            }
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn solve_inconsistent() {
        let a = Mat::from_int_rows(&[vec![1, 1], vec![2, 2]]);
        match solve(&a, &[int(1), int(3)]) {
            LinSolve::Inconsistent { residual, .. } => assert!(!residual.is_zero()),
            _ => panic!("expected inconsistency"),
        }
    }

    #[test]
    fn solve_underdetermined_space() {
        let a = Mat::from_int_rows(&[vec![1, 1, 1]]);
        match solve(&a, &[int(6)]) {
            LinSolve::Solved {
                particular,
                nullspace,
            } => {
                assert_eq!(nullspace.len(), 2);
                assert_eq!(particular[0], int(6));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn kernel_of_dependent_rows() {
        // rows: a, b, a+b  =>  kernel spanned by (1, 1, -1)
        let rows = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let k = integer_kernel(&rows);
        assert_eq!(k.len(), 1);
        let v: Vec<i64> = k[0].iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert!(v == vec![1, 1, -1] || v == vec![-1, -1, 1]);
    }

    #[test]
    fn kernel_is_saturated() {
        // rows 2a, a: kernel {(n1,n2): 2 n1 + n2 = 0} = span (1, -2), not (2, -4)
        let rows = vec![vec![2, 0], vec![1, 0]];
        let k = integer_kernel(&rows);
        assert_eq!(k.len(), 1);
        let v: Vec<i64> = k[0].iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert!(v == vec![1, -2] || v == vec![-1, 2], "{v:?}");
    }

    #[test]
    fn kernel_empty_for_independent_rows() {
        let rows = vec![vec![1, 0, 0], vec![0, 1, 0]];
        assert!(integer_kernel(&rows).is_empty());
    }

    #[test]
    fn hnf_shape() {
        let gens = vec![
            vec![BigInt::from(4), BigInt::from(0)],
            vec![BigInt::from(6), BigInt::from(2)],
        ];
        let h = hermite_normal_form(&gens);
        assert_eq!(h.len(), 2);
        assert!(h[0][0] > BigInt::from(0));
    }
}
