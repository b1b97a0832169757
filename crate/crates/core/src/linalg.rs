//! Dense exact linear algebra over ℚ: determinant, inverse, inertia and the
//! LDLᵀ factorization used by the short-vector enumerator.

#![allow(clippy::needless_range_loop)]

use crate::exact::Q;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<Q>>;

pub fn from_integers(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&v| Q::from_integer(v.into())).collect())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_vec(m: &Matrix, v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Gauss–Jordan elimination on `[m | rhs]`. Returns `None` if `m` is singular.
fn eliminate(m: &Matrix, rhs: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let w = rhs.first().map_or(0, |r| r.len());
    let mut a: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| row.iter().chain(r.iter()).cloned().collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = Q::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..n + w].to_vec()).collect())
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    eliminate(m, &identity(m.len()))
}

pub fn solve(m: &Matrix, rhs: &[Q]) -> Option<Vec<Q>> {
    let col: Matrix = rhs.iter().map(|x| vec![x.clone()]).collect();
    eliminate(m, &col).map(|s| s.into_iter().map(|mut r| r.remove(0)).collect())
}

pub fn determinant(m: &Matrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Q::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Number of (positive, negative, zero) squares in a congruence
/// diagonalization of the symmetric matrix `m` (Sylvester's law of inertia).
pub fn inertia(m: &Matrix) -> (usize, usize, usize) {
    let mut a = m.clone();
    let n = a.len();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap_sym(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // Zero diagonal with a non-zero off-diagonal entry: replace
                // e_k by e_k + e_j, giving a diagonal of 2a_kj ≠ 0.
                add_sym(&mut a, k, j);
            } else {
                zero += 1;
                k += 1;
                continue;
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        // Schur complement; stays symmetric.
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = &a[r][k] / &p;
            for c in k + 1..n {
                let delta = &f * &a[k][c];
                a[r][c] -= delta;
            }
        }
        for r in k + 1..n {
            a[r][k] = Q::zero();
            a[k][r] = Q::zero();
        }
        k += 1;
    }
    (pos, neg, zero)
}

fn swap_sym(a: &mut Matrix, i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn add_sym(a: &mut Matrix, k: usize, j: usize) {
    let n = a.len();
    for c in 0..n {
        let v = a[j][c].clone();
        a[k][c] += v;
    }
    for r in 0..n {
        let v = a[r][j].clone();
        a[r][k] += v;
    }
}

/// `q(x) = Σᵢ dᵢ (xᵢ + Σ_{j>i} μᵢⱼ xⱼ)²` for a positive definite `m`.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub diag: Vec<Q>,
    /// `mu[i][j]` for `j > i`; zero elsewhere.
    pub mu: Matrix,
}

/// Completes squares on a positive definite form. Returns `None` when a
/// non-positive pivot shows the form is not positive definite.
pub fn ldl_positive(m: &Matrix) -> Option<Ldl> {
    let n = m.len();
    let mut a = m.clone();
    let mut diag = Vec::with_capacity(n);
    let mut mu = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        let d = a[i][i].clone();
        if !d.is_positive() {
            return None;
        }
        for j in i + 1..n {
            mu[i][j] = &a[i][j] / &d;
        }
        for r in i + 1..n {
            for c in i + 1..n {
                let delta = &mu[i][r] * &a[i][c];
                a[r][c] -= delta;
            }
        }
        diag.push(d);
    }
    Some(Ldl { diag, mu })
}
