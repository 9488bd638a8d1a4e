//! Small dense linear algebra for matrices of size at most a few dozen.

use crate::scalar::{lit, Real};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn zeros<T: Real>(rows: usize, cols: usize) -> Matrix<T> {
    vec![vec![T::zero(); cols]; rows]
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub fn solve<T: Real>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut m: Matrix<T> = a.clone();
    let mut rhs = b.to_vec();
    let scale = a
        .iter()
        .flatten()
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if scale == T::zero() {
        return if n == 0 { Some(vec![]) } else { None };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv][col].abs() <= scale * T::epsilon() * lit(16.0) {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != T::zero() {
                for k in col..n {
                    let v = m[col][k];
                    m[row][k] = m[row][k] - f * v;
                }
                rhs[row] = rhs[row] - f * rhs[col];
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in row + 1..n {
            s = s - m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

pub fn determinant<T: Real>(a: &Matrix<T>) -> T {
    let n = a.len();
    let mut m = a.clone();
    let mut det = T::one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .abs()
                    .partial_cmp(&m[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[piv][col] == T::zero() {
            return T::zero();
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det = det * m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[row][k] = m[row][k] - f * v;
            }
        }
    }
    det
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..64 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let diag: T = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (m[p][q] + m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Orthonormal basis of the span of `vectors` (modified Gram–Schmidt).
pub fn orthonormal_basis<T: Real>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        let len0 = crate::scalar::norm(&w);
        if len0 == T::zero() {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = crate::scalar::dot(&w, b);
                for (wi, &bi) in w.iter_mut().zip(b) {
                    *wi = *wi - c * bi;
                }
            }
        }
        let len = crate::scalar::norm(&w);
        if len > len0 * lit(1e-10) {
            basis.push(w.into_iter().map(|x| x / len).collect());
        }
    }
    basis
}

pub fn mat_vec<T: Real>(a: &Matrix<T>, x: &[T]) -> Vec<T> {
    a.iter().map(|row| crate::scalar::dot(row, x)).collect()
}
