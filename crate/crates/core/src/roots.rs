//! Roots of univariate complex polynomials as eigenvalues of the balanced
//! companion matrix, by shifted complex Hessenberg QR.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

type C<T> = Complex<T>;

fn l1<T: Real>(z: C<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Horner evaluation of `Σ a_i z^i` and its derivative.
pub fn horner<T: Real>(coeffs: &[C<T>], z: C<T>) -> (C<T>, C<T>) {
    let mut f = C::zero();
    let mut df = C::zero();
    for &a in coeffs.iter().rev() {
        df = df * z + f;
        f = f * z + a;
    }
    (f, df)
}

/// `|f(z)| / Σ |a_i| |z|^i`.
pub fn backward_error<T: Real>(coeffs: &[C<T>], z: C<T>) -> T {
    let r = z.norm();
    let mut scale = T::zero();
    for a in coeffs.iter().rev() {
        scale = scale * r + a.norm();
    }
    horner(coeffs, z).0.norm() / scale
}

/// Companion matrix of the monic normalisation (upper Hessenberg).
fn companion<T: Real>(coeffs: &[C<T>]) -> Vec<Vec<C<T>>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let mut h = vec![vec![C::zero(); d]; d];
    for i in 1..d {
        h[i][i - 1] = C::new(T::one(), T::zero());
    }
    for i in 0..d {
        h[i][d - 1] = -coeffs[i] / lead;
    }
    h
}

/// Parlett–Reinsch balancing by powers of two.
fn balance<T: Real>(h: &mut [Vec<C<T>>]) {
    let n = h.len();
    let radix: T = lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + l1(h[j][i]);
                    r = r + l1(h[i][j]);
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let mut g = r / radix;
            let mut f = T::one();
            let s = c + r;
            while c < g {
                f = f * radix;
                c = c * sqrdx;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqrdx;
            }
            if (c + r) / f < lit::<T>(0.95) * s {
                done = false;
                let inv = T::one() / f;
                for j in 0..n {
                    h[i][j] = h[i][j] * inv;
                }
                for j in 0..n {
                    h[j][i] = h[j][i] * f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroyed).
pub fn hessenberg_eigenvalues<T: Real>(mut h: Vec<Vec<C<T>>>) -> Result<Vec<C<T>>> {
    let n = h.len();
    let mut eig = vec![C::zero(); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = l1(h[l - 1][l - 1]) + l1(h[l][l]);
            if l1(h[l][l - 1]) <= eps * s {
                h[l][l - 1] = C::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n {
            return Err(Error::EigenFailure);
        }
        let shift = if iter % 11 == 10 {
            h[hi][hi] + C::new(l1(h[hi][hi - 1]) * lit(0.75), T::zero())
        } else {
            let a = h[hi - 1][hi - 1];
            let b = h[hi - 1][hi];
            let c = h[hi][hi - 1];
            let d = h[hi][hi];
            let half: T = lit(0.5);
            let m = (a + d) * half;
            let quarter: T = lit(0.25);
            let disc: C<T> = ((a - d) * (a - d) * quarter + b * c).sqrt();
            let (r1, r2) = (m + disc, m - disc);
            if (r1 - d).norm() < (r2 - d).norm() {
                r1
            } else {
                r2
            }
        };
        for k in l..=hi {
            h[k][k] = h[k][k] - shift;
        }
        let mut rots: Vec<(T, C<T>)> = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == T::zero() {
                (T::one(), C::zero())
            } else if x.norm() == T::zero() {
                (T::zero(), C::new(T::one(), T::zero()))
            } else {
                let xn = x.norm();
                (xn / r, (x / xn) * y.conj() / r)
            };
            for j in k..=hi {
                let a = h[k][j];
                let b = h[k + 1][j];
                h[k][j] = a * c + s * b;
                h[k + 1][j] = -s.conj() * a + b * c;
            }
            rots.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rots[idx];
            for i in l..=(k + 1).min(hi) {
                let a = h[i][k];
                let b = h[i][k + 1];
                h[i][k] = a * c + b * s.conj();
                h[i][k + 1] = -a * s + b * c;
            }
        }
        for k in l..=hi {
            h[k][k] = h[k][k] + shift;
        }
    }
    Ok(eig)
}

/// All roots of `Σ_{i=0}^D a_i z^i` with `a_D ≠ 0`, polished by one
/// Newton step each.
pub fn polynomial_roots<T: Real>(coeffs: &[C<T>]) -> Result<Vec<C<T>>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    if coeffs[d].is_zero() {
        return Err(Error::DegeneratePolynomial);
    }
    let mut h = companion(coeffs);
    balance(&mut h);
    let roots = hessenberg_eigenvalues(h)?;
    Ok(roots
        .into_iter()
        .map(|z| {
            let (f, df) = horner(coeffs, z);
            if df.is_zero() {
                return z;
            }
            let polished = z - f / df;
            let finite = polished.re.is_finite() && polished.im.is_finite();
            if finite && backward_error(coeffs, polished) <= backward_error(coeffs, z) {
                polished
            } else {
                z
            }
        })
        .collect())
}

/// Coefficients of `z^n − 1`.
pub fn unity_polynomial<T: Real>(n: usize) -> Vec<C<T>> {
    let mut c = vec![C::zero(); n + 1];
    c[0] = C::new(-T::one(), T::zero());
    c[n] = C::new(T::one(), T::zero());
    c
}
