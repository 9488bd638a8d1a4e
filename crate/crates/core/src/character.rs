//! Polytope characters `χ_{NP}(e^w) = Σ_{α ∈ NP} e^{⟨w, α⟩}` and the
//! one-dimensional Todd-operator formula.

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polytope::LatticePolytope;
use crate::scalar::{from_i64, lit, Real};
use crate::szego::check_guard;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharacterMethod {
    ExactSum,
    Todd1d,
}

#[derive(Clone, Debug)]
pub struct CharacterEval<T> {
    pub n: i64,
    pub w: Vec<Complex<T>>,
    /// The value itself; infinite when it overflows.
    pub value: Complex<T>,
    /// `log|χ| + i arg χ`.
    pub log_value: Complex<T>,
    pub method: CharacterMethod,
}

fn pairing<T: Real>(w: &[Complex<T>], a: &[i64]) -> Complex<T> {
    w.iter()
        .zip(a)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&wi, &k)| acc + wi * from_i64::<T>(k))
}

/// Exact character of `N·P` by enumeration.
pub fn character_exact<T: Real>(poly: &LatticePolytope, n: i64, w: &[Complex<T>]) -> Result<CharacterEval<T>> {
    if w.len() != poly.ambient_dim() {
        return Err(Error::InvalidArgument("w has the wrong dimension".into()));
    }
    check_guard(poly, n)?;
    let exps: Vec<Complex<T>> = poly.lattice_points(n).iter().map(|a| pairing(w, a)).collect();
    let shift = exps.iter().fold(T::neg_infinity(), |m, e| m.max(e.re));
    let scaled: Complex<T> = exps.iter().map(|e| (e - shift).exp()).sum();
    let log_value = Complex::new(shift, T::zero()) + scaled.ln();
    let value = if shift < lit(600.0) {
        exps.iter().map(|e| e.exp()).sum()
    } else {
        log_value.exp()
    };
    Ok(CharacterEval {
        n,
        w: w.to_vec(),
        value,
        log_value,
        method: CharacterMethod::ExactSum,
    })
}

/// `|(1/N) log χ_{NP}(e^w) − max_v ⟨w, v⟩|` for each `N` in `ns`, real `w`.
pub fn support_function_limit<T: Real>(poly: &LatticePolytope, w: &[T], ns: &[i64]) -> Result<Vec<T>> {
    let support = poly
        .vertices()
        .iter()
        .map(|v| w.iter().zip(v).map(|(&wi, &k)| wi * from_i64::<T>(k)).sum::<T>())
        .fold(T::neg_infinity(), |a, b| a.max(b));
    let wc: Vec<Complex<T>> = w.iter().map(|&x| Complex::new(x, T::zero())).collect();
    ns.iter()
        .map(|&n| {
            let e = character_exact(poly, n, &wc)?;
            Ok((e.log_value.re / from_i64::<T>(n) - support).abs())
        })
        .collect()
}

/// Bernoulli number `B_k` with the convention `B_1 = +1/2`.
pub fn bernoulli(k: usize) -> Ratio<i128> {
    let mut b: Vec<Ratio<i128>> = vec![Ratio::from_integer(1)];
    for n in 1..=k {
        let mut s = Ratio::zero();
        let mut binom: i128 = 1;
        for (j, bj) in b.iter().enumerate() {
            s += *bj * binom;
            binom = binom * (n as i128 + 1 - j as i128) / (j as i128 + 1);
        }
        b.push(-s / (n as i128 + 1));
    }
    if k == 1 {
        -b[1]
    } else {
        b[k]
    }
}

/// Taylor coefficients of `Todd(x) = x / (1 − e^{−x})` up to `x^order`.
pub fn todd_coefficients(order: usize) -> Vec<Ratio<i128>> {
    let mut fact: i128 = 1;
    (0..=order)
        .map(|k| {
            if k > 0 {
                fact *= k as i128;
            }
            bernoulli(k) / fact
        })
        .collect()
}

/// `(e^x − 1) / x`.
fn exprel<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < lit(0.5) {
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        for k in 2..40 {
            term = term * x / from_i64::<T>(k);
            sum = sum + term;
            if term.norm() <= T::epsilon() * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (x.exp() - T::one()) / x
    }
}

/// Truncated Todd-operator approximation of `Σ_{k=Na}^{Nb} e^{wk}`.
///
/// `order` is the highest power of the Todd series kept: order 0 is the
/// plain integral `∫_{Na}^{Nb} e^{wx} dx`, order 1 adds the endpoint
/// half-weights, and from there each even power adds one Bernoulli term.
pub fn character_1d_todd<T: Real>(a: i64, b: i64, n: i64, w: Complex<T>, order: usize) -> Result<Complex<T>> {
    if order > 20 {
        return Err(Error::InvalidArgument(format!("Todd order {order} > 20")));
    }
    if w.im.abs() >= T::PI() + T::PI() {
        return Err(Error::InvalidArgument("|Im w| must be below 2π".into()));
    }
    if b < a {
        return Err(Error::InvalidArgument("empty interval".into()));
    }
    let coef = todd_coefficients(order);
    let mut even = Complex::new(T::zero(), T::zero());
    let w2 = w * w;
    let mut pow = Complex::new(T::one(), T::zero());
    for k in (0..=order).step_by(2) {
        let c = coef[k];
        let ck = T::from_f64(c.numer().to_f64().unwrap() / c.denom().to_f64().unwrap()).unwrap();
        even = even + pow * ck;
        pow = pow * w2;
    }
    let (lo, hi) = (n * a, n * b);
    let len = from_i64::<T>(hi - lo);
    let e_lo = (w * from_i64::<T>(lo)).exp();
    let e_hi = (w * from_i64::<T>(hi)).exp();
    let mut value = even * e_lo * len * exprel(w * len);
    if order >= 1 {
        value = value + (e_hi + e_lo) * lit::<T>(0.5);
    }
    Ok(value)
}

/// `Σ_{k=lo}^{hi} e^{wk}` by direct summation.
pub fn geometric_sum<T: Real>(lo: i64, hi: i64, w: Complex<T>) -> Complex<T> {
    (lo..=hi).map(|k| (w * from_i64::<T>(k)).exp()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(0), Ratio::from_integer(1));
        assert_eq!(bernoulli(1), Ratio::new(1, 2));
        assert_eq!(bernoulli(2), Ratio::new(1, 6));
        assert_eq!(bernoulli(3), Ratio::zero());
        assert_eq!(bernoulli(12), Ratio::new(-691, 2730));
        assert_eq!(bernoulli(20), Ratio::new(-174611, 330));
    }

    #[test]
    fn exact_sums() {
        let seg = LatticePolytope::from_vertices(&[vec![0], vec![1]], 1).unwrap();
        let e = character_exact(&seg, 2, &[c(2f64.ln(), 0.0)]).unwrap();
        assert!((e.value - c(7.0, 0.0)).norm() < 1e-13);
        let sq = LatticePolytope::lattice_box(&[(0, 1), (0, 1)], 2).unwrap();
        let e = character_exact(&sq, 1, &[c(0.0, std::f64::consts::PI), c(0.0, 0.0)]).unwrap();
        assert!(e.value.norm() < 1e-15);
        let e0 = character_exact(&sq, 3, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(e0.value, c(16.0, 0.0));
    }

    #[test]
    fn todd_matches_geometric_sum() {
        let w = c(0.1, 0.0);
        let exact = geometric_sum(0, 3, w);
        let t = character_1d_todd(0, 1, 3, w, 12).unwrap();
        assert!((t - exact).norm() < 1e-10);
        assert_eq!(character_1d_todd(1, 3, 4, c(0.0, 0.0), 1).unwrap(), c(9.0, 0.0));
        let plain = character_1d_todd(0, 1, 3, w, 0).unwrap();
        assert!((plain - exact).norm() > 0.5);
        assert!(character_1d_todd(0, 1, 3, c(0.0, 7.0), 4).is_err());
        assert!(character_1d_todd(0, 1, 3, w, 21).is_err());
    }
}
