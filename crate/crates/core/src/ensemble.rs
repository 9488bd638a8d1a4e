//! Gaussian random polynomials with support `NP` and Monte Carlo statistics
//! of their zeros in one variable.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::momentmap::{NormalSolver, Region, TorusPoint};
use crate::polytope::{LatticePolytope, Rational};
use crate::roots::{backward_error, polynomial_roots};
use crate::scalar::{from_i64, lit, ln_factorial, LogSumExp, Real};
use crate::szego::check_guard;

/// Endpoint coefficients below this modulus trigger a fresh draw.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Largest accepted `|f(r)| / Σ|a_i||r|^i` for a computed root in `f64`.
pub const ROOT_RESIDUAL_LIMIT: f64 = 1e-8;
pub const HISTOGRAM_BINS: usize = 10;

/// One draw `f = Σ c_α χ_α / ‖χ_α‖` over `NP ∩ ℤ^m`.
#[derive(Clone, Debug)]
pub struct SparsePolynomial<T> {
    pub n: i64,
    pub degree: i64,
    /// Exponents in lexicographic order.
    pub exponents: Vec<Vec<i64>>,
    /// Standard complex Gaussian coefficients `c_α`.
    pub coeffs: Vec<Complex<T>>,
    /// `−log ‖χ_α‖`.
    pub log_scale: Vec<T>,
    pub seed: u64,
    pub sample_index: u64,
    /// Number of discarded degenerate draws before this one.
    pub resamples: u32,
}

/// `−log ‖χ_α‖ = ½ [log (d+m)! − log (d−|α|)! − Σ log α_j!]` with `d = Np`.
pub fn log_monomial_scale<T: Real>(alpha: &[i64], d: i64) -> T {
    let m = alpha.len() as i64;
    let rest = d - alpha.iter().sum::<i64>();
    let mut v = ln_factorial::<T>(d + m) - ln_factorial::<T>(rest);
    for &a in alpha {
        v = v - ln_factorial::<T>(a);
    }
    v * lit(0.5)
}

fn coefficient_rng(seed: u64, sample_index: u64, resample: u32, alpha_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((sample_index << 16) | resample as u64);
    rng.set_word_pos((alpha_index as u128) << 8);
    rng
}

fn draw_coefficient<T: Real>(rng: &mut ChaCha8Rng) -> Complex<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re * s), lit(im * s))
}

impl<T: Real> SparsePolynomial<T> {
    /// Draw number `sample_index` of the ensemble for `(P, N, seed)`. In one
    /// variable, draws with an endpoint coefficient below
    /// [`DEGENERACY_THRESHOLD`] are replaced.
    pub fn sample(poly: &LatticePolytope, n: i64, seed: u64, sample_index: u64) -> Result<Self> {
        check_guard(poly, n)?;
        let degree = n * poly.degree_bound();
        let exponents = poly.lattice_points(n);
        let log_scale = exponents.iter().map(|a| log_monomial_scale(a, degree)).collect();
        let mut f = Self {
            n,
            degree,
            coeffs: Vec::new(),
            exponents,
            log_scale,
            seed,
            sample_index,
            resamples: 0,
        };
        while f.resamples < u16::MAX as u32 {
            f.coeffs = (0..f.exponents.len())
                .map(|i| draw_coefficient(&mut coefficient_rng(seed, sample_index, f.resamples, i)))
                .collect();
            if !f.is_degenerate() {
                return Ok(f);
            }
            f.resamples += 1;
        }
        Err(Error::DegeneratePolynomial)
    }

    /// A polynomial given by its monomial coefficients `a_α` on `NP`, with
    /// missing exponents set to zero.
    pub fn from_monomials(poly: &LatticePolytope, n: i64, monomials: &[(Vec<i64>, Complex<T>)]) -> Result<Self> {
        check_guard(poly, n)?;
        let degree = n * poly.degree_bound();
        let exponents = poly.lattice_points(n);
        let log_scale: Vec<T> = exponents.iter().map(|a| log_monomial_scale(a, degree)).collect();
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); exponents.len()];
        for (alpha, a) in monomials {
            let idx = exponents
                .binary_search(alpha)
                .map_err(|_| Error::InvalidArgument(format!("exponent {alpha:?} is not in NP")))?;
            coeffs[idx] = *a * (-log_scale[idx]).exp();
        }
        Ok(Self {
            n,
            degree,
            exponents,
            coeffs,
            log_scale,
            seed: 0,
            sample_index: 0,
            resamples: 0,
        })
    }

    pub fn m(&self) -> usize {
        self.exponents.first().map_or(0, |a| a.len())
    }

    fn is_degenerate(&self) -> bool {
        if self.m() != 1 {
            return false;
        }
        let thr: T = lit(DEGENERACY_THRESHOLD);
        match (self.coeffs.first(), self.coeffs.last()) {
            (Some(a), Some(b)) => a.norm() < thr || b.norm() < thr,
            _ => true,
        }
    }

    /// Monomial coefficients `c_α / ‖χ_α‖`, all rescaled by one common
    /// positive factor so the largest scale is 1.
    pub fn scaled_monomial_coefficients(&self) -> Vec<Complex<T>> {
        let top = self.log_scale.iter().copied().fold(T::neg_infinity(), T::max);
        self.coeffs
            .iter()
            .zip(&self.log_scale)
            .map(|(c, &s)| *c * (s - top).exp())
            .collect()
    }
}

/// Roots in `ℂ*` of one univariate draw.
#[derive(Clone, Debug)]
pub struct ZeroSample<T> {
    pub roots: Vec<Complex<T>>,
    pub n: i64,
    pub allowed_count: usize,
    pub forbidden_count: usize,
    pub transition_count: usize,
    pub max_backward_error: T,
    pub resamples: u32,
}

impl<T: Real> ZeroSample<T> {
    /// Labels every root with the region decomposition of `solver`.
    pub fn classify(&mut self, solver: &NormalSolver<'_, T>) -> Result<()> {
        let (mut a, mut f, mut t) = (0, 0, 0);
        for r in &self.roots {
            match solver.classify(&TorusPoint::from_complex(&[*r]))? {
                Region::Allowed => a += 1,
                Region::Forbidden(_) => f += 1,
                Region::Transition => t += 1,
            }
        }
        self.allowed_count = a;
        self.forbidden_count = f;
        self.transition_count = t;
        Ok(())
    }
}

/// Factors out `z^{Na}` and returns the `N(b − a)` roots of the rest.
pub fn univariate_roots<T: Real>(f: &SparsePolynomial<T>) -> Result<ZeroSample<T>> {
    if f.m() != 1 {
        return Err(Error::UnsupportedDimension(f.m()));
    }
    if f.is_degenerate() {
        return Err(Error::DegeneratePolynomial);
    }
    let lo = f.exponents[0][0];
    let hi = f.exponents[f.exponents.len() - 1][0];
    let scaled = f.scaled_monomial_coefficients();
    let mut dense = vec![Complex::new(T::zero(), T::zero()); (hi - lo + 1) as usize];
    for (a, c) in f.exponents.iter().zip(scaled) {
        dense[(a[0] - lo) as usize] = c;
    }
    let roots = polynomial_roots(&dense)?;
    let limit = lit::<T>(ROOT_RESIDUAL_LIMIT).max(T::epsilon() * lit(1e3));
    let mut worst = T::zero();
    for r in &roots {
        let e = backward_error(&dense, *r);
        if !(e <= limit) {
            return Err(Error::NonConvergence {
                residual: e.to_f64().unwrap_or(f64::NAN),
            });
        }
        worst = worst.max(e);
    }
    Ok(ZeroSample {
        roots,
        n: f.n,
        allowed_count: 0,
        forbidden_count: 0,
        transition_count: 0,
        max_backward_error: worst,
        resamples: f.resamples,
    })
}

/// Histogram of `μ(|z|) ∈ [0, 1]` over pooled roots, normalised to a
/// probability density, with two reference densities: the limit
/// (uniform on `P/p`) and the exact expected density at the given `N`.
#[derive(Clone, Debug)]
pub struct RadialHistogram<T> {
    pub edges: Vec<T>,
    pub empirical: Vec<T>,
    pub predicted: Vec<T>,
    pub predicted_finite_n: Vec<T>,
}

impl<T: Real> RadialHistogram<T> {
    pub fn centers(&self) -> Vec<T> {
        self.edges
            .windows(2)
            .map(|w| (w[0] + w[1]) * lit(0.5))
            .collect()
    }

    fn sup(a: &[T], b: &[T]) -> T {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x - y).abs())
            .fold(T::zero(), T::max)
    }

    /// Sup distance to the limit density.
    pub fn sup_error(&self) -> T {
        Self::sup(&self.empirical, &self.predicted)
    }

    /// Sup distance to the expected density at finite `N`.
    pub fn sup_error_finite_n(&self) -> T {
        Self::sup(&self.empirical, &self.predicted_finite_n)
    }
}

/// Expected number of roots of modulus below `√(y/(1−y))`, for support
/// `[lo, hi]` in degree `d`: `E_w[α] − lo` with `w_α ∝ binom(d, α) y^α (1−y)^{d−α}`.
pub fn expected_root_count_below<T: Real>(lo: i64, hi: i64, d: i64, y: T) -> T {
    if y <= T::zero() {
        return T::zero();
    }
    if y >= T::one() {
        return from_i64(hi - lo);
    }
    let (ly, l1y) = (y.ln(), (-y).ln_1p());
    let logw: Vec<T> = (lo..=hi)
        .map(|a| {
            ln_factorial::<T>(d) - ln_factorial::<T>(a) - ln_factorial::<T>(d - a)
                + from_i64::<T>(a) * ly
                + from_i64::<T>(d - a) * l1y
        })
        .collect();
    let mut acc = LogSumExp::default();
    for &w in &logw {
        acc.push(w);
    }
    let total = acc.value();
    let mean: T = (lo..=hi)
        .zip(&logw)
        .map(|(a, &w)| from_i64::<T>(a) * (w - total).exp())
        .sum();
    mean - from_i64(lo)
}

fn radial_histogram<T: Real>(mus: &[T], lo: i64, hi: i64, n: i64, p: i64, bins: usize) -> RadialHistogram<T> {
    let width = T::one() / from_i64::<T>(bins as i64);
    let edges: Vec<T> = (0..=bins).map(|i| from_i64::<T>(i as i64) * width).collect();
    let mut counts = vec![0usize; bins];
    for &y in mus {
        let i = (y / width).to_usize().unwrap_or(0).min(bins - 1);
        counts[i] += 1;
    }
    let total = from_i64::<T>(mus.len().max(1) as i64);
    let empirical = counts
        .iter()
        .map(|&c| from_i64::<T>(c as i64) / (total * width))
        .collect();
    let (a, b) = (
        from_i64::<T>(lo) / from_i64::<T>(n * p),
        from_i64::<T>(hi) / from_i64::<T>(n * p),
    );
    let predicted = edges
        .windows(2)
        .map(|w| {
            let overlap = (w[1].min(b) - w[0].max(a)).max(T::zero());
            if b > a {
                overlap / ((b - a) * width)
            } else {
                T::zero()
            }
        })
        .collect();
    let d = n * p;
    let len = from_i64::<T>((hi - lo).max(1));
    let cum: Vec<T> = edges
        .iter()
        .map(|&y| expected_root_count_below(lo, hi, d, y))
        .collect();
    let predicted_finite_n = cum.windows(2).map(|c| (c[1] - c[0]) / (len * width)).collect();
    RadialHistogram {
        edges,
        empirical,
        predicted,
        predicted_finite_n,
    }
}

/// Pooled zero statistics over `samples` draws.
#[derive(Clone, Debug)]
pub struct ZeroStats<T> {
    pub n: i64,
    pub samples: usize,
    pub seed: u64,
    pub total_roots: usize,
    pub allowed_count: usize,
    pub forbidden_count: usize,
    pub transition_count: usize,
    pub allowed_fraction: T,
    /// Root count of each draw, by sample index.
    pub roots_per_sample: Vec<usize>,
    /// Per-draw allowed fractions, by sample index.
    pub sample_fractions: Vec<T>,
    pub resamples: u64,
    pub max_backward_error: T,
    pub histogram: RadialHistogram<T>,
}

impl<T: Real> ZeroStats<T> {
    /// Standard error of the allowed fraction across draws.
    pub fn allowed_fraction_stderr(&self) -> T {
        let k = self.sample_fractions.len();
        if k < 2 {
            return T::zero();
        }
        let kt = from_i64::<T>(k as i64);
        let mean = self.sample_fractions.iter().copied().sum::<T>() / kt;
        let var = self
            .sample_fractions
            .iter()
            .map(|&x| (x - mean) * (x - mean))
            .sum::<T>()
            / (kt - T::one());
        (var / kt).sqrt()
    }
}

/// Draw, solve and classify one sample.
pub fn sample_zeros<T: Real>(
    poly: &LatticePolytope,
    solver: &NormalSolver<'_, T>,
    n: i64,
    seed: u64,
    index: u64,
) -> Result<ZeroSample<T>> {
    let f = SparsePolynomial::sample(poly, n, seed, index)?;
    let mut z = univariate_roots(&f)?;
    z.classify(solver)?;
    Ok(z)
}

/// Monte Carlo zero statistics of the ensemble on a one-dimensional `P`.
pub fn empirical_zero_stats<T: Real>(poly: &LatticePolytope, n: i64, samples: usize, seed: u64) -> Result<ZeroStats<T>> {
    if poly.ambient_dim() != 1 {
        return Err(Error::UnsupportedDimension(poly.ambient_dim()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let solver = NormalSolver::<T>::new(poly)?;
    let draws: Vec<Result<ZeroSample<T>>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| sample_zeros(poly, &solver, n, seed, i))
        .collect();
    let draws: Vec<ZeroSample<T>> = draws.into_iter().collect::<Result<_>>()?;
    let verts = poly.vertices();
    let lo = verts.iter().map(|v| v[0]).min().unwrap_or(0) * n;
    let hi = verts.iter().map(|v| v[0]).max().unwrap_or(0) * n;
    let mus: Vec<T> = draws
        .iter()
        .flat_map(|s| s.roots.iter())
        .map(|r| {
            let s = r.norm_sqr();
            if s.is_infinite() {
                T::one()
            } else {
                s / (T::one() + s)
            }
        })
        .collect();
    let total_roots = mus.len();
    let allowed_count = draws.iter().map(|s| s.allowed_count).sum();
    let stats = ZeroStats {
        n,
        samples,
        seed,
        total_roots,
        allowed_count,
        forbidden_count: draws.iter().map(|s| s.forbidden_count).sum(),
        transition_count: draws.iter().map(|s| s.transition_count).sum(),
        allowed_fraction: if total_roots == 0 {
            T::one()
        } else {
            from_i64::<T>(allowed_count as i64) / from_i64::<T>(total_roots as i64)
        },
        roots_per_sample: draws.iter().map(|s| s.roots.len()).collect(),
        sample_fractions: draws
            .iter()
            .map(|s| {
                if s.roots.is_empty() {
                    T::one()
                } else {
                    from_i64::<T>(s.allowed_count as i64) / from_i64::<T>(s.roots.len() as i64)
                }
            })
            .collect(),
        resamples: draws.iter().map(|s| s.resamples as u64).sum(),
        max_backward_error: draws.iter().map(|s| s.max_backward_error).fold(T::zero(), T::max),
        histogram: radial_histogram(&mus, lo, hi, n, poly.degree_bound(), HISTOGRAM_BINS),
    };
    Ok(stats)
}

/// `P ∩ F̄_j` for a facet of `pΣ` in two variables, in the facet's lattice
/// coordinate. Index `j ∈ {1, 2}` is the facet `x_j = 0`, index 0 the facet
/// `x_1 + x_2 = p`.
pub fn facet_polytope(poly: &LatticePolytope, facet_index: usize) -> Result<LatticePolytope> {
    if poly.ambient_dim() != 2 {
        return Err(Error::UnsupportedDimension(poly.ambient_dim()));
    }
    if facet_index > 2 {
        return Err(Error::InvalidArgument(format!("facet index {facet_index} out of range")));
    }
    let p = poly.degree_bound();
    let coords: Vec<i64> = poly
        .vertices()
        .iter()
        .filter_map(|v| match facet_index {
            0 => (v[0] + v[1] == p).then_some(v[0]),
            1 => (v[0] == 0).then_some(v[1]),
            _ => (v[1] == 0).then_some(v[0]),
        })
        .collect();
    let (Some(&lo), Some(&hi)) = (coords.iter().min(), coords.iter().max()) else {
        return Err(Error::DegenerateFacet);
    };
    if lo == hi {
        return Err(Error::DegenerateFacet);
    }
    LatticePolytope::from_vertices(&[vec![lo], vec![hi]], p)
}

/// Allowed fraction of the zeros of the facet-restricted ensemble, i.e. of
/// the free tentacle ends on that facet.
pub fn tentacle_allowed_fraction<T: Real>(
    poly: &LatticePolytope,
    facet_index: usize,
    n: i64,
    samples: usize,
    seed: u64,
) -> Result<T> {
    let facet = facet_polytope(poly, facet_index)?;
    Ok(empirical_zero_stats::<T>(&facet, n, samples, seed)?.allowed_fraction)
}

/// Lattice length of a one-dimensional polytope.
pub fn lattice_length(poly: &LatticePolytope) -> Rational {
    poly.volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: i64, b: i64, p: i64) -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![a], vec![b]], p).unwrap()
    }

    #[test]
    fn deterministic_draws() {
        let p = seg(1, 3, 4);
        let f = SparsePolynomial::<f64>::sample(&p, 5, 9, 3).unwrap();
        let g = SparsePolynomial::<f64>::sample(&p, 5, 9, 3).unwrap();
        assert_eq!(f.coeffs, g.coeffs);
        let h = SparsePolynomial::<f64>::sample(&p, 5, 9, 4).unwrap();
        assert_ne!(f.coeffs, h.coeffs);
        assert_eq!(f.coeffs.len(), 11);
    }

    #[test]
    fn single_point_support() {
        let p = LatticePolytope::from_vertices(&[vec![2]], 4).unwrap();
        let f = SparsePolynomial::<f64>::sample(&p, 3, 1, 0).unwrap();
        assert_eq!(f.coeffs.len(), 1);
        assert!(univariate_roots(&f).unwrap().roots.is_empty());
    }

    #[test]
    fn unity_roots_through_manual_path() {
        let n = 12;
        let p = seg(0, 1, 1);
        let one = Complex::new(1.0, 0.0);
        let f = SparsePolynomial::<f64>::from_monomials(&p, n, &[(vec![0], -one), (vec![n], one)]).unwrap();
        let z = univariate_roots(&f).unwrap();
        assert_eq!(z.roots.len(), n as usize);
        for r in z.roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn root_count_and_residual() {
        let p = seg(1, 3, 4);
        let solver = NormalSolver::<f64>::new(&p).unwrap();
        for i in 0..20 {
            let z = sample_zeros(&p, &solver, 10, 7, i).unwrap();
            assert_eq!(z.roots.len(), 20);
            assert!(z.max_backward_error <= 1e-8);
            assert_eq!(z.allowed_count + z.forbidden_count + z.transition_count, 20);
        }
    }

    #[test]
    fn expected_count_limits() {
        assert_eq!(expected_root_count_below::<f64>(10, 30, 40, 0.0), 0.0);
        assert_eq!(expected_root_count_below::<f64>(10, 30, 40, 1.0), 20.0);
        // full support: binomial mean d·y
        let c = expected_root_count_below::<f64>(0, 40, 40, 0.3);
        assert!((c - 12.0).abs() < 1e-10);
    }

    #[test]
    fn full_support_is_all_allowed() {
        let p = seg(0, 2, 2);
        let s = empirical_zero_stats::<f64>(&p, 8, 10, 3).unwrap();
        assert_eq!(s.allowed_fraction, 1.0);
        assert_eq!(s.total_roots, 160);
    }

    #[test]
    fn facet_reduction() {
        let sq = LatticePolytope::lattice_box(&[(0, 1), (0, 1)], 2).unwrap();
        let f = facet_polytope(&sq, 2).unwrap();
        assert_eq!(f.vertices(), &[vec![0], vec![1]]);
        assert!(matches!(facet_polytope(&sq, 0), Err(Error::DegenerateFacet)));
        let s4 = LatticePolytope::simplex(2, 4).unwrap();
        assert_eq!(tentacle_allowed_fraction::<f64>(&s4, 2, 5, 4, 1).unwrap(), 1.0);
    }
}
