//! Diagonal of the conditional Szegő kernel `Π_{|NP}(z, z)` and the
//! potentials `u_N`, `u_∞`.
//!
//! Everything is accumulated in log space:
//! `log Π = Σ_{j=1}^m log(Np + j) + LSE_α [log binom(Np; α) + Σ_{j=0}^m α_j log μ_j]`
//! with `α_0 = Np − |α|`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::momentmap::{log_moment_map_homogeneous, log_one_plus_norm_sq, NormalSolver, TorusPoint};
use crate::polytope::LatticePolytope;
use crate::scalar::{from_i64, ln_factorial, LogSumExp, Real};

/// Upper bound on `#(NpΣ ∩ ℤ^m)` accepted by the enumerating routines.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// One evaluation of the kernel diagonal at `(N, z)`.
#[derive(Clone, Debug)]
pub struct SzegoEval<T> {
    pub n: i64,
    pub log_pi: T,
    pub log_count: T,
    /// `Σ_{j=1}^m log(Np + j)`.
    pub log_prefactor: T,
    /// `(1/N) log Σ_{α∈NP} binom(Np; α) |z|^{2α}`.
    pub u_n: T,
    /// `p log(1 + ‖z‖²) − b_P(z)`, or NaN if not requested.
    pub u_inf: T,
}

impl<T: Real> SzegoEval<T> {
    pub fn mass(&self) -> T {
        (self.log_pi - self.log_count).exp()
    }

    pub fn residual(&self) -> T {
        (self.u_n - self.u_inf).abs()
    }

    /// `(1/N) log Π + p log(1 + ‖z‖²)`, i.e. `u_N` with the dimension
    /// prefactor left in.
    pub fn u_n_with_prefactor(&self) -> T {
        self.u_n + self.log_prefactor / from_i64(self.n)
    }
}

/// `binom(Np + m, m)`, the number of lattice points of `NpΣ`.
pub fn simplex_point_count(m: usize, np: i64) -> u128 {
    let mut c: u128 = 1;
    for j in 1..=m as u128 {
        c = c * (np as u128 + j) / j;
    }
    c
}

pub fn check_guard(poly: &LatticePolytope, n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("N = {n} < 1")));
    }
    let count = simplex_point_count(poly.ambient_dim(), n * poly.degree_bound());
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Lattice points of `NP` with their log multinomial weights, reusable
/// across many evaluation points.
#[derive(Clone, Debug)]
pub struct SzegoKernel<T> {
    n: i64,
    np: i64,
    points: Vec<Vec<i64>>,
    ln_weight: Vec<T>,
    log_count: T,
    log_prefactor: T,
}

impl<T: Real> SzegoKernel<T> {
    pub fn new(poly: &LatticePolytope, n: i64) -> Result<Self> {
        check_guard(poly, n)?;
        let np = n * poly.degree_bound();
        let m = poly.ambient_dim();
        let table: Vec<T> = (0..=np).map(ln_factorial::<T>).collect();
        let points = poly.lattice_points(n);
        let ln_weight = points
            .iter()
            .map(|a| {
                let rest = np - a.iter().sum::<i64>();
                a.iter()
                    .fold(table[np as usize] - table[rest as usize], |acc, &k| acc - table[k as usize])
            })
            .collect();
        let log_prefactor = (1..=m as i64).map(|j| from_i64::<T>(np + j).ln()).sum();
        Ok(Self {
            n,
            np,
            log_count: from_i64::<T>(points.len() as i64).ln(),
            points,
            ln_weight,
            log_prefactor,
        })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn log_count(&self) -> T {
        self.log_count
    }

    /// `log Σ_α binom(Np; α) μ^α μ_0^{Np−|α|}`.
    fn log_sum(&self, z: &TorusPoint<T>) -> T {
        let lm = log_moment_map_homogeneous(z);
        let mut acc = LogSumExp::default();
        for (a, &w) in self.points.iter().zip(&self.ln_weight) {
            let rest = self.np - a.iter().sum::<i64>();
            let mut t = w + from_i64::<T>(rest) * lm[0];
            for (&k, &l) in a.iter().zip(&lm[1..]) {
                t = t + from_i64::<T>(k) * l;
            }
            acc.push(t);
        }
        acc.value()
    }

    pub fn log_pi(&self, z: &TorusPoint<T>) -> T {
        self.log_prefactor + self.log_sum(z)
    }

    pub fn mass_density(&self, z: &TorusPoint<T>) -> T {
        (self.log_pi(z) - self.log_count).exp()
    }

    /// Evaluation without the limit potential.
    pub fn eval(&self, z: &TorusPoint<T>) -> SzegoEval<T> {
        let s = self.log_sum(z);
        let nt = from_i64::<T>(self.n);
        let p = from_i64::<T>(self.np) / nt;
        SzegoEval {
            n: self.n,
            log_pi: self.log_prefactor + s,
            log_count: self.log_count,
            log_prefactor: self.log_prefactor,
            u_n: s / nt + p * log_one_plus_norm_sq(z),
            u_inf: T::nan(),
        }
    }

    /// Parallel evaluation of `log Π` over many points, in input order.
    pub fn log_pi_grid(&self, zs: &[TorusPoint<T>]) -> Vec<T> {
        zs.par_iter().map(|z| self.log_pi(z)).collect()
    }
}

pub fn log_szego_diag<T: Real>(poly: &LatticePolytope, n: i64, z: &TorusPoint<T>) -> Result<T> {
    Ok(SzegoKernel::new(poly, n)?.log_pi(z))
}

/// `E|f(z)|²_FS = Π_{|NP}(z,z) / #(NP)`.
pub fn mass_density<T: Real>(poly: &LatticePolytope, n: i64, z: &TorusPoint<T>) -> Result<T> {
    Ok(SzegoKernel::new(poly, n)?.mass_density(z))
}

/// `u_∞(z) = p log(1 + ‖z‖²) − b_P(z)`.
pub fn u_infinity<T: Real>(solver: &NormalSolver<'_, T>, z: &TorusPoint<T>) -> Result<T> {
    let p = from_i64::<T>(solver.polytope().degree_bound());
    Ok(p * log_one_plus_norm_sq(z) - solver.solve(z)?.b)
}

/// `SzegoEval` at every `N` in `ns`, each carrying `u_∞` from the solver.
pub fn convergence_profile<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>, ns: &[i64]) -> Result<Vec<SzegoEval<T>>> {
    let solver = NormalSolver::new(poly)?;
    let u_inf = u_infinity(&solver, z)?;
    ns.iter()
        .map(|&n| {
            let mut e = SzegoKernel::new(poly, n)?.eval(z);
            e.u_inf = u_inf;
            Ok(e)
        })
        .collect()
}
