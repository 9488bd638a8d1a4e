//! The limit zero current `ψ_P` as a pointwise coefficient matrix.
//!
//! `u_∞(ρ) = p log(1 + Σ e^{2ρ_j}) − b_P(ρ)` and
//! `M_jk = (1/8π) ∂²u_∞/∂ρ_j∂ρ_k`, obtained by central second differences
//! with one Richardson step.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::momentmap::{inverse_moment_map, log_one_plus_norm_sq, moment_map, NormalSolver, Region, TorusPoint};
use crate::polytope::{LatticePolytope, Rational};
use crate::scalar::{from_i64, lit, Real};

pub mod oracle;

#[derive(Clone, Debug)]
pub struct PsiDensity<T> {
    pub point: TorusPoint<T>,
    pub matrix: Matrix<T>,
    /// Ascending.
    pub eigenvalues: Vec<T>,
    pub rank: usize,
    pub region: Region,
}

impl<T: Real> PsiDensity<T> {
    pub fn trace(&self) -> T {
        (0..self.matrix.len()).map(|i| self.matrix[i][i]).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PsiOptions<T> {
    /// Finite-difference step in `ρ`.
    pub step: T,
    /// Eigenvalues above this multiple of the reference scale count towards the rank.
    pub rank_threshold: T,
}

impl<T: Real> Default for PsiOptions<T> {
    fn default() -> Self {
        Self {
            step: lit(1e-3),
            rank_threshold: lit(1e-4),
        }
    }
}

/// Coefficient matrix of `p·ω_FS` in `ρ`: `(p/2π)(diag μ − μμᵀ)`.
pub fn fubini_study_matrix<T: Real>(z: &TorusPoint<T>, p: i64) -> Matrix<T> {
    let mu = moment_map(z);
    let c = from_i64::<T>(p) / (T::PI() + T::PI());
    let m = mu.len();
    let mut out = linalg::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            let d = if j == k { mu[j] } else { T::zero() };
            out[j][k] = c * (d - mu[j] * mu[k]);
        }
    }
    out
}

fn largest_eigenvalue<T: Real>(a: &Matrix<T>) -> T {
    linalg::symmetric_eigenvalues(a)
        .last()
        .copied()
        .unwrap_or(T::zero())
}

/// Rank with threshold relative to the Fubini–Study reference at `z`.
pub fn rank_of<T: Real>(eigenvalues: &[T], reference: &Matrix<T>, threshold: T) -> usize {
    let top = eigenvalues.last().copied().unwrap_or(T::zero());
    let scale = largest_eigenvalue(reference).max(top);
    eigenvalues.iter().filter(|&&e| e > threshold * scale).count()
}

/// Evaluates `u_∞` and the face label at a point.
fn u_inf_labelled<T: Real>(solver: &NormalSolver<'_, T>, rho: &[T]) -> Result<(T, usize, bool)> {
    let z = TorusPoint::from_rho(rho.to_vec());
    let nd = solver.solve(&z)?;
    let p = from_i64::<T>(solver.polytope().degree_bound());
    Ok((p * log_one_plus_norm_sq(&z) - nd.b, nd.face_id, nd.transition_flag))
}

fn fd_hessian<T: Real>(solver: &NormalSolver<'_, T>, rho: &[T], h: T, face: usize) -> Result<Option<Matrix<T>>> {
    let m = rho.len();
    let mut cache: HashMap<Vec<i8>, T> = HashMap::new();
    let mut eval = |offs: Vec<i8>| -> Result<Option<T>> {
        if let Some(&v) = cache.get(&offs) {
            return Ok(Some(v));
        }
        let pt: Vec<T> = rho
            .iter()
            .zip(&offs)
            .map(|(&r, &o)| r + h * from_i64::<T>(o as i64))
            .collect();
        let (u, f, t) = u_inf_labelled(solver, &pt)?;
        if f != face || t {
            return Ok(None);
        }
        cache.insert(offs, u);
        Ok(Some(u))
    };
    let unit = |j: usize, s: i8| {
        let mut o = vec![0i8; m];
        o[j] = s;
        o
    };
    let Some(u0) = eval(vec![0; m])? else { return Ok(None) };
    let mut hess = linalg::zeros(m, m);
    let h2 = h * h;
    for j in 0..m {
        let (Some(up), Some(um)) = (eval(unit(j, 1))?, eval(unit(j, -1))?) else {
            return Ok(None);
        };
        hess[j][j] = (up - u0 - u0 + um) / h2;
        for k in j + 1..m {
            let mut vals = [T::zero(); 4];
            for (idx, (sj, sk)) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)].into_iter().enumerate() {
                let mut o = vec![0i8; m];
                o[j] = sj;
                o[k] = sk;
                let Some(v) = eval(o)? else { return Ok(None) };
                vals[idx] = v;
            }
            let v = (vals[0] - vals[1] - vals[2] + vals[3]) / (h2 * lit(4.0));
            hess[j][k] = v;
            hess[k][j] = v;
        }
    }
    Ok(Some(hess))
}

/// `ψ_P` at `z` with default options.
pub fn psi_density<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>, step: T) -> Result<PsiDensity<T>> {
    let solver = NormalSolver::new(poly)?;
    psi_density_with(
        &solver,
        z,
        PsiOptions {
            step,
            ..PsiOptions::default()
        },
    )
}

/// `ψ_P` at `z`; stencils whose points leave the face of `q(z)` are shrunk
/// by a factor 4 up to three times and then rejected.
pub fn psi_density_with<T: Real>(solver: &NormalSolver<'_, T>, z: &TorusPoint<T>, opts: PsiOptions<T>) -> Result<PsiDensity<T>> {
    let poly = solver.polytope();
    let nd = solver.solve(z)?;
    if nd.transition_flag {
        return Err(Error::TransitionPoint);
    }
    let region = solver.region_of(&nd);
    let mut h = opts.step;
    let mut result = None;
    for _ in 0..4 {
        let coarse = fd_hessian(solver, &z.rho, h, nd.face_id)?;
        let fine = fd_hessian(solver, &z.rho, h * lit(0.5), nd.face_id)?;
        if let (Some(c), Some(f)) = (coarse, fine) {
            result = Some((c, f));
            break;
        }
        h = h * lit(0.25);
    }
    let (coarse, fine) = result.ok_or(Error::StencilStraddles)?;
    let m = z.m();
    let scale = T::one() / (T::PI() * lit(8.0));
    let mut matrix = linalg::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            let rj = (fine[j][k] * lit(4.0) - coarse[j][k]) / lit(3.0);
            let rk = (fine[k][j] * lit(4.0) - coarse[k][j]) / lit(3.0);
            matrix[j][k] = scale * (rj + rk) * lit(0.5);
        }
    }
    let eigenvalues = linalg::symmetric_eigenvalues(&matrix);
    let reference = fubini_study_matrix(z, poly.degree_bound());
    let rank = rank_of(&eigenvalues, &reference, opts.rank_threshold);
    Ok(PsiDensity {
        point: z.clone(),
        matrix,
        eigenvalues,
        rank,
        region,
    })
}

pub fn psi_rank<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>) -> Result<usize> {
    Ok(psi_density(poly, z, lit(1e-3))?.rank)
}

/// `max_v |vᵀ M v| / tr M` over an orthonormal basis of the span of the
/// normal cone of the face of `q(z)`. When `ψ_P` vanishes identically the
/// trace of the Fubini–Study reference is used instead.
pub fn normal_flow_residual<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>) -> Result<T> {
    let solver = NormalSolver::new(poly)?;
    normal_flow_residual_with(&solver, z, PsiOptions::default())
}

pub fn normal_flow_residual_with<T: Real>(solver: &NormalSolver<'_, T>, z: &TorusPoint<T>, opts: PsiOptions<T>) -> Result<T> {
    let psi = psi_density_with(solver, z, opts)?;
    let face_id = match psi.region {
        Region::Allowed => return Err(Error::AllowedRegion),
        Region::Forbidden(id) => id,
        Region::Transition => return Err(Error::TransitionPoint),
    };
    let poly = solver.polytope();
    let face = poly.face(face_id);
    if face.dim == poly.ambient_dim() {
        return Err(Error::AllowedRegion);
    }
    let gens: Vec<Vec<T>> = face
        .normal_cone_generators
        .iter()
        .map(|g| g.iter().map(|&x| from_i64::<T>(x)).collect())
        .collect();
    let basis = linalg::orthonormal_basis(&gens);
    let reference = fubini_study_matrix(z, poly.degree_bound());
    let ref_trace: T = (0..reference.len()).map(|i| reference[i][i]).sum();
    let trace = psi.trace();
    let denom = if psi.rank == 0 { ref_trace } else { trace };
    let worst = basis
        .iter()
        .map(|v| crate::scalar::dot(v, &linalg::mat_vec(&psi.matrix, v)).abs())
        .fold(T::zero(), |a, b| a.max(b));
    Ok(worst / denom)
}

/// Outcome of the Bernstein–Kouchnirenko volume check.
#[derive(Clone, Debug)]
pub struct BkVolume<T> {
    pub numeric: T,
    /// `m! · Vol(P)`.
    pub exact: Rational,
    pub solves: usize,
}

impl<T: Real> BkVolume<T> {
    pub fn relative_error(&self) -> T {
        let e = crate::polytope::rational_to::<T>(self.exact);
        (self.numeric - e).abs() / e
    }
}

fn factorial(m: usize) -> i64 {
    (1..=m as i64).product()
}

/// Total mass of `ψ_P^m`, computed as `m!` times the volume swept by the
/// map `y ↦ q(μ^{−1}(y))` on a Kuhn triangulation of the simplex at
/// resolution `res`.
pub fn bk_volume_check<T: Real>(poly: &LatticePolytope, res: usize) -> Result<BkVolume<T>> {
    if !poly.is_full_dimensional() {
        return Err(Error::NotFullDimensional {
            dim: poly.dim(),
            ambient: poly.ambient_dim(),
        });
    }
    if res < 1 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let m = poly.ambient_dim();
    let solver = NormalSolver::<T>::new(poly)?;
    // ordered grid t: 0 ≤ k_1 ≤ … ≤ k_m ≤ res
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    let mut cur = vec![0usize; m];
    fn rec(j: usize, lo: usize, res: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in lo..=res {
            cur[j] = k;
            rec(j + 1, k, res, cur, out);
        }
    }
    rec(0, 0, res, &mut cur, &mut nodes);
    let eps: T = lit(1e-7);
    let bary = T::one() / from_i64::<T>(m as i64 + 1);
    let rf = from_i64::<T>(res as i64);
    let to_y = |k: &[usize]| -> Vec<T> {
        let t: Vec<T> = k.iter().map(|&x| from_i64::<T>(x as i64) / rf).collect();
        (0..m)
            .map(|j| {
                let y = if j == 0 { t[0] } else { t[j] - t[j - 1] };
                (T::one() - eps) * y + eps * bary
            })
            .collect()
    };
    let images: Vec<Result<Vec<T>>> = nodes
        .par_iter()
        .map(|k| Ok(solver.solve(&inverse_moment_map(&to_y(k)))?.q))
        .collect();
    let mut q_of: HashMap<Vec<usize>, Vec<T>> = HashMap::with_capacity(nodes.len());
    for (k, q) in nodes.iter().zip(images) {
        q_of.insert(k.clone(), q?);
    }
    let perms = permutations(m);
    let mut total = T::zero();
    let mut cell = vec![0usize; m];
    loop {
        for perm in &perms {
            let mut verts = vec![cell.clone()];
            let mut v = cell.clone();
            for &d in perm {
                v[d] += 1;
                verts.push(v.clone());
            }
            if !verts.iter().all(|k| k.windows(2).all(|w| w[0] <= w[1])) {
                continue;
            }
            let ys: Vec<Vec<T>> = verts.iter().map(|k| to_y(k)).collect();
            let qs: Vec<&Vec<T>> = verts.iter().map(|k| &q_of[k]).collect();
            let dy = simplex_det(&ys.iter().collect::<Vec<_>>());
            let dq = simplex_det(&qs);
            total = total + if dy < T::zero() { -dq } else { dq };
        }
        let mut j = 0;
        while j < m {
            cell[j] += 1;
            if cell[j] < res {
                break;
            }
            cell[j] = 0;
            j += 1;
        }
        if j == m {
            break;
        }
    }
    Ok(BkVolume {
        numeric: total,
        exact: poly.volume() * factorial(m),
        solves: nodes.len(),
    })
}

fn simplex_det<T: Real>(pts: &[&Vec<T>]) -> T {
    let m = pts[0].len();
    let rows: Matrix<T> = (1..=m)
        .map(|i| (0..m).map(|j| pts[i][j] - pts[0][j]).collect())
        .collect();
    linalg::determinant(&rows)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(m - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, m - 1);
            out.push(p);
        }
    }
    out
}

/// Fubini–Study volume of `μ^{−1}(Ω)` for the box `Ω = ∏[lo_j, hi_j] ⊂ Σ`,
/// by a midpoint rule in `ρ` with density `det(∂μ/∂ρ)`; returns the
/// numeric value and `Vol(Ω)`.
pub fn fs_preimage_volume<T: Real>(bounds: &[(T, T)], steps: usize) -> Result<(T, T)> {
    let m = bounds.len();
    let lo_sum: T = bounds.iter().map(|b| b.0).sum();
    let hi_sum: T = bounds.iter().map(|b| b.1).sum();
    if bounds.iter().any(|b| b.0 <= T::zero() || b.1 <= b.0) || hi_sum >= T::one() {
        return Err(Error::InvalidArgument("box must lie in the open simplex".into()));
    }
    let half: T = lit(0.5);
    let rho_box: Vec<(T, T)> = bounds
        .iter()
        .map(|&(a, b)| (half * (a / (T::one() - lo_sum)).ln(), half * (b / (T::one() - hi_sum)).ln()))
        .collect();
    let widths: Vec<T> = rho_box
        .iter()
        .map(|&(a, b)| (b - a) / from_i64::<T>(steps as i64))
        .collect();
    let cell: T = widths.iter().copied().fold(T::one(), |a, b| a * b);
    let total_cells = steps.pow(m as u32);
    let cells: Vec<T> = (0..total_cells)
        .into_par_iter()
        .map(|idx| {
            let mut r = idx;
            let rho: Vec<T> = (0..m)
                .map(|j| {
                    let i = r % steps;
                    r /= steps;
                    rho_box[j].0 + widths[j] * (from_i64::<T>(i as i64) + half)
                })
                .collect();
            let z = TorusPoint::from_rho(rho);
            let mu = moment_map(&z);
            if mu.iter().zip(bounds).all(|(&x, &(a, b))| x >= a && x <= b) {
                let jac: Matrix<T> = (0..m)
                    .map(|j| {
                        (0..m)
                            .map(|k| {
                                let d = if j == k { mu[j] } else { T::zero() };
                                (d - mu[j] * mu[k]) * lit(2.0)
                            })
                            .collect()
                    })
                    .collect();
                linalg::determinant(&jac) * cell
            } else {
                T::zero()
            }
        })
        .collect();
    let numeric: T = cells.into_iter().sum();
    let exact = bounds.iter().fold(T::one(), |acc, &(a, b)| acc * (b - a));
    Ok((numeric, exact))
}
