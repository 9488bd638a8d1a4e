//! Moment map, the point decay objective and the normal-data solver.
//!
//! For `z ∈ (ℂ*)^m` with log-moduli `ρ` the decay function is
//! `b_P(z) = min_{x ∈ P} b_x(z)` where
//! `b_x(z) = Σ_{j=0}^m x_j log(x_j / p) − 2⟨x, ρ⟩ + p log(1 + ‖z‖²)`
//! and `x_0 = p − Σ x_j`. The objective equals `p · KL(x/p ‖ μ(z))` with the
//! homogeneous moment map `μ_0 = 1/(1+‖z‖²)`, which is the form evaluated here.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope::{rational_to, ConeMembership, LatticePolytope};
use crate::scalar::{dot, from_i64, lit, log_sum_exp, norm, Real};

/// A point of `(ℂ*)^m` in log coordinates `log z_j = ρ_j + iθ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint<T> {
    pub rho: Vec<T>,
    pub theta: Vec<T>,
}

impl<T: Real> TorusPoint<T> {
    pub fn from_rho(rho: Vec<T>) -> Self {
        let theta = vec![T::zero(); rho.len()];
        Self { rho, theta }
    }

    pub fn new(rho: Vec<T>, theta: Vec<T>) -> Self {
        assert_eq!(rho.len(), theta.len());
        Self { rho, theta }
    }

    /// Point with the given moduli `|z_j| > 0` and zero arguments.
    pub fn from_moduli(moduli: &[T]) -> Self {
        Self::from_rho(moduli.iter().map(|r| r.ln()).collect())
    }

    pub fn from_complex(z: &[Complex<T>]) -> Self {
        Self {
            rho: z.iter().map(|w| w.norm().ln()).collect(),
            theta: z.iter().map(|w| w.arg()).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.rho.len()
    }

    pub fn to_complex(&self) -> Vec<Complex<T>> {
        self.rho
            .iter()
            .zip(&self.theta)
            .map(|(&r, &t)| Complex::from_polar(r.exp(), t))
            .collect()
    }

    /// `e^{−σ/2}·z`, the real torus action.
    pub fn flow(&self, sigma: &[T]) -> Self {
        let half: T = lit(0.5);
        Self {
            rho: self
                .rho
                .iter()
                .zip(sigma)
                .map(|(&r, &s)| r - half * s)
                .collect(),
            theta: self.theta.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.iter().chain(&self.theta).all(|x| x.is_finite())
    }
}

/// `log(1 + ‖z‖²)`.
pub fn log_one_plus_norm_sq<T: Real>(z: &TorusPoint<T>) -> T {
    let mut terms = Vec::with_capacity(z.m() + 1);
    terms.push(T::zero());
    terms.extend(z.rho.iter().map(|&r| r + r));
    log_sum_exp(&terms)
}

/// `(log μ_0, log μ_1, …, log μ_m)` with `μ_0 = 1/(1+‖z‖²)`.
pub fn log_moment_map_homogeneous<T: Real>(z: &TorusPoint<T>) -> Vec<T> {
    let l = log_one_plus_norm_sq(z);
    let mut out = Vec::with_capacity(z.m() + 1);
    out.push(-l);
    out.extend(z.rho.iter().map(|&r| r + r - l));
    out
}

/// `μ(z)_j = |z_j|² / (1 + ‖z‖²)`.
pub fn moment_map<T: Real>(z: &TorusPoint<T>) -> Vec<T> {
    log_moment_map_homogeneous(z)[1..]
        .iter()
        .map(|x| x.exp())
        .collect()
}

/// Point of `(ℂ*)^m` with `μ(z) = y` for `y` in the open simplex.
pub fn inverse_moment_map<T: Real>(y: &[T]) -> TorusPoint<T> {
    let y0 = T::one() - y.iter().copied().sum::<T>();
    let half: T = lit(0.5);
    TorusPoint::from_rho(y.iter().map(|&yj| half * (yj / y0).ln()).collect())
}

fn homogeneous<T: Real>(x: &[T], p: T) -> Result<Vec<T>> {
    let x0 = p - x.iter().copied().sum::<T>();
    let slack = T::feasibility_tol() * p.max(T::one());
    if x0 < -slack || x.iter().any(|&v| v < -slack) {
        return Err(Error::PointOutsideSimplex);
    }
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(x0.max(T::zero()));
    out.extend(x.iter().map(|&v| v.max(T::zero())));
    Ok(out)
}

fn objective_homogeneous<T: Real>(xh: &[T], log_mu: &[T], p: T) -> T {
    let lp = p.ln();
    xh.iter()
        .zip(log_mu)
        .map(|(&x, &lm)| if x > T::zero() { x * (x.ln() - lp - lm) } else { T::zero() })
        .sum()
}

/// The point decay objective `b_x(z)`.
pub fn decay_objective<T: Real>(x: &[T], z: &TorusPoint<T>, p: i64) -> Result<T> {
    let pt = from_i64::<T>(p);
    let xh = homogeneous(x, pt)?;
    Ok(objective_homogeneous(&xh, &log_moment_map_homogeneous(z), pt))
}

/// `∇_x b_x(z)`; equals `−τ(x)`. Requires `x` in the open simplex.
pub fn decay_gradient<T: Real>(x: &[T], z: &TorusPoint<T>, p: i64) -> Result<Vec<T>> {
    let xh = homogeneous(x, from_i64(p))?;
    if xh.iter().any(|&v| v <= T::zero()) {
        return Err(Error::PointOutsideSimplex);
    }
    Ok(gradient_homogeneous(&xh, &log_moment_map_homogeneous(z)))
}

fn gradient_homogeneous<T: Real>(xh: &[T], log_mu: &[T]) -> Vec<T> {
    let g0 = xh[0].ln() - log_mu[0];
    (1..xh.len())
        .map(|j| xh[j].ln() - log_mu[j] - g0)
        .collect()
}

/// `∇²_x b_x(z) = diag(1/x_j) + 1/x_0`.
pub fn decay_hessian<T: Real>(x: &[T], p: i64) -> Result<linalg::Matrix<T>> {
    let xh = homogeneous(x, from_i64(p))?;
    if xh.iter().any(|&v| v <= T::zero()) {
        return Err(Error::PointOutsideSimplex);
    }
    let m = x.len();
    let mut h = linalg::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            h[j][k] = T::one() / xh[0] + if j == k { T::one() / xh[j + 1] } else { T::zero() };
        }
    }
    Ok(h)
}

/// `τ(x)_j = log|z_j|² + log x_0 − log x_j` up to the `μ`-normalisation,
/// i.e. `−∇_x b_x(z)`.
pub fn tau_of<T: Real>(x: &[T], z: &TorusPoint<T>, p: i64) -> Result<Vec<T>> {
    Ok(decay_gradient(x, z, p)?.into_iter().map(|g| -g).collect())
}

/// `(q(z), τ_z, b_P(z))` together with the open face containing `q`.
#[derive(Clone, Debug)]
pub struct NormalData<T> {
    pub q: Vec<T>,
    pub tau: Vec<T>,
    pub b: T,
    pub face_id: usize,
    pub face_dim: usize,
    pub transition_flag: bool,
    /// Norm of the tangential gradient at `q`.
    pub residual: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Allowed,
    Forbidden(usize),
    Transition,
}

impl Region {
    pub fn label(&self) -> String {
        match self {
            Region::Allowed => "allowed".to_string(),
            Region::Forbidden(id) => format!("forbidden:{id}"),
            Region::Transition => "transition".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct FaceData<T> {
    id: usize,
    dim: usize,
    center: Vec<T>,
    basis: Vec<Vec<T>>,
    off_facets: Vec<usize>,
    in_simplex_boundary: bool,
}

/// Reusable minimiser of the decay objective over a fixed polytope.
#[derive(Clone, Debug)]
pub struct NormalSolver<'a, T> {
    poly: &'a LatticePolytope,
    p: T,
    faces: Vec<FaceData<T>>,
    hs_normal: Vec<Vec<T>>,
    hs_offset: Vec<T>,
    hs_norm: Vec<T>,
    tol: T,
    max_iter: usize,
}

impl<'a, T: Real> NormalSolver<'a, T> {
    pub fn new(poly: &'a LatticePolytope) -> Result<Self> {
        if poly.in_simplex_boundary() {
            return Err(Error::OnSimplexBoundary);
        }
        let p = poly.degree_bound();
        let faces = poly
            .faces()
            .iter()
            .map(|f| {
                let tangent: Vec<Vec<T>> = f
                    .tangent_basis
                    .iter()
                    .map(|t| t.iter().map(|&r| rational_to(r)).collect())
                    .collect();
                let verts: Vec<&Vec<i64>> = f.vertex_indices.iter().map(|&i| &poly.vertices()[i]).collect();
                let in_boundary = (0..poly.ambient_dim()).any(|j| verts.iter().all(|v| v[j] == 0))
                    || verts.iter().all(|v| v.iter().sum::<i64>() == p);
                FaceData {
                    id: f.id,
                    dim: f.dim,
                    center: f.relative_interior_point.iter().map(|&r| rational_to(r)).collect(),
                    basis: linalg::orthonormal_basis(&tangent),
                    off_facets: (0..poly.halfspaces().len())
                        .filter(|j| f.active_set.binary_search(j).is_err())
                        .collect(),
                    in_simplex_boundary: in_boundary,
                }
            })
            .collect();
        let hs = poly.halfspaces();
        Ok(Self {
            poly,
            p: from_i64(p),
            faces,
            hs_normal: hs
                .iter()
                .map(|h| h.normal.iter().map(|&u| from_i64(u)).collect())
                .collect(),
            hs_offset: hs.iter().map(|h| from_i64(h.offset)).collect(),
            hs_norm: hs.iter().map(|h| h.normal_norm()).collect(),
            tol: T::transition_tol(),
            max_iter: 200,
        })
    }

    /// Overrides the transition band width.
    pub fn with_transition_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn polytope(&self) -> &LatticePolytope {
        self.poly
    }

    fn slack(&self, j: usize, x: &[T]) -> T {
        (dot(&self.hs_normal[j], x) + self.hs_offset[j]) / self.hs_norm[j]
    }

    fn boundary_distance(&self, face: &FaceData<T>, x: &[T]) -> T {
        face.off_facets
            .iter()
            .map(|&j| self.slack(j, x))
            .fold(T::infinity(), |a, b| a.min(b))
    }

    /// Minimises the objective over the affine hull of `face` by damped Newton.
    fn minimise_on_face(&self, face: &FaceData<T>, log_mu: &[T]) -> Result<(Vec<T>, T, T)> {
        let p = self.p;
        let m = face.center.len();
        let mut x = face.center.clone();
        let hom = |x: &[T]| {
            let mut h = Vec::with_capacity(m + 1);
            h.push(p - x.iter().copied().sum::<T>());
            h.extend_from_slice(x);
            h
        };
        let mut xh = hom(&x);
        let mut f = objective_homogeneous(&xh, log_mu, p);
        if face.dim == 0 {
            return Ok((x, f, T::zero()));
        }
        let r = face.dim;
        let tol2 = T::newton_tol() * T::newton_tol();
        let eps8 = T::epsilon() * lit(8.0);
        let mut lambda2 = T::infinity();
        let mut gy = vec![T::zero(); r];
        for _ in 0..self.max_iter {
            let g = gradient_homogeneous(&xh, log_mu);
            gy = face.basis.iter().map(|b| dot(b, &g)).collect();
            let col_sums: Vec<T> = face.basis.iter().map(|b| b.iter().copied().sum()).collect();
            let mut h = linalg::zeros(r, r);
            for a in 0..r {
                for c in a..r {
                    let mut s = col_sums[a] * col_sums[c] / xh[0];
                    for j in 0..m {
                        s = s + face.basis[a][j] * face.basis[c][j] / xh[j + 1];
                    }
                    h[a][c] = s;
                    h[c][a] = s;
                }
            }
            let neg: Vec<T> = gy.iter().map(|&v| -v).collect();
            let dy = linalg::solve(&h, &neg).ok_or(Error::NonConvergence {
                residual: norm(&gy).to_f64().unwrap_or(f64::NAN),
            })?;
            lambda2 = -dot(&gy, &dy);
            if lambda2 <= tol2 {
                break;
            }
            let dx: Vec<T> = (0..m)
                .map(|j| (0..r).map(|a| dy[a] * face.basis[a][j]).sum())
                .collect();
            let dx0 = -dx.iter().copied().sum::<T>();
            let mut amax = T::infinity();
            for (&xv, &dv) in xh.iter().zip(std::iter::once(&dx0).chain(&dx)) {
                if dv < T::zero() {
                    amax = amax.min(-xv / dv);
                }
            }
            let mut alpha = T::one().min(amax * lit(0.99));
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<T> = x.iter().zip(&dx).map(|(&a, &d)| a + alpha * d).collect();
                let th = hom(&trial);
                if th.iter().all(|&v| v > T::zero()) {
                    let ft = objective_homogeneous(&th, log_mu, p);
                    if ft <= f - lit::<T>(1e-4) * alpha * lambda2 + eps8 * (T::one() + f.abs()) {
                        x = trial;
                        xh = th;
                        f = ft;
                        accepted = true;
                        break;
                    }
                }
                alpha = alpha * lit(0.5);
            }
            if !accepted {
                break;
            }
        }
        if lambda2 > T::epsilon().powf(lit(0.75)) * (T::one() + f.abs()) {
            return Err(Error::NonConvergence {
                residual: norm(&gy).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok((x, f, norm(&gy)))
    }

    fn finish(&self, log_mu: &[T], face: &FaceData<T>, q: Vec<T>, b: T, residual: T, allowed: bool) -> NormalData<T> {
        let tau: Vec<T> = if allowed {
            vec![T::zero(); q.len()]
        } else {
            let qh = {
                let mut h = vec![self.p - q.iter().copied().sum::<T>()];
                h.extend_from_slice(&q);
                h
            };
            gradient_homogeneous(&qh, log_mu).into_iter().map(|g| -g).collect()
        };
        let band = self.tol * norm(&tau).max(T::one());
        let cone = self.poly.normal_cone_contains(face.id, &tau, band);
        let near_edge = face.dim > 0 && self.boundary_distance(face, &q) < self.tol * self.p.max(T::one());
        NormalData {
            q,
            tau,
            b: if allowed { T::zero() } else { b.max(T::zero()) },
            face_id: face.id,
            face_dim: face.dim,
            transition_flag: cone != ConeMembership::Interior || near_edge,
            residual,
        }
    }

    /// Solves for `(q(z), τ_z, b_P(z))`.
    pub fn solve(&self, z: &TorusPoint<T>) -> Result<NormalData<T>> {
        if z.m() != self.poly.ambient_dim() || !z.is_finite() {
            return Err(Error::InvalidArgument("torus point has wrong dimension or is not finite".into()));
        }
        let log_mu = log_moment_map_homogeneous(z);
        let top = self.faces.last().unwrap();
        if self.poly.is_full_dimensional() {
            let pmu: Vec<T> = log_mu[1..].iter().map(|&l| self.p * l.exp()).collect();
            if self.boundary_distance(top, &pmu) > T::zero() {
                return Ok(self.finish(&log_mu, top, pmu, T::zero(), T::zero(), true));
            }
        }
        let feas = T::feasibility_tol() * self.p.max(T::one());
        let tie = T::epsilon() * lit(4.0);
        let mut best: Option<(&FaceData<T>, Vec<T>, T, T)> = None;
        for face in &self.faces {
            if face.in_simplex_boundary {
                continue;
            }
            let (x, f, res) = self.minimise_on_face(face, &log_mu)?;
            if self.boundary_distance(face, &x) < -feas {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bf, _, fb, _)) => {
                    let gap = tie * (T::one() + fb.abs());
                    f < *fb - gap || (f <= *fb + gap && face.dim < bf.dim)
                }
            };
            if better {
                best = Some((face, x, f, res));
            }
        }
        let (face, q, f, res) = best.ok_or(Error::NonConvergence { residual: f64::NAN })?;
        let allowed = face.id == top.id && self.poly.is_full_dimensional();
        Ok(self.finish(&log_mu, face, q, f, res, allowed))
    }

    pub fn classify(&self, z: &TorusPoint<T>) -> Result<Region> {
        Ok(self.region_of(&self.solve(z)?))
    }

    pub fn region_of(&self, nd: &NormalData<T>) -> Region {
        region_from(self.poly, nd)
    }
}

fn region_from<T>(poly: &LatticePolytope, nd: &NormalData<T>) -> Region {
    if nd.transition_flag {
        Region::Transition
    } else if nd.face_id == poly.top_face().id && poly.is_full_dimensional() {
        Region::Allowed
    } else {
        Region::Forbidden(nd.face_id)
    }
}

pub fn solve_normal_data<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>) -> Result<NormalData<T>> {
    NormalSolver::new(poly)?.solve(z)
}

pub fn classify_region<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>) -> Result<Region> {
    NormalSolver::new(poly)?.classify(z)
}

/// `d_ρ b_P = 2(pμ − q)` evaluated from solved normal data.
pub fn b_gradient_rho<T: Real>(nd: &NormalData<T>, z: &TorusPoint<T>, p: i64) -> Vec<T> {
    let two: T = lit(2.0);
    let pt = from_i64::<T>(p);
    moment_map(z)
        .iter()
        .zip(&nd.q)
        .map(|(&mu, &q)| two * (pt * mu - q))
        .collect()
}

/// `∫_0^{τ_z} [pμ(e^{−σ/2}·z) − q(e^{−σ/2}·z)]·dσ` along `σ = tτ_z` by
/// composite Simpson with `steps` panels.
pub fn b_action_integral<T: Real>(poly: &LatticePolytope, z: &TorusPoint<T>, steps: usize) -> Result<T> {
    if steps < 16 {
        return Err(Error::InvalidArgument(format!("steps = {steps} < 16")));
    }
    let steps = steps + steps % 2;
    let solver = NormalSolver::new(poly)?;
    let nd = solver.solve(z)?;
    if nd.tau.iter().all(|&t| t == T::zero()) {
        return Ok(T::zero());
    }
    let p = from_i64::<T>(poly.degree_bound());
    let integrand = |t: T| -> Result<T> {
        let sigma: Vec<T> = nd.tau.iter().map(|&x| x * t).collect();
        let w = z.flow(&sigma);
        let nw = solver.solve(&w)?;
        let mu = moment_map(&w);
        Ok((0..mu.len())
            .map(|j| (p * mu[j] - nw.q[j]) * nd.tau[j])
            .sum())
    };
    let h = T::one() / from_i64::<T>(steps as i64);
    let mut acc = integrand(T::zero())? + integrand(T::one())?;
    for k in 1..steps {
        let w = if k % 2 == 1 { lit::<T>(4.0) } else { lit::<T>(2.0) };
        acc = acc + w * integrand(h * from_i64::<T>(k as i64))?;
    }
    Ok(acc * h / lit(3.0))
}
