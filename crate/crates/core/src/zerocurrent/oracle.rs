//! Closed forms for the three worked examples: the unit square in `2Σ`,
//! the trapezoid `(0,0),(2,0),(0,1),(1,1)` in `2Σ`, and the family
//! `(0,0),(n+1,0),(0,1),(1,1)` in `(n+1)Σ`.
//!
//! Notation: `s_j = |z_j|² = e^{2ρ_j}`, `a = s_1/(1+s_1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fubini_study_matrix, rank_of, PsiDensity};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::momentmap::{decay_objective, log_one_plus_norm_sq, Region, TorusPoint};
use crate::polytope::LatticePolytope;
use crate::scalar::{from_i64, lit, log_sum_exp, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleId {
    Square,
    TrapezoidEx2,
    /// Requires `n ≥ 2`.
    TrapezoidEx3(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleRegion {
    Allowed,
    /// Flow-out of the top edge `{x_2 = 1}`.
    TopEdge,
    /// Flow-out of the right edge `{x_1 = 1}` of the square.
    RightEdge,
    /// Flow-out of the edge joining `(n+1, 0)` and `(1, 1)`.
    SlantedEdge,
    /// Flow-out of the vertex `(1, 1)`.
    Vertex,
}

impl OracleRegion {
    pub fn rank(self) -> usize {
        match self {
            OracleRegion::Allowed => 2,
            OracleRegion::Vertex => 0,
            _ => 1,
        }
    }
}

impl ExampleId {
    pub fn degree(self) -> i64 {
        match self {
            ExampleId::Square | ExampleId::TrapezoidEx2 => 2,
            ExampleId::TrapezoidEx3(n) => n as i64 + 1,
        }
    }

    pub fn polytope(self) -> Result<LatticePolytope> {
        let verts = match self {
            ExampleId::Square => vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
            ExampleId::TrapezoidEx2 => vec![vec![0, 0], vec![2, 0], vec![0, 1], vec![1, 1]],
            ExampleId::TrapezoidEx3(n) => {
                if n < 2 {
                    return Err(Error::InvalidArgument(format!("n = {n} < 2")));
                }
                vec![vec![0, 0], vec![n as i64 + 1, 0], vec![0, 1], vec![1, 1]]
            }
        };
        LatticePolytope::from_vertices(&verts, self.degree())
    }

    pub fn regions(self) -> Vec<OracleRegion> {
        use OracleRegion::*;
        match self {
            ExampleId::Square => vec![Allowed, TopEdge, RightEdge],
            ExampleId::TrapezoidEx2 => vec![Allowed, TopEdge],
            ExampleId::TrapezoidEx3(_) => vec![Allowed, TopEdge, SlantedEdge, Vertex],
        }
    }

    /// Vertices of the closed face whose flow-out is `region`.
    pub fn face_vertices(self, region: OracleRegion) -> Option<Vec<Vec<i64>>> {
        match (self, region) {
            (_, OracleRegion::Allowed) => None,
            (_, OracleRegion::TopEdge) => Some(vec![vec![0, 1], vec![1, 1]]),
            (ExampleId::Square, OracleRegion::RightEdge) => Some(vec![vec![1, 0], vec![1, 1]]),
            (ExampleId::TrapezoidEx3(n), OracleRegion::SlantedEdge) => Some(vec![vec![n as i64 + 1, 0], vec![1, 1]]),
            (ExampleId::TrapezoidEx3(_), OracleRegion::Vertex) => Some(vec![vec![1, 1]]),
            _ => None,
        }
    }

    /// The example whose polytope has the same vertex set and degree as `poly`.
    pub fn identify(poly: &LatticePolytope) -> Option<ExampleId> {
        let mut vs = poly.vertices().to_vec();
        vs.sort();
        let n = poly.degree_bound().checked_sub(1).filter(|&n| n >= 2).map(|n| n as u32);
        let candidates = [Some(ExampleId::Square), Some(ExampleId::TrapezoidEx2), n.map(ExampleId::TrapezoidEx3)];
        candidates.into_iter().flatten().find(|ex| {
            ex.polytope().is_ok_and(|q| {
                let mut ws = q.vertices().to_vec();
                ws.sort();
                q.degree_bound() == poly.degree_bound() && ws == vs
            })
        })
    }

    /// The solver's label for `region` on [`Self::polytope`].
    pub fn expected_label(self, poly: &LatticePolytope, region: OracleRegion) -> Region {
        match self.face_vertices(region) {
            None => Region::Allowed,
            Some(mut vs) => {
                vs.sort();
                let face = poly
                    .faces()
                    .iter()
                    .find(|f| {
                        let mut fv: Vec<Vec<i64>> = f.vertex_indices.iter().map(|&i| poly.vertices()[i].clone()).collect();
                        fv.sort();
                        fv == vs
                    })
                    .expect("face present");
                Region::Forbidden(face.id)
            }
        }
    }

    /// Region of `z` from the printed inequalities; points on a region
    /// boundary are rejected.
    pub fn region<T: Real>(self, z: &TorusPoint<T>) -> Result<OracleRegion> {
        if z.m() != 2 {
            return Err(Error::InvalidArgument("examples live in dimension 2".into()));
        }
        let two: T = lit(2.0);
        let s1 = (two * z.rho[0]).exp();
        let s2 = (two * z.rho[1]).exp();
        let one = T::one();
        let out = Err(Error::OutsideOracleRegion);
        match self {
            ExampleId::Square => {
                if s2 > s1 - one && s2 < s1 + one {
                    Ok(OracleRegion::Allowed)
                } else if s2 > s1 + one {
                    Ok(OracleRegion::TopEdge)
                } else if s2 < s1 - one {
                    Ok(OracleRegion::RightEdge)
                } else {
                    out
                }
            }
            ExampleId::TrapezoidEx2 => {
                if s2 < s1 + one {
                    Ok(OracleRegion::Allowed)
                } else if s2 > s1 + one {
                    Ok(OracleRegion::TopEdge)
                } else {
                    out
                }
            }
            ExampleId::TrapezoidEx3(n) => {
                let nt = from_i64::<T>(n as i64);
                let nm1 = nt - one;
                let knee = one / nm1;
                let curve = nm1.powf(nm1) * s1.powf(nt);
                if s2 < ((s1 + one) / nt).min(knee) {
                    Ok(OracleRegion::Allowed)
                } else if s2 > (s1 + one) / nt && s1 < knee {
                    Ok(OracleRegion::TopEdge)
                } else if s2 > knee && s2 < curve && s1 > knee {
                    Ok(OracleRegion::SlantedEdge)
                } else if s2 > curve && s1 > knee {
                    Ok(OracleRegion::Vertex)
                } else {
                    out
                }
            }
        }
    }

    /// `b_P(z)` from the closed forms.
    pub fn b<T: Real>(self, z: &TorusPoint<T>) -> Result<T> {
        let region = self.region(z)?;
        let two: T = lit(2.0);
        let l = log_one_plus_norm_sq(z);
        let ln1p = |r: T| log_sum_exp(&[T::zero(), two * r]);
        // e^{−b} = C s2 (1+s1)^n / (1+‖z‖²)^{n+1} on the top-edge region
        let top_edge = |n: T| -> T {
            let c = (n + T::one()) * (n + T::one()).ln() - n * n.ln();
            -(c + two * z.rho[1] + n * ln1p(z.rho[0]) - (n + T::one()) * l)
        };
        match (self, region) {
            (_, OracleRegion::Allowed) => Ok(T::zero()),
            (ExampleId::Square | ExampleId::TrapezoidEx2, OracleRegion::TopEdge) => Ok(top_edge(T::one())),
            (ExampleId::Square, OracleRegion::RightEdge) => {
                let swapped = TorusPoint::from_rho(vec![z.rho[1], z.rho[0]]);
                let l = log_one_plus_norm_sq(&swapped);
                Ok(-(lit::<T>(4.0f64.ln()) + two * swapped.rho[1] + ln1p(swapped.rho[0]) - two * l))
            }
            (ExampleId::TrapezoidEx3(n), OracleRegion::TopEdge) => Ok(top_edge(from_i64(n as i64))),
            (ExampleId::TrapezoidEx3(n), OracleRegion::SlantedEdge) => {
                // u_∞ = (n+1) log(n/(n−1) + s̃1) + ((n+1)/n) log((n−1) s2),
                // s̃1 = s1 / ((n−1)^{1/n} s2^{1/n})
                let nt = from_i64::<T>(n as i64);
                let nm1 = nt - T::one();
                let np1 = nt + T::one();
                let ln_st = two * z.rho[0] - (nm1.ln() + two * z.rho[1]) / nt;
                let u = np1 * log_sum_exp(&[(nt / nm1).ln(), ln_st]) + np1 / nt * (nm1.ln() + two * z.rho[1]);
                Ok(np1 * l - u)
            }
            (ExampleId::TrapezoidEx3(n), OracleRegion::Vertex) => decay_objective(&[T::one(), T::one()], z, n as i64 + 1),
            _ => Err(Error::OutsideOracleRegion),
        }
    }

    /// `ψ_P` coefficient matrix from the closed forms.
    pub fn psi<T: Real>(self, z: &TorusPoint<T>) -> Result<PsiDensity<T>> {
        let region = self.region(z)?;
        let poly = self.polytope()?;
        let p = self.degree();
        let two: T = lit(2.0);
        let four: T = lit(4.0);
        let c = T::one() / (T::PI() * lit(8.0));
        let s1 = (two * z.rho[0]).exp();
        let s2 = (two * z.rho[1]).exp();
        let a = s1 / (T::one() + s1);
        let mut matrix: Matrix<T> = linalg::zeros(2, 2);
        match (self, region) {
            (_, OracleRegion::Allowed) => matrix = fubini_study_matrix(z, p),
            (ExampleId::Square | ExampleId::TrapezoidEx2, OracleRegion::TopEdge) => {
                matrix[0][0] = c * four * a * (T::one() - a);
            }
            (ExampleId::Square, OracleRegion::RightEdge) => {
                let b = s2 / (T::one() + s2);
                matrix[1][1] = c * four * b * (T::one() - b);
            }
            (ExampleId::TrapezoidEx3(n), OracleRegion::TopEdge) => {
                matrix[0][0] = c * from_i64::<T>(n as i64) * four * a * (T::one() - a);
            }
            (ExampleId::TrapezoidEx3(n), OracleRegion::SlantedEdge) => {
                let nt = from_i64::<T>(n as i64);
                let nm1 = nt - T::one();
                let st = s1 / (nm1.powf(T::one() / nt) * s2.powf(T::one() / nt));
                let beta = st / (nt / nm1 + st);
                let k = c * (nt + T::one()) * beta * (T::one() - beta);
                matrix[0][0] = k * four;
                matrix[0][1] = -k * four / nt;
                matrix[1][0] = matrix[0][1];
                matrix[1][1] = k * four / (nt * nt);
            }
            (ExampleId::TrapezoidEx3(_), OracleRegion::Vertex) => {}
            _ => return Err(Error::OutsideOracleRegion),
        }
        let eigenvalues = linalg::symmetric_eigenvalues(&matrix);
        let rank = rank_of(&eigenvalues, &fubini_study_matrix(z, p), lit(1e-4));
        Ok(PsiDensity {
            point: z.clone(),
            matrix,
            eigenvalues,
            rank,
            region: self.expected_label(&poly, region),
        })
    }

    /// `count` points of `region` drawn uniformly in `ρ ∈ [−box, box]²`
    /// whose `margin`-neighbourhood (in `ρ`, sup norm) stays in `region`.
    pub fn sample_points(self, region: OracleRegion, count: usize, seed: u64, half_width: f64, margin: f64) -> Vec<TorusPoint<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut tries = 0usize;
        while out.len() < count && tries < 10_000_000 {
            tries += 1;
            let rho = [
                rng.random_range(-half_width..half_width),
                rng.random_range(-half_width..half_width),
            ];
            let ok = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0), (0.0, 0.0)]
                .iter()
                .all(|(d1, d2)| {
                    let z = TorusPoint::from_rho(vec![rho[0] + d1 * margin, rho[1] + d2 * margin]);
                    self.region(&z).ok() == Some(region)
                });
            if ok {
                out.push(TorusPoint::from_rho(rho.to_vec()));
            }
        }
        out
    }
}
