//! Exact lattice polytopes inside a dilated simplex.
//!
//! A [`LatticePolytope`] is stored both as its vertex list and as a list of
//! facet inequalities `⟨x, u_j⟩ + λ_j ≥ 0` with primitive integer normals,
//! plus integer equations cutting out its affine hull when it is not
//! full-dimensional. The face lattice is computed once at construction and
//! each face is the *open* face, so the faces partition the polytope.

use std::collections::BTreeSet;
use std::path::Path;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

pub type Rational = Ratio<i64>;
type Q = Ratio<i128>;

/// Inequality `⟨x, normal⟩ + offset ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Halfspace {
    pub fn eval(&self, x: &[i64]) -> i64 {
        dot_i(&self.normal, x) + self.offset
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::from_integer(self.offset);
        for (&u, &xi) in self.normal.iter().zip(x) {
            s += xi * u;
        }
        s
    }

    pub fn eval_real<T: Real>(&self, x: &[T]) -> T {
        let mut s = T::from_i64(self.offset).unwrap();
        for (&u, &xi) in self.normal.iter().zip(x) {
            s = s + T::from_i64(u).unwrap() * xi;
        }
        s
    }

    pub fn normal_norm<T: Real>(&self) -> T {
        let s: i64 = self.normal.iter().map(|u| u * u).sum();
        T::from_i64(s).unwrap().sqrt()
    }
}

/// Equation `⟨x, normal⟩ = value` satisfied by the whole polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub normal: Vec<i64>,
    pub value: i64,
}

/// An open face of the polytope.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: usize,
    /// Indices of the facet inequalities that are active on the face.
    pub active_set: Vec<usize>,
    pub dim: usize,
    /// Indices into [`LatticePolytope::vertices`] of the vertices of the closed face.
    pub vertex_indices: Vec<usize>,
    pub tangent_basis: Vec<Vec<Rational>>,
    pub normal_cone_generators: Vec<Vec<i64>>,
    pub relative_interior_point: Vec<Rational>,
}

/// Three-way result of a normal cone membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct LatticePolytope {
    ambient_dim: usize,
    degree_bound: i64,
    vertices: Vec<Vec<i64>>,
    halfspaces: Vec<Halfspace>,
    equations: Vec<Equation>,
    dim: usize,
    faces: Vec<Face>,
}

/// On-disk form of a polytope.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub m: usize,
    pub p: i64,
    pub vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    /// Convex hull of `points`, which must lie in the simplex of degree `p`.
    pub fn from_vertices(points: &[Vec<i64>], p: i64) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPolytope)?;
        let m = first.len();
        if !(1..=3).contains(&m) {
            return Err(Error::UnsupportedDimension(m));
        }
        if p < 1 {
            return Err(Error::InvalidDegree(p));
        }
        for v in points {
            if v.len() != m {
                return Err(Error::DimensionMismatch {
                    vertex: v.clone(),
                    expected: m,
                    found: v.len(),
                });
            }
            if v.iter().any(|&x| x < 0) || v.iter().sum::<i64>() > p {
                return Err(Error::VertexOutsideSimplex {
                    vertex: v.clone(),
                    p,
                });
            }
        }
        let pts: Vec<Vec<i64>> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let dirs: Vec<Vec<i64>> = pts[1..].iter().map(|x| sub_i(x, &pts[0])).collect();
        let dim = rank_i(&dirs);
        let eq_normals = nullspace_i(&dirs, m);
        let equations: Vec<Equation> = eq_normals
            .into_iter()
            .map(|e| Equation {
                value: dot_i(&e, &pts[0]),
                normal: e,
            })
            .collect();

        let halfspaces = if dim == 0 {
            Vec::new()
        } else {
            facets(&pts, dim, &equations)
        };

        let is_vertex = |x: &Vec<i64>| {
            let mut normals: Vec<Vec<i64>> = equations.iter().map(|e| e.normal.clone()).collect();
            normals.extend(
                halfspaces
                    .iter()
                    .filter(|h| h.eval(x) == 0)
                    .map(|h| h.normal.clone()),
            );
            rank_i(&normals) == m
        };
        let vertices: Vec<Vec<i64>> = pts.iter().filter(|x| is_vertex(x)).cloned().collect();

        let mut poly = LatticePolytope {
            ambient_dim: m,
            degree_bound: p,
            vertices,
            halfspaces,
            equations,
            dim,
            faces: Vec::new(),
        };
        poly.faces = poly.build_faces();
        Ok(poly)
    }

    pub fn from_file(file: &PolytopeFile) -> Result<Self> {
        let poly = Self::from_vertices(&file.vertices, file.p)?;
        if poly.ambient_dim != file.m {
            return Err(Error::DimensionMismatch {
                vertex: file.vertices[0].clone(),
                expected: file.m,
                found: poly.ambient_dim,
            });
        }
        Ok(poly)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: PolytopeFile = serde_json::from_str(s)?;
        Self::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_file(&self) -> PolytopeFile {
        PolytopeFile {
            m: self.ambient_dim,
            p: self.degree_bound,
            vertices: self.vertices.clone(),
        }
    }

    /// The full simplex of degree `p` in dimension `m`.
    pub fn simplex(m: usize, p: i64) -> Result<Self> {
        let mut verts = vec![vec![0; m]];
        for j in 0..m {
            let mut v = vec![0; m];
            v[j] = p;
            verts.push(v);
        }
        Self::from_vertices(&verts, p)
    }

    /// The box `∏ [lo_j, hi_j]` inside the simplex of degree `p`.
    pub fn lattice_box(bounds: &[(i64, i64)], p: i64) -> Result<Self> {
        let mut verts: Vec<Vec<i64>> = vec![vec![]];
        for &(lo, hi) in bounds {
            verts = verts
                .into_iter()
                .flat_map(|v| {
                    [lo, hi].into_iter().map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        Self::from_vertices(&verts, p)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn degree_bound(&self) -> i64 {
        self.degree_bound
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    /// The open top-dimensional face (the relative interior of P).
    pub fn top_face(&self) -> &Face {
        self.faces.last().expect("at least one face")
    }

    pub fn face_by_active_set(&self, active: &[usize]) -> Option<&Face> {
        self.faces.iter().find(|f| f.active_set == active)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient_dim
    }

    /// Every vertex lies on exactly `dim` facets.
    pub fn is_simple(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| self.halfspaces.iter().filter(|h| h.eval(v) == 0).count() == self.dim)
    }

    pub fn require_simple(&self) -> Result<()> {
        if self.is_simple() {
            Ok(())
        } else {
            Err(Error::NotSimple)
        }
    }

    /// True when P lies in one facet of the dilated simplex.
    pub fn in_simplex_boundary(&self) -> bool {
        let p = self.degree_bound;
        (0..self.ambient_dim).any(|j| self.vertices.iter().all(|v| v[j] == 0))
            || self.vertices.iter().all(|v| v.iter().sum::<i64>() == p)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| !h.eval_rational(x).is_negative())
            && self.equations.iter().all(|e| {
                let s: Rational = e.normal.iter().zip(x).map(|(&u, &xi)| xi * u).sum();
                s == Rational::from_integer(e.value)
            })
    }

    pub fn contains_lattice_point(&self, x: &[i64]) -> bool {
        self.halfspaces.iter().all(|h| h.eval(x) >= 0)
            && self.equations.iter().all(|e| dot_i(&e.normal, x) == e.value)
    }

    /// The open face containing `x`, or `None` if `x ∉ P`.
    pub fn face_of_point(&self, x: &[Rational]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let active: Vec<usize> = self
            .halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.eval_rational(x).is_zero())
            .map(|(j, _)| j)
            .collect();
        self.face_by_active_set(&active).map(|f| f.id)
    }

    /// `N·P` inside the simplex of degree `N·p`.
    pub fn dilate(&self, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!("dilation factor {n} < 1")));
        }
        let verts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| x * n).collect())
            .collect();
        Self::from_vertices(&verts, self.degree_bound * n)
    }

    fn bounding_box(&self, n: i64) -> Vec<(i64, i64)> {
        (0..self.ambient_dim)
            .map(|j| {
                let lo = self.vertices.iter().map(|v| v[j]).min().unwrap();
                let hi = self.vertices.iter().map(|v| v[j]).max().unwrap();
                (lo * n, hi * n)
            })
            .collect()
    }

    fn contains_dilated(&self, x: &[i64], n: i64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot_i(&h.normal, x) + n * h.offset >= 0)
            && self
                .equations
                .iter()
                .all(|e| dot_i(&e.normal, x) == n * e.value)
    }

    /// Lattice points of `N·P`, sorted lexicographically.
    pub fn lattice_points(&self, n: i64) -> Vec<Vec<i64>> {
        let bbox = self.bounding_box(n);
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.ambient_dim];
        self.scan(&bbox, 0, &mut cur, n, &mut out);
        out
    }

    fn scan(&self, bbox: &[(i64, i64)], k: usize, cur: &mut Vec<i64>, n: i64, out: &mut Vec<Vec<i64>>) {
        if k == bbox.len() {
            if self.contains_dilated(cur, n) {
                out.push(cur.clone());
            }
            return;
        }
        for x in bbox[k].0..=bbox[k].1 {
            cur[k] = x;
            self.scan(bbox, k + 1, cur, n, out);
        }
    }

    /// `#(N·P ∩ ℤ^m)` by solving for the admissible interval of the last
    /// coordinate on every fiber.
    pub fn count_points(&self, n: i64) -> u64 {
        let bbox = self.bounding_box(n);
        let mut cur = vec![0i64; self.ambient_dim];
        self.count_fibers(&bbox, 0, &mut cur, n)
    }

    fn count_fibers(&self, bbox: &[(i64, i64)], k: usize, cur: &mut Vec<i64>, n: i64) -> u64 {
        let m = bbox.len();
        if k + 1 < m {
            let mut total = 0;
            for x in bbox[k].0..=bbox[k].1 {
                cur[k] = x;
                total += self.count_fibers(bbox, k + 1, cur, n);
            }
            return total;
        }
        let last = m - 1;
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        let partial = |normal: &[i64], cur: &[i64]| -> i64 {
            normal[..last].iter().zip(&cur[..last]).map(|(a, b)| a * b).sum()
        };
        for h in &self.halfspaces {
            let rest = partial(&h.normal, cur) + n * h.offset;
            let u = h.normal[last];
            if u > 0 {
                lo = lo.max(Integer::div_ceil(&-rest, &u));
            } else if u < 0 {
                hi = hi.min(Integer::div_floor(&rest, &-u));
            } else if rest < 0 {
                return 0;
            }
        }
        for e in &self.equations {
            let rest = n * e.value - partial(&e.normal, cur);
            let u = e.normal[last];
            if u == 0 {
                if rest != 0 {
                    return 0;
                }
            } else {
                if rest % u != 0 {
                    return 0;
                }
                let x = rest / u;
                lo = lo.max(x);
                hi = hi.min(x);
            }
        }
        if lo == i64::MIN || hi == i64::MAX {
            lo = lo.max(bbox[last].0);
            hi = hi.min(bbox[last].1);
        }
        if hi >= lo {
            (hi - lo + 1) as u64
        } else {
            0
        }
    }

    /// Relative volume of P normalised by the lattice of its affine hull,
    /// so that it is the leading Ehrhart coefficient. Equals the Euclidean
    /// volume when P is full-dimensional.
    pub fn volume(&self) -> Rational {
        let m = self.ambient_dim;
        match (self.dim, m) {
            (0, _) => Rational::from_integer(1),
            (1, _) => {
                let d = sub_i(&self.vertices[1], &self.vertices[0]);
                Rational::from_integer(d.iter().fold(0, |g, &x| g.gcd(&x)))
            }
            (2, 2) => polygon_area(&self.vertices),
            (2, 3) => {
                let e = &self.equations[0].normal;
                let k = (0..3).max_by_key(|&k| e[k].abs()).unwrap();
                let proj: Vec<Vec<i64>> = self
                    .vertices
                    .iter()
                    .map(|v| (0..3).filter(|&i| i != k).map(|i| v[i]).collect())
                    .collect();
                polygon_area(&proj) / e[k].abs()
            }
            (3, 3) => {
                let c = centroid(&self.vertices);
                let mut vol = Rational::zero();
                for h in &self.halfspaces {
                    let k = (0..3).max_by_key(|&k| h.normal[k].abs()).unwrap();
                    let proj: Vec<Vec<i64>> = self
                        .vertices
                        .iter()
                        .filter(|v| h.eval(v) == 0)
                        .map(|v| (0..3).filter(|&i| i != k).map(|i| v[i]).collect())
                        .collect();
                    let base = polygon_area(&proj) / h.normal[k].abs();
                    vol += base * h.eval_rational(&c) / 3;
                }
                vol
            }
            _ => unreachable!("dimension bounded by ambient dimension ≤ 3"),
        }
    }

    /// Ehrhart coefficients, leading coefficient first.
    ///
    /// Interpolates the counts at `N = 1..=n+1`, then checks the constant
    /// term, the prediction at `N = n+2`, and the leading coefficient
    /// against [`Self::volume`].
    pub fn ehrhart_fit(&self) -> Result<Vec<Rational>> {
        let n = self.dim;
        let xs: Vec<i64> = (1..=n as i64 + 1).collect();
        let ys: Vec<i128> = xs.iter().map(|&x| self.count_points(x) as i128).collect();
        // Lagrange interpolation into monomial coefficients (constant first).
        let mut coef = vec![Q::zero(); n + 1];
        for (i, &xi) in xs.iter().enumerate() {
            let mut basis = vec![Q::from_integer(1)];
            let mut denom = Q::from_integer(1);
            for (j, &xj) in xs.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![Q::zero(); basis.len() + 1];
                for (d, &b) in basis.iter().enumerate() {
                    next[d + 1] += b;
                    next[d] -= b * (xj as i128);
                }
                basis = next;
                denom *= Q::from_integer((xi - xj) as i128);
            }
            for (d, &b) in basis.iter().enumerate() {
                coef[d] += b * ys[i] / denom;
            }
        }
        let inconsistent = Error::InconsistentCounts { degree: n };
        if coef[0] != Q::from_integer(1) {
            return Err(inconsistent);
        }
        let probe = n as i128 + 2;
        let predicted = coef
            .iter()
            .rev()
            .fold(Q::zero(), |acc, &c| acc * probe + c);
        if predicted != Q::from_integer(self.count_points(probe as i64) as i128) {
            return Err(inconsistent);
        }
        let out: Vec<Rational> = coef
            .iter()
            .rev()
            .map(|c| Rational::new(c.numer().to_i64().unwrap(), c.denom().to_i64().unwrap()))
            .collect();
        if out[0] != self.volume() {
            return Err(inconsistent);
        }
        Ok(out)
    }

    /// Classifies `w` against the normal cone of face `face_id`.
    ///
    /// `w` is in the cone when it is orthogonal to the face and
    /// `⟨w, v − c⟩ ≤ 0` for every vertex `v` off the face, `c` being the
    /// face's interior point. The band `tol` applies to the tangential
    /// residual and to the normalised vertex slacks.
    pub fn normal_cone_contains<T: Real>(&self, face_id: usize, w: &[T], tol: T) -> ConeMembership {
        let face = &self.faces[face_id];
        let basis = linalg::orthonormal_basis(
            &face
                .tangent_basis
                .iter()
                .map(|t| t.iter().map(|&r| rational_to::<T>(r)).collect())
                .collect::<Vec<Vec<T>>>(),
        );
        let mut proj = vec![T::zero(); w.len()];
        for b in &basis {
            let c = crate::scalar::dot(w, b);
            for (pi, &bi) in proj.iter_mut().zip(b) {
                *pi = *pi + c * bi;
            }
        }
        let residual = crate::scalar::norm(&proj);
        let center: Vec<T> = face
            .relative_interior_point
            .iter()
            .map(|&r| rational_to::<T>(r))
            .collect();
        let mut s = T::neg_infinity();
        for (i, v) in self.vertices.iter().enumerate() {
            if face.vertex_indices.binary_search(&i).is_ok() {
                continue;
            }
            let d: Vec<T> = v
                .iter()
                .zip(&center)
                .map(|(&x, &c)| T::from_i64(x).unwrap() - c)
                .collect();
            s = s.max(crate::scalar::dot(w, &d) / crate::scalar::norm(&d));
        }
        if residual > tol || s > tol {
            ConeMembership::Outside
        } else if s >= -tol {
            ConeMembership::Boundary
        } else {
            ConeMembership::Interior
        }
    }

    /// Vertices as floating-point vectors.
    pub fn vertices_real<T: Real>(&self) -> Vec<Vec<T>> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(|&x| T::from_i64(x).unwrap()).collect())
            .collect()
    }

    /// Closed face vertex set of face `id` as floating-point vectors.
    pub fn face_vertices_real<T: Real>(&self, id: usize) -> Vec<Vec<T>> {
        self.faces[id]
            .vertex_indices
            .iter()
            .map(|&i| self.vertices[i].iter().map(|&x| T::from_i64(x).unwrap()).collect())
            .collect()
    }

    fn build_faces(&self) -> Vec<Face> {
        let nv = self.vertices.len();
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        sets.insert((0..nv).collect());
        for h in &self.halfspaces {
            sets.insert((0..nv).filter(|&i| h.eval(&self.vertices[i]) == 0).collect());
        }
        for i in 0..nv {
            sets.insert(vec![i]);
        }
        loop {
            let list: Vec<Vec<usize>> = sets.iter().cloned().collect();
            let mut grew = false;
            for a in 0..list.len() {
                for b in a + 1..list.len() {
                    let inter: Vec<usize> = list[a]
                        .iter()
                        .filter(|x| list[b].binary_search(x).is_ok())
                        .copied()
                        .collect();
                    if !inter.is_empty() && sets.insert(inter) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|vidx| {
                let active: Vec<usize> = self
                    .halfspaces
                    .iter()
                    .enumerate()
                    .filter(|(_, h)| vidx.iter().all(|&i| h.eval(&self.vertices[i]) == 0))
                    .map(|(j, _)| j)
                    .collect();
                let base = &self.vertices[vidx[0]];
                let mut tangent: Vec<Vec<i64>> = Vec::new();
                for &i in &vidx[1..] {
                    let d = sub_i(&self.vertices[i], base);
                    let mut trial = tangent.clone();
                    trial.push(d);
                    if rank_i(&trial) > tangent.len() {
                        tangent = trial;
                    }
                }
                let mut gens: Vec<Vec<i64>> = active
                    .iter()
                    .map(|&j| self.halfspaces[j].normal.iter().map(|&u| -u).collect())
                    .collect();
                for e in &self.equations {
                    gens.push(e.normal.clone());
                    gens.push(e.normal.iter().map(|&u| -u).collect());
                }
                let pts: Vec<Vec<i64>> = vidx.iter().map(|&i| self.vertices[i].clone()).collect();
                Face {
                    id: 0,
                    dim: tangent.len(),
                    active_set: active,
                    relative_interior_point: centroid(&pts),
                    tangent_basis: tangent
                        .into_iter()
                        .map(|t| t.into_iter().map(Rational::from_integer).collect())
                        .collect(),
                    normal_cone_generators: gens,
                    vertex_indices: vidx,
                }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.active_set).cmp(&(b.dim, &b.active_set)));
        for (id, f) in faces.iter_mut().enumerate() {
            f.id = id;
        }
        faces
    }
}

pub fn rational_to<T: Real>(r: Rational) -> T {
    T::from_i64(*r.numer()).unwrap() / T::from_i64(*r.denom()).unwrap()
}

fn dot_i(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub_i(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn centroid(pts: &[Vec<i64>]) -> Vec<Rational> {
    let k = pts.len() as i64;
    (0..pts[0].len())
        .map(|j| Rational::new(pts.iter().map(|v| v[j]).sum(), k))
        .collect()
}

/// Row echelon form over ℚ; returns the reduced rows and pivot columns.
fn rref(rows: &[Vec<i64>], m: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Q::from_integer(x as i128)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(piv) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, piv);
        let lead = a[row][col];
        for x in a[row].iter_mut() {
            *x /= lead;
        }
        for i in 0..a.len() {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col];
                for k in 0..m {
                    let v = a[row][k];
                    a[i][k] -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    a.truncate(row);
    (a, pivots)
}

fn rank_i(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rref(rows, rows[0].len()).1.len()
}

fn primitive(v: Vec<i128>) -> Vec<i64> {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    v.into_iter().map(|x| (x / g) as i64).collect()
}

/// Primitive integer basis of `{x : ⟨r, x⟩ = 0 for all rows r}`.
fn nullspace_i(rows: &[Vec<i64>], m: usize) -> Vec<Vec<i64>> {
    let (a, pivots) = if rows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(rows, m)
    };
    let mut basis = Vec::new();
    for free in (0..m).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); m];
        v[free] = Q::from_integer(1);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free];
        }
        let l = v.iter().fold(1i128, |l, q| l.lcm(q.denom()));
        basis.push(primitive(v.iter().map(|q| (*q * l).to_integer()).collect()));
    }
    basis
}

/// Integer vector orthogonal to `m − 1` vectors in `ℤ^m`.
fn cross(vs: &[Vec<i64>], m: usize) -> Vec<i128> {
    let w = |v: &Vec<i64>, i: usize| v[i] as i128;
    match m {
        1 => vec![1],
        2 => vec![-w(&vs[0], 1), w(&vs[0], 0)],
        3 => {
            let (a, b) = (&vs[0], &vs[1]);
            vec![
                w(a, 1) * w(b, 2) - w(a, 2) * w(b, 1),
                w(a, 2) * w(b, 0) - w(a, 0) * w(b, 2),
                w(a, 0) * w(b, 1) - w(a, 1) * w(b, 0),
            ]
        }
        _ => unreachable!(),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Facet inequalities of the hull of `pts`, whose affine dimension is `dim ≥ 1`.
fn facets(pts: &[Vec<i64>], dim: usize, equations: &[Equation]) -> Vec<Halfspace> {
    let m = pts[0].len();
    let mut found: BTreeSet<Halfspace> = BTreeSet::new();
    for combo in combinations(pts.len(), dim) {
        let base = &pts[combo[0]];
        let mut spanning: Vec<Vec<i64>> = combo[1..].iter().map(|&i| sub_i(&pts[i], base)).collect();
        if rank_i(&spanning) != dim - 1 {
            continue;
        }
        spanning.extend(equations.iter().map(|e| e.normal.clone()));
        let raw = cross(&spanning, m);
        if raw.iter().all(|&x| x == 0) {
            continue;
        }
        let mut u = primitive(raw);
        let vals: Vec<i64> = pts.iter().map(|x| dot_i(&u, &sub_i(x, base))).collect();
        if vals.iter().all(|&v| v <= 0) {
            u.iter_mut().for_each(|x| *x = -*x);
        } else if !vals.iter().all(|&v| v >= 0) {
            continue;
        }
        let offset = -dot_i(&u, base);
        found.insert(Halfspace { normal: u, offset });
    }
    found.into_iter().collect()
}

/// Area of the convex hull of planar integer points (monotone chain + shoelace).
fn polygon_area(pts: &[Vec<i64>]) -> Rational {
    let mut p: Vec<(i64, i64)> = pts.iter().map(|v| (v[0], v[1])).collect();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return Rational::zero();
    }
    let turn = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &pt in iter {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
        hull.pop();
    }
    let twice: i64 = (0..hull.len())
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum();
    Rational::new(twice.abs(), 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], 2).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn square_combinatorics() {
        let sq = square();
        assert_eq!(sq.halfspaces().len(), 4);
        assert_eq!(sq.faces().len(), 9);
        assert_eq!(sq.faces().iter().filter(|f| f.dim == 0).count(), 4);
        assert_eq!(sq.faces().iter().filter(|f| f.dim == 1).count(), 4);
        assert!(sq.top_face().active_set.is_empty());
        assert!(sq.is_simple());
        assert!(sq.contains(&[r(1, 2), r(1, 2)]));
        assert!(!sq.contains(&[r(3, 2), r(1, 2)]));
        for h in sq.halfspaces() {
            assert_eq!(h.normal.iter().map(|x| x.abs()).sum::<i64>(), 1);
        }
    }

    #[test]
    fn interior_points_are_dropped() {
        let p = LatticePolytope::from_vertices(
            &[vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 1], vec![1, 0], vec![0, 1]],
            2,
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.faces().len(), 7);
    }

    #[test]
    fn segment_halfspaces() {
        let s = LatticePolytope::from_vertices(&[vec![1], vec![3]], 4).unwrap();
        assert_eq!(s.dim(), 1);
        let hs: BTreeSet<(i64, i64)> = s.halfspaces().iter().map(|h| (h.normal[0], h.offset)).collect();
        assert_eq!(hs, BTreeSet::from([(1, -1), (-1, 3)]));
        assert_eq!(s.lattice_points(5), (5..=15).map(|x| vec![x]).collect::<Vec<_>>());
    }

    #[test]
    fn trapezoid_points_and_ehrhart() {
        let t = LatticePolytope::from_vertices(&[vec![0, 0], vec![2, 0], vec![0, 1], vec![1, 1]], 2).unwrap();
        assert_eq!(
            t.lattice_points(1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0]]
        );
        assert_eq!(t.lattice_points(2).len(), 12);
        assert_eq!(t.ehrhart_fit().unwrap(), vec![r(3, 2), r(5, 2), r(1, 1)]);
        assert_eq!(square().ehrhart_fit().unwrap(), vec![r(1, 1), r(2, 1), r(1, 1)]);
        assert_eq!(square().lattice_points(3).len(), 16);
        let simplex = LatticePolytope::simplex(2, 1).unwrap();
        assert_eq!(simplex.ehrhart_fit().unwrap()[0], r(1, 2));
    }

    #[test]
    fn lower_dimensional_volumes() {
        let diag = LatticePolytope::from_vertices(&[vec![0, 0, 0], vec![2, 2, 0]], 4).unwrap();
        assert_eq!(diag.dim(), 1);
        assert_eq!(diag.equations().len(), 2);
        assert_eq!(diag.volume(), r(2, 1));
        assert_eq!(diag.ehrhart_fit().unwrap(), vec![r(2, 1), r(1, 1)]);
        let facet = LatticePolytope::from_vertices(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]], 2).unwrap();
        assert_eq!(facet.dim(), 2);
        assert_eq!(facet.ehrhart_fit().unwrap(), vec![r(2, 1), r(3, 1), r(1, 1)]);
        assert!(facet.in_simplex_boundary());
        let point = LatticePolytope::from_vertices(&[vec![1, 1]], 3).unwrap();
        assert_eq!(point.faces().len(), 1);
        assert_eq!(point.ehrhart_fit().unwrap(), vec![r(1, 1)]);
    }

    #[test]
    fn three_dimensional() {
        let cube = LatticePolytope::lattice_box(&[(0, 1), (0, 1), (0, 1)], 3).unwrap();
        assert_eq!(cube.halfspaces().len(), 6);
        assert_eq!(cube.faces().len(), 27);
        assert_eq!(cube.ehrhart_fit().unwrap(), vec![r(1, 1), r(3, 1), r(3, 1), r(1, 1)]);
        let s3 = LatticePolytope::simplex(3, 1).unwrap();
        assert_eq!(s3.volume(), r(1, 6));
        let oct = LatticePolytope::from_vertices(
            &[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1], vec![0, 0, 1], vec![1, 0, 0]],
            3,
        )
        .unwrap();
        assert!(oct.ehrhart_fit().is_ok());
    }

    #[test]
    fn cone_membership() {
        let sq = square();
        let top = sq.face_by_active_set(&[sq
            .halfspaces()
            .iter()
            .position(|h| h.normal == vec![0, -1])
            .unwrap()])
        .unwrap()
        .id;
        assert_eq!(sq.normal_cone_contains(top, &[0.0, 1.0], 1e-9), ConeMembership::Interior);
        assert_eq!(sq.normal_cone_contains(top, &[1.0, 1.0], 1e-9), ConeMembership::Outside);
        assert_eq!(sq.normal_cone_contains(top, &[0.0, 0.0], 1e-9), ConeMembership::Boundary);
        let corner = sq.face_of_point(&[r(1, 1), r(1, 1)]).unwrap();
        assert_eq!(sq.normal_cone_contains(corner, &[1.0, 1.0], 1e-9), ConeMembership::Interior);
        assert_eq!(sq.normal_cone_contains(corner, &[1.0, 0.0], 1e-9), ConeMembership::Boundary);
        let interior = sq.top_face().id;
        assert_eq!(sq.normal_cone_contains(interior, &[0.0, 0.0], 1e-9), ConeMembership::Interior);
    }

    #[test]
    fn json_round_trip() {
        let sq = square();
        let text = serde_json::to_string(&sq.to_file()).unwrap();
        let back = LatticePolytope::from_json_str(&text).unwrap();
        assert_eq!(back.vertices(), sq.vertices());
        assert!(LatticePolytope::from_json_str(r#"{"m":2,"p":2,"vertices":[[0,0]],"x":1}"#).is_err());
        assert!(matches!(
            LatticePolytope::from_vertices(&[vec![3, 0]], 2),
            Err(Error::VertexOutsideSimplex { .. })
        ));
        assert!(matches!(
            LatticePolytope::from_vertices(&[vec![0; 4]], 2),
            Err(Error::UnsupportedDimension(4))
        ));
    }
}
