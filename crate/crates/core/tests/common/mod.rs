#![allow(dead_code)]

use proptest::prelude::*;
use toric_zeros::momentmap::TorusPoint;
use toric_zeros::LatticePolytope;

/// Lattice points of `pΣ` in dimension `m`.
pub fn simplex_points(m: usize, p: i64) -> Vec<Vec<i64>> {
    LatticePolytope::simplex(m, p).unwrap().lattice_points(1)
}

/// Hull of a random nonempty subset of `pΣ ∩ ℤ^m`.
pub fn arb_polytope(dims: std::ops::RangeInclusive<usize>, max_p: i64) -> impl Strategy<Value = LatticePolytope> {
    (dims, 1..=max_p, prop::collection::vec(any::<u32>(), 1..7)).prop_map(|(m, p, picks)| {
        let pts = simplex_points(m, p);
        let chosen: Vec<Vec<i64>> = picks.iter().map(|&i| pts[i as usize % pts.len()].clone()).collect();
        LatticePolytope::from_vertices(&chosen, p).unwrap()
    })
}

/// A polytope not contained in a facet of `pΣ`, so the decay solver applies.
pub fn arb_interior_polytope(dims: std::ops::RangeInclusive<usize>, max_p: i64) -> impl Strategy<Value = LatticePolytope> {
    arb_polytope(dims, max_p).prop_filter("lies in a facet of pΣ", |p| !p.in_simplex_boundary())
}

/// A pair `P′ ⊂ P` with `P′` spanned by lattice points of `P`.
pub fn arb_nested_pair(dims: std::ops::RangeInclusive<usize>, max_p: i64) -> impl Strategy<Value = (LatticePolytope, LatticePolytope)> {
    (arb_interior_polytope(dims, max_p), prop::collection::vec(any::<u32>(), 1..5))
        .prop_map(|(outer, picks)| {
            let pts = outer.lattice_points(1);
            let chosen: Vec<Vec<i64>> = picks.iter().map(|&i| pts[i as usize % pts.len()].clone()).collect();
            (LatticePolytope::from_vertices(&chosen, outer.degree_bound()).unwrap(), outer)
        })
        .prop_filter("inner lies in a facet of pΣ", |(inner, _)| !inner.in_simplex_boundary())
}

pub fn arb_rho(m: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, m)
}

pub fn point(rho: &[f64]) -> TorusPoint<f64> {
    TorusPoint::from_rho(rho.to_vec())
}

pub fn square() -> LatticePolytope {
    LatticePolytope::lattice_box(&[(0, 1), (0, 1)], 2).unwrap()
}

pub fn seg(a: i64, b: i64, p: i64) -> LatticePolytope {
    LatticePolytope::from_vertices(&[vec![a], vec![b]], p).unwrap()
}
