mod common;

use common::*;
use proptest::prelude::*;
use toric_zeros::momentmap::{b_gradient_rho, decay_gradient, decay_objective, NormalSolver, Region, TorusPoint};
use toric_zeros::ConeMembership;

fn b_at(solver: &NormalSolver<'_, f64>, rho: &[f64]) -> f64 {
    solver.solve(&point(rho)).unwrap().b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimiser_beats_random_points(
        (p, rho) in arb_interior_polytope(1..=3, 4).prop_flat_map(|p| { let m = p.ambient_dim(); (Just(p), arb_rho(m, 3.0)) }),
        weights in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 8), 50),
    ) {
        let solver = NormalSolver::<f64>::new(&p).unwrap();
        let z = point(&rho);
        let nd = solver.solve(&z).unwrap();
        let deg = p.degree_bound();
        let fq = decay_objective(&nd.q, &z, deg).unwrap();
        prop_assert!((fq - nd.b).abs() <= 1e-12 * (1.0 + fq.abs()));
        let verts = p.vertices_real::<f64>();
        for w in &weights {
            let w = &w[..verts.len().min(8)];
            let total: f64 = w.iter().sum::<f64>() + 1e-12;
            let x: Vec<f64> = (0..p.ambient_dim())
                .map(|j| w.iter().zip(&verts).map(|(c, v)| c * v[j]).sum::<f64>() / total)
                .collect();
            if let Ok(fx) = decay_objective(&x, &z, deg) {
                prop_assert!(fx >= fq - 1e-9, "f(x) = {} < f(q) = {}", fx, fq);
            }
        }
    }

    #[test]
    fn kkt_conditions(
        (p, rho) in arb_interior_polytope(1..=3, 4).prop_flat_map(|p| { let m = p.ambient_dim(); (Just(p), arb_rho(m, 3.0)) }),
    ) {
        let solver = NormalSolver::<f64>::new(&p).unwrap();
        let z = point(&rho);
        let nd = solver.solve(&z).unwrap();
        let g = decay_gradient(&nd.q, &z, p.degree_bound()).unwrap();
        for (t, gj) in nd.tau.iter().zip(&g) {
            prop_assert!((t + gj).abs() <= 1e-8);
        }
        if !nd.transition_flag {
            let scale = nd.tau.iter().map(|t| t * t).sum::<f64>().sqrt().max(1.0);
            prop_assert_ne!(p.normal_cone_contains(nd.face_id, &nd.tau, 1e-8 * scale), ConeMembership::Outside);
        }
    }

    #[test]
    fn positive_on_forbidden_region(
        (p, rho) in arb_interior_polytope(1..=3, 4).prop_flat_map(|p| { let m = p.ambient_dim(); (Just(p), arb_rho(m, 3.0)) }),
    ) {
        let solver = NormalSolver::<f64>::new(&p).unwrap();
        let z = point(&rho);
        let nd = solver.solve(&z).unwrap();
        prop_assert!(nd.b >= -1e-12);
        if let Region::Forbidden(_) = solver.region_of(&nd) {
            prop_assert!(nd.b > 0.0);
        }
        if solver.region_of(&nd) == Region::Allowed {
            prop_assert!(nd.b.abs() <= 1e-12);
        }
    }

    #[test]
    fn monotone_under_inclusion(
        ((inner, outer), rho) in arb_nested_pair(1..=3, 4).prop_flat_map(|pair| { let m = pair.1.ambient_dim(); (Just(pair), arb_rho(m, 3.0)) }),
    ) {
        let si = NormalSolver::<f64>::new(&inner).unwrap();
        let so = NormalSolver::<f64>::new(&outer).unwrap();
        let z = point(&rho);
        let (bi, bo) = (si.solve(&z).unwrap().b, so.solve(&z).unwrap().b);
        prop_assert!(bi >= bo - 1e-9 * (1.0 + bo.abs()), "b_P' = {} < b_P = {}", bi, bo);
    }

    #[test]
    fn gradient_matches_moment_map_difference(
        (p, rho) in arb_interior_polytope(1..=3, 4).prop_flat_map(|p| { let m = p.ambient_dim(); (Just(p), arb_rho(m, 2.5)) }),
    ) {
        let solver = NormalSolver::<f64>::new(&p).unwrap();
        let z = point(&rho);
        let nd = solver.solve(&z).unwrap();
        let g = b_gradient_rho(&nd, &z, p.degree_bound());
        let h = 1e-5;
        for j in 0..rho.len() {
            let mut up = rho.clone();
            let mut dn = rho.clone();
            up[j] += h;
            dn[j] -= h;
            let fd = (b_at(&solver, &up) - b_at(&solver, &dn)) / (2.0 * h);
            prop_assert!((fd - g[j]).abs() <= 1e-5 * (1.0 + g[j].abs()), "coord {}: fd {} vs {}", j, fd, g[j]);
        }
    }

    #[test]
    fn continuously_differentiable_across_interface(r1 in -2.0f64..2.0, delta in 1e-7f64..1e-5) {
        // the allowed/top-edge interface of the square is s2 = s1 + 1
        let sq = square();
        let solver = NormalSolver::<f64>::new(&sq).unwrap();
        let s1 = (2.0 * r1).exp();
        let r2 = 0.5 * (s1 + 1.0).ln();
        let below = TorusPoint::from_rho(vec![r1, r2 - delta]);
        let above = TorusPoint::from_rho(vec![r1, r2 + delta]);
        let (a, b) = (solver.solve(&below).unwrap(), solver.solve(&above).unwrap());
        prop_assert!((a.b - b.b).abs() <= 1e-4);
        let (ga, gb) = (b_gradient_rho(&a, &below, 2), b_gradient_rho(&b, &above, 2));
        for j in 0..2 {
            prop_assert!((ga[j] - gb[j]).abs() <= 1e-4);
        }
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let sq = square();
    let s64 = NormalSolver::<f64>::new(&sq).unwrap();
    let s32 = NormalSolver::<f32>::new(&sq).unwrap();
    for rho in [[0.0, 0.4], [0.7, -0.3], [-1.0, 1.5]] {
        let b64 = s64.solve(&TorusPoint::from_rho(rho.to_vec())).unwrap().b;
        let b32 = s32.solve(&TorusPoint::from_rho(rho.iter().map(|&x| x as f32).collect())).unwrap().b;
        assert!((b64 - b32 as f64).abs() < 1e-4, "{b64} {b32}");
    }
}
