mod common;

use common::*;
use num_rational::Ratio;
use proptest::prelude::*;
use toric_zeros::{ConeMembership, LatticePolytope, Rational};

fn tight_set(p: &LatticePolytope, x: &[Rational]) -> Vec<usize> {
    p.halfspaces()
        .iter()
        .enumerate()
        .filter(|(_, h)| h.eval_rational(x) == Rational::from_integer(0))
        .map(|(j, _)| j)
        .collect()
}

fn polygon_area(verts: &[Vec<i64>]) -> Rational {
    let n = verts.len() as i64;
    let (cx, cy) = (
        verts.iter().map(|v| v[0]).sum::<i64>() as f64 / n as f64,
        verts.iter().map(|v| v[1]).sum::<i64>() as f64 / n as f64,
    );
    let mut vs = verts.to_vec();
    vs.sort_by(|a, b| {
        let ta = (a[1] as f64 - cy).atan2(a[0] as f64 - cx);
        let tb = (b[1] as f64 - cy).atan2(b[0] as f64 - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    let twice: i64 = (0..vs.len())
        .map(|i| {
            let (a, b) = (&vs[i], &vs[(i + 1) % vs.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    Ratio::new(twice.abs(), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_point_lies_in_exactly_one_face(p in arb_polytope(1..=3, 3), den in 1i64..4) {
        let m = p.ambient_dim();
        let top = p.degree_bound() * den;
        let mut idx = vec![0i64; m];
        loop {
            let x: Vec<Rational> = idx.iter().map(|&k| Ratio::new(k, den)).collect();
            if p.contains(&x) {
                let tight = tight_set(&p, &x);
                let holders = p.faces().iter().filter(|f| f.active_set == tight).count();
                prop_assert_eq!(holders, 1, "point {:?}", x);
                let id = p.face_of_point(&x).unwrap();
                prop_assert_eq!(&p.face(id).active_set, &tight);
            }
            let mut j = 0;
            while j < m {
                idx[j] += 1;
                if idx[j] <= top { break; }
                idx[j] = 0;
                j += 1;
            }
            if j == m { break; }
        }
    }

    #[test]
    fn normal_fan_is_complete(p in arb_polytope(1..=3, 3), w in prop::collection::vec(-1.0f64..1.0, 3)) {
        let w = &w[..p.ambient_dim()];
        let vals: Vec<f64> = p.vertices().iter().map(|v| v.iter().zip(w).map(|(&a, &b)| a as f64 * b).sum()).collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let argmax: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= best - 1e-9).collect();
        prop_assume!(argmax.len() == 1 || p.dim() == 0);
        let interior: Vec<usize> = p
            .faces()
            .iter()
            .filter(|f| p.normal_cone_contains(f.id, w, 1e-9) == ConeMembership::Interior)
            .map(|f| f.id)
            .collect();
        prop_assert_eq!(interior.len(), 1);
        prop_assert_eq!(&p.face(interior[0]).vertex_indices, &argmax);
    }

    #[test]
    fn counting_agrees_with_enumeration(p in arb_polytope(1..=3, 3), n in 1i64..=6) {
        prop_assert_eq!(p.count_points(n), p.lattice_points(n).len() as u64);
    }

    #[test]
    fn ehrhart_leading_coefficient_is_area(p in arb_polytope(2..=2, 4)) {
        prop_assume!(p.is_full_dimensional());
        let fit = p.ehrhart_fit().unwrap();
        prop_assert_eq!(fit[0], polygon_area(p.vertices()));
        prop_assert_eq!(fit[2], Rational::from_integer(1));
    }

    #[test]
    fn ehrhart_predicts_counts(p in arb_polytope(1..=3, 3)) {
        let fit = p.ehrhart_fit().unwrap();
        let d = fit.len() - 1;
        for n in 1..=4i64 {
            let v: Rational = fit.iter().enumerate().map(|(k, &c)| c * Rational::from_integer(n.pow((d - k) as u32))).sum();
            prop_assert_eq!(v, Rational::from_integer(p.count_points(n) as i64));
        }
    }

    #[test]
    fn json_round_trip(p in arb_polytope(1..=3, 4)) {
        let s = serde_json::to_string(&p.to_file()).unwrap();
        let q = LatticePolytope::from_json_str(&s).unwrap();
        prop_assert_eq!(q.vertices(), p.vertices());
        prop_assert_eq!(q.faces().len(), p.faces().len());
    }
}
