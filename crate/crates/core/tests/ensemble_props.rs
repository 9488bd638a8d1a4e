mod common;

use common::*;
use proptest::prelude::*;
use toric_zeros::ensemble::{empirical_zero_stats, sample_zeros, univariate_roots, SparsePolynomial};
use toric_zeros::momentmap::{NormalSolver, TorusPoint};
use toric_zeros::LatticePolytope;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn root_count_is_lattice_length(p in 1i64..=5, a in 0i64..5, len in 0i64..5, n in 1i64..=20, seed in any::<u64>(), idx in 0u64..1000) {
        prop_assume!(a + len <= p);
        let seg = seg(a, a + len, p);
        let f = SparsePolynomial::<f64>::sample(&seg, n, seed, idx).unwrap();
        let z = univariate_roots(&f).unwrap();
        prop_assert_eq!(z.roots.len() as i64, n * len);
        prop_assert!(z.roots.len() as i64 <= n * (a + len));
        prop_assert!(z.roots.iter().all(|r| r.norm() > 0.0 && r.norm().is_finite()));
        prop_assert!(z.max_backward_error <= 1e-8);
    }

    #[test]
    fn draws_are_reproducible(seed in any::<u64>(), idx in any::<u64>()) {
        let p = LatticePolytope::lattice_box(&[(0, 1), (1, 2)], 3).unwrap();
        let f = SparsePolynomial::<f64>::sample(&p, 2, seed, idx).unwrap();
        let g = SparsePolynomial::<f64>::sample(&p, 2, seed, idx).unwrap();
        prop_assert_eq!(f.coeffs, g.coeffs);
    }
}

#[test]
fn statistics_are_bit_identical() {
    let p = seg(1, 3, 4);
    let a = empirical_zero_stats::<f64>(&p, 12, 30, 5).unwrap();
    let b = empirical_zero_stats::<f64>(&p, 12, 30, 5).unwrap();
    assert_eq!(a.allowed_fraction.to_bits(), b.allowed_fraction.to_bits());
    assert_eq!(a.roots_per_sample, b.roots_per_sample);
    assert_eq!(a.histogram.empirical, b.histogram.empirical);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| empirical_zero_stats::<f64>(&p, 12, 30, 5).unwrap());
    assert_eq!(a.histogram.empirical, c.histogram.empirical);
    assert_eq!(a.allowed_count, c.allowed_count);
}

#[test]
fn coefficient_variance() {
    let p = seg(0, 2, 2);
    let draws = 10_000u64;
    let mut acc = [0.0f64; 3];
    for i in 0..draws {
        let f = SparsePolynomial::<f64>::sample(&p, 1, 77, i).unwrap();
        for (s, c) in acc.iter_mut().zip(&f.coeffs) {
            *s += c.norm_sqr();
        }
    }
    for s in acc {
        let v = s / draws as f64;
        assert!((0.94..=1.06).contains(&v), "{v}");
    }
}

#[test]
fn histogram_mass_matches_root_count() {
    let p = seg(1, 3, 4);
    let s = empirical_zero_stats::<f64>(&p, 10, 20, 3).unwrap();
    assert_eq!(s.total_roots, 20 * 20);
    let width = 1.0 / s.histogram.empirical.len() as f64;
    let mass: f64 = s.histogram.empirical.iter().sum::<f64>() * width;
    assert!((mass - 1.0).abs() < 1e-12);
    let pred: f64 = s.histogram.predicted_finite_n.iter().sum::<f64>() * width;
    assert!((pred - 1.0).abs() < 1e-12);
}

#[test]
fn allowed_fraction_grows_with_degree() {
    let p = seg(1, 3, 4);
    let mut prev: Option<(f64, f64)> = None;
    for (n, samples) in [(10i64, 200usize), (25, 120), (50, 60), (100, 30)] {
        let s = empirical_zero_stats::<f64>(&p, n, samples, 41).unwrap();
        let (f, se) = (s.allowed_fraction, s.allowed_fraction_stderr());
        println!("N={n}: allowed_fraction {f:.4} ± {se:.4}");
        if let Some((pf, pse)) = prev {
            assert!(f >= pf - 2.0 * (se * se + pse * pse).sqrt(), "N={n}: {f} < {pf}");
        }
        prev = Some((f, se));
    }
}

#[test]
fn forbidden_roots_thin_out() {
    let p = seg(1, 3, 4);
    let solver = NormalSolver::<f64>::new(&p).unwrap();
    let delta = 0.02;
    let frac = |n: i64, samples: u64| {
        let (mut far, mut total) = (0usize, 0usize);
        for i in 0..samples {
            let z = sample_zeros(&p, &solver, n, 13, i).unwrap();
            for r in &z.roots {
                if solver.solve(&TorusPoint::from_complex(&[*r])).unwrap().b > delta {
                    far += 1;
                }
                total += 1;
            }
        }
        far as f64 / total as f64
    };
    let (a, b, c) = (frac(10, 200), frac(40, 50), frac(100, 20));
    println!("fraction with b > {delta}: N=10 {a:.4}, N=40 {b:.4}, N=100 {c:.4}");
    assert!(a > b && b > c);
}

#[test]
fn tentacles_on_square_facet() {
    let sq = square();
    let f: f64 = toric_zeros::ensemble::tentacle_allowed_fraction(&sq, 2, 50, 200, 8).unwrap();
    assert!(f >= 0.85, "{f}");
    let s4 = LatticePolytope::simplex(2, 4).unwrap();
    for j in 0..3 {
        let f: f64 = toric_zeros::ensemble::tentacle_allowed_fraction(&s4, j, 10, 20, 8).unwrap();
        assert_eq!(f, 1.0);
    }
}
