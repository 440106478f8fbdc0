use proptest::prelude::*;

use logwalk::graph::generators::connected_erdos_renyi;
use logwalk::oracle;
use logwalk::spectral::{estimate_norm, power_ratio_bounds, sigma_vectors};
use logwalk::{Mode, PracticalBudget, RandomSource, WeightedGraph};

fn graph() -> impl Strategy<Value = WeightedGraph> {
    (4usize..10, 0.3f64..0.9, any::<u64>()).prop_map(|(n, p, seed)| connected_erdos_renyi(n, p, 0.5, 2.0, seed))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_is_idempotent(g in graph(), raw in prop::collection::vec(-1.0f64..1.0, 10)) {
        let v = &raw[..g.n()];
        let p = g.project_to_image(v).unwrap();
        let pp = g.project_to_image(p.as_slice()).unwrap();
        for (a, b) in p.as_slice().iter().zip(pp.as_slice()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(dot(p.as_slice(), &g.null_vector()).abs() < 1e-12);
    }

    #[test]
    fn sigma_vectors_are_unit_and_in_image(g in graph()) {
        let n = g.n();
        let u1 = g.null_vector();
        let all: Vec<_> = sigma_vectors(&g).collect();
        prop_assert_eq!(all.len(), n * (n - 1) / 2);
        for s in all {
            let v = s.dense(n);
            prop_assert!((norm(&v) - 1.0).abs() < 1e-12);
            prop_assert!(dot(&v, &u1).abs() < 1e-12);
        }
    }

    #[test]
    fn m_spectrum_is_shifted_laplacian(g in graph()) {
        let (mu, _) = oracle::jacobi_eigen(&oracle::m_dense(&g).unwrap()).unwrap();
        let lam = oracle::spectrum(&g).unwrap().eigenvalues;
        // ascending λ ↔ descending μ
        for (m, l) in mu.iter().rev().zip(&lam) {
            prop_assert!((m - (1.0 - l / 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn powers_of_m_decay(g in graph(), k in 0u64..12) {
        let l2 = oracle::lambda2_exact(&g).unwrap();
        for s in sigma_vectors(&g) {
            let v = s.dense(g.n());
            let a = norm(&oracle::dense_power_apply(&g, k, &v).unwrap());
            let b = norm(&oracle::dense_power_apply(&g, k + 1, &v).unwrap());
            prop_assert!(b <= a + 1e-12);
            prop_assert!(a <= (1.0 - l2 / 2.0).powi(k as i32) + 1e-12);
        }
    }

    #[test]
    fn exact_power_ratios_bracket_lambda2(g in graph(), delta in 0.1f64..0.5) {
        let n = g.n();
        let l2 = oracle::lambda2_exact(&g).unwrap();
        let b = power_ratio_bounds(l2, delta, 0.0, n, g.degree_ratio().unwrap()).unwrap();
        let k = b.k_threshold.max(0.0).ceil() as u64;
        prop_assert!(b.premise_two(k));
        // powers through the eigenbasis: repeated dense products would leave
        // roundoff along the null direction, which never decays
        let sp = oracle::spectrum(&g).unwrap();
        let power = |v: &[f64], k: u64| norm(&sp.apply_fn(v, |l| (1.0 - l / 2.0).powi(k as i32), false));
        let mut best = f64::NEG_INFINITY;
        for s in sigma_vectors(&g) {
            let v = s.dense(n);
            let a = power(&v, k);
            if a > 1e-300 {
                let ratio = power(&v, k + 1) / a;
                prop_assert!(b.part_one(ratio), "ratio {ratio} λ₂ {l2}");
                best = best.max(ratio);
            }
        }
        prop_assert!(b.part_two(best), "best {best} λ₂ {l2}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_estimates_stay_in_range(g in graph(), k in 1u64..5, seed in any::<u64>()) {
        let mode = Mode::Practical(PracticalBudget::new(2_000));
        let eps = 0.1;
        let s = sigma_vectors(&g).next().unwrap();
        let e = estimate_norm(&g, k, &s, eps, 0.1, &mode, &RandomSource::new(seed)).unwrap();
        prop_assert!(e.value >= 0.0 && e.value <= 1.0 + eps, "{}", e.value);
    }
}
