use ordshrink_core::oracle::{brute_force_isotonic, isotonic_objective};
use ordshrink_core::penalty::{difference_matrix, local_annihilator};
use ordshrink_core::shrinkage::{
    isotonic_decreasing_fit, ms_adapt, ms_risk_estimate, st_adapt, st_risk_estimate, universal_cap,
};
use ordshrink_core::{compare, Family, FitConfig, Layout, PenaltyBasis, PenaltySelector};
use proptest::prelude::*;

fn nonincreasing_grid(p: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(p: usize, cap: usize, steps: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() == p {
            out.push(prefix.iter().map(|&k| k as f64 / steps as f64).collect());
            return;
        }
        for k in 0..=cap {
            prefix.push(k);
            rec(p, k, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(p, steps, steps, &mut Vec::new(), &mut out);
    out
}

fn unbalanced_layout(levels: usize, seed: &[(u8, f64)]) -> Layout {
    let groups = (0..levels)
        .map(|i| {
            let (count, base) = seed[i % seed.len()];
            let c = 1 + (count as usize + i) % 4;
            (0..c)
                .map(|j| base + 0.37 * j as f64 - 0.11 * i as f64)
                .collect()
        })
        .collect();
    let levels = (0..levels).map(|i| (i as f64).powf(1.3)).collect();
    Layout::new(levels, groups).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pava_matches_grid_oracle(
        g in prop::collection::vec(0u8..=10, 1..=6),
        w in prop::collection::vec(1u8..=4, 6),
    ) {
        let g: Vec<f64> = g.iter().map(|&v| v as f64 / 10.0).collect();
        let w: Vec<f64> = w[..g.len()].iter().map(|&v| v as f64).collect();
        let k = isotonic_decreasing_fit(&g, &w).unwrap();
        let brute = brute_force_isotonic(&g, &w, 0.1).unwrap();
        prop_assert!(k.windows(2).all(|p| p[0] >= p[1]));
        prop_assert!(
            isotonic_objective(&g, &w, &k) <= isotonic_objective(&g, &w, &brute) + 1e-9
        );
    }

    #[test]
    fn ms_adapt_beats_every_grid_vector(
        z in prop::collection::vec(-3.0f64..3.0, 1..=3),
        sigma2 in 0.05f64..2.0,
    ) {
        let plan = ms_adapt(&z, sigma2);
        let best = ms_risk_estimate(&plan.f, &z, sigma2);
        prop_assert!(plan.f.windows(2).all(|p| p[0] >= p[1]));
        prop_assert!(plan.f.iter().all(|f| (0.0..=1.0).contains(f)));
        for f in nonincreasing_grid(z.len(), 40) {
            prop_assert!(best <= ms_risk_estimate(&f, &z, sigma2) + 1e-9);
        }
        prop_assert!(best <= sigma2 + 1e-12);
    }

    #[test]
    fn st_adapt_beats_every_threshold(
        z in prop::collection::vec(-4.0f64..4.0, 1..40),
        sigma2 in 0.05f64..2.0,
        ts in prop::collection::vec(0.0f64..1.0, 50),
    ) {
        let cap = universal_cap(z.len(), sigma2);
        let plan = st_adapt(&z, sigma2, cap).unwrap();
        let t_hat = plan.threshold.unwrap();
        prop_assert!(t_hat <= cap);
        let best = st_risk_estimate(t_hat, &z, sigma2);
        for u in ts {
            prop_assert!(best <= st_risk_estimate(u * cap, &z, sigma2) + 1e-12);
        }
        for a in z.iter().map(|v| v.abs()).filter(|&a| a <= cap) {
            prop_assert!(best <= st_risk_estimate(a, &z, sigma2) + 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_with_parseval(
        p in 3usize..14,
        seed in prop::collection::vec((0u8..5, -2.0f64..2.0), 4),
        d in 1usize..3,
        annihilator in any::<bool>(),
    ) {
        let layout = unbalanced_layout(p, &seed);
        let pm = if annihilator {
            local_annihilator(layout.levels(), d).unwrap()
        } else {
            difference_matrix(p, d).unwrap()
        };
        let basis = PenaltyBasis::build(&layout, &pm).unwrap();
        let g = basis.rotation();
        for i in 0..p {
            for j in 0..p {
                let dot: f64 = (0..p).map(|k| g[k * p + i] * g[k * p + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() < 1e-9);
            }
        }
        let energy: f64 = basis.z().iter().map(|v| v * v).sum::<f64>() + basis.residual_ss();
        prop_assert!((energy - basis.total_ss()).abs() <= 1e-9 * basis.total_ss().max(1.0));
    }

    #[test]
    fn hybrid_dominates_on_a_shared_basis(
        y in prop::collection::vec(-2.0f64..2.0, 8..30),
        d in 1usize..4,
    ) {
        let layout = Layout::from_sequence(&y).unwrap();
        let config = FitConfig::default().with_penalty(PenaltySelector::Difference(d));
        let report = compare(&layout, &config).unwrap();
        let risk = |f| report.row(f).unwrap().estimated_risk;
        prop_assert!(risk(Family::Hs) <= risk(Family::Ms).min(risk(Family::St)) + 1e-10);
        prop_assert!(risk(Family::Ms) <= risk(Family::Ls) + 1e-10);
        prop_assert!(risk(Family::Pls) >= risk(Family::Ms) - 1e-10);
    }

    #[test]
    fn scale_equivariance(
        y in prop::collection::vec(-2.0f64..2.0, 6..25),
        c in 0.1f64..20.0,
    ) {
        let a = compare(&Layout::from_sequence(&y).unwrap(), &FitConfig::default()).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
        let b = compare(&Layout::from_sequence(&scaled).unwrap(), &FitConfig::default()).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            let target = c * c * ra.estimated_risk;
            prop_assert!((rb.estimated_risk - target).abs() <= 1e-8 * target.abs().max(1e-12));
            for (x, y) in ra.mu_hat.iter().zip(&rb.mu_hat) {
                prop_assert!((c * x - y).abs() <= 1e-8 * y.abs().max(1.0));
            }
        }
    }
}
