use fasris::blocks::{
    equal_partition, fit_blocks_with_count, fit_blocks_with_floor, structure_distance,
};
use fasris::gamma_outage::DecompositionShapes;
use fasris::numerics::{cholesky_psd, reg_lower_gamma, symmetric_eigenvalues};
use fasris::{
    assemble_block_matrix, block_eigenvalues, build_port_correlation, channel_moments,
    fit_port_blocks, gamma_params, outage_gamma, outage_gaussian, outage_threshold, pearson_eta,
    BlockStructure, FitDomain, GaussianBlockModel, Method, SystemParams,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn structure_strategy() -> impl Strategy<Value = BlockStructure> {
    (
        0.0f64..0.9,
        prop::collection::vec((1usize..5, 0.0f64..=1.0), 1..5),
    )
        .prop_map(|(rho0, blocks)| BlockStructure {
            sizes: blocks.iter().map(|b| b.0).collect(),
            rho: blocks.iter().map(|b| rho0 + b.1 * (1.0 - rho0)).collect(),
            rho0,
            fit_error: 0.0,
        })
}

#[test]
fn incomplete_gamma_is_a_cdf_on_reference_shapes() {
    for &a in &[0.5, 1.0, 5.0, 8.05, 50.0] {
        assert_eq!(reg_lower_gamma(a, 0.0).unwrap(), 0.0);
        let mut last = 0.0;
        for i in 1..=400 {
            let x = i as f64 * (a + 10.0 * a.sqrt() + 10.0) / 400.0;
            let p = reg_lower_gamma(a, x).unwrap();
            assert!((0.0..=1.0).contains(&p) && p >= last, "a={a} x={x}");
            last = p;
        }
        assert!(reg_lower_gamma(a, 50.0 * a + 200.0).unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn fit_keeps_coefficients_in_range_and_error_consistent() {
    for fit in [FitDomain::Jakes, FitDomain::Pearson] {
        for &(m, k, w) in &[
            (5, 2, 1.0),
            (5, 5, 1.0),
            (5, 7, 1.5),
            (10, 10, 0.5),
            (2, 12, 3.0),
            (5, 20, 1.0),
        ] {
            let p = SystemParams::new(m, k, w);
            let s = fit_port_blocks(&p, fit).unwrap();
            let rho0 = pearson_eta(0.0, &p).unwrap();
            assert_eq!(s.rho0, rho0);
            assert_eq!(s.num_ports(), k);
            assert!(
                s.rho.iter().all(|&r| r >= rho0 && r <= 1.0),
                "{fit} {k} {w}: {:?}",
                s.rho
            );
            let corr = build_port_correlation(&p).unwrap();
            let exact = symmetric_eigenvalues(&corr.omega);
            let fitted = symmetric_eigenvalues(&assemble_block_matrix(&s));
            let dist = exact
                .iter()
                .zip(&fitted)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((dist - s.fit_error).abs() < 1e-9, "{fit} {k} {w}");
        }
    }
}

#[test]
fn more_blocks_beat_one_block_at_seven_ports() {
    let p = SystemParams::new(5, 7, 1.0);
    let corr = build_port_correlation(&p).unwrap();
    let rho0 = pearson_eta(0.0, &p).unwrap();
    let single = fit_blocks_with_count(&corr.omega, rho0, 1).unwrap();
    for fit in [FitDomain::Jakes, FitDomain::Pearson] {
        let s = fit_port_blocks(&p, fit).unwrap();
        assert!(
            s.fit_error < single.fit_error,
            "{fit}: {} vs {}",
            s.fit_error,
            single.fit_error
        );
    }
}

#[test]
fn wider_aperture_does_not_raise_mean_block_correlation() {
    for fit in [FitDomain::Pearson, FitDomain::Jakes] {
        for k in [5, 7] {
            let means: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
                .iter()
                .map(|&w| {
                    fit_port_blocks(&SystemParams::new(5, k, w), fit)
                        .unwrap()
                        .mean_intra_rho()
                })
                .collect();
            for pair in means.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-6, "{fit} K={k}: {means:?}");
            }
        }
    }
}

#[test]
fn outage_is_nondecreasing_in_threshold() {
    let p = SystemParams::new(5, 7, 1.0);
    let s = fit_port_blocks(&p, FitDomain::Jakes).unwrap();
    let m = channel_moments(&p);
    let model = GaussianBlockModel {
        mean: m.mean,
        variance: m.variance,
        structure: s.clone(),
    };
    let (mut gamma_last, mut gauss_last) = (0.0, 0.0);
    for i in 1..=50 {
        let lambda = 2.5 * m.mean * i as f64 / 50.0;
        let g = outage_gamma(&p, &s, lambda, 64, 64).unwrap().p_out;
        let n = outage_gaussian(&model, lambda, 64, Method::GaussianVbc)
            .unwrap()
            .p_out;
        assert!(g >= gamma_last - 1e-12, "gamma at {lambda}");
        assert!(n >= gauss_last - 1e-12, "gaussian at {lambda}");
        gamma_last = g;
        gauss_last = n;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incomplete_gamma_monotone(a in 0.05f64..200.0, x in 0.0f64..400.0, dx in 0.0f64..10.0) {
        let lo = reg_lower_gamma(a, x).unwrap();
        let hi = reg_lower_gamma(a, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-15);
    }

    #[test]
    fn cholesky_round_trip(n in 1usize..9, entries in prop::collection::vec(-1.0f64..1.0, 81), rank in 1usize..9) {
        let r = rank.min(n);
        let b = DMatrix::from_fn(n, r, |i, j| entries[i * 9 + j]);
        let a = &b * b.transpose();
        let l = cholesky_psd(&a).unwrap();
        let err = (&l * l.transpose() - &a).norm();
        prop_assert!(err <= 1e-6 * a.norm().max(1e-300), "err {err}");
        for i in 0..n {
            for j in i + 1..n {
                prop_assert_eq!(l[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn block_spectrum_matches_dense(s in structure_strategy()) {
        let fast = block_eigenvalues(&s);
        let dense = symmetric_eigenvalues(&assemble_block_matrix(&s));
        prop_assert_eq!(fast.len(), dense.len());
        for (a, b) in fast.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        for (&l, &r) in s.sizes.iter().zip(&s.rho) {
            let count = fast.iter().filter(|&&v| (v - (1.0 - r)).abs() < 1e-9).count();
            prop_assert!(count + 1 >= l);
        }
    }

    #[test]
    fn fit_recovers_exact_block_matrix(k in 2usize..12, d in 1usize..5, rho0 in 0.0f64..0.8, u in prop::collection::vec(0.0f64..=1.0, 4)) {
        let d = d.min(k);
        let s = BlockStructure {
            sizes: equal_partition(k, d),
            rho: u[..d].iter().map(|x| rho0 + x * (1.0 - rho0)).collect(),
            rho0,
            fit_error: 0.0,
        };
        let omega = assemble_block_matrix(&s);
        let fitted = fit_blocks_with_floor(&omega, rho0).unwrap();
        prop_assert!(fitted.fit_error <= 1e-9, "{:?} -> {:?}", s, fitted);
        prop_assert!(structure_distance(&omega, &fitted) <= 1e-9);
    }

    #[test]
    fn shapes_add_up(m in 1usize..60, s in structure_strategy()) {
        let gp = gamma_params(&SystemParams::new(m, s.num_ports(), 1.0));
        let shapes = DecompositionShapes::new(&gp, &s);
        for b in &shapes.blocks {
            prop_assert!(b.alpha_r >= 0.0 && b.alpha_w >= 0.0);
            prop_assert!((b.alpha_r + b.alpha_w + shapes.alpha_t - gp.shape).abs() <= 1e-12 * gp.shape);
        }
    }

    #[test]
    fn eta_monotone(g in 0.0f64..1.0, dg in 0.0f64..0.3) {
        let p = SystemParams::default();
        let lo = pearson_eta(g, &p).unwrap();
        let hi = pearson_eta((g + dg).min(1.0), &p).unwrap();
        prop_assert!(hi >= lo - 1e-9);
        prop_assert!(lo > 0.0 && hi <= 1.0);
    }

    #[test]
    fn threshold_monotone(power in 0.1f64..10.0, rate in 0.1f64..5.0, bump in 0.01f64..1.0) {
        let p = SystemParams { tx_power: power, rate, ..Default::default() };
        let louder = SystemParams { tx_power: power + bump, ..p };
        let faster = SystemParams { rate: rate + bump, ..p };
        prop_assert!(outage_threshold(&louder) < outage_threshold(&p));
        prop_assert!(outage_threshold(&faster) > outage_threshold(&p));
    }
}
