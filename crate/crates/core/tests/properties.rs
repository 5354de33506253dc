use proptest::prelude::*;

use nlcomp_core::simulator::{
    boundary_flux, dt_bound, run, FreeBoundaryState, Grid, InitialData, ProfileSpec, RunOptions, Scratch, Side,
    Simulator,
};
use nlcomp_core::spectral::{nodes_for, principal_eigenvalue};
use nlcomp_core::{Kernel, KernelSpec, ModelParams};

fn kernel_strategy() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        (0.5..3.0f64).prop_map(|radius| KernelSpec::Uniform { radius }),
        (0.5..3.0f64).prop_map(|radius| KernelSpec::Triangle { radius }),
        (0.2..1.0f64, 2.0..4.0f64).prop_map(|(sigma, n)| KernelSpec::TruncatedGaussian { sigma, radius: n * sigma }),
        (0.2..1.0f64).prop_map(|sigma| KernelSpec::Gaussian { sigma }),
    ]
}

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.1..3.0f64, 0.1..3.0f64, 0.1..3.0f64, 0.1..3.0f64, 0.2..2.0f64, 0.1..20.0f64)
        .prop_map(|(d1, d2, k, b, gamma, mu)| ModelParams { d1, d2, k, b, gamma, mu })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernels_are_symmetric_with_unit_mass(spec in kernel_strategy()) {
        let k = spec.build().unwrap();
        prop_assert!((k.mass() - 1.0).abs() <= 1e-8);
        let s = k.support_radius();
        for i in 0..=200 {
            let x = s * i as f64 / 150.0;
            prop_assert_eq!(k.eval(x), k.eval(-x));
            prop_assert!(k.eval(x) >= 0.0);
            if x > s {
                prop_assert_eq!(k.eval(x), 0.0);
            }
        }
        let d = k.discretize(s / 16.0);
        prop_assert!((d.mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mgf_is_even_convex_and_above_one(spec in kernel_strategy(), l in 0.05..3.0f64) {
        let k = spec.build().unwrap();
        let l = l / k.support_radius();
        let (m0, mp, mm) = (k.mgf(0.0).unwrap(), k.mgf(l).unwrap(), k.mgf(-l).unwrap());
        prop_assert!((mp - mm).abs() <= 1e-14 * mp);
        prop_assert!(mp > 1.0);
        prop_assert!(mp + mm - 2.0 * m0 > 0.0);
        let m2 = k.mgf(2.0 * l).unwrap();
        prop_assert!(m2 + m0 - 2.0 * mp > 0.0);
    }

    #[test]
    fn principal_eigenvalue_is_bracketed_and_monotone(
        d1 in 0.2..3.0f64,
        spec in kernel_strategy(),
        l in 0.2..6.0f64,
        a in -5.0..5.0f64,
    ) {
        let k = spec.build().unwrap();
        let l = l * k.support_radius();
        let short = principal_eigenvalue(d1, &k, a, l, nodes_for(&k, 2.0 * l, 16.0)).unwrap();
        let long = principal_eigenvalue(d1, &k, a, 2.0 * l, nodes_for(&k, 2.0 * l, 16.0) * 2 - 1).unwrap();
        prop_assert!(short.lambda_p > -d1 && short.lambda_p < 0.0);
        prop_assert!(long.lambda_p > short.lambda_p);
        prop_assert!(short.phi[1..short.n - 1].iter().all(|&p| p > 0.0));
        prop_assert!(short.residual <= 1e-10 * (d1 + short.lambda_p.abs()));
    }

    #[test]
    fn steps_keep_signs_bounds_and_front_order(p in params_strategy(), seed in 0u64..1000, h0 in 0.5..3.0f64) {
        let k = KernelSpec::Uniform { radius: 1.0 }.build().unwrap();
        let grid = Grid::covering(1.0 / 16.0, 12.0).unwrap();
        let u_sup = 1.0 + (seed % 7) as f64 * 0.2;
        let v_sup = 1.0 + (seed % 5) as f64 * 0.3;
        let init = InitialData::symmetric(
            h0,
            ProfileSpec::Parabola { height: u_sup, left: None, right: None },
            ProfileSpec::Bump { height: v_sup, center: (seed % 3) as f64 - 1.0, radius: 4.0 },
        );
        let sim = Simulator::new(p, &k, &k, grid, u_sup, v_sup).unwrap();
        let mut s = FreeBoundaryState::initial(&init, grid, false).unwrap();
        let mut scratch = Scratch::default();
        let dt = sim.dt_max();
        let mut steps = 0;
        let edge = 12.0 - sim.guard() - 1.0;
        while steps < 200 && s.h < edge && s.g > -edge {
            let (g, h) = (s.g, s.h);
            let u_max = s.u_max();
            sim.advance(&mut s, dt, &mut scratch).unwrap();
            prop_assert!(s.h >= h && s.g <= g);
            // once u is tiny the increment can be below one ulp of h and round up
            let bound = dt * p.mu * u_max * k.first_moment_tail().unwrap() * (1.0 + 1e-12);
            prop_assert!(s.h - h <= bound + f64::EPSILON * s.h);
            prop_assert!(s.u.iter().all(|&u| (0.0..=u_sup + 1e-12).contains(&u)));
            prop_assert!(s.v.iter().all(|&v| (0.0..=v_sup + 1e-12).contains(&v)));
            if let Some((lo, hi)) = grid.window(g, h) {
                let outside = s.u.iter().enumerate().all(|(i, &u)| (i >= lo && i <= hi) || u == 0.0);
                prop_assert!(outside);
            }
            steps += 1;
        }
    }

    #[test]
    fn fluxes_are_mirror_symmetric(spec in kernel_strategy(), h in 1.0..4.0f64, seed in any::<u64>()) {
        let k = spec.build().unwrap();
        let grid = Grid::covering(k.support_radius() / 16.0, 20.0).unwrap();
        let c = grid.center;
        let mut u = vec![0.0; grid.len()];
        let mut state = seed;
        for m in 0..c {
            if grid.x(c + m) < h {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let val = (state >> 11) as f64 / (1u64 << 53) as f64;
                u[c + m] = val;
                u[c - m] = val;
            }
        }
        let right = boundary_flux(&k, &grid, &u, -h, h, Side::Right);
        let left = boundary_flux(&k, &grid, &u, -h, h, Side::Left);
        prop_assert_eq!(right, left);
        prop_assert!(right >= 0.0);
    }

    #[test]
    fn larger_mu_spreads_at_least_as_far(mu in 0.5..5.0f64, factor in 1.1..3.0f64, k in 0.3..2.0f64) {
        let j = KernelSpec::Uniform { radius: 1.0 }.build().unwrap();
        let init = InitialData::symmetric(
            1.5,
            ProfileSpec::Parabola { height: 0.8, left: None, right: None },
            ProfileSpec::Constant { value: 0.7 },
        );
        let lo = ModelParams { k, mu, ..Default::default() };
        let hi = lo.with_mu(mu * factor);
        let dt = dt_bound(&lo, 1.0, 1.0);
        let opts = RunOptions {
            x_max: Some(30.0),
            dt: Some(dt),
            probe_interval: 1.0,
            snapshot_times: (1..=15).map(|i| i as f64).collect(),
            ..RunOptions::new(1.0 / 16.0, 15.0)
        };
        let a = run(&init, &hi, &j, &j, &opts).unwrap();
        let b = run(&init, &lo, &j, &j, &opts).unwrap();
        for (x, y) in a.probes.iter().zip(&b.probes) {
            prop_assert!(x.h >= y.h - 1e-8 && x.g <= y.g + 1e-8);
        }
        for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
            prop_assert!(x.u.iter().zip(&y.u).all(|(p, q)| p >= &(q - 1e-8)));
        }
    }

    #[test]
    fn windows_hold_exactly_the_interior_nodes(g in -5.0..0.0f64, w in 0.1..8.0f64) {
        let grid = Grid::covering(0.1, 10.0).unwrap();
        let h = g + w;
        let inside: Vec<usize> = (0..grid.len()).filter(|&i| grid.x(i) > g && grid.x(i) < h).collect();
        match grid.window(g, h) {
            Some((lo, hi)) => prop_assert_eq!((lo..=hi).collect::<Vec<_>>(), inside),
            None => prop_assert!(inside.is_empty()),
        }
    }
}

#[test]
fn symmetric_run_has_matching_front_speeds() {
    let k: Kernel = KernelSpec::Uniform { radius: 1.0 }.build().unwrap();
    let init = InitialData::symmetric(
        2.0,
        ProfileSpec::Parabola {
            height: 0.5,
            left: None,
            right: None,
        },
        ProfileSpec::Constant { value: 1.0 },
    );
    let p = ModelParams {
        d1: 0.3,
        mu: 4.0,
        ..Default::default()
    };
    let traj = run(&init, &p, &k, &k, &RunOptions::new(1.0 / 16.0, 80.0)).unwrap();
    let end = traj.probes.last().unwrap();
    assert!(((end.h / end.t) + (end.g / end.t)).abs() <= 0.02 * end.h / end.t);
    for w in traj.probes.windows(2) {
        assert!(w[1].h >= w[0].h && w[1].g <= w[0].g);
    }
}
