use nlcomp_core::simulator::{ClassifyOptions, InitialData, ProfileSpec, RunOptions};
use nlcomp_core::spectral::critical_length;
use nlcomp_core::thresholds::{build_scenario, find_mu_star, MuStarOptions, MuStarStatus, Scenario};
use nlcomp_core::{Error, Kernel, KernelSpec, ModelParams};

fn uniform() -> Kernel {
    KernelSpec::Uniform { radius: 1.0 }.build().unwrap()
}

fn scenario(params: ModelParams, h0: f64, v0: f64, horizon: f64) -> Scenario {
    let j = uniform();
    Scenario {
        name: "probe".into(),
        params,
        init: InitialData::symmetric(
            h0,
            ProfileSpec::Parabola {
                height: 0.5,
                left: None,
                right: None,
            },
            ProfileSpec::Constant { value: v0 },
        ),
        j1: j.clone(),
        j2: j,
        run: RunOptions::new(1.0 / 16.0, horizon),
        classify: ClassifyOptions::default(),
        expectations: Vec::new(),
        notes: Vec::new(),
    }
}

#[test]
fn wide_habitat_spreads_for_every_mu() {
    let p = ModelParams {
        k: 0.5,
        d1: 2.0,
        ..Default::default()
    };
    let l = critical_length(2.0, &uniform(), 0.5).unwrap().length;
    let sc = scenario(p, 0.55 * l, 1.0, 100.0);
    let r = find_mu_star(&sc, (0.05, 20.0), &MuStarOptions::default()).unwrap();
    assert_eq!(r.status, MuStarStatus::BelowBracket);
}

#[test]
fn established_native_blocks_every_mu() {
    let p = ModelParams {
        k: 2.0,
        b: 0.5,
        ..Default::default()
    };
    let sc = scenario(p, 1.0, 0.8, 60.0);
    let r = find_mu_star(&sc, (0.5, 50.0), &MuStarOptions::default()).unwrap();
    assert_eq!(r.status, MuStarStatus::AboveBracket);
    assert!(r.monotone_consistent);
}

#[test]
fn prescan_narrows_the_same_bracket() {
    let j = uniform();
    let p = ModelParams {
        k: 0.5,
        d1: 2.0,
        ..Default::default()
    };
    let l1 = critical_length(2.0, &j, 1.0).unwrap().length;
    let sc = scenario(p, 0.25 * l1, 1.0, 100.0);
    let opts = MuStarOptions {
        prescan: 4,
        verify_doubling: false,
        ..Default::default()
    };
    let plain = find_mu_star(&sc, (0.1, 50.0), &MuStarOptions::default()).unwrap();
    let scanned = find_mu_star(&sc, (0.1, 50.0), &opts).unwrap();
    assert_eq!(scanned.status, MuStarStatus::Bracketed);
    assert!(scanned.mu_lo < plain.mu_hi && plain.mu_lo < scanned.mu_hi);
    assert!(scanned.monotone_consistent);
}

#[test]
fn strict_mode_refuses_undecided_runs() {
    let p = ModelParams {
        k: 0.5,
        d1: 2.0,
        ..Default::default()
    };
    let l1 = critical_length(2.0, &uniform(), 1.0).unwrap().length;
    let mut sc = scenario(p, 0.25 * l1, 1.0, 2.0);
    sc.run.probe_interval = 0.25;
    let opts = MuStarOptions {
        strict: true,
        horizon_cap: 1.0,
        ..Default::default()
    };
    let err = find_mu_star(&sc, (0.1, 50.0), &opts).unwrap_err();
    assert!(matches!(err, Error::UndecidableAtCap { .. }), "{err:?}");
}

#[test]
fn one_sided_template_accepts_the_arithmetic() {
    let j = uniform();
    let p = ModelParams {
        k: 3.0,
        b: 0.5,
        d1: 4.0,
        mu: 200.0,
        ..Default::default()
    };
    let sc = build_scenario("Theorem1_4", &p, &j, &j).unwrap();
    assert_eq!(sc.init.g0(), -6.0);
}
