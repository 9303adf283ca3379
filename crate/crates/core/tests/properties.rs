use proptest::prelude::*;

use nevgame::dynamics::{integrate, IntegratorConfig};
use nevgame::nev_model::{delta_consumer_no_feedback, delta_manufacturer};
use nevgame::normalize::{normalize_params, NormalizationSpec};
use nevgame::params::{ModelParams, FIELDS};
use nevgame::scenarios::{run_scenario, sweep, Scenario, SweepSpec};
use nevgame::stability::{classify, det, eigenvalues, trace, Classification, Mode};
use nevgame::GameState;

fn params(feedback: bool) -> impl Strategy<Value = ModelParams> {
    (prop::collection::vec(0.0..2.0f64, FIELDS.len()), 0.0..=1.0f64, 0.0..0.99f64, -2.0..2.0f64).prop_map(
        move |(values, alpha, delta, lambda)| {
            let mut p = ModelParams { feedback, ..ModelParams::default() };
            for ((path, _), v) in FIELDS.iter().zip(values) {
                p.set(path, v).unwrap();
            }
            p.consumer.alpha = alpha;
            p.esdg.delta = delta;
            p.coupling_lambda = if feedback { lambda } else { 0.0 };
            p
        },
    )
}

fn short(clamp: bool) -> IntegratorConfig {
    IntegratorConfig { horizon: 40.0, clamp, ..IntegratorConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundaries_are_invariant(p in params(true), y in 0.0..=1.0f64, at_one in any::<bool>()) {
        let x0 = if at_one { 1.0 } else { 0.0 };
        let t = integrate(&p, &GameState::new(x0, y, 0.0), &short(false)).unwrap();
        prop_assert!(t.samples.iter().all(|s| s.x == x0));
        let t = integrate(&p, &GameState::new(y, x0, 0.0), &short(false)).unwrap();
        prop_assert!(t.samples.iter().all(|s| s.y == x0));
    }

    #[test]
    fn unit_square_is_forward_invariant(p in params(true), x in 0.0..=1.0f64, y in 0.0..=1.0f64) {
        let t = integrate(&p, &GameState::new(x, y, 0.0), &short(false)).unwrap();
        prop_assert_eq!(t.clamped_steps, 0);
        prop_assert!(t.samples.iter().all(GameState::in_unit_square));
    }

    #[test]
    fn reports_are_self_consistent(p in params(true)) {
        for r in classify(&p, Mode::Numeric).unwrap() {
            prop_assert_eq!(r.det, det(&r.jacobian));
            prop_assert_eq!(r.trace, trace(&r.jacobian));
            let ev = eigenvalues(&r.jacobian);
            let scale = 1.0 + r.det.abs() + r.trace.abs();
            prop_assert!((ev[0].re + ev[1].re - r.trace).abs() <= 1e-9 * scale);
            let prod_re = ev[0].re * ev[1].re - ev[0].im * ev[1].im;
            prop_assert!((prod_re - r.det).abs() <= 1e-9 * scale);
            if r.classification == Classification::Ess {
                prop_assert!(r.det > 0.0 && r.trace < 0.0);
            }
        }
    }

    #[test]
    fn paper_and_numeric_agree_on_corners(p in params(false)) {
        prop_assume!(delta_manufacturer(&p).abs() > 1e-3 && delta_consumer_no_feedback(&p).abs() > 1e-3);
        let paper = classify(&p, Mode::Paper).unwrap();
        let numeric = classify(&p, Mode::Numeric).unwrap();
        for a in paper.iter().filter(|r| (r.point.x == 0.0 || r.point.x == 1.0) && (r.point.y == 0.0 || r.point.y == 1.0)) {
            let b = numeric.iter().find(|b| b.point == a.point).unwrap();
            prop_assert_eq!(a.classification, b.classification);
        }
    }

    #[test]
    fn signed_normalization_lands_in_range(v in prop::collection::vec(0.0..1e6f64, 8)) {
        let mut raw = ModelParams::default();
        let fields = ["P1", "P2", "e1", "e2", "c1", "c2", "V1", "V2"];
        for (f, x) in fields.iter().zip(&v) {
            raw.set(f, *x).unwrap();
        }
        prop_assume!(v.chunks(2).all(|c| c[0] != c[1]));
        let n = normalize_params(raw, &NormalizationSpec::pairwise()).unwrap().params;
        for f in fields {
            let x = n.get(f).unwrap();
            prop_assert!(x == 1.0 || x == -1.0, "{} = {}", f, x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sweep_points_match_standalone_runs(p in params(true), values in prop::collection::vec(0.0..0.95f64, 1..4)) {
        let base = Scenario {
            id: "prop".into(),
            params: p,
            normalization: None,
            initial: GameState::new(0.3, 0.6, 0.0),
            integrator: short(true),
        };
        let spec = SweepSpec { base: base.clone(), parameter: "delta".into(), values };
        for point in sweep(&spec).unwrap() {
            let alone = run_scenario(&base.with_param("delta", point.value).unwrap()).unwrap();
            prop_assert_eq!(&point.outcome.unwrap().trajectory.samples, &alone.trajectory.samples);
        }
    }
}
