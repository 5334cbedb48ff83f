use approx::assert_abs_diff_eq;
use lnt_core::classical::initial_conditions;
use lnt_core::{
    lyapunov_estimate, poincare_section, ClassicalSystem, Integrator, LyapunovOutcome, LyapunovSpec, MoleculeParams,
    PhaseState, SectionSpec,
};
use proptest::prelude::*;

fn water() -> ClassicalSystem {
    ClassicalSystem::from_params(&MoleculeParams::water()).unwrap()
}

/// Reference solution by many fine fourth-order substeps.
fn fine(sys: &ClassicalSystem, s: &PhaseState, h: f64) -> PhaseState {
    let n = 200;
    let mut x = *s;
    for _ in 0..n {
        x = sys.advance(&x, h / n as f64, Integrator::Yoshida4).unwrap();
    }
    x
}

fn dist(a: &PhaseState, b: &PhaseState) -> f64 {
    ((a.q1 - b.q1).powi(2) + (a.q2 - b.q2).powi(2) + (a.p1 - b.p1).powi(2) + (a.p2 - b.p2).powi(2)).sqrt()
}

#[test]
fn small_oscillation_period_is_two_pi() {
    let sys = ClassicalSystem::new(1e6, 0.0, 0.0).unwrap();
    let h = 1e-3;
    let mut s = PhaseState::new(0.0, 0.0, 1.0, 0.0);
    let mut ups = Vec::new();
    let mut time = 0.0;
    while ups.len() < 4 {
        let next = sys.advance(&s, h, Integrator::Yoshida4).unwrap();
        if s.q1 < 0.0 && next.q1 >= 0.0 {
            ups.push(time + h * (-s.q1) / (next.q1 - s.q1));
        }
        s = next;
        time += h;
    }
    let period = (ups[3] - ups[0]) / 3.0;
    assert_abs_diff_eq!(period / std::f64::consts::TAU, 1.0, epsilon = 1e-3);
}

#[test]
fn leapfrog_local_error_is_third_order() {
    let sys = water();
    let s = PhaseState::new(0.3, -0.2, 2.0, -1.5);
    let err = |h: f64| dist(&sys.step(&s, h).unwrap(), &fine(&sys, &s, h));
    let ratio = err(0.04) / err(0.02);
    assert!((6.5..9.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn yoshida_local_error_is_fifth_order() {
    let sys = water();
    let s = PhaseState::new(0.3, -0.2, 2.0, -1.5);
    let err = |h: f64| dist(&sys.advance(&s, h, Integrator::Yoshida4).unwrap(), &fine(&sys, &s, h));
    let ratio = err(0.08) / err(0.04);
    assert!((24.0..40.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn leapfrog_map_preserves_phase_volume() {
    let sys = water();
    let s = PhaseState::new(0.4, -0.3, 3.0, 1.0);
    let h = 0.01;
    let eps = 1e-5;
    let arr = |x: &PhaseState| [x.q1, x.q2, x.p1, x.p2];
    let mut jac = nalgebra::Matrix4::<f64>::zeros();
    for k in 0..4 {
        let mut plus = arr(&s);
        let mut minus = arr(&s);
        plus[k] += eps;
        minus[k] -= eps;
        let fp = arr(&sys.step(&PhaseState::new(plus[0], plus[1], plus[2], plus[3]), h).unwrap());
        let fm = arr(&sys.step(&PhaseState::new(minus[0], minus[1], minus[2], minus[3]), h).unwrap());
        for r in 0..4 {
            jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * eps);
        }
    }
    assert_abs_diff_eq!(jac.determinant(), 1.0, epsilon = 1e-10);
}

#[test]
fn uncoupled_sections_conserve_single_oscillator_energy() {
    let sys = ClassicalSystem::new(48.0, 0.0, 0.0).unwrap();
    let spec = SectionSpec {
        ic_grid: (5, 5),
        max_crossings: 60,
        ..SectionSpec::new(8.0)
    };
    let res = poincare_section(&spec, &sys).unwrap();
    assert_eq!(res.escaped, 0);
    let ics = initial_conditions(&spec, &sys).unwrap();
    assert_eq!(ics.len(), res.initial_conditions);
    for (id, ic) in ics.iter().enumerate() {
        let e0 = sys.single_energy(ic.q1, ic.p1);
        let pts: Vec<_> = res.points.iter().filter(|p| p.trajectory == id).collect();
        assert!(pts.len() >= 50);
        for p in pts {
            assert!((sys.single_energy(p.q1, p.p1) - e0).abs() < 1e-6 * e0.max(1.0));
        }
    }
}

#[test]
fn section_points_lie_on_the_shell() {
    let sys = water();
    let spec = SectionSpec {
        ic_grid: (4, 4),
        max_crossings: 40,
        ..SectionSpec::new(8.0)
    };
    let res = poincare_section(&spec, &sys).unwrap();
    assert!(!res.points.is_empty());
    for p in &res.points {
        assert!((sys.energy(&p.state) - 8.0).abs() < 1e-6 * 8.0);
        assert!(p.state.q2.abs() < 1e-8);
        // crossed upward: dq̄₂/dτ ∝ p̄₂ + t p̄₁
        assert!(p.state.p2 + sys.t() * p.state.p1 > 0.0);
    }
}

#[test]
fn leapfrog_energy_has_no_secular_drift() {
    let sys = water();
    let ic = initial_conditions(&SectionSpec::new(8.0), &sys).unwrap()[40];
    let e0 = sys.energy(&ic);
    let window = 10_000;
    let (mut head, mut tail) = (0.0, 0.0);
    let mut s = ic;
    let steps = 100_000;
    for k in 0..steps {
        s = sys.step(&s, 0.01).unwrap();
        let e = sys.energy(&s);
        if k < window {
            head += e;
        } else if k >= steps - window {
            tail += e;
        }
    }
    let drift = ((tail - head) / window as f64 / e0).abs();
    assert!(drift < 1e-6, "drift {drift:e}");
}

#[test]
fn uncoupled_motion_is_regular() {
    let sys = ClassicalSystem::new(48.0, 0.0, 0.0).unwrap();
    let ics = initial_conditions(&SectionSpec { ic_grid: (3, 3), ..SectionSpec::new(8.0) }, &sys).unwrap();
    for ic in ics.iter().step_by(2) {
        match lyapunov_estimate(ic, &sys, &LyapunovSpec::default()).unwrap() {
            LyapunovOutcome::Bounded(l) => assert!(l < 1e-3, "lambda {l}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn near_harmonic_coupled_motion_is_regular() {
    // a deep well makes the coupled problem nearly linear, hence integrable
    let sys = ClassicalSystem::new(1e4, -0.012, -0.015).unwrap();
    let ic = PhaseState::new(0.0, 0.0, 3.0, 1.0);
    let l = lyapunov_estimate(&ic, &sys, &LyapunovSpec::default()).unwrap().exponent().unwrap();
    assert!(l < 1e-3, "lambda {l}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exchange_commutes_with_the_step(
        q1 in -0.5f64..1.5, q2 in -0.5f64..1.5, p1 in -5.0f64..5.0, p2 in -5.0f64..5.0,
        x_f in -0.5f64..0.5, t in -0.6f64..0.6,
    ) {
        let sys = ClassicalSystem::new(48.0, x_f, t).unwrap();
        let s = PhaseState::new(q1, q2, p1, p2);
        for integ in [Integrator::Leapfrog, Integrator::Yoshida4] {
            let a = sys.advance(&s.swapped(), 0.01, integ).unwrap();
            let b = sys.advance(&s, 0.01, integ).unwrap().swapped();
            prop_assert!(dist(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn time_reversal_returns_to_start(
        q1 in -0.5f64..1.5, q2 in -0.5f64..1.5, p1 in -5.0f64..5.0, p2 in -5.0f64..5.0,
    ) {
        let sys = water();
        let s = PhaseState::new(q1, q2, p1, p2);
        let mut x = s;
        for _ in 0..50 {
            x = sys.advance(&x, 0.01, Integrator::Yoshida4).unwrap();
        }
        for _ in 0..50 {
            x = sys.advance(&x, -0.01, Integrator::Yoshida4).unwrap();
        }
        prop_assert!(dist(&x, &s) < 1e-10);
    }
}
