use approx::assert_abs_diff_eq;
use lnt_core::quadrature::QuadSettings;
use lnt_core::MorseWell;
use nalgebra::DMatrix;

/// Composite Simpson rule on a uniform grid (odd number of points).
fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n % 2 == 1);
    let mut s = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

fn uniform(a: f64, b: f64, n: usize) -> (Vec<f64>, f64) {
    let h = (b - a) / (n - 1) as f64;
    ((0..n).map(|i| a + h * i as f64).collect(), h)
}

#[test]
fn energies_follow_closed_form_and_increase() {
    for kappa in [48.0, 85.2661870503597, 160.0] {
        let n = 9;
        let w = MorseWell::new(kappa, 1000.0, n).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for v in 0..n {
            let x = v as f64 + 0.5;
            let e = w.energy(v).unwrap();
            assert_abs_diff_eq!(e, x - x * x / kappa, epsilon = 1e-12);
            assert!(e > prev);
            prev = e;
        }
    }
}

#[test]
fn gram_matrix_is_identity() {
    for kappa in [48.0, 85.0, 160.0] {
        let m = MorseWell::new(kappa, 1000.0, 9).unwrap().matrices().unwrap();
        let err = (&m.gram - DMatrix::<f64>::identity(9, 9)).abs().max();
        assert!(err < 1e-8, "kappa {kappa}: gram error {err:e}");
    }
}

#[test]
fn wavefunctions_normalized_by_independent_quadrature() {
    let (grid, h) = uniform(-3.0, 12.0, 40_001);
    for kappa in [48.0, 160.0] {
        let w = MorseWell::new(kappa, 1000.0, 9).unwrap();
        let psi0 = w.wavefunction(0, &grid).unwrap();
        let psi1 = w.wavefunction(1, &grid).unwrap();
        let psi8 = w.wavefunction(8, &grid).unwrap();
        let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>();
        assert_abs_diff_eq!(simpson(&sq(&psi0, &psi0), h), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(simpson(&sq(&psi8, &psi8), h), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(simpson(&sq(&psi0, &psi1), h), 0.0, epsilon = 1e-8);
    }
}

#[test]
fn deep_well_ground_state_approaches_gaussian() {
    // Pointwise deviation from the harmonic ground state in x = q̄√(κ/2)
    // is the anharmonic skew, which falls off like 1/√κ.
    let gauss_dev = |kappa: f64| {
        let w = MorseWell::new(kappa, 1000.0, 1).unwrap();
        let xs: Vec<f64> = (0..=800).map(|i| -4.0 + 0.01 * i as f64).collect();
        let qs: Vec<f64> = xs.iter().map(|x| x / (kappa / 2.0).sqrt()).collect();
        let psi = w.wavefunction(0, &qs).unwrap();
        let scale = (kappa / 2.0).powf(0.25);
        xs.iter()
            .zip(&psi)
            .map(|(x, p)| (p / scale - std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp()).abs())
            .fold(0.0, f64::max)
    };
    let d4k = gauss_dev(4000.0);
    let d16k = gauss_dev(16000.0);
    assert!(d4k < 1e-2, "{d4k}");
    assert_abs_diff_eq!(d4k / d16k, 2.0, epsilon = 0.02);
    assert!(gauss_dev(2.56e5) < 1e-3);
}

#[test]
fn harmonic_limit_matrix_elements() {
    let kappa: f64 = 4000.0;
    let w = MorseWell::new(kappa, 1000.0, 4).unwrap();
    let y = w.matrix_y().unwrap();
    let m = w.matrix_p().unwrap();
    assert_abs_diff_eq!(y[(0, 1)].abs() * kappa.sqrt(), 1.0, epsilon = 0.01);
    assert_abs_diff_eq!(m[(0, 1)].abs() * 2.0 / kappa.sqrt(), 1.0, epsilon = 0.01);
    assert!(y[(0, 0)] > 0.0);
}

#[test]
fn harmonic_ladder_structure() {
    for kappa in [1e3f64, 1e4] {
        let n = 6;
        let w = MorseWell::new(kappa, 1000.0, n).unwrap();
        let y = w.matrix_y().unwrap() * kappa.sqrt();
        let m = w.matrix_p().unwrap() * (2.0 / kappa.sqrt());
        for i in 0..n {
            for j in 0..n {
                if j == i + 1 {
                    let ladder = (j as f64).sqrt();
                    assert_abs_diff_eq!(y[(i, j)].abs(), ladder, epsilon = 0.01 * ladder);
                    assert_abs_diff_eq!(m[(i, j)].abs(), ladder, epsilon = 0.01 * ladder);
                } else if i != j + 1 {
                    // anharmonic corrections shrink like 1/√κ
                    let bound = 1.5 * (i + j + 1) as f64 / kappa.sqrt();
                    assert!(y[(i, j)].abs() < bound, "kappa {kappa} Y[{i},{j}] = {}", y[(i, j)]);
                    assert!(m[(i, j)].abs() < bound, "kappa {kappa} M[{i},{j}] = {}", m[(i, j)]);
                }
            }
        }
    }
}

#[test]
fn position_momentum_commutator_on_interior_block() {
    // [d/dq̄, ŷ] = e^{−q̄} = 1 − ŷ, exact only away from the truncation edge,
    // so the identity is checked on the first 9 levels of a larger basis.
    // κ = 48 holds only 24 bound states; the missing continuum limits it.
    for (kappa, n_aux, tol) in [(160.0, 30, 1e-6), (85.0, 30, 1e-6), (48.0, 23, 1e-3)] {
        let w = MorseWell::new(kappa, 1000.0, n_aux).unwrap();
        let y = w.matrix_y().unwrap();
        let m = w.matrix_p().unwrap();
        let comm = &m * &y - &y * &m;
        let target = DMatrix::<f64>::identity(n_aux, n_aux) - &y;
        let err = (comm - target).view((0, 0), (9, 9)).abs().max();
        assert!(err < tol, "kappa {kappa}: commutator error {err:e}");
    }
}

#[test]
fn matrices_stable_under_refinement() {
    for kappa in [48.0, 160.0] {
        let w = MorseWell::new(kappa, 1000.0, 9).unwrap();
        let base = w.compute_matrices(QuadSettings::default()).unwrap();
        let fine = w
            .compute_matrices(QuadSettings {
                abs_tol: 1e-13,
                initial_panels: 1024,
                ..QuadSettings::default()
            })
            .unwrap();
        assert!((&base.y - &fine.y).abs().max() < 1e-8);
        assert!((&base.m - &fine.m).abs().max() < 1e-8);
    }
}

#[test]
fn cached_matrices_match_fresh_ones() {
    let w = MorseWell::new(72.5, 1500.0, 7).unwrap();
    let cached = w.matrices().unwrap();
    let again = MorseWell::new(72.5, 900.0, 7).unwrap().matrices().unwrap();
    assert_eq!(cached.y, again.y);
    let fresh = w.compute_matrices(QuadSettings::default()).unwrap();
    assert!((&cached.m - &fresh.m).abs().max() < 1e-9);
}
