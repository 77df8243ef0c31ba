//! Cross-checks against independent brute-force computations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use qmeasure::bathmodel::{BathCorrelator, Preset, SpectralModel};
use qmeasure::decoherence::{d_general, d_peak, decoherence_time, kernel_k, DecoherenceParams};
use qmeasure::measurement::MeasurementSetup;
use qmeasure::oracle::{compare_with_qclt, exact_decoherence_factor, BathMode, DiscreteBath, Drive, OracleSetup};
use qmeasure::pointer::PointerModel;
use qmeasure::regimes::{asymptotic_tdec_markov, RegimeInputs};

/// `int_0^t int_0^t1 Re h(t1 - t2) d(t1) d(t2)` as half the symmetric square
/// integral, by the 2D trapezoid rule on `n x n` cells and one Richardson
/// step against `n/2`.
fn square_trapezoid<H: Fn(f64) -> f64, D: Fn(f64) -> f64>(h: H, d: D, t: f64, n: usize) -> f64 {
    let rule = |n: usize| {
        let step = t / n as f64;
        let dv: Vec<f64> = (0..=n).map(|i| d(i as f64 * step)).collect();
        let hv: Vec<f64> = (0..=n).map(|k| h(k as f64 * step)).collect();
        let w = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
        let mut sum = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                sum += w(i) * w(j) * hv[i.abs_diff(j)] * dv[i] * dv[j];
            }
        }
        0.5 * sum * step * step
    };
    let (fine, coarse) = (rule(n), rule(n / 2));
    (4.0 * fine - coarse) / 3.0
}

#[test]
fn kernel_matches_square_trapezoid_for_exponential_preset() {
    let c = BathCorrelator::preset(Preset::Exponential { tau_c: 1.0 }, 5.0).unwrap();
    let k = kernel_k(&c, 1.0).unwrap().value;
    let oracle = square_trapezoid(|u| (-u).exp(), |x| x, 1.0, 4000);
    assert!((k / oracle - 1.0).abs() < 1e-6, "{k} vs {oracle}");
    // closed form: int_0^1 e^{-u} (2 - 3u + u^3)/6 du
    let e = (-1.0f64).exp();
    let exact = (2.0 * (1.0 - e) - 3.0 * (1.0 - 2.0 * e) + (6.0 - 16.0 * e)) / 6.0;
    assert!((k - exact).abs() < 1e-13, "{k} vs {exact}");
}

#[test]
fn general_exponent_matches_square_trapezoid() {
    let c = BathCorrelator::preset(Preset::Gaussian { tau_c: 0.7 }, 5.0).unwrap();
    let (eps, s, sp, x, xp, t) = (1.3, -0.5, 0.5, 0.4, -0.3, 1.2);
    let got = d_general(&c, eps, s, sp, x, xp, t).unwrap();
    let path = |tau: f64| (xp - x) - eps * (sp - s) * tau;
    let oracle = square_trapezoid(|u| (-(u / 0.7f64).powi(2)).exp(), path, t, 4000);
    assert!((got / oracle - 1.0).abs() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn spectral_kernel_matches_square_trapezoid() {
    let model = SpectralModel::new(3, 5.0).unwrap();
    let c = BathCorrelator::spectral(model, 3.0).unwrap();
    let t = 2.0;
    let n = 800;
    let step = t / n as f64;
    let table: Vec<f64> = (0..=n).map(|k| model.re_h_direct(k as f64 * step).unwrap().value).collect();
    let h = |u: f64| table[(u / step).round() as usize];
    let oracle = square_trapezoid(h, |x| x, t, n);
    let k = kernel_k(&c, t).unwrap().value;
    assert!((k / oracle - 1.0).abs() < 1e-5, "{k} vs {oracle}");
}

#[test]
fn gamma0_routes_agree_with_closed_form() {
    let gamma_half = [PI.sqrt(), 0.5 * PI.sqrt(), 0.75 * PI.sqrt()];
    for (k, m) in [1u32, 3, 5].into_iter().enumerate() {
        let model = SpectralModel::new(m, 5.0).unwrap();
        let freq = model.gamma0_frequency().unwrap();
        let time = model.gamma0_time().unwrap();
        let closed = model.normalization() * 5f64.powi(m as i32) * gamma_half[k] / (2.0 * PI);
        assert!((freq / time - 1.0).abs() < 1e-6, "m={m}: {freq} vs {time}");
        assert!((freq / closed - 1.0).abs() < 1e-10, "m={m}: {freq} vs {closed}");
        assert!((0.0..=0.5).contains(&freq));
    }
}

#[test]
fn ohmic_decoherence_time_follows_markov_law() {
    let c = BathCorrelator::spectral(SpectralModel::new(1, 5.0).unwrap(), 80.0).unwrap();
    let eps_ds = 0.02;
    let td = decoherence_time(&DecoherenceParams::new(eps_ds, &c).unwrap()).unwrap();
    assert!(td.t_dec > 10.0);
    let inputs = RegimeInputs::new(1.0, &c).unwrap();
    let m = asymptotic_tdec_markov(&inputs, 1.0 / eps_ds).unwrap();
    assert!((m.t_dec / td.t_dec - 1.0).abs() < 0.1, "{} vs {}", m.t_dec, td.t_dec);
}

#[test]
fn peak_exponent_is_increasing_and_convex() {
    for m in [1, 3, 5] {
        let c = BathCorrelator::spectral(SpectralModel::new(m, 5.0).unwrap(), 20.0).unwrap();
        let p = DecoherenceParams::new(1.0, &c).unwrap();
        let d: Vec<f64> = (0..=200).map(|i| d_peak(&p, 0.1 * i as f64).unwrap()).collect();
        for w in d.windows(3) {
            assert!(w[1] - w[0] >= -1e-10, "m={m}");
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-10, "m={m}");
        }
    }
}

#[test]
fn halving_the_grid_stays_within_the_error_estimate() {
    let model = SpectralModel::new(1, 5.0).unwrap();
    let coarse = BathCorrelator::from_spectral(model, 10.0, 1001).unwrap();
    let fine = BathCorrelator::from_spectral(model, 10.0, 2001).unwrap();
    for t in [0.5, 2.0, 7.5] {
        let a = kernel_k(&coarse, t).unwrap();
        let b = kernel_k(&fine, t).unwrap();
        assert!((a.value - b.value).abs() <= a.abs_err, "t={t}: {} > {}", (a.value - b.value).abs(), a.abs_err);
        assert!(b.rel_err() <= 1e-7, "t={t}: {}", b.rel_err());
    }
}

/// `drho/dt = -i [H, rho]` by classical RK4.
fn rk4_evolve(h: &Matrix2<Complex64>, rho0: &Matrix2<Complex64>, t: f64, steps: usize) -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let f = |r: &Matrix2<Complex64>| (h * r - r * h) * (-i);
    let dt = t / steps as f64;
    let mut r = *rho0;
    for _ in 0..steps {
        let k1 = f(&r);
        let k2 = f(&(r + k1 * Complex64::from(0.5 * dt)));
        let k3 = f(&(r + k2 * Complex64::from(0.5 * dt)));
        let k4 = f(&(r + k3 * Complex64::from(dt)));
        r += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0);
    }
    r
}

#[test]
fn free_evolution_matches_rk4() {
    let c = |v: f64| Complex64::new(v, 0.0);
    let hs = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.5), c(0.0)]);
    let rho = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let corr = BathCorrelator::preset(Preset::Exponential { tau_c: 1.0 }, 10.0).unwrap();
    let pm = PointerModel::new(1e4, 0.02, 0.01, 100.0).unwrap();
    let setup = MeasurementSetup::new(vec![-0.5, 0.5], rho, Some(hs), 1.0, pm, corr).unwrap();
    let t = PI / 2.0;
    let got = setup.object_free_evolution(t).unwrap();
    let h2 = Matrix2::new(c(0.0), c(0.5), c(0.5), c(0.0));
    let r2 = Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0));
    let want = rk4_evolve(&h2, &r2, t, 4000);
    for i in 0..2 {
        for j in 0..2 {
            assert!((got[(i, j)] - want[(i, j)]).norm() < 1e-8, "({i},{j}) {} vs {}", got[(i, j)], want[(i, j)]);
        }
    }
    // Rabi formula for the population.
    assert!((got[(0, 0)].re - (0.5 * t).cos().powi(2)).abs() < 1e-12);
    let eig = got.clone().symmetric_eigenvalues();
    assert!((eig.max() - 1.0).abs() < 1e-10 && eig.min().abs() < 1e-10);
}

fn three_modes(n_fock: usize) -> DiscreteBath {
    let modes = [0.7, 1.3, 2.1].map(|omega| BathMode { omega, g: 0.3 }).to_vec();
    DiscreteBath::new(modes, n_fock).unwrap()
}

#[test]
fn oracle_is_converged_in_fock_truncation() {
    let setup = OracleSetup { epsilon: 1.0, s: 0.5, s_prime: -0.5, x: 0.0, x_prime: 0.0 };
    let a = compare_with_qclt(&three_modes(30), &setup, &[1.5], 800).unwrap();
    let b = compare_with_qclt(&three_modes(60), &setup, &[1.5], 800).unwrap();
    assert!((a.rows[0].exact_abs - b.rows[0].exact_abs).abs() < 1e-6);
    assert!(a.rows[0].exact_abs <= 1.0 + 1e-10);
}

#[test]
fn oracle_phase_exists_while_modulus_matches() {
    let setup = OracleSetup { epsilon: 1.0, s: 1.0, s_prime: 0.0, x: 0.3, x_prime: -0.2 };
    let r = compare_with_qclt(&three_modes(30), &setup, &[0.8, 1.6], 1000).unwrap();
    assert!(r.phase_nonzero);
    assert!(r.max_deviation < 1e-3, "{}", r.max_deviation);
}

#[test]
fn oracle_peak_case_at_t_one_and_a_half() {
    let bath = three_modes(30);
    let t = 1.5;
    let a = Drive::pointer_path(0.0, 1.0, 0.5, t);
    let b = Drive::pointer_path(0.0, 1.0, -0.5, t);
    let exact = exact_decoherence_factor(&bath, &a, &b, t, 2000).unwrap();
    let corr = BathCorrelator::discrete(bath, t).unwrap();
    let d = d_general(&corr, 1.0, 0.5, -0.5, 0.0, 0.0, t).unwrap();
    assert!((exact.value.norm() / (-d).exp() - 1.0).abs() < 1e-3);
}
