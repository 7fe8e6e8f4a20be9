use std::f64::consts::PI;

use nhcse_core::hatano_nelson::{
    compare_edge_to_half_hn, half_hn_dispersion, hn_matrix, MOMENTUM_OFFSET, zeta_from_harmonics, HNParams, ZetaRule,
};
use nhcse_core::lattice::Boundary;
use nhcse_core::spectra::{eigensolve, eigenvalues};
use nhcse_core::C64;
use proptest::prelude::*;

#[test]
fn open_chain_modes_are_rescaled_standing_waves() {
    // psi_j = r^j sin(theta_m (j + 1)) with r = sqrt(t_R / t_L) and
    // E_m = 2 sqrt(t_L t_R) cos(theta_m), theta_m = pi m / (N + 1)
    let p = HNParams::from_velocity(0.937, 0.12, 80, Boundary::Open);
    let n = p.n;
    let r = (p.t_r / p.t_l).sqrt();
    let s = (p.t_l * p.t_r).sqrt();
    let spec = eigensolve(&hn_matrix(&p).unwrap()).unwrap();
    let vectors = spec.vectors.as_ref().unwrap();
    let mut rho = vec![0.0; n];
    for (i, col) in vectors.columns().into_iter().enumerate() {
        let e = spec.eigenvalues[i];
        let m = (1..=n)
            .min_by(|&a, &b| {
                let ea = 2.0 * s * (PI * a as f64 / (n + 1) as f64).cos();
                let eb = 2.0 * s * (PI * b as f64 / (n + 1) as f64).cos();
                (e.re - ea).abs().total_cmp(&(e.re - eb).abs())
            })
            .unwrap();
        let theta = PI * m as f64 / (n + 1) as f64;
        assert!((e - C64::new(2.0 * s * theta.cos(), 0.0)).norm() < 1e-8);
        let exact: Vec<f64> = (0..n).map(|j| r.powi(j as i32) * (theta * (j + 1) as f64).sin()).collect();
        let dot: C64 = col.iter().zip(&exact).map(|(z, x)| z.conj() * x).sum();
        let norm_exact = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm_col = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(1.0 - dot.norm() / (norm_exact * norm_col) < 1e-10);
        for (j, z) in col.iter().enumerate() {
            rho[j] += z.norm_sqr();
        }
    }
    // the summed density piles up at the right end
    assert!(rho[n - 5] > 1e3 * rho[5]);
}

#[test]
fn open_chain_without_second_harmonic_has_a_real_spectrum() {
    let p = HNParams::from_velocity(0.937, 0.3, 60, Boundary::Open);
    let e = eigenvalues(&hn_matrix(&p).unwrap()).unwrap();
    let bound = 2.0 * (p.t_l * p.t_r).sqrt();
    for z in &e.eigenvalues {
        assert!(z.im.abs() < 1e-8);
        assert!(z.re.abs() <= bound + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_spectrum_is_the_bloch_curve(v in 0.3f64..1.5, zeta in -0.3f64..0.3, a2 in -0.05f64..0.05, n in 8usize..40) {
        let p = HNParams::from_velocity(v, zeta, n, Boundary::Periodic).with_second_harmonic(a2);
        let got = eigenvalues(&hn_matrix(&p).unwrap()).unwrap().eigenvalues;
        let mut want: Vec<C64> = (0..n).map(|q| p.bloch_energy(2.0 * PI * q as f64 / n as f64 + MOMENTUM_OFFSET)).collect();
        for z in &got {
            let (i, d) = want.iter().enumerate().map(|(i, w)| (i, (z - w).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            prop_assert!(d < 1e-9);
            want.swap_remove(i);
        }
    }

    #[test]
    fn bloch_energy_is_velocity_sine_plus_harmonics(v in 0.3f64..1.5, zeta in -0.3f64..0.3, a2 in -0.05f64..0.05, k in -PI..PI) {
        let p = HNParams::from_velocity(v, zeta, 10, Boundary::Periodic).with_second_harmonic(a2);
        let e = p.bloch_energy(k);
        prop_assert!((e.re - v * k.sin()).abs() < 1e-12);
        prop_assert!((e.im - zeta * k.cos() - a2 * (2.0 * k).cos()).abs() < 1e-12);
    }

    #[test]
    fn half_dispersion_compares_exactly_with_itself(v in 0.3f64..1.5, a0 in -0.1f64..0.1, a1 in -0.2f64..0.2) {
        let d = half_hn_dispersion(v, &[a0, a1], 50);
        prop_assert!(d.iter().all(|(k, _)| *k > -PI / 2.0 && *k <= PI / 2.0));
        let cmp = compare_edge_to_half_hn(&d, &d, 1e-12).unwrap();
        prop_assert!(!cmp.mismatch);
    }

    #[test]
    fn zeta_rules_agree_on_a_single_harmonic(a1 in -0.3f64..0.3) {
        let c = [0.01, a1];
        prop_assert!((zeta_from_harmonics(&c, ZetaRule::FirstHarmonic) - a1).abs() < 1e-15);
        prop_assert!((zeta_from_harmonics(&c, ZetaRule::AtCrossing) - a1).abs() < 1e-15);
        prop_assert!((zeta_from_harmonics(&c, ZetaRule::LeastSquares) - a1).abs() < 1e-9);
    }
}
