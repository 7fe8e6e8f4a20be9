use nhcse_core::continuum::{
    chiral_wavefunction, detect_gddws, localization_predicate, multi_gddw_solution, pair_gddw_solution,
    random_linear_field, DissipationField, WallType,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `exp(2/v integral_0^x (gamma - gamma_bar))` by the trapezoid rule on `n` points.
fn trapezoid_density(field: &DissipationField, v: f64, n: usize) -> Vec<(f64, f64)> {
    let l = field.length();
    let h = l / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| field.value_at((i as f64 * h).min(l * (1.0 - 1e-15)))).collect();
    let total: f64 = values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    let gamma_bar = total / l;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for i in 0..n {
        let x = i as f64 * h;
        out.push((x, (2.0 * (acc - gamma_bar * x) / v).exp()));
        acc += 0.5 * h * (values[i] + values[i + 1]);
    }
    out
}

fn parts_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.4f64..0.4, 0.5f64..12.0), 2..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_solutions_are_periodic_and_continuous(parts in parts_strategy(), n in -4i64..5, fwd in any::<bool>()) {
        let v = if fwd { 0.937 } else { -0.937 };
        let field = DissipationField::from_lengths(&parts).unwrap();
        let sol = chiral_wavefunction(&field, n, v).unwrap();
        prop_assert!(sol.periodicity_defect() < 1e-10);
        prop_assert!(sol.continuity_defect() < 1e-10);
        prop_assert!(sol.envelope_defect() < 1e-10);
        let l: f64 = parts.iter().map(|p| p.1).sum();
        let gbar = parts.iter().map(|p| p.0 * p.1).sum::<f64>() / l;
        prop_assert!((sol.gamma_bar - gbar).abs() < 1e-12);
        prop_assert!((sol.energy.im - gbar).abs() < 1e-12);
    }

    #[test]
    fn closed_form_exponents_are_global_dissipation_over_velocity(parts in parts_strategy()) {
        let v = 0.8;
        let sol = multi_gddw_solution(&parts, v).unwrap();
        for (seg, p) in sol.segments.iter().zip(&parts) {
            prop_assert!((seg.alpha - (p.0 - sol.gamma_bar) / v).abs() < 1e-12);
        }
        let drift: f64 = sol.segments.iter().map(|s| s.alpha * (s.end - s.start)).sum();
        prop_assert!(drift.abs() < 1e-12);
    }

    #[test]
    fn density_matches_trapezoid_quadrature(seed in 0u64..10_000, fwd in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = random_linear_field(&mut rng, 20.0, 5, 0.3);
        let v = if fwd { 0.937 } else { -0.937 };
        let sol = chiral_wavefunction(&field, 0, v).unwrap();
        let oracle = trapezoid_density(&field, v, 10_000);
        let scale = sol.density(0.0) / oracle[0].1;
        for &(x, rho) in oracle.iter().step_by(97) {
            let got = sol.density(x);
            // trapezoid error at the kinks is O(h^2)
            prop_assert!((got - scale * rho).abs() / got < 1e-5, "x={} got={} want={}", x, got, scale * rho);
        }
    }

    #[test]
    fn density_peaks_exactly_at_trapping_walls(seed in 0u64..10_000, fwd in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = 25.0;
        let field = random_linear_field(&mut rng, l, 6, 0.3);
        let v = if fwd { 0.937 } else { -0.937 };
        let sol = chiral_wavefunction(&field, 1, v).unwrap();
        let set = detect_gddws(&field);
        let pos: Vec<f64> = set.walls.iter().map(|w| w.position).collect();
        prop_assert!(pos.len() % 2 == 0);
        for (i, w) in set.walls.iter().enumerate() {
            let prev = if i == 0 { pos[pos.len() - 1] - l } else { pos[i - 1] };
            let next = if i + 1 == pos.len() { pos[0] + l } else { pos[i + 1] };
            prop_assert_eq!(localization_predicate(&sol, w.position, [prev, next]), w.kind == WallType::trapping(v));
        }
    }

    #[test]
    fn pair_solution_agrees_with_the_general_one(g1 in -0.4f64..0.4, g2 in -0.4f64..0.4, l1 in 1.0f64..10.0, l2 in 1.0f64..10.0) {
        prop_assume!((g1 - g2).abs() > 1e-6);
        let v = 0.937;
        let pair = pair_gddw_solution(g1, g2, l1, l1 + l2, v).unwrap();
        let multi = multi_gddw_solution(&[(g1, l1), (g2, l2)], v).unwrap();
        prop_assert!((pair.alpha[0] - multi.segments[0].alpha).abs() < 1e-12);
        prop_assert!((pair.alpha[1] - multi.segments[1].alpha).abs() < 1e-12);
        prop_assert!((pair.gamma_bar - multi.gamma_bar).abs() < 1e-12);
        prop_assert!((pair.matching[1] - multi.segments[1].matching).abs() < 1e-12 * pair.matching[1].max(1.0));
    }
}

#[test]
fn uniform_field_has_no_walls_and_a_flat_mode() {
    let field = DissipationField::from_lengths(&[(0.2, 10.0)]).unwrap();
    let set = detect_gddws(&field);
    assert!(set.is_trivial());
    let sol = chiral_wavefunction(&field, 2, 0.937).unwrap();
    let (lo, hi) = sol.samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.1), hi.max(s.1)));
    assert!((hi - lo) / hi < 1e-12);
}

#[test]
fn rectangle_loop_exponent_uses_the_full_average() {
    // (-g, 0, +g, 0) on equal sides: alpha_1 = -g / v, not -3 g / (4 v).
    let (g, v) = (0.234, 0.937);
    let sol = multi_gddw_solution(&[(-g, 5.0), (0.0, 5.0), (g, 5.0), (0.0, 5.0)], v).unwrap();
    assert!((sol.segments[0].alpha + g / v).abs() < 1e-15);
    assert!(sol.segments[1].alpha.abs() < 1e-15);
}
