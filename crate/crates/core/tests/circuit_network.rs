use std::f64::consts::FRAC_PI_2;

use nhcse_core::circuit::{
    build_circuit, kirchhoff_matrix, reduce_real_space, relative_null_gap, resonance_frequency, CircuitNetlist,
    CircuitParams, ComponentKind,
};
use nhcse_core::lattice::{
    apply_dissipation, build_haldane, build_honeycomb, make_profile, Boundary, EdgeStyle, ProfileSpec, SiteGraph,
};
use nhcse_core::spectra::hermitian_eigenvalues;
use proptest::prelude::*;

fn torus() -> SiteGraph {
    build_honeycomb(3, 4, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap()
}

fn cylinder() -> SiteGraph {
    build_honeycomb(3, 4, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap()
}

fn real_space_deviation(graph: &SiteGraph, gamma: &[f64]) -> (f64, f64) {
    let cp = CircuitParams::default();
    let net = build_circuit(graph, &cp, gamma).unwrap();
    let red = reduce_real_space(&net, cp.t1, cp.t2, net.omega0()).unwrap();
    let profile = make_profile(&ProfileSpec::Custom { gamma: gamma.to_vec() }, graph).unwrap();
    let h = apply_dissipation(&build_haldane(graph, cp.t1, cp.t2, cp.phi), &profile).unwrap();
    let mut worst = 0.0f64;
    for ((i, j), z) in h.matrix().indexed_iter() {
        worst = worst.max((red.matrix[[i, j]] - z).norm());
    }
    (worst, red.leakage)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn netlist_text_round_trips(gamma in prop::collection::vec(-0.3f64..0.3, 24)) {
        let net = build_circuit(&torus(), &CircuitParams::default(), &gamma).unwrap();
        let back = CircuitNetlist::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(&back, &net);
        let parsed: CircuitNetlist = net.to_string().parse().unwrap();
        prop_assert_eq!(parsed, net);
    }

    #[test]
    fn real_space_reduction_is_the_lattice_operator(gamma in prop::collection::vec(-0.3f64..0.3, 24), open in any::<bool>()) {
        let graph = if open { cylinder() } else { torus() };
        let (dev, leak) = real_space_deviation(&graph, &gamma);
        prop_assert!(dev < 1e-12, "deviation {}", dev);
        prop_assert!(leak < 1e-12, "leakage {}", leak);
    }
}

#[test]
fn gain_and_loss_pick_the_right_components() {
    let g = torus();
    let gamma: Vec<f64> = (0..24).map(|i| if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
    let net = build_circuit(&g, &CircuitParams::default(), &gamma).unwrap();
    // one grounded element per node, four nodes per site
    assert_eq!(net.count(ComponentKind::Inic), 48);
    assert_eq!(net.count(ComponentKind::Res), 48);
}

#[test]
fn lossless_network_resonates_at_every_lattice_level() {
    let g = torus();
    let cp = CircuitParams::default();
    let net = build_circuit(&g, &cp, &vec![0.0; g.num_sites()]).unwrap();
    let levels = hermitian_eigenvalues(&build_haldane(&g, cp.t1, cp.t2, cp.phi)).unwrap();
    for &lambda in levels.iter().step_by(5) {
        let w = resonance_frequency(lambda, cp.t1, cp.t2, net.omega0()).unwrap();
        let y = kirchhoff_matrix(&net, w).unwrap().into_matrix();
        assert!(relative_null_gap(&y).unwrap() < 1e-12, "lambda = {lambda}");
    }
    let off = resonance_frequency(levels[0], cp.t1, cp.t2, net.omega0()).unwrap() * 1.01;
    let y = kirchhoff_matrix(&net, off).unwrap().into_matrix();
    assert!(relative_null_gap(&y).unwrap() > 1e-6);
}

#[test]
fn reversed_flux_is_a_different_network() {
    let g = torus();
    let up = build_circuit(&g, &CircuitParams::default(), &vec![0.0; 24]).unwrap();
    let down = build_circuit(&g, &CircuitParams { phi: -FRAC_PI_2, ..CircuitParams::default() }, &vec![0.0; 24]).unwrap();
    assert_ne!(up, down);
    let red = reduce_real_space(&down, 1.0, 0.2, down.omega0()).unwrap();
    let h = build_haldane(&g, 1.0, 0.2, -FRAC_PI_2);
    let dev = h
        .matrix()
        .indexed_iter()
        .map(|((i, j), z)| (red.matrix[[i, j]] - z).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-12);
}
