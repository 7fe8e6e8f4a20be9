use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use nhcse_core::lattice::{
    allowed_momenta, apply_dissipation, bloch_reduce, build_haldane, build_honeycomb, make_profile, Boundary,
    DissipationProfile, EdgeSide, EdgeStyle, ProfileSpec, SiteGraph, Sublattice, SQRT3,
};
use nhcse_core::spectra::eigenvalues;
use nhcse_core::topology::BlochMap;
use nhcse_core::C64;

const T1: f64 = 1.0;
const T2: f64 = 0.2;

fn sorted(mut e: Vec<C64>) -> Vec<C64> {
    e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    e
}

/// Greedy matching of two multisets of eigenvalues; returns the worst pair distance.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn reduced_union(graph: &SiteGraph, profile: &DissipationProfile) -> Vec<C64> {
    let mut all = Vec::new();
    for k in allowed_momenta(graph).unwrap() {
        let h = bloch_reduce(graph, T1, T2, FRAC_PI_2, profile, k).unwrap();
        all.extend(eigenvalues(&h).unwrap().eigenvalues);
    }
    sorted(all)
}

fn full(graph: &SiteGraph, profile: &DissipationProfile) -> Vec<C64> {
    let h = apply_dissipation(&build_haldane(graph, T1, T2, FRAC_PI_2), profile).unwrap();
    sorted(eigenvalues(&h).unwrap().eigenvalues)
}

#[test]
fn zigzag_bloch_slices_rebuild_the_full_spectrum() {
    let g = build_honeycomb(6, 6, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
    let profile = make_profile(&ProfileSpec::EdgeUniform { edge: EdgeSide::Lower, gamma: -0.15 }, &g).unwrap();
    let a = reduced_union(&g, &profile);
    let b = full(&g, &profile);
    assert_eq!(a.len(), g.num_sites());
    assert!(multiset_distance(&a, &b) < 1e-9);
}

#[test]
fn armchair_bloch_slices_rebuild_the_full_spectrum() {
    let g = build_honeycomb(5, 8, Boundary::Open, Boundary::Periodic, EdgeStyle::Armchair).unwrap();
    let profile = make_profile(&ProfileSpec::Staggered { gamma: 0.2 }, &g).unwrap();
    let a = reduced_union(&g, &profile);
    let b = full(&g, &profile);
    assert_eq!(a.len(), g.num_sites());
    assert!(multiset_distance(&a, &b) < 1e-9);
}

#[test]
fn reduction_rejects_broken_translation_symmetry() {
    let g = build_honeycomb(6, 4, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
    let profile = make_profile(
        &ProfileSpec::BulkGddw { gamma_left: -0.1, gamma_right: 0.1, walls: [0.0, 3.0] },
        &g,
    )
    .unwrap();
    assert!(bloch_reduce(&g, T1, T2, FRAC_PI_2, &profile, 0.0).is_err());
}

/// Momenta compatible with a torus of `lx` columns and `ly` zigzag rows,
/// whose periods are `lx a1` and `(ly / 2)(2 a2 - a1)`.
fn torus_momenta(lx: usize, ly: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for q in 0..lx {
        let s1 = q as f64 / lx as f64;
        for n in 0..ly {
            let s2 = s1 / 2.0 + n as f64 / ly as f64;
            out.push(BlochMap::momentum(s1, s2));
        }
    }
    out
}

#[test]
fn torus_spectrum_matches_bloch_map() {
    for (lx, ly) in [(2, 2), (4, 4), (3, 6)] {
        let g = build_honeycomb(lx, ly, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap();
        let (ga, gb) = (0.13, -0.07);
        let gamma = g.sites().iter().map(|s| if s.sublattice == Sublattice::A { ga } else { gb }).collect();
        let profile = make_profile(&ProfileSpec::Custom { gamma }, &g).unwrap();
        let lattice = full(&g, &profile);
        let map = BlochMap::haldane(T1, T2, FRAC_PI_2).with_dissipation(ga, gb);
        let mut bloch = Vec::new();
        for k in torus_momenta(lx, ly) {
            let op = nhcse_core::lattice::LatticeOperator::new(map.array(k), nhcse_core::lattice::Basis::Chain).unwrap();
            bloch.extend(eigenvalues(&op).unwrap().eigenvalues);
        }
        assert!(multiset_distance(&lattice, &sorted(bloch)) < 1e-10, "{lx}x{ly}");
    }
}

type PairCount = HashMap<(usize, usize), usize>;

/// Neighbour pairs found by distance with minimum-image wrapping.
fn brute_force_pairs(g: &SiteGraph, distance: f64) -> PairCount {
    let px = if g.bc_x() == Boundary::Periodic { Some(g.lx() as f64 * SQRT3) } else { None };
    let py = if g.bc_y() == Boundary::Periodic { Some(g.ly() as f64 * 1.5) } else { None };
    let wrap = |d: f64, p: Option<f64>| match p {
        Some(p) => d - p * (d / p).round(),
        None => d,
    };
    let mut out = PairCount::new();
    for (i, a) in g.sites().iter().enumerate() {
        for (j, b) in g.sites().iter().enumerate().skip(i + 1) {
            let dx = wrap(b.position[0] - a.position[0], px);
            let dy = wrap(b.position[1] - a.position[1], py);
            if ((dx * dx + dy * dy).sqrt() - distance).abs() < 1e-9 {
                *out.entry((i, j)).or_default() += 1;
            }
        }
    }
    out
}

fn bond_pairs(bonds: &[nhcse_core::lattice::Bond]) -> PairCount {
    let mut out = PairCount::new();
    for b in bonds {
        *out.entry((b.from.min(b.to), b.from.max(b.to))).or_default() += 1;
    }
    out
}

#[test]
fn bonds_match_brute_force_neighbours() {
    let graphs = [
        build_honeycomb(4, 6, Boundary::Open, Boundary::Periodic, EdgeStyle::Armchair).unwrap(),
        build_honeycomb(5, 4, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap(),
        build_honeycomb(5, 6, Boundary::Open, Boundary::Open, EdgeStyle::Rectangle).unwrap(),
        build_honeycomb(4, 6, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap(),
    ];
    for g in &graphs {
        assert_eq!(bond_pairs(g.nn_bonds()), brute_force_pairs(g, 1.0), "{:?}", g.edge_style());
        assert_eq!(bond_pairs(g.nnn_bonds()), brute_force_pairs(g, SQRT3), "{:?}", g.edge_style());
    }
}

#[test]
fn nn_bonds_join_opposite_sublattices_and_nnn_bonds_equal_ones() {
    let g = build_honeycomb(6, 6, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
    for b in g.nn_bonds() {
        assert_eq!(g.site(b.from).sublattice, Sublattice::A);
        assert_eq!(g.site(b.to).sublattice, Sublattice::B);
    }
    for b in g.nnn_bonds() {
        assert_eq!(g.site(b.from).sublattice, g.site(b.to).sublattice);
    }
}

#[test]
fn torus_coordination_is_uniform() {
    let g = build_honeycomb(6, 6, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap();
    assert!(g.nn_coordination().iter().all(|&c| c == 3));
    assert!(g.nnn_coordination().iter().all(|&c| c == 6));
}

#[test]
fn dissipation_is_the_antihermitian_part_and_the_trace() {
    let g = build_honeycomb(6, 4, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
    let h0 = build_haldane(&g, T1, T2, FRAC_PI_2);
    assert_eq!(h0.hermiticity_defect(), 0.0);
    let profile = make_profile(
        &ProfileSpec::BulkGddw { gamma_left: -0.2, gamma_right: 0.1, walls: [1.0, 4.0] },
        &g,
    )
    .unwrap();
    let h = apply_dissipation(&h0, &profile).unwrap();
    let m = h.matrix();
    let anti = (m - &m.t().mapv(|z| z.conj())).mapv(|z| z / C64::new(0.0, 2.0));
    for i in 0..g.num_sites() {
        for j in 0..g.num_sites() {
            let want = if i == j { profile.gamma()[i] } else { 0.0 };
            assert!((anti[[i, j]] - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }
    let trace: C64 = m.diag().iter().sum();
    assert!((trace - C64::new(0.0, profile.total())).norm() < 1e-12);
    let eig_sum: C64 = eigenvalues(&h).unwrap().eigenvalues.iter().sum();
    assert!((eig_sum - trace).norm() < 1e-9);
}

#[test]
fn uniform_shift_moves_every_reduced_level() {
    let g = build_honeycomb(8, 6, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
    let zero = make_profile(&ProfileSpec::None, &g).unwrap();
    let shift = make_profile(&ProfileSpec::BulkUniform { gamma: 0.25 }, &g).unwrap();
    for k in allowed_momenta(&g).unwrap() {
        let a = sorted(eigenvalues(&bloch_reduce(&g, T1, T2, FRAC_PI_2, &zero, k).unwrap()).unwrap().eigenvalues);
        let b = sorted(eigenvalues(&bloch_reduce(&g, T1, T2, FRAC_PI_2, &shift, k).unwrap()).unwrap().eigenvalues);
        for (x, y) in a.iter().zip(&b) {
            assert!((x + C64::new(0.0, 0.25) - y).norm() < 1e-12);
        }
    }
}
