//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use nhcse_core::circuit::{build_circuit, spin_energy, verify_haldane_equivalence, CircuitParams};
use nhcse_core::continuum::{
    chiral_wavefunction, detect_gddws, localization_predicate, multi_gddw_solution, random_linear_field,
    DissipationField, WallType,
};
use nhcse_core::hatano_nelson::{compare_edge_to_half_hn, half_hn_dispersion_with, hn_localization_length};
use nhcse_core::lattice::{
    apply_dissipation, build_haldane, build_honeycomb, make_profile, Boundary, EdgeSide, EdgeStyle, HaldaneParams,
    ProfileSpec, Sublattice, SQRT3,
};
use nhcse_core::scenarios::{
    analyze_loop, bin, crossing_momentum, crossing_velocity, edge_band, fit_open_edge, flatness, half_open_grid,
    staggered_armchair, staggered_rectangle, staggered_zigzag_gamma_eff, zigzag_cylinder, LoopAnalysis,
};
use nhcse_core::spectra::{eigenvalues, fit_effective_dissipation_harmonics, ClassifyOptions};
use nhcse_core::topology::{chern_number, edge_velocity, BlochMap};
use nhcse_core::{Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LX: usize = 24;
const LY: usize = 20;
const EXCLUSION: f64 = 2.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn params() -> HaldaneParams {
    HaldaneParams::default()
}

fn bulk_gddw(gamma_left: f64, gamma_right: f64) -> ProfileSpec {
    ProfileSpec::BulkGddw { gamma_left, gamma_right, walls: [0.0, LX as f64 / 2.0] }
}

fn edge_gddw(gamma: f64, lx: usize) -> ProfileSpec {
    ProfileSpec::EdgeGddw { edge: EdgeSide::Lower, gamma_left: -gamma, gamma_right: gamma, walls: [0.0, lx as f64 / 2.0] }
}

fn loop_analysis(spec: &ProfileSpec) -> Result<LoopAnalysis> {
    analyze_loop(LX, LY, &params(), spec, &ClassifyOptions::default(), EXCLUSION)
}

fn sorted(mut e: Vec<C64>) -> Vec<C64> {
    e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    e
}

fn uniform_shift() -> Result<Outcome> {
    let start = Instant::now();
    let p = params();
    let gamma = 0.1;
    let graph = zigzag_cylinder(LX, LY)?;
    let h = build_haldane(&graph, p.t1, p.t2, p.phi);
    let shifted = apply_dissipation(&h, &make_profile(&ProfileSpec::BulkUniform { gamma }, &graph)?)?;
    let plain = sorted(eigenvalues(&h)?.eigenvalues);
    let moved = sorted(eigenvalues(&shifted)?.eigenvalues);
    let dev = plain
        .iter()
        .zip(&moved)
        .map(|(a, b)| (a + C64::new(0.0, gamma) - b).norm())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(dev < 1e-10 && secs < 10.0, format!("max |E + i gamma - E'| = {dev:.2e} (< 1e-10), {secs:.1} s (< 10 s)"))
}

fn straight_line() -> Result<Outcome> {
    let cases = [
        ("bulk -0.1|+0.1", bulk_gddw(-0.1, 0.1), 0.1),
        ("bulk -0.2|0", bulk_gddw(-0.2, 0.0), 0.1),
        ("bulk -0.2|+0.2", bulk_gddw(-0.2, 0.2), 0.2),
        ("lower edge -0.1|+0.1", edge_gddw(0.1, LX), 0.1),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, spec, half_contrast) in cases {
        let a = loop_analysis(&spec)?;
        let gbar = a.gamma_bar();
        // relative tolerance, or a tenth of the half contrast when the average vanishes
        let tol = if gbar.abs() > 1e-12 { 0.1 * gbar.abs() } else { 0.1 * half_contrast };
        let dissipative: Vec<_> = match a.profile.edge() {
            Some(side) => a.edges.iter().filter(|e| e.side == side).collect(),
            None => a.edges.iter().collect(),
        };
        if dissipative.is_empty() {
            pass = false;
            parts.push(format!("{name}: no edge states"));
            continue;
        }
        let spread = dissipative.iter().map(|e| e.im_spread()).fold(0.0, f64::max);
        let off = dissipative.iter().map(|e| (e.im_min - gbar).abs().max((e.im_max - gbar).abs())).fold(0.0, f64::max);
        pass &= spread <= 0.02 && off <= tol;
        parts.push(format!("{name}: spread {spread:.1e}, |Im E - {gbar:.3}| <= {off:.1e} (tol {tol:.3})"));
    }
    outcome(pass, parts.join("; "))
}

fn mean_xi(a: &LoopAnalysis) -> Option<f64> {
    let fits: Vec<f64> = a.edges.iter().filter_map(|e| e.fit.map(|f| f.mean_xi())).collect();
    (fits.len() == 2).then(|| fits.iter().sum::<f64>() / 2.0)
}

fn bulk_localization() -> Result<Outcome> {
    let v = crossing_velocity(&params());
    let gammas = [0.05, 0.1, 0.2, 0.3];
    let mut xis = Vec::new();
    let mut main_ok = false;
    let mut main = String::new();
    for &g in &gammas {
        let a = loop_analysis(&bulk_gddw(-g, g))?;
        let Some(xi) = mean_xi(&a) else {
            return outcome(false, format!("gamma={g}: localization fit failed on an edge"));
        };
        if g == 0.2 {
            let oracle = v / g;
            let worst = a
                .edges
                .iter()
                .filter_map(|e| e.fit)
                .flat_map(|f| [f.left.xi, f.right.xi])
                .map(|x| (x - oracle).abs() / oracle)
                .fold(0.0, f64::max);
            main_ok = worst <= 0.10;
            main = format!("gamma=0.2: xi = {xi:.3} vs v/gamma = {oracle:.3} (worst side {:.1}%)", 100.0 * worst);
        }
        xis.push(xi);
    }
    let monotone = xis.windows(2).all(|w| w[1] < w[0]);
    let lx: Vec<f64> = gammas.iter().map(|g| g.ln()).collect();
    let ly: Vec<f64> = xis.iter().map(|x| x.ln()).collect();
    let mx = lx.iter().sum::<f64>() / 4.0;
    let my = ly.iter().sum::<f64>() / 4.0;
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let pass = main_ok && monotone && (slope + 1.0).abs() <= 0.15;
    outcome(pass, format!("{main}; sweep xi = {xis:.2?}, monotone {monotone}, log-log slope {slope:.3}"))
}

/// Harmonics of the lower-edge effective dissipation in lattice momentum,
/// for a uniform lower-edge loss of magnitude `gamma`.
fn edge_harmonics(gamma: f64) -> Result<(Vec<f64>, Vec<(f64, C64)>)> {
    let p = params();
    let graph = zigzag_cylinder(4, LY)?;
    let profile = make_profile(&ProfileSpec::EdgeUniform { edge: EdgeSide::Lower, gamma: -gamma }, &graph)?;
    let ks = half_open_grid(FRAC_PI_2, 1.5 * PI, 90);
    let band = edge_band(&graph, &p, &profile, EdgeSide::Lower, 2, &ks)?;
    let samples: Vec<(f64, f64)> = band.iter().map(|b| (b.k, b.gamma_eff)).collect();
    let coeffs = fit_effective_dissipation_harmonics(&samples, 2)?;
    let levels = band.iter().map(|b| (crossing_momentum(b.k), b.energy)).collect();
    Ok((coeffs, levels))
}

fn half_hatano_nelson() -> Result<Outcome> {
    let p = params();
    let (c, levels) = edge_harmonics(0.1)?;
    let (a1, a2) = (c[1], c[2]);
    // cos(K) = -cos(k) for k measured from the crossing at K = pi
    let in_k = [c[0], -a1, a2];
    let dispersion = half_hn_dispersion_with(|k| edge_velocity(k + PI, p.t1, p.t2), &in_k, 4000);
    let cmp = compare_edge_to_half_hn(&levels, &dispersion, 0.05)?;
    let pass = (0.096..=0.144).contains(&a1) && (0.018..=0.028).contains(&a2) && !cmp.mismatch;
    outcome(
        pass,
        format!(
            "a0 = {:.4}, a1 = {a1:.4} in [0.096, 0.144], a2 = {a2:.4} in [0.018, 0.028], max |E_edge - E_HN| = {:.4} (< 0.05) over {} momenta",
            c[0],
            cmp.max_deviation,
            cmp.per_k.len()
        ),
    )
}

fn edge_gddw_localization() -> Result<Outcome> {
    let v = crossing_velocity(&params());
    let mut pass = true;
    let mut parts = Vec::new();
    for g in [0.1, 0.2, 0.3] {
        let a = loop_analysis(&edge_gddw(g, LX))?;
        let Some(fit) = a.edge(EdgeSide::Lower).and_then(|e| e.fit) else {
            return outcome(false, format!("gamma={g}: no fit on the dissipative edge"));
        };
        let (c, _) = edge_harmonics(g)?;
        let zeta = c[1];
        let (t_l, t_r) = (0.5 * (v - zeta), 0.5 * (v + zeta));
        // chain spacing SQRT3 is one cell
        let predicted = hn_localization_length(t_l, t_r, SQRT3)?.xi() / SQRT3;
        let xi = fit.mean_xi();
        let rel = (xi - predicted).abs() / predicted;
        pass &= rel <= 0.15;
        parts.push(format!("gamma={g}: xi = {xi:.3} vs {predicted:.3} (t_L={t_l:.4}, t_R={t_r:.4}, off {:.0}%)", 100.0 * rel));
    }
    outcome(pass, parts.join("; "))
}

fn non_local() -> Result<Outcome> {
    let lx = 32;
    let p = params();
    let opts = ClassifyOptions::default();
    let spec = edge_gddw(0.5, lx);
    let narrow = analyze_loop(lx, 16, &p, &spec, &opts, EXCLUSION)?;
    let wide = analyze_loop(lx, 40, &p, &spec, &opts, EXCLUSION)?;
    let (Some(free_n), Some(free_w)) = (narrow.edge(EdgeSide::Upper), wide.edge(EdgeSide::Upper)) else {
        return outcome(false, "no states on the dissipation-free edge".into());
    };
    let len = lx as f64;
    let peak = free_n.peak_column() as f64 + 0.5;
    let distance = narrow
        .wall_positions()
        .iter()
        .map(|w| {
            let d = (peak - w).rem_euclid(len);
            d.min(len - d)
        })
        .fold(f64::INFINITY, f64::min);
    let contrast = free_n.density.iter().copied().fold(0.0, f64::max) / (free_n.density.iter().sum::<f64>() / len) - 1.0;
    let ratio = free_n.ipr / free_w.ipr;
    let (hi, lo) = flatness(&free_w.density);
    let pass = distance <= 2.0 && ratio >= 2.0 && hi.max(lo) <= 0.25;
    outcome(
        pass,
        format!(
            "Ly=16 free-edge peak {distance:.1} cells from a wall (<= 2, peak/mean - 1 = {contrast:.1e}), IPR ratio {ratio:.2} (>= 2); Ly=40 flatness {:.1}% (<= 25%)",
            100.0 * hi.max(lo)
        ),
    )
}

fn hybrid() -> Result<Outcome> {
    let p = params();
    let opts = ClassifyOptions::default();
    let gamma = 0.3;
    let v = crossing_velocity(&p);
    let arm = staggered_armchair(20, 20, &p, gamma, &opts)?;
    let arm_max = arm.gamma_eff.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let arm_ok = !arm.gamma_eff.is_empty() && arm_max < 1e-8;
    let sweep = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4];
    let zz: Vec<f64> =
        sweep.iter().map(|&g| staggered_zigzag_gamma_eff(LY, &p, g, EdgeSide::Lower).map(f64::abs)).collect::<Result<_>>()?;
    let zz_ok = zz.iter().all(|&g| g > 1e-6) && zz.windows(2).all(|w| w[1] > w[0]);
    let g_zz = staggered_zigzag_gamma_eff(LY, &p, gamma, EdgeSide::Lower)?.abs();
    let oracle = 4.0 * v / (3.0 * g_zz);
    let rect = staggered_rectangle(20, 20, &p, gamma, &opts)?;
    let mut decay_ok = true;
    let mut xis = Vec::new();
    for side in [EdgeSide::Lower, EdgeSide::Upper] {
        let fit = fit_open_edge(rect.along(side), 2)?;
        decay_ok &= (fit.xi - oracle).abs() / oracle <= 0.15 && fit.r_squared > 0.99;
        xis.push(fit.xi);
    }
    let mut flat = 0.0f64;
    for side in [EdgeSide::Left, EdgeSide::Right] {
        // one bin per armchair period of two rows
        let (hi, lo) = flatness(&bin(rect.along(side), 2));
        flat = flat.max(hi).max(lo);
    }
    let flat_ok = flat <= 0.25;
    outcome(
        arm_ok && zz_ok && decay_ok && flat_ok,
        format!(
            "armchair max|gamma_eff| = {arm_max:.1e} (< 1e-8); zigzag |gamma_eff| = {zz:.4?} monotone {zz_ok}; rectangle zigzag xi = {xis:.3?} vs 4v/(3 gamma_eff) = {oracle:.3} (15%, v/gamma_eff = {:.3}); armchair flatness {:.1}% (<= 25%)",
            v / g_zz,
            100.0 * flat
        ),
    )
}

/// `|psi(x)| / |psi(0)| = exp(integral_0^x (gamma - gamma_bar) / v)` by composite Simpson.
fn quadrature_envelope(parts: &[(f64, f64)], v: f64, x: f64) -> f64 {
    let gamma = |s: f64| {
        let mut start = 0.0;
        for &(g, len) in parts {
            if s < start + len {
                return g;
            }
            start += len;
        }
        parts.last().unwrap().0
    };
    let simpson = |a: f64, b: f64| {
        let n = 64;
        let h = (b - a) / n as f64;
        // endpoints nudged inside so the samples stay on this segment
        let mut s = gamma(a + 1e-9 * (b - a)) + gamma(b - 1e-9 * (b - a));
        for i in 1..n {
            s += gamma(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let integrate = |to: f64| {
        let mut total = 0.0;
        let mut start = 0.0;
        for &(_, len) in parts {
            let end = (start + len).min(to);
            if end > start {
                total += simpson(start, end);
            }
            start += len;
        }
        total
    };
    let length: f64 = parts.iter().map(|p| p.1).sum();
    let gamma_bar = integrate(length) / length;
    ((integrate(x) - gamma_bar * x) / v).exp()
}

fn continuum_suite() -> Result<Outcome> {
    let mut predicate_fail = 0;
    let mut walls_checked = 0;
    let mut worst_pbc = 0.0f64;
    let mut worst_continuity = 0.0f64;
    let mut worst_envelope = 0.0f64;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let length = rng.gen_range(8.0..40.0);
        let v = if rng.gen_bool(0.5) { 0.937 } else { -0.937 };
        let knots = rng.gen_range(3..8);
        let field = random_linear_field(&mut rng, length, knots, 0.3);
        let sol = chiral_wavefunction(&field, rng.gen_range(-3..4), v)?;
        worst_pbc = worst_pbc.max(sol.periodicity_defect());
        let set = detect_gddws(&field);
        let pos: Vec<f64> = set.walls.iter().map(|w| w.position).collect();
        for (i, wall) in set.walls.iter().enumerate() {
            let prev = if i == 0 { pos[pos.len() - 1] - length } else { pos[i - 1] };
            let next = if i + 1 == pos.len() { pos[0] + length } else { pos[i + 1] };
            let localized = localization_predicate(&sol, wall.position, [prev, next]);
            walls_checked += 1;
            if localized != (wall.kind == WallType::trapping(v)) {
                predicate_fail += 1;
            }
        }

        let regions = rng.gen_range(2..7);
        let parts: Vec<(f64, f64)> =
            (0..regions).map(|_| (rng.gen_range(-0.3..0.3), rng.gen_range(1.0..10.0))).collect();
        let step = DissipationField::from_lengths(&parts)?;
        let sol = chiral_wavefunction(&step, 0, v)?;
        worst_pbc = worst_pbc.max(sol.periodicity_defect());
        worst_continuity = worst_continuity.max(sol.continuity_defect());
        let closed = multi_gddw_solution(&parts, v)?;
        for seg in &closed.segments {
            for j in 0..8 {
                let x = seg.start + (seg.end - seg.start) * (j as f64 + 0.5) / 8.0;
                let amp = (seg.alpha * (x - seg.start)).exp() / seg.matching;
                let oracle = quadrature_envelope(&parts, v, x);
                worst_envelope = worst_envelope.max((amp - oracle).abs() / oracle);
            }
        }
    }
    let pass = predicate_fail == 0 && walls_checked > 0 && worst_pbc < 1e-10 && worst_continuity < 1e-10 && worst_envelope < 1e-8;
    outcome(
        pass,
        format!(
            "predicate/GDDW mismatches {predicate_fail} of {walls_checked} walls; PBC {worst_pbc:.1e}, continuity {worst_continuity:.1e} (< 1e-10); envelope vs quadrature {worst_envelope:.1e} (< 1e-8)"
        ),
    )
}

fn circuit_equivalence() -> Result<Outcome> {
    let graph = build_honeycomb(2, 2, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus)?;
    let cp = CircuitParams::default();
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let ks: Vec<[f64; 2]> =
        (0..32).map(|_| BlochMap::momentum(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
    let cases: [(&str, f64, f64); 4] = [("0", 0.0, 0.0), ("+0.1", 0.1, 0.1), ("-0.1", -0.1, -0.1), ("staggered 0.3", 0.3, -0.3)];
    let mut worst = 0.0f64;
    for (_, ga, gb) in cases {
        let gamma: Vec<f64> =
            graph.sites().iter().map(|s| if s.sublattice == Sublattice::A { ga } else { gb }).collect();
        let net = build_circuit(&graph, &cp, &gamma)?;
        let map = BlochMap::haldane(p.t1, p.t2, p.phi).with_dissipation(ga, gb);
        let report = verify_haldane_equivalence(&net, &map, &ks, net.omega0())?;
        worst = worst.max(report.max_deviation);
    }
    let energy = spin_energy(p.t1, p.t2, cp.omega0(), cp.omega0());
    let expected = 3.0 * p.t1 + 6.0 * p.t2 - 2.0;
    let pass = worst < 1e-12 && energy == expected;
    outcome(pass, format!("max entrywise deviation {worst:.1e} over 32 k x 4 profiles (< 1e-12); E(w0) = {energy} (expected {expected})"))
}

fn topology() -> Result<Outcome> {
    let start = Instant::now();
    let mut values = Vec::new();
    let mut pass = true;
    for n in [24, 36, 48] {
        let up = chern_number(&BlochMap::haldane(1.0, 0.2, FRAC_PI_2), 0, n)?;
        let down = chern_number(&BlochMap::haldane(1.0, 0.2, -FRAC_PI_2), 0, n)?;
        pass &= up == 1 && down == -1;
        values.push(format!("{n}^2: {up:+}/{down:+}"));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(pass && secs < 5.0, format!("Q(pi/2)/Q(-pi/2) = {}, {secs:.2} s (< 5 s)", values.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("uniform-shift identity", uniform_shift),
        ("straight-line spectrum", straight_line),
        ("bulk domain-wall localization", bulk_localization),
        ("half Hatano-Nelson fit", half_hatano_nelson),
        ("edge domain-wall localization length", edge_gddw_localization),
        ("non-local chiral skin effect", non_local),
        ("hybrid skin-topological effect", hybrid),
        ("continuum theorem suite", continuum_suite),
        ("circuit equivalence", circuit_equivalence),
        ("Chern numbers", topology),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "AC{} {} {name}: {detail} [{:.1} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
