//! Scenario execution.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nhcse_core::circuit::{build_circuit, reduce_real_space, verify_haldane_equivalence, CircuitParams, ComponentKind};
use nhcse_core::continuum::{
    chiral_wavefunction, detect_gddws, localization_predicate, multi_gddw_solution, random_linear_field,
    DissipationField, WallType,
};
use nhcse_core::hatano_nelson::{compare_edge_to_half_hn, half_hn_dispersion_with, hn_localization_length, zeta_from_harmonics};
use nhcse_core::lattice::{
    allowed_momenta, apply_dissipation, bloch_reduce, build_haldane, build_honeycomb, make_profile, EdgeSide,
    EdgeStyle, HaldaneParams, ProfileSpec, SiteGraph, Sublattice, SQRT3,
};
use nhcse_core::scenarios::{
    analyze_loop, bin, crossing_momentum, crossing_velocity, edge_band, edge_chirality, fit_open_edge, flatness,
    half_open_grid, staggered_armchair, staggered_rectangle, staggered_zigzag_gamma_eff, zigzag_cylinder,
    LoopAnalysis,
};
use nhcse_core::spectra::{
    classify_edge_states, eigensolve, eigenvalues, fit_effective_dissipation_harmonics, particle_distribution,
    Classification, ComplexSpectrum, EdgeStateRecord,
};
use nhcse_core::topology::{bulk_gap, chern_number, edge_velocity, BlochMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Scenario, ScenarioConfig};
use crate::output::{DensityRow, ProfileRow, SpectrumRow};
use crate::CliError;

/// Tolerance of the edge-level comparison with the half Hatano-Nelson chain.
const HN_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tables {
    pub spectrum: Vec<SpectrumRow>,
    pub density: Vec<DensityRow>,
    pub profile: Vec<ProfileRow>,
}

/// Headline numbers of a run, shared by the summary and the sweep table.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_bar: Option<f64>,
    /// Mean fitted localization length in cells.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonics: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_eff_zigzag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_eff_armchair: Option<f64>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    /// Largest relative deviation among `deviations`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

/// A measured value against its reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub value: f64,
    pub reference: f64,
    /// `|value - reference| / |reference|`, or the absolute difference when the reference is zero.
    pub deviation: f64,
}

impl Deviation {
    pub fn new(value: f64, reference: f64) -> Self {
        let diff = (value - reference).abs();
        let deviation = if reference != 0.0 { diff / reference.abs() } else { diff };
        Self { value, reference, deviation }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub tables: Tables,
    /// Additional tables written with the given file suffix.
    pub extras: Vec<(String, Tables)>,
    pub metrics: Metrics,
    pub deviations: BTreeMap<String, Deviation>,
    pub details: Map<String, Value>,
    pub warnings: Vec<String>,
    pub netlist: Option<String>,
}

impl RunOutput {
    fn deviation(&mut self, name: &str, d: Deviation) {
        self.deviations.insert(name.to_string(), d);
    }

    fn detail(&mut self, name: &str, value: impl Serialize) {
        self.details.insert(name.to_string(), to_value(value));
    }

    fn finish(mut self) -> Self {
        let worst = self.deviations.values().map(|d| d.deviation).filter(|d| d.is_finite()).fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
        if self.metrics.max_deviation.is_none() {
            self.metrics.max_deviation = worst;
        }
        self
    }

    /// Summary document for a successful run.
    pub fn summary(&self, config: &ScenarioConfig) -> Value {
        let mut doc = match to_value(&self.metrics) {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        doc.insert("status".into(), json!("ok"));
        doc.insert("scenario".into(), json!(config.scenario.name()));
        doc.insert("seed".into(), json!(config.seed));
        doc.insert("config".into(), to_value(config));
        doc.insert(
            "resolved".into(),
            json!({
                "geometry": config.geometry(),
                "gamma": config.gamma(),
                "widths": config.widths(),
                "profile": config.profile_for(config.geometry().lx),
            }),
        );
        doc.insert("deviations".into(), to_value(&self.deviations));
        doc.insert("details".into(), Value::Object(self.details.clone()));
        doc.insert("warnings".into(), to_value(&self.warnings));
        Value::Object(doc)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Runs a validated configuration.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let out = match config.scenario {
        Scenario::Fig2a | Scenario::Fig2b | Scenario::Fig2cd | Scenario::Fig3cd => run_loop(config)?,
        Scenario::Fig3ab => run_uniform_edge(config)?,
        Scenario::Fig3strip => run_strip(config)?,
        Scenario::Fig4 => run_staggered(config)?,
        Scenario::CircuitCheck => run_circuit(config)?,
        Scenario::Chern => run_chern(config)?,
        Scenario::OracleSuite => run_oracles(config)?,
        Scenario::Custom => {
            if config.geometry().edges == EdgeStyle::Zigzag {
                run_loop(config)?
            } else {
                run_generic(config)?
            }
        }
    };
    Ok(out.finish())
}

fn side_class(side: Option<EdgeSide>) -> String {
    match side {
        Some(s) => format!("edge-{}", s.name()),
        None => "bulk".into(),
    }
}

fn spectrum_rows(spec: &ComplexSpectrum, classification: Option<&Classification>) -> Vec<SpectrumRow> {
    let mut class = vec![None; spec.len()];
    if let Some(c) = classification {
        for r in &c.records {
            class[r.eigen_index] = r.edge;
        }
    }
    spec.eigenvalues
        .iter()
        .zip(class)
        .map(|(e, c)| SpectrumRow { re: e.re, im: e.im, class: side_class(c), k_label: spec.k_label })
        .collect()
}

fn density_rows(graph: &SiteGraph, per_site: &[f64]) -> Vec<DensityRow> {
    graph
        .sites()
        .iter()
        .zip(per_site)
        .map(|(s, &rho)| DensityRow { x: s.position[0], y: s.position[1], rho })
        .collect()
}

fn edge_density(graph: &SiteGraph, spec: &ComplexSpectrum, classification: &Classification) -> Result<Vec<DensityRow>, CliError> {
    let states: Vec<&EdgeStateRecord> = classification.edge_states().collect();
    if states.is_empty() {
        return Ok(Vec::new());
    }
    let d = particle_distribution(&states, spec, graph)?;
    Ok(density_rows(graph, &d.per_site))
}

/// Field sampled at cell centres.
fn profile_rows(field: &DissipationField) -> Vec<ProfileRow> {
    let n = field.length().round() as usize;
    (0..n)
        .map(|c| {
            let x = c as f64 + 0.5;
            ProfileRow { x, gamma: field.value_at(x) }
        })
        .collect()
}

fn loop_tables(a: &LoopAnalysis) -> Result<Tables, CliError> {
    Ok(Tables {
        spectrum: spectrum_rows(&a.spectrum, Some(&a.classification)),
        density: edge_density(&a.graph, &a.spectrum, &a.classification)?,
        profile: profile_rows(&a.field),
    })
}

fn edge_details(a: &LoopAnalysis) -> Value {
    let edges: Vec<Value> = a
        .edges
        .iter()
        .map(|e| {
            json!({
                "side": e.side,
                "count": e.count,
                "im_min": e.im_min,
                "im_max": e.im_max,
                "im_mean": e.im_mean,
                "ipr": e.ipr,
                "peak_column": e.peak_column(),
                "trap_wall": e.trap_wall.map(|t| a.gddws.walls[t].position),
                "xi_left": e.fit.map(|f| f.left.xi),
                "xi_right": e.fit.map(|f| f.right.xi),
                "r_squared": e.fit.map(|f| [f.left.r_squared, f.right.r_squared]),
                "fit_error": e.fit_error,
            })
        })
        .collect();
    json!({
        "walls": a.gddws.walls.iter().map(|w| json!({"position": w.position, "type": format!("{:?}", w.kind)})).collect::<Vec<_>>(),
        "plateaus": a.gddws.plateaus,
        "edges": edges,
    })
}

/// Edges that feel the dissipation: all of them for bulk profiles.
fn dissipative_sides(a: &LoopAnalysis) -> Vec<EdgeSide> {
    match a.profile.edge() {
        Some(side) => vec![side],
        None => a.edges.iter().map(|e| e.side).collect(),
    }
}

fn fill_loop_metrics(out: &mut RunOutput, a: &LoopAnalysis) {
    let gbar = a.gamma_bar();
    out.metrics.gamma_bar = Some(gbar);
    let sides = dissipative_sides(a);
    let relevant: Vec<_> = a.edges.iter().filter(|e| sides.contains(&e.side)).collect();
    if !relevant.is_empty() {
        out.metrics.im_spread = Some(relevant.iter().map(|e| e.im_spread()).fold(0.0, f64::max));
        let off = relevant.iter().map(|e| (e.im_min - gbar).abs().max((e.im_max - gbar).abs())).fold(0.0, f64::max);
        out.detail("max_im_offset_from_gamma_bar", off);
    }
    let xi_of = |side| a.edge(side).and_then(|e| e.fit).map(|f| f.mean_xi());
    out.metrics.xi_lower = xi_of(EdgeSide::Lower);
    out.metrics.xi_upper = xi_of(EdgeSide::Upper);
    let fitted: Vec<f64> = [out.metrics.xi_lower, out.metrics.xi_upper].into_iter().flatten().collect();
    if !fitted.is_empty() {
        out.metrics.xi = Some(fitted.iter().sum::<f64>() / fitted.len() as f64);
    }
    out.warnings.extend(a.classification.warnings.iter().cloned());
    for e in &a.edges {
        if let Some(err) = &e.fit_error {
            out.warnings.push(format!("{} edge fit: {err}", e.side.name()));
        }
    }
}

/// Continuum prediction of the decay lengths on both sides of the trapping wall.
fn continuum_lengths(a: &LoopAnalysis, wall: usize, v: f64) -> Option<(f64, f64)> {
    let segments = a.field.segments()?;
    let parts: Vec<(f64, f64)> = segments.iter().map(|s| (s.gamma, s.end - s.start)).collect();
    let sol = multi_gddw_solution(&parts, v).ok()?;
    let x0 = a.gddws.walls[wall].position;
    let len = a.field.length();
    let at = |x: f64| sol.segments.iter().find(|s| x >= s.start && x < s.end).map(|s| s.localization_length());
    let left = at((x0 - 0.5).rem_euclid(len))?;
    let right = at((x0 + 0.5).rem_euclid(len))?;
    Some((left, right))
}

fn run_loop(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let g = config.geometry();
    let params = config.model.params();
    let spec = config.profile_for(g.lx);
    let a = analyze_loop(g.lx, g.ly, &params, &spec, &config.classify.options(), config.fit.exclusion)?;
    let mut out = RunOutput { tables: loop_tables(&a)?, ..RunOutput::default() };
    fill_loop_metrics(&mut out, &a);
    out.detail("loop", edge_details(&a));
    let v = crossing_velocity(&params);
    out.detail("edge_velocity", v);
    for e in &a.edges {
        let (Some(t), Some(fit)) = (e.trap_wall, e.fit) else { continue };
        if let Some((left, right)) = continuum_lengths(&a, t, v) {
            let name = e.side.name();
            out.deviation(&format!("xi_{name}_left_vs_continuum"), Deviation::new(fit.left.xi, left));
            out.deviation(&format!("xi_{name}_right_vs_continuum"), Deviation::new(fit.right.xi, right));
        }
    }
    if let Some(side) = a.profile.edge() {
        if let Some(xi) = a.edge(side).and_then(|e| e.fit).map(|f| f.mean_xi()) {
            let (coeffs, _) = edge_harmonics(config, &params, config.gamma().abs())?;
            let zeta = zeta_from_harmonics(&coeffs, config.fit.zeta_rule);
            let predicted = hn_prediction(v, zeta)?;
            out.detail("hatano_nelson", json!({ "harmonics": coeffs, "zeta": zeta, "t_l": 0.5 * (v - zeta), "t_r": 0.5 * (v + zeta), "xi": predicted }));
            out.metrics.harmonics = Some(coeffs);
            out.deviation("xi_vs_hatano_nelson", Deviation::new(xi, predicted));
        }
    }
    Ok(out)
}

/// Localization length in cells of a chain with velocity `v` and non-reciprocity `zeta`.
fn hn_prediction(v: f64, zeta: f64) -> Result<f64, CliError> {
    Ok(hn_localization_length(0.5 * (v - zeta), 0.5 * (v + zeta), SQRT3)?.xi() / SQRT3)
}

/// Cosine harmonics of the lower-edge effective dissipation for a uniform
/// lower-edge loss `gamma`, with the edge levels keyed by crossing momentum.
fn edge_harmonics(config: &ScenarioConfig, params: &HaldaneParams, gamma: f64) -> Result<(Vec<f64>, Vec<(f64, nhcse_core::C64)>), CliError> {
    let ly = config.geometry().ly;
    let graph = zigzag_cylinder(4, ly)?;
    let profile = make_profile(&ProfileSpec::EdgeUniform { edge: EdgeSide::Lower, gamma: -gamma }, &graph)?;
    let ks = half_open_grid(0.5 * PI, 1.5 * PI, config.fit.k_samples);
    let band = edge_band(&graph, params, &profile, EdgeSide::Lower, config.classify.depth, &ks)?;
    let samples: Vec<(f64, f64)> = band.iter().map(|b| (b.k, b.gamma_eff)).collect();
    let coeffs = fit_effective_dissipation_harmonics(&samples, config.fit.harmonics)?;
    let levels = band.iter().map(|b| (crossing_momentum(b.k), b.energy)).collect();
    Ok((coeffs, levels))
}

fn run_uniform_edge(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let g = config.geometry();
    let params = config.model.params();
    let spec = config.profile_for(g.lx);
    let opts = config.classify.options();
    let a = analyze_loop(g.lx, g.ly, &params, &spec, &opts, config.fit.exclusion)?;
    let mut out = RunOutput::default();
    fill_loop_metrics(&mut out, &a);
    out.detail("loop", edge_details(&a));

    // momentum-resolved spectrum of the same cylinder
    let mut spectrum = Vec::new();
    for k in allowed_momenta(&a.graph)? {
        let h = bloch_reduce(&a.graph, params.t1, params.t2, params.phi, &a.profile, k)?;
        let s = eigensolve(&h)?;
        let c = classify_edge_states(&s, &a.graph, Some(&a.profile), &opts)?;
        spectrum.extend(spectrum_rows(&s, Some(&c)));
    }
    out.tables = Tables {
        spectrum,
        density: edge_density(&a.graph, &a.spectrum, &a.classification)?,
        profile: profile_rows(&a.field),
    };

    let gamma = config.gamma().abs();
    let (coeffs, levels) = edge_harmonics(config, &params, gamma)?;
    // cos(n (k + pi)) = (-1)^n cos(n k) for k measured from the crossing
    let in_k: Vec<f64> = coeffs.iter().enumerate().map(|(n, a)| if n % 2 == 1 { -a } else { *a }).collect();
    let dispersion = half_hn_dispersion_with(|k| edge_velocity(k + PI, params.t1, params.t2), &in_k, 4000);
    let cmp = compare_edge_to_half_hn(&levels, &dispersion, HN_TOLERANCE)?;
    let v = crossing_velocity(&params);
    let zeta = zeta_from_harmonics(&coeffs, config.fit.zeta_rule);
    out.detail(
        "hatano_nelson",
        json!({
            "zeta": zeta,
            "t_l": 0.5 * (v - zeta),
            "t_r": 0.5 * (v + zeta),
            "xi": hn_prediction(v, zeta)?,
            "max_level_deviation": cmp.max_deviation,
            "mean_level_deviation": cmp.mean_deviation,
            "momenta": cmp.per_k.len(),
            "mismatch": cmp.mismatch,
        }),
    );
    out.deviation("edge_levels_vs_half_hatano_nelson", Deviation::new(cmp.max_deviation, 0.0));
    out.metrics.harmonics = Some(coeffs);
    Ok(out)
}

fn run_strip(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let g = config.geometry();
    let params = config.model.params();
    let spec = config.profile_for(g.lx);
    let opts = config.classify.options();
    let widths = config.widths();
    let analyses: Vec<LoopAnalysis> = widths
        .par_iter()
        .map(|&ly| analyze_loop(g.lx, ly, &params, &spec, &opts, config.fit.exclusion))
        .collect::<Result<_, _>>()?;
    let mut out = RunOutput::default();
    fill_loop_metrics(&mut out, &analyses[0]);
    let mut per_width = Vec::new();
    let free_side = analyses[0].profile.edge().map(|s| if s == EdgeSide::Lower { EdgeSide::Upper } else { EdgeSide::Lower });
    let mut iprs = Vec::new();
    for (i, (a, &ly)) in analyses.iter().zip(&widths).enumerate() {
        let tables = loop_tables(a)?;
        if i == 0 {
            out.tables = tables;
        } else {
            out.extras.push((format!("_ly{ly}"), tables));
        }
        let free = free_side.and_then(|s| a.edge(s));
        let free_json = free.map(|e| {
            let len = e.density.len() as f64;
            let mean = e.density.iter().sum::<f64>() / len;
            let peak = e.peak_column() as f64 + 0.5;
            let distance = a
                .wall_positions()
                .iter()
                .map(|w| {
                    let d = (peak - w).rem_euclid(len);
                    d.min(len - d)
                })
                .fold(f64::INFINITY, f64::min);
            let (hi, lo) = flatness(&e.density);
            iprs.push(e.ipr);
            json!({
                "side": e.side,
                "ipr": e.ipr,
                "peak_column": e.peak_column(),
                "peak_to_wall": distance,
                "peak_over_mean": e.density.iter().copied().fold(0.0, f64::max) / mean,
                "flatness": hi.max(lo),
            })
        });
        per_width.push(json!({ "ly": ly, "loop": edge_details(a), "free_edge": free_json }));
    }
    if iprs.len() >= 2 {
        out.detail("free_edge_ipr_ratio", iprs[0] / iprs[iprs.len() - 1]);
    }
    out.detail("widths", per_width);
    Ok(out)
}

fn run_staggered(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let g = config.geometry();
    let params = config.model.params();
    let opts = config.classify.options();
    let gamma = match config.profile_for(g.lx) {
        ProfileSpec::Staggered { gamma } => gamma,
        _ => unreachable!("validated"),
    };
    let v = crossing_velocity(&params);
    let rect = staggered_rectangle(g.lx, g.ly, &params, gamma, &opts)?;
    let arm = staggered_armchair(g.lx, g.ly + g.ly % 2, &params, gamma, &opts)?;
    let arm_max = arm.gamma_eff.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zz = staggered_zigzag_gamma_eff(g.ly, &params, gamma, EdgeSide::Lower)?;
    let mut out = RunOutput::default();
    out.metrics.gamma_eff_armchair = (!arm.gamma_eff.is_empty()).then_some(arm_max);
    out.metrics.gamma_eff_zigzag = Some(zz);
    let exclusion = config.fit.exclusion.round() as usize;
    let oracle = 4.0 * v / (3.0 * zz.abs());
    let mut fits = Map::new();
    for side in [EdgeSide::Lower, EdgeSide::Upper] {
        match fit_open_edge(rect.along(side), exclusion) {
            Ok(f) => {
                fits.insert(side.name().into(), json!({ "xi": f.xi, "r_squared": f.r_squared, "points": f.points }));
                out.deviation(&format!("xi_{}_vs_4v_over_3gamma_eff", side.name()), Deviation::new(f.xi, oracle));
                if side == EdgeSide::Lower {
                    out.metrics.xi_lower = Some(f.xi);
                } else {
                    out.metrics.xi_upper = Some(f.xi);
                }
            }
            Err(e) => out.warnings.push(format!("{} edge fit: {e}", side.name())),
        }
    }
    let xs: Vec<f64> = [out.metrics.xi_lower, out.metrics.xi_upper].into_iter().flatten().collect();
    if !xs.is_empty() {
        out.metrics.xi = Some(xs.iter().sum::<f64>() / xs.len() as f64);
    }
    let mut flat = Map::new();
    for side in [EdgeSide::Left, EdgeSide::Right] {
        let (hi, lo) = flatness(&bin(rect.along(side), 2));
        flat.insert(side.name().into(), json!(hi.max(lo)));
    }
    out.detail("zigzag_fits", fits);
    out.detail("armchair_flatness", flat);
    out.detail("armchair_states", arm.gamma_eff.len());
    out.detail("edge_velocity", v);
    out.detail("xi_reference", json!({ "four_v_over_three_gamma_eff": oracle, "v_over_gamma_eff": v / zz.abs() }));
    out.warnings.extend(rect.classification.warnings.iter().cloned());
    let profile = make_profile(&ProfileSpec::Staggered { gamma }, &rect.graph)?;
    out.tables = Tables {
        spectrum: spectrum_rows(&rect.spectrum, Some(&rect.classification)),
        density: density_rows(&rect.graph, &rect.density.per_site),
        profile: profile_rows(&profile.continuum_field(&rect.graph)?),
    };
    Ok(out)
}

fn build_graph(config: &ScenarioConfig) -> Result<SiteGraph, CliError> {
    let g = config.geometry();
    let (bx, by) = g.boundaries();
    Ok(build_honeycomb(g.lx, g.ly, bx, by, g.edges)?)
}

fn run_circuit(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let graph = build_graph(config)?;
    let m = config.model;
    let cp = CircuitParams { t1: m.t1, t2: m.t2, phi: m.phi, ..CircuitParams::default() };
    let profile = make_profile(&config.profile_for(graph.lx()), &graph)?;
    let net = match &config.netlist {
        Some(path) => crate::output::read_netlist(path)?,
        None => build_circuit(&graph, &cp, profile.gamma())?,
    };
    if net.num_sites() != graph.num_sites() {
        return Err(CliError::Config(format!(
            "netlist has {} sites, the geometry has {}",
            net.num_sites(),
            graph.num_sites()
        )));
    }
    let w0 = net.omega0();
    let red = reduce_real_space(&net, cp.t1, cp.t2, w0)?;
    let h = apply_dissipation(&build_haldane(&graph, cp.t1, cp.t2, cp.phi), &profile)?;
    let real_dev = h
        .matrix()
        .indexed_iter()
        .map(|((i, j), z)| (red.matrix[[i, j]] - z).norm())
        .fold(0.0, f64::max);
    let mut out = RunOutput::default();
    out.metrics.max_deviation = Some(real_dev);
    out.deviation("real_space_entrywise", Deviation::new(real_dev, 0.0));
    out.detail("leakage", red.leakage);
    out.detail("energy_at_resonance", red.energy);
    out.detail("omega0", w0);
    out.detail("nodes", net.num_nodes());
    let counts: BTreeMap<&str, usize> = [
        ComponentKind::Cap,
        ComponentKind::Ind,
        ComponentKind::Res,
        ComponentKind::Inic,
        ComponentKind::CapG,
        ComponentKind::IndG,
    ]
    .into_iter()
    .map(|k| (k.name(), net.count(k)))
    .collect();
    out.detail("components", counts);

    // momentum-space check when the profile is uniform on each sublattice
    let on = |sub| graph.sites().iter().zip(profile.gamma()).filter(move |(s, _)| s.sublattice == sub).map(|(_, g)| *g);
    let uniform = |sub| {
        let v: Vec<f64> = on(sub).collect();
        v.first().copied().filter(|f| v.iter().all(|x| x == f))
    };
    if let (Some(ga), Some(gb), EdgeStyle::Torus) = (uniform(Sublattice::A), uniform(Sublattice::B), graph.edge_style()) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let ks: Vec<[f64; 2]> =
            (0..32).map(|_| BlochMap::momentum(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
        let map = BlochMap::haldane(cp.t1, cp.t2, cp.phi).with_dissipation(ga, gb);
        match verify_haldane_equivalence(&net, &map, &ks, w0) {
            Ok(report) => {
                out.deviation("bloch_entrywise", Deviation::new(report.max_deviation, 0.0));
                out.metrics.max_deviation = Some(real_dev.max(report.max_deviation));
                out.detail("bloch_samples", report.per_k.len());
            }
            Err(e) => out.warnings.push(format!("bloch check skipped: {e}")),
        }
    }
    let s = eigenvalues(&h)?;
    out.tables.spectrum = spectrum_rows(&s, None);
    out.tables.profile = profile_rows(&profile.continuum_field(&graph)?);
    out.netlist = Some(net.to_text());
    Ok(out)
}

fn run_chern(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let m = config.model;
    let n = config.fit.chern_grid;
    let map = BlochMap::haldane(m.t1, m.t2, m.phi);
    let mut out = RunOutput::default();
    out.metrics.q = Some(chern_number(&map, 0, n)?);
    out.detail("upper_band_Q", chern_number(&map, 1, n)?);
    out.detail("grid", n);
    out.detail("bulk_gap", bulk_gap(&map, n)?);
    out.detail("edge_velocity", crossing_velocity(&config.model.params()));
    out.detail("lower_edge_chirality", edge_chirality(EdgeSide::Lower, m.phi));
    Ok(out)
}

#[derive(Debug, Clone, Default)]
struct OracleCase {
    walls: usize,
    mismatches: usize,
    periodicity: f64,
    continuity: f64,
    envelope: f64,
    closed_form: f64,
}

fn oracle_case(seed: u64, index: u64, first: Option<&mut Tables>) -> Result<OracleCase, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let length = rng.gen_range(8.0..40.0);
    let v = if rng.gen_bool(0.5) { 0.937 } else { -0.937 };
    let knots = rng.gen_range(3..8);
    let field = random_linear_field(&mut rng, length, knots, 0.3);
    let n = rng.gen_range(-3..4);
    let sol = chiral_wavefunction(&field, n, v)?;
    let mut case = OracleCase { periodicity: sol.periodicity_defect(), ..OracleCase::default() };
    let set = detect_gddws(&field);
    let pos: Vec<f64> = set.walls.iter().map(|w| w.position).collect();
    for (i, wall) in set.walls.iter().enumerate() {
        let prev = if i == 0 { pos[pos.len() - 1] - length } else { pos[i - 1] };
        let next = if i + 1 == pos.len() { pos[0] + length } else { pos[i + 1] };
        case.walls += 1;
        if localization_predicate(&sol, wall.position, [prev, next]) != (wall.kind == WallType::trapping(v)) {
            case.mismatches += 1;
        }
    }
    if let Some(t) = first {
        t.density = sol.samples.iter().map(|&(x, rho)| DensityRow { x, y: 0.0, rho }).collect();
        t.profile = sol.samples.iter().map(|&(x, _)| ProfileRow { x, gamma: field.value_at(x) }).collect();
    }

    let regions = rng.gen_range(2..7);
    let parts: Vec<(f64, f64)> = (0..regions).map(|_| (rng.gen_range(-0.3..0.3), rng.gen_range(1.0..10.0))).collect();
    let step = DissipationField::from_lengths(&parts)?;
    let sol = chiral_wavefunction(&step, 0, v)?;
    case.periodicity = case.periodicity.max(sol.periodicity_defect());
    case.continuity = sol.continuity_defect();
    case.envelope = sol.envelope_defect();
    // the closed form against the sampled numerical density
    let closed = multi_gddw_solution(&parts, v)?;
    let amp = |x: f64| {
        closed
            .segments
            .iter()
            .find(|s| x >= s.start && x < s.end)
            .map_or(f64::NAN, |s| (s.alpha * (x - s.start)).exp() / s.matching)
    };
    let (x0, rho0) = sol.samples[0];
    let scale = rho0 / amp(x0).powi(2);
    for &(x, rho) in sol.samples.iter().step_by(37) {
        let want = scale * amp(x).powi(2);
        case.closed_form = case.closed_form.max((rho - want).abs() / want);
    }
    Ok(case)
}

fn run_oracles(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let cases = config.fit.oracle_cases;
    let mut out = RunOutput::default();
    let results: Vec<OracleCase> = (0..cases as u64)
        .into_par_iter()
        .map(|i| oracle_case(config.seed, i, None))
        .collect::<Result<_, _>>()?;
    if cases > 0 {
        oracle_case(config.seed, 0, Some(&mut out.tables))?;
    }
    let worst = |f: fn(&OracleCase) -> f64| results.iter().map(f).fold(0.0, f64::max);
    let walls: usize = results.iter().map(|c| c.walls).sum();
    let mismatches: usize = results.iter().map(|c| c.mismatches).sum();
    out.detail("cases", cases);
    out.detail("walls_checked", walls);
    out.detail("predicate_mismatches", mismatches);
    out.deviation("periodicity", Deviation::new(worst(|c| c.periodicity), 0.0));
    out.deviation("continuity", Deviation::new(worst(|c| c.continuity), 0.0));
    out.deviation("envelope", Deviation::new(worst(|c| c.envelope), 0.0));
    out.deviation("closed_form_vs_samples", Deviation::new(worst(|c| c.closed_form), 0.0));
    Ok(out)
}

fn run_generic(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let graph = build_graph(config)?;
    let params = config.model.params();
    let profile = make_profile(&config.profile_for(graph.lx()), &graph)?;
    let h = apply_dissipation(&build_haldane(&graph, params.t1, params.t2, params.phi), &profile)?;
    let mut out = RunOutput::default();
    out.tables.profile = profile_rows(&profile.continuum_field(&graph)?);
    out.metrics.gamma_bar = Some(profile.total() / graph.num_sites() as f64);
    if graph.open_edges().is_empty() {
        out.tables.spectrum = spectrum_rows(&eigenvalues(&h)?, None);
        return Ok(out);
    }
    let s = eigensolve(&h)?;
    let c = classify_edge_states(&s, &graph, Some(&profile), &config.classify.options())?;
    out.tables.spectrum = spectrum_rows(&s, Some(&c));
    out.tables.density = edge_density(&graph, &s, &c)?;
    let mut edges = Vec::new();
    for side in graph.open_edges() {
        let states: Vec<&EdgeStateRecord> = c.on(side).collect();
        if states.is_empty() {
            continue;
        }
        let im: Vec<f64> = states.iter().map(|r| r.energy.im).collect();
        let geff: Vec<f64> = states.iter().map(|r| r.gamma_eff).collect();
        edges.push(json!({
            "side": side,
            "count": states.len(),
            "im_min": im.iter().copied().fold(f64::INFINITY, f64::min),
            "im_max": im.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "gamma_eff_mean": geff.iter().sum::<f64>() / geff.len() as f64,
        }));
    }
    out.detail("edges", edges);
    out.warnings.extend(c.warnings.iter().cloned());
    Ok(out)
}
