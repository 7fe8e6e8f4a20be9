//! End-to-end pipelines shared by the command-line runner and the test suites.

use std::f64::consts::PI;

use crate::continuum::{detect_gddws, DissipationField, GddwSet, WallType};
use crate::lattice::{
    apply_dissipation, bloch_reduce, build_haldane, build_honeycomb, make_profile, Boundary, DissipationProfile,
    EdgeSide, EdgeStyle, HaldaneParams, ProfileSpec, SiteGraph,
};
use crate::spectra::{
    classify_edge_states, eigensolve, fit_decay, fit_localization_length, inverse_participation_ratio,
    particle_distribution, Classification, ClassifyOptions, ComplexSpectrum, DecayFit, DensityField,
    EdgeStateRecord, LocalizationFit,
};
use crate::topology::edge_velocity;
use crate::{Error, Result, C64};

/// Zigzag cylinder, periodic along x.
pub fn zigzag_cylinder(lx: usize, ly: usize) -> Result<SiteGraph> {
    build_honeycomb(lx, ly, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag)
}

/// Armchair cylinder, periodic along y.
pub fn armchair_cylinder(lx: usize, ly: usize) -> Result<SiteGraph> {
    build_honeycomb(lx, ly, Boundary::Open, Boundary::Periodic, EdgeStyle::Armchair)
}

pub fn rectangle(lx: usize, ly: usize) -> Result<SiteGraph> {
    build_honeycomb(lx, ly, Boundary::Open, Boundary::Open, EdgeStyle::Rectangle)
}

/// Sign of the group velocity along +x of the chiral mode on a zigzag edge.
///
/// For `sin(phi) > 0` the lower-edge mode moves towards +x.
pub fn edge_chirality(side: EdgeSide, phi: f64) -> f64 {
    let s = phi.sin().signum();
    match side {
        EdgeSide::Lower => s,
        EdgeSide::Upper => -s,
        EdgeSide::Left => -s,
        EdgeSide::Right => s,
    }
}

/// Edge velocity at the band crossing, `v_eff(pi)`.
pub fn crossing_velocity(p: &HaldaneParams) -> f64 {
    edge_velocity(PI, p.t1, p.t2)
}

#[derive(Debug, Clone)]
pub struct EdgeSummary {
    pub side: EdgeSide,
    pub count: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub im_mean: f64,
    /// Summed density of the edge's states, projected on columns.
    pub density: Vec<f64>,
    /// Mean IPR over the edge's states.
    pub ipr: f64,
    /// Wall trapping this edge's chirality, if the edge sees a domain wall.
    pub trap_wall: Option<usize>,
    pub fit: Option<LocalizationFit>,
    pub fit_error: Option<String>,
}

impl EdgeSummary {
    pub fn im_spread(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn peak_column(&self) -> usize {
        self.density.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i)
    }
}

#[derive(Debug, Clone)]
pub struct LoopAnalysis {
    pub graph: SiteGraph,
    pub profile: DissipationProfile,
    pub spectrum: ComplexSpectrum,
    pub classification: Classification,
    /// Field seen by the chiral modes along x.
    pub field: DissipationField,
    pub gddws: GddwSet,
    pub edges: Vec<EdgeSummary>,
}

impl LoopAnalysis {
    pub fn edge(&self, side: EdgeSide) -> Option<&EdgeSummary> {
        self.edges.iter().find(|e| e.side == side)
    }

    /// Continuum average of the dissipation seen by the modes.
    pub fn gamma_bar(&self) -> f64 {
        self.gddws.gamma_bar
    }

    pub fn wall_positions(&self) -> Vec<f64> {
        self.gddws.walls.iter().map(|w| w.position).collect()
    }
}

/// Diagonalizes a zigzag cylinder with `spec` and fits every edge's localization.
///
/// Walls come from the continuum field of the profile. Each edge is fitted
/// around the wall matching its chirality when that edge feels the field:
/// both edges for bulk profiles, the dissipative edge for edge profiles.
pub fn analyze_loop(
    lx: usize,
    ly: usize,
    params: &HaldaneParams,
    spec: &ProfileSpec,
    opts: &ClassifyOptions,
    exclusion: f64,
) -> Result<LoopAnalysis> {
    let graph = zigzag_cylinder(lx, ly)?;
    let profile = make_profile(spec, &graph)?;
    let h = apply_dissipation(&build_haldane(&graph, params.t1, params.t2, params.phi), &profile)?;
    let spectrum = eigensolve(&h)?;
    let classification = classify_edge_states(&spectrum, &graph, Some(&profile), opts)?;
    let field = profile.continuum_field(&graph)?;
    let gddws = detect_gddws(&field);
    let walls: Vec<f64> = gddws.walls.iter().map(|w| w.position).collect();
    let mut edges = Vec::new();
    for side in [EdgeSide::Lower, EdgeSide::Upper] {
        let states: Vec<&EdgeStateRecord> = classification.on(side).collect();
        if states.is_empty() {
            continue;
        }
        let density = particle_distribution(&states, &spectrum, &graph)?;
        let ims: Vec<f64> = states.iter().map(|r| r.energy.im).collect();
        let feels_field = profile.edge().map_or(true, |e| e == side);
        let kind = WallType::trapping(edge_chirality(side, params.phi));
        let trap_wall = if feels_field { gddws.walls.iter().position(|w| w.kind == kind) } else { None };
        let (fit, fit_error) = match trap_wall {
            Some(t) => match fit_localization_length(&density.projected_x, &walls, t, exclusion) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            },
            None => (None, None),
        };
        let ipr = states.iter().map(|r| state_ipr(r)).sum::<f64>() / states.len() as f64;
        edges.push(EdgeSummary {
            side,
            count: states.len(),
            im_min: ims.iter().copied().fold(f64::INFINITY, f64::min),
            im_max: ims.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            im_mean: ims.iter().sum::<f64>() / ims.len() as f64,
            density: density.projected_x,
            ipr,
            trap_wall,
            fit,
            fit_error,
        });
    }
    Ok(LoopAnalysis { graph, profile, spectrum, classification, field, gddws, edges })
}

fn state_ipr(r: &EdgeStateRecord) -> f64 {
    let rho: Vec<f64> = r.state.iter().map(|z| z.norm_sqr()).collect();
    inverse_participation_ratio(&rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBandSample {
    /// Lattice momentum per column.
    pub k: f64,
    pub energy: C64,
    pub gamma_eff: f64,
    pub weight: f64,
}

/// For every momentum, the eigenstate of the Bloch-reduced cylinder with the
/// largest weight on `side`.
pub fn edge_band(
    graph: &SiteGraph,
    params: &HaldaneParams,
    profile: &DissipationProfile,
    side: EdgeSide,
    depth: usize,
    ks: &[f64],
) -> Result<Vec<EdgeBandSample>> {
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let h = bloch_reduce(graph, params.t1, params.t2, params.phi, profile, k)?;
        let spec = eigensolve(&h)?;
        let sites = spec.row_sites.as_ref().expect("reduced basis");
        let mask: Vec<bool> = sites.iter().map(|&s| graph.edge_layer(s, side).is_some_and(|l| l < depth)).collect();
        let gamma: Vec<f64> = sites.iter().map(|&s| profile.gamma()[s]).collect();
        let vectors = spec.vectors.as_ref().unwrap();
        let mut best: Option<EdgeBandSample> = None;
        for (i, col) in vectors.columns().into_iter().enumerate() {
            let weight: f64 = col.iter().zip(&mask).filter(|(_, &m)| m).map(|(z, _)| z.norm_sqr()).sum();
            if best.map_or(true, |b| weight > b.weight) {
                let gamma_eff = col.iter().zip(&gamma).map(|(z, g)| z.norm_sqr() * g).sum();
                best = Some(EdgeBandSample { k, energy: spec.eigenvalues[i], gamma_eff, weight });
            }
        }
        out.push(best.ok_or_else(|| Error::Eigensolver("empty spectrum".into()))?);
    }
    Ok(out)
}

/// Momenta `k0 + (hi - lo) (i + 1) / n`, for `i < n`, covering `(lo, hi]`.
pub fn half_open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Maps lattice momentum to the momentum measured from the edge crossing, in `(-pi, pi]`.
pub fn crossing_momentum(k: f64) -> f64 {
    let q = (k - PI).rem_euclid(2.0 * PI);
    if q > PI {
        q - 2.0 * PI
    } else {
        q
    }
}

/// Effective dissipation of the lower-edge state at the crossing of a
/// staggered-profile zigzag cylinder.
pub fn staggered_zigzag_gamma_eff(ly: usize, params: &HaldaneParams, gamma: f64, side: EdgeSide) -> Result<f64> {
    let graph = zigzag_cylinder(4, ly)?;
    let profile = make_profile(&ProfileSpec::Staggered { gamma }, &graph)?;
    let band = edge_band(&graph, params, &profile, side, 2, &[PI])?;
    Ok(band[0].gamma_eff)
}

#[derive(Debug, Clone)]
pub struct StaggeredArmchair {
    pub gamma_eff: Vec<f64>,
    pub classification: Classification,
}

/// Effective dissipation of every armchair-edge state of a staggered armchair cylinder.
pub fn staggered_armchair(lx: usize, ly: usize, params: &HaldaneParams, gamma: f64, opts: &ClassifyOptions) -> Result<StaggeredArmchair> {
    let graph = armchair_cylinder(lx, ly)?;
    let profile = make_profile(&ProfileSpec::Staggered { gamma }, &graph)?;
    let h = apply_dissipation(&build_haldane(&graph, params.t1, params.t2, params.phi), &profile)?;
    let spectrum = eigensolve(&h)?;
    let classification = classify_edge_states(&spectrum, &graph, Some(&profile), opts)?;
    let gamma_eff = classification.edge_states().map(|r| r.gamma_eff).collect();
    Ok(StaggeredArmchair { gamma_eff, classification })
}

#[derive(Debug, Clone)]
pub struct StaggeredRectangle {
    pub graph: SiteGraph,
    pub spectrum: ComplexSpectrum,
    pub classification: Classification,
    pub density: DensityField,
    /// Along-edge densities for lower, upper (by column), left, right (by row).
    pub along: Vec<(EdgeSide, Vec<f64>)>,
}

impl StaggeredRectangle {
    pub fn along(&self, side: EdgeSide) -> &[f64] {
        &self.along.iter().find(|a| a.0 == side).expect("all four edges").1
    }
}

/// Summed edge-state density of a staggered rectangle.
pub fn staggered_rectangle(lx: usize, ly: usize, params: &HaldaneParams, gamma: f64, opts: &ClassifyOptions) -> Result<StaggeredRectangle> {
    let graph = rectangle(lx, ly)?;
    let profile = make_profile(&ProfileSpec::Staggered { gamma }, &graph)?;
    let h = apply_dissipation(&build_haldane(&graph, params.t1, params.t2, params.phi), &profile)?;
    let spectrum = eigensolve(&h)?;
    let classification = classify_edge_states(&spectrum, &graph, Some(&profile), opts)?;
    let states: Vec<&EdgeStateRecord> = classification.edge_states().collect();
    let density = particle_distribution(&states, &spectrum, &graph)?;
    let along = [EdgeSide::Lower, EdgeSide::Upper, EdgeSide::Left, EdgeSide::Right]
        .into_iter()
        .map(|side| density.along_edge(&graph, side, opts.depth).map(|d| (side, d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StaggeredRectangle { graph, spectrum, classification, density, along })
}

/// Decay fit along an open edge, measured from its denser end, skipping
/// `exclusion` cells at both corners.
pub fn fit_open_edge(rho: &[f64], exclusion: usize) -> Result<DecayFit> {
    let n = rho.len();
    if n < 2 * exclusion + 4 {
        return Err(Error::Fit(format!("edge of {n} cells is too short")));
    }
    let from_start = rho[..n / 2].iter().sum::<f64>() >= rho[n / 2..].iter().sum::<f64>();
    let pts: Vec<(f64, f64)> = (exclusion..n - exclusion)
        .map(|c| {
            let d = if from_start { c } else { n - 1 - c };
            (d as f64, rho[c])
        })
        .collect();
    fit_decay(&pts)
}

/// Sums consecutive groups of `bin` values.
pub fn bin(values: &[f64], bin: usize) -> Vec<f64> {
    values.chunks(bin.max(1)).map(|c| c.iter().sum()).collect()
}

/// `(max / mean - 1, 1 - min / mean)` of the values.
pub fn flatness(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max / mean - 1.0, 1.0 - min / mean)
}
