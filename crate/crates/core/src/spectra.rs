//! Diagonalization, edge-state classification, densities and fits.

use ndarray::{s, Array1, Array2, ArrayView1, ShapeBuilder};
use ndarray_linalg::{Eig, EigVals, Eigh, LeastSquaresSvd, QR, UPLO};

use crate::lattice::{DissipationProfile, EdgeSide, HaldaneParams, LatticeOperator, SiteGraph};
use crate::{Error, Result, C64};

/// Eigenpairs of a dense operator, sorted by `(Re E, Im E)`.
#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors as unit-norm columns, when requested.
    pub vectors: Option<Array2<C64>>,
    /// `|H v - E v|` per pair; empty without vectors.
    pub residuals: Vec<f64>,
    pub operator_norm: f64,
    pub k_label: Option<f64>,
    /// Graph site of every row, when the operator lives on a lattice.
    pub row_sites: Option<Vec<usize>>,
    pub model: Option<HaldaneParams>,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, i: usize) -> Option<ArrayView1<'_, C64>> {
        self.vectors.as_ref().map(|v| v.column(i))
    }

    /// `|psi_r|^2` per row for eigenpair `i`.
    pub fn row_density(&self, i: usize) -> Option<Vec<f64>> {
        self.vector(i).map(|v| v.iter().map(|z| z.norm_sqr()).collect())
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn order(values: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a].re.total_cmp(&values[b].re).then(values[a].im.total_cmp(&values[b].im))
    });
    idx
}

fn row_sites(h: &LatticeOperator) -> Option<Vec<usize>> {
    (0..h.dim()).map(|r| h.site_of_row(r)).collect()
}

fn check_finite(h: &LatticeOperator) -> Result<()> {
    if h.matrix().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver("operator has non-finite entries".into()));
    }
    Ok(())
}

/// Full eigendecomposition with residual checks.
pub fn eigensolve(h: &LatticeOperator) -> Result<ComplexSpectrum> {
    check_finite(h)?;
    let (vals, vecs) = h.matrix().eig().map_err(|e| Error::Eigensolver(e.to_string()))?;
    let idx = order(vals.as_slice().unwrap());
    let n = h.dim();
    let mut sorted = Array2::<C64>::zeros((n, n));
    let mut eigenvalues = Vec::with_capacity(n);
    for (c, &i) in idx.iter().enumerate() {
        let col = vecs.column(i);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        sorted.column_mut(c).assign(&col.mapv(|z| z / norm));
        eigenvalues.push(vals[i]);
    }
    let norm = h.one_norm();
    let hv = h.matrix().dot(&sorted);
    let mut residuals = Vec::with_capacity(n);
    for c in 0..n {
        let r = hv.column(c).iter().zip(sorted.column(c)).map(|(a, &b)| (a - b * eigenvalues[c]).norm_sqr()).sum::<f64>();
        residuals.push(r.sqrt());
    }
    let bound = 1e-8 * norm.max(1.0);
    if let Some((index, &residual)) = residuals.iter().enumerate().find(|(_, &r)| !(r < bound)) {
        return Err(Error::Residual { index, residual, bound });
    }
    Ok(ComplexSpectrum {
        eigenvalues,
        vectors: Some(sorted),
        residuals,
        operator_norm: norm,
        k_label: h.k_label(),
        row_sites: row_sites(h),
        model: h.model(),
    })
}

/// Eigenvalues only, sorted; much cheaper for large operators.
pub fn eigenvalues(h: &LatticeOperator) -> Result<ComplexSpectrum> {
    check_finite(h)?;
    let vals = h.matrix().eigvals().map_err(|e| Error::Eigensolver(e.to_string()))?;
    let idx = order(vals.as_slice().unwrap());
    Ok(ComplexSpectrum {
        eigenvalues: idx.iter().map(|&i| vals[i]).collect(),
        vectors: None,
        residuals: Vec::new(),
        operator_norm: h.one_norm(),
        k_label: h.k_label(),
        row_sites: row_sites(h),
        model: h.model(),
    })
}

/// Hermitian eigendecomposition, ascending.
///
/// `Eigh` returns conjugated eigenvectors for row-major input, so the
/// matrix is copied to column-major order first.
pub(crate) fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let mut f = Array2::<C64>::zeros(a.raw_dim().f());
    f.assign(a);
    f.eigh(UPLO::Upper).map_err(|e| Error::Eigensolver(e.to_string()))
}

/// Eigenvalues of a Hermitian operator via the symmetric solver, ascending.
pub fn hermitian_eigenvalues(h: &LatticeOperator) -> Result<Vec<f64>> {
    Ok(eigh(h.matrix())?.0.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// States with `|Re E|` below this are candidates.
    pub gap_window: f64,
    pub weight_threshold: f64,
    /// Number of outermost layers counted as the edge.
    pub depth: usize,
    /// Eigenvalues closer than this form a degenerate cluster.
    pub cluster_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { gap_window: 0.3, weight_threshold: 0.5, depth: 2, cluster_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeStateRecord {
    pub eigen_index: usize,
    pub energy: C64,
    pub k_label: Option<f64>,
    /// `None` for states that are not bound to an edge.
    pub edge: Option<EdgeSide>,
    /// Weight on the assigned edge, or the largest edge weight for bulk states.
    pub edge_weight: f64,
    pub weights: Vec<(EdgeSide, f64)>,
    pub gamma_eff: f64,
    /// Unit-norm state, rotated within degenerate clusters.
    pub state: Array1<C64>,
}

impl EdgeStateRecord {
    pub fn is_edge(&self) -> bool {
        self.edge.is_some()
    }

    pub fn weight_on(&self, side: EdgeSide) -> f64 {
        self.weights.iter().find(|w| w.0 == side).map_or(0.0, |w| w.1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Classification {
    /// Every in-window state, edge or bulk.
    pub records: Vec<EdgeStateRecord>,
    pub warnings: Vec<String>,
}

impl Classification {
    pub fn edge_states(&self) -> impl Iterator<Item = &EdgeStateRecord> {
        self.records.iter().filter(|r| r.is_edge())
    }

    pub fn on(&self, side: EdgeSide) -> impl Iterator<Item = &EdgeStateRecord> {
        self.records.iter().filter(move |r| r.edge == Some(side))
    }
}

/// Per-row dissipation for the rows of `spec`.
pub fn row_gamma(spec: &ComplexSpectrum, profile: &DissipationProfile) -> Result<Vec<f64>> {
    let gamma = profile.gamma();
    match &spec.row_sites {
        Some(sites) => sites
            .iter()
            .map(|&s| gamma.get(s).copied().ok_or(Error::Dimension { expected: s + 1, found: gamma.len() }))
            .collect(),
        None if gamma.len() == spec.len() => Ok(gamma.to_vec()),
        None => Err(Error::Dimension { expected: spec.len(), found: gamma.len() }),
    }
}

/// Labels the in-gap states of `spec` by the edge carrying most of their weight.
///
/// Degenerate clusters are first rotated to diagonalize the weight on the
/// first open edge, which separates states living on opposite edges.
pub fn classify_edge_states(
    spec: &ComplexSpectrum,
    graph: &SiteGraph,
    profile: Option<&DissipationProfile>,
    opts: &ClassifyOptions,
) -> Result<Classification> {
    let vectors = spec
        .vectors
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("classification needs eigenvectors".into()))?;
    let sites = spec.row_sites.as_ref().ok_or_else(|| Error::InvalidArgument("spectrum has no lattice basis".into()))?;
    let edges = graph.open_edges();
    if edges.is_empty() {
        return Err(Error::Geometry("graph has no open edge".into()));
    }
    let masks: Vec<Vec<bool>> = edges
        .iter()
        .map(|&side| sites.iter().map(|&s| graph.edge_layer(s, side).is_some_and(|l| l < opts.depth)).collect())
        .collect();
    let gamma = match profile {
        Some(p) => Some(row_gamma(spec, p)?),
        None => None,
    };

    let mut out = Classification::default();
    let n = spec.len();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (spec.eigenvalues[j] - spec.eigenvalues[i]).norm() < opts.cluster_tol {
            j += 1;
        }
        if spec.eigenvalues[i].re.abs() < opts.gap_window {
            let block = vectors.slice(s![.., i..j]).to_owned();
            let block = if j - i > 1 { rotate_cluster(block, &masks[0])? } else { block };
            for (q, col) in block.columns().into_iter().enumerate() {
                let rho: Vec<f64> = col.iter().map(|z| z.norm_sqr()).collect();
                let weights: Vec<(EdgeSide, f64)> = edges
                    .iter()
                    .zip(&masks)
                    .map(|(&side, m)| (side, rho.iter().zip(m).filter(|(_, &on)| on).map(|(r, _)| r).sum()))
                    .collect();
                let best = weights.iter().copied().fold((edges[0], f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                let edge = (best.1 >= opts.weight_threshold).then_some(best.0);
                let gamma_eff = gamma.as_ref().map_or(0.0, |g| rho.iter().zip(g).map(|(r, g)| r * g).sum());
                out.records.push(EdgeStateRecord {
                    eigen_index: i + q,
                    energy: spec.eigenvalues[i + q],
                    k_label: spec.k_label,
                    edge,
                    edge_weight: best.1.clamp(0.0, 1.0),
                    weights,
                    gamma_eff,
                    state: col.to_owned(),
                });
            }
        }
        i = j;
    }
    let n_edge = out.edge_states().count();
    if let Some(m) = spec.model {
        if m.t2.abs() < 1e-12 || m.phi.sin().abs() < 1e-12 {
            out.warnings.push("the model is gapless or topologically trivial; in-gap labels are not meaningful".into());
        }
    }
    if out.records.len() > 2 * n_edge.max(1) {
        out.warnings.push(format!(
            "{} of {} states in the gap window are not edge bound; the window may overlap the bulk bands",
            out.records.len() - n_edge,
            out.records.len()
        ));
    }
    Ok(out)
}

/// Orthonormalizes a degenerate block and diagonalizes the projector onto `mask` inside it.
fn rotate_cluster(block: Array2<C64>, mask: &[bool]) -> Result<Array2<C64>> {
    let (q, _) = block.qr().map_err(|e| Error::Eigensolver(e.to_string()))?;
    let m = q.ncols();
    let mut proj = Array2::<C64>::zeros((m, m));
    for a in 0..m {
        for b in a..m {
            let v: C64 = (0..q.nrows()).filter(|&r| mask[r]).map(|r| q[[r, a]].conj() * q[[r, b]]).sum();
            proj[[a, b]] = v;
            proj[[b, a]] = v.conj();
        }
    }
    let (_, u) = eigh(&proj)?;
    Ok(q.dot(&u))
}

/// `sum_i gamma_i |psi_i|^2 / |psi|^2`.
pub fn effective_dissipation(state: ArrayView1<C64>, gamma: &[f64]) -> Result<f64> {
    if state.len() != gamma.len() {
        return Err(Error::Dimension { expected: state.len(), found: gamma.len() });
    }
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    Ok(state.iter().zip(gamma).map(|(z, g)| z.norm_sqr() * g).sum::<f64>() / norm)
}

/// Least-squares coefficients `a_0..a_nmax` of `sum_n a_n cos(n k)`.
pub fn fit_effective_dissipation_harmonics(samples: &[(f64, f64)], n_max: usize) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.0.cos()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if distinct.len() < n_max + 1 {
        return Err(Error::Fit(format!(
            "{} distinct momenta cannot determine {} harmonics",
            distinct.len(),
            n_max + 1
        )));
    }
    let a = Array2::from_shape_fn((samples.len(), n_max + 1), |(r, n)| (n as f64 * samples[r].0).cos());
    let b = Array1::from_iter(samples.iter().map(|s| s.1));
    let sol = a.least_squares(&b).map_err(|e| Error::Fit(e.to_string()))?;
    if sol.rank < (n_max + 1) as i32 {
        return Err(Error::Fit(format!("design matrix has rank {} < {}", sol.rank, n_max + 1)));
    }
    Ok(sol.solution.to_vec())
}

/// Evaluates `sum_n a_n cos(n k)`.
pub fn cosine_series(coeffs: &[f64], k: f64) -> f64 {
    coeffs.iter().enumerate().map(|(n, a)| a * (n as f64 * k).cos()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    /// Summed `|psi|^2` per graph site.
    pub per_site: Vec<f64>,
    /// Summed over rows, indexed by column.
    pub projected_x: Vec<f64>,
    /// Summed over columns, indexed by row.
    pub projected_y: Vec<f64>,
    pub states: usize,
}

impl DensityField {
    /// Density along `side`, summed over its `depth` outermost layers.
    ///
    /// Lower and upper edges are indexed by column, left and right by row.
    pub fn along_edge(&self, graph: &SiteGraph, side: EdgeSide, depth: usize) -> Result<Vec<f64>> {
        let along_rows = matches!(side, EdgeSide::Left | EdgeSide::Right);
        let mut out = vec![0.0; if along_rows { graph.ly() } else { graph.lx() }];
        for i in graph.edge_sites(side, depth)? {
            let s = graph.site(i);
            out[if along_rows { s.row } else { s.column }] += self.per_site[i];
        }
        Ok(out)
    }

    pub fn total(&self) -> f64 {
        self.per_site.iter().sum()
    }
}

/// Densities of the selected states on the graph.
pub fn particle_distribution(selection: &[&EdgeStateRecord], spec: &ComplexSpectrum, graph: &SiteGraph) -> Result<DensityField> {
    if selection.is_empty() {
        return Err(Error::InvalidArgument("empty state selection".into()));
    }
    let sites = spec.row_sites.as_ref().ok_or_else(|| Error::InvalidArgument("spectrum has no lattice basis".into()))?;
    let mut per_site = vec![0.0; graph.num_sites()];
    for rec in selection {
        let norm: f64 = rec.state.iter().map(|z| z.norm_sqr()).sum();
        for (r, z) in rec.state.iter().enumerate() {
            per_site[sites[r]] += z.norm_sqr() / norm;
        }
    }
    Ok(density_from_sites(per_site, graph, selection.len()))
}

/// Density field built from per-site weights.
pub fn density_from_sites(per_site: Vec<f64>, graph: &SiteGraph, states: usize) -> DensityField {
    let mut projected_x = vec![0.0; graph.lx()];
    let mut projected_y = vec![0.0; graph.ly()];
    for (i, &rho) in per_site.iter().enumerate() {
        let s = graph.site(i);
        projected_x[s.column] += rho;
        projected_y[s.row] += rho;
    }
    DensityField { per_site, projected_x, projected_y, states }
}

/// `sum rho_i^2` of the normalized density.
pub fn inverse_participation_ratio(rho: &[f64]) -> f64 {
    let total: f64 = rho.iter().sum();
    rho.iter().map(|r| (r / total).powi(2)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Length with `rho ~ exp(-2 d / xi)`.
    pub xi: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln rho = c - 2 d / xi` to `(d, rho)` points.
pub fn fit_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 4 {
        return Err(Error::Fit(format!("{} points, need at least 4", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Fit(format!("non-positive density {} at distance {}", p.1, p.0)));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all points at the same distance".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(DecayFit { xi: -2.0 / slope, r_squared, points: points.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationFit {
    /// Fit on the decreasing-x side of the wall.
    pub left: DecayFit,
    pub right: DecayFit,
}

impl LocalizationFit {
    pub fn mean_xi(&self) -> f64 {
        0.5 * (self.left.xi + self.right.xi)
    }
}

/// Fits the decay of a loop density away from `walls[target]`.
///
/// `rho[c]` sits at cell centre `c + 0.5`; wall positions are cell
/// boundaries. Each side extends to the neighbouring wall, dropping cells
/// within `exclusion` of any wall.
pub fn fit_localization_length(rho: &[f64], walls: &[f64], target: usize, exclusion: f64) -> Result<LocalizationFit> {
    let len = rho.len() as f64;
    let w0 = *walls.get(target).ok_or_else(|| Error::InvalidArgument("wall index out of range".into()))?;
    let cyc = |d: f64| d.rem_euclid(len);
    // distance from w0 to the nearest other wall in each direction
    let others: Vec<f64> = walls.iter().enumerate().filter(|&(i, _)| i != target).map(|(_, &w)| w).collect();
    let reach_right = others.iter().map(|&w| cyc(w - w0)).filter(|&d| d > 0.0).fold(len, f64::min);
    let reach_left = others.iter().map(|&w| cyc(w0 - w)).filter(|&d| d > 0.0).fold(len, f64::min);
    let mut right = Vec::new();
    let mut left = Vec::new();
    for (c, &r) in rho.iter().enumerate() {
        let x = c as f64 + 0.5;
        let near_wall = walls.iter().any(|&w| {
            let d = cyc(x - w);
            d.min(len - d) < exclusion
        });
        if near_wall {
            continue;
        }
        let dr = cyc(x - w0);
        let dl = cyc(w0 - x);
        if dr < reach_right {
            right.push((dr, r));
        } else if dl < reach_left {
            left.push((dl, r));
        }
    }
    Ok(LocalizationFit { left: fit_decay(&left)?, right: fit_decay(&right)? })
}
