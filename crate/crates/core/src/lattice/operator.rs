use ndarray::Array2;

use super::geometry::{Boundary, SiteGraph};
use super::profile::DissipationProfile;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaldaneParams {
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
}

impl Default for HaldaneParams {
    fn default() -> Self {
        Self { t1: 1.0, t2: 0.2, phi: std::f64::consts::FRAC_PI_2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedAxis {
    X,
    Y,
}

/// What the rows of a [`LatticeOperator`] refer to.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// One row per site of the graph, in graph order.
    Sites,
    /// A Bloch-reduced slice: row `r` is the representative site `sites[r]`.
    Reduced { axis: ReducedAxis, k: f64, sites: Vec<usize> },
    /// A one-dimensional chain.
    Chain,
    /// Circuit nodes.
    Nodes,
}

#[derive(Debug, Clone)]
pub struct LatticeOperator {
    matrix: Array2<C64>,
    basis: Basis,
    model: Option<HaldaneParams>,
}

impl LatticeOperator {
    pub fn new(matrix: Array2<C64>, basis: Basis) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || r == 0 {
            return Err(Error::Dimension { expected: r, found: c });
        }
        if let Basis::Reduced { sites, .. } = &basis {
            if sites.len() != r {
                return Err(Error::Dimension { expected: sites.len(), found: r });
            }
        }
        Ok(Self { matrix, basis, model: None })
    }

    pub fn with_model(mut self, model: HaldaneParams) -> Self {
        self.model = Some(model);
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn model(&self) -> Option<HaldaneParams> {
        self.model
    }

    pub fn k_label(&self) -> Option<f64> {
        match &self.basis {
            Basis::Reduced { k, .. } => Some(*k),
            _ => None,
        }
    }

    /// Graph site represented by row `r`, if the basis is lattice based.
    pub fn site_of_row(&self, r: usize) -> Option<usize> {
        match &self.basis {
            Basis::Sites => Some(r),
            Basis::Reduced { sites, .. } => sites.get(r).copied(),
            _ => None,
        }
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn one_norm(&self) -> f64 {
        self.matrix
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Real-space Haldane Hamiltonian on `graph`.
///
/// Entries accumulate, so multiply connected pairs on tiny tori receive
/// every bond.
pub fn build_haldane(graph: &SiteGraph, t1: f64, t2: f64, phi: f64) -> LatticeOperator {
    let n = graph.num_sites();
    let mut h = Array2::<C64>::zeros((n, n));
    for b in graph.nn_bonds() {
        h[[b.from, b.to]] += t1;
        h[[b.to, b.from]] += t1;
    }
    let hop = C64::from_polar(t2, phi);
    for b in graph.nnn_bonds() {
        h[[b.from, b.to]] += hop;
        h[[b.to, b.from]] += hop.conj();
    }
    LatticeOperator { matrix: h, basis: Basis::Sites, model: Some(HaldaneParams { t1, t2, phi }) }
}

/// Returns `H + i diag(gamma)`.
pub fn apply_dissipation(h: &LatticeOperator, profile: &DissipationProfile) -> Result<LatticeOperator> {
    let gamma = profile.gamma();
    let mut out = h.clone();
    match &h.basis {
        Basis::Sites => {
            if gamma.len() != h.dim() {
                return Err(Error::Dimension { expected: h.dim(), found: gamma.len() });
            }
            for (i, &g) in gamma.iter().enumerate() {
                if g != 0.0 {
                    out.matrix[[i, i]] += C64::new(0.0, g);
                }
            }
        }
        Basis::Reduced { sites, .. } => {
            for (r, &s) in sites.iter().enumerate() {
                let g = *gamma.get(s).ok_or(Error::Dimension { expected: s + 1, found: gamma.len() })?;
                if g != 0.0 {
                    out.matrix[[r, r]] += C64::new(0.0, g);
                }
            }
        }
        _ => {
            if gamma.len() != h.dim() {
                return Err(Error::Dimension { expected: h.dim(), found: gamma.len() });
            }
            for (i, &g) in gamma.iter().enumerate() {
                out.matrix[[i, i]] += C64::new(0.0, g);
            }
        }
    }
    Ok(out)
}

/// Bloch-reduced Haldane operator with dissipation at momentum `k`.
///
/// Along x the translation is one column and `k` is the phase per column, so
/// the allowed values are `2 pi q / lx`. Along y the translation is two rows
/// and the allowed values are `2 pi q / (ly / 2)`.
pub fn bloch_reduce(
    graph: &SiteGraph,
    t1: f64,
    t2: f64,
    phi: f64,
    profile: &DissipationProfile,
    k: f64,
) -> Result<LatticeOperator> {
    let axis = match (graph.bc_x(), graph.bc_y()) {
        (Boundary::Periodic, Boundary::Open) => ReducedAxis::X,
        (Boundary::Open, Boundary::Periodic) => ReducedAxis::Y,
        _ => {
            return Err(Error::NotTranslationInvariant(
                "reduction needs exactly one periodic direction".into(),
            ))
        }
    };
    let gamma = profile.gamma();
    if gamma.len() != graph.num_sites() {
        return Err(Error::Dimension { expected: graph.num_sites(), found: gamma.len() });
    }

    // Representative of every site under the translation, plus the number of
    // translation steps separating them.
    let orbit = |i: usize| -> (usize, usize, usize) {
        let s = graph.site(i);
        match axis {
            ReducedAxis::X => (0, s.row, s.column),
            ReducedAxis::Y => (s.column, s.row % 2, s.row / 2),
        }
    };
    let mut reps: Vec<usize> = Vec::new();
    let mut rep_row = std::collections::HashMap::new();
    for (i, s) in graph.sites().iter().enumerate() {
        let (c, r, _) = orbit(i);
        let key = (c, r, s.sublattice);
        if !rep_row.contains_key(&key) {
            rep_row.insert(key, reps.len());
            reps.push(i);
        }
    }
    for (i, s) in graph.sites().iter().enumerate() {
        let (c, r, _) = orbit(i);
        let rep = reps[rep_row[&(c, r, s.sublattice)]];
        if (gamma[i] - gamma[rep]).abs() > 1e-14 {
            return Err(Error::NotTranslationInvariant(format!(
                "dissipation varies along the periodic axis (site {i}: {} vs {})",
                gamma[i], gamma[rep]
            )));
        }
    }
    // The representative must be the first member of its orbit: column 0 for
    // x reduction, rows 0 and 1 for y reduction.
    let unwrapped_cell = |from: usize, shift: (i64, i64)| -> i64 {
        let s = graph.site(from);
        match axis {
            ReducedAxis::X => s.column as i64 + shift.0,
            ReducedAxis::Y => (s.row as i64 + shift.1).div_euclid(2),
        }
    };

    let dim = reps.len();
    let mut h = Array2::<C64>::zeros((dim, dim));
    let row_of = |i: usize| {
        let (c, r, _) = orbit(i);
        rep_row[&(c, r, graph.site(i).sublattice)]
    };
    let is_rep = |i: usize| orbit(i).2 == 0;
    let mut add = |from: usize, to: usize, shift: (i64, i64), amp: C64| {
        if is_rep(from) {
            let cells = unwrapped_cell(from, shift);
            h[[row_of(from), row_of(to)]] += amp * C64::from_polar(1.0, k * cells as f64);
        }
    };
    let hop = C64::from_polar(t2, phi);
    for b in graph.nn_bonds() {
        add(b.from, b.to, b.shift, C64::new(t1, 0.0));
        add(b.to, b.from, (-b.shift.0, -b.shift.1), C64::new(t1, 0.0));
    }
    for b in graph.nnn_bonds() {
        add(b.from, b.to, b.shift, hop);
        add(b.to, b.from, (-b.shift.0, -b.shift.1), hop.conj());
    }
    for (r, &i) in reps.iter().enumerate() {
        h[[r, r]] += C64::new(0.0, gamma[i]);
    }
    if reps.iter().any(|&i| !is_rep(i)) {
        return Err(Error::Geometry("reduced basis is missing the first translation image".into()));
    }
    Ok(LatticeOperator {
        matrix: h,
        basis: Basis::Reduced { axis, k, sites: reps },
        model: Some(HaldaneParams { t1, t2, phi }),
    })
}

/// Momenta along the periodic axis that are compatible with the sample size.
pub fn allowed_momenta(graph: &SiteGraph) -> Result<Vec<f64>> {
    let count = match (graph.bc_x(), graph.bc_y()) {
        (Boundary::Periodic, Boundary::Open) => graph.lx(),
        (Boundary::Open, Boundary::Periodic) => graph.ly() / 2,
        _ => {
            return Err(Error::NotTranslationInvariant(
                "reduction needs exactly one periodic direction".into(),
            ))
        }
    };
    Ok((0..count).map(|q| 2.0 * std::f64::consts::PI * q as f64 / count as f64).collect())
}
