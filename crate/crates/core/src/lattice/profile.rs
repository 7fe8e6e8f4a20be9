use serde::{Deserialize, Serialize};

use super::geometry::{EdgeSide, SiteGraph, Sublattice};
use crate::continuum::DissipationField;
use crate::{Error, Result};

/// Parameters defining a dissipation profile. Strengths are in units of `t1`,
/// wall positions in units of the zigzag period along the edge direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSpec {
    None,
    BulkUniform {
        gamma: f64,
    },
    /// `gamma_right` on the cyclic interval `[walls[0], walls[1])`, `gamma_left` elsewhere.
    BulkGddw {
        gamma_left: f64,
        gamma_right: f64,
        walls: [f64; 2],
    },
    EdgeUniform {
        edge: EdgeSide,
        gamma: f64,
    },
    EdgeGddw {
        edge: EdgeSide,
        gamma_left: f64,
        gamma_right: f64,
        walls: [f64; 2],
    },
    /// `+gamma` on A sites and `-gamma` on B sites.
    Staggered {
        gamma: f64,
    },
    Custom {
        gamma: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    BulkUniform,
    BulkGddw,
    Edge,
    Staggered,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationProfile {
    spec: ProfileSpec,
    gamma: Vec<f64>,
}

impl DissipationProfile {
    pub fn zero(n: usize) -> Self {
        Self { spec: ProfileSpec::None, gamma: vec![0.0; n] }
    }

    pub fn kind(&self) -> ProfileKind {
        match &self.spec {
            ProfileSpec::None | ProfileSpec::Custom { .. } => ProfileKind::Custom,
            ProfileSpec::BulkUniform { .. } => ProfileKind::BulkUniform,
            ProfileSpec::BulkGddw { .. } => ProfileKind::BulkGddw,
            ProfileSpec::EdgeUniform { .. } | ProfileSpec::EdgeGddw { .. } => ProfileKind::Edge,
            ProfileSpec::Staggered { .. } => ProfileKind::Staggered,
        }
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    /// Per-site dissipation `gamma_i`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }

    pub fn min(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Edge carrying the dissipation, for edge profiles.
    pub fn edge(&self) -> Option<EdgeSide> {
        match &self.spec {
            ProfileSpec::EdgeUniform { edge, .. } | ProfileSpec::EdgeGddw { edge, .. } => Some(*edge),
            _ => None,
        }
    }

    /// Wall positions after snapping to cell boundaries, for domain-wall profiles.
    pub fn walls(&self) -> Option<[f64; 2]> {
        match &self.spec {
            ProfileSpec::BulkGddw { walls, .. } | ProfileSpec::EdgeGddw { walls, .. } => {
                Some([walls[0].round(), walls[1].round()])
            }
            _ => None,
        }
    }

    /// Continuum field seen by a chiral mode running along x.
    ///
    /// Bulk profiles are averaged over each column, edge profiles over the
    /// outermost layer of the dissipative edge. The loop length is the
    /// number of columns.
    pub fn continuum_field(&self, graph: &SiteGraph) -> Result<DissipationField> {
        let along_rows = matches!(self.edge(), Some(EdgeSide::Left | EdgeSide::Right));
        let len = if along_rows { graph.ly() } else { graph.lx() };
        let mut sum = vec![0.0; len];
        let mut count = vec![0usize; len];
        let members: Vec<usize> = match self.edge() {
            Some(side) => graph.edge_sites(side, 1)?,
            None => (0..graph.num_sites()).collect(),
        };
        for i in members {
            let s = graph.site(i);
            let c = if along_rows { s.row } else { s.column };
            sum[c] += self.gamma[i];
            count[c] += 1;
        }
        let values: Vec<f64> =
            sum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect();
        DissipationField::from_cell_values(&values)
    }
}

fn snap_walls(walls: [f64; 2], len: usize) -> Result<(usize, usize)> {
    for w in walls {
        if !(0.0..len as f64).contains(&w) {
            return Err(Error::Profile(format!("wall at {w} lies outside [0, {len})")));
        }
    }
    let a = (walls[0].round() as usize) % len;
    let b = (walls[1].round() as usize) % len;
    if a == b {
        return Err(Error::Profile(format!("walls {walls:?} snap to the same cell boundary")));
    }
    Ok((a, b))
}

fn in_cyclic(c: usize, (a, b): (usize, usize)) -> bool {
    if a < b {
        (a..b).contains(&c)
    } else {
        c >= a || c < b
    }
}

/// Expands `spec` into a per-site dissipation map on `graph`.
pub fn make_profile(spec: &ProfileSpec, graph: &SiteGraph) -> Result<DissipationProfile> {
    let n = graph.num_sites();
    let mut gamma = vec![0.0; n];
    match spec {
        ProfileSpec::None => {}
        ProfileSpec::BulkUniform { gamma: g } => gamma.fill(*g),
        ProfileSpec::BulkGddw { gamma_left, gamma_right, walls } => {
            let region = snap_walls(*walls, graph.lx())?;
            for (i, s) in graph.sites().iter().enumerate() {
                gamma[i] = if in_cyclic(s.column, region) { *gamma_right } else { *gamma_left };
            }
        }
        ProfileSpec::EdgeUniform { edge, gamma: g } => {
            for i in graph.edge_sites(*edge, 1)? {
                gamma[i] = *g;
            }
        }
        ProfileSpec::EdgeGddw { edge, gamma_left, gamma_right, walls } => {
            let members = graph.edge_sites(*edge, 1)?;
            let along_rows = matches!(edge, EdgeSide::Left | EdgeSide::Right);
            let len = if along_rows { graph.ly() } else { graph.lx() };
            let region = snap_walls(*walls, len)?;
            for i in members {
                let s = graph.site(i);
                let c = if along_rows { s.row } else { s.column };
                gamma[i] = if in_cyclic(c, region) { *gamma_right } else { *gamma_left };
            }
        }
        ProfileSpec::Staggered { gamma: g } => {
            for (i, s) in graph.sites().iter().enumerate() {
                gamma[i] = match s.sublattice {
                    Sublattice::A => *g,
                    Sublattice::B => -*g,
                };
            }
        }
        ProfileSpec::Custom { gamma: g } => {
            if g.len() != n {
                return Err(Error::Dimension { expected: n, found: g.len() });
            }
            gamma.copy_from_slice(g);
        }
    }
    Ok(DissipationProfile { spec: spec.clone(), gamma })
}
