use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Period of a zigzag edge in units of the nearest-neighbour distance.
pub const ZIGZAG_PERIOD: f64 = SQRT3;

/// Nearest-neighbour vectors from an A site to its three B neighbours.
pub const NN_VECTORS: [[f64; 2]; 3] = [[0.0, 1.0], [-SQRT3 / 2.0, -0.5], [SQRT3 / 2.0, -0.5]];

/// Next-nearest-neighbour vectors `v1 = e2 - e3`, `v2 = e3 - e1`, `v3 = e1 - e2`.
pub const NNN_VECTORS: [[f64; 2]; 3] = [[-SQRT3, 0.0], [SQRT3 / 2.0, -1.5], [SQRT3 / 2.0, 1.5]];

/// Primitive vectors of the triangular Bravais lattice.
pub const PRIMITIVE_VECTORS: [[f64; 2]; 2] = [[SQRT3, 0.0], [SQRT3 / 2.0, 1.5]];

// Sheared cell offsets (along a1, a2) matching NN_VECTORS and NNN_VECTORS.
const NN_SHEARED: [(i64, i64); 3] = [(-1, 1), (-1, 0), (0, 0)];
const NNN_SHEARED: [(i64, i64); 3] = [(-1, 0), (1, -1), (0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeStyle {
    /// Periodic in both directions.
    Torus,
    /// Periodic along x with zigzag edges at the bottom and top rows.
    Zigzag,
    /// Periodic along y with armchair edges on the left and right.
    Armchair,
    /// Open in both directions.
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    /// Sign of the NNN phase for hops along `+v_j`.
    pub fn phase_sign(self) -> f64 {
        match self {
            Sublattice::A => 1.0,
            Sublattice::B => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeSide {
    Lower,
    Upper,
    Left,
    Right,
}

impl EdgeSide {
    pub fn name(self) -> &'static str {
        match self {
            EdgeSide::Lower => "lower",
            EdgeSide::Upper => "upper",
            EdgeSide::Left => "left",
            EdgeSide::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    /// Rectangular column index.
    pub column: usize,
    /// Zigzag row index.
    pub row: usize,
    pub sublattice: Sublattice,
    pub position: [f64; 2],
}

/// A directed bond.
///
/// For nearest neighbours `from` is always the A site. For next-nearest
/// neighbours the bond is oriented so that hopping `from -> to` carries the
/// phase `+phi` (clockwise around the hexagon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    /// Unwrapped (column, row) offset from `from` to `to`.
    pub shift: (i64, i64),
    /// Physical displacement `r_to - r_from` before wrapping.
    pub vector: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct SiteGraph {
    lx: usize,
    ly: usize,
    bc_x: Boundary,
    bc_y: Boundary,
    style: EdgeStyle,
    sites: Vec<Site>,
    lookup: HashMap<(usize, usize, Sublattice), usize>,
    nn: Vec<Bond>,
    nnn: Vec<Bond>,
    x_bounds: (f64, f64),
}

fn expected_boundaries(style: EdgeStyle) -> (Boundary, Boundary) {
    use Boundary::*;
    match style {
        EdgeStyle::Torus => (Periodic, Periodic),
        EdgeStyle::Zigzag => (Periodic, Open),
        EdgeStyle::Armchair => (Open, Periodic),
        EdgeStyle::Rectangle => (Open, Open),
    }
}

pub fn site_position(column: usize, row: usize, sublattice: Sublattice) -> [f64; 2] {
    let odd = (row % 2) as f64;
    let b = matches!(sublattice, Sublattice::B);
    let x = SQRT3 * column as f64 + odd * SQRT3 / 2.0 + if b { SQRT3 / 2.0 } else { 0.0 };
    let y = 1.5 * row as f64 - if b { 0.5 } else { 0.0 };
    [x, y]
}

/// Builds a honeycomb lattice of `lx` x `ly` unit cells.
///
/// Cells are laid out in zigzag rows; row `n` is shifted by half a cell when
/// `n` is odd so that the sample is rectangular. Along a periodic y axis the
/// row count must be even. Along an open x axis, sites left with a single
/// nearest neighbour are removed repeatedly, which leaves clean armchair
/// edges.
pub fn build_honeycomb(
    lx: usize,
    ly: usize,
    bc_x: Boundary,
    bc_y: Boundary,
    style: EdgeStyle,
) -> Result<SiteGraph> {
    if lx < 2 || ly < 2 {
        return Err(Error::Geometry(format!("size {lx}x{ly} is degenerate, need at least 2x2")));
    }
    if expected_boundaries(style) != (bc_x, bc_y) {
        return Err(Error::Geometry(format!(
            "edge style {style:?} is inconsistent with boundaries ({bc_x:?}, {bc_y:?})"
        )));
    }
    if bc_y == Boundary::Periodic && ly % 2 == 1 {
        return Err(Error::Geometry(format!(
            "periodic y needs an even number of rows, got {ly}"
        )));
    }

    let mut raw_sites = Vec::with_capacity(2 * lx * ly);
    for row in 0..ly {
        for column in 0..lx {
            for sublattice in [Sublattice::A, Sublattice::B] {
                raw_sites.push((column, row, sublattice));
            }
        }
    }
    let raw_index = |c: usize, r: usize, s: Sublattice| (r * lx + c) * 2 + s as usize;

    let target = |c: usize, r: usize, dp: i64, dn: i64| -> Option<(usize, usize, i64, i64)> {
        let (c, r) = (c as i64, r as i64);
        let p = c - r.div_euclid(2);
        let r2 = r + dn;
        let c2 = p + dp + r2.div_euclid(2);
        let shift = (c2 - c, dn);
        let c2 = match bc_x {
            Boundary::Periodic => c2.rem_euclid(lx as i64),
            Boundary::Open if (0..lx as i64).contains(&c2) => c2,
            Boundary::Open => return None,
        };
        let r2 = match bc_y {
            Boundary::Periodic => r2.rem_euclid(ly as i64),
            Boundary::Open if (0..ly as i64).contains(&r2) => r2,
            Boundary::Open => return None,
        };
        Some((c2 as usize, r2 as usize, shift.0, shift.1))
    };

    let mut raw_nn = Vec::new();
    let mut raw_nnn = Vec::new();
    for &(c, r, s) in &raw_sites {
        let i = raw_index(c, r, s);
        if s == Sublattice::A {
            for (k, &(dp, dn)) in NN_SHEARED.iter().enumerate() {
                if let Some((c2, r2, dm, dr)) = target(c, r, dp, dn) {
                    raw_nn.push(Bond {
                        from: i,
                        to: raw_index(c2, r2, Sublattice::B),
                        shift: (dm, dr),
                        vector: NN_VECTORS[k],
                    });
                }
            }
        }
        for (k, &(dp, dn)) in NNN_SHEARED.iter().enumerate() {
            if let Some((c2, r2, dm, dr)) = target(c, r, dp, dn) {
                let j = raw_index(c2, r2, s);
                let v = NNN_VECTORS[k];
                let bond = match s {
                    Sublattice::A => Bond { from: i, to: j, shift: (dm, dr), vector: v },
                    Sublattice::B => Bond { from: j, to: i, shift: (-dm, -dr), vector: [-v[0], -v[1]] },
                };
                raw_nnn.push(bond);
            }
        }
    }

    let mut alive = vec![true; raw_sites.len()];
    if bc_x == Boundary::Open {
        loop {
            let mut degree = vec![0usize; raw_sites.len()];
            for b in &raw_nn {
                if alive[b.from] && alive[b.to] {
                    degree[b.from] += 1;
                    degree[b.to] += 1;
                }
            }
            let mut changed = false;
            for (i, live) in alive.iter_mut().enumerate() {
                if *live && degree[i] <= 1 {
                    *live = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    let mut remap = vec![usize::MAX; raw_sites.len()];
    let mut sites = Vec::new();
    let mut lookup = HashMap::new();
    for (i, &(column, row, sublattice)) in raw_sites.iter().enumerate() {
        if alive[i] {
            remap[i] = sites.len();
            lookup.insert((column, row, sublattice), sites.len());
            sites.push(Site { column, row, sublattice, position: site_position(column, row, sublattice) });
        }
    }
    if sites.is_empty() {
        return Err(Error::Geometry("no sites survive edge trimming".into()));
    }
    let keep = |b: &Bond| {
        (alive[b.from] && alive[b.to]).then(|| Bond { from: remap[b.from], to: remap[b.to], ..*b })
    };
    let nn: Vec<Bond> = raw_nn.iter().filter_map(keep).collect();
    let nnn: Vec<Bond> = raw_nnn.iter().filter_map(keep).collect();

    let x_min = sites.iter().map(|s| s.position[0]).fold(f64::INFINITY, f64::min);
    let x_max = sites.iter().map(|s| s.position[0]).fold(f64::NEG_INFINITY, f64::max);

    Ok(SiteGraph { lx, ly, bc_x, bc_y, style, sites, lookup, nn, nnn, x_bounds: (x_min, x_max) })
}

impl SiteGraph {
    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn bc_x(&self) -> Boundary {
        self.bc_x
    }

    pub fn bc_y(&self) -> Boundary {
        self.bc_y
    }

    pub fn edge_style(&self) -> EdgeStyle {
        self.style
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &Site {
        &self.sites[i]
    }

    pub fn index_of(&self, column: usize, row: usize, sublattice: Sublattice) -> Option<usize> {
        self.lookup.get(&(column, row, sublattice)).copied()
    }

    pub fn nn_bonds(&self) -> &[Bond] {
        &self.nn
    }

    pub fn nnn_bonds(&self) -> &[Bond] {
        &self.nnn
    }

    /// Nearest-neighbour count of every site (multi-bonds on tiny tori count separately).
    pub fn nn_coordination(&self) -> Vec<usize> {
        let mut deg = vec![0; self.sites.len()];
        for b in &self.nn {
            deg[b.from] += 1;
            deg[b.to] += 1;
        }
        deg
    }

    pub fn nnn_coordination(&self) -> Vec<usize> {
        let mut deg = vec![0; self.sites.len()];
        for b in &self.nnn {
            deg[b.from] += 1;
            deg[b.to] += 1;
        }
        deg
    }

    /// Length of the sample along x in units of the zigzag period.
    pub fn length_x(&self) -> f64 {
        self.lx as f64
    }

    /// Position along x in units of the zigzag period.
    pub fn x_in_cells(&self, i: usize) -> f64 {
        self.sites[i].position[0] / ZIGZAG_PERIOD
    }

    /// Centre of the rectangular column holding site `i`, in cells.
    pub fn column_center(&self, i: usize) -> f64 {
        self.sites[i].column as f64 + 0.5
    }

    pub fn open_edges(&self) -> Vec<EdgeSide> {
        let mut edges = Vec::new();
        if self.bc_y == Boundary::Open {
            edges.extend([EdgeSide::Lower, EdgeSide::Upper]);
        }
        if self.bc_x == Boundary::Open {
            edges.extend([EdgeSide::Left, EdgeSide::Right]);
        }
        edges
    }

    pub fn has_edge(&self, side: EdgeSide) -> bool {
        match side {
            EdgeSide::Lower | EdgeSide::Upper => self.bc_y == Boundary::Open,
            EdgeSide::Left | EdgeSide::Right => self.bc_x == Boundary::Open,
        }
    }

    /// Layer index of site `i` counted inward from `side` (0 = outermost).
    ///
    /// Zigzag layers are whole rows. Armchair layers are half-column slices
    /// of width `sqrt(3)/2`. Returns `None` when the side is periodic.
    pub fn edge_layer(&self, i: usize, side: EdgeSide) -> Option<usize> {
        if !self.has_edge(side) {
            return None;
        }
        let site = &self.sites[i];
        let half = SQRT3 / 2.0;
        Some(match side {
            EdgeSide::Lower => site.row,
            EdgeSide::Upper => self.ly - 1 - site.row,
            EdgeSide::Left => ((site.position[0] - self.x_bounds.0) / half).round() as usize,
            EdgeSide::Right => ((self.x_bounds.1 - site.position[0]) / half).round() as usize,
        })
    }

    /// Indices of the sites within the `depth` outermost layers of `side`.
    pub fn edge_sites(&self, side: EdgeSide, depth: usize) -> Result<Vec<usize>> {
        if !self.has_edge(side) {
            return Err(Error::Geometry(format!("the {} edge is periodic", side.name())));
        }
        Ok((0..self.sites.len())
            .filter(|&i| self.edge_layer(i, side).is_some_and(|l| l < depth))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_2x2_has_full_coordination() {
        let g = build_honeycomb(2, 2, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap();
        assert_eq!(g.num_sites(), 8);
        assert!(g.nn_coordination().iter().all(|&d| d == 3));
        assert!(g.nnn_coordination().iter().all(|&d| d == 6));
    }

    #[test]
    fn zigzag_boundary_rows_lose_one_bond() {
        let g = build_honeycomb(4, 3, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
        let deg = g.nn_coordination();
        for (i, s) in g.sites().iter().enumerate() {
            let outer = (s.row == 0 && s.sublattice == Sublattice::B)
                || (s.row == 2 && s.sublattice == Sublattice::A);
            assert_eq!(deg[i], if outer { 2 } else { 3 }, "site {s:?}");
        }
        let bottom = g.edge_sites(EdgeSide::Lower, 1).unwrap();
        assert_eq!(bottom.len(), 8);
        assert_eq!(bottom.iter().map(|&i| deg[i]).min(), Some(2));
    }

    #[test]
    fn inconsistent_styles_are_rejected() {
        use Boundary::*;
        assert!(build_honeycomb(4, 4, Periodic, Periodic, EdgeStyle::Zigzag).is_err());
        assert!(build_honeycomb(4, 4, Open, Open, EdgeStyle::Armchair).is_err());
        assert!(build_honeycomb(1, 4, Periodic, Periodic, EdgeStyle::Torus).is_err());
        assert!(build_honeycomb(3, 3, Open, Periodic, EdgeStyle::Armchair).is_err());
    }

    #[test]
    fn site_order_is_row_major() {
        let g = build_honeycomb(3, 4, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
        let keys: Vec<_> = g.sites().iter().map(|s| (s.row, s.column, s.sublattice)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let row0: Vec<usize> = g.edge_sites(EdgeSide::Lower, 1).unwrap();
        assert_eq!(row0, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn armchair_trimming_leaves_no_dangling_sites() {
        let g = build_honeycomb(20, 20, Boundary::Open, Boundary::Periodic, EdgeStyle::Armchair).unwrap();
        assert_eq!(g.num_sites(), 780);
        assert!(g.nn_coordination().iter().all(|&d| d >= 2));
        let r = build_honeycomb(20, 20, Boundary::Open, Boundary::Open, EdgeStyle::Rectangle).unwrap();
        assert_eq!(r.num_sites(), 776);
    }

    #[test]
    fn periodic_edge_has_no_layers() {
        let g = build_honeycomb(4, 4, Boundary::Periodic, Boundary::Open, EdgeStyle::Zigzag).unwrap();
        assert!(g.edge_sites(EdgeSide::Left, 2).is_err());
        assert_eq!(g.edge_layer(0, EdgeSide::Right), None);
    }
}
