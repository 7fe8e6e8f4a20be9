//! LC network with grounding resistors whose zero modes follow the
//! dissipative Haldane model.
//!
//! Every lattice site owns four nodes `X+, X-, Y+, Y-`. Admittances use the
//! `exp(-i w t)` convention: a capacitor is `-i w C`, an inductor
//! `i / (w L)`, a resistor `1 / R` and an INIC of magnitude `R` is `-1 / R`.
//! With `C1 = t1 C`, `C2 = t2 C`, `Cg = C`, `Lg = L` the spin combination
//! `U_up = (V_X+ - V_X-) + i (V_Y+ - V_Y-)` obeys
//! `(H + i diag(gamma)) U = E(w) U` at `w = w0 = 1 / sqrt(L C)` with
//! `gamma = -sqrt(L / C) / R`.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;

use crate::lattice::{Basis, LatticeOperator, SiteGraph, Sublattice, NN_VECTORS};
use crate::topology::BlochMap;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

impl NodeKind {
    pub const ALL: [NodeKind; 4] = [NodeKind::XPlus, NodeKind::XMinus, NodeKind::YPlus, NodeKind::YMinus];

    pub fn label(self) -> &'static str {
        match self {
            NodeKind::XPlus => "X+",
            NodeKind::XMinus => "X-",
            NodeKind::YPlus => "Y+",
            NodeKind::YMinus => "Y-",
        }
    }

    fn from_label(s: &str) -> Option<Self> {
        NodeKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// Node index `4 * site + kind`.
pub fn node(site: usize, kind: NodeKind) -> usize {
    4 * site + kind as usize
}

pub fn node_site(n: usize) -> usize {
    n / 4
}

pub fn node_kind(n: usize) -> NodeKind {
    NodeKind::ALL[n % 4]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Cap,
    Ind,
    Res,
    /// Negative resistance of the stated magnitude.
    Inic,
    CapG,
    IndG,
}

impl ComponentKind {
    pub fn name(self) -> &'static str {
        match self {
            ComponentKind::Cap => "CAP",
            ComponentKind::Ind => "IND",
            ComponentKind::Res => "RES",
            ComponentKind::Inic => "INIC",
            ComponentKind::CapG => "CAPG",
            ComponentKind::IndG => "INDG",
        }
    }

    /// Admittance at angular frequency `w`.
    pub fn admittance(self, value: f64, w: f64) -> C64 {
        match self {
            ComponentKind::Cap | ComponentKind::CapG => C64::new(0.0, -w * value),
            ComponentKind::Ind | ComponentKind::IndG => C64::new(0.0, 1.0 / (w * value)),
            ComponentKind::Res => C64::new(1.0 / value, 0.0),
            ComponentKind::Inic => C64::new(-1.0 / value, 0.0),
        }
    }
}

impl FromStr for ComponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "CAP" => ComponentKind::Cap,
            "IND" => ComponentKind::Ind,
            "RES" => ComponentKind::Res,
            "INIC" => ComponentKind::Inic,
            "CAPG" => ComponentKind::CapG,
            "INDG" => ComponentKind::IndG,
            other => return Err(Error::Netlist(format!("unknown component kind {other:?}"))),
        })
    }
}

/// One two-terminal element; `b = None` means ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    pub a: usize,
    pub b: Option<usize>,
    pub value: f64,
    /// Cell displacement from `a`'s cell to `b`'s cell, for Bloch sums.
    pub shift: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitNetlist {
    pub c: f64,
    pub l: f64,
    pub components: Vec<Component>,
    sites: Vec<SiteInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SiteInfo {
    sublattice: Sublattice,
    /// Rectangular cell of the site; translation images share `home`.
    home: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    pub t1: f64,
    pub t2: f64,
    /// Must be `+pi/2` or `-pi/2`.
    pub phi: f64,
    pub c: f64,
    pub l: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self { t1: 1.0, t2: 0.2, phi: FRAC_PI_2, c: 1.0, l: 1.0 }
    }
}

impl CircuitParams {
    pub fn omega0(&self) -> f64 {
        1.0 / (self.l * self.c).sqrt()
    }
}

/// Grounding resistance realizing on-site dissipation `gamma`; `None` for zero.
pub fn resistance_for(gamma: f64, c: f64, l: f64) -> Option<f64> {
    (gamma != 0.0).then(|| -(l / c).sqrt() / gamma)
}

/// Inverse of [`resistance_for`].
pub fn gamma_for(resistance: f64, c: f64, l: f64) -> f64 {
    -(l / c).sqrt() / resistance
}

fn cell_offset(s: Sublattice) -> [f64; 2] {
    match s {
        Sublattice::A => [0.0, 0.0],
        Sublattice::B => NN_VECTORS[2],
    }
}

/// Builds the network for `graph` with on-site dissipation `gamma`.
///
/// Sites missing bonds at open edges get extra grounding capacitance so the
/// diagonal matches the bulk.
pub fn build_circuit(graph: &SiteGraph, p: &CircuitParams, gamma: &[f64]) -> Result<CircuitNetlist> {
    if gamma.len() != graph.num_sites() {
        return Err(Error::Dimension { expected: graph.num_sites(), found: gamma.len() });
    }
    let phase_sign = if (p.phi - FRAC_PI_2).abs() < 1e-12 {
        1.0
    } else if (p.phi + FRAC_PI_2).abs() < 1e-12 {
        -1.0
    } else {
        return Err(Error::InvalidArgument(format!("the wiring realizes phi = +-pi/2 only, got {}", p.phi)));
    };
    if !(p.c > 0.0 && p.l > 0.0 && p.t1 > 0.0 && p.t2 >= 0.0) {
        return Err(Error::InvalidArgument("C, L, t1 must be positive and t2 non-negative".into()));
    }
    let sites: Vec<SiteInfo> = graph
        .sites()
        .iter()
        .map(|s| SiteInfo { sublattice: s.sublattice, home: s.column == 0 && s.row == 0 })
        .collect();
    let shift_of = |from: usize, to: usize, vector: [f64; 2]| {
        let (a, b) = (cell_offset(graph.site(from).sublattice), cell_offset(graph.site(to).sublattice));
        [vector[0] + a[0] - b[0], vector[1] + a[1] - b[1]]
    };
    let mut components = Vec::new();
    let mut couple = |kind, a: usize, b: usize, value, shift| components.push(Component { kind, a, b: Some(b), value, shift });
    let c1 = p.t1 * p.c;
    let c2 = p.t2 * p.c;
    for bond in graph.nn_bonds() {
        let shift = shift_of(bond.from, bond.to, bond.vector);
        for kind in NodeKind::ALL {
            couple(ComponentKind::Cap, node(bond.from, kind), node(bond.to, kind), c1, shift);
        }
    }
    if c2 > 0.0 {
        for bond in graph.nnn_bonds() {
            // The pattern below gives H[i][j] = -i t2 for i -> j.
            let (i, j, shift) = if phase_sign < 0.0 {
                (bond.from, bond.to, shift_of(bond.from, bond.to, bond.vector))
            } else {
                (bond.to, bond.from, shift_of(bond.to, bond.from, [-bond.vector[0], -bond.vector[1]]))
            };
            use NodeKind::*;
            let back = [-shift[0], -shift[1]];
            couple(ComponentKind::Cap, node(i, XPlus), node(j, YPlus), c2, shift);
            couple(ComponentKind::Cap, node(i, XMinus), node(j, YMinus), c2, shift);
            couple(ComponentKind::Cap, node(j, XPlus), node(i, YMinus), c2, back);
            couple(ComponentKind::Cap, node(j, XMinus), node(i, YPlus), c2, back);
        }
    }
    let nn = graph.nn_coordination();
    let nnn = graph.nnn_coordination();
    for site in 0..graph.num_sites() {
        use NodeKind::*;
        components.push(Component { kind: ComponentKind::Ind, a: node(site, XPlus), b: Some(node(site, XMinus)), value: p.l, shift: [0.0; 2] });
        components.push(Component { kind: ComponentKind::Ind, a: node(site, YPlus), b: Some(node(site, YMinus)), value: p.l, shift: [0.0; 2] });
        let missing = (3usize.saturating_sub(nn[site])) as f64 * c1 + (6usize.saturating_sub(nnn[site])) as f64 * c2;
        let resistance = resistance_for(gamma[site], p.c, p.l);
        for kind in NodeKind::ALL {
            let n = node(site, kind);
            let ground = |kind, value| Component { kind, a: n, b: None, value, shift: [0.0; 2] };
            components.push(ground(ComponentKind::CapG, p.c + missing));
            components.push(ground(ComponentKind::IndG, p.l));
            match resistance {
                Some(r) if r > 0.0 => components.push(ground(ComponentKind::Res, r)),
                Some(r) => components.push(ground(ComponentKind::Inic, -r)),
                None => {}
            }
        }
    }
    Ok(CircuitNetlist { c: p.c, l: p.l, components, sites })
}

impl CircuitNetlist {
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn num_nodes(&self) -> usize {
        4 * self.sites.len()
    }

    pub fn omega0(&self) -> f64 {
        1.0 / (self.l * self.c).sqrt()
    }

    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }

    /// Scales every capacitor joining like nodes (the nearest-neighbour couplings).
    pub fn scale_nn_couplings(&mut self, factor: f64) {
        for comp in &mut self.components {
            if comp.kind == ComponentKind::Cap && comp.b.is_some_and(|b| node_kind(b) == node_kind(comp.a)) {
                comp.value *= factor;
            }
        }
    }

    /// Writes one `KIND nodeA nodeB value` line per component.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        text.parse()
    }
}

fn node_name(n: usize) -> String {
    format!("{}{}", node_site(n), node_kind(n).label())
}

fn parse_node(s: &str) -> Result<Option<usize>> {
    if s == "GND" {
        return Ok(None);
    }
    let split = s.len().checked_sub(2).filter(|&i| s.is_char_boundary(i));
    let (site, kind) = split.map(|i| s.split_at(i)).ok_or_else(|| Error::Netlist(format!("bad node {s:?}")))?;
    let site: usize = site.parse().map_err(|_| Error::Netlist(format!("bad node {s:?}")))?;
    let kind = NodeKind::from_label(kind).ok_or_else(|| Error::Netlist(format!("bad node {s:?}")))?;
    Ok(Some(node(site, kind)))
}

impl fmt::Display for CircuitNetlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# C {:e}", self.c)?;
        writeln!(f, "# L {:e}", self.l)?;
        for (i, s) in self.sites.iter().enumerate() {
            writeln!(f, "# SITE {i} {:?} {}", s.sublattice, if s.home { "home" } else { "-" })?;
        }
        for comp in &self.components {
            let b = comp.b.map_or_else(|| "GND".to_string(), node_name);
            write!(f, "{} {} {} {:e}", comp.kind.name(), node_name(comp.a), b, comp.value)?;
            if comp.shift != [0.0, 0.0] {
                write!(f, " # {:e} {:e}", comp.shift[0], comp.shift[1])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for CircuitNetlist {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Netlist(format!("line {}: {msg}", line + 1));
        let num = |line: usize, s: &str| s.parse::<f64>().map_err(|_| bad(line, &format!("bad number {s:?}")));
        let (mut c, mut l) = (None, None);
        let mut sites: Vec<SiteInfo> = Vec::new();
        let mut components = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let (body, comment) = match raw.find('#') {
                Some(i) => (&raw[..i], Some(&raw[i + 1..])),
                None => (raw, None),
            };
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.is_empty() {
                let meta: Vec<&str> = comment.unwrap_or("").split_whitespace().collect();
                match meta.as_slice() {
                    ["C", v] => c = Some(num(ln, v)?),
                    ["L", v] => l = Some(num(ln, v)?),
                    ["SITE", idx, sub, home] => {
                        if idx.parse::<usize>().ok() != Some(sites.len()) {
                            return Err(bad(ln, "sites must be listed in order"));
                        }
                        let sublattice = match *sub {
                            "A" => Sublattice::A,
                            "B" => Sublattice::B,
                            _ => return Err(bad(ln, "bad sublattice")),
                        };
                        sites.push(SiteInfo { sublattice, home: *home == "home" });
                    }
                    _ => {}
                }
                continue;
            }
            let [kind, a, b, value] = fields.as_slice() else {
                return Err(bad(ln, "expected `KIND nodeA nodeB value`"));
            };
            let kind: ComponentKind = kind.parse()?;
            let a = parse_node(a)?.ok_or_else(|| bad(ln, "first node cannot be ground"))?;
            let b = parse_node(b)?;
            let value = num(ln, value)?;
            let shift = match comment.map(|c| c.split_whitespace().collect::<Vec<_>>()) {
                Some(s) if s.len() == 2 => [num(ln, s[0])?, num(ln, s[1])?],
                _ => [0.0, 0.0],
            };
            components.push(Component { kind, a, b, value, shift });
        }
        let (c, l) = c.zip(l).ok_or_else(|| Error::Netlist("missing `# C` or `# L` header".into()))?;
        let max_node = components.iter().flat_map(|c| [Some(c.a), c.b]).flatten().max().unwrap_or(0);
        if sites.is_empty() {
            sites = vec![SiteInfo { sublattice: Sublattice::A, home: false }; max_node / 4 + 1];
        } else if max_node >= 4 * sites.len() {
            return Err(Error::Netlist(format!("node {} refers to an undeclared site", node_name(max_node))));
        }
        Ok(CircuitNetlist { c, l, components, sites })
    }
}

/// Node-space matrix `Y(w)` with injected currents `I = Y V`.
pub fn kirchhoff_matrix(netlist: &CircuitNetlist, w: f64) -> Result<LatticeOperator> {
    if !(w > 0.0) {
        return Err(Error::InvalidArgument("frequency must be positive".into()));
    }
    let n = netlist.num_nodes();
    let mut y = Array2::<C64>::zeros((n, n));
    for comp in &netlist.components {
        let adm = comp.kind.admittance(comp.value, w);
        y[[comp.a, comp.a]] += adm;
        if let Some(b) = comp.b {
            y[[b, b]] += adm;
            y[[comp.a, b]] -= adm;
            y[[b, comp.a]] -= adm;
        }
    }
    LatticeOperator::new(y, Basis::Nodes)
}

/// Part of `Y(w)` coming from two-terminal couplings only.
pub fn coupling_matrix(netlist: &CircuitNetlist, w: f64) -> Array2<C64> {
    let n = netlist.num_nodes();
    let mut y = Array2::<C64>::zeros((n, n));
    for comp in netlist.components.iter().filter(|c| c.b.is_some()) {
        let b = comp.b.unwrap();
        let adm = comp.kind.admittance(comp.value, w);
        y[[comp.a, comp.a]] += adm;
        y[[b, b]] += adm;
        y[[comp.a, b]] -= adm;
        y[[b, comp.a]] -= adm;
    }
    y
}

/// `E(w) = 3 t1 + 6 t2 - 2 w0^2 / w^2`.
pub fn spin_energy(t1: f64, t2: f64, w: f64, w0: f64) -> f64 {
    3.0 * t1 + 6.0 * t2 - 2.0 * w0 * w0 / (w * w)
}

const SPIN_UP_LEFT: [C64; 4] = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
const SPIN_UP_RIGHT: [C64; 4] = [C64::new(0.25, 0.0), C64::new(-0.25, 0.0), C64::new(0.0, -0.25), C64::new(0.0, 0.25)];
const SPIN_DOWN_RIGHT: [C64; 4] = [C64::new(0.25, 0.0), C64::new(-0.25, 0.0), C64::new(0.0, 0.25), C64::new(0.0, -0.25)];

/// Sandwiches a node-space block (`4m x 4m`) between spin projectors.
fn project(y: &Array2<C64>, right: &[C64; 4]) -> Array2<C64> {
    let m = y.nrows() / 4;
    let mut out = Array2::<C64>::zeros((m, m));
    for a in 0..m {
        for b in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..4 {
                for q in 0..4 {
                    acc += SPIN_UP_LEFT[p] * y[[4 * a + p, 4 * b + q]] * right[q];
                }
            }
            out[[a, b]] = acc;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SpinReduction {
    /// `E(w) - (L Y R) / (-i w C)` in the spin-up sector.
    pub matrix: Array2<C64>,
    pub energy: f64,
    /// Largest entry coupling spin up to spin down.
    pub leakage: f64,
}

fn spin_reduce(y: &Array2<C64>, netlist: &CircuitNetlist, t1: f64, t2: f64, w: f64) -> SpinReduction {
    let energy = spin_energy(t1, t2, w, netlist.omega0());
    let scale = C64::new(0.0, -w * netlist.c);
    let up = project(y, &SPIN_UP_RIGHT);
    let down = project(y, &SPIN_DOWN_RIGHT);
    let mut matrix = up.mapv(|z| -z / scale);
    for i in 0..matrix.nrows() {
        matrix[[i, i]] += energy;
    }
    let leakage = down.iter().map(|z| (z / scale).norm()).fold(0.0, f64::max);
    SpinReduction { matrix, energy, leakage }
}

/// Bloch node matrix for the sublattice pair, `8 x 8` in node order of (A, B).
pub fn bloch_node_matrix(netlist: &CircuitNetlist, k: [f64; 2], w: f64) -> Result<Array2<C64>> {
    let home: Vec<usize> = (0..netlist.num_sites()).filter(|&s| netlist.sites[s].home).collect();
    let slot = |s: usize| netlist.sites[s].sublattice as usize;
    if home.len() != 2 || slot(home[0]) == slot(home[1]) {
        return Err(Error::NotTranslationInvariant("netlist has no complete home cell".into()));
    }
    // Grounding must be identical on every site of a sublattice.
    let mut ground: HashMap<(usize, usize), C64> = HashMap::new();
    for comp in netlist.components.iter().filter(|c| c.b.is_none()) {
        *ground.entry((comp.a / 4, comp.a % 4)).or_default() += comp.kind.admittance(comp.value, w);
    }
    let mut reference: [[Option<C64>; 4]; 2] = [[None; 4]; 2];
    for ((site, kind), adm) in &ground {
        let r = &mut reference[slot(*site)][*kind];
        match r {
            None => *r = Some(*adm),
            Some(v) if (*v - adm).norm() > 1e-12 * v.norm().max(1.0) => {
                return Err(Error::NotTranslationInvariant("grounding varies between cells".into()))
            }
            _ => {}
        }
    }
    let mut y = Array2::<C64>::zeros((8, 8));
    for (sub, row) in reference.iter().enumerate() {
        for (kind, adm) in row.iter().enumerate() {
            y[[4 * sub + kind, 4 * sub + kind]] += adm.unwrap_or_default();
        }
    }
    let dot = |a: [f64; 2]| k[0] * a[0] + k[1] * a[1];
    for comp in &netlist.components {
        let Some(b) = comp.b else { continue };
        if !netlist.sites[node_site(comp.a)].home {
            continue;
        }
        let adm = comp.kind.admittance(comp.value, w);
        let ia = 4 * slot(node_site(comp.a)) + comp.a % 4;
        let ib = 4 * slot(node_site(b)) + b % 4;
        let phase = C64::from_polar(1.0, dot(comp.shift));
        y[[ia, ia]] += adm;
        y[[ib, ib]] += adm;
        y[[ia, ib]] -= adm * phase;
        y[[ib, ia]] -= adm * phase.conj();
    }
    Ok(y)
}

/// Spin-up Bloch matrix at momentum `k` and its energy offset `E(w)`.
pub fn reduce_to_spin_basis(netlist: &CircuitNetlist, t1: f64, t2: f64, k: [f64; 2], w: f64) -> Result<SpinReduction> {
    let y = bloch_node_matrix(netlist, k, w)?;
    Ok(spin_reduce(&y, netlist, t1, t2, w))
}

/// Real-space spin-up operator of a finite network.
pub fn reduce_real_space(netlist: &CircuitNetlist, t1: f64, t2: f64, w: f64) -> Result<SpinReduction> {
    let y = kirchhoff_matrix(netlist, w)?.into_matrix();
    Ok(spin_reduce(&y, netlist, t1, t2, w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Largest entrywise deviation over all samples.
    pub max_deviation: f64,
    pub max_diagonal_deviation: f64,
    pub max_offdiagonal_deviation: f64,
    /// Largest spin-up to spin-down coupling.
    pub max_leakage: f64,
    pub energy: f64,
    /// `(k, deviation)` per sample.
    pub per_k: Vec<([f64; 2], f64)>,
}

/// Compares the reduced network with `map` at every momentum in `ks`.
pub fn verify_haldane_equivalence(netlist: &CircuitNetlist, map: &BlochMap, ks: &[[f64; 2]], w: f64) -> Result<EquivalenceReport> {
    let mut report = EquivalenceReport {
        max_deviation: 0.0,
        max_diagonal_deviation: 0.0,
        max_offdiagonal_deviation: 0.0,
        max_leakage: 0.0,
        energy: spin_energy(map.t1, map.t2, w, netlist.omega0()),
        per_k: Vec::with_capacity(ks.len()),
    };
    for &k in ks {
        let red = reduce_to_spin_basis(netlist, map.t1, map.t2, k, w)?;
        let h = map.matrix(k);
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let d = (red.matrix[[i, j]] - h[i][j]).norm();
                worst = worst.max(d);
                if i == j {
                    report.max_diagonal_deviation = report.max_diagonal_deviation.max(d);
                } else {
                    report.max_offdiagonal_deviation = report.max_offdiagonal_deviation.max(d);
                }
            }
        }
        report.max_deviation = report.max_deviation.max(worst);
        report.max_leakage = report.max_leakage.max(red.leakage);
        report.per_k.push((k, worst));
    }
    Ok(report)
}

/// Frequency at which a lossless network with `Cg = C`, `Lg = L` has a zero
/// mode for lattice eigenvalue `lambda`, if one exists.
pub fn resonance_frequency(lambda: f64, t1: f64, t2: f64, w0: f64) -> Option<f64> {
    // lambda = 3 t1 + 6 t2 + 1 - 3 w0^2 / w^2
    let denom = 3.0 * t1 + 6.0 * t2 + 1.0 - lambda;
    (denom > 0.0).then(|| w0 * (3.0 / denom).sqrt())
}

/// Smallest singular value of `Y` relative to the largest.
pub fn relative_null_gap(y: &Array2<C64>) -> Result<f64> {
    let (_, sv, _) = y.svd(false, false).map_err(|e| Error::Eigensolver(e.to_string()))?;
    let sv: Array1<f64> = sv;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(min / max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_honeycomb, Boundary, EdgeStyle};

    fn torus() -> SiteGraph {
        build_honeycomb(3, 2, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap()
    }

    #[test]
    fn lossless_network_has_no_resistors() {
        let net = build_circuit(&torus(), &CircuitParams::default(), &vec![0.0; 12]).unwrap();
        assert_eq!(net.count(ComponentKind::Res) + net.count(ComponentKind::Inic), 0);
        assert_eq!(net.num_nodes(), 48);
    }

    #[test]
    fn resistance_mapping() {
        assert_eq!(resistance_for(-0.1, 1.0, 1.0), Some(10.0));
        assert_eq!(resistance_for(0.0, 1.0, 1.0), None);
        let r = resistance_for(0.3, 2.0, 0.5).unwrap();
        assert_eq!(gamma_for(r, 2.0, 0.5), 0.3);
    }

    #[test]
    fn staggered_gain_uses_inics_on_a() {
        let g = torus();
        let gamma: Vec<f64> = g.sites().iter().map(|s| if s.sublattice == Sublattice::A { 0.3 } else { -0.3 }).collect();
        let net = build_circuit(&g, &CircuitParams::default(), &gamma).unwrap();
        for comp in &net.components {
            match comp.kind {
                ComponentKind::Inic => assert_eq!(g.site(node_site(comp.a)).sublattice, Sublattice::A),
                ComponentKind::Res => assert_eq!(g.site(node_site(comp.a)).sublattice, Sublattice::B),
                _ => {}
            }
        }
        assert_eq!(net.count(ComponentKind::Inic), 24);
        assert_eq!(net.count(ComponentKind::Res), 24);
    }

    #[test]
    fn coupling_part_conserves_current() {
        let net = build_circuit(&torus(), &CircuitParams::default(), &vec![0.0; 12]).unwrap();
        let y = coupling_matrix(&net, 1.3);
        for col in y.columns() {
            assert!(col.sum().norm() < 1e-12);
        }
        let full = kirchhoff_matrix(&net, 1.3).unwrap().into_matrix();
        assert!((&full - &full.t()).iter().all(|z| z.norm() == 0.0));
        assert!((&full + &full.t().mapv(|z| z.conj())).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn internal_inductor_block() {
        let g = build_honeycomb(2, 2, Boundary::Periodic, Boundary::Periodic, EdgeStyle::Torus).unwrap();
        let net = build_circuit(&g, &CircuitParams::default(), &vec![0.0; 8]).unwrap();
        let w0 = net.omega0();
        let mut only_l = net.clone();
        only_l.components.retain(|c| c.kind == ComponentKind::Ind);
        let y = kirchhoff_matrix(&only_l, w0).unwrap().into_matrix();
        let expect = C64::new(1.0, 0.0) / C64::new(0.0, w0);
        use NodeKind::*;
        assert!((y[[node(0, XPlus), node(0, XMinus)]] - expect).norm() < 1e-15);
        assert!((y[[node(0, YMinus), node(0, YPlus)]] - expect).norm() < 1e-15);
        assert!((y[[node(0, XPlus), node(0, XPlus)]] + expect).norm() < 1e-15);
        assert_eq!(y[[node(0, XPlus), node(0, YPlus)]], C64::new(0.0, 0.0));
    }

    #[test]
    fn energy_at_resonance() {
        assert!((spin_energy(1.0, 0.2, 1.0, 1.0) - 2.2).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let g = torus();
        let gamma: Vec<f64> = (0..12).map(|i| if i % 3 == 0 { -0.1 } else { 0.2 }).collect();
        let net = build_circuit(&g, &CircuitParams::default(), &gamma).unwrap();
        let text = net.to_text();
        assert!(text.lines().any(|l| l.starts_with("RES 0X+ GND")));
        let back = CircuitNetlist::from_text(&text).unwrap();
        assert_eq!(back, net);
        assert!(CircuitNetlist::from_text("# C 1\n# L 1\nFOO 0X+ GND 1").is_err());
        assert!(CircuitNetlist::from_text("# C 1\n# L 1\nCAP 0Q+ GND 1").is_err());
    }
}
