//! Chiral modes on a closed loop with weak inhomogeneous dissipation.
//!
//! A mode with velocity `v` and wave number `k = 2 pi n / L` has
//! `psi(x) ~ exp(i k x) exp(G(x) / v)` with `G(x)` the integral of the
//! zero-mean part of `gamma` from 0 to `x`, and energy `v k + i gamma_bar`.

use rand::Rng;

use crate::{Error, Result, C64};

const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Constant(Vec<Segment>),
    /// Periodic linear interpolation through `(knots[i], values[i])`.
    Linear { knots: Vec<f64>, values: Vec<f64> },
}

/// Dissipation `gamma(x)` on a loop `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationField {
    length: f64,
    shape: Shape,
    average: f64,
}

impl DissipationField {
    pub fn piecewise_constant(segments: Vec<Segment>) -> Result<Self> {
        let first = segments.first().ok_or_else(|| Error::InvalidArgument("no segments".into()))?;
        if first.start != 0.0 {
            return Err(Error::InvalidArgument(format!("first segment starts at {}", first.start)));
        }
        for w in segments.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::InvalidArgument(format!(
                    "segments leave a gap or overlap at {} / {}",
                    w[0].end, w[1].start
                )));
            }
        }
        if segments.iter().any(|s| !(s.end > s.start) || !s.gamma.is_finite()) {
            return Err(Error::InvalidArgument("segments must have positive length and finite values".into()));
        }
        let length = segments.last().unwrap().end;
        let average = if segments.iter().all(|s| s.gamma == segments[0].gamma) {
            segments[0].gamma
        } else {
            segments.iter().map(|s| s.gamma * (s.end - s.start)).sum::<f64>() / length
        };
        Ok(Self { length, shape: Shape::Constant(segments), average })
    }

    /// Consecutive segments of the given lengths and strengths.
    pub fn from_lengths(parts: &[(f64, f64)]) -> Result<Self> {
        let mut x = 0.0;
        let mut segments = Vec::with_capacity(parts.len());
        for &(gamma, len) in parts {
            segments.push(Segment { start: x, end: x + len, gamma });
            x += len;
        }
        Self::piecewise_constant(segments)
    }

    /// One unit-length segment per value, adjacent equal values merged.
    pub fn from_cell_values(values: &[f64]) -> Result<Self> {
        let mut segments: Vec<Segment> = Vec::new();
        for (c, &g) in values.iter().enumerate() {
            match segments.last_mut() {
                Some(last) if last.gamma == g => last.end = (c + 1) as f64,
                _ => segments.push(Segment { start: c as f64, end: (c + 1) as f64, gamma: g }),
            }
        }
        Self::piecewise_constant(segments)
    }

    /// Continuous periodic field interpolating linearly between knots.
    pub fn piecewise_linear(length: f64, knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::InvalidArgument("need matching knots and values, at least two".into()));
        }
        if knots[0] != 0.0 || knots.windows(2).any(|w| !(w[1] > w[0])) || *knots.last().unwrap() >= length {
            return Err(Error::InvalidArgument("knots must increase from 0 and stay below L".into()));
        }
        let mut integral = 0.0;
        for i in 0..knots.len() {
            let (x0, x1) = (knots[i], knots.get(i + 1).copied().unwrap_or(length));
            let (g0, g1) = (values[i], values[(i + 1) % values.len()]);
            integral += 0.5 * (g0 + g1) * (x1 - x0);
        }
        Ok(Self { length, shape: Shape::Linear { knots, values }, average: integral / length })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Loop average of `gamma`.
    pub fn average(&self) -> f64 {
        self.average
    }

    pub fn is_continuous(&self) -> bool {
        match &self.shape {
            Shape::Linear { .. } => true,
            Shape::Constant(s) => s.iter().all(|seg| seg.gamma == s[0].gamma),
        }
    }

    pub fn segments(&self) -> Option<&[Segment]> {
        match &self.shape {
            Shape::Constant(s) => Some(s),
            Shape::Linear { .. } => None,
        }
    }

    /// Breakpoints of the field, from 0 to L inclusive.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = match &self.shape {
            Shape::Constant(s) => s.iter().map(|seg| seg.start).collect(),
            Shape::Linear { knots, .. } => knots.clone(),
        };
        pts.push(self.length);
        pts
    }

    fn wrap(&self, x: f64) -> f64 {
        let y = x.rem_euclid(self.length);
        if y >= self.length {
            0.0
        } else {
            y
        }
    }

    /// `gamma(x)`; at a jump the value on the right is returned.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = self.wrap(x);
        match &self.shape {
            Shape::Constant(s) => {
                let i = s.partition_point(|seg| seg.end <= x).min(s.len() - 1);
                s[i].gamma
            }
            Shape::Linear { knots, values } => {
                let i = knots.partition_point(|&k| k <= x) - 1;
                let x0 = knots[i];
                let x1 = knots.get(i + 1).copied().unwrap_or(self.length);
                let (g0, g1) = (values[i], values[(i + 1) % values.len()]);
                g0 + (g1 - g0) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn global_at(&self, x: f64) -> f64 {
        self.value_at(x) - self.average
    }

    /// `integral_0^x (gamma - gamma_bar)` for `x` in `[0, L]`, exact.
    pub fn integrated_global(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.length);
        let mut acc = 0.0;
        match &self.shape {
            Shape::Constant(s) => {
                for seg in s {
                    if x <= seg.start {
                        break;
                    }
                    let hi = x.min(seg.end);
                    acc += (seg.gamma - self.average) * (hi - seg.start);
                }
            }
            Shape::Linear { knots, values } => {
                for i in 0..knots.len() {
                    let x0 = knots[i];
                    if x <= x0 {
                        break;
                    }
                    let x1 = knots.get(i + 1).copied().unwrap_or(self.length);
                    let (g0, g1) = (values[i], values[(i + 1) % values.len()]);
                    let hi = x.min(x1);
                    let g_hi = g0 + (g1 - g0) * (hi - x0) / (x1 - x0);
                    acc += (0.5 * (g0 + g_hi) - self.average) * (hi - x0);
                }
            }
        }
        acc
    }

    /// Sign pattern of `gamma - gamma_bar` as consecutive intervals covering `[0, L)`.
    fn sign_intervals(&self) -> Vec<(f64, f64, i8)> {
        let scale = self.scale().max(f64::MIN_POSITIVE);
        let sign = |g: f64| -> i8 {
            if g.abs() <= ZERO_TOL * scale {
                0
            } else if g > 0.0 {
                1
            } else {
                -1
            }
        };
        let mut out: Vec<(f64, f64, i8)> = Vec::new();
        let mut push = |a: f64, b: f64, s: i8| {
            if b <= a {
                return;
            }
            match out.last_mut() {
                Some(last) if last.2 == s && last.1 == a => last.1 = b,
                _ => out.push((a, b, s)),
            }
        };
        match &self.shape {
            Shape::Constant(s) => {
                for seg in s {
                    push(seg.start, seg.end, sign(seg.gamma - self.average));
                }
            }
            Shape::Linear { knots, values } => {
                for i in 0..knots.len() {
                    let x0 = knots[i];
                    let x1 = knots.get(i + 1).copied().unwrap_or(self.length);
                    let g0 = values[i] - self.average;
                    let g1 = values[(i + 1) % values.len()] - self.average;
                    let (s0, s1) = (sign(g0), sign(g1));
                    if s0 == 0 && s1 == 0 {
                        push(x0, x1, 0);
                    } else if s0 * s1 < 0 {
                        let root = x0 + (x1 - x0) * g0 / (g0 - g1);
                        push(x0, root, s0);
                        push(root, x1, s1);
                    } else {
                        push(x0, x1, if s0 != 0 { s0 } else { s1 });
                    }
                }
            }
        }
        out
    }

    fn scale(&self) -> f64 {
        match &self.shape {
            Shape::Constant(s) => s.iter().map(|seg| seg.gamma.abs()).fold(0.0, f64::max),
            Shape::Linear { values, .. } => values.iter().map(|g| g.abs()).fold(0.0, f64::max),
        }
    }
}

/// Loop average `(1/L) integral gamma`.
pub fn average_dissipation(field: &DissipationField) -> f64 {
    field.average()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallType {
    /// `gamma_global` turns from negative to positive; traps `v < 0` modes.
    A,
    /// `gamma_global` turns from positive to negative; traps `v > 0` modes.
    B,
}

impl WallType {
    /// Wall type that traps modes moving with velocity `v`.
    pub fn trapping(v: f64) -> Self {
        if v < 0.0 {
            WallType::A
        } else {
            WallType::B
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub position: f64,
    pub kind: WallType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GddwSet {
    pub walls: Vec<Wall>,
    pub gamma_bar: f64,
    /// Intervals where `gamma_global` vanishes identically.
    pub plateaus: Vec<(f64, f64)>,
}

impl GddwSet {
    /// No sign change anywhere: chiral modes stay extended.
    pub fn is_trivial(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn of_type(&self, kind: WallType) -> impl Iterator<Item = &Wall> {
        self.walls.iter().filter(move |w| w.kind == kind)
    }
}

/// Locates the sign changes of `gamma - gamma_bar` around the loop.
///
/// Across a zero plateau the wall is placed where the new sign begins and the
/// plateau is listed separately. A wall at the seam is reported at 0.
pub fn detect_gddws(field: &DissipationField) -> GddwSet {
    let intervals = field.sign_intervals();
    let plateaus: Vec<(f64, f64)> = intervals.iter().filter(|iv| iv.2 == 0).map(|iv| (iv.0, iv.1)).collect();
    let nonzero: Vec<usize> = (0..intervals.len()).filter(|&i| intervals[i].2 != 0).collect();
    let mut walls = Vec::new();
    if nonzero.len() >= 2 {
        for (n, &i) in nonzero.iter().enumerate() {
            let j = nonzero[(n + 1) % nonzero.len()];
            let (from, to) = (intervals[i].2, intervals[j].2);
            if from != to {
                let pos = intervals[j].0;
                let position = if pos >= field.length() { 0.0 } else { pos };
                let kind = if to > 0 { WallType::A } else { WallType::B };
                walls.push(Wall { position, kind });
            }
        }
    }
    walls.sort_by(|a, b| a.position.total_cmp(&b.position));
    GddwSet { walls, gamma_bar: field.average(), plateaus }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentEnvelope {
    pub start: f64,
    pub end: f64,
    /// Growth rate of `|psi|` on the segment.
    pub alpha: f64,
    /// `psi = exp(alpha (x - start)) / matching` on the segment, with `matching = 1` on the first one.
    pub matching: f64,
}

impl SegmentEnvelope {
    /// Decay length `1 / |alpha|` of `|psi|`; infinite on flat segments.
    pub fn localization_length(&self) -> f64 {
        1.0 / self.alpha.abs()
    }

    fn amplitude(&self, x: f64) -> f64 {
        (self.alpha * (x - self.start)).exp() / self.matching
    }
}

#[derive(Debug, Clone)]
pub struct ChiralModeSolution {
    pub k: f64,
    pub v: f64,
    pub energy: C64,
    pub gamma_bar: f64,
    /// Closed-form envelope, present for piecewise-constant fields.
    pub envelope: Option<Vec<SegmentEnvelope>>,
    /// Factor making `integral |psi|^2 dx = 1`.
    pub norm: f64,
    /// `(x, |psi(x)|^2)` on a uniform grid over `[0, L)`.
    pub samples: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
    field: DissipationField,
}

pub const DEFAULT_GRID: usize = 1000;

impl ChiralModeSolution {
    pub fn field(&self) -> &DissipationField {
        &self.field
    }

    /// `|psi(x)|^2` from the integrated field; periodic in `x`.
    pub fn density(&self, x: f64) -> f64 {
        let x = self.field.wrap(x);
        self.norm * self.norm * (2.0 * self.field.integrated_global(x) / self.v).exp()
    }

    pub fn psi(&self, x: f64) -> C64 {
        let amp = self.norm * (self.field.integrated_global(x.clamp(0.0, self.field.length)) / self.v).exp();
        C64::from_polar(amp, self.k * x)
    }

    /// `|psi(L) - psi(0)| / |psi(0)|`.
    pub fn periodicity_defect(&self) -> f64 {
        let a = self.psi(0.0);
        let b = self.psi(self.field.length);
        (b - a).norm() / a.norm()
    }

    /// Largest relative jump of the closed-form envelope across segment
    /// boundaries, including the seam.
    pub fn continuity_defect(&self) -> f64 {
        let Some(env) = &self.envelope else {
            return 0.0;
        };
        let mut worst = 0.0f64;
        for (i, seg) in env.iter().enumerate() {
            let next = &env[(i + 1) % env.len()];
            let left = seg.amplitude(seg.end);
            let right = next.amplitude(next.start);
            worst = worst.max((left - right).abs() / left.abs().max(right.abs()));
        }
        worst
    }

    /// Largest relative deviation between the closed-form envelope and the
    /// integrated field.
    pub fn envelope_defect(&self) -> f64 {
        let Some(env) = &self.envelope else {
            return 0.0;
        };
        let mut worst = 0.0f64;
        for &(x, rho) in &self.samples {
            let seg = env.iter().find(|s| x >= s.start && x < s.end).unwrap_or(env.last().unwrap());
            let closed = (self.norm * seg.amplitude(x)).powi(2);
            worst = worst.max((closed - rho).abs() / rho);
        }
        worst
    }
}

fn envelope_from_alphas(field: &DissipationField, alphas: &[f64]) -> Vec<SegmentEnvelope> {
    let segs = field.segments().expect("constant field");
    let mut out = Vec::with_capacity(segs.len());
    let mut log_matching = 0.0;
    for (seg, &alpha) in segs.iter().zip(alphas) {
        out.push(SegmentEnvelope { start: seg.start, end: seg.end, alpha, matching: (log_matching as f64).exp() });
        log_matching -= alpha * (seg.end - seg.start);
    }
    out
}

/// `integral_0^L |exp(G/v)|^2 dx`, exact per segment when possible.
fn weight_integral(field: &DissipationField, v: f64) -> f64 {
    let pts = field.breakpoints();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ga = field.integrated_global(a);
        match field.segments() {
            Some(_) => {
                let rate = 2.0 * field.global_at(0.5 * (a + b)) / v;
                let len = b - a;
                let base = (2.0 * ga / v).exp();
                total += if (rate * len).abs() < 1e-12 {
                    base * len
                } else {
                    base * (rate * len).exp_m1() / rate
                };
            }
            None => {
                // Simpson on a quadratic exponent.
                let n = 256;
                let h = (b - a) / n as f64;
                let f = |x: f64| (2.0 * field.integrated_global(x) / v).exp();
                let mut s = f(a) + f(b);
                for i in 1..n {
                    s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                total += s * h / 3.0;
            }
        }
    }
    total
}

/// Builds the chiral mode with index `n` and velocity `v` on `field`.
pub fn chiral_wavefunction(field: &DissipationField, n: i64, v: f64) -> Result<ChiralModeSolution> {
    chiral_wavefunction_on_grid(field, n, v, DEFAULT_GRID)
}

pub fn chiral_wavefunction_on_grid(
    field: &DissipationField,
    n: i64,
    v: f64,
    grid: usize,
) -> Result<ChiralModeSolution> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::InvalidArgument("velocity must be finite and nonzero".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points".into()));
    }
    let l = field.length();
    let k = 2.0 * std::f64::consts::PI * n as f64 / l;
    let gamma_bar = field.average();
    let mut warnings = Vec::new();
    if field.scale() >= 0.5 * v.abs() {
        warnings.push(format!(
            "max |gamma| = {:.3} is not small against |v| = {:.3}; the chiral-mode picture is perturbative",
            field.scale(),
            v.abs()
        ));
    }
    let envelope = field.segments().map(|segs| {
        let alphas: Vec<f64> = segs.iter().map(|s| (s.gamma - gamma_bar) / v).collect();
        envelope_from_alphas(field, &alphas)
    });
    let norm = weight_integral(field, v).sqrt().recip();
    let mut sol = ChiralModeSolution {
        k,
        v,
        energy: C64::new(v * k, gamma_bar),
        gamma_bar,
        envelope,
        norm,
        samples: Vec::new(),
        warnings,
        field: field.clone(),
    };
    sol.samples = (0..grid)
        .map(|i| {
            let x = l * i as f64 / grid as f64;
            (x, sol.density(x))
        })
        .collect();
    Ok(sol)
}

/// True when `|psi|^2` rises on `[a, x0)` and falls on `(x0, b]`.
///
/// The interval may cross the seam; positions are taken modulo `L`. Steps
/// may tie within `1e-12` relative, but the density at `x0` must exceed both
/// end values.
pub fn localization_predicate(sol: &ChiralModeSolution, x0: f64, interval: [f64; 2]) -> bool {
    localization_predicate_on_grid(sol, x0, interval, DEFAULT_GRID)
}

pub fn localization_predicate_on_grid(sol: &ChiralModeSolution, x0: f64, [a, b]: [f64; 2], grid: usize) -> bool {
    if !(a < x0 && x0 < b) {
        return false;
    }
    let peak = sol.density(x0);
    let tol = 1e-12 * peak;
    let step = (b - a) / grid as f64;
    let mut left: Vec<f64> = (0..=grid).map(|i| a + step * i as f64).filter(|&x| x < x0).collect();
    left.push(x0);
    let mut right = vec![x0];
    right.extend((0..=grid).map(|i| a + step * i as f64).filter(|&x| x > x0));
    let rising = left.windows(2).all(|w| sol.density(w[1]) - sol.density(w[0]) > -tol);
    let falling = right.windows(2).all(|w| sol.density(w[1]) - sol.density(w[0]) < tol);
    rising && falling && peak - sol.density(a) > tol && peak - sol.density(b) > tol
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGddw {
    pub gamma_bar: f64,
    pub alpha: [f64; 2],
    pub matching: [f64; 2],
    /// Decay lengths of `|psi|` on either side, `1 / |alpha|`.
    pub xi: [f64; 2],
}

/// Closed form for `gamma1` on `[0, L1)` and `gamma2` on `[L1, L)`.
pub fn pair_gddw_solution(gamma1: f64, gamma2: f64, l1: f64, l: f64, v: f64) -> Result<PairGddw> {
    if !(0.0 < l1 && l1 < l) || v == 0.0 {
        return Err(Error::InvalidArgument("need 0 < L1 < L and v != 0".into()));
    }
    if gamma1 == gamma2 {
        return Err(Error::InvalidArgument("no wall: both regions carry the same dissipation".into()));
    }
    let alpha1 = (gamma1 - gamma2) * (l - l1) / (v * l);
    let alpha2 = (gamma2 - gamma1) * l1 / (v * l);
    Ok(PairGddw {
        gamma_bar: (gamma1 * l1 + gamma2 * (l - l1)) / l,
        alpha: [alpha1, alpha2],
        matching: [1.0, (-alpha1 * l1).exp()],
        xi: [1.0 / alpha1.abs(), 1.0 / alpha2.abs()],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiGddw {
    pub gamma_bar: f64,
    pub segments: Vec<SegmentEnvelope>,
}

/// Closed form for consecutive uniform regions `(gamma_i, L_i)`.
///
/// `alpha_i = -(sum_j gamma_j L_j - gamma_i L) / (v L)` and the matching
/// constants follow from continuity at every boundary.
pub fn multi_gddw_solution(parts: &[(f64, f64)], v: f64) -> Result<MultiGddw> {
    if parts.len() < 2 {
        return Err(Error::InvalidArgument("need at least two regions".into()));
    }
    if v == 0.0 {
        return Err(Error::InvalidArgument("velocity must be nonzero".into()));
    }
    if parts.iter().any(|&(_, len)| !(len > 0.0)) {
        return Err(Error::InvalidArgument("region lengths must be positive".into()));
    }
    let l: f64 = parts.iter().map(|p| p.1).sum();
    let weighted: f64 = parts.iter().map(|&(g, len)| g * len).sum();
    let alphas: Vec<f64> = parts.iter().map(|&(g, _)| -(weighted - g * l) / (v * l)).collect();
    let field = DissipationField::from_lengths(parts)?;
    Ok(MultiGddw { gamma_bar: weighted / l, segments: envelope_from_alphas(&field, &alphas) })
}

/// Same as [`multi_gddw_solution`] but checks that the lengths add up to `total`.
pub fn multi_gddw_solution_checked(parts: &[(f64, f64)], total: f64, v: f64) -> Result<MultiGddw> {
    let sum: f64 = parts.iter().map(|p| p.1).sum();
    if (sum - total).abs() > 1e-12 * total.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!("region lengths add up to {sum}, expected {total}")));
    }
    multi_gddw_solution(parts, v)
}

/// Random continuous periodic field with `knots` knots and values in `[-amp, amp]`.
pub fn random_linear_field<R: Rng + ?Sized>(rng: &mut R, length: f64, knots: usize, amp: f64) -> DissipationField {
    let knots = knots.max(2);
    let mut xs: Vec<f64> = Vec::with_capacity(knots);
    xs.push(0.0);
    while xs.len() < knots {
        let x = rng.gen_range(0.02..0.98) * length;
        if xs.iter().all(|&y| (x - y).abs() > 1e-3 * length) {
            xs.push(x);
        }
    }
    xs.sort_by(f64::total_cmp);
    let values = (0..knots).map(|_| rng.gen_range(-amp..amp)).collect();
    DissipationField::piecewise_linear(length, xs, values).expect("valid knots")
}
