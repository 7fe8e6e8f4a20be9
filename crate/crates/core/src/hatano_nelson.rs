//! Non-reciprocal chains as effective models of a dissipative chiral edge.
//!
//! In real space `H[i][i+1] = t_L` and `H[i+1][i] = t_R`, so a plane wave
//! `e^{i q j}` has energy `t_L e^{iq} + t_R e^{-iq}`. Writing `q = k - pi/2`
//! turns this into `v sin k + i zeta cos k` with `v = t_L + t_R` and
//! `zeta = t_R - t_L`, which is the form used by [`half_hn_dispersion`].

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::lattice::{Basis, Boundary, LatticeOperator, SQRT3};
use crate::spectra::cosine_series;
use crate::{Error, Result, C64};

/// Offset between chain momentum `q` and the dispersion momentum `k = q + pi/2`.
pub const MOMENTUM_OFFSET: f64 = FRAC_PI_2;

#[derive(Debug, Clone, PartialEq)]
pub struct HNParams {
    pub v_eff: f64,
    pub zeta: f64,
    pub t_l: f64,
    pub t_r: f64,
    /// `a2`, realized as range-2 hoppings `-i a2 / 2` in both directions.
    pub second_harmonic: Option<f64>,
    pub n: usize,
    pub bc: Boundary,
    /// Chain spacing; defaults to the zigzag period.
    pub c: f64,
}

impl HNParams {
    pub fn from_velocity(v_eff: f64, zeta: f64, n: usize, bc: Boundary) -> Self {
        Self {
            v_eff,
            zeta,
            t_l: 0.5 * (v_eff - zeta),
            t_r: 0.5 * (v_eff + zeta),
            second_harmonic: None,
            n,
            bc,
            c: SQRT3,
        }
    }

    pub fn from_hoppings(t_l: f64, t_r: f64, n: usize, bc: Boundary) -> Self {
        Self { v_eff: t_l + t_r, zeta: t_r - t_l, t_l, t_r, second_harmonic: None, n, bc, c: SQRT3 }
    }

    pub fn with_second_harmonic(mut self, a2: f64) -> Self {
        self.second_harmonic = Some(a2);
        self
    }

    /// Bloch energy at dispersion momentum `k`.
    pub fn bloch_energy(&self, k: f64) -> C64 {
        let q = k - MOMENTUM_OFFSET;
        let mut e = self.t_l * C64::from_polar(1.0, q) + self.t_r * C64::from_polar(1.0, -q);
        if let Some(a2) = self.second_harmonic {
            e += C64::new(0.0, -a2) * (2.0 * q).cos();
        }
        e
    }

    pub fn localization(&self) -> Result<HnLocalization> {
        hn_localization_length(self.t_l, self.t_r, self.c)
    }
}

pub fn hn_matrix(p: &HNParams) -> Result<LatticeOperator> {
    if p.n < 3 {
        return Err(Error::InvalidArgument(format!("chain of {} sites, need at least 3", p.n)));
    }
    let n = p.n;
    let mut h = Array2::<C64>::zeros((n, n));
    let periodic = p.bc == Boundary::Periodic;
    for i in 0..n {
        if i + 1 < n || periodic {
            let j = (i + 1) % n;
            h[[i, j]] += p.t_l;
            h[[j, i]] += p.t_r;
        }
    }
    if let Some(a2) = p.second_harmonic {
        let hop = C64::new(0.0, -0.5 * a2);
        for i in 0..n {
            if i + 2 < n || periodic {
                let j = (i + 2) % n;
                h[[i, j]] += hop;
                h[[j, i]] += hop;
            }
        }
    }
    LatticeOperator::new(h, Basis::Chain)
}

/// Samples `E(k) = v sin k + i sum_n a_n cos(n k)` on `samples` points of `(-pi/2, pi/2]`.
///
/// `coeffs[n]` multiplies `cos(n k)`, starting at `n = 0`.
pub fn half_hn_dispersion(v_eff: f64, coeffs: &[f64], samples: usize) -> Vec<(f64, C64)> {
    half_hn_dispersion_with(|_| v_eff, coeffs, samples)
}

/// As [`half_hn_dispersion`] with a momentum-dependent velocity.
pub fn half_hn_dispersion_with<F: Fn(f64) -> f64>(velocity: F, coeffs: &[f64], samples: usize) -> Vec<(f64, C64)> {
    let samples = samples.max(1);
    (1..=samples)
        .map(|i| {
            let k = -FRAC_PI_2 + PI * i as f64 / samples as f64;
            (k, C64::new(velocity(k) * k.sin(), cosine_series(coeffs, k)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainEnd {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HnLocalization {
    Extended,
    Localized { xi: f64, end: ChainEnd },
}

impl HnLocalization {
    pub fn xi(&self) -> f64 {
        match self {
            HnLocalization::Extended => f64::INFINITY,
            HnLocalization::Localized { xi, .. } => *xi,
        }
    }
}

/// `xi = c / (2 ln(t_R / t_L))` as a magnitude, with the end where skin modes pile up.
pub fn hn_localization_length(t_l: f64, t_r: f64, c: f64) -> Result<HnLocalization> {
    if !(t_l > 0.0 && t_r > 0.0) {
        return Err(Error::InvalidArgument(format!("hoppings must be positive, got t_L={t_l}, t_R={t_r}")));
    }
    if t_l == t_r {
        return Ok(HnLocalization::Extended);
    }
    let log = (t_r / t_l).ln();
    Ok(HnLocalization::Localized {
        xi: c / (2.0 * log.abs()),
        end: if log > 0.0 { ChainEnd::Right } else { ChainEnd::Left },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaRule {
    /// `zeta = a1`.
    FirstHarmonic,
    /// Best single `zeta cos k` fit to the non-constant harmonics on the half zone.
    LeastSquares,
    /// Non-constant part of the series at `k = 0`.
    AtCrossing,
}

/// Non-reciprocity implied by cosine coefficients `a_0, a_1, ...`.
pub fn zeta_from_harmonics(coeffs: &[f64], rule: ZetaRule) -> f64 {
    let tail = |k: f64| -> f64 { coeffs.iter().enumerate().skip(1).map(|(n, a)| a * (n as f64 * k).cos()).sum() };
    match rule {
        ZetaRule::FirstHarmonic => coeffs.get(1).copied().unwrap_or(0.0),
        ZetaRule::AtCrossing => tail(0.0),
        ZetaRule::LeastSquares => {
            // Simpson over (-pi/2, pi/2); the integral of cos^2 there is pi/2.
            let m = 2000;
            let h = PI / m as f64;
            let mut s = 0.0;
            for i in 0..=m {
                let k = -FRAC_PI_2 + h * i as f64;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s += w * tail(k) * k.cos();
            }
            s * h / 3.0 / FRAC_PI_2
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HnComparison {
    /// `(k, E_edge - E_model)` for every edge level inside the model's range.
    pub per_k: Vec<(f64, C64)>,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    /// Sign of the mean imaginary part of the edge levels: -1, 0 or +1.
    pub im_half: i8,
    /// True when `max_deviation` exceeds the tolerance.
    pub mismatch: bool,
}

/// Compares edge levels with a sampled dispersion, interpolating the latter linearly in `k`.
pub fn compare_edge_to_half_hn(edge_levels: &[(f64, C64)], dispersion: &[(f64, C64)], tolerance: f64) -> Result<HnComparison> {
    let mut model: Vec<(f64, C64)> = dispersion.to_vec();
    model.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = match (model.first(), model.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(Error::InvalidArgument("empty dispersion".into())),
    };
    let mut per_k = Vec::new();
    for &(k, e) in edge_levels {
        if k < lo || k > hi {
            continue;
        }
        let j = model.partition_point(|m| m.0 < k);
        let value = if j < model.len() && model[j].0 == k {
            model[j].1
        } else {
            let (a, b) = (model[j - 1], model[j]);
            a.1 + (b.1 - a.1) * ((k - a.0) / (b.0 - a.0))
        };
        per_k.push((k, e - value));
    }
    if per_k.is_empty() {
        return Err(Error::InvalidArgument("edge levels and dispersion share no momenta".into()));
    }
    let devs: Vec<f64> = per_k.iter().map(|p| p.1.norm()).collect();
    let max_deviation = devs.iter().copied().fold(0.0, f64::max);
    let mean_deviation = devs.iter().sum::<f64>() / devs.len() as f64;
    let mean_im = edge_levels.iter().map(|l| l.1.im).sum::<f64>() / edge_levels.len() as f64;
    let im_half = if mean_im.abs() < 1e-6 { 0 } else if mean_im > 0.0 { 1 } else { -1 };
    Ok(HnComparison { per_k, max_deviation, mean_deviation, im_half, mismatch: max_deviation > tolerance })
}
