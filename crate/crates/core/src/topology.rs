//! Bulk Bloch matrix, Chern numbers and the chiral edge velocity.

use ndarray::Array2;

use crate::lattice::{NNN_VECTORS, NN_VECTORS, PRIMITIVE_VECTORS};
use crate::{Error, Result, C64};

/// Two-band Bloch matrix of the Haldane model with sublattice dissipation.
///
/// The gauge uses cell positions, with the B site of a cell sitting at
/// `e3` from its A site, so the matrix is periodic under reciprocal shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochMap {
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
    /// Sublattice potential `+m` on A and `-m` on B.
    pub mass: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl BlochMap {
    pub fn haldane(t1: f64, t2: f64, phi: f64) -> Self {
        Self { t1, t2, phi, mass: 0.0, gamma_a: 0.0, gamma_b: 0.0 }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_dissipation(mut self, gamma_a: f64, gamma_b: f64) -> Self {
        self.gamma_a = gamma_a;
        self.gamma_b = gamma_b;
        self
    }

    /// `T_k = t1 sum_j exp(i k . (e_j - e3))`.
    pub fn form_factor(&self, k: [f64; 2]) -> C64 {
        let e3 = NN_VECTORS[2];
        NN_VECTORS
            .iter()
            .map(|e| C64::from_polar(self.t1, dot(k, [e[0] - e3[0], e[1] - e3[1]])))
            .sum()
    }

    /// `p_k(phi) = 2 t2 sum_j cos(k . v_j + phi)`.
    pub fn nnn_term(&self, k: [f64; 2], phi: f64) -> f64 {
        NNN_VECTORS.iter().map(|v| 2.0 * self.t2 * (dot(k, *v) + phi).cos()).sum()
    }

    pub fn matrix(&self, k: [f64; 2]) -> [[C64; 2]; 2] {
        let t = self.form_factor(k);
        [
            [C64::new(self.nnn_term(k, self.phi) + self.mass, self.gamma_a), t],
            [t.conj(), C64::new(self.nnn_term(k, -self.phi) - self.mass, self.gamma_b)],
        ]
    }

    pub fn array(&self, k: [f64; 2]) -> Array2<C64> {
        let m = self.matrix(k);
        Array2::from_shape_fn((2, 2), |(i, j)| m[i][j])
    }

    /// Reciprocal vectors `b_i` with `a_i . b_j = 2 pi delta_ij`.
    pub fn reciprocal_vectors() -> [[f64; 2]; 2] {
        let [a1, a2] = PRIMITIVE_VECTORS;
        let det = a1[0] * a2[1] - a1[1] * a2[0];
        let f = 2.0 * std::f64::consts::PI / det;
        [[f * a2[1], -f * a2[0]], [-f * a1[1], f * a1[0]]]
    }

    /// Momentum at fractional coordinates `(s1, s2)` of the reciprocal cell.
    pub fn momentum(s1: f64, s2: f64) -> [f64; 2] {
        let [b1, b2] = Self::reciprocal_vectors();
        [s1 * b1[0] + s2 * b2[0], s1 * b1[1] + s2 * b2[1]]
    }
}

fn hermitian_bands(map: &BlochMap, k: [f64; 2]) -> Result<(ndarray::Array1<f64>, Array2<C64>)> {
    crate::spectra::eigh(&map.array(k))
}

/// Smallest direct gap between the two bands on an `n x n` grid.
pub fn bulk_gap(map: &BlochMap, n: usize) -> Result<f64> {
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (w, _) = hermitian_bands(map, BlochMap::momentum(i as f64 / n as f64, j as f64 / n as f64))?;
            gap = gap.min(w[1] - w[0]);
        }
    }
    Ok(gap)
}

/// Chern number of `band` (0 = lower) from link-variable plaquettes on an `n x n` grid.
pub fn chern_number(map: &BlochMap, band: usize, n: usize) -> Result<i64> {
    if band > 1 {
        return Err(Error::InvalidArgument(format!("band {band} does not exist")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2x2 points".into()));
    }
    if map.gamma_a != 0.0 || map.gamma_b != 0.0 {
        return Err(Error::InvalidArgument("Chern number is defined here for the Hermitian model only".into()));
    }
    let mut states = Vec::with_capacity(n * n);
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (w, v) = hermitian_bands(map, BlochMap::momentum(i as f64 / n as f64, j as f64 / n as f64))?;
            gap = gap.min(w[1] - w[0]);
            states.push([v[[0, band]], v[[1, band]]]);
        }
    }
    if gap < 1e-6 {
        return Err(Error::GapClosed(gap));
    }
    let u = |i: usize, j: usize| states[(i % n) * n + (j % n)];
    let link = |a: [C64; 2], b: [C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let mut flux = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = link(u(i, j), u(i + 1, j))
                * link(u(i + 1, j), u(i + 1, j + 1))
                * link(u(i + 1, j + 1), u(i, j + 1))
                * link(u(i, j + 1), u(i, j));
            flux += p.arg();
        }
    }
    Ok((flux / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// `6 t1 t2 / sqrt(t1^2 + 8 t2^2 (1 - cos k))`.
pub fn edge_velocity(k: f64, t1: f64, t2: f64) -> f64 {
    6.0 * t1 * t2 / (t1 * t1 + 8.0 * t2 * t2 * (1.0 - k.cos())).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn velocity_values() {
        assert!((edge_velocity(0.0, 1.0, 0.2) - 1.2).abs() < 1e-15);
        assert!((edge_velocity(PI, 1.0, 0.2) - 1.2 / 1.64f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_basis_is_dual() {
        let b = BlochMap::reciprocal_vectors();
        for (i, a) in PRIMITIVE_VECTORS.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                let want = if i == j { 2.0 * PI } else { 0.0 };
                assert!((dot(*a, *bj) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn form_factor_extremes() {
        let m = BlochMap::haldane(1.0, 0.2, FRAC_PI_2);
        assert!((m.form_factor([0.0, 0.0]).norm() - 3.0).abs() < 1e-15);
        let corners = [(1.0 / 3.0, 2.0 / 3.0), (2.0 / 3.0, 1.0 / 3.0)];
        for (s1, s2) in corners {
            assert!(m.form_factor(BlochMap::momentum(s1, s2)).norm() < 1e-12);
        }
    }

    #[test]
    fn matrix_is_periodic_and_hermitian() {
        let m = BlochMap::haldane(1.0, 0.2, FRAC_PI_2);
        let k = [0.37, -1.21];
        let [b1, _] = BlochMap::reciprocal_vectors();
        let a = m.matrix(k);
        let b = m.matrix([k[0] + b1[0], k[1] + b1[1]]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).norm() < 1e-12);
                assert!((a[i][j] - a[j][i].conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn chern_signs() {
        let q = |phi: f64, band: usize| chern_number(&BlochMap::haldane(1.0, 0.2, phi), band, 24).unwrap();
        assert_eq!(q(FRAC_PI_2, 0), 1);
        assert_eq!(q(-FRAC_PI_2, 0), -1);
        assert_eq!(q(FRAC_PI_2, 0) + q(FRAC_PI_2, 1), 0);
        let real_hopping = BlochMap::haldane(1.0, 0.2, PI);
        assert!(matches!(chern_number(&real_hopping, 0, 24), Err(Error::GapClosed(_))));
        assert_eq!(chern_number(&real_hopping.with_mass(0.3), 0, 24).unwrap(), 0);
    }

    #[test]
    fn gapless_model_is_rejected() {
        let m = BlochMap::haldane(1.0, 0.0, FRAC_PI_2);
        assert!(matches!(chern_number(&m, 0, 24), Err(Error::GapClosed(_))));
    }
}
