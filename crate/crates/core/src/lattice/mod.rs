//! Honeycomb geometry, Haldane operators and dissipation profiles.
//!
//! Lengths are in units of the nearest-neighbour distance, with
//! `e1 = (0, 1)`, `e2 = (-sqrt3/2, -1/2)`, `e3 = (sqrt3/2, -1/2)` pointing
//! from an A site to its B neighbours. Sites are ordered by (row, column,
//! sublattice), so every zigzag row is a contiguous block of indices.

mod geometry;
mod operator;
mod profile;

pub use geometry::{
    build_honeycomb, site_position, Bond, Boundary, EdgeSide, EdgeStyle, Site, SiteGraph, Sublattice,
    NNN_VECTORS, NN_VECTORS, PRIMITIVE_VECTORS, SQRT3, ZIGZAG_PERIOD,
};
pub use operator::{
    allowed_momenta, apply_dissipation, bloch_reduce, build_haldane, Basis, HaldaneParams, LatticeOperator,
    ReducedAxis,
};
pub use profile::{make_profile, DissipationProfile, ProfileKind, ProfileSpec};
