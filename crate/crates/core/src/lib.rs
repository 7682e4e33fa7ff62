//! Exact l1 theta series of rational lattices, l1 geometry of numbers,
//! cross-polytope packing search, and wiretap coset-coding bounds and
//! simulation.

pub mod catalog;
pub mod code;
pub(crate) mod cyclotomic;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod packing;
pub mod series;
pub mod sim;
pub mod theta;
pub mod wiretap;

pub use code::{macwilliams_swe, LinearCode, SweEnumerator};
pub use error::{Error, Result};
pub use lattice::{code_from_lattice, construction_a, CodeLatticePair, FloatLattice, IntegerLattice, Lattice};

use std::sync::OnceLock;

/// Default limit on enumerated codewords and lattice points.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 24;

/// Enumeration cap, overridable with the `CROSSTHETA_CAP` environment
/// variable (read once).
pub fn enumeration_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| std::env::var("CROSSTHETA_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ENUMERATION_CAP))
}
