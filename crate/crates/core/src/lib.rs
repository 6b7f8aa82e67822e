//! Minimal-mass representatives of homology classes on weighted simplicial
//! complexes, over `Z`, `Q` and `Z/n`.
//!
//! The crate computes exact class norms (an exact-rational LP over `Q`,
//! exhaustive lattice branch-and-bound over `Z` and `Z/n`), calibration
//! certificates, canonical mod-`n` lifts, and experiment tables comparing the
//! three norms: modulus scans, multiples of a class, and weight sweeps.

pub mod cli;
pub mod complex;
pub mod error;
pub mod hasse;
pub mod homology;
pub mod intlinalg;
pub mod optimize;
pub mod report;
pub mod rings;
pub mod suite;

pub use complex::{load_complex, mass, reduce_chain, Chain, Cochain, WeightedComplex};
pub use error::{Error, Result};
pub use homology::{ClassCoords, HomologyDecomposition};
pub use rings::{canonical_lift, mod_inverse, norm, RingElem, RingSpec};
