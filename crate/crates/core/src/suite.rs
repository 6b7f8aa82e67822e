//! The curated fixture complexes.
//!
//! The Möbius gap complex is the five-vertex Möbius strip with triangles
//! `{i, i+1, i+2} mod 5`. Its boundary pentagon (edges `{i, i+2}`) is
//! homologous to twice the core circle, so cheap boundary weights make the
//! doubled class much cheaper than any integral representative of the class
//! itself.

use num_rational::BigRational;
use num_traits::One;

use crate::complex::{load_complex, WeightedComplex};

pub const TRIANGLE_CIRCLE: &str = include_str!("../fixtures/triangle_circle.cplx");
pub const TORUS: &str = include_str!("../fixtures/torus.cplx");
pub const RP2: &str = include_str!("../fixtures/rp2.cplx");
pub const KLEIN_BOTTLE: &str = include_str!("../fixtures/klein_bottle.cplx");
pub const MOBIUS_EPS: &str = include_str!("../fixtures/mobius_eps.cplx");

pub fn triangle_circle() -> WeightedComplex {
    load_complex(TRIANGLE_CIRCLE).expect("fixture parses")
}

/// Seven-vertex torus.
pub fn torus() -> WeightedComplex {
    load_complex(TORUS).expect("fixture parses")
}

/// Six-vertex projective plane.
pub fn rp2() -> WeightedComplex {
    load_complex(RP2).expect("fixture parses")
}

/// Eight-vertex Klein bottle.
pub fn klein_bottle() -> WeightedComplex {
    load_complex(KLEIN_BOTTLE).expect("fixture parses")
}

/// Indices of the boundary-pentagon edges of the Möbius gap complex.
pub const MOBIUS_BOUNDARY_EDGES: [usize; 5] = [1, 2, 5, 6, 8];

/// Möbius gap complex with weight `eps` on each boundary edge and 1 on the
/// interior edges.
pub fn mobius_gap(eps: &BigRational) -> WeightedComplex {
    let facets: Vec<Vec<usize>> = (0..5).map(|i| vec![i, (i + 1) % 5, (i + 2) % 5]).collect();
    let k = WeightedComplex::from_facets(format!("mobius-gap eps={}", crate::rings::format_rational(eps)), &facets)
        .expect("mobius strip is a valid complex");
    let mut w = vec![BigRational::one(); k.count(1)];
    for &i in &MOBIUS_BOUNDARY_EDGES {
        w[i] = eps.clone();
    }
    k.with_weights(1, w).expect("positive weights")
}

/// The shipped `mobius_eps.cplx`, `eps = 1/4`.
pub fn mobius_eps() -> WeightedComplex {
    load_complex(MOBIUS_EPS).expect("fixture parses")
}
