//! Amoebas and coamoebas of half-dimensional toric complete intersections.
//!
//! An n-dimensional variety `V` in the torus `(C*)^{2n}`, cut out by `n`
//! Laurent polynomials, maps to its amoeba (coordinatewise log-modulus) and
//! its rolled coamoeba (coordinatewise argument mod pi); both maps are
//! generically finite in this half-dimensional setting. This crate computes
//!
//! * the intersection degrees bounding fiber cardinalities, as exact mixed
//!   volumes of Newton polytopes ([`polytope`]),
//! * finite fibers of either map, by multistart Newton in log-polar charts
//!   and, for curves, by an exact resultant elimination ([`fibers`]),
//! * seeded Monte Carlo / grid estimates of amoeba volume and of the
//!   multiplicity-weighted volumes of amoeba and coamoeba ([`measure`]),
//! * a verification battery that runs the expected bounds, parities and
//!   volume identities against a concrete system ([`verify`]).
//!
//! All sampling is deterministic per `(seed, sample index)`; results are
//! bit-identical for any worker count. The `parallel` feature (default)
//! runs sample loops, facet enumeration and multistart batches on rayon;
//! without it everything degrades to sequential loops with identical
//! output.

#![allow(clippy::type_complexity)]

pub mod error;
pub mod fibers;
pub mod laurent;
pub mod measure;
pub mod polytope;
pub mod rng;
pub mod verify;

#[doc(hidden)]
pub mod par;

pub use error::{Error, Result};
pub use laurent::{LaurentPolynomial, LogPolarPoint, PolySystem};
pub use polytope::{Degrees, LatticePolytope};
