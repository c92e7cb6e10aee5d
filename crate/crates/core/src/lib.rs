//! Point counting on ordinary elliptic curves over prime fields.
//!
//! The trace of Frobenius is assembled from residues modulo small primes.
//! Elkies primes use the Frobenius eigenvalue on the ray polynomial; Atkin
//! primes use an explicit isomorphism between the ray algebra and a
//! cyclotomic algebra, recovered from elliptic and cyclotomic Gauss sums,
//! after which the trace is read off a root-free characteristic equation.

pub mod arith;
pub mod atkin_gauss;
pub mod curve;
pub mod cyclic;
pub mod driver;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod metrics;
pub mod poly;
pub mod ray;

pub use error::{Error, Result};
pub use fields::{FrobeniusTable, PrimeField, QuotientRing, Ring};
pub use poly::{Poly, PolyRing};
pub use curve::{Curve, CurvePoint};
