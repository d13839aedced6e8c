//! LDPC decoding toolkit: code construction, belief-propagation decoding,
//! list erasure decoding, ensemble weight spectra, analytic bounds on
//! maximum-likelihood decoding, and a Monte-Carlo simulation harness.

// Reference constants are frozen with more digits than f64 keeps so the
// underlying arbitrary-precision value stays on record.
#![allow(clippy::excessive_precision)]

pub mod bounds;
pub mod bpdec;
pub mod bpled;
pub mod codes;
pub mod gf2;
pub mod led;
pub mod logmath;
pub mod sim;
pub mod spectra;
