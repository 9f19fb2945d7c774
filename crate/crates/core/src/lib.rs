//! Ordered-probit credit-rating models: rating-scale codecs, covariate
//! construction, maximum-likelihood estimation, forecast evaluation,
//! two-agency comparison and a calibrated synthetic-data generator.
//!
//! The crate is `no_std` and needs only `alloc`; file formats and the
//! command-line front end live in the `ratingprobit` crate.
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod compare;
pub mod data;
pub mod design;
pub mod eval;
pub mod model_spec;
pub mod normal;
pub mod oprobit;
pub mod scales;
pub mod stats;
pub mod synth;
