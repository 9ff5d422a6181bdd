//! Minimal-pair evaluation of articulatory feature trajectories.
//!
//! The crate mines minimal-pair sets from pronunciation dictionaries
//! ([`minpair`]), extracts per-utterance articulatory targets at the maximum
//! of the averaged DTW local cost ([`align`]), scores how separable and
//! speaker-consistent those targets are ([`eval`]), and computes the
//! DTW-weighted consistency training loss with gradients ([`consist`]).
//! Trajectories move between tools in the AFT1 binary format ([`featio`]).

pub mod align;
pub mod consist;
pub mod error;
pub mod eval;
pub mod featio;
pub mod minpair;
pub mod signal;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use featio::FeatureTrajectory;
