//! Predictive inference for geostatistical measurements whose locations are unknown.
//!
//! The setting: a spatially continuous quantity is measured at a set of survey
//! locations, but for some of the measurements the coordinates were never
//! recorded (or were lost). Under a stationary Gaussian-process measurement
//! model and a configurable prior on where sampling locations tend to be, the
//! missing locations have a well-defined joint predictive distribution. This
//! crate computes it two ways:
//!
//! * [`quadrature::predict_single`] — exact-on-grid evaluation of the
//!   predictive density when a single location is missing;
//! * [`mcmc::run_chain`] — a Metropolis-Hastings sampler with a two-component
//!   mixture proposal for several missing locations at once.
//!
//! Supporting pieces: Matérn/exponential correlation models ([`model`]),
//! location priors including a plug-in-bandwidth kernel density estimate
//! ([`prior`]), samplers for common survey designs ([`pointprocess`]),
//! measurement simulation ([`sim`]), and maximum-likelihood parameter
//! estimation ([`fit`]).
//!
//! The crate is `no_std` (it allocates, but performs no IO); the companion
//! `whereabouts` crate adds file formats and a command-line front end.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bessel;
pub mod error;
pub mod fit;
pub mod geom;
pub mod grid;
pub mod linalg;
mod math;
pub mod mcmc;
pub mod model;
pub mod optim;
pub mod pointprocess;
pub mod posterior;
pub mod prior;
pub mod quadrature;
pub mod sim;

pub use error::Error;
pub use geom::{Point, Rect};
pub use grid::Grid;
pub use model::{CorrelationFamily, ModelParams, SpatialDataset};
pub use prior::LocationPrior;


/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
