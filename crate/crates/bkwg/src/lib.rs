//! The Beta-Kumaraswamy-G family of lifetime distributions.
//!
//! [`BKw`] evaluates densities, tails, hazards and quantiles over any
//! [`Baseline`](baseline::Baseline); [`series`] holds the mixture expansions
//! and the moment machinery built on them; [`estimation`] fits the model and
//! its nested sub-models by maximum likelihood or by moments.
//!
//! Everything is generic over the scalar through [`Real`], implemented for
//! `f64` and `f32`.

pub mod baseline;
pub mod bkw;
pub mod datasets;
pub mod error;
pub mod estimation;
pub mod linalg;
mod optim;
pub mod quadrature;
pub mod real;
pub mod rng;
pub mod series;
pub mod specialfn;

pub use baseline::{Baseline, Family, FamilyId};
pub use bkw::BKw;
pub use error::{Error, Result};
pub use estimation::{Dataset, FitOptions, FitResult, ModelKind, ModelSpec};
pub use real::Real;

pub type BKw64 = BKw<f64>;
pub type BKw32 = BKw<f32>;
pub type Baseline64 = Baseline<f64>;
pub type Dataset64 = Dataset<f64>;
pub type ModelSpec64 = ModelSpec<f64>;
