//! Logarithmic pooling of expert opinions expressed as Beta distributions.
//!
//! A pool of `K+1` expert priors `f_0, ..., f_K` over a probability is combined
//! into the log-pooled prior
//!
//! ```text
//! pi(theta) = prod_i f_i(theta)^{alpha_i} / integral(prod_i f_i^{alpha_i})
//! ```
//!
//! where the weights `alpha` live on the simplex. For Beta opinions the pooled
//! prior is again Beta, with parameters given by the weighted averages of the
//! expert parameters. This crate provides:
//!
//! * the pooling operator and its normalizing integral ([`pool`]),
//! * closed-form objectives over the weights: pooled entropy, Kullback-Leibler
//!   loss and beta-binomial evidence ([`objectives`]),
//! * weight selection by entropy maximization or KL-loss minimization over the
//!   simplex ([`optimizer`]),
//! * a hierarchical Dirichlet prior on the weights with a random-walk
//!   Metropolis sampler ([`hierarchical`]),
//! * deterministic quadrature on `(0,1)` with Beta-type endpoint singularities,
//!   used as the independent oracle for every closed form ([`quadrature`]),
//! * the scalar special functions behind all of the above ([`special`]).
//!
//! All numerics are generic over the scalar type through the [`Real`] trait
//! (`f32` or `f64`); concrete `f64` aliases for the main types are exported at
//! the crate root.

pub mod error;
pub mod hierarchical;
pub mod objectives;
pub mod optimizer;
pub mod pool;
pub mod quadrature;
pub mod real;
mod simplex;
pub mod special;

pub use error::{Error, Result};
pub use real::Real;

pub use hierarchical::{DirichletPrior, HierPosterior, McmcConfig, MonteCarloEstimate};
pub use objectives::Observation;
pub use optimizer::{OptimMethod, OptimResult, OptimizerConfig};
pub use pool::{BetaOpinion, DensityTable, OpinionPool, PooledBeta, WeightVector};
pub use quadrature::{Quadrature, QuadratureSpec};

/// `f64` aliases for the main domain types.
pub type BetaOpinion64 = BetaOpinion<f64>;
pub type OpinionPool64 = OpinionPool<f64>;
pub type WeightVector64 = WeightVector<f64>;
pub type PooledBeta64 = PooledBeta<f64>;
pub type HierPosterior64 = HierPosterior<f64>;
pub type OptimResult64 = OptimResult<f64>;

/// `f32` aliases, for callers trading accuracy for size.
pub type BetaOpinion32 = BetaOpinion<f32>;
pub type OpinionPool32 = OpinionPool<f32>;
pub type WeightVector32 = WeightVector<f32>;
pub type PooledBeta32 = PooledBeta<f32>;
