//! Gibbs samplers for horseshoe and horseshoe+ regression built on the
//! inverse-gamma scale-mixture representation of the half-Cauchy prior.
//!
//! Every full conditional is either Gaussian (the coefficients) or
//! inverse-gamma (all variances and auxiliaries), with Pólya-gamma
//! augmentation extending the linear sampler to logistic and
//! negative-binomial likelihoods.

pub mod blocks;
pub mod data;
pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod gauss;
pub mod glm;
pub mod linear;
mod linalg;
pub mod model;
pub mod rng;

pub use data::{GlmData, GlmFamily, RegressionData};
pub use error::{HsError, Result};
pub use faer;
pub use gauss::{Backend, BackendPolicy};
pub use glm::{run_chain_glm, GlmSampler};
pub use linear::{run_chain, run_chains, LinearSampler};
pub use model::{ChainOutput, HsPlusForm, HsState, PriorVariant, SamplerConfig, SigmaPrior};
pub use rng::RandomStream;
