//! Effective sample size and marginal-likelihood estimation.

mod chib;
mod ess;

pub use chib::{
    chib_marginal_likelihood, chib_marginal_likelihood_parallel, pilot_ordinate_point,
    MarginalLikelihoodEstimate,
};
pub use ess::{effective_sample_size, ess_vs_thinning, ess_vs_thinning_draws, EssReport};
