//! Inverse-gamma full conditionals of the shrinkage hierarchy.
//!
//! The linear and GLM samplers share these updates verbatim (the GLMs pass a
//! state whose `sigma2` is fixed at 1). Each block exposes its parameters
//! separately from its draw so that marginal-likelihood ordinates evaluate
//! exactly the densities the sampler draws from.
//!
//! ```text
//! lambda_j^2 | .  ~ IG(1, 1/nu_j + beta_j^2 / (2 tau^2 sigma^2))
//! tau^2 | .       ~ IG((q+1)/2, 1/xi + sum_j beta_j^2/lambda_j^2 / (2 sigma^2))
//! nu_j | .        ~ IG(1, 1 + 1/lambda_j^2)
//! xi | .          ~ IG(1, 1 + 1/tau^2)
//! sigma^2 | .     ~ IG((n+q)/2, RSS/2 + beta' Lambda_*^-1 beta / 2)
//! ```

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::dist::{clamp_var, ig, VAR_FLOOR};
use crate::error::{HsError, Result};
use crate::model::{HsPlusForm, HsState, SigmaPrior};

pub fn lambda2_scales(s: &HsState) -> Vec<f64> {
    let denom = 2.0 * s.tau2 * s.sigma2;
    s.penalized_beta()
        .iter()
        .zip(&s.nu)
        .map(|(b, nu)| (1.0 / nu + b * b / denom).max(VAR_FLOOR))
        .collect()
}

pub fn update_lambda2<R: Rng + ?Sized>(s: &HsState, rng: &mut R) -> Vec<f64> {
    lambda2_scales(s)
        .into_iter()
        .map(|scale| clamp_var(ig(1.0, scale, rng)))
        .collect()
}

/// `(shape, scale)` of the global variance conditional.
pub fn tau2_params(s: &HsState) -> (f64, f64) {
    let q = s.lambda2.len() as f64;
    let ss: f64 = s
        .penalized_beta()
        .iter()
        .zip(&s.lambda2)
        .map(|(b, l)| b * b / l)
        .sum();
    ((q + 1.0) / 2.0, (1.0 / s.xi + ss / (2.0 * s.sigma2)).max(VAR_FLOOR))
}

pub fn update_tau2<R: Rng + ?Sized>(s: &HsState, rng: &mut R) -> f64 {
    let (shape, scale) = tau2_params(s);
    clamp_var(ig(shape, scale, rng))
}

pub fn nu_scales(s: &HsState, form: HsPlusForm) -> Vec<f64> {
    match &s.eta2 {
        None => s.lambda2.iter().map(|l| 1.0 + 1.0 / l).collect(),
        Some(eta2) => s
            .lambda2
            .iter()
            .zip(eta2)
            .map(|(l, e)| match form {
                HsPlusForm::Conventional => 1.0 / e + 1.0 / l,
                HsPlusForm::Literal => e + 1.0 / l,
            })
            .collect(),
    }
}

pub fn xi_scale(s: &HsState) -> f64 {
    1.0 + 1.0 / s.tau2
}

/// Draws `(nu, xi)`.
pub fn update_aux<R: Rng + ?Sized>(s: &HsState, form: HsPlusForm, rng: &mut R) -> (Vec<f64>, f64) {
    let nu = nu_scales(s, form)
        .into_iter()
        .map(|scale| clamp_var(ig(1.0, scale, rng)))
        .collect();
    let xi = clamp_var(ig(1.0, xi_scale(s), rng));
    (nu, xi)
}

/// Horseshoe+ mixing layer: draws `eta2` given `(nu, phi)`, then `phi` given
/// the new `eta2`. Returns `(eta2, phi)`.
///
/// Conventional form: `eta_j^2 ~ IG(1, 1/nu_j + 1/phi_j)`,
/// `phi_j ~ IG(1, 1 + 1/eta_j^2)`. The literal form stores the reciprocal, so
/// `eta2` is exponential with rate `1/nu_j + 1/phi_j` and
/// `phi_j ~ IG(1, 1 + eta2_j)`.
pub fn update_eta2<R: Rng + ?Sized>(
    s: &HsState,
    form: HsPlusForm,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let phi = s.phi.as_ref().filter(|_| s.eta2.is_some()).ok_or_else(|| {
        HsError::Config("the eta layer exists only under the horseshoe+ prior".into())
    })?;
    let mut eta2 = Vec::with_capacity(phi.len());
    let mut phi_new = Vec::with_capacity(phi.len());
    for (nu, ph) in s.nu.iter().zip(phi) {
        let rate = 1.0 / nu + 1.0 / ph;
        let e = match form {
            HsPlusForm::Conventional => clamp_var(ig(1.0, rate, rng)),
            HsPlusForm::Literal => clamp_var(Distribution::<f64>::sample(&Exp1, rng) / rate),
        };
        let phi_scale = match form {
            HsPlusForm::Conventional => 1.0 + 1.0 / e,
            HsPlusForm::Literal => 1.0 + e,
        };
        eta2.push(e);
        phi_new.push(clamp_var(ig(1.0, phi_scale, rng)));
    }
    Ok((eta2, phi_new))
}

/// `(shape, scale)` of the noise-variance conditional given the residual sum
/// of squares at the current coefficients.
pub fn sigma2_params(s: &HsState, n: usize, rss: f64, prior: SigmaPrior) -> (f64, f64) {
    let q = s.lambda2.len();
    let prior_ss: f64 = s
        .penalized_beta()
        .iter()
        .zip(&s.lambda2)
        .map(|(b, l)| b * b / (l * s.tau2))
        .sum();
    let mut shape = (n + q) as f64 / 2.0;
    let mut scale = rss / 2.0 + prior_ss / 2.0;
    if prior == SigmaPrior::HalfCauchy {
        shape += 0.5;
        scale += 1.0 / s.omega_sigma.unwrap_or(1.0);
    }
    (shape, scale.max(VAR_FLOOR))
}

pub fn update_omega_sigma<R: Rng + ?Sized>(s: &HsState, rng: &mut R) -> f64 {
    clamp_var(ig(1.0, 1.0 + 1.0 / s.sigma2, rng))
}
