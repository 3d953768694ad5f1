//! Chib's marginal-likelihood estimator for the linear horseshoe.
//!
//! With `theta = (beta, sigma^2, lambda^2, tau^2, nu, xi)`,
//!
//! ```text
//! log m(y) = log p(y | theta*) + log p(theta*) - log p(theta* | y)
//! ```
//!
//! and the posterior ordinate factorizes in sweep order:
//!
//! ```text
//! p(beta* | y)                                  main run
//! p(sigma2* | beta*, y)                         reduced run, beta fixed
//! p(lambda2* | beta*, sigma2*, y)               reduced run, beta, sigma2 fixed
//! p(tau2* | beta*, sigma2*, lambda2*, y)        reduced run, + lambda2 fixed
//! p(nu*, xi* [, omega*] | everything else)      closed form
//! ```
//!
//! Each estimated ordinate is the Rao-Blackwellized average of its exact full
//! conditional density over the draws of the run. The auxiliaries enter as
//! ordinary blocks. Under the Jeffreys prior the log prior uses the
//! unnormalized density `1/sigma^2`.

use serde::Serialize;

use crate::blocks;
use crate::data::RegressionData;
use crate::dist::{ig_log_pdf, VAR_CEIL, VAR_FLOOR};
use crate::error::{HsError, Result};
use crate::linear::{Frozen, LinearSampler};
use crate::model::{HsState, PriorVariant, SamplerConfig, SigmaPrior};
use crate::rng::RandomStream;

use super::ess::effective_sample_size;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalLikelihoodEstimate {
    /// Sum of `ordinate_breakdown` values, accumulated left to right.
    pub log_marginal: f64,
    /// Signed contributions: the log likelihood and log prior at the ordinate
    /// point, then the negated log posterior ordinate of each block.
    pub ordinate_breakdown: Vec<(String, f64)>,
    /// Monte Carlo standard error of `log_marginal`.
    pub std_error: f64,
    pub n_reduced_runs: usize,
}

/// Mean of `exp(log_values)` on the log scale, with the delta-method standard
/// error of that log mean.
fn log_mean_exp(log_values: &[f64]) -> (f64, f64) {
    let max = log_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_values.iter().map(|v| (v - max).exp()).collect();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let se = match effective_sample_size(&w) {
        Ok(ess) => (var / ess).sqrt() / mean,
        Err(_) => 0.0,
    };
    (max + mean.ln(), se)
}

fn check_point(point: &HsState, p: usize, prior: SigmaPrior) -> Result<()> {
    let pos = |v: f64| v.is_finite() && (VAR_FLOOR..=VAR_CEIL).contains(&v);
    let ok = point.beta.len() == p
        && point.lambda2.len() == p
        && point.nu.len() == p
        && point.unpenalized == 0
        && point.beta.iter().all(|b| b.is_finite())
        && pos(point.sigma2)
        && pos(point.tau2)
        && pos(point.xi)
        && point.lambda2.iter().all(|&v| pos(v))
        && point.nu.iter().all(|&v| pos(v))
        && (prior == SigmaPrior::Jeffreys || point.omega_sigma.is_some_and(pos));
    if ok {
        Ok(())
    } else {
        Err(HsError::ParameterDomain(
            "ordinate point must lie in the interior of the parameter space".into(),
        ))
    }
}

fn log_prior(point: &HsState, prior: SigmaPrior) -> f64 {
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    let mut lp = 0.0;
    for ((b, l), nu) in point.beta.iter().zip(&point.lambda2).zip(&point.nu) {
        let v = l * point.tau2 * point.sigma2;
        lp += -0.5 * (ln2pi + v.ln()) - b * b / (2.0 * v);
        lp += ig_log_pdf(*l, 0.5, 1.0 / nu);
        lp += ig_log_pdf(*nu, 0.5, 1.0);
    }
    lp += ig_log_pdf(point.tau2, 0.5, 1.0 / point.xi);
    lp += ig_log_pdf(point.xi, 0.5, 1.0);
    lp += match prior {
        SigmaPrior::Jeffreys => -point.sigma2.ln(),
        SigmaPrior::HalfCauchy => {
            let w = point.omega_sigma.expect("checked");
            ig_log_pdf(point.sigma2, 0.5, 1.0 / w) + ig_log_pdf(w, 0.5, 1.0)
        }
    };
    lp
}

fn finite(block: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HsError::Numerical {
            block,
            detail: format!("non-finite log ordinate {v}"),
        })
    }
}

/// One Gibbs run (burn-in, then `n_keep` retained states) collecting a log
/// ordinate per retained state.
fn ordinate_run<F>(
    sampler: &LinearSampler<'_>,
    start: HsState,
    frozen: Frozen,
    rng: &mut RandomStream,
    mut ordinate: F,
) -> Result<(f64, f64)>
where
    F: FnMut(&HsState) -> Result<f64>,
{
    let cfg = sampler.config();
    let mut state = start;
    let mut values = Vec::with_capacity(cfg.n_keep);
    let mut err = None;
    sampler.drive(&mut state, frozen, cfg.n_burn, cfg.n_keep, rng, |s| {
        if err.is_none() {
            match ordinate(s) {
                Ok(v) => values.push(v),
                Err(e) => err = Some(e),
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(log_mean_exp(&values))
}

struct Runs {
    beta: (f64, f64),
    sigma2: (f64, f64),
    lambda2: (f64, f64),
    tau2: (f64, f64),
}

fn beta_run(s: &LinearSampler<'_>, point: &HsState, rng: &mut RandomStream) -> Result<(f64, f64)> {
    ordinate_run(s, s.initial_state(), Frozen::default(), rng, |st| {
        finite("beta", s.beta_factor(st)?.log_density(&point.beta))
    })
}

fn sigma2_run(s: &LinearSampler<'_>, point: &HsState, rng: &mut RandomStream) -> Result<(f64, f64)> {
    let mut start = s.initial_state();
    start.beta = point.beta.clone();
    let frozen = Frozen { beta: true, ..Default::default() };
    ordinate_run(s, start, frozen, rng, |st| {
        let (shape, scale) = s.sigma2_params(st);
        finite("sigma2", ig_log_pdf(point.sigma2, shape, scale))
    })
}

fn lambda2_run(s: &LinearSampler<'_>, point: &HsState, rng: &mut RandomStream) -> Result<(f64, f64)> {
    let mut start = s.initial_state();
    start.beta = point.beta.clone();
    start.sigma2 = point.sigma2;
    start.omega_sigma = point.omega_sigma;
    let frozen = Frozen { beta: true, sigma2: true, ..Default::default() };
    ordinate_run(s, start, frozen, rng, |st| {
        let lp = blocks::lambda2_scales(st)
            .iter()
            .zip(&point.lambda2)
            .map(|(scale, l)| ig_log_pdf(*l, 1.0, *scale))
            .sum();
        finite("lambda2", lp)
    })
}

fn tau2_run(s: &LinearSampler<'_>, point: &HsState, rng: &mut RandomStream) -> Result<(f64, f64)> {
    let mut start = s.initial_state();
    start.beta = point.beta.clone();
    start.sigma2 = point.sigma2;
    start.omega_sigma = point.omega_sigma;
    start.lambda2 = point.lambda2.clone();
    let frozen = Frozen { beta: true, sigma2: true, lambda2: true, ..Default::default() };
    ordinate_run(s, start, frozen, rng, |st| {
        let (shape, scale) = blocks::tau2_params(st);
        finite("tau2", ig_log_pdf(point.tau2, shape, scale))
    })
}

fn prepare<'a>(
    data: &'a RegressionData,
    config: &SamplerConfig,
    point: &HsState,
) -> Result<LinearSampler<'a>> {
    if config.prior != PriorVariant::Horseshoe {
        return Err(HsError::Config(
            "marginal likelihood is implemented for the horseshoe prior only".into(),
        ));
    }
    let sampler = LinearSampler::new(data, config.clone())?;
    check_point(point, data.p(), config.sigma_prior)?;
    Ok(sampler)
}

fn assemble(
    sampler: &LinearSampler<'_>,
    point: &HsState,
    runs: Runs,
) -> Result<MarginalLikelihoodEstimate> {
    let prior = sampler.config().sigma_prior;
    let n = sampler.data().n() as f64;
    let rss = sampler.rss(&point.beta);
    let log_lik = -0.5 * n * (2.0 * std::f64::consts::PI * point.sigma2).ln()
        - rss / (2.0 * point.sigma2);

    // closed-form ordinate of the auxiliaries given everything else
    let mut aux = 0.0;
    for (nu, scale) in point.nu.iter().zip(blocks::nu_scales(point, Default::default())) {
        aux += ig_log_pdf(*nu, 1.0, scale);
    }
    aux += ig_log_pdf(point.xi, 1.0, blocks::xi_scale(point));
    if prior == SigmaPrior::HalfCauchy {
        let w = point.omega_sigma.expect("checked");
        aux += ig_log_pdf(w, 1.0, 1.0 + 1.0 / point.sigma2);
    }

    let breakdown = vec![
        ("log_likelihood".to_string(), finite("likelihood", log_lik)?),
        ("log_prior".to_string(), finite("prior", log_prior(point, prior))?),
        ("-log_posterior_beta".to_string(), -runs.beta.0),
        ("-log_posterior_sigma2".to_string(), -runs.sigma2.0),
        ("-log_posterior_lambda2".to_string(), -runs.lambda2.0),
        ("-log_posterior_tau2".to_string(), -runs.tau2.0),
        ("-log_posterior_aux".to_string(), -finite("aux", aux)?),
    ];
    let log_marginal = breakdown.iter().fold(0.0, |acc, (_, v)| acc + v);
    let std_error = [runs.beta.1, runs.sigma2.1, runs.lambda2.1, runs.tau2.1]
        .iter()
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt();
    Ok(MarginalLikelihoodEstimate {
        log_marginal,
        ordinate_breakdown: breakdown,
        std_error,
        n_reduced_runs: 3,
    })
}

/// Chib estimate at `point`, running the main and reduced chains one after
/// another on split streams 1..=4 of `config.seed`.
pub fn chib_marginal_likelihood(
    data: &RegressionData,
    config: &SamplerConfig,
    point: &HsState,
) -> Result<MarginalLikelihoodEstimate> {
    let sampler = prepare(data, config, point)?;
    let master = RandomStream::new(config.seed);
    let runs = Runs {
        beta: beta_run(&sampler, point, &mut master.split(1))?,
        sigma2: sigma2_run(&sampler, point, &mut master.split(2))?,
        lambda2: lambda2_run(&sampler, point, &mut master.split(3))?,
        tau2: tau2_run(&sampler, point, &mut master.split(4))?,
    };
    assemble(&sampler, point, runs)
}

/// Same estimate with the four chains on scoped threads; identical output to
/// [`chib_marginal_likelihood`].
pub fn chib_marginal_likelihood_parallel(
    data: &RegressionData,
    config: &SamplerConfig,
    point: &HsState,
) -> Result<MarginalLikelihoodEstimate> {
    let sampler = prepare(data, config, point)?;
    let master = RandomStream::new(config.seed);
    let s = &sampler;
    let (b, sg, l, t) = std::thread::scope(|scope| {
        let b = scope.spawn(|| beta_run(s, point, &mut master.split(1)));
        let sg = scope.spawn(|| sigma2_run(s, point, &mut master.split(2)));
        let l = scope.spawn(|| lambda2_run(s, point, &mut master.split(3)));
        let t = scope.spawn(|| tau2_run(s, point, &mut master.split(4)));
        let join = |h: std::thread::ScopedJoinHandle<'_, Result<(f64, f64)>>| {
            h.join().expect("ordinate thread panicked")
        };
        (join(b), join(sg), join(l), join(t))
    });
    let runs = Runs {
        beta: b?,
        sigma2: sg?,
        lambda2: l?,
        tau2: t?,
    };
    assemble(&sampler, point, runs)
}

/// Ordinate point from a pilot run on split stream 0: posterior means of the
/// coefficients and geometric posterior means of every variance and
/// auxiliary (the arithmetic means of the heavy-tailed local variances can sit
/// far outside the high-density region).
pub fn pilot_ordinate_point(data: &RegressionData, config: &SamplerConfig) -> Result<HsState> {
    let sampler = LinearSampler::new(data, config.clone())?;
    let mut state = sampler.initial_state();
    let p = data.p();
    let mut acc = sampler.initial_state();
    for v in acc
        .beta
        .iter_mut()
        .chain(acc.lambda2.iter_mut())
        .chain(acc.nu.iter_mut())
    {
        *v = 0.0;
    }
    acc.sigma2 = 0.0;
    acc.tau2 = 0.0;
    acc.xi = 0.0;
    let mut log_omega = 0.0;
    let mut rng = RandomStream::new(config.seed).split(0);
    sampler.drive(&mut state, Frozen::default(), config.n_burn, config.n_keep, &mut rng, |s| {
        for j in 0..p {
            acc.beta[j] += s.beta[j];
            acc.lambda2[j] += s.lambda2[j].ln();
            acc.nu[j] += s.nu[j].ln();
        }
        acc.sigma2 += s.sigma2.ln();
        acc.tau2 += s.tau2.ln();
        acc.xi += s.xi.ln();
        log_omega += s.omega_sigma.map_or(0.0, f64::ln);
    })?;
    let k = config.n_keep as f64;
    for j in 0..p {
        acc.beta[j] /= k;
        acc.lambda2[j] = (acc.lambda2[j] / k).exp();
        acc.nu[j] = (acc.nu[j] / k).exp();
    }
    acc.sigma2 = (acc.sigma2 / k).exp();
    acc.tau2 = (acc.tau2 / k).exp();
    acc.xi = (acc.xi / k).exp();
    if acc.omega_sigma.is_some() {
        acc.omega_sigma = Some((log_omega / k).exp());
    }
    Ok(acc)
}
