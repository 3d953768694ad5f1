use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{HsError, Result};
use crate::gauss::{Backend, BackendPolicy};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorVariant {
    #[default]
    Horseshoe,
    HorseshoePlus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPrior {
    /// p(sigma^2) proportional to 1/sigma^2.
    #[default]
    Jeffreys,
    /// sigma ~ C+(0, 1) through an auxiliary omega_sigma.
    HalfCauchy,
}

/// Parametrization of the horseshoe+ mixing layer.
///
/// Both forms place a standard half-Cauchy prior on the scale of each
/// `lambda_j` and produce the same chain for every other block; they differ
/// only in what the `eta2` field stores.
///
/// * `Conventional`: `lambda_j ~ C+(0, eta_j)`, `eta_j ~ C+(0, 1)`, `eta2`
///   holds `eta_j^2` and `nu_j | . ~ IG(1, 1/eta_j^2 + 1/lambda_j^2)`.
/// * `Literal`: `eta2` holds the inverse squared scale, so the auxiliary update
///   reads `nu_j | . ~ IG(1, eta_j^2 + 1/lambda_j^2)` verbatim. Because
///   `1/eta_j` is again C+(0, 1) this is the same prior.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HsPlusForm {
    #[default]
    Conventional,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub n_burn: usize,
    pub n_keep: usize,
    pub thin: usize,
    pub prior: PriorVariant,
    pub sigma_prior: SigmaPrior,
    pub hs_plus_form: HsPlusForm,
    pub backend_policy: BackendPolicy,
    pub seed: u64,
    /// Keep the local variances of every retained draw.
    pub store_lambda2: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_burn: 1000,
            n_keep: 1000,
            thin: 1,
            prior: PriorVariant::Horseshoe,
            sigma_prior: SigmaPrior::Jeffreys,
            hs_plus_form: HsPlusForm::Conventional,
            backend_policy: BackendPolicy::Auto,
            seed: 0,
            store_lambda2: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_keep == 0 {
            return Err(HsError::Config("n_keep must be at least 1".into()));
        }
        if self.thin == 0 {
            return Err(HsError::Config("thin must be at least 1".into()));
        }
        Ok(())
    }
}

/// Full Gibbs state.
///
/// `beta` has one entry per coefficient; the first `unpenalized` entries
/// (the GLM intercept) carry no shrinkage and have no local scale, so
/// `lambda2`, `nu`, `eta2` and `phi` have `beta.len() - unpenalized` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct HsState {
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub lambda2: Vec<f64>,
    pub tau2: f64,
    pub nu: Vec<f64>,
    pub xi: f64,
    pub eta2: Option<Vec<f64>>,
    pub phi: Option<Vec<f64>>,
    pub omega_sigma: Option<f64>,
    pub unpenalized: usize,
}

impl HsState {
    /// beta = 0 and every variance or auxiliary at 1.
    pub fn initial(p: usize, unpenalized: usize, prior: PriorVariant, sigma_prior: SigmaPrior) -> Self {
        let q = p - unpenalized;
        let plus = prior == PriorVariant::HorseshoePlus;
        Self {
            beta: vec![0.0; p],
            sigma2: 1.0,
            lambda2: vec![1.0; q],
            tau2: 1.0,
            nu: vec![1.0; q],
            xi: 1.0,
            eta2: plus.then(|| vec![1.0; q]),
            phi: plus.then(|| vec![1.0; q]),
            omega_sigma: (sigma_prior == SigmaPrior::HalfCauchy).then_some(1.0),
            unpenalized,
        }
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Coefficients that carry the shrinkage prior.
    pub fn penalized_beta(&self) -> &[f64] {
        &self.beta[self.unpenalized..]
    }

    /// Diagonal of the prior precision `1/(lambda_j^2 tau^2)` with
    /// `unpenalized_precision` on the free coefficients.
    pub fn prior_precision(&self, unpenalized_precision: f64) -> Vec<f64> {
        let mut d = vec![unpenalized_precision; self.unpenalized];
        d.extend(self.lambda2.iter().map(|l| 1.0 / (l * self.tau2)));
        d
    }

    /// Every variance-type field is finite and inside the clamp range.
    pub fn in_clamp_range(&self) -> bool {
        use crate::dist::{VAR_CEIL, VAR_FLOOR};
        let ok = |v: f64| (VAR_FLOOR..=VAR_CEIL).contains(&v);
        ok(self.sigma2)
            && ok(self.tau2)
            && ok(self.xi)
            && self.lambda2.iter().all(|&v| ok(v))
            && self.nu.iter().all(|&v| ok(v))
            && self.eta2.iter().flatten().all(|&v| ok(v))
            && self.phi.iter().flatten().all(|&v| ok(v))
            && self.omega_sigma.is_none_or(ok)
            && self.beta.iter().all(|b| b.is_finite())
    }
}

/// Retained draws of one chain. Row `k` of each matrix is retained draw `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    pub beta_draws: Mat<f64>,
    pub sigma2_draws: Vec<f64>,
    pub tau2_draws: Vec<f64>,
    pub lambda2_draws: Option<Mat<f64>>,
    pub backend: Backend,
    pub wall_clock_seconds: f64,
}

impl ChainOutput {
    pub fn n_keep(&self) -> usize {
        self.beta_draws.nrows()
    }

    pub fn p(&self) -> usize {
        self.beta_draws.ncols()
    }

    pub fn beta_column(&self, j: usize) -> Vec<f64> {
        (0..self.n_keep()).map(|k| self.beta_draws[(k, j)]).collect()
    }

    pub fn posterior_mean(&self) -> Vec<f64> {
        let n = self.n_keep() as f64;
        (0..self.p())
            .map(|j| (0..self.n_keep()).map(|k| self.beta_draws[(k, j)]).sum::<f64>() / n)
            .collect()
    }

    /// Equal-tailed credible interval of coefficient `j`.
    pub fn credible_interval(&self, j: usize, level: f64) -> (f64, f64) {
        let mut v = self.beta_column(j);
        v.sort_by(|a, b| a.total_cmp(b));
        let q = |prob: f64| {
            let pos = prob * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
        };
        let a = (1.0 - level) / 2.0;
        (q(a), q(1.0 - a))
    }

    /// Equality of every stored draw, ignoring timing.
    pub fn same_draws(&self, other: &Self) -> bool {
        self.beta_draws == other.beta_draws
            && self.sigma2_draws == other.sigma2_draws
            && self.tau2_draws == other.tau2_draws
            && self.lambda2_draws == other.lambda2_draws
    }
}

/// Accumulates retained draws during a run.
pub(crate) struct DrawRecorder {
    beta: Mat<f64>,
    sigma2: Vec<f64>,
    tau2: Vec<f64>,
    lambda2: Option<Mat<f64>>,
    row: usize,
}

impl DrawRecorder {
    pub fn new(n_keep: usize, p: usize, q: usize, store_lambda2: bool) -> Self {
        Self {
            beta: Mat::zeros(n_keep, p),
            sigma2: Vec::with_capacity(n_keep),
            tau2: Vec::with_capacity(n_keep),
            lambda2: store_lambda2.then(|| Mat::zeros(n_keep, q)),
            row: 0,
        }
    }

    pub fn push(&mut self, s: &HsState) {
        for (j, b) in s.beta.iter().enumerate() {
            self.beta[(self.row, j)] = *b;
        }
        if let Some(l) = &mut self.lambda2 {
            for (j, v) in s.lambda2.iter().enumerate() {
                l[(self.row, j)] = *v;
            }
        }
        self.sigma2.push(s.sigma2);
        self.tau2.push(s.tau2);
        self.row += 1;
    }

    pub fn finish(self, backend: Backend, seconds: f64) -> ChainOutput {
        ChainOutput {
            beta_draws: self.beta,
            sigma2_draws: self.sigma2,
            tau2_draws: self.tau2,
            lambda2_draws: self.lambda2,
            backend,
            wall_clock_seconds: seconds,
        }
    }
}
