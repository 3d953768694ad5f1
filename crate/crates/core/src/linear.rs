//! Gibbs sampler for horseshoe and horseshoe+ linear regression.
//!
//! One sweep updates, in order, beta -> sigma^2 (-> omega_sigma) -> lambda^2
//! -> tau^2 -> (nu, xi) (-> eta^2, phi). All blocks but beta are
//! inverse-gamma; beta is drawn from its Gaussian conditional with the
//! backend chosen from the problem shape.

use std::time::Instant;

use faer::Mat;
use rand::Rng;

use crate::blocks;
use crate::data::RegressionData;
use crate::error::{HsError, Result};
use crate::gauss::{self, Backend, GaussCondSpec, PrecisionFactor};
use crate::linalg;
use crate::model::{ChainOutput, DrawRecorder, HsState, PriorVariant, SamplerConfig, SigmaPrior};
use crate::rng::RandomStream;

/// Blocks held fixed during a sweep (reduced runs).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Frozen {
    pub beta: bool,
    pub sigma2: bool,
    pub lambda2: bool,
    pub tau2: bool,
}

pub struct LinearSampler<'a> {
    data: &'a RegressionData,
    config: SamplerConfig,
    backend: Backend,
    gram: Option<Mat<f64>>,
    cross: Vec<f64>,
}

impl<'a> LinearSampler<'a> {
    pub fn new(data: &'a RegressionData, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        let backend = gauss::select_backend(data.n(), data.p(), config.backend_policy);
        let gram = (backend == Backend::Rue).then(|| linalg::gram_lower(data.x()));
        let cross = linalg::mat_t_vec(data.x(), data.y());
        Ok(Self {
            data,
            config,
            backend,
            gram,
            cross,
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn data(&self) -> &RegressionData {
        self.data
    }

    pub fn initial_state(&self) -> HsState {
        HsState::initial(self.data.p(), 0, self.config.prior, self.config.sigma_prior)
    }

    fn beta_spec<'s>(&'s self, precision: &'s [f64], sigma2: f64) -> Result<GaussCondSpec<'s>> {
        let spec = GaussCondSpec::new(self.data.x(), self.data.y(), precision, sigma2)?
            .with_cross(&self.cross);
        Ok(match &self.gram {
            Some(g) => spec.with_gram(g.as_ref()),
            None => spec,
        })
    }

    /// Factor of the coefficient conditional at `state`; its log density is
    /// the beta ordinate used for marginal likelihoods.
    pub fn beta_factor(&self, state: &HsState) -> Result<PrecisionFactor> {
        let precision = state.prior_precision(0.0);
        PrecisionFactor::new(&self.beta_spec(&precision, state.sigma2)?)
    }

    pub fn update_beta<R: Rng + ?Sized>(&self, state: &HsState, rng: &mut R) -> Result<Vec<f64>> {
        let precision = state.prior_precision(0.0);
        let spec = self.beta_spec(&precision, state.sigma2)?;
        let beta = gauss::sample_beta(&spec, self.backend, rng)?;
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(HsError::Numerical {
                block: "beta",
                detail: "non-finite coefficient draw".into(),
            });
        }
        Ok(beta)
    }

    pub fn rss(&self, beta: &[f64]) -> f64 {
        let fitted = linalg::mat_vec(self.data.x(), beta);
        self.data
            .y()
            .iter()
            .zip(&fitted)
            .map(|(y, f)| (y - f) * (y - f))
            .sum()
    }

    pub fn sigma2_params(&self, state: &HsState) -> (f64, f64) {
        blocks::sigma2_params(state, self.data.n(), self.rss(&state.beta), self.config.sigma_prior)
    }

    pub fn update_sigma2<R: Rng + ?Sized>(&self, state: &HsState, rng: &mut R) -> f64 {
        let (shape, scale) = self.sigma2_params(state);
        crate::dist::clamp_var(crate::dist::ig(shape, scale, rng))
    }

    pub fn sweep<R: Rng + ?Sized>(&self, state: &mut HsState, rng: &mut R) -> Result<()> {
        self.sweep_frozen(state, Frozen::default(), rng)
    }

    pub fn sweep_frozen<R: Rng + ?Sized>(
        &self,
        state: &mut HsState,
        frozen: Frozen,
        rng: &mut R,
    ) -> Result<()> {
        let form = self.config.hs_plus_form;
        if !frozen.beta {
            state.beta = self.update_beta(state, rng)?;
        }
        if !frozen.sigma2 {
            state.sigma2 = self.update_sigma2(state, rng);
        }
        if self.config.sigma_prior == SigmaPrior::HalfCauchy {
            state.omega_sigma = Some(blocks::update_omega_sigma(state, rng));
        }
        if !frozen.lambda2 {
            state.lambda2 = blocks::update_lambda2(state, rng);
        }
        if !frozen.tau2 {
            state.tau2 = blocks::update_tau2(state, rng);
        }
        let (nu, xi) = blocks::update_aux(state, form, rng);
        state.nu = nu;
        state.xi = xi;
        if self.config.prior == PriorVariant::HorseshoePlus {
            let (eta2, phi) = blocks::update_eta2(state, form, rng)?;
            state.eta2 = Some(eta2);
            state.phi = Some(phi);
        }
        Ok(())
    }

    /// Burn in, then visit every `thin`-th of the following `n_keep * thin`
    /// states.
    pub fn drive<R, F>(
        &self,
        state: &mut HsState,
        frozen: Frozen,
        n_burn: usize,
        n_keep: usize,
        rng: &mut R,
        mut visit: F,
    ) -> Result<()>
    where
        R: Rng + ?Sized,
        F: FnMut(&HsState),
    {
        for _ in 0..n_burn {
            self.sweep_frozen(state, frozen, rng)?;
        }
        for _ in 0..n_keep {
            for _ in 0..self.config.thin {
                self.sweep_frozen(state, frozen, rng)?;
            }
            visit(state);
        }
        Ok(())
    }

    pub fn run_with(&self, rng: &mut RandomStream) -> Result<ChainOutput> {
        let start = Instant::now();
        let mut state = self.initial_state();
        let mut rec = DrawRecorder::new(
            self.config.n_keep,
            self.data.p(),
            self.data.p(),
            self.config.store_lambda2,
        );
        self.drive(
            &mut state,
            Frozen::default(),
            self.config.n_burn,
            self.config.n_keep,
            rng,
            |s| rec.push(s),
        )?;
        Ok(rec.finish(self.backend, start.elapsed().as_secs_f64()))
    }

    pub fn run(&self) -> Result<ChainOutput> {
        self.run_with(&mut RandomStream::new(self.config.seed))
    }
}

/// Run one chain seeded from `config.seed`.
pub fn run_chain(data: &RegressionData, config: &SamplerConfig) -> Result<ChainOutput> {
    LinearSampler::new(data, config.clone())?.run()
}

/// Run `n_chains` chains on scoped threads, chain `k` on split stream `k` of
/// the master seed.
pub fn run_chains(
    data: &RegressionData,
    config: &SamplerConfig,
    n_chains: usize,
) -> Result<Vec<ChainOutput>> {
    let sampler = LinearSampler::new(data, config.clone())?;
    let master = RandomStream::new(config.seed);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..n_chains as u64)
            .map(|k| {
                let mut rng = master.split(k);
                let sampler = &sampler;
                scope.spawn(move || sampler.run_with(&mut rng))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}
