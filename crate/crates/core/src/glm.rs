//! Pólya-gamma augmented horseshoe samplers for logistic and
//! negative-binomial regression.
//!
//! Given `omega_i ~ PG(b_i, x_i' beta)` the likelihood is Gaussian in beta with
//! pseudo-response `z_i = kappa_i / omega_i` and precision `omega_i`, so beta is
//! drawn from `N(A^-1 X' Omega z, A^-1)` with `A = X' Omega X + Lambda_*^-1`.
//! The shrinkage blocks are the linear ones with `sigma^2 = 1`. The intercept
//! (column 0) gets a flat prior, realized as precision [`INTERCEPT_PRECISION`].
//!
//! For the negative binomial, `p(y | h, pi) ∝ (1 - pi)^h pi^y` with
//! `pi = logistic(psi)`, so `E[y] = h exp(psi)` and
//! `Var[y] = E[y] (1 + E[y] / h)`; `b_i = y_i + h` and `kappa_i = (y_i - h)/2`.

use std::time::Instant;

use faer::Mat;
use rand::Rng;

use crate::blocks;
use crate::data::{GlmData, GlmFamily};
use crate::dist::{sample_polya_gamma, PolyaGammaParams};
use crate::error::{HsError, Result};
use crate::gauss::{self, Backend, GaussCondSpec};
use crate::linalg;
use crate::model::{ChainOutput, DrawRecorder, HsState, PriorVariant, SamplerConfig, SigmaPrior};
use crate::rng::RandomStream;

pub const INTERCEPT_PRECISION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GlmState {
    pub hs: HsState,
    pub omega: Vec<f64>,
}

fn draw_omegas<R: Rng + ?Sized>(
    x: faer::MatRef<'_, f64>,
    beta: &[f64],
    shapes: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let psi = linalg::mat_vec(x, beta);
    shapes
        .iter()
        .zip(&psi)
        .map(|(&b, &c)| Ok(sample_polya_gamma(PolyaGammaParams::new(b, c)?, rng)))
        .collect()
}

/// `omega_i ~ PG(1, x_i' beta)`.
pub fn update_omega_logistic<R: Rng + ?Sized>(
    state: &GlmState,
    data: &GlmData,
    rng: &mut R,
) -> Result<Vec<f64>> {
    draw_omegas(data.x(), &state.hs.beta, &vec![1.0; data.n()], rng)
}

/// `omega_i ~ PG(y_i + h, x_i' beta)`.
pub fn update_omega_negbin<R: Rng + ?Sized>(
    state: &GlmState,
    data: &GlmData,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if data.family() != GlmFamily::NegBin {
        return Err(HsError::Config("negative-binomial update on non-count data".into()));
    }
    draw_omegas(data.x(), &state.hs.beta, &data.pg_shapes(), rng)
}

pub struct GlmSampler<'a> {
    data: &'a GlmData,
    config: SamplerConfig,
    backend: Backend,
    kappa: Vec<f64>,
    shapes: Vec<f64>,
}

impl<'a> GlmSampler<'a> {
    pub fn new(data: &'a GlmData, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        if config.sigma_prior != SigmaPrior::Jeffreys {
            return Err(HsError::Config(
                "the GLM likelihoods have no noise variance; sigma prior must be the default".into(),
            ));
        }
        let backend = gauss::select_backend(data.n(), data.p(), config.backend_policy);
        Ok(Self {
            data,
            backend,
            kappa: data.kappa(),
            shapes: data.pg_shapes(),
            config,
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn initial_state(&self) -> GlmState {
        GlmState {
            hs: HsState::initial(self.data.p(), 1, self.config.prior, SigmaPrior::Jeffreys),
            omega: self.shapes.iter().map(|b| b / 4.0).collect(),
        }
    }

    pub fn update_omega<R: Rng + ?Sized>(&self, state: &GlmState, rng: &mut R) -> Result<Vec<f64>> {
        draw_omegas(self.data.x(), &state.hs.beta, &self.shapes, rng)
    }

    /// Pseudo-response `z_i = kappa_i / omega_i`.
    pub fn pseudo_response(&self, omega: &[f64]) -> Vec<f64> {
        self.kappa.iter().zip(omega).map(|(k, w)| k / w).collect()
    }

    /// Draw of beta given omega and the shrinkage state. Shared by both
    /// families: only `(Omega, z)` differ.
    pub fn update_beta_glm<R: Rng + ?Sized>(&self, state: &GlmState, rng: &mut R) -> Result<Vec<f64>> {
        let x = self.data.x();
        let root: Vec<f64> = state.omega.iter().map(|w| w.sqrt()).collect();
        let design = Mat::from_fn(x.nrows(), x.ncols(), |i, j| root[i] * x[(i, j)]);
        // Omega^1/2 z = kappa / sqrt(omega)
        let response: Vec<f64> = self.kappa.iter().zip(&root).map(|(k, r)| k / r).collect();
        let precision = state.hs.prior_precision(INTERCEPT_PRECISION);
        let spec = GaussCondSpec::new(design.as_ref(), &response, &precision, 1.0)?;
        let beta = gauss::sample_beta(&spec, self.backend, rng)?;
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(HsError::Numerical {
                block: "beta",
                detail: "non-finite coefficient draw".into(),
            });
        }
        Ok(beta)
    }

    pub fn sweep<R: Rng + ?Sized>(&self, state: &mut GlmState, rng: &mut R) -> Result<()> {
        let form = self.config.hs_plus_form;
        state.omega = self.update_omega(state, rng)?;
        state.hs.beta = self.update_beta_glm(state, rng)?;
        let hs = &mut state.hs;
        hs.lambda2 = blocks::update_lambda2(hs, rng);
        hs.tau2 = blocks::update_tau2(hs, rng);
        let (nu, xi) = blocks::update_aux(hs, form, rng);
        hs.nu = nu;
        hs.xi = xi;
        if self.config.prior == PriorVariant::HorseshoePlus {
            let (eta2, phi) = blocks::update_eta2(hs, form, rng)?;
            hs.eta2 = Some(eta2);
            hs.phi = Some(phi);
        }
        Ok(())
    }

    pub fn run_with(&self, rng: &mut RandomStream) -> Result<ChainOutput> {
        let start = Instant::now();
        let mut state = self.initial_state();
        let p = self.data.p();
        let mut rec = DrawRecorder::new(self.config.n_keep, p, p - 1, self.config.store_lambda2);
        for _ in 0..self.config.n_burn {
            self.sweep(&mut state, rng)?;
        }
        for _ in 0..self.config.n_keep {
            for _ in 0..self.config.thin {
                self.sweep(&mut state, rng)?;
            }
            rec.push(&state.hs);
        }
        Ok(rec.finish(self.backend, start.elapsed().as_secs_f64()))
    }

    pub fn run(&self) -> Result<ChainOutput> {
        self.run_with(&mut RandomStream::new(self.config.seed))
    }
}

/// Run one chain of the family stored in `data`. Column 0 of the draws is the
/// intercept.
pub fn run_chain_glm(data: &GlmData, config: &SamplerConfig) -> Result<ChainOutput> {
    GlmSampler::new(data, config.clone())?.run()
}
