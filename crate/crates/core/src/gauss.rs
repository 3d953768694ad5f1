//! Draws from the Gaussian full conditional of the regression coefficients,
//!
//! ```text
//! beta ~ N_p(A^-1 X'r, s2 A^-1),   A = X'X + diag(prior_precision)
//! ```
//!
//! Two exact backends are provided. [`Backend::Rue`] factors the p x p matrix
//! `A` (cubic in p). [`Backend::Fast`] works on the n x n system
//! `I + X diag(1/prior_precision) X'` and is linear in p, which wins when p >= n.

use faer::{Mat, MatRef};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HsError, Result};
use crate::linalg::{self, cholesky_with_jitter, solve_lower, solve_lower_t};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Rue,
    Fast,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendPolicy {
    #[default]
    Auto,
    ForceRue,
    ForceFast,
}

/// Rue's factorization when `n > p`, the linear-in-p sampler otherwise.
pub fn select_backend(n: usize, p: usize, policy: BackendPolicy) -> Backend {
    match policy {
        BackendPolicy::ForceRue => Backend::Rue,
        BackendPolicy::ForceFast => Backend::Fast,
        BackendPolicy::Auto if n > p => Backend::Rue,
        BackendPolicy::Auto => Backend::Fast,
    }
}

/// Ingredients of one Gaussian conditional.
///
/// `response` is the n-vector on the scale of `design` (y, or `Omega^1/2 z`
/// for the augmented GLMs); the p-vector `X'r` is derived from it unless a
/// precomputed one is attached.
#[derive(Clone, Copy, Debug)]
pub struct GaussCondSpec<'a> {
    design: MatRef<'a, f64>,
    response: &'a [f64],
    prior_precision: &'a [f64],
    noise_variance: f64,
    gram: Option<MatRef<'a, f64>>,
    cross: Option<&'a [f64]>,
}

impl<'a> GaussCondSpec<'a> {
    pub fn new(
        design: MatRef<'a, f64>,
        response: &'a [f64],
        prior_precision: &'a [f64],
        noise_variance: f64,
    ) -> Result<Self> {
        if response.len() != design.nrows() {
            return Err(HsError::Dimension(format!(
                "response has length {} but design has {} rows",
                response.len(),
                design.nrows()
            )));
        }
        if prior_precision.len() != design.ncols() {
            return Err(HsError::Dimension(format!(
                "prior precision has length {} but design has {} columns",
                prior_precision.len(),
                design.ncols()
            )));
        }
        if let Some(bad) = prior_precision.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(HsError::ParameterDomain(format!(
                "prior precision entries must be positive and finite, got {bad}"
            )));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(HsError::ParameterDomain(format!(
                "noise variance must be positive and finite, got {noise_variance}"
            )));
        }
        Ok(Self {
            design,
            response,
            prior_precision,
            noise_variance,
            gram: None,
            cross: None,
        })
    }

    /// Attach a precomputed `X'X` (only the lower triangle is read).
    pub fn with_gram(mut self, gram: MatRef<'a, f64>) -> Self {
        debug_assert_eq!(gram.nrows(), self.design.ncols());
        self.gram = Some(gram);
        self
    }

    /// Attach a precomputed `X'r`.
    pub fn with_cross(mut self, cross: &'a [f64]) -> Self {
        debug_assert_eq!(cross.len(), self.design.ncols());
        self.cross = Some(cross);
        self
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    pub fn p(&self) -> usize {
        self.design.ncols()
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn weighted_response(&self) -> Vec<f64> {
        match self.cross {
            Some(c) => c.to_vec(),
            None => linalg::mat_t_vec(self.design, self.response),
        }
    }

    /// Lower triangle of `A`.
    pub fn precision_matrix(&self) -> Mat<f64> {
        let mut a = match self.gram {
            Some(g) => g.to_owned(),
            None => linalg::gram_lower(self.design),
        };
        for (j, d) in self.prior_precision.iter().enumerate() {
            a[(j, j)] += d;
        }
        a
    }
}

/// Cholesky factor `L` of `A` together with `L^-1 X'r`.
#[derive(Clone, Debug)]
pub struct PrecisionFactor {
    l: Mat<f64>,
    whitened: Vec<f64>,
    noise_variance: f64,
}

impl PrecisionFactor {
    pub fn new(spec: &GaussCondSpec<'_>) -> Result<Self> {
        let l = cholesky_with_jitter(spec.precision_matrix())?;
        let mut whitened = spec.weighted_response();
        solve_lower(l.as_ref(), &mut whitened);
        Ok(Self {
            l,
            whitened,
            noise_variance: spec.noise_variance,
        })
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = self.whitened.clone();
        solve_lower_t(self.l.as_ref(), &mut m);
        m
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let sd = self.noise_variance.sqrt();
        let mut v: Vec<f64> = self
            .whitened
            .iter()
            .map(|w| w + sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        solve_lower_t(self.l.as_ref(), &mut v);
        v
    }

    /// Log density of `N(A^-1 X'r, s2 A^-1)` at `beta`.
    pub fn log_density(&self, beta: &[f64]) -> f64 {
        let p = beta.len();
        let mean = self.mean();
        let diff: Vec<f64> = beta.iter().zip(&mean).map(|(b, m)| b - m).collect();
        // ||L' diff||^2 = diff' A diff
        let mut quad = 0.0;
        for j in 0..p {
            let mut s = 0.0;
            for i in j..p {
                s += self.l[(i, j)] * diff[i];
            }
            quad += s * s;
        }
        let log_det_l: f64 = (0..p).map(|i| self.l[(i, i)].ln()).sum();
        -0.5 * p as f64 * (2.0 * std::f64::consts::PI * self.noise_variance).ln() + log_det_l
            - 0.5 * quad / self.noise_variance
    }
}

/// Exact draw via Cholesky factorization of the p x p precision.
pub fn sample_beta_rue<R: Rng + ?Sized>(spec: &GaussCondSpec<'_>, rng: &mut R) -> Result<Vec<f64>> {
    Ok(PrecisionFactor::new(spec)?.draw(rng))
}

/// Exact draw through the n x n data-augmentation system.
///
/// With `D = diag(1/prior_precision)`:
/// `u ~ N(0, s2 D)`, `d ~ N(0, s2 I_n)`, `w = (X D X' + I)^-1 (r - X u - d)`,
/// `beta = u + D X' w`.
pub fn sample_beta_fast<R: Rng + ?Sized>(spec: &GaussCondSpec<'_>, rng: &mut R) -> Result<Vec<f64>> {
    let sd = spec.noise_variance.sqrt();
    let prior_var: Vec<f64> = spec.prior_precision.iter().map(|d| 1.0 / d).collect();
    let u: Vec<f64> = prior_var
        .iter()
        .map(|v| sd * v.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let xu = linalg::mat_vec(spec.design, &u);
    let mut w: Vec<f64> = spec
        .response
        .iter()
        .zip(&xu)
        .map(|(r, xu)| r - xu - sd * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let m = linalg::weighted_outer_plus_identity(spec.design, &prior_var);
    let l = cholesky_with_jitter(m).map_err(|e| HsError::Numerical {
        block: "beta",
        detail: format!("n x n solve of the fast sampler failed: {e}"),
    })?;
    solve_lower(l.as_ref(), &mut w);
    solve_lower_t(l.as_ref(), &mut w);

    let xtw = linalg::mat_t_vec(spec.design, &w);
    Ok(u.iter()
        .zip(&prior_var)
        .zip(&xtw)
        .map(|((u, v), x)| u + v * x)
        .collect())
}

pub fn sample_beta<R: Rng + ?Sized>(
    spec: &GaussCondSpec<'_>,
    backend: Backend,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match backend {
        Backend::Rue => sample_beta_rue(spec, rng),
        Backend::Fast => sample_beta_fast(spec, rng),
    }
}
