//! Independent reference computations for the test suites: goodness-of-fit
//! statistics, quadrature, dense linear algebra and closed-form posteriors of
//! tiny models. Nothing here calls into the sampler crates.

pub mod dense;
pub mod ks;
pub mod oracle;
pub mod quad;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Stationary Gaussian AR(1) path with unit marginal variance.
pub fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = (1.0 - rho * rho).sqrt();
    let mut x: f64 = StandardNormal.sample(&mut rng);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x = rho * x + sd * z;
            x
        })
        .collect()
}

/// Integrated-autocorrelation ESS fraction of an AR(1) chain thinned by `t`.
pub fn ar1_ess_fraction(rho: f64, t: u32) -> f64 {
    let r = rho.powi(t as i32);
    (1.0 - r) / (1.0 + r)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with divisor `n - 1`.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standardized errors of the empirical mean vector and covariance matrix of
/// `draws` (one draw per row) against the Gaussian law `N(mean, cov)`.
/// Covariance entries use the Gaussian sampling variance
/// `(C_jj C_kk + C_jk^2) / N`.
pub fn gaussian_moment_z(draws: &[Vec<f64>], mean: &[f64], cov: &[Vec<f64>]) -> Vec<f64> {
    let n = draws.len() as f64;
    let p = mean.len();
    let emp_mean: Vec<f64> = (0..p).map(|j| draws.iter().map(|d| d[j]).sum::<f64>() / n).collect();
    let mut z: Vec<f64> = (0..p)
        .map(|j| (emp_mean[j] - mean[j]) / (cov[j][j] / n).sqrt())
        .collect();
    for j in 0..p {
        for k in 0..=j {
            let c = draws
                .iter()
                .map(|d| (d[j] - mean[j]) * (d[k] - mean[k]))
                .sum::<f64>()
                / n;
            let se = ((cov[j][j] * cov[k][k] + cov[j][k] * cov[j][k]) / n).sqrt();
            z.push((c - cov[j][k]) / se);
        }
    }
    z
}

/// Number of standard errors that keeps the family-wise false-alarm rate of
/// `m` simultaneous two-sided checks equal to that of a single 3-s.e. check.
pub fn familywise_z(m: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let single = 2.0 * Normal::standard().cdf(-3.0);
    Normal::standard().inverse_cdf(1.0 - single / (2.0 * m as f64))
}
