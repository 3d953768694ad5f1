//! Scalar distributions used by the Gibbs blocks.
//!
//! The inverse-gamma law uses the shape/scale convention
//!
//! ```text
//! p(z | a, b) = b^a / Gamma(a) * z^(-a-1) * exp(-b / z),   z > 0
//! ```
//!
//! A half-Cauchy C+(0, A) variable is represented through two inverse-gamma
//! stages: `x^2 | a ~ IG(1/2, 1/a)` with `a ~ IG(1/2, 1/A^2)`.
//!
//! Pólya-gamma draws PG(1, c) use Devroye's alternating-series rejection
//! sampler; integer shapes are sums of PG(1, c) draws and non-integer shapes
//! fall back to a truncated sum-of-gammas representation with a moment-matched
//! gamma tail.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{HsError, Result};

/// Lower clamp applied to every variance-type quantity.
pub const VAR_FLOOR: f64 = 1e-12;
/// Upper clamp applied to every variance-type quantity.
pub const VAR_CEIL: f64 = 1e12;

#[inline]
pub fn clamp_var(v: f64) -> f64 {
    if v.is_nan() {
        VAR_CEIL
    } else {
        v.clamp(VAR_FLOOR, VAR_CEIL)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvGammaParams {
    shape: f64,
    scale: f64,
}

impl InvGammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(HsError::ParameterDomain(format!(
                "inverse-gamma shape must be positive and finite, got {shape}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(HsError::ParameterDomain(format!(
                "inverse-gamma scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }

    pub fn variance(&self) -> Option<f64> {
        (self.shape > 2.0).then(|| {
            let a = self.shape;
            self.scale * self.scale / ((a - 1.0) * (a - 1.0) * (a - 2.0))
        })
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else {
            gamma_ur(self.shape, self.scale / z)
        }
    }
}

/// Unit-scale gamma variate, retried until strictly positive.
fn gamma_unit<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(shape, 1.0).expect("shape validated by caller");
    loop {
        let x = g.sample(rng);
        if x > 0.0 {
            return x;
        }
    }
}

/// Draw from IG(shape, scale) as the reciprocal of a gamma variate.
pub fn sample_inv_gamma<R: Rng + ?Sized>(params: InvGammaParams, rng: &mut R) -> f64 {
    params.scale / gamma_unit(params.shape, rng)
}

/// Unchecked inverse-gamma draw for the Gibbs hot loop. Arguments must be
/// positive and finite; the samplers clamp before calling.
#[inline]
pub(crate) fn ig<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0 && scale > 0.0 && scale.is_finite(), "IG({shape}, {scale})");
    scale / gamma_unit(shape, rng)
}

pub fn inv_gamma_log_pdf(z: f64, params: InvGammaParams) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(HsError::ParameterDomain(format!(
            "inverse-gamma density evaluated at non-positive point {z}"
        )));
    }
    Ok(ig_log_pdf(z, params.shape, params.scale))
}

#[inline]
pub(crate) fn ig_log_pdf(z: f64, shape: f64, scale: f64) -> f64 {
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * z.ln() - scale / z
}

/// One draw of `x ~ C+(0, scale)` through the two-stage inverse-gamma mixture.
pub fn sample_half_cauchy_mixture<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let a = ig(0.5, 1.0 / (scale * scale), rng);
    ig(0.5, 1.0 / a, rng).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyaGammaParams {
    shape: f64,
    tilt: f64,
}

impl PolyaGammaParams {
    pub fn new(shape: f64, tilt: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(HsError::ParameterDomain(format!(
                "Polya-gamma shape must be positive and finite, got {shape}"
            )));
        }
        if !tilt.is_finite() {
            return Err(HsError::ParameterDomain(format!(
                "Polya-gamma tilt must be finite, got {tilt}"
            )));
        }
        Ok(Self { shape, tilt })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn mean(&self) -> f64 {
        self.shape * half_tanh_ratio(self.tilt.abs()) / 2.0
    }

    pub fn variance(&self) -> f64 {
        self.shape * pg_var_ratio(self.tilt.abs()) / 4.0
    }

    /// True when draws go through the exact PG(1, c) sum.
    pub fn is_exact(&self) -> bool {
        self.shape.fract() == 0.0 && self.shape <= MAX_EXACT_SHAPE
    }
}

const MAX_EXACT_SHAPE: f64 = 1e6;
const SERIES_TERMS: usize = 200;
const TRUNC: f64 = 0.64;

/// tanh(c/2)/c, with the c -> 0 limit 1/2.
fn half_tanh_ratio(c: f64) -> f64 {
    if c < 1e-3 {
        let c2 = c * c;
        0.5 - c2 / 24.0 + c2 * c2 / 240.0
    } else {
        (c / 2.0).tanh() / c
    }
}

/// (sinh c - c) / (c^3 cosh^2(c/2)), with the c -> 0 limit 1/6.
fn pg_var_ratio(c: f64) -> f64 {
    if c < 1e-2 {
        let c2 = c * c;
        1.0 / 6.0 - c2 / 30.0 + c2 * c2 / 168.0
    } else {
        let ch = (c / 2.0).cosh();
        (2.0 * (c / 2.0).tanh() - c / (ch * ch)) / (c * c * c)
    }
}

pub fn sample_polya_gamma<R: Rng + ?Sized>(params: PolyaGammaParams, rng: &mut R) -> f64 {
    if params.is_exact() {
        let n = params.shape as u64;
        (0..n).map(|_| pg1(params.tilt, rng)).sum()
    } else {
        pg_truncated_series(params.shape, params.tilt, rng)
    }
}

fn log_norm_cdf(x: f64) -> f64 {
    (0.5 * erfc(-x / std::f64::consts::SQRT_2)).ln()
}

/// Series coefficient a_n(x) of the Jacobi density.
fn series_coef(n: usize, x: f64) -> f64 {
    let k = (n as f64 + 0.5) * PI;
    if x > TRUNC {
        k * (-0.5 * k * k * x).exp()
    } else if x > 0.0 {
        let h = n as f64 + 0.5;
        (-1.5 * (FRAC_PI_2.ln() + x.ln()) + k.ln() - 2.0 * h * h / x).exp()
    } else {
        0.0
    }
}

/// Probability of the exponential-tail proposal in Devroye's mixture.
fn texpon_mass(z: f64) -> f64 {
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let rt = (1.0 / TRUNC).sqrt();
    let b = rt * (TRUNC * z - 1.0);
    let a = -rt * (TRUNC * z + 1.0);
    let x0 = fz.ln() + fz * TRUNC;
    let xb = x0 - z + log_norm_cdf(b);
    let xa = x0 + z + log_norm_cdf(a);
    let q_over_p = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + q_over_p)
}

/// Inverse-Gaussian IG(mu = 1/z, 1) truncated to (0, TRUNC).
fn truncated_inv_gauss<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let mu = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    if mu > TRUNC {
        loop {
            let e1 = loop {
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                if e1 * e1 <= 2.0 * e2 / TRUNC {
                    break e1;
                }
            };
            let s = 1.0 + e1 * TRUNC;
            let x = TRUNC / (s * s);
            let alpha = (-0.5 * z * z * x).exp();
            if rng.random::<f64>() <= alpha {
                return x;
            }
        }
    } else {
        loop {
            let n: f64 = rng.sample(StandardNormal);
            let y = n * n;
            let muy = mu * y;
            let mut x = mu + 0.5 * mu * muy - 0.5 * mu * (4.0 * muy + muy * muy).sqrt();
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x <= TRUNC {
                return x;
            }
        }
    }
}

/// Exact PG(1, c) draw.
fn pg1<R: Rng + ?Sized>(c: f64, rng: &mut R) -> f64 {
    let z = 0.5 * c.abs();
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let mass = texpon_mass(z);
    loop {
        let x = if rng.random::<f64>() < mass {
            TRUNC + rng.sample::<f64, _>(Exp1) / fz
        } else {
            truncated_inv_gauss(z, rng)
        };
        let mut s = series_coef(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_coef(n, x);
                if y <= s {
                    return 0.25 * x;
                }
            } else {
                s += series_coef(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

fn pg_truncated_series<R: Rng + ?Sized>(b: f64, c: f64, rng: &mut R) -> f64 {
    let c = c.abs();
    let shift = c * c / (4.0 * PI * PI);
    let mut draw = 0.0;
    let mut inv_d = 0.0;
    let mut inv_d2 = 0.0;
    for k in 1..=SERIES_TERMS {
        let h = k as f64 - 0.5;
        let d = h * h + shift;
        draw += gamma_unit(b, rng) / d;
        inv_d += 1.0 / d;
        inv_d2 += 1.0 / (d * d);
    }
    draw /= 2.0 * PI * PI;

    let tail_inv_d = (PI * PI * half_tanh_ratio(c) - inv_d).max(0.0);
    let tail_inv_d2 = (PI.powi(4) * pg_var_ratio(c) - inv_d2).max(0.0);
    let mean = b * tail_inv_d / (2.0 * PI * PI);
    let var = b * tail_inv_d2 / (4.0 * PI.powi(4));
    if mean > 0.0 && var > 0.0 {
        draw += gamma_unit(mean * mean / var, rng) * var / mean;
    } else {
        draw += mean;
    }
    draw
}
