//! Exact posteriors of one-predictor horseshoe models by quadrature, plus
//! reference densities that have no closed-form CDF.
//!
//! Under the horseshoe, the prior variance of a coefficient (in units of the
//! noise variance for the linear model) is `g = lambda^2 tau^2` with `lambda`,
//! `tau` iid C+(0, 1). Writing `w = log(lambda tau)`, each log scale has
//! density `sech(s)/pi`, and their convolution is `2w / (pi^2 sinh w)`, so
//! every hyperparameter integral here is one-dimensional in `w`.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::quad::{self, log_integrate};

const W_RANGE: f64 = 45.0;

/// Density of `log(lambda tau)` for independent standard half-Cauchy scales.
pub fn log_scale_density(w: f64) -> f64 {
    if w.abs() < 1e-8 {
        2.0 / (PI * PI)
    } else {
        2.0 * w / (PI * PI * w.sinh())
    }
}

fn w_nodes() -> Vec<(f64, f64)> {
    quad::nodes(-W_RANGE, W_RANGE, 900)
}

/// Log of the horseshoe marginal prior density of a coefficient with unit
/// noise scale, `int N(b; 0, e^{2w}) k(w) dw`.
pub fn horseshoe_log_density(b: f64) -> f64 {
    log_integrate(
        |w| {
            let g = (2.0 * w).exp();
            -0.5 * (2.0 * PI * g).ln() - b * b / (2.0 * g) + log_scale_density(w).ln()
        },
        &w_nodes(),
    )
}

/// Linear regression `y = x beta + e`, one predictor, no intercept, Jeffreys
/// prior `1/sigma^2` on the noise variance and the horseshoe on `beta`.
#[derive(Clone, Debug)]
pub struct LinearP1 {
    n: f64,
    xx: f64,
    xy: f64,
    yy: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl LinearP1 {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
        Self {
            n: x.len() as f64,
            xx: dot(x, x),
            xy: dot(x, y),
            yy: dot(y, y),
            x: x.to_vec(),
            y: y.to_vec(),
        }
    }

    /// `log p(y | g)` with `beta` and `sigma^2` integrated analytically:
    /// `G(n/2) pi^{-n/2} |I + g x x'|^{-1/2} (y'(I + g x x')^{-1} y)^{-n/2}`.
    pub fn log_evidence_given_g(&self, g: f64) -> f64 {
        let det = 1.0 + g * self.xx;
        let q = self.yy - g * self.xy * self.xy / det;
        ln_gamma(self.n / 2.0) - self.n / 2.0 * PI.ln() - 0.5 * det.ln() - self.n / 2.0 * q.ln()
    }

    /// Same quantity by brute-force quadrature over `(beta, log sigma^2)`.
    pub fn log_evidence_given_g_numeric(&self, g: f64) -> f64 {
        // b = bhat + sinh(t) reaches the polynomial tails of the beta marginal
        let bhat = self.xy / self.xx;
        let b_nodes: Vec<(f64, f64)> = quad::nodes(-25.0, 25.0, 800)
            .into_iter()
            .map(|(t, w)| (bhat + t.sinh(), w * t.cosh()))
            .collect();
        let s_nodes = quad::nodes(-40.0, 20.0, 800);
        log_integrate(
            |b| {
                let rss: f64 = self
                    .x
                    .iter()
                    .zip(&self.y)
                    .map(|(x, y)| (y - x * b).powi(2))
                    .sum();
                log_integrate(
                    |s| {
                        let v = s.exp();
                        -self.n / 2.0 * (2.0 * PI * v).ln() - rss / (2.0 * v)
                            - 0.5 * (2.0 * PI * g * v).ln()
                            - b * b / (2.0 * g * v)
                    },
                    &s_nodes,
                )
            },
            &b_nodes,
        )
    }

    fn weighted(&self, f: impl Fn(f64) -> f64) -> f64 {
        log_integrate(
            |w| {
                let g = (2.0 * w).exp();
                self.log_evidence_given_g(g) + log_scale_density(w).ln() + f(g).ln()
            },
            &w_nodes(),
        )
    }

    /// `log m(y)` under the unnormalized Jeffreys prior.
    pub fn log_marginal(&self) -> f64 {
        self.weighted(|_| 1.0)
    }

    /// `E[beta | y]`, using `E[beta | g, y] = g x'y / (1 + g x'x)`.
    pub fn posterior_mean(&self) -> f64 {
        let sign = self.xy.signum();
        let num = self.weighted(|g| g * self.xy.abs() / (1.0 + g * self.xx));
        sign * (num - self.log_marginal()).exp()
    }
}

/// Logistic regression with a flat-prior intercept and one slope under the
/// horseshoe.
#[derive(Clone, Debug)]
pub struct LogisticP1 {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl LogisticP1 {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
        }
    }

    fn log_lik(&self, a: f64, b: f64) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(x, y)| {
                let psi = a + b * x;
                // y psi - log(1 + e^psi), stable for large |psi|
                y * psi - psi.max(0.0) - (-psi.abs()).exp().ln_1p()
            })
            .sum()
    }

    /// Slope nodes: geometric panels toward the log singularity of the prior
    /// at zero, then uniform panels out to `limit`.
    fn slope_nodes(limit: f64) -> Vec<(f64, f64)> {
        let mut pos = Vec::new();
        let mut lo = 0.0;
        for k in -12..=0 {
            let hi = 10f64.powi(k);
            pos.extend(quad::nodes(lo, hi, 4));
            lo = hi;
        }
        pos.extend(quad::nodes(1.0, limit, 200));
        let mut all: Vec<(f64, f64)> = pos.iter().map(|(x, w)| (-x, *w)).collect();
        all.extend(pos);
        all
    }

    /// `E[slope | y]` by nested quadrature over (intercept, slope, w).
    pub fn posterior_mean_slope(&self) -> f64 {
        let a_nodes = quad::nodes(-30.0, 30.0, 300);
        let b_nodes = Self::slope_nodes(30.0);
        let log_post: Vec<(f64, f64, f64)> = b_nodes
            .iter()
            .map(|&(b, wt)| {
                let lh = log_integrate(|a| self.log_lik(a, b), &a_nodes);
                (b, wt, lh + horseshoe_log_density(b))
            })
            .collect();
        let max = log_post.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max);
        let (num, den) = log_post.iter().fold((0.0, 0.0), |(n, d), (b, wt, lp)| {
            let m = wt * (lp - max).exp();
            (n + b * m, d + m)
        });
        num / den
    }
}

/// Devroye's density of `J*(1)`, evaluated by whichever alternating series
/// converges fastest at `x`.
fn j_star_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for n in 0..500 {
        let k = n as f64 + 0.5;
        let a = if x <= 0.64 {
            PI * k * (2.0 / (PI * x)).powf(1.5) * (-2.0 * k * k / x).exp()
        } else {
            PI * k * (-k * k * PI * PI * x / 2.0).exp()
        };
        sum += if n % 2 == 0 { a } else { -a };
        if a < 1e-18 * sum.abs() || a == 0.0 {
            break;
        }
    }
    sum
}

/// Density of the Polya-gamma `PG(1, c)` law.
pub fn polya_gamma1_density(w: f64, c: f64) -> f64 {
    4.0 * (c / 2.0).cosh() * (-c * c * w / 2.0).exp() * j_star_density(4.0 * w)
}

/// Conditional law of `log eta_j^2` in the horseshoe+ hierarchy
/// `nu_j | eta_j^2 ~ IG(1/2, 1/eta_j^2)`, `eta_j ~ C+(0, 1)`, given `nu_j`:
/// density proportional to `exp(-1/(e nu)) / (1 + e)` in `e = eta_j^2`, i.e.
/// `exp(-e^{-u}/nu) / (1 + e^u)` in `u = log e`.
#[derive(Clone, Debug)]
pub struct EtaConditional {
    nu: f64,
    log_norm: f64,
}

impl EtaConditional {
    pub fn new(nu: f64) -> Self {
        let unnorm = |u: f64| -(-u).exp() / nu - u.exp().ln_1p();
        let log_norm = log_integrate(unnorm, &quad::nodes(-60.0, 60.0, 1200));
        Self { nu, log_norm }
    }

    pub fn log_density(&self, u: f64) -> f64 {
        -(-u).exp() / self.nu - u.exp().ln_1p() - self.log_norm
    }
}
