use faer::MatRef;
use serde::Serialize;

use crate::error::{HsError, Result};
use crate::model::ChainOutput;

/// Shortest chain accepted by the estimator.
pub const MIN_DRAWS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssReport {
    pub thin_level: usize,
    pub n_draws: usize,
    pub per_coefficient_ess: Vec<f64>,
    /// ESS divided by the number of retained draws at this thinning level.
    pub ess_proportion: Vec<f64>,
}

fn autocov(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    x[..n - lag]
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / n as f64
}

/// Effective sample size by Geyer's initial monotone positive sequence.
///
/// Pairs `G_m = g(2m) + g(2m+1)` of sample autocovariances are summed while
/// positive, each capped by its predecessor; then
/// `ESS = N g(0) / (-g(0) + 2 sum_m G_m)`.
pub fn effective_sample_size(draws: &[f64]) -> Result<f64> {
    let n = draws.len();
    if n < MIN_DRAWS {
        return Err(HsError::InsufficientLength(format!(
            "effective sample size needs at least {MIN_DRAWS} draws, got {n}"
        )));
    }
    if draws.iter().any(|v| !v.is_finite()) {
        return Err(HsError::Degenerate("non-finite draw".into()));
    }
    let mean = draws.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = draws.iter().map(|v| v - mean).collect();
    let g0 = autocov(&centred, 0);
    if !(g0 > 0.0) {
        return Err(HsError::Degenerate("constant sequence has no effective sample size".into()));
    }

    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = if m == 0 {
            g0 + autocov(&centred, 1)
        } else {
            autocov(&centred, 2 * m) + autocov(&centred, 2 * m + 1)
        };
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        sum += pair;
        prev = pair;
        m += 1;
    }
    let var = -g0 + 2.0 * sum;
    Ok(n as f64 * g0 / var)
}

/// ESS of every column of `draws` after keeping every `t`-th row, for each
/// thinning level `t`.
pub fn ess_vs_thinning_draws(draws: MatRef<'_, f64>, thin_levels: &[usize]) -> Result<Vec<EssReport>> {
    let rows = draws.nrows();
    thin_levels
        .iter()
        .map(|&t| {
            if t == 0 {
                return Err(HsError::Config("thinning level must be at least 1".into()));
            }
            let kept = rows.div_ceil(t);
            if kept < MIN_DRAWS {
                return Err(HsError::InsufficientLength(format!(
                    "thinning by {t} leaves {kept} of {rows} draws; need {MIN_DRAWS}"
                )));
            }
            let ess = (0..draws.ncols())
                .map(|j| {
                    let col: Vec<f64> = (0..rows).step_by(t).map(|k| draws[(k, j)]).collect();
                    effective_sample_size(&col)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(EssReport {
                thin_level: t,
                n_draws: kept,
                ess_proportion: ess.iter().map(|e| e / kept as f64).collect(),
                per_coefficient_ess: ess,
            })
        })
        .collect()
}

pub fn ess_vs_thinning(chain: &ChainOutput, thin_levels: &[usize]) -> Result<Vec<EssReport>> {
    ess_vs_thinning_draws(chain.beta_draws.as_ref(), thin_levels)
}
