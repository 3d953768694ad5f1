use faer::{Mat, MatRef};

use crate::error::{HsError, Result};

/// Design matrix and response for the linear model.
///
/// When standardized, every column has zero mean and unit Euclidean length
/// and the response is centred; the removed means and norms are kept so that
/// coefficients can be mapped back to the original scale.
#[derive(Clone, Debug)]
pub struct RegressionData {
    x: Mat<f64>,
    y: Vec<f64>,
    standardized: bool,
    column_means: Vec<f64>,
    column_norms: Vec<f64>,
    y_center: f64,
}

fn check_finite(x: MatRef<'_, f64>, y: &[f64]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(HsError::Dimension(format!(
            "design has {} rows but response has length {}",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(HsError::Dimension("empty design matrix".into()));
    }
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if !x[(i, j)].is_finite() {
                return Err(HsError::ParameterDomain(format!(
                    "non-finite design entry at row {i}, column {j}"
                )));
            }
        }
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(HsError::ParameterDomain(format!("non-finite response at row {i}")));
    }
    Ok(())
}

impl RegressionData {
    /// Use `x` and `y` exactly as given.
    pub fn new(x: Mat<f64>, y: Vec<f64>) -> Result<Self> {
        check_finite(x.as_ref(), &y)?;
        let p = x.ncols();
        Ok(Self {
            x,
            y,
            standardized: false,
            column_means: vec![0.0; p],
            column_norms: vec![1.0; p],
            y_center: 0.0,
        })
    }

    /// Centre `y` and give every column of `x` zero mean and unit length.
    pub fn standardized(x: Mat<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, y)?.standardize()
    }

    pub fn standardize(mut self) -> Result<Self> {
        if self.standardized {
            return Ok(self);
        }
        let (n, p) = (self.x.nrows(), self.x.ncols());
        for j in 0..p {
            let mean = (0..n).map(|i| self.x[(i, j)]).sum::<f64>() / n as f64;
            let norm = (0..n)
                .map(|i| (self.x[(i, j)] - mean).powi(2))
                .sum::<f64>()
                .sqrt();
            if !(norm > 0.0) {
                return Err(HsError::Degenerate(format!(
                    "column {j} is constant and cannot be standardized"
                )));
            }
            for i in 0..n {
                self.x[(i, j)] = (self.x[(i, j)] - mean) / norm;
            }
            self.column_means[j] = mean;
            self.column_norms[j] = norm;
        }
        self.y_center = self.y.iter().sum::<f64>() / n as f64;
        for v in &mut self.y {
            *v -= self.y_center;
        }
        self.standardized = true;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> MatRef<'_, f64> {
        self.x.as_ref()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn y_center(&self) -> f64 {
        self.y_center
    }

    /// Map coefficients on the standardized scale back to the original
    /// predictors. Returns `(intercept, slopes)`.
    pub fn destandardize(&self, beta: &[f64]) -> (f64, Vec<f64>) {
        let slopes: Vec<f64> = beta
            .iter()
            .zip(&self.column_norms)
            .map(|(b, s)| b / s)
            .collect();
        let intercept = self.y_center
            - slopes
                .iter()
                .zip(&self.column_means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        (intercept, slopes)
    }

    /// Same data with predictor columns reordered; `perm[k]` is the source
    /// column of new column `k`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        let p = self.p();
        let mut seen = vec![false; p];
        if perm.len() != p || perm.iter().any(|&k| k >= p || std::mem::replace(&mut seen[k], true)) {
            return Err(HsError::Dimension("not a permutation of the columns".into()));
        }
        Ok(Self {
            x: Mat::from_fn(self.n(), p, |i, k| self.x[(i, perm[k])]),
            y: self.y.clone(),
            standardized: self.standardized,
            column_means: perm.iter().map(|&k| self.column_means[k]).collect(),
            column_norms: perm.iter().map(|&k| self.column_norms[k]).collect(),
            y_center: self.y_center,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlmFamily {
    Logistic,
    NegBin,
}

/// Data for the Pólya-gamma augmented models. Column 0 of `x` is the
/// all-ones intercept, which is never shrunk.
#[derive(Clone, Debug)]
pub struct GlmData {
    x: Mat<f64>,
    y: Vec<f64>,
    family: GlmFamily,
    dispersion: Option<f64>,
}

impl GlmData {
    /// `predictors` must not contain an intercept; one is prepended.
    pub fn logistic(predictors: MatRef<'_, f64>, y: Vec<f64>) -> Result<Self> {
        check_finite(predictors, &y)?;
        if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(HsError::ParameterDomain(format!(
                "logistic response must be 0 or 1, got {} at row {i}",
                y[i]
            )));
        }
        Ok(Self {
            x: with_intercept(predictors),
            y,
            family: GlmFamily::Logistic,
            dispersion: None,
        })
    }

    /// Negative-binomial counts with fixed dispersion `h`, so that
    /// `E[y_i] = h exp(x_i' beta)`.
    pub fn negbin(predictors: MatRef<'_, f64>, y: Vec<f64>, h: f64) -> Result<Self> {
        check_finite(predictors, &y)?;
        if !(h.is_finite() && h > 0.0) {
            return Err(HsError::ParameterDomain(format!(
                "negative-binomial dispersion must be positive, got {h}"
            )));
        }
        if let Some(i) = y.iter().position(|&v| v < 0.0 || v.fract() != 0.0) {
            return Err(HsError::ParameterDomain(format!(
                "negative-binomial response must be a non-negative integer, got {} at row {i}",
                y[i]
            )));
        }
        Ok(Self {
            x: with_intercept(predictors),
            y,
            family: GlmFamily::NegBin,
            dispersion: Some(h),
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of coefficients including the intercept.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> MatRef<'_, f64> {
        self.x.as_ref()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn family(&self) -> GlmFamily {
        self.family
    }

    pub fn dispersion(&self) -> Option<f64> {
        self.dispersion
    }

    /// kappa_i = y_i - 1/2 (logistic) or (y_i - h)/2 (negative binomial).
    pub fn kappa(&self) -> Vec<f64> {
        match (self.family, self.dispersion) {
            (GlmFamily::NegBin, Some(h)) => self.y.iter().map(|y| (y - h) / 2.0).collect(),
            _ => self.y.iter().map(|y| y - 0.5).collect(),
        }
    }

    /// Pólya-gamma shape of each omega_i.
    pub fn pg_shapes(&self) -> Vec<f64> {
        match (self.family, self.dispersion) {
            (GlmFamily::NegBin, Some(h)) => self.y.iter().map(|y| y + h).collect(),
            _ => vec![1.0; self.n()],
        }
    }
}

fn with_intercept(predictors: MatRef<'_, f64>) -> Mat<f64> {
    Mat::from_fn(predictors.nrows(), predictors.ncols() + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            predictors[(i, j - 1)]
        }
    })
}
