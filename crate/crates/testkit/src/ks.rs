//! Kolmogorov-Smirnov statistics and the reference CDFs they are run against.

use statrs::function::gamma::gamma_ur;

use crate::quad;

/// One-sample statistic `sup |F_n - F|`.
pub fn one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    sup_distance(&s, s.iter().map(|&x| cdf(x)))
}

fn sup_distance(sorted: &[f64], cdf: impl Iterator<Item = f64>) -> f64 {
    let n = sorted.len() as f64;
    cdf.enumerate()
        .map(|(i, f)| (f - i as f64 / n).max((i + 1) as f64 / n - f))
        .fold(0.0, f64::max)
}

/// One-sample statistic against a normalized density on `(lower, inf)`; the
/// CDF is accumulated by quadrature between consecutive order statistics.
pub fn one_sample_density<F: Fn(f64) -> f64>(samples: &[f64], density: F, lower: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let mut acc = quad::integrate(&density, lower, s[0], 400);
    let mut prev = s[0];
    let cdf = s.iter().map(move |&x| {
        if x > prev {
            acc += quad::integrate(&density, prev, x, 1);
            prev = x;
        }
        acc
    });
    sup_distance(&s, cdf)
}

/// Two-sample statistic `sup |F_a - F_b|`.
pub fn two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// CDF of the inverse gamma with density `b^a / G(a) z^(-a-1) exp(-b/z)`.
pub fn inv_gamma_cdf(z: f64, shape: f64, scale: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        gamma_ur(shape, scale / z)
    }
}

pub fn cauchy_cdf(x: f64, scale: f64) -> f64 {
    0.5 + (x / scale).atan() / std::f64::consts::PI
}

pub fn half_cauchy_cdf(x: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        2.0 * (x / scale).atan() / std::f64::consts::PI
    }
}
