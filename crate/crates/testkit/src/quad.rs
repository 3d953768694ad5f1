//! Composite Gauss-Legendre quadrature.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

const ORDER: usize = 10;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(ORDER.try_into().unwrap())
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect()
    })
}

/// Nodes and weights of `panels` equal panels on `[a, b]`.
pub fn nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            rule().iter().map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect()
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    nodes(a, b, panels).iter().map(|(x, w)| w * f(*x)).sum()
}

/// `log sum_k w_k exp(g(x_k))` over the given nodes.
pub fn log_integrate<F: Fn(f64) -> f64>(g: F, nodes: &[(f64, f64)]) -> f64 {
    let vals: Vec<f64> = nodes.iter().map(|(x, w)| g(*x) + w.ln()).collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + vals.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
