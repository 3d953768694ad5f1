//! Fixtures shared by the benchmarks.

use hs_core::faer::Mat;
use hs_core::{HsState, PriorVariant, RandomStream, RegressionData, SigmaPrior};
use rand::Rng;
use rand_distr::StandardNormal;

/// Standard-normal design and response.
pub fn synthetic(n: usize, p: usize, seed: u64) -> RegressionData {
    let mut rng = RandomStream::new(seed);
    let x = Mat::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    RegressionData::standardized(x, y).expect("synthetic data is well formed")
}

/// A mid-chain state with spread-out local variances.
pub fn spread_state(p: usize) -> HsState {
    let mut s = HsState::initial(p, 0, PriorVariant::Horseshoe, SigmaPrior::Jeffreys);
    for (j, l) in s.lambda2.iter_mut().enumerate() {
        *l = 10f64.powf(-3.0 + 6.0 * j as f64 / p.max(2) as f64);
    }
    s.tau2 = 0.1;
    s
}
