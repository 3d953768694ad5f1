//! Timing harness over an (n, p) grid.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hs_core::faer::Mat;
use hs_core::gauss::select_backend;
use hs_core::{run_chain, Backend, BackendPolicy, RandomStream, RegressionData, SamplerConfig};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchGrid {
    pub n_values: Vec<usize>,
    pub p_values: Vec<usize>,
    /// Retained draws timed per cell; there is no burn-in.
    pub n_iterations: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Cells whose estimated working set exceeds this many bytes are
    /// reported as failed without being run.
    pub memory_limit_bytes: usize,
}

impl BenchGrid {
    pub fn new(n_values: Vec<usize>, p_values: Vec<usize>) -> Self {
        Self {
            n_values,
            p_values,
            n_iterations: 1000,
            repetitions: 3,
            seed: 0,
            memory_limit_bytes: 4 << 30,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n_values.is_empty() || self.p_values.is_empty() {
            return Err(CliError::usage("bench grid needs at least one n and one p"));
        }
        if self.n_values.iter().chain(&self.p_values).any(|&v| v == 0)
            || self.n_iterations == 0
            || self.repetitions == 0
        {
            return Err(CliError::usage("bench grid values must all be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellOutcome {
    /// Median wall-clock seconds over the repetitions.
    Seconds(f64),
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchCell {
    pub n: usize,
    pub p: usize,
    pub backend: Backend,
    pub outcome: CellOutcome,
}

/// Rough peak bytes for one chain: data, the p x p or n x n system, draws.
pub fn estimated_bytes(n: usize, p: usize, n_keep: usize) -> usize {
    let system = match select_backend(n, p, BackendPolicy::Auto) {
        Backend::Rue => 3 * p * p,
        Backend::Fast => 3 * n * n + 2 * n * p,
    };
    8 * (2 * n * p + system + n_keep * p + 16 * (n + p))
}

/// Standard-normal design and response with no signal.
pub fn synthetic_data(n: usize, p: usize, seed: u64) -> CliResult<RegressionData> {
    let mut rng = RandomStream::new(seed);
    let x = Mat::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng));
    let y = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok(RegressionData::new(x, y)?)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn over_limit(grid: &BenchGrid, n: usize, p: usize) -> Option<String> {
    let bytes = estimated_bytes(n, p, grid.n_iterations);
    (bytes > grid.memory_limit_bytes).then(|| {
        format!("estimated {} MiB exceeds the {} MiB limit", bytes >> 20, grid.memory_limit_bytes >> 20)
    })
}

fn guarded<T>(f: impl FnOnce() -> CliResult<T>) -> Result<T, String> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(t)) => Ok(t),
        Ok(Err(e)) => Err(e.message),
        Err(_) => Err("panicked".into()),
    }
}

// One timed chain. A few untimed sweeps go first so the timed run does not
// pay for cold caches and first-touch allocation.
fn time_once(grid: &BenchGrid, data: &RegressionData, cell_seed: u64, rep: usize) -> CliResult<f64> {
    let warm = SamplerConfig { n_burn: 0, n_keep: grid.n_iterations.min(10), ..SamplerConfig::default() };
    run_chain(data, &warm)?;
    let config = SamplerConfig {
        n_burn: 0,
        n_keep: grid.n_iterations,
        seed: RandomStream::new(cell_seed).split(rep as u64).seed(),
        ..SamplerConfig::default()
    };
    Ok(run_chain(data, &config)?.wall_clock_seconds)
}

struct Slot {
    n: usize,
    p: usize,
    seed: u64,
    data: Option<RegressionData>,
    times: Vec<f64>,
    failure: Option<String>,
}

/// Time every cell. Repetitions are interleaved: each pass times every cell
/// once, so a burst of background load lands on different cells in different
/// passes and the per-cell median discards it. A failing cell is recorded and
/// the grid carries on. `progress` sees each cell after its last repetition.
pub fn run_grid(grid: &BenchGrid, mut progress: impl FnMut(&BenchCell)) -> CliResult<Vec<BenchCell>> {
    grid.validate()?;
    let master = RandomStream::new(grid.seed);
    let mut slots: Vec<Slot> = Vec::new();
    for &n in &grid.n_values {
        for &p in &grid.p_values {
            let seed = master.split(((n as u64) << 32) ^ p as u64).seed();
            slots.push(Slot { n, p, seed, data: None, times: Vec::new(), failure: over_limit(grid, n, p) });
        }
    }
    let mut cells = Vec::with_capacity(slots.len());
    for rep in 0..grid.repetitions {
        let last = rep + 1 == grid.repetitions;
        for slot in &mut slots {
            if slot.failure.is_none() {
                // data for the large cells is rebuilt each pass rather than
                // held for the whole grid
                let data = match slot.data.take() {
                    Some(d) => Ok(d),
                    None => guarded(|| synthetic_data(slot.n, slot.p, slot.seed)),
                };
                match data.and_then(|d| guarded(|| time_once(grid, &d, slot.seed, rep)).map(|t| (d, t))) {
                    Ok((d, t)) => {
                        slot.times.push(t);
                        if !last && estimated_bytes(slot.n, slot.p, 0) < 64 << 20 {
                            slot.data = Some(d);
                        }
                    }
                    Err(e) => slot.failure = Some(e),
                }
            }
            if last {
                let outcome = match slot.failure.take() {
                    Some(e) => CellOutcome::Failed(e),
                    None => CellOutcome::Seconds(median(std::mem::take(&mut slot.times))),
                };
                let cell = BenchCell {
                    n: slot.n,
                    p: slot.p,
                    backend: select_backend(slot.n, slot.p, BackendPolicy::Auto),
                    outcome,
                };
                progress(&cell);
                cells.push(cell);
            }
        }
    }
    Ok(cells)
}

/// Rows are n, columns are p; failed cells read `failed`.
pub fn write_table(path: &Path, grid: &BenchGrid, cells: &[BenchCell]) -> CliResult<()> {
    let mut out = String::from("n");
    for p in &grid.p_values {
        out.push_str(&format!(",p={p}"));
    }
    out.push('\n');
    for &n in &grid.n_values {
        out.push_str(&n.to_string());
        for &p in &grid.p_values {
            let cell = cells.iter().find(|c| c.n == n && c.p == p);
            match cell.map(|c| &c.outcome) {
                Some(CellOutcome::Seconds(t)) => out.push_str(&format!(",{t:.6}")),
                _ => out.push_str(",failed"),
            }
        }
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
