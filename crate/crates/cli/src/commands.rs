use std::fs;
use std::io::Write;
use std::path::Path;

use hs_core::diagnostics::{
    chib_marginal_likelihood, effective_sample_size, ess_vs_thinning_draws, pilot_ordinate_point,
};
use hs_core::faer::Mat;
use hs_core::{run_chain, run_chain_glm, ChainOutput, GlmData, RegressionData};
use serde::Serialize;
use serde_json::json;

use crate::bench::{run_grid, write_table, BenchGrid, CellOutcome};
use crate::config::{parse_format, read_config, Family, RunManifest};
use crate::error::{CliError, CliResult};
use crate::io::{self, Draws, DrawsFormat, Table};
use crate::{BenchArgs, EssArgs, EvidenceArgs, RunArgs};

pub const INTERCEPT_NAME: &str = "(Intercept)";

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::numerical(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn create_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => Ok(fs::create_dir_all(dir)?),
        _ => Ok(()),
    }
}

pub fn resolve_manifest(args: &RunArgs) -> CliResult<RunManifest> {
    let (file, _) = read_config(args.config.as_deref())?;
    let family = args
        .family
        .or(file.family)
        .ok_or_else(|| CliError::usage("--family is required (linear, logistic or negbin)"))?;
    let format = match (&args.format, &file.format) {
        (Some(f), _) => *f,
        (None, Some(s)) => parse_format(s).map_err(CliError::usage)?,
        (None, None) => DrawsFormat::Csv,
    };
    let chain = args.chain.clone().over(file.chain());
    let manifest = RunManifest {
        input_path: args.input.clone(),
        family,
        h: chain.h,
        config: chain.sampler_config(),
        output_dir: args.out.clone(),
        format,
        destandardize: args.destandardize || file.destandardize.unwrap_or(false),
    };
    manifest.validate()?;
    Ok(manifest)
}

struct Fitted {
    names: Vec<String>,
    chain: ChainOutput,
    draws: Mat<f64>,
}

fn fit(manifest: &RunManifest, table: Table) -> CliResult<Fitted> {
    let config = &manifest.config;
    match manifest.family {
        Family::Linear => {
            let data = RegressionData::standardized(table.x, table.y)?;
            let chain = run_chain(&data, config)?;
            if !manifest.destandardize {
                return Ok(Fitted { names: table.names, draws: chain.beta_draws.clone(), chain });
            }
            let (rows, p) = (chain.n_keep(), data.p());
            let mut draws = Mat::zeros(rows, p + 1);
            for k in 0..rows {
                let beta: Vec<f64> = (0..p).map(|j| chain.beta_draws[(k, j)]).collect();
                let (a, slopes) = data.destandardize(&beta);
                draws[(k, 0)] = a;
                for (j, s) in slopes.into_iter().enumerate() {
                    draws[(k, j + 1)] = s;
                }
            }
            let names = std::iter::once(INTERCEPT_NAME.to_string()).chain(table.names).collect();
            Ok(Fitted { names, chain, draws })
        }
        Family::Logistic | Family::Negbin => {
            let data = match manifest.h {
                Some(h) => GlmData::negbin(table.x.as_ref(), table.y, h)?,
                None => GlmData::logistic(table.x.as_ref(), table.y)?,
            };
            let chain = run_chain_glm(&data, config)?;
            let names = std::iter::once(INTERCEPT_NAME.to_string()).chain(table.names).collect();
            Ok(Fitted { names, draws: chain.beta_draws.clone(), chain })
        }
    }
}

#[derive(Serialize)]
struct CoefficientSummary {
    name: String,
    mean: f64,
    sd: f64,
    ci95: (f64, f64),
    /// Absent when the chain is too short for the estimator.
    ess: Option<f64>,
}

fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let pos = prob * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(name: &str, column: &[f64]) -> CoefficientSummary {
    let n = column.len() as f64;
    let mean = column.iter().sum::<f64>() / n;
    let sd = if column.len() > 1 {
        (column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    CoefficientSummary {
        name: name.to_string(),
        mean,
        sd,
        ci95: (quantile(&sorted, 0.025), quantile(&sorted, 0.975)),
        ess: effective_sample_size(column).ok(),
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn run(args: &RunArgs, log: &mut dyn Write) -> CliResult<()> {
    let manifest = resolve_manifest(args)?;
    let input_bytes = fs::read(&manifest.input_path)
        .map_err(|e| CliError::data(format!("{}: {e}", manifest.input_path.display())))?;
    let table = io::parse_csv(&input_bytes)
        .map_err(|e| CliError::data(format!("{}: {}", manifest.input_path.display(), e.message)))?;
    let (n, p) = (table.n(), table.p());
    let response = table.response_name.clone();
    let _ = writeln!(log, "sampling {:?} model, n={n}, p={p}", manifest.family);
    let fitted = fit(&manifest, table)?;

    fs::create_dir_all(&manifest.output_dir)?;
    let draws_path = manifest.output_dir.join(manifest.format.file_name());
    let draws = Draws { names: fitted.names.clone(), values: fitted.draws };
    io::write_draws(&draws_path, &draws, manifest.format)?;

    let coefficients: Vec<CoefficientSummary> = (0..draws.values.ncols())
        .map(|j| {
            let col: Vec<f64> = (0..draws.values.nrows()).map(|k| draws.values[(k, j)]).collect();
            summarize(&draws.names[j], &col)
        })
        .collect();
    let chain = &fitted.chain;
    let scale = if manifest.destandardize { "original" } else { "model" };
    write_json(
        &manifest.output_dir.join("diagnostics.json"),
        &json!({
            "n_keep": chain.n_keep(),
            "coefficient_scale": scale,
            "coefficients": coefficients,
            "sigma2_mean": (manifest.family == Family::Linear).then(|| mean(&chain.sigma2_draws)),
            "tau2_mean": mean(&chain.tau2_draws),
            "backend": chain.backend,
            "wall_clock_seconds": chain.wall_clock_seconds,
        }),
    )?;

    let config_hash = args.config.as_deref().map(io::hash_file).transpose()?;
    write_json(
        &manifest.output_dir.join("run.json"),
        &json!({
            "tool": concat!("hs ", env!("CARGO_PKG_VERSION")),
            "seed": manifest.config.seed,
            "family": manifest.family,
            "h": manifest.h,
            "config": manifest.config,
            "destandardize": manifest.destandardize,
            "input": {
                "path": manifest.input_path,
                "content_hash": io::content_hash(&input_bytes),
                "n": n,
                "p": p,
                "response": response,
            },
            "config_file": args.config.as_ref().map(|path| json!({
                "path": path,
                "content_hash": config_hash,
            })),
            "draws_file": manifest.format.file_name(),
            "coefficient_names": draws.names,
        }),
    )?;
    let _ = writeln!(log, "wrote {}", manifest.output_dir.display());
    Ok(())
}

pub fn ess(args: &EssArgs, log: &mut dyn Write) -> CliResult<()> {
    if args.thin.iter().any(|&t| t == 0) {
        return Err(CliError::usage("thinning levels must be positive"));
    }
    let draws = io::read_draws(&args.draws)?;
    let reports = ess_vs_thinning_draws(draws.values.as_ref(), &args.thin)?;
    let mut out = String::from("coefficient,thin,n_draws,ess,ess_proportion\n");
    for (j, name) in draws.names.iter().enumerate() {
        for r in &reports {
            out.push_str(&format!(
                "{name},{},{},{:?},{:?}\n",
                r.thin_level, r.n_draws, r.per_coefficient_ess[j], r.ess_proportion[j]
            ));
        }
    }
    create_parent(&args.out)?;
    fs::write(&args.out, out)?;
    let _ = writeln!(log, "wrote {}", args.out.display());
    Ok(())
}

pub fn evidence(args: &EvidenceArgs, log: &mut dyn Write) -> CliResult<()> {
    let (file, _) = read_config(args.config.as_deref())?;
    if let Some(f) = file.family.filter(|f| *f != Family::Linear) {
        return Err(CliError::usage(format!("evidence supports only the linear family, not {f:?}")));
    }
    let chain = args.chain.clone().over(file.chain());
    if chain.h.is_some() {
        return Err(CliError::usage("--h applies only to the negbin family"));
    }
    let config = chain.sampler_config();
    config.validate()?;
    let input_bytes = fs::read(&args.input)
        .map_err(|e| CliError::data(format!("{}: {e}", args.input.display())))?;
    let table = io::parse_csv(&input_bytes)
        .map_err(|e| CliError::data(format!("{}: {}", args.input.display(), e.message)))?;
    let (n, p) = (table.n(), table.p());
    let data = RegressionData::standardized(table.x, table.y)?;
    let _ = writeln!(log, "pilot run for the ordinate point");
    let point = pilot_ordinate_point(&data, &config)?;
    let _ = writeln!(log, "main and reduced runs");
    let est = chib_marginal_likelihood(&data, &config, &point)?;
    create_parent(&args.out)?;
    write_json(
        &args.out,
        &json!({
            "log_marginal": est.log_marginal,
            "std_error": est.std_error,
            "ordinate_breakdown": est.ordinate_breakdown
                .iter()
                .map(|(k, v)| json!({"term": k, "value": v}))
                .collect::<Vec<_>>(),
            "n_reduced_runs": est.n_reduced_runs,
            "data_scale": "standardized",
            "seed": config.seed,
            "config": config,
            "input": {
                "path": args.input,
                "content_hash": io::content_hash(&input_bytes),
                "n": n,
                "p": p,
            },
        }),
    )?;
    let _ = writeln!(log, "log marginal likelihood {:.6} (s.e. {:.4})", est.log_marginal, est.std_error);
    Ok(())
}

pub fn bench(args: &BenchArgs, log: &mut dyn Write) -> CliResult<()> {
    let grid = BenchGrid {
        n_iterations: args.iterations,
        repetitions: args.reps,
        seed: args.seed,
        memory_limit_bytes: args.mem_limit_mb.saturating_mul(1 << 20),
        ..BenchGrid::new(args.n.clone(), args.p.clone())
    };
    let cells = run_grid(&grid, |c| {
        let _ = match &c.outcome {
            CellOutcome::Seconds(t) => writeln!(log, "n={} p={} {:?}: {t:.4}s", c.n, c.p, c.backend),
            CellOutcome::Failed(why) => writeln!(log, "n={} p={}: failed ({why})", c.n, c.p),
        };
    })?;
    create_parent(&args.out)?;
    write_table(&args.out, &grid, &cells)
}
