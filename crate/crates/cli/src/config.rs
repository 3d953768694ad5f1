//! Run configuration: command-line flags over a JSON file over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use hs_core::{BackendPolicy, PriorVariant, SamplerConfig, SigmaPrior};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::DrawsFormat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    Logistic,
    Negbin,
}

/// Settings that may come from a flag or from the config file. Every field is
/// optional so that the two sources can be layered.
#[derive(Clone, Debug, Default, PartialEq, clap::Args)]
pub struct ChainSettings {
    /// Negative-binomial dispersion (required for negbin)
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, value_parser = parse_prior)]
    pub prior: Option<PriorVariant>,
    #[arg(long = "sigma-prior", value_parser = parse_sigma_prior)]
    pub sigma_prior: Option<SigmaPrior>,
    /// Burn-in sweeps
    #[arg(long)]
    pub burn: Option<usize>,
    /// Retained draws
    #[arg(long)]
    pub keep: Option<usize>,
    /// Sweeps per retained draw
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// auto, rue or fast
    #[arg(long, value_parser = parse_backend)]
    pub backend: Option<BackendPolicy>,
}

impl ChainSettings {
    /// Fields set here win; unset ones fall back to `lower`.
    pub fn over(self, lower: ChainSettings) -> ChainSettings {
        ChainSettings {
            h: self.h.or(lower.h),
            prior: self.prior.or(lower.prior),
            sigma_prior: self.sigma_prior.or(lower.sigma_prior),
            burn: self.burn.or(lower.burn),
            keep: self.keep.or(lower.keep),
            thin: self.thin.or(lower.thin),
            seed: self.seed.or(lower.seed),
            backend: self.backend.or(lower.backend),
        }
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        let d = SamplerConfig::default();
        SamplerConfig {
            n_burn: self.burn.unwrap_or(d.n_burn),
            n_keep: self.keep.unwrap_or(d.n_keep),
            thin: self.thin.unwrap_or(d.thin),
            prior: self.prior.unwrap_or(d.prior),
            sigma_prior: self.sigma_prior.unwrap_or(d.sigma_prior),
            backend_policy: self.backend.unwrap_or(d.backend_policy),
            seed: self.seed.unwrap_or(d.seed),
            ..d
        }
    }
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<Family>,
    pub format: Option<String>,
    pub destandardize: Option<bool>,
    pub h: Option<f64>,
    #[serde(default, deserialize_with = "de_with_parser::<_, PriorVariant, PriorParser>")]
    pub prior: Option<PriorVariant>,
    #[serde(default, deserialize_with = "de_with_parser::<_, SigmaPrior, SigmaParser>")]
    pub sigma_prior: Option<SigmaPrior>,
    pub burn: Option<usize>,
    pub keep: Option<usize>,
    pub thin: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default, deserialize_with = "de_with_parser::<_, BackendPolicy, BackendParser>")]
    pub backend: Option<BackendPolicy>,
}

impl FileConfig {
    pub fn chain(&self) -> ChainSettings {
        ChainSettings {
            h: self.h,
            prior: self.prior,
            sigma_prior: self.sigma_prior,
            burn: self.burn,
            keep: self.keep,
            thin: self.thin,
            seed: self.seed,
            backend: self.backend,
        }
    }
}

pub fn read_config(path: Option<&Path>) -> CliResult<(FileConfig, Option<PathBuf>)> {
    let Some(path) = path else {
        return Ok((FileConfig::default(), None));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
    let cfg = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
    Ok((cfg, Some(path.to_path_buf())))
}

pub fn parse_prior(s: &str) -> Result<PriorVariant, String> {
    match s {
        "horseshoe" => Ok(PriorVariant::Horseshoe),
        "horseshoe_plus" | "horseshoe-plus" => Ok(PriorVariant::HorseshoePlus),
        _ => Err(format!("unknown prior {s:?} (expected horseshoe or horseshoe_plus)")),
    }
}

pub fn parse_sigma_prior(s: &str) -> Result<SigmaPrior, String> {
    match s {
        "jeffreys" => Ok(SigmaPrior::Jeffreys),
        "half-cauchy" | "half_cauchy" => Ok(SigmaPrior::HalfCauchy),
        _ => Err(format!("unknown sigma prior {s:?} (expected jeffreys or half-cauchy)")),
    }
}

pub fn parse_backend(s: &str) -> Result<BackendPolicy, String> {
    match s {
        "auto" => Ok(BackendPolicy::Auto),
        "rue" => Ok(BackendPolicy::ForceRue),
        "fast" => Ok(BackendPolicy::ForceFast),
        _ => Err(format!("unknown backend {s:?} (expected auto, rue or fast)")),
    }
}

pub fn parse_format(s: &str) -> Result<DrawsFormat, String> {
    match s {
        "csv" => Ok(DrawsFormat::Csv),
        "binary" | "bin" => Ok(DrawsFormat::Binary),
        _ => Err(format!("unknown draws format {s:?} (expected csv or binary)")),
    }
}

/// Config-file strings go through the same parsers as the flags.
trait ValueParser<T> {
    fn parse(s: &str) -> Result<T, String>;
}

struct PriorParser;
struct SigmaParser;
struct BackendParser;

impl ValueParser<PriorVariant> for PriorParser {
    fn parse(s: &str) -> Result<PriorVariant, String> {
        parse_prior(s)
    }
}

impl ValueParser<SigmaPrior> for SigmaParser {
    fn parse(s: &str) -> Result<SigmaPrior, String> {
        parse_sigma_prior(s)
    }
}

impl ValueParser<BackendPolicy> for BackendParser {
    fn parse(s: &str) -> Result<BackendPolicy, String> {
        parse_backend(s)
    }
}

fn de_with_parser<'de, D, T, P>(d: D) -> Result<Option<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    P: ValueParser<T>,
{
    Option::<String>::deserialize(d)?
        .map(|s| P::parse(&s).map_err(serde::de::Error::custom))
        .transpose()
}

/// Fully resolved `run` request.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub input_path: PathBuf,
    pub family: Family,
    pub h: Option<f64>,
    pub config: SamplerConfig,
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub format: DrawsFormat,
    pub destandardize: bool,
}

impl RunManifest {
    pub fn validate(&self) -> CliResult<()> {
        match (self.family, self.h) {
            (Family::Negbin, None) => {
                return Err(CliError::usage("--h is required for the negbin family"))
            }
            (Family::Negbin, Some(h)) if !(h.is_finite() && h > 0.0) => {
                return Err(CliError::usage(format!("--h must be positive, got {h}")))
            }
            (Family::Linear | Family::Logistic, Some(_)) => {
                return Err(CliError::usage("--h applies only to the negbin family"))
            }
            _ => {}
        }
        if self.destandardize && self.family != Family::Linear {
            return Err(CliError::usage("--destandardize applies only to the linear family"));
        }
        if self.family != Family::Linear && self.config.sigma_prior != SigmaPrior::Jeffreys {
            return Err(CliError::usage("--sigma-prior applies only to the linear family"));
        }
        self.config.validate()?;
        Ok(())
    }
}
