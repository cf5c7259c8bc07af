//! Seeded experiment drivers and their CSV/JSON output.
//!
//! Trial `i` of a run with seed `s` draws everything from a ChaCha8 stream
//! seeded by [`derive_seed`]`(s, i)`, so trials are reproducible one at a
//! time and in any order. Trials run in parallel and are sorted by index
//! before emission.

pub mod cayley;
pub mod config;
pub mod emit;
pub mod moments;
pub mod resist;
pub mod tails;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::group::build_base_group;
use crate::lab::{is_admissible, kappa, Admissibility, KappaResult};
use crate::repr::{irrep_catalog, ManifestEntry};

pub use config::{parse_config, ExperimentConfig, ExperimentKind, Method, RawConfig, RhoSelector};

/// Golden-ratio increment of the splitmix64 generator.
pub const SEED_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 applied to `seed + (trial + 1)·γ`.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(SEED_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, trial))
}

/// 95% normal-approximation halfwidth for a proportion `p` over `trials`.
pub fn confidence_halfwidth(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// A finished experiment: the JSON report, an optional CSV table, and any
/// invariant that failed along the way.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: serde_json::Value,
    pub csv: Option<Vec<u8>>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaRow {
    pub irrep: String,
    pub dim: usize,
    pub admissibility: Admissibility,
    pub kappa: Option<KappaResult>,
}

/// κ for the selected irrep, or for every irrep when none is selected.
pub fn kappa_report(config: &ExperimentConfig) -> Result<Vec<KappaRow>> {
    let k = build_base_group(&config.group)?;
    let cat = irrep_catalog(&k)?;
    let indices: Vec<usize> = match config.rho {
        Some(RhoSelector::Fixed(i)) => vec![i],
        _ => (0..cat.len()).collect(),
    };
    indices
        .into_iter()
        .map(|i| {
            let rep = cat.get(i)?;
            let admissibility = is_admissible(&k, &cat, i)?;
            let kappa = if admissibility.admissible {
                Some(kappa(&k, &cat, i)?)
            } else {
                None
            };
            Ok(KappaRow {
                irrep: rep.name().to_string(),
                dim: rep.dim(),
                admissibility,
                kappa,
            })
        })
        .collect()
}

pub fn catalog_manifest(config: &ExperimentConfig) -> Result<Vec<ManifestEntry>> {
    let k = build_base_group(&config.group)?;
    Ok(irrep_catalog(&k)?.manifest())
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let json_only = |report: serde_json::Value| Outcome {
        report,
        csv: None,
        violations: Vec::new(),
    };
    match config.experiment {
        ExperimentKind::Catalog => Ok(json_only(serde_json::to_value(catalog_manifest(config)?)?)),
        ExperimentKind::Kappa => Ok(json_only(serde_json::to_value(kappa_report(config)?)?)),
        ExperimentKind::Resist => {
            let (records, summary) = resist::run_resistance_trials(config)?;
            Ok(Outcome {
                report: serde_json::to_value(&summary)?,
                csv: Some(emit::csv_bytes(&records)?),
                violations: summary.violations,
            })
        }
        ExperimentKind::Moments => {
            let audit = moments::run_moment_audit(config)?;
            Ok(Outcome {
                report: serde_json::to_value(&audit)?,
                csv: Some(emit::csv_bytes(&audit.instances)?),
                violations: audit.violations,
            })
        }
        ExperimentKind::Tails => {
            let (rows, report) = tails::run_tail_audit(config)?;
            Ok(Outcome {
                report: serde_json::to_value(&report)?,
                csv: Some(emit::csv_bytes(&rows)?),
                violations: report.violations,
            })
        }
        ExperimentKind::Cayley => {
            let report = cayley::run_cayley_scan(config)?;
            Ok(Outcome {
                report: serde_json::to_value(&report)?,
                csv: Some(emit::csv_bytes(&report.rows)?),
                violations: report.violations,
            })
        }
    }
}
