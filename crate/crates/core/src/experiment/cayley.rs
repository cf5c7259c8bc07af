//! Second eigenvalues of random Cayley graphs of `K^n`, swept over `t`.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::trial_rng;
use crate::error::{Error, Result};
use crate::group::{build_base_group, uniform_product_element};
use crate::norm::{cayley_second_eigenvalue, CayleyMethod, CAYLEY_DENSE_VERTEX_CAP, DENSE_DIM_CAP};
use crate::repr::{irrep_catalog, IrrepCatalog};

/// Largest allowed disagreement between the two eigenvalue routes.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CayleyRow {
    pub t: usize,
    pub trials: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Trials with eigenvalue within 1e-9 of 1 (disconnected graph).
    pub disconnected: usize,
    pub max_cross_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CayleyReport {
    pub group: String,
    pub n: usize,
    pub seed: u64,
    pub method: CayleyMethod,
    pub cross_checked: bool,
    pub rows: Vec<CayleyRow>,
    pub violations: Vec<String>,
}

fn feasible(cat: &IrrepCatalog, n: usize) -> (bool, bool) {
    let vertices = (cat.group().order() as u128).checked_pow(n as u32);
    let dense = vertices.is_some_and(|v| v <= CAYLEY_DENSE_VERTEX_CAP);
    let tuples = (cat.len() as u128).checked_pow(n as u32);
    let max_dim = cat.dims().into_iter().max().unwrap_or(1) as u128;
    let per_irrep = tuples.is_some_and(|c| c <= 1_000_000)
        && max_dim
            .checked_pow(n as u32)
            .is_some_and(|d| d <= DENSE_DIM_CAP);
    (dense, per_irrep)
}

/// For each `t` in `t_from..=t`, `trials` seeded draws of `t` uniform
/// elements. Trial `i` at sweep value `t` uses stream `(seed, t·trials + i)`.
pub fn run_cayley_scan(config: &ExperimentConfig) -> Result<CayleyReport> {
    let n = config.need(config.n, "n")?;
    let t_max = config.need(config.t, "t")?;
    let t_from = config.t_from.unwrap_or(t_max);
    let trials = config.need(config.trials, "trials")?;
    let seed = config
        .seed
        .ok_or_else(|| Error::Config("missing required field `seed`".into()))?;
    let k = build_base_group(&config.group)?;
    let cat = irrep_catalog(&k)?;
    let (dense, per_irrep) = feasible(&cat, n);
    let method = match (dense, per_irrep) {
        (true, _) => CayleyMethod::DenseAdjacency,
        (false, true) => CayleyMethod::PerIrrep,
        (false, false) => {
            return Err(Error::DimensionOverCap {
                dim: (k.order() as u128).saturating_pow(n as u32),
                cap: CAYLEY_DENSE_VERTEX_CAP,
            })
        }
    };
    let cross_checked = dense && per_irrep;

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for t in t_from..=t_max {
        let values: Vec<(f64, Option<f64>)> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, (t * trials + i) as u64);
                let gens: Vec<_> = (0..t)
                    .map(|_| uniform_product_element(&k, n, &mut rng))
                    .collect();
                let value = cayley_second_eigenvalue(&cat, n, &gens, method)?;
                let deviation = if cross_checked {
                    let other = cayley_second_eigenvalue(&cat, n, &gens, CayleyMethod::PerIrrep)?;
                    Some((value - other).abs())
                } else {
                    None
                };
                Ok((value, deviation))
            })
            .collect::<Result<_>>()?;
        let eig: Vec<f64> = values.iter().map(|v| v.0).collect();
        let max_cross_deviation = values
            .iter()
            .filter_map(|v| v.1)
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.max(d)))
            });
        if let Some(d) = max_cross_deviation {
            if d >= CROSS_CHECK_TOLERANCE {
                violations.push(format!(
                    "t = {t}: dense and per-irrep eigenvalues differ by {d:e}"
                ));
            }
        }
        rows.push(CayleyRow {
            t,
            trials,
            mean: eig.iter().sum::<f64>() / trials as f64,
            min: eig.iter().copied().fold(f64::INFINITY, f64::min),
            max: eig.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            disconnected: eig.iter().filter(|&&v| v > 1.0 - 1e-9).count(),
            max_cross_deviation,
        });
    }
    Ok(CayleyReport {
        group: k.name().to_string(),
        n,
        seed,
        method,
        cross_checked,
        rows,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{parse_config, RawConfig};

    fn config(pairs: &[(&str, &str)]) -> ExperimentConfig {
        let mut raw = RawConfig::default();
        raw.set("experiment", "cayley").unwrap();
        for (k, v) in pairs {
            raw.set(k, v).unwrap();
        }
        parse_config(None, &raw).unwrap()
    }

    #[test]
    fn z2_fourth_sweep() {
        let c = config(&[
            ("group", "Z2"),
            ("n", "4"),
            ("t_from", "1"),
            ("t", "6"),
            ("trials", "20"),
            ("seed", "4"),
        ]);
        let r = run_cayley_scan(&c).unwrap();
        assert!(r.cross_checked);
        assert_eq!(r.rows.len(), 6);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        // fewer than 4 elements never generate Z2^4
        for row in &r.rows[..3] {
            assert_eq!(row.disconnected, row.trials);
        }
        assert!(r.rows.iter().all(|row| row.min >= 0.0 && row.max <= 1.0));
    }

    #[test]
    fn over_cap_is_an_error() {
        let c = config(&[
            ("group", "S4"),
            ("n", "6"),
            ("t", "2"),
            ("trials", "1"),
            ("seed", "1"),
        ]);
        assert!(run_cayley_scan(&c).is_err());
    }
}
