//! Random generator tuples against a fixed `σ^n` or a Plancherel-sampled `ρ`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Method, RhoSelector};
use super::{confidence_halfwidth, derive_seed, trial_rng};
use crate::error::{Error, Result};
use crate::group::{
    build_base_group, subgroup_closure, uniform_product_element, BaseGroup, Closure,
    DEFAULT_CLOSURE_CAP,
};
use crate::lab::{bound_report, default_alpha, is_admissible, kappa, xh_value, BoundReport};
use crate::norm::{
    average_norm_dense, average_norm_power, AveragedOperator, NormEstimate, PowerOptions,
    DENSE_DIM_CAP, MATRIX_FREE_DIM_CAP,
};
use crate::product::pattern_partition;
use crate::repr::{
    irrep_catalog, pattern_classes_fix_vector, plancherel_sample, IrrepCatalog, PlancherelIndex,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub derived_seed: u64,
    pub d_min: usize,
    pub ell: usize,
    /// Closure order, or `>cap` when enumeration stopped at the cap.
    pub closure_size_or_cap: String,
    pub certificate: bool,
    pub xh: Option<f64>,
    pub norm_value: Option<f64>,
    pub norm_is_one: bool,
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Halfwidths {
    pub norm_one: f64,
    pub d_ge_kappa: f64,
    pub certified: f64,
    pub xh_zero: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub group: String,
    pub n: usize,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    pub rho: RhoSelector,
    pub method: Method,
    pub kappa: Option<usize>,
    pub fraction_norm_one: f64,
    /// Fixed `ρ = σ^n`: `d_min ≥ κ_σ`. Plancherel `ρ`: every pattern class
    /// factor has a diagonal fixed vector.
    pub fraction_d_ge_kappa: f64,
    /// Pattern certificate or exact `X_H > 0`.
    pub fraction_certified: f64,
    /// Over the trials whose closure completed.
    pub fraction_xh_zero: Option<f64>,
    pub xh_trials: usize,
    pub numeric_norm_trials: usize,
    pub paper_bound_values: BoundReport,
    pub confidence_halfwidth: Halfwidths,
    pub violations: Vec<String>,
}

struct Context<'a> {
    k: &'a BaseGroup,
    cat: &'a IrrepCatalog,
    n: usize,
    t: usize,
    seed: u64,
    rho: RhoSelector,
    kappa: Option<usize>,
    method: Method,
    timing: bool,
}

struct Trial {
    record: TrialRecord,
    pattern_certificate: bool,
    violations: Vec<String>,
}

fn run_trial(ctx: &Context<'_>, i: usize) -> Result<Trial> {
    let start = Instant::now();
    let mut rng = trial_rng(ctx.seed, i as u64);
    let gens: Vec<_> = (0..ctx.t)
        .map(|_| uniform_product_element(ctx.k, ctx.n, &mut rng))
        .collect();
    let rho = match ctx.rho {
        RhoSelector::Fixed(idx) => PlancherelIndex::power(idx, ctx.n),
        RhoSelector::Plancherel => plancherel_sample(ctx.cat, ctx.n, &mut rng),
    };
    let partition = pattern_partition(&gens)?;
    let pattern_certificate = match ctx.kappa {
        Some(kappa) => partition.d_min() >= kappa,
        None => pattern_classes_fix_vector(ctx.cat, &rho, &partition)?,
    };

    let (closure_size_or_cap, xh) = match subgroup_closure(ctx.k, &gens, DEFAULT_CLOSURE_CAP)? {
        Closure::Complete(h) => (h.order().to_string(), Some(xh_value(ctx.cat, &rho, &h)?)),
        Closure::CapExceeded { cap } => (format!(">{cap}"), None),
    };

    let dim = ctx.cat.dimension_u128(&rho).unwrap_or(u128::MAX);
    let op = || AveragedOperator::new(ctx.cat, rho.clone(), gens.clone(), false);
    let numeric: Option<NormEstimate> = match ctx.method {
        Method::Cert => None,
        Method::Power | Method::Auto if dim <= MATRIX_FREE_DIM_CAP => {
            let opts = PowerOptions {
                seed: derive_seed(ctx.seed, i as u64),
                ..PowerOptions::default()
            };
            Some(average_norm_power(&op()?, &opts)?)
        }
        Method::Dense if dim <= DENSE_DIM_CAP => Some(average_norm_dense(&op()?)?),
        _ => None,
    };

    let xh_positive = xh.is_some_and(|x| x > 0.0);
    let mut violations = Vec::new();
    if let Some(x) = xh {
        if !(0.0..=1.0).contains(&x) {
            violations.push(format!("trial {i}: X_H = {x} outside [0, 1]"));
        }
    }
    if let Some(est) = numeric {
        let reasons = [
            (pattern_certificate, "pattern certificate"),
            (xh_positive, "X_H > 0"),
            (ctx.t == 1, "t = 1"),
        ];
        for (holds, what) in reasons {
            if holds && !est.is_one {
                violations.push(format!("trial {i}: {what} but numeric norm {}", est.value));
            }
        }
    }
    let norm_is_one = match numeric {
        Some(est) => est.is_one,
        None => pattern_certificate || xh_positive || ctx.t == 1,
    };
    Ok(Trial {
        record: TrialRecord {
            trial_index: i,
            derived_seed: derive_seed(ctx.seed, i as u64),
            d_min: partition.d_min(),
            ell: partition.ell(),
            closure_size_or_cap,
            certificate: pattern_certificate,
            xh,
            norm_value: numeric.map(|e| e.value),
            norm_is_one,
            runtime_ms: ctx.timing.then(|| start.elapsed().as_millis() as u64),
        },
        pattern_certificate,
        violations,
    })
}

fn fraction(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

pub fn run_resistance_trials(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Summary)> {
    let n = config.need(config.n, "n")?;
    let t = config.need(config.t, "t")?;
    let trials = config.need(config.trials, "trials")?;
    let seed = config
        .seed
        .ok_or_else(|| Error::Config("missing required field `seed`".into()))?;
    let rho = config
        .rho
        .ok_or_else(|| Error::Config("missing required field `rho`".into()))?;
    let k = build_base_group(&config.group)?;
    let cat = irrep_catalog(&k)?;
    let kappa = match rho {
        RhoSelector::Fixed(idx) => {
            let adm = is_admissible(&k, &cat, idx)?;
            if !adm.admissible {
                return Err(Error::NotAdmissible(adm.reasons.join("; ")));
            }
            Some(kappa(&k, &cat, idx)?.kappa)
        }
        RhoSelector::Plancherel => None,
    };
    let ctx = Context {
        k: &k,
        cat: &cat,
        n,
        t,
        seed,
        rho,
        kappa,
        method: config.method,
        timing: config.timing,
    };
    let mut results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(&ctx, i))
        .collect::<Result<_>>()?;
    results.sort_by_key(|r| r.record.trial_index);

    let count = |f: &dyn Fn(&Trial) -> bool| results.iter().filter(|r| f(r)).count();
    let norm_one = fraction(count(&|r| r.record.norm_is_one), trials);
    let d_ge_kappa = fraction(count(&|r| r.pattern_certificate), trials);
    let certified = fraction(
        count(&|r| r.pattern_certificate || r.record.xh.is_some_and(|x| x > 0.0)),
        trials,
    );
    let xh_trials = count(&|r| r.record.xh.is_some());
    let xh_zero =
        (xh_trials > 0).then(|| fraction(count(&|r| r.record.xh == Some(0.0)), xh_trials));
    let numeric_norm_trials = count(&|r| r.record.norm_value.is_some());

    let mut violations: Vec<String> = results
        .iter()
        .flat_map(|r| r.violations.iter().cloned())
        .collect();
    if norm_one < d_ge_kappa {
        violations.push(format!(
            "fraction_norm_one {norm_one} below fraction_d_ge_kappa {d_ge_kappa}"
        ));
    }
    let alpha = config
        .alpha
        .unwrap_or_else(|| default_alpha(k.order() as u64));
    let paper_bound_values = bound_report(
        n as u64,
        t as u32,
        k.order() as u64,
        config.ell as u64,
        kappa.map(|k| k as u64),
        alpha,
    )?;
    let summary = Summary {
        group: k.name().to_string(),
        n,
        t,
        trials,
        seed,
        rho,
        method: config.method,
        kappa,
        fraction_norm_one: norm_one,
        fraction_d_ge_kappa: d_ge_kappa,
        fraction_certified: certified,
        fraction_xh_zero: xh_zero,
        xh_trials,
        numeric_norm_trials,
        paper_bound_values,
        confidence_halfwidth: Halfwidths {
            norm_one: confidence_halfwidth(norm_one, trials),
            d_ge_kappa: confidence_halfwidth(d_ge_kappa, trials),
            certified: confidence_halfwidth(certified, trials),
            xh_zero: xh_zero.map(|p| confidence_halfwidth(p, xh_trials)),
        },
        violations,
    };
    Ok((results.into_iter().map(|r| r.record).collect(), summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{parse_config, RawConfig};

    fn config(pairs: &[(&str, &str)]) -> ExperimentConfig {
        let mut raw = RawConfig::default();
        raw.set("experiment", "resist").unwrap();
        raw.set("group", "S3").unwrap();
        for (k, v) in pairs {
            raw.set(k, v).unwrap();
        }
        parse_config(None, &raw).unwrap()
    }

    #[test]
    fn dense_certificates_are_sound() {
        let c = config(&[
            ("n", "4"),
            ("t", "2"),
            ("trials", "60"),
            ("rho", "fixed:2"),
            ("seed", "5"),
            ("method", "dense"),
        ]);
        let (records, summary) = run_resistance_trials(&c).unwrap();
        assert_eq!(records.len(), 60);
        assert!(summary.violations.is_empty(), "{:?}", summary.violations);
        for r in &records {
            assert!(r.norm_value.is_some());
            if r.certificate {
                assert!(r.norm_value.unwrap() > 1.0 - 1e-6);
            }
        }
        assert!(summary.fraction_norm_one >= summary.fraction_d_ge_kappa);
    }

    #[test]
    fn single_generator_always_norm_one() {
        for method in ["cert", "power", "dense"] {
            let c = config(&[
                ("n", "3"),
                ("t", "1"),
                ("trials", "30"),
                ("rho", "plancherel"),
                ("seed", "9"),
                ("method", method),
            ]);
            let (records, summary) = run_resistance_trials(&c).unwrap();
            assert!(records.iter().all(|r| r.norm_is_one), "{method}");
            assert_eq!(summary.fraction_norm_one, 1.0);
            assert!(summary.violations.is_empty());
        }
    }

    #[test]
    fn records_are_sorted_and_reproducible() {
        let c = config(&[
            ("n", "6"),
            ("t", "2"),
            ("trials", "40"),
            ("rho", "fixed:2"),
            ("seed", "11"),
        ]);
        let (a, _) = run_resistance_trials(&c).unwrap();
        let (b, _) = run_resistance_trials(&c).unwrap();
        assert_eq!(a, b);
        assert!(a
            .iter()
            .enumerate()
            .all(|(i, r)| r.trial_index == i && r.runtime_ms.is_none()));
    }

    #[test]
    fn inadmissible_fixed_rho() {
        let c = config(&[
            ("n", "3"),
            ("t", "1"),
            ("trials", "3"),
            ("rho", "fixed:1"),
            ("seed", "1"),
        ]);
        assert!(matches!(
            run_resistance_trials(&c),
            Err(Error::NotAdmissible(_))
        ));
    }
}
