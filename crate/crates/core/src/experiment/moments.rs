//! Exact Plancherel moments of `X_H` over seeded generator sets.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::{derive_seed, trial_rng};
use crate::error::{Error, Result};
use crate::group::{
    build_base_group, subgroup_closure, uniform_product_element, BaseGroup, Closure,
    ProductElement, DEFAULT_CLOSURE_CAP,
};
use crate::lab::{plancherel_exhaustive, MomentReport};
use crate::repr::{irrep_catalog, IrrepCatalog};

/// Agreement required between the enumerated and closed-form moments.
pub const MOMENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    /// Seeded trial index, or `anchor:<name>` for the fixed instances.
    pub instance: String,
    pub derived_seed: Option<u64>,
    pub t: usize,
    pub h_order: usize,
    pub mean_exact: f64,
    pub mean_formula: f64,
    pub variance_exact: f64,
    pub variance_formula: f64,
    pub chebyshev_bound: f64,
    pub prob_xh_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentAudit {
    pub group: String,
    pub n: usize,
    pub max_t: usize,
    pub trials: usize,
    pub seed: u64,
    /// Seeded instances whose closure completed, followed by the anchors.
    pub instances: Vec<MomentRow>,
    pub enumerable: usize,
    pub skipped_over_cap: usize,
    pub max_mean_deviation: f64,
    pub max_variance_deviation: f64,
    pub chebyshev_holds: bool,
    pub violations: Vec<String>,
}

fn row(
    cat: &IrrepCatalog,
    n: usize,
    gens: &[ProductElement],
    instance: String,
    seed: Option<u64>,
) -> Result<Option<MomentRow>> {
    let Closure::Complete(h) = subgroup_closure(cat.group(), gens, DEFAULT_CLOSURE_CAP)? else {
        return Ok(None);
    };
    let ex = plancherel_exhaustive(cat, n, &h)?;
    let MomentReport {
        mean_exact,
        variance_exact,
        mean_formula,
        variance_formula,
        chebyshev_bound,
    } = ex.moments;
    Ok(Some(MomentRow {
        instance,
        derived_seed: seed,
        t: gens.len(),
        h_order: h.order(),
        mean_exact,
        mean_formula,
        variance_exact,
        variance_formula,
        chebyshev_bound,
        prob_xh_zero: ex.prob_xh_zero,
    }))
}

/// Generators of the trivial subgroup and of the diagonal copy of `K`.
fn anchors(k: &BaseGroup, n: usize) -> Vec<(&'static str, Vec<ProductElement>)> {
    let mut gens: Vec<ProductElement> = (1..k.order())
        .map(|g| ProductElement::diagonal(g, n))
        .collect();
    if gens.is_empty() {
        gens.push(ProductElement::identity(n));
    }
    vec![
        ("trivial", vec![ProductElement::identity(n)]),
        ("diagonal", gens),
    ]
}

/// Each seeded trial draws `t ∈ 1..=max_t` and then `t` uniform generators.
pub fn run_moment_audit(config: &ExperimentConfig) -> Result<MomentAudit> {
    let n = config.need(config.n, "n")?;
    let max_t = config.need(config.t, "t")?;
    let trials = config.need(config.trials, "trials")?;
    let seed = config
        .seed
        .ok_or_else(|| Error::Config("missing required field `seed`".into()))?;
    let k = build_base_group(&config.group)?;
    let cat = irrep_catalog(&k)?;

    let seeded: Vec<Option<MomentRow>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let t = rng.gen_range(1..=max_t);
            let gens: Vec<_> = (0..t)
                .map(|_| uniform_product_element(&k, n, &mut rng))
                .collect();
            row(
                &cat,
                n,
                &gens,
                i.to_string(),
                Some(derive_seed(seed, i as u64)),
            )
        })
        .collect::<Result<_>>()?;
    let skipped_over_cap = seeded.iter().filter(|r| r.is_none()).count();
    let mut instances: Vec<MomentRow> = seeded.into_iter().flatten().collect();
    let enumerable = instances.len();
    for (name, gens) in anchors(&k, n) {
        if let Some(r) = row(&cat, n, &gens, format!("anchor:{name}"), None)? {
            instances.push(r);
        }
    }

    let mut violations = Vec::new();
    if enumerable == 0 {
        violations.push(format!("all {trials} seeded closures exceeded the cap"));
    }
    let mut max_mean_deviation = 0.0f64;
    let mut max_variance_deviation = 0.0f64;
    let mut chebyshev_holds = true;
    for r in &instances {
        let dm = (r.mean_exact - r.mean_formula).abs();
        let dv = (r.variance_exact - r.variance_formula).abs();
        max_mean_deviation = max_mean_deviation.max(dm);
        max_variance_deviation = max_variance_deviation.max(dv);
        if dm >= MOMENT_TOLERANCE || dv >= MOMENT_TOLERANCE {
            violations.push(format!(
                "instance {}: mean deviation {dm:e}, variance deviation {dv:e}",
                r.instance
            ));
        }
        if r.prob_xh_zero > r.chebyshev_bound {
            chebyshev_holds = false;
            violations.push(format!(
                "instance {}: Pr[X_H = 0] = {} exceeds {}",
                r.instance, r.prob_xh_zero, r.chebyshev_bound
            ));
        }
    }
    Ok(MomentAudit {
        group: k.name().to_string(),
        n,
        max_t,
        trials,
        seed,
        instances,
        enumerable,
        skipped_over_cap,
        max_mean_deviation,
        max_variance_deviation,
        chebyshev_holds,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{parse_config, RawConfig};

    #[test]
    fn s3_squared_audit() {
        let mut raw = RawConfig::default();
        for (k, v) in [
            ("experiment", "moments"),
            ("group", "S3"),
            ("n", "2"),
            ("t", "2"),
            ("trials", "50"),
            ("seed", "3"),
        ] {
            raw.set(k, v).unwrap();
        }
        let audit = run_moment_audit(&parse_config(None, &raw).unwrap()).unwrap();
        assert!(audit.violations.is_empty(), "{:?}", audit.violations);
        assert_eq!(audit.enumerable, 50);
        assert!(audit.max_mean_deviation < MOMENT_TOLERANCE);
        let diag = audit
            .instances
            .iter()
            .find(|r| r.instance == "anchor:diagonal")
            .unwrap();
        assert_eq!(diag.h_order, 6);
        assert!((diag.variance_exact - 1.0 / 18.0).abs() < 1e-12);
        let trivial = audit
            .instances
            .iter()
            .find(|r| r.instance == "anchor:trivial")
            .unwrap();
        assert!((trivial.mean_exact - 1.0).abs() < 1e-12);
        assert_eq!(trivial.variance_formula, 0.0);
    }
}
