//! Monte Carlo tails of the smallest pattern class, next to the closed-form
//! bounds and the exact distribution.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::{confidence_halfwidth, derive_seed, trial_rng};
use crate::error::{Error, Result};
use crate::group::{build_base_group, uniform_product_element};
use crate::lab::{bound_lemma2, ratio_to_f64, BoundValue};
use crate::product::pattern_partition;

/// Work limit `n² · log₂ m` for the exact oracle.
pub const EXACT_TAIL_WORK_CAP: f64 = 2.0e7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailRow {
    pub trial_index: usize,
    pub derived_seed: u64,
    pub d_min: usize,
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub group: String,
    pub n: usize,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    pub ell: usize,
    /// `n / (2|K|^t)`.
    pub threshold: f64,
    pub empirical_small_d: f64,
    pub exact_small_d: Option<f64>,
    pub lemma2_part1: BoundValue,
    pub empirical_d_below_ell: f64,
    pub exact_d_below_ell: Option<f64>,
    pub lemma2_part2: BoundValue,
    /// `√(q(1−q)/trials)` at `q = min(1, bound)`.
    pub sigma_small_d: f64,
    pub sigma_d_below_ell: f64,
    pub confidence_halfwidth_small_d: f64,
    pub confidence_halfwidth_d_below_ell: f64,
    /// Empirical frequency within bound + 3σ.
    pub part1_holds: bool,
    pub part2_holds: bool,
    /// The exact tail probability is at most the bound.
    pub part1_exact_holds: Option<bool>,
    pub part2_exact_holds: Option<bool>,
    pub d_range_ok: bool,
    pub violations: Vec<String>,
}

/// Binomial convolution `(f ⊛ g)(s) = Σ_a C(s, a) f(a) g(s − a)` on the
/// scaled sequences `f(s)·n!/s!`, which keeps every entry an integer.
fn convolve(f: &[BigUint], g: &[BigUint], n_factorial: &BigUint) -> Vec<BigUint> {
    (0..f.len())
        .map(|s| {
            let sum = (0..=s).fold(BigUint::zero(), |acc, a| acc + &f[a] * &g[s - a]);
            sum / n_factorial
        })
        .collect()
}

/// Exact `Pr[d < ℓ]` for a uniform map `[n] → [m]`, where `d` is the
/// smallest nonempty fibre. `None` past the work cap.
pub fn exact_d_below(n: usize, m: u64, ell: usize) -> Option<f64> {
    if m == 0 || n == 0 {
        return None;
    }
    if (n * n) as f64 * (m as f64).log2().max(1.0) > EXACT_TAIL_WORK_CAP {
        return None;
    }
    let mut factorials = vec![BigUint::one(); n + 1];
    for s in 1..=n {
        factorials[s] = &factorials[s - 1] * s;
    }
    let nf = factorials[n].clone();
    // one fibre: sizes 0 or ≥ ℓ
    let cell: Vec<BigUint> = (0..=n)
        .map(|s| {
            if s == 0 || s >= ell {
                &nf / &factorials[s]
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let mut unit = vec![BigUint::zero(); n + 1];
    unit[0] = nf.clone();
    let (mut acc, mut base, mut e) = (unit, cell, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = convolve(&acc, &base, &nf);
        }
        e >>= 1;
        if e > 0 {
            base = convolve(&base, &base, &nf);
        }
    }
    // acc[n] = (#maps with every fibre allowed) · n!/n!
    let total = BigUint::from(m).pow(n as u32);
    let bad = &total - &acc[n];
    Some(ratio_to_f64(&bad, &total))
}

fn sigma(q: f64, trials: usize) -> f64 {
    let q = q.clamp(0.0, 1.0);
    (q * (1.0 - q) / trials as f64).sqrt()
}

pub fn run_tail_audit(config: &ExperimentConfig) -> Result<(Vec<TailRow>, TailReport)> {
    let n = config.need(config.n, "n")?;
    let t = config.need(config.t, "t")?;
    let trials = config.need(config.trials, "trials")?;
    let seed = config
        .seed
        .ok_or_else(|| Error::Config("missing required field `seed`".into()))?;
    let ell = config.ell;
    let k = build_base_group(&config.group)?;

    let rows: Vec<TailRow> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let gens: Vec<_> = (0..t)
                .map(|_| uniform_product_element(&k, n, &mut rng))
                .collect();
            let p = pattern_partition(&gens)?;
            Ok(TailRow {
                trial_index: i,
                derived_seed: derive_seed(seed, i as u64),
                d_min: p.d_min(),
                ell: p.ell(),
            })
        })
        .collect::<Result<_>>()?;

    let kt = (k.order() as f64).powi(t as i32);
    let threshold = n as f64 / (2.0 * kt);
    let small = rows.iter().filter(|r| r.d_min as f64 <= threshold).count();
    let below = rows.iter().filter(|r| r.d_min < ell).count();
    let empirical_small_d = small as f64 / trials as f64;
    let empirical_d_below_ell = below as f64 / trials as f64;
    let (part1, part2) = bound_lemma2(n as u64, t as u32, k.order() as u64, ell as u64);
    let m = kt as u64;
    let exact_small_d = exact_d_below(n, m, threshold.floor() as usize + 1);
    let exact_d_below_ell = exact_d_below(n, m, ell);
    let sigma_small_d = sigma(part1.value, trials);
    let sigma_d_below_ell = sigma(part2.value, trials);
    let part1_holds = empirical_small_d <= part1.value.min(1.0) + 3.0 * sigma_small_d;
    let part2_holds = empirical_d_below_ell <= part2.value + 3.0 * sigma_d_below_ell;
    let d_range_ok = rows.iter().all(|r| r.d_min >= 1 && r.d_min <= n);

    let mut violations = Vec::new();
    if !d_range_ok {
        violations.push("d outside 1..=n".to_string());
    }
    if !part1_holds {
        violations.push(format!(
            "Pr[d ≤ {threshold}] = {empirical_small_d} exceeds {} + 3σ",
            part1.value
        ));
    }
    Ok((
        rows,
        TailReport {
            group: k.name().to_string(),
            n,
            t,
            trials,
            seed,
            ell,
            threshold,
            empirical_small_d,
            exact_small_d,
            lemma2_part1: part1,
            empirical_d_below_ell,
            exact_d_below_ell,
            lemma2_part2: part2,
            sigma_small_d,
            sigma_d_below_ell,
            confidence_halfwidth_small_d: confidence_halfwidth(empirical_small_d, trials),
            confidence_halfwidth_d_below_ell: confidence_halfwidth(empirical_d_below_ell, trials),
            part1_holds,
            part2_holds,
            part1_exact_holds: exact_small_d.map(|p| p <= part1.value),
            part2_exact_holds: exact_d_below_ell.map(|p| p <= part2.value),
            d_range_ok,
            violations,
        },
    ))
}
