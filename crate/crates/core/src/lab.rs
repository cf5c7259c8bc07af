//! κ for faithful irreps, the restriction statistic `X_H` with its exact
//! Plancherel moments, and closed-form evaluators for the tail and success
//! probability bounds.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{BaseGroup, SubgroupEnum};
use crate::repr::{restricted_trivial_multiplicity, IrrepCatalog, PlancherelIndex};

/// Largest number of irrep tuples enumerated for exact moments.
pub const MOMENT_ENUMERATION_CAP: u128 = 100_000;
const POSITIVITY_THRESHOLD: f64 = 1e-9;
const RESIDUE_LIMIT: f64 = 1e-6;
/// Float class sums are cross-checked against the exact route while `d^k`
/// stays well inside the 53-bit mantissa.
const FLOAT_CHECK_LIMIT: f64 = (1u64 << 50) as f64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub reasons: Vec<String>,
}

/// Nonabelian `K` with trivial center and a faithful irrep of dimension ≥ 2.
pub fn is_admissible(k: &BaseGroup, cat: &IrrepCatalog, irrep: usize) -> Result<Admissibility> {
    let rho = cat.get(irrep)?;
    let mut reasons = Vec::new();
    if k.is_abelian() {
        reasons.push(format!("{} is abelian", k.name()));
    }
    if !k.has_trivial_center() {
        reasons.push(format!(
            "{} has a center of order {}",
            k.name(),
            k.center().len()
        ));
    }
    if rho.dim() < 2 {
        reasons.push(format!("{} has dimension {} < 2", rho.name(), rho.dim()));
    }
    if !rho.is_faithful() {
        reasons.push(format!("{} is not faithful", rho.name()));
    }
    Ok(Admissibility {
        admissible: reasons.is_empty(),
        reasons,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaResult {
    pub kappa: usize,
    /// Smallest `k₀` with `max_{h≠1} |χ(h)/d|^{k₀} < 1/(|K|−1)`.
    pub analytic_cutoff: usize,
    /// `⟨χ^k, 1⟩` for `k = 1..=max(k₀, 2)`.
    pub checked_values: Vec<f64>,
}

/// Least `κ ≥ 2` such that `ρ^{⊗k}` contains the trivial representation for
/// every `k ≥ κ`.
///
/// Past the cutoff `k₀` every nonidentity term of `Σ_h (χ(h)/d)^k` is below
/// `1/(|K|−1)` in absolute value, so the sum stays positive; below it the
/// multiplicities are evaluated directly.
pub fn kappa(k: &BaseGroup, cat: &IrrepCatalog, irrep: usize) -> Result<KappaResult> {
    let adm = is_admissible(k, cat, irrep)?;
    if !adm.admissible {
        return Err(Error::NotAdmissible(adm.reasons.join("; ")));
    }
    let rho = cat.get(irrep)?;
    let d = rho.dim() as f64;
    let chi = rho.character().values();
    let max_ratio = (1..k.order())
        .map(|h| chi[h].norm() / d)
        .fold(0.0, f64::max);
    if max_ratio >= 1.0 - 1e-12 {
        return Err(Error::NotAdmissible(format!(
            "{} has |χ(h)| = d at some h ≠ 1",
            rho.name()
        )));
    }
    let threshold = 1.0 / (k.order() - 1) as f64;
    let mut cutoff = 1;
    while max_ratio.powi(cutoff as i32) >= threshold {
        cutoff += 1;
    }
    let top = cutoff.max(2);

    let mut checked_values = Vec::with_capacity(top);
    let mut positive = Vec::with_capacity(top);
    for power in 1..=top {
        let exact = cat.diagonal_trivial_multiplicity(&[(irrep, power as u32)])?;
        let value = exact.to_f64().unwrap_or(f64::INFINITY);
        if d.powi(power as i32) <= FLOAT_CHECK_LIMIT {
            let float = trivial_power_sum(k, chi, power as u32);
            let residue = (float - Complex64::new(value, 0.0)).norm();
            if residue > RESIDUE_LIMIT {
                return Err(Error::ResidueTooLarge {
                    what: format!("<χ^{power}, 1> for {}", rho.name()),
                    residue,
                });
            }
        }
        positive.push(value > POSITIVITY_THRESHOLD);
        checked_values.push(value);
    }
    if !positive[top - 1] {
        return Err(Error::ResidueTooLarge {
            what: format!(
                "<χ^{top}, 1> vanished past the analytic cutoff for {}",
                rho.name()
            ),
            residue: 1.0,
        });
    }
    let mut kappa = top;
    while kappa > 2 && positive[kappa - 2] {
        kappa -= 1;
    }
    Ok(KappaResult {
        kappa,
        analytic_cutoff: cutoff,
        checked_values,
    })
}

/// `(1/|K|) Σ_classes |C|·χ_C^k`.
fn trivial_power_sum(k: &BaseGroup, chi: &[Complex64], power: u32) -> Complex64 {
    k.classes()
        .iter()
        .map(|c| chi[c[0]].powu(power) * c.len() as f64)
        .sum::<Complex64>()
        / k.order() as f64
}

/// `num / den` without overflowing either side.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    let shift = den.bits().saturating_sub(60);
    let (num, den) = (num >> shift, den >> shift);
    let den = den.to_f64().unwrap_or(f64::INFINITY);
    num.to_f64().unwrap_or(f64::INFINITY) / den
}

/// `⟨Res_H χ_ρ, 1⟩_H / d_ρ`.
pub fn xh_value(cat: &IrrepCatalog, rho: &PlancherelIndex, h: &SubgroupEnum) -> Result<f64> {
    let mult = restricted_trivial_multiplicity(cat, rho, h)?;
    Ok(ratio_to_f64(&mult, &cat.dimension(rho)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_exact: f64,
    pub variance_exact: f64,
    pub mean_formula: f64,
    pub variance_formula: f64,
    pub chebyshev_bound: f64,
}

/// Everything the exhaustive Plancherel enumeration yields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlancherelExhaustive {
    pub moments: MomentReport,
    /// `Pr_ρ[X_H = 0]`, from exact multiplicities.
    pub prob_xh_zero: f64,
    pub tuples: usize,
}

/// Exact first and second Plancherel moments of `X_H`, both by enumerating
/// every irrep of `K^n` and from the conjugacy-class formulas.
pub fn plancherel_moments(cat: &IrrepCatalog, n: usize, h: &SubgroupEnum) -> Result<MomentReport> {
    Ok(plancherel_exhaustive(cat, n, h)?.moments)
}

pub fn plancherel_exhaustive(
    cat: &IrrepCatalog,
    n: usize,
    h: &SubgroupEnum,
) -> Result<PlancherelExhaustive> {
    if h.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: h.n(),
        });
    }
    let count = (cat.len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if count > MOMENT_ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            count,
            cap: MOMENT_ENUMERATION_CAP,
        });
    }
    let k = cat.group();
    let weights: Vec<f64> = cat
        .dims()
        .iter()
        .map(|&d| (d * d) as f64 / k.order() as f64)
        .collect();

    let mut mean = 0.0;
    let mut second = 0.0;
    let mut zero = 0.0;
    let mut tuple = vec![0usize; n];
    let mut tuples = 0;
    loop {
        let rho = PlancherelIndex::new(tuple.clone());
        let w: f64 = tuple.iter().map(|&i| weights[i]).product();
        let mult = restricted_trivial_multiplicity(cat, &rho, h)?;
        let x = ratio_to_f64(&mult, &cat.dimension(&rho));
        mean += w * x;
        second += w * x * x;
        if mult.is_zero() {
            zero += w;
        }
        tuples += 1;
        match tuple.iter().rposition(|&i| i + 1 < cat.len()) {
            Some(pos) => {
                tuple[pos] += 1;
                tuple[pos + 1..].iter_mut().for_each(|i| *i = 0);
            }
            None => break,
        }
    }

    let order = h.order() as f64;
    let (variance_formula, chebyshev_bound) = conjugacy_sums(k, h);
    Ok(PlancherelExhaustive {
        moments: MomentReport {
            mean_exact: mean,
            variance_exact: second - mean * mean,
            mean_formula: 1.0 / order,
            variance_formula,
            chebyshev_bound,
        },
        prob_xh_zero: zero,
        tuples,
    })
}

/// `(1/|H|²) Σ_{h≠1} |h^G ∩ H| / |h^G|` and `|H| Σ_{h≠1} 1/|h^G|`.
fn conjugacy_sums(k: &BaseGroup, h: &SubgroupEnum) -> (f64, f64) {
    let sizes: Vec<usize> = h.partition().class_sizes().collect();
    let signature = |e: &[usize]| -> Vec<usize> { e.iter().map(|&a| k.class_of(a)).collect() };
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for e in h.compressed() {
        *counts.entry(signature(e)).or_default() += 1;
    }
    let mut overlap = 0.0;
    let mut inverse_sizes = 0.0;
    for e in h.compressed() {
        if e.iter().all(|&a| a == 0) {
            continue;
        }
        let class_size = e
            .iter()
            .zip(&sizes)
            .fold(BigUint::from(1u32), |acc, (&a, &s)| {
                acc * BigUint::from(k.class_size(a)).pow(s as u32)
            });
        let inv = ratio_to_f64(&BigUint::from(1u32), &class_size);
        overlap += counts[&signature(e)] as f64 * inv;
        inverse_sizes += inv;
    }
    let order = h.order() as f64;
    (overlap / (order * order), order * inverse_sizes)
}

/// A closed-form bound value. `vacuous` marks a probability upper bound at
/// or above one, or a lower bound at or below zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub vacuous: bool,
}

impl BoundValue {
    fn upper(value: f64) -> Self {
        BoundValue {
            value,
            vacuous: value >= 1.0,
        }
    }

    fn lower(value: f64) -> Self {
        BoundValue {
            value,
            vacuous: value <= 0.0,
        }
    }
}

/// Tail bounds on the smallest pattern class:
/// `Pr[d ≤ n/(2|K|^t)] ≤ 4|K|^{2t}/n` and
/// `Pr[d < ℓ] ≤ n^ℓ |K|^t e^{−n/|K|^t}`.
pub fn bound_lemma2(n: u64, t: u32, k_order: u64, ell: u64) -> (BoundValue, BoundValue) {
    let kt = (k_order as f64).powi(t as i32);
    let part1 = 4.0 * kt * kt / n as f64;
    let log2 = ell as f64 * (n as f64).ln() + kt.ln() - n as f64 / kt;
    (BoundValue::upper(part1), BoundValue::upper(log2.exp()))
}

/// `1 − n^κ |K|^t e^{−n/|K|^t}`, a lower bound on the probability that the
/// averaged tensor power has norm one.
pub fn bound_theorem1(n: u64, t: u32, k_order: u64, kappa: u64) -> BoundValue {
    BoundValue::lower(1.0 - theorem1_failure(n, t, k_order, kappa))
}

/// `n^κ |K|^t e^{−n/|K|^t}`, kept separately since `1 − x` rounds to one
/// once `x < 2^{−53}`.
pub fn theorem1_failure(n: u64, t: u32, k_order: u64, kappa: u64) -> f64 {
    let kt = (k_order as f64).powi(t as i32);
    (kappa as f64 * (n as f64).ln() + kt.ln() - n as f64 / kt).exp()
}

/// `1/(2√log₂|K|)`, the choice of α behind the mass and guarantee bounds.
pub fn default_alpha(k_order: u64) -> f64 {
    1.0 / (2.0 * (k_order as f64).log2().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Bounds {
    /// Upper bound on `Pr_{ρ,h}[X_H = 0]`: `2α/√n + (2^{−1/α}|K|^α)^{√n}`.
    pub bound: BoundValue,
    /// `1 − √2/(n log₂|K|)^{1/4}`.
    pub mass: BoundValue,
    pub guarantee: BoundValue,
    /// `2|K|^t ≤ α√n`.
    pub in_regime: bool,
    /// `4|K|^t √(log₂|K|) ≤ √n`.
    pub mass_in_regime: bool,
}

pub fn bound_theorem2(n: u64, t: u32, k_order: u64, alpha: f64) -> Result<Theorem2Bounds> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let kt = (k_order as f64).powi(t as i32);
    let sqrt_n = (n as f64).sqrt();
    let log_k = (k_order as f64).log2();
    let base_ln = -std::f64::consts::LN_2 / alpha + alpha * (k_order as f64).ln();
    let bound = 2.0 * alpha / sqrt_n + (sqrt_n * base_ln).exp();
    let mass = 1.0 - std::f64::consts::SQRT_2 / (n as f64 * log_k).powf(0.25);
    Ok(Theorem2Bounds {
        bound: BoundValue::upper(bound),
        mass: BoundValue::lower(mass),
        guarantee: BoundValue::lower(mass),
        in_regime: 2.0 * kt <= alpha * sqrt_n,
        mass_in_regime: 4.0 * kt * log_k.sqrt() <= sqrt_n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub lemma2_part1: BoundValue,
    pub lemma2_part2: BoundValue,
    pub theorem1_bound: Option<BoundValue>,
    pub theorem1_failure: Option<f64>,
    pub theorem2_bound: BoundValue,
    pub theorem2_mass: BoundValue,
    pub theorem2_guarantee: BoundValue,
    pub ell: u64,
    pub kappa: Option<u64>,
    pub alpha: f64,
    pub theorem2_in_regime: bool,
    pub theorem2_mass_in_regime: bool,
}

/// All bounds at once; `ell` feeds the second tail bound and `kappa` the
/// norm-one bound, which is omitted without it.
pub fn bound_report(
    n: u64,
    t: u32,
    k_order: u64,
    ell: u64,
    kappa: Option<u64>,
    alpha: f64,
) -> Result<BoundReport> {
    let (part1, part2) = bound_lemma2(n, t, k_order, ell);
    let thm2 = bound_theorem2(n, t, k_order, alpha)?;
    Ok(BoundReport {
        lemma2_part1: part1,
        lemma2_part2: part2,
        theorem1_bound: kappa.map(|k| bound_theorem1(n, t, k_order, k)),
        theorem1_failure: kappa.map(|k| theorem1_failure(n, t, k_order, k)),
        theorem2_bound: thm2.bound,
        theorem2_mass: thm2.mass,
        theorem2_guarantee: thm2.guarantee,
        ell,
        kappa,
        alpha,
        theorem2_in_regime: thm2.in_regime,
        theorem2_mass_in_regime: thm2.mass_in_regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_base_group, subgroup_closure, ProductElement};
    use crate::repr::irrep_catalog;

    fn setup(id: &str) -> (BaseGroup, IrrepCatalog) {
        let k = build_base_group(id).unwrap();
        let cat = irrep_catalog(&k).unwrap();
        (k, cat)
    }

    fn closure(k: &BaseGroup, gens: &[Vec<usize>]) -> SubgroupEnum {
        let gens: Vec<_> = gens.iter().cloned().map(ProductElement::new).collect();
        subgroup_closure(k, &gens, 1_000_000)
            .unwrap()
            .complete()
            .unwrap()
    }

    #[test]
    fn admissibility() {
        let (s3, cat) = setup("S3");
        assert!(is_admissible(&s3, &cat, 2).unwrap().admissible);
        let sign = is_admissible(&s3, &cat, 1).unwrap();
        assert!(!sign.admissible);
        assert!(sign.reasons.iter().any(|r| r.contains("dimension")));
        let (z6, cat6) = setup("Z6");
        for i in 0..6 {
            let a = is_admissible(&z6, &cat6, i).unwrap();
            assert!(!a.admissible);
            assert!(a.reasons.iter().any(|r| r.contains("abelian")));
        }
        assert!(matches!(kappa(&z6, &cat6, 1), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn kappa_values() {
        let (s3, cat) = setup("S3");
        let r = kappa(&s3, &cat, 2).unwrap();
        assert_eq!(r.kappa, 2);
        assert_eq!(r.checked_values[0], 0.0);
        assert_eq!(r.checked_values[1], 1.0);

        let (d5, cat) = setup("D5");
        let r = kappa(&d5, &cat, 2).unwrap();
        assert_eq!(r.kappa, 4);
        assert_eq!(r.analytic_cutoff, 11);
        assert!(r.checked_values[2].abs() < 1e-9);
        assert!(r.checked_values[1] > 0.0);
        assert!(r.checked_values[3..].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn xh_examples() {
        let (s3, cat) = setup("S3");
        let trivial = closure(&s3, &[vec![0, 0, 0]]);
        assert_eq!(
            xh_value(&cat, &PlancherelIndex::new(vec![2, 1, 2]), &trivial).unwrap(),
            1.0
        );
        let diag = closure(&s3, &[vec![1, 1], vec![4, 4]]);
        assert_eq!(
            xh_value(&cat, &PlancherelIndex::power(0, 2), &diag).unwrap(),
            1.0
        );
        assert_eq!(
            xh_value(&cat, &PlancherelIndex::power(2, 2), &diag).unwrap(),
            0.25
        );
    }

    #[test]
    fn moment_examples() {
        let (s3, cat) = setup("S3");
        let diag = closure(&s3, &[vec![1, 1], vec![4, 4]]);
        let m = plancherel_moments(&cat, 2, &diag).unwrap();
        assert!((m.mean_exact - 1.0 / 6.0).abs() < 1e-12);
        assert!((m.mean_formula - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.variance_exact - 1.0 / 18.0).abs() < 1e-12);
        assert!((m.variance_formula - 1.0 / 18.0).abs() < 1e-12);

        let trivial = closure(&s3, &[vec![0, 0]]);
        let m = plancherel_moments(&cat, 2, &trivial).unwrap();
        assert!((m.mean_exact - 1.0).abs() < 1e-12);
        assert!(m.variance_exact.abs() < 1e-12);
        assert_eq!(m.variance_formula, 0.0);
        assert_eq!(m.chebyshev_bound, 0.0);

        let full = closure(&s3, &[vec![1], vec![4]]);
        let m = plancherel_moments(&cat, 1, &full).unwrap();
        assert!((m.mean_exact - 1.0 / 6.0).abs() < 1e-12);
        assert!((m.variance_exact - m.variance_formula).abs() < 1e-12);
    }

    #[test]
    fn moments_reject_large_enumerations() {
        let (s3, cat) = setup("S3");
        let h = closure(&s3, &[vec![0; 11]]);
        assert!(matches!(
            plancherel_moments(&cat, 11, &h),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn lemma2_arithmetic() {
        let (p1, p2) = bound_lemma2(120, 1, 6, 2);
        assert!((p1.value - 1.2).abs() < 1e-12);
        assert!(p1.vacuous);
        let expected = 120f64.powi(2) * 6.0 * (-20f64).exp();
        assert!((p2.value - expected).abs() < 1e-15);
        assert!((p2.value - 1.78e-4).abs() < 1e-6);
        assert!(!p2.vacuous);
        let mut prev = f64::INFINITY;
        for n in (100..10_000).step_by(100) {
            let (p, _) = bound_lemma2(n, 1, 6, 2);
            assert!(p.value < prev);
            prev = p.value;
        }
    }

    #[test]
    fn theorem1_arithmetic() {
        let b = bound_theorem1(360, 1, 6, 2);
        let fail = theorem1_failure(360, 1, 6, 2);
        assert!((fail / (360f64.powi(2) * 6.0 * (-60f64).exp()) - 1.0).abs() < 1e-12);
        assert!((fail - 6.8e-21).abs() < 0.1e-21);
        assert!(b.value <= 1.0);
        assert!(!b.vacuous);
        assert!(bound_theorem1(10, 2, 6, 2).vacuous);
        assert!(bound_theorem1(10, 2, 6, 2).value < 0.0);
        // eventually increasing toward 1
        let vals: Vec<f64> = (200..2000)
            .step_by(50)
            .map(|n| bound_theorem1(n, 1, 6, 2).value)
            .collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn theorem2_arithmetic() {
        for k in [6u64, 10, 24] {
            let alpha = default_alpha(k);
            for n in [10u64, 100, 1_000, 1_000_000] {
                let b = bound_theorem2(n, 1, k, alpha).unwrap();
                assert!(b.bound.value <= 2.0 / (n as f64 * (k as f64).log2()).sqrt() + 1e-15);
            }
        }
        let b = bound_theorem2(10_000, 1, 6, 0.12).unwrap();
        assert!(b.in_regime);
        assert!((b.bound.value - 2.4e-3).abs() < 1e-12);
        let b = bound_theorem2(100, 1, 6, 5.0).unwrap();
        assert!(b.bound.vacuous);
        assert!(!b.in_regime || b.bound.value >= 1.0);
        assert!(bound_theorem2(100, 1, 6, 0.0).is_err());
        assert!(bound_theorem2(100, 1, 6, -1.0).is_err());
    }
}
