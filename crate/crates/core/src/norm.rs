//! Operator norms of `(1/t) Σ_m ρ(h⁽ᵐ⁾)` for tensor-product representations
//! `ρ = ρ₁ ⊗ ⋯ ⊗ ρₙ` of `K^n`.
//!
//! The matrix-free path applies each `ρ₁(g₁) ⊗ ⋯ ⊗ ρₙ(gₙ)` by successive mode
//! contractions and runs power iteration on `M†M`. The dense path materializes
//! `M` and is the oracle the power path is checked against. Cayley-graph
//! second eigenvalues are available both from the adjacency matrix and as a
//! maximum over nontrivial irreps of the symmetrized operator.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{product_inv, product_mul, ProductElement, SubgroupEnum};
use crate::product::PatternPartition;
use crate::repr::{
    pattern_classes_fix_vector, restricted_trivial_multiplicity, CMatrix, IrrepCatalog,
    PlancherelIndex,
};

pub const MATRIX_FREE_DIM_CAP: u128 = 8192;
pub const DENSE_DIM_CAP: u128 = 512;
pub const CAYLEY_DENSE_VERTEX_CAP: u128 = 4096;
pub const IS_ONE_THRESHOLD: f64 = 1e-6;

/// Applies `M₁ ⊗ ⋯ ⊗ Mₙ` to `v` without forming the product.
///
/// `v` is indexed row-major with the first factor most significant, matching
/// the usual Kronecker convention.
pub fn kron_apply(factors: &[&CMatrix], v: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut dim: u128 = 1;
    for f in factors {
        if f.nrows() != f.ncols() {
            return Err(Error::InvalidParameter(format!(
                "factor of shape {:?} is not square",
                f.shape()
            )));
        }
        dim = dim.saturating_mul(f.nrows() as u128);
    }
    if dim > MATRIX_FREE_DIM_CAP {
        return Err(Error::DimensionOverCap {
            dim,
            cap: MATRIX_FREE_DIM_CAP,
        });
    }
    if dim != v.len() as u128 {
        return Err(Error::LengthMismatch {
            expected: dim as usize,
            got: v.len(),
        });
    }
    let total = v.len();
    let mut cur = v.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); total];
    let mut left = 1;
    for f in factors {
        let d = f.nrows();
        let right = total / (left * d);
        if d == 1 {
            let s = f[(0, 0)];
            if s != Complex64::new(1.0, 0.0) {
                cur.iter_mut().for_each(|x| *x *= s);
            }
            left *= d;
            continue;
        }
        for l in 0..left {
            let base = l * d * right;
            for i in 0..d {
                let out = &mut next[base + i * right..base + (i + 1) * right];
                out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
                for j in 0..d {
                    let m = f[(i, j)];
                    if m == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = &cur[base + j * right..base + (j + 1) * right];
                    for (o, s) in out.iter_mut().zip(src) {
                        *o += m * s;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        left *= d;
    }
    Ok(cur)
}

/// `(1/t) Σ_m ρ(h⁽ᵐ⁾)`, or with `symmetrized` the average of
/// `(ρ(h) + ρ(h⁻¹))/2`.
#[derive(Debug, Clone)]
pub struct AveragedOperator<'a> {
    catalog: &'a IrrepCatalog,
    rho: PlancherelIndex,
    gens: Vec<ProductElement>,
    symmetrized: bool,
}

impl<'a> AveragedOperator<'a> {
    pub fn new(
        catalog: &'a IrrepCatalog,
        rho: PlancherelIndex,
        gens: Vec<ProductElement>,
        symmetrized: bool,
    ) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for g in &gens {
            if g.len() != rho.len() {
                return Err(Error::LengthMismatch {
                    expected: rho.len(),
                    got: g.len(),
                });
            }
        }
        for &i in rho.indices() {
            catalog.get(i)?;
        }
        Ok(AveragedOperator {
            catalog,
            rho,
            gens,
            symmetrized,
        })
    }

    pub fn rho(&self) -> &PlancherelIndex {
        &self.rho
    }

    pub fn generators(&self) -> &[ProductElement] {
        &self.gens
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn dim(&self) -> BigUint {
        self.catalog.dimension(&self.rho)
    }

    fn dim_within(&self, cap: u128) -> Result<usize> {
        match self.catalog.dimension_u128(&self.rho) {
            Some(d) if d <= cap => Ok(d as usize),
            Some(d) => Err(Error::DimensionOverCap { dim: d, cap }),
            None => Err(Error::DimensionOverCap {
                dim: u128::MAX,
                cap,
            }),
        }
    }

    /// The unitaries being averaged.
    fn terms(&self) -> Vec<ProductElement> {
        let k = self.catalog.group();
        let mut out = self.gens.clone();
        if self.symmetrized {
            out.extend(self.gens.iter().map(|g| product_inv(g, k)));
        }
        out
    }

    fn factors(&self, g: &ProductElement) -> Vec<&CMatrix> {
        self.rho
            .indices()
            .iter()
            .zip(g.coords())
            .map(|(&r, &x)| self.catalog.irreps()[r].matrix(x))
            .collect()
    }

    /// `M v`, or `M† v` with `adjoint`.
    pub fn apply(&self, v: &[Complex64], adjoint: bool) -> Result<Vec<Complex64>> {
        let k = self.catalog.group();
        let terms = self.terms();
        let scale = 1.0 / terms.len() as f64;
        let mut acc = vec![Complex64::new(0.0, 0.0); v.len()];
        for term in &terms {
            let g = if adjoint {
                product_inv(term, k)
            } else {
                term.clone()
            };
            let w = kron_apply(&self.factors(&g), v)?;
            for (a, b) in acc.iter_mut().zip(w) {
                *a += b;
            }
        }
        acc.iter_mut().for_each(|a| *a *= scale);
        Ok(acc)
    }

    /// Materializes `M`.
    pub fn dense(&self) -> Result<CMatrix> {
        let dim = self.dim_within(DENSE_DIM_CAP)?;
        let terms = self.terms();
        let mut m = CMatrix::zeros(dim, dim);
        for term in &terms {
            let mut prod = CMatrix::identity(1, 1);
            for f in self.factors(term) {
                prod = prod.kronecker(f);
            }
            m += prod;
        }
        Ok(m / Complex64::new(terms.len() as f64, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Certificate,
    Power,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub is_one: bool,
    pub method: NormMethod,
    pub iterations: usize,
}

impl NormEstimate {
    fn numeric(value: f64, method: NormMethod, iterations: usize) -> Self {
        let value = value.clamp(0.0, 1.0);
        NormEstimate {
            value,
            is_one: value > 1.0 - IS_ONE_THRESHOLD,
            method,
            iterations,
        }
    }

    /// Norm exactly one, certified by a fixed vector.
    pub fn certified() -> Self {
        NormEstimate {
            value: 1.0,
            is_one: true,
            method: NormMethod::Certificate,
            iterations: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-12,
            max_iters: 5000,
            restarts: 3,
            seed: 0x5EED_0F5C_A1E0,
        }
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// Power iteration on `M†M`, maximized over independent random starts.
///
/// Each step's Rayleigh quotient is `‖M v‖²` for the current unit vector;
/// a start converges once successive quotients differ by less than `tol`.
pub fn average_norm_power(op: &AveragedOperator<'_>, opts: &PowerOptions) -> Result<NormEstimate> {
    let dim = op.dim_within(MATRIX_FREE_DIM_CAP)?;
    let mut best = 0.0f64;
    let mut any_converged = false;
    let mut total_iters = 0;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        normalize(&mut v);
        let mut prev = f64::NEG_INFINITY;
        let mut lambda = 0.0;
        let mut converged = false;
        for _ in 0..opts.max_iters {
            total_iters += 1;
            let w = op.apply(&v, false)?;
            lambda = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if (lambda - prev).abs() < opts.tol {
                converged = true;
                break;
            }
            prev = lambda;
            let mut u = op.apply(&w, true)?;
            if normalize(&mut u) == 0.0 {
                converged = true;
                break;
            }
            v = u;
        }
        any_converged |= converged;
        best = best.max(lambda);
    }
    if !any_converged {
        return Err(Error::NotConverged {
            best: best.sqrt().min(1.0),
            iterations: total_iters,
        });
    }
    Ok(NormEstimate::numeric(
        best.sqrt(),
        NormMethod::Power,
        total_iters,
    ))
}

/// Largest singular value of the materialized operator, from the full
/// eigendecomposition of `M†M` (of `M` itself when it is Hermitian).
pub fn average_norm_dense(op: &AveragedOperator<'_>) -> Result<NormEstimate> {
    let m = op.dense()?;
    let value = if op.symmetrized {
        m.symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()))
    } else {
        let mtm = m.adjoint() * &m;
        mtm.symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l))
            .max(0.0)
            .sqrt()
    };
    Ok(NormEstimate::numeric(value, NormMethod::Dense, 1))
}

/// Sufficient condition for `‖(1/t) Σ ρ(h⁽ᵐ⁾)‖ = 1`: a vector fixed by every
/// generator. For `ρ = σ^n` the pattern test is `d_min ≥ κ_σ`; for a general
/// tuple each pattern class factor is checked directly. With an enumerated
/// subgroup, a nonzero trivial multiplicity in `Res_H ρ` also certifies.
///
/// `false` means no certificate was found, not that the norm is below one.
pub fn trivial_certificate(
    p: &PatternPartition,
    kappa: usize,
    h: Option<&SubgroupEnum>,
    catalog: &IrrepCatalog,
    rho: &PlancherelIndex,
) -> Result<bool> {
    let uniform = rho.indices().windows(2).all(|w| w[0] == w[1]);
    let pattern = if uniform {
        p.d_min() >= kappa
    } else {
        pattern_classes_fix_vector(catalog, rho, p)?
    };
    if pattern {
        return Ok(true);
    }
    match h {
        Some(h) => Ok(restricted_trivial_multiplicity(catalog, rho, h)? > BigUint::from(0u32)),
        None => Ok(false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CayleyMethod {
    DenseAdjacency,
    PerIrrep,
}

/// Second-largest absolute eigenvalue of the normalized Cayley graph of
/// `K^n` on the multiset `gens ∪ gens⁻¹`.
pub fn cayley_second_eigenvalue(
    catalog: &IrrepCatalog,
    n: usize,
    gens: &[ProductElement],
    method: CayleyMethod,
) -> Result<f64> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if let Some(g) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: g.len(),
        });
    }
    match method {
        CayleyMethod::DenseAdjacency => cayley_dense(catalog, n, gens),
        CayleyMethod::PerIrrep => cayley_per_irrep(catalog, n, gens),
    }
}

fn cayley_dense(catalog: &IrrepCatalog, n: usize, gens: &[ProductElement]) -> Result<f64> {
    let k = catalog.group();
    let order = k.order();
    let vertices = (order as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if vertices > CAYLEY_DENSE_VERTEX_CAP {
        return Err(Error::DimensionOverCap {
            dim: vertices,
            cap: CAYLEY_DENSE_VERTEX_CAP,
        });
    }
    let vertices = vertices as usize;
    let decode = |mut x: usize| -> ProductElement {
        let mut coords = vec![0; n];
        for c in coords.iter_mut().rev() {
            *c = x % order;
            x /= order;
        }
        ProductElement::new(coords)
    };
    let encode = |g: &ProductElement| g.coords().iter().fold(0, |acc, &c| acc * order + c);
    let steps: Vec<ProductElement> = gens
        .iter()
        .flat_map(|g| [g.clone(), product_inv(g, k)])
        .collect();
    let w = 1.0 / steps.len() as f64;
    let mut adj = DMatrix::<f64>::zeros(vertices, vertices);
    for x in 0..vertices {
        let gx = decode(x);
        for s in &steps {
            adj[(x, encode(&product_mul(&gx, s, k)?))] += w;
        }
    }
    let mut eig: Vec<f64> = adj.symmetric_eigenvalues().iter().copied().collect();
    let top = eig
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .map(|(i, _)| i)
        .expect("at least one vertex");
    eig.swap_remove(top);
    Ok(eig.iter().fold(0.0f64, |acc, l| acc.max(l.abs())).min(1.0))
}

fn cayley_per_irrep(catalog: &IrrepCatalog, n: usize, gens: &[ProductElement]) -> Result<f64> {
    let count = (catalog.len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if count > 1_000_000 {
        return Err(Error::EnumerationCap {
            count,
            cap: 1_000_000,
        });
    }
    let mut best = 0.0f64;
    let mut tuple = vec![0usize; n];
    // advance odometer; the all-trivial tuple is skipped
    while let Some(pos) = tuple.iter().rposition(|&i| i + 1 < catalog.len()) {
        tuple[pos] += 1;
        tuple[pos + 1..].iter_mut().for_each(|i| *i = 0);
        let op = AveragedOperator::new(
            catalog,
            PlancherelIndex::new(tuple.clone()),
            gens.to_vec(),
            true,
        )?;
        best = best.max(average_norm_dense(&op)?.value);
    }
    Ok(best)
}


#[cfg(test)]
mod oracle_agreement {
    use super::*;
    use crate::group::{build_base_group, uniform_product_element};
    use crate::repr::irrep_catalog;

    #[test]
    fn power_matches_dense_on_seeded_instances() {
        let s3 = irrep_catalog(&build_base_group("S3").unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst = 0.0f64;
        for _ in 0..120 {
            let n = rng.gen_range(1..=5);
            let t = rng.gen_range(1..=3);
            let gens: Vec<_> = (0..t)
                .map(|_| uniform_product_element(s3.group(), n, &mut rng))
                .collect();
            let op = AveragedOperator::new(&s3, PlancherelIndex::power(2, n), gens, false).unwrap();
            let p = average_norm_power(&op, &PowerOptions::default()).unwrap();
            let d = average_norm_dense(&op).unwrap();
            worst = worst.max((p.value - d.value).abs());
        }
        assert!(worst < 1e-8, "worst deviation {worst:e}");
    }
}
