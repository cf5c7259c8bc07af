//! Unitary irreducible representations of the catalog groups, characters and
//! their inner products, and representations of `K^n` given as tensor
//! products `ρ₁ ⊗ ⋯ ⊗ ρₙ`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactCharacters;
use crate::group::{BaseGroup, Family, ProductElement, SubgroupEnum};

pub type CMatrix = DMatrix<Complex64>;

const MATRIX_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-9;
const RESIDUE_LIMIT: f64 = 1e-6;

/// A class function on a base group, one value per element.
#[derive(Debug, Clone, PartialEq)]
pub struct Character(Vec<Complex64>);

impl Character {
    pub fn new(values: Vec<Complex64>) -> Self {
        Character(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Character(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// `|K|` at the identity, zero elsewhere.
    pub fn regular(k: &BaseGroup) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); k.order()];
        v[0] = Complex64::new(k.order() as f64, 0.0);
        Character(v)
    }

    pub fn trivial(k: &BaseGroup) -> Self {
        Character(vec![Complex64::new(1.0, 0.0); k.order()])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise product (the character of the tensor product).
    pub fn tensor(&self, other: &Character) -> Character {
        Character(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn powi(&self, k: u32) -> Character {
        Character(self.0.iter().map(|v| v.powu(k)).collect())
    }

    pub fn is_class_function(&self, k: &BaseGroup, tol: f64) -> bool {
        k.classes()
            .iter()
            .all(|c| c.iter().all(|&g| (self.0[g] - self.0[c[0]]).norm() <= tol))
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryRep {
    name: String,
    index: usize,
    dim: usize,
    matrices: Vec<CMatrix>,
    character: Character,
    is_faithful: bool,
}

impl UnitaryRep {
    /// Validates unitarity, the homomorphism property over all pairs, and
    /// irreducibility before accepting the matrices.
    fn new(name: String, index: usize, k: &BaseGroup, matrices: Vec<CMatrix>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidRepresentation {
            name: name.clone(),
            reason,
        };
        if matrices.len() != k.order() {
            return Err(invalid(format!(
                "{} matrices for order {}",
                matrices.len(),
                k.order()
            )));
        }
        let dim = matrices[0].nrows();
        let id = CMatrix::identity(dim, dim);
        for (g, m) in matrices.iter().enumerate() {
            if m.shape() != (dim, dim) {
                return Err(invalid(format!("matrix {g} has shape {:?}", m.shape())));
            }
            if max_abs_diff(&(m * m.adjoint()), &id) > MATRIX_TOL {
                return Err(invalid(format!("matrix of {} is not unitary", k.label(g))));
            }
        }
        if max_abs_diff(&matrices[0], &id) > MATRIX_TOL {
            return Err(invalid(
                "identity does not map to the identity matrix".into(),
            ));
        }
        for g in 0..k.order() {
            for h in 0..k.order() {
                let lhs = &matrices[k.mul(g, h)];
                if max_abs_diff(lhs, &(&matrices[g] * &matrices[h])) > MATRIX_TOL {
                    return Err(invalid(format!(
                        "not a homomorphism at ({}, {})",
                        k.label(g),
                        k.label(h)
                    )));
                }
            }
        }
        let character = Character(matrices.iter().map(|m| m.trace()).collect());
        let norm = inner_product(&character, &character, k)?;
        if (norm - Complex64::new(1.0, 0.0)).norm() > ORTHONORMAL_TOL {
            return Err(invalid(format!("<χ, χ> = {norm}, not irreducible")));
        }
        let is_faithful = (1..k.order()).all(|g| max_abs_diff(&matrices[g], &id) > MATRIX_TOL);
        Ok(UnitaryRep {
            name,
            index,
            dim,
            matrices,
            character,
            is_faithful,
        })
    }

    /// `<group>:<index>`, e.g. `S3:2`.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn character(&self) -> &Character {
        &self.character
    }

    pub fn is_faithful(&self) -> bool {
        self.is_faithful
    }
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// All irreducible representations of a catalog group, trivial first.
#[derive(Debug, Clone)]
pub struct IrrepCatalog {
    group: BaseGroup,
    irreps: Vec<UnitaryRep>,
    exact: ExactCharacters,
}

pub fn irrep_catalog(k: &BaseGroup) -> Result<IrrepCatalog> {
    let raw = match k.family() {
        Family::Cyclic(m) => cyclic_irreps(m),
        Family::Dihedral(m) => dihedral_irreps(m),
        Family::Symmetric(m) => symmetric_irreps(k, m),
    };
    let irreps = raw
        .into_iter()
        .enumerate()
        .map(|(i, mats)| UnitaryRep::new(format!("{}:{i}", k.name()), i, k, mats))
        .collect::<Result<Vec<_>>>()?;
    let dim_sq: usize = irreps.iter().map(|r| r.dim * r.dim).sum();
    if dim_sq != k.order() {
        return Err(Error::InvalidGroup(format!(
            "{}: Σ d² = {dim_sq} ≠ {}",
            k.name(),
            k.order()
        )));
    }
    let chars: Vec<&[Complex64]> = irreps.iter().map(|r| r.character.values()).collect();
    let exact = ExactCharacters::new(k, &chars)?;
    Ok(IrrepCatalog {
        group: k.clone(),
        irreps,
        exact,
    })
}

fn scalar(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// `e^{2πi a/m}`, exact at multiples of a quarter turn.
fn root_of_unity(a: usize, m: usize) -> Complex64 {
    let a = a % m;
    if (4 * a).is_multiple_of(m) {
        return [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][4 * a / m];
    }
    Complex64::from_polar(1.0, 2.0 * PI * a as f64 / m as f64)
}

fn cyclic_irreps(m: usize) -> Vec<Vec<CMatrix>> {
    (0..m)
        .map(|j| (0..m).map(|k| scalar(root_of_unity(j * k, m))).collect())
        .collect()
}

/// Element `f·m + k` is `s^f r^k`; the two-dimensional irreps send `r` to a
/// rotation by `2πj/m` and `s` to a reflection.
fn dihedral_irreps(m: usize) -> Vec<Vec<CMatrix>> {
    let one_dim = |f_sign: bool, k_sign: bool| -> Vec<CMatrix> {
        (0..2 * m)
            .map(|g| {
                let (f, k) = (g / m, g % m);
                let mut v = 1.0;
                if f_sign && f == 1 {
                    v = -v;
                }
                if k_sign && k % 2 == 1 {
                    v = -v;
                }
                scalar(Complex64::new(v, 0.0))
            })
            .collect()
    };
    let mut out = vec![one_dim(false, false), one_dim(true, false)];
    if m.is_multiple_of(2) {
        out.push(one_dim(false, true));
        out.push(one_dim(true, true));
    }
    let reflection = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    for j in 1..=(m - 1) / 2 {
        out.push(
            (0..2 * m)
                .map(|g| {
                    let (f, k) = (g / m, g % m);
                    let z = root_of_unity(j * k, m);
                    let (c, s) = (z.re, z.im);
                    let rot = real_matrix(2, 2, &[c, -s, s, c]);
                    if f == 1 {
                        &reflection * rot
                    } else {
                        rot
                    }
                })
                .collect(),
        );
    }
    out
}

/// Orthonormal basis of the sum-zero hyperplane of `R^m` (Helmert columns).
fn sum_zero_basis(m: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(m, m - 1);
    for col in 0..m - 1 {
        let k = (col + 1) as f64;
        let scale = 1.0 / (k * (k + 1.0)).sqrt();
        for row in 0..=col {
            b[(row, col)] = scale;
        }
        b[(col + 1, col)] = -k * scale;
    }
    b
}

/// The permutation representation restricted to the sum-zero hyperplane.
fn standard_from_action(perm: &[usize], basis: &DMatrix<f64>) -> CMatrix {
    let m = perm.len();
    let mut p = DMatrix::<f64>::zeros(m, m);
    for (x, &y) in perm.iter().enumerate() {
        p[(y, x)] = 1.0;
    }
    (basis.transpose() * p * basis).map(|v| Complex64::new(v, 0.0))
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// S3: trivial, sign, standard. S4: trivial, sign, the 2-dim irrep through
/// the action on the three pairings, standard, standard ⊗ sign.
fn symmetric_irreps(k: &BaseGroup, m: usize) -> Vec<Vec<CMatrix>> {
    let perms: Vec<&[usize]> = (0..k.order()).map(|g| k.permutation(g)).collect();
    let trivial = perms
        .iter()
        .map(|_| scalar(Complex64::new(1.0, 0.0)))
        .collect();
    let sign: Vec<CMatrix> = perms
        .iter()
        .map(|p| scalar(Complex64::new(permutation_sign(p), 0.0)))
        .collect();
    let basis = sum_zero_basis(m);
    let standard: Vec<CMatrix> = perms
        .iter()
        .map(|p| standard_from_action(p, &basis))
        .collect();
    if m == 3 {
        return vec![trivial, sign, standard];
    }
    const PAIRINGS: [[[usize; 2]; 2]; 3] = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];
    let normalize = |pair: [usize; 2]| {
        if pair[0] < pair[1] {
            pair
        } else {
            [pair[1], pair[0]]
        }
    };
    let basis3 = sum_zero_basis(3);
    let two_dim = perms
        .iter()
        .map(|p| {
            let action: Vec<usize> = PAIRINGS
                .iter()
                .map(|[a, b]| {
                    let image = [normalize([p[a[0]], p[a[1]]]), normalize([p[b[0]], p[b[1]]])];
                    PAIRINGS
                        .iter()
                        .position(|[c, d]| image.contains(c) && image.contains(d))
                        .expect("S4 permutes the pairings")
                })
                .collect();
            standard_from_action(&action, &basis3)
        })
        .collect();
    let twisted = standard
        .iter()
        .zip(&sign)
        .map(|(s, e)| s * e[(0, 0)])
        .collect();
    vec![trivial, sign, two_dim, standard, twisted]
}

impl IrrepCatalog {
    pub fn group(&self) -> &BaseGroup {
        &self.group
    }

    pub fn irreps(&self) -> &[UnitaryRep] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&UnitaryRep> {
        self.irreps
            .get(index)
            .ok_or_else(|| Error::IrrepOutOfRange {
                group: self.group.name().to_string(),
                index,
                count: self.irreps.len(),
            })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(UnitaryRep::dim).collect()
    }

    /// Looks up `<group>:<index>`.
    pub fn by_name(&self, name: &str) -> Result<&UnitaryRep> {
        let (group, idx) = name.split_once(':').ok_or_else(|| {
            Error::InvalidParameter(format!("irrep name `{name}` is not <group>:<index>"))
        })?;
        if group != self.group.name() {
            return Err(Error::InvalidParameter(format!(
                "irrep `{name}` does not belong to {}",
                self.group.name()
            )));
        }
        let index = idx
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad irrep index in `{name}`")))?;
        self.get(index)
    }

    /// `Π d_{ρ_j}` as an exact integer.
    pub fn dimension(&self, rho: &PlancherelIndex) -> BigUint {
        rho.0
            .iter()
            .fold(BigUint::from(1u32), |acc, &i| acc * self.irreps[i].dim)
    }

    /// Same as [`Self::dimension`], or `None` past `u128`.
    pub fn dimension_u128(&self, rho: &PlancherelIndex) -> Option<u128> {
        rho.0
            .iter()
            .try_fold(1u128, |acc, &i| acc.checked_mul(self.irreps[i].dim as u128))
    }

    fn check_index(&self, rho: &PlancherelIndex) -> Result<()> {
        match rho.0.iter().find(|&&i| i >= self.irreps.len()) {
            Some(&index) => Err(Error::IrrepOutOfRange {
                group: self.group.name().to_string(),
                index,
                count: self.irreps.len(),
            }),
            None => Ok(()),
        }
    }

    /// Multiplicity of the trivial representation of `K` in
    /// `⊗_σ σ^{⊗m_σ}` restricted to the diagonal, computed exactly.
    pub fn diagonal_trivial_multiplicity(&self, powers: &[(usize, u32)]) -> Result<BigUint> {
        for &(s, _) in powers {
            self.get(s)?;
        }
        let bound = powers.iter().fold(BigUint::from(1u32), |acc, &(s, m)| {
            acc * BigUint::from(self.irreps[s].dim).pow(m)
        });
        let elements: Vec<Vec<usize>> = (0..self.group.order()).map(|a| vec![a]).collect();
        self.exact
            .trivial_multiplicity(&[powers.to_vec()], &elements, &bound)
    }

    /// Serializable description of every irrep.
    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.irreps
            .iter()
            .map(|r| ManifestEntry {
                group: self.group.name().to_string(),
                index: r.index,
                name: r.name.clone(),
                dim: r.dim,
                faithful: r.is_faithful,
                character: r.character.values().iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub group: String,
    pub index: usize,
    pub name: String,
    pub dim: usize,
    pub faithful: bool,
    pub character: Vec<[f64; 2]>,
}

/// `(1/|K|) Σ_g χ(g) ψ(g)*`.
pub fn inner_product(chi: &Character, psi: &Character, k: &BaseGroup) -> Result<Complex64> {
    for c in [chi, psi] {
        if c.len() != k.order() {
            return Err(Error::LengthMismatch {
                expected: k.order(),
                got: c.len(),
            });
        }
    }
    let sum: Complex64 = chi.0.iter().zip(&psi.0).map(|(a, b)| a * b.conj()).sum();
    Ok(sum / k.order() as f64)
}

/// Copies of the irrep with character `irrep_char` inside `any_char`.
pub fn multiplicity(irrep_char: &Character, any_char: &Character, k: &BaseGroup) -> Result<u64> {
    let v = inner_product(any_char, irrep_char, k)?;
    let r = v.re.round();
    let residue = (v - Complex64::new(r, 0.0)).norm();
    if residue >= RESIDUE_LIMIT || r < 0.0 {
        return Err(Error::ResidueTooLarge {
            what: "multiplicity".into(),
            residue: if r < 0.0 { r.abs() } else { residue },
        });
    }
    Ok(r as u64)
}

/// An irrep of `K^n` as a tuple of base irreps, one per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PlancherelIndex(Vec<usize>);

impl PlancherelIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        PlancherelIndex(indices)
    }

    /// `ρ^n`: the same irrep in every coordinate.
    pub fn power(index: usize, n: usize) -> Self {
        PlancherelIndex(vec![index; n])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&i| i == 0)
    }
}

/// `Π_j χ_{ρ_j}(g_j)`.
pub fn product_character_at(
    cat: &IrrepCatalog,
    rho: &PlancherelIndex,
    g: &ProductElement,
) -> Result<Complex64> {
    if rho.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: rho.len(),
            got: g.len(),
        });
    }
    cat.check_index(rho)?;
    Ok(rho
        .0
        .iter()
        .zip(g.coords())
        .map(|(&r, &x)| cat.irreps[r].character.0[x])
        .product())
}

/// Each coordinate independently with probability `d²/|K|`.
pub fn plancherel_sample<R: Rng + ?Sized>(
    cat: &IrrepCatalog,
    n: usize,
    rng: &mut R,
) -> PlancherelIndex {
    let order = cat.group.order();
    PlancherelIndex(
        (0..n)
            .map(|_| {
                let mut u = rng.gen_range(0..order);
                cat.irreps
                    .iter()
                    .position(|r| {
                        let w = r.dim * r.dim;
                        if u < w {
                            true
                        } else {
                            u -= w;
                            false
                        }
                    })
                    .expect("Σ d² = |K|")
            })
            .collect(),
    )
}

/// For each pattern class, how many coordinates carry each irrep.
fn class_blocks(rho: &PlancherelIndex, h: &SubgroupEnum, irreps: usize) -> Vec<Vec<(usize, u32)>> {
    h.partition()
        .classes()
        .iter()
        .map(|class| {
            let mut counts = vec![0u32; irreps];
            for &j in class {
                counts[rho.0[j]] += 1;
            }
            counts
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .collect()
        })
        .collect()
}

/// Copies of the trivial representation in `Res_H ρ`, i.e.
/// `(1/|H|) Σ_{h∈H} χ_ρ(h)`, computed exactly.
pub fn restricted_trivial_multiplicity(
    cat: &IrrepCatalog,
    rho: &PlancherelIndex,
    h: &SubgroupEnum,
) -> Result<BigUint> {
    if rho.len() != h.n() {
        return Err(Error::LengthMismatch {
            expected: h.n(),
            got: rho.len(),
        });
    }
    cat.check_index(rho)?;
    let blocks = class_blocks(rho, h, cat.len());
    cat.exact
        .trivial_multiplicity(&blocks, h.compressed(), &cat.dimension(rho))
}

/// Whether every pattern class factor `⊗_{j∈C} ρ_j`, restricted to the
/// diagonal copy of `K`, contains the trivial representation. When it does,
/// `Res_{H̃} ρ` (hence `Res_H ρ`) has a fixed vector.
pub fn pattern_classes_fix_vector(
    cat: &IrrepCatalog,
    rho: &PlancherelIndex,
    partition: &crate::product::PatternPartition,
) -> Result<bool> {
    if rho.len() != partition.n() {
        return Err(Error::LengthMismatch {
            expected: partition.n(),
            got: rho.len(),
        });
    }
    cat.check_index(rho)?;
    for class in partition.classes() {
        let mut counts = vec![0u32; cat.len()];
        for &j in class {
            counts[rho.0[j]] += 1;
        }
        let powers: Vec<(usize, u32)> = counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .collect();
        if cat.diagonal_trivial_multiplicity(&powers)? == BigUint::from(0u32) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_base_group, subgroup_closure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog(id: &str) -> IrrepCatalog {
        irrep_catalog(&build_base_group(id).unwrap()).unwrap()
    }

    #[test]
    fn catalog_dimensions() {
        assert_eq!(catalog("S3").dims(), vec![1, 1, 2]);
        assert_eq!(catalog("D5").dims(), vec![1, 1, 2, 2]);
        assert_eq!(catalog("D6").dims(), vec![1, 1, 1, 1, 2, 2]);
        assert_eq!(catalog("S4").dims(), vec![1, 1, 2, 3, 3]);
        let z2 = catalog("Z2");
        assert_eq!(z2.dims(), vec![1, 1]);
        assert_eq!(
            z2.get(1).unwrap().character(),
            &Character::from_real(&[1.0, -1.0])
        );
        assert_eq!(
            z2.get(0).unwrap().character(),
            &Character::from_real(&[1.0, 1.0])
        );
    }

    #[test]
    fn s3_standard_character() {
        let cat = catalog("S3");
        let std = cat.by_name("S3:2").unwrap();
        let expected = [2.0, 0.0, 0.0, 0.0, -1.0, -1.0];
        for (v, e) in std.character().values().iter().zip(expected) {
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
        let k = cat.group();
        let triv = Character::trivial(k);
        assert!((inner_product(&triv, &triv, k).unwrap() - 1.0).norm() < 1e-12);
        assert!(inner_product(std.character(), &triv, k).unwrap().norm() < 1e-12);
        assert!((inner_product(std.character(), std.character(), k).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn inner_product_is_hermitian() {
        let cat = catalog("Z5");
        let k = cat.group();
        let a = cat
            .get(1)
            .unwrap()
            .character()
            .tensor(cat.get(3).unwrap().character());
        let b = cat.get(2).unwrap().character();
        let ab = inner_product(&a, b, k).unwrap();
        let ba = inner_product(b, &a, k).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
        assert!(matches!(
            inner_product(&Character::from_real(&[1.0]), b, k),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn multiplicities() {
        let cat = catalog("S3");
        let k = cat.group();
        let reg = Character::regular(k);
        assert_eq!(
            multiplicity(cat.get(0).unwrap().character(), &reg, k).unwrap(),
            1
        );
        assert_eq!(
            multiplicity(cat.get(2).unwrap().character(), &reg, k).unwrap(),
            2
        );
        let sq = cat.get(2).unwrap().character().powi(2);
        assert_eq!(
            multiplicity(cat.get(0).unwrap().character(), &sq, k).unwrap(),
            1
        );
        let junk = Character::from_real(&[0.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            multiplicity(cat.get(0).unwrap().character(), &junk, k),
            Err(Error::ResidueTooLarge { .. })
        ));
    }

    #[test]
    fn faithfulness() {
        assert!(catalog("S3").get(2).unwrap().is_faithful());
        assert!(!catalog("S3").get(1).unwrap().is_faithful());
        assert!(catalog("D5").get(2).unwrap().is_faithful());
        assert!(catalog("D5").get(3).unwrap().is_faithful());
        assert!(!catalog("S4").get(2).unwrap().is_faithful());
        assert!(catalog("S4").get(3).unwrap().is_faithful());
        assert!(catalog("Z5").get(1).unwrap().is_faithful());
    }

    #[test]
    fn product_characters() {
        let cat = catalog("S3");
        let rho = PlancherelIndex::new(vec![2, 1, 2]);
        let e = ProductElement::identity(3);
        assert!((product_character_at(&cat, &rho, &e).unwrap() - 4.0).norm() < 1e-12);
        // transposition in a standard slot: χ = 0
        let g = ProductElement::new(vec![1, 4, 4]);
        assert!(product_character_at(&cat, &rho, &g).unwrap().norm() < 1e-12);
        let rr = PlancherelIndex::power(2, 2);
        let cc = ProductElement::new(vec![4, 4]);
        assert!((product_character_at(&cat, &rr, &cc).unwrap() - 1.0).norm() < 1e-12);
        assert!(product_character_at(&cat, &rr, &e).is_err());
    }

    #[test]
    fn plancherel_frequencies() {
        let cat = catalog("S3");
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(
            plancherel_sample(&cat, 20, &mut a),
            plancherel_sample(&cat, 20, &mut b)
        );

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 3];
        for _ in 0..60_000 {
            counts[plancherel_sample(&cat, 1, &mut rng).indices()[0]] += 1;
        }
        let sd = (60_000.0_f64 * (4.0 / 6.0) * (2.0 / 6.0)).sqrt();
        assert!((counts[2] as f64 - 40_000.0).abs() < 4.0 * sd);

        let z2 = catalog("Z2");
        let mut counts = [0usize; 2];
        for _ in 0..10_000 {
            counts[plancherel_sample(&z2, 1, &mut rng).indices()[0]] += 1;
        }
        assert!((counts[0] as f64 - 5_000.0).abs() < 4.0 * 50.0);
    }

    #[test]
    fn restricted_multiplicities() {
        let cat = catalog("S3");
        let k = cat.group();
        let trivial_h = subgroup_closure(k, &[ProductElement::identity(3)], 10)
            .unwrap()
            .complete()
            .unwrap();
        let rho = PlancherelIndex::new(vec![2, 2, 1]);
        assert_eq!(
            restricted_trivial_multiplicity(&cat, &rho, &trivial_h).unwrap(),
            BigUint::from(4u32)
        );

        let diag = subgroup_closure(
            k,
            &[
                ProductElement::diagonal(1, 2),
                ProductElement::diagonal(4, 2),
            ],
            100,
        )
        .unwrap()
        .complete()
        .unwrap();
        assert_eq!(diag.order(), 6);
        let rr = PlancherelIndex::power(2, 2);
        assert_eq!(
            restricted_trivial_multiplicity(&cat, &rr, &diag).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            restricted_trivial_multiplicity(&cat, &PlancherelIndex::power(0, 2), &diag).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn exact_matches_float_on_powers() {
        // ⟨χ^k, 1⟩ for D7's rotation irreps: exact route vs. float class sums.
        let cat = catalog("D7");
        let k = cat.group();
        for idx in 2..cat.len() {
            let chi = cat.get(idx).unwrap().character();
            for power in 1..=20u32 {
                let float =
                    multiplicity(cat.get(0).unwrap().character(), &chi.powi(power), k).unwrap();
                let exact = cat.diagonal_trivial_multiplicity(&[(idx, power)]).unwrap();
                assert_eq!(exact, BigUint::from(float), "irrep {idx} power {power}");
            }
        }
    }

    #[test]
    fn exact_handles_huge_dimensions() {
        // ⟨χ_std^k, 1⟩ on S3 is (2^k + 2(−1)^k)/6 for k ≥ 1.
        let cat = catalog("S3");
        for power in [1u32, 2, 50, 61, 200] {
            let exact = cat.diagonal_trivial_multiplicity(&[(2, power)]).unwrap();
            let two_k = BigUint::from(1u32) << power;
            let expected = if power % 2 == 0 {
                (two_k + 2u32) / 6u32
            } else {
                (two_k - 2u32) / 6u32
            };
            assert_eq!(exact, expected);
        }
    }
}
