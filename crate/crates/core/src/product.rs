//! Coordinate patterns of a generator list in `K^n`: the level-set partition
//! of coordinates, the `d` statistic, `|H̃| = |K|^ℓ`, supports, and conjugacy
//! class sizes in the product group.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{BaseGroup, ProductElement};

/// Level sets of the map `i ↦ (h⁽¹⁾ᵢ, …, h⁽ᵗ⁾ᵢ)`.
///
/// Classes are numbered in order of their smallest coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternPartition {
    n: usize,
    t: usize,
    /// Row-major `n × t`: row `i` is the tuple of generator values at `i`.
    pattern: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    d_min: usize,
}

impl PatternPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn pattern(&self, i: usize) -> &[usize] {
        &self.pattern[i * self.t..(i + 1) * self.t]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.iter().map(Vec::len)
    }

    pub fn ell(&self) -> usize {
        self.classes.len()
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    /// Representative coordinate of each class.
    pub fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.iter().map(|c| c[0])
    }

    /// Restricts `g` to class representatives, or `None` when `g` is not
    /// constant on every class (i.e. `g ∉ H̃`).
    pub fn compress(&self, g: &ProductElement) -> Option<Vec<usize>> {
        if g.len() != self.n {
            return None;
        }
        let coords = g.coords();
        let mut out = Vec::with_capacity(self.ell());
        for class in &self.classes {
            let v = coords[class[0]];
            if class.iter().any(|&i| coords[i] != v) {
                return None;
            }
            out.push(v);
        }
        Some(out)
    }
}

pub fn pattern_partition(gens: &[ProductElement]) -> Result<PatternPartition> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    let n = first.len();
    if let Some(bad) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    let t = gens.len();
    let mut pattern = Vec::with_capacity(n * t);
    for i in 0..n {
        pattern.extend(gens.iter().map(|g| g.coords()[i]));
    }
    let mut ids: HashMap<&[usize], usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(n);
    for i in 0..n {
        let key = &pattern[i * t..(i + 1) * t];
        let id = *ids.entry(key).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[id].push(i);
        class_of.push(id);
    }
    let d_min = classes.iter().map(Vec::len).min().unwrap_or(0);
    Ok(PatternPartition {
        n,
        t,
        pattern,
        classes,
        class_of,
        d_min,
    })
}

/// `|H̃| = |K|^ℓ`, exactly.
pub fn htilde_order(p: &PatternPartition, k: &BaseGroup) -> BigUint {
    BigUint::from(k.order()).pow(p.ell() as u32)
}

/// Number of non-identity coordinates.
pub fn support(g: &ProductElement) -> usize {
    g.coords().iter().filter(|&&c| c != 0).count()
}

/// `d_min`, a lower bound on the support of every non-identity element of the
/// group generated by the partition's generators.
pub fn support_lower_bound(p: &PatternPartition) -> usize {
    p.d_min()
}

/// `|g^{K^n}| = Π |g_i^K|`.
pub fn conjugacy_class_size(g: &ProductElement, k: &BaseGroup) -> BigUint {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for &c in g.coords() {
        *counts.entry(k.class_size(c)).or_default() += 1;
    }
    counts
        .into_iter()
        .fold(BigUint::from(1u32), |acc, (size, e)| {
            acc * BigUint::from(size).pow(e)
        })
}
