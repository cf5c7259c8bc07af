//! Exact integer character sums.
//!
//! Every character value of a finite group is a sum of `N`-th roots of unity,
//! `N` the group exponent. For a prime `p ≡ 1 (mod N)` the map `ζ_N ↦ w`
//! (with `w` of multiplicative order `N` in `F_p`) is a ring map
//! `Z[ζ_N] → F_p`, so any character sum known to be an integer in `[0, B]`
//! can be evaluated modulo enough such primes and recovered by CRT. This keeps
//! trivial-multiplicity counts exact when `Π d_j` is far past 2^53.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::BaseGroup;

const RESIDUE_LIMIT: f64 = 1e-6;
const CACHED_PRIMES: usize = 4;

/// A prime `p ≡ 1 (mod N)` with every catalog character reduced into `F_p`.
#[derive(Debug, Clone)]
pub(crate) struct ModularTable {
    p: u64,
    /// `values[irrep][element]`
    values: Vec<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub(crate) struct ExactCharacters {
    exponent: u64,
    /// `roots[irrep][element]`: eigenvalues of ρ(g) as `(a, count)` meaning
    /// `count` copies of `ζ_N^a`.
    roots: Vec<Vec<Vec<(u64, u64)>>>,
    tables: Vec<ModularTable>,
}

impl ExactCharacters {
    /// Decomposes every character value into roots of unity, checking each
    /// eigenvalue count against the rounding residue limit.
    pub(crate) fn new(k: &BaseGroup, characters: &[&[Complex64]]) -> Result<Self> {
        let exponent = k.exponent() as u64;
        let mut roots = Vec::with_capacity(characters.len());
        for (idx, chi) in characters.iter().enumerate() {
            let mut per_element = Vec::with_capacity(k.order());
            for g in 0..k.order() {
                let o = k.element_order(g);
                let powers: Vec<Complex64> = (0..o).map(|j| chi[k.pow(g, j)]).collect();
                let mut eig = Vec::new();
                let mut total = 0u64;
                for b in 0..o {
                    let s: Complex64 = powers
                        .iter()
                        .enumerate()
                        .map(|(j, v)| {
                            let theta = -2.0 * std::f64::consts::PI * (b * j) as f64 / o as f64;
                            v * Complex64::from_polar(1.0, theta)
                        })
                        .sum::<Complex64>()
                        / o as f64;
                    let r = s.re.round();
                    let residue = (s - Complex64::new(r, 0.0)).norm();
                    if residue > RESIDUE_LIMIT || r < 0.0 {
                        return Err(Error::ResidueTooLarge {
                            what: format!("eigenvalue count of irrep {idx} at {}", k.label(g)),
                            residue,
                        });
                    }
                    if r > 0.0 {
                        eig.push((b as u64 * (exponent / o as u64), r as u64));
                        total += r as u64;
                    }
                }
                if (total as f64 - chi[0].re).abs() > 0.5 {
                    return Err(Error::ResidueTooLarge {
                        what: format!("eigenvalue total of irrep {idx}"),
                        residue: (total as f64 - chi[0].re).abs(),
                    });
                }
                per_element.push(eig);
            }
            roots.push(per_element);
        }
        let mut exact = ExactCharacters {
            exponent,
            roots,
            tables: Vec::new(),
        };
        exact.tables = primes_congruent_one(exponent, CACHED_PRIMES, u64::MAX)
            .into_iter()
            .map(|p| exact.reduce(p))
            .collect();
        Ok(exact)
    }

    fn reduce(&self, p: u64) -> ModularTable {
        let w = root_of_unity(p, self.exponent);
        let values = self
            .roots
            .iter()
            .map(|per_element| {
                per_element
                    .iter()
                    .map(|eig| {
                        eig.iter().fold(0u64, |acc, &(a, c)| {
                            add_mod(acc, mul_mod(c % p, pow_mod(w, a, p), p), p)
                        })
                    })
                    .collect()
            })
            .collect();
        ModularTable { p, values }
    }

    fn tables_for(&self, bound: &BigUint) -> Vec<std::borrow::Cow<'_, ModularTable>> {
        let mut out = Vec::new();
        let mut modulus = BigUint::one();
        for t in &self.tables {
            if &modulus > bound {
                return out;
            }
            modulus *= t.p;
            out.push(std::borrow::Cow::Borrowed(t));
        }
        let mut below = self.tables.last().map_or(u64::MAX, |t| t.p);
        while &modulus <= bound {
            let p = primes_congruent_one(self.exponent, 1, below)[0];
            below = p;
            modulus *= p;
            out.push(std::borrow::Cow::Owned(self.reduce(p)));
        }
        out
    }

    /// Computes `(1/|E|) Σ_{e ∈ E} Π_c Π_{(σ, m) ∈ blocks[c]} χ_σ(e_c)^m`
    /// exactly, where `E = elements` is a finite group given by length-ℓ
    /// coordinate vectors and the value is known to lie in `[0, bound]`.
    pub(crate) fn trivial_multiplicity(
        &self,
        blocks: &[Vec<(usize, u32)>],
        elements: &[Vec<usize>],
        bound: &BigUint,
    ) -> Result<BigUint> {
        let order = elements.len() as u64;
        let mut residues = Vec::new();
        for table in self.tables_for(bound) {
            let p = table.p;
            let psi: Vec<Vec<u64>> = blocks
                .iter()
                .map(|block| {
                    (0..table.values.first().map_or(0, Vec::len))
                        .map(|a| {
                            block.iter().fold(1u64, |acc, &(sigma, m)| {
                                mul_mod(acc, pow_mod(table.values[sigma][a], m as u64, p), p)
                            })
                        })
                        .collect()
                })
                .collect();
            let sum = elements.iter().fold(0u64, |acc, e| {
                let term = e
                    .iter()
                    .zip(&psi)
                    .fold(1u64, |t, (&a, row)| mul_mod(t, row[a], p));
                add_mod(acc, term, p)
            });
            let inv = pow_mod(order % p, p - 2, p);
            residues.push((mul_mod(sum, inv, p), p));
        }
        let value = crt(&residues);
        if &value > bound {
            return Err(Error::ResidueTooLarge {
                what: "exact multiplicity exceeds its dimension bound".into(),
                residue: f64::INFINITY,
            });
        }
        Ok(value)
    }
}

fn crt(residues: &[(u64, u64)]) -> BigUint {
    let mut x = BigUint::zero();
    let mut m = BigUint::one();
    for &(r, p) in residues {
        let x_mod = (&x % p).iter_u64_digits().next().unwrap_or(0);
        let m_mod = (&m % p).iter_u64_digits().next().unwrap_or(0);
        let diff = add_mod(r, p - x_mod % p, p);
        let t = mul_mod(diff, pow_mod(m_mod, p - 2, p), p);
        x += &m * t;
        m *= p;
    }
    x
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The `count` largest primes `p < min(below, 2^62)` with `p ≡ 1 (mod n)`.
fn primes_congruent_one(n: u64, count: usize, below: u64) -> Vec<u64> {
    let ceiling = below.min(1 << 62);
    let mut q = (ceiling - 2) / n;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = q * n + 1;
        if p < ceiling && is_prime(p) {
            out.push(p);
        }
        q -= 1;
    }
    out
}

/// An element of multiplicative order exactly `n` in `F_p`.
fn root_of_unity(p: u64, n: u64) -> u64 {
    let factors = prime_factors(n);
    (2..p)
        .map(|c| pow_mod(c, (p - 1) / n, p))
        .find(|&w| factors.iter().all(|&f| pow_mod(w, n / f, p) != 1))
        .expect("p ≡ 1 (mod n) has a primitive n-th root")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_roots() {
        for n in [1u64, 2, 6, 10, 12, 14, 60] {
            for p in primes_congruent_one(n, 3, u64::MAX) {
                assert!(is_prime(p));
                assert_eq!((p - 1) % n, 0);
                let w = root_of_unity(p, n);
                assert_eq!(pow_mod(w, n, p), 1);
            }
        }
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime((1u64 << 61) - 1));
    }

    #[test]
    fn crt_recovers_large_values() {
        let ps = primes_congruent_one(6, 3, u64::MAX);
        let target = BigUint::from(3u32).pow(100);
        let residues: Vec<(u64, u64)> = ps
            .iter()
            .map(|&p| ((&target % p).iter_u64_digits().next().unwrap_or(0), p))
            .collect();
        assert_eq!(crt(&residues), target);
    }
}
