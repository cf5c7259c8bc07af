//! Finite base groups as explicit multiplication tables, coordinatewise
//! arithmetic in `K^n`, and subgroup enumeration by closure.
//!
//! Every catalog group is realized as a group of permutations, expanded to a
//! full table at build time and checked exhaustively against the group
//! axioms. Element 0 is always the identity.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::product::{pattern_partition, PatternPartition};

/// Closure size beyond which [`subgroup_closure`] gives up.
pub const DEFAULT_CLOSURE_CAP: usize = 200_000;

/// Largest parameter accepted for the `Z<m>` and `D<m>` families.
pub const MAX_FAMILY_PARAMETER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cyclic(usize),
    Symmetric(usize),
    Dihedral(usize),
}

#[derive(Debug, Clone)]
pub struct BaseGroup {
    name: String,
    family: Family,
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    labels: Vec<String>,
    perms: Vec<Vec<usize>>,
    element_orders: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    center: Vec<usize>,
}

impl BaseGroup {
    /// Builds a group from a list of distinct permutations closed under
    /// composition, with the identity first. `mul[g][h]` is `g ∘ h`.
    fn from_permutations(
        name: String,
        family: Family,
        perms: Vec<Vec<usize>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let order = perms.len();
        let index: HashMap<&[usize], usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        if index.len() != order {
            return Err(Error::InvalidGroup(format!("{name}: repeated elements")));
        }
        let mut mul = vec![0; order * order];
        for (g, pg) in perms.iter().enumerate() {
            for (h, ph) in perms.iter().enumerate() {
                let composed: Vec<usize> = ph.iter().map(|&x| pg[x]).collect();
                mul[g * order + h] = *index.get(composed.as_slice()).ok_or_else(|| {
                    Error::InvalidGroup(format!("{name}: not closed under composition"))
                })?;
            }
        }
        let mut inv = vec![usize::MAX; order];
        for g in 0..order {
            inv[g] = (0..order)
                .find(|&h| mul[g * order + h] == 0)
                .ok_or_else(|| {
                    Error::InvalidGroup(format!("{name}: element {g} has no inverse"))
                })?;
        }
        let mut group = BaseGroup {
            name,
            family,
            order,
            mul,
            inv,
            labels,
            perms,
            element_orders: Vec::new(),
            classes: Vec::new(),
            class_of: Vec::new(),
            center: Vec::new(),
        };
        group.check_axioms()?;
        group.element_orders = (0..order).map(|g| group.element_order_slow(g)).collect();
        group.compute_classes();
        Ok(group)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.order;
        for g in 0..n {
            if self.mul(0, g) != g || self.mul(g, 0) != g {
                return Err(Error::InvalidGroup(format!(
                    "{}: element 0 is not a two-sided identity",
                    self.name
                )));
            }
            if self.mul(g, self.inv[g]) != 0 || self.mul(self.inv[g], g) != 0 {
                return Err(Error::InvalidGroup(format!(
                    "{}: inverse of {g} is not two-sided",
                    self.name
                )));
            }
            for h in 0..n {
                let gh = self.mul(g, h);
                for k in 0..n {
                    if self.mul(gh, k) != self.mul(g, self.mul(h, k)) {
                        return Err(Error::InvalidGroup(format!(
                            "{}: associativity fails at ({g}, {h}, {k})",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn element_order_slow(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    fn compute_classes(&mut self) {
        let n = self.order;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            for x in 0..n {
                let c = self.conjugate(x, g);
                if class_of[c] == usize::MAX {
                    class_of[c] = id;
                    members.push(c);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        self.center = (0..n)
            .filter(|&z| (0..n).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect();
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g * self.order + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    /// `x g x⁻¹`.
    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(x, g), self.inv[x])
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        self.element_orders[g]
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        self.element_orders.iter().fold(1, |acc, &o| lcm(acc, o))
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The permutation realizing element `g`.
    pub fn permutation(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn class_size(&self, g: usize) -> usize {
        self.classes[self.class_of[g]].len()
    }

    pub fn center(&self) -> &[usize] {
        &self.center
    }

    pub fn is_abelian(&self) -> bool {
        self.center.len() == self.order
    }

    pub fn has_trivial_center(&self) -> bool {
        self.center.len() == 1
    }

    /// Nonabelian with trivial center: the base groups the resistance
    /// constructions are stated for.
    pub fn is_admissible_base(&self) -> bool {
        !self.is_abelian() && self.has_trivial_center()
    }
}

impl fmt::Display for BaseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Parses a catalog identifier (`Z<m>`, `S3`, `S4`, `D<m>`) and builds the group.
pub fn build_base_group(spec: &str) -> Result<BaseGroup> {
    let spec = spec.trim();
    let malformed = |reason: &str| Error::MalformedParameter {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let (head, tail) = spec.split_at(spec.chars().next().map_or(0, char::len_utf8));
    if !matches!(head, "Z" | "S" | "D") {
        return Err(Error::UnknownGroup(spec.to_string()));
    }
    let m: usize = tail
        .parse()
        .map_err(|_| malformed("expected a decimal parameter"))?;
    match head {
        "Z" => {
            if m == 0 || m > MAX_FAMILY_PARAMETER {
                return Err(malformed("cyclic order must be in 1..=64"));
            }
            cyclic(m)
        }
        "S" => match m {
            3 | 4 => symmetric(m),
            _ => Err(Error::UnknownGroup(spec.to_string())),
        },
        "D" => {
            if !(3..=MAX_FAMILY_PARAMETER).contains(&m) {
                return Err(malformed("dihedral parameter must be in 3..=64"));
            }
            dihedral(m)
        }
        _ => unreachable!(),
    }
}

fn cyclic(m: usize) -> Result<BaseGroup> {
    let perms = (0..m)
        .map(|k| (0..m).map(|x| (x + k) % m).collect())
        .collect();
    let labels = (0..m).map(|k| k.to_string()).collect();
    BaseGroup::from_permutations(format!("Z{m}"), Family::Cyclic(m), perms, labels)
}

/// Elements `s^f r^k` stored at index `f·m + k`, acting on the m-gon as
/// `x ↦ (−1)^f (x + k)`.
fn dihedral(m: usize) -> Result<BaseGroup> {
    let mut perms = Vec::with_capacity(2 * m);
    let mut labels = Vec::with_capacity(2 * m);
    for f in 0..2 {
        for k in 0..m {
            perms.push(
                (0..m)
                    .map(|x| {
                        let y = (x + k) % m;
                        if f == 0 {
                            y
                        } else {
                            (m - y) % m
                        }
                    })
                    .collect(),
            );
            let r = match k {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r^{k}"),
            };
            labels.push(match (f, r.is_empty()) {
                (0, true) => "e".to_string(),
                (0, false) => r,
                (_, _) => format!("s{r}"),
            });
        }
    }
    BaseGroup::from_permutations(format!("D{m}"), Family::Dihedral(m), perms, labels)
}

/// All permutations of `m` points ordered by (element order, lexicographic),
/// so S3 lists the identity, the three transpositions, then the 3-cycles.
fn symmetric(m: usize) -> Result<BaseGroup> {
    let mut perms = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    permutations(&mut current, 0, &mut perms);
    let mut keyed: Vec<(usize, Vec<usize>)> = perms
        .into_iter()
        .map(|p| (permutation_order(&p), p))
        .collect();
    keyed.sort();
    let labels = keyed.iter().map(|(_, p)| cycle_notation(p)).collect();
    let perms = keyed.into_iter().map(|(_, p)| p).collect();
    BaseGroup::from_permutations(format!("S{m}"), Family::Symmetric(m), perms, labels)
}

fn permutations(current: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == current.len() {
        out.push(current.clone());
        return;
    }
    for i in start..current.len() {
        current.swap(start, i);
        permutations(current, start + 1, out);
        current.swap(start, i);
    }
}

fn permutation_order(p: &[usize]) -> usize {
    cycles(p).iter().fold(1, |acc, c| lcm(acc, c.len()))
}

fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = p[x];
        }
        out.push(cycle);
    }
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let parts: Vec<String> = cycles(p)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let inner: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            format!("({})", inner.join(" "))
        })
        .collect();
    if parts.is_empty() {
        "()".to_string()
    } else {
        parts.concat()
    }
}

/// An element of `K^n`: one base-element index per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductElement(Vec<usize>);

impl ProductElement {
    pub fn new(coords: Vec<usize>) -> Self {
        ProductElement(coords)
    }

    /// Checks every coordinate against the order of `k`.
    pub fn checked(coords: Vec<usize>, k: &BaseGroup) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= k.order()) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {bad} out of range for {} (order {})",
                k.name(),
                k.order()
            )));
        }
        Ok(ProductElement(coords))
    }

    pub fn identity(n: usize) -> Self {
        ProductElement(vec![0; n])
    }

    /// The diagonal element `(g, …, g)`.
    pub fn diagonal(g: usize, n: usize) -> Self {
        ProductElement(vec![g; n])
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

pub fn product_mul(
    a: &ProductElement,
    b: &ProductElement,
    k: &BaseGroup,
) -> Result<ProductElement> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(ProductElement(
        a.0.iter().zip(&b.0).map(|(&x, &y)| k.mul(x, y)).collect(),
    ))
}

pub fn product_inv(a: &ProductElement, k: &BaseGroup) -> ProductElement {
    ProductElement(a.0.iter().map(|&x| k.inv(x)).collect())
}

pub fn uniform_product_element<R: Rng + ?Sized>(
    k: &BaseGroup,
    n: usize,
    rng: &mut R,
) -> ProductElement {
    ProductElement((0..n).map(|_| rng.gen_range(0..k.order())).collect())
}

/// An explicitly enumerated subgroup of `K^n`.
///
/// Elements are stored compressed to one coordinate per pattern class of the
/// generators: every element of the closure is constant on those classes.
#[derive(Debug, Clone)]
pub struct SubgroupEnum {
    generators: Vec<ProductElement>,
    partition: PatternPartition,
    elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SubgroupEnum {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[ProductElement] {
        &self.generators
    }

    pub fn partition(&self) -> &PatternPartition {
        &self.partition
    }

    /// Ambient length `n`.
    pub fn n(&self) -> usize {
        self.partition.n()
    }

    /// Elements as length-ℓ vectors, one coordinate per pattern class.
    pub fn compressed(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn expand(&self, compressed: &[usize]) -> ProductElement {
        ProductElement(
            self.partition
                .class_of()
                .iter()
                .map(|&c| compressed[c])
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = ProductElement> + '_ {
        self.elements.iter().map(|e| self.expand(e))
    }

    pub fn contains(&self, g: &ProductElement) -> bool {
        if g.len() != self.n() {
            return false;
        }
        match self.partition.compress(g) {
            Some(c) => self.index.contains_key(&c),
            None => false,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Closure {
    Complete(SubgroupEnum),
    CapExceeded { cap: usize },
}

impl Closure {
    pub fn complete(self) -> Option<SubgroupEnum> {
        match self {
            Closure::Complete(h) => Some(h),
            Closure::CapExceeded { .. } => None,
        }
    }
}

/// Breadth-first closure of `gens` under multiplication by the generators and
/// their inverses. The walk runs inside `H̃ ≅ K^ℓ`, hashing length-ℓ vectors.
pub fn subgroup_closure(k: &BaseGroup, gens: &[ProductElement], cap: usize) -> Result<Closure> {
    let partition = pattern_partition(gens)?;
    if cap == 0 {
        return Err(Error::InvalidParameter(
            "closure cap must be positive".into(),
        ));
    }
    let mut steps: Vec<Vec<usize>> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        let c = partition
            .compress(g)
            .expect("generators are constant on their own pattern classes");
        let ci: Vec<usize> = c.iter().map(|&x| k.inv(x)).collect();
        steps.push(c);
        steps.push(ci);
    }
    steps.sort();
    steps.dedup();

    let identity = vec![0; partition.ell()];
    let mut index = HashMap::new();
    let mut elements = vec![identity.clone()];
    index.insert(identity, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in &steps {
            let next: Vec<usize> = elements[i]
                .iter()
                .zip(s)
                .map(|(&x, &y)| k.mul(x, y))
                .collect();
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() == cap {
                return Ok(Closure::CapExceeded { cap });
            }
            index.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    Ok(Closure::Complete(SubgroupEnum {
        generators: gens.to_vec(),
        partition,
        elements,
        index,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn class_sizes(k: &BaseGroup) -> Vec<usize> {
        let mut s: Vec<usize> = k.classes().iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn s3_structure() {
        let k = build_base_group("S3").unwrap();
        assert_eq!(k.order(), 6);
        assert_eq!(k.center(), &[0]);
        assert_eq!(k.classes().len(), 3);
        // identity, three transpositions, two 3-cycles
        assert_eq!(k.classes()[0], vec![0]);
        assert_eq!(k.classes()[1], vec![1, 2, 3]);
        assert_eq!(k.classes()[2], vec![4, 5]);
        assert_eq!(k.label(0), "()");
        assert!(k.is_admissible_base());
    }

    #[test]
    fn z2_and_d5() {
        let z2 = build_base_group("Z2").unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(z2.center().len(), 2);
        assert!(!z2.is_admissible_base());

        let d5 = build_base_group("D5").unwrap();
        assert_eq!(d5.order(), 10);
        assert_eq!(d5.center(), &[0]);
        assert_eq!(class_sizes(&d5), vec![1, 2, 2, 5]);
        assert!(d5.is_admissible_base());

        let d6 = build_base_group("D6").unwrap();
        assert_eq!(d6.center().len(), 2);
        assert!(!d6.is_admissible_base());
    }

    #[test]
    fn s4_classes() {
        let s4 = build_base_group("S4").unwrap();
        assert_eq!(class_sizes(&s4), vec![1, 3, 6, 6, 8]);
        assert_eq!(s4.exponent(), 12);
    }

    #[test]
    fn bad_identifiers() {
        assert!(matches!(
            build_base_group("Q8"),
            Err(Error::UnknownGroup(_))
        ));
        assert!(matches!(
            build_base_group("S5"),
            Err(Error::UnknownGroup(_))
        ));
        assert!(matches!(
            build_base_group("Zx"),
            Err(Error::MalformedParameter { .. })
        ));
        assert!(matches!(
            build_base_group("D2"),
            Err(Error::MalformedParameter { .. })
        ));
        assert!(matches!(
            build_base_group("Z0"),
            Err(Error::MalformedParameter { .. })
        ));
        assert!(build_base_group("").is_err());
    }

    #[test]
    fn product_arithmetic() {
        let k = build_base_group("S3").unwrap();
        let b = ProductElement::new(vec![3, 4, 5]);
        let e = ProductElement::identity(3);
        assert_eq!(product_mul(&e, &b, &k).unwrap(), b);
        assert_eq!(product_mul(&b, &product_inv(&b, &k), &k).unwrap(), e);

        let single = product_mul(
            &ProductElement::new(vec![1]),
            &ProductElement::new(vec![4]),
            &k,
        )
        .unwrap();
        assert_eq!(single.coords(), &[k.mul(1, 4)]);

        // (τ, σ)·(τ, σ⁻¹) = (τ², 1) = (1, 1) since τ is an involution.
        let (tau, sigma) = (1, 4);
        let lhs = ProductElement::new(vec![tau, sigma]);
        let rhs = ProductElement::new(vec![tau, k.inv(sigma)]);
        assert_eq!(
            product_mul(&lhs, &rhs, &k).unwrap(),
            ProductElement::identity(2)
        );
        // and not for a 3-cycle in the first slot
        let lhs = ProductElement::new(vec![sigma, sigma]);
        let rhs = ProductElement::new(vec![sigma, k.inv(sigma)]);
        assert_ne!(
            product_mul(&lhs, &rhs, &k).unwrap(),
            ProductElement::identity(2)
        );

        assert!(matches!(
            product_mul(&e, &ProductElement::identity(2), &k),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn closures() {
        let k = build_base_group("S3").unwrap();
        let h = subgroup_closure(&k, &[ProductElement::identity(3)], 10)
            .unwrap()
            .complete()
            .unwrap();
        assert_eq!(h.order(), 1);

        let h = subgroup_closure(&k, &[ProductElement::new(vec![1])], 10)
            .unwrap()
            .complete()
            .unwrap();
        assert_eq!(h.order(), 2);

        let h = subgroup_closure(&k, &[ProductElement::new(vec![2, 2])], 10)
            .unwrap()
            .complete()
            .unwrap();
        assert_eq!(h.order(), 2);
        assert!(h.contains(&ProductElement::new(vec![2, 2])));
        assert!(h.contains(&ProductElement::identity(2)));
        assert!(!h.contains(&ProductElement::new(vec![2, 0])));

        let full = subgroup_closure(
            &k,
            &[
                ProductElement::new(vec![1, 0]),
                ProductElement::new(vec![4, 0]),
                ProductElement::new(vec![0, 1]),
                ProductElement::new(vec![0, 4]),
            ],
            1000,
        )
        .unwrap()
        .complete()
        .unwrap();
        assert_eq!(full.order(), 36);

        let capped = subgroup_closure(
            &k,
            &[
                ProductElement::new(vec![1, 0]),
                ProductElement::new(vec![4, 0]),
            ],
            5,
        )
        .unwrap();
        assert!(matches!(capped, Closure::CapExceeded { cap: 5 }));
        assert!(matches!(
            subgroup_closure(&k, &[], 5),
            Err(Error::EmptyGenerators)
        ));
    }

    #[test]
    fn uniform_elements() {
        let k = build_base_group("S3").unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(
            uniform_product_element(&k, 12, &mut a),
            uniform_product_element(&k, 12, &mut b)
        );

        let z1 = build_base_group("Z1").unwrap();
        assert!(uniform_product_element(&z1, 9, &mut a).is_identity());

        let mut counts = [0usize; 6];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..60_000 {
            counts[uniform_product_element(&k, 1, &mut rng).coords()[0]] += 1;
        }
        let sd = (60_000.0_f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 4.0 * sd, "count {c}");
        }
    }
}
