//! Generalized cyclotomic classes of order two for the moduli p^i q^j,
//! 2p^i q^j, p^i, 2p^i, q^j and 2q^j, and the partition of Z_{2p^m q^n}
//! they induce.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::numtheory::{euler_phi, gcd, mul_mod, pow_mod, split_power, SystemConstants};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomyError {
    #[error("index {index} is not covered by the partition")]
    Unlabeled { index: u64 },
    #[error("index {index} is labeled by both {first} and {second}")]
    DoublyLabeled {
        index: u64,
        first: ClassId,
        second: ClassId,
    },
    #[error("class {class} has {found} elements, expected {expected}")]
    WrongCardinality {
        class: ClassId,
        found: usize,
        expected: u64,
    },
    #[error("exponents out of range for {0:?}")]
    BadShape(Shape),
    #[error("2 is not a unit modulo {0}")]
    TwoNotUnit(u64),
}

/// Which modulus a class lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Shape {
    /// p^i q^j
    PQ { i: u32, j: u32 },
    /// 2 p^i q^j
    TwoPQ { i: u32, j: u32 },
    /// p^i
    P { i: u32 },
    /// 2 p^i
    TwoP { i: u32 },
    /// q^j
    Q { j: u32 },
    /// 2 q^j
    TwoQ { j: u32 },
}

impl Shape {
    /// True for the even moduli; their scaled classes fill the odd
    /// positions of the period.
    pub fn is_doubled(self) -> bool {
        matches!(
            self,
            Shape::TwoPQ { .. } | Shape::TwoP { .. } | Shape::TwoQ { .. }
        )
    }

    /// The odd modulus sharing this shape's exponents.
    pub fn odd(self) -> Shape {
        match self {
            Shape::TwoPQ { i, j } => Shape::PQ { i, j },
            Shape::TwoP { i } => Shape::P { i },
            Shape::TwoQ { j } => Shape::Q { j },
            s => s,
        }
    }

    pub fn doubled(self) -> Shape {
        match self {
            Shape::PQ { i, j } => Shape::TwoPQ { i, j },
            Shape::P { i } => Shape::TwoP { i },
            Shape::Q { j } => Shape::TwoQ { j },
            s => s,
        }
    }

    /// `(i, j)` exponents, 0 where the prime is absent.
    pub fn exponents(self) -> (u32, u32) {
        match self {
            Shape::PQ { i, j } | Shape::TwoPQ { i, j } => (i, j),
            Shape::P { i } | Shape::TwoP { i } => (i, 0),
            Shape::Q { j } | Shape::TwoQ { j } => (0, j),
        }
    }

    /// Builds the odd shape for exponents `(i, j)`, at least one positive.
    pub fn from_exponents(i: u32, j: u32) -> Option<Shape> {
        match (i, j) {
            (0, 0) => None,
            (i, 0) => Some(Shape::P { i }),
            (0, j) => Some(Shape::Q { j }),
            (i, j) => Some(Shape::PQ { i, j }),
        }
    }

    pub fn modulus(self, c: &SystemConstants) -> u64 {
        let (i, j) = self.exponents();
        let odd = c.p_pow(i) * c.q_pow(j);
        if self.is_doubled() {
            2 * odd
        } else {
            odd
        }
    }

    /// Multiplier taking this shape's classes into Z_{2p^m q^n}:
    /// `p^{m-i} q^{n-j}` with a missing prime contributing its full power.
    pub fn cofactor(self, c: &SystemConstants) -> u64 {
        let (i, j) = self.exponents();
        c.p_pow(c.m - i) * c.q_pow(c.n - j)
    }

    fn valid_for(self, c: &SystemConstants) -> bool {
        let (i, j) = self.exponents();
        let i_ok = i <= c.m;
        let j_ok = j <= c.n;
        let nonzero = match self {
            Shape::PQ { i, j } | Shape::TwoPQ { i, j } => i >= 1 && j >= 1,
            Shape::P { i } | Shape::TwoP { i } => i >= 1,
            Shape::Q { j } | Shape::TwoQ { j } => j >= 1,
        };
        i_ok && j_ok && nonzero
    }

    /// Every shape used by a system, in a fixed order.
    pub fn all(m: u32, n: u32) -> Vec<Shape> {
        let mut out = Vec::new();
        for i in 1..=m {
            for j in 1..=n {
                out.push(Shape::PQ { i, j });
                out.push(Shape::TwoPQ { i, j });
            }
        }
        for i in 1..=m {
            out.push(Shape::P { i });
            out.push(Shape::TwoP { i });
        }
        for j in 1..=n {
            out.push(Shape::Q { j });
            out.push(Shape::TwoQ { j });
        }
        out
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Shape::PQ { i, j } => write!(f, "p^{i}q^{j}"),
            Shape::TwoPQ { i, j } => write!(f, "2p^{i}q^{j}"),
            Shape::P { i } => write!(f, "p^{i}"),
            Shape::TwoP { i } => write!(f, "2p^{i}"),
            Shape::Q { j } => write!(f, "q^{j}"),
            Shape::TwoQ { j } => write!(f, "2q^{j}"),
        }
    }
}

/// A class `D_h` of a given shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassId {
    pub shape: Shape,
    pub h: u8,
}

impl ClassId {
    pub fn new(shape: Shape, h: u8) -> Self {
        debug_assert!(h < 2);
        ClassId { shape, h }
    }

    /// Symbol bucket of the scaled class inside the partition.
    pub fn bucket(self) -> Bucket {
        match (self.shape.is_doubled(), self.h) {
            (true, 0) => Bucket::A,
            (true, _) => Bucket::B,
            (false, 0) => Bucket::C,
            (false, _) => Bucket::D,
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D_{}^({})", self.h, self.shape)
    }
}

/// The six parts of the period that receive one symbol each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Bucket {
    /// Scaled `D_0` of the even moduli.
    A,
    /// Scaled `D_1` of the even moduli.
    B,
    /// Doubled and scaled `D_0` of the odd moduli.
    C,
    /// Doubled and scaled `D_1` of the odd moduli.
    D,
    /// Index 0.
    Zero,
    /// Index p^m q^n.
    Half,
}

impl Bucket {
    pub const SYMBOL_BUCKETS: [Bucket; 4] = [Bucket::A, Bucket::B, Bucket::C, Bucket::D];
}

/// Label of one index of Z_{2p^m q^n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellLabel {
    Zero,
    Half,
    Class(ClassId),
}

impl CellLabel {
    pub fn bucket(self) -> Bucket {
        match self {
            CellLabel::Zero => Bucket::Zero,
            CellLabel::Half => Bucket::Half,
            CellLabel::Class(id) => id.bucket(),
        }
    }
}

/// Constants plus every class set and the partition label array.
#[derive(Debug, Clone)]
pub struct CyclotomicSystem {
    constants: SystemConstants,
    classes: BTreeMap<ClassId, Vec<u64>>,
    partition: Vec<CellLabel>,
}

impl CyclotomicSystem {
    pub fn new(constants: SystemConstants) -> Result<Self, CyclotomyError> {
        let mut classes = BTreeMap::new();
        for shape in Shape::all(constants.m, constants.n) {
            for h in 0..2 {
                let set = build_class(&constants, shape, h)?;
                let expected = euler_phi(shape.modulus(&constants)) / 2;
                if set.len() as u64 != expected {
                    return Err(CyclotomyError::WrongCardinality {
                        class: ClassId::new(shape, h),
                        found: set.len(),
                        expected,
                    });
                }
                classes.insert(ClassId::new(shape, h), set);
            }
        }
        let mut system = CyclotomicSystem {
            constants,
            classes,
            partition: Vec::new(),
        };
        system.partition = build_partition(&system)?;
        Ok(system)
    }

    pub fn constants(&self) -> &SystemConstants {
        &self.constants
    }

    /// Sorted elements of `D_h` for the given shape.
    pub fn class(&self, id: ClassId) -> Result<&[u64], CyclotomyError> {
        self.classes
            .get(&id)
            .map(Vec::as_slice)
            .ok_or(CyclotomyError::BadShape(id.shape))
    }

    pub fn contains(&self, id: ClassId, x: u64) -> bool {
        self.class(id)
            .map(|set| set.binary_search(&x).is_ok())
            .unwrap_or(false)
    }

    /// Which class of `shape` holds the unit `x` (reduced mod the shape's
    /// modulus), or `None` when `x` is not a unit.
    pub fn side_of(&self, shape: Shape, x: u64) -> Option<u8> {
        let r = x % shape.modulus(&self.constants);
        (0..2).find(|&h| self.contains(ClassId::new(shape, h), r))
    }

    pub fn classes(&self) -> impl Iterator<Item = (ClassId, &[u64])> {
        self.classes.iter().map(|(id, v)| (*id, v.as_slice()))
    }

    pub fn partition(&self) -> &[CellLabel] {
        &self.partition
    }

    pub fn label(&self, index: u64) -> CellLabel {
        self.partition[index as usize]
    }

    /// `cofactor * D_h mod modulus * cofactor`: the class scaled into
    /// Z_{2p^m q^n} for even shapes, or into Z_{p^m q^n} for odd shapes.
    pub fn h_set(&self, id: ClassId) -> Result<Vec<u64>, CyclotomyError> {
        let c = &self.constants;
        let cof = id.shape.cofactor(c);
        let modulus = if id.shape.is_doubled() {
            c.period()
        } else {
            c.half_period()
        };
        let mut out: Vec<u64> = self.class(id)?.iter().map(|&x| x * cof % modulus).collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Elements of Z_{2p^m q^n} occupied by a class in the partition:
    /// `H_h` for even shapes and `2 H_h` for odd shapes.
    pub fn partition_cells(&self, id: ClassId) -> Result<Vec<u64>, CyclotomyError> {
        let c = &self.constants;
        let period = c.period();
        let scale = id.shape.cofactor(c) * if id.shape.is_doubled() { 1 } else { 2 };
        let mut out: Vec<u64> = self
            .class(id)?
            .iter()
            .map(|&x| x * scale % period)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Sorted union of all partition cells falling into `bucket`.
    pub fn bucket_set(&self, bucket: Bucket) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .partition
            .iter()
            .enumerate()
            .filter(|(_, l)| l.bucket() == bucket)
            .map(|(i, _)| i as u64)
            .collect();
        out.sort_unstable();
        out
    }
}

/// `D_h` for one shape, sorted.
///
/// For the composite moduli the class is `{g^{2t} y^k}` with
/// `0 <= t < d_ij/2`, `0 <= k < e_ij`, times `g^h`. For prime powers it is
/// the coset `g^h <g^2>`.
pub fn build_class(c: &SystemConstants, shape: Shape, h: u8) -> Result<Vec<u64>, CyclotomyError> {
    if !shape.valid_for(c) {
        return Err(CyclotomyError::BadShape(shape));
    }
    let modulus = shape.modulus(c);
    let shift = pow_mod(c.g, h as u64, modulus);
    let g2 = mul_mod(c.g, c.g, modulus);
    let mut out = Vec::new();
    match shape {
        Shape::PQ { i, j } | Shape::TwoPQ { i, j } => {
            let half_d = c.d(i, j) / 2;
            let y = c.y % modulus;
            let mut yk = 1u64;
            for _ in 0..c.e(i, j) {
                let mut x = mul_mod(yk, shift, modulus);
                for _ in 0..half_d {
                    out.push(x);
                    x = mul_mod(x, g2, modulus);
                }
                yk = mul_mod(yk, y, modulus);
            }
        }
        _ => {
            let half = euler_phi(modulus) / 2;
            let mut x = shift;
            for _ in 0..half {
                out.push(x);
                x = mul_mod(x, g2, modulus);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Labels every index of Z_{2p^m q^n} by the class whose scaled image
/// contains it. Fails if an index is covered twice or not at all.
pub fn build_partition(system: &CyclotomicSystem) -> Result<Vec<CellLabel>, CyclotomyError> {
    let c = system.constants();
    let period = c.period();
    let mut labels: Vec<Option<CellLabel>> = vec![None; period as usize];
    labels[0] = Some(CellLabel::Zero);
    labels[c.half_period() as usize] = Some(CellLabel::Half);
    for (id, _) in system.classes() {
        for x in system.partition_cells(id)? {
            let slot = &mut labels[x as usize];
            match slot {
                None => *slot = Some(CellLabel::Class(id)),
                Some(prev) => {
                    let first = match prev {
                        CellLabel::Class(p) => *p,
                        // A special index collided; report it against itself.
                        _ => id,
                    };
                    return Err(CyclotomyError::DoublyLabeled {
                        index: x,
                        first,
                        second: id,
                    });
                }
            }
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or(CyclotomyError::Unlabeled { index: i as u64 }))
        .collect()
}

/// Classifies an index of Z_{2p^m q^n} from scratch: strip the p- and
/// q-parts to find the shape, divide out the cofactor (and the 2 for even
/// indices), then look the unit up in that shape's classes. Independent of
/// the partition array.
pub fn classify_index(system: &CyclotomicSystem, index: u64) -> CellLabel {
    let c = system.constants();
    let index = index % c.period();
    if index == 0 {
        return CellLabel::Zero;
    }
    if index == c.half_period() {
        return CellLabel::Half;
    }
    let (vp, _) = split_power(index, c.p, c.m);
    let (vq, _) = split_power(index, c.q, c.n);
    let odd_shape =
        Shape::from_exponents(c.m - vp, c.n - vq).expect("index is not a multiple of p^m q^n");
    let cof = odd_shape.cofactor(c);
    let (shape, unit) = if index % 2 == 1 {
        (odd_shape.doubled(), index / cof)
    } else {
        (odd_shape, index / (2 * cof))
    };
    let h = system
        .side_of(shape, unit)
        .expect("reduced index must be a unit of its shape");
    CellLabel::Class(ClassId::new(shape, h))
}

/// The `h` with `2 ∈ D_h` for an odd shape.
pub fn residue_side_of_2(system: &CyclotomicSystem, shape: Shape) -> Result<u8, CyclotomyError> {
    let modulus = shape.modulus(system.constants());
    if gcd(2, modulus) != 1 {
        return Err(CyclotomyError::TwoNotUnit(modulus));
    }
    system
        .side_of(shape, 2)
        .ok_or(CyclotomyError::BadShape(shape))
}

/// Whether 2 is a square mod the odd prime `p`, by brute force.
pub fn two_is_square_mod(p: u64) -> bool {
    (1..p).any(|x| x * x % p == 2 % p)
}

/// One failed set identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub lemma: String,
    pub class: Option<ClassId>,
    pub witness: Option<u64>,
    pub detail: String,
}

impl fmt::Display for LemmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.lemma, self.detail)?;
        if let Some(class) = self.class {
            write!(f, " [{class}]")?;
        }
        if let Some(w) = self.witness {
            write!(f, " witness {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StructuralReport {
    pub identities_checked: usize,
    pub violations: Vec<LemmaViolation>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn compare_sets(
    report: &mut StructuralReport,
    lemma: &str,
    class: ClassId,
    expected: &[u64],
    mut built: Vec<u64>,
) {
    report.identities_checked += 1;
    built.sort_unstable();
    built.dedup();
    if built == expected {
        return;
    }
    let witness = built
        .iter()
        .find(|x| expected.binary_search(x).is_err())
        .or_else(|| expected.iter().find(|x| built.binary_search(x).is_err()))
        .copied();
    report.violations.push(LemmaViolation {
        lemma: lemma.to_string(),
        class: Some(class),
        witness,
        detail: format!(
            "lifted set has {} elements, class has {}",
            built.len(),
            expected.len()
        ),
    });
}

/// Lifting descriptions of the higher-power classes from the base classes:
///
/// * `D_h^(p^i) = {x + p y : x ∈ D_h^(p), y < p^{i-1}}`, and the 2p^i
///   version with `p^i` added whenever `x + p y` is even (likewise for q);
/// * `D_h^(p^i q^j) = {a + pq b : a ∈ D_h^(pq), b < p^{i-1} q^{j-1}}`, and
///   the `2p^i q^j` version with the same parity correction;
///
/// plus `2 ∈ D_h^(p)` iff `2 ∈ D_h^(p^i)` (and for q). All checked as exact
/// set equalities.
pub fn check_structural_lemmas(system: &CyclotomicSystem) -> StructuralReport {
    let c = system.constants();
    let mut report = StructuralReport::default();
    for h in 0..2u8 {
        for (prime, max, mk_odd, mk_even) in [
            (
                c.p,
                c.m,
                (|i| Shape::P { i }) as fn(u32) -> Shape,
                (|i| Shape::TwoP { i }) as fn(u32) -> Shape,
            ),
            (c.q, c.n, |j| Shape::Q { j }, |j| Shape::TwoQ { j }),
        ] {
            let base = system
                .class(ClassId::new(mk_odd(1), h))
                .expect("base class")
                .to_vec();
            for i in 1..=max {
                let pi = prime.pow(i);
                let reps = prime.pow(i - 1);
                let lifted: Vec<u64> = base
                    .iter()
                    .flat_map(|&x| (0..reps).map(move |y| x + prime * y))
                    .collect();
                let odd_id = ClassId::new(mk_odd(i), h);
                compare_sets(
                    &mut report,
                    "prime-power lift",
                    odd_id,
                    system.class(odd_id).unwrap(),
                    lifted.clone(),
                );
                let even_id = ClassId::new(mk_even(i), h);
                let corrected: Vec<u64> = lifted
                    .iter()
                    .map(|&v| if v % 2 == 1 { v } else { v + pi })
                    .collect();
                compare_sets(
                    &mut report,
                    "prime-power lift (doubled)",
                    even_id,
                    system.class(even_id).unwrap(),
                    corrected,
                );

                report.identities_checked += 1;
                let base_side = system.side_of(mk_odd(1), 2);
                let side = system.side_of(mk_odd(i), 2);
                if base_side != side {
                    report.violations.push(LemmaViolation {
                        lemma: "side of 2 is stable under lifting".into(),
                        class: Some(odd_id),
                        witness: Some(2),
                        detail: format!(
                            "2 lies in D_{base_side:?} mod {prime} but D_{side:?} mod {pi}"
                        ),
                    });
                }
            }
        }

        let pq = c.p * c.q;
        let base = system
            .class(ClassId::new(Shape::PQ { i: 1, j: 1 }, h))
            .expect("base class")
            .to_vec();
        for i in 1..=c.m {
            for j in 1..=c.n {
                let modulus = c.p_pow(i) * c.q_pow(j);
                let reps = c.p_pow(i - 1) * c.q_pow(j - 1);
                let lifted: Vec<u64> = base
                    .iter()
                    .flat_map(|&a| (0..reps).map(move |b| a + pq * b))
                    .collect();
                let odd_id = ClassId::new(Shape::PQ { i, j }, h);
                compare_sets(
                    &mut report,
                    "pq lift",
                    odd_id,
                    system.class(odd_id).unwrap(),
                    lifted.clone(),
                );
                let even_id = ClassId::new(Shape::TwoPQ { i, j }, h);
                let corrected: Vec<u64> = lifted
                    .iter()
                    .map(|&v| if v % 2 == 1 { v } else { v + modulus })
                    .collect();
                compare_sets(
                    &mut report,
                    "pq lift (doubled)",
                    even_id,
                    system.class(even_id).unwrap(),
                    corrected,
                );
            }
        }
    }
    report
}

/// Every class equals the reduction of its doubled counterpart, and the
/// two classes of each shape split the units evenly.
pub fn check_class_invariants(system: &CyclotomicSystem) -> StructuralReport {
    let c = system.constants();
    let mut report = StructuralReport::default();
    for shape in Shape::all(c.m, c.n) {
        let modulus = shape.modulus(c);
        let d0 = system.class(ClassId::new(shape, 0)).unwrap();
        let d1 = system.class(ClassId::new(shape, 1)).unwrap();
        report.identities_checked += 1;
        let units: Vec<u64> = (1..modulus).filter(|&x| gcd(x, modulus) == 1).collect();
        let mut union: Vec<u64> = d0.iter().chain(d1).copied().collect();
        union.sort_unstable();
        let disjoint = d0.iter().all(|x| d1.binary_search(x).is_err());
        if d0.len() != d1.len() || !disjoint || union != units {
            report.violations.push(LemmaViolation {
                lemma: "classes split the units".into(),
                class: Some(ClassId::new(shape, 0)),
                witness: None,
                detail: format!(
                    "|D_0| = {}, |D_1| = {}, disjoint = {disjoint}",
                    d0.len(),
                    d1.len()
                ),
            });
        }
        if shape.is_doubled() {
            let odd = shape.odd();
            let odd_mod = odd.modulus(c);
            for h in 0..2 {
                let id = ClassId::new(shape, h);
                let mut reduced: Vec<u64> = system
                    .class(id)
                    .unwrap()
                    .iter()
                    .map(|x| x % odd_mod)
                    .collect();
                reduced.sort_unstable();
                report.identities_checked += 1;
                if reduced != system.class(ClassId::new(odd, h)).unwrap() {
                    report.violations.push(LemmaViolation {
                        lemma: "reduction of doubled class".into(),
                        class: Some(id),
                        witness: None,
                        detail: format!("does not reduce onto D_{h}^({odd})"),
                    });
                }
            }
        }
    }
    report
}

/// Side of 2 in every odd-modulus class pair against the quadratic
/// character: for p^i it is 0 iff 2 is a square mod p, for q^j likewise
/// with q, and for p^i q^j it follows q alone (y absorbs the p-part).
pub fn check_residue_lemmas(system: &CyclotomicSystem) -> StructuralReport {
    let c = system.constants();
    let mut report = StructuralReport::default();
    for shape in Shape::all(c.m, c.n).into_iter().filter(|s| !s.is_doubled()) {
        let governing = match shape {
            Shape::P { .. } => c.p,
            _ => c.q,
        };
        let expected = u8::from(!two_is_square_mod(governing));
        report.identities_checked += 1;
        match residue_side_of_2(system, shape) {
            Ok(h) if h == expected => {}
            found => report.violations.push(LemmaViolation {
                lemma: "side of 2 follows the quadratic character".into(),
                class: Some(ClassId::new(shape, expected)),
                witness: Some(2),
                detail: format!("expected D_{expected}, found {found:?}"),
            }),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{is_prime, SystemConstants};

    fn system(p: u64, q: u64, m: u32, n: u32) -> CyclotomicSystem {
        CyclotomicSystem::new(SystemConstants::new(p, q, m, n).unwrap()).unwrap()
    }

    #[test]
    fn pq_classes_three_five() {
        let s = system(3, 5, 1, 1);
        let pq = Shape::PQ { i: 1, j: 1 };
        assert_eq!(s.class(ClassId::new(pq, 0)).unwrap(), &[1, 4, 11, 14]);
        assert_eq!(s.class(ClassId::new(pq, 1)).unwrap(), &[2, 7, 8, 13]);
        let two = Shape::TwoPQ { i: 1, j: 1 };
        assert_eq!(s.class(ClassId::new(two, 0)).unwrap(), &[1, 11, 19, 29]);
        assert!(s
            .class(ClassId::new(two, 1))
            .unwrap()
            .iter()
            .all(|x| x % 2 == 1));
    }

    #[test]
    fn prime_power_classes() {
        let s = system(3, 5, 1, 1);
        assert_eq!(
            s.class(ClassId::new(Shape::TwoP { i: 1 }, 0)).unwrap(),
            &[1]
        );
        assert_eq!(
            s.class(ClassId::new(Shape::TwoQ { j: 1 }, 0)).unwrap(),
            &[1, 9]
        );
        assert_eq!(s.class(ClassId::new(Shape::P { i: 1 }, 0)).unwrap(), &[1]);
    }

    #[test]
    fn bucket_sets_three_five() {
        let s = system(3, 5, 1, 1);
        assert_eq!(s.bucket_set(Bucket::A), vec![1, 3, 5, 11, 19, 27, 29]);
        assert_eq!(s.bucket_set(Bucket::B), vec![7, 9, 13, 17, 21, 23, 25]);
        assert_eq!(s.bucket_set(Bucket::C), vec![2, 6, 8, 10, 22, 24, 28]);
        assert_eq!(s.bucket_set(Bucket::D), vec![4, 12, 14, 16, 18, 20, 26]);
    }

    #[test]
    fn bucket_sets_three_seven() {
        let s = system(3, 7, 1, 1);
        assert_eq!(
            s.bucket_set(Bucket::A),
            vec![1, 3, 7, 11, 23, 25, 27, 29, 33, 37]
        );
        assert_eq!(
            s.bucket_set(Bucket::B),
            vec![5, 9, 13, 15, 17, 19, 31, 35, 39, 41]
        );
        assert_eq!(
            s.bucket_set(Bucket::C),
            vec![2, 4, 6, 8, 12, 14, 16, 22, 24, 32]
        );
        assert_eq!(
            s.bucket_set(Bucket::D),
            vec![10, 18, 20, 26, 28, 30, 34, 36, 38, 40]
        );
    }

    #[test]
    fn h_set_union_matches_bucket() {
        let s = system(3, 5, 1, 1);
        let mut union: Vec<u64> = [
            ClassId::new(Shape::TwoPQ { i: 1, j: 1 }, 0),
            ClassId::new(Shape::TwoP { i: 1 }, 0),
            ClassId::new(Shape::TwoQ { j: 1 }, 0),
        ]
        .iter()
        .flat_map(|&id| s.h_set(id).unwrap())
        .collect();
        union.sort_unstable();
        assert_eq!(union, vec![1, 3, 5, 11, 19, 27, 29]);
        // cofactor 1 at full exponents
        let id = ClassId::new(Shape::TwoPQ { i: 1, j: 1 }, 1);
        assert_eq!(s.h_set(id).unwrap(), s.class(id).unwrap());
    }

    #[test]
    fn partition_parity_and_counts() {
        let s = system(3, 7, 1, 1);
        let counts: Vec<usize> = Bucket::SYMBOL_BUCKETS
            .iter()
            .map(|&b| s.bucket_set(b).len())
            .collect();
        assert_eq!(counts, vec![10, 10, 10, 10]);
        for (i, l) in s.partition().iter().enumerate() {
            match l.bucket() {
                Bucket::A | Bucket::B => assert_eq!(i % 2, 1),
                Bucket::C | Bucket::D | Bucket::Zero => assert_eq!(i % 2, 0),
                Bucket::Half => assert_eq!(i, 21),
            }
        }
    }

    #[test]
    fn classify_agrees_with_partition() {
        for (p, q, m, n) in [(3, 5, 1, 1), (3, 5, 2, 1), (3, 7, 1, 2), (5, 7, 2, 2)] {
            let s = system(p, q, m, n);
            for i in 0..s.constants().period() {
                assert_eq!(
                    classify_index(&s, i),
                    s.label(i),
                    "({p},{q},{m},{n}) index {i}"
                );
            }
        }
    }

    #[test]
    fn residue_side_examples() {
        let s = system(7, 3, 1, 1);
        assert_eq!(residue_side_of_2(&s, Shape::P { i: 1 }).unwrap(), 0);
        let s = system(3, 7, 1, 1);
        assert_eq!(residue_side_of_2(&s, Shape::P { i: 1 }).unwrap(), 1);
        assert_eq!(residue_side_of_2(&s, Shape::PQ { i: 1, j: 1 }).unwrap(), 0);
        assert!(matches!(
            residue_side_of_2(&s, Shape::TwoP { i: 1 }),
            Err(CyclotomyError::TwoNotUnit(6))
        ));
    }

    #[test]
    fn structural_identities_hold() {
        for (p, q, m, n) in [(3, 5, 2, 1), (3, 7, 1, 2), (3, 5, 1, 1), (5, 7, 2, 2)] {
            let s = system(p, q, m, n);
            let r = check_structural_lemmas(&s);
            assert!(r.passed(), "{:?}", r.violations);
            assert!(r.identities_checked > 0);
            let r = check_class_invariants(&s);
            assert!(r.passed(), "{:?}", r.violations);
        }
    }

    #[test]
    fn structural_check_detects_tampering() {
        let mut s = system(3, 5, 2, 1);
        let id = ClassId::new(Shape::P { i: 2 }, 0);
        let set = s.classes.get_mut(&id).unwrap();
        set[0] += 1;
        let r = check_structural_lemmas(&s);
        assert!(!r.passed());
        assert_eq!(r.violations[0].class, Some(id));
    }

    #[test]
    fn residue_checks_pass() {
        for (p, q, m, n) in [
            (3, 5, 1, 1),
            (3, 7, 1, 1),
            (7, 3, 1, 1),
            (3, 5, 2, 1),
            (5, 7, 1, 2),
        ] {
            let r = check_residue_lemmas(&system(p, q, m, n));
            assert!(r.passed(), "{:?}", r.violations);
            assert_eq!(r.identities_checked as u32, m * n + m + n);
        }
        let s = system(3, 7, 1, 1);
        assert_eq!(residue_side_of_2(&s, Shape::PQ { i: 1, j: 1 }).unwrap(), 0);
        assert_eq!(residue_side_of_2(&s, Shape::P { i: 1 }).unwrap(), 1);
        assert_eq!(residue_side_of_2(&s, Shape::Q { j: 1 }).unwrap(), 0);
    }

    #[test]
    fn side_of_two_small_primes() {
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            let q = if p == 3 { 5 } else { 3 };
            let s = system(p, q, 1, 1);
            let side = residue_side_of_2(&s, Shape::P { i: 1 }).unwrap();
            assert_eq!(side == 0, two_is_square_mod(p), "p = {p}");
            assert_eq!(side == 0, matches!(p % 8, 1 | 7), "p = {p}");
        }
    }
}
