//! The field GF(4) = {0, 1, α, α+1} with α² = α + 1, and dense univariate
//! polynomials over it.
//!
//! Elements are stored on the basis {1, α}: bit 0 is the constant part and
//! bit 1 the α part, so the digits 0, 1, 2, 3 stand for 0, 1, α, α+1.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Sub};

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf4(u8);

const MUL_TABLE: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];

const INV_TABLE: [u8; 4] = [0, 1, 3, 2];

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    pub const ALPHA: Gf4 = Gf4(2);
    /// α² = α + 1.
    pub const ALPHA_SQ: Gf4 = Gf4(3);

    pub const ALL: [Gf4; 4] = [Gf4(0), Gf4(1), Gf4(2), Gf4(3)];

    pub fn from_digit(d: u8) -> Option<Gf4> {
        (d < 4).then_some(Gf4(d))
    }

    pub fn from_char(c: char) -> Option<Gf4> {
        c.to_digit(10).and_then(|d| Gf4::from_digit(d as u8))
    }

    pub fn digit(self) -> u8 {
        self.0
    }

    pub fn to_char(self) -> char {
        (b'0' + self.0) as char
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn inv(self) -> Option<Gf4> {
        (!self.is_zero()).then(|| Gf4(INV_TABLE[self.0 as usize]))
    }

    pub fn square(self) -> Gf4 {
        self * self
    }
}

impl Add for Gf4 {
    type Output = Gf4;
    fn add(self, rhs: Gf4) -> Gf4 {
        Gf4(self.0 ^ rhs.0)
    }
}

impl Sub for Gf4 {
    type Output = Gf4;
    fn sub(self, rhs: Gf4) -> Gf4 {
        Gf4(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf4 {
    fn add_assign(&mut self, rhs: Gf4) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Gf4 {
    type Output = Gf4;
    fn mul(self, rhs: Gf4) -> Gf4 {
        Gf4(MUL_TABLE[self.0 as usize][rhs.0 as usize])
    }
}

impl MulAssign for Gf4 {
    fn mul_assign(&mut self, rhs: Gf4) {
        *self = *self * rhs;
    }
}

impl fmt::Debug for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "0",
            1 => "1",
            2 => "α",
            _ => "α+1",
        })
    }
}

impl Serialize for Gf4 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
}

/// Dense polynomial over GF(4); `coeffs[i]` is the coefficient of `x^i`.
/// Trailing zeros are always stripped, so the zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf4Poly {
    coeffs: Vec<Gf4>,
}

impl Gf4Poly {
    pub fn zero() -> Self {
        Gf4Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Gf4::ONE)
    }

    pub fn constant(c: Gf4) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: Gf4, k: usize) -> Self {
        let mut coeffs = vec![Gf4::ZERO; k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Gf4>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Gf4Poly { coeffs }
    }

    /// Parses a digit string, lowest degree first.
    pub fn from_digits(s: &str) -> Option<Self> {
        s.chars()
            .map(Gf4::from_char)
            .collect::<Option<Vec<_>>>()
            .map(Self::from_coeffs)
    }

    /// Digit string, lowest degree first; empty for the zero polynomial.
    pub fn to_digits(&self) -> String {
        self.coeffs.iter().map(|c| c.to_char()).collect()
    }

    pub fn coeffs(&self) -> &[Gf4] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Gf4 {
        self.coeffs.get(i).copied().unwrap_or(Gf4::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Gf4 {
        self.coeffs.last().copied().unwrap_or(Gf4::ZERO)
    }

    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn scale(&self, c: Gf4) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Scales so the leading coefficient is 1. The zero polynomial is
    /// returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading().inv() {
            Some(inv) => self.scale(inv),
            None => Self::zero(),
        }
    }

    pub fn eval(&self, x: Gf4) -> Gf4 {
        self.coeffs
            .iter()
            .rev()
            .fold(Gf4::ZERO, |acc, &c| acc * x + c)
    }

    pub fn divmod(&self, divisor: &Gf4Poly) -> Result<(Gf4Poly, Gf4Poly), PolyError> {
        let dd = divisor
            .degree()
            .ok_or(PolyError::DivisionByZeroPolynomial)?;
        let lead_inv = divisor
            .leading()
            .inv()
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Gf4Poly::zero(), self.clone()));
        }
        let mut quot = vec![Gf4::ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] * lead_inv;
            if c.is_zero() {
                continue;
            }
            quot[k] = c;
            for (r, &b) in rem[k..=k + dd].iter_mut().zip(&divisor.coeffs) {
                *r += c * b;
            }
        }
        rem.truncate(dd);
        Ok((Gf4Poly::from_coeffs(quot), Gf4Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Gf4Poly) -> Result<Gf4Poly, PolyError> {
        self.divmod(divisor).map(|(_, r)| r)
    }

    /// Formal derivative. In characteristic 2 the even-degree terms vanish.
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| if i % 2 == 1 { c } else { Gf4::ZERO })
                .collect(),
        )
    }

    /// Reverses the coefficient order over `len` slots: `x^(len-1) f(1/x)`.
    pub fn reversed(&self, len: usize) -> Self {
        let mut coeffs: Vec<Gf4> = (0..len).map(|i| self.coeff(i)).collect();
        coeffs.reverse();
        Self::from_coeffs(coeffs)
    }

    pub fn pow_mod(&self, mut exp: u64, modulus: &Gf4Poly) -> Result<Gf4Poly, PolyError> {
        let mut base = self.rem(modulus)?;
        let mut acc = Gf4Poly::one().rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = (&acc * &base).rem(modulus)?;
            }
            base = (&base * &base).rem(modulus)?;
            exp >>= 1;
        }
        Ok(acc)
    }
}

/// Monic gcd by the Euclidean algorithm, normalizing at every step.
/// `gcd(0, 0)` is the zero polynomial.
pub fn poly_gcd(a: &Gf4Poly, b: &Gf4Poly) -> Gf4Poly {
    let mut a = a.monic();
    let mut b = b.monic();
    while !b.is_zero() {
        let r = a.rem(&b).expect("nonzero divisor");
        a = b;
        b = r.monic();
    }
    a
}

/// `x^n - 1`, which equals `x^n + 1` in characteristic 2.
pub fn x_pow_n_minus_1(n: usize) -> Gf4Poly {
    let mut coeffs = vec![Gf4::ZERO; n + 1];
    coeffs[0] = Gf4::ONE;
    coeffs[n] += Gf4::ONE;
    Gf4Poly::from_coeffs(coeffs)
}

impl Add for &Gf4Poly {
    type Output = Gf4Poly;
    fn add(self, rhs: &Gf4Poly) -> Gf4Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, &s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        Gf4Poly::from_coeffs(coeffs)
    }
}

impl Add for Gf4Poly {
    type Output = Gf4Poly;
    fn add(self, rhs: Gf4Poly) -> Gf4Poly {
        &self + &rhs
    }
}

impl Mul for &Gf4Poly {
    type Output = Gf4Poly;
    fn mul(self, rhs: &Gf4Poly) -> Gf4Poly {
        if self.is_zero() || rhs.is_zero() {
            return Gf4Poly::zero();
        }
        let mut coeffs = vec![Gf4::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (c, &b) in coeffs[i..].iter_mut().zip(&rhs.coeffs) {
                *c += a * b;
            }
        }
        Gf4Poly::from_coeffs(coeffs)
    }
}

impl Mul for Gf4Poly {
    type Output = Gf4Poly;
    fn mul(self, rhs: Gf4Poly) -> Gf4Poly {
        &self * &rhs
    }
}

impl fmt::Debug for Gf4Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gf4Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coef = match (c.digit(), i) {
                (1, 0) => "1".to_string(),
                (1, _) => String::new(),
                (3, 0) => "α+1".to_string(),
                (3, _) => "(α+1)".to_string(),
                _ => c.to_string(),
            };
            match i {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Gf4Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_digits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: Gf4 = Gf4::ALPHA;
    const A1: Gf4 = Gf4::ALPHA_SQ;

    fn poly(d: &str) -> Gf4Poly {
        Gf4Poly::from_digits(d).unwrap()
    }

    #[test]
    fn element_examples() {
        assert_eq!(A + A, Gf4::ZERO);
        assert_eq!(A + Gf4::ONE, A1);
        for x in Gf4::ALL {
            assert_eq!(Gf4::ZERO + x, x);
            assert_eq!(Gf4::ZERO * x, Gf4::ZERO);
        }
        assert_eq!(A * A, A1);
        assert_eq!(A * A1, Gf4::ONE);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for x in Gf4::ALL {
            for y in Gf4::ALL {
                assert_eq!(x + y, y + x);
                assert_eq!(x * y, y * x);
                for z in Gf4::ALL {
                    assert_eq!((x + y) + z, x + (y + z));
                    assert_eq!((x * y) * z, x * (y * z));
                    assert_eq!(x * (y + z), x * y + x * z);
                }
            }
            if let Some(inv) = x.inv() {
                assert_eq!(x * inv, Gf4::ONE);
                assert_eq!(x * x * x, Gf4::ONE);
            } else {
                assert!(x.is_zero());
            }
        }
    }

    #[test]
    fn poly_examples() {
        let x1 = poly("11");
        assert!((&x1 + &x1).is_zero());
        assert_eq!(&x1 * &x1, poly("101"));
        let (q, r) = poly("101").divmod(&x1).unwrap();
        assert_eq!(q, x1);
        assert!(r.is_zero());
        assert_eq!(
            poly("1").divmod(&Gf4Poly::zero()),
            Err(PolyError::DivisionByZeroPolynomial)
        );
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(poly_gcd(&poly("101"), &poly("11")), poly("11"));
        // α x^2 + 1 scaled to monic
        assert_eq!(poly_gcd(&poly("102"), &Gf4Poly::zero()), poly("301"));
        assert!(poly_gcd(&Gf4Poly::zero(), &Gf4Poly::zero()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert!(poly("001").derivative().is_zero());
        // x^3 + αx^2 + x + 1 -> x^2 + 1
        assert_eq!(poly("1121").derivative(), poly("101"));
        assert!(poly("3").derivative().is_zero());
    }

    #[test]
    fn x_pow_n_minus_1_examples() {
        assert_eq!(x_pow_n_minus_1(1), poly("11"));
        assert_eq!(x_pow_n_minus_1(2), &poly("11") * &poly("11"));
        let f = x_pow_n_minus_1(15);
        assert_eq!(f.degree(), Some(15));
        assert_eq!(f.weight(), 2);
        assert!(x_pow_n_minus_1(0).is_zero());
    }

    #[test]
    fn frobenius_square_identity() {
        for n in 1..=100 {
            let f = x_pow_n_minus_1(n);
            assert_eq!(&f * &f, x_pow_n_minus_1(2 * n), "n = {n}");
        }
    }

    #[test]
    fn display_and_digits() {
        assert_eq!(poly("1320").to_string(), "αx^2 + (α+1)x + 1");
        assert_eq!(poly("1320").to_digits(), "132");
        assert_eq!(Gf4Poly::zero().to_string(), "0");
        assert_eq!(poly("0").degree(), None);
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Gf4Poly> {
        prop::collection::vec(0u8..4, 0..max_len).prop_map(|v| {
            Gf4Poly::from_coeffs(v.into_iter().map(|d| Gf4::from_digit(d).unwrap()).collect())
        })
    }

    proptest! {
        #[test]
        fn distributive(f in arb_poly(65), g in arb_poly(65), h in arb_poly(65)) {
            prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        }

        #[test]
        fn divmod_reconstructs(a in arb_poly(65), b in arb_poly(40)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divmod(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree() < b.degree());
        }

        #[test]
        fn gcd_scales(f in arb_poly(12), g in arb_poly(12), h in arb_poly(8)) {
            prop_assume!(!h.is_zero() && !(f.is_zero() && g.is_zero()));
            let lhs = poly_gcd(&(&f * &h), &(&g * &h));
            let rhs = (&h * &poly_gcd(&f, &g)).monic();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gcd_divides_both(f in arb_poly(30), g in arb_poly(30)) {
            prop_assume!(!(f.is_zero() && g.is_zero()));
            let d = poly_gcd(&f, &g);
            prop_assert_eq!(d.leading(), Gf4::ONE);
            prop_assert!(f.rem(&d).unwrap().is_zero());
            prop_assert!(g.rem(&d).unwrap().is_zero());
        }

        #[test]
        fn derivative_rules(f in arb_poly(40), g in arb_poly(40)) {
            prop_assert_eq!((&f + &g).derivative(), &f.derivative() + &g.derivative());
            prop_assert_eq!((&f * &g).derivative(), &(&f.derivative() * &g) + &(&f * &g.derivative()));
        }
    }
}
