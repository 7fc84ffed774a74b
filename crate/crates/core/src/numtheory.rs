//! Exact integer number theory: gcd, CRT, Euler's totient, multiplicative
//! orders and primitive roots, plus the constants (g, y, e_ij, d_ij) that
//! parameterize the cyclotomic classes.

use serde::Serialize;
use thiserror::Error;

/// Default upper bound on the period 2p^m q^n accepted by the library.
pub const DEFAULT_PERIOD_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberTheoryError {
    #[error("incompatible congruences: {a} mod {m_a} and {b} mod {m_b}")]
    Incompatible { a: u64, m_a: u64, b: u64, m_b: u64 },
    #[error("{a} is not coprime to {n}")]
    NotCoprime { a: u64, n: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("period {period} exceeds cap {cap}")]
    CapExceeded { period: u128, cap: u64 },
}

/// Extended Euclid. Returns `(g, x, y)` with `a*x + b*y = g` and `g >= 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `x ≡ residue (mod modulus)` with `0 <= residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub residue: u64,
    pub modulus: u64,
}

impl Congruence {
    /// Builds a congruence, reducing `residue` into `0..modulus`.
    pub fn new(residue: u64, modulus: u64) -> Result<Self, NumberTheoryError> {
        if modulus < 2 {
            return Err(NumberTheoryError::InvalidParams(format!(
                "congruence modulus must be at least 2, got {modulus}"
            )));
        }
        Ok(Congruence {
            residue: residue % modulus,
            modulus,
        })
    }
}

/// Solves a system of congruences. The result is unique modulo the lcm of
/// the moduli; a pair whose residues disagree modulo the gcd of their moduli
/// makes the system unsolvable.
pub fn crt_solve(congruences: &[Congruence]) -> Result<Congruence, NumberTheoryError> {
    let (first, rest) = congruences
        .split_first()
        .ok_or_else(|| NumberTheoryError::InvalidParams("empty congruence list".into()))?;
    let mut acc = *first;
    for c in rest {
        let g = gcd(acc.modulus, c.modulus);
        if acc.residue % g != c.residue % g {
            return Err(NumberTheoryError::Incompatible {
                a: acc.residue,
                m_a: acc.modulus,
                b: c.residue,
                m_b: c.modulus,
            });
        }
        let l = acc.modulus as u128 / g as u128 * c.modulus as u128;
        if l > u64::MAX as u128 {
            return Err(NumberTheoryError::InvalidParams(
                "lcm of moduli overflows 64 bits".into(),
            ));
        }
        // acc.residue + acc.modulus * t ≡ c.residue (mod c.modulus)
        let m1 = acc.modulus / g;
        let m2 = c.modulus / g;
        let diff = (c.residue as i128 - acc.residue as i128) / g as i128;
        let (_, inv, _) = extended_gcd((m1 % m2.max(1)) as i64, m2 as i64);
        let t = if m2 == 1 {
            0
        } else {
            (diff.rem_euclid(m2 as i128) * (inv as i128).rem_euclid(m2 as i128))
                .rem_euclid(m2 as i128)
        };
        let x = (acc.residue as u128 + acc.modulus as u128 * t as u128) % l;
        acc = Congruence {
            residue: x as u64,
            modulus: l as u64,
        };
    }
    Ok(acc)
}

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Least `t >= 1` with `a^t ≡ 1 (mod n)`.
pub fn mult_order(a: u64, n: u64) -> Result<u64, NumberTheoryError> {
    if n < 2 {
        return Err(NumberTheoryError::InvalidParams(format!(
            "modulus must be at least 2, got {n}"
        )));
    }
    if gcd(a % n, n) != 1 {
        return Err(NumberTheoryError::NotCoprime { a, n });
    }
    let mut order = euler_phi(n);
    for (prime, _) in factorize(order) {
        while order.is_multiple_of(prime) && pow_mod(a, order / prime, n) == 1 {
            order /= prime;
        }
    }
    Ok(order)
}

pub fn is_primitive_root(a: u64, n: u64) -> Result<bool, NumberTheoryError> {
    Ok(mult_order(a, n)? == euler_phi(n))
}

/// Least odd `r >= 3` that generates the units mod `p^2`. Such an `r` also
/// generates the units mod `p^i` and `2p^i` for every `i >= 1`.
pub fn smallest_odd_primitive_root_mod_p2(p: u64) -> Result<u64, NumberTheoryError> {
    if p < 3 || !is_prime(p) {
        return Err(NumberTheoryError::InvalidParams(format!(
            "{p} is not an odd prime"
        )));
    }
    let p2 = p * p;
    let mut r = 3u64;
    loop {
        if !r.is_multiple_of(p) && is_primitive_root(r, p2)? {
            return Ok(r);
        }
        r += 2;
    }
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// The fixed parameters of one construction: primes, exponents, the common
/// primitive root `g`, the auxiliary unit `y`, and the `e_ij`/`d_ij` tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemConstants {
    pub p: u64,
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub g1: u64,
    pub g2: u64,
    pub g: u64,
    pub y: u64,
    e: Vec<Vec<u64>>,
    d: Vec<Vec<u64>>,
}

impl SystemConstants {
    pub fn new(p: u64, q: u64, m: u32, n: u32) -> Result<Self, NumberTheoryError> {
        Self::with_cap(p, q, m, n, DEFAULT_PERIOD_CAP)
    }

    pub fn with_cap(p: u64, q: u64, m: u32, n: u32, cap: u64) -> Result<Self, NumberTheoryError> {
        validate_params(p, q, m, n, cap)?;
        let pm = p.pow(m);
        let qn = q.pow(n);
        let g1 = smallest_odd_primitive_root_mod_p2(p)?;
        let g2 = smallest_odd_primitive_root_mod_p2(q)?;
        let g = crt_solve(&[Congruence::new(g1, 2 * pm)?, Congruence::new(g2, 2 * qn)?])?.residue;
        let y = crt_solve(&[Congruence::new(g, 2 * pm)?, Congruence::new(1, 2 * qn)?])?.residue;

        let mut e = vec![vec![0; n as usize]; m as usize];
        let mut d = vec![vec![0; n as usize]; m as usize];
        for i in 1..=m {
            for j in 1..=n {
                let phi_p = p.pow(i - 1) * (p - 1);
                let phi_q = q.pow(j - 1) * (q - 1);
                let eij = gcd(phi_p, phi_q);
                e[i as usize - 1][j as usize - 1] = eij;
                d[i as usize - 1][j as usize - 1] = phi_p / eij * phi_q;
            }
        }
        Ok(SystemConstants {
            p,
            q,
            m,
            n,
            g1,
            g2,
            g,
            y,
            e,
            d,
        })
    }

    /// `e_ij = gcd(φ(p^i), φ(q^j))`, 1-based indices.
    pub fn e(&self, i: u32, j: u32) -> u64 {
        self.e[i as usize - 1][j as usize - 1]
    }

    /// `d_ij = φ(p^i) φ(q^j) / e_ij`, the order of `g` mod `p^i q^j`.
    pub fn d(&self, i: u32, j: u32) -> u64 {
        self.d[i as usize - 1][j as usize - 1]
    }

    pub fn p_pow(&self, i: u32) -> u64 {
        self.p.pow(i)
    }

    pub fn q_pow(&self, j: u32) -> u64 {
        self.q.pow(j)
    }

    /// `p^m q^n`.
    pub fn half_period(&self) -> u64 {
        self.p.pow(self.m) * self.q.pow(self.n)
    }

    /// `2 p^m q^n`.
    pub fn period(&self) -> u64 {
        2 * self.half_period()
    }
}

/// Checks `p != q` odd primes, `m, n >= 1` and `2 p^m q^n <= cap`.
pub fn validate_params(p: u64, q: u64, m: u32, n: u32, cap: u64) -> Result<u64, NumberTheoryError> {
    if m == 0 || n == 0 {
        return Err(NumberTheoryError::InvalidParams(
            "exponents m and n must be at least 1".into(),
        ));
    }
    for r in [p, q] {
        if r < 3 || !is_prime(r) {
            return Err(NumberTheoryError::InvalidParams(format!(
                "{r} is not an odd prime"
            )));
        }
    }
    if p == q {
        return Err(NumberTheoryError::InvalidParams(format!(
            "p and q must be distinct, both are {p}"
        )));
    }
    let period = checked_pow(p, m)
        .zip(checked_pow(q, n))
        .and_then(|(a, b)| a.checked_mul(b))
        .and_then(|v| v.checked_mul(2));
    match period {
        Some(v) if v <= cap => Ok(v),
        Some(v) => Err(NumberTheoryError::CapExceeded {
            period: v as u128,
            cap,
        }),
        None => Err(NumberTheoryError::CapExceeded {
            period: u128::MAX,
            cap,
        }),
    }
}

/// `p`-adic valuation of `k` capped at `limit`, together with the cofactor.
pub fn split_power(mut k: u64, prime: u64, limit: u32) -> (u32, u64) {
    let mut a = 0;
    while a < limit && k.is_multiple_of(prime) {
        k /= prime;
        a += 1;
    }
    (a, k)
}
