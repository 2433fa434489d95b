//! Quartic and quadratic residue symbols over Z[i].
//!
//! The fast evaluators run a Jacobi-style descent: reduce the numerator
//! modulo the denominator, peel off powers of `1+i` and a unit with the
//! supplementary laws, then swap numerator and denominator with the
//! reciprocity law. [`quartic_symbol_prime_oracle`] computes the same value
//! by Euler's criterion in the residue field and shares none of that path.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::zint::{divrem, is_prime, primary_core, primary_decompose, GInt, ResidueRing};

/// A value in `{0, 1, i, −1, −i}`, stored as an optional exponent of `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QuarticValue(Option<u8>);

impl QuarticValue {
    pub const ZERO: QuarticValue = QuarticValue(None);
    pub const ONE: QuarticValue = QuarticValue(Some(0));
    pub const I: QuarticValue = QuarticValue(Some(1));
    pub const MINUS_ONE: QuarticValue = QuarticValue(Some(2));
    pub const MINUS_I: QuarticValue = QuarticValue(Some(3));

    /// `i^e`.
    pub fn from_exp(e: i64) -> Self {
        QuarticValue(Some(e.rem_euclid(4) as u8))
    }

    pub fn exp(self) -> Option<u8> {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0.is_none()
    }

    pub fn pow(self, k: u32) -> Self {
        match self.0 {
            None if k == 0 => QuarticValue::ONE,
            None => QuarticValue::ZERO,
            Some(e) => QuarticValue::from_exp(e as i64 * k as i64),
        }
    }

    pub fn square(self) -> Self {
        self.pow(2)
    }

    pub fn conj(self) -> Self {
        QuarticValue(self.0.map(|e| (4 - e) % 4))
    }

    pub fn to_gint(self) -> GInt {
        match self.0 {
            None => GInt::ZERO,
            Some(e) => GInt::ONE.mul_unit(e as u32),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            None => Complex64::new(0.0, 0.0),
            Some(0) => Complex64::new(1.0, 0.0),
            Some(1) => Complex64::new(0.0, 1.0),
            Some(2) => Complex64::new(-1.0, 0.0),
            Some(_) => Complex64::new(0.0, -1.0),
        }
    }

    /// Real value for elements of `{0, ±1}`.
    pub fn to_real(self) -> Option<f64> {
        match self.0 {
            None => Some(0.0),
            Some(0) => Some(1.0),
            Some(2) => Some(-1.0),
            Some(_) => None,
        }
    }
}

impl Mul for QuarticValue {
    type Output = QuarticValue;
    fn mul(self, rhs: QuarticValue) -> QuarticValue {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => QuarticValue(Some((a + b) % 4)),
            _ => QuarticValue::ZERO,
        }
    }
}

impl fmt::Debug for QuarticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuarticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            None => "0",
            Some(0) => "1",
            Some(1) => "i",
            Some(2) => "-1",
            Some(_) => "-i",
        };
        f.write_str(s)
    }
}

/// Exponent `t` with `(i/n)₄ = i^t` for primary `n = a + bi`: `t = (1 − a)/2`.
pub fn unit_supplement_exp(n: GInt) -> u8 {
    debug_assert!(n.is_primary());
    let a = n.re.rem_euclid(8);
    ((1 - a) / 2).rem_euclid(4) as u8
}

/// Exponent `t` with `((1+i)/n)₄ = i^t` for primary `n = a + bi`:
/// `t = (a − b − 1 − b²)/4`.
pub fn ramified_supplement_exp(n: GInt) -> u8 {
    debug_assert!(n.is_primary());
    let (a, b) = (n.re.rem_euclid(16), n.im.rem_euclid(16));
    ((a - b - 1 - b * b) / 4).rem_euclid(4) as u8
}

/// Splits `z = (1+i)^k · w` with `w` odd. `z` must be nonzero.
fn strip_ramified(mut z: GInt) -> (u32, GInt) {
    let mut k = 0;
    while !z.is_odd() {
        // z / (1+i) = z(1−i)/2
        z = GInt::new((z.re + z.im) / 2, (z.im - z.re) / 2);
        k += 1;
    }
    (k, z)
}

fn reciprocity_sign_flips(m: GInt, n: GInt) -> bool {
    // (−1)^{((N(m)−1)/4)((N(n)−1)/4)} = −1 iff both norms are 5 mod 8
    m.norm() % 8 == 5 && n.norm() % 8 == 5
}

fn check_denominator(n: GInt) -> Result<GInt> {
    if n.is_zero() {
        return Err(Error::Zero("residue symbol denominator"));
    }
    if !n.is_odd() {
        return Err(Error::EvenModulus(n));
    }
    Ok(primary_core(n))
}

fn depth_bound(n: GInt) -> u32 {
    2 * (64 - n.norm().leading_zeros()) + 4
}

/// Quartic residue symbol `(a/n)₄` for odd `n`. The unit part of `n` is
/// discarded; the value is multiplicative over the primary prime factors of
/// the primary core of `n`.
pub fn quartic_symbol(a: GInt, n: GInt) -> Result<QuarticValue> {
    let mut den = check_denominator(n)?;
    let mut num = a;
    let mut e: u32 = 0;
    let limit = depth_bound(den);
    for _ in 0..limit {
        if den == GInt::ONE {
            return Ok(QuarticValue::from_exp(e as i64));
        }
        num = divrem(num, den)?.1;
        if num.is_zero() {
            return Ok(QuarticValue::ZERO);
        }
        let (k, odd) = strip_ramified(num);
        e += k * ramified_supplement_exp(den) as u32;
        let d = primary_decompose(odd)?;
        e += d.unit_exp * unit_supplement_exp(den) as u32;
        if reciprocity_sign_flips(d.core, den) {
            e += 2;
        }
        num = den;
        den = d.core;
        e %= 4;
    }
    unreachable!("symbol descent exceeded its depth bound for denominator {n}")
}

/// Quadratic residue symbol `(a/n) = (a/n)₄²`, evaluated by its own descent
/// using `(m/n) = (n/m)` for primary `m, n`.
pub fn quadratic_symbol(a: GInt, n: GInt) -> Result<QuarticValue> {
    let mut den = check_denominator(n)?;
    let mut num = a;
    let mut negative = false;
    let limit = depth_bound(den);
    for _ in 0..limit {
        if den == GInt::ONE {
            return Ok(if negative {
                QuarticValue::MINUS_ONE
            } else {
                QuarticValue::ONE
            });
        }
        num = divrem(num, den)?.1;
        if num.is_zero() {
            return Ok(QuarticValue::ZERO);
        }
        let (k, odd) = strip_ramified(num);
        // (1+i / n) = (−1)^{(a−b−1−b²)/4}, (i/n) = (−1)^{(1−a)/2}
        if k % 2 == 1 && ramified_supplement_exp(den) % 2 == 1 {
            negative = !negative;
        }
        let d = primary_decompose(odd)?;
        if d.unit_exp % 2 == 1 && unit_supplement_exp(den) % 2 == 1 {
            negative = !negative;
        }
        num = den;
        den = d.core;
    }
    unreachable!("symbol descent exceeded its depth bound for denominator {n}")
}

fn check_odd_prime(p: GInt) -> Result<()> {
    if !p.is_primary() {
        return Err(Error::NotPrimary(p));
    }
    if !is_prime(p) || p.norm() == 2 {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// `(a/ϖ)₄` from Euler's criterion `a^{(N(ϖ)−1)/4} mod ϖ`.
pub fn quartic_symbol_prime_oracle(a: GInt, p: GInt) -> Result<QuarticValue> {
    check_odd_prime(p)?;
    let ring = ResidueRing::new(p)?;
    let v = ring.pow(a, (p.norm() - 1) / 4);
    if v == GInt::ZERO {
        return Ok(QuarticValue::ZERO);
    }
    (0..4)
        .find(|&e| ring.reduce(GInt::ONE.mul_unit(e)) == v)
        .map(|e| QuarticValue::from_exp(e as i64))
        .ok_or(Error::OracleMismatch { a, p })
}

/// Checks `(m/n)₄ = (n/m)₄ (−1)^{((N(n)−1)/4)((N(m)−1)/4)}` with both sides
/// from the exponentiation oracle.
pub fn reciprocity_check(m: GInt, n: GInt) -> Result<bool> {
    check_odd_prime(m)?;
    check_odd_prime(n)?;
    if m == n {
        return Err(Error::InvalidArgument(format!(
            "reciprocity needs distinct primes, got {m} twice"
        )));
    }
    let lhs = quartic_symbol_prime_oracle(m, n)?;
    let mut rhs = quartic_symbol_prime_oracle(n, m)?;
    if reciprocity_sign_flips(m, n) {
        rhs = rhs * QuarticValue::MINUS_ONE;
    }
    Ok(lhs == rhs)
}
