//! Exact arithmetic in the Gaussian integers Z[i].
//!
//! Coordinates are `i64`; every element produced by arithmetic here has a
//! norm below 2^63. Intermediate products go through `i128`, so reductions
//! modulo an element of norm up to ~10^12 never overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

const NORM_LIMIT: u128 = i64::MAX as u128;

/// A Gaussian integer `re + im·i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GInt {
    pub re: i64,
    pub im: i64,
}

impl GInt {
    pub const ZERO: GInt = GInt::new(0, 0);
    pub const ONE: GInt = GInt::new(1, 0);
    pub const I: GInt = GInt::new(0, 1);
    /// The ramified prime above 2.
    pub const ONE_PLUS_I: GInt = GInt::new(1, 1);

    pub const fn new(re: i64, im: i64) -> Self {
        GInt { re, im }
    }

    pub fn checked_norm(self) -> Result<u64> {
        let n = (self.re as i128).pow(2) as u128 + (self.im as i128).pow(2) as u128;
        if n > NORM_LIMIT {
            Err(Error::Overflow)
        } else {
            Ok(n as u64)
        }
    }

    /// `re² + im²`. Panics if the norm leaves the 63-bit range; use
    /// [`GInt::checked_norm`] for untrusted input.
    pub fn norm(self) -> u64 {
        self.checked_norm().expect("Gaussian integer norm overflow")
    }

    pub fn conj(self) -> Self {
        GInt::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.re.unsigned_abs() + self.im.unsigned_abs() == 1
    }

    /// Coprime to 1+i, i.e. of odd norm.
    pub fn is_odd(self) -> bool {
        (self.re ^ self.im) & 1 == 1
    }

    /// Congruent to 1 modulo (1+i)³: `(re, im) mod 4` is `(1, 0)` or `(3, 2)`.
    pub fn is_primary(self) -> bool {
        matches!(
            (self.re.rem_euclid(4), self.im.rem_euclid(4)),
            (1, 0) | (3, 2)
        )
    }

    /// `i^e · self`.
    pub fn mul_unit(self, e: u32) -> Self {
        match e % 4 {
            0 => self,
            1 => GInt::new(-self.im, self.re),
            2 => GInt::new(-self.re, -self.im),
            _ => GInt::new(self.im, -self.re),
        }
    }

    pub fn checked_add(self, rhs: GInt) -> Result<GInt> {
        let re = self.re.checked_add(rhs.re).ok_or(Error::Overflow)?;
        let im = self.im.checked_add(rhs.im).ok_or(Error::Overflow)?;
        from_wide(re as i128, im as i128)
    }

    pub fn checked_sub(self, rhs: GInt) -> Result<GInt> {
        let re = self.re.checked_sub(rhs.re).ok_or(Error::Overflow)?;
        let im = self.im.checked_sub(rhs.im).ok_or(Error::Overflow)?;
        from_wide(re as i128, im as i128)
    }

    pub fn checked_mul(self, rhs: GInt) -> Result<GInt> {
        let (a, b, c, d) = (
            self.re as i128,
            self.im as i128,
            rhs.re as i128,
            rhs.im as i128,
        );
        from_wide(a * c - b * d, a * d + b * c)
    }

    pub fn checked_pow(self, mut e: u32) -> Result<GInt> {
        let mut base = self;
        let mut acc = GInt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(base)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(self, e: u32) -> GInt {
        self.checked_pow(e).expect("Gaussian integer overflow")
    }

    /// `self / d` when `d` divides `self` exactly.
    pub fn exact_div(self, d: GInt) -> Option<GInt> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm() as i128;
        let (re, im) = mul_conj_wide(self, d);
        if re % n != 0 || im % n != 0 {
            return None;
        }
        from_wide(re / n, im / n).ok()
    }

    pub fn divides(self, n: GInt) -> bool {
        if self.is_zero() {
            return n.is_zero();
        }
        n.exact_div(self).is_some()
    }

    /// Ordering key used for every sorted stream: `(norm, re, im)`.
    pub fn sort_key(self) -> (u64, i64, i64) {
        (self.norm(), self.re, self.im)
    }

    pub fn cmp_norm_first(&self, other: &GInt) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Debug for GInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

impl From<i64> for GInt {
    fn from(re: i64) -> Self {
        GInt::new(re, 0)
    }
}

impl Add for GInt {
    type Output = GInt;
    fn add(self, rhs: GInt) -> GInt {
        self.checked_add(rhs).expect("Gaussian integer overflow")
    }
}

impl Sub for GInt {
    type Output = GInt;
    fn sub(self, rhs: GInt) -> GInt {
        self.checked_sub(rhs).expect("Gaussian integer overflow")
    }
}

impl Mul for GInt {
    type Output = GInt;
    fn mul(self, rhs: GInt) -> GInt {
        self.checked_mul(rhs).expect("Gaussian integer overflow")
    }
}

impl Neg for GInt {
    type Output = GInt;
    fn neg(self) -> GInt {
        GInt::new(-self.re, -self.im)
    }
}

fn from_wide(re: i128, im: i128) -> Result<GInt> {
    let re = i64::try_from(re).map_err(|_| Error::Overflow)?;
    let im = i64::try_from(im).map_err(|_| Error::Overflow)?;
    let z = GInt::new(re, im);
    z.checked_norm()?;
    Ok(z)
}

fn mul_conj_wide(n: GInt, d: GInt) -> (i128, i128) {
    let (a, b, c, e) = (n.re as i128, n.im as i128, d.re as i128, d.im as i128);
    (a * c + b * e, b * c - a * e)
}

/// Nearest integer to `p / q` (`q > 0`), ties toward −∞.
fn round_half_down(p: i128, q: i128) -> i128 {
    // ceil((2p − q) / 2q)
    let num = 2 * p - q;
    let den = 2 * q;
    -((-num).div_euclid(den))
}

/// Euclidean division: `n = q·d + r` with `norm(r) ≤ norm(d)/2`.
pub fn divrem(n: GInt, d: GInt) -> Result<(GInt, GInt)> {
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let nd = d.checked_norm()? as i128;
    let (p, q) = mul_conj_wide(n, d);
    let q = from_wide(round_half_down(p, nd), round_half_down(q, nd))?;
    let qd = (q.re as i128 * d.re as i128 - q.im as i128 * d.im as i128,
              q.re as i128 * d.im as i128 + q.im as i128 * d.re as i128);
    let r = from_wide(n.re as i128 - qd.0, n.im as i128 - qd.1)?;
    Ok((q, r))
}

/// Canonical associate: the primary core when odd, otherwise the associate
/// with `re > 0, im ≥ 0`.
pub fn canonical_associate(z: GInt) -> GInt {
    if z.is_zero() {
        return z;
    }
    if z.is_odd() {
        return primary_core(z);
    }
    (0..4)
        .map(|e| z.mul_unit(e))
        .find(|w| w.re > 0 && w.im >= 0)
        .expect("exactly one associate lies in the first quadrant")
}

pub fn gcd(a: GInt, b: GInt) -> Result<GInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Zero("gcd"));
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = divrem(x, y)?;
        x = y;
        y = r;
    }
    Ok(canonical_associate(x))
}

pub fn coprime(a: GInt, b: GInt) -> bool {
    gcd(a, b).map(|g| g.is_unit()).unwrap_or(false)
}

/// `n = i^unit_exp · core` with `core` primary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimaryDecomp {
    pub unit_exp: u32,
    pub core: GInt,
}

pub fn primary_decompose(n: GInt) -> Result<PrimaryDecomp> {
    if n.is_zero() {
        return Err(Error::Zero("primary_decompose"));
    }
    if !n.is_odd() {
        return Err(Error::EvenModulus(n));
    }
    // core = i^{-t} n
    (0..4)
        .map(|t| PrimaryDecomp {
            unit_exp: t,
            core: n.mul_unit((4 - t) % 4),
        })
        .find(|d| d.core.is_primary())
        .ok_or(Error::NotPrimary(n))
}

/// Primary associate of an odd element. Panics on even input.
pub fn primary_core(n: GInt) -> GInt {
    primary_decompose(n).expect("primary_core of an even element").core
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // returns (g, x, y) with a·x + b·y = g ≥ 0
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (r0, x0, y0) = (-r0, -x0, -y0);
    }
    (r0 as i64, x0 as i64, y0 as i64)
}

/// The residue ring Z[i]/(n) with its Hermite-normal-form box
/// `{x + yi : 0 ≤ x < N/g, 0 ≤ y < g}`, `g = gcd(re, im)`.
#[derive(Clone, Copy, Debug)]
pub struct ResidueRing {
    modulus: GInt,
    norm: u64,
    width: i64,
    height: i64,
    // lattice basis (width, 0), (shift, height)
    shift: i64,
}

impl ResidueRing {
    pub fn new(n: GInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Zero("residue ring"));
        }
        let norm = n.checked_norm()?;
        // u·im + v·re = g gives the lattice vector u·n + v·(i·n) = (u·re - v·im, g)
        let (g, u, v) = ext_gcd(n.im, n.re);
        let height = g;
        let width = (norm / g as u64) as i64;
        let s = u as i128 * n.re as i128 - v as i128 * n.im as i128;
        let shift = s.rem_euclid(width as i128) as i64;
        Ok(ResidueRing {
            modulus: n,
            norm,
            width,
            height,
            shift,
        })
    }

    pub fn modulus(&self) -> GInt {
        self.modulus
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    /// Box dimensions `(N/g, g)`.
    pub fn box_dims(&self) -> (i64, i64) {
        (self.width, self.height)
    }

    pub fn reduce_wide(&self, re: i128, im: i128) -> GInt {
        let (w, h) = (self.width as i128, self.height as i128);
        let k = im.div_euclid(h);
        let y = im - k * h;
        let x = (re.rem_euclid(w) - (k.rem_euclid(w) * self.shift as i128) % w).rem_euclid(w);
        GInt::new(x as i64, y as i64)
    }

    pub fn reduce(&self, x: GInt) -> GInt {
        self.reduce_wide(x.re as i128, x.im as i128)
    }

    pub fn mul(&self, a: GInt, b: GInt) -> GInt {
        let (a, b) = (self.reduce(a), self.reduce(b));
        let (ar, ai, br, bi) = (a.re as i128, a.im as i128, b.re as i128, b.im as i128);
        self.reduce_wide(ar * br - ai * bi, ar * bi + ai * br)
    }

    pub fn pow(&self, a: GInt, mut e: u64) -> GInt {
        let mut base = self.reduce(a);
        let mut acc = self.reduce(GInt::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn congruent(&self, a: GInt, b: GInt) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    /// All `norm(n)` canonical residues, row by row.
    pub fn iter(&self) -> impl Iterator<Item = GInt> + '_ {
        let w = self.width;
        (0..self.height).flat_map(move |y| (0..w).map(move |x| GInt::new(x, y)))
    }
}

pub fn residue_system(n: GInt) -> Result<impl Iterator<Item = GInt>> {
    let ring = ResidueRing::new(n)?;
    let (w, h) = ring.box_dims();
    Ok((0..h).flat_map(move |y| (0..w).map(move |x| GInt::new(x, y))))
}

pub fn canonical_residue(x: GInt, n: GInt) -> Result<GInt> {
    Ok(ResidueRing::new(n)?.reduce(x))
}

pub fn powmod(a: GInt, e: u64, n: GInt) -> Result<GInt> {
    Ok(ResidueRing::new(n)?.pow(a, e))
}

fn pow_mod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128 % m;
    let mut base = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

/// Every primary element of norm `≤ max_norm`, ascending by [`GInt::sort_key`].
pub fn primary_upto(max_norm: u64) -> Vec<GInt> {
    let r = isqrt(max_norm) as i64;
    let mut out: Vec<GInt> = (-r..=r)
        .flat_map(|re| (-r..=r).map(move |im| GInt::new(re, im)))
        .filter(|z| z.is_primary() && z.norm() <= max_norm)
        .collect();
    out.sort_by_key(|z| z.sort_key());
    out
}

/// `(a, b)` with `a² + b² = p`, `a` odd, for a rational prime `p ≡ 1 mod 4`
/// (Hermite–Serret / Cornacchia).
pub fn two_squares(p: u64) -> (u64, u64) {
    debug_assert!(p % 4 == 1);
    let root = (2..p)
        .map(|c| pow_mod_u64(c, (p - 1) / 4, p))
        .find(|&x| (x as u128 * x as u128) % p as u128 == (p - 1) as u128)
        .expect("p ≡ 1 mod 4 has a square root of −1");
    let (mut r0, mut r1) = (p, root.min(p - root));
    while (r1 as u128) * (r1 as u128) > p as u128 {
        (r0, r1) = (r1, r0 % r1);
    }
    let a = r1;
    let b = isqrt(p - a * a);
    debug_assert_eq!(a * a + b * b, p);
    if a % 2 == 1 {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// The primary prime `a + bi` of norm `p` with `b > 0`; its conjugate is the other one.
pub fn primary_prime_above(p: u64) -> GInt {
    let (a, b) = two_squares(p);
    let core = primary_core(GInt::new(a as i64, b as i64));
    if core.im > 0 {
        core
    } else {
        core.conj()
    }
}

pub fn is_prime(n: GInt) -> bool {
    if n.is_zero() {
        return false;
    }
    let Ok(norm) = n.checked_norm() else {
        return false;
    };
    if n.re == 0 || n.im == 0 {
        let m = (n.re + n.im).unsigned_abs();
        if m % 4 == 3 && num_prime::nt_funcs::is_prime64(m) {
            return true;
        }
    }
    num_prime::nt_funcs::is_prime64(norm)
}

/// `unit_exp` and sorted `(prime, multiplicity)` pairs. Odd primes are
/// primary; the prime above 2 is listed as `1+i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFactorization {
    pub unit_exp: u32,
    pub factors: Vec<(GInt, u32)>,
}

impl GFactorization {
    pub fn product(&self) -> GInt {
        self.factors
            .iter()
            .fold(GInt::ONE, |acc, &(p, e)| acc * p.pow(e))
            .mul_unit(self.unit_exp)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn odd_part(&self) -> impl Iterator<Item = (GInt, u32)> + '_ {
        self.factors.iter().copied().filter(|(p, _)| p.is_odd())
    }
}

fn strip_power(n: &mut GInt, p: GInt) -> u32 {
    let mut k = 0;
    while let Some(q) = n.exact_div(p) {
        *n = q;
        k += 1;
    }
    k
}

pub fn factorize(n: GInt) -> Result<GFactorization> {
    if n.is_zero() {
        return Err(Error::Zero("factorize"));
    }
    let norm = n.checked_norm()?;
    let mut rest = n;
    let mut factors = Vec::new();
    for (p, e) in num_prime::nt_funcs::factorize64(norm) {
        let e = e as u32;
        if p == 2 {
            let k = strip_power(&mut rest, GInt::ONE_PLUS_I);
            debug_assert_eq!(k, e);
            factors.push((GInt::ONE_PLUS_I, k));
        } else if p % 4 == 3 {
            let q = GInt::new(-(p as i64), 0);
            let k = strip_power(&mut rest, q);
            debug_assert_eq!(2 * k, e);
            factors.push((q, k));
        } else {
            let pi = primary_prime_above(p);
            for q in [pi, pi.conj()] {
                let k = strip_power(&mut rest, q);
                if k > 0 {
                    factors.push((q, k));
                }
            }
        }
    }
    debug_assert!(rest.is_unit());
    let unit_exp = (0..4)
        .find(|&e| GInt::ONE.mul_unit(e) == rest)
        .expect("cofactor is a unit");
    factors.sort_by(|a, b| a.0.cmp_norm_first(&b.0));
    Ok(GFactorization { unit_exp, factors })
}
