//! Primary primes by norm, square-free odd moduli in norm ranges, the
//! Möbius function, and the counting and Mertens baselines.

use std::f64::consts::PI;

use num_prime::buffer::NaiveBuffer;

use crate::error::{Error, Result};
use crate::zint::{factorize, is_prime, isqrt, primary_prime_above, GInt};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GPrime {
    pub value: GInt,
    pub norm: u64,
    pub log_norm: f64,
}

impl GPrime {
    pub fn new(value: GInt) -> Self {
        let norm = value.norm();
        GPrime {
            value,
            norm,
            log_norm: (norm as f64).ln(),
        }
    }
}

/// Every primary prime of odd norm `≤ y`, ascending by `(norm, re, im)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeTable {
    pub y: u64,
    pub primes: Vec<GPrime>,
}

impl PrimeTable {
    pub fn new(y: u64) -> Self {
        PrimeTable {
            y,
            primes: primary_primes_upto(y),
        }
    }

    /// Primes with norm `≤ x`; `x` must not exceed the table bound.
    pub fn upto(&self, x: u64) -> Result<&[GPrime]> {
        if x > self.y {
            return Err(Error::PrimeCutoff { needed: x, have: self.y });
        }
        let end = self.primes.partition_point(|p| p.norm <= x);
        Ok(&self.primes[..end])
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

pub fn primary_primes_upto(y: u64) -> Vec<GPrime> {
    let mut out = Vec::new();
    if y < 5 {
        return out;
    }
    for p in NaiveBuffer::new().into_primes(y) {
        match p % 4 {
            1 => {
                let w = primary_prime_above(p);
                out.push(GPrime::new(w));
                out.push(GPrime::new(w.conj()));
            }
            3 if p.checked_mul(p).is_some_and(|q| q <= y) => {
                out.push(GPrime::new(GInt::new(-(p as i64), 0)));
            }
            _ => {}
        }
    }
    out.sort_by_key(|p| p.value.sort_key());
    out
}

/// Norm annulus `X ≤ N(c) ≤ 2X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnnulusSpec {
    pub x: u64,
}

impl AnnulusSpec {
    pub fn new(x: u64) -> Result<Self> {
        if x < 2 {
            return Err(Error::InvalidArgument(format!("annulus needs X >= 2, got {x}")));
        }
        Ok(AnnulusSpec { x })
    }

    pub fn lo(&self) -> u64 {
        self.x
    }

    pub fn hi(&self) -> u64 {
        2 * self.x
    }
}

/// Smallest prime factor for every integer up to a bound.
struct SmallestFactor(Vec<u32>);

impl SmallestFactor {
    fn new(limit: u64) -> Self {
        let n = limit as usize + 1;
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                let mut j = i;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SmallestFactor(spf)
    }

    fn factor(&self, mut n: u64) -> impl Iterator<Item = (u64, u32)> + '_ {
        std::iter::from_fn(move || {
            if n <= 1 {
                return None;
            }
            let p = self.0[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            Some((p, e))
        })
    }
}

/// Square-free test for an odd `c` with norm factored over the rationals.
/// A split prime `p` with `p² ‖ N(c)` is harmless only when both conjugates
/// divide `c` once, which happens exactly when `p` divides both coordinates.
fn squarefree_from_norm(c: GInt, spf: &SmallestFactor) -> bool {
    spf.factor(c.norm()).all(|(p, e)| match (p % 4, e) {
        (3, 2) => true,
        (3, _) => false,
        (_, 1) => true,
        (_, 2) => c.re % p as i64 == 0 && c.im % p as i64 == 0,
        _ => false,
    })
}

/// All odd square-free `c` (every associate) with `lo ≤ N(c) ≤ hi`,
/// ascending by `(norm, re, im)`.
pub fn squarefree_in_norm_range(lo: u64, hi: u64) -> Vec<GInt> {
    let lo = lo.max(1);
    if hi < lo {
        return Vec::new();
    }
    let spf = SmallestFactor::new(hi);
    let r = isqrt(hi) as i64;
    let mut out = Vec::new();
    for re in -r..=r {
        let re2 = (re * re) as u64;
        let top = isqrt(hi - re2) as i64;
        for im in -top..=top {
            let c = GInt::new(re, im);
            let n = re2 + (im * im) as u64;
            if n < lo || n.is_multiple_of(2) {
                continue;
            }
            if squarefree_from_norm(c, &spf) {
                out.push(c);
            }
        }
    }
    out.sort_by_key(|c| c.sort_key());
    out
}

pub fn squarefree_annulus(spec: AnnulusSpec) -> Vec<GInt> {
    squarefree_in_norm_range(spec.lo(), spec.hi())
}

pub fn mobius(n: GInt) -> Result<i8> {
    let f = factorize(n)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// Catalan's constant `L(2, χ₄) = Σ (−1)^k/(2k+1)²`, truncated once the next
/// term is below `tol` (the alternating-series bound).
pub fn catalan(tol: f64) -> f64 {
    let k_max = ((1.0 / tol).sqrt() / 2.0).ceil() as u64 + 1;
    (0..=k_max)
        .rev()
        .map(|k| {
            let t = 1.0 / ((2 * k + 1) as f64).powi(2);
            if k % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// `ζ_{Q(i)}(2) = ζ(2)·L(2, χ₄)`.
pub fn zeta_qi_2() -> f64 {
    PI * PI / 6.0 * catalan(1e-10)
}

/// Leading term `2πX/(3ζ_{Q(i)}(2))` for odd square-free `c` with `N(c) ≤ X`.
pub fn squarefree_prediction(x: f64) -> f64 {
    2.0 * PI * x / (3.0 * zeta_qi_2())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountCheck {
    pub x: u64,
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
}

pub fn squarefree_count_check(x: u64) -> Result<CountCheck> {
    if x < 100 {
        return Err(Error::InvalidArgument(format!("count check needs X >= 100, got {x}")));
    }
    let count = squarefree_in_norm_range(1, x).len() as u64;
    let predicted = squarefree_prediction(x as f64);
    Ok(CountCheck {
        x,
        count,
        predicted,
        ratio: count as f64 / predicted,
    })
}

/// `#{m ≠ 0 : N(m) ≤ y}`.
pub fn lattice_count(y: u64) -> u64 {
    let r = isqrt(y);
    let mut total = 0u64;
    for a in 0..=r {
        total += 2 * isqrt(y - a * a) + 1;
        if a > 0 {
            total += 2 * isqrt(y - a * a) + 1;
        }
    }
    total - 1
}

/// Odd square-free count by `Σ_l μ(l)·#{odd m : N(m) ≤ X/N(l)²}` over
/// primary `l`, one per associate class.
pub fn squarefree_count_mobius(x: u64) -> Result<u64> {
    let odd = |y: u64| lattice_count(y) - lattice_count(y / 2);
    let lmax = isqrt(x);
    let r = isqrt(lmax) as i64;
    let mut total: i64 = 0;
    for re in -r..=r {
        for im in -r..=r {
            let l = GInt::new(re, im);
            let nl = l.norm();
            if nl == 0 || nl > lmax || !l.is_primary() {
                continue;
            }
            let mu = mobius(l)? as i64;
            if mu != 0 {
                total += mu * odd(x / (nl * nl)) as i64;
            }
        }
    }
    // l = 1 is primary and covered above.
    Ok(total as u64)
}

/// `Σ_{N(ϖ) ≤ x} log N(ϖ)/N(ϖ)` over primary primes.
pub fn chebyshev_sum(table: &PrimeTable, x: u64) -> Result<f64> {
    Ok(table
        .upto(x)?
        .iter()
        .map(|p| p.log_norm / p.norm as f64)
        .sum())
}

/// Direct scan of the disk `N ≤ y` with `is_prime`, for cross-checking.
pub fn primary_primes_by_scan(y: u64) -> Vec<GInt> {
    let r = isqrt(y) as i64;
    let mut out = Vec::new();
    for re in -r..=r {
        for im in -r..=r {
            let z = GInt::new(re, im);
            let n = z.norm();
            if n > 2 && n <= y && z.is_primary() && is_prime(z) {
                out.push(z);
            }
        }
    }
    out.sort_by_key(|z| z.sort_key());
    out
}
