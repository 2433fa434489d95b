//! Quadratic and quartic Gauss sums over Z[i].
//!
//! `g(r, n) = Σ_{x mod n} (x/n) ẽ(rx/n)` with `ẽ(z) = e(Im z)`. The brute
//! sums enumerate the residue box; the closed forms assemble prime-power
//! values through the twisted multiplicativity of the sums.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbols::{quadratic_symbol, quartic_symbol, QuarticValue};
use crate::zint::{factorize, is_prime, GFactorization, GInt, ResidueRing};

/// Closed-form and brute sums are complex doubles; symbols and norms stay exact.
pub type GaussSumValue = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolOrder {
    Quadratic,
    Quartic,
}

impl SymbolOrder {
    pub fn symbol(self, a: GInt, n: GInt) -> Result<QuarticValue> {
        match self {
            SymbolOrder::Quadratic => quadratic_symbol(a, n),
            SymbolOrder::Quartic => quartic_symbol(a, n),
        }
    }

    pub fn from_order(order: u32) -> Option<Self> {
        match order {
            2 => Some(SymbolOrder::Quadratic),
            4 => Some(SymbolOrder::Quartic),
            _ => None,
        }
    }
}

fn cis_fraction(num: i128, den: i128) -> Complex64 {
    let k = num.rem_euclid(den);
    let frac = k as f64 / den as f64;
    Complex64::from_polar(1.0, 2.0 * PI * frac)
}

/// `ẽ(z/d) = e(Im(z/d))`. `Im(z/d) = Im(z·d̄)/N(d)` is reduced modulo 1 in
/// exact integer arithmetic before the single exponential.
pub fn e_tilde(z: GInt, d: GInt) -> Result<Complex64> {
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let nd = d.checked_norm()? as i128;
    let im = z.im as i128 * d.re as i128 - z.re as i128 * d.im as i128;
    Ok(cis_fraction(im, nd))
}

fn check_primary(n: GInt) -> Result<()> {
    if n.is_primary() {
        Ok(())
    } else {
        Err(Error::NotPrimary(n))
    }
}

/// Symbol values over the residue system of a fixed primary modulus, so that
/// several `r` can be summed without re-evaluating symbols.
#[derive(Clone, Debug)]
pub struct GaussSumTable {
    modulus: GInt,
    terms: Vec<(GInt, QuarticValue)>,
    roots: Vec<Complex64>,
}

impl GaussSumTable {
    pub fn new(order: SymbolOrder, n: GInt) -> Result<Self> {
        check_primary(n)?;
        let ring = ResidueRing::new(n)?;
        let terms = ring
            .iter()
            .map(|x| Ok((x, order.symbol(x, n)?)))
            .filter(|t: &Result<(GInt, QuarticValue)>| t.as_ref().map_or(true, |(_, v)| !v.is_zero()))
            .collect::<Result<Vec<_>>>()?;
        let nn = n.norm();
        let roots = (0..nn).map(|k| cis_fraction(k as i128, nn as i128)).collect();
        Ok(GaussSumTable { modulus: n, terms, roots })
    }

    pub fn modulus(&self) -> GInt {
        self.modulus
    }

    /// `Σ_x (x/n) ẽ(rx/n)`.
    pub fn sum(&self, r: GInt) -> Complex64 {
        let n = self.modulus;
        let nn = n.norm() as i128;
        // Im(r·x·n̄) = x.re·Im(r n̄) + x.im·Re(r n̄)
        let (rr, ri, nr, ni) = (r.re as i128, r.im as i128, n.re as i128, n.im as i128);
        let m_re = (rr * nr + ri * ni).rem_euclid(nn);
        let m_im = (ri * nr - rr * ni).rem_euclid(nn);
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        for &(x, v) in &self.terms {
            let k = (x.re as i128 * m_im + x.im as i128 * m_re).rem_euclid(nn);
            let e = v.exp().expect("table holds nonzero symbols only") as usize;
            acc[e] += self.roots[k as usize];
        }
        acc[0] + Complex64::i() * acc[1] - acc[2] - Complex64::i() * acc[3]
    }
}

/// Literal Gauss sum over the residue box of a primary `n`.
pub fn gauss_sum_brute(order: SymbolOrder, r: GInt, n: GInt) -> Result<GaussSumValue> {
    Ok(GaussSumTable::new(order, n)?.sum(r))
}

/// `g₂(ϖ)` and `g₄(ϖ)` for a primary prime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasePrimeValues {
    pub g2: Complex64,
    pub g4: Complex64,
}

fn base_cache() -> &'static RwLock<HashMap<GInt, BasePrimeValues>> {
    static CACHE: OnceLock<RwLock<HashMap<GInt, BasePrimeValues>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `g₂(ϖ) = (i/ϖ)·N(ϖ)^{1/2}` exactly; `g₄(ϖ)` by direct summation, cached
/// per prime.
pub fn g_base_prime(p: GInt) -> Result<BasePrimeValues> {
    check_primary(p)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if let Some(v) = base_cache().read().expect("cache lock").get(&p) {
        return Ok(*v);
    }
    let g2 = quadratic_symbol(GInt::I, p)?.to_complex() * (p.norm() as f64).sqrt();
    let g4 = gauss_sum_brute(SymbolOrder::Quartic, GInt::ONE, p)?;
    let v = BasePrimeValues { g2, g4 };
    base_cache().write().expect("cache lock").insert(p, v);
    Ok(v)
}

/// Which branch of the prime-power evaluation produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum G2Case {
    /// `l ≤ h`, `l` odd: 0.
    DividedOdd,
    /// `l ≤ h`, `l` even: `φ(ϖ^l)`.
    DividedEven,
    /// `l = h+1` even: `−N(ϖ)^{l−1}`.
    EdgeEven,
    /// `l = h+1` odd: `(ikϖ^{−h}/ϖ) N(ϖ)^{l−1/2}`.
    EdgeOdd,
    /// `l ≥ h+2`: 0.
    Vanishing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum G4Case {
    /// `l = k+1`, `k ≡ 0 (4)`: `N^k g₄(ϖ)`.
    EdgeQuartic,
    /// `l = k+1`, `k ≡ 1 (4)`: `N^k g₂(ϖ)`.
    EdgeQuadratic,
    /// `l = k+1`, `k ≡ 2 (4)`: `N^k (−1/ϖ)₄ conj(g₄(ϖ))`.
    EdgeConjugate,
    /// `l = k+1`, `k ≡ 3 (4)`: `−N^k`.
    EdgePrincipal,
    /// `k ≥ l`, `l ≡ 0 (4)`: `φ(ϖ^l)`.
    Divided,
    Vanishing,
}

fn totient_prime_power(norm: u64, l: u32) -> f64 {
    (norm as f64).powi(l as i32 - 1) * (norm as f64 - 1.0)
}

/// `(h, r/ϖ^h)`; `h = None` for `r = 0`.
fn valuation(r: GInt, p: GInt) -> (Option<u32>, GInt) {
    if r.is_zero() {
        return (None, r);
    }
    let mut h = 0;
    let mut s = r;
    while let Some(q) = s.exact_div(p) {
        s = q;
        h += 1;
    }
    (Some(h), s)
}

/// `g₂(r, ϖ^l)` for a primary prime `ϖ`, `l ≥ 1`.
pub fn g2_prime_power(r: GInt, p: GInt, l: u32) -> Result<(Complex64, G2Case)> {
    let norm = p.norm();
    let (h, unit_part) = valuation(r, p);
    let nf = norm as f64;
    let zero = Complex64::new(0.0, 0.0);
    let covered = h.is_none_or(|h| l <= h);
    Ok(if covered {
        if l % 2 == 1 {
            (zero, G2Case::DividedOdd)
        } else {
            (Complex64::new(totient_prime_power(norm, l), 0.0), G2Case::DividedEven)
        }
    } else {
        let h = h.expect("finite valuation");
        if l == h + 1 && l.is_multiple_of(2) {
            (Complex64::new(-nf.powi(l as i32 - 1), 0.0), G2Case::EdgeEven)
        } else if l == h + 1 {
            let sym = quadratic_symbol(GInt::I * unit_part, p)?;
            (sym.to_complex() * nf.powf(l as f64 - 0.5), G2Case::EdgeOdd)
        } else {
            (zero, G2Case::Vanishing)
        }
    })
}

/// `g₄(r, ϖ^l)` from the prime-power table at `r = ϖ^k` and the twist
/// `g₄(rs, n) = conj((s/n)₄) g₄(r, n)`.
pub fn g4_prime_power(r: GInt, p: GInt, l: u32) -> Result<(Complex64, G4Case)> {
    let norm = p.norm();
    let nf = norm as f64;
    let zero = Complex64::new(0.0, 0.0);
    let (k, s) = valuation(r, p);
    let covered = k.is_none_or(|k| k >= l);
    if covered {
        return Ok(if l.is_multiple_of(4) {
            (Complex64::new(totient_prime_power(norm, l), 0.0), G4Case::Divided)
        } else {
            (zero, G4Case::Vanishing)
        });
    }
    let k = k.expect("finite valuation");
    if l != k + 1 {
        return Ok((zero, G4Case::Vanishing));
    }
    let base = g_base_prime(p)?;
    let scale = nf.powi(k as i32);
    let (value, case) = match k % 4 {
        0 => (base.g4 * scale, G4Case::EdgeQuartic),
        1 => (base.g2 * scale, G4Case::EdgeQuadratic),
        2 => {
            let minus_one = quartic_symbol(GInt::new(-1, 0), p)?.to_complex();
            (minus_one * base.g4.conj() * scale, G4Case::EdgeConjugate)
        }
        _ => (Complex64::new(-scale, 0.0), G4Case::EdgePrincipal),
    };
    let twist = quartic_symbol(s, p)?.pow(l).conj().to_complex();
    Ok((twist * value, case))
}

fn prime_powers(f: &GFactorization) -> impl Iterator<Item = (GInt, u32)> + '_ {
    f.factors.iter().copied()
}

fn factor_primary(n: GInt) -> Result<GFactorization> {
    check_primary(n)?;
    let f = factorize(n)?;
    debug_assert_eq!(f.unit_exp, 0, "primary elements factor with trivial unit");
    Ok(f)
}

/// `g₂(r, n)` for primary `n`, as the product of prime-power values.
pub fn g2_closed(r: GInt, n: GInt) -> Result<GaussSumValue> {
    let f = factor_primary(n)?;
    g2_closed_factored(r, &f)
}

pub fn g2_closed_factored(r: GInt, f: &GFactorization) -> Result<GaussSumValue> {
    g2_closed_traced(r, f).map(|(v, _)| v)
}

/// `g₂(r, n)` with the prime-power case used for each factor.
pub fn g2_closed_traced(r: GInt, f: &GFactorization) -> Result<(GaussSumValue, Vec<G2Case>)> {
    let mut cases = Vec::with_capacity(f.factors.len());
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, l) in prime_powers(f) {
        let (v, case) = g2_prime_power(r, p, l)?;
        acc *= v;
        cases.push(case);
    }
    Ok((acc, cases))
}

/// `g₄(r, n)` for primary `n`, folding coprime prime powers with
/// `g₄(r, n₁n₂) = (n₂/n₁)₄ (n₁/n₂)₄ g₄(r, n₁) g₄(r, n₂)`.
pub fn g4_closed(r: GInt, n: GInt) -> Result<GaussSumValue> {
    let f = factor_primary(n)?;
    g4_closed_factored(r, &f)
}

pub fn g4_closed_factored(r: GInt, f: &GFactorization) -> Result<GaussSumValue> {
    g4_closed_traced(r, f).map(|(v, _)| v)
}

/// `g₄(r, n)` with the prime-power case used for each factor.
pub fn g4_closed_traced(r: GInt, f: &GFactorization) -> Result<(GaussSumValue, Vec<G4Case>)> {
    let mut cases = Vec::with_capacity(f.factors.len());
    let mut acc_n = GInt::ONE;
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, l) in prime_powers(f) {
        let q = p.pow(l);
        let cross = quartic_symbol(q, acc_n)? * quartic_symbol(acc_n, q)?;
        let (v, case) = g4_prime_power(r, p, l)?;
        acc = acc * cross.to_complex() * v;
        cases.push(case);
        acc_n = acc_n * q;
    }
    Ok((acc, cases))
}

pub fn closed_form(order: SymbolOrder, r: GInt, n: GInt) -> Result<GaussSumValue> {
    match order {
        SymbolOrder::Quadratic => g2_closed(r, n),
        SymbolOrder::Quartic => g4_closed(r, n),
    }
}

/// Agreement test used throughout: relative `tol` against the natural scale
/// `max(|expected|, √N(n))`, which keeps vanishing sums meaningful.
pub fn agrees(computed: Complex64, expected: Complex64, n: GInt, tol: f64) -> bool {
    let scale = expected.norm().max((n.norm() as f64).sqrt());
    (computed - expected).norm() <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GInt {
        GInt::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-9 * (1.0 + b.norm())
    }

    #[test]
    fn e_tilde_examples() {
        assert!(close(e_tilde(g(7, -3), GInt::ONE).unwrap(), Complex64::new(1.0, 0.0)));
        assert!(close(e_tilde(GInt::I, g(2, 0)).unwrap(), Complex64::new(-1.0, 0.0)));
        let want = Complex64::from_polar(1.0, 2.0 * PI * 5.0 / 13.0);
        assert!(close(e_tilde(g(1, 1), g(3, -2)).unwrap(), want));
        assert!(e_tilde(GInt::ONE, GInt::ZERO).is_err());
    }

    #[test]
    fn trivial_modulus_sums_are_one() {
        for order in [SymbolOrder::Quadratic, SymbolOrder::Quartic] {
            assert!(close(gauss_sum_brute(order, GInt::ONE, GInt::ONE).unwrap(), Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn quadratic_at_thirteen() {
        let p = g(3, -2);
        let want = Complex64::new(-(13f64).sqrt(), 0.0);
        assert!(close(gauss_sum_brute(SymbolOrder::Quadratic, GInt::ONE, p).unwrap(), want));
        assert!(close(g2_closed(GInt::ONE, p).unwrap(), want));
        assert!(close(g_base_prime(p).unwrap().g2, want));
        assert!(gauss_sum_brute(SymbolOrder::Quadratic, GInt::ONE, p * p).unwrap().norm() < 1e-9);
        // h = 1, l = 2: −N(ϖ)
        let v = gauss_sum_brute(SymbolOrder::Quadratic, p, p * p).unwrap();
        assert!(close(v, Complex64::new(-13.0, 0.0)));
        assert!(close(g2_closed(p, p * p).unwrap(), v));
    }

    #[test]
    fn totient_case() {
        let p = g(-1, 2);
        let (v, case) = g2_prime_power(p * p, p, 2).unwrap();
        assert_eq!(case, G2Case::DividedEven);
        assert_eq!(v.re, 20.0);
        let (v, case) = g4_prime_power(p.pow(4), p, 4).unwrap();
        assert_eq!(case, G4Case::Divided);
        assert_eq!(v.re, 5f64.powi(3) * 4.0);
        let (v, case) = g4_prime_power(p.pow(3), p, 4).unwrap();
        assert_eq!(case, G4Case::EdgePrincipal);
        assert_eq!(v.re, -125.0);
    }

    #[test]
    fn base_values_have_modulus_sqrt_norm() {
        for p in [g(-1, 2), g(-3, 0), g(3, 2), g(1, -4)] {
            let b = g_base_prime(p).unwrap();
            let root = (p.norm() as f64).sqrt();
            assert!((b.g4.norm() - root).abs() < 1e-9 * root);
            assert!(((b.g4 * b.g4.conj()).re - p.norm() as f64).abs() < 1e-8 * p.norm() as f64);
            assert!((b.g2.norm() - root).abs() < 1e-12 * root);
        }
    }

    #[test]
    fn composite_quartic_cross_factor() {
        let (n1, n2) = (g(3, -2), g(-1, 2));
        let brute = gauss_sum_brute(SymbolOrder::Quartic, GInt::ONE, n1 * n2).unwrap();
        let cross = quartic_symbol(n2, n1).unwrap() * quartic_symbol(n1, n2).unwrap();
        let want = cross.to_complex() * g_base_prime(n1).unwrap().g4 * g_base_prime(n2).unwrap().g4;
        assert!(close(brute, want));
        assert!(close(g4_closed(GInt::ONE, n1 * n2).unwrap(), brute));
    }

    #[test]
    fn non_primary_modulus_rejected() {
        assert!(matches!(
            gauss_sum_brute(SymbolOrder::Quadratic, GInt::ONE, g(2, 3)),
            Err(Error::NotPrimary(_))
        ));
        assert!(g2_closed(GInt::ONE, g(-3, 2)).is_err());
    }
}
