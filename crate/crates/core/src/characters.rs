//! The Kronecker-symbol Hecke characters `χ_{i(1+i)⁵c}` (quadratic) and
//! `χ_{(1+i)⁷c}` (quartic).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symbols::{quartic_symbol, ramified_supplement_exp, unit_supplement_exp, QuarticValue};
use crate::zint::{factorize, primary_core, GInt, ResidueRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Quadratic,
    Quartic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Quadratic => "quadratic",
            Family::Quartic => "quartic",
        }
    }

    /// Power of `1+i` in the modulus.
    pub fn ramified_exponent(self) -> u32 {
        match self {
            Family::Quadratic => 5,
            Family::Quartic => 7,
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Family::Quadratic => 2,
            Family::Quartic => 4,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" | "2" => Ok(Family::Quadratic),
            "quartic" | "4" => Ok(Family::Quartic),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeckeCharacter {
    family: Family,
    c: GInt,
    modulus: GInt,
    conjugated: bool,
}

impl HeckeCharacter {
    /// Validated character: `c` odd and square-free.
    pub fn new(family: Family, c: GInt) -> Result<Self> {
        let chi = Self::new_allow_square(family, c)?;
        if !factorize(c)?.is_squarefree() {
            return Err(Error::NotSquarefree(c));
        }
        Ok(chi)
    }

    /// Skips the square-free check. The symbol is still defined, but the
    /// character need not be primitive.
    pub fn new_allow_square(family: Family, c: GInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Zero("character parameter"));
        }
        if !c.is_odd() {
            return Err(Error::EvenParameter(c));
        }
        let modulus = GInt::ONE_PLUS_I
            .checked_pow(family.ramified_exponent())?
            .checked_mul(c)?;
        modulus.checked_norm()?;
        Ok(HeckeCharacter {
            family,
            c,
            modulus,
            conjugated: false,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn c(&self) -> GInt {
        self.c
    }

    pub fn modulus(&self) -> GInt {
        self.modulus
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    /// The complex-conjugate character; the quadratic family is real, so
    /// this only changes quartic values.
    pub fn conj(&self) -> Self {
        HeckeCharacter {
            conjugated: !self.conjugated,
            ..*self
        }
    }

    /// `χ(n)`; 0 unless `n` is coprime to the modulus.
    pub fn eval(&self, n: GInt) -> QuarticValue {
        if n.is_zero() || !n.is_odd() {
            return QuarticValue::ZERO;
        }
        self.eval_primary(primary_core(n))
    }

    /// `χ(n₀)` for a primary `n₀`. The numerator is split as
    /// `i^a (1+i)^b c` and its unit and ramified parts read off the
    /// supplement exponents of `n₀`.
    pub fn eval_primary(&self, n0: GInt) -> QuarticValue {
        debug_assert!(n0.is_primary());
        let sym = quartic_symbol(self.c, n0).expect("primary denominator is odd");
        let Some(ec) = sym.exp() else {
            return QuarticValue::ZERO;
        };
        let er = ramified_supplement_exp(n0) as i64;
        let e = match self.family {
            Family::Quadratic => {
                let eu = unit_supplement_exp(n0) as i64;
                2 * (eu + 5 * er + ec as i64)
            }
            Family::Quartic => 7 * er + ec as i64,
        };
        let v = QuarticValue::from_exp(e);
        if self.conjugated {
            v.conj()
        } else {
            v
        }
    }

    /// The symbol numerator `i(1+i)⁵c` or `(1+i)⁷c`.
    pub fn numerator(&self) -> GInt {
        match self.family {
            Family::Quadratic => GInt::I * GInt::ONE_PLUS_I.pow(5) * self.c,
            Family::Quartic => GInt::ONE_PLUS_I.pow(7) * self.c,
        }
    }

    pub fn is_primitive_brute(&self) -> Result<bool> {
        is_primitive_brute_with(self.modulus, |n| self.eval(n))
    }
}

impl fmt::Display for HeckeCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bar = if self.conjugated { "conj " } else { "" };
        write!(f, "{bar}{} character mod {} (c = {})", self.family, self.modulus, self.c)
    }
}

/// Largest modulus norm accepted by the brute primitivity scan.
pub const PRIMITIVITY_NORM_LIMIT: u64 = 200_000;

/// Divisors of `n` up to associates, each as a product of the listed primes.
pub fn divisors_up_to_associates(n: GInt) -> Result<Vec<GInt>> {
    let f = factorize(n)?;
    let mut out = vec![GInt::ONE];
    for &(p, e) in &f.factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for &d in &out {
            let mut q = d;
            next.push(q);
            for _ in 0..e {
                q = q * p;
                next.push(q);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.cmp_norm_first(b));
    Ok(out)
}

/// `true` iff no proper divisor `d` of `modulus` carries `f` on units mod
/// `modulus`, i.e. every such `d` has `n ≡ n' (mod d)` with `f(n) ≠ f(n')`.
pub fn is_primitive_brute_with<F>(modulus: GInt, f: F) -> Result<bool>
where
    F: Fn(GInt) -> QuarticValue,
{
    let norm = modulus.checked_norm()?;
    if norm > PRIMITIVITY_NORM_LIMIT {
        return Err(Error::ModulusTooLarge {
            norm,
            limit: PRIMITIVITY_NORM_LIMIT,
        });
    }
    let ring = ResidueRing::new(modulus)?;
    let units: Vec<(GInt, QuarticValue)> = ring
        .iter()
        .filter_map(|x| {
            let v = f(x);
            (!v.is_zero()).then_some((x, v))
        })
        .collect();
    for d in divisors_up_to_associates(modulus)? {
        if d.norm() == norm {
            continue;
        }
        let sub = ResidueRing::new(d)?;
        let mut seen: HashMap<GInt, QuarticValue> = HashMap::new();
        let mut separated = false;
        for &(x, v) in &units {
            let key = sub.reduce(x);
            if *seen.entry(key).or_insert(v) != v {
                separated = true;
                break;
            }
        }
        if !separated {
            return Ok(false);
        }
    }
    Ok(true)
}
