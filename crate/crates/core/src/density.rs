//! One-level statistics from the explicit-formula prime sums, family
//! averages over square-free moduli, and the random-matrix predictions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::characters::{Family, HeckeCharacter};
use crate::error::{Error, Result};
use crate::par::{map_sum, Execution};
use crate::sieve::{squarefree_annulus, AnnulusSpec, PrimeTable};
use crate::weight::SmoothWeight;
use crate::zint::GInt;

/// Fejér pair `φ(x) = (sin πθx/(πθx))²`, `φ̂(u) = (1/θ)·max(1 − |u|/θ, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunctionPair {
    theta: f64,
}

impl TestFunctionPair {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
        }
        Ok(TestFunctionPair { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self, x: f64) -> f64 {
        let z = PI * self.theta * x;
        if z.abs() < 1e-8 {
            1.0 - z * z / 3.0
        } else {
            (z.sin() / z).powi(2)
        }
    }

    pub fn phi_hat(&self, u: f64) -> f64 {
        (1.0 - u.abs() / self.theta).max(0.0) / self.theta
    }

    /// `φ̂` vanishes for `|u| ≥ θ`.
    pub fn support_radius(&self) -> f64 {
        self.theta
    }

    pub fn integral_phi(&self) -> f64 {
        1.0 / self.theta
    }

    /// `∫φ̂ = φ(0) = 1`.
    pub fn integral_phi_hat(&self) -> f64 {
        1.0
    }
}

/// `∫φ(x)(1 − sin 2πx/(2πx)) dx = ∫φ − ½∫_{−1}^{1} φ̂`.
pub fn quadratic_prediction(pair: &TestFunctionPair) -> f64 {
    let t = pair.theta();
    let inner = if t <= 1.0 { 1.0 } else { 2.0 / t - 1.0 / (t * t) };
    pair.integral_phi() - 0.5 * inner
}

/// `∫φ`.
pub fn quartic_prediction(pair: &TestFunctionPair) -> f64 {
    pair.integral_phi()
}

pub fn prediction(family: Family, pair: &TestFunctionPair) -> f64 {
    match family {
        Family::Quadratic => quadratic_prediction(pair),
        Family::Quartic => quartic_prediction(pair),
    }
}

/// Largest norm with `φ̂(log N/log X) ≠ 0`, i.e. below `X^θ`.
pub fn prime_cutoff(x: f64, pair: &TestFunctionPair) -> u64 {
    let y = x.powf(pair.support_radius());
    let f = y.floor();
    if f == y {
        f as u64 - 1
    } else {
        f as u64
    }
}

/// The primes and coefficients `(log N/√N)·φ̂(log N/log X)/log X`
/// entering `S(χ, X; φ̂)`.
#[derive(Clone, Debug)]
pub struct PrimeSumPlan {
    pub x: f64,
    pub terms: Vec<(GInt, f64)>,
}

impl PrimeSumPlan {
    pub fn new(x: f64, pair: &TestFunctionPair, primes: &PrimeTable) -> Result<Self> {
        let log_x = x.ln();
        let cutoff = prime_cutoff(x, pair);
        let terms = primes
            .upto(cutoff)?
            .iter()
            .filter_map(|p| {
                let h = pair.phi_hat(p.log_norm / log_x);
                (h != 0.0).then(|| (p.value, p.log_norm / (p.norm as f64).sqrt() * h / log_x))
            })
            .collect();
        Ok(PrimeSumPlan { x, terms })
    }
}

/// `S(χ, X; φ̂) = (1/log X) Σ_ϖ (log N(ϖ)/√N(ϖ)) χ(ϖ) φ̂(log N(ϖ)/log X)`.
pub fn prime_sum_s(chi: &HeckeCharacter, plan: &PrimeSumPlan) -> Complex64 {
    let mut acc = [0.0f64; 4];
    for &(p, w) in &plan.terms {
        if let Some(e) = chi.eval_primary(p).exp() {
            acc[e as usize] += w;
        }
    }
    Complex64::new(acc[0] - acc[2], acc[1] - acc[3])
}

/// `∫φ − ½∫φ̂ − 2S(χ_{i(1+i)⁵c})`.
pub fn one_level_quadratic(c: GInt, pair: &TestFunctionPair, plan: &PrimeSumPlan) -> Result<f64> {
    let chi = HeckeCharacter::new_allow_square(Family::Quadratic, c)?;
    let s = prime_sum_s(&chi, plan);
    Ok(pair.integral_phi() - 0.5 * pair.integral_phi_hat() - 2.0 * s.re)
}

/// `∫φ − S(χ) − S(χ̄)` for `χ = χ_{(1+i)⁷c}`, returned with the imaginary
/// part of `S(χ) + S(χ̄)`.
pub fn one_level_quartic_parts(c: GInt, pair: &TestFunctionPair, plan: &PrimeSumPlan) -> Result<(f64, f64)> {
    let chi = HeckeCharacter::new_allow_square(Family::Quartic, c)?;
    let total = prime_sum_s(&chi, plan) + prime_sum_s(&chi.conj(), plan);
    Ok((pair.integral_phi() - total.re, total.im))
}

pub fn one_level_quartic(c: GInt, pair: &TestFunctionPair, plan: &PrimeSumPlan) -> Result<f64> {
    one_level_quartic_parts(c, pair, plan).map(|(v, _)| v)
}

pub fn one_level(family: Family, c: GInt, pair: &TestFunctionPair, plan: &PrimeSumPlan) -> Result<f64> {
    match family {
        Family::Quadratic => one_level_quadratic(c, pair, plan),
        Family::Quartic => one_level_quartic(c, pair, plan),
    }
}

/// `log log 3X / log X`, the size of the explicit-formula error term.
pub fn trunc_error_model(x: f64) -> f64 {
    (3.0 * x).ln().ln() / x.ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub family: Family,
    pub x: u64,
    pub theta: f64,
    pub y: u64,
    pub num_c: usize,
    /// `(1/#C(X)) Σ_c S(χ_c)·Φ(N(c)/X)`.
    pub average: f64,
    pub prediction: f64,
    pub discrepancy: f64,
    pub trunc_error_model: f64,
    pub u: f64,
    /// `Σ_c Φ(N(c)/X)`, which is `≈ (1 − 1/U)·#C(X)`.
    pub weight_sum: f64,
}

impl DensityReport {
    /// The same weighted sum divided by `Σ Φ` instead of `#C(X)`.
    pub fn weight_normalized_average(&self) -> f64 {
        self.average * self.num_c as f64 / self.weight_sum
    }
}

/// Family average over the annulus `X ≤ N(c) ≤ 2X`. The c-list is sorted
/// and reduced in fixed chunks, so the result does not depend on threads.
pub fn family_average(
    family: Family,
    x: u64,
    pair: &TestFunctionPair,
    weight: &SmoothWeight,
    primes: &PrimeTable,
    exec: Execution,
) -> Result<DensityReport> {
    let cs = squarefree_annulus(AnnulusSpec::new(x)?);
    family_average_over(family, x, &cs, pair, weight, primes, exec)
}

/// As [`family_average`] with a caller-supplied c-list.
pub fn family_average_over(
    family: Family,
    x: u64,
    cs: &[GInt],
    pair: &TestFunctionPair,
    weight: &SmoothWeight,
    primes: &PrimeTable,
    exec: Execution,
) -> Result<DensityReport> {
    let xf = x as f64;
    let plan = PrimeSumPlan::new(xf, pair, primes)?;
    let weighted: Vec<(GInt, f64)> = cs
        .iter()
        .map(|&c| (c, weight.eval(c.norm() as f64 / xf)))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    for &(c, _) in &weighted {
        if !c.is_odd() {
            return Err(Error::EvenParameter(c));
        }
    }
    let total = map_sum(
        &weighted,
        0.0,
        |&(c, w)| one_level(family, c, pair, &plan).expect("odd parameter") * w,
        exec,
    );
    let weight_sum = map_sum(&weighted, 0.0, |&(_, w)| w, exec);
    let average = total / cs.len() as f64;
    let prediction = prediction(family, pair);
    Ok(DensityReport {
        family,
        x,
        theta: pair.theta(),
        y: prime_cutoff(xf, pair),
        num_c: cs.len(),
        average,
        prediction,
        discrepancy: (average - prediction).abs(),
        trunc_error_model: trunc_error_model(xf),
        u: weight.u(),
        weight_sum,
    })
}

/// Constants bounding the proportions of vanishing and non-vanishing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanishingConstants {
    /// `(cot ¼ − 3)/8`: upper bound for the average order of vanishing,
    /// quadratic family.
    pub quadratic_vanishing: f64,
    /// `(19 − cot ¼)/16`: lower bound for the non-vanishing proportion,
    /// quadratic family.
    pub quadratic_nonvanishing: f64,
    /// `19/20`, quartic average order bound.
    pub quartic_vanishing: f64,
    /// `1/20`, quartic non-vanishing proportion.
    pub quartic_nonvanishing: f64,
}

pub fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

pub fn vanishing_constants() -> VanishingConstants {
    let c = cot(0.25);
    VanishingConstants {
        quadratic_vanishing: (c - 3.0) / 8.0,
        quadratic_nonvanishing: (19.0 - c) / 16.0,
        quartic_vanishing: 19.0 / 20.0,
        quartic_nonvanishing: 1.0 / 20.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_closed_forms() {
        let p = TestFunctionPair::new(1.0).unwrap();
        assert_eq!(p.phi(0.0), 1.0);
        assert!(p.phi(1.0).abs() < 1e-30);
        assert_eq!(p.phi_hat(0.0), 1.0);
        assert_eq!(p.phi_hat(1.0), 0.0);
        let q = TestFunctionPair::new(0.5).unwrap();
        assert_eq!(q.integral_phi(), 2.0);
        assert_eq!(q.phi_hat(0.25), 1.0);
        assert!(TestFunctionPair::new(0.0).is_err());
    }

    #[test]
    fn predictions() {
        let p = TestFunctionPair::new(1.0).unwrap();
        assert_eq!(quadratic_prediction(&p), 0.5);
        assert_eq!(quartic_prediction(&p), 1.0);
        let p = TestFunctionPair::new(0.5).unwrap();
        assert_eq!(quadratic_prediction(&p), 1.5);
        let p = TestFunctionPair::new(2.0).unwrap();
        assert_eq!(quadratic_prediction(&p), 0.125);
    }

    #[test]
    fn tiny_support_gives_empty_prime_sum() {
        let primes = PrimeTable::new(100);
        let pair = TestFunctionPair::new(0.1).unwrap();
        let plan = PrimeSumPlan::new(1e6, &pair, &primes).unwrap();
        // 10^{0.6} < 5
        assert!(plan.terms.is_empty());
        let v = one_level_quadratic(GInt::new(3, -2), &pair, &plan).unwrap();
        assert_eq!(v, pair.integral_phi() - 0.5);
        assert_eq!(one_level_quartic(GInt::new(3, -2), &pair, &plan).unwrap(), 10.0);
    }

    #[test]
    fn cutoff_excludes_the_support_edge() {
        let pair = TestFunctionPair::new(1.0).unwrap();
        assert_eq!(prime_cutoff(1000.0, &pair), 999);
        let primes = PrimeTable::new(10);
        assert!(matches!(
            PrimeSumPlan::new(1000.0, &pair, &primes),
            Err(Error::PrimeCutoff { .. })
        ));
    }

    #[test]
    fn constants() {
        let k = vanishing_constants();
        assert!((k.quadratic_nonvanishing - 0.942_73).abs() < 1e-5);
        assert!((k.quadratic_vanishing - 0.114_54).abs() < 1e-5);
        assert_eq!(k.quartic_nonvanishing, 0.05);
    }
}
