//! The smooth annulus weight `Φ(t) = s(U(t−1))·s(U(2−t))` and its first
//! four derivatives.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Truncated Taylor series `Σ_{k≤4} c_k h^k`, enough for four derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; 5]);

impl Jet {
    pub const ORDER: usize = 4;

    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0, 0.0])
    }

    /// The affine map `x ↦ x0 + slope·h`.
    pub fn variable(x0: f64, slope: f64) -> Self {
        Jet([x0, slope, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `f^{(k)}` for k = 0..=4.
    pub fn derivatives(&self) -> [f64; 5] {
        let mut out = self.0;
        let mut fact = 1.0;
        for (k, d) in out.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *d *= fact;
        }
        out
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [0.0; 5];
        b[0] = 1.0 / a[0];
        for k in 1..5 {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet(b)
    }

    pub fn exp(self) -> Self {
        let a = self.0;
        let mut e = [0.0; 5];
        e[0] = a[0].exp();
        for k in 1..5 {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet(std::array::from_fn(|k| (0..=k).map(|j| self.0[j] * rhs.0[k - j]).sum()))
    }
}

/// `ψ(x) = exp(−1/x)` for `x > 0`, 0 otherwise; flat to all orders at 0.
fn psi(x: Jet) -> Jet {
    if x.value() <= 0.0 {
        Jet::constant(0.0)
    } else {
        (-x.recip()).exp()
    }
}

/// Smooth step `s(x) = ψ(x)/(ψ(x) + ψ(1−x))`.
pub fn smooth_step(x: Jet) -> Jet {
    if x.value() <= 0.0 {
        return Jet::constant(0.0);
    }
    if x.value() >= 1.0 {
        return Jet::constant(1.0);
    }
    let p = psi(x);
    let q = psi(Jet::constant(1.0) - x);
    p * (p + q).recip()
}

fn smooth_step_value(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        // s(x) = 1/(1 + exp(1/x − 1/(1−x)))
        1.0 / (1.0 + (1.0 / x - 1.0 / (1.0 - x)).exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothWeight {
    u: f64,
}

impl SmoothWeight {
    pub fn new(u: f64) -> Result<Self> {
        if !(u >= 2.0) || !u.is_finite() {
            return Err(Error::InvalidArgument(format!("weight needs U >= 2, got {u}")));
        }
        Ok(SmoothWeight { u })
    }

    /// `U = max(2, log log X)`.
    pub fn for_x(x: f64) -> Self {
        let ll = if x > std::f64::consts::E { x.ln().ln() } else { 0.0 };
        SmoothWeight { u: ll.max(2.0) }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 1.0 || t >= 2.0 {
            return 0.0;
        }
        smooth_step_value(self.u * (t - 1.0)) * smooth_step_value(self.u * (2.0 - t))
    }

    pub fn jet(&self, t: f64) -> Jet {
        if t <= 1.0 || t >= 2.0 {
            return Jet::constant(0.0);
        }
        let rise = smooth_step(Jet::variable(self.u * (t - 1.0), self.u));
        let fall = smooth_step(Jet::variable(self.u * (2.0 - t), -self.u));
        rise * fall
    }

    /// `[Φ, Φ', Φ'', Φ''', Φ'''']` at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; 5] {
        self.jet(t).derivatives()
    }

    /// `1 + 1/U` and `2 − 1/U`.
    pub fn plateau(&self) -> (f64, f64) {
        (1.0 + 1.0 / self.u, 2.0 - 1.0 / self.u)
    }

    /// Support split at the plateau ends.
    pub fn breakpoints(&self) -> [f64; 4] {
        let (p, q) = self.plateau();
        [1.0, p, q, 2.0]
    }

    /// `∫Φ = 1 − 1/U`: each ramp integrates to `1/(2U)` because
    /// `s(x) + s(1−x) = 1`.
    pub fn integral(&self) -> f64 {
        1.0 - 1.0 / self.u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        for u in [4.0, 8.0, 16.0] {
            let w = SmoothWeight::new(u).unwrap();
            assert_eq!(w.eval(1.5), 1.0);
            assert_eq!(w.eval(1.0), 0.0);
            assert_eq!(w.eval(0.3), 0.0);
            assert_eq!(w.eval(2.0), 0.0);
            assert_eq!(w.eval(2.7), 0.0);
        }
        assert!(SmoothWeight::new(1.5).is_err());
        assert_eq!(SmoothWeight::for_x(1e3).u(), 2.0);
    }

    #[test]
    fn step_symmetry() {
        for k in 1..100 {
            let x = k as f64 / 100.0;
            assert!((smooth_step_value(x) + smooth_step_value(1.0 - x) - 1.0).abs() < 1e-15);
            assert!((smooth_step(Jet::variable(x, 1.0)).value() - smooth_step_value(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let w = SmoothWeight::new(5.0).unwrap();
        let h = 1e-4;
        for &t in &[1.05, 1.11, 1.9, 1.83] {
            let d = w.derivatives(t);
            let at = |dt: f64| w.derivatives(t + dt);
            let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
            for k in 0..4 {
                let fd = (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h);
                let scale = 1.0 + d[k + 1].abs();
                assert!((fd - d[k + 1]).abs() < 1e-5 * scale, "t={t} k={k}: {fd} vs {}", d[k + 1]);
            }
        }
    }

    #[test]
    fn jet_algebra() {
        let x = Jet::variable(0.7, 1.0);
        let r = x * x.recip();
        assert!((r.0[0] - 1.0).abs() < 1e-15);
        assert!(r.0[1..].iter().all(|c| c.abs() < 1e-14));
        let e = Jet::variable(0.0, 1.0).exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        assert!(e.0.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
    }
}
