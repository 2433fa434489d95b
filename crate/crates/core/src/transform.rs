//! The radial transform `W̃(t) = ∫∫ W(x²+y²) ẽ(−t(x+yi)) dx dy`, tabulation
//! for dense evaluation, and numerical checks of lattice Poisson summation.
//!
//! The angular integral is done in closed form,
//! `∫_0^{2π} cos(2πtr sin θ) dθ = 2π J0(2πtr)`, which leaves
//! `W̃(t) = π ∫_1^2 W(s) J0(2πt√s) ds`. On the plateau `W = 1` and
//! `∫ J0(a√s) ds = 2√s J1(a√s)/a`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauss_sums::{SymbolOrder, GaussSumTable};
use crate::par::{map_collect, map_sum, Execution};
use crate::quadrature::integrate;
use crate::weight::SmoothWeight;
use crate::zint::{isqrt, GInt, ResidueRing};

/// Absolute target for a single transform value.
pub const TRANSFORM_TOL: f64 = 1e-14;
const MAX_PANELS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformValue {
    pub value: f64,
    pub error: f64,
}

fn plateau_part(a: f64, s0: f64, s1: f64) -> f64 {
    if a == 0.0 {
        return s1 - s0;
    }
    let (r0, r1) = (s0.sqrt(), s1.sqrt());
    2.0 * (r1 * libm::j1(a * r1) - r0 * libm::j1(a * r0)) / a
}

/// `W̃(t)` for `t ≥ 0`.
pub fn w_tilde(weight: &SmoothWeight, t: f64) -> Result<TransformValue> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("transform needs t >= 0, got {t}")));
    }
    let a = 2.0 * PI * t;
    let [s0, p, q, s1] = weight.breakpoints();
    let integrand = |s: f64| weight.eval(s) * libm::j0(a * s.sqrt());
    let lo = integrate(integrand, s0, p, 0.5 * TRANSFORM_TOL / PI, MAX_PANELS)?;
    let hi = integrate(integrand, q, s1, 0.5 * TRANSFORM_TOL / PI, MAX_PANELS)?;
    Ok(TransformValue {
        value: PI * (lo.value + plateau_part(a, p, q) + hi.value),
        error: PI * (lo.error + hi.error),
    })
}

/// `W̃(0) = π ∫W` in closed form.
pub fn w_tilde_zero(weight: &SmoothWeight) -> f64 {
    PI * weight.integral()
}

/// Grid step used to locate the tail cutoff.
pub const TAIL_STEP: f64 = 0.1;

/// Smallest grid point `T ≥ 1` with `|W̃| < eps` at every grid point of
/// `[T, 2T]`, searching up to `t_max`. Values are computed in blocks as the
/// window grows, so cost tracks the answer rather than `t_max`.
pub fn tail_cutoff(weight: &SmoothWeight, eps: f64, t_max: f64, exec: Execution) -> Result<f64> {
    const BLOCK: usize = 256;
    let start = (1.0 / TAIL_STEP).round() as usize;
    let last = (t_max / TAIL_STEP).floor() as usize;
    let mut vals: Vec<f64> = Vec::new();
    // index of the most recent value at or above eps
    let mut last_big: Option<usize> = None;
    for k in start..=last {
        while vals.len() <= 2 * k {
            let lo = vals.len();
            let idx: Vec<usize> = (lo..lo + BLOCK).collect();
            let block = map_collect(&idx, |&j| w_tilde(weight, j as f64 * TAIL_STEP), exec);
            for (j, v) in idx.iter().zip(block) {
                let v = v?.value.abs();
                if v >= eps {
                    last_big = Some(*j);
                }
                vals.push(v);
            }
        }
        // every value in [k, 2k] is small iff none of them is big
        let window_clear = match last_big {
            None => true,
            Some(b) if b < k => true,
            Some(_) => vals[k..=2 * k].iter().all(|&v| v < eps),
        };
        if window_clear {
            return Ok(k as f64 * TAIL_STEP);
        }
    }
    Err(Error::TailNotAchievable { eps, t_max })
}

/// Nodes per Chebyshev panel.
pub const TABLE_NODES: usize = 32;
/// Panel width in `t`.
pub const TABLE_PANEL: f64 = 1.0;

/// Piecewise Chebyshev interpolant of `W̃` on `[0, t_cut]`; zero beyond.
#[derive(Clone, Debug)]
pub struct TransformTable {
    weight: SmoothWeight,
    t_cut: f64,
    panels: Vec<[f64; TABLE_NODES + 1]>,
    /// Largest deviation from direct evaluation at off-node probes, plus the
    /// quadrature tolerance.
    pub error_bound: f64,
}

fn cheb_nodes() -> [f64; TABLE_NODES + 1] {
    std::array::from_fn(|j| (PI * j as f64 / TABLE_NODES as f64).cos())
}

fn barycentric(values: &[f64; TABLE_NODES + 1], nodes: &[f64; TABLE_NODES + 1], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..=TABLE_NODES {
        let d = x - nodes[j];
        if d == 0.0 {
            return values[j];
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == TABLE_NODES {
            w *= 0.5;
        }
        num += w * values[j] / d;
        den += w / d;
    }
    num / den
}

impl TransformTable {
    pub fn new(weight: SmoothWeight, t_cut: f64, exec: Execution) -> Result<Self> {
        let count = (t_cut / TABLE_PANEL).ceil().max(1.0) as usize;
        let nodes = cheb_nodes();
        let jobs: Vec<usize> = (0..count).collect();
        let built = map_collect(
            &jobs,
            |&p| -> Result<([f64; TABLE_NODES + 1], f64)> {
                let a = p as f64 * TABLE_PANEL;
                let mut vals = [0.0; TABLE_NODES + 1];
                let mut tol = 0.0f64;
                for (j, x) in nodes.iter().enumerate() {
                    let v = w_tilde(&weight, a + 0.5 * TABLE_PANEL * (x + 1.0))?;
                    vals[j] = v.value;
                    tol = tol.max(v.error);
                }
                // probe halfway between the two nodes nearest each end and the middle
                let mut dev = 0.0f64;
                for j in [0, TABLE_NODES / 2, TABLE_NODES - 1] {
                    let x = 0.5 * (nodes[j] + nodes[j + 1]);
                    let direct = w_tilde(&weight, a + 0.5 * TABLE_PANEL * (x + 1.0))?.value;
                    dev = dev.max((barycentric(&vals, &nodes, x) - direct).abs());
                }
                Ok((vals, dev + tol))
            },
            exec,
        );
        let mut panels = Vec::with_capacity(count);
        let mut error_bound = 0.0f64;
        for b in built {
            let (v, e) = b?;
            panels.push(v);
            error_bound = error_bound.max(e);
        }
        Ok(TransformTable {
            weight,
            t_cut: count as f64 * TABLE_PANEL,
            panels,
            error_bound,
        })
    }

    /// Table reaching the tail cutoff for `eps`.
    pub fn with_tail(weight: SmoothWeight, eps: f64, t_max: f64, exec: Execution) -> Result<Self> {
        let t = tail_cutoff(&weight, eps, t_max, exec)?;
        Self::new(weight, t, exec)
    }

    pub fn weight(&self) -> &SmoothWeight {
        &self.weight
    }

    pub fn t_cut(&self) -> f64 {
        self.t_cut
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.t_cut {
            return 0.0;
        }
        let p = ((t / TABLE_PANEL) as usize).min(self.panels.len() - 1);
        let a = p as f64 * TABLE_PANEL;
        let x = 2.0 * (t - a) / TABLE_PANEL - 1.0;
        barycentric(&self.panels[p], &cheb_nodes(), x)
    }

    /// `(t, W̃(t))` at the panel nodes.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let nodes = cheb_nodes();
        let mut out = Vec::new();
        for (p, vals) in self.panels.iter().enumerate() {
            let a = p as f64 * TABLE_PANEL;
            for j in (0..=TABLE_NODES).rev() {
                out.push((a + 0.5 * TABLE_PANEL * (nodes[j] + 1.0), vals[j]));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoissonVariant {
    /// All `m ∈ Z[i]`, scaled argument `aN(m)/X`.
    Plain,
    /// `m` coprime to `1+i`, dual sum twisted by `(−1)^{N(k)}`.
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
    pub dual_terms: usize,
}

/// `Σ_m χ(m) W(aN(m)/X)` with `χ = (·/n)` of the given order; `odd_only`
/// keeps `m` coprime to `1+i`.
pub fn lattice_side(
    order: SymbolOrder,
    n: GInt,
    a: f64,
    x: f64,
    weight: &SmoothWeight,
    odd_only: bool,
) -> Result<Complex64> {
    let r = (2.0 * x / a).sqrt().ceil() as i64 + 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for re in -r..=r {
        for im in -r..=r {
            let m = GInt::new(re, im);
            if odd_only && !m.is_odd() {
                continue;
            }
            let w = weight.eval(a * m.norm() as f64 / x);
            if w == 0.0 {
                continue;
            }
            acc += order.symbol(m, n)?.to_complex() * w;
        }
    }
    Ok(acc)
}

/// `g(k, n)` for every class `k mod n`.
struct DualCoefficients {
    ring: ResidueRing,
    values: std::collections::HashMap<GInt, Complex64>,
}

impl DualCoefficients {
    fn new(order: SymbolOrder, n: GInt) -> Result<Self> {
        let table = GaussSumTable::new(order, n)?;
        let ring = ResidueRing::new(n)?;
        let values = ring.iter().map(|k| (k, table.sum(k))).collect();
        Ok(DualCoefficients { ring, values })
    }

    fn get(&self, k: GInt) -> Complex64 {
        self.values[&self.ring.reduce(k)]
    }
}

/// Dual side `scale·Σ_k sign(k) g(k,n) W̃(√(N(k)·q))` truncated at the
/// table cutoff.
fn dual_side(
    coeffs: &DualCoefficients,
    table: &TransformTable,
    q: f64,
    alternating: bool,
) -> (Complex64, usize) {
    let kmax = (table.t_cut() * table.t_cut() / q).floor() as u64;
    let r = isqrt(kmax) as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for re in -r..=r {
        for im in -r..=r {
            let k = GInt::new(re, im);
            let nk = k.norm();
            if nk > kmax {
                continue;
            }
            let w = table.eval((nk as f64 * q).sqrt());
            if w == 0.0 {
                continue;
            }
            let sign = if alternating && nk % 2 == 1 { -1.0 } else { 1.0 };
            acc += coeffs.get(k) * (sign * w);
            terms += 1;
        }
    }
    (acc, terms)
}

/// Both sides of lattice Poisson summation for `χ = (·/n)`.
///
/// `Plain`: `Σ_m χ(m) W(aN(m)/X) = (X/(aN(n))) Σ_k g(k,n) W̃(√(N(k)X/(aN(n))))`.
/// `Odd` (ignores `a`): `Σ_{(m,1+i)=1} χ(m) W(N(m)/X)
/// = (X/(2N(n))) χ(1+i) Σ_k (−1)^{N(k)} g(k,n) W̃(√(N(k)X/(2N(n))))`.
pub fn poisson_identity_check(
    order: SymbolOrder,
    n: GInt,
    a: f64,
    x: f64,
    table: &TransformTable,
    variant: PoissonVariant,
) -> Result<PoissonCheck> {
    if !n.is_primary() {
        return Err(Error::NotPrimary(n));
    }
    let weight = *table.weight();
    let coeffs = DualCoefficients::new(order, n)?;
    let nn = n.norm() as f64;
    let (lhs, rhs, dual_terms) = match variant {
        PoissonVariant::Plain => {
            let lhs = lattice_side(order, n, a, x, &weight, false)?;
            let q = x / (a * nn);
            let (s, t) = dual_side(&coeffs, table, q, false);
            (lhs, s * q, t)
        }
        PoissonVariant::Odd => {
            let lhs = lattice_side(order, n, 1.0, x, &weight, true)?;
            let q = x / (2.0 * nn);
            let chi2 = order.symbol(GInt::ONE_PLUS_I, n)?.to_complex();
            let (s, t) = dual_side(&coeffs, table, q, true);
            (lhs, s * chi2 * q, t)
        }
    };
    Ok(PoissonCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).norm(),
        dual_terms,
    })
}

/// `lhs_odd − (lhs(a=1) − χ(1+i)·lhs(a=2))`, which vanishes identically.
pub fn odd_split_residual(order: SymbolOrder, n: GInt, x: f64, weight: &SmoothWeight) -> Result<f64> {
    let odd = lattice_side(order, n, 1.0, x, weight, true)?;
    let all = lattice_side(order, n, 1.0, x, weight, false)?;
    let doubled = lattice_side(order, n, 2.0, x, weight, false)?;
    let chi2 = order.symbol(GInt::ONE_PLUS_I, n)?.to_complex();
    Ok((odd - (all - chi2 * doubled)).norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternatingCheck {
    pub y: f64,
    pub sum: f64,
    pub target: f64,
    pub difference: f64,
}

/// `Σ_{k≠0} (−1)^{N(k)} W̃(N(k)/y)` against `−W̃(0)`. Norms are grouped so
/// each distinct `N(k)` costs one table lookup.
pub fn alternating_lattice_sum_check(table: &TransformTable, y: f64, exec: Execution) -> Result<AlternatingCheck> {
    if !(y >= 4.0) {
        return Err(Error::InvalidArgument(format!("alternating sum needs y >= 4, got {y}")));
    }
    let nmax = (table.t_cut() * y).floor() as u64;
    let reps = representation_counts(nmax);
    let norms: Vec<u64> = (1..=nmax).filter(|&n| reps[n as usize] > 0).collect();
    let sum = map_sum(
        &norms,
        0.0,
        |&n| {
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            sign * reps[n as usize] as f64 * table.eval(n as f64 / y)
        },
        exec,
    );
    let target = -w_tilde_zero(table.weight());
    Ok(AlternatingCheck {
        y,
        sum,
        target,
        difference: (sum - target).abs(),
    })
}

/// `r₂(n) = #{k : N(k) = n}` for `n ≤ nmax`.
pub fn representation_counts(nmax: u64) -> Vec<u32> {
    let mut r = vec![0u32; nmax as usize + 1];
    let s = isqrt(nmax) as i64;
    for a in -s..=s {
        let rest = nmax - (a * a) as u64;
        let t = isqrt(rest) as i64;
        for b in -t..=t {
            r[(a * a + b * b) as usize] += 1;
        }
    }
    r
}

/// `max y_i / x_i`: the smallest `C` with `y ≤ C·x` on the samples.
pub fn fit_constant(samples: &[(f64, f64)]) -> f64 {
    samples.iter().map(|&(x, y)| y / x).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matches_closed_form() {
        for u in [2.0, 4.0, 8.0] {
            let w = SmoothWeight::new(u).unwrap();
            let v = w_tilde(&w, 0.0).unwrap();
            assert!((v.value - w_tilde_zero(&w)).abs() < 1e-12);
        }
    }

    #[test]
    fn bounded_by_pi() {
        let w = SmoothWeight::new(4.0).unwrap();
        for k in 0..200 {
            let v = w_tilde(&w, k as f64 * 0.37).unwrap().value;
            assert!(v.abs() <= PI);
        }
    }

    #[test]
    fn table_interpolates() {
        let w = SmoothWeight::new(3.0).unwrap();
        let table = TransformTable::new(w, 20.0, Execution::Sequential).unwrap();
        assert!(table.error_bound < 1e-12, "{}", table.error_bound);
        for k in 0..97 {
            let t = k as f64 * 0.2031;
            assert!((table.eval(t) - w_tilde(&w, t).unwrap().value).abs() < 1e-12);
        }
        assert_eq!(table.eval(25.0), 0.0);
    }

    #[test]
    fn representation_counts_small() {
        let r = representation_counts(10);
        assert_eq!(&r[..], &[1, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8]);
    }
}
