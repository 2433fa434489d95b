use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::Config;

use gaussdensity::characters::{Family, HeckeCharacter};
use gaussdensity::density::{family_average_over, one_level_quartic_parts, PrimeSumPlan, TestFunctionPair};
use gaussdensity::gauss_sums::{agrees, gauss_sum_brute, g2_closed, g4_closed, GaussSumTable, SymbolOrder};
use gaussdensity::par::{map_sum, with_threads, Execution};
use gaussdensity::quadrature::integrate_pieces;
use gaussdensity::sieve::{squarefree_annulus, AnnulusSpec, PrimeTable};
use gaussdensity::symbols::{quadratic_symbol, quartic_symbol, quartic_symbol_prime_oracle};
use gaussdensity::transform::w_tilde;
use gaussdensity::weight::SmoothWeight;
use gaussdensity::zint::{
    coprime, divrem, factorize, primary_decompose, primary_upto, residue_system, GInt,
};

fn gint(r: i64) -> impl Strategy<Value = GInt> {
    (-r..=r, -r..=r).prop_map(|(a, b)| GInt::new(a, b))
}

fn nonzero(r: i64) -> impl Strategy<Value = GInt> {
    gint(r).prop_filter("nonzero", |z| !z.is_zero())
}

fn odd(r: i64) -> impl Strategy<Value = GInt> {
    gint(r).prop_filter("odd", |z| z.is_odd())
}

fn primary(max_norm: u64) -> impl Strategy<Value = GInt> {
    let all: Vec<GInt> = primary_upto(max_norm).into_iter().filter(|z| !z.is_unit()).collect();
    proptest::sample::select(all)
}

fn primary_prime(max_norm: u64) -> impl Strategy<Value = GInt> {
    let ps: Vec<GInt> = gaussdensity::sieve::primary_primes_upto(max_norm).into_iter().map(|p| p.value).collect();
    proptest::sample::select(ps)
}

fn squarefree_c(max_norm: u64) -> impl Strategy<Value = GInt> {
    proptest::sample::select(gaussdensity::sieve::squarefree_in_norm_range(1, max_norm))
}

proptest! {
    #![proptest_config(Config::with_cases(256))]

    #[test]
    fn norm_is_multiplicative(z in gint(10_000), w in gint(10_000)) {
        prop_assert_eq!((z * w).norm(), z.norm() * w.norm());
    }

    #[test]
    fn divrem_reconstructs(n in gint(1_000_000), d in nonzero(1_000)) {
        let (q, r) = divrem(n, d).unwrap();
        prop_assert_eq!(q * d + r, n);
        prop_assert!(2 * r.norm() <= d.norm());
    }

    #[test]
    fn exactly_one_primary_associate(n in odd(100)) {
        let count = (0..4).filter(|&u| n.mul_unit(u).is_primary()).count();
        prop_assert_eq!(count, 1);
        let d = primary_decompose(n).unwrap();
        prop_assert_eq!(d.core.mul_unit(d.unit_exp), n);
    }

    #[test]
    fn factorize_inverts_multiplication(
        ps in proptest::collection::vec(primary(1_000), 1..4),
        u in 0u32..4,
        two in 0u32..3,
    ) {
        let n = ps.iter().fold(GInt::ONE_PLUS_I.pow(two), |acc, &p| acc * p).mul_unit(u);
        prop_assume!(n.norm() <= 1_000_000_000);
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.product(), n);
        for &(p, _) in &f.factors {
            prop_assert!(p == GInt::ONE_PLUS_I || p.is_primary());
        }
    }

    #[test]
    fn quartic_symbol_multiplicative_in_numerator(a in gint(300), b in gint(300), n in primary(100)) {
        prop_assert_eq!(
            quartic_symbol(a * b, n).unwrap(),
            quartic_symbol(a, n).unwrap() * quartic_symbol(b, n).unwrap()
        );
    }

    #[test]
    fn quartic_symbol_multiplicative_in_denominator(a in gint(300), m in primary(200), n in primary(200)) {
        prop_assert_eq!(
            quartic_symbol(a, m * n).unwrap(),
            quartic_symbol(a, m).unwrap() * quartic_symbol(a, n).unwrap()
        );
    }

    #[test]
    fn quartic_symbol_matches_oracle(a in gint(10_000), p in primary_prime(5_000)) {
        prop_assert_eq!(quartic_symbol(a, p).unwrap(), quartic_symbol_prime_oracle(a, p).unwrap());
    }

    #[test]
    fn quadratic_is_quartic_squared(a in gint(10_000), n in primary(5_000)) {
        prop_assert_eq!(quadratic_symbol(a, n).unwrap(), quartic_symbol(a, n).unwrap().square());
    }
}

#[test]
fn divrem_exhaustive_small_norms() {
    let small: Vec<GInt> = (-15..=15)
        .flat_map(|a| (-15..=15).map(move |b| GInt::new(a, b)))
        .filter(|z| z.norm() <= 200)
        .collect();
    for &n in &small {
        for &d in small.iter().filter(|d| !d.is_zero()) {
            let (q, r) = divrem(n, d).unwrap();
            assert_eq!(q * d + r, n);
            assert!(2 * r.norm() <= d.norm(), "{n} / {d}");
        }
    }
}

#[test]
fn primary_associates_exhaustive() {
    for a in -100i64..=100 {
        for b in -100i64..=100 {
            let z = GInt::new(a, b);
            if z.norm() > 10_000 || !z.is_odd() {
                continue;
            }
            assert_eq!((0..4).filter(|&u| z.mul_unit(u).is_primary()).count(), 1, "{z}");
        }
    }
}

#[test]
fn residue_systems_are_complete_and_incongruent() {
    for n in primary_upto(200).into_iter().chain([GInt::new(2, 0), GInt::new(1, 1), GInt::new(4, 2)]) {
        let rs: Vec<GInt> = residue_system(n).unwrap().collect();
        assert_eq!(rs.len() as u64, n.norm(), "{n}");
        for (i, &x) in rs.iter().enumerate() {
            for &y in &rs[i + 1..] {
                assert!(!n.divides(x - y), "{x} ≡ {y} mod {n}");
            }
        }
    }
}

#[test]
fn numerator_multiplicativity_exhaustive() {
    for n in primary_upto(100).into_iter().filter(|z| !z.is_unit()) {
        let rs: Vec<GInt> = residue_system(n).unwrap().collect();
        let sym: Vec<_> = rs.iter().map(|&a| quartic_symbol(a, n).unwrap()).collect();
        for (i, &a) in rs.iter().enumerate() {
            for (j, &b) in rs.iter().enumerate() {
                assert_eq!(quartic_symbol(a * b, n).unwrap(), sym[i] * sym[j], "({a}·{b}/{n})");
            }
        }
    }
}

proptest! {
    #![proptest_config(Config::with_cases(64))]

    #[test]
    fn gauss_sum_twist_law(r in gint(50), s in gint(50), n in primary(50)) {
        prop_assume!(coprime(s, n));
        for order in [SymbolOrder::Quadratic, SymbolOrder::Quartic] {
            let lhs = gauss_sum_brute(order, s * r, n).unwrap();
            let rhs = order.symbol(s, n).unwrap().conj().to_complex() * gauss_sum_brute(order, r, n).unwrap();
            prop_assert!(agrees(lhs, rhs, n, 1e-9), "{:?} r={} s={} n={}: {} vs {}", order, r, s, n, lhs, rhs);
        }
    }

    #[test]
    fn gauss_sums_multiply_over_coprime_moduli(m in primary(100), n in primary(100), r in gint(30)) {
        prop_assume!(coprime(m, n) && (m * n).norm() <= 400);
        let mn = m * n;
        let quad = GaussSumTable::new(SymbolOrder::Quadratic, mn).unwrap().sum(r);
        prop_assert!(agrees(g2_closed(r, mn).unwrap(), quad, mn, 1e-8));
        let quart = GaussSumTable::new(SymbolOrder::Quartic, mn).unwrap().sum(r);
        prop_assert!(agrees(g4_closed(r, mn).unwrap(), quart, mn, 1e-8));
        // Brute-force product rule: g(r, mn) = χ_m(n) χ_n(m) g(r, m) g(r, n) for the quadratic symbol.
        let cross = (quadratic_symbol(n, m).unwrap() * quadratic_symbol(m, n).unwrap()).to_complex();
        let prod = cross
            * gauss_sum_brute(SymbolOrder::Quadratic, r, m).unwrap()
            * gauss_sum_brute(SymbolOrder::Quadratic, r, n).unwrap();
        prop_assert!(agrees(prod, quad, mn, 1e-8), "{} vs {}", prod, quad);
    }

    #[test]
    fn characters_periodic_and_multiplicative(
        c in squarefree_c(100),
        quartic in any::<bool>(),
        ms in proptest::collection::vec((gint(500), gint(500), gint(8)), 1000),
    ) {
        let family = if quartic { Family::Quartic } else { Family::Quadratic };
        let chi = HeckeCharacter::new(family, c).unwrap();
        let q = chi.modulus();
        for &(m, n, k) in &ms {
            prop_assert_eq!(chi.eval(m), chi.eval(m + k * q), "m={} k={}", m, k);
            prop_assert_eq!(chi.eval(m * n), chi.eval(m) * chi.eval(n), "m={} n={}", m, n);
            prop_assert_eq!(chi.conj().eval(m), chi.eval(m).conj());
            let v = chi.eval(m);
            prop_assert_eq!(v.pow(family.order()).is_zero(), v.is_zero());
            if !v.is_zero() {
                prop_assert_eq!(v.pow(family.order()), gaussdensity::symbols::QuarticValue::ONE);
            }
        }
    }

    #[test]
    fn character_is_the_kronecker_symbol_of_its_numerator(c in squarefree_c(100), n in odd(400)) {
        for family in [Family::Quadratic, Family::Quartic] {
            let chi = HeckeCharacter::new(family, c).unwrap();
            let core = primary_decompose(n).unwrap().core;
            let direct = match family {
                Family::Quadratic => quadratic_symbol(chi.numerator(), core).unwrap(),
                Family::Quartic => quartic_symbol(chi.numerator(), core).unwrap(),
            };
            prop_assert_eq!(chi.eval(n), direct);
        }
    }
}

fn fejer_integral(pair: &TestFunctionPair, f: impl Fn(f64) -> f64) -> f64 {
    let theta = pair.theta();
    let t = 1000.0 / theta;
    // Panels one period of sin²(πθx) wide.
    let breaks: Vec<f64> = (0..=1000).map(|k| k as f64 / theta).collect();
    debug_assert!((breaks[1000] - t).abs() < 1e-9);
    2.0 * integrate_pieces(&f, &breaks, 1e-9, 64).unwrap().value
}

proptest! {
    #![proptest_config(Config::with_cases(12))]

    // Below θ ≈ 1.013 the mass outside [−10³/θ, 10³/θ], 1/(π²θ·10³), alone exceeds 1e−4.
    #[test]
    fn fejer_integral_is_one_over_theta(theta in 1.02f64..3.0) {
        let pair = TestFunctionPair::new(theta).unwrap();
        let v = fejer_integral(&pair, |x| pair.phi(x));
        prop_assert!((v - 1.0 / theta).abs() < 1e-4, "θ={}: {}", theta, v);
    }

    #[test]
    fn fejer_transform_is_the_triangle(theta in 1.02f64..3.0) {
        let pair = TestFunctionPair::new(theta).unwrap();
        for k in 0..20 {
            let u = theta * (-1.425 + 0.15 * k as f64);
            let v = fejer_integral(&pair, |x| pair.phi(x) * (2.0 * PI * u * x).cos());
            prop_assert!((v - pair.phi_hat(u)).abs() < 1e-4, "θ={} u={}: {} vs {}", theta, u, v, pair.phi_hat(u));
        }
    }
}

#[test]
fn fejer_truncated_mass_matches_tail_estimate() {
    for theta in [0.25, 0.5, 1.0] {
        let pair = TestFunctionPair::new(theta).unwrap();
        let v = fejer_integral(&pair, |x| pair.phi(x));
        let tail = 1.0 / (PI * PI * theta * theta * (1000.0 / theta));
        assert!((1.0 / theta - v - tail).abs() < 1e-6, "θ={theta}: {v}");
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫₀^{2π} ∫₁^{√2} cos(2πtr sin α) W(r²) r dr dα`: trapezoid in α,
/// composite Gauss–Legendre in r.
fn w_tilde_polar(weight: &SmoothWeight, t: f64) -> f64 {
    let gl = gauss_legendre(20);
    let panels = 200;
    let (a, b) = (1.0f64, 2f64.sqrt());
    let h = (b - a) / panels as f64;
    let mut radial = Vec::new();
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for &(x, w) in &gl {
            let r = c + 0.5 * h * x;
            let wr = weight.eval(r * r);
            if wr != 0.0 {
                radial.push((r, 0.5 * h * w * wr * r));
            }
        }
    }
    let m = (2.0 * PI * t * b) as usize + 64;
    let mut total = 0.0;
    for j in 0..m {
        let s = (2.0 * PI * j as f64 / m as f64).sin();
        total += radial.iter().map(|&(r, w)| w * (2.0 * PI * t * r * s).cos()).sum::<f64>();
    }
    total * 2.0 * PI / m as f64
}

proptest! {
    #![proptest_config(Config::with_cases(24))]

    #[test]
    fn transform_matches_polar_quadrature(u in 2.0f64..16.0, t in 0.0f64..25.0) {
        let weight = SmoothWeight::new(u).unwrap();
        let fast = w_tilde(&weight, t).unwrap().value;
        let oracle = w_tilde_polar(&weight, t);
        prop_assert!((fast - oracle).abs() < 1e-6, "U={} t={}: {} vs {}", u, t, fast, oracle);
        prop_assert!(fast.abs() <= PI);
    }
}

#[test]
fn weight_derivatives_scale_with_u() {
    let max_abs = |u: f64, k: usize| {
        let w = SmoothWeight::new(u).unwrap();
        (1..20_000)
            .map(|j| w.derivatives(1.0 + j as f64 / 20_000.0)[k].abs())
            .fold(0.0, f64::max)
    };
    for k in 1..=4 {
        let c = max_abs(4.0, k) / 4f64.powi(k as i32);
        for u in [8.0, 16.0] {
            let m = max_abs(u, k);
            assert!(m <= 1.01 * c * u.powi(k as i32), "k={k} U={u}: {m} vs C={c}");
        }
    }
}

fn small_family(x: u64) -> (Vec<GInt>, PrimeTable, TestFunctionPair, SmoothWeight) {
    let cs = squarefree_annulus(AnnulusSpec::new(x).unwrap());
    (cs, PrimeTable::new(x), TestFunctionPair::new(1.0).unwrap(), SmoothWeight::for_x(x as f64))
}

proptest! {
    #![proptest_config(Config::with_cases(8))]

    #[test]
    fn family_average_ignores_enumeration_order(seed in any::<u64>(), quartic in any::<bool>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let family = if quartic { Family::Quartic } else { Family::Quadratic };
        let (cs, primes, pair, weight) = small_family(400);
        let base = family_average_over(family, 400, &cs, &pair, &weight, &primes, Execution::Sequential).unwrap();
        let mut shuffled = cs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let perm = family_average_over(family, 400, &shuffled, &pair, &weight, &primes, Execution::Parallel).unwrap();
        prop_assert!((base.average - perm.average).abs() < 1e-10);
    }
}

#[test]
fn quartic_statistic_is_real() {
    let (cs, primes, pair, _) = small_family(2_000);
    let plan = PrimeSumPlan::new(2_000.0, &pair, &primes).unwrap();
    for &c in &cs {
        let (_, im) = one_level_quartic_parts(c, &pair, &plan).unwrap();
        assert!(im.abs() < 1e-12, "c = {c}: {im}");
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let (cs, primes, pair, weight) = small_family(1_000);
    for family in [Family::Quadratic, Family::Quartic] {
        let seq = family_average_over(family, 1_000, &cs, &pair, &weight, &primes, Execution::Sequential).unwrap();
        let par = family_average_over(family, 1_000, &cs, &pair, &weight, &primes, Execution::Parallel).unwrap();
        let threads =
            with_threads(Some(3), || family_average_over(family, 1_000, &cs, &pair, &weight, &primes, Execution::Parallel))
                .unwrap();
        assert_eq!(seq.average.to_bits(), par.average.to_bits());
        assert_eq!(seq.average.to_bits(), threads.average.to_bits());
    }
    let xs: Vec<f64> = (0..5_000).map(|k| (k as f64).sqrt().sin()).collect();
    assert_eq!(
        map_sum(&xs, 0.0, |x| x * x, Execution::Sequential).to_bits(),
        map_sum(&xs, 0.0, |x| x * x, Execution::Parallel).to_bits()
    );
}
