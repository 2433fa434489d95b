//! Invariant suites behind the `verify` subcommand.
//!
//! Each suite returns one [`Property`] per invariant; a failing property
//! carries its first counterexample in `detail`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::{Family, HeckeCharacter};
use crate::error::{Error, Result};
use crate::gauss_sums::{
    agrees, g2_closed_traced, g4_closed_traced, g_base_prime, GaussSumTable, G2Case, G4Case, SymbolOrder,
};
use crate::par::{map_collect, Execution};
use crate::sieve::{
    chebyshev_sum, primary_primes_upto, squarefree_count_check, squarefree_count_mobius, squarefree_in_norm_range,
    PrimeTable,
};
use crate::symbols::{
    quadratic_symbol, quartic_symbol, quartic_symbol_prime_oracle, ramified_supplement_exp, reciprocity_check,
    unit_supplement_exp, QuarticValue,
};
use crate::transform::{odd_split_residual, poisson_identity_check, PoissonVariant, TransformTable};
use crate::weight::SmoothWeight;
use crate::zint::{coprime, factorize, primary_upto, residue_system, GInt};

#[derive(Clone, Debug, PartialEq)]
pub struct Property {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Property {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Property {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// Passes iff `first_failure` is `None`; `summary` describes a pass.
    fn from_search(name: &str, first_failure: Option<String>, summary: String) -> Self {
        match first_failure {
            None => Property::new(name, true, summary),
            Some(c) => Property::new(name, false, format!("counterexample: {c}")),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Symbols,
    GaussSums,
    Characters,
    Poisson,
    Counts,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Symbols,
        Suite::GaussSums,
        Suite::Characters,
        Suite::Poisson,
        Suite::Counts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symbols => "symbols",
            Suite::GaussSums => "gauss-sums",
            Suite::Characters => "characters",
            Suite::Poisson => "poisson",
            Suite::Counts => "counts",
        }
    }

    pub fn default_max_norm(self) -> u64 {
        match self {
            Suite::Symbols => 500,
            Suite::GaussSums => 100,
            Suite::Characters => 50,
            Suite::Poisson => 25,
            Suite::Counts => 100_000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

pub fn run_suite(suite: Suite, max_norm: Option<u64>, seed: u64, exec: Execution) -> Result<Vec<Property>> {
    let n = max_norm.unwrap_or(suite.default_max_norm());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Symbols => symbols_suite(n, &mut rng, exec),
        Suite::GaussSums => gauss_sums_suite(n, &mut rng, exec),
        Suite::Characters => characters_suite(n, &mut rng),
        Suite::Poisson => poisson_suite(n, exec),
        Suite::Counts => counts_suite(n),
    }
}

fn primes_upto(n: u64) -> Vec<GInt> {
    primary_primes_upto(n).into_iter().map(|p| p.value).collect()
}

fn random_gint(rng: &mut ChaCha8Rng, r: i64) -> GInt {
    GInt::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

/// Oracle comparison over every residue of every primary prime of norm `≤ n`.
pub fn symbol_oracle_mismatches(n: u64, exec: Execution) -> Result<(usize, Option<String>)> {
    let primes = primes_upto(n);
    let per_prime = map_collect(
        &primes,
        |&p| -> Result<(usize, Option<String>)> {
            let mut checked = 0;
            for a in residue_system(p)? {
                checked += 1;
                let fast = quartic_symbol(a, p)?;
                let slow = quartic_symbol_prime_oracle(a, p)?;
                if fast != slow {
                    return Ok((checked, Some(format!("({a}/{p})₄: {fast} vs oracle {slow}"))));
                }
            }
            Ok((checked, None))
        },
        exec,
    );
    let mut total = 0;
    for r in per_prime {
        let (k, bad) = r?;
        total += k;
        if bad.is_some() {
            return Ok((total, bad));
        }
    }
    Ok((total, None))
}

/// Reciprocity over all ordered pairs of distinct primary primes of norm `≤ n`.
pub fn reciprocity_failures(n: u64) -> Result<(usize, Option<String>)> {
    let primes = primes_upto(n);
    let mut pairs = 0;
    for (k, &m) in primes.iter().enumerate() {
        for &q in &primes[k + 1..] {
            pairs += 1;
            if !reciprocity_check(m, q)? {
                return Ok((pairs, Some(format!("m = {m}, n = {q}"))));
            }
        }
    }
    Ok((pairs, None))
}

fn symbols_suite(n: u64, rng: &mut ChaCha8Rng, exec: Execution) -> Result<Vec<Property>> {
    let mut out = Vec::new();
    let (checked, bad) = symbol_oracle_mismatches(n, exec)?;
    out.push(Property::from_search(
        "quartic symbol equals the exponentiation oracle",
        bad,
        format!("{checked} numerators, N(p) <= {n}"),
    ));
    let (pairs, bad) = reciprocity_failures(n)?;
    out.push(Property::from_search(
        "quartic reciprocity with sign",
        bad,
        format!("{pairs} prime pairs"),
    ));

    let primes = primes_upto(n);
    let mut bad = None;
    for &p in &primes {
        let i_exp = quartic_symbol_prime_oracle(GInt::I, p)?;
        let r_exp = quartic_symbol_prime_oracle(GInt::ONE_PLUS_I, p)?;
        if i_exp != QuarticValue::from_exp(unit_supplement_exp(p) as i64)
            || r_exp != QuarticValue::from_exp(ramified_supplement_exp(p) as i64)
        {
            bad = Some(format!("supplement at {p}"));
            break;
        }
    }
    out.push(Property::from_search(
        "supplement laws for i and 1+i",
        bad,
        format!("{} primes", primes.len()),
    ));

    let moduli = primary_upto(n.max(9)).into_iter().filter(|z| !z.is_unit()).collect::<Vec<_>>();
    let trials = 2000;
    let (mut bad_sq, mut bad_num, mut bad_den) = (None, None, None);
    for _ in 0..trials {
        let m = *moduli.choose(rng).expect("moduli");
        let m2 = *moduli.choose(rng).expect("moduli");
        let a = random_gint(rng, 60);
        let b = random_gint(rng, 60);
        if bad_sq.is_none() && quadratic_symbol(a, m)? != quartic_symbol(a, m)?.square() {
            bad_sq = Some(format!("a = {a}, n = {m}"));
        }
        if bad_num.is_none() && quartic_symbol(a * b, m)? != quartic_symbol(a, m)? * quartic_symbol(b, m)? {
            bad_num = Some(format!("a = {a}, b = {b}, n = {m}"));
        }
        if bad_den.is_none() && quartic_symbol(a, m * m2)? != quartic_symbol(a, m)? * quartic_symbol(a, m2)? {
            bad_den = Some(format!("a = {a}, n = {m}·{m2}"));
        }
    }
    out.push(Property::from_search(
        "quadratic symbol is the square of the quartic symbol",
        bad_sq,
        format!("{trials} random pairs"),
    ));
    out.push(Property::from_search(
        "multiplicative in the numerator",
        bad_num,
        format!("{trials} random triples"),
    ));
    out.push(Property::from_search(
        "multiplicative in the denominator",
        bad_den,
        format!("{trials} random triples"),
    ));
    Ok(out)
}

/// How often each closed-form case was used.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseCoverage {
    pub g2: [usize; 5],
    pub g4: [usize; 6],
}

fn g2_index(c: G2Case) -> usize {
    match c {
        G2Case::DividedOdd => 0,
        G2Case::DividedEven => 1,
        G2Case::EdgeEven => 2,
        G2Case::EdgeOdd => 3,
        G2Case::Vanishing => 4,
    }
}

fn g4_index(c: G4Case) -> usize {
    match c {
        G4Case::EdgeQuartic => 0,
        G4Case::EdgeQuadratic => 1,
        G4Case::EdgeConjugate => 2,
        G4Case::EdgePrincipal => 3,
        G4Case::Divided => 4,
        G4Case::Vanishing => 5,
    }
}

#[derive(Clone, Debug, Default)]
pub struct GaussSumReport {
    pub comparisons: usize,
    pub worst_relative: f64,
    pub first_failure: Option<String>,
    pub coverage: CaseCoverage,
}

impl GaussSumReport {
    fn compare(
        &mut self,
        r: GInt,
        n: GInt,
        brute: [num_complex::Complex64; 2],
        closed: Result<[num_complex::Complex64; 2]>,
        tol: f64,
    ) {
        let closed = match closed {
            Ok(c) => c,
            Err(e) => {
                self.first_failure.get_or_insert(format!("r = {r}, n = {n}: {e}"));
                return;
            }
        };
        for (k, (c, b)) in closed.iter().zip(brute).enumerate() {
            self.comparisons += 1;
            let scale = b.norm().max((n.norm() as f64).sqrt());
            self.worst_relative = self.worst_relative.max((c - b).norm() / scale);
            if !agrees(*c, b, n, tol) {
                let which = if k == 0 { "g2" } else { "g4" };
                self.first_failure
                    .get_or_insert(format!("{which}({r}, {n}): closed {c} vs brute {b}"));
            }
        }
    }

    fn check_modulus(&mut self, n: GInt, rs: &[GInt], tol: f64) -> Result<()> {
        let f = factorize(n)?;
        let t2 = GaussSumTable::new(SymbolOrder::Quadratic, n)?;
        let t4 = GaussSumTable::new(SymbolOrder::Quartic, n)?;
        for &r in rs {
            let closed = g2_closed_traced(r, &f).and_then(|(v2, c2)| {
                let (v4, c4) = g4_closed_traced(r, &f)?;
                c2.into_iter().for_each(|c| self.coverage.g2[g2_index(c)] += 1);
                c4.into_iter().for_each(|c| self.coverage.g4[g4_index(c)] += 1);
                Ok([v2, v4])
            });
            self.compare(r, n, [t2.sum(r), t4.sum(r)], closed, tol);
        }
        Ok(())
    }
}

/// r-set for a prime power: `u·ϖ^j` for `j ≤ 4`, 0 and a generic value.
fn prime_power_rs(p: GInt) -> Vec<GInt> {
    let mut rs = vec![GInt::ZERO, GInt::new(2, 1)];
    for u in 0..4 {
        for j in 0..5 {
            rs.push(p.pow(j).mul_unit(u));
        }
    }
    rs
}

/// Closed forms against brute force over `ϖ^l` with `N(ϖ) ≤ max_norm`,
/// `l ≤ 4` (while `N(ϖ)^l ≤ 10⁶`, at least `l = 2`), then `composites` random
/// square-free and non-square-free composite moduli of norm `≤ 4·max_norm`.
pub fn gauss_sum_report(max_norm: u64, composites: usize, seed: u64) -> Result<GaussSumReport> {
    let tol = 1e-8;
    let mut rep = GaussSumReport::default();
    for p in primes_upto(max_norm) {
        let lmax = (2..=4).rev().find(|&l| p.norm().pow(l) <= 1_000_000).unwrap_or(2);
        let rs = prime_power_rs(p);
        for l in 1..=lmax {
            rep.check_modulus(p.pow(l), &rs, tol)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<GInt> = primary_upto(4 * max_norm)
        .into_iter()
        .filter(|z| !z.is_unit() && factorize(*z).map(|f| f.factors.len() >= 2).unwrap_or(false))
        .collect();
    for _ in 0..composites {
        let n = *pool.choose(&mut rng).expect("composite pool");
        let f = factorize(n)?;
        let mut rs = vec![GInt::ONE, random_gint(&mut rng, 40), random_gint(&mut rng, 40)];
        for &(p, _) in &f.factors {
            rs.push(p);
            rs.push(p * p * GInt::new(2, 1));
        }
        rep.check_modulus(n, &rs, tol)?;
    }
    Ok(rep)
}

fn gauss_sums_suite(n: u64, rng: &mut ChaCha8Rng, exec: Execution) -> Result<Vec<Property>> {
    let mut out = Vec::new();
    let rep = gauss_sum_report(n, 50, rng.gen())?;
    out.push(Property::from_search(
        "closed forms match brute force",
        rep.first_failure.clone(),
        format!(
            "{} comparisons, worst relative error {:.2e}",
            rep.comparisons, rep.worst_relative
        ),
    ));
    let covered = rep.coverage.g2.iter().chain(&rep.coverage.g4).all(|&k| k >= 10);
    out.push(Property::new(
        "every prime-power case exercised at least 10 times",
        covered,
        format!("g2 cases {:?}, g4 cases {:?}", rep.coverage.g2, rep.coverage.g4),
    ));

    let primes = primes_upto(n);
    let checks = map_collect(
        &primes,
        |&p| -> Result<Option<String>> {
            let base = g_base_prime(p)?;
            let sq = (p.norm() as f64).sqrt();
            if (base.g4.norm() - sq).abs() > 1e-8 * sq || (base.g2.norm() - sq).abs() > 1e-8 * sq {
                return Ok(Some(format!("|g(ϖ)| != √N at {p}")));
            }
            Ok(None)
        },
        exec,
    );
    let mut bad = None;
    for c in checks {
        if let Some(s) = c? {
            bad = Some(s);
            break;
        }
    }
    out.push(Property::from_search(
        "base Gauss sums have absolute value √N",
        bad,
        format!("{} primes", primes.len()),
    ));

    // g(sr, n) = conj((s/n)) g(r, n) for s coprime to n.
    let moduli: Vec<GInt> = primary_upto(n).into_iter().filter(|z| !z.is_unit()).collect();
    let mut bad = None;
    let trials = 200;
    for _ in 0..trials {
        let m = *moduli.choose(rng).expect("moduli");
        let r = random_gint(rng, 30);
        let s = random_gint(rng, 30);
        if !coprime(s, m) {
            continue;
        }
        for order in [SymbolOrder::Quadratic, SymbolOrder::Quartic] {
            let t = GaussSumTable::new(order, m)?;
            let lhs = t.sum(s * r);
            let rhs = order.symbol(s, m)?.conj().to_complex() * t.sum(r);
            if !agrees(lhs, rhs, m, 1e-8) && bad.is_none() {
                bad = Some(format!("order {order:?}, r = {r}, s = {s}, n = {m}"));
            }
        }
    }
    out.push(Property::from_search(
        "twist law g(sr, n) = conj(χ(s)) g(r, n)",
        bad,
        format!("{trials} random triples"),
    ));
    Ok(out)
}

/// Square-free odd `c` with `N(c) ≤ max_norm`, every associate included.
pub fn character_parameters(max_norm: u64) -> Vec<GInt> {
    squarefree_in_norm_range(1, max_norm)
}

/// Periodicity, multiplicativity, units, order and primitivity of one character.
pub fn character_failure(chi: &HeckeCharacter, rng: &mut ChaCha8Rng, trials: usize) -> Result<Option<String>> {
    let q = chi.modulus();
    for u in 0..4 {
        if chi.eval(GInt::ONE.mul_unit(u)) != QuarticValue::ONE {
            return Ok(Some(format!("{chi}: nontrivial on the unit i^{u}")));
        }
    }
    for _ in 0..trials {
        let m = random_gint(rng, 200);
        let n = random_gint(rng, 200);
        let k = random_gint(rng, 5);
        if chi.eval(m) != chi.eval(m + k * q) {
            return Ok(Some(format!("{chi}: χ({m}) != χ({m} + {k}·{q})")));
        }
        if chi.eval(m * n) != chi.eval(m) * chi.eval(n) {
            return Ok(Some(format!("{chi}: χ({m}·{n}) != χ({m})χ({n})")));
        }
    }
    let order = chi.family().order();
    let (mut has_minus_one, mut has_i) = (false, false);
    let ring = crate::zint::ResidueRing::new(q)?;
    for x in ring.iter() {
        let v = chi.eval(x);
        if v.is_zero() {
            continue;
        }
        if v.pow(order) != QuarticValue::ONE {
            return Ok(Some(format!("{chi}: χ({x}) = {v} has order above {order}")));
        }
        has_minus_one |= v == QuarticValue::MINUS_ONE;
        has_i |= v == QuarticValue::I || v == QuarticValue::MINUS_I;
    }
    let exact = if order == 4 { has_i } else { has_minus_one };
    if !exact {
        return Ok(Some(format!("{chi}: order is below {order}")));
    }
    if !chi.is_primitive_brute()? {
        return Ok(Some(format!("{chi}: imprimitive")));
    }
    Ok(None)
}

fn characters_suite(n: u64, rng: &mut ChaCha8Rng) -> Result<Vec<Property>> {
    let cs: Vec<GInt> = character_parameters(n);
    let mut out = Vec::new();
    for family in [Family::Quadratic, Family::Quartic] {
        let mut bad = None;
        for &c in &cs {
            let chi = HeckeCharacter::new(family, c)?;
            if let Some(s) = character_failure(&chi, rng, 200)? {
                bad = Some(s);
                break;
            }
        }
        out.push(Property::from_search(
            &format!("{family} characters: periodic, multiplicative, trivial on units, exact order, primitive"),
            bad,
            format!("{} parameters c, N(c) <= {n}", cs.len()),
        ));
    }
    Ok(out)
}

/// Weight, evaluation point and table used for the Poisson checks.
pub const POISSON_X: f64 = 200.0;

pub fn poisson_table(exec: Execution) -> Result<TransformTable> {
    let weight = SmoothWeight::new(2.0)?;
    TransformTable::with_tail(weight, 1e-10, 400.0, exec)
}

/// Largest `|lhs − rhs|` over all primary `n` with `N(n) ≤ max_norm`, both
/// orders and both variants, with the worst case.
pub fn poisson_max_diff(max_norm: u64, table: &TransformTable, exec: Execution) -> Result<(f64, String, usize)> {
    let ns = primary_upto(max_norm);
    let mut cases = Vec::new();
    for &n in &ns {
        for order in [SymbolOrder::Quadratic, SymbolOrder::Quartic] {
            for variant in [PoissonVariant::Plain, PoissonVariant::Odd] {
                cases.push((n, order, variant));
            }
        }
    }
    let diffs = map_collect(
        &cases,
        |&(n, order, variant)| poisson_identity_check(order, n, 1.0, POISSON_X, table, variant).map(|c| c.diff),
        exec,
    );
    let mut worst = (0.0, String::new());
    for (d, (n, order, variant)) in diffs.into_iter().zip(&cases) {
        let d = d?;
        if !(d <= worst.0) {
            worst = (d, format!("n = {n}, {order:?}, {variant:?}"));
        }
    }
    Ok((worst.0, worst.1, cases.len()))
}

fn poisson_suite(n: u64, exec: Execution) -> Result<Vec<Property>> {
    let table = poisson_table(exec)?;
    let (worst, at, cases) = poisson_max_diff(n, &table, exec)?;
    let mut out = vec![Property::new(
        "Poisson summation, plain and odd-restricted",
        worst <= 1e-4,
        format!("max |lhs - rhs| = {worst:.3e} over {cases} cases (worst {at})"),
    )];
    let mut split = 0f64;
    for m in primary_upto(n) {
        for order in [SymbolOrder::Quadratic, SymbolOrder::Quartic] {
            split = split.max(odd_split_residual(order, m, POISSON_X, table.weight())?);
        }
    }
    out.push(Property::new(
        "odd sum splits as full sum minus the doubled sum",
        split <= 1e-9,
        format!("max residual {split:.3e}"),
    ));
    Ok(out)
}

/// Mertens residual `|Σ log N/N − log x|` and its bound `3 log log 3x`.
pub fn mertens_rows(table: &PrimeTable, xs: &[u64]) -> Result<Vec<(u64, f64, f64)>> {
    xs.iter()
        .map(|&x| {
            let s = chebyshev_sum(table, x)?;
            let xf = x as f64;
            Ok((x, (s - xf.ln()).abs(), 3.0 * (3.0 * xf).ln().ln()))
        })
        .collect()
}

fn counts_suite(n: u64) -> Result<Vec<Property>> {
    let mut out = Vec::new();
    let n = n.max(100);
    let mut ratios = Vec::new();
    let mut x = 1000.min(n);
    loop {
        ratios.push(squarefree_count_check(x)?);
        if x >= n {
            break;
        }
        x = (x * 10).min(n);
    }
    let last = ratios.last().expect("at least one count").ratio;
    let listing = ratios
        .iter()
        .map(|c| format!("X={}: {}/{:.1} = {:.4}", c.x, c.count, c.predicted, c.ratio))
        .collect::<Vec<_>>()
        .join("; ");
    out.push(Property::new(
        "square-free count ratio in [0.98, 1.02] at the largest X",
        (0.98..=1.02).contains(&last),
        listing,
    ));

    let small = n.min(20_000);
    let sieved = squarefree_in_norm_range(1, small).len() as u64;
    let mobius = squarefree_count_mobius(small)?;
    out.push(Property::new(
        "sieve count equals the Möbius count",
        sieved == mobius,
        format!("X={small}: {sieved} vs {mobius}"),
    ));

    let table = PrimeTable::new(n);
    let mut xs = vec![];
    let mut x = 1000;
    while x <= n {
        xs.push(x);
        x *= 10;
    }
    let rows = mertens_rows(&table, &xs)?;
    let ok = rows.iter().all(|&(_, r, b)| r <= b);
    let fit = rows.iter().map(|&(_, r, b)| r / (b / 3.0)).fold(0.0, f64::max);
    let listing = rows
        .iter()
        .map(|(x, r, b)| format!("x={x}: {r:.4} <= {b:.4}"))
        .collect::<Vec<_>>()
        .join("; ");
    out.push(Property::new(
        "Mertens residual within 3 log log 3x",
        ok,
        format!("{listing}; fitted constant {fit:.4}"),
    ));
    Ok(out)
}
