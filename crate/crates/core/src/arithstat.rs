//! Number-field density constants: zeta values, Euler products, local and
//! archimedean masses, the squarefree/fundamental discriminant constants,
//! unramified averages, and Cohen–Lenstra predictions.
//!
//! Rational quantities are exact. Transcendental ones are [`Decimal`]s
//! computed with guard digits and returned truncated to the requested
//! number of digits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{binomial, factorial, int, is_prime_u64, primes_up_to, rat};
use crate::decimal::Decimal;
use crate::error::{Error, Result};

/// Largest supported precision, in decimal digits.
pub const MAX_DIGITS: u32 = 50;

const GUARD: u32 = 12;

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `arctan(1/x)` as a mantissa at the given scale.
fn arctan_inv(x: u64, scale: u32) -> BigInt {
    let x2 = BigInt::from(x * x);
    let mut power = pow10(scale) / x;
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= &x2;
        if power.is_zero() {
            return sum;
        }
        let term = &power / (2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
}

/// π by Machin's formula.
pub fn pi(digits: u32) -> Decimal {
    let s = digits + GUARD;
    let m = arctan_inv(5, s) * 16 - arctan_inv(239, s) * 4;
    Decimal::from_mantissa(m, s).rescale(digits)
}

/// `Σ sign(n)/(n^s·C(2n, n))` as a mantissa at `scale`.
fn central_binomial_series(s: u32, alternating: bool, scale: u32) -> BigInt {
    let one = pow10(scale);
    let mut sum = BigInt::zero();
    for n in 1u64.. {
        let den = BigInt::from(n).pow(s) * binomial(2 * n, n);
        let term = &one / den;
        if term.is_zero() {
            break;
        }
        if alternating && n % 2 == 0 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    sum
}

fn zeta_unchecked(s: u32, scale: u32) -> Decimal {
    let t = scale + GUARD;
    match s {
        // π²/6
        2 => {
            let p = pi(t);
            p.mul(&p).div(&Decimal::from_int(6, t)).rescale(scale)
        }
        // (5/2)·Σ (−1)^{n+1} / (n³·C(2n, n))
        _ => Decimal::from_mantissa(central_binomial_series(3, true, t) * 5 / 2, t).rescale(scale),
    }
}

/// `ζ(2)` via `π²/6` and `ζ(3)` via the alternating central-binomial series.
pub fn zeta(s: u32, digits: u32) -> Result<Decimal> {
    if digits > MAX_DIGITS {
        return Err(Error::pre(format!("precision is limited to {MAX_DIGITS} digits")));
    }
    if s != 2 && s != 3 {
        return Err(Error::Unsupported(format!("ζ({s})")));
    }
    Ok(zeta_unchecked(s, digits))
}

/// `ζ(2)⁻¹ = 6/π²`.
pub fn zeta2_inv(digits: u32) -> Decimal {
    let t = digits + GUARD;
    Decimal::one(t).div(&zeta_unchecked(2, t)).rescale(digits)
}

/// `ζ(2) = 3·Σ 1/(n²·C(2n, n))`; an evaluation independent of π.
pub fn zeta2_series(digits: u32) -> Decimal {
    let t = digits + GUARD;
    Decimal::from_mantissa(central_binomial_series(2, false, t) * 3, t).rescale(digits)
}

/// A truncated Euler product with a bound on `|log(true/value)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerProductResult {
    pub value: Decimal,
    pub tail_bound: f64,
    pub cutoff: u64,
}

/// Tail model `|log f_p| ≤ c/p^k` for every `p` above the cutoff, with `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub c: f64,
    pub k: u32,
}

impl TailModel {
    /// `Σ_{n>P} c/n^k ≤ c/((k−1)(P−1)^{k−1})`, a bound for the prime sum.
    pub fn bound(self, cutoff: u64) -> f64 {
        let base = (cutoff.max(2) - 1) as f64;
        let raw = self.c / ((self.k - 1) as f64 * libm::pow(base, (self.k - 1) as f64));
        raw * (1.0 + 1e-12)
    }
}

/// `prefactor · ∏_{p ≤ P} f_p` to `digits` digits.
pub fn euler_product(
    prefactor: &Decimal,
    factor: impl Fn(u64) -> BigRational,
    cutoff: u64,
    tail: TailModel,
    digits: u32,
) -> EulerProductResult {
    let s = digits + GUARD;
    let value = primes_up_to(cutoff)
        .into_iter()
        .fold(prefactor.rescale(s), |acc, p| acc.mul_ratio(&factor(p)))
        .rescale(digits);
    EulerProductResult { value, tail_bound: tail.bound(cutoff), cutoff }
}

/// Exact running products `P ↦ ∏_{p ≤ P} f_p`.
pub fn partial_products(factors: &[(u64, BigRational)]) -> Vec<(u64, BigRational)> {
    let mut acc = BigRational::one();
    factors
        .iter()
        .map(|(p, f)| {
            acc = &acc * f;
            (*p, acc.clone())
        })
        .collect()
}

fn check_degree(n: u32) -> Result<()> {
    if (2..=5).contains(&n) {
        Ok(())
    } else {
        Err(Error::pre(format!("degree {n} is outside 2..=5")))
    }
}

/// `r₂(Sₙ)`: elements of `Sₙ` with `g² = e`, by enumeration.
pub fn r2(n: u32) -> u64 {
    fn rec(perm: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, count: &mut u64) {
        if perm.len() == n {
            if perm.iter().enumerate().all(|(i, &j)| perm[j] == i) {
                *count += 1;
            }
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                perm.push(j);
                rec(perm, used, n, count);
                perm.pop();
                used[j] = false;
            }
        }
    }
    let mut count = 0;
    rec(&mut Vec::new(), &mut vec![false; n as usize], n as usize, &mut count);
    count
}

/// Local condition at a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalCondition {
    /// `p² ∤ Disc`: unramified, or simply ramified for odd `p`.
    SqfDisc,
    /// As `SqfDisc`, but simply ramified algebras are allowed at 2 as well.
    FundDisc,
    /// Unramified or simply ramified at every prime.
    AllSimplyRamified,
    /// Masses supplied by the caller.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMass {
    pub n: u32,
    pub p: Place,
    pub condition: LocalCondition,
    pub mass: BigRational,
}

/// `Σ 1/(Disc_p(K)·#Aut(K))` over the étale algebras allowed by the condition.
pub fn local_mass(n: u32, p: u64, condition: LocalCondition) -> Result<LocalMass> {
    check_degree(n)?;
    if !is_prime_u64(p) {
        return Err(Error::pre(format!("{p} is not prime")));
    }
    let generic = BigRational::one() + rat(1, p as i64);
    let mass = match (condition, p) {
        (LocalCondition::SqfDisc, 2) => int(1),
        (LocalCondition::SqfDisc | LocalCondition::FundDisc | LocalCondition::AllSimplyRamified, _) => generic,
        (LocalCondition::Custom, _) => {
            return Err(Error::Unsupported("custom masses are supplied directly".into()));
        }
    };
    Ok(LocalMass { n, p: Place::Finite(p), condition, mass })
}

/// An étale algebra over `ℚ_p` in the mass table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaleAlgebra {
    pub name: &'static str,
    pub disc_valuation: u32,
    pub aut: u64,
}

const DEGREE2: &[EtaleAlgebra] = &[
    EtaleAlgebra { name: "Qp x Qp", disc_valuation: 0, aut: 2 },
    EtaleAlgebra { name: "unramified quadratic", disc_valuation: 0, aut: 2 },
    EtaleAlgebra { name: "ramified quadratic (1)", disc_valuation: 1, aut: 2 },
    EtaleAlgebra { name: "ramified quadratic (2)", disc_valuation: 1, aut: 2 },
];

const DEGREE3: &[EtaleAlgebra] = &[
    EtaleAlgebra { name: "Qp^3", disc_valuation: 0, aut: 6 },
    EtaleAlgebra { name: "Qp x unramified quadratic", disc_valuation: 0, aut: 2 },
    EtaleAlgebra { name: "unramified cubic", disc_valuation: 0, aut: 3 },
    EtaleAlgebra { name: "Qp x ramified quadratic (1)", disc_valuation: 1, aut: 2 },
    EtaleAlgebra { name: "Qp x ramified quadratic (2)", disc_valuation: 1, aut: 2 },
];

/// Étale algebras of degree `n ∈ {2, 3}` over `ℚ_p` with `v_p(Disc) ≤ 1`, `p ≥ 5`.
pub fn etale_table(n: u32, p: u64) -> Result<&'static [EtaleAlgebra]> {
    if p < 5 || !is_prime_u64(p) {
        return Err(Error::pre("the table needs a prime p ≥ 5"));
    }
    match n {
        2 => Ok(DEGREE2),
        3 => Ok(DEGREE3),
        _ => Err(Error::Unsupported(format!("no étale table in degree {n}"))),
    }
}

/// `Σ 1/(p^{v(Disc)}·#Aut)` over [`etale_table`], optionally restricted to
/// unramified algebras.
pub fn mass_from_table(n: u32, p: u64, unramified_only: bool) -> Result<BigRational> {
    Ok(etale_table(n, p)?
        .iter()
        .filter(|a| !unramified_only || a.disc_valuation == 0)
        .map(|a| BigRational::new(1.into(), BigInt::from(p).pow(a.disc_valuation) * a.aut))
        .sum())
}

pub fn mass_enumerate_oracle(n: u32, p: u64) -> Result<BigRational> {
    mass_from_table(n, p, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfiniteCondition {
    All,
    TotallyReal,
    OneComplexPlace,
}

/// `Σ 1/#Aut(K)` over étale ℝ-algebras of degree `n` allowed by the condition.
pub fn infinite_mass(n: u32, condition: InfiniteCondition) -> Result<BigRational> {
    check_degree(n)?;
    let nf = factorial(n as u64);
    Ok(match condition {
        InfiniteCondition::All => BigRational::new(BigInt::from(r2(n)), nf),
        InfiniteCondition::TotallyReal => BigRational::new(1.into(), nf),
        InfiniteCondition::OneComplexPlace => BigRational::new(1.into(), factorial(n as u64 - 2) * 2),
    })
}

/// How quadratic fields are weighted when `n = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadraticWeight {
    /// `½·Σ 1/#Aut` at infinity exactly as for higher degree, so each
    /// quadratic field carries weight ½.
    #[default]
    AutWeighted,
    /// Each quadratic field counted once (twice the weighted constant).
    Unweighted,
}

/// `(½·infMass)·∏_p (1 − 1/p)·mass_p` with `mass_p = 1 + 1/p` away from
/// the overridden primes, as `rational · ζ(2)⁻¹` plus its decimal value.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaLimit {
    /// The constant divided by `ζ(2)⁻¹`.
    pub rational_part: BigRational,
    pub result: EulerProductResult,
}

pub fn sigmalimit_constant(
    n: u32,
    inf_mass: &BigRational,
    local_masses: &BTreeMap<u64, BigRational>,
    weight: QuadraticWeight,
    digits: u32,
) -> Result<SigmaLimit> {
    check_degree(n)?;
    if inf_mass.is_negative() || local_masses.values().any(|m| m.is_negative()) {
        return Err(Error::pre("masses must be nonnegative"));
    }
    if let Some(p) = local_masses.keys().find(|&&p| !is_prime_u64(p)) {
        return Err(Error::pre(format!("{p} is not prime")));
    }
    let mut r = inf_mass * rat(1, 2);
    if n == 2 && weight == QuadraticWeight::Unweighted {
        r *= int(2);
    }
    // the default factor (1 − 1/p)(1 + 1/p) = 1 − 1/p² is absorbed into ζ(2)⁻¹
    for (&p, m) in local_masses {
        let pi = p as i64;
        let factor = (BigRational::one() - rat(1, pi)) * m;
        r *= factor / (BigRational::one() - rat(1, pi * pi));
    }
    let value = zeta2_inv(digits + GUARD).mul_ratio(&r).rescale(digits);
    Ok(SigmaLimit { rational_part: r, result: EulerProductResult { value, tail_bound: 0.0, cutoff: 0 } })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Sqf,
    Fund,
}

/// Both assemblies of the squarefree/fundamental field-count constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem11 {
    pub n: u32,
    pub variant: Variant,
    /// `r₂(Sₙ)/(3·n!)` or `r₂(Sₙ)/(2·n!)`, the coefficient of `ζ(2)⁻¹`.
    pub rational_part: BigRational,
    /// Closed form with `ζ(2)⁻¹ = 6/π²`.
    pub closed_form: Decimal,
    /// Mass-product route with `ζ(2)` from its central-binomial series.
    pub product_route: Decimal,
    pub agreement_digits: u32,
}

pub fn theorem11_constant(n: u32, variant: Variant, digits: u32) -> Result<Theorem11> {
    check_degree(n)?;
    if digits > MAX_DIGITS {
        return Err(Error::pre(format!("precision is limited to {MAX_DIGITS} digits")));
    }
    let nf = factorial(n as u64);
    let denom = match variant {
        Variant::Sqf => nf * 3,
        Variant::Fund => nf * 2,
    };
    let closed_rational = BigRational::new(BigInt::from(r2(n)), denom);
    let closed = zeta2_inv(digits + GUARD).mul_ratio(&closed_rational).rescale(digits);

    let inf = infinite_mass(n, InfiniteCondition::All)?;
    let cond = match variant {
        Variant::Sqf => LocalCondition::SqfDisc,
        Variant::Fund => LocalCondition::FundDisc,
    };
    let mut masses = BTreeMap::new();
    masses.insert(2, local_mass(n, 2, cond)?.mass);
    let s = sigmalimit_constant(n, &inf, &masses, QuadraticWeight::AutWeighted, digits)?;
    if s.rational_part != closed_rational {
        return Err(Error::Inconsistent("mass product disagrees with the closed form".into()));
    }
    let t = digits + GUARD;
    let product = Decimal::one(t).div(&zeta2_series(t)).mul_ratio(&s.rational_part).rescale(digits);
    let agreement_digits = closed.agreement_digits(&product);
    Ok(Theorem11 { n, variant, rational_part: closed_rational, closed_form: closed, product_route: product, agreement_digits })
}

/// Proportions of fields with fundamental and squarefree discriminant.
#[derive(Debug, Clone, PartialEq)]
pub struct Corollary12 {
    pub n: u32,
    pub fundamental: EulerProductResult,
    pub squarefree: EulerProductResult,
    /// `squarefree / fundamental`.
    pub ratio: BigRational,
}

/// `ζ(2)⁻¹ ∏_p g_p` in accelerated form. For n = 4, 5 the factor `(1 − p⁻²)`
/// is split off each `g_p` so that the remaining factor is `1 + O(p⁻³)` or
/// `1 + O(p⁻⁴)`; for n = 3 the product is `ζ(3)`'s Euler product.
pub fn corollary12_constant(n: u32, cutoff: u64, digits: u32) -> Result<Corollary12> {
    check_degree(n)?;
    if digits > MAX_DIGITS {
        return Err(Error::pre(format!("precision is limited to {MAX_DIGITS} digits")));
    }
    let fundamental = if n == 2 {
        EulerProductResult { value: Decimal::one(digits), tail_bound: 0.0, cutoff }
    } else {
        let z = zeta2_inv(digits + GUARD);
        // splitting (1 − p⁻²) off the displayed factor contributes another ζ(2)⁻¹
        let pre = if n == 3 { z } else { z.mul(&z) };
        // reciprocal of (1 − p⁻²)·(Euler factor of the product as displayed)
        let (factor, tail): (fn(u64) -> BigRational, TailModel) = match n {
            3 => (|p| (BigRational::one() - rat(1, (p * p * p) as i64)).recip(), TailModel { c: 2.0, k: 3 }),
            4 => (
                |p| {
                    let x = BigRational::from_integer(p.into()).recip();
                    let x3 = num_traits::pow(x.clone(), 3);
                    let x4 = &x3 * &x;
                    (BigRational::one() - x3 - x4.clone() * int(2) + &x4 * &x + &x4 * &x * &x).recip()
                },
                TailModel { c: 4.0, k: 3 },
            ),
            _ => (
                |p| {
                    let x = BigRational::from_integer(p.into()).recip();
                    let x4 = num_traits::pow(x.clone(), 4);
                    let x5 = &x4 * &x;
                    (BigRational::one() - x4 * int(2) - x5.clone() + &x5 * &x + &x5 * &x * &x).recip()
                },
                TailModel { c: 6.0, k: 4 },
            ),
        };
        euler_product(&pre, factor, cutoff, tail, digits)
    };
    let ratio = rat(2, 3);
    let squarefree = EulerProductResult {
        value: fundamental.value.mul_ratio(&ratio),
        tail_bound: fundamental.tail_bound,
        cutoff: fundamental.cutoff,
    };
    Ok(Corollary12 { n, fundamental, squarefree, ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// Real quadratic fields.
    Plus,
    /// Imaginary quadratic fields.
    Minus,
}

/// Average number of unramified `(Aₙ, Sₙ)`-extensions of quadratic fields:
/// the count of degree-`n` fields simply ramified everywhere with the given
/// archimedean type, divided by the quadratic count `½·ζ(2)⁻¹`.
pub fn unramified_average(n: u32, sign: Sign) -> Result<BigRational> {
    if !(3..=5).contains(&n) {
        return Err(Error::pre(format!("degree {n} is outside 3..=5")));
    }
    let inf = match sign {
        Sign::Plus => infinite_mass(n, InfiniteCondition::TotallyReal)?,
        Sign::Minus => infinite_mass(n, InfiniteCondition::OneComplexPlace)?,
    };
    let mut masses = BTreeMap::new();
    masses.insert(2, local_mass(n, 2, LocalCondition::AllSimplyRamified)?.mass);
    let numer = sigmalimit_constant(n, &inf, &masses, QuadraticWeight::AutWeighted, 10)?.rational_part;
    Ok(numer / rat(1, 2))
}

fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `|Aut|` of the abelian p-group of type `λ` (exponents, any order).
pub fn aut_p_group(p: u64, exponents: &[u32]) -> BigInt {
    let mut e: Vec<u32> = exponents.iter().copied().filter(|&x| x > 0).collect();
    e.sort_unstable();
    let k = e.len();
    let pb = BigInt::from(p);
    let pw = |x: usize| pb.pow(x as u32);
    let mut out = BigInt::one();
    for j in 0..k {
        // 1-based d_j = max{l : e_l = e_j}, c_j = min{l : e_l = e_j}
        let d = (0..k).rev().find(|&l| e[l] == e[j]).expect("j itself") + 1;
        let c = (0..k).find(|&l| e[l] == e[j]).expect("j itself") + 1;
        out *= pw(d) - pw(j);
        out *= pb.pow(e[j] * (k - d) as u32);
        out *= pb.pow((e[j] - 1) * (k - c + 1) as u32);
    }
    out
}

/// `|G|` and `|Aut(G)|` for `G = ⊕ ℤ/nᵢ`.
pub fn abelian_group_orders(cyclic: &[u64]) -> Result<(BigInt, BigInt)> {
    if cyclic.contains(&0) {
        return Err(Error::pre("cyclic factors must be finite"));
    }
    let order: BigInt = cyclic.iter().map(|&n| BigInt::from(n)).product();
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in cyclic {
        for (p, e) in factor_small(n) {
            per_prime.entry(p).or_default().push(e);
        }
    }
    let aut = per_prime.iter().map(|(&p, es)| aut_p_group(p, es)).product();
    Ok((order, aut))
}

/// `|Aut(G)|` by enumerating generator images; a test oracle for small groups.
pub fn aut_bruteforce(cyclic: &[u64]) -> u64 {
    let k = cyclic.len();
    let size: u64 = cyclic.iter().product();
    let elems: Vec<Vec<u64>> = (0..size)
        .map(|mut i| {
            cyclic
                .iter()
                .rev()
                .map(|&n| {
                    let d = i % n;
                    i /= n;
                    d
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect()
        })
        .collect();
    let killed_by = |x: &[u64], m: u64| x.iter().zip(cyclic).all(|(&a, &n)| (a * m) % n == 0);
    let candidates: Vec<Vec<&Vec<u64>>> =
        cyclic.iter().map(|&n| elems.iter().filter(|x| killed_by(x, n)).collect()).collect();
    let mut count = 0;
    let mut idx = vec![0usize; k];
    loop {
        // image of every element a = Σ aᵢ gᵢ
        let mut seen = vec![false; size as usize];
        let mut injective = true;
        for a in &elems {
            let img: Vec<u64> = (0..cyclic.len())
                .map(|c| (0..k).map(|i| a[i] * candidates[i][idx[i]][c]).sum::<u64>() % cyclic[c])
                .collect();
            let code = img.iter().zip(cyclic).fold(0u64, |acc, (&x, &n)| acc * n + x) as usize;
            if seen[code] {
                injective = false;
                break;
            }
            seen[code] = true;
        }
        if injective {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k {
                return count;
            }
            idx[i] += 1;
            if idx[i] < candidates[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// `1/(|Aut(G)|·|G|)` for real and `1/|Aut(G)|` for imaginary quadratic fields.
pub fn cohen_lenstra_prediction(cyclic: &[u64], sign: Sign) -> Result<BigRational> {
    let (order, aut) = abelian_group_orders(cyclic)?;
    if order.is_even() {
        return Err(Error::pre("the prediction needs |G| odd"));
    }
    Ok(match sign {
        Sign::Plus => BigRational::new(1.into(), aut * order),
        Sign::Minus => BigRational::new(1.into(), aut),
    })
}

/// `∏_p (1 − c_p/p^{2m})` factors as exact rationals.
pub fn density_factor(cp: &BigRational, p: u64, m: usize) -> BigRational {
    BigRational::one() - cp / BigRational::from_integer(BigInt::from(p).pow(2 * m as u32))
}

/// `4/π² = (2/3)·ζ(2)⁻¹` at the given precision, the closed form quoted for
/// the F3 squarefree density. The exact local factors converge to
/// [`f3_euler_limit`] instead.
pub fn f3_squarefree_density(digits: u32) -> Decimal {
    zeta2_inv(digits + GUARD).mul_ratio(&rat(2, 3)).rescale(digits)
}

/// Closed form of the F3 local factor `1 − c_p/p⁸`: `3/8` at 2 and
/// `(1 − p⁻²)²` at odd primes. Checked against the Hensel counts in tests.
pub fn f3_local_factor(p: u64) -> BigRational {
    if p == 2 {
        return rat(3, 8);
    }
    let f = BigRational::one() - rat(1, (p * p) as i64);
    &f * &f
}

/// `∏_p (1 − c_p/p⁸) = (2/3)·ζ(2)⁻²` for F3, from [`f3_local_factor`].
pub fn f3_euler_limit(digits: u32) -> Decimal {
    let z = zeta2_inv(digits + GUARD);
    z.mul(&z).mul_ratio(&rat(2, 3)).rescale(digits)
}

pub fn decimal_to_f64(d: &Decimal) -> f64 {
    d.to_ratio().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert_eq!(zeta(2, 10).unwrap().to_string(), "1.6449340668");
        assert_eq!(zeta(3, 10).unwrap().to_string(), "1.2020569031");
        assert_eq!(zeta2_inv(10).to_string(), "0.6079271018");
        assert_eq!(pi(30).to_string(), "3.141592653589793238462643383279");
        assert_eq!(zeta(3, 50).unwrap().to_string(), "1.20205690315959428539973816151144999076498629234049");
        assert!(zeta2_series(40).agreement_digits(&zeta(2, 40).unwrap()) >= 39);
        assert!(zeta(2, 51).is_err());
        assert!(zeta(4, 10).is_err());
    }

    #[test]
    fn r2_values() {
        assert_eq!([2, 3, 4, 5].map(r2), [2, 4, 10, 26]);
    }

    #[test]
    fn masses() {
        assert_eq!(local_mass(3, 5, LocalCondition::SqfDisc).unwrap().mass, rat(6, 5));
        assert_eq!(local_mass(4, 2, LocalCondition::SqfDisc).unwrap().mass, int(1));
        assert_eq!(local_mass(5, 2, LocalCondition::FundDisc).unwrap().mass, rat(3, 2));
        assert!(local_mass(6, 5, LocalCondition::SqfDisc).is_err());
        assert_eq!(mass_enumerate_oracle(2, 5).unwrap(), rat(6, 5));
        assert_eq!(mass_enumerate_oracle(3, 7).unwrap(), rat(8, 7));
        for n in [2, 3] {
            assert_eq!(mass_from_table(n, 11, true).unwrap(), int(1));
        }
        assert!(mass_enumerate_oracle(3, 3).is_err());
        assert_eq!(infinite_mass(3, InfiniteCondition::All).unwrap(), rat(4, 6));
        assert_eq!(infinite_mass(5, InfiniteCondition::TotallyReal).unwrap(), rat(1, 120));
        assert_eq!(infinite_mass(4, InfiniteCondition::OneComplexPlace).unwrap(), rat(1, 4));
    }

    #[test]
    fn theorem11() {
        for n in 2..=5 {
            let s = theorem11_constant(n, Variant::Sqf, 30).unwrap();
            let f = theorem11_constant(n, Variant::Fund, 30).unwrap();
            assert!(s.agreement_digits >= 20 && f.agreement_digits >= 20);
            assert_eq!(&f.rational_part / &s.rational_part, rat(3, 2));
        }
        assert_eq!(theorem11_constant(3, Variant::Sqf, 20).unwrap().rational_part, rat(4, 18));
    }

    #[test]
    fn sigmalimit_cases() {
        let inf = infinite_mass(4, InfiniteCondition::All).unwrap();
        let mut m = BTreeMap::new();
        m.insert(2, int(1));
        let a = sigmalimit_constant(4, &inf, &m, QuadraticWeight::AutWeighted, 20).unwrap();
        assert_eq!(a.rational_part, BigRational::new(10.into(), 72.into()));
        m.insert(7, int(0));
        assert!(sigmalimit_constant(4, &inf, &m, QuadraticWeight::AutWeighted, 20).unwrap().rational_part.is_zero());
        m.insert(7, int(-1));
        assert!(sigmalimit_constant(4, &inf, &m, QuadraticWeight::AutWeighted, 20).is_err());
        let inf2 = infinite_mass(2, InfiniteCondition::All).unwrap();
        let w = sigmalimit_constant(2, &inf2, &BTreeMap::new(), QuadraticWeight::AutWeighted, 20).unwrap();
        let u = sigmalimit_constant(2, &inf2, &BTreeMap::new(), QuadraticWeight::Unweighted, 20).unwrap();
        assert_eq!(u.rational_part, w.rational_part * int(2));
    }

    #[test]
    fn corollary12() {
        let c = corollary12_constant(3, 200_000, 20).unwrap();
        let target = zeta2_inv(30).mul(&zeta(3, 30).unwrap());
        assert!(c.fundamental.value.agreement_digits(&target) >= 10);
        assert!(c.fundamental.tail_bound < 1e-10);
        assert!(c.fundamental.value.to_string().starts_with("0.7307629694"));
        assert_eq!(c.ratio, rat(2, 3));
        assert_eq!(corollary12_constant(2, 10, 10).unwrap().fundamental.value, Decimal::one(10));
        for n in [4, 5] {
            let a = corollary12_constant(n, 1000, 20).unwrap();
            let b = corollary12_constant(n, 2000, 20).unwrap();
            assert!(b.fundamental.tail_bound <= a.fundamental.tail_bound / 2.0);
            let gap = decimal_to_f64(&a.fundamental.value.sub(&b.fundamental.value)).abs();
            assert!(gap <= a.fundamental.tail_bound);
        }
    }

    #[test]
    fn corollary12_matches_displayed_product() {
        // direct product of the displayed factors with the ζ(2)⁻¹ prefactor
        let pre = zeta2_inv(30);
        let direct = euler_product(
            &pre,
            |p| {
                let x = BigRational::from_integer(p.into()).recip();
                (BigRational::one() + &x * &x - num_traits::pow(x.clone(), 3) - num_traits::pow(x, 4)).recip()
            },
            5000,
            TailModel { c: 1.0, k: 2 },
            20,
        );
        let accel = corollary12_constant(4, 5000, 20).unwrap();
        let gap = decimal_to_f64(&direct.value.sub(&accel.fundamental.value)).abs();
        // both approximate the same limit; the gap is within the slower tail
        assert!(gap < direct.tail_bound);
    }

    #[test]
    fn unramified_and_cohen_lenstra() {
        assert_eq!(unramified_average(5, Sign::Plus).unwrap(), rat(1, 120));
        assert_eq!(unramified_average(4, Sign::Minus).unwrap(), rat(1, 4));
        assert_eq!(unramified_average(3, Sign::Minus).unwrap(), rat(1, 2));
        assert_eq!(cohen_lenstra_prediction(&[3], Sign::Minus).unwrap(), rat(1, 2));
        assert_eq!(cohen_lenstra_prediction(&[3], Sign::Plus).unwrap(), rat(1, 6));
        for s in [Sign::Plus, Sign::Minus] {
            assert_eq!(cohen_lenstra_prediction(&[3], s).unwrap(), unramified_average(3, s).unwrap());
        }
        assert!(cohen_lenstra_prediction(&[2], Sign::Plus).is_err());
    }

    #[test]
    fn aut_formula_matches_bruteforce() {
        let groups: &[&[u64]] =
            &[&[3], &[9], &[5, 5], &[9, 3], &[3, 3, 3], &[27, 3], &[9, 9], &[81], &[15], &[3, 3], &[7, 7], &[25, 5]];
        for g in groups {
            let (_, aut) = abelian_group_orders(g).unwrap();
            assert_eq!(aut, BigInt::from(aut_bruteforce(g)), "{g:?}");
        }
        // |GL₄(𝔽₃)|
        assert_eq!(abelian_group_orders(&[3, 3, 3, 3]).unwrap().1, BigInt::from(24_261_120u64));
    }
}
