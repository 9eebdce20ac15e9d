//! Zeros of the discriminant modulo p and p²: the strong/weak split and the
//! local counts c_p.
//!
//! A residue `v mod p²` with `p² | f(v)` is a *strong* multiple when
//! `∇f(v) ≡ 0 (mod p)` (then every lift `v + pw` still has `p² | f`), and a
//! *weak* multiple otherwise. Gradients mod p come from
//! `∂ᵢf(v) ≡ (f(v + p·eᵢ) − f(v))/p (mod p)`, which is exact for integer
//! polynomials, so only values of f mod p² are ever needed.
//!
//! Every scan is exposed as a function over a half-open range of a linear
//! index, returning a tally that merges by addition.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod_u64, is_prime_u64, mul_mod_u64, sqrt_mod_prime};
use crate::error::{check_budget, Error, Result};
use crate::forms::{reduce_mod, Family, FormVector};
use crate::invariants::{disc_lattice_i64, disc_mod, disc_ring, last_taylor, ModQ, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointClass {
    NotMultiple,
    WeakMultiple,
    StrongMultiple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BruteForce,
    Hensel,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BruteForce => "bruteforce",
            Method::Hensel => "hensel",
            Method::MonteCarlo => "montecarlo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bruteforce" | "brute" => Some(Method::BruteForce),
            "hensel" => Some(Method::Hensel),
            "montecarlo" | "mc" => Some(Method::MonteCarlo),
            _ => None,
        }
    }
}

/// Local count `c_p = #{v ∈ (ℤ/p²)^m : p² | f(v)}` split into strong and
/// weak residues. For Monte Carlo records the counts are estimates
/// (`density · p^{2m}`) and `ci` is the 3-sigma radius on the density.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDensityRecord {
    pub family: Family,
    pub p: u64,
    pub cp: BigRational,
    pub strong: BigRational,
    pub weak: BigRational,
    pub method: Method,
    pub ci: f64,
    pub samples: u64,
}

impl LocalDensityRecord {
    /// `p^{2m}`.
    pub fn volume(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), 2 * self.family.dim())
    }

    /// `c_p / p^{2m}`.
    pub fn density(&self) -> BigRational {
        &self.cp / BigRational::from_integer(self.volume())
    }

    /// `1 − c_p / p^{2m}`.
    pub fn local_factor(&self) -> BigRational {
        BigRational::one() - self.density()
    }

    pub fn is_exact(&self) -> bool {
        self.method != Method::MonteCarlo
    }
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::pre(alloc::format!("{p} is not prime")))
    }
}

fn pow_u128(p: u64, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

/// `∇f(c) mod p`, from values of f mod p².
pub fn gradient_mod_p(family: Family, c: &[i64], p: u64) -> Vec<u64> {
    let q = p * p;
    if let Some(g) = closed_gradient(family, c) {
        return g.iter().map(|x| x.rem_euclid(p as i128) as u64).collect();
    }
    let base = disc_mod(family, c, q);
    let mut pt = c.to_vec();
    (0..c.len())
        .map(|i| {
            pt[i] = c[i] + p as i64;
            let shifted = disc_mod(family, &pt, q);
            pt[i] = c[i];
            ((shifted + q - base) % q) / p
        })
        .collect()
}

/// Exact gradient for the families with short closed forms (small inputs only).
fn closed_gradient(family: Family, c: &[i64]) -> Option<Vec<i128>> {
    if c.iter().any(|x| x.unsigned_abs() >= 1 << 20) {
        return None;
    }
    let v: Vec<i128> = c.iter().map(|&x| x as i128).collect();
    match family {
        Family::W1 => Some(vec![-12 * v[0] * v[0], -54 * v[1]]),
        Family::F3 => {
            let (a, b, cc, d) = (v[0], v[1], v[2], v[3]);
            Some(vec![
                18 * b * cc * d - 4 * cc * cc * cc - 54 * a * d * d,
                18 * a * cc * d - 12 * b * b * d + 2 * b * cc * cc,
                18 * a * b * d + 2 * b * b * cc - 12 * a * cc * cc,
                18 * a * b * cc - 4 * b * b * b - 54 * a * a * d,
            ])
        }
        _ => None,
    }
}

/// Classification of integer lattice coordinates (any representatives).
pub fn classify_lattice(family: Family, c: &[i64], p: u64) -> PointClass {
    let q = p * p;
    let red: Vec<i64> = c.iter().map(|x| x.rem_euclid(q as i64)).collect();
    if disc_mod(family, &red, q) != 0 {
        return PointClass::NotMultiple;
    }
    if gradient_mod_p(family, &red, p).iter().all(|&g| g == 0) {
        PointClass::StrongMultiple
    } else {
        PointClass::WeakMultiple
    }
}

pub fn classify_point(v: &FormVector, p: u64) -> Result<PointClass> {
    require_prime(p)?;
    let q = p.checked_mul(p).ok_or_else(|| Error::Unsupported("p² overflows".into()))?;
    let red: Vec<i64> = reduce_mod(v, q)?.into_iter().map(|x| x as i64).collect();
    Ok(classify_lattice(v.family(), &red, p))
}

/// Writes the base-`radix` digits of `idx` (most significant first) into `out`.
fn digits(mut idx: u64, radix: u64, out: &mut [i64]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % radix) as i64;
        idx /= radix;
    }
}

/// Tally of an exhaustive scan over `(ℤ/p²)^m`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BruteTally {
    pub strong: u64,
    pub weak: u64,
}

impl BruteTally {
    pub fn merge(self, o: Self) -> Self {
        BruteTally { strong: self.strong + o.strong, weak: self.weak + o.weak }
    }
}

/// Number of residues visited by [`cp_bruteforce`].
pub fn bruteforce_units(family: Family, p: u64) -> u128 {
    pow_u128(p, 2 * family.dim())
}

pub fn bruteforce_scan(family: Family, p: u64, range: Range<u64>) -> BruteTally {
    let q = p * p;
    let mut c = vec![0i64; family.dim()];
    let mut t = BruteTally::default();
    for idx in range {
        digits(idx, q, &mut c);
        match classify_lattice(family, &c, p) {
            PointClass::StrongMultiple => t.strong += 1,
            PointClass::WeakMultiple => t.weak += 1,
            PointClass::NotMultiple => {}
        }
    }
    t
}

pub fn bruteforce_record(family: Family, p: u64, t: BruteTally) -> LocalDensityRecord {
    let r = |x: u64| BigRational::from_integer(BigInt::from(x));
    LocalDensityRecord {
        family,
        p,
        cp: r(t.strong + t.weak),
        strong: r(t.strong),
        weak: r(t.weak),
        method: Method::BruteForce,
        ci: 0.0,
        samples: 0,
    }
}

/// Exhaustive count over `(ℤ/p²)^m`.
pub fn cp_bruteforce(family: Family, p: u64, budget: u64) -> Result<LocalDensityRecord> {
    require_prime(p)?;
    let units = bruteforce_units(family, p);
    check_budget(units, budget)?;
    Ok(bruteforce_record(family, p, bruteforce_scan(family, p, 0..units as u64)))
}

/// Tally of a scan over canonical representatives `[0, p)^m`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HenselTally {
    /// `f ≡ 0 (mod p)`, `∇f ≢ 0`.
    pub n_w: u64,
    /// `∇f ≡ 0 (mod p)`, `f ≡ 0 (mod p²)`.
    pub n_s: u64,
    /// `∇f ≡ 0 (mod p)`, `f ≡ 0 (mod p)`.
    pub n_singular: u64,
}

impl HenselTally {
    pub fn merge(self, o: Self) -> Self {
        HenselTally { n_w: self.n_w + o.n_w, n_s: self.n_s + o.n_s, n_singular: self.n_singular + o.n_singular }
    }

    /// `#{v̄ : f(v̄) ≡ 0 mod p}`, i.e. `#Y₁(𝔽_p)`.
    pub fn zeros_mod_p(&self) -> u64 {
        self.n_w + self.n_singular
    }
}

/// Whether the scan uses the quadratic-in-last-coordinate fast path, which
/// partitions over the first `m − 1` coordinates.
fn hensel_fast(family: Family, p: u64) -> bool {
    matches!(family, Family::W1 | Family::F3) && p > 2
}

/// Number of partition units of [`hensel_scan`].
pub fn hensel_units(family: Family, p: u64) -> u128 {
    let m = family.dim();
    if hensel_fast(family, p) {
        pow_u128(p, m - 1)
    } else {
        pow_u128(p, m)
    }
}

fn tally_point(family: Family, c: &[i64], p: u64, t: &mut HenselTally) {
    let grad_zero = gradient_mod_p(family, c, p).iter().all(|&g| g == 0);
    if !grad_zero {
        t.n_w += 1;
        return;
    }
    t.n_singular += 1;
    if disc_mod(family, c, p * p) == 0 {
        t.n_s += 1;
    }
}

/// Coefficients `(α, β, γ)` mod p of `f` as a quadratic in the last coordinate.
fn last_quadratic(family: Family, prefix: &[i64], p: u64) -> (u64, u64, u64) {
    let m = |x: i128| x.rem_euclid(p as i128) as u64;
    let v: Vec<i128> = prefix.iter().map(|&x| x as i128).collect();
    match family {
        Family::W1 => (m(-27), 0, m(-4 * v[0] * v[0] * v[0])),
        Family::F3 => {
            let (a, b, c) = (v[0], v[1], v[2]);
            (m(-27 * a * a), m(18 * a * b * c - 4 * b * b * b), m(b * b * c * c - 4 * a * c * c * c))
        }
        _ => unreachable!("fast path only for W1 and F3"),
    }
}

/// Roots in `[0, p)` of `αx² + βx + γ` over `𝔽_p`, `p` odd; `None` if the
/// polynomial vanishes identically.
fn quadratic_roots(alpha: u64, beta: u64, gamma: u64, p: u64) -> Option<Vec<u64>> {
    if alpha == 0 {
        if beta == 0 {
            return if gamma == 0 { None } else { Some(Vec::new()) };
        }
        let inv = inv_mod_u64(beta, p).expect("p prime");
        return Some(vec![mul_mod_u64(p - gamma, inv, p)]);
    }
    let delta = (mul_mod_u64(beta, beta, p) + p - mul_mod_u64(4 % p, mul_mod_u64(alpha, gamma, p), p)) % p;
    let Some(s) = sqrt_mod_prime(delta, p) else {
        return Some(Vec::new());
    };
    let inv2a = inv_mod_u64(mul_mod_u64(2, alpha, p), p).expect("p odd prime");
    let r1 = mul_mod_u64((p - beta + s) % p, inv2a, p);
    let r2 = mul_mod_u64((2 * p - beta - s) % p, inv2a, p);
    Some(if r1 == r2 { vec![r1] } else { vec![r1, r2] })
}

pub fn hensel_scan(family: Family, p: u64, range: Range<u64>) -> HenselTally {
    let m = family.dim();
    let mut c = vec![0i64; m];
    let mut t = HenselTally::default();
    if hensel_fast(family, p) {
        for idx in range {
            digits(idx, p, &mut c[..m - 1]);
            let (a, b, g) = last_quadratic(family, &c[..m - 1], p);
            match quadratic_roots(a, b, g, p) {
                Some(roots) => {
                    for r in roots {
                        c[m - 1] = r as i64;
                        tally_point(family, &c, p, &mut t);
                    }
                }
                None => {
                    for r in 0..p {
                        c[m - 1] = r as i64;
                        tally_point(family, &c, p, &mut t);
                    }
                }
            }
        }
    } else {
        for idx in range {
            digits(idx, p, &mut c);
            if disc_mod(family, &c, p) == 0 {
                tally_point(family, &c, p, &mut t);
            }
        }
    }
    t
}

pub fn hensel_record(family: Family, p: u64, t: HenselTally) -> LocalDensityRecord {
    let m = family.dim();
    let pm = num_traits::pow(BigInt::from(p), m);
    let strong = BigRational::from_integer(&pm * BigInt::from(t.n_s));
    let weak = BigRational::from_integer(&pm / BigInt::from(p) * BigInt::from(t.n_w));
    LocalDensityRecord {
        family,
        p,
        cp: &strong + &weak,
        strong,
        weak,
        method: Method::Hensel,
        ci: 0.0,
        samples: 0,
    }
}

/// `c_p = p^{m−1}·N_w + p^m·N_s` from a scan over `[0, p)^m`.
pub fn cp_hensel(family: Family, p: u64, budget: u64) -> Result<LocalDensityRecord> {
    require_prime(p)?;
    let units = hensel_units(family, p);
    check_budget(units, budget)?;
    Ok(hensel_record(family, p, hensel_scan(family, p, 0..units as u64)))
}

/// Samples per deterministic RNG stream in Monte Carlo scans. Fixed so that
/// results do not depend on how chunks are distributed over workers.
pub const MC_CHUNK: u64 = 1 << 14;

/// Tally of sampled residues.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McTally {
    pub samples: u64,
    pub strong: u64,
    pub weak: u64,
}

impl McTally {
    pub fn merge(self, o: Self) -> Self {
        McTally { samples: self.samples + o.samples, strong: self.strong + o.strong, weak: self.weak + o.weak }
    }
}

/// RNG for chunk `chunk` of the stream family rooted at `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Number of chunks needed for `samples` samples.
pub fn mc_chunks(samples: u64) -> u64 {
    samples.div_ceil(MC_CHUNK)
}

pub fn montecarlo_chunk(family: Family, p: u64, seed: u64, chunk: u64, samples: u64) -> McTally {
    let count = MC_CHUNK.min(samples.saturating_sub(chunk * MC_CHUNK));
    let mut rng = chunk_rng(seed, chunk);
    let q = p * p;
    let mut c = vec![0i64; family.dim()];
    let mut t = McTally { samples: count, ..Default::default() };
    for _ in 0..count {
        for x in c.iter_mut() {
            *x = rng.gen_range(0..q) as i64;
        }
        match classify_lattice(family, &c, p) {
            PointClass::StrongMultiple => t.strong += 1,
            PointClass::WeakMultiple => t.weak += 1,
            PointClass::NotMultiple => {}
        }
    }
    t
}

/// `3·sqrt(q(1 − q)/n)` for an observed proportion `q`.
pub fn three_sigma(hits: u64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let q = hits as f64 / n as f64;
    3.0 * libm::sqrt(q * (1.0 - q) / n as f64)
}

pub fn montecarlo_record(family: Family, p: u64, t: McTally) -> LocalDensityRecord {
    let vol = BigRational::from_integer(num_traits::pow(BigInt::from(p), 2 * family.dim()));
    let frac = |k: u64| BigRational::new(BigInt::from(k), BigInt::from(t.samples.max(1))) * &vol;
    LocalDensityRecord {
        family,
        p,
        cp: frac(t.strong + t.weak),
        strong: frac(t.strong),
        weak: frac(t.weak),
        method: Method::MonteCarlo,
        ci: three_sigma(t.strong + t.weak, t.samples),
        samples: t.samples,
    }
}

/// Unbiased estimate of `c_p / p^{2m}` from uniform residues mod p².
pub fn cp_montecarlo(family: Family, p: u64, samples: u64, seed: u64) -> Result<LocalDensityRecord> {
    require_prime(p)?;
    if samples < 10_000 {
        return Err(Error::pre("Monte Carlo estimates need at least 10^4 samples"));
    }
    let t = (0..mc_chunks(samples))
        .map(|k| montecarlo_chunk(family, p, seed, k, samples))
        .fold(McTally::default(), McTally::merge);
    Ok(montecarlo_record(family, p, t))
}

/// `1 − c_p/p^{2m}` with the given method, using default budget, sample
/// count and seed.
pub fn local_factor(family: Family, p: u64, method: Method) -> Result<BigRational> {
    let rec = match method {
        Method::BruteForce => cp_bruteforce(family, p, crate::DEFAULT_BUDGET)?,
        Method::Hensel => cp_hensel(family, p, crate::DEFAULT_BUDGET)?,
        Method::MonteCarlo => cp_montecarlo(family, p, 100_000, crate::DEFAULT_SEED)?,
    };
    Ok(rec.local_factor())
}

/// Truncated polynomial in one variable with coefficients mod q, used to
/// expand `f(c + h·e_m)` in `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TruncPoly {
    c: Vec<ModQ>,
}

impl Ring for TruncPoly {
    fn add(&self, o: &Self) -> Self {
        TruncPoly { c: self.c.iter().zip(&o.c).map(|(a, b)| a.add(b)).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        TruncPoly { c: self.c.iter().zip(&o.c).map(|(a, b)| a.sub(b)).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut out = vec![self.c[0].zero_like(); n];
        for i in 0..n {
            if self.c[i].v == 0 {
                continue;
            }
            for j in 0..n - i {
                out[i + j] = out[i + j].add(&self.c[i].mul(&o.c[j]));
            }
        }
        TruncPoly { c: out }
    }
    fn scale(&self, k: i64) -> Self {
        TruncPoly { c: self.c.iter().map(|a| a.scale(k)).collect() }
    }
    fn div_exact(&self, k: i64) -> Self {
        TruncPoly { c: self.c.iter().map(|a| a.div_exact(k)).collect() }
    }
    fn one_like(&self) -> Self {
        let mut c = vec![self.c[0].zero_like(); self.c.len()];
        c[0] = self.c[0].one_like();
        TruncPoly { c }
    }
}

/// `T_0, …, T_{k−1}` mod p where `f(c + h·e_m) = Σ T_j h^j`.
pub fn last_taylor_mod(family: Family, c: &[i64], p: u64, k: usize) -> Vec<u64> {
    if family == Family::G3 {
        let t = last_taylor(family, c);
        return (0..k).map(|j| t.get(j).map_or(0, |x| crate::arith::rem_euclid_big(x, p))).collect();
    }
    let extra: i128 = match family {
        Family::F4 => 2,
        Family::G4 => 256,
        _ => 1,
    };
    let q = p as i128 * extra;
    let m = c.len();
    let vars: Vec<TruncPoly> = c
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut coeffs = vec![ModQ::new(0, q); k];
            coeffs[0] = ModQ::new(x as i128, q);
            if i == m - 1 && k > 1 {
                coeffs[1] = ModQ::new(1, q);
            }
            TruncPoly { c: coeffs }
        })
        .collect();
    disc_ring(family, &vars).c.iter().map(|x| x.v as u64).collect()
}

/// `#Y_k(𝔽_p)` where `Y_k = {f = ∂f/∂x_m = … = ∂^{k−1}f/∂x_m^{k−1} = 0}` and
/// `x_m` is the last lattice coordinate.
pub fn count_yk_points(family: Family, k: usize, p: u64, budget: u64) -> Result<u64> {
    require_prime(p)?;
    if !(1..=3).contains(&k) {
        return Err(Error::pre("k must be 1, 2 or 3"));
    }
    let units = pow_u128(p, family.dim());
    check_budget(units, budget)?;
    Ok(count_yk_scan(family, k, p, 0..units as u64))
}

pub fn count_yk_scan(family: Family, k: usize, p: u64, range: Range<u64>) -> u64 {
    let mut c = vec![0i64; family.dim()];
    let mut count = 0;
    for idx in range {
        digits(idx, p, &mut c);
        if disc_mod(family, &c, p) != 0 {
            continue;
        }
        let t = last_taylor_mod(family, &c, p, k);
        // ∂^j f = j!·T_j
        let mut fact = 1u64;
        let vanishes = t.iter().enumerate().all(|(j, &tj)| {
            if j > 0 {
                fact = fact * j as u64 % p;
            }
            mul_mod_u64(fact, tj, p) == 0
        });
        if vanishes {
            count += 1;
        }
    }
    count
}

/// Exact value of the family discriminant at integer lattice coordinates.
pub fn value(family: Family, c: &[i64]) -> BigInt {
    disc_lattice_i64(family, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(family: Family, c: &[i64]) -> FormVector {
        FormVector::from_lattice_i64(family, c).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_point(&fv(Family::F3, &[1, 1, 1, 1]), 3).unwrap(), PointClass::NotMultiple);
        assert_eq!(classify_point(&fv(Family::F3, &[0, 1, 0, 0]), 3).unwrap(), PointClass::WeakMultiple);
        assert_eq!(classify_point(&fv(Family::F3, &[3, 3, 3, 3]), 3).unwrap(), PointClass::StrongMultiple);
        assert!(classify_point(&fv(Family::F3, &[3, 3, 3, 3]), 4).is_err());
    }

    #[test]
    fn closed_gradient_matches_differences() {
        for p in [2u64, 3, 5, 7] {
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let c = [a, b, (a + 2 * b) % p as i64, (a * b + 1) % p as i64];
                    let q = p * p;
                    let base = disc_mod(Family::F3, &c, q);
                    let g = gradient_mod_p(Family::F3, &c, p);
                    for i in 0..4 {
                        let mut d = c;
                        d[i] += p as i64;
                        assert_eq!(g[i], ((disc_mod(Family::F3, &d, q) + q - base) % q) / p);
                    }
                }
            }
        }
    }

    #[test]
    fn weierstrass_records() {
        let r = cp_bruteforce(Family::W1, 2, 1 << 20).unwrap();
        assert_eq!(r.cp, BigRational::from_integer(8.into()));
        assert_eq!(r.local_factor(), BigRational::new(1.into(), 2.into()));
        assert_eq!(r.cp, &r.strong + &r.weak);
        assert_eq!(cp_hensel(Family::W1, 3, 1 << 20).unwrap().cp, cp_bruteforce(Family::W1, 3, 1 << 20).unwrap().cp);
        assert_eq!(local_factor(Family::W1, 2, Method::BruteForce).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(cp_bruteforce(Family::F3, 5, 1000), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(cp_hensel(Family::G4, 3, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn quadratic_roots_small() {
        // x² − 1 over 𝔽₇
        assert_eq!(quadratic_roots(1, 0, 6, 7).unwrap().len(), 2);
        assert_eq!(quadratic_roots(1, 0, 4, 7).unwrap().len(), 0);
        assert_eq!(quadratic_roots(0, 0, 0, 7), None);
        assert_eq!(quadratic_roots(0, 2, 3, 7).unwrap(), vec![2]);
        assert_eq!(quadratic_roots(1, 2, 1, 7).unwrap(), vec![6]);
    }

    #[test]
    fn taylor_mod_matches_exact() {
        for family in [Family::W1, Family::F3, Family::G2, Family::F4] {
            for seed in 0..10u64 {
                let c = crate::forms::random_form(family, 4, seed).lattice_i64().unwrap();
                let exact = last_taylor(family, &c);
                let modp = last_taylor_mod(family, &c, 7, 3);
                for j in 0..3 {
                    assert_eq!(modp[j], crate::arith::rem_euclid_big(&exact[j], 7));
                }
            }
        }
    }

    #[test]
    fn yk_counts_nonincreasing() {
        for family in [Family::W1, Family::F3, Family::G2] {
            for p in [2u64, 3, 5] {
                let counts: Vec<u64> = (1..=3).map(|k| count_yk_points(family, k, p, 1 << 20).unwrap()).collect();
                assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{family} {p} {counts:?}");
                let h = cp_hensel(family, p, 1 << 20).unwrap();
                let scan = hensel_scan(family, p, 0..hensel_units(family, p) as u64);
                assert_eq!(counts[0], scan.zeros_mod_p());
                assert_eq!(h.cp, hensel_record(family, p, scan).cp);
            }
        }
    }
}
