//! Box experiments: squarefree densities of discriminant values, lattice
//! points on subvarieties, and Ekedahl-style tail counts.
//!
//! Boxes are scanned slab by slab along the first lattice coordinate; every
//! scan has a per-slab entry point whose results merge by addition, so a
//! driver may distribute slabs freely without changing the totals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{
    abs_u128, is_perfect_square_big, is_perfect_square_u128, is_prime_u128, isqrt_u128, pollard_rho_u128,
    primes_up_to, DivTest,
};
use crate::error::{check_budget, Error, Result};
use crate::forms::Family;
use crate::invariants::{disc_i128, disc_lattice_i64, last_partial, last_partial_i128, pencil_det, Checked};
use crate::localdensity::{chunk_rng, classify_lattice, three_sigma, PointClass, MC_CHUNK};

/// Default trial-division bound of [`squarefree_test`].
pub const DEFAULT_TRIAL_BOUND: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquarefreeVerdict {
    Squarefree,
    /// `witness` is a prime whose square divides n; absent only for n = 0.
    NotSquarefree { witness: Option<u128> },
    Unknown,
}

/// Trial division up to a fixed bound followed by a certified decision on
/// the cofactor.
///
/// After removing the primes `p ≤ T` the cofactor has only prime factors
/// above `T`. Trial division stops early once `p³` exceeds the cofactor, and
/// a cofactor below `T³` is then `1`, `q`, `q²` or `qq′`, decided by a
/// perfect-square test. Larger cofactors are decided by a perfect-square
/// test, Miller–Rabin and Pollard rho while they stay below the
/// deterministic Miller–Rabin range; beyond that the verdict is `Unknown`.
#[derive(Debug, Clone)]
pub struct SquarefreeTester {
    bound: u64,
    primes: Vec<(u64, DivTest)>,
}

impl SquarefreeTester {
    pub fn new(trial_bound: u64) -> Self {
        let primes = primes_up_to(trial_bound.max(2)).into_iter().map(|p| (p, DivTest::new(p))).collect();
        SquarefreeTester { bound: trial_bound.max(2), primes }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn test_u128(&self, n: u128) -> SquarefreeVerdict {
        if n == 0 {
            return SquarefreeVerdict::NotSquarefree { witness: None };
        }
        let mut m = n;
        for &(p, dt) in &self.primes {
            let p3 = (p as u128) * (p as u128) * (p as u128);
            if p3 > m {
                return decide_below_cube(m);
            }
            let divides = |x: u128| if x <= u64::MAX as u128 { dt.divides(x as u64) } else { x % p as u128 == 0 };
            if divides(m) {
                m /= p as u128;
                if divides(m) {
                    return SquarefreeVerdict::NotSquarefree { witness: Some(p as u128) };
                }
            }
        }
        self.decide_cofactor(m)
    }

    /// Cofactor with all prime factors above the trial bound.
    fn decide_cofactor(&self, m: u128) -> SquarefreeVerdict {
        let t = self.bound as u128 + 1;
        if m < t * t * t {
            return decide_below_cube(m);
        }
        if is_perfect_square_u128(m) {
            let r = isqrt_u128(m);
            let witness = match is_prime_u128(r) {
                Some(true) => r,
                _ => smallest_factor(r).unwrap_or(r),
            };
            return SquarefreeVerdict::NotSquarefree { witness: Some(witness) };
        }
        let mut factors = Vec::new();
        if !factor_u128(m, &mut factors) {
            return SquarefreeVerdict::Unknown;
        }
        factors.sort_unstable();
        match factors.windows(2).find(|w| w[0] == w[1]) {
            Some(w) => SquarefreeVerdict::NotSquarefree { witness: Some(w[0]) },
            None => SquarefreeVerdict::Squarefree,
        }
    }

    pub fn test(&self, n: &BigInt) -> SquarefreeVerdict {
        if let Some(u) = abs_u128(n) {
            return self.test_u128(u);
        }
        let mut m = n.abs();
        for &(p, _) in &self.primes {
            let pb = BigInt::from(p);
            if m.is_multiple_of(&pb) {
                m /= &pb;
                if m.is_multiple_of(&pb) {
                    return SquarefreeVerdict::NotSquarefree { witness: Some(p as u128) };
                }
            }
        }
        if let Some(u) = m.to_u128() {
            return self.decide_cofactor(u);
        }
        let mu = m.magnitude();
        if is_perfect_square_big(mu) {
            return SquarefreeVerdict::NotSquarefree { witness: mu.sqrt().to_u128() };
        }
        SquarefreeVerdict::Unknown
    }
}

fn decide_below_cube(m: u128) -> SquarefreeVerdict {
    if m > 1 && is_perfect_square_u128(m) {
        SquarefreeVerdict::NotSquarefree { witness: Some(isqrt_u128(m)) }
    } else {
        SquarefreeVerdict::Squarefree
    }
}

fn smallest_factor(n: u128) -> Option<u128> {
    let mut f = Vec::new();
    factor_u128(n, &mut f).then(|| f.into_iter().min().unwrap_or(n))
}

/// Full factorization into certified primes; false if some cofactor cannot
/// be certified.
fn factor_u128(n: u128, out: &mut Vec<u128>) -> bool {
    if n == 1 {
        return true;
    }
    match is_prime_u128(n) {
        Some(true) => {
            out.push(n);
            true
        }
        None => false,
        Some(false) => {
            let d = pollard_rho_u128(n);
            factor_u128(d, out) && factor_u128(n / d, out)
        }
    }
}

/// Squarefree decision for `n` with trial division by primes up to
/// `trial_bound`; see [`SquarefreeTester`].
pub fn squarefree_test(n: &BigInt, trial_bound: u64) -> SquarefreeVerdict {
    SquarefreeTester::new(trial_bound).test(n)
}

/// Axis-aligned integer box `∏ [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IntBox {
    pub fn cube(m: usize, r: i64) -> Self {
        IntBox { lo: vec![-r; m], hi: vec![r; m] }
    }

    pub fn volume(&self) -> u128 {
        self.lo.iter().zip(&self.hi).fold(1u128, |acc, (l, h)| acc.saturating_mul((h - l + 1).max(0) as u128))
    }

    /// Number of slabs along the first coordinate.
    pub fn slabs(&self) -> u64 {
        (self.hi[0] - self.lo[0] + 1).max(0) as u64
    }

    /// Visits every point whose first coordinate is `lo[0] + slab`.
    pub fn for_each_in_slab(&self, slab: u64, mut f: impl FnMut(&[i64])) {
        let m = self.lo.len();
        let mut c = self.lo.clone();
        c[0] = self.lo[0] + slab as i64;
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) {
            return;
        }
        loop {
            f(&c);
            let mut i = m - 1;
            loop {
                if i == 0 {
                    return;
                }
                if c[i] < self.hi[i] {
                    c[i] += 1;
                    break;
                }
                c[i] = self.lo[i];
                i -= 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Exhaustive,
    MonteCarlo,
}

/// Per-experiment tallies of a squarefree-density run.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveReport {
    pub family: Family,
    pub n: u64,
    pub mode: SampleMode,
    pub prime_cutoff: u64,
    pub trial_bound: u64,
    pub total: u64,
    pub disc_zero: u64,
    pub squarefree: u64,
    pub not_squarefree: u64,
    pub unresolved: u64,
    /// For each `p ≤ prime_cutoff`: points with `p² | f` that are strong multiples.
    pub per_prime_strong: BTreeMap<u64, u64>,
    /// For each `p ≤ prime_cutoff`: points with `p² | f` that are weak multiples.
    pub per_prime_weak: BTreeMap<u64, u64>,
    /// Points with `f ≠ 0` whose least prime `p` with `p² | f` is this `p ≤ prime_cutoff`.
    pub first_square_prime: BTreeMap<u64, u64>,
    pub seed: Option<u64>,
    /// Seconds; filled in by drivers that measure it.
    pub wall_clock: Option<f64>,
}

impl SieveReport {
    pub fn empty(family: Family, n: u64, mode: SampleMode, prime_cutoff: u64, trial_bound: u64) -> Self {
        let zeros: BTreeMap<u64, u64> = primes_up_to(prime_cutoff).into_iter().map(|p| (p, 0)).collect();
        SieveReport {
            family,
            n,
            mode,
            prime_cutoff,
            trial_bound,
            total: 0,
            disc_zero: 0,
            squarefree: 0,
            not_squarefree: 0,
            unresolved: 0,
            per_prime_strong: zeros.clone(),
            per_prime_weak: zeros.clone(),
            first_square_prime: zeros,
            seed: None,
            wall_clock: None,
        }
    }

    /// Fieldwise sum; both reports must describe the same experiment.
    pub fn merge(mut self, o: &SieveReport) -> Self {
        self.total += o.total;
        self.disc_zero += o.disc_zero;
        self.squarefree += o.squarefree;
        self.not_squarefree += o.not_squarefree;
        self.unresolved += o.unresolved;
        for (map, other) in [
            (&mut self.per_prime_strong, &o.per_prime_strong),
            (&mut self.per_prime_weak, &o.per_prime_weak),
            (&mut self.first_square_prime, &o.first_square_prime),
        ] {
            for (p, c) in other {
                *map.entry(*p).or_insert(0) += c;
            }
        }
        self
    }

    /// `P ↦ #{points with f ≠ 0 and p² ∤ f for all p ≤ P}`, for primes `P ≤ prime_cutoff`.
    pub fn sandwich_counts(&self) -> BTreeMap<u64, u64> {
        let mut running = self.total - self.disc_zero;
        self.first_square_prime
            .iter()
            .map(|(&p, &c)| {
                running -= c;
                (p, running)
            })
            .collect()
    }

    pub fn squarefree_fraction(&self) -> f64 {
        self.squarefree as f64 / self.total.max(1) as f64
    }

    /// 3-sigma binomial radius of the squarefree fraction.
    pub fn radius(&self) -> f64 {
        three_sigma(self.squarefree, self.total)
    }
}

/// Exact value of f at a lattice point, in `i128` when it fits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Small(i128),
    Big(BigInt),
}

impl Value {
    pub fn of(family: Family, c: &[i64]) -> Self {
        match disc_i128(family, c) {
            Some(v) => Value::Small(v),
            None => Value::Big(disc_lattice_i64(family, c)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Small(v) => *v == 0,
            Value::Big(v) => v.is_zero(),
        }
    }
}

struct SquareTest {
    p: u64,
    sq: u64,
    test: Option<DivTest>,
}

impl SquareTest {
    fn new(p: u64) -> Self {
        let sq = p * p;
        SquareTest { p, sq, test: (p != 2).then(|| DivTest::new(sq)) }
    }

    fn divides(&self, v: &Value) -> bool {
        match v {
            Value::Small(x) => {
                let a = x.unsigned_abs();
                match (self.test, a <= u64::MAX as u128) {
                    (None, _) => a & 3 == 0,
                    (Some(t), true) => t.divides(a as u64),
                    (Some(_), false) => a % self.sq as u128 == 0,
                }
            }
            Value::Big(x) => x.is_multiple_of(&BigInt::from(self.sq)),
        }
    }
}

/// Shared per-worker state for density scans.
struct DensityScan {
    family: Family,
    squares: Vec<SquareTest>,
    tester: SquarefreeTester,
}

impl DensityScan {
    fn new(family: Family, prime_cutoff: u64, trial_bound: u64) -> Self {
        DensityScan {
            family,
            squares: primes_up_to(prime_cutoff).into_iter().map(SquareTest::new).collect(),
            tester: SquarefreeTester::new(trial_bound),
        }
    }

    fn tally(&self, c: &[i64], rep: &mut SieveReport) {
        rep.total += 1;
        let v = Value::of(self.family, c);
        let zero = v.is_zero();
        let mut first = None;
        for sq in &self.squares {
            if zero || sq.divides(&v) {
                if first.is_none() {
                    first = Some(sq.p);
                }
                match classify_lattice(self.family, c, sq.p) {
                    PointClass::StrongMultiple => *rep.per_prime_strong.get_mut(&sq.p).expect("prime key") += 1,
                    PointClass::WeakMultiple => *rep.per_prime_weak.get_mut(&sq.p).expect("prime key") += 1,
                    PointClass::NotMultiple => unreachable!("p² divides the value"),
                }
            }
        }
        if zero {
            rep.disc_zero += 1;
            return;
        }
        if let Some(p) = first {
            *rep.first_square_prime.get_mut(&p).expect("prime key") += 1;
            rep.not_squarefree += 1;
            return;
        }
        let verdict = match &v {
            Value::Small(x) => self.tester.test_u128(x.unsigned_abs()),
            Value::Big(x) => self.tester.test(x),
        };
        match verdict {
            SquarefreeVerdict::Squarefree => rep.squarefree += 1,
            SquarefreeVerdict::NotSquarefree { .. } => rep.not_squarefree += 1,
            SquarefreeVerdict::Unknown => rep.unresolved += 1,
        }
    }
}

fn check_trial(prime_cutoff: u64, trial_bound: u64) -> Result<()> {
    if trial_bound < prime_cutoff {
        return Err(Error::pre("trial bound must be at least the prime cutoff"));
    }
    Ok(())
}

/// One leading-coordinate slab of [`density_box`].
pub fn density_box_slab(family: Family, n: u64, prime_cutoff: u64, trial_bound: u64, slab: u64) -> SieveReport {
    let scan = DensityScan::new(family, prime_cutoff, trial_bound);
    let mut rep = SieveReport::empty(family, n, SampleMode::Exhaustive, prime_cutoff, trial_bound);
    IntBox::cube(family.dim(), n as i64).for_each_in_slab(slab, |c| scan.tally(c, &mut rep));
    rep
}

/// Exhaustive squarefree tally over `[−N, N]^m`.
pub fn density_box(family: Family, n: u64, prime_cutoff: u64, trial_bound: u64, budget: u64) -> Result<SieveReport> {
    check_trial(prime_cutoff, trial_bound)?;
    let b = IntBox::cube(family.dim(), n as i64);
    check_budget(b.volume(), budget)?;
    let empty = SieveReport::empty(family, n, SampleMode::Exhaustive, prime_cutoff, trial_bound);
    Ok((0..b.slabs()).fold(empty, |acc, s| acc.merge(&density_box_slab(family, n, prime_cutoff, trial_bound, s))))
}

/// One fixed-size chunk of [`density_montecarlo`].
pub fn density_montecarlo_chunk(
    family: Family,
    n: u64,
    samples: u64,
    seed: u64,
    prime_cutoff: u64,
    trial_bound: u64,
    chunk: u64,
) -> SieveReport {
    let scan = DensityScan::new(family, prime_cutoff, trial_bound);
    let mut rep = SieveReport::empty(family, n, SampleMode::MonteCarlo, prime_cutoff, trial_bound);
    rep.seed = Some(seed);
    let count = MC_CHUNK.min(samples.saturating_sub(chunk * MC_CHUNK));
    let mut rng = chunk_rng(seed, chunk);
    let r = n as i64;
    let mut c = vec![0i64; family.dim()];
    for _ in 0..count {
        for x in c.iter_mut() {
            *x = rng.gen_range(-r..=r);
        }
        scan.tally(&c, &mut rep);
    }
    rep
}

/// Uniform sampling from `[−N, N]^m`; the estimate is `squarefree/total`
/// with radius [`SieveReport::radius`].
pub fn density_montecarlo(
    family: Family,
    n: u64,
    samples: u64,
    seed: u64,
    prime_cutoff: u64,
    trial_bound: u64,
) -> Result<SieveReport> {
    check_trial(prime_cutoff, trial_bound)?;
    if samples < 10_000 {
        return Err(Error::pre("Monte Carlo estimates need at least 10^4 samples"));
    }
    let mut empty = SieveReport::empty(family, n, SampleMode::MonteCarlo, prime_cutoff, trial_bound);
    empty.seed = Some(seed);
    Ok((0..crate::localdensity::mc_chunks(samples)).fold(empty, |acc, k| {
        acc.merge(&density_montecarlo_chunk(family, n, samples, seed, prime_cutoff, trial_bound, k))
    }))
}

/// Integer polynomials available to [`count_on_variety`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// The discriminant f.
    Disc,
    /// `∂f/∂x_m` in the last lattice coordinate.
    LastPartial,
    /// `det(As + Bt)` vanishes identically (pair families only).
    PencilDegenerate,
}

fn pencil_degenerate(family: Family, c: &[i64]) -> bool {
    let k = family.gram_size().expect("pair family");
    let half = k * (k + 1) / 2;
    let gram = |xs: &[i64]| -> Vec<Vec<Checked>> {
        let mut m = vec![vec![Checked(Some(0)); k]; k];
        let mut idx = 0;
        for i in 0..k {
            for j in i..k {
                let v = if i == j { 2 * xs[idx] as i128 } else { xs[idx] as i128 };
                m[i][j] = Checked(Some(v));
                m[j][i] = Checked(Some(v));
                idx += 1;
            }
        }
        m
    };
    let f = pencil_det(&gram(&c[..half]), &gram(&c[half..]));
    if f.iter().all(|x| x.0.is_some()) {
        return f.iter().all(|x| x.0 == Some(0));
    }
    let big = |xs: &[i64]| -> Vec<Vec<BigInt>> {
        gram(xs).into_iter().map(|r| r.into_iter().map(|x| BigInt::from(x.0.unwrap_or(0))).collect()).collect()
    };
    pencil_det(&big(&c[..half]), &big(&c[half..])).iter().all(|x| x.is_zero())
}

fn satisfies(family: Family, eqs: &[Equation], c: &[i64]) -> bool {
    eqs.iter().all(|e| match e {
        Equation::Disc => Value::of(family, c).is_zero(),
        Equation::LastPartial => match last_partial_i128(family, c) {
            Some(v) => v == 0,
            None => last_partial(family, c).is_zero(),
        },
        Equation::PencilDegenerate => pencil_degenerate(family, c),
    })
}

pub fn validate_equations(family: Family, eqs: &[Equation]) -> Result<()> {
    if eqs.is_empty() {
        return Err(Error::pre("at least one equation is required"));
    }
    if eqs.contains(&Equation::PencilDegenerate) && family.gram_size().is_none() {
        return Err(Error::Unsupported(format!("{family} has no pencil")));
    }
    Ok(())
}

pub fn count_on_variety_slab(family: Family, eqs: &[Equation], r: u64, slab: u64) -> u64 {
    let mut count = 0;
    IntBox::cube(family.dim(), r as i64).for_each_in_slab(slab, |c| {
        if satisfies(family, eqs, c) {
            count += 1;
        }
    });
    count
}

/// Integral points of `[−r, r]^m` on which every equation vanishes.
pub fn count_on_variety(family: Family, eqs: &[Equation], r: u64, budget: u64) -> Result<u64> {
    validate_equations(family, eqs)?;
    let b = IntBox::cube(family.dim(), r as i64);
    check_budget(b.volume(), budget)?;
    Ok((0..b.slabs()).map(|s| count_on_variety_slab(family, eqs, r, s)).sum())
}

/// `gcd(|f|, |∂f/∂x_m|)` at a lattice point.
fn y2_gcd(family: Family, c: &[i64]) -> BigInt {
    if let (Some(Value::Small(f)), Some(d)) = (Some(Value::of(family, c)), last_partial_i128(family, c)) {
        return BigInt::from(f.unsigned_abs().gcd(&d.unsigned_abs()));
    }
    let f = disc_lattice_i64(family, c);
    f.gcd(&last_partial(family, c))
}

/// Counts, for each threshold `M` in `ms`, the points of `bx` in slab `slab`
/// reducing into `Y₂(𝔽_p)` for some prime `p > M`.
pub fn tail_counts_slab(family: Family, bx: &IntBox, ms: &[u64], slab: u64) -> Vec<u64> {
    let max_m = ms.iter().copied().max().unwrap_or(0);
    let primes = primes_up_to(max_m);
    let mut counts = vec![0u64; ms.len()];
    bx.for_each_in_slab(slab, |c| {
        let g = y2_gcd(family, c);
        if g.is_zero() {
            counts.iter_mut().for_each(|x| *x += 1);
            return;
        }
        let mut rest = g;
        let mut largest_small = 1u64;
        for &p in &primes {
            let pb = BigInt::from(p);
            if rest.is_multiple_of(&pb) {
                largest_small = p;
                while rest.is_multiple_of(&pb) {
                    rest /= &pb;
                }
            }
        }
        for (k, &m) in ms.iter().enumerate() {
            if rest > BigInt::from(1) || largest_small > m {
                counts[k] += 1;
            }
        }
    });
    counts
}

fn check_thresholds(ms: &[u64]) -> Result<()> {
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::pre("thresholds M must be positive"));
    }
    Ok(())
}

/// [`tail_count`] for several thresholds in one pass.
pub fn tail_counts(family: Family, r: u64, ms: &[u64], budget: u64) -> Result<Vec<u64>> {
    check_thresholds(ms)?;
    if r == 0 {
        return Err(Error::pre("r must be positive"));
    }
    let bx = IntBox::cube(family.dim(), r as i64);
    check_budget(bx.volume(), budget)?;
    Ok(sum_slabs(family, &bx, ms))
}

fn sum_slabs(family: Family, bx: &IntBox, ms: &[u64]) -> Vec<u64> {
    (0..bx.slabs()).fold(vec![0; ms.len()], |acc, s| {
        acc.iter().zip(tail_counts_slab(family, bx, ms, s)).map(|(a, b)| a + b).collect()
    })
}

/// `#{a ∈ [−r, r]^m ∩ ℤ^m : a mod p ∈ Y₂(𝔽_p) for some prime p > M}`, where
/// `Y₂ = {f = ∂f/∂x_m = 0}`; decided through `gcd(f(a), ∂f/∂x_m(a))`.
pub fn tail_count(family: Family, r: u64, m: u64, budget: u64) -> Result<u64> {
    Ok(tail_counts(family, r, &[m], budget)?[0])
}

/// The skewed box `∏ [−r·tᵢ, r·tᵢ]` for a diagonal `t` with `∏ tᵢ = 1`.
pub fn skewed_box(family: Family, r: u64, t: &[BigRational]) -> Result<IntBox> {
    if t.len() != family.dim() {
        return Err(Error::ShapeMismatch(format!("{family} needs {} scaling entries", family.dim())));
    }
    let prod = t.iter().fold(BigRational::from_integer(1.into()), |acc, x| acc * x);
    if prod != BigRational::from_integer(1.into()) {
        return Err(Error::pre("scaling entries must multiply to 1"));
    }
    let mut hi = Vec::with_capacity(t.len());
    for x in t {
        let s = x * BigInt::from(r);
        if s < BigRational::from_integer(1.into()) {
            return Err(Error::pre("every r·tᵢ must be at least 1"));
        }
        hi.push(s.floor().to_integer().to_i64().ok_or_else(|| Error::pre("box too large"))?);
    }
    Ok(IntBox { lo: hi.iter().map(|h| -h).collect(), hi })
}

pub fn tail_counts_skewed(family: Family, r: u64, t: &[BigRational], ms: &[u64], budget: u64) -> Result<Vec<u64>> {
    check_thresholds(ms)?;
    let bx = skewed_box(family, r, t)?;
    check_budget(bx.volume(), budget)?;
    Ok(sum_slabs(family, &bx, ms))
}

pub fn tail_count_skewed(family: Family, r: u64, t: &[BigRational], m: u64, budget: u64) -> Result<u64> {
    Ok(tail_counts_skewed(family, r, t, &[m], budget)?[0])
}

/// Box counts of strong (`W⁽¹⁾`) and weak (`W⁽²⁾`) multiples of p².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongWeakHistogram {
    pub total: u64,
    /// `p ↦ (strong, weak)`.
    pub counts: BTreeMap<u64, (u64, u64)>,
}

impl StrongWeakHistogram {
    pub fn merge(mut self, o: &Self) -> Self {
        self.total += o.total;
        for (p, (s, w)) in &o.counts {
            let e = self.counts.entry(*p).or_insert((0, 0));
            e.0 += s;
            e.1 += w;
        }
        self
    }
}

pub fn strong_weak_histogram_slab(family: Family, n: u64, primes: &[u64], slab: u64) -> StrongWeakHistogram {
    let mut h = StrongWeakHistogram { total: 0, counts: primes.iter().map(|&p| (p, (0, 0))).collect() };
    IntBox::cube(family.dim(), n as i64).for_each_in_slab(slab, |c| {
        h.total += 1;
        for &p in primes {
            match classify_lattice(family, c, p) {
                PointClass::StrongMultiple => h.counts.get_mut(&p).expect("prime key").0 += 1,
                PointClass::WeakMultiple => h.counts.get_mut(&p).expect("prime key").1 += 1,
                PointClass::NotMultiple => {}
            }
        }
    });
    h
}

pub fn strong_weak_histogram(family: Family, n: u64, primes: &[u64], budget: u64) -> Result<StrongWeakHistogram> {
    if let Some(&p) = primes.iter().find(|&&p| !crate::arith::is_prime_u64(p)) {
        return Err(Error::pre(format!("{p} is not prime")));
    }
    let bx = IntBox::cube(family.dim(), n as i64);
    check_budget(bx.volume(), budget)?;
    let empty = StrongWeakHistogram { total: 0, counts: primes.iter().map(|&p| (p, (0, 0))).collect() };
    Ok((0..bx.slabs()).fold(empty, |acc, s| acc.merge(&strong_weak_histogram_slab(family, n, primes, s))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn v(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_test(&v(12), 10_000), SquarefreeVerdict::NotSquarefree { witness: Some(2) });
        assert_eq!(squarefree_test(&v(-30), 10_000), SquarefreeVerdict::Squarefree);
        assert_eq!(squarefree_test(&v(0), 10_000), SquarefreeVerdict::NotSquarefree { witness: None });
        assert_eq!(squarefree_test(&v(1), 10_000), SquarefreeVerdict::Squarefree);
        assert_eq!(squarefree_test(&v(-1), 10_000), SquarefreeVerdict::Squarefree);
        assert_eq!(squarefree_test(&v(1009 * 1009), 100), SquarefreeVerdict::NotSquarefree { witness: Some(1009) });
        // q·q′ with both factors above a small cap
        assert_eq!(squarefree_test(&v(1009 * 1013 * 1019), 100), SquarefreeVerdict::Squarefree);
        assert_eq!(
            squarefree_test(&v(1009 * 1009 * 1013), 100),
            SquarefreeVerdict::NotSquarefree { witness: Some(1009) }
        );
    }

    #[test]
    fn squarefree_matches_naive() {
        let t = SquarefreeTester::new(50);
        for n in 1..20_000u128 {
            let naive = (2..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0);
            let got = t.test_u128(n);
            assert_eq!(got == SquarefreeVerdict::Squarefree, naive, "{n}");
        }
    }

    #[test]
    fn large_cofactors() {
        let p1: u128 = 1_000_003;
        let p2: u128 = 999_983;
        let t = SquarefreeTester::new(1000);
        assert_eq!(t.test_u128(p1 * p1 * p2), SquarefreeVerdict::NotSquarefree { witness: Some(p1) });
        assert_eq!(t.test_u128(p1 * p2 * 3), SquarefreeVerdict::Squarefree);
        let big = BigInt::from(p1 * p1) * BigInt::from(p2 * p2);
        assert!(matches!(t.test(&big), SquarefreeVerdict::NotSquarefree { .. }));
        // beyond the certified primality range
        let q: u128 = 1_000_000_007;
        assert_eq!(t.test_u128(q * q * 998_244_353), SquarefreeVerdict::Unknown);
    }

    #[test]
    fn f3_box_radius_one() {
        let rep = density_box(Family::F3, 1, 7, 100, 1 << 20).unwrap();
        assert_eq!(rep.total, 81);
        assert_eq!(rep.squarefree + rep.not_squarefree + rep.unresolved + rep.disc_zero, rep.total);
        // independent recount
        let mut sf = 0;
        let mut zero = 0;
        for a in -1..=1i64 {
            for b in -1..=1i64 {
                for c in -1..=1i64 {
                    for d in -1..=1i64 {
                        let f = 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d;
                        if f == 0 {
                            zero += 1;
                        } else if (2..=f.abs()).all(|p| f % (p * p) != 0) {
                            sf += 1;
                        }
                    }
                }
            }
        }
        assert_eq!((rep.squarefree, rep.disc_zero), (sf, zero));
        let sandwich = rep.sandwich_counts();
        assert!(sandwich.values().all(|&s| s >= rep.squarefree));
        assert!(sandwich.values().collect::<Vec<_>>().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn montecarlo_is_deterministic() {
        let a = density_montecarlo(Family::F3, 20, 20_000, 7, 20, 1000).unwrap();
        let b = density_montecarlo(Family::F3, 20, 20_000, 7, 20, 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total, 20_000);
        assert!(density_montecarlo(Family::F3, 20, 100, 7, 20, 1000).is_err());
    }

    #[test]
    fn variety_counts() {
        // only the origin in the degenerate box
        assert_eq!(count_on_variety(Family::F3, &[Equation::Disc], 0, 10).unwrap(), 1);
        assert_eq!(count_on_variety(Family::W1, &[Equation::Disc, Equation::LastPartial], 3, 1000).unwrap(), 1);
        assert!(count_on_variety(Family::F3, &[Equation::PencilDegenerate], 1, 1000).is_err());
        assert!(count_on_variety(Family::F3, &[], 1, 1000).is_err());
    }

    #[test]
    fn tails() {
        let counts = tail_counts(Family::F3, 4, &[5, 10, 20, 40], 1 << 20).unwrap();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]));
        let t = vec![int(1); 4];
        assert_eq!(tail_counts_skewed(Family::F3, 4, &t, &[5, 10, 20, 40], 1 << 20).unwrap(), counts);
        let bad = vec![int(2), int(1), int(1), int(1)];
        assert!(tail_count_skewed(Family::F3, 4, &bad, 5, 1 << 20).is_err());
        let thin = vec![BigRational::new(1.into(), 8.into()), int(2), int(2), int(2)];
        assert!(tail_count_skewed(Family::F3, 4, &thin, 5, 1 << 20).is_err());
        // above every gcd in the box only the g = 0 points remain
        let zeros = count_on_variety(Family::F3, &[Equation::Disc, Equation::LastPartial], 2, 1 << 20).unwrap();
        assert_eq!(tail_count(Family::F3, 2, 1_000_000, 1 << 20).unwrap(), zeros);
    }

    #[test]
    fn histogram_partition() {
        let h = strong_weak_histogram(Family::F3, 3, &[2, 3], 1 << 20).unwrap();
        let rep = density_box(Family::F3, 3, 3, 100, 1 << 20).unwrap();
        for p in [2u64, 3] {
            assert_eq!(h.counts[&p], (rep.per_prime_strong[&p], rep.per_prime_weak[&p]));
        }
        // the zero form is strong for every p
        let z = strong_weak_histogram(Family::G2, 0, &[2, 3, 5], 10).unwrap();
        assert!(z.counts.values().all(|&(s, w)| s == 1 && w == 0));
    }
}
