//! Parallel drivers over the core scans.
//!
//! Every scan in the core crate exposes a partition (residue ranges, box
//! slabs or sample chunks) and an exact merge. The runner fans partitions
//! out over a fixed-size pool and folds the results in partition order, so
//! the outcome does not depend on the number of workers.

use std::ops::Range;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use sqfsieve_core::arith::{is_prime_u64, primes_up_to};
use sqfsieve_core::arithstat::{density_factor, partial_products};
use sqfsieve_core::decimal::Decimal;
use sqfsieve_core::geosieve::{
    count_on_variety_slab, density_box_slab, density_montecarlo_chunk, skewed_box, strong_weak_histogram_slab,
    tail_counts_slab, validate_equations, Equation, IntBox, SampleMode, SieveReport, StrongWeakHistogram,
};
use sqfsieve_core::localdensity::{
    bruteforce_record, bruteforce_scan, bruteforce_units, count_yk_scan, hensel_record, hensel_scan, hensel_units,
    mc_chunks, montecarlo_chunk, montecarlo_record, BruteTally, HenselTally, LocalDensityRecord, McTally, Method,
};
use sqfsieve_core::{Error, Family};

use crate::cache::{Cache, CacheKey};
use crate::RunError;

/// Partitions per worker for residue scans; uneven ranges balance better when split finer.
const SPLIT_FACTOR: u64 = 8;

fn check_budget(needed: u128, budget: u64) -> Result<(), RunError> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { needed, budget }.into())
    } else {
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<(), RunError> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{p} is not prime")).into())
    }
}

fn check_trial(cutoff: u64, trial: u64) -> Result<(), RunError> {
    if trial < cutoff {
        return Err(Error::Precondition(format!("trial bound {trial} is below the prime cutoff {cutoff}")).into());
    }
    Ok(())
}

pub struct Runner {
    pool: rayon::ThreadPool,
    threads: usize,
    budget: u64,
    cache: Option<Cache>,
}

impl Runner {
    pub fn new(threads: usize, budget: u64, cache: Option<Cache>) -> Result<Self, RunError> {
        if threads == 0 {
            return Err(RunError::Usage("--threads must be at least 1".into()));
        }
        if budget == 0 {
            return Err(RunError::Usage("--budget must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RunError::Usage(format!("cannot start {threads} workers: {e}")))?;
        Ok(Runner { pool, threads, budget, cache })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    /// Disjoint ranges covering `0..units`.
    fn ranges(&self, units: u64) -> Vec<Range<u64>> {
        let parts = (self.threads as u64 * SPLIT_FACTOR).clamp(1, units.max(1));
        let step = units.div_ceil(parts);
        (0..parts).map(|i| (i * step).min(units)..((i + 1) * step).min(units)).filter(|r| !r.is_empty()).collect()
    }

    /// Maps `f` over `parts` on the pool and returns results in input order.
    fn map<T: Send, I: Sync>(&self, parts: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
        self.pool.install(|| parts.par_iter().map(&f).collect())
    }

    fn units(n: u128) -> Result<u64, RunError> {
        u64::try_from(n).map_err(|_| Error::BudgetExceeded { needed: n, budget: u64::MAX }.into())
    }

    /// Local count with the given method, without the cache.
    pub fn cp_uncached(&self, family: Family, p: u64, method: Method, samples: u64, seed: u64) -> Result<LocalDensityRecord, RunError> {
        check_prime(p)?;
        match method {
            Method::BruteForce => {
                let n = bruteforce_units(family, p);
                check_budget(n, self.budget)?;
                let tallies = self.map(&self.ranges(Self::units(n)?), |r| bruteforce_scan(family, p, r.clone()));
                let t = tallies.into_iter().fold(BruteTally::default(), BruteTally::merge);
                Ok(bruteforce_record(family, p, t))
            }
            Method::Hensel => {
                let n = hensel_units(family, p);
                check_budget(n, self.budget)?;
                let tallies = self.map(&self.ranges(Self::units(n)?), |r| hensel_scan(family, p, r.clone()));
                let t = tallies.into_iter().fold(HenselTally::default(), HenselTally::merge);
                Ok(hensel_record(family, p, t))
            }
            Method::MonteCarlo => {
                if samples == 0 {
                    return Err(Error::Precondition("Monte Carlo needs a positive sample count".into()).into());
                }
                check_budget(samples as u128, self.budget)?;
                let chunks: Vec<u64> = (0..mc_chunks(samples)).collect();
                let tallies = self.map(&chunks, |&k| montecarlo_chunk(family, p, seed, k, samples));
                let t = tallies.into_iter().fold(McTally::default(), McTally::merge);
                Ok(montecarlo_record(family, p, t))
            }
        }
    }

    /// Local count through the cache when one is configured. The flag reports a cache hit.
    pub fn cp(&self, family: Family, p: u64, method: Method, samples: u64, seed: u64) -> Result<(LocalDensityRecord, bool), RunError> {
        let compute = || self.cp_uncached(family, p, method, samples, seed);
        match &self.cache {
            None => Ok((compute()?, false)),
            Some(cache) => {
                let key = match method {
                    Method::MonteCarlo => CacheKey::montecarlo(family, p, samples, seed),
                    m => CacheKey::exact(family, p, m),
                };
                cache.get_or_compute(&key, compute)
            }
        }
    }

    /// Exact factors `1 − c_p/p^{2m}` for `p ≤ cutoff` and their running products.
    pub fn euler_factors(&self, family: Family, cutoff: u64) -> Result<EulerComparison, RunError> {
        let mut factors = Vec::new();
        for p in primes_up_to(cutoff) {
            let (rec, _) = self.cp(family, p, Method::Hensel, 0, 0)?;
            factors.push((p, density_factor(&rec.cp, p, family.dim())));
        }
        let partial = partial_products(&factors);
        let product = partial.last().map(|(_, v)| v.clone()).unwrap_or_else(BigRational::one);
        Ok(EulerComparison { cutoff, factors, partial, product })
    }

    /// Exhaustive squarefree tally over `[−N, N]^m`, one slab per task.
    pub fn density_box(&self, family: Family, n: u64, cutoff: u64, trial: u64) -> Result<SieveReport, RunError> {
        check_trial(cutoff, trial)?;
        let bx = IntBox::cube(family.dim(), n as i64);
        check_budget(bx.volume(), self.budget)?;
        let slabs: Vec<u64> = (0..bx.slabs()).collect();
        let parts = self.map(&slabs, |&s| density_box_slab(family, n, cutoff, trial, s));
        let empty = SieveReport::empty(family, n, SampleMode::Exhaustive, cutoff, trial);
        Ok(parts.iter().fold(empty, |acc, r| acc.merge(r)))
    }

    pub fn density_montecarlo(
        &self,
        family: Family,
        n: u64,
        samples: u64,
        seed: u64,
        cutoff: u64,
        trial: u64,
    ) -> Result<SieveReport, RunError> {
        check_trial(cutoff, trial)?;
        if samples < 10_000 {
            return Err(Error::Precondition("Monte Carlo estimates need at least 10^4 samples".into()).into());
        }
        check_budget(samples as u128, self.budget)?;
        let chunks: Vec<u64> = (0..mc_chunks(samples)).collect();
        let parts = self.map(&chunks, |&k| density_montecarlo_chunk(family, n, samples, seed, cutoff, trial, k));
        let mut empty = SieveReport::empty(family, n, SampleMode::MonteCarlo, cutoff, trial);
        empty.seed = Some(seed);
        Ok(parts.iter().fold(empty, |acc, r| acc.merge(r)))
    }

    fn tail_on_box(&self, family: Family, bx: &IntBox, ms: &[u64]) -> Result<Vec<u64>, RunError> {
        check_budget(bx.volume(), self.budget)?;
        let slabs: Vec<u64> = (0..bx.slabs()).collect();
        let parts = self.map(&slabs, |&s| tail_counts_slab(family, bx, ms, s));
        Ok(parts.into_iter().fold(vec![0; ms.len()], |mut acc, v| {
            acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
            acc
        }))
    }

    /// `#{x ∈ [−r, r]^m : p² | f(x) for some prime p > M}` for each `M`.
    pub fn tail_counts(&self, family: Family, r: u64, ms: &[u64]) -> Result<Vec<u64>, RunError> {
        self.tail_on_box(family, &IntBox::cube(family.dim(), r as i64), ms)
    }

    pub fn tail_counts_skewed(&self, family: Family, r: u64, t: &[BigRational], ms: &[u64]) -> Result<Vec<u64>, RunError> {
        let bx = skewed_box(family, r, t)?;
        self.tail_on_box(family, &bx, ms)
    }

    pub fn count_on_variety(&self, family: Family, eqs: &[Equation], r: u64) -> Result<u64, RunError> {
        validate_equations(family, eqs)?;
        let bx = IntBox::cube(family.dim(), r as i64);
        check_budget(bx.volume(), self.budget)?;
        let slabs: Vec<u64> = (0..bx.slabs()).collect();
        Ok(self.map(&slabs, |&s| count_on_variety_slab(family, eqs, r, s)).into_iter().sum())
    }

    pub fn strong_weak_histogram(&self, family: Family, n: u64, primes: &[u64]) -> Result<StrongWeakHistogram, RunError> {
        for &p in primes {
            check_prime(p)?;
        }
        let bx = IntBox::cube(family.dim(), n as i64);
        check_budget(bx.volume(), self.budget)?;
        let slabs: Vec<u64> = (0..bx.slabs()).collect();
        let parts = self.map(&slabs, |&s| strong_weak_histogram_slab(family, n, primes, s));
        let empty = StrongWeakHistogram { total: 0, counts: primes.iter().map(|&p| (p, (0, 0))).collect() };
        Ok(parts.iter().fold(empty, |acc, h| acc.merge(h)))
    }

    /// Points of `Y_k` over `(ℤ/p)^m`.
    pub fn count_yk(&self, family: Family, k: usize, p: u64) -> Result<u64, RunError> {
        check_prime(p)?;
        let n = (p as u128).checked_pow(family.dim() as u32).unwrap_or(u128::MAX);
        check_budget(n, self.budget)?;
        let ranges = self.ranges(Self::units(n)?);
        Ok(self.map(&ranges, |r| count_yk_scan(family, k, p, r.clone())).into_iter().sum())
    }
}

/// Finite Euler product of exact local factors.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerComparison {
    pub cutoff: u64,
    /// `(p, 1 − c_p/p^{2m})`.
    pub factors: Vec<(u64, BigRational)>,
    /// `(P, ∏_{p ≤ P} factor)`.
    pub partial: Vec<(u64, BigRational)>,
    pub product: BigRational,
}

impl EulerComparison {
    pub fn value(&self, digits: u32) -> Decimal {
        Decimal::from_ratio(&self.product, digits)
    }
}
