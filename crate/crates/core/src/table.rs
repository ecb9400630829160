//! Dense `z(p)`, `e(p)` table for every prime up to a bound, built on top of a
//! smallest-prime-factor sieve. Used by the census and the brute-force side of
//! class reconciliation.

use crate::arith::checked_lcm;
use crate::entry::{
    compute_prime_data, entry_point_bound, local_z, z_value_with, PrimeData, PrimeDataSource,
    Uncached,
};
use crate::error::{Error, Result};
use crate::factor::SpfSieve;
use crate::par::map_ordered;

pub struct EntryPointTable {
    limit: u64,
    sieve: SpfSieve,
    z: Vec<u32>,
    e: Vec<u8>,
}

impl EntryPointTable {
    /// Builds the table for all `n <= limit`, using up to `jobs` workers.
    pub fn build(limit: u64, jobs: usize) -> Result<Self> {
        let limit = limit.max(1);
        if limit >= (u32::MAX / 2) as u64 {
            return Err(Error::ResourceLimit {
                what: "entry-point table bound",
                limit: (u32::MAX / 2) as u64 - 1,
            });
        }
        // p + 1 must be factorable for every prime p <= limit
        let sieve = SpfSieve::new(limit + 1)?;
        let primes: Vec<u32> = sieve
            .primes()
            .iter()
            .copied()
            .take_while(|&p| p as u64 <= limit)
            .collect();
        let chunks: Vec<&[u32]> = primes.chunks(4096).collect();
        let computed: Vec<Vec<PrimeData>> = map_ordered(chunks, jobs, |chunk| {
            chunk
                .iter()
                .map(|&p| {
                    let p = p as u64;
                    let bound = sieve.factorize(entry_point_bound(p));
                    compute_prime_data(p, Some(bound)).expect("sieve primes are prime")
                })
                .collect()
        });
        let mut z = vec![0u32; limit as usize + 1];
        let mut e = vec![0u8; limit as usize + 1];
        for (&p, d) in primes.iter().zip(computed.into_iter().flatten()) {
            z[p as usize] = d.z as u32;
            e[p as usize] = d.e.min(u8::MAX as u32) as u8;
        }
        Ok(EntryPointTable { limit, sieve, z, e })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn sieve(&self) -> &SpfSieve {
        &self.sieve
    }

    /// `z(n)`; values beyond the table fall back to direct factorization.
    pub fn z(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::Domain("z(0) is undefined".into()));
        }
        if n > self.limit {
            return z_value_with(n, self);
        }
        let mut acc = 1u64;
        let mut err = None;
        self.sieve.for_each_prime_power(n, |p, a| {
            if err.is_some() {
                return;
            }
            let data = PrimeData {
                z: self.z[p as usize] as u64,
                e: self.e[p as usize] as u32,
            };
            match local_z(p, a, data).and_then(|lz| checked_lcm(acc, lz)) {
                Ok(v) => acc = v,
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    }

    /// `n / z(n)` when `z(n) | n`.
    pub fn class_of(&self, n: u64) -> Result<Option<u64>> {
        let z = self.z(n)?;
        Ok(n.is_multiple_of(z).then(|| n / z))
    }
}

impl PrimeDataSource for EntryPointTable {
    fn prime_data(&self, p: u64) -> Result<PrimeData> {
        if p <= self.limit {
            if !self.sieve.is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            return Ok(PrimeData {
                z: self.z[p as usize] as u64,
                e: self.e[p as usize] as u32,
            });
        }
        Uncached.prime_data(p)
    }
}
