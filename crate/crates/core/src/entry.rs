//! The Fibonacci entry point `z(n)`, the least `m >= 1` with `n | F(m)`,
//! together with the Wall exponent `e(p) = v_p(F(z(p)))` and iteration of `z`
//! down to its fixed points.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use num_bigint::BigUint;
use num_traits::Zero;
use parking_lot::RwLock;
use serde::Serialize;

use crate::arith::{checked_lcm, checked_pow};
use crate::error::{Error, Result};
use crate::factor::{divisors_sorted, factorize, is_prime, Factorization};
use crate::fib::{fib_mod_big, fib_pair_raw};

/// `z(n)` with the per-prime-power pieces it was assembled from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryPointRecord {
    pub n: u64,
    pub z: u64,
    /// `(p^a, z(p^a))` for each prime power exactly dividing `n`.
    pub assembly: Vec<(u64, u64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WallExponent {
    pub p: u64,
    pub e: u32,
}

/// The orbit of `start` under `z`, ending once a value maps to itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZChain {
    pub start: u64,
    pub iterates: Vec<u64>,
    pub fixed_point: u64,
}

/// `z(p)` and `e(p)` for one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeData {
    pub z: u64,
    pub e: u32,
}

/// Anything that can hand out `(z(p), e(p))` for a prime `p`.
pub trait PrimeDataSource: Sync {
    fn prime_data(&self, p: u64) -> Result<PrimeData>;
}

/// Computes every request from scratch.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uncached;

impl PrimeDataSource for Uncached {
    fn prime_data(&self, p: u64) -> Result<PrimeData> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        compute_prime_data(p, None)
    }
}

/// Legendre symbol `(p/5)` for a prime `p`.
pub fn legendre5(p: u64) -> i8 {
    match p % 5 {
        0 => 0,
        1 | 4 => 1,
        _ => -1,
    }
}

/// `p - (p/5)`, which `z(p)` always divides (for `p != 5`).
pub fn entry_point_bound(p: u64) -> u64 {
    match legendre5(p) {
        1 => p - 1,
        -1 => p + 1,
        _ => p,
    }
}

/// `z(p)` given a factorization of `p - (p/5)`: the smallest divisor `d`
/// of that bound with `p | F(d)`.
pub(crate) fn z_prime_from(p: u64, bound: &Factorization) -> Result<u64> {
    match p {
        2 => return Ok(3),
        5 => return Ok(5),
        _ => {}
    }
    debug_assert_eq!(bound.value, entry_point_bound(p));
    for d in divisors_sorted(bound)? {
        if fib_pair_raw(d, p).0 == 0 {
            return Ok(d);
        }
    }
    // only reachable for composite p
    Err(Error::NotPrime(p))
}

/// `e(p)`: raise the modulus `p^j` until `F(z(p))` stops vanishing.
pub(crate) fn wall_exponent_from(p: u64, zp: u64) -> u32 {
    let mut modulus = p as u128 * p as u128;
    let mut j = 2u32;
    while modulus <= u64::MAX as u128 {
        if fib_pair_raw(zp, modulus as u64).0 != 0 {
            return j - 1;
        }
        modulus *= p as u128;
        j += 1;
    }
    let p_big = BigUint::from(p);
    let mut modulus = BigUint::from(p).pow(j);
    loop {
        if !fib_mod_big(zp, &modulus).is_zero() {
            return j - 1;
        }
        modulus *= &p_big;
        j += 1;
    }
}

pub(crate) fn compute_prime_data(p: u64, bound: Option<Factorization>) -> Result<PrimeData> {
    let z = match p {
        2 => 3,
        5 => 5,
        _ => {
            let bound = match bound {
                Some(f) => f,
                None => factorize(entry_point_bound(p)),
            };
            z_prime_from(p, &bound)?
        }
    };
    Ok(PrimeData {
        z,
        e: wall_exponent_from(p, z),
    })
}

pub fn z_prime(p: u64) -> Result<u64> {
    Ok(Uncached.prime_data(p)?.z)
}

pub fn wall_exponent(p: u64) -> Result<WallExponent> {
    Ok(WallExponent {
        p,
        e: Uncached.prime_data(p)?.e,
    })
}

/// `z(p^a)`. The prime 2 follows `z(2) = 3`, `z(4) = 6`, `z(2^a) = 3 * 2^(a-2)`.
pub fn z_prime_power(p: u64, a: u32) -> Result<u64> {
    z_prime_power_with(p, a, &Uncached)
}

pub fn z_prime_power_with<S: PrimeDataSource + ?Sized>(p: u64, a: u32, src: &S) -> Result<u64> {
    if a == 0 {
        return Ok(1);
    }
    let data = match p {
        2 => PrimeData { z: 3, e: 1 },
        5 => PrimeData { z: 5, e: 1 },
        _ => src.prime_data(p)?,
    };
    local_z(p, a, data)
}

#[inline]
pub(crate) fn local_z(p: u64, a: u32, data: PrimeData) -> Result<u64> {
    match p {
        2 => Ok(match a {
            0 => 1,
            1 => 3,
            2 => 6,
            _ => 3u64
                .checked_mul(checked_pow(2, a - 2)?)
                .ok_or(Error::Overflow("z(2^a)"))?,
        }),
        5 => checked_pow(5, a),
        _ if a <= data.e => Ok(data.z),
        _ => checked_pow(p, a - data.e)?
            .checked_mul(data.z)
            .ok_or(Error::Overflow("z(p^a)")),
    }
}

pub fn z_of(n: u64) -> Result<EntryPointRecord> {
    z_of_with(n, &Uncached)
}

pub fn z_of_with<S: PrimeDataSource + ?Sized>(n: u64, src: &S) -> Result<EntryPointRecord> {
    if n == 0 {
        return Err(Error::Domain("z(0) is undefined".into()));
    }
    let f = factorize(n);
    let mut z = 1u64;
    let mut assembly = Vec::with_capacity(f.parts.len());
    for &(p, a) in &f.parts {
        let lz = z_prime_power_with(p, a, src)?;
        assembly.push((p.pow(a), lz));
        z = checked_lcm(z, lz)?;
    }
    Ok(EntryPointRecord { n, z, assembly })
}

/// `z(n)` without recording the assembly.
pub fn z_value_with<S: PrimeDataSource + ?Sized>(n: u64, src: &S) -> Result<u64> {
    Ok(z_of_with(n, src)?.z)
}

/// True for `1`, `5^f` and `12 * 5^f`, the fixed points of `z`.
pub fn is_z_fixed_point_form(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(5) {
        n /= 5;
    }
    n == 1 || n == 12
}

pub fn iterate_z(k: u64, max_steps: usize) -> Result<ZChain> {
    iterate_z_with(k, max_steps, &Uncached)
}

pub fn iterate_z_with<S: PrimeDataSource + ?Sized>(
    k: u64,
    max_steps: usize,
    src: &S,
) -> Result<ZChain> {
    let mut iterates = Vec::new();
    let mut current = k;
    for _ in 0..max_steps {
        let next = z_value_with(current, src)?;
        iterates.push(next);
        if next == current {
            return Ok(ZChain {
                start: k,
                iterates,
                fixed_point: next,
            });
        }
        current = next;
    }
    Err(Error::NonTermination {
        start: k,
        steps: max_steps,
    })
}

/// Read-mostly `p -> (z(p), e(p))` map, persisted as CSV with header `p,z,e`.
#[derive(Default)]
pub struct EntryPointCache {
    map: RwLock<BTreeMap<u64, PrimeData>>,
    dirty: AtomicBool,
}

impl EntryPointCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.read().is_empty()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty.load(Ordering::Relaxed)
    }

    /// Loads `path` if it exists; a missing file gives an empty cache.
    pub fn load(path: &Path) -> Result<Self> {
        let cache = Self::new();
        let file = match fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e.into()),
        };
        let mut map = BTreeMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if idx == 0 {
                if line.trim() != "p,z,e" {
                    return Err(Error::Cache {
                        line: lineno,
                        reason: format!("expected header `p,z,e`, found `{line}`"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Cache {
                line: lineno,
                reason,
            };
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            }
            let p: u64 = fields[0].parse().map_err(|e| bad(format!("p: {e}")))?;
            let z: u64 = fields[1].parse().map_err(|e| bad(format!("z: {e}")))?;
            let e: u32 = fields[2].parse().map_err(|e| bad(format!("e: {e}")))?;
            if !is_prime(p) || z == 0 || e == 0 {
                return Err(bad(format!("invalid entry for p = {p}")));
            }
            map.insert(p, PrimeData { z, e });
        }
        *cache.map.write() = map;
        Ok(cache)
    }

    /// Writes the cache to `path` through a temporary file and rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        {
            let mut out = std::io::BufWriter::new(tmp.as_file_mut());
            writeln!(out, "p,z,e")?;
            for (p, d) in self.map.read().iter() {
                writeln!(out, "{p},{},{}", d.z, d.e)?;
            }
            out.flush()?;
        }
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        self.dirty.store(false, Ordering::Relaxed);
        Ok(())
    }

    /// Saves only when entries were added since the last load or save.
    pub fn save_if_dirty(&self, path: &Path) -> Result<bool> {
        if self.is_dirty() {
            self.save(path)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn entries(&self) -> Vec<(u64, PrimeData)> {
        self.map.read().iter().map(|(&p, &d)| (p, d)).collect()
    }
}

impl PrimeDataSource for EntryPointCache {
    fn prime_data(&self, p: u64) -> Result<PrimeData> {
        if let Some(d) = self.map.read().get(&p) {
            return Ok(*d);
        }
        let d = Uncached.prime_data(p)?;
        self.map.write().insert(p, d);
        self.dirty.store(true, Ordering::Relaxed);
        Ok(d)
    }
}
