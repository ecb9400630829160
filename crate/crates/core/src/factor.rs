//! Integer factorization for 64-bit inputs: trial division, Brent's rho with
//! deterministic Miller-Rabin, and a smallest-prime-factor sieve for bulk work.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{add_mod, checked_lcm, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Default cap on the number of divisors [`divisors_sorted`] will produce.
pub const DEFAULT_DIVISOR_CAP: usize = 1 << 20;

const TRIAL_LIMIT: u64 = 1 << 10;

/// Canonical factorization: primes strictly increasing, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub value: u64,
    pub parts: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            value: 1,
            parts: Vec::new(),
        }
    }

    fn from_unsorted(value: u64, mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut parts: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match parts.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => parts.push((p, 1)),
            }
        }
        Factorization { value, parts }
    }

    /// Multiplies the parts back together.
    pub fn product(&self) -> u64 {
        self.parts
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.parts.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.parts
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.parts.iter().all(|&(_, e)| e == 1)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.parts.last().map(|&(p, _)| p)
    }

    pub fn divisor_count(&self) -> u64 {
        self.parts.iter().map(|&(_, e)| e as u64 + 1).product()
    }
}

/// Deterministic Miller-Rabin; the first twelve primes as witnesses are
/// sufficient for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard's rho. Returns a nontrivial factor of the odd
/// composite `n`.
fn rho(n: u64) -> u64 {
    for c in 1..n {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut x, mut ys) = (2u64, 2u64, 2u64);
        let mut g = 1u64;
        let mut q = 1u64;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // the batched product collapsed; replay one step at a time
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho failed on {n}")
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Canonical factorization of `n >= 1`; `factorize(1)` has no parts.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize expects a positive integer");
    let mut primes = Vec::new();
    let mut m = n;
    let tz = m.trailing_zeros();
    primes.extend(std::iter::repeat_n(2, tz as usize));
    m >>= tz;
    let mut d = 3u64;
    while d <= TRIAL_LIMIT && d * d <= m {
        while m.is_multiple_of(d) {
            primes.push(d);
            m /= d;
        }
        d += 2;
    }
    if m > 1 {
        if m < d * d {
            primes.push(m);
        } else {
            split_into(m, &mut primes);
        }
    }
    Factorization::from_unsorted(n, primes)
}

/// All divisors in increasing order, refused above [`DEFAULT_DIVISOR_CAP`].
pub fn divisors_sorted(f: &Factorization) -> Result<Vec<u64>> {
    divisors_sorted_with_cap(f, DEFAULT_DIVISOR_CAP)
}

pub fn divisors_sorted_with_cap(f: &Factorization, cap: usize) -> Result<Vec<u64>> {
    if f.divisor_count() > cap as u64 {
        return Err(Error::ResourceLimit {
            what: "divisor count",
            limit: cap as u64,
        });
    }
    let mut divs = vec![1u64];
    for &(p, e) in &f.parts {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Least common multiple of a nonempty list; overflow is an error.
pub fn lcm_all(values: &[u64]) -> Result<u64> {
    if values.is_empty() {
        return Err(Error::Domain("lcm of an empty list".into()));
    }
    values.iter().try_fold(1u64, |acc, &v| checked_lcm(acc, v))
}

/// `P(n)`, the largest prime factor of `n >= 2`.
pub fn largest_prime_factor(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Domain(format!("P(n) needs n >= 2, got {n}")));
    }
    Ok(factorize(n).largest_prime().expect("n >= 2 has a prime factor"))
}

/// Smallest-prime-factor table for every `n <= limit`.
pub struct SpfSieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit >= u32::MAX as u64 {
            return Err(Error::ResourceLimit {
                what: "sieve limit",
                limit: u32::MAX as u64 - 1,
            });
        }
        let limit = limit.max(1) as usize;
        let mut spf = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let j = i * p as usize;
                if p > si || j > limit {
                    break;
                }
                spf[j] = p;
            }
        }
        Ok(SpfSieve { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// Calls `f(p, e)` for each prime power in `n`, primes ascending.
    #[inline]
    pub fn for_each_prime_power(&self, n: u64, mut f: impl FnMut(u64, u32)) {
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            f(p as u64, e);
        }
    }

    pub fn factorize(&self, n: u64) -> Factorization {
        assert!(n >= 1 && n <= self.limit(), "{n} outside the sieve");
        let mut parts = Vec::new();
        self.for_each_prime_power(n, |p, e| parts.push((p, e)));
        Factorization { value: n, parts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut m = n;
        let mut d = 2;
        while d * d <= m {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if m > 1 {
            out.push((m, 1));
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).parts.is_empty());
        assert_eq!(factorize(144).parts, vec![(2, 4), (3, 2)]);
        assert_eq!(trial(75025), vec![(5, 2), (3001, 1)]);
        assert_eq!(factorize(75025).parts, vec![(5, 2), (3001, 1)]);
    }

    #[test]
    fn factorize_large() {
        // product of two primes just under 2^32
        let n = 4_294_967_291u64 * 4_294_967_279;
        assert_eq!(
            factorize(n).parts,
            vec![(4_294_967_279, 1), (4_294_967_291, 1)]
        );
        let p = u64::MAX - 58;
        assert!(is_prime(p));
        assert_eq!(factorize(p).parts, vec![(p, 1)]);
        assert_eq!(factorize(1 << 63).parts, vec![(2, 63)]);
        // F(93) = 2 * 557 * 2417 * 4531100550901
        assert_eq!(
            factorize(12_200_160_415_121_876_738).parts,
            vec![(2, 1), (557, 1), (2417, 1), (4_531_100_550_901, 1)]
        );
    }

    #[test]
    fn strong_pseudoprimes_are_composite() {
        for n in [
            2047u64,
            3_215_031_751,
            3_825_123_056_546_413_051,
        ] {
            let f = factorize(n);
            assert_eq!(f.product(), n);
        }
        assert!(!is_prime(3_825_123_056_546_413_051));
    }

    #[test]
    fn agrees_with_trial_division() {
        for n in 1..=20_000u64 {
            assert_eq!(factorize(n).parts, trial(n), "n = {n}");
        }
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors_sorted(&factorize(8)).unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(divisors_sorted(&factorize(10)).unwrap(), vec![1, 2, 5, 10]);
        assert_eq!(
            divisors_sorted(&factorize(12)).unwrap(),
            vec![1, 2, 3, 4, 6, 12]
        );
        assert!(divisors_sorted_with_cap(&factorize(720720), 10).is_err());
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_all(&[3, 4, 6, 12]).unwrap(), 12);
        assert_eq!(lcm_all(&[1]).unwrap(), 1);
        assert_eq!(lcm_all(&[10, 15, 20, 30, 60]).unwrap(), 60);
        assert!(lcm_all(&[]).is_err());
        assert!(matches!(
            lcm_all(&[u64::MAX, u64::MAX - 1]),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn largest_prime_examples() {
        assert_eq!(largest_prime_factor(12).unwrap(), 3);
        assert_eq!(largest_prime_factor(75025).unwrap(), 3001);
        assert_eq!(largest_prime_factor(2).unwrap(), 2);
        assert!(largest_prime_factor(1).is_err());
    }

    #[test]
    fn sieve_agrees_with_factorize() {
        let sieve = SpfSieve::new(50_000).unwrap();
        for n in 1..=50_000u64 {
            assert_eq!(sieve.factorize(n), factorize(n));
        }
        assert_eq!(sieve.primes().len(), 5133);
    }
}
