//! Fibonacci numbers: residues by fast doubling, exact values, and the
//! closed-form p-adic valuations of `F(n)`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{add_mod, mul_mod, sub_mod, valuation};
use crate::error::{Error, Result};

/// Default cap on the index accepted by [`fib_exact`]. `F(n)` has about
/// `0.209 n` decimal digits.
pub const DEFAULT_FIB_EXACT_LIMIT: u64 = 1_000_000;

/// `(F(index), F(index + 1))` reduced modulo `modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FibPair {
    pub index: u64,
    pub f_n: u64,
    pub f_n1: u64,
    pub modulus: u64,
}

/// Computes `F(n) mod m` and `F(n+1) mod m` with `O(log n)` residue
/// multiplications.
pub fn fib_pair_mod(n: u64, m: u64) -> Result<FibPair> {
    if m == 0 {
        return Err(Error::InvalidModulus);
    }
    let (f_n, f_n1) = fib_pair_raw(n, m);
    Ok(FibPair {
        index: n,
        f_n,
        f_n1,
        modulus: m,
    })
}

#[inline]
pub(crate) fn fib_pair_raw(n: u64, m: u64) -> (u64, u64) {
    // (a, b) = (F(k), F(k+1)) while walking the bits of n from the top
    let mut a = 0u64;
    let mut b = 1 % m;
    if n == 0 {
        return (a, b);
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        // F(2k) = F(k) (2F(k+1) - F(k)),  F(2k+1) = F(k)^2 + F(k+1)^2
        let t = sub_mod(add_mod(b, b, m), a, m);
        let c = mul_mod(a, t, m);
        let d = add_mod(mul_mod(a, a, m), mul_mod(b, b, m), m);
        if (n >> bit) & 1 == 1 {
            a = d;
            b = add_mod(c, d, m);
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// `F(n) mod m` for moduli beyond the native word.
pub(crate) fn fib_mod_big(n: u64, m: &BigUint) -> BigUint {
    let mut a = BigUint::zero();
    let mut b = BigUint::one() % m;
    if n == 0 {
        return a;
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        let t = ((&b << 1u32) + m - &a) % m;
        let c = (&a * t) % m;
        let d = (&a * &a + &b * &b) % m;
        if (n >> bit) & 1 == 1 {
            b = (&c + &d) % m;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    a
}

/// Exact `F(n)`, refused above [`DEFAULT_FIB_EXACT_LIMIT`].
pub fn fib_exact(n: u64) -> Result<BigUint> {
    fib_exact_with_limit(n, DEFAULT_FIB_EXACT_LIMIT)
}

pub fn fib_exact_with_limit(n: u64, limit: u64) -> Result<BigUint> {
    if n > limit {
        return Err(Error::ResourceLimit {
            what: "Fibonacci index",
            limit,
        });
    }
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    if n == 0 {
        return Ok(a);
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        let c = &a * ((&b << 1u32) - &a);
        let d = &a * &a + &b * &b;
        if (n >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    Ok(a)
}

/// `v_2(F(n))` for `n >= 1`.
pub fn v2_fib(n: u64) -> u32 {
    debug_assert!(n >= 1);
    match n % 12 {
        0 => valuation(n, 2) + 2,
        6 => 3,
        3 | 9 => 1,
        _ => 0,
    }
}

/// `v_5(F(n)) = v_5(n)`.
pub fn v5_fib(n: u64) -> u32 {
    debug_assert!(n >= 1);
    valuation(n, 5)
}

/// `v_p(F(n))` for a prime `p` other than 2 and 5, given `zp = z(p)` and
/// `ep = e(p)`.
pub fn vp_fib(p: u64, n: u64, zp: u64, ep: u32) -> Result<u32> {
    if p == 2 || p == 5 {
        return Err(Error::WrongOperation(
            "vp_fib handles odd primes other than 5; use v2_fib or v5_fib",
        ));
    }
    if n.is_multiple_of(zp) {
        Ok(valuation(n, p) + ep)
    } else {
        Ok(0)
    }
}

/// `n | F(n)`.
pub fn divides_fib(n: u64) -> bool {
    debug_assert!(n >= 1);
    fib_pair_raw(n, n).0 == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iterate_mod(n: u64, m: u64) -> (u64, u64) {
        let (mut a, mut b) = (0u64, 1 % m);
        for _ in 0..n {
            let next = (a + b) % m;
            a = b;
            b = next;
        }
        (a, b)
    }

    #[test]
    fn pair_examples() {
        let p = fib_pair_mod(0, 7).unwrap();
        assert_eq!((p.f_n, p.f_n1), (0, 1));
        assert_eq!(iterate_mod(12, 1000), (144, 233));
        let p = fib_pair_mod(12, 1000).unwrap();
        assert_eq!((p.f_n, p.f_n1), (144, 233));
        assert_eq!(iterate_mod(10, 100), (55, 89));
        let p = fib_pair_mod(10, 100).unwrap();
        assert_eq!((p.f_n, p.f_n1), (55, 89));
    }

    #[test]
    fn zero_modulus_rejected() {
        assert!(matches!(fib_pair_mod(5, 0), Err(Error::InvalidModulus)));
    }

    #[test]
    fn modulus_one() {
        let p = fib_pair_mod(17, 1).unwrap();
        assert_eq!((p.f_n, p.f_n1), (0, 0));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(fib_exact(0).unwrap(), BigUint::zero());
        assert_eq!(fib_exact(12).unwrap(), BigUint::from(144u32));
        assert_eq!(fib_exact(25).unwrap(), BigUint::from(75025u32));
        assert!(matches!(
            fib_exact_with_limit(11, 10),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn big_modulus_matches_word_path() {
        let m = (1u64 << 61) - 1;
        for n in [0u64, 1, 2, 90, 1000, 123_456_789] {
            let word = fib_pair_mod(n, m).unwrap().f_n;
            assert_eq!(fib_mod_big(n, &BigUint::from(m)), BigUint::from(word));
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(v2_fib(3), 1);
        assert_eq!(v2_fib(6), 3);
        assert_eq!(v2_fib(12), 4);
        assert_eq!(v5_fib(7), 0);
        assert_eq!(v5_fib(25), 2);
        assert_eq!(v5_fib(50), 2);
        assert_eq!(vp_fib(7, 16, 8, 1).unwrap(), 1);
        assert_eq!(vp_fib(7, 5, 8, 1).unwrap(), 0);
        assert_eq!(vp_fib(3, 36, 4, 1).unwrap(), 3);
        assert!(vp_fib(5, 10, 5, 1).is_err());
        assert!(vp_fib(2, 3, 3, 1).is_err());
    }

    #[test]
    fn f50_has_two_fives() {
        // F(50) = 12586269025 = 5^2 * 11 * 101 * 151 * 3001
        let f = fib_exact(50).unwrap();
        assert_eq!(f, BigUint::from(12_586_269_025u64));
        assert_eq!(valuation(12_586_269_025, 5), 2);
    }

    #[test]
    fn divides_examples() {
        assert!(divides_fib(1));
        assert!(!divides_fib(2));
        assert!(divides_fib(12));
        assert!(!divides_fib(13));
        assert_eq!(233 % 13, 12);
    }
}
