use num_integer::Integer;
use proptest::prelude::*;

use fibdiv::{fib_exact, fib_pair_mod};

fn iterate_mod(n: u64, m: u64) -> (u64, u64) {
    let (mut a, mut b) = (0u64, 1 % m);
    for _ in 0..n {
        let next = (a + b) % m;
        a = b;
        b = next;
    }
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn pair_matches_iteration(n in 0u64..=10_000, m in 1u64..=10_000) {
        let p = fib_pair_mod(n, m).unwrap();
        prop_assert_eq!((p.f_n, p.f_n1), iterate_mod(n, m));
        prop_assert!(p.f_n < m && p.f_n1 < m);
    }

    #[test]
    fn pair_matches_exact_for_wide_moduli(n in 0u64..=3000, m in (1u64 << 40)..=u64::MAX) {
        let p = fib_pair_mod(n, m).unwrap();
        let f = fib_exact(n).unwrap() % m;
        let f1 = fib_exact(n + 1).unwrap() % m;
        prop_assert_eq!(num_bigint::BigUint::from(p.f_n), f);
        prop_assert_eq!(num_bigint::BigUint::from(p.f_n1), f1);
    }
}

#[test]
fn gcd_of_fibonacci_numbers() {
    let fibs: Vec<_> = (0..=300u64).map(|n| fib_exact(n).unwrap()).collect();
    for a in 1..=300usize {
        for b in a..=300usize {
            assert_eq!(fibs[a].gcd(&fibs[b]), fibs[a.gcd(&b)], "a = {a}, b = {b}");
        }
    }
}
