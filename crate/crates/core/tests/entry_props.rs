use num_integer::Integer;
use proptest::prelude::*;

use fibdiv::entry::is_z_fixed_point_form;
use fibdiv::factor::divisors_sorted;
use fibdiv::fib::fib_pair_mod;
use fibdiv::{factorize, iterate_z, wall_exponent, z_of, EntryPointCache, PrimeDataSource};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn record_is_minimal(n in 1u64..=200_000) {
        let rec = z_of(n).unwrap();
        let lcm = rec.assembly.iter().fold(1u64, |acc, &(_, lz)| acc.lcm(&lz));
        prop_assert_eq!(rec.z, lcm);
        prop_assert!(rec.z <= 2 * n);
        prop_assert_eq!(fib_pair_mod(rec.z, n).unwrap().f_n, 0);
        for d in divisors_sorted(&factorize(rec.z)).unwrap() {
            if d < rec.z {
                prop_assert_ne!(fib_pair_mod(d, n).unwrap().f_n, 0, "n = {} d = {}", n, d);
            }
        }
    }

    #[test]
    fn chain_ends_in_fixed_point(k in 1u64..=1u64 << 40) {
        let chain = iterate_z(k, 200).unwrap();
        prop_assert_eq!(chain.iterates[0], z_of(k).unwrap().z);
        for w in chain.iterates.windows(2) {
            prop_assert_eq!(w[1], z_of(w[0]).unwrap().z);
        }
        prop_assert_eq!(*chain.iterates.last().unwrap(), chain.fixed_point);
        prop_assert_eq!(z_of(chain.fixed_point).unwrap().z, chain.fixed_point);
        prop_assert!(is_z_fixed_point_form(chain.fixed_point));
    }
}

#[test]
fn wall_exponents_are_one_for_small_primes() {
    // no prime below 1e4 has e(p) > 1; the code does not assume it
    let cache = EntryPointCache::new();
    for p in (2..10_000u64).filter(|&p| fibdiv::factor::is_prime(p)) {
        let d = cache.prime_data(p).unwrap();
        assert_eq!(d.e, 1, "p = {p}");
        assert_eq!(wall_exponent(p).unwrap().e, d.e);
    }
}

#[test]
fn cache_is_shared_across_threads() {
    let cache = EntryPointCache::new();
    std::thread::scope(|s| {
        for t in 0..4u64 {
            let cache = &cache;
            s.spawn(move || {
                for n in (1 + t)..2000 {
                    fibdiv::entry::z_of_with(n, cache).unwrap();
                }
            });
        }
    });
    // 303 primes below 2000; 2 and 5 never reach the cache
    assert_eq!(cache.len(), 301);
    assert!(cache.is_dirty());
}
