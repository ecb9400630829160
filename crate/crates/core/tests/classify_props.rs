use std::collections::BTreeSet;

use fibdiv::classify::{c_of_k_with, class_verdict, enumerate_class_with, Reconciler};
use fibdiv::divides_fib;

#[test]
fn classes_against_brute_force() {
    let rec = Reconciler::new(100_000, 2).unwrap();
    let table = rec.table();
    for k in 1..=50u64 {
        let verdict = class_verdict(k).unwrap();
        let brute = rec.brute_class(k);
        if verdict.is_empty() {
            assert!(brute.is_empty(), "A_{k} declared empty but holds {brute:?}");
            continue;
        }
        let c = c_of_k_with(k, table).unwrap();
        assert_eq!(brute.first(), Some(&c), "minimum of A_{k}");
        assert!(brute.iter().all(|n| n % c == 0), "A_{k} not all multiples of c");
        let enumerated = enumerate_class_with(k, 100_000, table).unwrap();
        assert!(enumerated.iter().all(|n| brute.binary_search(n).is_ok()));
    }
}

#[test]
fn classes_partition_the_self_divisors() {
    let rec = Reconciler::new(100_000, 2).unwrap();
    let mut seen = BTreeSet::new();
    for (k, members) in rec.classes() {
        for &n in members {
            assert!(seen.insert(n), "{n} in two classes");
            assert_eq!(rec.table().class_of(n).unwrap(), Some(*k));
        }
    }
    let direct: BTreeSet<u64> = (1..=100_000).filter(|&n| divides_fib(n)).collect();
    assert_eq!(seen, direct);
}

#[test]
fn rules_list_the_right_primes() {
    for k in 1..=2000u64 {
        let class = class_verdict(k).unwrap();
        if class.is_empty() {
            continue;
        }
        let primes: Vec<u64> = class.rules.iter().map(|&(p, _)| p).collect();
        let mut expected: Vec<u64> = fibdiv::factorize(k)
            .primes()
            .filter(|&p| p != 2)
            .chain([5])
            .collect();
        if k % 4 == 0 {
            expected.push(2);
        }
        expected.sort_unstable();
        assert_eq!(primes, expected, "k = {k}");
    }
}
