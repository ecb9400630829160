//! Fibonacci entry points and the integers `n` that divide `F(n)`.
//!
//! The crate computes the entry point `z(n)` (least `m` with `n | F(m)`),
//! the Wall exponent `e(p) = v_p(F(z(p)))`, splits the self-dividing
//! integers into classes `A_k = { n : n / z(n) = k }`, and counts them.

pub mod arith;
pub mod census;
pub mod classify;
pub mod entry;
pub mod error;
pub mod factor;
pub mod fib;
pub mod json;
pub mod par;
pub mod table;

pub use census::{
    bound_report, c_growth_scan, count, enumerate_selfdivisors, pratt_fib_tree, BoundReport,
    CensusOptions, CensusReport, GrowthScan, Method, PrattFibTree,
};
pub use classify::{
    c_of_k, class_verdict, classify, enumerate_class, member_class, reconcile, DivisorClass,
    ReconciliationReport, Reconciler, Rule, Verdict,
};
pub use entry::{
    iterate_z, wall_exponent, z_of, z_prime, z_prime_power, EntryPointCache, EntryPointRecord,
    PrimeDataSource, WallExponent, ZChain,
};
pub use error::{Error, Result};
pub use factor::{divisors_sorted, factorize, largest_prime_factor, lcm_all, Factorization};
pub use fib::{divides_fib, fib_exact, fib_pair_mod, v2_fib, v5_fib, vp_fib, FibPair};
pub use table::EntryPointTable;
