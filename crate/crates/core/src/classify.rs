//! Classes `A_k = { n : z(n) | n and n / z(n) = k }`: emptiness, the least
//! element `c(k) = k * lcm(z(k), z(z(k)), ...)`, enumeration from per-prime
//! exponent rules, and reconciliation of that enumeration against a
//! brute-force scan.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::arith::checked_lcm;
use crate::entry::{iterate_z_with, z_value_with, PrimeDataSource, Uncached};
use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::json;
use crate::par::{blocks, map_ordered};
use crate::table::EntryPointTable;

/// Step budget for z-iteration inside `c(k)`. Orbits observed so far are
/// far shorter.
pub const Z_ITERATION_BUDGET: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EmptyReason {
    DivisibleBy8,
    DivisibleBy5,
    /// `p^(e(p)+1) | k` for an odd prime `p`.
    DivisibleByWallPower { p: u64, e: u32 },
}

impl fmt::Display for EmptyReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmptyReason::DivisibleBy8 => write!(f, "divisible by 8"),
            EmptyReason::DivisibleBy5 => write!(f, "divisible by 5"),
            EmptyReason::DivisibleByWallPower { p, .. } => {
                write!(f, "divisible by {p}^(e({p})+1)")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum Verdict {
    Empty(EmptyReason),
    NonEmpty,
}

/// Admissible extra exponents `beta` of one prime on top of `c(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", content = "threshold", rename_all = "kebab-case")]
pub enum Rule {
    /// `beta = 0`
    Fixed0,
    /// any `beta >= 0`
    Free,
    /// `beta = 0` or `beta >= t`
    ThresholdOrZero(u32),
}

impl Rule {
    fn admits(self, beta: u32) -> bool {
        match self {
            Rule::Fixed0 => beta == 0,
            Rule::Free => true,
            Rule::ThresholdOrZero(t) => beta == 0 || beta >= t,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Fixed0 => write!(f, "fixed"),
            Rule::Free => write!(f, "free"),
            Rule::ThresholdOrZero(0) => write!(f, "free(threshold 0)"),
            Rule::ThresholdOrZero(t) => write!(f, "zero-or-at-least({t})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorClass {
    #[serde(serialize_with = "json::u64")]
    pub k: u64,
    pub verdict: Verdict,
    #[serde(serialize_with = "json::opt_u64")]
    pub c: Option<u64>,
    /// Primes ascending.
    pub rules: Vec<(u64, Rule)>,
}

impl DivisorClass {
    pub fn is_empty(&self) -> bool {
        matches!(self.verdict, Verdict::Empty(_))
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Empty(reason) => write!(f, "empty: {reason}"),
            Verdict::NonEmpty => {
                write!(f, "nonempty:")?;
                for (p, rule) in &self.rules {
                    write!(f, " {p}:{rule}")?;
                }
                if let Some(c) = self.c {
                    write!(f, " c={c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Emptiness verdict and exponent rules for `A_k` (no `c(k)`).
pub fn class_verdict(k: u64) -> Result<DivisorClass> {
    class_verdict_with(k, &Uncached)
}

pub fn class_verdict_with<S: PrimeDataSource + ?Sized>(k: u64, src: &S) -> Result<DivisorClass> {
    if k == 0 {
        return Err(Error::Domain("class index must be positive".into()));
    }
    let empty = |reason| DivisorClass {
        k,
        verdict: Verdict::Empty(reason),
        c: None,
        rules: Vec::new(),
    };
    if k.is_multiple_of(8) {
        return Ok(empty(EmptyReason::DivisibleBy8));
    }
    if k.is_multiple_of(5) {
        return Ok(empty(EmptyReason::DivisibleBy5));
    }
    let f = factorize(k);
    let mut rules = Vec::with_capacity(f.parts.len() + 1);
    // the 2-adic part behaves like a prime whose wall exponent is 2
    if k.is_multiple_of(4) {
        rules.push((2, Rule::Free));
    }
    rules.push((5, Rule::Free));
    for &(p, v) in f.parts.iter().filter(|&&(p, _)| p != 2) {
        let e = src.prime_data(p)?.e;
        if v > e {
            return Ok(empty(EmptyReason::DivisibleByWallPower { p, e }));
        }
        let rule = if v == e {
            Rule::ThresholdOrZero(e - v)
        } else {
            Rule::Fixed0
        };
        rules.push((p, rule));
    }
    rules.sort_by_key(|&(p, _)| p);
    Ok(DivisorClass {
        k,
        verdict: Verdict::NonEmpty,
        c: None,
        rules,
    })
}

/// `n * lcm(z(n), z(z(n)), ...)`, whether or not `A_n` is empty.
pub fn c_formula_with<S: PrimeDataSource + ?Sized>(n: u64, src: &S) -> Result<u64> {
    let chain = iterate_z_with(n, Z_ITERATION_BUDGET, src)?;
    let l = chain
        .iterates
        .iter()
        .try_fold(1u64, |acc, &v| checked_lcm(acc, v))?;
    n.checked_mul(l).ok_or(Error::Overflow("c(k)"))
}

/// `c(k)`, the least element of a nonempty `A_k`.
pub fn c_of_k(k: u64) -> Result<u64> {
    c_of_k_with(k, &Uncached)
}

pub fn c_of_k_with<S: PrimeDataSource + ?Sized>(k: u64, src: &S) -> Result<u64> {
    if class_verdict_with(k, src)?.is_empty() {
        return Err(Error::UndefinedMinimum(k));
    }
    c_formula_with(k, src)
}

/// Verdict, rules, and `c(k)` together.
pub fn classify(k: u64) -> Result<DivisorClass> {
    classify_with(k, &Uncached)
}

pub fn classify_with<S: PrimeDataSource + ?Sized>(k: u64, src: &S) -> Result<DivisorClass> {
    let mut class = class_verdict_with(k, src)?;
    if !class.is_empty() {
        class.c = Some(c_formula_with(k, src)?);
    }
    Ok(class)
}

/// Members of `A_k` up to `x` as generated by the exponent rules.
pub fn enumerate_class(k: u64, x: u64) -> Result<Vec<u64>> {
    enumerate_class_with(k, x, &Uncached)
}

pub fn enumerate_class_with<S: PrimeDataSource + ?Sized>(
    k: u64,
    x: u64,
    src: &S,
) -> Result<Vec<u64>> {
    let class = class_verdict_with(k, src)?;
    if class.is_empty() {
        return Ok(Vec::new());
    }
    // c(k) >= k * z(k); skip the full orbit when that already exceeds x
    let zk = z_value_with(k, src)?;
    if k.checked_mul(zk).is_none_or(|lower| lower > x) {
        return Ok(Vec::new());
    }
    let c = c_formula_with(k, src)?;
    Ok(expand_rules(c, &class.rules, x))
}

/// All `c * prod p^beta_p <= x` admitted by `rules`.
pub(crate) fn expand_rules(c: u64, rules: &[(u64, Rule)], x: u64) -> Vec<u64> {
    if c > x {
        return Vec::new();
    }
    let mut desc: Vec<(u64, Rule)> = rules.to_vec();
    desc.sort_by_key(|&(p, _)| std::cmp::Reverse(p));
    let mut out = Vec::new();
    dfs(c, &desc, x, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

fn dfs(value: u64, rules: &[(u64, Rule)], x: u64, out: &mut Vec<u64>) {
    let Some((&(p, rule), rest)) = rules.split_first() else {
        out.push(value);
        return;
    };
    let mut v = value;
    let mut beta = 0u32;
    loop {
        if rule.admits(beta) {
            dfs(v, rest, x, out);
        }
        if rule == Rule::Fixed0 {
            break;
        }
        match v.checked_mul(p) {
            Some(next) if next <= x => v = next,
            _ => break,
        }
        beta += 1;
    }
}

/// `Some(n / z(n))` if `z(n) | n`.
pub fn member_class(n: u64) -> Result<Option<u64>> {
    member_class_with(n, &Uncached)
}

pub fn member_class_with<S: PrimeDataSource + ?Sized>(n: u64, src: &S) -> Result<Option<u64>> {
    let z = z_value_with(n, src)?;
    Ok(n.is_multiple_of(z).then(|| n / z))
}

/// Rule-based enumeration of `A_k` up to `x` compared with the brute-force
/// class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReconciliationReport {
    #[serde(serialize_with = "json::u64")]
    pub k: u64,
    #[serde(serialize_with = "json::u64")]
    pub x: u64,
    #[serde(skip)]
    pub enumerated: Vec<u64>,
    #[serde(skip)]
    pub brute: Vec<u64>,
    /// In the brute class but not generated by the rules.
    #[serde(serialize_with = "json::vec_u64")]
    pub missing: Vec<u64>,
    /// Generated by the rules but not in the class.
    #[serde(serialize_with = "json::vec_u64")]
    pub extra: Vec<u64>,
    pub counts: ReconciliationCounts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReconciliationCounts {
    pub enumerated: usize,
    pub brute: usize,
    pub missing: usize,
    pub extra: usize,
}

impl ReconciliationReport {
    fn new(k: u64, x: u64, enumerated: Vec<u64>, brute: Vec<u64>) -> Self {
        let missing = sorted_difference(&brute, &enumerated);
        let extra = sorted_difference(&enumerated, &brute);
        let counts = ReconciliationCounts {
            enumerated: enumerated.len(),
            brute: brute.len(),
            missing: missing.len(),
            extra: extra.len(),
        };
        ReconciliationReport {
            k,
            x,
            enumerated,
            brute,
            missing,
            extra,
            counts,
        }
    }

    pub fn is_sound(&self) -> bool {
        self.extra.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }
}

fn sorted_difference(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    let mut j = 0;
    for &v in a {
        while j < b.len() && b[j] < v {
            j += 1;
        }
        if j >= b.len() || b[j] != v {
            out.push(v);
        }
    }
    out
}

/// Brute-force class membership for every `n <= x`, computed once and shared
/// across many `reconcile` queries.
pub struct Reconciler {
    x: u64,
    table: EntryPointTable,
    classes: BTreeMap<u64, Vec<u64>>,
}

pub const DEFAULT_BLOCK: u64 = 1 << 16;

impl Reconciler {
    pub fn new(x: u64, jobs: usize) -> Result<Self> {
        let table = EntryPointTable::build(x, jobs)?;
        Self::from_table(table, x, jobs)
    }

    pub fn from_table(table: EntryPointTable, x: u64, jobs: usize) -> Result<Self> {
        if x == 0 || x > table.limit() {
            return Err(Error::Domain(format!(
                "reconciliation bound {x} outside table bound {}",
                table.limit()
            )));
        }
        let shards = map_ordered(blocks(x, DEFAULT_BLOCK), jobs, |range| {
            let mut hits = Vec::new();
            for n in range {
                if let Some(k) = table.class_of(n)? {
                    hits.push((n, k));
                }
            }
            Ok::<_, Error>(hits)
        });
        let mut classes: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for shard in shards {
            for (n, k) in shard? {
                classes.entry(k).or_default().push(n);
            }
        }
        Ok(Reconciler { x, table, classes })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn table(&self) -> &EntryPointTable {
        &self.table
    }

    /// Brute-force members of each nonempty class, keyed by `k`.
    pub fn classes(&self) -> &BTreeMap<u64, Vec<u64>> {
        &self.classes
    }

    pub fn brute_class(&self, k: u64) -> &[u64] {
        self.classes.get(&k).map_or(&[], |v| v.as_slice())
    }

    pub fn report(&self, k: u64) -> Result<ReconciliationReport> {
        let enumerated = enumerate_class_with(k, self.x, &self.table)?;
        Ok(ReconciliationReport::new(
            k,
            self.x,
            enumerated,
            self.brute_class(k).to_vec(),
        ))
    }
}

pub fn reconcile(k: u64, x: u64) -> Result<ReconciliationReport> {
    Reconciler::new(x, 1)?.report(k)
}
