//! Census of self-Fibonacci divisors (`n | F(n)`) up to a bound by three
//! independent methods, plus diagnostics: bound formulas, growth of `c(n)`,
//! and Pratt-Fibonacci trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::classify::{enumerate_class_with, Reconciler, DEFAULT_BLOCK, Z_ITERATION_BUDGET};
use crate::entry::{iterate_z_with, PrimeDataSource, Uncached};
use crate::error::{Error, Result};
use crate::factor::{factorize, is_prime, Factorization};
use crate::fib::divides_fib;
use crate::json;
use crate::par::{blocks, default_jobs, map_ordered};
use crate::table::EntryPointTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// `F(n) mod n == 0` for every `n`.
    Direct,
    /// `z(n) | n` from the sieve-backed entry-point table.
    EntryPoint,
    /// Union of the rule-generated classes, patched with reconciliation gaps.
    Classification,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Direct, Method::EntryPoint, Method::Classification];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::EntryPoint => "entry-point",
            Method::Classification => "classification",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "entry-point" | "entrypoint" | "z" => Ok(Method::EntryPoint),
            "classification" | "class" => Ok(Method::Classification),
            _ => Err(Error::Domain(format!("unknown census method `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub jobs: usize,
    pub block: u64,
    pub keep_members: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            jobs: default_jobs(),
            block: DEFAULT_BLOCK,
            keep_members: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    #[serde(serialize_with = "json::u64")]
    pub x: u64,
    pub method: Method,
    #[serde(serialize_with = "json::u64")]
    pub count: u64,
    #[serde(serialize_with = "json::opt_vec_u64")]
    pub members: Option<Vec<u64>>,
    /// `k -> |A_k ∩ [1, x]|`; absent for the direct method.
    #[serde(serialize_with = "json::opt_map_u64")]
    pub per_class: Option<BTreeMap<u64, u64>>,
    /// Members the classification rules did not generate and that were added
    /// from the brute-force classes.
    #[serde(serialize_with = "json::vec_u64")]
    pub patched: Vec<u64>,
    /// Wall-clock time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

// wasm32-unknown-unknown has no clock
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
fn stopwatch() -> impl Fn() -> Duration {
    let started = std::time::Instant::now();
    move || started.elapsed()
}

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
fn stopwatch() -> impl Fn() -> Duration {
    || Duration::ZERO
}

pub fn enumerate_selfdivisors(x: u64, method: Method) -> Result<CensusReport> {
    enumerate_selfdivisors_with(x, method, &CensusOptions::default())
}

pub fn enumerate_selfdivisors_with(
    x: u64,
    method: Method,
    opts: &CensusOptions,
) -> Result<CensusReport> {
    if x == 0 {
        return Err(Error::Domain("census bound must be positive".into()));
    }
    let elapsed = stopwatch();
    let (members, per_class, patched) = match method {
        Method::Direct => (direct_members(x, opts), None, Vec::new()),
        Method::EntryPoint => {
            let table = EntryPointTable::build(x, opts.jobs)?;
            let hits = entry_point_members(&table, x, opts)?;
            let mut per_class = BTreeMap::new();
            for &(_, k) in &hits {
                *per_class.entry(k).or_insert(0u64) += 1;
            }
            let members = hits.into_iter().map(|(n, _)| n).collect();
            (members, Some(per_class), Vec::new())
        }
        Method::Classification => classification_members(x, opts)?,
    };
    let count = members.len() as u64;
    Ok(CensusReport {
        x,
        method,
        count,
        members: opts.keep_members.then_some(members),
        per_class,
        patched,
        elapsed: elapsed(),
    })
}

fn direct_members(x: u64, opts: &CensusOptions) -> Vec<u64> {
    map_ordered(blocks(x, opts.block), opts.jobs, |range| {
        range.filter(|&n| divides_fib(n)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

fn entry_point_members(
    table: &EntryPointTable,
    x: u64,
    opts: &CensusOptions,
) -> Result<Vec<(u64, u64)>> {
    let shards = map_ordered(blocks(x, opts.block), opts.jobs, |range| {
        let mut hits = Vec::new();
        for n in range {
            if let Some(k) = table.class_of(n)? {
                hits.push((n, k));
            }
        }
        Ok::<_, Error>(hits)
    });
    let mut out = Vec::new();
    for shard in shards {
        out.extend(shard?);
    }
    Ok(out)
}

type Members = (Vec<u64>, Option<BTreeMap<u64, u64>>, Vec<u64>);

fn classification_members(x: u64, opts: &CensusOptions) -> Result<Members> {
    let rec = Reconciler::new(x, opts.jobs)?;
    let table = rec.table();
    // c(k) >= k z(k), so only k with k z(k) <= x can contribute
    let candidates: Vec<u64> = (1..=x)
        .filter(|&k| match table.z(k) {
            Ok(z) => k.checked_mul(z).is_some_and(|v| v <= x),
            Err(_) => true,
        })
        .collect();
    let chunks: Vec<&[u64]> = candidates.chunks(1024).collect();
    let enumerated = map_ordered(chunks, opts.jobs, |ks| {
        ks.iter()
            .map(|&k| Ok((k, enumerate_class_with(k, x, table)?)))
            .collect::<Result<Vec<_>>>()
    });
    let mut members = BTreeSet::new();
    let mut per_class = BTreeMap::new();
    for chunk in enumerated {
        for (k, list) in chunk? {
            if !list.is_empty() {
                per_class.insert(k, list.len() as u64);
            }
            members.extend(list);
        }
    }
    let mut patched = Vec::new();
    for &k in rec.classes().keys() {
        let report = rec.report(k)?;
        for &n in &report.missing {
            if members.insert(n) {
                patched.push(n);
                *per_class.entry(k).or_insert(0) += 1;
            }
        }
    }
    patched.sort_unstable();
    Ok((members.into_iter().collect(), Some(per_class), patched))
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub jobs: usize,
    /// Random points re-checked with the direct method.
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            jobs: default_jobs(),
            spot_checks: 1000,
            seed: 0x5e1f_f1b0,
        }
    }
}

/// `A(x)`, the number of `n <= x` with `n | F(n)`.
pub fn count(x: u64) -> Result<u64> {
    count_with(x, &CountOptions::default())
}

pub fn count_with(x: u64, opts: &CountOptions) -> Result<u64> {
    let report = enumerate_selfdivisors_with(
        x,
        Method::EntryPoint,
        &CensusOptions {
            jobs: opts.jobs,
            ..CensusOptions::default()
        },
    )?;
    let members = report.members.as_deref().unwrap_or(&[]);
    spot_check(x, members, opts.spot_checks, opts.seed)?;
    Ok(report.count)
}

/// Re-checks `samples` random points of `[1, x]` with the direct method
/// against a sorted member list.
pub fn spot_check(x: u64, members: &[u64], samples: usize, seed: u64) -> Result<usize> {
    let mut rng = StdRng::seed_from_u64(seed);
    let points: Vec<u64> = if (samples as u64) >= x {
        (1..=x).collect()
    } else {
        (0..samples).map(|_| rng.gen_range(1..=x)).collect()
    };
    // always include a few known members so both verdicts are exercised
    for &n in points.iter().chain(members.iter().take(8)) {
        let listed = members.binary_search(&n).is_ok();
        if listed != divides_fib(n) {
            return Err(Error::Mismatch {
                n,
                detail: format!("census says {listed}, direct check disagrees"),
            });
        }
    }
    Ok(points.len())
}

/// Logarithmic diagnostics at `x`, natural logarithms, `o(1)` terms dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "json::u64")]
    pub x: u64,
    #[serde(serialize_with = "json::u64")]
    pub count: u64,
    /// `log A(x)`
    pub log_a: f64,
    /// `(1/4) log x`
    pub lower_aux: f64,
    /// `log x - (1/2) log x logloglog x / loglog x`
    pub upper_main: f64,
    /// `log x - log x logloglog x / loglog x`
    pub heuristic: f64,
}

/// Rounds to six significant digits.
pub fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mag = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - mag);
    (v * scale).round() / scale
}

pub fn bound_report(x: u64) -> Result<BoundReport> {
    check_bound_domain(x)?;
    let a = count(x)?;
    bound_report_from_count(x, a)
}

fn check_bound_domain(x: u64) -> Result<()> {
    if x < 16 {
        return Err(Error::Domain(format!(
            "bound diagnostics need x >= 16 so that log log log x > 0, got {x}"
        )));
    }
    Ok(())
}

/// Same as [`bound_report`] with `A(x)` already known.
pub fn bound_report_from_count(x: u64, count: u64) -> Result<BoundReport> {
    check_bound_domain(x)?;
    let l = (x as f64).ln();
    let ll = l.ln();
    let lll = ll.ln();
    let correction = l * lll / ll;
    Ok(BoundReport {
        x,
        count,
        log_a: sig6((count as f64).ln()),
        lower_aux: sig6(0.25 * l),
        upper_main: sig6(l - 0.5 * correction),
        heuristic: sig6(l - correction),
    })
}

/// One squarefree `n` checked against `log c(n) < 3 P(n)` and
/// `log c(n) < 7 sum_{p | n} (log p)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRecord {
    #[serde(serialize_with = "json::u64")]
    pub n: u64,
    pub log_c: f64,
    /// `3 P(n)`
    pub largest_prime_bound: f64,
    /// `7 sum (log p)^2`
    pub log_square_bound: f64,
}

impl GrowthRecord {
    pub fn holds(&self) -> bool {
        self.log_c < self.largest_prime_bound && self.log_c < self.log_square_bound
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthScan {
    #[serde(serialize_with = "json::u64")]
    pub x: u64,
    pub scanned: u64,
    pub violations: Vec<GrowthRecord>,
    /// Largest `log c(n) / (7 sum (log p)^2)` seen.
    pub max_square_ratio: f64,
    /// Largest `log c(n) / 3 P(n)` seen.
    pub max_prime_ratio: f64,
}

/// `log(n * lcm(z(n), z(z(n)), ...))` computed from factorizations, so it
/// never overflows.
pub fn log_c_formula<S: PrimeDataSource + ?Sized>(
    n: u64,
    src: &S,
    factor: impl Fn(u64) -> Factorization,
) -> Result<f64> {
    let chain = iterate_z_with(n, Z_ITERATION_BUDGET, src)?;
    let mut lcm: BTreeMap<u64, u32> = BTreeMap::new();
    for &v in &chain.iterates {
        for (p, e) in factor(v).parts {
            let slot = lcm.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
    }
    let log_lcm: f64 = lcm.iter().map(|(&p, &e)| e as f64 * (p as f64).ln()).sum();
    Ok((n as f64).ln() + log_lcm)
}

pub fn growth_record<S: PrimeDataSource + ?Sized>(
    n: u64,
    f: &Factorization,
    src: &S,
    factor: impl Fn(u64) -> Factorization,
) -> Result<GrowthRecord> {
    let log_c = log_c_formula(n, src, factor)?;
    let p_max = f.largest_prime().unwrap_or(1) as f64;
    let sq: f64 = f.primes().map(|p| (p as f64).ln().powi(2)).sum();
    Ok(GrowthRecord {
        n,
        log_c,
        largest_prime_bound: 3.0 * p_max,
        log_square_bound: 7.0 * sq,
    })
}

/// Checks both growth inequalities for every squarefree `2 <= n <= x`
/// with `5 ∤ n`.
pub fn c_growth_scan(x: u64) -> Result<GrowthScan> {
    c_growth_scan_with(x, default_jobs())
}

pub fn c_growth_scan_with(x: u64, jobs: usize) -> Result<GrowthScan> {
    if x < 2 {
        return Err(Error::Domain(format!("growth scan needs x >= 2, got {x}")));
    }
    // iterates stay below 2n
    let table = EntryPointTable::build(x.saturating_mul(2), jobs)?;
    let sieve = table.sieve();
    let factor = |v: u64| {
        if v <= sieve.limit() {
            sieve.factorize(v)
        } else {
            factorize(v)
        }
    };
    let shards = map_ordered(blocks(x, DEFAULT_BLOCK), jobs, |range| {
        let mut records = Vec::new();
        for n in range {
            if n < 2 || n % 5 == 0 {
                continue;
            }
            let f = sieve.factorize(n);
            if !f.is_squarefree() {
                continue;
            }
            records.push(growth_record(n, &f, &table, factor)?);
        }
        Ok::<_, Error>(records)
    });
    let mut scan = GrowthScan {
        x,
        scanned: 0,
        violations: Vec::new(),
        max_square_ratio: 0.0,
        max_prime_ratio: 0.0,
    };
    for shard in shards {
        for r in shard? {
            scan.scanned += 1;
            scan.max_square_ratio = scan.max_square_ratio.max(r.log_c / r.log_square_bound);
            scan.max_prime_ratio = scan.max_prime_ratio.max(r.log_c / r.largest_prime_bound);
            if !r.holds() {
                scan.violations.push(r);
            }
        }
    }
    Ok(scan)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cut {
    /// The base prime already occurs on the path from the root.
    Repeat,
    /// Expansion stopped at the depth limit.
    Depth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrattNode {
    pub prime: u64,
    pub exponent: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<Cut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<PrattNode>,
}

/// Recursion tree attaching to each prime `q` the prime powers of `z(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrattFibTree {
    pub max_depth: usize,
    pub root: PrattNode,
}

impl PrattFibTree {
    pub fn node_count(&self) -> usize {
        fn walk(n: &PrattNode) -> usize {
            1 + n.children.iter().map(walk).sum::<usize>()
        }
        walk(&self.root)
    }

    pub fn height(&self) -> usize {
        fn walk(n: &PrattNode) -> usize {
            n.children.iter().map(|c| 1 + walk(c)).max().unwrap_or(0)
        }
        walk(&self.root)
    }

    /// Indented text, two spaces per level.
    pub fn render(&self) -> String {
        fn walk(n: &PrattNode, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str(&n.prime.to_string());
            if n.exponent > 1 {
                out.push_str(&format!("^{}", n.exponent));
            }
            match n.cut {
                Some(Cut::Repeat) => out.push_str(" [repeat]"),
                Some(Cut::Depth) => out.push_str(" [depth]"),
                None => {}
            }
            out.push('\n');
            for c in &n.children {
                walk(c, depth + 1, out);
            }
        }
        let mut out = String::new();
        walk(&self.root, 0, &mut out);
        out
    }
}

pub fn pratt_fib_tree(p: u64, max_depth: usize) -> Result<PrattFibTree> {
    pratt_fib_tree_with(p, max_depth, &Uncached)
}

pub fn pratt_fib_tree_with<S: PrimeDataSource + ?Sized>(
    p: u64,
    max_depth: usize,
    src: &S,
) -> Result<PrattFibTree> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut path = Vec::new();
    let root = expand(p, 1, 0, max_depth, &mut path, src)?;
    Ok(PrattFibTree { max_depth, root })
}

fn expand<S: PrimeDataSource + ?Sized>(
    prime: u64,
    exponent: u32,
    depth: usize,
    max_depth: usize,
    path: &mut Vec<u64>,
    src: &S,
) -> Result<PrattNode> {
    if path.contains(&prime) {
        return Ok(PrattNode {
            prime,
            exponent,
            cut: Some(Cut::Repeat),
            children: Vec::new(),
        });
    }
    if depth >= max_depth {
        return Ok(PrattNode {
            prime,
            exponent,
            cut: Some(Cut::Depth),
            children: Vec::new(),
        });
    }
    let z = src.prime_data(prime)?.z;
    path.push(prime);
    let children = factorize(z)
        .parts
        .into_iter()
        .map(|(q, e)| expand(q, e, depth + 1, max_depth, path, src))
        .collect::<Result<Vec<_>>>();
    path.pop();
    Ok(PrattNode {
        prime,
        exponent,
        cut: None,
        children: children?,
    })
}
