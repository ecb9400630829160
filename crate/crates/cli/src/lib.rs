//! `fibdiv` command-line front end.
//!
//! Exit status is 0 on success, 1 when a computation fails, and 2 on a usage
//! error. Output depends only on the arguments and the cache contents.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fibdiv::census::{
    bound_report_from_count, c_growth_scan_with, enumerate_selfdivisors_with, pratt_fib_tree_with,
    spot_check, CensusOptions, CountOptions,
};
use fibdiv::classify::{class_verdict_with, classify_with, enumerate_class_with, Reconciler};
use fibdiv::entry::{z_of_with, PrimeDataSource};
use fibdiv::par::default_jobs;
use fibdiv::{EntryPointCache, Error, Method};

pub const CACHE_ENV: &str = "FIBDIV_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    EntryPoint,
    Classification,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => Method::Direct,
            MethodArg::EntryPoint => Method::EntryPoint,
            MethodArg::Classification => Method::Classification,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fibdiv", version, about = "Fibonacci entry points and integers n dividing F(n)")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Worker threads for census, count, reconcile and scan-c.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// CSV cache of (p, z(p), e(p)); loaded if present, rewritten on new entries.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn positive() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entry point z(n).
    Z {
        #[arg(value_parser = positive())]
        n: u64,
    },
    /// Wall exponent e(p) = v_p(F(z(p))).
    E {
        #[arg(value_parser = positive())]
        p: u64,
    },
    /// Least member c(k) of the class A_k.
    C {
        #[arg(value_parser = positive())]
        k: u64,
    },
    /// Members of A_k up to the limit, generated from the exponent rules.
    Class {
        #[arg(value_parser = positive())]
        k: u64,
        #[arg(long, value_parser = positive())]
        limit: u64,
    },
    /// Whether A_k is empty, with the exponent rules when it is not.
    Verdict {
        #[arg(value_parser = positive())]
        k: u64,
    },
    /// All n <= limit with n | F(n).
    Census {
        #[arg(long, value_parser = positive())]
        limit: u64,
        #[arg(long, value_enum, default_value = "entry-point")]
        method: MethodArg,
    },
    /// A(limit), the number of n <= limit with n | F(n).
    Count {
        #[arg(long, value_parser = positive())]
        limit: u64,
    },
    /// Compare the rule-generated A_k with a brute-force scan.
    Reconcile {
        #[arg(value_parser = positive())]
        k: u64,
        #[arg(long, value_parser = positive())]
        limit: u64,
    },
    /// Evaluate the counting-function bound expressions at the limit.
    Bounds {
        #[arg(long, value_parser = positive())]
        limit: u64,
    },
    /// Check the growth inequalities for c(n) over squarefree n.
    ScanC {
        #[arg(long, value_parser = positive())]
        limit: u64,
    },
    /// Pratt-Fibonacci tree rooted at a prime.
    Tree {
        #[arg(value_parser = positive())]
        p: u64,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
}

/// Parses `argv`, runs the command, and returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn emit_lines(out: &mut dyn Write, header: Option<&str>, values: &[u64]) -> Result<(), Error> {
    if let Some(h) = header {
        writeln!(out, "{h}")?;
    }
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Error> {
    let cache = match &cli.cache {
        Some(path) => EntryPointCache::load(path)?,
        None => EntryPointCache::new(),
    };
    let jobs = cli.jobs.map_or_else(default_jobs, |j| j as usize);
    dispatch(cli, &cache, jobs, out, err)?;
    if let Some(path) = &cli.cache {
        cache.save_if_dirty(path)?;
    }
    Ok(())
}

fn dispatch(
    cli: &Cli,
    cache: &EntryPointCache,
    jobs: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Error> {
    let fmt = cli.format;
    match cli.command {
        Command::Z { n } => {
            let rec = z_of_with(n, cache)?;
            match fmt {
                Format::Text => writeln!(out, "{}", rec.z)?,
                Format::Csv => writeln!(out, "n,z\n{},{}", rec.n, rec.z)?,
                Format::Json => emit_json(out, &rec)?,
            }
        }
        Command::E { p } => {
            let d = cache.prime_data(p)?;
            match fmt {
                Format::Text => writeln!(out, "{}", d.e)?,
                Format::Csv => writeln!(out, "p,z,e\n{p},{},{}", d.z, d.e)?,
                Format::Json => emit_json(out, &serde_json::json!({"p": p, "z": d.z, "e": d.e}))?,
            }
        }
        Command::C { k } => {
            let class = classify_with(k, cache)?;
            let c = class.c.ok_or(Error::UndefinedMinimum(k))?;
            match fmt {
                Format::Text => writeln!(out, "{c}")?,
                Format::Csv => writeln!(out, "k,c\n{k},{c}")?,
                Format::Json => emit_json(out, &class)?,
            }
        }
        Command::Class { k, limit } => {
            let class = classify_with(k, cache)?;
            let members = enumerate_class_with(k, limit, cache)?;
            match fmt {
                Format::Text => emit_lines(out, None, &members)?,
                Format::Csv => emit_lines(out, Some("n"), &members)?,
                Format::Json => {
                    #[derive(Serialize)]
                    struct ClassOut<'a> {
                        class: &'a fibdiv::DivisorClass,
                        limit: u64,
                        #[serde(serialize_with = "fibdiv::json::vec_u64")]
                        members: &'a [u64],
                    }
                    emit_json(
                        out,
                        &ClassOut {
                            class: &class,
                            limit,
                            members: &members,
                        },
                    )?
                }
            }
        }
        Command::Verdict { k } => {
            let class = class_verdict_with(k, cache)?;
            match fmt {
                Format::Json => emit_json(out, &class)?,
                _ => writeln!(out, "{class}")?,
            }
        }
        Command::Census { limit, method } => {
            let opts = CensusOptions {
                jobs,
                ..CensusOptions::default()
            };
            let report = enumerate_selfdivisors_with(limit, method.into(), &opts)?;
            writeln!(
                err,
                "census up to {limit} by {}: {} members in {:.3}s",
                report.method,
                report.count,
                report.elapsed.as_secs_f64()
            )?;
            let members = report.members.as_deref().unwrap_or(&[]);
            match fmt {
                Format::Text => {
                    writeln!(out, "count {}", report.count)?;
                    writeln!(out, "{}", join(members))?;
                    if !report.patched.is_empty() {
                        writeln!(out, "patched {}", join(&report.patched))?;
                    }
                }
                Format::Csv => emit_lines(out, Some("n"), members)?,
                Format::Json => emit_json(out, &report)?,
            }
        }
        Command::Count { limit } => {
            let a = count(limit, jobs)?;
            match fmt {
                Format::Json => emit_json(out, &serde_json::json!({"x": limit, "count": a}))?,
                Format::Csv => writeln!(out, "x,count\n{limit},{a}")?,
                Format::Text => writeln!(out, "{a}")?,
            }
        }
        Command::Reconcile { k, limit } => {
            let report = Reconciler::new(limit, jobs)?.report(k)?;
            match fmt {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    writeln!(out, "n,status")?;
                    for n in &report.missing {
                        writeln!(out, "{n},missing")?;
                    }
                    for n in &report.extra {
                        writeln!(out, "{n},extra")?;
                    }
                }
                Format::Text => {
                    writeln!(
                        out,
                        "k {k} x {limit} enumerated {} brute {}",
                        report.counts.enumerated, report.counts.brute
                    )?;
                    writeln!(out, "missing {}", join(&report.missing))?;
                    writeln!(out, "extra {}", join(&report.extra))?;
                }
            }
        }
        Command::Bounds { limit } => {
            if limit < 16 {
                // fail before the census work
                bound_report_from_count(limit, 1)?;
            }
            let a = count(limit, jobs)?;
            let r = bound_report_from_count(limit, a)?;
            match fmt {
                Format::Json => emit_json(out, &r)?,
                Format::Csv => writeln!(
                    out,
                    "x,count,log_a,lower_aux,upper_main,heuristic\n{},{},{},{},{},{}",
                    r.x, r.count, r.log_a, r.lower_aux, r.upper_main, r.heuristic
                )?,
                Format::Text => {
                    writeln!(out, "x {}", r.x)?;
                    writeln!(out, "count {}", r.count)?;
                    writeln!(out, "log_a {}", r.log_a)?;
                    writeln!(out, "lower_aux {}", r.lower_aux)?;
                    writeln!(out, "upper_main {}", r.upper_main)?;
                    writeln!(out, "heuristic {}", r.heuristic)?;
                }
            }
        }
        Command::ScanC { limit } => {
            let scan = c_growth_scan_with(limit, jobs)?;
            match fmt {
                Format::Json => emit_json(out, &scan)?,
                Format::Csv => {
                    writeln!(out, "n,log_c,three_p,seven_sum_log_sq")?;
                    for v in &scan.violations {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            v.n, v.log_c, v.largest_prime_bound, v.log_square_bound
                        )?;
                    }
                }
                Format::Text => {
                    writeln!(
                        out,
                        "scanned {} violations {}",
                        scan.scanned,
                        scan.violations.len()
                    )?;
                    for v in &scan.violations {
                        writeln!(
                            out,
                            "{} log_c={} 3P={} 7S={}",
                            v.n, v.log_c, v.largest_prime_bound, v.log_square_bound
                        )?;
                    }
                }
            }
        }
        Command::Tree { p, depth } => {
            let tree = pratt_fib_tree_with(p, depth, cache)?;
            match fmt {
                Format::Json => emit_json(out, &tree)?,
                _ => write!(out, "{}", tree.render())?,
            }
        }
    }
    Ok(())
}

fn count(limit: u64, jobs: usize) -> Result<u64, Error> {
    let opts = CountOptions {
        jobs,
        ..CountOptions::default()
    };
    let report = enumerate_selfdivisors_with(
        limit,
        Method::EntryPoint,
        &CensusOptions {
            jobs,
            ..CensusOptions::default()
        },
    )?;
    let members = report.members.as_deref().unwrap_or(&[]);
    spot_check(limit, members, opts.spot_checks, opts.seed)?;
    Ok(report.count)
}
