//! Command-line front end. [`run`] parses the arguments, executes one
//! subcommand and returns the process exit code.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tamekernel::arith::val2;
use tamekernel::classgroups::{gf2_rank, prime_above_2, r2_k2, r4_k2_bound, ranks_of, redei_of};
use tamekernel::induction::verify_identity;
use tamekernel::k2::resolve_structure;
use tamekernel::lvalues::{l_imprimitive_direct, l_imprimitive_euler, l_value};
use tamekernel::scanner::{build_table, write_csv, write_jsonl, FamilySelector, TableRow};
use tamekernel::{Discriminant, FundamentalDiscriminant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "TAMEKERNEL_THREADS";

/// The `n = 4` case 2c table: `D/4, p1..p4, -L, delta`.
pub const GOLDEN_TABLE: &str = include_str!("../data/golden_n4.csv");

/// Bound covering every row of [`GOLDEN_TABLE`].
pub const GOLDEN_MAX: u64 = 4 * 990_015;

#[derive(Parser, Debug)]
#[command(name = "tamekernel", version, about = "Exact L(chi_D, -1), class group ranks and the 2-part of K2 for real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// L(chi_D, -1) as num/den and its 2-adic valuation
    Lvalue {
        #[arg(long)]
        disc: u64,
    },
    /// L^(D)(chi_d, -1) by the direct sum and by the Euler factors
    Imprimitive {
        #[arg(long)]
        disc: u64,
        #[arg(long)]
        sub: u64,
    },
    /// Check the subset-sum identity for D
    Identity {
        #[arg(long)]
        disc: u64,
        /// Explicit d-factorization, comma separated
        #[arg(long, value_delimiter = ',')]
        factors: Option<Vec<u64>>,
    },
    /// Redei matrix and its rank over GF(2)
    Redei {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Class group ranks, plus K2 ranks for D > 0
    Ranks {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Order and 2-primary structure of K2, as JSON
    K2 {
        #[arg(long)]
        disc: u64,
    },
    /// Tabulate a family up to a bound
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Recompute the n = 4 table and compare with the stored rows
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

type Outcome = std::result::Result<(), String>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DOMAIN
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    // a second call in the same process finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Outcome {
    writeln!(out, "{}", serde_json::to_string(value).map_err(fail)?).map_err(fail)
}

fn execute(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Lvalue { disc } => {
            let d = Discriminant::new(disc).map_err(fail)?;
            let l = l_value(&d).map_err(fail)?;
            let v = val2(&l).map_err(fail)?;
            writeln!(out, "{l} v2={v}").map_err(fail)
        }
        Command::Imprimitive { disc, sub } => {
            let d = Discriminant::new(disc).map_err(fail)?;
            let direct = l_imprimitive_direct(sub, &d).map_err(fail)?;
            let euler = l_imprimitive_euler(sub, &d).map_err(fail)?;
            let equal = direct.value == euler.value;
            emit_json(out, &json!({
                "D": disc.to_string(),
                "d": sub.to_string(),
                "direct": direct.value.to_string(),
                "euler": euler.value.to_string(),
                "equal": equal,
            }))?;
            if equal {
                Ok(())
            } else {
                Err(format!("routes disagree for d = {sub}, D = {disc}"))
            }
        }
        Command::Identity { disc, factors } => {
            let d = match factors {
                Some(f) => Discriminant::with_factors(disc, &f),
                None => Discriminant::new(disc),
            }
            .map_err(fail)?;
            let report = verify_identity(&d).map_err(fail)?;
            let mut value = serde_json::to_value(&report).map_err(fail)?;
            value["D"] = json!(disc.to_string());
            value["d_factors"] = json!(d.d_factors().unwrap_or(&[]).iter().map(u64::to_string).collect::<Vec<_>>());
            emit_json(out, &value)
        }
        Command::Redei { disc } => {
            let fd = FundamentalDiscriminant::new(disc).map_err(fail)?;
            let m = redei_of(&fd);
            emit_json(out, &json!({
                "discriminant": disc.to_string(),
                "p_star": fd.prime_discriminants().iter().map(i64::to_string).collect::<Vec<_>>(),
                "t": m.t(),
                "matrix": serde_json::to_value(&m).map_err(fail)?,
                "rank": gf2_rank(&m),
            }))
        }
        Command::Ranks { disc } => {
            let fd = FundamentalDiscriminant::new(disc).map_err(fail)?;
            let mut value = json!({
                "discriminant": disc.to_string(),
                "class_group": serde_json::to_value(ranks_of(&fd)).map_err(fail)?,
            });
            if disc > 0 {
                let d = Discriminant::new(disc as u64).map_err(fail)?;
                value["prime_above_2"] = serde_json::to_value(prime_above_2(&d)).map_err(fail)?;
                value["k2_r2"] = match r2_k2(&d) {
                    Ok(r) => json!(r),
                    Err(_) => Value::Null,
                };
                value["k2_r4_bounds"] = serde_json::to_value(r4_k2_bound(&d)).map_err(fail)?;
            }
            emit_json(out, &value)
        }
        Command::K2 { disc } => {
            let d = Discriminant::new(disc).map_err(fail)?;
            let report = resolve_structure(&d).map_err(fail)?;
            let mut value = serde_json::to_value(&report).map_err(fail)?;
            value["structure_string"] = json!(report.structure_string());
            emit_json(out, &value)
        }
        Command::Scan { family, max, out: path, format } => {
            let selector: FamilySelector = family.parse().map_err(fail)?;
            let rows = build_table(selector, max).map_err(fail)?;
            match path {
                Some(p) => {
                    let file = File::create(&p).map_err(|e| format!("{}: {e}", p.display()))?;
                    let mut w = BufWriter::new(file);
                    write_rows(&rows, format, &mut w)?;
                    w.flush().map_err(fail)
                }
                None => write_rows(&rows, format, out),
            }
        }
        Command::Selftest => {
            let rows = build_table(FamilySelector::Case2c(4), GOLDEN_MAX).map_err(fail)?;
            let report = compare_golden(&rows);
            for line in &report.mismatches {
                writeln!(out, "mismatch: {line}").map_err(fail)?;
            }
            writeln!(out, "selftest: {}/{} rows match, {} rows computed", report.matched, report.expected, rows.len())
                .map_err(fail)?;
            if report.ok() {
                Ok(())
            } else {
                Err("selftest failed".into())
            }
        }
    }
}

fn write_rows(rows: &[TableRow], format: Format, w: &mut dyn Write) -> Outcome {
    match format {
        Format::Csv => write_csv(rows, w),
        Format::Json => write_jsonl(rows, w),
    }
    .map_err(fail)
}

#[derive(Debug, Default)]
pub struct GoldenReport {
    pub expected: usize,
    pub matched: usize,
    pub mismatches: Vec<String>,
}

impl GoldenReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.matched == self.expected
    }
}

/// Stored rows of [`GOLDEN_TABLE`] rendered as `D/4,p1,p2,p3,p4,-L,delta`.
pub fn golden_lines() -> Vec<&'static str> {
    GOLDEN_TABLE.lines().filter(|l| !l.trim().is_empty()).collect()
}

/// A computed row in the stored table layout.
pub fn golden_format(row: &TableRow) -> String {
    let mut fields = vec![row.d_over_4.to_string()];
    fields.extend(row.primes.iter().map(u64::to_string));
    fields.push(row.neg_l.to_string().trim_end_matches("/1").to_string());
    fields.push(row.delta.map_or(String::new(), |d| d.to_string()));
    fields.join(",")
}

/// Row-by-row comparison of computed rows against [`GOLDEN_TABLE`].
pub fn compare_golden(rows: &[TableRow]) -> GoldenReport {
    let expected = golden_lines();
    let computed: Vec<String> = rows.iter().map(golden_format).collect();
    let mut report = GoldenReport { expected: expected.len(), ..Default::default() };
    for i in 0..expected.len().max(computed.len()) {
        match (expected.get(i), computed.get(i)) {
            (Some(e), Some(c)) if *e == c => report.matched += 1,
            (e, c) => report.mismatches.push(format!(
                "row {}: expected {}, computed {}",
                i + 1,
                e.unwrap_or(&"-"),
                c.map_or("-", String::as_str)
            )),
        }
    }
    report
}

/// Entry point for the binary.
pub fn main_with_stdio() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = BufWriter::new(stdout.lock());
    let code = run(std::env::args_os(), &mut out, &mut stderr.lock());
    let _ = out.flush();
    code
}
