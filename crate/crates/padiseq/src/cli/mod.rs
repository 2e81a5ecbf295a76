//! Command-line surface: digit primitives, classification, three-squares
//! reports and kernel experiments, with deterministic canonical output.
//!
//! Every invocation prints one JSON document with sorted keys (or CSV rows
//! under --csv) and exits 0 on success, 2 on a domain violation, 3 on a
//! precision failure, and 4 on a parse error. Big integers are serialized
//! as decimal strings; machine-sized counts stay JSON numbers.

mod expr;

pub use expr::{parse_poly, parse_poly_tuple};

use crate::arith::{ExtendedNat, FactoredBase};
use crate::classify::{
    classify_digits, classify_last_nonzero, classify_valuation, Classification, FunctionTuple, Kind,
};
use crate::error::{Error, Result};
use crate::lucas::{lucas_term, three_squares_classify, three_squares_verify, LucasParams};
use crate::seqkit::{ingest_bfile, kernel_enumerate, SeqWindow};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

/// Everything a command run produces: the text for stdout and the process
/// exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutcome {
    pub stdout: String,
    pub exit_code: i32,
}

const DEFAULT_PRECISION: u32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "padiseq",
    about = "b-adic valuations, last nonzero digits, and sequence regularity",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    /// Emit CSV rows for the tabular part of the result instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// nu_b, L_b and ell_{b,d} of one integer value.
    ///
    /// The value is an integer literal, "lucas A B n" for the n-th term of
    /// the (A, B) Lucas sequence, or "poly c0 c1 ... at n" for a polynomial
    /// with the given coefficients evaluated at n.
    Digits {
        /// The base b >= 2.
        #[arg(long, default_value_t = 10)]
        base: u64,
        /// How many base-b digits ell reports.
        #[arg(short, long, default_value_t = 1)]
        d: u32,
        /// Integer literal | lucas A B n | poly c0 c1 ... at n.
        #[arg(required = true, allow_hyphen_values = true, num_args = 1..)]
        expr: Vec<String>,
    },
    /// Decide the regularity class of nu, L or ell over a polynomial tuple.
    Classify {
        /// The base b >= 2.
        #[arg(long)]
        base: u64,
        /// Digit width, required when the target is "digits".
        #[arg(long)]
        d: Option<u32>,
        /// valuation | lastnonzero | digits.
        target: String,
        /// '|'-separated polynomial components, one per prime factor of the
        /// base (a single component is used for every factor).
        poly: String,
    },
    /// Which terms of the (A, B) Lucas sequence are not sums of three
    /// squares, with a verification sweep against the exact terms.
    #[command(name = "three-squares")]
    ThreeSquares {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        /// How far the verification sweep checks the report (default 400).
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Kernel statistics of a sequence window.
    Kernel {
        /// Kernel modulus k >= 2.
        #[arg(short)]
        k: u64,
        /// Maximal kernel depth.
        #[arg(short = 'D', long)]
        depth: u32,
        /// Prefix length compared between subsequences.
        #[arg(long, default_value_t = 24)]
        cmp_len: usize,
        /// "gen <spec>" with spec "nu <base> <poly in n>", or "bfile <path>".
        #[arg(required = true, num_args = 1..)]
        source: Vec<String>,
        /// Reduce window values by this modulus before the experiment.
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// Map raw values first: "ell <base> <d>" or "nu <base>".
        #[arg(long)]
        map: Option<String>,
    },
}

/// Runs one invocation; args include the program name.
pub fn run<I, S>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return CliOutcome {
                stdout: e.to_string(),
                exit_code: 0,
            };
        }
        Err(e) => {
            return CliOutcome {
                stdout: e.to_string(),
                exit_code: 4,
            };
        }
    };
    let precision = match read_precision() {
        Ok(p) => p,
        Err(e) => return fail("padiseq", Value::Null, &e),
    };
    let (name, parameters, body) = dispatch(&cli.command, precision);
    match body {
        Ok((result, csv_text)) => {
            if cli.csv {
                if let Some(text) = csv_text {
                    return CliOutcome {
                        stdout: text,
                        exit_code: 0,
                    };
                }
            }
            let doc = json!({
                "command": name,
                "parameters": parameters,
                "result": result,
                "status": "ok",
            });
            CliOutcome {
                stdout: render(&doc),
                exit_code: 0,
            }
        }
        Err(e) => fail(name, parameters, &e),
    }
}

fn fail(command: &str, parameters: Value, e: &Error) -> CliOutcome {
    let (kind, code) = match e {
        Error::Domain(_) => ("domain", 2),
        Error::Precision(_) => ("precision", 3),
        Error::Parse(_) => ("parse", 4),
    };
    let doc = json!({
        "command": command,
        "parameters": parameters,
        "error": { "kind": kind, "message": e.to_string() },
        "status": "error",
    });
    CliOutcome {
        stdout: render(&doc),
        exit_code: code,
    }
}

fn render(doc: &Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("serializable");
    text.push('\n');
    text
}

/// Working precision for displayed p-adic data, from PADISEQ_PRECISION.
fn read_precision() -> Result<u32> {
    match std::env::var("PADISEQ_PRECISION") {
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| {
                Error::parse(format!(
                    "PADISEQ_PRECISION must be a positive integer, got {:?}",
                    s
                ))
            }),
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

type Body = Result<(Value, Option<String>)>;

fn dispatch(command: &Command, precision: u32) -> (&'static str, Value, Body) {
    match command {
        Command::Digits { base, d, expr } => (
            "digits",
            json!({
                "base": base,
                "d": d,
                "expr": expr.join(" "),
                "precision": precision,
            }),
            cmd_digits(*base, *d, expr),
        ),
        Command::Classify {
            base,
            d,
            target,
            poly,
        } => (
            "classify",
            json!({
                "base": base,
                "d": d,
                "target": target,
                "poly": poly,
                "precision": precision,
            }),
            cmd_classify(*base, *d, target, poly, precision),
        ),
        Command::ThreeSquares { a, b, bound } => (
            "three-squares",
            json!({
                "a": a,
                "b": b,
                "bound": bound.unwrap_or(DEFAULT_SWEEP_BOUND),
                "precision": precision,
            }),
            cmd_three_squares(*a, *b, *bound),
        ),
        Command::Kernel {
            k,
            depth,
            cmp_len,
            source,
            modulus,
            map,
        } => (
            "kernel",
            json!({
                "k": k,
                "depth": depth,
                "cmp_len": cmp_len,
                "source": source.join(" "),
                "mod": modulus,
                "map": map,
                "precision": precision,
            }),
            cmd_kernel(*k, *depth, *cmp_len, source, *modulus, map.as_deref()),
        ),
    }
}

fn extnat_string(v: ExtendedNat) -> String {
    match v {
        ExtendedNat::Finite(n) => n.to_string(),
        ExtendedNat::Infinity => "inf".to_string(),
    }
}

/// The integer a digits expression denotes.
fn eval_digits_expr(tokens: &[String]) -> Result<BigInt> {
    match tokens {
        [single] => single
            .parse::<BigInt>()
            .map_err(|_| Error::parse(format!("not an integer literal: {:?}", single))),
        [word, a, b, n] if word == "lucas" => {
            let a: i64 = a
                .parse()
                .map_err(|_| Error::parse(format!("bad Lucas parameter A: {:?}", a)))?;
            let b: i64 = b
                .parse()
                .map_err(|_| Error::parse(format!("bad Lucas parameter B: {:?}", b)))?;
            let n: u64 = n
                .parse()
                .map_err(|_| Error::parse(format!("bad Lucas index: {:?}", n)))?;
            Ok(lucas_term(&LucasParams::new(a, b)?, n))
        }
        [word, rest @ ..] if word == "poly" => {
            let Some(at) = rest.iter().position(|t| t == "at") else {
                return Err(Error::parse(
                    "a poly expression reads: poly c0 c1 ... at n".to_string(),
                ));
            };
            let (coeff_text, tail) = rest.split_at(at);
            let [_, n] = tail else {
                return Err(Error::parse("'at' takes exactly one index".to_string()));
            };
            if coeff_text.is_empty() {
                return Err(Error::parse(
                    "poly needs at least one coefficient".to_string(),
                ));
            }
            let coeffs = coeff_text
                .iter()
                .map(|t| {
                    expr::parse_poly(t).and_then(|p| match p.coeffs() {
                        [] => Ok(BigRational::zero()),
                        [c] => Ok(c.clone()),
                        _ => Err(Error::parse(format!("not a constant coefficient: {:?}", t))),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let n: BigInt = n
                .parse()
                .map_err(|_| Error::parse(format!("bad evaluation point: {:?}", n)))?;
            let value = crate::roots::RationalPoly::new(coeffs).eval_int(&n);
            if !value.is_integer() {
                return Err(Error::domain(format!(
                    "the polynomial value {} is not an integer",
                    value
                )));
            }
            Ok(value.to_integer())
        }
        _ => Err(Error::parse(
            "expected an integer, \"lucas A B n\", or \"poly c0 c1 ... at n\"".to_string(),
        )),
    }
}

/// nu_b, L_b and ell_{b,d} of one integer.
pub fn cmd_digits(base: u64, d: u32, expr_tokens: &[String]) -> Body {
    if d == 0 {
        return Err(Error::domain(
            "the digit width d must be at least 1".to_string(),
        ));
    }
    let base = FactoredBase::new(base)?;
    let value = eval_digits_expr(expr_tokens)?;
    let nu = base.nu_int(&value);
    let (last_nonzero, digits) = if nu.is_infinite() {
        (BigInt::zero(), BigUint::zero())
    } else {
        (base.strip_int(&value), base.last_digits_int(&value, d))
    };
    let result = json!({
        "value": value.to_string(),
        "nu": extnat_string(nu),
        "last_nonzero": last_nonzero.to_string(),
        "digits": digits.to_string(),
    });
    let csv = format!(
        "nu,last_nonzero,digits\n{},{},{}\n",
        extnat_string(nu),
        last_nonzero,
        digits
    );
    Ok((result, Some(csv)))
}

fn kind_json(kind: &Kind) -> Value {
    match kind {
        Kind::AllInfinite => json!({ "kind": "AllInfinite" }),
        Kind::Periodic { period } => json!({
            "kind": "Periodic",
            "period": period.to_string(),
        }),
        Kind::RegularAllK => json!({ "kind": "RegularAllK" }),
        Kind::StrictlyRegular { k } => json!({
            "kind": "StrictlyRegular",
            "k": k.to_string(),
        }),
        Kind::StrictlyAutomatic { k } => json!({
            "kind": "StrictlyAutomatic",
            "k": k.to_string(),
        }),
        Kind::NotRegular => json!({ "kind": "NotRegular" }),
        Kind::NotAutomatic => json!({ "kind": "NotAutomatic" }),
    }
}

fn classification_json(c: &Classification, precision: u32) -> Value {
    let mut result = Map::new();
    result.insert("class".to_string(), kind_json(&c.kind));
    if let Some(w) = &c.witness {
        result.insert(
            "witness".to_string(),
            json!({
                "theta": w.theta.to_string(),
                "multiplicities": w.multiplicities,
                "exponents": w.exponents,
            }),
        );
    }
    result.insert(
        "natural_zeros".to_string(),
        Value::Array(
            c.natural_zeros
                .iter()
                .map(|z| Value::String(z.to_string()))
                .collect(),
        ),
    );
    let evidence: Vec<Value> = c
        .evidence
        .iter()
        .map(|comp| {
            let roots: Vec<Value> = comp
                .roots
                .iter()
                .map(|r| {
                    let shown = r.digits.min(precision);
                    let residue = &r.residue % BigUint::from(comp.prime).pow(shown);
                    json!({
                        "residue": residue.to_string(),
                        "digits": shown,
                        "multiplicity": r.multiplicity,
                        "rational": r.rational.as_ref().map(|q| q.to_string()),
                        "obstructs": r.obstructs,
                    })
                })
                .collect();
            json!({
                "component": comp.component,
                "prime": comp.prime,
                "exponent": comp.exponent,
                "roots": roots,
            })
        })
        .collect();
    result.insert("evidence".to_string(), Value::Array(evidence));
    Value::Object(result)
}

/// Classification of nu, L or ell over a polynomial tuple.
pub fn cmd_classify(
    base: u64,
    d: Option<u32>,
    target: &str,
    poly_text: &str,
    precision: u32,
) -> Body {
    let base = FactoredBase::new(base)?;
    let polys = expr::parse_poly_tuple(poly_text)?;
    let ft = if polys.len() == 1 && base.num_primes() > 1 {
        FunctionTuple::diagonal(base, polys.into_iter().next().expect("one"))
    } else {
        FunctionTuple::new(base, polys)?
    };
    let classification = match target {
        "valuation" => classify_valuation(&ft)?,
        "lastnonzero" => classify_last_nonzero(&ft)?,
        "digits" => {
            let d = d.ok_or_else(|| {
                Error::domain("the digits target needs a width: --d <n>".to_string())
            })?;
            classify_digits(&ft, d)?
        }
        other => {
            return Err(Error::parse(format!(
                "unknown target {:?}; use valuation, lastnonzero or digits",
                other
            )));
        }
    };
    let result = classification_json(&classification, precision);
    let parameter = match &classification.kind {
        Kind::Periodic { period } => period.to_string(),
        Kind::StrictlyRegular { k } | Kind::StrictlyAutomatic { k } => k.to_string(),
        _ => String::new(),
    };
    let kind_name = kind_json(&classification.kind)["kind"]
        .as_str()
        .expect("kind name")
        .to_string();
    let csv = format!("kind,parameter\n{},{}\n", kind_name, parameter);
    Ok((result, Some(csv)))
}

const DEFAULT_SWEEP_BOUND: u64 = 400;

/// Three-squares report for a Lucas sequence plus a verification sweep.
pub fn cmd_three_squares(a: i64, b: i64, bound: Option<u64>) -> Body {
    let params = LucasParams::new(a, b)?;
    let report = three_squares_classify(&params)?;
    let bound = bound.unwrap_or(DEFAULT_SWEEP_BOUND);
    if let Some(n) = three_squares_verify(&params, &report, bound) {
        return Err(Error::precision(format!(
            "the certified report disagrees with the exact term at n = {}",
            n
        )));
    }
    let progressions: Vec<Value> = report
        .progressions()
        .iter()
        .map(|&(t, j)| {
            json!({
                "t": t,
                "modulus": (report.pi() << t).to_string(),
                "residue": j.to_string(),
            })
        })
        .collect();
    let families: Vec<Value> = report
        .families()
        .iter()
        .map(|&(t, c)| {
            json!({
                "t": t,
                "c": c,
                "description": format!("{} * 4^k * (8 l + {})", report.pi() << t, c),
            })
        })
        .collect();
    let result = json!({
        "pi": report.pi(),
        "progressions": progressions,
        "families": families,
        "verification": { "bound": bound, "agrees": true },
    });
    let mut csv = String::from("form,t,value\n");
    for &(t, j) in report.progressions() {
        csv.push_str(&format!("progression,{},{}\n", t, j));
    }
    for &(t, c) in report.families() {
        csv.push_str(&format!("family,{},{}\n", t, c));
    }
    Ok((result, Some(csv)))
}

/// Window values from a generator spec "nu <base> <poly in n>".
fn generate_window(spec: &str, length: u64) -> Result<SeqWindow> {
    let mut parts = spec.split_whitespace();
    let (Some(kind), Some(base)) = (parts.next(), parts.next()) else {
        return Err(Error::parse(
            "a generator spec reads: nu <base> <polynomial in n>".to_string(),
        ));
    };
    if kind != "nu" {
        return Err(Error::parse(format!(
            "unknown generator {:?}; only \"nu\" is supported",
            kind
        )));
    }
    let base: u64 = base
        .parse()
        .map_err(|_| Error::parse(format!("bad generator base: {:?}", base)))?;
    let base = FactoredBase::new(base)?;
    let poly_text: String = parts.collect::<Vec<_>>().join(" ");
    let poly = expr::parse_poly(&poly_text)?;
    let mut values = Vec::with_capacity(length as usize);
    for n in 0..length {
        let value = poly.eval_int(&BigInt::from(n));
        if !value.is_integer() {
            return Err(Error::domain(format!(
                "the generator value at n = {} is not an integer",
                n
            )));
        }
        let value = value.to_integer();
        values.push(match base.nu_int(&value) {
            ExtendedNat::Finite(v) => Some(BigInt::from(v)),
            ExtendedNat::Infinity => None,
        });
    }
    SeqWindow::new(0, values)
}

/// Applies a map spec "ell <base> <d>" or "nu <base>" to window values.
fn map_window(w: &SeqWindow, spec: &str) -> Result<SeqWindow> {
    let parts: Vec<&str> = spec.split_whitespace().collect();
    let mapped: Result<Vec<Option<BigInt>>> = match parts.as_slice() {
        ["ell", base, d] => {
            let base = FactoredBase::new(
                base.parse()
                    .map_err(|_| Error::parse(format!("bad map base: {:?}", base)))?,
            )?;
            let d: u32 = d
                .parse()
                .ok()
                .filter(|&d| d >= 1)
                .ok_or_else(|| Error::parse(format!("bad digit width: {:?}", d)))?;
            Ok(w.values()
                .iter()
                .map(|v| v.as_ref().map(|x| BigInt::from(base.last_digits_int(x, d))))
                .collect())
        }
        ["nu", base] => {
            let base = FactoredBase::new(
                base.parse()
                    .map_err(|_| Error::parse(format!("bad map base: {:?}", base)))?,
            )?;
            Ok(w.values()
                .iter()
                .map(|v| {
                    v.as_ref().and_then(|x| match base.nu_int(x) {
                        ExtendedNat::Finite(n) => Some(BigInt::from(n)),
                        ExtendedNat::Infinity => None,
                    })
                })
                .collect())
        }
        _ => Err(Error::parse(
            "a map spec reads: \"ell <base> <d>\" or \"nu <base>\"".to_string(),
        )),
    };
    SeqWindow::new(w.start(), mapped?)
}

/// Kernel statistics over a generated or ingested window.
pub fn cmd_kernel(
    k: u64,
    depth: u32,
    cmp_len: usize,
    source: &[String],
    modulus: Option<u64>,
    map: Option<&str>,
) -> Body {
    if k < 2 {
        return Err(Error::domain(
            "the kernel modulus k must be at least 2".to_string(),
        ));
    }
    let needed = k
        .checked_pow(depth)
        .and_then(|s| s.checked_mul(cmp_len as u64 + 1))
        .ok_or_else(|| Error::domain("the kernel depth overflows".to_string()))?;
    let mut window = match source {
        [kind, spec] if kind == "gen" => generate_window(spec, needed)?,
        [kind, path] if kind == "bfile" => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::domain(format!("cannot read {:?}: {}", path, e)))?;
            ingest_bfile(&text)?
        }
        _ => {
            return Err(Error::parse(
                "the source reads: gen \"<spec>\" or bfile <path>".to_string(),
            ));
        }
    };
    if let Some(spec) = map {
        window = map_window(&window, spec)?;
    }
    if let Some(m) = modulus {
        if m == 0 {
            return Err(Error::domain("the modulus must be positive".to_string()));
        }
        window = window.reduce_mod(&BigUint::from(m))?;
    }
    let report = kernel_enumerate(&window, k, depth, cmp_len)?;
    let result = json!({
        "k": report.k,
        "depth": report.depth,
        "cmp_len": report.cmp_len,
        "counts": report.counts,
        "rank": report.rank,
        "window_length": window.len(),
    });
    let mut csv = String::from("depth,count\n");
    for (d, c) in report.counts.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", d, c));
    }
    csv.push_str(&format!("rank,{}\n", report.rank));
    Ok((result, Some(csv)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliOutcome {
        run(std::iter::once("padiseq").chain(args.iter().copied()))
    }

    fn result_of(outcome: &CliOutcome) -> Value {
        assert_eq!(outcome.exit_code, 0, "stdout: {}", outcome.stdout);
        let doc: Value = serde_json::from_str(&outcome.stdout).expect("JSON output");
        assert_eq!(doc["status"], "ok");
        doc["result"].clone()
    }

    #[test]
    fn digits_of_the_worked_example() {
        let out = run_args(&["digits", "--base", "6", "-d", "2", "2400"]);
        let result = result_of(&out);
        assert_eq!(result["nu"], "1");
        assert_eq!(result["last_nonzero"], "400");
        assert_eq!(result["digits"], "4");
    }

    #[test]
    fn digits_of_zero() {
        let out = run_args(&["digits", "--base", "10", "-d", "1", "0"]);
        let result = result_of(&out);
        assert_eq!(result["nu"], "inf");
        assert_eq!(result["last_nonzero"], "0");
        assert_eq!(result["digits"], "0");
    }

    #[test]
    fn digits_of_a_lucas_term() {
        let out = run_args(&["digits", "--base", "4", "-d", "2", "lucas", "2", "1", "20"]);
        let result = result_of(&out);
        assert_eq!(result["value"], "15994428");
        assert_eq!(result["digits"], "15", "P_20 is not a sum of three squares");
    }

    #[test]
    fn digits_of_a_poly_value() {
        let out = run_args(&[
            "digits", "--base", "10", "-d", "2", "poly", "0", "1", "1", "at", "4",
        ]);
        let result = result_of(&out);
        assert_eq!(result["value"], "20", "4 + 16");
        assert_eq!(result["nu"], "1");
        assert_eq!(result["digits"], "2");
    }

    #[test]
    fn classify_examples() {
        let out = run_args(&["classify", "--base", "50", "valuation", "x | x^2"]);
        let result = result_of(&out);
        assert_eq!(result["class"]["kind"], "StrictlyRegular");
        assert_eq!(result["class"]["k"], "100");

        let out = run_args(&[
            "classify",
            "--base",
            "5",
            "--d",
            "2",
            "digits",
            "5*(x^2+1)^4",
        ]);
        assert_eq!(result_of(&out)["class"]["kind"], "NotAutomatic");

        let out = run_args(&["classify", "--base", "10", "valuation", "x^2+1"]);
        assert_eq!(result_of(&out)["class"]["kind"], "Periodic");
    }

    #[test]
    fn classify_rejects_bad_targets() {
        let out = run_args(&["classify", "--base", "10", "everything", "x"]);
        assert_eq!(out.exit_code, 4, "stdout: {}", out.stdout);
        let out = run_args(&["classify", "--base", "10", "digits", "x"]);
        assert_eq!(out.exit_code, 2, "digits without --d: {}", out.stdout);
    }

    #[test]
    fn three_squares_reports() {
        let out = run_args(&["three-squares", "2", "1"]);
        let result = result_of(&out);
        assert_eq!(result["families"][0]["description"], "4 * 4^k * (8 l + 5)");
        assert_eq!(result["progressions"], json!([]));
        assert_eq!(result["verification"]["agrees"], true);

        let out = run_args(&["three-squares", "1", "1"]);
        let result = result_of(&out);
        assert_eq!(result["progressions"][0]["modulus"], "12");
        assert_eq!(result["progressions"][0]["residue"], "10");
        assert_eq!(result["families"][0]["description"], "12 * 4^k * (8 l + 7)");

        let out = run_args(&["three-squares", "2", "2"]);
        assert_eq!(out.exit_code, 2, "2 | B must be rejected: {}", out.stdout);
    }

    #[test]
    fn kernel_of_binary_valuations() {
        let out = run_args(&["kernel", "-k", "2", "-D", "6", "gen", "nu 2 n"]);
        let result = result_of(&out);
        assert_eq!(result["rank"], 2);
        let counts: Vec<u64> = result["counts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        assert_eq!(counts, vec![1, 3, 5, 7, 9, 11, 13]);
    }

    #[test]
    fn kernel_with_modulus() {
        let out = run_args(&[
            "kernel",
            "-k",
            "5",
            "-D",
            "4",
            "--cmp-len",
            "12",
            "gen",
            "nu 5 n^2+1",
            "--mod",
            "2",
        ]);
        let result = result_of(&out);
        let counts: Vec<u64> = result["counts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        for d in 1..counts.len() {
            assert!(counts[d] > counts[d - 1], "counts: {:?}", counts);
        }
    }

    #[test]
    fn csv_output() {
        let out = run_args(&["--csv", "digits", "--base", "6", "-d", "2", "2400"]);
        assert_eq!(out.stdout, "nu,last_nonzero,digits\n1,400,4\n");
        assert_eq!(out.exit_code, 0);
    }

    #[test]
    fn deterministic_output() {
        let a = run_args(&["classify", "--base", "50", "valuation", "x | x^2"]);
        let b = run_args(&["classify", "--base", "50", "valuation", "x | x^2"]);
        assert_eq!(a, b);
    }

    #[test]
    fn parse_failures_exit_4() {
        let out = run_args(&["digits", "--base", "6", "-d", "2", "not-a-number"]);
        assert_eq!(out.exit_code, 4, "stdout: {}", out.stdout);
        let doc: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(doc["status"], "error");
        assert_eq!(doc["error"]["kind"], "parse");

        let out = run_args(&["classify", "--base", "10", "valuation", "x ?"]);
        assert_eq!(out.exit_code, 4);
    }

    #[test]
    fn domain_failures_exit_2() {
        let out = run_args(&["digits", "--base", "1", "-d", "1", "5"]);
        assert_eq!(out.exit_code, 2, "stdout: {}", out.stdout);
        let doc: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(doc["error"]["kind"], "domain");
    }

    #[test]
    fn tuple_arity_mismatch_is_a_domain_error() {
        let out = run_args(&["classify", "--base", "10", "valuation", "x | x | x"]);
        assert_eq!(out.exit_code, 2, "stdout: {}", out.stdout);
    }
}
