//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on invalid input (including argument parse
//! errors), 3 when a size budget is exceeded.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{
    classical_bh_tuple, format_rational, is_admissible_bruteforce, is_admissible_exact,
    is_admissible_fast, AdmissibilityReport, ExponentTuple,
};
use crate::opnorm::{self, Certificate, NormEstimate};
use crate::randforms::{hadamard, lift, sample_sign_tensor, KszSpec};
use crate::scaling::{self, ExperimentSpec, Family, NormMode};
use crate::tensor::{block_restrict, mixed_norm, CoefTensor, Partition, ScalarField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bhlab",
    version,
    about = "Mixed-norm inequalities for multilinear forms"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "BHLAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide admissibility of an exponent tuple.
    Check {
        /// Exponents: numbers, decimals or a/b rationals.
        #[arg(allow_negative_numbers = true)]
        q: Vec<String>,
        /// Use the classical tuple 2m/(m+1), repeated m times.
        #[arg(long, value_name = "M", conflicts_with = "q")]
        bh: Option<usize>,
        /// Block sizes n_1,...,n_k; must have one block per exponent.
        #[arg(long)]
        partition: Option<String>,
        /// Enumerate all subsets instead of using the min(q,2) reduction.
        #[arg(long)]
        brute: bool,
        #[arg(long)]
        json: bool,
    },
    /// Mixed norm of a tensor file, optionally after block restriction.
    MixedNorm {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        q: Vec<String>,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Operator norm estimate of a tensor file.
    Opnorm {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OpnormMode::Exact)]
        mode: OpnormMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = scaling::DEFAULT_RESTARTS)]
        restarts: usize,
        /// Largest (m-1)*n accepted by exact mode.
        #[arg(long, default_value_t = opnorm::DEFAULT_VERTEX_BUDGET)]
        budget: usize,
        /// Include the maximizing argument vectors.
        #[arg(long)]
        certificate: bool,
    },
    /// Generate a tensor file.
    Gen {
        #[arg(long, value_enum)]
        family: GenFamily,
        /// Arity of the random (base) form.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Target arity for lifting; defaults to the base arity.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "real")]
        field: String,
        /// Base form to lift (family `lifted` only).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Growth-rate sweep over sides n.
    Scan {
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        q: Vec<String>,
        #[arg(long, value_enum, default_value_t = ScanFamily::Ksz)]
        family: ScanFamily,
        /// Arity of the random form before lifting (family ksz_lifted).
        #[arg(long)]
        base_k: Option<usize>,
        /// Tensor whose sections are scanned (family file).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long)]
        partition: Option<String>,
        /// Sides, e.g. `4,8,12,16` or `4..=16:4`.
        #[arg(long, default_value = "4,8,12,16")]
        n_grid: String,
        /// Seeds, e.g. `0..20` or `1,2,3`.
        #[arg(long, default_value = "0..10")]
        seeds: String,
        #[arg(long, value_enum, default_value_t = ScanNorm::Exact)]
        norm: ScanNorm,
        #[arg(long, default_value_t = scaling::DEFAULT_RESTARTS)]
        restarts: usize,
        /// Output prefix: writes PREFIX.csv and PREFIX.json.
        #[arg(long, value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OpnormMode {
    Exact,
    Ascent,
    Sandwich,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenFamily {
    Ksz,
    Lifted,
    Littlewood,
    Ones,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanFamily {
    Ksz,
    #[value(name = "ksz_lifted", alias = "ksz-lifted")]
    KszLifted,
    Littlewood,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanNorm {
    Exact,
    Sandwich,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut buf)),
            Err(e) => Err(Error::Invalid(e.to_string())),
        },
        None => dispatch(cli.command, &mut buf),
    };
    let result = result.and_then(|()| Ok(out.write_all(&buf)?));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_capacity() {
                let _ = writeln!(err, "hint: reduce the size or use bound-based modes");
                EXIT_CAPACITY
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Check {
            q,
            bh,
            partition,
            brute,
            json,
        } => check(q, bh, partition, brute, json, out),
        Command::MixedNorm {
            input,
            q,
            partition,
            json,
        } => mixed_norm_cmd(input, q, partition, json, out),
        Command::Opnorm {
            input,
            mode,
            seed,
            restarts,
            budget,
            certificate,
        } => opnorm_cmd(input, mode, seed, restarts, budget, certificate, out),
        Command::Gen {
            family,
            k,
            m,
            n,
            seed,
            field,
            input,
            out: path,
        } => gen(family, k, m, n, seed, &field, input, path, out),
        Command::Scan {
            q,
            family,
            base_k,
            input,
            partition,
            n_grid,
            seeds,
            norm,
            restarts,
            out: prefix,
        } => {
            let q = ExponentTuple::parse(&q)?;
            let partition = match partition {
                Some(p) => p.parse()?,
                None => Partition::trivial(q.len())?,
            };
            let family = match family {
                ScanFamily::Ksz => Family::Ksz,
                ScanFamily::KszLifted => Family::KszLifted {
                    base_arity: base_k.map_or_else(|| default_base_arity(&q), Ok)?,
                },
                ScanFamily::Littlewood => Family::Littlewood,
                ScanFamily::File => {
                    let path =
                        input.ok_or_else(|| Error::Invalid("family file needs --in".into()))?;
                    Family::File(CoefTensor::read_json(path)?)
                }
            };
            let spec = ExperimentSpec {
                q,
                partition,
                family,
                n_grid: parse_int_list(&n_grid)?,
                seeds: parse_int_list(&seeds)?,
                norm_mode: match norm {
                    ScanNorm::Exact => NormMode::Exact,
                    ScanNorm::Sandwich => NormMode::Sandwich,
                },
                restarts,
            };
            let result = scaling::run_experiment(&spec)?;
            if let Some(prefix) = prefix {
                result.write_files(prefix)?;
            }
            writeln!(out, "{}", result.summary_json())?;
            Ok(())
        }
    }
}

fn relation<T: Ord>(a: &T, b: &T) -> &'static str {
    match a.cmp(b) {
        std::cmp::Ordering::Less => "<",
        std::cmp::Ordering::Equal => "=",
        std::cmp::Ordering::Greater => ">",
    }
}

/// Size of the witness when it is a leading block `{1, ..., j}`.
fn default_base_arity(q: &ExponentTuple) -> Result<usize> {
    let report = is_admissible_fast(q);
    let w = report.witness.as_slice();
    if !w.is_empty() && w.iter().enumerate().all(|(pos, &i)| pos == i) {
        Ok(w.len())
    } else {
        Err(Error::Invalid(
            "ksz_lifted needs --base-k unless the witness is a leading block {1..j}".into(),
        ))
    }
}

/// Comma-separated integers and ranges `a..b`, `a..=b`, with optional `:step`.
pub fn parse_int_list<T>(text: &str) -> Result<Vec<T>>
where
    T: TryFrom<u64>,
{
    let bad = |s: &str| Error::Invalid(format!("bad integer list item {s:?}"));
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (range, step) = match item.split_once(':') {
            Some((r, s)) => (r, s.parse::<u64>().map_err(|_| bad(item))?),
            None => (item, 1),
        };
        if step == 0 {
            return Err(bad(item));
        }
        let values: Vec<u64> = if let Some((a, b)) = range.split_once("..=") {
            let (a, b) = (a.parse::<u64>(), b.parse::<u64>());
            let (a, b) = (a.map_err(|_| bad(item))?, b.map_err(|_| bad(item))?);
            (a..=b).step_by(step as usize).collect()
        } else if let Some((a, b)) = range.split_once("..") {
            let (a, b) = (a.parse::<u64>(), b.parse::<u64>());
            let (a, b) = (a.map_err(|_| bad(item))?, b.map_err(|_| bad(item))?);
            (a..b).step_by(step as usize).collect()
        } else {
            vec![range.parse::<u64>().map_err(|_| bad(item))?]
        };
        for v in values {
            out.push(T::try_from(v).map_err(|_| bad(item))?);
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid(format!("empty integer list {text:?}")));
    }
    Ok(out)
}

#[derive(Serialize)]
struct CheckJson<'a> {
    q: &'a ExponentTuple,
    method: &'static str,
    #[serde(flatten)]
    report: &'a AdmissibilityReport,
    full_sum: f64,
    exact: Option<ExactJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
}

#[derive(Serialize)]
struct ExactJson {
    admissible: bool,
    max_deficit: String,
    reduced_sum: String,
    full_sum: String,
    full_bound: String,
}

fn check(
    q: Vec<String>,
    bh: Option<usize>,
    partition: Option<String>,
    brute: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let q = match bh {
        Some(m) => classical_bh_tuple(m)?,
        None if q.is_empty() => return Err(Error::Invalid("no exponents given".into())),
        None => ExponentTuple::parse(&q)?,
    };
    let partition: Option<Partition> = partition.map(|p| p.parse()).transpose()?;
    if let Some(p) = &partition {
        if p.len() != q.len() {
            return Err(Error::ArityMismatch {
                expected: q.len(),
                actual: p.len(),
            });
        }
    }
    let report = if brute {
        is_admissible_bruteforce(&q)?
    } else {
        is_admissible_fast(&q)
    };
    let exact = if brute { None } else { is_admissible_exact(&q) };
    let full_sum: f64 = q.values().iter().map(|v| 1.0 / v).sum();
    let bound = (q.len() as f64 + 1.0) / 2.0;

    if json {
        let doc = CheckJson {
            q: &q,
            method: if brute { "brute" } else { "fast" },
            report: &report,
            full_sum,
            exact: exact.as_ref().map(|e| ExactJson {
                admissible: e.admissible,
                max_deficit: format_rational(&e.max_deficit),
                reduced_sum: format_rational(&e.reduced_sum),
                full_sum: format_rational(&e.full_sum),
                full_bound: format_rational(&e.full_bound),
            }),
            partition: partition.as_ref().map(|p| p.blocks().to_vec()),
            m: partition.as_ref().map(Partition::total),
        };
        writeln!(out, "{}", serde_json::to_string(&doc)?)?;
        return Ok(());
    }

    writeln!(out, "q = {q}")?;
    if let Some(p) = &partition {
        writeln!(out, "partition = {:?}, m = {}", p.blocks(), p.total())?;
    }
    match &exact {
        Some(e) => {
            let deficit = format_rational(&e.max_deficit);
            if e.admissible {
                writeln!(out, "ADMISSIBLE deficit={deficit}")?;
            } else {
                writeln!(out, "INADMISSIBLE witness={} deficit={deficit}", e.witness)?;
            }
            writeln!(out, "max deficit attained at {}", e.maximizer)?;
            let rel = relation(&e.full_sum, &e.full_bound);
            writeln!(
                out,
                "full-set sum 1/q_j = {} {rel} (k+1)/2 = {}",
                format_rational(&e.full_sum),
                format_rational(&e.full_bound)
            )?;
            let rel = relation(&e.reduced_sum, &e.full_bound);
            writeln!(
                out,
                "reduced sum 1/min(q_j,2) = {} {rel} (k+1)/2 = {}",
                format_rational(&e.reduced_sum),
                format_rational(&e.full_bound)
            )?;
        }
        None => {
            if report.admissible {
                writeln!(out, "ADMISSIBLE deficit={}", report.max_deficit)?;
            } else {
                writeln!(
                    out,
                    "INADMISSIBLE witness={} deficit={}",
                    report.witness, report.max_deficit
                )?;
            }
            writeln!(out, "max deficit attained at {}", report.maximizer)?;
            let rel = if full_sum <= bound { "<=" } else { ">" };
            writeln!(
                out,
                "full-set sum 1/q_j = {full_sum} {rel} (k+1)/2 = {bound}"
            )?;
            let rel = if report.reduced_sum <= bound {
                "<="
            } else {
                ">"
            };
            writeln!(
                out,
                "reduced sum 1/min(q_j,2) = {} {rel} (k+1)/2 = {bound}",
                report.reduced_sum
            )?;
        }
    }
    Ok(())
}

fn mixed_norm_cmd(
    input: PathBuf,
    q: Vec<String>,
    partition: Option<String>,
    json: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let t = CoefTensor::read_json(input)?;
    let q = ExponentTuple::parse(&q)?;
    let partition = match partition {
        Some(p) => p.parse()?,
        None => Partition::trivial(t.arity())?,
    };
    let restricted = block_restrict(&t, &partition)?;
    let value = mixed_norm(&restricted, &q)?;
    if json {
        #[derive(Serialize)]
        struct Doc<'a> {
            mixed_norm: f64,
            q: &'a ExponentTuple,
            partition: &'a Partition,
        }
        let doc = Doc {
            mixed_norm: value,
            q: &q,
            partition: &partition,
        };
        writeln!(out, "{}", serde_json::to_string(&doc)?)?;
    } else {
        writeln!(out, "{value}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct OpnormJson<'a> {
    lower: f64,
    upper: Option<f64>,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<&'a Certificate>,
}

fn opnorm_cmd(
    input: PathBuf,
    mode: OpnormMode,
    seed: u64,
    restarts: usize,
    budget: usize,
    certificate: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let t = CoefTensor::read_json(input)?;
    let est: NormEstimate = match mode {
        OpnormMode::Exact => opnorm::exact_real_with_budget(&t, budget)?,
        OpnormMode::Ascent => opnorm::ascent_lower(&t, restarts, seed),
        OpnormMode::Sandwich => opnorm::sandwich(&t, restarts, seed)?,
    };
    let doc = OpnormJson {
        lower: est.lower,
        upper: est.upper,
        exact: est.exact,
        certificate: certificate.then_some(&est.argmax_certificate),
    };
    writeln!(out, "{}", serde_json::to_string(&doc)?)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen(
    family: GenFamily,
    k: usize,
    m: Option<usize>,
    n: usize,
    seed: u64,
    field: &str,
    input: Option<PathBuf>,
    path: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    let field: ScalarField = field.parse()?;
    let base = match (family, input) {
        (GenFamily::Lifted, Some(path)) => CoefTensor::read_json(path)?,
        (GenFamily::Ksz | GenFamily::Lifted, _) => sample_sign_tensor(&KszSpec::new(k, n, seed))?,
        (GenFamily::Littlewood, _) => hadamard(n)?,
        (GenFamily::Ones, _) => CoefTensor::from_fn(m.unwrap_or(k), n, |_| 1.0)?,
        (GenFamily::Zero, _) => CoefTensor::zeros(m.unwrap_or(k), n, ScalarField::Real)?,
    };
    let t = match (family, m) {
        (GenFamily::Lifted | GenFamily::Littlewood, Some(m)) => lift(&base, m)?,
        (GenFamily::Ksz, Some(m)) if m != k => {
            return Err(Error::Invalid(
                "family ksz takes --k only; use family lifted to pad to --m".into(),
            ))
        }
        _ => base,
    };
    let t = t.with_field(field)?;
    match path {
        Some(p) => t.write_json(p)?,
        None => writeln!(out, "{}", t.to_json_string())?,
    }
    Ok(())
}
