//! `hecke`: exact Hecke algebra computations from the command line.

mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::memo::CACHE_FILE;
use hecke_core::pgroups::Partition;
use hecke_core::subgroups::{
    count_of_type_closed_form, subgroup_type_counts, Split, DEFAULT_BUDGET,
};
use hecke_core::verify::{run_suite, Suite, SuiteReport};
use hecke_core::{Error, HeckeContext, HeckeElement, Memo, OmegaContext, Result, Truncation};
use num_bigint::BigInt;
use serde_json::json;

use table::TableKind;

#[derive(Parser)]
#[command(
    name = "hecke",
    version,
    about = "Exact Hecke algebras of finite abelian p-groups"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// The prime p.
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// Rank bound n of H_n; omega maps H_{n+1} to H_n.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    /// Largest order exponent in sweeps and tables.
    #[arg(long, global = true, default_value_t = 1)]
    max_order_exp: u32,
    /// Ambient exponent for I_n(M,N): `min`, `+k` or a fixed `r`.
    #[arg(long, global = true)]
    trunc: Option<String>,
    /// Which coordinate hyperplane is the kernel V.
    #[arg(long, global = true, default_value = "first")]
    split: String,
    /// Directory holding the structure-constant cache.
    #[arg(long, global = true, env = "HECKE_CACHE_DIR")]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Maximum number of candidate bases per enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Count |m_n(M)| with the closed formula instead of enumeration.
    #[arg(long, global = true)]
    closed_form: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Structure constant c_n(M,N;L) of H_n.
    Ccoeff {
        #[arg(long = "M")]
        m: String,
        #[arg(long = "N")]
        nn: String,
        #[arg(long = "L")]
        l: String,
        /// Compute |K_n(M,N;L)| / |m_n(L)| by pair enumeration instead.
        #[arg(long)]
        verified: bool,
    },
    /// Coefficient a_n(M,N) of omega.
    Acoeff {
        #[arg(long = "M")]
        m: String,
        #[arg(long = "N")]
        nn: String,
    },
    /// Inverse coefficient b_n(B,A).
    Bcoeff {
        #[arg(long = "B")]
        b: String,
        #[arg(long = "A")]
        a: String,
    },
    /// Product of elements of H_n, given as text or JSON.
    Mul {
        #[arg(required = true, allow_hyphen_values = true)]
        elements: Vec<String>,
    },
    /// Image under omega of an element of H_{n+1}.
    Omega {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Polynomial in the generators T_k = [1^k] representing an element of H_n.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Table of constants over all arguments up to --max-order-exp.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
    },
    /// Identity sweeps up to --max-order-exp.
    Verify {
        /// hom, tp, inverse, shimura, oracle or all.
        suite: String,
    },
    /// Subgroups, by type, of the group of type LAMBDA.
    CountSubgroups {
        #[arg(long)]
        lambda: String,
        /// Only count subgroups of this type.
        #[arg(long)]
        mu: Option<String>,
    },
    /// Quick check of known small values.
    Selftest,
}

fn parse_partition(s: &str) -> Result<Partition> {
    s.parse()
}

/// Text form `c*[..] + ...`, or the JSON element form.
fn parse_element(h: &HeckeContext, s: &str) -> Result<HeckeElement> {
    if !s.trim_start().starts_with('{') {
        return h.parse_element(s);
    }
    let x = HeckeElement::from_json(s)?;
    if x.p() != h.p() || x.n() != h.n() {
        return Err(Error::ParameterMismatch(format!(
            "element has p={}, n={} but the run uses p={}, n={}",
            x.p(),
            x.n(),
            h.p(),
            h.n()
        )));
    }
    Ok(x)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        e if e.is_verification_failure() => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn build_context(run: &RunArgs, memo: Arc<Memo>) -> Result<OmegaContext> {
    if run.budget == 0 {
        return Err(Error::InvalidParameter("--budget must be positive".into()));
    }
    let truncation = match &run.trunc {
        Some(t) => t.parse()?,
        None => Truncation::Minimal,
    };
    let split: Split = run.split.parse()?;
    Ok(OmegaContext::new(run.p, run.n)?
        .with_memo(memo)
        .with_budget(run.budget)
        .with_closed_form_counts(run.closed_form)
        .with_split(split)
        .with_truncation(truncation))
}

fn integer_output(run: &RunArgs, fields: &[(&str, String)], value: &BigInt) -> String {
    match run.output {
        Output::Text => format!("{value}\n"),
        Output::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let names = fields.iter().map(|(k, _)| *k).chain(["value"]);
            w.write_record(names).expect("in-memory write");
            let vals = fields
                .iter()
                .map(|(_, v)| v.clone())
                .chain([value.to_string()]);
            w.write_record(vals).expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
        }
        Output::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("p".into(), json!(run.p));
            doc.insert("n".into(), json!(run.n));
            for (k, v) in fields {
                let lam: Partition = v.parse().expect("validated partition");
                doc.insert(k.to_string(), json!(lam));
            }
            doc.insert("value".into(), json!(value.to_string()));
            format!("{}\n", serde_json::Value::Object(doc))
        }
    }
}

fn csv_rows<const K: usize>(header: [&str; K], rows: impl Iterator<Item = [String; K]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
}

fn element_output(run: &RunArgs, x: &HeckeElement) -> String {
    match run.output {
        Output::Json => format!("{}\n", x.to_json()),
        Output::Csv => csv_rows(
            ["lambda", "coeff"],
            x.display_terms()
                .into_iter()
                .map(|(m, c)| [m.to_string(), c.to_string()]),
        ),
        Output::Text => format!("{x}\n"),
    }
}

fn suite_output(run: &RunArgs, reports: &[SuiteReport]) -> String {
    match run.output {
        Output::Json => {
            let all: Vec<_> = reports.iter().map(|r| r.to_json_value()).collect();
            let pass = reports.iter().all(|r| r.passed());
            format!("{}\n", json!({"pass": pass, "suites": all}))
        }
        _ => {
            let mut out = String::new();
            for r in reports {
                out.push_str(&r.summary_line());
                out.push('\n');
                if let Some(first) = r.failures().next() {
                    out.push_str(&format!(
                        "first counterexample: {}\n{:#}\n",
                        first.label, first.detail
                    ));
                }
            }
            out
        }
    }
}

/// Returns the text to print and whether every check passed.
fn execute(run: &RunArgs, command: &Command, ctx: &OmegaContext) -> Result<(String, bool)> {
    let h = ctx.target();
    let out = match command {
        Command::Ccoeff { m, nn, l, verified } => {
            let (m, nn, l) = (
                parse_partition(m)?,
                parse_partition(nn)?,
                parse_partition(l)?,
            );
            let v = if *verified {
                h.c_coeff_verified(&m, &nn, &l)?
            } else {
                h.c_coeff(&m, &nn, &l)?
            };
            let fields = [
                ("M", m.to_string()),
                ("N", nn.to_string()),
                ("L", l.to_string()),
            ];
            integer_output(run, &fields, &v)
        }
        Command::Acoeff { m, nn } => {
            let (m, nn) = (parse_partition(m)?, parse_partition(nn)?);
            let v = ctx.a_coeff(&m, &nn)?;
            integer_output(run, &[("M", m.to_string()), ("N", nn.to_string())], &v)
        }
        Command::Bcoeff { b, a } => {
            let (b, a) = (parse_partition(b)?, parse_partition(a)?);
            let v = ctx.b_coeff(&b, &a)?;
            integer_output(run, &[("B", b.to_string()), ("A", a.to_string())], &v)
        }
        Command::Mul { elements } => {
            let mut acc = h.identity();
            for e in elements {
                acc = h.multiply(&acc, &parse_element(h, e)?)?;
            }
            element_output(run, &acc)
        }
        Command::Omega { element } => {
            element_output(run, &ctx.omega(&parse_element(ctx.source(), element)?)?)
        }
        Command::Decompose { element } => {
            let q = h.decompose_in_generators(&parse_element(h, element)?)?;
            match run.output {
                Output::Json => format!("{}\n", q.to_json_value()),
                _ => format!("{q}\n"),
            }
        }
        Command::Table { kind } => table::run(ctx, *kind, run.max_order_exp, run.output)?,
        Command::Verify { suite } => {
            let suites = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let reports = suites
                .into_iter()
                .map(|s| run_suite(ctx, s, run.max_order_exp))
                .collect::<Result<Vec<_>>>()?;
            let pass = reports.iter().all(|r| r.passed());
            return Ok((suite_output(run, &reports), pass));
        }
        Command::CountSubgroups { lambda, mu } => {
            count_subgroups(run, &parse_partition(lambda)?, mu.as_deref())?
        }
        Command::Selftest => return selftest(ctx),
    };
    Ok((out, true))
}

fn count_subgroups(run: &RunArgs, lambda: &Partition, mu: Option<&str>) -> Result<String> {
    let mut counts = Vec::new();
    match mu {
        Some(mu) => {
            let mu = parse_partition(mu)?;
            let c = if run.closed_form {
                count_of_type_closed_form(lambda, &mu, run.p)
            } else {
                let by_type = subgroup_type_counts(lambda, mu.order_exponent(), run.p, run.budget)?;
                BigInt::from(by_type.get(&mu).copied().unwrap_or(0))
            };
            counts.push((mu, c));
        }
        None => {
            for k in 0..=lambda.order_exponent() {
                for (m, c) in subgroup_type_counts(lambda, k, run.p, run.budget)? {
                    counts.push((m, BigInt::from(c)));
                }
            }
        }
    }
    let total: BigInt = counts.iter().map(|(_, c)| c).sum();
    Ok(match run.output {
        Output::Text => {
            let mut out: String = counts.iter().map(|(m, c)| format!("{m}: {c}\n")).collect();
            out.push_str(&format!("total: {total}\n"));
            out
        }
        Output::Csv => csv_rows(
            ["mu", "count"],
            counts.iter().map(|(m, c)| [m.to_string(), c.to_string()]),
        ),
        Output::Json => {
            let rows: Vec<_> = counts
                .iter()
                .map(|(m, c)| json!({"mu": m, "count": c.to_string()}))
                .collect();
            format!(
                "{}\n",
                json!({"p": run.p, "lambda": lambda, "counts": rows, "total": total.to_string()})
            )
        }
    })
}

fn selftest(ctx: &OmegaContext) -> Result<(String, bool)> {
    let p = |s: &str| s.parse::<Partition>().expect("literal partition");
    let h2 = HeckeContext::new(2, 2)?;
    let o1 = OmegaContext::new(2, 1)?.with_budget(ctx.budget());
    let cases: Vec<(&str, String, String)> = vec![
        (
            "c_2([1],[1];[1,1]) at p=2",
            h2.c_coeff(&p("[1]"), &p("[1]"), &p("[1,1]"))?.to_string(),
            "3".into(),
        ),
        (
            "[1]*[1] in H_2 at p=2",
            h2.multiply_basis(&p("[1]"), &p("[1]"))?.to_string(),
            "1*[2] + 3*[1,1]".into(),
        ),
        (
            "a_1([1],[]) at p=2",
            o1.a_coeff(&p("[1]"), &p("[]"))?.to_string(),
            "2".into(),
        ),
        (
            "b_1([1],[]) at p=2",
            o1.b_coeff(&p("[1]"), &p("[]"))?.to_string(),
            "-2".into(),
        ),
        (
            "omega([1]) at p=2, n=1",
            o1.omega_basis(&p("[1]"))?.to_string(),
            "1*[1] + 2*[]".into(),
        ),
        (
            "omega([1,1]) at p=2, n=1",
            o1.omega_basis(&p("[1,1]"))?.to_string(),
            "1*[1]".into(),
        ),
        (
            "[2] in generators of H_2 at p=2",
            h2.decompose_in_generators(&h2.basis(&p("[2]"))?)?
                .to_string(),
            "T1^2 - 3*T2".into(),
        ),
    ];
    let mut out = String::new();
    let mut pass = true;
    for (name, got, want) in cases {
        let ok = got == want;
        pass &= ok;
        if ok {
            out.push_str(&format!("ok    {name} = {got}\n"));
        } else {
            out.push_str(&format!("FAIL  {name} = {got}, expected {want}\n"));
        }
    }
    let hom = run_suite(ctx, Suite::Hom, 2)?;
    pass &= hom.passed();
    out.push_str(&hom.summary_line());
    out.push('\n');
    Ok((out, pass))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, pass)) => {
            print!("{text}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.run.jobs.max(1))
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let memo = Arc::new(Memo::new());
    let cache_file = cli.run.cache.as_ref().map(|dir| dir.join(CACHE_FILE));
    if let Some(path) = &cache_file {
        let (loaded, skipped) = memo.load_file(path)?;
        log::info!(
            "loaded {loaded} cached constants from {} ({skipped} skipped)",
            path.display()
        );
    }
    let ctx = build_context(&cli.run, memo.clone())?;
    let result = execute(&cli.run, &cli.command, &ctx);
    if let Some(path) = &cache_file {
        let written = memo.flush_to(path)?;
        log::info!("cached {written} new constants");
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::NotPrime(4)), 2);
        assert_eq!(exit_code(&Error::ParameterMismatch("x".into())), 2);
        assert_eq!(
            exit_code(&Error::BudgetExceeded {
                budget: 1,
                what: "x".into()
            }),
            3
        );
        assert_eq!(exit_code(&Error::Verification("x".into())), 4);
        assert_eq!(exit_code(&Error::SingularSystem { degree: 2 }), 4);
        assert_eq!(
            exit_code(&Error::NonExactDivision {
                numerator: "3".into(),
                denominator: "2".into(),
                what: "x".into()
            }),
            4
        );
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
