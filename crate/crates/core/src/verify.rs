//! Sweeps checking the algebraic identities over every argument tuple up to
//! an order bound.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::pgroups::{embeds, partitions_up_to, Partition};
use crate::subgroups::{count_of_type_closed_form, subgroup_type_counts, type_of, Split};
use crate::transchromatic::{OmegaContext, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// `omega(M1 * M2) = omega(M1) * omega(M2)`.
    Hom,
    /// Pushforward of the aggregates `T(p^r)` and its rearranged form.
    Tp,
    /// `a * b = b * a = 1` and `omega(lift_section(N)) = N`.
    Inverse,
    /// Commutativity, associativity and the generator round trip in `H_n`.
    Shimura,
    /// Brute-force cross-checks of the counting shortcuts.
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Hom,
        Suite::Tp,
        Suite::Inverse,
        Suite::Shimura,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hom => "hom",
            Suite::Tp => "tp",
            Suite::Inverse => "inverse",
            Suite::Shimura => "shimura",
            Suite::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// One checked instance.
#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: Value,
}

type Outcome = Result<(bool, Value)>;

fn equal(lhs: impl fmt::Display, rhs: impl fmt::Display) -> Outcome {
    let (l, r) = (lhs.to_string(), rhs.to_string());
    Ok((l == r, json!({"lhs": l, "rhs": r})))
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub p: u64,
    pub n: usize,
    pub max_order_exp: u32,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn summary_line(&self) -> String {
        let failed = self.failures().count();
        format!(
            "{} p={} n={} max-order-exp={}: {} ({} checks, {} failed)",
            self.suite,
            self.p,
            self.n,
            self.max_order_exp,
            if failed == 0 { "pass" } else { "FAIL" },
            self.checks.len(),
            failed
        )
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "p": self.p,
            "n": self.n,
            "max_order_exp": self.max_order_exp,
            "pass": self.passed(),
            "checks": self.checks.len(),
            "failures": self.failures().map(|c| json!({"label": c.label, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

/// Runs `body` on every cell in parallel, keeping the input order.
/// Identity failures become failing checks; other errors abort the sweep.
fn sweep<T, L, F>(cells: Vec<T>, label: L, body: F) -> Result<Vec<Check>>
where
    T: Send + Sync,
    L: Fn(&T) -> String + Sync + Send,
    F: Fn(&T) -> Outcome + Sync + Send,
{
    cells
        .par_iter()
        .map(|cell| {
            let (pass, detail) = match body(cell) {
                Ok(res) => res,
                Err(e) if e.is_verification_failure() => (false, json!({"error": e.to_string()})),
                Err(e) => return Err(e),
            };
            Ok(Check {
                label: label(cell),
                pass,
                detail,
            })
        })
        .collect()
}

fn pairs(parts: &[Partition]) -> Vec<(Partition, Partition)> {
    parts
        .iter()
        .flat_map(|a| parts.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// Ordered pairs whose product still has order at most `p^max`.
fn bounded_pairs(parts: &[Partition], max: u32) -> Vec<(Partition, Partition)> {
    pairs(parts)
        .into_iter()
        .filter(|(a, b)| a.order_exponent() + b.order_exponent() <= max)
        .collect()
}

pub fn run_suite(ctx: &OmegaContext, suite: Suite, max_order_exp: u32) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Hom => hom_checks(ctx, max_order_exp)?,
        Suite::Tp => tp_checks(ctx, max_order_exp)?,
        Suite::Inverse => inverse_checks(ctx, max_order_exp)?,
        Suite::Shimura => shimura_checks(ctx, max_order_exp)?,
        Suite::Oracle => oracle_checks(ctx, max_order_exp)?,
    };
    Ok(SuiteReport {
        suite,
        p: ctx.p(),
        n: ctx.n(),
        max_order_exp,
        checks,
    })
}

/// All pairs `(M1, M2)` of classes of rank at most `n + 1` and order at most `p^max`.
pub fn hom_checks(ctx: &OmegaContext, max: u32) -> Result<Vec<Check>> {
    sweep(
        pairs(&partitions_up_to(max, ctx.n() + 1)),
        |(m1, m2)| format!("hom M1={m1} M2={m2}"),
        |(m1, m2)| {
            let rep = ctx.verify_omega_hom(m1, m2)?;
            Ok((rep.passed(), rep.to_json_value()))
        },
    )
}

pub fn tp_checks(ctx: &OmegaContext, max: u32) -> Result<Vec<Check>> {
    sweep(
        (0..=max).collect(),
        |r| format!("tp r={r}"),
        |&r| {
            let rep = ctx.verify_tp_formula(r)?;
            Ok((rep.passed(), rep.to_json_value()))
        },
    )
}

/// Both inverse identities on comparable pairs of rank at most `n`, and the
/// lifting property on every class.
pub fn inverse_checks(ctx: &OmegaContext, max: u32) -> Result<Vec<Check>> {
    let classes = partitions_up_to(max, ctx.n());
    let comparable: Vec<(Partition, Partition)> = pairs(&classes)
        .into_iter()
        .filter(|(b, a)| embeds(a, b))
        .collect();
    let mut checks = sweep(
        comparable,
        |(b, a)| format!("inverse B={b} A={a}"),
        |(b, a)| {
            let delta = BigInt::from(u8::from(a == b));
            let ab = ctx.ab_delta(b, a)?;
            let ba = ctx.ba_delta(b, a)?;
            Ok((
                ab == delta && ba == delta,
                json!({"ab": ab.to_string(), "ba": ba.to_string(), "expected": delta.to_string()}),
            ))
        },
    )?;
    checks.extend(sweep(
        classes,
        |nn| format!("lift N={nn}"),
        |nn| equal(ctx.omega(&ctx.lift_section(nn)?)?, ctx.target().basis(nn)?),
    )?);
    Ok(checks)
}

/// Commutativity and associativity on products of order at most `p^max`,
/// and the generator round trip on every class, all in `H_n`.
pub fn shimura_checks(ctx: &OmegaContext, max: u32) -> Result<Vec<Check>> {
    let h = ctx.target();
    let classes = partitions_up_to(max, h.n());
    let mut checks = sweep(
        bounded_pairs(&classes, max),
        |(x, y)| format!("commute {x}*{y}"),
        |(x, y)| equal(h.multiply_basis(x, y)?, h.multiply_basis(y, x)?),
    )?;
    let triples: Vec<(Partition, Partition, Partition)> = bounded_pairs(&classes, max)
        .into_iter()
        .flat_map(|(x, y)| {
            classes
                .iter()
                .filter(|z| x.order_exponent() + y.order_exponent() + z.order_exponent() <= max)
                .map(|z| (x.clone(), y.clone(), z.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    checks.extend(sweep(
        triples,
        |(x, y, z)| format!("assoc {x}*{y}*{z}"),
        |(x, y, z)| {
            let left = h.multiply(&h.multiply_basis(x, y)?, &h.basis(z)?)?;
            let right = h.multiply(&h.basis(x)?, &h.multiply_basis(y, z)?)?;
            equal(left, right)
        },
    )?);
    checks.extend(sweep(
        classes,
        |m| format!("generators {m}"),
        |m| {
            let x = h.basis(m)?;
            let q = h.decompose_in_generators(&x)?;
            let back = h.eval_generator_poly(&q)?;
            Ok((
                back == x,
                json!({"poly": q.to_string(), "eval": back.to_string()}),
            ))
        },
    )?);
    Ok(checks)
}

fn variant(ctx: &OmegaContext, split: Split, truncation: Truncation) -> Result<OmegaContext> {
    Ok(OmegaContext::new(ctx.p(), ctx.n())?
        .with_budget(ctx.budget())
        .with_memo(ctx.memo().clone())
        .with_split(split)
        .with_truncation(truncation))
}

/// Shortcuts against brute force:
/// - the fixed-representative Hall count against `|K_n| / |m_n(L)|`;
/// - `a_n` under the other split and one more level of truncation, plus
///   its support;
/// - `|J_n(p^r, N)|` for every subgroup `N` of `V[p^r]`;
/// - the closed-form subgroup count and `embeds` against enumeration.
pub fn oracle_checks(ctx: &OmegaContext, max: u32) -> Result<Vec<Check>> {
    let h = ctx.target();
    let classes = partitions_up_to(max, h.n());
    let triples: Vec<(Partition, Partition, Partition)> = classes
        .iter()
        .flat_map(|l| {
            let subs = l.sub_partitions();
            let mut out = Vec::new();
            for m in &subs {
                for nn in &subs {
                    if m.order_exponent() + nn.order_exponent() == l.order_exponent() {
                        out.push((m.clone(), nn.clone(), l.clone()));
                    }
                }
            }
            out
        })
        .collect();
    let mut checks = sweep(
        triples,
        |(m, nn, l)| format!("hall M={m} N={nn} L={l}"),
        |(m, nn, l)| equal(h.c_coeff(m, nn, l)?, h.c_coeff_verified(m, nn, l)?),
    )?;

    let other_split = match ctx.split() {
        Split::First => Split::Last,
        Split::Last => Split::First,
    };
    let deeper = match ctx.truncation() {
        Truncation::Minimal => Truncation::Extra(1),
        Truncation::Extra(k) => Truncation::Extra(k + 1),
        Truncation::AtLeast(r) => Truncation::AtLeast(r + 1),
    };
    let swapped = variant(ctx, other_split, ctx.truncation())?;
    let deepened = variant(ctx, ctx.split(), deeper)?;
    let a_pairs: Vec<(Partition, Partition)> = partitions_up_to(max, ctx.n() + 1)
        .into_iter()
        .flat_map(|m| classes.iter().map(move |nn| (m.clone(), nn.clone())))
        .collect();
    checks.extend(sweep(
        a_pairs,
        |(m, nn)| format!("a M={m} N={nn}"),
        |(m, nn)| {
            let a = ctx.a_coeff(m, nn)?;
            let other = swapped.a_coeff(m, nn)?;
            let deep = deepened.a_coeff(m, nn)?;
            Ok((
                a == other && a == deep && (a.is_zero() || embeds(nn, m)),
                json!({"a": a.to_string(), "other split": other.to_string(), "deeper truncation": deep.to_string()}),
            ))
        },
    )?);

    for r in 1..=max {
        let mut subs = ctx.subgroups_of_v(r)?;
        subs.retain(|nn| nn.log_order() <= r);
        checks.extend(sweep(
            subs,
            |nn| format!("j r={r} N={:?}", nn.basis().to_rows()),
            |nn| {
                let count = ctx.j_count(r, nn)?;
                Ok((
                    true,
                    json!({"type": type_of(nn), "count": count.to_string()}),
                ))
            },
        )?);
    }

    let all_types = partitions_up_to(max, max as usize);
    checks.extend(sweep(
        all_types.clone(),
        |lambda| format!("subgroups of {lambda}"),
        |lambda| {
            let mut present = Vec::new();
            let mut mismatched = Vec::new();
            for k in 0..=lambda.order_exponent() {
                for (mu, count) in subgroup_type_counts(lambda, k, ctx.p(), ctx.budget())? {
                    if BigInt::from(count) != count_of_type_closed_form(lambda, &mu, ctx.p()) {
                        mismatched.push(mu.to_string());
                    }
                    present.push(mu);
                }
            }
            let embeds_agree = all_types
                .iter()
                .all(|mu| embeds(mu, lambda) == present.contains(mu));
            Ok((
                embeds_agree && mismatched.is_empty(),
                json!({"types": present.len(), "closed-form mismatches": mismatched}),
            ))
        },
    )?);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_small_scale() {
        let ctx = OmegaContext::new(2, 1).unwrap();
        for suite in Suite::ALL {
            let rep = run_suite(&ctx, suite, 2).unwrap();
            assert!(rep.passed(), "{}", rep.summary_line());
            assert!(!rep.checks.is_empty());
            assert_eq!(rep.to_json_value()["pass"], json!(true));
        }
    }

    #[test]
    fn results_are_deterministic() {
        let labels = |ctx: &OmegaContext| -> Vec<String> {
            hom_checks(ctx, 2)
                .unwrap()
                .into_iter()
                .map(|c| c.label)
                .collect()
        };
        let a = labels(&OmegaContext::new(3, 1).unwrap());
        let b = labels(&OmegaContext::new(3, 1).unwrap());
        assert_eq!(a, b);
        assert_eq!(a[0], "hom M1=[] M2=[]");
    }

    #[test]
    fn suite_names() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn failures_are_reported_not_raised() {
        let checks = sweep(
            vec![1, 2],
            |x| format!("cell {x}"),
            |&x| {
                if x == 2 {
                    Err(Error::Verification("boom".into()))
                } else {
                    Ok((true, Value::Null))
                }
            },
        )
        .unwrap();
        assert!(checks[0].pass && !checks[1].pass);
        assert_eq!(checks[1].label, "cell 2");
        let err = sweep(vec![1], |_| String::new(), |_| Err(Error::NotPrime(4)));
        assert!(err.is_err());
    }
}
