use hecke_core::pgroups::{embeds, partitions_of, partitions_up_to};
use hecke_core::{OmegaContext, Partition, Result};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::Output;

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum TableKind {
    /// Structure constants c_n(M,N;L).
    C,
    /// Coefficients a_n(M,N) of omega.
    A,
    /// Inverse coefficients b_n(B,A).
    B,
    /// Images of basis classes under omega.
    Omega,
}

/// A rectangular table whose leading columns hold partitions and whose last
/// column holds an integer.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<(Vec<Partition>, BigInt)>,
}

fn classes(max: u32, rank: usize) -> Vec<Partition> {
    partitions_up_to(max, rank)
        .into_iter()
        .filter(|m| !m.is_trivial())
        .collect()
}

fn c_table(ctx: &OmegaContext, max: u32) -> Result<Table> {
    let h = ctx.target();
    let mut rows = Vec::new();
    for l in classes(max, h.n()) {
        for k in 0..=l.order_exponent() {
            for m in partitions_of(k, h.n())
                .into_iter()
                .filter(|m| embeds(m, &l))
            {
                for nn in partitions_of(l.order_exponent() - k, h.n()) {
                    if embeds(&nn, &l) {
                        let c = h.c_coeff(&m, &nn, &l)?;
                        rows.push((vec![m.clone(), nn, l.clone()], c));
                    }
                }
            }
        }
    }
    Ok(Table {
        header: vec!["M", "N", "L", "c"],
        rows,
    })
}

fn a_table(ctx: &OmegaContext, max: u32) -> Result<Table> {
    let mut rows = Vec::new();
    for m in classes(max, ctx.n() + 1) {
        for nn in m
            .sub_partitions()
            .into_iter()
            .filter(|x| x.p_rank() <= ctx.n())
        {
            let a = ctx.a_coeff(&m, &nn)?;
            rows.push((vec![m.clone(), nn], a));
        }
    }
    Ok(Table {
        header: vec!["M", "N", "a"],
        rows,
    })
}

fn b_table(ctx: &OmegaContext, max: u32) -> Result<Table> {
    let mut rows = Vec::new();
    for b in classes(max, ctx.n()) {
        for a in b.sub_partitions() {
            let v = ctx.b_coeff(&b, &a)?;
            rows.push((vec![b.clone(), a], v));
        }
    }
    Ok(Table {
        header: vec!["B", "A", "b"],
        rows,
    })
}

fn omega_table(ctx: &OmegaContext, max: u32) -> Result<Vec<(Partition, hecke_core::HeckeElement)>> {
    classes(max, ctx.n() + 1)
        .into_iter()
        .map(|m| ctx.omega_basis(&m).map(|x| (m, x)))
        .collect()
}

fn render_table(ctx: &OmegaContext, kind: &str, table: Table, output: Output) -> String {
    match output {
        Output::Text => {
            let mut out = String::new();
            for (args, v) in &table.rows {
                let args: Vec<String> = args.iter().map(|m| m.to_string()).collect();
                out.push_str(&format!("{kind}({}) = {v}\n", args.join(",")));
            }
            out
        }
        Output::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).expect("in-memory write");
            for (args, v) in &table.rows {
                let mut rec: Vec<String> = args.iter().map(|m| m.to_string()).collect();
                rec.push(v.to_string());
                w.write_record(&rec).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
        }
        Output::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|(args, v)| {
                    let mut row = Map::new();
                    for (name, m) in table.header.iter().zip(args) {
                        row.insert(name.to_string(), json!(m));
                    }
                    row.insert(table.header[args.len()].to_string(), json!(v.to_string()));
                    Value::Object(row)
                })
                .collect();
            let doc = json!({"p": ctx.p(), "n": ctx.n(), "kind": kind, "rows": rows});
            format!("{doc}\n")
        }
    }
}

pub fn run(ctx: &OmegaContext, kind: TableKind, max: u32, output: Output) -> Result<String> {
    let (name, table) = match kind {
        TableKind::C => ("c", c_table(ctx, max)?),
        TableKind::A => ("a", a_table(ctx, max)?),
        TableKind::B => ("b", b_table(ctx, max)?),
        TableKind::Omega => return Ok(render_omega(ctx, omega_table(ctx, max)?, output)),
    };
    Ok(render_table(ctx, name, table, output))
}

fn render_omega(
    ctx: &OmegaContext,
    entries: Vec<(Partition, hecke_core::HeckeElement)>,
    output: Output,
) -> String {
    match output {
        Output::Text => entries
            .iter()
            .map(|(m, x)| format!("omega({m}) = {x}\n"))
            .collect(),
        Output::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["M", "N", "coeff"])
                .expect("in-memory write");
            for (m, x) in &entries {
                for (nn, c) in x.display_terms() {
                    w.write_record([m.to_string(), nn.to_string(), c.to_string()])
                        .expect("in-memory write");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
        }
        Output::Json => {
            let entries: Vec<Value> = entries
                .iter()
                .map(|(m, x)| json!({"M": m, "image": x.to_json_value()["terms"]}))
                .collect();
            format!(
                "{}\n",
                json!({"p": ctx.p(), "n": ctx.n(), "entries": entries})
            )
        }
    }
}
