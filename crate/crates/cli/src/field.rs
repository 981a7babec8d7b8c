use clap::{Args, ValueEnum};
use orbitcodes::arith::divisors;
use orbitcodes::field::{ArithOp, FieldCtx, FieldElem, Operand, TraceOrNorm};
use orbitcodes::{build_field, Error};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{Block, Report};
use crate::FieldArgs;

#[derive(Debug, Args)]
pub struct FieldCmd {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Operation to evaluate on `--a` and `--b`.
    #[arg(long, value_enum, requires = "a")]
    pub op: Option<Op>,
    /// First operand, "0" or "w^e".
    #[arg(long)]
    pub a: Option<String>,
    /// Second operand: an element, or an integer exponent for `pow`.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Elements to describe (log, coordinates, traces and norms).
    #[arg(long = "elem")]
    pub elems: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
    Pow,
}

#[derive(Debug, Serialize)]
struct Descriptor {
    p: u32,
    h: u32,
    n: u32,
    m: u32,
    q: u64,
    order: u64,
    modulus: Vec<u32>,
    subfield_degrees: Vec<u32>,
}

#[derive(Debug, Serialize)]
struct ElemInfo {
    elem: FieldElem,
    coords: Vec<u8>,
    /// Smallest `d` with the element in `F_{p^d}`.
    degree: u32,
    abs_trace: u32,
    trace_to_q: FieldElem,
    norm_to_q: FieldElem,
}

#[derive(Debug, Serialize)]
struct Evaluation {
    op: String,
    a: FieldElem,
    b: Option<String>,
    result: FieldElem,
}

#[derive(Debug, Serialize)]
struct FieldReport {
    field: Descriptor,
    elements: Vec<ElemInfo>,
    evaluation: Option<Evaluation>,
}

pub fn build(f: &FieldArgs) -> Result<FieldCtx, CliError> {
    Ok(build_field(f.p, f.h, f.n, f.modulus.as_deref())?)
}

fn describe(ctx: &FieldCtx, e: FieldElem) -> Result<ElemInfo, CliError> {
    let m = ctx.m();
    let degree = divisors(m)
        .into_iter()
        .find(|&d| ctx.subfield_test(e, d).unwrap_or(false))
        .unwrap_or(m);
    Ok(ElemInfo {
        elem: e,
        coords: ctx.coords(e),
        degree,
        abs_trace: ctx.abs_trace(e),
        trace_to_q: ctx.rel_trace_norm(TraceOrNorm::Trace, e, m, ctx.h())?,
        norm_to_q: ctx.rel_trace_norm(TraceOrNorm::Norm, e, m, ctx.h())?,
    })
}

fn evaluate(ctx: &FieldCtx, op: Op, a: &str, b: Option<&str>) -> Result<Evaluation, CliError> {
    let a_el = ctx.parse_elem(a)?;
    let need_b = || b.ok_or_else(|| CliError::Usage(format!("--op {op:?} needs --b").to_lowercase()));
    let result = match op {
        Op::Inv => ctx.arith(ArithOp::Inv, a_el, None)?,
        Op::Neg => ctx.arith(ArithOp::Neg, a_el, None)?,
        Op::Pow => {
            let k: i64 = need_b()?
                .parse()
                .map_err(|_| Error::Parse(format!("exponent {:?} is not an integer", b.unwrap_or(""))))?;
            ctx.arith(ArithOp::Pow, a_el, Some(Operand::Int(k)))?
        }
        Op::Add => ctx.arith(ArithOp::Add, a_el, Some(Operand::Elem(ctx.parse_elem(need_b()?)?)))?,
        Op::Mul => ctx.arith(ArithOp::Mul, a_el, Some(Operand::Elem(ctx.parse_elem(need_b()?)?)))?,
        Op::Sub => ctx.sub(a_el, ctx.parse_elem(need_b()?)?),
        Op::Div => ctx.div(a_el, ctx.parse_elem(need_b()?)?)?,
    };
    Ok(Evaluation {
        op: format!("{op:?}").to_lowercase(),
        a: a_el,
        b: b.map(str::to_string),
        result,
    })
}

pub fn run(c: &FieldCmd) -> Result<Report, CliError> {
    let ctx = build(&c.field)?;
    let desc = Descriptor {
        p: ctx.p(),
        h: ctx.h(),
        n: ctx.n(),
        m: ctx.m(),
        q: ctx.q(),
        order: ctx.order(),
        modulus: ctx.modulus().to_vec(),
        subfield_degrees: divisors(ctx.m()),
    };
    let elements = c
        .elems
        .iter()
        .map(|s| describe(&ctx, ctx.parse_elem(s)?))
        .collect::<Result<Vec<_>, _>>()?;
    let evaluation = match c.op {
        Some(op) => Some(evaluate(&ctx, op, c.a.as_deref().unwrap_or(""), c.b.as_deref())?),
        None => None,
    };

    let mut fields = Block::new(&["key", "value"]);
    for (k, v) in [
        ("p", desc.p.to_string()),
        ("h", desc.h.to_string()),
        ("n", desc.n.to_string()),
        ("q", desc.q.to_string()),
        ("order", desc.order.to_string()),
        ("modulus", crate::output::joined(&desc.modulus)),
    ] {
        fields.push(vec![k.into(), v]);
    }
    let mut elems = Block::new(&["elem", "coords", "degree", "abs_trace", "trace_to_q", "norm_to_q"]);
    for e in &elements {
        elems.push(vec![
            e.elem.to_string(),
            crate::output::joined(&e.coords),
            e.degree.to_string(),
            e.abs_trace.to_string(),
            e.trace_to_q.to_string(),
            e.norm_to_q.to_string(),
        ]);
    }
    let mut r = Report::new(
        "field",
        FieldReport {
            field: desc,
            elements,
            evaluation,
        },
    )?;
    r.field = Some(ctx.descriptor());
    if let Some(ev) = r.payload.get("evaluation").filter(|v| !v.is_null()) {
        r.summary.push(("result".into(), ev["result"].as_str().unwrap_or_default().to_string()));
    }
    r.blocks.push(fields);
    if !c.elems.is_empty() {
        r.blocks.push(elems);
    }
    Ok(r)
}
