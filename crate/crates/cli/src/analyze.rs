use std::path::PathBuf;

use clap::Args;
use orbitcodes::arith::pow_u128;
use orbitcodes::field::{FieldCtx, FieldDescriptor, FieldElem};
use orbitcodes::linear_set::fu_from_linear_set;
use orbitcodes::orbit::{analyze, fractions_oracle, sidon_test, Analysis, Status};
use orbitcodes::subspace::SubspaceWire;
use orbitcodes::{Error, Subspace};
use serde::Serialize;

use crate::error::{check_budget, CliError};
use crate::output::{joined, opt, Block, Report};

#[derive(Debug, Args)]
pub struct AnalyzeCmd {
    /// Subspace file: a JSON field descriptor line, then one "w^e" basis
    /// element per line. Blank lines and lines starting with '#' are
    /// ignored. Use "-" for stdin.
    #[arg(conflicts_with_all = ["p", "n", "gens"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires_all = ["n", "gens"])]
    pub p: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub h: u32,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
    /// Basis elements over F_q, comma separated.
    #[arg(long = "gens", value_delimiter = ',')]
    pub gens: Vec<String>,
    /// Skip the duality check, which analyzes U^⊥ as well.
    #[arg(long)]
    pub no_duality: bool,
}

/// Independent recomputations next to the sweep-based analysis.
#[derive(Debug, Serialize)]
struct Oracles {
    /// `|{u/v}|` over the projective points of `U`, by direct enumeration.
    fractions_oracle: u64,
    /// `(|L_{U×U}| - 2)/(q - 1)`.
    fractions_linear_set: u64,
    /// `f_U` from the orbit profile, `s + Σλ_i`.
    fractions_lambda: u64,
    /// Quadruple test `ab = cd`.
    sidon: bool,
    /// Full length with `d = 2k - 2`.
    optimal_full_length: bool,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    subspace: SubspaceWire,
    analysis: Analysis,
    oracles: Oracles,
    all_pass: bool,
}

pub struct Input {
    pub descriptor: FieldDescriptor,
    pub gens: Vec<String>,
}

/// Parses the subspace file format.
pub fn parse_input(text: &str) -> Result<Input, CliError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing field descriptor line".into()))?;
    let descriptor: FieldDescriptor =
        serde_json::from_str(header).map_err(|e| Error::Parse(format!("field descriptor: {e}")))?;
    Ok(Input {
        descriptor,
        gens: lines.map(str::to_string).collect(),
    })
}

fn load(c: &AnalyzeCmd) -> Result<Input, CliError> {
    match (&c.input, c.p, c.n) {
        (Some(path), _, _) => {
            let text = if path.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io(e.to_string()))?
            } else {
                std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
            };
            parse_input(&text)
        }
        (None, Some(p), Some(n)) => Ok(Input {
            descriptor: FieldDescriptor {
                p,
                h: c.h,
                n,
                modulus: c.modulus.clone(),
            },
            gens: c.gens.clone(),
        }),
        _ => Err(CliError::Usage("give an input file or --p, --n and --gens".into())),
    }
}

/// The serialized name of a unit enum variant.
fn label(v: &impl Serialize) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Sweep over the projective points of `F_{q^n}` against `|U|`, plus the
/// pairwise fraction enumeration.
fn work(ctx: &FieldCtx, k: usize) -> u128 {
    let q = ctx.q() as u128;
    let qk = pow_u128(q, k as u32);
    (ctx.group_order() as u128 / (q - 1)) * qk + qk * qk
}

pub fn run(c: &AnalyzeCmd, budget: u128) -> Result<Report, CliError> {
    let input = load(c)?;
    let ctx = FieldCtx::from_descriptor(&input.descriptor)?;
    let gens = input
        .gens
        .iter()
        .map(|g| ctx.parse_elem(g))
        .collect::<Result<Vec<FieldElem>, _>>()?;
    let u = Subspace::span(&ctx, &gens, ctx.h())?;
    if u.is_zero() {
        return Err(Error::ZeroSubspace.into());
    }
    check_budget(work(&ctx, u.dim()), budget)?;

    let analysis = analyze(&ctx, &u, !c.no_duality)?;
    let prof = &analysis.profile;
    let oracles = Oracles {
        fractions_oracle: fractions_oracle(&ctx, &u),
        fractions_linear_set: fu_from_linear_set(&analysis.weights)?,
        fractions_lambda: prof.stab_points() + prof.lambda[1..].iter().sum::<u64>(),
        sidon: sidon_test(&ctx, &u),
        optimal_full_length: prof.flags.full_length && prof.distance == Some(2 * prof.k - 2),
    };
    let mut failures = analysis.failures();
    let fr = [oracles.fractions_oracle, oracles.fractions_linear_set, oracles.fractions_lambda, prof.f_u];
    if fr.iter().any(|&x| x != fr[0]) {
        failures.push(format!("fractions: oracle, linear set, λ-sum and profile disagree: {fr:?}"));
    }
    if prof.k >= 2 && oracles.sidon != oracles.optimal_full_length {
        failures.push(format!(
            "sidon: quadruple test {} but optimal full length {}",
            oracles.sidon, oracles.optimal_full_length
        ));
    }

    let mut profile = Block::new(&["key", "value"]);
    for (k, v) in [
        ("k", prof.k.to_string()),
        ("t", prof.t.to_string()),
        ("orbit_size", prof.orbit_size.to_string()),
        ("distance", opt(&prof.distance)),
        ("omega", joined(&prof.omega)),
        ("lambda", joined(&prof.lambda)),
        ("f_u", prof.f_u.to_string()),
        ("Q", prof.big_q.to_string()),
        ("full_length", prof.flags.full_length.to_string()),
        ("optimal", prof.flags.optimal.to_string()),
        ("quasi_optimal", prof.flags.quasi_optimal.to_string()),
        ("sidon", prof.flags.sidon.to_string()),
        ("contains_q2_shift", prof.flags.contains_q2_shift.to_string()),
        ("dim3_case", analysis.dim3_case.map(|d| label(&d)).unwrap_or_default()),
    ] {
        profile.push(vec![k.into(), v]);
    }
    let status = |s: Status| label(&s);
    let mut checks = Block::new(&["kind", "name", "status", "detail"]);
    for ch in &analysis.checks {
        checks.push(vec!["check".into(), ch.name.clone(), status(ch.status), ch.detail.clone()]);
    }
    for b in &analysis.bounds {
        checks.push(vec!["bound".into(), b.name.clone(), status(b.status), b.detail.clone()]);
    }

    let all_pass = failures.is_empty();
    let mut r = Report::new(
        "analyze",
        AnalyzeReport {
            subspace: u.to_wire(&ctx),
            analysis,
            oracles,
            all_pass,
        },
    )?
    .summary("dimension", u.dim())
    .summary("all_pass", all_pass);
    r.field = Some(ctx.descriptor());
    r.blocks = vec![profile, checks];
    r.failures = failures;
    Ok(r)
}
