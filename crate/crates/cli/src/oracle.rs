use std::collections::HashSet;

use clap::{Args, ValueEnum};
use orbitcodes::arith::pow_u128;
use orbitcodes::equivalence::{frobenius_isometry_test, galois_action_oracle, orbit_contains};
use orbitcodes::field::FieldCtx;
use orbitcodes::linear_set::{fu_from_linear_set, from_sweep};
use orbitcodes::orbit::{contains_q2_shift_scan, fractions_oracle, intersection_sweep, profile_from_sweep, sidon_test};
use orbitcodes::usg::{make_usg, FAlpha, UsGammaParams, UsgFamily};
use orbitcodes::{build_field, Error, Subspace};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_budget, CliError};
use crate::output::{Block, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    /// Sidon quadruple test against full length with d = 2k - 2.
    Sidon,
    /// f_α kernel dimension against dim(U ∩ αU), every α.
    Falpha,
    /// Fraction count against the linear-set size and the λ-sum.
    Fractions,
    /// Frobenius-isometry criterion against explicit Galois action.
    Galois,
    /// F_{q^2}-shift criterion against a direct search.
    Shift,
}

#[derive(Debug, Args)]
pub struct OracleCmd {
    #[arg(value_enum)]
    pub which: OracleKind,
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub h: u32,
    /// Instances are the U_{s,γ} representatives in F_{q^{2k}}.
    #[arg(long, conflicts_with_all = ["n", "dim"])]
    pub k: Option<u32>,
    /// With `--dim`: instances are all subspaces of that dimension through 1
    /// in F_{q^n}, which meet every orbit.
    #[arg(long, requires = "dim")]
    pub n: Option<u32>,
    #[arg(long, requires = "n")]
    pub dim: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Debug, Serialize)]
struct OracleReport {
    oracle: OracleKind,
    instance_set: &'static str,
    instances: u64,
    comparisons: u64,
    /// Instances where the property under test holds.
    positives: u64,
    mismatches: Vec<String>,
}

struct Tally {
    comparisons: u64,
    positives: u64,
    mismatches: Vec<String>,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.comparisons += o.comparisons;
        self.positives += o.positives;
        self.mismatches.extend(o.mismatches);
        self
    }

    fn empty() -> Tally {
        Tally {
            comparisons: 0,
            positives: 0,
            mismatches: Vec::new(),
        }
    }
}

enum Instances {
    Usg(UsgFamily, Vec<UsGammaParams>),
    All(Vec<Subspace>),
}

fn points(ctx: &FieldCtx) -> u128 {
    ctx.group_order() as u128 / (ctx.q() as u128 - 1)
}

/// All `d`-dimensional subspaces containing 1, grown one generator at a time.
fn subspaces_through_one(ctx: &FieldCtx, d: u32, budget: u128) -> Result<Vec<Subspace>, CliError> {
    if d == 0 || d > ctx.n() {
        return Err(Error::InvalidParams(format!("dimension {d} outside 1..={}", ctx.n())).into());
    }
    let mut level = vec![Subspace::span(ctx, &[ctx.one()], ctx.h())?];
    for _ in 1..d {
        check_budget(level.len() as u128 * ctx.group_order() as u128, budget)?;
        let mut next = HashSet::new();
        for s in &level {
            for x in ctx.nonzero() {
                if !s.contains(ctx, x) {
                    next.insert(s.sum(&Subspace::span(ctx, &[x], ctx.h())?)?);
                }
            }
        }
        let mut v: Vec<Subspace> = next.into_iter().collect();
        v.sort_by_cached_key(|s| s.to_wire(ctx).basis);
        level = v;
    }
    Ok(level)
}

fn subspace_label(ctx: &FieldCtx, u: &Subspace) -> String {
    let b: Vec<String> = u.to_wire(ctx).basis.iter().map(|e| e.to_string()).collect();
    format!("⟨{}⟩", b.join(", "))
}

fn usg_label(par: UsGammaParams) -> String {
    format!("(s={}, ell={})", par.s, par.ell)
}

fn sidon_one(ctx: &FieldCtx, u: &Subspace, label: &str) -> Result<Tally, Error> {
    let sweep = intersection_sweep(ctx, u)?;
    let prof = profile_from_sweep(ctx, u, &sweep)?;
    let expected = prof.flags.full_length && prof.distance == Some(2 * prof.k - 2);
    let got = sidon_test(ctx, u);
    Ok(Tally {
        comparisons: 1,
        positives: got as u64,
        mismatches: if got != expected {
            vec![format!("{label}: quadruple test {got}, optimal full length {expected}")]
        } else {
            Vec::new()
        },
    })
}

fn fractions_one(ctx: &FieldCtx, u: &Subspace, label: &str) -> Result<Tally, Error> {
    let sweep = intersection_sweep(ctx, u)?;
    let prof = profile_from_sweep(ctx, u, &sweep)?;
    let oracle = fractions_oracle(ctx, u);
    let linear = fu_from_linear_set(&from_sweep(ctx, &sweep))?;
    let lambda = prof.stab_points() + prof.lambda[1..].iter().sum::<u64>();
    let ok = oracle == linear && linear == lambda;
    Ok(Tally {
        comparisons: 1,
        positives: ok as u64,
        mismatches: if ok {
            Vec::new()
        } else {
            vec![format!("{label}: oracle {oracle}, linear set {linear}, λ-sum {lambda}")]
        },
    })
}

fn falpha_one(ctx: &FieldCtx, par: UsGammaParams) -> Result<Tally, Error> {
    let u = make_usg(ctx, par)?;
    let fa = FAlpha::new(ctx, par)?;
    let k = u.dim();
    let mut t = Tally::empty();
    for a in ctx.nonzero() {
        let kd = fa.kernel_dim(a)?;
        let direct = u.intersect_dim(&u.scalar_shift(ctx, a)?)?;
        t.comparisons += 1;
        t.positives += (direct > 0) as u64;
        if kd.dim != direct || kd.stabilizer != (direct == k) {
            t.mismatches.push(format!(
                "{} α={a}: kernel {} (stabilizer {}), intersection {direct}",
                usg_label(par),
                kd.dim,
                kd.stabilizer
            ));
        }
    }
    Ok(t)
}

fn shift_one(ctx: &FieldCtx, fam: &UsgFamily, par: UsGammaParams) -> Result<Tally, Error> {
    let criterion = fam.contains_q2_shift(par)?;
    let direct = contains_q2_shift_scan(ctx, &make_usg(ctx, par)?);
    Ok(Tally {
        comparisons: 1,
        positives: direct as u64,
        mismatches: if criterion != direct {
            vec![format!("{}: criterion {criterion}, direct search {direct}", usg_label(par))]
        } else {
            Vec::new()
        },
    })
}

/// For each Galois image `σ^i(U_a)`, the set of `b` the criterion accepts must
/// be exactly the `b` whose orbit contains the image.
fn galois_one(ctx: &FieldCtx, fam: &UsgFamily, reps: &[UsGammaParams], spaces: &[Subspace], a: usize) -> Result<Tally, Error> {
    let mut t = Tally::empty();
    for i in 0..ctx.m() {
        let image = galois_action_oracle(ctx, &spaces[a], i);
        for (b, &pb) in reps.iter().enumerate() {
            let criterion = frobenius_isometry_test(fam, reps[a], pb, i)?;
            let action = orbit_contains(ctx, &spaces[b], &image)?;
            t.comparisons += 1;
            t.positives += action as u64;
            if criterion != action {
                t.mismatches.push(format!(
                    "σ^{i}{} vs {}: criterion {criterion}, action {action}",
                    usg_label(reps[a]),
                    usg_label(pb)
                ));
            }
        }
    }
    Ok(t)
}

pub fn run(c: &OracleCmd, budget: u128) -> Result<Report, CliError> {
    let (ctx, instances) = match (c.k, c.n, c.dim) {
        (Some(k), _, _) => {
            let fam = UsgFamily::new(c.p, c.h, k)?;
            let ctx = build_field(c.p, c.h, fam.n(), c.modulus.as_deref())?;
            let reps = fam.representatives().collect();
            (ctx, Instances::Usg(fam, reps))
        }
        (None, Some(n), Some(d)) => {
            if matches!(c.which, OracleKind::Falpha | OracleKind::Galois | OracleKind::Shift) {
                return Err(CliError::Usage(format!("{:?} needs the U_{{s,γ}} instance set (--k)", c.which).to_lowercase()));
            }
            let ctx = build_field(c.p, c.h, n, c.modulus.as_deref())?;
            let all = subspaces_through_one(&ctx, d, budget)?;
            (ctx, Instances::All(all))
        }
        _ => return Err(CliError::Usage("give --k, or --n with --dim".into())),
    };

    let q = ctx.q() as u128;
    let (count, k) = match &instances {
        Instances::Usg(fam, reps) => (reps.len() as u128, fam.k),
        Instances::All(v) => (v.len() as u128, c.dim.unwrap_or(1)),
    };
    let qk = pow_u128(q, k);
    let per_instance = match c.which {
        OracleKind::Sidon | OracleKind::Fractions => points(&ctx) * qk + qk * qk,
        OracleKind::Falpha => ctx.group_order() as u128 * qk,
        OracleKind::Shift => points(&ctx) * qk,
        OracleKind::Galois => count * ctx.m() as u128 * points(&ctx),
    };
    check_budget(count * per_instance, budget)?;

    let tally = match (&instances, c.which) {
        (Instances::All(v), OracleKind::Sidon | OracleKind::Fractions) => v
            .par_iter()
            .map(|u| {
                let label = subspace_label(&ctx, u);
                if c.which == OracleKind::Sidon {
                    sidon_one(&ctx, u, &label)
                } else {
                    fractions_one(&ctx, u, &label)
                }
            })
            .try_reduce(Tally::empty, |a, b| Ok(a.merge(b)))?,
        (Instances::Usg(fam, reps), which) => match which {
            OracleKind::Sidon | OracleKind::Fractions => reps
                .par_iter()
                .map(|&par| {
                    let u = make_usg(&ctx, par)?;
                    if which == OracleKind::Sidon {
                        sidon_one(&ctx, &u, &usg_label(par))
                    } else {
                        fractions_one(&ctx, &u, &usg_label(par))
                    }
                })
                .try_reduce(Tally::empty, |a, b| Ok(a.merge(b)))?,
            OracleKind::Falpha => reps
                .par_iter()
                .map(|&par| falpha_one(&ctx, par))
                .try_reduce(Tally::empty, |a, b| Ok(a.merge(b)))?,
            OracleKind::Shift => reps
                .par_iter()
                .map(|&par| shift_one(&ctx, fam, par))
                .try_reduce(Tally::empty, |a, b| Ok(a.merge(b)))?,
            OracleKind::Galois => {
                let spaces = reps
                    .iter()
                    .map(|&par| make_usg(&ctx, par))
                    .collect::<Result<Vec<_>, _>>()?;
                (0..reps.len())
                    .into_par_iter()
                    .map(|a| galois_one(&ctx, fam, reps, &spaces, a))
                    .try_reduce(Tally::empty, |a, b| Ok(a.merge(b)))?
            }
        },
        (Instances::All(_), _) => unreachable!("rejected above"),
    };
    let mut mismatches = tally.mismatches;
    mismatches.sort();

    let mut block = Block::new(&["mismatch"]);
    for m in &mismatches {
        block.push(vec![m.clone()]);
    }
    let report = OracleReport {
        oracle: c.which,
        instance_set: match instances {
            Instances::Usg(..) => "usg",
            Instances::All(_) => "all_through_one",
        },
        instances: count as u64,
        comparisons: tally.comparisons,
        positives: tally.positives,
        mismatches: mismatches.clone(),
    };
    let mut r = Report::new("oracle", &report)?
        .summary("oracle", format!("{:?}", c.which).to_lowercase())
        .summary("instances", report.instances)
        .summary("comparisons", report.comparisons)
        .summary("positives", report.positives)
        .summary("mismatches", mismatches.len());
    r.field = Some(ctx.descriptor());
    r.blocks = vec![block];
    r.failures = mismatches;
    Ok(r)
}
