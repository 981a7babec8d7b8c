use clap::Args;
use orbitcodes::equivalence::{frobenius_group, frobenius_group_by_action, frobenius_structure, FrobeniusReport};
use orbitcodes::field::TABLE_LIMIT;
use orbitcodes::usg::{UsGammaParams, UsgFamily};
use orbitcodes::{build_field, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_budget, CliError};
use crate::output::{joined, Block, Report};
use crate::FamilyArgs;

#[derive(Debug, Args)]
pub struct FrobeniusCmd {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Compare every representative's group against explicit Galois action,
    /// when F_{q^{2k}} fits the field table limit.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum VerifyStatus {
    NotRequested,
    Skipped,
    Pass,
    Fail,
}

#[derive(Debug, Serialize)]
struct Verification {
    status: VerifyStatus,
    detail: String,
    checked: u64,
    mismatches: Vec<String>,
}

#[derive(Debug, Serialize)]
struct FrobeniusPayload {
    report: FrobeniusReport,
    verification: Verification,
}

/// Representatives times `hn` Galois images times one orbit scan each.
fn action_work(fam: &UsgFamily) -> u128 {
    let points = fam.group_order() / (fam.q() - 1);
    fam.closed_form_counts().total * (fam.h * fam.n()) as u128 * points
}

fn verify(fam: &UsgFamily, report: &FrobeniusReport, modulus: Option<&[u32]>, budget: u128) -> Result<Verification, CliError> {
    let order = fam.group_order() + 1;
    if order > TABLE_LIMIT as u128 {
        return Ok(Verification {
            status: VerifyStatus::Skipped,
            detail: format!("field order {order} exceeds the table limit {TABLE_LIMIT}"),
            checked: 0,
            mismatches: Vec::new(),
        });
    }
    check_budget(action_work(fam), budget)?;
    let ctx = build_field(fam.p, fam.h, fam.n(), modulus)?;
    let reps: Vec<UsGammaParams> = fam.representatives().collect();
    let results: Vec<Option<String>> = reps
        .par_iter()
        .map(|&par| -> Result<Option<String>, Error> {
            let by_formula = frobenius_group(report, par);
            let by_action = frobenius_group_by_action(&ctx, par)?;
            Ok((by_formula != by_action).then(|| {
                format!(
                    "(s={}, ell={}): formula generator {}, action generator {}",
                    par.s, par.ell, by_formula.generator, by_action.generator
                )
            }))
        })
        .collect::<Result<_, _>>()?;
    let mismatches: Vec<String> = results.into_iter().flatten().collect();
    Ok(Verification {
        status: if mismatches.is_empty() { VerifyStatus::Pass } else { VerifyStatus::Fail },
        detail: "Frobenius group from ℓ̂ against explicit Galois action".into(),
        checked: reps.len() as u64,
        mismatches,
    })
}

pub fn run(c: &FrobeniusCmd, budget: u128) -> Result<Report, CliError> {
    let f = &c.family;
    let fam = UsgFamily::new(f.p, f.h, f.k)?;
    let report = frobenius_structure(&fam)?;
    let verification = if c.verify {
        verify(&fam, &report, f.modulus.as_deref(), budget)?
    } else {
        Verification {
            status: VerifyStatus::NotRequested,
            detail: String::new(),
            checked: 0,
            mismatches: Vec::new(),
        }
    };

    let mut ell = Block::new(&["i", "ell_hat", "in_i_set", "in_i_hat", "alpha", "group_count"]);
    for (idx, l) in report.ell_hat.iter().enumerate() {
        let i = idx as u32 + 1;
        ell.push(vec![
            i.to_string(),
            l.to_string(),
            report.i_set.contains(&i).to_string(),
            report.i_hat.contains(&i).to_string(),
            report.alpha_counts.get(&i).map(|a| a.to_string()).unwrap_or_default(),
            report.group_counts.get(&i).map(|a| a.to_string()).unwrap_or_default(),
        ]);
    }
    let mut hist = Block::new(&["frobenius_orbit_size", "orbits"]);
    for (size, count) in &report.histogram {
        hist.push(vec![size.to_string(), count.to_string()]);
    }
    let failures = verification.mismatches.clone();
    let mut r = Report::new("frobenius", FrobeniusPayload {
        report: report.clone(),
        verification,
    })?
    .summary("total", report.total)
    .summary("trivial_count", report.trivial_count)
    .summary("i_set", joined(&report.i_set))
    .summary("i_hat", joined(&report.i_hat));
    if let Some(v) = r.payload.pointer("/verification/status").and_then(|v| v.as_str()) {
        r.summary.push(("verification".into(), v.to_string()));
    }
    r.blocks = vec![ell, hist];
    r.failures = failures;
    Ok(r)
}
