use clap::Args;
use orbitcodes::census::{run_census, CensusConfig};
use orbitcodes::usg::{ClosedFormCounts, UsgFamily};

use crate::error::CliError;
use crate::output::{joined, opt, Block, Report};
use crate::{FamilyArgs, Verify};

#[derive(Debug, Args)]
pub struct CensusCmd {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `none`: counts only; `fast`: distances from f_α kernels; `brute`: full
    /// orbit profiles, shift scans and Galois action.
    #[arg(long, value_enum, default_value_t = Verify::None)]
    pub verify: Verify,
}

/// CSV column order of the row block.
pub const ROW_COLUMNS: [&str; 9] = [
    "s",
    "ell",
    "classification",
    "contains_q2_shift",
    "frobenius_group_order",
    "frobenius_orbit_size",
    "distance",
    "lambda",
    "r_param",
];

fn totals_row(label: &str, c: &ClosedFormCounts) -> Vec<String> {
    vec![
        label.into(),
        c.total.to_string(),
        c.quasi_optimal.to_string(),
        c.optimal.to_string(),
        c.with_q2_shift.to_string(),
    ]
}

pub fn run(c: &CensusCmd, budget: u128) -> Result<Report, CliError> {
    let f = &c.family;
    let fam = UsgFamily::new(f.p, f.h, f.k)?;
    let cfg = CensusConfig {
        verify: c.verify.into(),
        budget,
        modulus: f.modulus.clone(),
    };
    let census = run_census(&fam, &cfg)?;

    let mut rows = Block::new(&ROW_COLUMNS);
    for r in &census.rows {
        rows.push(vec![
            r.s.to_string(),
            r.ell.to_string(),
            crate::output::to_value(r.classification)?.as_str().unwrap_or_default().into(),
            r.contains_q2_shift.to_string(),
            r.frobenius_group_order.to_string(),
            r.frobenius_orbit_size.to_string(),
            opt(&r.distance),
            r.lambda.as_deref().map(joined).unwrap_or_default(),
            opt(&r.r_param),
        ]);
    }
    let mut totals = Block::new(&["block", "total", "quasi_optimal", "optimal", "with_q2_shift"]);
    totals.push(totals_row("closed_form", &census.closed_forms));
    if let Some(t) = &census.tallies {
        totals.push(totals_row(
            "tally",
            &ClosedFormCounts {
                total: t.total,
                quasi_optimal: t.quasi_optimal,
                optimal: t.optimal,
                with_q2_shift: t.with_q2_shift,
            },
        ));
    }
    let mut hist = Block::new(&["frobenius_orbit_size", "orbits"]);
    for (size, count) in &census.frobenius.histogram {
        hist.push(vec![size.to_string(), count.to_string()]);
    }
    let mut breakdown = Block::new(&["orbit_size", "classification", "contains_q2_shift", "lambda_2", "orbits"]);
    for b in &census.breakdown {
        breakdown.push(vec![
            b.orbit_size.to_string(),
            crate::output::to_value(b.classification)?.as_str().unwrap_or_default().into(),
            b.contains_q2_shift.to_string(),
            opt(&b.lambda_2),
            b.orbits.to_string(),
        ]);
    }

    let cf = &census.closed_forms;
    let failures = census.mismatches.clone();
    let mut r = Report::new("census-usg", &census)?
        .summary("q", fam.q())
        .summary("k", fam.k)
        .summary("total", cf.total)
        .summary("quasi_optimal", cf.quasi_optimal)
        .summary("optimal", cf.optimal)
        .summary("with_q2_shift", cf.with_q2_shift)
        .summary("ell_hat", joined(&census.frobenius.ell_hat))
        .summary("i_hat", joined(&census.frobenius.i_hat));
    if census.rows.is_empty() {
        r.blocks = vec![totals, hist];
    } else {
        r.blocks = vec![rows, totals, hist, breakdown];
    }
    if c.verify != Verify::None {
        r.field = Some(orbitcodes::field::FieldDescriptor {
            p: f.p,
            h: f.h,
            n: fam.n(),
            modulus: Some(match &f.modulus {
                Some(m) => m.clone(),
                None => orbitcodes::field::default_modulus(f.p, f.h * fam.n())?,
            }),
        });
    }
    r.failures = failures;
    Ok(r)
}
