//! Census of all codes `Orb(U_{s,γ})` for given `(p, h, k)`.
//!
//! Three verification levels:
//! - `None`: counts only, by congruences on `ell`; no field is built.
//! - `Fast`: one row per code; distances from `f_α` kernels.
//! - `Brute`: one row per code; full orbit profiles from subspace
//!   intersections, the direct `F_{q^2}`-shift scan, and Frobenius groups by
//!   explicit Galois action.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::pow_u128;
use crate::equivalence::{frobenius_group, frobenius_group_by_action, frobenius_orbit, frobenius_structure, FrobeniusReport};
use crate::error::{Error, Result};
use crate::field::{build_field, FieldCtx};
use crate::orbit::{self, contains_q2_shift_scan, orbit_profile, Status};
use crate::usg::{falpha_sweep, make_usg, ClosedFormCounts, UsGammaParams, UsgClass, UsgFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    None,
    Fast,
    Brute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub s: u32,
    pub ell: u64,
    pub classification: UsgClass,
    pub contains_q2_shift: bool,
    pub frobenius_group_order: u32,
    pub frobenius_orbit_size: u32,
    /// Minimum distance, when computed.
    pub distance: Option<usize>,
    /// `(λ_0, …, λ_ℓ)`, brute level only.
    pub lambda: Option<Vec<u64>>,
    pub r_param: Option<i64>,
}

impl CensusRow {
    pub fn params(&self) -> UsGammaParams {
        UsGammaParams { s: self.s, ell: self.ell }
    }

    pub fn lambda_2(&self) -> Option<u64> {
        self.lambda.as_ref().map(|l| l.get(2).copied().unwrap_or(0))
    }
}

/// Counts obtained by classifying every representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub total: u128,
    pub quasi_optimal: u128,
    pub optimal: u128,
    pub with_q2_shift: u128,
    /// Frobenius-orbit size → number of Frobenius orbits.
    pub histogram: BTreeMap<u32, u128>,
}

/// One class of Frobenius orbits sharing the same observable data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OrbitClass {
    pub orbit_size: u32,
    pub classification: UsgClass,
    pub contains_q2_shift: bool,
    pub lambda_2: Option<u64>,
    pub orbits: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub family: UsgFamily,
    pub verify: VerifyLevel,
    pub closed_forms: ClosedFormCounts,
    pub tallies: Option<Tallies>,
    pub frobenius: FrobeniusReport,
    pub rows: Vec<CensusRow>,
    pub breakdown: Vec<OrbitClass>,
    /// Observed `r`-parameters by shift flag, quasi-optimal rows only.
    pub r_params: BTreeMap<String, Vec<i64>>,
    pub mismatches: Vec<String>,
}

impl Census {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub verify: VerifyLevel,
    /// Work budget; see [`brute_work`] and [`fast_work`].
    pub budget: u128,
    pub modulus: Option<Vec<u32>>,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            verify: VerifyLevel::None,
            budget: DEFAULT_BUDGET,
            modulus: None,
        }
    }
}

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// `(q^{2k} - 1)/(q - 1) · q^k`: points swept per code times subspace size.
pub fn brute_work(fam: &UsgFamily) -> u128 {
    let q = fam.q();
    fam.group_order() / (q - 1) * pow_u128(q, fam.k)
}

/// `(q^{2k} - 1)/(q - 1) · k`.
pub fn fast_work(fam: &UsgFamily) -> u128 {
    fam.group_order() / (fam.q() - 1) * fam.k as u128
}

/// Classifies every `ell ∈ L` by congruences. The criteria do not involve
/// `s`, so each `ell` stands for `φ(k)/2` codes. This is the same arithmetic
/// as [`UsgFamily::classify_by_norm`], [`UsgFamily::contains_q2_shift`] and
/// [`frobenius_group`], unrolled into `u64` operations.
pub fn tally(fam: &UsgFamily, report: &FrobeniusReport) -> Result<Tallies> {
    let m = u64::try_from(fam.big_m()).map_err(|_| Error::InvalidParams("M exceeds u64".into()))?;
    let q = fam.q() as u64;
    let qk1 = fam.qk1() as u64;
    let q1 = q - 1;
    let shift_mod = q * q - 1;
    let shift_target = if fam.p == 2 { 0 } else { shift_mod / 2 };
    let k_odd = fam.k % 2 == 1;
    let hats: Vec<(u64, usize)> = report
        .i_hat
        .iter()
        .enumerate()
        .map(|(slot, &i)| (report.ell_hat[i as usize - 1] as u64, slot))
        .collect();
    let slots = hats.len() + 1;
    let zero = || (0u64, 0u64, vec![0u64; slots]);
    let (quasi, shift, groups) = (1..m + 1)
        .into_par_iter()
        .fold(zero, |(mut nq, mut ns, mut g), ell| {
            if ell % qk1 != 0 {
                nq += (ell % q1 == 0) as u64;
                ns += (k_odd && ell % shift_mod == shift_target) as u64;
                let slot = hats
                    .iter()
                    .find(|(l, _)| ell % l == 0)
                    .map_or(slots - 1, |&(_, s)| s);
                g[slot] += 1;
            }
            (nq, ns, g)
        })
        .reduce(zero, |(q1, s1, mut g1), (q2, s2, g2)| {
            g1.iter_mut().zip(g2).for_each(|(a, b)| *a += b);
            (q1 + q2, s1 + s2, g1)
        });
    let n_s = fam.s_values().len() as u128;
    let sizes: Vec<u32> = report.i_hat.iter().copied().chain([report.hn]).collect();
    let total: u128 = groups.iter().map(|&c| c as u128).sum::<u128>() * n_s;
    let mut histogram = BTreeMap::new();
    for (&size, &ells) in sizes.iter().zip(&groups) {
        let codes = ells as u128 * n_s;
        if codes == 0 {
            continue;
        }
        if codes % size as u128 != 0 {
            return Err(Error::NonIntegral(format!("{codes} codes in orbits of size {size}")));
        }
        *histogram.entry(size).or_insert(0) += codes / size as u128;
    }
    Ok(Tallies {
        total,
        quasi_optimal: quasi as u128 * n_s,
        optimal: total - quasi as u128 * n_s,
        with_q2_shift: shift as u128 * n_s,
        histogram,
    })
}

fn compare_tallies(t: &Tallies, c: &ClosedFormCounts, r: &FrobeniusReport, out: &mut Vec<String>) {
    let pairs = [
        ("total", t.total, c.total),
        ("quasi_optimal", t.quasi_optimal, c.quasi_optimal),
        ("optimal", t.optimal, c.optimal),
        ("with_q2_shift", t.with_q2_shift, c.with_q2_shift),
    ];
    for (name, got, want) in pairs {
        if got != want {
            out.push(format!("tally {name} = {got}, closed form {want}"));
        }
    }
    if t.histogram != r.histogram {
        out.push(format!(
            "Frobenius histogram by tally {:?} ≠ by formula {:?}",
            t.histogram, r.histogram
        ));
    }
}

fn row_arith(fam: &UsgFamily, report: &FrobeniusReport, par: UsGammaParams) -> Result<CensusRow> {
    let g = frobenius_group(report, par);
    Ok(CensusRow {
        s: par.s,
        ell: par.ell,
        classification: fam.classify_by_norm(par)?,
        contains_q2_shift: fam.contains_q2_shift(par)?,
        frobenius_group_order: g.order,
        frobenius_orbit_size: g.orbit_size,
        distance: None,
        lambda: None,
        r_param: None,
    })
}

fn expected_distance(fam: &UsgFamily, class: UsgClass) -> usize {
    let k = fam.k as usize;
    match class {
        UsgClass::Optimal => 2 * k - 2,
        UsgClass::QuasiOptimal => 2 * k - 4,
    }
}

fn row_fast(ctx: &FieldCtx, fam: &UsgFamily, report: &FrobeniusReport, par: UsGammaParams) -> Result<(CensusRow, Vec<String>)> {
    let mut row = row_arith(fam, report, par)?;
    let sweep = falpha_sweep(ctx, par)?;
    let top = (0..sweep.k).rev().find(|&i| sweep.counts[i] > 0).unwrap_or(0);
    row.distance = Some(2 * (sweep.k - top));
    let mut bad = Vec::new();
    if row.distance != Some(expected_distance(fam, row.classification)) {
        bad.push(format!("{par:?}: f_α distance {:?} vs norm class {:?}", row.distance, row.classification));
    }
    Ok((row, bad))
}

fn row_brute(ctx: &FieldCtx, fam: &UsgFamily, report: &FrobeniusReport, par: UsGammaParams) -> Result<(CensusRow, Vec<String>)> {
    let mut row = row_arith(fam, report, par)?;
    let u = make_usg(ctx, par)?;
    let prof = orbit_profile(ctx, &u)?;
    row.distance = prof.distance;
    row.lambda = Some(prof.lambda.clone());
    row.r_param = prof.r_param;
    let mut bad = Vec::new();
    if !prof.flags.full_length {
        bad.push(format!("{par:?}: not full-length"));
    }
    if prof.distance != Some(expected_distance(fam, row.classification)) {
        bad.push(format!("{par:?}: distance {:?} vs norm class {:?}", prof.distance, row.classification));
    }
    if prof.flags.sidon != prof.flags.optimal {
        bad.push(format!("{par:?}: Sidon test {} vs optimal {}", prof.flags.sidon, prof.flags.optimal));
    }
    let scan = contains_q2_shift_scan(ctx, &u);
    if scan != row.contains_q2_shift || prof.flags.contains_q2_shift != scan {
        bad.push(format!("{par:?}: shift criterion {} vs scan {scan}", row.contains_q2_shift));
    }
    let by_action = frobenius_group_by_action(ctx, par)?;
    if by_action.order != row.frobenius_group_order || by_action.orbit_size != row.frobenius_orbit_size {
        bad.push(format!(
            "{par:?}: Frobenius group order {} vs action {}",
            row.frobenius_group_order, by_action.order
        ));
    }
    for c in orbit::verify_structure(&prof) {
        if c.status == Status::Fail {
            bad.push(format!("{par:?}: {} failed: {}", c.name, c.detail));
        }
    }
    Ok((row, bad))
}

/// Groups rows into Frobenius orbits and checks that the observable data is
/// constant along each orbit.
fn breakdown(fam: &UsgFamily, rows: &[CensusRow], out: &mut Vec<String>) -> Result<Vec<OrbitClass>> {
    let index: BTreeMap<UsGammaParams, &CensusRow> = rows.iter().map(|r| (r.params(), r)).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut classes: BTreeMap<(u32, UsgClass, bool, Option<u64>), u64> = BTreeMap::new();
    for row in rows {
        if seen.contains(&row.params()) {
            continue;
        }
        let orbit = frobenius_orbit(fam, row.params())?;
        if orbit.len() as u32 != row.frobenius_orbit_size {
            out.push(format!(
                "{:?}: Frobenius orbit has {} members, expected {}",
                row.params(),
                orbit.len(),
                row.frobenius_orbit_size
            ));
        }
        for member in &orbit {
            seen.insert(*member);
            let Some(other) = index.get(member) else {
                out.push(format!("{member:?} missing from the census"));
                continue;
            };
            if (other.classification, other.contains_q2_shift, other.lambda_2())
                != (row.classification, row.contains_q2_shift, row.lambda_2())
            {
                out.push(format!("{:?} and {member:?} differ within a Frobenius orbit", row.params()));
            }
        }
        *classes
            .entry((orbit.len() as u32, row.classification, row.contains_q2_shift, row.lambda_2()))
            .or_insert(0) += 1;
    }
    Ok(classes
        .into_iter()
        .map(|((orbit_size, classification, contains_q2_shift, lambda_2), orbits)| OrbitClass {
            orbit_size,
            classification,
            contains_q2_shift,
            lambda_2,
            orbits,
        })
        .collect())
}

fn tallies_from_rows(rows: &[CensusRow]) -> Tallies {
    let total = rows.len() as u128;
    let quasi = rows
        .iter()
        .filter(|r| r.classification == UsgClass::QuasiOptimal)
        .count() as u128;
    let shift = rows.iter().filter(|r| r.contains_q2_shift).count() as u128;
    let mut histogram = BTreeMap::new();
    for r in rows {
        *histogram.entry(r.frobenius_orbit_size).or_insert(0u128) += 1;
    }
    for (size, v) in histogram.iter_mut() {
        *v /= *size as u128;
    }
    Tallies {
        total,
        quasi_optimal: quasi,
        optimal: total - quasi,
        with_q2_shift: shift,
        histogram,
    }
}

pub fn run_census(fam: &UsgFamily, cfg: &CensusConfig) -> Result<Census> {
    let closed_forms = fam.closed_form_counts();
    let frobenius = frobenius_structure(fam)?;
    let mut mismatches = Vec::new();
    let mut rows = Vec::new();
    let tallies = match cfg.verify {
        VerifyLevel::None => {
            if fam.big_m() <= cfg.budget {
                Some(tally(fam, &frobenius)?)
            } else {
                None
            }
        }
        level => {
            let work = if level == VerifyLevel::Brute { brute_work(fam) } else { fast_work(fam) };
            if work > cfg.budget {
                return Err(Error::Budget {
                    needed: work,
                    budget: cfg.budget,
                });
            }
            let ctx = build_field(fam.p, fam.h, fam.n(), cfg.modulus.as_deref())?;
            let reps: Vec<UsGammaParams> = fam.representatives().collect();
            let results: Vec<(CensusRow, Vec<String>)> = reps
                .par_iter()
                .map(|&par| match level {
                    VerifyLevel::Brute => row_brute(&ctx, fam, &frobenius, par),
                    _ => row_fast(&ctx, fam, &frobenius, par),
                })
                .collect::<Result<_>>()?;
            for (row, bad) in results {
                rows.push(row);
                mismatches.extend(bad);
            }
            Some(tallies_from_rows(&rows))
        }
    };
    if let Some(t) = &tallies {
        compare_tallies(t, &closed_forms, &frobenius, &mut mismatches);
    }
    let breakdown = if rows.is_empty() {
        Vec::new()
    } else {
        breakdown(fam, &rows, &mut mismatches)?
    };
    let mut r_params: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.classification == UsgClass::QuasiOptimal) {
        if let Some(v) = r.r_param {
            let key = if r.contains_q2_shift { "with_shift" } else { "without_shift" };
            let e = r_params.entry(key.to_string()).or_default();
            if !e.contains(&v) {
                e.push(v);
                e.sort_unstable();
            }
        }
    }
    Ok(Census {
        family: *fam,
        verify: cfg.verify,
        closed_forms,
        tallies,
        frobenius,
        rows,
        breakdown,
        r_params,
        mismatches,
    })
}
