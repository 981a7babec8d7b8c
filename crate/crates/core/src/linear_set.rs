//! The `F_q`-linear set `L_{U×U}` on `PG(1, q^n)`.
//!
//! The point `⟨(1, α)⟩` has weight `dim(U ∩ αU)`; `⟨(1, 0)⟩` and `⟨(0, 1)⟩`
//! both have weight `k`. Weights are read off an intersection sweep, so the
//! point set itself is never built.

use serde::Serialize;

use crate::arith::{divisors, pow_u128};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::orbit::{Check, IntersectionSweep, OrbitProfile, Status};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UxUWeightDistribution {
    pub q: u64,
    pub n: u32,
    pub k: usize,
    /// Stabilizer degree over `F_q`.
    pub t: u32,
    /// `(N_0, …, N_{2k})`.
    #[serde(rename = "N")]
    pub counts: Vec<u128>,
    pub size_l: u128,
    pub rank: usize,
    pub min_weight: usize,
}

pub fn from_sweep(ctx: &FieldCtx, sweep: &IntersectionSweep) -> UxUWeightDistribution {
    let q = ctx.q() as u128;
    let k = sweep.k;
    let stab = pow_u128(ctx.p() as u128, sweep.stab_fp_deg) - 1;
    let mut counts = vec![0u128; 2 * k + 1];
    for (i, &c) in sweep.counts.iter().enumerate().skip(1) {
        counts[i] = stab * c as u128;
    }
    // the stabilizer itself, plus ⟨(1,0)⟩ and ⟨(0,1)⟩
    counts[k] += stab + 2;
    let size_l: u128 = counts[1..].iter().sum();
    counts[0] = pow_u128(q, ctx.n()) + 1 - size_l;
    let min_weight = (1..=k).find(|&i| counts[i] > 0).unwrap_or(k);
    UxUWeightDistribution {
        q: ctx.q(),
        n: ctx.n(),
        k,
        t: sweep.stab_fp_deg / ctx.h(),
        counts,
        size_l,
        rank: 2 * k,
        min_weight,
    }
}

pub fn uxu_weight_distribution(ctx: &FieldCtx, u: &Subspace) -> Result<UxUWeightDistribution> {
    let sweep = crate::orbit::intersection_sweep(ctx, u)?;
    Ok(from_sweep(ctx, &sweep))
}

/// `f_U = (|L_{U×U}| - 2)/(q - 1)`.
pub fn fu_from_linear_set(dist: &UxUWeightDistribution) -> Result<u64> {
    let q = dist.q as u128;
    let num = dist.size_l - 2;
    if num % (q - 1) != 0 {
        return Err(Error::NonIntegral(format!("(|L| - 2)/(q - 1) with |L| = {}", dist.size_l)));
    }
    Ok((num / (q - 1)) as u64)
}

/// Identities every weight distribution must satisfy, and its agreement with
/// the orbit profile.
pub fn weight_checks(dist: &UxUWeightDistribution, profile: &OrbitProfile) -> Vec<Check> {
    let q = dist.q as u128;
    let k = dist.k;
    let mut out = Vec::new();
    let total: u128 = (1..=2 * k).map(|i| dist.counts[i] * (pow_u128(q, i as u32) - 1)).sum();
    let target = pow_u128(q, 2 * k as u32) - 1;
    out.push(check(
        "weight_sum",
        total == target,
        format!("Σ N_i(q^i - 1) = {total}, q^2k - 1 = {target}"),
    ));
    let qt = pow_u128(q, dist.t);
    let high_zero = dist.counts[k + 1..].iter().all(|&c| c == 0);
    out.push(check(
        "weight_top",
        dist.counts[k] == qt + 1 && high_zero,
        format!("N_k = {}, q^t + 1 = {}", dist.counts[k], qt + 1),
    ));
    let bridge = (1..=k).all(|i| dist.counts[k - i] == (qt - 1) * profile.omega_at(i) as u128)
        && (0..k).all(|i| dist.counts[i] == (q - 1) * profile.lambda_at(i) as u128);
    out.push(check(
        "weight_bridge",
        bridge,
        "N_{k-i} = (q^t - 1) ω_{2i}, N_i = (q - 1) λ_i",
    ));
    out
}

fn check(name: &str, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// Observed quantity (`|L|` or `f_U`).
    pub observed: Option<u128>,
    /// Bound value; upper bounds are floored.
    pub value: Option<u128>,
    pub status: Status,
    pub detail: String,
}

impl BoundCheck {
    fn lower(name: &str, observed: u128, value: u128, detail: impl Into<String>) -> Self {
        BoundCheck {
            name: name.into(),
            observed: Some(observed),
            value: Some(value),
            status: if observed >= value { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn upper(name: &str, observed: u128, value: u128, detail: impl Into<String>) -> Self {
        BoundCheck {
            name: name.into(),
            observed: Some(observed),
            value: Some(value),
            status: if observed <= value { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        BoundCheck {
            name: name.into(),
            observed: None,
            value: None,
            status: Status::Skipped,
            detail: why.into(),
        }
    }
}

/// Size bounds on `L_{U×U}` and the resulting bounds on `f_U`.
pub fn linear_set_bounds(dist: &UxUWeightDistribution, profile: &OrbitProfile) -> Vec<BoundCheck> {
    let q = dist.q as u128;
    let n = dist.n as usize;
    let k = dist.k;
    let rank = dist.rank;
    let pw = |e: usize| pow_u128(q, e as u32);
    let f_u = profile.f_u as u128;
    let mut out = Vec::new();

    if dist.counts[1] > 0 && (rank <= n || rank == n + 1) {
        out.push(BoundCheck::lower(
            "linear_set_lower",
            dist.size_l,
            pw(rank - 1) + 1,
            "weight-one point: |L| >= q^(2k-1) + 1",
        ));
    } else {
        out.push(BoundCheck::skipped("linear_set_lower", "no weight-one point or 2k > n + 1"));
    }

    {
        let e = dist.min_weight;
        let qt1 = pw(dist.t as usize) + 1;
        let value = (pw(2 * k) - 1 - qt1 * (pw(k) - pw(e))) / (pw(e) - 1);
        out.push(BoundCheck::upper(
            "linear_set_upper",
            dist.size_l,
            value,
            format!("min weight e = {e}"),
        ));
    }

    let l = (1..k).rev().find(|&i| profile.omega_at(i) != 0);
    match l {
        Some(l) if 2 * k <= n => {
            let e = k - l;
            let qt1 = pw(profile.t as usize) + 1;
            let num = pw(2 * k) - 1 - qt1 * (pw(k) - pw(e)) - 2 * (pw(e) - 1);
            let value = num / ((pw(e) - 1) * (q - 1));
            out.push(BoundCheck::upper("fu_upper", f_u, value, format!("l = {l}")));
            if q >= n as u128 {
                let admissible: Vec<usize> = divisors(n as u32)
                    .into_iter()
                    .map(|s| s as usize)
                    .filter(|&s| s >= e && s < n)
                    .collect();
                let bound = |s: usize| (pw(2 * k - s) - 1) / (q - 1);
                match admissible.last() {
                    Some(&weakest) => {
                        out.push(BoundCheck::lower(
                            "fu_divisor_weakest",
                            f_u,
                            bound(weakest),
                            format!("largest admissible divisor s = {weakest}"),
                        ));
                        match admissible.iter().find(|&&s| f_u >= bound(s)) {
                            Some(&s) => out.push(BoundCheck::lower(
                                "fu_divisor_strongest",
                                f_u,
                                bound(s),
                                format!("smallest admissible divisor attained s = {s}"),
                            )),
                            None => out.push(BoundCheck {
                                name: "fu_divisor_strongest".into(),
                                observed: Some(f_u),
                                value: None,
                                status: Status::Fail,
                                detail: "no admissible divisor attains the bound".into(),
                            }),
                        }
                    }
                    None => out.push(BoundCheck {
                        name: "fu_divisor_weakest".into(),
                        observed: Some(f_u),
                        value: None,
                        status: Status::Fail,
                        detail: format!("no divisor s of n with {e} <= s < n"),
                    }),
                }
                if l == k - 1 || crate::arith::is_prime(n as u64) {
                    out.push(BoundCheck::lower("fu_divisor_s1", f_u, bound(1), "s = 1 is forced"));
                } else {
                    out.push(BoundCheck::skipped("fu_divisor_s1", "l < k - 1 and n composite"));
                }
            } else {
                out.push(BoundCheck::skipped("fu_divisor_weakest", "q < n"));
                out.push(BoundCheck::skipped("fu_divisor_strongest", "q < n"));
                out.push(BoundCheck::skipped("fu_divisor_s1", "q < n"));
            }
        }
        _ => {
            for name in ["fu_upper", "fu_divisor_weakest", "fu_divisor_strongest", "fu_divisor_s1"] {
                out.push(BoundCheck::skipped(name, "requires 2k <= n and a distance below 2k"));
            }
        }
    }
    out
}
