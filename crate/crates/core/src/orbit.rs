//! Distance and intersection distributions of cyclic orbit codes `Orb(U)`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::pow_u128;
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::linear_set::{self, UxUWeightDistribution};
use crate::subspace::{ShiftIntersector, Subspace};

/// Histogram of `dim(U ∩ ω^j U)` over the non-trivial orbit representatives
/// `j = 1, …, |Orb(U)| - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionSweep {
    /// Stabilizer degree over `F_p`.
    pub stab_fp_deg: u32,
    pub orbit_size: u64,
    pub k: usize,
    /// `counts[i]` = number of representatives with intersection dimension `i`.
    pub counts: Vec<u64>,
}

pub fn intersection_sweep(ctx: &FieldCtx, u: &Subspace) -> Result<IntersectionSweep> {
    if u.is_zero() {
        return Err(Error::ZeroSubspace);
    }
    if u.ground_deg() != ctx.h() {
        return Err(Error::GroundFieldMismatch {
            left: u.ground_deg(),
            right: ctx.h(),
        });
    }
    let stab = u.stabilizer_degree(ctx)?;
    let orbit_size = ctx.subfield_step(stab);
    let k = u.dim();
    let fast = ShiftIntersector::new(ctx, u);
    let counts = (1..orbit_size)
        .into_par_iter()
        .fold(
            || vec![0u64; k + 1],
            |mut acc, j| {
                acc[fast.dim(j)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; k + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    if counts[k] != 0 {
        return Err(Error::Mismatch(
            "a non-stabilizer shift fixes the subspace".into(),
        ));
    }
    Ok(IntersectionSweep {
        stab_fp_deg: stab,
        orbit_size,
        k,
        counts,
    })
}

/// Projective class `log(x) mod (p^m - 1)/(q - 1)` of each point of `U`.
fn point_classes(ctx: &FieldCtx, u: &Subspace) -> Vec<u64> {
    let modulus = ctx.subfield_step(ctx.h());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in u.nonzero_elements(ctx) {
        let c = x.log().unwrap() as u64 % modulus;
        if seen.insert(c) {
            out.push(c);
        }
    }
    out.sort_unstable();
    out
}

/// `f_U`: number of distinct points `uv^{-1}` with `u, v ∈ U \ {0}`.
pub fn fractions_oracle(ctx: &FieldCtx, u: &Subspace) -> u64 {
    let modulus = ctx.subfield_step(ctx.h());
    let pts = point_classes(ctx, u);
    let mut fractions = HashSet::new();
    for &a in &pts {
        for &b in &pts {
            fractions.insert((a + modulus - b) % modulus);
        }
    }
    fractions.len() as u64
}

/// Direct Sidon test: the product class of an unordered pair of points must
/// determine the pair.
pub fn sidon_test(ctx: &FieldCtx, u: &Subspace) -> bool {
    let modulus = ctx.subfield_step(ctx.h());
    let pts = point_classes(ctx, u);
    let mut products: HashMap<u64, (u64, u64)> = HashMap::new();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i..] {
            let c = (a + b) % modulus;
            if let Some(&prev) = products.get(&c) {
                if prev != (a, b) {
                    return false;
                }
            } else {
                products.insert(c, (a, b));
            }
        }
    }
    true
}

/// `dim_{F_q}` of the largest `F_{q^2}`-subspace of `U`, i.e. of `U ∩ η^{-1}U`
/// for any `η ∈ F_{q^2} \ F_q`. `None` when `n` is odd.
pub fn q2_shift_dim(ctx: &FieldCtx, u: &Subspace) -> Option<usize> {
    if ctx.n() % 2 != 0 {
        return None;
    }
    let eta = ctx.subfield_generator(2 * ctx.h()).ok()?;
    let shifted = u.scalar_shift(ctx, ctx.inv(eta).ok()?).ok()?;
    u.intersect_dim(&shifted).ok()
}

/// Scans coset representatives `a` of `F_{q^n}^* / F_{q^2}^*` for `aF_{q^2} ⊆ U`.
pub fn contains_q2_shift_scan(ctx: &FieldCtx, u: &Subspace) -> bool {
    if ctx.n() % 2 != 0 {
        return false;
    }
    let d = 2 * ctx.h();
    let eta = ctx.subfield_generator(d).unwrap();
    (0..ctx.subfield_step(d)).any(|j| {
        let a = ctx.pow_omega(j as i128);
        u.contains(ctx, a) && u.contains(ctx, ctx.mul(a, eta))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub full_length: bool,
    pub optimal: bool,
    pub quasi_optimal: bool,
    pub spread: bool,
    pub sidon: bool,
    pub contains_q2_shift: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitProfile {
    pub p: u32,
    pub q: u64,
    pub h: u32,
    pub n: u32,
    pub k: usize,
    /// `Stab(U) = F_{q^t}^*`.
    pub t: u32,
    pub orbit_size: u64,
    /// `(ω_2, …, ω_{2k})`.
    pub omega: Vec<u64>,
    /// `(λ_0, …, λ_ℓ)`.
    pub lambda: Vec<u64>,
    pub ell: Option<usize>,
    pub distance: Option<usize>,
    pub f_u: u64,
    #[serde(rename = "Q")]
    pub big_q: u64,
    pub flags: Flags,
    pub r_param: Option<i64>,
    /// `dim_{F_q}` of the largest `F_{q^2}`-subspace (`2m`), for even `n`.
    pub q2_shift_dim: Option<usize>,
}

impl OrbitProfile {
    /// `λ_i`, zero beyond `ℓ`.
    pub fn lambda_at(&self, i: usize) -> u64 {
        self.lambda.get(i).copied().unwrap_or(0)
    }

    /// `ω_{2i}` for `1 ≤ i ≤ k`.
    pub fn omega_at(&self, i: usize) -> u64 {
        self.omega[i - 1]
    }

    /// Number of projective points in `Stab(U)`, `(q^t - 1)/(q - 1)`.
    pub fn stab_points(&self) -> u64 {
        ((self.q as u128).pow(self.t) as u64 - 1) / (self.q - 1)
    }

    pub fn epsilon(&self) -> u64 {
        self.flags.contains_q2_shift as u64
    }
}

pub fn big_q(q: u64, k: usize) -> u64 {
    let q = q as u128;
    let qk = pow_u128(q, k as u32);
    ((qk - 1) * (qk - q) / ((q - 1) * (q - 1))) as u64
}

/// Builds the profile from a sweep plus the direct `f_U`, Sidon and shift
/// computations. `f_U` is obtained twice (fractions and linear set) and the
/// two must agree.
pub fn orbit_profile(ctx: &FieldCtx, u: &Subspace) -> Result<OrbitProfile> {
    let sweep = intersection_sweep(ctx, u)?;
    profile_from_sweep(ctx, u, &sweep)
}

pub fn profile_from_sweep(ctx: &FieldCtx, u: &Subspace, sweep: &IntersectionSweep) -> Result<OrbitProfile> {
    let q = ctx.q();
    let h = ctx.h();
    let k = sweep.k;
    let t = sweep.stab_fp_deg / h;
    let stab_pts = (pow_u128(q as u128, t) as u64 - 1) / (q - 1);
    let omega: Vec<u64> = (1..=k).map(|i| sweep.counts[k - i]).collect();
    let ell = (0..k).rev().find(|&i| sweep.counts[i] > 0);
    let lambda: Vec<u64> = match ell {
        Some(l) => (0..=l).map(|i| stab_pts * sweep.counts[i]).collect(),
        None => Vec::new(),
    };
    let distance = ell.map(|l| 2 * (k - l));
    let dist = linear_set::from_sweep(ctx, sweep);
    let f_ls = linear_set::fu_from_linear_set(&dist)?;
    let f_u = fractions_oracle(ctx, u);
    if f_u != f_ls {
        return Err(Error::Mismatch(format!(
            "f_U from fractions ({f_u}) differs from the linear-set count ({f_ls})"
        )));
    }
    let full_length = t == 1;
    let q2 = q2_shift_dim(ctx, u);
    let contains_q2_shift = q2.is_some_and(|d| d > 0);
    let flags = Flags {
        full_length,
        optimal: full_length && k >= 2 && distance == Some(2 * k - 2),
        quasi_optimal: full_length && k >= 3 && distance == Some(2 * k - 4),
        spread: ell == Some(0),
        sidon: sidon_test(ctx, u),
        contains_q2_shift,
    };
    let mut profile = OrbitProfile {
        p: ctx.p(),
        q,
        h,
        n: ctx.n(),
        k,
        t,
        orbit_size: sweep.orbit_size,
        omega,
        lambda,
        ell,
        distance,
        f_u,
        big_q: big_q(q, k),
        flags,
        r_param: None,
        q2_shift_dim: q2,
    };
    profile.r_param = r_param(&profile);
    Ok(profile)
}

/// `r = (λ_2 - εq)/(q(q+1))` for quasi-optimal codes, when integral.
pub fn r_param(p: &OrbitProfile) -> Option<i64> {
    if !p.flags.quasi_optimal {
        return None;
    }
    let num = p.lambda_at(2) as i64 - (p.epsilon() * p.q) as i64;
    let den = (p.q * (p.q + 1)) as i64;
    (num % den == 0).then_some(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub full_length: bool,
    pub optimal: bool,
    pub quasi_optimal: bool,
    pub spread: bool,
    pub contains_q2_shift: bool,
}

pub fn classify_code(profile: &OrbitProfile) -> Classification {
    Classification {
        full_length: profile.flags.full_length,
        optimal: profile.flags.optimal,
        quasi_optimal: profile.flags.quasi_optimal,
        spread: profile.flags.spread,
        contains_q2_shift: profile.flags.contains_q2_shift,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dim3Case {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III.1")]
    III1,
    #[serde(rename = "III.2")]
    III2,
    #[serde(rename = "III.3")]
    III3,
}

/// The three `(ω_2, ω_4, ω_6)` signatures of quasi-optimal codes with `k = 3`.
pub fn dim3_signatures(q: u64, n: u32) -> [(Dim3Case, [i128; 3]); 3] {
    let q = q as i128;
    let qn = q.pow(n);
    [
        (Dim3Case::III1, [q + q * q * (q + 1), 0, (qn - q.pow(4)) / (q - 1)]),
        (Dim3Case::III2, [q * (q + 1), q.pow(3) * (q + 1), (qn - q.pow(5)) / (q - 1)]),
        (
            Dim3Case::III3,
            [
                q,
                q * q * (q + 1) * (q + 1),
                (qn - 1) / (q - 1) - q * q * (q + 1) * (q + 1) - q - 1,
            ],
        ),
    ]
}

pub fn classify_dim3(profile: &OrbitProfile) -> Result<Dim3Case> {
    if profile.k != 3 {
        return Err(Error::InvalidParams(format!("dimension is {}, expected 3", profile.k)));
    }
    match profile.distance {
        Some(6) => return Ok(Dim3Case::I),
        Some(4) => return Ok(Dim3Case::II),
        _ => {}
    }
    let observed: Vec<i128> = profile.omega.iter().map(|&w| w as i128).collect();
    dim3_signatures(profile.q, profile.n)
        .into_iter()
        .find(|(_, sig)| sig[..] == observed[..])
        .map(|(case, _)| case)
        .ok_or_else(|| Error::Mismatch(format!("ω-signature {observed:?} matches no case")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn skipped(name: &str, why: &str) -> Check {
        Check {
            name: name.into(),
            status: Status::Skipped,
            detail: why.into(),
        }
    }
}

/// Evaluates every applicable distributional constraint on a profile.
pub fn verify_structure(p: &OrbitProfile) -> Vec<Check> {
    let q = p.q as i128;
    let qq1 = q * (q + 1);
    let k = p.k;
    let n = p.n;
    let f = p.f_u as i128;
    let big_q = p.big_q as i128;
    let lam = |i: usize| p.lambda_at(i) as i128;
    let full = p.flags.full_length;
    let mut out = Vec::new();

    // f_U = s + Σλ_i and Q = Σ [i]_q λ_i + [k]_q (s - 1)
    {
        let s = p.stab_points() as i128;
        let sum: i128 = (1..p.lambda.len()).map(lam).sum();
        let weighted: i128 = (1..p.lambda.len())
            .map(|i| (q.pow(i as u32) - 1) / (q - 1) * lam(i))
            .sum();
        let qk = (q.pow(k as u32) - 1) / (q - 1);
        out.push(Check::new(
            "fu_lambda_identity",
            f == s + sum && big_q == weighted + qk * (s - 1),
            format!("f_U={f}, s+Σλ={}, Q={big_q}, Σ[i]λ+[k](s-1)={}", s + sum, weighted + qk * (s - 1)),
        ));
    }

    {
        let lo = (q.pow(k as u32) - 1) / (q - 1);
        let field_shift = p.t as usize == k;
        let lo_eq = (f == lo) == field_shift;
        let hi_eq = if k >= 2 { (f == big_q + 1) == p.flags.sidon } else { true };
        out.push(Check::new(
            "fu_range",
            lo <= f && f <= big_q + 1 && lo_eq && hi_eq,
            format!("{lo} <= {f} <= {}", big_q + 1),
        ));
    }

    if k >= 2 {
        let optimal = full && p.distance == Some(2 * k - 2);
        out.push(Check::new(
            "sidon_iff_optimal",
            p.flags.sidon == optimal,
            format!("sidon={}, optimal full-length={optimal}", p.flags.sidon),
        ));
    } else {
        out.push(Check::skipped("sidon_iff_optimal", "k < 2"));
    }

    if p.flags.sidon && k >= 2 {
        let l0 = (q.pow(n) - 1) / (q - 1) - big_q - 1;
        out.push(Check::new(
            "sidon_distribution",
            lam(1) == big_q && lam(0) == l0 && p.lambda.len() == 2,
            format!("λ={:?}, expected ({l0}, {big_q})", p.lambda),
        ));
    } else {
        out.push(Check::skipped("sidon_distribution", "not a Sidon space"));
    }

    if !full {
        out.push(Check::skipped("bhaintwal", "stabilizer larger than F_q^*"));
        out.push(Check::skipped("fu_divisibility", "stabilizer larger than F_q^*"));
    } else if n % 2 == 1 {
        let bad: Vec<usize> = (0..k).filter(|&i| lam(i) % qq1 != 0).collect();
        out.push(Check::new(
            "bhaintwal",
            bad.is_empty(),
            format!("n odd; λ_i not divisible by q(q+1) at {bad:?}"),
        ));
        out.push(Check::new(
            "fu_divisibility",
            (f - 1) % qq1 == 0,
            format!("f_U - 1 = {} mod q(q+1) = {}", f - 1, (f - 1) % qq1),
        ));
    } else {
        let two_m = p.q2_shift_dim.unwrap_or(0);
        let special_ok = lam(two_m) >= q && (lam(two_m) - q) % qq1 == 0;
        let bad: Vec<usize> = (0..k).filter(|&i| i != two_m && lam(i) % qq1 != 0).collect();
        out.push(Check::new(
            "bhaintwal",
            special_ok && bad.is_empty(),
            format!("2m={two_m}, λ_2m={}, other non-multiples at {bad:?}", lam(two_m)),
        ));
        // only λ_{2m} is off by q; it enters f_U - 1 unless 2m = 0
        let target = if two_m >= 1 { q } else { 0 };
        out.push(Check::new(
            "fu_divisibility",
            (f - 1 - target).rem_euclid(qq1) == 0,
            format!("2m={two_m}, f_U - 1 = {}", f - 1),
        ));
    }

    if p.flags.quasi_optimal {
        let eps = p.epsilon() as i128;
        let l2 = lam(2);
        let r_ok = (l2 - eps * q) % qq1 == 0;
        let r = (l2 - eps * q) / qq1;
        let l1 = big_q - (q + 1) * l2;
        let l0 = (q.pow(n) - 1) / (q - 1) - l1 - l2 - 1;
        out.push(Check::new(
            "quasi_optimal_shape",
            r_ok && r >= 1 - eps && lam(1) == l1 && lam(0) == l0 && p.r_param.is_some(),
            format!("ε={eps}, λ_2={l2}, r={}", if r_ok { r.to_string() } else { "non-integral".into() }),
        ));
        let detail;
        let ok = if lam(1) == 0 {
            if k == 3 {
                detail = format!("λ_1=0, k=3: ε={eps}, λ_2={l2}");
                eps == 1 && l2 == q + q * q * (q + 1)
            } else {
                let fl = (k / 2) as i128;
                detail = format!("λ_1=0: (q+1) | (⌊k/2⌋ - ε) = {}", fl - eps);
                (fl - eps) % (q + 1) == 0
            }
        } else {
            let upper = (q.pow(k as u32 - 1) - 1) * (q.pow(k as u32 - 2) - 1) / ((q + 1) * (q - 1) * (q - 1)) - eps;
            let k3 = k != 3 || l2 == if eps == 1 { q } else { q * (q + 1) };
            detail = format!("λ_1≠0: {} <= r={r} <= {upper}", 1 - eps);
            r_ok && 1 - eps <= r && r <= upper && k3
        };
        out.push(Check::new("quasi_optimal_lambda2", ok, detail));
    } else {
        out.push(Check::skipped("quasi_optimal_shape", "not quasi-optimal"));
        out.push(Check::skipped("quasi_optimal_lambda2", "not quasi-optimal"));
    }

    match (p.ell, p.distance) {
        (Some(l), Some(d)) if d > 2 => {
            let (lhs, rhs) = (2 * k, n as usize + l);
            let ok = if full { lhs < rhs } else { lhs <= rhs };
            out.push(Check::new(
                "dimension_bound",
                ok,
                format!("2k={lhs} {} n+ℓ={rhs}", if full { "<" } else { "<=" }),
            ));
        }
        _ => out.push(Check::skipped("dimension_bound", "minimum distance not above 2")),
    }

    if n as usize + 1 >= 2 * k && k >= 2 && p.omega_at(k - 1) != 0 {
        let lo = (q.pow(2 * k as u32 - 1) - 1) / (q - 1);
        out.push(Check::new("weight_one_fu_bound", f >= lo, format!("f_U={f} >= {lo}")));
    } else {
        out.push(Check::skipped("weight_one_fu_bound", "n < 2k-1 or ω_{2(k-1)} = 0"));
    }

    if full && p.ell.is_some_and(|l| l <= 2) && k >= 2 {
        let ok = q * lam(2) == big_q - (f - 1) && q * lam(1) == (q + 1) * (f - 1) - big_q;
        out.push(Check::new(
            "lambda_fu_identities",
            ok,
            format!("qλ_2={}, Q-(f_U-1)={}", q * lam(2), big_q - (f - 1)),
        ));
    } else {
        out.push(Check::skipped("lambda_fu_identities", "requires full length and ℓ <= 2"));
    }

    out
}

/// Duality: `Orb(U^⊥)` has the same distance distribution as `Orb(U)`.
pub fn duality_check(ctx: &FieldCtx, u: &Subspace, profile: &OrbitProfile) -> Result<Check> {
    let dual = u.orthogonal_complement(ctx);
    if dual.is_zero() {
        return Ok(Check::skipped("duality", "U is the whole field"));
    }
    let sweep = intersection_sweep(ctx, &dual)?;
    let kd = sweep.k;
    let omega_dual: Vec<u64> = (1..=kd).map(|i| sweep.counts[kd - i]).collect();
    let strip = |w: &[u64]| {
        let mut v = w.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    // distances beyond min(k, n-k) cannot occur, so trailing zeros are ignored
    let ok = strip(&omega_dual) == strip(&profile.omega) && sweep.orbit_size == profile.orbit_size;
    Ok(Check::new(
        "duality",
        ok,
        format!("ω(U)={:?}, ω(U^⊥)={omega_dual:?}", profile.omega),
    ))
}

/// Full analysis of one subspace: profile, weights, checks and bounds.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub profile: OrbitProfile,
    pub dim3_case: Option<Dim3Case>,
    pub weights: UxUWeightDistribution,
    pub checks: Vec<Check>,
    pub bounds: Vec<linear_set::BoundCheck>,
}

impl Analysis {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
            && self.bounds.iter().all(|b| b.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .chain(
                self.bounds
                    .iter()
                    .filter(|b| b.status == Status::Fail)
                    .map(|b| format!("{}: {}", b.name, b.detail)),
            )
            .collect()
    }
}

pub fn analyze(ctx: &FieldCtx, u: &Subspace, with_duality: bool) -> Result<Analysis> {
    let sweep = intersection_sweep(ctx, u)?;
    let profile = profile_from_sweep(ctx, u, &sweep)?;
    let weights = linear_set::from_sweep(ctx, &sweep);
    let mut checks = verify_structure(&profile);
    checks.extend(linear_set::weight_checks(&weights, &profile));
    if with_duality {
        checks.push(duality_check(ctx, u, &profile)?);
    }
    let bounds = linear_set::linear_set_bounds(&weights, &profile);
    let dim3_case = if profile.k == 3 {
        Some(classify_dim3(&profile)?)
    } else {
        None
    };
    Ok(Analysis {
        profile,
        dim3_case,
        weights,
        checks,
        bounds,
    })
}
