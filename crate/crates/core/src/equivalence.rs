//! Orbit equality, Frobenius isometry and Frobenius-automorphism groups of
//! the codes `Orb(U_{s,γ})`.
//!
//! With `M = (q^k + 1)(q - 1)` every criterion is a congruence modulo `M`,
//! because `θ_q(F_{q^k}^*) = ⟨ω^M⟩` and `M | q^{2k} - 1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{gcd, lcm, pow_mod};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::subspace::Subspace;
use crate::usg::{make_usg, UsGammaParams, UsgFamily};

fn residue(x: i128, m: u128) -> u128 {
    x.rem_euclid(m as i128) as u128
}

/// `p^i mod M`.
fn p_pow_mod(fam: &UsgFamily, i: u32, m: u128) -> u128 {
    pow_mod(fam.p as u128, i as u128, m)
}

/// `Orb(U_{s1,γ1}) = Orb(U_{s2,γ2})`.
pub fn orbit_equal_test(fam: &UsgFamily, a: UsGammaParams, b: UsGammaParams) -> Result<bool> {
    frobenius_isometry_test(fam, a, b, 0)
}

/// `σ_p^i(Orb(U_{s1,γ1})) = Orb(U_{s2,γ2})`.
pub fn frobenius_isometry_test(fam: &UsgFamily, a: UsGammaParams, b: UsGammaParams, i: u32) -> Result<bool> {
    fam.validate(a)?;
    fam.validate(b)?;
    let m = fam.big_m();
    let k = fam.k;
    let e = a.ell as u128 % m * p_pow_mod(fam, i, m) % m;
    let l2 = b.ell as u128 % m;
    let branch_a = a.s != b.s && (a.s + b.s) % k == 0 && (e + l2) % m == 0;
    let branch_b = a.s == b.s && (2 * a.s) % k != 0 && residue(l2 as i128 - e as i128, m) == 0;
    Ok(branch_a || branch_b)
}

/// Exponents `i ∈ 1..=hn/t` with `σ_{p^t}^i` in the automorphism group, i.e.
/// `γ^{p^{it} - 1} ∈ θ_q(F_{q^k})`.
pub fn aut_group(fam: &UsgFamily, par: UsGammaParams, t: u32) -> Result<Vec<u32>> {
    fam.validate(par)?;
    if t == 0 || fam.h % t != 0 {
        return Err(Error::DegreeNotDividing { inner: t, outer: fam.h });
    }
    let m = fam.big_m();
    let hn = fam.h * fam.n();
    Ok((1..=hn / t)
        .filter(|&i| {
            let f = (p_pow_mod(fam, i * t, m) + m - 1) % m;
            par.ell as u128 % m * f % m == 0
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusReport {
    pub p: u32,
    pub h: u32,
    pub k: u32,
    pub hn: u32,
    /// `M = (q^k + 1)(q - 1)`.
    pub big_m: u128,
    /// `(ℓ̂_1, …, ℓ̂_{hn-1})`.
    pub ell_hat: Vec<u128>,
    pub i_set: Vec<u32>,
    pub i_hat: Vec<u32>,
    /// `α_i` for `i ∈ Î`.
    pub alpha_counts: BTreeMap<u32, u128>,
    /// Number of codes whose Frobenius-automorphism group is `⟨σ_p^i⟩`, `i ∈ Î`.
    pub group_counts: BTreeMap<u32, u128>,
    /// Codes with trivial Frobenius-automorphism group.
    pub trivial_count: u128,
    pub total: u128,
    /// Frobenius-orbit size → number of Frobenius orbits of that size.
    pub histogram: BTreeMap<u32, u128>,
}

/// `ℓ̂_i = lcm(p^i - 1, M)/(p^i - 1) = M / gcd(p^i - 1, M)`.
pub fn ell_hat(fam: &UsgFamily, i: u32) -> u128 {
    let m = fam.big_m();
    let r = (p_pow_mod(fam, i, m) + m - 1) % m;
    m / gcd(r, m)
}

/// `ℓ̂_i`, `I`, `Î`, the `α_i`, the per-group code counts and the Frobenius
/// orbit histogram, all by arithmetic on `(p, h, k)`.
pub fn frobenius_structure(fam: &UsgFamily) -> Result<FrobeniusReport> {
    let m = fam.big_m();
    let qk1 = fam.qk1();
    let hn = fam.h * fam.n();
    let ell_hat: Vec<u128> = (1..hn).map(|i| ell_hat(fam, i)).collect();
    for (idx, &l) in ell_hat.iter().enumerate() {
        if m % l != 0 || l > m / (fam.p as u128 - 1) {
            return Err(Error::Mismatch(format!("ℓ̂_{} = {l} violates its bounds", idx + 1)));
        }
    }
    let i_set: Vec<u32> = (1..hn).filter(|&i| ell_hat[i as usize - 1] % qk1 != 0).collect();
    let i_hat: Vec<u32> = i_set
        .iter()
        .copied()
        .filter(|&i| {
            let v = ell_hat[i as usize - 1];
            (1..i).all(|t| ell_hat[t as usize - 1] != v)
        })
        .collect();
    let alpha_counts: BTreeMap<u32, u128> = i_hat
        .iter()
        .map(|&i| {
            let l = ell_hat[i as usize - 1];
            (i, m / l - m / lcm(l, qk1))
        })
        .collect();
    let half_phi = crate::arith::euler_phi(fam.k as u64) as u128 / 2;
    let mut group_counts = BTreeMap::new();
    for &i in &i_hat {
        let sub: u128 = i_hat
            .iter()
            .filter(|&&j| j != i && i % j == 0)
            .map(|j| alpha_counts[j])
            .sum();
        let a = alpha_counts[&i];
        if sub > a {
            return Err(Error::Mismatch(format!(
                "negative code count for ⟨σ^{i}⟩: α = {a}, subtracted {sub}"
            )));
        }
        group_counts.insert(i, half_phi * (a - sub));
    }
    let total = fam.closed_form_counts().total;
    let nontrivial: u128 = group_counts.values().sum();
    if nontrivial > total {
        return Err(Error::Mismatch("group counts exceed the number of codes".into()));
    }
    let trivial_count = total - nontrivial;
    let mut histogram = BTreeMap::new();
    let mut add = |size: u32, codes: u128| -> Result<()> {
        if codes == 0 {
            return Ok(());
        }
        if codes % size as u128 != 0 {
            return Err(Error::NonIntegral(format!("{codes} codes in orbits of size {size}")));
        }
        *histogram.entry(size).or_insert(0) += codes / size as u128;
        Ok(())
    };
    for (&i, &c) in &group_counts {
        if hn % i != 0 {
            return Err(Error::Mismatch(format!("group generator σ^{i} with {i} ∤ hn")));
        }
        add(i, c)?;
    }
    add(hn, trivial_count)?;
    let mass: u128 = histogram.iter().map(|(&s, &c)| s as u128 * c).sum();
    if mass != total {
        return Err(Error::Mismatch(format!("histogram mass {mass} ≠ {total}")));
    }
    Ok(FrobeniusReport {
        p: fam.p,
        h: fam.h,
        k: fam.k,
        hn,
        big_m: m,
        ell_hat,
        i_set,
        i_hat,
        alpha_counts,
        group_counts,
        trivial_count,
        total,
        histogram,
    })
}

/// The Frobenius-automorphism group `⟨σ_p^ι⟩` of one code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrobeniusGroup {
    /// `ι`; equals `hn` for the trivial group.
    pub generator: u32,
    pub order: u32,
    pub orbit_size: u32,
}

/// `ι = min{i ∈ I : ℓ̂_i | ell}`, or the trivial group. The minimum always
/// lies in `Î`, since an earlier index with the same `ℓ̂` would also qualify.
pub fn frobenius_group(report: &FrobeniusReport, par: UsGammaParams) -> FrobeniusGroup {
    let hn = report.hn;
    let iota = report
        .i_hat
        .iter()
        .copied()
        .find(|&i| par.ell % report.ell_hat[i as usize - 1] as u64 == 0)
        .unwrap_or(hn);
    FrobeniusGroup {
        generator: iota,
        order: hn / iota,
        orbit_size: iota,
    }
}

/// Canonical representatives of `{σ_p^i(Orb(U_{s,γ}))}`, sorted. Uses
/// `σ(U_{s,γ}) = U_{s,σ(γ)}`.
pub fn frobenius_orbit(fam: &UsgFamily, par: UsGammaParams) -> Result<Vec<UsGammaParams>> {
    let m = fam.big_m();
    let hn = fam.h * fam.n();
    let mut out = BTreeSet::new();
    for i in 0..hn {
        let e = par.ell as u128 % m * p_pow_mod(fam, i, m) % m;
        out.insert(fam.canonical(UsGammaParams { s: par.s, ell: e as u64 })?);
    }
    Ok(out.into_iter().collect())
}

/// `σ_p^i(U)`.
pub fn galois_action_oracle(ctx: &FieldCtx, u: &Subspace, i: u32) -> Subspace {
    u.frobenius_image(ctx, i)
}

/// Smallest `j` with `ω^j V = W`, scanning `j` upward over one period of the orbit.
pub fn orbit_position(ctx: &FieldCtx, v: &Subspace, w: &Subspace) -> Result<Option<u64>> {
    if v.fp_rank() != w.fp_rank() || v.is_zero() {
        return Ok(None);
    }
    let period = v.orbit_size(ctx)?;
    let lead = v.fp_basis(ctx)[0];
    for j in 0..period {
        let a = ctx.pow_omega(j as i128);
        if !w.contains(ctx, ctx.mul(a, lead)) {
            continue;
        }
        if v.scalar_shift(ctx, a)?.echelon() == w.echelon() {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// `W ∈ Orb(V)`.
pub fn orbit_contains(ctx: &FieldCtx, v: &Subspace, w: &Subspace) -> Result<bool> {
    Ok(orbit_position(ctx, v, w)?.is_some())
}

/// `{i ∈ 1..=hn : σ_p^i(U) ∈ Orb(U)}` by explicit Galois action.
pub fn frobenius_group_oracle(ctx: &FieldCtx, u: &Subspace) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for i in 1..=ctx.m() {
        if orbit_contains(ctx, u, &galois_action_oracle(ctx, u, i))? {
            out.push(i);
        }
    }
    Ok(out)
}

/// The Frobenius-automorphism group of `Orb(U_{s,γ})` computed by explicit
/// Galois action on the subspace.
pub fn frobenius_group_by_action(ctx: &FieldCtx, par: UsGammaParams) -> Result<FrobeniusGroup> {
    let u = make_usg(ctx, par)?;
    let hn = ctx.m();
    let iota = frobenius_group_oracle(ctx, &u)?[0];
    Ok(FrobeniusGroup {
        generator: iota,
        order: hn / iota,
        orbit_size: iota,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    fn fam(p: u32, h: u32, k: u32) -> UsgFamily {
        UsgFamily::new(p, h, k).unwrap()
    }

    #[test]
    fn example_q3_k3() {
        let r = frobenius_structure(&fam(3, 1, 3)).unwrap();
        assert_eq!(r.ell_hat, vec![28, 7, 28, 7, 28]);
        assert_eq!(r.i_set, vec![2, 4]);
        assert_eq!(r.i_hat, vec![2]);
        assert_eq!(r.alpha_counts[&2], 6);
        assert_eq!(r.group_counts[&2], 6);
        assert_eq!(r.trivial_count, 48);
        assert_eq!(r.histogram, BTreeMap::from([(2, 3), (6, 8)]));
    }

    #[test]
    fn example_q2_k5() {
        let r = frobenius_structure(&fam(2, 1, 5)).unwrap();
        assert_eq!(r.i_hat, vec![2]);
        assert_eq!(r.group_counts[&2], 4);
        assert_eq!(r.histogram, BTreeMap::from([(2, 2), (10, 6)]));
    }

    #[test]
    fn example_q27_k4() {
        let r = frobenius_structure(&fam(3, 3, 4)).unwrap();
        assert_eq!(r.i_set, (1..12).map(|i| 2 * i).collect::<Vec<_>>());
        assert_eq!(r.i_hat, vec![2, 6, 8]);
        assert_eq!(r.group_counts, BTreeMap::from([(2, 2), (6, 24), (8, 160)]));
        assert_eq!(r.histogram, BTreeMap::from([(2, 1), (6, 4), (8, 20), (24, 575_720)]));
    }

    /// `ℓ̂_i Z` is the solution set of `ell(p^i - 1) ≡ jM (mod q^n - 1)`.
    #[test]
    fn ell_hat_solves_congruence() {
        let f = fam(3, 1, 3);
        let m = f.big_m();
        let big_n = f.group_order();
        for i in 1..f.n() {
            let pi1 = 3u128.pow(i) - 1;
            let lh = ell_hat(&f, i);
            for ell in 1..=m {
                let lhs = ell * pi1 % big_n;
                let solvable = (0..big_n / m).any(|j| j * m == lhs);
                assert_eq!(solvable, ell % lh == 0, "i={i} ell={ell}");
            }
        }
    }

    #[test]
    fn orbit_equality_arithmetic() {
        let f = fam(2, 1, 3);
        let m = f.big_m() as u64;
        let reps: Vec<_> = f.representatives().collect();
        for &a in &reps {
            assert!(orbit_equal_test(&f, a, a).unwrap());
            let mirror = UsGammaParams { s: f.k - a.s, ell: (m - a.ell % m) % m + m };
            assert!(orbit_equal_test(&f, a, mirror).unwrap());
            for &b in &reps {
                assert_eq!(orbit_equal_test(&f, a, b).unwrap(), a == b);
            }
        }
    }

    /// The congruence criteria agree with explicit subspace orbits at q = 2, k = 3.
    #[test]
    fn criteria_match_direct_orbits() {
        let f = fam(2, 1, 3);
        let ctx = build_field(2, 1, 6, None).unwrap();
        let mut all = Vec::new();
        for s in [1u32, 2] {
            for ell in 1..=f.big_m() as u64 {
                let par = UsGammaParams { s, ell };
                if f.validate(par).is_ok() {
                    all.push((par, make_usg(&ctx, par).unwrap()));
                }
            }
        }
        for (a, ua) in &all {
            for i in 0..ctx.m() {
                let image = galois_action_oracle(&ctx, ua, i);
                for (b, ub) in &all {
                    let direct = orbit_contains(&ctx, ub, &image).unwrap();
                    assert_eq!(frobenius_isometry_test(&f, *a, *b, i).unwrap(), direct, "{a:?} {b:?} {i}");
                }
            }
        }
    }

    #[test]
    fn aut_group_properties() {
        let f = fam(3, 1, 3);
        for par in f.representatives() {
            let g = aut_group(&f, par, 1).unwrap();
            assert!(g.contains(&6));
            for &a in &g {
                for &b in &g {
                    let c = (a + b - 1) % 6 + 1;
                    assert!(g.contains(&c));
                }
            }
            assert_eq!(g.contains(&2), par.ell % 7 == 0);
        }
        assert!(aut_group(&fam(2, 2, 3), UsGammaParams { s: 1, ell: 1 }, 3).is_err());
        assert_eq!(aut_group(&fam(2, 2, 3), UsGammaParams { s: 1, ell: 1 }, 2).unwrap().last(), Some(&6));
    }

    #[test]
    fn frobenius_group_matches_action() {
        let f = fam(3, 1, 3);
        let ctx = build_field(3, 1, 6, None).unwrap();
        let report = frobenius_structure(&f).unwrap();
        for par in f.representatives() {
            let g = frobenius_group(&report, par);
            assert_eq!(g, frobenius_group_by_action(&ctx, par).unwrap(), "{par:?}");
            assert_eq!(frobenius_orbit(&f, par).unwrap().len() as u32, g.orbit_size);
            let auts = aut_group(&f, par, 1).unwrap();
            assert_eq!(auts[0], g.generator);
        }
    }

    #[test]
    fn galois_trivial_powers() {
        let ctx = build_field(3, 1, 6, None).unwrap();
        let u = make_usg(&ctx, UsGammaParams { s: 1, ell: 5 }).unwrap();
        assert_eq!(galois_action_oracle(&ctx, &u, 0), u);
        assert_eq!(galois_action_oracle(&ctx, &u, 6), u);
    }

    #[test]
    fn isometry_example_f256() {
        let ctx = build_field(2, 2, 4, Some(&[1, 0, 1, 1, 1, 0, 0, 0, 1])).unwrap();
        let w = ctx.omega();
        let u = Subspace::span(&ctx, &[ctx.one(), w], 2).unwrap();
        let u2 = Subspace::span(&ctx, &[ctx.one(), ctx.mul(w, w)], 2).unwrap();
        assert!(u.is_generic(&ctx) && u2.is_generic(&ctx));
        assert_eq!(u.orbit_size(&ctx).unwrap(), 85);
        assert_eq!(u2.orbit_size(&ctx).unwrap(), 85);
        assert_eq!(galois_action_oracle(&ctx, &u, 1), u2);
        for i in 0..85 {
            let a = ctx.pow_omega(i);
            let lhs = galois_action_oracle(&ctx, &u.scalar_shift(&ctx, a).unwrap(), 1);
            assert_eq!(lhs, u2.scalar_shift(&ctx, ctx.mul(a, a)).unwrap());
        }
        for j in 0..4 {
            let psi = galois_action_oracle(&ctx, &u, 2 * j);
            assert!(!orbit_contains(&ctx, &u2, &psi).unwrap(), "σ_2^{}", 2 * j);
        }
    }
}
