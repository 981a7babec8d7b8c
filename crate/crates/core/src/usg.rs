//! The family `U_{s,γ} = {u + u^{q^s}γ : u ∈ F_{q^k}} ⊂ F_{q^{2k}}`.
//!
//! `γ` is always `ω^ell`, so most questions about the family reduce to
//! congruences on `ell`. The field-dependent parts (the subspace itself and
//! the kernel of `f_α`) need a context for `F_{p^{2hk}}`.

use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, gcd, pow_u128};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::linalg::Echelon;
use crate::orbit::IntersectionSweep;
use crate::subspace::{ShiftIntersector, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UsGammaParams {
    pub s: u32,
    pub ell: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsgClass {
    Optimal,
    QuasiOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormCounts {
    pub total: u128,
    pub quasi_optimal: u128,
    pub optimal: u128,
    pub with_q2_shift: u128,
}

/// The parameters `(p, h, k)` of a family living in `F_{q^{2k}}`, `q = p^h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsgFamily {
    pub p: u32,
    pub h: u32,
    pub k: u32,
}

impl UsgFamily {
    pub fn new(p: u32, h: u32, k: u32) -> Result<Self> {
        if !crate::arith::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if h == 0 {
            return Err(Error::InvalidDegree { h, n: 2 * k });
        }
        if k <= 2 {
            return Err(Error::InvalidParams(format!("the family needs k > 2, got k = {k}")));
        }
        let fam = UsgFamily { p, h, k };
        if crate::arith::checked_pow(fam.q(), 2 * k).is_none() {
            return Err(Error::InvalidParams("q^{2k} overflows".into()));
        }
        Ok(fam)
    }

    /// The family matching a field `F_{q^n}` with `n = 2k`.
    pub fn for_field(ctx: &FieldCtx) -> Result<Self> {
        if ctx.n() % 2 != 0 {
            return Err(Error::InvalidParams(format!("n = {} is odd", ctx.n())));
        }
        Self::new(ctx.p(), ctx.h(), ctx.n() / 2)
    }

    pub fn q(&self) -> u128 {
        pow_u128(self.p as u128, self.h)
    }

    pub fn n(&self) -> u32 {
        2 * self.k
    }

    /// `q^{2k} - 1`.
    pub fn group_order(&self) -> u128 {
        pow_u128(self.q(), 2 * self.k) - 1
    }

    /// `q^k + 1`; `F_{q^k}^* = ⟨ω^{q^k+1}⟩`.
    pub fn qk1(&self) -> u128 {
        pow_u128(self.q(), self.k) + 1
    }

    /// `M = (q^k + 1)(q - 1)`; `θ_q(F_{q^k}^*) = ⟨ω^M⟩`.
    pub fn big_m(&self) -> u128 {
        self.qk1() * (self.q() - 1)
    }

    pub fn validate(&self, par: UsGammaParams) -> Result<()> {
        if par.s == 0 || par.s >= self.k {
            return Err(Error::InvalidParams(format!("s = {} not in 1..{}", par.s, self.k)));
        }
        if gcd(par.s as u128, self.k as u128) != 1 {
            return Err(Error::InvalidParams(format!("gcd(s, k) = gcd({}, {}) ≠ 1", par.s, self.k)));
        }
        if par.ell as u128 % self.qk1() == 0 {
            return Err(Error::InvalidParams(format!("γ = ω^{} lies in F_{{q^k}}", par.ell)));
        }
        Ok(())
    }

    /// Quasi-optimal iff `N_{q^{2k}/q}(γ) = 1`, i.e. `(q - 1) | ell`.
    pub fn classify_by_norm(&self, par: UsGammaParams) -> Result<UsgClass> {
        self.validate(par)?;
        Ok(if par.ell as u128 % (self.q() - 1) == 0 {
            UsgClass::QuasiOptimal
        } else {
            UsgClass::Optimal
        })
    }

    /// `k` odd and `N_{q^{2k}/q^2}(γ) = -1`.
    ///
    /// With `c = (q^{2k} - 1)/(q^2 - 1)` the norm is `ω^{c·ell}`, and `-1` is
    /// `ω^{c(q^2-1)/2}` (odd `q`) or `1` (even `q`). Dividing the congruence
    /// by `c` leaves a condition on `ell mod (q^2 - 1)`.
    pub fn contains_q2_shift(&self, par: UsGammaParams) -> Result<bool> {
        self.validate(par)?;
        if self.k % 2 == 0 {
            return Ok(false);
        }
        let q = self.q();
        let r = par.ell as u128 % (q * q - 1);
        let minus_one = if self.p == 2 { 0 } else { (q * q - 1) / 2 };
        Ok(r == minus_one)
    }

    /// The representative `(s, ell)` with `s ≤ ⌊k/2⌋` and `ell ∈ 1..=M` of the
    /// orbit `Orb(U_{s,ω^ell})`.
    pub fn canonical(&self, par: UsGammaParams) -> Result<UsGammaParams> {
        self.validate(par)?;
        let m = self.big_m();
        let (s, e) = if par.s <= self.k / 2 {
            (par.s, par.ell as u128 % m)
        } else {
            (self.k - par.s, (m - par.ell as u128 % m) % m)
        };
        let ell = if e == 0 { m } else { e };
        Ok(UsGammaParams { s, ell: ell as u64 })
    }

    pub fn s_values(&self) -> Vec<u32> {
        (1..=self.k / 2)
            .filter(|&s| gcd(s as u128, self.k as u128) == 1)
            .collect()
    }

    /// All `(s, ell)` with `s ≤ ⌊k/2⌋`, `gcd(s, k) = 1`, `ell ∈ 1..=M` and
    /// `(q^k + 1) ∤ ell`, ordered by `s` then `ell`.
    pub fn representatives(&self) -> impl Iterator<Item = UsGammaParams> + '_ {
        let m = self.big_m() as u64;
        let qk1 = self.qk1() as u64;
        self.s_values().into_iter().flat_map(move |s| {
            (1..=m)
                .filter(move |ell| ell % qk1 != 0)
                .map(move |ell| UsGammaParams { s, ell })
        })
    }

    pub fn closed_form_counts(&self) -> ClosedFormCounts {
        let half_phi = euler_phi(self.k as u64) as u128 / 2;
        let q = self.q();
        let qk = pow_u128(q, self.k);
        let total = half_phi * qk * (q - 1);
        let quasi_optimal = if q % 2 == 0 { half_phi * qk } else { half_phi * (qk - 1) };
        let with_q2_shift = if self.k % 2 == 1 {
            half_phi * ((qk + 1) / (q + 1) - 1)
        } else {
            0
        };
        ClosedFormCounts {
            total,
            quasi_optimal,
            optimal: total - quasi_optimal,
            with_q2_shift,
        }
    }
}

/// `U_{s,γ}` as an `F_q`-subspace of `F_{q^{2k}}`.
pub fn make_usg(ctx: &FieldCtx, par: UsGammaParams) -> Result<Subspace> {
    let fam = UsgFamily::for_field(ctx)?;
    fam.validate(par)?;
    let gamma = ctx.pow_omega(par.ell as i128);
    let qs = ctx.h() * par.s;
    let gens: Vec<FieldElem> = fqk_basis(ctx, fam.k)?
        .into_iter()
        .map(|b| ctx.add(b, ctx.mul(ctx.frobenius(b, qs), gamma)))
        .collect();
    Subspace::span(ctx, &gens, ctx.h())
}

/// `1, ζ, …, ζ^{hk-1}` for a generator `ζ` of `F_{q^k}^*`: an `F_p`-basis of `F_{q^k}`.
fn fqk_basis(ctx: &FieldCtx, k: u32) -> Result<Vec<FieldElem>> {
    let d = ctx.h() * k;
    let zeta = ctx.subfield_generator(d)?;
    Ok((0..d as i128).map(|i| ctx.pow(zeta, i).expect("nonzero base")).collect())
}

/// Kernel dimension of `f_α` on `F_{q^k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelDim {
    pub dim: usize,
    /// `α ∈ F_q^*`: `f_α` vanishes and `αU = U`.
    pub stabilizer: bool,
}

/// Precomputed data for evaluating the linearized polynomials `f_α` of one
/// `U_{s,γ}`.
#[derive(Debug, Clone)]
pub struct FAlpha<'a> {
    ctx: &'a FieldCtx,
    k: u32,
    /// Frobenius exponent over `F_p` of `x ↦ x^{q^s}`.
    qs: u32,
    gamma: FieldElem,
    gamma_bar: FieldElem,
    a: FieldElem,
    b_qs: FieldElem,
    basis: Vec<FieldElem>,
}

impl<'a> FAlpha<'a> {
    pub fn new(ctx: &'a FieldCtx, par: UsGammaParams) -> Result<Self> {
        let fam = UsgFamily::for_field(ctx)?;
        fam.validate(par)?;
        let hk = ctx.h() * fam.k;
        let gamma = ctx.pow_omega(par.ell as i128);
        let gamma_bar = ctx.frobenius(gamma, hk);
        let a = ctx.add(gamma, gamma_bar);
        let b = ctx.neg(ctx.mul(gamma, gamma_bar));
        let qs = ctx.h() * par.s;
        Ok(FAlpha {
            ctx,
            k: fam.k,
            qs,
            gamma,
            gamma_bar,
            a,
            b_qs: ctx.frobenius(b, qs),
            basis: fqk_basis(ctx, fam.k)?,
        })
    }

    /// Coordinates `(α_0, α_1)` of `α` in the `F_{q^k}`-basis `{1, γ}`.
    pub fn decompose(&self, alpha: FieldElem) -> (FieldElem, FieldElem) {
        let ctx = self.ctx;
        let alpha_bar = ctx.frobenius(alpha, ctx.h() * self.k);
        let den = ctx.sub(self.gamma, self.gamma_bar);
        let a1 = ctx.div(ctx.sub(alpha, alpha_bar), den).expect("γ ∉ F_{q^k}");
        let a0 = ctx.sub(alpha, ctx.mul(a1, self.gamma));
        (a0, a1)
    }

    /// Coefficients `(c_0, c_1, c_2)` of `f_α = c_0 X + c_1 X^{q^s} + c_2 X^{q^{2s}}`.
    pub fn coefficients(&self, alpha: FieldElem) -> [FieldElem; 3] {
        let ctx = self.ctx;
        let (a0, a1) = self.decompose(alpha);
        let c0 = ctx.neg(a1);
        let c1 = ctx.sub(ctx.sub(ctx.frobenius(a0, self.qs), a0), ctx.mul(a1, self.a));
        let c2 = ctx.mul(ctx.frobenius(a1, self.qs), self.b_qs);
        [c0, c1, c2]
    }

    /// `dim_{F_q} ker f_α`, which equals `dim(U ∩ αU)`.
    pub fn kernel_dim(&self, alpha: FieldElem) -> Result<KernelDim> {
        let ctx = self.ctx;
        if alpha.is_zero() {
            return Err(Error::ZeroElement);
        }
        if ctx.subfield_test(alpha, ctx.h())? {
            return Ok(KernelDim {
                dim: self.k as usize,
                stabilizer: true,
            });
        }
        let [c0, c1, c2] = self.coefficients(alpha);
        let mut image = Echelon::new(ctx.p(), ctx.m() as usize);
        for &x in &self.basis {
            let x1 = ctx.frobenius(x, self.qs);
            let x2 = ctx.frobenius(x1, self.qs);
            let y = ctx.add(ctx.add(ctx.mul(c0, x), ctx.mul(c1, x1)), ctx.mul(c2, x2));
            image.insert(&ctx.coords(y));
        }
        let ker_fp = self.basis.len() - image.rank();
        Ok(KernelDim {
            dim: ker_fp / ctx.h() as usize,
            stabilizer: false,
        })
    }
}

/// `dim_{F_q} ker f_α` for `U_{s,γ}`.
pub fn falpha_kernel_dim(ctx: &FieldCtx, par: UsGammaParams, alpha: FieldElem) -> Result<KernelDim> {
    FAlpha::new(ctx, par)?.kernel_dim(alpha)
}

/// The intersection sweep of `Orb(U_{s,γ})` computed from `f_α` kernels
/// instead of subspace intersections. The stabilizer is `F_q^*`.
pub fn falpha_sweep(ctx: &FieldCtx, par: UsGammaParams) -> Result<IntersectionSweep> {
    use rayon::prelude::*;
    let f = FAlpha::new(ctx, par)?;
    let k = f.k as usize;
    let orbit_size = ctx.subfield_step(ctx.h());
    let counts = (1..orbit_size)
        .into_par_iter()
        .map(|j| f.kernel_dim(ctx.pow_omega(j as i128)).map(|d| d.dim))
        .try_fold(
            || vec![0u64; k + 1],
            |mut acc, d| {
                acc[d?] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0u64; k + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    if counts[k] != 0 {
        return Err(Error::Mismatch("f_α vanished outside F_q".into()));
    }
    Ok(IntersectionSweep {
        stab_fp_deg: ctx.h(),
        orbit_size,
        k,
        counts,
    })
}

/// How an existence witness was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ExistenceMethod {
    /// `⟨1, λ, λ^2⟩` with `λ = ω^lambda_exp`.
    PowerSpan { lambda_exp: u64 },
    /// A `k`-subspace of `U_{1,γ} ⊂ F_{q^n}` (half dimension) containing
    /// `S + ᾱ^{-1}S` where `S = U ∩ ᾱU`, `γ = ω^gamma_exp`, `ᾱ = ω^alpha_exp`.
    UsgRestriction { gamma_exp: u64, alpha_exp: u64 },
}

#[derive(Debug, Clone)]
pub struct ExistenceWitness {
    pub k: u32,
    pub method: ExistenceMethod,
    pub subspace: Subspace,
}

/// Builds a candidate quasi-optimal full-length code in `G_q(k, n)` for even
/// `n` and `3 ≤ k ≤ n/2`. The caller checks the result with `orbit_profile`.
pub fn existence_construction(ctx: &FieldCtx, k: u32) -> Result<ExistenceWitness> {
    let n = ctx.n();
    if n % 2 != 0 || k < 3 || 2 * k > n {
        return Err(Error::InvalidParams(format!(
            "need n even and 3 ≤ k ≤ n/2, got n = {n}, k = {k}"
        )));
    }
    let h = ctx.h();
    if k == 3 {
        let bad_degrees: Vec<u32> = [2 * h, 3 * h]
            .into_iter()
            .filter(|d| ctx.m() % d == 0)
            .collect();
        let lambda_exp = (1..ctx.group_order())
            .find(|&j| {
                let x = ctx.pow_omega(j as i128);
                bad_degrees.iter().all(|&d| !ctx.subfield_test(x, d).unwrap())
            })
            .ok_or_else(|| Error::InvalidParams("no λ outside F_{q^2} ∪ F_{q^3}".into()))?;
        let lam = ctx.pow_omega(lambda_exp as i128);
        let u = Subspace::span(ctx, &[ctx.one(), lam, ctx.mul(lam, lam)], h)?;
        return Ok(ExistenceWitness {
            k,
            method: ExistenceMethod::PowerSpan { lambda_exp },
            subspace: u,
        });
    }
    let fam = UsgFamily::for_field(ctx)?;
    let q1 = (fam.q() - 1) as u64;
    let qk1 = fam.qk1() as u64;
    let gamma_exp = (1..)
        .find(|e| e % q1 == 0 && e % qk1 != 0)
        .expect("an admissible exponent exists");
    let u = make_usg(ctx, UsGammaParams { s: 1, ell: gamma_exp })?;
    let inter = ShiftIntersector::new(ctx, &u);
    let alpha_exp = (1..ctx.subfield_step(h))
        .find(|&j| inter.dim(j) == 2)
        .ok_or_else(|| Error::Mismatch("U_{1,γ} has no 2-dimensional intersection".into()))?;
    let alpha = ctx.pow_omega(alpha_exp as i128);
    let s = u.intersection(&u.scalar_shift(ctx, alpha)?)?;
    let s_prime = s.scalar_shift(ctx, ctx.inv(alpha)?)?;
    let mut hat = s.sum(&s_prime)?;
    for b in u.ground_basis(ctx) {
        if hat.dim() >= k as usize {
            break;
        }
        if !hat.contains(ctx, b) {
            hat = hat.sum(&Subspace::span(ctx, &[b], h)?)?;
        }
    }
    if hat.dim() != k as usize {
        return Err(Error::Mismatch(format!(
            "S + S' has dimension {} > k = {k}",
            hat.dim()
        )));
    }
    Ok(ExistenceWitness {
        k,
        method: ExistenceMethod::UsgRestriction { gamma_exp, alpha_exp },
        subspace: hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::orbit::{contains_q2_shift_scan, intersection_sweep, orbit_profile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam(p: u32, h: u32, k: u32) -> UsgFamily {
        UsgFamily::new(p, h, k).unwrap()
    }

    #[test]
    fn closed_forms() {
        let c = fam(3, 1, 3).closed_form_counts();
        assert_eq!((c.total, c.quasi_optimal, c.optimal, c.with_q2_shift), (54, 26, 28, 6));
        let c = fam(2, 1, 5).closed_form_counts();
        assert_eq!((c.total, c.quasi_optimal, c.optimal, c.with_q2_shift), (64, 64, 0, 20));
        let c = fam(3, 3, 4).closed_form_counts();
        assert_eq!(
            (c.total, c.quasi_optimal, c.optimal, c.with_q2_shift),
            (13_817_466, 531_440, 13_286_026, 0)
        );
    }

    /// Counts by direct tally over the representatives agree with the closed forms.
    #[test]
    fn tallies_match_closed_forms() {
        for (p, h, k) in [(2, 1, 3), (3, 1, 3), (2, 1, 5), (2, 2, 3), (5, 1, 3), (2, 1, 4), (3, 1, 4), (2, 1, 7), (3, 1, 5)] {
            let f = fam(p, h, k);
            let reps: Vec<_> = f.representatives().collect();
            let quasi = reps
                .iter()
                .filter(|&&r| f.classify_by_norm(r).unwrap() == UsgClass::QuasiOptimal)
                .count() as u128;
            let shift = reps.iter().filter(|&&r| f.contains_q2_shift(r).unwrap()).count() as u128;
            let c = f.closed_form_counts();
            assert_eq!(reps.len() as u128, c.total, "{p} {h} {k}");
            assert_eq!(quasi, c.quasi_optimal, "{p} {h} {k}");
            assert_eq!(shift, c.with_q2_shift, "{p} {h} {k}");
        }
    }

    /// The reduced congruence agrees with the full exponent computation.
    #[test]
    fn shift_congruence_matches_norm_exponent() {
        for (p, h, k) in [(3u32, 1u32, 3u32), (2, 1, 5), (5, 1, 3), (2, 2, 3), (3, 2, 3)] {
            let f = fam(p, h, k);
            let n = f.group_order();
            let q = f.q();
            for r in f.representatives() {
                let e = r.ell as u128 * (n / (q * q - 1)) % n;
                let minus_one = if p == 2 { 0 } else { n / 2 };
                assert_eq!(f.contains_q2_shift(r).unwrap(), e == minus_one);
            }
        }
    }

    #[test]
    fn validation_errors() {
        assert!(UsgFamily::new(2, 1, 2).is_err());
        let f = fam(2, 1, 4);
        assert!(f.validate(UsGammaParams { s: 2, ell: 1 }).is_err());
        assert!(f.validate(UsGammaParams { s: 1, ell: 17 }).is_err());
        assert!(f.validate(UsGammaParams { s: 0, ell: 1 }).is_err());
        assert!(f.validate(UsGammaParams { s: 3, ell: 1 }).is_ok());
    }

    #[test]
    fn q2_always_quasi_optimal() {
        let f = fam(2, 1, 5);
        assert!(f
            .representatives()
            .all(|r| f.classify_by_norm(r).unwrap() == UsgClass::QuasiOptimal));
    }

    #[test]
    fn canonical_form() {
        let f = fam(3, 1, 3);
        let m = f.big_m() as u64;
        let c = f.canonical(UsGammaParams { s: 2, ell: 5 }).unwrap();
        assert_eq!(c, UsGammaParams { s: 1, ell: m - 5 });
        let c = f.canonical(UsGammaParams { s: 1, ell: m + 3 }).unwrap();
        assert_eq!(c, UsGammaParams { s: 1, ell: 3 });
    }

    #[test]
    fn make_usg_basic_properties() {
        for (p, h, k) in [(2u32, 1u32, 3u32), (3, 1, 3), (2, 1, 4), (2, 2, 3)] {
            let ctx = build_field(p, h, 2 * k, None).unwrap();
            let f = fam(p, h, k);
            for r in f.representatives().step_by(5).take(12) {
                let u = make_usg(&ctx, r).unwrap();
                assert_eq!(u.dim(), k as usize);
                assert_eq!(u.stabilizer_degree(&ctx).unwrap(), h);
                assert!(u.is_generic(&ctx));
                let x = u.ground_basis(&ctx)[0];
                let shift = Subspace::subfield(&ctx, h * k, h)
                    .unwrap()
                    .scalar_shift(&ctx, x)
                    .unwrap();
                assert_ne!(u, shift);
            }
        }
    }

    #[test]
    fn make_usg_matches_definition() {
        let ctx = build_field(2, 1, 6, None).unwrap();
        let par = UsGammaParams { s: 1, ell: 4 };
        let u = make_usg(&ctx, par).unwrap();
        let gamma = ctx.pow_omega(4);
        for x in ctx.nonzero().filter(|&x| ctx.subfield_test(x, 3).unwrap()) {
            assert!(u.contains(&ctx, ctx.add(x, ctx.mul(ctx.frobenius(x, 1), gamma))));
        }
    }

    #[test]
    fn falpha_exhaustive_q2_k3() {
        let ctx = build_field(2, 1, 6, None).unwrap();
        let f = fam(2, 1, 3);
        for r in f.representatives() {
            let u = make_usg(&ctx, r).unwrap();
            let fa = FAlpha::new(&ctx, r).unwrap();
            for alpha in ctx.nonzero() {
                let kd = fa.kernel_dim(alpha).unwrap();
                let direct = u.intersect_dim(&u.scalar_shift(&ctx, alpha).unwrap()).unwrap();
                assert_eq!(kd.dim, direct, "{r:?} α={alpha}");
                assert_eq!(kd.stabilizer, ctx.subfield_test(alpha, 1).unwrap());
                if !kd.stabilizer {
                    assert!(kd.dim <= 2);
                }
            }
        }
    }

    #[test]
    fn falpha_decomposition_roundtrip() {
        let ctx = build_field(3, 1, 6, None).unwrap();
        let fa = FAlpha::new(&ctx, UsGammaParams { s: 1, ell: 5 }).unwrap();
        for alpha in ctx.nonzero().step_by(7) {
            let (a0, a1) = fa.decompose(alpha);
            assert!(ctx.subfield_test(a0, 3).unwrap() && ctx.subfield_test(a1, 3).unwrap());
            assert_eq!(ctx.add(a0, ctx.mul(a1, ctx.pow_omega(5))), alpha);
        }
    }

    #[test]
    fn falpha_sampled_q3_k3() {
        let ctx = build_field(3, 1, 6, None).unwrap();
        let f = fam(3, 1, 3);
        let reps: Vec<_> = f.representatives().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..1200 {
            let r = reps[rng.random_range(0..reps.len())];
            let alpha = ctx.pow_omega(rng.random_range(0..ctx.group_order()) as i128);
            let u = make_usg(&ctx, r).unwrap();
            let kd = falpha_kernel_dim(&ctx, r, alpha).unwrap();
            let direct = u.intersect_dim(&u.scalar_shift(&ctx, alpha).unwrap()).unwrap();
            assert_eq!(kd.dim, direct);
        }
    }

    #[test]
    fn falpha_sweep_matches_brute() {
        let ctx = build_field(3, 1, 6, None).unwrap();
        let f = fam(3, 1, 3);
        for r in f.representatives().step_by(9) {
            let u = make_usg(&ctx, r).unwrap();
            assert_eq!(falpha_sweep(&ctx, r).unwrap(), intersection_sweep(&ctx, &u).unwrap());
        }
    }

    #[test]
    fn norm_and_shift_criteria_match_brute_force() {
        for (p, k) in [(2u32, 3u32), (3, 3), (2, 4)] {
            let ctx = build_field(p, 1, 2 * k, None).unwrap();
            let f = fam(p, 1, k);
            for r in f.representatives() {
                let u = make_usg(&ctx, r).unwrap();
                let prof = orbit_profile(&ctx, &u).unwrap();
                assert!(prof.flags.full_length);
                assert!(matches!(prof.distance, Some(d) if d == 2 * k as usize - 2 || d == 2 * k as usize - 4));
                let quasi = f.classify_by_norm(r).unwrap() == UsgClass::QuasiOptimal;
                assert_eq!(quasi, prof.flags.quasi_optimal, "{r:?}");
                assert_eq!(!quasi, prof.flags.optimal, "{r:?}");
                assert_eq!(f.contains_q2_shift(r).unwrap(), contains_q2_shift_scan(&ctx, &u), "{r:?}");
            }
        }
    }

    #[test]
    fn existence_small() {
        for (p, n) in [(2u32, 6u32), (2, 8), (3, 6)] {
            let ctx = build_field(p, 1, n, None).unwrap();
            for k in 3..=n / 2 {
                let w = existence_construction(&ctx, k).unwrap();
                let prof = orbit_profile(&ctx, &w.subspace).unwrap();
                assert_eq!(prof.k, k as usize);
                assert!(prof.flags.full_length && prof.flags.quasi_optimal, "{p} {n} {k}");
            }
        }
        let ctx = build_field(2, 1, 7, None).unwrap();
        assert!(existence_construction(&ctx, 3).is_err());
    }
}
