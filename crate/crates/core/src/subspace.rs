//! `F_{p^g}`-subspaces of `F_{p^m}`.
//!
//! A subspace is stored as the reduced row echelon form of its span over the
//! prime field, in polynomial-basis coordinates. The `F_p`-span of an
//! `F_{p^g}`-subspace is the same set, so this form is canonical for every
//! ground field in the tower at once; `ground_deg` records which scalars the
//! space is closed under and fixes the dimension count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::linalg::Echelon;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ground_deg: u32,
    basis: Echelon,
}

/// Wire form: a basis over the ground field as `"w^e"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceWire {
    pub ground_deg: u32,
    pub basis: Vec<FieldElem>,
}

fn check_ground(ctx: &FieldCtx, g: u32) -> Result<()> {
    if g == 0 || ctx.m() % g != 0 {
        return Err(Error::DegreeNotDividing { inner: g, outer: ctx.m() });
    }
    Ok(())
}

impl Subspace {
    /// Ground-field span of `gens`. Zero and repeated generators are allowed.
    pub fn span(ctx: &FieldCtx, gens: &[FieldElem], ground_deg: u32) -> Result<Subspace> {
        check_ground(ctx, ground_deg)?;
        let zeta = ctx.subfield_generator(ground_deg)?;
        let mut basis = Echelon::new(ctx.p(), ctx.m() as usize);
        for &g in gens {
            if g.is_zero() {
                continue;
            }
            let mut x = g;
            for _ in 0..ground_deg {
                basis.insert(&ctx.coords(x));
                x = ctx.mul(x, zeta);
            }
        }
        Ok(Subspace { ground_deg, basis })
    }

    pub fn zero(ctx: &FieldCtx, ground_deg: u32) -> Result<Subspace> {
        Self::span(ctx, &[], ground_deg)
    }

    pub fn whole(ctx: &FieldCtx, ground_deg: u32) -> Result<Subspace> {
        Self::span(ctx, &[ctx.one()], ctx.m())?.with_ground(ground_deg)
    }

    /// The subfield `F_{p^d}` viewed as an `F_{p^g}`-subspace (`g | d`).
    pub fn subfield(ctx: &FieldCtx, d: u32, ground_deg: u32) -> Result<Subspace> {
        check_ground(ctx, d)?;
        Self::span(ctx, &[ctx.one()], d)?.with_ground(ground_deg)
    }

    /// Reinterprets the space over a smaller ground field `F_{p^g}` with
    /// `g | ground_deg`.
    pub fn with_ground(mut self, g: u32) -> Result<Subspace> {
        if g == 0 || self.ground_deg % g != 0 {
            return Err(Error::DegreeNotDividing { inner: g, outer: self.ground_deg });
        }
        self.ground_deg = g;
        Ok(self)
    }

    pub fn from_wire(ctx: &FieldCtx, wire: &SubspaceWire) -> Result<Subspace> {
        for &e in &wire.basis {
            ctx.check(e)?;
        }
        Self::span(ctx, &wire.basis, wire.ground_deg)
    }

    pub fn to_wire(&self, ctx: &FieldCtx) -> SubspaceWire {
        SubspaceWire {
            ground_deg: self.ground_deg,
            basis: self.ground_basis(ctx),
        }
    }

    pub fn ground_deg(&self) -> u32 {
        self.ground_deg
    }

    /// Dimension over the ground field.
    pub fn dim(&self) -> usize {
        self.basis.rank() / self.ground_deg as usize
    }

    pub fn fp_rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rank() == 0
    }

    /// The `F_p`-echelon rows as field elements.
    pub fn fp_basis(&self, ctx: &FieldCtx) -> Vec<FieldElem> {
        self.basis.rows().iter().map(|r| ctx.from_coords(r)).collect()
    }

    /// A basis over the ground field, chosen greedily from the echelon rows.
    pub fn ground_basis(&self, ctx: &FieldCtx) -> Vec<FieldElem> {
        let zeta = ctx.subfield_generator(self.ground_deg).expect("ground degree divides m");
        let mut seen = Echelon::new(ctx.p(), ctx.m() as usize);
        let mut out = Vec::new();
        for row in self.basis.rows() {
            if seen.contains(row) {
                continue;
            }
            let x = ctx.from_coords(row);
            out.push(x);
            let mut y = x;
            for _ in 0..self.ground_deg {
                seen.insert(&ctx.coords(y));
                y = ctx.mul(y, zeta);
            }
        }
        out
    }

    pub fn contains(&self, ctx: &FieldCtx, x: FieldElem) -> bool {
        self.basis.contains(&ctx.coords(x))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.rows().iter().all(|r| other.basis.contains(r))
    }

    /// Every nonzero element of the space.
    pub fn nonzero_elements(&self, ctx: &FieldCtx) -> Vec<FieldElem> {
        self.basis
            .elements()
            .iter()
            .skip(1)
            .map(|v| ctx.from_coords(v))
            .collect()
    }

    fn same_ground(&self, other: &Subspace) -> Result<()> {
        if self.ground_deg != other.ground_deg {
            return Err(Error::GroundFieldMismatch {
                left: self.ground_deg,
                right: other.ground_deg,
            });
        }
        Ok(())
    }

    pub fn intersect_dim(&self, other: &Subspace) -> Result<usize> {
        self.same_ground(other)?;
        let sum = self
            .basis
            .rank_with(other.basis.rows().iter().map(|r| r.as_slice()));
        Ok((self.fp_rank() + other.fp_rank() - sum) / self.ground_deg as usize)
    }

    /// Subspace distance `dim U + dim V - 2 dim(U ∩ V)`.
    pub fn distance(&self, other: &Subspace) -> Result<usize> {
        let cap = self.intersect_dim(other)?;
        Ok(self.dim() + other.dim() - 2 * cap)
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ground(other)?;
        Ok(Subspace {
            ground_deg: self.ground_deg,
            basis: self.basis.intersection(&other.basis),
        })
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ground(other)?;
        Ok(Subspace {
            ground_deg: self.ground_deg,
            basis: self.basis.sum(&other.basis),
        })
    }

    fn map_basis(&self, ctx: &FieldCtx, f: impl Fn(FieldElem) -> FieldElem) -> Subspace {
        let mut basis = Echelon::new(ctx.p(), ctx.m() as usize);
        for x in self.fp_basis(ctx) {
            basis.insert(&ctx.coords(f(x)));
        }
        Subspace {
            ground_deg: self.ground_deg,
            basis,
        }
    }

    /// `αU`.
    pub fn scalar_shift(&self, ctx: &FieldCtx, alpha: FieldElem) -> Result<Subspace> {
        if alpha.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.map_basis(ctx, |x| ctx.mul(alpha, x)))
    }

    /// Image under `σ_p^i`.
    pub fn frobenius_image(&self, ctx: &FieldCtx, i: u32) -> Subspace {
        self.map_basis(ctx, |x| ctx.frobenius(x, i))
    }

    /// Complement with respect to the trace form. For an `F_q`-subspace the
    /// absolute trace and `Tr_{q^n/q}` give the same complement.
    pub fn orthogonal_complement(&self, ctx: &FieldCtx) -> Subspace {
        let m = ctx.m() as usize;
        let monomials: Vec<FieldElem> = (0..m).map(|j| ctx.pow_omega(j as i128)).collect();
        let mut forms = Echelon::new(ctx.p(), m);
        for u in self.fp_basis(ctx) {
            let row: Vec<u8> = monomials
                .iter()
                .map(|&xj| ctx.abs_trace(ctx.mul(xj, u)) as u8)
                .collect();
            forms.insert(&row);
        }
        Subspace {
            ground_deg: self.ground_deg,
            basis: forms.nullspace(),
        }
    }

    /// Degree `t` over `F_p` with `Stab(U) = F_{p^t}^*`.
    pub fn stabilizer_degree(&self, ctx: &FieldCtx) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroSubspace);
        }
        let m = ctx.m();
        let mut candidates: Vec<u32> = (1..=m)
            .filter(|d| m % d == 0 && d % self.ground_deg == 0)
            .collect();
        candidates.reverse();
        for d in candidates {
            let zeta = ctx.subfield_generator(d)?;
            let shifted = self.scalar_shift(ctx, zeta)?;
            if shifted.is_subspace_of(self) {
                return Ok(d);
            }
        }
        unreachable!("the ground field always stabilizes the space")
    }

    /// Number of distinct shifts `αU`.
    pub fn orbit_size(&self, ctx: &FieldCtx) -> Result<u64> {
        let t = self.stabilizer_degree(ctx)?;
        Ok(ctx.subfield_step(t))
    }

    /// `true` iff no shift of `U` lies in a proper subfield.
    ///
    /// `αU ⊆ F_{p^d}` for some `α` exactly when the logs of a spanning set
    /// of `U` are all congruent modulo `(p^m - 1)/(p^d - 1)`.
    pub fn is_generic(&self, ctx: &FieldCtx) -> bool {
        let logs: Vec<u64> = self
            .fp_basis(ctx)
            .into_iter()
            .filter_map(|x| x.log().map(u64::from))
            .collect();
        let m = ctx.m();
        for d in (1..m).filter(|d| m % d == 0 && *d as usize >= self.fp_rank()) {
            let step = ctx.subfield_step(d);
            if logs.iter().all(|&e| e % step == logs[0] % step) {
                return false;
            }
        }
        true
    }
}

/// Computes `dim_{F_p}(U ∩ ω^j U)` for many `j` against one fixed `U`.
#[derive(Debug, Clone)]
pub struct ShiftIntersector<'a> {
    ctx: &'a FieldCtx,
    space: &'a Subspace,
    logs: Vec<u64>,
}

impl<'a> ShiftIntersector<'a> {
    pub fn new(ctx: &'a FieldCtx, space: &'a Subspace) -> Self {
        let logs = space
            .fp_basis(ctx)
            .into_iter()
            .map(|x| x.log().expect("echelon rows are nonzero") as u64)
            .collect();
        ShiftIntersector { ctx, space, logs }
    }

    /// `dim_{F_p}(U ∩ ω^j U)`.
    pub fn fp_dim(&self, j: u64) -> usize {
        let ctx = self.ctx;
        let (p, m) = (ctx.p(), ctx.m() as usize);
        let mut extra = Echelon::new(p, m);
        let mut v = vec![0u8; m];
        for &e in &self.logs {
            let mut packed = ctx.antilog_packed(e + j);
            for d in v.iter_mut() {
                *d = (packed % p) as u8;
                packed /= p;
            }
            self.space.echelon().reduce_in_place(&mut v);
            extra.insert(&v);
        }
        self.logs.len() - extra.rank()
    }

    /// `dim(U ∩ ω^j U)` over the ground field of `U`.
    pub fn dim(&self, j: u64) -> usize {
        self.fp_dim(j) / self.space.ground_deg() as usize
    }
}
