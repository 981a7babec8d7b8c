//! Log/antilog arithmetic in `F_{p^m}` together with the subfield tower
//! `F_p ⊂ F_q ⊂ F_{q^n}`, where `q = p^h` and `m = hn`.
//!
//! Elements are stored as discrete logarithms with respect to the fixed
//! primitive element `ω`, the residue class of `X` modulo the field modulus.
//! Coordinates over `F_p` use the polynomial basis `1, X, …, X^{m-1}` and are
//! packed into a single integer `c_0 + c_1 p + … + c_{m-1} p^{m-1}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, is_prime, pow_mod};
use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const TABLE_LIMIT: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// One element of `F_{p^m}`: zero, or `ω^e` with `0 ≤ e < p^m - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FieldElem {
    Zero,
    Pow(u32),
}

impl FieldElem {
    pub fn log(self) -> Option<u32> {
        match self {
            FieldElem::Zero => None,
            FieldElem::Pow(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, FieldElem::Zero)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Zero => f.write_str("0"),
            FieldElem::Pow(e) => write!(f, "w^{e}"),
        }
    }
}

/// Parses the wire format without range checking; use
/// [`FieldCtx::parse_elem`] to also reject exponents outside the group.
impl FromStr for FieldElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "0" {
            return Ok(FieldElem::Zero);
        }
        let digits = s
            .strip_prefix("w^")
            .ok_or_else(|| Error::Parse(format!("expected \"0\" or \"w^e\", got {s:?}")))?;
        let canonical = !digits.is_empty()
            && digits.bytes().all(|b| b.is_ascii_digit())
            && (digits == "0" || !digits.starts_with('0'));
        if !canonical {
            return Err(Error::Parse(format!("malformed exponent in {s:?}")));
        }
        digits
            .parse::<u32>()
            .map(FieldElem::Pow)
            .map_err(|_| Error::Parse(format!("exponent out of range in {s:?}")))
    }
}

impl From<FieldElem> for String {
    fn from(e: FieldElem) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for FieldElem {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Serializable description of a field: enough to rebuild identical tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub h: u32,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOrNorm {
    Trace,
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Elem(FieldElem),
    Int(i64),
}

/// Immutable field context with log, antilog and Zech tables.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    h: u32,
    n: u32,
    m: u32,
    order: u64,
    modulus: Vec<u32>,
    antilog: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

fn unpack(p: u32, m: u32, mut packed: u32) -> Vec<u32> {
    let mut out = vec![0; m as usize];
    for d in out.iter_mut() {
        *d = packed % p;
        packed /= p;
    }
    out
}

fn pack(p: u32, digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = pow_mod(den[dd] as u128, p as u128 - 2, p as u128) as u32;
    while r.len() > dd {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = top * lead_inv % p;
            let shift = r.len() - 1 - dd;
            for (i, &dc) in den.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * dc % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree at most `deg/2`.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for lower in 0..count {
            let mut g = unpack(p, d as u32, lower as u32);
            g.push(1);
            if poly_rem(p, poly, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Powers of `X` modulo `poly`; `None` unless `X` has order exactly `p^m - 1`.
fn antilog_table(p: u32, poly: &[u32]) -> Option<Vec<u32>> {
    let m = poly.len() - 1;
    let group = (p as u64).pow(m as u32) - 1;
    let mut cur = vec![0u32; m];
    cur[0] = 1;
    let mut table = Vec::with_capacity(group as usize);
    for step in 0..group {
        let packed = pack(p, &cur);
        if step > 0 && packed == 1 {
            return None;
        }
        table.push(packed);
        let top = cur[m - 1];
        for i in (1..m).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..m {
                cur[i] = (cur[i] + p - top * poly[i] % p) % p;
            }
        }
    }
    (pack(p, &cur) == 1).then_some(table)
}

/// Lowest primitive polynomial of degree `m`, ordered by the packed value of
/// its non-leading coefficients.
pub fn default_modulus(p: u32, m: u32) -> Result<Vec<u32>> {
    let count = (p as u64).pow(m);
    for lower in 1..count {
        let mut poly = unpack(p, m, lower as u32);
        if poly[0] == 0 {
            continue;
        }
        poly.push(1);
        if is_irreducible(p, &poly) && antilog_table(p, &poly).is_some() {
            return Ok(poly);
        }
    }
    Err(Error::NoPrimitivePolynomial { p, degree: m })
}

impl FieldCtx {
    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<Self> {
        build_field(desc.p, desc.h, desc.n, desc.modulus.as_deref())
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            h: self.h,
            n: self.n,
            modulus: Some(self.modulus.clone()),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Degree over `F_p`, i.e. `hn`.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.h)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Order of the multiplicative group, `p^m - 1`.
    pub fn group_order(&self) -> u64 {
        self.order - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::Pow(0)
    }

    pub fn omega(&self) -> FieldElem {
        self.pow_omega(1)
    }

    /// `ω^e` with `e` reduced into the group.
    pub fn pow_omega(&self, e: i128) -> FieldElem {
        let n = self.group_order() as i128;
        FieldElem::Pow(e.rem_euclid(n) as u32)
    }

    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let e: FieldElem = s.trim_end_matches(['\r', '\n']).parse()?;
        self.check(e)?;
        Ok(e)
    }

    pub fn check(&self, e: FieldElem) -> Result<()> {
        match e {
            FieldElem::Pow(x) if x as u64 >= self.group_order() => Err(Error::Parse(format!(
                "exponent {x} is not below {}",
                self.group_order()
            ))),
            _ => Ok(()),
        }
    }

    /// Packed `F_p` coordinates of an element.
    pub fn packed(&self, a: FieldElem) -> u32 {
        match a {
            FieldElem::Zero => 0,
            FieldElem::Pow(e) => self.antilog[e as usize],
        }
    }

    pub fn from_packed(&self, packed: u32) -> FieldElem {
        match self.log[packed as usize] {
            NO_LOG => FieldElem::Zero,
            e => FieldElem::Pow(e),
        }
    }

    pub fn coords(&self, a: FieldElem) -> Vec<u8> {
        unpack(self.p, self.m, self.packed(a))
            .into_iter()
            .map(|d| d as u8)
            .collect()
    }

    pub fn from_coords(&self, coords: &[u8]) -> FieldElem {
        let packed = coords.iter().rev().fold(0u32, |acc, &d| acc * self.p + d as u32);
        self.from_packed(packed)
    }

    /// Packed antilog of `ω^e` for a raw exponent.
    pub fn antilog_packed(&self, e: u64) -> u32 {
        self.antilog[(e % self.group_order()) as usize]
    }

    pub fn log_of_packed(&self, packed: u32) -> Option<u32> {
        match self.log[packed as usize] {
            NO_LOG => None,
            e => Some(e),
        }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Zero, x) | (x, FieldElem::Zero) => x,
            (FieldElem::Pow(x), FieldElem::Pow(y)) => {
                let n = self.group_order();
                let diff = (y as u64 + n - x as u64) % n;
                match self.zech[diff as usize] {
                    NO_LOG => FieldElem::Zero,
                    z => FieldElem::Pow(((x as u64 + z as u64) % n) as u32),
                }
            }
        }
    }

    /// Addition through coordinate vectors, independent of the Zech table.
    pub fn add_coords(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let x = unpack(self.p, self.m, self.packed(a));
        let y = unpack(self.p, self.m, self.packed(b));
        let sum: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.from_packed(pack(self.p, &sum))
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        match a {
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Pow(e) if self.p == 2 => FieldElem::Pow(e),
            FieldElem::Pow(e) => self.pow_omega(e as i128 + (self.group_order() / 2) as i128),
        }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Pow(x), FieldElem::Pow(y)) => self.pow_omega(x as i128 + y as i128),
            _ => FieldElem::Zero,
        }
    }

    /// Multiplication through coordinate vectors: schoolbook product reduced
    /// by the modulus.
    pub fn mul_coords(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p as u64;
        let m = self.m as usize;
        let x = unpack(self.p, self.m, self.packed(a));
        let y = unpack(self.p, self.m, self.packed(b));
        let mut prod = vec![0u64; 2 * m];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let mut r = poly_rem(self.p, &prod, &self.modulus);
        r.resize(m, 0);
        self.from_packed(pack(self.p, &r))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        match a {
            FieldElem::Zero => Err(Error::ZeroInverse),
            FieldElem::Pow(e) => Ok(self.pow_omega(-(e as i128))),
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k` for any integer `k`; `0^k` is `1` for `k = 0` and zero for `k > 0`.
    pub fn pow(&self, a: FieldElem, k: i128) -> Result<FieldElem> {
        match a {
            FieldElem::Zero if k == 0 => Ok(self.one()),
            FieldElem::Zero if k > 0 => Ok(FieldElem::Zero),
            FieldElem::Zero => Err(Error::ZeroInverse),
            FieldElem::Pow(e) => {
                let n = self.group_order() as i128;
                let k = k.rem_euclid(n);
                Ok(FieldElem::Pow((e as i128 * k % n) as u32))
            }
        }
    }

    pub fn arith(&self, op: ArithOp, a: FieldElem, b: Option<Operand>) -> Result<FieldElem> {
        let need_elem = |b: Option<Operand>| match b {
            Some(Operand::Elem(x)) => Ok(x),
            _ => Err(Error::InvalidParams("operation needs a field element operand".into())),
        };
        match op {
            ArithOp::Add => Ok(self.add(a, need_elem(b)?)),
            ArithOp::Mul => Ok(self.mul(a, need_elem(b)?)),
            ArithOp::Inv => self.inv(a),
            ArithOp::Neg => Ok(self.neg(a)),
            ArithOp::Pow => match b {
                Some(Operand::Int(k)) => self.pow(a, k as i128),
                _ => Err(Error::InvalidParams("pow needs an integer exponent".into())),
            },
        }
    }

    /// `a^{p^t}`.
    pub fn frobenius(&self, a: FieldElem, t: u32) -> FieldElem {
        match a {
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Pow(e) => {
                let n = self.group_order() as u128;
                let f = pow_mod(self.p as u128, t as u128, n);
                FieldElem::Pow((e as u128 * f % n) as u32)
            }
        }
    }

    fn check_degree(&self, d: u32) -> Result<()> {
        if d == 0 || self.m % d != 0 {
            return Err(Error::DegreeNotDividing { inner: d, outer: self.m });
        }
        Ok(())
    }

    /// `(p^m - 1)/(p^d - 1)`: the log step of `F_{p^d}^*` inside the group.
    pub fn subfield_step(&self, d: u32) -> u64 {
        self.group_order() / ((self.p as u64).pow(d) - 1)
    }

    /// A generator of `F_{p^d}^*`.
    pub fn subfield_generator(&self, d: u32) -> Result<FieldElem> {
        self.check_degree(d)?;
        Ok(FieldElem::Pow(self.subfield_step(d) as u32 % self.group_order() as u32))
    }

    pub fn subfield_test(&self, a: FieldElem, d: u32) -> Result<bool> {
        self.check_degree(d)?;
        Ok(match a {
            FieldElem::Zero => true,
            FieldElem::Pow(e) => e as u64 % self.subfield_step(d) == 0,
        })
    }

    /// Relative trace or norm from `F_{p^{d1}}` down to `F_{p^{d2}}`.
    pub fn rel_trace_norm(&self, kind: TraceOrNorm, a: FieldElem, d1: u32, d2: u32) -> Result<FieldElem> {
        self.check_degree(d1)?;
        if d2 == 0 || d1 % d2 != 0 {
            return Err(Error::DegreeNotDividing { inner: d2, outer: d1 });
        }
        if !self.subfield_test(a, d1)? {
            return Err(Error::NotInSubfield { degree: d1 });
        }
        match kind {
            TraceOrNorm::Trace => Ok((0..d1 / d2).fold(FieldElem::Zero, |acc, i| {
                self.add(acc, self.frobenius(a, d2 * i))
            })),
            TraceOrNorm::Norm => {
                let p = self.p as u128;
                let exp = (p.pow(d1) - 1) / (p.pow(d2) - 1);
                self.pow(a, exp as i128)
            }
        }
    }

    /// Absolute trace to `F_p`, returned as an integer in `0..p`.
    pub fn abs_trace(&self, a: FieldElem) -> u32 {
        let t = self
            .rel_trace_norm(TraceOrNorm::Trace, a, self.m, 1)
            .expect("absolute trace is always defined");
        self.packed(t)
    }

    /// Membership in `θ_{p^sub}(F_{p^base}^*)`, the subgroup of `F_{p^base}^*`
    /// of order `(p^base - 1)/(p^sub - 1)`.
    pub fn theta_membership(&self, x: FieldElem, base: u32, sub: u32) -> Result<bool> {
        self.check_degree(base)?;
        if sub == 0 || base % sub != 0 {
            return Err(Error::DegreeNotDividing { inner: sub, outer: base });
        }
        let e = x.log().ok_or(Error::ZeroElement)? as u64;
        let modulus = self.subfield_step(base) * ((self.p as u64).pow(sub) - 1);
        Ok(e % modulus == 0)
    }

    /// All nonzero elements, in increasing log order.
    pub fn nonzero(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.group_order() as u32).map(FieldElem::Pow)
    }
}

/// Builds the field `F_{p^{hn}}`. With no modulus, the lowest primitive
/// polynomial of degree `hn` is used.
pub fn build_field(p: u32, h: u32, n: u32, modulus: Option<&[u32]>) -> Result<FieldCtx> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if h == 0 || n == 0 {
        return Err(Error::InvalidDegree { h, n });
    }
    let m = h.checked_mul(n).ok_or(Error::InvalidDegree { h, n })?;
    let order = checked_pow(p as u128, m).unwrap_or(u128::MAX);
    if order > TABLE_LIMIT as u128 {
        return Err(Error::TableLimit { order, limit: TABLE_LIMIT });
    }
    let order = order as u64;
    let (modulus, antilog) = match modulus {
        Some(poly) => {
            if poly.len() != m as usize + 1 {
                return Err(Error::ModulusDegree {
                    expected: m,
                    got: poly.len().saturating_sub(1),
                });
            }
            if poly[m as usize] != 1 || poly.iter().any(|&c| c >= p) {
                return Err(Error::MalformedModulus { p });
            }
            if !is_irreducible(p, poly) {
                return Err(Error::ReducibleModulus { p });
            }
            let table = antilog_table(p, poly).ok_or(Error::NonPrimitiveModulus)?;
            (poly.to_vec(), table)
        }
        None => {
            let poly = default_modulus(p, m)?;
            let table = antilog_table(p, &poly).expect("default modulus is primitive");
            (poly, table)
        }
    };
    let mut log = vec![NO_LOG; order as usize];
    for (e, &packed) in antilog.iter().enumerate() {
        log[packed as usize] = e as u32;
    }
    let zech = antilog
        .iter()
        .map(|&packed| {
            // adding 1 only touches the constant coordinate
            let c0 = packed % p;
            let plus_one = if c0 == p - 1 { packed - c0 } else { packed + 1 };
            log[plus_one as usize]
        })
        .collect();
    Ok(FieldCtx {
        p,
        h,
        n,
        m,
        order,
        modulus,
        antilog,
        log,
        zech,
    })
}
