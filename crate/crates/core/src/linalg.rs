//! Row reduction over `F_p` for small primes.

/// Multiplicative inverses modulo a small prime.
#[derive(Debug, Clone)]
struct InvTable(Vec<u8>);

impl InvTable {
    fn new(p: u32) -> Self {
        let mut inv = vec![0u8; p as usize];
        for a in 1..p {
            let b = (1..p).find(|b| a * b % p == 1).expect("p is prime");
            inv[a as usize] = b as u8;
        }
        InvTable(inv)
    }
}

/// A subspace of `F_p^width` kept in reduced row echelon form.
///
/// Rows are sorted by pivot column; every pivot entry is 1 and is the only
/// nonzero entry of its column. Two `Echelon`s span the same space iff their
/// rows are identical.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u32,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    inv: InvTable,
}

impl PartialEq for Echelon {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.width == other.width && self.rows == other.rows
    }
}

impl Eq for Echelon {}

impl std::hash::Hash for Echelon {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.width.hash(state);
        self.rows.hash(state);
    }
}

impl Echelon {
    pub fn new(p: u32, width: usize) -> Self {
        Echelon {
            p,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            inv: InvTable::new(p),
        }
    }

    pub fn from_rows<'a>(p: u32, width: usize, rows: impl IntoIterator<Item = &'a [u8]>) -> Self {
        let mut e = Echelon::new(p, width);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtracts `c · src` from `dst`.
    fn axpy(p: u32, dst: &mut [u8], c: u8, src: &[u8]) {
        if c == 0 {
            return;
        }
        if p == 2 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= s;
            }
            return;
        }
        let neg = (p - c as u32) as u16;
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = ((*d as u16 + neg * s as u16) % p as u16) as u8;
        }
    }

    /// Reduces `v` in place modulo the row space; the result is zero iff
    /// `v` was in the span.
    pub fn reduce_in_place(&self, v: &mut [u8]) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let coef = v[c];
            Self::axpy(self.p, v, coef, row);
        }
    }

    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let mut r = v.to_vec();
        self.reduce_in_place(&mut r);
        r
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the row space; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let mut r = self.reduce(v);
        let Some(col) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = self.inv.0[r[col] as usize];
        if s != 1 {
            for x in r.iter_mut() {
                *x = ((*x as u32 * s as u32) % self.p) as u8;
            }
        }
        for row in self.rows.iter_mut() {
            let coef = row[col];
            Self::axpy(self.p, row, coef, &r);
        }
        let at = self.pivots.partition_point(|&c| c < col);
        self.pivots.insert(at, col);
        self.rows.insert(at, r);
        true
    }

    /// Rank of `self + span(vs)` without modifying `self`.
    pub fn rank_with<'a>(&self, vs: impl IntoIterator<Item = &'a [u8]>) -> usize {
        let mut extra = Echelon::new(self.p, self.width);
        for v in vs {
            extra.insert(&self.reduce(v));
        }
        self.rank() + extra.rank()
    }

    /// Basis of `{x : row · x = 0 for every row}`.
    pub fn nullspace(&self) -> Echelon {
        let mut out = Echelon::new(self.p, self.width);
        for free in (0..self.width).filter(|c| !self.pivots.contains(c)) {
            let mut v = vec![0u8; self.width];
            v[free] = 1;
            for (row, &c) in self.rows.iter().zip(&self.pivots) {
                v[c] = ((self.p - row[free] as u32) % self.p) as u8;
            }
            out.insert(&v);
        }
        out
    }

    /// Intersection of row spaces by the Zassenhaus algorithm.
    pub fn intersection(&self, other: &Echelon) -> Echelon {
        let w = self.width;
        let mut big = Echelon::new(self.p, 2 * w);
        for r in &self.rows {
            let mut v = r.clone();
            v.extend_from_slice(r);
            big.insert(&v);
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(0, w));
            big.insert(&v);
        }
        let mut out = Echelon::new(self.p, w);
        for r in big.rows() {
            if r[..w].iter().all(|&x| x == 0) {
                out.insert(&r[w..]);
            }
        }
        out
    }

    pub fn sum(&self, other: &Echelon) -> Echelon {
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r);
        }
        out
    }

    /// Every vector of the row space, the zero vector first.
    pub fn elements(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.width]];
        for row in &self.rows {
            let len = out.len();
            for c in 1..self.p {
                for i in 0..len {
                    let mut v = out[i].clone();
                    Self::axpy(self.p, &mut v, (self.p - c) as u8, row);
                    out.push(v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(p: u32, rows: usize, width: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        proptest::collection::vec(proptest::collection::vec(0..p as u8, width), 0..=rows)
    }

    /// Rank via plain Gaussian elimination on a copy, used as an oracle.
    fn naive_rank(p: u32, mut m: Vec<Vec<u8>>) -> usize {
        let width = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for col in 0..width {
            let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = (1..p).find(|b| m[rank][col] as u32 * b % p == 1).unwrap();
            for i in 0..m.len() {
                if i != rank && m[i][col] != 0 {
                    let f = m[i][col] as u32 * inv % p;
                    for j in 0..width {
                        m[i][j] = ((m[i][j] as u32 + p * p - f * m[rank][j] as u32) % p) as u8;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rref_shape() {
        let e = Echelon::from_rows(3, 3, [&[1u8, 2, 0][..], &[2, 1, 1], &[0, 0, 2]]);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots(), &[0, 2]);
        assert_eq!(e.rows(), &[vec![1, 2, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn nullspace_of_full_row() {
        let e = Echelon::from_rows(2, 4, [&[1u8, 1, 1, 1][..]]);
        let ns = e.nullspace();
        assert_eq!(ns.rank(), 3);
        for v in ns.rows() {
            let dot: u32 = v.iter().map(|&x| x as u32).sum();
            assert_eq!(dot % 2, 0);
        }
    }

    #[test]
    fn elements_count() {
        let e = Echelon::from_rows(3, 4, [&[1u8, 0, 2, 0][..], &[0, 1, 1, 1]]);
        let els = e.elements();
        assert_eq!(els.len(), 9);
        let set: std::collections::HashSet<_> = els.iter().collect();
        assert_eq!(set.len(), 9);
        assert!(els.iter().all(|v| e.contains(v)));
    }

    proptest! {
        #[test]
        fn rank_matches_naive(p in prop::sample::select(vec![2u32, 3, 5, 7]), seed in matrix(7, 8, 6)) {
            let m: Vec<Vec<u8>> = seed.into_iter().map(|r| r.into_iter().map(|x| x % p as u8).collect()).collect();
            let e = Echelon::from_rows(p, 6, m.iter().map(|r| r.as_slice()));
            prop_assert_eq!(e.rank(), naive_rank(p, m.clone()));
            for r in &m {
                prop_assert!(e.contains(r));
            }
        }

        #[test]
        fn canonical_under_row_operations(m in matrix(3, 6, 5), k in 1u8..3) {
            let a = Echelon::from_rows(3, 5, m.iter().map(|r| r.as_slice()));
            let scaled: Vec<Vec<u8>> = m.iter().rev().map(|r| r.iter().map(|&x| x * k % 3).collect()).collect();
            let b = Echelon::from_rows(3, 5, scaled.iter().map(|r| r.as_slice()));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn grassmann_identity(a in matrix(3, 5, 6), b in matrix(3, 5, 6)) {
            let u = Echelon::from_rows(3, 6, a.iter().map(|r| r.as_slice()));
            let v = Echelon::from_rows(3, 6, b.iter().map(|r| r.as_slice()));
            let cap = u.intersection(&v);
            let sum = u.sum(&v);
            prop_assert_eq!(sum.rank() + cap.rank(), u.rank() + v.rank());
            prop_assert_eq!(u.rank_with(v.rows().iter().map(|r| r.as_slice())), sum.rank());
            for r in cap.rows() {
                prop_assert!(u.contains(r) && v.contains(r));
            }
        }

        #[test]
        fn nullspace_is_orthogonal(a in matrix(5, 4, 6)) {
            let u = Echelon::from_rows(5, 6, a.iter().map(|r| r.as_slice()));
            let ns = u.nullspace();
            prop_assert_eq!(ns.rank() + u.rank(), 6);
            for x in ns.rows() {
                for r in u.rows() {
                    let dot: u32 = x.iter().zip(r).map(|(&a, &b)| a as u32 * b as u32).sum();
                    prop_assert_eq!(dot % 5, 0);
                }
            }
        }
    }
}
