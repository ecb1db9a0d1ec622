//! Row spans over the residue rings `Z/p^r`.
//!
//! A subgroup of `(Z/p^r)^n` is stored as the Howell form of any generating
//! matrix: an echelon basis whose pivots are exact powers of `p`, whose
//! entries above each pivot `p^e` lie in `[0, p^e)`, and whose trailing rows
//! span every vector of the span that vanishes on the leading columns. That
//! last (Howell) property makes the form unique, so span equality is plain
//! structural equality.

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps every product of two residues inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `p`-adic valuation of a nonzero residue.
#[inline]
pub(crate) fn valuation(p: u64, mut x: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo `q`.
fn unit_inverse(u: u64, q: u64) -> u64 {
    let (mut old_r, mut r) = (u as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    debug_assert_eq!(old_r, 1, "{u} is not a unit mod {q}");
    old_s.rem_euclid(q as i128) as u64
}

/// Parameters of a residue ring `Z/p^r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Ring {
    pub p: u64,
    pub r: u32,
    pub q: u64,
}

impl Ring {
    pub fn new(p: u64, r: u32) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::InvalidParameter(
                "truncation exponent r must be >= 1".into(),
            ));
        }
        let q = (0..r)
            .try_fold(1u64, |acc, _| {
                acc.checked_mul(p).filter(|&m| m <= MAX_MODULUS)
            })
            .ok_or_else(|| Error::InvalidParameter(format!("{p}^{r} exceeds 2^32")))?;
        Ok(Ring { p, r, q })
    }

    /// `p^e`, or zero once `e >= r`.
    #[inline]
    pub fn pow(&self, e: u32) -> u64 {
        if e >= self.r {
            0
        } else {
            self.p.pow(e)
        }
    }
}

/// A matrix over `Z/p^r`, rows stored contiguously.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    ring: Ring,
    n_cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    /// Builds a matrix from rows, reducing every entry modulo `p^r`.
    pub fn new(p: u64, r: u32, n_cols: usize, rows: &[Vec<u64>]) -> Result<ModMatrix> {
        let ring = Ring::new(p, r)?;
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| x % ring.q));
        }
        Ok(ModMatrix { ring, n_cols, data })
    }

    /// Like [`ModMatrix::new`] but accepts signed entries.
    pub fn from_signed(p: u64, r: u32, n_cols: usize, rows: &[Vec<i64>]) -> Result<ModMatrix> {
        let ring = Ring::new(p, r)?;
        let reduced: Vec<Vec<u64>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| x.rem_euclid(ring.q as i64) as u64)
                    .collect()
            })
            .collect();
        ModMatrix::new(p, r, n_cols, &reduced)
    }

    pub fn zero(p: u64, r: u32, n_cols: usize) -> Result<ModMatrix> {
        ModMatrix::new(p, r, n_cols, &[])
    }

    pub fn identity(p: u64, r: u32, n: usize) -> Result<ModMatrix> {
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        ModMatrix::new(p, r, n, &rows)
    }

    pub(crate) fn from_raw(ring: &Ring, n_cols: usize, data: Vec<u64>) -> ModMatrix {
        debug_assert!(n_cols == 0 || data.len().is_multiple_of(n_cols));
        ModMatrix {
            ring: *ring,
            n_cols,
            data,
        }
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn r(&self) -> u32 {
        self.ring.r
    }

    pub fn modulus(&self) -> u64 {
        self.ring.q
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.n_cols).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// All entries, row-major.
    pub(crate) fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.rows().map(<[u64]>::to_vec).collect()
    }

    pub(crate) fn ring(&self) -> Ring {
        self.ring
    }

    fn same_ring(&self, other: &ModMatrix) -> Result<()> {
        if self.ring != other.ring || self.n_cols != other.n_cols {
            return Err(Error::ParameterMismatch(format!(
                "(p={}, r={}, cols={}) vs (p={}, r={}, cols={})",
                self.ring.p, self.ring.r, self.n_cols, other.ring.p, other.ring.r, other.n_cols
            )));
        }
        Ok(())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.same_ring(other)?;
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(ModMatrix {
            data,
            ..self.clone()
        })
    }

    /// Multiplies every entry by `p^k`.
    pub fn scale_by_p_power(&self, k: u32) -> ModMatrix {
        let q = self.ring.q;
        let f = self.ring.pow(k);
        ModMatrix {
            data: self.data.iter().map(|&x| x * f % q).collect(),
            ..self.clone()
        }
    }

    /// The canonical (Howell) row basis of the row span.
    pub fn howell_form(&self) -> ModMatrix {
        let ring = self.ring();
        let data = howell_rows(&ring, self.n_cols, &self.data);
        ModMatrix::from_raw(&ring, self.n_cols, data)
    }

    /// Whether the matrix is already its own Howell form.
    pub fn is_howell(&self) -> bool {
        self.howell_form() == *self
    }

    /// Whether `v` lies in the row span.
    pub fn span_contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: v.len(),
            });
        }
        let h = self.howell_form();
        let mut w: Vec<u64> = v.iter().map(|&x| x % self.ring.q).collect();
        Ok(h.reduce_howell(&mut w))
    }

    pub fn span_equal(&self, other: &ModMatrix) -> Result<bool> {
        self.same_ring(other)?;
        Ok(self.howell_form() == other.howell_form())
    }

    /// Reduces `v` in place against `self`, which must be in Howell form.
    /// Returns whether `v` reduced to zero, i.e. lay in the span. On success
    /// `v` is left zeroed; on failure its contents are unspecified.
    pub(crate) fn reduce_howell(&self, v: &mut [u64]) -> bool {
        reduce_against(self.ring.q, self.n_cols, &self.data, v)
    }

    /// `log_p` of the size of the span; `self` must be in Howell form.
    pub(crate) fn howell_log_order(&self) -> u32 {
        self.rows()
            .map(|row| {
                let lead = row.iter().find(|&&x| x != 0).copied().unwrap_or(0);
                debug_assert!(lead != 0);
                self.ring.r - valuation(self.ring.p, lead)
            })
            .sum()
    }

    /// `log_p` of the size of the row span.
    pub fn span_log_order(&self) -> u32 {
        self.howell_form().howell_log_order()
    }

    /// Columns permuted so that column `perm[j]` of `self` becomes column `j`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<ModMatrix> {
        if perm.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: perm.len(),
            });
        }
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.rows() {
            data.extend(perm.iter().map(|&j| row[j]));
        }
        Ok(ModMatrix {
            data,
            ..self.clone()
        })
    }
}

/// Checks membership of `v` by reduction against Howell-form rows `basis`.
pub(crate) fn reduce_against(q: u64, n_cols: usize, basis: &[u64], v: &mut [u64]) -> bool {
    let mut col = 0;
    for row in basis.chunks_exact(n_cols.max(1)) {
        let lead = match row.iter().position(|&x| x != 0) {
            Some(c) => c,
            None => continue,
        };
        if v[col..lead].iter().any(|&x| x != 0) {
            return false;
        }
        let piv = row[lead];
        let a = v[lead];
        if !a.is_multiple_of(piv) {
            return false;
        }
        let f = a / piv;
        if f != 0 {
            for (x, &y) in v[lead..].iter_mut().zip(&row[lead..]) {
                *x = (*x + (q - f * y % q)) % q;
            }
        }
        col = lead + 1;
    }
    v[col..].iter().all(|&x| x == 0)
}

/// Howell form of the rows in `data`, returned as contiguous rows.
pub(crate) fn howell_rows(ring: &Ring, n_cols: usize, data: &[u64]) -> Vec<u64> {
    let (p, r, q) = (ring.p, ring.r, ring.q);
    if n_cols == 0 {
        return Vec::new();
    }
    let mut pending: Vec<u64> = Vec::with_capacity(data.len() + n_cols * n_cols);
    for row in data.chunks_exact(n_cols) {
        if row.iter().any(|&x| x != 0) {
            pending.extend_from_slice(row);
        }
    }
    let mut out: Vec<u64> = Vec::with_capacity(n_cols * n_cols);
    let mut out_piv: Vec<(usize, u64)> = Vec::with_capacity(n_cols);
    let mut piv_row = vec![0u64; n_cols];

    for c in 0..n_cols {
        let n_pending = pending.len() / n_cols;
        let mut best: Option<(usize, u32)> = None;
        for i in 0..n_pending {
            let x = pending[i * n_cols + c];
            if x != 0 {
                let v = valuation(p, x);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let Some((bi, v)) = best else { continue };
        piv_row.copy_from_slice(&pending[bi * n_cols..(bi + 1) * n_cols]);
        // swap_remove the pivot row
        let last = n_pending - 1;
        if bi != last {
            let (head, tail) = pending.split_at_mut(last * n_cols);
            head[bi * n_cols..(bi + 1) * n_cols].copy_from_slice(&tail[..n_cols]);
        }
        pending.truncate(last * n_cols);

        let pv = ring.p.pow(v);
        let unit = piv_row[c] / pv;
        if unit != 1 {
            let inv = unit_inverse(unit, q);
            for x in piv_row[c..].iter_mut() {
                *x = *x * inv % q;
            }
        }
        debug_assert_eq!(piv_row[c], pv);

        // eliminate column c from the remaining rows, dropping rows that vanish
        let mut i = 0;
        while i * n_cols < pending.len() {
            let row = &mut pending[i * n_cols..(i + 1) * n_cols];
            let a = row[c];
            if a != 0 {
                let f = a / pv;
                for (x, &y) in row[c..].iter_mut().zip(&piv_row[c..]) {
                    *x = (*x + (q - f * y % q)) % q;
                }
                if row.iter().all(|&x| x == 0) {
                    let n_now = pending.len() / n_cols;
                    let last = n_now - 1;
                    if i != last {
                        let (head, tail) = pending.split_at_mut(last * n_cols);
                        head[i * n_cols..(i + 1) * n_cols].copy_from_slice(&tail[..n_cols]);
                    }
                    pending.truncate(last * n_cols);
                    continue;
                }
            }
            i += 1;
        }

        // Howell closure: p^{r-v} times the pivot row vanishes at c but need not
        // vanish elsewhere, and must stay reachable by the later rows.
        if v > 0 {
            let f = ring.p.pow(r - v);
            let start = pending.len();
            pending.extend(piv_row.iter().map(|&x| x * f % q));
            if pending[start..].iter().all(|&x| x == 0) {
                pending.truncate(start);
            }
        }

        out.extend_from_slice(&piv_row);
        out_piv.push((c, pv));
    }

    // reduce entries above each pivot into [0, pivot)
    for (j, &(c, pv)) in out_piv.iter().enumerate().skip(1) {
        let (upper, lower) = out.split_at_mut(j * n_cols);
        let pivot_row = &lower[..n_cols];
        for i in 0..j {
            let row = &mut upper[i * n_cols..(i + 1) * n_cols];
            let f = row[c] / pv;
            if f != 0 {
                for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x = (*x + (q - f * y % q)) % q;
                }
            }
        }
    }
    out
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ModMatrix(Z/{}^{}, {:?})",
            self.ring.p,
            self.ring.r,
            self.to_rows()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, r: u32, rows: &[&[u64]]) -> ModMatrix {
        let n = rows.first().map_or(1, |r| r.len());
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        ModMatrix::new(p, r, n, &rows).unwrap()
    }

    /// Every vector of `(Z/p^r)^n`.
    fn all_vectors(q: u64, n: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..q).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// Explicit span: closure of the generators under addition.
    fn brute_span(a: &ModMatrix) -> std::collections::BTreeSet<Vec<u64>> {
        let q = a.modulus();
        let n = a.n_cols();
        let mut span = std::collections::BTreeSet::new();
        span.insert(vec![0; n]);
        loop {
            let mut grew = false;
            let current: Vec<Vec<u64>> = span.iter().cloned().collect();
            for v in &current {
                for g in a.rows() {
                    let w: Vec<u64> = v.iter().zip(g).map(|(x, y)| (x + y) % q).collect();
                    grew |= span.insert(w);
                }
            }
            if !grew {
                return span;
            }
        }
    }

    #[test]
    fn rejects_composite_and_zero_exponent() {
        assert_eq!(ModMatrix::zero(4, 1, 2), Err(Error::NotPrime(4)));
        assert!(ModMatrix::zero(2, 0, 2).is_err());
        assert!(matches!(
            ModMatrix::new(2, 1, 2, &[vec![1]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_matrix_has_empty_form() {
        let z = m(3, 2, &[&[0, 0, 0], &[0, 0, 0]]);
        assert_eq!(z.howell_form().n_rows(), 0);
    }

    #[test]
    fn identity_is_canonical() {
        for (p, r) in [(2, 1), (2, 3), (3, 2), (5, 1)] {
            let id = ModMatrix::identity(p, r, 3).unwrap();
            assert_eq!(id.howell_form(), id);
        }
    }

    #[test]
    fn diagonal_twos_mod_four() {
        let a = m(2, 2, &[&[2, 0], &[0, 2]]);
        let h = a.howell_form();
        assert_eq!(h.to_rows(), vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(brute_span(&a), brute_span(&h));
        assert_eq!(h.howell_form(), h);
    }

    #[test]
    fn howell_closure_adds_rows() {
        // span{(2,1)} over Z/4 is {0, (2,1), (0,2), (2,3)}
        let h = m(2, 2, &[&[2, 1]]).howell_form();
        assert_eq!(h.to_rows(), vec![vec![2, 1], vec![0, 2]]);
        assert_eq!(h.span_log_order(), 2);
    }

    #[test]
    fn membership_examples() {
        let a = m(2, 2, &[&[2, 0]]);
        assert!(a.span_contains(&[0, 0]).unwrap());
        assert!(!a.span_contains(&[1, 0]).unwrap());
        assert!(a.span_contains(&[2, 0]).unwrap());
        assert!(a.span_contains(&[1]).is_err());
    }

    #[test]
    fn equality_examples() {
        let a = m(2, 2, &[&[1, 1]]);
        assert!(a.span_equal(&a).unwrap());
        assert!(a.span_equal(&m(2, 2, &[&[3, 3]])).unwrap());
        assert!(!m(2, 2, &[&[1, 0]])
            .span_equal(&m(2, 2, &[&[0, 1]]))
            .unwrap());
        assert!(a.span_equal(&m(3, 2, &[&[1, 1]])).is_err());
    }

    /// Desk-scale exhaustive check: every generating pair of vectors in small
    /// ambients, membership by reduction vs explicit span.
    #[test]
    fn exhaustive_membership_agreement() {
        for (p, r, n) in [
            (2u64, 1u32, 4usize),
            (2, 2, 2),
            (2, 3, 2),
            (3, 1, 3),
            (2, 4, 1),
            (3, 2, 1),
        ] {
            let q = p.pow(r);
            assert!(q as usize * n <= 16);
            let vectors = all_vectors(q, n);
            for g1 in &vectors {
                for g2 in vectors.iter().step_by(3) {
                    let a = ModMatrix::new(p, r, n, &[g1.clone(), g2.clone()]).unwrap();
                    let span = brute_span(&a);
                    let h = a.howell_form();
                    assert_eq!(
                        h.howell_log_order(),
                        (span.len() as f64).log(p as f64).round() as u32
                    );
                    for v in &vectors {
                        assert_eq!(h.span_contains(v).unwrap(), span.contains(v), "{a:?} {v:?}");
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = ModMatrix> {
            (
                prop_oneof![Just(2u64), Just(3), Just(5)],
                1u32..=3,
                1usize..=4,
                0usize..=5,
            )
                .prop_flat_map(|(p, r, n, k)| {
                    let q = p.pow(r);
                    proptest::collection::vec(proptest::collection::vec(0..q, n), k)
                        .prop_map(move |rows| ModMatrix::new(p, r, n, &rows).unwrap())
                })
        }

        proptest! {
            #[test]
            fn idempotent_and_span_preserving(a in matrix()) {
                let h = a.howell_form();
                prop_assert_eq!(h.howell_form(), h.clone());
                for row in a.rows() {
                    prop_assert!(h.span_contains(row).unwrap());
                }
                for row in h.rows() {
                    prop_assert!(a.span_contains(row).unwrap());
                }
            }

            #[test]
            fn canonical_under_row_operations(
                a in matrix(),
                ops in proptest::collection::vec((0usize..8, 0usize..8, 0u64..1000, 0u8..3), 0..12),
            ) {
                let q = a.modulus();
                let p = a.p();
                let mut rows = a.to_rows();
                for (i, j, c, kind) in ops {
                    if rows.is_empty() {
                        break;
                    }
                    let i = i % rows.len();
                    let j = j % rows.len();
                    match kind {
                        0 => rows.swap(i, j),
                        1 => {
                            // unit scaling: c coprime to p
                            let u = if c % p == 0 { c + 1 } else { c } % q;
                            let u = if u % p == 0 { 1 } else { u };
                            rows[i].iter_mut().for_each(|x| *x = *x * u % q);
                        }
                        _ if i != j => {
                            let src = rows[j].clone();
                            rows[i].iter_mut().zip(&src).for_each(|(x, y)| *x = (*x + c % q * y) % q);
                        }
                        _ => {}
                    }
                }
                let b = ModMatrix::new(p, a.r(), a.n_cols(), &rows).unwrap();
                prop_assert_eq!(b.howell_form(), a.howell_form());
            }
        }
    }
}
