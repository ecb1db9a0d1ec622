//! Subgroups of `(Z/p^r)^n`: enumeration, intersection, types and counts.
//!
//! Enumeration builds Howell bases directly, one pivot column at a time from
//! the right. For a column `j` the pivot `p^e` is followed by a tail `w`
//! reduced modulo the subgroup already built on the columns after `j`, and
//! the choice is kept iff `p^(r-e) w` lies in that subgroup. Every subgroup
//! is then produced exactly once, already in canonical form.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modring::{howell_rows, reduce_against, ModMatrix, Ring};
use crate::pgroups::{type_from_torsion_profile, Partition};

/// Default cap on candidate bases examined by a single enumeration.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// The finite group `(Z/p^r)^n`, i.e. the `p^r`-torsion of `(Q_p/Z_p)^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambient {
    ring: Ring,
    n: usize,
}

impl Ambient {
    pub fn new(p: u64, n: usize, r: u32) -> Result<Ambient> {
        Ok(Ambient {
            ring: Ring::new(p, r)?,
            n,
        })
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.ring.r
    }

    pub fn modulus(&self) -> u64 {
        self.ring.q
    }

    pub(crate) fn ring(&self) -> &Ring {
        &self.ring
    }
}

impl fmt::Debug for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(Z/{}^{})^{}", self.ring.p, self.ring.r, self.n)
    }
}

/// Which coordinate hyperplane plays the kernel `V` of the split surjection
/// `(Q_p/Z_p)^(n+1) -> Q_p/Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Split {
    /// `V` is spanned by the first `n` coordinates.
    #[default]
    First,
    /// `V` is spanned by the last `n` coordinates.
    Last,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::First => "first",
            Split::Last => "last",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Split> {
        match s {
            "first" => Ok(Split::First),
            "last" => Ok(Split::Last),
            _ => Err(Error::Parse(format!(
                "unknown split {s:?}, expected first|last"
            ))),
        }
    }
}

/// A subgroup of an [`Ambient`], held as its Howell basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubgroupRep {
    ambient: Ambient,
    basis: ModMatrix,
}

impl SubgroupRep {
    /// The subgroup generated by `rows`.
    pub fn generated_by(ambient: &Ambient, rows: &[Vec<u64>]) -> Result<SubgroupRep> {
        let m = ModMatrix::new(ambient.p(), ambient.r(), ambient.n, rows)?;
        Ok(SubgroupRep {
            ambient: *ambient,
            basis: m.howell_form(),
        })
    }

    pub fn from_matrix(ambient: &Ambient, m: &ModMatrix) -> Result<SubgroupRep> {
        if m.p() != ambient.p() || m.r() != ambient.r() || m.n_cols() != ambient.n {
            return Err(Error::ParameterMismatch(format!(
                "matrix {m:?} does not live in {ambient:?}"
            )));
        }
        Ok(SubgroupRep {
            ambient: *ambient,
            basis: m.howell_form(),
        })
    }

    fn from_howell_data(ambient: &Ambient, data: Vec<u64>) -> SubgroupRep {
        SubgroupRep {
            ambient: *ambient,
            basis: ModMatrix::from_raw(&ambient.ring, ambient.n, data),
        }
    }

    pub fn zero(ambient: &Ambient) -> SubgroupRep {
        SubgroupRep::from_howell_data(ambient, Vec::new())
    }

    pub fn full(ambient: &Ambient) -> SubgroupRep {
        let n = ambient.n;
        let data = (0..n * n).map(|i| u64::from(i / n == i % n)).collect();
        SubgroupRep::from_howell_data(ambient, data)
    }

    /// The coordinate subgroup spanned by the unit vectors `e_i`, `i` in `coords`.
    pub fn coordinate(
        ambient: &Ambient,
        coords: impl IntoIterator<Item = usize>,
    ) -> Result<SubgroupRep> {
        let rows: Vec<Vec<u64>> = coords
            .into_iter()
            .map(|i| (0..ambient.n).map(|j| u64::from(i == j)).collect())
            .collect();
        SubgroupRep::generated_by(ambient, &rows)
    }

    /// The standard copy of a group of type `lambda` inside
    /// `(Z/p^r)^rank(lambda)`, `r = lambda_1`: the span of `p^(r - lambda_i) e_i`.
    pub fn standard_of_type(p: u64, lambda: &Partition) -> Result<SubgroupRep> {
        let r = lambda.largest_part().max(1);
        let a = Ambient::new(p, lambda.p_rank(), r)?;
        let rows: Vec<Vec<u64>> = (0..a.n)
            .map(|i| {
                (0..a.n)
                    .map(|j| {
                        if i == j {
                            a.ring.pow(r - lambda.part(i))
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        SubgroupRep::generated_by(&a, &rows)
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn basis(&self) -> &ModMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.n_rows() == 0
    }

    /// `log_p` of the order.
    pub fn log_order(&self) -> u32 {
        self.basis.howell_log_order()
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.ambient.n {
            return Err(Error::DimensionMismatch {
                expected: self.ambient.n,
                found: v.len(),
            });
        }
        let q = self.ambient.modulus();
        let mut w: Vec<u64> = v.iter().map(|&x| x % q).collect();
        Ok(self.basis.reduce_howell(&mut w))
    }

    fn same_ambient(&self, other: &SubgroupRep) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::ParameterMismatch(format!(
                "ambient {:?} vs {:?}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Whether `other` is a subgroup of `self`.
    pub fn contains_subgroup(&self, other: &SubgroupRep) -> Result<bool> {
        self.same_ambient(other)?;
        let mut w = vec![0; self.ambient.n];
        Ok(other.basis.rows().all(|row| {
            w.copy_from_slice(row);
            self.basis.reduce_howell(&mut w)
        }))
    }

    /// `p^k` times the subgroup.
    pub fn p_power_multiple(&self, k: u32) -> SubgroupRep {
        let scaled = self.basis.scale_by_p_power(k);
        SubgroupRep::from_howell_data(
            &self.ambient,
            howell_rows(&self.ambient.ring, self.ambient.n, scaled.data()),
        )
    }

    pub fn sum(&self, other: &SubgroupRep) -> Result<SubgroupRep> {
        self.same_ambient(other)?;
        let stacked = self.basis.stack(&other.basis)?;
        Ok(SubgroupRep::from_howell_data(
            &self.ambient,
            howell_rows(&self.ambient.ring, self.ambient.n, stacked.data()),
        ))
    }

    /// `log_p |S[p^k]|` for `k = 0..=r`, via `|S[p^k]| = |S| / |p^k S|`.
    pub fn torsion_profile(&self) -> Vec<u32> {
        let total = self.log_order();
        let mut profile = Vec::with_capacity(self.ambient.r() as usize + 1);
        profile.push(0);
        for k in 1..=self.ambient.r() {
            profile.push(total - self.p_power_multiple(k).log_order());
        }
        profile
    }
}

impl fmt::Debug for SubgroupRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?} in {:?}>", self.basis.to_rows(), self.ambient)
    }
}

/// The kernel `V[p^r]` of the coordinate split surjection on a rank-`n+1` ambient.
///
/// [`Split::First`] gives the span of the first `n` coordinate vectors,
/// [`Split::Last`] the span of the last `n`.
pub fn standard_split(a: &Ambient, split: Split) -> Result<SubgroupRep> {
    if a.n == 0 {
        return Err(Error::InvalidParameter(
            "split needs ambient rank >= 1".into(),
        ));
    }
    match split {
        Split::First => SubgroupRep::coordinate(a, 0..a.n - 1),
        Split::Last => SubgroupRep::coordinate(a, 1..a.n),
    }
}

pub fn type_of(s: &SubgroupRep) -> Partition {
    type_from_torsion_profile(&s.torsion_profile())
        .expect("subgroup torsion profiles are realizable")
}

pub fn intersect(s: &SubgroupRep, t: &SubgroupRep) -> Result<SubgroupRep> {
    s.same_ambient(t)?;
    let n = s.ambient.n;
    if s.is_zero() || t.is_zero() {
        return Ok(SubgroupRep::zero(&s.ambient));
    }
    // Rows (x | x) for x in S and (y | 0) for y in T; the part of the span
    // vanishing on the first block is {(0 | z) : z in S ∩ T}.
    let mut data = Vec::with_capacity((s.basis.n_rows() + t.basis.n_rows()) * 2 * n);
    for row in s.basis.rows() {
        data.extend_from_slice(row);
        data.extend_from_slice(row);
    }
    for row in t.basis.rows() {
        data.extend_from_slice(row);
        data.extend(std::iter::repeat_n(0, n));
    }
    let h = howell_rows(&s.ambient.ring, 2 * n, &data);
    let mut tail = Vec::new();
    for row in h.chunks_exact(2 * n) {
        if row[..n].iter().all(|&x| x == 0) {
            tail.extend_from_slice(&row[n..]);
        }
    }
    Ok(SubgroupRep::from_howell_data(
        &s.ambient,
        howell_rows(&s.ambient.ring, n, &tail),
    ))
}

/// Type of `L/M`, from `log_p |(L/M)[p^k]| = log_p |L| - log_p |p^k L + M|`.
pub fn quotient_type(l: &SubgroupRep, m: &SubgroupRep) -> Result<Partition> {
    if !l.contains_subgroup(m)? {
        return Err(Error::NotContained);
    }
    let total = l.log_order();
    let mut profile = vec![0];
    for k in 1..=l.ambient.r() {
        profile.push(total - l.p_power_multiple(k).sum(m)?.log_order());
    }
    type_from_torsion_profile(&profile)
}

/// Restrictions on an enumeration.
#[derive(Clone, Debug, Default)]
pub struct SubgroupFilter {
    /// Only subgroups of order `p^order`.
    pub order: Option<u32>,
    /// Per-coordinate floors: only subgroups inside `prod p^floor[i] Z/p^r`.
    pub floors: Option<Vec<u32>>,
}

impl SubgroupFilter {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn of_order(order: u32) -> Self {
        SubgroupFilter {
            order: Some(order),
            floors: None,
        }
    }
}

struct Walk<'a, F> {
    ambient: &'a Ambient,
    floors: Vec<u32>,
    /// `capacity[c]` = largest order exponent reachable from columns `< c`.
    capacity: Vec<u32>,
    target: Option<u32>,
    budget: u64,
    spent: u64,
    visit: F,
}

impl<F: FnMut(&SubgroupRep) -> Result<()>> Walk<'_, F> {
    fn run(
        &mut self,
        remaining: usize,
        rows: &mut Vec<u64>,
        pivots: &mut [u32],
        order: u32,
    ) -> Result<()> {
        let ring = *self.ambient.ring();
        let (p, r, q) = (ring.p, ring.r, ring.q);
        let n = self.ambient.n;
        if remaining == 0 {
            if self.target.is_none_or(|t| t == order) {
                let rep = SubgroupRep::from_howell_data(self.ambient, rows.clone());
                (self.visit)(&rep)?;
            }
            return Ok(());
        }
        let col = remaining - 1;
        let cap = self.capacity[col];

        if self.target.is_none_or(|t| order + cap >= t) {
            pivots[col] = r;
            self.run(col, rows, pivots, order)?;
        }

        let mut cand = vec![0u64; n];
        let mut test = vec![0u64; n];
        for e in self.floors[col]..r {
            let gained = order + (r - e);
            if let Some(t) = self.target {
                if gained > t || gained + cap < t {
                    continue;
                }
            }
            // tail entries at column k step by p^floor[k] below the pivot bound
            let steps: Vec<u64> = (col + 1..n).map(|k| p.pow(self.floors[k])).collect();
            let limits: Vec<u64> = (col + 1..n)
                .map(|k| if pivots[k] < r { p.pow(pivots[k]) } else { q })
                .collect();
            cand.iter_mut().for_each(|x| *x = 0);
            cand[col] = p.pow(e);
            let mult = ring.pow(r - e);
            loop {
                self.spent += 1;
                if self.spent > self.budget {
                    return Err(Error::BudgetExceeded {
                        budget: self.budget,
                        what: format!("subgroups of {:?}", self.ambient),
                    });
                }
                let ok = if e == 0 {
                    true
                } else {
                    for k in 0..n {
                        test[k] = if k > col { cand[k] * mult % q } else { 0 };
                    }
                    reduce_against(q, n, rows, &mut test)
                };
                if ok {
                    rows.splice(0..0, cand.iter().copied());
                    pivots[col] = e;
                    self.run(col, rows, pivots, gained)?;
                    rows.drain(0..n);
                }
                if !advance(&mut cand[col + 1..], &steps, &limits) {
                    break;
                }
            }
        }
        Ok(())
    }
}

/// Odometer step over the tail entries, last coordinate fastest. Returns
/// false after wrapping around.
fn advance(tail: &mut [u64], steps: &[u64], limits: &[u64]) -> bool {
    for i in (0..tail.len()).rev() {
        tail[i] += steps[i];
        if tail[i] < limits[i] {
            return true;
        }
        tail[i] = 0;
    }
    false
}

/// Calls `visit` on every subgroup of `a` passing `filter`, in a fixed
/// deterministic order. Returns the number of candidate bases examined.
pub fn for_each_subgroup<F>(
    a: &Ambient,
    filter: &SubgroupFilter,
    budget: u64,
    visit: F,
) -> Result<u64>
where
    F: FnMut(&SubgroupRep) -> Result<()>,
{
    let n = a.n;
    let floors = match &filter.floors {
        Some(f) if f.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.len(),
            })
        }
        Some(f) => f.iter().map(|&x| x.min(a.r())).collect(),
        None => vec![0; n],
    };
    let mut capacity = vec![0; n];
    for c in 1..n {
        capacity[c] = capacity[c - 1] + (a.r() - floors[c - 1]);
    }
    let mut walk = Walk {
        ambient: a,
        floors,
        capacity,
        target: filter.order,
        budget,
        spent: 0,
        visit,
    };
    let mut pivots = vec![a.r(); n];
    let mut rows = Vec::with_capacity(n * n);
    walk.run(n, &mut rows, &mut pivots, 0)?;
    Ok(walk.spent)
}

/// Every subgroup of `a`, each exactly once, in canonical form.
pub fn enumerate_subgroups(a: &Ambient, budget: u64) -> Result<Vec<SubgroupRep>> {
    enumerate_filtered(a, &SubgroupFilter::all(), budget)
}

pub fn enumerate_filtered(
    a: &Ambient,
    filter: &SubgroupFilter,
    budget: u64,
) -> Result<Vec<SubgroupRep>> {
    let mut out = Vec::new();
    for_each_subgroup(a, filter, budget, |s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Per-coordinate floors cutting out the standard group of type `lambda`
/// inside `(Z/p^lambda_1)^rank`.
fn standard_floors(lambda: &Partition) -> Vec<u32> {
    let r = lambda.largest_part();
    lambda.parts().iter().map(|&x| r - x).collect()
}

/// Number of subgroups of each type and order `p^order` in the standard
/// group of type `lambda`, by enumeration.
pub fn subgroup_type_counts(
    lambda: &Partition,
    order: u32,
    p: u64,
    budget: u64,
) -> Result<BTreeMap<Partition, u64>> {
    let mut counts = BTreeMap::new();
    if lambda.is_trivial() {
        Ambient::new(p, 0, 1)?;
        if order == 0 {
            counts.insert(Partition::trivial(), 1);
        }
        return Ok(counts);
    }
    let a = Ambient::new(p, lambda.p_rank(), lambda.largest_part())?;
    let filter = SubgroupFilter {
        order: Some(order),
        floors: Some(standard_floors(lambda)),
    };
    for_each_subgroup(&a, &filter, budget, |s| {
        *counts.entry(type_of(s)).or_insert(0) += 1;
        Ok(())
    })?;
    Ok(counts)
}

/// Number of subgroups isomorphic to `mu` of a fixed group of type `lambda`.
pub fn count_of_type_in_group(
    lambda: &Partition,
    mu: &Partition,
    p: u64,
    budget: u64,
) -> Result<BigInt> {
    let counts = subgroup_type_counts(lambda, mu.order_exponent(), p, budget)?;
    Ok(BigInt::from(counts.get(mu).copied().unwrap_or(0)))
}

/// Closed-form subgroup count: with `a = lambda'` and `b = mu'` the conjugate
/// partitions, the number of subgroups of type `mu` is
/// `prod_i p^(b_{i+1} (a_i - b_i)) [a_i - b_{i+1} choose b_i - b_{i+1}]_p`.
pub fn count_of_type_closed_form(lambda: &Partition, mu: &Partition, p: u64) -> BigInt {
    let a = lambda.conjugate();
    let b = mu.conjugate();
    let len = a.p_rank().max(b.p_rank());
    let mut total = BigInt::one();
    for i in 0..len {
        let (ai, bi, bn) = (a.part(i) as i64, b.part(i) as i64, b.part(i + 1) as i64);
        if bi > ai {
            return BigInt::zero();
        }
        let pw = (bn * (ai - bi)) as u32;
        total *= num_traits::pow(BigInt::from(p), pw as usize);
        total *= gaussian_binomial(ai - bn, bi - bn, p);
    }
    total
}

/// `[n choose k]_p`.
pub fn gaussian_binomial(n: i64, k: i64, p: u64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    let p = BigInt::from(p);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= num_traits::pow(p.clone(), (n - i) as usize) - 1;
        den *= num_traits::pow(p.clone(), (i + 1) as usize) - 1;
    }
    num / den
}

/// `|m_n(M)|`: subgroups of `(Q_p/Z_p)^n` isomorphic to `M`.
pub fn m_count(m: &Partition, n: usize, p: u64, budget: u64) -> Result<BigInt> {
    if m.p_rank() > n {
        return Ok(BigInt::zero());
    }
    if m.is_trivial() {
        return Ok(BigInt::one());
    }
    count_of_type_in_group(&Partition::homocyclic(m.largest_part(), n), m, p, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn sub(a: &Ambient, rows: &[&[u64]]) -> SubgroupRep {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        SubgroupRep::generated_by(a, &rows).unwrap()
    }

    /// All elements of a subgroup, by closure.
    fn elements(s: &SubgroupRep) -> BTreeSet<Vec<u64>> {
        let q = s.ambient().modulus();
        let n = s.ambient().n();
        let mut span = BTreeSet::from([vec![0; n]]);
        loop {
            let cur: Vec<_> = span.iter().cloned().collect();
            let mut grew = false;
            for v in &cur {
                for g in s.basis().rows() {
                    grew |= span.insert(v.iter().zip(g).map(|(x, y)| (x + y) % q).collect());
                }
            }
            if !grew {
                return span;
            }
        }
    }

    #[test]
    fn totals_match_gaussian_binomials() {
        let a = Ambient::new(2, 2, 1).unwrap();
        assert_eq!(enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap().len(), 5);
        let a = Ambient::new(2, 3, 1).unwrap();
        assert_eq!(enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap().len(), 16);
        for p in [2, 3, 5] {
            for r in 1..=4 {
                let a = Ambient::new(p, 1, r).unwrap();
                assert_eq!(
                    enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap().len(),
                    r as usize + 1
                );
            }
        }
        let a = Ambient::new(3, 0, 1).unwrap();
        assert_eq!(enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap().len(), 1);
    }

    /// Brute force over all generating pairs in small ambients: the set of
    /// distinct spans equals the enumerated set, and nothing repeats.
    #[test]
    fn enumeration_is_complete_and_duplicate_free() {
        for (p, n, r) in [(2u64, 2usize, 2u32), (3, 2, 1), (2, 2, 3), (2, 3, 1)] {
            let a = Ambient::new(p, n, r).unwrap();
            let listed = enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap();
            let distinct: BTreeSet<Vec<Vec<u64>>> =
                listed.iter().map(|s| s.basis().to_rows()).collect();
            assert_eq!(distinct.len(), listed.len());
            for s in &listed {
                assert!(s.basis().is_howell());
            }
            // every subgroup of these ambients is generated by at most n elements
            let q = a.modulus();
            let vectors: Vec<Vec<u64>> = (0..q.pow(n as u32))
                .map(|mut x| {
                    (0..n)
                        .map(|_| {
                            let d = x % q;
                            x /= q;
                            d
                        })
                        .collect()
                })
                .collect();
            let mut spans = BTreeSet::new();
            let mut gens: Vec<Vec<u64>> = Vec::new();
            fn rec(
                a: &Ambient,
                vectors: &[Vec<u64>],
                depth: usize,
                gens: &mut Vec<Vec<u64>>,
                spans: &mut BTreeSet<Vec<Vec<u64>>>,
            ) {
                spans.insert(
                    SubgroupRep::generated_by(a, gens)
                        .unwrap()
                        .basis()
                        .to_rows(),
                );
                if depth == 0 {
                    return;
                }
                for v in vectors {
                    gens.push(v.clone());
                    rec(a, vectors, depth - 1, gens, spans);
                    gens.pop();
                }
            }
            rec(&a, &vectors, n, &mut gens, &mut spans);
            assert_eq!(spans, distinct, "{a:?}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let a = Ambient::new(3, 3, 2).unwrap();
        let err = enumerate_subgroups(&a, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 10, .. }));
    }

    #[test]
    fn filtered_enumeration_agrees_with_post_filter() {
        let a = Ambient::new(2, 3, 2).unwrap();
        let all = enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap();
        for k in 0..=6 {
            let direct =
                enumerate_filtered(&a, &SubgroupFilter::of_order(k), DEFAULT_BUDGET).unwrap();
            let post: Vec<_> = all.iter().filter(|s| s.log_order() == k).cloned().collect();
            assert_eq!(direct, post);
        }
        let g = SubgroupRep::standard_of_type(2, &part("[2,1,1]")).unwrap();
        let boxed = enumerate_filtered(
            &a,
            &SubgroupFilter {
                order: None,
                floors: Some(vec![0, 1, 1]),
            },
            DEFAULT_BUDGET,
        )
        .unwrap();
        let post: Vec<_> = all
            .iter()
            .filter(|s| g.contains_subgroup(s).unwrap())
            .cloned()
            .collect();
        assert_eq!(boxed, post);
    }

    #[test]
    fn types() {
        let a = Ambient::new(2, 2, 2).unwrap();
        assert_eq!(type_of(&SubgroupRep::full(&a)), part("[2,2]"));
        assert_eq!(type_of(&SubgroupRep::zero(&a)), part("[]"));
        assert_eq!(type_of(&sub(&a, &[&[2, 0]])), part("[1]"));
        assert_eq!(type_of(&sub(&a, &[&[2, 1]])), part("[2]"));
        assert_eq!(type_of(&sub(&a, &[&[2, 0], &[0, 1]])), part("[2,1]"));
        for lam in crate::pgroups::partitions_up_to(6, 3) {
            for p in [2, 3] {
                assert_eq!(
                    type_of(&SubgroupRep::standard_of_type(p, &lam).unwrap()),
                    lam
                );
            }
        }
    }

    #[test]
    fn intersections() {
        let a = Ambient::new(2, 2, 1).unwrap();
        let x = sub(&a, &[&[1, 0]]);
        let y = sub(&a, &[&[0, 1]]);
        assert!(intersect(&x, &y).unwrap().is_zero());
        assert_eq!(intersect(&x, &SubgroupRep::full(&a)).unwrap(), x);
        assert!(intersect(&x, &SubgroupRep::zero(&a)).unwrap().is_zero());
        let other = Ambient::new(2, 2, 2).unwrap();
        assert!(intersect(&x, &SubgroupRep::zero(&other)).is_err());
    }

    #[test]
    fn intersection_matches_elementwise() {
        let a = Ambient::new(2, 2, 2).unwrap();
        let all = enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap();
        for s in &all {
            let es = elements(s);
            for t in &all {
                let i = intersect(s, t).unwrap();
                let et = elements(t);
                let expected: BTreeSet<_> = es.intersection(&et).cloned().collect();
                assert_eq!(elements(&i), expected);
                assert_eq!(type_of(&i), type_of(&intersect(t, s).unwrap()));
            }
        }
    }

    #[test]
    fn quotients() {
        let a = Ambient::new(2, 1, 2).unwrap();
        let full = SubgroupRep::full(&a);
        let two = sub(&a, &[&[2]]);
        assert_eq!(quotient_type(&full, &two).unwrap(), part("[1]"));
        assert_eq!(quotient_type(&full, &full).unwrap(), part("[]"));
        assert_eq!(
            quotient_type(&full, &SubgroupRep::zero(&a)).unwrap(),
            part("[2]")
        );
        assert_eq!(quotient_type(&two, &full), Err(Error::NotContained));

        let a = Ambient::new(2, 2, 2).unwrap();
        let all = enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap();
        for l in &all {
            for m in &all {
                if l.contains_subgroup(m).unwrap() {
                    let qt = quotient_type(l, m).unwrap();
                    assert_eq!(
                        qt.order_exponent(),
                        type_of(l).order_exponent() - type_of(m).order_exponent()
                    );
                }
            }
        }
    }

    #[test]
    fn counting_examples() {
        let b = DEFAULT_BUDGET;
        assert_eq!(
            count_of_type_in_group(&part("[1,1]"), &part("[1]"), 2, b).unwrap(),
            3.into()
        );
        assert_eq!(
            count_of_type_in_group(&part("[2,1]"), &part("[]"), 5, b).unwrap(),
            1.into()
        );
        assert_eq!(
            count_of_type_in_group(&part("[]"), &part("[]"), 5, b).unwrap(),
            1.into()
        );
        assert_eq!(
            count_of_type_in_group(&part("[2]"), &part("[1,1]"), 3, b).unwrap(),
            0.into()
        );
        assert_eq!(m_count(&part("[1,1]"), 1, 2, b).unwrap(), 0.into());
        assert_eq!(m_count(&part("[1]"), 2, 2, b).unwrap(), 3.into());
        for r in 1..=4 {
            assert_eq!(
                m_count(&Partition::homocyclic(r, 1), 1, 3, b).unwrap(),
                1.into()
            );
        }
    }

    #[test]
    fn m_counts_sum_to_total() {
        for n in 0..=2usize {
            for r in 1..=2u32 {
                let a = Ambient::new(2, n, r).unwrap();
                let total = enumerate_subgroups(&a, DEFAULT_BUDGET).unwrap().len();
                let sum: BigInt = crate::pgroups::partitions_up_to(r * n as u32, n)
                    .iter()
                    .filter(|m| m.largest_part() <= r)
                    .map(|m| {
                        // subgroups of (Z/p^r)^n of type m are those of (Q_p/Z_p)^n
                        m_count(m, n, 2, DEFAULT_BUDGET).unwrap()
                    })
                    .sum();
                assert_eq!(sum, BigInt::from(total), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for p in [2, 3] {
            for lam in crate::pgroups::partitions_up_to(5, 5) {
                for mu in crate::pgroups::partitions_up_to(5, 5) {
                    assert_eq!(
                        count_of_type_closed_form(&lam, &mu, p),
                        count_of_type_in_group(&lam, &mu, p, DEFAULT_BUDGET).unwrap(),
                        "p={p} {lam} {mu}"
                    );
                }
            }
        }
    }

    #[test]
    fn splits() {
        let a = Ambient::new(5, 2, 1).unwrap();
        assert_eq!(
            standard_split(&a, Split::First).unwrap(),
            sub(&a, &[&[1, 0]])
        );
        assert_eq!(
            standard_split(&a, Split::Last).unwrap(),
            sub(&a, &[&[0, 1]])
        );
        let a = Ambient::new(2, 3, 2).unwrap();
        let v = standard_split(&a, Split::First).unwrap();
        assert_eq!(v, sub(&a, &[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(type_of(&v), part("[2,2]"));
        assert!(standard_split(&Ambient::new(2, 0, 1).unwrap(), Split::First).is_err());
    }
}
