//! The Hecke algebra `H_n`: free on classes of finite abelian p-groups of
//! p-rank at most `n`, with product
//! `M * N = sum_L c_n(M, N; L) L`.
//!
//! `c_n(M, N; L)` is `|K_n(M, N; L)| / |m_n(L)|`, where `K_n` collects pairs
//! `M' <= L'` of subgroups of `(Q_p/Z_p)^n` with `M' ~ M`, `L' ~ L` and
//! `L'/M' ~ N`. Since automorphisms of `(Q_p/Z_p)^n` act transitively on
//! `m_n(L)`, it equals the number of subgroups of one fixed group of type `L`
//! that have type `M` and cotype `N`. That count is the default; the
//! quotient over the full pair enumeration is kept as a verification mode.

mod element;
mod generators;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use element::HeckeElement;
pub use generators::GeneratorPoly;

use crate::error::{Error, Result};
use crate::memo::{CacheKey, Memo};
use crate::modring::is_prime;
use crate::pgroups::{embeds, partitions_of, Partition};
use crate::subgroups::{
    self, count_of_type_closed_form, for_each_subgroup, quotient_type, type_of, Ambient,
    SubgroupFilter, SubgroupRep, DEFAULT_BUDGET,
};

/// Counts keyed by (subgroup type, quotient type).
type Tally = HashMap<(Partition, Partition), u64>;

/// Pairs `M' <= L'` inside `(Z/p^r)^n` for a fixed type of `L'`.
struct PairTable {
    l_count: u64,
    tally: Tally,
}

/// Parameters `(p, n)` of `H_n` plus its memoized structure constants.
pub struct HeckeContext {
    p: u64,
    n: usize,
    budget: u64,
    closed_form_counts: bool,
    memo: Arc<Memo>,
    hall_tables: RwLock<HashMap<(Partition, u32), Arc<Tally>>>,
    pair_tables: RwLock<HashMap<(Partition, u32), Arc<PairTable>>>,
}

impl HeckeContext {
    pub fn new(p: u64, n: usize) -> Result<HeckeContext> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("rank bound n must be >= 1".into()));
        }
        Ok(HeckeContext {
            p,
            n,
            budget: DEFAULT_BUDGET,
            closed_form_counts: false,
            memo: Arc::new(Memo::new()),
            hall_tables: RwLock::default(),
            pair_tables: RwLock::default(),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Use the closed-form subgroup count for `|m_n(M)|` instead of enumeration.
    pub fn with_closed_form_counts(mut self, on: bool) -> Self {
        self.closed_form_counts = on;
        self
    }

    pub fn with_memo(mut self, memo: Arc<Memo>) -> Self {
        self.memo = memo;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn memo(&self) -> &Arc<Memo> {
        &self.memo
    }

    fn key(&self, kind: &str) -> CacheKey {
        CacheKey::new(kind).field("p", self.p).field("n", self.n)
    }

    pub fn identity(&self) -> HeckeElement {
        HeckeElement::identity(self.p, self.n)
    }

    pub fn basis(&self, m: &Partition) -> Result<HeckeElement> {
        HeckeElement::basis(self.p, self.n, m.clone())
    }

    pub fn parse_element(&self, s: &str) -> Result<HeckeElement> {
        HeckeElement::parse(self.p, self.n, s)
    }

    pub(crate) fn check_element(&self, x: &HeckeElement) -> Result<()> {
        if x.p() != self.p || x.n() != self.n {
            return Err(Error::ParameterMismatch(format!(
                "element of (p={}, n={}) used in H_{} at p={}",
                x.p(),
                x.n(),
                self.n,
                self.p
            )));
        }
        Ok(())
    }

    /// `|m_n(M)|`.
    pub fn m_count(&self, m: &Partition) -> Result<BigInt> {
        if m.p_rank() > self.n {
            return Ok(BigInt::zero());
        }
        let key = self.key("m").field("M", m);
        self.memo.get_or_try_insert(&key, || {
            if self.closed_form_counts {
                Ok(count_of_type_closed_form(
                    &Partition::homocyclic(m.largest_part(), self.n),
                    m,
                    self.p,
                ))
            } else {
                subgroups::m_count(m, self.n, self.p, self.budget)
            }
        })
    }

    fn hall_table(&self, l: &Partition, k: u32) -> Result<Arc<Tally>> {
        let slot = (l.clone(), k);
        if let Some(t) = self.hall_tables.read().expect("table lock").get(&slot) {
            return Ok(t.clone());
        }
        let g = SubgroupRep::standard_of_type(self.p, l)?;
        let floors: Vec<u32> = l.parts().iter().map(|&x| l.largest_part() - x).collect();
        let filter = SubgroupFilter {
            order: Some(k),
            floors: Some(floors),
        };
        let mut tally = Tally::new();
        for_each_subgroup(g.ambient(), &filter, self.budget, |s| {
            *tally
                .entry((type_of(s), quotient_type(&g, s)?))
                .or_insert(0) += 1;
            Ok(())
        })?;
        let t = Arc::new(tally);
        self.hall_tables
            .write()
            .expect("table lock")
            .insert(slot, t.clone());
        Ok(t)
    }

    /// `c_n(M, N; L)`, by counting subgroups of a fixed group of type `L`.
    /// Zero whenever a rank exceeds `n` or the orders do not add up.
    pub fn c_coeff(&self, m: &Partition, nn: &Partition, l: &Partition) -> Result<BigInt> {
        if m.p_rank() > self.n || nn.p_rank() > self.n || l.p_rank() > self.n {
            return Ok(BigInt::zero());
        }
        if l.order_exponent() != m.order_exponent() + nn.order_exponent() {
            return Ok(BigInt::zero());
        }
        if l.is_trivial() {
            return Ok(BigInt::one());
        }
        let key = self.key("c").field("M", m).field("N", nn).field("L", l);
        self.memo.get_or_try_insert(&key, || {
            let table = self.hall_table(l, m.order_exponent())?;
            let hits = table.get(&(m.clone(), nn.clone())).copied().unwrap_or(0);
            Ok(BigInt::from(hits))
        })
    }

    fn pair_table(&self, l: &Partition, k: u32) -> Result<Arc<PairTable>> {
        let slot = (l.clone(), k);
        if let Some(t) = self.pair_tables.read().expect("table lock").get(&slot) {
            return Ok(t.clone());
        }
        let a = Ambient::new(self.p, self.n, l.largest_part())?;
        let mut bigs = Vec::new();
        for_each_subgroup(
            &a,
            &SubgroupFilter::of_order(l.order_exponent()),
            self.budget,
            |s| {
                if type_of(s) == *l {
                    bigs.push(s.clone());
                }
                Ok(())
            },
        )?;
        let smalls = subgroups::enumerate_filtered(&a, &SubgroupFilter::of_order(k), self.budget)?;
        let mut tally = Tally::new();
        for big in &bigs {
            for small in &smalls {
                if big.contains_subgroup(small)? {
                    *tally
                        .entry((type_of(small), quotient_type(big, small)?))
                        .or_insert(0) += 1;
                }
            }
        }
        let t = Arc::new(PairTable {
            l_count: bigs.len() as u64,
            tally,
        });
        self.pair_tables
            .write()
            .expect("table lock")
            .insert(slot, t.clone());
        Ok(t)
    }

    /// `|K_n(M, N; L)|` by enumerating pairs `M' <= L'` inside `(Z/p^r)^n`,
    /// `r` the largest part of `L`.
    pub fn k_count(&self, m: &Partition, nn: &Partition, l: &Partition) -> Result<BigInt> {
        if l.p_rank() > self.n {
            return Ok(BigInt::zero());
        }
        if l.is_trivial() {
            return Ok(BigInt::from(u8::from(m.is_trivial() && nn.is_trivial())));
        }
        let key = self.key("K").field("M", m).field("N", nn).field("L", l);
        self.memo.get_or_try_insert(&key, || {
            let table = self.pair_table(l, m.order_exponent())?;
            let m_l = self.m_count(l)?;
            if BigInt::from(table.l_count) != m_l {
                return Err(Error::Verification(format!(
                    "found {} subgroups of type {l} in rank {}, but |m_n(L)| = {m_l}",
                    table.l_count, self.n
                )));
            }
            Ok(BigInt::from(
                table
                    .tally
                    .get(&(m.clone(), nn.clone()))
                    .copied()
                    .unwrap_or(0),
            ))
        })
    }

    /// `c_n(M, N; L)` as `|K_n(M, N; L)| / |m_n(L)|`; a remainder is an error.
    pub fn c_coeff_verified(&self, m: &Partition, nn: &Partition, l: &Partition) -> Result<BigInt> {
        if m.p_rank() > self.n || nn.p_rank() > self.n || l.p_rank() > self.n {
            return Ok(BigInt::zero());
        }
        let k = self.k_count(m, nn, l)?;
        let m_l = self.m_count(l)?;
        let (quot, rem) = k.div_rem(&m_l);
        if !rem.is_zero() {
            return Err(Error::NonExactDivision {
                numerator: k.to_string(),
                denominator: m_l.to_string(),
                what: format!("c_{}({m},{nn};{l}) at p={}", self.n, self.p),
            });
        }
        Ok(quot)
    }

    pub fn multiply(&self, x: &HeckeElement, y: &HeckeElement) -> Result<HeckeElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let mut out = HeckeElement::zero(self.p, self.n);
        for (m, a) in x.terms() {
            for (nn, b) in y.terms() {
                let ab = a * b;
                for l in partitions_of(m.order_exponent() + nn.order_exponent(), self.n) {
                    // a subgroup and a quotient of L both embed into L
                    if !embeds(m, &l) || !embeds(nn, &l) {
                        continue;
                    }
                    let c = self.c_coeff(m, nn, &l)?;
                    if !c.is_zero() {
                        out.add_term(l, &ab * c);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn multiply_basis(&self, m: &Partition, nn: &Partition) -> Result<HeckeElement> {
        self.multiply(&self.basis(m)?, &self.basis(nn)?)
    }

    /// `T(p^r)`: one copy of every class of order `p^r` and rank at most `n`.
    pub fn t_aggregate(&self, r: u32) -> HeckeElement {
        HeckeElement::from_terms(
            self.p,
            self.n,
            partitions_of(r, self.n)
                .into_iter()
                .map(|m| (m, BigInt::one())),
        )
        .expect("ranks bounded by n")
    }
}
