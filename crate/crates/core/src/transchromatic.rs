//! The homomorphism `omega: H_{n+1} -> H_n` attached to a split surjection
//! `mu: (Q_p/Z_p)^(n+1) -> Q_p/Z_p` with kernel `V`, its coefficients
//! `a_n(M, N) = |I_n(M, N)| / |m_n(N)|`, their unitriangular inverse `b_n`,
//! and checks of the identities relating them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::hecke::{HeckeContext, HeckeElement};
use crate::memo::{CacheKey, Memo};
use crate::pgroups::{embeds, Partition};
use crate::subgroups::{
    for_each_subgroup, intersect, standard_split, type_of, Ambient, Split, SubgroupFilter,
    SubgroupRep, DEFAULT_BUDGET,
};

/// Exponent `r` of the ambient `(Z/p^r)^(n+1)` used to enumerate `I_n(M, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Truncation {
    /// The largest part of `M`.
    #[default]
    Minimal,
    /// The largest part of `M` plus a fixed excess.
    Extra(u32),
    /// The larger of the largest part of `M` and a fixed value.
    AtLeast(u32),
}

impl Truncation {
    pub fn exponent_for(self, m: &Partition) -> u32 {
        match self {
            Truncation::Minimal => m.largest_part(),
            Truncation::Extra(k) => m.largest_part() + k,
            Truncation::AtLeast(r) => m.largest_part().max(r),
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Minimal => write!(f, "min"),
            Truncation::Extra(k) => write!(f, "+{k}"),
            Truncation::AtLeast(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;

    /// `min`, `+k` or a plain exponent `r`.
    fn from_str(s: &str) -> Result<Truncation> {
        let bad = || Error::Parse(format!("bad truncation {s:?}, expected min, +k or r"));
        if s == "min" {
            Ok(Truncation::Minimal)
        } else if let Some(k) = s.strip_prefix('+') {
            k.parse().map(Truncation::Extra).map_err(|_| bad())
        } else {
            s.parse().map(Truncation::AtLeast).map_err(|_| bad())
        }
    }
}

/// Counts keyed by (type of `M'`, type of `M' ∩ V`).
type Tally = HashMap<(Partition, Partition), u64>;

/// Parameters of `omega: H_{n+1} -> H_n` together with both algebras.
pub struct OmegaContext {
    p: u64,
    n: usize,
    split: Split,
    truncation: Truncation,
    budget: u64,
    memo: Arc<Memo>,
    source: HeckeContext,
    target: HeckeContext,
    i_tables: RwLock<HashMap<(u32, u32), Arc<Tally>>>,
    j_tables: RwLock<HashMap<u32, Arc<HashMap<SubgroupRep, u64>>>>,
}

impl OmegaContext {
    /// `omega` from rank `n + 1` to rank `n`.
    pub fn new(p: u64, n: usize) -> Result<OmegaContext> {
        let memo = Arc::new(Memo::new());
        let source = HeckeContext::new(p, n + 1)?.with_memo(memo.clone());
        let target = HeckeContext::new(p, n)?.with_memo(memo.clone());
        Ok(OmegaContext {
            p,
            n,
            split: Split::First,
            truncation: Truncation::Minimal,
            budget: DEFAULT_BUDGET,
            memo,
            source,
            target,
            i_tables: RwLock::default(),
            j_tables: RwLock::default(),
        })
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self.source = self.source.with_budget(budget);
        self.target = self.target.with_budget(budget);
        self
    }

    pub fn with_closed_form_counts(mut self, on: bool) -> Self {
        self.source = self.source.with_closed_form_counts(on);
        self.target = self.target.with_closed_form_counts(on);
        self
    }

    pub fn with_memo(mut self, memo: Arc<Memo>) -> Self {
        self.source = self.source.with_memo(memo.clone());
        self.target = self.target.with_memo(memo.clone());
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

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn memo(&self) -> &Arc<Memo> {
        &self.memo
    }

    /// `H_{n+1}`.
    pub fn source(&self) -> &HeckeContext {
        &self.source
    }

    /// `H_n`.
    pub fn target(&self) -> &HeckeContext {
        &self.target
    }

    fn key(&self, kind: &str) -> CacheKey {
        CacheKey::new(kind)
            .field("p", self.p)
            .field("n", self.n)
            .field("split", self.split.name())
    }

    /// The ambient `(Z/p^r)^(n+1)` and its copy of `V[p^r]`.
    pub fn ambient_and_v(&self, r: u32) -> Result<(Ambient, SubgroupRep)> {
        let a = Ambient::new(self.p, self.n + 1, r)?;
        let v = standard_split(&a, self.split)?;
        Ok((a, v))
    }

    fn i_table(&self, r: u32, k: u32) -> Result<Arc<Tally>> {
        if let Some(t) = self.i_tables.read().expect("table lock").get(&(r, k)) {
            return Ok(t.clone());
        }
        let (a, v) = self.ambient_and_v(r)?;
        let mut tally = Tally::new();
        for_each_subgroup(&a, &SubgroupFilter::of_order(k), self.budget, |s| {
            *tally
                .entry((type_of(s), type_of(&intersect(s, &v)?)))
                .or_insert(0) += 1;
            Ok(())
        })?;
        let t = Arc::new(tally);
        self.i_tables
            .write()
            .expect("table lock")
            .insert((r, k), t.clone());
        Ok(t)
    }

    /// `|I_n(M, N)|`: subgroups `M'` of `(Z/p^r)^(n+1)` of type `M` with
    /// `M' ∩ V` of type `N`, for `r` given by the truncation policy.
    pub fn i_count(&self, m: &Partition, nn: &Partition) -> Result<BigInt> {
        if m.p_rank() > self.n + 1 || nn.p_rank() > self.n {
            return Ok(BigInt::zero());
        }
        if m.is_trivial() {
            return Ok(BigInt::from(u8::from(nn.is_trivial())));
        }
        let r = self.truncation.exponent_for(m);
        let key = self.key("i").field("r", r).field("M", m).field("N", nn);
        self.memo.get_or_try_insert(&key, || {
            let table = self.i_table(r, m.order_exponent())?;
            Ok(BigInt::from(
                table.get(&(m.clone(), nn.clone())).copied().unwrap_or(0),
            ))
        })
    }

    /// `a_n(M, N) = |I_n(M, N)| / |m_n(N)|`; a remainder is an error.
    pub fn a_coeff(&self, m: &Partition, nn: &Partition) -> Result<BigInt> {
        let i = self.i_count(m, nn)?;
        if i.is_zero() {
            return Ok(i);
        }
        let m_n = self.target.m_count(nn)?;
        let (quot, rem) = i.div_rem(&m_n);
        if !rem.is_zero() {
            return Err(Error::NonExactDivision {
                numerator: i.to_string(),
                denominator: m_n.to_string(),
                what: format!("a_{}({m},{nn}) at p={}", self.n, self.p),
            });
        }
        Ok(quot)
    }

    fn check_source(&self, x: &HeckeElement) -> Result<()> {
        if x.p() != self.p || x.n() != self.n + 1 {
            return Err(Error::ParameterMismatch(format!(
                "omega maps H_{} at p={}, got an element of H_{} at p={}",
                self.n + 1,
                self.p,
                x.n(),
                x.p()
            )));
        }
        Ok(())
    }

    /// `omega(M) = sum_N a_n(M, N) N`, extended linearly.
    pub fn omega(&self, x: &HeckeElement) -> Result<HeckeElement> {
        self.check_source(x)?;
        let mut terms = Vec::new();
        for (m, c) in x.terms() {
            for nn in m.sub_partitions() {
                if nn.p_rank() > self.n {
                    continue;
                }
                let a = self.a_coeff(m, &nn)?;
                if !a.is_zero() {
                    terms.push((nn, c * a));
                }
            }
        }
        HeckeElement::from_terms(self.p, self.n, terms)
    }

    pub fn omega_basis(&self, m: &Partition) -> Result<HeckeElement> {
        self.omega(&self.source.basis(m)?)
    }

    fn check_target_class(&self, m: &Partition) -> Result<()> {
        if m.p_rank() > self.n {
            return Err(Error::InvalidParameter(format!(
                "class {m} has p-rank above {}",
                self.n
            )));
        }
        Ok(())
    }

    /// `b_n(B, A)`: `1` on the diagonal, `0` unless `A` embeds in `B`, and
    /// otherwise `-sum_{A <= C < B} a_n(B, C) b_n(C, A)`.
    pub fn b_coeff(&self, b: &Partition, a: &Partition) -> Result<BigInt> {
        self.check_target_class(a)?;
        self.check_target_class(b)?;
        if !embeds(a, b) {
            return Ok(BigInt::zero());
        }
        if a == b {
            return Ok(BigInt::one());
        }
        let key = self
            .key("b")
            .field("t", self.truncation)
            .field("B", b)
            .field("A", a);
        if let Some(v) = self.memo.get(&key.to_string()) {
            return Ok(v);
        }
        let mut sum = BigInt::zero();
        for c in b.sub_partitions() {
            if c == *b || !embeds(a, &c) {
                continue;
            }
            let abc = self.a_coeff(b, &c)?;
            if !abc.is_zero() {
                sum += abc * self.b_coeff(&c, a)?;
            }
        }
        let v = -sum;
        self.memo.insert(key.to_string(), v.clone());
        Ok(v)
    }

    /// `sum_{A <= C <= B} a_n(B, C) b_n(C, A)`.
    pub fn ab_delta(&self, b: &Partition, a: &Partition) -> Result<BigInt> {
        let mut sum = BigInt::zero();
        for c in b.sub_partitions() {
            if embeds(a, &c) {
                sum += self.a_coeff(b, &c)? * self.b_coeff(&c, a)?;
            }
        }
        Ok(sum)
    }

    /// `sum_{A <= C <= B} b_n(B, C) a_n(C, A)`.
    pub fn ba_delta(&self, b: &Partition, a: &Partition) -> Result<BigInt> {
        let mut sum = BigInt::zero();
        for c in b.sub_partitions() {
            if embeds(a, &c) {
                sum += self.b_coeff(b, &c)? * self.a_coeff(&c, a)?;
            }
        }
        Ok(sum)
    }

    /// `sum_{N' <= N} b_n(N, N') N'` in `H_{n+1}`, a preimage of `N` under `omega`.
    pub fn lift_section(&self, nn: &Partition) -> Result<HeckeElement> {
        self.check_target_class(nn)?;
        let terms = nn
            .sub_partitions()
            .into_iter()
            .map(|c| self.b_coeff(nn, &c).map(|b| (c, b)))
            .collect::<Result<Vec<_>>>()?;
        HeckeElement::from_terms(self.p, self.n + 1, terms)
    }

    /// Subgroups of `V[p^r]` inside the rank-`n+1` ambient.
    pub fn subgroups_of_v(&self, r: u32) -> Result<Vec<SubgroupRep>> {
        let (a, v) = self.ambient_and_v(r)?;
        let mut out = Vec::new();
        for_each_subgroup(&a, &SubgroupFilter::all(), self.budget, |s| {
            if v.contains_subgroup(s)? {
                out.push(s.clone());
            }
            Ok(())
        })?;
        Ok(out)
    }

    fn j_table(&self, r: u32) -> Result<Arc<HashMap<SubgroupRep, u64>>> {
        if let Some(t) = self.j_tables.read().expect("table lock").get(&r) {
            return Ok(t.clone());
        }
        let (a, v) = self.ambient_and_v(r)?;
        let mut tally = HashMap::new();
        for_each_subgroup(&a, &SubgroupFilter::of_order(r), self.budget, |s| {
            *tally.entry(intersect(s, &v)?).or_insert(0) += 1;
            Ok(())
        })?;
        let t = Arc::new(tally);
        self.j_tables
            .write()
            .expect("table lock")
            .insert(r, t.clone());
        Ok(t)
    }

    /// `|J_n(p^r, N)|`: subgroups `M` of `(Z/p^r)^(n+1)` of order `p^r` with
    /// `M ∩ V = N` as subgroups. Fails unless the count is `p^((r-s)n)`,
    /// `p^s = |N|`.
    pub fn j_count(&self, r: u32, nn: &SubgroupRep) -> Result<BigInt> {
        let (a, v) = self.ambient_and_v(r)?;
        if *nn.ambient() != a {
            return Err(Error::ParameterMismatch(format!(
                "subgroup lives in {:?}, expected {a:?}",
                nn.ambient()
            )));
        }
        if !v.contains_subgroup(nn)? {
            return Err(Error::NotContained);
        }
        let s = nn.log_order();
        if s > r {
            return Err(Error::InvalidParameter(format!(
                "|N| = p^{s} exceeds p^{r}"
            )));
        }
        let count = BigInt::from(self.j_table(r)?.get(nn).copied().unwrap_or(0));
        let expected = num_traits::pow(BigInt::from(self.p), ((r - s) as usize) * self.n);
        if count != expected {
            return Err(Error::Verification(format!(
                "|J_{}(p^{r}, N)| = {count} for N of type {}, expected p^{} = {expected}",
                self.n,
                type_of(nn),
                (r - s) as usize * self.n
            )));
        }
        Ok(count)
    }

    /// Compares `omega(M1 * M2)` with `omega(M1) * omega(M2)`.
    pub fn verify_omega_hom(&self, m1: &Partition, m2: &Partition) -> Result<HomReport> {
        let lhs = self.omega(&self.source.multiply_basis(m1, m2)?)?;
        let rhs = self
            .target
            .multiply(&self.omega_basis(m1)?, &self.omega_basis(m2)?)?;
        let mut mismatches = Vec::new();
        let mut support: Vec<&Partition> = lhs.terms().chain(rhs.terms()).map(|(m, _)| m).collect();
        support.sort();
        support.dedup();
        for n3 in support {
            let (l, r) = (lhs.coeff(n3), rhs.coeff(n3));
            if l != r {
                mismatches.push((n3.clone(), l, r));
            }
        }
        Ok(HomReport {
            m1: m1.clone(),
            m2: m2.clone(),
            lhs,
            rhs,
            mismatches,
        })
    }

    /// Checks `omega(T(p^r)) = sum_s p^((r-s)n) T(p^s)` and, for `r > 0`,
    /// `T(p^r) = omega(T(p^r)) - p^n omega(T(p^(r-1)))` in `H_n`.
    pub fn verify_tp_formula(&self, r: u32) -> Result<TpReport> {
        let image = self.omega(&self.source.t_aggregate(r))?;
        let mut expected = HeckeElement::zero(self.p, self.n);
        let mut terms = Vec::new();
        for s in 0..=r {
            let weight = num_traits::pow(BigInt::from(self.p), (r - s) as usize * self.n);
            let t = self.target.t_aggregate(s);
            expected = expected.add(&t.scale(&weight))?;
            terms.push(TpTerm {
                s,
                weight,
                aggregate: t,
            });
        }
        let corollary = if r == 0 {
            None
        } else {
            let prev = self.omega(&self.source.t_aggregate(r - 1))?;
            let pn = num_traits::pow(BigInt::from(self.p), self.n);
            let rearranged = image.sub(&prev.scale(&pn))?;
            Some(rearranged == self.target.t_aggregate(r))
        };
        Ok(TpReport {
            r,
            theorem: image == expected,
            image,
            expected,
            terms,
            corollary,
        })
    }
}

/// Outcome of one homomorphism check.
#[derive(Clone, Debug)]
pub struct HomReport {
    pub m1: Partition,
    pub m2: Partition,
    /// `omega(M1 * M2)`.
    pub lhs: HeckeElement,
    /// `omega(M1) * omega(M2)`.
    pub rhs: HeckeElement,
    /// `(N3, lhs coefficient, rhs coefficient)` wherever they differ.
    pub mismatches: Vec<(Partition, BigInt, BigInt)>,
}

impl HomReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "M1": self.m1,
            "M2": self.m2,
            "pass": self.passed(),
            "lhs": self.lhs.to_json_value(),
            "rhs": self.rhs.to_json_value(),
            "mismatches": self.mismatches.iter().map(|(n3, l, r)| json!({
                "N3": n3, "lhs": l.to_string(), "rhs": r.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct TpTerm {
    pub s: u32,
    /// `p^((r-s)n)`.
    pub weight: BigInt,
    /// `T(p^s)` in `H_n`.
    pub aggregate: HeckeElement,
}

/// Outcome of the aggregate pushforward check at one `r`.
#[derive(Clone, Debug)]
pub struct TpReport {
    pub r: u32,
    /// `omega(T(p^r))`.
    pub image: HeckeElement,
    /// `sum_s p^((r-s)n) T(p^s)`.
    pub expected: HeckeElement,
    pub terms: Vec<TpTerm>,
    pub theorem: bool,
    /// `None` at `r = 0`, where the rearranged form is vacuous.
    pub corollary: Option<bool>,
}

impl TpReport {
    pub fn passed(&self) -> bool {
        self.theorem && self.corollary.unwrap_or(true)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "r": self.r,
            "pass": self.passed(),
            "theorem": self.theorem,
            "corollary": self.corollary,
            "image": self.image.to_json_value(),
            "expected": self.expected.to_json_value(),
            "terms": self.terms.iter().map(|t| json!({
                "s": t.s, "weight": t.weight.to_string(), "aggregate": t.aggregate.to_json_value(),
            })).collect::<Vec<_>>(),
        })
    }
}
