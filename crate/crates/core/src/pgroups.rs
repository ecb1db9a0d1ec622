//! Partitions as isomorphism types of finite abelian p-groups.
//!
//! The partition `[l1, l2, ..., lk]` stands for `Z/p^l1 + ... + Z/p^lk`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive parts; `[]` is the trivial group.
///
/// Ordered by order exponent first, then reverse-lexicographically within a
/// degree, so `[] < [1] < [2] < [1,1] < [3] < [2,1] < [1,1,1]`. The order
/// is a linear extension of [`embeds`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Partition> {
        if parts.contains(&0) {
            return Err(Error::Parse(format!("partition {parts:?} has a zero part")));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!(
                "partition {parts:?} is not weakly decreasing"
            )));
        }
        Ok(Partition { parts })
    }

    /// Sorts and drops zeros.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Partition {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn trivial() -> Partition {
        Partition::default()
    }

    /// `(Z/p)^k`, the k-th polynomial generator of the Hecke algebra.
    pub fn elementary(k: usize) -> Partition {
        Partition { parts: vec![1; k] }
    }

    /// `(Z/p^r)^k`.
    pub fn homocyclic(r: u32, k: usize) -> Partition {
        if r == 0 {
            return Partition::trivial();
        }
        Partition { parts: vec![r; k] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of cyclic factors.
    pub fn p_rank(&self) -> usize {
        self.parts.len()
    }

    /// `log_p` of the group order.
    pub fn order_exponent(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Smallest `r` with `p^r` killing the group.
    pub fn largest_part(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `i`-th part, zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Type of the `p^k`-torsion subgroup.
    pub fn torsion_type(&self, k: u32) -> Partition {
        Partition::from_unsorted(self.parts.iter().map(|&x| x.min(k)).collect())
    }

    /// `log_p |A[p^k]|` for `k = 0..=largest_part`.
    pub fn torsion_profile(&self) -> Vec<u32> {
        (0..=self.largest_part())
            .map(|k| self.parts.iter().map(|&x| x.min(k)).sum())
            .collect()
    }

    pub fn conjugate(&self) -> Partition {
        let parts = (1..=self.largest_part())
            .map(|j| self.parts.iter().filter(|&&x| x >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Every partition whose diagram fits inside this one, in ascending order.
    pub fn sub_partitions(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.parts.len());
        fn rec(bound: &[u32], i: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            out.push(Partition { parts: cur.clone() });
            if i == bound.len() {
                return;
            }
            for x in 1..=cap.min(bound[i]) {
                cur.push(x);
                rec(bound, i + 1, x, cur, out);
                cur.pop();
            }
        }
        rec(&self.parts, 0, u32::MAX, &mut cur, &mut out);
        out.sort();
        out
    }
}

/// Whether a group of type `mu` embeds into a group of type `lambda`,
/// decided by diagram containment.
pub fn embeds(mu: &Partition, lambda: &Partition) -> bool {
    mu.p_rank() <= lambda.p_rank() && mu.parts.iter().zip(&lambda.parts).all(|(a, b)| a <= b)
}

/// All partitions of exactly `total` with at most `max_parts` parts, reverse-lex.
pub fn partitions_of(total: u32, max_parts: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rest: u32, cap: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if slots == 0 {
            return;
        }
        for x in (1..=cap.min(rest)).rev() {
            cur.push(x);
            rec(rest - x, x, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(total, total, max_parts, &mut cur, &mut out);
    out
}

/// All partitions with order exponent at most `max_order_exp` and at most
/// `max_parts` parts, graded by order exponent then reverse-lex.
pub fn partitions_up_to(max_order_exp: u32, max_parts: usize) -> Vec<Partition> {
    (0..=max_order_exp)
        .flat_map(|d| partitions_of(d, max_parts))
        .collect()
}

/// The partition whose `p^k`-torsion has order `p^{d[k]}`.
pub fn type_from_torsion_profile(d: &[u32]) -> Result<Partition> {
    if d.first() != Some(&0) {
        return Err(Error::InvalidProfile(d.to_vec()));
    }
    let mut steps = Vec::with_capacity(d.len());
    for w in d.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidProfile(d.to_vec()));
        }
        steps.push(w[1] - w[0]);
    }
    if !steps.windows(2).all(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProfile(d.to_vec()));
    }
    steps.retain(|&x| x > 0);
    Ok(Partition { parts: steps }.conjugate())
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_exponent()
            .cmp(&other.order_exponent())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"[a,b,c]"`; whitespace around tokens is allowed, unsorted or
/// zero parts are rejected.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Partition> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [..], got {s:?}")))?
            .trim();
        if inner.is_empty() {
            return Ok(Partition::trivial());
        }
        let parts = inner
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Parse(format!("bad part {tok:?} in {s:?}")));
                }
                tok.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad part {tok:?} in {s:?}: {e}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(d)?;
        Partition::new(parts).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn rank_and_order() {
        assert_eq!(p("[]").p_rank(), 0);
        assert_eq!(p("[2,1]").p_rank(), 2);
        assert_eq!(p("[1,1,1]").p_rank(), 3);
        assert_eq!(p("[]").order_exponent(), 0);
        assert_eq!(p("[2,1]").order_exponent(), 3);
        assert_eq!(p("[3]").order_exponent(), 3);
    }

    #[test]
    fn torsion() {
        assert_eq!(p("[2,1]").torsion_type(1), p("[1,1]"));
        assert_eq!(p("[2,1]").torsion_type(0), p("[]"));
        assert_eq!(p("[3]").torsion_type(2), p("[2]"));
    }

    #[test]
    fn conjugates() {
        assert_eq!(p("[2,1]").conjugate(), p("[2,1]"));
        assert_eq!(p("[3]").conjugate(), p("[1,1,1]"));
        assert_eq!(p("[]").conjugate(), p("[]"));
        for lam in partitions_up_to(8, 8) {
            assert_eq!(lam.conjugate().conjugate(), lam);
        }
    }

    #[test]
    fn embedding_examples() {
        assert!(embeds(&p("[1]"), &p("[2]")));
        assert!(!embeds(&p("[2]"), &p("[1,1]")));
        assert!(embeds(&p("[2,1]"), &p("[2,1]")));
        assert!(embeds(&p("[]"), &p("[]")));
    }

    #[test]
    fn embedding_is_a_partial_order() {
        let all = partitions_up_to(5, 3);
        for a in &all {
            assert!(embeds(a, a));
            for b in &all {
                if embeds(a, b) && embeds(b, a) {
                    assert_eq!(a, b);
                }
                if embeds(a, b) && a != b {
                    assert!(a < b, "total order must extend embedding: {a} {b}");
                }
                for c in &all {
                    if embeds(a, b) && embeds(b, c) {
                        assert!(embeds(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(partitions_up_to(0, 3), vec![p("[]")]);
        assert_eq!(partitions_up_to(2, 1), vec![p("[]"), p("[1]"), p("[2]")]);
        assert_eq!(
            partitions_up_to(2, 2),
            vec![p("[]"), p("[1]"), p("[2]"), p("[1,1]")]
        );
        let all = partitions_up_to(7, 4);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        // partition numbers p(k) for k <= 7, no rank bound
        let counts: Vec<usize> = (0..=7).map(|k| partitions_of(k, 7).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn profiles() {
        assert_eq!(type_from_torsion_profile(&[0, 1, 2]).unwrap(), p("[2]"));
        assert_eq!(type_from_torsion_profile(&[0, 2, 2]).unwrap(), p("[1,1]"));
        assert_eq!(type_from_torsion_profile(&[0]).unwrap(), p("[]"));
        assert!(type_from_torsion_profile(&[1, 2]).is_err());
        assert!(type_from_torsion_profile(&[0, 2, 1]).is_err());
        assert!(type_from_torsion_profile(&[0, 1, 3]).is_err());
        for lam in partitions_up_to(6, 3) {
            assert_eq!(
                type_from_torsion_profile(&lam.torsion_profile()).unwrap(),
                lam
            );
        }
    }

    #[test]
    fn sub_partitions_match_filter() {
        for lam in partitions_up_to(6, 3) {
            let expected: Vec<Partition> = partitions_up_to(6, 3)
                .into_iter()
                .filter(|mu| embeds(mu, &lam))
                .collect();
            assert_eq!(lam.sub_partitions(), expected);
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(p("[]").to_string(), "[]");
        assert_eq!(p(" [ 3, 1 ,1 ] ").to_string(), "[3,1,1]");
        for bad in ["[1,2]", "[0]", "[1,,1]", "1,1", "[a]", "[-1]", "", "[1"] {
            assert!(bad.parse::<Partition>().is_err(), "{bad}");
        }
        let json = serde_json::to_string(&p("[2,1]")).unwrap();
        assert_eq!(json, "[2,1]");
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }
}
