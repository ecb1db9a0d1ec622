use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgroups::Partition;

/// A `Z`-linear combination of classes of p-groups of rank at most `n`.
#[derive(Clone, PartialEq, Eq)]
pub struct HeckeElement {
    p: u64,
    n: usize,
    terms: BTreeMap<Partition, BigInt>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    lambda: Partition,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    p: u64,
    n: usize,
    terms: Vec<TermJson>,
}

impl HeckeElement {
    pub fn zero(p: u64, n: usize) -> HeckeElement {
        HeckeElement {
            p,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(p: u64, n: usize) -> HeckeElement {
        HeckeElement::basis(p, n, Partition::trivial()).expect("trivial class has rank 0")
    }

    pub fn basis(p: u64, n: usize, m: Partition) -> Result<HeckeElement> {
        HeckeElement::from_terms(p, n, [(m, BigInt::one())])
    }

    /// Sums the given terms; rejects classes of rank greater than `n`.
    pub fn from_terms<I>(p: u64, n: usize, terms: I) -> Result<HeckeElement>
    where
        I: IntoIterator<Item = (Partition, BigInt)>,
    {
        let mut x = HeckeElement::zero(p, n);
        for (m, c) in terms {
            if m.p_rank() > n {
                return Err(Error::ParameterMismatch(format!(
                    "class {m} has p-rank {} > {n}",
                    m.p_rank()
                )));
            }
            x.add_term(m, c);
        }
        Ok(x)
    }

    pub(crate) fn add_term(&mut self, m: Partition, c: BigInt) {
        debug_assert!(m.p_rank() <= self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Partition) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn check_same(&self, other: &HeckeElement) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::ParameterMismatch(format!(
                "element of (p={}, n={}) vs (p={}, n={})",
                self.p, self.n, other.p, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &HeckeElement) -> Result<HeckeElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HeckeElement) -> Result<HeckeElement> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> HeckeElement {
        let mut out = HeckeElement::zero(self.p, self.n);
        if !k.is_zero() {
            for (m, c) in &self.terms {
                out.terms.insert(m.clone(), c * k);
            }
        }
        out
    }

    /// Terms in display order: order exponent descending, then the partition
    /// order within a degree (`[2]` before `[1,1]`).
    pub fn display_terms(&self) -> Vec<(&Partition, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            b.order_exponent()
                .cmp(&a.order_exponent())
                .then_with(|| a.cmp(b))
        });
        v
    }

    /// Parses the text form `"c1*[..] + c2*[..] - c3*[..]"`. A bare `[..]`
    /// has coefficient 1 and `"0"` is the zero element.
    pub fn parse(p: u64, n: usize, s: &str) -> Result<HeckeElement> {
        let text = s.trim();
        if text == "0" {
            return Ok(HeckeElement::zero(p, n));
        }
        let bytes = text.as_bytes();
        let mut i = 0;
        let mut terms = Vec::new();
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        let err = |msg: &str| Error::Parse(format!("{msg} in element {s:?}"));
        loop {
            skip_ws(&mut i);
            let mut negative = false;
            if terms.is_empty() {
                if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                    negative = bytes[i] == b'-';
                    i += 1;
                }
            } else {
                match bytes.get(i) {
                    Some(b'+') => {}
                    Some(b'-') => negative = true,
                    _ => return Err(err("expected + or -")),
                }
                i += 1;
                skip_ws(&mut i);
                if i < bytes.len() && bytes[i] == b'-' {
                    negative = !negative;
                    i += 1;
                }
            }
            skip_ws(&mut i);
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coeff = if i > start {
                let c: BigInt = text[start..i].parse().map_err(|_| err("bad coefficient"))?;
                skip_ws(&mut i);
                if bytes.get(i) != Some(&b'*') {
                    return Err(err("expected *"));
                }
                i += 1;
                skip_ws(&mut i);
                c
            } else {
                BigInt::one()
            };
            if bytes.get(i) != Some(&b'[') {
                return Err(err("expected ["));
            }
            let close = text[i..].find(']').ok_or_else(|| err("unclosed ["))? + i;
            let lam: Partition = text[i..=close].parse()?;
            i = close + 1;
            terms.push((lam, if negative { -coeff } else { coeff }));
            skip_ws(&mut i);
            if i == bytes.len() {
                break;
            }
        }
        HeckeElement::from_terms(p, n, terms)
    }

    fn to_doc(&self) -> ElementJson {
        ElementJson {
            p: self.p,
            n: self.n,
            terms: self
                .display_terms()
                .into_iter()
                .map(|(m, c)| TermJson {
                    lambda: m.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("element serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("element serializes")
    }

    pub fn from_json(s: &str) -> Result<HeckeElement> {
        let doc: ElementJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let terms = doc
            .terms
            .into_iter()
            .map(|t| {
                t.coeff
                    .parse::<BigInt>()
                    .map(|c| (t.lambda, c))
                    .map_err(|e| Error::Parse(format!("bad coefficient {:?}: {e}", t.coeff)))
            })
            .collect::<Result<Vec<_>>>()?;
        HeckeElement::from_terms(doc.p, doc.n, terms)
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.display_terms().into_iter().enumerate() {
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{c}*{m}")?,
                (0, true) => write!(f, "-{}*{m}", c.abs())?,
                (_, false) => write!(f, " + {c}*{m}")?,
                (_, true) => write!(f, " - {}*{m}", c.abs())?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H(p={}, n={}; {self})", self.p, self.n)
    }
}
