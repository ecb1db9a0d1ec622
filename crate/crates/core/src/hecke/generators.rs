use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::{HeckeContext, HeckeElement};
use crate::error::{Error, Result};
use crate::pgroups::{partitions_of, Partition};

/// Integer polynomial in `T_1, ..., T_n`, where `T_k` is the class of
/// `(Z/p)^k`. Keys are exponent vectors `(a_1, ..., a_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl GeneratorPoly {
    pub fn zero(n: usize) -> GeneratorPoly {
        GeneratorPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: BigInt) -> GeneratorPoly {
        let mut q = GeneratorPoly::zero(n);
        q.add_term(vec![0; n], c);
        q
    }

    /// `T_k` for `1 <= k <= n`.
    pub fn generator(n: usize, k: usize) -> Result<GeneratorPoly> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "no generator T{k} in rank {n}"
            )));
        }
        let mut e = vec![0; n];
        e[k - 1] = 1;
        let mut q = GeneratorPoly::zero(n);
        q.add_term(e, BigInt::one());
        Ok(q)
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<GeneratorPoly>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut q = GeneratorPoly::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.len(),
                });
            }
            q.add_term(e, c);
        }
        Ok(q)
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Weighted degree `sum k * a_k`, the order exponent of the evaluated monomial.
    pub fn monomial_degree(e: &[u32]) -> u32 {
        e.iter().enumerate().map(|(i, &a)| (i as u32 + 1) * a).sum()
    }

    /// Terms ordered by weighted degree descending, then exponent vector descending.
    fn display_terms(&self) -> Vec<(&Vec<u32>, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            Self::monomial_degree(b)
                .cmp(&Self::monomial_degree(a))
                .then_with(|| b.cmp(a))
        });
        v
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .display_terms()
            .into_iter()
            .map(|(e, c)| json!({"exponents": e, "coeff": c.to_string()}))
            .collect();
        json!({"n": self.n, "terms": terms})
    }
}

fn monomial_text(e: &[u32]) -> String {
    let factors: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| {
            if a == 1 {
                format!("T{}", i + 1)
            } else {
                format!("T{}^{a}", i + 1)
            }
        })
        .collect();
    factors.join("*")
}

impl fmt::Display for GeneratorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.display_terms().into_iter().enumerate() {
            let sign = match (i, c.is_negative()) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            let mag = c.abs();
            let mono = monomial_text(e);
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{sign}{mag}")?,
                (false, true) => write!(f, "{sign}{mono}")?,
                (false, false) => write!(f, "{sign}{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

/// Exponent vectors of weighted degree `d` in `n` variables, one per
/// partition of `d` with parts at most `n` (`a_k` = multiplicity of `k`).
fn monomials_of_degree(d: u32, n: usize) -> Vec<Vec<u32>> {
    partitions_of(d, n)
        .into_iter()
        .map(|lam| {
            let mut e = vec![0; n];
            for &k in lam.conjugate().parts() {
                e[k as usize - 1] += 1;
            }
            e
        })
        .collect()
}

/// Solves `a x = b` over the rationals; `None` if `a` is singular.
fn solve_rational(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let dim = b.len();
    for col in 0..dim {
        let pivot = (col..dim).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for r in 0..dim {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot_row[col];
            for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * y;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..dim).map(|i| &b[i] / &a[i][i]).collect())
}

impl HeckeContext {
    fn check_poly(&self, q: &GeneratorPoly) -> Result<()> {
        if q.n != self.n {
            return Err(Error::ParameterMismatch(format!(
                "polynomial in {} generators used in H_{}",
                q.n, self.n
            )));
        }
        Ok(())
    }

    fn eval_monomial(
        &self,
        e: &[u32],
        cache: &mut HashMap<Vec<u32>, HeckeElement>,
    ) -> Result<HeckeElement> {
        if let Some(x) = cache.get(e) {
            return Ok(x.clone());
        }
        let value = match e.iter().position(|&a| a > 0) {
            None => self.identity(),
            Some(i) => {
                let mut rest = e.to_vec();
                rest[i] -= 1;
                let tail = self.eval_monomial(&rest, cache)?;
                self.multiply(&self.basis(&Partition::elementary(i + 1))?, &tail)?
            }
        };
        cache.insert(e.to_vec(), value.clone());
        Ok(value)
    }

    /// Substitutes `T_k -> [1^k]` and expands.
    pub fn eval_generator_poly(&self, q: &GeneratorPoly) -> Result<HeckeElement> {
        self.check_poly(q)?;
        let mut cache = HashMap::new();
        let mut out = HeckeElement::zero(self.p, self.n);
        for (e, c) in q.terms() {
            out = out.add(&self.eval_monomial(e, &mut cache)?.scale(c))?;
        }
        Ok(out)
    }

    /// Writes `x` as an integer polynomial in the generators, solving one
    /// square linear system per graded piece.
    pub fn decompose_in_generators(&self, x: &HeckeElement) -> Result<GeneratorPoly> {
        self.check_element(x)?;
        let mut by_degree: BTreeMap<u32, Vec<(&Partition, &BigInt)>> = BTreeMap::new();
        for (m, c) in x.terms() {
            by_degree
                .entry(m.order_exponent())
                .or_default()
                .push((m, c));
        }
        let mut cache = HashMap::new();
        let mut out = GeneratorPoly::zero(self.n);
        for (d, piece) in by_degree {
            let rows = partitions_of(d, self.n);
            let monos = monomials_of_degree(d, self.n);
            let values = monos
                .iter()
                .map(|e| self.eval_monomial(e, &mut cache))
                .collect::<Result<Vec<_>>>()?;
            let a: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|lam| {
                    values
                        .iter()
                        .map(|v| BigRational::from_integer(v.coeff(lam)))
                        .collect()
                })
                .collect();
            let mut b = vec![BigRational::zero(); rows.len()];
            for (m, c) in piece {
                let i = rows
                    .iter()
                    .position(|lam| lam == m)
                    .expect("class of rank <= n");
                b[i] = BigRational::from_integer(c.clone());
            }
            let sol = solve_rational(a, b).ok_or(Error::SingularSystem { degree: d })?;
            for (e, v) in monos.into_iter().zip(sol) {
                if !v.is_integer() {
                    return Err(Error::NonIntegerSolution {
                        degree: d,
                        value: v.to_string(),
                    });
                }
                out.add_term(e, v.to_integer());
            }
        }
        Ok(out)
    }
}
