//! Sparse multivariate polynomials over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{fmt_q, q, Q};
use crate::text::{join_terms, parse_terms};

pub type Exponent = Vec<u32>;

/// Polynomial in `x₁…x_d`; no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoly {
    dim: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl RationalPoly {
    pub fn zero(dim: usize) -> Self {
        RationalPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Q) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Q::one())
    }

    /// The coordinate `x_{i+1}` (0-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exp: Exponent, c: Q) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.dim]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, exp: &[u32]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    /// Adds `c·x^exp` in place.
    pub fn add_term(&mut self, exp: Exponent, c: Q) {
        debug_assert_eq!(exp.len(), self.dim);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
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

    pub fn add_assign_scaled(&mut self, other: &RationalPoly, c: &Q) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> RationalPoly {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        RationalPoly { dim: self.dim, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn checked_mul(&self, other: &RationalPoly) -> Result<RationalPoly> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    /// `∂/∂x_{i+1}` (0-based `i`).
    pub fn partial(&self, i: usize) -> RationalPoly {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * q(e[i] as i64));
            }
        }
        out
    }

    /// `x_{i+1}·p` (0-based `i`).
    pub fn mul_var(&self, i: usize) -> RationalPoly {
        RationalPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f[i] += 1;
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// `∫₀¹ t^k p(t·x) dt`: a monomial of degree `a` is divided by `k+a+1`.
    pub fn ray_integral(&self, k: u32) -> RationalPoly {
        RationalPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let a: u32 = e.iter().sum();
                    (e.clone(), c / q((k + a + 1) as i64))
                })
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.dim, "evaluation point dimension mismatch");
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Parses the text grammar, e.g. `3/2*x1^2*x3 - x2`.
    pub fn parse(dim: usize, src: &str) -> Result<RationalPoly> {
        let mut p = Self::zero(dim);
        for t in parse_terms(src)? {
            if t.wedge.is_some() {
                return Err(Error::Malformed(format!("unexpected wedge factor in polynomial `{src}`")));
            }
            p.add_term(exponent_of(dim, &t.vars)?, t.coeff);
        }
        Ok(p)
    }

    /// Signed term bodies, highest exponents first, for embedding in other printers.
    pub(crate) fn signed_terms(&self) -> Vec<(bool, String)> {
        self.terms.iter().rev().map(|(e, c)| (c < &Q::zero(), term_body(e, &num_traits::Signed::abs(c)))).collect()
    }
}

pub(crate) fn exponent_of(dim: usize, vars: &[(usize, u32)]) -> Result<Exponent> {
    let mut e = vec![0; dim];
    for &(v, k) in vars {
        if v > dim {
            return Err(Error::Malformed(format!("variable x{v} out of range for dimension {dim}")));
        }
        e[v - 1] += k;
    }
    Ok(e)
}

fn monomial_body(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
        .collect::<Vec<_>>()
        .join("*")
}

/// `|c|·x^e` without sign.
fn term_body(e: &[u32], c: &Q) -> String {
    let mono = monomial_body(e);
    match (mono.is_empty(), c.is_one()) {
        (true, _) => fmt_q(c),
        (false, true) => mono,
        (false, false) => format!("{}*{mono}", fmt_q(c)),
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_terms(self.signed_terms()))
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Q::one());
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        self.checked_mul(rhs).expect("polynomial dimension mismatch")
    }
}

/// Exact product; errors on dimension mismatch.
pub fn poly_mul(p: &RationalPoly, q: &RationalPoly) -> Result<RationalPoly> {
    p.checked_mul(q)
}

/// `∂_i p` with 1-based `i`.
pub fn poly_partial(p: &RationalPoly, i: usize) -> Result<RationalPoly> {
    if i == 0 || i > p.dim {
        return Err(Error::Argument(format!("variable index {i} out of range 1..={}", p.dim)));
    }
    Ok(p.partial(i - 1))
}

pub fn poly_ray_integral(p: &RationalPoly, k: u32) -> RationalPoly {
    p.ray_integral(k)
}

#[derive(Serialize, Deserialize)]
struct PolyTermJson {
    exp: Vec<u32>,
    #[serde(with = "crate::rat::serde_q")]
    coeff: Q,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    terms: Vec<PolyTermJson>,
}

impl Serialize for RationalPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| PolyTermJson { exp: e.clone(), coeff: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let mut p = RationalPoly::zero(j.dim);
        for t in j.terms {
            if t.exp.len() != j.dim {
                return Err(serde::de::Error::custom("exponent length differs from dim"));
            }
            p.add_term(t.exp, t.coeff);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qf;

    fn p(dim: usize, s: &str) -> RationalPoly {
        RationalPoly::parse(dim, s).unwrap()
    }

    #[test]
    fn product_examples() {
        let a = p(2, "x1 + 3/2*x2");
        assert_eq!(&a * &RationalPoly::one(2), a);
        assert_eq!(&p(2, "x1+x2") * &p(2, "x1-x2"), p(2, "x1^2 - x2^2"));
        assert!(poly_mul(&p(2, "x1"), &p(3, "x1")).is_err());
    }

    #[test]
    fn partial_examples() {
        assert_eq!(poly_partial(&p(2, "x1^2*x2"), 1).unwrap(), p(2, "2*x1*x2"));
        assert!(poly_partial(&p(2, "x1"), 2).unwrap().is_zero());
        assert!(poly_partial(&p(2, "x1"), 3).is_err());
    }

    #[test]
    fn ray_integral_examples() {
        assert_eq!(poly_ray_integral(&RationalPoly::one(2), 0), RationalPoly::one(2));
        assert_eq!(poly_ray_integral(&p(2, "x1"), 0), p(2, "1/2*x1"));
        assert_eq!(poly_ray_integral(&p(2, "x1*x2"), 1), p(2, "1/4*x1*x2"));
    }

    #[test]
    fn text_roundtrip() {
        let a = p(3, "3/2*x1^2*x3 - x2 + 7");
        assert_eq!(a.to_string(), "3/2*x1^2*x3 - x2 + 7");
        assert_eq!(p(3, &a.to_string()), a);
        assert_eq!(RationalPoly::zero(2).to_string(), "0");
        assert_eq!(p(2, "-x1").to_string(), "-x1");
        assert!(RationalPoly::parse(2, "x3").is_err());
        assert!(RationalPoly::parse(2, "d(1)").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let a = p(3, "3/2*x1^2*x3 - x2");
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<RationalPoly>(&s).unwrap(), a);
    }

    #[test]
    fn eval_and_degree() {
        let a = p(2, "x1^2 + 1/2*x2");
        assert_eq!(a.eval(&[q(2), q(1)]), qf(9, 2));
        assert_eq!(a.total_degree(), Some(2));
        assert_eq!(RationalPoly::zero(2).total_degree(), None);
    }
}
