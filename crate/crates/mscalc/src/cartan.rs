//! Multivector fields and differential forms on ℝ^d with polynomial
//! coefficients: wedge, Schouten bracket ν, higher brackets νₙ, exterior
//! derivative, contraction and Lie derivative.
//!
//! A multivector `f·∂_{s₁}∧…∧∂_{s_k}` is stored under the bitmask of
//! `{s₁,…,s_k}`; forms likewise with `dx`. Degree-0 sections are functions.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::poly::{exponent_of, RationalPoly};
use crate::rat::{qsign, Q};
use crate::signs::{is_odd, koszul_sign_unchecked, sign_pow, unshuffles};
use crate::text::{join_terms, parse_terms, WedgeKind};

pub type Mask = u32;

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

/// 0-based indices of a mask, increasing.
pub fn indices_of(mask: Mask) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e_S ∧ e_T = ±e_{S∪T}` for disjoint `S`, `T`.
pub fn merge_sign(s: Mask, t: Mask) -> Sign32 {
    let mut inversions = 0u32;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (s >> (j + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

type Sign32 = i32;

/// Sign of the left derivative `∂e_S/∂e_i = (−1)^{#{s∈S: s<i}} e_{S∖i}`.
fn left_pos_sign(s: Mask, i: usize) -> Sign32 {
    if (s & ((1 << i) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub trait SectionKind: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    const TOKEN: &'static str;
    const WEDGE: WedgeKind;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldKind;
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormKind;

impl SectionKind for FieldKind {
    const TOKEN: &'static str = "d";
    const WEDGE: WedgeKind = WedgeKind::Field;
}

impl SectionKind for FormKind {
    const TOKEN: &'static str = "dx";
    const WEDGE: WedgeKind = WedgeKind::Form;
}

/// Degree-homogeneous section of `Λ^k T` or `Λ^k T*` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sections<K: SectionKind> {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Mask, RationalPoly>,
    _kind: PhantomData<K>,
}

pub type MultiVector = Sections<FieldKind>;
pub type Form = Sections<FormKind>;

impl<K: SectionKind> Sections<K> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Sections { dim, degree, comps: BTreeMap::new(), _kind: PhantomData }
    }

    /// `coeff · e_S` with 0-based strictly increasing `S`.
    pub fn term(dim: usize, indices: &[usize], coeff: RationalPoly) -> Self {
        let mut s = Self::zero(dim, indices.len());
        assert!(indices.windows(2).all(|w| w[0] < w[1]) && indices.iter().all(|&i| i < dim));
        s.add_term(mask_of(indices), coeff);
        s
    }

    /// A degree-0 section.
    pub fn function(f: RationalPoly) -> Self {
        Self::term(f.dim(), &[], f)
    }

    /// The constant basis element `e_S`.
    pub fn basis(dim: usize, indices: &[usize]) -> Self {
        Self::term(dim, indices, RationalPoly::one(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> &BTreeMap<Mask, RationalPoly> {
        &self.comps
    }

    pub fn coeff(&self, indices: &[usize]) -> RationalPoly {
        self.comps.get(&mask_of(indices)).cloned().unwrap_or_else(|| RationalPoly::zero(self.dim))
    }

    /// Largest total degree of a coefficient.
    pub fn coeff_degree(&self) -> Option<u32> {
        self.comps.values().filter_map(|p| p.total_degree()).max()
    }

    pub fn add_term(&mut self, mask: Mask, coeff: RationalPoly) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        if coeff.is_zero() {
            return;
        }
        match self.comps.get_mut(&mask) {
            Some(p) => {
                p.add_assign_scaled(&coeff, &Q::one());
                if p.is_zero() {
                    self.comps.remove(&mask);
                }
            }
            None => {
                self.comps.insert(mask, coeff);
            }
        }
    }

    fn add_scaled_term(&mut self, mask: Mask, coeff: &RationalPoly, c: &Q) {
        if coeff.is_zero() || c.is_zero() {
            return;
        }
        match self.comps.get_mut(&mask) {
            Some(p) => {
                p.add_assign_scaled(coeff, c);
                if p.is_zero() {
                    self.comps.remove(&mask);
                }
            }
            None => {
                self.comps.insert(mask, coeff.scale(c));
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// `self += c·other`; a zero summand of another degree is ignored.
    pub fn add_assign_scaled(&mut self, other: &Self, c: &Q) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if other.is_zero() {
            return;
        }
        if self.is_zero() && self.degree != other.degree {
            self.degree = other.degree;
        }
        assert_eq!(self.degree, other.degree, "adding sections of different degree");
        for (m, p) in &other.comps {
            self.add_scaled_term(*m, p, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Q::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (m, p) in &self.comps {
            out.add_scaled_term(*m, p, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn mul_poly(&self, f: &RationalPoly) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (m, p) in &self.comps {
            out.add_term(*m, p * f);
        }
        out
    }

    /// Exterior product; zero once the degree exceeds the dimension.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        for (ms, ps) in &self.comps {
            for (mt, pt) in &other.comps {
                if ms & mt != 0 {
                    continue;
                }
                let prod = ps * pt;
                out.add_scaled_term(ms | mt, &prod, &qsign(merge_sign(*ms, *mt)));
            }
        }
        Ok(out)
    }

    /// Coefficient-wise `∂/∂x_{i+1}`.
    pub fn partial_x(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (m, p) in &self.comps {
            out.add_term(*m, p.partial(i));
        }
        out
    }

    /// Left derivative by the odd generator `e_{i+1}`; degree drops by one.
    pub fn partial_e(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim, self.degree.saturating_sub(1));
        for (m, p) in &self.comps {
            if m & (1 << i) != 0 {
                out.add_scaled_term(m & !(1 << i), p, &qsign(left_pos_sign(*m, i)));
            }
        }
        out
    }

    /// Parses the text grammar; the degree is inferred (0 for the zero section).
    pub fn parse(dim: usize, src: &str) -> Result<Self> {
        let terms = parse_terms(src)?;
        let degree = terms.first().map(|t| t.wedge.as_ref().map_or(0, |w| w.1.len())).unwrap_or(0);
        Self::parse_terms_with_degree(dim, degree, terms, src)
    }

    pub fn parse_with_degree(dim: usize, degree: usize, src: &str) -> Result<Self> {
        Self::parse_terms_with_degree(dim, degree, parse_terms(src)?, src)
    }

    fn parse_terms_with_degree(dim: usize, degree: usize, terms: Vec<crate::text::RawTerm>, src: &str) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::Malformed(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        let mut out = Self::zero(dim, degree);
        for t in terms {
            let idx = match t.wedge {
                None => Vec::new(),
                Some((kind, idx)) if kind == K::WEDGE => idx,
                Some(_) => return Err(Error::Malformed(format!("wrong wedge token in `{src}`"))),
            };
            if idx.len() != degree {
                return Err(Error::Malformed(format!("`{src}` is not homogeneous of degree {degree}")));
            }
            if idx.iter().any(|&i| i > dim) {
                return Err(Error::Malformed(format!("index out of range in `{src}`")));
            }
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            let exp = exponent_of(dim, &t.vars)?;
            out.add_term(mask_of(&zero_based), RationalPoly::monomial(exp, t.coeff));
        }
        Ok(out)
    }

    fn wedge_token(mask: Mask) -> String {
        let idx: Vec<String> = indices_of(mask).iter().map(|i| (i + 1).to_string()).collect();
        format!("{}({})", K::TOKEN, idx.join(","))
    }
}

impl<K: SectionKind> fmt::Display for Sections<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<(Vec<usize>, Mask)> = self.comps.keys().map(|&m| (indices_of(m), m)).collect();
        keys.sort();
        let mut terms = Vec::new();
        for (_, m) in keys {
            for (neg, body) in self.comps[&m].signed_terms() {
                if m == 0 {
                    terms.push((neg, body));
                } else if body == "1" {
                    terms.push((neg, Self::wedge_token(m)));
                } else {
                    terms.push((neg, format!("{body}*{}", Self::wedge_token(m))));
                }
            }
        }
        f.write_str(&join_terms(terms))
    }
}

#[derive(Serialize, Deserialize)]
struct SectionsJson {
    dim: usize,
    degree: usize,
    text: String,
}

impl<K: SectionKind> Serialize for Sections<K> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SectionsJson { dim: self.dim, degree: self.degree, text: self.to_string() }.serialize(s)
    }
}

impl<'de, K: SectionKind> Deserialize<'de> for Sections<K> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SectionsJson::deserialize(d)?;
        Self::parse_with_degree(j.dim, j.degree, &j.text).map_err(serde::de::Error::custom)
    }
}

/// `x ∧ y` for multivectors.
pub fn wedge_mv(x: &MultiVector, y: &MultiVector) -> Result<MultiVector> {
    x.wedge(y)
}

/// `a ∧ b` for forms.
pub fn wedge_form(a: &Form, b: &Form) -> Result<Form> {
    a.wedge(b)
}

/// Wedge of a word of multivectors; the empty word is the constant 1.
pub fn wedge_all(dim: usize, word: &[MultiVector]) -> Result<MultiVector> {
    let mut acc = MultiVector::function(RationalPoly::one(dim));
    for x in word {
        acc = acc.wedge(x)?;
    }
    Ok(acc)
}

fn degrees(word: &[MultiVector]) -> Vec<i64> {
    word.iter().map(|x| x.degree() as i64).collect()
}

fn common_dim(word: &[MultiVector]) -> Result<usize> {
    let Some(first) = word.first() else { return arg("empty word") };
    for x in word {
        if x.dim() != first.dim() {
            return Err(Error::DimMismatch(first.dim(), x.dim()));
        }
    }
    Ok(first.dim())
}

/// Schouten bracket `ν(a,b)`, the graded-symmetric degree −1 bracket with
/// `ν(X,Y) = [X,Y]`, `ν(X,f) = ν(f,X) = X(f)` and the Leibniz rule in the
/// second slot. Unfolding that recursion on `a = f∂_S`, `b = g∂_T` gives
/// `ν(a,b) = Σᵢ ∂a/∂θᵢ ∧ ∂b/∂xᵢ + (−1)^{|a|} ∂a/∂xᵢ ∧ ∂b/∂θᵢ`
/// with left θ-derivatives.
pub fn schouten(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    a.check(b)?;
    let deg = (a.degree() + b.degree()).checked_sub(1);
    let mut out = MultiVector::zero(a.dim(), deg.unwrap_or(0));
    if a.degree() + b.degree() == 0 {
        return Ok(out);
    }
    let sa = qsign(sign_pow(a.degree() as i64));
    for i in 0..a.dim() {
        let at = a.partial_e(i);
        if !at.is_zero() {
            let bx = b.partial_x(i);
            if !bx.is_zero() {
                out.add_assign_scaled(&at.wedge(&bx)?, &Q::one());
            }
        }
        let bt = b.partial_e(i);
        if !bt.is_zero() {
            let ax = a.partial_x(i);
            if !ax.is_zero() {
                out.add_assign_scaled(&ax.wedge(&bt)?, &sa);
            }
        }
    }
    Ok(out)
}

/// Lie bracket of vector fields `[X,Y] = X(Y) − Y(X)`.
pub fn lie_bracket(x: &MultiVector, y: &MultiVector) -> Result<MultiVector> {
    if x.degree() != 1 || y.degree() != 1 {
        return arg("Lie bracket needs vector fields");
    }
    x.check(y)?;
    let apply = |v: &MultiVector, w: &MultiVector| {
        let mut out = MultiVector::zero(v.dim(), 1);
        for (mv, pv) in v.comps() {
            let i = mv.trailing_zeros() as usize;
            out.add_assign_scaled(&w.partial_x(i).mul_poly(pv), &Q::one());
        }
        out
    };
    Ok(apply(x, y).sub(&apply(y, x)))
}

/// `X(f)` for a vector field and a function.
pub fn apply_field(x: &MultiVector, f: &RationalPoly) -> RationalPoly {
    let mut out = RationalPoly::zero(f.dim());
    for (m, p) in x.comps() {
        let i = m.trailing_zeros() as usize;
        out.add_assign_scaled(&(p * &f.partial(i)), &Q::one());
    }
    out
}

/// The explicit Schouten formula on decomposable inputs `x = x₁⋯x_k`,
/// `y = y₁⋯y_l` of vector fields (an empty factor list with a function is
/// allowed on either side):
/// `ν(x,y) = (−1)^{k+1} Σ_{i,j} (−1)^{i+j} [x_i,y_j] x₁⋯x̂ᵢ⋯x_k y₁⋯ŷⱼ⋯y_l`,
/// with `ν(x, f) = Σᵢ (−1)^{i−1} x_i(f) x₁⋯x̂ᵢ⋯x_k` and symmetry for `ν(f, y)`.
pub fn schouten_explicit(xs: &[MultiVector], ys: &[MultiVector]) -> Result<MultiVector> {
    let dim = common_dim(&[xs, ys].concat())?;
    if xs.iter().chain(ys).any(|v| v.degree() != 1) {
        return arg("explicit Schouten formula takes vector-field factors");
    }
    let (k, l) = (xs.len(), ys.len());
    let mut out = MultiVector::zero(dim, (k + l).saturating_sub(1));
    for i in 0..k {
        for j in 0..l {
            let mut word = vec![lie_bracket(&xs[i], &ys[j])?];
            word.extend(xs.iter().enumerate().filter(|(a, _)| *a != i).map(|(_, v)| v.clone()));
            word.extend(ys.iter().enumerate().filter(|(b, _)| *b != j).map(|(_, v)| v.clone()));
            let s = sign_pow((k + 1 + i + j) as i64);
            out.add_assign_scaled(&wedge_all(dim, &word)?, &qsign(s));
        }
    }
    Ok(out)
}

/// `ν(x₁⋯x_k, f)` by the explicit formula.
pub fn schouten_explicit_function(xs: &[MultiVector], f: &RationalPoly) -> Result<MultiVector> {
    let k = xs.len();
    let mut out = MultiVector::zero(f.dim(), k.saturating_sub(1));
    for i in 0..k {
        let rest: Vec<MultiVector> = xs.iter().enumerate().filter(|(a, _)| *a != i).map(|(_, v)| v.clone()).collect();
        let w = wedge_all(f.dim(), &rest)?.mul_poly(&apply_field(&xs[i], f));
        out.add_assign_scaled(&w, &qsign(sign_pow(i as i64)));
    }
    Ok(out)
}

/// `νₙ(x₁,…,xₙ) = Σ_{σ ∈ 𝒮h(2,n−2)} ε(σ) ν(x_{σ1}, x_{σ2}) ∧ x_{σ3} ∧ ⋯ ∧ x_{σn}`;
/// `ν₁ = 0`, `ν₂ = ν`.
pub fn nu_n(word: &[MultiVector]) -> Result<MultiVector> {
    let dim = common_dim(word)?;
    let n = word.len();
    let total: usize = word.iter().map(|x| x.degree()).sum();
    let mut out = MultiVector::zero(dim, total.saturating_sub(1));
    if n < 2 {
        return Ok(out);
    }
    let degs = degrees(word);
    for sigma in unshuffles(&[2, n - 2]) {
        let w = sigma.permute(word);
        let mut acc = schouten(&w[0], &w[1])?;
        if acc.is_zero() {
            continue;
        }
        for x in &w[2..] {
            acc = acc.wedge(x)?;
        }
        out.add_assign_scaled(&acc, &qsign(koszul_sign_unchecked(sigma.as_slice(), &degs)));
    }
    Ok(out)
}

/// `Σ_{σ ∈ 𝒮h(i,n−i)} ε(σ) F(x_{σ(1..i)}, x_{σ(i+1..n)})`.
pub(crate) fn unshuffle_sum<T>(
    word: &[T],
    degs: &[i64],
    i: usize,
    mut f: impl FnMut(&[T], &[T]) -> Result<Option<(MultiVectorOrForm, Q)>>,
    acc: &mut MultiVectorOrForm,
) -> Result<()>
where
    T: Clone,
{
    let n = word.len();
    for sigma in unshuffles(&[i, n - i]) {
        let w = sigma.permute(word);
        if let Some((val, c)) = f(&w[..i], &w[i..])? {
            let s = qsign(koszul_sign_unchecked(sigma.as_slice(), degs));
            acc.add_assign_scaled(&val, &(c * s));
        }
    }
    Ok(())
}

/// Either kind of section, for shared summation helpers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiVectorOrForm {
    Field(MultiVector),
    Form(Form),
}

impl MultiVectorOrForm {
    fn add_assign_scaled(&mut self, other: &MultiVectorOrForm, c: &Q) {
        match (self, other) {
            (MultiVectorOrForm::Field(a), MultiVectorOrForm::Field(b)) => a.add_assign_scaled(b, c),
            (MultiVectorOrForm::Form(a), MultiVectorOrForm::Form(b)) => a.add_assign_scaled(b, c),
            _ => panic!("mixing fields and forms"),
        }
    }
}

/// `J(n)(x) = Σ_{i+j=n+1} (ν_j ⨼ ν_i)(x)`; zero by the L∞ theorem.
pub fn jacobi_defect(word: &[MultiVector], n: usize) -> Result<MultiVector> {
    if word.len() != n {
        return arg(format!("word of length {} for J({n})", word.len()));
    }
    let dim = common_dim(word)?;
    let total: usize = word.iter().map(|x| x.degree()).sum();
    let mut acc = MultiVectorOrForm::Field(MultiVector::zero(dim, total.saturating_sub(2)));
    let degs = degrees(word);
    for i in 2..n {
        unshuffle_sum(word, &degs, i, |inner, rest| {
            let v = nu_n(inner)?;
            if v.is_zero() {
                return Ok(None);
            }
            let mut w = vec![v];
            w.extend_from_slice(rest);
            Ok(Some((MultiVectorOrForm::Field(nu_n(&w)?), Q::one())))
        }, &mut acc)?;
    }
    match acc {
        MultiVectorOrForm::Field(v) => Ok(v),
        MultiVectorOrForm::Form(_) => unreachable!(),
    }
}

/// Exterior derivative.
pub fn exterior_d(a: &Form) -> Form {
    let mut out = Form::zero(a.dim(), a.degree() + 1);
    for (m, p) in a.comps() {
        for i in 0..a.dim() {
            if m & (1 << i) != 0 {
                continue;
            }
            let dp = p.partial(i);
            out.add_scaled_term(m | (1 << i), &dp, &qsign(merge_sign(1 << i, *m)));
        }
    }
    out
}

/// `ι_{∂_S} dx_T` with `ι_{∂_S} = ι_{∂s₁}∘⋯∘ι_{∂s_k}` (last index applied first).
fn contract_basis(s: Mask, t: Mask) -> Option<(Mask, Sign32)> {
    if s & !t != 0 {
        return None;
    }
    let mut cur = t;
    let mut sign = 1;
    for i in indices_of(s).into_iter().rev() {
        sign *= left_pos_sign(cur, i);
        cur &= !(1 << i);
    }
    Some((cur, sign))
}

/// Contraction `ι_x a` with `ι_{x₁⋯xₙ}α = α(xₙ,…,x₁,−)`.
pub fn contract(x: &MultiVector, a: &Form) -> Result<Form> {
    if x.dim() != a.dim() {
        return Err(Error::DimMismatch(x.dim(), a.dim()));
    }
    let Some(deg) = a.degree().checked_sub(x.degree()) else {
        return Ok(Form::zero(a.dim(), 0));
    };
    let mut out = Form::zero(a.dim(), deg);
    for (ms, ps) in x.comps() {
        for (mt, pt) in a.comps() {
            if let Some((m, s)) = contract_basis(*ms, *mt) {
                out.add_scaled_term(m, &(ps * pt), &qsign(s));
            }
        }
    }
    Ok(out)
}

/// `ℒ_x = [d, ι_x] = d ι_x − (−1)^{|x|} ι_x d`.
pub fn lie_derivative(x: &MultiVector, a: &Form) -> Result<Form> {
    let first = exterior_d(&contract(x, a)?);
    let second = contract(x, &exterior_d(a))?;
    Ok(combine(&first, &second, -sign_pow(x.degree() as i64)))
}

/// `a + s·b`, tolerating zero forms whose nominal degree differs.
fn combine(a: &Form, b: &Form, s: Sign32) -> Form {
    let mut out = a.clone();
    out.add_assign_scaled(b, &qsign(s));
    out
}

/// The five Cartan-calculus defects on `probe`:
/// `[ι_x,ι_y]`, `[d,ℒ_x]`, `[ℒ_x,ι_y] − ι_{ν(x,y)}`,
/// `[ℒ_x,ℒ_y] − (−1)^{|x|+1}ℒ_{ν(x,y)}`, `ℒ_{xy} − ℒ_xι_y − (−1)^{|x|}ι_xℒ_y`.
pub fn cartan_defects(x: &MultiVector, y: &MultiVector, probe: &Form) -> Result<[Form; 5]> {
    let (p, r) = (x.degree() as i64, y.degree() as i64);
    let iota = |v: &MultiVector, a: &Form| contract(v, a);
    let lie = |v: &MultiVector, a: &Form| lie_derivative(v, a);
    let nxy = schouten(x, y)?;

    let d1 = combine(&iota(x, &iota(y, probe)?)?, &iota(y, &iota(x, probe)?)?, -sign_pow(p * r));

    let d2 = combine(&exterior_d(&lie(x, probe)?), &lie(x, &exterior_d(probe))?, -sign_pow(1 - p));

    let c3 = combine(&lie(x, &iota(y, probe)?)?, &iota(y, &lie(x, probe)?)?, -sign_pow((1 - p) * (-r)));
    let d3 = combine(&c3, &iota(&nxy, probe)?, -1);

    let c4 = combine(&lie(x, &lie(y, probe)?)?, &lie(y, &lie(x, probe)?)?, -sign_pow((1 - p) * (1 - r)));
    let d4 = combine(&c4, &lie(&nxy, probe)?, -sign_pow(p + 1));

    let l_xy = lie(&x.wedge(y)?, probe)?;
    let t1 = lie(x, &iota(y, probe)?)?;
    let t2 = iota(x, &lie(y, probe)?)?;
    let d5 = combine(&combine(&l_xy, &t1, -1), &t2, -sign_pow(p));

    Ok([d1, d2, d3, d4, d5])
}

/// Defect of `ℒ_x − ι_{νₙ(x)} = (−1)^{|x|} Σ_{σ∈𝒮h(n−1,1)} ε(σ)(−1)^{|x_{σ(n)}|} ι_{x_{σ(1..n−1)}} ℒ_{x_{σ(n)}}`.
pub fn fr_defect(word: &[MultiVector], probe: &Form) -> Result<Form> {
    let dim = common_dim(word)?;
    let n = word.len();
    let x = wedge_all(dim, word)?;
    let total = x.degree() as i64;
    let mut acc = combine(&lie_derivative(&x, probe)?, &contract(&nu_n(word)?, probe)?, -1);
    if n == 1 {
        return Ok(combine(&acc, &lie_derivative(&word[0], probe)?, -1));
    }
    let degs = degrees(word);
    for sigma in unshuffles(&[n - 1, 1]) {
        let w = sigma.permute(word);
        let last = &w[n - 1];
        let head = wedge_all(dim, &w[..n - 1])?;
        let term = contract(&head, &lie_derivative(last, probe)?)?;
        let s = sign_pow(total) * koszul_sign_unchecked(sigma.as_slice(), &degs) * sign_pow(last.degree() as i64);
        acc.add_assign_scaled(&term, &qsign(-s));
    }
    Ok(acc)
}

/// Generalized Leibniz expansion `(μ^{n−1} ⨼ ν(x₁,−))(x₂,…,xₙ)`.
pub fn leibniz_expansion(word: &[MultiVector]) -> Result<MultiVector> {
    let dim = common_dim(word)?;
    let (x1, rest) = word.split_first().expect("nonempty");
    let total: usize = word.iter().map(|x| x.degree()).sum();
    let mut out = MultiVector::zero(dim, total.saturating_sub(1));
    let m = rest.len();
    if m == 0 {
        return Ok(out);
    }
    let degs = degrees(rest);
    for sigma in unshuffles(&[1, m - 1]) {
        let w = sigma.permute(rest);
        let mut acc = schouten(x1, &w[0])?;
        for v in &w[1..] {
            acc = acc.wedge(v)?;
        }
        out.add_assign_scaled(&acc, &qsign(koszul_sign_unchecked(sigma.as_slice(), &degs)));
    }
    Ok(out)
}

/// `Σ_{i=2}^{n} Σ_{σ∈𝒮h(i,n−i)} ε(σ) νᵢ(x_{σ(1..i)}) ∧ x_{σ(i+1)} ∧ ⋯`,
/// the product-extended codifferential; equals `2^{n−2} νₙ`.
pub fn coalgebra_sum(word: &[MultiVector]) -> Result<MultiVector> {
    let dim = common_dim(word)?;
    let n = word.len();
    let total: usize = word.iter().map(|x| x.degree()).sum();
    let mut acc = MultiVectorOrForm::Field(MultiVector::zero(dim, total.saturating_sub(1)));
    let degs = degrees(word);
    for i in 2..=n {
        unshuffle_sum(word, &degs, i, |inner, rest| {
            let mut v = nu_n(inner)?;
            for r in rest {
                v = v.wedge(r)?;
            }
            Ok(Some((MultiVectorOrForm::Field(v), Q::one())))
        }, &mut acc)?;
    }
    match acc {
        MultiVectorOrForm::Field(v) => Ok(v),
        MultiVectorOrForm::Form(_) => unreachable!(),
    }
}

/// Whether `νₙ` is graded symmetric on this word under `σ`.
pub fn nu_n_is_symmetric_under(word: &[MultiVector], sigma: &crate::signs::Permutation) -> Result<bool> {
    let lhs = nu_n(&sigma.permute(word))?;
    let rhs = nu_n(word)?.scale(&qsign(koszul_sign_unchecked(sigma.as_slice(), &degrees(word))));
    Ok(lhs == rhs)
}

/// Odd-odd parity of two degrees.
pub fn odd_pair(a: usize, b: usize) -> bool {
    is_odd(a as i64) && is_odd(b as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    fn mv(dim: usize, s: &str) -> MultiVector {
        MultiVector::parse(dim, s).unwrap()
    }

    fn form(dim: usize, s: &str) -> Form {
        Form::parse(dim, s).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_mv(&mv(2, "d(1)"), &mv(2, "d(2)")).unwrap(), mv(2, "d(1,2)"));
        assert_eq!(wedge_mv(&mv(2, "d(2)"), &mv(2, "d(1)")).unwrap(), mv(2, "-d(1,2)"));
        let f = mv(2, "x1*d(1) + x2*d(1)");
        assert!(f.wedge(&f).unwrap().is_zero());
        assert_eq!(mv(3, "x1*d(1)").wedge(&mv(3, "d(2,3)")).unwrap(), mv(3, "x1*d(1,2,3)"));
        assert!(wedge_form(&form(2, "dx(1)"), &form(3, "dx(1)")).is_err());
    }

    #[test]
    fn schouten_examples() {
        assert!(schouten(&mv(3, "d(1)"), &mv(3, "d(2)")).unwrap().is_zero());
        assert_eq!(schouten(&mv(2, "x1*d(2)"), &mv(2, "d(1)")).unwrap(), mv(2, "-d(2)"));
        assert_eq!(schouten(&mv(2, "d(1)"), &mv(2, "x1")).unwrap(), mv(2, "1"));
        assert_eq!(schouten(&mv(2, "x1"), &mv(2, "d(1)")).unwrap(), mv(2, "1"));
        assert_eq!(schouten(&mv(2, "d(1,2)"), &mv(2, "x1")).unwrap(), mv(2, "d(2)"));
    }

    #[test]
    fn schouten_agrees_with_lie_bracket() {
        let x = mv(3, "x2*x3*d(1) - x1^2*d(3)");
        let y = mv(3, "x3*d(2) + 1/2*x1*d(1)");
        assert_eq!(schouten(&x, &y).unwrap(), lie_bracket(&x, &y).unwrap());
    }

    #[test]
    fn explicit_backend_examples() {
        let xs = [mv(3, "x2*d(1)"), mv(3, "d(2) + x1*d(3)")];
        let ys = [mv(3, "x3*d(3)")];
        let x = wedge_all(3, &xs).unwrap();
        let y = wedge_all(3, &ys).unwrap();
        assert_eq!(schouten(&x, &y).unwrap(), schouten_explicit(&xs, &ys).unwrap());
        let f = RationalPoly::parse(3, "x1*x2 + x3^2").unwrap();
        assert_eq!(
            schouten(&x, &MultiVector::function(f.clone())).unwrap(),
            schouten_explicit_function(&xs, &f).unwrap()
        );
    }

    #[test]
    fn nu_n_low_arity() {
        let x = mv(3, "x2*d(1)");
        let y = mv(3, "x1*d(2,3)");
        assert!(nu_n(std::slice::from_ref(&x)).unwrap().is_zero());
        assert_eq!(nu_n(&[x.clone(), y.clone()]).unwrap(), schouten(&x, &y).unwrap());
    }

    #[test]
    fn exterior_d_examples() {
        assert_eq!(exterior_d(&form(2, "x1*dx(2)")), form(2, "dx(1,2)"));
        assert!(exterior_d(&form(2, "dx(1,2)")).is_zero());
        assert_eq!(exterior_d(&form(3, "x2*dx(3)")), form(3, "dx(2,3)"));
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(contract(&mv(2, "d(1)"), &form(2, "dx(1)")).unwrap(), form(2, "1"));
        assert_eq!(contract(&mv(2, "d(1,2)"), &form(2, "dx(1,2)")).unwrap(), form(2, "-1"));
        assert_eq!(contract(&mv(3, "d(1)"), &form(3, "dx(1,2,3)")).unwrap(), form(3, "dx(2,3)"));
    }

    #[test]
    fn lie_derivative_examples() {
        assert_eq!(lie_derivative(&mv(2, "d(1)"), &form(2, "x1*dx(2)")).unwrap(), form(2, "dx(2)"));
        assert!(lie_derivative(&mv(2, "d(1)"), &form(2, "dx(1,2)")).unwrap().is_zero());
        assert_eq!(lie_derivative(&mv(2, "d(1)"), &form(2, "x1^2")).unwrap(), form(2, "2*x1"));
    }

    #[test]
    fn cartan_defects_bivector_vector() {
        let x = mv(3, "x3*d(1,2) + x1*x2*d(2,3)");
        let y = mv(3, "x2^2*d(1) - d(3)");
        let probe = form(3, "x1*dx(1,2) + x3*x2*dx(2,3)");
        for (k, d) in cartan_defects(&x, &y, &probe).unwrap().iter().enumerate() {
            assert!(d.is_zero(), "defect {} = {d}", k + 1);
        }
    }

    #[test]
    fn text_and_json_roundtrip() {
        let x = mv(3, "x1*d(2,3) + 1/2*d(1,3) - x2^2*d(1,2)");
        assert_eq!(mv(3, &x.to_string()), x);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<MultiVector>(&s).unwrap(), x);
        assert!(MultiVector::parse(3, "d(1) + d(1,2)").is_err());
        assert!(MultiVector::parse(3, "dx(1)").is_err());
        assert_eq!(Form::zero(3, 2).to_string(), "0");
        assert_eq!(form(2, "3*x1").scale(&q(0)), Form::zero(2, 0));
    }
}
