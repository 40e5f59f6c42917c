//! Pre-m-symplectic structures on ℝ^d: hamiltonian fields and forms, the
//! Poincaré primitive, the naive bracket on hamiltonian pairs, and the
//! bicomplex L∞-algebras Ξ(M) and Ξ̃(M).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::{contract, exterior_d, mask_of, nu_n, schouten, wedge_all, Form, Mask, MultiVector, SectionKind, Sections};
use crate::error::{arg, Error, Result};
use crate::linalg::{rref, solve, solve_many, Matrix};
use crate::linfty::{jacobi_on, LInfty, WordMap};
use crate::poly::{Exponent, RationalPoly};
use crate::random::{random_sections, Rng64};
use crate::rat::{q, Q};
use crate::signs::{for_each_combination, sign_pow};

/// `(ℝ^d, ω)` with `ω` a closed `(m+1)`-form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreMS {
    pub dim: usize,
    pub m: usize,
    pub omega: Form,
}

impl PreMS {
    pub fn new(dim: usize, m: usize, omega: Form) -> Result<Self> {
        if omega.dim() != dim {
            return Err(Error::DimMismatch(dim, omega.dim()));
        }
        if m == 0 || omega.degree() != m + 1 {
            return arg(format!("ω must be an (m+1)-form with m ≥ 1, got degree {}", omega.degree()));
        }
        if !exterior_d(&omega).is_zero() {
            return arg("ω is not closed");
        }
        Ok(PreMS { dim, m, omega })
    }

    /// The volume form `dx₁∧⋯∧dx_d`, plectic degree `d−1`.
    pub fn volume(dim: usize) -> Self {
        let idx: Vec<usize> = (0..dim).collect();
        PreMS::new(dim, dim - 1, Form::basis(dim, &idx)).expect("volume form is closed")
    }

    pub fn parse(dim: usize, m: usize, omega: &str) -> Result<Self> {
        Self::new(dim, m, Form::parse_with_degree(dim, m + 1, omega)?)
    }

    pub fn is_constant(&self) -> bool {
        self.omega.coeff_degree().unwrap_or(0) == 0
    }

    /// Rank test of `v ↦ ι_vω(point)`.
    pub fn nondegenerate_at(&self, point: &[Q]) -> bool {
        let mut rows: BTreeMap<Mask, Vec<Q>> = BTreeMap::new();
        for i in 0..self.dim {
            let c = contract(&MultiVector::basis(self.dim, &[i]), &self.omega).expect("same dimension");
            for (mask, p) in c.comps() {
                rows.entry(*mask).or_insert_with(|| vec![Q::zero(); self.dim])[i] = p.eval(point);
            }
        }
        let mut m = Matrix::zeros(rows.len(), self.dim);
        m.data = rows.into_values().collect();
        rref(&mut m).len() == self.dim
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim {
            return Err(Error::DimMismatch(self.dim, d));
        }
        Ok(())
    }
}

/// A hamiltonian pair `(x, α)` with `ι_xω = dα`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamPair {
    pub field: MultiVector,
    pub primitive: Form,
}

impl HamPair {
    pub fn new(ms: &PreMS, field: MultiVector, primitive: Form) -> Result<Self> {
        ms.check_dim(field.dim())?;
        ms.check_dim(primitive.dim())?;
        if field.degree() + primitive.degree() != ms.m {
            return arg("field and primitive degrees must add up to m");
        }
        if exterior_d(&primitive) != omega_tilde(ms, &field)? {
            return arg("ι_xω ≠ dα");
        }
        Ok(HamPair { field, primitive })
    }

    /// Pair with the Poincaré-canonical field for `dα`.
    pub fn from_primitive(ms: &PreMS, primitive: Form) -> Result<Self> {
        match hamiltonian_field(ms, &exterior_d(&primitive))? {
            Some(field) => Ok(HamPair { field, primitive }),
            None => Err(Error::Hypothesis("form is not hamiltonian".into())),
        }
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }
}

/// `ω̃(x) = ι_xω`.
pub fn omega_tilde(ms: &PreMS, x: &MultiVector) -> Result<Form> {
    ms.check_dim(x.dim())?;
    contract(x, &ms.omega)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldClass {
    pub symplectic: bool,
    pub hamiltonian: bool,
    /// `None` when `ι_xω` is a function or vanishes by degree (no (−1)-forms exist).
    pub primitive: Option<Form>,
}

/// On ℝ^d closed forms are exact, so symplectic fields are hamiltonian except
/// when `ι_xω` is a nonzero function.
pub fn classify_field(ms: &PreMS, x: &MultiVector) -> Result<FieldClass> {
    let c = omega_tilde(ms, x)?;
    let symplectic = exterior_d(&c).is_zero();
    if !symplectic {
        return Ok(FieldClass { symplectic, hamiltonian: false, primitive: None });
    }
    if x.degree() > ms.m {
        return Ok(FieldClass { symplectic, hamiltonian: c.is_zero(), primitive: None });
    }
    Ok(FieldClass { symplectic, hamiltonian: true, primitive: Some(poincare_primitive(&c)?) })
}

/// Homotopy-operator primitive of a closed form of positive degree:
/// for `β = g·dx_T`, `α = Σ_a (−1)^{a−1} x_{t_a}·∫₀¹t^{p−1}g(tx)dt·dx_{T∖t_a}`.
pub fn poincare_primitive(beta: &Form) -> Result<Form> {
    let p = beta.degree();
    if p == 0 {
        return arg("a primitive needs a form of positive degree");
    }
    if !exterior_d(beta).is_zero() {
        return arg("form is not closed");
    }
    let dim = beta.dim();
    let mut alpha = Form::zero(dim, p - 1);
    for (mask, g) in beta.comps() {
        let t: Vec<usize> = crate::cartan::indices_of(*mask);
        let gi = g.ray_integral(p as u32 - 1);
        for (a, &ta) in t.iter().enumerate() {
            let rest: Vec<usize> = t.iter().copied().filter(|&i| i != ta).collect();
            let coeff = gi.mul_var(ta).scale(&q(sign_pow(a as i64) as i64));
            alpha.add_term(mask_of(&rest), coeff);
        }
    }
    if exterior_d(&alpha) != *beta {
        return Err(Error::Hypothesis("primitive check failed".into()));
    }
    Ok(alpha)
}

fn subsets(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_combination(dim, k, &mut |c| out.push(c.to_vec()));
    out
}

/// Exponents of total degree `≤ max` in `dim` variables.
fn exponents_upto(dim: usize, max: u32) -> Vec<Exponent> {
    fn rec(dim: usize, left: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max, &mut Vec::new(), &mut out);
    out
}

/// Coefficients of a section keyed by `(index set, monomial)`.
pub fn flatten<K: SectionKind>(f: &Sections<K>) -> BTreeMap<(Mask, Exponent), Q> {
    f.comps()
        .iter()
        .flat_map(|(m, p)| p.terms().map(move |(e, c)| ((*m, e.clone()), c.clone())))
        .collect()
}

/// A field `x` with `ι_xω = β` and free coefficients set to zero; `None` if
/// none exists. Constant `ω` is solved monomial by monomial; otherwise the
/// search is over fields with coefficient degree at most that of `β`.
pub fn hamiltonian_field(ms: &PreMS, beta: &Form) -> Result<Option<MultiVector>> {
    ms.check_dim(beta.dim())?;
    let p = beta.degree();
    if p > ms.m + 1 {
        return Ok(None);
    }
    let k = ms.m + 1 - p;
    let dim = ms.dim;
    if beta.is_zero() {
        return Ok(Some(MultiVector::zero(dim, k)));
    }
    let sets = subsets(dim, k);
    let images: Vec<Form> = sets.iter().map(|s| contract(&MultiVector::basis(dim, s), &ms.omega)).collect::<Result<_>>()?;
    let mut x = MultiVector::zero(dim, k);
    if ms.is_constant() {
        let rows = subsets(dim, p);
        let mut a = Matrix::zeros(rows.len(), sets.len());
        for (j, img) in images.iter().enumerate() {
            for (i, t) in rows.iter().enumerate() {
                a.data[i][j] = img.coeff(t).constant_term();
            }
        }
        let mut rhs: BTreeMap<Exponent, Vec<Q>> = BTreeMap::new();
        for (i, t) in rows.iter().enumerate() {
            for (e, c) in beta.coeff(t).terms() {
                rhs.entry(e.clone()).or_insert_with(|| vec![Q::zero(); rows.len()])[i] = c.clone();
            }
        }
        let exps: Vec<Exponent> = rhs.keys().cloned().collect();
        let bs: Vec<Vec<Q>> = rhs.into_values().collect();
        let Some(sols) = solve_many(&a, &bs) else { return Ok(None) };
        for (e, sol) in exps.iter().zip(sols) {
            for (s, c) in sets.iter().zip(sol) {
                if !c.is_zero() {
                    x.add_term(mask_of(s), RationalPoly::monomial(e.clone(), c));
                }
            }
        }
        return Ok(Some(x));
    }
    let exps = exponents_upto(dim, beta.coeff_degree().unwrap_or(0));
    let mut cols = Vec::new();
    let mut row_index: BTreeMap<(Mask, Exponent), usize> = BTreeMap::new();
    for (s, img) in sets.iter().zip(&images) {
        for e in &exps {
            let col = flatten(&img.mul_poly(&RationalPoly::monomial(e.clone(), Q::one())));
            for key in col.keys() {
                let n = row_index.len();
                row_index.entry(key.clone()).or_insert(n);
            }
            cols.push((s, e, col));
        }
    }
    let target = flatten(beta);
    for key in target.keys() {
        let n = row_index.len();
        row_index.entry(key.clone()).or_insert(n);
    }
    let mut a = Matrix::zeros(row_index.len(), cols.len());
    for (j, (_, _, col)) in cols.iter().enumerate() {
        for (key, c) in col {
            a.data[row_index[key]][j] = c.clone();
        }
    }
    let mut b = vec![Q::zero(); row_index.len()];
    for (key, c) in &target {
        b[row_index[key]] = c.clone();
    }
    let Some(sol) = solve(&a, &b) else { return Ok(None) };
    for ((s, e, _), c) in cols.iter().zip(sol) {
        if !c.is_zero() {
            x.add_term(mask_of(s), RationalPoly::monomial((*e).clone(), c));
        }
    }
    Ok(Some(x))
}

/// `d ι_{x₁⋯xₙ}ω − ι_{νₙ(x)}ω` for a word of symplectic fields.
pub fn cochain_check_omega_tilde(ms: &PreMS, word: &[MultiVector]) -> Result<Form> {
    if word.is_empty() {
        return arg("empty word");
    }
    for (i, x) in word.iter().enumerate() {
        if !classify_field(ms, x)?.symplectic {
            return arg(format!("factor {} is not symplectic", i + 1));
        }
    }
    let lhs = exterior_d(&omega_tilde(ms, &wedge_all(ms.dim, word)?)?);
    let rhs = omega_tilde(ms, &nu_n(word)?)?;
    let mut out = lhs;
    out.add_assign_scaled(&rhs, &-Q::one());
    Ok(out)
}

/// `ι_{x₁⋯xₙ}ω` for `n ≥ 2`, `−dα₁` for `n = 1`, on all degrees.
pub fn naive_bracket(ms: &PreMS, pairs: &[HamPair]) -> Result<Form> {
    match pairs {
        [] => arg("empty bracket"),
        [p] => Ok(exterior_d(&p.primitive).neg()),
        _ => {
            let fields: Vec<MultiVector> = pairs.iter().map(|p| p.field.clone()).collect();
            omega_tilde(ms, &wedge_all(ms.dim, &fields)?)
        }
    }
}

/// Hamiltonian pairs graded by field degree with the naive brackets; `l₁(α) = (0, −dα)`
/// and `lₙ(α) = (νₙ(x), ι_xω)`. Fails the Jacobi identities.
pub struct NaiveAlgebra<'a> {
    pub ms: &'a PreMS,
}

impl LInfty for NaiveAlgebra<'_> {
    type Elem = HamPair;

    fn degree(&self, e: &HamPair) -> i64 {
        e.degree() as i64
    }

    fn bracket(&self, args: &[HamPair]) -> Result<Option<HamPair>> {
        let total: usize = args.iter().map(HamPair::degree).sum();
        if total < 2 || total - 1 > self.ms.m {
            return Ok(None);
        }
        let primitive = naive_bracket(self.ms, args)?;
        let field = if args.len() == 1 {
            MultiVector::zero(self.ms.dim, total - 1)
        } else {
            let fields: Vec<MultiVector> = args.iter().map(|p| p.field.clone()).collect();
            nu_n(&fields)?
        };
        Ok((!primitive.is_zero()).then_some(HamPair { field, primitive }))
    }

    fn accumulate(&self, acc: &mut Option<HamPair>, e: &HamPair, c: &Q) -> Result<()> {
        match acc {
            None => *acc = Some(HamPair { field: e.field.scale(c), primitive: e.primitive.scale(c) }),
            Some(a) => {
                a.field.add_assign_scaled(&e.field, c);
                a.primitive.add_assign_scaled(&e.primitive, c);
            }
        }
        Ok(())
    }

    fn is_zero(&self, e: &HamPair) -> bool {
        e.primitive.is_zero()
    }
}

/// The naive `J(2)(α₁,α₂)` as a form (zero when it vanishes).
pub fn naive_j2(ms: &PreMS, a: &HamPair, b: &HamPair) -> Result<Form> {
    let alg = NaiveAlgebra { ms };
    Ok(jacobi_on(&alg, &[a.clone(), b.clone()])?.map_or_else(|| Form::zero(ms.dim, 0), |p| p.primitive))
}

/// Small hamiltonian fields `∂_S` and `x_j∂_S` for `|S| = 1, 2`, vector fields first.
pub fn small_hamiltonian_pairs(ms: &PreMS) -> Result<Vec<HamPair>> {
    let mut out = Vec::new();
    for k in 1..=2.min(ms.m) {
        for s in subsets(ms.dim, k) {
            let mut coeffs = vec![RationalPoly::one(ms.dim)];
            coeffs.extend((0..ms.dim).map(|j| RationalPoly::var(ms.dim, j)));
            for c in coeffs {
                let x = MultiVector::term(ms.dim, &s, c);
                let cls = classify_field(ms, &x)?;
                if let (true, Some(primitive)) = (cls.hamiltonian, cls.primitive) {
                    out.push(HamPair { field: x, primitive });
                }
            }
        }
    }
    Ok(out)
}

/// First pair of small hamiltonian pairs with nonzero naive `J(2)`.
pub fn naive_jacobi_witness(ms: &PreMS) -> Result<Option<(HamPair, HamPair, Form)>> {
    let pairs = small_hamiltonian_pairs(ms)?;
    for i in 0..pairs.len() {
        for j in i..pairs.len() {
            let d = naive_j2(ms, &pairs[i], &pairs[j])?;
            if !d.is_zero() {
                return Ok(Some((pairs[i].clone(), pairs[j].clone(), d)));
            }
        }
    }
    Ok(None)
}

/// Element of `Ξ` or `Ξ̃` at bidegree `(i, j)`. At `i = 1` the field is a
/// hamiltonian witness for `Ξ` (optional, recomputed when absent) and part of
/// the data for `Ξ̃`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiElement {
    #[serde(rename = "i")]
    pub hdeg: usize,
    #[serde(rename = "j")]
    pub vdeg: usize,
    pub form: Form,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<MultiVector>,
}

impl XiElement {
    pub fn total_degree(&self) -> i64 {
        (self.hdeg + self.vdeg) as i64
    }
}

/// Whether `(i, j)` lies in the truncation window of `Ξ` for plectic degree `m`.
pub fn in_window(m: usize, i: usize, j: usize) -> bool {
    i >= 1 && i <= m && j + i <= m
}

/// `Ξ(M)` (`pairs = false`) or `Ξ̃(M)` (`pairs = true`); `base_row` restricts to `j = 0`.
#[derive(Clone, Debug)]
pub struct XiAlgebra {
    pub ms: PreMS,
    pub pairs: bool,
    pub base_row: bool,
}

impl XiAlgebra {
    pub fn forms(ms: &PreMS) -> Self {
        XiAlgebra { ms: ms.clone(), pairs: false, base_row: false }
    }

    pub fn pairs(ms: &PreMS) -> Self {
        XiAlgebra { ms: ms.clone(), pairs: true, base_row: false }
    }

    pub fn base(mut self) -> Self {
        self.base_row = true;
        self
    }

    /// Form degree at `(i, j)`.
    pub fn form_degree(&self, i: usize, j: usize) -> usize {
        if i == 1 {
            self.ms.m - 1 - j
        } else {
            self.ms.m - i - j
        }
    }

    /// Validated element; at `i = 1` a missing witness is computed, and for `Ξ̃` a given field must pair with the form.
    pub fn element(&self, i: usize, j: usize, form: Form, field: Option<MultiVector>) -> Result<XiElement> {
        if !in_window(self.ms.m, i, j) || (self.base_row && j != 0) {
            return arg(format!("bidegree ({i},{j}) outside the window"));
        }
        self.ms.check_dim(form.dim())?;
        let want = self.form_degree(i, j);
        if form.degree() != want && !form.is_zero() {
            return arg(format!("form of degree {} at ({i},{j}), expected {want}", form.degree()));
        }
        let form = if form.is_zero() { Form::zero(self.ms.dim, want) } else { form };
        if i != 1 {
            if field.is_some() {
                return arg("only hdeg 1 carries a field");
            }
            return Ok(XiElement { hdeg: i, vdeg: j, form, field: None });
        }
        let field = match field {
            Some(x) => {
                HamPair::new(&self.ms, x.clone(), form.clone())?;
                x
            }
            None if self.pairs => return arg("Ξ̃ elements at hdeg 1 need a field"),
            None => self.witness_of(&form)?,
        };
        Ok(XiElement { hdeg: i, vdeg: j, form, field: Some(field) })
    }

    fn witness_of(&self, form: &Form) -> Result<MultiVector> {
        hamiltonian_field(&self.ms, &exterior_d(form))?.ok_or_else(|| Error::Hypothesis("form is not hamiltonian".into()))
    }

    fn witness(&self, e: &XiElement) -> Result<MultiVector> {
        match &e.field {
            Some(x) => Ok(x.clone()),
            None => self.witness_of(&e.form),
        }
    }

    fn check(&self, e: &XiElement) -> Result<()> {
        if !in_window(self.ms.m, e.hdeg, e.vdeg) || (self.base_row && e.vdeg != 0) {
            return arg(format!("bidegree ({},{}) outside the window", e.hdeg, e.vdeg));
        }
        if self.pairs && e.hdeg == 1 && e.field.is_none() {
            return arg("Ξ̃ elements at hdeg 1 need a field");
        }
        Ok(())
    }
}

impl LInfty for XiAlgebra {
    type Elem = XiElement;

    fn degree(&self, e: &XiElement) -> i64 {
        e.total_degree()
    }

    fn bracket(&self, args: &[XiElement]) -> Result<Option<XiElement>> {
        for e in args {
            self.check(e)?;
        }
        let dim = self.ms.dim;
        let out = match args {
            [] => return arg("empty bracket"),
            [e] => {
                if e.hdeg == 1 {
                    return Ok(None);
                }
                let field = (e.hdeg == 2).then(|| MultiVector::zero(dim, e.vdeg + 1));
                XiElement { hdeg: e.hdeg - 1, vdeg: e.vdeg, form: exterior_d(&e.form).neg(), field }
            }
            _ => {
                if args.iter().any(|e| e.hdeg != 1) {
                    return Ok(None);
                }
                let k = args.len();
                let fields: Vec<MultiVector> = args.iter().map(|e| self.witness(e)).collect::<Result<_>>()?;
                let form = omega_tilde(&self.ms, &wedge_all(dim, &fields)?)?;
                let (i, j) = (k - 1, args.iter().map(|e| e.vdeg).sum::<usize>());
                if !in_window(self.ms.m, i, j) {
                    if !form.is_zero() {
                        return Err(Error::Hypothesis(format!("bracket leaves the truncation at ({i},{j})")));
                    }
                    return Ok(None);
                }
                let field = if k == 2 { Some(schouten(&fields[0], &fields[1])?) } else { None };
                XiElement { hdeg: i, vdeg: j, form, field }
            }
        };
        Ok((!self.is_zero(&out)).then_some(out))
    }

    fn accumulate(&self, acc: &mut Option<XiElement>, e: &XiElement, c: &Q) -> Result<()> {
        match acc {
            None => {
                *acc = Some(XiElement { hdeg: e.hdeg, vdeg: e.vdeg, form: e.form.scale(c), field: e.field.as_ref().map(|x| x.scale(c)) })
            }
            Some(a) => {
                if (a.hdeg, a.vdeg) != (e.hdeg, e.vdeg) {
                    return arg("adding elements of different bidegrees");
                }
                a.form.add_assign_scaled(&e.form, c);
                a.field = match (a.field.take(), &e.field) {
                    (Some(mut x), Some(y)) => {
                        x.add_assign_scaled(y, c);
                        Some(x)
                    }
                    (None, None) => None,
                    _ if self.pairs => return arg("mixing elements with and without fields"),
                    _ => None,
                };
            }
        }
        Ok(())
    }

    fn is_zero(&self, e: &XiElement) -> bool {
        e.form.is_zero() && (!self.pairs || e.field.as_ref().is_none_or(MultiVector::is_zero))
    }
}

/// `l_k` of `Ξ(M)`.
pub fn xi_bracket(ms: &PreMS, elems: &[XiElement]) -> Result<Option<XiElement>> {
    XiAlgebra::forms(ms).bracket(elems)
}

/// `l̃_k` of `Ξ̃(M)`.
pub fn xi_tilde_bracket(ms: &PreMS, elems: &[XiElement]) -> Result<Option<XiElement>> {
    XiAlgebra::pairs(ms).bracket(elems)
}

/// Multivector fields of degrees `1..=max_degree` with `ν₂`, or all `νₙ` when `strong`.
#[derive(Clone, Debug)]
pub struct MultivectorAlgebra {
    pub dim: usize,
    pub max_degree: usize,
    pub strong: bool,
}

impl LInfty for MultivectorAlgebra {
    type Elem = MultiVector;

    fn degree(&self, e: &MultiVector) -> i64 {
        e.degree() as i64
    }

    fn bracket(&self, args: &[MultiVector]) -> Result<Option<MultiVector>> {
        let out = match args.len() {
            1 => return Ok(None),
            2 => schouten(&args[0], &args[1])?,
            _ if self.strong => nu_n(args)?,
            _ => return Ok(None),
        };
        Ok((!out.is_zero() && out.degree() >= 1 && out.degree() <= self.max_degree).then_some(out))
    }

    fn accumulate(&self, acc: &mut Option<MultiVector>, e: &MultiVector, c: &Q) -> Result<()> {
        match acc {
            None => *acc = Some(e.scale(c)),
            Some(a) => a.add_assign_scaled(e, c),
        }
        Ok(())
    }

    fn is_zero(&self, e: &MultiVector) -> bool {
        e.is_zero()
    }
}

/// `π₁`: the field at hdeg 1, zero elsewhere.
pub fn pi1(e: &XiElement) -> Option<MultiVector> {
    if e.hdeg == 1 {
        e.field.clone().filter(|x| !x.is_zero())
    } else {
        None
    }
}

/// `φ₁`: forget the pair structure (the field stays as witness).
pub fn phi1(e: &XiElement) -> XiElement {
    e.clone()
}

/// `(π₁(e), φ₁(e))`.
pub fn projections(ms: &PreMS, e: &XiElement) -> (MultiVector, XiElement) {
    let x = pi1(e).unwrap_or_else(|| MultiVector::zero(ms.dim, e.hdeg + e.vdeg));
    (x, phi1(e))
}

/// Lifts a synchronized morphism `f: L → Ξ` with generating field map `a₁`
/// (`ω̃∘a₁ = d∘f₁`) to `f̃: L → Ξ̃` with `f̃₁ = (a₁, f₁)`.
pub fn lift_correspondence(
    ms: &PreMS,
    a1: &BTreeMap<usize, MultiVector>,
    f: &WordMap<XiElement>,
) -> Result<WordMap<XiElement>> {
    let space = &f.space;
    let mut out = WordMap::new(space.clone());
    for (w, e) in &f.values {
        if e.hdeg != w.len() {
            return arg(format!("f is not synchronized on {}", word_label(space, w)));
        }
        let mut e = e.clone();
        if w.len() == 1 {
            let x = a1.get(&w[0]).cloned().unwrap_or_else(|| MultiVector::zero(ms.dim, e.vdeg + 1));
            if omega_tilde(ms, &x)? != exterior_d(&e.form) {
                return arg(format!("ω̃∘a₁ ≠ d∘f₁ at generator {}", space.basis[w[0]].label));
            }
            e.field = Some(x);
        } else {
            e.field = None;
        }
        out.values.insert(w.clone(), e);
    }
    for (&b, x) in a1 {
        if !f.values.contains_key(&vec![b]) && !omega_tilde(ms, x)?.is_zero() {
            return arg(format!("ω̃∘a₁ ≠ d∘f₁ at generator {}", space.basis[b].label));
        }
        if !f.values.contains_key(&vec![b]) && !x.is_zero() {
            let j = x.degree().saturating_sub(1);
            out.values.insert(vec![b], XiElement { hdeg: 1, vdeg: j, form: Form::zero(ms.dim, ms.m - 1 - j), field: Some(x.clone()) });
        }
    }
    Ok(out)
}

/// Inverse of [`lift_correspondence`]: `(a₁, f) = (π₁∘f̃₁, φ₁∘f̃)`.
pub fn unlift(lifted: &WordMap<XiElement>) -> (BTreeMap<usize, MultiVector>, WordMap<XiElement>) {
    let mut a1 = BTreeMap::new();
    let mut f = WordMap::new(lifted.space.clone());
    for (w, e) in &lifted.values {
        let mut e = e.clone();
        if w.len() == 1 {
            if let Some(x) = e.field.take().filter(|x| !x.is_zero()) {
                a1.insert(w[0], x);
            }
        } else {
            e.field = None;
        }
        if !e.form.is_zero() {
            f.values.insert(w.clone(), e);
        }
    }
    (a1, f)
}

/// `π₁∘f̃` as a word map into multivector fields; components of arity ≥ 2 vanish.
pub fn induced_action(lifted: &WordMap<XiElement>) -> WordMap<MultiVector> {
    let mut out = WordMap::new(lifted.space.clone());
    for (w, e) in &lifted.values {
        if let Some(x) = pi1(e) {
            out.values.insert(w.clone(), x);
        }
    }
    out
}

pub fn word_label(space: &crate::multilinear::GradedSpaceFD, w: &[usize]) -> String {
    w.iter().map(|&i| space.basis[i].label.clone()).collect::<Vec<_>>().join("·")
}

/// Random form with the given degree and coefficient degree.
pub fn random_form(rng: &mut Rng64, dim: usize, degree: usize, coeff_deg: u32) -> Form {
    random_sections(rng, dim, degree, coeff_deg, 0.6)
}

/// Random hamiltonian pair with field degree `k`: a random primitive and its canonical field.
pub fn random_ham_pair(rng: &mut Rng64, ms: &PreMS, k: usize, coeff_deg: u32) -> Result<HamPair> {
    if k == 0 || k > ms.m {
        return arg(format!("field degree {k} outside 1..=m"));
    }
    for _ in 0..64 {
        let alpha = random_form(rng, ms.dim, ms.m - k, coeff_deg);
        if let Some(field) = hamiltonian_field(ms, &exterior_d(&alpha))? {
            return Ok(HamPair { field, primitive: alpha });
        }
    }
    // Constant fields are symplectic for constant ω; fall back to a closed primitive.
    let alpha = exterior_d(&random_form(rng, ms.dim, (ms.m - k).saturating_sub(1), coeff_deg + 1));
    let alpha = if alpha.degree() == ms.m - k { alpha } else { Form::zero(ms.dim, ms.m - k) };
    Ok(HamPair { field: MultiVector::zero(ms.dim, k), primitive: alpha })
}

/// Random element of `Ξ` / `Ξ̃` at `(i, j)`.
pub fn random_xi(rng: &mut Rng64, alg: &XiAlgebra, i: usize, j: usize, coeff_deg: u32) -> Result<XiElement> {
    if i == 1 {
        let p = random_ham_pair(rng, &alg.ms, j + 1, coeff_deg)?;
        return alg.element(1, j, p.primitive, Some(p.field));
    }
    let deg = alg.ms.m - i - j;
    alg.element(i, j, random_form(rng, alg.ms.dim, deg, coeff_deg), None)
}

/// Random element at a random admissible bidegree.
pub fn random_xi_any(rng: &mut Rng64, alg: &XiAlgebra, coeff_deg: u32) -> Result<XiElement> {
    let mut slots = Vec::new();
    for i in 1..=alg.ms.m {
        for j in 0..=(alg.ms.m - i) {
            if !alg.base_row || j == 0 {
                slots.push((i, j));
            }
        }
    }
    let (i, j) = slots[rng.gen_range(0..slots.len())];
    random_xi(rng, alg, i, j, coeff_deg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::morphism_defect_on;
    use crate::random::rng_for;

    fn vol3() -> PreMS {
        PreMS::volume(3)
    }

    fn form(dim: usize, s: &str) -> Form {
        Form::parse(dim, s).unwrap()
    }

    fn mv(dim: usize, s: &str) -> MultiVector {
        MultiVector::parse(dim, s).unwrap()
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(poincare_primitive(&form(1, "dx(1)")).unwrap(), Form::function(RationalPoly::var(1, 0)));
        let a = poincare_primitive(&form(3, "dx(2,3)")).unwrap();
        assert_eq!(a, form(3, "1/2*x2*dx(3) - 1/2*x3*dx(2)"));
        assert!(poincare_primitive(&Form::zero(3, 2)).unwrap().is_zero());
        assert!(poincare_primitive(&form(3, "x1*dx(2)")).is_err());
    }

    #[test]
    fn classification() {
        let ms = vol3();
        let c = classify_field(&ms, &mv(3, "d(1)")).unwrap();
        assert!(c.symplectic && c.hamiltonian);
        assert_eq!(exterior_d(c.primitive.as_ref().unwrap()), omega_tilde(&ms, &mv(3, "d(1)")).unwrap());
        let c = classify_field(&ms, &mv(3, "x1*d(1)")).unwrap();
        assert!(!c.symplectic && !c.hamiltonian);
        let c = classify_field(&ms, &MultiVector::zero(3, 1)).unwrap();
        assert!(c.symplectic && c.hamiltonian && c.primitive.unwrap().is_zero());
        assert!(omega_tilde(&ms, &MultiVector::zero(3, 1)).unwrap().is_zero());
    }

    #[test]
    fn hamiltonian_field_inverts_omega_tilde() {
        let ms = vol3();
        let mut rng = rng_for(5, "ham");
        for k in 1..=2 {
            for _ in 0..5 {
                let a = random_form(&mut rng, 3, 2 - k, 2);
                let x = hamiltonian_field(&ms, &exterior_d(&a)).unwrap().unwrap();
                assert_eq!(omega_tilde(&ms, &x).unwrap(), exterior_d(&a));
            }
        }
        let deg = PreMS::parse(4, 2, "x4*dx(1,2,4)").unwrap();
        assert!(!deg.is_constant());
        let b = exterior_d(&omega_tilde(&deg, &mv(4, "x1*d(1)")).unwrap());
        let _ = hamiltonian_field(&deg, &b).unwrap();
        let ms4 = PreMS::parse(4, 2, "dx(1,2,3)").unwrap();
        assert!(!ms4.nondegenerate_at(&[q(0), q(0), q(0), q(0)]));
        assert!(vol3().nondegenerate_at(&[q(0), q(0), q(0)]));
    }

    #[test]
    fn omega_tilde_cochain_identity() {
        let ms = PreMS::parse(4, 2, "dx(1,2,3) + dx(1,2,4)").unwrap();
        let mut rng = rng_for(7, "cc");
        for n in 1..=4 {
            for _ in 0..3 {
                let word: Vec<MultiVector> =
                    (0..n)
                    .map(|_| {
                        let k = 1 + rng.gen_range(0..2);
                        random_ham_pair(&mut rng, &ms, k, 2).unwrap().field
                    })
                    .collect();
                assert!(cochain_check_omega_tilde(&ms, &word).unwrap().is_zero());
            }
        }
        assert!(cochain_check_omega_tilde(&ms, &[mv(4, "x1*d(1)")]).is_err());
    }

    #[test]
    fn naive_bracket_fails_jacobi() {
        let ms = vol3();
        let (a, b, d) = naive_jacobi_witness(&ms).unwrap().unwrap();
        assert_eq!((a.degree(), b.degree()), (1, 2));
        let fields = [a.field.clone(), b.field.clone()];
        assert_eq!(d, omega_tilde(&ms, &schouten(&fields[0], &fields[1]).unwrap()).unwrap().neg());
        let m1 = PreMS::volume(2);
        let pairs = small_hamiltonian_pairs(&m1).unwrap();
        for p in &pairs {
            for r in &pairs {
                assert!(naive_j2(&m1, p, r).unwrap().is_zero());
            }
        }
        let alg = NaiveAlgebra { ms: &ms };
        let inner = alg.bracket(std::slice::from_ref(&b)).unwrap().unwrap();
        assert!(alg.bracket(&[inner, a]).unwrap().is_none());
    }

    #[test]
    fn xi_brackets_and_jacobi() {
        for ms in [vol3(), PreMS::parse(4, 3, "dx(1,2,3,4) + x1*dx(1,2,3,4)").unwrap()] {
            for pairs in [false, true] {
                let alg = XiAlgebra { ms: ms.clone(), pairs, base_row: false };
                let mut rng = rng_for(11, "xi");
                let e = random_xi(&mut rng, &alg, 1, 0, 1).unwrap();
                assert!(alg.bracket(&[e]).unwrap().is_none());
                for n in 1..=4 {
                    for _ in 0..4 {
                        let args: Vec<XiElement> = (0..n).map(|_| random_xi_any(&mut rng, &alg, 1).unwrap()).collect();
                        assert!(jacobi_on(&alg, &args).unwrap().is_none(), "J({n}) on {args:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn pair_bracket_is_a_pair_and_pi1_is_strict() {
        let ms = vol3();
        let alg = XiAlgebra::pairs(&ms);
        let tgt = MultivectorAlgebra { dim: 3, max_degree: 2, strong: false };
        let mut rng = rng_for(3, "pairs");
        let pi = |a: &[XiElement]| -> Result<Option<MultiVector>> { Ok(if a.len() == 1 { pi1(&a[0]) } else { None }) };
        for _ in 0..6 {
            let a = random_xi(&mut rng, &alg, 1, 0, 2).unwrap();
            let j = rng.gen_range(0..2);
            let b = random_xi(&mut rng, &alg, 1, j, 2).unwrap();
            if let Some(out) = alg.bracket(&[a.clone(), b.clone()]).unwrap() {
                HamPair::new(&ms, out.field.clone().unwrap(), out.form.clone()).unwrap();
            }
            assert!(morphism_defect_on(&alg, &tgt, &pi, &[a, b]).unwrap().is_none());
        }
    }

    #[test]
    fn witness_independence() {
        let ms = PreMS::parse(4, 2, "dx(1,2,3)").unwrap();
        let alg = XiAlgebra::forms(&ms);
        let a = alg.element(1, 0, form(4, "x1*dx(2)"), None).unwrap();
        let b = alg.element(1, 0, form(4, "x2*dx(3)"), None).unwrap();
        let mut a2 = a.clone();
        a2.field = Some(a.field.clone().unwrap().add(&mv(4, "x3*d(4)")));
        let c = alg.element(1, 0, form(4, "x3*dx(1)"), None).unwrap();
        for args in [vec![a.clone(), b.clone()], vec![a.clone(), b.clone(), c.clone()]] {
            let mut swapped = args.clone();
            swapped[0] = a2.clone();
            let (x, y) = (alg.bracket(&args).unwrap(), alg.bracket(&swapped).unwrap());
            assert_eq!(x.map(|e| e.form), y.map(|e| e.form));
        }
    }

    #[test]
    fn base_row_is_closed() {
        let ms = PreMS::volume(4);
        let alg = XiAlgebra::forms(&ms).base();
        let mut rng = rng_for(2, "base");
        for n in 2..=3 {
            let args: Vec<XiElement> = (0..n).map(|_| random_xi(&mut rng, &alg, 1, 0, 1).unwrap()).collect();
            if let Some(out) = alg.bracket(&args).unwrap() {
                assert_eq!(out.vdeg, 0);
            }
            assert!(jacobi_on(&alg, &args).unwrap().is_none());
        }
    }
}
