//! L∞-algebra actions on pre-m-symplectic ℝ^d, homotopy momentum maps,
//! L∞-momentum maps, their checkers, conversions and a gallery of examples.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cartan::{contract, exterior_d, wedge_all, Form, MultiVector};
use crate::error::{arg, Error, Result};
use crate::linalg::{solve, Matrix};
use crate::linfty::{
    coderivation_on_word, compositions, symmetric_completion, word_map_defects, LInfty, LInftyPresentation, SymWords,
    Vector, WordMap,
};
use crate::msgeo::{classify_field, lift_correspondence, omega_tilde, poincare_primitive, unlift, word_label, MultivectorAlgebra, PreMS, XiAlgebra, XiElement};
use crate::multilinear::{decalage_of_map, GradedMultiMap, GradedSpaceFD};
use crate::poly::RationalPoly;
use crate::rat::{q, qsign, Q};
use crate::signs::{koszul_sign_unchecked, unshuffles};

/// An action `a: L → tr_{1..m}(𝔛•, ν₂)` (or `{νₙ}` when `strong`) with
/// components tabulated on sorted words of `L`.
#[derive(Clone, Debug)]
pub struct Action {
    pub name: String,
    pub ms: PreMS,
    pub source: LInftyPresentation,
    pub components: WordMap<MultiVector>,
    pub strong: bool,
}

/// Arities checked for morphism equations: enough to see every nonzero term.
fn check_arity(source: &LInftyPresentation, m: usize) -> usize {
    (m + 2).max(3).min(source.max_arity)
}

impl Action {
    /// Validates shapes and degrees; the morphism property is left to [`check_action`].
    pub fn new(name: &str, ms: PreMS, source: LInftyPresentation, components: WordMap<MultiVector>, strong: bool) -> Result<Self> {
        if components.space != source.space {
            return arg("components are not defined on the source");
        }
        let words = SymWords::new(source.space.clone());
        for (w, x) in &components.values {
            if words.canonical(w).map(|(_, s)| s) != Some(w.clone()) {
                return arg(format!("component word {w:?} is not a sorted basis word"));
            }
            ms.check_dim(x.dim())?;
            let t = source.space.tuple_degree(w);
            if !x.is_zero() && x.degree() as i64 != t {
                return arg(format!("a({}) has degree {}, expected {t}", word_label(&source.space, w), x.degree()));
            }
        }
        let mut components = components;
        components.values.retain(|_, x| !x.is_zero());
        Ok(Action { name: name.into(), ms, source, components, strong })
    }

    /// Strict action from generator images.
    pub fn strict(name: &str, ms: PreMS, source: LInftyPresentation, a1: &[(&str, &str)], strong: bool) -> Result<Self> {
        let mut comps = WordMap::new(source.space.clone());
        for (label, text) in a1 {
            let b = source.space.index_of(label).ok_or_else(|| Error::Argument(format!("unknown generator {label}")))?;
            let deg = source.space.degree(b) as usize;
            comps.values.insert(vec![b], MultiVector::parse_with_degree(ms.dim, deg, text)?);
        }
        Self::new(name, ms, source, comps, strong)
    }

    pub fn m(&self) -> usize {
        self.ms.m
    }

    pub fn target(&self) -> MultivectorAlgebra {
        MultivectorAlgebra { dim: self.ms.dim, max_degree: self.ms.m, strong: self.strong }
    }

    pub fn a1(&self) -> BTreeMap<usize, MultiVector> {
        self.components.values.iter().filter(|(w, _)| w.len() == 1).map(|(w, x)| (w[0], x.clone())).collect()
    }

    pub fn is_strict(&self) -> bool {
        self.components.values.keys().all(|w| w.len() == 1)
    }

    fn component(&self, block: &[usize]) -> Result<Option<MultiVector>> {
        let args: Vec<Vector> = block.iter().map(|&b| self.source.basis_vector(b)).collect();
        let alg = MultivectorAlgebra { dim: self.ms.dim, max_degree: usize::MAX, strong: false };
        self.components.eval(&alg, &args)
    }

    /// The wedge of `â(w) ∈ S(𝔛)`, i.e. `Σ 1/b! Σ_σ ε(σ) a_{p₁}(…)∧⋯∧a_{p_b}(…)`.
    pub fn hat_wedge(&self, w: &[usize]) -> Result<MultiVector> {
        let n = w.len();
        let dim = self.ms.dim;
        let degs = self.source.space.degrees_of(w);
        let mut out = MultiVector::zero(dim, self.source.space.tuple_degree(w) as usize);
        for parts in compositions(n) {
            let scale = (1..=parts.len() as i64).fold(q(1), |a, k| a * q(k)).recip();
            'sigma: for sigma in unshuffles(&parts) {
                let s = koszul_sign_unchecked(sigma.as_slice(), &degs);
                let v = sigma.permute(w);
                let mut factors = Vec::with_capacity(parts.len());
                let mut off = 0;
                for &p in &parts {
                    match self.component(&v[off..off + p])? {
                        Some(x) => factors.push(x),
                        None => continue 'sigma,
                    }
                    off += p;
                }
                out.add_assign_scaled(&wedge_all(dim, &factors)?, &(qsign(s) * &scale));
            }
        }
        Ok(out)
    }

    /// `f(w) = ω̃(â(w))`.
    pub fn f(&self, w: &[usize]) -> Result<Form> {
        let x = self.hat_wedge(w)?;
        if x.degree() > self.ms.m + 1 {
            return Ok(Form::zero(self.ms.dim, 0));
        }
        contract(&x, &self.ms.omega)
    }

    /// Sorted words of `C(L)ⁿ = (S•L)_{m+1−n}`, indexed by word degree `1..=m+1`.
    pub fn words_of_degree(&self, t: usize) -> Vec<Vec<usize>> {
        SymWords::new(self.source.space.clone()).words_of_degree(t as i64)
    }

    /// Codifferential `e` of `C(L)` on a basis word.
    pub fn e(&self, w: &[usize]) -> Result<BTreeMap<Vec<usize>, Q>> {
        coderivation_on_word(&self.source, &SymWords::new(self.source.space.clone()), w)
    }

    /// The `l₁` part `ê₁` of the codifferential on a basis word.
    pub fn e1(&self, w: &[usize]) -> Result<BTreeMap<Vec<usize>, Q>> {
        let l1: BTreeMap<usize, GradedMultiMap> = self.source.brackets.get(&1).map(|l| BTreeMap::from([(1, l.clone())])).unwrap_or_default();
        let only = LInftyPresentation { space: self.source.space.clone(), brackets: l1, max_arity: self.source.max_arity };
        coderivation_on_word(&only, &SymWords::new(self.source.space.clone()), w)
    }

    pub fn label(&self, w: &[usize]) -> String {
        word_label(&self.source.space, w)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let j: ActionJson = serde_json::from_str(src).map_err(|e| Error::Malformed(e.to_string()))?;
        let source = LInftyPresentation::new(j.source.space, j.source.brackets, j.source.max_arity)?;
        let ms = PreMS::parse(j.target.dim, j.target.m, &j.target.omega)?;
        let mut comps = WordMap::new(source.space.clone());
        for c in &j.components {
            for (word, text) in &c.entries {
                let mut w = Vec::new();
                for l in word.split('·').map(str::trim) {
                    w.push(source.space.index_of(l).ok_or_else(|| Error::Malformed(format!("unknown generator {l}")))?);
                }
                if w.len() != c.arity {
                    return Err(Error::Malformed(format!("word {word} does not have arity {}", c.arity)));
                }
                let Some((s, sorted)) = SymWords::new(source.space.clone()).canonical(&w) else { continue };
                let x = MultiVector::parse_with_degree(ms.dim, source.space.tuple_degree(&w) as usize, text)?;
                let slot = comps.values.entry(sorted).or_insert_with(|| MultiVector::zero(ms.dim, x.degree()));
                slot.add_assign_scaled(&x, &qsign(s));
            }
        }
        Self::new(&j.name.unwrap_or_else(|| "action".into()), ms, source, comps, j.strong)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut by_arity: BTreeMap<usize, BTreeMap<String, String>> = BTreeMap::new();
        for (w, x) in &self.components.values {
            by_arity.entry(w.len()).or_default().insert(self.label(w), x.to_string());
        }
        serde_json::json!({
            "name": self.name,
            "source": self.source,
            "target": {"dim": self.ms.dim, "m": self.ms.m, "omega": self.ms.omega.to_string()},
            "components": by_arity.into_iter().map(|(arity, entries)| serde_json::json!({"arity": arity, "entries": entries})).collect::<Vec<_>>(),
            "strong": self.strong,
        })
    }
}

#[derive(Deserialize)]
struct ActionJson {
    #[serde(default)]
    name: Option<String>,
    source: LInftyPresentation,
    target: TargetJson,
    components: Vec<ComponentJson>,
    #[serde(default)]
    strong: bool,
}

#[derive(Deserialize)]
struct TargetJson {
    dim: usize,
    m: usize,
    omega: String,
}

#[derive(Deserialize)]
struct ComponentJson {
    arity: usize,
    entries: BTreeMap<String, String>,
}

/// One failing evaluation of a condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Defect {
    pub condition: String,
    pub at: String,
    pub value: String,
}

/// Structured checker output: per-condition booleans plus defect payloads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub passed: bool,
    pub conditions: BTreeMap<String, bool>,
    pub defects: Vec<Defect>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<Defect>,
}

impl Report {
    fn new(check: &str) -> Self {
        Report { check: check.into(), passed: true, conditions: BTreeMap::new(), defects: Vec::new(), notes: Vec::new() }
    }

    fn cond(&mut self, name: &str, ok: bool) {
        let e = self.conditions.entry(name.into()).or_insert(true);
        *e &= ok;
        self.passed = self.conditions.values().all(|&b| b);
    }

    fn defect(&mut self, condition: &str, at: String, value: String) {
        self.cond(condition, false);
        self.defects.push(Defect { condition: condition.into(), at, value });
    }

    pub fn condition(&self, name: &str) -> Option<bool> {
        self.conditions.get(name).copied()
    }
}

fn xi_text(e: &XiElement) -> String {
    match &e.field {
        Some(x) => format!("({},{}) ({}, {})", e.hdeg, e.vdeg, x, e.form),
        None => format!("({},{}) {}", e.hdeg, e.vdeg, e.form),
    }
}

/// Generators of `S•L` images, then higher components.
fn image_fields(a: &Action) -> Vec<(String, MultiVector)> {
    a.components.values.iter().map(|(w, x)| (a.label(w), x.clone())).collect()
}

/// Morphism property, multisymplecticity and pre-hamiltonicity of the image,
/// vanishing of `a_{n≥m+1}`, and for `m = 1` agreement of the two targets.
pub fn check_action(a: &Action) -> Result<Report> {
    let mut r = Report::new("action");
    let top = check_arity(&a.source, a.m());
    let tgt = a.target();
    for n in 1..=top {
        for (w, d) in word_map_defects(&a.source, &tgt, &a.components, n)? {
            r.defect("is_morphism", a.label(&w), d.to_string());
        }
    }
    r.cond("is_morphism", true);
    if a.m() == 1 {
        let other = MultivectorAlgebra { strong: !a.strong, ..tgt.clone() };
        let mut same = true;
        for n in 1..=top {
            same &= word_map_defects(&a.source, &tgt, &a.components, n)? == word_map_defects(&a.source, &other, &a.components, n)?;
        }
        r.cond("strong_agrees", same);
    }
    for (w, x) in &a.components.values {
        if w.len() > a.m() {
            r.defect("vanishes_above_m", a.label(w), x.to_string());
        }
        if x.degree() > a.m() {
            r.defect("in_truncation", a.label(w), x.to_string());
        }
    }
    r.cond("vanishes_above_m", true);
    r.cond("in_truncation", true);
    for (label, x) in image_fields(a) {
        let c = classify_field(&a.ms, &x)?;
        if !c.symplectic {
            r.defect("multisymplectic", label.clone(), exterior_d(&omega_tilde(&a.ms, &x)?).to_string());
        }
        if !c.hamiltonian {
            r.defect("prehamiltonian", label, x.to_string());
        }
    }
    r.cond("multisymplectic", true);
    r.cond("prehamiltonian", true);
    Ok(r)
}

fn is_multisymplectic(a: &Action) -> Result<bool> {
    for (_, x) in image_fields(a) {
        if !classify_field(&a.ms, &x)?.symplectic {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `h` evaluated on a linear combination of words; forms of degree `deg`.
fn h_on(h: &WordMap<Form>, comb: &BTreeMap<Vec<usize>, Q>, dim: usize, deg: usize) -> Form {
    let mut out = Form::zero(dim, deg);
    for (w, c) in comb {
        if let Some(v) = h.values.get(w) {
            out.add_assign_scaled(v, c);
        }
    }
    out
}

fn check_homotopy_shape(a: &Action, h: &WordMap<Form>) -> Result<()> {
    if h.space != a.source.space {
        return arg("homotopy is not defined on the source");
    }
    let m = a.m() as i64;
    for (w, v) in &h.values {
        let t = a.source.space.tuple_degree(w);
        if v.is_zero() {
            continue;
        }
        if t > m {
            return arg(format!("h({}) must vanish: C⁰ maps to Ω⁻¹ = 0", a.label(w)));
        }
        if v.degree() as i64 != m - t {
            return arg(format!("h({}) has degree {}, expected {}", a.label(w), v.degree(), m - t));
        }
    }
    Ok(())
}

/// `f = h∘e + d∘h` on every basis word of `C(L)`, as defects.
fn homotopy_defects(a: &Action, h: &WordMap<Form>) -> Result<Vec<(Vec<usize>, Form)>> {
    let (m, dim) = (a.m(), a.ms.dim);
    let mut out = Vec::new();
    for t in 1..=m + 1 {
        let n = m + 1 - t;
        for w in a.words_of_degree(t) {
            let mut lhs = a.f(&w)?;
            if lhs.is_zero() {
                lhs = Form::zero(dim, n);
            }
            let he = h_on(h, &a.e(&w)?, dim, n);
            let mut d = lhs.sub(&he);
            if let Some(hw) = h.values.get(&w) {
                d = d.sub(&exterior_d(hw));
            }
            if !d.is_zero() {
                out.push((w, d));
            }
        }
    }
    Ok(out)
}

/// Homotopy momentum map: `(h, ω̃∘â)` is a cochain null-homotopy `C(L) → tr_m(Ω)`.
pub fn check_hmm(a: &Action, h: &WordMap<Form>) -> Result<Report> {
    if !is_multisymplectic(a)? {
        return Err(Error::Hypothesis("the action is not multisymplectic, so ω̃∘â is not a cochain map".into()));
    }
    check_homotopy_shape(a, h)?;
    let mut r = Report::new("hmm");
    for (w, d) in homotopy_defects(a, h)? {
        let n = a.m() + 1 - a.source.space.tuple_degree(&w) as usize;
        r.defect("null_homotopy", format!("C^{n} {}", a.label(&w)), d.to_string());
    }
    r.cond("null_homotopy", true);
    Ok(r)
}

/// Generators `x` with `h(l₁x) ≠ 0`.
fn h_l1_defects(a: &Action, h: &WordMap<Form>) -> Result<Vec<(usize, Form)>> {
    let mut out = Vec::new();
    for b in 0..a.source.dim() {
        let t = a.source.space.degree(b);
        if t < 2 || t as usize > a.m() + 1 {
            continue;
        }
        let v = h_on(h, &a.e1(&[b])?, a.ms.dim, a.m() + 1 - t as usize);
        if !v.is_zero() {
            out.push((b, v));
        }
    }
    Ok(out)
}

/// Words `w` with `h(ê₁w) ≠ 0`.
fn h_e1_defects(a: &Action, h: &WordMap<Form>) -> Result<Vec<(Vec<usize>, Form)>> {
    let mut out = Vec::new();
    for t in 2..=a.m() + 1 {
        for w in a.words_of_degree(t) {
            let v = h_on(h, &a.e1(&w)?, a.ms.dim, a.m() + 1 - t);
            if !v.is_zero() {
                out.push((w, v));
            }
        }
    }
    Ok(out)
}

/// Homotopy hamiltonian momentum map: hmm and `(h∘l₁)(L) = 0`; for strict
/// actions pre-hamiltonicity follows and is checked independently.
pub fn check_hhmm(a: &Action, h: &WordMap<Form>) -> Result<Report> {
    let mut r = check_hmm(a, h)?;
    r.check = "hhmm".into();
    for (b, v) in h_l1_defects(a, h)? {
        r.defect("h_l1_vanishes", a.label(&[b]), v.to_string());
    }
    r.cond("h_l1_vanishes", true);
    if r.passed && a.is_strict() {
        let pre = check_action(a)?.condition("prehamiltonian").unwrap_or(false);
        r.cond("prehamiltonian_follows", pre);
    }
    Ok(r)
}

/// Flavours of lift checked by [`check_linfty_mm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftKind {
    /// Synchronized morphism into `Ξ̃` lifting `a`.
    Lmm,
    /// Morphism into the base row `Ξ̃⁰` lifting `a`.
    Lmm1,
    /// Lift of a strong action; only the lift equation is tied to `a`.
    Slmm,
}

impl LiftKind {
    fn name(self) -> &'static str {
        match self {
            LiftKind::Lmm => "lmm",
            LiftKind::Lmm1 => "lmm1",
            LiftKind::Slmm => "slmm",
        }
    }
}

/// Checks a lift `h̃: L → Ξ̃` (or `Ξ̃⁰`) of `a`: pair condition, morphism
/// equation, lift equation `π∘h̃ = a`, and synchronization or base row.
pub fn check_linfty_mm(a: &Action, lift: &WordMap<XiElement>, kind: LiftKind) -> Result<Report> {
    if lift.space != a.source.space {
        return arg("lift is not defined on the source");
    }
    let mut r = Report::new(kind.name());
    let mut alg = XiAlgebra::pairs(&a.ms);
    if kind == LiftKind::Lmm1 {
        alg = alg.base();
    }
    let mut well_formed = true;
    for (w, e) in &lift.values {
        let t = a.source.space.tuple_degree(w) as usize;
        let window = e.hdeg >= 1 && e.hdeg + e.vdeg == t && crate::msgeo::in_window(a.m(), e.hdeg, e.vdeg);
        let shape_ok = window && (e.hdeg == 1) == e.field.is_some() && (e.form.is_zero() || e.form.degree() == alg.form_degree(e.hdeg, e.vdeg));
        if !shape_ok {
            well_formed = false;
            r.defect("well_formed", a.label(w), xi_text(e));
            continue;
        }
        if let Some(x) = &e.field {
            let lhs = omega_tilde(&a.ms, x)?;
            let rhs = exterior_d(&e.form);
            if lhs != rhs {
                r.defect("pairs", a.label(w), lhs.sub(&rhs).to_string());
            }
        }
        match kind {
            LiftKind::Lmm if e.hdeg != w.len() => r.defect("synchronized", a.label(w), xi_text(e)),
            LiftKind::Lmm1 if e.vdeg != 0 => r.defect("base_row", a.label(w), xi_text(e)),
            _ => {}
        }
    }
    r.cond("well_formed", true);
    r.cond("pairs", true);
    match kind {
        LiftKind::Lmm => r.cond("synchronized", true),
        LiftKind::Lmm1 => r.cond("base_row", true),
        LiftKind::Slmm => {}
    }
    // Lift equation: π₁∘h̃ = a word by word (π₁ vanishes off hdeg 1).
    let mut words: Vec<&Vec<usize>> = lift.values.keys().chain(a.components.values.keys()).collect();
    words.sort();
    words.dedup();
    for w in words {
        let got = lift.values.get(w).and_then(crate::msgeo::pi1);
        let want = a.components.values.get(w);
        let eq = match (&got, want) {
            (None, None) => true,
            (Some(x), Some(y)) => x == y,
            (Some(x), None) | (None, Some(x)) => x.is_zero(),
        };
        if !eq {
            let show = |x: Option<&MultiVector>| x.map_or("0".to_string(), |x| x.to_string());
            r.defect("lift_equation", a.label(w), format!("π(h̃) = {}, a = {}", show(got.as_ref()), show(want)));
        }
    }
    r.cond("lift_equation", true);
    if well_formed {
        let top = check_arity(&a.source, a.m());
        for n in 1..=top {
            match word_map_defects(&a.source, &alg, lift, n) {
                Ok(ds) => {
                    for (w, d) in ds {
                        r.defect("morphism", a.label(&w), xi_text(&d));
                    }
                }
                Err(e) => r.defect("morphism", format!("arity {n}"), e.to_string()),
            }
        }
    }
    r.cond("morphism", well_formed);
    if kind == LiftKind::Slmm {
        // The strong target's higher brackets are not tied to the lift.
        let strong = MultivectorAlgebra { strong: true, ..a.target() };
        for n in 1..=check_arity(&a.source, a.m()) {
            for (w, d) in word_map_defects(&a.source, &strong, &a.components, n)? {
                r.notes.push(Defect { condition: "strong_action_morphism".into(), at: a.label(&w), value: d.to_string() });
            }
        }
    }
    Ok(r)
}

/// The lift `h̃` with `h̃_j(w) = h(w)` at bidegree `(j, |w|−j)` and field `a₁` on generators, without validation.
pub fn raw_lift(a: &Action, h: &WordMap<Form>) -> Result<WordMap<XiElement>> {
    check_homotopy_shape(a, h)?;
    let alg = XiAlgebra::pairs(&a.ms);
    let a1 = a.a1();
    let mut out = WordMap::new(a.source.space.clone());
    for (w, v) in &h.values {
        let t = a.source.space.tuple_degree(w) as usize;
        let (i, j) = (w.len(), t - w.len());
        let field = (i == 1).then(|| a1.get(&w[0]).cloned().unwrap_or_else(|| MultiVector::zero(a.ms.dim, t)));
        let form = if v.is_zero() { Form::zero(a.ms.dim, alg.form_degree(i, j)) } else { v.clone() };
        out.values.insert(w.clone(), XiElement { hdeg: i, vdeg: j, form, field });
    }
    for (&b, x) in &a1 {
        out.values.entry(vec![b]).or_insert_with(|| {
            let j = x.degree() - 1;
            XiElement { hdeg: 1, vdeg: j, form: Form::zero(a.ms.dim, alg.form_degree(1, j)), field: Some(x.clone()) }
        });
    }
    Ok(out)
}

/// hmm → lmm: requires a strict action and `h∘ê₁ = 0` on every word; goes through `lift_correspondence`.
pub fn homotopy_to_lift(a: &Action, h: &WordMap<Form>) -> Result<WordMap<XiElement>> {
    if !a.is_strict() {
        return Err(Error::Hypothesis("the action is not strict".into()));
    }
    if let Some((w, _)) = h_e1_defects(a, h)?.into_iter().next() {
        return Err(Error::Hypothesis(format!("(h∘ê₁)({}) ≠ 0", a.label(&w))));
    }
    let r = check_hmm(a, h)?;
    if !r.passed {
        return Err(Error::Hypothesis(format!("not a homotopy momentum map at {}", r.defects[0].at)));
    }
    let mut f = WordMap::new(a.source.space.clone());
    for (w, e) in raw_lift(a, h)?.values {
        f.values.insert(w, XiElement { field: None, ..e });
    }
    lift_correspondence(&a.ms, &a.a1(), &f)
}

/// Forms of a lift as a homotopy, without validation.
pub fn raw_homotopy(lift: &WordMap<XiElement>) -> WordMap<Form> {
    let mut h = WordMap::new(lift.space.clone());
    for (w, e) in &lift.values {
        if !e.form.is_zero() {
            h.values.insert(w.clone(), e.form.clone());
        }
    }
    h
}

/// lmm → hmm: requires a synchronized lift of `a`; the result is checked.
pub fn lift_to_homotopy(a: &Action, lift: &WordMap<XiElement>) -> Result<WordMap<Form>> {
    let r = check_linfty_mm(a, lift, LiftKind::Lmm)?;
    if !r.passed {
        return Err(Error::Hypothesis(format!("not an L∞-momentum map: {} at {}", r.defects[0].condition, r.defects[0].at)));
    }
    let (a1, f) = unlift(lift);
    if a1 != a.a1() {
        return Err(Error::Hypothesis("lift does not project to a₁".into()));
    }
    let h = raw_homotopy(&f);
    let back = check_hmm(a, &h)?;
    if !back.passed {
        return Err(Error::Hypothesis(format!("converted homotopy fails at {}", back.defects[0].at)));
    }
    Ok(h)
}

/// A co-momentum map `μ: L → C^∞` of a degree-1 source on a pre-symplectic manifold.
pub type CoMomentum = BTreeMap<usize, RationalPoly>;

pub fn comomentum_of(h: &WordMap<Form>) -> CoMomentum {
    h.values.iter().filter(|(w, _)| w.len() == 1).map(|(w, v)| (w[0], v.coeff(&[]))).collect()
}

pub fn homotopy_of(a: &Action, mu: &CoMomentum) -> WordMap<Form> {
    let mut h = WordMap::new(a.source.space.clone());
    for (&b, p) in mu {
        if !p.is_zero() {
            h.values.insert(vec![b], Form::function(p.clone()));
        }
    }
    h
}

/// Generating function condition `dμ(x) = ι_{ax}ω` and bracket condition
/// `μ(l₂(x,y)) = ι_{ax∧ay}ω`, checked directly.
pub fn check_comomentum(a: &Action, mu: &CoMomentum) -> Result<Report> {
    if a.m() != 1 || a.source.space.basis.iter().any(|b| b.degree != 1) {
        return arg("co-momentum maps need m = 1 and a source concentrated in degree 1");
    }
    let mut r = Report::new("comomentum");
    let dim = a.ms.dim;
    let zero = RationalPoly::zero(dim);
    let mu_of = |v: &Vector| {
        let mut acc = RationalPoly::zero(dim);
        for (b, c) in &v.coeffs {
            if let Some(p) = mu.get(b) {
                acc.add_assign_scaled(p, c);
            }
        }
        acc
    };
    let a1 = a.a1();
    let field = |b: usize| a1.get(&b).cloned().unwrap_or_else(|| MultiVector::zero(dim, 1));
    for b in 0..a.source.dim() {
        let d = exterior_d(&Form::function(mu.get(&b).unwrap_or(&zero).clone()));
        let want = omega_tilde(&a.ms, &field(b))?;
        if d != want {
            r.defect("generating_function", a.label(&[b]), d.sub(&want).to_string());
        }
        for c in b + 1..a.source.dim() {
            let br = a.source.bracket(&[a.source.basis_vector(b), a.source.basis_vector(c)])?;
            let lhs = br.map(|v| mu_of(&v)).unwrap_or_else(|| RationalPoly::zero(dim));
            let rhs = contract(&wedge_all(dim, &[field(b), field(c)])?, &a.ms.omega)?.coeff(&[]);
            if lhs != rhs {
                let mut diff = lhs.clone();
                diff.add_assign_scaled(&rhs, &q(-1));
                r.defect("bracket", a.label(&[b, c]), diff.to_string());
            }
        }
    }
    r.cond("generating_function", true);
    r.cond("bracket", true);
    Ok(r)
}

/// Builds a homotopy momentum map top-down with Poincaré-canonical primitives:
/// `h(w) = P(f(w) − h(ew))` for `|w| = 1..m`, then constants on `C¹` solve
/// the `C⁰` equation. Unsolvable when an obstruction is met.
pub fn construct_homotopy(a: &Action) -> Result<WordMap<Form>> {
    if !is_multisymplectic(a)? {
        return Err(Error::Hypothesis("the action is not multisymplectic".into()));
    }
    let (m, dim) = (a.m(), a.ms.dim);
    let mut h = WordMap::new(a.source.space.clone());
    for t in 1..=m {
        let n = m + 1 - t;
        for w in a.words_of_degree(t) {
            let mut rhs = a.f(&w)?;
            if rhs.is_zero() {
                rhs = Form::zero(dim, n);
            }
            let rhs = rhs.sub(&h_on(&h, &a.e(&w)?, dim, n));
            if rhs.is_zero() {
                continue;
            }
            let p = poincare_primitive(&rhs).map_err(|_| Error::Unsolvable(format!("f − h∘e is not closed at {}", a.label(&w))))?;
            if !p.is_zero() {
                h.values.insert(w, p);
            }
        }
    }
    let c1 = a.words_of_degree(m);
    let c0 = a.words_of_degree(m + 1);
    let index: BTreeMap<&Vec<usize>, usize> = c1.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut mat = Matrix::zeros(c0.len(), c1.len());
    let mut rhs = vec![Q::zero(); c0.len()];
    for (r, w) in c0.iter().enumerate() {
        let ew = a.e(w)?;
        let res = a.f(w)?.sub(&h_on(&h, &ew, dim, 0));
        let poly = res.coeff(&[]);
        if poly.total_degree().unwrap_or(0) > 0 {
            return Err(Error::Unsolvable(format!("C⁰ residual at {} is not constant: {poly}", a.label(w))));
        }
        rhs[r] = poly.constant_term();
        for (w2, c) in ew {
            if let Some(&col) = index.get(&w2) {
                mat.data[r][col] += c;
            }
        }
    }
    let consts = solve(&mat, &rhs).ok_or_else(|| Error::Unsolvable("no constants on C¹ solve the C⁰ equation".into()))?;
    for (w, c) in c1.iter().zip(consts) {
        if c.is_zero() {
            continue;
        }
        let slot = h.values.entry(w.clone()).or_insert_with(|| Form::zero(dim, 0));
        slot.add_assign_scaled(&Form::function(RationalPoly::constant(dim, c)), &q(1));
        if slot.is_zero() {
            h.values.remove(w);
        }
    }
    Ok(h)
}

/// Momentum candidates of each kind.
#[derive(Clone, Debug)]
pub enum MomentumCandidate {
    Homotopy(WordMap<Form>),
    HamiltonianHomotopy(WordMap<Form>),
    LinftyLift(WordMap<XiElement>),
    StrongLift(WordMap<XiElement>),
}

impl MomentumCandidate {
    pub fn homotopy(&self) -> WordMap<Form> {
        match self {
            MomentumCandidate::Homotopy(h) | MomentumCandidate::HamiltonianHomotopy(h) => h.clone(),
            MomentumCandidate::LinftyLift(l) | MomentumCandidate::StrongLift(l) => raw_homotopy(l),
        }
    }

    /// Runs the checker declared by the candidate's kind.
    pub fn check(&self, a: &Action) -> Result<Report> {
        match self {
            MomentumCandidate::Homotopy(h) => check_hmm(a, h),
            MomentumCandidate::HamiltonianHomotopy(h) => check_hhmm(a, h),
            MomentumCandidate::LinftyLift(l) => check_linfty_mm(a, l, LiftKind::Lmm),
            MomentumCandidate::StrongLift(l) => check_linfty_mm(a, l, LiftKind::Slmm),
        }
    }
}

/// Outcome of converting one candidate through every applicable notion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub action: String,
    pub branches: Vec<String>,
    pub hypothesis_violations: Vec<String>,
    pub notions: BTreeMap<String, bool>,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<bool>,
}

/// Evaluates hmm, hhmm and the lift notions on one candidate and compares them.
/// The strict-action branch needs `(h∘l₁)(L) = 0`, read as a condition on the
/// candidate; the lift also needs `h∘ê₁ = 0` on all words. For `m = 1`
/// sources in degree 1, co-momentum, `Ξ̃⁰` and strong lifts are added.
pub fn equivalence_suite(a: &Action, cand: &MomentumCandidate) -> Result<EquivalenceReport> {
    let h = cand.homotopy();
    let mut rep = EquivalenceReport {
        action: a.name.clone(),
        branches: Vec::new(),
        hypothesis_violations: Vec::new(),
        notions: BTreeMap::new(),
        agree: true,
        roundtrip: None,
    };
    if !is_multisymplectic(a)? {
        rep.hypothesis_violations.push("action is not multisymplectic".into());
        return Ok(rep);
    }
    let l1_free = !a.source.brackets.contains_key(&1);
    if !a.is_strict() {
        rep.hypothesis_violations.push("action is not strict".into());
    }
    for (b, _) in h_l1_defects(a, &h)? {
        rep.hypothesis_violations.push(format!("(h∘l₁)({}) ≠ 0", a.label(&[b])));
    }
    let e1_bad = h_e1_defects(a, &h)?;
    for (w, _) in &e1_bad {
        if w.len() > 1 {
            rep.hypothesis_violations.push(format!("(h∘ê₁)({}) ≠ 0", a.label(w)));
        }
    }
    rep.notions.insert("hmm".into(), check_hmm(a, &h)?.passed);
    rep.notions.insert("hhmm".into(), check_hhmm(a, &h)?.passed);
    if !rep.hypothesis_violations.is_empty() {
        rep.agree = false;
        return Ok(rep);
    }
    rep.branches.push(if l1_free { "l1 = 0".into() } else { "strict, h∘l1 = 0".to_string() });
    let lift = match cand {
        MomentumCandidate::LinftyLift(l) | MomentumCandidate::StrongLift(l) => l.clone(),
        _ => raw_lift(a, &h)?,
    };
    let lmm = check_linfty_mm(a, &lift, LiftKind::Lmm)?.passed;
    rep.notions.insert("lmm".into(), lmm);
    if lmm {
        rep.roundtrip = Some(lift_to_homotopy(a, &lift).map(|back| back == h).unwrap_or(false));
    }
    if a.m() == 1 && l1_free && a.source.space.basis.iter().all(|b| b.degree == 1) {
        rep.branches.push("m = 1, degree-1 source".into());
        rep.notions.insert("lmm1".into(), check_linfty_mm(a, &lift, LiftKind::Lmm1)?.passed);
        let strong = Action { strong: true, ..a.clone() };
        rep.notions.insert("slmm".into(), check_linfty_mm(&strong, &lift, LiftKind::Slmm)?.passed);
        rep.notions.insert("comomentum".into(), check_comomentum(a, &comomentum_of(&h))?.passed);
    }
    let first = rep.notions.values().next().copied();
    rep.agree = rep.notions.values().all(|&v| Some(v) == first) && rep.roundtrip != Some(false);
    Ok(rep)
}

/// A named worked example with a candidate and expected checker outcomes.
#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: String,
    pub action: Action,
    pub candidate: MomentumCandidate,
    pub expected: BTreeMap<String, bool>,
}

fn space(gens: &[(&str, i64)]) -> GradedSpaceFD {
    GradedSpaceFD::new(gens.iter().map(|(l, d)| (l.to_string(), *d)).collect()).expect("distinct labels")
}

/// Presentation with `l₂` given on sorted pairs `(x, y) ↦ Σ c·z` and optional `l₁`.
fn presentation(gens: &[(&str, i64)], l1: &[(&str, &str, i64)], l2: &[(&str, &str, &str, i64)], max_arity: usize) -> Result<LInftyPresentation> {
    let sp = space(gens);
    let ix = |l: &str| sp.index_of(l).ok_or_else(|| Error::Argument(format!("unknown generator {l}")));
    let mut brackets = BTreeMap::new();
    for (k, table) in [(1usize, l1.iter().map(|(x, z, c)| (vec![*x], *z, *c)).collect::<Vec<_>>()), (2, l2.iter().map(|(x, y, z, c)| (vec![*x, *y], *z, *c)).collect())] {
        let mut vals: BTreeMap<Vec<usize>, Vector> = BTreeMap::new();
        for (xs, z, c) in table {
            let mut w: Vec<usize> = xs.iter().map(|l| ix(l)).collect::<Result<_>>()?;
            w.sort();
            let zi = ix(z)?;
            let v = vals.entry(w).or_insert_with(|| Vector { degree: sp.degree(zi), coeffs: BTreeMap::new() });
            v.add_scaled(&Vector::basis(&sp, zi), &q(c));
        }
        if !vals.is_empty() {
            brackets.insert(k, symmetric_completion(&sp, &sp, k, -1, &vals)?);
        }
    }
    LInftyPresentation::new(sp, brackets, max_arity)
}

/// so(3) as a Lie[1]-algebra: decalage of `[e_i, e_j] = ε_ijk e_k`.
pub fn so3_presentation() -> Result<LInftyPresentation> {
    let v = space(&[("e1", 0), ("e2", 0), ("e3", 0)]);
    let mut br = GradedMultiMap::zero(v.clone(), v.clone(), 2, 1, 0);
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        br.add(vec![a, b], vec![c], q(1))?;
        br.add(vec![b, a], vec![c], q(-1))?;
    }
    let l2 = decalage_of_map(&br, -1)?;
    LInftyPresentation::new(l2.source.clone(), BTreeMap::from([(2, l2)]), 4)
}

/// Rotation action of so(3) on `(ℝ³, vol)`: `e_i ↦ −ε_ijk x_j ∂_k`; the sign
/// makes it a morphism for the decalaged bracket and the Schouten convention.
pub fn so3_action() -> Result<Action> {
    Action::strict(
        "so(3) rotations on (R^3, vol)",
        PreMS::volume(3),
        so3_presentation()?,
        &[("e1", "x3*d(2) - x2*d(3)"), ("e2", "x1*d(3) - x3*d(1)"), ("e3", "x2*d(1) - x1*d(2)")],
        false,
    )
}

/// Translations of ℝ² by the abelian Lie algebra on `(ℝ², dx∧dy)`.
pub fn translations_abelian() -> Result<Action> {
    let src = presentation(&[("ex", 1), ("ey", 1)], &[], &[], 4)?;
    Action::strict("abelian translations on (R^2, dx^dy)", PreMS::parse(2, 1, "dx(1,2)")?, src, &[("ex", "d(1)"), ("ey", "d(2)")], false)
}

/// Translations of ℝ² through the Heisenberg algebra `l₂(ex, ey) = c`, `c` acting trivially.
pub fn translations_heisenberg() -> Result<Action> {
    let src = presentation(&[("ex", 1), ("ey", 1), ("c", 1)], &[], &[("ex", "ey", "c", 1)], 4)?;
    Action::strict("Heisenberg translations on (R^2, dx^dy)", PreMS::parse(2, 1, "dx(1,2)")?, src, &[("ex", "d(1)"), ("ey", "d(2)")], false)
}

/// Graded Lie[1] source on `(ℝ⁴, vol)`, `m = 3`: `x1, x2` in degree 1, `b, c2` in degree 2, `l₂(x2, b) = c2`.
pub fn graded_r4() -> Result<Action> {
    let src = presentation(&[("x1", 1), ("x2", 1), ("b", 2), ("c2", 2)], &[], &[("x2", "b", "c2", 1)], 4)?;
    Action::strict("graded Lie[1] source on (R^4, vol)", PreMS::volume(4), src, &[("x1", "d(1)"), ("x2", "d(2)"), ("b", "d(3,4)")], false)
}

/// Source with `l₁(w) = u` on `(ℝ³, vol)`: `u ↦ 0`, `w ↦ ∂₁∧∂₂`.
pub fn l1_toy() -> Result<Action> {
    let src = presentation(&[("u", 1), ("w", 2)], &[("w", "u", 1)], &[], 4)?;
    Action::strict("l1 toy on (R^3, vol)", PreMS::volume(3), src, &[("w", "d(1,2)")], false)
}

/// A homotopy momentum map of the l₁ toy that is not hamiltonian: `h(u) = dx₁`, `h(w) = h₀(w) − x₁`.
pub fn l1_toy_non_hamiltonian(a: &Action) -> Result<WordMap<Form>> {
    let mut h = construct_homotopy(a)?;
    let (u, w) = (a.source.space.index_of("u").expect("u"), a.source.space.index_of("w").expect("w"));
    h.values.insert(vec![u], Form::parse_with_degree(3, 1, "dx(1)")?);
    let hw = h.values.entry(vec![w]).or_insert_with(|| Form::zero(3, 0));
    hw.add_assign_scaled(&Form::function(RationalPoly::var(3, 0)), &q(-1));
    Ok(h)
}

/// The same homotopy with one value shifted by a constant (or `dx₁` above functions).
pub fn perturbed(a: &Action, h: &WordMap<Form>) -> WordMap<Form> {
    let mut out = h.clone();
    let (dim, m) = (a.ms.dim, a.m());
    let b = (0..a.source.dim()).rev().find(|&b| (a.source.space.degree(b) as usize) <= m).expect("a generator inside the truncation");
    let deg = m - a.source.space.degree(b) as usize;
    let bump = if deg == 0 { Form::function(RationalPoly::one(dim)) } else { Form::term(dim, &(0..deg).collect::<Vec<_>>(), RationalPoly::var(dim, deg)) };
    let slot = out.values.entry(vec![b]).or_insert_with(|| Form::zero(dim, deg));
    slot.add_assign_scaled(&bump, &q(1));
    out
}

fn expect(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn build_gallery() -> Result<Vec<GalleryEntry>> {
    let mut out = Vec::new();
    let heis = translations_heisenberg()?;
    let h = construct_homotopy(&heis)?;
    out.push(GalleryEntry {
        name: "heisenberg-translations".into(),
        candidate: MomentumCandidate::HamiltonianHomotopy(h),
        expected: expect(&[("action", true), ("hmm", true), ("hhmm", true), ("lmm", true), ("lmm1", true), ("slmm", true), ("comomentum", true)]),
        action: heis,
    });
    let ab = translations_abelian()?;
    let mu = CoMomentum::from([(0, RationalPoly::var(2, 1)), (1, RationalPoly::var(2, 0).scale(&q(-1)))]);
    out.push(GalleryEntry {
        name: "abelian-translations".into(),
        candidate: MomentumCandidate::Homotopy(homotopy_of(&ab, &mu)),
        expected: expect(&[("action", true), ("hmm", false), ("hhmm", false), ("lmm", false), ("lmm1", false), ("slmm", false), ("comomentum", false)]),
        action: ab,
    });
    let so3 = so3_action()?;
    let h = construct_homotopy(&so3)?;
    out.push(GalleryEntry {
        name: "so3-rotations".into(),
        candidate: MomentumCandidate::LinftyLift(homotopy_to_lift(&so3, &h)?),
        expected: expect(&[("action", true), ("hmm", true), ("hhmm", true), ("lmm", true)]),
        action: so3,
    });
    let g4 = graded_r4()?;
    let h = construct_homotopy(&g4)?;
    out.push(GalleryEntry {
        name: "graded-r4".into(),
        candidate: MomentumCandidate::Homotopy(h),
        expected: expect(&[("action", true), ("hmm", true), ("hhmm", true), ("lmm", true)]),
        action: g4,
    });
    let toy = l1_toy()?;
    let h = l1_toy_non_hamiltonian(&toy)?;
    out.push(GalleryEntry {
        name: "l1-toy".into(),
        candidate: MomentumCandidate::Homotopy(h),
        expected: expect(&[("action", true), ("hmm", true), ("hhmm", false)]),
        action: toy,
    });
    Ok(out)
}

/// The gallery, built once.
pub fn gallery() -> &'static [GalleryEntry] {
    static CELL: OnceLock<Vec<GalleryEntry>> = OnceLock::new();
    CELL.get_or_init(|| build_gallery().expect("gallery construction is deterministic and checked by tests"))
}

/// Runs every checker on a gallery entry; keys match `expected`.
pub fn evaluate_entry(e: &GalleryEntry) -> Result<BTreeMap<String, bool>> {
    let a = &e.action;
    let h = e.candidate.homotopy();
    let mut out = BTreeMap::new();
    out.insert("action".to_string(), check_action(a)?.passed);
    out.insert("hmm".into(), check_hmm(a, &h)?.passed);
    out.insert("hhmm".into(), check_hhmm(a, &h)?.passed);
    if e.expected.contains_key("lmm") {
        let lift = match &e.candidate {
            MomentumCandidate::LinftyLift(l) | MomentumCandidate::StrongLift(l) => l.clone(),
            _ => raw_lift(a, &h)?,
        };
        out.insert("lmm".into(), check_linfty_mm(a, &lift, LiftKind::Lmm)?.passed);
        if e.expected.contains_key("lmm1") {
            out.insert("lmm1".into(), check_linfty_mm(a, &lift, LiftKind::Lmm1)?.passed);
            let strong = Action { strong: true, ..a.clone() };
            out.insert("slmm".into(), check_linfty_mm(&strong, &lift, LiftKind::Slmm)?.passed);
            out.insert("comomentum".into(), check_comomentum(a, &comomentum_of(&h))?.passed);
        }
    }
    Ok(out)
}

/// Text rendering of a homotopy, one word per line.
pub fn homotopy_json(a: &Action, h: &WordMap<Form>) -> serde_json::Value {
    let map: BTreeMap<String, String> = h.values.iter().map(|(w, v)| (a.label(w), v.to_string())).collect();
    serde_json::json!(map)
}

pub fn lift_json(a: &Action, l: &WordMap<XiElement>) -> serde_json::Value {
    let map: BTreeMap<String, String> = l.values.iter().map(|(w, e)| (a.label(w), xi_text(e))).collect();
    serde_json::json!(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_actions_pass_and_outcomes_match() {
        assert!(gallery().len() >= 3);
        for e in gallery() {
            let got = evaluate_entry(e).unwrap();
            assert_eq!(got, e.expected, "{}", e.name);
            let declared = e.candidate.check(&e.action).unwrap();
            let want = e.expected[match &e.candidate {
                MomentumCandidate::Homotopy(_) => "hmm",
                MomentumCandidate::HamiltonianHomotopy(_) => "hhmm",
                MomentumCandidate::LinftyLift(_) => "lmm",
                MomentumCandidate::StrongLift(_) => "slmm",
            }];
            assert_eq!(declared.passed, want, "{}", e.name);
        }
    }

    #[test]
    fn translations_action_and_obstruction() {
        let ab = translations_abelian().unwrap();
        let r = check_action(&ab).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.condition("strong_agrees"), Some(true));
        // No homotopy exists: f(ex·ey) is a nonzero constant while e = 0.
        assert!(matches!(construct_homotopy(&ab), Err(Error::Unsolvable(_))));
    }

    #[test]
    fn heisenberg_comomentum_is_classical() {
        let a = translations_heisenberg().unwrap();
        let mu = comomentum_of(&construct_homotopy(&a).unwrap());
        assert_eq!(mu[&0], RationalPoly::var(2, 1));
        assert_eq!(mu[&1], RationalPoly::var(2, 0).scale(&q(-1)));
        assert!(mu[&2].total_degree() == Some(0));
        assert!(check_comomentum(&a, &mu).unwrap().passed);
    }

    #[test]
    fn so3_rotations() {
        let a = so3_action().unwrap();
        let r = check_action(&a).unwrap();
        assert!(r.passed, "{r:?}");
        let h = construct_homotopy(&a).unwrap();
        assert!(check_hhmm(&a, &h).unwrap().passed);
        let lift = homotopy_to_lift(&a, &h).unwrap();
        assert!(check_linfty_mm(&a, &lift, LiftKind::Lmm).unwrap().passed);
        assert_eq!(lift_to_homotopy(&a, &lift).unwrap(), h);
        let eq = equivalence_suite(&a, &MomentumCandidate::Homotopy(h.clone())).unwrap();
        assert!(eq.agree && eq.notions.values().all(|&v| v), "{eq:?}");
        let bad = equivalence_suite(&a, &MomentumCandidate::Homotopy(perturbed(&a, &h))).unwrap();
        assert!(bad.agree && bad.notions.values().all(|&v| !v), "{bad:?}");
    }

    #[test]
    fn not_multisymplectic() {
        let src = presentation(&[("x", 1)], &[], &[], 4).unwrap();
        let a = Action::strict("dilation", PreMS::volume(3), src, &[("x", "x1*d(1)")], false).unwrap();
        let r = check_action(&a).unwrap();
        assert_eq!(r.condition("multisymplectic"), Some(false));
        assert!(matches!(check_hmm(&a, &WordMap::new(a.source.space.clone())), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn zero_action_zero_homotopy() {
        let src = presentation(&[("x", 1), ("y", 2)], &[], &[], 4).unwrap();
        let a = Action::strict("zero", PreMS::volume(3), src, &[], false).unwrap();
        let h = WordMap::new(a.source.space.clone());
        assert!(check_hmm(&a, &h).unwrap().passed);
        assert!(check_hhmm(&a, &h).unwrap().passed);
        // A constant on `y` is still a homotopy; a nonconstant function is not.
        assert!(check_hmm(&a, &perturbed(&a, &h)).unwrap().passed);
        let mut bad = h.clone();
        bad.values.insert(vec![1], Form::function(RationalPoly::var(3, 0)));
        let r = check_hmm(&a, &bad).unwrap();
        assert!(!r.passed && r.defects[0].at == "C^1 y", "{r:?}");
    }

    #[test]
    fn l1_toy_hmm_without_hhmm() {
        let a = l1_toy().unwrap();
        let good = construct_homotopy(&a).unwrap();
        assert!(check_hhmm(&a, &good).unwrap().passed);
        let bad = l1_toy_non_hamiltonian(&a).unwrap();
        assert!(check_hmm(&a, &bad).unwrap().passed);
        let r = check_hhmm(&a, &bad).unwrap();
        assert_eq!(r.condition("h_l1_vanishes"), Some(false));
        assert!(homotopy_to_lift(&a, &bad).is_err());
        let eq = equivalence_suite(&a, &MomentumCandidate::Homotopy(good.clone())).unwrap();
        assert!(eq.agree, "{eq:?}");
        assert_eq!(lift_to_homotopy(&a, &homotopy_to_lift(&a, &good).unwrap()).unwrap(), good);
    }

    #[test]
    fn lift_with_wrong_projection_names_generator() {
        let a = so3_action().unwrap();
        let mut lift = homotopy_to_lift(&a, &construct_homotopy(&a).unwrap()).unwrap();
        let e = lift.values.get_mut(&vec![1]).unwrap();
        e.field = Some(e.field.as_ref().unwrap().scale(&q(2)));
        let r = check_linfty_mm(&a, &lift, LiftKind::Lmm).unwrap();
        assert!(!r.passed);
        assert!(r.defects.iter().any(|d| d.condition == "lift_equation" && d.at == "e2"));
    }

    #[test]
    fn action_json_roundtrip() {
        let a = graded_r4().unwrap();
        let b = Action::from_json(&a.to_json().to_string()).unwrap();
        assert_eq!(b.components, a.components);
        assert_eq!(b.source, a.source);
    }
}
