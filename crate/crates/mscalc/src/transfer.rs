//! Transfer of L∞-structures along a cochain map out of a Chevalley–Eilenberg
//! complex: the hamiltonian subcomplex, the map `p`, the algebras `Q` and
//! `Q̃`, and the correspondence between null-homotopies and synchronized
//! morphisms. Two backends supply inputs: a random finite instance and
//! weight-homogeneous multivector fields on `(ℝ³, vol)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::cartan::{contract, exterior_d, schouten, wedge_all, Form, Mask, MultiVector};
use crate::error::{arg, Error, Result};
use crate::linalg::{combine, inverse, is_zero_vec, kernel, solve, solve_many, span_basis, Matrix};
use crate::linfty::{
    apply_map, ce_bases, ce_codifferential, check_jacobi, check_morphism, multisets, repeats_odd, symmetric_completion,
    ExtraGrading, LInfty, LInftyMorphismFD, LInftyPresentation, SymWords, Vector,
};
use crate::msgeo::{flatten, hamiltonian_field, PreMS};
use crate::multilinear::{GradedMultiMap, GradedSpaceFD};
use crate::poly::{Exponent, RationalPoly};
use crate::random::{pool_nonzero, rng_for};
use crate::rat::{fmt_q, q, Q};
use crate::signs::for_each_combination;

/// Bounded cochain complex `C^0 → ⋯ → C^top` with labelled bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplexFD {
    pub labels: Vec<Vec<String>>,
    /// `diffs[n]: C^n → C^{n+1}` for `n < top`.
    pub diffs: Vec<Matrix>,
}

impl CochainComplexFD {
    pub fn new(labels: Vec<Vec<String>>, diffs: Vec<Matrix>) -> Result<Self> {
        if labels.is_empty() || diffs.len() + 1 != labels.len() {
            return arg("a complex needs one differential between consecutive degrees");
        }
        for (n, d) in diffs.iter().enumerate() {
            if d.cols != labels[n].len() || d.rows != labels[n + 1].len() {
                return Err(Error::DimMismatch(d.rows, labels[n + 1].len()));
            }
        }
        Ok(CochainComplexFD { labels, diffs })
    }

    pub fn top(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.labels.get(n).map_or(0, Vec::len)
    }

    /// `d^n`, the zero map past the top degree.
    pub fn d(&self, n: usize) -> Matrix {
        self.diffs.get(n).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(n + 1), self.dim(n)))
    }

    /// `d^{n−1}` into degree `n` (zero for `n = 0`).
    pub fn d_into(&self, n: usize) -> Matrix {
        if n == 0 {
            Matrix::zeros(self.dim(0), 0)
        } else {
            self.d(n - 1)
        }
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for n in 1..self.diffs.len() {
            if !self.diffs[n].mul(&self.diffs[n - 1]).is_zero() {
                return Err(Error::Hypothesis(format!("d∘d ≠ 0 at degree {n}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "degrees": self.labels.iter().map(|l| serde_json::json!({"dim": l.len(), "labels": l})).collect::<Vec<_>>(),
            "differentials": self.diffs.iter().map(matrix_json).collect::<Vec<_>>(),
        })
    }
}

pub fn matrix_json(m: &Matrix) -> serde_json::Value {
    serde_json::Value::Array(
        m.data.iter().map(|r| serde_json::Value::Array(r.iter().map(|x| serde_json::Value::String(fmt_q(x))).collect())).collect(),
    )
}

/// Degreewise cochain map `maps[n]: A^n → B^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainMapFD {
    pub maps: Vec<Matrix>,
}

impl CochainMapFD {
    pub fn check(&self, a: &CochainComplexFD, b: &CochainComplexFD) -> Result<()> {
        if self.maps.len() != a.labels.len() || a.labels.len() != b.labels.len() {
            return arg("cochain map and complexes cover different degrees");
        }
        for (n, f) in self.maps.iter().enumerate() {
            if f.rows != b.dim(n) || f.cols != a.dim(n) {
                return Err(Error::DimMismatch(f.rows, b.dim(n)));
            }
        }
        for n in 0..a.top() {
            if self.maps[n + 1].mul(&a.d(n)) != b.d(n).mul(&self.maps[n]) {
                return Err(Error::Hypothesis(format!("f∘d ≠ d∘f at degree {n}")));
            }
        }
        Ok(())
    }
}

/// `f = h∘d_A + d_B∘h` with `h[n]: A^n → B^{n−1}` and `h[0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullHomotopy {
    pub f: CochainMapFD,
    pub h: Vec<Matrix>,
}

impl NullHomotopy {
    /// Degrees where the homotopy identity fails.
    pub fn defects(&self, a: &CochainComplexFD, b: &CochainComplexFD) -> Vec<usize> {
        let top = a.top();
        (0..=top)
            .filter(|&n| {
                let mut rhs = Matrix::zeros(b.dim(n), a.dim(n));
                if n < top {
                    rhs = rhs.add(&self.h[n + 1].mul(&a.d(n)));
                }
                if n > 0 {
                    rhs = rhs.add(&b.d(n - 1).mul(&self.h[n]));
                }
                rhs != self.f.maps[n]
            })
            .collect()
    }

    pub fn check(&self, a: &CochainComplexFD, b: &CochainComplexFD) -> Result<()> {
        if self.h.len() != a.labels.len() || !self.h[0].is_zero() {
            return arg("a null-homotopy needs one map per degree and h⁰ = 0");
        }
        self.f.check(a, b)?;
        match self.defects(a, b).first() {
            None => Ok(()),
            Some(n) => Err(Error::Hypothesis(format!("f ≠ h∘d + d∘h at degree {n}"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "h": self.h.iter().map(matrix_json).collect::<Vec<_>>(),
            "f": self.f.maps.iter().map(matrix_json).collect::<Vec<_>>(),
        })
    }
}

/// `D^f = d^{−1}(im f)`, one echelon basis per degree (vectors in `D^n` coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcomplex {
    pub basis: Vec<Vec<Vec<Q>>>,
}

impl Subcomplex {
    pub fn inclusion(&self, d: &CochainComplexFD, n: usize) -> Matrix {
        Matrix::from_columns(d.dim(n), &self.basis[n])
    }

    pub fn coords(&self, d: &CochainComplexFD, n: usize, v: &[Q]) -> Option<Vec<Q>> {
        solve(&self.inclusion(d, n), v)
    }
}

pub fn hamiltonian_subcomplex(d: &CochainComplexFD, f: &CochainMapFD) -> Subcomplex {
    let basis = (0..=d.top())
        .map(|n| {
            let dn = d.d(n);
            let fm = f.maps.get(n + 1).cloned().unwrap_or_else(|| Matrix::zeros(d.dim(n + 1), 0));
            let mut aug = Matrix::zeros(dn.rows, dn.cols + fm.cols);
            for i in 0..dn.rows {
                aug.data[i][..dn.cols].clone_from_slice(&dn.data[i]);
                for j in 0..fm.cols {
                    aug.data[i][dn.cols + j] = -fm.data[i][j].clone();
                }
            }
            let vs: Vec<Vec<Q>> = kernel(&aug).into_iter().map(|v| v[..dn.cols].to_vec()).collect();
            span_basis(dn.cols, &vs)
        })
        .collect();
    Subcomplex { basis }
}

/// Hypotheses of the transfer theorem, checked at construction.
#[derive(Clone, Debug)]
pub struct TransferInput {
    pub glie: LInftyPresentation,
    pub m: usize,
    pub words: Vec<Vec<Vec<usize>>>,
    pub c: CochainComplexFD,
    pub d: CochainComplexFD,
    pub f: CochainMapFD,
    index: Vec<BTreeMap<Vec<usize>, usize>>,
}

impl TransferInput {
    pub fn new(glie: LInftyPresentation, m: usize, d: CochainComplexFD, f: CochainMapFD) -> Result<Self> {
        if glie.brackets.keys().any(|&k| k != 2) {
            return arg("a graded Lie algebra carries only ν₂");
        }
        let glie = LInftyPresentation { max_arity: glie.max_arity.max(4), ..glie };
        if !check_jacobi(&glie, 3)?.is_zero() {
            return Err(Error::Hypothesis("ν violates the Jacobi identity".into()));
        }
        let c = ce_codifferential(&glie, m)?;
        if d.top() != m {
            return arg(format!("D must live in degrees 0..{m}"));
        }
        f.check(&c, &d)?;
        let words = ce_bases(&glie.space, m);
        let index = words.iter().map(|ws| ws.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()).collect();
        let input = TransferInput { glie, m, words, c, d, f, index };
        input.check_kernel_hypothesis()?;
        Ok(input)
    }

    pub fn sym_words(&self) -> SymWords {
        SymWords::new(self.glie.space.clone())
    }

    /// Degree `n` of `C(𝔤)` holding words of total degree `t`.
    pub fn cdeg(&self, t: i64) -> Option<usize> {
        let n = self.m as i64 + 1 - t;
        (0..=self.m as i64).contains(&n).then_some(n as usize)
    }

    /// `f` of a combination of words of one total degree; `None` past the truncation.
    pub fn f_words(&self, w: &BTreeMap<Vec<usize>, Q>) -> Result<Option<(usize, Vec<Q>)>> {
        let Some(first) = w.keys().next() else { return Ok(None) };
        let Some(n) = self.cdeg(self.glie.space.tuple_degree(first)) else { return Ok(None) };
        let mut out = vec![Q::zero(); self.d.dim(n)];
        for (word, c) in w {
            let j = *self.index[n].get(word).ok_or_else(|| Error::Argument("word of mixed degree".into()))?;
            for (i, x) in out.iter_mut().enumerate() {
                let e = &self.f.maps[n].data[i][j];
                if !e.is_zero() {
                    *x += e * c;
                }
            }
        }
        Ok(Some((n, out)))
    }

    /// Basis indices of `𝔤_k`.
    pub fn g_of_degree(&self, k: i64) -> Vec<usize> {
        (0..self.glie.dim()).filter(|&i| self.glie.space.degree(i) == k).collect()
    }

    /// `f` restricted to single-letter words `𝔤_{m+1−n} ⊂ C^n`.
    pub fn f_on_g(&self, n: usize) -> (Matrix, Vec<usize>) {
        let g = self.g_of_degree(self.m as i64 + 1 - n as i64);
        let cols: Vec<Vec<Q>> = g.iter().map(|&b| self.f.maps[n].column(self.index[n][&vec![b]])).collect();
        (Matrix::from_columns(self.d.dim(n), &cols), g)
    }

    /// `f(x) = 0` for `x ∈ 𝔤` forces `f(x·w) = 0` for every word `w`.
    fn check_kernel_hypothesis(&self) -> Result<()> {
        let words = self.sym_words();
        for n in 1..=self.m {
            let (fg, g) = self.f_on_g(n);
            let k = self.m as i64 + 1 - n as i64;
            for kv in kernel(&fg) {
                let x = Vector { degree: k, coeffs: g.iter().zip(&kv).filter(|(_, c)| !c.is_zero()).map(|(&b, c)| (b, c.clone())).collect() };
                for wdeg in 1..=(self.m as i64 + 1 - k) {
                    for w in words.words_of_degree(wdeg) {
                        let mut factors = vec![x.clone()];
                        factors.extend(w.iter().map(|&b| self.glie.basis_vector(b)));
                        if let Some((_, v)) = self.f_words(&words.product(&factors))? {
                            if !is_zero_vec(&v) {
                                return Err(Error::Hypothesis(format!(
                                    "f(x) = 0 but f(x·{}) ≠ 0 for a kernel element x of 𝔤_{k}",
                                    crate::msgeo::word_label(&self.glie.space, &w)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `p: (D^f)^n → 𝔤_{m−n}` with `f∘p = d`, tabulated on the echelon basis of `D^f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMap {
    pub values: Vec<Vec<Vector>>,
}

impl PMap {
    pub fn apply(&self, n: usize, coords: &[Q]) -> Vector {
        let mut out = Vector { degree: 0, coeffs: BTreeMap::new() };
        for (c, v) in coords.iter().zip(&self.values[n]) {
            if !c.is_zero() {
                out.degree = v.degree;
                out.add_scaled(v, c);
            }
        }
        out
    }
}

/// Free-variable-zero solution of `f(g) = dα` per basis vector; linear and zero on closed elements.
pub fn construct_p(input: &TransferInput, sub: &Subcomplex) -> Result<PMap> {
    let m = input.m;
    let mut values = Vec::new();
    for n in 0..=m {
        let k = m as i64 - n as i64;
        if n == m {
            values.push(sub.basis[n].iter().map(|_| Vector { degree: k, coeffs: BTreeMap::new() }).collect());
            continue;
        }
        let (fg, g) = input.f_on_g(n + 1);
        let d = input.d.d(n);
        let rhs: Vec<Vec<Q>> = sub.basis[n].iter().map(|b| d.apply(b)).collect();
        let sols = solve_many(&fg, &rhs).ok_or_else(|| Error::Unsolvable(format!("no p with f∘p = d in degree {n}")))?;
        values.push(
            sols.into_iter()
                .map(|s| Vector { degree: k, coeffs: g.iter().zip(s).filter(|(_, c)| !c.is_zero()).map(|(&b, c)| (b, c)).collect() })
                .collect(),
        );
    }
    Ok(PMap { values })
}

/// A second valid `p`: adds `φ(dα)·z` for a central `z` with `f(z) = 0` of the
/// right degree, where `φ` is a fixed nonzero functional. `f∘p = d` still holds.
pub fn shift_p_by_central(input: &TransferInput, sub: &Subcomplex, p: &PMap, central: &[usize]) -> PMap {
    let mut out = p.clone();
    for n in 0..input.m {
        let k = (input.m - n) as i64;
        let Some(&z) = central.iter().find(|&&z| input.glie.space.degree(z) == k) else { continue };
        for (b, v) in sub.basis[n].iter().enumerate() {
            let dv = input.d.d(n).apply(v);
            let phi: Q = dv.iter().enumerate().map(|(i, x)| x * q(i as i64 + 2)).sum();
            out.values[n][b].add_scaled(&Vector::basis(&input.glie.space, z), &phi);
        }
    }
    out
}

/// Basis element of `Q` / `Q̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QElem {
    pub hdeg: usize,
    pub vdeg: usize,
    /// Coordinates in `D^{n}` for the form degree `n` of the slot.
    pub form: Vec<Q>,
    /// The `𝔤`-component of a pair at hdeg 1 in `Q̃`.
    pub field: Option<Vector>,
    /// `p` of the form at hdeg 1.
    pub p: Option<Vector>,
}

/// The transferred algebra with its bigrading and the strict morphism to `𝔤`.
#[derive(Clone, Debug)]
pub struct QAlgebra {
    pub pairs: bool,
    pub m: usize,
    pub presentation: LInftyPresentation,
    pub elems: Vec<QElem>,
    pub grading: ExtraGrading,
    /// `p` (for `Q`) or `π₁` (for `Q̃`) as a strict morphism into `𝔤`.
    pub to_g: LInftyMorphismFD,
    slots: BTreeMap<(usize, usize), Vec<usize>>,
}

impl QAlgebra {
    pub fn form_degree(m: usize, i: usize, j: usize) -> usize {
        if i == 1 {
            m - 1 - j
        } else {
            m - i - j
        }
    }

    pub fn slot(&self, i: usize, j: usize) -> &[usize] {
        self.slots.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    /// Coordinates of `(field, form)` at bidegree `(i, j)`.
    pub fn coords(&self, glie_dim: usize, i: usize, j: usize, form: &[Q], field: Option<&Vector>) -> Result<Vector> {
        let slot = self.slot(i, j);
        let with_field = self.pairs && i == 1;
        let stack = |f: Option<&Vector>, a: &[Q]| -> Vec<Q> {
            let mut v = if with_field { f.map_or_else(|| vec![Q::zero(); glie_dim], |x| x.dense(glie_dim)) } else { Vec::new() };
            v.extend_from_slice(a);
            v
        };
        let target = stack(field, form);
        let out = Vector { degree: (i + j) as i64, coeffs: BTreeMap::new() };
        if is_zero_vec(&target) {
            return Ok(out);
        }
        let cols: Vec<Vec<Q>> = slot.iter().map(|&b| stack(self.elems[b].field.as_ref(), &self.elems[b].form)).collect();
        let sol = solve(&Matrix::from_columns(target.len(), &cols), &target)
            .ok_or_else(|| Error::Hypothesis(format!("value outside Q at bidegree ({i},{j})")))?;
        Ok(Vector { degree: (i + j) as i64, coeffs: slot.iter().zip(sol).filter(|(_, c)| !c.is_zero()).map(|(&b, c)| (b, c)).collect() })
    }

    /// Form part of a combination at a single bidegree.
    pub fn form_of(&self, v: &Vector) -> Vec<Q> {
        let terms: Vec<(Q, &[Q])> = v.coeffs.iter().map(|(b, c)| (c.clone(), self.elems[*b].form.as_slice())).collect();
        let len = v.coeffs.keys().next().map_or(0, |b| self.elems[*b].form.len());
        combine(len, &terms)
    }

    /// Field part of a combination at hdeg 1 in `Q̃`.
    pub fn field_of(&self, v: &Vector, glie_dim: usize) -> Vector {
        let mut out = Vector { degree: v.degree, coeffs: BTreeMap::new() };
        for (b, c) in &v.coeffs {
            if let Some(x) = &self.elems[*b].field {
                out.add_scaled(x, c);
            }
        }
        let _ = glie_dim;
        out
    }

    /// The row `j = 0` as a presentation on its own, with basis indices into `self`.
    pub fn base_row(&self) -> Result<(LInftyPresentation, Vec<usize>)> {
        let keep: Vec<usize> = (0..self.elems.len()).filter(|&b| self.elems[b].vdeg == 0).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let space = GradedSpaceFD::new(keep.iter().map(|&b| (self.presentation.space.basis[b].label.clone(), self.presentation.space.degree(b))).collect())?;
        let mut brackets = BTreeMap::new();
        for (&k, l) in &self.presentation.brackets {
            let mut out = GradedMultiMap::zero(space.clone(), space.clone(), k, 1, -1);
            for (inp, img) in l.entries() {
                let Some(t) = inp.iter().map(|b| pos.get(b).copied()).collect::<Option<Vec<_>>>() else { continue };
                for (o, c) in img {
                    let o2 = *pos.get(&o[0]).ok_or_else(|| Error::Hypothesis("base row is not closed".into()))?;
                    out.add(t.clone(), vec![o2], c.clone())?;
                }
            }
            brackets.insert(k, out);
        }
        Ok((LInftyPresentation::new(space, brackets, self.presentation.max_arity)?, keep))
    }
}

/// Builds `Q` (`pairs = false`) or `Q̃` (`pairs = true`).
pub fn build_q(input: &TransferInput, sub: &Subcomplex, p: &PMap, pairs: bool) -> Result<QAlgebra> {
    let m = input.m;
    let gdim = input.glie.dim();
    let mut elems = Vec::new();
    for i in 1..=m {
        for j in 0..=(m - i) {
            let n = QAlgebra::form_degree(m, i, j);
            if i >= 2 {
                for r in 0..input.d.dim(n) {
                    let mut e = vec![Q::zero(); input.d.dim(n)];
                    e[r] = Q::one();
                    elems.push(QElem { hdeg: i, vdeg: j, form: e, field: None, p: None });
                }
            } else if !pairs {
                for (b, v) in sub.basis[n].iter().enumerate() {
                    elems.push(QElem { hdeg: 1, vdeg: j, form: v.clone(), field: None, p: Some(p.values[n][b].clone()) });
                }
            } else {
                // Pairs (x, α) with x ∈ 𝔤_{j+1}, α ∈ (D^f)^n and dα = f(x).
                let (fx, g) = input.f_on_g(n + 1);
                let db = input.d.d(n).mul(&sub.inclusion(&input.d, n));
                let mut aug = Matrix::zeros(fx.rows, fx.cols + db.cols);
                for r in 0..fx.rows {
                    aug.data[r][..fx.cols].clone_from_slice(&fx.data[r]);
                    for c in 0..db.cols {
                        aug.data[r][fx.cols + c] = -db.data[r][c].clone();
                    }
                }
                for kv in span_basis(aug.cols, &kernel(&aug)) {
                    let x = Vector { degree: (j + 1) as i64, coeffs: g.iter().zip(&kv).filter(|(_, c)| !c.is_zero()).map(|(&b, c)| (b, c.clone())).collect() };
                    let coords = &kv[fx.cols..];
                    let form = sub.inclusion(&input.d, n).apply(coords);
                    elems.push(QElem { hdeg: 1, vdeg: j, form, field: Some(x), p: Some(p.apply(n, coords)) });
                }
            }
        }
    }
    let mut slots: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (b, e) in elems.iter().enumerate() {
        slots.entry((e.hdeg, e.vdeg)).or_default().push(b);
    }
    let tag = if pairs { "Q~" } else { "Q" };
    let mut counter: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let basis = elems
        .iter()
        .map(|e| {
            let k = counter.entry((e.hdeg, e.vdeg)).or_insert(0);
            *k += 1;
            (format!("{tag}[{},{}]#{}", e.hdeg, e.vdeg, k), (e.hdeg + e.vdeg) as i64)
        })
        .collect();
    let space = GradedSpaceFD::new(basis)?;
    let grading = ExtraGrading { index: elems.iter().map(|e| e.hdeg as i64).collect() };
    let max_arity = (m + 1).max(4);
    let mut q = QAlgebra {
        pairs,
        m,
        presentation: LInftyPresentation::abelian(space.clone(), max_arity)?,
        elems,
        grading,
        to_g: LInftyMorphismFD::new(BTreeMap::new())?,
        slots,
    };

    let mut brackets = BTreeMap::new();
    let mut q1 = BTreeMap::new();
    for b in 0..q.elems.len() {
        let e = &q.elems[b];
        if e.hdeg < 2 {
            continue;
        }
        let n = QAlgebra::form_degree(m, e.hdeg, e.vdeg);
        let v: Vec<Q> = input.d.d(n).apply(&e.form).into_iter().map(|x| -x).collect();
        let val = q.coords(gdim, e.hdeg - 1, e.vdeg, &v, None)?;
        if !val.is_zero() {
            q1.insert(vec![b], val);
        }
    }
    brackets.insert(1, symmetric_completion(&space, &space, 1, -1, &q1)?);

    let words = input.sym_words();
    let ones: Vec<usize> = (0..q.elems.len()).filter(|&b| q.elems[b].hdeg == 1).collect();
    for k in 2..=max_arity {
        let mut values = BTreeMap::new();
        for t in multisets(ones.len(), k) {
            let t: Vec<usize> = t.iter().map(|&i| ones[i]).collect();
            if repeats_odd(&space, &t) {
                continue;
            }
            let (i, j) = (k - 1, t.iter().map(|&b| q.elems[b].vdeg).sum::<usize>());
            if i > m || i + j > m {
                continue;
            }
            let letters: Vec<Vector> =
                t.iter().map(|&b| if pairs { q.elems[b].field.clone() } else { q.elems[b].p.clone() }.expect("hdeg-1 data")).collect();
            let Some((_, form)) = input.f_words(&words.product(&letters))? else { continue };
            let field = if pairs && k == 2 { input.glie.bracket(&letters)? } else { None };
            let val = q.coords(gdim, i, j, &form, field.as_ref())?;
            if !val.is_zero() {
                values.insert(t, val);
            }
        }
        brackets.insert(k, symmetric_completion(&space, &space, k, -1, &values)?);
    }
    q.presentation = LInftyPresentation::new(space.clone(), brackets, max_arity)?;

    let mut to_g = GradedMultiMap::zero(space.clone(), input.glie.space.clone(), 1, 1, 0);
    for &b in &ones {
        let v = if pairs { q.elems[b].field.clone() } else { q.elems[b].p.clone() }.expect("hdeg-1 data");
        for (o, c) in &v.coeffs {
            to_g.add(vec![b], vec![*o], c.clone())?;
        }
    }
    q.to_g = LInftyMorphismFD::strict(to_g)?;
    Ok(q)
}

/// Whether the strict map into `𝔤` is an L∞-morphism up to arity `n`.
pub fn to_g_defect_free(input: &TransferInput, q: &QAlgebra, n: usize) -> Result<bool> {
    for k in 1..=n {
        if !check_morphism(&q.to_g, &q.presentation, &input.glie, k)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Strict action `a₁: L → 𝔤` of a finite L∞-algebra.
#[derive(Clone, Debug)]
pub struct FiniteAction {
    pub name: String,
    pub source: LInftyPresentation,
    pub a1: GradedMultiMap,
}

/// `C(L)`, its word bases, the `l₁` part `ê₁` of its codifferential and `f∘â₁: C(L) → D`.
pub struct SourceComplex {
    pub c: CochainComplexFD,
    pub e1: CochainComplexFD,
    pub words: Vec<Vec<Vec<usize>>>,
    pub fmap: CochainMapFD,
}

pub fn source_complex(input: &TransferInput, act: &FiniteAction) -> Result<SourceComplex> {
    let strict = LInftyMorphismFD::strict(act.a1.clone())?;
    for n in 1..=3.min(act.source.max_arity) {
        if !check_morphism(&strict, &act.source, &input.glie, n)?.is_zero() {
            return Err(Error::Hypothesis(format!("a₁ is not an L∞-morphism at arity {n}")));
        }
    }
    let c = ce_codifferential(&act.source, input.m)?;
    let l1_only = LInftyPresentation::new(
        act.source.space.clone(),
        act.source.brackets.get(&1).map(|l1| BTreeMap::from([(1, l1.clone())])).unwrap_or_default(),
        act.source.max_arity,
    )?;
    let e1 = ce_codifferential(&l1_only, input.m)?;
    let words = ce_bases(&act.source.space, input.m);
    let gw = input.sym_words();
    let mut maps = Vec::new();
    for (n, ws) in words.iter().enumerate() {
        let mut cols = Vec::new();
        for w in ws {
            let letters: Vec<Vector> = w.iter().map(|&b| apply_map(&act.a1, &[act.source.basis_vector(b)]).unwrap_or(Vector { degree: act.source.space.degree(b), coeffs: BTreeMap::new() })).collect();
            let col = match input.f_words(&gw.product(&letters))? {
                Some((n2, v)) if n2 == n => v,
                Some(_) => return arg("action changes word degrees"),
                None => vec![Q::zero(); input.d.dim(n)],
            };
            cols.push(col);
        }
        maps.push(Matrix::from_columns(input.d.dim(n), &cols));
    }
    Ok(SourceComplex { c, e1, words, fmap: CochainMapFD { maps } })
}

/// Words `(n, c)` of `C(L)` where `h∘e` (generators only) or `h∘ê₁` (all words) is nonzero.
fn h_after(sc: &SourceComplex, h: &[Matrix], all_words: bool) -> Vec<(usize, usize)> {
    let e = if all_words { &sc.e1 } else { &sc.c };
    let mut bad = Vec::new();
    for (n, ws) in sc.words.iter().enumerate() {
        if n + 1 >= h.len() {
            continue;
        }
        for (c, w) in ws.iter().enumerate() {
            if (all_words || w.len() == 1) && !is_zero_vec(&h[n + 1].apply(&e.d(n).column(c))) {
                bad.push((n, c));
            }
        }
    }
    bad
}

/// Null-homotopy of `f∘â₁` with `h∘ê₁ = 0` on every word, free entries zero.
/// On generators this is `(h∘e)(L) = 0`; on longer words it is the vanishing
/// of the top horizontal component of the morphism equation.
pub fn solve_homotopy(input: &TransferInput, sc: &SourceComplex) -> Result<NullHomotopy> {
    solve_homotopy_with(input, sc, true)
}

/// As [`solve_homotopy`]; with `all_words = false` only `(h∘e)(L) = 0` is imposed.
pub fn solve_homotopy_with(input: &TransferInput, sc: &SourceComplex, all_words: bool) -> Result<NullHomotopy> {
    let (a, b) = (&sc.c, &input.d);
    let top = a.top();
    // Unknown h^n[r][c] for n = 1..=top, r < dim B^{n−1}, c < dim A^n.
    let mut offset = vec![0usize; top + 2];
    for n in 1..=top {
        offset[n + 1] = offset[n] + b.dim(n - 1) * a.dim(n);
    }
    let nvars = offset[top + 1];
    let var = |n: usize, r: usize, c: usize| offset[n] + r * a.dim(n) + c;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs = Vec::new();
    for n in 0..=top {
        let e = a.d(n);
        let dd = if n > 0 { Some(b.d(n - 1)) } else { None };
        for r in 0..b.dim(n) {
            for c in 0..a.dim(n) {
                let mut row = vec![Q::zero(); nvars];
                if n < top {
                    for s in 0..a.dim(n + 1) {
                        if !e.data[s][c].is_zero() {
                            row[var(n + 1, r, s)] += &e.data[s][c];
                        }
                    }
                }
                if let Some(dd) = &dd {
                    for s in 0..b.dim(n - 1) {
                        if !dd.data[r][s].is_zero() {
                            row[var(n, s, c)] += &dd.data[r][s];
                        }
                    }
                }
                rows.push(row);
                rhs.push(sc.fmap.maps[n].data[r][c].clone());
            }
        }
    }
    for n in 0..top {
        let e = if all_words { sc.e1.d(n) } else { a.d(n) };
        for c in 0..a.dim(n) {
            if !all_words && sc.words[n][c].len() != 1 {
                continue;
            }
            for r in 0..b.dim(n) {
                let mut row = vec![Q::zero(); nvars];
                for s in 0..a.dim(n + 1) {
                    if !e.data[s][c].is_zero() {
                        row[var(n + 1, r, s)] += &e.data[s][c];
                    }
                }
                rows.push(row);
                rhs.push(Q::zero());
            }
        }
    }
    let mut mat = Matrix::zeros(rows.len(), nvars);
    mat.data = rows;
    let sol = solve(&mat, &rhs).ok_or_else(|| Error::Unsolvable(if all_words { "f∘â₁ admits no null-homotopy with h∘ê₁ = 0" } else { "f∘â₁ admits no null-homotopy with (h∘e)(L) = 0" }.into()))?;
    let mut h = vec![Matrix::zeros(0, a.dim(0))];
    for n in 1..=top {
        let mut hn = Matrix::zeros(b.dim(n - 1), a.dim(n));
        for r in 0..b.dim(n - 1) {
            for c in 0..a.dim(n) {
                hn.data[r][c] = sol[var(n, r, c)].clone();
            }
        }
        h.push(hn);
    }
    let hom = NullHomotopy { f: sc.fmap.clone(), h };
    hom.check(a, b)?;
    Ok(hom)
}

/// Synchronized morphism `ĥ: L → Q` (or `Q̃`) with `ĥ_j(w) = h(w)` at horizontal degree `j`.
pub fn homotopy_to_morphism(input: &TransferInput, q: &QAlgebra, act: &FiniteAction, sc: &SourceComplex, hom: &NullHomotopy) -> Result<LInftyMorphismFD> {
    hom.check(&sc.c, &input.d)?;
    if hom.f != sc.fmap {
        return arg("the homotopy is not for f∘â₁");
    }
    if let Some(&(n, c)) = h_after(sc, &hom.h, true).first() {
        let w = &sc.words[n][c];
        let what = if w.len() == 1 { "h∘e" } else { "h∘ê₁" };
        return Err(Error::Hypothesis(format!("({what})({}) ≠ 0", sc.c.labels[n][c])));
    }
    let gdim = input.glie.dim();
    let mut values: BTreeMap<usize, BTreeMap<Vec<usize>, Vector>> = BTreeMap::new();
    for (n, ws) in sc.words.iter().enumerate().skip(1) {
        for (c, w) in ws.iter().enumerate() {
            let j = w.len();
            let t = act.source.space.tuple_degree(w) as usize;
            let form = hom.h[n].column(c);
            let field = if j == 1 { apply_map(&act.a1, &[act.source.basis_vector(w[0])]) } else { None };
            if is_zero_vec(&form) && field.is_none() {
                continue;
            }
            let val = q.coords(gdim, j, t - j, &form, field.as_ref())?;
            if !val.is_zero() {
                values.entry(j).or_default().insert(w.clone(), val);
            }
        }
    }
    let mut comps = BTreeMap::new();
    for (j, vals) in values {
        comps.insert(j, symmetric_completion(&act.source.space, &q.presentation.space, j, 0, &vals)?);
    }
    LInftyMorphismFD::new(comps)
}

/// Inverse direction: reads `a₁` and `h` off a synchronized morphism into `Q̃`.
pub fn morphism_to_homotopy(input: &TransferInput, q: &QAlgebra, source: &LInftyPresentation, mor: &LInftyMorphismFD) -> Result<(GradedMultiMap, NullHomotopy)> {
    if !q.pairs {
        return arg("reading off the action needs the pair algebra");
    }
    if !crate::linfty::is_synchronized(mor, &q.grading) {
        return arg("morphism is not synchronized");
    }
    let words = ce_bases(&source.space, input.m);
    let mut a1 = GradedMultiMap::zero(source.space.clone(), input.glie.space.clone(), 1, 1, 0);
    let mut h = vec![Matrix::zeros(0, words[0].len())];
    for (n, ws) in words.iter().enumerate().skip(1) {
        let mut cols = Vec::new();
        for w in ws {
            let args: Vec<Vector> = w.iter().map(|&b| source.basis_vector(b)).collect();
            let v = mor.apply(&args).unwrap_or(Vector { degree: 0, coeffs: BTreeMap::new() });
            if v.is_zero() {
                cols.push(vec![Q::zero(); input.d.dim(n - 1)]);
                continue;
            }
            cols.push(q.form_of(&v));
            if w.len() == 1 {
                for (o, c) in &q.field_of(&v, input.glie.dim()).coeffs {
                    a1.add(vec![w[0]], vec![*o], c.clone())?;
                }
            }
        }
        h.push(Matrix::from_columns(input.d.dim(n - 1), &cols));
    }
    let act = FiniteAction { name: String::new(), source: source.clone(), a1: a1.clone() };
    let sc = source_complex(input, &act)?;
    let hom = NullHomotopy { f: sc.fmap.clone(), h };
    hom.check(&sc.c, &input.d).map_err(|e| Error::Argument(format!("morphism is not a lift of a homotopy: {e}")))?;
    Ok((a1, hom))
}

/// A null-homotopy `h + d∘k − k∘e` of the same map with `(h∘e)(L) ≠ 0`, if a unit `k` produces one.
pub fn outside_witness(input: &TransferInput, sc: &SourceComplex, hom: &NullHomotopy) -> Option<(NullHomotopy, String)> {
    let (a, b) = (&sc.c, &input.d);
    let top = a.top();
    for n in 2..=top {
        for r in 0..b.dim(n - 2) {
            for c in 0..a.dim(n) {
                let mut k: Vec<Matrix> = (0..=top).map(|i| Matrix::zeros(if i >= 2 { b.dim(i - 2) } else { 0 }, a.dim(i))).collect();
                k[n].data[r][c] = Q::one();
                let h: Vec<Matrix> = (0..=top)
                    .map(|i| {
                        let mut hi = hom.h[i].clone();
                        if i >= 2 {
                            hi = hi.add(&b.d(i - 2).mul(&k[i]));
                        }
                        if i >= 1 && i < top {
                            hi = hi.sub(&k[i + 1].mul(&a.d(i)));
                        }
                        hi
                    })
                    .collect();
                let cand = NullHomotopy { f: hom.f.clone(), h };
                if cand.check(a, b).is_ok() && !h_after(sc, &cand.h, false).is_empty() {
                    return Some((cand, format!("k = unit {} → {} in degree {n}", a.labels[n][c], b.labels[n - 2][r])));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub instance: String,
    pub source: String,
    pub morphism_q: bool,
    pub morphism_q_tilde: bool,
    pub synchronized: bool,
    pub homotopy_roundtrip: bool,
    pub morphism_roundtrip: bool,
    pub action_strict: bool,
    pub outside_witness: Option<String>,
}

/// Both directions of the correspondence for one action; `max_n` bounds the morphism checks.
pub fn roundtrip_check(input: &TransferInput, q: &QAlgebra, qt: &QAlgebra, act: &FiniteAction, instance: &str, max_n: usize) -> Result<RoundtripReport> {
    let sc = source_complex(input, act)?;
    let hom = solve_homotopy(input, &sc)?;
    let mq = homotopy_to_morphism(input, q, act, &sc, &hom)?;
    let mqt = homotopy_to_morphism(input, qt, act, &sc, &hom)?;
    let ok_all = |mor: &LInftyMorphismFD, tgt: &QAlgebra| -> Result<bool> {
        for n in 1..=max_n.min(act.source.max_arity) {
            if !check_morphism(mor, &act.source, &tgt.presentation, n)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (a1, hom2) = morphism_to_homotopy(input, qt, &act.source, &mqt)?;
    let mqt2 = homotopy_to_morphism(input, qt, &FiniteAction { a1: a1.clone(), ..act.clone() }, &sc, &hom2)?;
    let has_l1 = act.source.brackets.contains_key(&1);
    Ok(RoundtripReport {
        instance: instance.into(),
        source: act.name.clone(),
        morphism_q: ok_all(&mq, q)?,
        morphism_q_tilde: ok_all(&mqt, qt)?,
        synchronized: crate::linfty::is_synchronized(&mq, &q.grading) && crate::linfty::is_synchronized(&mqt, &qt.grading),
        homotopy_roundtrip: hom2 == hom && a1 == act.a1,
        morphism_roundtrip: mqt2 == mqt,
        action_strict: true,
        outside_witness: if has_l1 { outside_witness(input, &sc, &hom).map(|(_, s)| s) } else { None },
    })
}

/// Supplier of transfer inputs.
pub trait TransferBackend {
    fn name(&self) -> &str;
    fn input(&self) -> &TransferInput;
}

/// Random finite instance, `m = 3`: `𝔤 = 𝔥 ⊕ I` with `𝔥₁ = aff(1) = ⟨h,e⟩`,
/// `𝔥₂ = ⟨v⟩`, `h·v = λv`, `I = ⟨z₁,z₂⟩` central, in a random basis adapted
/// to the splitting. `D = C(𝔤)/K` with `K` spanned by words containing `I`
/// and by `v²`; `f` is the quotient map. `λ = −1` is the only value with
/// `d(h·e·v) = 0`, which a `p` with `f∘p = d` needs since `𝔤₃ = 0`.
pub struct FiniteInstance {
    pub input: TransferInput,
    /// New basis vectors in canonical coordinates `(h, e, v, z₁, z₂)`.
    pub change: Matrix,
    pub lambda: Q,
    pub actions: Vec<FiniteAction>,
}

impl TransferBackend for FiniteInstance {
    fn name(&self) -> &str {
        "finite"
    }

    fn input(&self) -> &TransferInput {
        &self.input
    }
}

const CANON: [(&str, i64); 5] = [("h", 1), ("e", 1), ("v", 2), ("z1", 1), ("z2", 2)];

fn canonical_nu(lambda: &Q) -> Result<GradedMultiMap> {
    let space = GradedSpaceFD::new(CANON.iter().map(|(l, d)| (l.to_string(), *d)).collect())?;
    let mut nu = GradedMultiMap::zero(space.clone(), space.clone(), 2, 1, -1);
    nu.add(vec![0, 1], vec![1], q(1))?;
    nu.add(vec![1, 0], vec![1], q(-1))?;
    nu.add(vec![0, 2], vec![2], lambda.clone())?;
    nu.add(vec![2, 0], vec![2], lambda.clone())?;
    Ok(nu)
}

impl FiniteInstance {
    pub fn random(seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed, "transfer-finite");
        let lambda: Q = q(-1);
        let mut change = Matrix::identity(5);
        loop {
            let block: Vec<Q> = (0..4).map(|_| crate::random::pool_coeff(&mut rng)).collect();
            if &block[0] * &block[3] - &block[1] * &block[2] != Q::zero() {
                change.data[0][0] = block[0].clone();
                change.data[0][1] = block[1].clone();
                change.data[1][0] = block[2].clone();
                change.data[1][1] = block[3].clone();
                break;
            }
        }
        for i in 2..5 {
            change.data[i][i] = pool_nonzero(&mut rng);
        }
        let inv = inverse(&change).expect("invertible by construction");
        let canon = canonical_nu(&lambda)?;
        let labels = ["h'", "e'", "v'", "z1'", "z2'"];
        let space = GradedSpaceFD::new(labels.iter().zip(CANON).map(|(l, (_, d))| (l.to_string(), d)).collect())?;
        let to_canon = |k: usize| Vector::from_dense(CANON[k].1, &change.column(k));
        let from_canon = |v: &Vector| inv.apply(&v.dense(5));
        let mut nu = GradedMultiMap::zero(space.clone(), space.clone(), 2, 1, -1);
        for a in 0..5 {
            for b in 0..5 {
                if let Some(v) = apply_map(&canon, &[to_canon(a), to_canon(b)]) {
                    for (o, c) in from_canon(&v).into_iter().enumerate() {
                        nu.add(vec![a, b], vec![o], c)?;
                    }
                }
            }
        }
        let glie = LInftyPresentation::new(space.clone(), BTreeMap::from([(2, nu)]), 4)?;
        let m = 3;
        let c = ce_codifferential(&glie, m)?;
        let words = ce_bases(&space, m);
        let killed = |w: &Vec<usize>| w.iter().any(|&b| b >= 3) || w == &vec![2, 2];
        let keep: Vec<Vec<usize>> = words.iter().map(|ws| (0..ws.len()).filter(|&i| !killed(&ws[i])).collect()).collect();
        let fmaps: Vec<Matrix> = (0..=m)
            .map(|n| {
                let mut f = Matrix::zeros(keep[n].len(), words[n].len());
                for (r, &i) in keep[n].iter().enumerate() {
                    f.data[r][i] = Q::one();
                }
                f
            })
            .collect();
        let diffs: Vec<Matrix> = (0..m)
            .map(|n| {
                let full = fmaps[n + 1].mul(&c.d(n));
                Matrix::from_columns(keep[n + 1].len(), &keep[n].iter().map(|&i| full.column(i)).collect::<Vec<_>>())
            })
            .collect();
        let dl: Vec<Vec<String>> = keep.iter().zip(&c.labels).map(|(k, l)| k.iter().map(|&i| format!("[{}]", l[i])).collect()).collect();
        let d = CochainComplexFD::new(dl, diffs)?;
        d.check_d_squared()?;
        let input = TransferInput::new(glie, m, d, CochainMapFD { maps: fmaps })?;
        let actions = Self::actions(&input, &inv)?;
        Ok(FiniteInstance { input, change, lambda, actions })
    }

    /// Indices of the central generators `z₁', z₂'`, which `f` kills.
    pub fn central(&self) -> Vec<usize> {
        vec![3, 4]
    }

    /// The three shipped sources: Lie[1], graded with `l₁ = 0`, and with `l₁ ≠ 0`.
    /// Degree-one letters map into `span(e)` and degree-two letters into `span(v)`,
    /// the exact part of `D` in those degrees.
    fn actions(input: &TransferInput, inv: &Matrix) -> Result<Vec<FiniteAction>> {
        let g = &input.glie.space;
        let image = |canon: usize| -> Vec<Q> { inv.column(canon) };
        let strict = |src: &GradedSpaceFD, imgs: &[(usize, usize)]| -> Result<GradedMultiMap> {
            let mut a = GradedMultiMap::zero(src.clone(), g.clone(), 1, 1, 0);
            for &(s, canon) in imgs {
                for (o, c) in image(canon).into_iter().enumerate() {
                    a.add(vec![s], vec![o], c)?;
                }
            }
            Ok(a)
        };
        let lie1 = GradedSpaceFD::new(vec![("x".into(), 1)])?;
        let graded = GradedSpaceFD::new(vec![("x".into(), 1), ("y".into(), 2), ("y2".into(), 2)])?;
        // l₂(x, y) = y₂ with y₂ ↦ 0 gives h room to absorb the non-exact e·v.
        let mut l2 = GradedMultiMap::zero(graded.clone(), graded.clone(), 2, 1, -1);
        l2.add(vec![0, 1], vec![2], q(1))?;
        l2.add(vec![1, 0], vec![2], q(1))?;
        // The graded source plus an acyclic pair l₁(w) = u in the kernel of a₁.
        let withl1 = GradedSpaceFD::new(vec![
            ("x".into(), 1),
            ("y".into(), 2),
            ("y2".into(), 2),
            ("u".into(), 1),
            ("w".into(), 2),
        ])?;
        let mut l1 = GradedMultiMap::zero(withl1.clone(), withl1.clone(), 1, 1, -1);
        l1.add(vec![4], vec![3], q(1))?;
        let mut l2b = GradedMultiMap::zero(withl1.clone(), withl1.clone(), 2, 1, -1);
        l2b.add(vec![0, 1], vec![2], q(1))?;
        l2b.add(vec![1, 0], vec![2], q(1))?;
        Ok(vec![
            FiniteAction { name: "lie1".into(), source: LInftyPresentation::abelian(lie1.clone(), 4)?, a1: strict(&lie1, &[(0, 1)])? },
            FiniteAction { name: "graded".into(), source: LInftyPresentation::new(graded.clone(), BTreeMap::from([(2, l2)]), 4)?, a1: strict(&graded, &[(0, 1), (1, 2)])? },
            FiniteAction {
                name: "l1".into(),
                source: LInftyPresentation::new(withl1.clone(), BTreeMap::from([(1, l1), (2, l2b)]), 4)?,
                a1: strict(&withl1, &[(0, 1), (1, 2)])?,
            },
        ])
    }
}

/// Weight-zero fields on `(ℝ³, vol)`, `m = 2`, with weights `x = +1`, `∂ = −1`, `dx = +1`:
/// `𝔤₁` = linear divergence-free vector fields, `𝔤₂` = quadratic bivectors
/// with closed image, `D^n` = weight-3 `n`-forms and `f = ω̃`.
pub struct GeometricInstance {
    pub ms: PreMS,
    pub input: TransferInput,
    pub fields: Vec<MultiVector>,
    pub forms: Vec<Vec<Form>>,
}

impl TransferBackend for GeometricInstance {
    fn name(&self) -> &str {
        "geometric"
    }

    fn input(&self) -> &TransferInput {
        &self.input
    }
}

fn coords_in(basis_index: &BTreeMap<(Mask, Exponent), usize>, len: usize, f: &Form) -> Result<Vec<Q>> {
    let mut out = vec![Q::zero(); len];
    for (key, c) in flatten(f) {
        let i = *basis_index.get(&key).ok_or_else(|| Error::Hypothesis("form outside the weight-3 sample".into()))?;
        out[i] = c;
    }
    Ok(out)
}

impl GeometricInstance {
    pub fn new() -> Result<Self> {
        let ms = PreMS::volume(3);
        let (dim, m) = (3, 2);
        let var = |i| RationalPoly::var(dim, i);
        let mut fields = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    fields.push(MultiVector::term(dim, &[i], var(j)));
                }
            }
        }
        for i in 0..2 {
            let a = MultiVector::term(dim, &[i], var(i));
            let b = MultiVector::term(dim, &[i + 1], var(i + 1));
            fields.push(a.sub(&b));
        }
        let mut forms: Vec<Vec<Form>> = Vec::new();
        for n in 0..=m {
            let mut basis = Vec::new();
            let mut sets = Vec::new();
            for_each_combination(dim, n, &mut |c| sets.push(c.to_vec()));
            for s in &sets {
                for e in monomials(dim, 3 - n as u32) {
                    basis.push(Form::term(dim, s, RationalPoly::monomial(e, Q::one())));
                }
            }
            forms.push(basis);
        }
        for cubic in &forms[0] {
            let x = hamiltonian_field(&ms, &exterior_d(cubic))?.ok_or_else(|| Error::Hypothesis("exact form without field".into()))?;
            fields.push(x);
        }
        let labels: Vec<(String, i64)> = fields.iter().map(|x| (x.to_string(), x.degree() as i64)).collect();
        let space = GradedSpaceFD::new(labels)?;
        let field_index: Vec<BTreeMap<(Mask, Exponent), usize>> = Vec::new();
        let _ = field_index;
        // ν in the sampled basis, truncated to degrees ≤ m.
        let mut nu = GradedMultiMap::zero(space.clone(), space.clone(), 2, 1, -1);
        for a in 0..fields.len() {
            for b in 0..fields.len() {
                let deg = fields[a].degree() + fields[b].degree() - 1;
                if deg > m {
                    continue;
                }
                let val = schouten(&fields[a], &fields[b])?;
                if val.is_zero() {
                    continue;
                }
                let idx: Vec<usize> = (0..fields.len()).filter(|&i| fields[i].degree() == deg).collect();
                let rows: BTreeMap<(Mask, Exponent), usize> = idx
                    .iter()
                    .flat_map(|&i| flatten(&fields[i]).into_keys())
                    .chain(flatten(&val).into_keys())
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .enumerate()
                    .map(|(r, k)| (k, r))
                    .collect();
                let col = |x: &MultiVector| {
                    let mut v = vec![Q::zero(); rows.len()];
                    for (k, c) in flatten(x) {
                        v[rows[&k]] = c;
                    }
                    v
                };
                let mat = Matrix::from_columns(rows.len(), &idx.iter().map(|&i| col(&fields[i])).collect::<Vec<_>>());
                let sol = solve(&mat, &col(&val)).ok_or_else(|| Error::Hypothesis("sample not closed under ν".into()))?;
                for (&i, c) in idx.iter().zip(sol) {
                    nu.add(vec![a, b], vec![i], c)?;
                }
            }
        }
        let glie = LInftyPresentation::new(space.clone(), BTreeMap::from([(2, nu)]), 4)?;
        let form_index: Vec<BTreeMap<(Mask, Exponent), usize>> =
            forms.iter().map(|b| b.iter().enumerate().map(|(i, f)| (flatten(f).into_keys().next().expect("monomial"), i)).collect()).collect();
        let labels: Vec<Vec<String>> = forms.iter().map(|b| b.iter().map(|f| f.to_string()).collect()).collect();
        let diffs: Vec<Matrix> = (0..m)
            .map(|n| {
                let cols: Result<Vec<Vec<Q>>> = forms[n].iter().map(|f| coords_in(&form_index[n + 1], forms[n + 1].len(), &exterior_d(f))).collect();
                Ok(Matrix::from_columns(forms[n + 1].len(), &cols?))
            })
            .collect::<Result<_>>()?;
        let d = CochainComplexFD::new(labels, diffs)?;
        let words = ce_bases(&space, m);
        let fmaps: Vec<Matrix> = (0..=m)
            .map(|n| {
                let cols: Result<Vec<Vec<Q>>> = words[n]
                    .iter()
                    .map(|w| {
                        let ws: Vec<MultiVector> = w.iter().map(|&b| fields[b].clone()).collect();
                        coords_in(&form_index[n], forms[n].len(), &contract(&wedge_all(dim, &ws)?, &ms.omega)?)
                    })
                    .collect();
                Ok(Matrix::from_columns(forms[n].len(), &cols?))
            })
            .collect::<Result<_>>()?;
        let input = TransferInput::new(glie, m, d, CochainMapFD { maps: fmaps })?;
        Ok(GeometricInstance { ms, input, fields, forms })
    }

    pub fn form(&self, n: usize, coords: &[Q]) -> Form {
        let mut out = Form::zero(self.ms.dim, n);
        for (c, f) in coords.iter().zip(&self.forms[n]) {
            out.add_assign_scaled(f, c);
        }
        out
    }

    pub fn field(&self, v: &Vector) -> MultiVector {
        let mut out = MultiVector::zero(self.ms.dim, v.degree.max(0) as usize);
        for (b, c) in &v.coeffs {
            out.add_assign_scaled(&self.fields[*b], c);
        }
        out
    }

    /// Tuples (all singletons, then horizontal-degree-one words of arity 2 and 3)
    /// on which the `Q` brackets differ from `xi_bracket` on the sampled forms.
    pub fn xi_mismatches(&self, q: &QAlgebra) -> Result<Vec<String>> {
        use crate::msgeo::{xi_bracket, XiElement};
        let m = self.input.m;
        let xi = |b: usize| {
            let e = &q.elems[b];
            XiElement { hdeg: e.hdeg, vdeg: e.vdeg, form: self.form(QAlgebra::form_degree(m, e.hdeg, e.vdeg), &e.form), field: None }
        };
        let ones: Vec<usize> = (0..q.elems.len()).filter(|&b| q.elems[b].hdeg == 1).collect();
        let mut tuples: Vec<Vec<usize>> = (0..q.elems.len()).map(|b| vec![b]).collect();
        for k in 2..=3 {
            tuples.extend(multisets(ones.len(), k).into_iter().map(|t| t.iter().map(|&i| ones[i]).collect()));
        }
        let mut bad = Vec::new();
        for t in tuples {
            let args: Vec<Vector> = t.iter().map(|&b| q.presentation.basis_vector(b)).collect();
            let ours = q.presentation.bracket(&args)?.filter(|v| !v.is_zero());
            let theirs = xi_bracket(&self.ms, &t.iter().map(|&b| xi(b)).collect::<Vec<_>>())?.filter(|e| !e.form.is_zero());
            let same = match (ours, theirs) {
                (None, None) => true,
                (Some(v), Some(e)) => {
                    let b0 = *v.coeffs.keys().next().expect("nonzero");
                    let (i, j) = (q.elems[b0].hdeg, q.elems[b0].vdeg);
                    (i, j) == (e.hdeg, e.vdeg) && self.form(QAlgebra::form_degree(m, i, j), &q.form_of(&v)) == e.form
                }
                _ => false,
            };
            if !same {
                bad.push(format!("{t:?}"));
            }
        }
        Ok(bad)
    }
}

fn monomials(dim: usize, deg: u32) -> Vec<Exponent> {
    fn rec(dim: usize, left: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if cur.len() + 1 == dim {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, deg, &mut Vec::new(), &mut out);
    out
}

/// Random map in a random small complex, for cross-checking the subcomplex.
pub fn random_complex_and_map(seed: u64) -> Result<(CochainComplexFD, CochainComplexFD, CochainMapFD)> {
    let mut rng = rng_for(seed, "transfer-random-complex");
    let dims_c = [2usize, 3, 2];
    let dims_d = [2usize, 3, 2];
    // C with d^1∘d^0 = 0: d^0 of rank 1 into ker d^1.
    let rand_mat = |rng: &mut crate::random::Rng64, r: usize, c: usize| {
        let mut m = Matrix::zeros(r, c);
        for row in &mut m.data {
            for x in row.iter_mut() {
                *x = crate::random::pool_coeff(rng);
            }
        }
        m
    };
    let build = |rng: &mut crate::random::Rng64, dims: &[usize; 3]| -> Result<CochainComplexFD> {
        let d1 = rand_mat(rng, dims[2], dims[1]);
        let ker = kernel(&d1);
        let mut d0 = Matrix::zeros(dims[1], dims[0]);
        if let Some(kv) = ker.first() {
            for c in 0..dims[0] {
                let s: Q = crate::random::pool_coeff(rng);
                for r in 0..dims[1] {
                    d0.data[r][c] = &kv[r] * &s;
                }
            }
        }
        let labels = dims.iter().enumerate().map(|(n, &k)| (0..k).map(|i| format!("c{n}_{i}")).collect()).collect();
        CochainComplexFD::new(labels, vec![d0, d1])
    };
    let c = build(&mut rng, &dims_c)?;
    let d = build(&mut rng, &dims_d)?;
    // A cochain map: f = d∘s + s∘d for random s of degree −1 is always a cochain map.
    let s1 = rand_mat(&mut rng, dims_d[0], dims_c[1]);
    let s2 = rand_mat(&mut rng, dims_d[1], dims_c[2]);
    let f0 = s1.mul(&c.d(0));
    let f1 = d.d(0).mul(&s1).add(&s2.mul(&c.d(1)));
    let f2 = d.d(1).mul(&s2);
    let _ = rng.gen::<u8>();
    Ok((c, d, CochainMapFD { maps: vec![f0, f1, f2] }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::check_jacobi;

    #[test]
    fn subcomplex_examples() {
        let (c, d, f) = random_complex_and_map(4).unwrap();
        f.check(&c, &d).unwrap();
        let sub = hamiltonian_subcomplex(&d, &f);
        for n in 0..=2 {
            // Brute force: α ∈ D^f iff dα ∈ im f, tested on the unit vectors and basis sums.
            let fm = f.maps.get(n + 1).cloned().unwrap_or_else(|| Matrix::zeros(d.dim(n + 1), 0));
            for b in &sub.basis[n] {
                assert!(solve(&fm, &d.d(n).apply(b)).is_some());
            }
            let inc = sub.inclusion(&d, n);
            for r in 0..d.dim(n) {
                let mut e = vec![Q::zero(); d.dim(n)];
                e[r] = Q::one();
                let member = solve(&fm, &d.d(n).apply(&e)).is_some();
                assert_eq!(member, solve(&inc, &e).is_some());
            }
        }
        let zero = CochainMapFD { maps: (0..=2).map(|n| Matrix::zeros(d.dim(n), c.dim(n))).collect() };
        let sub0 = hamiltonian_subcomplex(&d, &zero);
        for n in 0..=2 {
            assert_eq!(sub0.basis[n].len(), kernel(&d.d(n)).len());
        }
    }

    #[test]
    fn finite_instance_transfer() {
        let inst = FiniteInstance::random(42).unwrap();
        let input = &inst.input;
        let sub = hamiltonian_subcomplex(&input.d, &input.f);
        let p = construct_p(input, &sub).unwrap();
        for n in 0..input.m {
            for (b, v) in sub.basis[n].iter().enumerate() {
                let fp = input.f_words(&input.sym_words().product(&[p.values[n][b].clone()])).unwrap();
                let dv = input.d.d(n).apply(v);
                match fp {
                    Some((_, x)) => assert_eq!(x, dv),
                    None => assert!(is_zero_vec(&dv)),
                }
            }
        }
        for pairs in [false, true] {
            let q = build_q(input, &sub, &p, pairs).unwrap();
            for n in 1..=4 {
                assert!(check_jacobi(&q.presentation, n).unwrap().is_zero(), "J({n}) pairs={pairs}");
            }
            assert!(to_g_defect_free(input, &q, 3).unwrap());
            assert!(q.presentation.brackets.contains_key(&2), "q₂ is nonzero");
            let (base, _) = q.base_row().unwrap();
            for n in 1..=4 {
                assert!(check_jacobi(&base, n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn brackets_do_not_depend_on_p() {
        let inst = FiniteInstance::random(7).unwrap();
        let input = &inst.input;
        let sub = hamiltonian_subcomplex(&input.d, &input.f);
        let p = construct_p(input, &sub).unwrap();
        let p2 = shift_p_by_central(input, &sub, &p, &inst.central());
        assert_ne!(p, p2);
        let a = build_q(input, &sub, &p, false).unwrap();
        let b = build_q(input, &sub, &p2, false).unwrap();
        assert_eq!(a.presentation.brackets, b.presentation.brackets);
    }

    #[test]
    fn unsolvable_p() {
        let inst = FiniteInstance::random(1).unwrap();
        let mut input = inst.input.clone();
        for f in &mut input.f.maps {
            *f = Matrix::zeros(f.rows, f.cols);
        }
        let sub = Subcomplex { basis: (0..=input.m).map(|n| (0..input.d.dim(n)).map(|r| { let mut e = vec![Q::zero(); input.d.dim(n)]; e[r] = Q::one(); e }).collect()).collect() };
        assert!(matches!(construct_p(&input, &sub), Err(Error::Unsolvable(_))));
    }

    #[test]
    fn generator_condition_alone_is_not_enough() {
        let inst = FiniteInstance::random(42).unwrap();
        let input = &inst.input;
        let sub = hamiltonian_subcomplex(&input.d, &input.f);
        let p = construct_p(input, &sub).unwrap();
        let qa = build_q(input, &sub, &p, false).unwrap();
        let space = GradedSpaceFD::new(vec![("u".into(), 1), ("x".into(), 1), ("w".into(), 2)]).unwrap();
        let mut l1 = GradedMultiMap::zero(space.clone(), space.clone(), 1, 1, -1);
        l1.add(vec![2], vec![0], q(1)).unwrap();
        let mut a1 = GradedMultiMap::zero(space.clone(), input.glie.space.clone(), 1, 1, 0);
        let inv = inverse(&inst.change).unwrap();
        for (s, canon) in [(1, 1), (2, 2)] {
            for (o, c) in inv.column(canon).into_iter().enumerate() {
                a1.add(vec![s], vec![o], c).unwrap();
            }
        }
        let act = FiniteAction { name: "weak".into(), source: LInftyPresentation::new(space, BTreeMap::from([(1, l1)]), 4).unwrap(), a1 };
        let sc = source_complex(input, &act).unwrap();
        let weak = solve_homotopy_with(input, &sc, false).unwrap();
        assert!(h_after(&sc, &weak.h, false).is_empty());
        assert!(matches!(solve_homotopy(input, &sc), Err(Error::Unsolvable(_))));
        let err = homotopy_to_morphism(input, &qa, &act, &sc, &weak).unwrap_err();
        assert!(err.to_string().contains("h∘ê₁"), "{err}");
    }

    #[test]
    fn geometric_backend_matches_forms_algebra() {
        let inst = GeometricInstance::new().unwrap();
        let input = &inst.input;
        assert_eq!(input.glie.dim(), 18);
        let sub = hamiltonian_subcomplex(&input.d, &input.f);
        let p = construct_p(input, &sub).unwrap();
        for n in 0..input.m {
            for (b, v) in sub.basis[n].iter().enumerate() {
                let beta = exterior_d(&inst.form(n, v));
                let expect = hamiltonian_field(&inst.ms, &beta).unwrap().unwrap_or_else(|| MultiVector::zero(3, input.m - n));
                assert_eq!(inst.field(&p.values[n][b]), expect);
            }
        }
        let q = build_q(input, &sub, &p, false).unwrap();
        assert_eq!(q.elems.len(), 38);
        assert_eq!(inst.xi_mismatches(&q).unwrap(), Vec::<String>::new());
        for n in 1..=4 {
            assert!(check_jacobi(&q.presentation, n).unwrap().is_zero(), "J({n})");
        }
        assert!(to_g_defect_free(input, &q, 3).unwrap());
    }

    #[test]
    fn finite_roundtrips() {
        let inst = FiniteInstance::random(42).unwrap();
        let input = &inst.input;
        let sub = hamiltonian_subcomplex(&input.d, &input.f);
        let p = construct_p(input, &sub).unwrap();
        let q = build_q(input, &sub, &p, false).unwrap();
        let qt = build_q(input, &sub, &p, true).unwrap();
        for act in &inst.actions {
            let r = roundtrip_check(input, &q, &qt, act, "finite", 3).unwrap();
            assert!(r.morphism_q && r.morphism_q_tilde && r.synchronized, "{r:?}");
            assert!(r.homotopy_roundtrip && r.morphism_roundtrip, "{r:?}");
            assert_eq!(r.outside_witness.is_some(), act.name == "l1", "{r:?}");
        }
    }
}
