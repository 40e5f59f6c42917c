//! L∞-algebras: an element-level bracket interface shared by finite
//! presentations and geometric algebras, Jacobi and morphism defects with the
//! `1/q!` unshuffle sum, symmetric words and the Chevalley–Eilenberg
//! codifferential.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::linalg::Matrix;
use crate::multilinear::{insert, GradedMultiMap, GradedSpaceFD, Variant};
use crate::rat::{q, qsign, Q};
use crate::signs::{is_odd, koszul_sign_unchecked, unshuffles, Permutation, Sign};
use crate::transfer::CochainComplexFD;

/// Element-level access to an L∞-algebra with symmetric brackets of degree −1.
pub trait LInfty {
    type Elem: Clone;
    fn degree(&self, e: &Self::Elem) -> i64;
    /// `l_n(args)`; `None` stands for zero.
    fn bracket(&self, args: &[Self::Elem]) -> Result<Option<Self::Elem>>;
    /// `acc += c·e`.
    fn accumulate(&self, acc: &mut Option<Self::Elem>, e: &Self::Elem, c: &Q) -> Result<()>;
    fn is_zero(&self, e: &Self::Elem) -> bool;
}

fn normalize<A: LInfty>(alg: &A, e: Option<A::Elem>) -> Option<A::Elem> {
    e.filter(|x| !alg.is_zero(x))
}

/// `J(n)(args) = Σ_{i+j=n+1} (l_j ⨼ l_i)(args)`; `None` when zero.
pub fn jacobi_on<A: LInfty>(alg: &A, args: &[A::Elem]) -> Result<Option<A::Elem>> {
    let n = args.len();
    let degs: Vec<i64> = args.iter().map(|a| alg.degree(a)).collect();
    let mut acc = None;
    for i in 1..=n {
        let parts: Vec<usize> = [i, n - i].into_iter().filter(|&p| p > 0).collect();
        for sigma in unshuffles(&parts) {
            let s = koszul_sign_unchecked(sigma.as_slice(), &degs);
            let v = sigma.permute(args);
            let Some(inner) = alg.bracket(&v[..i])? else { continue };
            let mut outer_args = vec![inner];
            outer_args.extend_from_slice(&v[i..]);
            if let Some(out) = alg.bracket(&outer_args)? {
                alg.accumulate(&mut acc, &out, &qsign(s))?;
            }
        }
    }
    Ok(normalize(alg, acc))
}

/// Ordered compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::one(), |a, k| a * q(k))
}

/// Defect of the L∞-morphism equation at `args`:
/// `Σ (f_j ⨼ l_i)(x) − Σ 1/q! Σ_σ ε(σ) v_q(f_{p₁}⊗…⊗f_{p_q})(σ·x)`.
pub fn morphism_defect_on<S: LInfty, T: LInfty>(
    src: &S,
    tgt: &T,
    f: &dyn Fn(&[S::Elem]) -> Result<Option<T::Elem>>,
    args: &[S::Elem],
) -> Result<Option<T::Elem>> {
    let n = args.len();
    let degs: Vec<i64> = args.iter().map(|a| src.degree(a)).collect();
    let mut acc = None;
    for i in 1..=n {
        let parts: Vec<usize> = [i, n - i].into_iter().filter(|&p| p > 0).collect();
        for sigma in unshuffles(&parts) {
            let s = koszul_sign_unchecked(sigma.as_slice(), &degs);
            let v = sigma.permute(args);
            let Some(inner) = src.bracket(&v[..i])? else { continue };
            let mut outer = vec![inner];
            outer.extend_from_slice(&v[i..]);
            if let Some(out) = f(&outer)? {
                tgt.accumulate(&mut acc, &out, &qsign(s))?;
            }
        }
    }
    for parts in compositions(n) {
        let scale = -factorial(parts.len()).recip();
        'sigma: for sigma in unshuffles(&parts) {
            let s = koszul_sign_unchecked(sigma.as_slice(), &degs);
            let v = sigma.permute(args);
            let mut outs = Vec::with_capacity(parts.len());
            let mut off = 0;
            for &p in &parts {
                match f(&v[off..off + p])? {
                    Some(o) => outs.push(o),
                    None => continue 'sigma,
                }
                off += p;
            }
            if let Some(out) = tgt.bracket(&outs)? {
                tgt.accumulate(&mut acc, &out, &(qsign(s) * &scale))?;
            }
        }
    }
    Ok(normalize(tgt, acc))
}

/// Homogeneous vector in a finite presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub degree: i64,
    pub coeffs: BTreeMap<usize, Q>,
}

impl Vector {
    pub fn basis(space: &GradedSpaceFD, i: usize) -> Self {
        Vector { degree: space.degree(i), coeffs: BTreeMap::from([(i, Q::one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Vector, c: &Q) {
        for (k, v) in &other.coeffs {
            let e = self.coeffs.entry(*k).or_insert_with(Q::zero);
            *e += v * c;
            if e.is_zero() {
                self.coeffs.remove(k);
            }
        }
    }

    /// Dense coordinates in a space of dimension `dim`.
    pub fn dense(&self, dim: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); dim];
        for (k, v) in &self.coeffs {
            out[*k] = v.clone();
        }
        out
    }

    pub fn from_dense(degree: i64, v: &[Q]) -> Self {
        Vector { degree, coeffs: v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect() }
    }
}

/// Applies a multilinear map with a single output to vectors, expanding over supports.
pub fn apply_map(map: &GradedMultiMap, args: &[Vector]) -> Option<Vector> {
    let degree = args.iter().map(|a| a.degree).sum::<i64>() + map.degree;
    let mut out = Vector { degree, coeffs: BTreeMap::new() };
    let supports: Vec<Vec<(usize, &Q)>> = args.iter().map(|a| a.coeffs.iter().map(|(k, v)| (*k, v)).collect()).collect();
    let mut idx = vec![0usize; args.len()];
    if supports.iter().any(Vec::is_empty) {
        return None;
    }
    loop {
        let tuple: Vec<usize> = idx.iter().zip(&supports).map(|(&i, s)| s[i].0).collect();
        let img = map.eval(&tuple);
        if !img.is_empty() {
            let c: Q = idx.iter().zip(&supports).fold(Q::one(), |a, (&i, s)| a * s[i].1);
            for (o, d) in img {
                let e = out.coeffs.entry(o[0]).or_insert_with(Q::zero);
                *e += &c * d;
                if e.is_zero() {
                    out.coeffs.remove(&o[0]);
                }
            }
        }
        let mut k = args.len();
        loop {
            if k == 0 {
                return if out.is_zero() { None } else { Some(out) };
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < supports[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Finite L∞-algebra: labelled graded basis and bracket tables up to `max_arity`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LInftyPresentation {
    pub space: GradedSpaceFD,
    pub brackets: BTreeMap<usize, GradedMultiMap>,
    pub max_arity: usize,
}

impl LInftyPresentation {
    /// Validates degrees, arities and symmetry of the bracket tables.
    pub fn new(space: GradedSpaceFD, brackets: BTreeMap<usize, GradedMultiMap>, max_arity: usize) -> Result<Self> {
        if space.basis.iter().any(|b| b.degree < 1) {
            return arg("an L∞-algebra is concentrated in positive degrees");
        }
        for (&n, l) in &brackets {
            if n == 0 || n > max_arity {
                return Err(Error::ArityBound(n, max_arity));
            }
            if l.arity_in != n || l.arity_out != 1 || l.degree != -1 || l.source != space || l.target != space {
                return arg(format!("bracket l_{n} has the wrong shape"));
            }
            if !l.is_symmetric() {
                return arg(format!("bracket l_{n} is not symmetric"));
            }
        }
        let brackets = brackets.into_iter().filter(|(_, l)| !l.is_zero()).collect();
        Ok(LInftyPresentation { space, brackets, max_arity })
    }

    pub fn abelian(space: GradedSpaceFD, max_arity: usize) -> Result<Self> {
        Self::new(space, BTreeMap::new(), max_arity)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn bracket_map(&self, n: usize) -> GradedMultiMap {
        self.brackets.get(&n).cloned().unwrap_or_else(|| GradedMultiMap::zero(self.space.clone(), self.space.clone(), n, 1, -1))
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        Vector::basis(&self.space, i)
    }
}

impl LInfty for LInftyPresentation {
    type Elem = Vector;

    fn degree(&self, e: &Vector) -> i64 {
        e.degree
    }

    fn bracket(&self, args: &[Vector]) -> Result<Option<Vector>> {
        if args.len() > self.max_arity {
            return Err(Error::ArityBound(args.len(), self.max_arity));
        }
        Ok(self.brackets.get(&args.len()).and_then(|m| apply_map(m, args)))
    }

    fn accumulate(&self, acc: &mut Option<Vector>, e: &Vector, c: &Q) -> Result<()> {
        match acc {
            None => {
                let mut v = Vector { degree: e.degree, coeffs: BTreeMap::new() };
                v.add_scaled(e, c);
                *acc = Some(v);
            }
            Some(a) => {
                if a.degree != e.degree && !e.is_zero() && !a.is_zero() {
                    return arg("adding vectors of different degrees");
                }
                a.add_scaled(e, c);
            }
        }
        Ok(())
    }

    fn is_zero(&self, e: &Vector) -> bool {
        e.is_zero()
    }
}

/// Nondecreasing index tuples of length `n` over `dim` elements.
pub fn multisets(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(dim: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, n, i, cur, out);
            cur.pop();
        }
    }
    rec(dim, n, 0, &mut cur, &mut out);
    out
}

/// Distinct orderings `t` of a sorted tuple with the permutation `σ` such that `t_σ` is sorted.
fn orderings(sorted: &[usize]) -> Vec<(Vec<usize>, Permutation)> {
    let n = sorted.len();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for p in Permutation::all(n) {
        let t = p.permute(sorted);
        if seen.insert(t.clone()) {
            out.push((t, p.inverse()));
        }
    }
    out
}

/// Fills a symmetric map from its values on sorted tuples.
pub fn symmetric_completion(
    space_in: &GradedSpaceFD,
    target: &GradedSpaceFD,
    arity: usize,
    degree: i64,
    values: &BTreeMap<Vec<usize>, Vector>,
) -> Result<GradedMultiMap> {
    let mut out = GradedMultiMap::zero(space_in.clone(), target.clone(), arity, 1, degree);
    for (sorted, val) in values {
        for (t, sigma) in orderings(sorted) {
            let s = koszul_sign_unchecked(sigma.as_slice(), &space_in.degrees_of(&t));
            for (o, c) in &val.coeffs {
                out.add(t.clone(), vec![*o], c * qsign(s))?;
            }
        }
    }
    Ok(out)
}

/// Whether a sorted tuple repeats an odd basis element (and so is zero in `S^•`).
pub fn repeats_odd(space: &GradedSpaceFD, sorted: &[usize]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1] && is_odd(space.degree(w[0])))
}

/// `J(n)` as a symmetric map, evaluated on sorted basis tuples and completed by symmetry.
pub fn check_jacobi(l: &LInftyPresentation, n: usize) -> Result<GradedMultiMap> {
    if n == 0 || n > l.max_arity {
        return Err(Error::ArityBound(n, l.max_arity));
    }
    let mut values = BTreeMap::new();
    for t in multisets(l.dim(), n) {
        if repeats_odd(&l.space, &t) {
            continue;
        }
        let args: Vec<Vector> = t.iter().map(|&i| l.basis_vector(i)).collect();
        if let Some(v) = jacobi_on(l, &args)? {
            values.insert(t, v);
        }
    }
    symmetric_completion(&l.space, &l.space, n, -2, &values)
}

/// `J(n)` through the insertion operator of the multilinear calculus; used as a cross-check.
pub fn check_jacobi_by_insertion(l: &LInftyPresentation, n: usize) -> Result<GradedMultiMap> {
    if n == 0 || n > l.max_arity {
        return Err(Error::ArityBound(n, l.max_arity));
    }
    let mut out = GradedMultiMap::zero(l.space.clone(), l.space.clone(), n, 1, -2);
    for i in 1..=n {
        let term = insert(&l.bracket_map(n + 1 - i), &l.bracket_map(i), Variant::Sym)?;
        out = out.add_scaled(&term, &Q::one())?;
    }
    Ok(out)
}

/// Components `f_k: S^k L → V` of an L∞-morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LInftyMorphismFD {
    pub components: BTreeMap<usize, GradedMultiMap>,
}

impl LInftyMorphismFD {
    pub fn new(components: BTreeMap<usize, GradedMultiMap>) -> Result<Self> {
        for (&k, f) in &components {
            if f.arity_in != k || f.arity_out != 1 || f.degree != 0 {
                return arg(format!("component f_{k} has the wrong shape"));
            }
            if !f.is_symmetric() {
                return arg(format!("component f_{k} is not symmetric"));
            }
        }
        Ok(LInftyMorphismFD { components: components.into_iter().filter(|(_, f)| !f.is_zero()).collect() })
    }

    pub fn strict(f1: GradedMultiMap) -> Result<Self> {
        Self::new(BTreeMap::from([(1, f1)]))
    }

    pub fn apply(&self, args: &[Vector]) -> Option<Vector> {
        self.components.get(&args.len()).and_then(|m| apply_map(m, args))
    }
}

/// Defect of the morphism equation at arity `n` as a symmetric map `S^n L → V`.
pub fn check_morphism(f: &LInftyMorphismFD, l: &LInftyPresentation, v: &LInftyPresentation, n: usize) -> Result<GradedMultiMap> {
    if n == 0 || n > l.max_arity || n > v.max_arity {
        return Err(Error::ArityBound(n, l.max_arity.min(v.max_arity)));
    }
    let comp = |args: &[Vector]| -> Result<Option<Vector>> { Ok(f.apply(args)) };
    let mut values = BTreeMap::new();
    for t in multisets(l.dim(), n) {
        if repeats_odd(&l.space, &t) {
            continue;
        }
        let args: Vec<Vector> = t.iter().map(|&i| l.basis_vector(i)).collect();
        if let Some(d) = morphism_defect_on(l, v, &comp, &args)? {
            values.insert(t, d);
        }
    }
    symmetric_completion(&l.space, &v.space, n, -1, &values)
}

/// Auxiliary grading of a target basis, one index per basis element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraGrading {
    pub index: Vec<i64>,
}

pub fn is_strict(f: &LInftyMorphismFD) -> bool {
    f.components.keys().all(|&k| k == 1)
}

/// `f_n(L^{⊗n}) ⊂ U_n` for every component.
pub fn is_synchronized(f: &LInftyMorphismFD, g: &ExtraGrading) -> bool {
    f.components.iter().all(|(&n, m)| {
        m.entries().values().all(|img| img.keys().all(|o| g.index.get(o[0]) == Some(&(n as i64))))
    })
}

/// Symmetric multilinear map on a finite presentation with values in an
/// arbitrary algebra, tabulated on sorted basis words (missing words are zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordMap<T> {
    pub space: GradedSpaceFD,
    pub values: BTreeMap<Vec<usize>, T>,
}

impl<T: Clone> WordMap<T> {
    pub fn new(space: GradedSpaceFD) -> Self {
        WordMap { space, values: BTreeMap::new() }
    }

    /// Arities with a stored value.
    pub fn arities(&self) -> std::collections::BTreeSet<usize> {
        self.values.keys().map(Vec::len).collect()
    }

    /// Evaluates on vectors by multilinearity and Koszul symmetry.
    pub fn eval<A: LInfty<Elem = T>>(&self, alg: &A, args: &[Vector]) -> Result<Option<T>> {
        let words = SymWords::new(self.space.clone());
        let mut acc = None;
        for (w, c) in words.product(args) {
            if let Some(v) = self.values.get(&w) {
                alg.accumulate(&mut acc, v, &c)?;
            }
        }
        Ok(normalize(alg, acc))
    }
}

/// Morphism defect of `f` at every sorted basis word of arity `n`; returns the nonzero ones.
pub fn word_map_defects<T: LInfty>(
    src: &LInftyPresentation,
    tgt: &T,
    f: &WordMap<T::Elem>,
    n: usize,
) -> Result<Vec<(Vec<usize>, T::Elem)>> {
    if n == 0 || n > src.max_arity {
        return Err(Error::ArityBound(n, src.max_arity));
    }
    let comp = |args: &[Vector]| f.eval(tgt, args);
    let mut out = Vec::new();
    for t in multisets(src.dim(), n) {
        if repeats_odd(&src.space, &t) {
            continue;
        }
        let args: Vec<Vector> = t.iter().map(|&i| src.basis_vector(i)).collect();
        if let Some(d) = morphism_defect_on(src, tgt, &comp, &args)? {
            out.push((t, d));
        }
    }
    Ok(out)
}

/// Basis of `S^•V` by sorted words, with the Koszul normalization `v = ε(σ;v)·v_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymWords {
    pub space: GradedSpaceFD,
}

impl SymWords {
    pub fn new(space: GradedSpaceFD) -> Self {
        SymWords { space }
    }

    /// Sorts a tuple into a basis word; `None` if it vanishes.
    pub fn canonical(&self, t: &[usize]) -> Option<(Sign, Vec<usize>)> {
        let mut order: Vec<usize> = (0..t.len()).collect();
        order.sort_by_key(|&k| t[k]);
        let sorted: Vec<usize> = order.iter().map(|&k| t[k]).collect();
        if repeats_odd(&self.space, &sorted) {
            return None;
        }
        let s = koszul_sign_unchecked(&order, &self.space.degrees_of(t));
        Some((s, sorted))
    }

    /// Sorted words of positive length with total degree `deg` (positive grading assumed).
    pub fn words_of_degree(&self, deg: i64) -> Vec<Vec<usize>> {
        let dim = self.space.dim();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(ws: &SymWords, dim: usize, left: i64, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 && !cur.is_empty() {
                out.push(cur.clone());
                return;
            }
            for i in start..dim {
                let d = ws.space.degree(i);
                if d <= 0 || d > left {
                    continue;
                }
                if cur.last() == Some(&i) && is_odd(d) {
                    continue;
                }
                cur.push(i);
                rec(ws, dim, left - d, i, cur, out);
                cur.pop();
            }
        }
        if deg > 0 {
            rec(self, dim, deg, 0, &mut cur, &mut out);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// Product of words in `S^•V` of linear combinations, given per factor.
    pub fn product(&self, factors: &[Vector]) -> BTreeMap<Vec<usize>, Q> {
        let mut out = BTreeMap::new();
        let supports: Vec<Vec<(usize, &Q)>> = factors.iter().map(|a| a.coeffs.iter().map(|(k, v)| (*k, v)).collect()).collect();
        if supports.iter().any(Vec::is_empty) {
            return out;
        }
        let mut idx = vec![0usize; factors.len()];
        loop {
            let tuple: Vec<usize> = idx.iter().zip(&supports).map(|(&i, s)| s[i].0).collect();
            if let Some((s, w)) = self.canonical(&tuple) {
                let c: Q = idx.iter().zip(&supports).fold(qsign(s), |a, (&i, s)| a * s[i].1);
                let e = out.entry(w.clone()).or_insert_with(Q::zero);
                *e += c;
                if e.is_zero() {
                    out.remove(&w);
                }
            }
            let mut k = factors.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < supports[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// `ĥl(w) = Σ_i Σ_{σ∈𝒮h(i,k−i)} ε(σ) l_i(w_σ(1..i))·w_σ(i+1..k)` on a basis word.
pub fn coderivation_on_word(l: &LInftyPresentation, words: &SymWords, w: &[usize]) -> Result<BTreeMap<Vec<usize>, Q>> {
    let k = w.len();
    let degs = l.space.degrees_of(w);
    let mut out: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    for i in 1..=k.min(l.max_arity) {
        if !l.brackets.contains_key(&i) {
            continue;
        }
        let parts: Vec<usize> = [i, k - i].into_iter().filter(|&p| p > 0).collect();
        for sigma in unshuffles(&parts) {
            let s = koszul_sign_unchecked(sigma.as_slice(), &degs);
            let v = sigma.permute(w);
            let args: Vec<Vector> = v[..i].iter().map(|&b| l.basis_vector(b)).collect();
            let Some(head) = l.bracket(&args)? else { continue };
            let mut factors = vec![head];
            factors.extend(v[i..].iter().map(|&b| l.basis_vector(b)));
            for (word, c) in words.product(&factors) {
                let e = out.entry(word.clone()).or_insert_with(Q::zero);
                *e += c * qsign(s);
                if e.is_zero() {
                    out.remove(&word);
                }
            }
        }
    }
    Ok(out)
}

/// Sorted-word bases of `C(L)^n = (S^•L)_{m+1−n}`, `n = 0..=m`.
pub fn ce_bases(space: &GradedSpaceFD, m: usize) -> Vec<Vec<Vec<usize>>> {
    let words = SymWords::new(space.clone());
    (0..=m).map(|n| words.words_of_degree(m as i64 + 1 - n as i64)).collect()
}

/// The shifted, truncated complex `C(L)^n = (S^•L)_{m+1−n}`, `n = 0..m`, with `ĥl`.
pub fn ce_codifferential(l: &LInftyPresentation, m: usize) -> Result<CochainComplexFD> {
    let words = SymWords::new(l.space.clone());
    let bases = ce_bases(&l.space, m);
    let mut diffs = Vec::new();
    for n in 0..m {
        let (src, dst) = (&bases[n], &bases[n + 1]);
        let index: BTreeMap<&Vec<usize>, usize> = dst.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut mat = Matrix::zeros(dst.len(), src.len());
        for (j, w) in src.iter().enumerate() {
            for (word, c) in coderivation_on_word(l, &words, w)? {
                let Some(&i) = index.get(&word) else {
                    return arg(format!("codifferential leaves the truncation at degree {n}"));
                };
                mat.data[i][j] += c;
            }
        }
        diffs.push(mat);
    }
    let labels = bases
        .iter()
        .map(|b| b.iter().map(|w| w.iter().map(|&i| l.space.basis[i].label.clone()).collect::<Vec<_>>().join("·")).collect())
        .collect();
    CochainComplexFD::new(labels, diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::decalage_of_map;

    /// so(3) as a Lie[1]-algebra: decalage of `[e_i, e_j] = ε_ijk e_k`.
    pub(crate) fn so3() -> LInftyPresentation {
        let v = GradedSpaceFD::new(vec![("e1".into(), 0), ("e2".into(), 0), ("e3".into(), 0)]).unwrap();
        let mut br = GradedMultiMap::zero(v.clone(), v.clone(), 2, 1, 0);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            br.add(vec![a, b], vec![c], q(1)).unwrap();
            br.add(vec![b, a], vec![c], q(-1)).unwrap();
        }
        let l2 = decalage_of_map(&br, -1).unwrap();
        LInftyPresentation::new(l2.source.clone(), BTreeMap::from([(2, l2)]), 4).unwrap()
    }

    #[test]
    fn so3_jacobi_and_corruption() {
        let l = so3();
        for n in 1..=4 {
            assert!(check_jacobi(&l, n).unwrap().is_zero());
        }
        let mut bad = l.clone();
        let mut l2 = bad.brackets[&2].clone();
        l2.add(vec![0, 1], vec![0], q(1)).unwrap();
        l2.add(vec![1, 0], vec![0], q(-1)).unwrap();
        bad.brackets.insert(2, l2);
        assert!(!check_jacobi(&bad, 3).unwrap().is_zero());
        assert_eq!(check_jacobi(&bad, 3).unwrap(), check_jacobi_by_insertion(&bad, 3).unwrap());
    }

    #[test]
    fn abelian_is_trivially_linfty() {
        let l = LInftyPresentation::abelian(GradedSpaceFD::from_degrees(&[1, 2, 2]), 3).unwrap();
        for n in 1..=3 {
            assert!(check_jacobi(&l, n).unwrap().is_zero());
        }
        assert!(check_jacobi(&l, 4).is_err(), "beyond the declared arity");
    }

    #[test]
    fn so3_codifferential() {
        let l = so3();
        let c = ce_codifferential(&l, 3).unwrap();
        // C^2 = (S L)_2 = Λ², C^3 = L; e1·e2 ↦ e3.
        let src = c.labels[2].iter().position(|s| s == "e1·e2").unwrap();
        let dst = c.labels[3].iter().position(|s| s == "e3").unwrap();
        assert_eq!(c.diffs[2].data[dst][src], q(1));
        assert!(c.check_d_squared().is_ok());
    }

    #[test]
    fn identity_morphism_and_strictness() {
        let l = so3();
        let id = LInftyMorphismFD::strict(GradedMultiMap::identity(&l.space)).unwrap();
        for n in 1..=4 {
            assert!(check_morphism(&id, &l, &l, n).unwrap().is_zero());
        }
        assert!(is_strict(&id));
        let mut f1 = GradedMultiMap::identity(&l.space);
        f1.add(vec![0], vec![1], q(1)).unwrap();
        let bad = LInftyMorphismFD::strict(f1).unwrap();
        assert!(!check_morphism(&bad, &l, &l, 2).unwrap().is_zero());
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4).len(), 8);
    }
}
