//! Finite-dimensional graded multilinear maps given by structure constants:
//! partial composition, insertion, Richardson–Nijenhuis bracket, decalage.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::rat::{qsign, Q};
use crate::signs::{decalage_sign, koszul_sign_unchecked, sign_pow, unshuffles, Permutation};

/// Formal linear combination of basis tuples.
pub type TensorVec = BTreeMap<Vec<usize>, Q>;

pub(crate) fn tv_add(acc: &mut TensorVec, key: Vec<usize>, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(key) {
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

/// Graded vector space with a finite labelled basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpaceFD {
    pub basis: Vec<BasisElem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElem {
    pub label: String,
    pub degree: i64,
}

impl GradedSpaceFD {
    pub fn new(basis: Vec<(String, i64)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (l, _) in &basis {
            if !seen.insert(l.clone()) {
                return Err(Error::Malformed(format!("duplicate basis label `{l}`")));
            }
        }
        Ok(GradedSpaceFD { basis: basis.into_iter().map(|(label, degree)| BasisElem { label, degree }).collect() })
    }

    /// Basis `e1..en` with the given degrees.
    pub fn from_degrees(degs: &[i64]) -> Self {
        GradedSpaceFD {
            basis: degs
                .iter()
                .enumerate()
                .map(|(i, &d)| BasisElem { label: format!("e{}", i + 1), degree: d })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn degrees_of(&self, tuple: &[usize]) -> Vec<i64> {
        tuple.iter().map(|&i| self.basis[i].degree).collect()
    }

    pub fn tuple_degree(&self, tuple: &[usize]) -> i64 {
        tuple.iter().map(|&i| self.basis[i].degree).sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// `V[k]` in the convention `V[k]_i = V_{i+k}`: every degree drops by `k`.
    pub fn shift(&self, k: i64) -> GradedSpaceFD {
        GradedSpaceFD {
            basis: self.basis.iter().map(|b| BasisElem { label: b.label.clone(), degree: b.degree - k }).collect(),
        }
    }

    /// All tuples of length `n` over the basis.
    pub fn tuples(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..self.dim()).map(move |i| {
                        let mut u = t.clone();
                        u.push(i);
                        u
                    })
                })
                .collect();
        }
        out
    }
}

/// Graded multilinear map `V^{⊗n} → W^{⊗m}` of a fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMultiMap {
    pub source: GradedSpaceFD,
    pub target: GradedSpaceFD,
    pub arity_in: usize,
    pub arity_out: usize,
    pub degree: i64,
    entries: BTreeMap<Vec<usize>, TensorVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Sym,
    Antisym,
}

impl GradedMultiMap {
    pub fn zero(source: GradedSpaceFD, target: GradedSpaceFD, arity_in: usize, arity_out: usize, degree: i64) -> Self {
        GradedMultiMap { source, target, arity_in, arity_out, degree, entries: BTreeMap::new() }
    }

    /// Identity endomorphism of `V`.
    pub fn identity(space: &GradedSpaceFD) -> Self {
        let mut m = Self::zero(space.clone(), space.clone(), 1, 1, 0);
        for i in 0..space.dim() {
            m.set(vec![i], vec![i], Q::one()).expect("identity is degree 0");
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, TensorVec> {
        &self.entries
    }

    /// Adds `c` to the coefficient of `outputs` in `f(inputs)`, enforcing the degree.
    pub fn add(&mut self, inputs: Vec<usize>, outputs: Vec<usize>, c: Q) -> Result<()> {
        if inputs.len() != self.arity_in || outputs.len() != self.arity_out {
            return arg("entry arity mismatch");
        }
        if c.is_zero() {
            return Ok(());
        }
        let din = self.source.tuple_degree(&inputs);
        let dout = self.target.tuple_degree(&outputs);
        if dout - din != self.degree {
            return arg(format!("entry of degree {} in a map of degree {}", dout - din, self.degree));
        }
        let slot = self.entries.entry(inputs.clone()).or_default();
        tv_add(slot, outputs, c);
        if slot.is_empty() {
            self.entries.remove(&inputs);
        }
        Ok(())
    }

    pub fn set(&mut self, inputs: Vec<usize>, outputs: Vec<usize>, c: Q) -> Result<()> {
        let old = self.coeff(&inputs, &outputs);
        self.add(inputs, outputs, c - old)
    }

    pub fn coeff(&self, inputs: &[usize], outputs: &[usize]) -> Q {
        self.entries.get(inputs).and_then(|t| t.get(outputs)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, inputs: &[usize]) -> TensorVec {
        self.entries.get(inputs).cloned().unwrap_or_default()
    }

    /// Applies the map to a linear combination of input tuples.
    pub fn eval_vec(&self, v: &TensorVec) -> TensorVec {
        let mut out = TensorVec::new();
        for (t, c) in v {
            if let Some(img) = self.entries.get(t) {
                for (o, d) in img {
                    tv_add(&mut out, o.clone(), c * d);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> GradedMultiMap {
        let mut out = Self::zero(self.source.clone(), self.target.clone(), self.arity_in, self.arity_out, self.degree);
        if c.is_zero() {
            return out;
        }
        out.entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().map(|(o, d)| (o.clone(), d * c)).collect()))
            .collect();
        out
    }

    fn check_same_shape(&self, other: &GradedMultiMap) -> Result<()> {
        if self.arity_in != other.arity_in
            || self.arity_out != other.arity_out
            || self.degree != other.degree
            || self.source != other.source
            || self.target != other.target
        {
            return arg("maps of different shape");
        }
        Ok(())
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &GradedMultiMap, c: &Q) -> Result<GradedMultiMap> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            for (o, d) in v {
                out.add(k.clone(), o.clone(), d * c)?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedMultiMap) -> Result<GradedMultiMap> {
        self.add_scaled(other, &-Q::one())
    }

    /// Image `f(σ·v)` as a map of `v`, with the (signed) Koszul sign.
    pub fn precompose_perm(&self, sigma: &Permutation, variant: Variant) -> Result<GradedMultiMap> {
        if sigma.len() != self.arity_in {
            return arg("permutation length differs from arity");
        }
        let mut out = Self::zero(self.source.clone(), self.target.clone(), self.arity_in, self.arity_out, self.degree);
        let inv = sigma.inverse();
        for (u, img) in &self.entries {
            // σ·v = ε v_σ = u  ⇒  v = σ⁻¹ applied to u's positions
            let v = inv.permute(u);
            let mut s = koszul_sign_unchecked(sigma.as_slice(), &self.source.degrees_of(&v));
            if variant == Variant::Antisym {
                s *= sigma.sgn();
            }
            for (o, c) in img {
                out.add(v.clone(), o.clone(), c * qsign(s))?;
            }
        }
        Ok(out)
    }

    fn is_graded_symmetric(&self, variant: Variant) -> bool {
        if self.arity_in < 2 {
            return true;
        }
        for k in 0..self.arity_in - 1 {
            let mut img: Vec<usize> = (0..self.arity_in).collect();
            img.swap(k, k + 1);
            let tau = Permutation::from_zero_based(img);
            match self.precompose_perm(&tau, variant) {
                Ok(g) if g == *self => {}
                _ => return false,
            }
        }
        true
    }

    /// `f(σ·v) = f(v)` for all σ, with Koszul signs.
    pub fn is_symmetric(&self) -> bool {
        self.is_graded_symmetric(Variant::Sym)
    }

    /// `f(σ·v) = (−1)^σ f(v)` for all σ, with Koszul signs.
    pub fn is_antisymmetric(&self) -> bool {
        self.is_graded_symmetric(Variant::Antisym)
    }

    /// `Σ_σ (±)f∘σ` over all of `𝒮ₙ`, unnormalized.
    pub fn symmetrize(&self, variant: Variant) -> Result<GradedMultiMap> {
        let mut out = Self::zero(self.source.clone(), self.target.clone(), self.arity_in, self.arity_out, self.degree);
        for sigma in Permutation::all(self.arity_in) {
            out = out.add_scaled(&self.precompose_perm(&sigma, variant)?, &Q::one())?;
        }
        Ok(out)
    }
}

/// Partial composition `f ∘_i g` (1-based `i`), applying the Koszul sign of
/// moving `g` past the first `i−1` inputs.
pub fn compose_at(f: &GradedMultiMap, g: &GradedMultiMap, i: usize) -> Result<GradedMultiMap> {
    let (n, p, q) = (f.arity_in, g.arity_in, g.arity_out);
    if q > n || i == 0 || i > n + 1 - q {
        return arg(format!("cannot insert arity-{q} output at position {i} of an arity-{n} map"));
    }
    if g.target != f.source {
        return arg("target of g differs from source of f");
    }
    let mut out = GradedMultiMap::zero(g.source.clone(), f.target.clone(), n + p - q, f.arity_out, f.degree + g.degree);
    let mut by_output: BTreeMap<&[usize], Vec<(&[usize], &Q)>> = BTreeMap::new();
    for (gin, img) in &g.entries {
        for (gout, c) in img {
            by_output.entry(gout.as_slice()).or_default().push((gin.as_slice(), c));
        }
    }
    for (fin, fimg) in &f.entries {
        let Some(gs) = by_output.get(&fin[i - 1..i - 1 + q]) else { continue };
        let prefix = &fin[..i - 1];
        let s = sign_pow(g.degree * f.source.tuple_degree(prefix));
        for (gin, gc) in gs {
            let mut input = prefix.to_vec();
            input.extend_from_slice(gin);
            input.extend_from_slice(&fin[i - 1 + q..]);
            for (fout, fc) in fimg {
                out.add(input.clone(), fout.clone(), fc * *gc * qsign(s))?;
            }
        }
    }
    Ok(out)
}

/// Insertion `f ⨼ g (v) = Σ_{σ ∈ 𝒮h(p, N−p)} ε(σ) (f∘₁g)(σ·v)`, `p = arity_in(g)`.
pub fn insert(f: &GradedMultiMap, g: &GradedMultiMap, variant: Variant) -> Result<GradedMultiMap> {
    let h = compose_at(f, g, 1)?;
    let p = g.arity_in;
    let total = h.arity_in;
    let mut out = GradedMultiMap::zero(h.source.clone(), h.target.clone(), total, h.arity_out, h.degree);
    for sigma in unshuffles(&[p, total - p]) {
        out = out.add_scaled(&h.precompose_perm(&sigma, variant)?, &Q::one())?;
    }
    Ok(out)
}

/// `[f,g]_RN = f⨼g − (−1)^{|f||g|} g⨼f`.
pub fn rn_bracket(f: &GradedMultiMap, g: &GradedMultiMap, variant: Variant) -> Result<GradedMultiMap> {
    if f.arity_out != g.arity_out {
        return arg("RN bracket of maps with different output arity");
    }
    let a = insert(f, g, variant)?;
    let b = insert(g, f, variant)?;
    if a.arity_in != b.arity_in {
        return Err(Error::Argument("insertions have different arity".into()));
    }
    a.add_scaled(&b, &-qsign(sign_pow(f.degree * g.degree)))
}

/// Decalage of an antisymmetric `f: V^{⊗n} → W` of degree `i` to the
/// symmetric `dec(f): (V[−1])^{⊗n} → W[j]` of degree `i − j − n`, with
/// coefficient sign `(−1)^{n·i}(−1)^{Σ(n−k)|v_k|}` in unshifted degrees.
pub fn decalage_of_map(f: &GradedMultiMap, target_shift: i64) -> Result<GradedMultiMap> {
    if f.arity_out != 1 {
        return arg("decalage needs a single output");
    }
    if !f.is_antisymmetric() {
        return arg("decalage needs an antisymmetric map");
    }
    let n = f.arity_in as i64;
    let source = f.source.shift(-1);
    let target = f.target.shift(target_shift);
    let mut out = GradedMultiMap::zero(source, target, f.arity_in, 1, f.degree - target_shift - n);
    for (u, img) in &f.entries {
        let s = sign_pow(n * f.degree) * decalage_sign(&f.source.degrees_of(u));
        for (o, c) in img {
            out.add(u.clone(), o.clone(), c * qsign(s))?;
        }
    }
    Ok(out)
}

/// The word map `σ·: V^{⊗n} → V^{⊗n}`, `v ↦ ε(σ;v) v_σ` (signed when antisym).
pub fn permutation_map(space: &GradedSpaceFD, sigma: &Permutation, variant: Variant) -> GradedMultiMap {
    let n = sigma.len();
    let mut out = GradedMultiMap::zero(space.clone(), space.clone(), n, n, 0);
    for v in space.tuples(n) {
        let mut s = koszul_sign_unchecked(sigma.as_slice(), &space.degrees_of(&v));
        if variant == Variant::Antisym {
            s *= sigma.sgn();
        }
        out.add(v.clone(), sigma.permute(&v), qsign(s)).expect("degree 0");
    }
    out
}

/// The word decalage `V^{⊗n} → (V[−1])^{⊗n}`, `v ↦ (−1)^{Σ(n−k)|v_k|} v`.
pub fn decalage_word_map(space: &GradedSpaceFD, n: usize) -> GradedMultiMap {
    let shifted = space.shift(-1);
    let mut out = GradedMultiMap::zero(space.clone(), shifted, n, n, n as i64);
    for v in space.tuples(n) {
        let s = decalage_sign(&space.degrees_of(&v));
        out.add(v.clone(), v, qsign(s)).expect("degree n");
    }
    out
}

#[derive(Serialize, Deserialize)]
struct OutJson {
    #[serde(with = "crate::rat::serde_q")]
    coeff: Q,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    inputs: Vec<String>,
    outputs: Vec<OutJson>,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    source: Vec<BasisElem>,
    target: Vec<BasisElem>,
    arity_in: usize,
    arity_out: usize,
    degree: i64,
    entries: Vec<EntryJson>,
}

impl Serialize for GradedMultiMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let lab = |sp: &GradedSpaceFD, t: &[usize]| t.iter().map(|&i| sp.basis[i].label.clone()).collect();
        MapJson {
            source: self.source.basis.clone(),
            target: self.target.basis.clone(),
            arity_in: self.arity_in,
            arity_out: self.arity_out,
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| EntryJson {
                    inputs: lab(&self.source, k),
                    outputs: v.iter().map(|(o, c)| OutJson { coeff: c.clone(), labels: lab(&self.target, o) }).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedMultiMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MapJson::deserialize(d)?;
        let source = GradedSpaceFD { basis: j.source };
        let target = GradedSpaceFD { basis: j.target };
        let idx = |sp: &GradedSpaceFD, ls: &[String]| -> std::result::Result<Vec<usize>, D::Error> {
            ls.iter().map(|l| sp.index_of(l).ok_or_else(|| D::Error::custom(format!("unknown label `{l}`")))).collect()
        };
        let mut m = GradedMultiMap::zero(source, target, j.arity_in, j.arity_out, j.degree);
        for e in j.entries {
            let inputs = idx(&m.source, &e.inputs)?;
            for o in e.outputs {
                let outputs = idx(&m.target, &o.labels)?;
                m.add(inputs.clone(), outputs, o.coeff).map_err(D::Error::custom)?;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qf};

    fn space() -> GradedSpaceFD {
        GradedSpaceFD::from_degrees(&[0, 1])
    }

    /// Oracle: evaluate `f∘_i g` on a tuple by nested evaluation.
    fn nested(f: &GradedMultiMap, g: &GradedMultiMap, i: usize, v: &[usize]) -> TensorVec {
        let p = g.arity_in;
        let s = sign_pow(g.degree * f.source.tuple_degree(&v[..i - 1]));
        let mut out = TensorVec::new();
        for (gout, gc) in g.eval(&v[i - 1..i - 1 + p]) {
            let mut w = v[..i - 1].to_vec();
            w.extend(gout);
            w.extend_from_slice(&v[i - 1 + p..]);
            for (o, c) in f.eval(&w) {
                tv_add(&mut out, o, c * &gc * qsign(s));
            }
        }
        out
    }

    fn binary(entries: &[([usize; 2], usize, i64)]) -> GradedMultiMap {
        let sp = space();
        let mut m = GradedMultiMap::zero(sp.clone(), sp, 2, 1, 0);
        for (i, o, c) in entries {
            m.add(i.to_vec(), vec![*o], q(*c)).unwrap();
        }
        m
    }

    #[test]
    fn compose_identity_cases() {
        let g = binary(&[([0, 0], 0, 2), ([0, 1], 1, 1), ([1, 0], 1, -3)]);
        let id = GradedMultiMap::identity(&space());
        assert_eq!(compose_at(&id, &g, 1).unwrap(), g);
        assert_eq!(compose_at(&g, &id, 1).unwrap(), g);
        assert_eq!(compose_at(&g, &id, 2).unwrap(), g);
        assert!(compose_at(&g, &id, 3).is_err());
    }

    #[test]
    fn compose_matches_nested_evaluation() {
        let sp = GradedSpaceFD::from_degrees(&[0, 1, 2]);
        let mut f = GradedMultiMap::zero(sp.clone(), sp.clone(), 2, 1, 0);
        for (i, o, c) in [([0, 0], 0, 1), ([0, 1], 1, 2), ([1, 0], 1, -1), ([1, 1], 2, 5), ([0, 2], 2, 3)] {
            f.add(i.to_vec(), vec![o], q(c)).unwrap();
        }
        let mut g = GradedMultiMap::zero(sp.clone(), sp.clone(), 2, 1, 1);
        for (i, o, c) in [([0, 0], 1, 3), ([0, 1], 2, 1), ([1, 0], 2, -2)] {
            g.add(i.to_vec(), vec![o], q(c)).unwrap();
        }
        for i in 1..=2 {
            let h = compose_at(&f, &g, i).unwrap();
            for v in sp.tuples(3) {
                assert_eq!(h.eval(&v), nested(&f, &g, i, &v), "position {i}, tuple {v:?}");
            }
        }
    }

    #[test]
    fn insert_examples() {
        let sp = space();
        let id = GradedMultiMap::identity(&sp);
        // symmetric f: insertion of the identity gives n·f
        let mut f = GradedMultiMap::zero(sp.clone(), sp.clone(), 2, 1, 0);
        f.add(vec![0, 0], vec![0], q(1)).unwrap();
        f.add(vec![0, 1], vec![1], q(2)).unwrap();
        f.add(vec![1, 0], vec![1], q(2)).unwrap();
        assert!(f.is_symmetric());
        assert_eq!(insert(&f, &id, Variant::Sym).unwrap(), f.scale(&q(2)));
        // unary case is composition
        let mut a = GradedMultiMap::zero(sp.clone(), sp.clone(), 1, 1, 0);
        a.add(vec![0], vec![0], qf(1, 2)).unwrap();
        a.add(vec![1], vec![1], q(3)).unwrap();
        assert_eq!(insert(&a, &a, Variant::Sym).unwrap(), compose_at(&a, &a, 1).unwrap());
        // abelian bracket
        let zero = GradedMultiMap::zero(sp.clone(), sp, 2, 1, -1);
        assert!(insert(&zero, &zero, Variant::Sym).unwrap().is_zero());
    }

    #[test]
    fn rn_examples() {
        let sp = GradedSpaceFD::from_degrees(&[1, 2]);
        let mut odd = GradedMultiMap::zero(sp.clone(), sp.clone(), 1, 1, 1);
        odd.add(vec![0], vec![1], q(1)).unwrap();
        let mut even = GradedMultiMap::zero(sp.clone(), sp.clone(), 1, 1, 0);
        even.add(vec![0], vec![0], q(2)).unwrap();
        even.add(vec![1], vec![1], q(-1)).unwrap();
        assert!(rn_bracket(&even, &even, Variant::Sym).unwrap().is_zero());
        assert_eq!(
            rn_bracket(&odd, &odd, Variant::Sym).unwrap(),
            insert(&odd, &odd, Variant::Sym).unwrap().scale(&q(2))
        );
        let comm = compose_at(&odd, &even, 1).unwrap().sub(&compose_at(&even, &odd, 1).unwrap()).unwrap();
        assert_eq!(rn_bracket(&odd, &even, Variant::Sym).unwrap(), comm);
    }

    #[test]
    fn decalage_examples() {
        let sp = GradedSpaceFD::from_degrees(&[0, 1]);
        let mut f = GradedMultiMap::zero(sp.clone(), sp.clone(), 1, 1, 1);
        f.add(vec![0], vec![1], q(1)).unwrap();
        let d = decalage_of_map(&f, 0).unwrap();
        assert_eq!(d.coeff(&[0], &[1]), q(-1));
        assert_eq!(d.degree, 0);
        // antisymmetric bracket on two odd generators
        let sp = GradedSpaceFD::from_degrees(&[1, 1, 2]);
        let mut b = GradedMultiMap::zero(sp.clone(), sp.clone(), 2, 1, 0);
        b.add(vec![0, 1], vec![2], q(1)).unwrap();
        b.add(vec![1, 0], vec![2], q(1)).unwrap();
        assert!(b.is_antisymmetric());
        let d = decalage_of_map(&b, -1).unwrap();
        assert_eq!(d.degree, -1);
        assert!(d.is_symmetric());
        let z = GradedMultiMap::zero(sp.clone(), sp.clone(), 2, 1, 0);
        assert!(decalage_of_map(&z, -1).unwrap().is_zero());
        let mut bad = GradedMultiMap::zero(sp.clone(), sp, 2, 1, 0);
        bad.add(vec![0, 1], vec![2], q(1)).unwrap();
        assert!(decalage_of_map(&bad, -1).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = binary(&[([0, 1], 1, 2), ([1, 0], 1, -1)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<GradedMultiMap>(&s).unwrap(), f);
    }
}
