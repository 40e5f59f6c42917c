//! Verification suites, single computations and the example gallery behind
//! the `mscalc` binary. Reports are plain data; the binary prints them.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cartan::{
    cartan_defects, coalgebra_sum, contract, exterior_d, fr_defect, jacobi_defect, leibniz_expansion, lie_derivative,
    nu_n, nu_n_is_symmetric_under, schouten, schouten_explicit, wedge_all, FieldKind, Form, FormKind, MultiVector, MAX_DIM,
};
use crate::error::{arg, Error, Result};
use crate::linfty::{check_jacobi, jacobi_on, morphism_defect_on, LInfty, LInftyPresentation};
use crate::moment::{
    check_action, check_hmm, construct_homotopy, equivalence_suite, evaluate_entry, gallery, homotopy_json, homotopy_of,
    homotopy_to_lift, l1_toy, l1_toy_non_hamiltonian, lift_json, lift_to_homotopy, perturbed, so3_action, translations_abelian,
    translations_heisenberg, Action, CoMomentum, EquivalenceReport, MomentumCandidate,
};
use crate::msgeo::{
    classify_field, cochain_check_omega_tilde, naive_jacobi_witness, phi1, pi1, poincare_primitive, random_ham_pair, random_xi,
    random_xi_any, MultivectorAlgebra, PreMS, XiAlgebra, XiElement,
};
use crate::multilinear::{
    compose_at, decalage_of_map, decalage_word_map, insert, permutation_map, GradedMultiMap, GradedSpaceFD, TensorVec, Variant,
};
use crate::poly::RationalPoly;
use crate::random::{random_degrees, random_graded_symmetric, random_sections, rng_for, Rng64};
use crate::rat::{q, qsign, Q};
use crate::signs::{
    koszul_sign, multinomial, sign_pow, total_koszul_sign, unshuffle_factorize, unshuffles, Permutation,
};
use crate::transfer::{
    build_q, construct_p, hamiltonian_subcomplex, roundtrip_check, shift_p_by_central, to_g_defect_free, FiniteInstance,
    GeometricInstance, TransferInput,
};

/// Suite names accepted by `verify`, in the order `verify all` runs them.
pub const SUITES: [&str; 9] =
    ["signs", "decalage", "insertion", "gerstenhaber", "cartan", "mainforms", "transfer", "roundtrip", "moment"];

/// Knobs shared by all suites. Every random choice derives from `seed`.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub max_arity: usize,
    pub coeff_deg: u32,
    pub m: Option<usize>,
    pub omega: Option<PreMS>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, trials: 50, dims: vec![2, 3, 4], max_arity: 5, coeff_deg: 2, m: None, omega: None }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.max_arity == 0 {
            return arg("--trials and --max-arity must be positive");
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > MAX_DIM) {
            return arg(format!("--dim values must lie in 1..={MAX_DIM}"));
        }
        Ok(())
    }

    fn rng(&self, name: &str) -> Rng64 {
        rng_for(self.seed, name)
    }
}

/// One property with its trial count and every failing witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `Ok(None)`: the trial passed; `Ok(Some(w))`: failed with witness `w`.
type Outcome = Result<Option<Value>>;

fn tally(name: &str, outcomes: Vec<Outcome>) -> Check {
    let trials = outcomes.len();
    let witnesses: Vec<Value> = outcomes
        .into_iter()
        .filter_map(|o| match o {
            Ok(w) => w,
            Err(e) => Some(json!({ "error": e.to_string() })),
        })
        .collect();
    Check { name: name.into(), trials, failures: witnesses.len(), witnesses }
}

/// Evaluates pre-sampled inputs in parallel; output order follows input order.
fn par_tally<T: Sync>(name: &str, inputs: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) -> Check {
    tally(name, inputs.par_iter().map(f).collect())
}

fn unless(ok: bool, w: impl FnOnce() -> Value) -> Option<Value> {
    if ok {
        None
    } else {
        Some(w())
    }
}

fn texts<T: ToString>(xs: &[T]) -> Value {
    json!(xs.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

/// Runs one named suite.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let checks = match name {
        "signs" => suite_signs(cfg)?,
        "decalage" => suite_decalage(cfg)?,
        "insertion" => suite_insertion(cfg)?,
        "gerstenhaber" => suite_gerstenhaber(cfg)?,
        "cartan" => suite_cartan(cfg)?,
        "mainforms" => suite_mainforms(cfg)?,
        "transfer" => suite_transfer(cfg)?,
        "roundtrip" => suite_roundtrip(cfg)?,
        "moment" => suite_moment(cfg)?,
        other => return arg(format!("unknown suite `{other}`; expected one of {} or all", SUITES.join(", "))),
    };
    let passed = checks.iter().all(|c| c.failures == 0);
    Ok(SuiteReport { suite: name.into(), seed: cfg.seed, passed, checks })
}

/// Runs every suite in order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, cfg)).collect()
}

// ---------------------------------------------------------------- signs

fn parity_vectors(n: usize) -> Vec<Vec<i64>> {
    (0..1u32 << n).map(|bits| (0..n).map(|k| ((bits >> k) & 1) as i64).collect()).collect()
}

fn mult_case(a: &Permutation, b: &Permutation, degs: &[i64]) -> Result<Option<Value>> {
    let lhs = koszul_sign(&a.compose(b), degs)?;
    let rhs = koszul_sign(a, &b.permute(degs))? * koszul_sign(b, degs)?;
    Ok(unless(lhs == rhs, || json!({ "a": a, "b": b, "degrees": degs })))
}

fn suite_signs(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = cfg.rng("signs");
    let mut checks = Vec::new();

    // ε(a∘b; v) = ε(a; b·v) ε(b; v): exhaustive for n ≤ 5, sampled for n = 6, 7.
    let mut exhaustive: Vec<(usize, Vec<i64>)> = Vec::new();
    for n in 1..=5 {
        exhaustive.extend(parity_vectors(n).into_iter().map(|d| (n, d)));
    }
    let per_degs: Vec<Vec<Outcome>> = exhaustive
        .par_iter()
        .map(|(n, degs)| {
            let perms = Permutation::all(*n);
            perms.iter().flat_map(|a| perms.iter().map(move |b| (a, b))).map(|(a, b)| mult_case(a, b, degs)).collect()
        })
        .collect();
    let mut outcomes: Vec<Outcome> = per_degs.into_iter().flatten().collect();
    for n in 6..=7 {
        let perms = Permutation::all(n);
        for _ in 0..cfg.trials {
            let a = perms.choose(&mut rng).expect("nonempty");
            let b = perms.choose(&mut rng).expect("nonempty");
            let degs = random_degrees(&mut rng, n, -3, 3);
            outcomes.push(mult_case(a, b, &degs));
        }
    }
    checks.push(tally("koszul_multiplicative", outcomes));

    // Total Koszul sign is the sign of the reversal, on every parity vector.
    let mut outcomes = Vec::new();
    for n in 0..=7 {
        for degs in parity_vectors(n) {
            let rev = koszul_sign(&Permutation::reversal(n), &degs)?;
            outcomes.push(Ok(unless(total_koszul_sign(&degs) == rev, || json!({ "degrees": degs }))));
        }
    }
    checks.push(tally("total_koszul_reversal", outcomes));

    // |Sh(p₁,…,p_q)| = multinomial, distinct, over all compositions of n ≤ 7.
    let mut outcomes = Vec::new();
    for n in 1..=7 {
        for parts in crate::linfty::compositions(n) {
            let sh = unshuffles(&parts);
            let distinct: BTreeSet<Vec<usize>> = sh.iter().map(|s| s.images()).collect();
            let ok = sh.len() as u128 == multinomial(&parts) && distinct.len() == sh.len();
            outcomes.push(Ok(unless(ok, || json!({ "parts": parts, "count": sh.len(), "multinomial": multinomial(&parts).to_string() }))));
        }
    }
    checks.push(tally("unshuffle_cardinality", outcomes));

    // α = (τ₁,τ₂)∘σ for every (p₁,p₂,p₃,p₄)-unshuffle, n ≤ 6.
    let mut outcomes = Vec::new();
    for n in 0..=6usize {
        for p1 in 0..=n {
            for p2 in 0..=n - p1 {
                for p3 in 0..=n - p1 - p2 {
                    let p4 = n - p1 - p2 - p3;
                    let outer = unshuffles(&[p1 + p2, p3 + p4]);
                    for alpha in unshuffles(&[p1, p2, p3, p4]) {
                        let r = unshuffle_factorize(&alpha, (p1, p2, p3, p4)).map(|(s, t1, t2)| {
                            let ok = Permutation::block_sum(&t1, &t2).compose(&s) == alpha && outer.contains(&s);
                            unless(ok, || json!({ "alpha": alpha, "split": [p1, p2, p3, p4] }))
                        });
                        outcomes.push(r);
                    }
                }
            }
        }
    }
    checks.push(tally("unshuffle_factorization", outcomes));
    Ok(checks)
}

// ---------------------------------------------------------------- decalage

fn random_space(rng: &mut Rng64, dim_lo: usize, dim_hi: usize, lo: i64, hi: i64) -> GradedSpaceFD {
    let d = rng.gen_range(dim_lo..=dim_hi);
    GradedSpaceFD::from_degrees(&random_degrees(rng, d, lo, hi))
}

/// A map degree that some basis tuple of this arity can realize.
fn realizable_degree(rng: &mut Rng64, v: &GradedSpaceFD, arity: usize) -> i64 {
    let tuple: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..v.dim())).collect();
    v.degree(rng.gen_range(0..v.dim())) - v.tuple_degree(&tuple)
}

fn suite_decalage(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = cfg.rng("decalage");
    let mut checks = Vec::new();

    // dec ∘ σ = (−1)^σ σ[−n] ∘ dec on V^{⊗n}.
    let mut outcomes = Vec::new();
    for t in 0..cfg.trials.max(100) {
        let n = 1 + t % 4;
        let v = random_space(&mut rng, 1, 3, -2, 2);
        let sigma = Permutation::all(n).choose(&mut rng).cloned().expect("nonempty");
        let dec = decalage_word_map(&v, n);
        let r = (|| -> Result<Option<Value>> {
            let lhs = compose_at(&dec, &permutation_map(&v, &sigma, Variant::Sym), 1)?;
            let rhs = compose_at(&permutation_map(&v.shift(-1), &sigma, Variant::Antisym), &dec, 1)?;
            Ok(unless(lhs == rhs, || json!({ "degrees": v.degrees_of(&(0..v.dim()).collect::<Vec<_>>()), "sigma": sigma })))
        })();
        outcomes.push(r);
    }
    checks.push(tally("natural_square", outcomes));

    // (−1)^{|f|(i−1)} dec(f ⨼₋τ g) = dec(f) ⨼ dec(g), f of arity j, g of arity i.
    let mut cases = Vec::new();
    for _ in 0..cfg.trials.max(50) {
        let v = random_space(&mut rng, 2, 4, -1, 1);
        let (j, i) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let (fd, gd) = (realizable_degree(&mut rng, &v, j), realizable_degree(&mut rng, &v, i));
        let f = random_graded_symmetric(&mut rng, &v, j, fd, Variant::Antisym, 0.7);
        let g = random_graded_symmetric(&mut rng, &v, i, gd, Variant::Antisym, 0.7);
        cases.push((f, g));
    }
    checks.push(par_tally("insertion_decalage", &cases, |(f, g)| {
        let i = g.arity_in as i64;
        let lhs = decalage_of_map(&insert(f, g, Variant::Antisym)?, -1)?.scale(&qsign(sign_pow(f.degree * (i - 1))));
        let rhs = insert(&decalage_of_map(f, -1)?, &decalage_of_map(g, -1)?, Variant::Sym)?;
        Ok(unless(lhs == rhs, || json!({ "f": f, "g": g })))
    }));
    let nontrivial = cases.iter().filter(|(f, g)| !insert(f, g, Variant::Antisym).map(|h| h.is_zero()).unwrap_or(true)).count();
    checks.push(tally(
        "insertion_decalage_nontrivial",
        vec![Ok(unless(2 * nontrivial >= cases.len(), || json!({ "nontrivial": nontrivial, "trials": cases.len() })))],
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- insertion

/// Graded Jacobi `Σ_cyc (−1)^{|x||z|} λ(x, λ(y, z)) = 0` on all basis triples.
fn direct_jacobi_holds(l: &GradedMultiMap) -> bool {
    let sp = &l.source;
    let n = sp.dim();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = TensorVec::new();
                for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                    let s = qsign(sign_pow(sp.degree(x) * sp.degree(z)));
                    for (o, c1) in l.eval(&[y, z]) {
                        for (o2, c2) in l.eval(&[x, o[0]]) {
                            *acc.entry(o2).or_insert_with(Q::zero) += &s * &c1 * c2;
                        }
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Keeps the entries of `l` with no central input and central output.
fn center_valued(l: &GradedMultiMap, central: usize) -> Result<GradedMultiMap> {
    let mut out = GradedMultiMap::zero(l.source.clone(), l.target.clone(), l.arity_in, l.arity_out, l.degree);
    for (inp, img) in l.entries() {
        if inp.contains(&central) {
            continue;
        }
        for (o, c) in img {
            if o == &vec![central] {
                out.add(inp.clone(), o.clone(), c.clone())?;
            }
        }
    }
    Ok(out)
}

/// so(3) with a random diagonal rescaling of the basis, plus a central odd line.
fn rescaled_so3(rng: &mut Rng64) -> Result<GradedMultiMap> {
    let sp = GradedSpaceFD::from_degrees(&[0, 0, 0, 1]);
    let s: Vec<Q> = (0..3).map(|_| crate::random::pool_nonzero(rng)).collect();
    let mut l = GradedMultiMap::zero(sp.clone(), sp, 2, 1, 0);
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let k = &s[a] * &s[b] / &s[c];
        l.add(vec![a, b], vec![c], k.clone())?;
        l.add(vec![b, a], vec![c], -k)?;
    }
    Ok(l)
}

fn suite_insertion(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = cfg.rng("insertion");
    let mut checks = Vec::new();

    let mut cases = Vec::new();
    for t in 0..cfg.trials {
        let variant = if t % 2 == 0 { Variant::Sym } else { Variant::Antisym };
        let v = random_space(&mut rng, 2, 4, -1, 1);
        let (j, i) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let (fd, gd) = (realizable_degree(&mut rng, &v, j), realizable_degree(&mut rng, &v, i));
        let f = random_graded_symmetric(&mut rng, &v, j, fd, variant, 0.6);
        let g = random_graded_symmetric(&mut rng, &v, i, gd, variant, 0.6);
        cases.push((variant, f, g));
    }
    checks.push(par_tally("insertion_preserves_symmetry", &cases, |(variant, f, g)| {
        let h = insert(f, g, *variant)?;
        let ok = match variant {
            Variant::Sym => h.is_symmetric(),
            Variant::Antisym => h.is_antisymmetric(),
        };
        Ok(unless(ok, || json!({ "variant": variant, "f": f, "g": g })))
    }));

    // λ is a graded Lie bracket iff λ ⨼₋τ λ = 0 iff dec(λ) ⨼ dec(λ) = 0.
    let mut brackets = Vec::new();
    for t in 0..cfg.trials {
        let l = match t % 3 {
            0 => {
                let v = random_space(&mut rng, 2, 4, -1, 1);
                random_graded_symmetric(&mut rng, &v, 2, 0, Variant::Antisym, 0.5)
            }
            1 => {
                let k = rng.gen_range(2..=3);
                let mut degs = random_degrees(&mut rng, k, -1, 1);
                let (a, b) = (rng.gen_range(0..degs.len()), rng.gen_range(0..degs.len()));
                degs.push(degs[a] + degs[b]);
                let v = GradedSpaceFD::from_degrees(&degs);
                center_valued(&random_graded_symmetric(&mut rng, &v, 2, 0, Variant::Antisym, 0.8), degs.len() - 1)?
            }
            _ => rescaled_so3(&mut rng)?,
        };
        brackets.push(l);
    }
    checks.push(par_tally("lie_iff_self_insertion_vanishes", &brackets, |l| {
        let direct = direct_jacobi_holds(l);
        let ins = insert(l, l, Variant::Antisym)?.is_zero();
        let d = decalage_of_map(l, -1)?;
        let dec = insert(&d, &d, Variant::Sym)?.is_zero();
        Ok(unless(direct == ins && ins == dec, || json!({ "bracket": l, "direct": direct, "insertion": ins, "decalaged": dec })))
    }));
    let lie = brackets.iter().filter(|l| direct_jacobi_holds(l)).count();
    checks.push(tally(
        "lie_iff_both_sides_sampled",
        vec![Ok(unless(lie > 0 && lie < brackets.len(), || json!({ "lie": lie, "trials": brackets.len() })))],
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- gerstenhaber

fn random_mv(rng: &mut Rng64, dim: usize, coeff_deg: u32) -> MultiVector {
    let k = rng.gen_range(0..=dim);
    random_sections::<FieldKind>(rng, dim, k, coeff_deg, 0.5)
}

fn random_word(rng: &mut Rng64, dim: usize, n: usize, coeff_deg: u32) -> Vec<MultiVector> {
    (0..n).map(|_| random_mv(rng, dim, coeff_deg)).collect()
}

fn random_fields(rng: &mut Rng64, dim: usize, n: usize, coeff_deg: u32) -> Vec<MultiVector> {
    (0..n).map(|_| random_sections::<FieldKind>(rng, dim, 1, coeff_deg, 0.6)).collect()
}

fn suite_gerstenhaber(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = cfg.rng("gerstenhaber");
    let cd = cfg.coeff_deg;
    let mut checks = Vec::new();

    let mut words = Vec::new();
    for &dim in &cfg.dims {
        for n in 1..=cfg.max_arity {
            for _ in 0..cfg.trials {
                words.push(random_word(&mut rng, dim, n, cd));
            }
        }
    }
    checks.push(par_tally("jacobi", &words, |w| {
        let d = jacobi_defect(w, w.len())?;
        Ok(unless(d.is_zero(), || json!({ "word": texts(w), "defect": d.to_string() })))
    }));

    let mut words = Vec::new();
    for &dim in &cfg.dims {
        for n in 2..=4 {
            for _ in 0..cfg.trials {
                words.push((dim, random_word(&mut rng, dim, n, cd)));
            }
        }
    }
    checks.push(par_tally("generalized_leibniz", &words, |(dim, w)| {
        let lhs = leibniz_expansion(w)?;
        let rhs = schouten(&w[0], &wedge_all(*dim, &w[1..])?)?;
        Ok(unless(lhs == rhs, || json!({ "word": texts(w), "expansion": lhs.to_string(), "bracket": rhs.to_string() })))
    }));

    let mut words = Vec::new();
    for &dim in &cfg.dims {
        for n in 3..=4 {
            for _ in 0..cfg.trials {
                words.push(random_word(&mut rng, dim, n, cd));
            }
        }
    }
    checks.push(par_tally("coalgebra_factor", &words, |w| {
        let lhs = coalgebra_sum(w)?;
        let rhs = nu_n(w)?.scale(&q(1 << (w.len() - 2)));
        Ok(unless(lhs == rhs, || json!({ "word": texts(w), "sum": lhs.to_string(), "scaled": rhs.to_string() })))
    }));

    let mut pairs = Vec::new();
    for &dim in &cfg.dims {
        for _ in 0..cfg.trials {
            let (k, l) = (rng.gen_range(1..=dim.min(2)), rng.gen_range(1..=dim.min(2)));
            pairs.push((dim, random_fields(&mut rng, dim, k, cd), random_fields(&mut rng, dim, l, cd)));
        }
    }
    checks.push(par_tally("schouten_explicit_formula", &pairs, |(dim, xs, ys)| {
        let lhs = schouten(&wedge_all(*dim, xs)?, &wedge_all(*dim, ys)?)?;
        let rhs = schouten_explicit(xs, ys)?;
        Ok(unless(lhs == rhs, || json!({ "xs": texts(xs), "ys": texts(ys) })))
    }));

    let mut cases = Vec::new();
    for &dim in &cfg.dims {
        for n in 2..=4 {
            for _ in 0..cfg.trials {
                let sigma = Permutation::all(n).choose(&mut rng).cloned().expect("nonempty");
                cases.push((random_word(&mut rng, dim, n, cd), sigma));
            }
        }
    }
    checks.push(par_tally("nu_symmetric", &cases, |(w, sigma)| {
        Ok(unless(nu_n_is_symmetric_under(w, sigma)?, || json!({ "word": texts(w), "sigma": sigma })))
    }));
    Ok(checks)
}

// ---------------------------------------------------------------- cartan

fn random_form_any(rng: &mut Rng64, dim: usize, coeff_deg: u32) -> Form {
    let k = rng.gen_range(0..=dim);
    random_sections::<FormKind>(rng, dim, k, coeff_deg, 0.5)
}

/// `ι_{x_n}∘⋯∘ι_{x_1} a`, the conventional `a(x₁,…,xₙ,−)`.
fn iota_hat(xs: &[MultiVector], a: &Form) -> Result<Form> {
    xs.iter().try_fold(a.clone(), |acc, x| contract(x, &acc))
}

fn suite_cartan(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = cfg.rng("cartan");
    let cd = cfg.coeff_deg;
    let mut checks = Vec::new();

    let mut triples = Vec::new();
    for &dim in &cfg.dims {
        for _ in 0..cfg.trials {
            triples.push((random_mv(&mut rng, dim, cd), random_mv(&mut rng, dim, cd), random_form_any(&mut rng, dim, cd)));
        }
    }
    checks.push(par_tally("cartan_identities", &triples, |(x, y, probe)| {
        let ds = cartan_defects(x, y, probe)?;
        let bad: Vec<usize> = (0..5).filter(|&k| !ds[k].is_zero()).map(|k| k + 1).collect();
        Ok(unless(bad.is_empty(), || {
            json!({ "x": x.to_string(), "y": y.to_string(), "probe": probe.to_string(), "identities": bad, "defects": texts(&ds) })
        }))
    }));

    let mut cases = Vec::new();
    for &dim in &cfg.dims {
        for n in 1..=4.min(cfg.max_arity) {
            for _ in 0..cfg.trials {
                cases.push((random_word(&mut rng, dim, n, cd), random_form_any(&mut rng, dim, cd)));
            }
        }
    }
    checks.push(par_tally("lie_derivative_of_words", &cases, |(w, probe)| {
        let d = fr_defect(w, probe)?;
        Ok(unless(d.is_zero(), || json!({ "word": texts(w), "probe": probe.to_string(), "defect": d.to_string() })))
    }));

    let mut cases = Vec::new();
    for &dim in &cfg.dims {
        for _ in 0..cfg.trials {
            let n = rng.gen_range(1..=dim);
            let k = rng.gen_range(n..=dim);
            cases.push((dim, random_fields(&mut rng, dim, n, cd), random_sections::<FormKind>(&mut rng, dim, k, cd, 0.6)));
        }
    }
    checks.push(par_tally("contraction_total_koszul", &cases, |(dim, xs, a)| {
        let lhs = contract(&wedge_all(*dim, xs)?, a)?;
        let rhs = iota_hat(xs, a)?.scale(&qsign(total_koszul_sign(&vec![1; xs.len()])));
        Ok(unless(lhs == rhs, || json!({ "fields": texts(xs), "form": a.to_string() })))
    }));

    let mut cases = Vec::new();
    for &dim in &cfg.dims {
        for _ in 0..cfg.trials {
            cases.push((dim, random_mv(&mut rng, dim, cd), random_mv(&mut rng, dim, cd), random_form_any(&mut rng, dim, cd)));
        }
    }
    checks.push(par_tally("contraction_multiplicative_and_dd", &cases, |(_, x, y, a)| {
        let lhs = contract(&x.wedge(y)?, a)?;
        let rhs = contract(x, &contract(y, a)?)?;
        let dd = exterior_d(&exterior_d(a));
        let lie = lie_derivative(x, a)?;
        // d L_x = (−1)^{|x|+1} L_x d for a field of degree |x|.
        let sign = qsign(sign_pow(x.degree() as i64 + 1));
        let closed = exterior_d(&lie).sub(&lie_derivative(x, &exterior_d(a))?.scale(&sign));
        Ok(unless(lhs == rhs && dd.is_zero() && closed.is_zero(), || {
            json!({ "x": x.to_string(), "y": y.to_string(), "form": a.to_string() })
        }))
    }));
    Ok(checks)
}

// ---------------------------------------------------------------- mainforms

/// The `(ℝ^d, ω)` instances a geometric suite runs on.
fn ms_instances(cfg: &SuiteConfig, defaults: &[(usize, usize, &str)]) -> Result<Vec<PreMS>> {
    if let Some(ms) = &cfg.omega {
        return Ok(vec![ms.clone()]);
    }
    if let Some(m) = cfg.m {
        let picked: Vec<PreMS> = cfg.dims.iter().filter(|&&d| d == m + 1).map(|&d| PreMS::volume(d)).collect();
        if picked.is_empty() {
            return arg(format!("--m {m} without --omega needs --dim {} (the volume form)", m + 1));
        }
        return Ok(picked);
    }
    defaults.iter().map(|(d, m, w)| PreMS::parse(*d, *m, w)).collect()
}

fn ms_label(ms: &PreMS) -> String {
    format!("(R^{}, {})", ms.dim, ms.omega)
}

fn suite_mainforms(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = cfg.rng("mainforms");
    let cd = cfg.coeff_deg.min(2);
    let custom = cfg.omega.is_some() || cfg.m.is_some();
    let mut checks = Vec::new();
    let top = 4.min(cfg.max_arity);

    // d ι_x ω = ι_{νₙ(x)} ω on hamiltonian words, and νₙ keeps them hamiltonian.
    let cochain = ms_instances(cfg, &[(3, 2, "dx(1,2,3)"), (4, 2, "dx(1,2,3) + x4*dx(1,2,4)")])?;
    let mut words = Vec::new();
    for ms in &cochain {
        for n in 1..=top {
            for _ in 0..cfg.trials {
                let mut w = Vec::new();
                for _ in 0..n {
                    let k = rng.gen_range(1..=ms.m);
                    w.push(random_ham_pair(&mut rng, ms, k, cd)?.field);
                }
                words.push((ms.clone(), w));
            }
        }
    }
    checks.push(par_tally("omega_tilde_cochain_map", &words, |(ms, w)| {
        let d = cochain_check_omega_tilde(ms, w)?;
        Ok(unless(d.is_zero(), || json!({ "instance": ms_label(ms), "word": texts(w), "defect": d.to_string() })))
    }));
    checks.push(par_tally("hamiltonian_closed_under_nu", &words, |(ms, w)| {
        let x = nu_n(w)?;
        if x.degree() > ms.dim || x.is_zero() {
            return Ok(None);
        }
        let c = classify_field(ms, &x)?;
        Ok(unless(c.hamiltonian, || json!({ "instance": ms_label(ms), "word": texts(w), "bracket": x.to_string() })))
    }));

    // The naive bracket family fails the binary Jacobi identity on (ℝ³, vol).
    let naive = if custom { cochain.clone() } else { vec![PreMS::volume(3)] };
    let mut outcomes = Vec::new();
    for ms in &naive {
        let found = naive_jacobi_witness(ms)?;
        outcomes.push(Ok(match found {
            Some((_, _, d)) if !d.is_zero() => None,
            _ => Some(json!({ "instance": ms_label(ms), "witness": null })),
        }));
    }
    checks.push(tally("naive_jacobi_witness_found", outcomes));
    let mut witnesses = Vec::new();
    for ms in &naive {
        if let Some((a, b, d)) = naive_jacobi_witness(ms)? {
            witnesses.push(json!({ "instance": ms_label(ms), "a": a.primitive.to_string(), "b": b.primitive.to_string(), "J2": d.to_string() }));
        }
    }

    // Ξ and Ξ̃: Jacobi, closed base rows, strict π₁ and φ₁.
    let xi_instances = ms_instances(cfg, &[(3, 2, "dx(1,2,3)"), (4, 3, "dx(1,2,3,4) + x1*dx(1,2,3,4)")])?;
    let mut jac = Vec::new();
    let mut base = Vec::new();
    let mut strict = Vec::new();
    let xi_trials = cfg.trials.div_ceil(5).max(4);
    for ms in &xi_instances {
        for pairs in [false, true] {
            let alg = if pairs { XiAlgebra::pairs(ms) } else { XiAlgebra::forms(ms) };
            for n in 1..=top {
                for _ in 0..xi_trials {
                    let args: Vec<XiElement> = (0..n).map(|_| random_xi_any(&mut rng, &alg, 1)).collect::<Result<_>>()?;
                    jac.push((alg.clone(), args));
                }
            }
            let b = alg.clone().base();
            for n in 1..=3.min(top) {
                for _ in 0..xi_trials {
                    let args: Vec<XiElement> = (0..n).map(|_| random_xi_any(&mut rng, &b, 1)).collect::<Result<_>>()?;
                    base.push((b.clone(), args));
                }
            }
        }
        let pairs = XiAlgebra::pairs(ms);
        for n in 1..=3.min(top) {
            for _ in 0..xi_trials {
                let args: Vec<XiElement> = (0..n)
                    .map(|_| {
                        let j = rng.gen_range(0..ms.m);
                        random_xi(&mut rng, &pairs, 1, j, 1)
                    })
                    .collect::<Result<_>>()?;
                strict.push((ms.clone(), args));
            }
        }
    }
    checks.push(par_tally("xi_jacobi", &jac, |(alg, args)| {
        Ok(jacobi_on(alg, args)?.map(|d| json!({ "instance": ms_label(&alg.ms), "pairs": alg.pairs, "args": format!("{args:?}"), "defect": format!("{d:?}") })))
    }));
    checks.push(par_tally("base_row_closed", &base, |(alg, args)| {
        let out = alg.bracket(args)?;
        let closed = out.as_ref().is_none_or(|e| e.vdeg == 0);
        let jac = jacobi_on(alg, args)?.is_none();
        Ok(unless(closed && jac, || json!({ "instance": ms_label(&alg.ms), "pairs": alg.pairs, "args": format!("{args:?}") })))
    }));
    checks.push(par_tally("pi1_phi1_strict", &strict, |(ms, args)| {
        let src = XiAlgebra::pairs(ms);
        let fields = MultivectorAlgebra { dim: ms.dim, max_degree: ms.m, strong: false };
        let pi = |a: &[XiElement]| -> Result<Option<MultiVector>> { Ok(if a.len() == 1 { pi1(&a[0]) } else { None }) };
        let forms = XiAlgebra::forms(ms);
        let phi = |a: &[XiElement]| -> Result<Option<XiElement>> { Ok(if a.len() == 1 { Some(phi1(&a[0])) } else { None }) };
        let d1 = morphism_defect_on(&src, &fields, &pi, args)?;
        let d2 = morphism_defect_on(&src, &forms, &phi, args)?;
        Ok(unless(d1.is_none() && d2.is_none(), || {
            json!({ "instance": ms_label(ms), "args": format!("{args:?}"), "pi1": d1.map(|x| x.to_string()), "phi1": format!("{d2:?}") })
        }))
    }));
    if let Some(c) = checks.iter_mut().find(|c| c.name == "naive_jacobi_witness_found") {
        if c.failures == 0 {
            c.witnesses = witnesses;
        }
    }
    Ok(checks)
}

// ---------------------------------------------------------------- transfer

fn transfer_checks(name: &str, input: &TransferInput, max_n: usize, checks: &mut Vec<Check>) -> Result<()> {
    let sub = hamiltonian_subcomplex(&input.d, &input.f);
    let p = construct_p(input, &sub)?;
    let mut jac = Vec::new();
    let mut strict = Vec::new();
    let mut base = Vec::new();
    for pairs in [false, true] {
        let q = build_q(input, &sub, &p, pairs)?;
        for n in 1..=max_n {
            let d = check_jacobi(&q.presentation, n)?;
            jac.push(Ok(unless(d.is_zero(), || json!({ "instance": name, "pairs": pairs, "n": n, "defect": d }))));
        }
        strict.push(Ok(unless(to_g_defect_free(input, &q, 3.min(max_n))?, || json!({ "instance": name, "pairs": pairs }))));
        let (row, _) = q.base_row()?;
        for n in 1..=max_n {
            let d = check_jacobi(&row, n)?;
            base.push(Ok(unless(d.is_zero(), || json!({ "instance": name, "pairs": pairs, "n": n, "defect": d }))));
        }
    }
    checks.push(tally(&format!("{name}_q_jacobi"), jac));
    checks.push(tally(&format!("{name}_p_strict_morphism"), strict));
    checks.push(tally(&format!("{name}_base_row_jacobi"), base));
    Ok(())
}

fn suite_transfer(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let max_n = 4.min(cfg.max_arity);
    let mut checks = Vec::new();
    let fin = FiniteInstance::random(cfg.seed)?;
    transfer_checks("finite", &fin.input, max_n, &mut checks)?;

    let input = &fin.input;
    let sub = hamiltonian_subcomplex(&input.d, &input.f);
    let p = construct_p(input, &sub)?;
    let p2 = shift_p_by_central(input, &sub, &p, &fin.central());
    let mut outcomes = vec![Ok(unless(p != p2, || json!("second p equals the first")))];
    for pairs in [false, true] {
        let a = build_q(input, &sub, &p, pairs)?;
        let b = build_q(input, &sub, &p2, pairs)?;
        outcomes.push(Ok(unless(a.presentation.brackets == b.presentation.brackets, || json!({ "pairs": pairs, "first": a.presentation, "second": b.presentation }))));
    }
    checks.push(tally("finite_p_independence", outcomes));

    let geo = GeometricInstance::new()?;
    transfer_checks("geometric", &geo.input, max_n, &mut checks)?;
    let gsub = hamiltonian_subcomplex(&geo.input.d, &geo.input.f);
    let gp = construct_p(&geo.input, &gsub)?;
    let q = build_q(&geo.input, &gsub, &gp, false)?;
    let bad = geo.xi_mismatches(&q)?;
    checks.push(Check { name: "geometric_matches_xi_bracket".into(), trials: 1, failures: bad.len().min(1), witnesses: bad.into_iter().map(Value::from).collect() });
    Ok(checks)
}

// ---------------------------------------------------------------- roundtrip

fn suite_roundtrip(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let max_n = 3.min(cfg.max_arity);
    let mut checks = Vec::new();
    let fin = FiniteInstance::random(cfg.seed)?;
    let input = &fin.input;
    let sub = hamiltonian_subcomplex(&input.d, &input.f);
    let p = construct_p(input, &sub)?;
    let q = build_q(input, &sub, &p, false)?;
    let qt = build_q(input, &sub, &p, true)?;
    let mut corr = Vec::new();
    let mut witness = Vec::new();
    for act in &fin.actions {
        let r = roundtrip_check(input, &q, &qt, act, "finite", max_n)?;
        let ok = r.morphism_q && r.morphism_q_tilde && r.synchronized && r.homotopy_roundtrip && r.morphism_roundtrip;
        corr.push(Ok(unless(ok, || json!(r))));
        if act.source.brackets.contains_key(&1) {
            witness.push(Ok(unless(r.outside_witness.is_some(), || json!({ "source": act.name, "witness": null }))));
        }
    }
    checks.push(tally("finite_correspondence_roundtrips", corr));
    checks.push(tally("finite_hypothesis_not_vacuous", witness));

    // Gallery: homotopy → lift → homotopy and lift → homotopy → lift.
    let mut outcomes = Vec::new();
    for e in gallery() {
        let a = &e.action;
        let h = match construct_homotopy(a) {
            Ok(h) => h,
            Err(Error::Unsolvable(_)) => continue,
            Err(err) => return Err(err),
        };
        let r = (|| -> Result<Option<Value>> {
            let lift = homotopy_to_lift(a, &h)?;
            let back = lift_to_homotopy(a, &lift)?;
            let again = homotopy_to_lift(a, &back)?;
            Ok(unless(back == h && again == lift, || json!({ "entry": e.name, "homotopy": homotopy_json(a, &h), "back": homotopy_json(a, &back) })))
        })();
        outcomes.push(r);
        if let MomentumCandidate::LinftyLift(l) | MomentumCandidate::StrongLift(l) = &e.candidate {
            let r = (|| -> Result<Option<Value>> {
                let hh = lift_to_homotopy(a, l)?;
                let again = homotopy_to_lift(a, &hh)?;
                Ok(unless(&again == l, || json!({ "entry": e.name, "lift": lift_json(a, l), "again": lift_json(a, &again) })))
            })();
            outcomes.push(r);
        }
    }
    checks.push(tally("gallery_roundtrips", outcomes));

    // A null-homotopy of the l₁ toy violating (h∘l₁)(L) = 0 is a valid hmm with no lift.
    let toy = l1_toy()?;
    let bad = l1_toy_non_hamiltonian(&toy)?;
    let hmm = check_hmm(&toy, &bad)?.passed;
    let refused = matches!(homotopy_to_lift(&toy, &bad), Err(Error::Hypothesis(_)));
    checks.push(tally(
        "moment_hypothesis_not_vacuous",
        vec![Ok(unless(hmm && refused, || json!({ "hmm": hmm, "lift_refused": refused, "homotopy": homotopy_json(&toy, &bad) })))],
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- moment

fn equivalence_outcome(rep: EquivalenceReport, want: bool, min_notions: usize) -> Option<Value> {
    let ok = rep.agree && rep.hypothesis_violations.is_empty() && rep.notions.len() >= min_notions && rep.notions.values().all(|&v| v == want);
    unless(ok, || json!(rep))
}

/// Classical co-momentum `μ(e_x) = y`, `μ(e_y) = −x`, extended by `μ(c) = ι_{∂x∧∂y}ω` when present.
fn classical_translation_homotopy(a: &Action) -> Result<crate::linfty::WordMap<Form>> {
    let mut mu = CoMomentum::from([(0, RationalPoly::var(2, 1)), (1, RationalPoly::var(2, 0).scale(&q(-1)))]);
    if let Some(c) = a.source.space.index_of("c") {
        let xy = wedge_all(2, &[MultiVector::basis(2, &[0]), MultiVector::basis(2, &[1])])?;
        let v = contract(&xy, &a.ms.omega)?;
        mu.insert(c, v.coeff(&[]));
    }
    Ok(homotopy_of(a, &mu))
}

fn suite_moment(_cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut outcomes = Vec::new();
    for e in gallery() {
        let got = evaluate_entry(e);
        outcomes.push(got.map(|g| unless(g == e.expected, || json!({ "entry": e.name, "expected": e.expected, "got": g }))));
    }
    checks.push(tally("gallery_expectations", outcomes));

    let heis = translations_heisenberg()?;
    let classical = classical_translation_homotopy(&heis)?;
    let mut outcomes = vec![
        equivalence_suite(&heis, &MomentumCandidate::Homotopy(classical.clone())).map(|r| equivalence_outcome(r, true, 6)),
        equivalence_suite(&heis, &MomentumCandidate::Homotopy(perturbed(&heis, &classical))).map(|r| equivalence_outcome(r, false, 2)),
    ];
    let ab = translations_abelian()?;
    outcomes.push(equivalence_suite(&ab, &MomentumCandidate::Homotopy(classical_translation_homotopy(&ab)?)).map(|r| equivalence_outcome(r, false, 6)));
    checks.push(tally("translations_five_notions", outcomes));

    let so3 = so3_action()?;
    let h = construct_homotopy(&so3)?;
    let outcomes = vec![
        equivalence_suite(&so3, &MomentumCandidate::Homotopy(h.clone())).map(|r| equivalence_outcome(r, true, 3)),
        equivalence_suite(&so3, &MomentumCandidate::Homotopy(perturbed(&so3, &h))).map(|r| equivalence_outcome(r, false, 2)),
    ];
    checks.push(tally("so3_equivalences", outcomes));

    // A dilation is not multisymplectic: the action checker rejects it and hmm refuses it.
    let src = LInftyPresentation::abelian(GradedSpaceFD::new(vec![("e".into(), 1)])?, 4)?;
    let dil = Action::strict("dilation on (R^3, vol)", PreMS::volume(3), src, &[("e", "x1*d(1)")], false)?;
    let rep = check_action(&dil)?;
    let refused = matches!(check_hmm(&dil, &crate::linfty::WordMap::new(dil.source.space.clone())), Err(Error::Hypothesis(_)));
    checks.push(tally(
        "non_multisymplectic_rejected",
        vec![Ok(unless(rep.condition("multisymplectic") == Some(false) && !rep.passed && refused, || json!(rep)))],
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- compute

/// Exit status plus JSON payload of a single computation.
pub struct Computed {
    pub clean: bool,
    pub value: Value,
}

fn largest_index(src: &str) -> usize {
    crate::text::parse_terms(src)
        .map(|ts| {
            ts.iter()
                .flat_map(|t| t.vars.iter().map(|v| v.0).chain(t.wedge.iter().flat_map(|w| w.1.iter().copied())))
                .max()
                .unwrap_or(1)
        })
        .unwrap_or(1)
}

/// Dimension for text inputs: `--dim` if given singly, else the largest index mentioned.
fn input_dim(explicit: Option<usize>, inputs: &[String]) -> usize {
    explicit.unwrap_or_else(|| inputs.iter().filter(|s| !s.trim_start().starts_with('{')).map(|s| largest_index(s)).max().unwrap_or(1))
}

fn parse_section<K: crate::cartan::SectionKind>(dim: usize, src: &str) -> Result<crate::cartan::Sections<K>> {
    let s = src.trim();
    if s.starts_with('{') {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    } else {
        crate::cartan::Sections::<K>::parse(dim, s)
    }
}

fn arity_exact(op: &str, inputs: &[String], n: usize) -> Result<()> {
    if inputs.len() != n {
        return arg(format!("`{op}` takes {n} input file(s), got {}", inputs.len()));
    }
    Ok(())
}

/// Evaluates `op` on file contents. `dim` applies to text inputs; `omega` to
/// classification (default: the volume form).
pub fn compute(op: &str, inputs: &[String], dim: Option<usize>, omega: Option<&PreMS>) -> Result<Computed> {
    let d = input_dim(dim, inputs);
    let mvs = || inputs.iter().map(|s| parse_section::<FieldKind>(d, s)).collect::<Result<Vec<_>>>();
    let ok = |v: Value| Ok(Computed { clean: true, value: v });
    match op {
        "schouten" => {
            arity_exact(op, inputs, 2)?;
            let x = mvs()?;
            ok(json!({ "result": schouten(&x[0], &x[1])?.to_string() }))
        }
        "wedge" => ok(json!({ "result": wedge_all(d, &mvs()?)?.to_string() })),
        "nu" => ok(json!({ "result": nu_n(&mvs()?)?.to_string() })),
        "jacobi" => {
            let w = mvs()?;
            let j = jacobi_defect(&w, w.len())?;
            Ok(Computed { clean: j.is_zero(), value: json!({ "defect": j.to_string() }) })
        }
        "d" => {
            arity_exact(op, inputs, 1)?;
            ok(json!({ "result": exterior_d(&parse_section::<FormKind>(d, &inputs[0])?).to_string() }))
        }
        "contract" | "lie" => {
            arity_exact(op, inputs, 2)?;
            let x = parse_section::<FieldKind>(d, &inputs[0])?;
            let a = parse_section::<FormKind>(d, &inputs[1])?;
            let r = if op == "contract" { contract(&x, &a)? } else { lie_derivative(&x, &a)? };
            ok(json!({ "result": r.to_string() }))
        }
        "primitive" => {
            arity_exact(op, inputs, 1)?;
            let b = parse_section::<FormKind>(d, &inputs[0])?;
            let a = poincare_primitive(&b)?;
            ok(json!({ "result": a.to_string(), "check": exterior_d(&a) == b }))
        }
        "classify" => {
            arity_exact(op, inputs, 1)?;
            let x = parse_section::<FieldKind>(d, &inputs[0])?;
            let ms = omega.cloned().unwrap_or_else(|| PreMS::volume(x.dim()));
            ms.check_dim(x.dim())?;
            ok(json!(classify_field(&ms, &x)?))
        }
        "check-action" => {
            arity_exact(op, inputs, 1)?;
            let rep = check_action(&Action::from_json(&inputs[0])?)?;
            Ok(Computed { clean: rep.passed, value: json!(rep) })
        }
        "momentum" => {
            arity_exact(op, inputs, 1)?;
            let a = Action::from_json(&inputs[0])?;
            let h = construct_homotopy(&a)?;
            let rep = check_hmm(&a, &h)?;
            let eq = equivalence_suite(&a, &MomentumCandidate::Homotopy(h.clone()))?;
            Ok(Computed { clean: rep.passed, value: json!({ "homotopy": homotopy_json(&a, &h), "hmm": rep, "equivalence": eq }) })
        }
        other => arg(format!(
            "unknown operation `{other}`; expected schouten, wedge, nu, jacobi, d, contract, lie, primitive, classify, check-action or momentum"
        )),
    }
}

// ---------------------------------------------------------------- gallery

pub fn gallery_list() -> Value {
    json!(gallery()
        .iter()
        .map(|e| json!({ "name": e.name, "action": e.action.name, "expected": e.expected }))
        .collect::<Vec<_>>())
}

/// Full export of one entry with its evaluated outcomes.
pub fn gallery_export(name: &str) -> Result<Computed> {
    let e = gallery()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Argument(format!("no gallery entry `{name}`")))?;
    let got = evaluate_entry(e)?;
    let candidate = match &e.candidate {
        MomentumCandidate::Homotopy(h) => json!({ "kind": "hmm", "values": homotopy_json(&e.action, h) }),
        MomentumCandidate::HamiltonianHomotopy(h) => json!({ "kind": "hhmm", "values": homotopy_json(&e.action, h) }),
        MomentumCandidate::LinftyLift(l) => json!({ "kind": "lmm", "values": lift_json(&e.action, l) }),
        MomentumCandidate::StrongLift(l) => json!({ "kind": "slmm", "values": lift_json(&e.action, l) }),
    };
    Ok(Computed {
        clean: got == e.expected,
        value: json!({ "name": e.name, "action": e.action.to_json(), "candidate": candidate, "expected": e.expected, "evaluated": got }),
    })
}

/// Exit code for an engine error: 1 for mathematical obstructions, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unsolvable(_) | Error::Hypothesis(_) => 1,
        Error::Argument(_) | Error::Malformed(_) | Error::DimMismatch(..) | Error::ArityBound(..) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { trials: 4, max_arity: 4, ..SuiteConfig::default() }
    }

    #[test]
    fn fast_suites_pass() {
        for s in ["signs", "decalage", "insertion", "gerstenhaber", "cartan"] {
            let r = run_suite(s, &small()).unwrap();
            assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn unknown_suite_is_an_argument_error() {
        let e = run_suite("nope", &small()).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        assert!(SuiteConfig { trials: 0, ..small() }.validate().is_err());
    }

    #[test]
    fn compute_examples() {
        let r = compute("schouten", &["d(1)".into(), "d(2)".into()], None, None).unwrap();
        assert_eq!(r.value["result"], "0");
        let r = compute("d", &["x1*dx(2)".into()], None, None).unwrap();
        assert_eq!(r.value["result"], "dx(1,2)");
        let r = compute("classify", &["d(1)".into()], Some(3), None).unwrap();
        assert_eq!(r.value["hamiltonian"], true);
        assert!(matches!(compute("wat", &[], None, None), Err(Error::Argument(_))));
        assert!(matches!(compute("d", &["x1*dy(2)".into()], None, None), Err(Error::Malformed(_))));
    }

    #[test]
    fn mainforms_flag_selection() {
        let cfg = SuiteConfig { dims: vec![3], m: Some(2), ..small() };
        assert_eq!(ms_instances(&cfg, &[]).unwrap(), vec![PreMS::volume(3)]);
        let bad = SuiteConfig { dims: vec![4], m: Some(2), ..small() };
        assert!(ms_instances(&bad, &[]).is_err());
    }
}
