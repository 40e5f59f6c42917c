//! Algebraic invariants as property tests. Structured inputs are drawn from a
//! proptest-chosen seed so shrinking still yields a reproducible witness.

use mscalc::cartan::{
    cartan_defects, coalgebra_sum, contract, exterior_d, jacobi_defect, nu_n, schouten, wedge_all, FieldKind, Form, FormKind,
    MultiVector,
};
use mscalc::msgeo::{cochain_check_omega_tilde, random_ham_pair, PreMS};
use mscalc::multilinear::{decalage_of_map, insert, GradedSpaceFD, Variant};
use mscalc::random::{random_graded_symmetric, random_sections, rng_for, Rng64};
use mscalc::rat::{q, qsign};
use mscalc::signs::{koszul_sign, multinomial, sign_pow, total_koszul_sign, unshuffle_factorize, unshuffles, Permutation};
use proptest::prelude::*;
use rand::Rng;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v.iter().map(|i| i + 1).collect::<Vec<_>>()).unwrap())
}

fn perm_pair_with_degrees() -> impl Strategy<Value = (Permutation, Permutation, Vec<i64>)> {
    (1usize..=7).prop_flat_map(|n| (perm(n), perm(n), prop::collection::vec(-3i64..=3, n)))
}

fn mv(rng: &mut Rng64, dim: usize) -> MultiVector {
    let k = rng.gen_range(0..=dim);
    random_sections::<FieldKind>(rng, dim, k, 2, 0.5)
}

fn form(rng: &mut Rng64, dim: usize) -> Form {
    let k = rng.gen_range(0..=dim);
    random_sections::<FormKind>(rng, dim, k, 2, 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn koszul_sign_is_a_cocycle((a, b, degs) in perm_pair_with_degrees()) {
        let lhs = koszul_sign(&a.compose(&b), &degs).unwrap();
        let rhs = koszul_sign(&a, &b.permute(&degs)).unwrap() * koszul_sign(&b, &degs).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn koszul_sign_of_even_degrees_is_trivial(p in (1usize..=7).prop_flat_map(perm)) {
        prop_assert_eq!(koszul_sign(&p, &vec![2; p.len()]).unwrap(), 1);
        prop_assert_eq!(koszul_sign(&p, &vec![1; p.len()]).unwrap(), p.sgn());
    }

    #[test]
    fn total_sign_is_reversal(degs in prop::collection::vec(-4i64..=4, 0..=7)) {
        let rev = koszul_sign(&Permutation::reversal(degs.len()), &degs).unwrap();
        prop_assert_eq!(total_koszul_sign(&degs), rev);
    }

    #[test]
    fn unshuffles_count_and_factor(parts in prop::collection::vec(0usize..=2, 4)) {
        let sh = unshuffles(&parts);
        prop_assert_eq!(sh.len() as u128, multinomial(&parts));
        for alpha in &sh {
            let (s, t1, t2) = unshuffle_factorize(alpha, (parts[0], parts[1], parts[2], parts[3])).unwrap();
            prop_assert_eq!(&Permutation::block_sum(&t1, &t2).compose(&s), alpha);
        }
    }

    #[test]
    fn insertion_commutes_with_decalage(seed in any::<u64>()) {
        let mut rng = rng_for(seed, "prop-insertion");
        let degs: Vec<i64> = (0..3).map(|_| rng.gen_range(-1..=1)).collect();
        let v = GradedSpaceFD::from_degrees(&degs);
        let fd = rng.gen_range(-1..=1);
        let f = random_graded_symmetric(&mut rng, &v, 2, fd, Variant::Antisym, 0.7);
        let gd = rng.gen_range(-1..=1);
        let g = random_graded_symmetric(&mut rng, &v, 2, gd, Variant::Antisym, 0.7);
        let lhs = decalage_of_map(&insert(&f, &g, Variant::Antisym).unwrap(), -1).unwrap().scale(&qsign(sign_pow(f.degree)));
        let rhs = insert(&decalage_of_map(&f, -1).unwrap(), &decalage_of_map(&g, -1).unwrap(), Variant::Sym).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schouten_symmetry(seed in any::<u64>(), dim in 2usize..=4) {
        // ν(X,Y) = [X,Y] and ν(X,f) = ν(f,X) = X(f) fix the sign (−1)^{|x||y|}.
        let mut rng = rng_for(seed, "prop-schouten");
        let (x, y) = (mv(&mut rng, dim), mv(&mut rng, dim));
        let s = sign_pow(x.degree() as i64 * y.degree() as i64);
        prop_assert_eq!(schouten(&x, &y).unwrap(), schouten(&y, &x).unwrap().scale(&qsign(s)));
    }

    #[test]
    fn higher_brackets_satisfy_jacobi(seed in any::<u64>(), dim in 2usize..=4, n in 1usize..=4) {
        let mut rng = rng_for(seed, "prop-jacobi");
        let w: Vec<MultiVector> = (0..n).map(|_| mv(&mut rng, dim)).collect();
        prop_assert!(jacobi_defect(&w, n).unwrap().is_zero());
    }

    #[test]
    fn coalgebra_sum_is_scaled_nu(seed in any::<u64>(), dim in 2usize..=4, n in 3usize..=4) {
        let mut rng = rng_for(seed, "prop-coalgebra");
        let w: Vec<MultiVector> = (0..n).map(|_| mv(&mut rng, dim)).collect();
        prop_assert_eq!(coalgebra_sum(&w).unwrap(), nu_n(&w).unwrap().scale(&q(1 << (n - 2))));
    }

    #[test]
    fn cartan_calculus(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = rng_for(seed, "prop-cartan");
        let (x, y, a) = (mv(&mut rng, dim), mv(&mut rng, dim), form(&mut rng, dim));
        for d in cartan_defects(&x, &y, &a).unwrap() {
            prop_assert!(d.is_zero());
        }
        prop_assert!(exterior_d(&exterior_d(&a)).is_zero());
        prop_assert_eq!(contract(&x.wedge(&y).unwrap(), &a).unwrap(), contract(&x, &contract(&y, &a).unwrap()).unwrap());
    }

    #[test]
    fn contraction_of_fields_is_reversed(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = rng_for(seed, "prop-iota");
        let n = rng.gen_range(1..=dim);
        let xs: Vec<MultiVector> = (0..n).map(|_| random_sections::<FieldKind>(&mut rng, dim, 1, 2, 0.6)).collect();
        let a = random_sections::<FormKind>(&mut rng, dim, dim, 2, 1.0);
        let hat = xs.iter().try_fold(a.clone(), |acc, x| contract(x, &acc)).unwrap();
        let lhs = contract(&wedge_all(dim, &xs).unwrap(), &a).unwrap();
        prop_assert_eq!(lhs, hat.scale(&qsign(total_koszul_sign(&vec![1; n]))));
    }

    #[test]
    fn omega_tilde_is_a_cochain_map(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = rng_for(seed, "prop-cochain");
        let ms = PreMS::volume(3);
        let w: Vec<MultiVector> = (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=2);
                random_ham_pair(&mut rng, &ms, k, 2).unwrap().field
            })
            .collect();
        prop_assert!(cochain_check_omega_tilde(&ms, &w).unwrap().is_zero());
    }
}
