//! Seeded random instance generation. All randomness derives from one seed
//! through named sub-streams, so reports are reproducible.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::{Sections, SectionKind};
use crate::multilinear::{GradedMultiMap, GradedSpaceFD, Variant};
use crate::poly::RationalPoly;
use crate::signs::for_each_combination;
use crate::rat::{q, qf, Q};

pub type Rng64 = ChaCha8Rng;

/// Independent generator for the stream `name` under `seed`.
pub fn rng_for(seed: u64, name: &str) -> Rng64 {
    // FNV-1a of the name, mixed with the seed by SplitMix64.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// A coefficient from the pool `{0, ±1, ±1/2, ±2}`.
pub fn pool_coeff(rng: &mut Rng64) -> Q {
    [q(0), q(1), q(-1), qf(1, 2), qf(-1, 2), q(2), q(-2)].choose(rng).cloned().expect("nonempty pool")
}

/// A nonzero coefficient from the pool.
pub fn pool_nonzero(rng: &mut Rng64) -> Q {
    [q(1), q(-1), qf(1, 2), qf(-1, 2), q(2), q(-2)].choose(rng).cloned().expect("nonempty pool")
}

/// Random degree-respecting map with single output; each admissible entry is
/// filled with probability `density`.
pub fn random_map(
    rng: &mut Rng64,
    source: &GradedSpaceFD,
    target: &GradedSpaceFD,
    arity: usize,
    degree: i64,
    density: f64,
) -> GradedMultiMap {
    let mut m = GradedMultiMap::zero(source.clone(), target.clone(), arity, 1, degree);
    for t in source.tuples(arity) {
        let d = source.tuple_degree(&t) + degree;
        for o in 0..target.dim() {
            if target.degree(o) == d && rng.gen_bool(density) {
                m.add(t.clone(), vec![o], pool_coeff(rng)).expect("degree checked");
            }
        }
    }
    m
}

/// Random (anti)symmetric map, obtained by symmetrizing a random map.
pub fn random_graded_symmetric(
    rng: &mut Rng64,
    space: &GradedSpaceFD,
    arity: usize,
    degree: i64,
    variant: Variant,
    density: f64,
) -> GradedMultiMap {
    random_map(rng, space, space, arity, degree, density)
        .symmetrize(variant)
        .expect("same shape")
}

/// Random degrees in `lo..=hi`.
pub fn random_degrees(rng: &mut Rng64, n: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Random polynomial with at most `terms` monomials of total degree `≤ max_deg`.
pub fn random_poly(rng: &mut Rng64, dim: usize, max_deg: u32, terms: usize) -> RationalPoly {
    let mut p = RationalPoly::zero(dim);
    for _ in 0..terms {
        let budget = rng.gen_range(0..=max_deg);
        let mut e = vec![0u32; dim];
        for _ in 0..budget {
            e[rng.gen_range(0..dim)] += 1;
        }
        p.add_term(e, pool_coeff(rng));
    }
    p
}

/// Random homogeneous section: each index set receives a random
/// coefficient with probability `density`; never returns zero unless the
/// degree exceeds the dimension.
pub fn random_sections<K: SectionKind>(
    rng: &mut Rng64,
    dim: usize,
    degree: usize,
    coeff_deg: u32,
    density: f64,
) -> Sections<K> {
    let mut sets = Vec::new();
    for_each_combination(dim, degree, &mut |c| sets.push(c.to_vec()));
    loop {
        let mut out = Sections::<K>::zero(dim, degree);
        for s in &sets {
            if rng.gen_bool(density) {
                let p = random_poly(rng, dim, coeff_deg, 2);
                out.add_assign_scaled(&Sections::term(dim, s, p), &q(1));
            }
        }
        if !out.is_zero() || sets.is_empty() {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = rng_for(42, "signs").next_u64();
        assert_eq!(a, rng_for(42, "signs").next_u64());
        assert_ne!(a, rng_for(42, "cartan").next_u64());
        assert_ne!(a, rng_for(43, "signs").next_u64());
    }
}
