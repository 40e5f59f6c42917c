//! Permutations, Koszul signs, decalage signs and unshuffles.
//!
//! Permutations act on words by `σ·(v₁⊗…⊗vₙ) = ε(σ;v) v_{σ(1)}⊗…⊗v_{σ(n)}`.
//! Composition is chosen so that this is a left action: `(σ∘τ)·v = σ·(τ·v)`,
//! i.e. `(σ∘τ)(k) = τ(σ(k))`.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

/// A sign, always `+1` or `-1`.
pub type Sign = i32;

/// `(-1)^e`.
pub fn sign_pow(e: i64) -> Sign {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn is_odd(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

/// Permutation of `{1..n}`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    img: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { img: (0..n).collect() }
    }

    /// From 1-based images.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut img = Vec::with_capacity(n);
        for &i in images {
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::Malformed(format!("{images:?} is not a permutation")));
            }
            seen[i - 1] = true;
            img.push(i - 1);
        }
        Ok(Permutation { img })
    }

    pub(crate) fn from_zero_based(img: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = img.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(a, &b)| a == b)
        });
        Permutation { img }
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.img.iter().map(|i| i + 1).collect()
    }

    /// 0-based image of the 0-based position `k`.
    pub fn at(&self, k: usize) -> usize {
        self.img[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.img
    }

    pub fn len(&self) -> usize {
        self.img.len()
    }

    pub fn is_empty(&self) -> bool {
        self.img.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// `self ∘ other`, so that `(self∘other)·v = self·(other·v)`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different length");
        Permutation { img: self.img.iter().map(|&k| other.img[k]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &i) in self.img.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { img: inv }
    }

    /// Ordinary signature.
    pub fn sgn(&self) -> Sign {
        let mut inv = 0i64;
        for k in 0..self.len() {
            for l in k + 1..self.len() {
                if self.img[k] > self.img[l] {
                    inv += 1;
                }
            }
        }
        sign_pow(inv)
    }

    /// The reordered word `(v_{σ(1)}, …, v_{σ(n)})`.
    pub fn permute<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(self.len(), xs.len(), "permutation length mismatch");
        self.img.iter().map(|&i| xs[i].clone()).collect()
    }

    /// Block sum `(a, b)` acting on the first `|a|` and last `|b|` positions.
    pub fn block_sum(a: &Permutation, b: &Permutation) -> Permutation {
        let off = a.len();
        let img = a.img.iter().copied().chain(b.img.iter().map(|&i| i + off)).collect();
        Permutation { img }
    }

    /// All of `𝒮ₙ` in lexicographic order of image words.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { img: cur.clone() });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }

    /// The full reversal `k ↦ n+1−k`.
    pub fn reversal(n: usize) -> Permutation {
        Permutation { img: (0..n).rev().collect() }
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_images(&v).map_err(serde::de::Error::custom)
    }
}

fn check_len(perm: &Permutation, degs: &[i64]) -> Result<()> {
    if perm.len() != degs.len() {
        return arg(format!(
            "permutation of length {} applied to {} degrees",
            perm.len(),
            degs.len()
        ));
    }
    Ok(())
}

/// Koszul sign `ε(σ; v)` under the parity sign rule.
pub fn koszul_sign(perm: &Permutation, degs: &[i64]) -> Result<Sign> {
    check_len(perm, degs)?;
    Ok(koszul_sign_unchecked(perm.as_slice(), degs))
}

/// Koszul sign for a 0-based image slice; lengths must agree.
pub(crate) fn koszul_sign_unchecked(img: &[usize], degs: &[i64]) -> Sign {
    let mut flips = 0u32;
    for k in 0..img.len() {
        if !is_odd(degs[img[k]]) {
            continue;
        }
        for l in k + 1..img.len() {
            if img[k] > img[l] && is_odd(degs[img[l]]) {
                flips ^= 1;
            }
        }
    }
    if flips == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^σ ε(σ; v)`.
pub fn antisym_koszul_sign(perm: &Permutation, degs: &[i64]) -> Result<Sign> {
    Ok(perm.sgn() * koszul_sign(perm, degs)?)
}

/// Sign of the full reversal: `(-1)^{Σ_i Σ_{j<i} |a_i||a_j|}`.
pub fn total_koszul_sign(degs: &[i64]) -> Sign {
    let odd = degs.iter().filter(|d| is_odd(**d)).count() as i64;
    sign_pow(odd * (odd - 1) / 2)
}

/// Decalage sign `(-1)^{Σ_{i=1}^{n} (n−i)|v_i|}`.
pub fn decalage_sign(degs: &[i64]) -> Sign {
    let n = degs.len() as i64;
    let e: i64 = degs.iter().enumerate().map(|(i, d)| (n - 1 - i as i64) * d.rem_euclid(2)).sum();
    sign_pow(e)
}

/// The `(p₁,…,p_q)`-unshuffles in lexicographic order of image words.
pub fn unshuffles(parts: &[usize]) -> Vec<Permutation> {
    let n: usize = parts.iter().sum();
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut img = Vec::with_capacity(n);
    unshuffle_rec(parts, &mut used, &mut img, &mut out);
    out
}

fn unshuffle_rec(parts: &[usize], used: &mut [bool], img: &mut Vec<usize>, out: &mut Vec<Permutation>) {
    let Some((&p, rest)) = parts.split_first() else {
        out.push(Permutation { img: img.clone() });
        return;
    };
    let free: Vec<usize> = (0..used.len()).filter(|&i| !used[i]).collect();
    for_each_combination(free.len(), p, &mut |choice| {
        for &c in choice {
            used[free[c]] = true;
            img.push(free[c]);
        }
        unshuffle_rec(rest, used, img, out);
        for &c in choice {
            used[free[c]] = false;
            img.pop();
        }
    });
}

/// Calls `f` on every `k`-subset of `0..n` as a sorted slice, in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// `(p₁,p₂)`-unshuffle test on 0-based images.
fn is_unshuffle(img: &[usize], parts: &[usize]) -> bool {
    let mut start = 0;
    for &p in parts {
        if img[start..start + p].windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        start += p;
    }
    start == img.len()
}

/// Factor `α ∈ 𝒮h(p₁,p₂,p₃,p₄)` as `α = (τ₁,τ₂)∘σ` with
/// `σ ∈ 𝒮h(p₁+p₂, p₃+p₄)`, `τ₁ ∈ 𝒮h(p₁,p₂)`, `τ₂ ∈ 𝒮h(p₃,p₄)`.
pub fn unshuffle_factorize(
    alpha: &Permutation,
    split: (usize, usize, usize, usize),
) -> Result<(Permutation, Permutation, Permutation)> {
    let (p1, p2, p3, p4) = split;
    if alpha.len() != p1 + p2 + p3 + p4 || !is_unshuffle(alpha.as_slice(), &[p1, p2, p3, p4]) {
        return arg(format!("{:?} is not a ({p1},{p2},{p3},{p4})-unshuffle", alpha.images()));
    }
    let a = p1 + p2;
    let mut first: Vec<usize> = alpha.img[..a].to_vec();
    let mut second: Vec<usize> = alpha.img[a..].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    let pos = |block: &[usize], v: usize| block.iter().position(|&b| b == v).expect("value in block");
    let tau1 = Permutation { img: alpha.img[..a].iter().map(|&v| pos(&first, v)).collect() };
    let tau2 = Permutation { img: alpha.img[a..].iter().map(|&v| pos(&second, v)).collect() };
    let sigma = Permutation { img: first.into_iter().chain(second).collect() };
    Ok((sigma, tau1, tau2))
}

/// Multinomial coefficient `n!/(p₁!⋯p_q!)`.
pub fn multinomial(parts: &[usize]) -> u128 {
    let mut acc: u128 = 1;
    let mut n: u128 = 0;
    for &p in parts {
        for k in 1..=p as u128 {
            n += 1;
            acc = acc * n / k;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(img: &[usize]) -> Permutation {
        Permutation::from_images(img).unwrap()
    }

    /// Oracle: sort the word by adjacent transpositions, flipping on odd⊗odd swaps.
    fn bubble_sign(perm: &Permutation, degs: &[i64]) -> Sign {
        let mut word: Vec<usize> = perm.as_slice().to_vec();
        let mut s = 1;
        for i in 0..word.len() {
            for j in 0..word.len() - 1 - i {
                if word[j] > word[j + 1] {
                    if is_odd(degs[word[j]]) && is_odd(degs[word[j + 1]]) {
                        s = -s;
                    }
                    word.swap(j, j + 1);
                }
            }
        }
        s
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&p(&[1, 2]), &[5, 7]).unwrap(), 1);
        assert_eq!(koszul_sign(&p(&[2, 1]), &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&p(&[2, 1]), &[2, 3]).unwrap(), 1);
        assert!(koszul_sign(&p(&[2, 1]), &[1]).is_err());
    }

    #[test]
    fn antisym_examples() {
        assert_eq!(antisym_koszul_sign(&p(&[1, 2, 3]), &[1, 2, 3]).unwrap(), 1);
        assert_eq!(antisym_koszul_sign(&p(&[2, 1]), &[1, 1]).unwrap(), 1);
        assert_eq!(antisym_koszul_sign(&p(&[2, 1]), &[2, 2]).unwrap(), -1);
    }

    #[test]
    fn total_and_decalage_examples() {
        assert_eq!(total_koszul_sign(&[1, 1, 1]), -1);
        assert_eq!(total_koszul_sign(&[1, 1, 1, 1]), 1);
        assert_eq!(total_koszul_sign(&[]), 1);
        assert_eq!(total_koszul_sign(&[3]), 1);
        assert_eq!(decalage_sign(&[4]), 1);
        assert_eq!(decalage_sign(&[1, 0]), -1);
        assert_eq!(decalage_sign(&[2, 1, 1]), -1);
    }

    #[test]
    fn koszul_matches_bubble_oracle_exhaustively() {
        for n in 0..=5 {
            for perm in Permutation::all(n) {
                for mask in 0..(1u32 << n) {
                    let degs: Vec<i64> = (0..n).map(|i| ((mask >> i) & 1) as i64 + 2).collect();
                    assert_eq!(koszul_sign(&perm, &degs).unwrap(), bubble_sign(&perm, &degs));
                }
            }
        }
    }

    #[test]
    fn unshuffle_examples() {
        assert_eq!(unshuffles(&[3]), vec![Permutation::identity(3)]);
        let u: Vec<Vec<usize>> = unshuffles(&[2, 1]).iter().map(|s| s.images()).collect();
        assert_eq!(u, vec![vec![1, 2, 3], vec![1, 3, 2], vec![2, 3, 1]]);
        assert_eq!(unshuffles(&[1, 1]).len(), 2);
    }

    #[test]
    fn unshuffles_match_filter_oracle() {
        for parts in [vec![2, 2], vec![1, 2, 1], vec![3, 1, 1], vec![1, 1, 1, 1], vec![2, 3]] {
            let n = parts.iter().sum();
            let oracle: Vec<Permutation> = Permutation::all(n)
                .into_iter()
                .filter(|s| is_unshuffle(s.as_slice(), &parts))
                .collect();
            assert_eq!(unshuffles(&parts), oracle);
        }
    }

    #[test]
    fn combinations() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut empty = 0;
        for_each_combination(3, 0, &mut |_| empty += 1);
        assert_eq!(empty, 1);
        let mut none = 0;
        for_each_combination(2, 3, &mut |_| none += 1);
        assert_eq!(none, 0);
    }

    #[test]
    fn factorize_examples() {
        let (s, t1, t2) = unshuffle_factorize(&Permutation::identity(5), (1, 2, 1, 1)).unwrap();
        assert!(s.is_identity() && t1.is_identity() && t2.is_identity());
        let alpha = p(&[1, 3, 2, 4]);
        let (s, t1, t2) = unshuffle_factorize(&alpha, (1, 1, 1, 1)).unwrap();
        assert_eq!(Permutation::block_sum(&t1, &t2).compose(&s), alpha);
        assert!(unshuffle_factorize(&p(&[2, 1, 3, 4]), (2, 1, 1, 0)).is_err());
    }

    #[test]
    fn compose_is_left_action() {
        let degs = [1, 2, 3, 1];
        let a = p(&[2, 4, 1, 3]);
        let b = p(&[3, 1, 4, 2]);
        let word: Vec<i64> = (0..4).collect();
        assert_eq!(a.compose(&b).permute(&word), a.permute(&b.permute(&word)));
        let lhs = koszul_sign(&a.compose(&b), &degs).unwrap();
        let rhs = koszul_sign(&a, &b.permute(&degs)).unwrap() * koszul_sign(&b, &degs).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[2, 1]), 3);
        assert_eq!(multinomial(&[1, 1, 1, 1]), 24);
        assert_eq!(multinomial(&[3, 4]), 35);
    }
}
