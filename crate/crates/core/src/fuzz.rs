//! Seeded random test instances with independently known answers.
//!
//! A random complex is assembled from atoms — lone generators that
//! survive to homology and acyclic `d(x) = y` pairs — and then disguised
//! by a random invertible change of basis in every grade. The atom
//! counts are returned alongside, so the generated instance doubles as
//! its own homology oracle.

use std::collections::BTreeMap;

use rand::Rng;

use crate::chain::{ChainComplex, Grade, GradedSpace, UngradedComplex};
use crate::f2linalg::BitMatrix;

/// Random valid graded complex with at most `max_gens` generators spread
/// over grades 0..=3, together with its per-grade homology dimensions.
pub fn graded_complex(
    rng: &mut impl Rng,
    max_gens: usize,
) -> (ChainComplex, BTreeMap<Grade, usize>) {
    let top: Grade = rng.random_range(0..=3);
    let budget = max_gens.max(1);
    // survivors[g] lone generators in grade g; pairs[g] acyclic pairs
    // (x in grade g+1, y in grade g).
    let mut survivors = BTreeMap::new();
    let mut pairs: BTreeMap<Grade, usize> = BTreeMap::new();
    let mut used = 0usize;
    for g in 0..=top {
        let s = rng
            .random_range(0..=3usize)
            .min(budget.saturating_sub(used));
        used += s;
        survivors.insert(g, s);
        if g < top {
            let p = rng
                .random_range(0..=3usize)
                .min(budget.saturating_sub(used) / 2);
            used += 2 * p;
            pairs.insert(g, p);
        }
    }

    // Basis layout in grade g: x-members of pairs[g-1] first, then the
    // survivors, then y-members of pairs[g].
    let pair_count = |g: Grade| pairs.get(&g).copied().unwrap_or(0);
    let dim =
        |g: Grade| pair_count(g - 1) + survivors.get(&g).copied().unwrap_or(0) + pair_count(g);

    let mut labels = BTreeMap::new();
    for g in 0..=top {
        labels.insert(
            g,
            (0..dim(g)).map(|i| format!("g{g}_{i}")).collect::<Vec<_>>(),
        );
    }

    // Base differential d_{g+1}: x-member k of pairs[g] maps to y-member k.
    let mut diffs = BTreeMap::new();
    for g in 0..top {
        let mut d = BitMatrix::zeros(dim(g), dim(g + 1));
        let y_offset = pair_count(g - 1) + survivors[&g];
        for k in 0..pair_count(g) {
            d.set(y_offset + k, k, true);
        }
        diffs.insert(g + 1, d);
    }

    // Change of basis per grade: d'_k = u_{k-1} d_k u_k^{-1}.
    let mut basis = BTreeMap::new();
    for g in 0..=top {
        basis.insert(g, BitMatrix::random_invertible(dim(g), rng));
    }
    let diffs = diffs
        .into_iter()
        .map(|(g, d)| {
            let u_tgt = &basis[&(g - 1)];
            let u_src_inv = basis[&g].inverse().expect("invertible basis change");
            (g, &(u_tgt * &d) * &u_src_inv)
        })
        .collect();

    let complex = ChainComplex::new(GradedSpace::new(labels).expect("fresh labels"), diffs)
        .expect("shapes are consistent by construction");
    debug_assert!(complex.is_valid());
    (complex, survivors)
}

/// Random valid ungraded complex with at most `max_gens` generators and
/// its total homology dimension.
pub fn ungraded_complex(rng: &mut impl Rng, max_gens: usize) -> (UngradedComplex, usize) {
    let budget = max_gens.max(1);
    let s = rng.random_range(0..=budget);
    let p = rng.random_range(0..=(budget - s) / 2);
    let dim = s + 2 * p;
    let mut d = BitMatrix::zeros(dim, dim);
    for k in 0..p {
        // pair k: x at index s + 2k, y at index s + 2k + 1
        d.set(s + 2 * k + 1, s + 2 * k, true);
    }
    let u = BitMatrix::random_invertible(dim, rng);
    let d = &(&u * &d) * &u.inverse().expect("invertible");
    let labels = (0..dim).map(|i| format!("u{i}")).collect();
    let complex = UngradedComplex::new(labels, d).expect("square differential");
    debug_assert!(complex.is_valid());
    (complex, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn graded_instances_are_valid_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (c, hom) = graded_complex(&mut rng, 20);
            assert!(c.total_dim() <= 20);
            assert!(c.is_valid());
            assert_eq!(c.homology_dims().unwrap(), hom);
        }
    }

    #[test]
    fn ungraded_instances_are_valid_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (c, hom) = ungraded_complex(&mut rng, 15);
            assert!(c.dim() <= 15);
            assert!(c.is_valid());
            assert_eq!(c.homology_dim().unwrap(), hom);
        }
    }
}
