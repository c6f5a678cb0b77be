//! Seeded random polarities, lattices and families.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::Result;
use crate::order::{homomorphisms, FiniteLattice, LatticeMap};
use crate::polarity::Polarity;

/// `|X|, |Y|` uniform in `min..=max`, each pair related with a density drawn per polarity.
pub fn random_polarity<R: Rng>(rng: &mut R, min: usize, max_x: usize, max_y: usize) -> Polarity {
    let nx = rng.gen_range(min..=max_x);
    let ny = rng.gen_range(min..=max_y);
    let d: f64 = rng.gen_range(0.15..0.85);
    let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(d)).collect();
    Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y])
}

/// A random lattice with at most `max` elements: the inclusion order of an
/// intersection-closed family of subsets of a small ground set.
pub fn random_lattice<R: Rng>(rng: &mut R, max: usize) -> FiniteLattice {
    assert!(max >= 1);
    let target = rng.gen_range(1..=max);
    let ground = rng.gen_range(2..=6);
    let full = BitSet::full(ground);
    let mut family: Vec<BitSet> = vec![full.clone()];
    let mut seen: HashSet<BitSet> = HashSet::from([full]);
    let mut attempts = 0;
    while family.len() < target && attempts < 64 {
        attempts += 1;
        let s = BitSet::from_indices(ground, (0..ground).filter(|_| rng.gen_bool(0.5)));
        let mut next = family.clone();
        let mut next_seen = seen.clone();
        let mut frontier = vec![s];
        while let Some(t) = frontier.pop() {
            if next_seen.insert(t.clone()) {
                frontier.extend(next.iter().map(|u| u.intersection(&t)));
                next.push(t);
            }
        }
        if next.len() <= max {
            family = next;
            seen = next_seen;
        }
    }
    family.sort();
    let n = family.len();
    let up = family
        .iter()
        .map(|a| BitSet::from_indices(n, (0..n).filter(|&j| a.is_subset(&family[j]))))
        .collect();
    let names = (0..n).map(|i| format!("l{i}")).collect();
    FiniteLattice::from_up_sets(names, up).expect("intersection-closed families with a top are lattices")
}

/// A random bounded-lattice homomorphism `l → m`, chosen among the first `limit`.
pub fn random_hom<R: Rng>(
    rng: &mut R,
    l: &Arc<FiniteLattice>,
    m: &Arc<FiniteLattice>,
    limit: usize,
    bounds: &Bounds,
) -> Result<Option<LatticeMap>> {
    let homs = homomorphisms(l, m, limit, bounds)?;
    Ok(homs.choose(rng).cloned())
}

/// `k` members drawn with replacement from `pool`.
pub fn random_family<R: Rng, T: Clone>(rng: &mut R, pool: &[T], k: usize) -> Vec<T> {
    (0..k).map(|_| pool.choose(rng).expect("nonempty pool").clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lattices_respect_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut sizes = HashSet::new();
        for _ in 0..200 {
            let l = random_lattice(&mut rng, 10);
            assert!(l.len() <= 10);
            sizes.insert(l.len());
        }
        assert!(sizes.len() >= 6, "{sizes:?}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = random_polarity(&mut ChaCha8Rng::seed_from_u64(7), 0, 5, 5);
        let b = random_polarity(&mut ChaCha8Rng::seed_from_u64(7), 0, 5, 5);
        assert_eq!(a, b);
    }
}
