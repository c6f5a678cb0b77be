use super::FiniteLattice;
use crate::bitset::BitSet;

/// Every filter of `l` (nonempty, up-closed, meet-closed; the improper
/// filter `l` itself included), sorted in bit-vector order.
///
/// A filter `F` of a finite lattice contains `⋀F` and equals `↑⋀F`, so the
/// filters are exactly the principal up-sets.
pub fn filters(l: &FiniteLattice) -> Vec<BitSet> {
    let mut out: Vec<BitSet> = l.elements().map(|a| l.up_set(a).clone()).collect();
    out.sort();
    out
}

/// Every ideal of `l`, dually.
pub fn ideals(l: &FiniteLattice) -> Vec<BitSet> {
    let mut out: Vec<BitSet> = l.elements().map(|a| l.down_set(a).clone()).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::catalog::*;

    fn is_filter(l: &FiniteLattice, s: &BitSet) -> bool {
        !s.is_empty()
            && s.iter().all(|a| l.up_set(a).is_subset(s))
            && s.iter().all(|a| s.iter().all(|b| s.contains(l.meet(a, b))))
    }

    fn is_ideal(l: &FiniteLattice, s: &BitSet) -> bool {
        !s.is_empty()
            && s.iter().all(|a| l.down_set(a).is_subset(s))
            && s.iter().all(|a| s.iter().all(|b| s.contains(l.join(a, b))))
    }

    fn brute(l: &FiniteLattice, pred: fn(&FiniteLattice, &BitSet) -> bool) -> Vec<BitSet> {
        (0..1u64 << l.len())
            .map(|m| BitSet::from_mask(l.len(), m))
            .filter(|s| pred(l, s))
            .collect()
    }

    #[test]
    fn two_chain_filters_and_ideals() {
        let l = chain(2);
        assert_eq!(filters(&l), vec![BitSet::from_indices(2, [1]), BitSet::from_indices(2, [0, 1])]);
        assert_eq!(ideals(&l), vec![BitSet::from_indices(2, [0]), BitSet::from_indices(2, [0, 1])]);
    }

    #[test]
    fn one_element_lattice() {
        assert_eq!(filters(&one()).len(), 1);
        assert_eq!(ideals(&one()).len(), 1);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for l in [m3(), n5(), boolean(3), chain(5)] {
            // Brute-force enumeration visits masks in increasing order, which is the sort order.
            assert_eq!(filters(&l), brute(&l, is_filter));
            assert_eq!(ideals(&l), brute(&l, is_ideal));
            assert_eq!(filters(&l).len(), l.len());
        }
    }

    #[test]
    fn principal_maps_are_order_bijections() {
        let l = n5();
        for a in l.elements() {
            for b in l.elements() {
                // ↑ reverses order, ↓ preserves it.
                assert_eq!(l.leq(a, b), l.up_set(b).is_subset(l.up_set(a)));
                assert_eq!(l.leq(a, b), l.down_set(a).is_subset(l.down_set(b)));
            }
        }
    }
}
