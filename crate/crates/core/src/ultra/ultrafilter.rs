use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// An ultrafilter on `{0, ..., size-1}`. On a finite index set every
/// ultrafilter is principal, so one index determines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ultrafilter {
    size: usize,
    principal: usize,
}

impl Ultrafilter {
    pub fn principal(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::InvalidContext(format!(
                "principal index {index} outside an index set of size {size}"
            )));
        }
        Ok(Ultrafilter { size, principal: index })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn principal_index(&self) -> usize {
        self.principal
    }

    /// Whether `set ⊆ I` belongs to the ultrafilter.
    pub fn contains(&self, set: &BitSet) -> bool {
        debug_assert_eq!(set.universe(), self.size);
        set.contains(self.principal)
    }

    /// Every member, in bit-vector order.
    pub fn members(&self) -> Result<Vec<BitSet>> {
        if self.size > 20 {
            return Err(Error::SizeExceeded {
                what: "ultrafilter member list",
                size: self.size,
                bound: 20,
            });
        }
        Ok((0..1u64 << self.size)
            .map(|m| BitSet::from_mask(self.size, m))
            .filter(|s| self.contains(s))
            .collect())
    }
}

/// `βI` for `|I| = n`: the `n` principal ultrafilters.
pub fn ultrafilters(n: usize) -> Vec<Ultrafilter> {
    (0..n).map(|i| Ultrafilter { size: n, principal: i }).collect()
}

const CHECK_BOUND: usize = 5;

/// Checks the filter and maximality axioms for a family of subsets of a
/// `size`-element index set.
pub fn check_ultrafilter(family: &[BitSet], size: usize) -> Result<bool> {
    if size > CHECK_BOUND {
        return Err(Error::SizeExceeded {
            what: "ultrafilter check index set",
            size,
            bound: CHECK_BOUND,
        });
    }
    if family.iter().any(|s| s.universe() != size) {
        return Err(Error::InvalidContext("family member over a different index set".into()));
    }
    let has = |s: &BitSet| family.contains(s);
    let all: Vec<BitSet> = (0..1u64 << size).map(|m| BitSet::from_mask(size, m)).collect();
    let proper = has(&BitSet::full(size)) && !has(&BitSet::new(size));
    let upward = family.iter().all(|a| all.iter().filter(|b| a.is_subset(b)).all(has));
    let meets = family.iter().all(|a| family.iter().all(|b| has(&a.intersection(b))));
    let maximal = all.iter().all(|a| has(a) || has(&a.complement()));
    Ok(proper && upward && meets && maximal)
}

/// Every ultrafilter found by scanning all `2^(2^n)` families of subsets.
pub fn ultrafilters_by_brute_force(n: usize) -> Result<Vec<Vec<BitSet>>> {
    const BOUND: usize = 4;
    if n > BOUND {
        return Err(Error::SizeExceeded {
            what: "brute-force ultrafilter scan",
            size: n,
            bound: BOUND,
        });
    }
    let subsets: Vec<BitSet> = (0..1u64 << n).map(|m| BitSet::from_mask(n, m)).collect();
    let mut out = Vec::new();
    for code in 0..1u64 << subsets.len() {
        let family: Vec<BitSet> = (0..subsets.len())
            .filter(|&k| code >> k & 1 == 1)
            .map(|k| subsets[k].clone())
            .collect();
        if check_ultrafilter(&family, n)? {
            out.push(family);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_index_set() {
        assert_eq!(ultrafilters(1), vec![Ultrafilter::principal(1, 0).unwrap()]);
    }

    #[test]
    fn brute_force_finds_only_principal() {
        for n in 1..=3 {
            let found = ultrafilters_by_brute_force(n).unwrap();
            let expected: Vec<Vec<BitSet>> = ultrafilters(n).iter().map(|u| u.members().unwrap()).collect();
            assert_eq!(found.len(), n);
            for f in &expected {
                assert!(found.contains(f));
            }
        }
    }

    #[test]
    fn supersets_of_a_point() {
        let family: Vec<BitSet> = (0..8u64)
            .map(|m| BitSet::from_mask(3, m))
            .filter(|s| s.contains(1))
            .collect();
        assert!(check_ultrafilter(&family, 3).unwrap());
        let mut not_max = family.clone();
        not_max.retain(|s| s.count() > 1);
        assert!(!check_ultrafilter(&not_max, 3).unwrap());
        assert!(matches!(check_ultrafilter(&[], 6), Err(Error::SizeExceeded { .. })));
    }

    #[test]
    fn bad_index() {
        assert!(Ultrafilter::principal(2, 2).is_err());
    }
}
