//! Backtracking search for isomorphisms, embeddings and homomorphisms.
//!
//! Elements are assigned bottom-up (by height, then index) and candidates are
//! tried lowest index first, so results are deterministic. Every partial
//! assignment is checked against the order and against each meet/join triple
//! whose three members are already placed. Exceeding the node budget is a
//! [`Error::Timeout`], never an `Absent` answer.

use std::sync::Arc;

use super::{FiniteLattice, LatticeMap};
use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Mode {
    Iso,
    Embedding,
    Hom,
}

const UNSET: usize = usize::MAX;

/// Structural invariants preserved by isomorphisms.
type Signature = (usize, usize, usize, usize, usize);

fn signature(l: &FiniteLattice, a: usize) -> Signature {
    (
        l.height(a),
        l.upper_covers(a).len(),
        l.lower_covers(a).len(),
        l.up_set(a).count(),
        l.down_set(a).count(),
    )
}

struct Search<'a> {
    src: &'a FiniteLattice,
    tgt: &'a FiniteLattice,
    mode: Mode,
    budget: u64,
    nodes: u64,
    order: Vec<usize>,
    fixed: Vec<usize>,
    assign: Vec<usize>,
    used: BitSet,
    /// `meet_pairs[a]` lists the pairs `b < c` with `b ∧ c = a`.
    meet_pairs: Vec<Vec<(usize, usize)>>,
    join_pairs: Vec<Vec<(usize, usize)>>,
    src_sig: Vec<Signature>,
    tgt_sig: Vec<Signature>,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(
        src: &'a FiniteLattice,
        tgt: &'a FiniteLattice,
        mode: Mode,
        fixed_pairs: &[(usize, usize)],
        limit: usize,
        bounds: &Bounds,
    ) -> Result<Self> {
        let n = src.len();
        let mut fixed = vec![UNSET; n];
        for &(a, x) in fixed_pairs {
            if a >= n || x >= tgt.len() {
                return Err(Error::InvalidMap("fixed pair out of range".into()));
            }
            if fixed[a] != UNSET && fixed[a] != x {
                return Ok(Self::empty(src, tgt, mode, bounds));
            }
            fixed[a] = x;
        }
        for (a, x) in [(src.bottom(), tgt.bottom()), (src.top(), tgt.top())] {
            if fixed[a] != UNSET && fixed[a] != x {
                return Ok(Self::empty(src, tgt, mode, bounds));
            }
            fixed[a] = x;
        }
        let mut order: Vec<usize> = src.elements().collect();
        order.sort_by_key(|&a| (fixed[a] == UNSET, src.height(a), a));
        let mut meet_pairs = vec![Vec::new(); n];
        let mut join_pairs = vec![Vec::new(); n];
        for b in 0..n {
            for c in b + 1..n {
                meet_pairs[src.meet(b, c)].push((b, c));
                join_pairs[src.join(b, c)].push((b, c));
            }
        }
        let (src_sig, tgt_sig) = if mode == Mode::Iso {
            (
                src.elements().map(|a| signature(src, a)).collect(),
                tgt.elements().map(|a| signature(tgt, a)).collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Search {
            src,
            tgt,
            mode,
            budget: bounds.iso_budget,
            nodes: 0,
            order,
            fixed,
            assign: vec![UNSET; n],
            used: BitSet::new(tgt.len()),
            meet_pairs,
            join_pairs,
            src_sig,
            tgt_sig,
            limit,
            found: Vec::new(),
        })
    }

    /// A search with no solutions (contradictory fixed pairs).
    fn empty(src: &'a FiniteLattice, tgt: &'a FiniteLattice, mode: Mode, bounds: &Bounds) -> Self {
        Search {
            src,
            tgt,
            mode,
            budget: bounds.iso_budget,
            nodes: 0,
            order: Vec::new(),
            fixed: Vec::new(),
            assign: Vec::new(),
            used: BitSet::new(0),
            meet_pairs: Vec::new(),
            join_pairs: Vec::new(),
            src_sig: Vec::new(),
            tgt_sig: Vec::new(),
            limit: 0,
            found: Vec::new(),
        }
    }

    fn consistent(&mut self, a: usize, x: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Timeout { budget: self.budget });
        }
        let (s, t) = (self.src, self.tgt);
        let injective = self.mode != Mode::Hom;
        if injective && self.used.contains(x) {
            return Ok(false);
        }
        if self.mode == Mode::Iso && self.src_sig[a] != self.tgt_sig[x] {
            return Ok(false);
        }
        for b in s.elements() {
            let fb = self.assign[b];
            if fb == UNSET {
                continue;
            }
            if injective {
                if s.leq(a, b) != t.leq(x, fb) || s.leq(b, a) != t.leq(fb, x) {
                    return Ok(false);
                }
            } else if (s.leq(a, b) && !t.leq(x, fb)) || (s.leq(b, a) && !t.leq(fb, x)) {
                return Ok(false);
            }
            let m = s.meet(a, b);
            let fm = if m == a { x } else { self.assign[m] };
            if fm != UNSET && fm != t.meet(x, fb) {
                return Ok(false);
            }
            let j = s.join(a, b);
            let fj = if j == a { x } else { self.assign[j] };
            if fj != UNSET && fj != t.join(x, fb) {
                return Ok(false);
            }
        }
        for &(b, c) in &self.meet_pairs[a] {
            let (fb, fc) = (self.assign[b], self.assign[c]);
            if fb != UNSET && fc != UNSET && t.meet(fb, fc) != x {
                return Ok(false);
            }
        }
        for &(b, c) in &self.join_pairs[a] {
            let (fb, fc) = (self.assign[b], self.assign[c]);
            if fb != UNSET && fc != UNSET && t.join(fb, fc) != x {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Returns `true` once enough solutions have been collected.
    fn go(&mut self, depth: usize) -> Result<bool> {
        if depth == self.order.len() {
            self.found.push(self.assign.clone());
            return Ok(self.found.len() >= self.limit);
        }
        let a = self.order[depth];
        let candidates: Vec<usize> = if self.fixed[a] != UNSET {
            vec![self.fixed[a]]
        } else {
            self.tgt.elements().collect()
        };
        for x in candidates {
            if self.consistent(a, x)? {
                let injective = self.mode != Mode::Hom;
                self.assign[a] = x;
                if injective {
                    self.used.insert(x);
                }
                let done = self.go(depth + 1)?;
                self.assign[a] = UNSET;
                if injective {
                    self.used.remove(x);
                }
                if done {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn run(mut self) -> Result<Vec<Vec<usize>>> {
        if self.limit == 0 || self.src.is_empty() {
            return Ok(Vec::new());
        }
        self.go(0)?;
        Ok(self.found)
    }
}

fn signatures_match(l: &FiniteLattice, m: &FiniteLattice) -> bool {
    if l.len() != m.len() {
        return false;
    }
    let mut a: Vec<_> = l.elements().map(|e| signature(l, e)).collect();
    let mut b: Vec<_> = m.elements().map(|e| signature(m, e)).collect();
    a.sort();
    b.sort();
    a == b
}

fn to_maps(l: &Arc<FiniteLattice>, m: &Arc<FiniteLattice>, found: Vec<Vec<usize>>) -> Result<Vec<LatticeMap>> {
    found
        .into_iter()
        .map(|t| LatticeMap::new(l.clone(), m.clone(), t))
        .collect()
}

/// A bounded-lattice isomorphism `l → m`, or `None` when none exists.
pub fn find_isomorphism(l: &Arc<FiniteLattice>, m: &Arc<FiniteLattice>, bounds: &Bounds) -> Result<Option<LatticeMap>> {
    find_isomorphism_fixing(l, m, &[], bounds)
}

/// Like [`find_isomorphism`] but only among isomorphisms sending each `a` to
/// `x` for the given pairs `(a, x)`.
pub fn find_isomorphism_fixing(
    l: &Arc<FiniteLattice>,
    m: &Arc<FiniteLattice>,
    fixed: &[(usize, usize)],
    bounds: &Bounds,
) -> Result<Option<LatticeMap>> {
    if !signatures_match(l, m) {
        return Ok(None);
    }
    let found = Search::new(l, m, Mode::Iso, fixed, 1, bounds)?.run()?;
    Ok(to_maps(l, m, found)?.pop())
}

/// An injective bounded-lattice homomorphism `l ↣ m` respecting `fixed`.
pub fn find_embedding(
    l: &Arc<FiniteLattice>,
    m: &Arc<FiniteLattice>,
    fixed: &[(usize, usize)],
    bounds: &Bounds,
) -> Result<Option<LatticeMap>> {
    if l.len() > m.len() {
        return Ok(None);
    }
    let found = Search::new(l, m, Mode::Embedding, fixed, 1, bounds)?.run()?;
    Ok(to_maps(l, m, found)?.pop())
}

/// Up to `limit` bounded-lattice homomorphisms `l → m`, in search order.
pub fn homomorphisms(l: &Arc<FiniteLattice>, m: &Arc<FiniteLattice>, limit: usize, bounds: &Bounds) -> Result<Vec<LatticeMap>> {
    let found = Search::new(l, m, Mode::Hom, &[], limit, bounds)?.run()?;
    to_maps(l, m, found)
}

/// A surjective homomorphism `l ↠ m`, searched among the first `limit` homomorphisms.
pub fn find_surjection(l: &Arc<FiniteLattice>, m: &Arc<FiniteLattice>, limit: usize, bounds: &Bounds) -> Result<Option<LatticeMap>> {
    if m.len() > l.len() {
        return Ok(None);
    }
    Ok(homomorphisms(l, m, limit, bounds)?
        .into_iter()
        .find(|h| h.image().is_full()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::catalog::*;
    use crate::order::direct_product;

    fn arc(l: FiniteLattice) -> Arc<FiniteLattice> {
        Arc::new(l)
    }

    #[test]
    fn self_isomorphism_found() {
        for l in [m3(), n5(), boolean(3)] {
            let l = arc(l);
            let iso = find_isomorphism(&l, &l, &Bounds::default()).unwrap().unwrap();
            assert!(iso.flags().is_isomorphism());
            // Lowest-index-first makes the first answer the identity.
            assert_eq!(iso.table(), &l.elements().collect::<Vec<_>>()[..]);
        }
    }

    #[test]
    fn chain4_vs_boolean2_absent() {
        let r = find_isomorphism(&arc(chain(4)), &arc(boolean(2)), &Bounds::default()).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn m3_vs_n5_absent() {
        let r = find_isomorphism(&arc(m3()), &arc(n5()), &Bounds::default()).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn product_of_chains_is_boolean() {
        let c = arc(chain(2));
        let p = direct_product(&[c.clone(), c], &Bounds::default()).unwrap();
        let iso = find_isomorphism(&p.lattice, &arc(boolean(2)), &Bounds::default()).unwrap();
        assert!(iso.unwrap().flags().is_isomorphism());
    }

    #[test]
    fn fixed_pairs_constrain_automorphisms() {
        let m = arc(m3());
        // Swap a and b: the search must send c to c.
        let iso = find_isomorphism_fixing(&m, &m, &[(1, 2)], &Bounds::default())
            .unwrap()
            .unwrap();
        assert_eq!(iso.table(), &[0, 2, 1, 3, 4]);
        // Sending an atom to the top is impossible.
        assert!(find_isomorphism_fixing(&m, &m, &[(1, 4)], &Bounds::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn timeout_is_not_absent() {
        let b = arc(boolean(3));
        let tight = Bounds {
            iso_budget: 3,
            ..Bounds::default()
        };
        assert_eq!(
            find_isomorphism(&b, &b, &tight).unwrap_err(),
            Error::Timeout { budget: 3 }
        );
    }

    #[test]
    fn embeddings_and_homs() {
        let c2 = arc(chain(2));
        let c3 = arc(chain(3));
        let b2 = arc(boolean(2));
        let e = find_embedding(&c3, &b2, &[], &Bounds::default()).unwrap().unwrap();
        assert!(e.flags().is_embedding());
        assert!(find_embedding(&arc(m3()), &arc(boolean(3)), &[], &Bounds::default())
            .unwrap()
            .is_none());
        // 2×2 has exactly two homs onto the 2-chain (its two prime filters).
        let homs = homomorphisms(&b2, &c2, 100, &Bounds::default()).unwrap();
        assert_eq!(homs.len(), 2);
        assert!(homs.iter().all(|h| h.flags().hom));
        // M3 is simple: no hom onto the 2-chain.
        assert!(homomorphisms(&arc(m3()), &c2, 100, &Bounds::default()).unwrap().is_empty());
        assert!(find_surjection(&b2, &c2, 10, &Bounds::default()).unwrap().is_some());
    }

    #[test]
    fn hom_enumeration_matches_brute_force() {
        let l = arc(n5());
        let m = arc(chain(3));
        let found = homomorphisms(&l, &m, usize::MAX, &Bounds::default()).unwrap();
        let mut brute = Vec::new();
        for code in 0..3usize.pow(5) {
            let table: Vec<usize> = (0..5).map(|i| code / 3usize.pow(4 - i as u32) % 3).collect();
            let f = LatticeMap::new(l.clone(), m.clone(), table).unwrap();
            if f.flags().hom {
                brute.push(f.table().to_vec());
            }
        }
        let mut got: Vec<_> = found.iter().map(|f| f.table().to_vec()).collect();
        got.sort();
        brute.sort();
        assert_eq!(got, brute);
    }
}
