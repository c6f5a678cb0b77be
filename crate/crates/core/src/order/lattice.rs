use std::collections::HashMap;
use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// A finite bounded lattice with its full order relation and derived
/// meet/join tables. Elements are the indices `0..len()`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// `up[a]` holds every `b` with `a <= b`.
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    meet: Vec<usize>,
    join: Vec<usize>,
    bottom: usize,
    top: usize,
    height: Vec<usize>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
}

/// Checks a square order relation and derives the lattice tables.
///
/// `leq[a][b]` states `a <= b`. Errors carry the first witness found, scanning
/// pairs in index order.
pub fn validate_lattice(leq: &[Vec<bool>], names: Vec<String>) -> Result<FiniteLattice> {
    let n = names.len();
    if leq.len() != n {
        return Err(Error::NotSquare {
            rows: leq.len(),
            names: n,
        });
    }
    let mut up = Vec::with_capacity(n);
    for row in leq {
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: row.len(),
                names: n,
            });
        }
        up.push(BitSet::from_indices(
            n,
            row.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        ));
    }
    FiniteLattice::from_up_sets(names, up)
}

fn check_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::NameClash(name.clone()));
        }
    }
    Ok(index)
}

fn transpose(rows: &[BitSet]) -> Vec<BitSet> {
    let n = rows.len();
    let mut cols = vec![BitSet::new(n); n];
    for (a, row) in rows.iter().enumerate() {
        for b in row {
            cols[b].insert(a);
        }
    }
    cols
}

impl FiniteLattice {
    /// Validates an order given by principal up-sets and derives the tables.
    pub fn from_up_sets(names: Vec<String>, up: Vec<BitSet>) -> Result<Self> {
        let n = names.len();
        let index = check_names(&names)?;
        if up.len() != n || up.iter().any(|r| r.universe() != n) {
            return Err(Error::NotSquare {
                rows: up.len(),
                names: n,
            });
        }
        for a in 0..n {
            if !up[a].contains(a) {
                return Err(Error::NotAPartialOrder {
                    axiom: "reflexivity",
                    a: names[a].clone(),
                    b: names[a].clone(),
                    c: None,
                });
            }
        }
        for a in 0..n {
            for b in up[a].iter().filter(|&b| b > a) {
                if up[b].contains(a) {
                    return Err(Error::NotAPartialOrder {
                        axiom: "antisymmetry",
                        a: names[a].clone(),
                        b: names[b].clone(),
                        c: None,
                    });
                }
            }
        }
        for a in 0..n {
            for b in &up[a] {
                if !up[b].is_subset(&up[a]) {
                    let mut missing = up[b].clone();
                    missing.difference_with(&up[a]);
                    let c = missing.first().expect("nonempty difference");
                    return Err(Error::NotAPartialOrder {
                        axiom: "transitivity",
                        a: names[a].clone(),
                        b: names[b].clone(),
                        c: Some(names[c].clone()),
                    });
                }
            }
        }
        if n == 0 {
            return Err(Error::NotALattice(
                "empty carrier has no bottom or top".into(),
            ));
        }
        let down = transpose(&up);

        // |↓a| strictly grows along <, so sorting by it gives a linear extension.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| (down[a].count(), a));
        let mut pos = vec![0; n];
        for (p, &a) in order.iter().enumerate() {
            pos[a] = p;
        }

        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let upper = up[a].intersection(&up[b]);
                let j = upper.iter().min_by_key(|&c| pos[c]);
                let j = match j {
                    Some(j) if upper.is_subset(&up[j]) => j,
                    _ => {
                        return Err(Error::NotALattice(format!(
                            "({}, {}) has no join",
                            names[a], names[b]
                        )))
                    }
                };
                let lower = down[a].intersection(&down[b]);
                let m = lower.iter().max_by_key(|&c| pos[c]);
                let m = match m {
                    Some(m) if lower.is_subset(&down[m]) => m,
                    _ => {
                        return Err(Error::NotALattice(format!(
                            "({}, {}) has no meet",
                            names[a], names[b]
                        )))
                    }
                };
                join[a * n + b] = j;
                join[b * n + a] = j;
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }
        Ok(Self::assemble(names, index, up, down, meet, join))
    }

    /// Builds a lattice from tables the caller has derived itself (products,
    /// stable-set lattices). Debug builds re-derive and compare.
    pub(crate) fn from_parts(
        names: Vec<String>,
        up: Vec<BitSet>,
        meet: Vec<usize>,
        join: Vec<usize>,
    ) -> Result<Self> {
        let index = check_names(&names)?;
        let down = transpose(&up);
        let lattice = Self::assemble(names, index, up, down, meet, join);
        #[cfg(debug_assertions)]
        {
            let check = Self::from_up_sets(lattice.names.clone(), lattice.up.clone())?;
            debug_assert!(check.meet == lattice.meet && check.join == lattice.join);
        }
        Ok(lattice)
    }

    fn assemble(
        names: Vec<String>,
        index: HashMap<String, usize>,
        up: Vec<BitSet>,
        down: Vec<BitSet>,
        meet: Vec<usize>,
        join: Vec<usize>,
    ) -> Self {
        let n = names.len();
        let bottom = (0..n).find(|&a| up[a].is_full()).expect("bounded");
        let top = (0..n).find(|&a| down[a].is_full()).expect("bounded");

        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for a in 0..n {
            for b in up[a].iter().filter(|&b| b != a) {
                if up[a].intersection(&down[b]).count() == 2 {
                    upper_covers[a].push(b);
                    lower_covers[b].push(a);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| (down[a].count(), a));
        let mut height = vec![0; n];
        for &a in &order {
            height[a] = lower_covers[a]
                .iter()
                .map(|&b| height[b] + 1)
                .max()
                .unwrap_or(0);
        }
        FiniteLattice {
            names,
            index,
            up,
            down,
            meet,
            join,
            bottom,
            top,
            height,
            upper_covers,
            lower_covers,
        }
    }

    /// Builds a lattice from a cover (Hasse) relation by reflexive-transitive closure.
    pub fn from_covers(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut up: Vec<BitSet> = (0..n).map(|a| BitSet::singleton(n, a)).collect();
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("#{}", a.max(b))));
            }
            up[a].insert(b);
        }
        // Warshall on bit rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Self::from_up_sets(names, up)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.len() == 1
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Looks up a name, failing with `UnknownElement`.
    pub fn element(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b]
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// `⋀S`, with `⋀∅ = top`.
    pub fn big_meet<I: IntoIterator<Item = usize>>(&self, it: I) -> usize {
        it.into_iter().fold(self.top, |acc, a| self.meet(acc, a))
    }

    /// `⋁S`, with `⋁∅ = bottom`.
    pub fn big_join<I: IntoIterator<Item = usize>>(&self, it: I) -> usize {
        it.into_iter().fold(self.bottom, |acc, a| self.join(acc, a))
    }

    pub fn up_set(&self, a: usize) -> &BitSet {
        &self.up[a]
    }

    pub fn down_set(&self, a: usize) -> &BitSet {
        &self.down[a]
    }

    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper_covers[a]
    }

    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower_covers[a]
    }

    /// Length of the longest chain from bottom to `a`.
    pub fn height(&self, a: usize) -> usize {
        self.height[a]
    }

    /// All cover pairs `(a, b)` with `a ⋖ b`, in index order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.elements()
            .flat_map(|a| self.upper_covers[a].iter().map(move |&b| (a, b)))
            .collect()
    }

    /// The full order as a boolean matrix.
    pub fn leq_matrix(&self) -> Vec<Vec<bool>> {
        self.elements()
            .map(|a| self.elements().map(|b| self.leq(a, b)).collect())
            .collect()
    }

    /// Same order with new display names.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        assert_eq!(names.len(), self.len());
        let index = check_names(&names)?;
        Ok(FiniteLattice {
            names,
            index,
            ..self.clone()
        })
    }
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("names", &self.names)
            .field("covers", &self.covers())
            .finish()
    }
}

/// Small named lattices used across tests and the CLI.
pub mod catalog {
    use super::FiniteLattice;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    /// The one-element lattice.
    pub fn one() -> FiniteLattice {
        chain(1)
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> FiniteLattice {
        let names = (0..n).map(|i| i.to_string()).collect();
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        FiniteLattice::from_covers(names, &covers).expect("chain")
    }

    /// The diamond: three atoms `a`, `b`, `c` between `0` and `1`.
    pub fn m3() -> FiniteLattice {
        FiniteLattice::from_covers(
            names(&["0", "a", "b", "c", "1"]),
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .expect("M3")
    }

    /// The pentagon: `0 < a < b < 1` and `0 < c < 1`.
    pub fn n5() -> FiniteLattice {
        FiniteLattice::from_covers(
            names(&["0", "a", "b", "c", "1"]),
            &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        )
        .expect("N5")
    }

    /// The Boolean lattice of subsets of a `k`-set, element `i` being the subset with mask `i`.
    pub fn boolean(k: usize) -> FiniteLattice {
        let n = 1usize << k;
        let names = (0..n).map(|m| format!("b{m}")).collect();
        let covers: Vec<_> = (0..n)
            .flat_map(|m| (0..k).filter(move |&j| m & (1 << j) == 0).map(move |j| (m, m | 1 << j)))
            .collect();
        FiniteLattice::from_covers(names, &covers).expect("Boolean lattice")
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    fn brute_meet(l: &FiniteLattice, a: usize, b: usize) -> Option<usize> {
        let lower: Vec<_> = l.elements().filter(|&c| l.leq(c, a) && l.leq(c, b)).collect();
        lower
            .iter()
            .copied()
            .find(|&m| lower.iter().all(|&c| l.leq(c, m)))
    }

    #[test]
    fn two_chain() {
        let l = chain(2);
        assert_eq!((l.bottom(), l.top()), (0, 1));
        assert_eq!(l.meet(0, 1), 0);
        assert_eq!(l.join(0, 1), 1);
        assert_eq!(l.big_join([]), l.bottom());
        assert_eq!(l.big_meet([]), l.top());
    }

    #[test]
    fn antichain_has_no_join() {
        let err = validate_lattice(
            &[vec![true, false], vec![false, true]],
            vec!["a".into(), "b".into()],
        )
        .unwrap_err();
        assert_eq!(err, Error::NotALattice("(a, b) has no join".into()));
    }

    #[test]
    fn partial_order_witnesses() {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let not_refl = vec![vec![false, true, true], vec![false, true, true], vec![false, false, true]];
        assert!(matches!(
            validate_lattice(&not_refl, names.clone()),
            Err(Error::NotAPartialOrder { axiom: "reflexivity", .. })
        ));
        let not_anti = vec![vec![true, true, true], vec![true, true, true], vec![false, false, true]];
        assert!(matches!(
            validate_lattice(&not_anti, names.clone()),
            Err(Error::NotAPartialOrder { axiom: "antisymmetry", .. })
        ));
        let not_trans = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        assert_eq!(
            validate_lattice(&not_trans, names.clone()).unwrap_err(),
            Error::NotAPartialOrder {
                axiom: "transitivity",
                a: "a".into(),
                b: "b".into(),
                c: Some("c".into())
            }
        );
        assert!(matches!(
            validate_lattice(&[vec![true]], vec!["x".into(), "x".into()]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            validate_lattice(&[vec![true, true], vec![false, true]], vec!["x".into(), "x".into()]),
            Err(Error::NameClash(_))
        ));
        assert!(matches!(validate_lattice(&[], vec![]), Err(Error::NotALattice(_))));
    }

    #[test]
    fn one_element_lattice_is_admitted() {
        let l = one();
        assert_eq!(l.bottom(), l.top());
        assert!(l.is_trivial());
    }

    #[test]
    fn m3_and_n5_tables_match_brute_force() {
        for l in [m3(), n5(), boolean(3), chain(4)] {
            for a in l.elements() {
                for b in l.elements() {
                    assert_eq!(Some(l.meet(a, b)), brute_meet(&l, a, b));
                    let m = l.meet(a, b);
                    assert!(l.leq(m, a) && l.leq(m, b));
                    let j = l.join(a, b);
                    assert!(l.leq(a, j) && l.leq(b, j));
                    for c in l.elements() {
                        if l.leq(a, c) && l.leq(b, c) {
                            assert!(l.leq(j, c));
                        }
                    }
                }
                assert_eq!(l.big_meet([a]), a);
                assert_eq!(l.big_join([a]), a);
                assert!(l.leq(l.bottom(), a) && l.leq(a, l.top()));
            }
            assert_eq!(l.big_meet(l.elements()), l.bottom());
            assert_eq!(l.big_join(l.elements()), l.top());
        }
        let m = m3();
        let (a, b) = (m.element("a").unwrap(), m.element("b").unwrap());
        assert_eq!(m.join(a, b), m.top());
        assert_eq!(m.meet(a, b), m.bottom());
    }

    #[test]
    fn n5_from_covers_is_valid() {
        let l = n5();
        assert_eq!(l.len(), 5);
        assert_eq!(l.covers().len(), 5);
        assert_eq!(l.height(l.top()), 3);
    }
}
