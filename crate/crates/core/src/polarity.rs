//! Polarities `(X, Y, R)`, their Galois connection, and the lattice of
//! stable sets.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::order::FiniteLattice;

/// Two finite carriers and a relation between them, stored as bit rows by
/// `x` and bit columns by `y`. Either carrier may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarity {
    x_names: Vec<String>,
    y_names: Vec<String>,
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
}

fn distinct(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::NameClash(n.clone()));
        }
    }
    Ok(())
}

impl Polarity {
    /// Builds a polarity from index pairs `(x, y)` with `x R y`.
    pub fn new(x_names: Vec<String>, y_names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut rows = vec![BitSet::new(y_names.len()); x_names.len()];
        for &(x, y) in pairs {
            if x >= x_names.len() || y >= y_names.len() {
                return Err(Error::UnknownElement(format!("pair ({x}, {y})")));
            }
            rows[x].insert(y);
        }
        Self::from_rows(x_names, y_names, rows)
    }

    pub fn from_rows(x_names: Vec<String>, y_names: Vec<String>, rows: Vec<BitSet>) -> Result<Self> {
        distinct(&x_names)?;
        distinct(&y_names)?;
        let (nx, ny) = (x_names.len(), y_names.len());
        if rows.len() != nx || rows.iter().any(|r| r.universe() != ny) {
            return Err(Error::Format("relation rows do not match the carriers".into()));
        }
        let mut cols = vec![BitSet::new(nx); ny];
        for (x, row) in rows.iter().enumerate() {
            for y in row {
                cols[y].insert(x);
            }
        }
        Ok(Polarity {
            x_names,
            y_names,
            rows,
            cols,
        })
    }

    /// `x R y` iff `f(x, y)`, with carriers named `x0..` and `y0..`.
    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let rows = (0..nx)
            .map(|x| BitSet::from_indices(ny, (0..ny).filter(|&y| f(x, y))))
            .collect();
        Self::from_rows(default_names("x", nx), default_names("y", ny), rows).expect("generated names are distinct")
    }

    /// The identity relation on an `n`-set.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |x, y| x == y)
    }

    /// The polarity `(L, L, ≤)` of a lattice.
    pub fn of_order(l: &FiniteLattice) -> Self {
        let rows = l.elements().map(|a| l.up_set(a).clone()).collect();
        Self::from_rows(l.names().to_vec(), l.names().to_vec(), rows).expect("lattice names are distinct")
    }

    pub fn x_len(&self) -> usize {
        self.x_names.len()
    }

    pub fn y_len(&self) -> usize {
        self.y_names.len()
    }

    pub fn x_names(&self) -> &[String] {
        &self.x_names
    }

    pub fn y_names(&self) -> &[String] {
        &self.y_names
    }

    #[inline]
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    /// `{y : x R y}`.
    pub fn row(&self, x: usize) -> &BitSet {
        &self.rows[x]
    }

    /// `{x : x R y}`, i.e. `λ{y}`.
    pub fn col(&self, y: usize) -> &BitSet {
        &self.cols[y]
    }

    /// All related pairs in `(x, y)` order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.x_len())
            .flat_map(|x| self.rows[x].iter().map(move |y| (x, y)))
            .collect()
    }

    /// `ρA = {y : ∀x∈A, x R y}`; `ρ∅ = Y`.
    pub fn rho(&self, a: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.y_len());
        for x in a {
            out.intersect_with(&self.rows[x]);
        }
        out
    }

    /// `λB = {x : ∀y∈B, x R y}`; `λ∅ = X`.
    pub fn lambda(&self, b: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.x_len());
        for y in b {
            out.intersect_with(&self.cols[y]);
        }
        out
    }

    /// `λρA`.
    pub fn closure(&self, a: &BitSet) -> BitSet {
        self.lambda(&self.rho(a))
    }

    pub fn is_stable(&self, a: &BitSet) -> bool {
        self.closure(a).is_subset(a)
    }

    /// Display form of a subset of `X`, e.g. `{x0,x2}`.
    pub fn x_set_name(&self, a: &BitSet) -> String {
        let parts: Vec<&str> = a.iter().map(|x| self.x_names[x].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

pub(crate) fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// The complete lattice `P⁺` of stable subsets of `X` under inclusion.
#[derive(Debug, Clone)]
pub struct StableSetLattice {
    pub base: Polarity,
    /// Stable sets in bit-vector order; element `i` of `lattice` is `extents[i]`.
    pub extents: Vec<BitSet>,
    pub lattice: Arc<FiniteLattice>,
    index: HashMap<BitSet, usize>,
}

/// The meet and join representations of a stable set `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// `λ{y}` for each `y ∈ ρA`.
    pub meet_family: Vec<BitSet>,
    /// `λρ{x}` for each `x ∈ A`.
    pub join_family: Vec<BitSet>,
    /// `⋂` of the meet family (`X` when it is empty).
    pub meet_value: BitSet,
    /// Join of the join family computed in `P⁺`.
    pub join_value: BitSet,
}

impl StableSetLattice {
    pub fn extent(&self, i: usize) -> &BitSet {
        &self.extents[i]
    }

    pub fn index_of(&self, a: &BitSet) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn len(&self) -> usize {
        self.extents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extents.is_empty()
    }

    /// Splits a stable set into its meet and join representations.
    pub fn decompose(&self, a: &BitSet) -> Result<Decomposition> {
        let p = &self.base;
        if p.closure(a) != *a {
            return Err(Error::NotStable(p.x_set_name(a)));
        }
        let meet_family: Vec<BitSet> = p.rho(a).iter().map(|y| p.col(y).clone()).collect();
        let mut meet_value = BitSet::full(p.x_len());
        for s in &meet_family {
            meet_value.intersect_with(s);
        }
        let join_family: Vec<BitSet> = a
            .iter()
            .map(|x| p.closure(&BitSet::singleton(p.x_len(), x)))
            .collect();
        let members = join_family
            .iter()
            .map(|s| self.index_of(s).ok_or_else(|| Error::NotStable(p.x_set_name(s))))
            .collect::<Result<Vec<_>>>()?;
        let join_value = self.extents[self.lattice.big_join(members)].clone();
        Ok(Decomposition {
            meet_family,
            join_family,
            meet_value,
            join_value,
        })
    }
}

/// Enumerates `P⁺` as the intersection closure of `{λ{y} : y ∈ Y} ∪ {X}`.
///
/// Never scans `2^|Y|`. Fails with `SizeExceeded` once more than
/// `bounds.max_extents` stable sets appear.
pub fn stable_set_lattice(p: &Polarity, bounds: &Bounds) -> Result<StableSetLattice> {
    let full = BitSet::full(p.x_len());
    let mut seen: HashSet<BitSet> = HashSet::from([full.clone()]);
    let mut extents = vec![full];
    for y in 0..p.y_len() {
        let col = p.col(y);
        let known = extents.len();
        for i in 0..known {
            let e = extents[i].intersection(col);
            if !seen.contains(&e) {
                seen.insert(e.clone());
                extents.push(e);
                if extents.len() > bounds.max_extents {
                    return Err(Error::SizeExceeded {
                        what: "stable-set lattice",
                        size: extents.len(),
                        bound: bounds.max_extents,
                    });
                }
            }
        }
    }
    extents.sort();
    let n = extents.len();
    let index: HashMap<BitSet, usize> = extents.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let up = extents
        .iter()
        .map(|a| BitSet::from_indices(n, (0..n).filter(|&j| a.is_subset(&extents[j]))))
        .collect();
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    for a in 0..n {
        for b in a..n {
            let m = index[&extents[a].intersection(&extents[b])];
            let j = index[&p.closure(&extents[a].union(&extents[b]))];
            meet[a * n + b] = m;
            meet[b * n + a] = m;
            join[a * n + b] = j;
            join[b * n + a] = j;
        }
    }
    let names = extents.iter().map(|e| p.x_set_name(e)).collect();
    let lattice = Arc::new(FiniteLattice::from_parts(names, up, meet, join)?);
    Ok(StableSetLattice {
        base: p.clone(),
        extents,
        lattice,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{catalog, find_isomorphism, validate_lattice};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, xs: &[usize]) -> BitSet {
        BitSet::from_indices(n, xs.iter().copied())
    }

    fn random_polarity(rng: &mut ChaCha8Rng, max: usize) -> Polarity {
        let nx = rng.gen_range(0..=max);
        let ny = rng.gen_range(0..=max);
        let d: f64 = rng.gen_range(0.2..0.8);
        let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(d)).collect();
        Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y])
    }

    /// `{λB : B ⊆ Y}` by scanning every subset of `Y`.
    fn brute_extents(p: &Polarity) -> Vec<BitSet> {
        let mut out: Vec<BitSet> = (0..1u64 << p.y_len())
            .map(|m| p.lambda(&BitSet::from_mask(p.y_len(), m)))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        out.sort();
        out
    }

    #[test]
    fn rho_lambda_edge_cases() {
        let empty = Polarity::from_fn(2, 3, |_, _| false);
        assert!(empty.rho(&set(2, &[0])).is_empty());
        assert!(empty.rho(&BitSet::new(2)).is_full());
        let full = Polarity::from_fn(2, 3, |_, _| true);
        for m in 0..4 {
            assert!(full.rho(&BitSet::from_mask(2, m)).is_full());
        }
        let id = Polarity::identity(2);
        assert_eq!(id.rho(&set(2, &[0])), set(2, &[0]));
        assert_eq!(id.lambda(&set(2, &[0])), set(2, &[0]));
        assert!(id.lambda(&BitSet::new(2)).is_full());
    }

    #[test]
    fn closure_examples() {
        let id = Polarity::identity(2);
        assert_eq!(id.closure(&set(2, &[0])), set(2, &[0]));
        let empty = Polarity::from_fn(3, 2, |_, _| false);
        assert!(empty.closure(&BitSet::new(3)).is_empty());
        assert!(empty.closure(&set(3, &[1])).is_full());
        assert!(empty.closure(&set(3, &[0, 2])).is_full());
    }

    #[test]
    fn closure_is_idempotent_increasing_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = random_polarity(&mut rng, 6);
            let n = p.x_len();
            for m in 0..1u64 << n {
                let a = BitSet::from_mask(n, m);
                let c = p.closure(&a);
                assert_eq!(p.closure(&c), c);
                assert!(a.is_subset(&c));
                for m2 in 0..1u64 << n {
                    let b = BitSet::from_mask(n, m | m2);
                    assert!(c.is_subset(&p.closure(&b)));
                }
            }
        }
    }

    #[test]
    fn stable_lattice_examples() {
        let b = Bounds::default();
        let full = stable_set_lattice(&Polarity::from_fn(2, 3, |_, _| true), &b).unwrap();
        assert_eq!(full.len(), 1);
        assert!(full.lattice.is_trivial());

        let id = stable_set_lattice(&Polarity::identity(2), &b).unwrap();
        assert_eq!(
            id.extents,
            vec![BitSet::new(2), set(2, &[0]), set(2, &[1]), set(2, &[0, 1])]
        );
        let boolean = Arc::new(catalog::boolean(2));
        assert!(find_isomorphism(&id.lattice, &boolean, &b).unwrap().is_some());

        let leq = stable_set_lattice(&Polarity::from_fn(3, 3, |x, y| x <= y), &b).unwrap();
        assert_eq!(leq.extents, vec![set(3, &[0]), set(3, &[0, 1]), set(3, &[0, 1, 2])]);
        let chain = Arc::new(catalog::chain(3));
        assert!(find_isomorphism(&leq.lattice, &chain, &b).unwrap().is_some());
    }

    #[test]
    fn empty_carriers() {
        let b = Bounds::default();
        let no_x = stable_set_lattice(&Polarity::from_fn(0, 2, |_, _| false), &b).unwrap();
        assert_eq!(no_x.len(), 1);
        let no_y = stable_set_lattice(&Polarity::from_fn(3, 0, |_, _| false), &b).unwrap();
        assert_eq!(no_y.extents, vec![BitSet::full(3)]);
    }

    #[test]
    fn extent_bound() {
        let b = Bounds {
            max_extents: 3,
            ..Bounds::default()
        };
        assert!(matches!(
            stable_set_lattice(&Polarity::identity(3), &b),
            Err(Error::SizeExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = random_polarity(&mut rng, 7);
            let s = stable_set_lattice(&p, &Bounds::default()).unwrap();
            assert_eq!(s.extents, brute_extents(&p));
            let l = &s.lattice;
            assert_eq!(&validate_lattice(&l.leq_matrix(), l.names().to_vec()).unwrap(), &**l);
            assert_eq!(s.extent(l.top()), &BitSet::full(p.x_len()));
            assert_eq!(s.extent(l.bottom()), &p.lambda(&BitSet::full(p.y_len())));
            for a in l.elements() {
                for b in l.elements() {
                    assert_eq!(s.extent(l.meet(a, b)), &s.extent(a).intersection(s.extent(b)));
                    assert_eq!(s.extent(l.join(a, b)), &p.closure(&s.extent(a).union(s.extent(b))));
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let b = Bounds::default();
        let id = stable_set_lattice(&Polarity::identity(2), &b).unwrap();
        let d = id.decompose(&set(2, &[0])).unwrap();
        assert_eq!(d.meet_family, vec![set(2, &[0])]);
        assert_eq!(d.meet_value, set(2, &[0]));
        assert_eq!(d.join_value, set(2, &[0]));

        // ρX = ∅ gives the empty intersection, X itself.
        let empty = stable_set_lattice(&Polarity::from_fn(2, 2, |_, _| false), &b).unwrap();
        let d = empty.decompose(&BitSet::full(2)).unwrap();
        assert!(d.meet_family.is_empty());
        assert_eq!(d.meet_value, BitSet::full(2));

        assert!(matches!(empty.decompose(&set(2, &[0])), Err(Error::NotStable(_))));
    }

    #[test]
    fn decomposition_holds_for_random_polarities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_polarity(&mut rng, 6);
            let s = stable_set_lattice(&p, &Bounds::default()).unwrap();
            for a in brute_extents(&p) {
                let d = s.decompose(&a).unwrap();
                assert_eq!(d.meet_value, a);
                assert_eq!(d.join_value, a);
            }
        }
    }
}
