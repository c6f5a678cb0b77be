use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FiniteLattice;
use crate::bounds::Bounds;
use crate::error::{Error, Result};

/// A function between lattice carriers given by its table.
#[derive(Clone)]
pub struct LatticeMap {
    source: Arc<FiniteLattice>,
    target: Arc<FiniteLattice>,
    table: Vec<usize>,
    flags: OnceLock<MapFlags>,
}

/// How the complete-homomorphism check covered the subsets of the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetCoverage {
    Exhaustive { subsets: u64 },
    Sampled { seed: u64, samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapFlags {
    pub isotone: bool,
    pub antitone: bool,
    pub preserves_meet: bool,
    pub preserves_join: bool,
    pub preserves_bounds: bool,
    /// Bounded-lattice homomorphism: preserves `∧`, `∨`, `0` and `1`.
    pub hom: bool,
    /// Preserves the meet and join of every subset, the empty one included.
    pub complete_hom: bool,
    pub injective: bool,
    pub surjective: bool,
    pub coverage: SubsetCoverage,
}

impl MapFlags {
    pub fn is_embedding(&self) -> bool {
        self.hom && self.injective
    }

    pub fn is_isomorphism(&self) -> bool {
        self.hom && self.injective && self.surjective
    }
}

impl std::fmt::Debug for LatticeMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pairs: Vec<_> = self
            .table
            .iter()
            .enumerate()
            .map(|(a, &b)| format!("{}->{}", self.source.name(a), self.target.name(b)))
            .collect();
        f.debug_tuple("LatticeMap").field(&pairs).finish()
    }
}

impl PartialEq for LatticeMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && *self.source == *other.source && *self.target == *other.target
    }
}

impl LatticeMap {
    pub fn new(source: Arc<FiniteLattice>, target: Arc<FiniteLattice>, table: Vec<usize>) -> Result<Self> {
        if table.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "table has {} entries for a source of size {}",
                table.len(),
                source.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&b| b >= target.len()) {
            return Err(Error::InvalidMap(format!("entry {bad} is not a target element")));
        }
        Ok(LatticeMap {
            source,
            target,
            table,
            flags: OnceLock::new(),
        })
    }

    pub fn identity(l: Arc<FiniteLattice>) -> Self {
        let table = l.elements().collect();
        LatticeMap::new(l.clone(), l, table).expect("identity")
    }

    pub fn constant(source: Arc<FiniteLattice>, target: Arc<FiniteLattice>, value: usize) -> Result<Self> {
        let table = vec![value; source.len()];
        LatticeMap::new(source, target, table)
    }

    pub fn source(&self) -> &Arc<FiniteLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteLattice> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.table[a]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &LatticeMap) -> Result<LatticeMap> {
        if *self.target != *other.source {
            return Err(Error::InvalidMap("composition of mismatched maps".into()));
        }
        let table = self.table.iter().map(|&b| other.apply(b)).collect();
        LatticeMap::new(self.source.clone(), other.target.clone(), table)
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Result<LatticeMap> {
        if self.source.len() != self.target.len() {
            return Err(Error::InvalidMap("not a bijection".into()));
        }
        let mut inv = vec![usize::MAX; self.target.len()];
        for (a, &b) in self.table.iter().enumerate() {
            if inv[b] != usize::MAX {
                return Err(Error::InvalidMap("not a bijection".into()));
            }
            inv[b] = a;
        }
        LatticeMap::new(self.target.clone(), self.source.clone(), inv)
    }

    /// Flags under the default bounds, computed once.
    pub fn flags(&self) -> MapFlags {
        *self.flags.get_or_init(|| analyze_map(self, &Bounds::default()))
    }

    /// The image as a set of target elements.
    pub fn image(&self) -> crate::bitset::BitSet {
        crate::bitset::BitSet::from_indices(self.target.len(), self.table.iter().copied())
    }
}

/// Exhaustively computes the structural flags of `f`.
///
/// The complete-homomorphism flag checks every subset of the source when it
/// has at most `bounds.complete_hom_exhaustive` elements, and otherwise a
/// seeded random sample recorded in [`MapFlags::coverage`].
pub fn analyze_map(f: &LatticeMap, bounds: &Bounds) -> MapFlags {
    let (s, t) = (&*f.source, &*f.target);
    let mut isotone = true;
    let mut antitone = true;
    let mut preserves_meet = true;
    let mut preserves_join = true;
    for a in s.elements() {
        for b in s.elements() {
            let (fa, fb) = (f.apply(a), f.apply(b));
            if s.leq(a, b) {
                isotone &= t.leq(fa, fb);
                antitone &= t.leq(fb, fa);
            }
            preserves_meet &= f.apply(s.meet(a, b)) == t.meet(fa, fb);
            preserves_join &= f.apply(s.join(a, b)) == t.join(fa, fb);
        }
    }
    let preserves_bounds = f.apply(s.bottom()) == t.bottom() && f.apply(s.top()) == t.top();
    let hom = preserves_meet && preserves_join && preserves_bounds;
    let image = f.image();
    let injective = image.count() == s.len();
    let surjective = image.is_full();
    let (complete_hom, coverage) = check_complete(f, bounds);
    MapFlags {
        isotone,
        antitone,
        preserves_meet,
        preserves_join,
        preserves_bounds,
        hom,
        complete_hom,
        injective,
        surjective,
        coverage,
    }
}

fn check_complete(f: &LatticeMap, bounds: &Bounds) -> (bool, SubsetCoverage) {
    let (s, t) = (&*f.source, &*f.target);
    let n = s.len();
    if n <= bounds.complete_hom_exhaustive.min(20) {
        // Subset-indexed DP: each subset extends the one without its lowest bit.
        let count = 1usize << n;
        let mut src_meet = vec![s.top(); count];
        let mut src_join = vec![s.bottom(); count];
        let mut tgt_meet = vec![t.top(); count];
        let mut tgt_join = vec![t.bottom(); count];
        let mut ok = true;
        for mask in 1..count {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            src_meet[mask] = s.meet(src_meet[rest], low);
            src_join[mask] = s.join(src_join[rest], low);
            tgt_meet[mask] = t.meet(tgt_meet[rest], f.apply(low));
            tgt_join[mask] = t.join(tgt_join[rest], f.apply(low));
        }
        for mask in 0..count {
            ok &= f.apply(src_meet[mask]) == tgt_meet[mask] && f.apply(src_join[mask]) == tgt_join[mask];
        }
        (ok, SubsetCoverage::Exhaustive { subsets: count as u64 })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
        let mut ok = f.apply(s.top()) == t.top() && f.apply(s.bottom()) == t.bottom();
        for _ in 0..bounds.complete_hom_samples {
            let members: Vec<usize> = s.elements().filter(|_| rng.gen_bool(0.5)).collect();
            let sm = s.big_meet(members.iter().copied());
            let sj = s.big_join(members.iter().copied());
            let tm = t.big_meet(members.iter().map(|&a| f.apply(a)));
            let tj = t.big_join(members.iter().map(|&a| f.apply(a)));
            ok &= f.apply(sm) == tm && f.apply(sj) == tj;
        }
        (
            ok,
            SubsetCoverage::Sampled {
                seed: bounds.seed,
                samples: bounds.complete_hom_samples,
            },
        )
    }
}
