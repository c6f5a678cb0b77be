//! Completions of finite lattices: open and closed elements, density and
//! compactness, the MacNeille completion and the canonical extension, and the
//! lifting of maps and operations to extensions.
//!
//! The embedding is always explicit; nothing assumes `L` sits inside its
//! completion.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::order::{
    direct_product, filters, find_isomorphism_fixing, ideals, FiniteLattice, LatticeBasedAlgebra, LatticeMap,
    Operation,
};
use crate::polarity::{stable_set_lattice, Polarity};

/// An injective bounded-lattice homomorphism into a finite (hence complete)
/// lattice, with its open and closed elements.
#[derive(Debug, Clone)]
pub struct Completion {
    embed: LatticeMap,
    open: BitSet,
    closed: BitSet,
}

impl Completion {
    /// Wraps an embedding, failing with `NotEmbedding` unless it is an
    /// injective bounded-lattice homomorphism.
    pub fn new(embed: LatticeMap) -> Result<Self> {
        let flags = embed.flags();
        if !flags.hom {
            return Err(Error::NotEmbedding("map is not a bounded-lattice homomorphism".into()));
        }
        if !flags.injective {
            return Err(Error::NotEmbedding("map is not injective".into()));
        }
        let (open, closed) = open_closed(&embed);
        Ok(Completion { embed, open, closed })
    }

    pub fn identity(l: Arc<FiniteLattice>) -> Self {
        Completion::new(LatticeMap::identity(l)).expect("identity embeds")
    }

    pub fn source(&self) -> &Arc<FiniteLattice> {
        self.embed.source()
    }

    pub fn target(&self) -> &Arc<FiniteLattice> {
        self.embed.target()
    }

    pub fn embed(&self) -> &LatticeMap {
        &self.embed
    }

    /// `O(C)`: joins of subsets of the image.
    pub fn open_set(&self) -> &BitSet {
        &self.open
    }

    /// `K(C)`: meets of subsets of the image.
    pub fn closed_set(&self) -> &BitSet {
        &self.closed
    }

    /// The componentwise completion `L_1 × ... × L_k ↣ C_1 × ... × C_k`.
    pub fn product(parts: &[Completion], bounds: &Bounds) -> Result<Completion> {
        let sources: Vec<_> = parts.iter().map(|c| c.source().clone()).collect();
        let targets: Vec<_> = parts.iter().map(|c| c.target().clone()).collect();
        let src = direct_product(&sources, bounds)?;
        let tgt = direct_product(&targets, bounds)?;
        let table = src
            .lattice
            .elements()
            .map(|i| {
                let coords: Vec<usize> = src
                    .decode(i)
                    .iter()
                    .zip(parts)
                    .map(|(&a, c)| c.embed.apply(a))
                    .collect();
                tgt.encode(&coords)
            })
            .collect();
        Completion::new(LatticeMap::new(src.lattice, tgt.lattice, table)?)
    }
}

/// Closes the image of `embed` under pairwise joins (open) and meets (closed).
pub fn open_closed(embed: &LatticeMap) -> (BitSet, BitSet) {
    let t = embed.target();
    let close = |start: BitSet, op: &dyn Fn(usize, usize) -> usize| {
        let mut set = start;
        let mut frontier: Vec<usize> = set.iter().collect();
        while let Some(a) = frontier.pop() {
            let members: Vec<usize> = set.iter().collect();
            for b in members {
                let c = op(a, b);
                if !set.contains(c) {
                    set.insert(c);
                    frontier.push(c);
                }
            }
        }
        set
    };
    let mut image = embed.image();
    image.insert(t.bottom());
    let open = close(image, &|a, b| t.join(a, b));
    let mut image = embed.image();
    image.insert(t.top());
    let closed = close(image, &|a, b| t.meet(a, b));
    (open, closed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub dense: bool,
    /// First target element that is not the join of the closed elements below it.
    pub not_join_of_closed: Option<usize>,
    /// First target element that is not the meet of the open elements above it.
    pub not_meet_of_open: Option<usize>,
}

impl DensityReport {
    pub fn witness(&self) -> Option<usize> {
        self.not_join_of_closed.or(self.not_meet_of_open)
    }
}

/// Checks every target element for representation as a join of closed and a
/// meet of open elements.
pub fn is_dense(c: &Completion) -> DensityReport {
    let t = c.target();
    let not_join_of_closed = t
        .elements()
        .find(|&x| t.big_join(c.closed.iter().filter(|&k| t.leq(k, x))) != x);
    let not_meet_of_open = t
        .elements()
        .find(|&x| t.big_meet(c.open.iter().filter(|&o| t.leq(x, o))) != x);
    DensityReport {
        dense: not_join_of_closed.is_none() && not_meet_of_open.is_none(),
        not_join_of_closed,
        not_meet_of_open,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Every pair of source subsets, grouped by the values the check depends on.
    Exhaustive { meet_classes: usize, join_classes: usize },
    Sampled { seed: u64, samples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactnessReport {
    pub compact: bool,
    /// Source subsets `(S, T)` with `⋀e[S] ≤ ⋁e[T]` but `⋀S ≰ ⋁T`.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    pub coverage: Coverage,
}

impl CompactnessReport {
    /// Finite sources make every subset finite, so `S' = S` and `T' = T`.
    pub const NOTE: &'static str = "finite source: the finite subfamilies are S' = S and T' = T";
}

/// The pairs `(⋀e[S], ⋀S)` (or joins) over all `S ⊆ L`, each with one subset
/// realising it. Meets of subsets are iterated binary meets, so this is the
/// closure of `{(e a, a)}` and the empty pair under the componentwise operation.
fn value_classes(c: &Completion, meet: bool) -> Vec<((usize, usize), BitSet)> {
    let (s, t, e) = (c.source(), c.target(), c.embed());
    let op = |(x, a): (usize, usize), (y, b): (usize, usize)| {
        if meet {
            (t.meet(x, y), s.meet(a, b))
        } else {
            (t.join(x, y), s.join(a, b))
        }
    };
    let empty = if meet { (t.top(), s.top()) } else { (t.bottom(), s.bottom()) };
    let mut seen: HashMap<(usize, usize), BitSet> = HashMap::new();
    seen.insert(empty, BitSet::new(s.len()));
    let mut order = vec![empty];
    for a in s.elements() {
        let key = (e.apply(a), a);
        if let std::collections::hash_map::Entry::Vacant(v) = seen.entry(key) {
            v.insert(BitSet::singleton(s.len(), a));
            order.push(key);
        }
    }
    let mut next = 0;
    while next < order.len() {
        let u = order[next];
        next += 1;
        for k in 0..next {
            let v = order[k];
            let w = op(u, v);
            if !seen.contains_key(&w) {
                let sub = seen[&u].union(&seen[&v]);
                seen.insert(w, sub);
                order.push(w);
            }
        }
    }
    order
        .into_iter()
        .map(|k| {
            let sub = seen.remove(&k).expect("recorded");
            (k, sub)
        })
        .collect()
}

/// Compactness in the source-subset form: whenever `⋀e[S] ≤ ⋁e[T]` for
/// `S, T ⊆ L`, some finite `S' ⊆ S`, `T' ⊆ T` have `⋀S' ≤ ⋁T'`.
///
/// The implication only depends on the four values involved, so every pair
/// of value classes is checked; that is exhaustive over all `(S, T)`. When the
/// class pairs exceed `bounds.compact_budget` the check samples subsets with
/// `bounds.seed`, or fails with `BudgetExceeded` when sampling is disallowed.
pub fn is_compact(c: &Completion, bounds: &Bounds) -> Result<CompactnessReport> {
    let (s, t, e) = (c.source(), c.target(), c.embed());
    let meets = value_classes(c, true);
    let joins = value_classes(c, false);
    let pairs = meets.len() as u128 * joins.len() as u128;
    if pairs <= bounds.compact_budget {
        let witness = meets.iter().find_map(|&((tm, sm), ref ss)| {
            joins
                .iter()
                .find(|&&((tj, sj), _)| t.leq(tm, tj) && !s.leq(sm, sj))
                .map(|(_, ts)| (ss.iter().collect(), ts.iter().collect()))
        });
        return Ok(CompactnessReport {
            compact: witness.is_none(),
            witness,
            coverage: Coverage::Exhaustive {
                meet_classes: meets.len(),
                join_classes: joins.len(),
            },
        });
    }
    if !bounds.allow_sampling {
        return Err(Error::BudgetExceeded {
            what: "compactness check",
            needed: pairs,
            budget: bounds.compact_budget,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut witness = None;
    for _ in 0..bounds.compact_samples {
        let p: f64 = rng.gen_range(0.0..1.0);
        let ss: Vec<usize> = s.elements().filter(|_| rng.gen_bool(p)).collect();
        let q: f64 = rng.gen_range(0.0..1.0);
        let ts: Vec<usize> = s.elements().filter(|_| rng.gen_bool(q)).collect();
        let lhs = t.big_meet(ss.iter().map(|&a| e.apply(a)));
        let rhs = t.big_join(ts.iter().map(|&a| e.apply(a)));
        if t.leq(lhs, rhs) && !s.leq(s.big_meet(ss.iter().copied()), s.big_join(ts.iter().copied())) {
            witness = Some((ss, ts));
            break;
        }
    }
    Ok(CompactnessReport {
        compact: witness.is_none(),
        witness,
        coverage: Coverage::Sampled {
            seed: bounds.seed,
            samples: bounds.compact_samples,
        },
    })
}

/// The MacNeille completion: the stable sets of `(L, L, ≤)` with `a ↦ ↓a`.
pub fn macneille(l: &Arc<FiniteLattice>, bounds: &Bounds) -> Result<Completion> {
    let p = Polarity::of_order(l);
    let stable = stable_set_lattice(&p, bounds)?;
    let table = l
        .elements()
        .map(|a| {
            stable
                .index_of(p.col(a))
                .ok_or_else(|| Error::NotStable(p.x_set_name(p.col(a))))
        })
        .collect::<Result<_>>()?;
    Completion::new(LatticeMap::new(l.clone(), stable.lattice.clone(), table)?)
}

/// The filter–ideal polarity: `x R y` iff `x ∩ y ≠ ∅`.
pub fn filter_ideal_polarity(l: &FiniteLattice) -> Polarity {
    let fs = filters(l);
    let is = ideals(l);
    let generator = |s: &BitSet, meet: bool| {
        if meet {
            l.big_meet(s.iter())
        } else {
            l.big_join(s.iter())
        }
    };
    let x_names = fs.iter().map(|f| format!("up({})", l.name(generator(f, true)))).collect();
    let y_names = is.iter().map(|i| format!("down({})", l.name(generator(i, false)))).collect();
    let rows = fs
        .iter()
        .map(|f| BitSet::from_indices(is.len(), (0..is.len()).filter(|&j| !f.is_disjoint(&is[j]))))
        .collect();
    Polarity::from_rows(x_names, y_names, rows).expect("generators are distinct")
}

/// The canonical extension as the stable-set lattice of the filter–ideal
/// polarity, with `e(a) = {x ∈ X : a ∈ x}`.
pub fn canonical_extension(l: &Arc<FiniteLattice>, bounds: &Bounds) -> Result<Completion> {
    let p = filter_ideal_polarity(l);
    let fs = filters(l);
    let stable = stable_set_lattice(&p, bounds)?;
    let table = l
        .elements()
        .map(|a| {
            let ea = BitSet::from_indices(fs.len(), (0..fs.len()).filter(|&x| fs[x].contains(a)));
            stable.index_of(&ea).ok_or_else(|| Error::NotStable(p.x_set_name(&ea)))
        })
        .collect::<Result<_>>()?;
    Completion::new(LatticeMap::new(l.clone(), stable.lattice.clone(), table)?)
}

fn check_ends(f: &LatticeMap, cl: &Completion, cm: &Completion) -> Result<()> {
    if **f.source() != **cl.source() || **f.target() != **cm.source() {
        return Err(Error::InvalidMap("map does not match the completions' sources".into()));
    }
    Ok(())
}

/// `f^σ x = ⋁{ ⋀{ e_M f a : p ≤ e_L a ≤ q } : K ∋ p ≤ x ≤ q ∈ O }`, evaluated
/// over every closed/open pair of the source completion.
pub fn extend_map_general(f: &LatticeMap, cl: &Completion, cm: &Completion) -> Result<LatticeMap> {
    check_ends(f, cl, cm)?;
    let (c, m) = (cl.target(), cm.target());
    let l = cl.source();
    let el = cl.embed();
    let em = cm.embed();
    let table = c
        .elements()
        .map(|x| {
            let mut acc = m.bottom();
            for p in cl.closed_set().iter().filter(|&p| c.leq(p, x)) {
                for q in cl.open_set().iter().filter(|&q| c.leq(x, q)) {
                    let inner = m.big_meet(
                        l.elements()
                            .filter(|&a| c.leq(p, el.apply(a)) && c.leq(el.apply(a), q))
                            .map(|a| em.apply(f.apply(a))),
                    );
                    acc = m.join(acc, inner);
                }
            }
            acc
        })
        .collect();
    LatticeMap::new(c.clone(), m.clone(), table)
}

/// The isotone form `f^σ x = ⋁{ ⋀{ e_M f a : p ≤ e_L a } : K ∋ p ≤ x }`.
pub fn extend_map_isotone(f: &LatticeMap, cl: &Completion, cm: &Completion) -> Result<LatticeMap> {
    check_ends(f, cl, cm)?;
    let l = cl.source();
    let fm = f.target();
    for a in l.elements() {
        for b in l.elements() {
            if l.leq(a, b) && !fm.leq(f.apply(a), f.apply(b)) {
                return Err(Error::NotIsotone {
                    a: l.name(a).to_string(),
                    b: l.name(b).to_string(),
                });
            }
        }
    }
    let (c, m) = (cl.target(), cm.target());
    let (el, em) = (cl.embed(), cm.embed());
    let table = c
        .elements()
        .map(|x| {
            m.big_join(cl.closed_set().iter().filter(|&p| c.leq(p, x)).map(|p| {
                m.big_meet(
                    l.elements()
                        .filter(|&a| c.leq(p, el.apply(a)))
                        .map(|a| em.apply(f.apply(a))),
                )
            }))
        })
        .collect();
    LatticeMap::new(c.clone(), m.clone(), table)
}

/// Extends a lattice-based algebra: the lattice by [`canonical_extension`],
/// each `k`-ary operation by [`extend_map_general`] along the product
/// completion `L^k ↣ (L^σ)^k`.
pub fn canonical_extension_algebra(a: &LatticeBasedAlgebra, bounds: &Bounds) -> Result<(LatticeBasedAlgebra, Completion)> {
    let c = canonical_extension(&a.lattice, bounds)?;
    let n_sigma = c.target().len();
    let mut ops = Vec::with_capacity(a.ops.len());
    for op in &a.ops {
        let table = if op.arity == 0 {
            vec![c.embed().apply(op.table[0])]
        } else {
            let parts = vec![c.clone(); op.arity];
            let power = Completion::product(&parts, bounds)?;
            let f = LatticeMap::new(power.source().clone(), a.lattice.clone(), op.table.clone())?;
            extend_map_general(&f, &power, &c)?.table().to_vec()
        };
        debug_assert_eq!(table.len(), n_sigma.pow(op.arity as u32));
        ops.push(Operation {
            name: op.name.clone(),
            arity: op.arity,
            table,
        });
    }
    Ok((LatticeBasedAlgebra::new(c.target().clone(), ops)?, c))
}

/// `ηx = ⋁{ ⋀{ εa : p ≤ e(a) } : K ∋ p ≤ x }` for an embedding `ε: L ↣ C̄`.
pub fn eta_embedding(epsilon: &LatticeMap, cl: &Completion) -> Result<LatticeMap> {
    if **epsilon.source() != **cl.source() {
        return Err(Error::InvalidMap("epsilon does not start at the completion's source".into()));
    }
    let flags = epsilon.flags();
    if !flags.is_embedding() {
        return Err(Error::NotEmbedding(format!(
            "epsilon: hom={}, injective={}",
            flags.hom, flags.injective
        )));
    }
    let (c, bar) = (cl.target(), epsilon.target());
    let (l, e) = (cl.source(), cl.embed());
    let table = c
        .elements()
        .map(|x| {
            bar.big_join(cl.closed_set().iter().filter(|&p| c.leq(p, x)).map(|p| {
                bar.big_meet(
                    l.elements()
                        .filter(|&a| c.leq(p, e.apply(a)))
                        .map(|a| epsilon.apply(a)),
                )
            }))
        })
        .collect();
    LatticeMap::new(c.clone(), bar.clone(), table)
}

/// An isomorphism `φ: C_1 → C_2` with `φ ∘ e_1 = e_2`, if one exists.
pub fn compatible_isomorphism(c1: &Completion, c2: &Completion, bounds: &Bounds) -> Result<Option<LatticeMap>> {
    if **c1.source() != **c2.source() {
        return Err(Error::InvalidMap("completions of different lattices".into()));
    }
    let fixed: Vec<(usize, usize)> = c1
        .source()
        .elements()
        .map(|a| (c1.embed().apply(a), c2.embed().apply(a)))
        .collect();
    find_isomorphism_fixing(c1.target(), c2.target(), &fixed, bounds)
}
