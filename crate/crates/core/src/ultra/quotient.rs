use std::sync::Arc;

use super::Ultrafilter;
use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::order::{direct_product, FiniteLattice, LatticeBasedAlgebra, LatticeMap, Operation, Product, Radix};
use crate::polarity::Polarity;

/// A nonempty family of structures indexed by `I = {0, ..., n-1}` with an
/// ultrafilter on `I`.
#[derive(Debug, Clone)]
pub struct UltraContext<T> {
    family: Vec<T>,
    ultrafilter: Ultrafilter,
}

impl<T> UltraContext<T> {
    pub fn new(family: Vec<T>, ultrafilter: Ultrafilter) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidContext("the family is empty".into()));
        }
        if ultrafilter.size() != family.len() {
            return Err(Error::InvalidContext(format!(
                "ultrafilter on {} indices for a family of {}",
                ultrafilter.size(),
                family.len()
            )));
        }
        Ok(UltraContext { family, ultrafilter })
    }

    /// The family with the principal ultrafilter at `index`.
    pub fn at(family: Vec<T>, index: usize) -> Result<Self> {
        let u = Ultrafilter::principal(family.len(), index)?;
        UltraContext::new(family, u)
    }

    pub fn family(&self) -> &[T] {
        &self.family
    }

    pub fn ultrafilter(&self) -> Ultrafilter {
        self.ultrafilter
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }
}

/// The map `f ↦ f^U` from `∏ A_i` onto its quotient by `∼_U`.
///
/// Each class is stored by a canonical representative: its value at the
/// principal index and the first element elsewhere. Class membership is
/// still decided through `⟦f = g⟧ ∈ U`, never by reading one coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    ultrafilter: Ultrafilter,
    sizes: Vec<usize>,
    reps: Vec<Vec<usize>>,
}

impl QuotientMap {
    pub fn new(sizes: Vec<usize>, ultrafilter: Ultrafilter) -> Self {
        assert_eq!(sizes.len(), ultrafilter.size());
        let i0 = ultrafilter.principal_index();
        let reps = if sizes.contains(&0) {
            Vec::new()
        } else {
            (0..sizes[i0])
                .map(|a| {
                    let mut f = vec![0; sizes.len()];
                    f[i0] = a;
                    f
                })
                .collect()
        };
        QuotientMap {
            ultrafilter,
            sizes,
            reps,
        }
    }

    pub fn ultrafilter(&self) -> Ultrafilter {
        self.ultrafilter
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of classes.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, class: usize) -> &[usize] {
        &self.reps[class]
    }

    pub fn reps(&self) -> &[Vec<usize>] {
        &self.reps
    }

    /// `⟦p⟧ = {i ∈ I : p(i)}`.
    pub fn truth(&self, p: impl Fn(usize) -> bool) -> BitSet {
        BitSet::from_indices(self.sizes.len(), (0..self.sizes.len()).filter(|&i| p(i)))
    }

    /// Whether `⟦p⟧ ∈ U`.
    pub fn holds(&self, p: impl Fn(usize) -> bool) -> bool {
        self.ultrafilter.contains(&self.truth(p))
    }

    pub fn equaliser(&self, f: &[usize], g: &[usize]) -> BitSet {
        self.truth(|i| f[i] == g[i])
    }

    /// The class `f^U` of a product element.
    pub fn class_of(&self, f: &[usize]) -> usize {
        debug_assert!(f.iter().zip(&self.sizes).all(|(&x, &n)| x < n));
        self.reps
            .iter()
            .position(|r| self.ultrafilter.contains(&self.equaliser(f, r)))
            .expect("every product element has a class")
    }

    /// Mixed-radix coding of the whole product, first index most significant.
    pub fn radix(&self) -> Radix {
        Radix::new(self.sizes.clone())
    }
}

/// Names classes after their representative's principal coordinate.
fn class_names(q: &QuotientMap, names: impl Fn(usize, usize) -> String) -> Vec<String> {
    let i0 = q.ultrafilter().principal_index();
    q.reps().iter().map(|r| names(i0, r[i0])).collect()
}

/// A polarity isomorphism given by its two carrier bijections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityIso {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

impl PolarityIso {
    /// Checks bijectivity and that `R` is both preserved and reflected.
    pub fn verify(&self, p: &Polarity, q: &Polarity) -> bool {
        let bijective = |m: &[usize], n: usize| {
            m.len() == n && {
                let mut seen = vec![false; n];
                m.iter().all(|&k| k < n && !std::mem::replace(&mut seen[k], true))
            }
        };
        bijective(&self.x, q.x_len())
            && bijective(&self.y, q.y_len())
            && p.x_len() == q.x_len()
            && p.y_len() == q.y_len()
            && (0..p.x_len()).all(|a| (0..p.y_len()).all(|b| p.related(a, b) == q.related(self.x[a], self.y[b])))
    }
}

#[derive(Debug, Clone)]
pub struct UltraPolarity {
    pub polarity: Polarity,
    pub x: QuotientMap,
    pub y: QuotientMap,
    /// The isomorphism onto the principal factor, when it verifies.
    pub projection: Option<PolarityIso>,
}

/// `∏_U P_i` with `f^U R^U g^U` iff `{i : f(i) R_i g(i)} ∈ U`.
pub fn ultraproduct_polarities(ctx: &UltraContext<Polarity>) -> Result<UltraPolarity> {
    let u = ctx.ultrafilter();
    let fam = ctx.family();
    let x = QuotientMap::new(fam.iter().map(|p| p.x_len()).collect(), u);
    let y = QuotientMap::new(fam.iter().map(|p| p.y_len()).collect(), u);
    let x_names = class_names(&x, |i, a| fam[i].x_names()[a].clone());
    let y_names = class_names(&y, |i, b| fam[i].y_names()[b].clone());
    let rows = x
        .reps()
        .iter()
        .map(|f| {
            BitSet::from_indices(
                y.len(),
                (0..y.len()).filter(|&c| {
                    let g = y.rep(c);
                    x.holds(|i| fam[i].related(f[i], g[i]))
                }),
            )
        })
        .collect();
    let polarity = Polarity::from_rows(x_names, y_names, rows)?;
    let i0 = u.principal_index();
    let iso = PolarityIso {
        x: x.reps().iter().map(|r| r[i0]).collect(),
        y: y.reps().iter().map(|r| r[i0]).collect(),
    };
    let projection = iso.verify(&polarity, &fam[i0]).then_some(iso);
    Ok(UltraPolarity {
        polarity,
        x,
        y,
        projection,
    })
}

#[derive(Debug, Clone)]
pub struct UltraLattice {
    pub lattice: Arc<FiniteLattice>,
    pub quotient: QuotientMap,
    /// Class ↦ principal coordinate of its representative.
    pub projection: LatticeMap,
}

/// `∏_U L_i` with `f^U ≤ g^U` iff `⟦f ≤ g⟧ ∈ U`.
pub fn ultraproduct_lattices(ctx: &UltraContext<Arc<FiniteLattice>>) -> Result<UltraLattice> {
    let u = ctx.ultrafilter();
    let fam = ctx.family();
    let q = QuotientMap::new(fam.iter().map(|l| l.len()).collect(), u);
    let names = class_names(&q, |i, a| fam[i].name(a).to_string());
    let n = q.len();
    let up = q
        .reps()
        .iter()
        .map(|f| {
            BitSet::from_indices(
                n,
                (0..n).filter(|&c| {
                    let g = q.rep(c);
                    q.holds(|i| fam[i].leq(f[i], g[i]))
                }),
            )
        })
        .collect();
    let lattice = Arc::new(FiniteLattice::from_up_sets(names, up)?);
    let i0 = u.principal_index();
    let projection = LatticeMap::new(lattice.clone(), fam[i0].clone(), q.reps().iter().map(|r| r[i0]).collect())?;
    Ok(UltraLattice {
        lattice,
        quotient: q,
        projection,
    })
}

#[derive(Debug, Clone)]
pub struct UltraAlgebra {
    pub algebra: LatticeBasedAlgebra,
    pub quotient: QuotientMap,
    pub projection: LatticeMap,
}

/// Ultraproduct of lattice-based algebras of one signature; operations act
/// on representatives coordinatewise and the result is reclassified.
pub fn ultraproduct_algebras(ctx: &UltraContext<LatticeBasedAlgebra>) -> Result<UltraAlgebra> {
    let fam = ctx.family();
    let signature: Vec<(&str, usize)> = fam[0].ops.iter().map(|o| (o.name.as_str(), o.arity)).collect();
    for a in &fam[1..] {
        let sig: Vec<(&str, usize)> = a.ops.iter().map(|o| (o.name.as_str(), o.arity)).collect();
        if sig != signature {
            return Err(Error::InvalidContext("family members have different signatures".into()));
        }
    }
    let lattices = UltraContext::new(fam.iter().map(|a| a.lattice.clone()).collect(), ctx.ultrafilter())?;
    let ul = ultraproduct_lattices(&lattices)?;
    let q = &ul.quotient;
    let n = q.len();
    let mut ops = Vec::new();
    for (k, &(name, arity)) in signature.iter().enumerate() {
        let op = Operation::from_fn(name, arity, n, |args| {
            let f: Vec<usize> = (0..fam.len())
                .map(|i| {
                    let coords: Vec<usize> = args.iter().map(|&c| q.rep(c)[i]).collect();
                    fam[i].ops[k].apply(fam[i].lattice.len(), &coords)
                })
                .collect();
            q.class_of(&f)
        });
        ops.push(op);
    }
    Ok(UltraAlgebra {
        algebra: LatticeBasedAlgebra::new(ul.lattice.clone(), ops)?,
        quotient: ul.quotient,
        projection: ul.projection,
    })
}

/// The quotient map `∏_I L_i ↠ ∏_U L_i` as a lattice map on the materialised product.
pub fn quotient_hom(ctx: &UltraContext<Arc<FiniteLattice>>, bounds: &Bounds) -> Result<(Product, UltraLattice, LatticeMap)> {
    let prod = direct_product(ctx.family(), bounds)?;
    let ul = ultraproduct_lattices(ctx)?;
    let table = prod
        .lattice
        .elements()
        .map(|t| ul.quotient.class_of(&prod.decode(t)))
        .collect();
    let map = LatticeMap::new(prod.lattice.clone(), ul.lattice.clone(), table)?;
    Ok((prod, ul, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::catalog::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_polarity(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> Polarity {
        let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(0.5)).collect();
        Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y])
    }

    #[test]
    fn context_validation() {
        assert!(UltraContext::<Polarity>::at(vec![], 0).is_err());
        let u = Ultrafilter::principal(3, 0).unwrap();
        assert!(UltraContext::new(vec![Polarity::identity(2)], u).is_err());
    }

    #[test]
    fn single_factor_polarity() {
        let p = Polarity::from_fn(3, 2, |x, y| x <= y);
        let up = ultraproduct_polarities(&UltraContext::at(vec![p.clone()], 0).unwrap()).unwrap();
        assert_eq!(up.polarity, p);
        assert!(up.projection.is_some());
    }

    #[test]
    fn principal_projection() {
        let p = Polarity::identity(2);
        let q = Polarity::from_fn(3, 2, |x, y| x > y);
        let up = ultraproduct_polarities(&UltraContext::at(vec![p, q.clone()], 1).unwrap()).unwrap();
        assert_eq!(up.polarity.x_len(), 3);
        assert!(up.projection.unwrap().verify(&up.polarity, &q));
    }

    #[test]
    fn relation_agrees_with_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let k = rng.gen_range(1..=3);
            let fam: Vec<Polarity> = (0..k)
                .map(|_| {
                    let (nx, ny) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
                    random_polarity(&mut rng, nx, ny)
                })
                .collect();
            let i0 = rng.gen_range(0..k);
            let up = ultraproduct_polarities(&UltraContext::at(fam.clone(), i0).unwrap()).unwrap();
            let iso = up.projection.expect("principal projection verifies");
            // The projection reads one coordinate; the relation was built from ⟦f R g⟧ ∈ U.
            for c in 0..up.polarity.x_len() {
                for d in 0..up.polarity.y_len() {
                    assert_eq!(up.polarity.related(c, d), fam[i0].related(iso.x[c], iso.y[d]));
                }
            }
            // Arbitrary product elements land in the class of their principal value.
            let f: Vec<usize> = fam.iter().map(|p| rng.gen_range(0..p.x_len())).collect();
            assert_eq!(iso.x[up.x.class_of(&f)], f[i0]);
        }
    }

    #[test]
    fn empty_factor_empties_the_carrier() {
        let p = Polarity::identity(2);
        let e = Polarity::from_fn(0, 2, |_, _| false);
        let up = ultraproduct_polarities(&UltraContext::at(vec![p, e], 0).unwrap()).unwrap();
        assert_eq!(up.polarity.x_len(), 0);
        assert_eq!(up.polarity.y_len(), 2);
        assert!(up.projection.is_none());
    }

    #[test]
    fn lattice_ultraproducts() {
        let c2 = Arc::new(chain(2));
        let m = Arc::new(m3());
        let ul = ultraproduct_lattices(&UltraContext::at(vec![m.clone()], 0).unwrap()).unwrap();
        assert!(ul.projection.flags().is_isomorphism());
        let ul = ultraproduct_lattices(&UltraContext::at(vec![c2.clone(), m.clone()], 1).unwrap()).unwrap();
        assert_eq!(ul.lattice.len(), 5);
        assert!(ul.projection.flags().is_isomorphism());
        assert_eq!(ul.lattice.names(), m.names());
    }

    #[test]
    fn order_is_computed_from_truth_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pool = [Arc::new(chain(3)), Arc::new(m3()), Arc::new(n5()), Arc::new(boolean(2))];
        for _ in 0..30 {
            let k = rng.gen_range(1..=3);
            let fam: Vec<_> = (0..k).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
            let i0 = rng.gen_range(0..k);
            let ctx = UltraContext::at(fam.clone(), i0).unwrap();
            let (prod, ul, map) = quotient_hom(&ctx, &Bounds::default()).unwrap();
            let flags = map.flags();
            assert!(flags.hom && flags.surjective);
            for a in prod.lattice.elements() {
                for b in prod.lattice.elements() {
                    let (f, g) = (prod.decode(a), prod.decode(b));
                    let truth = ul.quotient.holds(|i| fam[i].leq(f[i], g[i]));
                    assert_eq!(ul.lattice.leq(map.apply(a), map.apply(b)), truth);
                    assert_eq!(truth, fam[i0].leq(f[i0], g[i0]));
                }
            }
        }
    }

    #[test]
    fn algebra_ultraproducts() {
        let c2 = Arc::new(chain(2));
        let m = Arc::new(m3());
        let neg2 = LatticeBasedAlgebra::new(c2, vec![Operation::from_fn("f", 1, 2, |x| 1 - x[0])]).unwrap();
        let swap = LatticeBasedAlgebra::new(m, vec![Operation::from_fn("f", 1, 5, |x| [4, 2, 1, 3, 0][x[0]])]).unwrap();
        let ua = ultraproduct_algebras(&UltraContext::at(vec![neg2.clone(), swap.clone()], 1).unwrap()).unwrap();
        let f = ua.algebra.op("f").unwrap();
        for c in ua.algebra.lattice.elements() {
            assert_eq!(ua.projection.apply(f.table[c]), swap.op("f").unwrap().table[ua.projection.apply(c)]);
        }
        let bad = LatticeBasedAlgebra::new(Arc::new(chain(2)), vec![]).unwrap();
        assert!(ultraproduct_algebras(&UltraContext::at(vec![neg2, bad], 0).unwrap()).is_err());
    }

    #[test]
    fn congruence_on_sampled_operations() {
        // f ∼ g in every coordinate pair implies op(f) ∼ op(g).
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = Arc::new(n5());
        let join = Operation::from_fn("j", 2, 5, |x| n.join(x[0], x[1]));
        let a = LatticeBasedAlgebra::new(n.clone(), vec![join]).unwrap();
        let fam = vec![a.clone(), a.clone(), a];
        let ua = ultraproduct_algebras(&UltraContext::at(fam, 2).unwrap()).unwrap();
        let q = &ua.quotient;
        for _ in 0..200 {
            let f: Vec<usize> = (0..3).map(|_| rng.gen_range(0..5)).collect();
            let mut g = f.clone();
            g[0] = rng.gen_range(0..5);
            let h: Vec<usize> = (0..3).map(|_| rng.gen_range(0..5)).collect();
            assert_eq!(q.class_of(&f), q.class_of(&g));
            let fh: Vec<usize> = (0..3).map(|i| n.join(f[i], h[i])).collect();
            let gh: Vec<usize> = (0..3).map(|i| n.join(g[i], h[i])).collect();
            assert_eq!(q.class_of(&fh), q.class_of(&gh));
            let j = ua.algebra.op("j").unwrap();
            assert_eq!(j.apply(5, &[q.class_of(&f), q.class_of(&h)]), q.class_of(&fh));
        }
    }
}
