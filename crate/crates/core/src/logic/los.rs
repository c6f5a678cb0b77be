use std::fmt;

use super::eval::{definable_set_with, evaluate, Assignment, ExpandedPolarity, Point, Side};
use super::formula::{Formula, Var};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::ultra::{ultraproduct_polarities, QuotientMap, UltraContext, UltraPolarity};

/// An element of `∏ X_i` or `∏ Y_i`, one coordinate per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    X(Vec<usize>),
    Y(Vec<usize>),
}

impl Element {
    fn coords(&self) -> &[usize] {
        match self {
            Element::X(f) | Element::Y(f) => f,
        }
    }

    fn at(&self, i: usize) -> Point {
        match self {
            Element::X(f) => Point::X(f[i]),
            Element::Y(f) => Point::Y(f[i]),
        }
    }
}

/// `∏_U P_i′`: the ultraproduct polarity with `S^U = {f^U : ⟦f ∈ S⟧ ∈ U}`.
#[derive(Debug, Clone)]
pub struct UltraExpansion {
    pub factors: Vec<ExpandedPolarity>,
    pub ultra: UltraPolarity,
    pub structure: ExpandedPolarity,
}

impl UltraExpansion {
    pub fn new(ctx: &UltraContext<ExpandedPolarity>) -> Result<Self> {
        let factors = ctx.family().to_vec();
        let symbols: Vec<(String, Side)> = factors[0]
            .symbols()
            .map(|s| (s.to_string(), factors[0].interpretation(s).expect("listed").0))
            .collect();
        for (i, f) in factors.iter().enumerate().skip(1) {
            let own: Vec<(String, Side)> = f
                .symbols()
                .map(|s| (s.to_string(), f.interpretation(s).expect("listed").0))
                .collect();
            if own != symbols {
                return Err(Error::InvalidContext(format!(
                    "factor {i} interprets a different set of symbols"
                )));
            }
        }
        let bases = UltraContext::new(factors.iter().map(|f| f.base.clone()).collect(), ctx.ultrafilter())?;
        let ultra = ultraproduct_polarities(&bases)?;
        let mut structure = ExpandedPolarity::new(ultra.polarity.clone());
        for (name, side) in &symbols {
            let q = match side {
                Side::X => &ultra.x,
                Side::Y => &ultra.y,
            };
            let set = lift(q, |i, a| factors[i].interpretation(name).expect("checked").1.contains(a));
            structure = structure.with(name, *side, set);
        }
        Ok(UltraExpansion {
            factors,
            ultra,
            structure,
        })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `f^U` as a point of the ultraproduct.
    pub fn class_of(&self, e: &Element) -> Result<Point> {
        let (q, sizes): (&QuotientMap, Vec<usize>) = match e {
            Element::X(_) => (&self.ultra.x, self.factors.iter().map(|f| f.base.x_len()).collect()),
            Element::Y(_) => (&self.ultra.y, self.factors.iter().map(|f| f.base.y_len()).collect()),
        };
        let f = e.coords();
        if f.len() != sizes.len() {
            return Err(Error::ArityMismatch {
                name: "product element".into(),
                expected: sizes.len(),
                found: f.len(),
            });
        }
        if let Some(i) = (0..f.len()).find(|&i| f[i] >= sizes[i]) {
            return Err(Error::UnknownElement(format!("coordinate {i} of {e:?}")));
        }
        let c = q.class_of(f);
        Ok(match e {
            Element::X(_) => Point::X(c),
            Element::Y(_) => Point::Y(c),
        })
    }

    fn factor_assignment(&self, tuple: &[(Var, Element)], i: usize) -> Assignment {
        tuple.iter().map(|(v, e)| (*v, e.at(i))).collect()
    }

    fn checked_tuple(&self, phi: &Formula, tuple: &[(Var, Element)], skip: Option<Var>) -> Result<Assignment> {
        let free: Vec<Var> = phi.free_vars().into_iter().filter(|v| Some(*v) != skip).collect();
        let covered = free.iter().filter(|v| tuple.iter().any(|(w, _)| w == *v)).count();
        if covered != free.len() {
            return Err(Error::ArityMismatch {
                name: phi.to_string(),
                expected: free.len(),
                found: covered,
            });
        }
        tuple.iter().map(|(v, e)| Ok((*v, self.class_of(e)?))).collect()
    }
}

/// `{c : ⟦rep(c) ∈ D⟧ ∈ U}` over one carrier of the ultraproduct.
fn lift(q: &QuotientMap, member: impl Fn(usize, usize) -> bool) -> BitSet {
    BitSet::from_indices(q.len(), (0..q.len()).filter(|&c| {
        let f = q.rep(c);
        q.holds(|i| member(i, f[i]))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LosReport {
    /// `∏_U P_i′ ⊨ φ[f⃗^U]`.
    pub lhs: bool,
    /// `⟦φ(f⃗)⟧`.
    pub truth_set: BitSet,
    /// `⟦φ(f⃗)⟧ ∈ U`.
    pub rhs: bool,
}

impl LosReport {
    pub fn agree(&self) -> bool {
        self.lhs == self.rhs
    }
}

impl fmt::Display for LosReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ultraproduct: {}, truth set {}: {}, {}",
            self.lhs,
            self.truth_set,
            if self.rhs { "in U" } else { "not in U" },
            if self.agree() { "agree" } else { "DISAGREE" }
        )
    }
}

/// Both sides of the fundamental theorem for one formula and one tuple.
pub fn check_los(u: &UltraExpansion, phi: &Formula, tuple: &[(Var, Element)]) -> Result<LosReport> {
    let assignment = u.checked_tuple(phi, tuple, None)?;
    let lhs = evaluate(&u.structure, phi, &assignment)?;
    let mut truth = Vec::new();
    for (i, fac) in u.factors.iter().enumerate() {
        if evaluate(fac, phi, &u.factor_assignment(tuple, i))? {
            truth.push(i);
        }
    }
    let truth_set = BitSet::from_indices(u.len(), truth);
    let rhs = u.ultra.x.ultrafilter().contains(&truth_set);
    Ok(LosReport { lhs, truth_set, rhs })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinabilityReport {
    /// `α(i)`, the set `φ` defines in factor `i`, over `X_i ∪ Y_i`.
    pub factor_sets: Vec<BitSet>,
    /// `θ(α^U) = {f^U : ⟦f ∈ α⟧ ∈ U}` over the ultraproduct's `X ∪ Y`.
    pub theta: BitSet,
    /// The set `φ` defines in the ultraproduct.
    pub defined: BitSet,
}

impl DefinabilityReport {
    pub fn agree(&self) -> bool {
        self.theta == self.defined
    }
}

/// If `φ(v)` defines `α(i)` in each factor, it defines `θ(α^U)` in the ultraproduct.
pub fn check_definability(u: &UltraExpansion, phi: &Formula, v: Var, params: &[(Var, Element)]) -> Result<DefinabilityReport> {
    let assignment = u.checked_tuple(phi, params, Some(v))?;
    let factor_sets = u
        .factors
        .iter()
        .enumerate()
        .map(|(i, fac)| definable_set_with(fac, phi, v, &u.factor_assignment(params, i)))
        .collect::<Result<Vec<_>>>()?;
    let nx: Vec<usize> = u.factors.iter().map(|f| f.base.x_len()).collect();
    let xs = lift(&u.ultra.x, |i, a| factor_sets[i].contains(a));
    let ys = lift(&u.ultra.y, |i, b| factor_sets[i].contains(nx[i] + b));
    let total = u.ultra.x.len() + u.ultra.y.len();
    let theta = BitSet::from_indices(total, xs.iter().chain(ys.iter().map(|b| u.ultra.x.len() + b)));
    let defined = definable_set_with(&u.structure, phi, v, &assignment)?;
    Ok(DefinabilityReport {
        factor_sets,
        theta,
        defined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::*;
    use crate::polarity::Polarity;
    use crate::ultra::ultrafilters;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn expanded(rng: &mut ChaCha8Rng) -> ExpandedPolarity {
        let (nx, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(0.5)).collect();
        let p = Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y]);
        let s = BitSet::from_indices(nx, (0..nx).filter(|_| rng.gen_bool(0.5)));
        let t = BitSet::from_indices(nx, (0..nx).filter(|_| rng.gen_bool(0.5)));
        ExpandedPolarity::new(p).with_x("S", s).with_x("T", t)
    }

    fn random_element(rng: &mut ChaCha8Rng, u: &UltraExpansion) -> Element {
        if rng.gen_bool(0.5) {
            Element::X(u.factors.iter().map(|f| rng.gen_range(0..f.base.x_len())).collect())
        } else {
            Element::Y(u.factors.iter().map(|f| rng.gen_range(0..f.base.y_len())).collect())
        }
    }

    #[test]
    fn single_factor_reduces_to_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = expanded(&mut rng);
        let u = UltraExpansion::new(&UltraContext::at(vec![p.clone()], 0).unwrap()).unwrap();
        let phi = rho_formula("S");
        for y in 0..p.base.y_len() {
            let r = check_los(&u, &phi, &[(Var(1), Element::Y(vec![y]))]).unwrap();
            let direct = evaluate(&p, &phi, &Assignment::from([(Var(1), Point::Y(y))])).unwrap();
            assert!(r.agree());
            assert_eq!(r.lhs, direct);
        }
    }

    #[test]
    fn stability_at_the_second_factor() {
        let p = ExpandedPolarity::new(Polarity::identity(2)).with_x("S", BitSet::from_indices(2, [0]));
        let q = ExpandedPolarity::new(Polarity::from_fn(2, 2, |_, _| false)).with_x("S", BitSet::from_indices(2, [0]));
        let u = UltraExpansion::new(&UltraContext::at(vec![p, q.clone()], 1).unwrap()).unwrap();
        for phi in [stable_formula("S"), sorted_stable_formula("S")] {
            let r = check_los(&u, &phi, &[]).unwrap();
            assert!(r.agree());
            assert_eq!(r.lhs, evaluate(&q, &phi, &Assignment::new()).unwrap());
        }
        assert!(!check_los(&u, &sorted_stable_formula("S"), &[]).unwrap().lhs);
    }

    #[test]
    fn definability_across_three_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let fam: Vec<_> = (0..3).map(|_| expanded(&mut rng)).collect();
            for uf in ultrafilters(3) {
                let u = UltraExpansion::new(&UltraContext::new(fam.clone(), uf).unwrap()).unwrap();
                for phi in [rho_formula("S"), lambda_rho_formula("S"), join_formula("S", "T")] {
                    let v = *phi.free_vars().iter().next().unwrap();
                    let r = check_definability(&u, &phi, v, &[]).unwrap();
                    assert!(r.agree());
                }
            }
        }
    }

    #[test]
    fn random_tuples_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let phi = parse_formula("exists v2 . R(v0,v2) & ~R(v1,v2) | S(v0)").unwrap();
        for _ in 0..30 {
            let k = rng.gen_range(1..=4);
            let fam: Vec<_> = (0..k).map(|_| expanded(&mut rng)).collect();
            for uf in ultrafilters(k) {
                let u = UltraExpansion::new(&UltraContext::new(fam.clone(), uf).unwrap()).unwrap();
                let tuple = [(Var(0), random_element(&mut rng, &u)), (Var(1), random_element(&mut rng, &u))];
                assert!(check_los(&u, &phi, &tuple).unwrap().agree());
                let r = check_definability(&u, &phi, Var(0), &tuple[1..]).unwrap();
                assert!(r.agree());
            }
        }
    }

    #[test]
    fn uncovered_variables_and_mismatched_symbols() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let p = expanded(&mut rng);
        let u = UltraExpansion::new(&UltraContext::at(vec![p.clone()], 0).unwrap()).unwrap();
        assert!(matches!(check_los(&u, &rho_formula("S"), &[]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(
            check_los(&u, &rho_formula("S"), &[(Var(1), Element::Y(vec![0, 0]))]),
            Err(Error::ArityMismatch { .. })
        ));
        let bare = ExpandedPolarity::new(p.base.clone());
        assert!(UltraExpansion::new(&UltraContext::at(vec![p, bare], 0).unwrap()).is_err());
    }
}
