use std::fmt;

use super::{ultraproduct_lattices, ultraproduct_polarities, UltraContext, UltraLattice, UltraPolarity, Ultrafilter};
use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::logic::{definable_set, definable_set_with, join_formula, x_part, Assignment, ExpandedPolarity, Formula, Point, Var};
use crate::order::LatticeMap;
use crate::polarity::{stable_set_lattice, Polarity, StableSetLattice};

/// `θ : ∏_U (P_i⁺) → (∏_U P_i)⁺` together with everything it was built from.
#[derive(Debug, Clone)]
pub struct ThetaStable {
    pub factors: Vec<StableSetLattice>,
    pub source: UltraLattice,
    pub target_polarity: UltraPolarity,
    pub target: StableSetLattice,
    pub map: LatticeMap,
}

impl ThetaStable {
    /// `{f^U : ⟦f ∈ α⟧ ∈ U}` for a family `α` of factor elements.
    pub fn theta_set(&self, alpha: &[usize]) -> BitSet {
        let xq = &self.target_polarity.x;
        BitSet::from_indices(
            xq.len(),
            (0..xq.len()).filter(|&c| {
                let f = xq.rep(c);
                xq.holds(|i| self.factors[i].extent(alpha[i]).contains(f[i]))
            }),
        )
    }

    pub fn ultrafilter(&self) -> Ultrafilter {
        self.source.quotient.ultrafilter()
    }
}

pub fn theta_stable(ctx: &UltraContext<Polarity>, bounds: &Bounds) -> Result<ThetaStable> {
    let factors = ctx
        .family()
        .iter()
        .map(|p| stable_set_lattice(p, bounds))
        .collect::<Result<Vec<_>>>()?;
    let lattices = UltraContext::new(factors.iter().map(|s| s.lattice.clone()).collect(), ctx.ultrafilter())?;
    let source = ultraproduct_lattices(&lattices)?;
    let target_polarity = ultraproduct_polarities(ctx)?;
    let target = stable_set_lattice(&target_polarity.polarity, bounds)?;
    let mut theta = ThetaStable {
        factors,
        source,
        target_polarity,
        map: LatticeMap::identity(target.lattice.clone()),
        target,
    };
    let table = (0..theta.source.quotient.len())
        .map(|c| {
            let s = theta.theta_set(theta.source.quotient.rep(c));
            theta
                .target
                .index_of(&s)
                .ok_or_else(|| Error::NotStable(theta.target.base.x_set_name(&s)))
        })
        .collect::<Result<Vec<_>>>()?;
    theta.map = LatticeMap::new(theta.source.lattice.clone(), theta.target.lattice.clone(), table)?;
    Ok(theta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaReport {
    pub injective: bool,
    pub hom: bool,
    /// `θ(1^U) = ∏_U X_i`.
    pub top: bool,
    /// `θ(0^U) = λ(∏_U Y_i)`.
    pub bottom: bool,
    pub meets_are_intersections: bool,
    pub joins: bool,
    /// The join formula defines `α(i) ∨ β(i)` in every factor.
    pub factor_joins_by_formula: bool,
    /// The join formula over `θ(α^U), θ(β^U)` defines `θ((α ∨ β)^U)`.
    pub joins_by_formula: bool,
    pub failure: Option<String>,
}

impl ThetaReport {
    pub fn pass(&self) -> bool {
        self.injective
            && self.hom
            && self.top
            && self.bottom
            && self.meets_are_intersections
            && self.joins
            && self.factor_joins_by_formula
            && self.joins_by_formula
    }
}

impl fmt::Display for ThetaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "injective: {}", yn(self.injective))?;
        writeln!(f, "homomorphism: {}", yn(self.hom))?;
        writeln!(f, "top and bottom: {}", yn(self.top && self.bottom))?;
        writeln!(f, "meets are intersections: {}", yn(self.meets_are_intersections))?;
        writeln!(f, "joins (direct): {}", yn(self.joins))?;
        write!(
            f,
            "joins (formula): {}",
            yn(self.factor_joins_by_formula && self.joins_by_formula)
        )?;
        if let Some(w) = &self.failure {
            write!(f, "\nfailure: {w}")?;
        }
        Ok(())
    }
}

fn formula_join(p: &Polarity, s1: &BitSet, s2: &BitSet, phi: &Formula) -> Result<BitSet> {
    let ep = ExpandedPolarity::new(p.clone())
        .with_x("S1", s1.clone())
        .with_x("S2", s2.clone());
    Ok(x_part(&ep, &definable_set(&ep, phi)?))
}

pub fn verify_theta(t: &ThetaStable) -> Result<ThetaReport> {
    let flags = t.map.flags();
    let src = &t.source.lattice;
    let tgt = &t.target;
    let q = &t.source.quotient;
    let mut failure = None;
    let mut note = |msg: String| {
        if failure.is_none() {
            failure = Some(msg);
        }
    };
    let p = &t.target_polarity.polarity;

    let top = *tgt.extent(t.map.apply(src.top())) == BitSet::full(p.x_len());
    if !top {
        note("θ(1) is not the whole carrier".into());
    }
    let bottom = *tgt.extent(t.map.apply(src.bottom())) == p.lambda(&BitSet::full(p.y_len()));
    if !bottom {
        note("θ(0) is not λ(Y)".into());
    }

    let phi = join_formula("S1", "S2");
    let mut factor_joins = true;
    for (i, fac) in t.factors.iter().enumerate() {
        let l = &fac.lattice;
        for a in l.elements() {
            for b in a..l.len() {
                let got = formula_join(&fac.base, fac.extent(a), fac.extent(b), &phi)?;
                if got != *fac.extent(l.join(a, b)) {
                    factor_joins = false;
                    note(format!("join formula fails in factor {i} at ({}, {})", l.name(a), l.name(b)));
                }
            }
        }
    }

    let (mut meets, mut joins, mut joins_formula) = (true, true, true);
    for a in src.elements() {
        for b in a..src.len() {
            let (ta, tb) = (tgt.extent(t.map.apply(a)), tgt.extent(t.map.apply(b)));
            // Coordinatewise meet and join of representatives, then θ.
            let (fa, fb) = (q.rep(a), q.rep(b));
            let meet_rep: Vec<usize> = (0..fa.len()).map(|i| t.factors[i].lattice.meet(fa[i], fb[i])).collect();
            let join_rep: Vec<usize> = (0..fa.len()).map(|i| t.factors[i].lattice.join(fa[i], fb[i])).collect();
            let theta_meet = t.theta_set(&meet_rep);
            let theta_join = t.theta_set(&join_rep);
            if theta_meet != ta.intersection(tb) {
                meets = false;
                note(format!("θ({} ∧ {}) is not an intersection", src.name(a), src.name(b)));
            }
            if theta_join != p.closure(&ta.union(tb)) {
                joins = false;
                note(format!("θ({} ∨ {}) is not the join", src.name(a), src.name(b)));
            }
            if formula_join(p, ta, tb, &phi)? != theta_join {
                joins_formula = false;
                note(format!("join formula disagrees at ({}, {})", src.name(a), src.name(b)));
            }
        }
    }

    Ok(ThetaReport {
        injective: flags.injective,
        hom: flags.hom,
        top,
        bottom,
        meets_are_intersections: meets,
        joins,
        factor_joins_by_formula: factor_joins,
        joins_by_formula: joins_formula,
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacNeilleThetaReport {
    pub injective_hom: bool,
    /// Every stable set of `P^U` is a join of image elements.
    pub join_dense: bool,
    /// Every stable set of `P^U` is a meet of image elements.
    pub meet_dense: bool,
    /// `λ{g^U}` lies in the image and equals `θ` of `i ↦ λ{g(i)}`.
    pub lambda_witnesses: bool,
    /// `λρ{h^U}` lies in the image and equals `θ` of `i ↦ λρ{h(i)}`.
    pub closure_witnesses: bool,
    /// The two witness families agree with the sets their formulas define.
    pub formulas_agree: bool,
    pub failure: Option<String>,
}

impl MacNeilleThetaReport {
    pub fn pass(&self) -> bool {
        self.injective_hom
            && self.join_dense
            && self.meet_dense
            && self.lambda_witnesses
            && self.closure_witnesses
            && self.formulas_agree
    }
}

impl fmt::Display for MacNeilleThetaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "injective homomorphism: {}", yn(self.injective_hom))?;
        writeln!(f, "join-dense: {}", yn(self.join_dense))?;
        writeln!(f, "meet-dense: {}", yn(self.meet_dense))?;
        write!(
            f,
            "witness families in image: {}",
            yn(self.lambda_witnesses && self.closure_witnesses && self.formulas_agree)
        )?;
        if let Some(w) = &self.failure {
            write!(f, "\nfailure: {w}")?;
        }
        Ok(())
    }
}

/// Builds `θ : (P⁺)^U → (P^U)⁺` for the ultrapower of `p` and checks that
/// it is a MacNeille completion.
pub fn macneille_theta_check(p: &Polarity, u: Ultrafilter, bounds: &Bounds) -> Result<(ThetaStable, MacNeilleThetaReport)> {
    let ctx = UltraContext::new(vec![p.clone(); u.size()], u)?;
    let t = theta_stable(&ctx, bounds)?;
    let report = macneille_report(&t)?;
    Ok((t, report))
}

fn macneille_report(t: &ThetaStable) -> Result<MacNeilleThetaReport> {
    let flags = t.map.flags();
    let tl = &t.target.lattice;
    let image = t.map.image();
    let mut failure = None;
    let mut note = |msg: String| {
        if failure.is_none() {
            failure = Some(msg);
        }
    };
    let (mut join_dense, mut meet_dense) = (true, true);
    for z in tl.elements() {
        let below = image.iter().filter(|&c| tl.leq(c, z));
        if tl.big_join(below) != z {
            join_dense = false;
            note(format!("{} is not a join of image elements", tl.name(z)));
        }
        let above = image.iter().filter(|&c| tl.leq(z, c));
        if tl.big_meet(above) != z {
            meet_dense = false;
            note(format!("{} is not a meet of image elements", tl.name(z)));
        }
    }

    let up = &t.target_polarity;
    let p = &up.polarity;
    let ep = ExpandedPolarity::new(p.clone());
    let in_image = |s: &BitSet| t.target.index_of(s).is_some_and(|k| image.contains(k));
    let lambda_f = Formula::r(0, 1);
    let closure_f = Formula::forall(2, Formula::implies(Formula::r(1, 2), Formula::r(0, 2)));
    let (mut lambda_ok, mut closure_ok, mut formulas) = (true, true, true);

    for g in 0..up.y.len() {
        let direct = p.lambda(&BitSet::singleton(p.y_len(), g));
        let rep = up.y.rep(g);
        let alpha = factor_indices(t, |i, fac| fac.base.lambda(&BitSet::singleton(fac.base.y_len(), rep[i])))?;
        if !in_image(&direct) || t.theta_set(&alpha) != direct {
            lambda_ok = false;
            note(format!("λ{{{}}} is not θ of its factorwise family", p.y_names()[g]));
        }
        let params = Assignment::from([(Var(1), Point::Y(g))]);
        if x_part(&ep, &definable_set_with(&ep, &lambda_f, Var(0), &params)?) != direct {
            formulas = false;
            note(format!("R(v0,v1) does not define λ{{{}}}", p.y_names()[g]));
        }
    }
    for h in 0..up.x.len() {
        let direct = p.closure(&BitSet::singleton(p.x_len(), h));
        let rep = up.x.rep(h);
        let alpha = factor_indices(t, |i, fac| fac.base.closure(&BitSet::singleton(fac.base.x_len(), rep[i])))?;
        if !in_image(&direct) || t.theta_set(&alpha) != direct {
            closure_ok = false;
            note(format!("λρ{{{}}} is not θ of its factorwise family", p.x_names()[h]));
        }
        let params = Assignment::from([(Var(1), Point::X(h))]);
        if x_part(&ep, &definable_set_with(&ep, &closure_f, Var(0), &params)?) != direct {
            formulas = false;
            note(format!("∀v2 (R(v1,v2) → R(v0,v2)) does not define λρ{{{}}}", p.x_names()[h]));
        }
    }

    Ok(MacNeilleThetaReport {
        injective_hom: flags.injective && flags.hom,
        join_dense,
        meet_dense,
        lambda_witnesses: lambda_ok,
        closure_witnesses: closure_ok,
        formulas_agree: formulas,
        failure,
    })
}

fn factor_indices(t: &ThetaStable, f: impl Fn(usize, &StableSetLattice) -> BitSet) -> Result<Vec<usize>> {
    t.factors
        .iter()
        .enumerate()
        .map(|(i, fac)| {
            let s = f(i, fac);
            fac.index_of(&s).ok_or_else(|| Error::NotStable(fac.base.x_set_name(&s)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{catalog, find_isomorphism};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_polarity(rng: &mut ChaCha8Rng, max: usize) -> Polarity {
        let (nx, ny) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
        let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(0.5)).collect();
        Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y])
    }

    #[test]
    fn single_factor_is_an_isomorphism() {
        let p = Polarity::from_fn(3, 3, |x, y| x != y);
        let t = theta_stable(&UltraContext::at(vec![p], 0).unwrap(), &Bounds::default()).unwrap();
        assert!(t.map.flags().is_isomorphism());
        assert!(verify_theta(&t).unwrap().pass());
    }

    #[test]
    fn identity_pair_gives_the_four_element_boolean_lattice() {
        let p = Polarity::identity(2);
        let ctx = UltraContext::at(vec![p.clone(), p], 0).unwrap();
        let t = theta_stable(&ctx, &Bounds::default()).unwrap();
        assert_eq!(t.source.lattice.len(), 4);
        assert!(t.map.flags().is_isomorphism());
        let b2 = Arc::new(catalog::boolean(2));
        assert!(find_isomorphism(&t.target.lattice, &b2, &Bounds::default()).unwrap().is_some());
        assert!(find_isomorphism(&t.source.lattice, &b2, &Bounds::default()).unwrap().is_some());
    }

    #[test]
    fn bounds_go_to_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let k = rng.gen_range(1..=3);
            let fam: Vec<Polarity> = (0..k).map(|_| random_polarity(&mut rng, 4)).collect();
            for i0 in 0..k {
                let t = theta_stable(&UltraContext::at(fam.clone(), i0).unwrap(), &Bounds::default()).unwrap();
                let r = verify_theta(&t).unwrap();
                assert!(r.pass(), "{r}");
            }
        }
    }

    #[test]
    fn report_catches_a_broken_map() {
        let p = Polarity::identity(2);
        let mut t = theta_stable(&UltraContext::at(vec![p], 0).unwrap(), &Bounds::default()).unwrap();
        let n = t.target.lattice.len();
        t.map = LatticeMap::constant(t.source.lattice.clone(), t.target.lattice.clone(), n - 1).unwrap();
        let r = verify_theta(&t).unwrap();
        assert!(!r.injective);
        assert!(r.failure.is_some());
    }

    #[test]
    fn macneille_property() {
        let (t, r) = macneille_theta_check(&Polarity::identity(3), Ultrafilter::principal(3, 1).unwrap(), &Bounds::default()).unwrap();
        assert!(r.pass(), "{r}");
        assert_eq!(t.target.lattice.len(), 5);
        let (_, r) = macneille_theta_check(&Polarity::from_fn(2, 3, |x, y| x < y), Ultrafilter::principal(1, 0).unwrap(), &Bounds::default()).unwrap();
        assert!(r.pass());
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let p = random_polarity(&mut rng, 5);
            let n = rng.gen_range(1..=3);
            let u = Ultrafilter::principal(n, rng.gen_range(0..n)).unwrap();
            let (_, r) = macneille_theta_check(&p, u, &Bounds::default()).unwrap();
            assert!(r.pass(), "{r}");
        }
    }
}
