use std::collections::{BTreeMap, HashMap};

use super::formula::{Formula, Var};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::polarity::Polarity;

/// Which carrier an expansion symbol is interpreted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    X,
    Y,
}

/// An element of the combined carrier `X ∪ Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    X(usize),
    Y(usize),
}

pub type Assignment = BTreeMap<Var, Point>;

/// A polarity with unary expansion symbols interpreted as subsets of `X` or `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedPolarity {
    pub base: Polarity,
    interpretations: BTreeMap<String, (Side, BitSet)>,
}

impl ExpandedPolarity {
    pub fn new(base: Polarity) -> Self {
        ExpandedPolarity {
            base,
            interpretations: BTreeMap::new(),
        }
    }

    /// Interprets `name` as a subset of `X`.
    pub fn with_x(self, name: &str, set: BitSet) -> Self {
        self.with(name, Side::X, set)
    }

    /// Interprets `name` as a subset of `Y`.
    pub fn with_y(self, name: &str, set: BitSet) -> Self {
        self.with(name, Side::Y, set)
    }

    pub fn with(mut self, name: &str, side: Side, set: BitSet) -> Self {
        let width = match side {
            Side::X => self.base.x_len(),
            Side::Y => self.base.y_len(),
        };
        assert_eq!(set.universe(), width, "interpretation of {name} has the wrong width");
        self.interpretations.insert(name.to_string(), (side, set));
        self
    }

    pub fn interpretation(&self, name: &str) -> Option<(Side, &BitSet)> {
        self.interpretations.get(name).map(|(s, b)| (*s, b))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.interpretations.keys().map(|s| s.as_str())
    }

    /// Size of `X ∪ Y`; points are numbered with `X` first.
    pub fn universe_len(&self) -> usize {
        self.base.x_len() + self.base.y_len()
    }

    pub fn point(&self, u: usize) -> Point {
        let nx = self.base.x_len();
        if u < nx {
            Point::X(u)
        } else {
            Point::Y(u - nx)
        }
    }

    pub fn index(&self, p: Point) -> usize {
        match p {
            Point::X(i) => i,
            Point::Y(j) => self.base.x_len() + j,
        }
    }

    fn holds_in(&self, side: Side, set: &BitSet, u: usize) -> bool {
        match (side, self.point(u)) {
            (Side::X, Point::X(i)) | (Side::Y, Point::Y(i)) => set.contains(i),
            _ => false,
        }
    }
}

enum Node {
    X(u32),
    Y(u32),
    R(u32, u32),
    Pred(usize, u32),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Forall(u32, usize),
    Exists(u32, usize),
}

/// A formula flattened for evaluation, with the free variables of each node.
struct Compiled<'a> {
    nodes: Vec<Node>,
    free: Vec<Vec<u32>>,
    interps: Vec<(Side, &'a BitSet)>,
}

fn compile<'a>(ep: &'a ExpandedPolarity, f: &Formula) -> Result<(Compiled<'a>, usize)> {
    let mut c = Compiled {
        nodes: Vec::new(),
        free: Vec::new(),
        interps: Vec::new(),
    };
    let mut names: HashMap<String, usize> = HashMap::new();
    let root = add(ep, f, &mut c, &mut names)?;
    Ok((c, root))
}

fn add<'a>(ep: &'a ExpandedPolarity, f: &Formula, c: &mut Compiled<'a>, names: &mut HashMap<String, usize>) -> Result<usize> {
    let node = match f {
        Formula::X(v) => Node::X(v.0),
        Formula::Y(v) => Node::Y(v.0),
        Formula::R(a, b) => Node::R(a.0, b.0),
        Formula::Pred(s, v) => {
            let k = match names.get(s) {
                Some(&k) => k,
                None => {
                    let (side, set) = ep.interpretation(s).ok_or_else(|| Error::Uninterpreted(s.clone()))?;
                    c.interps.push((side, set));
                    names.insert(s.clone(), c.interps.len() - 1);
                    c.interps.len() - 1
                }
            };
            Node::Pred(k, v.0)
        }
        Formula::Not(a) => Node::Not(add(ep, a, c, names)?),
        Formula::And(a, b) => Node::And(add(ep, a, c, names)?, add(ep, b, c, names)?),
        Formula::Or(a, b) => Node::Or(add(ep, a, c, names)?, add(ep, b, c, names)?),
        Formula::Implies(a, b) => Node::Implies(add(ep, a, c, names)?, add(ep, b, c, names)?),
        Formula::Forall(v, a) => Node::Forall(v.0, add(ep, a, c, names)?),
        Formula::Exists(v, a) => Node::Exists(v.0, add(ep, a, c, names)?),
    };
    c.nodes.push(node);
    c.free.push(f.free_vars().into_iter().map(|v| v.0).collect());
    Ok(c.nodes.len() - 1)
}

struct Evaluator<'a> {
    ep: &'a ExpandedPolarity,
    c: Compiled<'a>,
    env: Vec<Option<usize>>,
    memo: HashMap<(usize, Vec<usize>), bool>,
}

impl Evaluator<'_> {
    fn lookup(&self, v: u32) -> usize {
        self.env[v as usize].expect("free variables are bound before evaluation")
    }

    fn eval(&mut self, n: usize) -> bool {
        let p = &self.ep.base;
        match self.c.nodes[n] {
            Node::X(v) => matches!(self.ep.point(self.lookup(v)), Point::X(_)),
            Node::Y(v) => matches!(self.ep.point(self.lookup(v)), Point::Y(_)),
            Node::R(a, b) => match (self.ep.point(self.lookup(a)), self.ep.point(self.lookup(b))) {
                (Point::X(i), Point::Y(j)) => p.related(i, j),
                _ => false,
            },
            Node::Pred(k, v) => {
                let (side, set) = self.c.interps[k];
                self.ep.holds_in(side, set, self.lookup(v))
            }
            Node::Not(a) => !self.eval(a),
            Node::And(a, b) => self.eval(a) && self.eval(b),
            Node::Or(a, b) => self.eval(a) || self.eval(b),
            Node::Implies(a, b) => !self.eval(a) || self.eval(b),
            Node::Forall(v, a) | Node::Exists(v, a) => {
                let key: Vec<usize> = self.c.free[n].iter().map(|&w| self.lookup(w)).collect();
                if let Some(&r) = self.memo.get(&(n, key.clone())) {
                    return r;
                }
                let universal = matches!(self.c.nodes[n], Node::Forall(..));
                let saved = self.env[v as usize];
                let mut result = universal;
                for u in 0..self.ep.universe_len() {
                    self.env[v as usize] = Some(u);
                    if self.eval(a) != universal {
                        result = !universal;
                        break;
                    }
                }
                self.env[v as usize] = saved;
                self.memo.insert((n, key), result);
                result
            }
        }
    }
}

fn max_var(f: &Formula) -> u32 {
    match f {
        Formula::X(v) | Formula::Y(v) | Formula::Pred(_, v) => v.0,
        Formula::R(a, b) => a.0.max(b.0),
        Formula::Not(a) => max_var(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => max_var(a).max(max_var(b)),
        Formula::Forall(v, a) | Formula::Exists(v, a) => v.0.max(max_var(a)),
    }
}

fn evaluator<'a>(ep: &'a ExpandedPolarity, f: &Formula) -> Result<(Evaluator<'a>, usize)> {
    let (c, root) = compile(ep, f)?;
    let env = vec![None; max_var(f) as usize + 1];
    Ok((
        Evaluator {
            ep,
            c,
            env,
            memo: HashMap::new(),
        },
        root,
    ))
}

fn check_point(ep: &ExpandedPolarity, p: Point) -> Result<()> {
    let in_range = match p {
        Point::X(i) => i < ep.base.x_len(),
        Point::Y(j) => j < ep.base.y_len(),
    };
    if in_range {
        Ok(())
    } else {
        Err(Error::UnknownElement(format!("{p:?}")))
    }
}

/// Tarskian truth of `f` in `ep` under `assignment`; quantifiers range over `X ∪ Y`.
pub fn evaluate(ep: &ExpandedPolarity, f: &Formula, assignment: &Assignment) -> Result<bool> {
    let (mut ev, root) = evaluator(ep, f)?;
    for v in f.free_vars() {
        let p = *assignment.get(&v).ok_or(Error::UnboundVariable(v.0))?;
        check_point(ep, p)?;
        ev.env[v.0 as usize] = Some(ep.index(p));
    }
    Ok(ev.eval(root))
}

/// The points of `X ∪ Y` satisfying a formula with exactly one free variable,
/// as a set over the combined carrier (`X` first).
pub fn definable_set(ep: &ExpandedPolarity, f: &Formula) -> Result<BitSet> {
    let free = f.free_vars();
    if free.len() != 1 {
        return Err(Error::FreeVariableCount {
            expected: 1,
            found: free.len(),
        });
    }
    let v = *free.iter().next().expect("one variable");
    let (mut ev, root) = evaluator(ep, f)?;
    let n = ep.universe_len();
    Ok(BitSet::from_indices(
        n,
        (0..n).filter(|&u| {
            ev.env[v.0 as usize] = Some(u);
            ev.eval(root)
        }),
    ))
}

/// `{u ∈ X ∪ Y : φ[v := u, params]}`: the set `φ` defines in `v` once every
/// other free variable is fixed by `params`.
pub fn definable_set_with(ep: &ExpandedPolarity, f: &Formula, v: Var, params: &Assignment) -> Result<BitSet> {
    let (mut ev, root) = evaluator(ep, f)?;
    for w in f.free_vars() {
        if w == v {
            continue;
        }
        let p = *params.get(&w).ok_or(Error::UnboundVariable(w.0))?;
        check_point(ep, p)?;
        ev.env[w.0 as usize] = Some(ep.index(p));
    }
    if (v.0 as usize) >= ev.env.len() {
        ev.env.resize(v.0 as usize + 1, None);
    }
    let n = ep.universe_len();
    Ok(BitSet::from_indices(
        n,
        (0..n).filter(|&u| {
            ev.env[v.0 as usize] = Some(u);
            ev.eval(root)
        }),
    ))
}

/// The part of a combined-carrier set lying in `X`.
pub fn x_part(ep: &ExpandedPolarity, set: &BitSet) -> BitSet {
    BitSet::from_indices(ep.base.x_len(), set.iter().filter(|&u| u < ep.base.x_len()))
}

/// The part of a combined-carrier set lying in `Y`, re-indexed from 0.
pub fn y_part(ep: &ExpandedPolarity, set: &BitSet) -> BitSet {
    let nx = ep.base.x_len();
    BitSet::from_indices(ep.base.y_len(), set.iter().filter(|&u| u >= nx).map(|u| u - nx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn id2() -> Polarity {
        Polarity::identity(2)
    }

    fn at(v: u32, p: Point) -> Assignment {
        [(Var(v), p)].into_iter().collect()
    }

    #[test]
    fn rho_on_identity() {
        let ep = ExpandedPolarity::new(id2()).with_x("S", BitSet::from_indices(2, [0]));
        let rho = rho_formula("S");
        assert!(evaluate(&ep, &rho, &at(1, Point::Y(0))).unwrap());
        assert!(!evaluate(&ep, &rho, &at(1, Point::Y(1))).unwrap());
    }

    #[test]
    fn stability_sentences() {
        let ep = ExpandedPolarity::new(id2()).with_x("S", BitSet::from_indices(2, [0]));
        assert!(evaluate(&ep, &stable_formula("S"), &Assignment::new()).unwrap());
        let empty_rel = Polarity::from_fn(3, 2, |_, _| false);
        let ep = ExpandedPolarity::new(empty_rel).with_x("S", BitSet::from_indices(3, [1]));
        assert!(!evaluate(&ep, &stable_formula("S"), &Assignment::new()).unwrap());
    }

    #[test]
    fn evaluation_errors() {
        let ep = ExpandedPolarity::new(id2());
        assert_eq!(evaluate(&ep, &Formula::X(Var(3)), &Assignment::new()), Err(Error::UnboundVariable(3)));
        assert_eq!(
            evaluate(&ep, &rho_formula("S"), &at(1, Point::Y(0))),
            Err(Error::Uninterpreted("S".into()))
        );
        assert!(matches!(
            definable_set(&ep, &Formula::r(0, 1)),
            Err(Error::FreeVariableCount { found: 2, .. })
        ));
    }

    #[test]
    fn sort_atoms_define_carriers() {
        let p = Polarity::from_fn(3, 2, |i, j| i == j);
        let ep = ExpandedPolarity::new(p);
        let xs = definable_set(&ep, &parse_formula("X(v0)").unwrap()).unwrap();
        assert_eq!(x_part(&ep, &xs), BitSet::full(3));
        assert!(y_part(&ep, &xs).is_empty());
        // The standing sort axioms hold in every polarity.
        for ax in ["forall v0 (X(v0) | Y(v0))", "forall v0 ~(X(v0) & Y(v0))", "forall v0 forall v1 (R(v0,v1) -> X(v0) & Y(v1))"] {
            assert!(evaluate(&ep, &parse_formula(ax).unwrap(), &Assignment::new()).unwrap());
        }
    }

    fn all_subsets(n: usize) -> impl Iterator<Item = BitSet> {
        (0..1u64 << n).map(move |m| BitSet::from_mask(n, m))
    }

    #[test]
    fn definability_matches_galois_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (nx, ny) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
            let density: f64 = rng.gen();
            let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(density)).collect();
            let p = Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y]);
            for a in all_subsets(nx) {
                let ep = ExpandedPolarity::new(p.clone()).with_x("S", a.clone());
                let rho = definable_set(&ep, &sorted_rho_formula("S")).unwrap();
                assert_eq!(y_part(&ep, &rho), p.rho(&a));
                assert!(x_part(&ep, &rho).is_empty());
                let lr = definable_set(&ep, &sorted_lambda_rho_formula("S")).unwrap();
                assert_eq!(x_part(&ep, &lr), p.closure(&a));
                assert!(y_part(&ep, &lr).is_empty());
                let stable = evaluate(&ep, &sorted_stable_formula("S"), &Assignment::new()).unwrap();
                assert_eq!(stable, p.is_stable(&a));
            }
        }
    }

    #[test]
    fn unguarded_formulas_differ_only_at_the_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let (nx, ny) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
            let density: f64 = rng.gen();
            let bits: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(density)).collect();
            let p = Polarity::from_fn(nx, ny, |x, y| bits[x * ny + y]);
            for a in all_subsets(nx) {
                let ep = ExpandedPolarity::new(p.clone()).with_x("S", a.clone());
                let rho = definable_set(&ep, &rho_formula("S")).unwrap();
                assert_eq!(y_part(&ep, &rho), p.rho(&a));
                // On X the consequent is false, so only the vacuous case holds there.
                assert_eq!(x_part(&ep, &rho).is_full(), a.is_empty());
                assert_eq!(x_part(&ep, &rho).is_empty(), !a.is_empty() || nx == 0);
                let lr = definable_set(&ep, &lambda_rho_formula("S")).unwrap();
                let expect = if a.is_empty() && nx > 0 { BitSet::new(nx) } else { p.closure(&a) };
                assert_eq!(x_part(&ep, &lr), expect);
                let stable = evaluate(&ep, &stable_formula("S"), &Assignment::new()).unwrap();
                let expect = if a.is_empty() {
                    true
                } else if p.rho(&a).is_empty() && ny > 0 {
                    false
                } else {
                    p.is_stable(&a)
                };
                assert_eq!(stable, expect);
            }
        }
        // X itself is stable, yet the unguarded sentence rejects it when ρX is empty.
        let p = Polarity::from_fn(1, 1, |_, _| false);
        let ep = ExpandedPolarity::new(p.clone()).with_x("S", BitSet::full(1));
        assert!(p.is_stable(&BitSet::full(1)));
        assert!(!evaluate(&ep, &stable_formula("S"), &Assignment::new()).unwrap());
        assert!(evaluate(&ep, &sorted_stable_formula("S"), &Assignment::new()).unwrap());
    }
}
