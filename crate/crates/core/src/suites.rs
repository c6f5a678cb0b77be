//! Property suites run by the acceptance test and `stablelat verify`.
//!
//! Every suite draws its inputs from a seeded generator, checks each case
//! against an independent computation where one exists, and reports the
//! first failing case as a witness.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::completion::{
    canonical_extension, compatible_isomorphism, extend_map_general, extend_map_isotone, is_compact, is_dense,
    macneille,
};
use crate::error::Result;
use crate::gen::{random_family, random_hom, random_lattice, random_polarity};
use crate::io::{read_cxt, read_formula_corpus, read_lattice, read_polarity, write_cxt, write_dot, write_lattice, write_polarity};
use crate::logic::{
    check_definability, check_equation, check_los, parse_equation, Element, EquationOutcome, ExpandedPolarity, Formula,
    UltraExpansion, Var, DISTRIBUTIVE, MODULAR,
};
use crate::order::{catalog, find_isomorphism, validate_lattice, FiniteLattice, LatticeBasedAlgebra};
use crate::polarity::{stable_set_lattice, Polarity};
use crate::ultra::{
    macneille_theta_check, product_extension, theta_stable, ultrafilters, verify_framework_axioms,
    verify_product_extension, verify_theta, UltraContext,
};

/// The shipped formula corpus.
pub const FORMULA_CORPUS: &str = include_str!("../corpus/formulas.txt");

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub cases: usize,
    pub pass: bool,
    pub detail: String,
    pub witness: Option<String>,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} cases, {} ({:.2}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.cases,
            self.detail,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(w) = &self.witness {
            write!(f, "\n       witness: {w}")?;
        }
        Ok(())
    }
}

pub struct Suite {
    pub id: u8,
    pub name: &'static str,
    pub run: fn(&Bounds) -> CriterionReport,
}

pub const SUITES: &[Suite] = &[
    Suite { id: 1, name: "galois", run: galois_laws },
    Suite { id: 2, name: "stable-sets", run: stable_sets },
    Suite { id: 3, name: "decomposition", run: decomposition },
    Suite { id: 4, name: "macneille", run: macneille_completions },
    Suite { id: 5, name: "canext", run: canonical_extensions },
    Suite { id: 6, name: "map-extension", run: map_extensions },
    Suite { id: 7, name: "theta", run: theta_embeddings },
    Suite { id: 8, name: "los", run: los_and_definability },
    Suite { id: 9, name: "product-extension", run: product_extensions },
    Suite { id: 10, name: "macneille-theta", run: macneille_theta },
    Suite { id: 11, name: "framework", run: framework },
    Suite { id: 12, name: "equations", run: equations },
    Suite { id: 13, name: "formats", run: formats },
];

pub fn suite(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name || s.id.to_string() == name)
}

fn rng_for(bounds: &Bounds, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(bounds.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id as u64))
}

/// Outcome of one case: `Ok(None)` passes, `Ok(Some(w))` fails with witness `w`.
type Case = Result<Option<String>>;

/// Runs cases in parallel and keeps the first failure in input order.
fn run_cases<T: Sync>(inputs: &[T], check: impl Fn(usize, &T) -> Case + Sync) -> (bool, Option<String>) {
    let results: Vec<Case> = inputs.par_iter().enumerate().map(|(i, t)| check(i, t)).collect();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(None) => {}
            Ok(Some(w)) => return (false, Some(format!("case {i}: {w}"))),
            Err(e) => return (false, Some(format!("case {i}: error: {e}"))),
        }
    }
    (true, None)
}

fn report(
    id: u8,
    name: &'static str,
    start: Instant,
    cases: usize,
    (pass, witness): (bool, Option<String>),
    detail: String,
) -> CriterionReport {
    CriterionReport {
        id,
        name,
        cases,
        pass,
        detail,
        witness,
        elapsed: start.elapsed(),
    }
}

fn all_subsets(n: usize) -> Vec<BitSet> {
    (0..1u64 << n).map(|m| BitSet::from_mask(n, m)).collect()
}

/// `ρA` straight from the definition, pair by pair.
fn naive_rho(p: &Polarity, a: &BitSet) -> BitSet {
    BitSet::from_indices(p.y_len(), (0..p.y_len()).filter(|&y| a.iter().all(|x| p.related(x, y))))
}

fn naive_lambda(p: &Polarity, b: &BitSet) -> BitSet {
    BitSet::from_indices(p.x_len(), (0..p.x_len()).filter(|&x| b.iter().all(|y| p.related(x, y))))
}

fn galois_corpus(bounds: &Bounds) -> Vec<Polarity> {
    let mut rng = rng_for(bounds, 1);
    (0..200).map(|_| random_polarity(&mut rng, 0, 8, 8)).collect()
}

fn galois_case(p: &Polarity) -> Option<String> {
    let name = |s: &BitSet| p.x_set_name(s);
    let xs = all_subsets(p.x_len());
    let ys = all_subsets(p.y_len());
    let rho: Vec<BitSet> = xs.iter().map(|a| p.rho(a)).collect();
    let lam: Vec<BitSet> = ys.iter().map(|b| p.lambda(b)).collect();
    for (a, ra) in xs.iter().zip(&rho) {
        if *ra != naive_rho(p, a) {
            return Some(format!("ρ{} differs from the definition", name(a)));
        }
        let lra = p.lambda(ra);
        if !a.is_subset(&lra) {
            return Some(format!("{} is not below λρ of itself", name(a)));
        }
        if p.rho(&lra) != *ra {
            return Some(format!("ρλρ{} ≠ ρ{}", name(a), name(a)));
        }
    }
    for (b, lb) in ys.iter().zip(&lam) {
        if *lb != naive_lambda(p, b) {
            return Some(format!("λ{b} differs from the definition"));
        }
        let rlb = p.rho(lb);
        if !b.is_subset(&rlb) {
            return Some(format!("{b} is not below ρλ of itself"));
        }
        if p.lambda(&rlb) != *lb {
            return Some(format!("λρλ{b} ≠ λ{b}"));
        }
    }
    for (i, a1) in xs.iter().enumerate() {
        for (j, a2) in xs.iter().enumerate() {
            if a1.is_subset(a2) && !rho[j].is_subset(&rho[i]) {
                return Some(format!("ρ does not reverse {} ⊆ {}", name(a1), name(a2)));
            }
        }
    }
    for (i, b1) in ys.iter().enumerate() {
        for (j, b2) in ys.iter().enumerate() {
            if b1.is_subset(b2) && !lam[j].is_subset(&lam[i]) {
                return Some(format!("λ does not reverse {b1} ⊆ {b2}"));
            }
        }
    }
    None
}

pub fn galois_laws(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let corpus = galois_corpus(bounds);
    let (mut pass, mut witness) = run_cases(&corpus, |_, p| Ok(galois_case(p)));
    let limit = Duration::from_secs(30);
    if pass && start.elapsed() > limit {
        pass = false;
        witness = Some(format!("took {:.1}s, limit {}s", start.elapsed().as_secs_f64(), limit.as_secs()));
    }
    let detail = "all A ⊆ X and B ⊆ Y, |X|, |Y| ≤ 8".to_string();
    report(1, "Galois laws", start, corpus.len(), (pass, witness), detail)
}

pub fn stable_sets(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 2);
    let corpus: Vec<Polarity> = (0..60).map(|_| random_polarity(&mut rng, 0, 8, 10)).collect();
    let outcome = run_cases(&corpus, |_, p| {
        let s = stable_set_lattice(p, bounds)?;
        let mut brute: Vec<BitSet> = all_subsets(p.y_len()).iter().map(|b| naive_lambda(p, b)).collect();
        brute.sort();
        brute.dedup();
        if brute != s.extents {
            return Ok(Some(format!("{} stable sets by brute force, {} enumerated", brute.len(), s.len())));
        }
        let l = &s.lattice;
        validate_lattice(&l.leq_matrix(), l.names().to_vec())?;
        for a in l.elements() {
            for b in l.elements() {
                let (ea, eb) = (s.extent(a), s.extent(b));
                if s.extent(l.meet(a, b)) != &ea.intersection(eb) {
                    return Ok(Some(format!("meet of {} and {} is not the intersection", l.name(a), l.name(b))));
                }
                let union = ea.union(eb);
                if *s.extent(l.join(a, b)) != naive_lambda(p, &naive_rho(p, &union)) {
                    return Ok(Some(format!("join of {} and {} is not λρ of the union", l.name(a), l.name(b))));
                }
            }
        }
        Ok(None)
    });
    let detail = "enumeration = {λB : B ⊆ Y}, |Y| ≤ 10".to_string();
    report(2, "stable-set lattice", start, corpus.len(), outcome, detail)
}

pub fn decomposition(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let corpus = galois_corpus(bounds);
    let extents = std::sync::atomic::AtomicUsize::new(0);
    let outcome = run_cases(&corpus, |_, p| {
        let s = stable_set_lattice(p, bounds)?;
        for a in &s.extents {
            extents.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            let d = s.decompose(a)?;
            if d.meet_value != *a {
                return Ok(Some(format!("{} is not the meet of λ{{y}}, y ∈ ρA", p.x_set_name(a))));
            }
            if d.join_value != *a {
                return Ok(Some(format!("{} is not the join of λρ{{x}}, x ∈ A", p.x_set_name(a))));
            }
        }
        Ok(None)
    });
    let detail = format!("{} extents, both identities", extents.into_inner());
    report(3, "stable-set decomposition", start, corpus.len(), outcome, detail)
}

fn dense_image(c: &crate::completion::Completion) -> Option<String> {
    let t = c.target();
    let image = c.embed().image();
    for z in t.elements() {
        if t.big_join(image.iter().filter(|&a| t.leq(a, z))) != z {
            return Some(format!("{} is not a join of image elements", t.name(z)));
        }
        if t.big_meet(image.iter().filter(|&a| t.leq(z, a))) != z {
            return Some(format!("{} is not a meet of image elements", t.name(z)));
        }
    }
    None
}

pub fn macneille_completions(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 4);
    let corpus: Vec<Arc<FiniteLattice>> = (0..100).map(|_| Arc::new(random_lattice(&mut rng, 12))).collect();
    let (mut pass, mut witness) = run_cases(&corpus, |_, l| {
        let c = macneille(l, bounds)?;
        if let Some(w) = dense_image(&c) {
            return Ok(Some(w));
        }
        Ok(match find_isomorphism(c.target(), l, bounds)? {
            Some(_) => None,
            None => Some(format!("completion of a {}-element lattice is not isomorphic to it", l.len())),
        })
    });
    let limit = Duration::from_secs(60);
    if pass && start.elapsed() > limit {
        pass = false;
        witness = Some(format!("took {:.1}s, limit {}s", start.elapsed().as_secs_f64(), limit.as_secs()));
    }
    let detail = "meet- and join-dense, target ≅ L, |L| ≤ 12".to_string();
    report(4, "MacNeille completion", start, corpus.len(), (pass, witness), detail)
}

pub fn canonical_extensions(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 5);
    let corpus: Vec<Arc<FiniteLattice>> = (0..100).map(|_| Arc::new(random_lattice(&mut rng, 10))).collect();
    let outcome = run_cases(&corpus, |_, l| {
        let c = canonical_extension(l, bounds)?;
        let d = is_dense(&c);
        if !d.dense {
            return Ok(Some(format!("not dense at {:?}", d.witness())));
        }
        let k = is_compact(&c, bounds)?;
        if !k.compact {
            return Ok(Some(format!("not compact: {:?}", k.witness)));
        }
        if !c.embed().flags().surjective {
            return Ok(Some("embedding is not onto".into()));
        }
        let m = macneille(l, bounds)?;
        Ok(match compatible_isomorphism(&c, &m, bounds)? {
            Some(_) => None,
            None => Some("no isomorphism with the MacNeille completion over L".into()),
        })
    });
    let detail = "dense, compact, onto, ≅ MacNeille over L, |L| ≤ 10".to_string();
    report(5, "canonical extension", start, corpus.len(), outcome, detail)
}

pub fn map_extensions(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 6);
    let mut corpus = Vec::new();
    while corpus.len() < 500 {
        let l = Arc::new(random_lattice(&mut rng, 8));
        let m = match rng.gen_range(0..3) {
            0 => l.clone(),
            _ => Arc::new(random_lattice(&mut rng, 8)),
        };
        if let Ok(Some(h)) = random_hom(&mut rng, &l, &m, 64, bounds) {
            corpus.push(h);
        }
    }
    let injective = corpus.iter().filter(|h| h.flags().injective).count();
    let surjective = corpus.iter().filter(|h| h.flags().surjective).count();
    let outcome = run_cases(&corpus, |_, h| {
        let cl = canonical_extension(h.source(), bounds)?;
        let cm = canonical_extension(h.target(), bounds)?;
        let ext = extend_map_general(h, &cl, &cm)?;
        let iso = extend_map_isotone(h, &cl, &cm)?;
        if ext != iso {
            return Ok(Some("the general and isotone formulas disagree".into()));
        }
        let (f, g) = (h.flags(), ext.flags());
        if !g.complete_hom {
            return Ok(Some("extension is not a complete homomorphism".into()));
        }
        if f.injective != g.injective {
            return Ok(Some(format!("injective {} but extension injective {}", f.injective, g.injective)));
        }
        if f.surjective != g.surjective {
            return Ok(Some(format!("surjective {} but extension surjective {}", f.surjective, g.surjective)));
        }
        // The extension agrees with the map on the image of the embedding.
        let ok = h.source().elements().all(|a| ext.apply(cl.embed().apply(a)) == cm.embed().apply(h.apply(a)));
        Ok((!ok).then(|| "extension does not extend the map".into()))
    });
    let detail = format!("{injective} injective, {surjective} surjective, sizes ≤ 8");
    report(6, "map extension", start, corpus.len(), outcome, detail)
}

fn polarity_pool(rng: &mut ChaCha8Rng, n: usize, max: usize) -> Vec<Polarity> {
    (0..n).map(|_| random_polarity(rng, 1, max, max)).collect()
}

pub fn theta_embeddings(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 7);
    let pool = polarity_pool(&mut rng, 20, 5);
    let mut corpus = Vec::new();
    for _ in 0..200 {
        let k = rng.gen_range(1..=3);
        let fam = random_family(&mut rng, &pool, k);
        for u in ultrafilters(k) {
            corpus.push(UltraContext::new(fam.clone(), u).expect("nonempty family"));
        }
    }
    let outcome = run_cases(&corpus, |_, ctx| {
        let t = theta_stable(ctx, bounds)?;
        let r = verify_theta(&t)?;
        Ok((!r.pass()).then(|| r.failure.clone().unwrap_or_else(|| r.to_string())))
    });
    let detail = "200 families from a pool of 20, every U: injective, bounds, meets, joins".to_string();
    report(7, "θ embedding of stable-set ultraproducts", start, corpus.len(), outcome, detail)
}

fn expand(rng: &mut ChaCha8Rng, p: Polarity) -> ExpandedPolarity {
    let nx = p.x_len();
    let mut sub = || BitSet::from_indices(nx, (0..nx).filter(|_| rng.gen_bool(0.5)));
    let (s, s1, s2) = (sub(), sub(), sub());
    ExpandedPolarity::new(p).with_x("S", s).with_x("S1", s1).with_x("S2", s2)
}

fn random_element(rng: &mut ChaCha8Rng, u: &UltraExpansion) -> Element {
    if rng.gen_bool(0.5) {
        Element::X(u.factors.iter().map(|f| rng.gen_range(0..f.base.x_len())).collect())
    } else {
        Element::Y(u.factors.iter().map(|f| rng.gen_range(0..f.base.y_len())).collect())
    }
}

pub fn los_and_definability(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let corpus: Vec<Formula> = match read_formula_corpus(FORMULA_CORPUS) {
        Ok(c) => c.into_iter().map(|(_, f)| f).collect(),
        Err(e) => return report(8, "Łoś and definability", start, 0, (false, Some(e.to_string())), String::new()),
    };
    let mut rng = rng_for(bounds, 8);
    // (family context, per-formula tuples) with the tuples drawn up front.
    let mut cases = Vec::new();
    for round in 0..24 {
        let k = round % 4 + 1;
        let fam: Vec<ExpandedPolarity> = (0..k)
            .map(|_| {
                let p = random_polarity(&mut rng, 1, 3, 3);
                expand(&mut rng, p)
            })
            .collect();
        for u in ultrafilters(k) {
            let ctx = UltraContext::new(fam.clone(), u).expect("nonempty family");
            let ux = match UltraExpansion::new(&ctx) {
                Ok(ux) => ux,
                Err(e) => return report(8, "Łoś and definability", start, 0, (false, Some(e.to_string())), String::new()),
            };
            let tuples: Vec<Vec<Vec<(Var, Element)>>> = corpus
                .iter()
                .map(|phi| {
                    (0..3)
                        .map(|_| phi.free_vars().into_iter().map(|v| (v, random_element(&mut rng, &ux))).collect())
                        .collect()
                })
                .collect();
            cases.push((ux, tuples));
        }
    }
    let tuples_checked: usize = cases.iter().map(|(_, t)| t.iter().map(Vec::len).sum::<usize>()).sum();
    let outcome = run_cases(&cases, |_, (ux, tuples)| {
        for (phi, ts) in corpus.iter().zip(tuples) {
            for t in ts {
                let r = check_los(ux, phi, t)?;
                if !r.agree() {
                    return Ok(Some(format!("{phi}: {r}")));
                }
                if let Some((v, _)) = t.first() {
                    let d = check_definability(ux, phi, *v, &t[1..])?;
                    if !d.agree() {
                        return Ok(Some(format!("{phi} does not define θ of its factor sets")));
                    }
                }
            }
        }
        Ok(None)
    });
    let detail = format!("{} formulas, |I| ≤ 4, {tuples_checked} tuples", corpus.len());
    report(8, "Łoś and definability", start, tuples_checked, outcome, detail)
}

pub fn product_extensions(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 9);
    let mut corpus: Vec<Vec<Arc<FiniteLattice>>> = vec![vec![
        Arc::new(catalog::chain(2)),
        Arc::new(catalog::m3()),
        Arc::new(catalog::n5()),
    ]];
    for _ in 0..20 {
        let k = rng.gen_range(1..=3);
        corpus.push((0..k).map(|_| Arc::new(random_lattice(&mut rng, 6))).collect());
    }
    let timeouts = std::sync::atomic::AtomicUsize::new(0);
    let outcome = run_cases(&corpus, |_, fam| {
        let pe = product_extension(fam, bounds)?;
        let r = verify_product_extension(&pe, bounds)?;
        if matches!(r.factorwise_iso, crate::ultra::SearchOutcome::Timeout { .. }) {
            timeouts.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        Ok((!r.pass()).then(|| r.to_string().replace('\n', "; ")))
    });
    let detail = format!(
        "(2-chain, M3, N5) and 20 random families; unconstrained searches timed out: {}",
        timeouts.into_inner()
    );
    report(9, "extension of products", start, corpus.len(), outcome, detail)
}

pub fn macneille_theta(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 10);
    let pool = polarity_pool(&mut rng, 20, 5);
    let mut corpus = Vec::new();
    for p in &pool {
        for n in 1..=3 {
            for u in ultrafilters(n) {
                corpus.push((p.clone(), u));
            }
        }
    }
    let outcome = run_cases(&corpus, |_, (p, u)| {
        let (_, r) = macneille_theta_check(p, *u, bounds)?;
        Ok((!r.pass()).then(|| r.failure.clone().unwrap_or_else(|| r.to_string())))
    });
    let detail = "20 polarities, every U on |I| ≤ 3: dense image, witness sets in the image".to_string();
    report(10, "MacNeille property of θ", start, corpus.len(), outcome, detail)
}

/// The sample class for the framework suite.
pub fn framework_sample() -> Vec<Polarity> {
    vec![
        Polarity::identity(2),
        Polarity::from_fn(2, 2, |x, y| x <= y),
        Polarity::from_fn(3, 2, |x, y| x != y + 1),
        Polarity::from_fn(1, 1, |_, _| false),
        Polarity::from_fn(2, 3, |x, y| (x + y) % 2 == 0),
    ]
}

pub fn framework(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    match verify_framework_axioms(&framework_sample(), bounds) {
        Ok(r) => {
            let mut counts = BTreeMap::new();
            for l in &r.lines {
                *counts.entry(l.axiom).or_insert(0) += 1;
            }
            let detail = counts.iter().map(|(a, n)| format!("{a} {n}")).collect::<Vec<_>>().join(", ");
            let witness = r.lines.iter().find(|l| !l.pass).map(|l| l.to_string());
            report(11, "framework axioms", start, r.lines.len(), (r.pass(), witness), detail)
        }
        Err(e) => report(11, "framework axioms", start, 0, (false, Some(e.to_string())), String::new()),
    }
}

/// First failing assignment in the same order as the checker, by direct lattice operations.
fn naive_distributive(l: &FiniteLattice, modular: bool) -> Option<[usize; 3]> {
    for x in l.elements() {
        for y in l.elements() {
            for z in l.elements() {
                let (lhs, rhs) = if modular {
                    (l.meet(x, l.join(y, l.meet(x, z))), l.join(l.meet(x, y), l.meet(x, z)))
                } else {
                    (l.meet(x, l.join(y, z)), l.join(l.meet(x, y), l.meet(x, z)))
                };
                if lhs != rhs {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

pub fn equations(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let cases: Vec<(&str, FiniteLattice, &str, bool)> = vec![
        ("2-element Boolean", catalog::boolean(1), DISTRIBUTIVE, true),
        ("M3", catalog::m3(), MODULAR, true),
        ("M3", catalog::m3(), DISTRIBUTIVE, false),
        ("N5", catalog::n5(), MODULAR, false),
    ];
    let outcome = run_cases(&cases, |_, (name, l, text, expect)| {
        let eq = parse_equation(text)?;
        let a = LatticeBasedAlgebra::from(Arc::new(l.clone()));
        let got = check_equation(&a, &eq, bounds)?;
        let oracle = naive_distributive(l, *text == MODULAR);
        match (&got, oracle) {
            (EquationOutcome::Holds { .. }, None) if *expect => Ok(None),
            (EquationOutcome::Fails { witness, .. }, Some(w)) if !*expect => {
                let found: Vec<usize> = ["x", "y", "z"].iter().map(|v| witness[*v]).collect();
                Ok((found != w).then(|| format!("{name}: witness {found:?}, oracle {w:?}")))
            }
            _ => Ok(Some(format!("{name} on `{text}`: checker {}, oracle {:?}", got.holds(), oracle))),
        }
    });
    let detail = "distributivity and modularity on 2, M3, N5 against a direct oracle".to_string();
    report(12, "equation checker", start, cases.len(), outcome, detail)
}

pub fn formats(bounds: &Bounds) -> CriterionReport {
    let start = Instant::now();
    let mut rng = rng_for(bounds, 13);
    let polarities: Vec<Polarity> = (0..50).map(|_| random_polarity(&mut rng, 0, 6, 6)).collect();
    let lattices: Vec<FiniteLattice> = (0..50).map(|_| random_lattice(&mut rng, 10)).collect();
    let (pass_p, witness_p) = run_cases(&polarities, |_, p| {
        let cxt = write_cxt(p);
        let json = write_polarity(&read_cxt(&cxt)?);
        if write_cxt(&read_polarity(&json)?) != cxt {
            return Ok(Some("context → structured → context is not byte-identical".into()));
        }
        if write_polarity(&read_cxt(&write_cxt(&read_polarity(&json)?))?) != json {
            return Ok(Some("structured → context → structured is not byte-identical".into()));
        }
        Ok(None)
    });
    let (pass_l, witness_l) = run_cases(&lattices, |_, l| {
        let first = write_dot(l);
        if write_dot(l) != first {
            return Ok(Some("DOT output differs between runs".into()));
        }
        let back = read_lattice(&write_lattice(l))?;
        if write_lattice(&back) != write_lattice(l) {
            return Ok(Some("lattice file is not canonical".into()));
        }
        if write_dot(&back) != first {
            return Ok(Some("DOT output differs after a file round trip".into()));
        }
        if first.matches("->").count() != l.covers().len() {
            return Ok(Some("DOT edges are not the covers".into()));
        }
        Ok(None)
    });
    let outcome = (pass_p && pass_l, witness_p.or(witness_l));
    let detail = "context ↔ structured round trips, repeatable DOT".to_string();
    report(13, "file formats", start, polarities.len() + lattices.len(), outcome, detail)
}

/// Runs every suite in order.
pub fn run_all(bounds: &Bounds) -> Vec<CriterionReport> {
    SUITES.iter().map(|s| (s.run)(bounds)).collect()
}
