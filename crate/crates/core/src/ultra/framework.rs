use std::fmt;
use std::sync::Arc;

use super::{
    product_extension, theta_stable, ultrafilters, ultraproduct_polarities, verify_product_extension, verify_theta,
    UltraContext,
};
use crate::bounds::Bounds;
use crate::completion::{canonical_extension, eta_embedding, extend_map_general};
use crate::error::{Error, Result};
use crate::order::{find_embedding, homomorphisms, LatticeMap};
use crate::polarity::{stable_set_lattice, Polarity, StableSetLattice};

/// Homomorphisms tried per ordered pair for the first axiom.
const HOM_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomLine {
    pub axiom: &'static str,
    pub instance: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for AxiomLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "pass" } else { "FAIL" };
        write!(f, "{} {}: {verdict} ({})", self.axiom, self.instance, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrameworkReport {
    pub lines: Vec<AxiomLine>,
}

impl FrameworkReport {
    pub fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn lines_for(&self, axiom: &str) -> impl Iterator<Item = &AxiomLine> {
        let axiom = axiom.to_string();
        self.lines.iter().filter(move |l| l.axiom == axiom)
    }
}

impl fmt::Display for FrameworkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn line(axiom: &'static str, instance: String, outcome: Result<(bool, String)>) -> AxiomLine {
    let (pass, detail) = match outcome {
        Ok(r) => r,
        Err(Error::Timeout { budget }) => (false, format!("search timed out after {budget} nodes")),
        Err(e) => (false, e.to_string()),
    };
    AxiomLine {
        axiom,
        instance,
        pass,
        detail,
    }
}

/// Index families of length one and two over `n` members.
fn families(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for i in 0..n {
        for j in 0..n {
            out.push(vec![i, j]);
        }
    }
    out
}

fn family_name(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| format!("P{i}")).collect();
    format!("({})", parts.join(", "))
}

/// Verifies the four framework axioms on a sample of polarities, taking
/// `⁺` as the stable-set lattice and `σ` as the canonical extension.
pub fn verify_framework_axioms(sample: &[Polarity], bounds: &Bounds) -> Result<FrameworkReport> {
    if sample.is_empty() {
        return Err(Error::InvalidContext("the sample is empty".into()));
    }
    let plus: Vec<StableSetLattice> = sample
        .iter()
        .map(|p| stable_set_lattice(p, bounds))
        .collect::<Result<_>>()?;
    let mut report = FrameworkReport::default();

    for idx in families(sample.len()) {
        let fam: Vec<Polarity> = idx.iter().map(|&i| sample[i].clone()).collect();
        for u in ultrafilters(fam.len()) {
            let instance = format!("{} at U{}", family_name(&idx), u.principal_index());
            let outcome = (|| {
                let up = ultraproduct_polarities(&UltraContext::new(fam.clone(), u)?)?;
                let member = idx[u.principal_index()];
                Ok(match up.projection {
                    Some(iso) if iso.verify(&up.polarity, &sample[member]) => (true, format!("isomorphic to P{member}")),
                    _ => (false, "no isomorphism onto a sample member".into()),
                })
            })();
            report.lines.push(line("closure", instance, outcome));
        }
    }

    for (i, a) in plus.iter().enumerate() {
        for (j, b) in plus.iter().enumerate() {
            let outcome = check_a1(&a.lattice, &b.lattice, bounds);
            report.lines.push(line("A1", format!("P{i}+ -> P{j}+"), outcome));
        }
    }

    for idx in families(sample.len()) {
        let fam: Vec<Polarity> = idx.iter().map(|&i| sample[i].clone()).collect();
        for u in ultrafilters(fam.len()) {
            let outcome = (|| {
                let t = theta_stable(&UltraContext::new(fam.clone(), u)?, bounds)?;
                let r = verify_theta(&t)?;
                let detail = match &r.failure {
                    Some(w) => w.clone(),
                    None => format!("θ injective homomorphism on {} elements", t.source.lattice.len()),
                };
                Ok((r.pass(), detail))
            })();
            let instance = format!("{} at U{}", family_name(&idx), u.principal_index());
            report.lines.push(line("A2", instance, outcome));
        }
    }

    for (i, p) in sample.iter().enumerate() {
        for n in 1..=2 {
            let u = ultrafilters(n)[0];
            let outcome = check_a3(p, &plus[i], u, bounds);
            report.lines.push(line("A3", format!("P{i} with |I| = {n}"), outcome));
        }
    }

    for idx in families(sample.len()) {
        let fam: Vec<Arc<_>> = idx.iter().map(|&i| plus[i].lattice.clone()).collect();
        let outcome = (|| {
            let pe = product_extension(&fam, bounds)?;
            let r = verify_product_extension(&pe, bounds)?;
            let detail = format!(
                "θ into {} elements, dense {}, compact {}, compatible iso {}",
                pe.theta.target().len(),
                r.theta_dense,
                r.theta_compact.compact,
                r.theta_compatible
            );
            Ok((r.pass(), detail))
        })();
        let names: Vec<String> = idx.iter().map(|i| format!("P{i}+")).collect();
        report.lines.push(line("A4", format!("({})", names.join(", ")), outcome));
    }
    Ok(report)
}

/// Extends homomorphisms `A → B` and checks that `↣` and `↠` survive.
fn check_a1(a: &Arc<crate::order::FiniteLattice>, b: &Arc<crate::order::FiniteLattice>, bounds: &Bounds) -> Result<(bool, String)> {
    let ca = canonical_extension(a, bounds)?;
    let cb = canonical_extension(b, bounds)?;
    let homs = homomorphisms(a, b, HOM_LIMIT, bounds)?;
    let (mut emb, mut sur) = (0, 0);
    for h in &homs {
        let flags = h.flags();
        let ext = extend_map_general(h, &ca, &cb)?.flags();
        if !ext.complete_hom {
            return Ok((false, "an extension is not a complete homomorphism".into()));
        }
        if flags.injective {
            emb += 1;
            if !ext.injective {
                return Ok((false, "an embedding extends to a non-injective map".into()));
            }
        }
        if flags.surjective {
            sur += 1;
            if !ext.surjective {
                return Ok((false, "a surjection extends to a non-surjective map".into()));
            }
        }
    }
    Ok((
        true,
        format!("{} homomorphisms, {emb} embeddings, {sur} surjections extended", homs.len()),
    ))
}

/// `ε = θ ∘ diagonal : P⁺ ↣ (P^U)⁺` extended to `η : (P⁺)^σ ↣ (P^U)⁺`.
fn check_a3(p: &Polarity, plus: &StableSetLattice, u: super::Ultrafilter, bounds: &Bounds) -> Result<(bool, String)> {
    let t = theta_stable(&UltraContext::new(vec![p.clone(); u.size()], u)?, bounds)?;
    let diagonal: Vec<usize> = plus
        .lattice
        .elements()
        .map(|a| t.target.index_of(&t.theta_set(&vec![a; u.size()])).expect("θ lands in stable sets"))
        .collect();
    let epsilon = LatticeMap::new(plus.lattice.clone(), t.target.lattice.clone(), diagonal)?;
    let ce = canonical_extension(&plus.lattice, bounds)?;
    let eta = eta_embedding(&epsilon, &ce)?;
    let flags = eta.flags();
    let found = find_embedding(ce.target(), &t.target.lattice, &[], bounds)?.is_some();
    let pass = flags.is_embedding() && found;
    Ok((
        pass,
        format!(
            "η injective {}, homomorphism {}, embedding search {}",
            flags.injective,
            flags.hom,
            if found { "found" } else { "absent" }
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_polarity_passes_everything() {
        let r = verify_framework_axioms(&[Polarity::identity(2)], &Bounds::default()).unwrap();
        assert!(r.pass(), "{r}");
        for axiom in ["closure", "A1", "A2", "A3", "A4"] {
            assert!(r.lines_for(axiom).count() > 0, "{axiom}");
        }
    }

    #[test]
    fn two_member_sample() {
        let p = Polarity::identity(2);
        let q = Polarity::from_fn(2, 3, |x, y| x <= y);
        let r = verify_framework_axioms(&[p, q], &Bounds::default()).unwrap();
        assert!(r.pass(), "{r}");
        // Four two-member families, two ultrafilters each, plus two singletons.
        assert_eq!(r.lines_for("A2").count(), 2 + 4 * 2);
        assert!(r.to_string().lines().all(|l| l.contains(": pass (")));
    }

    #[test]
    fn degenerate_third_axiom() {
        let r = verify_framework_axioms(&[Polarity::from_fn(3, 2, |x, y| x != y)], &Bounds::default()).unwrap();
        let a3: Vec<_> = r.lines_for("A3").collect();
        assert_eq!(a3.len(), 2);
        assert!(a3.iter().all(|l| l.pass && l.detail.contains("found")));
    }

    #[test]
    fn timeouts_are_reported_per_instance() {
        let bounds = Bounds {
            iso_budget: 1,
            ..Bounds::default()
        };
        let r = verify_framework_axioms(&[Polarity::identity(3)], &bounds).unwrap();
        assert!(!r.pass());
        assert!(r.lines.iter().any(|l| !l.pass && l.detail.contains("timed out")));
    }
}
