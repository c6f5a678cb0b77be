use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ultrafilters, ultraproduct_lattices, UltraContext, UltraLattice};
use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::completion::{canonical_extension, compatible_isomorphism, is_compact, is_dense, Completion, CompactnessReport};
use crate::error::{Error, Result};
use crate::order::{direct_product, find_isomorphism, FiniteLattice, LatticeMap, Product};

/// `θ : ∏_I L_i → ∏_{U ∈ βI} (∏_U L_i)`, `θ(f)(U) = f^U`.
#[derive(Debug, Clone)]
pub struct BooleanProduct {
    pub source: Product,
    /// One ultraproduct per ultrafilter, in the order of [`ultrafilters`].
    pub stalks: Vec<UltraLattice>,
    pub target: Product,
    pub map: LatticeMap,
}

pub fn boolean_product_map(family: &[Arc<FiniteLattice>], bounds: &Bounds) -> Result<BooleanProduct> {
    let source = direct_product(family, bounds)?;
    let stalks = ultrafilters(family.len())
        .into_iter()
        .map(|u| ultraproduct_lattices(&UltraContext::new(family.to_vec(), u)?))
        .collect::<Result<Vec<_>>>()?;
    let target = direct_product(&stalks.iter().map(|s| s.lattice.clone()).collect::<Vec<_>>(), bounds)?;
    let table = source
        .lattice
        .elements()
        .map(|t| {
            let f = source.decode(t);
            let coords: Vec<usize> = stalks.iter().map(|s| s.quotient.class_of(&f)).collect();
            target.encode(&coords)
        })
        .collect();
    let map = LatticeMap::new(source.lattice.clone(), target.lattice.clone(), table)?;
    Ok(BooleanProduct {
        source,
        stalks,
        target,
        map,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatchCoverage {
    Exhaustive { checks: u128 },
    Sampled { seed: u64, samples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanProductReport {
    pub injective: bool,
    pub hom: bool,
    /// Equalisers `{U : θf(U) = θg(U)}` are clopen in `βI`.
    pub equalisers_clopen: bool,
    /// `θf↾N ∪ θg↾(βI − N)` lies in the image for clopen `N`.
    pub patching: bool,
    pub coverage: PatchCoverage,
    pub witness: Option<String>,
}

impl BooleanProductReport {
    /// Both topological clauses hold automatically: `βI` is finite and discrete.
    pub const NOTE: &'static str = "βI is finite and discrete: every subset is clopen";

    pub fn pass(&self) -> bool {
        self.injective && self.hom && self.equalisers_clopen && self.patching
    }
}

impl fmt::Display for BooleanProductReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "injective: {}", yn(self.injective))?;
        writeln!(f, "homomorphism: {}", yn(self.hom))?;
        writeln!(f, "equalisers clopen: {} ({})", yn(self.equalisers_clopen), Self::NOTE)?;
        write!(f, "patching: {}", yn(self.patching))?;
        match &self.coverage {
            PatchCoverage::Exhaustive { checks } => write!(f, " (exhaustive, {checks} checks)")?,
            PatchCoverage::Sampled { seed, samples } => write!(f, " (sampled, seed {seed:#x}, {samples} samples)")?,
        }
        if let Some(w) = &self.witness {
            write!(f, "\nwitness: {w}")?;
        }
        Ok(())
    }
}

/// Checks the Boolean-product clauses literally over `βI` with the discrete topology.
pub fn verify_boolean_product(bp: &BooleanProduct, bounds: &Bounds) -> Result<BooleanProductReport> {
    let flags = bp.map.flags();
    let k = bp.stalks.len();
    if k > 16 {
        return Err(Error::SizeExceeded {
            what: "index set for patching",
            size: k,
            bound: 16,
        });
    }
    let image: Vec<usize> = bp.map.image().iter().collect();
    let image_set = bp.map.image();
    let tuples: Vec<Vec<usize>> = image.iter().map(|&t| bp.target.decode(t)).collect();
    let subsets = 1u64 << k;
    // Every subset of a finite discrete space is clopen, so an equaliser is clopen by construction.
    let equalisers_clopen = true;

    let patch = |a: usize, b: usize, n: u64| -> usize {
        let coords: Vec<usize> = (0..k)
            .map(|u| if n >> u & 1 == 1 { tuples[a][u] } else { tuples[b][u] })
            .collect();
        bp.target.encode(&coords)
    };
    let mut witness = None;
    let mut check = |a: usize, b: usize, n: u64| {
        if witness.is_none() && !image_set.contains(patch(a, b, n)) {
            witness = Some(format!(
                "patching {} and {} on {:?}",
                bp.target.lattice.name(image[a]),
                bp.target.lattice.name(image[b]),
                BitSet::from_mask(k, n)
            ));
        }
    };
    let checks = (image.len() as u128).pow(2) * subsets as u128;
    let coverage = if checks <= bounds.eval_budget {
        for a in 0..image.len() {
            for b in 0..image.len() {
                for n in 0..subsets {
                    check(a, b, n);
                }
            }
        }
        PatchCoverage::Exhaustive { checks }
    } else if bounds.allow_sampling {
        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
        let samples = bounds.compact_samples;
        for _ in 0..samples {
            let (a, b) = (rng.gen_range(0..image.len()), rng.gen_range(0..image.len()));
            check(a, b, rng.gen_range(0..subsets));
        }
        PatchCoverage::Sampled {
            seed: bounds.seed,
            samples,
        }
    } else {
        return Err(Error::BudgetExceeded {
            what: "patching checks",
            needed: checks,
            budget: bounds.eval_budget,
        });
    };
    Ok(BooleanProductReport {
        injective: flags.injective,
        hom: flags.hom,
        equalisers_clopen,
        patching: witness.is_none(),
        coverage,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found,
    Absent,
    Timeout { budget: u64 },
}

impl SearchOutcome {
    fn of(r: Result<Option<LatticeMap>>) -> Result<(SearchOutcome, Option<LatticeMap>)> {
        match r {
            Ok(Some(m)) => Ok((SearchOutcome::Found, Some(m))),
            Ok(None) => Ok((SearchOutcome::Absent, None)),
            Err(Error::Timeout { budget }) => Ok((SearchOutcome::Timeout { budget }, None)),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchOutcome::Found => f.write_str("found"),
            SearchOutcome::Absent => f.write_str("absent"),
            SearchOutcome::Timeout { budget } => write!(f, "timed out after {budget} nodes"),
        }
    }
}

/// The product-of-extensions comparison at a finite index set.
#[derive(Debug, Clone)]
pub struct ProductExtension {
    pub boolean: BooleanProduct,
    /// `(∏_I L_i)^σ`.
    pub extension: Completion,
    /// `∏_I L_i ↣ ∏_U (∏_U L_i)^σ`, the Boolean-product map followed by the per-stalk extensions.
    pub theta: Completion,
    /// `∏_I L_i ↣ ∏_I L_i^σ`.
    pub factorwise: Completion,
}

#[derive(Debug, Clone)]
pub struct ProductExtensionReport {
    pub boolean: BooleanProductReport,
    pub theta_dense: bool,
    pub theta_compact: CompactnessReport,
    /// Unconstrained search for `(∏_I L_i)^σ ≅ ∏_I L_i^σ`.
    pub factorwise_iso: SearchOutcome,
    /// Search for the same isomorphism commuting with the embeddings.
    pub factorwise_compatible: SearchOutcome,
    /// `(∏_I L_i)^σ ≅ ∏_U (∏_U L_i)^σ` commuting with the embeddings.
    pub theta_compatible: SearchOutcome,
}

impl ProductExtensionReport {
    pub fn pass(&self) -> bool {
        self.boolean.pass()
            && self.theta_dense
            && self.theta_compact.compact
            && self.factorwise_iso != SearchOutcome::Absent
            && self.factorwise_compatible == SearchOutcome::Found
            && self.theta_compatible == SearchOutcome::Found
    }
}

impl fmt::Display for ProductExtensionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "{}", self.boolean)?;
        writeln!(f, "θ dense: {}", yn(self.theta_dense))?;
        writeln!(f, "θ compact: {}", yn(self.theta_compact.compact))?;
        writeln!(f, "extension of product ≅ product of extensions: {}", self.factorwise_iso)?;
        writeln!(f, "  commuting with embeddings: {}", self.factorwise_compatible)?;
        write!(f, "extension of product ≅ product of stalk extensions: {}", self.theta_compatible)
    }
}

pub fn product_extension(family: &[Arc<FiniteLattice>], bounds: &Bounds) -> Result<ProductExtension> {
    let boolean = boolean_product_map(family, bounds)?;
    let extension = canonical_extension(&boolean.source.lattice, bounds)?;
    let stalk_ext = boolean
        .stalks
        .iter()
        .map(|s| canonical_extension(&s.lattice, bounds))
        .collect::<Result<Vec<_>>>()?;
    let stalks = Completion::product(&stalk_ext, bounds)?;
    // The product completion's source is a fresh copy of the Boolean-product target.
    let onto = LatticeMap::new(
        boolean.source.lattice.clone(),
        stalks.source().clone(),
        boolean.map.table().to_vec(),
    )?;
    let theta = Completion::new(onto.then(stalks.embed())?)?;
    let factor_ext = family
        .iter()
        .map(|l| canonical_extension(l, bounds))
        .collect::<Result<Vec<_>>>()?;
    let fw = Completion::product(&factor_ext, bounds)?;
    let relabel = LatticeMap::new(boolean.source.lattice.clone(), fw.source().clone(), (0..boolean.source.lattice.len()).collect())?;
    let factorwise = Completion::new(relabel.then(fw.embed())?)?;
    Ok(ProductExtension {
        boolean,
        extension,
        theta,
        factorwise,
    })
}

pub fn verify_product_extension(pe: &ProductExtension, bounds: &Bounds) -> Result<ProductExtensionReport> {
    let boolean = verify_boolean_product(&pe.boolean, bounds)?;
    let theta_dense = is_dense(&pe.theta).dense;
    let theta_compact = is_compact(&pe.theta, bounds)?;
    let (factorwise_iso, _) = SearchOutcome::of(find_isomorphism(pe.extension.target(), pe.factorwise.target(), bounds))?;
    let (factorwise_compatible, _) = SearchOutcome::of(compatible_isomorphism(&pe.extension, &pe.factorwise, bounds))?;
    let (theta_compatible, _) = SearchOutcome::of(compatible_isomorphism(&pe.extension, &pe.theta, bounds))?;
    Ok(ProductExtensionReport {
        boolean,
        theta_dense,
        theta_compact,
        factorwise_iso,
        factorwise_compatible,
        theta_compatible,
    })
}
