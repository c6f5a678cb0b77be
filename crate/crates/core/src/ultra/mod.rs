//! Ultrafilters on finite index sets and ultraproducts of finite structures.
//!
//! A finite index set carries only principal ultrafilters, so every
//! ultraproduct here is isomorphic to one of its factors. Constructions still
//! go through `⟦·⟧ ∈ U` rather than reading the principal coordinate.

mod boolean;
mod framework;
mod quotient;
mod theta;
mod ultrafilter;

pub use boolean::{
    boolean_product_map, product_extension, verify_boolean_product, verify_product_extension, BooleanProduct,
    BooleanProductReport, PatchCoverage, ProductExtension, ProductExtensionReport, SearchOutcome,
};
pub use framework::{verify_framework_axioms, AxiomLine, FrameworkReport};
pub use quotient::{
    quotient_hom, ultraproduct_algebras, ultraproduct_lattices, ultraproduct_polarities, PolarityIso, QuotientMap,
    UltraAlgebra, UltraContext, UltraLattice, UltraPolarity,
};
pub use theta::{macneille_theta_check, theta_stable, verify_theta, MacNeilleThetaReport, ThetaReport, ThetaStable};
pub use ultrafilter::{check_ultrafilter, ultrafilters, ultrafilters_by_brute_force, Ultrafilter};
