//! Finite posets and bounded lattices, maps between them, products,
//! filters/ideals and isomorphism search.

mod algebra;
mod filters;
mod lattice;
mod map;
mod product;
mod search;

pub use algebra::{LatticeBasedAlgebra, Operation};
pub use filters::{filters, ideals};
pub use lattice::{catalog, validate_lattice, FiniteLattice};
pub use map::{analyze_map, LatticeMap, MapFlags, SubsetCoverage};
pub use product::{direct_product, Product, Radix};
pub use search::{find_embedding, find_isomorphism, find_isomorphism_fixing, find_surjection, homomorphisms};
