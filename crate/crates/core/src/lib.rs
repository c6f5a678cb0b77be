pub mod bitset;
pub mod bounds;
pub mod completion;
pub mod error;
pub mod gen;
pub mod io;
pub mod logic;
pub mod order;
pub mod polarity;
pub mod suites;
pub mod ultra;

pub use bitset::BitSet;
pub use bounds::Bounds;
pub use error::{Error, Result};
