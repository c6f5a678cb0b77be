use std::sync::Arc;

use super::FiniteLattice;
use crate::error::{Error, Result};
use crate::order::product::Radix;

/// A finitary operation on a lattice carrier, stored as a full table.
///
/// The entry for arguments `(a_1, ..., a_k)` sits at the mixed-radix index
/// with `a_1` most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    pub fn apply(&self, n: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[Radix::new(vec![n; self.arity]).encode(args)]
    }

    /// The operation given by a function of its argument tuple.
    pub fn from_fn(name: &str, arity: usize, n: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let radix = Radix::new(vec![n; arity]);
        let total = n.pow(arity as u32);
        let table = (0..total).map(|i| f(&radix.decode(i))).collect();
        Operation {
            name: name.to_string(),
            arity,
            table,
        }
    }
}

/// A bounded lattice with extra named operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasedAlgebra {
    pub lattice: Arc<FiniteLattice>,
    pub ops: Vec<Operation>,
}

impl LatticeBasedAlgebra {
    pub fn new(lattice: Arc<FiniteLattice>, ops: Vec<Operation>) -> Result<Self> {
        let n = lattice.len();
        for (k, op) in ops.iter().enumerate() {
            let expected = n.checked_pow(op.arity as u32).ok_or_else(|| Error::InvalidOperation {
                name: op.name.clone(),
                reason: "table size overflows".into(),
            })?;
            if op.table.len() != expected {
                return Err(Error::InvalidOperation {
                    name: op.name.clone(),
                    reason: format!("table has {} entries, expected {expected}", op.table.len()),
                });
            }
            if op.table.iter().any(|&v| v >= n) {
                return Err(Error::InvalidOperation {
                    name: op.name.clone(),
                    reason: "entry outside the carrier".into(),
                });
            }
            if ops[..k].iter().any(|o| o.name == op.name) {
                return Err(Error::NameClash(op.name.clone()));
            }
        }
        Ok(LatticeBasedAlgebra { lattice, ops })
    }

    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }
}

impl From<Arc<FiniteLattice>> for LatticeBasedAlgebra {
    fn from(lattice: Arc<FiniteLattice>) -> Self {
        LatticeBasedAlgebra {
            lattice,
            ops: Vec::new(),
        }
    }
}

impl From<FiniteLattice> for LatticeBasedAlgebra {
    fn from(lattice: FiniteLattice) -> Self {
        Arc::new(lattice).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::catalog::*;

    #[test]
    fn tables_must_be_total() {
        let l = Arc::new(chain(2));
        let bad = Operation {
            name: "f".into(),
            arity: 2,
            table: vec![0, 1, 1],
        };
        assert!(LatticeBasedAlgebra::new(l.clone(), vec![bad]).is_err());
        let ok = Operation::from_fn("f", 2, 2, |a| a[0].max(a[1]));
        let alg = LatticeBasedAlgebra::new(l, vec![ok]).unwrap();
        assert_eq!(alg.op("f").unwrap().apply(2, &[0, 1]), 1);
        assert_eq!(alg.op("f").unwrap().table, vec![0, 1, 1, 1]);
    }
}
