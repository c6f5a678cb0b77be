use std::sync::Arc;

use super::{FiniteLattice, LatticeMap};
use crate::bitset::BitSet;
use crate::bounds::Bounds;
use crate::error::{Error, Result};

/// A direct product with its coordinate encoding and projections.
///
/// Tuples are encoded in mixed radix with the first coordinate most
/// significant, the same convention used for operation tables.
#[derive(Debug, Clone)]
pub struct Product {
    pub lattice: Arc<FiniteLattice>,
    pub factors: Vec<Arc<FiniteLattice>>,
    pub projections: Vec<LatticeMap>,
}

/// Mixed-radix encoding of tuples, first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radix {
    sizes: Vec<usize>,
}

impl Radix {
    pub fn new(sizes: Vec<usize>) -> Self {
        Radix { sizes }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of tuples, or `None` on overflow.
    pub fn total(&self) -> Option<usize> {
        self.sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s))
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.sizes.len());
        coords
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&c, &s)| acc * s + c)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &s) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = index % s;
            index /= s;
        }
        out
    }
}

impl Product {
    pub fn radix(&self) -> Radix {
        Radix::new(self.factors.iter().map(|f| f.len()).collect())
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        self.radix().encode(coords)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        self.radix().decode(index)
    }
}

/// Componentwise product `L_1 × ... × L_k`; elements are named `(a,b,...)`.
pub fn direct_product(factors: &[Arc<FiniteLattice>], bounds: &Bounds) -> Result<Product> {
    if factors.is_empty() {
        return Err(Error::InvalidContext("a product needs at least one factor".into()));
    }
    let radix = Radix::new(factors.iter().map(|f| f.len()).collect());
    let n = match radix.total() {
        Some(n) if n <= bounds.max_product => n,
        other => {
            return Err(Error::SizeExceeded {
                what: "direct product",
                size: other.unwrap_or(usize::MAX),
                bound: bounds.max_product,
            })
        }
    };
    let tuples: Vec<Vec<usize>> = (0..n).map(|i| radix.decode(i)).collect();
    let names = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().zip(factors).map(|(&c, f)| f.name(c)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let up = tuples
        .iter()
        .map(|a| {
            BitSet::from_indices(
                n,
                (0..n).filter(|&b| {
                    a.iter()
                        .zip(&tuples[b])
                        .zip(factors)
                        .all(|((&x, &y), f)| f.leq(x, y))
                }),
            )
        })
        .collect();
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    let mut scratch = vec![0; factors.len()];
    for a in 0..n {
        for b in 0..n {
            for (k, f) in factors.iter().enumerate() {
                scratch[k] = f.meet(tuples[a][k], tuples[b][k]);
            }
            meet[a * n + b] = radix.encode(&scratch);
            for (k, f) in factors.iter().enumerate() {
                scratch[k] = f.join(tuples[a][k], tuples[b][k]);
            }
            join[a * n + b] = radix.encode(&scratch);
        }
    }
    let lattice = Arc::new(FiniteLattice::from_parts(names, up, meet, join)?);
    let projections = factors
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let table = tuples.iter().map(|t| t[k]).collect();
            LatticeMap::new(lattice.clone(), f.clone(), table)
        })
        .collect::<Result<_>>()?;
    Ok(Product {
        lattice,
        factors: factors.to_vec(),
        projections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::catalog::*;
    use crate::order::validate_lattice;

    #[test]
    fn single_factor_copy() {
        let m = Arc::new(m3());
        let p = direct_product(std::slice::from_ref(&m), &Bounds::default()).unwrap();
        assert_eq!(p.lattice.len(), 5);
        assert!(p.projections[0].flags().is_isomorphism());
        assert_eq!(p.projections[0].table(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn two_by_three_grid() {
        let p = direct_product(&[Arc::new(chain(2)), Arc::new(chain(3))], &Bounds::default()).unwrap();
        let l = &p.lattice;
        assert_eq!(l.len(), 6);
        // Re-validating the componentwise order derives the same tables.
        let v = validate_lattice(&l.leq_matrix(), l.names().to_vec()).unwrap();
        assert_eq!(&v, &**l);
        for pr in &p.projections {
            let f = pr.flags();
            assert!(f.hom && f.surjective);
        }
        assert_eq!(l.name(p.encode(&[1, 2])), "(1,2)");
        assert_eq!(p.decode(5), vec![1, 2]);
    }

    #[test]
    fn size_bound() {
        let b = Bounds {
            max_product: 10,
            ..Bounds::default()
        };
        let m = Arc::new(m3());
        assert!(matches!(
            direct_product(&[m.clone(), m], &b),
            Err(Error::SizeExceeded { size: 25, .. })
        ));
    }
}
