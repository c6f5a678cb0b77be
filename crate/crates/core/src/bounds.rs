/// Size bounds and search budgets shared by every construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Largest carrier a direct product may have.
    pub max_product: usize,
    /// Largest number of stable sets a polarity may produce.
    pub max_extents: usize,
    /// Complete-homomorphism checks enumerate every subset up to this source size.
    pub complete_hom_exhaustive: usize,
    /// Number of random subsets drawn when the exhaustive check is out of reach.
    pub complete_hom_samples: usize,
    /// Node budget for isomorphism, embedding and homomorphism search.
    pub iso_budget: u64,
    /// Budget of value-class pairs for the exhaustive compactness check.
    pub compact_budget: u128,
    /// Random subset pairs drawn when compactness sampling engages.
    pub compact_samples: usize,
    /// Whether compactness may fall back to sampling instead of failing.
    pub allow_sampling: bool,
    /// Term evaluations allowed for one equation check.
    pub eval_budget: u128,
    /// Seed for every sampled check.
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_product: 4096,
            max_extents: 100_000,
            complete_hom_exhaustive: 14,
            complete_hom_samples: 4096,
            iso_budget: 1_000_000,
            compact_budget: 1 << 24,
            compact_samples: 1 << 16,
            allow_sampling: true,
            eval_budget: 10_000_000,
            seed: 0x5eed,
        }
    }
}
