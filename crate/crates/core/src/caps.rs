use crate::error::{Error, Result};

/// Enumeration limits shared by all operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of enumerated terms.
    pub max_terms: usize,
    /// Maximum number of points of an affine space `H^n`.
    pub max_points: usize,
    /// Maximum size of a generated subalgebra, a product algebra, or a
    /// brute-force map space.
    pub max_elements: usize,
    /// Maximum number of candidate systems in bounded equivalence search.
    pub max_systems: usize,
    /// Maximum number of points for exhaustive subset enumeration of a lattice.
    pub max_exhaustive_points: usize,
    /// Maximum order of a constructed group.
    pub max_group_order: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_terms: 100_000,
            max_points: 1_000_000,
            max_elements: 1_000_000,
            max_systems: 100_000,
            max_exhaustive_points: 16,
            max_group_order: 2_048,
        }
    }
}

impl Caps {
    pub(crate) fn check(cap: &'static str, limit: usize, required: u128) -> Result<()> {
        if required > limit as u128 {
            Err(Error::SizeLimitExceeded {
                cap,
                limit: limit as u128,
                required,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn pow_saturating(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc == u128::MAX {
            break;
        }
    }
    acc
}
