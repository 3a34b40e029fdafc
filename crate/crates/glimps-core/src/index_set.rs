//! Sorted, duplicate-free coordinate index sets.
//!
//! Indices are stored zero-based. The paper-facing text interfaces
//! (CSV files, CLI output, trace exports) are one-based; use
//! [`IndexSet::from_one_based`] / [`IndexSet::to_one_based`] at those
//! boundaries.

use alloc::vec::Vec;

use crate::{Error, Result};

/// A strictly increasing set of coordinate indices (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    /// Builds a set from zero-based members, which must be strictly increasing.
    pub fn new(members: Vec<usize>) -> Result<Self> {
        for pos in 1..members.len() {
            if members[pos] <= members[pos - 1] {
                return Err(Error::NotStrictlyIncreasing(pos));
            }
        }
        Ok(Self { members })
    }

    /// Builds a set from one-based members (the external text contract).
    pub fn from_one_based(members: &[usize]) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(members.len());
        for (pos, &m) in members.iter().enumerate() {
            if m == 0 {
                return Err(Error::IndexOutOfRange { index: 0, limit: 0 });
            }
            let z = m - 1;
            if pos > 0 && z <= zero_based[pos - 1] {
                return Err(Error::NotStrictlyIncreasing(pos));
            }
            zero_based.push(z);
        }
        Ok(Self { members: zero_based })
    }

    /// The full set `{0, .., d-1}`.
    pub fn full(d: usize) -> Self {
        Self { members: (0..d).collect() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    /// Largest member, if any.
    pub fn max(&self) -> Option<usize> {
        self.members.last().copied()
    }

    /// One-based view for text interfaces.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.members.iter().map(|&m| m + 1).collect()
    }

    /// The set without `index`; unchanged if `index` is not a member.
    pub fn without(&self, index: usize) -> Self {
        let members = self.members.iter().copied().filter(|&m| m != index).collect();
        Self { members }
    }

    /// Complement within ambient dimension `d`.
    pub fn complement(&self, d: usize) -> Self {
        let members = (0..d).filter(|i| !self.contains(*i)).collect();
        Self { members }
    }

    /// Builds a set from an unsorted list, sorting and deduplicating.
    pub fn from_unsorted(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }
}
