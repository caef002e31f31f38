use alloc::vec::Vec;

/// Sample indices at which sequences are evaluated numerically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexLadder {
    indices: Vec<u64>,
}

impl IndexLadder {
    pub const DEFAULT_MAX_EXP: u32 = 20;

    /// `2^lo, 2^(lo+1), …, 2^hi`.
    pub fn geometric(lo: u32, hi: u32) -> Self {
        let hi = hi.min(62);
        IndexLadder { indices: (lo..=hi).map(|j| 1u64 << j).collect() }
    }

    pub fn with_max_exp(hi: u32) -> Self {
        Self::geometric(1, hi)
    }

    pub fn from_indices(mut indices: Vec<u64>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexLadder { indices }
    }

    /// Drops indices below `start`.
    pub fn clamp_start(&self, start: u64) -> Self {
        IndexLadder { indices: self.indices.iter().copied().filter(|&n| n >= start).collect() }
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn last(&self) -> Option<u64> {
        self.indices.last().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u64> + ExactSizeIterator + '_ {
        self.indices.iter().copied()
    }
}

impl Default for IndexLadder {
    fn default() -> Self {
        Self::geometric(1, Self::DEFAULT_MAX_EXP)
    }
}
