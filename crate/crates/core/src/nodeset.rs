//! Fixed-capacity bitset over node indices.
//!
//! The simulator spends nearly all of its time intersecting adjacency masks
//! with the infected set, so the representation is a plain `Vec<u64>` with
//! word-level popcounts.

/// Set of node indices in `0..capacity`, stored one bit per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    words: Vec<u64>,
    capacity: usize,
}

impl NodeSet {
    pub fn new(capacity: usize) -> Self {
        NodeSet { words: vec![0; capacity.div_ceil(64)], capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        debug_assert!(index < self.capacity);
        self.words[index / 64] >> (index % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, index: usize) {
        debug_assert!(index < self.capacity);
        self.words[index / 64] |= 1 << (index % 64);
    }

    #[inline]
    pub fn remove(&mut self, index: usize) {
        debug_assert!(index < self.capacity);
        self.words[index / 64] &= !(1 << (index % 64));
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of elements shared with `other`. Both sets must have the same
    /// capacity.
    #[inline]
    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Removes every element of `other` from this set.
    pub fn subtract(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Number of elements in `self` but not in `other`.
    #[inline]
    pub fn difference_len(&self, other: &NodeSet) -> usize {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & !b).count_ones() as usize).sum()
    }

    /// Elements in `self` but not in `other`, ascending.
    pub fn difference_iter<'a>(&'a self, other: &'a NodeSet) -> impl Iterator<Item = usize> + 'a {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).enumerate().flat_map(|(wi, (a, b))| {
            let mut bits = a & !b;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let bit = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }

    /// Overwrites this set with the contents of `other` (same capacity).
    #[inline]
    pub fn copy_from(&mut self, other: &NodeSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.copy_from_slice(&other.words);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn from_indices(capacity: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = NodeSet::new(capacity);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// True when no element is shared with `other`.
    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        !self.intersects(other)
    }
}
