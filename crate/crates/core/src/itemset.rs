//! Fixed-capacity bit set over item indices.

const BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ItemSet {
    words: Vec<u64>,
    len: usize,
}

impl ItemSet {
    /// An empty set able to hold indices in `[0, len)`.
    pub fn new(len: usize) -> Self {
        ItemSet {
            words: vec![0; len.div_ceil(BITS)],
            len,
        }
    }

    /// The set `{0, 1, ..., len - 1}`.
    pub fn full(len: usize) -> Self {
        let mut set = ItemSet {
            words: vec![u64::MAX; len.div_ceil(BITS)],
            len,
        };
        set.trim();
        set
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = ItemSet::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    fn trim(&mut self) {
        let rem = self.len % BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Upper bound (exclusive) on storable indices.
    #[inline]
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / BITS] >> (i % BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "index {i} outside universe {}", self.len);
        self.words[i / BITS] |= 1 << (i % BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / BITS] &= !(1 << (i % BITS));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self &= !other`
    #[inline]
    pub fn difference_with(&mut self, other: &ItemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// `self &= other`
    #[inline]
    pub fn intersect_with(&mut self, other: &ItemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_disjoint(&self, other: &ItemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Ascending iterator over members.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * BITS + bit)
                }
            })
        })
    }
}
