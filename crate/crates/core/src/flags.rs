/// Fixed-length bit set backed by `u64` words. Never resized after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FlagSet {
    words: Vec<u64>,
    len: usize,
}

impl FlagSet {
    pub(crate) fn new(len: usize) -> Self {
        Self {
            words: vec![0; Self::words_for(len)],
            len,
        }
    }

    pub(crate) fn words_for(len: usize) -> usize {
        len.div_ceil(64)
    }

    /// Bytes occupied by a flag set of `len` bits.
    pub(crate) fn bytes_for(len: usize) -> usize {
        Self::words_for(len) * std::mem::size_of::<u64>()
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, on: bool) {
        let mask = 1u64 << (i % 64);
        if on {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub(crate) fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub(crate) fn allocated_bytes(&self) -> usize {
        self.words.capacity() * std::mem::size_of::<u64>()
    }

    pub(crate) fn buffer_identity(&self) -> (usize, usize) {
        (self.words.as_ptr() as usize, self.words.capacity())
    }
}
