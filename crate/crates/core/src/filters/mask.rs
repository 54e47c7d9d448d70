use std::fmt;

/// Packed pass/fail bit per object.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SelectionMask {
    words: Vec<u64>,
    len: usize,
}

impl fmt::Debug for SelectionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelectionMask")
            .field("len", &self.len)
            .field("pass_count", &self.pass_count())
            .finish()
    }
}

impl SelectionMask {
    pub fn full(len: usize) -> Self {
        let mut m = SelectionMask {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        m.clear_tail();
        m
    }

    pub fn empty(len: usize) -> Self {
        SelectionMask {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % 64);
            }
            len += 1;
        }
        SelectionMask { words, len }
    }

    /// Builds a mask from whole words; bits beyond `len` are cleared.
    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        let mut m = SelectionMask { words, len };
        m.clear_tail();
        m
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for mask of {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for mask of {}", self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn pass_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and_assign(&mut self, other: &SelectionMask) {
        assert_eq!(self.len, other.len, "mask lengths differ");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &SelectionMask) {
        assert_eq!(self.len, other.len, "mask lengths differ");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and(&self, other: &SelectionMask) -> SelectionMask {
        let mut m = self.clone();
        m.and_assign(other);
        m
    }

    pub fn or(&self, other: &SelectionMask) -> SelectionMask {
        let mut m = self.clone();
        m.or_assign(other);
        m
    }

    pub fn not(&self) -> SelectionMask {
        SelectionMask::from_words(self.words.iter().map(|w| !w).collect(), self.len)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Indices of passing objects, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    /// Run-length encoding: alternating run lengths, the first run counting
    /// failing objects (possibly zero).
    pub fn to_rle(&self) -> Vec<u32> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut run = 0u32;
        for b in self.iter() {
            if b == current {
                run += 1;
            } else {
                runs.push(run);
                current = b;
                run = 1;
            }
        }
        if run > 0 || runs.is_empty() {
            runs.push(run);
        }
        runs
    }

    pub fn from_rle(runs: &[u32]) -> SelectionMask {
        SelectionMask::from_bools(
            runs.iter()
                .enumerate()
                .flat_map(|(k, &r)| std::iter::repeat_n(k % 2 == 1, r as usize)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_empty() {
        for n in [0, 1, 63, 64, 65, 130] {
            assert_eq!(SelectionMask::full(n).pass_count(), n);
            assert_eq!(SelectionMask::empty(n).pass_count(), 0);
            assert_eq!(SelectionMask::full(n).not(), SelectionMask::empty(n));
        }
    }

    #[test]
    fn rle_examples() {
        let m = SelectionMask::from_bools([true, true, false, true]);
        assert_eq!(m.to_rle(), vec![0, 2, 1, 1]);
        let m = SelectionMask::from_bools([false, false, true]);
        assert_eq!(m.to_rle(), vec![2, 1]);
        assert_eq!(SelectionMask::full(0).to_rle(), vec![0]);
        assert_eq!(SelectionMask::full(5).to_rle(), vec![0, 5]);
        assert_eq!(SelectionMask::empty(5).to_rle(), vec![5]);
    }

    proptest! {
        #[test]
        fn rle_round_trip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
            let m = SelectionMask::from_bools(bits.iter().copied());
            let runs = m.to_rle();
            prop_assert_eq!(runs.iter().map(|&r| r as usize).sum::<usize>(), bits.len());
            prop_assert_eq!(SelectionMask::from_rle(&runs), m.clone());
            prop_assert_eq!(m.ones().collect::<Vec<_>>(),
                bits.iter().enumerate().filter(|b| *b.1).map(|b| b.0).collect::<Vec<_>>());
            prop_assert_eq!(m.pass_count(), bits.iter().filter(|&&b| b).count());
        }
    }
}
