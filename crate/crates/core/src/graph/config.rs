use std::fmt;

/// A point of `{0,1}^N` packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Config {
    len: usize,
    words: Vec<u64>,
}

impl Config {
    pub fn zeros(len: usize) -> Self {
        Config {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut c = Config {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        c.trim();
        c
    }

    /// Configuration whose coordinate `s` is bit `s` of `mask`. Needs `len <= 64`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "from_mask supports at most 64 coordinates");
        let mut c = Self::zeros(len);
        if len > 0 {
            c.words[0] = mask;
            c.trim();
        }
        c
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (s, &b) in bits.iter().enumerate() {
            c.set(s, b);
        }
        c
    }

    /// Inverse of [`Config::from_mask`].
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64, "to_mask supports at most 64 coordinates");
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
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

    #[inline]
    pub fn get(&self, s: usize) -> bool {
        debug_assert!(s < self.len);
        (self.words[s >> 6] >> (s & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, s: usize, value: bool) {
        debug_assert!(s < self.len);
        let bit = 1u64 << (s & 63);
        if value {
            self.words[s >> 6] |= bit;
        } else {
            self.words[s >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, s: usize) {
        debug_assert!(s < self.len);
        self.words[s >> 6] ^= 1u64 << (s & 63);
    }

    pub fn with(&self, s: usize, value: bool) -> Self {
        let mut c = self.clone();
        c.set(s, value);
        c
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &Config) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|s| self.get(s)).collect()
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config(")?;
        for s in 0..self.len {
            write!(f, "{}", u8::from(self.get(s)))?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip_and_ones() {
        let c = Config::from_mask(10, 0b10_0110_0101);
        assert_eq!(c.to_mask(), 0b10_0110_0101);
        assert_eq!(c.count_ones(), 5);
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![0, 2, 5, 6, 9]);
        assert_eq!(Config::ones(70).count_ones(), 70);
        assert_eq!(Config::from_mask(3, u64::MAX).to_mask(), 7);
    }

    #[test]
    fn toggles_cross_word_boundaries() {
        let mut c = Config::zeros(130);
        c.set(63, true);
        c.set(64, true);
        c.toggle(129);
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![63, 64, 129]);
        assert_eq!(c.hamming(&Config::zeros(130)), 3);
    }
}
