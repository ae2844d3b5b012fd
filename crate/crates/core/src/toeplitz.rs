//! Seeded Toeplitz hashing, a two-universal family used for privacy
//! amplification. The `m x n` matrix is fixed by its `n + m - 1` diagonal
//! bits, drawn from a ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Bits packed little-endian into `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64) + 1],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// 64 bits starting at `offset`; bits past the end read as 0.
    fn window(&self, offset: usize) -> u64 {
        let (w, b) = (offset / 64, offset % 64);
        let lo = self.words.get(w).copied().unwrap_or(0) >> b;
        if b == 0 {
            lo
        } else {
            lo | (self.words.get(w + 1).copied().unwrap_or(0) << (64 - b))
        }
    }

    /// Lowercase hex of the packed words, least significant bit first.
    pub fn to_hex(&self) -> String {
        let bytes = self.len.div_ceil(8);
        (0..bytes)
            .map(|k| format!("{:02x}", (self.words[k / 8] >> (8 * (k % 8))) & 0xff))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ToeplitzHash {
    input_len: usize,
    output_len: usize,
    /// `diag[i - j + n - 1]` is the matrix entry at row `i`, column `j`,
    /// stored reversed so that each row is a contiguous window.
    rev_diag: BitVec,
}

impl ToeplitzHash {
    pub fn new(input_len: usize, output_len: usize, seed: u64) -> Result<Self> {
        if output_len > input_len {
            return Err(Error::param(
                "output_len",
                output_len,
                format!("cannot exceed the input length {input_len}"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = (input_len + output_len).saturating_sub(1);
        let mut rev_diag = BitVec::zeros(total);
        for k in 0..total {
            rev_diag.set(k, rng.random());
        }
        Ok(Self {
            input_len,
            output_len,
            rev_diag,
        })
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    /// Matrix entry `T[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        // row i is rev_diag[m-1-i .. m-1-i+n]
        self.rev_diag.get(self.output_len - 1 - i + j)
    }

    pub fn hash(&self, input: &BitVec) -> Result<BitVec> {
        if input.len() != self.input_len {
            return Err(Error::param(
                "input",
                input.len(),
                format!("expected {} bits", self.input_len),
            ));
        }
        let n = self.input_len;
        let full = n / 64;
        let tail_mask = if n.is_multiple_of(64) { 0 } else { (1u64 << (n % 64)) - 1 };
        let mut out = BitVec::zeros(self.output_len);
        for i in 0..self.output_len {
            let start = self.output_len - 1 - i;
            let mut acc = 0u64;
            for w in 0..full {
                acc ^= self.rev_diag.window(start + 64 * w) & input.words[w];
            }
            if tail_mask != 0 {
                acc ^= self.rev_diag.window(start + 64 * full) & input.words[full] & tail_mask;
            }
            out.set(i, acc.count_ones() % 2 == 1);
        }
        Ok(out)
    }
}
