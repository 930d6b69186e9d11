//! Random linear hashing over GF(2), bit-packed into machine words.
//!
//! A hash `h_j : {0,1}^k -> {0,1}^b` is a random binary matrix; the
//! ensemble holds `k` of them. Output bit `i` of `h_j(s)` is the parity
//! of `s` masked by row `i` of matrix `j`. For fixed `u != v`, a uniformly
//! random matrix collides them with probability exactly `2^-b`.

use crate::error::StoqError;
use crate::rng::StreamRng;

/// `kbits` random `kbits x b` binary matrices.
#[derive(Debug, Clone)]
pub struct HashEnsemble {
    kbits: usize,
    b: usize,
    /// masks[j][i]: input mask of output bit `i` of hash `j`.
    masks: Vec<Vec<u64>>,
}

impl HashEnsemble {
    pub fn new(kbits: usize, b: usize, seed: u64) -> Result<Self, StoqError> {
        if kbits == 0 || kbits > 64 || b == 0 || b > 64 {
            return Err(StoqError::BadInput(format!(
                "hash shape {kbits} -> {b} out of range"
            )));
        }
        let mut rng = StreamRng::new(seed, &[0x68617368]);
        let masks = (0..kbits)
            .map(|_| (0..b).map(|_| rng.next_bits(kbits)).collect())
            .collect();
        Ok(HashEnsemble { kbits, b, masks })
    }

    pub fn kbits(&self) -> usize {
        self.kbits
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn count(&self) -> usize {
        self.masks.len()
    }

    /// `h_j(s)`.
    #[inline]
    pub fn apply(&self, j: usize, s: u64) -> u64 {
        let mut out = 0u64;
        for (i, &mask) in self.masks[j].iter().enumerate() {
            out |= (((s & mask).count_ones() & 1) as u64) << i;
        }
        out
    }

    /// Solve `h_j(s) = y` for any `s` by Gaussian elimination; `None` when
    /// `y` is outside the image. Used by the fabricating prover.
    pub fn solve_preimage(&self, j: usize, y: u64) -> Option<u64> {
        // rows: b equations over kbits unknowns
        let mut rows: Vec<(u64, u64)> = self.masks[j]
            .iter()
            .enumerate()
            .map(|(i, &mask)| (mask, (y >> i) & 1))
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut used = vec![false; rows.len()];
        for col in 0..self.kbits {
            let Some(pr) = (0..rows.len())
                .find(|&r| !used[r] && (rows[r].0 >> col) & 1 == 1)
            else {
                continue;
            };
            used[pr] = true;
            pivots.push((pr, col));
            let (pm, pb) = rows[pr];
            for r in 0..rows.len() {
                if r != pr && (rows[r].0 >> col) & 1 == 1 {
                    rows[r].0 ^= pm;
                    rows[r].1 ^= pb;
                }
            }
        }
        // inconsistent rows: 0 = 1
        if rows
            .iter()
            .enumerate()
            .any(|(r, &(m, rhs))| !used[r] && m == 0 && rhs == 1)
        {
            return None;
        }
        let mut s = 0u64;
        for &(r, col) in &pivots {
            if rows[r].1 == 1 {
                s |= 1u64 << col;
            }
        }
        Some(s)
    }
}
