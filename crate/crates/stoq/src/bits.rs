//! Basis states as packed bitstrings.
//!
//! A basis state of `n` qubits is a `u64` whose bit `i` is qubit `i`
//! (qubit 0 least significant). Terms act on a sorted support
//! `[q_0 < q_1 < ...]`; the corresponding *sub-index* packs qubit `q_j`
//! into bit `j`.

/// Extract the sub-index of `x` on `support` (bit `j` = qubit `support[j]`).
#[inline]
pub fn sub_index(x: u64, support: &[usize]) -> usize {
    let mut s = 0usize;
    for (j, &q) in support.iter().enumerate() {
        s |= (((x >> q) & 1) as usize) << j;
    }
    s
}

/// Replace the bits of `x` on `support` by the sub-index `sub`.
#[inline]
pub fn with_sub_index(x: u64, support: &[usize], sub: usize) -> u64 {
    let mut y = x;
    for (j, &q) in support.iter().enumerate() {
        let bit = ((sub >> j) & 1) as u64;
        y = (y & !(1u64 << q)) | (bit << q);
    }
    y
}

/// True when `x` and `y` agree on every qubit outside `support`.
#[inline]
pub fn agree_outside(x: u64, y: u64, support: &[usize], n: usize) -> bool {
    let mut mask: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    for &q in support {
        mask &= !(1u64 << q);
    }
    (x & mask) == (y & mask)
}

/// Render a basis state as a bitstring `x_0 x_1 ... x_{n-1}` (qubit 0 first).
pub fn to_bitstring(x: u64, n: usize) -> String {
    (0..n).map(|i| if (x >> i) & 1 == 1 { '1' } else { '0' }).collect()
}
