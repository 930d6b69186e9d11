//! Counting the trace of `G^L` and proving its size interactively.
//!
//! Pipeline: round every element of a non-negative matrix `G` down to `m`
//! binary digits, split it into an ensemble of 0/1 matrices
//! `G = 2^-m sum_t G(t)`, and express
//!
//!   Tr(G^L) = 2^{-mL} |Omega|,
//!   Omega = { s = (t_1..t_L, x_1..x_L) : F(s) = 1 },
//!   F(s)  = <x_1|G(t_1)|x_2> <x_2|G(t_2)|x_3> ... <x_L|G(t_L)|x_1>.
//!
//! Large and small eigenvalues of `G` separate `|Omega|` by the LARGE and
//! SMALL thresholds, and a set-size lower bound is provable with random
//! linear hashing ([`protocol`]).

pub mod hashing;
pub mod protocol;

use crate::error::StoqError;
use crate::gmatrix::GMatrix;
use serde::{Deserialize, Serialize};

/// Cap on `(m + n) L`, the bit length of the counting strings: exhaustive
/// enumeration must stay affordable.
pub const OMEGA_BITS_CAP: usize = 26;

/// An ensemble of 0/1 matrices averaging to the digit-truncated `G`.
///
/// `member(t, x, y)` is the ensemble member bit. Writing the truncated
/// element as `g = sum_j d_j 2^-j`, the member at `t` is `d_{j*}` where
/// `j*` is the position of the first set bit of `t` (and 0 for `t = 0`):
/// exactly `d_j 2^{m-j}` of the `2^m` values of `t` select digit `j`, so
/// the ensemble average reproduces `g` exactly.
#[derive(Debug, Clone)]
pub struct BinaryEnsemble {
    m: usize,
    n: usize,
    /// Truncated elements scaled by 2^m, tabulated densely.
    scaled: Vec<u32>,
}

impl BinaryEnsemble {
    /// Round the elements of `G` down to `m` digits and build the ensemble.
    /// Truncation toward zero; an exact 1.0 truncates to `1 - 2^-m`.
    pub fn new(g: &GMatrix, m: usize) -> Result<Self, StoqError> {
        if m == 0 || m > 31 {
            return Err(StoqError::BadInput(format!("digit count m = {m} out of range")));
        }
        let n = g.n();
        if 2 * n > 24 {
            return Err(StoqError::CapacityExceeded { n, cap: 12 });
        }
        let dim = g.dim();
        let scale = (1u64 << m) as f64;
        let mut scaled = vec![0u32; dim * dim];
        for x in 0..dim as u64 {
            for (y, v) in g.row(x) {
                let s = ((v * scale).floor() as i64).clamp(0, (1i64 << m) - 1) as u32;
                scaled[x as usize * dim + y as usize] = s;
            }
        }
        Ok(BinaryEnsemble { m, n, scaled })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Truncated element as an integer multiple of 2^-m.
    #[inline]
    pub fn scaled_element(&self, x: u64, y: u64) -> u32 {
        let dim = 1usize << self.n;
        self.scaled[x as usize * dim + y as usize]
    }

    /// The ensemble member bit `<x|G(t)|y>`.
    #[inline]
    pub fn member(&self, t: u64, x: u64, y: u64) -> bool {
        if t == 0 {
            return false;
        }
        let j = t.trailing_zeros() as usize + 1; // digit index, 1-based
        if j > self.m {
            return false;
        }
        let g = self.scaled_element(x, y);
        (g >> (self.m - j)) & 1 == 1
    }
}

/// A counting instance: the ensemble plus thresholds.
///
/// `LARGE = 2^{L (m + log2 mu_plus)}` and
/// `SMALL = 2^{L (m + log2 mu_minus + n/L)}`; with `L = 2 n p1` and
/// `log2(mu_plus) - log2(mu_minus) = 1/p1` the ratio is exactly `2^n`.
#[derive(Debug, Clone)]
pub struct CountingInstance {
    pub ensemble: BinaryEnsemble,
    pub l: usize,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

/// Thresholds and geometry of a counting instance, serialized for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountingSummary {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub kbits: usize,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub large: f64,
    pub small: f64,
}

impl CountingInstance {
    pub fn new(
        ensemble: BinaryEnsemble,
        l: usize,
        mu_plus: f64,
        mu_minus: f64,
    ) -> Result<Self, StoqError> {
        if l < 2 || l % 2 != 0 {
            return Err(StoqError::BadInput(format!(
                "cycle length L = {l} must be even and >= 2"
            )));
        }
        if !(mu_plus > mu_minus && mu_minus > 0.0) {
            return Err(StoqError::BadInput(
                "thresholds must satisfy 0 < mu_minus < mu_plus".into(),
            ));
        }
        Ok(CountingInstance {
            ensemble,
            l,
            mu_plus,
            mu_minus,
        })
    }

    pub fn n(&self) -> usize {
        self.ensemble.n()
    }

    pub fn m(&self) -> usize {
        self.ensemble.m()
    }

    /// Bit length of the counting strings: `(m + n) L`.
    pub fn kbits(&self) -> usize {
        (self.m() + self.n()) * self.l
    }

    pub fn log2_large(&self) -> f64 {
        self.l as f64 * (self.m() as f64 + self.mu_plus.log2())
    }

    pub fn log2_small(&self) -> f64 {
        self.l as f64 * (self.m() as f64 + self.mu_minus.log2()) + self.n() as f64
    }

    pub fn large(&self) -> f64 {
        self.log2_large().exp2()
    }

    pub fn small(&self) -> f64 {
        self.log2_small().exp2()
    }

    pub fn summary(&self) -> CountingSummary {
        CountingSummary {
            n: self.n(),
            m: self.m(),
            l: self.l,
            kbits: self.kbits(),
            mu_plus: self.mu_plus,
            mu_minus: self.mu_minus,
            large: self.large(),
            small: self.small(),
        }
    }

    /// Layout of `s`: `t_i` occupies bits `[i m, (i+1) m)` for
    /// `i = 0..L`, then `x_i` occupies bits `[L m + i n, L m + (i+1) n)`.
    #[inline]
    fn unpack(&self, s: u64, i: usize) -> (u64, u64, u64) {
        let m = self.m();
        let n = self.n();
        let l = self.l;
        let t = (s >> (i * m)) & ((1u64 << m) - 1);
        let x = (s >> (l * m + i * n)) & ((1u64 << n) - 1);
        let x_next = (s >> (l * m + ((i + 1) % l) * n)) & ((1u64 << n) - 1);
        (t, x, x_next)
    }

    /// The cycle-product bit `F(s)`.
    pub fn eval_f(&self, s: u64) -> Result<bool, StoqError> {
        let kbits = self.kbits();
        if kbits > 64 {
            return Err(StoqError::CapacityExceeded { n: kbits, cap: 64 });
        }
        if kbits < 64 && s >> kbits != 0 {
            return Err(StoqError::DimensionMismatch {
                expected: kbits,
                got: 64 - s.leading_zeros() as usize,
            });
        }
        for i in 0..self.l {
            let (t, x, x_next) = self.unpack(s, i);
            if !self.ensemble.member(t, x, x_next) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exhaustive `|Omega|` (requires `(m+n) L <= OMEGA_BITS_CAP`).
    pub fn count_omega_bruteforce(&self) -> Result<u64, StoqError> {
        Ok(self.omega_members()?.len() as u64)
    }

    /// All members of `Omega`, enumerated exhaustively.
    ///
    /// Enumeration walks the cycle structure instead of all `2^{(m+n)L}`
    /// strings: for each x-cycle it multiplies per-edge counts of
    /// digit strings `t` with `member(t, x_i, x_{i+1}) = 1`; the t-blocks
    /// are then enumerated only for surviving cycles.
    pub fn omega_members(&self) -> Result<Vec<u64>, StoqError> {
        let kbits = self.kbits();
        if kbits > OMEGA_BITS_CAP {
            return Err(StoqError::CapacityExceeded {
                n: kbits,
                cap: OMEGA_BITS_CAP,
            });
        }
        let m = self.m();
        let n = self.n();
        let l = self.l;
        let mut out = Vec::new();
        // Pre-tabulate, for every (x, y), the list of t with member = 1.
        let dim = 1usize << n;
        let mut t_options: Vec<Vec<u64>> = Vec::with_capacity(dim * dim);
        for x in 0..dim as u64 {
            for y in 0..dim as u64 {
                let opts: Vec<u64> = (0..1u64 << m)
                    .filter(|&t| self.ensemble.member(t, x, y))
                    .collect();
                t_options.push(opts);
            }
        }
        let mut xs = vec![0u64; l];
        let mut stack_t = vec![0usize; l];
        // enumerate x-cycles
        let total_x = 1u64 << (n * l);
        for xc in 0..total_x {
            for (i, x) in xs.iter_mut().enumerate() {
                *x = (xc >> (i * n)) & ((1u64 << n) - 1);
            }
            // quick reject: every edge needs at least one t option
            let mut ok = true;
            for i in 0..l {
                let (x, y) = (xs[i], xs[(i + 1) % l]);
                if t_options[x as usize * dim + y as usize].is_empty() {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            // enumerate t choices per edge (odometer)
            stack_t.iter_mut().for_each(|v| *v = 0);
            'odometer: loop {
                let mut s = 0u64;
                for i in 0..l {
                    let (x, y) = (xs[i], xs[(i + 1) % l]);
                    let t = t_options[x as usize * dim + y as usize][stack_t[i]];
                    s |= t << (i * m);
                }
                s |= xc << (l * m);
                out.push(s);
                // increment odometer
                for i in 0..l {
                    let (x, y) = (xs[i], xs[(i + 1) % l]);
                    let len = t_options[x as usize * dim + y as usize].len();
                    stack_t[i] += 1;
                    if stack_t[i] < len {
                        continue 'odometer;
                    }
                    stack_t[i] = 0;
                }
                break;
            }
        }
        Ok(out)
    }

    /// `Tr(G_m^L)` of the truncated matrix, computed densely in exact
    /// dyadic arithmetic (for cross-checks against `|Omega| 2^{-mL}`).
    pub fn trace_power_dense(&self) -> f64 {
        let n = self.n();
        let m = self.m();
        let dim = 1usize << n;
        let unit = (1.0f64 / (1u64 << m) as f64) as f64;
        let mut g = vec![0.0f64; dim * dim];
        for x in 0..dim {
            for y in 0..dim {
                g[x * dim + y] =
                    self.ensemble.scaled_element(x as u64, y as u64) as f64 * unit;
            }
        }
        // power by repeated multiplication
        let mut p = g.clone();
        for _ in 1..self.l {
            let mut next = vec![0.0f64; dim * dim];
            for x in 0..dim {
                for z in 0..dim {
                    let v = p[x * dim + z];
                    if v == 0.0 {
                        continue;
                    }
                    for y in 0..dim {
                        next[x * dim + y] += v * g[z * dim + y];
                    }
                }
            }
            p = next;
        }
        (0..dim).map(|x| p[x * dim + x]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::gmatrix::GMode;
    use crate::ham::{LocalHamiltonian, LocalTerm};

    fn half_i_plus_x() -> GMatrix {
        // H = -X with norm shift: G = (I + X)/2, all elements 1/2.
        let h = LocalHamiltonian::new(
            1,
            1,
            vec![LocalTerm::from_real(vec![0], -dense::pauli_x()).unwrap()],
        )
        .unwrap();
        GMatrix::from_hamiltonian(&h, GMode::NormShift).unwrap()
    }

    #[test]
    fn digit_selection_five_eighths() {
        // g = 5/8 = 0.101_2 at m = 3: exactly 5 of 8 t-strings give 1.
        // Realize via a diagonal Hamiltonian h with (1 - h)/2 = 5/8.
        let mut mat = nalgebra::DMatrix::zeros(2, 2);
        mat[(0, 0)] = -0.25;
        mat[(1, 1)] = -0.25;
        let h = LocalHamiltonian::new(
            1,
            1,
            vec![LocalTerm::from_real(vec![0], mat).unwrap()],
        )
        .unwrap();
        let g = GMatrix::with_walk_scale(&h, 1.0).unwrap();
        assert_eq!(g.element(0, 0), 0.625);
        let ens = BinaryEnsemble::new(&g, 3).unwrap();
        let hits = (0..8u64).filter(|&t| ens.member(t, 0, 0)).count();
        assert_eq!(hits, 5);
    }

    #[test]
    fn zero_element_never_selected() {
        let g = half_i_plus_x();
        let ens = BinaryEnsemble::new(&g, 4).unwrap();
        // All elements are 1/2 here; fabricate the zero case via x == y
        // on an off-diagonal-free instance instead.
        let h0 = LocalHamiltonian::new(1, 1, vec![]).unwrap();
        let g0 = GMatrix::from_hamiltonian(&h0, GMode::NormShift).unwrap();
        let ens0 = BinaryEnsemble::new(&g0, 4).unwrap();
        for t in 0..16u64 {
            assert!(!ens0.member(t, 0, 1), "element 0 selected at t = {t}");
        }
        let _ = ens;
    }

    #[test]
    fn ensemble_average_exact() {
        // G = (I + X)/2 at m = 1: averaging over t in {0, 1} reproduces
        // every element exactly.
        let g = half_i_plus_x();
        let ens = BinaryEnsemble::new(&g, 1).unwrap();
        for x in 0..2u64 {
            for y in 0..2u64 {
                let avg: f64 = (0..2u64)
                    .map(|t| if ens.member(t, x, y) { 1.0 } else { 0.0 })
                    .sum::<f64>()
                    / 2.0;
                assert_eq!(avg, g.element(x, y));
            }
        }
    }

    #[test]
    fn ensemble_average_exact_any_m() {
        // Exactness holds as integer identities for every tabulated element.
        let h = crate::models::transverse_ising(3, 0.5, 1.0).unwrap();
        let g = GMatrix::from_hamiltonian(&h, GMode::WalkShift).unwrap();
        for m in [1usize, 3, 7] {
            let ens = BinaryEnsemble::new(&g, m).unwrap();
            for x in 0..8u64 {
                for y in 0..8u64 {
                    let count: u64 = (0..1u64 << m)
                        .map(|t| ens.member(t, x, y) as u64)
                        .sum();
                    assert_eq!(count, ens.scaled_element(x, y) as u64);
                }
            }
        }
    }

    #[test]
    fn omega_count_matches_trace() {
        // n = 1, m = 1, L = 2 on G = (I+X)/2: Tr(G^2) = 1, so
        // |Omega| = 2^{mL} Tr(G^2) = 4.
        let g = half_i_plus_x();
        let ens = BinaryEnsemble::new(&g, 1).unwrap();
        let inst = CountingInstance::new(ens, 2, 1.0, 0.5).unwrap();
        assert_eq!(inst.count_omega_bruteforce().unwrap(), 4);
        let tr = inst.trace_power_dense();
        assert_eq!(4.0, (1u64 << (1 * 2)) as f64 * tr);
    }

    #[test]
    fn omega_enumeration_matches_naive_scan() {
        let h = crate::models::transverse_ising(2, 0.5, 1.0).unwrap();
        let g = GMatrix::from_hamiltonian(&h, GMode::WalkShift).unwrap();
        let ens = BinaryEnsemble::new(&g, 2).unwrap();
        let inst = CountingInstance::new(ens, 2, 0.6, 0.5).unwrap();
        let fast = {
            let mut v = inst.omega_members().unwrap();
            v.sort_unstable();
            v
        };
        let kbits = inst.kbits();
        let naive: Vec<u64> = (0..1u64 << kbits)
            .filter(|&s| inst.eval_f(s).unwrap())
            .collect();
        assert_eq!(fast, naive);
    }

    #[test]
    fn counting_identity_on_instances() {
        // |Omega| = 2^{mL} Tr(G_m^L) exactly, across several shapes.
        let cases = [(2usize, 2usize, 2usize), (2, 1, 4), (3, 2, 2), (1, 3, 4)];
        for &(n, m, l) in &cases {
            let h = crate::models::transverse_ising(n, 0.4, 0.9).unwrap();
            let g = GMatrix::from_hamiltonian(&h, GMode::WalkShift).unwrap();
            let ens = BinaryEnsemble::new(&g, m).unwrap();
            let inst = CountingInstance::new(ens, l, 0.6, 0.5).unwrap();
            let omega = inst.count_omega_bruteforce().unwrap() as f64;
            let tr = inst.trace_power_dense();
            let factor = 2.0f64.powi((m * l) as i32);
            assert_eq!(
                omega,
                factor * tr,
                "n={n} m={m} L={l}: {omega} vs {}",
                factor * tr
            );
        }
    }

    #[test]
    fn large_small_separation() {
        // With L = 2 n p1 and log2(mu_plus/mu_minus) = 1/p1:
        // LARGE = 2^n SMALL exactly.
        let g = half_i_plus_x();
        let n = 1usize;
        let p1 = 2.0f64;
        let l = (2.0 * n as f64 * p1) as usize; // 4
        let mu_minus = 0.5;
        let mu_plus = mu_minus * 2.0f64.powf(1.0 / p1);
        let ens = BinaryEnsemble::new(&g, 2).unwrap();
        let inst = CountingInstance::new(ens, l, mu_plus, mu_minus).unwrap();
        let ratio = inst.large() / inst.small();
        assert_eq!(ratio, 2.0f64.powi(n as i32));
    }

    #[test]
    fn f_zero_factor_annihilates() {
        let g = half_i_plus_x();
        let ens = BinaryEnsemble::new(&g, 1).unwrap();
        let inst = CountingInstance::new(ens, 2, 1.0, 0.5).unwrap();
        // t_1 = 0 forces member = 0 regardless of the x blocks.
        for xbits in 0..4u64 {
            let s = xbits << 2; // t blocks zero
            assert!(!inst.eval_f(s).unwrap());
        }
    }
}
