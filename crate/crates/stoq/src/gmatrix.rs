//! The non-negative matrix `G` derived from a stoquastic Hamiltonian.
//!
//! For stoquastic `H`, `G = (I - H/scale)/2` has entries in [0, 1] and its
//! largest eigenvalue `mu(G) = (1 - lambda(H)/scale)/2` encodes the ground
//! energy. Two scalings are supported:
//!
//! - `NormShift`: `scale = C = sum_S ||H_S||`, so `||G|| <= 1`.
//! - `WalkShift`: `scale = q = 2 max(1, 2^k C(n,k) max_S ||H_S||)`, which
//!   additionally bounds every row sum `B_x = sum_y G_{x,y}` into [1/4, 1],
//!   the property the random-walk estimator relies on.
//!
//! `G` is exposed through element and sparse-row oracles and is never
//! materialized.

use crate::bits::sub_index;
use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, DENSE_CAP};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Which divisor the shift `G = (I - H/scale)/2` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GMode {
    /// Divide by `C = sum_S ||H_S||`.
    NormShift,
    /// Divide by `q = 2 max(1, 2^k C(n,k) p1)` with `p1 = max_S ||H_S||`.
    WalkShift,
}

/// Non-negative symmetric matrix oracle. Construction refuses
/// non-stoquastic sources; all elements of a valid `G` lie in [0, 1].
#[derive(Debug, Clone)]
pub struct GMatrix {
    source: LocalHamiltonian,
    mode: GMode,
    scale: f64,
    /// Real term matrices (valid because the source is stoquastic).
    real_terms: Vec<(Vec<usize>, DMatrix<f64>)>,
}

/// Binomial coefficient as f64 (n, k small).
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

impl GMatrix {
    /// Build `G` from a stoquastic Hamiltonian. A non-stoquastic source is
    /// refused with the offending report attached.
    pub fn from_hamiltonian(h: &LocalHamiltonian, mode: GMode) -> Result<GMatrix, StoqError> {
        let report = h.check_stoquastic(true)?;
        if !report.is_stoquastic {
            return Err(StoqError::NotStoquastic { report });
        }
        let scale = match mode {
            GMode::NormShift => {
                let c = h.norm_bound();
                if c > 0.0 {
                    c
                } else {
                    1.0 // H = 0: any divisor gives G = I/2
                }
            }
            GMode::WalkShift => {
                let p1 = h.max_term_norm();
                2.0 * (1.0f64).max((1u64 << h.k()) as f64 * binomial(h.n(), h.k()) * p1)
            }
        };
        let real_terms = h
            .terms()
            .iter()
            .map(|t| (t.support.clone(), t.matrix.map(|v| v.re)))
            .collect();
        Ok(GMatrix {
            source: h.clone(),
            mode,
            scale,
            real_terms,
        })
    }

    /// Build a walk-mode `G` with an explicit divisor instead of the
    /// default `q(n)`. The caller is responsible for keeping row sums in
    /// [1/4, 1]; the walk engine re-checks.
    pub fn with_walk_scale(h: &LocalHamiltonian, scale: f64) -> Result<GMatrix, StoqError> {
        let mut g = Self::from_hamiltonian(h, GMode::WalkShift)?;
        if scale <= 0.0 {
            return Err(StoqError::Precondition("scale must be positive".into()));
        }
        g.scale = scale;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mode(&self) -> GMode {
        self.mode
    }

    pub fn source(&self) -> &LocalHamiltonian {
        &self.source
    }

    /// `<x|G|y> = (delta_{xy} - <x|H|y>/scale)/2`.
    pub fn element(&self, x: u64, y: u64) -> f64 {
        let mut hxy = 0.0f64;
        let diff = x ^ y;
        for (support, m) in &self.real_terms {
            let mut smask = 0u64;
            for &q in support {
                smask |= 1u64 << q;
            }
            if diff & !smask != 0 {
                continue;
            }
            hxy += m[(sub_index(x, support), sub_index(y, support))];
        }
        let delta = if x == y { 1.0 } else { 0.0 };
        0.5 * (delta - hxy / self.scale)
    }

    /// Sparse row `(y, G_{x,y})` sorted by `y`. Row sparsity is at most
    /// `C(n,k) 2^k + 1`.
    pub fn row(&self, x: u64) -> Vec<(u64, f64)> {
        let mut map: BTreeMap<u64, f64> = BTreeMap::new();
        for (support, m) in &self.real_terms {
            let a = sub_index(x, support);
            for b in 0..m.ncols() {
                let y = crate::bits::with_sub_index(x, support, b);
                *map.entry(y).or_insert(0.0) += m[(a, b)];
            }
        }
        let mut row: Vec<(u64, f64)> = map
            .into_iter()
            .map(|(y, hxy)| {
                let delta = if y == x { 1.0 } else { 0.0 };
                (y, 0.5 * (delta - hxy / self.scale))
            })
            .collect();
        if !row.iter().any(|&(y, _)| y == x) {
            row.push((x, 0.5));
            row.sort_by_key(|&(y, _)| y);
        }
        row
    }

    /// Row sum `B_x = sum_y G_{x,y}` from the sparse row.
    pub fn row_sum(&self, x: u64) -> f64 {
        self.row(x).iter().map(|&(_, v)| v).sum()
    }

    /// Largest-eigenvalue thresholds for deciding `lambda(H) <= 0` against
    /// `lambda(H) >= 1/p2`: `mu_plus = 1/2`,
    /// `mu_minus = (1 - 1/(scale * p2))/2`.
    pub fn mu_thresholds(&self, p2: f64) -> (f64, f64) {
        (0.5, 0.5 * (1.0 - 1.0 / (self.scale * p2)))
    }

    /// Materialize `G` densely (cross-checks only; `n <= DENSE_CAP`).
    pub fn to_dense(&self) -> Result<DMatrix<f64>, StoqError> {
        if self.n() > DENSE_CAP {
            return Err(StoqError::CapacityExceeded {
                n: self.n(),
                cap: DENSE_CAP,
            });
        }
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for x in 0..dim as u64 {
            for (y, v) in self.row(x) {
                m[(x as usize, y as usize)] = v;
            }
        }
        Ok(m)
    }
}
