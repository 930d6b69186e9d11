//! Ground-truth spectral computations for small systems.
//!
//! Dense diagonalization caps at [`crate::ham::DENSE_CAP`] qubits; power
//! iteration works through the sparse row oracle of a [`GMatrix`] and
//! scales further.

use crate::error::StoqError;
use crate::gmatrix::GMatrix;
use crate::ham::{LocalHamiltonian, DENSE_CAP};
use serde::{Deserialize, Serialize};

/// How a [`SpectralSummary`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    PowerIteration,
}

/// Ground energy, first excited energy, gap, and the ground vector.
///
/// The vector carries the canonical sign fix (largest-magnitude entry
/// positive); for a stoquastic source it is then entrywise non-negative up
/// to numerical noise. For genuinely complex Hermitian input the stored
/// vector is the real part after a global phase fix and only the
/// eigenvalues should be trusted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub ground_vector: Vec<f64>,
    pub method: Method,
}

/// Flip the sign so the largest-magnitude entry is positive.
pub fn canonical_sign_fix(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Dense diagonalization of a materialized Hamiltonian.
pub fn diagonalize_dense(h: &LocalHamiltonian) -> Result<SpectralSummary, StoqError> {
    diagonalize_dense_capped(h, DENSE_CAP)
}

/// Same as [`diagonalize_dense`] with an explicit qubit cap.
pub fn diagonalize_dense_capped(
    h: &LocalHamiltonian,
    cap: usize,
) -> Result<SpectralSummary, StoqError> {
    if h.n() > cap {
        return Err(StoqError::CapacityExceeded { n: h.n(), cap });
    }
    let m = crate::dense::materialize(h)?;
    let max_im = m.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));

    let (mut evs, ground): (Vec<(usize, f64)>, Vec<f64>) = if max_im <= 1e-13 {
        let eig = m.map(|v| v.re).symmetric_eigen();
        let evs: Vec<(usize, f64)> = eig.eigenvalues.iter().copied().enumerate().collect();
        let idx = evs
            .iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
            .0;
        (evs, eig.eigenvectors.column(idx).iter().copied().collect())
    } else {
        let eig = m.symmetric_eigen();
        let evs: Vec<(usize, f64)> = eig.eigenvalues.iter().copied().enumerate().collect();
        let idx = evs
            .iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
            .0;
        let col = eig.eigenvectors.column(idx);
        // global phase fix by the largest-magnitude entry, then keep Re
        let mut best = 0usize;
        for (i, v) in col.iter().enumerate() {
            if v.norm() > col[best].norm() {
                best = i;
            }
        }
        let phase = col[best] / col[best].norm();
        (evs, col.iter().map(|v| (v / phase).re).collect())
    };

    evs.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let lambda0 = evs[0].1;
    let lambda1 = if evs.len() > 1 { evs[1].1 } else { evs[0].1 };
    let mut ground = ground;
    let norm: f64 = ground.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut ground {
            *v /= norm;
        }
    }
    canonical_sign_fix(&mut ground);
    Ok(SpectralSummary {
        lambda0,
        lambda1,
        gap: lambda1 - lambda0,
        ground_vector: ground,
        method: Method::Dense,
    })
}

/// Largest eigenvalue of `G` by power iteration from the uniform positive
/// vector. Converges when the Rayleigh estimate moves by less than `tol`
/// relative over 10 consecutive iterations (guards slow oscillation near
/// degeneracy). The returned vector is entrywise non-negative.
pub fn largest_eigenvalue_power(
    g: &GMatrix,
    tol: f64,
    max_iters: usize,
) -> Result<(f64, Vec<f64>), StoqError> {
    let dim = g.dim();
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut mu = 0.0f64;
    let mut stable = 0usize;

    // Cache rows: power iteration touches every row each pass.
    let rows: Vec<Vec<(u64, f64)>> = (0..dim as u64).map(|x| g.row(x)).collect();

    for it in 0..max_iters {
        let mut w = vec![0.0f64; dim];
        for (x, row) in rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(y, val) in row {
                acc += val * v[y as usize];
            }
            w[x] = acc;
        }
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // G v = 0: mu = 0 with v itself as witness
            return Ok((0.0, v));
        }
        for x in &mut w {
            *x /= norm;
        }
        let rel = (rayleigh - mu).abs() / rayleigh.abs().max(1e-300);
        mu = rayleigh;
        v = w;
        if rel < tol {
            stable += 1;
            if stable >= 10 {
                return Ok((mu, v));
            }
        } else {
            stable = 0;
        }
        let _ = it;
    }
    Err(StoqError::NoConvergence {
        last: mu,
        iterations: max_iters,
    })
}

/// Answer to the ground-energy decision problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LhMinAnswer {
    Yes,
    No,
    PromiseViolated,
}

/// Decide `lambda(H) <= 0` against `lambda(H) >= delta` by the dense
/// oracle. `delta` plays the role of the inverse promise polynomial.
pub fn decide_lhmin(h: &LocalHamiltonian, delta: f64) -> Result<LhMinAnswer, StoqError> {
    let s = diagonalize_dense(h)?;
    Ok(if s.lambda0 <= 0.0 {
        LhMinAnswer::Yes
    } else if s.lambda0 >= delta {
        LhMinAnswer::No
    } else {
        LhMinAnswer::PromiseViolated
    })
}
