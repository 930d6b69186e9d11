//! Two-party set-size lower-bound protocol at desk scale.
//!
//! The verifier wants to distinguish `|Omega| >= LARGE` from
//! `|Omega| < SMALL`, where `Omega` is the support of the counting
//! function `F` on `kbits`-bit strings. It draws `kbits` random linear
//! hashes to `b = ceil(log2 LARGE) + 3` bits and Monte-Carlo estimates the
//! density of the image `h(Omega) = union_j h_j(Omega)`: membership of a
//! sampled `y` is certified by a prover-supplied pre-image `(j, s)` with
//! `h_j(s) = y` and `F(s) = 1`, both of which the verifier re-checks.
//! The acceptance cut is the geometric midpoint of the densities implied
//! by the two worst-case image bounds, `LARGE/kbits >= 2^b/(8 kbits)` for
//! dense sets and `kbits * SMALL <= (kbits/2^{n+2}) 2^b` for sparse ones.
//!
//! When `b > kbits` compression is pointless (`Omega` occupies a constant
//! fraction of all strings); the verifier samples strings directly and
//! checks `F` itself, cutting at the geometric midpoint of the LARGE and
//! SMALL densities.
//!
//! Soundness is demonstrated against two concrete cheating strategies,
//! not all strategies: `AlwaysClaim` fabricates hash pre-images by linear
//! algebra and `RandomPreimage` guesses uniformly; both founder on the
//! `F(s) = 1` re-check.

use super::hashing::HashEnsemble;
use super::CountingInstance;
use crate::error::StoqError;
use crate::rng::StreamRng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Prover behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProverStrategy {
    /// Exhaustively knows `Omega`; answers any query it truthfully can.
    Honest,
    /// Fabricates a pre-image for every query by solving `h_j(s) = y`,
    /// ignoring membership of `s` in `Omega`.
    AlwaysClaim,
    /// Returns a uniformly random `(j, s)`.
    RandomPreimage,
}

/// One query/response/check record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryRecord {
    pub y: u64,
    pub response: Option<(usize, u64)>,
    pub hash_ok: bool,
    pub member_ok: bool,
    pub hit: bool,
}

/// Verdict plus replayable transcript.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub accept: bool,
    pub hits: usize,
    pub trials: usize,
    pub hit_fraction: f64,
    pub threshold: f64,
    pub b: usize,
    pub kbits: usize,
    pub compressed: bool,
    pub prover: ProverStrategy,
    pub seed: u64,
    pub queries: Vec<QueryRecord>,
}

fn ceil_log2(x: f64) -> usize {
    let l = x.log2().ceil();
    if l < 0.0 {
        0
    } else {
        l as usize
    }
}

/// Run one protocol instance with `trials` Monte-Carlo queries.
pub fn run_gs_protocol(
    instance: &CountingInstance,
    prover: ProverStrategy,
    trials: usize,
    seed: u64,
) -> Result<ProtocolOutcome, StoqError> {
    let kbits = instance.kbits();
    let b = ceil_log2(instance.large()) + 3;

    if b > kbits {
        return run_direct_monte_carlo(instance, trials, seed, b, prover);
    }

    let hashes = HashEnsemble::new(kbits, b, seed)?;
    let n_hashes = hashes.count();

    // The honest prover's pre-image table over all hashes.
    let preimages: Option<HashMap<u64, (usize, u64)>> = if prover == ProverStrategy::Honest {
        let omega = instance.omega_members()?;
        let mut map = HashMap::new();
        for j in 0..n_hashes {
            for &s in &omega {
                map.entry(hashes.apply(j, s)).or_insert((j, s));
            }
        }
        Some(map)
    } else {
        None
    };

    // densities implied by the worst-case bounds
    let dense_density = 1.0 / (8.0 * kbits as f64);
    let sparse_density = kbits as f64 / 2.0f64.powi(instance.n() as i32 + 2);
    let threshold = (dense_density * sparse_density).sqrt();

    let mut rng = StreamRng::new(seed, &[0x71756572]);
    let mut hits = 0usize;
    let mut queries = Vec::with_capacity(trials);
    for t in 0..trials {
        let y = rng.next_bits(b);
        let response = match prover {
            ProverStrategy::Honest => preimages.as_ref().unwrap().get(&y).copied(),
            ProverStrategy::AlwaysClaim => {
                let j = StreamRng::new(seed, &[0x70726f76, t as u64]).uniform_below(n_hashes as u64)
                    as usize;
                hashes.solve_preimage(j, y).map(|s| (j, s))
            }
            ProverStrategy::RandomPreimage => {
                let mut prng = StreamRng::new(seed, &[0x70726f76, t as u64]);
                Some((
                    prng.uniform_below(n_hashes as u64) as usize,
                    prng.next_bits(kbits),
                ))
            }
        };
        let (hash_ok, member_ok) = match response {
            Some((j, s)) => (hashes.apply(j, s) == y, instance.eval_f(s)?),
            None => (false, false),
        };
        let hit = hash_ok && member_ok;
        if hit {
            hits += 1;
        }
        queries.push(QueryRecord {
            y,
            response,
            hash_ok,
            member_ok,
            hit,
        });
    }
    let hit_fraction = hits as f64 / trials as f64;
    Ok(ProtocolOutcome {
        accept: hit_fraction > threshold,
        hits,
        trials,
        hit_fraction,
        threshold,
        b,
        kbits,
        compressed: true,
        prover,
        seed,
        queries,
    })
}

/// Uncompressed branch: sample strings, check `F` directly (no prover
/// interaction is needed to certify membership).
fn run_direct_monte_carlo(
    instance: &CountingInstance,
    trials: usize,
    seed: u64,
    b: usize,
    prover: ProverStrategy,
) -> Result<ProtocolOutcome, StoqError> {
    let kbits = instance.kbits();
    let dense_density = instance.large() / 2.0f64.powi(kbits as i32);
    let sparse_density = instance.small() / 2.0f64.powi(kbits as i32);
    let threshold = (dense_density * sparse_density).sqrt();
    let mut rng = StreamRng::new(seed, &[0x71756572]);
    let mut hits = 0usize;
    let mut queries = Vec::with_capacity(trials);
    for _ in 0..trials {
        let s = rng.next_bits(kbits);
        let hit = instance.eval_f(s)?;
        if hit {
            hits += 1;
        }
        queries.push(QueryRecord {
            y: s,
            response: None,
            hash_ok: true,
            member_ok: hit,
            hit,
        });
    }
    let hit_fraction = hits as f64 / trials as f64;
    Ok(ProtocolOutcome {
        accept: hit_fraction > threshold,
        hits,
        trials,
        hit_fraction,
        threshold,
        b,
        kbits,
        compressed: false,
        prover,
        seed,
        queries,
    })
}
