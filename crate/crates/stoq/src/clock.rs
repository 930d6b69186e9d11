//! Clock Hamiltonians for reversible verifier circuits.
//!
//! A verifier is a Toffoli circuit on `n = r + k_anc + s` wires: `r` coin
//! wires fed `|+>`, `k_anc` ancillas fed `|0>`, and `s` witness wires fed
//! the proof string. Acceptance is the probability (over coins) that a
//! designated output wire ends in 1.
//!
//! The circuit maps to a Hamiltonian on `n + T` qubits whose ground energy
//! separates accepting from rejecting circuits:
//!
//!   H = H_in + H_out + H_prop + H_clock
//!
//! with a unary clock (time `t` is the string `1^t 0^{T-t}` on the clock
//! register), domain-wall penalties `|01><01|` between adjacent clock
//! qubits, input penalties at `t = 0`, an output penalty at `t = T`, and
//! hopping terms that advance the clock while applying the gate. All
//! off-diagonal terms come with gate permutation matrices and a minus
//! sign, so the result is stoquastic, and no term touches more than six
//! qubits.

use crate::dense::{embed_product, projector};
use crate::error::StoqError;
use crate::exact;
use crate::ham::{LocalHamiltonian, LocalTerm};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// A reversible verifier circuit made of Toffoli gates.
///
/// Wire layout: coins `[0, r)`, ancillas `[r, r + k_anc)`, witness
/// `[r + k_anc, n)`. Gate `[c1, c2, t]` flips wire `t` when both controls
/// read 1. Single- and two-wire classical gates are expressible by fixing
/// controls to prepared ancilla wires.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReversibleCircuit {
    pub r: usize,
    pub k_anc: usize,
    pub s: usize,
    pub q_out: usize,
    pub gates: Vec<[usize; 3]>,
}

/// Brute-force cap on coin wires.
pub const COIN_CAP: usize = 20;
/// Cap on witness wires for operator enumeration.
pub const WITNESS_CAP: usize = 12;

impl ReversibleCircuit {
    pub fn n_wires(&self) -> usize {
        self.r + self.k_anc + self.s
    }

    pub fn t_gates(&self) -> usize {
        self.gates.len()
    }

    /// Validate wire indices and gate shape.
    pub fn validate(&self) -> Result<(), StoqError> {
        let n = self.n_wires();
        if self.gates.is_empty() {
            return Err(StoqError::InvalidCircuit("need at least one gate".into()));
        }
        if self.q_out >= n {
            return Err(StoqError::InvalidCircuit(format!(
                "q_out {} out of range for {n} wires",
                self.q_out
            )));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if g[0] == g[1] || g[0] == g[2] || g[1] == g[2] {
                return Err(StoqError::InvalidCircuit(format!(
                    "gate {i} has repeated wires {g:?}"
                )));
            }
            if g.iter().any(|&w| w >= n) {
                return Err(StoqError::InvalidCircuit(format!(
                    "gate {i} touches wire out of range: {g:?}"
                )));
            }
        }
        Ok(())
    }

    /// Run the circuit on a classical input: bit `i` of the state is wire `i`.
    pub fn run(&self, coins: u64, witness: u64) -> u64 {
        let coin_mask = if self.r == 0 { 0 } else { (1u64 << self.r) - 1 };
        let wit_mask = if self.s == 0 { 0 } else { (1u64 << self.s) - 1 };
        let mut state = (coins & coin_mask) | ((witness & wit_mask) << (self.r + self.k_anc));
        for g in &self.gates {
            let c1 = (state >> g[0]) & 1;
            let c2 = (state >> g[1]) & 1;
            if c1 & c2 == 1 {
                state ^= 1u64 << g[2];
            }
        }
        state
    }

    /// Acceptance probability for a fixed witness: the fraction of coin
    /// strings for which the output wire reads 1.
    pub fn acceptance_probability(&self, witness: u64) -> Result<f64, StoqError> {
        self.validate()?;
        if self.r > COIN_CAP {
            return Err(StoqError::CapacityExceeded {
                n: self.r,
                cap: COIN_CAP,
            });
        }
        let coins_total = 1u64 << self.r;
        let mut accepted = 0u64;
        for c in 0..coins_total {
            let out = self.run(c, witness);
            if (out >> self.q_out) & 1 == 1 {
                accepted += 1;
            }
        }
        Ok(accepted as f64 / coins_total as f64)
    }

    /// The diagonal acceptance operator: entry `z` is the acceptance
    /// probability with witness `z`. Its maximum equals the best
    /// acceptance over all (also quantum) witnesses, because the operator
    /// is diagonal in the standard basis.
    pub fn acceptance_operator(&self) -> Result<Vec<f64>, StoqError> {
        if self.s > WITNESS_CAP {
            return Err(StoqError::CapacityExceeded {
                n: self.s,
                cap: WITNESS_CAP,
            });
        }
        (0..1u64 << self.s)
            .map(|z| self.acceptance_probability(z))
            .collect()
    }

    /// The gate's 8x8 permutation matrix on wires `(c1, c2, target)`,
    /// sub-index bit order matching the sorted support.
    fn gate_matrix(&self, gate: [usize; 3]) -> (Vec<usize>, DMatrix<f64>) {
        let mut support = gate.to_vec();
        support.sort_unstable();
        let bit_of = |w: usize| support.iter().position(|&q| q == w).unwrap();
        let (b1, b2, bt) = (bit_of(gate[0]), bit_of(gate[1]), bit_of(gate[2]));
        let mut m = DMatrix::zeros(8, 8);
        for b in 0..8usize {
            let mut a = b;
            if (b >> b1) & 1 == 1 && (b >> b2) & 1 == 1 {
                a ^= 1 << bt;
            }
            m[(a, b)] = 1.0;
        }
        (support, m)
    }
}

/// A clock Hamiltonian together with its register layout.
#[derive(Debug, Clone)]
pub struct ClockInstance {
    pub hamiltonian: LocalHamiltonian,
    pub t_gates: usize,
    pub coin_range: std::ops::Range<usize>,
    pub ancilla_range: std::ops::Range<usize>,
    pub witness_range: std::ops::Range<usize>,
    pub clock_range: std::ops::Range<usize>,
}

/// Build the clock Hamiltonian of a circuit. Requires `T >= 2` so the
/// boundary forms of the hopping terms are well defined.
///
/// Clock qubit for time slot `t` (1-based) sits at index `n + t - 1`. The
/// domain-wall penalty `|01><01|` is applied to clock pairs `(t-1, t)` for
/// `t = 2..T`; the `t = 1` pair of the written sum would reference a
/// clock qubit 0 that does not exist, and legality at the left boundary
/// is already enforced by the `t = 1` hopping.
pub fn build_clock_hamiltonian(circuit: &ReversibleCircuit) -> Result<ClockInstance, StoqError> {
    circuit.validate()?;
    let t_gates = circuit.t_gates();
    if t_gates < 2 {
        return Err(StoqError::InvalidCircuit(
            "clock construction needs at least two gates".into(),
        ));
    }
    let n = circuit.n_wires();
    let clock = |t: usize| n + t - 1; // t = 1..=T
    let mut terms: Vec<LocalTerm> = Vec::new();

    // |-><-| = (I - X)/2 on each coin, conditioned on clock_1 = 0.
    let minus_proj = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
    for i in 0..circuit.r {
        let m = crate::dense::kron(&minus_proj, &projector(0));
        terms.push(LocalTerm::from_real(vec![i, clock(1)], m)?);
    }
    // |1><1| on each ancilla, conditioned on clock_1 = 0.
    for j in 0..circuit.k_anc {
        let m = crate::dense::kron(&projector(1), &projector(0));
        terms.push(LocalTerm::from_real(vec![circuit.r + j, clock(1)], m)?);
    }
    // Output penalty: |0><0| on q_out, conditioned on clock_T = 1.
    {
        let m = crate::dense::kron(&projector(0), &projector(1));
        terms.push(LocalTerm::from_real(vec![circuit.q_out, clock(t_gates)], m)?);
    }
    // Domain-wall clock penalties.
    for t in 2..=t_gates {
        let m = crate::dense::kron(&projector(0), &projector(1));
        terms.push(LocalTerm::from_real(vec![clock(t - 1), clock(t)], m)?);
    }
    // Hopping terms.
    for (gi, &gate) in circuit.gates.iter().enumerate() {
        let t = gi + 1;
        let (gsup, gmat) = circuit.gate_matrix(gate);
        let gid = DMatrix::identity(8, 8);

        // Clock patterns before/after the hop, as (qubits, projector bits).
        let (clock_qubits, before, after): (Vec<usize>, Vec<u8>, Vec<u8>) = if t == 1 {
            (vec![clock(1), clock(2)], vec![0, 0], vec![1, 0])
        } else if t == t_gates {
            (vec![clock(t - 1), clock(t)], vec![1, 0], vec![1, 1])
        } else {
            (
                vec![clock(t - 1), clock(t), clock(t + 1)],
                vec![1, 0, 0],
                vec![1, 1, 0],
            )
        };

        let mut support: Vec<usize> = gsup.clone();
        support.extend(&clock_qubits);
        support.sort_unstable();

        let proj_block = |bits: &[u8]| -> DMatrix<f64> {
            let dim = 1usize << bits.len();
            let mut m = DMatrix::zeros(dim, dim);
            let mut idx = 0usize;
            for (j, &b) in bits.iter().enumerate() {
                idx |= (b as usize) << j;
            }
            m[(idx, idx)] = 1.0;
            m
        };
        let hop_block = |from: &[u8], to: &[u8]| -> DMatrix<f64> {
            let dim = 1usize << from.len();
            let mut m = DMatrix::zeros(dim, dim);
            let (mut fi, mut ti) = (0usize, 0usize);
            for j in 0..from.len() {
                fi |= (from[j] as usize) << j;
                ti |= (to[j] as usize) << j;
            }
            m[(ti, fi)] = 1.0;
            m
        };

        // |before><before| + |after><after|
        let mut m = embed_product(
            &support,
            &[
                (&gsup, gid.clone()),
                (&clock_qubits, proj_block(&before)),
            ],
        );
        m += embed_product(
            &support,
            &[(&gsup, gid.clone()), (&clock_qubits, proj_block(&after))],
        );
        // -R_t (x) (|after><before| + |before><after|)
        m -= embed_product(
            &support,
            &[
                (&gsup, gmat.clone()),
                (&clock_qubits, hop_block(&before, &after)),
            ],
        );
        m -= embed_product(
            &support,
            &[
                (&gsup, gmat.clone()),
                (&clock_qubits, hop_block(&after, &before)),
            ],
        );
        terms.push(LocalTerm::from_real(support, m)?);
    }

    let k = terms.iter().map(|t| t.arity()).max().unwrap_or(1);
    let hamiltonian = LocalHamiltonian::new(n + t_gates, k, terms)?;
    Ok(ClockInstance {
        hamiltonian,
        t_gates,
        coin_range: 0..circuit.r,
        ancilla_range: circuit.r..circuit.r + circuit.k_anc,
        witness_range: circuit.r + circuit.k_anc..n,
        clock_range: n..n + t_gates,
    })
}

/// Build the uniform history state for a given witness: the superposition
/// over `t = 0..=T` of (state after `t` gates) tensor (unary clock at `t`).
/// With `coins_superposed` the coin register starts in `|+>^r`, otherwise
/// in `|0...0>`. Normalized; annihilated by the hopping and clock terms.
pub fn build_history_state(
    circuit: &ReversibleCircuit,
    witness: u64,
    coins_superposed: bool,
) -> Result<Vec<f64>, StoqError> {
    circuit.validate()?;
    let n = circuit.n_wires();
    let t_gates = circuit.t_gates();
    let total = n + t_gates;
    if total > 14 {
        return Err(StoqError::CapacityExceeded { n: total, cap: 14 });
    }
    let dim = 1usize << total;
    let mut psi = vec![0.0f64; dim];
    let coin_states: Vec<u64> = if coins_superposed {
        (0..1u64 << circuit.r).collect()
    } else {
        vec![0]
    };
    let amp = 1.0 / ((coin_states.len() * (t_gates + 1)) as f64).sqrt();
    for &c in &coin_states {
        // classical propagation of this branch
        let mut state = c | (witness << (circuit.r + circuit.k_anc));
        let mut states = vec![state];
        for g in &circuit.gates {
            let c1 = (state >> g[0]) & 1;
            let c2 = (state >> g[1]) & 1;
            if c1 & c2 == 1 {
                state ^= 1u64 << g[2];
            }
            states.push(state);
        }
        for (t, &st) in states.iter().enumerate() {
            let clock_bits: u64 = ((1u64 << t) - 1) << n;
            psi[(st | clock_bits) as usize] += amp;
        }
    }
    Ok(psi)
}

/// `<psi|H|psi>` for a dense real state vector.
pub fn expectation(h: &LocalHamiltonian, psi: &[f64]) -> Result<f64, StoqError> {
    let m = crate::dense::materialize_real(h)?;
    let v = DMatrix::from_column_slice(psi.len(), 1, psi);
    Ok((v.transpose() * &m * &v)[(0, 0)])
}

/// Ground energy of the clock Hamiltonian and the circuit's best
/// acceptance probability over witnesses.
pub fn ground_energy(circuit: &ReversibleCircuit) -> Result<(f64, f64), StoqError> {
    let inst = build_clock_hamiltonian(circuit)?;
    let summary = exact::diagonalize_dense(&inst.hamiltonian)?;
    let max_acceptance = circuit
        .acceptance_operator()?
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok((summary.lambda0, max_acceptance))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toffoli-only circuit that copies coin 0 to the output wire:
    /// controls are coin 0 and a witness wire expected to carry 1.
    fn coin_copy() -> ReversibleCircuit {
        ReversibleCircuit {
            r: 1,
            k_anc: 1,
            s: 1,
            q_out: 1, // the ancilla
            gates: vec![[0, 2, 1], [0, 2, 1], [0, 2, 1]],
        }
    }

    #[test]
    fn acceptance_of_coin_copy() {
        // Three repetitions of the same Toffoli: net effect = one Toffoli.
        // With witness 1 the output copies the coin: acceptance 1/2.
        let c = coin_copy();
        assert_eq!(c.acceptance_probability(1).unwrap(), 0.5);
        assert_eq!(c.acceptance_probability(0).unwrap(), 0.0);
    }

    #[test]
    fn acceptance_and_of_two_coins() {
        // q_out = ancilla; Toffoli(coin0, coin1 -> anc): AND of two coins.
        let c = ReversibleCircuit {
            r: 2,
            k_anc: 1,
            s: 0,
            q_out: 2,
            gates: vec![[0, 1, 2], [0, 1, 2], [0, 1, 2]],
        };
        assert_eq!(c.acceptance_probability(0).unwrap(), 0.25);
    }

    #[test]
    fn acceptance_operator_and_witness() {
        // Toffoli(w0, w1 -> anc), output = anc: M = diag(0, 0, 0, 1).
        let c = ReversibleCircuit {
            r: 1,
            k_anc: 1,
            s: 2,
            q_out: 1,
            gates: vec![[2, 3, 1], [2, 3, 1], [2, 3, 1]],
        };
        assert_eq!(c.acceptance_operator().unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn acceptance_operator_constant_when_witness_ignored() {
        let c = ReversibleCircuit {
            r: 2,
            k_anc: 1,
            s: 1,
            q_out: 2,
            gates: vec![[0, 1, 2], [0, 1, 2], [0, 1, 2]],
        };
        let m = c.acceptance_operator().unwrap();
        assert_eq!(m, vec![0.25, 0.25]);
    }

    #[test]
    fn acceptance_matches_dense_quantum_verifier() {
        // Cross-check the diagonal operator against an explicit matrix
        // product simulation of the verifier on (coins ancillas witness).
        let c = ReversibleCircuit {
            r: 2,
            k_anc: 1,
            s: 2,
            q_out: 2,
            gates: vec![[3, 4, 2], [0, 1, 2], [0, 3, 2], [1, 4, 2]],
        };
        let n = c.n_wires();
        let dim = 1usize << n;
        // U as permutation, applied gate by gate
        let mut u: Vec<usize> = (0..dim).collect();
        for g in &c.gates {
            u = u
                .into_iter()
                .map(|x| {
                    let c1 = (x >> g[0]) & 1;
                    let c2 = (x >> g[1]) & 1;
                    if c1 & c2 == 1 {
                        x ^ (1usize << g[2])
                    } else {
                        x
                    }
                })
                .collect();
        }
        // amplitude over coins for each witness
        for z in 0..1u64 << c.s {
            let mut p = 0.0;
            for coins in 0..1usize << c.r {
                let input = coins | ((z as usize) << (c.r + c.k_anc));
                let out = u[input];
                if (out >> c.q_out) & 1 == 1 {
                    p += 1.0 / (1 << c.r) as f64;
                }
            }
            let direct = c.acceptance_probability(z).unwrap();
            assert!((p - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn clock_hamiltonian_is_stoquastic_and_local() {
        let inst = build_clock_hamiltonian(&coin_copy()).unwrap();
        let rep = inst.hamiltonian.check_stoquastic(true).unwrap();
        assert!(rep.is_stoquastic);
        assert!(inst.hamiltonian.k() <= 6);
    }

    #[test]
    fn t1_rejected() {
        let c = ReversibleCircuit {
            r: 1,
            k_anc: 1,
            s: 1,
            q_out: 1,
            gates: vec![[0, 2, 1]],
        };
        assert!(matches!(
            build_clock_hamiltonian(&c),
            Err(StoqError::InvalidCircuit(_))
        ));
    }

    #[test]
    fn history_state_annihilates_prop_and_clock() {
        let c = coin_copy();
        let inst = build_clock_hamiltonian(&c).unwrap();
        let psi = build_history_state(&c, 1, true).unwrap();
        let norm: f64 = psi.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        // Split H into families to verify each expectation separately.
        let n = c.n_wires();
        let h = &inst.hamiltonian;
        let prop_clock_terms: Vec<LocalTerm> = h
            .terms()
            .iter()
            .filter(|t| {
                let clocks = t.support.iter().filter(|&&q| q >= n).count();
                // hopping terms touch gate wires; clock penalties touch two clocks
                clocks == t.support.len() || t.support.len() > 2
            })
            .cloned()
            .collect();
        let hp = LocalHamiltonian::new(h.n(), h.k(), prop_clock_terms).unwrap();
        let e = expectation(&hp, &psi).unwrap();
        assert!(e.abs() < 1e-10, "H_prop + H_clock expectation {e}");

        // Full energy: coins superposed and ancillas zeroed annihilate
        // H_in; what remains is the output penalty, (1 - p_acc)/(T + 1).
        let e_full = expectation(h, &psi).unwrap();
        let p = c.acceptance_probability(1).unwrap();
        let expect = (1.0 - p) / (inst.t_gates as f64 + 1.0);
        assert!((e_full - expect).abs() < 1e-10);
        let eps = 1.0 - p;
        assert!(e_full <= eps + 1e-12);
    }

    #[test]
    fn perfect_acceptance_gives_zero_ground_energy() {
        // Two witness wires double-control the output: with witness 11
        // the circuit accepts every coin string, so lambda = 0 exactly.
        let c = ReversibleCircuit {
            r: 1,
            k_anc: 1,
            s: 2,
            q_out: 1,
            gates: vec![[2, 3, 1], [2, 3, 1], [2, 3, 1]],
        };
        assert_eq!(c.acceptance_probability(0b11).unwrap(), 1.0);
        let inst = build_clock_hamiltonian(&c).unwrap();
        let s = exact::diagonalize_dense(&inst.hamiltonian).unwrap();
        assert!(
            s.lambda0.abs() < 1e-10,
            "perfect acceptance: lambda {}",
            s.lambda0
        );
    }

    #[test]
    fn rejecting_circuit_has_energy_floor() {
        // Output never set: acceptance 0 for every witness.
        let c = ReversibleCircuit {
            r: 1,
            k_anc: 2,
            s: 1,
            q_out: 2,
            gates: vec![[0, 3, 1], [0, 3, 1]],
        };
        let m = c.acceptance_operator().unwrap();
        assert!(m.iter().all(|&p| p == 0.0));
        let (lambda0, max_acc) = ground_energy(&c).unwrap();
        assert_eq!(max_acc, 0.0);
        let t = c.t_gates() as f64;
        let c_measured = lambda0 * t * t * t / (1.0 - max_acc);
        assert!(c_measured > 0.0, "rejecting lambda {lambda0}");
    }
}
