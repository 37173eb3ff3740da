//! Seeded generators for circuits, states, and verifier corpora.
//!
//! Everything here is deterministic given the RNG, so test corpora and CLI
//! runs can be reproduced from a single seed.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind, VerifierSpec};
use crate::sim::StateVector;

/// The fixed-seed RNG used throughout tests and the CLI.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random gate on distinct qubits of an `num_qubits`-wire register,
/// occasionally with one extra control of random polarity.
pub fn random_gate(num_qubits: usize, rng: &mut impl Rng) -> Gate {
    let mut order: Vec<usize> = (0..num_qubits).collect();
    order.shuffle(rng);

    let max_arity = num_qubits.min(3);
    let kind = loop {
        let k = match rng.gen_range(0..9) {
            0 => GateKind::H,
            1 => GateKind::X,
            2 => GateKind::T,
            3 => GateKind::Tdg,
            4 => GateKind::S,
            5 => GateKind::Sdg,
            6 => GateKind::Cx,
            7 => GateKind::Ccx,
            _ => GateKind::Ry(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)),
        };
        if k.arity() <= max_arity {
            break k;
        }
    };
    let arity = kind.arity();
    let targets = order[..arity].to_vec();
    let mut controls = Vec::new();
    if num_qubits > arity && rng.gen_bool(0.15) {
        controls.push((order[arity], rng.gen_bool(0.5)));
    }
    Gate::with_controls(kind, targets, controls)
}

/// A random circuit with `num_gates` gates.
pub fn random_circuit(num_qubits: usize, num_gates: usize, rng: &mut impl Rng) -> Circuit {
    let gates = (0..num_gates).map(|_| random_gate(num_qubits, rng)).collect();
    Circuit::with_gates(num_qubits, gates)
}

/// A random unit-norm state (component-wise uniform, then normalized).
pub fn random_state(num_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let dim = 1usize << num_qubits;
    let mut amplitudes: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    StateVector::from_amplitudes(amplitudes).expect("normalized by construction")
}

/// A random verifier: `gates` random gates, a random output qubit, epsilon 0.
pub fn random_verifier(
    n_input: usize,
    m_ancilla: usize,
    gates: usize,
    rng: &mut impl Rng,
) -> VerifierSpec {
    let total = n_input + m_ancilla;
    let circuit = random_circuit(total, gates, rng);
    let output_qubit = rng.gen_range(0..total);
    VerifierSpec::new(n_input, m_ancilla, output_qubit, 0.0, circuit)
        .expect("generated verifier is valid")
}

/// A verifier that accepts exactly the basis witness `y`, built as a random
/// prefix, its inverse, and a detector that flips the output ancilla when
/// the input register equals `y`. With `alpha != 0` a final `Ry(2*alpha)`
/// on the output makes the witness acceptance `cos^2(alpha)` instead of 1
/// (and every other basis input accepted with `sin^2(alpha)`).
///
/// The spec's `epsilon` field is set to the exact `sin^2(alpha)`.
pub fn accepting_verifier(
    n_input: usize,
    m_ancilla: usize,
    witness: usize,
    prefix_gates: usize,
    alpha: f64,
    rng: &mut impl Rng,
) -> VerifierSpec {
    assert!(m_ancilla >= 1, "detector needs an output ancilla");
    assert!(witness < 1 << n_input);
    let total = n_input + m_ancilla;
    let output = n_input;

    let prefix = random_circuit(total, prefix_gates, rng);
    let mut circuit = prefix.then(&prefix.inverse()).expect("same width");

    let controls = (0..n_input)
        .map(|i| (i, (witness >> i) & 1 == 1))
        .collect();
    circuit.push(Gate::with_controls(GateKind::X, vec![output], controls));

    if alpha != 0.0 {
        circuit.push(Gate::new(GateKind::Ry(2.0 * alpha), vec![output]));
    }

    let epsilon = alpha.sin().powi(2);
    VerifierSpec::new(n_input, m_ancilla, output, epsilon, circuit)
        .expect("generated verifier is valid")
}

/// A verifier that rejects every basis input with probability at least
/// `1 - sin^2(alpha)`: random gates that never touch the output ancilla,
/// then a single `Ry(2*alpha)` on the output. Every basis input is accepted
/// with exactly `sin^2(alpha)`.
pub fn rejecting_verifier(
    n_input: usize,
    m_ancilla: usize,
    gates: usize,
    alpha: f64,
    rng: &mut impl Rng,
) -> VerifierSpec {
    assert!(m_ancilla >= 1, "needs an output ancilla");
    let total = n_input + m_ancilla;
    let output = n_input;

    // Random circuit on the other wires, remapped to skip the output qubit.
    let others: Vec<usize> = (0..total).filter(|&q| q != output).collect();
    let inner = random_circuit(total - 1, gates, rng);
    let mut circuit = inner.embed(&others, total).expect("injective skip map");

    if alpha != 0.0 {
        circuit.push(Gate::new(GateKind::Ry(2.0 * alpha), vec![output]));
    }

    let epsilon = alpha.sin().powi(2);
    VerifierSpec::new(n_input, m_ancilla, output, epsilon, circuit)
        .expect("generated verifier is valid")
}

/// A verifier accepting every basis input with exactly probability `p`: a
/// single rotation on the output ancilla, after `gates` random gates on the
/// other wires. The epsilon field gets the distance from determinism
/// `min(p, 1-p)`, clamped into the legal range.
pub fn uniform_acceptance_verifier(
    n_input: usize,
    m_ancilla: usize,
    gates: usize,
    p: f64,
    rng: &mut impl Rng,
) -> VerifierSpec {
    assert!(m_ancilla >= 1, "needs an output ancilla");
    assert!((0.0..=1.0).contains(&p));
    let total = n_input + m_ancilla;
    let output = n_input;

    let others: Vec<usize> = (0..total).filter(|&q| q != output).collect();
    let inner = random_circuit(total - 1, gates, rng);
    let mut circuit = inner.embed(&others, total).expect("injective skip map");
    let alpha = p.sqrt().asin();
    circuit.push(Gate::new(GateKind::Ry(2.0 * alpha), vec![output]));

    let epsilon = p.min(1.0 - p).min(1.0 / 3.0);
    VerifierSpec::new(n_input, m_ancilla, output, epsilon, circuit)
        .expect("generated verifier is valid")
}
