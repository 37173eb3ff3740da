//! Instance builders shared by the criterion benchmarks.

use qcma_core::clock::{compile, LocalHamiltonian};
use qcma_core::idcheck::build_tilde;
use qcma_core::random::{accepting_verifier, random_circuit, seeded_rng};
use qcma_core::Circuit;

/// A reproducible random circuit sized for throughput runs.
pub fn bench_circuit(num_qubits: usize, gates: usize) -> Circuit {
    random_circuit(num_qubits, gates, &mut seeded_rng(0xBE7C))
}

/// A compiled accepting instance with roughly `work + prefix-driven` clock
/// qubits, for matvec and eigensolver runs.
pub fn bench_hamiltonian(prefix_gates: usize) -> LocalHamiltonian {
    let mut rng = seeded_rng(0xBE7C);
    let v = accepting_verifier(2, 1, 0b01, prefix_gates, 0.05, &mut rng);
    compile(&build_tilde(&v).expect("tilde builds")).expect("compiles")
}
