//! Size caps for dense and brute-force work.
//!
//! Dense matrices and exhaustive basis sweeps are capped so that a stray
//! large input fails fast instead of exhausting memory. The CLI lets the
//! `QCMA_MAX_DENSE_QUBITS` environment variable raise or lower both caps.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Default cap for building full unitaries and for brute-force basis sweeps.
pub const DEFAULT_UNITARY_QUBITS: usize = 12;
/// Default cap for dense Hermitian work (matrix dimension `2^n`).
pub const DEFAULT_HERMITIAN_QUBITS: usize = 14;

static UNITARY_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_UNITARY_QUBITS);
static HERMITIAN_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_HERMITIAN_QUBITS);

/// Current cap for unitary matrices and basis sweeps.
pub fn max_unitary_qubits() -> usize {
    UNITARY_QUBITS.load(Ordering::Relaxed)
}

/// Current cap for dense Hermitian matrices.
pub fn max_hermitian_qubits() -> usize {
    HERMITIAN_QUBITS.load(Ordering::Relaxed)
}

/// Overrides both caps with the same qubit count.
pub fn set_max_dense_qubits(qubits: usize) {
    UNITARY_QUBITS.store(qubits, Ordering::Relaxed);
    HERMITIAN_QUBITS.store(qubits, Ordering::Relaxed);
}
