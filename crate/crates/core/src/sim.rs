//! Exact statevector simulation.
//!
//! States live in `C^(2^n)` with qubit 0 as the least significant bit of the
//! basis index. Gate application is matrix-free: each gate touches pairs of
//! amplitudes in place, controls gate which pairs. States are never
//! renormalized behind the caller's back; if the norm drifts past `1e-8`
//! something is broken and the operation fails instead.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind, VerifierSpec};
use crate::error::{Error, Result};
use crate::limits;

const NORM_TOL: f64 = 1e-8;

/// A unit-norm state on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, checking the length is a power of
    /// two and the norm is 1 within `1e-8`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(1),
                got: len,
            });
        }
        let num_qubits = len.trailing_zeros() as usize;
        let state = StateVector {
            num_qubits,
            amplitudes,
        };
        state.check_norm()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Probability of measuring `qubit` in `|1>`.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn check_norm(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NormDrift { norm: n });
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// The computational basis state `|index>` on `num_qubits` qubits.
pub fn basis_state(num_qubits: usize, index: usize) -> Result<StateVector> {
    let dim = 1usize << num_qubits;
    if index >= dim {
        return Err(Error::IndexOutOfRange {
            index,
            num_qubits,
        });
    }
    let mut amplitudes = vec![Complex64::ZERO; dim];
    amplitudes[index] = Complex64::ONE;
    Ok(StateVector {
        num_qubits,
        amplitudes,
    })
}

/// The 2x2 matrix of a single-qubit kind, row-major `[u00, u01, u10, u11]`.
fn base_matrix(kind: GateKind) -> [Complex64; 4] {
    let zero = Complex64::ZERO;
    let one = Complex64::ONE;
    match kind {
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [h, h, h, -h]
        }
        GateKind::X => [zero, one, one, zero],
        GateKind::T => [one, zero, zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        GateKind::Tdg => [one, zero, zero, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)],
        GateKind::S => [one, zero, zero, Complex64::new(0.0, 1.0)],
        GateKind::Sdg => [one, zero, zero, Complex64::new(0.0, -1.0)],
        GateKind::Ry(theta) => {
            let c = Complex64::new((theta / 2.0).cos(), 0.0);
            let s = Complex64::new((theta / 2.0).sin(), 0.0);
            [c, -s, s, c]
        }
        GateKind::Cx | GateKind::Ccx => unreachable!("canonicalized before lookup"),
    }
}

/// Applies one gate in place. Pairs `(i, i|1<<t)` with all controls matching
/// their polarity get the 2x2 update; everything else is untouched.
pub(crate) fn apply_gate_in_place(amplitudes: &mut [Complex64], gate: &Gate) {
    let (base, target, controls) = gate.canonical();
    let [u00, u01, u10, u11] = base_matrix(base);
    let step = 1usize << target;
    let len = amplitudes.len();
    let mut i = 0;
    while i < len {
        for offset in i..i + step {
            if controls
                .iter()
                .all(|&(q, p)| ((offset >> q) & 1 == 1) == p)
            {
                let j = offset;
                let k = offset | step;
                let a = amplitudes[j];
                let b = amplitudes[k];
                amplitudes[j] = u00 * a + u01 * b;
                amplitudes[k] = u10 * a + u11 * b;
            }
        }
        i += 2 * step;
    }
}

/// Applies a single validated gate, checking dimensions and that the norm
/// survived.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    gate.validate(state.num_qubits)?;
    let mut amplitudes = state.amplitudes.clone();
    apply_gate_in_place(&mut amplitudes, gate);
    let out = StateVector {
        num_qubits: state.num_qubits,
        amplitudes,
    };
    out.check_norm()?;
    Ok(out)
}

/// Runs a whole circuit on `state`. The norm is checked once at the end.
pub fn run(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits != state.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: circuit.num_qubits,
            got: state.num_qubits,
        });
    }
    circuit.validate()?;
    let mut amplitudes = state.amplitudes.clone();
    for gate in &circuit.gates {
        apply_gate_in_place(&mut amplitudes, gate);
    }
    let out = StateVector {
        num_qubits: circuit.num_qubits,
        amplitudes,
    };
    out.check_norm()?;
    Ok(out)
}

/// Runs the circuit on `|z>` and reads back amplitude `z`: the diagonal
/// matrix element `<z|C|z>`.
pub fn diagonal_overlap(circuit: &Circuit, z: usize) -> Result<Complex64> {
    let state = basis_state(circuit.num_qubits, z)?;
    let out = run(circuit, &state)?;
    Ok(out.amplitude(z))
}

/// Probability that the verifier accepts the basis input `|y>` (ancillas
/// start at `|0...0>`): P(output qubit = 1) after the circuit runs.
pub fn acceptance_probability(verifier: &VerifierSpec, y: usize) -> Result<f64> {
    verifier.validate()?;
    if y >= 1usize << verifier.n_input {
        return Err(Error::IndexOutOfRange {
            index: y,
            num_qubits: verifier.n_input,
        });
    }
    // Input qubits are the low bits, ancillas zero: global index is y itself.
    let state = basis_state(verifier.num_qubits(), y)?;
    let out = run(&verifier.circuit, &state)?;
    // Rounding can push the partial sum a few ulps outside [0, 1].
    Ok(out.probability_one(verifier.output_qubit)?.clamp(0.0, 1.0))
}

/// Sweep of [`acceptance_probability`] over every basis input, returning
/// the best witness and its acceptance. Ties go to the smallest witness.
pub fn max_basis_acceptance(verifier: &VerifierSpec) -> Result<(usize, f64)> {
    let n = verifier.n_input;
    let cap = limits::max_unitary_qubits();
    if verifier.num_qubits() > cap {
        return Err(Error::TooLarge {
            what: "verifier qubits",
            got: verifier.num_qubits(),
            limit: cap,
        });
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for y in 0..1usize << n {
        let p = acceptance_probability(verifier, y)?;
        if p > best.1 {
            best = (y, p);
        }
    }
    Ok(best)
}

/// The Hermitian operator `M` on the input register with
/// `<psi|M|psi> = ` acceptance probability of input `psi`. Its eigenvalues
/// lie in `[0, 1]`; diagonal entries are the basis-state acceptances.
pub fn acceptance_operator(verifier: &VerifierSpec) -> Result<DMatrix<Complex64>> {
    verifier.validate()?;
    let total = verifier.num_qubits();
    let cap = limits::max_hermitian_qubits();
    if total > cap {
        return Err(Error::TooLarge {
            what: "verifier qubits",
            got: total,
            limit: cap,
        });
    }
    let n = verifier.n_input;
    let dim_in = 1usize << n;
    let out_mask = 1usize << verifier.output_qubit;

    // Column y of the full evolution restricted to zeroed ancillas.
    let mut columns = Vec::with_capacity(dim_in);
    for y in 0..dim_in {
        let state = basis_state(total, y)?;
        columns.push(run(&verifier.circuit, &state)?);
    }

    // M[y1][y2] = <U(y1,0)| P1 |U(y2,0)>, summing only indices with the
    // output bit set.
    let mut m = DMatrix::zeros(dim_in, dim_in);
    for y1 in 0..dim_in {
        for y2 in y1..dim_in {
            let mut acc = Complex64::ZERO;
            for (i, (a, b)) in columns[y1]
                .amplitudes()
                .iter()
                .zip(columns[y2].amplitudes())
                .enumerate()
            {
                if i & out_mask != 0 {
                    acc += a.conj() * b;
                }
            }
            m[(y1, y2)] = acc;
            m[(y2, y1)] = acc.conj();
        }
    }
    Ok(m)
}

/// Dense unitary of the circuit: column `j` is the circuit run on `|j>`.
pub fn unitary_matrix(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let cap = limits::max_unitary_qubits();
    if circuit.num_qubits > cap {
        return Err(Error::TooLarge {
            what: "circuit qubits",
            got: circuit.num_qubits,
            limit: cap,
        });
    }
    circuit.validate()?;
    let dim = 1usize << circuit.num_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = run(circuit, &basis_state(circuit.num_qubits, j)?)?;
        for (i, a) in col.amplitudes().iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    Ok(m)
}
