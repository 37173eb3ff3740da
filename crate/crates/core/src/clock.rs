//! Verifier circuits compiled into clock Hamiltonians, history states, and
//! their preparation circuits.
//!
//! A verifier with `w` work qubits and gates `U_1..U_L` compiles to a
//! Hamiltonian on `w + L` qubits. The extra `L` qubits form a unary clock:
//! time step `j` is the clock basis state with qubits `c_1..c_j` set, i.e.
//! the local index `2^j - 1`. The terms are
//!
//! - `H_in`: `|1><1|_a (x) |0><0|_{c_1}` per ancilla — uninitialized
//!   ancillas cost energy at time 0; the input register stays free;
//! - `H_out`: `|0><0|_out (x) |1><1|_{c_L}` — rejection costs energy at
//!   time `L`;
//! - `H_prop`: for each `j`, `(1/2)(|100><100| + |110><110| - |110><100| (x)
//!   U_j - |100><110| (x) U_j†)` on the clock triple `(c_{j-1}, c_j,
//!   c_{j+1})` and the gate's qubits, with two-qubit boundary forms at
//!   `j = 1` and `j = L` — adjacent time steps must be related by the gate;
//! - `H_clock`: `|01><01|` on each adjacent clock pair — non-unary clock
//!   strings cost energy.
//!
//! The uniform superposition over partial computations (the history state)
//! is annihilated by `H_prop` and `H_clock`, so its energy is exactly the
//! rejection probability split over `L + 1` time steps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind, VerifierSpec};
use crate::error::{Error, Result};
use crate::idcheck::{search_prepared_states, SEARCH_MAX_GATES, SEARCH_MAX_QUBITS};
use crate::limits;
use crate::sim::{self, StateVector};
use crate::spectral::{dense_spectrum, lanczos_extreme, Extremum};

/// Smallest usable promise gap `b - a`.
pub const MIN_ENERGY_GAP: f64 = 1e-9;

/// One Hermitian term acting on an ordered subset of qubits. `qubits[0]` is
/// the least significant bit of the local matrix index.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    pub qubits: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl LocalTerm {
    pub fn new(qubits: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for &q in &qubits {
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit { qubit: q });
            }
        }
        let mut deviation = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(LocalTerm { qubits, matrix })
    }

    /// Locality of the term.
    pub fn weight(&self) -> usize {
        self.qubits.len()
    }

    /// Accumulates `matrix (x) identity` applied to `state` into `out`.
    fn accumulate(&self, state: &[Complex64], out: &mut [Complex64]) {
        let k = self.qubits.len();
        let local_dim = 1usize << k;
        let full_mask: usize = self.qubits.iter().map(|&q| 1usize << q).sum();

        // Iterate over base indices with all term-qubit bits clear and
        // scatter the local block action from there.
        let mut scatter = vec![0usize; local_dim];
        for (pattern, slot) in scatter.iter_mut().enumerate() {
            let mut bits = 0usize;
            for (pos, &q) in self.qubits.iter().enumerate() {
                if (pattern >> pos) & 1 == 1 {
                    bits |= 1 << q;
                }
            }
            *slot = bits;
        }

        let dim = state.len();
        let mut base = 0usize;
        while base < dim {
            if base & full_mask == 0 {
                for row in 0..local_dim {
                    let mut acc = Complex64::ZERO;
                    for col in 0..local_dim {
                        let entry = self.matrix[(row, col)];
                        if entry != Complex64::ZERO {
                            acc += entry * state[base | scatter[col]];
                        }
                    }
                    out[base | scatter[row]] += acc;
                }
            }
            base += 1;
        }
    }
}

/// Where the clock register sits: `w` work qubits first, then `L` clock
/// qubits. Clock qubit `c_j` (for `j` in `1..=L`) is global qubit
/// `w + j - 1`; time step `j` is clock index `2^j - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockLayout {
    pub w: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

impl ClockLayout {
    /// Global index of clock qubit `c_j`, `j` in `1..=L`.
    pub fn clock_qubit(&self, j: usize) -> usize {
        debug_assert!((1..=self.l).contains(&j));
        self.w + j - 1
    }

    /// Global basis index with work part `work` at time step `j`.
    pub fn global_index(&self, work: usize, j: usize) -> usize {
        debug_assert!(j <= self.l);
        work | (((1usize << j) - 1) << self.w)
    }

    pub fn total_qubits(&self) -> usize {
        self.w + self.l
    }
}

/// A sum of local Hermitian terms with matrix-free action.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    pub num_qubits: usize,
    pub terms: Vec<LocalTerm>,
    pub layout: Option<ClockLayout>,
}

impl LocalHamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        for term in &terms {
            for &q in &term.qubits {
                if q >= num_qubits {
                    return Err(Error::IndexOutOfRange {
                        index: q,
                        num_qubits,
                    });
                }
            }
        }
        Ok(LocalHamiltonian {
            num_qubits,
            terms,
            layout: None,
        })
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    /// Largest term weight.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(LocalTerm::weight).max().unwrap_or(0)
    }

    /// `H * v` as a raw (unnormalized) amplitude vector. Terms accumulate
    /// in construction order, so results are reproducible bit for bit.
    pub fn matvec(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.len(),
            });
        }
        let mut out = vec![Complex64::ZERO; state.len()];
        for term in &self.terms {
            term.accumulate(state, &mut out);
        }
        Ok(out)
    }

    /// `<psi|H|psi>`. The imaginary part must vanish; if it does not, the
    /// term list is corrupt.
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        let hv = self.matvec(state.amplitudes())?;
        let value = sim::inner(state.amplitudes(), &hv);
        if value.im.abs() > 1e-10 {
            return Err(Error::NonHermitianDetected { imaginary: value.im });
        }
        Ok(value.re)
    }

    /// Materializes the full matrix. Capped by the dense Hermitian limit.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let cap = limits::max_hermitian_qubits();
        if self.num_qubits > cap {
            return Err(Error::TooLarge {
                what: "hamiltonian qubits",
                got: self.num_qubits,
                limit: cap,
            });
        }
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let mut column = vec![Complex64::ZERO; dim];
        for j in 0..dim {
            column.fill(Complex64::ZERO);
            column[j] = Complex64::ONE;
            let out = self.matvec(&column)?;
            for (i, a) in out.into_iter().enumerate() {
                m[(i, j)] = a;
            }
        }
        Ok(m)
    }

    /// Smallest eigenvalue: dense below the cap, seeded Lanczos above it.
    pub fn lambda_min(&self, seed: u64) -> Result<f64> {
        if self.num_qubits <= limits::max_hermitian_qubits().min(10) {
            Ok(dense_spectrum(&self.to_dense()?)?[0])
        } else {
            let result = lanczos_extreme(
                |v| self.matvec(v).expect("dimension checked"),
                self.dim(),
                Extremum::Min,
                1e-9,
                500,
                seed,
            )?;
            Ok(result.value)
        }
    }

    /// JSON document form with explicit real/imaginary entry pairs.
    pub fn to_json(&self) -> String {
        let doc = HamiltonianDoc {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| TermDoc {
                    qubits: t.qubits.clone(),
                    matrix: t
                        .matrix
                        .row_iter()
                        .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
                        .collect(),
                })
                .collect(),
            clock: self.layout,
        };
        serde_json::to_string_pretty(&doc).expect("hamiltonian doc serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: HamiltonianDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            message: e.to_string(),
        })?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let dim = 1usize << t.qubits.len();
            if t.matrix.len() != dim || t.matrix.iter().any(|row| row.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.matrix.len(),
                });
            }
            let matrix = DMatrix::from_fn(dim, dim, |i, j| {
                Complex64::new(t.matrix[i][j][0], t.matrix[i][j][1])
            });
            terms.push(LocalTerm::new(t.qubits, matrix)?);
        }
        let mut h = LocalHamiltonian::new(doc.num_qubits, terms)?;
        h.layout = doc.clock;
        Ok(h)
    }
}

#[derive(Serialize, Deserialize)]
struct HamiltonianDoc {
    num_qubits: usize,
    terms: Vec<TermDoc>,
    clock: Option<ClockLayout>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    qubits: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn projector(bits: &[(usize, bool)], qubits: &[usize]) -> DMatrix<Complex64> {
    let dim = 1usize << qubits.len();
    let mut m = DMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let matches = bits.iter().all(|&(q, val)| {
            let pos = qubits.iter().position(|&x| x == q).expect("qubit in term");
            ((idx >> pos) & 1 == 1) == val
        });
        if matches {
            m[(idx, idx)] = Complex64::ONE;
        }
    }
    m
}

/// Dense unitary of a single gate on its own support, `support[0]` least
/// significant.
fn gate_unitary_on_support(gate: &Gate, support: &[usize]) -> DMatrix<Complex64> {
    let k = support.len();
    let dim = 1usize << k;
    // Run the gate remapped onto a k-qubit register through the simulator.
    let position: Vec<usize> = gate
        .support()
        .map(|q| support.iter().position(|&x| x == q).expect("in support"))
        .collect();
    let mut local_targets = Vec::new();
    let mut local_controls = Vec::new();
    let nt = gate.targets.len();
    for (i, &pos) in position.iter().enumerate() {
        if i < nt {
            local_targets.push(pos);
        } else {
            local_controls.push((pos, gate.controls[i - nt].1));
        }
    }
    let local = Gate::with_controls(gate.kind, local_targets, local_controls);
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::ZERO; dim];
        amps[col] = Complex64::ONE;
        sim::apply_gate_in_place(&mut amps, &local);
        for (row, a) in amps.into_iter().enumerate() {
            m[(row, col)] = a;
        }
    }
    m
}

/// One propagation term: `(1/2)(P_{j-1} + P_j - T_j (x) U_j - T_j† (x) U_j†)`
/// where `P` projects the participating clock qubits onto time `j-1`/`j`
/// and `T_j` hops the clock forward one step.
fn propagation_term(
    layout: &ClockLayout,
    j: usize,
    gate: &Gate,
) -> LocalTerm {
    let l = layout.l;
    // Participating clock qubits and their required bit patterns at times
    // j-1 and j, in (qubit, value) form.
    let mut clock_qubits = Vec::new();
    if j > 1 {
        clock_qubits.push(layout.clock_qubit(j - 1));
    }
    clock_qubits.push(layout.clock_qubit(j));
    if j < l {
        clock_qubits.push(layout.clock_qubit(j + 1));
    }

    let before: Vec<(usize, bool)> = clock_qubits
        .iter()
        .map(|&q| (q, q < layout.clock_qubit(j)))
        .collect();
    let after: Vec<(usize, bool)> = clock_qubits
        .iter()
        .map(|&q| (q, q <= layout.clock_qubit(j)))
        .collect();

    let gate_support: Vec<usize> = gate.support().collect();
    let mut qubits = gate_support.clone();
    qubits.extend(&clock_qubits);

    let p_before = projector(&before, &qubits);
    let p_after = projector(&after, &qubits);

    // Transition |after><before| on clock qubits, tensored with the gate on
    // its support.
    let u = gate_unitary_on_support(gate, &gate_support);
    let dim = 1usize << qubits.len();
    let gate_bits = gate_support.len();
    let gate_mask = (1usize << gate_bits) - 1;
    let mut hop = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let clock_part = col >> gate_bits;
        let matches_before = before.iter().all(|&(q, val)| {
            let pos = clock_qubits.iter().position(|&x| x == q).unwrap();
            ((clock_part >> pos) & 1 == 1) == val
        });
        if !matches_before {
            continue;
        }
        let mut after_part = 0usize;
        for (pos, &(_, val)) in after.iter().enumerate() {
            if val {
                after_part |= 1 << pos;
            }
        }
        for g_row in 0..=gate_mask {
            let entry = u[(g_row, col & gate_mask)];
            if entry != Complex64::ZERO {
                hop[((after_part << gate_bits) | g_row, col)] = entry;
            }
        }
    }

    let half = Complex64::new(0.5, 0.0);
    let matrix = (p_before + p_after - &hop - hop.adjoint()).scale(half.re);
    LocalTerm::new(qubits, matrix).expect("propagation term is Hermitian")
}

/// Compiles a verifier into its clock Hamiltonian
/// `H_in + H_out + H_prop + H_clock` on `w + L` qubits. The term count is
/// `m + 1 + L + (L - 1)`.
pub fn compile(verifier: &VerifierSpec) -> Result<LocalHamiltonian> {
    verifier.validate()?;
    let l = verifier.circuit.len();
    if l == 0 {
        return Err(Error::EmptyCircuit);
    }
    let layout = ClockLayout {
        w: verifier.num_qubits(),
        l,
    };
    let total = layout.total_qubits();
    let c1 = layout.clock_qubit(1);
    let c_last = layout.clock_qubit(l);

    let mut terms = Vec::new();

    // H_in: each ancilla must be |0> at time 0. The input register is left
    // unconstrained; its content is the witness.
    for a in verifier.ancilla_qubits() {
        let qubits = vec![a, c1];
        let matrix = projector(&[(a, true), (c1, false)], &qubits);
        terms.push(LocalTerm::new(qubits, matrix)?);
    }

    // H_out: output must not be |0> at time L.
    {
        let out = verifier.output_qubit;
        let qubits = vec![out, c_last];
        let matrix = projector(&[(out, false), (c_last, true)], &qubits);
        terms.push(LocalTerm::new(qubits, matrix)?);
    }

    // H_prop: one term per gate.
    for (idx, gate) in verifier.circuit.gates.iter().enumerate() {
        terms.push(propagation_term(&layout, idx + 1, gate));
    }

    // H_clock: forbid 0 -> 1 rises along the unary string.
    for j in 1..l {
        let qa = layout.clock_qubit(j);
        let qb = layout.clock_qubit(j + 1);
        let qubits = vec![qa, qb];
        let matrix = projector(&[(qa, false), (qb, true)], &qubits);
        terms.push(LocalTerm::new(qubits, matrix)?);
    }

    let mut h = LocalHamiltonian::new(total, terms)?;
    h.layout = Some(layout);
    Ok(h)
}

/// The history state: the normalized superposition over all `L + 1` partial
/// computations of the verifier on `input_state` (a `w`-qubit state),
/// each tagged with its unary clock value.
pub fn history_state(verifier: &VerifierSpec, input_state: &StateVector) -> Result<StateVector> {
    verifier.validate()?;
    let w = verifier.num_qubits();
    if input_state.num_qubits() != w {
        return Err(Error::DimensionMismatch {
            expected: w,
            got: input_state.num_qubits(),
        });
    }
    let l = verifier.circuit.len();
    let layout = ClockLayout { w, l };
    let dim = 1usize << layout.total_qubits();
    let weight = Complex64::from(1.0 / ((l + 1) as f64).sqrt());

    let mut amplitudes = vec![Complex64::ZERO; dim];
    let mut work = input_state.amplitudes().to_vec();
    for j in 0..=l {
        if j > 0 {
            sim::apply_gate_in_place(&mut work, &verifier.circuit.gates[j - 1]);
        }
        for (idx, &a) in work.iter().enumerate() {
            amplitudes[layout.global_index(idx, j)] = weight * a;
        }
    }
    StateVector::from_amplitudes(amplitudes)
}

/// A circuit preparing the history state of `verifier` on witness `y` from
/// `|0...0>`: X gates write the witness, a staircase of controlled
/// rotations lays the uniform unary clock superposition, and each gate runs
/// controlled on its own clock qubit. Gate count is at most
/// `n_input + 2 * L`.
pub fn history_prep_circuit(verifier: &VerifierSpec, y: usize) -> Result<Circuit> {
    verifier.validate()?;
    if y >= 1usize << verifier.n_input {
        return Err(Error::IndexOutOfRange {
            index: y,
            num_qubits: verifier.n_input,
        });
    }
    let w = verifier.num_qubits();
    let l = verifier.circuit.len();
    let layout = ClockLayout { w, l };
    let mut circuit = Circuit::new(layout.total_qubits());

    for i in 0..verifier.n_input {
        if (y >> i) & 1 == 1 {
            circuit.push(Gate::new(GateKind::X, vec![i]));
        }
    }

    // Staircase: after step j the unary strings 0..j each hold amplitude
    // 1/sqrt(L+1) and the all-set-so-far branch carries the rest. The angle
    // cos(theta_j) = 1/sqrt(L + 2 - j) peels off exactly one more string.
    for j in 1..=l {
        let theta = (1.0 / ((l + 2 - j) as f64).sqrt()).acos();
        let target = layout.clock_qubit(j);
        if j == 1 {
            circuit.push(Gate::new(GateKind::Ry(2.0 * theta), vec![target]));
        } else {
            circuit.push(Gate::with_controls(
                GateKind::Ry(2.0 * theta),
                vec![target],
                vec![(layout.clock_qubit(j - 1), true)],
            ));
        }
    }

    // Unary encoding makes "time >= j" a single-qubit condition, so each
    // gate needs only one extra control.
    for (idx, gate) in verifier.circuit.gates.iter().enumerate() {
        let mut controlled = gate.clone();
        controlled.controls.push((layout.clock_qubit(idx + 1), true));
        circuit.push(controlled);
    }
    Ok(circuit)
}

/// A low-complexity low-energy instance: decide whether some circuit of at
/// most `k` gates prepares a state of energy at most `a`, or every such
/// circuit stays at energy at least `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowEnergyInstance {
    pub hamiltonian: LocalHamiltonian,
    pub a: f64,
    pub b: f64,
    pub k: usize,
}

impl LowEnergyInstance {
    pub fn new(hamiltonian: LocalHamiltonian, a: f64, b: f64, k: usize) -> Result<Self> {
        if b - a < MIN_ENERGY_GAP {
            return Err(Error::GapTooSmall {
                gap: b - a,
                min: MIN_ENERGY_GAP,
            });
        }
        Ok(LowEnergyInstance {
            hamiltonian,
            a,
            b,
            k,
        })
    }
}

/// Outcome of a low-energy decision.
#[derive(Debug, Clone, PartialEq)]
pub enum LowEnergyDecision {
    /// A circuit within the gate budget reaches energy `<= a`.
    Case1 { witness: Circuit, energy: f64 },
    /// Every circuit within the budget stays at energy `>= b`.
    Case2,
    /// Exhaustive search ran and the best energy landed inside `(a, b)`.
    PromiseViolated { best_energy: f64 },
    /// The instance is too large to search and the spectrum alone cannot
    /// decide: `lambda_min < b` says nothing about low-complexity states.
    Unknown { lambda_min: f64 },
}

/// Decides a low-energy instance. Small systems (at most
/// [`SEARCH_MAX_QUBITS`] qubits, budget at most [`SEARCH_MAX_GATES`]) are
/// searched exhaustively, which settles either case exactly. Larger systems
/// fall back to the spectral certificate: `lambda_min >= b` proves case 2
/// for states of any complexity.
pub fn decide_low_energy(instance: &LowEnergyInstance, seed: u64) -> Result<LowEnergyDecision> {
    let h = &instance.hamiltonian;

    if h.num_qubits <= SEARCH_MAX_QUBITS && instance.k <= SEARCH_MAX_GATES {
        let mut best_energy = f64::INFINITY;
        let mut best_gates: Vec<Gate> = Vec::new();
        let hit = search_prepared_states(h.num_qubits, instance.k, |gates, state| {
            let hv = h.matvec(state).expect("dimension fixed");
            let energy = sim::inner(state, &hv).re;
            if energy < best_energy {
                best_energy = energy;
                best_gates = gates.to_vec();
            }
            energy <= instance.a
        });
        return Ok(match hit {
            Some(witness) => LowEnergyDecision::Case1 {
                witness,
                energy: best_energy,
            },
            None if best_energy >= instance.b => LowEnergyDecision::Case2,
            None => LowEnergyDecision::PromiseViolated { best_energy },
        });
    }

    let lambda_min = h.lambda_min(seed)?;
    if lambda_min >= instance.b {
        Ok(LowEnergyDecision::Case2)
    } else {
        Ok(LowEnergyDecision::Unknown { lambda_min })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idcheck::build_tilde;
    use crate::random::{accepting_verifier, random_state, seeded_rng};
    use crate::sim::{acceptance_probability, basis_state};

    fn x_verifier() -> VerifierSpec {
        // One gate, no ancillas: accepts its only input |0> by flipping it.
        VerifierSpec::new(
            1,
            0,
            0,
            0.0,
            Circuit::with_gates(1, vec![Gate::new(GateKind::X, vec![0])]),
        )
        .unwrap()
    }

    #[test]
    fn compile_rejects_empty_circuit() {
        let v = VerifierSpec::new(1, 0, 0, 0.0, Circuit::new(1)).unwrap();
        assert!(matches!(compile(&v), Err(Error::EmptyCircuit)));
    }

    #[test]
    fn compile_term_count_and_locality() {
        let mut rng = seeded_rng(61);
        let v = crate::random::random_verifier(2, 2, 7, &mut rng);
        let h = compile(&v).unwrap();
        let l = v.circuit.len();
        assert_eq!(h.terms.len(), v.m_ancilla + 1 + l + (l - 1));
        assert_eq!(h.num_qubits, v.num_qubits() + l);
        // 2-qubit gates sit inside 3 clock qubits at most.
        assert!(h.locality() <= 6);
    }

    #[test]
    fn single_x_hamiltonian_has_zero_ground_energy() {
        let h = compile(&x_verifier()).unwrap();
        assert_eq!(h.num_qubits, 2);
        let spectrum = dense_spectrum(&h.to_dense().unwrap()).unwrap();
        assert!(spectrum[0].abs() < 1e-12, "lambda_min {}", spectrum[0]);

        // The ground state is the history state on input |0>.
        let eta = history_state(&x_verifier(), &basis_state(1, 0).unwrap()).unwrap();
        assert!(h.energy(&eta).unwrap().abs() < 1e-12);
    }

    #[test]
    fn history_state_single_x() {
        let eta = history_state(&x_verifier(), &basis_state(1, 0).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (|0, c=0> + |1, c=1>) / sqrt(2) = (e_0 + e_3) / sqrt(2)
        assert!((eta.amplitude(0) - Complex64::from(r)).norm() < 1e-12);
        assert!((eta.amplitude(3) - Complex64::from(r)).norm() < 1e-12);
        assert!(eta.amplitude(1).norm() < 1e-12);
        assert!(eta.amplitude(2).norm() < 1e-12);
    }

    #[test]
    fn history_state_is_normalized() {
        let mut rng = seeded_rng(67);
        let v = crate::random::random_verifier(2, 1, 5, &mut rng);
        let psi = random_state(3, &mut rng);
        let eta = history_state(&v, &psi).unwrap();
        assert!((eta.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn history_energy_equals_rejection_split() {
        let mut rng = seeded_rng(71);
        let alpha = 0.07f64;
        let y = 0b01usize;
        let v = accepting_verifier(2, 1, y, 2, alpha, &mut rng);
        let t = build_tilde(&v).unwrap();
        let l = t.circuit.len();

        let p_reject = 1.0 - acceptance_probability(&t, y).unwrap();
        let h = compile(&t).unwrap();
        let eta = history_state(&t, &basis_state(t.num_qubits(), y).unwrap()).unwrap();
        let energy = h.energy(&eta).unwrap();
        let expected = p_reject / (l + 1) as f64;
        assert!(
            (energy - expected).abs() < 1e-10,
            "energy {energy} vs p_reject/(L+1) {expected}"
        );
    }

    #[test]
    fn propagation_annihilates_history_states() {
        let mut rng = seeded_rng(73);
        for _ in 0..3 {
            let v = crate::random::random_verifier(1, 2, 4, &mut rng);
            let h = compile(&v).unwrap();
            let psi = random_state(3, &mut rng);
            let eta = history_state(&v, &psi).unwrap();
            // Select the propagation terms: they sit between the ancilla
            // penalties + output penalty and the clock penalties.
            let l = v.circuit.len();
            let prop_terms = &h.terms[v.m_ancilla + 1..v.m_ancilla + 1 + l];
            let mut hv = vec![Complex64::ZERO; eta.dim()];
            for term in prop_terms {
                term.accumulate(eta.amplitudes(), &mut hv);
            }
            let norm = crate::sim::norm(&hv);
            assert!(norm < 1e-10, "||H_prop eta|| = {norm}");
        }
    }

    #[test]
    fn clock_terms_penalize_non_unary_strings() {
        let v = VerifierSpec::new(
            1,
            0,
            0,
            0.0,
            Circuit::with_gates(
                1,
                vec![
                    Gate::new(GateKind::X, vec![0]),
                    Gate::new(GateKind::X, vec![0]),
                    Gate::new(GateKind::X, vec![0]),
                ],
            ),
        )
        .unwrap();
        let h = compile(&v).unwrap();
        let layout = h.layout.unwrap();
        let clock_terms = &h.terms[1 + 3..];
        assert_eq!(clock_terms.len(), 2);

        for clock_bits in 0..8usize {
            let index = clock_bits << layout.w;
            let state = basis_state(h.num_qubits, index).unwrap();
            let mut hv = vec![Complex64::ZERO; state.dim()];
            for term in clock_terms {
                term.accumulate(state.amplitudes(), &mut hv);
            }
            let energy = sim::inner(state.amplitudes(), &hv).re;
            let unary = matches!(clock_bits, 0b000 | 0b001 | 0b011 | 0b111);
            if unary {
                assert!(energy.abs() < 1e-12, "unary {clock_bits:03b} penalized");
            } else {
                assert!(energy >= 1.0 - 1e-12, "non-unary {clock_bits:03b}: {energy}");
            }
        }
    }

    #[test]
    fn matvec_matches_dense() {
        let mut rng = seeded_rng(79);
        let v = crate::random::random_verifier(2, 1, 5, &mut rng);
        let h = compile(&v).unwrap();
        let dense = h.to_dense().unwrap();
        for _ in 0..5 {
            let psi = random_state(h.num_qubits, &mut rng);
            let fast = h.matvec(psi.amplitudes()).unwrap();
            let x = nalgebra::DVector::from_column_slice(psi.amplitudes());
            let slow = &dense * x;
            for (a, b) in fast.iter().zip(slow.iter()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn matvec_is_linear() {
        let mut rng = seeded_rng(83);
        let v = crate::random::random_verifier(1, 1, 4, &mut rng);
        let h = compile(&v).unwrap();
        let x = random_state(h.num_qubits, &mut rng);
        let y = random_state(h.num_qubits, &mut rng);
        let a = Complex64::new(0.3, -0.4);
        let b = Complex64::new(-0.7, 0.2);

        let combined: Vec<Complex64> = x
            .amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(xi, yi)| a * xi + b * yi)
            .collect();
        let lhs = h.matvec(&combined).unwrap();
        let hx = h.matvec(x.amplitudes()).unwrap();
        let hy = h.matvec(y.amplitudes()).unwrap();
        for ((l, xi), yi) in lhs.iter().zip(&hx).zip(&hy) {
            assert!((l - (a * xi + b * yi)).norm() < 1e-10);
        }
    }

    #[test]
    fn energy_of_projector_states() {
        let one = DMatrix::from_fn(2, 2, |i, j| {
            if i == 1 && j == 1 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        let h =
            LocalHamiltonian::new(1, vec![LocalTerm::new(vec![0], one).unwrap()]).unwrap();
        assert!(h.energy(&basis_state(1, 0).unwrap()).unwrap().abs() < 1e-14);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_amplitudes(vec![Complex64::from(r), Complex64::from(r)])
            .unwrap();
        assert!((h.energy(&plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_term_matvec_is_identity() {
        let id2 = DMatrix::identity(2, 2);
        let h = LocalHamiltonian::new(2, vec![LocalTerm::new(vec![1], id2).unwrap()]).unwrap();
        let mut rng = seeded_rng(89);
        let psi = random_state(2, &mut rng);
        let out = h.matvec(psi.amplitudes()).unwrap();
        for (a, b) in out.iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn prep_circuit_staircase_marginals() {
        // L = 3: every clock string must carry amplitude 1/2.
        let v = VerifierSpec::new(
            1,
            0,
            0,
            0.0,
            Circuit::with_gates(
                1,
                vec![
                    Gate::new(GateKind::X, vec![0]),
                    Gate::new(GateKind::X, vec![0]),
                    Gate::new(GateKind::X, vec![0]),
                ],
            ),
        )
        .unwrap();
        let prep = history_prep_circuit(&v, 0).unwrap();
        let out = sim::run(&prep, &basis_state(4, 0).unwrap()).unwrap();
        let layout = ClockLayout { w: 1, l: 3 };
        for j in 0..=3 {
            let mut mass = 0.0;
            for work in 0..2usize {
                mass += out.amplitude(layout.global_index(work, j)).norm_sqr();
            }
            assert!((mass.sqrt() - 0.5).abs() < 1e-12, "time {j}: {mass}");
        }
    }

    #[test]
    fn prep_circuit_matches_history_state() {
        let mut rng = seeded_rng(97);
        for _ in 0..4 {
            let v = crate::random::random_verifier(2, 1, 4, &mut rng);
            let y = rng.gen_range(0..4usize);
            let prep = history_prep_circuit(&v, y).unwrap();
            assert!(prep.len() <= v.n_input + 2 * v.circuit.len());

            let total = v.num_qubits() + v.circuit.len();
            let prepared = sim::run(&prep, &basis_state(total, 0).unwrap()).unwrap();
            let eta =
                history_state(&v, &basis_state(v.num_qubits(), y).unwrap()).unwrap();
            let fidelity = eta.inner(&prepared).unwrap().norm_sqr();
            assert!(fidelity >= 1.0 - 1e-10, "fidelity {fidelity}");
        }
    }

    #[test]
    fn hamiltonian_json_round_trip() {
        let v = x_verifier();
        let h = compile(&v).unwrap();
        let back = LocalHamiltonian::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn decide_low_energy_trivial_cases() {
        // |1><1| on one qubit: the empty circuit already has energy 0.
        let one = DMatrix::from_fn(2, 2, |i, j| {
            if i == 1 && j == 1 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        let h = LocalHamiltonian::new(1, vec![LocalTerm::new(vec![0], one).unwrap()]).unwrap();
        let inst = LowEnergyInstance::new(h, 0.0, 0.5, 0).unwrap();
        match decide_low_energy(&inst, 1).unwrap() {
            LowEnergyDecision::Case1 { witness, energy } => {
                assert!(witness.is_empty());
                assert!(energy.abs() < 1e-14);
            }
            other => panic!("expected case 1, got {other:?}"),
        }

        // Identity as a full-support term: every state has energy 1.
        let id = DMatrix::identity(4, 4);
        let h =
            LocalHamiltonian::new(2, vec![LocalTerm::new(vec![0, 1], id).unwrap()]).unwrap();
        let inst = LowEnergyInstance::new(h, 0.5, 0.9, 2).unwrap();
        assert_eq!(decide_low_energy(&inst, 1).unwrap(), LowEnergyDecision::Case2);
    }

    #[test]
    fn decide_low_energy_accepting_instance_via_search() {
        // Compiled single-X verifier lives on 2 qubits; its history state is
        // reachable with 2 gates and has energy 0.
        let v = x_verifier();
        let h = compile(&v).unwrap();
        let k = history_prep_circuit(&v, 0).unwrap().len();
        let inst = LowEnergyInstance::new(h, 0.0, 0.1, k.max(2)).unwrap();
        match decide_low_energy(&inst, 1).unwrap() {
            LowEnergyDecision::Case1 { energy, .. } => assert!(energy <= 1e-12),
            other => panic!("expected case 1, got {other:?}"),
        }
    }

    #[test]
    fn decide_low_energy_large_instance_spectral_route() {
        let mut rng = seeded_rng(101);
        let v = crate::random::random_verifier(2, 1, 4, &mut rng);
        let h = compile(&v).unwrap();
        // b above any possible energy makes the spectral certificate fail,
        // landing in Unknown. b = 0 cannot happen (gap check), so probe with
        // lambda_min far below b.
        let inst = LowEnergyInstance::new(h, 0.0, 1e-3, 3).unwrap();
        match decide_low_energy(&inst, 7).unwrap() {
            LowEnergyDecision::Case2 | LowEnergyDecision::Unknown { .. } => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    use rand::Rng;
}
