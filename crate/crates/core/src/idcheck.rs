//! Reduction from verifier acceptance to identity check on basis states,
//! plus the circuit gadgets that feed the Hamiltonian reduction.
//!
//! The wrapper circuit is `Z = U† R2 U R1` on `1 + n + m` qubits:
//!
//! - qubit 0 is the rotation target;
//! - qubits `1..=n` carry the verifier's input register;
//! - qubits `n+1..=n+m` carry its ancillas.
//!
//! `R1` rotates qubit 0 by `phi` only when every ancilla is `|0>` (open
//! controls), `R2` rotates it again when the verifier's output qubit is
//! `|1>`. When a basis witness is accepted the two rotations compound to
//! `2*phi` and `<z*|Z|z*>` collapses; when everything is rejected they
//! cancel back through `U†` and every diagonal entry stays near `cos(phi)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateKind, VerifierSpec};
use crate::error::{Error, Result};
use crate::limits;
use crate::sim::{self, basis_state, run, StateVector};
use crate::spectral::unitary_eigenphases;

/// Smallest usable promise gap `mu - delta`.
pub const MIN_PROMISE_GAP: f64 = 1e-6;

/// An identity-check instance: a circuit promised to either move some basis
/// state (diagonal overlap squared at most `1 - mu`) or fix all of them
/// (at least `1 - delta`).
#[derive(Debug, Clone, PartialEq)]
pub struct IdCheckInstance {
    pub circuit: Circuit,
    pub mu: f64,
    pub delta: f64,
}

impl IdCheckInstance {
    pub fn new(circuit: Circuit, mu: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) || !(0.0..=1.0).contains(&delta) || delta >= mu {
            return Err(Error::NoGap {
                lower: 1.0 - delta,
                upper: 1.0 - mu,
            });
        }
        if mu - delta < MIN_PROMISE_GAP {
            return Err(Error::GapTooSmall {
                gap: mu - delta,
                min: MIN_PROMISE_GAP,
            });
        }
        circuit.validate()?;
        Ok(IdCheckInstance { circuit, mu, delta })
    }
}

/// Rotation angle and confidence parameter for the reduction. Valid only
/// when the two theorem bounds actually separate, which pins `phi` to
/// `(0, pi/4]` and requires `cos(phi) - 2*sqrt(eps) > cos(2*phi) + sqrt(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionParams {
    pub phi: f64,
    pub epsilon: f64,
}

impl ReductionParams {
    pub fn new(phi: f64, epsilon: f64) -> Result<Self> {
        if !phi.is_finite() || phi <= 0.0 || phi > std::f64::consts::FRAC_PI_4 {
            return Err(Error::PhiOutOfRange { phi });
        }
        if !(0.0..=1.0 / 3.0).contains(&epsilon) {
            return Err(Error::EpsilonOutOfRange { epsilon });
        }
        let params = ReductionParams { phi, epsilon };
        let bounds = theorem_bounds_unchecked(params);
        if bounds.case2_lower <= bounds.case1_upper {
            return Err(Error::NoGap {
                lower: bounds.case2_lower,
                upper: bounds.case1_upper,
            });
        }
        Ok(params)
    }

    /// `phi = pi/4`: the case-1 bound collapses to `epsilon`, which is the
    /// widest the promise gap gets.
    pub fn default_phi(epsilon: f64) -> Result<Self> {
        ReductionParams::new(std::f64::consts::FRAC_PI_4, epsilon)
    }
}

/// The two squared-overlap thresholds of the reduction theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremBounds {
    /// Accepted witness: `|<z*|Z|z*>|^2 <= (cos(2*phi) + sqrt(eps))^2`.
    pub case1_upper: f64,
    /// Everything rejected: `|<z|Z|z>|^2 >= (cos(phi) - 2*sqrt(eps))^2`.
    pub case2_lower: f64,
}

fn theorem_bounds_unchecked(params: ReductionParams) -> TheoremBounds {
    let root_eps = params.epsilon.sqrt();
    // Overlap magnitudes are nonnegative, so a negative inner expression
    // means the bound is vacuous at 0 rather than sign-flipped.
    let case1_inner = ((2.0 * params.phi).cos() + root_eps).max(0.0);
    let case2_inner = params.phi.cos() - 2.0 * root_eps;
    TheoremBounds {
        case1_upper: case1_inner * case1_inner,
        case2_lower: case2_inner * case2_inner,
    }
}

/// Evaluates the theorem bounds for validated parameters.
pub fn theorem_bounds(params: &ReductionParams) -> TheoremBounds {
    theorem_bounds_unchecked(*params)
}

/// Builds `Z = U† R2 U R1` for the verifier at rotation angle `phi`.
/// Gate count is `2 * len(U) + 2`.
pub fn build_z(verifier: &VerifierSpec, phi: f64) -> Result<Circuit> {
    verifier.validate()?;
    if !phi.is_finite() {
        return Err(Error::PhiOutOfRange { phi });
    }
    let n = verifier.n_input;
    let m = verifier.m_ancilla;
    let total = 1 + n + m;
    let shift: Vec<usize> = (1..=n + m).collect();
    let embedded = verifier.circuit.embed(&shift, total)?;

    let r1_controls = verifier.ancilla_qubits().map(|a| (a + 1, false)).collect();
    let r1 = Gate::with_controls(GateKind::Ry(2.0 * phi), vec![0], r1_controls);
    let r2 = Gate::with_controls(
        GateKind::Ry(2.0 * phi),
        vec![0],
        vec![(verifier.output_qubit + 1, true)],
    );

    let mut z = Circuit::new(total);
    z.push(r1);
    z.gates.extend(embedded.gates.iter().cloned());
    z.push(r2);
    z.gates.extend(embedded.inverse().gates);
    Ok(z)
}

/// Basis index of `z* = |0> (x) |y> (x) |0...0>` in the layout of
/// [`build_z`]: the accepted witness with zeroed rotation target and
/// ancillas.
pub fn case1_witness_index(y: usize) -> usize {
    y << 1
}

/// Whether basis state `z` of a `Z` circuit has any nonzero ancilla bit.
pub fn has_dirty_ancillas(verifier: &VerifierSpec, z: usize) -> bool {
    let ancilla_mask = ((1usize << verifier.m_ancilla) - 1) << (1 + verifier.n_input);
    z & ancilla_mask != 0
}

fn diag_overlap_sq(circuit: &Circuit, z: usize) -> f64 {
    let dim = 1usize << circuit.num_qubits;
    let mut amplitudes = vec![Complex64::ZERO; dim];
    amplitudes[z] = Complex64::ONE;
    for gate in &circuit.gates {
        sim::apply_gate_in_place(&mut amplitudes, gate);
    }
    amplitudes[z].norm_sqr()
}

/// Minimum of `|<z|C|z>|^2` over all basis states, with the smallest
/// achieving index. Basis states are swept in parallel; ties always go to
/// the smallest index.
pub fn min_basis_overlap(circuit: &Circuit) -> Result<(usize, f64)> {
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
    let (z_min, value) = (0..dim)
        .into_par_iter()
        .map(|z| (z, diag_overlap_sq(circuit, z)))
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |best, cand| {
                if cand.1 < best.1 || (cand.1 == best.1 && cand.0 < best.0) {
                    cand
                } else {
                    best
                }
            },
        );
    Ok((z_min, value))
}

/// Which side of the identity-check promise an instance lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdCheckCase {
    /// Some basis state is moved: min overlap squared `<= 1 - mu`.
    Case1,
    /// All basis states are (almost) fixed: min overlap squared `>= 1 - delta`.
    Case2,
    /// The measurement landed inside the promise gap.
    PromiseViolated,
}

/// Outcome of a brute-force identity-check decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdCheckOutcome {
    pub case: IdCheckCase,
    pub z_min: usize,
    pub min_overlap_sq: f64,
}

/// Decides an identity-check instance by exhaustive sweep over basis states.
pub fn decide_basis_identity(instance: &IdCheckInstance) -> Result<IdCheckOutcome> {
    let (z_min, min_overlap_sq) = min_basis_overlap(&instance.circuit)?;
    let case = if min_overlap_sq <= 1.0 - instance.mu {
        IdCheckCase::Case1
    } else if min_overlap_sq >= 1.0 - instance.delta {
        IdCheckCase::Case2
    } else {
        IdCheckCase::PromiseViolated
    };
    Ok(IdCheckOutcome {
        case,
        z_min,
        min_overlap_sq,
    })
}

/// Operator-norm distance to the nearest global phase,
/// `min_phi ||U - e^{i*phi} I||`.
///
/// With eigenphases on the unit circle the best phase sits opposite the
/// largest gap between adjacent sorted eigenphases; if that gap is `G` the
/// distance is `2 * cos(G / 4)`.
pub fn norm_distance_to_identity(circuit: &Circuit) -> Result<f64> {
    let u = sim::unitary_matrix(circuit)?;
    let mut phases = unitary_eigenphases(&u)?;
    phases.sort_by(f64::total_cmp);
    let mut largest_gap = phases[0] + 2.0 * std::f64::consts::PI - phases[phases.len() - 1];
    for pair in phases.windows(2) {
        largest_gap = largest_gap.max(pair[1] - pair[0]);
    }
    Ok(2.0 * (largest_gap / 4.0).cos())
}

/// The input-copying wrapper: `n` CX gates fan the input register out onto
/// `n` fresh ancillas (appended after the original ones), then the original
/// circuit runs untouched. Any input state is thereby decohered in the
/// computational basis, so the best quantum input does no better than the
/// best basis input.
pub fn build_tilde(verifier: &VerifierSpec) -> Result<VerifierSpec> {
    verifier.validate()?;
    let n = verifier.n_input;
    let m = verifier.m_ancilla;
    let total = n + m + n;

    let mut circuit = Circuit::new(total);
    for i in 0..n {
        circuit.push(Gate::new(GateKind::Cx, vec![i, n + m + i]));
    }
    let identity: Vec<usize> = (0..n + m).collect();
    let embedded = verifier.circuit.embed(&identity, total)?;
    circuit.gates.extend(embedded.gates);

    VerifierSpec::new(n, m + n, verifier.output_qubit, verifier.epsilon, circuit)
}

/// Probability that a majority vote over `r` independent trials with
/// per-trial success probability `p` succeeds.
pub fn majority_prob(p: f64, r: usize) -> f64 {
    ((r / 2 + 1)..=r)
        .map(|j| binomial(r, j) * p.powi(j as i32) * (1.0 - p).powi((r - j) as i32))
        .sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Majority-vote amplification: `r` disjoint copies of the verifier run on
/// fanned-out copies of the input register and a reversible majority of the
/// copy outputs lands on a fresh output qubit. On basis input `y` the
/// acceptance probability is exactly the binomial majority of the original
/// acceptance probability.
pub fn amplify(verifier: &VerifierSpec, r: usize) -> Result<VerifierSpec> {
    if r % 2 == 0 {
        return Err(Error::EvenRepetition { r });
    }
    verifier.validate()?;
    if r == 1 {
        return Ok(verifier.clone());
    }
    let n = verifier.n_input;
    let m = verifier.m_ancilla;

    // Layout: input block per copy (copy 0 = the real input), then ancilla
    // block per copy, then comparator scratch, then the fresh output.
    let comparators = if r == 3 { 0 } else { r * (r - 1) / 2 };
    let scratch_base = r * (n + m);
    let fresh_output = scratch_base + comparators;
    let total = fresh_output + 1;

    let mut circuit = Circuit::new(total);
    for c in 1..r {
        for i in 0..n {
            circuit.push(Gate::new(GateKind::Cx, vec![i, c * n + i]));
        }
    }

    let mut copy_outputs = Vec::with_capacity(r);
    for c in 0..r {
        let mapping: Vec<usize> = (0..n + m)
            .map(|q| if q < n { c * n + q } else { r * n + c * m + (q - n) })
            .collect();
        copy_outputs.push(mapping[verifier.output_qubit]);
        let embedded = verifier.circuit.embed(&mapping, total)?;
        circuit.gates.extend(embedded.gates);
    }

    if r == 3 {
        // Pairwise-AND parity is exactly the majority of three bits.
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            circuit.push(Gate::new(
                GateKind::Ccx,
                vec![copy_outputs[a], copy_outputs[b], fresh_output],
            ));
        }
    } else {
        // Bubble a sorting network over the copy outputs (descending), then
        // read the median wire. Each comparator burns one scratch qubit for
        // its swap flag.
        let mut scratch = scratch_base;
        for pass in 0..r {
            for i in 0..r - 1 - pass {
                let (hi, lo) = (copy_outputs[i], copy_outputs[i + 1]);
                // flag = [hi < lo] for bits
                circuit.push(Gate::with_controls(
                    GateKind::X,
                    vec![scratch],
                    vec![(hi, false), (lo, true)],
                ));
                // controlled swap of (hi, lo) on the flag
                circuit.push(Gate::new(GateKind::Cx, vec![lo, hi]));
                circuit.push(Gate::new(GateKind::Ccx, vec![scratch, hi, lo]));
                circuit.push(Gate::new(GateKind::Cx, vec![lo, hi]));
                scratch += 1;
            }
        }
        circuit.push(Gate::new(
            GateKind::Cx,
            vec![copy_outputs[r / 2], fresh_output],
        ));
    }

    VerifierSpec::new(
        n,
        total - n,
        fresh_output,
        majority_prob(verifier.epsilon, r),
        circuit,
    )
}

/// Principal-value phase difference `arg<z1|C|z1> - arg<z2|C|z2>` in
/// `(-pi, pi]`. Fails if either overlap is too small to carry a phase.
pub fn phase_difference(circuit: &Circuit, z1: usize, z2: usize) -> Result<f64> {
    let d1 = sim::diagonal_overlap(circuit, z1)?;
    let d2 = sim::diagonal_overlap(circuit, z2)?;
    for d in [d1, d2] {
        if d.norm() < 1e-6 {
            return Err(Error::VanishingOverlap { magnitude: d.norm() });
        }
    }
    let mut diff = d1.arg() - d2.arg();
    if diff <= -std::f64::consts::PI {
        diff += 2.0 * std::f64::consts::PI;
    } else if diff > std::f64::consts::PI {
        diff -= 2.0 * std::f64::consts::PI;
    }
    Ok(diff)
}

/// Fidelity of a preparation circuit against a target circuit:
/// `|<0...0| target† prep |0...0>|^2`, the all-zeros probability of the
/// run-then-uncompute verification pattern.
pub fn verify_preparation(prep: &Circuit, target: &Circuit) -> Result<f64> {
    if prep.num_qubits != target.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: prep.num_qubits,
            got: target.num_qubits,
        });
    }
    let zeros = basis_state(prep.num_qubits, 0)?;
    let prepared = run(prep, &zeros)?;
    let wanted = run(target, &zeros)?;
    Ok(wanted.inner(&prepared)?.norm_sqr())
}

/// Hard ceilings for the exhaustive circuit search.
pub const SEARCH_MAX_QUBITS: usize = 2;
pub const SEARCH_MAX_GATES: usize = 6;

/// All single placements of the discrete gate alphabet (no `ry`) on
/// `num_qubits` wires, in a fixed deterministic order.
fn gate_placements(num_qubits: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for kind in [
        GateKind::H,
        GateKind::X,
        GateKind::T,
        GateKind::Tdg,
        GateKind::S,
        GateKind::Sdg,
    ] {
        for q in 0..num_qubits {
            out.push(Gate::new(kind, vec![q]));
        }
    }
    if num_qubits >= 2 {
        for c in 0..num_qubits {
            for t in 0..num_qubits {
                if c != t {
                    out.push(Gate::new(GateKind::Cx, vec![c, t]));
                }
            }
        }
    }
    if num_qubits >= 3 {
        for a in 0..num_qubits {
            for b in 0..num_qubits {
                for t in 0..num_qubits {
                    if a < b && t != a && t != b {
                        out.push(Gate::new(GateKind::Ccx, vec![a, b, t]));
                    }
                }
            }
        }
    }
    out
}

/// Visits every gate sequence of length `0..=max_gates` exactly once,
/// shortest first, in placement order, handing `visit` the gate stack and
/// the state it prepares from `|0...0>`. Stops when `visit` returns true
/// and hands back the winning circuit.
pub(crate) fn search_prepared_states(
    num_qubits: usize,
    max_gates: usize,
    mut visit: impl FnMut(&[Gate], &[Complex64]) -> bool,
) -> Option<Circuit> {
    fn dfs(
        placements: &[Gate],
        state: &[Complex64],
        remaining: usize,
        stack: &mut Vec<Gate>,
        visit: &mut impl FnMut(&[Gate], &[Complex64]) -> bool,
    ) -> bool {
        if remaining == 0 {
            return visit(stack, state);
        }
        for gate in placements {
            let mut next = state.to_vec();
            sim::apply_gate_in_place(&mut next, gate);
            stack.push(gate.clone());
            if dfs(placements, &next, remaining - 1, stack, visit) {
                return true;
            }
            stack.pop();
        }
        false
    }

    let placements = gate_placements(num_qubits);
    let dim = 1usize << num_qubits;
    let mut zero = vec![Complex64::ZERO; dim];
    zero[0] = Complex64::ONE;

    for depth in 0..=max_gates {
        let mut stack: Vec<Gate> = Vec::with_capacity(depth);
        if dfs(&placements, &zero, depth, &mut stack, &mut visit) {
            return Some(Circuit::with_gates(num_qubits, stack));
        }
    }
    None
}

/// Exhaustive search for a shortest circuit (at most `k` gates, discrete
/// alphabet, no rotations) preparing `target_state` from `|0...0>` with
/// squared overlap at least `1 - tolerance`. `None` when no circuit within
/// the budget reaches the target.
pub fn min_gates_prepare(
    target_state: &StateVector,
    k: usize,
    tolerance: f64,
) -> Result<Option<Circuit>> {
    if target_state.num_qubits() > SEARCH_MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "search qubits",
            got: target_state.num_qubits(),
            limit: SEARCH_MAX_QUBITS,
        });
    }
    if k > SEARCH_MAX_GATES {
        return Err(Error::TooLarge {
            what: "gate budget",
            got: k,
            limit: SEARCH_MAX_GATES,
        });
    }
    let target = target_state.amplitudes();
    Ok(search_prepared_states(
        target_state.num_qubits(),
        k,
        |_, state| sim::inner(target, state).norm_sqr() >= 1.0 - tolerance,
    ))
}

/// `diag(-1, 1, ..., 1)`: a phase flip on the all-zeros state only, built
/// from two open-controlled S gates conjugated by X on qubit 0.
pub fn phase_flip_on_zeros(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    let controls: Vec<(usize, bool)> = (1..n).map(|q| (q, false)).collect();
    c.push(Gate::new(GateKind::X, vec![0]));
    c.push(Gate::with_controls(GateKind::S, vec![0], controls.clone()));
    c.push(Gate::with_controls(GateKind::S, vec![0], controls));
    c.push(Gate::new(GateKind::X, vec![0]));
    c
}

/// The Hadamard-conjugated phase flip `H D H` with `D = diag(-1, 1, ..., 1)`:
/// far from every global phase in operator norm, yet within `2^{1-n/2}` of
/// the identity on every basis state.
pub fn hdh_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::new(GateKind::H, vec![q]));
    }
    c.gates.extend(phase_flip_on_zeros(n).gates);
    for q in 0..n {
        c.push(Gate::new(GateKind::H, vec![q]));
    }
    c
}
