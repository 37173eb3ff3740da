//! Acceptance suite: every shipped guarantee checked end to end at its
//! stated tolerance, one PASS line per criterion.
//!
//! Run with `cargo test -p qcma-core --test acceptance -- --nocapture` to
//! see the lines; any violated bound fails its test.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::Rng;

use qcma_core::circuit::VerifierSpec;
use qcma_core::clock::{compile, history_prep_circuit, history_state, LocalHamiltonian};
use qcma_core::idcheck::{
    build_tilde, build_z, case1_witness_index, hdh_circuit, has_dirty_ancillas,
    min_basis_overlap, norm_distance_to_identity,
};
use qcma_core::random::{
    accepting_verifier, random_verifier, rejecting_verifier, seeded_rng,
    uniform_acceptance_verifier,
};
use qcma_core::sim::{
    acceptance_operator, acceptance_probability, basis_state, diagonal_overlap,
    max_basis_acceptance, run,
};
use qcma_core::spectral::{dense_spectrum, lanczos_extreme, Extremum};

const PHI: f64 = FRAC_PI_4;

/// Accepting corpus for criteria 1 and 3: witnesses accepted with measured
/// probability at least 0.99, at most 5 work qubits and 25 gates.
fn case1_corpus() -> Vec<(VerifierSpec, usize)> {
    let mut rng = seeded_rng(0xA11CE);
    let mut corpus = Vec::new();
    for i in 0..50 {
        let n = 1 + i % 3;
        let m = 1 + (i / 3) % (5 - n).max(1).min(2);
        let witness = rng.gen_range(0..1usize << n);
        let prefix = rng.gen_range(0..=11);
        let alpha = if i % 4 == 0 { 0.0 } else { rng.gen_range(0.0..0.0999) };
        let v = accepting_verifier(n, m, witness, prefix, alpha, &mut rng);
        assert!(v.num_qubits() <= 5);
        assert!(v.circuit.len() <= 25);
        corpus.push((v, witness));
    }
    corpus
}

/// Rejecting corpus for criteria 2 and 3: max basis acceptance at most 0.01.
fn case2_corpus() -> Vec<VerifierSpec> {
    let mut rng = seeded_rng(0xB0B);
    let mut corpus = Vec::new();
    for i in 0..50 {
        let n = 1 + i % 3;
        let m = 1 + (i / 3) % (5 - n).max(1).min(2);
        let gates = rng.gen_range(0..=23);
        let alpha = if i % 5 == 0 { 0.0 } else { rng.gen_range(0.0..0.0997) };
        let v = rejecting_verifier(n, m, gates, alpha, &mut rng);
        assert!(v.num_qubits() <= 5);
        assert!(v.circuit.len() <= 25);
        corpus.push(v);
    }
    corpus
}

#[test]
fn criterion_1_case1_witness_overlap_bound() {
    let corpus = case1_corpus();
    assert!(corpus.len() >= 50);
    for (v, witness) in &corpus {
        let p = acceptance_probability(v, *witness).unwrap();
        assert!(p >= 0.99, "witness acceptance {p} below 0.99");
        let epsilon = 1.0 - p;

        let z = build_z(v, PHI).unwrap();
        let z_star = case1_witness_index(*witness);
        let observed = diagonal_overlap(&z, z_star).unwrap().norm_sqr();
        let bound = ((2.0 * PHI).cos() + epsilon.sqrt()).powi(2);
        assert!(
            observed <= bound + 1e-9,
            "witness overlap^2 {observed} exceeds bound {bound}"
        );
    }
    println!(
        "PASS criterion 1: case-1 witness overlap bound held on {} accepting verifiers",
        corpus.len()
    );
}

#[test]
fn criterion_2_case2_all_basis_states_bound() {
    let corpus = case2_corpus();
    assert!(corpus.len() >= 50);
    for v in &corpus {
        let (_, epsilon) = max_basis_acceptance(v).unwrap();
        assert!(epsilon <= 0.01, "max acceptance {epsilon} above 0.01");

        let z = build_z(v, PHI).unwrap();
        let bound = (PHI.cos() - 2.0 * epsilon.sqrt()).powi(2);
        let (z_min, min_sq) = min_basis_overlap(&z).unwrap();
        assert!(
            min_sq >= bound - 1e-9,
            "min overlap^2 {min_sq} at z={z_min} below bound {bound}"
        );
    }
    println!(
        "PASS criterion 2: case-2 lower bound held on all basis states of {} rejecting verifiers",
        corpus.len()
    );
}

#[test]
fn criterion_3_wrong_ancilla_bound() {
    let mut verifiers: Vec<VerifierSpec> =
        case1_corpus().into_iter().map(|(v, _)| v).collect();
    verifiers.extend(case2_corpus());
    let mut checked = 0usize;
    for v in &verifiers {
        let z = build_z(v, PHI).unwrap();
        for idx in 0..1usize << z.num_qubits {
            if has_dirty_ancillas(v, idx) {
                let overlap = diagonal_overlap(&z, idx).unwrap().norm();
                assert!(
                    overlap >= PHI.cos() - 1e-9,
                    "dirty-ancilla z={idx}: |overlap| {overlap} below cos(phi)"
                );
                checked += 1;
            }
        }
    }
    println!(
        "PASS criterion 3: wrong-ancilla overlap floor held on {checked} basis states across {} verifiers",
        verifiers.len()
    );
}

#[test]
fn criterion_4_hdh_separation() {
    for n in 2..=8usize {
        let circuit = hdh_circuit(n);
        let expected = 2.0f64.powf(1.0 - n as f64 / 2.0);
        for y in 0..1usize << n {
            let moved = run(&circuit, &basis_state(n, y).unwrap()).unwrap();
            let diff_sq: f64 = moved
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let orig = if i == y { Complex64::ONE } else { Complex64::ZERO };
                    (orig - a).norm_sqr()
                })
                .sum();
            assert!(
                (diff_sq.sqrt() - expected).abs() < 1e-10,
                "n={n}, y={y}: ||(1-HDH)|y>|| = {} vs 2^(1-n/2) = {expected}",
                diff_sq.sqrt()
            );
        }
        let distance = norm_distance_to_identity(&circuit).unwrap();
        assert!(
            (distance - 2.0f64.sqrt()).abs() < 1e-10,
            "n={n}: norm distance {distance} is not sqrt(2)"
        );
    }
    println!(
        "PASS criterion 4: HDH moves every basis state by exactly 2^(1-n/2) while sitting sqrt(2) from every global phase, n = 2..8"
    );
}

#[test]
fn criterion_5_tilde_convexity() {
    let mut rng = seeded_rng(0x711DE);
    let count = 20;
    for i in 0..count {
        let n = 1 + i % 3;
        let m = 1 + i % 2;
        let v = random_verifier(n, m, 15, &mut rng);
        let t = build_tilde(&v).unwrap();
        let spectrum = dense_spectrum(&acceptance_operator(&t).unwrap()).unwrap();
        let lambda_max = *spectrum.last().unwrap();
        let (_, best) = max_basis_acceptance(&v).unwrap();
        assert!(
            (lambda_max - best).abs() < 1e-9,
            "verifier {i}: lambda_max {lambda_max} vs best basis acceptance {best}"
        );
    }
    println!(
        "PASS criterion 5: input copying pins the top acceptance eigenvalue to the best basis witness on {count} verifiers"
    );
}

#[test]
fn criterion_6_history_state_energy() {
    let mut rng = seeded_rng(0x4157);
    let mut checked = 0usize;
    for i in 0..6 {
        let n = 1 + i % 2;
        let witness = rng.gen_range(0..1usize << n);
        let alpha = [0.0, 0.05, 0.1][i % 3];
        let v = accepting_verifier(n, 1, witness, (i % 2) * (2 - n).min(1), alpha, &mut rng);
        let t = build_tilde(&v).unwrap();
        let l = t.circuit.len();
        assert!(l <= 6, "toy instance has L = {l}");

        let p_reject = 1.0 - acceptance_probability(&t, witness).unwrap();
        let h = compile(&t).unwrap();
        let eta = history_state(&t, &basis_state(t.num_qubits(), witness).unwrap()).unwrap();

        let energy = h.energy(&eta).unwrap();
        let expected = p_reject / (l + 1) as f64;
        assert!(
            (energy - expected).abs() < 1e-10,
            "instance {i}: energy {energy} vs p_reject/(L+1) {expected}"
        );
        assert!(energy <= t.epsilon / (l + 1) as f64 + 1e-10);

        // Propagation terms alone must annihilate the history state.
        let prop = LocalHamiltonian::new(
            h.num_qubits,
            h.terms[t.m_ancilla + 1..t.m_ancilla + 1 + l].to_vec(),
        )
        .unwrap();
        let hv = prop.matvec(eta.amplitudes()).unwrap();
        let prop_norm = hv.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(prop_norm <= 1e-10, "instance {i}: ||H_prop eta|| = {prop_norm}");
        checked += 1;
    }
    println!(
        "PASS criterion 6: history-state energy equals p_reject/(L+1) and H_prop annihilates it on {checked} accepting instances"
    );
}

#[test]
fn criterion_7_spectral_separation() {
    let mut rng = seeded_rng(0x5E7A);
    let mut pairs = 0usize;
    for i in 0..5 {
        let prefix = i % 2;
        let witness = i % 2;
        let alpha = 0.05;
        let accept = build_tilde(&accepting_verifier(1, 1, witness, prefix, alpha, &mut rng))
            .unwrap();
        let reject_gates = accept.circuit.len() - 1; // match the tilde'd length
        let reject =
            build_tilde(&rejecting_verifier(1, 1, reject_gates, alpha, &mut rng)).unwrap();

        let h_accept = compile(&accept).unwrap();
        let h_reject = compile(&reject).unwrap();
        assert!(h_accept.num_qubits <= 12 && h_reject.num_qubits <= 12);

        let l = accept.circuit.len();
        let epsilon = 1.0 - acceptance_probability(&accept, witness).unwrap();

        let dense_acc = dense_spectrum(&h_accept.to_dense().unwrap()).unwrap()[0];
        let dense_rej = dense_spectrum(&h_reject.to_dense().unwrap()).unwrap()[0];

        assert!(
            dense_acc <= epsilon / (l + 1) as f64 + 1e-12,
            "pair {i}: lambda_min(accept) {dense_acc} above eps/(L+1)"
        );
        assert!(
            dense_rej > dense_acc,
            "pair {i}: reject ground energy {dense_rej} not above accept {dense_acc}"
        );
        assert!(
            dense_rej >= 1e-3,
            "pair {i}: lambda_min(reject) {dense_rej} below 1e-3"
        );

        for (h, dense_value) in [(&h_accept, dense_acc), (&h_reject, dense_rej)] {
            let lanczos = lanczos_extreme(
                |v| h.matvec(v).unwrap(),
                h.dim(),
                Extremum::Min,
                1e-9,
                500,
                0xC0FFEE + i as u64,
            )
            .unwrap();
            assert!(
                (lanczos.value - dense_value).abs() <= 1e-8,
                "pair {i}: lanczos {} vs dense {dense_value}",
                lanczos.value
            );
        }
        pairs += 1;
    }
    println!(
        "PASS criterion 7: accepting ground energy sits below eps/(L+1) and strictly below the rejecting one (>= 1e-3) on {pairs} matched pairs, dense and Lanczos agreeing"
    );
}

#[test]
fn criterion_8_preparation_circuit() {
    let mut rng = seeded_rng(0x9E9);
    let mut checked = 0usize;
    for i in 0..10 {
        let n = 1 + i % 2;
        let m = 1 + i % 2;
        let v = random_verifier(n, m, 2 + i % 4, &mut rng);
        let witness = rng.gen_range(0..1usize << n);
        let l = v.circuit.len();

        let prep = history_prep_circuit(&v, witness).unwrap();
        assert!(
            prep.len() <= v.n_input + 2 * l + 1,
            "prep circuit too long: {} > n + 2L + 1",
            prep.len()
        );

        let total = v.num_qubits() + l;
        let prepared = run(&prep, &basis_state(total, 0).unwrap()).unwrap();
        let eta = history_state(&v, &basis_state(v.num_qubits(), witness).unwrap()).unwrap();
        let fidelity = eta.inner(&prepared).unwrap().norm_sqr();
        assert!(
            fidelity >= 1.0 - 1e-10,
            "instance {i}: prep fidelity {fidelity}"
        );
        checked += 1;
    }
    println!(
        "PASS criterion 8: history preparation circuits hit fidelity >= 1 - 1e-10 within n + 2L + 1 gates on {checked} instances"
    );
}

#[test]
fn criterion_9_majority_amplification() {
    let mut rng = seeded_rng(0x3A3);
    for &target_p in &[0.1f64, 0.5, 0.9] {
        let v = uniform_acceptance_verifier(1, 1, 2, target_p, &mut rng);
        let p = acceptance_probability(&v, 0).unwrap();
        assert!((p - target_p).abs() < 1e-12);

        let amplified = qcma_core::idcheck::amplify(&v, 3).unwrap();
        let got = acceptance_probability(&amplified, 0).unwrap();
        let expected = 3.0 * p * p * (1.0 - p) + p * p * p;
        assert!(
            (got - expected).abs() < 1e-10,
            "p={p}: amplified {got} vs binomial {expected}"
        );
    }
    println!(
        "PASS criterion 9: r=3 majority circuit maps p in {{0.1, 0.5, 0.9}} through 3p^2(1-p) + p^3 exactly"
    );
}
