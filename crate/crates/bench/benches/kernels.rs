use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qcma_bench::{bench_circuit, bench_hamiltonian};
use qcma_core::idcheck::{build_z, min_basis_overlap};
use qcma_core::random::{random_verifier, seeded_rng};
use qcma_core::sim::{basis_state, run};
use qcma_core::spectral::{lanczos_extreme, Extremum};

fn statevector_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("statevector_run");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    for &num_qubits in &[10usize, 14, 18] {
        let circuit = bench_circuit(num_qubits, 64);
        let input = basis_state(num_qubits, 0).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(num_qubits),
            &circuit,
            |b, circuit| b.iter(|| run(circuit, &input).unwrap()),
        );
    }
    group.finish();
}

fn basis_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_basis_overlap");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    for &(n, m) in &[(3usize, 2usize), (4, 3)] {
        let v = random_verifier(n, m, 20, &mut seeded_rng(7));
        let z = build_z(&v, std::f64::consts::FRAC_PI_4).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(z.num_qubits),
            &z,
            |b, z| b.iter(|| min_basis_overlap(z).unwrap()),
        );
    }
    group.finish();
}

fn hamiltonian_matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    for &prefix in &[1usize, 3] {
        let h = bench_hamiltonian(prefix);
        let state = basis_state(h.num_qubits, 0).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(h.num_qubits),
            &h,
            |b, h| b.iter(|| h.matvec(state.amplitudes()).unwrap()),
        );
    }
    group.finish();
}

fn lanczos_ground_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("lanczos_min");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for &prefix in &[1usize, 3] {
        let h = bench_hamiltonian(prefix);
        group.bench_with_input(
            BenchmarkId::from_parameter(h.num_qubits),
            &h,
            |b, h| {
                b.iter(|| {
                    lanczos_extreme(
                        |v| h.matvec(v).unwrap(),
                        h.dim(),
                        Extremum::Min,
                        1e-8,
                        300,
                        42,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(
    kernels,
    statevector_run,
    basis_sweep,
    hamiltonian_matvec,
    lanczos_ground_state
);
criterion_main!(kernels);
