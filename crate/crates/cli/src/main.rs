//! `qcma`: circuit reductions, clock Hamiltonians, and spectral checks from
//! the command line.
//!
//! Every subcommand prints one JSON report on stdout and keeps diagnostics
//! on stderr. Reports are deterministic for fixed inputs and seeds except
//! for the `elapsed` field. Exit codes: 0 success, 1 for negative or
//! undecidable outcomes (promise violations, failed checks), 2 for input
//! errors.
//!
//! Bitstrings on the command line are written with qubit 0 as the rightmost
//! character and echoed back the same way.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qcma_core::circuit::{parse, Circuit, VerifierSpec};
use qcma_core::clock::{
    compile, decide_low_energy, history_prep_circuit, history_state, ClockLayout,
    LocalHamiltonian, LowEnergyDecision, LowEnergyInstance,
};
use qcma_core::idcheck::{
    amplify, build_tilde, build_z, case1_witness_index, decide_basis_identity, min_basis_overlap,
    norm_distance_to_identity, phase_difference, theorem_bounds, verify_preparation,
    IdCheckCase, IdCheckInstance, ReductionParams,
};
use qcma_core::sim::{
    acceptance_probability, basis_state, diagonal_overlap, max_basis_acceptance, run,
};
use qcma_core::spectral::{dense_spectrum, lanczos_extreme, Extremum};
use qcma_core::{limits, Error};

#[derive(Parser)]
#[command(name = "qcma", version, about = "circuit reductions and clock Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a circuit file.
    Validate { circuit: PathBuf },
    /// Run a circuit on a basis state and print the final amplitudes.
    Simulate {
        circuit: PathBuf,
        /// Basis input, qubit 0 rightmost.
        #[arg(long)]
        input: String,
    },
    /// Wrap a verifier into the identity-check circuit Z and report the
    /// theorem bounds.
    ReduceIdcheck {
        verifier: PathBuf,
        /// Rotation angle in radians, in (0, pi/4].
        #[arg(long)]
        phi: f64,
    },
    /// Decide an identity-check instance by sweeping all basis states.
    IdcheckDecide {
        circuit: PathBuf,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Operator-norm distance of a circuit to the nearest global phase.
    Normdist { circuit: PathBuf },
    /// Phase difference between two diagonal matrix elements.
    Phasediff {
        circuit: PathBuf,
        #[arg(long)]
        z1: String,
        #[arg(long)]
        z2: String,
    },
    /// Prefix a verifier with input-copying CX gates.
    Tilde { verifier: PathBuf },
    /// Majority-vote amplification with r parallel copies.
    Amplify {
        verifier: PathBuf,
        #[arg(short)]
        r: usize,
    },
    /// Compile a verifier into its clock Hamiltonian.
    CompileHam { verifier: PathBuf },
    /// Build the history state for a witness and report its energy.
    History {
        verifier: PathBuf,
        /// Witness bits for the input register, qubit 0 rightmost.
        #[arg(long)]
        witness: String,
        /// Also emit the preparation circuit and its fidelity.
        #[arg(long)]
        emit_prep: bool,
    },
    /// Extremal eigenvalue of a Hamiltonian file.
    Eig {
        hamiltonian: PathBuf,
        #[command(flatten)]
        opts: EigOpts,
    },
    /// Check the reduction theorem on one verifier, either side.
    CheckThm1 {
        verifier: PathBuf,
        #[arg(long)]
        phi: f64,
        /// Witness bits for the case-1 side, or `none` for the case-2 sweep.
        #[arg(long)]
        witness: String,
    },
    /// Fidelity of a preparation circuit against a target circuit.
    PrepVerify { prep: PathBuf, target: PathBuf },
    /// Decide a low-complexity low-energy instance.
    LowEnergyDecide {
        hamiltonian: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct EigOpts {
    #[arg(long, value_parser = ["min", "max"])]
    which: String,
    /// Force the dense path (full spectrum of the materialized matrix).
    #[arg(long, conflicts_with = "lanczos")]
    dense: bool,
    /// Force the matrix-free Lanczos path.
    #[arg(long)]
    lanczos: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

/// Outcome of a subcommand: the JSON payload plus the exit code it implies.
struct Outcome {
    payload: Value,
    exit: u8,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome { payload, exit: 0 }
    }

    fn undecided(payload: Value) -> Self {
        Outcome { payload, exit: 1 }
    }
}

fn main() -> ExitCode {
    if let Ok(text) = std::env::var("QCMA_MAX_DENSE_QUBITS") {
        match text.parse::<usize>() {
            Ok(qubits) => limits::set_max_dense_qubits(qubits),
            Err(_) => {
                eprintln!("qcma: QCMA_MAX_DENSE_QUBITS must be an integer, got `{text}`");
                return ExitCode::from(2);
            }
        }
    }

    let cli = Cli::parse();
    let started = Instant::now();
    let mut inputs = BTreeMap::new();
    match dispatch(&cli.command, &mut inputs) {
        Ok(outcome) => {
            let report = json!({
                "command": command_name(&cli.command),
                "inputs": inputs,
                "outputs": outcome.payload,
                "versions": format!("qcma {}", env!("CARGO_PKG_VERSION")),
                "elapsed": started.elapsed().as_secs_f64(),
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report"));
            ExitCode::from(outcome.exit)
        }
        Err(message) => {
            eprintln!("qcma: {message}");
            ExitCode::from(2)
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Validate { .. } => "validate",
        Command::Simulate { .. } => "simulate",
        Command::ReduceIdcheck { .. } => "reduce-idcheck",
        Command::IdcheckDecide { .. } => "idcheck-decide",
        Command::Normdist { .. } => "normdist",
        Command::Phasediff { .. } => "phasediff",
        Command::Tilde { .. } => "tilde",
        Command::Amplify { .. } => "amplify",
        Command::CompileHam { .. } => "compile-ham",
        Command::History { .. } => "history",
        Command::Eig { .. } => "eig",
        Command::CheckThm1 { .. } => "check-thm1",
        Command::PrepVerify { .. } => "prep-verify",
        Command::LowEnergyDecide { .. } => "low-energy-decide",
    }
}

type CmdResult = Result<Outcome, String>;

fn dispatch(command: &Command, inputs: &mut BTreeMap<String, String>) -> CmdResult {
    match command {
        Command::Validate { circuit } => {
            let c = load_circuit(circuit, inputs)?;
            Ok(Outcome::ok(json!({
                "valid": true,
                "num_qubits": c.num_qubits,
                "gate_count": c.len(),
            })))
        }
        Command::Simulate { circuit, input } => {
            let c = load_circuit(circuit, inputs)?;
            let index = parse_bits(input, c.num_qubits)?;
            let out = run(&c, &basis_state(c.num_qubits, index).map_err(stringify)?)
                .map_err(stringify)?;
            let amplitudes: Vec<[f64; 2]> =
                out.amplitudes().iter().map(|a| [a.re, a.im]).collect();
            Ok(Outcome::ok(json!({
                "input": input,
                "num_qubits": c.num_qubits,
                "amplitudes": amplitudes,
            })))
        }
        Command::ReduceIdcheck { verifier, phi } => {
            let v = load_verifier(verifier, inputs)?;
            let params = ReductionParams::new(*phi, v.epsilon).map_err(stringify)?;
            let bounds = theorem_bounds(&params);
            let z = build_z(&v, *phi).map_err(stringify)?;
            Ok(Outcome::ok(json!({
                "phi": phi,
                "epsilon": v.epsilon,
                "bounds": {
                    "case1_upper": bounds.case1_upper,
                    "case2_lower": bounds.case2_lower,
                },
                "z_num_qubits": z.num_qubits,
                "z_gate_count": z.len(),
                "z_circuit": z.serialize(),
            })))
        }
        Command::IdcheckDecide { circuit, mu, delta } => {
            let c = load_circuit(circuit, inputs)?;
            let width = c.num_qubits;
            let instance = IdCheckInstance::new(c, *mu, *delta).map_err(stringify)?;
            let outcome = decide_basis_identity(&instance).map_err(stringify)?;
            let (case, decision) = match outcome.case {
                IdCheckCase::Case1 => (1, "case1"),
                IdCheckCase::Case2 => (2, "case2"),
                IdCheckCase::PromiseViolated => (0, "promise_violated"),
            };
            let payload = json!({
                "case": case,
                "decision": decision,
                "z_min": format_bits(outcome.z_min, width),
                "min_overlap_sq": outcome.min_overlap_sq,
                "mu": mu,
                "delta": delta,
            });
            Ok(if case == 0 {
                Outcome::undecided(payload)
            } else {
                Outcome::ok(payload)
            })
        }
        Command::Normdist { circuit } => {
            let c = load_circuit(circuit, inputs)?;
            let distance = norm_distance_to_identity(&c).map_err(stringify)?;
            Ok(Outcome::ok(json!({ "norm_distance": distance })))
        }
        Command::Phasediff { circuit, z1, z2 } => {
            let c = load_circuit(circuit, inputs)?;
            let i1 = parse_bits(z1, c.num_qubits)?;
            let i2 = parse_bits(z2, c.num_qubits)?;
            let diff = phase_difference(&c, i1, i2).map_err(stringify)?;
            Ok(Outcome::ok(json!({
                "z1": z1,
                "z2": z2,
                "phase_difference": diff,
            })))
        }
        Command::Tilde { verifier } => {
            let v = load_verifier(verifier, inputs)?;
            let t = build_tilde(&v).map_err(stringify)?;
            Ok(Outcome::ok(verifier_value(&t)))
        }
        Command::Amplify { verifier, r } => {
            let v = load_verifier(verifier, inputs)?;
            let amplified = amplify(&v, *r).map_err(stringify)?;
            let mut value = verifier_value(&amplified);
            value["r"] = json!(r);
            Ok(Outcome::ok(value))
        }
        Command::CompileHam { verifier } => {
            let v = load_verifier(verifier, inputs)?;
            let h = compile(&v).map_err(stringify)?;
            let doc: Value =
                serde_json::from_str(&h.to_json()).expect("hamiltonian doc is valid json");
            Ok(Outcome::ok(doc))
        }
        Command::History {
            verifier,
            witness,
            emit_prep,
        } => {
            let v = load_verifier(verifier, inputs)?;
            let y = parse_bits(witness, v.n_input)?;
            let input = basis_state(v.num_qubits(), y).map_err(stringify)?;
            let eta = history_state(&v, &input).map_err(stringify)?;
            let h = compile(&v).map_err(stringify)?;
            let energy = h.energy(&eta).map_err(stringify)?;
            let layout = h.layout.unwrap_or(ClockLayout {
                w: v.num_qubits(),
                l: v.circuit.len(),
            });

            let prep = if *emit_prep {
                let circuit = history_prep_circuit(&v, y).map_err(stringify)?;
                let prepared = run(
                    &circuit,
                    &basis_state(layout.total_qubits(), 0).map_err(stringify)?,
                )
                .map_err(stringify)?;
                let fidelity = eta.inner(&prepared).map_err(stringify)?.norm_sqr();
                json!({
                    "gate_count": circuit.len(),
                    "fidelity": fidelity,
                    "circuit": circuit.serialize(),
                })
            } else {
                Value::Null
            };

            Ok(Outcome::ok(json!({
                "witness": witness,
                "w": layout.w,
                "L": layout.l,
                "energy": energy,
                "prep": prep,
            })))
        }
        Command::Eig { hamiltonian, opts } => {
            let h = load_hamiltonian(hamiltonian, inputs)?;
            let which = match opts.which.as_str() {
                "min" => Extremum::Min,
                _ => Extremum::Max,
            };
            let use_dense = opts.dense
                || (!opts.lanczos && h.num_qubits <= limits::max_hermitian_qubits());
            if use_dense {
                let spectrum =
                    dense_spectrum(&h.to_dense().map_err(stringify)?).map_err(stringify)?;
                let value = match which {
                    Extremum::Min => spectrum[0],
                    Extremum::Max => *spectrum.last().expect("nonempty spectrum"),
                };
                Ok(Outcome::ok(json!({
                    "which": opts.which,
                    "method": "dense",
                    "value": value,
                })))
            } else {
                let result = lanczos_extreme(
                    |v| h.matvec(v).expect("dimension fixed by loader"),
                    h.dim(),
                    which,
                    opts.tol,
                    500,
                    opts.seed,
                )
                .map_err(stringify)?;
                let payload = json!({
                    "which": opts.which,
                    "method": "lanczos",
                    "value": result.value,
                    "residual": result.residual,
                    "iterations": result.iterations,
                    "converged": result.converged,
                    "seed": opts.seed,
                    "tol": opts.tol,
                });
                Ok(if result.converged {
                    Outcome::ok(payload)
                } else {
                    Outcome::undecided(payload)
                })
            }
        }
        Command::CheckThm1 {
            verifier,
            phi,
            witness,
        } => {
            let v = load_verifier(verifier, inputs)?;
            let z = build_z(&v, *phi).map_err(stringify)?;
            if witness == "none" {
                // Case-2 side: measure the worst basis acceptance, then sweep
                // every diagonal entry of Z against the lower bound.
                let (_, epsilon) = max_basis_acceptance(&v).map_err(stringify)?;
                let params = ReductionParams::new(*phi, epsilon).map_err(stringify)?;
                let bounds = theorem_bounds(&params);
                let (z_min, observed_min) = min_basis_overlap(&z).map_err(stringify)?;
                let pass = observed_min >= bounds.case2_lower - 1e-9;
                let payload = json!({
                    "side": "case2",
                    "phi": phi,
                    "epsilon": epsilon,
                    "case2_lower": bounds.case2_lower,
                    "observed_min": observed_min,
                    "z_min": format_bits(z_min, z.num_qubits),
                    "pass": pass,
                });
                Ok(if pass {
                    Outcome::ok(payload)
                } else {
                    Outcome::undecided(payload)
                })
            } else {
                let y = parse_bits(witness, v.n_input)?;
                let p = acceptance_probability(&v, y).map_err(stringify)?;
                let epsilon = (1.0 - p).max(0.0);
                let params = ReductionParams::new(*phi, epsilon).map_err(stringify)?;
                let bounds = theorem_bounds(&params);
                let observed = diagonal_overlap(&z, case1_witness_index(y))
                    .map_err(stringify)?
                    .norm_sqr();
                let pass = observed <= bounds.case1_upper + 1e-9;
                let payload = json!({
                    "side": "case1",
                    "phi": phi,
                    "witness": witness,
                    "epsilon": epsilon,
                    "case1_upper": bounds.case1_upper,
                    "observed": observed,
                    "pass": pass,
                });
                Ok(if pass {
                    Outcome::ok(payload)
                } else {
                    Outcome::undecided(payload)
                })
            }
        }
        Command::PrepVerify { prep, target } => {
            let p = load_circuit(prep, inputs)?;
            let t = load_circuit(target, inputs)?;
            let fidelity = verify_preparation(&p, &t).map_err(stringify)?;
            Ok(Outcome::ok(json!({ "fidelity": fidelity })))
        }
        Command::LowEnergyDecide {
            hamiltonian,
            a,
            b,
            k,
            seed,
        } => {
            let h = load_hamiltonian(hamiltonian, inputs)?;
            let instance = LowEnergyInstance::new(h, *a, *b, *k).map_err(stringify)?;
            let decision = decide_low_energy(&instance, *seed).map_err(stringify)?;
            let (payload, exit) = match decision {
                LowEnergyDecision::Case1 { witness, energy } => (
                    json!({
                        "case": 1,
                        "decision": "case1",
                        "energy": energy,
                        "witness_circuit": witness.serialize(),
                    }),
                    0u8,
                ),
                LowEnergyDecision::Case2 => (json!({ "case": 2, "decision": "case2" }), 0),
                LowEnergyDecision::PromiseViolated { best_energy } => (
                    json!({
                        "case": 0,
                        "decision": "promise_violated",
                        "best_energy": best_energy,
                    }),
                    1,
                ),
                LowEnergyDecision::Unknown { lambda_min } => (
                    json!({
                        "case": 0,
                        "decision": "unknown",
                        "lambda_min": lambda_min,
                    }),
                    1,
                ),
            };
            Ok(Outcome { payload, exit })
        }
    }
}

fn stringify(e: Error) -> String {
    e.to_string()
}

fn read_input(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<String, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let digest = Sha256::digest(text.as_bytes());
    inputs.insert(
        path.display().to_string(),
        format!("sha256:{}", hex::encode(digest)),
    );
    Ok(text)
}

fn load_circuit(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<Circuit, String> {
    let text = read_input(path, inputs)?;
    parse(&text).map_err(stringify)
}

fn load_verifier(
    path: &Path,
    inputs: &mut BTreeMap<String, String>,
) -> Result<VerifierSpec, String> {
    let text = read_input(path, inputs)?;
    VerifierSpec::from_json(&text).map_err(stringify)
}

fn load_hamiltonian(
    path: &Path,
    inputs: &mut BTreeMap<String, String>,
) -> Result<LocalHamiltonian, String> {
    let text = read_input(path, inputs)?;
    LocalHamiltonian::from_json(&text).map_err(stringify)
}

fn verifier_value(v: &VerifierSpec) -> Value {
    serde_json::from_str(&v.to_json()).expect("verifier doc is valid json")
}

/// Parses a bitstring with qubit 0 rightmost into a basis index.
fn parse_bits(bits: &str, width: usize) -> Result<usize, String> {
    if bits.len() != width {
        return Err(format!(
            "bitstring `{bits}` has {} bits, expected {width}",
            bits.len()
        ));
    }
    let mut index = 0usize;
    for (i, c) in bits.chars().rev().enumerate() {
        match c {
            '0' => {}
            '1' => index |= 1 << i,
            _ => return Err(format!("bitstring `{bits}` contains `{c}`")),
        }
    }
    Ok(index)
}

/// Formats a basis index as a bitstring with qubit 0 rightmost.
fn format_bits(index: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|i| if (index >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}
