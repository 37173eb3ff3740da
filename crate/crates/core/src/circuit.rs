//! Circuit intermediate representation: gates with optional multi-controls of
//! either polarity, verifier specs, and the text/JSON formats.
//!
//! # Text format
//!
//! ```text
//! qubits 3
//! h 0
//! cx 0 1
//! ctrl 2=0 : ry 0 1.5707963267948966e0
//! ```
//!
//! First line `qubits <N>`, then one gate per line: an optional control
//! prefix `ctrl <q>=<0|1> [...] :`, the lowercase mnemonic, the target
//! indices, and for `ry` a trailing angle in radians. Blank lines and lines
//! starting with `#` are skipped. Angles are written with 17 significant
//! digits so that parsing reproduces the exact binary64 value.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The gate alphabet. `Ry` carries its angle in radians; the convention is
/// `Ry(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]]`,
/// so a plane rotation by `phi` is `Ry(2*phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    T,
    Tdg,
    S,
    Sdg,
    Cx,
    Ccx,
    Ry(f64),
}

impl GateKind {
    /// Number of target qubits the kind acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx => 2,
            GateKind::Ccx => 3,
            _ => 1,
        }
    }

    /// Lowercase mnemonic used by the text format.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Cx => "cx",
            GateKind::Ccx => "ccx",
            GateKind::Ry(_) => "ry",
        }
    }

    /// The inverse kind. Self-inverse kinds return themselves.
    pub fn inverse(self) -> Self {
        match self {
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::Ry(theta) => GateKind::Ry(-theta),
            other => other,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// A single gate: a kind, its target qubits, and any number of additional
/// controls. A control `(q, true)` fires on `|1>`, `(q, false)` on `|0>`
/// (an open control). `Cx`/`Ccx` carry their standard controls inside
/// `targets`; `controls` is always extra on top.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<(usize, bool)>,
}

impl Gate {
    /// Gate without extra controls.
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Gate {
            kind,
            targets,
            controls: Vec::new(),
        }
    }

    /// Gate with extra controls of the given polarities.
    pub fn with_controls(kind: GateKind, targets: Vec<usize>, controls: Vec<(usize, bool)>) -> Self {
        Gate {
            kind,
            targets,
            controls,
        }
    }

    /// All qubits touched by the gate, targets first, then controls.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|&(q, _)| q))
    }

    /// The inverse gate: same wires, inverted kind.
    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// Checks arity, distinctness, and index bounds against `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let expected = self.kind.arity();
        if self.targets.len() != expected {
            return Err(Error::ArityMismatch {
                kind: self.kind.mnemonic(),
                expected,
                got: self.targets.len(),
            });
        }
        if let GateKind::Ry(theta) = self.kind {
            if !theta.is_finite() {
                return Err(Error::Syntax {
                    line: 0,
                    message: format!("non-finite ry angle {theta}"),
                });
            }
        }
        let mut seen = HashSet::new();
        for q in self.support() {
            if q >= num_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit { qubit: q });
            }
        }
        Ok(())
    }

    /// The gate's action reduced to canonical form: a 2x2 operation on the
    /// last target plus the full control list (built-in `Cx`/`Ccx` controls
    /// become explicit closed controls). This is what the simulator consumes.
    pub(crate) fn canonical(&self) -> (GateKind, usize, Vec<(usize, bool)>) {
        let mut controls = self.controls.clone();
        let (base, target) = match self.kind {
            GateKind::Cx => {
                controls.push((self.targets[0], true));
                (GateKind::X, self.targets[1])
            }
            GateKind::Ccx => {
                controls.push((self.targets[0], true));
                controls.push((self.targets[1], true));
                (GateKind::X, self.targets[2])
            }
            kind => (kind, self.targets[0]),
        };
        (base, target, controls)
    }
}

/// An ordered gate list on a fixed number of qubits. Circuits are immutable
/// values once built; every transformation returns a fresh circuit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(num_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit { num_qubits, gates }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Checks every gate against the circuit's qubit count.
    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            gate.validate(self.num_qubits)?;
        }
        Ok(())
    }

    /// The inverse circuit: gate order reversed, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Remaps every qubit through `mapping` onto a circuit with
    /// `new_num_qubits` wires. `mapping[q]` is the image of qubit `q`; it
    /// must be injective and land inside the new register.
    pub fn embed(&self, mapping: &[usize], new_num_qubits: usize) -> Result<Circuit> {
        if mapping.len() < self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: mapping.len(),
            });
        }
        let mut preimage = vec![usize::MAX; new_num_qubits];
        for (q, &img) in mapping.iter().enumerate().take(self.num_qubits) {
            if img >= new_num_qubits {
                return Err(Error::IndexOutOfRange {
                    index: img,
                    num_qubits: new_num_qubits,
                });
            }
            if preimage[img] != usize::MAX {
                return Err(Error::NonInjectiveMapping {
                    first: preimage[img],
                    second: q,
                    image: img,
                });
            }
            preimage[img] = q;
        }
        let gates = self
            .gates
            .iter()
            .map(|g| Gate {
                kind: g.kind,
                targets: g.targets.iter().map(|&q| mapping[q]).collect(),
                controls: g.controls.iter().map(|&(q, p)| (mapping[q], p)).collect(),
            })
            .collect();
        Ok(Circuit {
            num_qubits: new_num_qubits,
            gates,
        })
    }

    /// Appends all gates of `other` (same qubit count) after this circuit.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates,
        })
    }

    /// Renders the text format. The output round-trips through [`parse`]
    /// gate-for-gate, including exact `ry` angles.
    pub fn serialize(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        for gate in &self.gates {
            if !gate.controls.is_empty() {
                out.push_str("ctrl");
                for &(q, p) in &gate.controls {
                    let _ = write!(out, " {}={}", q, u8::from(p));
                }
                out.push_str(" : ");
            }
            out.push_str(gate.kind.mnemonic());
            for &q in &gate.targets {
                let _ = write!(out, " {q}");
            }
            if let GateKind::Ry(theta) = gate.kind {
                let _ = write!(out, " {theta:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the text circuit format. Returns a validated circuit.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (first_no, first) = lines.next().ok_or_else(|| Error::Syntax {
        line: 1,
        message: "empty input; expected `qubits <N>`".into(),
    })?;
    let num_qubits = match first.split_whitespace().collect::<Vec<_>>()[..] {
        ["qubits", n] => n.parse::<usize>().map_err(|_| Error::Syntax {
            line: first_no,
            message: format!("invalid qubit count `{n}`"),
        })?,
        _ => {
            return Err(Error::Syntax {
                line: first_no,
                message: format!("expected `qubits <N>`, got `{first}`"),
            })
        }
    };
    if num_qubits == 0 {
        return Err(Error::Syntax {
            line: first_no,
            message: "qubit count must be positive".into(),
        });
    }

    let mut circuit = Circuit::new(num_qubits);
    for (line_no, line) in lines {
        let gate = parse_gate_line(line, line_no)?;
        gate.validate(num_qubits)
            .map_err(|e| attach_line(e, line_no))?;
        circuit.push(gate);
    }
    Ok(circuit)
}

fn attach_line(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { message, .. } => Error::Syntax { line, message },
        other => other,
    }
}

fn parse_gate_line(line: &str, line_no: usize) -> Result<Gate> {
    let syntax = |message: String| Error::Syntax {
        line: line_no,
        message,
    };

    let mut controls = Vec::new();
    let mut rest = line;
    if let Some(stripped) = line.strip_prefix("ctrl") {
        let (ctrl_part, gate_part) = stripped
            .split_once(':')
            .ok_or_else(|| syntax("missing `:` after control list".into()))?;
        for token in ctrl_part.split_whitespace() {
            let (q, p) = token
                .split_once('=')
                .ok_or_else(|| syntax(format!("bad control `{token}`, expected <q>=<0|1>")))?;
            let qubit = q
                .parse::<usize>()
                .map_err(|_| syntax(format!("bad control qubit `{q}`")))?;
            let polarity = match p {
                "0" => false,
                "1" => true,
                _ => return Err(syntax(format!("bad control polarity `{p}`"))),
            };
            controls.push((qubit, polarity));
        }
        if controls.is_empty() {
            return Err(syntax("`ctrl` prefix with no controls".into()));
        }
        rest = gate_part;
    }

    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let (&mnemonic, args) = tokens
        .split_first()
        .ok_or_else(|| syntax("missing gate mnemonic".into()))?;

    let kind = match mnemonic {
        "h" => GateKind::H,
        "x" => GateKind::X,
        "t" => GateKind::T,
        "tdg" => GateKind::Tdg,
        "s" => GateKind::S,
        "sdg" => GateKind::Sdg,
        "cx" => GateKind::Cx,
        "ccx" => GateKind::Ccx,
        "ry" => {
            let angle_str = args.last().ok_or_else(|| syntax("ry needs an angle".into()))?;
            let theta = angle_str
                .parse::<f64>()
                .map_err(|_| syntax(format!("bad ry angle `{angle_str}`")))?;
            GateKind::Ry(theta)
        }
        other => {
            return Err(Error::UnknownGate {
                mnemonic: other.to_string(),
                line: line_no,
            })
        }
    };

    let index_args = if matches!(kind, GateKind::Ry(_)) {
        &args[..args.len() - 1]
    } else {
        args
    };
    if index_args.len() != kind.arity() {
        return Err(syntax(format!(
            "gate `{mnemonic}` expects {} qubit index(es), got {}",
            kind.arity(),
            index_args.len()
        )));
    }
    let targets = index_args
        .iter()
        .map(|a| {
            a.parse::<usize>()
                .map_err(|_| syntax(format!("bad qubit index `{a}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Gate {
        kind,
        targets,
        controls,
    })
}

/// A verifier: a circuit on `n_input + m_ancilla` qubits with a designated
/// output qubit. Input qubits are indices `0..n_input`, ancillas follow and
/// start in `|0...0>`. Acceptance of an input is the probability of
/// measuring the output qubit in `|1>` after the circuit runs. `epsilon` is
/// the instance's confidence parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierSpec {
    pub n_input: usize,
    pub m_ancilla: usize,
    pub output_qubit: usize,
    pub epsilon: f64,
    pub circuit: Circuit,
}

impl VerifierSpec {
    pub fn new(
        n_input: usize,
        m_ancilla: usize,
        output_qubit: usize,
        epsilon: f64,
        circuit: Circuit,
    ) -> Result<Self> {
        let spec = VerifierSpec {
            n_input,
            m_ancilla,
            output_qubit,
            epsilon,
            circuit,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn num_qubits(&self) -> usize {
        self.n_input + self.m_ancilla
    }

    /// Ancilla indices, `n_input..n_input + m_ancilla`.
    pub fn ancilla_qubits(&self) -> std::ops::Range<usize> {
        self.n_input..self.num_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        if self.circuit.num_qubits != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                got: self.circuit.num_qubits,
            });
        }
        if self.output_qubit >= self.num_qubits() {
            return Err(Error::IndexOutOfRange {
                index: self.output_qubit,
                num_qubits: self.num_qubits(),
            });
        }
        if !(0.0..=1.0 / 3.0).contains(&self.epsilon) {
            return Err(Error::EpsilonOutOfRange {
                epsilon: self.epsilon,
            });
        }
        self.circuit.validate()
    }

    /// Reads the JSON document form.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: VerifierDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            message: e.to_string(),
        })?;
        let circuit = parse(&doc.circuit)?;
        VerifierSpec::new(
            doc.n_input,
            doc.m_ancilla,
            doc.output_qubit,
            doc.epsilon,
            circuit,
        )
    }

    /// Writes the JSON document form with the circuit embedded in the text
    /// format.
    pub fn to_json(&self) -> String {
        let doc = VerifierDoc {
            n_input: self.n_input,
            m_ancilla: self.m_ancilla,
            output_qubit: self.output_qubit,
            epsilon: self.epsilon,
            circuit: self.circuit.serialize(),
        };
        serde_json::to_string_pretty(&doc).expect("verifier doc serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct VerifierDoc {
    n_input: usize,
    m_ancilla: usize,
    output_qubit: usize,
    epsilon: f64,
    circuit: String,
}
