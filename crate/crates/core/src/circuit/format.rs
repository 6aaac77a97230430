use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, Gate};
use crate::pauli::{PauliKind, SignedPauli};

/// Parse failure with a 1-based line and column.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

/// Parses the line-oriented circuit format.
///
/// ```text
/// qubits 3
/// h 1
/// cnot 1 2
/// rz 2 0.785398
/// rot -X1*Z3 0.5
/// ```
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(head) = toks.first() else { continue };
        let err = |column: usize, message: String| ParseError { line: line_no, column, message };
        let keyword = head.text.to_ascii_lowercase();

        if keyword == "qubits" {
            if circuit.is_some() {
                return Err(err(head.column, "duplicate `qubits` header".into()));
            }
            let [_, count] = toks.as_slice() else {
                return Err(err(head.column, "expected `qubits N`".into()));
            };
            let n: usize = count.text.parse().map_err(|_| err(count.column, "invalid qubit count".into()))?;
            if n == 0 {
                return Err(err(count.column, "qubit count must be positive".into()));
            }
            circuit = Some(Circuit::new(n));
            continue;
        }

        let c = circuit.as_mut().ok_or_else(|| err(head.column, "missing `qubits N` header".into()))?;
        let n = c.num_qubits();
        let arity = match keyword.as_str() {
            "h" | "s" | "sdg" | "x" | "y" | "z" => 1,
            "cnot" | "swap" | "rz" | "rot" => 2,
            _ => return Err(err(head.column, format!("unknown gate `{}`", head.text))),
        };
        if toks.len() != arity + 1 {
            return Err(err(head.column, format!("`{keyword}` takes {arity} argument(s)")));
        }
        let wire = |t: &Token| -> Result<usize, ParseError> {
            let w: usize = t.text.parse().map_err(|_| err(t.column, format!("invalid wire `{}`", t.text)))?;
            if w == 0 || w > n {
                return Err(err(t.column, format!("wire {w} out of range 1..={n}")));
            }
            Ok(w - 1)
        };
        let angle = |t: &Token| -> Result<f64, ParseError> {
            let v: f64 = t.text.parse().map_err(|_| err(t.column, format!("invalid angle `{}`", t.text)))?;
            if !v.is_finite() {
                return Err(err(t.column, "angle must be finite".into()));
            }
            Ok(v)
        };
        let gate = match keyword.as_str() {
            "h" => Gate::H(wire(&toks[1])?),
            "s" => Gate::S(wire(&toks[1])?),
            "sdg" => Gate::Sdg(wire(&toks[1])?),
            "x" => Gate::X(wire(&toks[1])?),
            "y" => Gate::Y(wire(&toks[1])?),
            "z" => Gate::Z(wire(&toks[1])?),
            "cnot" => Gate::cnot(wire(&toks[1])?, wire(&toks[2])?),
            "swap" => Gate::Swap(wire(&toks[1])?, wire(&toks[2])?),
            "rz" => Gate::rz(n, wire(&toks[1])?, angle(&toks[2])?),
            _ => {
                let pauli = SignedPauli::parse(toks[1].text, n).map_err(|e| err(toks[1].column, e.to_string()))?;
                Gate::Rotation { pauli, theta: angle(&toks[2])? }
            }
        };
        c.push(gate).map_err(|e| err(head.column, e.to_string()))?;
    }
    circuit.ok_or(ParseError { line: 1, column: 1, message: "missing `qubits N` header".into() })
}

/// Renders a circuit in the text format; angles use the shortest exact decimal.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {}\n", c.num_qubits());
    for g in c.gates() {
        let line = match g {
            Gate::H(q) => format!("h {}", q + 1),
            Gate::S(q) => format!("s {}", q + 1),
            Gate::Sdg(q) => format!("sdg {}", q + 1),
            Gate::X(q) => format!("x {}", q + 1),
            Gate::Y(q) => format!("y {}", q + 1),
            Gate::Z(q) => format!("z {}", q + 1),
            Gate::Cnot { control, target } => format!("cnot {} {}", control + 1, target + 1),
            Gate::Swap(a, b) => format!("swap {} {}", a + 1, b + 1),
            Gate::Rotation { pauli, theta } => {
                let support = pauli.support();
                if support.len() == 1 && !pauli.is_negative() && pauli.kind(support[0]) == PauliKind::Z {
                    format!("rz {} {:?}", support[0] + 1, theta)
                } else {
                    format!("rot {} {:?}", pauli, theta)
                }
            }
        };
        let _ = writeln!(out, "{line}");
    }
    out
}
