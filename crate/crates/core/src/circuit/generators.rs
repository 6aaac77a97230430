use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, CircuitError, Gate};

/// Quantum Fourier transform without the final qubit-reversal swaps.
///
/// Each controlled phase `CP(φ)` between wires `i < j` is realized as
/// `Rz(φ/2)_i Rz(φ/2)_j CNOT(i,j) Rz(-φ/2)_j CNOT(i,j)`, which is exact with no
/// global phase.
pub fn qft_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for i in 0..n {
        c.push(Gate::H(i)).expect("valid wire");
        for j in i + 1..n {
            let half = PI / 2f64.powi((j - i) as i32) / 2.0;
            for g in [
                Gate::rz(n, i, half),
                Gate::rz(n, j, half),
                Gate::cnot(i, j),
                Gate::rz(n, j, -half),
                Gate::cnot(i, j),
            ] {
                c.push(g).expect("valid wires");
            }
        }
    }
    c
}

/// Bernstein–Vazirani circuit on `n` qubits: `n - 1` data wires plus an ancilla
/// on the last wire. `secret[k]` selects a CNOT from data wire `k` to the ancilla.
pub fn bv_circuit(n: usize, secret: &[bool]) -> Result<Circuit, CircuitError> {
    assert!(n >= 2, "BV needs at least one data qubit and the ancilla");
    assert_eq!(secret.len(), n - 1, "secret length must be n - 1");
    let anc = n - 1;
    let mut c = Circuit::new(n);
    c.push(Gate::X(anc))?;
    for q in 0..n {
        c.push(Gate::H(q))?;
    }
    for (k, &bit) in secret.iter().enumerate() {
        if bit {
            c.push(Gate::cnot(k, anc))?;
        }
    }
    for q in 0..anc {
        c.push(Gate::H(q))?;
    }
    Ok(c)
}

/// Seeded random circuit of `depth` layers mixing Clifford gates and `Rz` rotations.
///
/// Each layer pairs qubits at random; a pair receives a CNOT with probability
/// one half, otherwise both qubits receive a random single-qubit gate.
pub fn random_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..depth {
        order.shuffle(&mut rng);
        for chunk in order.chunks(2) {
            if chunk.len() == 2 && rng.gen_bool(0.5) {
                c.push(Gate::cnot(chunk[0], chunk[1])).expect("valid wires");
                continue;
            }
            for &q in chunk {
                let g = match rng.gen_range(0..8) {
                    0 => Gate::H(q),
                    1 => Gate::S(q),
                    2 => Gate::Sdg(q),
                    3 => Gate::X(q),
                    4 => Gate::Y(q),
                    5 => Gate::Z(q),
                    _ => Gate::rz(n, q, rng.gen_range(-PI..PI)),
                };
                c.push(g).expect("valid wire");
            }
        }
    }
    c
}

/// Named benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Qft(usize),
    /// BV with the all-ones secret.
    Bv(usize),
    Random { n: usize, depth: usize, seed: u64 },
}

impl Benchmark {
    pub fn circuit(&self) -> Circuit {
        match *self {
            Benchmark::Qft(n) => qft_circuit(n),
            Benchmark::Bv(n) => bv_circuit(n, &vec![true; n - 1]).expect("valid BV size"),
            Benchmark::Random { n, depth, seed } => random_circuit(n, depth, seed),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Benchmark::Qft(n) => write!(f, "qft{n}"),
            Benchmark::Bv(n) => write!(f, "bv{n}"),
            Benchmark::Random { n, depth, seed } => write!(f, "random{n}x{depth}s{seed}"),
        }
    }
}

impl FromStr for Benchmark {
    type Err = CircuitError;

    /// Accepts `qft5`, `QFT_5`, `bv10`, `random4x10s7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase().replace('_', "");
        let bad = || CircuitError::UnknownBenchmark(s.to_string());
        if let Some(rest) = lower.strip_prefix("qft") {
            let n: usize = rest.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            return Ok(Benchmark::Qft(n));
        }
        if let Some(rest) = lower.strip_prefix("bv") {
            let n: usize = rest.parse().map_err(|_| bad())?;
            if n < 2 {
                return Err(bad());
            }
            return Ok(Benchmark::Bv(n));
        }
        if let Some(rest) = lower.strip_prefix("random") {
            let (n, rest) = rest.split_once('x').ok_or_else(bad)?;
            let (depth, seed) = rest.split_once('s').ok_or_else(bad)?;
            return Ok(Benchmark::Random {
                n: n.parse().map_err(|_| bad())?,
                depth: depth.parse().map_err(|_| bad())?,
                seed: seed.parse().map_err(|_| bad())?,
            });
        }
        Err(bad())
    }
}
