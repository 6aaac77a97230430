//! Automatic test pattern generation for quantum circuits.
//!
//! A suspected faulty gate is distinguished from its fault-free version by an
//! optimal input state and a Helstrom measurement. Both are propagated through
//! the rest of the circuit as stabilizer projector decompositions (SPDs),
//! weighted sums of stabilizer projectors chosen by L1 minimization, so that
//! the test can be applied with Clifford preparation and measurement circuits
//! plus classical quasiprobability sampling.
//!
//! Module map:
//! - [`pauli`], [`stabilizer`], [`clifford`]: the stabilizer formalism.
//! - [`dense`]: dense matrix oracle and default device.
//! - [`circuit`]: gate IR, benchmarks, fault models, text format.
//! - [`discrim`]: optimal input and Helstrom measurement for one gate.
//! - [`lp`], [`spd`]: lexicographic L1 minimization and optimal SPDs.
//! - [`atpg`]: SPD propagation with locality exploitation.
//! - [`sampler`]: the quasiprobability test application protocol.
//! - [`detection`]: the fault-detection experiment harness.

pub mod atpg;
pub mod circuit;
pub mod clifford;
pub mod dense;
pub mod detection;
pub mod discrim;
pub mod gf2;
pub mod lp;
pub mod numeric;
pub mod pauli;
pub mod sampler;
pub mod spd;
pub mod stabilizer;

pub use circuit::{Circuit, FaultModel, Gate};
pub use pauli::SignedPauli;
pub use spd::Spd;
pub use stabilizer::StabilizerProjector;
