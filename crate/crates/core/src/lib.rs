//! Continuous-time quantum walk evaluation of binary NAND trees.
//!
//! A NAND tree instance is written into a graph: a perfect binary tree whose
//! leaves are optionally joined to one extra node each (bit = 1 means the edge
//! is present), with the root hung off the middle of a long line of nodes, the
//! runway. The Hamiltonian is minus the adjacency matrix. A long right-moving
//! packet sent down the runway at energy near zero is transmitted when the
//! tree evaluates to 1 and reflected when it evaluates to 0, so a single
//! measurement on the right half of the runway reads out the root value after
//! a time proportional to the packet length, L = γ√N.
//!
//! Modules:
//!
//! * [`nand`]: instances, classical evaluation and the parity embedding.
//! * [`scattering`]: the edge-ratio recursion Y(E), transmission
//!   coefficients, and the near-zero-energy bound scan.
//! * [`lattice`]: sparse Hamiltonians for the oracle, driver and full graph.
//! * [`dynamics`]: the initial packet, Chebyshev and eigenbasis propagators,
//!   and the end-to-end algorithm.
//! * [`spectral`]: the packet's momentum spectrum and energy-window weights.
//! * [`harness`]: experiment configuration, sweeps, CSV/JSON output and the
//!   command-line entry point.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod nand;
pub mod quadrature;
pub mod scattering;
pub mod spectral;

pub use dynamics::{run_algorithm, RunConfig, StateVector, Verdict};
pub use error::{Error, Result};
pub use lattice::{build_driver, build_full, build_oracle, HamiltonianGraph, IndexMap, NodeId};
pub use nand::{embed_parity, eval_nand, randomized_eval, EvalTrace, TreeInput};
pub use scattering::{scan_bounds, transmission, y_at_zero, y_bottom, ProjectiveValue, SymbolicY};
