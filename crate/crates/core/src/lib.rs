//! Random optimization workbench.
//!
//! Three families of random optimization problems share one framework:
//! maximize `H(σ, R)` over a solution space `Θ` where `R` is a random
//! instance.
//!
//! * [`instances`]: seeded generators for Erdős–Rényi graphs, Gaussian
//!   p-tensors and random K-SAT formulas, interpolation paths between
//!   independent instances, and the binary instance format.
//! * [`graphopt`]: greedy clique / independent-set algorithms, an exact
//!   branch-and-bound oracle and first-moment curves.
//! * [`spin`]: p-spin energies, exact ground states, Metropolis chains and
//!   the incremental guided walk.
//! * [`parisi`]: the zero-temperature Parisi PDE and functional, and its
//!   minimization over monotone and total-variation-bounded order
//!   parameters.
//! * [`ksat`]: clause evaluation, DPLL, WalkSAT, solution enumeration and
//!   moment curves.
//! * [`ogp`]: near-optimum sampling, overlap histograms, gap detection,
//!   clustering and interpolation-path overlap experiments.

pub mod bits;
pub mod error;
pub mod graphopt;
pub mod instances;
pub mod ksat;
pub mod ogp;
pub mod parisi;
pub mod rng;
pub mod spin;

pub use bits::BitConfig;
pub use error::{Error, FormatError, Result};
pub use instances::{ErGraph, GaussianTensor, Instance, InstanceKind, KSatFormula, Literal};
pub use rng::RngStream;
