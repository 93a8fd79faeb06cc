//! Three-state discrete-time quantum walk on the line, with the Grover coin
//! and four decoherence models: phase damping, amplitude damping, stochastic
//! unitary coin noise and randomly broken links.
//!
//! The crate is organised bottom-up:
//!
//! - [`coin`]: 3×3 complex algebra on the chirality space (Grover coin,
//!   Gell-Mann basis, Hermitian exponential, Kraus sets, noise rotations).
//! - [`walk`]: pure spinor states, the coin+shift step and the observables
//!   built on them (position distribution, chirality totals, interference sums).
//! - [`density`]: joint position⊗chirality density matrices evolved under
//!   a unitary step followed by a Kraus channel.
//! - [`stochastic`]: seeded trajectories (random coin rotations, broken
//!   links) and Monte Carlo averaging.
//! - [`analysis`]: spreading statistics and classical reference models.

pub mod analysis;
pub mod coin;
pub mod density;
mod error;
pub mod rng;
pub mod stochastic;
pub mod walk;

pub use error::{Error, Result};

pub use num_complex::Complex64;
