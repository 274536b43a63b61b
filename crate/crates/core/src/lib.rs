//! Numerics for network Bell functionals.
//!
//! The crate covers the bipartite CHSH, chained and `G_m` expressions and the
//! star-network families (bilocal `S`, `S^n`, `Δ^n_m`, `Ξ_m`):
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   expectations and multi-factor tensor contractions.
//! * [`states`]: observables and states (Bloch parametrizations, maximally
//!   entangled pairs, Ginibre densities, anticommuting sets).
//! * [`functional`]: term tables, evaluation and closed-form bounds.
//! * [`classical`]: exhaustive deterministic strategies and n-local mixtures.
//! * [`optimize`]: seesaw over explicit observables and the real vector model.
//! * [`certify`]: sum-of-squares certificates, the two-qubit correlation
//!   matrix route and the bipartite/network correspondence scans.
//!
//! Everything here is `no_std` + `alloc`. File formats, the CLI and thread
//! pools live in the `netbell` crate.
#![no_std]
// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod certify;
pub mod classical;
mod error;
pub mod functional;
pub mod linalg;
pub mod optimize;
pub mod rng;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
