//! Quantum-side optimization: an alternating seesaw over explicit matrices and
//! a dimension-free vector model.

mod seesaw;
mod vector_model;

pub use seesaw::{
    seesaw_optimize, seesaw_optimize_with_states, seesaw_restart, seesaw_restart_with_states, select_best,
};
pub use vector_model::{
    vector_model_optimize, vector_model_optimize_with, vector_model_value, VectorModel, VectorOptions,
};

use alloc::vec::Vec;

use crate::functional::Assignment;
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::rng::{complex_normal, SeededRng};
use crate::states::{Observable, QuantumState};
use crate::{tol, Error, Result};

/// Dichotomic observable maximizing `Tr(A·H)`: `A = sign(H)`, zero eigenvalues
/// mapped to `+1`.
pub fn best_response_observable(steering: &ComplexMatrix) -> Result<Observable> {
    let eig = hermitian_eig(steering)?;
    let a = eig.map_spectrum(|x| if x >= 0.0 { 1.0 } else { -1.0 });
    Ok(Observable::from_matrix_unchecked(a.hermitian_part()))
}

/// `U·diag(+1, …, −1, …)·U†` with `U` the eigenbasis of a random Hermitian
/// matrix; `⌈d/2⌉` eigenvalues are `+1`.
pub fn random_observable(rng: &mut SeededRng, d: usize) -> Observable {
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let h = &g + &g.adjoint();
    let eig = hermitian_eig(&h).expect("sum with adjoint is Hermitian");
    let plus = d.div_ceil(2);
    let signs: Vec<f64> = (0..d).map(|i| if i < plus { 1.0 } else { -1.0 }).collect();
    let u = &eig.eigenvectors;
    let a = &(u * &ComplexMatrix::diagonal(&signs)) * &u.adjoint();
    Observable::from_matrix_unchecked(a.hermitian_part())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeesawConfig {
    /// Local dimension of every edge party.
    pub edge_dim: usize,
    /// Dimension of each central sub-slot (one per source).
    pub central_dim: usize,
    /// Maximum number of sweeps per restart.
    pub max_iters: usize,
    /// Stop once a sweep improves the value by at most `tol·max(1, |value|)`.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl SeesawConfig {
    /// Local dimension `dim` everywhere, 5 restarts, seed 0.
    pub fn new(dim: usize) -> Self {
        Self {
            edge_dim: dim,
            central_dim: dim,
            max_iters: 1000,
            tol: 1e-13,
            restarts: 5,
            seed: 0,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.edge_dim < 2 || self.central_dim < 2 {
            return Err(Error::InvalidConfig("dimensions must be at least 2"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub value: f64,
    pub observables: Assignment,
    /// Edge parties first, then the central block.
    pub state: QuantumState,
    /// Sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    /// Value after initialization, then after every sweep.
    pub history: Vec<f64>,
    /// Index of the restart that produced this result.
    pub restart: usize,
    pub correlators: Vec<f64>,
}

pub(crate) fn check_total_dim(dim: usize) -> Result<()> {
    if dim > tol::MAX_TOTAL_DIM {
        return Err(Error::DimensionGuard {
            dim,
            limit: tol::MAX_TOTAL_DIM,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sigma_x, sigma_z};
    use crate::rng::rng_from_seed;

    #[test]
    fn best_response_examples() {
        assert!(best_response_observable(&sigma_z()).unwrap().matrix().max_abs_diff(&sigma_z()) < 1e-12);
        let h = sigma_x().scale(3.0);
        assert!(best_response_observable(&h).unwrap().matrix().max_abs_diff(&sigma_x()) < 1e-12);
        let h = ComplexMatrix::diagonal(&[2.0, -1.0, 0.5, -0.1]);
        let a = best_response_observable(&h).unwrap();
        assert!(a.matrix().max_abs_diff(&ComplexMatrix::diagonal(&[1.0, -1.0, 1.0, -1.0])) < 1e-12);
        let zero = ComplexMatrix::zeros(3, 3);
        let a = best_response_observable(&zero).unwrap();
        assert!(a.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn best_response_rejects_non_hermitian() {
        let mut h = sigma_z();
        h.set(0, 1, crate::C64::new(1.0, 0.0));
        assert!(matches!(best_response_observable(&h), Err(Error::NonHermitianInput(_))));
    }

    #[test]
    fn random_observables_are_involutions() {
        let mut rng = rng_from_seed(3);
        for d in 2..6 {
            let a = random_observable(&mut rng, d);
            assert!(Observable::new(a.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn config_validation() {
        assert!(SeesawConfig::new(2).validate().is_ok());
        assert!(SeesawConfig::new(1).validate().is_err());
        assert!(SeesawConfig::new(2).with_restarts(0).validate().is_err());
        assert!(SeesawConfig::new(2).with_tol(0.0).validate().is_err());
    }
}
