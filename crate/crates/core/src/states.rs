//! Observables and states.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, hermitian_eig, pauli, tensor_all, ComplexMatrix};
use crate::rng::{complex_normal, rng_from_seed};
use crate::{tol, Error, Result, C64};

/// A dichotomic (±1-outcome) measurement: a Hermitian involution.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > tol::HERMITIAN {
            return Err(Error::NonHermitianInput(herm));
        }
        let sq = matrix.matmul(&matrix);
        let err = sq.max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if err > tol::INVOLUTION {
            return Err(Error::NotInvolution(err));
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for matrices that are involutions by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn negated(&self) -> Self {
        Self {
            matrix: self.matrix.scale(-1.0),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn tensor(&self, other: &Observable) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(Vec<C64>),
    Density(ComplexMatrix),
}

/// Pure vector or density operator with declared subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    data: StateData,
    subsystem_dims: Vec<usize>,
}

fn check_dims(dims: &[usize], total: usize) -> Result<()> {
    let product: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || product != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: product,
        });
    }
    Ok(())
}

impl QuantumState {
    /// Pure state; the vector must have unit norm within [`tol::UNIT_NORM`].
    pub fn pure(amplitudes: Vec<C64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        check_dims(&subsystem_dims, amplitudes.len())?;
        let n = linalg::norm(&amplitudes);
        if (n - 1.0).abs() > tol::UNIT_NORM {
            return Err(Error::NonUnitVector(n));
        }
        Ok(Self {
            data: StateData::Pure(amplitudes),
            subsystem_dims,
        })
    }

    /// Pure state from an unnormalized nonzero vector.
    pub fn pure_normalized(mut amplitudes: Vec<C64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        check_dims(&subsystem_dims, amplitudes.len())?;
        if linalg::normalize(&mut amplitudes) == 0.0 {
            return Err(Error::InvalidState("zero vector"));
        }
        Ok(Self {
            data: StateData::Pure(amplitudes),
            subsystem_dims,
        })
    }

    /// Density operator: Hermitian, unit trace and PSD within the central tolerances.
    pub fn density(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix is not square"));
        }
        check_dims(&subsystem_dims, matrix.rows())?;
        let herm = matrix.hermiticity_error();
        if herm > tol::HERMITIAN {
            return Err(Error::NonHermitianInput(herm));
        }
        if (matrix.trace().re - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidState("trace differs from one"));
        }
        if linalg::min_eigenvalue(&matrix)? < tol::PSD {
            return Err(Error::InvalidState("density matrix is not positive semidefinite"));
        }
        Ok(Self {
            data: StateData::Density(matrix),
            subsystem_dims,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(subsystem_dims: &[usize], index: usize) -> Self {
        let d: usize = subsystem_dims.iter().product();
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[index] = C64::new(1.0, 0.0);
        Self {
            data: StateData::Pure(v),
            subsystem_dims: subsystem_dims.to_vec(),
        }
    }

    pub fn maximally_mixed(subsystem_dims: &[usize]) -> Self {
        let d: usize = subsystem_dims.iter().product();
        Self {
            data: StateData::Density(ComplexMatrix::identity(d).scale(1.0 / d as f64)),
            subsystem_dims: subsystem_dims.to_vec(),
        }
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        Self {
            data: StateData::Pure(vec![z, C64::new(h, 0.0), C64::new(-h, 0.0), z]),
            subsystem_dims: vec![2, 2],
        }
    }

    /// `p·|singlet⟩⟨singlet| + (1−p)·I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidState("Werner visibility outside [0, 1]"));
        }
        let singlet = Self::singlet().to_density_matrix();
        let mut rho = ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
        rho.add_scaled(&singlet, p);
        Ok(Self {
            data: StateData::Density(rho),
            subsystem_dims: vec![2, 2],
        })
    }

    pub fn dim(&self) -> usize {
        match &self.data {
            StateData::Pure(v) => v.len(),
            StateData::Density(m) => m.rows(),
        }
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure_vector(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn as_pure(&self) -> Option<&[C64]> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    pub fn to_density_matrix(&self) -> ComplexMatrix {
        match &self.data {
            StateData::Pure(v) => ComplexMatrix::outer(v, v),
            StateData::Density(m) => m.clone(),
        }
    }

    pub fn purity(&self) -> f64 {
        let rho = self.to_density_matrix();
        rho.matmul(&rho).trace().re
    }

    /// Same physical state with a global phase applied (pure vectors only change).
    pub fn with_global_phase(&self, phase: f64) -> Self {
        match &self.data {
            StateData::Pure(v) => {
                let p = C64::from_polar(1.0, phase);
                Self {
                    data: StateData::Pure(v.iter().map(|z| z * p).collect()),
                    subsystem_dims: self.subsystem_dims.clone(),
                }
            }
            StateData::Density(_) => self.clone(),
        }
    }

    /// Reduced density matrix on the contiguous subsystems `lo..hi`.
    pub fn reduced(&self, lo: usize, hi: usize) -> ComplexMatrix {
        linalg::reduced_density(&self.to_density_matrix(), &self.subsystem_dims, lo, hi)
    }

    /// Schmidt coefficients of a pure bipartite state split after subsystem `cut`.
    pub fn schmidt_coefficients(&self, cut: usize) -> Result<Vec<f64>> {
        if self.as_pure().is_none() {
            return Err(Error::DensityInput);
        }
        let reduced = self.reduced(0, cut);
        let eig = hermitian_eig(&reduced)?;
        let mut coeffs: Vec<f64> = eig
            .eigenvalues
            .iter()
            .rev()
            .map(|x| libm::sqrt(x.max(0.0)))
            .collect();
        coeffs.retain(|c| *c > 1e-12);
        Ok(coeffs)
    }
}

/// Real 3-vector of Pauli coefficients, ordered (x, y, z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    pub fn length(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|c| c * c).sum())
    }

    /// `v·σ` without any normalization check.
    pub fn dot_sigma(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2, 2);
        for (r, c) in self.0.iter().enumerate() {
            m.add_scaled(&pauli(r), *c);
        }
        m
    }
}

/// `v_x σx + v_y σy + v_z σz` for a unit Bloch vector.
pub fn observable_from_bloch(v: BlochVector) -> Result<Observable> {
    let len = v.length();
    if (len - 1.0).abs() > tol::UNIT_NORM {
        return Err(Error::NonUnitVector(len));
    }
    Ok(Observable::from_matrix_unchecked(v.dot_sigma()))
}

/// `(1/√d) Σ_i |ii⟩` on subsystem dims `(d, d)`.
pub fn maximally_entangled(d: usize) -> Result<QuantumState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let amp = C64::new(1.0 / libm::sqrt(d as f64), 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    Ok(QuantumState {
        data: StateData::Pure(v),
        subsystem_dims: vec![d, d],
    })
}

/// `cos θ|00⟩ + sin θ|11⟩`.
///
/// The family is meant for `θ ∈ [0, π/4]`. Other angles are reduced modulo π,
/// which changes the vector at most by a global sign.
pub fn schmidt_pure_two_qubit(theta: f64) -> QuantumState {
    let pi = core::f64::consts::PI;
    let t = theta - pi * libm::floor(theta / pi);
    let z = C64::new(0.0, 0.0);
    QuantumState {
        data: StateData::Pure(vec![
            C64::new(libm::cos(t), 0.0),
            z,
            z,
            C64::new(libm::sin(t), 0.0),
        ]),
        subsystem_dims: vec![2, 2],
    }
}

/// Ginibre-distributed two-qubit density of the given rank: `ρ = GG†/Tr GG†`
/// with `G` a 4×rank matrix of standard complex Gaussians drawn from the
/// ChaCha8 stream seeded by `seed`, row-major.
pub fn random_two_qubit_density(seed: u64, rank: usize) -> Result<QuantumState> {
    random_density(seed, rank, &[2, 2])
}

/// Ginibre density on arbitrary subsystem dimensions.
pub fn random_density(seed: u64, rank: usize, subsystem_dims: &[usize]) -> Result<QuantumState> {
    let d: usize = subsystem_dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::OutOfRange {
            value: rank,
            min: 1,
            max: d,
        });
    }
    let mut rng = rng_from_seed(seed);
    let g = ComplexMatrix::from_fn(d, rank, |_, _| complex_normal(&mut rng));
    let gg = g.matmul(&g.adjoint()).hermitian_part();
    let tr = gg.trace().re;
    Ok(QuantumState {
        data: StateData::Density(gg.scale(1.0 / tr)),
        subsystem_dims: subsystem_dims.to_vec(),
    })
}

/// Haar-random pure state from a seed.
pub fn random_pure_state(seed: u64, subsystem_dims: &[usize]) -> QuantumState {
    let d: usize = subsystem_dims.iter().product();
    let mut rng = rng_from_seed(seed);
    let v = (0..d).map(|_| complex_normal(&mut rng)).collect();
    QuantumState::pure_normalized(v, subsystem_dims.to_vec()).expect("Gaussian vector is nonzero")
}

/// `m` pairwise anticommuting Hermitian involutions on `2^⌊m/2⌋` dimensions.
///
/// Jordan–Wigner layout over `q = ⌊m/2⌋` qubits with `σy` as the string
/// operator: `Γ_{2k−1} = Y^{⊗(k−1)} ⊗ X ⊗ I…`, `Γ_{2k} = Y^{⊗(k−1)} ⊗ Z ⊗ I…`,
/// and for odd `m` a closing `Y^{⊗q}`. For `m = 2` this is `{σx, σz}` and for
/// `m = 3` it is `{σx, σz, σy}`.
pub fn anticommuting_set(m: usize) -> Result<Vec<Observable>> {
    if m < 2 {
        return Err(Error::OutOfRange {
            value: m,
            min: 2,
            max: usize::MAX,
        });
    }
    let q = m / 2;
    let (x, y, z, id) = (pauli(0), pauli(1), pauli(2), ComplexMatrix::identity(2));
    let string = |k: usize, site: &ComplexMatrix| {
        let mut factors: Vec<&ComplexMatrix> = Vec::with_capacity(q);
        for j in 0..q {
            factors.push(match j.cmp(&k) {
                core::cmp::Ordering::Less => &y,
                core::cmp::Ordering::Equal => site,
                core::cmp::Ordering::Greater => &id,
            });
        }
        Observable::from_matrix_unchecked(tensor_all(factors))
    };
    let mut out = Vec::with_capacity(m);
    for k in 0..q {
        out.push(string(k, &x));
        out.push(string(k, &z));
    }
    if m % 2 == 1 {
        out.push(Observable::from_matrix_unchecked(tensor_all(core::iter::repeat_n(&y, q))));
    }
    Ok(out)
}

/// Mixed-radix digits of `index` (first digit most significant).
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Joint state of a star network from one bipartite state per source.
///
/// Source `k` is a state on `(A_k, B^k)`. The result is ordered
/// `(A_1, …, A_n, B^1, …, B^n)`, so the central party's slots form one
/// contiguous block at the end. All-pure input gives a pure vector.
pub fn network_state(sources: &[QuantumState]) -> Result<QuantumState> {
    if sources.is_empty() {
        return Err(Error::InvalidState("no sources"));
    }
    for s in sources {
        if s.subsystem_dims().len() != 2 {
            return Err(Error::InvalidState("each source must be bipartite"));
        }
    }
    let n = sources.len();
    let mut dims: Vec<usize> = sources.iter().map(|s| s.subsystem_dims()[0]).collect();
    dims.extend(sources.iter().map(|s| s.subsystem_dims()[1]));
    let total: usize = dims.iter().product();
    let local = |k: usize, digits: &[usize]| digits[k] * dims[n + k] + digits[n + k];

    if sources.iter().all(QuantumState::is_pure_vector) {
        let vecs: Vec<&[C64]> = sources.iter().map(|s| s.as_pure().unwrap()).collect();
        let mut dg = vec![0; 2 * n];
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            digits(idx, &dims, &mut dg);
            let amp = (0..n).fold(C64::new(1.0, 0.0), |acc, k| acc * vecs[k][local(k, &dg)]);
            out.push(amp);
        }
        return Ok(QuantumState {
            data: StateData::Pure(out),
            subsystem_dims: dims,
        });
    }

    let rhos: Vec<ComplexMatrix> = sources.iter().map(QuantumState::to_density_matrix).collect();
    let mut di = vec![0; 2 * n];
    let mut dj = vec![0; 2 * n];
    let mut rho = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        digits(i, &dims, &mut di);
        for j in 0..total {
            digits(j, &dims, &mut dj);
            let v = (0..n).fold(C64::new(1.0, 0.0), |acc, k| {
                acc * rhos[k].get(local(k, &di), local(k, &dj))
            });
            rho.set(i, j, v);
        }
    }
    Ok(QuantumState {
        data: StateData::Density(rho),
        subsystem_dims: dims,
    })
}
