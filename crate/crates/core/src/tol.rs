//! Numerical tolerances shared by every module.
//!
//! Checks compare against these constants only; no call site picks its own.

/// Maximum `|M - M†|` entry for a matrix to count as Hermitian when the
/// property is claimed by a type (observables, densities).
pub const HERMITIAN: f64 = 1e-12;

/// Hermiticity required of eigensolver inputs, relative to `max(1, max|M|)`.
pub const HERMITIAN_INPUT: f64 = 1e-10;

/// `‖A² − I‖_max` allowed for a dichotomic observable.
pub const INVOLUTION: f64 = 1e-10;

/// A matrix is declared PSD iff its smallest eigenvalue is at least this.
pub const PSD: f64 = -1e-9;

/// Eigendecomposition reconstruction and orthonormality error.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Imaginary part tolerated (and discarded) in expectations of Hermitian operators.
pub const IMAGINARY: f64 = 1e-10;

/// Unit-norm tolerance for pure states and Bloch vectors.
pub const UNIT_NORM: f64 = 1e-12;

/// Trace-one tolerance for density matrices.
pub const TRACE: f64 = 1e-12;

/// Norm below which an SOS normalization `ω` is treated as vanishing.
pub const ZERO_NORM: f64 = 1e-12;

/// `|I_i|` below which a root-sum linearization weight is set to zero.
pub const ROOT_SUM_WEIGHT_FLOOR: f64 = 1e-9;

/// Largest total Hilbert-space dimension any optimizer will build.
pub const MAX_TOTAL_DIM: usize = 1 << 12;

/// Largest strategy space, in bits, the exhaustive classical search accepts.
pub const MAX_SEARCH_BITS: u32 = 34;
