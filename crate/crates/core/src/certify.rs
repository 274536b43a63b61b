//! Certificates and theorem checks: two-qubit correlation matrices, the
//! singular-value CHSH and bilocal maxima, numerical sum-of-squares
//! certificates, and scans comparing network values with per-edge maxima.

use alloc::vec::Vec;

use crate::functional::{Assignment, Combiner, Functional, Kind};
use crate::linalg::{apply_on_factors, expectation, hermitian_eig, inner, norm, pauli, tensor_all, tensor_product, ComplexMatrix};
use crate::optimize::{seesaw_optimize_with_states, SeesawConfig};
use crate::rng::{derive_seed, rng_from_seed};
use crate::states::{random_two_qubit_density, QuantumState};
use crate::{tol, Error, Result, C64};

/// `t[r][s] = Tr[ρ(σ_r ⊗ σ_s)]`, Pauli order `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TMatrix {
    pub t: [[f64; 3]; 3],
}

impl TMatrix {
    /// Descending singular values, from the eigenvalues of `TᵀT` with
    /// negative round-off clamped to zero.
    pub fn singular_values(&self) -> [f64; 3] {
        let t = &self.t;
        let ttt = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((0..3).map(|r| t[r][i] * t[r][j]).sum(), 0.0));
        let eig = hermitian_eig(&ttt).expect("TᵀT is symmetric");
        let mut s = [0.0; 3];
        for (k, lambda) in eig.eigenvalues.iter().rev().enumerate() {
            s[k] = libm::sqrt(if *lambda < 0.0 { 0.0 } else { *lambda });
        }
        s
    }
}

fn check_two_qubit(rho: &QuantumState) -> Result<()> {
    if rho.subsystem_dims() != [2, 2] {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    Ok(())
}

pub fn correlation_matrix(rho: &QuantumState) -> Result<TMatrix> {
    check_two_qubit(rho)?;
    let mut t = [[0.0; 3]; 3];
    for (r, row) in t.iter_mut().enumerate() {
        for (s, v) in row.iter_mut().enumerate() {
            *v = expectation(rho, &tensor_product(&pauli(r), &pauli(s)))?;
        }
    }
    Ok(TMatrix { t })
}

/// `2√(t₁ + t₂)` with `t₁ ≥ t₂` the two largest eigenvalues of `TᵀT`.
pub fn horodecki_chsh_max(rho: &QuantumState) -> Result<f64> {
    let s = correlation_matrix(rho)?.singular_values();
    Ok(2.0 * libm::sqrt(s[0] * s[0] + s[1] * s[1]))
}

/// `2√(α₁η₁ + α₂η₂)` from the descending singular values of both T matrices.
pub fn bilocal_max_pair(rho_ab: &QuantumState, rho_bc: &QuantumState) -> Result<f64> {
    let a = correlation_matrix(rho_ab)?.singular_values();
    let b = correlation_matrix(rho_bc)?.singular_values();
    Ok(2.0 * libm::sqrt(a[0] * b[0] + a[1] * b[1]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosReport {
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    /// `ω_i = ‖(E^1_i ⊗ … ⊗ E^n_i)|ψ⟩‖`.
    pub omegas: Vec<f64>,
    /// `party_omegas[i][k] = ‖E^k_i|ψ⟩‖`.
    pub party_omegas: Vec<Vec<f64>>,
    /// `‖M_i|ψ⟩‖` with `M_i = E_i/ω_i − s_i B_i`.
    pub residuals: Vec<f64>,
    pub weights: Vec<f64>,
    /// `s_i`: `+1` for linear functionals, `sign(I_i)` for root sums.
    pub signs: Vec<i8>,
    pub correlators: Vec<f64>,
    pub value: f64,
    /// `Σ_i ω_i` (linear) or `Σ_i ω_i^{1/n}` (root sum).
    pub omega_bound: f64,
    /// `omega_bound − value`.
    pub gap: f64,
    /// `Σ_i (weight_i/2)·residual_i²`.
    pub weighted_residuals: f64,
    /// `⟨ψ|γ|ψ⟩`, when `γ` was assembled.
    pub gamma_expectation: Option<f64>,
    /// Smallest eigenvalue of `γ = Σ_i (weight_i/2) M_i†M_i`, when assembled.
    pub gamma_min_eig: Option<f64>,
}

impl SosReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, b| a.max(*b))
    }

    /// `gap ≥ −1e−9` and, if computed, `λ_min(γ) ≥ −1e−8`.
    pub fn passes(&self) -> bool {
        self.gap >= -1e-9 && self.gamma_min_eig.is_none_or(|e| e >= -1e-8)
    }
}

/// Largest total dimension for which `γ` is assembled and diagonalized.
pub const GAMMA_DIM_LIMIT: usize = 512;

/// `(1 − t^{1/n})/(1 − t)`, continuous at `t = 1`.
fn root_ratio(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let h = 1.0 - t;
    if h.abs() < 1e-6 {
        1.0 / nf + (nf - 1.0) / (2.0 * nf * nf) * h
    } else {
        (1.0 - root(t.max(0.0), n)) / h
    }
}

use crate::functional::root;

/// Numerical SOS certificate of the functional's `ω`-bound at a pure state.
///
/// With `u_i = E_i|ψ⟩` and `ω_i = ‖u_i‖`, each term satisfies
/// `s_i I_i = ω_i (1 − r_i²/2)`, where `r_i = ‖M_i|ψ⟩‖`. Weights are `ω_i` for
/// linear functionals and `ω_i^{1/n}(1 − t_i^{1/n})/(1 − t_i)` with
/// `t_i = 1 − r_i²/2` for root sums, so that `gap = Σ_i (weight_i/2) r_i²`.
pub fn sos_certificate(f: &Functional, state: &QuantumState, assignment: &Assignment) -> Result<SosReport> {
    let psi = state.as_pure().ok_or(Error::DensityInput)?;
    assignment.check(f)?;
    let dims = state.subsystem_dims();
    let n = f.n;
    if dims.len() <= n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: dims.len(),
        });
    }
    for (k, d) in dims.iter().enumerate().take(n) {
        if *d != assignment.edge[k][0].dim() {
            return Err(Error::DimensionMismatch {
                expected: *d,
                found: assignment.edge[k][0].dim(),
            });
        }
    }
    let central_dim: usize = dims[n..].iter().product();
    for b in &assignment.central {
        if b.dim() != central_dim {
            return Err(Error::DimensionMismatch {
                expected: central_dim,
                found: b.dim(),
            });
        }
    }
    let terms = f.terms.len();
    let mut omegas = Vec::with_capacity(terms);
    let mut party_omegas = Vec::with_capacity(terms);
    let mut residuals = Vec::with_capacity(terms);
    let mut weights = Vec::with_capacity(terms);
    let mut signs = Vec::with_capacity(terms);
    let mut correlators = Vec::with_capacity(terms);
    let mut edge_ops = Vec::with_capacity(terms);
    for i in 0..terms {
        let ops: Vec<ComplexMatrix> = (0..n).map(|k| f.edge_combination(i, k, &assignment.edge[k])).collect();
        party_omegas.push(
            ops.iter()
                .enumerate()
                .map(|(k, e)| norm(&apply_on_factors(psi, dims, k, k + 1, e)))
                .collect::<Vec<f64>>(),
        );
        let mut u = psi.to_vec();
        for (k, e) in ops.iter().enumerate() {
            u = apply_on_factors(&u, dims, k, k + 1, e);
        }
        let omega = norm(&u);
        if omega <= tol::ZERO_NORM {
            return Err(Error::ZeroNorm { term: i, omega });
        }
        let b = assignment.central[f.terms[i].central_input].matrix();
        let bpsi = apply_on_factors(psi, dims, n, dims.len(), b);
        let corr = inner(&u, &bpsi).re;
        let s: i8 = match f.combiner {
            Combiner::Linear => 1,
            Combiner::RootSum(_) => {
                if corr < 0.0 {
                    -1
                } else {
                    1
                }
            }
        };
        let r = norm(
            &u.iter()
                .zip(&bpsi)
                .map(|(a, b)| a / omega - b * s as f64)
                .collect::<Vec<C64>>(),
        );
        let w = match f.combiner {
            Combiner::Linear => omega,
            Combiner::RootSum(order) => root(omega, order) * root_ratio(1.0 - r * r / 2.0, order),
        };
        omegas.push(omega);
        residuals.push(r);
        weights.push(w);
        signs.push(s);
        correlators.push(corr);
        edge_ops.push(ops);
    }
    let value = f.combine(&correlators);
    let omega_bound: f64 = omegas.iter().map(|w| root(*w, f.combiner.root_order())).sum();
    let weighted_residuals = weights.iter().zip(&residuals).map(|(w, r)| w / 2.0 * r * r).sum();
    let (gamma_expectation, gamma_min_eig) = if state.dim() <= GAMMA_DIM_LIMIT {
        let ident_c = ComplexMatrix::identity(central_dim);
        let mut gamma = ComplexMatrix::zeros(state.dim(), state.dim());
        for i in 0..terms {
            let mut factors: Vec<&ComplexMatrix> = edge_ops[i].iter().collect();
            factors.push(&ident_c);
            let e_full = tensor_all(factors);
            let edge_ident = ComplexMatrix::identity(e_full.rows() / central_dim);
            let b_full = tensor_product(&edge_ident, assignment.central[f.terms[i].central_input].matrix());
            let mut mi = e_full.scale(1.0 / omegas[i]);
            mi.add_scaled(&b_full, -(signs[i] as f64));
            gamma.add_scaled(&(&mi.adjoint() * &mi), weights[i] / 2.0);
        }
        let gamma = gamma.hermitian_part();
        let exp = inner(psi, &gamma.apply(psi)).re;
        (Some(exp), Some(hermitian_eig(&gamma)?.eigenvalues[0]))
    } else {
        (None, None)
    };
    Ok(SosReport {
        kind: f.kind,
        m: f.m,
        n: f.n,
        omegas,
        party_omegas,
        residuals,
        weights,
        signs,
        correlators,
        value,
        omega_bound,
        gap: omega_bound - value,
        weighted_residuals,
        gamma_expectation,
        gamma_min_eig,
    })
}

/// Which network family a correspondence scan compares against its edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Bilocal `S` against two CHSH maxima, all in closed form.
    Bilocal,
    /// Star `S^n` by seesaw against `n` CHSH maxima in closed form.
    Star { n: usize },
    /// `Ξ_m` by seesaw against `n` chained maxima by seesaw.
    Xi { m: usize, n: usize },
}

impl Family {
    pub fn sources(self) -> usize {
        match self {
            Family::Bilocal => 2,
            Family::Star { n } | Family::Xi { n, .. } => n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Bilocal => "bilocal",
            Family::Star { .. } => "star",
            Family::Xi { .. } => "xi",
        }
    }

    pub fn functional(self) -> Result<Functional> {
        match self {
            Family::Bilocal => Functional::build(Kind::BilocalS, 2, 2),
            Family::Star { n } => Functional::build(Kind::StarSn, 2, n),
            Family::Xi { m, n } => Functional::build(Kind::XiM, m, n),
        }
    }

    /// Bound the network value would violate if it exceeded it.
    pub fn classical_bound(self) -> f64 {
        match self {
            Family::Bilocal | Family::Star { .. } => 2.0,
            Family::Xi { m, .. } => (2 * m - 2) as f64,
        }
    }
}

/// Seesaw effort used for scan maxima.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSettings {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 400,
            tol: 1e-11,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceTrial {
    pub seed: u64,
    /// Ranks the random sources were drawn with; empty for supplied states.
    pub ranks: Vec<usize>,
    pub edge_maxima: Vec<f64>,
    pub network_value: f64,
    /// `Π_k (edge max)^{1/n}`.
    pub bound: f64,
    /// `bound − network_value`.
    pub margin: f64,
    /// `network_value ≤ bound + 1e−9`.
    pub satisfied: bool,
    /// Every edge maximum exceeds its local bound.
    pub all_edges_violate: bool,
    pub network_violates: bool,
}

impl CorrespondenceTrial {
    /// Edges all violating without the network violating.
    pub fn implication_failed(&self) -> bool {
        self.all_edges_violate && !self.network_violates
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport {
    pub family: Family,
    pub seed: u64,
    pub settings: ScanSettings,
    pub trials: Vec<CorrespondenceTrial>,
    pub violations: usize,
    pub implication_checked: usize,
    pub implication_failures: usize,
}

impl CorrespondenceReport {
    pub fn from_trials(family: Family, seed: u64, settings: ScanSettings, trials: Vec<CorrespondenceTrial>) -> Self {
        let violations = trials.iter().filter(|t| !t.satisfied).count();
        let implication_checked = trials.iter().filter(|t| t.all_edges_violate).count();
        let implication_failures = trials.iter().filter(|t| t.implication_failed()).count();
        Self {
            family,
            seed,
            settings,
            trials,
            violations,
            implication_checked,
            implication_failures,
        }
    }
}

/// Random per-source states for trial seed `seed`: ranks uniform on `1..=4`,
/// source `k` drawn from `derive_seed(seed, k)`.
pub fn random_sources(family: Family, seed: u64) -> Result<(Vec<usize>, Vec<QuantumState>)> {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let mut ranks = Vec::new();
    let mut states = Vec::new();
    for k in 0..family.sources() {
        let rank = rng.random_range(1..=4usize);
        ranks.push(rank);
        states.push(random_two_qubit_density(derive_seed(seed, k as u64), rank)?);
    }
    Ok((ranks, states))
}

/// Compares the network value of the given sources with their edge maxima.
pub fn correspondence_trial_with_states(
    family: Family,
    states: &[QuantumState],
    seed: u64,
    settings: &ScanSettings,
) -> Result<CorrespondenceTrial> {
    if states.len() != family.sources() {
        return Err(Error::ShapeMismatch("one state per source"));
    }
    let cfg = SeesawConfig::new(2)
        .with_restarts(settings.restarts)
        .with_iters(settings.max_iters)
        .with_tol(settings.tol)
        .with_seed(seed);
    let local = match family {
        Family::Bilocal | Family::Star { .. } => 2.0,
        Family::Xi { m, .. } => (2 * m - 2) as f64,
    };
    // Bilocal compares two closed forms over traceless observables. The
    // seesaw families range over all observables, where +-I realize every
    // deterministic strategy, so their edge maxima are at least `local`.
    let edge_maxima: Vec<f64> = match family {
        Family::Bilocal => states.iter().map(horodecki_chsh_max).collect::<Result<_>>()?,
        Family::Star { .. } => {
            let chsh = Functional::build(Kind::Chsh, 2, 1)?;
            states
                .iter()
                .map(|s| {
                    let v = seesaw_optimize_with_states(&chsh, core::slice::from_ref(s), &cfg)?.value;
                    Ok(v.max(horodecki_chsh_max(s)?).max(local))
                })
                .collect::<Result<_>>()?
        }
        Family::Xi { m, .. } => {
            let chained = Functional::build(Kind::Chained, m, 1)?;
            states
                .iter()
                .map(|s| Ok(seesaw_optimize_with_states(&chained, core::slice::from_ref(s), &cfg)?.value.max(local)))
                .collect::<Result<_>>()?
        }
    };
    let network_value = match family {
        Family::Bilocal => bilocal_max_pair(&states[0], &states[1])?,
        _ => seesaw_optimize_with_states(&family.functional()?, states, &cfg)?.value,
    };
    let n = family.sources();
    let bound: f64 = edge_maxima.iter().map(|b| root(b.max(0.0), n)).product();
    Ok(CorrespondenceTrial {
        seed,
        ranks: Vec::new(),
        margin: bound - network_value,
        satisfied: network_value <= bound + 1e-9,
        all_edges_violate: edge_maxima.iter().all(|b| *b > local),
        network_violates: network_value > family.classical_bound(),
        edge_maxima,
        network_value,
        bound,
    })
}

/// One trial on random sources drawn from `seed`.
pub fn correspondence_trial(family: Family, seed: u64, settings: &ScanSettings) -> Result<CorrespondenceTrial> {
    let (ranks, states) = random_sources(family, seed)?;
    let mut trial = correspondence_trial_with_states(family, &states, seed, settings)?;
    trial.ranks = ranks;
    Ok(trial)
}

/// Runs `trials` random trials; trial `t` uses seed `derive_seed(seed, t)`.
pub fn correspondence_scan(family: Family, trials: usize, seed: u64) -> Result<CorrespondenceReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1"));
    }
    let settings = ScanSettings::default();
    let rows = (0..trials)
        .map(|t| correspondence_trial(family, derive_seed(seed, t as u64), &settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrespondenceReport::from_trials(family, seed, settings, rows))
}
