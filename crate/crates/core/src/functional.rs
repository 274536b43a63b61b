//! Term tables for the seven Bell and network functionals, their evaluation on
//! quantum assignments, and closed-form classical and quantum bounds.
//!
//! Every functional is a list of terms. Term `i` pairs, for each edge party
//! `k`, a signed combination `E^k_i = Σ_x c^k_{i,x} A^k_x` of that party's
//! observables with one central observable `B_i`; its correlator is
//! `I_i = ⟨E^1_i ⊗ … ⊗ E^n_i ⊗ B_i⟩`. The combiner is either the plain sum
//! `Σ I_i` or the root sum `Σ |I_i|^{1/n}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{apply_on_factors, inner, ComplexMatrix};
use crate::states::{Observable, QuantumState, StateData};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// `(A1+A2)B1 + (A1−A2)B2`.
    Chsh,
    /// `Σ_i (A_i + A_{i+1}) B_i` with `A_{m+1} = −A_1`.
    Chained,
    /// `Σ_i (Σ_x (−1)^{y^i_x} A_x) B_i` over the sign table.
    Gm,
    /// Bilocal `√|I1| + √|I2|`.
    BilocalS,
    /// Star `|I1|^{1/n} + |I2|^{1/n}`.
    StarSn,
    /// Star network over the sign table, `Σ_i |I_i|^{1/n}`.
    DeltaNm,
    /// Star network over the chained pattern, `Σ_i |J_i|^{1/n}`.
    XiM,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Chsh,
        Kind::Chained,
        Kind::Gm,
        Kind::BilocalS,
        Kind::StarSn,
        Kind::DeltaNm,
        Kind::XiM,
    ];

    /// Short lowercase name used on the command line and in JSON.
    pub fn name(self) -> &'static str {
        match self {
            Kind::Chsh => "chsh",
            Kind::Chained => "chained",
            Kind::Gm => "gm",
            Kind::BilocalS => "bilocal",
            Kind::StarSn => "star",
            Kind::DeltaNm => "delta",
            Kind::XiM => "xi",
        }
    }

    pub fn from_name(name: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_network(self) -> bool {
        matches!(self, Kind::BilocalS | Kind::StarSn | Kind::DeltaNm | Kind::XiM)
    }

    /// `(m, n)` used when a caller leaves them unspecified.
    pub fn default_scenario(self) -> (usize, usize) {
        match self {
            Kind::Chsh | Kind::Gm => (2, 1),
            Kind::Chained => (3, 1),
            Kind::BilocalS | Kind::StarSn => (2, 2),
            Kind::DeltaNm | Kind::XiM => (3, 2),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combiner {
    Linear,
    RootSum(usize),
}

impl Combiner {
    /// Applies the combiner to a list of correlators.
    pub fn combine(self, correlators: &[f64]) -> f64 {
        match self {
            Combiner::Linear => correlators.iter().sum(),
            Combiner::RootSum(n) => correlators.iter().map(|c| root(c.abs(), n)).sum(),
        }
    }

    pub fn root_order(self) -> usize {
        match self {
            Combiner::Linear => 1,
            Combiner::RootSum(n) => n,
        }
    }
}

/// Real positive `n`-th root; `root(0, n) = 0`.
pub fn root(x: f64, n: usize) -> f64 {
    match n {
        1 => x,
        2 => libm::sqrt(x),
        3 => libm::cbrt(x),
        _ if x == 0.0 => 0.0,
        _ => libm::pow(x, 1.0 / n as f64),
    }
}

/// Signs `(−1)^{y^i_x}` for the `2^{m−1}` bit strings with leading bit 0.
///
/// Row `i` (0-based) holds the string whose trailing `m − 1` bits spell the
/// integer `i` in binary, bit 2 most significant. Row 0 is all `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignTable {
    pub m: usize,
    pub rows: Vec<Vec<i8>>,
}

pub const MAX_SIGN_TABLE_M: usize = 16;

pub fn build_sign_table(m: usize) -> Result<SignTable> {
    if !(2..=MAX_SIGN_TABLE_M).contains(&m) {
        return Err(Error::OutOfRange {
            value: m,
            min: 2,
            max: MAX_SIGN_TABLE_M,
        });
    }
    let rows = (0..1usize << (m - 1))
        .map(|i| {
            let mut row = vec![1i8; m];
            for (x, s) in row.iter_mut().enumerate().skip(1) {
                if (i >> (m - 1 - x)) & 1 == 1 {
                    *s = -1;
                }
            }
            row
        })
        .collect();
    Ok(SignTable { m, rows })
}

/// One term: per-edge-party coefficient rows and the central input it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSpec {
    /// `coefficients[k][x]` multiplies observable `x` of edge party `k`.
    pub coefficients: Vec<Vec<i8>>,
    pub central_input: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional {
    pub kind: Kind,
    /// Settings per edge party.
    pub m: usize,
    /// Number of sources (edge parties).
    pub n: usize,
    pub combiner: Combiner,
    pub terms: Vec<TermSpec>,
}

fn chained_row(m: usize, i: usize) -> Vec<i8> {
    let mut row = vec![0i8; m];
    row[i] = 1;
    if i + 1 < m {
        row[i + 1] = 1;
    } else {
        row[0] = -1;
    }
    row
}

impl Functional {
    /// Builds the term table for `kind` with `m` settings per edge party and
    /// `n` sources, rejecting combinations the kind does not define.
    pub fn build(kind: Kind, m: usize, n: usize) -> Result<Self> {
        let scenario = |ok: bool, msg: &'static str| if ok { Ok(()) } else { Err(Error::InvalidScenario(msg)) };
        match kind {
            Kind::Chsh => scenario(m == 2 && n == 1, "chsh requires m = 2, n = 1")?,
            Kind::Chained => scenario(m >= 2 && n == 1, "chained requires m >= 2, n = 1")?,
            Kind::Gm => scenario(
                (2..=MAX_SIGN_TABLE_M).contains(&m) && n == 1,
                "gm requires 2 <= m <= 16, n = 1",
            )?,
            Kind::BilocalS => scenario(m == 2 && n == 2, "bilocal requires m = 2, n = 2")?,
            Kind::StarSn => scenario(m == 2 && n >= 1, "star requires m = 2, n >= 1")?,
            Kind::DeltaNm => scenario(
                (2..=MAX_SIGN_TABLE_M).contains(&m) && n >= 1,
                "delta requires 2 <= m <= 16, n >= 1",
            )?,
            Kind::XiM => scenario(m >= 2 && n >= 1, "xi requires m >= 2, n >= 1")?,
        }
        let rows: Vec<Vec<i8>> = match kind {
            Kind::Chsh | Kind::BilocalS | Kind::StarSn => vec![vec![1, 1], vec![1, -1]],
            Kind::Chained | Kind::XiM => (0..m).map(|i| chained_row(m, i)).collect(),
            Kind::Gm | Kind::DeltaNm => build_sign_table(m)?.rows,
        };
        let combiner = match kind {
            Kind::Chsh | Kind::Chained | Kind::Gm => Combiner::Linear,
            _ => Combiner::RootSum(n),
        };
        let terms = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| TermSpec {
                coefficients: vec![row; n],
                central_input: i,
            })
            .collect();
        Ok(Self {
            kind,
            m,
            n,
            combiner,
            terms,
        })
    }

    /// Number of distinct central inputs.
    pub fn central_inputs(&self) -> usize {
        self.terms.iter().map(|t| t.central_input + 1).max().unwrap_or(0)
    }

    pub fn combine(&self, correlators: &[f64]) -> f64 {
        self.combiner.combine(correlators)
    }

    /// Local bound: 2 for CHSH and the two-setting networks, `2m − 2` for the
    /// chained families, `m·C(m−1, ⌊(m−1)/2⌋)` for the sign-table families.
    pub fn classical_bound(&self) -> f64 {
        classical_bound(self.kind, self.m)
    }

    /// Optimal quantum value: `2√2`, `2m·cos(π/2m)` or `2^{m−1}√m`.
    pub fn quantum_bound(&self) -> f64 {
        quantum_bound(self.kind, self.m)
    }

    /// `Σ_x c^k_{i,x} A^k_x` as a matrix.
    pub fn edge_combination(&self, term: usize, party: usize, observables: &[Observable]) -> ComplexMatrix {
        signed_sum(&self.terms[term].coefficients[party], observables)
    }

    /// `Σ_k Σ_x |c^k_{i,x}|` product: the operator-norm ceiling of `|I_i|`.
    pub fn correlator_ceiling(&self, term: usize) -> f64 {
        self.terms[term]
            .coefficients
            .iter()
            .map(|row| row.iter().map(|c| c.unsigned_abs() as f64).sum::<f64>())
            .product()
    }
}

pub fn signed_sum(coefficients: &[i8], observables: &[Observable]) -> ComplexMatrix {
    let d = observables[0].dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (c, obs) in coefficients.iter().zip(observables) {
        if *c != 0 {
            out.add_scaled(obs.matrix(), *c as f64);
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

pub fn classical_bound(kind: Kind, m: usize) -> f64 {
    match kind {
        Kind::Chsh | Kind::BilocalS | Kind::StarSn => 2.0,
        Kind::Chained | Kind::XiM => (2 * m - 2) as f64,
        Kind::Gm | Kind::DeltaNm => {
            let m = m as u64;
            (m * binomial(m - 1, (m - 1) / 2)) as f64
        }
    }
}

/// `Σ_{j=0}^{⌊m/2⌋} C(m, j)(m − 2j)`, the other closed form of the sign-table bound.
pub fn sign_table_bound_sum_form(m: usize) -> f64 {
    let m = m as u64;
    (0..=m / 2).map(|j| (binomial(m, j) * (m - 2 * j)) as f64).sum()
}

pub fn quantum_bound(kind: Kind, m: usize) -> f64 {
    match kind {
        Kind::Chsh | Kind::BilocalS | Kind::StarSn => 2.0 * core::f64::consts::SQRT_2,
        Kind::Chained | Kind::XiM => {
            let mf = m as f64;
            2.0 * mf * libm::cos(core::f64::consts::PI / (2.0 * mf))
        }
        Kind::Gm | Kind::DeltaNm => libm::pow(2.0, (m - 1) as f64) * libm::sqrt(m as f64),
    }
}

/// Observables for every party.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// `edge[k][x]` is observable `x` of edge party `k`.
    pub edge: Vec<Vec<Observable>>,
    /// `central[i]` acts on the whole central block for central input `i`.
    pub central: Vec<Observable>,
}

impl Assignment {
    pub fn check(&self, f: &Functional) -> Result<()> {
        if self.edge.len() < f.n {
            return Err(Error::MissingObservable("fewer edge parties than sources"));
        }
        if self.edge[..f.n].iter().any(|obs| obs.len() < f.m) {
            return Err(Error::MissingObservable("edge party with fewer than m observables"));
        }
        if self.central.len() < f.central_inputs() {
            return Err(Error::MissingObservable("central party lacks an input"));
        }
        Ok(())
    }
}

/// One real correlator per term.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorSet {
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub correlators: CorrelatorSet,
}

fn check_network_dims(state: &QuantumState, edge_dims: &[usize], central_dim: usize) -> Result<()> {
    let dims = state.subsystem_dims();
    let n = edge_dims.len();
    if dims.len() <= n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: dims.len(),
        });
    }
    for (d, e) in dims.iter().zip(edge_dims) {
        if d != e {
            return Err(Error::DimensionMismatch {
                expected: *d,
                found: *e,
            });
        }
    }
    let slot: usize = dims[n..].iter().product();
    if slot != central_dim {
        return Err(Error::DimensionMismatch {
            expected: slot,
            found: central_dim,
        });
    }
    Ok(())
}

/// Applies `E_1 ⊗ … ⊗ E_n ⊗ B` to a vector laid out as `(A_1, …, A_n, central…)`.
fn apply_product(v: &[C64], dims: &[usize], edge_ops: &[ComplexMatrix], central: &ComplexMatrix) -> Vec<C64> {
    let n = edge_ops.len();
    let mut out = apply_on_factors(v, dims, n, dims.len(), central);
    for (k, op) in edge_ops.iter().enumerate() {
        out = apply_on_factors(&out, dims, k, k + 1, op);
    }
    out
}

use crate::C64;

/// `⟨E_1 ⊗ … ⊗ E_n ⊗ B⟩` on a state whose first `n` subsystems are the edge
/// parties and whose remaining subsystems form the central party's block.
pub fn eval_correlator(state: &QuantumState, edge_ops: &[ComplexMatrix], central: &ComplexMatrix) -> Result<f64> {
    let edge_dims: Vec<usize> = edge_ops.iter().map(ComplexMatrix::rows).collect();
    check_network_dims(state, &edge_dims, central.rows())?;
    if edge_ops.iter().any(|e| e.max_abs() == 0.0) {
        return Ok(0.0);
    }
    let dims = state.subsystem_dims();
    match state.data() {
        StateData::Pure(psi) => Ok(inner(psi, &apply_product(psi, dims, edge_ops, central)).re),
        StateData::Density(rho) => {
            let d = rho.rows();
            let mut acc = 0.0;
            for j in 0..d {
                let col = rho.column(j);
                acc += apply_product(&col, dims, edge_ops, central)[j].re;
            }
            Ok(acc)
        }
    }
}

/// Evaluates every correlator and applies the functional's combiner.
pub fn eval_functional(f: &Functional, state: &QuantumState, assignment: &Assignment) -> Result<Evaluation> {
    assignment.check(f)?;
    let values = (0..f.terms.len())
        .map(|i| {
            let edge: Vec<ComplexMatrix> = (0..f.n)
                .map(|k| f.edge_combination(i, k, &assignment.edge[k]))
                .collect();
            eval_correlator(state, &edge, assignment.central[f.terms[i].central_input].matrix())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Evaluation {
        value: f.combine(&values),
        correlators: CorrelatorSet { values },
    })
}
