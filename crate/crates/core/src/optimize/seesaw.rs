//! Alternating maximization over per-source states, edge observables and
//! central observables.
//!
//! Internally the Hilbert space is ordered `[R_1..R_n, A_1..A_n, B^1..B^n]`,
//! where source `k` prepares a vector on `R_k ⊗ A_k ⊗ B^k`. `R_k` is a
//! purifying ancilla of dimension 1 unless a fixed mixed state was supplied.
//! The central observable of each term acts on the whole `B^1..B^n` block.
//!
//! Root-sum functionals are handled through their linearization
//! `Σ w_i I_i`, `w_i = (1/n)|I_i|^{1/n−1} sign(I_i)`. Every block update is
//! kept only if the true value does not decrease, so histories are monotone.

use alloc::vec;
use alloc::vec::Vec;

use super::{best_response_observable, check_total_dim, random_observable, OptimizationResult, SeesawConfig};
use crate::functional::{eval_functional, Assignment, Combiner, Functional};
use crate::linalg::{apply_on_factors, hermitian_eig, inner, partial_cross, ComplexMatrix};
use crate::rng::{complex_normal, derive_seed, rng_from_seed};
use crate::states::{digits, network_state, Observable, QuantumState, StateData};
use crate::{tol, Error, Result, C64};

struct Engine<'a> {
    f: &'a Functional,
    n: usize,
    /// Per-source factor dims `(r_k, d, dc)`.
    local: Vec<[usize; 3]>,
    /// Global factor dims `[r.., d.., dc..]`.
    dims: Vec<usize>,
    sources: Vec<Vec<C64>>,
    edge: Vec<Vec<Observable>>,
    central: Vec<Observable>,
    psi: Vec<C64>,
    correlators: Vec<f64>,
    value: f64,
    states_fixed: bool,
}

impl<'a> Engine<'a> {
    fn assemble(&self) -> Vec<C64> {
        assemble(&self.sources, &self.local, &self.dims)
    }

    /// `O_i v`, optionally leaving edge party `skip_edge` or the central block as identity.
    fn apply_term(&self, i: usize, v: &[C64], skip_edge: Option<usize>, skip_central: bool) -> Vec<C64> {
        let n = self.n;
        let term = &self.f.terms[i];
        let mut out = if skip_central {
            v.to_vec()
        } else {
            apply_on_factors(v, &self.dims, 2 * n, 3 * n, self.central[term.central_input].matrix())
        };
        for k in 0..n {
            if Some(k) == skip_edge {
                continue;
            }
            let e = self.f.edge_combination(i, k, &self.edge[k]);
            out = apply_on_factors(&out, &self.dims, n + k, n + k + 1, &e);
        }
        out
    }

    fn refresh(&mut self) {
        self.psi = self.assemble();
        self.correlators = (0..self.f.terms.len())
            .map(|i| inner(&self.psi, &self.apply_term(i, &self.psi, None, false)).re)
            .collect();
        self.value = self.f.combine(&self.correlators);
    }

    fn weights(&self) -> Vec<f64> {
        linearization_weights(self.f.combiner, &self.correlators)
    }

    /// Runs `update`, keeping its effect only if the value does not drop.
    fn guarded(&mut self, update: impl FnOnce(&mut Self) -> Result<()>) -> Result<()> {
        let saved = (self.sources.clone(), self.edge.clone(), self.central.clone());
        let (psi, cors, value) = (self.psi.clone(), self.correlators.clone(), self.value);
        update(self)?;
        self.refresh();
        if !(self.value >= value) {
            (self.sources, self.edge, self.central) = saved;
            (self.psi, self.correlators, self.value) = (psi, cors, value);
        }
        Ok(())
    }

    fn update_source(&mut self, k: usize) -> Result<()> {
        let w = self.weights();
        let dim_k: usize = self.local[k].iter().product();
        let embed = |me: &Self, b: usize| {
            let mut srcs = me.sources.clone();
            srcs[k] = vec![C64::new(0.0, 0.0); dim_k];
            srcs[k][b] = C64::new(1.0, 0.0);
            assemble(&srcs, &me.local, &me.dims)
        };
        let basis: Vec<Vec<C64>> = (0..dim_k).map(|b| embed(self, b)).collect();
        let mut op = ComplexMatrix::zeros(dim_k, dim_k);
        for (b, vb) in basis.iter().enumerate() {
            let mut wb = vec![C64::new(0.0, 0.0); vb.len()];
            for (i, wi) in w.iter().enumerate() {
                if *wi == 0.0 {
                    continue;
                }
                for (acc, x) in wb.iter_mut().zip(self.apply_term(i, vb, None, false)) {
                    *acc += x * *wi;
                }
            }
            for (a, va) in basis.iter().enumerate() {
                op.set(a, b, inner(va, &wb));
            }
        }
        let eig = hermitian_eig(&op.hermitian_part())?;
        self.sources[k] = eig.top_eigenvector();
        Ok(())
    }

    fn update_edge(&mut self, k: usize, x: usize) -> Result<()> {
        let w = self.weights();
        let d = self.edge[k][x].dim();
        let mut h = ComplexMatrix::zeros(d, d);
        for (i, term) in self.f.terms.iter().enumerate() {
            let c = term.coefficients[k][x];
            if c == 0 || w[i] == 0.0 {
                continue;
            }
            let phi = self.apply_term(i, &self.psi, Some(k), false);
            let m = partial_cross(&phi, &self.psi, &self.dims, self.n + k, self.n + k + 1);
            h.add_scaled(&m.hermitian_part(), w[i] * c as f64);
        }
        self.edge[k][x] = best_response_observable(&h)?;
        Ok(())
    }

    fn update_central(&mut self, j: usize) -> Result<()> {
        let users: Vec<usize> = (0..self.f.terms.len())
            .filter(|i| self.f.terms[*i].central_input == j)
            .collect();
        // A lone root-sum term only needs |I_i| maximized, which sign(H) does exactly.
        let w = if users.len() == 1 {
            vec![1.0; self.f.terms.len()]
        } else {
            self.weights()
        };
        let dc = self.central[j].dim();
        let mut h = ComplexMatrix::zeros(dc, dc);
        for &i in &users {
            if w[i] == 0.0 {
                continue;
            }
            let phi = self.apply_term(i, &self.psi, None, true);
            let m = partial_cross(&phi, &self.psi, &self.dims, 2 * self.n, 3 * self.n);
            h.add_scaled(&m.hermitian_part(), w[i]);
        }
        self.central[j] = best_response_observable(&h)?;
        Ok(())
    }

    fn sweep(&mut self) -> Result<()> {
        if !self.states_fixed {
            for k in 0..self.n {
                self.guarded(|e| e.update_source(k))?;
            }
        }
        for k in 0..self.n {
            for x in 0..self.f.m {
                self.guarded(|e| e.update_edge(k, x))?;
            }
        }
        for j in 0..self.central.len() {
            self.guarded(|e| e.update_central(j))?;
        }
        Ok(())
    }
}

/// Gradient weights of the combiner at the given correlators. Terms with
/// `|I_i|` under the floor get weight 0; if every weight vanishes all become 1.
pub(crate) fn linearization_weights(combiner: Combiner, correlators: &[f64]) -> Vec<f64> {
    match combiner {
        Combiner::Linear => vec![1.0; correlators.len()],
        Combiner::RootSum(n) => {
            let nf = n as f64;
            let w: Vec<f64> = correlators
                .iter()
                .map(|c| {
                    if c.abs() < tol::ROOT_SUM_WEIGHT_FLOOR {
                        0.0
                    } else {
                        libm::pow(c.abs(), 1.0 / nf - 1.0) / nf * c.signum()
                    }
                })
                .collect();
            if w.iter().all(|x| *x == 0.0) {
                vec![1.0; correlators.len()]
            } else {
                w
            }
        }
    }
}

/// Product of per-source vectors laid out as `[R.., A.., B..]`.
fn assemble(sources: &[Vec<C64>], local: &[[usize; 3]], dims: &[usize]) -> Vec<C64> {
    let n = sources.len();
    let total: usize = dims.iter().product();
    let mut out = vec![C64::new(0.0, 0.0); total];
    let mut idx = vec![0usize; dims.len()];
    for (g, o) in out.iter_mut().enumerate() {
        digits(g, dims, &mut idx);
        let mut amp = C64::new(1.0, 0.0);
        for k in 0..n {
            let [_, d, dc] = local[k];
            let li = (idx[k] * d + idx[n + k]) * dc + idx[2 * n + k];
            amp *= sources[k][li];
            if amp == C64::new(0.0, 0.0) {
                break;
            }
        }
        *o = amp;
    }
    out
}

/// `Σ_j √λ_j |j⟩_R ⊗ |v_j⟩` for a state on `A ⊗ B`.
fn purify(state: &QuantumState) -> Result<(usize, Vec<C64>)> {
    match state.data() {
        StateData::Pure(v) => Ok((1, v.clone())),
        StateData::Density(rho) => {
            let eig = hermitian_eig(rho)?;
            let d = rho.rows();
            let kept: Vec<usize> = (0..d).filter(|j| eig.eigenvalues[*j] > 1e-14).collect();
            let r = kept.len().max(1);
            let mut out = vec![C64::new(0.0, 0.0); r * d];
            for (slot, &j) in kept.iter().enumerate() {
                let s = libm::sqrt(eig.eigenvalues[j]);
                for a in 0..d {
                    out[slot * d + a] = eig.eigenvectors.get(a, j) * s;
                }
            }
            Ok((r, out))
        }
    }
}

fn random_unit(rng: &mut crate::rng::SeededRng, len: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..len).map(|_| complex_normal(rng)).collect();
    crate::linalg::normalize(&mut v);
    v
}

fn build_engine<'a>(
    f: &'a Functional,
    cfg: &SeesawConfig,
    restart: usize,
    fixed: Option<&[QuantumState]>,
) -> Result<Engine<'a>> {
    cfg.validate()?;
    let n = f.n;
    let (d, dc) = (cfg.edge_dim, cfg.central_dim);
    let mut rng = rng_from_seed(derive_seed(cfg.seed, restart as u64));
    let (local, sources): (Vec<[usize; 3]>, Vec<Vec<C64>>) = match fixed {
        Some(states) => {
            if states.len() != n {
                return Err(Error::ShapeMismatch("one state per source"));
            }
            let mut local = Vec::with_capacity(n);
            let mut sources = Vec::with_capacity(n);
            for s in states {
                if s.subsystem_dims() != [d, dc] {
                    return Err(Error::DimensionMismatch {
                        expected: d * dc,
                        found: s.dim(),
                    });
                }
                let (r, v) = purify(s)?;
                local.push([r, d, dc]);
                sources.push(v);
            }
            (local, sources)
        }
        None => {
            let total = (d * dc).checked_pow(n as u32).unwrap_or(usize::MAX);
            check_total_dim(total)?;
            let local = vec![[1, d, dc]; n];
            let sources = (0..n).map(|_| random_unit(&mut rng, d * dc)).collect();
            (local, sources)
        }
    };
    let mut dims: Vec<usize> = local.iter().map(|l| l[0]).collect();
    dims.extend(core::iter::repeat_n(d, n));
    dims.extend(core::iter::repeat_n(dc, n));
    check_total_dim(dims.iter().product())?;
    let central_dim = dc.pow(n as u32);
    let edge = (0..n)
        .map(|_| (0..f.m).map(|_| random_observable(&mut rng, d)).collect())
        .collect();
    let central = (0..f.central_inputs())
        .map(|_| random_observable(&mut rng, central_dim))
        .collect();
    let mut engine = Engine {
        f,
        n,
        local,
        dims,
        sources,
        edge,
        central,
        psi: Vec::new(),
        correlators: Vec::new(),
        value: 0.0,
        states_fixed: fixed.is_some(),
    };
    engine.refresh();
    Ok(engine)
}

fn run(mut engine: Engine<'_>, cfg: &SeesawConfig, restart: usize, fixed: Option<&[QuantumState]>) -> Result<OptimizationResult> {
    let mut history = vec![engine.value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let before = engine.value;
        engine.sweep()?;
        iterations += 1;
        history.push(engine.value);
        if engine.value - before <= cfg.tol * engine.value.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    let state = match fixed {
        Some(states) => network_state(states)?,
        None => {
            let mut dims = vec![engine.local[0][1]; engine.n];
            dims.extend(core::iter::repeat_n(engine.local[0][2], engine.n));
            QuantumState::pure_normalized(engine.psi.clone(), dims)?
        }
    };
    let observables = Assignment {
        edge: engine.edge,
        central: engine.central,
    };
    let check = eval_functional(engine.f, &state, &observables)?;
    Ok(OptimizationResult {
        value: check.value,
        observables,
        state,
        iterations,
        converged,
        history,
        restart,
        correlators: check.correlators.values,
    })
}

/// One restart with state, edge and central updates; the restart's seed is
/// `derive_seed(cfg.seed, restart)`.
pub fn seesaw_restart(f: &Functional, cfg: &SeesawConfig, restart: usize) -> Result<OptimizationResult> {
    let engine = build_engine(f, cfg, restart, None)?;
    run(engine, cfg, restart, None)
}

/// One restart with the per-source states held fixed (one state on
/// `A_k ⊗ B^k` per source, mixed states allowed).
pub fn seesaw_restart_with_states(
    f: &Functional,
    states: &[QuantumState],
    cfg: &SeesawConfig,
    restart: usize,
) -> Result<OptimizationResult> {
    let engine = build_engine(f, cfg, restart, Some(states))?;
    run(engine, cfg, restart, Some(states))
}

/// Highest value; the lowest restart index wins ties.
pub fn select_best(results: impl IntoIterator<Item = OptimizationResult>) -> Option<OptimizationResult> {
    let mut best: Option<OptimizationResult> = None;
    for r in results {
        let better = match &best {
            None => true,
            Some(b) => r.value > b.value || (r.value == b.value && r.restart < b.restart),
        };
        if better {
            best = Some(r);
        }
    }
    best
}

/// Best of `cfg.restarts` independent restarts.
pub fn seesaw_optimize(f: &Functional, cfg: &SeesawConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let results = (0..cfg.restarts)
        .map(|r| seesaw_restart(f, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(results).expect("at least one restart"))
}

/// Best of `cfg.restarts` restarts over observables only, states fixed.
pub fn seesaw_optimize_with_states(
    f: &Functional,
    states: &[QuantumState],
    cfg: &SeesawConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let results = (0..cfg.restarts)
        .map(|r| seesaw_restart_with_states(f, states, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(results).expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{quantum_bound, Kind};
    use crate::states::{maximally_entangled, random_two_qubit_density};

    const SQRT2: f64 = core::f64::consts::SQRT_2;

    #[test]
    fn chsh_reaches_tsirelson() {
        let f = Functional::build(Kind::Chsh, 2, 1).unwrap();
        let r = seesaw_optimize(&f, &SeesawConfig::new(2).with_seed(1)).unwrap();
        assert!((r.value - 2.0 * SQRT2).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn history_is_monotone() {
        for (kind, m, n) in [(Kind::Chained, 3, 1), (Kind::BilocalS, 2, 2), (Kind::XiM, 3, 2)] {
            let f = Functional::build(kind, m, n).unwrap();
            for restart in 0..3 {
                let r = seesaw_restart(&f, &SeesawConfig::new(2).with_seed(9), restart).unwrap();
                for w in r.history.windows(2) {
                    assert!(w[1] >= w[0] - 1e-12, "{kind}: {:?}", r.history);
                }
                assert!(r.value <= quantum_bound(kind, m) + 1e-7);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let f = Functional::build(Kind::Chained, 3, 1).unwrap();
        let cfg = SeesawConfig::new(2).with_seed(4).with_restarts(2);
        let a = seesaw_optimize(&f, &cfg).unwrap();
        let b = seesaw_optimize(&f, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn guard_trips() {
        let f = Functional::build(Kind::StarSn, 2, 7).unwrap();
        assert!(matches!(
            seesaw_optimize(&f, &SeesawConfig::new(2)),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn fixed_singlet_chsh() {
        let f = Functional::build(Kind::Chsh, 2, 1).unwrap();
        let phi = maximally_entangled(2).unwrap();
        let r = seesaw_optimize_with_states(&f, &[phi], &SeesawConfig::new(2)).unwrap();
        assert!((r.value - 2.0 * SQRT2).abs() < 1e-6);
    }

    #[test]
    fn fixed_werner_chsh() {
        let f = Functional::build(Kind::Chsh, 2, 1).unwrap();
        let w = QuantumState::werner(0.8).unwrap();
        let r = seesaw_optimize_with_states(&f, &[w], &SeesawConfig::new(2)).unwrap();
        assert!((r.value - 2.0 * SQRT2 * 0.8).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn fixed_mixed_pair_runs() {
        let f = Functional::build(Kind::BilocalS, 2, 2).unwrap();
        let a = random_two_qubit_density(1, 2).unwrap();
        let b = random_two_qubit_density(2, 3).unwrap();
        let r = seesaw_optimize_with_states(&f, &[a, b], &SeesawConfig::new(2)).unwrap();
        assert!(r.value <= 2.0 * SQRT2 + 1e-9);
        assert_eq!(r.state.subsystem_dims(), &[2, 2, 2, 2]);
    }

    #[test]
    fn weights() {
        assert_eq!(linearization_weights(Combiner::Linear, &[0.0, -3.0]), vec![1.0, 1.0]);
        let w = linearization_weights(Combiner::RootSum(2), &[4.0, -1.0, 0.0]);
        assert!((w[0] - 0.25).abs() < 1e-15);
        assert!((w[1] + 0.5).abs() < 1e-15);
        assert_eq!(w[2], 0.0);
        assert_eq!(linearization_weights(Combiner::RootSum(2), &[0.0, 0.0]), vec![1.0, 1.0]);
    }
}
