//! Classical side: deterministic strategies, exhaustive enumeration, random
//! n-local mixtures and the root-sum inequality.
//!
//! Strategy indices encode edge responses as bits, party 0 in the most
//! significant position and bit 0 meaning `+1`. The central party's responses
//! are not enumerated: for a fixed edge strategy the best central response to
//! each input is `sign` of the term it multiplies (linear combiner), and the
//! root-sum combiner ignores central signs entirely.

use alloc::vec;
use alloc::vec::Vec;

use crate::functional::{root, Combiner, Functional};
use crate::rng::{derive_seed, dirichlet_uniform, rng_from_seed, sign};
use crate::tol;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    /// `edge_responses[k][x]` is party `k`'s outcome on input `x`.
    pub edge_responses: Vec<Vec<i8>>,
    /// One outcome per central input.
    pub central_responses: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn all_plus(f: &Functional) -> Self {
        Self {
            edge_responses: vec![vec![1; f.m]; f.n],
            central_responses: vec![1; f.central_inputs()],
        }
    }

    /// Flips every central response.
    pub fn flip_central(&self) -> Self {
        Self {
            edge_responses: self.edge_responses.clone(),
            central_responses: self.central_responses.iter().map(|b| -b).collect(),
        }
    }

    fn check(&self, f: &Functional) -> Result<()> {
        if self.edge_responses.len() != f.n {
            return Err(Error::ShapeMismatch("edge_responses must have one row per edge party"));
        }
        if self.edge_responses.iter().any(|r| r.len() != f.m) {
            return Err(Error::ShapeMismatch("edge response rows must have length m"));
        }
        if self.central_responses.len() != f.central_inputs() {
            return Err(Error::ShapeMismatch("central_responses must cover every central input"));
        }
        let pm = |v: &i8| *v == 1 || *v == -1;
        if !self.edge_responses.iter().flatten().all(pm) || !self.central_responses.iter().all(pm) {
            return Err(Error::ShapeMismatch("responses must be +1 or -1"));
        }
        Ok(())
    }
}

/// `Π_k Σ_x c^k_{i,x} a_k(x)` for every term.
fn edge_products(f: &Functional, edge: &[Vec<i8>]) -> Vec<i64> {
    f.terms
        .iter()
        .map(|t| {
            t.coefficients
                .iter()
                .zip(edge)
                .map(|(c, a)| c.iter().zip(a).map(|(c, a)| (*c as i64) * (*a as i64)).sum::<i64>())
                .product()
        })
        .collect()
}

fn combine_integer(f: &Functional, correlators: &[i64]) -> f64 {
    match f.combiner {
        Combiner::Linear => correlators.iter().sum::<i64>() as f64,
        Combiner::RootSum(n) => correlators.iter().map(|c| root(c.unsigned_abs() as f64, n)).sum(),
    }
}

/// Value of a deterministic strategy.
pub fn eval_strategy(f: &Functional, s: &DeterministicStrategy) -> Result<f64> {
    s.check(f)?;
    let products = edge_products(f, &s.edge_responses);
    let correlators: Vec<i64> = products
        .iter()
        .zip(&f.terms)
        .map(|(p, t)| p * s.central_responses[t.central_input] as i64)
        .collect();
    Ok(combine_integer(f, &correlators))
}

/// Full search-space size in bits: `m·n` edge bits plus one per central input.
pub fn search_bits(f: &Functional) -> u32 {
    (f.m * f.n + f.central_inputs()) as u32
}

/// Number of edge strategies visited after fixing party 0's first response.
pub fn enumeration_size(f: &Functional) -> Result<u64> {
    let bits = search_bits(f);
    if bits > tol::MAX_SEARCH_BITS {
        return Err(Error::SearchSpaceTooLarge {
            bits,
            limit: tol::MAX_SEARCH_BITS,
        });
    }
    Ok(1u64 << (f.m * f.n - 1))
}

/// Edge responses for a pruned index (the leading `+1` is implicit).
pub fn edge_strategy(f: &Functional, index: u64) -> Vec<Vec<i8>> {
    let bits = f.m * f.n;
    (0..f.n)
        .map(|k| {
            (0..f.m)
                .map(|x| {
                    let pos = bits - 1 - (k * f.m + x);
                    if (index >> pos) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect()
        })
        .collect()
}

/// Best deterministic strategy with the given edge responses.
fn best_completion(f: &Functional, edge: Vec<Vec<i8>>) -> (f64, DeterministicStrategy) {
    let products = edge_products(f, &edge);
    let mut central = vec![1i8; f.central_inputs()];
    if f.combiner == Combiner::Linear {
        let mut per_input = vec![0i64; central.len()];
        for (p, t) in products.iter().zip(&f.terms) {
            per_input[t.central_input] += p;
        }
        for (b, s) in central.iter_mut().zip(&per_input) {
            if *s < 0 {
                *b = -1;
            }
        }
    }
    let correlators: Vec<i64> = products
        .iter()
        .zip(&f.terms)
        .map(|(p, t)| p * central[t.central_input] as i64)
        .collect();
    let value = combine_integer(f, &correlators);
    (
        value,
        DeterministicStrategy {
            edge_responses: edge,
            central_responses: central,
        },
    )
}

fn improves(candidate: f64, best: f64) -> bool {
    candidate > best + 1e-12 * best.abs().max(1.0)
}

/// Best strategy over pruned indices `lo..hi`; the earliest index wins ties.
pub fn enumerate_range(f: &Functional, lo: u64, hi: u64) -> Option<(f64, DeterministicStrategy)> {
    let mut best: Option<(f64, DeterministicStrategy)> = None;
    for index in lo..hi {
        let (v, s) = best_completion(f, edge_strategy(f, index));
        if best.as_ref().is_none_or(|(b, _)| improves(v, *b)) {
            best = Some((v, s));
        }
    }
    best
}

/// Merges range results listed in index order, keeping the earliest maximum.
pub fn merge_ranges<I>(parts: I) -> Option<(f64, DeterministicStrategy)>
where
    I: IntoIterator<Item = Option<(f64, DeterministicStrategy)>>,
{
    let mut best: Option<(f64, DeterministicStrategy)> = None;
    for (v, s) in parts.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| improves(v, *b)) {
            best = Some((v, s));
        }
    }
    best
}

/// Exact maximum over all deterministic strategies with a witness.
pub fn enumerate_deterministic_max(f: &Functional) -> Result<(f64, DeterministicStrategy)> {
    let size = enumeration_size(f)?;
    Ok(enumerate_range(f, 0, size).expect("search space is nonempty"))
}

/// One source's finite hidden-variable support.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSupport {
    pub weights: Vec<f64>,
    /// `edge_responses[λ][x]` for the edge party attached to this source.
    pub edge_responses: Vec<Vec<i8>>,
}

/// Independent per-source supports plus a central response table indexed by
/// the joint tuple `(λ_1, …, λ_n)` (source 0 most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenVariableModel {
    pub sources: Vec<SourceSupport>,
    /// `central[joint][input]`.
    pub central: Vec<Vec<i8>>,
}

impl HiddenVariableModel {
    /// Flat Dirichlet weights and uniform random responses.
    pub fn random(f: &Functional, support_size: usize, seed: u64) -> Result<Self> {
        if support_size == 0 {
            return Err(Error::InvalidConfig("support_size must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let sources: Vec<SourceSupport> = (0..f.n)
            .map(|_| SourceSupport {
                weights: dirichlet_uniform(&mut rng, support_size),
                edge_responses: (0..support_size)
                    .map(|_| (0..f.m).map(|_| sign(&mut rng)).collect())
                    .collect(),
            })
            .collect();
        let joint = support_size.pow(f.n as u32);
        let central = (0..joint)
            .map(|_| (0..f.central_inputs()).map(|_| sign(&mut rng)).collect())
            .collect();
        Ok(Self { sources, central })
    }

    pub fn check(&self, f: &Functional) -> Result<()> {
        if self.sources.len() != f.n {
            return Err(Error::ShapeMismatch("one support per source"));
        }
        let mut joint = 1usize;
        for s in &self.sources {
            if s.weights.len() != s.edge_responses.len() || s.weights.is_empty() {
                return Err(Error::ShapeMismatch("weights and responses must align"));
            }
            if let Some(w) = s.weights.iter().find(|w| **w < 0.0) {
                return Err(Error::NegativeEntry(*w));
            }
            if (s.weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidState("source weights must sum to 1"));
            }
            if s.edge_responses.iter().any(|r| r.len() != f.m) {
                return Err(Error::ShapeMismatch("edge response rows must have length m"));
            }
            joint *= s.weights.len();
        }
        if self.central.len() != joint || self.central.iter().any(|r| r.len() != f.central_inputs()) {
            return Err(Error::ShapeMismatch("central table must cover every joint tuple and input"));
        }
        Ok(())
    }

    /// Correlators `I_i = Σ_λ Π_k p_k(λ_k) · Π_k e_k(λ_k)_i · b_λ(i)` and the combined value.
    pub fn evaluate(&self, f: &Functional) -> Result<(f64, Vec<f64>)> {
        self.check(f)?;
        let sizes: Vec<usize> = self.sources.iter().map(|s| s.weights.len()).collect();
        // Per source and λ, the signed sums for every term.
        let sums: Vec<Vec<Vec<f64>>> = self
            .sources
            .iter()
            .enumerate()
            .map(|(k, s)| {
                s.edge_responses
                    .iter()
                    .map(|a| {
                        f.terms
                            .iter()
                            .map(|t| t.coefficients[k].iter().zip(a).map(|(c, a)| (*c * *a) as f64).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut correlators = vec![0.0; f.terms.len()];
        let mut lambda = vec![0usize; f.n];
        for (joint, b) in self.central.iter().enumerate() {
            crate::states::digits(joint, &sizes, &mut lambda);
            let weight: f64 = lambda.iter().enumerate().map(|(k, l)| self.sources[k].weights[*l]).product();
            for (i, t) in f.terms.iter().enumerate() {
                let prod: f64 = lambda.iter().enumerate().map(|(k, l)| sums[k][*l][i]).product();
                correlators[i] += weight * prod * b[t.central_input] as f64;
            }
        }
        Ok((f.combine(&correlators), correlators))
    }
}

/// Value of one randomly drawn model.
pub fn sample_trial(f: &Functional, support_size: usize, seed: u64) -> Result<f64> {
    Ok(HiddenVariableModel::random(f, support_size, seed)?.evaluate(f)?.0)
}

/// Maximum value over `trials` random n-local models; trial `t` uses seed
/// `derive_seed(seed, t)`.
pub fn sample_nlocal_value(f: &Functional, trials: usize, support_size: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1"));
    }
    let mut best = f64::NEG_INFINITY;
    for t in 0..trials {
        best = best.max(sample_trial(f, support_size, derive_seed(seed, t as u64))?);
    }
    Ok(best)
}

/// Both sides of `Σ_i (Π_k z_k^i)^{1/n} ≤ Π_k (Σ_i z_k^i)^{1/n}` for a
/// matrix with one row per source.
pub fn root_sum_lemma_sides(z: &[Vec<f64>], n: usize) -> Result<(f64, f64)> {
    if n == 0 || z.len() != n {
        return Err(Error::ShapeMismatch("matrix must have one row per source"));
    }
    let terms = z[0].len();
    if z.iter().any(|r| r.len() != terms) {
        return Err(Error::ShapeMismatch("rows must have equal length"));
    }
    if let Some(v) = z.iter().flatten().find(|v| !(**v >= 0.0)) {
        return Err(Error::NegativeEntry(*v));
    }
    let lhs = (0..terms).map(|i| root(z.iter().map(|r| r[i]).product(), n)).sum();
    let rhs = z.iter().map(|r| root(r.iter().sum(), n)).product();
    Ok((lhs, rhs))
}

pub fn root_sum_lemma_check(z: &[Vec<f64>], n: usize) -> Result<bool> {
    let (lhs, rhs) = root_sum_lemma_sides(z, n)?;
    Ok(lhs <= rhs + 1e-12 * rhs.max(1.0))
}
