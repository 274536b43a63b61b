//! Vector model: every edge observable `A^k_x` is replaced by a real unit
//! vector `v^k_x`, so anticommutator expectations become `2 v·v'` and each
//! norm `‖Σ_x c_x A_x|ψ⟩‖` becomes `‖Σ_x c_x v_x‖`. The value is the
//! functional's combiner applied to these norms, maximized by projected
//! gradient ascent on the product of spheres.

use alloc::vec;
use alloc::vec::Vec;

use crate::functional::{root, Combiner, Functional};
use crate::rng::{derive_seed, normal, rng_from_seed, SeededRng};

#[derive(Clone, Debug, PartialEq)]
pub struct VectorModel {
    pub ambient: usize,
    /// `vectors[k][x]` is the unit vector of party `k`, setting `x`.
    pub vectors: Vec<Vec<Vec<f64>>>,
}

impl VectorModel {
    /// `v^k_x · v^k_y`.
    pub fn gram(&self, k: usize) -> Vec<Vec<f64>> {
        let vs = &self.vectors[k];
        vs.iter().map(|a| vs.iter().map(|b| dot(a, b)).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorOptions {
    pub restarts: usize,
    pub max_iters: usize,
}

impl Default for VectorOptions {
    fn default() -> Self {
        Self {
            restarts: 12,
            max_iters: 20_000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = libm::sqrt(dot(v, v));
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// `u_{ik} = Σ_x c^k_{i,x} v^k_x`.
fn signed_sums(f: &Functional, vectors: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    f.terms
        .iter()
        .map(|t| {
            t.coefficients
                .iter()
                .zip(vectors)
                .map(|(c, vs)| {
                    let mut u = vec![0.0; vs[0].len()];
                    for (cx, v) in c.iter().zip(vs) {
                        if *cx != 0 {
                            u.iter_mut().zip(v).for_each(|(a, b)| *a += *cx as f64 * b);
                        }
                    }
                    u
                })
                .collect()
        })
        .collect()
}

/// `Σ_i ω_{i1}` for linear functionals, `Σ_i (Π_k ω_{ik})^{1/n}` for root sums.
pub fn vector_model_value(f: &Functional, model: &VectorModel) -> f64 {
    let sums = signed_sums(f, &model.vectors);
    sums.iter()
        .map(|per_party| {
            let prod: f64 = per_party.iter().map(|u| libm::sqrt(dot(u, u))).product();
            root(prod, f.combiner.root_order())
        })
        .sum()
}

/// Euclidean gradient of the value with respect to every vector.
fn gradient(f: &Functional, vectors: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    let sums = signed_sums(f, vectors);
    let order = f.combiner.root_order() as f64;
    let mut g: Vec<Vec<Vec<f64>>> = vectors
        .iter()
        .map(|vs| vs.iter().map(|v| vec![0.0; v.len()]).collect())
        .collect();
    for (t, per_party) in f.terms.iter().zip(&sums) {
        let omegas: Vec<f64> = per_party.iter().map(|u| libm::sqrt(dot(u, u))).collect();
        if omegas.iter().any(|w| *w < 1e-300) {
            continue;
        }
        let term = root(omegas.iter().product(), f.combiner.root_order());
        for (k, u) in per_party.iter().enumerate() {
            // d term / d ω_k = term / (order · ω_k); d ω_k / d v_x = c_x u / ω_k.
            let scale = match f.combiner {
                Combiner::Linear => 1.0 / omegas[k],
                Combiner::RootSum(_) => term / (order * omegas[k] * omegas[k]),
            };
            for (x, c) in t.coefficients[k].iter().enumerate() {
                if *c != 0 {
                    let s = scale * *c as f64;
                    g[k][x].iter_mut().zip(u).for_each(|(a, b)| *a += s * b);
                }
            }
        }
    }
    g
}

fn random_model(f: &Functional, ambient: usize, rng: &mut SeededRng) -> Vec<Vec<Vec<f64>>> {
    (0..f.n)
        .map(|_| {
            (0..f.m)
                .map(|_| {
                    let mut v: Vec<f64> = (0..ambient).map(|_| normal(rng)).collect();
                    normalize(&mut v);
                    v
                })
                .collect()
        })
        .collect()
}

fn ascend(f: &Functional, mut vectors: Vec<Vec<Vec<f64>>>, max_iters: usize) -> (f64, Vec<Vec<Vec<f64>>>) {
    let value_of = |vs: &[Vec<Vec<f64>>]| {
        let model = VectorModel {
            ambient: 0,
            vectors: vs.to_vec(),
        };
        vector_model_value(f, &model)
    };
    let mut value = value_of(&vectors);
    let mut step = 0.1;
    for _ in 0..max_iters {
        let g = gradient(f, &vectors);
        // Tangent projection.
        let mut tangent = g;
        let mut gnorm2 = 0.0;
        for (tk, vk) in tangent.iter_mut().zip(&vectors) {
            for (t, v) in tk.iter_mut().zip(vk) {
                let p = dot(t, v);
                t.iter_mut().zip(v).for_each(|(a, b)| *a -= p * b);
                gnorm2 += dot(t, t);
            }
        }
        if gnorm2 < 1e-30 {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let mut trial = vectors.clone();
            for (tk, gk) in trial.iter_mut().zip(&tangent) {
                for (v, t) in tk.iter_mut().zip(gk) {
                    v.iter_mut().zip(t).for_each(|(a, b)| *a += step * b);
                    normalize(v);
                }
            }
            let tv = value_of(&trial);
            if tv >= value {
                let gain = tv - value;
                vectors = trial;
                value = tv;
                step *= 1.5;
                accepted = gain > 0.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (value, vectors)
}

/// Best of the default number of restarts.
pub fn vector_model_optimize(f: &Functional, ambient: usize, seed: u64) -> (f64, VectorModel) {
    vector_model_optimize_with(f, ambient, seed, &VectorOptions::default())
}

/// Restart `r` starts from vectors drawn with seed `derive_seed(seed, r)`;
/// the lowest restart index wins ties.
pub fn vector_model_optimize_with(f: &Functional, ambient: usize, seed: u64, opts: &VectorOptions) -> (f64, VectorModel) {
    let ambient = ambient.max(1);
    let mut best: Option<(f64, Vec<Vec<Vec<f64>>>)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, r as u64));
        let start = random_model(f, ambient, &mut rng);
        let (v, vs) = ascend(f, start, opts.max_iters);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, vs));
        }
    }
    let (value, vectors) = best.expect("at least one restart");
    (value, VectorModel { ambient, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{quantum_bound, Kind};

    #[test]
    fn chsh_orthogonal() {
        let f = Functional::build(Kind::Chsh, 2, 1).unwrap();
        let (v, model) = vector_model_optimize(&f, 2, 1);
        assert!((v - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-9, "{v}");
        assert!(model.gram(0)[0][1].abs() < 1e-6);
        for vs in &model.vectors[0] {
            assert!((dot(vs, vs) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn chained_five() {
        let f = Functional::build(Kind::Chained, 5, 1).unwrap();
        let (v, _) = vector_model_optimize(&f, 2, 1);
        assert!((v - 10.0 * libm::cos(core::f64::consts::PI / 10.0)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn gm_four_frames() {
        let f = Functional::build(Kind::Gm, 4, 1).unwrap();
        let (v4, _) = vector_model_optimize(&f, 4, 2);
        assert!((v4 - quantum_bound(Kind::Gm, 4)).abs() < 1e-7, "{v4}");
        let (v3, _) = vector_model_optimize(&f, 3, 2);
        assert!(v3 < 16.0 - 1e-3, "{v3}");
    }

    #[test]
    fn ambient_one_is_classical() {
        let f = Functional::build(Kind::Chained, 3, 1).unwrap();
        let (v, _) = vector_model_optimize(&f, 1, 0);
        assert!(v <= 4.0 + 1e-12);
    }
}
