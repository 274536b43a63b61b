use netbell_core::functional::*;
use netbell_core::linalg::{apply_on_factors, expectation, norm, tensor_product, ComplexMatrix};
use netbell_core::optimize::*;
use proptest::prelude::*;

#[test]
fn chsh_fixed_point_anticommutes() {
    let f = Functional::build(Kind::Chsh, 2, 1).unwrap();
    let r = seesaw_optimize(&f, &SeesawConfig::new(2).with_seed(3)).unwrap();
    let x = &r.observables.edge[0];
    let anti = tensor_product(&x[0].matrix().anticommutator(x[1].matrix()), &ComplexMatrix::identity(2));
    assert!(expectation(&r.state, &anti).unwrap().abs() <= 1e-4);
}

#[test]
fn chained_three_alternating_sum_annihilates() {
    let f = Functional::build(Kind::Chained, 3, 1).unwrap();
    let r = seesaw_optimize(&f, &SeesawConfig::new(2).with_seed(5)).unwrap();
    let a = &r.observables.edge[0];
    let mut s = a[0].matrix().clone();
    s.add_scaled(a[1].matrix(), -1.0);
    s.add_scaled(a[2].matrix(), 1.0);
    let psi = r.state.as_pure().unwrap();
    assert!(norm(&apply_on_factors(psi, &[2, 2], 0, 1, &s)) <= 1e-4);
}

#[test]
fn gm_four_needs_more_than_a_qubit() {
    let f = Functional::build(Kind::Gm, 4, 1).unwrap();
    let big = seesaw_optimize(&f, &SeesawConfig::new(4).with_seed(1)).unwrap();
    assert!((big.value - 16.0).abs() < 1e-4, "{}", big.value);
    let small = seesaw_optimize(&f, &SeesawConfig::new(2).with_restarts(50).with_seed(1)).unwrap();
    assert!(small.value < 16.0);
    let (vm, _) = vector_model_optimize(&f, 3, 1);
    assert!(vm < 16.0);
    assert!((small.value - vm).abs() < 1e-3, "{} vs {vm}", small.value);
}

#[test]
fn seesaw_stays_below_vector_model() {
    for (kind, m) in [(Kind::Chsh, 2), (Kind::Chained, 3), (Kind::Chained, 4), (Kind::Gm, 3)] {
        let f = Functional::build(kind, m, 1).unwrap();
        let s = seesaw_optimize(&f, &SeesawConfig::new(2).with_seed(2)).unwrap();
        let (v, _) = vector_model_optimize(&f, 3, 2);
        assert!(s.value <= v + 1e-6, "{kind} m={m}: {} > {v}", s.value);
    }
}

#[test]
fn vector_model_matches_quantum_bounds() {
    for kind in Kind::ALL {
        for m in 2..=8 {
            for n in 1..=4 {
                let Ok(f) = Functional::build(kind, m, n) else { continue };
                let (v, model) = vector_model_optimize(&f, m, 3);
                assert!((v - f.quantum_bound()).abs() < 1e-7, "{kind} m={m} n={n}: {v}");
                for party in &model.vectors {
                    for u in party {
                        let l: f64 = u.iter().map(|x| x * x).sum();
                        assert!((l - 1.0).abs() < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn vector_model_is_reproducible() {
    let f = Functional::build(Kind::XiM, 3, 2).unwrap();
    assert_eq!(vector_model_optimize(&f, 2, 11), vector_model_optimize(&f, 2, 11));
}

fn scenarios() -> impl Strategy<Value = (Kind, usize, usize)> {
    prop_oneof![
        Just((Kind::Chsh, 2, 1)),
        (2usize..5).prop_map(|m| (Kind::Chained, m, 1)),
        (2usize..4).prop_map(|m| (Kind::Gm, m, 1)),
        Just((Kind::BilocalS, 2, 2)),
        (1usize..4).prop_map(|n| (Kind::StarSn, 2, n)),
        Just((Kind::XiM, 3, 2)),
        Just((Kind::DeltaNm, 3, 2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn seesaw_history_is_monotone((kind, m, n) in scenarios(), seed in any::<u64>()) {
        let f = Functional::build(kind, m, n).unwrap();
        let cfg = SeesawConfig::new(2).with_seed(seed).with_iters(60);
        let r = seesaw_restart(&f, &cfg, 0).unwrap();
        for w in r.history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{:?}", r.history);
        }
        prop_assert!(r.value <= f.quantum_bound() + 1e-7);
        prop_assert_eq!(r.history.len(), r.iterations + 1);
    }

    #[test]
    fn seesaw_is_deterministic(seed in any::<u64>()) {
        let f = Functional::build(Kind::BilocalS, 2, 2).unwrap();
        let cfg = SeesawConfig::new(2).with_seed(seed).with_iters(30);
        prop_assert_eq!(seesaw_restart(&f, &cfg, 1).unwrap(), seesaw_restart(&f, &cfg, 1).unwrap());
    }
}
