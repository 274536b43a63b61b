use netbell_core::linalg::*;
use netbell_core::states::{random_pure_state, QuantumState};
use netbell_core::C64;
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
        .prop_map(move |v| ComplexMatrix::new(rows, cols, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn hermitian(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(d, d).prop_map(|m| m.hermitian_part())
}

proptest! {
    #[test]
    fn kron_is_associative(a in matrix(2, 2), b in matrix(3, 2), c in matrix(2, 3)) {
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn kron_mixed_product(a in matrix(2, 2), b in matrix(3, 3), c in matrix(2, 2), d in matrix(3, 3)) {
        let lhs = &tensor_product(&a, &b) * &tensor_product(&c, &d);
        let rhs = tensor_product(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn gram_matrices_are_psd(m in matrix(4, 4)) {
        prop_assert!(is_psd(&(&m.adjoint() * &m)).unwrap());
    }

    #[test]
    fn eig_reconstructs(h in hermitian(5)) {
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-10);
        for w in e.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let v = &e.eigenvectors;
        prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(5)) < 1e-10);
    }

    #[test]
    fn identity_expectation_is_one(seed in any::<u64>()) {
        let psi = random_pure_state(seed, &[2, 3]);
        prop_assert!((expectation(&psi, &ComplexMatrix::identity(6)).unwrap() - 1.0).abs() < 1e-12);
        let rho = QuantumState::density(psi.to_density_matrix(), vec![2, 3]).unwrap();
        prop_assert!((expectation(&rho, &ComplexMatrix::identity(6)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn applied_norm_squared_is_expectation(seed in any::<u64>(), a in matrix(4, 4)) {
        let psi = random_pure_state(seed, &[2, 2]);
        let n = vector_norm_applied(&psi, &a).unwrap();
        let e = expectation(&psi, &(&a.adjoint() * &a)).unwrap();
        prop_assert!((n * n - e).abs() < 1e-12);
    }

    #[test]
    fn hermitian_expectations_are_phase_free(seed in any::<u64>(), h in hermitian(4), phase in -3.0f64..3.0) {
        let psi = random_pure_state(seed, &[2, 2]);
        let a = expectation(&psi, &h).unwrap();
        let b = expectation(&psi.with_global_phase(phase), &h).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn local_application_matches_kron(seed in any::<u64>(), a in matrix(3, 3)) {
        let psi = random_pure_state(seed, &[2, 3, 2]);
        let v = psi.as_pure().unwrap();
        let full = tensor_all([&ComplexMatrix::identity(2), &a, &ComplexMatrix::identity(2)]);
        let direct = full.apply(v);
        let local = apply_on_factors(v, &[2, 3, 2], 1, 2, &a);
        let diff = direct.iter().zip(&local).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-13);
    }
}
