use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::random;

type M = ComplexMatrix<f64>;
type H = HermitianMatrix<f64>;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn diag(v: &[f64]) -> H {
    H::from_real_diagonal(v)
}

// Independent Gram-Schmidt used as a column-space oracle.
fn oracle_orthonormal_basis(cols: &[Vec<Complex<f64>>]) -> Vec<Vec<Complex<f64>>> {
    let mut basis: Vec<Vec<Complex<f64>>> = Vec::new();
    for v in cols {
        let mut w = v.clone();
        for b in &basis {
            let dot: Complex<f64> = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= dot * bi;
            }
        }
        let n: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-10 {
            basis.push(w.into_iter().map(|z| z / n).collect());
        }
    }
    basis
}

#[test]
fn eig_identity() {
    let (spec, v) = eig_hermitian(&H::identity(3));
    assert_eq!(spec.eigenvalues, vec![1.0, 1.0, 1.0]);
    assert!(v.unitarity_residual() < 1e-12);
}

#[test]
fn eig_diagonal_sorted_descending() {
    let (spec, _) = eig_hermitian(&diag(&[-1.0, 2.0]));
    assert_eq!(spec.eigenvalues, vec![2.0, -1.0]);
    assert_eq!(spec.min_positive, Some(2.0));
}

#[test]
fn eig_two_by_two_closed_form() {
    // [[a, b], [b*, c]] has eigenvalues (a+c)/2 +- sqrt(((a-c)/2)^2 + |b|^2)
    let (a, b, cc) = (0.3, c(0.7, -1.1), -0.4);
    let m = M::from_rows(vec![vec![c(a, 0.0), b], vec![b.conj(), c(cc, 0.0)]]).unwrap();
    let (spec, _) = eig_hermitian(&H::new(m).unwrap());
    let mid = (a + cc) / 2.0;
    let rad = (((a - cc) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    assert!((spec.eigenvalues[0] - (mid + rad)).abs() < 1e-12);
    assert!((spec.eigenvalues[1] - (mid - rad)).abs() < 1e-12);
}

#[test]
fn eig_reconstruction_random_hermitian() {
    let mut r = rng(7);
    for case in 0..500 {
        let n = 2 + case % 15;
        let h: H = random::hermitian(n, &mut r);
        let (spec, v) = eig_hermitian(&h);
        assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let rebuilt = M::from_real_diagonal(&spec.eigenvalues).conjugate_by(&v);
        let err = rebuilt.distance(h.as_matrix());
        let scale = h.as_matrix().frobenius_norm().max(1.0);
        assert!(err <= 1e-9 * scale, "n={n} err={err:e}");
        assert!(v.unitarity_residual() <= 1e-9, "V not unitary at n={n}");
    }
}

#[test]
fn eig_is_deterministic() {
    let h: H = random::hermitian(9, &mut rng(3));
    let (s1, v1) = eig_hermitian(&h);
    let (s2, v2) = eig_hermitian(&h);
    assert_eq!(s1, s2);
    assert_eq!(v1, v2);
}

#[test]
fn eig_single_precision() {
    let h: HermitianMatrix<f32> = random::hermitian(6, &mut rng(11));
    let (spec, v) = eig_hermitian(&h);
    let rebuilt = ComplexMatrix::from_real_diagonal(&spec.eigenvalues).conjugate_by(&v);
    assert!(rebuilt.distance(h.as_matrix()) < 1e-4);
}

#[test]
fn hermitian_rejects_asymmetry() {
    let m = M::from_rows(vec![vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.4, 0.0), c(1.0, 0.0)]]).unwrap();
    match H::new(m) {
        Err(crate::Error::NotHermitian { max_asymmetry }) => assert!((max_asymmetry - 0.1).abs() < 1e-12),
        other => panic!("expected NotHermitian, got {other:?}"),
    }
    let rect = M::zeros(2, 3);
    assert!(matches!(H::new(rect), Err(crate::Error::NotSquare { .. })));
}

#[test]
fn hermitian_symmetrizes_roundoff() {
    let m = M::from_rows(vec![
        vec![c(1.0, 1e-14), c(0.5, 0.25)],
        vec![c(0.5, -0.25 + 1e-14), c(2.0, 0.0)],
    ])
    .unwrap();
    let h = H::new(m).unwrap();
    assert_eq!(h.as_matrix()[(0, 0)].im, 0.0);
    assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
}

#[test]
fn tolerance_bounds() {
    assert!(Tolerance::new(1e-9, 1e-9, 1e-9).is_ok());
    assert!(Tolerance::new(0.0, 1e-9, 1e-9).is_err());
    assert!(Tolerance::new(1e-9, 1e-2, 1e-9).is_err());
}

#[test]
fn rank_of_zero_and_projectors() {
    assert_eq!(numerical_rank(&H::zeros(4), &tol()).unwrap(), 0);
    assert_eq!(numerical_rank(&diag(&[1.0, 0.0, 1.0, 1.0, 0.0]), &tol()).unwrap(), 3);
}

#[test]
fn rank_of_low_rank_products() {
    let mut r = rng(5);
    for n in 2..=8 {
        for k in 1..=n {
            let h: H = random::psd_of_rank(n, k, &mut r);
            assert_eq!(numerical_rank(&h, &tol()).unwrap(), k, "n={n} k={k}");
        }
    }
}

#[test]
fn rank_rejects_negative_spectrum() {
    assert!(matches!(
        numerical_rank(&diag(&[1.0, -0.1]), &tol()),
        Err(crate::Error::NotPsd { .. })
    ));
    // tiny negative roundoff is tolerated
    assert_eq!(numerical_rank(&diag(&[1.0, -1e-12]), &tol()).unwrap(), 1);
}

#[test]
fn support_of_pure_and_full_rank() {
    let pure = diag(&[1.0, 0.0]);
    assert!(support_projector(&pure, &tol()).unwrap().distance(&pure) < 1e-12);
    let full = diag(&[0.5, 0.3, 0.2]);
    assert!(support_projector(&full, &tol()).unwrap().distance(&H::identity(3)) < 1e-12);
}

#[test]
fn support_matches_gram_schmidt_span() {
    let mut r = rng(21);
    for _ in 0..20 {
        let a: M = random::ginibre(4, 2, &mut r);
        let h = H::new(&a * &a.adjoint()).unwrap();
        let pi = support_projector(&h, &tol()).unwrap();
        let basis = oracle_orthonormal_basis(&[a.column(0), a.column(1)]);
        let mut oracle = M::zeros(4, 4);
        for b in &basis {
            oracle = &oracle + &M::outer(b, b);
        }
        assert!(pi.as_matrix().distance(&oracle) < 1e-8);
        assert!((pi.trace() - 2.0).abs() < 1e-10);
        let sq = pi.as_matrix() * pi.as_matrix();
        assert!(sq.distance(pi.as_matrix()) <= 1e-8);
        let sandwich = h.as_matrix().conjugate_by(pi.as_matrix());
        assert!(sandwich.distance(h.as_matrix()) <= 1e-8);
    }
}

#[test]
fn kernel_projector_cases() {
    let k = kernel_projector(&diag(&[1.0, 0.0]), &tol()).unwrap();
    assert!(k.distance(&diag(&[0.0, 1.0])) < 1e-12);
    let k = kernel_projector(&diag(&[0.6, 0.4]), &tol()).unwrap();
    assert!(k.distance(&H::zeros(2)) < 1e-12);
    let mut r = rng(8);
    for d in 2..=6 {
        for rank in 1..=d {
            let h: H = random::psd_of_rank(d, rank, &mut r);
            let k = kernel_projector(&h, &tol()).unwrap();
            let s = support_projector(&h, &tol()).unwrap();
            assert!((k.trace() - (d - rank) as f64).abs() < 1e-9);
            assert!(k.add(&s).distance(&H::identity(d)) < 1e-8);
        }
    }
}

#[test]
fn tensor_cases() {
    let i2 = M::identity(2);
    assert_eq!(tensor(&i2, &i2), M::identity(4));
    let a = M::from_real_diagonal(&[1.0, 2.0]);
    let b = M::from_real_diagonal(&[3.0, 4.0]);
    assert_eq!(tensor(&a, &b), M::from_real_diagonal(&[3.0, 4.0, 6.0, 8.0]));
}

#[test]
fn tensor_mixed_product() {
    let mut r = rng(13);
    for _ in 0..50 {
        let (a, b, cc, d): (M, M, M, M) = (
            random::ginibre(2, 2, &mut r),
            random::ginibre(2, 2, &mut r),
            random::ginibre(2, 2, &mut r),
            random::ginibre(2, 2, &mut r),
        );
        let lhs = &tensor(&a, &b) * &tensor(&cc, &d);
        let rhs = tensor(&(&a * &cc), &(&b * &d));
        assert!(lhs.distance(&rhs) < 1e-12);
    }
}

#[test]
fn partial_trace_of_product() {
    let mut r = rng(17);
    let rho: H = random::psd_of_rank(2, 2, &mut r);
    let sigma: H = random::psd_of_rank(3, 3, &mut r);
    let joint = tensor(rho.as_matrix(), sigma.as_matrix());
    let kept = partial_trace(&joint, Subsystem::A, (2, 3)).unwrap();
    let expect = rho.as_matrix().scale_real(sigma.trace());
    assert!(kept.distance(&expect) < 1e-12);
    let kept_b = partial_trace(&joint, Subsystem::B, (2, 3)).unwrap();
    assert!(kept_b.distance(&sigma.as_matrix().scale_real(rho.trace())) < 1e-12);
}

#[test]
fn partial_trace_index_sum_oracle() {
    let mut r = rng(19);
    for (da, db) in [(2, 2), (2, 3), (3, 2)] {
        let m: M = random::ginibre(da * db, da * db, &mut r);
        let mut tr_b = vec![vec![Complex::new(0.0, 0.0); da]; da];
        let mut tr_a = vec![vec![Complex::new(0.0, 0.0); db]; db];
        // walk every entry once and drop it into the bucket it feeds
        for row in 0..da * db {
            for col in 0..da * db {
                let (i, j) = (row / db, row % db);
                let (k, l) = (col / db, col % db);
                if j == l {
                    tr_b[i][k] += m[(row, col)];
                }
                if i == k {
                    tr_a[j][l] += m[(row, col)];
                }
            }
        }
        let kept_a = partial_trace(&m, Subsystem::A, (da, db)).unwrap();
        let kept_b = partial_trace(&m, Subsystem::B, (da, db)).unwrap();
        assert!(kept_a.distance(&M::from_rows(tr_b).unwrap()) < 1e-12);
        assert!(kept_b.distance(&M::from_rows(tr_a).unwrap()) < 1e-12);
        assert!((kept_a.trace() - m.trace()).norm() < 1e-12);
        assert!((kept_b.trace() - m.trace()).norm() < 1e-12);
    }
}

#[test]
fn partial_trace_size_mismatch() {
    assert!(partial_trace(&M::identity(5), Subsystem::A, (2, 2)).is_err());
}

#[test]
fn transpose_cases() {
    let sym = M::from_rows(vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(3.0, 0.0)]]).unwrap();
    assert_eq!(transpose_in_basis(&sym), sym);
    assert_eq!(transpose_in_basis(&M::unit(2, 0, 1)), M::unit(2, 1, 0));
    let z = M::from_rows(vec![vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
    assert_eq!(transpose_in_basis(&z)[(0, 0)], c(0.0, 1.0));
}

#[test]
fn loewner_cases() {
    let i = H::identity(3);
    assert!(loewner_leq(&H::zeros(3), &i, &tol()).unwrap());
    assert!(!loewner_leq(&i.scale(2.0), &i, &tol()).unwrap());
    assert!(loewner_leq(&H::zeros(2), &i, &tol()).is_err());
}

#[test]
fn loewner_order_witness() {
    // sigma supported on a random subspace, Q a random effect on its orthocomplement
    let mut r = rng(23);
    for _ in 0..30 {
        let u: M = random::unitary(4, &mut r);
        let s_dim = 2;
        let sigma_core = random::psd_of_rank::<f64, _>(s_dim, s_dim, &mut r);
        let q_core = random::psd_of_rank::<f64, _>(4 - s_dim, 4 - s_dim, &mut r);
        let q_core = q_core.scale(1.0 / max_eigenvalue(&q_core));
        let mut sigma = M::zeros(4, 4);
        let mut q = M::zeros(4, 4);
        for i in 0..s_dim {
            for j in 0..s_dim {
                sigma[(i, j)] = sigma_core.as_matrix()[(i, j)];
                q[(i + s_dim, j + s_dim)] = q_core.as_matrix()[(i, j)];
            }
        }
        let sigma = H::new(sigma.conjugate_by(&u)).unwrap();
        let q = H::new(q.conjugate_by(&u)).unwrap();
        let pi = support_projector(&sigma, &tol()).unwrap();
        assert!(loewner_leq(&q, &H::identity(4).sub(&pi), &tol()).unwrap());
    }
}

#[test]
fn spectral_map_square_root() {
    let h: H = random::psd_of_rank(4, 4, &mut rng(31));
    let root = spectral_map(&h, f64::sqrt);
    let sq = root.as_matrix() * root.as_matrix();
    assert!(sq.distance(h.as_matrix()) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_is_scale_invariant(seed in any::<u64>(), n in 2usize..8, k in 1usize..8) {
        let k = k.min(n);
        let h: H = random::psd_of_rank(n, k, &mut rng(seed));
        let base = numerical_rank(&h, &tol()).unwrap();
        for alpha in [1e-3, 1.0, 1e3] {
            prop_assert_eq!(numerical_rank(&h.scale(alpha), &tol()).unwrap(), base);
        }
    }

    #[test]
    fn support_projector_idempotent(seed in any::<u64>(), n in 2usize..7, k in 1usize..7) {
        let h: H = random::psd_of_rank(n, k.min(n), &mut rng(seed));
        let p = support_projector(&h, &tol()).unwrap();
        let pp = support_projector(&p, &tol()).unwrap();
        prop_assert!(pp.distance(&p) < 1e-8);
        let k = kernel_projector(&h, &tol()).unwrap();
        prop_assert!(p.add(&k).distance(&H::identity(n)) < 1e-8);
    }

    #[test]
    fn loewner_reflexive_and_transitive(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let a: H = random::hermitian(n, &mut r);
        let b = a.add(&random::psd_of_rank(n, n, &mut r));
        let c = b.add(&random::psd_of_rank(n, 1, &mut r));
        prop_assert!(loewner_leq(&a, &a, &tol()).unwrap());
        prop_assert!(loewner_leq(&a, &b, &tol()).unwrap());
        prop_assert!(loewner_leq(&b, &c, &tol()).unwrap());
        prop_assert!(loewner_leq(&a, &c, &tol()).unwrap());
    }
}
