use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::matop::{partial_trace, ComplexMatrix, HermitianMatrix, Subsystem, Tolerance};
use crate::random;

type M = ComplexMatrix<f64>;
type H = HermitianMatrix<f64>;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn projector(psi: &PureState<f64>) -> H {
    H::ket_bra(psi.amplitudes())
}

fn plus_state() -> DensityMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap().density()
}

fn widx(d: usize, a: i64, b: i64) -> WeylIndex {
    WeylIndex::new(d, a, b).unwrap()
}

#[test]
fn max_entangled_qubit() {
    let phi = max_entangled::<f64>(2).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (g, e) in phi.amplitudes().iter().zip([s, 0.0, 0.0, s]) {
        assert!((g - c(e, 0.0)).norm() < 1e-15);
    }
    assert!(max_entangled::<f64>(1).is_err());
}

#[test]
fn max_entangled_marginal_is_maximally_mixed() {
    let phi = max_entangled::<f64>(3).unwrap();
    let m = partial_trace(projector(&phi).as_matrix(), Subsystem::B, (3, 3)).unwrap();
    assert!(m.distance(&M::identity(3).scale_real(1.0 / 3.0)) < 1e-12);
    let overlap = phi.inner(&bell_state(3, 0, 0).unwrap());
    assert!((overlap - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn weyl_qubit_is_pauli() {
    assert_eq!(weyl::<f64>(widx(2, 0, 0)), M::identity(2));
    // direct evaluation of sum_n omega^{bn} |n+a><n| with omega = -1
    let x = M::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
    let z = M::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]).unwrap();
    assert!(weyl::<f64>(widx(2, 1, 0)).distance(&x) < 1e-15);
    assert!(weyl::<f64>(widx(2, 0, 1)).distance(&z) < 1e-15);
}

#[test]
fn weyl_operators_are_unitary() {
    for d in [2, 3, 5] {
        for idx in WeylIndex::all(d) {
            assert!(weyl::<f64>(idx).unitarity_residual() < 1e-12);
        }
    }
}

#[test]
fn weyl_transpose_identity() {
    // W_{a,b}^t = omega^{-ab} W_{-a,b}
    for d in [2, 3, 5] {
        for idx in WeylIndex::all(d) {
            let (a, b) = (idx.a() as i64, idx.b() as i64);
            let lhs = weyl::<f64>(idx).transpose();
            let rhs = weyl::<f64>(widx(d, -a, b)).scale(root_of_unity(d, -a * b));
            assert!(lhs.distance(&rhs) < 1e-12, "d={d} a={a} b={b}");
        }
    }
}

#[test]
fn weyl_composition_identity() {
    // W_{a,b} W_{n,m} = omega^{bn} W_{a+n,b+m} = omega^{bn-am} W_{n,m} W_{a,b}
    for d in [2, 3, 5] {
        for i in WeylIndex::all(d) {
            for j in WeylIndex::all(d) {
                let (a, b) = (i.a() as i64, i.b() as i64);
                let (n, m) = (j.a() as i64, j.b() as i64);
                let wi = weyl::<f64>(i);
                let wj = weyl::<f64>(j);
                let lhs = &wi * &wj;
                let sum = weyl::<f64>(widx(d, a + n, b + m)).scale(root_of_unity(d, b * n));
                let swapped = (&wj * &wi).scale(root_of_unity(d, b * n - a * m));
                assert!(lhs.distance(&sum) < 1e-12);
                assert!(lhs.distance(&swapped) < 1e-12);
            }
        }
    }
}

#[test]
fn bell_states_cases() {
    let phi = max_entangled::<f64>(2).unwrap();
    assert_eq!(bell_state::<f64>(2, 0, 0).unwrap(), phi);
    // Z on the B side flips the sign of |11>
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expect = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)];
    let got = bell_state::<f64>(2, 0, 1).unwrap();
    for (g, e) in got.amplitudes().iter().zip(expect) {
        assert!((g - e).norm() < 1e-15);
    }
}

#[test]
fn bell_basis_is_orthonormal() {
    for d in [2, 3, 4, 5] {
        let states: Vec<_> = WeylIndex::all(d)
            .map(|i| bell_state::<f64>(d, i.a() as i64, i.b() as i64).unwrap())
            .collect();
        for (i, u) in states.iter().enumerate() {
            for (j, v) in states.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((u.inner(v) - c(expect, 0.0)).norm() < 1e-10);
            }
        }
    }
}

/// `alpha |Phi_00><Phi_00| + (1 - alpha)/(d - 1) sum_{c >= 1} |Phi_0c><Phi_0c|`
/// with `alpha = 1 - (d-1)(1-p)/d`. Each `c >= 1` term carries weight
/// `(1-p)/d`, which keeps the trace at one for every `d`.
fn dephasing_choi_bell_form(d: usize, p: f64) -> H {
    let alpha = 1.0 - (d as f64 - 1.0) * (1.0 - p) / d as f64;
    let rest = (1.0 - alpha) / (d as f64 - 1.0);
    let mut acc = projector(&bell_state(d, 0, 0).unwrap()).scale(alpha);
    for cc in 1..d as i64 {
        acc = acc.add(&projector(&bell_state(d, 0, cc).unwrap()).scale(rest));
    }
    acc
}

#[test]
fn choi_of_identity_is_phi_plus() {
    let j = kraus_to_choi(&KrausChannel::<f64>::identity(3)).unwrap();
    let phi = projector(&max_entangled(3).unwrap());
    assert!(j.matrix().distance(&phi) < 1e-12);
}

#[test]
fn choi_of_dephasing_matches_bell_expansion() {
    for d in [2, 3, 4] {
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let j = kraus_to_choi(&make_dephasing(d, p).unwrap()).unwrap();
            assert!(j.matrix().distance(&dephasing_choi_bell_form(d, p)) < 1e-12, "d={d} p={p}");
        }
    }
    // qubit closed form: ((1+p)/2)|Phi_00><Phi_00| + ((1-p)/2)|Phi_01><Phi_01|
    let p = 0.5;
    let expect = projector(&bell_state(2, 0, 0).unwrap())
        .scale((1.0 + p) / 2.0)
        .add(&projector(&bell_state(2, 0, 1).unwrap()).scale((1.0 - p) / 2.0));
    let j = kraus_to_choi(&make_dephasing(2, p).unwrap()).unwrap();
    assert!(j.matrix().distance(&expect) < 1e-12);
}

#[test]
fn choi_of_fully_depolarizing() {
    for d in [2, 3, 4] {
        let j = kraus_to_choi(&make_depolarizing(d, 0.0).unwrap()).unwrap();
        let target = H::identity(d * d).scale(1.0 / (d * d) as f64);
        assert!(j.matrix().distance(&target) < 1e-12);
    }
}

#[test]
fn choi_to_kraus_unitary() {
    let u: M = random::unitary(3, &mut rng(2));
    let j = kraus_to_choi(&make_unitary_channel(u).unwrap()).unwrap();
    let k = choi_to_kraus(&j, &tol()).unwrap();
    assert_eq!(k.len(), 1);
    assert!(k.ops()[0].unitarity_residual() < 1e-9);
}

#[test]
fn choi_to_kraus_dephasing() {
    let j = kraus_to_choi(&make_dephasing(3, 0.5).unwrap()).unwrap();
    let k = choi_to_kraus(&j, &tol()).unwrap();
    assert_eq!(k.len(), 3);
    assert!(kraus_to_choi(&k).unwrap().matrix().distance(j.matrix()) < 1e-8);
}

#[test]
fn choi_to_kraus_random_round_trip() {
    let mut r = rng(40);
    for _ in 0..40 {
        let ch = random::cptp::<f64, _>(2, 5, &mut r);
        let j = kraus_to_choi(&ch).unwrap();
        let k = choi_to_kraus(&j, &tol()).unwrap();
        assert!(k.len() <= 4);
        assert_eq!(k.len(), choi_rank(&j, &tol()).unwrap());
        assert!(kraus_to_choi(&k).unwrap().matrix().distance(j.matrix()) < 1e-8);
    }
}

#[test]
fn choi_to_kraus_rejects_invalid() {
    let j = ChoiState::new(2, H::identity(4).scale(0.5)).unwrap();
    assert!(matches!(choi_to_kraus(&j, &tol()), Err(crate::Error::NotCptp { .. })));
}

#[test]
fn apply_kraus_cases() {
    let rho: DensityMatrix<f64> = random::density(3, 3, &mut rng(4));
    let out = apply_kraus(&KrausChannel::identity(3), &rho).unwrap();
    assert!(out.matrix().distance(rho.matrix()) < 1e-12);

    let out = apply_kraus(&make_dephasing(2, 0.0).unwrap(), &plus_state()).unwrap();
    assert!(out.matrix().distance(&H::identity(2).scale(0.5)) < 1e-12);

    let p = 0.3;
    let out = apply_kraus(&make_depolarizing(3, p).unwrap(), &rho).unwrap();
    let expect = rho.matrix().scale(p).add(&H::identity(3).scale((1.0 - p) / 3.0));
    for i in 0..3 {
        for j in 0..3 {
            let diff = out.matrix().as_matrix()[(i, j)] - expect.as_matrix()[(i, j)];
            assert!(diff.norm() < 1e-12);
        }
    }
    assert!(apply_kraus(&KrausChannel::identity(2), &rho).is_err());
}

#[test]
fn apply_via_choi_cases() {
    let rho: DensityMatrix<f64> = random::density(3, 2, &mut rng(6));
    let j = kraus_to_choi(&KrausChannel::identity(3)).unwrap();
    assert!(apply_via_choi(&j, &rho, &tol()).unwrap().matrix().distance(rho.matrix()) < 1e-12);

    // dephasing keeps the diagonal and multiplies coherences by p
    let j = kraus_to_choi(&make_dephasing(2, 0.5).unwrap()).unwrap();
    let out = apply_via_choi(&j, &plus_state(), &tol()).unwrap();
    let m = out.matrix().as_matrix();
    assert!((m[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((m[(1, 1)] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((m[(0, 1)] - c(0.25, 0.0)).norm() < 1e-12);
    assert!((m[(1, 0)] - c(0.25, 0.0)).norm() < 1e-12);

    assert!(apply_via_choi(&j, &random::density(3, 3, &mut rng(1)), &tol()).is_err());
}

#[test]
fn apply_via_choi_matches_kraus() {
    let mut r = rng(9);
    for case in 0..100 {
        let d = 2 + case % 2;
        let ch = random::cptp::<f64, _>(d, 1 + case % 4, &mut r);
        let rho = random::density(d, 1 + case % d, &mut r);
        let j = kraus_to_choi(&ch).unwrap();
        let a = apply_kraus(&ch, &rho).unwrap();
        let b = apply_via_choi(&j, &rho, &tol()).unwrap();
        assert!(a.matrix().distance(b.matrix()) <= 1e-9);
    }
}

#[test]
fn choi_rank_table() {
    let u: M = random::unitary(2, &mut rng(12));
    let j = kraus_to_choi(&make_unitary_channel(u).unwrap()).unwrap();
    assert_eq!(choi_rank(&j, &tol()).unwrap(), 1);
    for p in [0.0, 0.3, 0.99] {
        let j = kraus_to_choi(&make_depolarizing(2, p).unwrap()).unwrap();
        assert_eq!(choi_rank(&j, &tol()).unwrap(), 4);
    }
    for d in [2, 3, 4] {
        let j = kraus_to_choi(&make_dephasing(d, 0.5).unwrap()).unwrap();
        assert_eq!(choi_rank(&j, &tol()).unwrap(), d);
        // second call hits the cache
        assert_eq!(choi_rank(&j, &tol()).unwrap(), d);
    }
}

#[test]
fn choi_rank_in_single_precision() {
    let j = kraus_to_choi(&make_dephasing::<f32>(3, 0.5).unwrap()).unwrap();
    assert_eq!(choi_rank(&j, &Tolerance::default()).unwrap(), 3);
    let j = kraus_to_choi(&make_depolarizing::<f32>(2, 0.3).unwrap()).unwrap();
    assert_eq!(choi_rank(&j, &Tolerance::default()).unwrap(), 4);
}

#[test]
fn cptp_verdicts() {
    let phi = projector(&max_entangled(2).unwrap());
    assert!(is_cptp(&ChoiState::new(2, phi.clone()).unwrap(), &tol()).cptp);
    assert!(is_cptp(&ChoiState::new(3, H::identity(9).scale(1.0 / 9.0)).unwrap(), &tol()).cptp);

    // swap the (0,0) diagonal block for (1/2)|1><1|, so tr_A J = |1><1|
    let mut m = phi.into_matrix();
    m[(0, 0)] = c(0.0, 0.0);
    m[(1, 1)] = c(0.5, 0.0);
    let broken = ChoiState::new(2, H::new(m).unwrap()).unwrap();
    let v = is_cptp(&broken, &tol());
    assert!(!v.cptp);
    assert!(!v.marginal_ok);
    assert!((v.marginal_residual - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn builders_accept_and_reject() {
    let rho: DensityMatrix<f64> = random::density(3, 3, &mut rng(14));
    let out = apply_kraus(&make_dephasing(3, 1.0).unwrap(), &rho).unwrap();
    assert!(out.matrix().distance(rho.matrix()) < 1e-12);
    let out = apply_kraus(&make_depolarizing(3, 0.0).unwrap(), &rho).unwrap();
    assert!(out.matrix().distance(&H::identity(3).scale(1.0 / 3.0)) < 1e-12);

    assert!(matches!(make_dephasing(2, 1.5), Err(crate::Error::ProbabilityOutOfRange(_))));
    assert!(matches!(make_depolarizing(2, -0.1), Err(crate::Error::ProbabilityOutOfRange(_))));
    let not_unitary = M::from_real_diagonal(&[1.0, 0.5]);
    assert!(matches!(make_unitary_channel(not_unitary), Err(crate::Error::NotUnitary { .. })));

    for ch in [
        make_dephasing(3, 0.4).unwrap(),
        make_depolarizing(3, 0.4).unwrap(),
        make_unitary_channel(random::unitary(3, &mut rng(15))).unwrap(),
    ] {
        assert!(ch.completeness_residual() < 1e-12);
        assert!(is_cptp(&kraus_to_choi(&ch).unwrap(), &tol()).cptp);
    }
}

#[test]
fn kraus_channel_rejects_incomplete() {
    let k = M::identity(2).scale_real(0.9);
    assert!(matches!(KrausChannel::new(vec![k]), Err(crate::Error::NotTracePreserving { .. })));
}

#[test]
fn transpose_of_unital_channel_is_unital() {
    let ch = random::mixed_unitary::<f64, _>(3, 4, &mut rng(16));
    assert!(ch.is_unital());
    assert!(ch.transpose_channel().unwrap().is_unital());
}
