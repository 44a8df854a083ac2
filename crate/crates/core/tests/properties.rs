use num_complex::Complex64;
use proptest::prelude::*;

use spinspec::entanglement::{is_product, schmidt_coefficients, tangle2, three_tangle, PureState};
use spinspec::hamiltonian::{Model, SweepParameter, TripleSpinParams, TwoSpinParams};
use spinspec::linalg::{commutator, eigh, kron, swap_permutation, ComplexMatrix, ComplexVector, Spectrum};
use spinspec::pauli::{commutes, multiply, string_to_matrix, PauliLetter, PauliString};
use spinspec::spectra::{closed_form_h2, closed_form_h3, closed_form_k2, partition_function, sweep};

fn complex_entries(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(n * n).prop_map(move |d| ComplexMatrix::from_vec(n, n, d).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

fn hermitian_pair() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (2usize..=3).prop_flat_map(|n| (hermitian(n), hermitian(n)))
}

fn state(qubits: u32) -> impl Strategy<Value = PureState> {
    complex_entries(1 << qubits)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6)
        .prop_map(|v| PureState::normalized(ComplexVector::new(v)).unwrap())
}

/// Random single-qubit unitary `e^{iα}·[[a, −b*], [b, a*]]`.
fn unitary() -> impl Strategy<Value = ComplexMatrix> {
    (complex_entries(2), -3.2f64..3.2).prop_filter_map("nonzero", |(v, alpha)| {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n < 1e-3 {
            return None;
        }
        let (a, b) = (v[0] / n, v[1] / n);
        let phase = Complex64::from_polar(1.0, alpha);
        Some(ComplexMatrix::from_rows(&[
            vec![a * phase, -b.conj() * phase],
            vec![b * phase, a.conj() * phase],
        ]))
    })
}

fn two_spin() -> impl Strategy<Value = TwoSpinParams> {
    (-3.0f64..3.0, -3.0f64..3.0, 0.0f64..3.0, prop::bool::ANY)
        .prop_map(|(a, b, e, two)| TwoSpinParams::new(a, b, e).with_hbar(if two { 2.0 } else { 1.0 }))
}

fn pauli_string(qubits: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0usize..4, qubits), 0u8..4).prop_map(|(letters, phase)| {
        let letters = letters.into_iter().map(|k| PauliLetter::ALL[k]).collect();
        PauliString::new(spinspec::pauli::Phase::from_quarter_turns(phase), letters).unwrap()
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_product_law(
        (a, b, c, d) in (2usize..=3).prop_flat_map(|n| (matrix(n), matrix(n), matrix(n), matrix(n)))
    ) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn commutator_identities((a, b) in hermitian_pair()) {
        let id = ComplexMatrix::identity(a.rows());
        let (ai, ib, ab, ba) = (kron(&a, &id), kron(&id, &b), kron(&a, &b), kron(&b, &a));
        prop_assert!(commutator(&ai, &ib).unwrap().max_abs() <= 1e-12);
        prop_assert!(commutator(&ai, &ab).unwrap().max_abs() <= 1e-12);
        prop_assert!(commutator(&ib, &ab).unwrap().max_abs() <= 1e-12);
        let lhs = commutator(&ai, &ba).unwrap();
        prop_assert!(lhs.max_abs_diff(&kron(&commutator(&a, &b).unwrap(), &a)) <= 1e-12);
        let lhs = commutator(&ib, &ba).unwrap();
        prop_assert!(lhs.max_abs_diff(&kron(&b, &commutator(&b, &a).unwrap())) <= 1e-12);
    }

    #[test]
    fn swap_conjugations((a, b) in hermitian_pair()) {
        let n = a.rows();
        let id = ComplexMatrix::identity(n);
        let p = swap_permutation(n);
        let pt = p.transpose();
        prop_assert_eq!(&(&p * &pt), &ComplexMatrix::identity(n * n));
        let conj = |m: &ComplexMatrix| &(&p * m) * &pt;
        prop_assert!(conj(&kron(&a, &b)).max_abs_diff(&kron(&b, &a)) <= 1e-12);
        prop_assert!(conj(&kron(&a, &id)).max_abs_diff(&kron(&id, &a)) <= 1e-12);
        prop_assert!(conj(&kron(&id, &b)).max_abs_diff(&kron(&b, &id)) <= 1e-12);
    }

    #[test]
    fn eigh_reconstructs(m in (1usize..=16).prop_flat_map(hermitian)) {
        let s = eigh(&m).unwrap();
        let bound = Spectrum::residual_bound(&m);
        prop_assert!(s.max_residual <= bound);
        prop_assert!(s.reconstruct().max_abs_diff(&m) <= bound);
        prop_assert!(s.orthonormality_error() <= 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = s.eigenvalues.iter().sum();
        prop_assert!((trace - m.trace().re).abs() <= bound);
    }

    #[test]
    fn eigh_is_deterministic(m in (1usize..=8).prop_flat_map(hermitian)) {
        let a = eigh(&m).unwrap();
        let b = eigh(&m).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn eigenvector_phase_rule(m in (2usize..=6).prop_flat_map(hermitian)) {
        for v in eigh(&m).unwrap().eigenvectors {
            let top = v.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let first = v.as_slice().iter().find(|z| z.norm() >= top - 1e-12).unwrap();
            prop_assert!(first.im.abs() <= 1e-12 && first.re > 0.0);
        }
    }

    #[test]
    fn two_spin_closed_forms(p in two_spin()) {
        let h = eigh(&Model::H2(p).matrix().unwrap()).unwrap();
        let k = eigh(&Model::K2(p).matrix().unwrap()).unwrap();
        prop_assert!(max_diff(&h.eigenvalues, &closed_form_h2(&p).sorted_values()) <= 1e-10);
        prop_assert!(max_diff(&k.eigenvalues, &closed_form_k2(&p).sorted_values()) <= 1e-10);
        prop_assert!(h.eigenvalues.iter().sum::<f64>().abs() <= 1e-10);
        prop_assert!(k.eigenvalues.iter().sum::<f64>().abs() <= 1e-10);
    }

    #[test]
    fn three_spin_sign_formula(
        omega in prop::array::uniform3(-3.0f64..3.0),
        gamma in prop::array::uniform3(-1.0f64..1.0),
        eps in 0.0f64..3.0,
    ) {
        let p = TripleSpinParams::new(omega, gamma, eps);
        let numeric = eigh(&Model::H3(p).matrix().unwrap()).unwrap().eigenvalues;
        let formula = sorted(closed_form_h3(&p).iter().map(|l| l.value).collect());
        prop_assert!(max_diff(&numeric, &formula) <= 1e-10);
    }

    #[test]
    fn pauli_product_is_a_homomorphism(a in pauli_string(3), b in pauli_string(3)) {
        let product = string_to_matrix(&multiply(&a, &b).unwrap());
        let direct = &string_to_matrix(&a) * &string_to_matrix(&b);
        prop_assert!(product.max_abs_diff(&direct) <= 1e-15);
        let matrix_commutes = commutator(&string_to_matrix(&a), &string_to_matrix(&b)).unwrap().max_abs() == 0.0;
        prop_assert_eq!(commutes(&a, &b).unwrap(), matrix_commutes);
    }

    #[test]
    fn pauli_display_round_trips(a in pauli_string(4)) {
        prop_assert_eq!(a.to_string().parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn tangle_local_unitary_invariance(s in state(2), u in unitary(), v in unitary()) {
        let before = tangle2(&s).unwrap().value;
        let rotated = kron(&u, &v).mul_vec(s.amplitudes()).unwrap();
        let after = tangle2(&PureState::normalized(rotated).unwrap()).unwrap().value;
        prop_assert!((before - after).abs() <= 1e-9);
    }

    #[test]
    fn tangle_global_phase_invariance(s in state(2), phi in 0.0f64..6.3) {
        let before = tangle2(&s).unwrap().value;
        let shifted = s.amplitudes().scale(Complex64::from_polar(1.0, phi));
        let after = tangle2(&PureState::new(shifted).unwrap()).unwrap().value;
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn tangles_lie_in_unit_interval(two in state(2), three in state(3)) {
        let t = tangle2(&two).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
        let t = three_tangle(&three).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
    }

    #[test]
    fn tangle_matches_determinant_oracle(s in state(2)) {
        // τ = 4|a00·a11 − a01·a10|²
        let a = s.amplitudes().as_slice();
        let det = a[0] * a[3] - a[1] * a[2];
        prop_assert!((tangle2(&s).unwrap().value - 4.0 * det.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn three_tangle_vanishes_on_products(one in complex_entries(2), pair in state(2), position in 0usize..3) {
        let n = (one[0].norm_sqr() + one[1].norm_sqr()).sqrt();
        prop_assume!(n > 1e-3);
        let one = ComplexVector::new(vec![one[0] / n, one[1] / n]);
        let amplitudes = match position {
            0 => one.kron(pair.amplitudes()),
            2 => pair.amplitudes().kron(&one),
            _ => {
                // single qubit in the middle: |ψ⟩ = Σ p_ac |a⟩|s⟩|c⟩
                let p = pair.amplitudes().as_slice();
                let s = one.as_slice();
                let mut out = vec![Complex64::new(0.0, 0.0); 8];
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..2 {
                            out[4 * a + 2 * b + c] = p[2 * a + c] * s[b];
                        }
                    }
                }
                ComplexVector::new(out)
            }
        };
        let s = PureState::normalized(amplitudes).unwrap();
        prop_assert!(three_tangle(&s).unwrap().value <= 1e-10);
        prop_assert!(schmidt_coefficients(&s, &[position]).unwrap()[1] <= 1e-7);
    }

    #[test]
    fn schmidt_squares_sum_to_one(s in state(3), cut in prop::sample::subsequence(vec![0usize, 1, 2], 1..=2)) {
        let coefficients = schmidt_coefficients(&s, &cut).unwrap();
        let total: f64 = coefficients.iter().map(|c| c * c).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!(coefficients.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn product_detection_agrees_with_tangle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| -> ComplexVector {
        ComplexVector::new(
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    };
    let (mut products, mut entangled) = (0, 0);
    for k in 0..1000 {
        let v = if k % 2 == 0 {
            draw(&mut rng, 2).normalized().kron(&draw(&mut rng, 2).normalized())
        } else {
            draw(&mut rng, 4)
        };
        let s = PureState::normalized(v).unwrap();
        let tangle = tangle2(&s).unwrap().value;
        if is_product(&s, &[0], 1e-9).unwrap() {
            products += 1;
            assert!(tangle <= 1e-9, "product state with tangle {tangle}");
        }
        if tangle <= 1e-12 {
            assert!(schmidt_coefficients(&s, &[0]).unwrap()[1] <= 1e-6);
        } else {
            entangled += 1;
        }
    }
    assert!(
        products >= 400 && entangled >= 400,
        "{products} products, {entangled} entangled"
    );
}

#[test]
fn k2_eigenvector_tangle_grows_with_coupling() {
    let minimum = |eps: f64| -> f64 {
        let s = eigh(&Model::K2(TwoSpinParams::new(1.0, 2.0, eps)).matrix().unwrap()).unwrap();
        s.eigenvectors
            .iter()
            .map(|v| tangle2(&PureState::normalized(v.clone()).unwrap()).unwrap().value)
            .fold(f64::INFINITY, f64::min)
    };
    let values: Vec<f64> = [0.1, 0.5, 1.0, 5.0, 20.0].iter().map(|&e| minimum(e)).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
    // derived: the two eigenvector pairs have tangles ε²/(9+ε²) and ε²/(1+ε²)
    assert!((values[1] - 0.25 / 9.25).abs() < 1e-10);
    assert!(minimum(100.0) > 0.99);
}

#[test]
fn large_coupling_asymptotics() {
    for (w1, w2) in [(1.0f64, 2.0f64), (-0.5, 1.5), (2.0, 2.0)] {
        let eps = 1e3 * f64::max(f64::max(w1.abs(), w2.abs()), 1.0);
        let p = TwoSpinParams::new(w1, w2, eps);
        for model in [Model::H2(p), Model::K2(p)] {
            for e in eigh(&model.matrix().unwrap()).unwrap().eigenvalues {
                assert!((e.abs() - eps).abs() <= 0.005 * eps, "{e} vs ±{eps}");
            }
        }
    }
}

#[test]
fn partition_functions_agree_without_coupling() {
    let p = TwoSpinParams::new(1.0, 2.0, 0.0);
    let zh = partition_function(&eigh(&Model::H2(p).matrix().unwrap()).unwrap(), 1.0)
        .unwrap()
        .value;
    let zk = partition_function(&eigh(&Model::K2(p).matrix().unwrap()).unwrap(), 1.0)
        .unwrap()
        .value;
    assert!((zh - zk).abs() <= 1e-12);
}

#[test]
fn k2_never_crosses_for_generic_frequencies() {
    for (w1, w2) in [(1.0, 2.0), (0.3, -1.7), (2.2, 0.9)] {
        let s = sweep(
            &Model::K2(TwoSpinParams::new(w1, w2, 0.0)),
            SweepParameter::Eps,
            0.01,
            3.0,
            300,
        )
        .unwrap();
        assert_eq!(
            s.crossings
                .iter()
                .filter(|e| e.kind == spinspec::spectra::CrossingKind::Exact)
                .count(),
            0
        );
    }
}

#[test]
fn sweep_is_deterministic() {
    let model = Model::K3(TripleSpinParams::new([1.0, 0.7, 0.3], [0.2, 0.1, 0.05], 0.0));
    let a = sweep(&model, SweepParameter::Eps, 0.0, 2.0, 201).unwrap();
    let b = sweep(&model, SweepParameter::Eps, 0.0, 2.0, 201).unwrap();
    assert_eq!(a, b);
    for i in 0..a.grid.len() {
        let mut at: Vec<f64> = a.tracks.iter().map(|t| t[i]).collect();
        at.sort_by(f64::total_cmp);
        assert_eq!(at, a.levels_at(i));
    }
}
