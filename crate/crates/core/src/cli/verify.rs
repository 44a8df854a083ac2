//! Reproduction suite: the algebraic, spectral and entanglement claims about
//! the two-spin and three-spin models, each checked numerically.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::output::{fmt_num, json_num, object, to_json_text};
use super::CliError;
use crate::entanglement::{natural_tangle, schmidt_coefficients, tangle2, three_tangle, PureState, PRODUCT_TOL};
use crate::hamiltonian::{Model, SweepParameter, TripleSpinParams, TwoSpinParams};
use crate::linalg::{commutator, eigh, kron, swap_permutation, ComplexMatrix, ComplexVector};
use crate::pauli::{closure, commutes, string_to_matrix, PauliString};
use crate::spectra::{
    closed_form_h2, closed_form_h3, closed_form_k2, partition_function, sweep, CrossingKind, SweepResult,
};

/// Frequencies of the pinned three-spin point.
pub const PINNED_OMEGA: [f64; 3] = [1.0, 0.7, 0.3];
/// Pair couplings `(γ12, γ13, γ23)` of the pinned three-spin point.
pub const PINNED_GAMMA: [f64; 3] = [0.2, 0.1, 0.05];
/// Triple coupling at which pinned-point eigenvectors are examined.
pub const PINNED_EPS: f64 = 0.4;
/// ε sweep for the three-spin crossing check.
pub const PINNED_SWEEP: (f64, f64, usize) = (0.0, 2.0, 201);

/// Two-spin reference point `(ω1, ω2, ε)`.
pub const TWO_SPIN_POINT: (f64, f64, f64) = (1.0, 2.0, 0.5);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fault {
    /// Adds the offset to entries (0,2) and (2,0) of the hand-built K2 matrix.
    PerturbKTilde02(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub hbar: f64,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            seed: super::DEFAULT_SEED,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `|measured − expected| ≤ tolerance`
    Close,
    /// `measured ≤ expected`
    AtMost,
    /// `measured ≥ expected`
    AtLeast,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Close => "close",
            Relation::AtMost => "at_most",
            Relation::AtLeast => "at_least",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub hbar: f64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn summary(&self) -> String {
        let failed = self.failures().count();
        if failed == 0 {
            format!("pass ({} checks)", self.checks.len())
        } else {
            format!("fail ({failed} of {} checks failed)", self.checks.len())
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# verify-paper seed={} hbar={}\n", self.seed, fmt_num(self.hbar));
        out.push_str("check,status,measured,expected,tolerance,relation\n");
        for c in &self.checks {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                c.name,
                if c.passed { "pass" } else { "fail" },
                fmt_num(c.measured),
                fmt_num(c.expected),
                fmt_num(c.tolerance),
                c.relation.as_str()
            )
            .unwrap();
        }
        for note in &self.notes {
            writeln!(out, "# note: {note}").unwrap();
        }
        writeln!(out, "# overall: {}", self.summary()).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                object([
                    ("name", c.name.clone().into()),
                    ("status", if c.passed { "pass" } else { "fail" }.into()),
                    ("measured", json_num(c.measured)),
                    ("expected", json_num(c.expected)),
                    ("tolerance", json_num(c.tolerance)),
                    ("relation", c.relation.as_str().into()),
                ])
            })
            .collect();
        to_json_text(&object([
            ("overall", if self.passed() { "pass" } else { "fail" }.into()),
            ("seed", self.seed.into()),
            ("hbar", json_num(self.hbar)),
            ("checks", checks.into()),
            ("notes", self.notes.clone().into()),
        ]))
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, measured: f64, expected: f64, tolerance: f64, relation: Relation) {
        let passed = match relation {
            Relation::Close => (measured - expected).abs() <= tolerance,
            Relation::AtMost => measured <= expected,
            Relation::AtLeast => measured >= expected,
        };
        self.0.push(Check {
            name: name.to_string(),
            measured,
            expected,
            tolerance,
            relation,
            passed: passed && measured.is_finite(),
        });
    }

    fn close(&mut self, name: &str, measured: f64, expected: f64, tolerance: f64) {
        self.push(name, measured, expected, tolerance, Relation::Close);
    }

    /// `measured` is a deviation that must not exceed `bound`.
    fn small(&mut self, name: &str, measured: f64, bound: f64) {
        self.push(name, measured, bound, 0.0, Relation::AtMost);
    }

    fn at_least(&mut self, name: &str, measured: f64, bound: f64) {
        self.push(name, measured, bound, 0.0, Relation::AtLeast);
    }
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("valid Pauli string")
}

fn pm(s: &str) -> ComplexMatrix {
    string_to_matrix(&ps(s))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn vector(entries: &[Complex64]) -> ComplexVector {
    ComplexVector::new(entries.to_vec())
}

fn real_vector(entries: &[f64]) -> ComplexVector {
    ComplexVector::from_real(entries)
}

/// Random hermitian matrix with entries drawn from `[-1, 1]`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Eigen-residual `‖Mv − λv‖` of the normalized `v` with `λ = ⟨v, Mv⟩`, and `λ`.
pub fn eigen_residual(m: &ComplexMatrix, v: &ComplexVector) -> (f64, f64) {
    let v = v.normalized();
    let mv = m.mul_vec(&v).expect("matching dimensions");
    let lambda = v.inner(&mv).re;
    let r = mv.axpy(c(-lambda, 0.0), &v).norm();
    (r, lambda)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn comm_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    commutator(a, b).expect("square matrices of equal size").max_abs()
}

/// Smallest second Schmidt coefficient over all single-qubit cuts.
fn min_cut_entanglement(state: &PureState) -> f64 {
    (0..state.qubit_count())
        .map(|q| schmidt_coefficients(state, &[q]).expect("valid cut")[1])
        .fold(f64::INFINITY, f64::min)
}

/// Largest second Schmidt coefficient over all single-qubit cuts.
fn max_cut_entanglement(state: &PureState) -> f64 {
    (0..state.qubit_count())
        .map(|q| schmidt_coefficients(state, &[q]).expect("valid cut")[1])
        .fold(0.0, f64::max)
}

fn state(v: &ComplexVector) -> PureState {
    PureState::normalized(v.clone()).expect("2- or 3-qubit vector")
}

/// The printed `H̃` matrix.
pub fn h_tilde(hbar: f64, omega1: f64, omega2: f64, eps: f64) -> ComplexMatrix {
    let (a, b) = (hbar * omega1, hbar * omega2);
    ComplexMatrix::from_real_rows(&[
        &[a, b + eps, 0.0, 0.0],
        &[b + eps, a, 0.0, 0.0],
        &[0.0, 0.0, -a, b - eps],
        &[0.0, 0.0, b - eps, -a],
    ])
}

/// The printed `K̃` matrix.
pub fn k_tilde(hbar: f64, omega1: f64, omega2: f64, eps: f64) -> ComplexMatrix {
    let (a, b) = (hbar * omega1, hbar * omega2);
    ComplexMatrix::from_real_rows(&[
        &[a, b, eps, 0.0],
        &[b, a, 0.0, -eps],
        &[eps, 0.0, -a, b],
        &[0.0, -eps, b, -a],
    ])
}

/// Printed unnormalized eigenvectors of `K̃`, paired with `k1..k4`.
pub fn k_tilde_eigenvectors(hbar: f64, omega1: f64, omega2: f64, eps: f64) -> Vec<(f64, ComplexVector)> {
    let p = TwoSpinParams::new(omega1, omega2, eps).with_hbar(hbar);
    let k = closed_form_k2(&p).values;
    let s = hbar * (omega1 + omega2);
    let d = hbar * (omega1 - omega2);
    vec![
        (k[0], real_vector(&[eps, eps, k[0] - s, k[1] + s])),
        (k[1], real_vector(&[eps, eps, k[1] - s, k[0] + s])),
        (k[2], real_vector(&[eps, -eps, k[2] - d, k[2] - d])),
        (k[3], real_vector(&[eps, -eps, k[3] - d, k[3] - d])),
    ]
}

fn exact_near(result: &SweepResult, target: f64) -> Option<(f64, f64)> {
    result
        .crossings
        .iter()
        .filter(|e| e.kind == CrossingKind::Exact)
        .min_by(|a, b| {
            (a.parameter_value - target)
                .abs()
                .total_cmp(&(b.parameter_value - target).abs())
        })
        .map(|e| (e.parameter_value, e.energy))
}

fn exact_count(result: &SweepResult) -> usize {
    result
        .crossings
        .iter()
        .filter(|e| e.kind == CrossingKind::Exact)
        .count()
}

/// The K3 pinned point at triple coupling `eps`.
pub fn pinned_params(hbar: f64, eps: f64) -> TripleSpinParams {
    TripleSpinParams::new(PINNED_OMEGA, PINNED_GAMMA, eps).with_hbar(hbar)
}

/// Runs every check. Numeric failures inside a check abort with exit code 2.
pub fn verify_paper(options: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let h = options.hbar;
    if !(h > 0.0 && h.is_finite()) {
        return Err(CliError::Usage(format!("hbar must be > 0, got {h}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checks = Checks::default();
    let mut notes = Vec::new();
    notes.push(format!("seed={} hbar={}", options.seed, fmt_num(h)));

    // (a) commutators of A⊗I, I⊗B, A⊗B and B⊗A
    let pairs = [
        ("pauli", pm("Z"), pm("X")),
        ("random2", random_hermitian(&mut rng, 2), random_hermitian(&mut rng, 2)),
        ("random3", random_hermitian(&mut rng, 3), random_hermitian(&mut rng, 3)),
    ];
    for (label, a, b) in &pairs {
        let n = a.rows();
        let id = ComplexMatrix::identity(n);
        let (ai, ib, ab, ba) = (kron(a, &id), kron(&id, b), kron(a, b), kron(b, a));
        checks.small(&format!("a.AI_IB_commute/{label}"), comm_norm(&ai, &ib), 1e-12);
        checks.small(&format!("a.AI_AB_commute/{label}"), comm_norm(&ai, &ab), 1e-12);
        checks.small(&format!("a.IB_AB_commute/{label}"), comm_norm(&ib, &ab), 1e-12);
        let lhs = commutator(&ai, &ba)?;
        let rhs = kron(&commutator(a, b)?, a);
        checks.small(
            &format!("a.AI_BA_is_commAB_kron_A/{label}"),
            lhs.max_abs_diff(&rhs),
            1e-12,
        );
        if *label == "pauli" {
            checks.at_least("a.AI_BA_nonzero/pauli", lhs.max_abs(), 1.0);
        }
        let lhs = commutator(&ib, &ba)?;
        let rhs = kron(b, &commutator(b, a)?);
        checks.small(
            &format!("a.IB_BA_is_B_kron_commBA/{label}"),
            lhs.max_abs_diff(&rhs),
            1e-12,
        );
        if *label == "pauli" {
            checks.at_least("a.IB_BA_nonzero/pauli", lhs.max_abs(), 1.0);
        }
    }

    // (b) swap conjugations
    for n in [2usize, 3] {
        let a = random_hermitian(&mut rng, n);
        let b = random_hermitian(&mut rng, n);
        let id = ComplexMatrix::identity(n);
        let p = swap_permutation(n);
        let pt = p.transpose();
        let conj = |m: &ComplexMatrix| &(&p * m) * &pt;
        checks.small(
            &format!("b.P_AB_Pinv_is_BA/n{n}"),
            conj(&kron(&a, &b)).max_abs_diff(&kron(&b, &a)),
            1e-12,
        );
        checks.small(
            &format!("b.P_AI_Pinv_is_IA/n{n}"),
            conj(&kron(&a, &id)).max_abs_diff(&kron(&id, &a)),
            1e-12,
        );
        checks.small(
            &format!("b.P_IB_Pinv_is_BI/n{n}"),
            conj(&kron(&id, &b)).max_abs_diff(&kron(&b, &id)),
            1e-12,
        );
    }

    // (c) ±1 twice for the two-spin Pauli products
    for name in ["XX", "YY", "ZZ", "XZ", "ZX"] {
        let s = eigh(&pm(name))?;
        checks.small(
            &format!("c.{name}_eigenvalues_pm1_twice"),
            max_diff(&s.eigenvalues, &[-1.0, -1.0, 1.0, 1.0]),
            1e-12,
        );
    }

    // (d) product eigenvectors and the Bell basis
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z_up = vector(&[c(1.0, 0.0), c(0.0, 0.0)]);
    let z_dn = vector(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let x_up = vector(&[c(r, 0.0), c(r, 0.0)]);
    let x_dn = vector(&[c(r, 0.0), c(-r, 0.0)]);
    let y_a = vector(&[c(0.0, r), c(r, 0.0)]);
    let y_b = vector(&[c(0.0, -r), c(r, 0.0)]);
    let catalog: [(&str, [(&ComplexVector, &ComplexVector); 4]); 5] = [
        ("ZZ", [(&z_up, &z_up), (&z_up, &z_dn), (&z_dn, &z_up), (&z_dn, &z_dn)]),
        ("XX", [(&x_up, &x_up), (&x_up, &x_dn), (&x_dn, &x_up), (&x_dn, &x_dn)]),
        ("YY", [(&y_a, &y_a), (&y_a, &y_b), (&y_b, &y_a), (&y_b, &y_b)]),
        ("XZ", [(&x_up, &z_up), (&x_up, &z_dn), (&x_dn, &z_up), (&x_dn, &z_dn)]),
        ("ZX", [(&z_up, &x_up), (&z_up, &x_dn), (&z_dn, &x_up), (&z_dn, &x_dn)]),
    ];
    let mut worst_product = 0.0f64;
    for (name, vectors) in &catalog {
        let m = pm(name);
        let mut worst = 0.0f64;
        for (u, v) in vectors {
            let w = u.kron(v);
            let (res, lambda) = eigen_residual(&m, &w);
            worst = worst.max(res).max((lambda.abs() - 1.0).abs());
            worst_product = worst_product.max(max_cut_entanglement(&state(&w)));
        }
        checks.small(&format!("d.{name}_product_eigenvectors"), worst, 1e-12);
    }
    checks.small("d.catalog_vectors_are_products", worst_product, 1e-12);
    let bell = [
        real_vector(&[r, 0.0, 0.0, r]),
        real_vector(&[0.0, r, r, 0.0]),
        real_vector(&[r, 0.0, 0.0, -r]),
        real_vector(&[0.0, r, -r, 0.0]),
    ];
    let mut worst = 0.0f64;
    let mut worst_tangle = 0.0f64;
    for v in &bell {
        for name in ["XX", "YY", "ZZ"] {
            worst = worst.max(eigen_residual(&pm(name), v).0);
        }
        worst_tangle = worst_tangle.max((tangle2(&state(v))?.value - 1.0).abs());
    }
    checks.small("d.bell_basis_eigenvectors_of_XX_YY_ZZ", worst, 1e-12);
    checks.small("d.bell_basis_tangle_one", worst_tangle, 1e-10);

    // (e) the maximally entangled quadruple
    let quadruple = [
        real_vector(&[-0.5, -0.5, -0.5, 0.5]),
        real_vector(&[-0.5, 0.5, 0.5, 0.5]),
        real_vector(&[0.5, -0.5, 0.5, 0.5]),
        real_vector(&[0.5, 0.5, -0.5, 0.5]),
    ];
    for name in ["XZ", "ZX", "YY"] {
        let m = pm(name);
        let worst = quadruple.iter().map(|v| eigen_residual(&m, v).0).fold(0.0, f64::max);
        checks.small(&format!("e.quadruple_eigenvectors_of_{name}"), worst, 1e-12);
    }
    let worst = quadruple
        .iter()
        .map(|v| tangle2(&state(v)).map(|t| (t.value - 1.0).abs()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.small("e.quadruple_tangle_one", worst, 1e-10);

    // (f) closed-form two-spin spectra
    let (w1, w2, eps) = TWO_SPIN_POINT;
    let p2 = TwoSpinParams::new(w1, w2, eps).with_hbar(h);
    let h_matrix = Model::H2(p2).matrix()?;
    let k_matrix = Model::K2(p2).matrix()?;
    let h_t = h_tilde(h, w1, w2, eps);
    let mut k_t = k_tilde(h, w1, w2, eps);
    if let Some(Fault::PerturbKTilde02(delta)) = options.fault {
        k_t[(0, 2)] += c(delta, 0.0);
        k_t[(2, 0)] += c(delta, 0.0);
    }
    checks.small("f.H_tilde_equals_built_H2", h_t.max_abs_diff(&h_matrix), 1e-12);
    checks.small("f.K_tilde_equals_built_K2", k_t.max_abs_diff(&k_matrix), 1e-12);
    let hs = eigh(&h_t)?;
    let ks = eigh(&k_t)?;
    checks.small(
        "f.H_tilde_closed_form_E",
        max_diff(&hs.eigenvalues, &closed_form_h2(&p2).sorted_values()),
        1e-10,
    );
    checks.small(
        "f.K_tilde_closed_form_k",
        max_diff(&ks.eigenvalues, &closed_form_k2(&p2).sorted_values()),
        1e-10,
    );
    let e = closed_form_h2(&p2).values;
    let h_vectors = [(&z_up, &x_up), (&z_up, &x_dn), (&z_dn, &x_up), (&z_dn, &x_dn)];
    let worst = h_vectors
        .iter()
        .zip(&e)
        .map(|((u, v), &energy)| {
            let (res, lambda) = eigen_residual(&h_t, &u.kron(v));
            res + (lambda - energy).abs()
        })
        .fold(0.0, f64::max);
    checks.small("f.H_tilde_printed_eigenvectors", worst, 1e-12);
    let worst = k_tilde_eigenvectors(h, w1, w2, eps)
        .iter()
        .map(|(k, v)| {
            let (res, lambda) = eigen_residual(&k_t, v);
            res + (lambda - k).abs()
        })
        .fold(0.0, f64::max);
    checks.small("f.K_tilde_printed_eigenvectors", worst, 1e-10);
    checks.small("f.trace_H_zero", h_t.trace().norm(), 1e-12);
    checks.small("f.trace_K_zero", k_t.trace().norm(), 1e-12);
    let (mut worst_h, mut worst_k) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let p = TwoSpinParams::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.0..3.0),
        )
        .with_hbar(h);
        worst_h = worst_h.max(max_diff(
            &eigh(&Model::H2(p).matrix()?)?.eigenvalues,
            &closed_form_h2(&p).sorted_values(),
        ));
        worst_k = worst_k.max(max_diff(
            &eigh(&Model::K2(p).matrix()?)?.eigenvalues,
            &closed_form_k2(&p).sorted_values(),
        ));
    }
    checks.small("f.H2_closed_form_random_draws", worst_h, 1e-10);
    checks.small("f.K2_closed_form_random_draws", worst_k, 1e-10);
    let zh = partition_function(&hs, 1.0)?.value;
    let zk = partition_function(&ks, 1.0)?.value;
    checks.at_least("f.partition_functions_differ", (zh - zk).abs(), 1.0);

    // (g) crossing dichotomy
    let sweep_two = |k: bool, parameter: SweepParameter, fixed: TwoSpinParams, lo: f64, hi: f64, steps: usize| {
        let model = if k { Model::K2(fixed) } else { Model::H2(fixed) };
        sweep(&model, parameter, lo, hi, steps)
    };
    let base = TwoSpinParams::new(1.0, 2.0, 0.0).with_hbar(h);
    let h_sweep = sweep_two(false, SweepParameter::Eps, base, 0.0, 3.0 * h, 301)?;
    let k_sweep = sweep_two(true, SweepParameter::Eps, base, 0.0, 3.0 * h, 301)?;
    for (target, energy) in [(h, -2.0 * h), (2.0 * h, -h)] {
        let (at, e) = exact_near(&h_sweep, target).unwrap_or((f64::NAN, f64::NAN));
        let tag = if target == h { "1" } else { "2" };
        checks.close(&format!("g.H2_exact_crossing_location_{tag}"), at, target, 1e-8);
        checks.close(&format!("g.H2_exact_crossing_energy_{tag}"), e, energy, 1e-8);
    }
    checks.close("g.H2_exact_crossing_count", exact_count(&h_sweep) as f64, 2.0, 0.0);
    checks.small("g.K2_exact_crossing_count", exact_count(&k_sweep) as f64, 0.0);
    checks.at_least(
        "g.K2_min_pairwise_gap",
        k_sweep.min_pairwise_gap().map_or(f64::NAN, |g| g.gap),
        0.2,
    );
    let omega_base = TwoSpinParams::new(0.0, 2.0, 0.5).with_hbar(h);
    let k_omega = sweep_two(true, SweepParameter::Omega1, omega_base, 0.0, 4.0, 401)?;
    let h_omega = sweep_two(false, SweepParameter::Omega1, omega_base, 0.0, 4.0, 401)?;
    let avoided = k_omega
        .crossings
        .iter()
        .filter(|e| e.kind == CrossingKind::Avoided)
        .min_by(|a, b| {
            (a.parameter_value - 2.0)
                .abs()
                .total_cmp(&(b.parameter_value - 2.0).abs())
        });
    checks.close(
        "g.K2_avoided_gap_is_2eps",
        avoided.map_or(f64::NAN, |e| e.gap_at_minimum),
        1.0,
        1e-6,
    );
    checks.close(
        "g.K2_avoided_gap_location",
        avoided.map_or(f64::NAN, |e| e.parameter_value),
        2.0,
        1e-6,
    );
    checks.close(
        "g.H2_exact_crossing_at_omega1_2",
        exact_near(&h_omega, 2.0).map_or(f64::NAN, |x| x.0),
        2.0,
        1e-8,
    );
    checks.small("g.H2_conserves_ZX", comm_norm(&h_matrix, &pm("ZX")), 1e-12);
    let subgroup = closure(&[ps("ZI"), ps("IX")])?;
    checks.close("g.closure_ZI_IX_order", subgroup.len() as f64, 4.0, 0.0);
    let noncommuting = subgroup
        .iter()
        .flat_map(|a| subgroup.iter().map(move |b| (a, b)))
        .filter(|(a, b)| !commutes(a, b).expect("equal qubit counts"))
        .count();
    checks.small("g.closure_ZI_IX_abelian", noncommuting as f64, 0.0);
    let generated = closure(&[ps("ZI"), ps("IX"), ps("XZ")])?;
    notes.push(format!(
        "closure of {{ZI, IX, XZ}} has order {}; the full two-qubit Pauli group has 64 elements",
        generated.len()
    ));

    // (h) the triple product σx⊗σy⊗σz
    let xyz = pm("XYZ");
    let s = eigh(&xyz)?;
    checks.small(
        "h.XYZ_eigenvalues_pm1_fourfold",
        max_diff(&s.eigenvalues, &[-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0]),
        1e-12,
    );
    let mut worst = 0.0f64;
    let mut worst_product = 0.0f64;
    for (sx, a) in [(1.0, &x_up), (-1.0, &x_dn)] {
        for (sy, b) in [(1.0, &y_b), (-1.0, &y_a)] {
            for (sz, cc) in [(1.0, &z_up), (-1.0, &z_dn)] {
                let v = a.kron(b).kron(cc);
                let (res, lambda) = eigen_residual(&xyz, &v);
                worst = worst.max(res + (lambda - sx * sy * sz).abs());
                worst_product = worst_product.max(max_cut_entanglement(&state(&v)));
            }
        }
    }
    checks.small("h.XYZ_eight_product_eigenstates", worst, 1e-12);
    checks.small("h.XYZ_eigenstates_are_products", worst_product, 1e-12);

    // (i) a fully entangled XYZ eigenstate
    let ghz_like = vector(&[
        c(0.5, 0.0),
        c(0.5, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.5),
        c(0.0, -0.5),
    ]);
    checks.small(
        "i.entangled_state_is_XYZ_eigenvector",
        eigen_residual(&xyz, &ghz_like).0,
        1e-12,
    );
    let tau = three_tangle(&state(&ghz_like))?.value;
    checks.at_least("i.three_tangle_positive", tau, PRODUCT_TOL);
    checks.close("i.three_tangle_value", tau, 1.0, 1e-10);

    // (j) three-spin models at the pinned point
    let p3 = pinned_params(h, PINNED_EPS);
    let h3 = eigh(&Model::H3(p3).matrix()?)?;
    let formula = sorted(closed_form_h3(&p3).iter().map(|l| l.value).collect());
    checks.small("j.H3_sign_formula", max_diff(&h3.eigenvalues, &formula), 1e-10);
    let h3_spec = Model::H3(p3).spec()?;
    let terms: Vec<_> = h3_spec.terms().iter().map(|t| t.string().clone()).collect();
    let noncommuting = terms
        .iter()
        .enumerate()
        .flat_map(|(i, a)| terms[i + 1..].iter().map(move |b| (a, b)))
        .filter(|(a, b)| !commutes(a, b).expect("equal qubit counts"))
        .count();
    checks.small("j.H3_terms_commute", noncommuting as f64, 0.0);
    let worst = h3
        .eigenvectors
        .iter()
        .map(|v| max_cut_entanglement(&state(v)))
        .fold(0.0, f64::max);
    checks.small("j.H3_product_eigenbasis", worst, PRODUCT_TOL);
    let k3_matrix = Model::K3(p3).matrix()?;
    let k3 = eigh(&k3_matrix)?;
    let best = k3
        .eigenvectors
        .iter()
        .map(|v| min_cut_entanglement(&state(v)))
        .fold(0.0, f64::max);
    checks.at_least("j.K3_eigenvector_entangled_across_every_cut", best, PRODUCT_TOL);
    let k3_total = k3
        .eigenvectors
        .iter()
        .map(|v| natural_tangle(&state(v)).value)
        .fold(0.0, f64::max);
    let (lo, hi, steps) = PINNED_SWEEP;
    let k3_sweep = sweep(&Model::K3(pinned_params(h, 0.0)), SweepParameter::Eps, lo, hi, steps)?;
    checks.small("j.K3_no_exact_crossing", exact_count(&k3_sweep) as f64, 0.0);
    notes.push(format!(
        "three-spin point: omega = {PINNED_OMEGA:?}, gamma = {PINNED_GAMMA:?}, eps = {PINNED_EPS} for eigenvectors, eps in [{lo}, {hi}] with {steps} steps for crossings"
    ));
    notes.push(format!(
        "K3 commutes with IYI ({}) and XIZ ({}); the four joint sectors make every K3 eigenvector a product across the middle qubit (largest three-tangle {})",
        fmt_num(comm_norm(&k3_matrix, &pm("IYI"))),
        fmt_num(comm_norm(&k3_matrix, &pm("XIZ"))),
        fmt_num(k3_total)
    ));
    for e in k3_sweep.crossings.iter().filter(|e| e.kind == CrossingKind::Exact) {
        notes.push(format!(
            "K3 exact crossing at eps={} energy={} tracks={}/{}",
            fmt_num(e.parameter_value),
            fmt_num(e.energy),
            e.track_a,
            e.track_b
        ));
    }

    Ok(VerifyReport {
        seed: options.seed,
        hbar: h,
        checks: checks.0,
        notes,
    })
}
