//! Entanglement of two- and three-qubit pure states.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of
//! the amplitude index.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{ComplexVector, Spectrum};
use crate::pauli::{string_to_matrix, PauliLetter, PauliString};

/// Norm tolerance for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Default threshold on the second Schmidt coefficient for [`is_product`].
pub const PRODUCT_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntanglementError {
    #[error("expected a {expected}-qubit state, got {found} qubits")]
    WrongQubitCount { expected: usize, found: usize },
    #[error("state dimension {0} is not 4 or 8")]
    UnsupportedDimension(usize),
    #[error("state is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("subspace vectors are not orthogonal (|<v1,v2>| = {overlap:e})")]
    NotOrthogonal { overlap: f64 },
}

/// A normalized 2- or 3-qubit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubit_count: usize,
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self, EntanglementError> {
        let qubit_count = match amplitudes.dim() {
            4 => 2,
            8 => 3,
            d => return Err(EntanglementError::UnsupportedDimension(d)),
        };
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(EntanglementError::Unnormalized { norm });
        }
        Ok(Self {
            qubit_count,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` first. A zero vector is rejected.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self, EntanglementError> {
        if amplitudes.norm() == 0.0 {
            return Err(EntanglementError::Unnormalized { norm: 0.0 });
        }
        Self::new(amplitudes.normalized())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    fn amp(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    fn require(&self, qubits: usize) -> Result<(), EntanglementError> {
        if self.qubit_count != qubits {
            return Err(EntanglementError::WrongQubitCount {
                expected: qubits,
                found: self.qubit_count,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Tangle,
    ThreeTangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleReport {
    pub value: f64,
    pub measure: Measure,
    /// Set when the source eigenvalue is degenerate, so the value depends on
    /// the basis chosen inside the eigenspace.
    pub degenerate_basis_flag: bool,
}

/// Spin-flip concurrence `|ψᵀ (σy⊗σy) ψ|` of a two-qubit state.
fn concurrence(state: &PureState) -> f64 {
    let yy = string_to_matrix(&PauliString::from_letters(vec![PauliLetter::Y, PauliLetter::Y]).expect("YY"));
    let flipped = yy.mul_vec(state.amplitudes()).expect("dimension 4");
    // no conjugation: ψᵀ, not ψ†
    state
        .amplitudes()
        .as_slice()
        .iter()
        .zip(flipped.as_slice())
        .map(|(a, b)| a * b)
        .sum::<Complex64>()
        .norm()
}

/// Tangle `τ = C²` of a two-qubit pure state.
pub fn tangle2(state: &PureState) -> Result<TangleReport, EntanglementError> {
    state.require(2)?;
    let c = concurrence(state);
    Ok(TangleReport {
        value: c * c,
        measure: Measure::Tangle,
        degenerate_basis_flag: false,
    })
}

/// Three-tangle `4·|d1 − 2·d2 + 4·d3|` (Cayley hyperdeterminant).
pub fn three_tangle(state: &PureState) -> Result<TangleReport, EntanglementError> {
    state.require(3)?;
    let a = |i: usize| state.amp(i);
    let (a000, a001, a010, a011) = (a(0b000), a(0b001), a(0b010), a(0b011));
    let (a100, a101, a110, a111) = (a(0b100), a(0b101), a(0b110), a(0b111));

    let d1 =
        a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101 + a011 * a011 * a100 * a100;
    let d2 = a000 * a111 * (a011 * a100 + a101 * a010 + a110 * a001)
        + a011 * a100 * (a101 * a010 + a110 * a001)
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;

    Ok(TangleReport {
        value: 4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm(),
        measure: Measure::ThreeTangle,
        degenerate_basis_flag: false,
    })
}

/// Tangle (2 qubits) or three-tangle (3 qubits), whichever fits the state.
pub fn natural_tangle(state: &PureState) -> TangleReport {
    match state.qubit_count() {
        2 => tangle2(state).expect("2 qubits"),
        _ => three_tangle(state).expect("3 qubits"),
    }
}

/// Reshapes the state into a `2 × 2^(n-1)` amplitude matrix whose rows are
/// indexed by the single-qubit side of the cut.
fn two_row_reshape(state: &PureState, bipartition: &[usize]) -> Result<[Vec<Complex64>; 2], EntanglementError> {
    let n = state.qubit_count();
    let mut seen = vec![false; n];
    for &q in bipartition {
        if q >= n {
            return Err(EntanglementError::InvalidBipartition(format!(
                "qubit {q} out of range for {n} qubits"
            )));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(EntanglementError::InvalidBipartition(format!("qubit {q} listed twice")));
        }
    }
    let side = bipartition.len();
    if side == 0 || side == n {
        return Err(EntanglementError::InvalidBipartition(
            "both sides must be nonempty".to_string(),
        ));
    }
    // With at most three qubits one side of any cut is a single qubit.
    let pivot = if side == 1 {
        bipartition[0]
    } else {
        (0..n).find(|&q| !seen[q]).expect("complement nonempty")
    };
    let mut rows = [Vec::new(), Vec::new()];
    for index in 0..(1usize << n) {
        let bit = (index >> (n - 1 - pivot)) & 1;
        rows[bit].push(state.amp(index));
    }
    Ok(rows)
}

/// Singular values of a two-row matrix, descending.
///
/// Uses `σ1² + σ2² = ‖M‖_F²` and `σ1·σ2 = sqrt(det(M M†))`, with the Gram
/// determinant expanded over 2×2 minors, so tiny σ2 keep full relative precision.
fn two_row_singular_values(rows: &[Vec<Complex64>; 2]) -> [f64; 2] {
    let frob: f64 = rows.iter().flatten().map(|z| z.norm_sqr()).sum();
    let k = rows[0].len();
    let mut minors = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            minors += (rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i]).norm_sqr();
        }
    }
    let product = minors.sqrt();
    let disc = (frob * frob - 4.0 * product * product).max(0.0).sqrt();
    let s1 = ((frob + disc) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { product / s1 } else { 0.0 };
    [s1, s2]
}

/// Schmidt coefficients of `state` across the cut `bipartition | rest`, descending.
pub fn schmidt_coefficients(state: &PureState, bipartition: &[usize]) -> Result<Vec<f64>, EntanglementError> {
    let rows = two_row_reshape(state, bipartition)?;
    Ok(two_row_singular_values(&rows).to_vec())
}

/// True when the second Schmidt coefficient is at most `tol`.
pub fn is_product(state: &PureState, bipartition: &[usize], tol: f64) -> Result<bool, EntanglementError> {
    Ok(schmidt_coefficients(state, bipartition)?[1] <= tol)
}

/// Tangle between one qubit and the rest, `4·det ρ_q = (2·σ1·σ2)²`.
pub fn single_qubit_tangle(state: &PureState, qubit: usize) -> Result<f64, EntanglementError> {
    let s = schmidt_coefficients(state, &[qubit])?;
    Ok((2.0 * s[0] * s[1]).powi(2))
}

/// Per-eigenvector entanglement, flagging degenerate eigenvalues.
///
/// Returns `None` unless the spectrum is of a 2- or 3-qubit operator.
pub fn eigenvector_tangles(spectrum: &Spectrum) -> Option<Vec<TangleReport>> {
    if spectrum.dim != 4 && spectrum.dim != 8 {
        return None;
    }
    Some(
        spectrum
            .eigenvectors
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let state = PureState::normalized(v.clone()).expect("eigenvectors are unit vectors");
                TangleReport {
                    degenerate_basis_flag: spectrum.is_degenerate(k, DEGENERACY_TOL),
                    ..natural_tangle(&state)
                }
            })
            .collect(),
    )
}

/// Extremal tangles over the span of two orthonormal two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleRange {
    pub min: f64,
    /// `(θ, φ)` of the minimizing superposition `cos θ·v1 + e^{iφ} sin θ·v2`.
    pub argmin: (f64, f64),
    pub max: f64,
    pub argmax: (f64, f64),
}

/// Spin-flip bilinear form restricted to `span{v1, v2}`.
struct SubspaceForm {
    c11: Complex64,
    c12: Complex64,
    c22: Complex64,
}

impl SubspaceForm {
    fn new(v1: &PureState, v2: &PureState) -> Self {
        let yy = string_to_matrix(&PauliString::from_letters(vec![PauliLetter::Y, PauliLetter::Y]).expect("YY"));
        let bilinear = |a: &ComplexVector, b: &ComplexVector| -> Complex64 {
            let fb = yy.mul_vec(b).expect("dimension 4");
            a.as_slice().iter().zip(fb.as_slice()).map(|(x, y)| x * y).sum()
        };
        Self {
            c11: bilinear(v1.amplitudes(), v1.amplitudes()),
            c12: bilinear(v1.amplitudes(), v2.amplitudes()),
            c22: bilinear(v2.amplitudes(), v2.amplitudes()),
        }
    }

    /// Tangle of `cos θ·v1 + e^{iφ} sin θ·v2`.
    fn tangle(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let w = Complex64::from_polar(1.0, phi);
        let value = self.c11 * (c * c) + self.c12 * (w * (2.0 * s * c)) + self.c22 * (w * w * (s * s));
        value.norm_sqr()
    }
}

/// Golden-section minimization of `f` on `[lo, hi]` down to width `tol`.
pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Scans `cos θ·v1 + e^{iφ} sin θ·v2` over `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)` on a
/// `grid`-resolution mesh, then polishes each extremum by coordinate-wise
/// golden-section search to 1e-8.
pub fn subspace_tangle_range(v1: &PureState, v2: &PureState, grid: usize) -> Result<TangleRange, EntanglementError> {
    v1.require(2)?;
    v2.require(2)?;
    let overlap = v1.amplitudes().inner(v2.amplitudes()).norm();
    if overlap > 1e-10 {
        return Err(EntanglementError::NotOrthogonal { overlap });
    }
    let grid = grid.max(4);
    let form = SubspaceForm::new(v1, v2);
    let d_theta = FRAC_PI_2 / grid as f64;
    let d_phi = 2.0 * PI / grid as f64;

    // Fixed scan order keeps ties deterministic: smallest θ, then smallest φ.
    let mut best_min = (f64::INFINITY, (0.0, 0.0));
    let mut best_max = (f64::NEG_INFINITY, (0.0, 0.0));
    for i in 0..=grid {
        let theta = i as f64 * d_theta;
        for j in 0..grid {
            let phi = j as f64 * d_phi;
            let t = form.tangle(theta, phi);
            if t < best_min.0 {
                best_min = (t, (theta, phi));
            }
            if t > best_max.0 {
                best_max = (t, (theta, phi));
            }
        }
    }

    let polish = |start: (f64, (f64, f64)), sign: f64| -> (f64, (f64, f64)) {
        let objective = |theta: f64, phi: f64| sign * form.tangle(theta, phi);
        let (mut theta, mut phi) = start.1;
        let mut value = sign * start.0;
        for _ in 0..3 {
            let lo = (theta - d_theta).max(0.0);
            let hi = (theta + d_theta).min(FRAC_PI_2);
            let (t, v) = golden_section_min(|x| objective(x, phi), lo, hi, 1e-8);
            if v < value {
                theta = t;
                value = v;
            }
            let (p, v) = golden_section_min(|x| objective(theta, x), phi - d_phi, phi + d_phi, 1e-8);
            if v < value {
                phi = p.rem_euclid(2.0 * PI);
                value = v;
            }
        }
        (sign * value, (theta, phi))
    };
    let (min, argmin) = polish(best_min, 1.0);
    let (max, argmax) = polish(best_max, -1.0);
    Ok(TangleRange {
        min: min.max(0.0),
        argmin,
        max,
        argmax,
    })
}
