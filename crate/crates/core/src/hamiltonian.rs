//! Hamiltonians as real-weighted sums of hermitian Pauli strings, plus the
//! two- and three-spin model families.
//!
//! Two-spin models act on `C² ⊗ C²` with `A = σz`, `B = σx`:
//!
//! ```text
//! H2 = ħω1·ZI + ħω2·IX + ε·ZX      (interaction A ⊗ B)
//! K2 = ħω1·ZI + ħω2·IX + ε·XZ      (interaction B ⊗ A)
//! ```
//!
//! Three-spin models add pair couplings γ and swap the triple interaction
//! `XYZ` for `ZYX`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{commutator, hs_inner, ComplexMatrix, LinalgError};
use crate::pauli::{string_to_matrix, PauliError, PauliString, Phase};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("term {index} acts on {found} qubits, expected {expected}")]
    MixedQubitCounts {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("coefficient of term {index} is not finite")]
    NonFiniteCoefficient { index: usize },
    #[error("term `{0}` has a non-unit phase; coefficients carry the sign")]
    NonUnitPhase(String),
    #[error("a Hamiltonian needs at least one term")]
    NoTerms,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("term list line {line}: {reason}")]
    TermSyntax { line: usize, reason: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `coefficient · string` with the string's phase fixed to +1.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    coefficient: f64,
    string: PauliString,
}

impl OperatorTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Result<Self, HamiltonianError> {
        if string.phase() != Phase::ONE {
            return Err(HamiltonianError::NonUnitPhase(string.to_string()));
        }
        if !coefficient.is_finite() {
            return Err(HamiltonianError::NonFiniteCoefficient { index: 0 });
        }
        Ok(Self { coefficient, string })
    }

    /// Shorthand for preset construction from a literal like `"ZX"`.
    fn literal(coefficient: f64, letters: &str) -> Self {
        Self {
            coefficient,
            string: letters.parse().expect("valid preset literal"),
        }
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn string(&self) -> &PauliString {
        &self.string
    }
}

impl fmt::Display for OperatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.string)
    }
}

/// A list of terms on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    qubit_count: usize,
    terms: Vec<OperatorTerm>,
}

impl HamiltonianSpec {
    pub fn new(terms: Vec<OperatorTerm>) -> Result<Self, HamiltonianError> {
        let qubit_count = terms.first().ok_or(HamiltonianError::NoTerms)?.string.qubit_count();
        for (index, term) in terms.iter().enumerate() {
            if term.string.qubit_count() != qubit_count {
                return Err(HamiltonianError::MixedQubitCounts {
                    index,
                    expected: qubit_count,
                    found: term.string.qubit_count(),
                });
            }
            if !term.coefficient.is_finite() {
                return Err(HamiltonianError::NonFiniteCoefficient { index });
            }
        }
        Ok(Self { qubit_count, terms })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    /// Parses the line-oriented `<coefficient> <pauli-string>` format.
    ///
    /// Blank lines and `#` comments are skipped.
    pub fn parse_terms(text: &str) -> Result<Self, HamiltonianError> {
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |reason: String| HamiltonianError::TermSyntax { line: i + 1, reason };
            let mut fields = line.split_whitespace();
            let (Some(coef), Some(string), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(syntax(format!("expected `<coefficient> <pauli-string>`, got `{line}`")));
            };
            let coefficient: f64 = coef.parse().map_err(|_| syntax(format!("bad coefficient `{coef}`")))?;
            if !coefficient.is_finite() {
                return Err(syntax(format!("coefficient `{coef}` is not finite")));
            }
            let string: PauliString = string.parse().map_err(|e: PauliError| syntax(e.to_string()))?;
            terms.push(OperatorTerm::new(coefficient, string).map_err(|e| syntax(e.to_string()))?);
        }
        let spec = Self::new(terms).map_err(|e| match e {
            HamiltonianError::NoTerms => HamiltonianError::TermSyntax {
                line: 0,
                reason: "no terms found".into(),
            },
            other => other,
        })?;
        Ok(spec)
    }
}

impl FromStr for HamiltonianSpec {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_terms(s)
    }
}

/// `Σ_t coefficient_t · matrix(string_t)`.
pub fn build_matrix(spec: &HamiltonianSpec) -> ComplexMatrix {
    let dim = spec.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for term in &spec.terms {
        if term.coefficient == 0.0 {
            continue;
        }
        let m = string_to_matrix(&term.string).scale_real(term.coefficient);
        out = &out + &m;
    }
    out
}

fn check_param(name: &'static str, value: f64) -> Result<(), HamiltonianError> {
    if !value.is_finite() {
        return Err(HamiltonianError::InvalidParameter {
            name,
            reason: format!("{value} is not finite"),
        });
    }
    Ok(())
}

fn check_eps_hbar(eps: f64, hbar: f64) -> Result<(), HamiltonianError> {
    check_param("eps", eps)?;
    check_param("hbar", hbar)?;
    if eps < 0.0 {
        return Err(HamiltonianError::InvalidParameter {
            name: "eps",
            reason: format!("coupling must be >= 0, got {eps}"),
        });
    }
    if hbar <= 0.0 {
        return Err(HamiltonianError::InvalidParameter {
            name: "hbar",
            reason: format!("must be > 0, got {hbar}"),
        });
    }
    Ok(())
}

/// Parameters of the two-spin models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinParams {
    pub omega1: f64,
    pub omega2: f64,
    pub eps: f64,
    pub hbar: f64,
}

impl TwoSpinParams {
    /// Parameters with `ħ = 1`.
    pub fn new(omega1: f64, omega2: f64, eps: f64) -> Self {
        Self {
            omega1,
            omega2,
            eps,
            hbar: 1.0,
        }
    }

    pub fn with_hbar(self, hbar: f64) -> Self {
        Self { hbar, ..self }
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        check_param("omega1", self.omega1)?;
        check_param("omega2", self.omega2)?;
        check_eps_hbar(self.eps, self.hbar)
    }
}

/// Parameters of the three-spin models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSpinParams {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
    pub eps: f64,
    pub hbar: f64,
}

impl TripleSpinParams {
    pub fn new(omega: [f64; 3], gamma: [f64; 3], eps: f64) -> Self {
        Self {
            omega1: omega[0],
            omega2: omega[1],
            omega3: omega[2],
            gamma12: gamma[0],
            gamma13: gamma[1],
            gamma23: gamma[2],
            eps,
            hbar: 1.0,
        }
    }

    pub fn with_hbar(self, hbar: f64) -> Self {
        Self { hbar, ..self }
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        check_param("omega1", self.omega1)?;
        check_param("omega2", self.omega2)?;
        check_param("omega3", self.omega3)?;
        check_param("gamma12", self.gamma12)?;
        check_param("gamma13", self.gamma13)?;
        check_param("gamma23", self.gamma23)?;
        check_eps_hbar(self.eps, self.hbar)
    }
}

fn two_spin(p: &TwoSpinParams, interaction: &str) -> Result<HamiltonianSpec, HamiltonianError> {
    p.validate()?;
    HamiltonianSpec::new(vec![
        OperatorTerm::literal(p.hbar * p.omega1, "ZI"),
        OperatorTerm::literal(p.hbar * p.omega2, "IX"),
        OperatorTerm::literal(p.eps, interaction),
    ])
}

fn triple_spin(p: &TripleSpinParams, interaction: &str) -> Result<HamiltonianSpec, HamiltonianError> {
    p.validate()?;
    HamiltonianSpec::new(vec![
        OperatorTerm::literal(p.hbar * p.omega1, "XII"),
        OperatorTerm::literal(p.hbar * p.omega2, "IYI"),
        OperatorTerm::literal(p.hbar * p.omega3, "IIZ"),
        OperatorTerm::literal(p.gamma12, "XYI"),
        OperatorTerm::literal(p.gamma13, "XIZ"),
        OperatorTerm::literal(p.gamma23, "IYZ"),
        OperatorTerm::literal(p.eps, interaction),
    ])
}

/// `ħω1·ZI + ħω2·IX + ε·ZX`.
pub fn preset_h2(p: &TwoSpinParams) -> Result<HamiltonianSpec, HamiltonianError> {
    two_spin(p, "ZX")
}

/// `ħω1·ZI + ħω2·IX + ε·XZ`.
pub fn preset_k2(p: &TwoSpinParams) -> Result<HamiltonianSpec, HamiltonianError> {
    two_spin(p, "XZ")
}

/// Single-spin, pair and `ε·XYZ` terms.
pub fn preset_h3(p: &TripleSpinParams) -> Result<HamiltonianSpec, HamiltonianError> {
    triple_spin(p, "XYZ")
}

/// As [`preset_h3`] with the triple interaction replaced by `ε·ZYX`.
pub fn preset_k3(p: &TripleSpinParams) -> Result<HamiltonianSpec, HamiltonianError> {
    triple_spin(p, "ZYX")
}

/// The four preset families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    H2,
    K2,
    H3,
    K3,
}

impl Family {
    pub fn qubit_count(self) -> usize {
        match self {
            Family::H2 | Family::K2 => 2,
            Family::H3 | Family::K3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::H2 => "H2",
            Family::K2 => "K2",
            Family::H3 => "H3",
            Family::K3 => "K3",
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "H2" => Ok(Family::H2),
            "K2" => Ok(Family::K2),
            "H3" => Ok(Family::H3),
            "K3" => Ok(Family::K3),
            _ => Err(format!("unknown model `{s}` (expected H2, K2, H3 or K3)")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A preset family with concrete parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    H2(TwoSpinParams),
    K2(TwoSpinParams),
    H3(TripleSpinParams),
    K3(TripleSpinParams),
}

/// A model parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    Eps,
    Omega1,
    Omega2,
    Omega3,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Eps => "eps",
            SweepParameter::Omega1 => "omega1",
            SweepParameter::Omega2 => "omega2",
            SweepParameter::Omega3 => "omega3",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eps" => Ok(SweepParameter::Eps),
            "omega1" => Ok(SweepParameter::Omega1),
            "omega2" => Ok(SweepParameter::Omega2),
            "omega3" => Ok(SweepParameter::Omega3),
            _ => Err(format!(
                "unknown sweep parameter `{s}` (expected eps, omega1, omega2 or omega3)"
            )),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Model {
    pub fn family(&self) -> Family {
        match self {
            Model::H2(_) => Family::H2,
            Model::K2(_) => Family::K2,
            Model::H3(_) => Family::H3,
            Model::K3(_) => Family::K3,
        }
    }

    pub fn spec(&self) -> Result<HamiltonianSpec, HamiltonianError> {
        match self {
            Model::H2(p) => preset_h2(p),
            Model::K2(p) => preset_k2(p),
            Model::H3(p) => preset_h3(p),
            Model::K3(p) => preset_k3(p),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix, HamiltonianError> {
        Ok(build_matrix(&self.spec()?))
    }

    pub fn parameter(&self, which: SweepParameter) -> Option<f64> {
        match (self, which) {
            (Model::H2(p) | Model::K2(p), SweepParameter::Eps) => Some(p.eps),
            (Model::H2(p) | Model::K2(p), SweepParameter::Omega1) => Some(p.omega1),
            (Model::H2(p) | Model::K2(p), SweepParameter::Omega2) => Some(p.omega2),
            (Model::H2(_) | Model::K2(_), SweepParameter::Omega3) => None,
            (Model::H3(p) | Model::K3(p), SweepParameter::Eps) => Some(p.eps),
            (Model::H3(p) | Model::K3(p), SweepParameter::Omega1) => Some(p.omega1),
            (Model::H3(p) | Model::K3(p), SweepParameter::Omega2) => Some(p.omega2),
            (Model::H3(p) | Model::K3(p), SweepParameter::Omega3) => Some(p.omega3),
        }
    }

    /// Copy of the model with one parameter replaced.
    pub fn with_parameter(&self, which: SweepParameter, value: f64) -> Result<Model, HamiltonianError> {
        let unsupported = || HamiltonianError::InvalidParameter {
            name: "param",
            reason: format!("{} has no parameter `{}`", self.family(), which),
        };
        let set2 = |mut p: TwoSpinParams| -> Result<TwoSpinParams, HamiltonianError> {
            match which {
                SweepParameter::Eps => p.eps = value,
                SweepParameter::Omega1 => p.omega1 = value,
                SweepParameter::Omega2 => p.omega2 = value,
                SweepParameter::Omega3 => return Err(unsupported()),
            }
            p.validate()?;
            Ok(p)
        };
        let set3 = |mut p: TripleSpinParams| -> Result<TripleSpinParams, HamiltonianError> {
            match which {
                SweepParameter::Eps => p.eps = value,
                SweepParameter::Omega1 => p.omega1 = value,
                SweepParameter::Omega2 => p.omega2 = value,
                SweepParameter::Omega3 => p.omega3 = value,
            }
            p.validate()?;
            Ok(p)
        };
        Ok(match *self {
            Model::H2(p) => Model::H2(set2(p)?),
            Model::K2(p) => Model::K2(set2(p)?),
            Model::H3(p) => Model::H3(set3(p)?),
            Model::K3(p) => Model::K3(set3(p)?),
        })
    }
}

/// Outcome of checking the standing assumptions `[A, B] ≠ 0` and `⟨A, B⟩ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    /// `‖[A, B]‖_max`.
    pub commutator_norm: f64,
    /// `⟨A, B⟩ = tr(A·B†)`.
    pub hs_inner: Complex64,
    pub noncommuting: bool,
    pub orthogonal: bool,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.noncommuting && self.orthogonal
    }

    /// Human-readable warnings for violated assumptions.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.noncommuting {
            out.push(format!("A and B commute (‖[A,B]‖ = {:e})", self.commutator_norm));
        }
        if !self.orthogonal {
            out.push(format!(
                "A and B are not Hilbert-Schmidt orthogonal (⟨A,B⟩ = {}{:+}i)",
                self.hs_inner.re, self.hs_inner.im
            ));
        }
        out
    }
}

/// Reports whether `a` and `b` are noncommuting and Hilbert–Schmidt orthogonal.
/// Violations are flagged, never refused.
pub fn validate_assumptions(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<AssumptionReport, HamiltonianError> {
    let comm = commutator(a, b)?;
    let inner = hs_inner(a, b)?;
    let commutator_norm = comm.max_abs();
    Ok(AssumptionReport {
        commutator_norm,
        hs_inner: inner,
        noncommuting: commutator_norm > 1e-12,
        orthogonal: inner.norm() <= 1e-12,
    })
}
