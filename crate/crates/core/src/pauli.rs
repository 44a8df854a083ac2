//! Pauli group elements: a quarter-turn phase times a tensor product of
//! single-qubit letters from {I, X, Y, Z}.
//!
//! Phases are kept as exact symbols so group arithmetic never drifts.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{kron_all, ComplexMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit-count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("a Pauli string needs at least one letter")]
    Empty,
    #[error("invalid Pauli string `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("closure needs at least one generator")]
    NoGenerators,
}

/// Phase `i^k` for `k ∈ {0, 1, 2, 3}`, i.e. one of 1, i, −1, −i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_quarter_turns(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn quarter_turns(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_quarter_turns(self.0 + rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    /// The 2×2 matrix of the letter.
    pub fn matrix(self) -> ComplexMatrix {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rows = match self {
            PauliLetter::I => [[one, o], [o, one]],
            PauliLetter::X => [[o, one], [one, o]],
            PauliLetter::Y => [[o, -i], [i, o]],
            PauliLetter::Z => [[one, o], [o, -one]],
        };
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()])
    }

    /// Single-qubit product `self · other = phase · letter`.
    pub fn times(self, other: PauliLetter) -> (Phase, PauliLetter) {
        use PauliLetter::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

/// An element of the `q`-qubit Pauli group.
///
/// Ordering is lexicographic by letters, then by phase (1, i, −1, −i).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    phase: Phase,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<PauliLetter>) -> Result<Self, PauliError> {
        if letters.is_empty() {
            return Err(PauliError::Empty);
        }
        Ok(Self { letters, phase })
    }

    /// Phase +1 string from letters.
    pub fn from_letters(letters: Vec<PauliLetter>) -> Result<Self, PauliError> {
        Self::new(Phase::ONE, letters)
    }

    pub fn identity(qubits: usize) -> Self {
        assert!(qubits > 0, "identity needs at least one qubit");
        Self {
            letters: vec![PauliLetter::I; qubits],
            phase: Phase::ONE,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn qubit_count(&self) -> usize {
        self.letters.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        Self {
            letters: self.letters.clone(),
            phase,
        }
    }

    fn check_same_width(&self, other: &Self) -> Result<(), PauliError> {
        if self.qubit_count() != other.qubit_count() {
            return Err(PauliError::QubitMismatch {
                left: self.qubit_count(),
                right: other.qubit_count(),
            });
        }
        Ok(())
    }
}

/// `phase · σ_{l1} ⊗ … ⊗ σ_{lq}` as a dense `2^q` matrix.
pub fn string_to_matrix(s: &PauliString) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = s.letters.iter().map(|l| l.matrix()).collect();
    let m = kron_all(&factors).expect("Pauli strings are nonempty");
    if s.phase == Phase::ONE {
        m
    } else {
        m.scale(s.phase.to_complex())
    }
}

/// Group product `a · b`.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString, PauliError> {
    a.check_same_width(b)?;
    let mut phase = a.phase * b.phase;
    let letters = a
        .letters
        .iter()
        .zip(&b.letters)
        .map(|(&x, &y)| {
            let (p, l) = x.times(y);
            phase = phase * p;
            l
        })
        .collect();
    Ok(PauliString { letters, phase })
}

/// Whether `a` and `b` commute: the number of positions holding two
/// different non-identity letters is even.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool, PauliError> {
    a.check_same_width(b)?;
    let clashes = a
        .letters
        .iter()
        .zip(&b.letters)
        .filter(|(&x, &y)| x != PauliLetter::I && y != PauliLetter::I && x != y)
        .count();
    Ok(clashes % 2 == 0)
}

/// The group generated by `generators`, sorted canonically.
pub fn closure(generators: &[PauliString]) -> Result<Vec<PauliString>, PauliError> {
    let first = generators.first().ok_or(PauliError::NoGenerators)?;
    for g in generators {
        first.check_same_width(g)?;
    }
    let mut group: BTreeSet<PauliString> = BTreeSet::new();
    group.insert(PauliString::identity(first.qubit_count()));
    let mut frontier: Vec<PauliString> = group.iter().cloned().collect();
    // Right-multiplying by generators until nothing new appears reaches every
    // word in the generators; the group is finite so this terminates.
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for element in &frontier {
            for g in generators {
                let product = multiply(element, g)?;
                if group.insert(product.clone()) {
                    next.push(product);
                }
            }
        }
        frontier = next;
    }
    Ok(group.into_iter().collect())
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.0 {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `[+|-][i]LETTERS`, letters case-insensitive.
    ///
    /// A bare leading `i` is a phase only when written lowercase and followed
    /// by an uppercase letter (`iZX`); otherwise it is the identity letter, so
    /// `IX`, `ix` and `iix` all start with an identity factor. `+i`/`-i` are
    /// always phases.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PauliError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        if input.is_empty() {
            return Err(err("empty string"));
        }
        if input.chars().any(char::is_whitespace) {
            return Err(err("whitespace inside a Pauli string"));
        }
        let mut rest = input;
        let mut phase = Phase::ONE;
        let mut signed = false;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            signed = true;
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            signed = true;
            phase = Phase::MINUS_ONE;
        }
        let mut chars = rest.chars();
        let imaginary = match (chars.next(), chars.next()) {
            (Some('i'), Some(next)) => signed || next.is_ascii_uppercase(),
            (Some('i'), None) => signed,
            _ => false,
        };
        if imaginary {
            rest = &rest[1..];
            phase = phase * Phase::I;
        }
        if rest.is_empty() {
            return Err(err("no Pauli letters"));
        }
        let letters = rest
            .chars()
            .map(|c| PauliLetter::from_char(c).ok_or_else(|| err(&format!("unknown letter `{c}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        PauliString::new(phase, letters)
    }
}
