//! Closed-form spectra, parameter sweeps with continuity-tracked levels,
//! crossing classification and partition functions.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::entanglement::golden_section_min;
use crate::hamiltonian::{HamiltonianError, Model, SweepParameter, TripleSpinParams, TwoSpinParams};
use crate::linalg::{eigh, LinalgError, Spectrum};

/// Relative tolerance for an exact crossing; scaled by `max(spectral diameter, 1)`.
pub const DEFAULT_EXACT_TOL: f64 = 1e-9;

/// Parameter resolution of crossing refinement.
pub const REFINE_RESOLUTION: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("invalid sweep range [{lo}, {hi}]: need finite lo < hi")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("a sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("inverse temperature must be > 0, got {0}")]
    NonPositiveTemperature(f64),
    #[error("eigensolver failed at {parameter} = {value}: {source}")]
    Eigen {
        parameter: &'static str,
        value: f64,
        source: LinalgError,
    },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// Labelled closed-form eigenvalues, in the labels' order (not sorted).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormSpectrum {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl ClosedFormSpectrum {
    fn new(labels: &[&str], values: Vec<f64>) -> Self {
        Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            values,
        }
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// One eigenvalue `α·λ_j + β·μ_k + ε·λ_j·μ_k` with its eigenvector `u_j ⊗ v_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductEigenvalue {
    pub value: f64,
    pub j: usize,
    pub k: usize,
}

/// Spectrum of `α·A⊗I + β·I⊗B + ε·A⊗B` from the spectra of `A` and `B`.
pub fn closed_form_product_model(
    alpha: f64,
    beta: f64,
    eps: f64,
    spec_a: &Spectrum,
    spec_b: &Spectrum,
) -> Vec<ProductEigenvalue> {
    let mut out = Vec::with_capacity(spec_a.dim * spec_b.dim);
    for (j, &lambda) in spec_a.eigenvalues.iter().enumerate() {
        for (k, &mu) in spec_b.eigenvalues.iter().enumerate() {
            out.push(ProductEigenvalue {
                value: alpha * lambda + beta * mu + eps * lambda * mu,
                j,
                k,
            });
        }
    }
    out
}

/// `E1..E4` of the `A ⊗ B` two-spin model.
pub fn closed_form_h2(p: &TwoSpinParams) -> ClosedFormSpectrum {
    let (a, b, e) = (p.hbar * p.omega1, p.hbar * p.omega2, p.eps);
    ClosedFormSpectrum::new(
        &["E1", "E2", "E3", "E4"],
        vec![a + b + e, a - b - e, -a + b - e, -a - b + e],
    )
}

/// `k1..k4` of the `B ⊗ A` two-spin model.
pub fn closed_form_k2(p: &TwoSpinParams) -> ClosedFormSpectrum {
    let e2 = p.eps * p.eps;
    let outer = (p.hbar.powi(2) * (p.omega1 + p.omega2).powi(2) + e2).sqrt();
    let inner = (p.hbar.powi(2) * (p.omega1 - p.omega2).powi(2) + e2).sqrt();
    ClosedFormSpectrum::new(&["k1", "k2", "k3", "k4"], vec![-outer, outer, -inner, inner])
}

/// An eigenvalue of the commuting three-spin model, labelled by the
/// eigenvalues `(s1, s2, s3)` of `σx`, `σy`, `σz` on the three sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLevel {
    pub value: f64,
    pub signs: [i8; 3],
}

/// All seven terms of the `XYZ` three-spin model commute, so each
/// eigenvalue is the sign-weighted sum of the coefficients.
pub fn closed_form_h3(p: &TripleSpinParams) -> Vec<SignedLevel> {
    let mut out = Vec::with_capacity(8);
    for s1 in [1i8, -1] {
        for s2 in [1i8, -1] {
            for s3 in [1i8, -1] {
                let (a, b, c) = (f64::from(s1), f64::from(s2), f64::from(s3));
                let value = p.hbar * (p.omega1 * a + p.omega2 * b + p.omega3 * c)
                    + p.gamma12 * a * b
                    + p.gamma13 * a * c
                    + p.gamma23 * b * c
                    + p.eps * a * b * c;
                out.push(SignedLevel {
                    value,
                    signs: [s1, s2, s3],
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Exact,
    Avoided,
}

impl CrossingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CrossingKind::Exact => "exact",
            CrossingKind::Avoided => "avoided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub parameter_value: f64,
    pub track_a: usize,
    pub track_b: usize,
    pub energy: f64,
    pub kind: CrossingKind,
    pub gap_at_minimum: f64,
}

/// A track pair that stays degenerate over consecutive grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateInterval {
    pub track_a: usize,
    pub track_b: usize,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CrossingReport {
    pub events: Vec<CrossingEvent>,
    pub degenerate_intervals: Vec<DegenerateInterval>,
}

impl CrossingReport {
    pub fn exact(&self) -> impl Iterator<Item = &CrossingEvent> {
        self.events.iter().filter(|e| e.kind == CrossingKind::Exact)
    }

    pub fn avoided(&self) -> impl Iterator<Item = &CrossingEvent> {
        self.events.iter().filter(|e| e.kind == CrossingKind::Avoided)
    }
}

/// Smallest grid gap of one track pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairGap {
    pub track_a: usize,
    pub track_b: usize,
    pub gap: f64,
    pub location: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub model: Model,
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    /// `tracks[t][i]`: level `t` at grid point `i`.
    pub tracks: Vec<Vec<f64>>,
    /// `ranks[i][t]`: position of track `t` in the sorted spectrum at point `i`.
    pub ranks: Vec<Vec<usize>>,
    pub min_gaps: Vec<PairGap>,
    pub crossings: Vec<CrossingEvent>,
    pub degenerate_intervals: Vec<DegenerateInterval>,
}

impl SweepResult {
    pub fn track_count(&self) -> usize {
        self.tracks.len()
    }

    /// Sorted eigenvalues at grid point `i`.
    pub fn levels_at(&self, i: usize) -> Vec<f64> {
        let mut levels = vec![0.0; self.tracks.len()];
        for (t, &r) in self.ranks[i].iter().enumerate() {
            levels[r] = self.tracks[t][i];
        }
        levels
    }

    /// Smallest gap over all track pairs.
    pub fn min_pairwise_gap(&self) -> Option<PairGap> {
        self.min_gaps.iter().copied().min_by(|a, b| a.gap.total_cmp(&b.gap))
    }

    pub fn pair_gap(&self, a: usize, b: usize) -> Option<PairGap> {
        let (a, b) = (a.min(b), a.max(b));
        self.min_gaps.iter().copied().find(|g| g.track_a == a && g.track_b == b)
    }
}

fn spectrum_at(model: &Model, parameter: SweepParameter, value: f64) -> Result<Spectrum, SpectraError> {
    let m = model.with_parameter(parameter, value)?.matrix()?;
    eigh(&m).map_err(|source| SpectraError::Eigen {
        parameter: parameter.name(),
        value,
        source,
    })
}

fn eigenvalues_at(model: &Model, parameter: SweepParameter, value: f64) -> Result<Vec<f64>, SpectraError> {
    spectrum_at(model, parameter, value).map(|s| s.eigenvalues)
}

/// Evenly spaced grid with both endpoints exact.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * (i as f64) / last
            }
        })
        .collect()
}

/// Minimum-cost assignment of tracks to levels by dynamic programming over
/// subsets; exact for any dimension this crate handles. Ties keep the
/// lowest level index.
fn assign(predicted: &[f64], levels: &[f64]) -> Vec<usize> {
    let n = predicted.len();
    let full = 1usize << n;
    let mut cost = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    cost[0] = 0.0;
    for mask in 0..full {
        if !cost[mask].is_finite() {
            continue;
        }
        let track = mask.count_ones() as usize;
        if track == n {
            continue;
        }
        for (level, &value) in levels.iter().enumerate() {
            if mask & (1 << level) != 0 {
                continue;
            }
            let next = mask | (1 << level);
            let c = cost[mask] + (predicted[track] - value).abs();
            if c < cost[next] {
                cost[next] = c;
                choice[next] = level;
            }
        }
    }
    let mut out = vec![0; n];
    let mut mask = full - 1;
    for track in (0..n).rev() {
        let level = choice[mask];
        out[track] = level;
        mask &= !(1 << level);
    }
    out
}

/// Diagonalizes `model` across `parameter ∈ [lo, hi]` on `steps` points,
/// follows each level by continuity and classifies crossings with the
/// default tolerance and refinement.
pub fn sweep(
    model: &Model,
    parameter: SweepParameter,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<SweepResult, SpectraError> {
    sweep_with(model, parameter, lo, hi, steps, DEFAULT_EXACT_TOL, true)
}

/// [`sweep`] with explicit crossing tolerance and refinement switch.
pub fn sweep_with(
    model: &Model,
    parameter: SweepParameter,
    lo: f64,
    hi: f64,
    steps: usize,
    exact_tol: f64,
    refine: bool,
) -> Result<SweepResult, SpectraError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SpectraError::InvalidRange { lo, hi });
    }
    if steps < 2 {
        return Err(SpectraError::TooFewSteps(steps));
    }
    // fail early on an unsupported parameter or invalid endpoint
    model.with_parameter(parameter, lo)?;
    model.with_parameter(parameter, hi)?;

    let grid = linear_grid(lo, hi, steps);
    let spectra: Vec<Result<Vec<f64>, SpectraError>> =
        grid.par_iter().map(|&x| eigenvalues_at(model, parameter, x)).collect();
    let levels: Vec<Vec<f64>> = spectra.into_iter().collect::<Result<_, _>>()?;

    let n = levels[0].len();
    let mut tracks = vec![vec![0.0; steps]; n];
    let mut ranks = vec![vec![0; n]; steps];
    for t in 0..n {
        tracks[t][0] = levels[0][t];
        ranks[0][t] = t;
    }
    for i in 1..steps {
        // Linear extrapolation from the previous two points lets tracks pass
        // through transversal crossings instead of bouncing off them.
        let predicted: Vec<f64> = (0..n)
            .map(|t| {
                if i >= 2 {
                    2.0 * tracks[t][i - 1] - tracks[t][i - 2]
                } else {
                    tracks[t][i - 1]
                }
            })
            .collect();
        let assignment = assign(&predicted, &levels[i]);
        for (t, &r) in assignment.iter().enumerate() {
            tracks[t][i] = levels[i][r];
            ranks[i][t] = r;
        }
    }

    let mut min_gaps = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let (gap, location) = (0..steps)
                .map(|i| ((tracks[a][i] - tracks[b][i]).abs(), grid[i]))
                .fold((f64::INFINITY, lo), |best, cur| if cur.0 < best.0 { cur } else { best });
            min_gaps.push(PairGap {
                track_a: a,
                track_b: b,
                gap,
                location,
            });
        }
    }

    let mut result = SweepResult {
        model: *model,
        parameter,
        grid,
        tracks,
        ranks,
        min_gaps,
        crossings: Vec::new(),
        degenerate_intervals: Vec::new(),
    };
    let report = detect_crossings(&result, exact_tol, refine)?;
    result.crossings = report.events;
    result.degenerate_intervals = report.degenerate_intervals;
    Ok(result)
}

fn diameter(levels: &[f64]) -> f64 {
    levels.last().copied().unwrap_or(0.0) - levels.first().copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy)]
enum Candidate {
    /// Isolated near-zero gap at a grid point.
    Zero(usize),
    /// Gap changes sign between `i` and `i + 1`.
    SignChange(usize),
    /// Strict dip of `|gap|` over grid points `from..=to`.
    Valley(usize, usize),
}

/// Locates crossings of every track pair and classifies them.
///
/// Isolated near-zero gaps, sign changes and interior dips of `|gap|` between
/// spectrally adjacent tracks are candidates. With `refine`, each candidate is
/// polished by golden-section minimization of the adjacent-level gap, followed
/// by eigenvector-continuity bisection when the pair swaps order. A candidate
/// is exact when its gap is at most `exact_tol·max(diameter, 1)`.
pub fn detect_crossings(s: &SweepResult, exact_tol: f64, refine: bool) -> Result<CrossingReport, SpectraError> {
    let steps = s.grid.len();
    let n = s.track_count();
    let level_sets: Vec<Vec<f64>> = (0..steps).map(|i| s.levels_at(i)).collect();
    let tol_at = |i: usize| exact_tol * diameter(&level_sets[i]).max(1.0);
    let noise_at = |i: usize| 1e-12 * diameter(&level_sets[i]).max(1.0);

    let mut report = CrossingReport::default();
    for a in 0..n {
        for b in (a + 1)..n {
            let d: Vec<f64> = (0..steps).map(|i| s.tracks[a][i] - s.tracks[b][i]).collect();
            let near_zero: Vec<bool> = (0..steps).map(|i| d[i].abs() <= tol_at(i)).collect();

            let mut candidates = Vec::new();
            let mut i = 0;
            while i < steps {
                if near_zero[i] {
                    let start = i;
                    while i + 1 < steps && near_zero[i + 1] {
                        i += 1;
                    }
                    if i > start {
                        report.degenerate_intervals.push(DegenerateInterval {
                            track_a: a,
                            track_b: b,
                            from: s.grid[start],
                            to: s.grid[i],
                        });
                    } else {
                        candidates.push(Candidate::Zero(start));
                    }
                }
                i += 1;
            }
            for i in 0..steps - 1 {
                if !near_zero[i] && !near_zero[i + 1] && d[i] * d[i + 1] < 0.0 {
                    candidates.push(Candidate::SignChange(i));
                }
            }
            let mut i = 1;
            while i + 1 < steps {
                let noise = noise_at(i);
                if !near_zero[i] && d[i - 1].abs() > d[i].abs() + noise {
                    let mut j = i;
                    while j + 1 < steps && (d[j + 1].abs() - d[i].abs()).abs() <= noise {
                        j += 1;
                    }
                    let rises = j + 1 < steps && d[j + 1].abs() > d[i].abs() + noise;
                    let same_sign = (i - 1..=j + 1).all(|k| d[k].signum() == d[i].signum() && !near_zero[k]);
                    let adjacent = s.ranks[i][a].abs_diff(s.ranks[i][b]) == 1;
                    if rises && same_sign && adjacent {
                        candidates.push(Candidate::Valley(i, j));
                    }
                    i = j + 1;
                } else {
                    i += 1;
                }
            }

            for candidate in candidates {
                report.events.push(resolve_candidate(
                    s,
                    &level_sets,
                    a,
                    b,
                    &d,
                    candidate,
                    exact_tol,
                    refine,
                )?);
            }
        }
    }
    report.events.sort_by(|x, y| {
        x.parameter_value
            .total_cmp(&y.parameter_value)
            .then(x.track_a.cmp(&y.track_a))
            .then(x.track_b.cmp(&y.track_b))
    });
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn resolve_candidate(
    s: &SweepResult,
    level_sets: &[Vec<f64>],
    a: usize,
    b: usize,
    d: &[f64],
    candidate: Candidate,
    exact_tol: f64,
    refine: bool,
) -> Result<CrossingEvent, SpectraError> {
    let last = s.grid.len() - 1;
    let (left, right) = match candidate {
        Candidate::Zero(i) => (i.saturating_sub(1), (i + 1).min(last)),
        Candidate::SignChange(i) => (i, i + 1),
        Candidate::Valley(i, j) => (i - 1, j + 1),
    };
    let swaps = d[left] * d[right] < 0.0;

    // Sorted ranks the pair occupies anywhere in the bracket.
    let ranks = (left..=right).flat_map(|i| [s.ranks[i][a], s.ranks[i][b]]);
    let r_lo = ranks.clone().min().expect("nonempty");
    let r_hi = ranks.max().expect("nonempty");
    let adjacent_gap = |levels: &[f64]| -> (f64, f64) {
        (r_lo..r_hi)
            .map(|r| (levels[r + 1] - levels[r], 0.5 * (levels[r + 1] + levels[r])))
            .fold(
                (f64::INFINITY, 0.0),
                |best, cur| if cur.0 < best.0 { cur } else { best },
            )
    };

    let (x_star, gap, energy, scale) = if refine {
        let eval = |x: f64| -> Result<(f64, f64, f64), SpectraError> {
            let levels = eigenvalues_at(&s.model, s.parameter, x)?;
            let (g, e) = adjacent_gap(&levels);
            Ok((g, e, diameter(&levels)))
        };
        // Golden-section needs an infallible objective; failures surface on re-evaluation.
        let objective = |x: f64| eval(x).map(|r| r.0).unwrap_or(f64::INFINITY);
        let (x_golden, _) = golden_section_min(objective, s.grid[left], s.grid[right], REFINE_RESOLUTION);
        let mut best_x = x_golden;
        let mut best = eval(x_golden)?;
        if swaps {
            let x_bisect = bisect_swap(s, a, left, right, r_lo, r_hi)?;
            let at = eval(x_bisect)?;
            if at.0 < best.0 {
                best_x = x_bisect;
                best = at;
            }
        }
        (best_x, best.0, best.1, best.2)
    } else {
        match candidate {
            Candidate::SignChange(i) => {
                // linear interpolation of the zero
                let t = d[i] / (d[i] - d[i + 1]);
                let x = s.grid[i] + t * (s.grid[i + 1] - s.grid[i]);
                let e = s.tracks[a][i] + t * (s.tracks[a][i + 1] - s.tracks[a][i]);
                (x, 0.0, e, diameter(&level_sets[i]))
            }
            Candidate::Zero(i) | Candidate::Valley(i, _) => {
                let (g, e) = adjacent_gap(&level_sets[i]);
                (s.grid[i], g, e, diameter(&level_sets[i]))
            }
        }
    };

    let kind = if gap <= exact_tol * scale.max(1.0) {
        CrossingKind::Exact
    } else {
        CrossingKind::Avoided
    };
    Ok(CrossingEvent {
        parameter_value: x_star,
        track_a: a,
        track_b: b,
        energy,
        kind,
        gap_at_minimum: gap,
    })
}

/// Bisects the point where track `a` leaves the sorted position it held at
/// `grid[left]`, judged by eigenvector overlap with its eigenvector there.
fn bisect_swap(
    s: &SweepResult,
    a: usize,
    left: usize,
    right: usize,
    r_lo: usize,
    r_hi: usize,
) -> Result<f64, SpectraError> {
    let reference = spectrum_at(&s.model, s.parameter, s.grid[left])?;
    let start_rank = s.ranks[left][a];
    let v_a = &reference.eigenvectors[start_rank];
    let on_left_side = |x: f64| -> Result<bool, SpectraError> {
        let spectrum = spectrum_at(&s.model, s.parameter, x)?;
        let best = (r_lo..=r_hi)
            .map(|r| (r, v_a.inner(&spectrum.eigenvectors[r]).norm()))
            .fold((start_rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        Ok(best.0 == start_rank)
    };
    let (mut lo, mut hi) = (s.grid[left], s.grid[right]);
    while hi - lo > REFINE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if on_left_side(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionResult {
    pub inverse_temperature: f64,
    pub value: f64,
}

/// `Σ_k exp(−β·λ_k)`, evaluated as `exp(−β·λ_min)·Σ_k exp(−β·(λ_k − λ_min))`.
pub fn partition_function(spec: &Spectrum, inverse_temperature: f64) -> Result<PartitionResult, SpectraError> {
    partition_from_eigenvalues(&spec.eigenvalues, inverse_temperature)
}

pub fn partition_from_eigenvalues(
    eigenvalues: &[f64],
    inverse_temperature: f64,
) -> Result<PartitionResult, SpectraError> {
    if !(inverse_temperature > 0.0 && inverse_temperature.is_finite()) {
        return Err(SpectraError::NonPositiveTemperature(inverse_temperature));
    }
    let ground = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: f64 = eigenvalues
        .iter()
        .map(|&e| (-inverse_temperature * (e - ground)).exp())
        .sum();
    Ok(PartitionResult {
        inverse_temperature,
        value: (-inverse_temperature * ground).exp() * shifted,
    })
}
