//! Command execution.

use std::fmt::Write as _;
use std::fs;

use num_complex::Complex64;
use serde_json::{Map, Value};

use super::config::{Command, Format, ModelSource, RunConfig};
use super::output::{emit, fmt_num, json_complex, json_complexes, json_num, json_nums, object, to_json_text};
use super::verify::{verify_paper, Fault, VerifyOptions};
use super::{CliError, DEFAULT_SEED, EXIT_VERIFY_FAILED, SEED_ENV};
use crate::entanglement::{
    eigenvector_tangles, natural_tangle, schmidt_coefficients, subspace_tangle_range, EntanglementError, Measure,
    PureState, TangleReport, PRODUCT_TOL,
};
use crate::hamiltonian::{build_matrix, HamiltonianError, HamiltonianSpec};
use crate::linalg::{eigh, ComplexMatrix, ComplexVector, LinalgError, Spectrum};
use crate::spectra::{partition_function, sweep_with, SpectraError, SweepResult};

impl From<HamiltonianError> for CliError {
    fn from(e: HamiltonianError) -> Self {
        match e {
            HamiltonianError::Linalg(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Eigen { .. } => CliError::Numeric(e.to_string()),
            SpectraError::Hamiltonian(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<crate::pauli::PauliError> for CliError {
    fn from(e: crate::pauli::PauliError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EntanglementError> for CliError {
    fn from(e: EntanglementError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Runs a validated configuration, writing its artifact; returns the exit code.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    let (text, code) = match config.command {
        Command::Build => (build(config)?, 0),
        Command::Spectrum => (spectrum(config)?, 0),
        Command::Sweep => (sweep_command(config)?, 0),
        Command::Partition => (partition(config)?, 0),
        Command::Entangle => (entangle(config)?, 0),
        Command::VerifyPaper => {
            let options = VerifyOptions {
                hbar: config.hbar(),
                seed: seed_from_env()?,
                fault: config.fault_k02.map(Fault::PerturbKTilde02),
            };
            let report = verify_paper(&options)?;
            let text = match config.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            (text, if report.passed() { 0 } else { EXIT_VERIFY_FAILED })
        }
    };
    emit(config.out.as_deref(), &text)?;
    Ok(code)
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse::<u64>().map_err(|_| {
            CliError::Usage(format!(
                "invalid value `{v}` for {SEED_ENV}: expected an unsigned integer"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn model_label(config: &RunConfig) -> String {
    match &config.model {
        Some(ModelSource::Preset(f)) => f.name().to_string(),
        Some(ModelSource::Terms(path)) => format!("terms:{}", path.display()),
        None => String::new(),
    }
}

fn model_spec(config: &RunConfig) -> Result<HamiltonianSpec, CliError> {
    match &config.model {
        Some(ModelSource::Preset(_)) => Ok(config.preset_model().expect("preset").spec()?),
        Some(ModelSource::Terms(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read terms {}: {e}", path.display())))?;
            Ok(HamiltonianSpec::parse_terms(&text)?)
        }
        None => Err(CliError::Usage("missing model: pass --model or --terms".into())),
    }
}

fn json_matrix(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| json_complexes(m.row(i))).collect())
}

fn json_parameters(config: &RunConfig) -> Value {
    let mut map = Map::new();
    if matches!(config.model, Some(ModelSource::Preset(_))) {
        for (k, &v) in &config.parameters {
            map.insert(k.clone(), json_num(v));
        }
    }
    Value::Object(map)
}

fn build(config: &RunConfig) -> Result<String, CliError> {
    let spec = model_spec(config)?;
    let m = build_matrix(&spec);
    Ok(match config.format {
        Format::Csv => {
            let mut out = String::from("row,col,re,im\n");
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let z = m[(i, j)];
                    writeln!(out, "{i},{j},{},{}", fmt_num(z.re), fmt_num(z.im)).unwrap();
                }
            }
            out
        }
        Format::Json => to_json_text(&object([
            ("model", model_label(config).into()),
            ("parameters", json_parameters(config)),
            ("dim", m.rows().into()),
            (
                "terms",
                spec.terms().iter().map(|t| Value::String(t.to_string())).collect(),
            ),
            ("matrix", json_matrix(&m)),
        ])),
    })
}

fn spectrum(config: &RunConfig) -> Result<String, CliError> {
    let spec = model_spec(config)?;
    let m = build_matrix(&spec);
    let s = eigh(&m)?;
    let tangles = eigenvector_tangles(&s);
    Ok(match config.format {
        Format::Csv => {
            let mut out = format!(
                "# model={} dim={} max_residual={}\nindex,eigenvalue,residual,tangle,measure,degenerate_basis\n",
                model_label(config),
                s.dim,
                fmt_num(s.max_residual)
            );
            for k in 0..s.dim {
                let (t, measure, flag) = match &tangles {
                    Some(ts) => (
                        fmt_num(ts[k].value),
                        measure_name(ts[k].measure),
                        ts[k].degenerate_basis_flag.to_string(),
                    ),
                    None => (String::new(), "", s.is_degenerate(k, 1e-9).to_string()),
                };
                writeln!(
                    out,
                    "{k},{},{},{t},{measure},{flag}",
                    fmt_num(s.eigenvalues[k]),
                    fmt_num(s.residuals[k])
                )
                .unwrap();
            }
            out
        }
        Format::Json => to_json_text(&spectrum_json(config, &m, &s, tangles.as_deref())),
    })
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::Tangle => "tangle",
        Measure::ThreeTangle => "three_tangle",
    }
}

fn spectrum_json(config: &RunConfig, m: &ComplexMatrix, s: &Spectrum, tangles: Option<&[TangleReport]>) -> Value {
    let tangles = match tangles {
        Some(ts) => Value::Array(
            ts.iter()
                .map(|t| {
                    object([
                        ("value", json_num(t.value)),
                        ("measure", measure_name(t.measure).into()),
                        ("degenerate_basis_flag", t.degenerate_basis_flag.into()),
                    ])
                })
                .collect(),
        ),
        None => Value::Null,
    };
    object([
        ("model", model_label(config).into()),
        ("parameters", json_parameters(config)),
        ("dim", s.dim.into()),
        ("matrix", json_matrix(m)),
        ("eigenvalues", json_nums(&s.eigenvalues)),
        ("residuals", json_nums(&s.residuals)),
        ("max_residual", json_num(s.max_residual)),
        ("residual_bound", json_num(Spectrum::residual_bound(m))),
        (
            "eigenvectors",
            s.eigenvectors.iter().map(|v| json_complexes(v.as_slice())).collect(),
        ),
        ("tangles", tangles),
    ])
}

fn sweep_command(config: &RunConfig) -> Result<String, CliError> {
    let settings = config.sweep.expect("validated sweep settings");
    let model = config.preset_model().expect("validated preset");
    let result = sweep_with(
        &model,
        settings.parameter,
        settings.lo,
        settings.hi,
        settings.steps,
        config.exact_tol,
        true,
    )?;
    Ok(match config.format {
        Format::Csv => sweep_csv(&result),
        Format::Json => to_json_text(&sweep_json(config, &result)),
    })
}

/// Header `param,track_0,...`, one row per grid point, then crossing and
/// degenerate-interval comment lines.
pub fn sweep_csv(result: &SweepResult) -> String {
    let n = result.track_count();
    let mut out = String::from("param");
    for t in 0..n {
        write!(out, ",track_{t}").unwrap();
    }
    out.push('\n');
    for (i, &x) in result.grid.iter().enumerate() {
        out.push_str(&fmt_num(x));
        for track in &result.tracks {
            write!(out, ",{}", fmt_num(track[i])).unwrap();
        }
        out.push('\n');
    }
    for e in &result.crossings {
        writeln!(
            out,
            "# crossing: kind={} param={} tracks={},{} energy={} gap={}",
            e.kind.as_str(),
            fmt_num(e.parameter_value),
            e.track_a,
            e.track_b,
            fmt_num(e.energy),
            fmt_num(e.gap_at_minimum)
        )
        .unwrap();
    }
    for d in &result.degenerate_intervals {
        writeln!(
            out,
            "# degenerate: from={} to={} tracks={},{}",
            fmt_num(d.from),
            fmt_num(d.to),
            d.track_a,
            d.track_b
        )
        .unwrap();
    }
    out
}

fn sweep_json(config: &RunConfig, result: &SweepResult) -> Value {
    let crossings = result.crossings.iter().map(|e| {
        object([
            ("kind", e.kind.as_str().into()),
            ("param", json_num(e.parameter_value)),
            ("track_a", e.track_a.into()),
            ("track_b", e.track_b.into()),
            ("energy", json_num(e.energy)),
            ("gap", json_num(e.gap_at_minimum)),
        ])
    });
    let intervals = result.degenerate_intervals.iter().map(|d| {
        object([
            ("from", json_num(d.from)),
            ("to", json_num(d.to)),
            ("track_a", d.track_a.into()),
            ("track_b", d.track_b.into()),
        ])
    });
    let gaps = result.min_gaps.iter().map(|g| {
        object([
            ("track_a", g.track_a.into()),
            ("track_b", g.track_b.into()),
            ("gap", json_num(g.gap)),
            ("location", json_num(g.location)),
        ])
    });
    object([
        ("model", model_label(config).into()),
        ("parameters", json_parameters(config)),
        ("parameter", result.parameter.name().into()),
        ("exact_tol", json_num(config.exact_tol)),
        ("grid", json_nums(&result.grid)),
        ("tracks", result.tracks.iter().map(|t| json_nums(t)).collect()),
        ("crossings", crossings.collect()),
        ("degenerate_intervals", intervals.collect()),
        ("min_gaps", gaps.collect()),
    ])
}

fn partition(config: &RunConfig) -> Result<String, CliError> {
    let beta = config.inverse_temperature.expect("validated inverse temperature");
    let s = eigh(&build_matrix(&model_spec(config)?))?;
    let z = partition_function(&s, beta)?;
    Ok(match config.format {
        Format::Csv => format!(
            "inverse_temperature,partition_function\n{},{}\n",
            fmt_num(z.inverse_temperature),
            fmt_num(z.value)
        ),
        Format::Json => to_json_text(&object([
            ("model", model_label(config).into()),
            ("parameters", json_parameters(config)),
            ("inverse_temperature", json_num(z.inverse_temperature)),
            ("partition_function", json_num(z.value)),
        ])),
    })
}

/// Reads a JSON amplitude list inline or from a file. Entries are real
/// numbers or `[re, im]` pairs.
pub fn parse_state(source: &str) -> Result<ComplexVector, CliError> {
    let text = if source.trim_start().starts_with('[') {
        source.to_string()
    } else {
        fs::read_to_string(source).map_err(|e| CliError::Usage(format!("cannot read state {source}: {e}")))?
    };
    let bad = |why: &str| CliError::Usage(format!("invalid state: {why}"));
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let items = value.as_array().ok_or_else(|| bad("expected a JSON list"))?;
    let amplitudes = items
        .iter()
        .map(|item| match item {
            Value::Number(n) => n.as_f64().map(|re| Complex64::new(re, 0.0)),
            Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(re), Some(im)) => Some(Complex64::new(re, im)),
                _ => None,
            },
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("entries must be numbers or [re, im] pairs"))?;
    if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(bad("amplitudes must be finite"));
    }
    Ok(ComplexVector::new(amplitudes))
}

fn load_state(source: &str) -> Result<PureState, CliError> {
    let v = parse_state(source)?;
    if v.norm() == 0.0 {
        return Err(CliError::Usage("invalid state: zero vector".into()));
    }
    Ok(PureState::normalized(v)?)
}

fn entangle(config: &RunConfig) -> Result<String, CliError> {
    let state = load_state(config.state.as_deref().expect("validated state"))?;
    let q = state.qubit_count();
    let mut rows: Vec<(String, f64)> = Vec::new();
    rows.push(("qubits".into(), q as f64));
    let report = natural_tangle(&state);
    rows.push((measure_name(report.measure).into(), report.value));
    for cut in 0..q {
        let coefficients = schmidt_coefficients(&state, &[cut])?;
        for (k, c) in coefficients.iter().enumerate() {
            rows.push((format!("schmidt_q{cut}_{k}"), *c));
        }
        let product = coefficients.get(1).copied().unwrap_or(0.0) <= PRODUCT_TOL;
        rows.push((format!("product_q{cut}"), if product { 1.0 } else { 0.0 }));
    }
    if let Some(second) = &config.state2 {
        let other = load_state(second)?;
        let range = subspace_tangle_range(&state, &other, 360)?;
        rows.push(("tangle_range_min".into(), range.min));
        rows.push(("tangle_range_argmin_theta".into(), range.argmin.0));
        rows.push(("tangle_range_argmin_phi".into(), range.argmin.1));
        rows.push(("tangle_range_max".into(), range.max));
        rows.push(("tangle_range_argmax_theta".into(), range.argmax.0));
        rows.push(("tangle_range_argmax_phi".into(), range.argmax.1));
    }
    Ok(match config.format {
        Format::Csv => {
            let mut out = String::from("quantity,value\n");
            for (name, value) in &rows {
                writeln!(out, "{name},{}", fmt_num(*value)).unwrap();
            }
            out
        }
        Format::Json => {
            let mut map = Map::new();
            map.insert(
                "amplitudes".into(),
                Value::Array(state.amplitudes().as_slice().iter().map(|&z| json_complex(z)).collect()),
            );
            for (name, value) in &rows {
                map.insert(name.clone(), json_num(*value));
            }
            to_json_text(&Value::Object(map))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_parsing() {
        let v = parse_state("[0.5, [0, 0.5], -0.5, [0.5, 0]]").unwrap();
        assert_eq!(v.as_slice()[1], Complex64::new(0.0, 0.5));
        assert!(parse_state("[1, \"a\"]").is_err());
        assert!(parse_state("[[1, 2, 3]]").is_err());
        assert!(parse_state("{\"a\": 1}").is_err());
        assert!(load_state("[0, 0, 0, 0]").is_err());
        assert!(load_state("[1, 0, 0]").is_err());
    }
}
