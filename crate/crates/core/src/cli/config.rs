//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use super::CliError;
use crate::hamiltonian::{Family, Model, SweepParameter, TripleSpinParams, TwoSpinParams};
use crate::spectra::DEFAULT_EXACT_TOL;

pub const DEFAULT_STEPS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Build,
    Spectrum,
    Sweep,
    Partition,
    Entangle,
    VerifyPaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "spinspec",
    version,
    about = "Spectra, level crossings and entanglement of coupled-spin Pauli Hamiltonians",
    allow_negative_numbers = true
)]
struct Args {
    /// What to run.
    #[arg(value_enum)]
    command: Command,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset model: H2, K2, H3 or K3.
    #[arg(long)]
    model: Option<String>,
    /// Term-list file with `<coefficient> <pauli string>` lines.
    #[arg(long)]
    terms: Option<String>,
    /// Frequency of spin 1.
    #[arg(long)]
    omega1: Option<String>,
    /// Frequency of spin 2.
    #[arg(long)]
    omega2: Option<String>,
    /// Frequency of spin 3 (three-spin models).
    #[arg(long)]
    omega3: Option<String>,
    /// Pair coupling of spins 1 and 2 (three-spin models, default 0).
    #[arg(long)]
    gamma12: Option<String>,
    /// Pair coupling of spins 1 and 3 (three-spin models, default 0).
    #[arg(long)]
    gamma13: Option<String>,
    /// Pair coupling of spins 2 and 3 (three-spin models, default 0).
    #[arg(long)]
    gamma23: Option<String>,
    /// Interaction strength, >= 0.
    #[arg(long)]
    eps: Option<String>,
    /// Reduced Planck constant, default 1.
    #[arg(long)]
    hbar: Option<String>,
    /// Swept parameter: eps, omega1, omega2 or omega3.
    #[arg(long)]
    param: Option<String>,
    /// Sweep range as `lo:hi`.
    #[arg(long)]
    range: Option<String>,
    /// Grid points in the sweep, >= 2, default 101.
    #[arg(long)]
    steps: Option<String>,
    /// Inverse temperature β > 0 for the partition function.
    #[arg(long)]
    inverse_temperature: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Relative tolerance for exact crossings.
    #[arg(long)]
    exact_tol: Option<String>,
    /// State as a JSON list of amplitudes (numbers or `[re, im]` pairs), or a file holding one.
    #[arg(long)]
    state: Option<String>,
    /// Second state; with `--state` reports the tangle range over their span.
    #[arg(long)]
    state2: Option<String>,
    /// Adds the given offset to entries (0,2) and (2,0) of the K2 matrix in verify-paper.
    #[arg(long, hide = true)]
    fault_k02: Option<String>,
}

const KEYS: &[&str] = &[
    "model",
    "terms",
    "omega1",
    "omega2",
    "omega3",
    "gamma12",
    "gamma13",
    "gamma23",
    "eps",
    "hbar",
    "param",
    "range",
    "steps",
    "inverse_temperature",
    "out",
    "format",
    "exact_tol",
    "state",
    "state2",
    "fault_k02",
];

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Preset(Family),
    Terms(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: Option<ModelSource>,
    /// Named real parameters as given, after defaults.
    pub parameters: BTreeMap<String, f64>,
    pub sweep: Option<SweepSettings>,
    pub inverse_temperature: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub exact_tol: f64,
    pub state: Option<String>,
    pub state2: Option<String>,
    pub fault_k02: Option<f64>,
}

impl RunConfig {
    pub fn hbar(&self) -> f64 {
        self.parameters.get("hbar").copied().unwrap_or(1.0)
    }

    fn param(&self, name: &str) -> f64 {
        self.parameters.get(name).copied().unwrap_or(0.0)
    }

    /// The preset model with its parameters; the swept parameter, if any, sits at `lo`.
    pub fn preset_model(&self) -> Option<Model> {
        let Some(ModelSource::Preset(family)) = &self.model else {
            return None;
        };
        let p = |name: &str| match self.sweep {
            Some(s) if s.parameter.name() == name => s.lo,
            _ => self.param(name),
        };
        let hbar = self.hbar();
        let model = match family {
            Family::H2 | Family::K2 => {
                let params = TwoSpinParams::new(p("omega1"), p("omega2"), p("eps")).with_hbar(hbar);
                if *family == Family::H2 {
                    Model::H2(params)
                } else {
                    Model::K2(params)
                }
            }
            Family::H3 | Family::K3 => {
                let params = TripleSpinParams::new(
                    [p("omega1"), p("omega2"), p("omega3")],
                    [p("gamma12"), p("gamma13"), p("gamma23")],
                    p("eps"),
                )
                .with_hbar(hbar);
                if *family == Family::H3 {
                    Model::H3(params)
                } else {
                    Model::K3(params)
                }
            }
        };
        Some(model)
    }
}

fn parse_config_file(text: &str, origin: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{origin}:{}: expected `key = value`", n + 1)));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("{origin}:{}: unknown key `{key}`", n + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn real(key: &str, value: &str) -> Result<f64, CliError> {
    match value.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::Usage(format!(
            "invalid value `{value}` for {key}: expected a finite real number"
        ))),
    }
}

/// Parses arguments (including the program name) and an optional config file.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => CliError::Usage(
            e.to_string()
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string(),
        ),
    })?;

    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_file(&text, &path.display().to_string())?
        }
        None => BTreeMap::new(),
    };
    let flags = [
        ("model", &args.model),
        ("terms", &args.terms),
        ("omega1", &args.omega1),
        ("omega2", &args.omega2),
        ("omega3", &args.omega3),
        ("gamma12", &args.gamma12),
        ("gamma13", &args.gamma13),
        ("gamma23", &args.gamma23),
        ("eps", &args.eps),
        ("hbar", &args.hbar),
        ("param", &args.param),
        ("range", &args.range),
        ("steps", &args.steps),
        ("inverse_temperature", &args.inverse_temperature),
        ("out", &args.out),
        ("format", &args.format),
        ("exact_tol", &args.exact_tol),
        ("state", &args.state),
        ("state2", &args.state2),
        ("fault_k02", &args.fault_k02),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.insert(key.to_string(), v.clone());
        }
    }
    build_config(args.command, &raw)
}

fn build_config(command: Command, raw: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let get = |k: &str| raw.get(k).map(String::as_str);

    let format = match get("format").map(|s| s.to_ascii_lowercase()) {
        None => Format::Csv,
        Some(f) if f == "csv" => Format::Csv,
        Some(f) if f == "json" => Format::Json,
        Some(f) => {
            return Err(CliError::Usage(format!(
                "invalid value `{f}` for format: expected csv or json"
            )))
        }
    };
    let exact_tol = match get("exact_tol") {
        None => DEFAULT_EXACT_TOL,
        Some(v) => {
            let x = real("exact_tol", v)?;
            if x <= 0.0 {
                return Err(CliError::Usage(format!("exact_tol must be > 0, got {v}")));
            }
            x
        }
    };

    let mut parameters = BTreeMap::new();
    for key in [
        "omega1", "omega2", "omega3", "gamma12", "gamma13", "gamma23", "eps", "hbar",
    ] {
        if let Some(v) = get(key) {
            parameters.insert(key.to_string(), real(key, v)?);
        }
    }
    if let Some(&h) = parameters.get("hbar") {
        if h <= 0.0 {
            return Err(CliError::Usage(format!("hbar must be > 0, got {h}")));
        }
    } else {
        parameters.insert("hbar".to_string(), 1.0);
    }
    if let Some(&e) = parameters.get("eps") {
        if e < 0.0 {
            return Err(CliError::Usage(format!("eps must be >= 0, got {e}")));
        }
    }
    let inverse_temperature = get("inverse_temperature")
        .map(|v| real("inverse_temperature", v))
        .transpose()?;
    let fault_k02 = get("fault_k02").map(|v| real("fault_k02", v)).transpose()?;

    let model = match (get("model"), get("terms")) {
        (Some(_), Some(_)) => return Err(CliError::Usage("model and terms are mutually exclusive".into())),
        (Some(m), None) => Some(ModelSource::Preset(m.parse::<Family>().map_err(|_| {
            CliError::Usage(format!("invalid value `{m}` for model: expected H2, K2, H3 or K3"))
        })?)),
        (None, Some(t)) => Some(ModelSource::Terms(PathBuf::from(t))),
        (None, None) => None,
    };

    let mut config = RunConfig {
        command,
        model,
        parameters,
        sweep: None,
        inverse_temperature,
        out: get("out").map(PathBuf::from),
        format,
        exact_tol,
        state: get("state").map(str::to_string),
        state2: get("state2").map(str::to_string),
        fault_k02,
    };

    let needs_model = matches!(
        command,
        Command::Build | Command::Spectrum | Command::Sweep | Command::Partition
    );
    if needs_model && config.model.is_none() {
        return Err(CliError::Usage("missing model: pass --model or --terms".into()));
    }

    if command == Command::Sweep {
        let Some(ModelSource::Preset(family)) = config.model else {
            return Err(CliError::Usage("sweep needs a preset model (--model)".into()));
        };
        let name = get("param").ok_or_else(|| CliError::Usage("missing param for sweep".into()))?;
        let parameter: SweepParameter = name.parse().map_err(|_| {
            CliError::Usage(format!(
                "invalid value `{name}` for param: expected eps, omega1, omega2 or omega3"
            ))
        })?;
        if parameter == SweepParameter::Omega3 && family.qubit_count() == 2 {
            return Err(CliError::Usage(format!(
                "param omega3 does not apply to model {family}"
            )));
        }
        let range = get("range").ok_or_else(|| CliError::Usage("missing range for sweep".into()))?;
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("invalid value `{range}` for range: expected lo:hi")))?;
        let (lo, hi) = (real("range", lo)?, real("range", hi)?);
        if lo >= hi {
            return Err(CliError::Usage(format!(
                "invalid value `{range}` for range: need lo < hi"
            )));
        }
        let steps = match get("steps") {
            None => DEFAULT_STEPS,
            Some(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("invalid value `{v}` for steps: expected an integer")))?,
        };
        if steps < 2 {
            return Err(CliError::Usage(format!("steps must be >= 2, got {steps}")));
        }
        config.sweep = Some(SweepSettings {
            parameter,
            lo,
            hi,
            steps,
        });
    }

    if let Some(ModelSource::Preset(family)) = config.model {
        let two = family.qubit_count() == 2;
        let required: &[&str] = if two {
            &["omega1", "omega2", "eps"]
        } else {
            &["omega1", "omega2", "omega3", "eps"]
        };
        let swept = config.sweep.map(|s| s.parameter.name());
        for key in required {
            if Some(*key) != swept && !config.parameters.contains_key(*key) {
                return Err(CliError::Usage(format!("missing parameter {key} for model {family}")));
            }
        }
        if two {
            for key in ["omega3", "gamma12", "gamma13", "gamma23"] {
                if config.parameters.contains_key(key) {
                    return Err(CliError::Usage(format!(
                        "parameter {key} does not apply to model {family}"
                    )));
                }
            }
        }
    }

    match command {
        Command::Partition => match config.inverse_temperature {
            None => return Err(CliError::Usage("missing inverse_temperature for partition".into())),
            Some(b) if b <= 0.0 => return Err(CliError::Usage(format!("inverse_temperature must be > 0, got {b}"))),
            _ => {}
        },
        Command::Entangle if config.state.is_none() => {
            return Err(CliError::Usage("missing state for entangle".into()));
        }
        _ => {}
    }
    Ok(config)
}
