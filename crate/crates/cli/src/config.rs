//! Run configuration: an optional TOML file, overridden field by field by
//! command-line flags.
//!
//! ```toml
//! [run]
//! command = "apply"
//! threads = 4
//!
//! [paths]
//! symbol = "s.json"
//! signal = "f.csv"
//! output = "out.csv"
//!
//! [operator]
//! tau = 0.5
//! K = 6
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use periodic_pdo::PeriodMatrix;

/// Configuration problems; the CLI exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Coeffs,
    Apply,
    Bound,
    Invert,
    Gabor,
    Multiplier,
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Coeffs => "coeffs",
            Self::Apply => "apply",
            Self::Bound => "bound",
            Self::Invert => "invert",
            Self::Gabor => "gabor",
            Self::Multiplier => "multiplier",
            Self::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    /// The unit Gaussian `2^{1/4} e^{−πt²}`.
    Gaussian,
    /// The samples in `--signal`.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplierRoute {
    Translation,
    Frequency,
}

/// Every tunable, as flags. Unset flags fall back to the config file, then
/// to per-command defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct Params {
    /// Symbol file (JSON).
    #[arg(long, global = true)]
    pub symbol: Option<PathBuf>,
    /// Input signal (`.csv` or `.bin`).
    #[arg(long, global = true)]
    pub signal: Option<PathBuf>,
    /// Period-cell samples (CSV) for `coeffs`.
    #[arg(long, global = true)]
    pub samples: Option<PathBuf>,
    /// Primary output file (signal, symbol or CSV table).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// JSON report destination; stdout when absent.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Period matrix, rows separated by `;`, e.g. `2,0;0,0.5`.
    #[arg(long, global = true)]
    pub lattice: Option<String>,
    /// Quantization parameter τ ∈ [0, 1].
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Coefficient truncation ‖κ‖∞ ≤ K.
    #[arg(long = "K", global = true)]
    pub truncation: Option<usize>,
    /// Gabor atom truncation ‖h‖∞, ‖k‖∞ ≤ H.
    #[arg(long = "H", global = true)]
    pub atoms: Option<usize>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Polynomial weight exponent s of v(z) = (1 + |z|²)^{s/2}.
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Lebesgue exponent for reported signal norms.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Second Lebesgue exponent (modulation norms of the Gabor window).
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Number of Neumann terms.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// Time-frequency shift constant C.
    #[arg(long, global = true)]
    pub constant: Option<f64>,
    /// Torus extent T for generated grids.
    #[arg(long, global = true)]
    pub extent: Option<f64>,
    /// Grid points N per axis for generated grids.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Samples per axis of the period cell for Gabor symbols.
    #[arg(long, global = true)]
    pub cell_points: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub window: Option<WindowKind>,
    /// `a0:a1:na,b0:b1:nb`.
    #[arg(long, global = true)]
    pub scan: Option<String>,
    #[arg(long, value_enum, global = true)]
    pub route: Option<MultiplierRoute>,
    /// Power iterations for norm measurements (0 skips the measurement).
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    paths: PathsSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    operator: OperatorSection,
    #[serde(default)]
    weight: WeightSection,
    #[serde(default)]
    gabor: GaborSection,
    #[serde(default)]
    multiplier: MultiplierSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    command: Option<Command>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathsSection {
    symbol: Option<PathBuf>,
    signal: Option<PathBuf>,
    samples: Option<PathBuf>,
    output: Option<PathBuf>,
    report: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    extent: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSection {
    lattice: Option<String>,
    tau: Option<f64>,
    #[serde(rename = "K")]
    truncation: Option<usize>,
    terms: Option<usize>,
    iterations: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightSection {
    s: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    constant: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaborSection {
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "H")]
    atoms: Option<usize>,
    window: Option<WindowKind>,
    scan: Option<String>,
    cell_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiplierSection {
    route: Option<MultiplierRoute>,
}

/// The merged configuration handed to the dispatcher.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub threads: Option<usize>,
    pub params: Params,
}

fn or<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

impl RunConfig {
    /// Merges flags over the optional config file.
    pub fn resolve(
        command: Option<Command>,
        threads: Option<usize>,
        flags: Params,
        config_path: Option<&Path>,
    ) -> Result<Self, ConfigError> {
        let file = match config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| bad(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let command = command
            .or(file.run.command)
            .ok_or_else(|| bad("no command given (pass a subcommand or set run.command in the config)"))?;
        let params = Params {
            symbol: or(flags.symbol, file.paths.symbol),
            signal: or(flags.signal, file.paths.signal),
            samples: or(flags.samples, file.paths.samples),
            output: or(flags.output, file.paths.output),
            report: or(flags.report, file.paths.report),
            lattice: or(flags.lattice, file.operator.lattice),
            tau: or(flags.tau, file.operator.tau),
            truncation: or(flags.truncation, file.operator.truncation),
            atoms: or(flags.atoms, file.gabor.atoms),
            alpha: or(flags.alpha, file.gabor.alpha),
            beta: or(flags.beta, file.gabor.beta),
            s: or(flags.s, file.weight.s),
            p: or(flags.p, file.weight.p),
            q: or(flags.q, file.weight.q),
            terms: or(flags.terms, file.operator.terms),
            constant: or(flags.constant, file.weight.constant),
            extent: or(flags.extent, file.grid.extent),
            points: or(flags.points, file.grid.points),
            cell_points: or(flags.cell_points, file.gabor.cell_points),
            window: or(flags.window, file.gabor.window),
            scan: or(flags.scan, file.gabor.scan),
            route: or(flags.route, file.multiplier.route),
            iterations: or(flags.iterations, file.operator.iterations),
        };
        let config = Self { command, threads: threads.or(file.run.threads), params };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.params;
        if let Some(t) = p.tau {
            if !(0.0..=1.0).contains(&t) {
                return Err(bad(format!("tau must lie in [0, 1], got {t}")));
            }
        }
        for (name, v) in [("alpha", p.alpha), ("beta", p.beta), ("extent", p.extent), ("constant", p.constant)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(bad(format!("{name} must be positive and finite, got {v}")));
                }
            }
        }
        if let Some(s) = p.s {
            if !(s.is_finite() && s >= 0.0) {
                return Err(bad(format!("s must be finite and non-negative, got {s}")));
            }
        }
        for (name, v) in [("p", p.p), ("q", p.q)] {
            if let Some(v) = v {
                if v.is_nan() || v < 1.0 {
                    return Err(bad(format!("{name} must lie in [1, inf], got {v}")));
                }
            }
        }
        if let Some(n) = p.points {
            if n < 2 || n % 2 != 0 {
                return Err(bad(format!("points must be even and at least 2, got {n}")));
            }
        }
        if self.threads == Some(0) {
            return Err(bad("threads must be at least 1"));
        }
        if p.terms == Some(0) {
            return Err(bad("terms must be at least 1"));
        }
        if let Some(scan) = &p.scan {
            parse_scan(scan)?;
        }
        if let Some(l) = &p.lattice {
            parse_lattice(l)?;
        }
        for path in [&p.symbol, &p.signal, &p.samples].into_iter().flatten() {
            if !path.exists() {
                return Err(bad(format!("input file {} does not exist", path.display())));
            }
        }
        Ok(())
    }

    pub fn require<'a, T>(&self, value: &'a Option<T>, name: &str) -> Result<&'a T, ConfigError> {
        value.as_ref().ok_or_else(|| bad(format!("`{}` needs --{name}", self.command.name())))
    }
}

/// `a0:a1:n` ranges, comma separated.
pub fn parse_scan(spec: &str) -> Result<(Vec<f64>, Vec<f64>), ConfigError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(bad(format!("scan `{spec}` must have the form a0:a1:na,b0:b1:nb")));
    }
    let range = |s: &str| -> Result<Vec<f64>, ConfigError> {
        let f: Vec<&str> = s.split(':').collect();
        if f.len() != 3 {
            return Err(bad(format!("scan range `{s}` must be start:stop:count")));
        }
        let a = f64::from_str(f[0].trim()).map_err(|e| bad(format!("scan start `{}`: {e}", f[0])))?;
        let b = f64::from_str(f[1].trim()).map_err(|e| bad(format!("scan stop `{}`: {e}", f[1])))?;
        let n = usize::from_str(f[2].trim()).map_err(|e| bad(format!("scan count `{}`: {e}", f[2])))?;
        if n == 0 || !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(bad(format!("scan range `{s}` needs positive bounds and count")));
        }
        Ok(periodic_pdo::gabor::linspace(a, b, n))
    };
    Ok((range(parts[0])?, range(parts[1])?))
}

/// `a,b;c,d` → 2×2 period matrix (any square size).
pub fn parse_lattice(spec: &str) -> Result<PeriodMatrix, ConfigError> {
    let rows = spec
        .split(';')
        .map(|r| r.split(',').map(|v| f64::from_str(v.trim())).collect::<Result<Vec<f64>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| bad(format!("lattice `{spec}`: {e}")))?;
    PeriodMatrix::from_rows(&rows).map_err(|e| bad(format!("lattice `{spec}`: {e}")))
}
