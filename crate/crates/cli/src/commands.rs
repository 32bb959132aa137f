//! One function per subcommand. Each returns the `result` object of its
//! JSON report; file outputs are written along the way.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use log::info;
use serde_json::{json, Value};

use periodic_pdo::analysis::{
    continuity_bound, invertibility_check, multiplier_necessity_witness, necessity_chain, neumann_inverse_apply,
    neumann_terms_for, power_iteration_lenient, PowerOptions, WeightedOperator,
};
use periodic_pdo::gabor::{
    dual_window, gabor_coefficients, modulation_norm, scan, scan_point, GaborSystem, GaborWindow, ScanOptions, ScanRow,
    StftGrid, SymbolResolution,
};
use periodic_pdo::io::{fmt_f64, load_signal, load_symbol, read_cell_samples_csv, save_signal, save_symbol, symbol_to_json};
use periodic_pdo::operator::{apply_multiplier, apply_series, diagnostics, MultiplierPath};
use periodic_pdo::signal::lp_m_norm;
use periodic_pdo::symbol::{fourier_coefficients, GaussianWindow};
use periodic_pdo::{
    selftest, CompiledOperator, Error, GridSignal, GridSpec, ModerateWeight, OperatorSpec, PeriodicSymbol,
    PolynomialWeight,
};

use crate::config::{parse_lattice, parse_scan, Command, ConfigError, MultiplierRoute, RunConfig, WindowKind};

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    Config(String),
    /// Exit 3; a module refused or failed numerically.
    Numerical(Error, Option<Value>),
    /// Exit 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(..) => 3,
            Self::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Numerical(..) => "numerical",
            Self::Io(_) => "io",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Self::Config(m) | Self::Io(m) => m.clone(),
            Self::Numerical(e, _) => e.to_string(),
        }
    }

    pub fn report(&self) -> Option<Value> {
        match self {
            Self::Numerical(_, r) => r.clone(),
            _ => None,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.0)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Self::Io(e.to_string()),
            Error::Parse(m) => Self::Io(format!("malformed input: {m}")),
            Error::Json(e) => Self::Io(format!("malformed input: {e}")),
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::InvalidWeight(_) => {
                Self::Config(e.to_string())
            }
            Error::NotInvertible(ref r) => {
                let report = serde_json::to_value(r.as_ref()).ok();
                Self::Numerical(e, report)
            }
            other => Self::Numerical(other, None),
        }
    }
}

type Outcome = Result<Value, CliError>;

fn grid_json(g: &GridSpec) -> Value {
    json!({ "dim": g.dim, "extent": g.extent, "points": g.points })
}

fn generated_grid(cfg: &RunConfig, extent: f64, points: usize) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(1, cfg.params.extent.unwrap_or(extent), cfg.params.points.unwrap_or(points))?)
}

fn polynomial_weight(cfg: &RunConfig) -> Result<PolynomialWeight, CliError> {
    Ok(PolynomialWeight::new(cfg.params.s.unwrap_or(0.0))?)
}

fn signal_norms(cfg: &RunConfig, f: &GridSignal) -> Result<Value, CliError> {
    let p = cfg.params.p.unwrap_or(2.0);
    let m = ModerateWeight::polynomial(cfg.params.s.unwrap_or(0.0))?;
    Ok(json!({ "p": p, "s": cfg.params.s.unwrap_or(0.0), "lp_m": lp_m_norm(f, p, &m)? }))
}

fn power_options(cfg: &RunConfig, default_iterations: usize) -> PowerOptions {
    PowerOptions { max_iterations: cfg.params.iterations.unwrap_or(default_iterations), ..PowerOptions::default() }
}

pub fn dispatch(cfg: &RunConfig) -> Outcome {
    info!("running {}", cfg.command.name());
    match cfg.command {
        Command::Coeffs => coeffs(cfg),
        Command::Apply => apply(cfg),
        Command::Bound => bound(cfg),
        Command::Invert => invert(cfg),
        Command::Gabor => gabor(cfg),
        Command::Multiplier => multiplier(cfg),
        Command::Selftest => Ok(serde_json::to_value(selftest::run()?).expect("report serializes")),
    }
}

fn symbol_summary(p: &PeriodicSymbol) -> Value {
    json!({
        "terms": p.len(),
        "support_radius": p.support_radius(),
        "c0": { "re": p.c0().re, "im": p.c0().im },
        "ell1": p.ell1(),
    })
}

fn coeffs(cfg: &RunConfig) -> Outcome {
    let k = *cfg.require(&cfg.params.truncation, "K")?;
    let output = cfg.require(&cfg.params.output, "output")?;
    let p = if let Some(path) = &cfg.params.samples {
        let lattice = parse_lattice(cfg.require(&cfg.params.lattice, "lattice")?)?;
        let samples = read_cell_samples_csv(BufReader::new(File::open(path)?), lattice)?;
        fourier_coefficients(&samples, k)?
    } else {
        let alpha = *cfg.require(&cfg.params.alpha, "samples (or --alpha/--beta for a Gabor symbol)")?;
        let beta = *cfg.require(&cfg.params.beta, "beta")?;
        let resolution = SymbolResolution { cell_points: cfg.params.cell_points.unwrap_or(32), coefficient_truncation: k };
        let window = GaussianWindow::new(1);
        gabor_coefficients(&window, alpha, beta, cfg.params.atoms.unwrap_or(8), resolution)?
    };
    save_symbol(output, &p)?;
    Ok(json!({ "output": output, "symbol": symbol_summary(&p) }))
}

fn operator_spec(cfg: &RunConfig, p: PeriodicSymbol) -> Result<OperatorSpec, CliError> {
    let tau = cfg.params.tau.unwrap_or(0.0);
    Ok(match cfg.params.truncation {
        Some(k) => OperatorSpec::new(p, tau, k)?,
        None => OperatorSpec::from_symbol(p, tau)?,
    })
}

fn apply(cfg: &RunConfig) -> Outcome {
    let p = load_symbol(cfg.require(&cfg.params.symbol, "symbol")?)?;
    let f = load_signal(cfg.require(&cfg.params.signal, "signal")?)?;
    let output = cfg.require(&cfg.params.output, "output")?;
    let spec = operator_spec(cfg, p)?;
    let out = apply_series(&spec, &f)?;
    save_signal(output, &out)?;
    Ok(json!({
        "output": output,
        "tau": spec.tau(),
        "truncation": spec.truncation(),
        "grid": grid_json(f.spec()),
        "diagnostics": diagnostics(&spec, &f),
        "input_norm": signal_norms(cfg, &f)?,
        "output_norm": signal_norms(cfg, &out)?,
    }))
}

fn bound(cfg: &RunConfig) -> Outcome {
    let p = load_symbol(cfg.require(&cfg.params.symbol, "symbol")?)?;
    let v = polynomial_weight(cfg)?;
    let m = ModerateWeight::polynomial(v.exponent())?;
    let constant = cfg.params.constant.unwrap_or(m.constant_bound());
    let mut report = continuity_bound(&p, &v, constant)?;
    let options = power_options(cfg, 200);
    let mut measurement = Value::Null;
    if options.max_iterations > 0 && p.dim() == 2 {
        let grid = generated_grid(cfg, 16.0, 512)?;
        let spec = operator_spec(cfg, p)?;
        let op = CompiledOperator::new(&spec, grid)?;
        let (estimate, converged) = if v.exponent() == 0.0 {
            power_iteration_lenient(&op, options)?
        } else {
            power_iteration_lenient(&WeightedOperator::new(&op, &m), options)?
        };
        report = report.with_measurement(estimate.norm);
        measurement = json!({
            "grid": grid_json(&grid),
            "tau": spec.tau(),
            "iterations": estimate.iterations,
            "converged": converged,
        });
    }
    Ok(json!({ "s": v.exponent(), "bound": report, "measurement": measurement }))
}

fn invert(cfg: &RunConfig) -> Outcome {
    let p = load_symbol(cfg.require(&cfg.params.symbol, "symbol")?)?;
    let f = load_signal(cfg.require(&cfg.params.signal, "signal")?)?;
    let output = cfg.require(&cfg.params.output, "output")?;
    let spec = operator_spec(cfg, p)?;
    let report = invertibility_check(spec.symbol(), &PolynomialWeight::unit(), 1.0)?;
    if !report.invertible {
        let value = serde_json::to_value(&report).ok();
        return Err(CliError::Numerical(Error::NotInvertible(Box::new(report)), value));
    }
    let terms = cfg.params.terms.unwrap_or_else(|| neumann_terms_for(report.ratio, 1e-10) + 2);
    let outcome = neumann_inverse_apply(&spec, &f, terms)?;
    save_signal(output, &outcome.signal)?;
    Ok(json!({
        "output": output,
        "tau": spec.tau(),
        "terms": outcome.terms,
        "residual": outcome.residual,
        "criterion": outcome.report,
        "output_norm": signal_norms(cfg, &outcome.signal)?,
    }))
}

fn write_scan_csv(w: &mut impl Write, rows: &[ScanRow]) -> std::io::Result<()> {
    writeln!(w, "alpha,beta,c0_abs,tail,certified,lower_frame_bound,upper_frame_bound,zone")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.alpha),
            fmt_f64(r.beta),
            fmt_f64(r.c0_abs),
            fmt_f64(r.tail),
            r.certified,
            fmt_f64(r.lower_frame_bound),
            fmt_f64(r.upper_frame_bound),
            r.zone.as_str()
        )?;
    }
    w.flush()
}

fn gabor(cfg: &RunConfig) -> Outcome {
    let window = cfg.params.window.unwrap_or(WindowKind::Gaussian);
    let resolution = SymbolResolution {
        cell_points: cfg.params.cell_points.unwrap_or(32),
        coefficient_truncation: cfg.params.truncation.unwrap_or(12),
    };
    if let Some(spec) = &cfg.params.scan {
        if window != WindowKind::Gaussian {
            return Err(CliError::Config("scans use the Gaussian window".into()));
        }
        let (alphas, betas) = parse_scan(spec)?;
        let options = ScanOptions {
            extent: cfg.params.extent.unwrap_or(16.0),
            points: cfg.params.points.unwrap_or(256),
            resolution,
            power: power_options(cfg, 2000),
            ..ScanOptions::default()
        };
        let rows = scan(&alphas, &betas, &options)?;
        match &cfg.params.output {
            Some(path) => write_scan_csv(&mut BufWriter::new(File::create(path)?), &rows)?,
            None => write_scan_csv(&mut std::io::stdout().lock(), &rows)?,
        }
        let certified = rows.iter().filter(|r| r.certified).count();
        return Ok(json!({ "rows": rows.len(), "certified": certified, "output": cfg.params.output }));
    }
    let alpha = *cfg.require(&cfg.params.alpha, "alpha")?;
    let beta = *cfg.require(&cfg.params.beta, "beta")?;
    let atoms = cfg.params.atoms.unwrap_or(8);
    let sys = match window {
        WindowKind::Gaussian => GaborSystem::gaussian(generated_grid(cfg, 16.0, 512)?, alpha, beta, atoms)?,
        WindowKind::Sampled => GaborSystem::new(load_signal(cfg.require(&cfg.params.signal, "signal")?)?, alpha, beta, atoms)?,
    };
    let p = gabor_coefficients(sys.analytic_window(), alpha, beta, atoms, resolution)?;
    let frame_bounds = if matches!(sys.analytic_window(), GaborWindow::Gaussian(_)) && sys.grid().dim == 1 {
        serde_json::to_value(scan_point(alpha, beta, &ScanOptions { resolution, power: power_options(cfg, 2000), ..ScanOptions::default() })?)
            .expect("row serializes")
    } else {
        Value::Null
    };
    let dual = dual_window(&sys, cfg.params.terms, resolution)?;
    if let Some(path) = &cfg.params.output {
        save_signal(path, &dual.gamma)?;
    }
    let (pp, qq) = (cfg.params.p.unwrap_or(1.0), cfg.params.q.unwrap_or(1.0));
    let coarse = StftGrid { time_stride: 4, freq_stride: 4 };
    let window_norm = modulation_norm(sys.window(), sys.window(), pp, qq, &ModerateWeight::constant(), coarse)?;
    Ok(json!({
        "alpha": alpha,
        "beta": beta,
        "H": atoms,
        "grid": grid_json(&sys.grid()),
        "symbol": symbol_summary(&p),
        "criterion": dual.report,
        "frame_bounds": frame_bounds,
        "dual_window": {
            "output": cfg.params.output,
            "terms": dual.terms,
            "residual": dual.residual,
            "frame_residual": dual.frame_residual,
        },
        "window_modulation_norm": { "p": pp, "q": qq, "value": window_norm },
    }))
}

fn multiplier(cfg: &RunConfig) -> Outcome {
    let sigma = load_symbol(cfg.require(&cfg.params.symbol, "symbol")?)?;
    let u = load_signal(cfg.require(&cfg.params.signal, "signal")?)?;
    let output = cfg.require(&cfg.params.output, "output")?;
    let route = match cfg.params.route.unwrap_or(MultiplierRoute::Translation) {
        MultiplierRoute::Translation => MultiplierPath::Translation,
        MultiplierRoute::Frequency => MultiplierPath::Frequency,
    };
    let out = apply_multiplier(&sigma, &u, route)?;
    save_signal(output, &out)?;
    let v = polynomial_weight(cfg)?;
    let witness = multiplier_necessity_witness(sigma.lattice(), &v, *u.spec())?;
    let chain = necessity_chain(&sigma, &witness, 1e-6)?;
    Ok(json!({
        "output": output,
        "route": format!("{route:?}").to_lowercase(),
        "output_norm": signal_norms(cfg, &out)?,
        "necessity": chain,
        "symbol": symbol_to_json(&sigma),
    }))
}
