use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use vacuum_core::mass_transform::TransformMethod;
use vacuum_core::quad::Tolerance;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Kernel,
    Transform,
    Energy,
    EquivCheck,
    PdeCheck,
    Coeffs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Evaluate cylinder kernels, mass transforms and interval Casimir energies.
///
/// Lists are comma separated (`0.5,1,2`) or evenly spaced `start:stop:count`.
#[derive(Debug, Parser)]
#[command(name = "vacuum", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Spatial dimension.
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Interval length(s).
    #[arg(long = "L", allow_hyphen_values = true)]
    pub length: Option<String>,
    /// Point separation for free kernels.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Mass or list of masses.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Cutoff or grid of cutoffs.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// μ = m² grid (pde-check, coeffs).
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Relative quadrature tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Pass/fail threshold of equiv-check and pde-check.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<String>,
    /// Finite-difference step of pde-check.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    /// free | interval | halfline; pde-check also takes transformed.
    #[arg(long)]
    pub kernel: Option<String>,
    /// shifted | boundary | derivative.
    #[arg(long)]
    pub method: Option<String>,
    /// Highest coefficient index for coeffs.
    #[arg(long, allow_hyphen_values = true)]
    pub order: Option<String>,
    /// Half-line source point.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Half-line field point.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// csv | json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "d", "L", "z", "m", "t", "mu", "tol", "threshold", "h", "kernel", "method", "order", "x", "y", "format", "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Free,
    Interval,
    Halfline,
    /// Interval trace obtained through the mass transform.
    Transformed,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub d: u32,
    pub lengths: Vec<f64>,
    pub z: f64,
    pub masses: Vec<f64>,
    pub ts: Vec<f64>,
    pub mus: Vec<f64>,
    pub tol: Tolerance,
    pub threshold: f64,
    pub h: f64,
    pub kernel: KernelChoice,
    pub method: TransformMethod,
    pub order: usize,
    pub x: f64,
    pub y: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("config: cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Invalid(format!("config line {}: unknown key '{key}'", i + 1)));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(CliError::Invalid(format!("config line {}: duplicate key '{key}'", i + 1)));
        }
    }
    Ok(map)
}

fn invalid(field: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Invalid(format!("invalid {field}: {detail}"))
}

fn number(field: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| invalid(field, format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(field, format!("'{s}' is not finite")));
    }
    Ok(v)
}

fn list(field: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let values = if let [a, b, n] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b) = (number(field, a)?, number(field, b)?);
        let n: usize = n.trim().parse().map_err(|_| invalid(field, format!("count '{n}' is not a positive integer")))?;
        match n {
            0 => return Err(invalid(field, "count must be >= 1")),
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        }
    } else {
        s.split(',').map(|p| number(field, p)).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(invalid(field, "empty list"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(field, "values must be strictly increasing"));
    }
    Ok(values)
}

fn positive(field: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|&&v| v <= 0.0) {
        Some(v) => Err(invalid(field, format!("{v} must be > 0"))),
        None => Ok(()),
    }
}

fn non_negative(field: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|&&v| v < 0.0) {
        Some(v) => Err(invalid(field, format!("{v} must be >= 0"))),
        None => Ok(()),
    }
}

/// Evaluation budget cap from `VACUUM_MAX_EVALS`, if set.
pub fn max_evals_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("VACUUM_MAX_EVALS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| invalid("VACUUM_MAX_EVALS", format!("'{v}' is not a positive integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(invalid("VACUUM_MAX_EVALS", e)),
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli, max_evals: Option<usize>) -> Result<Self, CliError> {
        let mut settings = match &cli.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("d", cli.d),
            ("L", cli.length),
            ("z", cli.z),
            ("m", cli.m),
            ("t", cli.t),
            ("mu", cli.mu),
            ("tol", cli.tol),
            ("threshold", cli.threshold),
            ("h", cli.h),
            ("kernel", cli.kernel),
            ("method", cli.method),
            ("order", cli.order),
            ("x", cli.x),
            ("y", cli.y),
            ("format", cli.format),
            ("out", cli.out.map(|p| p.to_string_lossy().into_owned())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                settings.insert(key.to_string(), v);
            }
        }
        let get = |k: &str| settings.get(k).map(String::as_str);
        let command = cli.command;

        let d = match get("d") {
            Some(s) => s.trim().parse::<u32>().ok().filter(|&d| d >= 1).ok_or_else(|| invalid("--d", format!("'{s}' must be an integer >= 1")))?,
            None => 1,
        };
        let lengths = list("--L", get("L").unwrap_or("1"))?;
        positive("--L", &lengths)?;
        let z = number("--z", get("z").unwrap_or("0"))?;
        non_negative("--z", &[z])?;
        let masses = list("--m", get("m").unwrap_or("1"))?;
        non_negative("--m", &masses)?;
        let ts = list("--t", get("t").unwrap_or("1"))?;
        positive("--t", &ts)?;
        let mus = list("--mu", get("mu").unwrap_or("1"))?;
        non_negative("--mu", &mus)?;

        // Differencing amplifies quadrature noise by 1/h², hence the tighter default.
        let default_tol = if command == Command::PdeCheck { "1e-14" } else { "1e-10" };
        let rel = number("--tol", get("tol").unwrap_or(default_tol))?;
        if !(rel > 0.0 && rel < 1.0) {
            return Err(invalid("--tol", format!("{rel} must lie in (0, 1)")));
        }
        let mut tol = Tolerance::default().with_tolerances(0.1 * rel, rel);
        if let Some(cap) = max_evals {
            tol = tol.capped(cap);
        }
        let default_threshold = match command {
            Command::PdeCheck => "1e-5",
            _ => "1e-8",
        };
        let threshold = number("--threshold", get("threshold").unwrap_or(default_threshold))?;
        positive("--threshold", &[threshold])?;
        let h = number("--h", get("h").unwrap_or("1e-4"))?;
        positive("--h", &[h])?;

        let default_kernel = if command == Command::Coeffs { "interval" } else { "free" };
        let kernel = match get("kernel").unwrap_or(default_kernel) {
            "free" => KernelChoice::Free,
            "interval" => KernelChoice::Interval,
            "halfline" => KernelChoice::Halfline,
            "transformed" => KernelChoice::Transformed,
            other => return Err(invalid("--kernel", format!("unknown kernel '{other}'"))),
        };
        let allowed = match command {
            Command::Kernel | Command::Transform => {
                matches!(kernel, KernelChoice::Free | KernelChoice::Interval | KernelChoice::Halfline)
            }
            Command::PdeCheck => matches!(kernel, KernelChoice::Free | KernelChoice::Interval | KernelChoice::Transformed),
            Command::Coeffs => kernel == KernelChoice::Interval,
            Command::Energy | Command::EquivCheck => true,
        };
        if !allowed {
            return Err(invalid("--kernel", format!("'{}' is not available for this command", get("kernel").unwrap_or(""))));
        }
        if command == Command::Coeffs && d != 1 {
            return Err(invalid("--d", "coeffs supports the interval kernel, d = 1"));
        }
        let method = get("method")
            .unwrap_or("shifted")
            .parse::<TransformMethod>()
            .map_err(|e| invalid("--method", e))?;
        let order = match get("order") {
            Some(s) => s.trim().parse::<usize>().ok().filter(|&n| n <= 40).ok_or_else(|| invalid("--order", format!("'{s}' must be an integer in 0..=40")))?,
            None => 4,
        };
        let x = number("--x", get("x").unwrap_or("1"))?;
        let y = number("--y", get("y").unwrap_or("1"))?;
        if kernel == KernelChoice::Halfline {
            non_negative("--x", &[x])?;
            non_negative("--y", &[y])?;
        }
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(invalid("--format", format!("'{other}' is not csv or json"))),
        };
        Ok(RunConfig {
            command,
            d,
            lengths,
            z,
            masses,
            ts,
            mus,
            tol,
            threshold,
            h,
            kernel,
            method,
            order,
            x,
            y,
            format,
            out: get("out").map(PathBuf::from),
        })
    }
}
