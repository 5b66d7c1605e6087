//! Command-line grammar and the `key = value` configuration file.
//!
//! Every flag is global, so a configuration file is applied by turning its
//! lines into `--key=value` tokens placed before the user's own arguments;
//! later occurrences win, which makes flags override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

pub const CONFIG_ENV: &str = "RESOKIT_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "resokit", version, about = "Contact-model and two-channel scattering calculations")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering amplitude, phase shift and cross section at --k or over a k sweep.
    Amplitude,
    /// Phase shift and k cot δ at --k or over a k sweep.
    PhaseShift,
    /// Bound-state poles with their normalization.
    BoundState,
    /// Bound states with the residual of the modified norm.
    ModifiedNorm,
    /// Two-channel model.
    #[command(name = "two-channel", subcommand)]
    TwoChannel(TwoChannelCommand),
    /// Magnetic Feshbach resonances from a species file.
    #[command(subcommand)]
    Feshbach(FeshbachCommand),
    /// Run the invariant battery.
    Verify {
        #[arg(value_enum, default_value = "all")]
        group: Group,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum TwoChannelCommand {
    /// Effective low-energy parameters, closed form and fitted.
    Params,
    /// Sweep ε holding (a, R*) fixed.
    Sweep,
    /// The bound state and the molecular identity for one parameter set.
    Bound,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum FeshbachCommand {
    /// a(B) over a field sweep, for every species in the file.
    Sweep,
    /// Broad or narrow, from |R*| / R_vdW.
    Classify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Group {
    All,
    Orthogonality,
    Unitarity,
    Mapping,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Natural,
    Si,
    Atomic,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Scattering length.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Width radius R*.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rstar: Option<f64>,
    /// Coefficients of g(E) = Σ c_n Eⁿ, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Form-factor width ε.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Coupling Λ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Closed-channel detuning E_mol.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub emol: Option<f64>,
    /// Particle mass (two-channel model).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Sweep start.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub min: Option<f64>,
    /// Sweep end.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub max: Option<f64>,
    /// Number of sweep points.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Logarithmic sweep spacing.
    #[arg(long, global = true)]
    pub log: bool,
    /// Seed of the verification draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Configuration file of `key = value` lines (also RESOKIT_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Single momentum.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Upper end of the bound-state scan in q.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub qmax: Option<f64>,
    /// Species CSV file.
    #[arg(long, global = true)]
    pub species: Option<PathBuf>,
    /// Broad/narrow threshold on |R*| / R_vdW.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Identical bosons (doubles the cross section).
    #[arg(long, global = true)]
    pub identical: bool,
}

const SWITCHES: [&str; 2] = ["log", "identical"];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected `key = value`", origin.display(), i + 1)))?;
        let key = key.trim();
        if key == "config" {
            return Err(CliError::Usage(format!("{}:{}: `config` cannot be set from a file", origin.display(), i + 1)));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn config_tokens(pairs: &[(String, String)], origin: &Path) -> Result<Vec<String>, CliError> {
    let mut tokens = Vec::new();
    for (key, value) in pairs {
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => tokens.push(format!("--{key}")),
                "false" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "{}: `{key}` takes true or false, got `{other}`",
                        origin.display()
                    )))
                }
            }
        } else {
            tokens.push(format!("--{key}={value}"));
        }
    }
    Ok(tokens)
}

/// Locate the configuration file from `--config` (or `--config=`) in the raw
/// arguments, falling back to the environment.
fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    std::env::var_os(CONFIG_ENV).map(PathBuf::from)
}

/// Parse the command line with the configuration file applied underneath.
/// Also returns the effective inputs for the run report.
pub fn parse(args: Vec<String>) -> Result<(Cli, BTreeMap<String, String>), CliError> {
    let mut argv = vec![args.first().cloned().unwrap_or_else(|| "resokit".into())];
    let mut inputs = BTreeMap::new();
    if let Some(path) = config_path(&args) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let pairs = parse_config(&text, &path)?;
        argv.extend(config_tokens(&pairs, &path)?);
        for (k, v) in pairs {
            inputs.insert(k, v);
        }
    }
    argv.extend(args.iter().skip(1).cloned());
    let cli = Cli::try_parse_from(&argv).map_err(CliError::Clap)?;
    // flags given on the command line override the file
    let mut it = args.iter().skip(1).peekable();
    while let Some(a) = it.next() {
        if let Some(flag) = a.strip_prefix("--") {
            let (key, value) = match flag.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None if SWITCHES.contains(&flag) => (flag.to_string(), "true".to_string()),
                None => (flag.to_string(), it.next().cloned().unwrap_or_default()),
            };
            inputs.insert(key, value);
        }
    }
    Ok((cli, inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn config_lines() {
        let pairs = parse_config("# comment\na = 1.5\n\nrstar=-2 # trailing\nlog = true\n", Path::new("c")).unwrap();
        assert_eq!(pairs, [("a".into(), "1.5".into()), ("rstar".into(), "-2".into()), ("log".into(), "true".into())]);
        assert!(parse_config("a 1", Path::new("c")).is_err());
    }

    #[test]
    fn negative_values_parse() {
        let (cli, _) = parse(argv("resokit amplitude --a -1 --emol -3 --coeffs -1,0.5 --k 1")).unwrap();
        assert_eq!(cli.opts.a, Some(-1.0));
        assert_eq!(cli.opts.emol, Some(-3.0));
        assert_eq!(cli.opts.coeffs.as_deref(), Some("-1,0.5"));
    }

    #[test]
    fn later_flags_win() {
        let (cli, inputs) = parse(argv("resokit --a 2 amplitude --a 3")).unwrap();
        assert_eq!(cli.opts.a, Some(3.0));
        assert_eq!(inputs["a"], "3");
    }
}
