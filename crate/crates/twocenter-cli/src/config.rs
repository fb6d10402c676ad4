//! Shared flags and the JSON configuration file that can override them.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use twocenter::summation::Precision;
use twocenter::{Error, Result, StateLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Standard,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Standard => Precision::Standard,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

/// Flags accepted by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// State, as a spectroscopic name (1sσg, 1ssg) or a quantum-number tuple ((0,0,0,+)).
    #[arg(long)]
    pub state: Option<String>,
    /// Internuclear distance in bohr.
    #[arg(long = "R", value_name = "R")]
    pub r: Option<f64>,
    /// Inclusive grid of distances, written start:stop:step.
    #[arg(long = "R-grid", value_name = "START:STOP:STEP")]
    pub r_grid: Option<String>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Quadrature nodes per channel.
    #[arg(long = "quad-N", value_name = "N")]
    pub quad_n: Option<usize>,
    /// Output file (a directory for reproduce-tables); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file whose entries override the flags given on the command line.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a configuration file. Keys use the flag names, with either
/// dashes or underscores.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub state: Option<String>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "R_grid", alias = "R-grid")]
    pub r_grid: Option<String>,
    pub precision: Option<PrecisionArg>,
    #[serde(rename = "quad_N", alias = "quad-N")]
    pub quad_n: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub kind: Option<String>,
    #[serde(rename = "final")]
    pub final_state: Option<String>,
    pub initial: Option<String>,
    pub which: Option<Vec<String>>,
    pub grid: Option<String>,
    #[serde(alias = "warm-start")]
    pub warm_start: Option<bool>,
    pub save: Option<bool>,
    pub compare: Option<bool>,
    pub stability: Option<bool>,
    pub plain: Option<bool>,
    pub probe: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::ParameterDomain(format!("config {}: {e}", path.display())))
    }

    /// Copies every entry present in the file over the matching flag.
    pub fn apply(&self, c: &mut Common) {
        if self.state.is_some() {
            c.state = self.state.clone();
        }
        if self.r.is_some() {
            c.r = self.r;
            c.r_grid = None;
        }
        if self.r_grid.is_some() {
            c.r_grid = self.r_grid.clone();
            c.r = None;
        }
        if self.precision.is_some() {
            c.precision = self.precision;
        }
        if self.quad_n.is_some() {
            c.quad_n = self.quad_n;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if self.format.is_some() {
            c.format = self.format;
        }
    }
}

pub fn override_flag<T: Clone>(flag: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *flag = v.clone();
    }
}

impl Common {
    pub fn precision(&self) -> Precision {
        self.precision.map(Precision::from).unwrap_or(Precision::Standard)
    }

    pub fn quad_n(&self) -> usize {
        self.quad_n.unwrap_or(twocenter::quadrature::DEFAULT_NODES)
    }

    /// The explicit format, else the one implied by a `.json` output file, else CSV.
    pub fn format(&self) -> Format {
        let by_extension = self.out.as_deref().and_then(|p| p.extension()).filter(|e| e.eq_ignore_ascii_case("json"));
        self.format.unwrap_or(if by_extension.is_some() { Format::Json } else { Format::Csv })
    }

    pub fn state(&self) -> Result<StateLabel> {
        self.state.as_deref().ok_or_else(|| Error::ParameterDomain("--state is required".into()))?.parse()
    }

    /// Distances requested through `--R` or `--R-grid`, if any.
    pub fn distances(&self) -> Result<Option<Vec<f64>>> {
        match (&self.r, &self.r_grid) {
            (Some(_), Some(_)) => Err(Error::ParameterDomain("give either --R or --R-grid, not both".into())),
            (Some(r), None) => {
                check_distance(*r)?;
                Ok(Some(vec![*r]))
            }
            (None, Some(g)) => parse_grid(g).map(Some),
            (None, None) => Ok(None),
        }
    }

    pub fn required_distances(&self) -> Result<Vec<f64>> {
        self.distances()?.ok_or_else(|| Error::ParameterDomain("--R or --R-grid is required".into()))
    }
}

fn check_distance(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("distance must be positive and finite, got {r}")))
    }
}

/// Parses `start:stop:step` into an inclusive, increasing list of distances.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::ParameterDomain(format!("grid '{text}' is not start:stop:step"));
    let parts: Vec<f64> = text.split(':').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    check_distance(start)?;
    if !(step.is_finite() && step > 0.0 && stop.is_finite() && stop >= start) {
        return Err(Error::ParameterDomain(format!("grid '{text}' needs step > 0 and stop ≥ start")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::ParameterDomain(format!("grid '{text}' has {count} points")));
    }
    // rounding to 12 decimals keeps 0.1-type steps from printing as 0.30000000000000004
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}
