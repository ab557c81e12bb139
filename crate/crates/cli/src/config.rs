//! Run configuration from a flat TOML file plus command-line overrides.
//!
//! ```toml
//! units = "ghz"          # or "omega1" (the default)
//! omega1 = 4.0
//! omega2 = 5.0
//! qubit1 = 3.996
//! qubit2 = 4.995
//! g1 = 0.16
//! g2 = 0.2
//! lambda = 0.004
//! initial_state = "0,e,2,g"
//! tau_max = 100
//! tau_step = 0.05
//! ```
//!
//! A `preset` key (or `--preset`) fills every physical key; explicit keys
//! still override it. In `omega1` units `omega1` may be left out.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cavity_duet_core::analytic::MAX_PHOTONS;
use cavity_duet_core::presets::{Figure, DEFAULT_STEP, INITIAL_KET, TABLE_TAU_MAX};
use cavity_duet_core::{BasisKet, Level, SimParams};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Figure(Figure),
    Table,
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "table" => Ok(Preset::Table),
            _ => Figure::from_name(s).map(Preset::Figure).ok_or_else(|| {
                CliError::Validation(format!("unknown preset `{s}` (fig1, fig2, fig3, table)"))
            }),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Figure(fig) => f.write_str(fig.name()),
            Preset::Table => f.write_str("table"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// Multiples of the cavity-one frequency.
    #[default]
    Omega1,
    /// `omega / 2 pi` in GHz.
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outputs {
    pub csv: bool,
    pub svg: bool,
    pub coeffs: bool,
}

/// Raw file contents. Every key is optional so presets can fill the gaps.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub units: Option<Units>,
    pub preset: Option<String>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub qubit1: Option<f64>,
    pub qubit2: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub lambda: Option<f64>,
    pub initial_state: Option<String>,
    pub tau_max: Option<f64>,
    pub tau_step: Option<f64>,
    pub csv: Option<bool>,
    pub svg: Option<bool>,
    pub coeffs: Option<bool>,
}

impl ConfigFile {
    /// Parse errors carry the line and column of the offending key.
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub tau_max: Option<f64>,
    pub tau_step: Option<f64>,
    pub csv: bool,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub initial_state: BasisKet,
    pub tau_max: f64,
    pub tau_step: f64,
    pub outputs: Outputs,
    pub preset: Option<Preset>,
}

impl RunConfig {
    /// Configuration of a figure preset with its default window.
    pub fn for_figure(fig: Figure) -> Self {
        Self {
            params: fig.params(),
            initial_state: INITIAL_KET,
            tau_max: fig.tau_max(),
            tau_step: DEFAULT_STEP,
            outputs: Outputs::default(),
            preset: Some(Preset::Figure(fig)),
        }
    }

    pub fn resolve(file: &ConfigFile, over: &Overrides) -> CliResult<Self> {
        let preset = match (over.preset, &file.preset) {
            (Some(p), _) => Some(p),
            (None, Some(name)) => Some(name.parse()?),
            (None, None) => None,
        };
        let base = match preset {
            Some(Preset::Figure(fig)) => Some(Self::for_figure(fig)),
            Some(Preset::Table) => Some(Self {
                tau_max: TABLE_TAU_MAX,
                ..Self::for_figure(Figure::Fig1)
            }),
            None => None,
        };

        let units = file.units.unwrap_or_default();
        let omega1 = match (units, file.omega1) {
            (_, Some(w)) => w,
            (Units::Omega1, None) => 1.0,
            (Units::Ghz, None) => {
                let physical = [
                    file.omega2,
                    file.qubit1,
                    file.qubit2,
                    file.g1,
                    file.g2,
                    file.lambda,
                ];
                if physical.iter().any(Option::is_some) {
                    return Err(CliError::Validation(
                        "`units = \"ghz\"` needs `omega1`".into(),
                    ));
                }
                1.0
            }
        };
        if !(omega1.is_finite() && omega1 > 0.0) {
            return Err(CliError::Validation("omega1 must be positive".into()));
        }
        let scaled = |v: Option<f64>| v.map(|x| x / omega1);
        let from_base = |pick: fn(&SimParams) -> f64| base.as_ref().map(|b| pick(&b.params));
        let field = |name: &str, v: Option<f64>, fallback: Option<f64>| {
            scaled(v).or(fallback).ok_or_else(|| {
                CliError::Validation(format!("`{name}` is required without a preset"))
            })
        };
        let params = SimParams::new(
            1.0,
            field("omega2", file.omega2, from_base(|p| p.omega2))?,
            field("qubit1", file.qubit1, from_base(|p| p.qubit1))?,
            field("qubit2", file.qubit2, from_base(|p| p.qubit2))?,
            field("g1", file.g1, from_base(|p| p.g1))?,
            field("g2", file.g2, from_base(|p| p.g2))?,
            field("lambda", file.lambda, from_base(|p| p.lambda))?,
        )?;

        let initial_state = match &file.initial_state {
            Some(s) => parse_ket(s)?,
            None => INITIAL_KET,
        };
        let tau_max = over
            .tau_max
            .or(file.tau_max)
            .or(base.as_ref().map(|b| b.tau_max))
            .ok_or_else(|| CliError::Validation("`tau_max` is required without a preset".into()))?;
        let tau_step = over.tau_step.or(file.tau_step).unwrap_or(DEFAULT_STEP);
        let outputs = Outputs {
            csv: over.csv || file.csv.unwrap_or(false),
            svg: over.svg || file.svg.unwrap_or(false),
            coeffs: file.coeffs.unwrap_or(false),
        };
        let config = Self {
            params,
            initial_state,
            tau_max,
            tau_step,
            outputs,
            preset,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.tau_step.is_finite() && self.tau_step > 0.0) {
            return Err(CliError::Validation("tau_step must be positive".into()));
        }
        if !(self.tau_max.is_finite() && self.tau_max >= self.tau_step) {
            return Err(CliError::Validation(
                "tau_max must be at least tau_step".into(),
            ));
        }
        if self.tau_max / self.tau_step > 1e7 {
            return Err(CliError::Validation("grid has more than 1e7 points".into()));
        }
        if self.initial_state.m_total() > MAX_PHOTONS {
            return Err(CliError::Validation(format!(
                "initial state {} exceeds {MAX_PHOTONS} excitations",
                self.initial_state
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        cavity_duet_core::presets::uniform_grid(self.tau_max, self.tau_step)
    }

    /// Base name for output files.
    pub fn stem(&self) -> String {
        match self.preset {
            Some(p) => p.to_string(),
            None => "run".into(),
        }
    }

    pub fn output_path(&self, dir: &Path, ext: &str) -> PathBuf {
        dir.join(format!("{}.{ext}", self.stem()))
    }
}

/// `"n1,s1,n2,s2"` with levels written `g` or `e`, e.g. `"0,e,2,g"`.
pub fn parse_ket(s: &str) -> CliResult<BasisKet> {
    let bad = || {
        CliError::Validation(format!(
            "initial_state `{s}` is not of the form \"0,e,2,g\""
        ))
    };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n1, s1, n2, s2] = parts.as_slice() else {
        return Err(bad());
    };
    let level = |t: &str| match t {
        "g" => Ok(Level::Ground),
        "e" => Ok(Level::Excited),
        _ => Err(bad()),
    };
    let count = |t: &str| t.parse::<u32>().map_err(|_| bad());
    Ok(BasisKet::new(
        count(n1)?,
        level(s1)?,
        count(n2)?,
        level(s2)?,
    ))
}
