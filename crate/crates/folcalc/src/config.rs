//! Job configuration: the TOML file format, command-line overrides, and
//! the validation that turns a raw config into a runnable job.

use clap::ValueEnum;
use serde::Deserialize;

use crate::cohomology::Theory;
use crate::error::{Error, Result};
use crate::lattice::{from_int_rows, UnimodularMatrix};

/// Structural consistency checks a job can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CheckKind {
    Inequalities,
    Dualities,
    Lefschetz,
    Orientability,
    DenseOracle,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Inequalities,
        CheckKind::Dualities,
        CheckKind::Lefschetz,
        CheckKind::Orientability,
        CheckKind::DenseOracle,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CheckKind::Inequalities => "inequalities",
            CheckKind::Dualities => "dualities",
            CheckKind::Lefschetz => "lefschetz",
            CheckKind::Orientability => "orientability",
            CheckKind::DenseOracle => "denseOracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Table,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureRequest {
    #[serde(default)]
    pub symplectic: bool,
    #[serde(default)]
    pub complex: bool,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub per_orbit: bool,
}

fn default_max_n() -> u32 {
    4
}

fn default_window() -> usize {
    3
}

/// The on-disk job description. Unknown keys are rejected so that typos
/// fail loudly instead of silently falling back to defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub structures: StructureRequest,
    #[serde(default = "default_max_n")]
    pub max_n: u32,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub theories: Option<Vec<Theory>>,
    #[serde(default)]
    pub checks: Option<Vec<CheckKind>>,
    #[serde(default)]
    pub output: OutputConfig,
}

pub fn parse_config(text: &str) -> Result<JobConfig> {
    toml::from_str(text).map_err(|e| Error::InvalidInput { detail: e.to_string() })
}

/// Command-line overrides layered on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub format: Option<OutputFormat>,
    pub max_n: Option<u32>,
    pub window: Option<usize>,
    pub per_orbit: bool,
}

/// A validated, fully resolved job.
#[derive(Debug, Clone)]
pub struct Job {
    pub matrix: UnimodularMatrix,
    pub symplectic: bool,
    pub complex: bool,
    pub max_n: u32,
    pub window: usize,
    pub theories: Vec<Theory>,
    pub checks: Vec<CheckKind>,
    pub format: OutputFormat,
    pub per_orbit: bool,
}

fn dedup_in_order<T: PartialEq + Copy>(items: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    for &item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

/// Validates the config against the requested structures and applies the
/// command-line overrides. Everything rejected here is an input error;
/// whether the matrix actually carries the requested structures is
/// checked later, when the structures are built.
pub fn resolve(config: &JobConfig, overrides: &Overrides) -> Result<Job> {
    let matrix = from_int_rows(&config.matrix)?;
    let symplectic = config.structures.symplectic;
    let complex = config.structures.complex;
    let max_n = overrides.max_n.unwrap_or(config.max_n);
    let window = overrides.window.unwrap_or(config.window);
    let format = overrides.format.unwrap_or(config.output.format);
    let per_orbit = config.output.per_orbit || overrides.per_orbit;

    if window < 1 {
        return Err(Error::InvalidInput {
            detail: "window must be at least 1".into(),
        });
    }
    if window > max_n as usize + 1 {
        return Err(Error::InvalidInput {
            detail: format!(
                "window {window} exceeds the {} available samples (max_n = {max_n})",
                max_n + 1
            ),
        });
    }

    let theories = match &config.theories {
        Some(list) => {
            for &theory in list {
                if theory.needs_symplectic() && !symplectic {
                    return Err(Error::InvalidInput {
                        detail: format!(
                            "theory {theory} needs structures.symplectic = true"
                        ),
                    });
                }
                if theory.needs_complex() && !complex {
                    return Err(Error::InvalidInput {
                        detail: format!("theory {theory} needs structures.complex = true"),
                    });
                }
            }
            dedup_in_order(list)
        }
        None => Theory::ALL
            .into_iter()
            .filter(|t| {
                (!t.needs_symplectic() || symplectic) && (!t.needs_complex() || complex)
            })
            .collect(),
    };

    let checks = match &config.checks {
        Some(list) => {
            for &check in list {
                match check {
                    CheckKind::Lefschetz if !symplectic => {
                        return Err(Error::InvalidInput {
                            detail: "check lefschetz needs structures.symplectic = true"
                                .into(),
                        });
                    }
                    CheckKind::Inequalities | CheckKind::Dualities
                        if !symplectic && !complex =>
                    {
                        return Err(Error::InvalidInput {
                            detail: format!(
                                "check {} needs at least one structure",
                                check.id()
                            ),
                        });
                    }
                    _ => {}
                }
            }
            dedup_in_order(list)
        }
        None => CheckKind::ALL
            .into_iter()
            .filter(|c| match c {
                CheckKind::Lefschetz => symplectic,
                CheckKind::Inequalities | CheckKind::Dualities => symplectic || complex,
                CheckKind::Orientability | CheckKind::DenseOracle => true,
            })
            .collect(),
    };

    Ok(Job {
        matrix,
        symplectic,
        complex,
        max_n,
        window,
        theories,
        checks,
        format,
        per_orbit,
    })
}
