//! Serializable results model and the three renderers. Every dimension
//! is carried as a decimal string so arbitrarily large values survive
//! any JSON consumer unchanged, and all collections are ordered, so a
//! given job renders byte-identically on every run.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cohomology::Theory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub symplectic: bool,
    pub complex: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VerdictRecord {
    Stabilized { value: String },
    Growing { differences: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub theory: Theory,
    pub grading: String,
    pub samples: Vec<(u32, String)>,
    pub verdict: VerdictRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub location: String,
    pub status: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub representative: String,
    pub size: usize,
    pub fiber_dims: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dims: Option<BTreeMap<String, BTreeMap<String, String>>>,
}

/// Everything one invocation reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobOutput {
    pub matrix: Vec<Vec<String>>,
    pub structures: StructureFlags,
    pub profiles: Vec<ProfileRecord>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orbits: Option<Vec<OrbitRecord>>,
}

pub fn to_json(output: &JobOutput) -> Result<String> {
    let mut text = serde_json::to_string_pretty(output).map_err(|e| Error::InvalidInput {
        detail: format!("serialization failed: {e}"),
    })?;
    text.push('\n');
    Ok(text)
}

/// CSV rendering picks the most detailed table present: dimension
/// profiles first, otherwise the orbit census, otherwise the check
/// results.
pub fn to_csv(output: &JobOutput) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::InvalidInput {
        detail: format!("csv rendering failed: {e}"),
    };
    if !output.profiles.is_empty() {
        writer.write_record(["theory", "grading", "N", "dimension"]).map_err(fail)?;
        for profile in &output.profiles {
            for (n, dim) in &profile.samples {
                writer
                    .write_record([
                        profile.theory.id(),
                        &profile.grading,
                        &n.to_string(),
                        dim,
                    ])
                    .map_err(fail)?;
            }
        }
    } else if let Some(orbits) = &output.orbits {
        writer.write_record(["representative", "size", "fiber_dims"]).map_err(fail)?;
        for orbit in orbits {
            writer
                .write_record([
                    orbit.representative.as_str(),
                    &orbit.size.to_string(),
                    &orbit.fiber_dims.join(" "),
                ])
                .map_err(fail)?;
        }
    } else {
        writer.write_record(["name", "location", "status", "detail"]).map_err(fail)?;
        for check in &output.checks {
            writer
                .write_record([&check.name, &check.location, &check.status, &check.detail])
                .map_err(fail)?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::InvalidInput {
        detail: format!("csv rendering failed: {e}"),
    })?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput {
        detail: format!("csv rendering produced invalid text: {e}"),
    })
}

fn verdict_text(verdict: &VerdictRecord) -> String {
    match verdict {
        VerdictRecord::Stabilized { value } => format!("stabilized at {value}"),
        VerdictRecord::Growing { differences } => {
            format!("growing, differences [{}]", differences.join(", "))
        }
    }
}

/// Plain-text rendering for terminals: the matrix, one profile line per
/// grading with the verdict, a (p,q) grid at the largest radius for each
/// bigraded theory, then checks and the orbit census when present.
pub fn to_table(output: &JobOutput) -> String {
    let mut text = String::new();
    text.push_str("matrix:\n");
    for row in &output.matrix {
        let _ = writeln!(text, "  [{}]", row.join(", "));
    }
    let _ = writeln!(
        text,
        "structures: symplectic={}, complex={}",
        output.structures.symplectic, output.structures.complex
    );

    if !output.profiles.is_empty() {
        text.push('\n');
        text.push_str("profiles (dimension by truncation radius N):\n");
        let mut current: Option<Theory> = None;
        for profile in &output.profiles {
            if current != Some(profile.theory) {
                let _ = writeln!(text, "  {}:", profile.theory.id());
                current = Some(profile.theory);
            }
            let samples: Vec<&str> =
                profile.samples.iter().map(|(_, d)| d.as_str()).collect();
            let _ = writeln!(
                text,
                "    {}: {} | {}",
                profile.grading,
                samples.join(" "),
                verdict_text(&profile.verdict)
            );
        }
        for section in bigraded_grids(output) {
            text.push('\n');
            text.push_str(&section);
        }
    }

    if !output.checks.is_empty() {
        text.push('\n');
        text.push_str("checks:\n");
        for check in &output.checks {
            let _ = write!(text, "  {} {}: {}", check.name, check.location, check.status);
            if check.detail.is_empty() {
                text.push('\n');
            } else {
                let _ = writeln!(text, " ({})", check.detail);
            }
        }
    }

    if let Some(orbits) = &output.orbits {
        text.push('\n');
        let _ = writeln!(text, "orbits ({}):", orbits.len());
        for orbit in orbits {
            let _ = write!(
                text,
                "  {} size={} fibers=[{}]",
                orbit.representative,
                orbit.size,
                orbit.fiber_dims.join(", ")
            );
            text.push('\n');
            if let Some(dims) = &orbit.dims {
                for (theory, table) in dims {
                    let cells: Vec<String> =
                        table.iter().map(|(g, d)| format!("{g}={d}")).collect();
                    let _ = writeln!(text, "    {theory}: {}", cells.join(" "));
                }
            }
        }
    }

    text
}

/// One grid per bigraded theory at the largest sampled radius, rows q
/// ascending top to bottom, columns p ascending left to right.
fn bigraded_grids(output: &JobOutput) -> Vec<String> {
    let mut per_theory: BTreeMap<Theory, BTreeMap<(usize, usize), &str>> = BTreeMap::new();
    let mut last_n = 0;
    for profile in &output.profiles {
        let Some(pq) = parse_bidegree(&profile.grading) else { continue };
        let Some((n, dim)) = profile.samples.last() else { continue };
        last_n = (*n).max(last_n);
        per_theory.entry(profile.theory).or_default().insert(pq, dim);
    }
    let mut sections = Vec::new();
    for (theory, cells) in per_theory {
        let m = cells.keys().map(|(p, q)| (*p).max(*q)).max().unwrap_or(0);
        let mut widths = vec![1usize; m + 1];
        for ((p, _), dim) in &cells {
            widths[*p] = widths[*p].max(dim.len());
        }
        let mut section = format!(
            "{} at N={} (rows q ascending, columns p ascending):\n",
            theory.id(),
            last_n
        );
        for q in 0..=m {
            let _ = write!(section, "  q={q}:");
            for p in 0..=m {
                let dim = cells.get(&(p, q)).copied().unwrap_or("?");
                let _ = write!(section, " {dim:>width$}", width = widths[p]);
            }
            section.push('\n');
        }
        sections.push(section);
    }
    sections
}

fn parse_bidegree(grading: &str) -> Option<(usize, usize)> {
    let inner = grading.strip_prefix('(')?.strip_suffix(')')?;
    let (p, q) = inner.split_once(',')?;
    Some((p.trim().parse().ok()?, q.trim().parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_output() -> JobOutput {
        JobOutput {
            matrix: vec![
                vec!["1".into(), "1".into()],
                vec!["0".into(), "1".into()],
            ],
            structures: StructureFlags { symplectic: true, complex: false },
            profiles: vec![
                ProfileRecord {
                    theory: Theory::DeRham,
                    grading: "0".into(),
                    samples: vec![(0, "1".into()), (1, "1".into()), (2, "1".into())],
                    verdict: VerdictRecord::Stabilized { value: "1".into() },
                },
                ProfileRecord {
                    theory: Theory::DeRham,
                    grading: "2".into(),
                    samples: vec![(0, "1".into()), (1, "3".into()), (2, "5".into())],
                    verdict: VerdictRecord::Growing {
                        differences: vec!["2".into(), "2".into()],
                    },
                },
            ],
            checks: vec![CheckRecord {
                name: "orientability".into(),
                location: "degree 2".into(),
                status: "NOT_ORIENTABLE".into(),
                detail: "top profile still growing".into(),
            }],
            orbits: None,
        }
    }

    #[test]
    fn json_round_trips() {
        let output = sample_output();
        let text = to_json(&output).unwrap();
        let back: JobOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(back, output);
        assert!(text.ends_with('\n'));
        assert!(text.contains("\"deRham\""));
        assert!(text.contains("\"kind\": \"growing\""));
    }

    #[test]
    fn csv_prefers_profiles_and_counts_rows() {
        let output = sample_output();
        let text = to_csv(&output).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theory,grading,N,dimension"));
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(text.contains("deRham,2,1,3"));
    }

    #[test]
    fn csv_falls_back_to_orbits_then_checks() {
        let mut output = sample_output();
        output.profiles.clear();
        output.orbits = Some(vec![OrbitRecord {
            representative: "(0, 1)".into(),
            size: 1,
            fiber_dims: vec!["1".into(), "1".into(), "1".into()],
            dims: None,
        }]);
        let text = to_csv(&output).unwrap();
        assert_eq!(text.lines().next(), Some("representative,size,fiber_dims"));
        assert!(text.contains("\"(0, 1)\",1,1 1 1"));

        output.orbits = None;
        let text = to_csv(&output).unwrap();
        assert_eq!(text.lines().next(), Some("name,location,status,detail"));
        assert!(text.contains("orientability,degree 2,NOT_ORIENTABLE"));
    }

    #[test]
    fn table_is_deterministic_and_readable() {
        let output = sample_output();
        let once = to_table(&output);
        let twice = to_table(&output);
        assert_eq!(once, twice);
        assert!(once.contains("matrix:"));
        assert!(once.contains("  [1, 1]"));
        assert!(once.contains("2: 1 3 5 | growing, differences [2, 2]"));
        assert!(once.contains("orientability degree 2: NOT_ORIENTABLE"));
    }

    #[test]
    fn bigraded_profiles_render_a_grid() {
        let mut output = sample_output();
        output.profiles = vec![
            ProfileRecord {
                theory: Theory::Dolbeault,
                grading: "(0,0)".into(),
                samples: vec![(0, "1".into())],
                verdict: VerdictRecord::Stabilized { value: "1".into() },
            },
            ProfileRecord {
                theory: Theory::Dolbeault,
                grading: "(0,1)".into(),
                samples: vec![(0, "2".into())],
                verdict: VerdictRecord::Stabilized { value: "2".into() },
            },
            ProfileRecord {
                theory: Theory::Dolbeault,
                grading: "(1,0)".into(),
                samples: vec![(0, "3".into())],
                verdict: VerdictRecord::Stabilized { value: "3".into() },
            },
            ProfileRecord {
                theory: Theory::Dolbeault,
                grading: "(1,1)".into(),
                samples: vec![(0, "4".into())],
                verdict: VerdictRecord::Stabilized { value: "4".into() },
            },
        ];
        let text = to_table(&output);
        assert!(text.contains("dolbeault at N=0"));
        assert!(text.contains("q=0: 1 3"));
        assert!(text.contains("q=1: 2 4"));
    }
}
