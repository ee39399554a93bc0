//! Executes resolved jobs: computes dimension profiles, runs the
//! requested consistency checks, and converts everything into the
//! serializable output model.

use std::collections::BTreeMap;

use crate::cohomology::{duality_report, inequality_check, Grading, Theory};
use crate::config::{CheckKind, Job};
use crate::dense::dense_theory_dims;
use crate::error::Result;
use crate::lattice::enumerate_orbits;
use crate::output::{
    CheckRecord, JobOutput, OrbitRecord, ProfileRecord, StructureFlags, VerdictRecord,
};
use crate::report::{
    aggregate, lefschetz_report, orientability_indicator, per_orbit_breakdown, table_at,
    DimensionProfile, OrbitBreakdown, Verdict, ORIENTABILITY_CAVEAT,
};
use crate::structures::Structures;

/// A completed run: the renderable output, plus whether any check
/// uncovered an internal inconsistency (as opposed to an expected
/// structural finding).
pub struct RunOutcome {
    pub output: JobOutput,
    pub internal_failure: bool,
}

fn matrix_strings(job: &Job) -> Vec<Vec<String>> {
    let n = job.matrix.n();
    (0..n)
        .map(|r| (0..n).map(|c| job.matrix.entry(r, c).to_string()).collect())
        .collect()
}

fn profile_record(profile: &DimensionProfile) -> ProfileRecord {
    ProfileRecord {
        theory: profile.theory,
        grading: profile.grading.to_string(),
        samples: profile.samples.iter().map(|(n, d)| (*n, d.to_string())).collect(),
        verdict: match &profile.verdict {
            Verdict::Stabilized(value) => {
                VerdictRecord::Stabilized { value: value.to_string() }
            }
            Verdict::Growing(differences) => VerdictRecord::Growing {
                differences: differences.iter().map(|d| d.to_string()).collect(),
            },
        },
    }
}

fn orbit_record(row: &OrbitBreakdown, with_dims: bool) -> OrbitRecord {
    let dims = if with_dims {
        Some(
            row.dims
                .iter()
                .map(|(theory, table)| {
                    (
                        theory.id().to_string(),
                        table
                            .iter()
                            .map(|(g, d)| (g.to_string(), d.to_string()))
                            .collect(),
                    )
                })
                .collect(),
        )
    } else {
        None
    };
    OrbitRecord {
        representative: row.orbit.representative().display(),
        size: row.orbit.size(),
        fiber_dims: row.fiber_dims.iter().map(|d| d.to_string()).collect(),
        dims,
    }
}

fn shell(job: &Job) -> JobOutput {
    JobOutput {
        matrix: matrix_strings(job),
        structures: StructureFlags { symplectic: job.symplectic, complex: job.complex },
        profiles: Vec::new(),
        checks: Vec::new(),
        orbits: None,
    }
}

/// Census listing: every orbit in the radius-max_n box with its size and
/// invariant fiber dimensions. Needs no structure validation.
pub fn run_orbits(job: &Job) -> Result<JobOutput> {
    let breakdown =
        per_orbit_breakdown(&job.matrix, &Structures::none(), job.max_n, &[])?;
    let mut output = shell(job);
    output.orbits = Some(breakdown.iter().map(|row| orbit_record(row, false)).collect());
    Ok(output)
}

/// Full run: aggregated profiles for the requested theories, the
/// requested checks, and optionally the per-orbit breakdown.
pub fn run_compute(job: &Job) -> Result<RunOutcome> {
    let structures = Structures::build(&job.matrix, job.symplectic, job.complex)?;
    let profiles = aggregate(&job.matrix, &structures, job.max_n, &job.theories, job.window)?;
    let checks = run_checks(job, &structures)?;
    let mut output = shell(job);
    output.profiles = profiles.iter().map(profile_record).collect();
    output.checks = checks;
    if job.per_orbit {
        let breakdown =
            per_orbit_breakdown(&job.matrix, &structures, job.max_n, &job.theories)?;
        output.orbits =
            Some(breakdown.iter().map(|row| orbit_record(row, true)).collect());
    }
    let internal_failure = any_failure(&output.checks);
    Ok(RunOutcome { output, internal_failure })
}

/// Checks only; the profile list stays empty. Each check computes the
/// dimension data it needs internally, so the result is independent of
/// which theories the job requested.
pub fn run_check(job: &Job) -> Result<RunOutcome> {
    let structures = Structures::build(&job.matrix, job.symplectic, job.complex)?;
    let checks = run_checks(job, &structures)?;
    let mut output = shell(job);
    output.checks = checks;
    let internal_failure = any_failure(&output.checks);
    Ok(RunOutcome { output, internal_failure })
}

fn any_failure(checks: &[CheckRecord]) -> bool {
    checks.iter().any(|c| c.status == "FAIL")
}

fn available_theories(structures: &Structures) -> Vec<Theory> {
    Theory::ALL
        .into_iter()
        .filter(|t| {
            (!t.needs_symplectic() || structures.symplectic.is_some())
                && (!t.needs_complex() || structures.complex.is_some())
        })
        .collect()
}

fn run_checks(job: &Job, structures: &Structures) -> Result<Vec<CheckRecord>> {
    let mut records = Vec::new();
    for &check in &job.checks {
        match check {
            CheckKind::Inequalities => check_inequalities(job, structures, &mut records)?,
            CheckKind::Dualities => check_dualities(job, structures, &mut records)?,
            CheckKind::Lefschetz => check_lefschetz(job, structures, &mut records)?,
            CheckKind::Orientability => check_orientability(job, structures, &mut records)?,
            CheckKind::DenseOracle => check_dense_oracle(job, structures, &mut records)?,
        }
    }
    Ok(records)
}

/// Finite-level inequalities, aggregated over the census: PASS only when
/// the inequality holds at every orbit and for the summed dimensions.
fn check_inequalities(
    job: &Job,
    structures: &Structures,
    records: &mut Vec<CheckRecord>,
) -> Result<()> {
    let mut totals: BTreeMap<(&'static str, Grading), (bool, usize, usize)> = BTreeMap::new();
    let orbits = enumerate_orbits(&job.matrix, job.max_n);
    for orbit in &orbits {
        for record in inequality_check(&job.matrix, orbit, structures)? {
            let entry = totals
                .entry((record.name, record.grading))
                .or_insert((true, 0, 0));
            entry.0 &= record.holds;
            entry.1 += record.lhs;
            entry.2 += record.rhs;
        }
    }
    for ((name, grading), (all_orbits_hold, lhs, rhs)) in totals {
        let holds = all_orbits_hold && lhs <= rhs;
        records.push(CheckRecord {
            name: name.to_string(),
            location: grading.to_string(),
            status: if holds { "PASS" } else { "FAIL" }.to_string(),
            detail: format!("{lhs} <= {rhs} summed over {} orbits", orbits.len()),
        });
    }
    Ok(())
}

/// Duality comparisons over the full sample run. A violated pairing is a
/// finding about the example, not an error, so both outcomes exit
/// cleanly.
fn check_dualities(
    job: &Job,
    structures: &Structures,
    records: &mut Vec<CheckRecord>,
) -> Result<()> {
    let mut needed = Vec::new();
    if structures.symplectic.is_some() {
        needed.extend([Theory::DdLambda, Theory::DPlusDLambda]);
    }
    if structures.complex.is_some() {
        needed.extend([Theory::Dolbeault, Theory::BottChern, Theory::Aeppli]);
    }
    let profiles = aggregate(&job.matrix, structures, job.max_n, &needed, job.window)?;
    for entry in duality_report(&profiles) {
        let fmt_samples = |samples: &[usize]| {
            samples.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
        };
        records.push(CheckRecord {
            name: entry.name.to_string(),
            location: format!(
                "{} {} vs {} {}",
                entry.left.0.id(),
                entry.left.1,
                entry.right.0.id(),
                entry.right.1
            ),
            status: if entry.holds { "HOLDS" } else { "VIOLATED" }.to_string(),
            detail: format!(
                "left {} | right {}",
                fmt_samples(&entry.left_samples),
                fmt_samples(&entry.right_samples)
            ),
        });
    }
    Ok(())
}

fn check_lefschetz(
    job: &Job,
    structures: &Structures,
    records: &mut Vec<CheckRecord>,
) -> Result<()> {
    let s = structures.require_symplectic()?;
    for row in lefschetz_report(&job.matrix, s, job.max_n)? {
        records.push(CheckRecord {
            name: "lefschetz".to_string(),
            location: format!("power {}", row.power),
            status: if row.epimorphism { "SURJECTIVE" } else { "NOT_SURJECTIVE" }
                .to_string(),
            detail: format!("rank {} of {}", row.rank, row.target_dim),
        });
    }
    Ok(())
}

fn check_orientability(
    job: &Job,
    structures: &Structures,
    records: &mut Vec<CheckRecord>,
) -> Result<()> {
    let profiles =
        aggregate(&job.matrix, structures, job.max_n, &[Theory::DeRham], job.window)?;
    if let Some(report) = orientability_indicator(&profiles) {
        let verdict = match &report.verdict {
            Verdict::Stabilized(v) => format!("stabilized at {v}"),
            Verdict::Growing(_) => "still growing".to_string(),
        };
        records.push(CheckRecord {
            name: "orientability".to_string(),
            location: format!("degree {}", report.top_degree),
            status: if report.orientable_at_truncation {
                "ORIENTABLE"
            } else {
                "NOT_ORIENTABLE"
            }
            .to_string(),
            detail: format!("{verdict}; {ORIENTABILITY_CAVEAT}"),
        });
    }
    Ok(())
}

/// Cross-checks the per-orbit totals against the direct-sum computation
/// at every radius up to min(2, max_n). A mismatch means one of the two
/// computation paths is wrong, so it fails hard.
fn check_dense_oracle(
    job: &Job,
    structures: &Structures,
    records: &mut Vec<CheckRecord>,
) -> Result<()> {
    let radius = job.max_n.min(2);
    let theories = available_theories(structures);
    let profiles = aggregate(&job.matrix, structures, radius, &theories, 1)?;
    for &theory in &theories {
        let mut mismatch = None;
        for n in 0..=radius {
            let table = table_at(&profiles, n);
            let dense = dense_theory_dims(&job.matrix, structures, n, theory)?;
            for (grading, dim) in dense {
                let orbit_sum = table.get(&(theory, grading)).copied().unwrap_or(0);
                if orbit_sum != dim && mismatch.is_none() {
                    mismatch = Some(format!(
                        "at {grading}, N={n}: orbit sum {orbit_sum}, direct sum {dim}"
                    ));
                }
            }
        }
        records.push(CheckRecord {
            name: "denseOracle".to_string(),
            location: format!("{} at N <= {radius}", theory.id()),
            status: if mismatch.is_none() { "PASS" } else { "FAIL" }.to_string(),
            detail: mismatch
                .unwrap_or_else(|| "orbit sums match the direct-sum computation".into()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, resolve, Overrides};
    use crate::error::Error;

    fn job(text: &str) -> Job {
        resolve(&parse_config(text).unwrap(), &Overrides::default()).unwrap()
    }

    #[test]
    fn orbits_listing_counts_the_census() {
        let output =
            run_orbits(&job("matrix = [[1, 1], [0, 1]]\nmax_n = 1\nwindow = 1")).unwrap();
        let orbits = output.orbits.unwrap();
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().all(|o| o.size == 1));
        assert!(orbits.iter().all(|o| o.fiber_dims == ["1", "1", "1"]));
        assert!(output.profiles.is_empty());
    }

    #[test]
    fn compute_produces_profiles_and_checks() {
        let outcome = run_compute(&job(
            "matrix = [[1, 1], [0, 1]]\nmax_n = 3\n[structures]\nsymplectic = true",
        ))
        .unwrap();
        assert!(!outcome.internal_failure);
        let output = &outcome.output;
        assert_eq!(output.profiles.len(), 4 * 3);
        assert!(output.checks.iter().any(|c| c.name == "froelicher" || c.name.contains("deRham")));
        assert!(output
            .checks
            .iter()
            .filter(|c| c.name == "denseOracle")
            .all(|c| c.status == "PASS"));
        let orientability = output
            .checks
            .iter()
            .find(|c| c.name == "orientability")
            .expect("orientability check present");
        assert_eq!(orientability.status, "NOT_ORIENTABLE");
        assert!(orientability.detail.contains(ORIENTABILITY_CAVEAT));
        let poincare: Vec<_> = output
            .checks
            .iter()
            .filter(|c| c.name.starts_with("poincare"))
            .collect();
        assert!(!poincare.is_empty());
        assert!(poincare.iter().all(|c| c.status == "HOLDS"));
    }

    #[test]
    fn check_runs_without_profiles() {
        let outcome = run_check(&job(
            "matrix = [[1, 1], [0, 1]]\nmax_n = 2\nwindow = 1\n[structures]\nsymplectic = true",
        ))
        .unwrap();
        assert!(outcome.output.profiles.is_empty());
        assert!(!outcome.output.checks.is_empty());
        assert!(!outcome.internal_failure);
    }

    #[test]
    fn structure_validation_happens_inside_compute() {
        let result = run_compute(&job(
            "matrix = [[1, 1], [0, 1]]\nmax_n = 2\nwindow = 1\n[structures]\ncomplex = true",
        ));
        assert!(matches!(result, Err(Error::NotComplexCompatible)));
    }

    #[test]
    fn per_orbit_breakdown_is_attached_on_request() {
        let outcome = run_compute(&job(
            "matrix = [[1, 1], [0, 1]]\nmax_n = 1\nwindow = 1\n[output]\nper_orbit = true",
        ))
        .unwrap();
        let orbits = outcome.output.orbits.unwrap();
        assert_eq!(orbits.len(), 3);
        for orbit in &orbits {
            let dims = orbit.dims.as_ref().unwrap();
            assert!(dims.contains_key("deRham"));
        }
    }

    #[test]
    fn bott_chern_aeppli_duality_is_reported_violated_for_the_block_shear() {
        let outcome = run_check(&job(
            "matrix = [[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]]\nmax_n = 2\nwindow = 1\n[structures]\ncomplex = true",
        ))
        .unwrap();
        assert!(!outcome.internal_failure, "violated dualities are findings, not failures");
        let violated: Vec<_> = outcome
            .output
            .checks
            .iter()
            .filter(|c| c.status == "VIOLATED")
            .collect();
        assert!(violated.iter().any(|c| c.name == "bottChern_vs_aeppli"));
        assert!(violated.iter().any(|c| c.name == "serre_dolbeault"));
        assert!(outcome
            .output
            .checks
            .iter()
            .filter(|c| c.name == "denseOracle")
            .all(|c| c.status == "PASS"));
    }
}
