//! Aggregation of per-orbit dimensions across Fourier truncations, growth
//! classification, and the derived structural indicators (orientability,
//! hard-Lefschetz surjectivity, per-orbit breakdowns).

use std::collections::BTreeMap;

use crate::cohomology::{Grading, OrbitEngines, Theory};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_orbits, LatticeOrbit, LatticeVector, UnimodularMatrix};
use crate::linalg::rank;
use crate::structures::{lefschetz_operator, Structures, SymplecticData};

/// What a dimension sequence does as the truncation radius grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The last `window` samples agree on this value.
    Stabilized(usize),
    /// Still moving; carries the first differences of the whole sample run.
    Growing(Vec<i64>),
}

/// Dimension samples of one theory at one grading, over truncations
/// N = 0, 1, ..., with the growth verdict for the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionProfile {
    pub theory: Theory,
    pub grading: Grading,
    pub samples: Vec<(u32, usize)>,
    pub verdict: Verdict,
}

/// Classifies a sample run: stabilized when the trailing `window` values
/// agree, growing otherwise. Needs at least `window` samples.
pub fn classify_growth(samples: &[(u32, usize)], window: usize) -> Result<Verdict> {
    if samples.len() < window {
        return Err(Error::InsufficientSamples { have: samples.len(), need: window });
    }
    let tail = &samples[samples.len() - window..];
    if tail.iter().all(|(_, d)| *d == tail[0].1) {
        return Ok(Verdict::Stabilized(tail[0].1));
    }
    let differences = samples
        .windows(2)
        .map(|w| w[1].1 as i64 - w[0].1 as i64)
        .collect();
    Ok(Verdict::Growing(differences))
}

/// The gradings a theory is reported at on an n-torus: degrees 0..=n for
/// the single-graded theories, the full (p,q) square for the bigraded
/// ones.
pub fn grading_grid(n: usize, theory: Theory) -> Vec<Grading> {
    if theory.is_bigraded() {
        let m = n / 2;
        let mut grid = Vec::with_capacity((m + 1) * (m + 1));
        for p in 0..=m {
            for q in 0..=m {
                grid.push(Grading::Bidegree(p, q));
            }
        }
        grid
    } else {
        (0..=n).map(Grading::Degree).collect()
    }
}

/// Sums per-orbit dimensions over every orbit whose representative lies
/// in the radius-N box, for each N up to `n_max`, and classifies each
/// run. Orbit data is computed once at the largest radius; the censuses
/// nest, so smaller radii are obtained by filtering representatives.
pub fn aggregate(
    a: &UnimodularMatrix,
    structures: &Structures,
    n_max: u32,
    theories: &[Theory],
    window: usize,
) -> Result<Vec<DimensionProfile>> {
    let orbits = enumerate_orbits(a, n_max);
    let mut engines: Vec<(LatticeVector, OrbitEngines)> = Vec::with_capacity(orbits.len());
    for orbit in &orbits {
        engines.push((
            orbit.representative().clone(),
            OrbitEngines::build(a, orbit, structures)?,
        ));
    }

    let mut profiles = Vec::new();
    for &theory in theories {
        let mut tables: Vec<(&LatticeVector, BTreeMap<Grading, usize>)> =
            Vec::with_capacity(engines.len());
        for (rep, engine) in &engines {
            tables.push((rep, engine.dims(theory)?));
        }
        for grading in grading_grid(a.n(), theory) {
            let mut samples = Vec::with_capacity(n_max as usize + 1);
            for n in 0..=n_max {
                let total: usize = tables
                    .iter()
                    .filter(|(rep, _)| rep.in_box(n))
                    .map(|(_, dims)| dims.get(&grading).copied().unwrap_or(0))
                    .sum();
                samples.push((n, total));
            }
            for pair in samples.windows(2) {
                if pair[1].1 < pair[0].1 {
                    return Err(Error::PropertyViolation {
                        detail: format!(
                            "dimension of {theory} at {grading} dropped from {} to {} \
                             between N={} and N={}",
                            pair[0].1, pair[1].1, pair[0].0, pair[1].0
                        ),
                    });
                }
            }
            let verdict = classify_growth(&samples, window)?;
            profiles.push(DimensionProfile { theory, grading, samples, verdict });
        }
    }
    Ok(profiles)
}

/// The dimension table at one truncation radius, keyed by theory and
/// grading. Profiles without a sample at that radius are skipped.
pub fn table_at(
    profiles: &[DimensionProfile],
    n: u32,
) -> BTreeMap<(Theory, Grading), usize> {
    let mut out = BTreeMap::new();
    for p in profiles {
        if let Some((_, d)) = p.samples.iter().find(|(radius, _)| *radius == n) {
            out.insert((p.theory, p.grading), *d);
        }
    }
    out
}

pub const ORIENTABILITY_CAVEAT: &str =
    "stabilization at a finite truncation is evidence, not a proof";

/// Orientability indicator read off the top-degree de Rham profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientabilityReport {
    pub top_degree: usize,
    pub orientable_at_truncation: bool,
    pub verdict: Verdict,
}

/// Reads the top-degree de Rham profile: a run stabilized at one signals
/// a transversely orientable example at the sampled radii. Returns `None`
/// if no de Rham profile is present.
pub fn orientability_indicator(profiles: &[DimensionProfile]) -> Option<OrientabilityReport> {
    let top = profiles
        .iter()
        .filter(|p| p.theory == Theory::DeRham)
        .filter_map(|p| match p.grading {
            Grading::Degree(k) => Some((k, p)),
            Grading::Bidegree(..) => None,
        })
        .max_by_key(|(k, _)| *k)?;
    let (top_degree, profile) = top;
    Some(OrientabilityReport {
        top_degree,
        orientable_at_truncation: profile.verdict == Verdict::Stabilized(1),
        verdict: profile.verdict.clone(),
    })
}

/// Aggregate rank data for one wedge power of the symplectic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzRow {
    pub power: usize,
    pub rank: usize,
    pub target_dim: usize,
    pub epimorphism: bool,
}

/// For each power k, wedging with the k-th power of the symplectic form
/// maps invariant forms of degree m-k to degree m+k. Reports the summed
/// rank against the summed target dimension over the radius-n census;
/// `epimorphism` holds only when the map is onto at every single orbit.
pub fn lefschetz_report(
    a: &UnimodularMatrix,
    s: &SymplecticData,
    n: u32,
) -> Result<Vec<LefschetzRow>> {
    let orbits = enumerate_orbits(a, n);
    let m = s.m();
    let mut rows = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let mut total_rank = 0;
        let mut total_target = 0;
        let mut onto_everywhere = true;
        for orbit in &orbits {
            let op = lefschetz_operator(a, orbit, s, k)?;
            let r = rank(&op);
            total_rank += r;
            total_target += op.rows();
            if r < op.rows() {
                onto_everywhere = false;
            }
        }
        rows.push(LefschetzRow {
            power: k,
            rank: total_rank,
            target_dim: total_target,
            epimorphism: onto_everywhere,
        });
    }
    Ok(rows)
}

/// Per-orbit dimension data for the census listing.
#[derive(Debug, Clone)]
pub struct OrbitBreakdown {
    pub orbit: LatticeOrbit,
    pub fiber_dims: Vec<usize>,
    pub dims: BTreeMap<Theory, BTreeMap<Grading, usize>>,
}

/// Computes, for every orbit in the radius-n census, the invariant fiber
/// dimensions and the requested per-orbit cohomology tables.
pub fn per_orbit_breakdown(
    a: &UnimodularMatrix,
    structures: &Structures,
    n: u32,
    theories: &[Theory],
) -> Result<Vec<OrbitBreakdown>> {
    let mut out = Vec::new();
    for orbit in enumerate_orbits(a, n) {
        let engine = OrbitEngines::build(a, &orbit, structures)?;
        let fiber_dims = engine.fiber_dims();
        let mut dims = BTreeMap::new();
        for &theory in theories {
            dims.insert(theory, engine.dims(theory)?);
        }
        out.push(OrbitBreakdown { orbit, fiber_dims, dims });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::from_int_rows;
    use crate::structures::check_symplectic;

    fn shear2() -> UnimodularMatrix {
        from_int_rows(&[vec![1, 1], vec![0, 1]]).unwrap()
    }

    fn shear4() -> UnimodularMatrix {
        from_int_rows(&[
            vec![1, 0, 1, 0],
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        ])
        .unwrap()
    }

    fn run(samples: &[usize]) -> Vec<(u32, usize)> {
        samples.iter().enumerate().map(|(n, d)| (n as u32, *d)).collect()
    }

    #[test]
    fn classify_growth_detects_stabilization_and_growth() {
        assert_eq!(
            classify_growth(&run(&[1, 1, 1, 1]), 3).unwrap(),
            Verdict::Stabilized(1)
        );
        assert_eq!(
            classify_growth(&run(&[1, 3, 5, 7]), 3).unwrap(),
            Verdict::Growing(vec![2, 2, 2])
        );
        assert_eq!(
            classify_growth(&run(&[9, 25, 49]), 3).unwrap(),
            Verdict::Growing(vec![16, 24])
        );
        assert!(matches!(
            classify_growth(&run(&[1, 1]), 3),
            Err(Error::InsufficientSamples { have: 2, need: 3 })
        ));
    }

    #[test]
    fn grading_grid_shapes() {
        assert_eq!(grading_grid(2, Theory::DeRham).len(), 3);
        assert_eq!(grading_grid(4, Theory::DdLambda).len(), 5);
        assert_eq!(grading_grid(4, Theory::Dolbeault).len(), 9);
        assert_eq!(grading_grid(4, Theory::Dolbeault)[0], Grading::Bidegree(0, 0));
    }

    fn profile<'a>(
        profiles: &'a [DimensionProfile],
        theory: Theory,
        grading: Grading,
    ) -> &'a DimensionProfile {
        profiles
            .iter()
            .find(|p| p.theory == theory && p.grading == grading)
            .expect("profile present")
    }

    #[test]
    fn shear_aggregates_match_closed_forms() {
        let a = shear2();
        let structures = Structures::build(&a, true, false).unwrap();
        let theories = [
            Theory::DeRham,
            Theory::DLambda,
            Theory::DdLambda,
            Theory::DPlusDLambda,
        ];
        let profiles = aggregate(&a, &structures, 3, &theories, 3).unwrap();
        assert_eq!(profiles.len(), 4 * 3);

        let growing: Vec<(u32, usize)> = (0..=3).map(|n| (n, 2 * n as usize + 1)).collect();
        let ones: Vec<(u32, usize)> = (0..=3).map(|n| (n, 1)).collect();

        let expect = [
            (Theory::DeRham, 0, ones.clone()),
            (Theory::DeRham, 1, ones.clone()),
            (Theory::DeRham, 2, growing.clone()),
            (Theory::DLambda, 0, growing.clone()),
            (Theory::DLambda, 1, ones.clone()),
            (Theory::DLambda, 2, ones.clone()),
            (Theory::DdLambda, 0, growing.clone()),
            (Theory::DdLambda, 1, ones.clone()),
            (Theory::DdLambda, 2, growing.clone()),
            (Theory::DPlusDLambda, 0, ones.clone()),
            (Theory::DPlusDLambda, 1, growing.clone()),
            (Theory::DPlusDLambda, 2, ones.clone()),
        ];
        for (theory, degree, samples) in expect {
            let p = profile(&profiles, theory, Grading::Degree(degree));
            assert_eq!(p.samples, samples, "{theory} degree {degree}");
            let stabilized = samples.iter().all(|(_, d)| *d == 1);
            match (&p.verdict, stabilized) {
                (Verdict::Stabilized(1), true) => {}
                (Verdict::Growing(diffs), false) => assert_eq!(diffs, &vec![2, 2, 2]),
                other => panic!("unexpected verdict for {theory} degree {degree}: {other:?}"),
            }
        }
    }

    #[test]
    fn block_shear_aggregates_match_closed_forms() {
        let a = shear4();
        let structures = Structures::build(&a, false, true).unwrap();
        let theories = [Theory::DeRham, Theory::Dolbeault, Theory::BottChern, Theory::Aeppli];
        let profiles = aggregate(&a, &structures, 2, &theories, 3).unwrap();

        let squares: Vec<(u32, usize)> =
            (0..=2).map(|n| (n, (2 * n as usize + 1).pow(2))).collect();
        let squares_plus_3: Vec<(u32, usize)> =
            squares.iter().map(|(n, d)| (*n, d + 3)).collect();
        let constant = |v: usize| -> Vec<(u32, usize)> { (0..=2).map(|n| (n, v)).collect() };

        assert_eq!(profile(&profiles, Theory::DeRham, Grading::Degree(0)).samples, constant(1));
        assert_eq!(profile(&profiles, Theory::DeRham, Grading::Degree(1)).samples, constant(2));
        assert_eq!(
            profile(&profiles, Theory::DeRham, Grading::Degree(2)).samples,
            squares_plus_3
        );
        assert_eq!(profile(&profiles, Theory::DeRham, Grading::Degree(3)).samples, constant(2));
        assert_eq!(profile(&profiles, Theory::DeRham, Grading::Degree(4)).samples, squares);

        let dolbeault_finite = [
            ((0, 0), 1),
            ((1, 0), 1),
            ((2, 0), 1),
            ((0, 1), 1),
            ((1, 1), 2),
            ((2, 1), 1),
            ((1, 2), 1),
        ];
        for ((p, q), v) in dolbeault_finite {
            assert_eq!(
                profile(&profiles, Theory::Dolbeault, Grading::Bidegree(p, q)).verdict,
                Verdict::Stabilized(v),
                "dolbeault ({p},{q})"
            );
        }
        for pq in [(0, 2), (2, 2)] {
            assert_eq!(
                profile(&profiles, Theory::Dolbeault, Grading::Bidegree(pq.0, pq.1)).samples,
                squares,
                "dolbeault {pq:?}"
            );
        }

        for pq in [(2, 1), (1, 2), (2, 2)] {
            assert_eq!(
                profile(&profiles, Theory::BottChern, Grading::Bidegree(pq.0, pq.1)).samples,
                squares,
                "bottChern {pq:?}"
            );
        }
        assert_eq!(
            profile(&profiles, Theory::BottChern, Grading::Bidegree(1, 1)).verdict,
            Verdict::Stabilized(2)
        );
        for pq in [(2, 0), (0, 2), (2, 2)] {
            assert_eq!(
                profile(&profiles, Theory::Aeppli, Grading::Bidegree(pq.0, pq.1)).samples,
                squares,
                "aeppli {pq:?}"
            );
        }
        let aeppli_11 = profile(&profiles, Theory::Aeppli, Grading::Bidegree(1, 1));
        let expected_11: Vec<(u32, usize)> =
            squares.iter().map(|(n, d)| (*n, d + 1)).collect();
        assert_eq!(aeppli_11.samples, expected_11);
    }

    #[test]
    fn orientability_reads_the_top_profile() {
        let a = shear2();
        let structures = Structures::none();
        let profiles = aggregate(&a, &structures, 3, &[Theory::DeRham], 3).unwrap();
        let report = orientability_indicator(&profiles).unwrap();
        assert_eq!(report.top_degree, 2);
        assert!(!report.orientable_at_truncation);
        assert!(matches!(report.verdict, Verdict::Growing(_)));
        assert!(orientability_indicator(&[]).is_none());
    }

    #[test]
    fn table_at_extracts_one_radius() {
        let a = shear2();
        let profiles = aggregate(&a, &Structures::none(), 2, &[Theory::DeRham], 3).unwrap();
        let table = table_at(&profiles, 2);
        assert_eq!(table[&(Theory::DeRham, Grading::Degree(2))], 5);
        assert!(table_at(&profiles, 9).is_empty());
    }

    #[test]
    fn shear_lefschetz_is_onto_everywhere() {
        let a = shear2();
        let s = check_symplectic(&a).unwrap();
        let rows = lefschetz_report(&a, &s, 2).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert_eq!(row.rank, 5, "power {}", row.power);
            assert_eq!(row.target_dim, 5, "power {}", row.power);
            assert!(row.epimorphism);
        }
    }

    #[test]
    fn breakdown_lists_census_orbits_with_dims() {
        let a = shear2();
        let structures = Structures::build(&a, true, false).unwrap();
        let rows =
            per_orbit_breakdown(&a, &structures, 1, &[Theory::DeRham, Theory::DLambda])
                .unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.fiber_dims, vec![1, 1, 1]);
        }
        let zero = rows
            .iter()
            .find(|r| r.orbit.representative().is_zero())
            .expect("zero orbit present");
        assert_eq!(zero.dims[&Theory::DLambda][&Grading::Degree(0)], 1);
    }
}
