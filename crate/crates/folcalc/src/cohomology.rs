//! Per-orbit dimension engines for the seven cohomology theories, plus
//! the per-orbit inequality checks and the aggregated duality report.
//!
//! Every engine is a quotient of exactly computed subspaces: kernels and
//! images of the fiber operators built in `fibers` and `structures`. The
//! containment preconditions of those quotients encode the differential
//! identities, so a broken identity surfaces as an error instead of a
//! wrong number.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fibers::{OrbitBicomplex, OrbitComplex};
use crate::lattice::{LatticeOrbit, UnimodularMatrix};
use crate::linalg::{
    image_basis, kernel_basis, quotient_dim, subspace_intersect, subspace_sum, SubspaceBasis,
};
use crate::report::DimensionProfile;
use crate::structures::{ComplexData, OrbitSymplectic, Structures, SymplecticData};

/// The seven supported cohomology theories. The serialized names double
/// as the stable identifiers in configs and reports.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash,
)]
#[serde(rename_all = "camelCase")]
pub enum Theory {
    DeRham,
    Dolbeault,
    BottChern,
    Aeppli,
    DLambda,
    DdLambda,
    DPlusDLambda,
}

impl Theory {
    pub const ALL: [Theory; 7] = [
        Theory::DeRham,
        Theory::Dolbeault,
        Theory::BottChern,
        Theory::Aeppli,
        Theory::DLambda,
        Theory::DdLambda,
        Theory::DPlusDLambda,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theory::DeRham => "deRham",
            Theory::Dolbeault => "dolbeault",
            Theory::BottChern => "bottChern",
            Theory::Aeppli => "aeppli",
            Theory::DLambda => "dLambda",
            Theory::DdLambda => "ddLambda",
            Theory::DPlusDLambda => "dPlusDLambda",
        }
    }

    pub fn needs_complex(self) -> bool {
        matches!(self, Theory::Dolbeault | Theory::BottChern | Theory::Aeppli)
    }

    pub fn needs_symplectic(self) -> bool {
        matches!(self, Theory::DLambda | Theory::DdLambda | Theory::DPlusDLambda)
    }

    pub fn is_bigraded(self) -> bool {
        self.needs_complex()
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Degree for the single-graded theories, bidegree for the bigraded ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grading {
    Degree(usize),
    Bidegree(usize, usize),
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grading::Degree(k) => write!(f, "{k}"),
            Grading::Bidegree(p, q) => write!(f, "({p},{q})"),
        }
    }
}

/// One per-orbit dimension record.
#[derive(Debug, Clone)]
pub struct OrbitCohomology {
    pub orbit: LatticeOrbit,
    pub theory: Theory,
    pub grading: Grading,
    pub dimension: usize,
}

/// All differential packages of one orbit, built once and shared by the
/// seven dimension engines.
pub struct OrbitEngines {
    base: OrbitComplex,
    sympl: Option<OrbitSymplectic>,
    bicx: Option<OrbitBicomplex>,
}

impl OrbitEngines {
    pub fn build(
        a: &UnimodularMatrix,
        orbit: &LatticeOrbit,
        structures: &Structures,
    ) -> Result<Self> {
        let base = OrbitComplex::build(a, orbit)?;
        let sympl = match &structures.symplectic {
            Some(s) => Some(OrbitSymplectic::build(a, orbit, s)?),
            None => None,
        };
        let bicx = match &structures.complex {
            Some(c) => Some(OrbitBicomplex::build(a, orbit, c)?),
            None => None,
        };
        Ok(OrbitEngines { base, sympl, bicx })
    }

    pub fn fiber_dims(&self) -> Vec<usize> {
        self.base.fiber_dims()
    }

    pub fn has_symplectic(&self) -> bool {
        self.sympl.is_some()
    }

    pub fn has_complex(&self) -> bool {
        self.bicx.is_some()
    }

    fn symplectic(&self) -> Result<&OrbitSymplectic> {
        self.sympl.as_ref().ok_or_else(|| Error::StructureMissing {
            theory: "symplectic".into(),
        })
    }

    fn bicomplex(&self) -> Result<&OrbitBicomplex> {
        self.bicx.as_ref().ok_or_else(|| Error::StructureMissing {
            theory: "complex".into(),
        })
    }

    /// Dimensions of one theory over this orbit, keyed by grading.
    pub fn dims(&self, theory: Theory) -> Result<BTreeMap<Grading, usize>> {
        match theory {
            Theory::DeRham => Ok(keyed_by_degree(de_rham_from(&self.base)?)),
            Theory::DLambda => Ok(keyed_by_degree(d_lambda_from(self.symplectic()?)?)),
            Theory::DdLambda => Ok(keyed_by_degree(dd_lambda_from(self.symplectic()?)?)),
            Theory::DPlusDLambda => {
                Ok(keyed_by_degree(d_plus_d_lambda_from(self.symplectic()?)?))
            }
            Theory::Dolbeault => Ok(keyed_by_bidegree(dolbeault_from(self.bicomplex()?)?)),
            Theory::BottChern => Ok(keyed_by_bidegree(bott_chern_from(self.bicomplex()?)?)),
            Theory::Aeppli => Ok(keyed_by_bidegree(aeppli_from(self.bicomplex()?)?)),
        }
    }
}

fn keyed_by_degree(dims: Vec<usize>) -> BTreeMap<Grading, usize> {
    dims.into_iter().enumerate().map(|(k, d)| (Grading::Degree(k), d)).collect()
}

fn keyed_by_bidegree(dims: BTreeMap<(usize, usize), usize>) -> BTreeMap<Grading, usize> {
    dims.into_iter().map(|((p, q), d)| (Grading::Bidegree(p, q), d)).collect()
}

fn de_rham_from(cx: &OrbitComplex) -> Result<Vec<usize>> {
    let n = cx.n;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kernel = kernel_basis(&cx.d[k]);
        let image = if k == 0 {
            SubspaceBasis::zero(cx.fibers[0].dim())
        } else {
            image_basis(&cx.d[k - 1])
        };
        out.push(quotient_dim(&kernel, &image)?);
    }
    Ok(out)
}

fn d_lambda_from(sy: &OrbitSymplectic) -> Result<Vec<usize>> {
    let n = sy.base.n;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kernel = kernel_basis(&sy.dlam[k]);
        let image = if k == n {
            SubspaceBasis::zero(sy.base.fibers[n].dim())
        } else {
            image_basis(&sy.dlam[k + 1])
        };
        out.push(quotient_dim(&kernel, &image)?);
    }
    Ok(out)
}

fn dd_lambda_from(sy: &OrbitSymplectic) -> Result<Vec<usize>> {
    let n = sy.base.n;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kernel = kernel_basis(&sy.dd_lambda(k));
        let mut image = SubspaceBasis::zero(sy.base.fibers[k].dim());
        if k >= 1 {
            image = subspace_sum(&image, &image_basis(&sy.base.d[k - 1]))?;
        }
        if k < n {
            image = subspace_sum(&image, &image_basis(&sy.dlam[k + 1]))?;
        }
        out.push(quotient_dim(&kernel, &image)?);
    }
    Ok(out)
}

fn d_plus_d_lambda_from(sy: &OrbitSymplectic) -> Result<Vec<usize>> {
    let n = sy.base.n;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kernel =
            subspace_intersect(&kernel_basis(&sy.base.d[k]), &kernel_basis(&sy.dlam[k]))?;
        let image = image_basis(&sy.dd_lambda(k));
        out.push(quotient_dim(&kernel, &image)?);
    }
    Ok(out)
}

fn dolbeault_from(bc: &OrbitBicomplex) -> Result<BTreeMap<(usize, usize), usize>> {
    let m = bc.m;
    let mut out = BTreeMap::new();
    for p in 0..=m {
        for q in 0..=m {
            let kernel = kernel_basis(bc.del_bar(p, q));
            let image = if q == 0 {
                SubspaceBasis::zero(bc.fiber(p, q).dim())
            } else {
                image_basis(bc.del_bar(p, q - 1))
            };
            out.insert((p, q), quotient_dim(&kernel, &image)?);
        }
    }
    Ok(out)
}

fn bott_chern_from(bc: &OrbitBicomplex) -> Result<BTreeMap<(usize, usize), usize>> {
    let m = bc.m;
    let mut out = BTreeMap::new();
    for p in 0..=m {
        for q in 0..=m {
            let kernel = subspace_intersect(
                &kernel_basis(bc.del(p, q)),
                &kernel_basis(bc.del_bar(p, q)),
            )?;
            let image = if p >= 1 && q >= 1 {
                image_basis(&bc.del_del_bar(p - 1, q - 1))
            } else {
                SubspaceBasis::zero(bc.fiber(p, q).dim())
            };
            out.insert((p, q), quotient_dim(&kernel, &image)?);
        }
    }
    Ok(out)
}

fn aeppli_from(bc: &OrbitBicomplex) -> Result<BTreeMap<(usize, usize), usize>> {
    let m = bc.m;
    let mut out = BTreeMap::new();
    for p in 0..=m {
        for q in 0..=m {
            let kernel = kernel_basis(&bc.del_del_bar(p, q));
            let mut image = SubspaceBasis::zero(bc.fiber(p, q).dim());
            if p >= 1 {
                image = subspace_sum(&image, &image_basis(bc.del(p - 1, q)))?;
            }
            if q >= 1 {
                image = subspace_sum(&image, &image_basis(bc.del_bar(p, q - 1)))?;
            }
            out.insert((p, q), quotient_dim(&kernel, &image)?);
        }
    }
    Ok(out)
}

/// Kernel of d over image of d, per degree 0..n.
pub fn de_rham_dims(a: &UnimodularMatrix, orbit: &LatticeOrbit) -> Result<Vec<usize>> {
    de_rham_from(&OrbitComplex::build(a, orbit)?)
}

/// Kernel over image of the (0,1)-part, per bidegree.
pub fn dolbeault_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    cd: &ComplexData,
) -> Result<BTreeMap<(usize, usize), usize>> {
    dolbeault_from(&OrbitBicomplex::build(a, orbit, cd)?)
}

/// Joint kernel of both parts over the image of their composite.
pub fn bott_chern_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    cd: &ComplexData,
) -> Result<BTreeMap<(usize, usize), usize>> {
    bott_chern_from(&OrbitBicomplex::build(a, orbit, cd)?)
}

/// Kernel of the composite over the sum of both images.
pub fn aeppli_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    cd: &ComplexData,
) -> Result<BTreeMap<(usize, usize), usize>> {
    aeppli_from(&OrbitBicomplex::build(a, orbit, cd)?)
}

/// Kernel over image of the degree-lowering differential, per degree.
pub fn d_lambda_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    s: &SymplecticData,
) -> Result<Vec<usize>> {
    d_lambda_from(&OrbitSymplectic::build(a, orbit, s)?)
}

/// Kernel of the composite over the sum of both images, per degree.
pub fn dd_lambda_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    s: &SymplecticData,
) -> Result<Vec<usize>> {
    dd_lambda_from(&OrbitSymplectic::build(a, orbit, s)?)
}

/// Joint kernel of both differentials over the composite's image.
pub fn d_plus_dlambda_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    s: &SymplecticData,
) -> Result<Vec<usize>> {
    d_plus_d_lambda_from(&OrbitSymplectic::build(a, orbit, s)?)
}

/// Dimensions of one theory over one orbit, keyed by grading.
pub fn orbit_dims(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    structures: &Structures,
    theory: Theory,
) -> Result<BTreeMap<Grading, usize>> {
    OrbitEngines::build(a, orbit, structures)?.dims(theory)
}

/// One finite-level inequality instance at one orbit.
#[derive(Debug, Clone)]
pub struct InequalityRecord {
    pub name: &'static str,
    pub grading: Grading,
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
}

pub const INEQ_DOLBEAULT: &str = "dolbeault_le_bottChern_plus_aeppli";
pub const INEQ_DE_RHAM_SYMPLECTIC: &str = "deRham_le_dPlusDLambda_plus_ddLambda";
pub const INEQ_FROELICHER: &str = "froelicher";

/// Evaluates, per orbit, every finite-level inequality supported by the
/// validated structures. Violations come back as data (`holds = false`);
/// any violation indicates a computation bug, not a feature of the
/// example.
pub fn inequality_check(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    structures: &Structures,
) -> Result<Vec<InequalityRecord>> {
    let engines = OrbitEngines::build(a, orbit, structures)?;
    let n = a.n();
    let mut out = Vec::new();
    let de_rham = engines.dims(Theory::DeRham)?;

    if engines.has_complex() {
        let dolbeault = engines.dims(Theory::Dolbeault)?;
        let bott_chern = engines.dims(Theory::BottChern)?;
        let aeppli = engines.dims(Theory::Aeppli)?;
        for (grading, &lhs) in &dolbeault {
            let rhs = bott_chern[grading] + aeppli[grading];
            out.push(InequalityRecord {
                name: INEQ_DOLBEAULT,
                grading: *grading,
                lhs,
                rhs,
                holds: lhs <= rhs,
            });
        }
        for k in 0..=n {
            let lhs = de_rham[&Grading::Degree(k)];
            let rhs = dolbeault
                .iter()
                .filter(|(g, _)| matches!(g, Grading::Bidegree(p, q) if p + q == k))
                .map(|(_, d)| d)
                .sum();
            out.push(InequalityRecord {
                name: INEQ_FROELICHER,
                grading: Grading::Degree(k),
                lhs,
                rhs,
                holds: lhs <= rhs,
            });
        }
    }

    if engines.has_symplectic() {
        let d_plus = engines.dims(Theory::DPlusDLambda)?;
        let dd = engines.dims(Theory::DdLambda)?;
        for k in 0..=n {
            let grading = Grading::Degree(k);
            let lhs = de_rham[&grading];
            let rhs = d_plus[&grading] + dd[&grading];
            out.push(InequalityRecord {
                name: INEQ_DE_RHAM_SYMPLECTIC,
                grading,
                lhs,
                rhs,
                holds: lhs <= rhs,
            });
        }
    }

    Ok(out)
}

/// One duality comparison across the full truncation range.
#[derive(Debug, Clone)]
pub struct DualityEntry {
    pub name: &'static str,
    pub left: (Theory, Grading),
    pub right: (Theory, Grading),
    pub left_samples: Vec<usize>,
    pub right_samples: Vec<usize>,
    pub holds: bool,
}

pub const DUALITY_POINCARE_DD: &str = "poincare_ddLambda";
pub const DUALITY_POINCARE_D_PLUS: &str = "poincare_dPlusDLambda";
pub const DUALITY_BC_AEPPLI: &str = "bottChern_vs_aeppli";
pub const DUALITY_SERRE: &str = "serre_dolbeault";

fn profile_lookup(
    profiles: &[DimensionProfile],
) -> BTreeMap<(Theory, Grading), &DimensionProfile> {
    profiles.iter().map(|p| ((p.theory, p.grading), p)).collect()
}

fn sample_dims(p: &DimensionProfile) -> Vec<usize> {
    p.samples.iter().map(|(_, d)| *d).collect()
}

fn push_pair(
    out: &mut Vec<DualityEntry>,
    lookup: &BTreeMap<(Theory, Grading), &DimensionProfile>,
    name: &'static str,
    left: (Theory, Grading),
    right: (Theory, Grading),
) {
    if let (Some(lp), Some(rp)) = (lookup.get(&left), lookup.get(&right)) {
        let left_samples = sample_dims(lp);
        let right_samples = sample_dims(rp);
        let holds = left_samples == right_samples;
        out.push(DualityEntry { name, left, right, left_samples, right_samples, holds });
    }
}

/// Compares aggregated dimension tables across dual gradings: the two
/// symmetric pairings expected to hold, and the two complex pairings
/// whose failure is itself a finding.
pub fn duality_report(profiles: &[DimensionProfile]) -> Vec<DualityEntry> {
    let lookup = profile_lookup(profiles);
    let mut out = Vec::new();

    let top_degree = |theory: Theory| -> Option<usize> {
        lookup
            .keys()
            .filter(|(t, _)| *t == theory)
            .filter_map(|(_, g)| match g {
                Grading::Degree(k) => Some(*k),
                Grading::Bidegree(..) => None,
            })
            .max()
    };

    for (theory, name) in [
        (Theory::DdLambda, DUALITY_POINCARE_DD),
        (Theory::DPlusDLambda, DUALITY_POINCARE_D_PLUS),
    ] {
        if let Some(n) = top_degree(theory) {
            for k in 0..=n / 2 {
                push_pair(
                    &mut out,
                    &lookup,
                    name,
                    (theory, Grading::Degree(k)),
                    (theory, Grading::Degree(n - k)),
                );
            }
        }
    }

    let half = |theory: Theory| -> Option<usize> {
        lookup
            .keys()
            .filter(|(t, _)| *t == theory)
            .filter_map(|(_, g)| match g {
                Grading::Bidegree(p, q) => Some((*p).max(*q)),
                Grading::Degree(_) => None,
            })
            .max()
    };

    if let Some(m) = half(Theory::BottChern) {
        for p in 0..=m {
            for q in 0..=m {
                push_pair(
                    &mut out,
                    &lookup,
                    DUALITY_BC_AEPPLI,
                    (Theory::BottChern, Grading::Bidegree(p, q)),
                    (Theory::Aeppli, Grading::Bidegree(m - p, m - q)),
                );
            }
        }
    }

    if let Some(m) = half(Theory::Dolbeault) {
        for p in 0..=m {
            for q in 0..=m {
                if (p, q) <= (m - p, m - q) {
                    push_pair(
                        &mut out,
                        &lookup,
                        DUALITY_SERRE,
                        (Theory::Dolbeault, Grading::Bidegree(p, q)),
                        (Theory::Dolbeault, Grading::Bidegree(m - p, m - q)),
                    );
                }
            }
        }
    }

    out
}
