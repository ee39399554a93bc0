//! Transverse structure validation and the operators built from it.
//!
//! The symplectic side fixes the standard form on consecutive coordinate
//! pairs, checks that the suspension matrix preserves it, and constructs
//! the degree-reversing star by solving the wedge-pairing relation in
//! each degree (a convention-proof construction: the defining relation
//! plus involutivity pin the operator down, no closed formula needed).
//! The complex side checks commutation with the standard almost-complex
//! block matrix and carries the real-to-complex frame change.

use crate::error::{Error, Result};
use crate::fibers::{invariant_space, mode_covector, restrict_operator, OrbitComplex};
use crate::frame::{self, induced_map, monomials, wedge_matrix, Frame, FrameForm, MultiIndex};
use crate::lattice::{LatticeOrbit, UnimodularMatrix};
use crate::linalg::{rank, solve_matrix, OperatorMatrix};
use crate::scalar::{self};
use num::BigInt;

/// Gram matrix of the standard 2-form on pairs (x1,x2), (x3,x4), ...
fn standard_omega_gram(n: usize) -> OperatorMatrix {
    let mut gram = OperatorMatrix::zero(n, n);
    for j in 0..n / 2 {
        gram.set(2 * j, 2 * j + 1, scalar::one());
        gram.set(2 * j + 1, 2 * j, scalar::int(-1));
    }
    gram
}

/// Standard complex-structure matrix: blocks [[0, -1], [1, 0]] per pair.
fn standard_j(n: usize) -> OperatorMatrix {
    let mut j = OperatorMatrix::zero(n, n);
    for p in 0..n / 2 {
        j.set(2 * p, 2 * p + 1, scalar::int(-1));
        j.set(2 * p + 1, 2 * p, scalar::one());
    }
    j
}

/// Validated transversely symplectic data: the standard 2-form, its
/// volume normalization, the induced pairings on every degree, and the
/// solved star operators.
#[derive(Debug, Clone)]
pub struct SymplecticData {
    m: usize,
    omega: FrameForm,
    volume: FrameForm,
    pairings: Vec<OperatorMatrix>,
    stars: Vec<OperatorMatrix>,
}

impl SymplecticData {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        2 * self.m
    }

    pub fn omega(&self) -> &FrameForm {
        &self.omega
    }

    pub fn volume(&self) -> &FrameForm {
        &self.volume
    }

    /// Pairing matrix on degree-k monomials (Gram determinants of the
    /// degree-1 pairing).
    pub fn pairing(&self, k: usize) -> &OperatorMatrix {
        &self.pairings[k]
    }

    pub fn star(&self, k: usize) -> &OperatorMatrix {
        &self.stars[k]
    }
}

/// Matrix of the degree-reversing star on degree-k monomial coordinates.
pub fn symplectic_star(s: &SymplecticData, k: usize) -> OperatorMatrix {
    s.stars[k].clone()
}

/// Validates that the matrix preserves the standard 2-form and builds
/// the full star/pairing package.
pub fn check_symplectic(a: &UnimodularMatrix) -> Result<SymplecticData> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(Error::OddCodimension { n });
    }
    let m = n / 2;
    let gram = standard_omega_gram(n);
    let a_op = a.to_operator_matrix();
    if !a_op.transpose().matmul(&gram).matmul(&a_op).sub(&gram).is_zero() {
        return Err(Error::NotSymplectic);
    }

    let frame = Frame::Real { n };
    let mut omega = FrameForm::zero(frame, 2);
    for j in 0..m {
        let pair = FrameForm::basis_covector(frame, 2 * j)
            .wedge(&FrameForm::basis_covector(frame, 2 * j + 1))?;
        omega = omega.add(&pair)?;
    }

    let mut factorial = BigInt::from(1);
    for j in 2..=m {
        factorial *= BigInt::from(j as u64);
    }
    let volume = omega
        .wedge_power(m)?
        .scale(&(scalar::one() / scalar::from_bigint(&factorial)));
    let top = MultiIndex::new((0..n).collect());
    let top_coeff = volume.coefficient(&top);
    if scalar::is_zero(&top_coeff) {
        return Err(Error::PropertyViolation {
            detail: "volume normalization vanished".into(),
        });
    }

    let pairings: Vec<OperatorMatrix> = (0..=n).map(|k| induced_map(&gram, k)).collect();

    // Solve alpha ^ star(beta) = pairing(alpha, beta) * volume in each
    // degree against the full wedge pairing to the top monomial.
    let mut stars = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let src = monomials(n, k);
        let dst = monomials(n, n - k);
        let mut pairing_to_top = OperatorMatrix::zero(src.len(), dst.len());
        for (i, mi) in src.iter().enumerate() {
            let left = FrameForm::monomial(frame, mi.clone(), scalar::one());
            for (j, mj) in dst.iter().enumerate() {
                let right = FrameForm::monomial(frame, mj.clone(), scalar::one());
                pairing_to_top.set(i, j, left.wedge(&right)?.coefficient(&top));
            }
        }
        if rank(&pairing_to_top) < pairing_to_top.rows() {
            return Err(Error::SingularWedgePairing { degree: k });
        }
        let rhs = pairings[k].scale(&top_coeff);
        let star = solve_matrix(&pairing_to_top, &rhs)
            .ok_or(Error::SingularWedgePairing { degree: k })?;
        stars.push(star);
    }

    for k in 0..=n {
        let round_trip = stars[n - k].matmul(&stars[k]);
        if !round_trip.sub(&OperatorMatrix::identity(round_trip.cols())).is_zero() {
            return Err(Error::PropertyViolation {
                detail: format!("star round trip is not the identity in degree {k}"),
            });
        }
    }

    Ok(SymplecticData { m, omega, volume, pairings, stars })
}

/// Validated transversely complex data for the standard pairing of
/// consecutive real coordinates into complex ones.
#[derive(Debug, Clone)]
pub struct ComplexData {
    m: usize,
    j: OperatorMatrix,
    frame_change: OperatorMatrix,
}

impl ComplexData {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn j(&self) -> &OperatorMatrix {
        &self.j
    }

    /// Rows express (dz1, dzbar1, dz2, dzbar2, ...) over the real frame.
    pub fn frame_change(&self) -> &OperatorMatrix {
        &self.frame_change
    }
}

/// Validates that the matrix commutes with the standard complex
/// structure (equivalently, acts complex-linearly on paired coordinates).
pub fn check_complex(a: &UnimodularMatrix) -> Result<ComplexData> {
    let n = a.n();
    if n % 2 != 0 || n == 0 {
        return Err(Error::OddDimension { n });
    }
    let j = standard_j(n);
    let a_op = a.to_operator_matrix();
    if !a_op.matmul(&j).sub(&j.matmul(&a_op)).is_zero() {
        return Err(Error::NotComplexCompatible);
    }
    let frame_change = frame::complex_frame_change(n)?;
    Ok(ComplexData { m: n / 2, j, frame_change })
}

/// Bundle of validated transverse structures for one job.
#[derive(Debug, Clone, Default)]
pub struct Structures {
    pub symplectic: Option<SymplecticData>,
    pub complex: Option<ComplexData>,
}

impl Structures {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn build(a: &UnimodularMatrix, symplectic: bool, complex: bool) -> Result<Self> {
        Ok(Structures {
            symplectic: if symplectic { Some(check_symplectic(a)?) } else { None },
            complex: if complex { Some(check_complex(a)?) } else { None },
        })
    }

    pub fn require_symplectic(&self) -> Result<&SymplecticData> {
        self.symplectic.as_ref().ok_or_else(|| Error::StructureMissing {
            theory: "symplectic".into(),
        })
    }

    pub fn require_complex(&self) -> Result<&ComplexData> {
        self.complex.as_ref().ok_or_else(|| Error::StructureMissing {
            theory: "complex".into(),
        })
    }
}

/// The degree-lowering differential package of one orbit: the underlying
/// complex plus `dlam[k]` mapping the degree-k fiber to degree k-1 (the
/// k = 0 entry has zero rows).
#[derive(Debug, Clone)]
pub struct OrbitSymplectic {
    pub base: OrbitComplex,
    pub dlam: Vec<OperatorMatrix>,
}

impl OrbitSymplectic {
    pub fn build(
        a: &UnimodularMatrix,
        orbit: &LatticeOrbit,
        s: &SymplecticData,
    ) -> Result<Self> {
        let base = OrbitComplex::build(a, orbit)?;
        let n = base.n;
        let kappa = mode_covector(orbit, n);
        let mut dlam = vec![OperatorMatrix::zero(0, base.fibers[0].dim())];
        for k in 1..=n {
            let mut frame_level = s
                .star(n - k + 1)
                .matmul(&wedge_matrix(&kappa, n - k))
                .matmul(s.star(k));
            if k % 2 == 0 {
                frame_level = frame_level.scale(&scalar::int(-1));
            }
            dlam.push(restrict_operator(
                &frame_level,
                &base.fibers[k].basis,
                &base.fibers[k - 1].basis,
                "d_lambda",
            )?);
        }
        let built = OrbitSymplectic { base, dlam };
        built.verify()?;
        Ok(built)
    }

    fn verify(&self) -> Result<()> {
        let n = self.base.n;
        for k in 2..=n {
            if !self.dlam[k - 1].matmul(&self.dlam[k]).is_zero() {
                return Err(Error::PropertyViolation {
                    detail: format!("d_lambda^2 != 0 in degree {k}"),
                });
            }
        }
        for k in 0..=n {
            let down_up = self.dd_lambda(k);
            let up_down = if k < n {
                self.dlam[k + 1].matmul(&self.base.d[k])
            } else {
                let dim = self.base.fibers[n].dim();
                OperatorMatrix::zero(dim, dim)
            };
            if !down_up.add(&up_down).is_zero() {
                return Err(Error::PropertyViolation {
                    detail: format!("d and d_lambda fail to anticommute in degree {k}"),
                });
            }
        }
        Ok(())
    }

    /// The composite d after d_lambda on the degree-k fiber (an
    /// endomorphism; zero in degree 0 where d_lambda vanishes).
    pub fn dd_lambda(&self, k: usize) -> OperatorMatrix {
        let dim = self.base.fibers[k].dim();
        if k == 0 {
            OperatorMatrix::zero(dim, dim)
        } else {
            self.base.d[k - 1].matmul(&self.dlam[k])
        }
    }
}

/// Matrix of the degree-lowering differential on one fiber.
pub fn d_lambda_operator(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    s: &SymplecticData,
    k: usize,
) -> Result<OperatorMatrix> {
    let built = OrbitSymplectic::build(a, orbit, s)?;
    Ok(built.dlam[k].clone())
}

/// Matrix of wedging with the k-th power of the 2-form, from the fiber
/// in degree m-k to the fiber in degree m+k.
pub fn lefschetz_operator(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    s: &SymplecticData,
    k: usize,
) -> Result<OperatorMatrix> {
    let m = s.m();
    let src = invariant_space(a, orbit, m - k);
    let dst = invariant_space(a, orbit, m + k);
    let omega_k = s.omega().wedge_power(k)?;
    let frame_op = wedge_matrix(&omega_k, m - k);
    restrict_operator(&frame_op, &src.basis, &dst.basis, "lefschetz wedge")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{classify_mode, from_int_rows, LatticeVector, ModeClass};
    use crate::linalg::image_basis;
    use crate::scalar::int;

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

    fn identity(n: usize) -> UnimodularMatrix {
        let rows: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        from_int_rows(&rows).unwrap()
    }

    fn orbit_of(a: &UnimodularMatrix, coords: &[i64]) -> LatticeOrbit {
        match classify_mode(a, &LatticeVector::from_i64(coords)) {
            ModeClass::Finite(o) => o,
            ModeClass::Infinite => panic!("expected a finite mode"),
        }
    }

    fn star_of_monomial(s: &SymplecticData, n: usize, indices: &[usize]) -> FrameForm {
        let k = indices.len();
        let unit = FrameForm::monomial(
            Frame::Real { n },
            MultiIndex::new(indices.to_vec()),
            scalar::one(),
        );
        let image = s.star(k).apply(&unit.coefficients());
        FrameForm::from_coefficients(Frame::Real { n }, n - k, &image)
    }

    #[test]
    fn shear_preserves_the_standard_form_and_reflection_does_not() {
        assert!(check_symplectic(&shear2()).is_ok());
        assert!(check_symplectic(&identity(4)).is_ok());
        let reflection = from_int_rows(&[vec![1, 0], vec![0, -1]]).unwrap();
        assert!(matches!(check_symplectic(&reflection), Err(Error::NotSymplectic)));
        assert!(matches!(check_symplectic(&shear4()), Err(Error::NotSymplectic)));
        assert!(matches!(
            check_symplectic(&identity(3)),
            Err(Error::OddCodimension { n: 3 })
        ));
    }

    #[test]
    fn star_anchors_in_codimension_two() {
        let s = check_symplectic(&shear2()).unwrap();
        let star0 = star_of_monomial(&s, 2, &[]);
        assert_eq!(star0.coefficient(&MultiIndex::new(vec![0, 1])), int(1));
        let star_dx = star_of_monomial(&s, 2, &[0]);
        assert_eq!(star_dx.coefficient(&MultiIndex::new(vec![0])), int(1));
        assert_eq!(star_dx.coefficient(&MultiIndex::new(vec![1])), int(0));
        let star_dy = star_of_monomial(&s, 2, &[1]);
        assert_eq!(star_dy.coefficient(&MultiIndex::new(vec![1])), int(1));
        let star_top = star_of_monomial(&s, 2, &[0, 1]);
        assert_eq!(star_top.coefficient(&MultiIndex::new(vec![])), int(1));
    }

    #[test]
    fn star_anchors_in_codimension_four() {
        let s = check_symplectic(&identity(4)).unwrap();
        let star0 = star_of_monomial(&s, 4, &[]);
        assert_eq!(star0.coefficient(&MultiIndex::new(vec![0, 1, 2, 3])), int(1));
        // star(dx1) = dx1 ^ dx3 ^ dx4 in zero-based index sets
        let star_dx1 = star_of_monomial(&s, 4, &[0]);
        assert_eq!(star_dx1.coefficient(&MultiIndex::new(vec![0, 2, 3])), int(1));
        assert_eq!(star_dx1.terms().count(), 1);
        let star_e12 = star_of_monomial(&s, 4, &[0, 1]);
        assert_eq!(star_e12.coefficient(&MultiIndex::new(vec![2, 3])), int(1));
        assert_eq!(star_e12.terms().count(), 1);
        let star_e134 = star_of_monomial(&s, 4, &[0, 2, 3]);
        assert_eq!(star_e134.coefficient(&MultiIndex::new(vec![0])), int(1));
        assert_eq!(star_e134.terms().count(), 1);
    }

    #[test]
    fn pairings_alternate_symmetry_with_degree() {
        let s = check_symplectic(&identity(4)).unwrap();
        for k in 0..=4usize {
            let g = s.pairing(k);
            let flipped = if k % 2 == 0 { g.transpose() } else { g.transpose().scale(&int(-1)) };
            assert!(g.sub(&flipped).is_zero(), "degree {k}");
        }
    }

    #[test]
    fn volume_is_the_top_monomial_for_the_standard_form() {
        let s = check_symplectic(&identity(4)).unwrap();
        assert_eq!(s.volume().coefficient(&MultiIndex::new(vec![0, 1, 2, 3])), int(1));
        assert_eq!(s.volume().terms().count(), 1);
    }

    #[test]
    fn degree_lowering_differential_matches_hand_computation() {
        let a = shear2();
        let s = check_symplectic(&a).unwrap();
        let orbit = orbit_of(&a, &[0, 7]);
        let built = OrbitSymplectic::build(&a, &orbit, &s).unwrap();
        // top fiber f dx^dy maps to -7 f dy
        assert_eq!(built.dlam[2].rows(), 1);
        assert_eq!(built.dlam[2].at(0, 0), &int(-7));
        // middle fiber is the closed line, so the map down vanishes
        assert!(built.dlam[1].is_zero());
        assert_eq!(built.dlam[0].rows(), 0);
        assert_eq!(d_lambda_operator(&a, &orbit, &s, 2).unwrap().at(0, 0), &int(-7));
    }

    #[test]
    fn degree_lowering_identities_hold_across_orbits() {
        let a = shear2();
        let s = check_symplectic(&a).unwrap();
        for k2 in -3i64..=3 {
            let orbit = orbit_of(&a, &[0, k2]);
            // build runs the square and anticommutation verifications
            let built = OrbitSymplectic::build(&a, &orbit, &s).unwrap();
            let dd = built.dd_lambda(1);
            if k2 == 0 {
                assert!(dd.is_zero());
            }
        }
    }

    #[test]
    fn lefschetz_wedge_is_the_identity_at_power_zero() {
        let a = shear2();
        let s = check_symplectic(&a).unwrap();
        let orbit = orbit_of(&a, &[0, 2]);
        let l0 = lefschetz_operator(&a, &orbit, &s, 0).unwrap();
        assert!(l0.sub(&OperatorMatrix::identity(1)).is_zero());
    }

    #[test]
    fn lefschetz_wedge_is_onto_for_the_shear() {
        let a = shear2();
        let s = check_symplectic(&a).unwrap();
        for k2 in [0i64, 5] {
            let orbit = orbit_of(&a, &[0, k2]);
            let l1 = lefschetz_operator(&a, &orbit, &s, 1).unwrap();
            assert_eq!(image_basis(&l1).dim(), 1);
            assert_eq!(l1.rows(), 1);
        }
    }

    #[test]
    fn complex_check_accepts_block_triangular_and_rejects_the_shear() {
        assert!(check_complex(&shear4()).is_ok());
        assert!(check_complex(&identity(2)).is_ok());
        assert!(matches!(check_complex(&shear2()), Err(Error::NotComplexCompatible)));
        assert!(matches!(check_complex(&identity(3)), Err(Error::OddDimension { n: 3 })));
    }

    #[test]
    fn structure_bundle_tracks_requests() {
        let a = shear2();
        let both = Structures::build(&a, true, false).unwrap();
        assert!(both.symplectic.is_some());
        assert!(both.complex.is_none());
        assert!(both.require_symplectic().is_ok());
        assert!(matches!(
            both.require_complex(),
            Err(Error::StructureMissing { .. })
        ));
        assert!(Structures::build(&a, false, true).is_err());
        assert!(Structures::none().symplectic.is_none());
    }
}
