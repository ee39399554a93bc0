//! Per-orbit fibers of the invariant complex.
//!
//! An invariant form supported on a finite orbit is determined by its
//! coefficient form at the canonical representative: transporting around
//! the orbit with the cocycle v -> induced(A^t) v must return it
//! unchanged, so the fiber in degree k is the fixed space of the induced
//! action of the orbit's return map. All differentials are computed in
//! these fiber bases; any operator that fails to land back inside a fiber
//! reports `NonInvariantImage` instead of silently truncating.

use crate::error::{Error, Result};
use crate::frame::{
    bidegree_positions, bigrade, induced_map, monomials, to_complex, to_real, wedge_matrix,
    Frame, FrameForm,
};
use crate::lattice::{LatticeOrbit, UnimodularMatrix};
use crate::linalg::{self, kernel_basis, OperatorMatrix, SubspaceBasis};
use crate::scalar::{self};
use crate::structures::ComplexData;
use std::collections::BTreeMap;

/// Fiber of the invariant complex over one orbit in one exterior degree.
#[derive(Debug, Clone)]
pub struct OrbitFiber {
    pub orbit: LatticeOrbit,
    pub degree: usize,
    pub basis: SubspaceBasis,
}

impl OrbitFiber {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// Fixed space of the induced return-map action in the given degree.
pub fn invariant_space(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    degree: usize,
) -> OrbitFiber {
    let s = orbit.size() as u64;
    let return_map = a.transpose().pow(s).to_operator_matrix();
    let induced = induced_map(&return_map, degree);
    let dim = induced.rows();
    let fixed = kernel_basis(&induced.sub(&OperatorMatrix::identity(dim)));
    OrbitFiber { orbit: orbit.clone(), degree, basis: fixed }
}

/// Expresses `frame_op * src` in the destination fiber basis, failing with
/// `NonInvariantImage` when the image escapes the destination span.
pub(crate) fn restrict_operator(
    frame_op: &OperatorMatrix,
    src: &SubspaceBasis,
    dst: &SubspaceBasis,
    what: &str,
) -> Result<OperatorMatrix> {
    let images = frame_op.matmul(&src.as_matrix_cols());
    linalg::solve_matrix(&dst.as_matrix_cols(), &images).ok_or_else(|| Error::NonInvariantImage {
        detail: format!("{what} left the invariant fiber"),
    })
}

/// The covector of a lattice mode: sum of k_i dx_i (the constant 2*pi*i
/// scaling is dropped; it rescales differentials without changing any
/// kernel, image, or quotient dimension).
pub fn mode_covector(orbit: &LatticeOrbit, n: usize) -> FrameForm {
    let frame = Frame::Real { n };
    let coeffs: Vec<_> = orbit
        .representative()
        .0
        .iter()
        .map(scalar::from_bigint)
        .collect();
    FrameForm::from_coefficients(frame, 1, &coeffs)
}

/// The full de Rham-style complex of one orbit: fibers in every degree
/// and the differential v -> kappa ^ v between them. `d[k]` maps the
/// degree-k fiber to the degree-(k+1) fiber; the top entry has zero rows.
#[derive(Debug, Clone)]
pub struct OrbitComplex {
    pub orbit: LatticeOrbit,
    pub n: usize,
    pub fibers: Vec<OrbitFiber>,
    pub d: Vec<OperatorMatrix>,
}

impl OrbitComplex {
    pub fn build(a: &UnimodularMatrix, orbit: &LatticeOrbit) -> Result<Self> {
        let n = a.n();
        let fibers: Vec<OrbitFiber> =
            (0..=n).map(|k| invariant_space(a, orbit, k)).collect();
        let kappa = mode_covector(orbit, n);
        let mut d = Vec::with_capacity(n + 1);
        for k in 0..n {
            let frame_op = wedge_matrix(&kappa, k);
            d.push(restrict_operator(
                &frame_op,
                &fibers[k].basis,
                &fibers[k + 1].basis,
                "d",
            )?);
        }
        d.push(OperatorMatrix::zero(0, fibers[n].dim()));
        for k in 0..n {
            if !d[k + 1].matmul(&d[k]).is_zero() {
                return Err(Error::PropertyViolation {
                    detail: format!(
                        "d^2 != 0 in degree {k} on orbit {}",
                        orbit.representative().display()
                    ),
                });
            }
        }
        Ok(OrbitComplex { orbit: orbit.clone(), n, fibers, d })
    }

    pub fn fiber_dims(&self) -> Vec<usize> {
        self.fibers.iter().map(OrbitFiber::dim).collect()
    }
}

/// Matrix of d on one degree, in fiber bases.
pub fn d_operator(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    k: usize,
) -> Result<OperatorMatrix> {
    let cx = OrbitComplex::build(a, orbit)?;
    Ok(cx.d[k].clone())
}

/// Bigraded fiber over one orbit: the invariant (p, q) component in the
/// complex frame, with coordinates over the (p, q) monomial block.
#[derive(Debug, Clone)]
pub struct BigradedFiber {
    pub orbit: LatticeOrbit,
    pub p: usize,
    pub q: usize,
    pub basis: SubspaceBasis,
}

impl BigradedFiber {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// The Dolbeault-style double complex of one orbit: bigraded fibers and
/// the two first-order operators between them. `del[(p, q)]` maps
/// (p, q) -> (p+1, q) and `del_bar[(p, q)]` maps (p, q) -> (p, q+1);
/// blocks past bidegree m are zero-row matrices.
#[derive(Debug, Clone)]
pub struct OrbitBicomplex {
    pub orbit: LatticeOrbit,
    pub m: usize,
    fibers: BTreeMap<(usize, usize), BigradedFiber>,
    del: BTreeMap<(usize, usize), OperatorMatrix>,
    del_bar: BTreeMap<(usize, usize), OperatorMatrix>,
}

/// Pullback action of the torus map `r` on complex-frame coefficient
/// vectors (the real-frame action conjugated by the frame change).
pub fn complex_pullback(r: &UnimodularMatrix) -> Result<OperatorMatrix> {
    let n = r.n();
    if n % 2 != 0 || n == 0 {
        return Err(Error::OddDimension { n });
    }
    let m = n / 2;
    let rt = r.transpose().to_operator_matrix();
    let mut out = OperatorMatrix::zero(n, n);
    for j in 0..n {
        let eps = FrameForm::basis_covector(Frame::Complex { m }, j);
        let pulled_real = rt.apply(&to_real(&eps)?.coefficients());
        let pulled =
            FrameForm::from_coefficients(Frame::Real { n }, 1, &pulled_real);
        for (i, c) in to_complex(&pulled)?.coefficients().iter().enumerate() {
            out.set(i, j, c.clone());
        }
    }
    Ok(out)
}

impl OrbitBicomplex {
    pub fn build(
        a: &UnimodularMatrix,
        orbit: &LatticeOrbit,
        _complex: &ComplexData,
    ) -> Result<Self> {
        let n = a.n();
        let m = n / 2;
        let s = orbit.size() as u64;
        let return_pullback = complex_pullback(&a.pow(s))?;

        // invariant (p, q) blocks of the induced return action
        let mut fibers = BTreeMap::new();
        for degree in 0..=n {
            let induced = induced_map(&return_pullback, degree);
            for p in 0..=m.min(degree) {
                let q = degree - p;
                if q > m {
                    continue;
                }
                let block = bidegree_positions(m, p, q);
                // the action must not couple distinct bidegrees
                for (full_row, idx) in monomials(n, degree).iter().enumerate() {
                    let row_p = idx.indices().iter().filter(|&&i| i < m).count();
                    if row_p == p {
                        continue;
                    }
                    for &col in &block {
                        if !scalar::is_zero(induced.at(full_row, col)) {
                            return Err(Error::PropertyViolation {
                                detail: "return action mixed bidegrees".into(),
                            });
                        }
                    }
                }
                let sub = induced.submatrix(&block, &block);
                let fixed = kernel_basis(&sub.sub(&OperatorMatrix::identity(block.len())));
                fibers.insert(
                    (p, q),
                    BigradedFiber { orbit: orbit.clone(), p, q, basis: fixed },
                );
            }
        }

        // split the mode covector into its (1,0) and (0,1) parts
        let kappa_complex = to_complex(&mode_covector(orbit, n))?;
        let parts = bigrade(&kappa_complex)?;
        let frame = Frame::Complex { m };
        let kappa10 = parts.get(&(1, 0)).cloned().unwrap_or_else(|| FrameForm::zero(frame, 1));
        let kappa01 = parts.get(&(0, 1)).cloned().unwrap_or_else(|| FrameForm::zero(frame, 1));

        let mut del = BTreeMap::new();
        let mut del_bar = BTreeMap::new();
        for p in 0..=m {
            for q in 0..=m {
                let src = &fibers[&(p, q)];
                del.insert(
                    (p, q),
                    block_operator(&kappa10, src, fibers.get(&(p + 1, q)), m, "del")?,
                );
                del_bar.insert(
                    (p, q),
                    block_operator(&kappa01, src, fibers.get(&(p, q + 1)), m, "del_bar")?,
                );
            }
        }

        let bicomplex = OrbitBicomplex { orbit: orbit.clone(), m, fibers, del, del_bar };
        bicomplex.verify_identities()?;
        Ok(bicomplex)
    }

    fn verify_identities(&self) -> Result<()> {
        let m = self.m;
        let complain = |what: &str, p: usize, q: usize| -> Error {
            Error::PropertyViolation {
                detail: format!(
                    "{what} != 0 at ({p},{q}) on orbit {}",
                    self.orbit.representative().display()
                ),
            }
        };
        for p in 0..=m {
            for q in 0..=m {
                if p + 1 <= m && !self.compose(&self.del, &self.del, p, q, p + 1, q).is_zero() {
                    return Err(complain("del^2", p, q));
                }
                if q + 1 <= m
                    && !self.compose(&self.del_bar, &self.del_bar, p, q, p, q + 1).is_zero()
                {
                    return Err(complain("del_bar^2", p, q));
                }
                if p + 1 <= m && q + 1 <= m {
                    let one = self.compose(&self.del, &self.del_bar, p, q, p, q + 1);
                    let two = self.compose(&self.del_bar, &self.del, p, q, p + 1, q);
                    if !one.add(&two).is_zero() {
                        return Err(complain("del del_bar + del_bar del", p, q));
                    }
                }
            }
        }
        Ok(())
    }

    fn compose(
        &self,
        outer: &BTreeMap<(usize, usize), OperatorMatrix>,
        inner: &BTreeMap<(usize, usize), OperatorMatrix>,
        p: usize,
        q: usize,
        mid_p: usize,
        mid_q: usize,
    ) -> OperatorMatrix {
        outer[&(mid_p, mid_q)].matmul(&inner[&(p, q)])
    }

    pub fn fiber(&self, p: usize, q: usize) -> &BigradedFiber {
        &self.fibers[&(p, q)]
    }

    pub fn del(&self, p: usize, q: usize) -> &OperatorMatrix {
        &self.del[&(p, q)]
    }

    pub fn del_bar(&self, p: usize, q: usize) -> &OperatorMatrix {
        &self.del_bar[&(p, q)]
    }

    /// The composite del del_bar: (p, q) -> (p+1, q+1), zero rows when the
    /// target bidegree is out of range.
    pub fn del_del_bar(&self, p: usize, q: usize) -> OperatorMatrix {
        let src_dim = self.fibers[&(p, q)].dim();
        if p + 1 > self.m || q + 1 > self.m {
            return OperatorMatrix::zero(0, src_dim);
        }
        self.del[&(p, q + 1)].matmul(&self.del_bar[&(p, q)])
    }
}

fn block_operator(
    kappa_part: &FrameForm,
    src: &BigradedFiber,
    dst: Option<&BigradedFiber>,
    m: usize,
    what: &str,
) -> Result<OperatorMatrix> {
    match dst {
        None => Ok(OperatorMatrix::zero(0, src.dim())),
        Some(dst) => {
            let full = wedge_matrix(kappa_part, src.p + src.q);
            let rows = bidegree_positions(m, dst.p, dst.q);
            let cols = bidegree_positions(m, src.p, src.q);
            let block = full.submatrix(&rows, &cols);
            restrict_operator(&block, &src.basis, &dst.basis, what)
        }
    }
}

/// The pair (del, del_bar) out of bidegree (p, q) in fiber bases.
pub fn del_operators(
    a: &UnimodularMatrix,
    orbit: &LatticeOrbit,
    p: usize,
    q: usize,
    complex: &ComplexData,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let bc = OrbitBicomplex::build(a, orbit, complex)?;
    Ok((bc.del(p, q).clone(), bc.del_bar(p, q).clone()))
}
