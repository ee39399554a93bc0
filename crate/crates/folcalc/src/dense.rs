//! A second, independent computation path used to cross-check the
//! per-orbit engines: instead of restricting operators to one orbit's
//! invariant fiber, this module assembles every censused mode into a
//! single direct-sum coefficient space, takes the global fixed space of
//! the permutation-twisted return action, and computes each theory as a
//! quotient of subspaces of that ambient space. No orbit-by-orbit
//! restriction is involved, so agreement with the aggregated per-orbit
//! totals is a strong end-to-end consistency check.

use std::collections::BTreeMap;

use crate::cohomology::{Grading, Theory};
use crate::error::{Error, Result};
use crate::fibers::complex_pullback;
use crate::frame::{
    bidegree_positions, bigrade, induced_map, to_complex, wedge_matrix, Frame, FrameForm,
};
use crate::lattice::{enumerate_orbits, LatticeVector, UnimodularMatrix};
use crate::linalg::{
    image_basis, kernel_basis, quotient_dim, subspace_intersect, subspace_sum,
    OperatorMatrix, SubspaceBasis,
};
use crate::scalar;
use crate::structures::Structures;

/// All lattice modes touched by the radius-n census: the union of the
/// enumerated orbits, which is closed under the transpose action.
fn census_modes(a: &UnimodularMatrix, n: u32) -> Vec<LatticeVector> {
    let mut modes: Vec<LatticeVector> = enumerate_orbits(a, n)
        .into_iter()
        .flat_map(|orbit| orbit.elements().to_vec())
        .collect();
    modes.sort();
    modes.dedup();
    modes
}

/// The mode list, the transpose-step permutation on it, and the ambient
/// bookkeeping shared by both gradings.
struct DenseModel {
    a: UnimodularMatrix,
    n: usize,
    modes: Vec<LatticeVector>,
    step: Vec<usize>,
}

impl DenseModel {
    fn build(a: &UnimodularMatrix, n_box: u32) -> Result<Self> {
        let modes = census_modes(a, n_box);
        let position: BTreeMap<&LatticeVector, usize> =
            modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let at = a.transpose();
        let mut step = Vec::with_capacity(modes.len());
        for mode in &modes {
            let image = at.apply(mode);
            match position.get(&image) {
                Some(&pos) => step.push(pos),
                None => {
                    return Err(Error::PropertyViolation {
                        detail: format!(
                            "census not closed under the transpose action at {}",
                            mode.display()
                        ),
                    })
                }
            }
        }
        Ok(DenseModel { a: a.clone(), n: a.n(), modes, step })
    }

    fn covector(&self, j: usize) -> FrameForm {
        let coeffs: Vec<_> = self.modes[j].0.iter().map(scalar::from_bigint).collect();
        FrameForm::from_coefficients(Frame::Real { n: self.n }, 1, &coeffs)
    }

    /// One application of the return action on the direct sum: every
    /// source block j feeds the block of its image mode through `block`.
    fn twisted(&self, block: &OperatorMatrix) -> OperatorMatrix {
        let b = block.rows();
        let count = self.modes.len();
        let mut big = OperatorMatrix::zero(count * b, count * b);
        for j in 0..count {
            let dest = self.step[j];
            for r in 0..b {
                for c in 0..b {
                    let v = block.at(r, c).clone();
                    if !scalar::is_zero(&v) {
                        big.set(dest * b + r, j * b + c, v);
                    }
                }
            }
        }
        big
    }

    /// Mode-diagonal operator from per-mode blocks of one common shape.
    fn per_mode(&self, blocks: &[OperatorMatrix]) -> OperatorMatrix {
        let rb = blocks[0].rows();
        let cb = blocks[0].cols();
        let count = self.modes.len();
        let mut big = OperatorMatrix::zero(count * rb, count * cb);
        for (j, block) in blocks.iter().enumerate() {
            for r in 0..rb {
                for c in 0..cb {
                    let v = block.at(r, c).clone();
                    if !scalar::is_zero(&v) {
                        big.set(j * rb + r, j * cb + c, v);
                    }
                }
            }
        }
        big
    }

    fn fixed_space(&self, twist_block: &OperatorMatrix) -> SubspaceBasis {
        let twist = self.twisted(twist_block);
        let dim = twist.rows();
        kernel_basis(&twist.sub(&OperatorMatrix::identity(dim)))
    }
}

/// Fixed spaces and differentials on the direct sum, per real degree.
struct RealDense {
    n: usize,
    w: Vec<SubspaceBasis>,
    d: Vec<OperatorMatrix>,
    l: Option<Vec<OperatorMatrix>>,
}

fn build_real(model: &DenseModel, structures: &Structures) -> Result<RealDense> {
    let n = model.n;
    let at_op = model.a.transpose().to_operator_matrix();
    let count = model.modes.len();
    let mut w = Vec::with_capacity(n + 1);
    let mut d = Vec::with_capacity(n + 1);
    for k in 0..=n {
        w.push(model.fixed_space(&induced_map(&at_op, k)));
        if k < n {
            let blocks: Vec<OperatorMatrix> = (0..count)
                .map(|j| wedge_matrix(&model.covector(j), k))
                .collect();
            d.push(model.per_mode(&blocks));
        } else {
            d.push(OperatorMatrix::zero(0, w[n].ambient()));
        }
    }
    let l = match &structures.symplectic {
        Some(s) => {
            let mut l = vec![OperatorMatrix::zero(0, w[0].ambient())];
            for k in 1..=n {
                let blocks: Vec<OperatorMatrix> = (0..count)
                    .map(|j| {
                        let mut frame_level = s
                            .star(n - k + 1)
                            .matmul(&wedge_matrix(&model.covector(j), n - k))
                            .matmul(s.star(k));
                        if k % 2 == 0 {
                            frame_level = frame_level.scale(&scalar::int(-1));
                        }
                        frame_level
                    })
                    .collect();
                l.push(model.per_mode(&blocks));
            }
            Some(l)
        }
        None => None,
    };
    Ok(RealDense { n, w, d, l })
}

impl RealDense {
    fn lowering(&self) -> Result<&Vec<OperatorMatrix>> {
        self.l.as_ref().ok_or_else(|| Error::StructureMissing {
            theory: "symplectic".into(),
        })
    }

    fn dd_lambda(&self, k: usize) -> Result<OperatorMatrix> {
        let l = self.lowering()?;
        Ok(if k == 0 {
            let dim = self.w[0].ambient();
            OperatorMatrix::zero(dim, dim)
        } else {
            self.d[k - 1].matmul(&l[k])
        })
    }

    fn restricted_image(&self, op: &OperatorMatrix, src: &SubspaceBasis) -> SubspaceBasis {
        image_basis(&op.matmul(&src.as_matrix_cols()))
    }

    fn de_rham(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.n + 1);
        for k in 0..=self.n {
            let kernel = subspace_intersect(&self.w[k], &kernel_basis(&self.d[k]))?;
            let image = if k == 0 {
                SubspaceBasis::zero(self.w[0].ambient())
            } else {
                self.restricted_image(&self.d[k - 1], &self.w[k - 1])
            };
            out.push(quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }

    fn d_lambda(&self) -> Result<Vec<usize>> {
        let l = self.lowering()?;
        let mut out = Vec::with_capacity(self.n + 1);
        for k in 0..=self.n {
            let kernel = subspace_intersect(&self.w[k], &kernel_basis(&l[k]))?;
            let image = if k == self.n {
                SubspaceBasis::zero(self.w[k].ambient())
            } else {
                self.restricted_image(&l[k + 1], &self.w[k + 1])
            };
            out.push(quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }

    fn dd_lambda_theory(&self) -> Result<Vec<usize>> {
        let l = self.lowering()?;
        let mut out = Vec::with_capacity(self.n + 1);
        for k in 0..=self.n {
            let kernel = subspace_intersect(&self.w[k], &kernel_basis(&self.dd_lambda(k)?))?;
            let mut image = SubspaceBasis::zero(self.w[k].ambient());
            if k >= 1 {
                image =
                    subspace_sum(&image, &self.restricted_image(&self.d[k - 1], &self.w[k - 1]))?;
            }
            if k < self.n {
                image =
                    subspace_sum(&image, &self.restricted_image(&l[k + 1], &self.w[k + 1]))?;
            }
            out.push(quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }

    fn d_plus_d_lambda(&self) -> Result<Vec<usize>> {
        let l = self.lowering()?;
        let mut out = Vec::with_capacity(self.n + 1);
        for k in 0..=self.n {
            let kernel = subspace_intersect(
                &subspace_intersect(&self.w[k], &kernel_basis(&self.d[k]))?,
                &kernel_basis(&l[k]),
            )?;
            let image = self.restricted_image(&self.dd_lambda(k)?, &self.w[k]);
            out.push(quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }
}

/// Fixed spaces and both complex differentials on the direct sum, per
/// bidegree square cell.
struct ComplexDense {
    m: usize,
    w: BTreeMap<(usize, usize), SubspaceBasis>,
    del: BTreeMap<(usize, usize), OperatorMatrix>,
    del_bar: BTreeMap<(usize, usize), OperatorMatrix>,
}

fn build_complex(model: &DenseModel) -> Result<ComplexDense> {
    let m = model.n / 2;
    let frame = Frame::Complex { m };
    let pullback = complex_pullback(&model.a)?;
    let count = model.modes.len();

    let mut kappa_parts = Vec::with_capacity(count);
    for j in 0..count {
        let complexified = to_complex(&model.covector(j))?;
        let mut parts = bigrade(&complexified)?;
        let k10 = parts.remove(&(1, 0)).unwrap_or_else(|| FrameForm::zero(frame, 1));
        let k01 = parts.remove(&(0, 1)).unwrap_or_else(|| FrameForm::zero(frame, 1));
        kappa_parts.push((k10, k01));
    }

    let mut w = BTreeMap::new();
    let mut del = BTreeMap::new();
    let mut del_bar = BTreeMap::new();
    for p in 0..=m {
        for q in 0..=m {
            let cols = bidegree_positions(m, p, q);
            let full = induced_map(&pullback, p + q);
            for row in 0..full.rows() {
                if cols.contains(&row) {
                    continue;
                }
                for &col in &cols {
                    if !scalar::is_zero(full.at(row, col)) {
                        return Err(Error::PropertyViolation {
                            detail: format!("dense return action mixed bidegrees at ({p},{q})"),
                        });
                    }
                }
            }
            let block = full.submatrix(&cols, &cols);
            w.insert((p, q), model.fixed_space(&block));

            let del_rows = bidegree_positions(m, p + 1, q);
            let del_blocks: Vec<OperatorMatrix> = kappa_parts
                .iter()
                .map(|(k10, _)| wedge_matrix(k10, p + q).submatrix(&del_rows, &cols))
                .collect();
            del.insert((p, q), model.per_mode(&del_blocks));

            let bar_rows = bidegree_positions(m, p, q + 1);
            let bar_blocks: Vec<OperatorMatrix> = kappa_parts
                .iter()
                .map(|(_, k01)| wedge_matrix(k01, p + q).submatrix(&bar_rows, &cols))
                .collect();
            del_bar.insert((p, q), model.per_mode(&bar_blocks));
        }
    }
    Ok(ComplexDense { m, w, del, del_bar })
}

impl ComplexDense {
    fn ambient(&self, p: usize, q: usize) -> usize {
        self.w[&(p, q)].ambient()
    }

    fn del_del_bar(&self, p: usize, q: usize) -> OperatorMatrix {
        if q < self.m {
            self.del[&(p, q + 1)].matmul(&self.del_bar[&(p, q)])
        } else {
            OperatorMatrix::zero(0, self.ambient(p, q))
        }
    }

    fn restricted_image(&self, op: &OperatorMatrix, src: &SubspaceBasis) -> SubspaceBasis {
        image_basis(&op.matmul(&src.as_matrix_cols()))
    }

    fn dolbeault(&self) -> Result<BTreeMap<(usize, usize), usize>> {
        let mut out = BTreeMap::new();
        for (&(p, q), w) in &self.w {
            let kernel = subspace_intersect(w, &kernel_basis(&self.del_bar[&(p, q)]))?;
            let image = if q == 0 {
                SubspaceBasis::zero(self.ambient(p, q))
            } else {
                self.restricted_image(&self.del_bar[&(p, q - 1)], &self.w[&(p, q - 1)])
            };
            out.insert((p, q), quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }

    fn bott_chern(&self) -> Result<BTreeMap<(usize, usize), usize>> {
        let mut out = BTreeMap::new();
        for (&(p, q), w) in &self.w {
            let kernel = subspace_intersect(
                &subspace_intersect(w, &kernel_basis(&self.del[&(p, q)]))?,
                &kernel_basis(&self.del_bar[&(p, q)]),
            )?;
            let image = if p >= 1 && q >= 1 {
                self.restricted_image(&self.del_del_bar(p - 1, q - 1), &self.w[&(p - 1, q - 1)])
            } else {
                SubspaceBasis::zero(self.ambient(p, q))
            };
            out.insert((p, q), quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }

    fn aeppli(&self) -> Result<BTreeMap<(usize, usize), usize>> {
        let mut out = BTreeMap::new();
        for (&(p, q), w) in &self.w {
            let kernel = subspace_intersect(w, &kernel_basis(&self.del_del_bar(p, q)))?;
            let mut image = SubspaceBasis::zero(self.ambient(p, q));
            if p >= 1 {
                image = subspace_sum(
                    &image,
                    &self.restricted_image(&self.del[&(p - 1, q)], &self.w[&(p - 1, q)]),
                )?;
            }
            if q >= 1 {
                image = subspace_sum(
                    &image,
                    &self.restricted_image(&self.del_bar[&(p, q - 1)], &self.w[&(p, q - 1)]),
                )?;
            }
            out.insert((p, q), quotient_dim(&kernel, &image)?);
        }
        Ok(out)
    }
}

/// Dimensions of one theory at truncation radius `n`, computed on the
/// direct sum of all censused modes rather than orbit by orbit.
pub fn dense_theory_dims(
    a: &UnimodularMatrix,
    structures: &Structures,
    n: u32,
    theory: Theory,
) -> Result<BTreeMap<Grading, usize>> {
    let model = DenseModel::build(a, n)?;
    if theory.is_bigraded() {
        structures.require_complex()?;
        let complex = build_complex(&model)?;
        let dims = match theory {
            Theory::Dolbeault => complex.dolbeault()?,
            Theory::BottChern => complex.bott_chern()?,
            Theory::Aeppli => complex.aeppli()?,
            _ => unreachable!("bigraded dispatch"),
        };
        Ok(dims
            .into_iter()
            .map(|((p, q), d)| (Grading::Bidegree(p, q), d))
            .collect())
    } else {
        if theory.needs_symplectic() {
            structures.require_symplectic()?;
        }
        let real = build_real(&model, structures)?;
        let dims = match theory {
            Theory::DeRham => real.de_rham()?,
            Theory::DLambda => real.d_lambda()?,
            Theory::DdLambda => real.dd_lambda_theory()?,
            Theory::DPlusDLambda => real.d_plus_d_lambda()?,
            _ => unreachable!("single-graded dispatch"),
        };
        Ok(dims
            .into_iter()
            .enumerate()
            .map(|(k, d)| (Grading::Degree(k), d))
            .collect())
    }
}
