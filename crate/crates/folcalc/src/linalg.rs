//! Exact dense linear algebra over the Gaussian rationals.
//!
//! Everything is computed by Gauss-Jordan elimination with deterministic
//! pivoting (first nonzero entry in column order), so ranks, kernels and
//! quotient dimensions come out identical on every run. Matrices act on
//! column vectors; a `SubspaceBasis` stores its vectors as rows.

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use num::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl OperatorMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        OperatorMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        OperatorMatrix::new(rows, cols, vec![scalar::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = OperatorMatrix::zero(n, n);
        for k in 0..n {
            m.set(k, k, scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        OperatorMatrix::new(rows, cols, data)
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == width), "ragged rows");
        OperatorMatrix::new(height, width, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        OperatorMatrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        OperatorMatrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = scalar::zero();
            for k in 0..self.cols {
                if !self.at(r, k).is_zero() && !rhs.at(k, c).is_zero() {
                    acc += self.at(r, k).clone() * rhs.at(k, c).clone();
                }
            }
            acc
        })
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch");
        OperatorMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).clone() + rhs.at(r, c).clone()
        })
    }

    pub fn sub(&self, rhs: &OperatorMatrix) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch");
        OperatorMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).clone() - rhs.at(r, c).clone()
        })
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        OperatorMatrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c).clone() * s.clone())
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = scalar::zero();
                for c in 0..self.cols {
                    if !self.at(r, c).is_zero() && !v[c].is_zero() {
                        acc += self.at(r, c).clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Horizontal concatenation [self | rhs].
    pub fn hstack(&self, rhs: &OperatorMatrix) -> Self {
        assert_eq!(self.rows, rhs.rows, "row count mismatch");
        OperatorMatrix::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                rhs.at(r, c - self.cols).clone()
            }
        })
    }

    /// Square submatrix determinant support and general minors.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        OperatorMatrix::from_fn(rows.len(), cols.len(), |r, c| {
            self.at(rows[r], cols[c]).clone()
        })
    }

    /// Exact determinant by elimination with row swaps.
    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return scalar::one();
        }
        let mut m = self.clone();
        let mut det = scalar::one();
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !m.at(r, col).is_zero()) {
                Some(p) => p,
                None => return scalar::zero(),
            };
            if pivot != col {
                for c in 0..n {
                    let a = m.at(col, c).clone();
                    let b = m.at(pivot, c).clone();
                    m.set(col, c, b);
                    m.set(pivot, c, a);
                }
                det = -det;
            }
            let p = m.at(col, col).clone();
            det *= p.clone();
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone() / p.clone();
                for c in col..n {
                    let v = m.at(r, c).clone() - factor.clone() * m.at(col, c).clone();
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// Matrix power for square matrices, exponent >= 0.
    pub fn pow(&self, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols, "power needs a square matrix");
        let mut result = OperatorMatrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }
}

/// Row-reduced echelon form together with the pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub mat: OperatorMatrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination. Pivots are chosen as the first row with a
/// nonzero entry in the current column, scanning columns left to right,
/// so the result is canonical for the row space.
pub fn reduced_echelon(m: &OperatorMatrix) -> Echelon {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row >= rows {
            break;
        }
        let pivot = match (next_row..rows).find(|&r| !a.at(r, col).is_zero()) {
            Some(p) => p,
            None => continue,
        };
        if pivot != next_row {
            for c in 0..cols {
                let x = a.at(next_row, c).clone();
                let y = a.at(pivot, c).clone();
                a.set(next_row, c, y);
                a.set(pivot, c, x);
            }
        }
        let p = a.at(next_row, col).clone();
        if !p.is_one() {
            for c in col..cols {
                let v = a.at(next_row, c).clone() / p.clone();
                a.set(next_row, c, v);
            }
        }
        for r in 0..rows {
            if r == next_row || a.at(r, col).is_zero() {
                continue;
            }
            let factor = a.at(r, col).clone();
            for c in col..cols {
                let v = a.at(r, c).clone() - factor.clone() * a.at(next_row, c).clone();
                a.set(r, c, v);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    Echelon { mat: a, pivots }
}

pub fn rank(m: &OperatorMatrix) -> usize {
    reduced_echelon(m).pivots.len()
}

/// A list of linearly independent vectors spanning a subspace of an
/// ambient coordinate space. Vectors are stored as rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vec<Scalar>>,
}

impl SubspaceBasis {
    /// Builds a basis, verifying lengths and linear independence.
    pub fn new(ambient: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient {
                return Err(Error::AmbientMismatch { left: ambient, right: v.len() });
            }
        }
        let count = vectors.len();
        let candidate = SubspaceBasis { ambient, vectors };
        if count > 0 && rank(&candidate.as_matrix_rows()) != count {
            return Err(Error::PropertyViolation {
                detail: "basis vectors are linearly dependent".into(),
            });
        }
        Ok(candidate)
    }

    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis { ambient, vectors: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let vectors = (0..ambient)
            .map(|k| {
                let mut v = vec![scalar::zero(); ambient];
                v[k] = scalar::one();
                v
            })
            .collect();
        SubspaceBasis { ambient, vectors }
    }

    /// Trusted constructor for vectors already known independent.
    fn from_independent(ambient: usize, vectors: Vec<Vec<Scalar>>) -> Self {
        SubspaceBasis { ambient, vectors }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Scalar>] {
        &self.vectors
    }

    pub fn as_matrix_rows(&self) -> OperatorMatrix {
        if self.vectors.is_empty() {
            return OperatorMatrix::zero(0, self.ambient);
        }
        OperatorMatrix::from_rows(self.vectors.clone())
    }

    /// Basis vectors as columns, for expressing vectors in this basis.
    pub fn as_matrix_cols(&self) -> OperatorMatrix {
        self.as_matrix_rows().transpose()
    }

    /// Canonical representative of the same span: nonzero rows of the RREF.
    pub fn canonical(&self) -> Self {
        let ech = reduced_echelon(&self.as_matrix_rows());
        let vectors = (0..ech.pivots.len()).map(|r| ech.mat.row(r)).collect();
        SubspaceBasis::from_independent(self.ambient, vectors)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient mismatch");
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.dim() == 0 {
            return false;
        }
        solve(&self.as_matrix_cols(), v).is_some()
    }

    pub fn same_span(&self, other: &SubspaceBasis) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && self.canonical() == other.canonical()
    }
}

/// Canonical basis of the row space of `m` (nonzero RREF rows).
pub fn row_space(m: &OperatorMatrix) -> SubspaceBasis {
    let ech = reduced_echelon(m);
    let vectors = (0..ech.pivots.len()).map(|r| ech.mat.row(r)).collect();
    SubspaceBasis::from_independent(m.cols(), vectors)
}

/// Kernel of `m` as a subspace of the column coordinate space.
///
/// One basis vector per free column, listed in ascending column order;
/// with the canonical echelon form this basis is itself canonical.
pub fn kernel_basis(m: &OperatorMatrix) -> SubspaceBasis {
    let ech = reduced_echelon(m);
    let cols = m.cols();
    let mut vectors = Vec::new();
    let mut is_pivot = vec![false; cols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![scalar::zero(); cols];
        v[free] = scalar::one();
        for (row, &p) in ech.pivots.iter().enumerate() {
            v[p] = -ech.mat.at(row, free).clone();
        }
        vectors.push(v);
    }
    SubspaceBasis::from_independent(cols, vectors)
}

/// Column space of `m`: the original columns at the pivot positions.
pub fn image_basis(m: &OperatorMatrix) -> SubspaceBasis {
    let ech = reduced_echelon(m);
    let vectors = ech.pivots.iter().map(|&c| m.col(c)).collect();
    SubspaceBasis::from_independent(m.rows(), vectors)
}

pub fn subspace_sum(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<SubspaceBasis> {
    if u.ambient() != v.ambient() {
        return Err(Error::AmbientMismatch { left: u.ambient(), right: v.ambient() });
    }
    let mut rows = u.vectors().to_vec();
    rows.extend(v.vectors().iter().cloned());
    Ok(SubspaceBasis { ambient: u.ambient(), vectors: rows }.canonical())
}

/// Intersection via the kernel of the concatenated system
/// [U^t | -V^t] (x, y) = 0; each solution gives the common vector U^t x.
pub fn subspace_intersect(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<SubspaceBasis> {
    if u.ambient() != v.ambient() {
        return Err(Error::AmbientMismatch { left: u.ambient(), right: v.ambient() });
    }
    if u.dim() == 0 || v.dim() == 0 {
        return Ok(SubspaceBasis::zero(u.ambient()));
    }
    let ut = u.as_matrix_cols();
    let vt = v.as_matrix_cols().scale(&scalar::int(-1));
    let system = ut.hstack(&vt);
    let null = kernel_basis(&system);
    let mut vectors = Vec::new();
    for w in null.vectors() {
        let x = &w[..u.dim()];
        let common = ut.apply(x);
        if common.iter().any(|s| !s.is_zero()) {
            vectors.push(common);
        }
    }
    Ok(SubspaceBasis { ambient: u.ambient(), vectors }.canonical())
}

/// Dimension of numerator/denominator, verifying denominator containment.
pub fn quotient_dim(numerator: &SubspaceBasis, denominator: &SubspaceBasis) -> Result<usize> {
    if numerator.ambient() != denominator.ambient() {
        return Err(Error::AmbientMismatch {
            left: numerator.ambient(),
            right: denominator.ambient(),
        });
    }
    for (k, v) in denominator.vectors().iter().enumerate() {
        if !numerator.contains(v) {
            return Err(Error::NotContained {
                detail: format!(
                    "denominator vector {k} of {} lies outside a numerator of dimension {}",
                    denominator.dim(),
                    numerator.dim()
                ),
            });
        }
    }
    Ok(numerator.dim() - denominator.dim())
}

/// One exact solution of `a x = b`, or None if the system is inconsistent.
/// Free variables are set to zero; when the columns of `a` are independent
/// the solution is unique.
pub fn solve(a: &OperatorMatrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let rhs = OperatorMatrix::from_fn(b.len(), 1, |r, _| b[r].clone());
    solve_matrix(a, &rhs).map(|m| m.col(0))
}

/// Simultaneous exact solve `a X = B` for all columns of `B`.
pub fn solve_matrix(a: &OperatorMatrix, b: &OperatorMatrix) -> Option<OperatorMatrix> {
    assert_eq!(a.rows(), b.rows(), "row count mismatch");
    let augmented = a.hstack(b);
    let ech = reduced_echelon(&augmented);
    if ech.pivots.iter().any(|&p| p >= a.cols()) {
        return None;
    }
    let mut x = OperatorMatrix::zero(a.cols(), b.cols());
    for (row, &p) in ech.pivots.iter().enumerate() {
        for c in 0..b.cols() {
            x.set(p, c, ech.mat.at(row, a.cols() + c).clone());
        }
    }
    Some(x)
}

/// Coordinates of `v` in `basis`, or None if `v` is outside its span.
pub fn coords_in_basis(basis: &SubspaceBasis, v: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(v.len(), basis.ambient(), "ambient mismatch");
    if basis.dim() == 0 {
        return if v.iter().all(Zero::is_zero) { Some(Vec::new()) } else { None };
    }
    solve(&basis.as_matrix_cols(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{complex, int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[Scalar]]) -> OperatorMatrix {
        OperatorMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    #[test]
    fn rank_of_dependent_complex_rows_is_one() {
        // second row is i times the first
        let a = m(&[&[int(1), complex(0, 1, 1, 1)], &[complex(0, 1, 1, 1), int(-1)]]);
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn kernel_and_image_dimensions_add_up() {
        let a = m(&[
            &[int(1), int(2), int(3)],
            &[int(2), int(4), int(6)],
            &[int(0), int(1), int(1)],
        ]);
        let r = rank(&a);
        assert_eq!(kernel_basis(&a).dim() + r, a.cols());
        assert_eq!(image_basis(&a).dim(), r);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&[&[int(1), rat(1, 2), int(0)], &[int(2), int(1), int(0)]]);
        let k = kernel_basis(&a);
        for v in k.vectors() {
            assert!(a.apply(v).iter().all(|s| s.is_zero()));
        }
    }

    #[test]
    fn sum_and_intersection_satisfy_dimension_formula() {
        let u = SubspaceBasis::new(3, vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]])
            .unwrap();
        let v = SubspaceBasis::new(3, vec![vec![int(0), int(1), int(1)], vec![int(0), int(0), int(1)]])
            .unwrap();
        let s = subspace_sum(&u, &v).unwrap();
        let i = subspace_intersect(&u, &v).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(i.dim(), 1);
        assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
        // the intersection of those two planes is the y-axis
        assert!(i.contains(&[int(0), int(1), int(0)]));
    }

    #[test]
    fn quotient_counts_codimension() {
        let k = SubspaceBasis::new(3, vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]])
            .unwrap();
        let i = SubspaceBasis::new(3, vec![vec![int(1), int(1), int(0)]]).unwrap();
        assert_eq!(quotient_dim(&k, &i).unwrap(), 1);
    }

    #[test]
    fn quotient_rejects_escaping_denominator() {
        let k = SubspaceBasis::new(2, vec![vec![int(1), int(0)]]).unwrap();
        let i = SubspaceBasis::new(2, vec![vec![int(0), int(1)]]).unwrap();
        assert!(matches!(quotient_dim(&k, &i), Err(Error::NotContained { .. })));
    }

    #[test]
    fn solve_recovers_exact_rational_solutions() {
        let a = m(&[&[int(2), int(1)], &[int(1), int(3)]]);
        let x = solve(&a, &[int(1), int(0)]).unwrap();
        assert_eq!(x, vec![rat(3, 5), rat(-1, 5)]);
        assert!(solve(&m(&[&[int(1), int(1)], &[int(1), int(1)]]), &[int(0), int(1)]).is_none());
    }

    #[test]
    fn determinant_tracks_row_swaps() {
        let a = m(&[&[int(0), int(1)], &[int(1), int(0)]]);
        assert_eq!(a.determinant(), int(-1));
        let b = m(&[&[int(2), int(0)], &[int(0), rat(1, 2)]]);
        assert_eq!(b.determinant(), int(1));
    }

    #[test]
    fn empty_shapes_are_handled() {
        let tall = OperatorMatrix::zero(3, 0);
        assert_eq!(rank(&tall), 0);
        assert_eq!(image_basis(&tall).dim(), 0);
        let wide = OperatorMatrix::zero(0, 3);
        assert_eq!(kernel_basis(&wide).dim(), 3);
    }

    #[test]
    fn new_basis_rejects_dependent_vectors() {
        let r = SubspaceBasis::new(2, vec![vec![int(1), int(1)], vec![int(2), int(2)]]);
        assert!(r.is_err());
    }

    fn small_scalar() -> impl Strategy<Value = Scalar> {
        (-4i64..=4, 1i64..=3, -2i64..=2).prop_map(|(n, d, im)| complex(n, d, im, 1))
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = OperatorMatrix> {
        prop::collection::vec(small_scalar(), rows * cols)
            .prop_map(move |data| OperatorMatrix::new(rows, cols, data))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_is_transpose_invariant(a in small_matrix(3, 4)) {
            prop_assert_eq!(rank(&a), rank(&a.transpose()));
        }

        #[test]
        fn rank_nullity_holds(a in small_matrix(4, 3)) {
            prop_assert_eq!(rank(&a) + kernel_basis(&a).dim(), a.cols());
        }

        #[test]
        fn images_land_in_image_basis(a in small_matrix(3, 3), v in prop::collection::vec(small_scalar(), 3)) {
            let img = image_basis(&a);
            prop_assert!(img.contains(&a.apply(&v)));
        }

        #[test]
        fn sum_intersection_dimension_formula(
            u_rows in prop::collection::vec(prop::collection::vec(small_scalar(), 4), 1..3),
            v_rows in prop::collection::vec(prop::collection::vec(small_scalar(), 4), 1..3),
        ) {
            // dependent random rows are fine: pass through the span
            let u = row_space(&OperatorMatrix::from_rows(u_rows));
            let v = row_space(&OperatorMatrix::from_rows(v_rows));
            let s = subspace_sum(&u, &v).unwrap();
            let i = subspace_intersect(&u, &v).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
        }
    }
}
