//! Constant-coefficient exterior algebra over a fixed covector frame.
//!
//! Two frames exist: the real frame dx_1..dx_n and, for even n = 2m, the
//! complex frame dz_1..dz_m, dzbar_1..dzbar_m obtained from
//! dz_j = dx_{2j-1} + i dx_{2j}. Monomials are strictly increasing index
//! tuples ordered lexicographically; all coefficients are Gaussian
//! rationals and forms never store explicit zero terms.

use crate::error::{Error, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{self, Scalar};
use num::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// dx_1 .. dx_n
    Real { n: usize },
    /// dz_1 .. dz_m followed by dzbar_1 .. dzbar_m
    Complex { m: usize },
}

impl Frame {
    pub fn len(&self) -> usize {
        match self {
            Frame::Real { n } => *n,
            Frame::Complex { m } => 2 * m,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Human-readable covector name, 1-based like the usual notation.
    pub fn label(&self, idx: usize) -> String {
        match self {
            Frame::Real { .. } => format!("dx{}", idx + 1),
            Frame::Complex { m } => {
                if idx < *m {
                    format!("dz{}", idx + 1)
                } else {
                    format!("dzbar{}", idx - m + 1)
                }
            }
        }
    }
}

/// Strictly increasing tuple of 0-based covector indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        assert!(
            indices.windows(2).all(|w| w[0] < w[1]),
            "multi-index must be strictly increasing"
        );
        MultiIndex(indices)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// All degree-k monomials on `len` covectors, in lexicographic order.
pub fn monomials(len: usize, k: usize) -> Vec<MultiIndex> {
    if k > len {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(len, k));
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(MultiIndex(current.clone()));
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] + (k - i) < len {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Merge two strictly increasing index tuples, returning the merged tuple
/// and the Koszul sign, or None when they share an index.
fn merge_with_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut negative = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            merged.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining entries of a
            if (a.len() - i) % 2 == 1 {
                negative = !negative;
            }
            merged.push(b[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);
    Some((merged, negative))
}

/// Homogeneous form with exact coefficients; zero terms are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameForm {
    frame: Frame,
    degree: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl FrameForm {
    pub fn zero(frame: Frame, degree: usize) -> Self {
        FrameForm { frame, degree, terms: BTreeMap::new() }
    }

    pub fn monomial(frame: Frame, index: MultiIndex, coefficient: Scalar) -> Self {
        assert!(
            index.indices().iter().all(|&i| i < frame.len()),
            "index outside the frame"
        );
        let degree = index.degree();
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(index, coefficient);
        }
        FrameForm { frame, degree, terms }
    }

    pub fn basis_covector(frame: Frame, idx: usize) -> Self {
        FrameForm::monomial(frame, MultiIndex::new(vec![idx]), scalar::one())
    }

    /// The constant function 1 as a 0-form.
    pub fn unit(frame: Frame) -> Self {
        FrameForm::monomial(frame, MultiIndex::empty(), scalar::one())
    }

    /// Rebuilds a form from coefficients over `monomials(frame.len(), degree)`.
    pub fn from_coefficients(frame: Frame, degree: usize, coeffs: &[Scalar]) -> Self {
        let basis = monomials(frame.len(), degree);
        assert_eq!(coeffs.len(), basis.len(), "coefficient count mismatch");
        let mut terms = BTreeMap::new();
        for (idx, c) in basis.into_iter().zip(coeffs) {
            if !c.is_zero() {
                terms.insert(idx, c.clone());
            }
        }
        FrameForm { frame, degree, terms }
    }

    /// Coefficient vector over the lexicographic monomial basis.
    pub fn coefficients(&self) -> Vec<Scalar> {
        monomials(self.frame.len(), self.degree)
            .iter()
            .map(|idx| self.coefficient(idx))
            .collect()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Scalar {
        self.terms.get(index).cloned().unwrap_or_else(scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &FrameForm) -> Result<FrameForm> {
        if self.frame != other.frame || self.degree != other.degree {
            return Err(Error::FrameMismatch);
        }
        let mut terms = self.terms.clone();
        for (idx, c) in &other.terms {
            let entry = terms.entry(idx.clone()).or_insert_with(scalar::zero);
            *entry += c.clone();
            if entry.is_zero() {
                terms.remove(idx);
            }
        }
        Ok(FrameForm { frame: self.frame, degree: self.degree, terms })
    }

    pub fn scale(&self, s: &Scalar) -> FrameForm {
        if s.is_zero() {
            return FrameForm::zero(self.frame, self.degree);
        }
        let terms = self
            .terms
            .iter()
            .map(|(idx, c)| (idx.clone(), c.clone() * s.clone()))
            .collect();
        FrameForm { frame: self.frame, degree: self.degree, terms }
    }

    pub fn neg(&self) -> FrameForm {
        self.scale(&scalar::int(-1))
    }

    /// Exterior product with the Koszul sign convention.
    pub fn wedge(&self, other: &FrameForm) -> Result<FrameForm> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        let degree = self.degree + other.degree;
        let mut terms: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((merged, negative)) = merge_with_sign(ia.indices(), ib.indices()) {
                    let mut c = ca.clone() * cb.clone();
                    if negative {
                        c = -c;
                    }
                    *terms.entry(MultiIndex(merged)).or_insert_with(scalar::zero) += c;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(FrameForm { frame: self.frame, degree, terms })
    }

    /// k-fold wedge power.
    pub fn wedge_power(&self, k: usize) -> Result<FrameForm> {
        let mut acc = FrameForm::unit(self.frame);
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Diagnostic rendering such as "1/2 dz1^dzbar2".
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(idx, c)| {
                let names: Vec<String> =
                    idx.indices().iter().map(|&i| self.frame.label(i)).collect();
                if names.is_empty() {
                    scalar::fmt(c)
                } else {
                    format!("{} {}", scalar::fmt(c), names.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Matrix of the induced action of `m` on degree-k monomials: the entry at
/// (row I, column J) is the k x k minor of `m` with rows I and columns J.
/// Functorial: induced_map(AB, k) = induced_map(A, k) * induced_map(B, k).
pub fn induced_map(m: &OperatorMatrix, k: usize) -> OperatorMatrix {
    assert_eq!(m.rows(), m.cols(), "induced map needs a square matrix");
    let basis = monomials(m.rows(), k);
    let dim = basis.len();
    OperatorMatrix::from_fn(dim, dim, |r, c| {
        m.submatrix(basis[r].indices(), basis[c].indices()).determinant()
    })
}

/// Matrix of left wedge multiplication v -> form ^ v from degree
/// `src_degree` to degree `src_degree + form.degree()`, over lexicographic
/// monomial bases. Degrees past the frame length give a 0-row matrix.
pub fn wedge_matrix(form: &FrameForm, src_degree: usize) -> OperatorMatrix {
    let len = form.frame().len();
    let src = monomials(len, src_degree);
    let dst_degree = src_degree + form.degree();
    let rows = binomial(len, dst_degree);
    let mut out = OperatorMatrix::zero(rows, src.len());
    for (j, idx) in src.iter().enumerate() {
        let image = form
            .wedge(&FrameForm::monomial(form.frame(), idx.clone(), scalar::one()))
            .expect("same frame");
        for (i, c) in image.coefficients().iter().enumerate() {
            if !c.is_zero() {
                out.set(i, j, c.clone());
            }
        }
    }
    out
}

/// Coordinate-change matrix between the real and complex covector frames,
/// with rows ordered pairwise (dz_1, dzbar_1, dz_2, dzbar_2, ...) over the
/// real columns (dx_1, ..., dx_n). For n = 2 this is [[1, i], [1, -i]];
/// larger n give a block diagonal of that 2 x 2 block per coordinate pair.
/// Note the monomial order of the complex frame itself stays
/// dz_1 < ... < dz_m < dzbar_1 < ... < dzbar_m.
pub fn complex_frame_change(n: usize) -> Result<OperatorMatrix> {
    if n % 2 != 0 || n == 0 {
        return Err(Error::OddDimension { n });
    }
    let mut out = OperatorMatrix::zero(n, n);
    for j in 0..n / 2 {
        out.set(2 * j, 2 * j, scalar::one());
        out.set(2 * j, 2 * j + 1, scalar::i());
        out.set(2 * j + 1, 2 * j, scalar::one());
        out.set(2 * j + 1, 2 * j + 1, -scalar::i());
    }
    Ok(out)
}

/// Rewrites a real-frame form in the complex frame by substituting
/// dx_{2j-1} = (dz_j + dzbar_j)/2 and dx_{2j} = (dz_j - dzbar_j)/(2i).
pub fn to_complex(form: &FrameForm) -> Result<FrameForm> {
    let n = match form.frame() {
        Frame::Real { n } => n,
        Frame::Complex { .. } => return Err(Error::FrameMismatch),
    };
    if n % 2 != 0 || n == 0 {
        return Err(Error::OddDimension { n });
    }
    let m = n / 2;
    let target = Frame::Complex { m };
    let image_of = |i: usize| -> FrameForm {
        let pair = i / 2;
        let dz = FrameForm::basis_covector(target, pair);
        let dzbar = FrameForm::basis_covector(target, m + pair);
        if i % 2 == 0 {
            // dx = (dz + dzbar)/2
            dz.scale(&scalar::rat(1, 2)).add(&dzbar.scale(&scalar::rat(1, 2))).unwrap()
        } else {
            // dy = (dz - dzbar)/(2i) = -(i/2) dz + (i/2) dzbar
            let half_i = scalar::complex(0, 1, 1, 2);
            dz.scale(&-half_i.clone()).add(&dzbar.scale(&half_i)).unwrap()
        }
    };
    substitute(form, target, image_of)
}

/// Rewrites a complex-frame form in the real frame by substituting
/// dz_j = dx_{2j-1} + i dx_{2j} and its conjugate.
pub fn to_real(form: &FrameForm) -> Result<FrameForm> {
    let m = match form.frame() {
        Frame::Complex { m } => m,
        Frame::Real { .. } => return Err(Error::FrameMismatch),
    };
    let target = Frame::Real { n: 2 * m };
    let image_of = |i: usize| -> FrameForm {
        let (pair, conjugate) = if i < m { (i, false) } else { (i - m, true) };
        let dx = FrameForm::basis_covector(target, 2 * pair);
        let dy = FrameForm::basis_covector(target, 2 * pair + 1);
        let coeff = if conjugate { -scalar::i() } else { scalar::i() };
        dx.add(&dy.scale(&coeff)).unwrap()
    };
    substitute(form, target, image_of)
}

fn substitute(
    form: &FrameForm,
    target: Frame,
    image_of: impl Fn(usize) -> FrameForm,
) -> Result<FrameForm> {
    let mut acc = FrameForm::zero(target, form.degree());
    for (idx, c) in form.terms() {
        let mut product = FrameForm::unit(target).scale(c);
        for &i in idx.indices() {
            product = product.wedge(&image_of(i))?;
        }
        acc = acc.add(&product)?;
    }
    Ok(acc)
}

/// Splits a complex-frame form into its (p, q) components, keyed by
/// bidegree. Components recombine exactly to the input.
pub fn bigrade(form: &FrameForm) -> Result<BTreeMap<(usize, usize), FrameForm>> {
    let m = match form.frame() {
        Frame::Complex { m } => m,
        Frame::Real { .. } => return Err(Error::FrameMismatch),
    };
    let mut parts: BTreeMap<(usize, usize), FrameForm> = BTreeMap::new();
    for (idx, c) in form.terms() {
        let p = idx.indices().iter().filter(|&&i| i < m).count();
        let q = idx.degree() - p;
        let part = parts
            .entry((p, q))
            .or_insert_with(|| FrameForm::zero(form.frame(), form.degree()));
        *part = part.add(&FrameForm::monomial(form.frame(), idx.clone(), c.clone()))?;
    }
    Ok(parts)
}

/// Monomial positions (within `monomials(2m, p+q)`) of the (p, q) block.
pub fn bidegree_positions(m: usize, p: usize, q: usize) -> Vec<usize> {
    monomials(2 * m, p + q)
        .iter()
        .enumerate()
        .filter(|(_, idx)| idx.indices().iter().filter(|&&i| i < m).count() == p)
        .map(|(pos, _)| pos)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn real(n: usize) -> Frame {
        Frame::Real { n }
    }

    #[test]
    fn monomial_enumeration_is_lexicographic() {
        let ms = monomials(4, 2);
        let expected: Vec<Vec<usize>> = vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
        ];
        assert_eq!(ms.iter().map(|m| m.indices().to_vec()).collect::<Vec<_>>(), expected);
        assert_eq!(monomials(5, 0).len(), 1);
        assert_eq!(monomials(3, 4).len(), 0);
    }

    #[test]
    fn wedge_applies_koszul_signs() {
        let f = real(3);
        let dx = FrameForm::basis_covector(f, 0);
        let dy = FrameForm::basis_covector(f, 1);
        let xy = dx.wedge(&dy).unwrap();
        let yx = dy.wedge(&dx).unwrap();
        assert_eq!(xy.coefficient(&MultiIndex::new(vec![0, 1])), int(1));
        assert_eq!(yx.coefficient(&MultiIndex::new(vec![0, 1])), int(-1));
        assert!(dx.wedge(&dx).unwrap().is_zero());
    }

    #[test]
    fn wedge_beyond_top_degree_vanishes() {
        let f = real(2);
        let dx = FrameForm::basis_covector(f, 0);
        let dy = FrameForm::basis_covector(f, 1);
        let top = dx.wedge(&dy).unwrap();
        assert!(top.wedge(&dx).unwrap().is_zero());
    }

    #[test]
    fn induced_map_degree_edges() {
        let m = OperatorMatrix::from_rows(vec![
            vec![int(1), int(2)],
            vec![int(3), int(4)],
        ]);
        assert_eq!(induced_map(&m, 0), OperatorMatrix::identity(1));
        assert_eq!(induced_map(&m, 1), m);
        let top = induced_map(&m, 2);
        assert_eq!(top.at(0, 0), &int(-2)); // the determinant
    }

    #[test]
    fn complex_frame_change_matches_block_form() {
        let c = complex_frame_change(2).unwrap();
        assert_eq!(c.at(0, 0), &int(1));
        assert_eq!(c.at(0, 1), &scalar::i());
        assert_eq!(c.at(1, 0), &int(1));
        assert_eq!(c.at(1, 1), &(-scalar::i()));
        let c4 = complex_frame_change(4).unwrap();
        // block diagonal: nothing couples the two coordinate pairs
        for r in 0..2 {
            for col in 2..4 {
                assert!(c4.at(r, col).is_zero());
                assert!(c4.at(col, r).is_zero());
            }
        }
        assert!(matches!(complex_frame_change(3), Err(Error::OddDimension { n: 3 })));
    }

    #[test]
    fn frame_round_trip_is_identity() {
        for n in [2usize, 4] {
            for k in 0..=n {
                for idx in monomials(n, k) {
                    let form = FrameForm::monomial(real(n), idx, int(1));
                    let back = to_real(&to_complex(&form).unwrap()).unwrap();
                    assert_eq!(back, form);
                }
            }
        }
    }

    #[test]
    fn dx1_splits_into_half_dz_half_dzbar() {
        let form = FrameForm::basis_covector(real(2), 0);
        let parts = bigrade(&to_complex(&form).unwrap()).unwrap();
        let dz = parts.get(&(1, 0)).unwrap();
        let dzbar = parts.get(&(0, 1)).unwrap();
        assert_eq!(dz.coefficient(&MultiIndex::new(vec![0])), rat(1, 2));
        assert_eq!(dzbar.coefficient(&MultiIndex::new(vec![1])), rat(1, 2));
    }

    #[test]
    fn bigrade_components_recombine_exactly() {
        for n in [2usize, 4] {
            for k in 0..=n {
                for idx in monomials(n, k) {
                    let form = FrameForm::monomial(real(n), idx, int(3));
                    let complexified = to_complex(&form).unwrap();
                    let parts = bigrade(&complexified).unwrap();
                    let mut sum = FrameForm::zero(complexified.frame(), k);
                    for part in parts.values() {
                        sum = sum.add(part).unwrap();
                    }
                    assert_eq!(sum, complexified);
                }
            }
        }
    }

    #[test]
    fn frame_mismatch_is_rejected() {
        let a = FrameForm::basis_covector(real(2), 0);
        let b = FrameForm::basis_covector(Frame::Complex { m: 1 }, 0);
        assert!(matches!(a.wedge(&b), Err(Error::FrameMismatch)));
        assert!(matches!(a.add(&b), Err(Error::FrameMismatch)));
    }

    fn small_int_matrix(n: usize) -> impl Strategy<Value = OperatorMatrix> {
        prop::collection::vec(-3i64..=3, n * n).prop_map(move |vals| {
            OperatorMatrix::from_fn(n, n, |r, c| int(vals[r * n + c]))
        })
    }

    fn small_form(n: usize, k: usize) -> impl Strategy<Value = FrameForm> {
        let count = monomials(n, k).len();
        prop::collection::vec(-3i64..=3, count).prop_map(move |coeffs| {
            let cs: Vec<Scalar> = coeffs.iter().map(|&v| int(v)).collect();
            FrameForm::from_coefficients(real(n), k, &cs)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn induced_map_is_functorial(a in small_int_matrix(4), b in small_int_matrix(4), k in 0usize..=4) {
            let lhs = induced_map(&a.matmul(&b), k);
            let rhs = induced_map(&a, k).matmul(&induced_map(&b, k));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn odd_even_wedge_commutes(a in small_form(4, 1), b in small_form(4, 2)) {
            // graded sign (-1)^{1*2} = +1
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap();
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn odd_odd_wedge_anticommutes(a in small_form(4, 1), b in small_form(4, 1)) {
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap();
            prop_assert_eq!(ab, ba.neg());
        }

        #[test]
        fn wedge_is_associative(a in small_form(4, 1), b in small_form(4, 1), c in small_form(4, 2)) {
            let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
