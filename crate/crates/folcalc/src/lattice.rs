//! Integer lattice dynamics of the dual action.
//!
//! A unimodular matrix A acts on Z^n through its transpose. Modes with a
//! finite orbit are detected exactly: the characteristic polynomial is
//! factored against cyclotomic polynomials, the lcm L of their orders
//! bounds every finite period, and k is periodic iff (A^t)^L k = k. Orbit
//! enumeration walks the box |k_i| <= N and keeps the orbits whose
//! lexicographically minimal element lies inside the box, so censuses for
//! growing N exhaust each other monotonically.

use crate::error::{Error, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{self, Scalar};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::collections::{BTreeMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMatrix {
    n: usize,
    entries: Vec<Vec<BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(n: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn in_box(&self, radius: u32) -> bool {
        let r = BigInt::from(radius);
        self.0.iter().all(|c| c.abs() <= r)
    }

    pub fn display(&self) -> String {
        let coords: Vec<String> = self.0.iter().map(BigInt::to_string).collect();
        format!("({})", coords.join(","))
    }
}

/// A finite orbit of the dual action, stored from its canonical
/// (lexicographically minimal) element; applying A^t to the last element
/// returns to the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeOrbit {
    representative: LatticeVector,
    elements: Vec<LatticeVector>,
}

impl LatticeOrbit {
    pub fn representative(&self) -> &LatticeVector {
        &self.representative
    }

    pub fn elements(&self) -> &[LatticeVector] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeClass {
    Finite(LatticeOrbit),
    Infinite,
}

impl UnimodularMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r][c]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|r| (0..n).map(|c| if r == c { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        UnimodularMatrix { n, entries }
    }

    pub fn transpose(&self) -> Self {
        let entries = (0..self.n)
            .map(|r| (0..self.n).map(|c| self.entries[c][r].clone()).collect())
            .collect();
        UnimodularMatrix { n: self.n, entries }
    }

    pub fn matmul(&self, rhs: &UnimodularMatrix) -> Self {
        assert_eq!(self.n, rhs.n);
        let entries = (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|c| {
                        (0..self.n)
                            .map(|k| &self.entries[r][k] * &rhs.entries[k][c])
                            .sum::<BigInt>()
                    })
                    .collect()
            })
            .collect();
        UnimodularMatrix { n: self.n, entries }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = UnimodularMatrix::identity(self.n);
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

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        LatticeVector(
            (0..self.n)
                .map(|r| (0..self.n).map(|c| &self.entries[r][c] * &v.0[c]).sum())
                .collect(),
        )
    }

    pub fn to_operator_matrix(&self) -> OperatorMatrix {
        OperatorMatrix::from_fn(self.n, self.n, |r, c| scalar::from_bigint(&self.entries[r][c]))
    }

    /// Coefficients of det(xI - A), ascending by power, always monic.
    pub fn charpoly(&self) -> Vec<BigInt> {
        // Faddeev-LeVerrier over exact rationals; the output is integral.
        let n = self.n;
        let a = self.to_operator_matrix();
        let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = OperatorMatrix::identity(n);
        for k in 1..=n {
            m = a.matmul(&m);
            let mut trace = Scalar::zero();
            for d in 0..n {
                trace += m.at(d, d).clone();
            }
            assert!(trace.im.is_zero(), "integer matrix trace must be real");
            let c = -trace.re / BigRational::from_integer(BigInt::from(k as i64));
            coeffs[n - k] = c.clone();
            let shift = OperatorMatrix::identity(n)
                .scale(&Scalar::from(c));
            m = m.add(&shift);
        }
        coeffs
            .into_iter()
            .map(|c| {
                assert!(c.is_integer(), "characteristic polynomial must be integral");
                c.to_integer()
            })
            .collect()
    }
}

/// Checks the input is square with determinant +1 or -1.
pub fn validate_unimodular(rows: Vec<Vec<BigInt>>) -> Result<UnimodularMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare);
    }
    let candidate = UnimodularMatrix { n, entries: rows };
    let det = candidate.to_operator_matrix().determinant();
    if !det.im.is_zero() || (!det.re.clone().abs().is_one()) {
        return Err(Error::NotUnimodular { determinant: scalar::fmt(&det) });
    }
    Ok(candidate)
}

/// Convenience constructor from machine integers.
pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<UnimodularMatrix> {
    validate_unimodular(
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect(),
    )
}

// --- integer polynomial helpers (ascending coefficient order) ---

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Divides monic `num` by monic `den`; returns the quotient only when the
/// division is exact.
fn poly_divide_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    assert!(den.last().map(BigInt::is_one).unwrap_or(false), "divisor must be monic");
    if num.len() < den.len() {
        return None;
    }
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - den.len() + 1];
    for shift in (0..quot.len()).rev() {
        let lead = rem[shift + den.len() - 1].clone();
        if lead.is_zero() {
            continue;
        }
        quot[shift] = lead.clone();
        for (i, d) in den.iter().enumerate() {
            rem[shift + i] -= &lead * d;
        }
    }
    if rem.iter().all(Zero::is_zero) {
        Some(quot)
    } else {
        None
    }
}

fn euler_phi(d: u64) -> u64 {
    let mut n = d;
    let mut result = d;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// d-th cyclotomic polynomial via x^d - 1 = prod over divisors.
fn cyclotomic(d: u64, cache: &mut BTreeMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = cache.get(&d) {
        return p.clone();
    }
    // x^d - 1
    let mut xd1 = vec![BigInt::zero(); d as usize + 1];
    xd1[0] = -BigInt::one();
    xd1[d as usize] = BigInt::one();
    let mut divisor_product = vec![BigInt::one()];
    for e in 1..d {
        if d % e == 0 {
            let phi_e = cyclotomic(e, cache);
            divisor_product = poly_mul(&divisor_product, &phi_e);
        }
    }
    let result = poly_divide_exact(&xd1, &divisor_product)
        .expect("cyclotomic recursion must divide exactly");
    cache.insert(d, result.clone());
    result
}

/// Least common multiple L of the orders of all cyclotomic factors of the
/// characteristic polynomial; L = 1 when there are none. Every finite
/// orbit of the dual action has size dividing L, so a mode k is periodic
/// iff (A^t)^L k = k.
pub fn period_bound(a: &UnimodularMatrix) -> u64 {
    let charpoly = a.charpoly();
    let n = a.n() as u64;
    // phi(d) >= sqrt(d/2), so phi(d) <= n forces d <= 2 n^2.
    let mut cache = BTreeMap::new();
    let mut l: u64 = 1;
    for d in 1..=(2 * n * n).max(2) {
        if euler_phi(d) > n {
            continue;
        }
        let phi_d = cyclotomic(d, &mut cache);
        if poly_divide_exact(&charpoly, &phi_d).is_some() {
            l = l.lcm(&d);
        }
    }
    l
}

/// Decides finiteness exactly and, for finite modes, traces the orbit and
/// rotates it to start at its lexicographic minimum.
pub fn classify_mode(a: &UnimodularMatrix, k: &LatticeVector) -> ModeClass {
    assert_eq!(k.len(), a.n(), "mode dimension mismatch");
    let at = a.transpose();
    let l = period_bound(a);
    if at.pow(l).apply(k) != *k {
        return ModeClass::Infinite;
    }
    ModeClass::Finite(trace_orbit(&at, k))
}

fn trace_orbit(at: &UnimodularMatrix, k: &LatticeVector) -> LatticeOrbit {
    let mut elements = vec![k.clone()];
    let mut current = at.apply(k);
    while current != *k {
        elements.push(current.clone());
        current = at.apply(&current);
    }
    let min_pos = elements
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.cmp(y))
        .map(|(i, _)| i)
        .expect("orbit is nonempty");
    elements.rotate_left(min_pos);
    LatticeOrbit { representative: elements[0].clone(), elements }
}

/// All finite orbits whose canonical representative lies in the box
/// |k_i| <= N, sorted by representative. The census at N is a subset of
/// the census at N + 1.
pub fn enumerate_orbits(a: &UnimodularMatrix, n_box: u32) -> Vec<LatticeOrbit> {
    let at = a.transpose();
    let l = period_bound(a);
    let at_l = at.pow(l);
    let n = a.n();
    let mut found: BTreeMap<LatticeVector, LatticeOrbit> = BTreeMap::new();
    let mut seen: HashSet<LatticeVector> = HashSet::new();
    let radius = n_box as i64;
    let mut coords = vec![-radius; n];
    loop {
        let k = LatticeVector(coords.iter().map(|&c| BigInt::from(c)).collect());
        if !seen.contains(&k) && at_l.apply(&k) == k {
            let orbit = trace_orbit(&at, &k);
            for e in orbit.elements() {
                seen.insert(e.clone());
            }
            if orbit.representative().in_box(n_box) {
                found.insert(orbit.representative().clone(), orbit);
            }
        }
        // odometer over the box
        let mut pos = n;
        loop {
            if pos == 0 {
                return found.into_values().collect();
            }
            pos -= 1;
            if coords[pos] < radius {
                coords[pos] += 1;
                for c in coords.iter_mut().skip(pos + 1) {
                    *c = -radius;
                }
                break;
            }
        }
    }
}
