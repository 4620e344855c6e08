//! Exact rational matrices and canonical subspaces.
//!
//! Every rank, containment and equality decision in the crate goes through
//! this module. Subspaces are stored by their reduced row-echelon basis, so
//! two subspaces are equal exactly when their basis matrices are equal.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{dim_mismatch, Error, Result};

/// Arbitrary-precision rational scalar, always in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational `{s}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational `{s}`")))?;
    if den.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerator/denominator: scale down by shifting
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

pub fn zero_vec(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rational> {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `dst += f * src`
pub fn axpy(dst: &mut [Rational], f: &Rational, src: &[Rational]) {
    if f.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += f * s;
        }
    }
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Rational], f: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * f).collect()
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_mismatch("matrix entry count", rows * cols, data.len()));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Rows must all have the same length; an empty list gives a 0x`cols` matrix.
    pub fn from_rows(rows: &[Vec<Rational>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(dim_mismatch("matrix row length", cols, r.len()));
            }
            data.extend(r.iter().cloned());
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_cols(cols: &[Vec<Rational>], rows: usize) -> Result<Self> {
        Ok(Mat::from_rows(cols, rows)?.transpose())
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Mat {
            rows,
            cols,
            data: entries.iter().map(|&e| rat(e)).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Matrix unit `E_ij` (0-based).
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(rows, cols);
        m[(i, j)] = Rational::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    /// Row-major flattening, used to treat `gl(n)` as `n*n`-dimensional.
    pub fn vectorize(&self) -> Vec<Rational> {
        self.data.clone()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, f: &Rational) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: vec_scale(&self.data, f),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "mul_vec length");
        let mut out = zero_vec(self.rows);
        for j in 0..self.cols {
            if v[j].is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self.data[i * self.cols + j];
                if !a.is_zero() {
                    *o += a * &v[j];
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(dim_mismatch("matrix product inner dimension", self.cols, other.rows));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows {
            return Err(dim_mismatch("hstack rows", self.rows, other.rows));
        }
        Ok(Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.cols {
            return Err(dim_mismatch("vstack cols", self.cols, other.cols));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn block_diag(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// Exact inverse, `None` when singular or non-square.
    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Mat::zeros(0, 0));
        }
        let aug = self.hstack(&Mat::identity(n)).ok()?;
        let (r, pivots) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }

    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(|x| x.abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matrix product shape")
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: vec_add(&self.data, &rhs.data),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: vec_sub(&self.data, &rhs.data),
        }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Incrementally maintained reduced row-echelon basis.
///
/// Rows stay fully reduced and sorted by pivot after every insertion, so the
/// builder never holds more than `cols` rows no matter how many vectors are fed.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Reduces `v` against the current rows in place.
    pub fn reduce(&self, v: &mut [Rational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = -v[p].clone();
                axpy(v, &f, row);
            }
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        is_zero_vec(&w)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.cols, "echelon vector length");
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = -row[p].clone();
                axpy(row, &f, &w);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        true
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn into_subspace(self) -> Subspace {
        let basis = Mat::from_rows(&self.rows, self.cols).expect("echelon rows");
        Subspace {
            ambient_dim: self.cols,
            basis,
            pivots: self.pivots,
        }
    }
}

/// Reduced row-echelon form with ascending pivot columns; zero rows are kept at the bottom.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut e = Echelon::new(m.cols());
    for i in 0..m.rows() {
        if e.is_full() {
            break;
        }
        e.insert(m.row(i));
    }
    let pivots = e.pivots.clone();
    let mut out = Mat::zeros(m.rows(), m.cols());
    for (i, r) in e.rows.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            out[(i, j)] = x.clone();
        }
    }
    (out, pivots)
}

/// Null space `{v : m v = 0}` with canonical basis.
pub fn kernel(m: &Mat) -> Subspace {
    let mut e = Echelon::new(m.cols());
    for i in 0..m.rows() {
        if e.is_full() {
            break;
        }
        e.insert(m.row(i));
    }
    kernel_of_echelon(&e)
}

pub(crate) fn kernel_of_echelon(e: &Echelon) -> Subspace {
    let n = e.cols;
    let free: Vec<usize> = (0..n).filter(|c| !e.pivots.contains(c)).collect();
    // Each free column gives one kernel vector; ordering by decreasing free
    // column already yields an echelon family, canonicalized below.
    let mut out = Echelon::new(n);
    for &f in &free {
        let mut v = zero_vec(n);
        v[f] = Rational::one();
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            v[p] = -row[f].clone();
        }
        out.insert(&v);
    }
    out.into_subspace()
}

/// Result of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// One particular solution, `None` when the system is inconsistent.
    pub particular: Option<Vec<Rational>>,
    pub kernel: Subspace,
}

impl Solution {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }
}

/// Solves `a x = b`; inconsistency is reported through `particular == None`.
pub fn solve(a: &Mat, b: &[Rational]) -> Result<Solution> {
    if a.rows() != b.len() {
        return Err(dim_mismatch("right-hand side length", a.rows(), b.len()));
    }
    let n = a.cols();
    let bcol = Mat::from_cols(&[b.to_vec()], b.len())?;
    let aug = a.hstack(&bcol)?;
    let (r, pivots) = rref(&aug);
    let kern = kernel(a);
    if pivots.last() == Some(&n) {
        return Ok(Solution {
            particular: None,
            kernel: kern,
        });
    }
    let mut x = zero_vec(n);
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[(i, n)].clone();
    }
    Ok(Solution {
        particular: Some(x),
        kernel: kern,
    })
}

/// Linear subspace of `Q^ambient_dim` in canonical RREF representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::zeros(0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span<V: AsRef<[Rational]>>(
        ambient_dim: usize,
        vectors: impl IntoIterator<Item = V>,
    ) -> Result<Self> {
        let mut e = Echelon::new(ambient_dim);
        for v in vectors {
            let v = v.as_ref();
            if v.len() != ambient_dim {
                return Err(dim_mismatch("spanning vector length", ambient_dim, v.len()));
            }
            e.insert(v);
        }
        Ok(e.into_subspace())
    }

    /// Span of the rows of `m`.
    pub fn row_space(m: &Mat) -> Self {
        Subspace::span(m.cols(), m.row_vecs()).expect("row lengths match")
    }

    /// Span of the columns of `m` (the image of `m`).
    pub fn col_space(m: &Mat) -> Self {
        Subspace::span(m.rows(), m.col_vecs()).expect("column lengths match")
    }

    /// Span of matrices, flattened row-major.
    pub fn span_mats<'a>(ambient_dim: usize, mats: impl IntoIterator<Item = &'a Mat>) -> Result<Self> {
        Subspace::span(ambient_dim, mats.into_iter().map(|m| m.vectorize()))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.row_vecs()
    }

    pub fn basis_vector(&self, i: usize) -> &[Rational] {
        self.basis.row(i)
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn echelon(&self) -> Echelon {
        Echelon {
            cols: self.ambient_dim,
            rows: self.basis.row_vecs(),
            pivots: self.pivots.clone(),
        }
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if self.ambient_dim != n {
            return Err(dim_mismatch("ambient dimension", self.ambient_dim, n));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        self.check_ambient(v.len())?;
        Ok(self.echelon().contains(v))
    }

    pub fn is_subset(&self, other: &Subspace) -> Result<bool> {
        other.check_ambient(self.ambient_dim)?;
        let e = other.echelon();
        Ok((0..self.dim()).all(|i| e.contains(self.basis.row(i))))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        other.check_ambient(self.ambient_dim)?;
        let mut e = self.echelon();
        for i in 0..other.dim() {
            e.insert(other.basis.row(i));
        }
        Ok(e.into_subspace())
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        other.check_ambient(self.ambient_dim)?;
        let stacked = self.annihilator().vstack(&other.annihilator())?;
        Ok(kernel(&stacked))
    }

    /// Rows span the orthogonal complement: `v` lies in the subspace iff `ann * v == 0`.
    pub fn annihilator(&self) -> Mat {
        kernel(&self.basis).basis.clone()
    }

    /// Coordinates with respect to the canonical basis, `None` if `v` is outside.
    pub fn coords(&self, v: &[Rational]) -> Result<Option<Vec<Rational>>> {
        self.check_ambient(v.len())?;
        let c: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let back = self.combine(&c);
        Ok(if back.as_slice() == v { Some(c) } else { None })
    }

    /// `sum_i c_i b_i` over the canonical basis.
    pub fn combine(&self, c: &[Rational]) -> Vec<Rational> {
        assert_eq!(c.len(), self.dim(), "coordinate count");
        let mut out = zero_vec(self.ambient_dim);
        for (i, ci) in c.iter().enumerate() {
            axpy(&mut out, ci, self.basis.row(i));
        }
        out
    }

    /// The complement spanned by the standard vectors at non-pivot positions.
    pub fn standard_complement(&self) -> Subspace {
        let free: Vec<usize> = (0..self.ambient_dim).filter(|c| !self.pivots.contains(c)).collect();
        Subspace::span(self.ambient_dim, free.iter().map(|&f| unit_vec(self.ambient_dim, f)))
            .expect("unit vectors")
    }

    /// Matrix of `V -> V/self` in the non-pivot coordinates.
    pub fn quotient_projection(&self) -> Mat {
        let free: Vec<usize> = (0..self.ambient_dim).filter(|c| !self.pivots.contains(c)).collect();
        let mut m = Mat::zeros(free.len(), self.ambient_dim);
        for (r, &f) in free.iter().enumerate() {
            m[(r, f)] = Rational::one();
            // v - sum_i v[p_i] b_i, read at coordinate f
            for (i, &p) in self.pivots.iter().enumerate() {
                let b = &self.basis[(i, f)];
                if !b.is_zero() {
                    m[(r, p)] -= b;
                }
            }
        }
        m
    }

    /// Section of [`Self::quotient_projection`]: fills the non-pivot coordinates.
    pub fn quotient_lift(&self) -> Mat {
        let free: Vec<usize> = (0..self.ambient_dim).filter(|c| !self.pivots.contains(c)).collect();
        let mut m = Mat::zeros(self.ambient_dim, free.len());
        for (c, &f) in free.iter().enumerate() {
            m[(f, c)] = Rational::one();
        }
        m
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image(&self, map: &Mat) -> Result<Subspace> {
        if map.cols() != self.ambient_dim {
            return Err(dim_mismatch("map source dimension", self.ambient_dim, map.cols()));
        }
        Subspace::span(map.rows(), (0..self.dim()).map(|i| map.mul_vec(self.basis.row(i))))
    }

    /// Basis vectors reshaped to `n x n` matrices.
    pub fn basis_mats(&self, n: usize) -> Result<Vec<Mat>> {
        self.check_ambient(n * n)?;
        (0..self.dim())
            .map(|i| Mat::from_vec(n, n, self.basis.row(i).to_vec()))
            .collect()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) ", self.dim(), self.ambient_dim)?;
        let rows: Vec<String> = self
            .basis
            .row_vecs()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "{{{}}}", rows.join(", "))
    }
}

/// Coordinates with respect to an arbitrary (not necessarily canonical) basis.
#[derive(Clone, Debug)]
pub struct Basis {
    vectors: Vec<Vec<Rational>>,
    ambient_dim: usize,
    rows: Vec<usize>,
    inv: Mat,
}

impl Basis {
    /// Fails when the vectors are linearly dependent.
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(dim_mismatch("basis vector length", ambient_dim, v.len()));
            }
        }
        let d = vectors.len();
        // columns = basis vectors; pick d independent rows
        let m = Mat::from_cols(&vectors, ambient_dim)?;
        let (_, rows) = rref(&m.transpose());
        if rows.len() < d {
            return Err(Error::InvalidInput("basis vectors are linearly dependent".into()));
        }
        let all_cols: Vec<usize> = (0..d).collect();
        let inv = m
            .submatrix(&rows, &all_cols)
            .inverse()
            .ok_or_else(|| Error::InvalidInput("basis vectors are linearly dependent".into()))?;
        Ok(Basis {
            vectors,
            ambient_dim,
            rows,
            inv,
        })
    }

    pub fn from_cols(m: &Mat) -> Result<Self> {
        Basis::new(m.rows(), m.col_vecs())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn combine(&self, c: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.ambient_dim);
        for (ci, v) in c.iter().zip(&self.vectors) {
            axpy(&mut out, ci, v);
        }
        out
    }

    /// Coordinates of `v`, `None` when `v` is outside the span.
    pub fn coords(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        let sel: Vec<Rational> = self.rows.iter().map(|&r| v[r].clone()).collect();
        let c = self.inv.mul_vec(&sel);
        if self.combine(&c).as_slice() == v {
            Some(c)
        } else {
            None
        }
    }

    pub fn span(&self) -> Subspace {
        Subspace::span(self.ambient_dim, &self.vectors).expect("basis lengths")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> Mat {
        Mat::from_i64(rows, cols, e)
    }

    fn v(e: &[i64]) -> Vec<Rational> {
        e.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn rref_identity_and_zero() {
        let (r, p) = rref(&Mat::identity(3));
        assert_eq!(r, Mat::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        let (r, p) = rref(&Mat::zeros(2, 3));
        assert_eq!(r, Mat::zeros(2, 3));
        assert!(p.is_empty());
    }

    #[test]
    fn rref_hand_reduction() {
        // [[2,4],[1,2]]: halve the first row, subtract it from the second
        let (r, p) = rref(&m(2, 2, &[2, 4, 1, 2]));
        assert_eq!(r, m(2, 2, &[1, 2, 0, 0]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_cases() {
        assert!(kernel(&Mat::identity(4)).is_zero());
        assert_eq!(kernel(&Mat::zeros(2, 3)), Subspace::full(3));
        let a = m(1, 2, &[1, 2]);
        let k = kernel(&a);
        assert_eq!(k.dim(), 1);
        // canonical form of span{(-2, 1)}
        assert_eq!(k.basis_vector(0), &[rat(1), ratio(-1, 2)][..]);
        assert!(is_zero_vec(&a.mul_vec(k.basis_vector(0))));
    }

    #[test]
    fn solve_cases() {
        let b = v(&[3, -1, 7]);
        let s = solve(&Mat::identity(3), &b).unwrap();
        assert_eq!(s.particular, Some(b));
        assert!(s.kernel.is_zero());

        let s = solve(&Mat::zeros(2, 2), &v(&[0, 0])).unwrap();
        assert_eq!(s.particular, Some(v(&[0, 0])));
        assert!(s.kernel.is_full());

        // rank [a] = 1 < rank [a|b] = 2
        let s = solve(&m(2, 2, &[1, 1, 1, 1]), &v(&[1, 2])).unwrap();
        assert!(!s.is_consistent());

        assert!(solve(&Mat::identity(2), &v(&[1])).is_err());
    }

    #[test]
    fn subspace_lattice() {
        let e = |i| unit_vec(3, i);
        let u = Subspace::span(3, [e(0), e(1)]).unwrap();
        let w = Subspace::span(3, [e(1), e(2)]).unwrap();
        assert_eq!(u.intersect(&u).unwrap(), u);
        assert_eq!(u.sum(&Subspace::zero(3)).unwrap(), u);
        let i = u.intersect(&w).unwrap();
        assert_eq!(i, Subspace::span(3, [e(1)]).unwrap());
        assert!(i.is_subset(&u).unwrap() && i.is_subset(&w).unwrap());
        assert!(u.intersect(&Subspace::zero(4)).is_err());
        assert!(u.contains(&v(&[1, 2])).is_err());
    }

    #[test]
    fn coordinates_and_quotients() {
        let s = Subspace::span(3, [v(&[1, 1, 0]), v(&[0, 2, 2])]).unwrap();
        let x = v(&[3, 5, 2]);
        let c = s.coords(&x).unwrap().unwrap();
        assert_eq!(s.combine(&c), x);
        assert_eq!(s.coords(&v(&[0, 0, 1])).unwrap(), None);

        let p = s.quotient_projection();
        assert_eq!(p.rows(), 1);
        for b in s.basis_vectors() {
            assert!(is_zero_vec(&p.mul_vec(&b)));
        }
        let l = s.quotient_lift();
        assert_eq!(&p * &l, Mat::identity(1));
    }

    #[test]
    fn inverse_and_basis_coords() {
        let a = m(2, 2, &[2, 1, 1, 1]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Mat::identity(2));
        assert!(m(2, 2, &[1, 2, 2, 4]).inverse().is_none());

        let b = Basis::new(3, vec![v(&[1, 2, 3]), v(&[0, 1, 1])]).unwrap();
        let x = vec_add(&vec_scale(&v(&[1, 2, 3]), &rat(2)), &v(&[0, -1, -1]));
        assert_eq!(b.coords(&x), Some(v(&[2, -1])));
        assert_eq!(b.coords(&v(&[1, 0, 0])), None);
        assert!(Basis::new(2, vec![v(&[1, 1]), v(&[2, 2])]).is_err());
    }

    #[test]
    fn parse_and_convert() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), rat(-4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(to_f64(&ratio(1, 4)), 0.25);
    }
}
