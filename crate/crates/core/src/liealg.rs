//! Lie algebras by structure constants, linear maps, and matrix realizations.

use num_traits::{One, Zero};

use crate::error::{dim_mismatch, Error, Result};
use crate::exactmat::{axpy, is_zero_vec, kernel, rat, unit_vec, zero_vec, Basis, Echelon, Mat, Rational, Subspace};

/// Finite-dimensional Lie algebra over the rationals.
///
/// `brackets[i * dim + j]` holds the coordinates of `[e_i, e_j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    brackets: Vec<Vec<Rational>>,
    labels: Vec<String>,
}

impl LieAlgebra {
    /// Validates antisymmetry and the Jacobi identity before returning.
    pub fn new(dim: usize, brackets: Vec<Vec<Rational>>, labels: Vec<String>) -> Result<Self> {
        if brackets.len() != dim * dim {
            return Err(dim_mismatch("structure constant table", dim * dim, brackets.len()));
        }
        for b in &brackets {
            if b.len() != dim {
                return Err(dim_mismatch("structure constant vector", dim, b.len()));
            }
        }
        if labels.len() != dim {
            return Err(dim_mismatch("basis label count", dim, labels.len()));
        }
        let g = LieAlgebra { dim, brackets, labels };
        g.check_axioms()?;
        Ok(g)
    }

    /// Builds from the nonzero brackets `[e_i, e_j] = v` with `i < j`; the rest follow by antisymmetry.
    pub fn from_brackets(
        dim: usize,
        labels: Vec<String>,
        entries: &[(usize, usize, Vec<Rational>)],
    ) -> Result<Self> {
        let mut brackets = vec![zero_vec(dim); dim * dim];
        for (i, j, v) in entries {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return Err(Error::InvalidInput(format!("bracket index ({i},{j}) out of range")));
            }
            if v.len() != dim {
                return Err(dim_mismatch("bracket value", dim, v.len()));
            }
            brackets[i * dim + j] = v.clone();
            brackets[j * dim + i] = v.iter().map(|x| -x).collect();
        }
        LieAlgebra::new(dim, brackets, labels)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            brackets: vec![zero_vec(dim); dim * dim],
            labels: (1..=dim).map(|i| format!("e{i}")).collect(),
        }
    }

    /// Structure constants of the span of `mats` under the matrix commutator.
    pub fn from_matrix_basis(mats: &[Mat], labels: Vec<String>) -> Result<(Self, MatrixRealization)> {
        let Some(first) = mats.first() else {
            let g = LieAlgebra::new(0, vec![], vec![])?;
            return Ok((g.clone(), MatrixRealization::trivial(g, 1)));
        };
        let m = first.rows();
        if mats.iter().any(|x| x.rows() != m || x.cols() != m) {
            return Err(Error::InvalidInput("matrix basis must consist of equal square matrices".into()));
        }
        let basis = Basis::new(m * m, mats.iter().map(Mat::vectorize).collect())?;
        let d = mats.len();
        let mut brackets = Vec::with_capacity(d * d);
        for a in mats {
            for b in mats {
                let c = a.commutator(b).vectorize();
                let coords = basis
                    .coords(&c)
                    .ok_or_else(|| Error::InvalidInput("matrix span is not closed under commutator".into()))?;
                brackets.push(coords);
            }
        }
        let g = LieAlgebra::new(d, brackets, labels)?;
        let embed = LinearMap::new(Mat::from_cols(&basis.vectors().to_vec(), m * m)?);
        Ok((g.clone(), MatrixRealization { algebra: g, size: m, embed }))
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            if !is_zero_vec(self.bracket_basis(i, i)) {
                return Err(Error::Invariant(format!("antisymmetry: [e{i}, e{i}] != 0")));
            }
            for j in (i + 1)..n {
                let s: Vec<Rational> = self
                    .bracket_basis(i, j)
                    .iter()
                    .zip(self.bracket_basis(j, i))
                    .map(|(a, b)| a + b)
                    .collect();
                if !is_zero_vec(&s) {
                    return Err(Error::Invariant(format!("antisymmetry: [e{i}, e{j}] != -[e{j}, e{i}]")));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut acc = zero_vec(n);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        let inner = self.bracket_basis(b, c).to_vec();
                        let outer = self.bracket(&unit_vec(n, a), &inner).expect("dims");
                        axpy(&mut acc, &Rational::one(), &outer);
                    }
                    if !is_zero_vec(&acc) {
                        return Err(Error::Invariant(format!("Jacobi identity fails on (e{i}, e{j}, e{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(dim_mismatch("basis label count", self.dim, labels.len()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        &self.brackets[i * self.dim + j]
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.dim {
            return Err(dim_mismatch("bracket argument", self.dim, x.len()));
        }
        if y.len() != self.dim {
            return Err(dim_mismatch("bracket argument", self.dim, y.len()));
        }
        let mut out = zero_vec(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                axpy(&mut out, &(xi * yj), self.bracket_basis(i, j));
            }
        }
        Ok(out)
    }

    /// Matrix of `ad(x)`; column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[Rational]) -> Result<Mat> {
        let cols = (0..self.dim)
            .map(|j| self.bracket(x, &unit_vec(self.dim, j)))
            .collect::<Result<Vec<_>>>()?;
        Mat::from_cols(&cols, self.dim)
    }

    pub fn ad_basis(&self, i: usize) -> Mat {
        let cols: Vec<Vec<Rational>> = (0..self.dim).map(|j| self.bracket_basis(i, j).to_vec()).collect();
        Mat::from_cols(&cols, self.dim).expect("dims")
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.iter().all(|b| is_zero_vec(b))
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        let b = s.basis_vectors();
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                if !s.contains(&self.bracket(x, y)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_ideal(&self, s: &Subspace) -> Result<bool> {
        for x in s.basis_vectors() {
            for j in 0..self.dim {
                if !s.contains(&self.bracket(&unit_vec(self.dim, j), &x)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The subalgebra with basis the canonical basis of `s`.
    pub fn subalgebra(&self, s: &Subspace) -> Result<LieAlgebra> {
        if s.ambient_dim() != self.dim {
            return Err(dim_mismatch("subalgebra ambient", self.dim, s.ambient_dim()));
        }
        let b = s.basis_vectors();
        let mut brackets = Vec::with_capacity(b.len() * b.len());
        for x in &b {
            for y in &b {
                let z = self.bracket(x, y)?;
                brackets.push(
                    s.coords(&z)?
                        .ok_or_else(|| Error::InvalidInput("subspace is not bracket-closed".into()))?,
                );
            }
        }
        let labels = b.iter().map(|v| self.format_vector(v)).collect();
        LieAlgebra::new(b.len(), brackets, labels)
    }

    /// Quotient by an ideal in the non-pivot coordinates of the ideal's canonical basis.
    ///
    /// Returns the quotient algebra with the projection and lift matrices.
    pub fn quotient(&self, ideal: &Subspace) -> Result<(LieAlgebra, Mat, Mat)> {
        if !self.is_ideal(ideal)? {
            return Err(Error::InvalidInput("quotient by a non-ideal".into()));
        }
        let p = ideal.quotient_projection();
        let l = ideal.quotient_lift();
        let d = p.rows();
        let lifts = l.col_vecs();
        let mut brackets = Vec::with_capacity(d * d);
        for x in &lifts {
            for y in &lifts {
                brackets.push(p.mul_vec(&self.bracket(x, y)?));
            }
        }
        let labels = lifts
            .iter()
            .map(|v| format!("[{}]", self.format_vector(v)))
            .collect();
        Ok((LieAlgebra::new(d, brackets, labels)?, p, l))
    }

    /// `g + h` with `g` coordinates first.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let n = self.dim + other.dim;
        let mut brackets = vec![zero_vec(n); n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let b = &mut brackets[i * n + j];
                b[..self.dim].clone_from_slice(self.bracket_basis(i, j));
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                let b = &mut brackets[(self.dim + i) * n + self.dim + j];
                b[self.dim..].clone_from_slice(other.bracket_basis(i, j));
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        LieAlgebra { dim: n, brackets, labels }
    }

    /// Human-readable linear combination of basis labels, e.g. `2*E11 - E22`.
    pub fn format_vector(&self, v: &[Rational]) -> String {
        format_combination(v, &self.labels)
    }
}

pub fn format_combination(v: &[Rational], labels: &[String]) -> String {
    let mut out = String::new();
    for (x, l) in v.iter().zip(labels) {
        if x.is_zero() {
            continue;
        }
        let neg = x < &Rational::zero();
        let a = if neg { -x } else { x.clone() };
        let name = if l.contains(['+', '-']) { format!("({l})") } else { l.clone() };
        let term = if a.is_one() { name } else { format!("{a}*{name}") };
        if out.is_empty() {
            out = if neg { format!("-{term}") } else { term };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Linear map between coordinate spaces; columns are images of source basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub src_dim: usize,
    pub dst_dim: usize,
    pub matrix: Mat,
}

impl LinearMap {
    pub fn new(matrix: Mat) -> Self {
        LinearMap {
            src_dim: matrix.cols(),
            dst_dim: matrix.rows(),
            matrix,
        }
    }

    pub fn identity(n: usize) -> Self {
        LinearMap::new(Mat::identity(n))
    }

    pub fn zero(src_dim: usize, dst_dim: usize) -> Self {
        LinearMap::new(Mat::zeros(dst_dim, src_dim))
    }

    pub fn from_images(images: &[Vec<Rational>], dst_dim: usize) -> Result<Self> {
        Ok(LinearMap::new(Mat::from_cols(images, dst_dim)?))
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.src_dim {
            return Err(dim_mismatch("linear map argument", self.src_dim, v.len()));
        }
        Ok(self.matrix.mul_vec(v))
    }

    pub fn image_of_basis(&self, i: usize) -> Vec<Rational> {
        self.matrix.col(i)
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &LinearMap) -> Result<LinearMap> {
        Ok(LinearMap::new(self.matrix.try_mul(&first.matrix)?))
    }

    pub fn image(&self) -> Subspace {
        Subspace::col_space(&self.matrix)
    }

    pub fn kernel(&self) -> Subspace {
        kernel(&self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        self.matrix.rank() == self.src_dim
    }

    pub fn is_square(&self) -> bool {
        self.src_dim == self.dst_dim
    }
}

/// Faithful representation of a Lie algebra by `size x size` matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixRealization {
    pub algebra: LieAlgebra,
    pub size: usize,
    /// Into row-major `gl(size)` coordinates.
    pub embed: LinearMap,
}

impl MatrixRealization {
    fn trivial(algebra: LieAlgebra, size: usize) -> Self {
        let d = algebra.dim();
        MatrixRealization {
            algebra,
            size,
            embed: LinearMap::zero(d, size * size),
        }
    }

    pub fn matrix(&self, x: &[Rational]) -> Result<Mat> {
        Mat::from_vec(self.size, self.size, self.embed.apply(x)?)
    }

    pub fn basis_matrix(&self, i: usize) -> Mat {
        Mat::from_vec(self.size, self.size, self.embed.image_of_basis(i)).expect("dims")
    }

    /// Checks injectivity and `embed([x, y]) = [embed x, embed y]` on all basis pairs.
    pub fn verify(&self) -> Result<()> {
        if !self.embed.is_injective() {
            return Err(Error::Invariant("realization is not injective".into()));
        }
        let d = self.algebra.dim();
        for i in 0..d {
            for j in 0..d {
                let lhs = self.matrix(self.algebra.bracket_basis(i, j))?;
                let rhs = self.basis_matrix(i).commutator(&self.basis_matrix(j));
                if lhs != rhs {
                    return Err(Error::Invariant(format!(
                        "realization bracket mismatch on ({}, {})",
                        self.algebra.labels()[i],
                        self.algebra.labels()[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn gl_label(i: usize, j: usize) -> String {
    format!("E{}{}", i + 1, j + 1)
}

/// `gl(n)` with basis `E_ij` in row-major order.
pub fn gl(n: usize) -> LieAlgebra {
    let d = n * n;
    let mut brackets = vec![zero_vec(d); d * d];
    // [E_ij, E_kl] = δ_jk E_il − δ_li E_kj
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let b = &mut brackets[(i * n + j) * d + k * n + l];
                    if j == k {
                        b[i * n + l] += rat(1);
                    }
                    if l == i {
                        b[k * n + j] -= rat(1);
                    }
                }
            }
        }
    }
    let labels = (0..n).flat_map(|i| (0..n).map(move |j| gl_label(i, j))).collect();
    LieAlgebra { dim: d, brackets, labels }
}

fn gl_realization(n: usize) -> MatrixRealization {
    MatrixRealization {
        algebra: gl(n),
        size: n,
        embed: LinearMap::identity(n * n),
    }
}

/// `E_ij - E_ji` for `i > j`, lexicographic.
pub fn so_basis(n: usize) -> (Vec<Mat>, Vec<String>) {
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        for j in 0..i {
            mats.push(&Mat::unit(n, n, i, j) - &Mat::unit(n, n, j, i));
            labels.push(format!("{}-{}", gl_label(i, j), gl_label(j, i)));
        }
    }
    (mats, labels)
}

/// `R^n + span(linear)` inside `affine(n)`.
///
/// Embeds `n x n` blocks as the lower-right block of `(n+1) x (n+1)` matrices and
/// prepends the translations `e_i -> E_{i+1,0}`.
pub fn affine_type(n: usize, linear: &[Mat], linear_labels: &[String]) -> Result<(LieAlgebra, MatrixRealization)> {
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        mats.push(Mat::unit(n + 1, n + 1, i + 1, 0));
        labels.push(format!("e{}", i + 1));
    }
    for a in linear {
        mats.push(Mat::zeros(1, 1).block_diag(a));
    }
    labels.extend(linear_labels.iter().cloned());
    LieAlgebra::from_matrix_basis(&mats, labels)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["gl", "so", "co", "sl", "affine", "euclid", "so3_plus_R"];

/// Builtin algebras with their defining matrix realizations.
///
/// `affine(n)` is translations then `gl(n)`; `euclid(n)` is translations then
/// `so(n)`; `co(n)` is `so(n)` then the identity; `so3_plus_R` ignores `n`.
pub fn builtin(name: &str, n: usize) -> Result<(LieAlgebra, MatrixRealization)> {
    if n == 0 && name != "so3_plus_R" {
        return Err(Error::InvalidInput("builtin algebras need n >= 1".into()));
    }
    match name {
        "gl" => {
            let r = gl_realization(n);
            Ok((r.algebra.clone(), r))
        }
        "so" => {
            let (m, l) = so_basis(n);
            LieAlgebra::from_matrix_basis(&m, l)
        }
        "co" => {
            let (mut m, mut l) = so_basis(n);
            m.push(Mat::identity(n));
            l.push("id".into());
            LieAlgebra::from_matrix_basis(&m, l)
        }
        "sl" => {
            let mut m = Vec::new();
            let mut l = Vec::new();
            for i in 0..n.saturating_sub(1) {
                m.push(&Mat::unit(n, n, i, i) - &Mat::unit(n, n, i + 1, i + 1));
                l.push(if n == 2 { "H".to_string() } else { format!("H{}", i + 1) });
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        m.push(Mat::unit(n, n, i, j));
                        l.push(match (n, i, j) {
                            (2, 0, 1) => "E".into(),
                            (2, 1, 0) => "F".into(),
                            _ => gl_label(i, j),
                        });
                    }
                }
            }
            LieAlgebra::from_matrix_basis(&m, l)
        }
        "affine" => {
            let m: Vec<Mat> = (0..n * n).map(|k| Mat::unit(n, n, k / n, k % n)).collect();
            let l: Vec<String> = (0..n * n).map(|k| gl_label(k / n, k % n)).collect();
            affine_type(n, &m, &l)
        }
        "euclid" => {
            let (m, l) = so_basis(n);
            affine_type(n, &m, &l)
        }
        "so3_plus_R" => {
            let (m, mut l) = so_basis(3);
            let mut mats: Vec<Mat> = m.iter().map(|a| a.block_diag(&Mat::zeros(1, 1))).collect();
            mats.push(Mat::zeros(3, 3).block_diag(&Mat::identity(1)));
            l.push("R".into());
            LieAlgebra::from_matrix_basis(&mats, l)
        }
        other => Err(Error::UnknownBuiltin(other.into())),
    }
}

/// Smallest bracket-closed subspace containing `generators`.
pub fn subalgebra_closure(g: &LieAlgebra, generators: &Subspace) -> Result<Subspace> {
    if generators.ambient_dim() != g.dim() {
        return Err(dim_mismatch("closure generators", g.dim(), generators.ambient_dim()));
    }
    let mut ech = Echelon::new(g.dim());
    let mut all: Vec<Vec<Rational>> = Vec::new();
    let mut queue: Vec<Vec<Rational>> = Vec::new();
    for v in generators.basis_vectors() {
        if ech.insert(&v) {
            queue.push(v);
        }
    }
    // bracket each new element against every element seen so far, itself included
    while let Some(x) = queue.pop() {
        all.push(x.clone());
        for y in all.clone() {
            let z = g.bracket(&x, &y)?;
            if ech.insert(&z) {
                queue.push(z);
            }
        }
    }
    Ok(ech.into_subspace())
}

/// `{x : [x, sub] ⊆ sub}` by one kernel computation.
pub fn normalizer_in(amb: &LieAlgebra, sub: &Subspace) -> Result<Subspace> {
    if sub.ambient_dim() != amb.dim() {
        return Err(dim_mismatch("normalizer subspace", amb.dim(), sub.ambient_dim()));
    }
    let ann = sub.annihilator();
    let mut sys = Mat::zeros(0, amb.dim());
    for s in sub.basis_vectors() {
        // [x, s] = -ad(s) x
        sys = sys.vstack(&ann.try_mul(&amb.ad(&s)?)?)?;
    }
    Ok(kernel(&sys))
}

/// `{x : [x, sub] = 0}`.
pub fn centralizer_in(amb: &LieAlgebra, sub: &Subspace) -> Result<Subspace> {
    if sub.ambient_dim() != amb.dim() {
        return Err(dim_mismatch("centralizer subspace", amb.dim(), sub.ambient_dim()));
    }
    let mut sys = Mat::zeros(0, amb.dim());
    for s in sub.basis_vectors() {
        sys = sys.vstack(&amb.ad(&s)?)?;
    }
    Ok(kernel(&sys))
}

fn check_endo(g: &LieAlgebra, d: &LinearMap) -> Result<()> {
    if d.src_dim != g.dim() || d.dst_dim != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected a {0}x{0} map, got {1}x{2}",
            g.dim(),
            d.dst_dim,
            d.src_dim
        )));
    }
    Ok(())
}

/// `d[x, y] = [dx, y] + [x, dy]` on all basis pairs.
pub fn is_derivation(g: &LieAlgebra, d: &LinearMap) -> Result<bool> {
    check_endo(g, d)?;
    let n = g.dim();
    let imgs: Vec<Vec<Rational>> = (0..n).map(|i| d.image_of_basis(i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let lhs = d.apply(g.bracket_basis(i, j))?;
            let mut rhs = g.bracket(&imgs[i], &unit_vec(n, j))?;
            axpy(&mut rhs, &Rational::one(), &g.bracket(&unit_vec(n, i), &imgs[j])?);
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `a[x, y] = [ax, ay]` for a map between two algebras.
pub fn is_homomorphism(src: &LieAlgebra, dst: &LieAlgebra, a: &LinearMap) -> Result<bool> {
    if a.src_dim != src.dim() || a.dst_dim != dst.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected a {}x{} map, got {}x{}",
            dst.dim(),
            src.dim(),
            a.dst_dim,
            a.src_dim
        )));
    }
    let n = src.dim();
    let imgs: Vec<Vec<Rational>> = (0..n).map(|i| a.image_of_basis(i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if a.apply(src.bracket_basis(i, j))? != dst.bracket(&imgs[i], &imgs[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Invertible and bracket-preserving.
pub fn is_lie_automorphism(g: &LieAlgebra, a: &LinearMap) -> Result<bool> {
    check_endo(g, a)?;
    Ok(a.matrix.inverse().is_some() && is_homomorphism(g, g, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::ratio;

    fn v(e: &[i64]) -> Vec<Rational> {
        e.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn so3_brackets_cyclic() {
        let (g, r) = builtin("so", 3).unwrap();
        r.verify().unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.labels(), ["E21-E12", "E31-E13", "E32-E23"]);
        assert_eq!(g.bracket_basis(0, 1), v(&[0, 0, 1]).as_slice());
        assert_eq!(g.bracket_basis(1, 2), v(&[1, 0, 0]).as_slice());
        assert_eq!(g.bracket_basis(2, 0), v(&[0, 1, 0]).as_slice());
        // oracle: the commutator of realized matrices
        let c = r.basis_matrix(0).commutator(&r.basis_matrix(1));
        assert_eq!(c, r.basis_matrix(2));
    }

    #[test]
    fn builtins_are_faithful() {
        for name in BUILTIN_NAMES {
            for n in 1..=3 {
                let (g, r) = builtin(name, n).unwrap();
                r.verify().unwrap();
                assert_eq!(g.labels().len(), g.dim());
            }
        }
        assert_eq!(builtin("affine", 3).unwrap().0.dim(), 12);
        assert_eq!(builtin("co", 4).unwrap().0.dim(), 7);
        assert_eq!(builtin("euclid", 3).unwrap().0.dim(), 6);
        assert!(matches!(builtin("e8", 1), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn gl_formula_matches_commutators() {
        for n in 1..=3 {
            let g = gl(n);
            let mats: Vec<Mat> = (0..n * n).map(|k| Mat::unit(n, n, k / n, k % n)).collect();
            let labels = g.labels().to_vec();
            let (h, _) = LieAlgebra::from_matrix_basis(&mats, labels).unwrap();
            assert_eq!(g, h);
        }
    }

    #[test]
    fn translations_commute_and_r_is_central() {
        let (a, _) = builtin("affine", 3).unwrap();
        assert!(is_zero_vec(a.bracket_basis(0, 1)));
        let (g, _) = builtin("so3_plus_R", 3).unwrap();
        for i in 0..4 {
            assert!(is_zero_vec(g.bracket_basis(3, i)));
        }
        let x = v(&[2, -1, 3, 5]);
        assert!(is_zero_vec(&g.bracket(&x, &x).unwrap()));
    }

    #[test]
    fn rejects_bad_structure_constants() {
        // Jacobi on (a, b, c) evaluates to c
        let bad = LieAlgebra::from_brackets(
            3,
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1, v(&[0, 0, 1])), (1, 2, v(&[0, 1, 0]))],
        );
        assert!(matches!(bad, Err(Error::Invariant(_))));
        let mut t = vec![zero_vec(2); 4];
        t[1] = v(&[1, 0]);
        assert!(LieAlgebra::new(2, t, vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn closure_examples() {
        let (g, _) = builtin("so", 3).unwrap();
        let s = Subspace::span(3, [unit_vec(3, 0), unit_vec(3, 1)]).unwrap();
        assert!(subalgebra_closure(&g, &s).unwrap().is_full());
        assert!(subalgebra_closure(&g, &Subspace::zero(3)).unwrap().is_zero());
        let full = Subspace::full(3);
        assert_eq!(subalgebra_closure(&g, &full).unwrap(), full);
    }

    #[test]
    fn normalizer_of_rotation_block_in_gl3() {
        let g = gl(3);
        let rot = (&Mat::unit(3, 3, 1, 0) - &Mat::unit(3, 3, 0, 1)).vectorize();
        let hol = Subspace::span(9, [rot.clone()]).unwrap();
        let n = normalizer_in(&g, &hol).unwrap();
        assert_eq!(n.dim(), 3);
        let expected = Subspace::span(
            9,
            [
                (&Mat::unit(3, 3, 0, 0) + &Mat::unit(3, 3, 1, 1)).vectorize(),
                rot,
                Mat::unit(3, 3, 2, 2).vectorize(),
            ],
        )
        .unwrap();
        assert_eq!(n, expected);
        // maximality: every complementary standard direction fails
        for c in n.standard_complement().basis_vectors() {
            let x = Mat::from_vec(3, 3, c).unwrap();
            let br = x.commutator(&Mat::from_vec(3, 3, hol.basis_vector(0).to_vec()).unwrap());
            assert!(!hol.contains(&br.vectorize()).unwrap());
        }
        assert!(centralizer_in(&g, &Subspace::zero(9)).unwrap().is_full());
        assert!(normalizer_in(&g, &Subspace::full(9)).unwrap().is_full());
    }

    #[test]
    fn derivations_and_automorphisms() {
        let (g, _) = builtin("so3_plus_R", 3).unwrap();
        for i in 0..4 {
            assert!(is_derivation(&g, &LinearMap::new(g.ad_basis(i))).unwrap());
        }
        assert!(is_lie_automorphism(&g, &LinearMap::identity(4)).unwrap());
        let mut s = Mat::identity(4);
        s[(3, 3)] = rat(2);
        assert!(is_lie_automorphism(&g, &LinearMap::new(s)).unwrap());
        let mut p = Mat::identity(4);
        p[(2, 2)] = rat(0);
        assert!(!is_lie_automorphism(&g, &LinearMap::new(p.clone())).unwrap());
        assert!(!is_derivation(&g, &LinearMap::new(p)).unwrap());
        assert!(is_derivation(&g, &LinearMap::identity(3)).is_err());
    }

    #[test]
    fn subalgebra_and_quotient() {
        let (g, _) = builtin("co", 3).unwrap();
        let so = Subspace::span(4, (0..3).map(|i| unit_vec(4, i))).unwrap();
        let s = g.subalgebra(&so).unwrap();
        assert_eq!(s.dim(), 3);
        let (q, p, l) = g.quotient(&so).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(&p * &l, Mat::identity(1));
        assert_eq!(g.format_vector(&[rat(1), rat(0), ratio(-1, 2), rat(3)]), "(E21-E12) - 1/2*(E32-E23) + 3*id");
    }
}
