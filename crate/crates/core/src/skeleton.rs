//! Skeletons `(k, L, rho)` at the Lie algebra level.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{dim_mismatch, Error, Result};
use crate::exactmat::{kernel, unit_vec, zero_vec, Basis, Mat, Rational, Subspace};
use crate::liealg::{affine_type, builtin, is_lie_automorphism, LieAlgebra, LinearMap, MatrixRealization};
use crate::riemann::spd;

/// Group-level data for one non-identity component of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentRep {
    /// `rho(l0)` acting on `k`.
    pub operator: Mat,
    /// `Ad(l0)` acting on `l`.
    pub l_auto: LinearMap,
}

/// A skeleton: the vector space `k`, the Lie algebra `l ⊂ k`, and the
/// differentiated action `drho` of `l` on `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub k_dim: usize,
    pub l: LieAlgebra,
    pub l_embed: LinearMap,
    /// `drho[i]` is the operator of the `i`-th basis vector of `l`.
    pub drho: Vec<Mat>,
    pub component_reps: Vec<ComponentRep>,
    /// Bracket on `k`, when one is declared (Klein and affine-type skeletons).
    pub k_algebra: Option<LieAlgebra>,
    /// A declared `drho(l)`-invariant complement of `l` in `k`.
    pub complement: Option<Subspace>,
    pub k_labels: Vec<String>,
    /// Faithful matrix realization of `k`, when `k` carries a bracket.
    pub k_realization: Option<MatrixRealization>,
}

/// A failed identity, named by its equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub equation: String,
    pub detail: String,
}

impl Violation {
    pub fn new(equation: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            equation: equation.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.equation, self.detail)
    }
}

/// Turns a non-empty violation list into an [`Error::Invariant`].
pub fn violations_to_result(v: Vec<Violation>) -> Result<()> {
    match v.first() {
        None => Ok(()),
        Some(first) => Err(Error::Invariant(if v.len() == 1 {
            first.to_string()
        } else {
            format!("{first} (and {} more)", v.len() - 1)
        })),
    }
}

impl Skeleton {
    /// Plain constructor; call [`Skeleton::validate`] to check the axioms.
    pub fn new(l: LieAlgebra, l_embed: LinearMap, drho: Vec<Mat>) -> Result<Self> {
        let k_dim = l_embed.dst_dim;
        if l_embed.src_dim != l.dim() {
            return Err(dim_mismatch("l_embed source", l.dim(), l_embed.src_dim));
        }
        if drho.len() != l.dim() {
            return Err(dim_mismatch("drho operator count", l.dim(), drho.len()));
        }
        for d in &drho {
            if d.rows() != k_dim || d.cols() != k_dim {
                return Err(Error::DimensionMismatch(format!(
                    "drho operators must be {k_dim}x{k_dim}, got {}x{}",
                    d.rows(),
                    d.cols()
                )));
            }
        }
        Ok(Skeleton {
            k_dim,
            l,
            l_embed,
            drho,
            component_reps: Vec::new(),
            k_algebra: None,
            complement: None,
            k_labels: (1..=k_dim).map(|i| format!("k{i}")).collect(),
            k_realization: None,
        })
    }

    /// The Klein skeleton `(g, H, Ad)` at algebra level, with `l = h` in its canonical basis.
    pub fn from_algebra(g: &LieAlgebra, h: &Subspace) -> Result<Self> {
        let l = g.subalgebra(h)?;
        let l_embed = LinearMap::new(h.basis().transpose());
        let drho = h
            .basis_vectors()
            .iter()
            .map(|x| g.ad(x))
            .collect::<Result<Vec<_>>>()?;
        let mut s = Skeleton::new(l, l_embed, drho)?;
        s.k_algebra = Some(g.clone());
        s.k_labels = g.labels().to_vec();
        Ok(s)
    }

    /// `(R^n + span(linear), ., Ad)` with the translations as declared complement.
    pub fn affine_reduction(n: usize, linear: &[Mat], labels: &[String]) -> Result<Self> {
        let (k, real) = affine_type(n, linear, labels)?;
        let l_part = Subspace::span(k.dim(), (n..k.dim()).map(|i| unit_vec(k.dim(), i)))?;
        let mut s = Skeleton::from_algebra(&k, &l_part)?;
        s.k_realization = Some(real);
        s.complement = Some(Subspace::span(k.dim(), (0..n).map(|i| unit_vec(k.dim(), i)))?);
        Ok(s)
    }

    /// `(R^n + so(n), O(n), Ad)` with the reflection `diag(-1, 1, ..., 1)` as component representative.
    pub fn euclidean(n: usize) -> Result<Self> {
        let (k, _) = builtin("euclid", n)?;
        let (_, so) = builtin("so", n)?;
        let mats: Vec<Mat> = (0..so.algebra.dim()).map(|i| so.basis_matrix(i)).collect();
        let mut s = Skeleton::affine_reduction(n, &mats, &k.labels()[n..])?;
        let mut refl = Mat::identity(n);
        refl[(0, 0)] = -Rational::one();
        s.component_reps.push(s.adjoint_rep(&refl)?);
        Ok(s)
    }

    /// `(R^n + gl(n), Gl(n), Ad)`.
    pub fn affine(n: usize) -> Result<Self> {
        let mats: Vec<Mat> = (0..n * n).map(|k| Mat::unit(n, n, k / n, k % n)).collect();
        let labels: Vec<String> = (0..n * n).map(|k| format!("E{}{}", k / n + 1, k % n + 1)).collect();
        let mut s = Skeleton::affine_reduction(n, &mats, &labels)?;
        let mut refl = Mat::identity(n);
        refl[(0, 0)] = -Rational::one();
        s.component_reps.push(s.adjoint_rep(&refl)?);
        Ok(s)
    }

    /// `Ad(p)` on `k` through the declared realization of `k`; `p` must normalize its image.
    pub fn conjugation_operator(&self, p: &Mat) -> Result<Mat> {
        let r = self
            .k_realization
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("skeleton has no matrix realization of k".into()))?;
        let pinv = p
            .inverse()
            .ok_or_else(|| Error::InvalidInput("conjugating matrix must be invertible".into()))?;
        let b = Basis::from_cols(&r.embed.matrix)?;
        let cols = (0..self.k_dim)
            .map(|i| {
                let c = (&(p * &r.basis_matrix(i)) * &pinv).vectorize();
                b.coords(&c)
                    .ok_or_else(|| Error::InvalidInput("conjugation does not preserve k".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Mat::from_cols(&cols, self.k_dim)
    }

    /// `ad(y)` on `k` through the declared realization of `k`; `y` must normalize its image.
    pub fn derivation_operator(&self, y: &Mat) -> Result<Mat> {
        let r = self
            .k_realization
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("skeleton has no matrix realization of k".into()))?;
        let b = Basis::from_cols(&r.embed.matrix)?;
        let cols = (0..self.k_dim)
            .map(|i| {
                b.coords(&y.commutator(&r.basis_matrix(i)).vectorize())
                    .ok_or_else(|| Error::InvalidInput("ad(y) does not preserve k".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Mat::from_cols(&cols, self.k_dim)
    }

    /// For affine-type skeletons: `(Ad(p), conj(p))` for `p` in `Gl(n)` normalizing the linear part.
    pub fn adjoint_rep(&self, p: &Mat) -> Result<ComponentRep> {
        let op = self.conjugation_operator(&Mat::identity(1).block_diag(p))?;
        let auto = self.restrict_to_l(&op)?;
        Ok(ComponentRep {
            operator: op,
            l_auto: auto,
        })
    }

    pub fn l_dim(&self) -> usize {
        self.l.dim()
    }

    pub fn l_image(&self) -> Subspace {
        self.l_embed.image()
    }

    /// `drho(x)` for `x` in `l` coordinates.
    pub fn drho_of(&self, x: &[Rational]) -> Mat {
        let mut out = Mat::zeros(self.k_dim, self.k_dim);
        for (xi, d) in x.iter().zip(&self.drho) {
            if !xi.is_zero() {
                out = &out + &d.scale(xi);
            }
        }
        out
    }

    /// Span of the operators `drho(l)` in row-major `gl(k)` coordinates.
    pub fn drho_span(&self) -> Subspace {
        Subspace::span_mats(self.k_dim * self.k_dim, &self.drho).expect("square operators")
    }

    /// The map on `l` induced by an operator that preserves `l_embed(l)`.
    pub fn restrict_to_l(&self, op: &Mat) -> Result<LinearMap> {
        let b = Basis::from_cols(&self.l_embed.matrix)?;
        let cols = (0..self.l_dim())
            .map(|i| {
                b.coords(&op.mul_vec(&self.l_embed.image_of_basis(i)))
                    .ok_or_else(|| Error::Invariant("operator does not preserve l".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        LinearMap::from_images(&cols, self.l_dim())
    }

    /// Checks every skeleton axiom exactly; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.l_dim();
        let lab = |i: usize| self.l.labels()[i].clone();
        if !self.l_embed.is_injective() {
            out.push(Violation::new("l_embed injective", "l_embed has a nonzero kernel"));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = self.drho_of(self.l.bracket_basis(i, j));
                let rhs = self.drho[i].commutator(&self.drho[j]);
                if lhs != rhs {
                    out.push(Violation::new(
                        "drho([X,Y]) = [drho(X), drho(Y)]",
                        format!("fails on ({}, {})", lab(i), lab(j)),
                    ));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = self.drho[i].mul_vec(&self.l_embed.image_of_basis(j));
                let rhs = self.l_embed.matrix.mul_vec(self.l.bracket_basis(i, j));
                if lhs != rhs {
                    out.push(Violation::new(
                        "drho(X) l_embed(Y) = l_embed([X,Y])",
                        format!("fails on ({}, {})", lab(i), lab(j)),
                    ));
                }
            }
        }
        let limg = self.l_image();
        for (r, rep) in self.component_reps.iter().enumerate() {
            if rep.operator.rows() != self.k_dim || rep.operator.cols() != self.k_dim || !rep.l_auto.is_square() || rep.l_auto.src_dim != n {
                out.push(Violation::new("component representative shape", format!("representative {r}")));
                continue;
            }
            for i in 0..n {
                let img = rep.operator.mul_vec(&self.l_embed.image_of_basis(i));
                let expected = self.l_embed.matrix.mul_vec(&rep.l_auto.image_of_basis(i));
                if !limg.contains(&img).unwrap_or(false) {
                    out.push(Violation::new(
                        "component representative normalizes l",
                        format!("representative {r} moves {} out of l", lab(i)),
                    ));
                } else if img != expected {
                    out.push(Violation::new(
                        "component representative restricts to its l automorphism",
                        format!("representative {r} on {}", lab(i)),
                    ));
                }
            }
            if !is_lie_automorphism(&self.l, &rep.l_auto).unwrap_or(false) {
                out.push(Violation::new(
                    "component automorphism of l",
                    format!("representative {r} is not a Lie automorphism"),
                ));
            }
        }
        if let Some(c) = &self.complement {
            if c.ambient_dim() != self.k_dim || c.dim() + n != self.k_dim || !c.intersect(&limg).map(|x| x.is_zero()).unwrap_or(false) {
                out.push(Violation::new("declared complement", "not a complement of l in k"));
            } else {
                for i in 0..n {
                    if c.image(&self.drho[i]).and_then(|im| im.is_subset(c)) != Ok(true) {
                        out.push(Violation::new(
                            "drho(l) preserves the declared complement",
                            format!("fails for {}", lab(i)),
                        ));
                    }
                }
            }
        }
        if let Some(k) = &self.k_algebra {
            if k.dim() != self.k_dim {
                out.push(Violation::new("k bracket dimension", format!("{} != {}", k.dim(), self.k_dim)));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Largest ideal `n` of `l` with `drho(n) k ⊆ n`, as a subspace of `l` coordinates.
    pub fn kernel_ideal(&self) -> Subspace {
        let n = self.l_dim();
        let mut current = Subspace::full(n);
        loop {
            if current.is_zero() {
                return current;
            }
            let ann_l = current.annihilator();
            let ann_k = current.image(&self.l_embed.matrix).expect("dims").annihilator();
            let mut sys = ann_l.clone();
            for j in 0..n {
                // [e_j, X] ∈ current
                sys = sys.vstack(&ann_l.try_mul(&self.l.ad_basis(j)).expect("dims")).expect("dims");
            }
            for m in 0..self.k_dim {
                // drho(X) e_m ∈ l_embed(current)
                let cols: Vec<Vec<Rational>> = self.drho.iter().map(|d| d.col(m)).collect();
                let mm = Mat::from_cols(&cols, self.k_dim).expect("dims");
                sys = sys.vstack(&ann_k.try_mul(&mm).expect("dims")).expect("dims");
            }
            let next = kernel(&sys);
            if next == current {
                return current;
            }
            current = next;
        }
    }

    pub fn is_effective(&self) -> bool {
        self.kernel_ideal().is_zero()
    }

    /// Quotient by the kernel ideal, in the non-pivot coordinates of its canonical basis.
    pub fn effective_quotient(&self) -> Result<Skeleton> {
        Ok(self.effective_quotient_with_maps()?.0)
    }

    /// Also returns the projection `k -> k/n` and its section.
    pub fn effective_quotient_with_maps(&self) -> Result<(Skeleton, Mat, Mat)> {
        let nl = self.kernel_ideal();
        if nl.is_zero() {
            return Ok((self.clone(), Mat::identity(self.k_dim), Mat::identity(self.k_dim)));
        }
        let (lq, pl, ll) = self.l.quotient(&nl)?;
        let nk = nl.image(&self.l_embed.matrix)?;
        let pk = nk.quotient_projection();
        let lk = nk.quotient_lift();
        let l_embed = LinearMap::new(pk.try_mul(&self.l_embed.matrix)?.try_mul(&ll)?);
        let drho = ll
            .col_vecs()
            .iter()
            .map(|x| pk.try_mul(&self.drho_of(x))?.try_mul(&lk))
            .collect::<Result<Vec<_>>>()?;
        let mut q = Skeleton::new(lq, l_embed, drho)?;
        q.component_reps = self
            .component_reps
            .iter()
            .map(|r| {
                Ok(ComponentRep {
                    operator: pk.try_mul(&r.operator)?.try_mul(&lk)?,
                    l_auto: LinearMap::new(pl.try_mul(&r.l_auto.matrix)?.try_mul(&ll)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = &self.k_algebra {
            if k.is_ideal(&nk)? {
                q.k_algebra = Some(k.quotient(&nk)?.0);
            }
        }
        if let Some(c) = &self.complement {
            q.complement = Some(c.image(&pk)?);
        }
        q.k_labels = lk
            .col_vecs()
            .iter()
            .map(|v| crate::liealg::format_combination(v, &self.k_labels))
            .collect();
        if !q.kernel_ideal().is_zero() {
            return Err(Error::Invariant("effective quotient has a nonzero kernel".into()));
        }
        Ok((q, pk, lk))
    }

    /// Infinitesimal self-extensions: `{a in gl(k) : a(l) ⊆ l, [a, drho(X)] = drho(aX)}`,
    /// as a subspace of row-major `gl(k)`.
    pub fn iext_algebra(&self) -> Result<Subspace> {
        if !self.is_effective() {
            return Err(Error::InvalidInput("iext requires an effective skeleton".into()));
        }
        let k = self.k_dim;
        let n = self.l_dim();
        let na = k * k;
        let unknowns = na + n * n;
        // unknowns: a (row-major), then c_ij with [a, drho_i] = sum_j c_ij drho_j
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for i in 0..n {
            let d = &self.drho[i];
            for p in 0..k {
                for q in 0..k {
                    let mut row = zero_vec(unknowns);
                    for r in 0..k {
                        // (a d)_{pq} = sum_r a_pr d_rq ; (d a)_{pq} = sum_r d_pr a_rq
                        row[p * k + r] += &d[(r, q)];
                        row[r * k + q] -= &d[(p, r)];
                    }
                    for j in 0..n {
                        row[na + i * n + j] -= &self.drho[j][(p, q)];
                    }
                    rows.push(row);
                }
            }
            let y = self.l_embed.image_of_basis(i);
            for p in 0..k {
                let mut row = zero_vec(unknowns);
                for (r, yr) in y.iter().enumerate() {
                    row[p * k + r] += yr;
                }
                for j in 0..n {
                    row[na + i * n + j] -= &self.l_embed.matrix[(p, j)];
                }
                rows.push(row);
            }
        }
        let sys = Mat::from_rows(&rows, unknowns)?;
        let sol = kernel(&sys);
        Subspace::span(na, sol.basis_vectors().iter().map(|v| v[..na].to_vec()))
    }

    /// Membership in `iext` without solving the full system.
    pub fn is_in_iext(&self, op: &Mat) -> Result<bool> {
        if op.rows() != self.k_dim || op.cols() != self.k_dim {
            return Err(dim_mismatch("operator size", self.k_dim, op.rows()));
        }
        let limg = Basis::from_cols(&self.l_embed.matrix)?;
        for i in 0..self.l_dim() {
            let Some(c) = limg.coords(&op.mul_vec(&self.l_embed.image_of_basis(i))) else {
                return Ok(false);
            };
            if op.commutator(&self.drho[i]) != self.drho_of(&c) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks an `Ext` candidate: exact conditions plus the heuristic component check.
    pub fn verify_ext_candidate(&self, e: &ExtGroupElement) -> ExtVerification {
        let mut v = Vec::new();
        let mut notes = Vec::new();
        let n = self.l_dim();
        let k = self.k_dim;
        if e.alpha.rows() != k || e.alpha.cols() != k || e.induced_l_auto.src_dim != n || !e.induced_l_auto.is_square() {
            v.push(Violation::new("ext candidate shape", "alpha or induced map has wrong size"));
            return ExtVerification { violations: v, notes };
        }
        let Some(inv) = e.alpha.inverse() else {
            v.push(Violation::new("alpha invertible", "alpha is singular"));
            return ExtVerification { violations: v, notes };
        };
        let limg = self.l_image();
        match limg.image(&e.alpha) {
            Ok(im) if im == limg => {}
            _ => v.push(Violation::new("alpha(l) = l", "alpha does not normalize l")),
        }
        if !is_lie_automorphism(&self.l, &e.induced_l_auto).unwrap_or(false) {
            v.push(Violation::new("induced map is an automorphism of l", "bracket or invertibility fails"));
        }
        for i in 0..n {
            let x = unit_vec(n, i);
            let ax = e.induced_l_auto.matrix.mul_vec(&x);
            let lhs = self.drho_of(&ax);
            let rhs = e.alpha.try_mul(&self.drho[i]).and_then(|m| m.try_mul(&inv)).expect("square");
            if lhs != rhs {
                v.push(Violation::new(
                    "drho(a X) = alpha drho(X) alpha^-1",
                    format!("fails for {}", self.l.labels()[i]),
                ));
            }
            if e.alpha.mul_vec(&self.l_embed.image_of_basis(i)) != self.l_embed.matrix.mul_vec(&ax) {
                v.push(Violation::new(
                    "alpha l_embed = l_embed a",
                    format!("fails for {}", self.l.labels()[i]),
                ));
            }
        }
        if !self.component_reps.is_empty() {
            notes.push("component check: heuristic".to_string());
            for (r, rep) in self.component_reps.iter().enumerate() {
                let m = e.alpha.try_mul(&rep.operator).and_then(|x| x.try_mul(&inv)).expect("square");
                if !self.matches_component(&m) {
                    v.push(Violation::new(
                        "alpha permutes the components of rho(L)",
                        format!("conjugate of representative {r} matches no listed component"),
                    ));
                }
            }
        }
        ExtVerification { violations: v, notes }
    }

    /// Whether `m = R' exp(D)` for some listed representative `R'` (or the identity) and `D` in `drho(l)`.
    fn matches_component(&self, m: &Mat) -> bool {
        let span = self.drho_span();
        let mut candidates = vec![Mat::identity(self.k_dim)];
        candidates.extend(self.component_reps.iter().map(|r| r.operator.clone()));
        for rp in candidates {
            let Some(rinv) = rp.inverse() else { continue };
            let t = &rinv * m;
            // t must normalize drho(l) exactly
            let Some(tinv) = t.inverse() else { continue };
            let normalizes = self.drho.iter().all(|d| {
                let c = (&(&t * d) * &tinv).vectorize();
                span.contains(&c).unwrap_or(false)
            });
            if !normalizes {
                continue;
            }
            let Ok(log) = spd::general_log(&spd::to_dmatrix(&t)) else { continue };
            let d = Mat::from_fn(self.k_dim, self.k_dim, |i, j| spd::rationalize(log[(i, j)], 1_000_000));
            if !span.contains(&d.vectorize()).unwrap_or(false) {
                continue;
            }
            let back = spd::to_dmatrix(&d).exp();
            if (back - spd::to_dmatrix(&t)).norm() < 1e-6 {
                return true;
            }
        }
        false
    }
}

/// An element of `Ext(k, L, rho)`: an operator on `k` with its automorphism of `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtGroupElement {
    pub alpha: Mat,
    pub induced_l_auto: LinearMap,
}

impl ExtGroupElement {
    pub fn identity(s: &Skeleton) -> Self {
        ExtGroupElement {
            alpha: Mat::identity(s.k_dim),
            induced_l_auto: LinearMap::identity(s.l_dim()),
        }
    }

    /// Pairs `alpha` with the map it induces on `l`.
    pub fn from_operator(s: &Skeleton, alpha: Mat) -> Result<Self> {
        let induced_l_auto = s.restrict_to_l(&alpha)?;
        Ok(ExtGroupElement { alpha, induced_l_auto })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtVerification {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ExtVerification {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
