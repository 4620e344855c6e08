//! Extended skeletons `(k + s, L ⋊ S, ρ_S)`, the A-map of a homogeneous
//! extension, and infinitesimal automorphisms via holonomy closure.
//!
//! Results are infinitesimal: whether an automorphism integrates to the group
//! is not decided here.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactmat::{axpy, kernel, unit_vec, zero_vec, Basis, Echelon, Mat, Rational, Subspace};
use crate::extension::{KleinModel, SkeletonMorphism};
use crate::liealg::{LieAlgebra, LinearMap};
use crate::skeleton::{violations_to_result, Skeleton, Violation};

/// `base` extended by a subalgebra `s ⊆ iext(base)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedSkeleton {
    pub base: Skeleton,
    /// Row-major `gl(k)` coordinates.
    pub s: Subspace,
    /// Canonical basis of `s` as operators on `k`.
    pub s_ops: Vec<Mat>,
    /// Skeleton on `k + s` with algebra `l + s`.
    pub result: Skeleton,
}

impl ExtendedSkeleton {
    pub fn k_dim(&self) -> usize {
        self.base.k_dim
    }

    pub fn s_dim(&self) -> usize {
        self.s_ops.len()
    }

    pub fn total_dim(&self) -> usize {
        self.k_dim() + self.s_dim()
    }

    /// Coordinates of an operator of `s` in its canonical basis.
    pub fn s_coords(&self, op: &Mat) -> Option<Vec<Rational>> {
        self.s.coords(&op.vectorize()).ok().flatten()
    }

    pub fn s_op(&self, w: &[Rational]) -> Mat {
        let k = self.k_dim();
        let mut out = Mat::zeros(k, k);
        for (wi, op) in w.iter().zip(&self.s_ops) {
            if !wi.is_zero() {
                out = &out + &op.scale(wi);
            }
        }
        out
    }
}

/// Builds `ρ_S` with default labels `s1, s2, ...` for `s`.
pub fn build_rho_s(base: &Skeleton, s: &Subspace) -> Result<ExtendedSkeleton> {
    let labels = (1..=s.dim()).map(|i| format!("s{i}")).collect();
    build_rho_s_labeled(base, s, labels)
}

/// The extended skeleton; `s` must be bracket-closed and inside `iext(base)`.
///
/// On `l + s`: `[X+Z, Y+W] = [X,Y] + Z(Y) − W(X) + [Z,W]`, and on `k + s`:
/// `dρ_S(X+Z)(Y+W) = dρ(X)Y + Z(Y) − W(X) + [Z,W]`.
pub fn build_rho_s_labeled(base: &Skeleton, s: &Subspace, labels: Vec<String>) -> Result<ExtendedSkeleton> {
    let k = base.k_dim;
    if s.ambient_dim() != k * k {
        return Err(Error::DimensionMismatch(format!(
            "s must live in gl(k) with {} coordinates, got {}",
            k * k,
            s.ambient_dim()
        )));
    }
    if labels.len() != s.dim() {
        return Err(Error::InvalidInput("one label per basis vector of s".into()));
    }
    let ops = s.basis_mats(k)?;
    let d = ops.len();
    for a in &ops {
        if !base.is_in_iext(a)? {
            return Err(Error::InvalidInput("s is not contained in iext".into()));
        }
    }
    let mut s_brackets = Vec::with_capacity(d * d);
    for a in &ops {
        for b in &ops {
            let c = s
                .coords(&a.commutator(b).vectorize())?
                .ok_or_else(|| Error::InvalidInput("s is not closed under the commutator".into()))?;
            s_brackets.push(c);
        }
    }
    let n = base.l_dim();
    let lb = Basis::from_cols(&base.l_embed.matrix)?;
    // z_on_l[a][j]: l-coordinates of Z_a(l_embed(X_j))
    let z_on_l: Vec<Vec<Vec<Rational>>> = ops
        .iter()
        .map(|z| {
            (0..n)
                .map(|j| {
                    lb.coords(&z.mul_vec(&base.l_embed.image_of_basis(j)))
                        .ok_or_else(|| Error::Invariant("s does not preserve l".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let ld = n + d;
    let mut br = vec![zero_vec(ld); ld * ld];
    for i in 0..n {
        for j in 0..n {
            br[i * ld + j][..n].clone_from_slice(base.l.bracket_basis(i, j));
        }
    }
    for a in 0..d {
        for j in 0..n {
            let v = &z_on_l[a][j];
            br[(n + a) * ld + j][..n].clone_from_slice(v);
            let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
            br[j * ld + n + a][..n].clone_from_slice(&neg);
        }
        for b in 0..d {
            br[(n + a) * ld + n + b][n..].clone_from_slice(&s_brackets[a * d + b]);
        }
    }
    let mut l_labels = base.l.labels().to_vec();
    l_labels.extend(labels.iter().cloned());
    let lalg = LieAlgebra::new(ld, br, l_labels)?;

    let kd = k + d;
    let mut drho = Vec::with_capacity(ld);
    for i in 0..n {
        // Y + W -> dρ(X_i) Y − W(X_i)
        let mut op = base.drho[i].block_diag(&Mat::zeros(d, d));
        let xi = base.l_embed.image_of_basis(i);
        for (b, w) in ops.iter().enumerate() {
            let col = w.mul_vec(&xi);
            for (r, v) in col.iter().enumerate() {
                op[(r, k + b)] = -v;
            }
        }
        drho.push(op);
    }
    for a in 0..d {
        // Y + W -> Z_a(Y) + [Z_a, W]
        let cols: Vec<Vec<Rational>> = (0..d).map(|b| s_brackets[a * d + b].clone()).collect();
        let ad = Mat::from_cols(&cols, d)?;
        drho.push(ops[a].block_diag(&ad));
    }
    let l_embed = LinearMap::new(base.l_embed.matrix.block_diag(&Mat::identity(d)));
    let mut result = Skeleton::new(lalg, l_embed, drho)?;
    let mut k_labels = base.k_labels.clone();
    k_labels.extend(labels);
    result.k_labels = k_labels;
    debug_assert_eq!(result.k_dim, kd);
    violations_to_result(result.validate())?;
    Ok(ExtendedSkeleton {
        base: base.clone(),
        s: s.clone(),
        s_ops: ops,
        result,
    })
}

/// Operators `A(Z_i)` on `k + s`, one per basis vector of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMap {
    pub morphism: SkeletonMorphism,
    pub extended: ExtendedSkeleton,
    pub operators: Vec<Mat>,
    /// Complement of `h` in `g` pinning the splitting of `k`.
    pub complement: Subspace,
    /// Columns: `(s_g, s_l)` coordinates of each basis vector of `k`,
    /// with `s_g` in the complement's canonical basis.
    pub splitting: Mat,
}

fn same_skeleton(a: &Skeleton, b: &Skeleton) -> bool {
    a.k_dim == b.k_dim && a.l == b.l && a.l_embed == b.l_embed && a.drho == b.drho
}

/// A-map with the fixed complement of `h` (non-pivot standard vectors).
pub fn build_a_map(m: &SkeletonMorphism, ext: &ExtendedSkeleton) -> Result<AMap> {
    build_a_map_with_complement(m, ext, &m.source.complement())
}

/// `A(t)(s) = −α([s_g, t]) − dρ_S(s_l + s_s)(α t)`, splitting `s_k = α(s_g) + s_l` with `s_g` in `complement`.
pub fn build_a_map_with_complement(
    m: &SkeletonMorphism,
    ext: &ExtendedSkeleton,
    complement: &Subspace,
) -> Result<AMap> {
    if !same_skeleton(&m.target, &ext.base) {
        return Err(Error::InvalidInput("morphism target is not the base of the extended skeleton".into()));
    }
    violations_to_result(m.extension_violations())?;
    let g = &m.source.g;
    let gd = g.dim();
    let k = ext.k_dim();
    let d = ext.s_dim();
    let kd = k + d;
    if complement.ambient_dim() != gd || !complement.intersect(&m.source.h)?.is_zero() || complement.dim() + m.source.h.dim() != gd {
        return Err(Error::InvalidInput("not a complement of h in g".into()));
    }
    let cb = complement.basis_vectors();
    let mut split_cols: Vec<Vec<Rational>> = cb.iter().map(|c| m.alpha.matrix.mul_vec(c)).collect();
    split_cols.extend(m.target.l_embed.matrix.col_vecs());
    let split = Mat::from_cols(&split_cols, k)?
        .inverse()
        .ok_or_else(|| Error::Invariant("alpha(complement) + l is not a direct sum equal to k".into()))?;
    let c_dim = cb.len();

    let mut operators = Vec::with_capacity(gd);
    for t in 0..gd {
        let tv = unit_vec(gd, t);
        let at = m.alpha.image_of_basis(t);
        let mut op = Mat::zeros(kd, kd);
        for col in 0..k {
            let coords = split.col(col);
            let mut sg = zero_vec(gd);
            for (ci, c) in coords[..c_dim].iter().zip(&cb) {
                axpy(&mut sg, ci, c);
            }
            let sl = &coords[c_dim..];
            let mut v = m.alpha.matrix.mul_vec(&g.bracket(&sg, &tv)?);
            axpy(&mut v, &Rational::from_integer(1.into()), &ext.base.drho_of(sl).mul_vec(&at));
            for (r, x) in v.iter().enumerate() {
                op[(r, col)] = -x;
            }
        }
        for (a, z) in ext.s_ops.iter().enumerate() {
            for (r, x) in z.mul_vec(&at).iter().enumerate() {
                op[(r, k + a)] = -x;
            }
        }
        operators.push(op);
    }
    let amap = AMap {
        morphism: m.clone(),
        extended: ext.clone(),
        operators,
        complement: complement.clone(),
        splitting: split,
    };
    violations_to_result(amap.check_invariants())?;
    Ok(amap)
}

impl AMap {
    pub fn total_dim(&self) -> usize {
        self.extended.total_dim()
    }

    /// `A(v)` for `v` in `g` coordinates.
    pub fn apply(&self, v: &[Rational]) -> Mat {
        let n = self.total_dim();
        let mut out = Mat::zeros(n, n);
        for (vi, op) in v.iter().zip(&self.operators) {
            if !vi.is_zero() {
                out = &out + &op.scale(vi);
            }
        }
        out
    }

    /// Image in `k`, `h`-equivariance, and `A|h = dρ_S ∘ dj`.
    pub fn check_invariants(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let k = self.extended.k_dim();
        let n = self.total_dim();
        let g = &self.morphism.source.g;
        for (i, op) in self.operators.iter().enumerate() {
            if (k..n).any(|r| (0..n).any(|c| !op[(r, c)].is_zero())) {
                out.push(Violation::new("A(Z) maps into k", format!("fails for {}", g.labels()[i])));
            }
        }
        let res = &self.extended.result;
        let nl = self.extended.base.l_dim();
        for (hi, x) in self.morphism.source.h.basis_vectors().iter().enumerate() {
            let mut djx = self.morphism.dj.image_of_basis(hi);
            djx.extend(zero_vec(self.extended.s_dim()));
            debug_assert_eq!(djx.len(), nl + self.extended.s_dim());
            let rx = res.drho_of(&djx);
            if self.apply(x) != rx {
                out.push(Violation::new(
                    "A(X) = drho_S(dj X) on h",
                    format!("fails for {}", g.format_vector(x)),
                ));
            }
            for z in 0..g.dim() {
                let lhs = self.apply(&g.bracket(x, &unit_vec(g.dim(), z)).expect("dims"));
                let rhs = rx.commutator(&self.operators[z]);
                if lhs != rhs {
                    out.push(Violation::new(
                        "A([X,Z]) = [drho_S(dj X), A(Z)]",
                        format!("fails for ({}, {})", g.format_vector(x), g.labels()[z]),
                    ));
                }
            }
        }
        out
    }

    /// `F(Z_i, Z_j) = [A(Z_i), A(Z_j)] − A([Z_i, Z_j])` for `i < j`.
    pub fn curvature_operators(&self) -> Vec<(usize, usize, Mat)> {
        let g = &self.morphism.source.g;
        let mut out = Vec::new();
        for i in 0..g.dim() {
            for j in (i + 1)..g.dim() {
                let f = &self.operators[i].commutator(&self.operators[j]) - &self.apply(g.bracket_basis(i, j));
                out.push((i, j, f));
            }
        }
        out
    }

    /// Smallest subspace of `gl(k + s)` containing every `F(Z_i, Z_j)` and stable under `[A(Z_k), ·]`.
    pub fn holonomy_closure(&self) -> Subspace {
        let n = self.total_dim();
        let mut ech = Echelon::new(n * n);
        let mut queue = Vec::new();
        for (_, _, f) in self.curvature_operators() {
            if ech.insert(&f.vectorize()) {
                queue.push(f);
            }
        }
        while let Some(h) = queue.pop() {
            for a in &self.operators {
                let c = a.commutator(&h);
                if ech.insert(&c.vectorize()) {
                    queue.push(c);
                }
            }
        }
        ech.into_subspace()
    }

    /// Joint kernel of the holonomy closure, as a subspace of `k + s`.
    pub fn infinitesimal_autos(&self) -> Subspace {
        let n = self.total_dim();
        let hol = self.holonomy_closure();
        let mut rows = Vec::with_capacity(hol.dim() * n);
        for v in hol.basis_vectors() {
            rows.extend(v.chunks(n).map(|r| r.to_vec()));
        }
        kernel(&Mat::from_rows(&rows, n).expect("dims"))
    }

    /// Autos pushed to the effective quotient of the extended skeleton.
    pub fn effective_autos(&self) -> Result<EffectiveAutos> {
        let autos = self.infinitesimal_autos();
        let (quotient, pk, lk) = self.extended.result.effective_quotient_with_maps()?;
        let image = autos.image(&pk)?;
        Ok(EffectiveAutos {
            autos,
            quotient,
            projection: pk,
            lift: lk,
            image,
        })
    }
}

/// Infinitesimal automorphisms before and after passing to the effective quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveAutos {
    pub autos: Subspace,
    pub quotient: Skeleton,
    pub projection: Mat,
    pub lift: Mat,
    pub image: Subspace,
}

/// On a Klein skeleton: the `W ∈ s` acting as derivations of `g` that preserve `h`.
pub fn flat_model_auto_filter(ext: &ExtendedSkeleton, klein: &KleinModel) -> Result<Subspace> {
    if !same_skeleton(&ext.base, &klein.skeleton()) {
        return Err(Error::InvalidInput("extended skeleton is not built on this Klein model".into()));
    }
    let g = &klein.g;
    let n = g.dim();
    let d = ext.s_dim();
    if d == 0 {
        return Ok(Subspace::zero(n * n));
    }
    let ann_h = klein.h.annihilator();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    // derivation defect of each basis operator on each pair, stacked column-wise over w
    for i in 0..n {
        for j in (i + 1)..n {
            let ei = unit_vec(n, i);
            let ej = unit_vec(n, j);
            let cols: Vec<Vec<Rational>> = ext
                .s_ops
                .iter()
                .map(|w| {
                    let mut v = w.mul_vec(g.bracket_basis(i, j));
                    let a = g.bracket(&w.mul_vec(&ei), &ej).expect("dims");
                    let b = g.bracket(&ei, &w.mul_vec(&ej)).expect("dims");
                    for ((x, y), z) in v.iter_mut().zip(a).zip(b) {
                        *x -= y + z;
                    }
                    v
                })
                .collect();
            rows.extend(Mat::from_cols(&cols, n)?.row_vecs());
        }
    }
    for hb in klein.h.basis_vectors() {
        let cols: Vec<Vec<Rational>> = ext.s_ops.iter().map(|w| ann_h.mul_vec(&w.mul_vec(&hb))).collect();
        rows.extend(Mat::from_cols(&cols, ann_h.rows())?.row_vecs());
    }
    let ker = kernel(&Mat::from_rows(&rows, d)?);
    Subspace::span(n * n, ker.basis_vectors().iter().map(|w| ext.s_op(w).vectorize()))
}

/// Whether `ρ(l) ∘ β` preserves `Im α` and induces a Lie automorphism of `g`.
///
/// This is the algebra-level check only; integrability of the induced
/// automorphism to the group is not decided.
pub fn autcor_check(m: &SkeletonMorphism, l_op: &Mat, beta: &Mat) -> Result<bool> {
    let k = m.target.k_dim;
    for (name, x) in [("l_op", l_op), ("beta", beta)] {
        if x.rows() != k || x.cols() != k {
            return Err(Error::DimensionMismatch(format!("{name} must be {k}x{k}")));
        }
    }
    if !m.alpha.is_injective() {
        return Err(Error::InvalidInput("alpha is not injective".into()));
    }
    let t = l_op.try_mul(beta)?;
    let img = m.alpha.image();
    if img.image(&t)? != img {
        return Ok(false);
    }
    let b = Basis::from_cols(&m.alpha.matrix)?;
    let g = &m.source.g;
    let cols = (0..g.dim())
        .map(|i| b.coords(&t.mul_vec(&m.alpha.image_of_basis(i))).expect("image preserved"))
        .collect::<Vec<_>>();
    let induced = LinearMap::from_images(&cols, g.dim())?;
    crate::liealg::is_lie_automorphism(g, &induced)
}
