//! Klein models, skeleton morphisms and extensions, and the curvature and
//! torsion of the homogeneous geometries they induce.
//!
//! Sign convention: the Maurer–Cartan form of the flat model satisfies
//! `dω(X, Y) = -[X, Y]`, so the curvature of the extended flat model is
//! `κ(X, Y) = [αX, αY]_k − α([X, Y]_g)`, which vanishes exactly when `α` is a
//! Lie algebra homomorphism.

use crate::error::{dim_mismatch, Error, Result};
use crate::exactmat::{is_zero_vec, rat, unit_vec, Basis, Mat, Rational, Subspace};
use crate::liealg::{builtin, LieAlgebra, LinearMap, MatrixRealization};
use crate::skeleton::{Skeleton, Violation};

/// Algebra-level Klein pair `(g, h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleinModel {
    pub g: LieAlgebra,
    pub h: Subspace,
    pub realization: Option<MatrixRealization>,
}

impl KleinModel {
    pub fn new(g: LieAlgebra, h: Subspace) -> Result<Self> {
        if h.ambient_dim() != g.dim() {
            return Err(dim_mismatch("subalgebra ambient", g.dim(), h.ambient_dim()));
        }
        if !g.is_subalgebra(&h)? {
            return Err(Error::InvalidInput("h is not closed under the bracket".into()));
        }
        Ok(KleinModel {
            g,
            h,
            realization: None,
        })
    }

    /// `(so(3) + R, so(2))`, with `so(2)` the rotation in the plane of the last two axes.
    pub fn so3_plus_r_over_so2() -> Self {
        let (g, r) = builtin("so3_plus_R", 3).expect("builtin");
        let h = Subspace::span(4, [unit_vec(4, 2)]).expect("dims");
        KleinModel {
            g,
            h,
            realization: Some(r),
        }
    }

    /// The Klein model underlying a skeleton whose `k` carries a bracket.
    pub fn from_skeleton(s: &Skeleton) -> Result<Self> {
        let g = s
            .k_algebra
            .clone()
            .ok_or_else(|| Error::InvalidInput("skeleton has no bracket on k".into()))?;
        let mut m = KleinModel::new(g, s.l_image())?;
        m.realization = s.k_realization.clone();
        Ok(m)
    }

    pub fn h_algebra(&self) -> LieAlgebra {
        self.g.subalgebra(&self.h).expect("validated subalgebra")
    }

    /// The fixed coset representatives: standard vectors at the non-pivot positions of `h`.
    pub fn complement(&self) -> Subspace {
        self.h.standard_complement()
    }

    pub fn skeleton(&self) -> Skeleton {
        let mut s = Skeleton::from_algebra(&self.g, &self.h).expect("validated subalgebra");
        s.k_realization = self.realization.clone();
        s
    }
}

/// `(α, dj)` from the Klein skeleton of `source` to `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonMorphism {
    pub source: KleinModel,
    pub target: Skeleton,
    /// `g -> k`
    pub alpha: LinearMap,
    /// `h -> l`, in the canonical basis of `h`.
    pub dj: LinearMap,
}

impl SkeletonMorphism {
    pub fn new(source: KleinModel, target: Skeleton, alpha: LinearMap, dj: LinearMap) -> Result<Self> {
        if alpha.src_dim != source.g.dim() || alpha.dst_dim != target.k_dim {
            return Err(Error::DimensionMismatch(format!(
                "alpha must be {}x{}, got {}x{}",
                target.k_dim,
                source.g.dim(),
                alpha.dst_dim,
                alpha.src_dim
            )));
        }
        if dj.src_dim != source.h.dim() || dj.dst_dim != target.l_dim() {
            return Err(Error::DimensionMismatch(format!(
                "dj must be {}x{}, got {}x{}",
                target.l_dim(),
                source.h.dim(),
                dj.dst_dim,
                dj.src_dim
            )));
        }
        Ok(SkeletonMorphism {
            source,
            target,
            alpha,
            dj,
        })
    }

    /// Reads `dj` off `α` restricted to `h`, which must land in `l`.
    pub fn with_derived_dj(source: KleinModel, target: Skeleton, alpha: LinearMap) -> Result<Self> {
        if alpha.src_dim != source.g.dim() || alpha.dst_dim != target.k_dim {
            return Err(dim_mismatch("alpha source", source.g.dim(), alpha.src_dim));
        }
        let lb = Basis::from_cols(&target.l_embed.matrix)?;
        let cols = source
            .h
            .basis_vectors()
            .iter()
            .map(|x| {
                lb.coords(&alpha.apply(x)?)
                    .ok_or_else(|| Error::Invariant("alpha(h) is not contained in l".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let dj = LinearMap::from_images(&cols, target.l_dim())?;
        SkeletonMorphism::new(source, target, alpha, dj)
    }

    pub fn identity(klein: &KleinModel) -> Self {
        let n = klein.g.dim();
        SkeletonMorphism {
            source: klein.clone(),
            target: klein.skeleton(),
            alpha: LinearMap::identity(n),
            dj: LinearMap::identity(klein.h.dim()),
        }
    }

    /// `α` restricted to `h` and then to the source basis vectors of `h`.
    fn alpha_h(&self, i: usize) -> Vec<Rational> {
        self.alpha.matrix.mul_vec(self.source.h.basis_vector(i))
    }

    /// Exact checks of `α|h = l_embed ∘ dj` and `α([X, Y]) = dρ(dj X) α(Y)`.
    pub fn validate_morphism(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self
            .target
            .validate()
            .into_iter()
            .map(|v| Violation::new(format!("target: {}", v.equation), v.detail))
            .collect();
        let g = &self.source.g;
        let hb = self.source.h.basis_vectors();
        for (i, x) in hb.iter().enumerate() {
            let djx = self.dj.image_of_basis(i);
            if self.alpha_h(i) != self.target.l_embed.matrix.mul_vec(&djx) {
                out.push(Violation::new(
                    "alpha|h = l_embed dj",
                    format!("fails on {}", g.format_vector(x)),
                ));
            }
            let op = self.target.drho_of(&djx);
            for j in 0..g.dim() {
                let y = unit_vec(g.dim(), j);
                let lhs = self.alpha.matrix.mul_vec(&g.bracket(x, &y).expect("dims"));
                let rhs = op.mul_vec(&self.alpha.image_of_basis(j));
                if lhs != rhs {
                    out.push(Violation::new(
                        "alpha([X,Y]) = drho(dj X) alpha(Y)",
                        format!("fails on ({}, {})", g.format_vector(x), g.labels()[j]),
                    ));
                }
            }
        }
        out
    }

    /// Valid morphism inducing an isomorphism `g/h -> k/l`.
    pub fn is_extension(&self) -> bool {
        self.validate_morphism().is_empty() && self.quotient_iso_violation().is_none()
    }

    pub fn extension_violations(&self) -> Vec<Violation> {
        let mut v = self.validate_morphism();
        v.extend(self.quotient_iso_violation());
        v
    }

    fn quotient_iso_violation(&self) -> Option<Violation> {
        let gh = self.source.g.dim() - self.source.h.dim();
        let kl = self.target.k_dim - self.target.l_dim();
        if gh != kl {
            return Some(Violation::new(
                "dim g - dim h = dim k - dim l",
                format!("{gh} != {kl}"),
            ));
        }
        let sum = self.alpha.image().sum(&self.target.l_image()).expect("dims");
        if !sum.is_full() {
            return Some(Violation::new(
                "alpha(g) + l = k",
                format!("spans only {} of {}", sum.dim(), self.target.k_dim),
            ));
        }
        None
    }

    fn k_bracket(&self) -> Result<&LieAlgebra> {
        self.target
            .k_algebra
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("target has no declared bracket".into()))
    }

    /// `R_α(X, Y) = [αX, αY]_k − α([X, Y]_g)`.
    pub fn r_alpha(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        let k = self.k_bracket()?;
        let ax = self.alpha.apply(x)?;
        let ay = self.alpha.apply(y)?;
        let lhs = k.bracket(&ax, &ay)?;
        let rhs = self.alpha.apply(&self.source.g.bracket(x, y)?)?;
        Ok(lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect())
    }

    /// Curvature on the fixed coset representatives of `g/h`.
    pub fn curvature_homogeneous(&self) -> Result<CurvatureTable> {
        self.curvature_homogeneous_with_complement(&self.source.complement())
    }

    /// Curvature evaluated on the basis of an arbitrary complement of `h`.
    pub fn curvature_homogeneous_with_complement(&self, complement: &Subspace) -> Result<CurvatureTable> {
        if !self.is_extension() {
            return Err(Error::Invariant("curvature requires an extension".into()));
        }
        let g = self.source.g.dim();
        if complement.ambient_dim() != g
            || complement.dim() + self.source.h.dim() != g
            || !complement.sum(&self.source.h)?.is_full()
        {
            return Err(Error::InvalidInput("not a complement of h in g".into()));
        }
        let reps = complement.basis_vectors();
        let mut entries = Vec::new();
        for i in 0..reps.len() {
            for j in (i + 1)..reps.len() {
                entries.push((i, j, self.r_alpha(&reps[i], &reps[j])?));
            }
        }
        Ok(CurvatureTable {
            representatives: reps,
            k_dim: self.target.k_dim,
            entries,
        })
    }

    /// The component of the curvature in the declared invariant complement of `l`.
    pub fn torsion_component(&self) -> Result<CurvatureTable> {
        let c = self
            .target
            .complement
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("target has no declared invariant complement".into()))?;
        let proj = projection_along(c, &self.target.l_image())?;
        let mut t = self.curvature_homogeneous()?;
        for e in &mut t.entries {
            e.2 = proj.mul_vec(&e.2);
        }
        Ok(t)
    }
}

/// Projection of `k = c + l` onto `c` along `l`.
pub fn projection_along(c: &Subspace, l: &Subspace) -> Result<Mat> {
    let n = c.ambient_dim();
    let mut vecs = c.basis_vectors();
    vecs.extend(l.basis_vectors());
    let b = Basis::new(n, vecs).map_err(|_| Error::InvalidInput("complement meets l".into()))?;
    if b.len() != n {
        return Err(Error::InvalidInput("complement and l do not span k".into()));
    }
    let cols = (0..n)
        .map(|i| {
            let co = b.coords(&unit_vec(n, i)).expect("spanning basis");
            let mut keep = co.clone();
            for x in keep.iter_mut().skip(c.dim()) {
                *x = rat(0);
            }
            b.combine(&keep)
        })
        .collect::<Vec<_>>();
    Mat::from_cols(&cols, n)
}

/// Values of a bilinear map on pairs `i < j` of representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTable {
    pub representatives: Vec<Vec<Rational>>,
    pub k_dim: usize,
    pub entries: Vec<(usize, usize, Vec<Rational>)>,
}

impl CurvatureTable {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| is_zero_vec(&e.2))
    }

    pub fn span(&self) -> Subspace {
        Subspace::span(self.k_dim, self.entries.iter().map(|e| e.2.clone())).expect("dims")
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[Rational]> {
        self.entries
            .iter()
            .find(|e| e.0 == i && e.1 == j)
            .map(|e| e.2.as_slice())
    }
}

/// `(α2 ∘ α1, dj2 ∘ dj1)`; the target of `m1` must be the Klein skeleton of `m2`'s source.
pub fn compose(m2: &SkeletonMorphism, m1: &SkeletonMorphism) -> Result<SkeletonMorphism> {
    let mid = m2.source.skeleton();
    let t = &m1.target;
    if t.k_dim != mid.k_dim || t.l != mid.l || t.l_embed != mid.l_embed || t.drho != mid.drho {
        return Err(Error::InvalidInput(
            "target of the first morphism is not the source of the second".into(),
        ));
    }
    SkeletonMorphism::new(
        m1.source.clone(),
        m2.target.clone(),
        m2.alpha.compose(&m1.alpha)?,
        m2.dj.compose(&m1.dj)?,
    )
}

/// The extension of `(so(3) + R, SO(2))` into `(R^3 + gl(3), Gl(3))`:
/// `α(a, b, c, x)` has translation part `(a, b, x)` and linear part `c (E21 − E12)`.
pub fn so3_plus_r_example() -> SkeletonMorphism {
    so3_plus_r_with_alpha(&[])
}

/// Same as [`so3_plus_r_example`] with extra `(source index, affine index, value)` entries added to `α`.
pub fn so3_plus_r_with_alpha(extra: &[(usize, usize, Rational)]) -> SkeletonMorphism {
    let klein = KleinModel::so3_plus_r_over_so2();
    let target = Skeleton::affine(3).expect("builtin");
    let gl = |i: usize, j: usize| 3 + 3 * i + j;
    let mut a = Mat::zeros(12, 4);
    a[(0, 0)] = rat(1);
    a[(1, 1)] = rat(1);
    a[(gl(1, 0), 2)] = rat(1);
    a[(gl(0, 1), 2)] = rat(-1);
    a[(2, 3)] = rat(1);
    for (src, dst, v) in extra {
        a[(*dst, *src)] = &a[(*dst, *src)] + v;
    }
    SkeletonMorphism::with_derived_dj(klein, target, LinearMap::new(a)).expect("example data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{is_homomorphism, LieAlgebra};
    use crate::exactmat::vec_add;

    #[test]
    fn identity_is_an_extension_with_zero_curvature() {
        for klein in [
            KleinModel::so3_plus_r_over_so2(),
            KleinModel::from_skeleton(&Skeleton::euclidean(3).unwrap()).unwrap(),
        ] {
            let m = SkeletonMorphism::identity(&klein);
            assert!(m.is_extension(), "{:?}", m.extension_violations());
            assert!(m.curvature_homogeneous().unwrap().is_zero());
        }
    }

    #[test]
    fn source_skeleton_validates() {
        let s = KleinModel::so3_plus_r_over_so2().skeleton();
        assert!(s.validate().is_empty());
    }

    #[test]
    fn example_extension_and_its_curvature() {
        let m = so3_plus_r_example();
        assert!(m.is_extension(), "{:?}", m.extension_violations());
        let e = |i| unit_vec(4, i);
        let r = m.r_alpha(&e(0), &e(1)).unwrap();
        let mut want = vec![rat(0); 12];
        want[3 + 3] = rat(-1); // E21
        want[3 + 1] = rat(1); // E12
        assert_eq!(r, want);
        assert!(is_zero_vec(&m.r_alpha(&e(1), &e(1)).unwrap()));
        let k = m.curvature_homogeneous().unwrap();
        assert_eq!(k.span().dim(), 1);
        assert!(k.span().contains(&want).unwrap());
        assert!(m.torsion_component().unwrap().is_zero());
    }

    #[test]
    fn curvature_does_not_depend_on_representatives() {
        let m = so3_plus_r_example();
        let g = 4;
        let w = unit_vec(g, 2);
        for i in 0..g {
            for j in 0..g {
                let x = unit_vec(g, i);
                let y = unit_vec(g, j);
                assert_eq!(m.r_alpha(&vec_add(&x, &w), &y).unwrap(), m.r_alpha(&x, &y).unwrap());
            }
        }
        let other = Subspace::span(
            g,
            [
                vec![rat(1), rat(0), rat(1), rat(0)],
                vec![rat(0), rat(1), rat(-2), rat(0)],
                vec![rat(0), rat(0), rat(3), rat(1)],
            ],
        )
        .unwrap();
        let a = m.curvature_homogeneous().unwrap();
        let b = m.curvature_homogeneous_with_complement(&other).unwrap();
        assert_eq!(a.span(), b.span());
    }

    #[test]
    fn translation_mismatch_gives_torsion() {
        // add E11 + E22 to α(x); equivariance survives, torsion does not vanish
        let m = so3_plus_r_with_alpha(&[(3, 3, rat(1)), (3, 3 + 4, rat(1))]);
        assert!(m.is_extension());
        let t = m.torsion_component().unwrap();
        assert!(!t.is_zero());
        let r = m.r_alpha(&unit_vec(4, 0), &unit_vec(4, 3)).unwrap();
        assert_eq!(r[0], rat(-1));
    }

    #[test]
    fn reduction_composes_to_the_original() {
        let m = so3_plus_r_example();
        let rot = (&Mat::unit(3, 3, 1, 0) - &Mat::unit(3, 3, 0, 1)).clone();
        let red = Skeleton::affine_reduction(3, &[rot], &["E21-E12".into()]).unwrap();
        // α into R^3 + hol: translations unchanged, c lands on the rotation
        let mut a = Mat::zeros(4, 4);
        a[(0, 0)] = rat(1);
        a[(1, 1)] = rat(1);
        a[(3, 2)] = rat(1);
        a[(2, 3)] = rat(1);
        let m1 = SkeletonMorphism::with_derived_dj(m.source.clone(), red.clone(), LinearMap::new(a)).unwrap();
        assert!(m1.is_extension(), "{:?}", m1.extension_violations());
        let mut inc = Mat::zeros(12, 4);
        for i in 0..3 {
            inc[(i, i)] = rat(1);
        }
        inc[(3 + 3, 3)] = rat(1);
        inc[(3 + 1, 3)] = rat(-1);
        let src = KleinModel::from_skeleton(&red).unwrap();
        let m2 = SkeletonMorphism::with_derived_dj(src, Skeleton::affine(3).unwrap(), LinearMap::new(inc)).unwrap();
        assert!(m2.validate_morphism().is_empty());
        let c = compose(&m2, &m1).unwrap();
        assert_eq!(c.alpha, m.alpha);
        assert_eq!(c.dj, m.dj);
        let id = SkeletonMorphism::identity(&src_of(&m1));
        assert_eq!(compose(&m1, &id).unwrap(), m1);
        assert!(compose(&m1, &m2).is_err());
    }

    fn src_of(m: &SkeletonMorphism) -> KleinModel {
        m.source.clone()
    }

    #[test]
    fn missing_bracket_is_reported() {
        let mut m = so3_plus_r_example();
        m.target.k_algebra = None;
        let e = m.r_alpha(&unit_vec(4, 0), &unit_vec(4, 1)).unwrap_err();
        assert_eq!(e, Error::InvalidInput("target has no declared bracket".into()));
    }

    #[test]
    fn zero_r_alpha_iff_homomorphism() {
        let m = so3_plus_r_example();
        let k: &LieAlgebra = m.target.k_algebra.as_ref().unwrap();
        assert!(!is_homomorphism(&m.source.g, k, &m.alpha).unwrap());
        let id = SkeletonMorphism::identity(&m.source);
        assert!(is_homomorphism(&id.source.g, &id.source.g, &id.alpha).unwrap());
    }
}
