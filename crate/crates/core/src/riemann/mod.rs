//! Riemannian metrics sharing the Levi-Civita connection of a homogeneous
//! affine connection: holonomy, the space `Z` of compatible metrics, the
//! τ-action and its orbits.
//!
//! Holonomy, normalizers, `Z` and the automorphism algebra are exact; only
//! exp/log/polar steps and the orbit rank use floating point.

pub mod spd;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::autos::{build_a_map, build_rho_s_labeled};
use crate::error::{Error, Result};
use crate::exactmat::{kernel, rat, unit_vec, Basis, Echelon, Mat, Rational, Subspace};
use crate::extension::{so3_plus_r_example, SkeletonMorphism};
use crate::liealg::{gl, normalizer_in, LinearMap};
use crate::skeleton::Skeleton;
use spd::{polar_decompose, spd_exp, spd_log, to_dmatrix, SymMatF};

/// Finite-difference step used by [`orbit_space`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-6;

/// Size `n` and the split `k = R^n + linear` of an affine-type target.
struct AffineFrame {
    n: usize,
}

impl AffineFrame {
    fn of(s: &Skeleton) -> Result<Self> {
        let r = s
            .k_realization
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("target is not of affine type".into()))?;
        let n = r.size.checked_sub(1).ok_or_else(|| Error::InvalidInput("target is not of affine type".into()))?;
        let translations = Subspace::span(s.k_dim, (0..n).map(|i| unit_vec(s.k_dim, i)))?;
        if s.complement.as_ref() != Some(&translations) || s.k_dim < n {
            return Err(Error::InvalidInput("target is not of affine type".into()));
        }
        for i in 0..s.k_dim {
            let m = r.basis_matrix(i);
            let first_row_zero = (0..=n).all(|j| m[(0, j)].is_zero());
            let ok = if i < n {
                m == Mat::unit(n + 1, n + 1, i + 1, 0)
            } else {
                first_row_zero && (1..=n).all(|j| m[(j, 0)].is_zero())
            };
            if !ok {
                return Err(Error::InvalidInput("target is not of affine type".into()));
            }
        }
        Ok(AffineFrame { n })
    }

    /// The `gl(n)` part of a vector of `k`.
    fn linear_part(&self, s: &Skeleton, v: &[Rational]) -> Mat {
        let r = s.k_realization.as_ref().expect("checked");
        let m = r.matrix(v).expect("dims");
        Mat::from_fn(self.n, self.n, |i, j| m[(i + 1, j + 1)].clone())
    }

    fn translation_part(&self, v: &[Rational]) -> Vec<Rational> {
        v[..self.n].to_vec()
    }
}

/// Holonomy algebra of the invariant connection of an extension into an affine-type target:
/// the `gl(n)` parts of the curvature, closed under brackets with the `gl(n)` parts of `α(g)`.
pub fn holonomy_of_extension(m: &SkeletonMorphism) -> Result<Subspace> {
    let frame = AffineFrame::of(&m.target)?;
    let n = frame.n;
    let kappa = m.curvature_homogeneous()?;
    let lambdas: Vec<Mat> = (0..m.source.g.dim())
        .map(|i| frame.linear_part(&m.target, &m.alpha.image_of_basis(i)))
        .collect();
    let mut ech = Echelon::new(n * n);
    let mut queue = Vec::new();
    for (_, _, v) in &kappa.entries {
        let f = frame.linear_part(&m.target, v);
        if ech.insert(&f.vectorize()) {
            queue.push(f);
        }
    }
    while let Some(h) = queue.pop() {
        for l in &lambdas {
            let c = l.commutator(&h);
            if ech.insert(&c.vectorize()) {
                queue.push(c);
            }
        }
    }
    let hol = ech.into_subspace();
    if !gl(n).is_subalgebra(&hol)? {
        return Err(Error::Invariant("holonomy algebra is not closed under the bracket".into()));
    }
    Ok(hol)
}

/// Whether `hol ⊆ so(n)`; only the identity component of the holonomy group is seen.
pub fn metrizability_check(hol: &Subspace) -> bool {
    let n = (hol.ambient_dim() as f64).sqrt().round() as usize;
    hol.basis_mats(n)
        .map(|ms| ms.iter().all(|m| m.transpose() == -m))
        .unwrap_or(false)
}

/// `Z`: symmetric matrices commuting with `hol` and with the given component representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricFamily {
    pub n: usize,
    pub hol: Subspace,
    /// Exact basis of `Z`, from the canonical basis in upper-triangular parameters.
    pub z_exact: Vec<Mat>,
    pub z_basis: Vec<SymMatF>,
    /// Number of component representatives imposed as extra commutation constraints.
    pub component_constraints: usize,
}

impl MetricFamily {
    pub fn dim(&self) -> usize {
        self.z_exact.len()
    }

    /// Least-squares coordinates of a symmetric matrix in the `Z` basis.
    pub fn coords(&self, y: &SymMatF) -> DVector<f64> {
        let n = self.n;
        let a = DMatrix::from_fn(n * n, self.dim(), |r, c| self.z_basis[c].matrix()[(r / n, r % n)]);
        let b = DVector::from_fn(n * n, |r, _| y.matrix()[(r / n, r % n)]);
        if self.dim() == 0 {
            return DVector::zeros(0);
        }
        let svd = a.svd(true, true);
        svd.solve(&b, 1e-14).expect("svd with vectors")
    }

    pub fn point(&self, c: &[f64]) -> SymMatF {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (ci, z) in c.iter().zip(&self.z_basis) {
            m += z.matrix() * *ci;
        }
        SymMatF::new(m).expect("symmetric combination")
    }
}

fn sym_params(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn sym_from_params(n: usize, p: &[Rational]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for (v, (i, j)) in p.iter().zip(sym_params(n)) {
        m[(i, j)] = v.clone();
        m[(j, i)] = v.clone();
    }
    m
}

/// Exact solve of `[Y, h] = 0` (and `R Y = Y R` for each representative) over symmetric `Y`.
pub fn metric_space_z(hol: &Subspace, component_reps: &[Mat]) -> Result<MetricFamily> {
    let n = (hol.ambient_dim() as f64).sqrt().round() as usize;
    if n * n != hol.ambient_dim() {
        return Err(Error::InvalidInput("holonomy must live in gl(n)".into()));
    }
    let params = sym_params(n);
    let units: Vec<Mat> = (0..params.len())
        .map(|k| sym_from_params(n, &unit_vec(params.len(), k)))
        .collect();
    let mut constraints: Vec<Mat> = hol.basis_mats(n)?;
    constraints.extend(component_reps.iter().cloned());
    let mut rows = Vec::new();
    for c in &constraints {
        if c.rows() != n || c.cols() != n {
            return Err(Error::DimensionMismatch(format!("constraint must be {n}x{n}")));
        }
        let cols: Vec<Vec<Rational>> = units.iter().map(|u| u.commutator(c).vectorize()).collect();
        rows.extend(Mat::from_cols(&cols, n * n)?.row_vecs());
    }
    let sys = Mat::from_rows(&rows, params.len())?;
    let sol = kernel(&sys);
    let z_exact: Vec<Mat> = sol.basis_vectors().iter().map(|p| sym_from_params(n, p)).collect();
    let z_basis = z_exact.iter().map(SymMatF::from_exact).collect::<Result<Vec<_>>>()?;
    Ok(MetricFamily {
        n,
        hol: hol.clone(),
        z_exact,
        z_basis,
        component_constraints: component_reps.len(),
    })
}

/// `Y_p` and `k` with `p⁻¹ exp(Y) = exp(Y_p) k⁻¹`.
pub fn tau_decompose(p: &DMatrix<f64>, y: &SymMatF) -> Result<(SymMatF, DMatrix<f64>)> {
    if p.nrows() != y.n() || !p.is_square() {
        return Err(Error::Numeric("tau: size mismatch".into()));
    }
    if p.determinant().abs() <= 1e-12 {
        return Err(Error::Numeric("tau: p is singular".into()));
    }
    let pinv = p.clone().try_inverse().ok_or_else(|| Error::Numeric("tau: p is singular".into()))?;
    let m = pinv * spd_exp(y).matrix();
    let (pp, q) = polar_decompose(&m)?;
    Ok((spd_log(&pp)?, q.transpose()))
}

/// The right action `Y ↦ Y_p`.
pub fn tau_apply(p: &DMatrix<f64>, y: &SymMatF) -> Result<SymMatF> {
    Ok(tau_decompose(p, y)?.0)
}

/// Result of [`orbit_space`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSpace {
    pub orbit_dim: usize,
    /// Indices into the `Z` basis spanning a complement of the orbit directions.
    pub complement: Vec<usize>,
    /// Exact complement directions.
    pub complement_basis: Vec<Mat>,
    /// e.g. `diag(e^{m1}, e^{m1}, 1)`
    pub representatives: String,
    /// Rank at each differencing base point.
    pub ranks: Vec<usize>,
    pub singular_values: Vec<Vec<f64>>,
}

fn numeric_rank(m: &DMatrix<f64>) -> (usize, Vec<f64>) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0, vec![]);
    }
    let sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max < 1e-12 {
        return (0, sv);
    }
    (sv.iter().filter(|&&s| s > RANK_TOL * max).count(), sv)
}

/// Action matrix of the generators at `y0`, in `Z` coordinates, by central differences.
pub fn orbit_action_matrix(fam: &MetricFamily, generators: &[Mat], y0: &SymMatF, step: f64) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(fam.dim(), generators.len());
    for (c, g) in generators.iter().enumerate() {
        let gf = to_dmatrix(g);
        let plus = tau_apply(&(&gf * step).exp(), y0)?;
        let minus = tau_apply(&(&gf * -step).exp(), y0)?;
        let d = (fam.coords(&plus) - fam.coords(&minus)) / (2.0 * step);
        out.set_column(c, &d);
    }
    Ok(out)
}

/// Orbit dimension and non-equivalent directions of `Z` under the τ-action of the generators.
///
/// Base points are `Y = 0` and each `Z` basis element scaled by 1/2; differing ranks
/// are reported as an error ("orbit structure non-uniform").
pub fn orbit_space(fam: &MetricFamily, generators: &[Mat]) -> Result<OrbitSpace> {
    orbit_space_with_step(fam, generators, DEFAULT_FD_STEP)
}

pub fn orbit_space_with_step(fam: &MetricFamily, generators: &[Mat], step: f64) -> Result<OrbitSpace> {
    let dz = fam.dim();
    let mut bases = vec![SymMatF::zeros(fam.n)];
    for z in &fam.z_basis {
        bases.push(SymMatF::new(z.matrix() * 0.5)?);
    }
    let mut ranks = Vec::new();
    let mut svs = Vec::new();
    let mut at_zero = None;
    for y0 in &bases {
        let d = orbit_action_matrix(fam, generators, y0, step)?;
        let (r, sv) = numeric_rank(&d);
        ranks.push(r);
        svs.push(sv);
        at_zero.get_or_insert(d);
    }
    if ranks.iter().any(|&r| r != ranks[0]) {
        return Err(Error::Numeric(format!("orbit structure non-uniform (ranks {ranks:?})")));
    }
    let orbit_dim = ranks[0];
    // extend an orthonormal basis of the orbit directions by Z coordinate directions, in order
    let d = at_zero.expect("at least one base point");
    let mut span: Vec<DVector<f64>> = Vec::new();
    if orbit_dim > 0 {
        let svd = d.svd(true, false);
        let u = svd.u.expect("requested");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        for &i in idx.iter().take(orbit_dim) {
            span.push(u.column(i).into_owned());
        }
    }
    let mut complement = Vec::new();
    for i in 0..dz {
        let mut e = DVector::zeros(dz);
        e[i] = 1.0;
        let mut r = e.clone();
        for b in &span {
            r -= b * b.dot(&e);
        }
        if r.norm() > 1e-6 {
            span.push(&r / r.norm());
            complement.push(i);
        }
        if span.len() == dz {
            break;
        }
    }
    let complement_basis: Vec<Mat> = complement.iter().map(|&i| fam.z_exact[i].clone()).collect();
    let representatives = format_representatives(fam.n, &complement, &complement_basis);
    Ok(OrbitSpace {
        orbit_dim,
        complement,
        complement_basis,
        representatives,
        ranks,
        singular_values: svs,
    })
}

/// `exp(Σ m_i C_i)` rendered as `diag(...)` when every `C_i` is diagonal.
fn format_representatives(n: usize, idx: &[usize], basis: &[Mat]) -> String {
    let diagonal = basis.iter().all(|c| (0..n).all(|i| (0..n).all(|j| i == j || c[(i, j)].is_zero())));
    if !diagonal {
        let terms: Vec<String> = idx.iter().map(|i| format!("m{}*Z{}", i + 1, i + 1)).collect();
        return if terms.is_empty() { "id".into() } else { format!("exp({})", terms.join(" + ")) };
    }
    let entries: Vec<String> = (0..n)
        .map(|r| {
            let mut exps = Vec::new();
            for (i, c) in idx.iter().zip(basis) {
                let v = &c[(r, r)];
                if v.is_zero() {
                    continue;
                }
                let name = format!("m{}", i + 1);
                let term = if *v == rat(1) {
                    name
                } else if *v == rat(-1) {
                    format!("-{name}")
                } else {
                    format!("{v}{name}")
                };
                exps.push(term);
            }
            if exps.is_empty() {
                "1".to_string()
            } else {
                format!("e^{{{}}}", exps.join("+").replace("+-", "-"))
            }
        })
        .collect();
    format!("diag({})", entries.join(", "))
}

/// Output of [`riemann_classify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub n: usize,
    pub hol: Subspace,
    pub hol_labels: Vec<String>,
    pub metrizable: bool,
    pub details: Option<ClassificationDetails>,
    pub caveats: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationDetails {
    pub normalizer: Subspace,
    pub z: MetricFamily,
    /// Dimension of `k + s` for `k = R^n + hol` and `s` the normalizer operators.
    pub extended_dim: usize,
    pub s_dim: usize,
    pub autos: Subspace,
    pub effective_autos_dim: usize,
    /// `n`-components of a basis of the automorphism algebra.
    pub n_components: Vec<Mat>,
    /// Automorphisms as elements of `R^n + gl(n)`: translation part, then the `n`-component.
    pub auto_image: Subspace,
    pub orbit: OrbitSpace,
    /// `dim autos ≤ dim k + dim s`
    pub bound_extended: (usize, usize),
    /// `dim effective autos ≤ n + dim s`
    pub bound_metric: (usize, usize),
}

/// Restricts an extension into `R^n + gl(n)` to `R^n + hol`; requires the linear part of `α(g)` to lie in `hol`.
pub fn reduce_to_holonomy(m: &SkeletonMorphism, hol: &Subspace) -> Result<SkeletonMorphism> {
    let frame = AffineFrame::of(&m.target)?;
    let n = frame.n;
    let gln = gl(n);
    let mats = hol.basis_mats(n)?;
    let labels: Vec<String> = hol.basis_vectors().iter().map(|v| gln.format_vector(v)).collect();
    let base = Skeleton::affine_reduction(n, &mats, &labels)?;
    let hb = Basis::new(n * n, hol.basis_vectors())?;
    let cols = (0..m.source.g.dim())
        .map(|i| {
            let v = m.alpha.image_of_basis(i);
            let lin = frame.linear_part(&m.target, &v).vectorize();
            let mut c = frame.translation_part(&v);
            let hc = hb.coords(&lin).ok_or_else(|| {
                Error::InvalidInput("linear part of alpha leaves the holonomy algebra; no reduction in this frame".into())
            })?;
            c.extend(hc);
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha = LinearMap::from_images(&cols, base.k_dim)?;
    SkeletonMorphism::with_derived_dj(m.source.clone(), base, alpha)
}

/// The full pipeline: holonomy, metrizability, `Z`, automorphisms, and the orbit space.
pub fn riemann_classify(m: &SkeletonMorphism) -> Result<Classification> {
    let frame = AffineFrame::of(&m.target)?;
    let n = frame.n;
    let gln = gl(n);
    let hol = holonomy_of_extension(m)?;
    let hol_labels = hol.basis_vectors().iter().map(|v| gln.format_vector(v)).collect();
    let metrizable = metrizability_check(&hol);
    let mut caveats = vec![
        "automorphisms are infinitesimal; completeness is not decided".to_string(),
        "metrizability is checked on the holonomy algebra only".to_string(),
    ];
    if !metrizable {
        return Ok(Classification {
            n,
            hol,
            hol_labels,
            metrizable,
            details: None,
            caveats,
        });
    }
    caveats.push("identifications by discrete elements of the orthogonal normalizer are not resolved".to_string());

    let normalizer = normalizer_in(&gln, &hol)?;
    let reduced = reduce_to_holonomy(m, &hol)?;
    let base = reduced.target.clone();
    let n_mats = normalizer.basis_mats(n)?;
    let ops = n_mats
        .iter()
        .map(|y| base.derivation_operator(&Mat::zeros(1, 1).block_diag(y)))
        .collect::<Result<Vec<_>>>()?;
    let s = Subspace::span_mats(base.k_dim * base.k_dim, &ops)?;
    let s_labels: Vec<String> = (1..=s.dim()).map(|i| format!("N{i}")).collect();
    let ext = build_rho_s_labeled(&base, &s, s_labels)?;
    // the matrix in the normalizer behind each canonical basis operator of s: its action on R^n
    let s_as_n: Vec<Mat> = ext
        .s_ops
        .iter()
        .map(|op| Mat::from_fn(n, n, |i, j| op[(i, j)].clone()))
        .collect();
    let amap = build_a_map(&reduced, &ext)?;
    let eff = amap.effective_autos()?;
    let autos = eff.autos.clone();
    let kd = ext.k_dim();
    let hol_mats = hol.basis_mats(n)?;
    let n_components: Vec<Mat> = autos
        .basis_vectors()
        .iter()
        .map(|v| {
            let mut out = Mat::zeros(n, n);
            for (c, h) in v[n..kd].iter().zip(&hol_mats) {
                out = &out + &h.scale(c);
            }
            for (c, y) in v[kd..].iter().zip(&s_as_n) {
                out = &out + &y.scale(c);
            }
            out
        })
        .collect();
    let auto_image = Subspace::span(
        n + n * n,
        autos.basis_vectors().iter().zip(&n_components).map(|(v, c)| {
            let mut w = v[..n].to_vec();
            w.extend(c.vectorize());
            w
        }),
    )?;
    let bound_extended = (autos.dim(), ext.total_dim());
    let bound_metric = (eff.image.dim(), n + ext.s_dim());
    if bound_extended.0 > bound_extended.1 {
        return Err(Error::Invariant(format!(
            "dim autos {} exceeds dim k + dim s = {}",
            bound_extended.0, bound_extended.1
        )));
    }
    if bound_metric.0 > bound_metric.1 {
        return Err(Error::Invariant(format!(
            "dim autos {} exceeds n + dim s = {}",
            bound_metric.0, bound_metric.1
        )));
    }
    let z = metric_space_z(&hol, &[])?;
    let orbit = orbit_space(&z, &n_components)?;
    Ok(Classification {
        n,
        hol,
        hol_labels,
        metrizable,
        details: Some(ClassificationDetails {
            normalizer,
            z,
            extended_dim: ext.total_dim(),
            s_dim: ext.s_dim(),
            autos,
            effective_autos_dim: eff.image.dim(),
            n_components,
            auto_image,
            orbit,
            bound_extended,
            bound_metric,
        }),
        caveats,
    })
}

/// The `so(3) + R` over `SO(2)` example run through [`riemann_classify`].
pub fn so3xr_example() -> Result<Classification> {
    riemann_classify(&so3_plus_r_example())
}

impl Classification {
    /// `hol dim 1; Z dim 2; autos dim 5; orbit dim 1; representatives diag(...)`
    pub fn summary(&self) -> String {
        match &self.details {
            None => format!("hol dim {}; not metrizable", self.hol.dim()),
            Some(d) => format!(
                "hol dim {}; Z dim {}; autos dim {}; orbit dim {}; representatives {}",
                self.hol.dim(),
                d.z.dim(),
                d.effective_autos_dim,
                d.orbit.orbit_dim,
                d.orbit.representatives
            ),
        }
    }
}
