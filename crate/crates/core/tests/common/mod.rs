#![allow(dead_code)]

use cartan_core::autos::{build_a_map, build_rho_s, AMap, ExtendedSkeleton};
use cartan_core::exactmat::unit_vec;
use cartan_core::extension::{KleinModel, SkeletonMorphism};
use cartan_core::liealg::{gl, subalgebra_closure};
use cartan_core::skeleton::Skeleton;
use cartan_core::{rat, solve, LieAlgebra, LinearMap, Mat, Rational, Subspace};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-2i64..=2))
}

fn rot(n: usize, i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    m[(i, j)] = -Rational::one();
    m[(j, i)] = Rational::one();
    m
}

fn diag(v: &[i64]) -> Mat {
    Mat::from_fn(v.len(), v.len(), |i, j| if i == j { rat(v[i]) } else { rat(0) })
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// A source model, a target, and the fixed `dj` on the canonical basis of `h`.
pub struct ExtensionProblem {
    pub name: String,
    pub source: KleinModel,
    pub target: Skeleton,
    pub dj: LinearMap,
}

/// Every `α` with `α|h = l_embed ∘ dj` and `α([X, Z]) = dρ(dj X) α(Z)` for `X ∈ h`.
///
/// Unknowns are the entries of `α` in column-major order.
pub fn equivariant_alphas(p: &ExtensionProblem) -> (Option<Mat>, Vec<Mat>) {
    let g = &p.source.g;
    let gd = g.dim();
    let k = p.target.k_dim;
    let idx = |r: usize, c: usize| c * k + r;
    let nunk = gd * k;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for (b, hb) in p.source.h.basis_vectors().iter().enumerate() {
        let target = p.target.l_embed.apply(&p.dj.image_of_basis(b)).unwrap();
        for r in 0..k {
            let mut row = vec![Rational::zero(); nunk];
            for c in 0..gd {
                row[idx(r, c)] += &hb[c];
            }
            rows.push(row);
            rhs.push(target[r].clone());
        }
        let d = p.target.drho_of(&p.dj.image_of_basis(b));
        for z in 0..gd {
            let br = g.bracket(hb, &unit_vec(gd, z)).unwrap();
            for r in 0..k {
                let mut row = vec![Rational::zero(); nunk];
                for c in 0..gd {
                    row[idx(r, c)] += &br[c];
                }
                for s in 0..k {
                    row[idx(s, z)] -= &d[(r, s)];
                }
                rows.push(row);
                rhs.push(Rational::zero());
            }
        }
    }
    let a = Mat::from_rows(&rows, nunk).unwrap();
    let sol = solve(&a, &rhs).unwrap();
    let to_mat = |v: &[Rational]| Mat::from_fn(k, gd, |r, c| v[idx(r, c)].clone());
    let part = sol.particular.as_ref().map(|v| to_mat(v));
    let ker = sol.kernel.basis_vectors().iter().map(|v| to_mat(v)).collect();
    (part, ker)
}

/// Draws a random valid extension of the problem's equivariant family.
pub fn random_extension(p: &ExtensionProblem, rng: &mut ChaCha8Rng) -> SkeletonMorphism {
    let (part, ker) = equivariant_alphas(p);
    let part = part.unwrap_or_else(|| panic!("{}: no equivariant alpha", p.name));
    for _ in 0..200 {
        let mut a = part.clone();
        for kv in &ker {
            a = &a + &kv.scale(&small(rng));
        }
        let m = SkeletonMorphism::new(p.source.clone(), p.target.clone(), LinearMap::new(a), p.dj.clone());
        if let Ok(m) = m {
            if m.is_extension() {
                return m;
            }
        }
    }
    panic!("{}: no extension found", p.name)
}

fn aff1() -> LieAlgebra {
    LieAlgebra::from_brackets(2, labels("e", 2), &[(0, 1, vec![rat(0), rat(1)])]).unwrap()
}

fn heisenberg() -> LieAlgebra {
    LieAlgebra::from_brackets(3, labels("e", 3), &[(0, 1, vec![rat(0), rat(0), rat(1)])]).unwrap()
}

/// Problems whose targets have `dim k <= 5`.
pub fn small_problems() -> Vec<ExtensionProblem> {
    let mut out = Vec::new();
    // so(3) + R over so(2) into R^3 + span(rotation)
    let src = KleinModel::so3_plus_r_over_so2();
    let tgt = Skeleton::affine_reduction(3, &[rot(3, 0, 1)], &["r".into()]).unwrap();
    out.push(ExtensionProblem {
        name: "so3R->R3+rot".into(),
        source: src,
        target: tgt,
        dj: LinearMap::new(Mat::from_i64(1, 1, &[1])),
    });
    // euclid(2) over so(2) into itself
    let e2 = Skeleton::euclidean(2).unwrap();
    out.push(ExtensionProblem {
        name: "euclid2->euclid2".into(),
        source: KleinModel::from_skeleton(&e2).unwrap(),
        target: e2,
        dj: LinearMap::identity(1),
    });
    // nonabelian and Heisenberg algebras with trivial h into small affine reductions
    let lin2: Vec<(&str, Vec<Mat>)> = vec![
        ("none", vec![]),
        ("diag10", vec![diag(&[1, 0])]),
        ("scal", vec![diag(&[1, 1])]),
        ("rot", vec![rot(2, 0, 1)]),
        ("diag", vec![diag(&[1, 0]), diag(&[0, 1])]),
    ];
    for (name, mats) in lin2 {
        let tgt = Skeleton::affine_reduction(2, &mats, &labels("y", mats.len())).unwrap();
        out.push(ExtensionProblem {
            name: format!("aff1->R2+{name}"),
            source: KleinModel::new(aff1(), Subspace::zero(2)).unwrap(),
            target: tgt,
            dj: LinearMap::zero(0, mats.len()),
        });
    }
    for (name, mats) in [("none", vec![]), ("rot", vec![rot(3, 0, 1)])] {
        let tgt = Skeleton::affine_reduction(3, &mats, &labels("y", mats.len())).unwrap();
        out.push(ExtensionProblem {
            name: format!("heis->R3+{name}"),
            source: KleinModel::new(heisenberg(), Subspace::zero(3)).unwrap(),
            target: tgt,
            dj: LinearMap::zero(0, mats.len()),
        });
    }
    out
}

/// `so(3) + R` over `so(2)` into the full affine target.
pub fn so3r_affine_problem() -> ExtensionProblem {
    let src = KleinModel::so3_plus_r_over_so2();
    let tgt = Skeleton::affine(3).unwrap();
    let mut dj = Mat::zeros(9, 1);
    dj[(3, 0)] = rat(1);
    dj[(1, 0)] = rat(-1);
    ExtensionProblem {
        name: "so3R->affine3".into(),
        source: src,
        target: tgt,
        dj: LinearMap::new(dj),
    }
}

/// `so(3) + R` over `so(2)` into `R^3 + so(3)`: every equivariant `α` has metrizable holonomy.
pub fn so3r_euclid_problem() -> ExtensionProblem {
    let tgt = Skeleton::euclidean(3).unwrap();
    let real = tgt.k_realization.clone().unwrap();
    let lin: Vec<Vec<Rational>> = (3..tgt.k_dim)
        .map(|i| {
            let m = real.basis_matrix(i);
            Mat::from_fn(3, 3, |a, b| m[(a + 1, b + 1)].clone()).vectorize()
        })
        .collect();
    let rot = rot(3, 0, 1).vectorize();
    let coords = cartan_core::Basis::new(9, lin).unwrap().coords(&rot).unwrap();
    ExtensionProblem {
        name: "so3R->euclid3".into(),
        source: KleinModel::so3_plus_r_over_so2(),
        target: tgt,
        dj: LinearMap::from_images(&[coords], 3).unwrap(),
    }
}

/// A random subalgebra of `iext(base)` with `dim k + dim s <= max_total`.
pub fn random_s(base: &Skeleton, max_total: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let k = base.k_dim;
    let iext = base.iext_algebra().unwrap();
    let glk = gl(k);
    let budget = max_total.saturating_sub(k);
    let gens = rng.gen_range(0..=2usize.min(budget));
    for _ in 0..50 {
        let vs: Vec<Vec<Rational>> = (0..gens)
            .map(|_| {
                let mut v = vec![Rational::zero(); k * k];
                for b in iext.basis_vectors() {
                    let c = small(rng);
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += &c * y;
                    }
                }
                v
            })
            .collect();
        let s = subalgebra_closure(&glk, &Subspace::span(k * k, vs).unwrap()).unwrap();
        if s.dim() <= budget {
            return s;
        }
    }
    Subspace::zero(k * k)
}

/// A random valid extension together with a random `s` and its A-map.
pub struct Instance {
    pub name: String,
    pub morphism: SkeletonMorphism,
    pub ext: ExtendedSkeleton,
    pub amap: AMap,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_total: usize) -> Instance {
    let problems = small_problems();
    let p = &problems[rng.gen_range(0..problems.len())];
    instance_for(p, rng, max_total)
}

pub fn instance_for(p: &ExtensionProblem, rng: &mut ChaCha8Rng, max_total: usize) -> Instance {
    let m = random_extension(p, rng);
    let s = random_s(&m.target, max_total, rng);
    let ext = build_rho_s(&m.target, &s).unwrap();
    let amap = build_a_map(&m, &ext).unwrap();
    Instance {
        name: format!("{} (s dim {})", p.name, s.dim()),
        morphism: m,
        ext,
        amap,
    }
}

/// Row space kept in reduced echelon form with plain Gaussian elimination.
#[derive(Clone, Debug, Default)]
pub struct NaiveSpan {
    pub dim: usize,
    rows: Vec<Vec<Rational>>,
}

impl NaiveSpan {
    pub fn new(dim: usize) -> Self {
        NaiveSpan { dim, rows: vec![] }
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for r in &self.rows {
            let p = r.iter().position(|x| !x.is_zero()).unwrap();
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (a, b) in v.iter_mut().zip(r) {
                    *a -= &f * b;
                }
            }
        }
        v
    }

    pub fn add(&mut self, v: &[Rational]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for r in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (a, b) in r.iter_mut().zip(&w) {
                    *a -= &f * b;
                }
            }
        }
        self.rows.push(w);
        self.rows.sort_by_key(|r| r.iter().position(|x| !x.is_zero()).unwrap());
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// Span of `ad(A_{k_d}) ... ad(A_{k_1}) F` over every word, enumerated exhaustively
/// depth by depth until one more depth adds nothing; `None` if `max_depth` is hit first.
pub fn word_closure(fs: &[Mat], ops: &[Mat], dim: usize, max_depth: usize) -> Option<(NaiveSpan, usize)> {
    let mut span = NaiveSpan::new(dim * dim);
    let mut layer: Vec<Mat> = fs.to_vec();
    for f in &layer {
        span.add(&f.vectorize());
    }
    for depth in 0..max_depth {
        let mut next = Vec::with_capacity(layer.len() * ops.len());
        let mut grew = false;
        for x in &layer {
            for a in ops {
                let c = a.commutator(x);
                grew |= span.add(&c.vectorize());
                next.push(c);
            }
        }
        if !grew {
            return Some((span, depth));
        }
        layer = next;
    }
    None
}

/// Level iteration: bracket a basis of the current span with every operator until nothing new appears.
pub fn level_closure(fs: &[Mat], ops: &[Mat], dim: usize) -> NaiveSpan {
    let mut span = NaiveSpan::new(dim * dim);
    for f in fs {
        span.add(&f.vectorize());
    }
    for _ in 0..dim * dim {
        let basis: Vec<Mat> = span
            .rows()
            .iter()
            .map(|r| Mat::from_fn(dim, dim, |i, j| r[i * dim + j].clone()))
            .collect();
        let mut grew = false;
        for b in &basis {
            for a in ops {
                grew |= span.add(&a.commutator(b).vectorize());
            }
        }
        if !grew {
            break;
        }
    }
    span
}

pub fn naive_to_subspace(s: &NaiveSpan) -> Subspace {
    Subspace::span(s.dim, s.rows().iter().cloned()).unwrap()
}

/// Solutions `(x, w)` of `Σ x_i dρ(X_i) + Σ w_a W_a = 0`, in `l + s` coordinates.
pub fn kernel_identity_oracle(ext: &ExtendedSkeleton) -> Subspace {
    let base = &ext.base;
    let k = base.k_dim;
    let nl = base.l_dim();
    let d = ext.s_dim();
    let mut cols: Vec<Vec<Rational>> = base.drho.iter().map(|m| m.vectorize()).collect();
    cols.extend(ext.s_ops.iter().map(|m| m.vectorize()));
    let a = Mat::from_cols(&cols, k * k).unwrap();
    let sol = cartan_core::kernel(&a);
    Subspace::span(nl + d, sol.basis_vectors()).unwrap()
}
