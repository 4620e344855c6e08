use cartan_core::autos::{build_a_map, build_rho_s, flat_model_auto_filter};
use cartan_core::exactmat::unit_vec;
use cartan_core::extension::{so3_plus_r_example, CurvatureTable, SkeletonMorphism};
use cartan_core::liealg::format_combination;
use cartan_core::riemann::{riemann_classify, Classification, DEFAULT_FD_STEP, RANK_TOL};
use cartan_core::skeleton::{violations_to_result, Skeleton};
use cartan_core::{Mat, Subspace};

use crate::error::CliError;
use crate::problem::{ProblemFile, Resolved, TaskSpec};
use crate::report::Report;

pub const TASK_KINDS: [&str; 10] = [
    "validate",
    "kernel",
    "effective-quotient",
    "iext",
    "curvature",
    "torsion",
    "autos",
    "flat-autos",
    "riemann-classify",
    "example-so3",
];

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub tolerance_report: bool,
}

struct Ctx<'a> {
    problem: &'a ProblemFile,
    res: &'a Resolved,
    task: &'a TaskSpec,
    opts: Options,
}

impl Ctx<'_> {
    fn name(&self) -> String {
        self.task.display_name()
    }

    fn core(&self) -> impl Fn(cartan_core::Error) -> CliError + '_ {
        move |e| CliError::from_core_task(e, &self.name())
    }

    fn arg<'b>(&self, v: &'b Option<String>, what: &str) -> Result<&'b String, CliError> {
        v.as_ref()
            .ok_or_else(|| CliError::Parse(format!("task {}: `{}` needs `{what}`", self.name(), self.task.kind)))
    }

    fn skeleton(&self) -> Result<(&String, &Skeleton), CliError> {
        let n = self.arg(&self.task.skeleton, "skeleton")?;
        Ok((n, &self.res.skeletons[n]))
    }

    fn morphism(&self) -> Result<(&String, &SkeletonMorphism), CliError> {
        let n = self.arg(&self.task.morphism, "morphism")?;
        Ok((n, &self.res.morphisms[n]))
    }
}

/// `[a b; c d]`
pub fn fmt_mat(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

pub fn run_task(problem: &ProblemFile, res: &Resolved, task: &TaskSpec, opts: Options) -> Result<Report, CliError> {
    let ctx = Ctx {
        problem,
        res,
        task,
        opts,
    };
    match task.kind.as_str() {
        "validate" => validate(&ctx),
        "kernel" => kernel(&ctx),
        "effective-quotient" => effective_quotient(&ctx),
        "iext" => iext(&ctx),
        "curvature" => curvature(&ctx, false),
        "torsion" => curvature(&ctx, true),
        "autos" => autos(&ctx),
        "flat-autos" => flat_autos(&ctx),
        "riemann-classify" => {
            let (name, m) = ctx.morphism()?;
            let mut r = Report::new(&ctx.name());
            r.input("morphism", name);
            classify(&ctx, m, r)
        }
        "example-so3" => {
            let mut r = Report::new(&ctx.name());
            r.input("morphism", "builtin so(3)+R over so(2) into R^3+gl(3)");
            classify(&ctx, &so3_plus_r_example(), r)
        }
        other => Err(CliError::Parse(format!("unknown task kind `{other}`"))),
    }
}

fn validate(ctx: &Ctx) -> Result<Report, CliError> {
    let (name, s) = ctx.skeleton()?;
    violations_to_result(s.validate()).map_err(ctx.core())?;
    let ker = s.kernel_ideal();
    let mut r = Report::new(&ctx.name());
    r.input("skeleton", name);
    r.note(format!(
        "effective: {}, kernel dim {}",
        if ker.is_zero() { "yes" } else { "no" },
        ker.dim()
    ));
    r.dim("k", s.k_dim).dim("l", s.l_dim()).dim("kernel", ker.dim());
    if !s.component_reps.is_empty() {
        r.note(format!("{} component representative(s) checked", s.component_reps.len()));
    }
    Ok(r)
}

fn kernel(ctx: &Ctx) -> Result<Report, CliError> {
    let (name, s) = ctx.skeleton()?;
    let ker = s.kernel_ideal();
    let mut r = Report::new(&ctx.name());
    r.input("skeleton", name);
    r.note(format!("kernel dim {}", ker.dim()));
    r.dim("kernel", ker.dim()).basis("kernel", &ker);
    for v in ker.basis_vectors() {
        r.note(format!("kernel element {}", s.l.format_vector(&v)));
    }
    Ok(r)
}

fn effective_quotient(ctx: &Ctx) -> Result<Report, CliError> {
    let (name, s) = ctx.skeleton()?;
    let (q, _, _) = s.effective_quotient_with_maps().map_err(ctx.core())?;
    let mut r = Report::new(&ctx.name());
    r.input("skeleton", name);
    r.note(format!("effective quotient: dim k {}, dim l {}", q.k_dim, q.l_dim()));
    r.dim("k", q.k_dim).dim("l", q.l_dim()).dim("kernel", s.kernel_ideal().dim());
    r.basis_mats("drho", &q.drho);
    Ok(r)
}

fn iext(ctx: &Ctx) -> Result<Report, CliError> {
    let (name, s) = ctx.skeleton()?;
    let alg = s.iext_algebra().map_err(ctx.core())?;
    let k = s.k_dim;
    let mut r = Report::new(&ctx.name());
    r.input("skeleton", name);
    r.note(format!("iext dim {}", alg.dim()));
    r.dim("iext", alg.dim()).basis("iext", &alg);
    for m in alg.basis_mats(k).map_err(ctx.core())? {
        r.note(format!("generator {}", fmt_mat(&m)));
    }
    if let Some(c) = &s.complement {
        // identity on the declared complement, zero on l
        let mut h = Mat::zeros(k, k);
        for v in c.basis_vectors() {
            let i = v.iter().position(|x| *x != cartan_core::rat(0)).unwrap_or(0);
            if v == unit_vec(k, i) {
                h[(i, i)] = cartan_core::rat(1);
            }
        }
        let inside = alg.contains(&h.vectorize()).map_err(ctx.core())?;
        r.note(format!(
            "homothety generator {}: {}",
            fmt_mat(&h),
            if inside { "contained" } else { "not contained" }
        ));
    }
    Ok(r)
}

fn curvature_notes(r: &mut Report, m: &SkeletonMorphism, t: &CurvatureTable) {
    let g = &m.source.g;
    let labels = &m.target.k_labels;
    for (i, j, v) in &t.entries {
        if v.iter().any(|x| *x != cartan_core::rat(0)) {
            r.note(format!(
                "({}, {}) -> {}",
                g.format_vector(&t.representatives[*i]),
                g.format_vector(&t.representatives[*j]),
                format_combination(v, labels)
            ));
        }
    }
}

fn curvature(ctx: &Ctx, torsion: bool) -> Result<Report, CliError> {
    let (name, m) = ctx.morphism()?;
    violations_to_result(m.extension_violations()).map_err(ctx.core())?;
    let t = if torsion {
        m.torsion_component()
    } else {
        m.curvature_homogeneous()
    }
    .map_err(ctx.core())?;
    let what = if torsion { "torsion" } else { "curvature" };
    let span = t.span();
    let mut r = Report::new(&ctx.name());
    r.input("morphism", name);
    r.note(if span.is_zero() {
        format!("{what}: zero")
    } else {
        format!("{what} span dim {}", span.dim())
    });
    r.dim(what, span.dim()).basis(what, &span);
    curvature_notes(&mut r, m, &t);
    Ok(r)
}

fn s_for(ctx: &Ctx, skeleton_name: &str, k: usize) -> Result<(String, Subspace), CliError> {
    match &ctx.task.s {
        None => Ok(("0".into(), Subspace::zero(k * k))),
        Some(sn) => {
            let (on, s) = &ctx.res.subspaces[sn];
            if on != skeleton_name {
                return Err(CliError::Parse(format!(
                    "task {}: s `{sn}` acts on `{on}`, not on `{skeleton_name}`",
                    ctx.name()
                )));
            }
            Ok((sn.clone(), s.clone()))
        }
    }
}

fn autos(ctx: &Ctx) -> Result<Report, CliError> {
    let (name, m) = ctx.morphism()?;
    let target = &ctx.problem.morphisms[name].target;
    let (sn, s) = s_for(ctx, target, m.target.k_dim)?;
    let ext = build_rho_s(&m.target, &s).map_err(ctx.core())?;
    let a = build_a_map(m, &ext).map_err(ctx.core())?;
    let hol = a.holonomy_closure();
    let eff = a.effective_autos().map_err(ctx.core())?;
    let bound = ext.total_dim();
    if eff.autos.dim() > bound {
        return Err(CliError::Invariant(format!(
            "task {}: dim autos {} exceeds dim k + dim s = {bound}",
            ctx.name(),
            eff.autos.dim()
        )));
    }
    let mut r = Report::new(&ctx.name());
    r.input("morphism", name).input("s", &sn);
    r.note(format!(
        "autos dim {}; effective autos dim {}",
        eff.autos.dim(),
        eff.image.dim()
    ));
    r.dim("k+s", bound)
        .dim("s", ext.s_dim())
        .dim("holonomy closure", hol.dim())
        .dim("autos", eff.autos.dim())
        .dim("effective autos", eff.image.dim())
        .dim("kernel", ext.result.kernel_ideal().dim());
    r.basis("autos", &eff.autos);
    let labels = &ext.result.k_labels;
    for v in eff.autos.basis_vectors() {
        r.note(format!("auto {}", format_combination(&v, labels)));
    }
    r.note(format!("bound: {} <= dim k + dim s = {bound}", eff.autos.dim()));
    r.caveat("infinitesimal automorphisms; completeness is not decided");
    Ok(r)
}

fn flat_autos(ctx: &Ctx) -> Result<Report, CliError> {
    let kn = ctx.arg(&ctx.task.klein, "klein")?;
    let klein = &ctx.res.kleins[kn];
    let base = klein.skeleton();
    let k = base.k_dim;
    let (sn, s) = match &ctx.task.s {
        None => ("0".to_string(), Subspace::zero(k * k)),
        Some(sn) => (sn.clone(), ctx.res.subspaces[sn].1.clone()),
    };
    let ext = build_rho_s(&base, &s).map_err(ctx.core())?;
    let kept = flat_model_auto_filter(&ext, klein).map_err(ctx.core())?;
    let a = build_a_map(&SkeletonMorphism::identity(klein), &ext).map_err(ctx.core())?;
    let autos = a.infinitesimal_autos();
    let mut r = Report::new(&ctx.name());
    r.input("klein", kn).input("s", &sn);
    r.note(format!("retained {} of {} directions of s", kept.dim(), s.dim()));
    r.dim("s", s.dim()).dim("retained", kept.dim()).dim("autos", autos.dim());
    r.basis("retained", &kept);
    Ok(r)
}

fn classify(ctx: &Ctx, m: &SkeletonMorphism, mut r: Report) -> Result<Report, CliError> {
    let c: Classification = riemann_classify(m).map_err(ctx.core())?;
    r.note(c.summary());
    r.dim("n", c.n).dim("hol", c.hol.dim()).basis("hol", &c.hol);
    for l in &c.hol_labels {
        r.note(format!("hol generator {l}"));
    }
    r.note(format!("metrizable: {}", if c.metrizable { "yes" } else { "no" }));
    if let Some(d) = &c.details {
        r.dim("normalizer", d.normalizer.dim())
            .dim("Z", d.z.dim())
            .dim("k+s", d.extended_dim)
            .dim("s", d.s_dim)
            .dim("autos", d.autos.dim())
            .dim("effective autos", d.effective_autos_dim)
            .dim("orbit", d.orbit.orbit_dim);
        r.basis("normalizer", &d.normalizer)
            .basis_mats("Z", &d.z.z_exact)
            .basis("effective autos", &d.auto_image);
        r.note(format!("representatives {}", d.orbit.representatives));
        r.note(format!(
            "bounds: {} <= dim k + dim s = {}; {} <= n + dim s = {}",
            d.bound_extended.0, d.bound_extended.1, d.bound_metric.0, d.bound_metric.1
        ));
        if ctx.opts.tolerance_report {
            r.note(format!(
                "tolerance: finite-difference step {DEFAULT_FD_STEP:e}, relative rank tolerance {RANK_TOL:e}"
            ));
            r.note(format!("tolerance: ranks at base points {:?}", d.orbit.ranks));
            for (i, sv) in d.orbit.singular_values.iter().enumerate() {
                let s: Vec<String> = sv.iter().map(|x| format!("{x:.3e}")).collect();
                r.note(format!("tolerance: singular values at base point {i}: [{}]", s.join(", ")));
            }
        }
    }
    for cv in &c.caveats {
        r.caveat(cv.clone());
    }
    Ok(r)
}
