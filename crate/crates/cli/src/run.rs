use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;

use anyhow::{anyhow, bail, Context};
use hf2d::dualvar::{
    dual_power_iterate, fixed_point_solve, periodic_solve, Coefficient, DualOptions, DualProblem, DualState,
    FixedPointOptions, PeriodicOptions, SolveReport,
};
use hf2d::farfield::{annulus_error, cesaro_error, compare_routes, decay_fit, hat_on_circle, sector_fit};
use hf2d::field::{read_dump, Grid, GridField, RealField};
use hf2d::radial::{integrate_radial, shoot_solve, ShootOptions};
use hf2d::resolvent::{
    apply_resolvent_extrapolated, dyadic_norm_scan, endpoint_counterexample, inner_half_difference, radiation_ratio,
    truncated_phi1_scan, KernelDecomposition, ProbeFamily, RealOperator, Resolvent, TorusResolvent, DEFAULT_EPS,
};
use hf2d::{specfun, Complex64};
use serde::Serialize;
use serde_json::json;

use crate::config::{q_descriptor, Command, ExperimentConfig, ScanKind, SolveMode};
use crate::manifest::{num, Sink};

/// How a run ended, short of a configuration or I/O error.
pub enum Finish {
    Ok,
    SolverFailure(String),
}

pub fn dispatch(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    match cfg.subcommand {
        Command::Kernel => kernel(cfg, sink),
        Command::Resolve => resolve(cfg, sink),
        Command::Estimates => estimates(cfg, sink),
        Command::Solve => solve(cfg, sink),
        Command::Farfield => farfield(cfg, sink),
        Command::Oracle => oracle(cfg, sink),
        Command::Decomp => decomp(cfg, sink),
    }
}

fn grid(cfg: &ExperimentConfig) -> anyhow::Result<Grid> {
    Grid::new(cfg.grid.n, cfg.grid.h).map_err(|e| anyhow!("grid: {e}"))
}

fn half_width(g: &Grid) -> f64 {
    0.5 * g.side()
}

fn kernel(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let [r0, r1] = cfg.r_range;
    let m = cfg.points;
    let mut rows = Vec::with_capacity(m);
    for k in 0..m {
        let r = r0 * (r1 / r0).powf(k as f64 / (m - 1) as f64);
        let phi = specfun::eval_phi(r)?;
        let bound = (1.0 + r.ln().abs()).min(r.powf(-0.5));
        rows.push(vec![num(r), num(phi.re), num(phi.im), num(phi.norm() / bound)]);
    }
    sink.csv("kernel.csv", &["r", "re_phi", "im_phi", "bound_ratio"], rows)?;
    Ok(Finish::Ok)
}

fn load_input(cfg: &ExperimentConfig) -> anyhow::Result<Option<GridField<Complex64>>> {
    let Some(path) = &cfg.input else { return Ok(None) };
    let f = File::open(path).with_context(|| format!("input: opening {}", path.display()))?;
    Ok(Some(read_dump(BufReader::new(f)).with_context(|| format!("input: reading {}", path.display()))?))
}

fn resolve(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let f = match load_input(cfg)? {
        Some(f) => f,
        None => GridField::from_fn(grid(cfg)?, |x, y| Complex64::new((-0.5 * (x * x + y * y)).exp(), 0.0)),
    };
    let g = *f.grid();
    let res = Resolvent::new(g)?;
    let out = res.apply(&f)?;
    let residual = res.spectral_residual(&f)?;
    let ext = apply_resolvent_extrapolated(&f, &DEFAULT_EPS)?;
    let agreement = inner_half_difference(&out.u, &ext)?;
    let hw = half_width(&g);
    let radiation = radiation_ratio(&out.u, 0.5 * hw, 0.9 * hw)?;
    sink.dump("u.hf2d", &out.u)?;
    sink.json(
        "resolve.json",
        &json!({
            "grid": { "n": g.n(), "h": g.h() },
            "spectral_residual": residual,
            "backend_difference": agreement,
            "extrapolation_eps": DEFAULT_EPS,
            "radiation_ratio": { "r_in": 0.5 * hw, "r_out": 0.9 * hw, "value": radiation },
            "support_warning": out.support_warning,
        }),
    )?;
    Ok(Finish::Ok)
}

fn estimates(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let want = |k: ScanKind| cfg.scan == ScanKind::All || cfg.scan == k;
    let mut summary = serde_json::Map::new();
    let probes = ProbeFamily::new(cfg.seed, cfg.probes);
    let needs_decomp = want(ScanKind::Dyadic) || want(ScanKind::Truncated);
    let decomp = if needs_decomp { Some(KernelDecomposition::build(&grid(cfg)?)?) } else { None };
    if want(ScanKind::Dyadic) {
        let d = decomp.as_ref().expect("built above");
        // pieces live on [2^{j-1}, 2^{j+1}]
        let top = (half_width(d.grid()).log2().floor() as u32).saturating_sub(1);
        if top < 4 {
            bail!("grid: half-width {:.1} too small for a dyadic scan", half_width(d.grid()));
        }
        let js: Vec<u32> = (3..=top.min(8)).collect();
        let scan = dyadic_norm_scan(d, &js, &probes)?;
        sink.csv(
            "dyadic.csv",
            &["j", "sup_norm", "ratio"],
            scan.rows.iter().map(|r| vec![r.j.to_string(), num(r.sup_norm), num(r.ratio)]),
        )?;
        summary.insert("dyadic".into(), json!({ "sup_slope": scan.sup_slope, "ratio_slope": scan.ratio_slope }));
    }
    if want(ScanKind::Truncated) {
        let d = decomp.as_ref().expect("built above");
        let limit = 0.5 * half_width(d.grid());
        let radii: Vec<f64> = (2..).map(|k| 2f64.powi(k)).take_while(|&r| r <= limit).collect();
        if radii.len() < 2 {
            bail!("grid: too small for a truncated-kernel scan");
        }
        let scan = truncated_phi1_scan(d, &radii, cfg.p, &probes)?;
        sink.csv("truncated.csv", &["radius", "ratio"], scan.rows.iter().map(|r| vec![num(r.radius), num(r.ratio)]))?;
        summary.insert(
            "truncated".into(),
            json!({ "p": scan.p, "lambda_p": scan.lambda_p, "exponent": scan.exponent, "sign_check": scan.sign_check }),
        );
    }
    if want(ScanKind::Endpoint) {
        let scan = endpoint_counterexample(&[1.0, 2.0, 4.0, 8.0, 16.0], 64)?;
        sink.csv(
            "endpoint.csv",
            &["k", "h", "l1_norm", "sup_norm", "under_resolved"],
            scan.rows
                .iter()
                .map(|r| vec![num(r.k), num(r.h), num(r.l1_norm), num(r.sup_norm), r.under_resolved.to_string()]),
        )?;
        summary.insert("endpoint".into(), json!({ "slope": scan.slope, "predicted_slope": scan.predicted_slope }));
    }
    summary.insert("seed".into(), json!(cfg.seed));
    summary.insert("probes".into(), json!(cfg.probes));
    sink.json("estimates.json", &summary)?;
    Ok(Finish::Ok)
}

/// Real part of the first seeded probe, for perturbing initial guesses.
fn perturbation(seed: u64, g: &Grid) -> Vec<f64> {
    ProbeFamily::new(seed, 1).probe(0, g).samples().iter().map(|c| c.re).collect()
}

fn seeded(g: Grid, seed: u64, base: impl Fn(f64) -> f64 + Sync) -> RealField {
    let noise = perturbation(seed, &g);
    let mut f = RealField::from_fn(g, |x, y| base(x * x + y * y));
    for (a, e) in f.samples_mut().iter_mut().zip(noise) {
        *a += 1e-3 * e;
    }
    f
}

fn solve(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let g = grid(cfg)?;
    let desc = q_descriptor(cfg)?;
    let q = Coefficient::sample(desc, &g)?;
    let whole;
    let torus;
    let op: &dyn RealOperator = if cfg.mode == SolveMode::Periodic {
        torus = TorusResolvent::new(g)?;
        &torus
    } else {
        whole = Resolvent::new(g)?;
        &whole
    };
    let problem = DualProblem::new(op, &q, cfg.p)?;
    let (v, u, report) = match cfg.mode {
        SolveMode::FixedPoint => {
            let u0 = seeded(g, cfg.seed, |r2| 2.0 * (-0.5 * r2).exp());
            let mut opts = FixedPointOptions { tol: cfg.tol, max_iter: cfg.max_iter, ..Default::default() };
            if let Some(t) = cfg.theta {
                opts.theta = t;
            }
            let (u, rep) = fixed_point_solve(&u0, &problem, &opts)?;
            let v = RealField::from_vec(g, problem.v_from_u(u.samples()))?;
            (v, u, rep)
        }
        SolveMode::Dual | SolveMode::Periodic => {
            // narrow enough that Re Phi > 0 across the bump, so int v K v > 0
            let width2 = if cfg.mode == SolveMode::Dual { 0.09 } else { 0.04 };
            let v0 = DualState::new(seeded(g, cfg.seed, |r2| (-0.5 * r2 / width2).exp()), cfg.p)?;
            let mut dual = DualOptions { tol: cfg.tol, max_iter: cfg.max_iter, ..Default::default() };
            if let Some(t) = cfg.theta {
                dual.theta = t;
            }
            if cfg.mode == SolveMode::Dual {
                dual_power_iterate(&v0, &problem, &dual)?
            } else {
                periodic_solve(&v0, &problem, &PeriodicOptions { dual, ..Default::default() })?
            }
        }
    };
    sink.dump("u.hf2d", &u)?;
    sink.dump("v.hf2d", &v)?;
    sink.csv(
        "residuals.csv",
        &["iteration", "residual"],
        report.residual_history.iter().enumerate().map(|(k, r)| vec![k.to_string(), num(*r)]),
    )?;
    #[derive(Serialize)]
    struct Out<'a> {
        q: hf2d::dualvar::QDescriptor,
        seed: u64,
        #[serde(flatten)]
        report: &'a SolveReport,
    }
    sink.json("report.json", &Out { q: desc, seed: cfg.seed, report: &report })?;
    if report.converged() {
        Ok(Finish::Ok)
    } else {
        Ok(Finish::SolverFailure(format!("{:?}: {}", report.status, report.message)))
    }
}

fn farfield(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let input = load_input(cfg)?.ok_or_else(|| anyhow!("input: farfield needs --input <dump>"))?;
    let g = *input.grid();
    if let Some(a) = cfg.annuli.iter().find(|a| a[1] > half_width(&g)) {
        bail!("annuli: radius {} exceeds the half-width of the input grid", a[1]);
    }
    let with_q = cfg.q.preset.is_some() || cfg.q.file.is_some();
    // with a weight the input is a solution u; without, it is a source f
    let (u, src) = if with_q {
        let q = Coefficient::sample(q_descriptor(cfg)?, &g)?;
        let u = input.re();
        let src = RealField::from_vec(
            g,
            u.samples().iter().zip(q.samples().samples()).map(|(&a, &w)| w * a.abs().powf(cfg.p - 2.0) * a).collect(),
        )?;
        (u, src)
    } else {
        let u = Resolvent::new(g)?.apply(&input)?.u.re();
        (u, input.re())
    };
    let trace = hat_on_circle(&src, cfg.angles)?;
    sink.csv(
        "trace.csv",
        &["theta", "re_f", "im_f"],
        trace.angles.iter().zip(&trace.values).map(|(t, v)| vec![num(*t), num(v.re), num(v.im)]),
    )?;
    let mut errs = Vec::new();
    for a in &cfg.annuli {
        errs.push(annulus_error(&u, &trace, a[0], a[1])?);
    }
    sink.csv(
        "annulus_errors.csv",
        &["r_in", "r_out", "sup", "l2"],
        errs.iter().map(|e| vec![num(e.r_in), num(e.r_out), num(e.sup), num(e.l2)]),
    )?;
    let hw = half_width(&g);
    let radii: Vec<f64> = cfg.cesaro_radii.iter().cloned().filter(|&r| r <= hw).collect();
    let ces = cesaro_error(&u, &trace, &radii)?;
    sink.csv("cesaro.csv", &["radius", "error"], ces.iter().map(|(r, e)| vec![num(*r), num(*e)]))?;
    let outer = *cfg.annuli.last().ok_or_else(|| anyhow!("annuli: need at least one annulus"))?;
    let fits = sector_fit(&u, outer[0], outer[1], 8)?;
    let routes = compare_routes(&trace, &fits);
    let decay = decay_fit(&u, [outer[0].max(2.0 * PI), outer[1]]).ok();
    sink.json(
        "farfield.json",
        &json!({
            "source": if with_q { "Q|u|^(p-2)u" } else { "input" },
            "conjugate_symmetry_defect": trace.conjugate_symmetry_defect(),
            "route_comparison": routes,
            "sectors": fits,
            "decay": decay,
        }),
    )?;
    Ok(Finish::Ok)
}

fn oracle(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let desc = q_descriptor(cfg)?;
    let q = desc.radial().ok_or_else(|| anyhow!("q: the oracle needs a radial weight"))?;
    let shot = match shoot_solve(&q, cfg.p, cfg.a_bracket, cfg.r_max, &ShootOptions::for_radius(cfg.r_max)) {
        Ok(s) => s,
        Err(fail) => {
            sink.json("shooting.json", &fail)?;
            return Ok(Finish::SolverFailure(fail.message));
        }
    };
    let prof = integrate_radial(shot.a, &q, cfg.p, cfg.r_max)?;
    let r0 = prof.r[0];
    let reach = prof.reach();
    let m = cfg.points;
    let mut rows = Vec::with_capacity(m);
    for k in 0..m {
        let r = r0 + (reach - r0) * k as f64 / (m - 1) as f64;
        let (u, du) = prof.eval(r)?;
        rows.push(vec![num(r), num(u), num(du)]);
    }
    sink.csv("profile.csv", &["r", "u", "du"], rows)?;
    sink.json("shooting.json", &shot)?;
    Ok(Finish::Ok)
}

fn decomp(cfg: &ExperimentConfig, sink: &mut Sink) -> anyhow::Result<Finish> {
    let g = grid(cfg)?;
    let d = KernelDecomposition::build(&g)?;
    let n = g.n();
    let c = g.center_index();
    let row = c / n;
    let mut rows = Vec::new();
    for i in (c % n)..n {
        let k = row * n + i;
        let r = g.radius(k);
        rows.push(vec![
            num(r),
            num(d.phi.samples()[k].norm()),
            num(d.phi1.samples()[k].norm()),
            num(d.phi2.samples()[k].norm()),
        ]);
    }
    sink.csv("decomp.csv", &["r", "abs_phi", "abs_phi1", "abs_phi2"], rows)?;
    let hw = half_width(&g);
    let fit = |f: &GridField<Complex64>, top: f64| {
        let r1 = top.min(0.9 * hw);
        if r1 > 20.0 {
            decay_fit(f, [10.0, r1]).ok()
        } else {
            None
        }
    };
    sink.json(
        "decomp.json",
        &json!({
            "grid": { "n": n, "h": g.h() },
            "phi1_decay": fit(&d.phi1, 200.0),
            "phi2_decay": fit(&d.phi2, 100.0),
        }),
    )?;
    Ok(Finish::Ok)
}
