use std::f64::consts::PI;

use ringflow::config::{resolve, resolve_list, resolve_opt};
use ringflow::formats::{self, display, EigenRecord, FitRecord};
use ringflow::manifest::{sha256_file, ManifestBuilder};
use ringflow::parallel::ParallelEvaluator;
use ringflow::verify;
use ringflow::{CliError, CliResult};
use ringflow_core::extrap::SWEEP_SCHEDULE;
use ringflow_core::line::{nystrom_convergence, ring_small_alpha_limit, LineGrid, C_LINE};
use ringflow_core::sweep::{find_infimum, sweep_alpha, InfimumSearch};
use ringflow_core::twomode::{global_two_mode_min, two_mode_curves, CURVE_BETAS};
use ringflow_core::{
    build_kernel, current_series, maximizing_state, mean_energy, min_eigen, minimize_two_mode, Method, RingParams,
};
use serde::Serialize;
use serde_json::json;

use crate::{
    AlphaArgs, Context, CurrentArgs, EigenArgs, ExtrapolateArgs, InfimumArgs, KernelArgs, LineArgs, MethodArg,
    PointArgs, StateArgs, SweepArgs, TwoModeArgs,
};

fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Validation(format!("--{flag} is required (flag or config file)")))
}

enum AlphaSpec {
    Alpha(f64),
    OverPi(f64),
}

fn alpha_spec(ctx: &Context, a: &AlphaArgs) -> CliResult<Option<AlphaSpec>> {
    match (a.alpha, a.alpha_over_pi) {
        (Some(v), _) => return Ok(Some(AlphaSpec::Alpha(v))),
        (None, Some(v)) => return Ok(Some(AlphaSpec::OverPi(v))),
        (None, None) => {}
    }
    match (ctx.config.get::<f64>("alpha")?, ctx.config.get::<f64>("alpha_over_pi")?) {
        (Some(_), Some(_)) => {
            Err(CliError::Validation("config file sets both alpha and alpha_over_pi; keep one".into()))
        }
        (Some(v), None) => Ok(Some(AlphaSpec::Alpha(v))),
        (None, Some(v)) => Ok(Some(AlphaSpec::OverPi(v))),
        (None, None) => Ok(None),
    }
}

fn ring_params(ctx: &Context, p: &PointArgs, mf: &mut ManifestBuilder) -> CliResult<RingParams> {
    let spec = require(alpha_spec(ctx, &p.alpha)?, "alpha or --alpha-over-pi")?;
    let beta = resolve(p.beta, &ctx.config, "beta", 0.0)?;
    let params = match spec {
        AlphaSpec::Alpha(a) => RingParams::new(a, beta)?,
        AlphaSpec::OverPi(x) => RingParams::from_alpha_over_pi(x, beta)?,
    };
    record_params(mf, &params);
    Ok(params)
}

fn record_params(mf: &mut ManifestBuilder, params: &RingParams) {
    mf.param("alpha", params.alpha())
        .param("alpha_over_pi", params.alpha_over_pi())
        .param("beta", params.beta_raw())
        .param("beta_canonical", params.beta())
        .param("shift", params.shift());
}

fn method(ctx: &Context, flag: Option<MethodArg>, mf: &mut ManifestBuilder) -> CliResult<Method> {
    let m = resolve(flag, &ctx.config, "method", MethodArg(Method::Auto))?.0;
    mf.param("method", format!("{m:?}").to_ascii_lowercase());
    Ok(m)
}

fn evaluator(ctx: &Context, method: Method, mf: &mut ManifestBuilder) -> CliResult<ParallelEvaluator> {
    mf.param("jobs", ctx.jobs);
    ParallelEvaluator::new(ctx.jobs, method)
}

/// `steps` points from `lo` to `hi`, both ends exact.
fn uniform_grid(lo: f64, hi: f64, steps: usize) -> CliResult<Vec<f64>> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(CliError::Validation(format!("grid [{lo}, {hi}] is not a finite interval")));
    }
    if steps == 0 || (steps == 1 && lo != hi) {
        return Err(CliError::Validation(format!("--steps {steps} cannot cover [{lo}, {hi}]")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { hi } else { lo + (hi - lo) * (k as f64 / last) }).collect())
}

fn finish(mf: ManifestBuilder) -> CliResult<()> {
    let (path, _) = mf.finish()?;
    println!("manifest {}", path.display());
    Ok(())
}

pub fn eigen(ctx: &Context, a: EigenArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "eigen");
    let params = ring_params(ctx, &a.point, &mut mf)?;
    let n = require(resolve_opt(a.n, &ctx.config, "n")?, "n")?;
    mf.param("n", n);
    let method = method(ctx, a.method, &mut mf)?;

    let kernel = build_kernel(&params.with_truncation(n)?)?;
    let r = min_eigen(&kernel, method)?;
    formats::write_json(&mf.output("eigen.json"), &EigenRecord::new(&params, &r))?;

    println!("lambda_min {}", display(r.lambda_min));
    println!("residual {:.3e} ({} solver, {} iterations)", r.residual_norm, r.method.as_str(), r.iterations);
    finish(mf)
}

pub fn extrapolate(ctx: &Context, a: ExtrapolateArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "extrapolate");
    let params = ring_params(ctx, &a.point, &mut mf)?;
    let schedule = resolve_list(a.schedule, &ctx.config, "schedule", &SWEEP_SCHEDULE)?;
    mf.param("schedule", &schedule);
    let method = method(ctx, a.method, &mut mf)?;

    let e = evaluator(ctx, method, &mut mf)?.extrapolate(&params, &schedule)?;
    formats::write_json(&mf.output("fit.json"), &FitRecord::from(&e))?;

    println!("P {}", display(e.p));
    println!("fit a1 {} a2 {} residual {:.3e}", display(e.fit.a1), display(e.fit.a2), e.fit.residual);
    if !e.sanity_ok {
        eprintln!("warning: extrapolated value lies outside the band spanned by the largest truncations");
    }
    finish(mf)
}

pub fn sweep(ctx: &Context, a: SweepArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "sweep");
    let beta = resolve(a.beta, &ctx.config, "beta", 0.0)?;
    let lo = require(resolve_opt(a.alpha_min, &ctx.config, "alpha_min")?, "alpha-min")?;
    let hi = require(resolve_opt(a.alpha_max, &ctx.config, "alpha_max")?, "alpha-max")?;
    let steps = resolve(a.steps, &ctx.config, "steps", 11)?;
    let schedule = resolve_list(a.schedule, &ctx.config, "schedule", &SWEEP_SCHEDULE)?;
    let grid = uniform_grid(lo, hi, steps)?;
    mf.param("beta", beta).param("alpha_over_pi_grid", &grid).param("schedule", &schedule);
    let method = method(ctx, a.method, &mut mf)?;
    let ev = evaluator(ctx, method, &mut mf)?;

    let points = sweep_alpha(beta, &grid, &schedule, &ev)?;
    formats::write_sweep_csv(&mf.output("sweep.csv"), &points)?;

    let failures: Vec<_> = points.iter().filter_map(|p| p.as_ref().err()).collect();
    for f in &failures {
        eprintln!("warning: alpha/pi = {}: {}", f.alpha_over_pi, f.error);
    }
    let best = points.iter().filter_map(|p| p.as_ref().ok()).min_by(|x, y| x.p_estimate.total_cmp(&y.p_estimate));
    println!("{} points, {} failed", points.len(), failures.len());
    if let Some(b) = best {
        println!("lowest p {} at alpha/pi {}", display(b.p_estimate), b.alpha_over_pi);
    }
    finish(mf)?;
    if failures.len() == points.len() {
        return Err(CliError::Computation("every sweep point failed".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct StageRecord {
    alpha_step: f64,
    beta_step: f64,
    evaluations: usize,
    alpha_over_pi: f64,
    beta: f64,
    p: f64,
}

#[derive(Serialize)]
struct InfimumRecord {
    alpha_over_pi: f64,
    alpha: f64,
    beta: f64,
    p: f64,
    evaluations: usize,
    budget_exhausted: bool,
    stages: Vec<StageRecord>,
}

pub fn infimum(ctx: &Context, a: InfimumArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "infimum");
    let cfg = &ctx.config;
    let alpha_box = (resolve(a.alpha_min, cfg, "alpha_min", 0.3)?, resolve(a.alpha_max, cfg, "alpha_max", 0.45)?);
    let beta_box = (resolve(a.beta_min, cfg, "beta_min", -0.05)?, resolve(a.beta_max, cfg, "beta_max", 0.0)?);
    let budget = resolve(a.budget, cfg, "budget", 2000)?;
    let mut search = InfimumSearch::new(alpha_box, beta_box, budget);
    search.coarse = (
        resolve(a.coarse_alpha, cfg, "coarse_alpha", search.coarse.0)?,
        resolve(a.coarse_beta, cfg, "coarse_beta", search.coarse.1)?,
    );
    search.stages = resolve(a.stages, cfg, "stages", search.stages)?;
    search.candidates = resolve(a.candidates, cfg, "candidates", search.candidates)?;
    search.schedule = resolve_list(a.schedule, cfg, "schedule", &search.schedule)?;
    search.final_schedule = match a.final_schedule {
        Some(s) => Some(s),
        None => cfg.get_list("final_schedule")?,
    };
    search.pin_beta_final = !a.free_beta;
    mf.param("alpha_over_pi_box", [alpha_box.0, alpha_box.1])
        .param("beta_box", [beta_box.0, beta_box.1])
        .param("budget", budget)
        .param("coarse", [search.coarse.0, search.coarse.1])
        .param("stages", search.stages)
        .param("half_width", [search.half_width.0, search.half_width.1])
        .param("candidates", search.candidates)
        .param("schedule", &search.schedule)
        .param("final_schedule", &search.final_schedule)
        .param("pin_beta_final", search.pin_beta_final);
    let method = method(ctx, a.method, &mut mf)?;
    let ev = evaluator(ctx, method, &mut mf)?;

    let r = find_infimum(&search, &ev)?;
    let record = InfimumRecord {
        alpha_over_pi: r.alpha_over_pi,
        alpha: r.alpha_over_pi * PI,
        beta: r.beta,
        p: r.p,
        evaluations: r.evaluations,
        budget_exhausted: r.budget_exhausted,
        stages: r
            .stages
            .iter()
            .map(|s| StageRecord {
                alpha_step: s.alpha_step,
                beta_step: s.beta_step,
                evaluations: s.evaluations,
                alpha_over_pi: s.alpha_over_pi,
                beta: s.beta,
                p: s.p,
            })
            .collect(),
    };
    formats::write_json(&mf.output("infimum.json"), &record)?;

    for (i, s) in r.stages.iter().enumerate() {
        println!(
            "stage {i}: step {:.0e} x {:.0e}, {} evaluations, p {} at alpha/pi {} beta {}",
            s.alpha_step,
            s.beta_step,
            s.evaluations,
            display(s.p),
            s.alpha_over_pi,
            s.beta
        );
    }
    println!("p* {} at alpha/pi {} beta {} ({} evaluations)", display(r.p), r.alpha_over_pi, r.beta, r.evaluations);
    if r.budget_exhausted {
        eprintln!("warning: budget of {budget} evaluations exhausted; result is the incumbent");
    }
    finish(mf)
}

pub fn twomode(ctx: &Context, a: TwoModeArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "twomode");
    let m1 = resolve(a.m1, &ctx.config, "m1", 0)?;
    let m2 = resolve(a.m2, &ctx.config, "m2", 1)?;
    if m1 >= m2 {
        return Err(CliError::Validation(format!("need m1 < m2, got {m1} and {m2}")));
    }
    mf.param("m1", m1).param("m2", m2);

    if a.global {
        mf.param("mode", "global");
        let g = global_two_mode_min(m1, m2)?;
        let path = mf.output("twomode.json");
        formats::write_json(
            &path,
            &json!({"m1": m1, "m2": m2, "alpha_over_pi": g.alpha_over_pi, "beta": g.beta, "p": g.p}),
        )?;
        println!("p_min {} at alpha/pi {} beta {}", display(g.p), g.alpha_over_pi, g.beta);
    } else if alpha_spec(ctx, &a.point.alpha)?.is_some() {
        mf.param("mode", "point");
        let params = ring_params(ctx, &a.point, &mut mf)?;
        let r = minimize_two_mode(m1, m2, &params)?;
        let path = mf.output("twomode.json");
        formats::write_json(
            &path,
            &json!({
                "m1": m1, "m2": m2,
                "alpha_over_pi": params.alpha_over_pi(), "beta": params.beta_raw(),
                "p_min": r.p_min, "phi_star": r.phi_star, "gamma_star": r.gamma_star,
                "a": r.a_val, "b": r.b_val, "degenerate": r.degenerate,
            }),
        )?;
        println!("p_min {} (phi {} gamma {})", display(r.p_min), r.phi_star, r.gamma_star);
    } else {
        let amax = resolve(a.alpha_max_over_pi, &ctx.config, "alpha_max_over_pi", 2.0)?;
        let points = resolve(a.alpha_points, &ctx.config, "alpha_points", 400)?;
        if !(amax.is_finite() && amax > 0.0) || points == 0 {
            return Err(CliError::Validation("curve grid needs alpha_max_over_pi > 0 and alpha_points >= 1".into()));
        }
        let grid: Vec<f64> = (1..=points).map(|k| amax * (k as f64 / points as f64)).collect();
        mf.param("mode", "curves")
            .param("alpha_max_over_pi", amax)
            .param("alpha_points", points)
            .param("betas", CURVE_BETAS);
        let rows = two_mode_curves(m1, m2, &grid, &CURVE_BETAS)?;
        formats::write_two_mode_curves_csv(&mf.output("twomode_curves.csv"), &rows)?;
        let lowest = rows.iter().min_by(|x, y| x.2.total_cmp(&y.2)).expect("grid is nonempty");
        println!("{} rows; lowest p_min {} at alpha/pi {} beta {}", rows.len(), display(lowest.2), lowest.0, lowest.1);
    }
    finish(mf)
}

pub fn state(ctx: &Context, a: StateArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "state");
    let params = ring_params(ctx, &a.point, &mut mf)?;
    let n = require(resolve_opt(a.n, &ctx.config, "n")?, "n")?;
    mf.param("n", n);
    let method = method(ctx, a.method, &mut mf)?;

    let ms = maximizing_state(&params.with_truncation(n)?, method)?;
    formats::write_state_csv(&mf.output("state.csv"), &ms.state, ms.eigen.lambda_min)?;

    let c = ms.state.coeffs();
    let c0 = c[0].norm();
    let mut violations = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for (m, cm) in c.iter().enumerate().skip(1) {
        let ratio = cm.norm() * (m * m) as f64 / c0;
        worst_ratio = worst_ratio.max(ratio);
        if ratio >= 1.0 {
            violations += 1;
        }
    }
    let energy = mean_energy(&ms.state);
    formats::write_json(
        &mf.output("state_report.json"),
        &json!({
            "n_trunc": n,
            "lambda_min": ms.eigen.lambda_min,
            "mean_energy": energy,
            "c0_abs": c0,
            "decay_violations": violations,
            "max_m2_ratio": worst_ratio,
        }),
    )?;

    println!("lambda_min {}", display(ms.eigen.lambda_min));
    println!("mean energy <E>T/hbar {energy}");
    println!("modes with |c_m| >= |c_0|/m^2: {violations} (max |c_m| m^2/|c_0| = {worst_ratio:.4})");
    finish(mf)
}

pub fn current(ctx: &Context, a: CurrentArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "current");
    let state = match &a.state_file {
        Some(path) => {
            let file = formats::read_state_csv(path)?;
            let (digest, _) =
                sha256_file(path).map_err(|e| CliError::MissingInput { path: path.clone(), source: e })?;
            mf.param("state_file", path.display().to_string()).param("state_file_sha256", digest);
            record_params(&mut mf, file.state.params());
            file.state
        }
        None => {
            let params = ring_params(ctx, &a.point, &mut mf)?;
            let n = require(resolve_opt(a.n, &ctx.config, "n")?, "n (or --state-file)")?;
            mf.param("n", n);
            let method = method(ctx, a.method, &mut mf)?;
            maximizing_state(&params.with_truncation(n)?, method)?.state
        }
    };
    let theta = resolve(a.theta, &ctx.config, "theta", 0.0)?;
    let tau = (resolve(a.tau_min, &ctx.config, "tau_min", -1.5)?, resolve(a.tau_max, &ctx.config, "tau_max", 1.5)?);
    let samples = resolve(a.samples, &ctx.config, "samples", 6001)?;
    mf.param("theta", theta).param("tau_range", [tau.0, tau.1]).param("samples", samples);

    let series = current_series(&state, theta, tau, samples)?;
    let window = (-0.5, 0.5);
    formats::write_current_csv(&mf.output("current.csv"), &series, state.params(), window)?;

    let inside: Vec<(f64, f64)> = series.window(window.0, window.1).collect();
    let integral: f64 = inside.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    let negative = inside.iter().filter(|s| s.1 < 0.0).count();
    let lowest = series.tj_values.iter().copied().fold(f64::INFINITY, f64::min);
    println!("{} samples, min TJ {}", series.tj_values.len(), display(lowest));
    if inside.len() >= 2 {
        println!(
            "window [-1/2, 1/2]: {} samples, {negative} negative, trapezoid integral {}",
            inside.len(),
            display(integral)
        );
    }
    finish(mf)
}

pub fn line(ctx: &Context, a: LineArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "line");
    let method = method(ctx, a.method, &mut mf)?;
    if a.ring_route {
        mf.param("route", "ring");
        let params = ring_params(ctx, &a.point, &mut mf)?;
        let n = require(resolve_opt(a.n, &ctx.config, "n")?, "n")?;
        mf.param("n", n);
        let r = ring_small_alpha_limit(&params, n, method)?;
        formats::write_json(
            &mf.output("line.json"),
            &json!({
                "alpha": params.alpha(), "beta": params.beta(), "n_trunc": n,
                "lambda_min": r.lambda_min, "c_line_estimate": -r.lambda_min,
                "u_coverage": r.u_coverage, "undercovered": r.undercovered,
            }),
        )?;
        println!("c_line estimate {} (reference {C_LINE}), coverage u = {:.3}", -r.lambda_min, r.u_coverage);
        if r.undercovered {
            eprintln!(
                "warning: n sqrt(alpha) = {:.3} is too small for the ring to resolve the line limit",
                r.u_coverage
            );
        }
    } else {
        mf.param("route", "nystrom");
        let u_max = resolve(a.u_max, &ctx.config, "u_max", 10.0)?;
        let n_points = resolve(a.n_points, &ctx.config, "n_points", 2000)?;
        let doublings = resolve(a.doublings, &ctx.config, "doublings", 0)?;
        mf.param("u_max", u_max).param("n_points", n_points).param("doublings", doublings);
        let rows = nystrom_convergence(&LineGrid::new(u_max, n_points)?, doublings, method)?;
        formats::write_convergence_csv(&mf.output("line_convergence.csv"), &rows)?;
        for (u, n, l) in &rows {
            println!("u_max {u} n_points {n}: c_line estimate {}", -l);
        }
        println!("reference c_line {C_LINE}");
    }
    finish(mf)
}

pub fn kernel(ctx: &Context, a: KernelArgs) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "kernel");
    let params = ring_params(ctx, &a.point, &mut mf)?;
    let n = require(resolve_opt(a.n, &ctx.config, "n")?, "n")?;
    mf.param("n", n);
    let kernel = build_kernel(&params.with_truncation(n)?)?;
    let path = mf.output("kernel.csv");
    formats::write_kernel_csv(&path, &kernel)?;
    println!("{}x{} kernel written to {}", kernel.dim(), kernel.dim(), path.display());
    finish(mf)
}

#[derive(Serialize)]
struct CheckRecord {
    name: &'static str,
    passed: bool,
    detail: String,
}

pub fn verify(ctx: &Context) -> CliResult<()> {
    let mut mf = ManifestBuilder::new(&ctx.out, "verify");
    let checks = verify::run_all();
    for c in &checks {
        println!("{} {}: {} [{:.2}s]", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail, c.seconds);
    }
    let records: Vec<CheckRecord> =
        checks.iter().map(|c| CheckRecord { name: c.name, passed: c.passed, detail: c.detail.clone() }).collect();
    formats::write_json(&mf.output("verify.json"), &records)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    finish(mf)?;
    if failed > 0 {
        return Err(CliError::Computation(format!("{failed} verification check(s) failed")));
    }
    Ok(())
}
