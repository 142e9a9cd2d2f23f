//! Parameter-plane maps of the extrapolated infimum and a staged grid search
//! for its global minimum.
//!
//! The infimum as a function of `alpha` has structure on very small scales,
//! so the search never trusts derivatives: it rescans ever finer local grids
//! around the incumbent.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::Method;
use crate::error::{finite, Error, Result};
use crate::extrap::{extrapolated_infimum, validate_schedule, Extrapolated};
use crate::kernel::RingParams;

/// Evaluates extrapolated infima for a batch of parameter points. Results
/// come back in input order.
pub trait Evaluator {
    fn evaluate(&self, points: &[RingParams], schedule: &[usize]) -> Vec<Result<Extrapolated>>;
}

/// One point after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential {
    pub method: Method,
}

impl Evaluator for Sequential {
    fn evaluate(&self, points: &[RingParams], schedule: &[usize]) -> Vec<Result<Extrapolated>> {
        points.iter().map(|p| extrapolated_infimum(p, schedule, self.method)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub alpha_over_pi: f64,
    /// Canonical flux.
    pub beta: f64,
    pub p_estimate: f64,
    pub schedule: Vec<usize>,
    pub fit_residual: f64,
    pub sanity_ok: bool,
}

impl SweepRecord {
    fn from_extrapolated(e: &Extrapolated) -> Self {
        Self {
            alpha_over_pi: e.params.alpha_over_pi(),
            beta: e.params.beta(),
            p_estimate: e.p,
            schedule: e.fit.n_values.clone(),
            fit_residual: e.fit.residual,
            sanity_ok: e.sanity_ok,
        }
    }
}

/// A sweep point that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub alpha_over_pi: f64,
    pub beta: f64,
    pub error: Error,
}

pub type SweepPoint = core::result::Result<SweepRecord, SweepFailure>;

/// Infimum along an `alpha/pi` grid at fixed flux, in grid order. Point
/// failures are reported in place and do not stop the sweep.
pub fn sweep_alpha<E: Evaluator + ?Sized>(
    beta: f64,
    alpha_over_pi: &[f64],
    schedule: &[usize],
    evaluator: &E,
) -> Result<Vec<SweepPoint>> {
    if alpha_over_pi.is_empty() {
        return Err(Error::InvalidParameter("alpha grid is empty"));
    }
    finite("beta", beta)?;
    validate_schedule(schedule)?;

    let mut out: Vec<Option<SweepPoint>> = vec![None; alpha_over_pi.len()];
    let mut valid = Vec::new();
    let mut slots = Vec::new();
    for (i, &x) in alpha_over_pi.iter().enumerate() {
        match RingParams::from_alpha_over_pi(x, beta) {
            Ok(p) => {
                valid.push(p);
                slots.push(i);
            }
            Err(error) => out[i] = Some(Err(SweepFailure { alpha_over_pi: x, beta, error })),
        }
    }
    let results = evaluator.evaluate(&valid, schedule);
    for ((slot, params), r) in slots.into_iter().zip(&valid).zip(results) {
        out[slot] = Some(match r {
            Ok(e) => Ok(SweepRecord::from_extrapolated(&e)),
            Err(error) => Err(SweepFailure { alpha_over_pi: params.alpha_over_pi(), beta: params.beta(), error }),
        });
    }
    Ok(out.into_iter().map(|p| p.expect("every slot filled")).collect())
}

/// Staged grid search configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct InfimumSearch {
    /// `alpha/pi` box, inclusive.
    pub alpha_over_pi: (f64, f64),
    /// Flux box, inclusive, inside `(-1, 0]`.
    pub beta: (f64, f64),
    /// Maximum number of extrapolated evaluations.
    pub budget: usize,
    /// Coarse grid points along `alpha` and `beta`.
    pub coarse: (usize, usize),
    /// Refinement stages after the coarse scan; each shrinks the step tenfold.
    pub stages: usize,
    /// Local grid half-widths in steps, `(alpha, beta)`.
    pub half_width: (usize, usize),
    /// Number of distinct best points of a stage refined by the next one.
    pub candidates: usize,
    pub schedule: Vec<usize>,
    /// Schedule for the last stage; defaults to `schedule`.
    pub final_schedule: Option<Vec<usize>>,
    /// Evaluate only `beta = 0` in the last stage when the box contains it.
    pub pin_beta_final: bool,
}

impl InfimumSearch {
    pub fn new(alpha_over_pi: (f64, f64), beta: (f64, f64), budget: usize) -> Self {
        Self {
            alpha_over_pi,
            beta,
            budget,
            coarse: (16, 3),
            stages: 3,
            half_width: (15, 2),
            candidates: 3,
            schedule: crate::extrap::SWEEP_SCHEDULE.to_vec(),
            final_schedule: None,
            pin_beta_final: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageSummary {
    pub alpha_step: f64,
    pub beta_step: f64,
    pub evaluations: usize,
    pub alpha_over_pi: f64,
    pub beta: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfimumResult {
    pub alpha_over_pi: f64,
    pub beta: f64,
    pub p: f64,
    pub stages: Vec<StageSummary>,
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi == lo {
        return vec![lo];
    }
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * (k as f64 / (n - 1) as f64) }).collect()
}

fn local_axis(center: f64, step: f64, half: usize, lo: f64, hi: f64) -> Vec<f64> {
    if step == 0.0 || half == 0 {
        return vec![center];
    }
    let h = half as i64;
    let mut v: Vec<f64> = (-h..=h).map(|k| center + step * k as f64).filter(|x| *x >= lo && *x <= hi).collect();
    if v.is_empty() {
        v.push(center);
    }
    v
}

/// Best points of a stage, greedily skipping any that shares an `alpha`
/// (or, on a single-`alpha` grid, a `beta`) with one already taken.
fn pick_candidates(ranked: &[(f64, f64, f64)], count: usize, astep: f64, bstep: f64) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::with_capacity(count);
    for &c in ranked {
        if out.len() == count.max(1) {
            break;
        }
        let clash = out.iter().any(|o| {
            if astep > 0.0 {
                libm::fabs(o.0 - c.0) < 0.5 * astep
            } else {
                libm::fabs(o.1 - c.1) < 0.5 * bstep.max(f64::MIN_POSITIVE)
            }
        });
        if !clash {
            out.push(c);
        }
    }
    out
}

/// Coarse scan of the box, then `stages` local rescans around the best few
/// points of the previous stage with the step divided by ten each time.
pub fn find_infimum<E: Evaluator + ?Sized>(search: &InfimumSearch, evaluator: &E) -> Result<InfimumResult> {
    let (alo, ahi) = search.alpha_over_pi;
    let (blo, bhi) = search.beta;
    for v in [alo, ahi, blo, bhi] {
        finite("search box", v)?;
    }
    if !(alo > 0.0 && alo <= ahi) {
        return Err(Error::InvalidParameter("alpha box must satisfy 0 < lo <= hi"));
    }
    if !(blo > -1.0 && blo <= bhi && bhi <= 0.0) {
        return Err(Error::InvalidParameter("beta box must lie inside (-1, 0]"));
    }
    validate_schedule(&search.schedule)?;
    if let Some(s) = &search.final_schedule {
        validate_schedule(s)?;
    }
    if search.budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive"));
    }

    let mut evaluations = 0usize;
    let mut exhausted = false;
    let mut incumbent: Option<(f64, f64, f64)> = None;
    let mut frontier: Vec<(f64, f64, f64)> = Vec::new();
    let mut stages = Vec::new();

    let na = if ahi > alo { search.coarse.0.max(2) } else { 1 };
    let nb = if bhi > blo { search.coarse.1.max(2) } else { 1 };
    let mut astep = if na > 1 { (ahi - alo) / (na - 1) as f64 } else { 0.0 };
    let mut bstep = if nb > 1 { (bhi - blo) / (nb - 1) as f64 } else { 0.0 };

    for stage in 0..=search.stages {
        let last = stage == search.stages;
        let schedule = match (&search.final_schedule, last) {
            (Some(s), true) => s.as_slice(),
            _ => search.schedule.as_slice(),
        };
        let mut points: Vec<(f64, f64)> = Vec::new();
        if frontier.is_empty() {
            for a in linspace(alo, ahi, na) {
                for b in linspace(blo, bhi, nb) {
                    points.push((a, b));
                }
            }
        } else {
            astep /= 10.0;
            bstep /= 10.0;
            let sa = if astep > 0.0 { astep } else { 1.0 };
            let sb = if bstep > 0.0 { bstep } else { 1.0 };
            let windows: Vec<Vec<(f64, f64)>> = frontier
                .iter()
                .map(|&(ca, cb, _)| {
                    let betas = if last && search.pin_beta_final && bhi == 0.0 {
                        vec![0.0]
                    } else {
                        local_axis(cb, bstep, search.half_width.1, blo, bhi)
                    };
                    let mut w: Vec<(f64, f64)> = local_axis(ca, astep, search.half_width.0, alo, ahi)
                        .into_iter()
                        .flat_map(|a| betas.iter().map(move |&b| (a, b)))
                        .collect();
                    let dist = |x: &(f64, f64)| libm::fabs(x.0 - ca) / sa + libm::fabs(x.1 - cb) / sb;
                    w.sort_by(|x, y| dist(x).partial_cmp(&dist(y)).unwrap_or(core::cmp::Ordering::Equal));
                    w
                })
                .collect();
            // round-robin over the windows, nearest-first within each, so a
            // truncated batch keeps every center
            let longest = windows.iter().map(Vec::len).max().unwrap_or(0);
            for k in 0..longest {
                for q in windows.iter().filter_map(|w| w.get(k)) {
                    let dup =
                        points.iter().any(|o| libm::fabs(o.0 - q.0) <= 1e-3 * sa && libm::fabs(o.1 - q.1) <= 1e-3 * sb);
                    if !dup {
                        points.push(*q);
                    }
                }
            }
        }
        let remaining = search.budget - evaluations;
        if points.len() > remaining {
            points.truncate(remaining);
            exhausted = true;
        }
        let params: Vec<RingParams> =
            points.iter().map(|&(a, b)| RingParams::from_alpha_over_pi(a, b)).collect::<Result<_>>()?;
        let results = evaluator.evaluate(&params, schedule);
        evaluations += params.len();

        // the stage's own ranking: centers are re-evaluated on this stage's schedule
        let mut ranked: Vec<(f64, f64, f64)> = Vec::with_capacity(params.len());
        let mut first_error = None;
        for (p, r) in params.iter().zip(results) {
            match r {
                Ok(e) => ranked.push((p.alpha_over_pi(), p.beta(), e.p)),
                Err(err) => {
                    first_error.get_or_insert(err);
                }
            }
        }
        ranked.sort_by(|x, y| x.2.partial_cmp(&y.2).unwrap_or(core::cmp::Ordering::Equal));
        match ranked.first() {
            Some(&b) => {
                incumbent = Some(b);
                frontier = pick_candidates(&ranked, search.candidates, astep, bstep);
            }
            None if incumbent.is_none() => {
                return Err(first_error.unwrap_or(Error::InvalidParameter("no point evaluated")));
            }
            None => {}
        }
        let (a, b, p) = incumbent.expect("incumbent set");
        stages.push(StageSummary {
            alpha_step: astep,
            beta_step: bstep,
            evaluations: params.len(),
            alpha_over_pi: a,
            beta: b,
            p,
        });
        if exhausted || (na == 1 && nb == 1) {
            break;
        }
    }
    let (alpha_over_pi, beta, p) = incumbent.expect("incumbent set");
    Ok(InfimumResult { alpha_over_pi, beta, p, stages, evaluations, budget_exhausted: exhausted })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Synthetic evaluator: a smooth bowl in (alpha/pi, beta) with minimum at (0.4, 0).
    struct Bowl;
    impl Evaluator for Bowl {
        fn evaluate(&self, points: &[RingParams], schedule: &[usize]) -> Vec<Result<Extrapolated>> {
            points
                .iter()
                .map(|p| {
                    let v = (p.alpha_over_pi() - 0.4123456).powi(2) - p.beta() - 1.0;
                    let pts: Vec<(usize, f64)> = schedule.iter().map(|&n| (n, v)).collect();
                    let fit = crate::extrap::fit_quadratic(&pts)?;
                    Ok(Extrapolated { params: *p, p: fit.a0, sanity_ok: true, fit, solves: Vec::new() })
                })
                .collect()
        }
    }

    #[test]
    fn staged_search_on_bowl() {
        let s = InfimumSearch { schedule: vec![10, 20, 30, 40], ..InfimumSearch::new((0.3, 0.5), (-0.5, 0.0), 1000) };
        let r = find_infimum(&s, &Bowl).unwrap();
        assert!((r.alpha_over_pi - 0.4123456).abs() < 2e-5);
        assert_eq!(r.beta, 0.0);
        assert!(!r.budget_exhausted);
        assert_eq!(r.stages.len(), 4);
        for w in r.stages.windows(2) {
            assert!(w[1].p <= w[0].p + 1e-12);
        }
    }

    #[test]
    fn budget_exhaustion_returns_incumbent() {
        let s = InfimumSearch { schedule: vec![10, 20, 30, 40], ..InfimumSearch::new((0.3, 0.5), (-0.5, 0.0), 50) };
        let r = find_infimum(&s, &Bowl).unwrap();
        assert!(r.budget_exhausted);
        assert_eq!(r.evaluations, 50);
    }

    #[test]
    fn degenerate_box_is_single_evaluation() {
        let s = InfimumSearch { schedule: vec![10, 20, 30, 40], ..InfimumSearch::new((0.4, 0.4), (-0.2, -0.2), 10) };
        let r = find_infimum(&s, &Bowl).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!((r.alpha_over_pi, r.beta), (0.4, -0.2));
    }

    #[test]
    fn box_validation() {
        assert!(find_infimum(&InfimumSearch::new((0.0, 0.5), (-0.5, 0.0), 10), &Bowl).is_err());
        assert!(find_infimum(&InfimumSearch::new((0.3, 0.5), (-0.5, 0.2), 10), &Bowl).is_err());
        assert!(find_infimum(&InfimumSearch::new((0.5, 0.3), (-0.5, 0.0), 10), &Bowl).is_err());
    }

    #[test]
    fn sweep_reports_bad_points_in_band() {
        let grid = [0.2, -1.0, 0.4];
        let out = sweep_alpha(0.0, &grid, &[10, 20, 30, 40], &Bowl).unwrap();
        assert!(out[0].is_ok());
        assert!(out[1].is_err());
        assert!(out[2].is_ok());
        assert!(sweep_alpha(0.0, &[], &[10, 20, 30, 40], &Bowl).is_err());
    }
}
