//! Worker pool for sweeps and extrapolation schedules.
//!
//! Results come back in input order whatever the thread count, and every
//! eigen-solve runs on a single thread, so output does not depend on `--jobs`.

use rayon::prelude::*;
use rayon::ThreadPool;
use ringflow_core::extrap::{extrapolate_solves, solve_at, validate_schedule};
use ringflow_core::sweep::Evaluator;
use ringflow_core::{Extrapolated, Method, RingParams};

use crate::error::{CliError, CliResult};

pub struct ParallelEvaluator {
    pool: ThreadPool,
    method: Method,
}

impl ParallelEvaluator {
    pub fn new(jobs: usize, method: Method) -> CliResult<Self> {
        if jobs == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Computation(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool, method })
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// One point, with the schedule's truncations solved concurrently.
    pub fn extrapolate(&self, params: &RingParams, schedule: &[usize]) -> ringflow_core::Result<Extrapolated> {
        validate_schedule(schedule)?;
        let solves = self.pool.install(|| {
            schedule.par_iter().map(|&n| solve_at(params, n, self.method)).collect::<ringflow_core::Result<Vec<_>>>()
        })?;
        extrapolate_solves(*params, solves)
    }
}

impl Evaluator for ParallelEvaluator {
    fn evaluate(&self, points: &[RingParams], schedule: &[usize]) -> Vec<ringflow_core::Result<Extrapolated>> {
        if points.len() == 1 {
            return vec![self.extrapolate(&points[0], schedule)];
        }
        self.pool.install(|| {
            points.par_iter().map(|p| ringflow_core::extrapolated_infimum(p, schedule, self.method)).collect()
        })
    }
}
