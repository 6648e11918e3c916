//! Desk-scale exponent fitting: count copies of `T` in the blow-up
//! instances for growing `n` and fit the log-log slope.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::constructions::build_lower_bound_graph;
use crate::counting::{count_copies_with, CountOptions};
use crate::error::{Error, Result};
use crate::forest::{alpha_s, Forest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: usize,
    pub count: BigUint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub points: Vec<FitPoint>,
    pub slope: f64,
    pub target: usize,
    pub tolerance: f64,
    /// Set when the time budget ran out before every `n` was counted.
    pub partial: bool,
}

impl FitReport {
    pub fn within_tolerance(&self) -> bool {
        (self.slope - self.target as f64).abs() <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub tolerance: f64,
    pub threads: Option<usize>,
    pub time_budget: Option<Duration>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tolerance: 0.2,
            threads: None,
            time_budget: None,
        }
    }
}

/// Least-squares slope of `y` against `x`. Needs two distinct `x` values.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let len = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn run_fit(t: &Forest, s: usize, n_values: &[usize]) -> Result<FitReport> {
    run_fit_with(t, s, n_values, &FitOptions::default())
}

pub fn run_fit_with(t: &Forest, s: usize, n_values: &[usize], opts: &FitOptions) -> Result<FitReport> {
    let target = alpha_s(t, s).value;
    let floor = 2 * t.n() + 2 * target;
    if n_values.len() < 2 {
        return Err(Error::Domain("need at least two values of n".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("n values must be strictly increasing".into()));
    }
    if let Some(&bad) = n_values.iter().find(|&&n| n < floor) {
        return Err(Error::Domain(format!("n = {bad} is below 2|V(T)| + 2 alpha = {floor}")));
    }
    let started = Instant::now();
    let count_opts = CountOptions {
        limit: None,
        threads: opts.threads,
    };
    let mut points = Vec::new();
    let mut partial = false;
    for &n in n_values {
        if opts.time_budget.is_some_and(|b| started.elapsed() > b) {
            partial = true;
            break;
        }
        let inst = build_lower_bound_graph(t, s, n)?;
        let count = count_copies_with(t, &inst.graph, &count_opts)?.copies;
        if count == BigUint::from(0u8) {
            return Err(Error::Defect(format!("no copies at n = {n}")));
        }
        points.push(FitPoint { n, count });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.n as f64).ln(), p.count.to_f64().unwrap_or(f64::INFINITY).ln()))
        .collect();
    let slope = match least_squares_slope(&logs) {
        Some(x) if x.is_finite() => x,
        // too few points survived the budget
        _ if partial => f64::NAN,
        _ => return Err(Error::Defect("slope is not finite".into())),
    };
    Ok(FitReport {
        points,
        slope,
        target,
        tolerance: opts.tolerance,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_powers() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0].iter().map(|&x| (x.ln(), (3.0 * x * x).ln())).collect();
        assert!((least_squares_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(least_squares_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn single_vertex_counts_n() {
        let r = run_fit(&Forest::path(1), 1, &[10, 20, 40]).unwrap();
        assert_eq!(r.target, 1);
        for p in &r.points {
            assert_eq!(p.count, BigUint::from(p.n));
        }
        assert!((r.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_slope() {
        let r = run_fit(&Forest::path(3), 1, &[50, 100, 200]).unwrap();
        assert_eq!(r.target, 2);
        assert!(r.within_tolerance(), "{r:?}");
    }

    #[test]
    fn preconditions() {
        let p3 = Forest::path(3);
        assert!(run_fit(&p3, 1, &[100, 50]).is_err());
        assert!(run_fit(&p3, 1, &[5, 50]).is_err());
        assert!(run_fit(&p3, 1, &[50]).is_err());
    }
}
