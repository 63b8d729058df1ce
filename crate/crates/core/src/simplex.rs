//! Dense phase-1 simplex for equality-form feasibility problems.
//!
//! Finds x >= 0 with A x = b by minimizing the sum of artificial variables
//! under Bland's pivoting rule, which cannot cycle. The achievability test
//! has few rows (particles + 1) and possibly many columns (states), so a
//! dense row-major tableau is the right shape: each pivot is one pass over
//! the tableau.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Outcome of the feasibility solve.
pub(crate) enum Feasibility {
    /// A nonnegative solution of `A x = b`.
    Feasible(Vec<f64>),
    /// No such solution; carries the phase-1 optimum (total constraint
    /// violation at the closest point found).
    Infeasible { infeasibility: f64 },
}

const ENTER_TOL: f64 = 1e-13;
const PIVOT_TOL: f64 = 1e-10;

/// Solves `A x = b, x >= 0` where `a` is row-major `m x n`. Declares the
/// system feasible when the phase-1 optimum is at most `accept`.
pub(crate) fn solve(a: &[f64], m: usize, n: usize, b: &[f64], accept: f64) -> Result<Feasibility> {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), m);

    // Tableau rows are [A | I | b] with b >= 0 (rows with negative right
    // hand side are negated). Basis starts as the artificial identity.
    let width = n + m + 1;
    let mut t = vec![0.0f64; m * width];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = flip * a[i * n + j];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + n + m] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Cost row for min(sum of artificials), priced out against the
    // artificial basis: cost[j] = -sum_i t[i][j] on structural columns,
    // zero on artificials; objective = sum_i b_i.
    let mut cost = vec![0.0f64; n + m];
    let mut objective = 0.0;
    for i in 0..m {
        for (j, c) in cost.iter_mut().enumerate().take(n) {
            *c -= t[i * width + j];
        }
        objective += t[i * width + n + m];
    }

    let max_iter = 1000 + 200 * m;
    for _ in 0..max_iter {
        // Bland: entering column = lowest index with negative reduced cost.
        let Some(enter) = cost.iter().position(|&c| c < -ENTER_TOL) else {
            return Ok(finish(&t, &basis, m, n, width, objective, accept));
        };

        // Ratio test; Bland tie-break on the lowest basic variable index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let coeff = t[i * width + enter];
            if coeff > PIVOT_TOL {
                let ratio = t[i * width + n + m] / coeff;
                if ratio < best - 1e-15
                    || (ratio < best + 1e-15
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            // Phase-1 objective is bounded below by zero, so an unbounded
            // ray indicates numerical breakdown.
            return Err(Error::SolverFailure(
                "feasibility solve found an unbounded direction".into(),
            ));
        };

        // Pivot on (leave, enter): normalize, then eliminate from the
        // other rows and the cost row.
        let pivot = t[leave * width + enter];
        for j in 0..width {
            t[leave * width + j] /= pivot;
        }
        t[leave * width + enter] = 1.0;
        for i in 0..m {
            if i == leave {
                continue;
            }
            let factor = t[i * width + enter];
            if factor != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= factor * t[leave * width + j];
                }
                t[i * width + enter] = 0.0;
            }
        }
        let factor = cost[enter];
        if factor != 0.0 {
            for (j, c) in cost.iter_mut().enumerate() {
                *c -= factor * t[leave * width + j];
            }
            cost[enter] = 0.0;
            // Entering at value b̂ moves the objective by its reduced cost.
            objective += factor * t[leave * width + n + m];
        }
        basis[leave] = enter;
    }
    Err(Error::SolverFailure(
        "feasibility solve exceeded its pivot budget".into(),
    ))
}

fn finish(
    t: &[f64],
    basis: &[usize],
    m: usize,
    n: usize,
    width: usize,
    objective: f64,
    accept: f64,
) -> Feasibility {
    // Residual infeasibility = value still carried by basic artificials.
    let mut residual = 0.0;
    for i in 0..m {
        if basis[i] >= n {
            residual += t[i * width + n + m].max(0.0);
        }
    }
    let infeasibility = residual.max(objective).max(0.0);
    if infeasibility > accept {
        return Feasibility::Infeasible { infeasibility };
    }
    let mut x = vec![0.0f64; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i * width + n + m].max(0.0);
        }
    }
    Feasibility::Feasible(x)
}
