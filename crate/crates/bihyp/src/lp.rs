//! Dense two-phase simplex for small standard-form problems.
//!
//! Solves `min c'x` subject to `Ax = b`, `x >= 0` on problems with a handful
//! of rows and at most a few dozen columns. Bland's rule keeps the pivot
//! sequence finite; a hard pivot budget of `10 * (rows + columns)` per phase
//! turns numerical trouble into an explicit error instead of a spin.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LpOutcome {
    pub objective: f64,
    pub x: Vec<f64>,
    #[allow(dead_code)]
    pub pivots: usize,
}

/// Minimizes `c'x` over `Ax = b`, `x >= 0`.
///
/// `a` is row-major with one inner vector per constraint. Infeasibility is
/// reported when the phase-one optimum exceeds `feas_tol`.
pub(crate) fn solve_standard(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
    feas_tol: f64,
) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Tableau: n structural columns, m artificial columns, rhs.
    let cols = n + m;
    let mut t = vec![vec![0.0f64; cols + 1]; m];
    for (i, row) in a.iter().enumerate() {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for (j, v) in row.iter().enumerate() {
            t[i][j] = flip * v;
        }
        t[i][n + i] = 1.0;
        t[i][cols] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..cols).collect();

    // Phase one: minimize the artificial sum.
    let phase1_cost: Vec<f64> = (0..cols).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    let mut pivots = run_phase(&mut t, &mut basis, &phase1_cost, cols, 0)?;
    let infeas: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &bj)| bj >= n)
        .map(|(i, _)| t[i][cols])
        .sum();
    if infeas > feas_tol {
        return Err(Error::LpInfeasible);
    }

    // Phase two: original costs, artificials banned from entering.
    let mut phase2_cost = vec![0.0f64; cols];
    phase2_cost[..n].copy_from_slice(c);
    pivots += run_phase(&mut t, &mut basis, &phase2_cost, n, pivots)?;

    let mut x = vec![0.0f64; n];
    let mut objective = 0.0;
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][cols];
            objective += c[bj] * t[i][cols];
        }
    }
    Ok(LpOutcome { objective, x, pivots })
}

/// Pivots until no reduced cost is attractive among the first
/// `enterable` columns. Returns the number of pivots performed.
fn run_phase(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    enterable: usize,
    pivots_so_far: usize,
) -> Result<usize> {
    let m = t.len();
    let cols = cost.len();
    let cap = 10 * (m + cols);
    let mut reduced = vec![0.0f64; cols];
    for j in 0..cols {
        let mut r = cost[j];
        for i in 0..m {
            r -= cost[basis[i]] * t[i][j];
        }
        reduced[j] = r;
    }

    let mut pivots = 0;
    loop {
        // Bland: the lowest-index attractive column enters.
        let Some(enter) = (0..enterable)
            .find(|&j| !basis.contains(&j) && reduced[j] < -tol::LP_PIVOT)
        else {
            return Ok(pivots);
        };
        // Ratio test, ties broken by the lowest basis index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > tol::LP_PIVOT {
                let ratio = t[i][cols] / t[i][enter];
                let better = ratio < best - tol::LP_PIVOT
                    || (ratio < best + tol::LP_PIVOT
                        && leave.is_some_and(|l| basis[i] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // Nonnegative costs keep both phases bounded, so a missing leaving
        // row means the pivot tolerance swallowed the column.
        let Some(leave) = leave else {
            return Err(Error::NumericalStall(pivots_so_far + pivots));
        };

        let piv = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != leave && t[i][enter].abs() > 0.0 {
                let factor = t[i][enter];
                for j in 0..=cols {
                    t[i][j] -= factor * t[leave][j];
                }
                t[i][enter] = 0.0;
            }
        }
        let factor = reduced[enter];
        for j in 0..cols {
            reduced[j] -= factor * t[leave][j];
        }
        reduced[enter] = 0.0;
        basis[leave] = enter;

        pivots += 1;
        if pivots > cap {
            return Err(Error::NumericalStall(pivots_so_far + pivots));
        }
    }
}

/// Feasibility of `Ax = b`, `x >= 0`: phase one alone.
pub(crate) fn feasible(a: &[Vec<f64>], b: &[f64], feas_tol: f64) -> Result<bool> {
    let n = a.first().map_or(0, |r| r.len());
    match solve_standard(a, b, &vec![0.0; n], feas_tol) {
        Ok(_) => Ok(true),
        Err(Error::LpInfeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_two_variable_assignment() {
        // min x + y with x = 1, y = 2.
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let out = solve_standard(&a, &[1.0, 2.0], &[1.0, 1.0], 1e-9).unwrap();
        assert!((out.objective - 3.0).abs() < 1e-12);
        assert!((out.x[0] - 1.0).abs() < 1e-12 && (out.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn picks_the_cheaper_representation() {
        // Two ways to hit b = 2: column 0 at weight 2 (cost 2) or column 1
        // at weight 1 (cost 1).
        let a = vec![vec![1.0, 2.0]];
        let out = solve_standard(&a, &[2.0], &[1.0, 1.0], 1e-9).unwrap();
        assert!((out.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_of_square_corner() {
        // Columns are the corners of the unit square; min weight sum writing
        // (1,1) is 1 (the corner itself).
        let v = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]];
        let a = vec![
            v.iter().map(|p| p[0]).collect::<Vec<_>>(),
            v.iter().map(|p| p[1]).collect::<Vec<_>>(),
        ];
        let out = solve_standard(&a, &[1.0, 1.0], &[1.0; 4], 1e-9).unwrap();
        assert!((out.objective - 1.0).abs() < 1e-9);
        let out = solve_standard(&a, &[2.0, 0.0], &[1.0; 4], 1e-9).unwrap();
        assert!((out.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reports_infeasible_targets() {
        // Both columns point right; the target points left.
        let a = vec![vec![1.0, 2.0]];
        let r = solve_standard(&a, &[-1.0], &[1.0, 1.0], 1e-9);
        assert_eq!(r, Err(Error::LpInfeasible));
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        let a = vec![vec![-1.0, 1.0]];
        let out = solve_standard(&a, &[-3.0], &[1.0, 1.0], 1e-9).unwrap();
        assert!((out.objective - 3.0).abs() < 1e-9);
        assert!((out.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn feasibility_wrapper_distinguishes_membership() {
        // x in conv{(0,), (2,)} iff 0 <= x <= 2, encoded with a weight row.
        let a = vec![vec![0.0, 2.0], vec![1.0, 1.0]];
        assert!(feasible(&a, &[1.0, 1.0], 1e-9).unwrap());
        assert!(!feasible(&a, &[3.0, 1.0], 1e-9).unwrap());
    }
}
