//! Two-phase primal simplex over an ordered field, plus the small exact
//! linear-algebra helpers the coupling programs need.
//!
//! The solver works on equality form: minimize `c . x` subject to
//! `a x = b`, `x >= 0`. Phase one drives a full set of artificial columns to
//! zero; rows whose artificial cannot be pivoted out are redundant and are
//! dropped. Entering and leaving columns follow Bland's rule, so the exact
//! instantiation cannot cycle. The same code runs over `f64` with a small
//! comparison slack in place of exact zero tests.

use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Div, Mul, Neg, Sub};

/// Numeric requirements of the solver. Rationals compare exactly; floats
/// compare against a small slack so near-zero pivots are never taken.
pub(crate) trait LpNum:
    Clone
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Comparison slack; exactly zero for exact number types.
    fn slack() -> Self;
}

impl LpNum for f64 {
    fn slack() -> f64 {
        1e-11
    }
}

impl LpNum for BigRational {
    fn slack() -> Self {
        Self::zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome<T> {
    Optimal { x: Vec<T> },
    Infeasible,
}

/// Minimize `c . x` over `{ a x = b, x >= 0 }`.
///
/// Redundant equality rows are tolerated; an unbounded objective is an error
/// because every program built in this module has a bounded feasible set.
pub(crate) fn solve_lp<T: LpNum>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpOutcome<T>> {
    let m = a.len();
    let n = c.len();
    if m == 0 || n == 0 || b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("linear program", "empty or ragged constraint data"));
    }

    // rows carry n structural columns, m artificial columns, and the rhs;
    // flipping signs where b < 0 keeps the artificial start feasible
    let total = n + m;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i] < T::zero();
        let mut r: Vec<T> = Vec::with_capacity(total + 1);
        for v in row {
            r.push(if flip { -v.clone() } else { v.clone() });
        }
        for j in 0..m {
            r.push(if j == i { T::one() } else { T::zero() });
        }
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(r);
    }
    let mut basis: Vec<usize> = (n..total).collect();

    let phase1: Vec<T> = (0..total)
        .map(|j| if j < n { T::zero() } else { T::one() })
        .collect();
    let mut cost = reduced_costs(&rows, &basis, &phase1, total);
    run_to_optimum(&mut rows, &mut cost, &mut basis, total)?;
    if -cost[total].clone() > T::slack() {
        return Ok(LpOutcome::Infeasible);
    }

    // clear leftover artificials: pivot to any structural column on their
    // row, or drop the row as redundant
    for i in 0..rows.len() {
        if basis[i] < n {
            continue;
        }
        let slack = T::slack();
        let found = (0..n).find(|&j| rows[i][j] > slack || rows[i][j] < -slack.clone());
        if let Some(j) = found {
            pivot(&mut rows, &mut cost, &mut basis, i, j);
        }
    }
    let mut keep_rows = Vec::with_capacity(rows.len());
    let mut keep_basis = Vec::with_capacity(basis.len());
    for (row, &bi) in rows.iter().zip(&basis) {
        if bi >= n {
            continue;
        }
        let mut r: Vec<T> = row[..n].to_vec();
        r.push(row[total].clone());
        keep_rows.push(r);
        keep_basis.push(bi);
    }
    let mut rows = keep_rows;
    let mut basis = keep_basis;

    let mut cost = reduced_costs(&rows, &basis, c, n);
    run_to_optimum(&mut rows, &mut cost, &mut basis, n)?;

    let mut x = vec![T::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        let v = rows[i][n].clone();
        x[bi] = if v < T::zero() { T::zero() } else { v };
    }
    Ok(LpOutcome::Optimal { x })
}

/// Reduced-cost row for a tableau in canonical basis form. Entry `ncols`
/// holds the negated objective value.
fn reduced_costs<T: LpNum>(rows: &[Vec<T>], basis: &[usize], c: &[T], ncols: usize) -> Vec<T> {
    (0..=ncols)
        .map(|j| {
            let mut acc = if j < ncols { c[j].clone() } else { T::zero() };
            for (row, &bi) in rows.iter().zip(basis) {
                if !c[bi].is_zero() && !row[j].is_zero() {
                    acc = acc - c[bi].clone() * row[j].clone();
                }
            }
            acc
        })
        .collect()
}

fn run_to_optimum<T: LpNum>(
    rows: &mut [Vec<T>],
    cost: &mut [T],
    basis: &mut [usize],
    ncols: usize,
) -> Result<()> {
    loop {
        let neg = -T::slack();
        // Bland: smallest eligible column enters
        let Some(enter) = (0..ncols).find(|&j| cost[j] < neg) else {
            return Ok(());
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<T> = None;
        for i in 0..rows.len() {
            if rows[i][enter] > T::slack() {
                let ratio = rows[i][ncols].clone() / rows[i][enter].clone();
                let better = match (&best, leave) {
                    (None, _) => true,
                    (Some(r), Some(l)) => ratio < *r || (ratio == *r && basis[i] < basis[l]),
                    _ => unreachable!(),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::invalid("linear program", "objective is unbounded below"));
        };
        pivot(rows, cost, basis, r, enter);
    }
}

/// Gauss-Jordan pivot at `(r, c)`; keeps the tableau canonical and updates
/// the reduced-cost row in step.
fn pivot<T: LpNum>(rows: &mut [Vec<T>], cost: &mut [T], basis: &mut [usize], r: usize, c: usize) {
    let p = rows[r][c].clone();
    for v in rows[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    rows[r][c] = T::one();
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = std::mem::replace(&mut row[c], T::zero());
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * pv.clone();
        }
        row[c] = T::zero();
    }
    if !cost[c].is_zero() {
        let f = std::mem::replace(&mut cost[c], T::zero());
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * pv.clone();
        }
        cost[c] = T::zero();
    }
    basis[r] = c;
}

/// Reduce `a x = b` to an equivalent system with independent rows; errors
/// when the equations are inconsistent.
pub(crate) fn independent_rows(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut rows: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(r) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, r);
        let pivot_row = rows[rank].clone();
        let p = pivot_row[col].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone() / p.clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    for row in &rows[rank..] {
        if !row[n].is_zero() {
            return Err(Error::invalid(
                "linear system",
                "equations are inconsistent: a zero combination has nonzero right-hand side",
            ));
        }
    }
    let mut out_a = Vec::with_capacity(rank);
    let mut out_b = Vec::with_capacity(rank);
    for mut row in rows.into_iter().take(rank) {
        let rhs = row.pop().unwrap();
        out_a.push(row);
        out_b.push(rhs);
    }
    Ok((out_a, out_b))
}

/// Exact solution of a square system; `None` when the matrix is singular.
pub(crate) fn solve_square(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let r = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, r);
        b.swap(col, r);
        let pr = a[col].clone();
        let pb = b[col].clone();
        let p = pr[col].clone();
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone() / p.clone();
            for (v, pv) in a[i].iter_mut().zip(&pr) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            b[i] = b[i].clone() - f * pb.clone();
        }
    }
    Some(
        (0..n)
            .map(|i| b[i].clone() / a[i][i].clone())
            .collect(),
    )
}
