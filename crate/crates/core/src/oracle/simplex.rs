//! Dense two-phase simplex over exact rationals.
//!
//! Small and slow by design: the fractional chromatic programs it solves
//! have tens of rows and at most a few hundred columns. Bland's rule keeps
//! it from cycling, and exact arithmetic means no tolerances anywhere.

use num::{One, Signed, Zero};

use super::{Meter, OracleError};
use crate::Rational;

/// minimize (or maximize) c.x  subject to  A x >= b (ge) or A x <= b, x >= 0.
pub(crate) struct LpProblem {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub ge: bool,
    pub maximize: bool,
}

#[derive(Debug)]
pub(crate) enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// Tableau layout: n structural columns, m slack columns, then artificial
/// columns as needed, rhs last. One row per constraint.
pub(crate) fn solve(p: &LpProblem, meter: &mut Meter) -> Result<LpOutcome, OracleError> {
    let m = p.a.len();
    let n = p.c.len();
    debug_assert!(p.a.iter().all(|row| row.len() == n));
    debug_assert_eq!(p.b.len(), m);

    // Internally always minimize.
    let cost: Vec<Rational> = if p.maximize {
        p.c.iter().map(|v| -v.clone()).collect()
    } else {
        p.c.clone()
    };

    let slack_sign = if p.ge { -Rational::one() } else { Rational::one() };
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = Vec::with_capacity(n + m);
        row.extend(p.a[i].iter().cloned());
        for j in 0..m {
            row.push(if j == i {
                slack_sign.clone()
            } else {
                Rational::zero()
            });
        }
        let mut b_i = p.b[i].clone();
        if b_i.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b_i = -b_i;
        }
        rows.push(row);
        rhs.push(b_i);
    }

    // A slack column with coefficient +1 can serve as the basis; otherwise
    // the row needs an artificial variable.
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut art_cols: Vec<usize> = Vec::new();
    for i in 0..m {
        if rows[i][n + i].is_one() {
            basis.push(n + i);
        } else {
            let col = n + m + art_cols.len();
            art_cols.push(col);
            basis.push(col);
        }
    }
    let width = n + m + art_cols.len();
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(width, Rational::zero());
        let b = basis[i];
        if b >= n + m {
            row[b] = Rational::one();
        }
    }

    if !art_cols.is_empty() {
        // Phase 1: minimize the sum of artificials. Its reduced-cost row is
        // the negated sum of rows with artificial basis entries.
        let mut obj = vec![Rational::zero(); width];
        let mut obj_rhs = Rational::zero();
        for i in 0..m {
            if basis[i] >= n + m {
                for j in 0..width {
                    obj[j] -= rows[i][j].clone();
                }
                obj_rhs -= rhs[i].clone();
            }
        }
        for &a in &art_cols {
            obj[a] = Rational::zero();
        }
        run_simplex(&mut rows, &mut rhs, &mut basis, &mut obj, &mut obj_rhs, width, meter)?;
        if !obj_rhs.is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot any artificial still in the basis out on a structural or
        // slack column; an all-zero row is redundant and can stay put.
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| !rows[i][j].is_zero()) {
                    pivot(&mut rows, &mut rhs, &mut basis, i, j, width);
                }
            }
        }
    }

    // Phase 2 objective: reduced costs of `cost` under the current basis.
    let mut obj = vec![Rational::zero(); width];
    obj[..n].clone_from_slice(&cost);
    let mut obj_rhs = Rational::zero();
    for i in 0..m {
        let b = basis[i];
        if b >= n + m {
            continue; // artificial stuck at zero in a redundant row
        }
        let coef = obj[b].clone();
        if coef.is_zero() {
            continue;
        }
        for j in 0..width {
            let adj = coef.clone() * rows[i][j].clone();
            obj[j] -= adj;
        }
        obj_rhs -= coef * rhs[i].clone();
    }
    // Never re-enter artificial columns.
    let barrier = n + m;
    for &a in &art_cols {
        debug_assert!(a >= barrier);
    }

    let unbounded = run_simplex_phase2(
        &mut rows, &mut rhs, &mut basis, &mut obj, &mut obj_rhs, barrier, meter,
    )?;
    if unbounded {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![Rational::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = rhs[i].clone();
        }
    }
    let mut value = -obj_rhs;
    if p.maximize {
        value = -value;
    }
    Ok(LpOutcome::Optimal { value, x })
}

fn pivot(
    rows: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    r: usize,
    c: usize,
    width: usize,
) {
    let piv = rows[r][c].clone();
    for j in 0..width {
        rows[r][j] /= piv.clone();
    }
    rhs[r] /= piv;
    for i in 0..rows.len() {
        if i == r || rows[i][c].is_zero() {
            continue;
        }
        let f = rows[i][c].clone();
        for j in 0..width {
            let adj = f.clone() * rows[r][j].clone();
            rows[i][j] -= adj;
        }
        let adj = f * rhs[r].clone();
        rhs[i] -= adj;
    }
    basis[r] = c;
}

fn eliminate_obj(
    obj: &mut [Rational],
    obj_rhs: &mut Rational,
    rows: &[Vec<Rational>],
    rhs: &[Rational],
    r: usize,
    c: usize,
    width: usize,
) {
    let f = obj[c].clone();
    if f.is_zero() {
        return;
    }
    for j in 0..width {
        let adj = f.clone() * rows[r][j].clone();
        obj[j] -= adj;
    }
    *obj_rhs -= f * rhs[r].clone();
}

/// Bland's rule: entering column is the lowest-index negative reduced cost,
/// leaving row the ratio-test minimum with the lowest basis index.
fn run_simplex(
    rows: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    obj: &mut [Rational],
    obj_rhs: &mut Rational,
    enter_limit: usize,
    meter: &mut Meter,
) -> Result<bool, OracleError> {
    let width = obj.len();
    loop {
        meter.tick()?;
        let Some(c) = (0..enter_limit).find(|&j| obj[j].is_negative()) else {
            return Ok(false);
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows.len() {
            if rows[i][c].is_positive() {
                let ratio = rhs[i].clone() / rows[i][c].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Ok(true); // unbounded
        };
        pivot(rows, rhs, basis, r, c, width);
        eliminate_obj(obj, obj_rhs, rows, rhs, r, c, width);
    }
}

fn run_simplex_phase2(
    rows: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    obj: &mut [Rational],
    obj_rhs: &mut Rational,
    enter_limit: usize,
    meter: &mut Meter,
) -> Result<bool, OracleError> {
    run_simplex(rows, rhs, basis, obj, obj_rhs, enter_limit, meter)
}
