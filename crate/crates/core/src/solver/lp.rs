//! Exact feasibility of "some belief makes the candidate a best reply".
//!
//! Given `gain[a][r]` = candidate payoff minus alternative `a`'s payoff
//! against rival `r`, find a distribution `mu` over rivals with
//! `sum_r mu[r] * gain[a][r] >= 0` for every `a`. By LP duality this fails
//! exactly when some mixture of alternatives beats the candidate against every
//! rival.
//!
//! Phase-one simplex over `BigRational` with Bland's rule; no tolerances.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Returns a belief over the columns of `gain` (same length as a row), or
/// `None` when none exists. `columns` must be positive.
pub fn belief_witness(gain: &[Vec<Q>], columns: usize) -> Option<Vec<Q>> {
    assert!(columns > 0, "belief needs at least one rival");
    debug_assert!(gain.iter().all(|r| r.len() == columns));

    let point = |c: usize| {
        let mut mu = vec![Q::zero(); columns];
        mu[c] = Q::one();
        mu
    };

    // Rows the candidate never loses on impose nothing.
    let rows: Vec<&Vec<Q>> = gain
        .iter()
        .filter(|row| row.iter().any(|g| g.is_negative()))
        .collect();
    if rows.is_empty() {
        return Some(point(0));
    }
    // An alternative that beats the candidate everywhere rules out all beliefs.
    if rows.iter().any(|row| row.iter().all(|g| g.is_negative())) {
        return None;
    }
    // A pure belief suffices whenever one rival column has no loss.
    if let Some(c) = (0..columns).find(|&c| rows.iter().all(|row| !row[c].is_negative())) {
        return Some(point(c));
    }

    // Deduplicate columns; keep the first index of each distinct column.
    let mut keep: Vec<usize> = Vec::new();
    for c in 0..columns {
        let dup = keep
            .iter()
            .any(|&k| rows.iter().all(|row| row[k] == row[c]));
        if !dup {
            keep.push(c);
        }
    }
    let mut uniq_rows: Vec<Vec<Q>> = Vec::new();
    for row in rows {
        let r: Vec<Q> = keep.iter().map(|&c| row[c].clone()).collect();
        if !uniq_rows.contains(&r) {
            uniq_rows.push(r);
        }
    }

    let mu = phase_one(&uniq_rows, keep.len())?;
    let mut out = vec![Q::zero(); columns];
    for (k, v) in keep.into_iter().zip(mu) {
        out[k] = v;
    }
    Some(out)
}

/// Simplex on
///   -gain * mu + s = 0,  sum(mu) + art = 1,  mu, s, art >= 0,
/// maximizing -art. Feasible iff the optimum is zero.
fn phase_one(gain: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let m = gain.len();
    let width = n + m + 1;
    let art = n + m;

    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    let mut rhs: Vec<Q> = Vec::with_capacity(m + 1);
    for (a, g) in gain.iter().enumerate() {
        let mut row = vec![Q::zero(); width];
        for (r, v) in g.iter().enumerate() {
            row[r] = -v.clone();
        }
        row[n + a] = Q::one();
        rows.push(row);
        rhs.push(Q::zero());
    }
    let mut total = vec![Q::zero(); width];
    for v in total.iter_mut().take(n) {
        *v = Q::one();
    }
    total[art] = Q::one();
    rows.push(total);
    rhs.push(Q::one());

    let mut basis: Vec<usize> = (n..n + m).chain(std::iter::once(art)).collect();
    // Objective = value + sum(cost[j] * x[j]) over non-basic j.
    let mut cost = vec![Q::zero(); width];
    for c in cost.iter_mut().take(n) {
        *c = Q::one();
    }
    let mut value = -Q::one();

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_positive()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..rows.len() {
            let coef = &rows[i][enter];
            if !coef.is_positive() {
                continue;
            }
            let ratio = &rhs[i] / coef;
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // The objective is bounded above by zero, so a leaving row exists.
        let (pivot_row, _) = leave.expect("phase-one objective is bounded");

        let p = rows[pivot_row][enter].clone();
        for v in rows[pivot_row].iter_mut() {
            *v /= &p;
        }
        rhs[pivot_row] /= &p;
        let prow = rows[pivot_row].clone();
        let prhs = rhs[pivot_row].clone();
        for i in 0..rows.len() {
            if i == pivot_row || rows[i][enter].is_zero() {
                continue;
            }
            let f = rows[i][enter].clone();
            for (v, pv) in rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            rhs[i] -= &f * &prhs;
        }
        let f = cost[enter].clone();
        value += &f * &prhs;
        for (c, pv) in cost.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *c -= &f * pv;
            }
        }
        basis[pivot_row] = enter;
    }

    if !value.is_zero() {
        return None;
    }
    let mut mu = vec![Q::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            mu[b] = rhs[i].clone();
        }
    }
    Some(mu)
}
