use serde::Serialize;

use super::compare::FOCUS_MOVE;
use super::AnalysisError;
use crate::session::{ExportRow, Group};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProportionTest {
    pub successes: [u64; 2],
    pub trials: [u64; 2],
    pub z: f64,
    pub p_value: f64,
}

/// Two-sided pooled two-proportion z-test. Identical or degenerate pooled
/// proportions (all successes or none) give `z = 0`, `p = 1`.
pub fn two_proportion_test(s1: u64, n1: u64, s2: u64, n2: u64) -> Result<ProportionTest, AnalysisError> {
    if n1 == 0 || n2 == 0 {
        return Err(AnalysisError::Degenerate(format!("sample sizes {n1} and {n2}")));
    }
    if s1 > n1 || s2 > n2 {
        return Err(AnalysisError::Degenerate(format!("{s1}/{n1} or {s2}/{n2} exceeds its sample")));
    }
    let (p1, p2) = (s1 as f64 / n1 as f64, s2 as f64 / n2 as f64);
    let pooled = (s1 + s2) as f64 / (n1 + n2) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64);
    let z = if var > 0.0 { (p1 - p2) / var.sqrt() } else { 0.0 };
    let p_value = libm::erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(ProportionTest {
        successes: [s1, s2],
        trials: [n1, n2],
        z,
        p_value,
    })
}

/// Compares how often groups A and B played d at the first node, over all
/// trials where it was reached.
pub fn group_test(rows: &[ExportRow]) -> Result<ProportionTest, AnalysisError> {
    let mut s = [0u64; 2];
    let mut n = [0u64; 2];
    for r in rows {
        let Some(first) = &r.first_choice else { continue };
        let i = match r.group {
            Group::A => 0,
            Group::B => 1,
        };
        n[i] += 1;
        if first == FOCUS_MOVE {
            s[i] += 1;
        }
    }
    two_proportion_test(s[0], n[0], s[1], n[1])
}
