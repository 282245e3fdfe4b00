use serde::{Deserialize, Serialize};

use super::dist::t_two_sided_p;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p: f64,
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the `n - 1` denominator.
pub(crate) fn variance(x: &[f64], m: f64) -> f64 {
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

fn check_sizes(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Stat(format!(
            "t-test needs at least 2 observations per group (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Stat("t-test input contains non-finite values".into()));
    }
    Ok(())
}

/// Degenerate case: both groups constant. Equal means give t = 0, p = 1;
/// different means give an infinite statistic with p = 0.
fn constant_groups(mean_a: f64, mean_b: f64, n_a: usize, n_b: usize) -> TTestResult {
    let diff = mean_a - mean_b;
    let (t, p) = if diff == 0.0 {
        (0.0, 1.0)
    } else {
        (diff.signum() * f64::INFINITY, 0.0)
    };
    TTestResult {
        mean_a,
        mean_b,
        n_a,
        n_b,
        t,
        df: (n_a + n_b - 2) as f64,
        p,
    }
}

/// Welch's unequal-variance two-sample t-test with Welch–Satterthwaite
/// degrees of freedom.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    check_sizes(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a, ma) / na, variance(b, mb) / nb);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Ok(constant_groups(ma, mb, a.len(), b.len()));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTestResult {
        mean_a: ma,
        mean_b: mb,
        n_a: a.len(),
        n_b: b.len(),
        t,
        df,
        p: t_two_sided_p(t, df),
    })
}

/// Pooled-variance (Student) two-sample t-test.
pub fn student_t(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    check_sizes(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * variance(a, ma) + (nb - 1.0) * variance(b, mb)) / df;
    if pooled == 0.0 {
        return Ok(constant_groups(ma, mb, a.len(), b.len()));
    }
    let t = (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(TTestResult {
        mean_a: ma,
        mean_b: mb,
        n_a: a.len(),
        n_b: b.len(),
        t,
        df,
        p: t_two_sided_p(t, df),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups() {
        let a = [0.3, 0.5, 0.9];
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn constant_groups_follow_convention() {
        let r = welch_t(&[1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        let r = welch_t(&[2.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_eq!((r.t, r.p), (f64::INFINITY, 0.0));
    }

    #[test]
    fn undersized_group_is_an_error() {
        assert!(matches!(welch_t(&[1.0], &[1.0, 2.0]), Err(Error::Stat(_))));
        assert!(matches!(student_t(&[1.0, 2.0], &[]), Err(Error::Stat(_))));
    }

    #[test]
    fn pooled_matches_welch_for_balanced_equal_variance() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [3.0, 4.0, 5.0, 6.0];
        let w = welch_t(&a, &b).unwrap();
        let s = student_t(&a, &b).unwrap();
        assert!((w.t - s.t).abs() < 1e-12);
        assert!((w.df - 6.0).abs() < 1e-12);
    }
}
