//! Distribution tails used by the tests in this module.

use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

/// Two-sided p-value of a Student-t statistic.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Upper-tail p-value of an F statistic.
pub fn f_upper_p(f: f64, df_num: f64, df_den: f64) -> f64 {
    if f.is_nan() {
        return f64::NAN;
    }
    if f.is_infinite() {
        return 0.0;
    }
    if f <= 0.0 {
        return 1.0;
    }
    let dist = FisherSnedecor::new(df_num, df_den).expect("df > 0");
    dist.sf(f).clamp(0.0, 1.0)
}

/// Student-t quantile.
pub fn t_quantile(prob: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).expect("df > 0").inverse_cdf(prob)
}

/// F quantile.
pub fn f_quantile(prob: f64, df_num: f64, df_den: f64) -> f64 {
    FisherSnedecor::new(df_num, df_den).expect("df > 0").inverse_cdf(prob)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Critical values from printed t and F tables.
    #[test]
    fn quantiles_match_published_tables() {
        assert!((t_quantile(0.975, 10.0) - 2.228).abs() <= 0.001);
        assert!((t_quantile(0.975, 30.0) - 2.042).abs() <= 0.001);
        assert!((t_quantile(0.995, 5.0) - 4.032).abs() <= 0.001);
        assert!((f_quantile(0.95, 3.0, 45.0) - 2.81).abs() <= 0.01);
        assert!((f_quantile(0.95, 1.0, 10.0) - 4.96).abs() <= 0.01);
    }

    #[test]
    fn tails_are_consistent_with_quantiles() {
        assert!((t_two_sided_p(2.228_138_851_964_938_5, 10.0) - 0.05).abs() < 1e-10);
        assert!((f_upper_p(2.811_543_506_332_673, 3.0, 45.0) - 0.05).abs() < 1e-10);
        assert_eq!(t_two_sided_p(0.0, 7.0), 1.0);
        assert_eq!(f_upper_p(f64::INFINITY, 1.0, 3.0), 0.0);
    }
}
