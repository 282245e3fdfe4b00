//! Statistical tests for comparing language groups.
//!
//! * [`welch_t`]: two-sample t-test with Welch–Satterthwaite degrees of
//!   freedom ([`student_t`] gives the pooled-variance form).
//! * [`ols_fit`]: least squares with categorical dummy coding, plus
//!   [`nested_f`] to compare a full model against a reduced one.
//! * [`pearson_r`]: correlation with its `F(1, n - 2)` test.
//!
//! Grouping factors that a mixed-effects analysis would treat as random
//! intercepts enter these models as fixed-effect dummies.

mod correlation;
pub mod dist;
mod ols;
mod table;
mod ttest;

pub use correlation::{pearson_r, Correlation};
pub use ols::{nested_f, ols_fit, Coefficient, Design, NestedFTest, RegressionResult, INTERCEPT};
pub use table::{DataTable, Formula, GroupTest};
pub use ttest::{student_t, welch_t, TTestResult};
