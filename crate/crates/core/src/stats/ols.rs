use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dist::f_upper_p;
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(Intercept)";

/// Relative size of a QR diagonal entry below which a column counts as a
/// linear combination of the columns before it.
const RANK_TOL: f64 = 1e-10;

/// A named design matrix, one column per regressor.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl Design {
    pub fn new(n_rows: usize) -> Self {
        Design {
            names: Vec::new(),
            columns: Vec::new(),
            n_rows,
        }
    }

    /// Design with an intercept column only.
    pub fn intercept_only(n_rows: usize) -> Self {
        Self::new(n_rows).with_intercept()
    }

    pub fn with_intercept(mut self) -> Self {
        self.push(INTERCEPT.to_string(), vec![1.0; self.n_rows]);
        self
    }

    pub fn with_numeric(mut self, name: &str, values: &[f64]) -> Result<Self> {
        self.check_len(name, values.len())?;
        self.push(name.to_string(), values.to_vec());
        Ok(self)
    }

    /// Dummy-codes a categorical variable. Levels are sorted and the first
    /// is the reference level; each other level gets a `name[level]` column.
    pub fn with_categorical<S: AsRef<str>>(mut self, name: &str, values: &[S]) -> Result<Self> {
        self.check_len(name, values.len())?;
        let levels: BTreeSet<&str> = values.iter().map(AsRef::as_ref).collect();
        for level in levels.into_iter().skip(1) {
            let col = values
                .iter()
                .map(|v| if v.as_ref() == level { 1.0 } else { 0.0 })
                .collect();
            self.push(format!("{name}[{level}]"), col);
        }
        Ok(self)
    }

    fn check_len(&self, name: &str, len: usize) -> Result<()> {
        if len != self.n_rows {
            return Err(Error::Stat(format!(
                "column {name:?} has {len} rows, design has {}",
                self.n_rows
            )));
        }
        Ok(())
    }

    fn push(&mut self, name: String, col: Vec<f64>) {
        self.names.push(name);
        self.columns.push(col);
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn has_intercept(&self) -> bool {
        self.names.iter().any(|n| n == INTERCEPT)
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_rows, self.columns.len(), |r, c| self.columns[c][r])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
}

/// A fitted least-squares model.
///
/// `f_vs_reduced`, `df_num`, `df_den` and `p` compare the fit against the
/// intercept-only model (the overall regression F-test). Use [`nested_f`]
/// for any other reduced model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_vs_reduced: f64,
    pub df_num: f64,
    pub df_den: f64,
    pub p: f64,
    pub n: usize,
    pub rss: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    #[serde(skip)]
    y: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|c| c.name == name).map(|c| c.estimate)
    }

    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }

    pub fn df_resid(&self) -> usize {
        self.n - self.n_params()
    }

    fn names(&self) -> impl Iterator<Item = &str> {
        self.coefficients.iter().map(|c| c.name.as_str())
    }
}

/// Ordinary least squares via Householder QR.
///
/// Rank deficiency is reported with the name of each column that lies in
/// the span of the columns before it.
pub fn ols_fit(y: &[f64], design: &Design) -> Result<RegressionResult> {
    let n = y.len();
    let p = design.n_cols();
    if n != design.n_rows() {
        return Err(Error::Stat(format!(
            "response has {n} rows, design has {}",
            design.n_rows()
        )));
    }
    if p == 0 {
        return Err(Error::Stat("design has no columns".into()));
    }
    if n < p + 1 {
        return Err(Error::Stat(format!(
            "{n} rows cannot fit {p} parameters (need at least {})",
            p + 1
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Stat("response contains non-finite values".into()));
    }

    let x = design.matrix();
    let qr = x.clone().qr();
    let r = qr.r();
    let collinear: Vec<&str> = (0..p)
        .filter(|&j| {
            let norm = x.column(j).norm();
            norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm
        })
        .map(|j| design.names()[j].as_str())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::Stat(format!(
            "design is rank deficient; collinear columns: {}",
            collinear.join(", ")
        )));
    }

    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Stat("singular triangular system".into()))?;
    let fitted = &x * &beta;
    let residuals: Vec<f64> = (&yv - fitted).iter().copied().collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();

    let intercept = design.has_intercept();
    let tss: f64 = if intercept {
        let m = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - m) * (v - m)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let (nf, pf) = (n as f64, p as f64);
    let r2 = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let adj_r2 = if intercept {
        1.0 - (1.0 - r2) * (nf - 1.0) / (nf - pf)
    } else {
        1.0 - (1.0 - r2) * nf / (nf - pf)
    };

    let df_num = if intercept { pf - 1.0 } else { pf };
    let df_den = nf - pf;
    let model_ss = (tss - rss).max(0.0);
    let (f, pval) = f_test(model_ss, df_num, rss, df_den);

    Ok(RegressionResult {
        coefficients: design
            .names()
            .iter()
            .zip(beta.iter())
            .map(|(name, &estimate)| Coefficient {
                name: name.clone(),
                estimate,
            })
            .collect(),
        r2,
        adj_r2,
        f_vs_reduced: f,
        df_num,
        df_den,
        p: pval,
        n,
        rss,
        residuals,
        y: y.to_vec(),
    })
}

/// F statistic and upper-tail p for an extra sum of squares.
fn f_test(extra_ss: f64, df_num: f64, rss: f64, df_den: f64) -> (f64, f64) {
    if df_num == 0.0 || extra_ss <= 0.0 {
        return (0.0, 1.0);
    }
    if rss <= 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let f = (extra_ss / df_num) / (rss / df_den);
    (f, f_upper_p(f, df_num, df_den))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedFTest {
    pub f: f64,
    pub df_num: f64,
    pub df_den: f64,
    pub p: f64,
}

/// Extra-sum-of-squares F-test of `full` against a `reduced` model whose
/// regressors are a subset of the full model's, fitted to the same response.
pub fn nested_f(full: &RegressionResult, reduced: &RegressionResult) -> Result<NestedFTest> {
    if full.y != reduced.y {
        return Err(Error::Stat("models were fitted to different responses".into()));
    }
    let full_names: BTreeSet<&str> = full.names().collect();
    let missing: Vec<&str> = reduced.names().filter(|n| !full_names.contains(n)).collect();
    if !missing.is_empty() {
        return Err(Error::Stat(format!(
            "models are not nested; reduced-only terms: {}",
            missing.join(", ")
        )));
    }
    let df_num = (full.n_params() - reduced.n_params()) as f64;
    let df_den = full.df_resid() as f64;
    let extra = (reduced.rss - full.rss).max(0.0);
    let (f, p) = f_test(extra, df_num, full.rss, df_den);
    Ok(NestedFTest { f, df_num, df_den, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_line() {
        let x: Vec<f64> = (0..8).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let d = Design::intercept_only(8).with_numeric("x", &x).unwrap();
        let fit = ols_fit(&y, &d).unwrap();
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!((fit.coefficient("x").unwrap() - 3.0).abs() < 1e-12);
        assert!((fit.coefficient(INTERCEPT).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(fit.p, 0.0);
    }

    #[test]
    fn orthogonal_response() {
        let x = [-1.0, 1.0, -1.0, 1.0];
        let y = [1.0, 1.0, 2.0, 2.0];
        let d = Design::intercept_only(4).with_numeric("x", &x).unwrap();
        let fit = ols_fit(&y, &d).unwrap();
        assert!(fit.coefficient("x").unwrap().abs() < 1e-12);
        assert!(fit.r2.abs() < 1e-12);
    }

    #[test]
    fn categorical_drops_first_sorted_level() {
        let g = ["fus", "agg", "fus", "agg", "iso"];
        let d = Design::intercept_only(5).with_categorical("type", &g).unwrap();
        assert_eq!(d.names(), &[INTERCEPT, "type[fus]", "type[iso]"]);
    }

    #[test]
    fn rank_deficiency_names_the_column() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let d = Design::intercept_only(5)
            .with_numeric("a", &a)
            .unwrap()
            .with_numeric("b", &b)
            .unwrap();
        match ols_fit(&[1.0, 3.0, 2.0, 5.0, 4.0], &d) {
            Err(Error::Stat(msg)) => assert!(msg.contains("b") && !msg.contains("a,"), "{msg}"),
            other => panic!("expected rank error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let d = Design::intercept_only(2).with_numeric("x", &[1.0, 2.0]).unwrap();
        assert!(ols_fit(&[1.0, 2.0], &d).is_err());
    }

    #[test]
    fn nested_same_model() {
        let x = [1.0, 2.0, 3.0, 4.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0];
        let d = Design::intercept_only(5).with_numeric("x", &x).unwrap();
        let fit = ols_fit(&y, &d).unwrap();
        let t = nested_f(&fit, &fit).unwrap();
        assert_eq!((t.f, t.p), (0.0, 1.0));
    }

    #[test]
    fn nested_exact_fit_gives_infinite_f() {
        let x = [1.0, 2.0, 3.0, 4.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0];
        let reduced = ols_fit(&y, &Design::intercept_only(5).with_numeric("x", &x).unwrap()).unwrap();
        let full = ols_fit(
            &y,
            &Design::intercept_only(5)
                .with_numeric("x", &x)
                .unwrap()
                .with_numeric("y", &y)
                .unwrap(),
        )
        .unwrap();
        let t = nested_f(&full, &reduced).unwrap();
        assert!(t.f.is_infinite() || t.f > 1e15);
        assert!(t.p < 1e-15);
    }

    #[test]
    fn non_nested_models_are_rejected() {
        let x = [1.0, 2.0, 3.0, 4.0, 6.0];
        let z = [0.0, 1.0, 0.0, 1.0, 1.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0];
        let a = ols_fit(&y, &Design::intercept_only(5).with_numeric("x", &x).unwrap()).unwrap();
        let b = ols_fit(&y, &Design::intercept_only(5).with_numeric("z", &z).unwrap()).unwrap();
        assert!(matches!(nested_f(&a, &b), Err(Error::Stat(_))));
        let other = ols_fit(&[1.0, 1.0, 4.0, 3.0, 7.0], &Design::intercept_only(5)).unwrap();
        assert!(nested_f(&a, &other).is_err());
    }
}
