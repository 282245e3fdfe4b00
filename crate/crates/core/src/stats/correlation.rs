use serde::{Deserialize, Serialize};

use super::dist::f_upper_p;
use crate::error::{Error, Result};

/// Pearson correlation with the equivalent simple-regression F-test
/// (`F(1, n - 2)`, two-sided in `r`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub f: f64,
    pub df_num: f64,
    pub df_den: f64,
    pub p: f64,
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::Stat(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Stat(format!("correlation needs at least 3 pairs, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Stat("correlation undefined for a constant variable".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df_den = nf - 2.0;
    let r2 = r * r;
    let (f, p) = if r2 >= 1.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = r2 * df_den / (1.0 - r2);
        (f, f_upper_p(f, 1.0, df_den))
    };
    Ok(Correlation {
        r,
        f,
        df_num: 1.0,
        df_den,
        p,
    })
}
