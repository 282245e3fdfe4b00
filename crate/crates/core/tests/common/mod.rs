#![allow(dead_code)]

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Least-squares coefficients from the normal equations `X'X b = X'y`.
pub fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let xtx = cols.iter().map(|a| cols.iter().map(|b| dot(a, b)).collect()).collect();
    let xty = cols.iter().map(|c| dot(c, y)).collect();
    solve(xtx, xty)
}

/// Kolmogorov-Smirnov distance between a sample and Uniform(0, 1).
pub fn ks_uniform(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &u)| ((i as f64 + 1.0) / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Reference per-language MorphScores with morphological type.
pub const MORPHSCORES: [(&str, f64, &str); 22] = [
    ("hye_armn", 0.634, "agg"),
    ("eus_latn", 0.724, "agg"),
    ("bul_cyrl", 0.584, "fus"),
    ("ceb_latn", 0.806, "agg"),
    ("eng_latn", 0.781, "fus"),
    ("kat_geor", 0.660, "agg"),
    ("ell_grek", 0.586, "fus"),
    ("guj_gujr", 0.347, "fus"),
    ("hun_latn", 0.739, "agg"),
    ("isl_latn", 0.574, "fus"),
    ("ind_latn", 0.708, "agg"),
    ("gle_latn", 0.468, "fus"),
    ("jpn_jpan", 0.691, "agg"),
    ("kor_hang", 0.692, "agg"),
    ("kmr_latn", 0.202, "fus"),
    ("pes_arab", 0.345, "fus"),
    ("slv_latn", 0.650, "fus"),
    ("spa_latn", 0.592, "fus"),
    ("tam_taml", 0.435, "agg"),
    ("tur_latn", 0.591, "agg"),
    ("urd_arab", 0.747, "fus"),
    ("zul_latn", 0.541, "agg"),
];
