mod common;

use morphalign::stats::{nested_f, ols_fit, pearson_r, student_t, welch_t, Design, INTERCEPT};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use common::{ks_uniform, normal_equations};

fn fixture() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
    let x2 = vec![2.5, 0.5, 3.0, 1.0, 4.5, 2.0, 0.0, 3.5, 1.5, 5.0];
    let y = vec![3.1, 3.9, 6.8, 6.1, 10.2, 9.0, 8.7, 13.1, 11.8, 16.4];
    (x1, x2, y)
}

#[test]
fn ols_matches_normal_equations() {
    let (x1, x2, y) = fixture();
    let design = Design::intercept_only(10)
        .with_numeric("x1", &x1)
        .unwrap()
        .with_numeric("x2", &x2)
        .unwrap();
    let fit = ols_fit(&y, &design).unwrap();

    let beta = normal_equations(&[vec![1.0; 10], x1.clone(), x2.clone()], &y);

    for (name, b) in [INTERCEPT, "x1", "x2"].iter().zip(&beta) {
        assert!((fit.coefficient(name).unwrap() - b).abs() < 1e-9, "{name}");
    }
    let fitted: Vec<f64> = (0..10).map(|i| beta[0] + beta[1] * x1[i] + beta[2] * x2[i]).collect();
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let mean = y.iter().sum::<f64>() / 10.0;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    assert!((fit.rss - rss).abs() < 1e-9);
    assert!((fit.r2 - (1.0 - rss / tss)).abs() < 1e-12);
    assert!((fit.adj_r2 - (1.0 - (rss / 7.0) / (tss / 9.0))).abs() < 1e-12);
    let f = ((tss - rss) / 2.0) / (rss / 7.0);
    assert!((fit.f_vs_reduced - f).abs() < 1e-9 * f);
}

#[test]
fn residuals_are_orthogonal_to_every_column() {
    let (x1, x2, y) = fixture();
    let groups = ["a", "b", "c", "a", "b", "c", "a", "b", "c", "a"];
    let design = Design::intercept_only(10)
        .with_numeric("x1", &x1)
        .unwrap()
        .with_numeric("x2", &x2)
        .unwrap()
        .with_categorical("g", &groups)
        .unwrap();
    let fit = ols_fit(&y, &design).unwrap();
    for name in design.names() {
        let col = design.column(name).unwrap();
        let dot: f64 = col.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-9, "{name}: {dot}");
    }
}

#[test]
fn group_dummy_f_equals_pooled_t_squared() {
    let a = [4.1, 5.0, 5.9, 4.6, 5.4, 6.2];
    let b = [3.2, 4.4, 3.9, 2.8, 4.0, 3.5];
    let y: Vec<f64> = a.iter().chain(&b).copied().collect();
    let labels: Vec<&str> = (0..12).map(|i| if i < 6 { "a" } else { "b" }).collect();
    let full = ols_fit(&y, &Design::intercept_only(12).with_categorical("g", &labels).unwrap()).unwrap();
    let reduced = ols_fit(&y, &Design::intercept_only(12)).unwrap();
    let test = nested_f(&full, &reduced).unwrap();
    let t = student_t(&a, &b).unwrap();
    assert!((test.f - t.t * t.t).abs() < 1e-9);
    assert_eq!((test.df_num, test.df_den), (1.0, 10.0));
    assert!((test.p - t.p).abs() < 1e-12);
}

#[test]
fn pearson_matches_covariance_oracle() {
    let (x, _, y) = fixture();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
    let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let r = cov / (sx * sy);
    let c = pearson_r(&x, &y).unwrap();
    assert!((c.r - r).abs() < 1e-12);
    assert!((c.f - r * r * (n - 2.0) / (1.0 - r * r)).abs() < 1e-9);
    assert_eq!((c.df_num, c.df_den), (1.0, n - 2.0));
    let slope_only = ols_fit(&y, &Design::intercept_only(10).with_numeric("x", &x).unwrap()).unwrap();
    assert!((slope_only.f_vs_reduced - c.f).abs() < 1e-9 * c.f);
}

#[test]
fn welch_frozen_values_and_invariances() {
    let a = [1.0, 2.0, 3.0, 4.0];
    let b = [2.0, 4.0, 6.0, 8.0];
    let r = welch_t(&a, &b).unwrap();
    // scipy.stats.ttest_ind(a, b, equal_var=False)
    assert!((r.t - -1.7320508075688774).abs() < 1e-12);
    assert!((r.df - 4.411764705882353).abs() < 1e-12);
    assert!((r.p - 0.15158050484530383).abs() < 1e-9);

    let swapped = welch_t(&b, &a).unwrap();
    assert_eq!(swapped.t, -r.t);
    assert_eq!((swapped.df, swapped.p), (r.df, r.p));

    let shift = |v: &[f64], c: f64| v.iter().map(|x| x + c).collect::<Vec<_>>();
    let scale = |v: &[f64], c: f64| v.iter().map(|x| x * c).collect::<Vec<_>>();
    let shifted = welch_t(&shift(&a, 100.0), &shift(&b, 100.0)).unwrap();
    assert!((shifted.t - r.t).abs() < 1e-9);
    let scaled = welch_t(&scale(&a, 0.01), &scale(&b, 0.01)).unwrap();
    assert!((scaled.t - r.t).abs() < 1e-9);
    assert!((scaled.df - r.df).abs() < 1e-9);

    let r = welch_t(&[0.9, 0.8], &[0.1, 0.2]).unwrap();
    assert!((r.t - 9.899494936611667).abs() < 1e-9);
    assert!((r.df - 2.0).abs() < 1e-12);
    assert!((r.p - 0.010050506338833462).abs() < 1e-9);
}

#[test]
fn nested_f_p_values_are_uniform_under_the_null() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 30;
    let fits = 1000;
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let mut pvals = Vec::with_capacity(fits);
    for _ in 0..fits {
        let x1 = draw(n);
        let x2 = draw(n);
        let x3 = draw(n);
        let y: Vec<f64> = x1.iter().zip(draw(n)).map(|(a, e)| 0.5 * a + e).collect();
        let reduced_d = Design::intercept_only(n).with_numeric("x1", &x1).unwrap();
        let full_d = reduced_d
            .clone()
            .with_numeric("x2", &x2)
            .unwrap()
            .with_numeric("x3", &x3)
            .unwrap();
        let full = ols_fit(&y, &full_d).unwrap();
        let reduced = ols_fit(&y, &reduced_d).unwrap();
        pvals.push(nested_f(&full, &reduced).unwrap().p);
    }
    let d = ks_uniform(pvals);
    // Asymptotic critical value at the 0.01 level.
    let critical = 1.628 / (fits as f64).sqrt();
    assert!(d < critical, "KS distance {d} >= {critical}");
}
