#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

/// `√(n/d)` by Newton iteration in exact rational arithmetic, rounded to f64.
pub fn big_sqrt(n: i64, d: i64) -> f64 {
    let x = BigRational::new(BigInt::from(n), BigInt::from(d));
    let two = BigRational::from_integer(BigInt::from(2));
    let start = (n as f64 / d as f64).sqrt();
    let mut y = BigRational::from_float(start).unwrap_or_else(BigRational::one);
    for _ in 0..6 {
        y = (&y + &x / &y) / &two;
        // keep the denominators from exploding
        let scale = BigInt::from(10).pow(60);
        let num = (&y * BigRational::from_integer(scale.clone())).round().to_integer();
        y = BigRational::new(num, scale);
    }
    y.to_f64().expect("finite")
}

/// Central-difference Jacobian with one Richardson step.
pub fn fd_jacobian<const N: usize>(f: impl Fn([f64; N]) -> [f64; N], x: [f64; N], h: f64) -> [[f64; N]; N] {
    let diff = |j: usize, h: f64| {
        let (mut up, mut dn) = (x, x);
        up[j] += h;
        dn[j] -= h;
        let (fu, fd) = (f(up), f(dn));
        let mut col = [0.0; N];
        for i in 0..N {
            col[i] = (fu[i] - fd[i]) / (2.0 * h);
        }
        col
    };
    let mut jac = [[0.0; N]; N];
    for j in 0..N {
        let (c1, c2) = (diff(j, h), diff(j, h / 2.0));
        for i in 0..N {
            jac[i][j] = (4.0 * c2[i] - c1[i]) / 3.0;
        }
    }
    jac
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
