//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Lossless widening used at serialization boundaries.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Ordinary least squares for `y ≈ X β` with a small number of columns.
///
/// Returns `None` when the normal matrix is numerically singular.
pub fn least_squares<T: Real>(rows: &[Vec<T>], y: &[T]) -> Option<Vec<T>> {
    let p = rows.first()?.len();
    if rows.len() < p || p == 0 {
        return None;
    }
    // column scaling keeps the normal equations well conditioned
    let mut scale = vec![T::zero(); p];
    for row in rows {
        for (j, v) in row.iter().enumerate() {
            scale[j] = scale[j].max(v.abs());
        }
    }
    if scale.iter().any(|s| *s == T::zero()) {
        return None;
    }
    let mut ata = vec![vec![T::zero(); p]; p];
    let mut aty = vec![T::zero(); p];
    for (row, yi) in rows.iter().zip(y) {
        for i in 0..p {
            let ri = row[i] / scale[i];
            aty[i] = aty[i] + ri * *yi;
            for j in 0..p {
                ata[i][j] = ata[i][j] + ri * row[j] / scale[j];
            }
        }
    }
    let beta = solve_dense(ata, aty)?;
    Some(beta.iter().zip(&scale).map(|(b, s)| *b / *s).collect())
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense<T: Real>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let n = rhs.len();
    let norm = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tiny = norm * T::epsilon() * from_usize::<T>(n) * lit(16.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv][col].abs() <= tiny {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] = m[row][k] - f * m[col][k];
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for k in i + 1..n {
            acc = acc - m[i][k] * x[k];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Option<(T, T)> {
    let rows: Vec<Vec<T>> = x.iter().map(|&xi| vec![xi, T::one()]).collect();
    least_squares(&rows, y).map(|b| (b[0], b[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_through_exact_points() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let (m, b) = linear_fit(&x, &y).unwrap();
        assert!((m - 3.0).abs() < 1e-13 && (b + 2.0).abs() < 1e-13);
    }

    #[test]
    fn three_column_regression() {
        let xs: Vec<f64> = (1..40).map(|i| i as f64 * 0.5).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x.ln(), 1.0]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 0.25 - 1.5 * x + 0.125 * x.ln()).collect();
        let b = least_squares(&rows, &y).unwrap();
        assert!((b[0] + 1.5).abs() < 1e-10);
        assert!((b[1] - 0.125).abs() < 1e-10);
        assert!((b[2] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn singular_system_is_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        assert!(least_squares(&rows, &[1.0, 2.0, 3.0]).is_none());
    }
}
