//! Truncated power series in `z = s²` used for the small-`s` branch of the
//! surface potentials, where the closed forms cancel catastrophically.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{from_usize, Real};

/// Number of retained coefficients.
pub const TERMS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZSeries<T>(pub [T; TERMS]);

impl<T: Real> ZSeries<T> {
    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [T::zero(); TERMS];
        b[0] = T::one() / a[0];
        for n in 1..TERMS {
            let mut acc = T::zero();
            for k in 1..=n {
                acc = acc + a[k] * b[n - k];
            }
            b[n] = -acc * b[0];
        }
        ZSeries(b)
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: T) -> T {
        self.0.iter().rev().fold(T::zero(), |acc, c| acc * z + *c)
    }
}

impl<T: Real> Add for ZSeries<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = *o + r;
        }
        ZSeries(out)
    }
}

impl<T: Real> Sub for ZSeries<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for ZSeries<T> {
    type Output = Self;
    fn neg(self) -> Self {
        ZSeries(self.0.map(|v| -v))
    }
}

impl<T: Real> Mul for ZSeries<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [T::zero(); TERMS];
        for i in 0..TERMS {
            for j in 0..TERMS - i {
                out[i + j] = out[i + j] + self.0[i] * rhs.0[j];
            }
        }
        ZSeries(out)
    }
}

/// Small-`s` expansions of the surface functions, all in `z = s²`:
/// `Γ = s·g`, `F = s²·f`, `F/Γ = s·fog`, `G̃ = s·tg`.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSeries<T> {
    pub g: ZSeries<T>,
    pub f: ZSeries<T>,
    pub fog: ZSeries<T>,
    pub tg: ZSeries<T>,
}

impl<T: Real> SurfaceSeries<T> {
    /// Builds the expansions from the odd Taylor coefficients of Γ,
    /// `odd[j]` multiplying `s^(2j+1)`.
    pub fn from_odd_coefficients(odd: [T; TERMS]) -> Self {
        let g = ZSeries(odd);
        let mut gs = [T::zero(); TERMS];
        let mut f = [T::zero(); TERMS];
        for j in 0..TERMS {
            gs[j] = odd[j] * from_usize(2 * j + 1);
            f[j] = odd[j] / from_usize(2 * j + 2);
        }
        let (gs, f) = (ZSeries(gs), ZSeries(f));
        let ginv = g.recip();
        let fog = f * ginv;
        let tg = gs * f * f * ginv * ginv * ginv - fog;
        SurfaceSeries { g, f, fog, tg }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_coefficients() -> [f64; TERMS] {
        let mut c = [0.0; TERMS];
        let mut fact = 1.0;
        for (j, slot) in c.iter_mut().enumerate() {
            let n = 2 * j + 1;
            if n > 1 {
                fact *= ((n - 1) * n) as f64;
            }
            *slot = if j % 2 == 0 { 1.0 } else { -1.0 } / fact;
        }
        c
    }

    #[test]
    fn reciprocal_of_geometric() {
        let mut a = ZSeries::<f64>([0.0; TERMS]);
        a.0[0] = 1.0;
        a.0[1] = -1.0;
        let b = a.recip();
        assert!(b.0.iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn sphere_tilde_g_leading_terms() {
        let ser = SurfaceSeries::from_odd_coefficients(sine_coefficients());
        // -½ tan(s/2) sec²(s/2) = -s/4 - s³/12 - ...
        assert!((ser.tg.0[0] + 0.25).abs() < 1e-15);
        assert!((ser.tg.0[1] + 1.0 / 12.0).abs() < 1e-15);
        // tan(s/2) = s/2 + s³/24 + ...
        assert!((ser.fog.0[0] - 0.5).abs() < 1e-15);
        assert!((ser.fog.0[1] - 1.0 / 24.0).abs() < 1e-15);
    }
}
