//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Kronrod panel: returns `(kronrod, gauss)` estimates on `[a, b]`.
pub fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut k = fc * lit(WGK[7]);
    let mut g = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        k = k + s * lit(WGK[j]);
        if j % 2 == 1 {
            g = g + s * lit(WG[j / 2]);
        }
    }
    (k * half, g * half)
}

/// Fixed 15-point Kronrod estimate, used on intervals where the integrand is a
/// low-degree polynomial or already well resolved.
pub fn kronrod15<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T) -> T {
    gk15(&mut f, a, b).0
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub panels: usize,
}

/// Globally adaptive bisection until the summed error estimate meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    max_panels: usize,
) -> Result<Quadrature<T>> {
    if a == b {
        return Ok(Quadrature { value: T::zero(), error: T::zero(), panels: 0 });
    }
    let mut panels: Vec<(T, T, T, T)> = Vec::new();
    let (k, g) = gk15(&mut f, a, b);
    panels.push((a, b, k, (k - g).abs()));
    loop {
        let total: T = panels.iter().map(|p| p.2).sum();
        let err: T = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Domain("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Quadrature { value: total, error: err, panels: panels.len() });
        }
        if panels.len() >= max_panels {
            return Err(Error::Integration(format!(
                "quadrature did not converge: error {err:e} after {} panels",
                panels.len()
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = (lo + hi) * lit(0.5);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (k, g) = gk15(&mut f, l, h);
            panels.push((l, h, k, (k - g).abs()));
        }
    }
}
