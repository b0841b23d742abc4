//! Adaptive Gauss-Kronrod quadrature (7-point Gauss, 15-point Kronrod).

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum of the per-panel Gauss/Kronrod differences plus a rounding term.
    pub err: f64,
    pub panels: usize,
    pub converged: bool,
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm(), abs * h.abs())
}

/// Integrates a complex function over `[a, b]` to absolute tolerance `tol`.
///
/// Panels are bisected largest-error first until the summed error estimate
/// falls below `tol` or `max_panels` is reached.
pub fn integrate(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Quadrature {
    if a == b {
        return Quadrature {
            value: Complex64::new(0.0, 0.0),
            err: 0.0,
            panels: 0,
            converged: true,
        };
    }
    let (v, e, s) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e, s)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol || panels.len() >= max_panels {
            break;
        }
        let (k, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _, _) = panels.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        let (v1, e1, s1) = gk15(&f, lo, mid);
        let (v2, e2, s2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1, s1));
        panels.push((mid, hi, v2, e2, s2));
    }
    // sum in interval order so the result does not depend on refinement history
    panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value = panels.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.2);
    let err: f64 = panels.iter().map(|p| p.3).sum();
    let abs: f64 = panels.iter().map(|p| p.4).sum();
    let rounding = 64.0 * f64::EPSILON * abs;
    Quadrature {
        value,
        err: err + rounding,
        panels: panels.len(),
        converged: err <= tol,
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_panels: usize) -> Quadrature {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, tol, max_panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate_real(|x| x.powi(5) - 2.0 * x * x + 1.0, 0.0, 2.0, 1e-13, 50);
        let exact = 64.0 / 6.0 - 16.0 / 3.0 + 2.0;
        assert!((q.value.re - exact).abs() < 1e-12);
        assert!(q.converged);
    }

    #[test]
    fn oscillatory_exponential() {
        let c = 37.5;
        let q = integrate(|x| Complex64::new(0.0, 2.0 * PI * c * x).exp(), 0.0, 1.0, 1e-12, 500);
        let exact = (PI * c).sin().abs() / (PI * c);
        assert!((q.value.norm() - exact).abs() <= q.err + 1e-12);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate_real(|x| x, 1.0, 1.0, 1e-9, 10).value.re, 0.0);
    }
}
