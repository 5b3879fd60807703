//! Adaptive Gauss–Kronrod integration on finite intervals.
//!
//! The 7-point Gauss / 15-point Kronrod pair is applied on every
//! subinterval; the interval with the largest error estimate is bisected
//! until the global estimate meets `max(abs_tol, rel_tol * |I|)`. Error
//! estimates follow the usual QUADPACK scaling, which is pessimistic for
//! smooth integrands.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits shared by every numerical integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Truncation radius for plane-domain integrals. `None` derives it from
    /// the weight (see [`plane_cutoff`]).
    pub upper_cutoff: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 2000,
            upper_cutoff: None,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidArgument("max_subdivisions must be >= 1".into()));
        }
        if let Some(c) = self.upper_cutoff {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument(format!("upper_cutoff must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Same limits with the absolute floor removed. Used for integrals that
    /// are known to be strictly positive (moments, densities), where an
    /// absolute floor would swamp tiny but meaningful values.
    pub fn relative_only(&self) -> Self {
        Self {
            abs_tol: 0.0,
            ..*self
        }
    }
}

/// Gaussian tail cutoff for plane-domain integrands behaving like
/// `r^power * exp(-gamma r^2)` (shifted outward by `shift`).
pub fn plane_cutoff(gamma: f64, abs_tol: f64, power: f64, shift: f64) -> f64 {
    let base = (-abs_tol.max(f64::MIN_POSITIVE).ln() / gamma).sqrt() + 5.0;
    base + (power.max(0.0) / (2.0 * gamma)).sqrt() + shift.max(0.0)
}

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

// Kronrod abscissae on [0, 1], ascending; Gauss points sit at even indices.
const XK: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_48,
    0.405_845_151_377_397_2,
    0.586_087_235_467_691_1,
    0.741_531_185_599_394_5,
    0.864_864_423_359_769_1,
    0.949_107_912_342_758_5,
    0.991_455_371_120_812_6,
];
const WK: [f64; 8] = [
    0.209_482_141_084_727_82,
    0.204_432_940_075_298_89,
    0.190_350_578_064_785_42,
    0.169_004_726_639_267_9,
    0.140_653_259_715_525_92,
    0.104_790_010_322_250_19,
    0.063_092_092_629_978_56,
    0.022_935_322_010_529_224,
];
const WG: [f64; 4] = [
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_64,
    0.129_484_966_168_869_7,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WK[0];
    let mut gauss = fc * WG[0];
    let mut fvals = [(T::default(), T::default()); 8];
    fvals[0] = (fc, fc);
    let mut abs_sum = fc.magnitude() * WK[0];
    for i in 1..8 {
        let dx = half * XK[i];
        let lo = f(center - dx);
        let hi = f(center + dx);
        fvals[i] = (lo, hi);
        kronrod = kronrod + (lo + hi) * WK[i];
        abs_sum += WK[i] * (lo.magnitude() + hi.magnitude());
        if i % 2 == 0 {
            gauss = gauss + (lo + hi) * WG[i / 2];
        }
    }
    if !kronrod.is_finite_value() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mean = kronrod * 0.5;
    let mut asc = WK[0] * (fc - mean).magnitude();
    for i in 1..8 {
        asc += WK[i] * ((fvals[i].0 - mean).magnitude() + (fvals[i].1 - mean).magnitude());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to the tolerances in `cfg`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("infinite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let first = gauss_kronrod(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut frozen_value = T::default();
    let mut frozen_error = 0.0;
    heap.push(first);
    let mut subdivisions = 0;
    loop {
        let (total, err) = heap.iter().fold((frozen_value, frozen_error), |(v, e), p| (v + p.value, e + p.error));
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.magnitude()) {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
                subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "no convergence within {} subdivisions (estimate {:e}, error {:e})",
                cfg.max_subdivisions,
                total.magnitude(),
                err
            )));
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Quadrature(format!(
                "roundoff limits the error estimate to {err:e}"
            )));
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE) {
            frozen_value = frozen_value + worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(gauss_kronrod(&mut f, worst.a, mid)?);
        heap.push(gauss_kronrod(&mut f, mid, worst.b)?);
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Uniform trapezoid mean of `f` over `[0, 2π)`; exact for trigonometric
/// polynomials of degree below `samples`.
pub fn angular_mean<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, samples: usize) -> T {
    let step = 2.0 * PI / samples as f64;
    let mut acc = T::default();
    for j in 0..samples {
        acc = acc + f(step * j as f64);
    }
    acc * (1.0 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        // ∫_{-1}^{1} x^22 dx = 2/23
        let cfg = QuadratureConfig::default();
        let panel = gauss_kronrod(&mut |x: f64| x.powi(22), -1.0, 1.0).unwrap();
        assert!((panel.value - 2.0 / 23.0).abs() < 1e-15);
        let est = integrate(|x: f64| x.powi(22), -1.0, 1.0, &cfg).unwrap();
        assert!((est.value - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let s = WG[0] + 2.0 * (WG[1] + WG[2] + WG[3]);
        assert!((s - 2.0).abs() < 1e-15);
        let k = WK[0] + 2.0 * WK[1..].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_singularity() {
        // ∫_0^1 ln(x) dx = -1
        let cfg = QuadratureConfig::default();
        let est = integrate(|x: f64| x.ln(), 0.0, 1.0, &cfg).unwrap();
        assert!((est.value + 1.0).abs() < 1e-11, "{}", est.value);
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let cfg = QuadratureConfig::default();
        let est = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &cfg).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn complex_integrand() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|t: f64| Complex64::new(0.0, t).exp(), 0.0, PI, &cfg).unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn relative_only_resolves_tiny_integrals() {
        let cfg = QuadratureConfig::default().relative_only();
        let est = integrate(|x: f64| 1e-20 * x * x, 0.0, 1.0, &cfg).unwrap();
        assert!((est.value / (1e-20 / 3.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subdivision_limit_reports_failure() {
        let cfg = QuadratureConfig {
            max_subdivisions: 2,
            ..Default::default()
        };
        assert!(integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &cfg).is_err());
    }

    #[test]
    fn angular_mean_is_exact_for_trig_polynomials() {
        let m = angular_mean(|t: f64| (3.0 * t).cos().powi(2), 64);
        assert!((m - 0.5).abs() < 1e-15);
    }
}
