//! One-variable kernel series `B^ω(ζ) = Σ ζⁿ / ωₙ`, closed forms, diagonal
//! values and the extremal functions of the sharp point-evaluation bound.
//!
//! Everything is expressed in `ζ = z̄ξ`; two-variable values `B_z(ξ)` are a
//! thin wrapper ([`bz`]).

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::plane::{self, ExpKernelClosedForm};
use crate::quadrature::QuadratureConfig;
use crate::starcalc::{self, StarKernelAt, StarKernelClosedForm};
use crate::weights::{self, Domain, RadialWeight, WeightKind};
use crate::zeros::{self, ZeroConfig};

pub const DEFAULT_TRUNCATION: usize = 256;
pub const MAX_TRUNCATION: usize = 16384;
pub const DEFAULT_DISK_GUARD: f64 = 0.999;

/// Truncated kernel series with coefficients `aₙ = 1/ωₙ`, `n = 0..=N`.
#[derive(Debug, Clone)]
pub struct KernelSeries {
    pub coefficients: Vec<f64>,
    pub domain_radius: f64,
    pub source: RadialWeight,
    /// Largest |ζ| accepted on the disk.
    pub guard: f64,
    /// Low halves of double-double coefficients, when exact ones are known.
    pub coefficients_lo: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

fn coefficient_error(index: usize, value: f64) -> Error {
    // a coefficient overflowing means its moment underflowed, and vice versa
    if value.is_infinite() || value.is_nan() {
        Error::MomentUnderflow {
            index,
            log10: f64::NEG_INFINITY,
        }
    } else {
        Error::MomentOverflow {
            index,
            log10: f64::INFINITY,
        }
    }
}

fn base_coefficients(w: &RadialWeight, count: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    match w.kind() {
        WeightKind::Standard { alpha } => {
            let a = alpha.value();
            let mut c = 1.0;
            for n in 0..count {
                if n > 0 {
                    c *= (a + 1.0 + n as f64) / n as f64;
                }
                out.push(c);
            }
        }
        WeightKind::Gaussian { gamma } => {
            let g = gamma.value();
            let mut c = 1.0;
            for n in 0..count {
                if n > 0 {
                    c *= g / n as f64;
                }
                out.push(c);
            }
        }
        WeightKind::Custom { .. } => {
            for n in 0..count {
                out.push(1.0 / weights::moment(w, n, cfg)?);
            }
        }
        WeightKind::StarIterate { .. } => unreachable!("star iterates are expanded by the caller"),
    }
    Ok(out)
}

/// Applies `aₙ ↦ 4(n+1)² aₙ₊₁` once; the output is one entry shorter.
pub fn star_coefficient_map(a: &[f64]) -> Vec<f64> {
    a.iter()
        .skip(1)
        .enumerate()
        .map(|(n, v)| {
            let m = (n + 1) as f64;
            4.0 * m * m * v
        })
        .collect()
}

/// Exact version of [`star_coefficient_map`].
pub fn star_coefficient_map_exact(a: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .skip(1)
        .enumerate()
        .map(|(n, v)| {
            let m = exact::int((n + 1) as i64);
            exact::int(4) * &m * &m * v
        })
        .collect()
}

/// Builds the series truncated at `truncation`. Plane kernels whose
/// coefficients underflow are cut at the last representable term.
pub fn kernel_series(w: &RadialWeight, truncation: usize, cfg: &QuadratureConfig) -> Result<KernelSeries> {
    if truncation < 1 {
        return Err(Error::InvalidArgument("truncation must be >= 1".into()));
    }
    let (base, depth) = w.base_and_depth();
    let mut coefficients = base_coefficients(base, truncation + 1 + depth, cfg)?;
    for _ in 0..depth {
        coefficients = star_coefficient_map(&coefficients);
    }
    if w.domain() == Domain::Plane {
        if let Some(cut) = coefficients.iter().position(|c| *c < f64::MIN_POSITIVE) {
            if cut < 2 {
                return Err(coefficient_error(cut, coefficients[cut]));
            }
            coefficients.truncate(cut);
        }
    }
    for (n, c) in coefficients.iter().enumerate() {
        if !(c.is_finite() && *c >= f64::MIN_POSITIVE) {
            return Err(coefficient_error(n, *c));
        }
    }
    Ok(KernelSeries {
        coefficients,
        domain_radius: match w.domain() {
            Domain::Disk => 1.0,
            Domain::Plane => f64::INFINITY,
        },
        source: w.clone(),
        guard: DEFAULT_DISK_GUARD,
        coefficients_lo: None,
    })
}

// Double-double arithmetic for the compensated sums.
#[derive(Debug, Clone, Copy, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s1, s2 + t1);
        quick_two_sum(r.hi, r.lo + t2)
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        quick_two_sum(p, e + self.lo * b)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl KernelSeries {
    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Tail bound `Σ_{n>N} aₙ tⁿ` at modulus `t`.
    ///
    /// Moment sequences of radial weights are log-convex (Cauchy–Schwarz), so
    /// `a_{n+1}/a_n` never increases and the trailing ratio bounds every later
    /// one. Returns `None` when that ratio test does not converge at `t`.
    pub fn tail_bound(&self, t: f64) -> Option<f64> {
        let n = self.truncation();
        if t == 0.0 {
            return Some(0.0);
        }
        let last = self.coefficients[n];
        let ratio = if n >= 1 { last / self.coefficients[n - 1] } else { f64::INFINITY };
        let q = t * ratio;
        if q >= 1.0 {
            return None;
        }
        Some(last * t.powi(n as i32) * q / (1.0 - q))
    }

    /// `Σ aₙ tⁿ` for `t ≥ 0` (the absolute size of the series at modulus `t`).
    pub fn abs_sum(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    fn check_domain(&self, modulus: f64) -> Result<()> {
        let limit = if self.domain_radius.is_finite() {
            self.guard.min(self.domain_radius)
        } else {
            f64::INFINITY
        };
        if modulus >= self.domain_radius || (self.domain_radius.is_finite() && modulus > limit) {
            return Err(Error::OutsideDomain { modulus, limit });
        }
        Ok(())
    }

    /// Horner sum with a rigorous truncation bound. `tol` is relative to
    /// `max(1, Σ aₙ|ζ|ⁿ)`.
    pub fn eval(&self, zeta: Complex64, tol: f64) -> Result<EvalResult> {
        let t = zeta.norm();
        self.check_domain(t)?;
        let value = self.sum(zeta);
        let tail = self.tail_bound(t).unwrap_or(f64::INFINITY);
        let scale = self.abs_sum(t).max(1.0);
        if tail > tol * scale {
            return Err(Error::TruncationInsufficient {
                tail_bound: tail,
                tol: tol * scale,
                terms: self.coefficients.len(),
            });
        }
        Ok(EvalResult {
            value,
            tail_bound: tail,
            terms_used: self.coefficients.len(),
        })
    }

    /// Attaches double-double coefficients from the exact expansion, when the
    /// weight has one. Evaluation then survives the cancellation near
    /// `|ζ| → 1` where `Σ aₙ|ζ|ⁿ` dwarfs `|B(ζ)|`.
    pub fn refined(mut self) -> Self {
        if let Some(exact_coeffs) = kernel_coefficients_exact(&self.source, self.truncation()) {
            let mut lo = Vec::with_capacity(exact_coeffs.len());
            for (c, r) in self.coefficients.iter_mut().zip(&exact_coeffs) {
                let hi = exact::to_f64(r);
                *c = hi;
                lo.push(exact::to_f64(&(r - exact::from_f64(hi).expect("finite coefficient"))));
            }
            self.coefficients_lo = Some(lo);
        }
        self
    }

    /// Horner in double-double when low parts are present, plain otherwise.
    pub fn sum(&self, zeta: Complex64) -> Complex64 {
        let Some(lo) = &self.coefficients_lo else {
            return self.horner(zeta);
        };
        let (x, y) = (zeta.re, zeta.im);
        let mut re = Dd::default();
        let mut im = Dd::default();
        for (hi, lo) in self.coefficients.iter().zip(lo).rev() {
            let new_re = re.mul_f(x).add(im.mul_f(y).neg()).add(Dd { hi: *hi, lo: *lo });
            let new_im = re.mul_f(y).add(im.mul_f(x));
            re = new_re;
            im = new_im;
        }
        Complex64::new(re.hi + re.lo, im.hi + im.lo)
    }

    /// Plain truncated sum without any domain or tail checks.
    pub fn horner(&self, zeta: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * zeta + c)
    }

    pub fn horner_with_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            dp = dp * zeta + p;
            p = p * zeta + c;
        }
        (p, dp)
    }
}

/// Evaluates `B^ω(ζ)` from the series. The truncation starts where the tail
/// is within `tol` of `max(1, Σ aₙ|ζ|ⁿ)` and keeps doubling (cap
/// [`MAX_TRUNCATION`]) until the tail is also within `tol·|B(ζ)|`, so values
/// reduced by cancellation keep their relative accuracy.
pub fn eval_adaptive(w: &RadialWeight, zeta: Complex64, tol: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    let t = zeta.norm();
    let mut series = series_for_modulus(w, t, tol, cfg)?.refined();
    loop {
        let r = series.eval(zeta, tol)?;
        let n = series.truncation();
        if r.tail_bound <= tol * r.value.norm() || r.value.norm() == 0.0 || n >= MAX_TRUNCATION {
            return Ok(r);
        }
        let next = kernel_series(w, 2 * n, cfg)?.refined();
        if next.truncation() <= n {
            // plane series cut at underflow
            return Ok(r);
        }
        series = next;
    }
}

/// Smallest power-of-two truncation (from the default) whose tail bound at
/// modulus `t` is within `tol`.
pub fn series_for_modulus(w: &RadialWeight, t: f64, tol: f64, cfg: &QuadratureConfig) -> Result<KernelSeries> {
    let mut n = DEFAULT_TRUNCATION;
    let mut last_err = None;
    while n <= MAX_TRUNCATION {
        let series = kernel_series(w, n, cfg)?;
        series.check_domain(t)?;
        match series.tail_bound(t) {
            Some(tail) if tail <= tol * series.abs_sum(t).max(1.0) => return Ok(series),
            // Plane series stop where coefficients underflow; more terms cannot help.
            _ if series.truncation() < n => {
                return Err(Error::TruncationInsufficient {
                    tail_bound: series.tail_bound(t).unwrap_or(f64::INFINITY),
                    tol,
                    terms: series.coefficients.len(),
                })
            }
            tail => {
                last_err = Some(Error::TruncationInsufficient {
                    tail_bound: tail.unwrap_or(f64::INFINITY),
                    tol,
                    terms: series.coefficients.len(),
                });
            }
        }
        n *= 2;
    }
    Err(last_err.unwrap_or(Error::TailNotCertifiable))
}

/// Closed-form representation of a kernel, when the weight has one.
#[derive(Debug, Clone)]
pub enum ClosedKernel {
    /// `p(ζ) / (1-ζ)^s` on the disk (numerator `1` for standard weights).
    Disk(StarKernelAt),
    /// `c · q(γζ) e^{γζ}` on the plane.
    Plane(ExpKernelClosedForm),
}

impl ClosedKernel {
    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        match self {
            ClosedKernel::Disk(k) => k.eval(zeta),
            ClosedKernel::Plane(k) => Ok(k.eval(zeta)),
        }
    }

    /// Numerator polynomial in `ζ` (ascending), whose roots are the kernel zeros.
    pub fn numerator_in_zeta(&self) -> Vec<Complex64> {
        match self {
            ClosedKernel::Disk(k) => k.coefficients.iter().map(|c| Complex64::new(*c, 0.0)).collect(),
            ClosedKernel::Plane(k) => k.polynomial_in_zeta().into_iter().map(|c| Complex64::new(c, 0.0)).collect(),
        }
    }
}

/// Closed form for standard and Gaussian weights and their star iterates.
pub fn closed_kernel(w: &RadialWeight) -> Result<ClosedKernel> {
    let (base, depth) = w.base_and_depth();
    match base.kind() {
        WeightKind::Standard { alpha } => {
            let form = StarKernelClosedForm::new(depth)?;
            Ok(ClosedKernel::Disk(form.at(alpha)))
        }
        WeightKind::Gaussian { gamma } => Ok(ClosedKernel::Plane(plane::sb_star_iterate(gamma, depth)?)),
        _ => Err(Error::NoClosedForm),
    }
}

/// `B^ω(ζ)` from the closed form (principal branch of `(1-ζ)^{-s}`).
pub fn closed_form(w: &RadialWeight, zeta: Complex64) -> Result<Complex64> {
    closed_kernel(w)?.eval(zeta)
}

/// Kernel value preferring the closed form, falling back to the series.
pub fn kernel_value(w: &RadialWeight, zeta: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    match closed_kernel(w) {
        Ok(k) => k.eval(zeta),
        Err(Error::NoClosedForm) => Ok(eval_adaptive(w, zeta, 1e-14, cfg)?.value),
        Err(e) => Err(e),
    }
}

/// Two-variable kernel `B_z(ξ) = B^ω(z̄ξ)`.
pub fn bz(w: &RadialWeight, z: Complex64, xi: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    kernel_value(w, z.conj() * xi, cfg)
}

/// `B_z(z)^{1/p} = B^ω(|z|²)^{1/p}`, the norm of point evaluation at `z` on
/// `A^p_ω`. Pure Gaussian weights use the Segal–Bargmann normalization where
/// the weight parameter is `γp/2`, giving `e^{(γ/2)|z|²}` for every `p`.
pub fn point_eval_norm(w: &RadialWeight, z: Complex64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let t = z.norm_sqr();
    let diag = match w.kind() {
        WeightKind::Gaussian { gamma } => {
            let scaled = RadialWeight::gaussian(gamma.value() * p / 2.0)?;
            eval_adaptive(&scaled, Complex64::new(t, 0.0), 1e-16, cfg)?.value.re
        }
        _ => eval_adaptive(w, Complex64::new(t, 0.0), 1e-16, cfg)?.value.re,
    };
    if !(diag.is_finite() && diag > 0.0) {
        return Err(Error::DiagonalDivergence(t));
    }
    Ok(diag.powf(1.0 / p))
}

/// Values at `ξ` of the extremal functions for the bound at `z`:
/// `F = B_z(ξ) conj(B_z(ξ))^{2/q-1} B_z(z)^{1-2/q}` and `G = B_z(ξ)^{2/p}`.
pub fn extremal_values(
    w: &RadialWeight,
    z: Complex64,
    p: f64,
    xi: Complex64,
    cfg: &ZeroConfig,
) -> Result<(Complex64, Complex64)> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let report = zeros::zeros_of_bz(w, z, cfg)?;
    let count = report.total_count();
    if count > 0 {
        return Err(Error::KernelHasZero { count });
    }
    let quad = &cfg.quadrature;
    let b = bz(w, z, xi, quad)?;
    let diag = kernel_value(w, Complex64::new(z.norm_sqr(), 0.0), quad)?.re;
    // 2/q = 2(p-1)/p; q = ∞ at p = 1.
    let two_over_q = 2.0 * (p - 1.0) / p;
    let f = b * b.conj().powf(two_over_q - 1.0) * diag.powf(1.0 - two_over_q);
    let g = b.powf(2.0 / p);
    Ok((f, g))
}

/// Exact kernel coefficients `a₀..=a_N` for non-custom weights with
/// rational parameters. Star iterates of standard weights are expanded from
/// the closed-form numerator, independently of the moment route.
pub fn kernel_coefficients_exact(w: &RadialWeight, truncation: usize) -> Option<Vec<BigRational>> {
    let (base, depth) = w.base_and_depth();
    match base.kind() {
        WeightKind::Standard { alpha } => {
            let form = StarKernelClosedForm::new(depth).ok()?;
            Some(starcalc::series_from_closed_form_exact(&form, alpha.rational(), truncation))
        }
        WeightKind::Gaussian { gamma } => {
            let mut a = Vec::with_capacity(truncation + depth + 1);
            let mut c = BigRational::one();
            for n in 0..=truncation + depth {
                if n > 0 {
                    c = c * gamma.rational() / exact::int(n as i64);
                }
                a.push(c.clone());
            }
            for _ in 0..depth {
                a = star_coefficient_map_exact(&a);
            }
            a.truncate(truncation + 1);
            Some(a)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn series_examples() {
        let s = kernel_series(&RadialWeight::standard(0.0).unwrap(), 10, &cfg()).unwrap();
        for (n, a) in s.coefficients.iter().enumerate() {
            assert!((a - (n as f64 + 1.0)).abs() < 1e-12);
        }
        let s = kernel_series(&RadialWeight::standard(0.0).unwrap().star(), 10, &cfg()).unwrap();
        for (n, a) in s.coefficients.iter().enumerate() {
            let n = n as f64;
            assert!((a / (4.0 * (n + 1.0).powi(2) * (n + 2.0)) - 1.0).abs() < 1e-13);
        }
        let s = kernel_series(&RadialWeight::gaussian(3.0).unwrap(), 10, &cfg()).unwrap();
        let mut expect = 1.0;
        for (n, a) in s.coefficients.iter().enumerate() {
            if n > 0 {
                expect *= 3.0 / n as f64;
            }
            assert!((a / expect - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eval_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let r = eval_adaptive(&w, c(0.5), 1e-14, &cfg()).unwrap();
        assert!((r.value.re - 4.0).abs() < 1e-12);
        assert!(r.tail_bound >= 0.0);
        let g = RadialWeight::gaussian(1.0).unwrap();
        let r = eval_adaptive(&g, c(1.0), 1e-15, &cfg()).unwrap();
        assert!((r.value.re - std::f64::consts::E).abs() < 1e-14);
        // constant kernel at the origin
        let s = RadialWeight::standard(2.0).unwrap().star();
        let r = eval_adaptive(&s, c(0.0), 1e-15, &cfg()).unwrap();
        let w0 = weights::moment(&s, 0, &cfg()).unwrap();
        assert!((r.value.re - 1.0 / w0).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_is_rigorous() {
        let w = RadialWeight::standard(1.0).unwrap();
        let s = kernel_series(&w, 64, &cfg()).unwrap();
        let t = 0.8;
        let bound = s.tail_bound(t).unwrap();
        // true tail of Σ (n+1)(n+2)/2 tⁿ beyond n = 64
        let full = (1.0 - t).powi(-3);
        let tail = full - s.abs_sum(t);
        assert!(tail <= bound * (1.0 + 1e-9), "{tail} > {bound}");
        assert!(bound < 10.0 * tail);
    }

    #[test]
    fn eval_errors() {
        let w = RadialWeight::standard(0.0).unwrap();
        let s = kernel_series(&w, 16, &cfg()).unwrap();
        assert!(matches!(s.eval(c(0.9), 1e-12), Err(Error::TruncationInsufficient { .. })));
        assert!(matches!(s.eval(c(1.0), 1e-12), Err(Error::OutsideDomain { .. })));
        assert!(matches!(s.eval(c(0.9995), 1e-12), Err(Error::OutsideDomain { .. })));
        assert!(matches!(eval_adaptive(&w.star_n(3), c(0.998), 1e-14, &cfg()), Err(Error::TruncationInsufficient { .. })));
    }

    #[test]
    fn closed_form_examples() {
        let w1 = RadialWeight::standard(1.0).unwrap();
        assert!((closed_form(&w1, c(0.5)).unwrap().re - 8.0).abs() < 1e-12);
        let s0 = RadialWeight::standard(0.0).unwrap().star();
        let v = closed_form(&s0, c(0.25)).unwrap();
        assert!((v.re - 12.0 / 0.316_406_25).abs() < 1e-10);
        let series = eval_adaptive(&s0, c(0.25), 1e-15, &cfg()).unwrap();
        assert!((series.value - v).norm() / v.norm() < 1e-13);
        for alpha in [0.0, 1.0, 3.5] {
            let s = RadialWeight::standard(alpha).unwrap().star();
            let root = -1.0 / (2.0 + alpha);
            assert!(closed_form(&s, c(root)).unwrap().norm() < 1e-12);
        }
        assert_eq!(closed_form(&w1, c(1.0)).unwrap_err(), Error::BranchPoint);
        let custom = RadialWeight::custom(Domain::Disk, "one", |_| 1.0, &cfg()).unwrap();
        assert_eq!(closed_form(&custom, c(0.1)).unwrap_err(), Error::NoClosedForm);
    }

    #[test]
    fn standard_series_matches_closed_form() {
        for alpha in [0.0, 1.0, 2.5, 7.0] {
            let w = RadialWeight::standard(alpha).unwrap();
            let s = kernel_series(&w, 1024, &cfg()).unwrap().refined();
            for k in 0..24 {
                let theta = k as f64 * 0.7;
                for r in [0.1, 0.5, 0.9] {
                    let zeta = Complex64::from_polar(r, theta);
                    let a = s.sum(zeta);
                    let b = closed_form(&w, zeta).unwrap();
                    assert!((a - b).norm() / b.norm() < 1e-10, "alpha {alpha} zeta {zeta}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn point_eval_norm_examples() {
        let z = Complex64::new(0.3, 0.4);
        for alpha in [0.0, 1.0, 2.5] {
            let w = RadialWeight::standard(alpha).unwrap();
            for p in [1.0, 2.0, 3.5] {
                let v = point_eval_norm(&w, z, p, &cfg()).unwrap();
                let expect = (1.0 - z.norm_sqr()).powf(-(2.0 + alpha) / p);
                assert!((v / expect - 1.0).abs() < 1e-12);
            }
        }
        let s = RadialWeight::standard(0.0).unwrap().star();
        let v = point_eval_norm(&s, c(0.0), 3.0, &cfg()).unwrap();
        let w0 = weights::moment(&s, 0, &cfg()).unwrap();
        assert!((v - w0.powf(-1.0 / 3.0)).abs() < 1e-12);
        let g = RadialWeight::gaussian(2.0).unwrap();
        for p in [1.0, 2.0, 5.0] {
            let v = point_eval_norm(&g, z, p, &cfg()).unwrap();
            assert!((v / (z.norm_sqr()).exp() - 1.0).abs() < 1e-12);
        }
        assert_eq!(point_eval_norm(&g, z, 0.5, &cfg()).unwrap_err(), Error::InvalidExponent(0.5));
    }

    #[test]
    fn extremal_values_examples() {
        let zcfg = ZeroConfig::default();
        let w = RadialWeight::standard(1.0).unwrap();
        let z = Complex64::new(0.2, -0.5);
        let xi = Complex64::new(-0.3, 0.1);
        let b = bz(&w, z, xi, &cfg()).unwrap();
        let (f, g) = extremal_values(&w, z, 2.0, xi, &zcfg).unwrap();
        assert!((f - b).norm() < 1e-12 && (g - b).norm() < 1e-12);

        let p = 3.0;
        let q = p / (p - 1.0);
        let diag = bz(&w, z, z, &cfg()).unwrap().re;
        let (f, _) = extremal_values(&w, z, p, xi, &zcfg).unwrap();
        let lhs = f.norm().powf(q);
        let rhs = b.norm_sqr() * diag.powf(q - 2.0);
        assert!((lhs / rhs - 1.0).abs() < 1e-12);
        let (_, gz) = extremal_values(&w, z, p, z, &zcfg).unwrap();
        assert!((gz.re - diag.powf(2.0 / p)).abs() < 1e-10 && gz.im.abs() < 1e-12);

        let s = RadialWeight::standard(0.0).unwrap().star();
        let err = extremal_values(&s, c(0.75), 2.0, xi, &zcfg).unwrap_err();
        assert_eq!(err, Error::KernelHasZero { count: 1 });
    }

    #[test]
    fn scaling_identity_two_ways() {
        let w = RadialWeight::standard(0.5).unwrap().star();
        let z = Complex64::new(0.3, 0.2);
        let wpt = Complex64::new(-0.5, 0.6);
        let xi = Complex64::new(0.4, -0.7);
        let a = bz(&w, z, xi, &cfg()).unwrap();
        let b = bz(&w, wpt, (z / wpt).conj() * xi, &cfg()).unwrap();
        assert!((a - b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn exact_coefficients_invert_exact_moments() {
        for w in [
            RadialWeight::standard_exact(exact::ratio(5, 2)).unwrap().star_n(2),
            RadialWeight::gaussian_exact(exact::ratio(3, 2)).unwrap().star(),
        ] {
            let a = kernel_coefficients_exact(&w, 20).unwrap();
            for (n, an) in a.iter().enumerate() {
                assert!((an * weights::moment_exact(&w, n).unwrap()).is_one());
            }
        }
    }
}
