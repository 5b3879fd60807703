//! Numerical verification of the reproducing identities: every identity is
//! computed once through the moment (orthogonality) reduction and once by
//! direct quadrature, and the two are compared.

use std::cell::RefCell;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::kernels;
use crate::plane;
use crate::quadrature::{self, QuadratureConfig};
use crate::weights::{self, Domain, RadialWeight};
use crate::zeros::{self, ZeroConfig};

pub const DEFAULT_DEGREE_CAP: usize = 10;
pub const QUADRATURE_TOL: f64 = 1e-8;
pub const SHARPNESS_TOL: f64 = 1e-6;

/// Analytic polynomial `Σ fₖ ξᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFunction {
    coefficients: Vec<Complex64>,
}

impl PolynomialFunction {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        Self::with_cap(coefficients, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(mut coefficients: Vec<Complex64>, cap: usize) -> Result<Self> {
        while coefficients.len() > 1 && coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(Complex64::new(0.0, 0.0));
        }
        if coefficients.len() - 1 > cap {
            return Err(Error::InvalidArgument(format!(
                "degree {} exceeds the cap {cap}",
                coefficients.len() - 1
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coefficients: vec![c] }
    }

    /// `ξᵏ` (any degree).
    pub fn monomial(k: usize) -> Self {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); k + 1];
        coefficients[k] = Complex64::new(1.0, 0.0);
        Self { coefficients }
    }

    /// Degree `d` with coefficients uniform in `[0,1) × [0,1)`.
    pub fn random<R: Rng>(degree: usize, rng: &mut R) -> Self {
        let coefficients = (0..=degree)
            .map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, xi: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * xi + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub relation: Relation,
    /// Recorded without pass/fail meaning.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Below this modulus the right-hand side counts as zero and the absolute
/// error decides.
const NEAR_ZERO: f64 = 1e-12;

impl CheckOutcome {
    /// `Equal`: `|lhs - rhs|` relative to `|rhs|`. `AtMost`: the excess of
    /// `|lhs|` over `|rhs|`, relative to `|rhs|`.
    pub fn compare(name: impl Into<String>, lhs: Complex64, rhs: Complex64, relation: Relation, tolerance: f64) -> Self {
        let abs_err = match relation {
            Relation::Equal => (lhs - rhs).norm(),
            Relation::AtMost => (lhs.norm() - rhs.norm()).max(0.0),
        };
        let near_zero = rhs.norm() < NEAR_ZERO;
        let rel_err = if near_zero { abs_err } else { abs_err / rhs.norm() };
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            pass: rel_err <= tolerance,
            tolerance,
            relation,
            informational: false,
            note: None,
        }
    }

    fn exact(name: impl Into<String>, lhs: &Complex<BigRational>, rhs: &Complex<BigRational>) -> Self {
        let to_c = |v: &Complex<BigRational>| Complex64::new(exact::to_f64(&v.re), exact::to_f64(&v.im));
        let mut out = Self::compare(name, to_c(lhs), to_c(rhs), Relation::Equal, 0.0);
        out.pass = lhs == rhs;
        if out.pass {
            out.abs_err = 0.0;
            out.rel_err = 0.0;
        }
        out.note = Some("exact rational arithmetic".into());
        out
    }

    fn informational(mut self, note: impl Into<String>) -> Self {
        self.informational = true;
        self.note = Some(note.into());
        self
    }

    fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::compare(name, zero, zero, Relation::Equal, 0.0).informational(note)
    }

    /// Fails only when it carries pass/fail meaning.
    pub fn failed(&self) -> bool {
        !self.informational && !self.pass
    }
}

fn radial_top(w: &RadialWeight, cfg: &QuadratureConfig, power: f64, shift: f64) -> Result<f64> {
    w.upper_radius(cfg, power, shift)
}

/// `2∫ r ω(r) g(r) dr`, i.e. `∫ g(|ξ|) ω dA` for a radial profile `g`.
fn radial_integral<T, G>(w: &RadialWeight, top: f64, mut g: G, cfg: &QuadratureConfig) -> Result<T>
where
    T: quadrature::QuadValue,
    G: FnMut(f64) -> T,
{
    let failure = RefCell::new(None);
    let est = quadrature::integrate(
        |r: f64| match w.density(r, cfg) {
            Ok(d) => g(r) * (2.0 * r * d),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                g(r) * 0.0
            }
        },
        0.0,
        top,
        cfg,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est.value)
}

/// Same tolerances with an absolute floor proportional to `scale`, for
/// integrals whose value may cancel to zero.
fn with_scale(cfg: &QuadratureConfig, scale: f64) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-3 * cfg.rel_tol * scale,
        ..*cfg
    }
}

fn angular_samples(degree: usize) -> usize {
    (2 * degree + 4).next_power_of_two().max(16)
}

fn conj_coeff(g: &PolynomialFunction, k: usize) -> Complex64 {
    g.coefficients().get(k).map_or(Complex64::new(0.0, 0.0), |c| c.conj())
}

/// `⟨f, g⟩_ω` by the orthogonality reduction `Σ fₖ conj(gₖ) ωₖ`.
pub fn inner_product_reduced(f: &PolynomialFunction, g: &PolynomialFunction, w: &RadialWeight, cfg: &QuadratureConfig) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, fk) in f.coefficients().iter().enumerate() {
        let gk = conj_coeff(g, k);
        if fk.is_zero() || gk.is_zero() {
            continue;
        }
        acc += fk * gk * weights::moment(w, k, cfg)?;
    }
    Ok(acc)
}

/// `⟨f, g⟩_ω` by radial quadrature of the (exact) angular mean.
pub fn inner_product_quadrature(
    f: &PolynomialFunction,
    g: &PolynomialFunction,
    w: &RadialWeight,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let degree = f.degree() + g.degree();
    let samples = angular_samples(degree);
    let norms = inner_product_reduced(&abs_poly(f), &abs_poly(f), w, cfg)?.re * inner_product_reduced(&abs_poly(g), &abs_poly(g), w, cfg)?.re;
    let top = radial_top(w, cfg, degree as f64 + 1.0, 0.0)?;
    radial_integral(
        w,
        top,
        |r| quadrature::angular_mean(|t| {
            let xi = Complex64::from_polar(r, t);
            f.eval(xi) * g.eval(xi).conj()
        }, samples),
        &with_scale(cfg, norms.sqrt()),
    )
}

/// `⟨f, g⟩_ω`, returned from the reduction after checking it against
/// quadrature within [`QUADRATURE_TOL`].
pub fn inner_product(f: &PolynomialFunction, g: &PolynomialFunction, w: &RadialWeight, cfg: &QuadratureConfig) -> Result<Complex64> {
    let reduced = inner_product_reduced(f, g, w, cfg)?;
    let quad = inner_product_quadrature(f, g, w, cfg)?;
    let scale = (inner_product_reduced(&abs_poly(f), &abs_poly(f), w, cfg)?.re
        * inner_product_reduced(&abs_poly(g), &abs_poly(g), w, cfg)?.re)
        .sqrt();
    if (reduced - quad).norm() > QUADRATURE_TOL * scale {
        return Err(Error::Quadrature(format!(
            "inner product disagreement: reduction {reduced}, quadrature {quad}"
        )));
    }
    Ok(reduced)
}

fn abs_poly(f: &PolynomialFunction) -> PolynomialFunction {
    PolynomialFunction {
        coefficients: f.coefficients().iter().map(|c| Complex64::new(c.norm(), 0.0)).collect(),
    }
}

/// `f(z) = ⟨f, B_z⟩_ω`. Exactness of `ωₖ·aₖ = 1` is asserted in rationals
/// where available; the outcome compares `f(z)` with the quadrature of
/// `f · conj(B_z)` against the truncated kernel.
pub fn reproducing_check(w: &RadialWeight, f: &PolynomialFunction, z: Complex64, cfg: &QuadratureConfig) -> Result<CheckOutcome> {
    let name = format!("reproducing({w}, deg {}, z={z})", f.degree());
    if w.domain() == Domain::Disk && z.norm() >= 1.0 {
        return Err(Error::OutsideDomain {
            modulus: z.norm(),
            limit: 1.0,
        });
    }
    let direct = f.eval(z);
    let d = f.degree();
    if let Some(a) = kernels::kernel_coefficients_exact(w, d) {
        for (k, ak) in a.iter().enumerate() {
            let wk = weights::moment_exact(w, k).expect("exact moments exist with exact coefficients");
            if !(ak * wk - BigRational::from_integer(1.into())).is_zero() {
                return Ok(CheckOutcome::compare(&name, direct, Complex64::new(f64::NAN, 0.0), Relation::Equal, QUADRATURE_TOL)
                    .informational(format!("moment reduction is not exact at k = {k}")));
            }
        }
    }
    // Σ fₖ (ωₖ aₖ) zᵏ through floating moments and coefficients
    let series = kernels::kernel_series(w, d.max(1), cfg)?;
    let reduced = f
        .coefficients()
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, fk)| {
            acc + fk * weights::moment(w, k, cfg).unwrap_or(f64::NAN) * series.coefficients[k] * z.powu(k as u32)
        });
    let zc = z.conj();
    let kernel = match w.domain() {
        Domain::Disk => kernels::series_for_modulus(w, z.norm(), 1e-14, cfg)?,
        Domain::Plane => kernels::kernel_series(w, d + 1, cfg)?,
    };
    let samples = angular_samples(d + kernel.truncation());
    let top = radial_top(w, cfg, d as f64, 2.0 * z.norm())?;
    let quad: Complex64 = radial_integral(
        w,
        top,
        |r| {
            quadrature::angular_mean(|t| {
                let xi = Complex64::from_polar(r, t);
                f.eval(xi) * kernel.horner(zc * xi).conj()
            }, samples)
        },
        &with_scale(cfg, abs_poly(f).eval(Complex64::new(z.norm(), 0.0)).re),
    )?;
    let mut out = CheckOutcome::compare(name, quad, direct, Relation::Equal, QUADRATURE_TOL);
    if (reduced - direct).norm() > 1e-12 * direct.norm().max(1.0) {
        out.pass = false;
        out.note = Some(format!("moment reduction gives {reduced}"));
    }
    Ok(out)
}

/// How the moments of `ω` and `ω*` are obtained for the Littlewood–Paley check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    /// Rational moments, star moments through `(ω*)ₙ = ωₙ₊₁/(4(n+1)²)`.
    Exact,
    /// Both sequences by direct (nested) quadrature of the densities.
    Quadrature,
}

fn to_exact_complex(c: Complex64) -> Result<Complex<BigRational>> {
    Ok(Complex::new(exact::from_f64(c.re)?, exact::from_f64(c.im)?))
}

/// `⟨f,g⟩_ω = 4⟨f',g'⟩_{ω*} + ω₀ f(0) conj(g(0))`, both sides reduced to moments.
pub fn littlewood_paley_check(
    w: &RadialWeight,
    f: &PolynomialFunction,
    g: &PolynomialFunction,
    source: MomentSource,
    cfg: &QuadratureConfig,
) -> Result<CheckOutcome> {
    let name = format!("littlewood_paley({w}, {source:?})");
    let n = f.degree().max(g.degree());
    let star = w.star();
    let pairs = |k: usize| f.coefficients().get(k).copied().unwrap_or_default() * conj_coeff(g, k);
    match source {
        MomentSource::Exact => {
            let zero = || Complex::new(BigRational::zero(), BigRational::zero());
            let mut lhs = zero();
            let mut rhs = zero();
            for k in 0..=n {
                let fg = to_exact_complex(pairs(k))?;
                let wk = weights::moment_exact(w, k).ok_or(Error::NoClosedForm)?;
                lhs += fg.clone() * wk.clone();
                if k == 0 {
                    rhs += fg * wk;
                } else {
                    // f'·conj(g') carries k² fₖ conj(gₖ) at index k-1
                    let star_k = weights::moment_exact(&star, k - 1).ok_or(Error::NoClosedForm)?;
                    let kk = exact::int((k * k) as i64);
                    rhs += fg * (exact::int(4) * kk * star_k);
                }
            }
            Ok(CheckOutcome::exact(name, &lhs, &rhs))
        }
        MomentSource::Quadrature => {
            let mut lhs = Complex64::new(0.0, 0.0);
            let mut rhs = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                let fg = pairs(k);
                if fg.is_zero() {
                    continue;
                }
                let wk = weights::quadrature_moment(w, k, cfg)?;
                lhs += fg * wk;
                if k == 0 {
                    rhs += fg * wk;
                } else {
                    let star_k = weights::quadrature_moment(&star, k - 1, cfg)?;
                    rhs += fg * (4.0 * (k * k) as f64 * star_k);
                }
            }
            Ok(CheckOutcome::compare(name, lhs, rhs, Relation::Equal, QUADRATURE_TOL))
        }
    }
}

/// Mean of `|B_z(re^{iθ})|²` with the sample count doubled until stable.
fn kernel_square_mean(kernel: &kernels::ClosedKernel, zc: Complex64, r: f64) -> f64 {
    let mut n = 64;
    let mut prev = f64::NAN;
    loop {
        let m = quadrature::angular_mean(
            |t| kernel.eval(zc * Complex64::from_polar(r, t)).map_or(f64::NAN, |v| v.norm_sqr()),
            n,
        );
        if (m - prev).abs() <= 1e-14 * m.abs() || n >= 1 << 16 {
            return m;
        }
        prev = m;
        n *= 2;
    }
}

/// `‖G‖^p = ∫|B_z|²ω = B_z(z)` for the extremal `G = B_z^{2/p}`; compares
/// `p`-th roots. Requires `B_z` zero-free.
pub fn sharpness_check(w: &RadialWeight, z: Complex64, p: f64, cfg: &ZeroConfig) -> Result<CheckOutcome> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let count = zeros::zeros_of_bz(w, z, cfg)?.total_count();
    if count > 0 {
        return Err(Error::KernelHasZero { count });
    }
    let q = &cfg.quadrature;
    let closed = kernels::closed_kernel(w)?;
    let diag = kernels::kernel_value(w, Complex64::new(z.norm_sqr(), 0.0), q)?.re;
    let zc = z.conj();
    let top = radial_top(w, q, 0.0, 2.0 * z.norm())?;
    let norm_p = radial_integral(w, top, |r| kernel_square_mean(&closed, zc, r), &q.relative_only())?;
    Ok(CheckOutcome::compare(
        format!("sharpness({w}, z={z}, p={p})"),
        Complex64::new(norm_p.powf(1.0 / p), 0.0),
        Complex64::new(diag.powf(1.0 / p), 0.0),
        Relation::Equal,
        SHARPNESS_TOL,
    ))
}

/// `‖f‖_{A^p_ω}` by quadrature.
pub fn lp_norm(w: &RadialWeight, f: &PolynomialFunction, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let samples = (8 * (f.degree() + 1)).next_power_of_two().max(256);
    let top = radial_top(w, cfg, p * f.degree() as f64 + 1.0, 0.0)?;
    let v: f64 = radial_integral(
        w,
        top,
        |r| quadrature::angular_mean(|t| f.eval(Complex64::from_polar(r, t)).norm().powf(p), samples),
        &cfg.relative_only(),
    )?;
    Ok(v.powf(1.0 / p))
}

/// `|f(z)| ≤ B_z(z)^{1/p} ‖f‖_{A^p_ω}`. For `p < 1` the bound is not known to
/// hold; there the test function is the extremal `B_z^{2/p}` and the
/// outcome is informational.
pub fn holder_check(w: &RadialWeight, f: &PolynomialFunction, z: Complex64, p: f64, cfg: &ZeroConfig) -> Result<CheckOutcome> {
    let q = &cfg.quadrature;
    let diag = kernels::kernel_value(w, Complex64::new(z.norm_sqr(), 0.0), q)?.re;
    if p >= 1.0 {
        let lhs = f.eval(z).norm();
        let rhs = diag.powf(1.0 / p) * lp_norm(w, f, p, q)?;
        return Ok(CheckOutcome::compare(
            format!("holder({w}, deg {}, z={z}, p={p})", f.degree()),
            Complex64::new(lhs, 0.0),
            Complex64::new(rhs, 0.0),
            Relation::AtMost,
            QUADRATURE_TOL,
        ));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidExponent(p));
    }
    let count = zeros::zeros_of_bz(w, z, cfg)?.total_count();
    if count > 0 {
        return Err(Error::KernelHasZero { count });
    }
    let closed = kernels::closed_kernel(w)?;
    let zc = z.conj();
    let top = radial_top(w, q, 0.0, 2.0 * z.norm())?;
    // |G|^p = |B_z|² for G = B_z^{2/p}
    let g_norm_p = radial_integral(w, top, |r| kernel_square_mean(&closed, zc, r), &q.relative_only())?;
    let lhs = diag.powf(2.0 / p);
    let rhs = diag.powf(1.0 / p) * g_norm_p.powf(1.0 / p);
    Ok(CheckOutcome::compare(
        format!("holder_lower_family({w}, z={z}, p={p})"),
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
        Relation::AtMost,
        QUADRATURE_TOL,
    )
    .informational("p < 1: the upper bound is open; recorded without pass/fail"))
}

/// `n_η^p(f,R) = ∫_{|z|<R}|f|^p η dA / ∫_{|z|<R} η dA` with
/// `η(r) = (1-r²)^{η_exponent}`.
pub fn hardy_ratio(f: &PolynomialFunction, p: f64, radius: f64, eta_exponent: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidArgument(format!("R = {radius} must lie in (0, 1)")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let eta = |r: f64| (1.0 - r * r).powf(eta_exponent);
    let samples = (8 * (f.degree() + 1)).next_power_of_two().max(64);
    let rel = cfg.relative_only();
    let num = quadrature::integrate(
        |r: f64| {
            let m = quadrature::angular_mean(|t| f.eval(Complex64::from_polar(r, t)).norm().powf(p), samples);
            r * eta(r) * m
        },
        0.0,
        radius,
        &rel,
    )?;
    let den = quadrature::integrate(|r: f64| r * eta(r), 0.0, radius, &rel)?;
    Ok(num.value / den.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Reproducing,
    LittlewoodPaley,
    Sharpness,
    Holder,
    Hardy,
    Plane,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub degree_cap: usize,
    pub random_points: usize,
    pub zeros: ZeroConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            degree_cap: DEFAULT_DEGREE_CAP,
            random_points: 25,
            zeros: ZeroConfig::default(),
        }
    }
}

/// The weights the suites run over.
pub fn builtin_weights() -> Result<Vec<RadialWeight>> {
    let std0 = RadialWeight::standard(0.0)?;
    Ok(vec![
        std0.clone(),
        RadialWeight::standard(1.0)?,
        RadialWeight::standard_exact(exact::ratio(5, 2))?,
        RadialWeight::standard(7.0)?,
        std0.star(),
        std0.star_n(2),
        RadialWeight::standard(1.0)?.star(),
        RadialWeight::gaussian(1.0)?,
        RadialWeight::gaussian_exact(exact::ratio(3, 2))?,
        RadialWeight::gaussian(1.0)?.star(),
    ])
}

type Case = Box<dyn Fn() -> Result<CheckOutcome> + Send + Sync>;

fn random_disk_point<R: Rng>(rng: &mut R, max: f64) -> Complex64 {
    Complex64::from_polar(max * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>())
}

/// Uniform on the annulus. Keeps `|z|ᵏ` well above the rounding noise of the
/// angular sums in the reproducing quadrature.
fn random_annulus_point<R: Rng>(rng: &mut R, min: f64, max: f64) -> Complex64 {
    let (a, b) = (min * min, max * max);
    Complex64::from_polar((a + (b - a) * rng.random::<f64>()).sqrt(), std::f64::consts::TAU * rng.random::<f64>())
}

fn into_outcome(name: String, r: Result<CheckOutcome>) -> CheckOutcome {
    match r {
        Ok(o) => o,
        Err(Error::KernelHasZero { count }) => {
            CheckOutcome::skipped(name, format!("hypothesis fails: kernel has {count} zero(s)"))
        }
        Err(e) => {
            let nan = Complex64::new(f64::NAN, 0.0);
            let mut o = CheckOutcome::compare(name, nan, nan, Relation::Equal, 0.0);
            o.pass = false;
            o.note = Some(e.to_string());
            o
        }
    }
}

fn build_cases(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<(String, Case)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases: Vec<(String, Case)> = Vec::new();
    let q = cfg.zeros.quadrature;
    let disk: Vec<RadialWeight> = builtin_weights()?.into_iter().filter(|w| w.domain() == Domain::Disk).collect();

    if suite.includes(Suite::Reproducing) {
        for w in &disk {
            for k in 0..=cfg.degree_cap {
                let z = random_annulus_point(&mut rng, 0.25, 0.9);
                let (w, q) = (w.clone(), q);
                cases.push((
                    format!("reproducing monomial {k} {w}"),
                    Box::new(move || reproducing_check(&w, &PolynomialFunction::monomial(k), z, &q)),
                ));
            }
        }
        let w = RadialWeight::standard(0.0)?.star_n(2);
        let f = PolynomialFunction::random(8, &mut rng);
        let q2 = q;
        cases.push((
            "reproducing random degree 8".into(),
            Box::new(move || reproducing_check(&w, &f, Complex64::new(0.3, 0.4), &q2)),
        ));
    }
    if suite.includes(Suite::LittlewoodPaley) {
        for w in builtin_weights()? {
            let f = PolynomialFunction::random(8, &mut rng);
            let g = PolynomialFunction::random(8, &mut rng);
            let q2 = q;
            cases.push((
                format!("littlewood-paley exact {w}"),
                Box::new(move || littlewood_paley_check(&w, &f, &g, MomentSource::Exact, &q2)),
            ));
        }
        for w in [RadialWeight::standard(1.0)?, RadialWeight::standard(0.0)?.star()] {
            let f = PolynomialFunction::random(4, &mut rng);
            let g = PolynomialFunction::random(4, &mut rng);
            let q2 = q;
            cases.push((
                format!("littlewood-paley quadrature {w}"),
                Box::new(move || littlewood_paley_check(&w, &f, &g, MomentSource::Quadrature, &q2)),
            ));
        }
    }
    if suite.includes(Suite::Sharpness) {
        let std0 = RadialWeight::standard(0.0)?;
        let list = [
            (std0.clone(), Complex64::new(0.6, 0.0), 4.0),
            (RadialWeight::standard(2.5)?, random_disk_point(&mut rng, 0.8), 2.0),
            (std0.star(), Complex64::new(0.2, -0.3), 3.0),
            (std0.star(), Complex64::new(0.6, 0.2), 2.0),
            (RadialWeight::gaussian(1.0)?, Complex64::new(0.5, 0.7), 2.0),
        ];
        for (w, z, p) in list {
            let zc = cfg.zeros.clone();
            cases.push((format!("sharpness {w} z={z} p={p}"), Box::new(move || sharpness_check(&w, z, p, &zc))));
        }
    }
    if suite.includes(Suite::Holder) {
        for w in &disk {
            for p in [1.0, 2.0, 3.0] {
                let f = PolynomialFunction::random(1 + rng.random_range(0..6), &mut rng);
                let z = random_disk_point(&mut rng, 0.8);
                let (w, zc) = (w.clone(), cfg.zeros.clone());
                cases.push((format!("holder {w} p={p}"), Box::new(move || holder_check(&w, &f, z, p, &zc))));
            }
        }
        let w = RadialWeight::standard(1.0)?;
        let z = random_disk_point(&mut rng, 0.7);
        let zc = cfg.zeros.clone();
        let one = PolynomialFunction::constant(Complex64::new(1.0, 0.0));
        cases.push(("holder p=0.5".into(), Box::new(move || holder_check(&w, &one, z, 0.5, &zc))));
    }
    if suite.includes(Suite::Hardy) {
        let one = PolynomialFunction::constant(Complex64::new(1.0, 0.0));
        for (r, e) in [(0.5, -1.0), (0.9, 0.0), (0.99, 2.0)] {
            let (f, q2) = (one.clone(), q);
            cases.push((
                format!("hardy ratio of 1 at R={r}, eta={e}"),
                Box::new(move || {
                    let v = hardy_ratio(&f, 2.0, r, e, &q2)?;
                    Ok(CheckOutcome::compare(format!("hardy_ratio(1, R={r}, eta={e})"), v.into(), 1.0.into(), Relation::Equal, 1e-12))
                }),
            ));
        }
        let zeta = PolynomialFunction::monomial(1);
        for r in [0.9, 0.99, 0.999] {
            let (f, q2) = (zeta.clone(), q);
            cases.push((
                format!("hardy ratio of zeta at R={r}"),
                Box::new(move || {
                    let v = hardy_ratio(&f, 2.0, r, -1.0, &q2)?;
                    let closed = 1.0 - r * r / -(1.0 - r * r).ln();
                    Ok(CheckOutcome::compare(format!("hardy_ratio(zeta, R={r}, eta=-1)"), v.into(), closed.into(), Relation::Equal, 1e-8)
                        .with_note(format!("Hardy mean at R is {}", r * r)))
                }),
            ));
        }
    }
    if suite.includes(Suite::Plane) {
        for n in 1..=8 {
            cases.push((
                format!("plane iterate {n} zero count"),
                Box::new(move || {
                    let g = exact::Param::exact(exact::ratio(3, 2));
                    let r = plane::sb_zeros(&g, n)?;
                    Ok(CheckOutcome::compare(
                        format!("sb_zeros(3/2, {n})"),
                        (r.total_count() as f64).into(),
                        (n as f64).into(),
                        Relation::Equal,
                        0.0,
                    ))
                }),
            ));
        }
        for _ in 0..cfg.random_points {
            let gamma = 0.5 + 2.0 * rng.random::<f64>();
            let z = random_disk_point(&mut rng, 2.0);
            let p = [0.5, 1.0, 2.0, 4.0][rng.random_range(0..4)];
            let f = PolynomialFunction::random(rng.random_range(0..=6), &mut rng);
            let q2 = q;
            cases.push((
                format!("fock bound gamma={gamma:.3} p={p}"),
                Box::new(move || plane::sb_point_eval_bound(gamma, z, p, &f, &q2)),
            ));
        }
    }
    Ok(cases)
}

impl CheckOutcome {
    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Runs a suite in parallel; outcomes come back in a fixed order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let cases = build_cases(suite, cfg)?;
    Ok(cases
        .into_par_iter()
        .map(|(name, case)| into_outcome(name, case()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn one() -> PolynomialFunction {
        PolynomialFunction::constant(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn polynomial_basics() {
        let f = PolynomialFunction::new(vec![1.0.into(), 2.0.into(), 0.0.into()]).unwrap();
        assert_eq!(f.degree(), 1);
        assert_eq!(f.eval(Complex64::new(0.0, 1.0)), Complex64::new(1.0, 2.0));
        assert_eq!(f.derivative().coefficients(), &[Complex64::new(2.0, 0.0)]);
        assert!(PolynomialFunction::new(vec![1.0.into(); 12]).is_err());
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let f = PolynomialFunction::random(8, &mut a);
        assert_eq!(f, PolynomialFunction::random(8, &mut b));
        assert!(f.coefficients().iter().all(|c| (0.0..1.0).contains(&c.re) && (0.0..1.0).contains(&c.im)));
    }

    #[test]
    fn inner_product_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let z = PolynomialFunction::monomial(1);
        assert!((inner_product(&z, &z, &w, &q()).unwrap() - 0.5).norm() < 1e-15);
        for w in [w.clone(), w.star(), RadialWeight::gaussian(2.0).unwrap()] {
            assert_eq!(inner_product(&one(), &z, &w, &q()).unwrap(), Complex64::new(0.0, 0.0));
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let f = PolynomialFunction::random(5, &mut rng);
            let n = inner_product(&f, &f, &w, &q()).unwrap();
            assert!(n.re > 0.0 && n.im.abs() < 1e-15 * n.re);
            let g = PolynomialFunction::random(5, &mut rng);
            let a = inner_product_reduced(&f, &g, &w, &q()).unwrap();
            let b = inner_product_quadrature(&f, &g, &w, &q()).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm(), "{w}: {a} vs {b}");
        }
    }

    #[test]
    fn reproducing_examples() {
        let z = Complex64::new(0.3, -0.2);
        let out = reproducing_check(&RadialWeight::standard(0.0).unwrap(), &one(), z, &q()).unwrap();
        assert!(out.pass && (out.rhs - 1.0).norm() == 0.0);
        let out = reproducing_check(&RadialWeight::standard(1.0).unwrap(), &PolynomialFunction::monomial(3), 0.5.into(), &q()).unwrap();
        assert!(out.pass, "{out:?}");
        assert!((out.rhs.re - 0.125).abs() < 1e-16);
        let g = RadialWeight::gaussian(1.5).unwrap();
        let out = reproducing_check(&g, &PolynomialFunction::monomial(4), Complex64::new(1.2, 0.7), &q()).unwrap();
        assert!(out.pass, "{out:?}");
    }

    #[test]
    fn littlewood_paley_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let out = littlewood_paley_check(&w, &one(), &one(), MomentSource::Exact, &q()).unwrap();
        assert!(out.pass && out.lhs == Complex64::new(1.0, 0.0));
        let z = PolynomialFunction::monomial(1);
        let out = littlewood_paley_check(&w, &z, &z, MomentSource::Exact, &q()).unwrap();
        assert!(out.pass && out.lhs == Complex64::new(0.5, 0.0) && out.rhs == out.lhs);
        let out = littlewood_paley_check(&w, &z, &z, MomentSource::Quadrature, &q()).unwrap();
        assert!(out.pass, "{out:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = PolynomialFunction::random(8, &mut rng);
        let g = PolynomialFunction::random(8, &mut rng);
        let out = littlewood_paley_check(&RadialWeight::standard(1.0).unwrap().star(), &f, &g, MomentSource::Exact, &q()).unwrap();
        assert!(out.pass && out.rel_err == 0.0);
    }

    #[test]
    fn sharpness_examples() {
        let zc = ZeroConfig::default();
        let std0 = RadialWeight::standard(0.0).unwrap();
        let out = sharpness_check(&std0, 0.6.into(), 4.0, &zc).unwrap();
        assert!(out.pass, "{out:?}");
        assert!((out.rhs.re - 1.25).abs() < 1e-12);
        let out = sharpness_check(&std0.star(), Complex64::new(0.1, 0.35), 3.0, &zc).unwrap();
        assert!(out.pass, "{out:?}");
        assert_eq!(
            sharpness_check(&std0.star(), 0.7.into(), 2.0, &zc).unwrap_err(),
            Error::KernelHasZero { count: 1 }
        );
    }

    #[test]
    fn holder_examples() {
        let zc = ZeroConfig::default();
        let w = RadialWeight::standard(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = PolynomialFunction::random(4, &mut rng);
        let out = holder_check(&w, &f, Complex64::new(0.4, 0.1), 1.5, &zc).unwrap();
        assert!(out.pass && out.lhs.re < out.rhs.re);
        let out = holder_check(&w, &one(), 0.3.into(), 0.5, &zc).unwrap();
        assert!(out.informational && !out.failed());
        // the extremal family attains the bound
        assert!((out.lhs.re / out.rhs.re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hardy_examples() {
        for (r, e) in [(0.3, -1.0), (0.95, 0.0), (0.7, 3.0)] {
            assert!((hardy_ratio(&one(), 2.0, r, e, &q()).unwrap() - 1.0).abs() < 1e-13);
        }
        let zeta = PolynomialFunction::monomial(1);
        for r in [0.9, 0.99, 0.999] {
            let v = hardy_ratio(&zeta, 2.0, r, -1.0, &q()).unwrap();
            let closed = 1.0 - r * r / -(1.0 - r * r).ln();
            assert!((v - closed).abs() < 1e-10, "R {r}: {v} vs {closed}");
        }
        // η = 1: n → ‖ζ‖² under the normalized area measure, which is ω₁ = 1/2
        let v = hardy_ratio(&zeta, 2.0, 0.999_999, 0.0, &q()).unwrap();
        assert!((v - 0.5).abs() < 1e-5);
    }

    #[test]
    fn suites_pass_deterministically() {
        let cfg = SuiteConfig::default();
        let a = run_suite(Suite::Plane, &cfg).unwrap();
        let b = run_suite(Suite::Plane, &cfg).unwrap();
        assert_eq!(a, b);
        for o in &a {
            assert!(!o.failed(), "{o:?}");
        }
    }

    #[test]
    fn outcome_semantics() {
        let o = CheckOutcome::compare("x", 1.0.into(), 1.0000001.into(), Relation::Equal, 1e-6);
        assert!(o.pass);
        let o = CheckOutcome::compare("x", 2.0.into(), 1.0.into(), Relation::AtMost, 1e-8);
        assert!(!o.pass && o.rel_err == 1.0);
        let o = CheckOutcome::compare("x", 1e-14.into(), 0.0.into(), Relation::Equal, 1e-12);
        assert!(o.pass && o.rel_err == 1e-14);
    }
}
