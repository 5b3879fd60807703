//! Exact numerators of iterated star kernels of standard weights.
//!
//! `B^{ν_α^{*n}}(ζ) = p_{α,n}(ζ) / (1-ζ)^{2+α+2n}` where `p_{α,n}` has degree
//! `n` in `ζ` and each coefficient `c_{α,n,k}` is a polynomial in `α` with
//! rational coefficients. The numerators are produced from
//! `p_{α,1} = 4(2+α) + 4(2+α)²ζ` by the five-term step obtained from
//! `B* = 4B' + 4ζB''`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Param};
use crate::kernels::KernelSeries;
use crate::weights::RadialWeight;

pub const DEFAULT_DEPTH_CAP: usize = 12;

/// Polynomial in `α` with exact rational coefficients (index = power).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| exact::int(v)).collect())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + exact::to_f64(c))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(exact::to_string).collect()
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        RationalPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self + &(-rhs)
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

/// Polynomial in `ζ` whose coefficients are [`RationalPoly`]s in `α`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlphaPolynomial {
    zeta: Vec<RationalPoly>,
    level: usize,
}

impl fmt::Debug for AlphaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphaPolynomial")
            .field("level", &self.level)
            .field("zeta", &self.zeta)
            .finish()
    }
}

impl AlphaPolynomial {
    /// The level-0 numerator `1` (the standard kernel itself).
    pub fn one() -> Self {
        Self {
            zeta: vec![RationalPoly::from_ints(&[1])],
            level: 0,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `c_{·,n,k}` for `k = 0..=n`.
    pub fn coefficients(&self) -> &[RationalPoly] {
        &self.zeta
    }

    pub fn coefficient(&self, k: usize) -> RationalPoly {
        self.zeta.get(k).cloned().unwrap_or_default()
    }

    /// Degree in `ζ` (index of the last non-zero coefficient).
    pub fn zeta_degree(&self) -> Option<usize> {
        self.zeta.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval_alpha(&self, alpha: &BigRational) -> Vec<BigRational> {
        self.zeta.iter().map(|c| c.eval(alpha)).collect()
    }

    pub fn eval_alpha_f64(&self, alpha: &Param) -> Vec<f64> {
        self.eval_alpha(alpha.rational()).iter().map(exact::to_f64).collect()
    }

    /// JSON-ready form: one list of `p/q` strings (ascending α powers) per ζ power.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.zeta.iter().map(RationalPoly::to_strings).collect()
    }

    fn from_terms(mut zeta: Vec<RationalPoly>, level: usize) -> Self {
        while zeta.len() > 1 && zeta.last().is_some_and(RationalPoly::is_zero) {
            zeta.pop();
        }
        Self { zeta, level }
    }
}

// ζ-polynomial helpers over RationalPoly coefficients.
fn zeta_add(a: &[RationalPoly], b: &[RationalPoly]) -> Vec<RationalPoly> {
    let n = a.len().max(b.len());
    let zero = RationalPoly::zero();
    (0..n).map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)).collect()
}

fn zeta_derivative(a: &[RationalPoly]) -> Vec<RationalPoly> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(&exact::int(k as i64)))
        .collect()
}

fn zeta_shift(a: &[RationalPoly]) -> Vec<RationalPoly> {
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(RationalPoly::zero());
    out.extend(a.iter().cloned());
    out
}

/// Multiplies by `(1 - ζ)`.
fn zeta_one_minus(a: &[RationalPoly]) -> Vec<RationalPoly> {
    let shifted = zeta_shift(a);
    let neg: Vec<RationalPoly> = shifted.iter().map(|c| -c).collect();
    zeta_add(a, &neg)
}

fn zeta_scale(a: &[RationalPoly], k: &RationalPoly) -> Vec<RationalPoly> {
    a.iter().map(|c| c * k).collect()
}

/// `p_{α,1}(ζ) = 4(2+α) + 4(2+α)²ζ`.
pub fn p_base() -> AlphaPolynomial {
    AlphaPolynomial {
        zeta: vec![RationalPoly::from_ints(&[8, 4]), RationalPoly::from_ints(&[16, 16, 4])],
        level: 1,
    }
}

/// One star transform of the numerator at level `m`:
///
/// ```text
/// p_{m+1} = 4p'(1-ζ)² + 4s·p(1-ζ) + 4ζp''(1-ζ)² + 8s·ζp'(1-ζ) + 4s(s+1)·ζp,
/// s = 2 + α + 2m
/// ```
pub fn star_step(p: &AlphaPolynomial) -> AlphaPolynomial {
    let m = p.level as i64;
    let s = RationalPoly::from_ints(&[2 + 2 * m, 1]);
    let s1 = RationalPoly::from_ints(&[3 + 2 * m, 1]);
    let four = RationalPoly::from_ints(&[4]);
    let eight = RationalPoly::from_ints(&[8]);

    let d1 = zeta_derivative(&p.zeta);
    let d2 = zeta_derivative(&d1);

    let t1 = zeta_scale(&zeta_one_minus(&zeta_one_minus(&d1)), &four);
    let t2 = zeta_scale(&zeta_one_minus(&p.zeta), &(&four * &s));
    let t3 = zeta_scale(&zeta_one_minus(&zeta_one_minus(&zeta_shift(&d2))), &four);
    let t4 = zeta_scale(&zeta_one_minus(&zeta_shift(&d1)), &(&eight * &s));
    let t5 = zeta_scale(&zeta_shift(&p.zeta), &(&(&four * &s) * &s1));

    let sum = [t2, t3, t4, t5].iter().fold(t1, |acc, t| zeta_add(&acc, t));
    AlphaPolynomial::from_terms(sum, p.level + 1)
}

fn cache() -> &'static Mutex<Vec<AlphaPolynomial>> {
    static CACHE: OnceLock<Mutex<Vec<AlphaPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![AlphaPolynomial::one(), p_base()]))
}

/// `p_{α,n}` for `1 ≤ n ≤ 12` (and `n = 0`, the constant `1`). Cached.
pub fn p_n(n: usize) -> Result<AlphaPolynomial> {
    p_n_capped(n, DEFAULT_DEPTH_CAP)
}

pub fn p_n_capped(n: usize, cap: usize) -> Result<AlphaPolynomial> {
    if n > cap {
        return Err(Error::DepthCap { requested: n, cap });
    }
    let mut table = cache().lock().expect("p_n cache poisoned");
    while table.len() <= n {
        let next = star_step(table.last().expect("cache is seeded"));
        table.push(next);
    }
    Ok(table[n].clone())
}

/// `p_{α,n}(ζ) / (1-ζ)^{2+α+2n}` with `α` left symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct StarKernelClosedForm {
    pub numerator: AlphaPolynomial,
}

impl StarKernelClosedForm {
    pub fn new(level: usize) -> Result<Self> {
        Ok(Self { numerator: p_n(level)? })
    }

    pub fn level(&self) -> usize {
        self.numerator.level()
    }

    /// Pole exponent `2 + α + 2n` at a given `α`.
    pub fn pole_exponent(&self, alpha: f64) -> f64 {
        2.0 + alpha + 2.0 * self.level() as f64
    }

    pub fn at(&self, alpha: &Param) -> StarKernelAt {
        StarKernelAt {
            coefficients: self.numerator.eval_alpha_f64(alpha),
            exponent: self.pole_exponent(alpha.value()),
            alpha: alpha.clone(),
            level: self.level(),
        }
    }
}

/// A [`StarKernelClosedForm`] specialised to a numeric `α`.
#[derive(Debug, Clone)]
pub struct StarKernelAt {
    pub coefficients: Vec<f64>,
    pub exponent: f64,
    pub alpha: Param,
    pub level: usize,
}

impl StarKernelAt {
    pub fn numerator(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            dp = dp * zeta + p;
            p = p * zeta + c;
        }
        (p, dp)
    }

    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        if zeta == Complex64::new(1.0, 0.0) {
            return Err(Error::BranchPoint);
        }
        let (p, _) = self.numerator(zeta);
        Ok(p * (Complex64::new(1.0, 0.0) - zeta).powf(-self.exponent))
    }

    /// Value and `ζ`-derivative.
    pub fn eval_with_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let one_minus = Complex64::new(1.0, 0.0) - zeta;
        let (p, dp) = self.numerator(zeta);
        let pole = one_minus.powf(-self.exponent);
        (p * pole, (dp + p * self.exponent / one_minus) * pole)
    }
}

/// Rising-factorial binomial series `(1-ζ)^{-s} = Σ (s)_k/k! ζᵏ`.
fn binomial_series(s: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut b = 1.0;
    for k in 0..count {
        if k > 0 {
            b *= (s + (k - 1) as f64) / k as f64;
        }
        out.push(b);
    }
    out
}

fn convolve_numerator<T, F>(numerator: &[T], binom: &[T], count: usize, zero: F) -> Vec<T>
where
    T: Clone,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    T: Add<T, Output = T>,
    F: Fn() -> T,
{
    (0..count)
        .map(|k| {
            numerator
                .iter()
                .enumerate()
                .take(k + 1)
                .fold(zero(), |acc, (i, c)| acc + c * &binom[k - i])
        })
        .collect()
}

/// Taylor coefficients `0..=N` of the closed form at `α`.
pub fn series_from_closed_form(f: &StarKernelClosedForm, alpha: f64, truncation: usize) -> Result<KernelSeries> {
    let alpha_p = Param::from_f64(alpha)?;
    let at = f.at(&alpha_p);
    let binom = binomial_series(at.exponent, truncation + 1);
    let coefficients = convolve_numerator(&at.coefficients, &binom, truncation + 1, || 0.0);
    Ok(KernelSeries {
        coefficients,
        domain_radius: 1.0,
        source: RadialWeight::standard(alpha)?.star_n(f.level()),
        guard: crate::kernels::DEFAULT_DISK_GUARD,
        coefficients_lo: None,
    })
}

/// Exact Taylor coefficients `0..=N` for rational `α`.
pub fn series_from_closed_form_exact(f: &StarKernelClosedForm, alpha: &BigRational, truncation: usize) -> Vec<BigRational> {
    let s = exact::int(2 + 2 * f.level() as i64) + alpha;
    let mut binom = Vec::with_capacity(truncation + 1);
    let mut b = BigRational::one();
    for k in 0..=truncation {
        if k > 0 {
            b = b * (&s + exact::int(k as i64 - 1)) / exact::int(k as i64);
        }
        binom.push(b.clone());
    }
    let numerator = f.numerator.eval_alpha(alpha);
    convolve_numerator(&numerator, &binom, truncation + 1, BigRational::zero)
}

/// `|c_{α,n,n}| - Σ_{k<n} |c_{α,n,k}|`, exact at the binary value of `α`.
pub fn rouche_margin_exact(n: usize, alpha: &BigRational) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::InvalidArgument("rouche margin needs n >= 1".into()));
    }
    let c = p_n(n)?.eval_alpha(alpha);
    let lead = c[n].abs();
    Ok(c[..n].iter().fold(lead, |acc, v| acc - v.abs()))
}

/// Positive margin certifies (Rouché, on `|ζ| = 1`) that `p_{α,n}` has all
/// `n` roots in the open unit disk.
pub fn rouche_margin(n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(exact::to_f64(&rouche_margin_exact(n, &exact::from_f64(alpha)?)?))
}

pub const THRESHOLD_RESOLUTION: f64 = 1e-6;
const THRESHOLD_LIMIT: f64 = 1e6;

fn margin_positive(n: usize, alpha: f64) -> Result<bool> {
    Ok(rouche_margin_exact(n, &exact::from_f64(alpha)?)?.is_positive())
}

/// Smallest `α` (to [`THRESHOLD_RESOLUTION`]) with a positive margin there
/// and at the next ten grid points.
pub fn rouche_threshold(n: usize) -> Result<f64> {
    if !(1..=DEFAULT_DEPTH_CAP).contains(&n) {
        return Err(Error::DepthCap {
            requested: n,
            cap: DEFAULT_DEPTH_CAP,
        });
    }
    let step = THRESHOLD_RESOLUTION;
    let stable = |a: f64| -> Result<Option<f64>> {
        for j in 1..=10 {
            let x = a + j as f64 * step;
            if !margin_positive(n, x)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    };
    let mut lo = -1.0 + step;
    if margin_positive(n, lo)? && stable(lo)?.is_none() {
        return Ok(lo);
    }
    loop {
        // coarse doubling from the last failing point
        let mut width = 1.0;
        let mut hi = lo + width;
        while !margin_positive(n, hi)? {
            lo = hi;
            width *= 2.0;
            hi = lo + width;
            if hi > THRESHOLD_LIMIT {
                return Err(Error::ThresholdExhausted(THRESHOLD_LIMIT));
            }
        }
        while hi - lo > step {
            let mid = 0.5 * (lo + hi);
            if margin_positive(n, mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        match stable(hi)? {
            None => return Ok(hi),
            Some(fail) => lo = fail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn base_values() {
        let p = p_base();
        assert_eq!(p.coefficient(0).eval(&int(0)), int(8));
        assert_eq!(p.coefficient(1).eval(&int(0)), int(16));
        assert_eq!(p.coefficient(1).degree(), Some(2));
        assert_eq!(p_n(1).unwrap(), p);
        assert_eq!(p_n(0).unwrap(), AlphaPolynomial::one());
    }

    #[test]
    fn second_level_at_zero() {
        let c = p_n(2).unwrap().eval_alpha(&int(0));
        assert_eq!(c, vec![int(192), int(1152), int(576)]);
        // proportional to 1 + 6ζ + 3ζ²
        assert_eq!(&c[1] / &c[0], int(6));
        assert_eq!(&c[2] / &c[0], int(3));
    }

    #[test]
    fn leading_coefficient_aggregation() {
        let mut p = p_base();
        for m in 1..8i64 {
            let next = star_step(&p);
            let s = RationalPoly::from_ints(&[2 + 2 * m, 1]);
            let s1 = RationalPoly::from_ints(&[3 + 2 * m, 1]);
            let mm = RationalPoly::from_ints(&[m]);
            let bracket = &(&(&(&mm - &s) + &RationalPoly::from_ints(&[m * (m - 1)]))
                - &(&RationalPoly::from_ints(&[2 * m]) * &s))
                + &(&s * &s1);
            let expect = &(&p.coefficient(m as usize) * &bracket) * &RationalPoly::from_ints(&[4]);
            assert_eq!(next.coefficient(m as usize + 1), expect, "m = {m}");
            assert_eq!(next.level(), p.level() + 1);
            assert_eq!(next.zeta_degree(), Some(m as usize + 1));
            p = next;
        }
    }

    #[test]
    fn depth_cap() {
        assert_eq!(p_n(13).unwrap_err(), Error::DepthCap { requested: 13, cap: 12 });
        assert!(p_n_capped(13, 13).is_ok());
    }

    #[test]
    fn degree_law() {
        for n in 1..=8 {
            let p = p_n(n).unwrap();
            assert_eq!(p.coefficients().len(), n + 1);
            assert_eq!(p.coefficient(n).degree(), Some(2 * n));
            for k in 0..n {
                assert!(p.coefficient(k).degree().unwrap() < 2 * n, "n {n} k {k}");
            }
        }
    }

    fn coefficient_map(a: &[BigRational]) -> Vec<BigRational> {
        // aₖ ↦ 4(k+1)² aₖ₊₁, written out independently of the kernels module
        (0..a.len() - 1)
            .map(|k| int(4) * int((k + 1) as i64) * int((k + 1) as i64) * &a[k + 1])
            .collect()
    }

    fn standard_coefficients(alpha: &BigRational, count: usize) -> Vec<BigRational> {
        // Γ(k+α+2)/(k!Γ(α+2)) = ∏_{j=1}^{k} (α+1+j)/j
        let mut out = vec![BigRational::one()];
        for k in 1..count {
            let prev = out[k - 1].clone();
            out.push(prev * (alpha + int(1 + k as i64)) / int(k as i64));
        }
        out
    }

    #[test]
    fn consistency_triangle() {
        for alpha in [int(0), int(1), ratio(5, 2), ratio(-1, 3)] {
            for n in 0..=5usize {
                let form = StarKernelClosedForm::new(n).unwrap();
                let closed = series_from_closed_form_exact(&form, &alpha, 64);
                let mut mapped = standard_coefficients(&alpha, 65 + n);
                for _ in 0..n {
                    mapped = coefficient_map(&mapped);
                }
                assert_eq!(closed, mapped[..65].to_vec(), "alpha {alpha} n {n}");
            }
        }
    }

    #[test]
    fn float_series_examples() {
        let f0 = StarKernelClosedForm::new(0).unwrap();
        let s = series_from_closed_form(&f0, 2.5, 30).unwrap();
        let exact = standard_coefficients(&ratio(5, 2), 31);
        for (a, b) in s.coefficients.iter().zip(&exact) {
            assert!((a / exact::to_f64(b) - 1.0).abs() < 1e-13);
        }
        let f1 = StarKernelClosedForm::new(1).unwrap();
        let s = series_from_closed_form(&f1, 0.0, 30).unwrap();
        for (k, a) in s.coefficients.iter().enumerate() {
            let k = k as f64;
            assert!((a - 4.0 * (k + 1.0).powi(2) * (k + 2.0)).abs() < 1e-9);
        }
        let f3 = StarKernelClosedForm::new(3).unwrap();
        let s = series_from_closed_form(&f3, 1.0, 10).unwrap();
        let p0 = exact::to_f64(&p_n(3).unwrap().eval_alpha(&int(1))[0]);
        assert_eq!(s.coefficients[0], p0);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(rouche_margin(2, 0.0).unwrap(), -768.0);
        for alpha in [-0.5, 0.0, 3.0, 10.0] {
            let m = rouche_margin(1, alpha).unwrap();
            let expect = 4.0 * (2.0 + alpha) * (1.0 + alpha);
            assert!((m - expect).abs() < 1e-9 * expect.abs());
        }
        assert!(rouche_margin(2, 100.0).unwrap() > 0.0);
    }

    #[test]
    fn threshold_examples() {
        let t1 = rouche_threshold(1).unwrap();
        assert_eq!(t1, -1.0 + THRESHOLD_RESOLUTION);
        let t2 = rouche_threshold(2).unwrap();
        assert!(t2 > 0.0);
        assert!(rouche_margin(2, t2).unwrap() > 0.0);
        assert!(rouche_margin(2, t2 - 2.0 * THRESHOLD_RESOLUTION).unwrap() <= 0.0);
        assert!(rouche_margin(2, t2 + 1.0).unwrap() > rouche_margin(2, t2).unwrap());
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(24))]
        #[test]
        fn closed_form_matches_mapped_series(p in -30i64..120, q in 1i64..12, n in 0usize..4) {
            let alpha = ratio(p, q);
            proptest::prop_assume!(alpha > int(-1));
            let form = StarKernelClosedForm::new(n).unwrap();
            let closed = series_from_closed_form_exact(&form, &alpha, 24);
            let mut mapped = standard_coefficients(&alpha, 25 + n);
            for _ in 0..n {
                mapped = coefficient_map(&mapped);
            }
            proptest::prop_assert_eq!(closed, mapped[..25].to_vec());
        }
    }
}
