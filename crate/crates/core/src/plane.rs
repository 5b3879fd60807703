//! Segal–Bargmann analogues on the plane: Gaussian weights `γe^{-γ|z|²}`,
//! the kernel `e^{γζ}`, and its star iterates
//! `B = (4γ)ⁿ qₙ(γζ) e^{γζ}` with `qₙ` monic of degree `n`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::checks::{CheckOutcome, PolynomialFunction, Relation};
use crate::error::{Error, Result};
use crate::exact::{self, Param};
use crate::quadrature::{self, QuadratureConfig};
use crate::starcalc::DEFAULT_DEPTH_CAP;
use crate::zeros::{self, Method, ZeroReport};

/// Largest real part of `γζ` before `e^{γζ}` overflows.
const EXP_LIMIT: f64 = 709.0;

/// `e^{γζ}`. Overflow reports the logarithm instead.
pub fn sb_kernel(gamma: f64, zeta: Complex64) -> Result<Complex64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let x = gamma * zeta;
    if x.re > EXP_LIMIT {
        return Err(Error::MagnitudeOverflow {
            log_re: x.re,
            log_im: x.im,
        });
    }
    Ok(x.exp())
}

/// `prefactor · q(γζ) · e^{γζ}` with exact `q` (ascending in `x = γζ`).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpKernelClosedForm {
    pub gamma: Param,
    pub prefactor: BigRational,
    pub polynomial: Vec<BigRational>,
}

impl ExpKernelClosedForm {
    pub fn degree(&self) -> usize {
        self.polynomial.len() - 1
    }

    fn q_and_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        for c in self.polynomial.iter().rev() {
            dq = dq * x + q;
            q = q * x + exact::to_f64(c);
        }
        (q, dq)
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let x = self.gamma.value() * zeta;
        let (q, _) = self.q_and_derivative(x);
        exact::to_f64(&self.prefactor) * q * x.exp()
    }

    /// Value and `ζ`-derivative.
    pub fn eval_with_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let g = self.gamma.value();
        let x = g * zeta;
        let (q, dq) = self.q_and_derivative(x);
        let e = exact::to_f64(&self.prefactor) * x.exp();
        (q * e, g * (q + dq) * e)
    }

    /// Coefficients of `q(γζ)` in powers of `ζ` (the zero-carrying factor).
    pub fn polynomial_in_zeta(&self) -> Vec<f64> {
        let mut gk = BigRational::one();
        self.polynomial
            .iter()
            .map(|c| {
                let v = exact::to_f64(&(c * &gk));
                gk *= self.gamma.rational();
                v
            })
            .collect()
    }

    /// Taylor coefficients `0..=N` in `ζ`, exactly.
    pub fn taylor_exact(&self, truncation: usize) -> Vec<BigRational> {
        let g = self.gamma.rational();
        let mut gk = BigRational::one();
        (0..=truncation)
            .map(|k| {
                // [x^k] q(x)e^x = Σ_j q_j / (k-j)!
                let s = self
                    .polynomial
                    .iter()
                    .enumerate()
                    .take(k + 1)
                    .fold(BigRational::zero(), |acc, (j, qj)| acc + qj / exact::factorial(k - j));
                let v = &self.prefactor * s * &gk;
                gk *= g;
                v
            })
            .collect()
    }
}

/// `n`-fold star iterate of the Gaussian kernel, factored exactly.
///
/// After `n` applications of `aₖ ↦ 4(k+1)²aₖ₊₁` to `γᵏ/k!`, the quantity
/// `P(k) = aₖ k! / ((4γ)ⁿ γᵏ)` is a degree-`n` polynomial in `k`. Written in
/// falling factorials `P(k) = Σ qⱼ k(k-1)…(k-j+1)`, one gets
/// `Σ aₖζᵏ = (4γ)ⁿ Σ qⱼ xʲ eˣ`, and `qⱼ = ΔʲP(0) / j!`.
pub fn sb_star_iterate(gamma: &Param, n: usize) -> Result<ExpKernelClosedForm> {
    if n > DEFAULT_DEPTH_CAP {
        return Err(Error::DepthCap {
            requested: n,
            cap: DEFAULT_DEPTH_CAP,
        });
    }
    let g = gamma.rational();
    if g <= &BigRational::zero() {
        return Err(Error::GammaOutOfRange(gamma.value()));
    }
    // P(k) for k = 0..=n: each map step contributes 4(k+j)² (γ/(k+j)) / (4γ)
    let p: Vec<BigRational> = (0..=n)
        .map(|k| {
            (1..=n).fold(BigRational::one(), |acc, j| acc * exact::int((k + j) as i64))
        })
        .collect();
    let mut diffs = p;
    let mut q = Vec::with_capacity(n + 1);
    for j in 0..=n {
        q.push(&diffs[0] / exact::factorial(j));
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let prefactor = num_traits::pow(exact::int(4) * g, n);
    Ok(ExpKernelClosedForm {
        gamma: gamma.clone(),
        prefactor,
        polynomial: q,
    })
}

/// The `n` zeros of the `n`-th iterate, `ζ = x/γ` for the roots `x` of `qₙ`.
pub fn sb_zeros(gamma: &Param, n: usize) -> Result<ZeroReport> {
    if n < 1 {
        return Err(Error::InvalidArgument("sb_zeros needs n >= 1".into()));
    }
    let form = sb_star_iterate(gamma, n)?;
    let coeffs: Vec<Complex64> = form.polynomial_in_zeta().into_iter().map(|c| Complex64::new(c, 0.0)).collect();
    let mut report = zeros::poly_roots(&coeffs)?;
    let reach = report.roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let radius = (2.0 * reach + 1.0).ceil();
    report.count_in_radius = vec![(radius, report.root_count())];
    report.method = Method::IterativeSimultaneous;
    Ok(report)
}

/// `‖f‖` on `F^p_γ` with the weight `(γp/2)e^{-(γp/2)|ξ|²}` (probability
/// normalized); `p = ∞` is the grid supremum of `|f(ξ)|e^{-(γ/2)|ξ|²}`.
pub fn fock_norm(gamma: f64, p: f64, f: &PolynomialFunction, cfg: &QuadratureConfig) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidExponent(p));
    }
    let d = f.degree() as f64;
    if p.is_infinite() {
        // |f| e^{-γr²/2} is below 1e-300 · max beyond this radius
        let top = (2.0 * (700.0 + d * 10.0) / gamma).sqrt() + 1.0;
        let mut best = 0.0f64;
        let radial = 2048;
        let angular = 256;
        for i in 0..=radial {
            let r = top * i as f64 / radial as f64;
            let damp = (-0.5 * gamma * r * r).exp();
            for j in 0..angular {
                let xi = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / angular as f64);
                best = best.max(f.eval(xi).norm() * damp);
            }
        }
        return Ok(best);
    }
    let c = 0.5 * gamma * p;
    let top = quadrature::plane_cutoff(c, cfg.abs_tol.max(1e-300), p * d, 0.0);
    let samples = (8 * (f.degree() + 1)).next_power_of_two().max(256);
    let est = quadrature::integrate(
        |r: f64| {
            let m = quadrature::angular_mean(|t| f.eval(Complex64::from_polar(r, t)).norm().powf(p), samples);
            2.0 * c * r * (-c * r * r).exp() * m
        },
        0.0,
        top,
        cfg,
    )?;
    Ok(est.value.powf(1.0 / p))
}

/// Checks `|f(z)| ≤ e^{(γ/2)|z|²} ‖f‖_{F^p_γ}` for `0 < p ≤ ∞`.
pub fn sb_point_eval_bound(
    gamma: f64,
    z: Complex64,
    p: f64,
    f: &PolynomialFunction,
    cfg: &QuadratureConfig,
) -> Result<CheckOutcome> {
    let mut norm = fock_norm(gamma, p, f, cfg)?;
    if p.is_infinite() {
        // the grid may miss the maximiser; z itself is a valid sample
        norm = norm.max(f.eval(z).norm() * (-0.5 * gamma * z.norm_sqr()).exp());
    }
    let lhs = f.eval(z).norm();
    let rhs = (0.5 * gamma * z.norm_sqr()).exp() * norm;
    Ok(CheckOutcome::compare(
        format!("fock_point_bound(gamma={gamma}, p={p}, z={z})"),
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
        Relation::AtMost,
        1e-8,
    ))
}
