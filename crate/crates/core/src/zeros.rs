//! Kernel zeros: root finding and argument-principle counting.
//!
//! Two-variable questions reduce to one variable: `B_z(ξ) = B^ω(z̄ξ)`, so
//! the zeros of `B_z` in the unit disk are `ξ = ζ/z̄` for the zeros `ζ` of
//! `B^ω` with `|ζ| < |z|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernels::{self, ClosedKernel, KernelSeries};
use crate::plane::ExpKernelClosedForm;
use crate::quadrature::QuadratureConfig;
use crate::starcalc::{self, StarKernelAt};
use crate::weights::{Domain, RadialWeight};

pub const CLUSTER_TOLERANCE: f64 = 1e-7;
pub const RESIDUAL_THRESHOLD: f64 = 1e-9;
const ZERO_FREE_GRID: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// `|p(ζ)| / Σ|cᵢ||ζ|ⁱ`.
    pub residual: f64,
    pub multiplicity: usize,
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Root", 4)?;
        st.serialize_field("re", &self.value.re)?;
        st.serialize_field("im", &self.value.im)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("multiplicity", &self.multiplicity)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Companion,
    IterativeSimultaneous,
    ArgumentPrinciple,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub roots: Vec<Root>,
    /// `(radius, count)` pairs, radius increasing.
    #[serde(serialize_with = "counts_as_map")]
    pub count_in_radius: Vec<(f64, usize)>,
    pub method: Method,
    pub certified: bool,
}

fn counts_as_map<S: Serializer>(counts: &[(f64, usize)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(counts.len()))?;
    for (r, c) in counts {
        m.serialize_entry(&r.to_string(), c)?;
    }
    m.end()
}

impl ZeroReport {
    fn empty(radius: f64, method: Method) -> Self {
        Self {
            roots: Vec::new(),
            count_in_radius: vec![(radius, 0)],
            method,
            certified: true,
        }
    }

    /// Number of listed roots counted with multiplicity.
    pub fn root_count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Count at the largest recorded radius, or the root count when no radius
    /// was recorded.
    pub fn total_count(&self) -> usize {
        self.count_in_radius.last().map_or_else(|| self.root_count(), |(_, c)| *c)
    }

    /// Counts never decrease as the radius grows.
    pub fn is_monotone(&self) -> bool {
        self.count_in_radius.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub radius: f64,
    pub samples: usize,
    pub refinement_limit: usize,
    /// Smallest accepted `|f/f'| / radius` on the contour.
    pub min_modulus_guard: f64,
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("contour radius {}", self.radius)));
        }
        if self.samples < 64 || !self.samples.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "contour samples must be a power of two >= 64, got {}",
                self.samples
            )));
        }
        if !(self.min_modulus_guard >= 0.0) {
            return Err(Error::InvalidArgument("negative modulus guard".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroConfig {
    pub quadrature: QuadratureConfig,
    pub samples: usize,
    pub refinement_limit: usize,
    pub min_modulus_guard: f64,
    /// Tail tolerance (relative) for truncated series kernels.
    pub series_tol: f64,
    /// On the plane, `B_z` is searched in `|ξ| < plane_search_radius`.
    pub plane_search_radius: f64,
    pub perturbation_step: f64,
    pub max_perturbations: usize,
    pub max_root_iterations: usize,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            samples: 64,
            refinement_limit: 14,
            min_modulus_guard: 1e-6,
            series_tol: 1e-13,
            plane_search_radius: 4.0,
            perturbation_step: 1e-3,
            max_perturbations: 5,
            max_root_iterations: 500,
        }
    }
}

impl ZeroConfig {
    pub fn contour(&self, radius: f64) -> ContourSpec {
        ContourSpec {
            radius,
            samples: self.samples,
            refinement_limit: self.refinement_limit,
            min_modulus_guard: self.min_modulus_guard,
        }
    }
}

/// A function analytic in `|ζ| < analytic_radius()`.
pub trait Analytic: Sync {
    fn value_and_derivative(&self, zeta: Complex64) -> (Complex64, Complex64);
    fn analytic_radius(&self) -> f64;
}

impl Analytic for KernelSeries {
    fn value_and_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        self.horner_with_derivative(zeta)
    }
    fn analytic_radius(&self) -> f64 {
        self.domain_radius
    }
}

impl Analytic for StarKernelAt {
    fn value_and_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        self.eval_with_derivative(zeta)
    }
    fn analytic_radius(&self) -> f64 {
        1.0
    }
}

impl Analytic for ExpKernelClosedForm {
    fn value_and_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        self.eval_with_derivative(zeta)
    }
    fn analytic_radius(&self) -> f64 {
        f64::INFINITY
    }
}

/// Complex polynomial, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly(pub Vec<Complex64>);

impl Analytic for ComplexPoly {
    fn value_and_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        horner2(&self.0, zeta)
    }
    fn analytic_radius(&self) -> f64 {
        f64::INFINITY
    }
}

impl Analytic for ClosedKernel {
    fn value_and_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        match self {
            ClosedKernel::Disk(k) => k.value_and_derivative(zeta),
            ClosedKernel::Plane(k) => k.value_and_derivative(zeta),
        }
    }
    fn analytic_radius(&self) -> f64 {
        match self {
            ClosedKernel::Disk(k) => k.analytic_radius(),
            ClosedKernel::Plane(k) => k.analytic_radius(),
        }
    }
}

fn horner2(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn abs_horner(c: &[Complex64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a.norm())
}

/// `p(z)/p'(z)`, through the reversed polynomial when `|z| > 1`.
fn newton_ratio(c: &[Complex64], z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        let (p, dp) = horner2(c, z);
        return p / dp;
    }
    let m = (c.len() - 1) as f64;
    let y = z.inv();
    let rev: Vec<Complex64> = c.iter().rev().copied().collect();
    let (r, dr) = horner2(&rev, y);
    // p(z) = zᵐ R(1/z),  p'(z) = z^{m-1} (m R - y R')
    z * r / (m * r - y * dr)
}

fn relative_residual(c: &[Complex64], z: Complex64) -> f64 {
    let t = z.norm();
    if t <= 1.0 {
        let scale = abs_horner(c, t);
        return horner2(c, z).0.norm() / scale;
    }
    let rev: Vec<Complex64> = c.iter().rev().copied().collect();
    let y = z.inv();
    horner2(&rev, y).0.norm() / abs_horner(&rev, y.norm())
}

/// Initial guesses on circles read off the upper convex hull of
/// `(i, log|cᵢ|)` (Bini's Newton-polygon start).
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(i, a)| (i, a.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(m);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let k = j - i;
        let r = ((li - lj) / k as f64).exp();
        for s in 0..k {
            let theta = TAU * s as f64 / k as f64 + TAU * i as f64 / m as f64 + sigma;
            out.push(Complex64::from_polar(r, theta));
        }
    }
    out
}

/// Aberth–Ehrlich iteration, then Newton polishing. Returns the raw roots and
/// whether every root met the stopping test.
fn aberth(c: &[Complex64], max_iter: usize) -> (Vec<Complex64>, bool) {
    let m = c.len() - 1;
    let mut z = initial_guesses(c);
    let mut done = vec![false; m];
    let eps = f64::EPSILON;
    for _ in 0..max_iter {
        for k in 0..m {
            if done[k] {
                continue;
            }
            let ratio = newton_ratio(c, z[k]);
            let sum: Complex64 = (0..m).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
            }
            if relative_residual(c, z[k]) <= 4.0 * (m as f64) * eps || w.norm() <= eps * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|d| *d) {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let step = newton_ratio(c, *zk);
            let cand = *zk - step;
            if !step.is_finite() || relative_residual(c, cand) >= relative_residual(c, *zk) {
                break;
            }
            *zk = cand;
        }
    }
    let converged = done.iter().all(|d| *d);
    (z, converged)
}

fn cluster(raw: &[Complex64], c: &[Complex64]) -> Vec<Root> {
    let mut roots: Vec<Root> = Vec::new();
    let mut members: Vec<Vec<Complex64>> = Vec::new();
    for z in raw {
        match roots
            .iter()
            .position(|r| (r.value - z).norm() <= CLUSTER_TOLERANCE * r.value.norm().max(1.0))
        {
            Some(i) => members[i].push(*z),
            None => {
                roots.push(Root {
                    value: *z,
                    residual: 0.0,
                    multiplicity: 1,
                });
                members.push(vec![*z]);
            }
        }
    }
    for (r, m) in roots.iter_mut().zip(&members) {
        r.value = m.iter().sum::<Complex64>() / m.len() as f64;
        r.multiplicity = m.len();
        r.residual = relative_residual(c, r.value);
    }
    roots
}

/// All roots of `Σ cᵢζⁱ`, with multiplicities, and the count in the unit disk.
/// Stalled iterations come back with `certified = false`.
pub fn poly_roots_partial(coeffs: &[Complex64], max_iter: usize) -> Result<ZeroReport> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
    }
    if coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        return Err(Error::InvalidPolynomial("leading coefficient is zero".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
    }
    let zeros_at_origin = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let c = &coeffs[zeros_at_origin..];
    let mut roots = Vec::new();
    if zeros_at_origin > 0 {
        roots.push(Root {
            value: Complex64::new(0.0, 0.0),
            residual: 0.0,
            multiplicity: zeros_at_origin,
        });
    }
    let mut converged = true;
    match c.len() - 1 {
        0 => {}
        1 => {
            let z = -c[0] / c[1];
            roots.push(Root {
                value: z,
                residual: relative_residual(c, z),
                multiplicity: 1,
            });
        }
        _ => {
            let (raw, ok) = aberth(c, max_iter);
            converged = ok;
            roots.extend(cluster(&raw, c));
        }
    }
    let inside = roots.iter().filter(|r| r.value.norm() < 1.0).map(|r| r.multiplicity).sum();
    let certified = converged && roots.iter().all(|r| r.residual < RESIDUAL_THRESHOLD && r.value.is_finite());
    Ok(ZeroReport {
        roots,
        count_in_radius: vec![(1.0, inside)],
        method: Method::IterativeSimultaneous,
        certified,
    })
}

/// [`poly_roots_partial`] with the default iteration cap; a stalled
/// iteration is an error.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<ZeroReport> {
    let iterations = ZeroConfig::default().max_root_iterations;
    let report = poly_roots_partial(coeffs, iterations)?;
    if !report.certified {
        return Err(Error::RootIterationStalled { iterations });
    }
    Ok(report)
}

pub fn poly_roots_real(coeffs: &[f64]) -> Result<ZeroReport> {
    let c: Vec<Complex64> = coeffs.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    poly_roots(&c)
}

fn winding_sum(f: &dyn Analytic, radius: f64, start: usize, stride: usize, n: usize, guard: f64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut j = start;
    while j < n {
        let zeta = Complex64::from_polar(radius, TAU * j as f64 / n as f64);
        let (v, d) = f.value_and_derivative(zeta);
        if v.norm() == 0.0 || !v.is_finite() || !d.is_finite() || (v / d).norm() < guard * radius {
            return Err(Error::ZeroNearContour { radius });
        }
        sum += zeta * d / v;
        j += stride;
    }
    Ok(sum)
}

/// Zeros of `f` in `|ζ| < radius`, with multiplicity, by the argument
/// principle. The trapezoid rule for `(1/2π)∮ ζf'/f dθ` is doubled until the
/// rounded count is unchanged over three consecutive levels.
pub fn count_zeros(f: &dyn Analytic, contour: &ContourSpec) -> Result<usize> {
    contour.validate()?;
    let limit = f.analytic_radius();
    if contour.radius >= limit {
        return Err(Error::AnalyticityViolated {
            radius: contour.radius,
            limit,
        });
    }
    let guard = contour.min_modulus_guard;
    let mut n = contour.samples;
    let mut sum = winding_sum(f, contour.radius, 0, 1, n, guard)?;
    let mut history: Vec<i64> = Vec::new();
    for _ in 0..=contour.refinement_limit {
        let mean = sum / n as f64;
        let rounded = mean.re.round();
        if (mean.re - rounded).abs() < 0.25 && mean.im.abs() < 0.25 {
            history.push(rounded as i64);
        } else {
            history.clear();
        }
        let len = history.len();
        if len >= 3 && history[len - 1] == history[len - 2] && history[len - 2] == history[len - 3] {
            if rounded < 0.0 {
                break;
            }
            return Ok(rounded as usize);
        }
        // add the midpoints of the current grid
        sum += winding_sum(f, contour.radius, 1, 2, 2 * n, guard)?;
        n *= 2;
    }
    Err(Error::ZeroNearContour {
        radius: contour.radius,
    })
}

/// Counts at `radius`, retrying at `radius ± k·step` when the guard trips.
/// Returns the radius actually used.
fn count_with_perturbation(f: &dyn Analytic, radius: f64, cfg: &ZeroConfig) -> Result<(f64, usize)> {
    let mut last = match count_zeros(f, &cfg.contour(radius)) {
        Ok(c) => return Ok((radius, c)),
        Err(e @ Error::ZeroNearContour { .. }) => e,
        Err(e) => return Err(e),
    };
    for k in 1..=cfg.max_perturbations {
        for sign in [1.0, -1.0] {
            let r = radius + sign * k as f64 * cfg.perturbation_step;
            if r <= 0.0 || r >= f.analytic_radius() {
                continue;
            }
            match count_zeros(f, &cfg.contour(r)) {
                Ok(c) => return Ok((r, c)),
                Err(e @ Error::ZeroNearContour { .. }) => last = e,
                Err(e) => return Err(e),
            }
        }
    }
    Err(last)
}

fn search_radius(w: &RadialWeight, z: Complex64, cfg: &ZeroConfig) -> Result<f64> {
    let t = z.norm();
    match w.domain() {
        Domain::Disk => {
            if t >= 1.0 {
                return Err(Error::OutsideDomain { modulus: t, limit: 1.0 });
            }
            Ok(t)
        }
        Domain::Plane => Ok(t * cfg.plane_search_radius),
    }
}

/// Roots `ζ` of the one-variable kernel in `|ζ| < radius`, counted with
/// multiplicity; `count_in_radius` records the radius actually used.
pub fn kernel_zeros_in(w: &RadialWeight, radius: f64, cfg: &ZeroConfig) -> Result<ZeroReport> {
    if radius == 0.0 {
        return Ok(ZeroReport::empty(0.0, Method::ArgumentPrinciple));
    }
    match kernels::closed_kernel(w) {
        Ok(closed) => closed_zeros_in(&closed, radius, cfg),
        Err(Error::NoClosedForm) => series_zeros_in(w, radius, cfg),
        Err(e) => Err(e),
    }
}

fn closed_zeros_in(closed: &ClosedKernel, radius: f64, cfg: &ZeroConfig) -> Result<ZeroReport> {
    let numerator = closed.numerator_in_zeta();
    let mut report = if numerator.len() < 2 {
        ZeroReport::empty(radius, Method::IterativeSimultaneous)
    } else {
        poly_roots_partial(&numerator, cfg.max_root_iterations)?
    };
    report.roots.retain(|r| r.value.norm() < radius);
    let count = report.root_count();
    report.count_in_radius = vec![(radius, count)];
    report.method = Method::IterativeSimultaneous;
    // Cross-check with the argument principle unless a root sits close to the circle.
    let gap = report.roots.iter().map(|r| radius - r.value.norm()).fold(f64::INFINITY, f64::min);
    let nearest_outside = numerator_roots_outside_gap(&numerator, radius, cfg);
    if gap.min(nearest_outside) > 1e-3 * radius && radius < closed.analytic_radius() {
        if let Ok(c) = count_zeros(closed, &cfg.contour(radius)) {
            report.certified &= c == count;
        }
    }
    Ok(report)
}

fn numerator_roots_outside_gap(numerator: &[Complex64], radius: f64, cfg: &ZeroConfig) -> f64 {
    if numerator.len() < 2 {
        return f64::INFINITY;
    }
    match poly_roots_partial(numerator, cfg.max_root_iterations) {
        Ok(r) => r
            .roots
            .iter()
            .filter(|r| r.value.norm() >= radius)
            .map(|r| r.value.norm() - radius)
            .fold(f64::INFINITY, f64::min),
        Err(_) => 0.0,
    }
}

/// Counts for the tail-certified truncation `N` and for `2N` at the same
/// radius. Equal counts mean the truncation does not move zeros across the
/// contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationCounts {
    pub radius: f64,
    pub truncation: usize,
    pub count: usize,
    pub doubled_count: usize,
}

impl TruncationCounts {
    pub fn stable(&self) -> bool {
        self.count == self.doubled_count
    }
}

pub fn truncation_counts(w: &RadialWeight, radius: f64, cfg: &ZeroConfig) -> Result<(KernelSeries, TruncationCounts)> {
    let series = kernels::series_for_modulus(w, radius, cfg.series_tol, &cfg.quadrature)?;
    let (used, count) = count_with_perturbation(&series, radius, cfg)?;
    let doubled = kernels::kernel_series(w, 2 * series.truncation(), &cfg.quadrature)?;
    let doubled_count = count_zeros(&doubled, &cfg.contour(used))?;
    let counts = TruncationCounts {
        radius: used,
        truncation: series.truncation(),
        count,
        doubled_count,
    };
    Ok((series, counts))
}

fn series_zeros_in(w: &RadialWeight, radius: f64, cfg: &ZeroConfig) -> Result<ZeroReport> {
    let (series, counts) = match truncation_counts(w, radius, cfg) {
        Ok(v) => v,
        Err(Error::ZeroNearContour { .. }) => {
            return Ok(ZeroReport {
                roots: Vec::new(),
                count_in_radius: Vec::new(),
                method: Method::ArgumentPrinciple,
                certified: false,
            })
        }
        Err(e) => return Err(e),
    };
    let (used, count) = (counts.radius, counts.count);
    let mut roots = Vec::new();
    let mut located = count == 0;
    if count > 0 {
        let c: Vec<Complex64> = series.coefficients.iter().map(|a| Complex64::new(*a, 0.0)).collect();
        if let Ok(mut r) = poly_roots_partial(&c, cfg.max_root_iterations) {
            r.roots.retain(|x| x.value.norm() < used);
            located = r.root_count() == count && r.certified;
            roots = r.roots;
        }
    }
    Ok(ZeroReport {
        roots,
        count_in_radius: vec![(used, count)],
        method: Method::ArgumentPrinciple,
        certified: located && used == radius && counts.stable(),
    })
}

/// Zeros of `B_z(ξ)` in the unit disk (disk weights) or in
/// `|ξ| < plane_search_radius` (plane weights).
pub fn zeros_of_bz(w: &RadialWeight, z: Complex64, cfg: &ZeroConfig) -> Result<ZeroReport> {
    if z.norm() == 0.0 {
        return Ok(ZeroReport::empty(0.0, Method::ArgumentPrinciple));
    }
    let radius = search_radius(w, z, cfg)?;
    let mut report = kernel_zeros_in(w, radius, cfg)?;
    let zc = z.conj();
    for r in &mut report.roots {
        r.value /= zc;
    }
    Ok(report)
}

/// `|ζₙ|`, the largest root modulus of `p_{α,n}`, when all roots lie in the disk.
pub fn largest_zero_modulus(n: usize, alpha: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidArgument("largest_zero_modulus needs n >= 1".into()));
    }
    let form = starcalc::StarKernelClosedForm::new(n)?;
    let at = form.at(&crate::exact::Param::from_f64(alpha)?);
    let report = poly_roots_real(&at.coefficients)?;
    let largest = report.roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    if largest >= 1.0 {
        return Err(Error::RootsNotAllInsideDisk { largest });
    }
    Ok(largest)
}

/// Largest `r` on a `1e-4` grid with `Σ_{n≥1} aₙrⁿ + tail(r) < a₀`; then
/// `|B(ζ) - a₀| < a₀` for `|ζ| ≤ r`, so `B_z` has no zeros when `|z| < r`.
pub fn zero_free_radius(w: &RadialWeight, cfg: &ZeroConfig) -> Result<f64> {
    if w.domain() != Domain::Disk {
        return Err(Error::InvalidArgument("zero_free_radius is defined for disk weights".into()));
    }
    let series = kernels::kernel_series(w, kernels::DEFAULT_TRUNCATION, &cfg.quadrature)?;
    let a0 = series.coefficients[0];
    let holds = |r: f64| -> bool {
        match series.tail_bound(r) {
            Some(tail) => series.abs_sum(r) - a0 + tail < a0,
            None => false,
        }
    };
    let steps = (1.0 / ZERO_FREE_GRID).round() as usize;
    if !holds(ZERO_FREE_GRID) {
        return Err(Error::TailNotCertifiable);
    }
    let (mut lo, mut hi) = (1usize, steps);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if holds(mid as f64 * ZERO_FREE_GRID) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo as f64 * ZERO_FREE_GRID)
}

/// Zero reports of `B_z` at `z = r` for each radius (rotation plays no role).
pub fn zero_map_reports(w: &RadialWeight, radii: &[f64], cfg: &ZeroConfig) -> Result<Vec<ZeroReport>> {
    let upper = match w.domain() {
        Domain::Disk => 1.0,
        Domain::Plane => f64::INFINITY,
    };
    if radii.iter().any(|r| !(*r > 0.0 && *r < upper)) {
        return Err(Error::InvalidArgument(format!("radii must lie in (0, {upper})")));
    }
    if radii.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    radii
        .par_iter()
        .map(|r| zeros_of_bz(w, Complex64::new(*r, 0.0), cfg))
        .collect()
}

/// `(radius, count)` table.
pub fn zero_map(w: &RadialWeight, radii: &[f64], cfg: &ZeroConfig) -> Result<Vec<(f64, usize)>> {
    let reports = zero_map_reports(w, radii, cfg)?;
    Ok(radii.iter().copied().zip(reports.iter().map(ZeroReport::total_count)).collect())
}

/// Given a zero `(z₀, ξ₀)` of `B_{z₀}`, evaluates `B_w(conj(z₀/w)ξ₀)` for each
/// `w` and returns the largest value relative to `B(|z̄₀ξ₀|)`, which bounds
/// `|B|` on that circle (the coefficients are positive).
pub fn pair_vanishing(
    w: &RadialWeight,
    z0: Complex64,
    xi0: Complex64,
    points: &[Complex64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let scale = kernels::kernel_value(w, Complex64::new((z0.conj() * xi0).norm(), 0.0), cfg)?.norm();
    let mut worst = 0.0f64;
    for p in points {
        if p.norm() <= z0.norm() {
            return Err(Error::InvalidArgument(format!("|w| = {} must exceed |z0| = {}", p.norm(), z0.norm())));
        }
        let v = kernels::bz(w, *p, (z0 / p).conj() * xi0, cfg)?;
        worst = worst.max(v.norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted_re(r: &ZeroReport) -> Vec<f64> {
        let mut v: Vec<f64> = r.roots.iter().map(|x| x.value.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn quadratic_from_the_counterexample() {
        let r = poly_roots_real(&[1.0, 6.0, 3.0]).unwrap();
        let s6 = 6f64.sqrt() / 3.0;
        let v = sorted_re(&r);
        assert!((v[0] - (-1.0 - s6)).abs() < 1e-14);
        assert!((v[1] - (-1.0 + s6)).abs() < 1e-14);
        assert_eq!(r.count_in_radius, vec![(1.0, 1)]);
        assert!(r.certified);
    }

    #[test]
    fn linear_and_monomial() {
        let r = poly_roots_real(&[1.0, 5.0]).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0].value - c(-0.2)).norm() < 1e-16);
        let r = poly_roots_real(&[0.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(r.roots, vec![Root { value: c(0.0), residual: 0.0, multiplicity: 4 }]);
        assert!(poly_roots_real(&[1.0, 0.0]).is_err());
        assert!(poly_roots_real(&[1.0]).is_err());
    }

    #[test]
    fn roots_of_unity_and_double_root() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 13];
        coeffs[0] = c(-1.0);
        coeffs[12] = c(1.0);
        let r = poly_roots(&coeffs).unwrap();
        assert_eq!(r.roots.len(), 12);
        for root in &r.roots {
            assert!((root.value.norm() - 1.0).abs() < 1e-14);
            assert!((root.value.powu(12) - 1.0).norm() < 1e-13);
        }
        // (ζ - 2)² (ζ + 0.5)
        let r = poly_roots_real(&[2.0, 2.0, -3.5, 1.0]).unwrap();
        assert_eq!(r.root_count(), 3);
        let double = r.roots.iter().find(|x| x.multiplicity == 2).expect("double root clustered");
        assert!((double.value - c(2.0)).norm() < 1e-7);
    }

    #[test]
    fn wide_dynamic_range() {
        // (ζ - 1e-3)(ζ - 1)(ζ - 1e3)
        let r = poly_roots_real(&[-1.0, 1001.001, -1001.001, 1.0]).unwrap();
        let v = sorted_re(&r);
        for (got, want) in v.iter().zip([1e-3, 1.0, 1e3]) {
            assert!((got / want - 1.0).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn count_examples() {
        let std0 = kernels::closed_kernel(&RadialWeight::standard(0.0).unwrap()).unwrap();
        let cfg = ZeroConfig::default();
        assert_eq!(count_zeros(&std0, &cfg.contour(0.9)).unwrap(), 0);
        let star0 = kernels::closed_kernel(&RadialWeight::standard(0.0).unwrap().star()).unwrap();
        assert_eq!(count_zeros(&star0, &cfg.contour(0.9)).unwrap(), 1);
        assert_eq!(count_zeros(&star0, &cfg.contour(0.4)).unwrap(), 0);
        let p02 = kernels::closed_kernel(&RadialWeight::standard(0.0).unwrap().star_n(2)).unwrap();
        assert_eq!(count_zeros(&p02, &cfg.contour(0.5)).unwrap(), 1);
        assert_eq!(count_zeros(&p02, &cfg.contour(0.95)).unwrap(), 1);
        assert!(matches!(
            count_zeros(&p02, &cfg.contour(1.0)),
            Err(Error::AnalyticityViolated { .. })
        ));
        assert!(matches!(
            count_zeros(&star0, &cfg.contour(0.5)),
            Err(Error::ZeroNearContour { .. })
        ));
        let bad = ContourSpec { samples: 100, ..cfg.contour(0.5) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zeros_of_bz_examples() {
        let cfg = ZeroConfig::default();
        let w = RadialWeight::standard(0.0).unwrap().star();
        assert_eq!(zeros_of_bz(&w, c(0.0), &cfg).unwrap().total_count(), 0);
        let z = Complex64::from_polar(0.75, 0.6);
        let r = zeros_of_bz(&w, z, &cfg).unwrap();
        assert_eq!(r.total_count(), 1);
        assert!((r.roots[0].value - c(-0.5) / z.conj()).norm() < 1e-14);
        assert!(r.certified);
        assert_eq!(zeros_of_bz(&w, Complex64::new(0.0, 0.4), &cfg).unwrap().total_count(), 0);
        assert_eq!(zeros_of_bz(&w, c(0.5 - 1e-6), &cfg).unwrap().total_count(), 0);
        assert_eq!(zeros_of_bz(&w, c(0.5 + 1e-6), &cfg).unwrap().total_count(), 1);
        assert!(zeros_of_bz(&w, c(1.0), &cfg).is_err());
    }

    #[test]
    fn series_route_agrees_with_closed_form() {
        let cfg = ZeroConfig::default();
        // the same density as star(std:0), hidden behind a custom weight
        let q = &cfg.quadrature;
        let custom = RadialWeight::custom(Domain::Disk, "poly", |r| {
            let s = r * r;
            0.25 * (s - 1.0 - s.ln())
        }, q)
        .unwrap();
        for (radius, expect) in [(0.3, 0), (0.7, 1), (0.9, 1)] {
            let r = zeros_of_bz(&custom, c(radius), &cfg).unwrap();
            assert_eq!(r.total_count(), expect, "radius {radius}");
            assert_eq!(r.method, Method::ArgumentPrinciple);
            if expect == 1 {
                assert!((r.roots[0].value.re * radius + 0.5).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn largest_modulus_examples() {
        assert!((largest_zero_modulus(1, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            largest_zero_modulus(2, 0.0),
            Err(Error::RootsNotAllInsideDisk { largest }) if (largest - 1.816_496_58).abs() < 1e-8
        ));
        let alpha = starcalc::rouche_threshold(2).unwrap() + 1.0;
        let m = largest_zero_modulus(2, alpha).unwrap();
        assert!(m > 0.0 && m < 1.0);
        let w = RadialWeight::standard(alpha).unwrap().star_n(2);
        let r = zeros_of_bz(&w, c(0.5 * (m + 1.0)), &ZeroConfig::default()).unwrap();
        assert_eq!(r.total_count(), 2);
    }

    #[test]
    fn zero_free_radius_examples() {
        let cfg = ZeroConfig::default();
        let std0 = RadialWeight::standard(0.0).unwrap();
        let r = zero_free_radius(&std0, &cfg).unwrap();
        assert!((r - 0.2928).abs() < 1e-9, "{r}");
        let star0 = std0.star();
        let r = zero_free_radius(&star0, &cfg).unwrap();
        assert!(r > 0.0 && r <= 0.5);
        assert_eq!(zeros_of_bz(&star0, c(r), &cfg).unwrap().total_count(), 0);
    }

    #[test]
    fn zero_map_examples() {
        let cfg = ZeroConfig::default();
        let w = RadialWeight::standard(0.0).unwrap().star();
        assert_eq!(zero_map(&w, &[0.25, 0.75], &cfg).unwrap(), vec![(0.25, 0), (0.75, 1)]);
        assert!(zero_map(&w, &[0.5, 0.25], &cfg).is_err());
        assert!(zero_map(&w, &[0.5, 1.0], &cfg).is_err());
    }

    #[test]
    fn pair_vanishing_at_detected_zero() {
        let w = RadialWeight::standard(1.0).unwrap().star();
        let z0 = Complex64::from_polar(0.6, 1.0);
        let report = zeros_of_bz(&w, z0, &ZeroConfig::default()).unwrap();
        let xi0 = report.roots[0].value;
        let pts: Vec<Complex64> = (0..20).map(|k| Complex64::from_polar(0.61 + 0.019 * k as f64, 0.3 * k as f64)).collect();
        let worst = pair_vanishing(&w, z0, xi0, &pts, &QuadratureConfig::default()).unwrap();
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn report_json_shape() {
        let r = poly_roots_real(&[1.0, 5.0]).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["roots"][0]["re"], -0.2);
        assert_eq!(v["count_in_radius"]["1"], 1);
        assert_eq!(v["method"], "iterative_simultaneous");
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(64))]
        #[test]
        fn roots_of_products_are_recovered(
            raw in proptest::collection::vec((0.2f64..1.8, 0.0f64..std::f64::consts::TAU), 1..8)
        ) {
            // keep the roots apart so clustering cannot merge them
            let mut zs: Vec<Complex64> = Vec::new();
            for (m, a) in raw {
                let z = Complex64::from_polar(m, a);
                if zs.iter().all(|w| (w - z).norm() > 0.05) {
                    zs.push(z);
                }
            }
            let mut poly = vec![c(1.0)];
            for z in &zs {
                let mut next = vec![c(0.0); poly.len() + 1];
                for (i, a) in poly.iter().enumerate() {
                    next[i] -= a * z;
                    next[i + 1] += a;
                }
                poly = next;
            }
            let report = poly_roots(&poly).unwrap();
            proptest::prop_assert_eq!(report.root_count(), zs.len());
            for z in &zs {
                let best = report.roots.iter().map(|r| (r.value - z).norm()).fold(f64::INFINITY, f64::min);
                proptest::prop_assert!(best < 1e-8, "root {} missed by {}", z, best);
            }
        }
    }
}
