//! Radial weights with their moments and the associated-weight ("star")
//! transform
//!
//! `ω*(r) = ∫_r^1 ω(s) log(s/r) s ds`  (upper limit ∞ on the plane).
//!
//! Moments are `ωₙ = 2∫ r^{2n+1} ω(r) dr`. Closed forms are used for the
//! standard and Gaussian families; star iterates always go through the exact
//! relation `(ω*)ₙ = ωₙ₊₁ / (4(n+1)²)`. Quadrature is the fallback for custom
//! densities and the independent cross-check everywhere else.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Param};
use crate::quadrature::{self, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Disk,
    Plane,
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type CacheKey = (u64, u64, u64, usize, u64);

/// Memoized star densities, one table per iteration level.
#[derive(Default)]
struct DensityCache {
    levels: Mutex<HashMap<(usize, CacheKey), f64>>,
}

#[derive(Clone)]
pub enum WeightKind {
    Standard { alpha: Param },
    Gaussian { gamma: Param },
    StarIterate { base: Box<RadialWeight>, depth: usize },
    Custom { label: String, density: DensityFn },
}

/// A radial weight. Immutable; clones share the density cache.
#[derive(Clone)]
pub struct RadialWeight {
    domain: Domain,
    kind: WeightKind,
    cache: Arc<DensityCache>,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialWeight({self})")
    }
}

impl fmt::Display for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Standard { alpha } => write!(f, "std:{alpha}"),
            WeightKind::Gaussian { gamma } => write!(f, "gauss:{gamma}"),
            WeightKind::StarIterate { base, depth: 1 } => write!(f, "star({base})"),
            WeightKind::StarIterate { base, depth } => write!(f, "star^{depth}({base})"),
            WeightKind::Custom { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

impl PartialEq for RadialWeight {
    fn eq(&self, other: &Self) -> bool {
        if self.domain != other.domain {
            return false;
        }
        match (&self.kind, &other.kind) {
            (WeightKind::Standard { alpha: a }, WeightKind::Standard { alpha: b }) => a == b,
            (WeightKind::Gaussian { gamma: a }, WeightKind::Gaussian { gamma: b }) => a == b,
            (
                WeightKind::StarIterate { base: a, depth: da },
                WeightKind::StarIterate { base: b, depth: db },
            ) => da == db && a == b,
            (WeightKind::Custom { density: a, .. }, WeightKind::Custom { density: b, .. }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl RadialWeight {
    fn new(domain: Domain, kind: WeightKind) -> Self {
        Self {
            domain,
            kind,
            cache: Arc::default(),
        }
    }

    /// `ν_α(z) = (α+1)(1-|z|²)^α` on the disk.
    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(Self::new(Domain::Disk, WeightKind::Standard { alpha: Param::from_f64(alpha)? }))
    }

    pub fn standard_exact(alpha: BigRational) -> Result<Self> {
        if alpha <= -BigRational::one() {
            return Err(Error::AlphaOutOfRange(exact::to_f64(&alpha)));
        }
        Ok(Self::new(Domain::Disk, WeightKind::Standard { alpha: Param::exact(alpha) }))
    }

    /// `ω_γ(z) = γ e^{-γ|z|²}` on the plane.
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(Self::new(Domain::Plane, WeightKind::Gaussian { gamma: Param::from_f64(gamma)? }))
    }

    pub fn gaussian_exact(gamma: BigRational) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Error::GammaOutOfRange(exact::to_f64(&gamma)));
        }
        Ok(Self::new(Domain::Plane, WeightKind::Gaussian { gamma: Param::exact(gamma) }))
    }

    /// A weight given by its radial profile. The density is checked for
    /// non-negativity on a sample grid and for finite positive mass.
    pub fn custom<F>(domain: Domain, label: impl Into<String>, density: F, cfg: &QuadratureConfig) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let w = Self::new(
            domain,
            WeightKind::Custom {
                label: label.into(),
                density: Arc::new(density),
            },
        );
        let top = match domain {
            Domain::Disk => 1.0,
            Domain::Plane => cfg
                .upper_cutoff
                .ok_or_else(|| Error::InvalidWeight("plane custom weights need an upper_cutoff".into()))?,
        };
        for i in 1..256 {
            let r = top * i as f64 / 256.0;
            let v = w.density(r, cfg)?;
            if v < 0.0 || v.is_nan() {
                return Err(Error::InvalidWeight(format!("density is negative at r = {r}: {v}")));
            }
        }
        let mass = moment(&w, 0, cfg)?;
        if !(mass > 0.0) {
            return Err(Error::InvalidWeight("total mass is zero".into()));
        }
        Ok(w)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// The associated weight. Iterates collapse: `star(star^k(w)) = star^{k+1}(w)`.
    pub fn star(&self) -> Self {
        self.star_n(1)
    }

    pub fn star_n(&self, times: usize) -> Self {
        if times == 0 {
            return self.clone();
        }
        let (base, depth) = self.base_and_depth();
        Self::new(
            self.domain,
            WeightKind::StarIterate {
                base: Box::new(base.clone()),
                depth: depth + times,
            },
        )
    }

    /// The non-star base weight and the number of star transforms applied.
    pub fn base_and_depth(&self) -> (&RadialWeight, usize) {
        match &self.kind {
            WeightKind::StarIterate { base, depth } => (base, *depth),
            _ => (self, 0),
        }
    }

    pub fn standard_alpha(&self) -> Option<&Param> {
        match &self.kind {
            WeightKind::Standard { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn gaussian_gamma(&self) -> Option<&Param> {
        match &self.kind {
            WeightKind::Gaussian { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Radius where the density is supported up to (1 on the disk, the
    /// quadrature cutoff on the plane).
    pub(crate) fn upper_radius(&self, cfg: &QuadratureConfig, power: f64, shift: f64) -> Result<f64> {
        match self.domain {
            Domain::Disk => Ok(1.0),
            Domain::Plane => {
                if let Some(c) = cfg.upper_cutoff {
                    return Ok(c);
                }
                match self.base_and_depth().0.kind() {
                    WeightKind::Gaussian { gamma } => {
                        Ok(quadrature::plane_cutoff(gamma.value(), cfg.abs_tol.max(1e-300), power, shift))
                    }
                    _ => Err(Error::InvalidWeight("plane custom weights need an upper_cutoff".into())),
                }
            }
        }
    }

    /// Pointwise density at radius `r`. Star iterates are evaluated by
    /// (nested) adaptive quadrature of the defining integral.
    pub fn density(&self, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::InvalidArgument(format!("negative radius {r}")));
        }
        match &self.kind {
            WeightKind::Standard { alpha } => {
                if r >= 1.0 {
                    return Ok(0.0);
                }
                let a = alpha.value();
                Ok((a + 1.0) * (1.0 - r * r).powf(a))
            }
            WeightKind::Gaussian { gamma } => {
                let g = gamma.value();
                Ok(g * (-g * r * r).exp())
            }
            WeightKind::Custom { density, .. } => {
                if self.domain == Domain::Disk && r >= 1.0 {
                    return Ok(0.0);
                }
                Ok(density(r))
            }
            WeightKind::StarIterate { base, depth } => self.star_density(base, *depth, r, cfg),
        }
    }

    fn star_density(&self, base: &RadialWeight, depth: usize, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if depth == 0 {
            return base.density(r, cfg);
        }
        if r == 0.0 {
            return Err(Error::SingularAtOrigin);
        }
        let top = base.upper_radius(cfg, 1.0, 0.0)?;
        if r >= top {
            return Ok(0.0);
        }
        let key = (
            depth,
            (
                r.to_bits(),
                cfg.abs_tol.to_bits(),
                cfg.rel_tol.to_bits(),
                cfg.max_subdivisions,
                cfg.upper_cutoff.unwrap_or(f64::NAN).to_bits(),
            ),
        );
        if let Some(v) = self.cache.levels.lock().expect("density cache poisoned").get(&key) {
            return Ok(*v);
        }
        let inner_cfg = cfg.relative_only();
        let mut failure = None;
        let est = quadrature::integrate(
            |s: f64| match self.star_density(base, depth - 1, s, cfg) {
                Ok(v) => v * s * (s / r).ln(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            r,
            top,
            &inner_cfg,
        )
        .map_err(|e| Error::NonIntegrable(format!("star density at r = {r}: {e}")))?;
        if let Some(e) = failure {
            return Err(e);
        }
        let value = est.value.max(0.0);
        self.cache.levels.lock().expect("density cache poisoned").insert(key, value);
        Ok(value)
    }
}

/// Where a moment value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    StarRelation,
}

/// `ω₀ … ω_N` for one weight.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    pub weight: RadialWeight,
    pub values: Vec<f64>,
    pub provenance: Vec<Provenance>,
}

impl MomentSequence {
    pub fn max_index(&self) -> Option<usize> {
        self.values.len().checked_sub(1)
    }

    /// Positive finite values; on the disk also monotone decrease.
    pub fn check_invariants(&self) -> Result<()> {
        for (n, v) in self.values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidWeight(format!("moment {n} is {v}")));
            }
        }
        if self.weight.domain() == Domain::Disk {
            for (n, pair) in self.values.windows(2).enumerate() {
                if pair[1] > pair[0] * (1.0 + 1e-12) {
                    return Err(Error::InvalidWeight(format!("disk moments increase at index {}", n + 1)));
                }
            }
        }
        Ok(())
    }
}

fn log10_product(factors: impl Iterator<Item = f64>) -> f64 {
    factors.map(f64::log10).sum()
}

fn checked(index: usize, value: f64, log10: impl FnOnce() -> f64) -> Result<f64> {
    if value.is_finite() && value >= f64::MIN_POSITIVE {
        Ok(value)
    } else if value.is_infinite() {
        Err(Error::MomentOverflow { index, log10: log10() })
    } else {
        Err(Error::MomentUnderflow { index, log10: log10() })
    }
}

/// `ωₙ` of `w`.
pub fn moment(w: &RadialWeight, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    match w.kind() {
        WeightKind::Standard { alpha } => {
            // n! Γ(α+2) / Γ(n+α+2) = ∏ k / (α+1+k)
            let a = alpha.value();
            let value = (1..=n).fold(1.0, |acc, k| acc * k as f64 / (a + 1.0 + k as f64));
            checked(n, value, || log10_product((1..=n).map(|k| k as f64 / (a + 1.0 + k as f64))))
        }
        WeightKind::Gaussian { gamma } => {
            let g = gamma.value();
            let value = (1..=n).fold(1.0, |acc, k| acc * k as f64 / g);
            checked(n, value, || log10_product((1..=n).map(|k| k as f64 / g)))
        }
        WeightKind::StarIterate { base, depth } => {
            let mut value = moment(base, n + depth, cfg)?;
            for j in 1..=*depth {
                let m = (n + j) as f64;
                value /= 4.0 * m * m;
            }
            checked(n, value, || value.log10())
        }
        WeightKind::Custom { .. } => quadrature_moment(w, n, cfg),
    }
}

/// `ωₙ` by direct quadrature of the density, whatever the weight kind.
/// For star iterates this is nested quadrature; it exists as the
/// independent route for cross-checks.
pub fn quadrature_moment(w: &RadialWeight, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let power = (2 * n + 1) as i32;
    let top = w.upper_radius(cfg, power as f64, 0.0)?;
    let mut failure = None;
    let est = quadrature::integrate(
        |r: f64| match w.density(r, cfg) {
            Ok(d) => 2.0 * r.powi(power) * d,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        top,
        &cfg.relative_only(),
    )
    .map_err(|e| Error::NonIntegrable(format!("moment {n} of {w}: {e}")))?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !est.value.is_finite() {
        return Err(Error::NonIntegrable(format!("moment {n} of {w} is not finite")));
    }
    checked(n, est.value, || est.value.abs().log10())
}

/// Exact rational moment, available for every non-custom weight.
pub fn moment_exact(w: &RadialWeight, n: usize) -> Option<BigRational> {
    match w.kind() {
        WeightKind::Standard { alpha } => {
            let a1 = alpha.rational() + BigRational::one();
            let mut acc = BigRational::one();
            for k in 1..=n {
                let k = exact::int(k as i64);
                acc = acc * &k / (&a1 + &k);
            }
            Some(acc)
        }
        WeightKind::Gaussian { gamma } => {
            let g = gamma.rational();
            let mut acc = BigRational::one();
            for k in 1..=n {
                acc = acc * exact::int(k as i64) / g;
            }
            Some(acc)
        }
        WeightKind::StarIterate { base, depth } => {
            let mut acc = moment_exact(base, n + depth)?;
            for j in 1..=*depth {
                let m = exact::int((n + j) as i64);
                acc /= exact::int(4) * &m * &m;
            }
            Some(acc)
        }
        WeightKind::Custom { .. } => None,
    }
}

/// Moments `0..=max_index`, closed form where possible.
pub fn moment_sequence(w: &RadialWeight, max_index: usize, cfg: &QuadratureConfig) -> Result<MomentSequence> {
    let provenance = match w.kind() {
        WeightKind::Standard { .. } | WeightKind::Gaussian { .. } => Provenance::ClosedForm,
        WeightKind::StarIterate { .. } => Provenance::StarRelation,
        WeightKind::Custom { .. } => Provenance::Quadrature,
    };
    let values = (0..=max_index).map(|n| moment(w, n, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(MomentSequence {
        weight: w.clone(),
        provenance: vec![provenance; values.len()],
        values,
    })
}

/// Moments of `ω*` from those of `ω`: entry `n` is `ωₙ₊₁ / (4(n+1)²)`.
pub fn star_moments(base: &MomentSequence) -> Result<MomentSequence> {
    if base.values.len() < 2 {
        return Err(Error::InsufficientMoments {
            needed: 2,
            have: base.values.len(),
        });
    }
    let values: Vec<f64> = base.values[1..]
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let m = (n + 1) as f64;
            v / (4.0 * m * m)
        })
        .collect();
    Ok(MomentSequence {
        weight: base.weight.star(),
        provenance: vec![Provenance::StarRelation; values.len()],
        values,
    })
}

/// Range of `aₖ / bₖ` over `k ≤ max_index`. Bounded ratios are the moment-level
/// surrogate for two weights defining the same space.
pub fn moment_ratio_bounds(
    a: &RadialWeight,
    b: &RadialWeight,
    max_index: usize,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for k in 0..=max_index {
        let r = moment(a, k, cfg)? / moment(b, k, cfg)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn standard_moment_examples() {
        let w0 = RadialWeight::standard(0.0).unwrap();
        assert!((moment(&w0, 5, &cfg()).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let w1 = RadialWeight::standard(1.0).unwrap();
        assert!((moment(&w1, 3, &cfg()).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(moment_exact(&w1, 3).unwrap(), ratio(1, 10));
    }

    #[test]
    fn gaussian_mass_is_one() {
        let g = RadialWeight::gaussian(2.0).unwrap();
        assert_eq!(moment(&g, 0, &cfg()).unwrap(), 1.0);
        let q = quadrature_moment(&g, 0, &cfg()).unwrap();
        assert!((q - 1.0).abs() < 1e-11);
    }

    #[test]
    fn range_errors() {
        assert_eq!(RadialWeight::standard(-1.0).unwrap_err(), Error::AlphaOutOfRange(-1.0));
        assert_eq!(RadialWeight::gaussian(0.0).unwrap_err(), Error::GammaOutOfRange(0.0));
    }

    #[test]
    fn star_of_star_collapses() {
        let w = RadialWeight::standard(0.5).unwrap();
        let a = w.star_n(2).star_n(3);
        assert_eq!(a, w.star_n(5));
        assert_eq!(a.base_and_depth().1, 5);
        assert_eq!(a.to_string(), "star^5(std:1/2)");
    }

    #[test]
    fn star_density_edges() {
        let s = RadialWeight::standard(0.0).unwrap().star();
        assert_eq!(s.density(1.0, &cfg()).unwrap(), 0.0);
        assert_eq!(s.density(0.0, &cfg()).unwrap_err(), Error::SingularAtOrigin);
        // ∫_r^1 s log(s/r) ds = (r² - 1)/4 - r² log(r) / 2 ... evaluated at r = 1/2
        let r: f64 = 0.5;
        let expected = -r.ln() / 2.0 - 0.25 + r * r / 4.0;
        assert!((s.density(r, &cfg()).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn star_moments_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let seq = moment_sequence(&w, 6, &cfg()).unwrap();
        let star = star_moments(&seq).unwrap();
        for (n, v) in star.values.iter().enumerate() {
            let m = (n + 1) as f64;
            let expected = 1.0 / (4.0 * m * m * (n as f64 + 2.0));
            assert!((v / expected - 1.0).abs() < 1e-14);
        }
        let g = RadialWeight::gaussian(1.0).unwrap();
        let gs = star_moments(&moment_sequence(&g, 5, &cfg()).unwrap()).unwrap();
        let mut fact = 1.0;
        for (n, v) in gs.values.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((v / (fact / (4.0 * (n as f64 + 1.0))) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn star_moments_too_short() {
        let w = RadialWeight::standard(0.0).unwrap();
        let seq = moment_sequence(&w, 0, &cfg()).unwrap();
        assert_eq!(
            star_moments(&seq).unwrap_err(),
            Error::InsufficientMoments { needed: 2, have: 1 }
        );
    }

    #[test]
    fn star_relation_matches_moment_of_star_weight() {
        let w = RadialWeight::standard(1.5).unwrap();
        let direct = moment_sequence(&w.star(), 8, &cfg()).unwrap();
        let via = star_moments(&moment_sequence(&w, 9, &cfg()).unwrap()).unwrap();
        for (a, b) in direct.values.iter().zip(&via.values) {
            assert!((a / b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn underflow_is_reported() {
        let w = RadialWeight::standard(100.0).unwrap();
        match moment(&w, 100_000, &cfg()) {
            Err(Error::MomentUnderflow { index, log10 }) => {
                assert_eq!(index, 100_000);
                assert!(log10 < -300.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn custom_weight_moments() {
        // ω(r) = 2 on the disk: ωₙ = 2/(n+1)
        let w = RadialWeight::custom(Domain::Disk, "two", |_| 2.0, &cfg()).unwrap();
        assert!((moment(&w, 3, &cfg()).unwrap() - 0.5).abs() < 1e-12);
        assert!(moment_exact(&w, 3).is_none());
    }

    #[test]
    fn custom_weight_rejections() {
        let neg = RadialWeight::custom(Domain::Disk, "neg", |r| r - 0.5, &cfg());
        assert!(matches!(neg, Err(Error::InvalidWeight(_))));
        let div = RadialWeight::custom(Domain::Disk, "div", |r| 1.0 / (1.0 - r * r), &cfg());
        assert!(matches!(div, Err(Error::NonIntegrable(_))), "{div:?}");
        let plane = RadialWeight::custom(Domain::Plane, "p", |r: f64| (-r * r).exp(), &cfg());
        assert!(matches!(plane, Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn moment_sequence_invariants() {
        for w in [
            RadialWeight::standard(0.0).unwrap(),
            RadialWeight::standard(7.0).unwrap().star_n(2),
            RadialWeight::gaussian(3.0).unwrap().star(),
        ] {
            moment_sequence(&w, 40, &cfg()).unwrap().check_invariants().unwrap();
        }
    }

    #[test]
    fn equivalence_surrogate() {
        for alpha in [0.0, 1.0, 5.0] {
            for n in 1..=3usize {
                let w = RadialWeight::standard(alpha).unwrap().star_n(n);
                let v = RadialWeight::standard(alpha + 2.0 * n as f64).unwrap();
                let (lo, hi) = moment_ratio_bounds(&w, &v, 64, &cfg()).unwrap();
                assert!(lo > 0.0 && hi.is_finite(), "alpha {alpha} n {n}: {lo} {hi}");
                // Ratio tends to a positive constant; it must not drift by orders of magnitude.
                assert!(hi / lo < 1e3, "alpha {alpha} n {n}: {lo} {hi}");
            }
        }
    }
}
