//! Sample complexity `|X ∩ B_{r*}|` and collision-check complexity
//! `Σ_{x ∈ X ∩ B_{r*}} ‖x‖` of lattice sample sets: closed-form leading
//! terms, the annuli refinement, and exact enumerated values.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::completeness::{CompletenessParams, SampleSet};
use crate::error::{Error, Result};
use crate::lattice::{boundary_tol, EnumerationLimits, LatticeFamily, LatticeSpec};
use crate::math;

/// Unit-ball radius of the unscaled lattice equivalent to `B_{r*}`:
/// `2 f (1 + 1/eps)`.
pub fn theta_bar(covering_radius: f64, eps: f64) -> f64 {
    2.0 * covering_radius * (1.0 + 1.0 / eps)
}

/// Volume of the unit ball in `R^d`.
pub fn ball_volume(d: usize) -> f64 {
    // V_d = V_{d-2} · 2π/d, V_0 = 1, V_1 = 2.
    let (mut v, start) = if d.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// Leading term `V_d · θ^d / √det` of the lattice-point count in a
/// `θ`-ball of the unit lattice.
pub fn leading_sample_term(spec: &LatticeSpec, theta: f64) -> f64 {
    ball_volume(spec.d) * math::powi(theta, spec.d as i32) / spec.cell_volume()
}

/// `|X ∩ B_{r*}|` by enumeration.
pub fn exact_sample_complexity(set: &SampleSet, limits: EnumerationLimits) -> Result<usize> {
    Ok(set.ball(set.params.r_star, limits)?.len())
}

/// `Σ ‖x‖` over `X ∩ B_{r*}` by enumeration.
pub fn exact_cc(set: &SampleSet, limits: EnumerationLimits) -> Result<f64> {
    Ok(set.ball(set.params.r_star, limits)?.iter().map(|p| p.norm).sum())
}

/// `ξ = (d/(d+1))^d`.
pub fn xi(d: usize) -> f64 {
    math::powi(d as f64 / (d as f64 + 1.0), d as i32)
}

/// Improvement factor of the annuli bound over the naive one:
/// `ζ = 1 - (ξ^{d+2} - ξ) / (dξ - (d+1))`.
pub fn zeta(d: usize) -> f64 {
    let x = xi(d);
    let df = d as f64;
    1.0 - (math::powi(x, d as i32 + 2) - x) / (df * x - (df + 1.0))
}

/// Radii `r_i = (d/(d+1))^i · r` for `i = 0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnuliSchedule {
    pub radii: Vec<f64>,
}

impl AnnuliSchedule {
    pub fn new(d: usize, r: f64) -> Self {
        let ratio = d as f64 / (d as f64 + 1.0);
        let mut radii = Vec::with_capacity(d + 1);
        let mut ri = r;
        for _ in 0..=d {
            radii.push(ri);
            ri *= ratio;
        }
        AnnuliSchedule { radii }
    }

    /// Number of annuli, `k = d`.
    pub fn k(&self) -> usize {
        self.radii.len() - 1
    }
}

/// Direct evaluation of `γ = r θ^d + Σ_{i=1}^{k} (r_i - r_{i-1}) θ_i^d` with
/// `θ_i = θ · r_i / r` and `k = d`.
pub fn annuli_gamma(d: usize, r: f64, theta: f64) -> f64 {
    let sched = AnnuliSchedule::new(d, r);
    let di = d as i32;
    let mut gamma = r * math::powi(theta, di);
    for i in 1..=sched.k() {
        let theta_i = theta * sched.radii[i] / r;
        gamma += (sched.radii[i] - sched.radii[i - 1]) * math::powi(theta_i, di);
    }
    gamma
}

/// Leading terms of the naive CC bound `r* · V_d θ̄^d / √det` and of the
/// annuli bound `ζ` times that.
pub fn cc_bounds(spec: &LatticeSpec, params: &CompletenessParams) -> (f64, f64) {
    let theta = theta_bar(spec.covering_radius, params.eps);
    let naive = params.r_star * leading_sample_term(spec, theta);
    (naive, zeta(spec.d) * naive)
}

/// `Σ_{i<k} r_i |X ∩ (B_{r_i} \ B_{r_{i+1}})| + r_k |X ∩ B_{r_k}|` with exact
/// counts: every sample is charged the radius of the smallest schedule ball
/// containing it.
pub fn annuli_exact_bound(set: &SampleSet, limits: EnumerationLimits) -> Result<f64> {
    let sched = AnnuliSchedule::new(set.d(), set.params.r_star);
    let ball = set.ball(set.params.r_star, limits)?;
    Ok(ball
        .iter()
        .map(|p| {
            sched.radii.iter().rev().copied().find(|&r| p.norm <= r + boundary_tol(r)).unwrap_or(set.params.r_star)
        })
        .sum())
}

/// One row of a sample/collision-check complexity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub family: LatticeFamily,
    pub d: usize,
    pub delta: f64,
    pub eps: f64,
    pub theta_bar: f64,
    pub leading_sample_term: f64,
    /// `None` when enumeration was refused by the capacity cap.
    pub exact_count: Option<usize>,
    /// `exact_count - leading_sample_term`; stands in for the lattice-point
    /// discrepancy, which is never computed.
    pub residual: Option<f64>,
    pub cc_exact: Option<f64>,
    pub cc_naive_bound: f64,
    pub cc_annuli_leading: f64,
    pub zeta: f64,
}

impl ComplexityReport {
    pub fn compute(family: LatticeFamily, d: usize, delta: f64, eps: f64, limits: EnumerationLimits) -> Result<Self> {
        let params = CompletenessParams::new(delta, eps)?;
        let set = SampleSet::at_origin(family, d, params)?;
        let theta = theta_bar(set.spec.covering_radius, eps);
        let leading = leading_sample_term(&set.spec, theta);
        let (cc_naive_bound, cc_annuli_leading) = cc_bounds(&set.spec, &params);
        let (exact_count, cc_exact) = match set.ball(params.r_star, limits) {
            Ok(ball) => (Some(ball.len()), Some(ball.iter().map(|p| p.norm).sum())),
            Err(Error::Capacity { .. }) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(ComplexityReport {
            family,
            d,
            delta,
            eps,
            theta_bar: theta,
            leading_sample_term: leading,
            exact_count,
            residual: exact_count.map(|n| n as f64 - leading),
            cc_exact,
            cc_naive_bound,
            cc_annuli_leading,
            zeta: zeta(d),
        })
    }
}

/// One report per `(family, d)`, families outermost, in input order.
/// Rows whose enumeration exceeds the cap carry `None` in the exact fields.
pub fn sweep_report(
    families: &[LatticeFamily],
    dims: &[usize],
    delta: f64,
    eps: f64,
    limits: EnumerationLimits,
) -> Result<Vec<ComplexityReport>> {
    if dims.is_empty() {
        return Err(Error::param("dims", "at least one dimension is required"));
    }
    let mut rows = Vec::with_capacity(families.len() * dims.len());
    for &family in families {
        for &d in dims {
            rows.push(ComplexityReport::compute(family, d, delta, eps, limits)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_bar_examples() {
        assert_eq!(theta_bar(0.3, 2.0), 3.0 * 0.3);
        assert!((theta_bar(2f64.sqrt() / 2.0, 2.0) - 2.121_320_343_559_642).abs() < 1e-12);
        assert!((theta_bar(0.3, 1e12) - 0.6).abs() < 1e-9);
    }

    #[test]
    fn ball_volume_examples() {
        assert!((ball_volume(2) - PI).abs() < 1e-15);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(12) - PI.powi(6) / 720.0).abs() < 1e-13);
        assert!((ball_volume(12) - 1.335_262_768_854_589).abs() < 1e-12);
        assert_eq!(ball_volume(1), 2.0);
    }

    #[test]
    fn leading_term_examples() {
        let z = LatticeSpec::new(LatticeFamily::Zd, 2).unwrap();
        assert!((leading_sample_term(&z, 4.5f64.sqrt()) - PI * 4.5).abs() < 1e-12);
        let a = LatticeSpec::new(LatticeFamily::AdStar, 2).unwrap();
        assert!((leading_sample_term(&a, 2f64.sqrt()) - PI * 2.0 * 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(leading_sample_term(&a, 0.0), 0.0);
    }

    #[test]
    fn xi_and_zeta_examples() {
        assert!((xi(2) - 4.0 / 9.0).abs() < 1e-15);
        assert!((xi(3) - 27.0 / 64.0).abs() < 1e-15);
        assert!((xi(50) - (-1f64).exp()).abs() < 0.01);
        let z2 = 1.0 - 4.0 / 27.0 - 32.0 / 729.0;
        assert!((zeta(2) - z2).abs() < 1e-12);
        assert!((zeta(2) - 0.807_956_104).abs() < 1e-8);
    }

    #[test]
    fn annuli_gamma_d2_by_hand() {
        let g = annuli_gamma(2, 1.0, 1.0);
        assert!((g - (1.0 - 4.0 / 27.0 - 32.0 / 729.0)).abs() < 1e-15);
    }

    #[test]
    fn schedule_is_strictly_decreasing() {
        let s = AnnuliSchedule::new(5, 2.5);
        assert_eq!(s.radii[0], 2.5);
        assert_eq!(s.k(), 5);
        assert!(s.radii.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn exact_counts_d2() {
        let p = CompletenessParams::new(1.0, 2.0).unwrap();
        let lim = EnumerationLimits::default();
        let z = SampleSet::at_origin(LatticeFamily::Zd, 2, p).unwrap();
        assert_eq!(exact_sample_complexity(&z, lim).unwrap(), 13);
        let a = SampleSet::at_origin(LatticeFamily::AdStar, 2, p).unwrap();
        assert_eq!(exact_sample_complexity(&a, lim).unwrap(), 13);
    }

    #[test]
    fn report_marks_capped_rows() {
        let lim = EnumerationLimits { max_points: 100 };
        let r = ComplexityReport::compute(LatticeFamily::Zd, 8, 1.0, 2.0, lim).unwrap();
        assert!(r.exact_count.is_none() && r.cc_exact.is_none() && r.residual.is_none());
        assert!(r.cc_annuli_leading < r.cc_naive_bound);
        assert!(sweep_report(&LatticeFamily::ALL, &[], 1.0, 2.0, lim).is_err());
    }
}
