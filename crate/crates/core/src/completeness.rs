//! `(delta, eps)`-completeness parameters and the scaled lattice sample sets
//! that achieve them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{self, EnumerationLimits, IntegerVector, LatticeFamily, LatticePoint, LatticeSpec};
use crate::math;

/// Clearance `delta`, stretch `eps`, and the cover radius `beta*` and
/// connection radius `r*` they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessParams {
    pub delta: f64,
    pub eps: f64,
    pub beta_star: f64,
    pub r_star: f64,
}

impl CompletenessParams {
    /// `beta* = δε/√(1+ε²)`, `r* = 2δ(1+ε)/√(1+ε²)`.
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::param("delta", "must be positive and finite"));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::param("eps", "must be positive and finite"));
        }
        let root = math::sqrt(1.0 + eps * eps);
        Ok(CompletenessParams { delta, eps, beta_star: delta * eps / root, r_star: 2.0 * delta * (1.0 + eps) / root })
    }
}

/// A `beta*`-cover of `R^d`: `translation + v · (scale · G)` for all integer `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub spec: LatticeSpec,
    pub params: CompletenessParams,
    /// `w = beta* / f`, so the scaled covering radius is exactly `beta*`.
    pub scale: f64,
    pub translation: Vec<f64>,
}

impl SampleSet {
    pub fn new(family: LatticeFamily, d: usize, params: CompletenessParams, translation: Vec<f64>) -> Result<Self> {
        let spec = LatticeSpec::new(family, d)?;
        if translation.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: translation.len() });
        }
        let scale = params.beta_star / spec.covering_radius;
        Ok(SampleSet { spec, params, scale, translation })
    }

    /// Sample set anchored at the origin.
    pub fn at_origin(family: LatticeFamily, d: usize, params: CompletenessParams) -> Result<Self> {
        Self::new(family, d, params, vec![0.0; d])
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    pub fn family(&self) -> LatticeFamily {
        self.spec.family
    }

    /// Position of the sample with coefficients `v`.
    pub fn sample(&self, v: &IntegerVector) -> Vec<f64> {
        let mut p = self.spec.position(v, self.scale);
        for (x, t) in p.iter_mut().zip(&self.translation) {
            *x += t;
        }
        p
    }

    /// Samples within `radius` of the anchor, as offsets (no translation).
    pub fn ball(&self, radius: f64, limits: EnumerationLimits) -> Result<Vec<LatticePoint>> {
        lattice::enumerate_ball(&self.spec, self.scale, radius, limits)
    }

    /// Samples (translated) inside an axis-aligned box.
    pub fn in_box(&self, lo: &[f64], hi: &[f64], limits: EnumerationLimits) -> Result<Vec<LatticePoint>> {
        lattice::enumerate_box(&self.spec, self.scale, &self.translation, lo, hi, limits)
    }

    pub fn count_in_box(&self, lo: &[f64], hi: &[f64], limits: EnumerationLimits) -> Result<usize> {
        lattice::count_in_box(&self.spec, self.scale, &self.translation, lo, hi, limits)
    }

    /// Offsets of every sample within `r*` of a sample, excluding itself.
    pub fn neighbor_template(&self, limits: EnumerationLimits) -> Result<NeighborTemplate> {
        let ball = self.ball(self.params.r_star, limits)?;
        let (offsets, int_offsets) =
            ball.into_iter().filter(|p| !p.int_vec.is_zero()).map(|p| (p.position, p.int_vec)).unzip();
        Ok(NeighborTemplate { offsets, int_offsets })
    }
}

/// Neighbour offsets `N_0` of the origin; the neighbours of any sample `x`
/// are `x + N_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTemplate {
    pub offsets: Vec<Vec<f64>>,
    pub int_offsets: Vec<IntegerVector>,
}

impl NeighborTemplate {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_for_delta_1_eps_2() {
        let p = CompletenessParams::new(1.0, 2.0).unwrap();
        assert!((p.beta_star - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((p.r_star - 6.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((p.beta_star - 0.894_427_191).abs() < 1e-9);
        assert!((p.r_star - 2.683_281_573).abs() < 1e-9);
        assert!(p.r_star > 2.0 * p.beta_star);
    }

    #[test]
    fn params_scale_linearly_in_delta() {
        let a = CompletenessParams::new(0.7, 3.0).unwrap();
        let b = CompletenessParams::new(1.4, 3.0).unwrap();
        assert_eq!(b.beta_star, 2.0 * a.beta_star);
        assert_eq!(b.r_star, 2.0 * a.r_star);
    }

    #[test]
    fn large_eps_limit() {
        let p = CompletenessParams::new(1.0, 1e6).unwrap();
        assert!((p.beta_star - 1.0).abs() < 1e-5);
        assert!((p.r_star - 2.0).abs() / 2.0 < 1e-5);
    }

    #[test]
    fn non_positive_inputs_are_rejected() {
        assert!(CompletenessParams::new(0.0, 1.0).is_err());
        assert!(CompletenessParams::new(1.0, -1.0).is_err());
        assert!(CompletenessParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn scales_match_explicit_formulas() {
        let p = CompletenessParams::new(1.0, 2.0).unwrap();
        let b = p.beta_star;
        for d in 2..=9 {
            let df = d as f64;
            let z = SampleSet::at_origin(LatticeFamily::Zd, d, p).unwrap();
            assert!((z.scale - 2.0 * b / df.sqrt()).abs() < 1e-12);
            let ds = SampleSet::at_origin(LatticeFamily::DdStar, d, p).unwrap();
            let want = if d % 2 == 1 { 4.0 * b / (2.0 * df - 1.0).sqrt() } else { (8.0 / df).sqrt() * b };
            assert!((ds.scale - want).abs() < 1e-12);
            let a = SampleSet::at_origin(LatticeFamily::AdStar, d, p).unwrap();
            let want = (12.0 * (df + 1.0) / (df * (df + 2.0))).sqrt() * b;
            assert!((a.scale - want).abs() < 1e-12);
        }
        let z2 = SampleSet::at_origin(LatticeFamily::Zd, 2, p).unwrap();
        assert!((z2.scale - 1.264_911_064).abs() < 1e-9);
        let a3 = SampleSet::at_origin(LatticeFamily::AdStar, 3, p).unwrap();
        assert!((a3.scale - b * 4.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn template_z2() {
        let p = CompletenessParams::new(1.0, 2.0).unwrap();
        let set = SampleSet::at_origin(LatticeFamily::Zd, 2, p).unwrap();
        let t = set.neighbor_template(EnumerationLimits::default()).unwrap();
        assert_eq!(t.len(), 12);
        for (o, v) in t.offsets.iter().zip(&t.int_offsets) {
            assert!(math::norm(o) <= p.r_star + lattice::boundary_tol(p.r_star));
            assert!(t.int_offsets.contains(&v.neg()));
        }
    }

    #[test]
    fn translation_dimension_is_checked() {
        let p = CompletenessParams::new(1.0, 2.0).unwrap();
        assert!(SampleSet::new(LatticeFamily::Zd, 3, p, vec![0.0; 2]).is_err());
    }
}
