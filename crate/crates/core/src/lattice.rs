//! The three lattice families, the `A*_d` embedding into `R^d`, and
//! exact enumeration of lattice points in balls and axis-aligned boxes.
//!
//! Points follow the row-vector convention: the point with integer
//! coefficients `v` is `v · G`, where row `i` of `G` is basis vector `e_i`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashSet;

use crate::complexity::ball_volume;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Generator matrix, row `i` = basis vector `e_i`.
pub type GeneratorMatrix = Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeFamily {
    /// The integer grid.
    Zd,
    /// The staggered grid: `Z^d` plus the cell centres.
    DdStar,
    /// The dual of `A_d`; the hexagonal lattice at d = 2, BCC at d = 3.
    AdStar,
}

impl LatticeFamily {
    pub const ALL: [LatticeFamily; 3] = [LatticeFamily::Zd, LatticeFamily::DdStar, LatticeFamily::AdStar];

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            LatticeFamily::Zd => "z",
            LatticeFamily::DdStar => "dstar",
            LatticeFamily::AdStar => "astar",
        }
    }
}

impl fmt::Display for LatticeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "zd" => Ok(LatticeFamily::Zd),
            "dstar" | "ddstar" | "d*" => Ok(LatticeFamily::DdStar),
            "astar" | "adstar" | "a*" => Ok(LatticeFamily::AdStar),
            _ => Err(Error::param("family", alloc::format!("unknown lattice family `{s}`"))),
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// The textbook generator of each family.
///
/// `Zd` and `DdStar` are `d × d`. `AdStar` is the raw `d × (d+1)` matrix whose
/// points live on the hyperplane `Σ x_i = 0` of `R^{d+1}`; see
/// [`embedding_matrix`] for the `d × d` form used to produce samples.
pub fn build_generator(family: LatticeFamily, d: usize) -> Result<GeneratorMatrix> {
    check_dim(d)?;
    Ok(match family {
        LatticeFamily::Zd => Matrix::identity(d),
        LatticeFamily::DdStar => {
            let mut g = Matrix::identity(d);
            for c in 0..d {
                g[(d - 1, c)] = 0.5;
            }
            g
        }
        LatticeFamily::AdStar => {
            let mut g = Matrix::zeros(d, d + 1);
            for i in 0..d - 1 {
                g[(i, 0)] = 1.0;
                g[(i, i + 1)] = -1.0;
            }
            let dd = (d + 1) as f64;
            g[(d - 1, 0)] = -(d as f64) / dd;
            for c in 1..=d {
                g[(d - 1, c)] = 1.0 / dd;
            }
            g
        }
    })
}

/// Householder reflector `I - 2 n nᵗ` of size `(d+1) × (d+1)` mapping the
/// hyperplane `Σ x_i = 0` onto `x_{d+1} = 0`.
pub fn householder_reflector(d: usize) -> Result<Matrix> {
    check_dim(d)?;
    let big_d = (d + 1) as f64;
    let c = 1.0 / (big_d - math::sqrt(big_d));
    let s = 1.0 / math::sqrt(big_d);
    let mut p = Matrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            p[(i, j)] = if i == j { 1.0 - c } else { -c };
        }
        p[(i, d)] = s;
        p[(d, i)] = s;
    }
    p[(d, d)] = s;
    Ok(p)
}

/// The `d × (d+1)` projection dropping the last coordinate.
pub fn drop_last_coordinate(d: usize) -> Matrix {
    let mut e = Matrix::zeros(d, d + 1);
    for i in 0..d {
        e[(i, i)] = 1.0;
    }
    e
}

/// Closed-form `d × d` embedding `T` of `A*_d` into `R^d`, acting on column
/// vectors: first row `(1, …, 1, a-1)`, row `k >= 1` has `-1` in column `k-1`
/// and `a` in the last column, with `a = 1 / (d+1 - √(d+1))`.
pub fn embedding_matrix(d: usize) -> Result<Matrix> {
    check_dim(d)?;
    let big_d = (d + 1) as f64;
    let a = 1.0 / (big_d - math::sqrt(big_d));
    let mut t = Matrix::zeros(d, d);
    for c in 0..d - 1 {
        t[(0, c)] = 1.0;
    }
    t[(0, d - 1)] = a - 1.0;
    for r in 1..d {
        t[(r, r - 1)] = -1.0;
        t[(r, d - 1)] = a;
    }
    Ok(t)
}

/// `E · P · Gᵗ` assembled from its factors; equal to [`embedding_matrix`].
pub fn compose_embedding(d: usize) -> Result<Matrix> {
    let g = build_generator(LatticeFamily::AdStar, d)?;
    let p = householder_reflector(d)?;
    let e = drop_last_coordinate(d);
    Ok(&(&e * &p) * &g.transpose())
}

/// Closed-form covering radius of the unit lattice.
pub fn covering_radius(family: LatticeFamily, d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    Ok(match family {
        LatticeFamily::Zd => math::sqrt(df) / 2.0,
        LatticeFamily::DdStar if d % 2 == 1 => math::sqrt(2.0 * df - 1.0) / 4.0,
        LatticeFamily::DdStar => math::sqrt(2.0 * df) / 4.0,
        LatticeFamily::AdStar => math::sqrt(df * (df + 2.0) / (12.0 * (df + 1.0))),
    })
}

/// A lattice family at a fixed dimension, with the `d × d` generator that
/// actually produces points in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub family: LatticeFamily,
    pub d: usize,
    /// Row-form generator: identity, `G_{D*_d}`, or `Tᵗ` for `A*_d`.
    pub generator: GeneratorMatrix,
    pub gram: Matrix,
    pub det_gram: f64,
    pub covering_radius: f64,
}

impl LatticeSpec {
    pub fn new(family: LatticeFamily, d: usize) -> Result<Self> {
        let generator = match family {
            LatticeFamily::AdStar => embedding_matrix(d)?.transpose(),
            _ => build_generator(family, d)?,
        };
        let gram = generator.gram();
        let det_gram = gram.determinant();
        Ok(LatticeSpec { family, d, generator, gram, det_gram, covering_radius: covering_radius(family, d)? })
    }

    /// Volume of a fundamental cell, `√det(G Gᵗ)`.
    pub fn cell_volume(&self) -> f64 {
        math::sqrt(self.det_gram)
    }

    /// Norm of `v · G` evaluated through the Gram quadratic form.
    pub fn quad_norm(&self, v: &IntegerVector) -> f64 {
        assert_eq!(v.len(), self.d);
        let mut acc = 0.0;
        for i in 0..self.d {
            if v.0[i] == 0 {
                continue;
            }
            let row: f64 = (0..self.d).map(|j| self.gram[(i, j)] * v.0[j] as f64).sum();
            acc += v.0[i] as f64 * row;
        }
        math::sqrt(acc.max(0.0))
    }

    /// `v · (scale · G)`.
    pub fn position(&self, v: &IntegerVector, scale: f64) -> Vec<f64> {
        let mut p = self.generator.left_mul_int(&v.0);
        for x in &mut p {
            *x *= scale;
        }
        p
    }

    /// Rough lattice-point count in a ball, used for the capacity guard.
    pub fn estimate_ball_count(&self, scale: f64, radius: f64) -> f64 {
        ball_volume(self.d) * math::powi(radius / scale, self.d as i32) / self.cell_volume()
    }
}

/// Integer coefficient vector; ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerVector(pub Vec<i64>);

impl IntegerVector {
    pub fn zero(d: usize) -> Self {
        IntegerVector(vec![0; d])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &IntegerVector) -> IntegerVector {
        IntegerVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> IntegerVector {
        IntegerVector(self.0.iter().map(|a| -a).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub int_vec: IntegerVector,
    /// Position in `R^d` (including any translation).
    pub position: Vec<f64>,
    /// Distance from the lattice anchor, i.e. `‖v · scale · G‖`.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationLimits {
    /// Refuse enumerations whose estimated point count exceeds this.
    pub max_points: usize,
}

impl EnumerationLimits {
    pub const DEFAULT_CAP: usize = 20_000_000;
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_points: Self::DEFAULT_CAP }
    }
}

/// Membership slack on the ball boundary.
pub fn boundary_tol(radius: f64) -> f64 {
    1e-9 * radius.max(1.0)
}

fn check_ball_args(spec: &LatticeSpec, scale: f64, radius: f64, limits: EnumerationLimits) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::param("scale", "must be positive and finite"));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::param("radius", "must be non-negative and finite"));
    }
    let estimated = spec.estimate_ball_count(scale, radius);
    if estimated > limits.max_points as f64 {
        return Err(Error::Capacity { estimated, cap: limits.max_points });
    }
    Ok(estimated)
}

fn finish_ball(generator: &Matrix, coeffs: Vec<Vec<i64>>) -> Vec<LatticePoint> {
    let mut out: Vec<LatticePoint> = coeffs
        .into_iter()
        .map(|v| {
            let position = generator.left_mul_int(&v);
            let norm = math::norm(&position);
            LatticePoint { int_vec: IntegerVector(v), position, norm }
        })
        .collect();
    out.sort_by(|a, b| a.norm.total_cmp(&b.norm).then_with(|| a.int_vec.cmp(&b.int_vec)));
    out
}

/// All points `v · (scale · G)` with norm at most `radius` (plus
/// [`boundary_tol`]).
///
/// Coefficients are enumerated level by level from the last one down
/// (Fincke-Pohst): after fixing `v_{i+1..d}`, the admissible `v_i` form an
/// interval read off the triangular decomposition of the Gram matrix. Every
/// candidate is then re-checked against its recomputed norm.
///
/// Output is sorted by `(norm, int_vec)` and always contains the origin.
pub fn enumerate_ball(
    spec: &LatticeSpec,
    scale: f64,
    radius: f64,
    limits: EnumerationLimits,
) -> Result<Vec<LatticePoint>> {
    let estimated = check_ball_args(spec, scale, radius, limits)?;
    let d = spec.d;
    let bound = radius + boundary_tol(radius);
    let generator = spec.generator.scaled(scale);

    // v Q vᵗ = Σ_i q[i] (v_i + Σ_{j>i} mu[i][j] v_j)², Q = scale² · gram.
    let mut q = vec![0.0; d];
    let mut mu = vec![vec![0.0; d]; d];
    for i in 0..d {
        let mut qi = scale * scale * spec.gram[(i, i)];
        for k in 0..i {
            qi -= q[k] * mu[k][i] * mu[k][i];
        }
        q[i] = qi;
        for j in i + 1..d {
            let mut m = scale * scale * spec.gram[(i, j)];
            for k in 0..i {
                m -= q[k] * mu[k][i] * mu[k][j];
            }
            mu[i][j] = m / qi;
        }
    }

    // Widen the search slightly; the exact filter below decides membership.
    let mut walk = FinckePohst {
        q: &q,
        mu: &mu,
        generator: &generator,
        bound,
        v: vec![0i64; d],
        found: Vec::with_capacity(estimated as usize + 1),
    };
    walk.level(d - 1, bound * bound * (1.0 + 1e-9) + 1e-12);
    Ok(finish_ball(&generator, walk.found))
}

struct FinckePohst<'a> {
    q: &'a [f64],
    mu: &'a [Vec<f64>],
    generator: &'a Matrix,
    bound: f64,
    v: Vec<i64>,
    found: Vec<Vec<i64>>,
}

impl FinckePohst<'_> {
    fn level(&mut self, lvl: usize, budget: f64) {
        let d = self.v.len();
        let c: f64 = -(lvl + 1..d).map(|j| self.mu[lvl][j] * self.v[j] as f64).sum::<f64>();
        let w = math::sqrt(budget.max(0.0) / self.q[lvl]);
        let lo = math::ceil(c - w - 1e-9) as i64;
        let hi = math::floor(c + w + 1e-9) as i64;
        for x in lo..=hi {
            self.v[lvl] = x;
            let t = x as f64 - c;
            let rest = budget - self.q[lvl] * t * t;
            if lvl == 0 {
                if math::norm(&self.generator.left_mul_int(&self.v)) <= self.bound {
                    self.found.push(self.v.clone());
                }
            } else {
                self.level(lvl - 1, rest);
            }
        }
        self.v[lvl] = 0;
    }
}

/// Layered BFS over `Z^d` from the origin that steps along `±e_i` and only
/// admits neighbours inside the ball, in the style of the classic
/// neighbour-generation routine.
///
/// Exact whenever the lattice points of the ball are connected under unit
/// coefficient steps, which does not always hold: in `D*_5` at unit scale
/// and `R = 1` the point with coefficients `(1, 1, 1, 1, -2)` has norm 1
/// but every unit-step path to it leaves the ball, and `A*_3` at `R = 0.9`
/// loses two of its eight shortest vectors. [`enumerate_ball`] has no
/// such gap; this routine is kept for comparison.
pub fn bfs_ball(spec: &LatticeSpec, scale: f64, radius: f64, limits: EnumerationLimits) -> Result<Vec<LatticePoint>> {
    let estimated = check_ball_args(spec, scale, radius, limits)?;
    let d = spec.d;
    let bound = radius + boundary_tol(radius);
    let generator = spec.generator.scaled(scale);
    // Norms are recomputed from the coefficients rather than accumulated
    // along the BFS path, so boundary decisions do not depend on visit order.
    let norm_of = |v: &[i64]| math::norm(&generator.left_mul_int(v));

    let origin = vec![0i64; d];
    let mut open: VecDeque<Vec<i64>> = VecDeque::new();
    open.push_back(origin.clone());
    let mut open_next: VecDeque<Vec<i64>> = VecDeque::new();
    // Everything ever queued; covers VISITED ∪ OPEN ∪ OPEN_next.
    let mut seen: HashSet<Vec<i64>> = HashSet::with_capacity(estimated as usize + 1);
    seen.insert(origin);
    let mut visited: Vec<Vec<i64>> = Vec::with_capacity(estimated as usize + 1);

    while !open.is_empty() || !open_next.is_empty() {
        if open.is_empty() {
            core::mem::swap(&mut open, &mut open_next);
        }
        let p = open.pop_front().expect("layer is non-empty");
        for i in 0..d {
            for sign in [1i64, -1] {
                let mut next = p.clone();
                next[i] += sign;
                if seen.contains(&next) {
                    continue;
                }
                if norm_of(&next) <= bound {
                    seen.insert(next.clone());
                    open_next.push_back(next);
                }
            }
        }
        visited.push(p);
    }
    Ok(finish_ball(&generator, visited))
}

/// All points `translation + v · (scale · G)` inside the closed box `[lo, hi]`,
/// sorted by `int_vec`. `norm` is the distance from `translation`.
pub fn enumerate_box(
    spec: &LatticeSpec,
    scale: f64,
    translation: &[f64],
    lo: &[f64],
    hi: &[f64],
    limits: EnumerationLimits,
) -> Result<Vec<LatticePoint>> {
    let mut out = Vec::new();
    for_each_in_box(spec, scale, translation, lo, hi, limits, |v, position| {
        let norm = math::dist(position, translation);
        out.push(LatticePoint { int_vec: IntegerVector(v.to_vec()), position: position.to_vec(), norm });
    })?;
    out.sort_by(|a, b| a.int_vec.cmp(&b.int_vec));
    Ok(out)
}

/// Number of lattice points in the box, without materialising them.
pub fn count_in_box(
    spec: &LatticeSpec,
    scale: f64,
    translation: &[f64],
    lo: &[f64],
    hi: &[f64],
    limits: EnumerationLimits,
) -> Result<usize> {
    let mut n = 0usize;
    for_each_in_box(spec, scale, translation, lo, hi, limits, |_, _| n += 1)?;
    Ok(n)
}

fn for_each_in_box<F: FnMut(&[i64], &[f64])>(
    spec: &LatticeSpec,
    scale: f64,
    translation: &[f64],
    lo: &[f64],
    hi: &[f64],
    limits: EnumerationLimits,
    mut visit: F,
) -> Result<()> {
    let d = spec.d;
    for v in [translation, lo, hi] {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: v.len() });
        }
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::param("scale", "must be positive and finite"));
    }
    if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
        return Err(Error::param("lo", "box must satisfy lo <= hi componentwise"));
    }

    let volume: f64 = lo.iter().zip(hi).map(|(l, h)| h - l).product();
    let estimated = volume / (math::powi(scale, d as i32) * spec.cell_volume());
    if estimated > limits.max_points as f64 {
        return Err(Error::Capacity { estimated, cap: limits.max_points });
    }

    let generator = spec.generator.scaled(scale);
    let inv = generator.inverse().expect("lattice generators are non-singular");
    let tol = 1e-9 * lo.iter().chain(hi).chain(translation).fold(1.0f64, |m, x| m.max(math::abs(*x)));

    // v = (x - t) · inv is linear in x, so its range over the box is found
    // coordinate by coordinate.
    let mut v_lo = vec![0i64; d];
    let mut v_hi = vec![0i64; d];
    for j in 0..d {
        let (mut mn, mut mx) = (0.0, 0.0);
        for i in 0..d {
            let a = (lo[i] - translation[i]) * inv[(i, j)];
            let b = (hi[i] - translation[i]) * inv[(i, j)];
            mn += a.min(b);
            mx += a.max(b);
        }
        v_lo[j] = math::floor(mn - 1e-9) as i64;
        v_hi[j] = math::ceil(mx + 1e-9) as i64;
    }

    // Odometer over the leading d-1 coefficients; the admissible range of
    // the last one is an interval solved for directly.
    let last = generator.row(d - 1).to_vec();
    let mut v = v_lo.clone();
    let inside = |p: &[f64]| p.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| *x >= l - tol && *x <= h + tol);
    loop {
        v[d - 1] = 0;
        let mut base = generator.left_mul_int(&v);
        for (b, t) in base.iter_mut().zip(translation) {
            *b += t;
        }
        let (mut k_lo, mut k_hi) = (v_lo[d - 1] as f64, v_hi[d - 1] as f64);
        for i in 0..d {
            let m = last[i];
            if m == 0.0 {
                if base[i] < lo[i] - tol || base[i] > hi[i] + tol {
                    k_lo = 1.0;
                    k_hi = 0.0;
                }
                continue;
            }
            let a = (lo[i] - tol - base[i]) / m;
            let b = (hi[i] + tol - base[i]) / m;
            k_lo = k_lo.max(a.min(b));
            k_hi = k_hi.min(a.max(b));
        }
        if k_lo <= k_hi {
            let from = math::ceil(k_lo - 1e-12) as i64;
            let to = math::floor(k_hi + 1e-12) as i64;
            for k in from..=to {
                v[d - 1] = k;
                let mut p = generator.left_mul_int(&v);
                for (x, t) in p.iter_mut().zip(translation) {
                    *x += t;
                }
                if inside(&p) {
                    visit(&v, &p);
                }
            }
        }

        // advance odometer over coordinates 0..d-1
        let mut j = d - 1;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            if v[j] < v_hi[j] {
                v[j] += 1;
                break;
            }
            v[j] = v_lo[j];
        }
    }
}
