//! Strictly convex planar domains described by a closed parametric curve.
//!
//! Curves are parametrized counterclockwise by `t in [0, 2pi)`. With this
//! orientation the signed planar curvature `(x'y'' - y'x'') / |v|^3` is
//! positive on convex curves, which matches the inward-orientation
//! convention used for the curvature bounds downstream.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::numerics::{adaptive_simpson, golden_section_max, nelder_mead_max, Pchip};

pub type Vec2 = nalgebra::Vector2<f64>;

/// Knots in the arclength lookup table.
pub const ARCLENGTH_KNOTS: usize = 4096;
/// Vertices of the polygon used by [`Domain::contains`].
pub const CONTAINS_POLYGON: usize = 2048;
/// Smallest curvature accepted by the constructor.
pub const MIN_CURVATURE: f64 = 1e-9;
const VALIDATION_SAMPLES: usize = 10_000;

/// Serializable description of a boundary curve.
///
/// JSON forms: `{"kind":"ellipse","a":2.0,"b":1.0}` and
/// `{"kind":"fourier","r0":1.0,"harmonics":[[2,0.1,0.0]]}` where each harmonic
/// is `[order, cos amplitude, sin amplitude]` of the polar radius
/// `r(t) = r0 + sum(ac cos(kt) + as sin(kt))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Ellipse {
        a: f64,
        b: f64,
    },
    Fourier {
        r0: f64,
        harmonics: Vec<(u32, f64, f64)>,
    },
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Ellipse { a: 1.0, b: 1.0 }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            DomainSpec::Ellipse { a, b } => DomainSpec::Ellipse {
                a: a * lambda,
                b: b * lambda,
            },
            DomainSpec::Fourier { r0, harmonics } => DomainSpec::Fourier {
                r0: r0 * lambda,
                harmonics: harmonics
                    .iter()
                    .map(|&(k, ac, as_)| (k, ac * lambda, as_ * lambda))
                    .collect(),
            },
        }
    }

    /// True when the curve is invariant under both coordinate reflections.
    pub fn is_biaxially_symmetric(&self) -> bool {
        match self {
            DomainSpec::Ellipse { .. } => true,
            DomainSpec::Fourier { harmonics, .. } => harmonics
                .iter()
                .all(|&(k, ac, as_)| as_ == 0.0 && (k % 2 == 0 || ac == 0.0)),
        }
    }

    /// Position and first two derivatives with respect to `t`.
    fn jet(&self, t: f64) -> [Vec2; 3] {
        match self {
            DomainSpec::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                [
                    Vec2::new(a * c, b * s),
                    Vec2::new(-a * s, b * c),
                    Vec2::new(-a * c, -b * s),
                ]
            }
            DomainSpec::Fourier { r0, harmonics } => {
                let (mut r, mut dr, mut ddr) = (*r0, 0.0, 0.0);
                for &(k, ac, as_) in harmonics {
                    let k = k as f64;
                    let (s, c) = (k * t).sin_cos();
                    r += ac * c + as_ * s;
                    dr += k * (-ac * s + as_ * c);
                    ddr -= k * k * (ac * c + as_ * s);
                }
                let (s, c) = t.sin_cos();
                let e = Vec2::new(c, s);
                let f = Vec2::new(-s, c);
                [e * r, e * dr + f * r, e * (ddr - r) + f * (2.0 * dr)]
            }
        }
    }

    fn polar_radius(&self, t: f64) -> Option<f64> {
        match self {
            DomainSpec::Ellipse { .. } => None,
            DomainSpec::Fourier { .. } => Some(self.jet(t)[0].norm()),
        }
    }
}

/// A sampled point of the boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub t: f64,
    /// Arclength from `t = 0`.
    pub s: f64,
    pub position: Vec2,
    pub outward_normal: Vec2,
    pub curvature: f64,
}

/// Validated domain with cached arclength table and boundary polygon.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Domain {
    spec: DomainSpec,
    knot_t: Vec<f64>,
    knot_s: Vec<f64>,
    inverse: Pchip,
    polygon: Vec<Vec2>,
    polygon_t: Vec<f64>,
    centroid: Vec2,
    area: f64,
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self, GeometryError> {
        match &spec {
            DomainSpec::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(GeometryError::InvalidDomain(format!(
                        "ellipse semi-axes must be positive, got a = {a}, b = {b}"
                    )));
                }
            }
            DomainSpec::Fourier { r0, harmonics } => {
                if !(r0.is_finite() && *r0 > 0.0) {
                    return Err(GeometryError::InvalidDomain(format!(
                        "base radius must be positive, got {r0}"
                    )));
                }
                if harmonics
                    .iter()
                    .any(|&(k, ac, as_)| k == 0 || !ac.is_finite() || !as_.is_finite())
                {
                    return Err(GeometryError::InvalidDomain(
                        "harmonic orders must be >= 1 with finite amplitudes".into(),
                    ));
                }
            }
        }
        for i in 0..VALIDATION_SAMPLES {
            let t = TAU * i as f64 / VALIDATION_SAMPLES as f64;
            if let Some(r) = spec.polar_radius(t) {
                if r <= 0.0 {
                    return Err(GeometryError::InvalidDomain(format!(
                        "polar radius {r:.3e} <= 0 at t = {t:.6}"
                    )));
                }
            }
            let k = curvature_of(&spec, t)?;
            if k <= MIN_CURVATURE {
                return Err(GeometryError::NonConvex { t, curvature: k });
            }
        }

        let speed = |t: f64| spec.jet(t)[1].norm();
        let dt = TAU / ARCLENGTH_KNOTS as f64;
        let mut knot_t = Vec::with_capacity(ARCLENGTH_KNOTS + 1);
        let mut knot_s = Vec::with_capacity(ARCLENGTH_KNOTS + 1);
        let mut s = 0.0;
        for k in 0..=ARCLENGTH_KNOTS {
            let t = k as f64 * dt;
            if k > 0 {
                s += adaptive_simpson(&speed, t - dt, t, 1e-14);
            }
            knot_t.push(t);
            knot_s.push(s);
        }
        let inverse = Pchip::new(knot_s.clone(), knot_t.clone());

        let mut domain = Domain {
            spec,
            knot_t,
            knot_s,
            inverse,
            polygon: Vec::new(),
            polygon_t: Vec::new(),
            centroid: Vec2::zeros(),
            area: 0.0,
        };
        let pts = domain.boundary_sample_unchecked(CONTAINS_POLYGON);
        domain.polygon = pts.iter().map(|p| p.position).collect();
        domain.polygon_t = pts.iter().map(|p| p.t).collect();
        let (area, centroid) = polygon_area_centroid(&domain.polygon);
        domain.area = area;
        domain.centroid = centroid;
        Ok(domain)
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn position(&self, t: f64) -> Vec2 {
        self.spec.jet(t)[0]
    }

    /// Unit outward normal at parameter `t`.
    pub fn outward_normal(&self, t: f64) -> Vec2 {
        let v = self.spec.jet(t)[1];
        Vec2::new(v.y, -v.x) / v.norm()
    }

    pub fn curvature(&self, t: f64) -> Result<f64, GeometryError> {
        curvature_of(&self.spec, t)
    }

    /// Maximum boundary curvature: uniform sampling refined by golden-section
    /// search around the sampled argmax.
    pub fn kappa_max(&self, n_samples: usize) -> Result<f64, GeometryError> {
        let n = n_samples.max(64);
        let dt = TAU / n as f64;
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..n {
            let t = i as f64 * dt;
            let k = self.curvature(t)?;
            if k <= 0.0 {
                return Err(GeometryError::NonConvex { t, curvature: k });
            }
            if k > best.1 {
                best = (i, k);
            }
        }
        let tc = best.0 as f64 * dt;
        let f = |t: f64| curvature_of(&self.spec, t).unwrap_or(f64::NEG_INFINITY);
        let (_, refined) = golden_section_max(f, tc - dt, tc + dt, 1e-13);
        Ok(refined.max(best.1))
    }

    pub fn perimeter(&self) -> f64 {
        *self.knot_s.last().expect("arclength table is non-empty")
    }

    /// Area enclosed by the 2048-gon used for containment queries.
    pub fn polygon_area(&self) -> f64 {
        self.area
    }

    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        let step = (self.polygon.len() / 256).max(1);
        for p in self.polygon.iter().step_by(step) {
            for q in &self.polygon {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    /// Arclength from `t = 0` to `t`.
    pub fn arclength_at(&self, t: f64) -> f64 {
        let t = t.rem_euclid(TAU);
        let dt = TAU / ARCLENGTH_KNOTS as f64;
        let k = ((t / dt).floor() as usize).min(ARCLENGTH_KNOTS - 1);
        let speed = |t: f64| self.spec.jet(t)[1].norm();
        self.knot_s[k] + adaptive_simpson(&speed, self.knot_t[k], t, 1e-14)
    }

    /// Parameter at arclength `s` (taken modulo the perimeter).
    pub fn param_at_arclength(&self, s: f64) -> f64 {
        let total = self.perimeter();
        let s = s.rem_euclid(total);
        let mut t = self.inverse.eval(s);
        for _ in 0..3 {
            let err = self.arclength_at(t) - s;
            let speed = self.spec.jet(t)[1].norm();
            t -= err / speed;
            if err.abs() < 1e-15 * total {
                break;
            }
        }
        t
    }

    pub fn boundary_point(&self, t: f64) -> Result<BoundaryPoint, GeometryError> {
        let [x, _, _] = self.spec.jet(t);
        Ok(BoundaryPoint {
            t,
            s: self.arclength_at(t),
            position: x,
            outward_normal: self.outward_normal(t),
            curvature: self.curvature(t)?,
        })
    }

    /// `n` points equally spaced in arclength, starting at `t = 0`.
    pub fn boundary_sample(&self, n: usize) -> Vec<BoundaryPoint> {
        self.boundary_sample_unchecked(n.max(16))
    }

    fn boundary_sample_unchecked(&self, n: usize) -> Vec<BoundaryPoint> {
        let total = self.perimeter();
        (0..n)
            .map(|k| {
                let s = total * k as f64 / n as f64;
                let t = if k == 0 {
                    0.0
                } else {
                    self.param_at_arclength(s)
                };
                let [x, _, _] = self.spec.jet(t);
                BoundaryPoint {
                    t,
                    s,
                    position: x,
                    outward_normal: self.outward_normal(t),
                    curvature: curvature_of(&self.spec, t).unwrap_or(f64::NAN),
                }
            })
            .collect()
    }

    /// Strict interior test against the 2048-gon (winding number).
    pub fn contains(&self, p: Vec2) -> bool {
        winding_number(&self.polygon, p) != 0
    }

    /// Unsigned distance from `p` to the boundary curve.
    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        let (i, _) = self
            .polygon
            .iter()
            .enumerate()
            .map(|(i, q)| (i, (q - p).norm_squared()))
            .fold(
                (0, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
        let n = self.polygon.len();
        let dt = TAU / n as f64 * 1.5;
        let t0 = self.polygon_t[i];
        let f = |t: f64| -(self.spec.jet(t)[0] - p).norm_squared();
        // the polygon is arclength-uniform, so bracket with the neighbours' parameters
        let lo = if i == 0 {
            self.polygon_t[n - 1] - TAU
        } else {
            self.polygon_t[i - 1]
        };
        let hi = if i + 1 == n {
            TAU
        } else {
            self.polygon_t[i + 1]
        };
        let (_, v) = golden_section_max(f, lo.min(t0 - dt), hi.max(t0 + dt), 1e-14);
        (-v).max(0.0).sqrt()
    }

    /// Distance to the boundary, negated outside the domain.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let d = self.distance_to_boundary(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    /// Radius of the largest inscribed disk and its center.
    pub fn inscribed_disk(&self) -> (f64, Vec2) {
        let diam = self.diameter();
        let f = |p: Vec2| self.signed_distance(p);
        let mut best = nelder_mead_max(&f, self.centroid, 0.1 * diam, 1e-13 * diam, 2000);
        // restart from the optimum with a fresh simplex to escape ridge stalls
        for scale in [0.02, 0.004] {
            let next = nelder_mead_max(&f, best.0, scale * diam, 1e-13 * diam, 2000);
            if next.1 >= best.1 {
                best = next;
            }
        }
        (best.1, best.0)
    }

    pub fn inradius(&self) -> f64 {
        self.inscribed_disk().0
    }
}

fn curvature_of(spec: &DomainSpec, t: f64) -> Result<f64, GeometryError> {
    let [_, d1, d2] = spec.jet(t);
    let speed = d1.norm();
    if speed < 1e-12 {
        return Err(GeometryError::DegenerateTangent { t });
    }
    Ok((d1.x * d2.y - d1.y * d2.x) / speed.powi(3))
}

pub(crate) fn winding_number(polygon: &[Vec2], p: Vec2) -> i32 {
    let n = polygon.len();
    let mut wn = 0;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn polygon_area_centroid(poly: &[Vec2]) -> (f64, Vec2) {
    let n = poly.len();
    let mut a2 = 0.0;
    let mut c = Vec2::zeros();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let cross = p.x * q.y - q.x * p.y;
        a2 += cross;
        c += (p + q) * cross;
    }
    (0.5 * a2, c / (3.0 * a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ellipse(a: f64, b: f64) -> Domain {
        Domain::new(DomainSpec::Ellipse { a, b }).unwrap()
    }

    fn wobbly() -> Domain {
        Domain::new(DomainSpec::Fourier {
            r0: 1.0,
            harmonics: vec![(2, 0.1, 0.0)],
        })
        .unwrap()
    }

    #[test]
    fn ellipse_curvature_closed_form() {
        let e = ellipse(2.0, 1.0);
        assert_abs_diff_eq!(e.curvature(0.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.curvature(PI / 2.0).unwrap(), 0.25, epsilon = 1e-14);
        let disk = ellipse(1.0, 1.0);
        for t in [0.0, 0.3, 1.7, 4.0] {
            assert_abs_diff_eq!(disk.curvature(t).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn kappa_max_matches_closed_form_and_dense_oracle() {
        assert!((ellipse(2.0, 1.0).kappa_max(64).unwrap() - 2.0).abs() < 2e-8);
        assert!((ellipse(1.0, 1.0).kappa_max(64).unwrap() - 1.0).abs() < 1e-8);

        let w = wobbly();
        let n = 1_000_000;
        let dense = (0..n)
            .map(|i| w.curvature(TAU * i as f64 / n as f64).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let km = w.kappa_max(64).unwrap();
        assert!((km - dense).abs() <= 1e-8 * dense, "{km} vs {dense}");
    }

    #[test]
    fn rejects_nonconvex_and_invalid() {
        let peanut = DomainSpec::Fourier {
            r0: 1.0,
            harmonics: vec![(2, 0.4, 0.0)],
        };
        assert!(matches!(
            Domain::new(peanut),
            Err(GeometryError::NonConvex { .. })
        ));
        assert!(Domain::new(DomainSpec::Ellipse { a: -1.0, b: 1.0 }).is_err());
    }

    #[test]
    fn inradius_of_ellipses() {
        assert!((ellipse(2.0, 1.0).inradius() - 1.0).abs() < 1e-6 * 4.0);
        assert!((ellipse(1.0, 1.0).inradius() - 1.0).abs() < 1e-6 * 2.0);
        let w = wobbly();
        assert!(w.inradius() >= 1.0 / w.kappa_max(256).unwrap() - 1e-6);
    }

    #[test]
    fn boundary_sample_circle_and_perimeter() {
        let disk = ellipse(1.0, 1.0);
        let pts = disk.boundary_sample(16);
        let expect = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (k, &(x, y)) in expect.iter().enumerate() {
            let p = pts[4 * k].position;
            assert!((p - Vec2::new(x, y)).norm() < 1e-9);
        }

        let e = ellipse(2.0, 1.0);
        let pts = e.boundary_sample(256);
        // straight-chord sum approaches the perimeter from below at O(n^-2)
        let chords: f64 = (0..256)
            .map(|i| (pts[(i + 1) % 256].position - pts[i].position).norm())
            .sum();
        let oracle = adaptive_simpson(
            &|t: f64| (4.0 * t.sin().powi(2) + t.cos().powi(2)).sqrt(),
            0.0,
            TAU,
            1e-13,
        );
        assert!((e.perimeter() - oracle).abs() < 1e-10);
        // arclength spacing is uniform: every chord is within the sagitta of L/n
        let l = oracle / 256.0;
        for i in 0..256 {
            let c = (pts[(i + 1) % 256].position - pts[i].position).norm();
            assert!(c <= l + 1e-12 && c > l * (1.0 - 1e-3));
        }
        assert!((chords - oracle).abs() < 2e-3);
    }

    #[test]
    fn normals_are_unit_outward_and_orthogonal() {
        for d in [ellipse(2.0, 1.0), wobbly()] {
            let c = d.centroid();
            for p in d.boundary_sample(64) {
                assert!((p.outward_normal.norm() - 1.0).abs() < 1e-12);
                assert!(p.outward_normal.dot(&(p.position - c)) > 0.0);
                let tangent = d.spec().jet(p.t)[1];
                assert!(p.outward_normal.dot(&tangent).abs() < 1e-10 * tangent.norm());
            }
        }
    }

    #[test]
    fn containment() {
        let disk = ellipse(1.0, 1.0);
        assert!(disk.contains(Vec2::new(0.0, 0.0)));
        assert!(!disk.contains(Vec2::new(2.0, 0.0)));
        assert!(ellipse(2.0, 1.0).contains(Vec2::new(1.99, 0.0)));
    }

    #[test]
    fn scaling_laws() {
        for spec in [
            DomainSpec::Ellipse { a: 2.0, b: 1.0 },
            wobbly().spec().clone(),
        ] {
            let base = Domain::new(spec.clone()).unwrap();
            let k = base.kappa_max(256).unwrap();
            let d = base.inradius();
            for lambda in [0.5, 2.0] {
                let s = Domain::new(spec.scaled(lambda)).unwrap();
                assert!(
                    (s.kappa_max(256).unwrap() - k / lambda).abs() < 1e-8 * (k / lambda).max(1.0)
                );
                assert!((s.inradius() - lambda * d).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn spec_json_forms() {
        let e: DomainSpec = serde_json::from_str(r#"{"kind":"ellipse","a":2.0,"b":1.0}"#).unwrap();
        assert_eq!(e, DomainSpec::Ellipse { a: 2.0, b: 1.0 });
        let f: DomainSpec =
            serde_json::from_str(r#"{"kind":"fourier","r0":1.0,"harmonics":[[2,0.1,0.0]]}"#)
                .unwrap();
        assert!(f.is_biaxially_symmetric());
    }
}
