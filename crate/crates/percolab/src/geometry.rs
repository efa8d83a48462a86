//! Circle-overlap areas and the radial overlap integral.
//!
//! Everything here is exact closed-form where a closed form exists (two-disk
//! lens, union) and an analytic arc-polygon decomposition for the three-disk
//! intersection, with an adaptive-quadrature fallback for configurations that
//! sit numerically on a tangency. Areas are m², lengths are meters.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::quad::{integrate, QuadOptions};
use crate::{Error, Result};

/// A point in the plane (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist_sq(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// A disk: center plus strictly positive radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "disk radius must be strictly positive, got {radius}"
            )));
        }
        if !(center.x.is_finite() && center.y.is_finite()) {
            return Err(Error::InvalidInput("disk center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center.dist_sq(p) <= self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Two disks on a common axis: radii and center separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDiskConfig {
    /// Center separation t ≥ 0.
    pub separation: f64,
    /// Radius of the first disk.
    pub radius_a: f64,
    /// Radius of the second disk.
    pub radius_b: f64,
}

impl TwoDiskConfig {
    pub fn new(separation: f64, radius_a: f64, radius_b: f64) -> Result<Self> {
        if !(radius_a > 0.0 && radius_b > 0.0) || !radius_a.is_finite() || !radius_b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "disk radii must be strictly positive, got {radius_a}, {radius_b}"
            )));
        }
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(Error::InvalidInput(format!(
                "separation must be non-negative, got {separation}"
            )));
        }
        Ok(Self {
            separation,
            radius_a,
            radius_b,
        })
    }

    /// The two disks placed symmetrically at (±t/2, 0).
    pub fn place(&self) -> (Disk, Disk) {
        let h = 0.5 * self.separation;
        (
            Disk {
                center: Point::new(-h, 0.0),
                radius: self.radius_a,
            },
            Disk {
                center: Point::new(h, 0.0),
                radius: self.radius_b,
            },
        )
    }
}

/// Intersection area of two disks with radii `r1`, `r2` centered `d` apart.
/// No validation; callers have checked `r1, r2 > 0`, `d >= 0`.
pub(crate) fn lens_area_raw(d: f64, r1: f64, r2: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    let rmin = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return PI * rmin * rmin;
    }
    let cos1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let cos2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * cos1.acos() + r2 * r2 * cos2.acos() - 0.5 * k.max(0.0).sqrt()
}

/// Intersection (lens) area of the two disks.
///
/// Equals `π·min(r1,r2)²` under full containment and 0 once the disks are
/// tangent or disjoint; continuous in the separation.
pub fn lens_area(cfg: TwoDiskConfig) -> Result<f64> {
    TwoDiskConfig::new(cfg.separation, cfg.radius_a, cfg.radius_b)?;
    Ok(lens_area_raw(cfg.separation, cfg.radius_a, cfg.radius_b))
}

/// Union area of the two disks: `πr1² + πr2² − lens`.
pub fn union_area(cfg: TwoDiskConfig) -> Result<f64> {
    let lens = lens_area(cfg)?;
    Ok(PI * cfg.radius_a * cfg.radius_a + PI * cfg.radius_b * cfg.radius_b - lens)
}

/// Relative tangency margin below which the analytic three-disk path hands
/// off to quadrature: circle boundaries within `1e-9 * max radius` of touching
/// make the arc-polygon vertex classification unstable.
const TANGENCY_MARGIN: f64 = 1e-9;

/// Intersection area of three disks.
///
/// Analytic path: the intersection of disks is convex and bounded by circular
/// arcs meeting at pairwise circle-intersection points; its area is the
/// vertex-polygon area plus one circular segment per arc. Near-tangent
/// configurations fall back to adaptive strip quadrature.
pub fn triple_overlap_area(a: &Disk, b: &Disk, c: &Disk) -> Result<f64> {
    for d in [a, b, c] {
        Disk::new(d.center, d.radius)?;
    }
    let disks = [*a, *b, *c];
    let rmax = disks.iter().map(|d| d.radius).fold(0.0, f64::max);
    let tangency = TANGENCY_MARGIN * rmax;

    let mut near_tangent = false;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = disks[i].center.dist(disks[j].center);
            let (ri, rj) = (disks[i].radius, disks[j].radius);
            if d >= ri + rj {
                return Ok(0.0);
            }
            if (d - (ri + rj)).abs() < tangency || (d - (ri - rj).abs()).abs() < tangency {
                near_tangent = true;
            }
        }
    }

    // Containment: if one disk lies inside another, the problem reduces to
    // the lens of the remaining pair. This is exact, so it is checked before
    // the tangency fallback (coincident disks land here).
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let d = disks[i].center.dist(disks[j].center);
            if d + disks[i].radius <= disks[j].radius {
                // disk i ⊆ disk j: drop j.
                let k = 3 - i - j;
                let dd = disks[i].center.dist(disks[k].center);
                return Ok(lens_area_raw(dd, disks[i].radius, disks[k].radius));
            }
        }
    }

    if near_tangent {
        return strip_intersection_area(&disks);
    }

    // Pairwise intersection points that lie inside the remaining disk.
    let tol = 1e-12 * rmax * rmax;
    let mut verts: Vec<(Point, usize, usize)> = Vec::with_capacity(6);
    for i in 0..3 {
        for j in (i + 1)..3 {
            let k = 3 - i - j;
            let Some((p1, p2)) = circle_intersection_points(&disks[i], &disks[j]) else {
                continue;
            };
            for p in [p1, p2] {
                let rr = disks[k].radius * disks[k].radius;
                if disks[k].center.dist_sq(p) <= rr + tol {
                    verts.push((p, i, j));
                }
            }
        }
    }
    if verts.is_empty() {
        // Non-empty intersections pairwise, no boundary vertices, no
        // containment: the common region is empty.
        return Ok(0.0);
    }

    // Sort counterclockwise around the vertex centroid (the region is convex).
    let n = verts.len() as f64;
    let cx = verts.iter().map(|(p, _, _)| p.x).sum::<f64>() / n;
    let cy = verts.iter().map(|(p, _, _)| p.y).sum::<f64>() / n;
    verts.sort_by(|(p, _, _), (q, _, _)| {
        let ap = (p.y - cy).atan2(p.x - cx);
        let aq = (q.y - cy).atan2(q.x - cx);
        ap.partial_cmp(&aq).unwrap_or(std::cmp::Ordering::Equal)
    });

    // Polygon part.
    let mut area = 0.0;
    for idx in 0..verts.len() {
        let (p, _, _) = verts[idx];
        let (q, _, _) = verts[(idx + 1) % verts.len()];
        area += p.x * q.y - q.x * p.y;
    }
    area *= 0.5;

    // One bulging circular segment per edge, on the circle shared by the two
    // endpoint vertices whose arc midpoint stays inside all three disks.
    for idx in 0..verts.len() {
        let (p, pi, pj) = verts[idx];
        let (q, qi, qj) = verts[(idx + 1) % verts.len()];
        let shared: Vec<usize> = [pi, pj]
            .iter()
            .copied()
            .filter(|s| *s == qi || *s == qj)
            .collect();
        let mut segment = None;
        for &s in &shared {
            let disk = &disks[s];
            let a0 = (p.y - disk.center.y).atan2(p.x - disk.center.x);
            let a1 = (q.y - disk.center.y).atan2(q.x - disk.center.x);
            let delta = (a1 - a0).rem_euclid(2.0 * PI);
            let mid = a0 + 0.5 * delta;
            let m = Point::new(
                disk.center.x + disk.radius * mid.cos(),
                disk.center.y + disk.radius * mid.sin(),
            );
            let slack = 1e-9 * rmax;
            let ok = disks
                .iter()
                .enumerate()
                .all(|(di, d)| di == s || d.center.dist(m) <= d.radius + slack);
            if ok {
                segment = Some(0.5 * disk.radius * disk.radius * (delta - delta.sin()));
                break;
            }
        }
        match segment {
            Some(seg) => area += seg,
            // Ambiguous arc assignment: the configuration is effectively
            // degenerate; integrate instead.
            None => return strip_intersection_area(&disks),
        }
    }

    Ok(area.max(0.0))
}

/// Both intersection points of two circle boundaries, or `None` when the
/// circles do not cross (disjoint or nested).
fn circle_intersection_points(a: &Disk, b: &Disk) -> Option<(Point, Point)> {
    let d = a.center.dist(b.center);
    if d >= a.radius + b.radius || d <= (a.radius - b.radius).abs() || d == 0.0 {
        return None;
    }
    let t = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let h_sq = a.radius * a.radius - t * t;
    let h = h_sq.max(0.0).sqrt();
    let ex = ((b.center.x - a.center.x) / d, (b.center.y - a.center.y) / d);
    let base = Point::new(a.center.x + t * ex.0, a.center.y + t * ex.1);
    let perp = (-ex.1, ex.0);
    Some((
        Point::new(base.x + h * perp.0, base.y + h * perp.1),
        Point::new(base.x - h * perp.0, base.y - h * perp.1),
    ))
}

/// Intersection area by adaptive quadrature over vertical strips: at each
/// abscissa the region is the intersection of the disks' y-intervals.
fn strip_intersection_area(disks: &[Disk; 3]) -> Result<f64> {
    let x_lo = disks
        .iter()
        .map(|d| d.center.x - d.radius)
        .fold(f64::NEG_INFINITY, f64::max);
    let x_hi = disks
        .iter()
        .map(|d| d.center.x + d.radius)
        .fold(f64::INFINITY, f64::min);
    if x_lo >= x_hi {
        return Ok(0.0);
    }
    let rmax = disks.iter().map(|d| d.radius).fold(0.0, f64::max);
    let scale = PI * rmax * rmax;
    let opts = QuadOptions {
        abs_tol: 1e-10 * scale,
        rel_tol: 1e-8,
        max_intervals: 8192,
    };
    let f = |x: f64| {
        let mut top = f64::INFINITY;
        let mut bot = f64::NEG_INFINITY;
        for d in disks {
            let dx = x - d.center.x;
            let h_sq = d.radius * d.radius - dx * dx;
            if h_sq <= 0.0 {
                return 0.0;
            }
            let h = h_sq.sqrt();
            top = top.min(d.center.y + h);
            bot = bot.max(d.center.y - h);
        }
        (top - bot).max(0.0)
    };
    Ok(integrate(f, x_lo, x_hi, opts)?.value)
}

/// Area of `probe ∩ (D1 ∪ D2)` with the pair placed at (±t/2, 0):
/// the two probe-vs-disk lenses minus the three-disk intersection.
pub fn pair_cover_area(probe: &Disk, pair: TwoDiskConfig) -> Result<f64> {
    Disk::new(probe.center, probe.radius)?;
    let (d1, d2) = pair.place();
    let lens1 = lens_area_raw(probe.center.dist(d1.center), probe.radius, d1.radius);
    let lens2 = lens_area_raw(probe.center.dist(d2.center), probe.radius, d2.radius);
    let triple = triple_overlap_area(probe, &d1, &d2)?;
    Ok((lens1 + lens2 - triple).max(0.0))
}

/// Radial overlap integral `2 ∫₀ʳ t · lens(t, R_p, r_I) / (π R_p²) dt`.
///
/// Equals `r²` exactly whenever `r_I ≥ R_p + r` (the moving disk never leaves
/// the big one, so the normalized lens is identically 1).
pub fn overlap_integral(
    r: f64,
    primary_tx_range: f64,
    secondary_interference_range: f64,
) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integration limit must be non-negative, got {r}"
        )));
    }
    if !(primary_tx_range > 0.0) || !(secondary_interference_range > 0.0) {
        return Err(Error::InvalidInput(
            "ranges must be strictly positive".into(),
        ));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let rp = primary_tx_range;
    let ri = secondary_interference_range;
    let norm = PI * rp * rp;
    let opts = QuadOptions {
        abs_tol: 1e-10 * r * r,
        rel_tol: 1e-8,
        max_intervals: 4096,
    };
    let res = integrate(|t| 2.0 * t * lens_area_raw(t, rp, ri) / norm, 0.0, r, opts)?;
    Ok(res.value)
}

/// Monte-Carlo rejection estimate of a region's area.
#[derive(Debug, Clone, Copy)]
pub struct McArea {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Rejection-sample `inside` over the axis-aligned box `[lo, hi]`.
///
/// Independent of every analytic path in this module: only point-membership
/// tests are used. The standard error uses the (k+½)/(n+1) rate so it never
/// collapses to zero on all-miss runs.
pub fn mc_area<F: Fn(Point) -> bool>(
    inside: F,
    lo: Point,
    hi: Point,
    samples: u64,
    rng: &mut impl Rng,
) -> McArea {
    let w = hi.x - lo.x;
    let h = hi.y - lo.y;
    let box_area = w * h;
    let mut hits = 0u64;
    for _ in 0..samples {
        let p = Point::new(
            lo.x + w * rng.random::<f64>(),
            lo.y + h * rng.random::<f64>(),
        );
        if inside(p) {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / samples as f64;
    let p_tilde = (hits as f64 + 0.5) / (samples as f64 + 1.0);
    McArea {
        estimate: box_area * p_hat,
        stderr: box_area * (p_tilde * (1.0 - p_tilde) / samples as f64).sqrt(),
        samples,
    }
}

/// Bounding box of a set of disks.
pub fn disks_bbox(disks: &[Disk]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for d in disks {
        lo.x = lo.x.min(d.center.x - d.radius);
        lo.y = lo.y.min(d.center.y - d.radius);
        hi.x = hi.x.max(d.center.x + d.radius);
        hi.y = hi.y.max(d.center.y + d.radius);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(t: f64, r1: f64, r2: f64) -> TwoDiskConfig {
        TwoDiskConfig::new(t, r1, r2).unwrap()
    }

    #[test]
    fn lens_full_containment() {
        assert!((lens_area(cfg(0.0, 1.0, 1.0)).unwrap() - PI).abs() < 1e-14);
        assert!((lens_area(cfg(0.3, 0.5, 2.0)).unwrap() - PI * 0.25).abs() < 1e-14);
    }

    #[test]
    fn lens_disjoint_and_tangent() {
        assert_eq!(lens_area(cfg(2.0, 1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(lens_area(cfg(3.0, 1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn lens_unit_circles_at_unit_distance() {
        // 2π/3 − √3/2, the classic equal-circle lens.
        let expected = 2.0 * PI / 3.0 - 3.0f64.sqrt() / 2.0;
        let got = lens_area(cfg(1.0, 1.0, 1.0)).unwrap();
        assert!((got - expected).abs() < 1e-14, "got {got}, want {expected}");
    }

    #[test]
    fn lens_rejects_bad_radius() {
        assert!(TwoDiskConfig::new(1.0, 0.0, 1.0).is_err());
        assert!(TwoDiskConfig::new(1.0, 1.0, -2.0).is_err());
        assert!(TwoDiskConfig::new(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn union_examples() {
        assert!((union_area(cfg(0.0, 1.0, 1.0)).unwrap() - PI).abs() < 1e-14);
        assert!((union_area(cfg(3.0, 1.0, 1.0)).unwrap() - 2.0 * PI).abs() < 1e-14);
        let lens = 2.0 * PI / 3.0 - 3.0f64.sqrt() / 2.0;
        assert!((union_area(cfg(1.0, 1.0, 1.0)).unwrap() - (2.0 * PI - lens)).abs() < 1e-14);
    }

    #[test]
    fn triple_reduces_to_lens_when_two_disks_coincide() {
        let probe = Disk::new(Point::new(0.7, 0.2), 0.9).unwrap();
        let d = Disk::new(Point::new(0.0, 0.0), 1.1).unwrap();
        let got = triple_overlap_area(&probe, &d, &d).unwrap();
        let want = lens_area_raw(probe.center.dist(d.center), probe.radius, d.radius);
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn triple_disjoint_pair_is_empty() {
        let a = Disk::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let b = Disk::new(Point::new(5.0, 0.0), 1.0).unwrap();
        let c = Disk::new(Point::new(2.5, 0.0), 3.0).unwrap();
        assert_eq!(triple_overlap_area(&a, &b, &c).unwrap(), 0.0);
    }

    #[test]
    fn triple_symmetric_case_matches_strip_quadrature() {
        let a = Disk::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let b = Disk::new(Point::new(-1.0, 0.0), 1.5).unwrap();
        let c = Disk::new(Point::new(1.0, 0.0), 1.5).unwrap();
        let analytic = triple_overlap_area(&a, &b, &c).unwrap();
        let quad = strip_intersection_area(&[a, b, c]).unwrap();
        assert!(
            (analytic - quad).abs() < 1e-7,
            "analytic {analytic}, quadrature {quad}"
        );
        // Probe lies inside the union here, so lens1+lens2-triple = π R_p².
        let covered = pair_cover_area(&a, cfg(2.0, 1.5, 1.5)).unwrap();
        assert!((covered - PI).abs() < 1e-7, "covered {covered}");
    }

    #[test]
    fn pair_cover_far_probe_is_zero() {
        let probe = Disk::new(Point::new(100.0, 100.0), 1.0).unwrap();
        assert_eq!(pair_cover_area(&probe, cfg(2.0, 1.5, 1.5)).unwrap(), 0.0);
    }

    #[test]
    fn pair_cover_contained_probe_is_full() {
        // Probe concentric with the first disk and small enough to sit inside.
        let probe = Disk::new(Point::new(-1.0, 0.0), 0.4).unwrap();
        let got = pair_cover_area(&probe, cfg(2.0, 1.5, 1.5)).unwrap();
        assert!((got - PI * 0.16).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn overlap_integral_zero_limit() {
        assert_eq!(overlap_integral(0.0, 100.0, 240.0).unwrap(), 0.0);
    }

    #[test]
    fn overlap_integral_containment_regime_is_r_squared() {
        // r_I ≥ R_p + r makes the normalized lens identically one.
        let got = overlap_integral(120.0, 100.0, 240.0).unwrap();
        assert!((got - 14400.0).abs() < 1e-6 * 14400.0, "got {got}");
        let got = overlap_integral(80.0, 50.0, 240.0).unwrap();
        assert!((got - 6400.0).abs() < 1e-6 * 6400.0, "got {got}");
    }

    #[test]
    fn overlap_integral_below_r_squared_otherwise() {
        let r = 120.0;
        let got = overlap_integral(r, 100.0, 150.0).unwrap();
        assert!(got < r * r, "got {got}");
        assert!(got > 0.0);
    }

    #[test]
    fn mc_oracle_agrees_on_lens() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = cfg(1.0, 1.0, 1.0);
        let (d1, d2) = c.place();
        let (lo, hi) = disks_bbox(&[d1, d2]);
        let mc = mc_area(
            |p| d1.contains(p) && d2.contains(p),
            lo,
            hi,
            2_000_000,
            &mut rng,
        );
        let analytic = lens_area(c).unwrap();
        assert!(
            (mc.estimate - analytic).abs() < 3.0 * mc.stderr,
            "mc {} ± {}, analytic {}",
            mc.estimate,
            mc.stderr,
            analytic
        );
    }

    #[test]
    fn near_tangent_triple_falls_back_cleanly() {
        // Outer tangency within the fallback margin.
        let a = Disk::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let b = Disk::new(Point::new(2.0 - 1e-12, 0.0), 1.0).unwrap();
        let c = Disk::new(Point::new(1.0, 0.0), 1.0).unwrap();
        let got = triple_overlap_area(&a, &b, &c).unwrap();
        assert!((0.0..1e-6).contains(&got), "got {got}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn lens_symmetric_and_bounded(
            t in 0.0f64..5.0,
            r1 in 0.05f64..3.0,
            r2 in 0.05f64..3.0,
        ) {
            let ab = lens_area(cfg(t, r1, r2)).unwrap();
            let ba = lens_area(cfg(t, r2, r1)).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
            let cap = PI * r1.min(r2) * r1.min(r2);
            prop_assert!(ab >= 0.0 && ab <= cap + 1e-12);
        }

        #[test]
        fn lens_monotone_in_separation(
            t1 in 0.0f64..4.0,
            dt in 0.0f64..2.0,
            r1 in 0.05f64..3.0,
            r2 in 0.05f64..3.0,
        ) {
            let near = lens_area(cfg(t1, r1, r2)).unwrap();
            let far = lens_area(cfg(t1 + dt, r1, r2)).unwrap();
            prop_assert!(far <= near + 1e-12);
        }

        #[test]
        fn triple_bounded_by_pairwise_lenses(
            x in -1.5f64..1.5,
            y in -1.5f64..1.5,
            rp in 0.1f64..2.0,
            t in 0.0f64..3.0,
            ri in 0.3f64..2.0,
        ) {
            let probe = Disk::new(Point::new(x, y), rp).unwrap();
            let pair = cfg(t, ri, ri);
            let (d1, d2) = pair.place();
            let triple = triple_overlap_area(&probe, &d1, &d2).unwrap();
            let l1 = lens_area_raw(probe.center.dist(d1.center), rp, ri);
            let l2 = lens_area_raw(probe.center.dist(d2.center), rp, ri);
            let l12 = lens_area_raw(t, ri, ri);
            let slack = 1e-9 * (1.0 + triple);
            prop_assert!(triple >= -1e-12);
            prop_assert!(triple <= l1 + slack && triple <= l2 + slack && triple <= l12 + slack);
            let cover = pair_cover_area(&probe, pair).unwrap();
            prop_assert!(cover >= -1e-12 && cover <= PI * rp * rp + 1e-9);
        }

        #[test]
        fn triple_matches_strip_quadrature(
            x in -1.2f64..1.2,
            y in -1.2f64..1.2,
            rp in 0.2f64..1.5,
            t in 0.0f64..2.4,
            ri in 0.4f64..1.6,
        ) {
            let probe = Disk::new(Point::new(x, y), rp).unwrap();
            let (d1, d2) = cfg(t, ri, ri).place();
            let analytic = triple_overlap_area(&probe, &d1, &d2).unwrap();
            let quad = strip_intersection_area(&[probe, d1, d2]).unwrap();
            prop_assert!(
                (analytic - quad).abs() <= 1e-6 * (1.0 + analytic.abs()),
                "analytic {} quadrature {}", analytic, quad
            );
        }

        #[test]
        fn overlap_integral_never_exceeds_r_squared(
            r in 0.1f64..300.0,
            rp in 10.0f64..200.0,
            ri in 10.0f64..400.0,
        ) {
            let v = overlap_integral(r, rp, ri).unwrap();
            prop_assert!(v <= r * r * (1.0 + 1e-9) + 1e-9);
            prop_assert!(v >= -1e-12);
            if ri >= rp + r {
                prop_assert!((v - r * r).abs() <= 1e-7 * r * r + 1e-9);
            }
        }
    }
}
