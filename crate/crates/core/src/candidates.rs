//! Feasible candidate sites and feasible-area analytics.
//!
//! A candidate is a vertex of the clipped Voronoi diagram of the obnoxious
//! points. Its distance to the nearest obnoxious point is the largest
//! minimum distance `D` for which that vertex remains a feasible facility
//! location, so filtering by `d_nearest >= D` yields one seed in every
//! feasible pocket of the plane.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{nearest_distance, voronoi_vertices, Point};
use crate::instance::Instance;
use crate::rng::Lcg64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateSite {
    pub location: Point,
    /// Distance to the closest obnoxious point.
    pub d_nearest: f64,
}

pub fn nearest_obnoxious(q: Point, instance: &Instance) -> Result<f64> {
    if instance.obnoxious().is_empty() {
        return Err(Error::EmptyObnoxiousSet);
    }
    Ok(nearest_distance(q, instance.obnoxious()))
}

/// Every clipped Voronoi vertex with its nearest-obnoxious distance, sorted
/// by descending distance (ties lexicographic).
pub fn all_candidates(instance: &Instance) -> Result<Vec<CandidateSite>> {
    if instance.obnoxious().is_empty() {
        return Err(Error::EmptyObnoxiousSet);
    }
    let verts = voronoi_vertices(instance.obnoxious(), instance.bbox())?;
    Ok(verts
        .into_iter()
        .map(|location| CandidateSite { location, d_nearest: nearest_distance(location, instance.obnoxious()) })
        .collect())
}

pub fn feasible_candidates(instance: &Instance, dmin: f64) -> Result<Vec<CandidateSite>> {
    if !(dmin >= 0.0) {
        return Err(Error::Domain(format!("minimum distance must be non-negative, got {dmin}")));
    }
    let mut all = all_candidates(instance)?;
    all.retain(|c| c.d_nearest >= dmin);
    Ok(all)
}

/// `x,y,d_nearest` with a header row, full precision.
pub fn candidates_csv(candidates: &[CandidateSite]) -> String {
    let mut s = String::from("x,y,d_nearest\n");
    for c in candidates {
        writeln!(s, "{},{},{}", c.location.x, c.location.y, c.d_nearest).unwrap();
    }
    s
}

/// Geometry of the feasible pocket at the center of an equilateral triangle
/// of obnoxious points whose circumradius is `d_i`, each point surrounded
/// by an infeasible disk of radius `dmin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleAreaReport {
    pub dmin: f64,
    pub d_i: f64,
    pub theta: f64,
    pub area_exact: f64,
    pub area_approx: f64,
    pub dmax_exact: f64,
    pub dmax_approx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriangleFeasibleArea {
    Pocket(TriangleAreaReport),
    /// `d_i > 2 dmin / sqrt(3)`: neighbouring disks no longer overlap and the
    /// feasible region is not a closed pocket.
    NotIntersecting,
}

const THETA_CANCELLATION: f64 = 1e-4;

pub fn triangle_feasible_area(dmin: f64, d_i: f64) -> Result<TriangleFeasibleArea> {
    if !(dmin > 0.0) || !d_i.is_finite() {
        return Err(Error::Domain(format!("minimum distance must be positive, got {dmin}")));
    }
    if d_i < dmin {
        return Err(Error::Domain(format!("vertex distance {d_i} is below the minimum distance {dmin}")));
    }
    let sqrt3 = 3f64.sqrt();
    if d_i > 2.0 * dmin / sqrt3 {
        return Ok(TriangleFeasibleArea::NotIntersecting);
    }
    let theta = ((sqrt3 * d_i / (2.0 * dmin)).min(1.0)).asin() - PI / 3.0;
    let theta = theta.max(0.0);
    let area_approx = 3.0 * sqrt3 * (d_i - dmin).powi(2);
    let area_exact = if theta < THETA_CANCELLATION {
        area_approx
    } else {
        3.0 * dmin * (d_i * theta.sin() - dmin * theta)
    };
    Ok(TriangleFeasibleArea::Pocket(TriangleAreaReport {
        dmin,
        d_i,
        theta,
        area_exact: area_exact.max(0.0),
        area_approx,
        dmax_exact: dmin / sqrt3 * theta.sin(),
        dmax_approx: d_i - dmin,
    }))
}

/// Outcome of rejection sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSample {
    pub points: Vec<Point>,
    /// True when the attempt cap was hit before `count` points were found.
    pub exhausted: bool,
    pub attempts: u64,
}

pub const DEFAULT_SAMPLE_ATTEMPTS: u64 = 10_000_000;

pub fn sample_feasible(instance: &Instance, dmin: f64, count: usize, seed: u64) -> FeasibleSample {
    sample_feasible_capped(instance, dmin, count, seed, DEFAULT_SAMPLE_ATTEMPTS)
}

/// Uniform rejection sampling over the bounding box with [`Lcg64`].
pub fn sample_feasible_capped(instance: &Instance, dmin: f64, count: usize, seed: u64, max_attempts: u64) -> FeasibleSample {
    let b = instance.bbox();
    let obn = instance.obnoxious();
    let d2 = dmin * dmin;
    let mut rng = Lcg64::new(seed);
    let mut points = Vec::with_capacity(count.min(1 << 16));
    let mut attempts = 0;
    // Quick rejection when no point of the box can be feasible.
    let hopeless = !obn.is_empty() && dmin > max_clearance_bound(instance);
    while points.len() < count && attempts < max_attempts && !hopeless {
        attempts += 1;
        let q = Point::new(b.xmin + rng.next_f64() * b.width(), b.ymin + rng.next_f64() * b.height());
        if obn.iter().all(|o| q.dist2(*o) >= d2) {
            points.push(q);
        }
    }
    FeasibleSample { exhausted: points.len() < count, points, attempts }
}

/// Upper bound on the nearest-obnoxious distance of any point in the box.
/// The maximum is attained at a clipped Voronoi vertex; falling back to the
/// box diagonal if the vertex set cannot be built.
fn max_clearance_bound(instance: &Instance) -> f64 {
    match all_candidates(instance) {
        Ok(c) => c.first().map_or(f64::INFINITY, |c| c.d_nearest + 1e-12),
        Err(_) => instance.bbox().diagonal(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundingBox;
    use crate::instance::DemandPoint;

    fn single(obn: Point) -> Instance {
        Instance::new(vec![DemandPoint { location: Point::new(1.0, 1.0), weight: 1.0 }], vec![obn], BoundingBox::square10())
            .unwrap()
    }

    #[test]
    fn nearest_obnoxious_examples() {
        let inst = single(Point::new(3.0, 4.0));
        assert_eq!(nearest_obnoxious(Point::new(0.0, 0.0), &inst).unwrap(), 5.0);
        assert_eq!(nearest_obnoxious(Point::new(3.0, 4.0), &inst).unwrap(), 0.0);
        let empty = Instance::new(vec![], vec![], BoundingBox::square10()).unwrap();
        assert!(matches!(nearest_obnoxious(Point::new(0.0, 0.0), &empty), Err(Error::EmptyObnoxiousSet)));
    }

    #[test]
    fn tangent_circles_have_zero_area() {
        let TriangleFeasibleArea::Pocket(r) = triangle_feasible_area(1.0, 1.0).unwrap() else { panic!() };
        assert_eq!(r.theta, 0.0);
        assert_eq!(r.area_exact, 0.0);
        assert_eq!(r.area_approx, 0.0);
        assert_eq!(r.dmax_exact, 0.0);
    }

    #[test]
    fn area_domain() {
        assert!(triangle_feasible_area(0.0, 1.0).is_err());
        assert!(triangle_feasible_area(1.0, 0.9).is_err());
        assert_eq!(triangle_feasible_area(1.0, 1.2).unwrap(), TriangleFeasibleArea::NotIntersecting);
        // Upper end of the valid range: theta = pi/6.
        let TriangleFeasibleArea::Pocket(r) = triangle_feasible_area(1.0, 2.0 / 3f64.sqrt()).unwrap() else { panic!() };
        assert!((r.theta - PI / 6.0).abs() < 1e-7);
    }

    #[test]
    fn approximation_converges_near_tangency() {
        let TriangleFeasibleArea::Pocket(r) = triangle_feasible_area(1.0, 1.0 + 1e-4).unwrap() else { panic!() };
        assert!((r.area_approx / r.area_exact - 1.0).abs() < 1e-2);
        let TriangleFeasibleArea::Pocket(r) = triangle_feasible_area(1.0, 1.0 + 1e-3).unwrap() else { panic!() };
        assert!(r.theta > THETA_CANCELLATION);
        assert!((r.area_approx / r.area_exact - 1.0).abs() < 1e-2);
    }

    #[test]
    fn sampling_edge_cases() {
        let inst = single(Point::new(5.0, 5.0));
        let s = sample_feasible(&inst, 0.0, 50, 3);
        assert_eq!(s.points.len(), 50);
        assert_eq!(s.attempts, 50);
        assert!(!s.exhausted);
        let s = sample_feasible(&inst, 100.0, 5, 3);
        assert!(s.points.is_empty() && s.exhausted);
        let s = sample_feasible(&inst, 4.0, 100, 9);
        assert!(s.points.iter().all(|p| p.dist(Point::new(5.0, 5.0)) >= 4.0));
    }

    #[test]
    fn csv_layout() {
        let c = [CandidateSite { location: Point::new(0.0, 3.5), d_nearest: 1.25 }];
        assert_eq!(candidates_csv(&c), "x,y,d_nearest\n0,3.5,1.25\n");
    }
}
