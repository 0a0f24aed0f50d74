//! Independent brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use obnox_core::geometry::Triangulation;
use obnox_core::{BoundingBox, DemandPoint, DistanceMatrix, Instance, Lcg64, Point};

pub fn random_points(rng: &mut Lcg64, n: usize, side: f64) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.next_f64() * side, rng.next_f64() * side)).collect()
}

pub fn random_instance(rng: &mut Lcg64, nd: usize, no: usize) -> Instance {
    let demand = random_points(rng, nd, 10.0)
        .into_iter()
        .map(|location| DemandPoint { location, weight: 0.5 + rng.next_f64() * 2.0 })
        .collect();
    Instance::new(demand, random_points(rng, no, 10.0), BoundingBox::square10()).unwrap()
}

/// Circumcircle of three points by the textbook determinant formula.
pub fn circle(a: Point, b: Point, c: Point) -> (Point, f64) {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    (center, center.dist(a))
}

/// Number of triangles with a site strictly inside their circumcircle.
pub fn empty_circle_violations(t: &Triangulation) -> usize {
    t.triangles
        .iter()
        .filter(|tri| {
            let (c, r) = circle(t.sites[tri.a], t.sites[tri.b], t.sites[tri.c]);
            let tol = 1e-9 * (1.0 + r);
            t.sites.iter().enumerate().any(|(k, s)| k != tri.a && k != tri.b && k != tri.c && s.dist(c) < r - tol)
        })
        .count()
}

fn turn(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Sites on the convex hull boundary (corners and points on hull edges),
/// via Andrew's monotone chain.
pub fn hull_boundary_count(sites: &[Point]) -> usize {
    let mut pts = sites.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut hull: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    sites
        .iter()
        .filter(|&&s| {
            (0..hull.len()).any(|i| {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                let len = a.dist(b);
                turn(a, b, s).abs() <= 1e-12 * (1.0 + len * len) && (s.dist(a) + s.dist(b) - len).abs() <= 1e-12 * (1.0 + len)
            })
        })
        .count()
}

/// Exhaustive p-median over all column subsets.
pub fn enumerate_pmedian(matrix: &DistanceMatrix, weights: &[f64], p: usize) -> f64 {
    fn rec(m: &DistanceMatrix, w: &[f64], p: usize, next: usize, chosen: &mut Vec<usize>, best: &mut f64) {
        if chosen.len() == p {
            let cost: f64 = (0..m.rows())
                .map(|i| w[i] * chosen.iter().map(|&j| m.get(i, j)).fold(f64::INFINITY, f64::min))
                .sum();
            *best = best.min(cost);
            return;
        }
        for j in next..m.cols() {
            chosen.push(j);
            rec(m, w, p, j + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(matrix, weights, p, 0, &mut Vec::new(), &mut best);
    best
}

pub fn weighted_cost(instance: &Instance, facilities: &[Point]) -> f64 {
    instance
        .demand()
        .iter()
        .map(|d| d.weight * facilities.iter().map(|f| d.location.dist(*f)).fold(f64::INFINITY, f64::min))
        .sum()
}

pub fn clearance(instance: &Instance, q: Point) -> f64 {
    instance.obnoxious().iter().map(|o| o.dist(q)).fold(f64::INFINITY, f64::min)
}
