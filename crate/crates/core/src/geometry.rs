//! Planar primitives, Delaunay triangulation and the clipped Voronoi vertex set.
//!
//! The triangulation is built by a lexicographic sweep (every new site is a
//! vertex of the growing convex hull) followed by Lawson edge flips until
//! every interior edge is locally Delaunay. Orientation and in-circle tests
//! use adaptive exact predicates, so the flip loop always terminates and
//! the result satisfies the empty-circumcircle property up to cocircular
//! ties.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for collinearity/cocircularity decisions (miles).
pub const EPS_GEO: f64 = 1e-9;
/// Two Voronoi vertices closer than this are reported once.
pub const EPS_DEDUP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic (x, y) order; total on finite points.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }

    fn coord(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl BoundingBox {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let ok = [xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) && xmin < xmax && ymin < ymax;
        if !ok {
            return Err(Error::InvalidBox { xmin, ymin, xmax, ymax });
        }
        Ok(BoundingBox { xmin, ymin, xmax, ymax })
    }

    /// The 10 x 10 mile square used by the benchmark instances.
    pub const fn square10() -> Self {
        BoundingBox { xmin: 0.0, ymin: 0.0, xmax: 10.0, ymax: 10.0 }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_eps(p, 0.0)
    }

    pub fn contains_eps(&self, p: Point, eps: f64) -> bool {
        p.x >= self.xmin - eps && p.x <= self.xmax + eps && p.y >= self.ymin - eps && p.y <= self.ymax + eps
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.xmin, self.xmax), p.y.clamp(self.ymin, self.ymax))
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin, self.ymin),
            Point::new(self.xmax, self.ymin),
            Point::new(self.xmax, self.ymax),
            Point::new(self.xmin, self.ymax),
        ]
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Points where the line `origin + t * dir`, restricted to `t` in
    /// `[t_min, t_max]`, crosses the box boundary. Coordinates on the
    /// crossed side are snapped exactly onto it.
    fn boundary_crossings(&self, origin: Point, dir: Point, t_min: f64, t_max: f64) -> Vec<Point> {
        let mut out = Vec::new();
        let sides = [
            (true, self.xmin),
            (true, self.xmax),
            (false, self.ymin),
            (false, self.ymax),
        ];
        for (vertical, value) in sides {
            let (o, d) = if vertical { (origin.x, dir.x) } else { (origin.y, dir.y) };
            if d == 0.0 {
                continue;
            }
            let t = (value - o) / d;
            if !(t >= t_min && t <= t_max) {
                continue;
            }
            let p = if vertical {
                Point::new(value, origin.y + t * dir.y)
            } else {
                Point::new(origin.x + t * dir.x, value)
            };
            if self.contains_eps(p, EPS_GEO) {
                out.push(self.clamp(p));
            }
        }
        out
    }
}

/// Twice the signed area of `abc` (positive when counter-clockwise).
#[inline]
pub fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Exact orientation sign of `abc`.
#[inline]
fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

/// Exact sign of the in-circle test: positive when `d` is strictly inside
/// the circumcircle of the counter-clockwise triangle `abc`.
#[inline]
fn in_circle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    robust::incircle(a.coord(), b.coord(), c.coord(), d.coord())
}

pub fn circumcenter(a: Point, b: Point, c: Point) -> Result<Point> {
    let bx = b.x - a.x;
    let by = b.y - a.y;
    let cx = c.x - a.x;
    let cy = c.y - a.y;
    let d = 2.0 * (bx * cy - by * cx);
    let scale = bx.abs().max(by.abs()).max(cx.abs()).max(cy.abs()).max(1.0);
    if d.abs() <= EPS_GEO * scale {
        return Err(Error::Degenerate);
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Ok(Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d))
}

/// Indices into [`Triangulation::sites`], counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Triangle {
    pub fn vertices(&self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    /// Directed edges `(from, to, opposite)` in counter-clockwise order.
    fn edges(&self) -> [(usize, usize, usize); 3] {
        [(self.a, self.b, self.c), (self.b, self.c, self.a), (self.c, self.a, self.b)]
    }
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    pub sites: Vec<Point>,
    pub triangles: Vec<Triangle>,
    /// Convex hull in counter-clockwise order, including sites lying on hull edges.
    pub hull: Vec<usize>,
}

impl Triangulation {
    pub fn circumcenters(&self) -> Vec<Point> {
        self.triangles
            .iter()
            .map(|t| {
                circumcenter(self.sites[t.a], self.sites[t.b], self.sites[t.c])
                    .expect("triangulation holds only non-degenerate triangles")
            })
            .collect()
    }

    /// Maps each directed edge `(u, v)` to the triangle on its left.
    fn edge_owners(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::with_capacity(self.triangles.len() * 3);
        for (ti, t) in self.triangles.iter().enumerate() {
            for (u, v, _) in t.edges() {
                map.insert((u, v), ti);
            }
        }
        map
    }
}

fn validate_sites(sites: &[Point]) -> Result<()> {
    if sites.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&i, &j| sites[i].lex_cmp(&sites[j]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if sites[j].x - sites[i].x > EPS_GEO {
                break;
            }
            if sites[i].dist(sites[j]) <= EPS_GEO {
                return Err(Error::DuplicateSite { x: sites[j].x, y: sites[j].y });
            }
        }
    }
    Ok(())
}

pub fn delaunay(sites: &[Point]) -> Result<Triangulation> {
    validate_sites(sites)?;
    if sites.len() < 3 {
        return Err(Error::TooFewSites(sites.len()));
    }
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&i, &j| sites[i].lex_cmp(&sites[j]));

    // Seed: the leading collinear run plus the first site off its line.
    let p0 = sites[order[0]];
    let p1 = sites[order[1]];
    let k = (2..order.len())
        .find(|&k| orient(p0, p1, sites[order[k]]) != 0.0)
        .ok_or(Error::AllCollinear)?;
    let apex = order[k];
    let left = orient(p0, p1, sites[apex]) > 0.0;
    let mut triangles = Vec::with_capacity(2 * sites.len());
    for w in order[..k].windows(2) {
        let (u, v) = if left { (w[0], w[1]) } else { (w[1], w[0]) };
        triangles.push(Triangle { a: u, b: v, c: apex });
    }
    let mut hull: Vec<usize> = if left {
        order[..=k].to_vec()
    } else {
        let mut h = vec![order[0], apex];
        h.extend(order[1..k].iter().rev());
        h
    };

    for &s in &order[k + 1..] {
        let p = sites[s];
        let h = hull.len();
        let visible: Vec<bool> = (0..h)
            .map(|i| orient(sites[hull[i]], sites[hull[(i + 1) % h]], p) < 0.0)
            .collect();
        // The lexicographically largest site is always a hull vertex, so at
        // least one edge is visible and the visible edges are contiguous.
        let first = (0..h)
            .find(|&i| visible[i] && !visible[(i + h - 1) % h])
            .expect("new site must see the hull");
        let mut count = 0;
        while visible[(first + count) % h] {
            let i = (first + count) % h;
            triangles.push(Triangle { a: hull[(i + 1) % h], b: hull[i], c: s });
            count += 1;
        }
        // Vertices strictly inside the visible chain leave the hull.
        let start = (first + 1) % h;
        let remove: Vec<usize> = (0..count - 1).map(|j| (start + j) % h).collect();
        let insert_after = first;
        let mut next = Vec::with_capacity(h + 1 - remove.len());
        for i in 0..h {
            if !remove.contains(&i) {
                next.push(hull[i]);
            }
            if i == insert_after {
                next.push(s);
            }
        }
        hull = next;
    }

    let mut tri = Triangulation { sites: sites.to_vec(), triangles, hull };
    legalize(&mut tri);
    Ok(tri)
}

/// Lawson flips until every interior edge is locally Delaunay.
fn legalize(tri: &mut Triangulation) {
    let mut owners = tri.edge_owners();
    let mut stack: Vec<(usize, usize)> = owners.keys().copied().filter(|&(u, v)| u < v).collect();
    stack.sort_unstable();
    while let Some((u, v)) = stack.pop() {
        let (Some(&t1), Some(&t2)) = (owners.get(&(u, v)), owners.get(&(v, u))) else {
            continue;
        };
        let opposite = |t: &Triangle, from: usize, to: usize| {
            t.edges().iter().find(|e| e.0 == from && e.1 == to).map(|e| e.2).unwrap()
        };
        let c = opposite(&tri.triangles[t1], u, v);
        let d = opposite(&tri.triangles[t2], v, u);
        let s = &tri.sites;
        if in_circle(s[u], s[v], s[c], s[d]) <= 0.0 {
            continue;
        }
        for t in [t1, t2] {
            for (a, b, _) in tri.triangles[t].edges() {
                owners.remove(&(a, b));
            }
        }
        tri.triangles[t1] = Triangle { a: u, b: d, c };
        tri.triangles[t2] = Triangle { a: d, b: v, c };
        for t in [t1, t2] {
            for (a, b, _) in tri.triangles[t].edges() {
                owners.insert((a, b), t);
            }
        }
        for (a, b) in [(u, d), (d, v), (v, c), (c, u)] {
            stack.push((a.min(b), a.max(b)));
        }
    }
}

/// Distance from `q` to the nearest point of `sites` (brute force).
pub fn nearest_distance(q: Point, sites: &[Point]) -> f64 {
    sites.iter().map(|s| q.dist2(*s)).fold(f64::INFINITY, f64::min).sqrt()
}

/// Vertices of the Voronoi diagram of `sites` clipped to `bbox`.
///
/// The set consists of the Delaunay circumcenters inside the box, every
/// crossing of a Voronoi edge (bounded or unbounded) with the box boundary,
/// and the four box corners. Near-coincident vertices are merged. The
/// result is sorted by descending distance to the nearest site, ties by
/// lexicographic (x, y).
pub fn voronoi_vertices(sites: &[Point], bbox: &BoundingBox) -> Result<Vec<Point>> {
    validate_sites(sites)?;
    if let Some(p) = sites.iter().find(|p| !bbox.contains_eps(**p, EPS_GEO)) {
        return Err(Error::InvalidInstance(format!("site {p} lies outside the bounding box")));
    }
    let mut raw: Vec<Point> = bbox.corners().to_vec();
    match delaunay(sites) {
        Ok(tri) => collect_triangulated(&tri, bbox, &mut raw),
        Err(Error::TooFewSites(_)) | Err(Error::AllCollinear) => collect_collinear(sites, bbox, &mut raw),
        Err(e) => return Err(e),
    }
    let mut verts = dedup(raw);
    let mut keyed: Vec<(f64, Point)> = verts.drain(..).map(|v| (nearest_distance(v, sites), v)).collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.lex_cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, v)| v).collect())
}

fn collect_triangulated(tri: &Triangulation, bbox: &BoundingBox, out: &mut Vec<Point>) {
    let centers = tri.circumcenters();
    out.extend(centers.iter().filter(|c| bbox.contains_eps(**c, EPS_GEO)).map(|c| bbox.clamp(*c)));
    let owners = tri.edge_owners();
    for (&(u, v), &t) in &owners {
        match owners.get(&(v, u)) {
            Some(&t2) if u < v => {
                let (a, b) = (centers[t], centers[t2]);
                let dir = Point::new(b.x - a.x, b.y - a.y);
                out.extend(bbox.boundary_crossings(a, dir, 0.0, 1.0));
            }
            Some(_) => {}
            None => {
                // Hull edge u -> v has the interior on its left; the Voronoi
                // edge of (u, v) leaves the circumcenter along the outward normal.
                let (su, sv) = (tri.sites[u], tri.sites[v]);
                let dir = Point::new(sv.y - su.y, su.x - sv.x);
                out.extend(bbox.boundary_crossings(centers[t], dir, 0.0, f64::INFINITY));
            }
        }
    }
}

/// Fewer than three sites, or all on one line: the Voronoi edges are the
/// parallel bisectors of consecutive sites.
fn collect_collinear(sites: &[Point], bbox: &BoundingBox, out: &mut Vec<Point>) {
    let mut sorted = sites.to_vec();
    sorted.sort_by(|a, b| a.lex_cmp(b));
    for w in sorted.windows(2) {
        let mid = Point::new(0.5 * (w[0].x + w[1].x), 0.5 * (w[0].y + w[1].y));
        let dir = Point::new(w[0].y - w[1].y, w[1].x - w[0].x);
        out.extend(bbox.boundary_crossings(mid, dir, f64::NEG_INFINITY, f64::INFINITY));
    }
}

fn dedup(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.lex_cmp(b));
    let mut kept: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        let dup = kept
            .iter()
            .rev()
            .take_while(|k| p.x - k.x <= EPS_DEDUP)
            .any(|k| k.dist(p) <= EPS_DEDUP);
        if !dup {
            kept.push(p);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_empty_circles(tri: &Triangulation) -> bool {
        tri.triangles.iter().all(|t| {
            let [a, b, c] = t.vertices().map(|i| tri.sites[i]);
            let cc = circumcenter(a, b, c).unwrap();
            let r = cc.dist(a);
            tri.sites.iter().all(|s| s.dist(cc) >= r - 1e-9 * (1.0 + r))
        })
    }

    #[test]
    fn circumcenter_examples() {
        let c = circumcenter(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 2.0)).unwrap();
        assert!((c.x - 1.0).abs() < 1e-12 && (c.y - 1.0).abs() < 1e-12);
        let h = 3f64.sqrt() / 2.0;
        let c = circumcenter(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)).unwrap();
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - 3f64.sqrt() / 6.0).abs() < 1e-12);
        assert!(matches!(
            circumcenter(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)),
            Err(Error::Degenerate)
        ));
    }

    #[test]
    fn three_points_one_triangle() {
        let tri = delaunay(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]).unwrap();
        assert_eq!(tri.triangles.len(), 1);
        assert_eq!(tri.hull.len(), 3);
        let t = tri.triangles[0];
        assert!(cross(tri.sites[t.a], tri.sites[t.b], tri.sites[t.c]) > 0.0);
    }

    #[test]
    fn cocircular_square() {
        let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        let tri = delaunay(&sq).unwrap();
        assert_eq!(tri.triangles.len(), 2);
        assert!(brute_force_empty_circles(&tri));
    }

    #[test]
    fn collinear_runs_and_errors() {
        assert!(matches!(delaunay(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]), Err(Error::TooFewSites(2))));
        let line: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(delaunay(&line), Err(Error::AllCollinear)));
        assert!(matches!(
            delaunay(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 0.0)]),
            Err(Error::DuplicateSite { .. })
        ));
        // Collinear prefix followed by an apex on either side.
        for apex_y in [1.0, -1.0] {
            let mut pts: Vec<Point> = (0..4).map(|i| Point::new(0.0, i as f64)).collect();
            pts.push(Point::new(1.0, apex_y));
            let tri = delaunay(&pts).unwrap();
            assert_eq!(tri.triangles.len(), 2 * 5 - 2 - tri.hull.len());
            assert!(brute_force_empty_circles(&tri));
        }
    }

    #[test]
    fn grid_points_with_many_cocircular_quads() {
        let pts: Vec<Point> = (0..6).flat_map(|i| (0..5).map(move |j| Point::new(i as f64, j as f64))).collect();
        let tri = delaunay(&pts).unwrap();
        assert_eq!(tri.hull.len(), 18);
        assert_eq!(tri.triangles.len(), 2 * pts.len() - 2 - tri.hull.len());
        assert!(brute_force_empty_circles(&tri));
    }

    #[test]
    fn voronoi_of_two_sites() {
        let bbox = BoundingBox::square10();
        let v = voronoi_vertices(&[Point::new(2.0, 5.0), Point::new(8.0, 5.0)], &bbox).unwrap();
        assert_eq!(v.len(), 6);
        assert!(v.contains(&Point::new(5.0, 0.0)) && v.contains(&Point::new(5.0, 10.0)));
    }

    #[test]
    fn voronoi_of_one_site_is_the_corners() {
        let bbox = BoundingBox::square10();
        let v = voronoi_vertices(&[Point::new(1.0, 2.0)], &bbox).unwrap();
        assert_eq!(v.len(), 4);
        // Farthest corner from (1, 2) comes first.
        assert_eq!(v[0], Point::new(10.0, 10.0));
    }

    #[test]
    fn voronoi_vertex_set_is_sorted_and_inside() {
        let pts = [Point::new(1.0, 1.0), Point::new(9.0, 2.0), Point::new(4.0, 8.0), Point::new(5.0, 4.0)];
        let bbox = BoundingBox::square10();
        let v = voronoi_vertices(&pts, &bbox).unwrap();
        let d: Vec<f64> = v.iter().map(|q| nearest_distance(*q, &pts)).collect();
        assert!(d.windows(2).all(|w| w[0] >= w[1]));
        assert!(v.iter().all(|q| bbox.contains(*q)));
    }

    #[test]
    fn sites_outside_box_are_rejected() {
        let bbox = BoundingBox::square10();
        assert!(voronoi_vertices(&[Point::new(11.0, 2.0)], &bbox).is_err());
        assert!(BoundingBox::new(1.0, 0.0, 1.0, 2.0).is_err());
    }
}
