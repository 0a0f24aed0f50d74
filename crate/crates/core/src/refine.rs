//! Continuous improvement of a feasible facility configuration.
//!
//! Location-allocation: assign every demand point to its closest facility,
//! then move each facility toward the weighted geometric median of its
//! cluster with damped Weiszfeld steps that never leave the feasible set
//! (at least `dmin` from every obnoxious point, inside the bounding box).
//! Only feasible, objective-improving iterates are accepted, so the
//! objective is non-increasing round over round.

use rayon::prelude::*;
use serde::Serialize;

use crate::candidates::sample_feasible;
use crate::error::{Error, Result};
use crate::geometry::{nearest_distance, Point};
use crate::instance::Instance;
use crate::rng::Lcg64;

/// Slack on the minimum-distance constraint for accepted facilities.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Stop when the relative improvement of a step or round falls below this.
    pub tol: f64,
    /// Weiszfeld iterations per facility per round.
    pub max_iter: usize,
    pub max_rounds: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { tol: 1e-7, max_iter: 1000, max_rounds: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousSolution {
    pub facilities: Vec<Point>,
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub feasible: bool,
    /// Objective after each round; entry 0 is the start.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// Closest-facility assignment (ties to the lowest index) and weighted objective.
pub fn assign(facilities: &[Point], instance: &Instance) -> (Vec<usize>, f64) {
    assert!(!facilities.is_empty(), "at least one facility");
    let mut objective = 0.0;
    let assignment = instance
        .demand()
        .iter()
        .map(|d| {
            let (best, dist) = facilities
                .iter()
                .enumerate()
                .map(|(k, f)| (k, d.location.dist(*f)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            objective += d.weight * dist;
            best
        })
        .collect();
    (assignment, objective)
}

fn cluster_cost(cluster: &[(Point, f64)], x: Point) -> f64 {
    cluster.iter().map(|(a, w)| w * a.dist(x)).sum()
}

/// The feasible set of a single facility.
struct Region<'a> {
    instance: &'a Instance,
    dmin: f64,
}

impl Region<'_> {
    fn clearance(&self, x: Point) -> f64 {
        if self.instance.obnoxious().is_empty() {
            f64::INFINITY
        } else {
            nearest_distance(x, self.instance.obnoxious())
        }
    }

    fn is_feasible(&self, x: Point) -> bool {
        self.instance.bbox().contains(x) && self.clearance(x) >= self.dmin - FEASIBILITY_SLACK
    }

    /// Pushes `z` out of violated disks, most violated first, at most ten
    /// times. `from` supplies the direction when `z` sits on a disk center.
    fn repair(&self, mut z: Point, from: Point) -> Option<Point> {
        let bbox = self.instance.bbox();
        z = bbox.clamp(z);
        if self.dmin <= 0.0 {
            return Some(z);
        }
        for _ in 0..10 {
            let worst = self
                .instance
                .obnoxious()
                .iter()
                .map(|o| (o, o.dist(z)))
                .filter(|(_, d)| *d < self.dmin)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            let Some((o, d)) = worst else { return Some(z) };
            let (ux, uy, len) = if d > 0.0 {
                (z.x - o.x, z.y - o.y, d)
            } else {
                let len = o.dist(from);
                if len == 0.0 {
                    return None;
                }
                (from.x - o.x, from.y - o.y, len)
            };
            // Land a hair outside the circle so rounding never leaves it infeasible.
            let r = self.dmin * (1.0 + 4.0 * f64::EPSILON);
            z = bbox.clamp(Point::new(o.x + r * ux / len, o.y + r * uy / len));
        }
        self.is_feasible(z).then_some(z)
    }
}

/// Weiszfeld target from `x`, or `None` when `x` coincides with a demand
/// point that is itself the unconstrained optimum.
fn weiszfeld_target(cluster: &[(Point, f64)], x: Point) -> Option<Point> {
    const COINCIDE: f64 = 1e-12;
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    let (mut gx, mut gy) = (0.0, 0.0);
    let mut pinned = 0.0;
    for &(a, w) in cluster {
        let d = a.dist(x);
        if d <= COINCIDE {
            pinned += w;
            continue;
        }
        sx += w * a.x / d;
        sy += w * a.y / d;
        sw += w / d;
        gx += w * (x.x - a.x) / d;
        gy += w * (x.y - a.y) / d;
    }
    if sw == 0.0 {
        return None;
    }
    if pinned == 0.0 {
        return Some(Point::new(sx / sw, sy / sw));
    }
    // One-sided test at a demand point: it is optimal iff the pull of the
    // remaining points does not exceed its own weight.
    let g = gx.hypot(gy);
    if g <= pinned {
        return None;
    }
    let step = (g - pinned) / sw;
    Some(Point::new(x.x - step * gx / g, x.y - step * gy / g))
}

/// Constrained single-facility Weber descent from a feasible `start`.
///
/// Each iteration proposes the Weiszfeld point, repairs it into the feasible
/// set, and accepts it only if the cluster cost drops; otherwise the step
/// is halved toward the current iterate. Never returns a point worse than
/// `start`.
pub fn constrained_weber(cluster: &[(Point, f64)], start: Point, instance: &Instance, dmin: f64, opts: &RefineOptions) -> Point {
    if cluster.is_empty() {
        return start;
    }
    let region = Region { instance, dmin };
    let mut x = start;
    let mut fx = cluster_cost(cluster, x);
    for _ in 0..opts.max_iter {
        let Some(target) = weiszfeld_target(cluster, x) else { break };
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let z = Point::new(x.x + step * (target.x - x.x), x.y + step * (target.y - x.y));
            if let Some(z) = region.repair(z, x) {
                let fz = cluster_cost(cluster, z);
                if fz < fx {
                    accepted = Some((z, fz));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((z, fz)) = accepted else { break };
        let gain = fx - fz;
        x = z;
        fx = fz;
        if gain <= opts.tol * fx.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

/// Location-allocation from a feasible start.
pub fn refine(instance: &Instance, dmin: f64, start: &[Point], opts: &RefineOptions) -> Result<ContinuousSolution> {
    if start.is_empty() {
        return Err(Error::Domain("at least one start facility required".into()));
    }
    let region = Region { instance, dmin };
    for (index, f) in start.iter().enumerate() {
        let nearest = region.clearance(*f);
        if nearest < dmin - FEASIBILITY_SLACK || !instance.bbox().contains(*f) {
            return Err(Error::InfeasibleStart { index, nearest, dmin });
        }
    }
    let mut facilities = start.to_vec();
    let (mut assignment, mut objective) = assign(&facilities, instance);
    let mut trace = vec![objective];
    for _ in 0..opts.max_rounds {
        let mut moved = facilities.clone();
        for (k, f) in moved.iter_mut().enumerate() {
            let cluster: Vec<(Point, f64)> = instance
                .demand()
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == k)
                .map(|(d, _)| (d.location, d.weight))
                .collect();
            *f = constrained_weber(&cluster, *f, instance, dmin, opts);
        }
        let (next_assignment, next_objective) = assign(&moved, instance);
        // Per-cluster costs only fall and reassignment only helps, so this
        // can fail solely through floating-point noise.
        if next_objective > objective {
            break;
        }
        let gain = objective - next_objective;
        facilities = moved;
        assignment = next_assignment;
        objective = next_objective;
        trace.push(objective);
        if gain <= opts.tol * objective.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let feasible = facilities.iter().all(|f| region.is_feasible(*f));
    Ok(ContinuousSolution { facilities, assignment, objective, feasible, trace })
}

/// Feasible points drawn per multistart pool.
pub const MULTISTART_POOL: usize = 10_000;

/// Best refinement over `tries` starts, each `p` distinct points drawn from
/// a pool of uniformly sampled feasible points.
pub fn multistart_random(instance: &Instance, dmin: f64, p: usize, tries: usize, seed: u64, opts: &RefineOptions) -> Result<ContinuousSolution> {
    if p == 0 || tries == 0 {
        return Err(Error::Domain("p and tries must be positive".into()));
    }
    let pool = sample_feasible(instance, dmin, MULTISTART_POOL.max(p), seed).points;
    if pool.len() < p {
        return Err(Error::NoFeasibleSample);
    }
    let results: Vec<Result<ContinuousSolution>> = (0..tries)
        .into_par_iter()
        .map(|t| {
            let mut rng = Lcg64::derive(seed, t as u64);
            let start: Vec<Point> = rng.sample_indices(pool.len(), p).into_iter().map(|i| pool[i]).collect();
            refine(instance, dmin, &start, opts)
        })
        .collect();
    let mut best: Option<ContinuousSolution> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.objective < b.objective) {
            best = Some(r);
        }
    }
    Ok(best.expect("tries > 0"))
}

/// `round,objective` rows for convergence plots.
pub fn trace_csv(solution: &ContinuousSolution) -> String {
    let mut s = String::from("round,objective\n");
    for (r, v) in solution.trace.iter().enumerate() {
        s.push_str(&format!("{r},{v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundingBox;
    use crate::instance::DemandPoint;

    fn instance(demand: &[(f64, f64)], obnoxious: &[(f64, f64)]) -> Instance {
        let demand = demand.iter().map(|&(x, y)| DemandPoint { location: Point::new(x, y), weight: 1.0 }).collect();
        let obn = obnoxious.iter().map(|&(x, y)| Point::new(x, y)).collect();
        Instance::new(demand, obn, BoundingBox::new(-5.0, -5.0, 5.0, 5.0).unwrap()).unwrap()
    }

    #[test]
    fn assign_single_and_coincident() {
        let inst = instance(&[(0.0, 0.0), (3.0, 4.0)], &[]);
        let (a, v) = assign(&[Point::new(0.0, 0.0)], &inst);
        assert_eq!(a, vec![0, 0]);
        assert_eq!(v, 5.0);
        let (a, v) = assign(&[Point::new(0.0, 0.0), Point::new(3.0, 4.0)], &inst);
        assert_eq!(a, vec![0, 1]);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn unconstrained_single_point_cluster() {
        let inst = instance(&[(1.0, 1.0)], &[(-3.0, -3.0)]);
        let x = constrained_weber(&[(Point::new(1.0, 1.0), 1.0)], Point::new(0.0, 0.0), &inst, 1.0, &RefineOptions::default());
        assert!(x.dist(Point::new(1.0, 1.0)) < 1e-9);
    }

    #[test]
    fn demand_point_on_an_obnoxious_point() {
        let inst = instance(&[(1.0, 1.0)], &[(1.0, 1.0)]);
        let start = Point::new(3.0, 1.0);
        let x = constrained_weber(&[(Point::new(1.0, 1.0), 2.0)], start, &inst, 0.5, &RefineOptions::default());
        let d = x.dist(Point::new(1.0, 1.0));
        assert!((d - 0.5).abs() < 1e-9, "distance {d}");
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let inst = instance(&[(0.0, 0.0)], &[(0.0, 0.0)]);
        let err = refine(&inst, 1.0, &[Point::new(0.5, 0.0)], &RefineOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleStart { index: 0, .. }));
    }

    #[test]
    fn facilities_on_feasible_demand_points_stay_put() {
        let inst = instance(&[(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)], &[(2.0, 2.0)]);
        let start = inst.demand_points();
        let sol = refine(&inst, 1.0, &start, &RefineOptions::default()).unwrap();
        assert_eq!(sol.facilities, start);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn empty_cluster_keeps_its_facility() {
        let inst = instance(&[(0.0, 0.0), (1.0, 0.0)], &[]);
        let far = Point::new(4.0, 4.0);
        let sol = refine(&inst, 0.0, &[Point::new(0.5, 0.5), far], &RefineOptions::default()).unwrap();
        assert_eq!(sol.facilities[1], far);
        assert!(sol.objective <= 1.0 + 1e-6);
    }
}
