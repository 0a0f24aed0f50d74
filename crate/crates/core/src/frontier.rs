//! Efficient frontier of best objective versus minimum distance.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::candidates::{all_candidates, feasible_candidates};
use crate::discrete::{build_matrix, solve_discrete, DiscreteOptions, DistanceMatrix};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::instance::Instance;
use crate::refine::{assign, multistart_random, refine, ContinuousSolution, RefineOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub discrete: DiscreteOptions,
    pub refine: RefineOptions,
    /// Random starts for the unconstrained (`dmin = 0`) solve.
    pub tries: usize,
    pub seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { discrete: DiscreteOptions::default(), refine: RefineOptions::default(), tries: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierRecord {
    pub dmin: f64,
    pub objective: f64,
    pub facilities: Vec<Point>,
    /// Feasible candidate sites at this distance.
    pub candidate_count: usize,
    /// Whether the discrete stage proved optimality.
    pub proven: bool,
    /// Replaced by a better solution found at a larger distance.
    pub repaired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FrontierEntry {
    Record(FrontierRecord),
    Gap { dmin: f64, candidate_count: usize, reason: String },
}

impl FrontierEntry {
    pub fn dmin(&self) -> f64 {
        match self {
            FrontierEntry::Record(r) => r.dmin,
            FrontierEntry::Gap { dmin, .. } => *dmin,
        }
    }

    pub fn record(&self) -> Option<&FrontierRecord> {
        match self {
            FrontierEntry::Record(r) => Some(r),
            FrontierEntry::Gap { .. } => None,
        }
    }
}

/// Unconstrained p-median: the best of random multistarts and a start from
/// the discrete p-median over the demand points themselves.
pub fn solve_unconstrained(instance: &Instance, p: usize, opts: &PipelineOptions) -> Result<ContinuousSolution> {
    let demand = instance.demand_points();
    let mut best = multistart_random(instance, 0.0, p, opts.tries, opts.seed, &opts.refine)?;
    if demand.len() >= p {
        let matrix = DistanceMatrix::from_points(&demand, &demand);
        let mut dopts = opts.discrete;
        dopts.mode = crate::discrete::SolveMode::Heuristic;
        let seeded = solve_discrete(&matrix, &instance.weights(), p, &dopts)?;
        let start: Vec<Point> = seeded.selected.iter().map(|&j| demand[j]).collect();
        let sol = refine(instance, 0.0, &start, &opts.refine)?;
        if sol.objective < best.objective {
            best = sol;
        }
    }
    Ok(best)
}

/// Voronoi-seeded pipeline at one distance: feasible candidates, discrete
/// p-median over them, continuous refinement.
pub fn solve_one(instance: &Instance, p: usize, dmin: f64, opts: &PipelineOptions) -> Result<FrontierRecord> {
    if p == 0 {
        return Err(Error::Domain("p must be at least 1".into()));
    }
    if !(dmin >= 0.0) {
        return Err(Error::Domain(format!("minimum distance must be non-negative, got {dmin}")));
    }
    if dmin == 0.0 {
        let sol = solve_unconstrained(instance, p, opts)?;
        let candidate_count = all_candidates(instance).map(|c| c.len()).unwrap_or(0);
        return Ok(FrontierRecord {
            dmin,
            objective: sol.objective,
            facilities: sol.facilities,
            candidate_count,
            proven: false,
            repaired: false,
        });
    }
    let candidates = feasible_candidates(instance, dmin)?;
    let m = candidates.len();
    if m == 0 {
        return Err(Error::NoFeasibleCandidates);
    }
    if m < p {
        return Err(Error::InfeasibleCardinality { m, p });
    }
    let matrix = build_matrix(instance, &candidates);
    let discrete = match solve_discrete(&matrix, &instance.weights(), p, &opts.discrete) {
        Ok(s) => s,
        Err(Error::BudgetExhausted(s)) => *s,
        Err(e) => return Err(e),
    };
    let start: Vec<Point> = discrete.selected.iter().map(|&j| candidates[j].location).collect();
    let sol = refine(instance, dmin, &start, &opts.refine)?;
    Ok(FrontierRecord {
        dmin,
        objective: sol.objective,
        facilities: sol.facilities,
        candidate_count: m,
        proven: discrete.proven,
        repaired: false,
    })
}

/// `steps + 1` evenly spaced distances from 0 to `max`.
pub fn uniform_grid(max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps).map(|k| max * k as f64 / steps as f64).collect()
}

/// Default grid: 0 to 1.2 times the largest candidate clearance, 60 steps.
pub fn default_grid(instance: &Instance) -> Result<Vec<f64>> {
    let top = all_candidates(instance)?.first().map_or(0.0, |c| c.d_nearest);
    Ok(uniform_grid(1.2 * top, 60))
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("empty distance grid".into()));
    }
    if grid.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(Error::Domain("grid values must be finite and non-negative".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Solve every grid distance, then enforce the lower envelope.
///
/// Feasible sets shrink as the distance grows, so a solution found at a
/// larger distance is feasible at every smaller one; a smaller-distance
/// record that is worse is replaced by it and flagged as repaired.
pub fn sweep(instance: &Instance, p: usize, grid: &[f64], opts: &PipelineOptions) -> Result<Vec<FrontierEntry>> {
    validate_grid(grid)?;
    let mut entries: Vec<FrontierEntry> = grid
        .par_iter()
        .map(|&dmin| match solve_one(instance, p, dmin, opts) {
            Ok(r) => Ok(FrontierEntry::Record(r)),
            Err(e @ (Error::NoFeasibleCandidates | Error::InfeasibleCardinality { .. })) => {
                let candidate_count = match &e {
                    Error::InfeasibleCardinality { m, .. } => *m,
                    _ => 0,
                };
                Ok(FrontierEntry::Gap { dmin, candidate_count, reason: e.to_string() })
            }
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    repair_envelope(instance, &mut entries);
    Ok(entries)
}

fn repair_envelope(instance: &Instance, entries: &mut [FrontierEntry]) {
    let mut best: Option<(f64, Vec<Point>)> = None;
    for entry in entries.iter_mut().rev() {
        let FrontierEntry::Record(r) = entry else { continue };
        match &best {
            Some((obj, facilities)) if *obj < r.objective => {
                // Recompute in place so the record stays self-consistent.
                let (_, objective) = assign(facilities, instance);
                r.objective = objective;
                r.facilities = facilities.clone();
                r.repaired = true;
            }
            _ => best = Some((r.objective, r.facilities.clone())),
        }
    }
}

/// `D,objective,m,proven,x1,y1,...,xp,yp`; gaps leave the solution fields empty.
pub fn frontier_csv(entries: &[FrontierEntry], p: usize) -> String {
    let mut s = String::from("D,objective,m,proven");
    for k in 1..=p {
        write!(s, ",x{k},y{k}").unwrap();
    }
    s.push('\n');
    for e in entries {
        match e {
            FrontierEntry::Record(r) => {
                write!(s, "{},{},{},{}", r.dmin, r.objective, r.candidate_count, r.proven).unwrap();
                for f in &r.facilities {
                    write!(s, ",{},{}", f.x, f.y).unwrap();
                }
            }
            FrontierEntry::Gap { dmin, candidate_count, .. } => {
                write!(s, "{dmin},,{candidate_count},").unwrap();
                for _ in 0..p {
                    s.push_str(",,");
                }
            }
        }
        s.push('\n');
    }
    s
}

/// Static SVG line chart of objective against distance.
pub fn frontier_svg(entries: &[FrontierEntry], p: usize) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    let pts: Vec<(f64, f64)> = entries.iter().filter_map(|e| e.record()).map(|r| (r.dmin, r.objective)).collect();
    let (x0, x1) = span(entries.iter().map(|e| e.dmin()));
    let (y0, y1) = span(pts.iter().map(|p| p.1));
    let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let sy = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">Efficient frontier, p = {p}</text>"#, W / 2.0).unwrap();
    writeln!(
        s,
        r#"<path d="M{L},{T} V{} H{}" fill="none" stroke="black"/>"#,
        H - B,
        W - R
    )
    .unwrap();
    for k in 0..=5 {
        let x = x0 + (x1 - x0) * k as f64 / 5.0;
        let y = y0 + (y1 - y0) * k as f64 / 5.0;
        writeln!(s, r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/>"#, sx(x), H - B, H - B + 5.0).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{:.2}</text>"#, sx(x), H - B + 18.0, x).unwrap();
        writeln!(s, r#"<line x1="{}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="black"/>"#, L - 5.0, sy(y), L).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{:.2}</text>"#, L - 8.0, sy(y) + 4.0, y).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">minimum distance D</text>"#, (L + W - R) / 2.0, H - 12.0).unwrap();
    writeln!(s, r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">objective</text>"#, (T + H - B) / 2.0).unwrap();
    if !pts.is_empty() {
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, path.join(" ")).unwrap();
        for &(x, y) in &pts {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#, sx(x), sy(y)).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Axis range, widened when degenerate.
fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.5;
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}
