//! JSON solution reports shared by the command-line tools.

use serde::Serialize;

use crate::candidates::CandidateSite;
use crate::discrete::DiscreteSolution;
use crate::geometry::Point;
use crate::refine::ContinuousSolution;

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteReport {
    pub objective: f64,
    pub proven: bool,
    pub selected: Vec<usize>,
    pub facilities: Vec<Point>,
    pub assignment: Vec<usize>,
}

impl DiscreteReport {
    pub fn new(solution: &DiscreteSolution, candidates: &[CandidateSite]) -> Self {
        DiscreteReport {
            objective: solution.objective,
            proven: solution.proven,
            selected: solution.selected.clone(),
            facilities: solution.selected.iter().map(|&j| candidates[j].location).collect(),
            assignment: solution.assignment.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub dmin: f64,
    pub p: usize,
    pub mode: String,
    pub candidate_count: usize,
    /// Absent when the unconstrained pipeline ran (`dmin = 0`).
    pub discrete: Option<DiscreteReport>,
    pub refined: ContinuousSolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineReport {
    pub dmin: f64,
    pub p: usize,
    pub tries: usize,
    pub seed: u64,
    pub voronoi_objective: f64,
    pub random_objective: f64,
    /// `(random - voronoi) / voronoi`, in percent, sign preserved.
    pub gap_percent: f64,
    pub voronoi: ContinuousSolution,
    pub random: ContinuousSolution,
}

pub fn gap_percent(random: f64, voronoi: f64) -> f64 {
    (random - voronoi) / voronoi * 100.0
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_sign_is_preserved() {
        assert_eq!(gap_percent(110.0, 100.0), 10.0);
        assert_eq!(gap_percent(90.0, 100.0), -10.0);
    }
}
