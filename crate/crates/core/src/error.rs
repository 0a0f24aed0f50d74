use std::path::PathBuf;

use crate::discrete::DiscreteSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate triangle: points are collinear")]
    Degenerate,
    #[error("need at least 3 distinct sites, got {0}")]
    TooFewSites(usize),
    #[error("all sites are collinear")]
    AllCollinear,
    #[error("duplicate site at ({x}, {y})")]
    DuplicateSite { x: f64, y: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("invalid bounding box: [{xmin}, {xmax}] x [{ymin}, {ymax}]")]
    InvalidBox { xmin: f64, ymin: f64, xmax: f64, ymax: f64 },
    #[error("the obnoxious point set is empty")]
    EmptyObnoxiousSet,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("only {m} candidate sites available for p = {p}")]
    InfeasibleCardinality { m: usize, p: usize },
    #[error("no feasible candidate sites at this minimum distance")]
    NoFeasibleCandidates,
    #[error("search budget exhausted before optimality was proven (incumbent {:.4})", .0.objective)]
    BudgetExhausted(Box<DiscreteSolution>),
    #[error("start facility {index} violates the minimum distance (nearest {nearest} < {dmin})")]
    InfeasibleStart { index: usize, nearest: f64, dmin: f64 },
    #[error("could not draw any feasible sample point")]
    NoFeasibleSample,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
