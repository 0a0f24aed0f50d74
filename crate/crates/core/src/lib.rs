//! Planar p-median with obnoxious-facility distance constraints.
//!
//! Facilities must stay at least `D` from every obnoxious point. The
//! pipeline seeds a discrete p-median with the vertices of the clipped
//! Voronoi diagram of the obnoxious points (one candidate per feasible
//! pocket), refines the discrete optimum by constrained location-allocation,
//! and sweeps `D` to trace the efficient frontier.

pub mod candidates;
pub mod discrete;
pub mod error;
pub mod frontier;
pub mod geometry;
pub mod instance;
pub mod refine;
pub mod report;
pub mod rng;

pub use candidates::{feasible_candidates, nearest_obnoxious, CandidateSite, TriangleAreaReport, TriangleFeasibleArea};
pub use discrete::{DiscreteOptions, DiscreteSolution, DistanceMatrix, SearchBudget, SolveMode};
pub use error::{Error, Result};
pub use frontier::{FrontierEntry, FrontierRecord, PipelineOptions};
pub use geometry::{BoundingBox, Point, Triangle, Triangulation};
pub use instance::{DemandPoint, Instance, SeedStream};
pub use refine::{ContinuousSolution, RefineOptions};
pub use rng::Lcg64;
