//! Combinatorial homotopies as replayable move lists, and the contraction procedures
//! for loops in horoballs, in the Cayley complex and in the cusped space.

mod cayley;
mod certificate;
mod compose;
mod horo;

use thiserror::Error;

use crate::complex::VertexId;
use crate::metric::MetricError;

pub use cayley::{contract_y_loop, DEFAULT_BUDGET};
pub use certificate::{
    apply_move, complement, verify_certificate, CertificateBuilder, ElementaryMove, HomotopyCertificate, RadiusBound,
    VerificationReport,
};
pub use compose::{
    contract_loop, contraction_radius_bound, fill_rectangle, ContractionBounds, LoopContraction, MeasuredRadii, QuadReport,
    Rectangle, RectangleSides, Stage, StageKind,
};
pub use horo::{
    contract_horoball_loop, halve_loop, log_bound, push_horoball_path_to_y, slide_loop_up, HalveResult, HoroballContraction,
    PushResult, SlideResult,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error("move {index} does not apply: {why}")]
    BadMove { index: usize, why: String },
    #[error("the path is not closed")]
    NotClosed,
    #[error("{0} is not in the horoball")]
    NotInHoroball(VertexId),
    #[error("the loop is not horizontal")]
    NotHorizontal,
    #[error("{0} is not in the Cayley complex")]
    NotInY(VertexId),
    #[error("path endpoints must lie at depth 0")]
    EndpointsNotInY,
    #[error("needs level {required} but the depth cap is {cap} (uncertified; raise the cap by {})", required - cap)]
    DepthHeadroom { required: u32, cap: u32 },
    #[error("face missing from the truncation: {0} (uncertified)")]
    MissingFace(String),
    #[error("move budget of {budget} exhausted (inconclusive)")]
    BudgetExhausted { budget: usize },
    #[error("no relator move applies to the remaining loop of length {length} (inconclusive)")]
    Stuck { length: usize },
    #[error("stage {stage}: {source}")]
    Stage { stage: String, source: Box<HomotopyError> },
    #[error("rung {index} has length {distance} > δ = {delta}")]
    NotFellowTravelling { index: usize, distance: u32, delta: u32 },
    #[error("{0}")]
    BadInput(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
