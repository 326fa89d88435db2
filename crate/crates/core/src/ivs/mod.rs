//! Pencils of curves, their base points, and resolution by blow-ups with
//! intersection bookkeeping and Dynkin-diagram identification.

mod base_points;
mod blowup;
mod dynkin;
mod pencil;
mod qp1_chart;

use thiserror::Error;

pub use base_points::{base_points, BaseLocus, BasePoint, UnsupportedLocus};
pub use blowup::{blow_up, resolve, resolve_with, BlowupRecord, Curve, CurveKind, ResolutionRecord, ResolveOptions};
pub use dynkin::{affine_templates, dynkin, DynkinGraph};
pub use pencil::{Ambient, Chart, ChartParent, Pencil, Region};
pub use qp1_chart::{qp1_basepoint_chart, Qp1BasepointChart};

#[derive(Debug, Error, PartialEq)]
pub enum IvsError {
    #[error("pencil members share a common factor in chart {chart}")]
    CommonFactor { chart: String },
    #[error("base point ({x}, {y}) in chart {chart} is not an unresolved base point")]
    NotABasePoint { chart: String, x: String, y: String },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
