//! Second-order discrete maps, their invariant, and trajectories on the
//! resolved surface.

mod contour;
mod params;
mod passage;
mod step;
mod surface;
mod trajectory;

use thiserror::Error;

use crate::elliptic::EllipticError;
use crate::precision::ArithError;

pub use contour::{contour_grid, level_range, ContourGrid, GridSpec};
pub use params::{inverse_z, DP1Params, ErcgCoefficients, ErcgParams, MapId, MapParams, QP1Params};
pub use passage::{Limit, MAX_PASSAGE};
pub use step::{ercg_linear_groups, k_defect, k_invariant, step_dp1, step_ercg, step_qp1, step_qp1_auto};
pub use surface::{ChartId, Proj, SurfacePoint};
pub use trajectory::{
    real_seed, run_trajectory, run_trajectory_from_point, ChartSwitch, Diagnostic, Direction, PassageRecord, Trajectory,
    TrajectoryOptions, TrajectoryRow,
};

#[derive(Debug, Error)]
pub enum StepError {
    #[error("singular step at n = {n}: w = {w}, previous entry {w_prev}")]
    Singular { n: i64, w_prev: String, w: String },
    #[error("w = {w} coincides with the base-point coordinate 1/z")]
    BasePointProximity { w: String },
    #[error("indeterminate step at n = {n}: coefficient groups A = {}, B = {}, C = {}", groups[0], groups[1], groups[2])]
    Indeterminate { n: i64, groups: [String; 3] },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invariant is undefined for a zero argument")]
    ZeroArgument,
    #[error("chart error: {0}")]
    Chart(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}
