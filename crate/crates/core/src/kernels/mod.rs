//! Optimization kernels shared by the design algorithms.

pub mod admm;
pub mod fractional;
pub mod projection;
pub mod rank;
pub mod roots;
pub mod sdp;

pub use admm::{admm_qcqp, AdmmOutput, AdmmSettings};
pub use fractional::{solve_fractional_sdp, FractionalSolution};
pub use projection::project_sphere_box;
pub use rank::{rank_reduction, rank_reduction_guarded};
pub use roots::bisection_root;
pub use sdp::{solve_sdp, SdpProblem, SdpSettings, SdpSolution, Sense, TraceConstraint};
