//! Transform-order tests: quantile compositions, sign patterns of
//! `tail_Y(x) - tail_X(a x + b)` over parameter sweeps, and the
//! Saunders-Moran criterion for one-parameter families.

mod compose;
mod pattern;
mod sm;
mod sweep;

pub use compose::{quantile_compose, sample_composition, shape_probe, ShapeMode, ShapeResult};
pub use pattern::{convex_allows, sign_pattern, star_allows, SignPattern};
pub use sm::{saunders_moran_d, sm_order_test, Monotonicity, SmFamily, SmRelation, SmVerdict};
pub use sweep::{
    convex_order_test, default_a_sweep, star_order_test, v_values, CandidateSource, ConvexRelation, ConvexTestResult,
    DirectionReport, SweepConfig, Witness,
};
