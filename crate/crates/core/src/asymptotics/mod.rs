//! Tail asymptotics: variation classes, limits along probe sequences, oblique
//! asymptotes of `h`, and the comparability decision built on them.

mod decide;
mod limits;
mod line;
mod variation;

pub use decide::{
    decide_comparability, matched_candidate, ComparisonVerdict, DecideConfig, Diagnostics, Relation, Route,
};
pub use limits::{
    erpv_probe, log_ratio_limit, neville_at_zero, tail_ratio_limit, variation_ratio_limit, LimitEstimate, LimitMethod,
    LimitValue, ProbeSequence, LIMIT_TOLERANCE, LOG_TAIL_CUTOFF, TREND_THRESHOLD,
};
pub use line::{
    asymptotic_line, density_sandwich_check, line_verdict, linearity_defect, locate_sandwich_threshold, LineConfig,
    LineVerdict, LinearAsymptote, SandwichReport,
};
pub use variation::{
    classify_tail, classify_variation, VariationClass, VariationLabel, VariationOrigin, SHIFT_TOLERANCE,
};
