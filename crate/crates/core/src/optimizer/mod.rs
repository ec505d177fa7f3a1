//! The fair network-friendly recommendation LP: model building, tangent cuts
//! for the KL constraint, solving and policy recovery.

mod cuts;
mod lp_format;
mod model;
mod solve;

pub use cuts::{tangent_cuts, TangentCut, TangentCutFamily, DEFAULT_CUT_COUNT, DEFAULT_CUT_STEP};
pub use lp_format::{to_lp_string, write_lp};
pub use model::{
    build_fair_nfr_lp, build_fair_nfr_lp_with, candidate_set, CandidateMode, Constraint, ConstraintKind,
    FairnessConstraintSpec, FairnessMetric, LpModel, Relation, VarId, VarRole, Variable,
};
pub use solve::{recover_policy, solve, SolveResult, SolveStatus, DEFAULT_SOLVER_TOLERANCE, RECOVERY_TOLERANCE};
