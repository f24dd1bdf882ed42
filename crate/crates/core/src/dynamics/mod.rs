//! Evaluation of internal expressions.

pub mod forms;
pub mod step;
pub mod subst;

pub use forms::{is_boxed_value, is_complete_ext, is_complete_int, is_complete_type, is_final, is_indet, is_value};
pub use step::{
    decompose, instr, multi_step, multi_step_with, step, Decomposition, EvalCtx, EvalError, FinalKind, Outcome, Rule,
    Run, StepOutcome,
};
pub use subst::{subst, subst_env};
