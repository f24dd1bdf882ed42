//! The pipeline from source text to evaluated, indexed results, shared by
//! the command line, the HTTP service, and the C interface.

use std::fmt;

use serde::Serialize;

use crate::closures::{index_closures, ClosureIndex};
use crate::dynamics::{is_value, multi_step, multi_step_with, EvalError, Outcome, Rule, Run};
use crate::elaborate::{assign_type, elab_ana, elaborate, Elab};
use crate::fill::{fill, fill_typed, FillError};
use crate::statics::TypeError;
use crate::surface::{parse_with, print_ctx, print_ty, ParseError, ParseOptions, Span, SpanTree};
use crate::syntax::{alpha_equiv, ExtExpr, HoleCtx, HoleName, IntExpr, Ty, TypingCtx};

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A message tied to a source range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    /// Typing rule that failed, for type errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl Diagnostic {
    fn at(src: &str, span: Span, severity: Severity, message: String, rule: Option<String>) -> Self {
        let (line, col) = span.line_col(src);
        Diagnostic { severity, message, rule, start: span.start, end: span.end, line, col }
    }

    pub fn from_parse(src: &str, err: &ParseError) -> Self {
        Diagnostic::at(src, err.span, Severity::Error, err.message.clone(), None)
    }

    pub fn from_type(src: &str, spans: &SpanTree, err: &TypeError) -> Self {
        let span = spans.at(&err.path).unwrap_or(spans.span);
        Diagnostic::at(src, span, Severity::Error, err.to_string(), Some(err.rule.to_owned()))
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {tag}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub free_vars_as_holes: bool,
}

/// A program that parsed and elaborated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub source: String,
    pub ext: ExtExpr,
    pub elab: Elab,
    pub warnings: Vec<Diagnostic>,
}

/// Parse and elaborate. On failure, the diagnostics (warnings included).
pub fn load(src: &str, opts: &Options) -> Result<Program, Vec<Diagnostic>> {
    let popts = ParseOptions { free_vars_as_holes: opts.free_vars_as_holes, ..Default::default() };
    let parsed = parse_with(src, &popts).map_err(|e| vec![Diagnostic::from_parse(src, &e)])?;
    let warnings: Vec<_> = parsed
        .free_vars
        .iter()
        .filter(|_| opts.free_vars_as_holes)
        .map(|(x, span)| {
            Diagnostic::at(src, *span, Severity::Warning, format!("free variable `{x}` treated as a hole"), None)
        })
        .collect();
    match elaborate(&parsed.expr) {
        Ok(elab) => Ok(Program { source: src.to_owned(), ext: parsed.expr, elab, warnings }),
        Err(err) => {
            let mut diags = warnings;
            diags.push(Diagnostic::from_type(src, &parsed.spans, &err));
            Err(diags)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// The result lost its type. Evaluation preserves types, so this is a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl RunError {
    pub fn is_invariant(&self) -> bool {
        matches!(self, RunError::Invariant(_) | RunError::Eval(EvalError::Stuck(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub run: Run,
    pub index: ClosureIndex,
}

fn check_preserved(holes: &HoleCtx, ty: &Ty, d: &IntExpr) -> Result<(), RunError> {
    match assign_type(holes, &TypingCtx::new(), d) {
        Ok(t) if t == *ty => Ok(()),
        Ok(t) => Err(RunError::Invariant(format!("result has type {} instead of {}", print_ty(&t), print_ty(ty)))),
        Err(e) => Err(RunError::Invariant(format!("result is ill-typed: {e}"))),
    }
}

fn finish(run: Run, holes: &HoleCtx, ty: &Ty) -> Result<Evaluation, RunError> {
    check_preserved(holes, ty, &run.expr)?;
    let index = index_closures(&run.expr);
    Ok(Evaluation { run, index })
}

/// Evaluate an elaborated program and index the closures in its result.
pub fn evaluate(elab: &Elab, fuel: usize) -> Result<Evaluation, RunError> {
    finish(multi_step(&elab.expr, fuel)?, &elab.holes, &elab.ty)
}

/// Index a run of `elab`, or of a state reached from it.
pub fn evaluate_run(run: Run, elab: &Elab) -> Result<Evaluation, RunError> {
    finish(run, &elab.holes, &elab.ty)
}

/// Like [`evaluate`], recording the rule and result of every step.
pub fn evaluate_traced(elab: &Elab, fuel: usize) -> Result<(Evaluation, Vec<(Rule, IntExpr)>), RunError> {
    let mut trace = Vec::new();
    let run = multi_step_with(&elab.expr, fuel, |d, rule| trace.push((rule, d.clone())))?;
    Ok((finish(run, &elab.holes, &elab.ty)?, trace))
}

/// Up to `n` steps from `d`.
pub fn trace(d: &IntExpr, n: usize) -> Result<(Vec<(Rule, IntExpr)>, Outcome), EvalError> {
    let mut out = Vec::new();
    let run = multi_step_with(d, n, |d, rule| out.push((rule, d.clone())))?;
    Ok((out, run.outcome))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentError {
    /// The hole is not among the program's unfilled holes.
    UnknownHole(HoleName),
    /// The fragment does not parse, or does not check against the hole.
    Rejected {
        diagnostics: Vec<Diagnostic>,
        expected: Ty,
        ctx: TypingCtx,
    },
    Run(RunError),
}

impl fmt::Display for FragmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentError::UnknownHole(u) => write!(f, "no unfilled hole named `{u}`"),
            FragmentError::Rejected { diagnostics, expected, ctx } => {
                write!(f, "fragment does not fit hole of type {}[{}]", print_ty(expected), print_ctx(ctx))?;
                for d in diagnostics {
                    write!(f, "\n{d}")?;
                }
                Ok(())
            }
            FragmentError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FragmentError {}

/// Result of filling a hole in an evaluated program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filled {
    /// The program with the fragment in place of the hole.
    pub program: Program,
    pub filler: IntExpr,
    /// Catch-up evaluation from the filled state.
    pub evaluation: Evaluation,
}

/// Elaborate `fragment` against hole `u`'s contextual type, fill it into the
/// evaluated `state`, and resume.
pub fn fill_fragment(
    program: &Program,
    state: &IntExpr,
    u: &HoleName,
    fragment: &str,
    fuel: usize,
    opts: &Options,
) -> Result<Filled, FragmentError> {
    let h = program.elab.holes.get(u).ok_or_else(|| FragmentError::UnknownHole(u.clone()))?.clone();
    let rejected = |diagnostics| FragmentError::Rejected { diagnostics, expected: h.ty.clone(), ctx: h.ctx.clone() };
    // u included: a fragment hole named u would be captured by the fill
    let reserved = program.ext.hole_names().into_iter().collect();
    let popts = ParseOptions { free_vars_as_holes: opts.free_vars_as_holes, reserved_holes: reserved };
    let parsed = parse_with(fragment, &popts).map_err(|e| rejected(vec![Diagnostic::from_parse(fragment, &e)]))?;
    let r = elab_ana(&h.ctx, &parsed.expr, &h.ty)
        .map_err(|e| rejected(vec![Diagnostic::from_type(fragment, &parsed.spans, &e)]))?;
    let filler = if r.ty == h.ty { r.expr } else { IntExpr::cast(r.expr, r.ty, h.ty.clone()) };
    let rest = program.elab.holes.remove(u);
    let holes = rest.union(r.holes).map_err(|v| {
        let span = parsed.spans.span;
        rejected(vec![Diagnostic::at(
            fragment,
            span,
            Severity::Error,
            format!("hole name `{v}` is already used in the program"),
            None,
        )])
    })?;
    let with_u = holes
        .clone()
        .union(HoleCtx::singleton(u.clone(), h.ctx.clone(), h.ty.clone()))
        .map_err(FragmentError::UnknownHole)?;
    let (filled, _) = fill_typed(&with_u, u, &filler, state).map_err(|e| match e {
        FillError::UnknownHole(v) => FragmentError::UnknownHole(v),
        FillError::IllTyped { .. } => FragmentError::Run(RunError::Invariant(e.to_string())),
        FillError::Eval(e) => FragmentError::Run(e.into()),
    })?;
    let run = multi_step(&filled, fuel).map_err(|e| FragmentError::Run(e.into()))?;
    let elab = Elab { expr: fill(&filler, u, &program.elab.expr), ty: program.elab.ty.clone(), holes };
    let evaluation = finish(run, &elab.holes, &elab.ty).map_err(FragmentError::Run)?;
    let ext = program.ext.replace_hole(u, &parsed.expr);
    let program = Program { source: crate::surface::print_ext(&ext), ext, elab, warnings: Vec::new() };
    Ok(Filled { program, filler, evaluation })
}

/// Whether a resumed result matches a run from scratch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub fresh: Run,
    /// `None` when either run ran out of fuel.
    pub agree: Option<bool>,
    /// Agreement is guaranteed: the program has base or num type and the
    /// fresh result is a value. Otherwise a filling left inside a closure
    /// environment stays unevaluated after resuming, and results can differ.
    pub guaranteed: bool,
}

impl Verification {
    /// Disagreement where agreement is guaranteed.
    pub fn violated(&self) -> bool {
        self.guaranteed && self.agree == Some(false)
    }
}

pub fn verify(elab: &Elab, resumed: &Run, fuel: usize) -> Result<Verification, RunError> {
    let fresh = multi_step(&elab.expr, fuel)?;
    let agree = (fresh.outcome != Outcome::FuelExhausted && resumed.outcome != Outcome::FuelExhausted)
        .then(|| alpha_equiv(&fresh.expr, &resumed.expr));
    let guaranteed = matches!(elab.ty, Ty::Base | Ty::Num) && is_value(&fresh.expr);
    Ok(Verification { fresh, agree, guaranteed })
}
