//! Instruction transitions, evaluation contexts, and the eager left-to-right
//! stepper.

use std::fmt;

use super::forms::{is_arrow_cast, is_final, is_sum_cast};
use super::subst::subst;
use crate::statics::{ground_match, is_ground};
use crate::surface::print_int;
use crate::syntax::{Env, HoleName, IntExpr, Ty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Lam,
    ApCast,
    CastId,
    CastSucceed,
    CastFail,
    Ground,
    Expand,
    Plus,
    CaseInL,
    CaseInR,
    CaseCast,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Lam => "ITLam",
            Rule::ApCast => "ITApCast",
            Rule::CastId => "ITCastId",
            Rule::CastSucceed => "ITCastSucceed",
            Rule::CastFail => "ITCastFail",
            Rule::Ground => "ITGround",
            Rule::Expand => "ITExpand",
            Rule::Plus => "ITPlus",
            Rule::CaseInL => "ITCaseInL",
            Rule::CaseInR => "ITCaseInR",
            Rule::CaseCast => "ITCaseCast",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// A non-final term admits no transition. Well-typed terms never get here.
    #[error("internal invariant violated: no transition applies to non-final term `{0}`")]
    Stuck(String),
    #[error("arithmetic overflow in `{0}`")]
    Overflow(String),
}

/// Which instruction applies at the root, assuming the operands the rule
/// inspects are already final.
fn rule_at(d: &IntExpr) -> Option<Rule> {
    match d {
        IntExpr::Ap(f, _) => match &**f {
            IntExpr::LamAnn(..) => Some(Rule::Lam),
            IntExpr::Cast(_, t1 @ Ty::Arrow(..), t2 @ Ty::Arrow(..)) if t1 != t2 => Some(Rule::ApCast),
            _ => None,
        },
        IntExpr::Cast(inner, t1, t2) => {
            if t1 == t2 {
                return Some(Rule::CastId);
            }
            if let (IntExpr::Cast(_, g1, Ty::Hole), Ty::Hole) = (&**inner, t1) {
                if is_ground(g1) && is_ground(t2) {
                    return Some(if g1 == t2 { Rule::CastSucceed } else { Rule::CastFail });
                }
            }
            match (t1, t2) {
                (t, Ty::Hole) if ground_match(t).is_some() => Some(Rule::Ground),
                (Ty::Hole, t) if ground_match(t).is_some() => Some(Rule::Expand),
                _ => None,
            }
        }
        IntExpr::Plus(a, b) => match (&**a, &**b) {
            (IntExpr::NumLit(_), IntExpr::NumLit(_)) => Some(Rule::Plus),
            _ => None,
        },
        IntExpr::Case(s, ..) => match &**s {
            IntExpr::InL(..) => Some(Rule::CaseInL),
            IntExpr::InR(..) => Some(Rule::CaseInR),
            IntExpr::Cast(_, t1 @ Ty::Sum(..), t2 @ Ty::Sum(..)) if t1 != t2 => Some(Rule::CaseCast),
            _ => None,
        },
        _ => None,
    }
}

/// Fire `rule` at the root of `d`.
fn fire(rule: Rule, d: &IntExpr) -> Result<IntExpr, EvalError> {
    let shape = || EvalError::Stuck(print_int(d));
    Ok(match (rule, d) {
        (Rule::Lam, IntExpr::Ap(f, arg)) => match &**f {
            IntExpr::LamAnn(x, _, body) => subst(arg, x, body),
            _ => return Err(shape()),
        },
        (Rule::ApCast, IntExpr::Ap(f, arg)) => match &**f {
            IntExpr::Cast(inner, Ty::Arrow(a1, a2), Ty::Arrow(b1, b2)) => IntExpr::cast(
                IntExpr::ap((**inner).clone(), IntExpr::cast((**arg).clone(), (**b1).clone(), (**a1).clone())),
                (**a2).clone(),
                (**b2).clone(),
            ),
            _ => return Err(shape()),
        },
        (Rule::CastId, IntExpr::Cast(inner, _, _)) => (**inner).clone(),
        (Rule::CastSucceed, IntExpr::Cast(inner, _, _)) => match &**inner {
            IntExpr::Cast(v, _, _) => (**v).clone(),
            _ => return Err(shape()),
        },
        (Rule::CastFail, IntExpr::Cast(inner, _, t2)) => match &**inner {
            IntExpr::Cast(v, g1, _) => IntExpr::failed_cast((**v).clone(), g1.clone(), t2.clone()),
            _ => return Err(shape()),
        },
        (Rule::Ground, IntExpr::Cast(inner, t, _)) => {
            let g = ground_match(t).ok_or_else(shape)?;
            IntExpr::cast(IntExpr::cast((**inner).clone(), t.clone(), g.clone()), g, Ty::Hole)
        }
        (Rule::Expand, IntExpr::Cast(inner, _, t)) => {
            let g = ground_match(t).ok_or_else(shape)?;
            IntExpr::cast(IntExpr::cast((**inner).clone(), Ty::Hole, g.clone()), g, t.clone())
        }
        (Rule::Plus, IntExpr::Plus(a, b)) => match (&**a, &**b) {
            (IntExpr::NumLit(m), IntExpr::NumLit(n)) => {
                IntExpr::NumLit(m.checked_add(*n).ok_or_else(|| EvalError::Overflow(print_int(d)))?)
            }
            _ => return Err(shape()),
        },
        (Rule::CaseInL, IntExpr::Case(s, x, l, _, _)) => match &**s {
            IntExpr::InL(_, v) => subst(v, x, l),
            _ => return Err(shape()),
        },
        (Rule::CaseInR, IntExpr::Case(s, _, _, y, r)) => match &**s {
            IntExpr::InR(_, v) => subst(v, y, r),
            _ => return Err(shape()),
        },
        (Rule::CaseCast, IntExpr::Case(s, x, l, y, r)) => match &**s {
            IntExpr::Cast(inner, Ty::Sum(a1, a2), Ty::Sum(b1, b2)) => IntExpr::case(
                (**inner).clone(),
                x,
                subst(&IntExpr::cast(IntExpr::var(x), (**a1).clone(), (**b1).clone()), x, l),
                y,
                subst(&IntExpr::cast(IntExpr::var(y), (**a2).clone(), (**b2).clone()), y, r),
            ),
            _ => return Err(shape()),
        },
        _ => return Err(shape()),
    })
}

/// Instruction transition at the root of `d`, checking every finality
/// premise. `None` when `d` is not a redex.
pub fn instr(d: &IntExpr) -> Option<Result<(IntExpr, Rule), EvalError>> {
    let operands_final = match d {
        IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => is_final(a) && is_final(b),
        IntExpr::Cast(inner, ..) => is_final(inner),
        IntExpr::Case(s, ..) => is_final(s),
        _ => false,
    };
    if !operands_final {
        return None;
    }
    let rule = rule_at(d)?;
    Some(fire(rule, d).map(|out| (out, rule)))
}

/// Evaluation contexts: a term with one mark where the next step happens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalCtx {
    Mark,
    ApL(Box<EvalCtx>, IntExpr),
    ApR(IntExpr, Box<EvalCtx>),
    NonEmptyClosure(Box<EvalCtx>, HoleName, Env),
    Cast(Box<EvalCtx>, Ty, Ty),
    FailedCast(Box<EvalCtx>, Ty, Ty),
    PlusL(Box<EvalCtx>, IntExpr),
    PlusR(IntExpr, Box<EvalCtx>),
    InL(Ty, Box<EvalCtx>),
    InR(Ty, Box<EvalCtx>),
    Case(Box<EvalCtx>, String, IntExpr, String, IntExpr),
}

impl EvalCtx {
    /// Place `d` at the mark.
    pub fn plug(&self, d: IntExpr) -> IntExpr {
        match self {
            EvalCtx::Mark => d,
            EvalCtx::ApL(e, arg) => IntExpr::ap(e.plug(d), arg.clone()),
            EvalCtx::ApR(f, e) => IntExpr::ap(f.clone(), e.plug(d)),
            EvalCtx::NonEmptyClosure(e, u, env) => {
                IntExpr::NonEmptyClosure(Box::new(e.plug(d)), u.clone(), env.clone())
            }
            EvalCtx::Cast(e, t1, t2) => IntExpr::cast(e.plug(d), t1.clone(), t2.clone()),
            EvalCtx::FailedCast(e, t1, t2) => IntExpr::failed_cast(e.plug(d), t1.clone(), t2.clone()),
            EvalCtx::PlusL(e, b) => IntExpr::plus(e.plug(d), b.clone()),
            EvalCtx::PlusR(a, e) => IntExpr::plus(a.clone(), e.plug(d)),
            EvalCtx::InL(t, e) => IntExpr::inl(t.clone(), e.plug(d)),
            EvalCtx::InR(t, e) => IntExpr::inr(t.clone(), e.plug(d)),
            EvalCtx::Case(e, x, l, y, r) => IntExpr::case(e.plug(d), x, l.clone(), y, r.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinalKind {
    Boxed,
    Indet,
}

/// Either the next redex in context, or the kind of final form `d` is.
// short-lived, boxing buys nothing
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Redex(EvalCtx, IntExpr, Rule),
    Final(FinalKind),
}

/// Split `d` into an evaluation context and the redex the eager left-to-right
/// strategy reduces next.
pub fn decompose(d: &IntExpr) -> Result<Decomposition, EvalError> {
    use Decomposition::*;
    use FinalKind::*;
    let stuck = || Err(EvalError::Stuck(print_int(d)));
    let top = |kind: Option<FinalKind>| match rule_at(d) {
        Some(rule) => Ok(Redex(EvalCtx::Mark, d.clone(), rule)),
        None => match kind {
            Some(k) => Ok(Final(k)),
            None => stuck(),
        },
    };
    match d {
        IntExpr::Const | IntExpr::NumLit(_) | IntExpr::LamAnn(..) => Ok(Final(Boxed)),
        IntExpr::EmptyClosure(..) => Ok(Final(Indet)),
        IntExpr::Var(_) => stuck(),
        IntExpr::Ap(f, arg) => {
            let kf = match decompose(f)? {
                Redex(e, r, rule) => return Ok(Redex(EvalCtx::ApL(Box::new(e), (**arg).clone()), r, rule)),
                Final(k) => k,
            };
            match decompose(arg)? {
                Redex(e, r, rule) => Ok(Redex(EvalCtx::ApR((**f).clone(), Box::new(e)), r, rule)),
                Final(_) => top((kf == Indet && !is_arrow_cast(f)).then_some(Indet)),
            }
        }
        IntExpr::Plus(a, b) => {
            let ka = match decompose(a)? {
                Redex(e, r, rule) => return Ok(Redex(EvalCtx::PlusL(Box::new(e), (**b).clone()), r, rule)),
                Final(k) => k,
            };
            match decompose(b)? {
                Redex(e, r, rule) => Ok(Redex(EvalCtx::PlusR((**a).clone(), Box::new(e)), r, rule)),
                Final(kb) => top((ka == Indet || kb == Indet).then_some(Indet)),
            }
        }
        IntExpr::Cast(inner, t1, t2) => {
            let k = match decompose(inner)? {
                Redex(e, r, rule) => return Ok(Redex(EvalCtx::Cast(Box::new(e), t1.clone(), t2.clone()), r, rule)),
                Final(k) => k,
            };
            let kind = match (t1, t2) {
                (Ty::Arrow(..), Ty::Arrow(..)) | (Ty::Sum(..), Ty::Sum(..)) => Some(k),
                (g, Ty::Hole) if is_ground(g) => Some(k),
                (Ty::Hole, g) if is_ground(g) && k == Indet && !matches!(**inner, IntExpr::Cast(_, _, Ty::Hole)) => {
                    Some(Indet)
                }
                _ => None,
            };
            top(kind)
        }
        IntExpr::FailedCast(inner, t1, t2) => match decompose(inner)? {
            Redex(e, r, rule) => Ok(Redex(EvalCtx::FailedCast(Box::new(e), t1.clone(), t2.clone()), r, rule)),
            Final(_) if is_ground(t1) && is_ground(t2) && t1 != t2 => Ok(Final(Indet)),
            Final(_) => stuck(),
        },
        IntExpr::NonEmptyClosure(inner, u, env) => match decompose(inner)? {
            Redex(e, r, rule) => Ok(Redex(EvalCtx::NonEmptyClosure(Box::new(e), u.clone(), env.clone()), r, rule)),
            Final(_) => Ok(Final(Indet)),
        },
        IntExpr::InL(t, inner) => match decompose(inner)? {
            Redex(e, r, rule) => Ok(Redex(EvalCtx::InL(t.clone(), Box::new(e)), r, rule)),
            Final(k) => Ok(Final(k)),
        },
        IntExpr::InR(t, inner) => match decompose(inner)? {
            Redex(e, r, rule) => Ok(Redex(EvalCtx::InR(t.clone(), Box::new(e)), r, rule)),
            Final(k) => Ok(Final(k)),
        },
        IntExpr::Case(s, x, l, y, r) => {
            let k = match decompose(s)? {
                Redex(e, red, rule) => {
                    return Ok(Redex(
                        EvalCtx::Case(Box::new(e), x.clone(), (**l).clone(), y.clone(), (**r).clone()),
                        red,
                        rule,
                    ))
                }
                Final(k) => k,
            };
            let indet = k == Indet && !matches!(**s, IntExpr::InL(..) | IntExpr::InR(..)) && !is_sum_cast(s);
            top(indet.then_some(Indet))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped { expr: IntExpr, rule: Rule },
    BoxedValue,
    Indeterminate,
}

pub fn step(d: &IntExpr) -> Result<StepOutcome, EvalError> {
    match decompose(d)? {
        Decomposition::Final(FinalKind::Boxed) => Ok(StepOutcome::BoxedValue),
        Decomposition::Final(FinalKind::Indet) => Ok(StepOutcome::Indeterminate),
        Decomposition::Redex(ctx, redex, rule) => {
            let out = fire(rule, &redex)?;
            Ok(StepOutcome::Stepped { expr: ctx.plug(out), rule })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Boxed,
    Indet,
    FuelExhausted,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Boxed => "boxed",
            Outcome::Indet => "indet",
            Outcome::FuelExhausted => "fuel-exhausted",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub expr: IntExpr,
    pub outcome: Outcome,
    pub steps: usize,
}

pub fn multi_step(d: &IntExpr, fuel: usize) -> Result<Run, EvalError> {
    multi_step_with(d, fuel, |_, _| {})
}

/// As [`multi_step`], calling `on_step` with each new term and the rule
/// that produced it.
pub fn multi_step_with(d: &IntExpr, fuel: usize, mut on_step: impl FnMut(&IntExpr, Rule)) -> Result<Run, EvalError> {
    let mut cur = d.clone();
    let mut steps = 0;
    loop {
        let outcome = match step(&cur)? {
            StepOutcome::BoxedValue => Outcome::Boxed,
            StepOutcome::Indeterminate => Outcome::Indet,
            StepOutcome::Stepped { .. } if steps == fuel => Outcome::FuelExhausted,
            StepOutcome::Stepped { expr, rule } => {
                on_step(&expr, rule);
                cur = expr;
                steps += 1;
                continue;
            }
        };
        return Ok(Run { expr: cur, outcome, steps });
    }
}
