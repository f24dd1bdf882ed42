//! Hole filling on internal expressions and evaluation contexts, and
//! fill-and-resume.

use std::fmt;

use crate::dynamics::{multi_step, subst_env, EvalCtx, EvalError, Run};
use crate::elaborate::{assign_type, AssignError, Elab};
use crate::surface::{print_ctx, print_ty};
use crate::syntax::{Env, HoleCtx, HoleName, IntExpr, Ty, TypingCtx};

/// Fill every closure of `u` in `target` with `filler`, replaying each
/// closure's environment on it. Binders are not checked for capture: the
/// filler only sees variables through the environment.
pub fn fill(filler: &IntExpr, u: &HoleName, target: &IntExpr) -> IntExpr {
    let go = |d: &IntExpr| Box::new(fill(filler, u, d));
    match target {
        IntExpr::EmptyClosure(v, env) | IntExpr::NonEmptyClosure(_, v, env) if v == u => {
            subst_env(&fill_env(filler, u, env), filler)
        }
        IntExpr::Const | IntExpr::Var(_) | IntExpr::NumLit(_) => target.clone(),
        IntExpr::EmptyClosure(v, env) => IntExpr::EmptyClosure(v.clone(), fill_env(filler, u, env)),
        IntExpr::NonEmptyClosure(inner, v, env) => {
            IntExpr::NonEmptyClosure(go(inner), v.clone(), fill_env(filler, u, env))
        }
        IntExpr::LamAnn(x, t, body) => IntExpr::LamAnn(x.clone(), t.clone(), go(body)),
        IntExpr::Ap(a, b) => IntExpr::Ap(go(a), go(b)),
        IntExpr::Plus(a, b) => IntExpr::Plus(go(a), go(b)),
        IntExpr::Cast(inner, t1, t2) => IntExpr::Cast(go(inner), t1.clone(), t2.clone()),
        IntExpr::FailedCast(inner, t1, t2) => IntExpr::FailedCast(go(inner), t1.clone(), t2.clone()),
        IntExpr::InL(t, inner) => IntExpr::InL(t.clone(), go(inner)),
        IntExpr::InR(t, inner) => IntExpr::InR(t.clone(), go(inner)),
        IntExpr::Case(s, x, l, y, r) => IntExpr::Case(go(s), x.clone(), go(l), y.clone(), go(r)),
    }
}

pub fn fill_env(filler: &IntExpr, u: &HoleName, env: &Env) -> Env {
    env.map(|d| fill(filler, u, d))
}

/// Whether the mark of `ctx` sits inside a non-empty closure of `u`.
pub fn in_hole(u: &HoleName, ctx: &EvalCtx) -> bool {
    match ctx {
        EvalCtx::Mark => false,
        EvalCtx::NonEmptyClosure(_, v, _) if v == u => true,
        EvalCtx::NonEmptyClosure(e, _, _)
        | EvalCtx::ApL(e, _)
        | EvalCtx::ApR(_, e)
        | EvalCtx::Cast(e, _, _)
        | EvalCtx::FailedCast(e, _, _)
        | EvalCtx::PlusL(e, _)
        | EvalCtx::PlusR(_, e)
        | EvalCtx::InL(_, e)
        | EvalCtx::InR(_, e)
        | EvalCtx::Case(e, ..) => in_hole(u, e),
    }
}

/// Fill `u` throughout an evaluation context. `None` exactly when the mark
/// is inside a closure of `u`, which filling would discard.
pub fn fill_ctx(filler: &IntExpr, u: &HoleName, ctx: &EvalCtx) -> Option<EvalCtx> {
    let f = |d: &IntExpr| fill(filler, u, d);
    let go = |e: &EvalCtx| fill_ctx(filler, u, e).map(Box::new);
    Some(match ctx {
        EvalCtx::Mark => EvalCtx::Mark,
        EvalCtx::NonEmptyClosure(_, v, _) if v == u => return None,
        EvalCtx::NonEmptyClosure(e, v, env) => EvalCtx::NonEmptyClosure(go(e)?, v.clone(), fill_env(filler, u, env)),
        EvalCtx::ApL(e, d) => EvalCtx::ApL(go(e)?, f(d)),
        EvalCtx::ApR(d, e) => EvalCtx::ApR(f(d), go(e)?),
        EvalCtx::Cast(e, t1, t2) => EvalCtx::Cast(go(e)?, t1.clone(), t2.clone()),
        EvalCtx::FailedCast(e, t1, t2) => EvalCtx::FailedCast(go(e)?, t1.clone(), t2.clone()),
        EvalCtx::PlusL(e, d) => EvalCtx::PlusL(go(e)?, f(d)),
        EvalCtx::PlusR(d, e) => EvalCtx::PlusR(f(d), go(e)?),
        EvalCtx::InL(t, e) => EvalCtx::InL(t.clone(), go(e)?),
        EvalCtx::InR(t, e) => EvalCtx::InR(t.clone(), go(e)?),
        EvalCtx::Case(e, x, l, y, r) => EvalCtx::Case(go(e)?, x.clone(), f(l), y.clone(), f(r)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillError {
    UnknownHole(HoleName),
    IllTyped {
        hole: HoleName,
        expected: Ty,
        ctx: TypingCtx,
        /// The filler's type, or why it has none.
        found: Result<Ty, AssignError>,
    },
    Eval(EvalError),
}

impl fmt::Display for FillError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FillError::UnknownHole(u) => write!(f, "no unfilled hole named `{u}`"),
            FillError::IllTyped { hole, expected, ctx, found } => {
                write!(f, "filler for hole `{hole}` must have type {}[{}]", print_ty(expected), print_ctx(ctx))?;
                match found {
                    Ok(t) => write!(f, ", found {}", print_ty(t)),
                    Err(e) => write!(f, " ({e})"),
                }
            }
            FillError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FillError {}

/// Fill `u` after checking the filler against the hole's contextual type.
/// Returns the filled term and the hole context without `u`.
pub fn fill_typed(
    holes: &HoleCtx,
    u: &HoleName,
    filler: &IntExpr,
    target: &IntExpr,
) -> Result<(IntExpr, HoleCtx), FillError> {
    let h = holes.get(u).ok_or_else(|| FillError::UnknownHole(u.clone()))?;
    let rest = holes.remove(u);
    let found = assign_type(&rest, &h.ctx, filler);
    if found.as_ref() != Ok(&h.ty) {
        return Err(FillError::IllTyped { hole: u.clone(), expected: h.ty.clone(), ctx: h.ctx.clone(), found });
    }
    Ok((fill(filler, u, target), rest))
}

/// Fill `u` in an evaluated state and take the catch-up steps.
pub fn resume(
    state: &IntExpr,
    holes: &HoleCtx,
    u: &HoleName,
    filler: &IntExpr,
    fuel: usize,
) -> Result<(Run, HoleCtx), FillError> {
    let (filled, rest) = fill_typed(holes, u, filler, state)?;
    let run = multi_step(&filled, fuel).map_err(FillError::Eval)?;
    Ok((run, rest))
}

/// A detected edit that fills one hole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filling {
    pub hole: HoleName,
    pub filler: IntExpr,
}

/// If `new` is `old` with exactly one hole replaced, the hole and the
/// elaborated term that replaced it. The filler must also check against the
/// hole's recorded type.
pub fn detect_filling(old: &Elab, new: &Elab) -> Option<Filling> {
    let mut diffs = Vec::new();
    if !anti_unify(&old.expr, &new.expr, &mut diffs) {
        return None;
    }
    let [(hole, filler)] = <[_; 1]>::try_from(diffs).ok()?;
    let h = old.holes.get(&hole)?;
    if new.holes.contains(&hole) {
        return None;
    }
    let mut holes = new.holes.clone();
    holes = holes.union(HoleCtx::singleton(hole.clone(), h.ctx.clone(), h.ty.clone())).ok()?;
    let rest = holes.remove(&hole);
    (assign_type(&rest, &h.ctx, &filler).ok()? == h.ty).then_some(Filling { hole, filler })
}

/// Walk both terms in step, recording hole positions where they differ.
/// False when they differ anywhere else.
fn anti_unify(old: &IntExpr, new: &IntExpr, diffs: &mut Vec<(HoleName, IntExpr)>) -> bool {
    use IntExpr::*;
    match (old, new) {
        (EmptyClosure(u, s1), EmptyClosure(v, s2)) if u == v && s1 == s2 => true,
        (NonEmptyClosure(d1, u, s1), NonEmptyClosure(d2, v, s2)) if u == v && s1 == s2 => anti_unify(d1, d2, diffs),
        (EmptyClosure(u, _) | NonEmptyClosure(_, u, _), _) => {
            diffs.push((u.clone(), new.clone()));
            true
        }
        (Const, Const) => true,
        (NumLit(m), NumLit(n)) => m == n,
        (Var(x), Var(y)) => x == y,
        (LamAnn(x, t1, b1), LamAnn(y, t2, b2)) => x == y && t1 == t2 && anti_unify(b1, b2, diffs),
        (Ap(a1, b1), Ap(a2, b2)) | (Plus(a1, b1), Plus(a2, b2)) => {
            anti_unify(a1, a2, diffs) && anti_unify(b1, b2, diffs)
        }
        (Cast(d1, f1, t1), Cast(d2, f2, t2)) | (FailedCast(d1, f1, t1), FailedCast(d2, f2, t2)) => {
            f1 == f2 && t1 == t2 && anti_unify(d1, d2, diffs)
        }
        (InL(t1, d1), InL(t2, d2)) | (InR(t1, d1), InR(t2, d2)) => t1 == t2 && anti_unify(d1, d2, diffs),
        (Case(s1, x1, l1, y1, r1), Case(s2, x2, l2, y2, r2)) => {
            x1 == x2 && y1 == y2 && anti_unify(s1, s2, diffs) && anti_unify(l1, l2, diffs) && anti_unify(r1, r2, diffs)
        }
        _ => false,
    }
}
