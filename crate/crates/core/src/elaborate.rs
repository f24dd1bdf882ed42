//! Cast-inserting elaboration of external expressions into internal
//! expressions, and type assignment for the result.

use std::fmt;

use crate::statics::{check_hole_names, consistent, join, matched_arrow, matched_sum};
use crate::statics::{TypeError, TypeErrorKind};
use crate::syntax::{identity_env, Env, ExtExpr, HoleCtx, HoleName, IntExpr, Ty, TypingCtx};

/// Result of elaboration: `d : ty` with hole context `holes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elab {
    pub expr: IntExpr,
    pub ty: Ty,
    pub holes: HoleCtx,
}

/// Elaborate a closed program, rejecting duplicate hole names first.
pub fn elaborate(e: &ExtExpr) -> Result<Elab, TypeError> {
    check_hole_names(e)?;
    elab_syn(&TypingCtx::new(), e)
}

/// `ctx |- e => t ~> d -| holes`
pub fn elab_syn(ctx: &TypingCtx, e: &ExtExpr) -> Result<Elab, TypeError> {
    Elaborator::default().syn(ctx, e)
}

/// `ctx |- e <= t ~> d : t' -| holes`
pub fn elab_ana(ctx: &TypingCtx, e: &ExtExpr, ty: &Ty) -> Result<Elab, TypeError> {
    Elaborator::default().ana(ctx, e, ty)
}

#[derive(Default)]
struct Elaborator {
    path: Vec<usize>,
}

fn is_hole(e: &ExtExpr) -> bool {
    matches!(e, ExtExpr::EmptyHole(_) | ExtExpr::NonEmptyHole(..))
}

impl Elaborator {
    fn fail(&self, rule: &'static str, kind: TypeErrorKind, e: &ExtExpr) -> TypeError {
        TypeError { rule, kind, subterm: Box::new(e.clone()), path: self.path.clone() }
    }

    fn at<R>(&mut self, child: usize, f: impl FnOnce(&mut Self) -> R) -> R {
        self.path.push(child);
        let r = f(self);
        self.path.pop();
        r
    }

    fn union(&self, a: HoleCtx, b: HoleCtx, e: &ExtExpr) -> Result<HoleCtx, TypeError> {
        a.union(b).map_err(|u| self.fail("HoleNames", TypeErrorKind::DuplicateHole(u.0), e))
    }

    fn hole_binding(
        &self,
        u: &HoleName,
        ctx: &TypingCtx,
        ty: &Ty,
        inner: HoleCtx,
        e: &ExtExpr,
    ) -> Result<HoleCtx, TypeError> {
        self.union(inner, HoleCtx::singleton(u.clone(), ctx.clone(), ty.clone()), e)
    }

    fn syn(&mut self, ctx: &TypingCtx, e: &ExtExpr) -> Result<Elab, TypeError> {
        match e {
            ExtExpr::Const => Ok(Elab { expr: IntExpr::Const, ty: Ty::Base, holes: HoleCtx::new() }),
            ExtExpr::NumLit(n) => Ok(Elab { expr: IntExpr::NumLit(*n), ty: Ty::Num, holes: HoleCtx::new() }),
            ExtExpr::Var(x) => match ctx.lookup(x) {
                Some(t) => Ok(Elab { expr: IntExpr::var(x), ty: t.clone(), holes: HoleCtx::new() }),
                None => Err(self.fail("ESVar", TypeErrorKind::UnboundVariable(x.clone()), e)),
            },
            ExtExpr::LamAnn(x, t1, body) => {
                let b = self.at(0, |s| s.syn(&ctx.extend(x, t1.clone()), body))?;
                Ok(Elab { expr: IntExpr::lam(x, t1.clone(), b.expr), ty: Ty::arrow(t1.clone(), b.ty), holes: b.holes })
            }
            ExtExpr::Ap(e1, e2) => {
                let f = self.at(0, |s| s.syn(ctx, e1))?;
                let (t2, t) =
                    matched_arrow(&f.ty).ok_or_else(|| self.fail("ESAp", TypeErrorKind::NotArrow(f.ty.clone()), e))?;
                let fun_ty = Ty::arrow(t2.clone(), t.clone());
                // Analysis only differs from synthesis for holes.
                let f = if is_hole(e1) { self.at(0, |s| s.ana(ctx, e1, &fun_ty))? } else { f };
                let a = self.at(1, |s| s.ana(ctx, e2, &t2))?;
                let holes = self.union(f.holes, a.holes, e)?;
                Ok(Elab {
                    expr: IntExpr::ap(IntExpr::cast(f.expr, f.ty, fun_ty), IntExpr::cast(a.expr, a.ty, t2)),
                    ty: t,
                    holes,
                })
            }
            ExtExpr::EmptyHole(u) => Ok(Elab {
                expr: IntExpr::EmptyClosure(u.clone(), identity_env(ctx)),
                ty: Ty::Hole,
                holes: HoleCtx::singleton(u.clone(), ctx.clone(), Ty::Hole),
            }),
            ExtExpr::NonEmptyHole(inner, u) => {
                let d = self.at(0, |s| s.syn(ctx, inner))?;
                let holes = self.hole_binding(u, ctx, &Ty::Hole, d.holes, e)?;
                Ok(Elab {
                    expr: IntExpr::NonEmptyClosure(Box::new(d.expr), u.clone(), identity_env(ctx)),
                    ty: Ty::Hole,
                    holes,
                })
            }
            ExtExpr::Asc(inner, t) => {
                let d = self.at(0, |s| s.ana(ctx, inner, t))?;
                Ok(Elab { expr: IntExpr::cast(d.expr, d.ty, t.clone()), ty: t.clone(), holes: d.holes })
            }
            ExtExpr::Plus(a, b) => {
                let l = self.at(0, |s| s.ana(ctx, a, &Ty::Num))?;
                let r = self.at(1, |s| s.ana(ctx, b, &Ty::Num))?;
                let holes = self.union(l.holes, r.holes, e)?;
                Ok(Elab { expr: IntExpr::plus(to_num(l.expr, l.ty), to_num(r.expr, r.ty)), ty: Ty::Num, holes })
            }
            ExtExpr::Lam(..) => Err(self.fail("ESLam", TypeErrorKind::CannotSynthesize, e)),
            ExtExpr::InL(_) | ExtExpr::InR(_) => Err(self.fail("ESInj", TypeErrorKind::CannotSynthesize, e)),
            ExtExpr::Case(..) => Err(self.fail("ESCase", TypeErrorKind::CannotSynthesize, e)),
        }
    }

    fn ana(&mut self, ctx: &TypingCtx, e: &ExtExpr, ty: &Ty) -> Result<Elab, TypeError> {
        match e {
            ExtExpr::Lam(x, body) => {
                let (t1, t2) =
                    matched_arrow(ty).ok_or_else(|| self.fail("EALam", TypeErrorKind::NotArrow(ty.clone()), e))?;
                let b = self.at(0, |s| s.ana(&ctx.extend(x, t1.clone()), body, &t2))?;
                Ok(Elab { expr: IntExpr::lam(x, t1.clone(), b.expr), ty: Ty::arrow(t1, b.ty), holes: b.holes })
            }
            ExtExpr::EmptyHole(u) => Ok(Elab {
                expr: IntExpr::EmptyClosure(u.clone(), identity_env(ctx)),
                ty: ty.clone(),
                holes: HoleCtx::singleton(u.clone(), ctx.clone(), ty.clone()),
            }),
            ExtExpr::NonEmptyHole(inner, u) => {
                let d = self.at(0, |s| s.syn(ctx, inner))?;
                let holes = self.hole_binding(u, ctx, ty, d.holes, e)?;
                Ok(Elab {
                    expr: IntExpr::NonEmptyClosure(Box::new(d.expr), u.clone(), identity_env(ctx)),
                    ty: ty.clone(),
                    holes,
                })
            }
            ExtExpr::InL(inner) => {
                let (t1, t2) =
                    matched_sum(ty).ok_or_else(|| self.fail("EAInL", TypeErrorKind::NotSum(ty.clone()), e))?;
                let d = self.at(0, |s| s.ana(ctx, inner, &t1))?;
                Ok(Elab { expr: IntExpr::inl(t2.clone(), d.expr), ty: Ty::sum(d.ty, t2), holes: d.holes })
            }
            ExtExpr::InR(inner) => {
                let (t1, t2) =
                    matched_sum(ty).ok_or_else(|| self.fail("EAInR", TypeErrorKind::NotSum(ty.clone()), e))?;
                let d = self.at(0, |s| s.ana(ctx, inner, &t2))?;
                Ok(Elab { expr: IntExpr::inr(t1.clone(), d.expr), ty: Ty::sum(t1, d.ty), holes: d.holes })
            }
            ExtExpr::Case(scrut, x, l, y, r) => {
                let s = self.at(0, |s| s.syn(ctx, scrut))?;
                let (tl, tr) =
                    matched_sum(&s.ty).ok_or_else(|| self.fail("EACase", TypeErrorKind::NotSum(s.ty.clone()), e))?;
                let dl = self.at(1, |s| s.ana(&ctx.extend(x, tl.clone()), l, ty))?;
                let dr = self.at(2, |s| s.ana(&ctx.extend(y, tr.clone()), r, ty))?;
                // The branch types are each consistent with `ty` but need not
                // be consistent with each other.
                let out = join(&dl.ty, &dr.ty).unwrap_or_else(|| ty.clone());
                let holes = self.union(s.holes, dl.holes, e)?;
                let holes = self.union(holes, dr.holes, e)?;
                Ok(Elab {
                    expr: IntExpr::case(
                        IntExpr::cast(s.expr, s.ty, Ty::sum(tl, tr)),
                        x,
                        IntExpr::cast(dl.expr, dl.ty, out.clone()),
                        y,
                        IntExpr::cast(dr.expr, dr.ty, out.clone()),
                    ),
                    ty: out,
                    holes,
                })
            }
            _ => {
                let d = self.syn(ctx, e)?;
                if consistent(ty, &d.ty) {
                    Ok(d)
                } else {
                    Err(self.fail("EASubsume", TypeErrorKind::Inconsistent { expected: ty.clone(), found: d.ty }, e))
                }
            }
        }
    }
}

fn to_num(d: IntExpr, ty: Ty) -> IntExpr {
    if ty == Ty::Num {
        d
    } else {
        IntExpr::cast(d, ty, Ty::Num)
    }
}

/// Why an internal expression has no type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignError(pub String);

impl fmt::Display for AssignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AssignError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, AssignError> {
    Err(AssignError(msg.into()))
}

/// `holes; ctx |- d : t`
pub fn assign_type(holes: &HoleCtx, ctx: &TypingCtx, d: &IntExpr) -> Result<Ty, AssignError> {
    use crate::statics::is_ground;
    match d {
        IntExpr::Const => Ok(Ty::Base),
        IntExpr::NumLit(_) => Ok(Ty::Num),
        IntExpr::Var(x) => match ctx.lookup(x) {
            Some(t) => Ok(t.clone()),
            None => bad(format!("unbound variable {x}")),
        },
        IntExpr::LamAnn(x, t1, body) => {
            let t2 = assign_type(holes, &ctx.extend(x, t1.clone()), body)?;
            Ok(Ty::arrow(t1.clone(), t2))
        }
        IntExpr::Ap(d1, d2) => match assign_type(holes, ctx, d1)? {
            Ty::Arrow(t2, t) => {
                let a = assign_type(holes, ctx, d2)?;
                if a == *t2 {
                    Ok(*t)
                } else {
                    bad("argument type differs from domain")
                }
            }
            _ => bad("applying a non-function"),
        },
        IntExpr::EmptyClosure(u, env) => {
            let h = holes.get(u).ok_or_else(|| AssignError(format!("hole {u} not in context")))?;
            env_typed(holes, ctx, env, &h.ctx)?;
            Ok(h.ty.clone())
        }
        IntExpr::NonEmptyClosure(inner, u, env) => {
            assign_type(holes, ctx, inner)?;
            let h = holes.get(u).ok_or_else(|| AssignError(format!("hole {u} not in context")))?;
            env_typed(holes, ctx, env, &h.ctx)?;
            Ok(h.ty.clone())
        }
        IntExpr::Cast(inner, t1, t2) => {
            if assign_type(holes, ctx, inner)? != *t1 {
                return bad("cast source differs from the operand type");
            }
            if !consistent(t1, t2) {
                return bad("cast between inconsistent types");
            }
            Ok(t2.clone())
        }
        IntExpr::FailedCast(inner, t1, t2) => {
            if assign_type(holes, ctx, inner)? != *t1 {
                return bad("failed cast source differs from the operand type");
            }
            if !(is_ground(t1) && is_ground(t2) && t1 != t2) {
                return bad("failed cast must relate distinct ground types");
            }
            Ok(t2.clone())
        }
        IntExpr::Plus(a, b) => {
            if assign_type(holes, ctx, a)? != Ty::Num || assign_type(holes, ctx, b)? != Ty::Num {
                return bad("addition of non-numbers");
            }
            Ok(Ty::Num)
        }
        IntExpr::InL(t2, inner) => Ok(Ty::sum(assign_type(holes, ctx, inner)?, t2.clone())),
        IntExpr::InR(t1, inner) => Ok(Ty::sum(t1.clone(), assign_type(holes, ctx, inner)?)),
        IntExpr::Case(s, x, l, y, r) => match assign_type(holes, ctx, s)? {
            Ty::Sum(t1, t2) => {
                let tl = assign_type(holes, &ctx.extend(x, *t1), l)?;
                let tr = assign_type(holes, &ctx.extend(y, *t2), r)?;
                if tl == tr {
                    Ok(tl)
                } else {
                    bad("case branches have different types")
                }
            }
            _ => bad("case on a non-sum"),
        },
    }
}

/// `holes; ctx |- env : hole_ctx`: the environment covers exactly the hole's
/// context and each binding has the recorded type.
pub fn env_typed(holes: &HoleCtx, ctx: &TypingCtx, env: &Env, hole_ctx: &TypingCtx) -> Result<(), AssignError> {
    if env.len() != hole_ctx.len() {
        return bad("environment domain differs from the hole's context");
    }
    for (x, t) in hole_ctx.iter() {
        let d = env.get(x).ok_or_else(|| AssignError(format!("environment lacks {x}")))?;
        if assign_type(holes, ctx, d)? != *t {
            return bad(format!("environment binding for {x} has the wrong type"));
        }
    }
    Ok(())
}
