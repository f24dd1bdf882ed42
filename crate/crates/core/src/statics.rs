//! Type consistency, matching, joins, ground types, and bidirectional typing
//! of external expressions.

use std::fmt;

use crate::surface::print_ext;
use crate::syntax::{ExtExpr, Ty, TypingCtx};

/// `t1 ~ t2`: equal up to holes in corresponding positions.
pub fn consistent(t1: &Ty, t2: &Ty) -> bool {
    match (t1, t2) {
        (Ty::Hole, _) | (_, Ty::Hole) => true,
        (Ty::Base, Ty::Base) | (Ty::Num, Ty::Num) => true,
        (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) | (Ty::Sum(a1, b1), Ty::Sum(a2, b2)) => {
            consistent(a1, a2) && consistent(b1, b2)
        }
        _ => false,
    }
}

/// Matched arrow type: `?` is treated as `? -> ?`.
pub fn matched_arrow(t: &Ty) -> Option<(Ty, Ty)> {
    match t {
        Ty::Hole => Some((Ty::Hole, Ty::Hole)),
        Ty::Arrow(a, b) => Some(((**a).clone(), (**b).clone())),
        _ => None,
    }
}

/// Matched sum type: `?` is treated as `? + ?`.
pub fn matched_sum(t: &Ty) -> Option<(Ty, Ty)> {
    match t {
        Ty::Hole => Some((Ty::Hole, Ty::Hole)),
        Ty::Sum(a, b) => Some(((**a).clone(), (**b).clone())),
        _ => None,
    }
}

/// The most specific type consistent with both inputs; `None` when they are
/// inconsistent.
pub fn join(t1: &Ty, t2: &Ty) -> Option<Ty> {
    match (t1, t2) {
        (Ty::Hole, t) | (t, Ty::Hole) => Some(t.clone()),
        (Ty::Base, Ty::Base) => Some(Ty::Base),
        (Ty::Num, Ty::Num) => Some(Ty::Num),
        (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => Some(Ty::arrow(join(a1, a2)?, join(b1, b2)?)),
        (Ty::Sum(a1, b1), Ty::Sum(a2, b2)) => Some(Ty::sum(join(a1, a2)?, join(b1, b2)?)),
        _ => None,
    }
}

pub fn is_ground(t: &Ty) -> bool {
    match t {
        Ty::Base | Ty::Num => true,
        Ty::Arrow(a, b) | Ty::Sum(a, b) => **a == Ty::Hole && **b == Ty::Hole,
        Ty::Hole => false,
    }
}

/// The ground type a non-ground constructor type is factored through.
pub fn ground_match(t: &Ty) -> Option<Ty> {
    match t {
        Ty::Arrow(..) if !is_ground(t) => Some(Ty::hole_arrow()),
        Ty::Sum(..) if !is_ground(t) => Some(Ty::hole_sum()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVariable(String),
    /// The form only checks against a known type.
    CannotSynthesize,
    Inconsistent {
        expected: Ty,
        found: Ty,
    },
    NotArrow(Ty),
    NotSum(Ty),
    DuplicateHole(String),
}

/// A failed typing derivation: the rule that could not be applied, the
/// subterm it was applied to, and that subterm's address (child indices from
/// the root).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub rule: &'static str,
    pub kind: TypeErrorKind,
    pub subterm: Box<ExtExpr>,
    pub path: Vec<usize>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::surface::print_ty;
        match &self.kind {
            TypeErrorKind::UnboundVariable(x) => write!(f, "unbound variable `{x}`")?,
            TypeErrorKind::CannotSynthesize => write!(f, "cannot synthesize a type; add an annotation")?,
            TypeErrorKind::Inconsistent { expected, found } => {
                write!(f, "type `{}` is inconsistent with expected type `{}`", print_ty(found), print_ty(expected))?
            }
            TypeErrorKind::NotArrow(t) => write!(f, "expected a function type, found `{}`", print_ty(t))?,
            TypeErrorKind::NotSum(t) => write!(f, "expected a sum type, found `{}`", print_ty(t))?,
            TypeErrorKind::DuplicateHole(u) => write!(f, "hole name `{u}` is used more than once")?,
        }
        write!(f, " [{}] in `{}`", self.rule, print_ext(&self.subterm))
    }
}

impl std::error::Error for TypeError {}

/// `ctx |- e => t`
pub fn syn(ctx: &TypingCtx, e: &ExtExpr) -> Result<Ty, TypeError> {
    Checker::default().syn(ctx, e)
}

/// `ctx |- e <= t`
pub fn ana(ctx: &TypingCtx, e: &ExtExpr, t: &Ty) -> Result<(), TypeError> {
    Checker::default().ana(ctx, e, t)
}

/// Reject programs that reuse a hole name.
pub fn check_hole_names(e: &ExtExpr) -> Result<(), TypeError> {
    match e.duplicate_hole() {
        Some(u) => Err(TypeError {
            rule: "HoleNames",
            kind: TypeErrorKind::DuplicateHole(u.0),
            subterm: Box::new(e.clone()),
            path: Vec::new(),
        }),
        None => Ok(()),
    }
}

#[derive(Default)]
struct Checker {
    path: Vec<usize>,
}

impl Checker {
    fn fail(&self, rule: &'static str, kind: TypeErrorKind, e: &ExtExpr) -> TypeError {
        TypeError { rule, kind, subterm: Box::new(e.clone()), path: self.path.clone() }
    }

    fn at<R>(&mut self, child: usize, f: impl FnOnce(&mut Self) -> R) -> R {
        self.path.push(child);
        let r = f(self);
        self.path.pop();
        r
    }

    fn syn(&mut self, ctx: &TypingCtx, e: &ExtExpr) -> Result<Ty, TypeError> {
        match e {
            ExtExpr::Const => Ok(Ty::Base),
            ExtExpr::Var(x) => {
                ctx.lookup(x).cloned().ok_or_else(|| self.fail("SVar", TypeErrorKind::UnboundVariable(x.clone()), e))
            }
            ExtExpr::LamAnn(x, t1, body) => {
                let t2 = self.at(0, |c| c.syn(&ctx.extend(x, t1.clone()), body))?;
                Ok(Ty::arrow(t1.clone(), t2))
            }
            ExtExpr::Ap(e1, e2) => {
                let t1 = self.at(0, |c| c.syn(ctx, e1))?;
                let (t2, t) =
                    matched_arrow(&t1).ok_or_else(|| self.fail("SAp", TypeErrorKind::NotArrow(t1.clone()), e))?;
                self.at(1, |c| c.ana(ctx, e2, &t2))?;
                Ok(t)
            }
            ExtExpr::EmptyHole(_) => Ok(Ty::Hole),
            ExtExpr::NonEmptyHole(inner, _) => {
                self.at(0, |c| c.syn(ctx, inner))?;
                Ok(Ty::Hole)
            }
            ExtExpr::Asc(inner, t) => {
                self.at(0, |c| c.ana(ctx, inner, t))?;
                Ok(t.clone())
            }
            ExtExpr::NumLit(_) => Ok(Ty::Num),
            ExtExpr::Plus(a, b) => {
                self.at(0, |c| c.ana(ctx, a, &Ty::Num))?;
                self.at(1, |c| c.ana(ctx, b, &Ty::Num))?;
                Ok(Ty::Num)
            }
            ExtExpr::Lam(..) => Err(self.fail("SLam", TypeErrorKind::CannotSynthesize, e)),
            ExtExpr::InL(_) | ExtExpr::InR(_) => Err(self.fail("SInj", TypeErrorKind::CannotSynthesize, e)),
            ExtExpr::Case(..) => Err(self.fail("SCase", TypeErrorKind::CannotSynthesize, e)),
        }
    }

    fn ana(&mut self, ctx: &TypingCtx, e: &ExtExpr, t: &Ty) -> Result<(), TypeError> {
        match e {
            ExtExpr::Lam(x, body) => {
                let (t1, t2) =
                    matched_arrow(t).ok_or_else(|| self.fail("ALam", TypeErrorKind::NotArrow(t.clone()), e))?;
                self.at(0, |c| c.ana(&ctx.extend(x, t1), body, &t2))
            }
            ExtExpr::InL(inner) => {
                let (t1, _) = matched_sum(t).ok_or_else(|| self.fail("AInL", TypeErrorKind::NotSum(t.clone()), e))?;
                self.at(0, |c| c.ana(ctx, inner, &t1))
            }
            ExtExpr::InR(inner) => {
                let (_, t2) = matched_sum(t).ok_or_else(|| self.fail("AInR", TypeErrorKind::NotSum(t.clone()), e))?;
                self.at(0, |c| c.ana(ctx, inner, &t2))
            }
            ExtExpr::Case(scrut, x, l, y, r) => {
                let ts = self.at(0, |c| c.syn(ctx, scrut))?;
                let (tl, tr) =
                    matched_sum(&ts).ok_or_else(|| self.fail("ACase", TypeErrorKind::NotSum(ts.clone()), e))?;
                self.at(1, |c| c.ana(&ctx.extend(x, tl), l, t))?;
                self.at(2, |c| c.ana(&ctx.extend(y, tr), r, t))
            }
            _ => {
                let found = self.syn(ctx, e)?;
                if consistent(t, &found) {
                    Ok(())
                } else {
                    Err(self.fail("ASubsume", TypeErrorKind::Inconsistent { expected: t.clone(), found }, e))
                }
            }
        }
    }
}
