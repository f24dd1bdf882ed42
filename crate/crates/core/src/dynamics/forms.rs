//! Final forms (values, boxed values, indeterminate forms) and completeness.

use crate::statics::is_ground;
use crate::syntax::{ExtExpr, IntExpr, Ty};

pub fn is_value(d: &IntExpr) -> bool {
    match d {
        IntExpr::Const | IntExpr::LamAnn(..) | IntExpr::NumLit(_) => true,
        IntExpr::InL(_, inner) | IntExpr::InR(_, inner) => is_value(inner),
        _ => false,
    }
}

pub(crate) fn is_arrow_cast(d: &IntExpr) -> bool {
    matches!(d, IntExpr::Cast(_, Ty::Arrow(..), Ty::Arrow(..)))
}

pub(crate) fn is_sum_cast(d: &IntExpr) -> bool {
    matches!(d, IntExpr::Cast(_, Ty::Sum(..), Ty::Sum(..)))
}

pub fn is_boxed_value(d: &IntExpr) -> bool {
    if is_value(d) {
        return true;
    }
    match d {
        IntExpr::Cast(inner, t1, t2) => {
            let shape = match (t1, t2) {
                (Ty::Arrow(..), Ty::Arrow(..)) | (Ty::Sum(..), Ty::Sum(..)) => t1 != t2,
                (g, Ty::Hole) => is_ground(g),
                _ => false,
            };
            shape && is_boxed_value(inner)
        }
        IntExpr::InL(_, inner) | IntExpr::InR(_, inner) => is_boxed_value(inner),
        _ => false,
    }
}

pub fn is_indet(d: &IntExpr) -> bool {
    match d {
        IntExpr::EmptyClosure(..) => true,
        IntExpr::NonEmptyClosure(inner, _, _) => is_final(inner),
        IntExpr::Ap(d1, d2) => is_indet(d1) && !is_arrow_cast(d1) && is_final(d2),
        IntExpr::Cast(inner, t1, t2) => match (t1, t2) {
            (Ty::Arrow(..), Ty::Arrow(..)) | (Ty::Sum(..), Ty::Sum(..)) => t1 != t2 && is_indet(inner),
            (g, Ty::Hole) => is_ground(g) && is_indet(inner),
            (Ty::Hole, g) => is_ground(g) && !matches!(**inner, IntExpr::Cast(_, _, Ty::Hole)) && is_indet(inner),
            _ => false,
        },
        IntExpr::FailedCast(inner, t1, t2) => is_ground(t1) && is_ground(t2) && t1 != t2 && is_final(inner),
        IntExpr::Plus(a, b) => (is_indet(a) && is_final(b)) || (is_final(a) && is_indet(b)),
        IntExpr::InL(_, inner) | IntExpr::InR(_, inner) => is_indet(inner),
        IntExpr::Case(s, ..) => is_indet(s) && !matches!(**s, IntExpr::InL(..) | IntExpr::InR(..)) && !is_sum_cast(s),
        _ => false,
    }
}

pub fn is_final(d: &IntExpr) -> bool {
    is_boxed_value(d) || is_indet(d)
}

pub fn is_complete_type(t: &Ty) -> bool {
    match t {
        Ty::Base | Ty::Num => true,
        Ty::Hole => false,
        Ty::Arrow(a, b) | Ty::Sum(a, b) => is_complete_type(a) && is_complete_type(b),
    }
}

pub fn is_complete_ext(e: &ExtExpr) -> bool {
    match e {
        ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) => true,
        ExtExpr::EmptyHole(_) | ExtExpr::NonEmptyHole(..) => false,
        ExtExpr::LamAnn(_, t, body) => is_complete_type(t) && is_complete_ext(body),
        ExtExpr::Asc(inner, t) => is_complete_type(t) && is_complete_ext(inner),
        ExtExpr::Lam(_, inner) | ExtExpr::InL(inner) | ExtExpr::InR(inner) => is_complete_ext(inner),
        ExtExpr::Ap(a, b) | ExtExpr::Plus(a, b) => is_complete_ext(a) && is_complete_ext(b),
        ExtExpr::Case(s, _, l, _, r) => is_complete_ext(s) && is_complete_ext(l) && is_complete_ext(r),
    }
}

/// No closures, no failed casts, and every type annotation complete.
pub fn is_complete_int(d: &IntExpr) -> bool {
    match d {
        IntExpr::Const | IntExpr::Var(_) | IntExpr::NumLit(_) => true,
        IntExpr::EmptyClosure(..) | IntExpr::NonEmptyClosure(..) | IntExpr::FailedCast(..) => false,
        IntExpr::LamAnn(_, t, body) => is_complete_type(t) && is_complete_int(body),
        IntExpr::Cast(inner, t1, t2) => is_complete_type(t1) && is_complete_type(t2) && is_complete_int(inner),
        IntExpr::InL(t, inner) | IntExpr::InR(t, inner) => is_complete_type(t) && is_complete_int(inner),
        IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => is_complete_int(a) && is_complete_int(b),
        IntExpr::Case(s, _, l, _, r) => is_complete_int(s) && is_complete_int(l) && is_complete_int(r),
    }
}
