use std::fmt::Write;

use crate::syntax::{Env, ExtExpr, HoleCtx, IntExpr, Ty, TypingCtx};

pub fn print_ty(t: &Ty) -> String {
    let mut out = String::new();
    ty_at(t, TyLevel::Arrow, &mut out);
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum TyLevel {
    Arrow,
    Sum,
    Atom,
}

fn ty_at(t: &Ty, level: TyLevel, out: &mut String) {
    let own = match t {
        Ty::Arrow(..) => TyLevel::Arrow,
        Ty::Sum(..) => TyLevel::Sum,
        _ => TyLevel::Atom,
    };
    let parens = own < level;
    if parens {
        out.push('(');
    }
    match t {
        Ty::Base => out.push('b'),
        Ty::Num => out.push_str("num"),
        Ty::Hole => out.push('?'),
        Ty::Arrow(a, b) => {
            ty_at(a, TyLevel::Sum, out);
            out.push_str(" -> ");
            ty_at(b, TyLevel::Arrow, out);
        }
        Ty::Sum(a, b) => {
            ty_at(a, TyLevel::Sum, out);
            out.push_str(" + ");
            ty_at(b, TyLevel::Atom, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Expression precedence, loosest first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Binder,
    Asc,
    Plus,
    App,
    Atom,
}

/// Source text for `e`; parsing it gives back `e`.
pub fn print_ext(e: &ExtExpr) -> String {
    let mut out = String::new();
    ext_at(e, Level::Binder, &mut out);
    out
}

fn ext_level(e: &ExtExpr) -> Level {
    match e {
        ExtExpr::LamAnn(..) | ExtExpr::Lam(..) => Level::Binder,
        ExtExpr::Asc(..) => Level::Asc,
        ExtExpr::Plus(..) => Level::Plus,
        ExtExpr::Ap(..) => Level::App,
        _ => Level::Atom,
    }
}

fn ext_at(e: &ExtExpr, level: Level, out: &mut String) {
    let parens = ext_level(e) < level;
    if parens {
        out.push('(');
    }
    match e {
        ExtExpr::Const => out.push('c'),
        ExtExpr::Var(x) => out.push_str(x),
        ExtExpr::NumLit(n) => {
            let _ = write!(out, "{n}");
        }
        ExtExpr::LamAnn(x, t, body) => {
            let _ = write!(out, "\\{x}:{}. ", print_ty(t));
            ext_at(body, Level::Binder, out);
        }
        ExtExpr::Lam(x, body) => {
            let _ = write!(out, "\\{x}. ");
            ext_at(body, Level::Binder, out);
        }
        ExtExpr::Ap(f, a) => {
            ext_at(f, Level::App, out);
            out.push(' ');
            ext_at(a, Level::Atom, out);
        }
        ExtExpr::EmptyHole(u) => {
            let _ = write!(out, "?{u}");
        }
        ExtExpr::NonEmptyHole(inner, u) => {
            out.push('{');
            ext_at(inner, Level::Binder, out);
            let _ = write!(out, "}}{u}");
        }
        ExtExpr::Asc(inner, t) => {
            ext_at(inner, Level::Asc, out);
            let _ = write!(out, " : {}", print_ty(t));
        }
        ExtExpr::Plus(a, b) => {
            ext_at(a, Level::Plus, out);
            out.push_str(" + ");
            ext_at(b, Level::App, out);
        }
        ExtExpr::InL(inner) => {
            out.push_str("inl ");
            ext_at(inner, Level::Atom, out);
        }
        ExtExpr::InR(inner) => {
            out.push_str("inr ");
            ext_at(inner, Level::Atom, out);
        }
        ExtExpr::Case(s, x, l, y, r) => {
            out.push_str("case ");
            ext_at(s, Level::Binder, out);
            let _ = write!(out, " of inl {x} -> ");
            ext_at(l, Level::Binder, out);
            let _ = write!(out, " | inr {y} -> ");
            ext_at(r, Level::Binder, out);
            out.push_str(" end");
        }
    }
    if parens {
        out.push(')');
    }
}

/// Display form of an internal expression. Casts are postfix and bind
/// tighter than application.
pub fn print_int(d: &IntExpr) -> String {
    let mut out = String::new();
    int_at(d, Level::Binder, &mut out);
    out
}

pub fn print_env(env: &Env) -> String {
    let mut out = String::new();
    env_into(env, &mut out);
    out
}

fn env_into(env: &Env, out: &mut String) {
    out.push('[');
    for (i, (x, d)) in env.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        int_at(d, Level::Binder, out);
        let _ = write!(out, "/{x}");
    }
    out.push(']');
}

fn int_level(d: &IntExpr) -> Level {
    match d {
        IntExpr::LamAnn(..) => Level::Binder,
        IntExpr::Plus(..) => Level::Plus,
        IntExpr::Ap(..) | IntExpr::InL(..) | IntExpr::InR(..) => Level::App,
        _ => Level::Atom,
    }
}

fn int_at(d: &IntExpr, level: Level, out: &mut String) {
    let parens = int_level(d) < level;
    if parens {
        out.push('(');
    }
    match d {
        IntExpr::Const => out.push('c'),
        IntExpr::Var(x) => out.push_str(x),
        IntExpr::NumLit(n) => {
            let _ = write!(out, "{n}");
        }
        IntExpr::LamAnn(x, t, body) => {
            let _ = write!(out, "\\{x}:{}. ", print_ty(t));
            int_at(body, Level::Binder, out);
        }
        IntExpr::Ap(f, a) => {
            int_at(f, Level::App, out);
            out.push(' ');
            int_at(a, Level::Atom, out);
        }
        IntExpr::EmptyClosure(u, env) => {
            let _ = write!(out, "?{u}");
            env_into(env, out);
        }
        IntExpr::NonEmptyClosure(inner, u, env) => {
            out.push('{');
            int_at(inner, Level::Binder, out);
            let _ = write!(out, "}}{u}");
            env_into(env, out);
        }
        IntExpr::Cast(inner, t1, t2) => {
            int_at(inner, Level::Atom, out);
            let _ = write!(out, "<{} => {}>", print_ty(t1), print_ty(t2));
        }
        IntExpr::FailedCast(inner, t1, t2) => {
            int_at(inner, Level::Atom, out);
            let _ = write!(out, "<{} =/=> {}>", print_ty(t1), print_ty(t2));
        }
        IntExpr::Plus(a, b) => {
            int_at(a, Level::Plus, out);
            out.push_str(" + ");
            int_at(b, Level::App, out);
        }
        IntExpr::InL(t, inner) => {
            let _ = write!(out, "inl[{}] ", print_ty(t));
            int_at(inner, Level::Atom, out);
        }
        IntExpr::InR(t, inner) => {
            let _ = write!(out, "inr[{}] ", print_ty(t));
            int_at(inner, Level::Atom, out);
        }
        IntExpr::Case(s, x, l, y, r) => {
            out.push_str("case ");
            int_at(s, Level::Binder, out);
            let _ = write!(out, " of inl {x} -> ");
            int_at(l, Level::Binder, out);
            let _ = write!(out, " | inr {y} -> ");
            int_at(r, Level::Binder, out);
            out.push_str(" end");
        }
    }
    if parens {
        out.push(')');
    }
}

/// `x : b, y : num`, or `·` when empty.
pub fn print_ctx(ctx: &TypingCtx) -> String {
    if ctx.is_empty() {
        return "·".to_owned();
    }
    ctx.iter().map(|(x, t)| format!("{x} : {}", print_ty(t))).collect::<Vec<_>>().join(", ")
}

/// One `u :: t[ctx]` line per hole.
pub fn print_hole_ctx(holes: &HoleCtx) -> String {
    holes.iter().map(|(u, h)| format!("{u} :: {}[{}]\n", print_ty(&h.ty), print_ctx(&h.ctx))).collect()
}
