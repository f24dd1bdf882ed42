//! Shared by the integration tests and the acceptance runner: exhaustive
//! enumeration of small terms, typed random generators, and a stepper that
//! reduces anywhere a redex may appear.
#![allow(dead_code)]

use livehole::dynamics::{instr, Rule};
use livehole::statics::syn;
use livehole::syntax::{ExtExpr, HoleName, IntExpr, Ty, TypingCtx};
use rand::rngs::StdRng;
use rand::Rng;

// ---- enumeration ----

/// All types of exactly `n` nodes, leaves b, num and ?.
pub fn types_of_size(n: usize) -> Vec<Ty> {
    let mut by_size: Vec<Vec<Ty>> = vec![Vec::new(), vec![Ty::Base, Ty::Num, Ty::Hole]];
    for k in 2..=n {
        let mut out = Vec::new();
        for a in 1..k.saturating_sub(1) {
            let b = k - 1 - a;
            for l in &by_size[a] {
                for r in &by_size[b] {
                    out.push(Ty::arrow(l.clone(), r.clone()));
                    out.push(Ty::sum(l.clone(), r.clone()));
                }
            }
        }
        by_size.push(out);
    }
    by_size.get(n).cloned().unwrap_or_default()
}

/// Calls `f` on every term of at most `max` nodes. Type annotations count
/// their own nodes. Terms use the one variable `x`; holes are numbered left
/// to right.
pub fn enumerate(max: usize, mut f: impl FnMut(&ExtExpr)) {
    let tys: Vec<Vec<Ty>> = (0..max).map(types_of_size).collect();
    let mut memo: Vec<Vec<ExtExpr>> = vec![Vec::new()];
    for n in 1..=max {
        let mut fresh = Vec::new();
        let last = n == max;
        shapes(n, &memo, &tys, &mut |e| {
            f(&number_holes(&e));
            if !last {
                fresh.push(e);
            }
        });
        memo.push(fresh);
    }
}

fn shapes(n: usize, memo: &[Vec<ExtExpr>], tys: &[Vec<Ty>], f: &mut dyn FnMut(ExtExpr)) {
    if n == 1 {
        for e in [ExtExpr::Const, ExtExpr::var("x"), ExtExpr::hole("0"), ExtExpr::NumLit(0), ExtExpr::NumLit(1)] {
            f(e);
        }
        return;
    }
    let m = n - 1;
    for e in &memo[m] {
        f(ExtExpr::lam("x", e.clone()));
        f(ExtExpr::ne_hole(e.clone(), "0"));
        f(ExtExpr::inl(e.clone()));
        f(ExtExpr::inr(e.clone()));
    }
    for k in 1..m {
        for t in &tys[k] {
            for e in &memo[m - k] {
                f(ExtExpr::lam_ann("x", t.clone(), e.clone()));
                f(ExtExpr::asc(e.clone(), t.clone()));
            }
        }
    }
    for a in 1..m {
        for l in &memo[a] {
            for r in &memo[m - a] {
                f(ExtExpr::ap(l.clone(), r.clone()));
                f(ExtExpr::plus(l.clone(), r.clone()));
            }
        }
    }
    for a in 1..m {
        for b in 1..m - a {
            let c = m - a - b;
            for s in &memo[a] {
                for l in &memo[b] {
                    for r in &memo[c] {
                        f(ExtExpr::case(s.clone(), "x", l.clone(), "x", r.clone()));
                    }
                }
            }
        }
    }
}

/// Renames every hole to 1, 2, ... left to right.
pub fn number_holes(e: &ExtExpr) -> ExtExpr {
    fn go(e: &ExtExpr, k: &mut usize) -> ExtExpr {
        let mut next = || {
            *k += 1;
            HoleName::new(k.to_string())
        };
        match e {
            ExtExpr::EmptyHole(_) => ExtExpr::EmptyHole(next()),
            ExtExpr::NonEmptyHole(inner, _) => {
                let u = next();
                ExtExpr::NonEmptyHole(Box::new(go(inner, k)), u)
            }
            ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) => e.clone(),
            ExtExpr::LamAnn(x, t, b) => ExtExpr::LamAnn(x.clone(), t.clone(), Box::new(go(b, k))),
            ExtExpr::Lam(x, b) => ExtExpr::Lam(x.clone(), Box::new(go(b, k))),
            ExtExpr::Ap(a, b) => {
                let a = go(a, k);
                ExtExpr::ap(a, go(b, k))
            }
            ExtExpr::Plus(a, b) => {
                let a = go(a, k);
                ExtExpr::plus(a, go(b, k))
            }
            ExtExpr::Asc(a, t) => ExtExpr::asc(go(a, k), t.clone()),
            ExtExpr::InL(a) => ExtExpr::inl(go(a, k)),
            ExtExpr::InR(a) => ExtExpr::inr(go(a, k)),
            ExtExpr::Case(s, x, l, y, r) => {
                let s = go(s, k);
                let l = go(l, k);
                ExtExpr::Case(Box::new(s), x.clone(), Box::new(l), y.clone(), Box::new(go(r, k)))
            }
        }
    }
    go(e, &mut 0)
}

// ---- random generation ----

/// What the generator may produce.
#[derive(Clone, Copy, Debug)]
pub struct Gen {
    /// Allow `?` in types and ascriptions through `?`.
    pub gradual: bool,
    /// Chance of an empty hole at each leaf (gradual or not).
    pub holes: f64,
    pub depth: u32,
}

impl Gen {
    pub const COMPLETE: Gen = Gen { gradual: false, holes: 0.0, depth: 4 };
    pub const GRADUAL: Gen = Gen { gradual: true, holes: 0.15, depth: 4 };
}

pub fn random_ty(rng: &mut StdRng, g: &Gen, depth: u32) -> Ty {
    let leaves = if g.gradual { 3 } else { 2 };
    let pick = if depth == 0 { rng.gen_range(0..leaves) } else { rng.gen_range(0..leaves + 2) };
    match pick {
        0 => Ty::Num,
        1 => Ty::Base,
        2 if g.gradual => Ty::Hole,
        p if p == leaves => Ty::arrow(random_ty(rng, g, depth - 1), random_ty(rng, g, depth - 1)),
        _ => Ty::sum(random_ty(rng, g, depth - 1), random_ty(rng, g, depth - 1)),
    }
}

/// A term that analyzes against `ty` in `ctx`. Holes are named `0` and
/// need [`number_holes`] before elaboration.
pub fn gen_ana(rng: &mut StdRng, g: &Gen, ctx: &TypingCtx, ty: &Ty, depth: u32) -> ExtExpr {
    if rng.gen_bool(g.holes) {
        return ExtExpr::hole("0");
    }
    let vars: Vec<String> = ctx
        .iter()
        .filter(|(_, t)| *t == ty || (g.gradual && (**t == Ty::Hole || *ty == Ty::Hole)))
        .map(|(x, _)| x.to_owned())
        .collect();
    if depth == 0 || rng.gen_bool(0.2) {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return ExtExpr::var(&vars[rng.gen_range(0..vars.len())]);
        }
        return intro(rng, g, ctx, ty, 0);
    }
    let d = depth - 1;
    match rng.gen_range(0..8) {
        0 | 1 => intro(rng, g, ctx, ty, d),
        2 | 3 => {
            // application, the function ascribed so it synthesizes
            let arg_ty = random_ty(rng, g, 1);
            let f = gen_ana(rng, g, ctx, &Ty::arrow(arg_ty.clone(), ty.clone()), d);
            let f = synthesizing(ctx, f, Ty::arrow(arg_ty.clone(), ty.clone()));
            ExtExpr::ap(f, gen_ana(rng, g, ctx, &arg_ty, d))
        }
        4 => {
            let (l, r) = (random_ty(rng, g, 1), random_ty(rng, g, 1));
            let scrut_ty = Ty::sum(l.clone(), r.clone());
            let s = synthesizing(ctx, gen_ana(rng, g, ctx, &scrut_ty, d), scrut_ty);
            let (x, y) = (var_name(rng, ctx), var_name(rng, ctx));
            let lb = gen_ana(rng, g, &ctx.clone().with(&x, l), ty, d);
            let rb = gen_ana(rng, g, &ctx.clone().with(&y, r), ty, d);
            ExtExpr::case(s, &x, lb, &y, rb)
        }
        5 => {
            // let-style binding
            let t = random_ty(rng, g, 1);
            let x = var_name(rng, ctx);
            let body = gen_ana(rng, g, &ctx.clone().with(&x, t.clone()), ty, d);
            let body = synthesizing(&ctx.clone().with(&x, t.clone()), body, ty.clone());
            ExtExpr::ap(ExtExpr::lam_ann(&x, t.clone(), body), gen_ana(rng, g, ctx, &t, d))
        }
        6 if g.gradual => {
            // through the unknown type, so casts may fail
            let t = random_ty(rng, g, 1);
            let e = synthesizing(ctx, gen_ana(rng, g, ctx, &t, d), t);
            ExtExpr::asc(ExtExpr::asc(e, Ty::Hole), ty.clone())
        }
        _ => ExtExpr::asc(gen_ana(rng, g, ctx, ty, d), ty.clone()),
    }
}

fn intro(rng: &mut StdRng, g: &Gen, ctx: &TypingCtx, ty: &Ty, d: u32) -> ExtExpr {
    match ty {
        Ty::Base => ExtExpr::Const,
        Ty::Num if d > 0 && rng.gen_bool(0.5) => {
            ExtExpr::plus(gen_ana(rng, g, ctx, &Ty::Num, d - 1), gen_ana(rng, g, ctx, &Ty::Num, d - 1))
        }
        Ty::Num => ExtExpr::NumLit(rng.gen_range(-3..10)),
        Ty::Hole => {
            let t = random_ty(rng, &Gen { gradual: false, ..*g }, 1);
            synthesizing(ctx, intro(rng, g, ctx, &t, d), t)
        }
        Ty::Arrow(a, b) => {
            let x = var_name(rng, ctx);
            let inner = ctx.clone().with(&x, (**a).clone());
            let body = gen_ana(rng, g, &inner, b, d.saturating_sub(1));
            if rng.gen_bool(0.5) {
                ExtExpr::lam(&x, body)
            } else {
                ExtExpr::lam_ann(&x, (**a).clone(), synthesizing(&inner, body, (**b).clone()))
            }
        }
        Ty::Sum(l, r) => {
            if rng.gen_bool(0.5) {
                ExtExpr::inl(gen_ana(rng, g, ctx, l, d.saturating_sub(1)))
            } else {
                ExtExpr::inr(gen_ana(rng, g, ctx, r, d.saturating_sub(1)))
            }
        }
    }
}

/// `e` itself if it synthesizes `ty`, else `e : ty`.
fn synthesizing(ctx: &TypingCtx, e: ExtExpr, ty: Ty) -> ExtExpr {
    match syn(ctx, &e) {
        Ok(t) if t == ty => e,
        _ => ExtExpr::asc(e, ty),
    }
}

/// Mostly fresh, sometimes shadowing.
fn var_name(rng: &mut StdRng, ctx: &TypingCtx) -> String {
    if !ctx.is_empty() && rng.gen_bool(0.2) {
        let names: Vec<_> = ctx.iter().map(|(x, _)| x.to_owned()).collect();
        return names[rng.gen_range(0..names.len())].clone();
    }
    ["x", "y", "z", "w", "v"][rng.gen_range(0..5)].to_owned() + &"'".repeat(rng.gen_range(0..2))
}

/// A closed program of type `ty` with exactly one hole `u`, which analyzes
/// against num. Rejection-samples placements.
pub fn gen_one_hole(rng: &mut StdRng, ty: &Ty, depth: u32) -> ExtExpr {
    loop {
        let e = gen_ana(rng, &Gen { depth, ..Gen::COMPLETE }, &TypingCtx::new(), ty, depth);
        let num_sites = count_num_sites(&e);
        if num_sites.is_empty() {
            continue;
        }
        let pick = num_sites[rng.gen_range(0..num_sites.len())];
        let with_hole = put_hole(&e, pick, &mut 0);
        if let Ok(t) = syn(&TypingCtx::new(), &with_hole) {
            if t == *ty {
                return with_hole;
            }
        }
    }
}

/// Pre-order indices of numeric literals and sums, where a num hole can go.
fn count_num_sites(e: &ExtExpr) -> Vec<usize> {
    let mut out = Vec::new();
    walk(e, &mut 0, &mut |e, i| {
        if matches!(e, ExtExpr::NumLit(_) | ExtExpr::Plus(..)) {
            out.push(i);
        }
    });
    out
}

fn walk(e: &ExtExpr, i: &mut usize, f: &mut dyn FnMut(&ExtExpr, usize)) {
    f(e, *i);
    *i += 1;
    match e {
        ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) | ExtExpr::EmptyHole(_) => {}
        ExtExpr::LamAnn(_, _, a)
        | ExtExpr::Lam(_, a)
        | ExtExpr::NonEmptyHole(a, _)
        | ExtExpr::Asc(a, _)
        | ExtExpr::InL(a)
        | ExtExpr::InR(a) => walk(a, i, f),
        ExtExpr::Ap(a, b) | ExtExpr::Plus(a, b) => {
            walk(a, i, f);
            walk(b, i, f);
        }
        ExtExpr::Case(s, _, l, _, r) => {
            walk(s, i, f);
            walk(l, i, f);
            walk(r, i, f);
        }
    }
}

fn put_hole(e: &ExtExpr, target: usize, i: &mut usize) -> ExtExpr {
    let here = *i;
    *i += 1;
    if here == target {
        return ExtExpr::hole("u");
    }
    let mut go = |a: &ExtExpr| Box::new(put_hole(a, target, i));
    match e {
        ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) | ExtExpr::EmptyHole(_) => e.clone(),
        ExtExpr::LamAnn(x, t, a) => ExtExpr::LamAnn(x.clone(), t.clone(), go(a)),
        ExtExpr::Lam(x, a) => ExtExpr::Lam(x.clone(), go(a)),
        ExtExpr::NonEmptyHole(a, u) => ExtExpr::NonEmptyHole(go(a), u.clone()),
        ExtExpr::Asc(a, t) => ExtExpr::Asc(go(a), t.clone()),
        ExtExpr::InL(a) => ExtExpr::InL(go(a)),
        ExtExpr::InR(a) => ExtExpr::InR(go(a)),
        ExtExpr::Ap(a, b) => {
            let a = go(a);
            ExtExpr::Ap(a, go(b))
        }
        ExtExpr::Plus(a, b) => {
            let a = go(a);
            ExtExpr::Plus(a, go(b))
        }
        ExtExpr::Case(s, x, l, y, r) => {
            let s = go(s);
            let l = go(l);
            ExtExpr::Case(s, x.clone(), l, y.clone(), go(r))
        }
    }
}

// ---- nondeterministic stepping ----

/// Every one-step successor of `d`, reducing at any position an evaluation
/// context may reach, in any order.
pub fn nd_successors(d: &IntExpr) -> Vec<(IntExpr, Rule)> {
    let mut out = Vec::new();
    if let Some(Ok(r)) = instr(d) {
        out.push(r);
    }
    let mut under = |child: &IntExpr, rebuild: &dyn Fn(IntExpr) -> IntExpr| {
        for (c, rule) in nd_successors(child) {
            out.push((rebuild(c), rule));
        }
    };
    match d {
        IntExpr::Ap(a, b) => {
            under(a, &|c| IntExpr::ap(c, (**b).clone()));
            under(b, &|c| IntExpr::ap((**a).clone(), c));
        }
        IntExpr::Plus(a, b) => {
            under(a, &|c| IntExpr::plus(c, (**b).clone()));
            under(b, &|c| IntExpr::plus((**a).clone(), c));
        }
        IntExpr::Cast(a, t1, t2) => under(a, &|c| IntExpr::cast(c, t1.clone(), t2.clone())),
        IntExpr::FailedCast(a, t1, t2) => under(a, &|c| IntExpr::failed_cast(c, t1.clone(), t2.clone())),
        IntExpr::NonEmptyClosure(a, u, env) => {
            under(a, &|c| IntExpr::NonEmptyClosure(Box::new(c), u.clone(), env.clone()))
        }
        IntExpr::InL(t, a) => under(a, &|c| IntExpr::inl(t.clone(), c)),
        IntExpr::InR(t, a) => under(a, &|c| IntExpr::inr(t.clone(), c)),
        IntExpr::Case(s, x, l, y, r) => {
            under(s, &|c| IntExpr::Case(Box::new(c), x.clone(), l.clone(), y.clone(), r.clone()))
        }
        _ => {}
    }
    out
}
