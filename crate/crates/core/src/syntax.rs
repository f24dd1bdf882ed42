//! Term languages shared by every phase: types, external expressions as the
//! programmer writes them, internal expressions produced by elaboration, and
//! the contexts and environments that go with them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Types. `Hole` is the unknown type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Base,
    Num,
    Arrow(Box<Ty>, Box<Ty>),
    Sum(Box<Ty>, Box<Ty>),
    Hole,
}

impl Ty {
    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn sum(left: Ty, right: Ty) -> Ty {
        Ty::Sum(Box::new(left), Box::new(right))
    }

    /// `? -> ?`
    pub fn hole_arrow() -> Ty {
        Ty::arrow(Ty::Hole, Ty::Hole)
    }

    /// `? + ?`
    pub fn hole_sum() -> Ty {
        Ty::sum(Ty::Hole, Ty::Hole)
    }
}

/// Name of an expression hole. Unique per hole in an external program; many
/// closures may share one name after evaluation duplicates them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoleName(pub String);

impl HoleName {
    pub fn new(name: impl Into<String>) -> Self {
        HoleName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for HoleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for HoleName {
    fn from(s: &str) -> Self {
        HoleName(s.to_owned())
    }
}

/// External expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtExpr {
    Const,
    Var(String),
    LamAnn(String, Ty, Box<ExtExpr>),
    Lam(String, Box<ExtExpr>),
    Ap(Box<ExtExpr>, Box<ExtExpr>),
    EmptyHole(HoleName),
    NonEmptyHole(Box<ExtExpr>, HoleName),
    Asc(Box<ExtExpr>, Ty),
    NumLit(i64),
    Plus(Box<ExtExpr>, Box<ExtExpr>),
    InL(Box<ExtExpr>),
    InR(Box<ExtExpr>),
    Case(Box<ExtExpr>, String, Box<ExtExpr>, String, Box<ExtExpr>),
}

impl ExtExpr {
    pub fn var(x: &str) -> Self {
        ExtExpr::Var(x.to_owned())
    }

    pub fn lam_ann(x: &str, ty: Ty, body: ExtExpr) -> Self {
        ExtExpr::LamAnn(x.to_owned(), ty, Box::new(body))
    }

    pub fn lam(x: &str, body: ExtExpr) -> Self {
        ExtExpr::Lam(x.to_owned(), Box::new(body))
    }

    pub fn ap(f: ExtExpr, a: ExtExpr) -> Self {
        ExtExpr::Ap(Box::new(f), Box::new(a))
    }

    pub fn hole(u: &str) -> Self {
        ExtExpr::EmptyHole(HoleName::from(u))
    }

    pub fn ne_hole(e: ExtExpr, u: &str) -> Self {
        ExtExpr::NonEmptyHole(Box::new(e), HoleName::from(u))
    }

    pub fn asc(e: ExtExpr, ty: Ty) -> Self {
        ExtExpr::Asc(Box::new(e), ty)
    }

    pub fn plus(a: ExtExpr, b: ExtExpr) -> Self {
        ExtExpr::Plus(Box::new(a), Box::new(b))
    }

    pub fn inl(e: ExtExpr) -> Self {
        ExtExpr::InL(Box::new(e))
    }

    pub fn inr(e: ExtExpr) -> Self {
        ExtExpr::InR(Box::new(e))
    }

    pub fn case(scrut: ExtExpr, x: &str, l: ExtExpr, y: &str, r: ExtExpr) -> Self {
        ExtExpr::Case(Box::new(scrut), x.to_owned(), Box::new(l), y.to_owned(), Box::new(r))
    }

    /// Hole names in left-to-right order, including duplicates.
    pub fn hole_names(&self) -> Vec<HoleName> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<HoleName>) {
        match self {
            ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) => {}
            ExtExpr::EmptyHole(u) => out.push(u.clone()),
            ExtExpr::NonEmptyHole(e, u) => {
                e.collect_holes(out);
                out.push(u.clone());
            }
            ExtExpr::LamAnn(_, _, e) | ExtExpr::Lam(_, e) | ExtExpr::Asc(e, _) | ExtExpr::InL(e) | ExtExpr::InR(e) => {
                e.collect_holes(out)
            }
            ExtExpr::Ap(a, b) | ExtExpr::Plus(a, b) => {
                a.collect_holes(out);
                b.collect_holes(out);
            }
            ExtExpr::Case(s, _, l, _, r) => {
                s.collect_holes(out);
                l.collect_holes(out);
                r.collect_holes(out);
            }
        }
    }

    /// The first hole name occurring more than once, if any.
    pub fn duplicate_hole(&self) -> Option<HoleName> {
        let mut seen = BTreeSet::new();
        self.hole_names().into_iter().find(|u| !seen.insert(u.clone()))
    }

    /// Replace the hole named `u` (empty or non-empty) with `filler`.
    pub fn replace_hole(&self, u: &HoleName, filler: &ExtExpr) -> ExtExpr {
        let go = |e: &ExtExpr| Box::new(e.replace_hole(u, filler));
        match self {
            ExtExpr::EmptyHole(v) | ExtExpr::NonEmptyHole(_, v) if v == u => filler.clone(),
            ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) | ExtExpr::EmptyHole(_) => self.clone(),
            ExtExpr::NonEmptyHole(e, v) => ExtExpr::NonEmptyHole(go(e), v.clone()),
            ExtExpr::LamAnn(x, t, e) => ExtExpr::LamAnn(x.clone(), t.clone(), go(e)),
            ExtExpr::Lam(x, e) => ExtExpr::Lam(x.clone(), go(e)),
            ExtExpr::Asc(e, t) => ExtExpr::Asc(go(e), t.clone()),
            ExtExpr::InL(e) => ExtExpr::InL(go(e)),
            ExtExpr::InR(e) => ExtExpr::InR(go(e)),
            ExtExpr::Ap(a, b) => ExtExpr::Ap(go(a), go(b)),
            ExtExpr::Plus(a, b) => ExtExpr::Plus(go(a), go(b)),
            ExtExpr::Case(s, x, l, y, r) => ExtExpr::Case(go(s), x.clone(), go(l), y.clone(), go(r)),
        }
    }
}

/// Internal expressions: every lambda annotated, holes carry environments,
/// casts are explicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntExpr {
    Const,
    Var(String),
    LamAnn(String, Ty, Box<IntExpr>),
    Ap(Box<IntExpr>, Box<IntExpr>),
    EmptyClosure(HoleName, Env),
    NonEmptyClosure(Box<IntExpr>, HoleName, Env),
    Cast(Box<IntExpr>, Ty, Ty),
    FailedCast(Box<IntExpr>, Ty, Ty),
    NumLit(i64),
    Plus(Box<IntExpr>, Box<IntExpr>),
    /// `inl` annotated with the right-hand type.
    InL(Ty, Box<IntExpr>),
    /// `inr` annotated with the left-hand type.
    InR(Ty, Box<IntExpr>),
    Case(Box<IntExpr>, String, Box<IntExpr>, String, Box<IntExpr>),
}

impl IntExpr {
    pub fn var(x: &str) -> Self {
        IntExpr::Var(x.to_owned())
    }

    pub fn lam(x: &str, ty: Ty, body: IntExpr) -> Self {
        IntExpr::LamAnn(x.to_owned(), ty, Box::new(body))
    }

    pub fn ap(f: IntExpr, a: IntExpr) -> Self {
        IntExpr::Ap(Box::new(f), Box::new(a))
    }

    pub fn hole(u: &str, env: Env) -> Self {
        IntExpr::EmptyClosure(HoleName::from(u), env)
    }

    pub fn ne_hole(d: IntExpr, u: &str, env: Env) -> Self {
        IntExpr::NonEmptyClosure(Box::new(d), HoleName::from(u), env)
    }

    pub fn cast(d: IntExpr, from: Ty, to: Ty) -> Self {
        IntExpr::Cast(Box::new(d), from, to)
    }

    pub fn failed_cast(d: IntExpr, from: Ty, to: Ty) -> Self {
        IntExpr::FailedCast(Box::new(d), from, to)
    }

    pub fn plus(a: IntExpr, b: IntExpr) -> Self {
        IntExpr::Plus(Box::new(a), Box::new(b))
    }

    pub fn inl(right: Ty, d: IntExpr) -> Self {
        IntExpr::InL(right, Box::new(d))
    }

    pub fn inr(left: Ty, d: IntExpr) -> Self {
        IntExpr::InR(left, Box::new(d))
    }

    pub fn case(scrut: IntExpr, x: &str, l: IntExpr, y: &str, r: IntExpr) -> Self {
        IntExpr::Case(Box::new(scrut), x.to_owned(), Box::new(l), y.to_owned(), Box::new(r))
    }

    /// Free variables, including those occurring in closure environments.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            IntExpr::Const | IntExpr::NumLit(_) => {}
            IntExpr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            IntExpr::LamAnn(x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            IntExpr::EmptyClosure(_, env) => env.collect_free(bound, out),
            IntExpr::NonEmptyClosure(d, _, env) => {
                d.collect_free(bound, out);
                env.collect_free(bound, out);
            }
            IntExpr::Cast(d, _, _) | IntExpr::FailedCast(d, _, _) | IntExpr::InL(_, d) | IntExpr::InR(_, d) => {
                d.collect_free(bound, out)
            }
            IntExpr::Case(s, x, l, y, r) => {
                s.collect_free(bound, out);
                bound.push(x.clone());
                l.collect_free(bound, out);
                bound.pop();
                bound.push(y.clone());
                r.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Whether the hole `u` occurs anywhere, environments included.
    pub fn mentions_hole(&self, u: &HoleName) -> bool {
        match self {
            IntExpr::Const | IntExpr::NumLit(_) | IntExpr::Var(_) => false,
            IntExpr::EmptyClosure(v, env) => v == u || env.mentions_hole(u),
            IntExpr::NonEmptyClosure(d, v, env) => v == u || d.mentions_hole(u) || env.mentions_hole(u),
            IntExpr::LamAnn(_, _, d)
            | IntExpr::Cast(d, _, _)
            | IntExpr::FailedCast(d, _, _)
            | IntExpr::InL(_, d)
            | IntExpr::InR(_, d) => d.mentions_hole(u),
            IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => a.mentions_hole(u) || b.mentions_hole(u),
            IntExpr::Case(s, _, l, _, r) => s.mentions_hole(u) || l.mentions_hole(u) || r.mentions_hole(u),
        }
    }
}

/// A finite substitution `[d1/x1, ..., dn/xn]` recorded on a hole closure.
///
/// Bindings keep insertion order for display; equality is order-insensitive.
#[derive(Clone, Debug, Default)]
pub struct Env(Vec<(String, IntExpr)>);

impl Env {
    pub fn new() -> Self {
        Env(Vec::new())
    }

    /// Bind `x`, replacing any existing binding in place.
    pub fn insert(&mut self, x: impl Into<String>, d: IntExpr) {
        let x = x.into();
        match self.0.iter_mut().find(|(y, _)| *y == x) {
            Some(slot) => slot.1 = d,
            None => self.0.push((x, d)),
        }
    }

    pub fn with(mut self, x: &str, d: IntExpr) -> Self {
        self.insert(x, d);
        self
    }

    pub fn get(&self, x: &str) -> Option<&IntExpr> {
        self.0.iter().find(|(y, _)| y == x).map(|(_, d)| d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &IntExpr)> {
        self.0.iter().map(|(x, d)| (x.as_str(), d))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<&str> {
        self.0.iter().map(|(x, _)| x.as_str()).collect()
    }

    /// Apply `f` to every bound expression, keeping the domain.
    pub fn map(&self, mut f: impl FnMut(&IntExpr) -> IntExpr) -> Env {
        Env(self.0.iter().map(|(x, d)| (x.clone(), f(d))).collect())
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&IntExpr) -> Result<IntExpr, E>) -> Result<Env, E> {
        let mut out = Vec::with_capacity(self.0.len());
        for (x, d) in &self.0 {
            out.push((x.clone(), f(d)?));
        }
        Ok(Env(out))
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        for (_, d) in &self.0 {
            d.collect_free(bound, out);
        }
    }

    fn mentions_hole(&self, u: &HoleName) -> bool {
        self.0.iter().any(|(_, d)| d.mentions_hole(u))
    }
}

impl PartialEq for Env {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|(x, d)| other.get(x) == Some(d))
    }
}

impl Eq for Env {}

impl FromIterator<(String, IntExpr)> for Env {
    fn from_iter<I: IntoIterator<Item = (String, IntExpr)>>(iter: I) -> Self {
        let mut env = Env::new();
        for (x, d) in iter {
            env.insert(x, d);
        }
        env
    }
}

/// Typing context `x1 : t1, ..., xn : tn`. Extending with a bound name
/// shadows the earlier binding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingCtx(Vec<(String, Ty)>);

impl TypingCtx {
    pub fn new() -> Self {
        TypingCtx(Vec::new())
    }

    pub fn extend(&self, x: &str, ty: Ty) -> TypingCtx {
        let mut out = self.clone();
        out.0.retain(|(y, _)| y != x);
        out.0.push((x.to_owned(), ty));
        out
    }

    pub fn with(self, x: &str, ty: Ty) -> TypingCtx {
        self.extend(x, ty)
    }

    pub fn lookup(&self, x: &str) -> Option<&Ty> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Ty)> {
        self.0.iter().map(|(x, t)| (x.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The contextual type `t[ctx]` recorded for a hole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleType {
    pub ctx: TypingCtx,
    pub ty: Ty,
}

/// Hole context: hole name to contextual type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HoleCtx(BTreeMap<HoleName, HoleType>);

impl HoleCtx {
    pub fn new() -> Self {
        HoleCtx(BTreeMap::new())
    }

    pub fn singleton(u: HoleName, ctx: TypingCtx, ty: Ty) -> Self {
        let mut out = HoleCtx::new();
        out.0.insert(u, HoleType { ctx, ty });
        out
    }

    pub fn get(&self, u: &HoleName) -> Option<&HoleType> {
        self.0.get(u)
    }

    pub fn contains(&self, u: &HoleName) -> bool {
        self.0.contains_key(u)
    }

    pub fn remove(&self, u: &HoleName) -> HoleCtx {
        let mut out = self.clone();
        out.0.remove(u);
        out
    }

    /// Union; identical overlapping bindings are fine, conflicting ones are
    /// reported by name.
    pub fn union(mut self, other: HoleCtx) -> Result<HoleCtx, HoleName> {
        for (u, h) in other.0 {
            match self.0.get(&u) {
                Some(existing) if *existing != h => return Err(u),
                Some(_) => {}
                None => {
                    self.0.insert(u, h);
                }
            }
        }
        Ok(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HoleName, &HoleType)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `[x1/x1, ..., xn/xn]` for `x1 : t1, ..., xn : tn`.
pub fn identity_env(ctx: &TypingCtx) -> Env {
    ctx.iter().map(|(x, _)| (x.to_owned(), IntExpr::var(x))).collect()
}

/// First of `base`, `base'`, `base''`, ... not in `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut candidate = base.to_owned();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Equality up to renaming of bound variables. Hole names compare
/// structurally; environments compare as maps.
pub fn alpha_equiv(a: &IntExpr, b: &IntExpr) -> bool {
    AlphaScope::default().eq(a, b)
}

#[derive(Default)]
struct AlphaScope {
    left: Vec<String>,
    right: Vec<String>,
}

impl AlphaScope {
    fn resolve<'a>(scope: &[String], x: &'a str) -> Result<usize, &'a str> {
        scope.iter().rposition(|y| y == x).ok_or(x)
    }

    fn bind<R>(&mut self, x: &str, y: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        self.left.push(x.to_owned());
        self.right.push(y.to_owned());
        let r = f(self);
        self.left.pop();
        self.right.pop();
        r
    }

    fn eq(&mut self, a: &IntExpr, b: &IntExpr) -> bool {
        use IntExpr::*;
        match (a, b) {
            (Const, Const) => true,
            (NumLit(m), NumLit(n)) => m == n,
            (Var(x), Var(y)) => Self::resolve(&self.left, x) == Self::resolve(&self.right, y),
            (LamAnn(x, t1, d1), LamAnn(y, t2, d2)) => t1 == t2 && self.bind(x, y, |s| s.eq(d1, d2)),
            (Ap(a1, b1), Ap(a2, b2)) | (Plus(a1, b1), Plus(a2, b2)) => self.eq(a1, a2) && self.eq(b1, b2),
            (EmptyClosure(u, s1), EmptyClosure(v, s2)) => u == v && self.env_eq(s1, s2),
            (NonEmptyClosure(d1, u, s1), NonEmptyClosure(d2, v, s2)) => {
                u == v && self.eq(d1, d2) && self.env_eq(s1, s2)
            }
            (Cast(d1, f1, t1), Cast(d2, f2, t2)) | (FailedCast(d1, f1, t1), FailedCast(d2, f2, t2)) => {
                f1 == f2 && t1 == t2 && self.eq(d1, d2)
            }
            (InL(t1, d1), InL(t2, d2)) | (InR(t1, d1), InR(t2, d2)) => t1 == t2 && self.eq(d1, d2),
            (Case(s1, x1, l1, y1, r1), Case(s2, x2, l2, y2, r2)) => {
                self.eq(s1, s2) && self.bind(x1, x2, |s| s.eq(l1, l2)) && self.bind(y1, y2, |s| s.eq(r1, r2))
            }
            _ => false,
        }
    }

    fn env_eq(&mut self, s1: &Env, s2: &Env) -> bool {
        s1.len() == s2.len() && s1.iter().all(|(x, d1)| s2.get(x).is_some_and(|d2| self.eq(d1, d2)))
    }
}
