//! Capture-avoiding substitution into internal expressions.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{fresh_var, Env, IntExpr};

/// `[d/x]target`
pub fn subst(d: &IntExpr, x: &str, target: &IntExpr) -> IntExpr {
    let mut map = BTreeMap::new();
    map.insert(x.to_owned(), d.clone());
    Subst::new(map).apply(target)
}

/// Apply every binding of `env` simultaneously.
pub fn subst_env(env: &Env, target: &IntExpr) -> IntExpr {
    let map = env.iter().map(|(x, d)| (x.to_owned(), d.clone())).collect();
    Subst::new(map).apply(target)
}

struct Subst {
    map: BTreeMap<String, IntExpr>,
    range_fv: BTreeSet<String>,
}

impl Subst {
    fn new(map: BTreeMap<String, IntExpr>) -> Self {
        let range_fv = map.values().flat_map(|d| d.free_vars()).collect();
        Subst { map, range_fv }
    }

    fn apply(&self, d: &IntExpr) -> IntExpr {
        if self.map.is_empty() {
            return d.clone();
        }
        match d {
            IntExpr::Const | IntExpr::NumLit(_) => d.clone(),
            IntExpr::Var(x) => self.map.get(x).cloned().unwrap_or_else(|| d.clone()),
            IntExpr::LamAnn(x, t, body) => {
                let (x, body) = self.under(x, body);
                IntExpr::LamAnn(x, t.clone(), Box::new(body))
            }
            IntExpr::Ap(a, b) => IntExpr::ap(self.apply(a), self.apply(b)),
            IntExpr::Plus(a, b) => IntExpr::plus(self.apply(a), self.apply(b)),
            IntExpr::EmptyClosure(u, env) => IntExpr::EmptyClosure(u.clone(), env.map(|d| self.apply(d))),
            IntExpr::NonEmptyClosure(inner, u, env) => {
                IntExpr::NonEmptyClosure(Box::new(self.apply(inner)), u.clone(), env.map(|d| self.apply(d)))
            }
            IntExpr::Cast(inner, t1, t2) => IntExpr::cast(self.apply(inner), t1.clone(), t2.clone()),
            IntExpr::FailedCast(inner, t1, t2) => IntExpr::failed_cast(self.apply(inner), t1.clone(), t2.clone()),
            IntExpr::InL(t, inner) => IntExpr::inl(t.clone(), self.apply(inner)),
            IntExpr::InR(t, inner) => IntExpr::inr(t.clone(), self.apply(inner)),
            IntExpr::Case(s, x, l, y, r) => {
                let s = self.apply(s);
                let (x, l) = self.under(x, l);
                let (y, r) = self.under(y, r);
                IntExpr::Case(Box::new(s), x, Box::new(l), y, Box::new(r))
            }
        }
    }

    /// Substitute into `body` under binder `x`, renaming `x` if it would
    /// capture a free variable of the substituted terms.
    fn under(&self, x: &str, body: &IntExpr) -> (String, IntExpr) {
        let shadowed = self.map.contains_key(x);
        if !shadowed && !self.range_fv.contains(x) {
            return (x.to_owned(), self.apply(body));
        }
        let mut map = self.map.clone();
        map.remove(x);
        let inner = if shadowed { Subst::new(map) } else { Subst { map, range_fv: self.range_fv.clone() } };
        if !inner.range_fv.contains(x) {
            return (x.to_owned(), inner.apply(body));
        }
        let mut avoid = inner.range_fv.clone();
        avoid.extend(body.free_vars());
        let fresh = fresh_var(x, &avoid);
        let mut map = inner.map;
        map.insert(x.to_owned(), IntExpr::var(&fresh));
        let mut range_fv = inner.range_fv;
        range_fv.insert(fresh.clone());
        (fresh, Subst { map, range_fv }.apply(body))
    }
}
