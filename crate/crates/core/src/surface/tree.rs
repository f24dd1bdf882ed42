//! Structural JSON rendering of internal expressions, for clients that want
//! to select subterms rather than re-parse text.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::print::{print_int, print_ty};
use crate::syntax::{Env, HoleName, IntExpr};

/// `{tag, text, children, ...}` for every node. Closures carry their hole
/// name and instance number, numbered in the same order as the closure index.
pub fn int_tree(d: &IntExpr) -> Value {
    Builder::default().node(d)
}

#[derive(Default)]
struct Builder {
    counts: BTreeMap<HoleName, usize>,
}

impl Builder {
    fn node(&mut self, d: &IntExpr) -> Value {
        let text = print_int(d);
        match d {
            IntExpr::Const => json!({"tag": "Const", "text": text, "children": []}),
            IntExpr::Var(x) => json!({"tag": "Var", "text": text, "name": x, "children": []}),
            IntExpr::NumLit(n) => json!({"tag": "Num", "text": text, "value": n, "children": []}),
            IntExpr::LamAnn(x, t, body) => json!({
                "tag": "Lam", "text": text, "var": x, "type": print_ty(t),
                "children": [self.node(body)],
            }),
            IntExpr::Ap(f, a) => {
                let f = self.node(f);
                json!({"tag": "Ap", "text": text, "children": [f, self.node(a)]})
            }
            IntExpr::EmptyClosure(u, env) => {
                let instance = self.next(u);
                json!({
                    "tag": "EmptyClosure", "text": text, "hole": u.as_str(), "instance": instance,
                    "env": self.env(env), "children": [],
                })
            }
            IntExpr::NonEmptyClosure(inner, u, env) => {
                let instance = self.next(u);
                let inner = self.node(inner);
                json!({
                    "tag": "NonEmptyClosure", "text": text, "hole": u.as_str(), "instance": instance,
                    "env": self.env(env), "children": [inner],
                })
            }
            IntExpr::Cast(inner, t1, t2) => json!({
                "tag": "Cast", "text": text, "from": print_ty(t1), "to": print_ty(t2),
                "children": [self.node(inner)],
            }),
            IntExpr::FailedCast(inner, t1, t2) => json!({
                "tag": "FailedCast", "text": text, "from": print_ty(t1), "to": print_ty(t2),
                "children": [self.node(inner)],
            }),
            IntExpr::Plus(a, b) => {
                let a = self.node(a);
                json!({"tag": "Plus", "text": text, "children": [a, self.node(b)]})
            }
            IntExpr::InL(t, inner) => json!({
                "tag": "InL", "text": text, "type": print_ty(t), "children": [self.node(inner)],
            }),
            IntExpr::InR(t, inner) => json!({
                "tag": "InR", "text": text, "type": print_ty(t), "children": [self.node(inner)],
            }),
            IntExpr::Case(s, x, l, y, r) => {
                let s = self.node(s);
                let l = self.node(l);
                json!({"tag": "Case", "text": text, "vars": [x, y], "children": [s, l, self.node(r)]})
            }
        }
    }

    fn next(&mut self, u: &HoleName) -> usize {
        let n = self.counts.entry(u.clone()).or_insert(0);
        *n += 1;
        *n
    }

    fn env(&mut self, env: &Env) -> Value {
        Value::Array(env.iter().map(|(x, d)| json!({"var": x, "value": self.node(d)})).collect())
    }
}
