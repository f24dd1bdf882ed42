//! Numbering of hole closures in an evaluation result, and the data the
//! context inspector shows for one closure.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Env, HoleCtx, HoleName, IntExpr, Ty};

/// One step of an address into a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Site {
    /// Child subterm, in constructor order.
    Child(usize),
    /// Value bound to a variable in a closure environment.
    Env(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureInstance {
    pub hole: HoleName,
    /// Counts from 1 per hole.
    pub instance: usize,
    pub env: Env,
    /// Enclosing closures, outermost first.
    pub path: Vec<(HoleName, usize)>,
    /// Address from the root of the result.
    pub site: Vec<Site>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureIndex {
    pub instances: Vec<ClosureInstance>,
}

impl ClosureIndex {
    pub fn by_hole(&self, u: &HoleName) -> Vec<&ClosureInstance> {
        self.instances.iter().filter(|c| c.hole == *u).collect()
    }

    pub fn get(&self, u: &HoleName, instance: usize) -> Option<&ClosureInstance> {
        self.instances.iter().find(|c| c.hole == *u && c.instance == instance)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

/// Pre-order, left to right; a closure is numbered before its enveloped
/// term and environment are visited.
pub fn index_closures(result: &IntExpr) -> ClosureIndex {
    let mut walk = Walk { counts: BTreeMap::new(), out: Vec::new() };
    walk.visit(result, &mut Vec::new(), &mut Vec::new());
    ClosureIndex { instances: walk.out }
}

struct Walk {
    counts: BTreeMap<HoleName, usize>,
    out: Vec<ClosureInstance>,
}

impl Walk {
    fn visit(&mut self, d: &IntExpr, path: &mut Vec<(HoleName, usize)>, site: &mut Vec<Site>) {
        match d {
            IntExpr::Const | IntExpr::Var(_) | IntExpr::NumLit(_) => {}
            IntExpr::EmptyClosure(u, env) => self.closure(u, None, env, path, site),
            IntExpr::NonEmptyClosure(inner, u, env) => self.closure(u, Some(inner), env, path, site),
            IntExpr::LamAnn(_, _, a)
            | IntExpr::Cast(a, _, _)
            | IntExpr::FailedCast(a, _, _)
            | IntExpr::InL(_, a)
            | IntExpr::InR(_, a) => self.child(0, a, path, site),
            IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => {
                self.child(0, a, path, site);
                self.child(1, b, path, site);
            }
            IntExpr::Case(s, _, l, _, r) => {
                self.child(0, s, path, site);
                self.child(1, l, path, site);
                self.child(2, r, path, site);
            }
        }
    }

    fn child(&mut self, i: usize, d: &IntExpr, path: &mut Vec<(HoleName, usize)>, site: &mut Vec<Site>) {
        site.push(Site::Child(i));
        self.visit(d, path, site);
        site.pop();
    }

    fn closure(
        &mut self,
        u: &HoleName,
        inner: Option<&IntExpr>,
        env: &Env,
        path: &mut Vec<(HoleName, usize)>,
        site: &mut Vec<Site>,
    ) {
        let n = self.counts.entry(u.clone()).or_insert(0);
        *n += 1;
        let instance = *n;
        self.out.push(ClosureInstance {
            hole: u.clone(),
            instance,
            env: env.clone(),
            path: path.clone(),
            site: site.clone(),
        });
        path.push((u.clone(), instance));
        if let Some(inner) = inner {
            self.child(0, inner, path, site);
        }
        for (x, d) in env.iter() {
            site.push(Site::Env(x.to_owned()));
            self.visit(d, path, site);
            site.pop();
        }
        path.pop();
    }
}

/// A variable in scope at a hole, with its value in one closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub var: String,
    pub ty: Ty,
    pub value: IntExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InspectorView {
    pub hole: HoleName,
    pub instance: usize,
    pub path: Vec<(HoleName, usize)>,
    pub bindings: Vec<Binding>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InspectError {
    UnknownInstance(HoleName, usize),
    UnknownHole(HoleName),
}

impl fmt::Display for InspectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InspectError::UnknownInstance(u, k) => write!(f, "no closure {u}:{k} in the result"),
            InspectError::UnknownHole(u) => write!(f, "hole `{u}` is not in the hole context"),
        }
    }
}

impl std::error::Error for InspectError {}

/// The variables in scope at `u`, in context order, with their values in
/// closure `u:instance`.
pub fn inspect(
    index: &ClosureIndex,
    u: &HoleName,
    instance: usize,
    holes: &HoleCtx,
) -> Result<InspectorView, InspectError> {
    let c = index.get(u, instance).ok_or_else(|| InspectError::UnknownInstance(u.clone(), instance))?;
    let h = holes.get(u).ok_or_else(|| InspectError::UnknownHole(u.clone()))?;
    let bindings = h
        .ctx
        .iter()
        .filter_map(|(x, t)| c.env.get(x).map(|d| Binding { var: x.to_owned(), ty: t.clone(), value: d.clone() }))
        .collect();
    Ok(InspectorView { hole: u.clone(), instance, path: c.path.clone(), bindings })
}
