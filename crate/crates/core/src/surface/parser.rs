use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{lex, Tok};
use super::{ParseError, Span, SpanTree};
use crate::statics::syn;
use crate::syntax::{fresh_var, ExtExpr, HoleName, Ty, TypingCtx};

/// Parser settings.
#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Replace each free variable with an empty hole named after it.
    pub free_vars_as_holes: bool,
    /// Hole names auto-naming must avoid and explicit names may not reuse.
    pub reserved_holes: BTreeSet<HoleName>,
}

/// A parsed program with source positions for every subterm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub expr: ExtExpr,
    pub spans: SpanTree,
    /// Free variables left in the program, with their positions.
    pub free_vars: Vec<(String, Span)>,
}

pub fn parse(src: &str) -> Result<ExtExpr, ParseError> {
    parse_with(src, &ParseOptions::default()).map(|p| p.expr)
}

pub fn parse_with(src: &str, opts: &ParseOptions) -> Result<Parsed, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { src, toks, pos: 0, scope: Vec::new(), explicit: BTreeMap::new(), autos: 0, opts };
    let (expr, spans) = p.expr()?;
    p.expect(&Tok::Eof)?;
    let expr = p.name_auto_holes(expr);
    let mut free_vars = Vec::new();
    collect_free(&expr, &spans, &mut Vec::new(), &mut free_vars);
    let expr = if opts.free_vars_as_holes { free_vars_to_holes(&expr) } else { expr };
    Ok(Parsed { expr, spans, free_vars })
}

pub fn parse_ty(src: &str) -> Result<Ty, ParseError> {
    let opts = ParseOptions::default();
    let mut p =
        Parser { src, toks: lex(src)?, pos: 0, scope: Vec::new(), explicit: BTreeMap::new(), autos: 0, opts: &opts };
    let t = p.ty()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

const AUTO_PREFIX: char = '\0';

type Node = (ExtExpr, SpanTree);

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    /// Enclosing binders and their types, when known.
    scope: Vec<(String, Option<Ty>)>,
    explicit: BTreeMap<String, Span>,
    autos: usize,
    opts: &'a ParseOptions,
}

fn leaf(e: ExtExpr, span: Span) -> Node {
    (e, SpanTree::leaf(span))
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        self.toks[self.pos.saturating_sub(1)].1.end
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        Err(ParseError::new(format!("expected {wanted}, found {}", self.peek().describe()), self.span()))
    }

    fn expect(&mut self, tok: &Tok) -> Result<Span, ParseError> {
        if self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::C
                | Tok::Num(_)
                | Tok::Ident(_)
                | Tok::Question(_)
                | Tok::LBrace
                | Tok::Inl
                | Tok::Inr
                | Tok::Case
                | Tok::LParen
        )
    }

    fn starts_binder(&self) -> bool {
        matches!(self.peek(), Tok::Backslash | Tok::Let)
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        if self.starts_binder() {
            return self.binder();
        }
        let (mut e, mut s) = self.sum()?;
        while *self.peek() == Tok::Colon {
            self.bump();
            let t = self.ty()?;
            let span = Span::new(s.span.start, self.prev_end());
            e = ExtExpr::asc(e, t);
            s = SpanTree::node(span, vec![s]);
        }
        Ok((e, s))
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let (mut e, mut s) = self.app()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let (r, rs) = self.app()?;
            let span = Span::new(s.span.start, rs.span.end);
            e = ExtExpr::plus(e, r);
            s = SpanTree::node(span, vec![s, rs]);
        }
        Ok((e, s))
    }

    fn app(&mut self) -> Result<Node, ParseError> {
        if self.starts_binder() {
            return self.binder();
        }
        if !self.starts_atom() {
            return self.unexpected("an expression");
        }
        let (mut e, mut s) = self.atom()?;
        loop {
            let (arg, arg_s) = if self.starts_atom() {
                self.atom()?
            } else if self.starts_binder() {
                self.binder()?
            } else {
                break;
            };
            let span = Span::new(s.span.start, arg_s.span.end);
            e = ExtExpr::ap(e, arg);
            s = SpanTree::node(span, vec![s, arg_s]);
        }
        Ok((e, s))
    }

    fn with_binder<R>(&mut self, x: &str, t: Option<Ty>, f: impl FnOnce(&mut Self) -> R) -> R {
        self.scope.push((x.to_owned(), t));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn binder(&mut self) -> Result<Node, ParseError> {
        let (kw, kw_span) = self.bump();
        let start = kw_span.start;
        let x = self.ident()?;
        let ann = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.ty()?)
        } else {
            None
        };
        if kw == Tok::Backslash {
            self.expect(&Tok::Dot)?;
            let (body, bs) = self.with_binder(&x, ann.clone(), |p| p.expr())?;
            let span = Span::new(start, bs.span.end);
            let e = match ann {
                Some(t) => ExtExpr::lam_ann(&x, t, body),
                None => ExtExpr::lam(&x, body),
            };
            return Ok((e, SpanTree::node(span, vec![bs])));
        }
        self.expect(&Tok::Eq)?;
        let (bound, bound_s) = self.expr()?;
        self.expect(&Tok::In)?;
        let t = match &ann {
            Some(t) => t.clone(),
            None => self.let_type(&bound, bound_s.span)?,
        };
        let (body, body_s) = self.with_binder(&x, Some(t.clone()), |p| p.expr())?;
        let span = Span::new(start, body_s.span.end);
        let fun = ExtExpr::lam_ann(&x, t.clone(), body);
        let fun_s = SpanTree::node(span, vec![body_s]);
        let (arg, arg_s) = match ann {
            Some(t) => (ExtExpr::asc(bound, t), SpanTree::node(bound_s.span, vec![bound_s])),
            None => (bound, bound_s),
        };
        Ok((ExtExpr::ap(fun, arg), SpanTree::node(span, vec![fun_s, arg_s])))
    }

    /// Type of an unannotated let-bound expression.
    fn let_type(&self, bound: &ExtExpr, span: Span) -> Result<Ty, ParseError> {
        let mut ctx = TypingCtx::new();
        let mut free = Vec::new();
        ext_free_vars(bound, &mut Vec::new(), &mut free);
        for x in free {
            match self.scope.iter().rev().find(|(y, _)| *y == x) {
                Some((_, Some(t))) => ctx = ctx.extend(&x, t.clone()),
                Some((_, None)) => {
                    return Err(ParseError::new(format!("the type of `{x}` is not known here; annotate the let"), span))
                }
                None if self.opts.free_vars_as_holes => ctx = ctx.extend(&x, Ty::Hole),
                None => {}
            }
        }
        syn(&ctx, bound).map_err(|err| {
            ParseError::new(format!("the let-bound expression has no synthesized type ({err}); annotate the let"), span)
        })
    }

    fn hole_name(&mut self, name: Option<String>, span: Span) -> Result<HoleName, ParseError> {
        match name {
            Some(u) => {
                if self.explicit.contains_key(&u) || self.opts.reserved_holes.contains(&HoleName::new(u.clone())) {
                    return Err(ParseError::new(format!("hole name `{u}` is used more than once"), span));
                }
                self.explicit.insert(u.clone(), span);
                Ok(HoleName::new(u))
            }
            None => {
                self.autos += 1;
                Ok(HoleName::new(format!("{AUTO_PREFIX}{}", self.autos)))
            }
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::C => Ok(leaf(ExtExpr::Const, span)),
            Tok::Num(n) => Ok(leaf(ExtExpr::NumLit(n), span)),
            Tok::Ident(x) => Ok(leaf(ExtExpr::Var(x), span)),
            Tok::Question(name) => {
                let u = self.hole_name(name, span)?;
                Ok(leaf(ExtExpr::EmptyHole(u), span))
            }
            Tok::LBrace => {
                let start = span.start;
                // The name is assigned at the opening brace so auto-naming
                // follows reading order.
                let auto = self.autos;
                self.autos += 1;
                let (inner, inner_s) = self.expr()?;
                let name = match self.peek().clone() {
                    Tok::RBrace(name) => {
                        self.bump();
                        name
                    }
                    _ => return self.unexpected("`}`"),
                };
                let name = match name {
                    Some(u) => Some(u),
                    None => match self.peek().clone() {
                        Tok::Ident(u) => {
                            self.bump();
                            Some(u)
                        }
                        Tok::Num(n) if n >= 0 => {
                            let s = self.bump().1;
                            Some(self.src[s.start..s.end].to_owned())
                        }
                        _ => None,
                    },
                };
                let end = self.prev_end();
                let u = match name {
                    Some(u) => self.hole_name(Some(u), Span::new(start, end))?,
                    None => HoleName::new(format!("{AUTO_PREFIX}{}", auto + 1)),
                };
                Ok((ExtExpr::NonEmptyHole(Box::new(inner), u), SpanTree::node(Span::new(start, end), vec![inner_s])))
            }
            Tok::Inl | Tok::Inr => {
                if !self.starts_atom() {
                    return self.unexpected("an argument to the injection");
                }
                let (inner, inner_s) = self.atom()?;
                let e = if tok == Tok::Inl { ExtExpr::inl(inner) } else { ExtExpr::inr(inner) };
                Ok((e, SpanTree::node(Span::new(span.start, inner_s.span.end), vec![inner_s])))
            }
            Tok::Case => {
                let (scrut, ss) = self.expr()?;
                self.expect(&Tok::Of)?;
                self.expect(&Tok::Inl)?;
                let x = self.ident()?;
                self.expect(&Tok::Arrow)?;
                let (l, ls) = self.with_binder(&x, None, |p| p.expr())?;
                self.expect(&Tok::Pipe)?;
                self.expect(&Tok::Inr)?;
                let y = self.ident()?;
                self.expect(&Tok::Arrow)?;
                let (r, rs) = self.with_binder(&y, None, |p| p.expr())?;
                let end = self.expect(&Tok::End)?.end;
                Ok((ExtExpr::case(scrut, &x, l, &y, r), SpanTree::node(Span::new(span.start, end), vec![ss, ls, rs])))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                self.unexpected("an expression")
            }
        }
    }

    fn ty(&mut self) -> Result<Ty, ParseError> {
        let dom = self.ty_sum()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Ty::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_sum(&mut self) -> Result<Ty, ParseError> {
        let mut t = self.ty_atom()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            t = Ty::sum(t, self.ty_atom()?);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<Ty, ParseError> {
        match self.peek() {
            Tok::B => {
                self.bump();
                Ok(Ty::Base)
            }
            Tok::NumTy => {
                self.bump();
                Ok(Ty::Num)
            }
            Tok::Question(None) => {
                self.bump();
                Ok(Ty::Hole)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }

    /// Give auto-named holes numerals in reading order, skipping numerals
    /// already taken explicitly.
    fn name_auto_holes(&self, e: ExtExpr) -> ExtExpr {
        let taken: BTreeSet<String> =
            self.explicit.keys().cloned().chain(self.opts.reserved_holes.iter().map(|u| u.0.clone())).collect();
        let mut pending: Vec<(usize, String)> = e
            .hole_names()
            .into_iter()
            .filter_map(|u| Some((u.0.strip_prefix(AUTO_PREFIX)?.parse().ok()?, u.0)))
            .collect();
        pending.sort();
        let mut names = BTreeMap::new();
        let mut next = 0u64;
        for (_, placeholder) in pending {
            next += 1;
            while taken.contains(&next.to_string()) {
                next += 1;
            }
            names.insert(placeholder, next.to_string());
        }
        rename_holes(&e, &|u: &HoleName| names.get(&u.0).map(|n| HoleName::new(n.clone())).unwrap_or_else(|| u.clone()))
    }
}

fn rename_holes(e: &ExtExpr, f: &dyn Fn(&HoleName) -> HoleName) -> ExtExpr {
    let go = |e: &ExtExpr| Box::new(rename_holes(e, f));
    match e {
        ExtExpr::Const | ExtExpr::Var(_) | ExtExpr::NumLit(_) => e.clone(),
        ExtExpr::EmptyHole(u) => ExtExpr::EmptyHole(f(u)),
        ExtExpr::NonEmptyHole(inner, u) => ExtExpr::NonEmptyHole(go(inner), f(u)),
        ExtExpr::LamAnn(x, t, b) => ExtExpr::LamAnn(x.clone(), t.clone(), go(b)),
        ExtExpr::Lam(x, b) => ExtExpr::Lam(x.clone(), go(b)),
        ExtExpr::Ap(a, b) => ExtExpr::Ap(go(a), go(b)),
        ExtExpr::Plus(a, b) => ExtExpr::Plus(go(a), go(b)),
        ExtExpr::Asc(inner, t) => ExtExpr::Asc(go(inner), t.clone()),
        ExtExpr::InL(inner) => ExtExpr::InL(go(inner)),
        ExtExpr::InR(inner) => ExtExpr::InR(go(inner)),
        ExtExpr::Case(s, x, l, y, r) => ExtExpr::Case(go(s), x.clone(), go(l), y.clone(), go(r)),
    }
}

/// Free variables in order of first occurrence.
fn ext_free_vars(e: &ExtExpr, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match e {
        ExtExpr::Const | ExtExpr::NumLit(_) | ExtExpr::EmptyHole(_) => {}
        ExtExpr::Var(x) => {
            if !bound.contains(x) && !out.contains(x) {
                out.push(x.clone());
            }
        }
        ExtExpr::LamAnn(x, _, b) | ExtExpr::Lam(x, b) => {
            bound.push(x.clone());
            ext_free_vars(b, bound, out);
            bound.pop();
        }
        ExtExpr::NonEmptyHole(inner, _) | ExtExpr::Asc(inner, _) | ExtExpr::InL(inner) | ExtExpr::InR(inner) => {
            ext_free_vars(inner, bound, out)
        }
        ExtExpr::Ap(a, b) | ExtExpr::Plus(a, b) => {
            ext_free_vars(a, bound, out);
            ext_free_vars(b, bound, out);
        }
        ExtExpr::Case(s, x, l, y, r) => {
            ext_free_vars(s, bound, out);
            bound.push(x.clone());
            ext_free_vars(l, bound, out);
            bound.pop();
            bound.push(y.clone());
            ext_free_vars(r, bound, out);
            bound.pop();
        }
    }
}

fn collect_free(e: &ExtExpr, s: &SpanTree, bound: &mut Vec<String>, out: &mut Vec<(String, Span)>) {
    let child = |i: usize| &s.children[i];
    match e {
        ExtExpr::Const | ExtExpr::NumLit(_) | ExtExpr::EmptyHole(_) => {}
        ExtExpr::Var(x) => {
            if !bound.contains(x) {
                out.push((x.clone(), s.span));
            }
        }
        ExtExpr::LamAnn(x, _, b) | ExtExpr::Lam(x, b) => {
            bound.push(x.clone());
            collect_free(b, child(0), bound, out);
            bound.pop();
        }
        ExtExpr::NonEmptyHole(inner, _) | ExtExpr::Asc(inner, _) | ExtExpr::InL(inner) | ExtExpr::InR(inner) => {
            collect_free(inner, child(0), bound, out)
        }
        ExtExpr::Ap(a, b) | ExtExpr::Plus(a, b) => {
            collect_free(a, child(0), bound, out);
            collect_free(b, child(1), bound, out);
        }
        ExtExpr::Case(sc, x, l, y, r) => {
            collect_free(sc, child(0), bound, out);
            bound.push(x.clone());
            collect_free(l, child(1), bound, out);
            bound.pop();
            bound.push(y.clone());
            collect_free(r, child(2), bound, out);
            bound.pop();
        }
    }
}

/// Replace every free variable with an empty hole named after it; repeated
/// names get primes.
pub fn free_vars_to_holes(e: &ExtExpr) -> ExtExpr {
    let mut used: BTreeSet<String> = e.hole_names().into_iter().map(|u| u.0).collect();
    holes_for_free(e, &mut Vec::new(), &mut used)
}

fn holes_for_free(e: &ExtExpr, bound: &mut Vec<String>, used: &mut BTreeSet<String>) -> ExtExpr {
    let mut go = |e: &ExtExpr, bound: &mut Vec<String>| Box::new(holes_for_free(e, bound, used));
    match e {
        ExtExpr::Var(x) if !bound.contains(x) => {
            let name = fresh_var(x, used);
            used.insert(name.clone());
            ExtExpr::EmptyHole(HoleName::new(name))
        }
        ExtExpr::Const | ExtExpr::NumLit(_) | ExtExpr::EmptyHole(_) | ExtExpr::Var(_) => e.clone(),
        ExtExpr::LamAnn(x, t, b) => {
            bound.push(x.clone());
            let b = go(b, bound);
            bound.pop();
            ExtExpr::LamAnn(x.clone(), t.clone(), b)
        }
        ExtExpr::Lam(x, b) => {
            bound.push(x.clone());
            let b = go(b, bound);
            bound.pop();
            ExtExpr::Lam(x.clone(), b)
        }
        ExtExpr::NonEmptyHole(inner, u) => ExtExpr::NonEmptyHole(go(inner, bound), u.clone()),
        ExtExpr::Asc(inner, t) => ExtExpr::Asc(go(inner, bound), t.clone()),
        ExtExpr::InL(inner) => ExtExpr::InL(go(inner, bound)),
        ExtExpr::InR(inner) => ExtExpr::InR(go(inner, bound)),
        ExtExpr::Ap(a, b) => {
            let a = go(a, bound);
            ExtExpr::Ap(a, go(b, bound))
        }
        ExtExpr::Plus(a, b) => {
            let a = go(a, bound);
            ExtExpr::Plus(a, go(b, bound))
        }
        ExtExpr::Case(s, x, l, y, r) => {
            let s = go(s, bound);
            bound.push(x.clone());
            let l = go(l, bound);
            bound.pop();
            bound.push(y.clone());
            let r = go(r, bound);
            bound.pop();
            ExtExpr::Case(s, x.clone(), l, y.clone(), r)
        }
    }
}
