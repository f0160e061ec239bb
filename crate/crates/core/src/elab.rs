//! Elaboration of raw Twelf syntax into explicit LF.
//!
//! Free uppercase identifiers become meta-variables. In a declaration they
//! are abstracted as leading implicit `Pi` binders; in a query they stay as
//! meta-variables to be solved. Uses of constants that have implicit
//! parameters get fresh holes (`?1`, `?2`, ...) applied to the explicit
//! binders in scope, which are solved by unification while checking the
//! remaining arguments.

use std::collections::HashMap;

use indexmap::IndexMap;
use thiserror::Error;

use crate::lf::{canonicalize_in, Context, Decl, Expr, LfError, MetaContext, Signature, DEFAULT_FUEL};
use crate::name::Name;
use crate::syntax::{parse_expr, parse_signature, RawDecl, RawExpr, Span, SyntaxError};
use crate::typecheck::{check_decl, Checker};

#[derive(Debug, Clone, Error)]
pub enum ElabError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{span}: unbound constant `{name}`")]
    UnboundConstant { name: String, span: Span },
    #[error("{span}: cannot infer a unique type for `{name}`: {reason}")]
    AmbiguousImplicitType { name: String, span: Span, reason: String },
    #[error("{span}: {message}")]
    InferenceFailure { span: Span, message: String },
    #[error(transparent)]
    Type(#[from] LfError),
    #[error("{span}: declaration `{name}`: {source}")]
    InDecl {
        name: String,
        span: Span,
        #[source]
        source: Box<ElabError>,
    },
}

/// An elaborated query: a type whose meta-variables are to be instantiated.
#[derive(Clone, Debug)]
pub struct Query {
    pub ty: Expr,
    /// Meta-variable types in order of first occurrence. Holes created for
    /// implicit arguments come after the named meta-variables.
    pub metas: MetaContext,
}

impl Query {
    /// Meta-variables written by the user, as opposed to generated holes.
    pub fn named_metas(&self) -> impl Iterator<Item = (&Name, &Expr)> {
        self.metas.iter().filter(|(n, _)| !is_hole(n))
    }
}

/// Whether `n` names a hole generated for an implicit argument.
pub fn is_hole(n: &Name) -> bool {
    n.base().starts_with('?')
}

/// Parse and elaborate a whole signature, checking each declaration
/// against the ones before it.
pub fn elaborate_signature(src: &str) -> Result<Signature, ElabError> {
    let raws = parse_signature(src)?;
    let mut sig = Signature::new();
    for raw in &raws {
        let decl = elaborate_decl(raw, &sig).map_err(|e| ElabError::InDecl {
            name: raw.name.clone(),
            span: raw.span,
            source: Box::new(e),
        })?;
        sig.push(decl).map_err(|e| ElabError::InDecl {
            name: raw.name.clone(),
            span: raw.span,
            source: Box::new(e.into()),
        })?;
    }
    Ok(sig)
}

/// Elaborate one declaration, abstracting its free uppercase variables.
pub fn elaborate_decl(raw: &RawDecl, sig: &Signature) -> Result<Decl, ElabError> {
    let name = Name::new(&raw.name);
    let mut el = Elab::new(sig);
    let body = if raw_is_kind(&raw.expr) {
        el.kind(&raw.expr)?
    } else {
        el.ty(&raw.expr)?
    };
    let body = el.resolve(&body)?;
    if let Some(h) = el.unsolved_in(&body) {
        return Err(ElabError::AmbiguousImplicitType {
            name: h.to_string(),
            span: raw.expr.span(),
            reason: "the implicit argument is not determined by the declaration".into(),
        });
    }
    let order = el.finish(raw.expr.span())?;
    let metas: Vec<(Name, Expr)> = order.into_iter().collect();

    // abstract inside-out so each binder captures exactly its own meta
    let mut classifier = body;
    for (x, ty) in metas.iter().rev() {
        let inner = classifier.substitute_meta(&[(x.clone(), Expr::Var(x.clone()))]);
        classifier = Expr::pi(x.clone(), ty.clone(), inner);
    }
    let classifier = canonicalize_in(&classifier, &Expr::Type, sig, &Context::new(), &MetaContext::new())?;
    let mut decl = Decl::new(name.clone(), classifier);
    decl.implicit = metas.len();
    check_decl(sig, name, &decl.classifier, decl.level)?;
    Ok(decl)
}

/// Parse and elaborate a query type.
pub fn elaborate_query(src: &str, sig: &Signature) -> Result<Query, ElabError> {
    let raw = parse_expr(src)?;
    elaborate_query_raw(&raw, sig)
}

pub fn elaborate_query_raw(raw: &RawExpr, sig: &Signature) -> Result<Query, ElabError> {
    let mut el = Elab::new(sig);
    let ty = el.ty(raw)?;
    let ty = el.resolve(&ty)?;
    let mut metas = el.finish(raw.span())?;
    for (h, t) in el.holes.clone() {
        if !el.solved.contains_key(&h) {
            let t = el.resolve(&t)?;
            metas.insert(h, t);
        }
    }
    let ty = canonicalize_in(&ty, &Expr::Type, sig, &Context::new(), &metas)?;
    Checker::with_meta(sig, &metas).check_type(&mut Context::new(), &ty, &Expr::Type)?;
    Ok(Query { ty, metas })
}

fn raw_is_kind(e: &RawExpr) -> bool {
    match e {
        RawExpr::Type(_) => true,
        RawExpr::Pi(_, _, b, _) => raw_is_kind(b),
        _ => false,
    }
}

struct Elab<'a> {
    sig: &'a Signature,
    /// Explicit binders in scope, innermost last: source name, elaborated
    /// name, type.
    scope: Vec<(String, Name, Expr)>,
    /// Named meta-variables with their types once known.
    metas: IndexMap<Name, Option<Expr>>,
    holes: IndexMap<Name, Expr>,
    solved: HashMap<Name, Expr>,
    fuel: u64,
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature) -> Self {
        Elab {
            sig,
            scope: Vec::new(),
            metas: IndexMap::new(),
            holes: IndexMap::new(),
            solved: HashMap::new(),
            fuel: DEFAULT_FUEL,
        }
    }

    fn fail<T>(&self, span: Span, message: impl Into<String>) -> Result<T, ElabError> {
        Err(ElabError::InferenceFailure {
            span,
            message: message.into(),
        })
    }

    fn lookup_scope(&self, x: &str) -> Option<(&Name, &Expr)> {
        self.scope.iter().rev().find(|(y, _, _)| y == x).map(|(_, n, t)| (n, t))
    }

    fn in_scope(&self, n: &Name) -> bool {
        self.scope.iter().any(|(_, m, _)| m == n)
    }

    /// Substitute solved holes and β-normalize.
    fn resolve(&mut self, e: &Expr) -> Result<Expr, ElabError> {
        let mut cur = e.clone();
        loop {
            let pending: Vec<(Name, Expr)> = cur
                .metas()
                .into_iter()
                .filter_map(|m| self.solved.get(&m).map(|s| (m, s.clone())))
                .collect();
            if pending.is_empty() {
                return Ok(cur.beta_normalize_with(&mut self.fuel)?);
            }
            cur = cur.substitute_meta(&pending).beta_normalize_with(&mut self.fuel)?;
        }
    }

    /// Push a binder, renaming it if the name is already in scope so that
    /// names in elaborated terms never shadow each other.
    fn bind(&mut self, x: &str, ty: Expr) -> Name {
        let name = Name::new(x).fresh(|n| self.in_scope(n));
        self.scope.push((x.to_string(), name.clone(), ty));
        name
    }

    fn kind(&mut self, raw: &RawExpr) -> Result<Expr, ElabError> {
        match raw {
            RawExpr::Type(_) => Ok(Expr::Type),
            RawExpr::Pi(x, a, b, _) => {
                let a = self.ty(a)?;
                let x = self.bind(x.as_deref().unwrap_or("_"), a.clone());
                let b = self.kind(b);
                self.scope.pop();
                Ok(Expr::pi(x, a, b?))
            }
            other => self.fail(other.span(), "expected a kind"),
        }
    }

    /// Elaborate a type (an expression of kind `type`).
    fn ty(&mut self, raw: &RawExpr) -> Result<Expr, ElabError> {
        match raw {
            RawExpr::Pi(x, a, b, _) => {
                let a = self.ty(a)?;
                let x = self.bind(x.as_deref().unwrap_or("_"), a.clone());
                let b = self.ty(b);
                self.scope.pop();
                Ok(Expr::pi(x, a, b?))
            }
            RawExpr::Type(span) => self.fail(*span, "`type` is a kind, not a type"),
            RawExpr::Lam(_, _, _, span) => self.fail(*span, "an abstraction is not a type"),
            _ => {
                let (e, k) = self.infer(raw)?;
                let k = self.resolve(&k)?;
                if k != Expr::Type {
                    return self.fail(raw.span(), format!("`{e}` has kind `{k}`, not `type`"));
                }
                Ok(e)
            }
        }
    }

    fn scope_vars(&self) -> Vec<Expr> {
        self.scope.iter().map(|(_, x, _)| Expr::Var(x.clone())).collect()
    }

    /// Hole for one implicit argument, applied to the binders in scope.
    fn hole(&mut self, ty: Expr) -> Expr {
        let name = Name::new(&format!("?{}", self.holes.len() + 1));
        let mut full = ty;
        for (_, x, a) in self.scope.iter().rev() {
            full = Expr::pi(x.clone(), a.clone(), full);
        }
        self.holes.insert(name.clone(), full);
        Expr::apps(Expr::Meta(name), self.scope_vars())
    }

    /// Synthesize the classifier of a type family or object.
    fn infer(&mut self, raw: &RawExpr) -> Result<(Expr, Expr), ElabError> {
        match raw {
            RawExpr::Ident(s, span) => {
                if let Some((n, ty)) = self.lookup_scope(s) {
                    return Ok((Expr::Var(n.clone()), ty.clone()));
                }
                let name = Name::new(s);
                if let Some(d) = self.sig.get(&name) {
                    let (implicit, classifier) = (d.implicit, d.classifier.clone());
                    let mut head = Expr::Const(name);
                    let mut ty = classifier;
                    for _ in 0..implicit {
                        let Expr::Pi(x, dom, cod) = ty else {
                            unreachable!("implicit count exceeds binders")
                        };
                        let arg = self.hole((*dom).clone());
                        ty = cod.substitute(&[(x, arg.clone())]);
                        head = Expr::app(head, arg);
                    }
                    return Ok((head, self.resolve(&ty)?));
                }
                if name.starts_uppercase() {
                    let known = self.metas.entry(name.clone()).or_insert(None).clone();
                    return match known {
                        Some(ty) => Ok((Expr::Meta(name), ty)),
                        None => Err(ElabError::AmbiguousImplicitType {
                            name: s.clone(),
                            span: *span,
                            reason: "it is not used where its type is determined".into(),
                        }),
                    };
                }
                Err(ElabError::UnboundConstant {
                    name: s.clone(),
                    span: *span,
                })
            }
            RawExpr::App(f, a) => {
                let (fe, fty) = self.infer(f)?;
                let fty = self.resolve(&fty)?;
                match fty {
                    Expr::Pi(x, dom, cod) => {
                        let ae = self.check(a, &dom)?;
                        let ty = self.resolve(&cod.substitute(&[(x, ae.clone())]))?;
                        Ok((Expr::app(fe, ae), ty))
                    }
                    other => self.fail(f.span(), format!("`{fe}` has type `{other}` and cannot be applied")),
                }
            }
            RawExpr::Lam(x, a, m, _) => {
                let a = self.ty(a)?;
                let x = self.bind(x, a.clone());
                let r = self.infer(m);
                self.scope.pop();
                let (m, b) = r?;
                Ok((Expr::lam(x.clone(), a.clone(), m), Expr::pi(x, a, b)))
            }
            RawExpr::Pi(..) => {
                let e = self.ty(raw)?;
                Ok((e, Expr::Type))
            }
            RawExpr::Type(span) => self.fail(*span, "`type` cannot appear here"),
        }
    }

    /// Elaborate an object against an expected type.
    fn check(&mut self, raw: &RawExpr, expected: &Expr) -> Result<Expr, ElabError> {
        let expected = self.resolve(expected)?;
        if let RawExpr::Lam(x, a, m, span) = raw {
            let Expr::Pi(y, dom, cod) = &expected else {
                return self.fail(*span, format!("an abstraction cannot have type `{expected}`"));
            };
            let a = self.ty(a)?;
            self.unify(&a, dom, *span)?;
            let x = self.bind(x, a.clone());
            let cod = cod.substitute(&[(y.clone(), Expr::Var(x.clone()))]);
            let r = self.check(m, &cod);
            self.scope.pop();
            return Ok(Expr::lam(x, a, r?));
        }
        if let Some(e) = self.check_meta(raw, &expected)? {
            return Ok(e);
        }
        let (e, found) = self.infer(raw)?;
        self.unify(&found, &expected, raw.span())?;
        Ok(e)
    }

    /// A meta-variable applied to distinct bound variables, checked against
    /// a known type, gets its type read off from that type.
    fn check_meta(&mut self, raw: &RawExpr, expected: &Expr) -> Result<Option<Expr>, ElabError> {
        let mut args = Vec::new();
        let mut head = raw;
        while let RawExpr::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        let RawExpr::Ident(s, span) = head else {
            return Ok(None);
        };
        let name = Name::new(s);
        if !name.starts_uppercase() || self.lookup_scope(s).is_some() || self.sig.get(&name).is_some() {
            return Ok(None);
        }
        let mut vars: Vec<(Name, Expr)> = Vec::new();
        for a in &args {
            let bound = match a {
                RawExpr::Ident(v, _) => self.lookup_scope(v).map(|(n, t)| (n.clone(), t.clone())),
                _ => None,
            };
            match bound {
                Some((n, t)) if !vars.iter().any(|(m, _)| *m == n) => vars.push((n, t)),
                _ => {
                    if self.metas.get(&name).is_some_and(|t| t.is_some()) {
                        return Ok(None);
                    }
                    return Err(ElabError::AmbiguousImplicitType {
                        name: s.clone(),
                        span: *span,
                        reason: "it must be applied to distinct bound variables".into(),
                    });
                }
            }
        }
        let mut candidate = expected.clone();
        for (v, vt) in vars.iter().rev() {
            candidate = Expr::pi(v.clone(), vt.clone(), candidate);
        }
        let candidate = self.resolve(&candidate)?;
        if let Some(x) = candidate.free_vars().into_iter().next() {
            return Err(ElabError::AmbiguousImplicitType {
                name: s.clone(),
                span: *span,
                reason: format!("its type depends on `{x}`, which it is not applied to"),
            });
        }
        match self.metas.get(&name).cloned().flatten() {
            Some(prev) => self.unify(&prev, &candidate, *span)?,
            None => {
                self.metas.insert(name.clone(), Some(candidate));
            }
        }
        let e = Expr::apps(Expr::Meta(name), vars.into_iter().map(|(v, _)| Expr::Var(v)));
        Ok(Some(e))
    }

    fn unify(&mut self, a: &Expr, b: &Expr, span: Span) -> Result<(), ElabError> {
        let a = self.resolve(a)?;
        let b = self.resolve(b)?;
        if self.unify_nf(&a, &b)? {
            Ok(())
        } else {
            let (a, b) = (self.resolve(&a)?, self.resolve(&b)?);
            self.fail(span, format!("type mismatch: `{a}` and `{b}`"))
        }
    }

    fn unsolved_hole<'e>(&self, e: &'e Expr) -> Option<(Name, Vec<&'e Expr>)> {
        let (h, args) = e.spine();
        match h {
            Expr::Meta(n) if self.holes.contains_key(n) && !self.solved.contains_key(n) => Some((n.clone(), args)),
            _ => None,
        }
    }

    /// Try to solve `hole args = other`, where args are distinct variables.
    fn solve_hole(&mut self, hole: &Name, args: &[&Expr], other: &Expr) -> Result<bool, ElabError> {
        let mut vars = Vec::new();
        for a in args {
            match a {
                Expr::Var(v) if !vars.contains(v) => vars.push(v.clone()),
                _ => return Ok(false),
            }
        }
        if other.metas().contains(hole) || other.free_vars().iter().any(|v| !vars.contains(v)) {
            return Ok(false);
        }
        let mut ty = self.holes[hole].clone();
        let mut binders = Vec::new();
        for _ in &vars {
            let Expr::Pi(x, dom, cod) = ty else { return Ok(false) };
            binders.push((x, (*dom).clone()));
            ty = (*cod).clone();
        }
        // binder names of a hole's type are distinct, so a simultaneous
        // renaming of the arguments to them is safe
        let renaming: Vec<(Name, Expr)> = vars
            .iter()
            .zip(&binders)
            .map(|(v, (x, _))| (v.clone(), Expr::Var(x.clone())))
            .collect();
        let mut sol = other.substitute(&renaming);
        for (x, dom) in binders.into_iter().rev() {
            sol = Expr::lam(x, dom, sol);
        }
        self.solved.insert(hole.clone(), sol);
        Ok(true)
    }

    fn unify_nf(&mut self, a: &Expr, b: &Expr) -> Result<bool, ElabError> {
        if a.alpha_eq(b) {
            return Ok(true);
        }
        if let Some((h, args)) = self.unsolved_hole(a) {
            if self.solve_hole(&h, &args, b)? {
                return Ok(true);
            }
        }
        if let Some((h, args)) = self.unsolved_hole(b) {
            if self.solve_hole(&h, &args, a)? {
                return Ok(true);
            }
        }
        match (a, b) {
            (Expr::Pi(x, a1, b1), Expr::Pi(y, a2, b2)) | (Expr::Lam(x, a1, b1), Expr::Lam(y, a2, b2)) => {
                if !self.unify_nf(a1, a2)? {
                    return Ok(false);
                }
                let z = x.fresh(|n| b1.has_free_var(n) || b2.has_free_var(n) || self.in_scope(n));
                let b1 = b1.substitute(&[(x.clone(), Expr::Var(z.clone()))]);
                let b2 = b2.substitute(&[(y.clone(), Expr::Var(z.clone()))]);
                let (b1, b2) = (self.resolve(&b1)?, self.resolve(&b2)?);
                self.unify_nf(&b1, &b2)
            }
            (Expr::Lam(x, _, body), other) | (other, Expr::Lam(x, _, body)) => {
                let z = x.fresh(|n| body.has_free_var(n) || other.has_free_var(n));
                let body = body.substitute(&[(x.clone(), Expr::Var(z.clone()))]);
                let eta = Expr::app(other.clone(), Expr::Var(z));
                let (l, r) = (self.resolve(&body)?, self.resolve(&eta)?);
                self.unify_nf(&l, &r)
            }
            (Expr::App(..), Expr::App(..)) => {
                let (h1, args1) = a.spine();
                let (h2, args2) = b.spine();
                if args1.len() != args2.len() || !rigid_eq(h1, h2) {
                    return Ok(false);
                }
                let pairs: Vec<(Expr, Expr)> = args1.into_iter().cloned().zip(args2.into_iter().cloned()).collect();
                for (x, y) in pairs {
                    let (x, y) = (self.resolve(&x)?, self.resolve(&y)?);
                    if !self.unify_nf(&x, &y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Check that every named meta has a type free of unsolved holes, and
    /// return the metas in an order where each comes after those its type
    /// mentions.
    fn finish(&mut self, span: Span) -> Result<MetaContext, ElabError> {
        let mut typed = IndexMap::new();
        let names: Vec<Name> = self.metas.keys().cloned().collect();
        for n in names {
            let Some(ty) = self.metas[&n].clone() else {
                return Err(ElabError::AmbiguousImplicitType {
                    name: n.to_string(),
                    span,
                    reason: "no type could be inferred".into(),
                });
            };
            let ty = self.resolve(&ty)?;
            if let Some(h) = ty.metas().into_iter().find(is_hole) {
                return Err(ElabError::AmbiguousImplicitType {
                    name: n.to_string(),
                    span,
                    reason: format!("its type mentions the unsolved implicit argument {h}"),
                });
            }
            typed.insert(n, ty);
        }
        let mut out = MetaContext::new();
        let mut visiting = Vec::new();
        let keys: Vec<Name> = typed.keys().cloned().collect();
        for n in keys {
            visit(&n, &typed, &mut out, &mut visiting, span)?;
        }
        Ok(out)
    }
}

impl Elab<'_> {
    fn unsolved_in(&self, e: &Expr) -> Option<Name> {
        e.metas()
            .into_iter()
            .find(|m| is_hole(m) && !self.solved.contains_key(m))
    }
}

fn visit(
    n: &Name,
    typed: &IndexMap<Name, Expr>,
    out: &mut MetaContext,
    visiting: &mut Vec<Name>,
    span: Span,
) -> Result<(), ElabError> {
    if out.contains_key(n) {
        return Ok(());
    }
    if visiting.contains(n) {
        return Err(ElabError::InferenceFailure {
            span,
            message: format!("the type of `{n}` depends on itself"),
        });
    }
    visiting.push(n.clone());
    let ty = typed[n].clone();
    for m in ty.metas() {
        if typed.contains_key(&m) {
            visit(&m, typed, out, visiting, span)?;
        }
    }
    visiting.pop();
    out.insert(n.clone(), ty);
    Ok(())
}

fn rigid_eq(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) | (Expr::Var(x), Expr::Var(y)) | (Expr::Meta(x), Expr::Meta(y)) => x == y,
        _ => false,
    }
}
