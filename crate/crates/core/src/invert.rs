//! Inverse encoding: reading hohh answer terms back as LF objects.
//!
//! Checking against a product type consumes a λ (η-expanding the term
//! first if needed) and takes the binder type from the product. At a base
//! type the term must be an application whose head synthesizes a type;
//! each argument is checked against the domain and substituted into the
//! codomain, and the result must match the expected type.

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::elab::{is_hole, Query};
use crate::engine::Solution;
use crate::hohh::{Head, LVar, Term};
use crate::lf::{Expr, Level, LfError, MetaContext, Signature, DEFAULT_FUEL};
use crate::name::Name;
use crate::translate::QueryGoal;

#[derive(Debug, Clone, Error)]
pub enum InvertError {
    #[error("`{term}` is not the encoding of an LF object: {reason}")]
    NotInvertible { reason: String, term: String },
    #[error("answer for `{var}`: {source}")]
    InVariable {
        var: Name,
        #[source]
        source: Box<InvertError>,
    },
    #[error(transparent)]
    Lf(#[from] LfError),
}

fn not_invertible(reason: impl Into<String>, t: &Term, names: &[String]) -> InvertError {
    InvertError::NotInvertible {
        reason: reason.into(),
        term: t.render(names),
    }
}

/// A disagreement pair left over by unification, in LF syntax when both
/// sides synthesize and in hohh syntax otherwise.
#[derive(Clone, Debug)]
pub enum Constraint {
    Lf(Expr, Expr),
    Unreduced(String, String),
}

/// An inverted answer to a query.
#[derive(Clone, Debug)]
pub struct Answer {
    /// Instantiations of the user's meta-variables, in query order. Unsolved
    /// meta-variables are absent.
    pub bindings: Vec<(Name, Expr)>,
    /// The inhabitant of the instantiated query type.
    pub proof: Option<Expr>,
    /// Meta-variables introduced for logic variables left unbound.
    pub fresh: MetaContext,
    pub constraints: Vec<Constraint>,
}

/// Inversion state: the signature, meta-variable typings and the LF types
/// of the λ-bound variables in scope.
pub struct Inverter<'a> {
    sig: &'a Signature,
    metas: MetaContext,
    meta_names: HashMap<u64, Name>,
    ctx: Vec<(Name, Expr)>,
    fresh: MetaContext,
    fuel: u64,
}

impl<'a> Inverter<'a> {
    pub fn new(sig: &'a Signature, metas: MetaContext) -> Self {
        Inverter {
            sig,
            metas,
            meta_names: HashMap::new(),
            ctx: Vec::new(),
            fresh: MetaContext::new(),
            fuel: DEFAULT_FUEL,
        }
    }

    /// Read the logic variable `v` as the meta-variable `name`.
    pub fn name_variable(&mut self, v: &LVar, name: Name) {
        self.meta_names.insert(v.id, name);
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    /// Meta-variables created so far for unbound logic variables.
    pub fn fresh_metas(&self) -> &MetaContext {
        &self.fresh
    }

    fn names(&self) -> Vec<String> {
        self.ctx.iter().map(|(n, _)| n.to_string()).collect()
    }

    fn normalize(&mut self, e: &Expr) -> Result<Expr, InvertError> {
        Ok(e.beta_normalize_with(&mut self.fuel)?)
    }

    fn bound(&self, i: u32) -> Option<&(Name, Expr)> {
        let n = self.ctx.len();
        let i = i as usize;
        if i < n {
            Some(&self.ctx[n - 1 - i])
        } else {
            None
        }
    }

    /// The LF object encoded by `t`, checked against `a`.
    pub fn check(&mut self, t: &Term, a: &Expr) -> Result<Expr, InvertError> {
        let a = self.normalize(a)?;
        if let Expr::Pi(x, dom, cod) = &a {
            let (hint, body) = match t {
                Term::Lam(h, _, b) => (h.clone(), (**b).clone()),
                _ => (x.clone(), t.shift(1, 0).apply(&[Term::bound(0)])),
            };
            let y = hint.fresh(|n| self.ctx.iter().any(|(m, _)| m == n) || self.sig.get(n).is_some());
            let cod = cod.substitute(&[(x.clone(), Expr::Var(y.clone()))]);
            self.ctx.push((y.clone(), (**dom).clone()));
            let m = self.check(&body, &cod);
            self.ctx.pop();
            return Ok(Expr::lam(y, (**dom).clone(), m?));
        }
        if let Term::App(Head::Var(v), args) = t {
            if !self.meta_names.contains_key(&v.id) {
                return self.fresh_meta(v, args, &a, t);
            }
        }
        let (m, b) = self.synth(t)?;
        if b.alpha_eq(&a) {
            Ok(m)
        } else {
            Err(not_invertible(
                format!("has type `{b}`, expected `{a}`"),
                t,
                &self.names(),
            ))
        }
    }

    /// The LF object encoded by an application, with its type.
    pub fn synth(&mut self, t: &Term) -> Result<(Expr, Expr), InvertError> {
        let Term::App(head, args) = t else {
            return Err(not_invertible(
                "an abstraction has no synthesized type",
                t,
                &self.names(),
            ));
        };
        let (mut m, mut ty) = match head {
            Head::Const(c, _) => match self.sig.get(c) {
                Some(d) if d.level == Level::ObjConst => (Expr::Const(c.clone()), d.classifier.clone()),
                Some(_) => return Err(not_invertible(format!("`{c}` is a type family"), t, &self.names())),
                None => return Err(not_invertible(format!("unknown constant `{c}`"), t, &self.names())),
            },
            Head::Bound(i) => match self.bound(*i) {
                Some((x, a)) => (Expr::Var(x.clone()), a.clone()),
                None => return Err(not_invertible("loose bound variable", t, &self.names())),
            },
            Head::Var(v) => {
                let name = self.meta_names.get(&v.id).cloned();
                let typed = name.and_then(|n| {
                    self.metas
                        .get(&n)
                        .or(self.fresh.get(&n))
                        .map(|a| (n.clone(), a.clone()))
                });
                match typed {
                    Some((n, a)) => (Expr::Meta(n), a),
                    None => {
                        return Err(not_invertible(
                            format!("untyped logic variable `{}`", v.name),
                            t,
                            &self.names(),
                        ))
                    }
                }
            }
            Head::Eigen(e) => {
                return Err(not_invertible(
                    format!("eigenconstant `{}` outside its scope", e.name),
                    t,
                    &self.names(),
                ))
            }
        };
        for arg in args.iter() {
            let Expr::Pi(x, dom, cod) = self.normalize(&ty)? else {
                return Err(not_invertible(
                    format!("too many arguments for type `{ty}`"),
                    t,
                    &self.names(),
                ));
            };
            let n = self.check(arg, &dom)?;
            ty = self.normalize(&cod.substitute(&[(x, n.clone())]))?;
            m = Expr::app(m, n);
        }
        let ty = self.normalize(&ty)?;
        if matches!(ty, Expr::Pi(..)) {
            return Err(not_invertible(
                format!("too few arguments for type `{ty}`"),
                t,
                &self.names(),
            ));
        }
        Ok((m, ty))
    }

    /// An unbound logic variable applied to distinct bound variables
    /// becomes a new meta-variable abstracted over those variables.
    fn fresh_meta(&mut self, v: &Arc<LVar>, args: &[Term], a: &Expr, t: &Term) -> Result<Expr, InvertError> {
        let mut params: Vec<(Name, Expr)> = Vec::new();
        for arg in args {
            let Some(i) = eta_bound(arg) else {
                return Err(not_invertible(
                    "unbound logic variable applied to a non-variable",
                    t,
                    &self.names(),
                ));
            };
            let entry = self
                .bound(i)
                .cloned()
                .ok_or_else(|| not_invertible("loose bound variable", t, &self.names()))?;
            if params.iter().any(|(n, _)| *n == entry.0) {
                return Err(not_invertible(
                    "unbound logic variable applied to a repeated variable",
                    t,
                    &self.names(),
                ));
            }
            params.push(entry);
        }
        let scope: Vec<&Name> = params.iter().map(|(n, _)| n).collect();
        let escapes = a.free_vars().into_iter().any(|x| !scope.contains(&&x))
            || params
                .iter()
                .any(|(_, b)| b.free_vars().iter().any(|x| !scope.contains(&x)));
        if escapes {
            return Err(not_invertible(
                "unbound logic variable depends on variables it is not applied to",
                t,
                &self.names(),
            ));
        }
        let base = capitalized(v.name.base());
        let name = Name::new(&base).fresh(|n| self.metas.contains_key(n) || self.fresh.contains_key(n));
        let ty = closed_pi(&params, a);
        self.fresh.insert(name.clone(), ty);
        self.meta_names.insert(v.id, name.clone());
        Ok(Expr::apps(
            Expr::Meta(name),
            params.into_iter().map(|(x, _)| Expr::Var(x)),
        ))
    }
}

fn closed_pi(params: &[(Name, Expr)], a: &Expr) -> Expr {
    params
        .iter()
        .rev()
        .fold(a.clone(), |acc, (x, b)| Expr::pi(x.clone(), b.clone(), acc))
}

fn capitalized(s: &str) -> String {
    let s = s.trim_start_matches(|c: char| !c.is_alphanumeric());
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => "X".to_string(),
    }
}

/// The bound variable an η-expanded bound variable contracts to.
fn eta_bound(t: &Term) -> Option<u32> {
    let mut n = 0u32;
    let mut body = t;
    while let Term::Lam(_, _, b) = body {
        n += 1;
        body = b;
    }
    let Term::App(Head::Bound(i), args) = body else {
        return None;
    };
    if *i < n || args.len() != n as usize {
        return None;
    }
    let contracts = args
        .iter()
        .enumerate()
        .all(|(k, a)| eta_bound(a) == Some(n - 1 - k as u32));
    contracts.then_some(i - n)
}

/// Invert an answer to `query`. Meta-variables are inverted at their types
/// with earlier answers substituted, so a meta-variable is processed only
/// after those its type mentions. The proof is inverted last, at the query
/// type instantiated with all answers.
pub fn invert_solution(
    sig: &Signature,
    query: &Query,
    goal: &QueryGoal,
    solution: &Solution,
    fuel: u64,
) -> Result<Answer, InvertError> {
    let mut inv = Inverter::new(sig, query.metas.clone()).with_fuel(fuel);
    for (n, v) in &goal.metas {
        inv.name_variable(v, n.clone());
    }
    let mut solved: Vec<(Name, Expr)> = Vec::new();
    let mut pending: Vec<&(Name, Arc<LVar>)> = goal.metas.iter().collect();
    while !pending.is_empty() {
        let waits_for = |m: &Name| {
            let bound = goal
                .metas
                .iter()
                .any(|(g, v)| g == m && solution.substitution.get(v).is_some());
            bound && !solved.iter().any(|(s, _)| s == m)
        };
        let ready = pending
            .iter()
            .position(|(n, _)| !query.metas[n].metas().iter().any(waits_for));
        // a cycle can only come from ill-formed meta typings; take them in order
        let (n, v) = pending.remove(ready.unwrap_or(0));
        let Some(t) = solution.substitution.get(v) else {
            continue;
        };
        let ty = query.metas[n].substitute_meta(&solved);
        let m = inv.check(t, &ty).map_err(|e| InvertError::InVariable {
            var: n.clone(),
            source: Box::new(e),
        })?;
        solved.push((n.clone(), m));
    }
    let proof = match solution.substitution.get(&goal.proof) {
        Some(t) => {
            let ty = query.ty.substitute_meta(&solved);
            let m = inv.check(t, &ty).map_err(|e| InvertError::InVariable {
                var: goal.proof.name.clone(),
                source: Box::new(e),
            })?;
            Some(m)
        }
        None => None,
    };
    let constraints = solution
        .disagreements
        .iter()
        .map(|p| {
            let (l, r) = (solution.substitution.apply(&p.lhs), solution.substitution.apply(&p.rhs));
            match (inv.synth(&l), inv.synth(&r)) {
                (Ok((a, _)), Ok((b, _))) => Constraint::Lf(a, b),
                _ => Constraint::Unreduced(l.to_string(), r.to_string()),
            }
        })
        .collect();
    let order: IndexMap<&Name, ()> = query.named_metas().map(|(n, _)| (n, ())).collect();
    let mut bindings: Vec<(Name, Expr)> = solved.into_iter().filter(|(n, _)| !is_hole(n)).collect();
    bindings.sort_by_key(|(n, _)| order.get_index_of(n));
    Ok(Answer {
        bindings,
        proof,
        fresh: inv.fresh.clone(),
        constraints,
    })
}
