//! Compilation of LF signatures and queries to hohh programs and goals.
//!
//! The naive mode flattens every LF type to `lf-obj` and checks typing with
//! a single `hastype` predicate. The optimized mode gives each type family
//! `a` its own atomic type `a-type` and predicate `a`, and omits
//! inhabitation premises for variables that occur strictly.

mod lprolog;
mod strict;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use strict::{strict_in_term, strict_in_type};

use crate::elab::Query;
use crate::hohh::{Clause, Goal, Head, LVar, Term, Ty};
use crate::lf::{Expr, Level, Signature};
use crate::name::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    Naive,
    #[default]
    Optimized,
}

#[derive(Debug, Clone, Error)]
pub enum TranslateError {
    #[error("unknown constant `{0}`")]
    UnknownConstant(Name),
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("meta-variable `{0}` has no logic variable")]
    UnknownMeta(Name),
    #[error("`{0}` is not in β-normal form")]
    NotNormal(Expr),
    #[error("`{0}` is not a type family applied to objects")]
    NotAFamily(Expr),
}

/// A translated signature: atomic types, typed constants and clauses.
#[derive(Clone, Debug)]
pub struct Program {
    pub mode: Mode,
    /// Atomic types other than `o`.
    pub kinds: Vec<Name>,
    /// Term constants followed by predicates.
    pub constants: Vec<(Name, Ty)>,
    /// One clause per object constant, in declaration order, with the name
    /// of the constant it came from.
    pub clauses: Vec<(Name, Clause)>,
}

impl Program {
    pub fn predicates(&self) -> impl Iterator<Item = &(Name, Ty)> {
        self.constants.iter().filter(|(_, ty)| ty.split().1.is_o())
    }

    /// The clause generated for a constant.
    pub fn clause_for(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|(n, _)| n.base() == name).map(|(_, c)| c)
    }

    /// Module and signature text in λProlog concrete syntax.
    pub fn to_lprolog(&self, module: &str) -> (String, String) {
        lprolog::emit(self, module)
    }
}

/// Predicate types first, then one clause per line, in the notation
/// `pi x\ (G => D)`.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, ty) in self.predicates() {
            writeln!(f, "{name} : {ty}.")?;
        }
        if !self.clauses.is_empty() && self.predicates().next().is_some() {
            writeln!(f)?;
        }
        for (_, c) in &self.clauses {
            writeln!(f, "{c}.")?;
        }
        Ok(())
    }
}

/// A translated query.
#[derive(Clone, Debug)]
pub struct QueryGoal {
    pub goal: Goal,
    /// Logic variables standing for the query's meta-variables, in order.
    pub metas: Vec<(Name, Arc<LVar>)>,
    /// The logic variable standing for the proof term.
    pub proof: Arc<LVar>,
}

const LF_OBJ: &str = "lf-obj";
const LF_TYPE: &str = "lf-type";
const HASTYPE: &str = "hastype";

/// Translation of one signature in one mode.
pub struct Translator<'a> {
    sig: &'a Signature,
    mode: Mode,
    types: HashMap<Name, Ty>,
}

impl<'a> Translator<'a> {
    pub fn new(sig: &'a Signature, mode: Mode) -> Result<Self, TranslateError> {
        let mut t = Translator {
            sig,
            mode,
            types: HashMap::new(),
        };
        for d in sig.decls() {
            let ty = t.flatten(&d.classifier)?;
            t.types.insert(d.name.clone(), ty);
        }
        Ok(t)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The simple type of a type or kind.
    pub fn flatten(&self, p: &Expr) -> Result<Ty, TranslateError> {
        match p {
            Expr::Type => Ok(Ty::atom(LF_TYPE)),
            Expr::Pi(_, a, b) => Ok(Ty::arrow(self.flatten(a)?, self.flatten(b)?)),
            _ => match self.mode {
                Mode::Naive => Ok(Ty::atom(LF_OBJ)),
                Mode::Optimized => Ok(family_type(&family_of(p)?)),
            },
        }
    }

    /// The hohh type of a signature constant.
    pub fn constant_type(&self, name: &Name) -> Result<&Ty, TranslateError> {
        self.types
            .get(name)
            .ok_or_else(|| TranslateError::UnknownConstant(name.clone()))
    }

    /// The predicate checking membership in type family `a` (optimized mode).
    fn predicate(&self, a: &Name) -> Result<Head, TranslateError> {
        let decl = self
            .sig
            .get(a)
            .ok_or_else(|| TranslateError::UnknownConstant(a.clone()))?;
        let mut args = Vec::new();
        let mut k = &decl.classifier;
        while let Expr::Pi(_, a, b) = k {
            args.push(self.flatten(a)?);
            k = b;
        }
        Ok(Head::Const(
            a.clone(),
            Ty::arrows(args, Ty::arrow(family_type(a), Ty::o())),
        ))
    }

    fn hastype() -> Head {
        Head::Const(
            Name::new(HASTYPE),
            Ty::arrows([Ty::atom(LF_OBJ), Ty::atom(LF_TYPE)], Ty::o()),
        )
    }

    /// Encode a closed LF object or type family as a hohh term.
    pub fn encode_term(&self, m: &Expr) -> Result<Term, TranslateError> {
        self.encoder(&HashMap::new()).term(m)
    }

    /// The goal stating that the closed term `m` inhabits the closed LF
    /// type `a`.
    pub fn type_goal(&self, a: &Expr, m: Term) -> Result<Goal, TranslateError> {
        let metas = HashMap::new();
        let mut enc = self.encoder(&metas);
        match self.mode {
            Mode::Naive => enc.goal_naive(a, m),
            Mode::Optimized => enc.goal_neg(a, m),
        }
    }

    fn encoder<'e>(&'e self, metas: &'e HashMap<Name, Arc<LVar>>) -> Encoder<'e, 'a> {
        Encoder {
            tr: self,
            metas,
            scope: Vec::new(),
        }
    }

    pub fn translate_signature(&self) -> Result<Program, TranslateError> {
        let mut kinds = Vec::new();
        let mut constants = Vec::new();
        let mut predicates = Vec::new();
        let mut clauses = Vec::new();
        match self.mode {
            Mode::Naive => {
                kinds.push(Name::new(LF_OBJ));
                kinds.push(Name::new(LF_TYPE));
                for d in self.sig.decls() {
                    constants.push((d.name.clone(), self.types[&d.name].clone()));
                }
                let Head::Const(n, ty) = Self::hastype() else {
                    unreachable!()
                };
                predicates.push((n, ty));
            }
            Mode::Optimized => {
                for d in self.sig.decls() {
                    match d.level {
                        Level::TypeConst => {
                            kinds.push(Name::new(&format!("{}-type", d.name)));
                            let Head::Const(n, ty) = self.predicate(&d.name)? else {
                                unreachable!()
                            };
                            predicates.push((n, ty));
                        }
                        Level::ObjConst => constants.push((d.name.clone(), self.types[&d.name].clone())),
                    }
                }
            }
        }
        let no_metas = HashMap::new();
        for d in self.sig.decls().iter().filter(|d| d.level == Level::ObjConst) {
            let mut enc = self.encoder(&no_metas);
            let u = Term::eta(
                Head::Const(d.name.clone(), self.types[&d.name].clone()),
                &self.types[&d.name],
            );
            let clause = match self.mode {
                Mode::Naive => enc.clause_naive(&d.classifier, u)?,
                Mode::Optimized => enc.clause_pos(&d.classifier, u, &mut Vec::new())?,
            };
            clauses.push((d.name.clone(), clause));
        }
        constants.extend(predicates);
        Ok(Program {
            mode: self.mode,
            kinds,
            constants,
            clauses,
        })
    }

    /// The goal asking for an inhabitant of the query type. Each
    /// meta-variable becomes a logic variable, as does the proof term.
    pub fn translate_query(&self, q: &Query) -> Result<QueryGoal, TranslateError> {
        let mut metas = Vec::new();
        let mut by_name = HashMap::new();
        for (name, ty) in &q.metas {
            let v = LVar::new(name.clone(), self.flatten(ty)?, 0);
            by_name.insert(name.clone(), v.clone());
            metas.push((name.clone(), v));
        }
        let proof_name = Name::new("M").fresh(|n| q.metas.contains_key(n));
        let proof = LVar::new(proof_name, self.flatten(&q.ty)?, 0);
        let mut enc = self.encoder(&by_name);
        let m = Term::eta(Head::Var(proof.clone()), &proof.ty);
        let goal = match self.mode {
            Mode::Naive => enc.goal_naive(&q.ty, m)?,
            Mode::Optimized => enc.query_goal(&q.ty, m, &mut Vec::new())?,
        };
        Ok(QueryGoal { goal, metas, proof })
    }
}

pub fn translate_signature(sig: &Signature, mode: Mode) -> Result<Program, TranslateError> {
    Translator::new(sig, mode)?.translate_signature()
}

pub fn translate_query(sig: &Signature, q: &Query, mode: Mode) -> Result<QueryGoal, TranslateError> {
    Translator::new(sig, mode)?.translate_query(q)
}

fn family_type(a: &Name) -> Ty {
    Ty::atom(&format!("{a}-type"))
}

/// The type constant at the head of a base type.
fn family_of(a: &Expr) -> Result<Name, TranslateError> {
    match a.spine().0 {
        Expr::Const(c) => Ok(c.clone()),
        _ => Err(TranslateError::NotAFamily(a.clone())),
    }
}

/// Name for a quantified variable in generated formulas.
fn hint(x: &Name, a: &Expr) -> Name {
    if x.base() == "_" {
        let letter = family_of(a.spine().0)
            .ok()
            .and_then(|f| f.base().chars().next())
            .map_or("x".to_string(), |c| c.to_lowercase().to_string());
        return Name::new(&letter);
    }
    Name::new(&x.base().to_lowercase())
}

/// Encodes LF expressions under a scope of bound variables, which share
/// de Bruijn indices with the quantifiers of the formulas being built.
struct Encoder<'e, 'a> {
    tr: &'e Translator<'a>,
    metas: &'e HashMap<Name, Arc<LVar>>,
    scope: Vec<Name>,
}

impl Encoder<'_, '_> {
    fn term(&mut self, m: &Expr) -> Result<Term, TranslateError> {
        if let Expr::Lam(x, a, body) = m {
            let ty = self.tr.flatten(a)?;
            self.scope.push(x.clone());
            let b = self.term(body);
            self.scope.pop();
            return Ok(Term::lam(x.clone(), ty, b?));
        }
        let (head, args) = m.spine();
        let head = match head {
            Expr::Const(c) => Head::Const(c.clone(), self.tr.constant_type(c)?.clone()),
            Expr::Var(x) => match self.scope.iter().rposition(|y| y == x) {
                Some(p) => Head::Bound((self.scope.len() - 1 - p) as u32),
                None => return Err(TranslateError::UnboundVariable(x.clone())),
            },
            Expr::Meta(x) => Head::Var(
                self.metas
                    .get(x)
                    .ok_or_else(|| TranslateError::UnknownMeta(x.clone()))?
                    .clone(),
            ),
            _ => return Err(TranslateError::NotNormal(m.clone())),
        };
        let args = args.into_iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Term::app(head, args))
    }

    /// The atom stating that `m` inhabits base type `a`.
    fn atom(&mut self, a: &Expr, m: Term) -> Result<Term, TranslateError> {
        match self.tr.mode {
            Mode::Naive => Ok(Term::app(Translator::hastype(), vec![m, self.term(a)?])),
            Mode::Optimized => {
                let (_, args) = a.spine();
                let pred = self.tr.predicate(&family_of(a)?)?;
                let mut spine = args.into_iter().map(|n| self.term(n)).collect::<Result<Vec<_>, _>>()?;
                spine.push(m);
                Ok(Term::app(pred, spine))
            }
        }
    }

    /// Enter the scope of `x : a`, returning its simple type and the term
    /// `m x` in the extended scope.
    fn enter(&mut self, x: &Name, a: &Expr, m: &Term) -> Result<(Ty, Term), TranslateError> {
        let ty = self.tr.flatten(a)?;
        self.scope.push(x.clone());
        let mx = m.shift(1, 0).apply(&[Term::eta(Head::Bound(0), &ty)]);
        Ok((ty, mx))
    }

    fn clause_naive(&mut self, a: &Expr, m: Term) -> Result<Clause, TranslateError> {
        let Expr::Pi(x, a1, b) = a else {
            return Ok(Clause::Atom(self.atom(a, m)?));
        };
        let (ty, mx) = self.enter(x, a1, &m)?;
        let premise = self.goal_naive(a1, Term::eta(Head::Bound(0), &ty));
        let body = premise.and_then(|p| Ok((p, self.clause_naive(b, mx)?)));
        self.scope.pop();
        let (p, d) = body?;
        Ok(Clause::forall(hint(x, a1), ty, Clause::implies(p, d)))
    }

    fn goal_naive(&mut self, a: &Expr, m: Term) -> Result<Goal, TranslateError> {
        let Expr::Pi(x, a1, b) = a else {
            return Ok(Goal::Atom(self.atom(a, m)?));
        };
        let (ty, mx) = self.enter(x, a1, &m)?;
        let hyp = self.clause_naive(a1, Term::eta(Head::Bound(0), &ty));
        let body = hyp.and_then(|h| Ok((h, self.goal_naive(b, mx)?)));
        self.scope.pop();
        let (h, g) = body?;
        Ok(Goal::forall(hint(x, a1), ty, Goal::implies(h, g)))
    }

    /// Clause for `m : a`, omitting premises for variables that occur
    /// strictly. `gamma` holds the Π-bound variables passed so far.
    fn clause_pos(&mut self, a: &Expr, m: Term, gamma: &mut Vec<(Name, Expr)>) -> Result<Clause, TranslateError> {
        let Expr::Pi(x, a1, b) = a else {
            return Ok(Clause::Atom(self.atom(a, m)?));
        };
        let strict = strict_in_type(gamma, x, b);
        let (ty, mx) = self.enter(x, a1, &m)?;
        gamma.push((x.clone(), (**a1).clone()));
        let premise = if strict {
            Ok(None)
        } else {
            self.goal_neg(a1, Term::eta(Head::Bound(0), &ty)).map(Some)
        };
        let body = premise.and_then(|p| Ok((p, self.clause_pos(b, mx, gamma)?)));
        gamma.pop();
        self.scope.pop();
        let d = match body? {
            (Some(p), d) => Clause::implies(p, d),
            (None, d) => d,
        };
        Ok(Clause::forall(hint(x, a1), ty, d))
    }

    /// Goal asking for `m : a`; hypotheses use the strict encoding.
    fn goal_neg(&mut self, a: &Expr, m: Term) -> Result<Goal, TranslateError> {
        let Expr::Pi(x, a1, b) = a else {
            return Ok(Goal::Atom(self.atom(a, m)?));
        };
        let (ty, mx) = self.enter(x, a1, &m)?;
        let hyp = self.clause_pos(a1, Term::eta(Head::Bound(0), &ty), &mut Vec::new());
        let body = hyp.and_then(|h| Ok((h, self.goal_neg(b, mx)?)));
        self.scope.pop();
        let (h, g) = body?;
        Ok(Goal::forall(hint(x, a1), ty, Goal::implies(h, g)))
    }

    /// Like `goal_neg`, but the hypothesis for a universally quantified
    /// query variable is left out when the variable occurs strictly.
    fn query_goal(&mut self, a: &Expr, m: Term, gamma: &mut Vec<(Name, Expr)>) -> Result<Goal, TranslateError> {
        let Expr::Pi(x, a1, b) = a else {
            return Ok(Goal::Atom(self.atom(a, m)?));
        };
        let strict = strict_in_type(gamma, x, b);
        let (ty, mx) = self.enter(x, a1, &m)?;
        gamma.push((x.clone(), (**a1).clone()));
        let hyp = if strict {
            Ok(None)
        } else {
            self.clause_pos(a1, Term::eta(Head::Bound(0), &ty), &mut Vec::new())
                .map(Some)
        };
        let body = hyp.and_then(|h| Ok((h, self.query_goal(b, mx, gamma)?)));
        gamma.pop();
        self.scope.pop();
        let g = match body? {
            (Some(h), g) => Goal::implies(h, g),
            (None, g) => g,
        };
        Ok(Goal::forall(hint(x, a1), ty, g))
    }
}
