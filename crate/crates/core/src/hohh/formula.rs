use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::{Head, Term, Ty};
use crate::name::Name;

/// Goal formulas. Quantifiers bind de Bruijn index 0 in their body, sharing
/// the index space with λ-binders of the terms inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    True,
    Atom(Term),
    Implies(Arc<Clause>, Arc<Goal>),
    Forall(Name, Ty, Arc<Goal>),
}

/// Program clauses: `∀x1.(G1 ⊃ ∀x2.(G2 ⊃ ... A))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Atom(Term),
    Implies(Arc<Goal>, Arc<Clause>),
    Forall(Name, Ty, Arc<Clause>),
}

impl Goal {
    pub fn implies(d: Clause, g: Goal) -> Goal {
        Goal::Implies(Arc::new(d), Arc::new(g))
    }

    pub fn forall(x: impl Into<Name>, ty: Ty, g: Goal) -> Goal {
        Goal::Forall(x.into(), ty, Arc::new(g))
    }

    /// Substitute closed terms for the outermost free indices.
    pub fn instantiate(&self, env: &[Term]) -> Goal {
        self.inst_at(env, 0)
    }

    fn inst_at(&self, env: &[Term], k: u32) -> Goal {
        if env.is_empty() {
            return self.clone();
        }
        match self {
            Goal::True => Goal::True,
            Goal::Atom(t) => Goal::Atom(t.inst_at(env, k)),
            Goal::Implies(d, g) => Goal::implies(d.inst_at(env, k), g.inst_at(env, k)),
            Goal::Forall(x, ty, g) => Goal::forall(x.clone(), ty.clone(), g.inst_at(env, k + 1)),
        }
    }

    /// Number of premises and quantifiers: a rough size measure.
    pub fn size(&self) -> usize {
        match self {
            Goal::True => 1,
            Goal::Atom(t) => t.size(),
            Goal::Implies(d, g) => 1 + d.size() + g.size(),
            Goal::Forall(_, _, g) => 1 + g.size(),
        }
    }
}

impl Clause {
    pub fn implies(g: Goal, d: Clause) -> Clause {
        Clause::Implies(Arc::new(g), Arc::new(d))
    }

    pub fn forall(x: impl Into<Name>, ty: Ty, d: Clause) -> Clause {
        Clause::Forall(x.into(), ty, Arc::new(d))
    }

    pub fn instantiate(&self, env: &[Term]) -> Clause {
        self.inst_at(env, 0)
    }

    fn inst_at(&self, env: &[Term], k: u32) -> Clause {
        if env.is_empty() {
            return self.clone();
        }
        match self {
            Clause::Atom(t) => Clause::Atom(t.inst_at(env, k)),
            Clause::Implies(g, d) => Clause::implies(g.inst_at(env, k), d.inst_at(env, k)),
            Clause::Forall(x, ty, d) => Clause::forall(x.clone(), ty.clone(), d.inst_at(env, k + 1)),
        }
    }

    /// The atomic head after stripping quantifiers and premises.
    pub fn head(&self) -> &Term {
        match self {
            Clause::Atom(t) => t,
            Clause::Implies(_, d) | Clause::Forall(_, _, d) => d.head(),
        }
    }

    /// Number of premises (goals to the left of an implication).
    pub fn premises(&self) -> usize {
        match self {
            Clause::Atom(_) => 0,
            Clause::Implies(_, d) => 1 + d.premises(),
            Clause::Forall(_, _, d) => d.premises(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Clause::Atom(t) => t.size(),
            Clause::Implies(g, d) => 1 + g.size() + d.size(),
            Clause::Forall(_, _, d) => 1 + d.size(),
        }
    }
}

/// Names for quantified variables when printing, innermost last, kept
/// apart from each other and from the names of constants.
struct Names(Vec<String>, HashSet<String>);

impl Names {
    fn new(terms: Vec<&Term>) -> Names {
        let mut taken = HashSet::new();
        for t in terms {
            t.each_head(&mut |h| match h {
                Head::Const(n, _) => {
                    taken.insert(n.to_string());
                }
                Head::Eigen(e) => {
                    taken.insert(e.name.to_string());
                }
                Head::Var(v) => {
                    taken.insert(v.name.to_string());
                }
                Head::Bound(_) => {}
            });
        }
        Names(Vec::new(), taken)
    }

    fn push(&mut self, x: &Name) -> String {
        let base = x.to_string();
        let clash = |s: &str| self.0.iter().any(|n| n == s) || self.1.contains(s);
        let name = if clash(&base) {
            (1..)
                .map(|i| format!("{base}{i}"))
                .find(|s| !clash(s))
                .expect("unbounded")
        } else {
            base
        };
        self.0.push(name.clone());
        name
    }
}

fn fmt_goal(g: &Goal, names: &mut Names, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match g {
        Goal::True => write!(f, "true"),
        Goal::Atom(t) => write!(f, "{}", t.render(&names.0)),
        Goal::Implies(d, g) => {
            write!(f, "(")?;
            fmt_clause(d, names, f)?;
            write!(f, " => ")?;
            fmt_goal(g, names, f)?;
            write!(f, ")")
        }
        Goal::Forall(x, _, g) => {
            let n = names.push(x);
            write!(f, "pi {n}\\ ")?;
            let r = fmt_goal(g, names, f);
            names.0.pop();
            r
        }
    }
}

fn fmt_clause(d: &Clause, names: &mut Names, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match d {
        Clause::Atom(t) => write!(f, "{}", t.render(&names.0)),
        Clause::Implies(g, d) => {
            write!(f, "(")?;
            fmt_goal(g, names, f)?;
            write!(f, " => ")?;
            fmt_clause(d, names, f)?;
            write!(f, ")")
        }
        Clause::Forall(x, _, d) => {
            let n = names.push(x);
            write!(f, "pi {n}\\ ")?;
            let r = fmt_clause(d, names, f);
            names.0.pop();
            r
        }
    }
}

fn goal_terms<'a>(g: &'a Goal, out: &mut Vec<&'a Term>) {
    match g {
        Goal::True => {}
        Goal::Atom(t) => out.push(t),
        Goal::Implies(d, g) => {
            clause_terms(d, out);
            goal_terms(g, out);
        }
        Goal::Forall(_, _, g) => goal_terms(g, out),
    }
}

fn clause_terms<'a>(d: &'a Clause, out: &mut Vec<&'a Term>) {
    match d {
        Clause::Atom(t) => out.push(t),
        Clause::Implies(g, d) => {
            goal_terms(g, out);
            clause_terms(d, out);
        }
        Clause::Forall(_, _, d) => clause_terms(d, out),
    }
}

impl Goal {
    /// Print with `outer` naming the free indices, innermost last.
    pub(crate) fn render(&self, outer: &[String]) -> String {
        struct R<'a>(&'a Goal, &'a [String]);
        impl fmt::Display for R<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let mut terms = Vec::new();
                goal_terms(self.0, &mut terms);
                let mut names = Names::new(terms);
                names.0 = self.1.to_vec();
                fmt_goal(self.0, &mut names, f)
            }
        }
        R(self, outer).to_string()
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        goal_terms(self, &mut terms);
        fmt_goal(self, &mut Names::new(terms), f)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        clause_terms(self, &mut terms);
        fmt_clause(self, &mut Names::new(terms), f)
    }
}
