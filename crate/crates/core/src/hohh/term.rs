use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::Ty;
use crate::name::Name;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// A logic variable. Its level bounds the eigenconstants it may mention.
#[derive(Debug)]
pub struct LVar {
    pub id: u64,
    pub name: Name,
    pub ty: Ty,
    pub level: u32,
}

/// An eigenconstant introduced for a universal goal.
#[derive(Debug)]
pub struct Eigen {
    pub id: u64,
    pub name: Name,
    pub ty: Ty,
    pub level: u32,
}

impl LVar {
    pub fn new(name: impl Into<Name>, ty: Ty, level: u32) -> Arc<LVar> {
        Arc::new(LVar {
            id: next_id(),
            name: name.into(),
            ty,
            level,
        })
    }
}

impl Eigen {
    pub fn new(name: impl Into<Name>, ty: Ty, level: u32) -> Arc<Eigen> {
        Arc::new(Eigen {
            id: next_id(),
            name: name.into(),
            ty,
            level,
        })
    }
}

#[derive(Clone, Debug)]
pub enum Head {
    Const(Name, Ty),
    /// de Bruijn index; 0 is the innermost binder.
    Bound(u32),
    Eigen(Arc<Eigen>),
    Var(Arc<LVar>),
}

impl PartialEq for Head {
    fn eq(&self, other: &Head) -> bool {
        match (self, other) {
            (Head::Const(a, _), Head::Const(b, _)) => a == b,
            (Head::Bound(i), Head::Bound(j)) => i == j,
            (Head::Eigen(a), Head::Eigen(b)) => a.id == b.id,
            (Head::Var(a), Head::Var(b)) => a.id == b.id,
            _ => false,
        }
    }
}

impl Eq for Head {}

impl Head {
    pub fn is_flex(&self) -> bool {
        matches!(self, Head::Var(_))
    }
}

/// Simply typed λ-terms in spine form with de Bruijn indices. Terms built by
/// this module stay β-normal; binder names are only hints for printing.
#[derive(Clone, Debug)]
pub enum Term {
    Lam(Name, Ty, Arc<Term>),
    App(Head, Arc<[Term]>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Lam(_, a, b), Term::Lam(_, c, d)) => a == c && b == d,
            (Term::App(h1, s1), Term::App(h2, s2)) => h1 == h2 && s1 == s2,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Term {
    pub fn head(h: Head) -> Term {
        Term::App(h, Arc::from(Vec::new()))
    }

    pub fn app(h: Head, args: Vec<Term>) -> Term {
        Term::App(h, Arc::from(args))
    }

    pub fn cnst(name: &str, ty: Ty) -> Term {
        Term::head(Head::Const(Name::new(name), ty))
    }

    pub fn bound(i: u32) -> Term {
        Term::head(Head::Bound(i))
    }

    pub fn var(v: &Arc<LVar>) -> Term {
        Term::head(Head::Var(v.clone()))
    }

    pub fn eigen(e: &Arc<Eigen>) -> Term {
        Term::head(Head::Eigen(e.clone()))
    }

    pub fn lam(hint: impl Into<Name>, ty: Ty, body: Term) -> Term {
        Term::Lam(hint.into(), ty, Arc::new(body))
    }

    /// The η-long form of head `h` of type `ty`, valid in the same context.
    pub fn eta(h: Head, ty: &Ty) -> Term {
        let (args, _) = ty.split();
        let n = args.len() as u32;
        if n == 0 {
            return Term::head(h);
        }
        let h = match h {
            Head::Bound(i) => Head::Bound(i + n),
            other => other,
        };
        let spine = args
            .iter()
            .enumerate()
            .map(|(k, a)| Term::eta(Head::Bound(n - 1 - k as u32), a))
            .collect();
        let mut t = Term::app(h, spine);
        for a in args.into_iter().rev() {
            t = Term::lam("x", a.clone(), t);
        }
        t
    }

    /// Free de Bruijn indices shifted by `d` at or above `cutoff`.
    pub fn shift(&self, d: i64, cutoff: u32) -> Term {
        if d == 0 {
            return self.clone();
        }
        match self {
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), Arc::new(b.shift(d, cutoff + 1))),
            Term::App(h, sp) => {
                let h = match h {
                    Head::Bound(i) if *i >= cutoff => Head::Bound((*i as i64 + d) as u32),
                    other => other.clone(),
                };
                Term::App(h, sp.iter().map(|t| t.shift(d, cutoff)).collect())
            }
        }
    }

    /// Replace index `j` by `s` (given in the context outside the binder) and
    /// lower the indices above it, reducing any redexes this creates.
    pub fn subst(&self, j: u32, s: &Term) -> Term {
        match self {
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), Arc::new(b.subst(j + 1, s))),
            Term::App(h, sp) => {
                let sp: Vec<Term> = sp.iter().map(|t| t.subst(j, s)).collect();
                match h {
                    Head::Bound(i) if *i == j => s.shift(j as i64, 0).apply(&sp),
                    Head::Bound(i) if *i > j => Term::app(Head::Bound(i - 1), sp),
                    other => Term::app(other.clone(), sp),
                }
            }
        }
    }

    /// Hereditary application: β-reduces as far as the arguments reach.
    pub fn apply(&self, args: &[Term]) -> Term {
        if args.is_empty() {
            return self.clone();
        }
        match self {
            Term::Lam(_, _, b) => b.subst(0, &args[0]).apply(&args[1..]),
            Term::App(h, sp) => {
                let mut v: Vec<Term> = sp.to_vec();
                v.extend_from_slice(args);
                Term::app(h.clone(), v)
            }
        }
    }

    /// Substitute closed terms for the outermost free indices: with `k` the
    /// number of binders passed, index `k + i` becomes `env[env.len()-1-i]`.
    pub fn instantiate(&self, env: &[Term]) -> Term {
        self.inst_at(env, 0)
    }

    pub(crate) fn inst_at(&self, env: &[Term], k: u32) -> Term {
        if env.is_empty() {
            return self.clone();
        }
        match self {
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), Arc::new(b.inst_at(env, k + 1))),
            Term::App(h, sp) => {
                let sp: Vec<Term> = sp.iter().map(|t| t.inst_at(env, k)).collect();
                match h {
                    Head::Bound(i) if *i >= k => {
                        let idx = (*i - k) as usize;
                        if idx < env.len() {
                            env[env.len() - 1 - idx].apply(&sp)
                        } else {
                            Term::app(Head::Bound(i - env.len() as u32), sp)
                        }
                    }
                    other => Term::app(other.clone(), sp),
                }
            }
        }
    }

    pub fn has_loose_bound(&self) -> bool {
        self.loose_above(0)
    }

    fn loose_above(&self, k: u32) -> bool {
        match self {
            Term::Lam(_, _, b) => b.loose_above(k + 1),
            Term::App(h, sp) => matches!(h, Head::Bound(i) if *i >= k) || sp.iter().any(|t| t.loose_above(k)),
        }
    }

    /// Whether index `j` occurs free.
    pub fn has_bound(&self, j: u32) -> bool {
        match self {
            Term::Lam(_, _, b) => b.has_bound(j + 1),
            Term::App(h, sp) => matches!(h, Head::Bound(i) if *i == j) || sp.iter().any(|t| t.has_bound(j)),
        }
    }

    /// Logic variables in order of first occurrence.
    pub fn lvars(&self) -> Vec<Arc<LVar>> {
        let mut out: Vec<Arc<LVar>> = Vec::new();
        self.each_head(&mut |h| {
            if let Head::Var(v) = h {
                if !out.iter().any(|w| w.id == v.id) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn each_head(&self, f: &mut impl FnMut(&Head)) {
        match self {
            Term::Lam(_, _, b) => b.each_head(f),
            Term::App(h, sp) => {
                f(h);
                for t in sp.iter() {
                    t.each_head(f);
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Lam(_, _, b) => 1 + b.size(),
            Term::App(_, sp) => 1 + sp.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Simple type of the term, with `ctx` the types of the free indices
    /// (innermost last). `None` if the term is ill-typed.
    pub fn type_of(&self, ctx: &mut Vec<Ty>) -> Option<Ty> {
        match self {
            Term::Lam(_, a, b) => {
                ctx.push(a.clone());
                let r = b.type_of(ctx);
                ctx.pop();
                Some(Ty::arrow(a.clone(), r?))
            }
            Term::App(h, sp) => {
                let mut ty = match h {
                    Head::Const(_, t) => t.clone(),
                    Head::Eigen(e) => e.ty.clone(),
                    Head::Var(v) => v.ty.clone(),
                    Head::Bound(i) => ctx.len().checked_sub(1 + *i as usize).map(|k| ctx[k].clone())?,
                };
                for arg in sp.iter() {
                    let Ty::Arrow(a, b) = ty else { return None };
                    if arg.type_of(ctx)? != *a {
                        return None;
                    }
                    ty = (*b).clone();
                }
                Some(ty)
            }
        }
    }

    /// Whether the term is η-long at type `ty`: every head is applied to
    /// as many arguments as its type allows.
    pub fn is_eta_long(&self, ty: &Ty, ctx: &mut Vec<Ty>) -> bool {
        match (self, ty) {
            (Term::Lam(_, a, b), Ty::Arrow(_, r)) => {
                ctx.push(a.clone());
                let ok = b.is_eta_long(r, ctx);
                ctx.pop();
                ok
            }
            (Term::Lam(..), _) | (_, Ty::Arrow(..)) => false,
            (Term::App(h, sp), _) => {
                let mut hty = match h {
                    Head::Const(_, t) => t.clone(),
                    Head::Eigen(e) => e.ty.clone(),
                    Head::Var(v) => v.ty.clone(),
                    Head::Bound(i) => match ctx.len().checked_sub(1 + *i as usize) {
                        Some(k) => ctx[k].clone(),
                        None => return false,
                    },
                };
                for arg in sp.iter() {
                    let Ty::Arrow(a, b) = hty else { return false };
                    if !arg.is_eta_long(&a, ctx) {
                        return false;
                    }
                    hty = (*b).clone();
                }
                !matches!(hty, Ty::Arrow(..))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

impl Term {
    /// Print with `outer` naming the free indices, innermost last.
    pub(crate) fn render(&self, outer: &[String]) -> String {
        let mut taken = HashSet::new();
        self.each_head(&mut |h| match h {
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
        let mut out = String::new();
        let mut names = outer.to_vec();
        print(self, false, &mut names, &taken, &mut out);
        out
    }
}

fn print(t: &Term, arg: bool, names: &mut Vec<String>, taken: &HashSet<String>, out: &mut String) {
    match t {
        Term::Lam(x, _, b) => {
            if arg {
                out.push('(');
            }
            let base = x.base().to_string();
            let clash = |s: &str| taken.contains(s) || names.iter().any(|n| n == s);
            let name = if clash(&base) {
                (1..)
                    .map(|i| format!("{base}{i}"))
                    .find(|s| !clash(s))
                    .expect("unbounded")
            } else {
                base
            };
            out.push_str(&name);
            out.push_str("\\ ");
            names.push(name);
            print(b, false, names, taken, out);
            names.pop();
            if arg {
                out.push(')');
            }
        }
        Term::App(h, sp) => {
            let paren = arg && !sp.is_empty();
            if paren {
                out.push('(');
            }
            match h {
                Head::Const(n, _) => out.push_str(&n.to_string()),
                Head::Eigen(e) => out.push_str(&e.name.to_string()),
                Head::Var(v) => out.push_str(&v.name.to_string()),
                Head::Bound(i) => match names.len().checked_sub(1 + *i as usize) {
                    Some(k) => out.push_str(&names[k]),
                    None => out.push_str(&format!("#{i}")),
                },
            }
            for a in sp.iter() {
                out.push(' ');
                print(a, true, names, taken, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Ty {
        Ty::atom("nat")
    }
    fn list() -> Ty {
        Ty::atom("list")
    }
    fn cons() -> Head {
        Head::Const(Name::new("cons"), Ty::arrows([nat(), list()], list()))
    }
    fn nil() -> Term {
        Term::cnst("nil", list())
    }
    fn z() -> Term {
        Term::cnst("z", nat())
    }

    #[test]
    fn beta_reduces_on_application() {
        // (λy. cons y nil) z
        let f = Term::lam("y", nat(), Term::app(cons(), vec![Term::bound(0), nil()]));
        let r = f.apply(&[z()]);
        assert_eq!(r, Term::app(cons(), vec![z(), nil()]));
        assert_eq!(r.to_string(), "cons z nil");
    }

    #[test]
    fn higher_order_argument_reduces_hereditarily() {
        // (λf. f z) (λx. s x)
        let s = Head::Const(Name::new("s"), Ty::arrow(nat(), nat()));
        let f = Term::lam("f", Ty::arrow(nat(), nat()), Term::app(Head::Bound(0), vec![z()]));
        let g = Term::lam("x", nat(), Term::app(s.clone(), vec![Term::bound(0)]));
        assert_eq!(f.apply(&[g]), Term::app(s, vec![z()]));
    }

    #[test]
    fn normal_terms_are_fixed_points() {
        let t = Term::app(cons(), vec![z(), nil()]);
        assert_eq!(t.apply(&[]), t);
        assert_eq!(t.instantiate(&[]), t);
    }

    #[test]
    fn eta_expansion_of_constants() {
        let t = Term::eta(cons(), &Ty::arrows([nat(), list()], list()));
        assert_eq!(t.to_string(), "x\\ x1\\ cons x x1");
        assert!(t.is_eta_long(&Ty::arrows([nat(), list()], list()), &mut vec![]));
        assert!(!Term::head(cons()).is_eta_long(&Ty::arrows([nat(), list()], list()), &mut vec![]));
    }

    #[test]
    fn instantiate_replaces_outer_binders() {
        // under one λ, index 1 and 2 refer to env
        let body = Term::app(cons(), vec![Term::bound(2), Term::bound(1)]);
        let t = Term::lam("w", nat(), body);
        let r = t.instantiate(&[z(), nil()]);
        assert_eq!(r.to_string(), "w\\ cons z nil");
    }

    #[test]
    fn typing() {
        let t = Term::lam("y", nat(), Term::app(cons(), vec![Term::bound(0), nil()]));
        assert_eq!(t.type_of(&mut vec![]), Some(Ty::arrow(nat(), list())));
        let bad = Term::app(cons(), vec![nil(), nil()]);
        assert_eq!(bad.type_of(&mut vec![]), None);
    }

    #[test]
    fn alpha_equivalence_ignores_hints() {
        let a = Term::lam("a", nat(), Term::bound(0));
        let b = Term::lam("b", nat(), Term::bound(0));
        assert_eq!(a, b);
    }
}
