//! Higher-order pattern unification over a trail-based binding store.
//!
//! A logic variable may mention eigenconstants whose level is at most its
//! own. Equations outside the pattern fragment are postponed and retried
//! whenever new bindings are made.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::{Eigen, Head, LVar, Term, Ty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Fail {
    #[error("heads clash")]
    Clash,
    #[error("occurs check failed")]
    Occurs,
    #[error("a variable would escape its scope")]
    Scope,
}

/// A postponed equation between closed terms.
#[derive(Clone, Debug)]
pub struct Pair {
    pub lhs: Term,
    pub rhs: Term,
}

pub type DisagreementSet = Vec<Pair>;

/// An idempotent map from logic variables to terms.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    entries: Vec<(Arc<LVar>, Term)>,
}

impl Substitution {
    pub fn get(&self, v: &LVar) -> Option<&Term> {
        self.entries.iter().find(|(w, _)| w.id == v.id).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<LVar>, &Term)> {
        self.entries.iter().map(|(v, t)| (v, t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Replace bound variables and reduce.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Lam(x, ty, b) => Term::lam(x.clone(), ty.clone(), self.apply(b)),
            Term::App(h, sp) => {
                let sp: Vec<Term> = sp.iter().map(|a| self.apply(a)).collect();
                match h {
                    Head::Var(v) => match self.get(v) {
                        Some(r) => r.apply(&sp),
                        None => Term::app(h.clone(), sp),
                    },
                    _ => Term::app(h.clone(), sp),
                }
            }
        }
    }
}

/// Unify two closed terms of the same type from scratch.
pub fn unify(a: &Term, b: &Term) -> Result<(Substitution, DisagreementSet), Fail> {
    let mut store = Store::new();
    store.unify(a, b)?;
    let mut vars = a.lvars();
    for v in b.lvars() {
        if !vars.iter().any(|w| w.id == v.id) {
            vars.push(v);
        }
    }
    Ok((store.substitution(&vars), store.disagreements()))
}

#[derive(Clone, Debug)]
enum Atom {
    Bound(u32),
    Eigen(Arc<Eigen>),
}

impl PartialEq for Atom {
    fn eq(&self, other: &Atom) -> bool {
        match (self, other) {
            (Atom::Bound(i), Atom::Bound(j)) => i == j,
            (Atom::Eigen(a), Atom::Eigen(b)) => a.id == b.id,
            _ => false,
        }
    }
}

impl Atom {
    fn ty(&self, ctx: &[Ty]) -> Ty {
        match self {
            Atom::Bound(i) => ctx[ctx.len() - 1 - *i as usize].clone(),
            Atom::Eigen(e) => e.ty.clone(),
        }
    }

    /// Whether a variable of level `level` may mention this atom without
    /// receiving it as an argument.
    fn implicit_at(&self, level: u32) -> bool {
        matches!(self, Atom::Eigen(e) if e.level <= level)
    }
}

enum Stuck {
    Fail(Fail),
    Postpone,
}

impl From<Fail> for Stuck {
    fn from(f: Fail) -> Stuck {
        Stuck::Fail(f)
    }
}

enum Undo {
    Bind(u64),
    Postponed(Vec<Pair>),
}

/// Bindings for logic variables, with a trail for undoing them.
#[derive(Default)]
pub struct Store {
    bindings: HashMap<u64, Term>,
    postponed: Vec<Pair>,
    trail: Vec<Undo>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("non-empty trail") {
                Undo::Bind(id) => {
                    self.bindings.remove(&id);
                }
                Undo::Postponed(old) => self.postponed = old,
            }
        }
    }

    pub fn binding(&self, v: &LVar) -> Option<&Term> {
        self.bindings.get(&v.id)
    }

    pub fn postponed(&self) -> &[Pair] {
        &self.postponed
    }

    /// Postponed equations with the current bindings applied.
    pub fn disagreements(&self) -> DisagreementSet {
        self.postponed
            .iter()
            .map(|p| Pair {
                lhs: self.resolve(&p.lhs),
                rhs: self.resolve(&p.rhs),
            })
            .collect()
    }

    /// Fully resolved bindings of the given variables, skipping unbound ones.
    pub fn substitution(&self, vars: &[Arc<LVar>]) -> Substitution {
        let entries = vars
            .iter()
            .filter(|v| self.bindings.contains_key(&v.id))
            .map(|v| (v.clone(), self.resolve(&Term::var(v))))
            .collect();
        Substitution { entries }
    }

    fn bind(&mut self, v: &LVar, t: Term) {
        debug_assert!(!t.has_loose_bound(), "bindings are closed");
        self.bindings.insert(v.id, t);
        self.trail.push(Undo::Bind(v.id));
    }

    fn set_postponed(&mut self, pairs: Vec<Pair>) {
        let old = std::mem::replace(&mut self.postponed, pairs);
        self.trail.push(Undo::Postponed(old));
    }

    /// Instantiate the head while it is a bound logic variable.
    pub fn whnf(&self, t: &Term) -> Term {
        let mut t = t.clone();
        loop {
            let next = match &t {
                Term::App(Head::Var(v), sp) => match self.bindings.get(&v.id) {
                    Some(b) => b.apply(sp),
                    None => return t,
                },
                _ => return t,
            };
            t = next;
        }
    }

    /// Instantiate all bound logic variables.
    pub fn resolve(&self, t: &Term) -> Term {
        match self.whnf(t) {
            Term::Lam(x, ty, b) => Term::lam(x, ty, self.resolve(&b)),
            Term::App(h, sp) => Term::app(h, sp.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    /// Unify two closed terms, then retry postponed equations until no more
    /// progress is made.
    pub fn unify(&mut self, a: &Term, b: &Term) -> Result<(), Fail> {
        self.unify_in(&mut Vec::new(), a, b)?;
        self.wake()
    }

    fn wake(&mut self) -> Result<(), Fail> {
        loop {
            if self.postponed.is_empty() {
                return Ok(());
            }
            let before = self.bindings.len();
            let pairs = self.postponed.clone();
            self.set_postponed(Vec::new());
            for p in pairs {
                self.unify_in(&mut Vec::new(), &p.lhs, &p.rhs)?;
            }
            if self.bindings.len() == before {
                return Ok(());
            }
        }
    }

    fn postpone(&mut self, ctx: &[Ty], a: Term, b: Term) {
        let (mut lhs, mut rhs) = (a, b);
        for ty in ctx.iter().rev() {
            lhs = Term::lam("x", ty.clone(), lhs);
            rhs = Term::lam("x", ty.clone(), rhs);
        }
        let mut pairs = self.postponed.clone();
        pairs.push(Pair { lhs, rhs });
        self.set_postponed(pairs);
    }

    fn unify_in(&mut self, ctx: &mut Vec<Ty>, a: &Term, b: &Term) -> Result<(), Fail> {
        let a = self.whnf(a);
        let b = self.whnf(b);
        match (&a, &b) {
            (Term::Lam(_, ty, x), Term::Lam(_, _, y)) => {
                ctx.push(ty.clone());
                let r = self.unify_in(ctx, x, y);
                ctx.pop();
                r
            }
            (Term::Lam(_, ty, x), other) | (other, Term::Lam(_, ty, x)) => {
                let expanded = other.shift(1, 0).apply(&[Term::eta(Head::Bound(0), ty)]);
                ctx.push(ty.clone());
                let r = self.unify_in(ctx, x, &expanded);
                ctx.pop();
                r
            }
            (Term::App(h1, s1), Term::App(h2, s2)) => match (h1, h2) {
                (Head::Var(x), Head::Var(y)) => self.flex_flex(ctx, (x, s1), (y, s2)),
                (Head::Var(x), _) => self.flex_rigid(ctx, x, s1, &a, &b),
                (_, Head::Var(y)) => self.flex_rigid(ctx, y, s2, &b, &a),
                _ => {
                    if h1 != h2 || s1.len() != s2.len() {
                        return Err(Fail::Clash);
                    }
                    for (x, y) in s1.iter().zip(s2.iter()) {
                        self.unify_in(ctx, x, y)?;
                    }
                    Ok(())
                }
            },
        }
    }

    /// The arguments as distinct atoms the variable may abstract over.
    fn pattern_args(&self, v: &LVar, args: &[Term]) -> Option<Vec<Atom>> {
        let mut out: Vec<Atom> = Vec::new();
        for a in args {
            let atom = as_atom(&self.resolve(a))?;
            if atom.implicit_at(v.level) || out.contains(&atom) {
                return None;
            }
            out.push(atom);
        }
        Some(out)
    }

    fn flex_rigid(&mut self, ctx: &[Ty], x: &Arc<LVar>, args: &[Term], flex: &Term, rigid: &Term) -> Result<(), Fail> {
        let Some(atoms) = self.pattern_args(x, args) else {
            self.postpone(ctx, flex.clone(), rigid.clone());
            return Ok(());
        };
        let inv = Inverter { var: x, atoms: &atoms };
        match inv.invert(self, rigid, 0, false) {
            Ok(body) => {
                self.bind(x, abstract_over(&x.ty, body));
                Ok(())
            }
            Err(Stuck::Fail(f)) => Err(f),
            Err(Stuck::Postpone) => {
                self.postpone(ctx, flex.clone(), rigid.clone());
                Ok(())
            }
        }
    }

    fn flex_flex(
        &mut self,
        ctx: &[Ty],
        (x, s): (&Arc<LVar>, &[Term]),
        (y, t): (&Arc<LVar>, &[Term]),
    ) -> Result<(), Fail> {
        let (Some(sa), Some(ta)) = (self.pattern_args(x, s), self.pattern_args(y, t)) else {
            self.postpone(
                ctx,
                Term::app(Head::Var(x.clone()), s.to_vec()),
                Term::app(Head::Var(y.clone()), t.to_vec()),
            );
            return Ok(());
        };
        if x.id == y.id {
            if sa == ta {
                return Ok(());
            }
            let keep: Vec<Atom> = sa
                .iter()
                .zip(&ta)
                .filter(|(p, q)| p == q)
                .map(|(p, _)| p.clone())
                .collect();
            let z = fresh_over(x, &keep, ctx, x.level);
            self.bind(x, apply_over(x, &sa, &z, &keep));
            return Ok(());
        }
        // prefer binding the newer variable to the older one
        let (p, pa, q, qa) = if x.id > y.id {
            (x, &sa, y, &ta)
        } else {
            (y, &ta, x, &sa)
        };
        for (p, pa, q, qa) in [(p, pa, q, qa), (q, qa, p, pa)] {
            if q.level <= p.level && qa.iter().all(|atom| expressible(atom, p, pa)) {
                let target = Term::var(q);
                self.bind(p, apply_over(p, pa, &target, qa));
                return Ok(());
            }
        }
        let level = x.level.min(y.level);
        let mut common: Vec<Atom> = Vec::new();
        for atom in sa.iter().chain(ta.iter()) {
            if !atom.implicit_at(level)
                && expressible(atom, x, &sa)
                && expressible(atom, y, &ta)
                && !common.contains(atom)
            {
                common.push(atom.clone());
            }
        }
        let z = fresh_over(x, &common, ctx, level);
        self.bind(x, apply_over(x, &sa, &z, &common));
        self.bind(y, apply_over(y, &ta, &z, &common));
        Ok(())
    }
}

/// A fresh variable like `v` but taking only the atoms `keep` as arguments.
fn fresh_over(v: &LVar, keep: &[Atom], ctx: &[Ty], level: u32) -> Term {
    let ty = Ty::arrows(keep.iter().map(|c| c.ty(ctx)), v.ty.split().1.clone());
    Term::var(&LVar::new(v.name.clone(), ty, level))
}

/// Whether variable `v`, applied to `args`, can refer to `atom`.
fn expressible(atom: &Atom, v: &LVar, args: &[Atom]) -> bool {
    args.contains(atom) || atom.implicit_at(v.level)
}

/// Wrap `body` in λs for the argument types of `ty`.
fn abstract_over(ty: &Ty, body: Term) -> Term {
    let (args, _) = ty.split();
    let mut t = body;
    for a in args.into_iter().rev() {
        t = Term::lam("y", a.clone(), t);
    }
    t
}

/// `λ(args of v). target atoms`, where each atom is one of `v`'s arguments or
/// an eigenconstant visible at `v`'s level.
fn apply_over(v: &LVar, args: &[Atom], target: &Term, atoms: &[Atom]) -> Term {
    let n = args.len() as u32;
    let (arg_tys, _) = v.ty.split();
    let spine: Vec<Term> = atoms
        .iter()
        .map(|atom| match (args.iter().position(|a| a == atom), atom) {
            (Some(p), _) => Term::eta(Head::Bound(n - 1 - p as u32), arg_tys[p]),
            (None, Atom::Eigen(e)) => Term::eta(Head::Eigen(e.clone()), &e.ty),
            (None, Atom::Bound(_)) => unreachable!("bound atoms are always among the arguments"),
        })
        .collect();
    abstract_over(&v.ty, target.apply(&spine))
}

/// η-contract a term to a bound variable or eigenconstant.
fn as_atom(t: &Term) -> Option<Atom> {
    let mut n = 0u32;
    let mut body = t;
    while let Term::Lam(_, _, b) = body {
        n += 1;
        body = b;
    }
    let Term::App(h, sp) = body else {
        unreachable!("λs were stripped")
    };
    if sp.len() != n as usize {
        return None;
    }
    for (k, a) in sp.iter().enumerate() {
        if as_atom(a) != Some(Atom::Bound(n - 1 - k as u32)) {
            return None;
        }
    }
    match h {
        Head::Bound(i) if *i >= n => Some(Atom::Bound(i - n)),
        Head::Eigen(e) => Some(Atom::Eigen(e.clone())),
        _ => None,
    }
}

/// Computes the body of a solution `X := λy1..yn. body` for `X atoms = t`.
struct Inverter<'a> {
    var: &'a Arc<LVar>,
    atoms: &'a [Atom],
}

impl Inverter<'_> {
    fn solution_index(&self, atom: &Atom, depth: u32) -> Option<u32> {
        let n = self.atoms.len() as u32;
        self.atoms
            .iter()
            .position(|a| a == atom)
            .map(|p| depth + n - 1 - p as u32)
    }

    /// `t` lives under `depth` local binders on top of the equation's
    /// context; the result lives under the same local binders on top of the
    /// solution's λs.
    fn invert(&self, st: &mut Store, t: &Term, depth: u32, under_flex: bool) -> Result<Term, Stuck> {
        match st.whnf(t) {
            Term::Lam(x, ty, b) => Ok(Term::lam(x, ty, self.invert(st, &b, depth + 1, under_flex)?)),
            Term::App(h, sp) => {
                let head = match &h {
                    Head::Const(..) => h.clone(),
                    Head::Bound(i) if *i < depth => h.clone(),
                    Head::Bound(i) => {
                        Head::Bound(self.solution_index(&Atom::Bound(i - depth), depth).ok_or(Fail::Scope)?)
                    }
                    Head::Eigen(e) if e.level <= self.var.level => h.clone(),
                    Head::Eigen(e) => {
                        Head::Bound(self.solution_index(&Atom::Eigen(e.clone()), depth).ok_or(Fail::Scope)?)
                    }
                    Head::Var(y) if y.id == self.var.id => {
                        return Err(if under_flex {
                            Stuck::Postpone
                        } else {
                            Stuck::Fail(Fail::Occurs)
                        });
                    }
                    Head::Var(y) => return self.invert_flex(st, y, &sp, depth, under_flex),
                };
                let mut out = Vec::with_capacity(sp.len());
                for a in sp.iter() {
                    out.push(self.invert(st, a, depth, under_flex)?);
                }
                Ok(Term::app(head, out))
            }
        }
    }

    /// A flexible subterm `Y args`. Arguments the solution cannot express are
    /// pruned, and `Y` is lowered when it could mention eigenconstants the
    /// solved variable cannot see.
    fn invert_flex(
        &self,
        st: &mut Store,
        y: &Arc<LVar>,
        sp: &[Term],
        depth: u32,
        under_flex: bool,
    ) -> Result<Term, Stuck> {
        let mut kept = Vec::new();
        let mut keep_pos = Vec::new();
        for (k, a) in sp.iter().enumerate() {
            match self.invert(st, a, depth, true) {
                Ok(t) => {
                    kept.push(t);
                    keep_pos.push(k);
                }
                // only an atom can be dropped safely: a compound argument
                // might lose the offending part after β-reduction
                Err(Stuck::Fail(_)) if as_atom(&st.resolve(a)).is_some() => {}
                Err(_) => return Err(Stuck::Postpone),
            }
        }
        let pruned = kept.len() < sp.len();
        let lower = y.level > self.var.level;
        if !pruned && !lower {
            return Ok(Term::app(Head::Var(y.clone()), kept));
        }
        if under_flex {
            return Err(Stuck::Postpone);
        }
        // eigenconstants y may mention that the solution reaches only
        // through its own arguments
        let extra: Vec<&Arc<Eigen>> = self
            .atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Eigen(e) if lower && e.level <= y.level && e.level > self.var.level => Some(e),
                _ => None,
            })
            .collect();
        let (arg_tys, res) = y.ty.split();
        let new_ty = Ty::arrows(
            keep_pos
                .iter()
                .map(|&k| arg_tys[k].clone())
                .chain(extra.iter().map(|e| e.ty.clone())),
            res.clone(),
        );
        let y2 = LVar::new(y.name.clone(), new_ty, y.level.min(self.var.level));
        let m = sp.len() as u32;
        let mut spine: Vec<Term> = keep_pos
            .iter()
            .map(|&k| Term::eta(Head::Bound(m - 1 - k as u32), arg_tys[k]))
            .collect();
        spine.extend(extra.iter().map(|e| Term::eta(Head::Eigen((*e).clone()), &e.ty)));
        st.bind(y, abstract_over(&y.ty, Term::app(Head::Var(y2.clone()), spine)));
        let mut out = kept;
        for e in extra {
            let i = self
                .solution_index(&Atom::Eigen(e.clone()), depth)
                .expect("taken from the atoms");
            out.push(Term::eta(Head::Bound(i), &e.ty));
        }
        Ok(Term::app(Head::Var(y2), out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;

    fn nat() -> Ty {
        Ty::atom("nat")
    }
    fn list() -> Ty {
        Ty::atom("list")
    }
    fn z() -> Term {
        Term::cnst("z", nat())
    }
    fn nil() -> Term {
        Term::cnst("nil", list())
    }
    fn s(t: Term) -> Term {
        Term::app(Head::Const(Name::new("s"), Ty::arrow(nat(), nat())), vec![t])
    }
    fn cons(a: Term, b: Term) -> Term {
        Term::app(
            Head::Const(Name::new("cons"), Ty::arrows([nat(), list()], list())),
            vec![a, b],
        )
    }
    fn flex(v: &Arc<LVar>, args: Vec<Term>) -> Term {
        Term::app(Head::Var(v.clone()), args)
    }

    fn solved(store: &Store, a: &Term, b: &Term) -> bool {
        store.postponed().is_empty() && store.resolve(a) == store.resolve(b)
    }

    #[test]
    fn first_order_binding() {
        let l = LVar::new("L", list(), 0);
        let (sub, dis) = unify(&Term::var(&l), &cons(z(), nil())).unwrap();
        assert!(dis.is_empty());
        assert_eq!(sub.get(&l).unwrap().to_string(), "cons z nil");
    }

    #[test]
    fn pattern_over_an_eigenconstant() {
        let l = LVar::new("L", Ty::arrow(nat(), list()), 0);
        let x = Eigen::new("x", nat(), 1);
        let (sub, dis) = unify(&flex(&l, vec![Term::eigen(&x)]), &cons(Term::eigen(&x), nil())).unwrap();
        assert!(dis.is_empty());
        assert_eq!(sub.get(&l).unwrap().to_string(), "y\\ cons y nil");
    }

    #[test]
    fn rigid_clash() {
        assert_eq!(unify(&s(z()), &z()).unwrap_err(), Fail::Clash);
    }

    #[test]
    fn occurs_check() {
        let x = LVar::new("X", nat(), 0);
        assert_eq!(unify(&Term::var(&x), &s(Term::var(&x))).unwrap_err(), Fail::Occurs);
    }

    #[test]
    fn eigenconstant_cannot_escape() {
        let x = LVar::new("X", nat(), 0);
        let e = Eigen::new("e", nat(), 1);
        assert_eq!(unify(&Term::var(&x), &s(Term::eigen(&e))).unwrap_err(), Fail::Scope);
        // an older eigenconstant is fine
        let y = LVar::new("Y", nat(), 2);
        assert!(unify(&Term::var(&y), &s(Term::eigen(&e))).is_ok());
    }

    #[test]
    fn lambda_against_rigid_term_eta_expands() {
        let f = Head::Const(Name::new("f"), Ty::arrow(nat(), nat()));
        let lam = Term::lam("x", nat(), Term::app(f.clone(), vec![Term::bound(0)]));
        assert!(unify(&lam, &Term::head(f)).is_ok());
    }

    #[test]
    fn non_pattern_is_postponed_then_woken() {
        let x = LVar::new("X", Ty::arrow(nat(), nat()), 0);
        let n = LVar::new("N", nat(), 0);
        let mut st = Store::new();
        let a = flex(&x, vec![Term::var(&n)]);
        st.unify(&a, &z()).unwrap();
        assert_eq!(st.postponed().len(), 1);
        st.unify(&Term::var(&n), &z()).unwrap();
        // X z = z is still outside the fragment since z is not an atom
        assert_eq!(st.postponed().len(), 1);
        let y = LVar::new("Y", nat(), 0);
        let mut st = Store::new();
        let b = flex(&x, vec![Term::var(&y)]);
        st.unify(&b, &s(Term::var(&y))).unwrap();
        assert_eq!(st.postponed().len(), 1);
        // once X is known the pair is a plain first-order check
        st.unify(&Term::var(&x), &Term::lam("w", nat(), s(Term::bound(0))))
            .unwrap();
        assert!(st.postponed().is_empty());
        assert!(solved(&st, &b, &s(Term::var(&y))));
    }

    #[test]
    fn flex_flex_same_variable_keeps_agreeing_arguments() {
        let x = LVar::new("X", Ty::arrows([nat(), nat()], nat()), 0);
        let a = Eigen::new("a", nat(), 1);
        let b = Eigen::new("b", nat(), 1);
        let c = Eigen::new("c", nat(), 1);
        let lhs = flex(&x, vec![Term::eigen(&a), Term::eigen(&b)]);
        let rhs = flex(&x, vec![Term::eigen(&a), Term::eigen(&c)]);
        let mut st = Store::new();
        st.unify(&lhs, &rhs).unwrap();
        assert!(solved(&st, &lhs, &rhs));
        // depends on the first argument only
        let Term::Lam(_, _, inner) = st.resolve(&Term::var(&x)) else {
            panic!()
        };
        let Term::Lam(_, _, body) = &*inner else { panic!() };
        assert!(!body.has_bound(0) && body.has_bound(1));
    }

    #[test]
    fn flex_flex_different_variables() {
        let x = LVar::new("X", Ty::arrow(nat(), nat()), 0);
        let y = LVar::new("Y", Ty::arrow(nat(), nat()), 0);
        let a = Eigen::new("a", nat(), 1);
        let b = Eigen::new("b", nat(), 1);
        let lhs = flex(&x, vec![Term::eigen(&a)]);
        let rhs = flex(&y, vec![Term::eigen(&b)]);
        let mut st = Store::new();
        st.unify(&lhs, &rhs).unwrap();
        assert!(solved(&st, &lhs, &rhs));
        // neither may depend on its argument
        let mut ctx = vec![];
        let sx = st.resolve(&Term::var(&x));
        assert!(matches!(sx, Term::Lam(_, _, ref body) if !body.has_bound(0)));
        assert_eq!(sx.type_of(&mut ctx), Some(Ty::arrow(nat(), nat())));
    }

    #[test]
    fn pruning_inner_variable() {
        // X a = c (Y a b): Y must drop b
        let c = Head::Const(Name::new("c"), Ty::arrow(nat(), nat()));
        let x = LVar::new("X", Ty::arrow(nat(), nat()), 0);
        let y = LVar::new("Y", Ty::arrows([nat(), nat()], nat()), 0);
        let a = Eigen::new("a", nat(), 1);
        let b = Eigen::new("b", nat(), 1);
        let lhs = flex(&x, vec![Term::eigen(&a)]);
        let rhs = Term::app(c, vec![flex(&y, vec![Term::eigen(&a), Term::eigen(&b)])]);
        let mut st = Store::new();
        st.unify(&lhs, &rhs).unwrap();
        assert!(solved(&st, &lhs, &rhs));
        assert!(!st.resolve(&rhs).to_string().contains('b'));
    }

    #[test]
    fn lowering_inner_variable() {
        // X a = c Y where Y is newer than a: Y may only mention a through X
        let c = Head::Const(Name::new("c"), Ty::arrow(nat(), nat()));
        let x = LVar::new("X", Ty::arrow(nat(), nat()), 0);
        let a = Eigen::new("a", nat(), 1);
        let y = LVar::new("Y", nat(), 1);
        let lhs = flex(&x, vec![Term::eigen(&a)]);
        let rhs = Term::app(c, vec![Term::var(&y)]);
        let mut st = Store::new();
        st.unify(&lhs, &rhs).unwrap();
        assert!(solved(&st, &lhs, &rhs));
        // Y can still become a
        st.unify(&Term::var(&y), &Term::eigen(&a)).unwrap();
        assert_eq!(st.resolve(&Term::var(&x)).to_string(), "y\\ c y");
    }

    #[test]
    fn undo_restores_bindings() {
        let l = LVar::new("L", list(), 0);
        let mut st = Store::new();
        let m = st.mark();
        st.unify(&Term::var(&l), &nil()).unwrap();
        assert!(st.binding(&l).is_some());
        st.undo_to(m);
        assert!(st.binding(&l).is_none());
        st.unify(&Term::var(&l), &cons(z(), nil())).unwrap();
        assert_eq!(st.resolve(&Term::var(&l)).to_string(), "cons z nil");
    }

    #[test]
    fn substitution_is_idempotent() {
        let l = LVar::new("L", list(), 0);
        let k = LVar::new("K", list(), 0);
        let (sub, _) = unify(&cons(z(), Term::var(&k)), &Term::var(&l)).unwrap();
        let t = sub.apply(&Term::var(&l));
        assert_eq!(sub.apply(&t), t);
    }
}
