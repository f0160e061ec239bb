use std::collections::BTreeSet;
use std::sync::Arc;

use super::LfError;
use crate::name::Name;

/// Default number of β-reduction steps allowed before normalization gives up.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// LF kinds, type families and objects in one tree.
///
/// `Var` is a variable bound by an enclosing `Pi`/`Lam` or by a context,
/// `Const` a signature constant, `Meta` an object meta-variable.
#[derive(Clone, Debug)]
pub enum Expr {
    Type,
    Pi(Name, Arc<Expr>, Arc<Expr>),
    Lam(Name, Arc<Expr>, Arc<Expr>),
    App(Arc<Expr>, Arc<Expr>),
    Const(Name),
    Var(Name),
    Meta(Name),
}

/// Syntactic category of an LF expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Kind,
    Family,
    Object,
}

impl Expr {
    pub fn pi(x: impl Into<Name>, a: Expr, b: Expr) -> Expr {
        Expr::Pi(x.into(), Arc::new(a), Arc::new(b))
    }

    /// Non-dependent `a -> b`.
    pub fn arrow(a: Expr, b: Expr) -> Expr {
        Expr::pi(Name::new("_"), a, b)
    }

    pub fn lam(x: impl Into<Name>, a: Expr, m: Expr) -> Expr {
        Expr::Lam(x.into(), Arc::new(a), Arc::new(m))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(head: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(head, Expr::app)
    }

    pub fn cnst(name: &str) -> Expr {
        Expr::Const(Name::new(name))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Name::new(name))
    }

    pub fn meta(name: &str) -> Expr {
        Expr::Meta(Name::new(name))
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Expr::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn has_free_var(&self, x: &Name) -> bool {
        match self {
            Expr::Var(y) => x == y,
            Expr::Pi(y, a, b) | Expr::Lam(y, a, b) => a.has_free_var(x) || (y != x && b.has_free_var(x)),
            Expr::App(f, a) => f.has_free_var(x) || a.has_free_var(x),
            Expr::Type | Expr::Const(_) | Expr::Meta(_) => false,
        }
    }

    /// Meta-variables in order of first occurrence (left to right, binder
    /// types before bodies).
    pub fn metas(&self) -> Vec<Name> {
        fn go(e: &Expr, out: &mut Vec<Name>) {
            match e {
                Expr::Meta(x) => {
                    if !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Expr::Pi(_, a, b) | Expr::Lam(_, a, b) | Expr::App(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Expr::Type | Expr::Const(_) | Expr::Var(_) => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Expr::Meta(_) => true,
            Expr::Pi(_, a, b) | Expr::Lam(_, a, b) | Expr::App(a, b) => a.has_metas() || b.has_metas(),
            Expr::Type | Expr::Const(_) | Expr::Var(_) => false,
        }
    }

    /// Number of nodes, counting binders and applications.
    pub fn size(&self) -> usize {
        match self {
            Expr::Pi(_, a, b) | Expr::Lam(_, a, b) | Expr::App(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Expr) -> bool {
        alpha(self, other, &mut Vec::new(), &mut Vec::new())
    }

    /// Simultaneous capture-avoiding substitution for free variables.
    /// The result is not normalized.
    pub fn substitute(&self, bindings: &[(Name, Expr)]) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        let ranges = range_vars(bindings);
        subst(self, bindings, Target::Var, &ranges)
    }

    /// Simultaneous capture-avoiding substitution for meta-variables.
    pub fn substitute_meta(&self, bindings: &[(Name, Expr)]) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        let ranges = range_vars(bindings);
        subst(self, bindings, Target::Meta, &ranges)
    }

    pub fn is_beta_normal(&self) -> bool {
        match self {
            Expr::App(f, a) => !matches!(**f, Expr::Lam(..)) && f.is_beta_normal() && a.is_beta_normal(),
            Expr::Pi(_, a, b) | Expr::Lam(_, a, b) => a.is_beta_normal() && b.is_beta_normal(),
            _ => true,
        }
    }

    /// β-normal form, spending at most `fuel` reduction steps.
    pub fn beta_normalize(&self, fuel: u64) -> Result<Expr, LfError> {
        let mut fuel = fuel;
        normalize(self, &mut fuel)
    }

    /// Normalize with a caller-owned fuel counter shared across calls.
    pub fn beta_normalize_with(&self, fuel: &mut u64) -> Result<Expr, LfError> {
        normalize(self, fuel)
    }

    pub fn is_kind(&self) -> bool {
        match self {
            Expr::Type => true,
            Expr::Pi(_, _, k) => k.is_kind(),
            _ => false,
        }
    }

    /// Check the expression against the grammar of one syntactic category.
    pub fn check_category(&self, cat: Category) -> Result<(), LfError> {
        let bad = |what: &str| {
            Err(LfError::Category(format!(
                "{what} where {} expected: {self}",
                match cat {
                    Category::Kind => "a kind",
                    Category::Family => "a type",
                    Category::Object => "an object",
                }
            )))
        };
        match (cat, self) {
            (Category::Kind, Expr::Type) => Ok(()),
            (Category::Kind, Expr::Pi(_, a, k)) => {
                a.check_category(Category::Family)?;
                k.check_category(Category::Kind)
            }
            (Category::Kind, _) => bad("non-kind"),
            (Category::Family, Expr::Const(_)) => Ok(()),
            (Category::Family, Expr::Pi(_, a, b)) => {
                a.check_category(Category::Family)?;
                b.check_category(Category::Family)
            }
            (Category::Family, Expr::App(f, m)) => {
                f.check_category(Category::Family)?;
                m.check_category(Category::Object)
            }
            (Category::Family, Expr::Type) => bad("`type`"),
            (Category::Family, Expr::Lam(..)) => bad("abstraction"),
            (Category::Family, _) => bad("variable"),
            (Category::Object, Expr::Const(_) | Expr::Var(_) | Expr::Meta(_)) => Ok(()),
            (Category::Object, Expr::Lam(_, a, m)) => {
                a.check_category(Category::Family)?;
                m.check_category(Category::Object)
            }
            (Category::Object, Expr::App(f, a)) => {
                f.check_category(Category::Object)?;
                a.check_category(Category::Object)
            }
            (Category::Object, Expr::Type) => bad("`type`"),
            (Category::Object, Expr::Pi(..)) => bad("dependent product"),
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Expr {}

fn collect_free(e: &Expr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match e {
        Expr::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Expr::Pi(x, a, b) | Expr::Lam(x, a, b) => {
            collect_free(a, bound, out);
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Expr::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Expr::Type | Expr::Const(_) | Expr::Meta(_) => {}
    }
}

fn alpha(a: &Expr, b: &Expr, env_a: &mut Vec<Name>, env_b: &mut Vec<Name>) -> bool {
    match (a, b) {
        (Expr::Type, Expr::Type) => true,
        (Expr::Const(x), Expr::Const(y)) | (Expr::Meta(x), Expr::Meta(y)) => x == y,
        (Expr::Var(x), Expr::Var(y)) => {
            let ix = env_a.iter().rposition(|n| n == x);
            let iy = env_b.iter().rposition(|n| n == y);
            match (ix, iy) {
                (Some(i), Some(j)) => env_a.len() - i == env_b.len() - j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Expr::Pi(x, a1, b1), Expr::Pi(y, a2, b2)) | (Expr::Lam(x, a1, b1), Expr::Lam(y, a2, b2)) => {
            if !alpha(a1, a2, env_a, env_b) {
                return false;
            }
            env_a.push(x.clone());
            env_b.push(y.clone());
            let r = alpha(b1, b2, env_a, env_b);
            env_a.pop();
            env_b.pop();
            r
        }
        (Expr::App(f1, a1), Expr::App(f2, a2)) => alpha(f1, f2, env_a, env_b) && alpha(a1, a2, env_a, env_b),
        _ => false,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Target {
    Var,
    Meta,
}

fn range_vars(bindings: &[(Name, Expr)]) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for (_, r) in bindings {
        out.extend(r.free_vars());
    }
    out
}

fn subst(e: &Expr, map: &[(Name, Expr)], target: Target, ranges: &BTreeSet<Name>) -> Expr {
    match e {
        Expr::Var(x) if target == Target::Var => lookup(map, x).unwrap_or_else(|| e.clone()),
        Expr::Meta(x) if target == Target::Meta => lookup(map, x).unwrap_or_else(|| e.clone()),
        Expr::Type | Expr::Const(_) | Expr::Var(_) | Expr::Meta(_) => e.clone(),
        Expr::App(f, a) => Expr::App(
            Arc::new(subst(f, map, target, ranges)),
            Arc::new(subst(a, map, target, ranges)),
        ),
        Expr::Pi(x, a, b) | Expr::Lam(x, a, b) => {
            let a2 = subst(a, map, target, ranges);
            let inner: Vec<(Name, Expr)> = match target {
                Target::Var => map.iter().filter(|(y, _)| y != x).cloned().collect(),
                Target::Meta => map.to_vec(),
            };
            let (x2, b2) = if inner.is_empty() {
                (x.clone(), (**b).clone())
            } else if ranges.contains(x) {
                let body_fv = b.free_vars();
                let fresh = x.fresh(|n| ranges.contains(n) || body_fv.contains(n));
                let mut inner = inner;
                if target == Target::Var {
                    inner.push((x.clone(), Expr::Var(fresh.clone())));
                    let ranges2 = {
                        let mut r = ranges.clone();
                        r.insert(fresh.clone());
                        r
                    };
                    (fresh, subst(b, &inner, Target::Var, &ranges2))
                } else {
                    let renamed = subst(b, &[(x.clone(), Expr::Var(fresh.clone()))], Target::Var, &{
                        let mut r = BTreeSet::new();
                        r.insert(fresh.clone());
                        r
                    });
                    (fresh, subst(&renamed, &inner, Target::Meta, ranges))
                }
            } else {
                (x.clone(), subst(b, &inner, target, ranges))
            };
            match e {
                Expr::Pi(..) => Expr::Pi(x2, Arc::new(a2), Arc::new(b2)),
                _ => Expr::Lam(x2, Arc::new(a2), Arc::new(b2)),
            }
        }
    }
}

fn lookup(map: &[(Name, Expr)], x: &Name) -> Option<Expr> {
    map.iter().find(|(y, _)| y == x).map(|(_, r)| r.clone())
}

fn normalize(e: &Expr, fuel: &mut u64) -> Result<Expr, LfError> {
    // head reductions run in a loop so that long reduction sequences do not
    // grow the stack
    let mut cur = e.clone();
    loop {
        let (head, args) = cur.spine();
        match head {
            Expr::Lam(x, _, body) if !args.is_empty() => {
                if *fuel == 0 {
                    return Err(LfError::FuelExhausted);
                }
                *fuel -= 1;
                let reduced = body.substitute(&[(x.clone(), args[0].clone())]);
                let rest: Vec<Expr> = args[1..].iter().map(|a| (*a).clone()).collect();
                cur = Expr::apps(reduced, rest);
            }
            Expr::Pi(x, a, b) | Expr::Lam(x, a, b) if args.is_empty() => {
                let a2 = Arc::new(normalize(a, fuel)?);
                let b2 = Arc::new(normalize(b, fuel)?);
                return Ok(match head {
                    Expr::Pi(..) => Expr::Pi(x.clone(), a2, b2),
                    _ => Expr::Lam(x.clone(), a2, b2),
                });
            }
            _ => {
                let head = match head {
                    Expr::Pi(..) => normalize(head, fuel)?,
                    h => h.clone(),
                };
                let mut out = head;
                for a in args {
                    out = Expr::App(Arc::new(out), Arc::new(normalize(a, fuel)?));
                }
                return Ok(out);
            }
        }
    }
}
