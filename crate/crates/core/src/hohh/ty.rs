use std::fmt;
use std::sync::Arc;

use crate::name::Name;

/// Simple types over atomic base types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Atom(Name),
    Arrow(Arc<Ty>, Arc<Ty>),
}

impl Ty {
    pub fn atom(name: &str) -> Ty {
        Ty::Atom(Name::new(name))
    }

    /// The type of propositions.
    pub fn o() -> Ty {
        Ty::atom("o")
    }

    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Arc::new(a), Arc::new(b))
    }

    /// `a1 -> ... -> an -> result`
    pub fn arrows(args: impl IntoIterator<Item = Ty>, result: Ty) -> Ty {
        let args: Vec<Ty> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| Ty::arrow(a, acc))
    }

    /// Argument types and the atomic result type.
    pub fn split(&self) -> (Vec<&Ty>, &Ty) {
        let mut args = Vec::new();
        let mut t = self;
        while let Ty::Arrow(a, b) = t {
            args.push(&**a);
            t = b;
        }
        (args, t)
    }

    pub fn arity(&self) -> usize {
        self.split().0.len()
    }

    pub fn is_o(&self) -> bool {
        matches!(self, Ty::Atom(n) if n.base() == "o")
    }

    pub fn mentions_o(&self) -> bool {
        match self {
            Ty::Atom(_) => self.is_o(),
            Ty::Arrow(a, b) => a.mentions_o() || b.mentions_o(),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Atom(n) => write!(f, "{n}"),
            Ty::Arrow(a, b) => match **a {
                Ty::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}
