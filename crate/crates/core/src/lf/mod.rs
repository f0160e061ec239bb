//! The LF kernel: expressions, signatures, contexts, substitution,
//! β-normalization and canonical forms.

mod canon;
mod expr;
mod print;

use std::collections::HashMap;

use indexmap::IndexMap;
use thiserror::Error;

pub use canon::{canonicalize, canonicalize_in};
pub use expr::{Category, Expr, DEFAULT_FUEL};

use crate::name::Name;

#[derive(Debug, Clone, Error)]
pub enum LfError {
    #[error("normalization ran out of fuel (expression is not normalizing)")]
    FuelExhausted,
    #[error("unbound constant `{0}`")]
    UnboundConstant(Name),
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("meta-variable `{0}` has no type")]
    UnboundMeta(Name),
    #[error("type mismatch at `{location}`: expected `{expected}`, found `{found}`")]
    TypeMismatch {
        expected: Box<Expr>,
        found: Box<Expr>,
        location: Box<Expr>,
    },
    #[error("`{term}` is applied but has type `{ty}`, which is not a product")]
    NotAFunction { term: Box<Expr>, ty: Box<Expr> },
    #[error("{0}")]
    Category(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(Name),
    #[error("duplicate variable `{0}` in context")]
    DuplicateVariable(Name),
    #[error("classifier of `{0}` mentions free variables or meta-variables")]
    NotClosed(Name),
    #[error("declaration `{name}`: {source}")]
    InDecl {
        name: Name,
        #[source]
        source: Box<LfError>,
    },
}

impl LfError {
    pub fn mismatch(expected: Expr, found: Expr, location: Expr) -> Self {
        LfError::TypeMismatch {
            expected: Box::new(expected),
            found: Box::new(found),
            location: Box::new(location),
        }
    }

    pub fn not_a_function(term: Expr, ty: Expr) -> Self {
        LfError::NotAFunction {
            term: Box::new(term),
            ty: Box::new(ty),
        }
    }
}

/// Whether a signature entry declares a type family or an object constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    TypeConst,
    ObjConst,
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub name: Name,
    pub classifier: Expr,
    pub level: Level,
    /// Number of leading `Pi` binders that were inserted for implicit
    /// (uppercase) variables during elaboration.
    pub implicit: usize,
}

impl Decl {
    pub fn new(name: impl Into<Name>, classifier: Expr) -> Self {
        let level = if classifier.is_kind() {
            Level::TypeConst
        } else {
            Level::ObjConst
        };
        Decl {
            name: name.into(),
            classifier,
            level,
            implicit: 0,
        }
    }
}

/// An ordered LF signature with unique names.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    decls: Vec<Decl>,
    index: HashMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, decl: Decl) -> Result<(), LfError> {
        if self.index.contains_key(&decl.name) {
            return Err(LfError::Duplicate(decl.name));
        }
        self.index.insert(decl.name.clone(), self.decls.len());
        self.decls.push(decl);
        Ok(())
    }

    pub fn get(&self, name: &Name) -> Option<&Decl> {
        self.index.get(name).map(|&i| &self.decls[i])
    }

    pub fn position(&self, name: &Name) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// The first `n` declarations as a signature of their own.
    pub fn prefix(&self, n: usize) -> Signature {
        let mut sig = Signature::new();
        for d in &self.decls[..n.min(self.decls.len())] {
            sig.push(d.clone()).expect("prefix of a valid signature");
        }
        sig
    }
}

/// An ordered variable typing context; lookups find the innermost entry.
#[derive(Clone, Debug, Default)]
pub struct Context {
    entries: Vec<(Name, Expr)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(Name, Expr)>) -> Self {
        Context { entries }
    }

    pub fn push(&mut self, x: Name, ty: Expr) {
        self.entries.push((x, ty));
    }

    pub fn pop(&mut self) -> Option<(Name, Expr)> {
        self.entries.pop()
    }

    pub fn lookup(&self, x: &Name) -> Option<&Expr> {
        self.entries.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.entries.iter().any(|(y, _)| y == x)
    }

    pub fn entries(&self) -> &[(Name, Expr)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }
}

/// Types of object meta-variables, in insertion order.
pub type MetaContext = IndexMap<Name, Expr>;

/// Rename binder `x` if it shadows an entry of `ctx`, returning the name to
/// use and `body` with the renaming applied.
pub(crate) fn freshen_binder(ctx: &Context, x: &Name, body: &Expr) -> (Name, Expr) {
    if !ctx.contains(x) {
        return (x.clone(), body.clone());
    }
    let fresh = x.fresh(|n| ctx.contains(n) || body.has_free_var(n));
    let renamed = body.substitute(&[(x.clone(), Expr::Var(fresh.clone()))]);
    (fresh, renamed)
}
