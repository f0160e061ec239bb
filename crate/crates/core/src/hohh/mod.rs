//! Simply typed higher-order hereditary Harrop formulas: terms, clauses,
//! goals and pattern unification.

mod formula;
mod term;
mod ty;
mod unify;

pub use formula::{Clause, Goal};
pub use term::{Eigen, Head, LVar, Term};
pub use ty::Ty;
pub use unify::{unify, DisagreementSet, Fail, Pair, Store, Substitution};
