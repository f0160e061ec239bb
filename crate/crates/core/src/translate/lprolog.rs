//! λProlog concrete syntax for translated programs.
//!
//! Top-level clauses `∀x⃗1.(G1 ⊃ ∀x⃗2.(G2 ⊃ A))` are written
//! `A :- G1, G2.` with the quantified variables as capitalized logic
//! variables. Embedded formulas use `pi x\ ...` and `=>`.

use std::collections::HashSet;
use std::fmt::Write;

use super::Program;
use crate::hohh::{Clause, Goal, Head, Term};

/// Returns `(signature, module)` texts.
pub(super) fn emit(p: &Program, module: &str) -> (String, String) {
    let mut sig = format!("sig {module}.\n\n");
    for k in &p.kinds {
        let _ = writeln!(sig, "kind {k} type.");
    }
    for (name, ty) in &p.constants {
        let _ = writeln!(sig, "type {name} {ty}.");
    }
    let mut m = format!("module {module}.\n\n");
    for (_, c) in &p.clauses {
        let _ = writeln!(m, "{}", clause_line(c));
    }
    (sig, m)
}

fn clause_line(c: &Clause) -> String {
    let mut taken = HashSet::new();
    collect_names(c, &mut taken);
    let mut names: Vec<String> = Vec::new();
    let mut premises = Vec::new();
    let mut d = c;
    let head = loop {
        match d {
            Clause::Forall(x, _, body) => {
                let base = capitalize(x.base());
                let clash = |s: &str| taken.contains(s) || names.iter().any(|n| n == s);
                let name = if clash(&base) {
                    (1..)
                        .map(|i| format!("{base}{i}"))
                        .find(|s| !clash(s))
                        .expect("unbounded")
                } else {
                    base
                };
                names.push(name);
                d = body;
            }
            Clause::Implies(g, body) => {
                let text = g.render(&names);
                premises.push(if matches!(**g, Goal::Atom(_)) {
                    text
                } else {
                    format!("({text})")
                });
                d = body;
            }
            Clause::Atom(t) => break t.render(&names),
        }
    };
    if premises.is_empty() {
        format!("{head}.")
    } else {
        format!("{head} :- {}.", premises.join(", "))
    }
}

fn capitalize(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => "X".to_string(),
    }
}

fn collect_names(c: &Clause, out: &mut HashSet<String>) {
    let mut add = |t: &Term| {
        t.each_head(&mut |h| {
            if let Head::Const(n, _) = h {
                out.insert(n.to_string());
            }
        })
    };
    let mut d = c;
    loop {
        match d {
            Clause::Forall(_, _, b) => d = b,
            Clause::Implies(g, b) => {
                goal_names(g, &mut add);
                d = b;
            }
            Clause::Atom(t) => {
                add(t);
                return;
            }
        }
    }
}

fn goal_names(g: &Goal, add: &mut impl FnMut(&Term)) {
    match g {
        Goal::True => {}
        Goal::Atom(t) => add(t),
        Goal::Forall(_, _, g) => goal_names(g, add),
        Goal::Implies(d, g) => {
            let mut cur = &**d;
            loop {
                match cur {
                    Clause::Forall(_, _, b) => cur = b,
                    Clause::Implies(h, b) => {
                        goal_names(h, add);
                        cur = b;
                    }
                    Clause::Atom(t) => {
                        add(t);
                        break;
                    }
                }
            }
            goal_names(g, add);
        }
    }
}
