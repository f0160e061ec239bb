use std::collections::HashSet;
use std::fmt;

use super::Expr;
use crate::name::Name;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    ArrowLeft,
    Arg,
}

/// Prints in Twelf concrete syntax. Bound variables are shown under their
/// base name unless that would clash with a name free in the body.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut env = Vec::new();
        let mut out = String::new();
        print(self, Prec::Top, &mut env, &mut out);
        f.write_str(&out)
    }
}

fn display_of(x: &Name, env: &[(Name, String)]) -> String {
    env.iter()
        .rev()
        .find(|(y, _)| y == x)
        .map(|(_, s)| s.clone())
        .unwrap_or_else(|| x.to_string())
}

fn free_names(e: &Expr, env: &[(Name, String)], local: &mut Vec<Name>, out: &mut HashSet<String>) {
    match e {
        Expr::Var(y) => {
            if !local.contains(y) {
                out.insert(display_of(y, env));
            }
        }
        Expr::Const(c) | Expr::Meta(c) => {
            out.insert(c.to_string());
        }
        Expr::Pi(y, a, b) | Expr::Lam(y, a, b) => {
            free_names(a, env, local, out);
            local.push(y.clone());
            free_names(b, env, local, out);
            local.pop();
        }
        Expr::App(a, b) => {
            free_names(a, env, local, out);
            free_names(b, env, local, out);
        }
        Expr::Type => {}
    }
}

fn choose(x: &Name, body: &Expr, env: &[(Name, String)]) -> String {
    let mut local = vec![x.clone()];
    let mut taken = HashSet::new();
    free_names(body, env, &mut local, &mut taken);
    let base = x.base();
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|s| !taken.contains(s))
        .expect("unbounded search")
}

fn print(e: &Expr, prec: Prec, env: &mut Vec<(Name, String)>, out: &mut String) {
    match e {
        Expr::Type => out.push_str("type"),
        Expr::Const(c) | Expr::Meta(c) => out.push_str(&c.to_string()),
        Expr::Var(x) => out.push_str(&display_of(x, env)),
        Expr::Pi(x, a, b) if !b.has_free_var(x) => {
            let paren = prec > Prec::Top;
            if paren {
                out.push('(');
            }
            print(a, Prec::ArrowLeft, env, out);
            out.push_str(" -> ");
            print(b, Prec::Top, env, out);
            if paren {
                out.push(')');
            }
        }
        Expr::Pi(x, a, b) | Expr::Lam(x, a, b) => {
            let paren = prec > Prec::Top;
            if paren {
                out.push('(');
            }
            let shown = choose(x, b, env);
            let (open, close) = if matches!(e, Expr::Pi(..)) {
                ('{', '}')
            } else {
                ('[', ']')
            };
            out.push(open);
            out.push_str(&shown);
            out.push(':');
            print(a, Prec::Top, env, out);
            out.push(close);
            out.push(' ');
            env.push((x.clone(), shown));
            print(b, Prec::Top, env, out);
            env.pop();
            if paren {
                out.push(')');
            }
        }
        Expr::App(..) => {
            let (head, args) = e.spine();
            let paren = prec == Prec::Arg;
            if paren {
                out.push('(');
            }
            print(head, Prec::Arg, env, out);
            for a in args {
                out.push(' ');
                print(a, Prec::Arg, env, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}
