//! Strict occurrences of bound variables in LF types and objects.
//!
//! A variable occurs strictly when it appears on a rigid path applied only
//! to distinct λ-bound variables. Any instance of such a variable is then
//! determined by unification with the target, so its inhabitation need not
//! be checked separately.

use crate::lf::Expr;
use crate::name::Name;

/// Whether `x` occurs strictly in `a`, where `gamma` lists the Π-bound
/// variables in scope before `x`.
pub fn strict_in_type(gamma: &[(Name, Expr)], x: &Name, a: &Expr) -> bool {
    in_type(&mut gamma.to_vec(), x, 0, a)
}

/// Whether `x` occurs strictly in the object `m`. `delta` holds Π-bound
/// variables (not rigid), `bound` the λ-bound variables in scope.
pub fn strict_in_term(delta: &[Name], bound: &[Name], x: &Name, m: &Expr) -> bool {
    in_term(delta, &mut bound.to_vec(), x, m)
}

/// `from` is the first context position whose type may mention `x`; it
/// keeps chains through other variables moving rightwards.
fn in_type(gamma: &mut Vec<(Name, Expr)>, x: &Name, from: usize, a: &Expr) -> bool {
    if let Expr::Pi(y, b, c) = a {
        if y == x {
            return false;
        }
        gamma.push((y.clone(), (**b).clone()));
        let r = in_type(gamma, x, from, c);
        gamma.pop();
        return r;
    }
    let (_, args) = a.spine();
    let delta: Vec<Name> = gamma.iter().map(|(n, _)| n.clone()).collect();
    if args.iter().any(|m| in_term(&delta, &mut Vec::new(), x, m)) {
        return true;
    }
    // strict through the type of another variable that is itself strict
    (from..gamma.len()).any(|k| {
        let (y, b) = gamma[k].clone();
        y != *x
            && b.has_free_var(x)
            && in_type(&mut gamma[..k].to_vec(), x, 0, &b)
            && in_type(&mut gamma.clone(), &y, k + 1, a)
    })
}

fn in_term(delta: &[Name], bound: &mut Vec<Name>, x: &Name, m: &Expr) -> bool {
    if let Expr::Lam(y, _, body) = m {
        if y == x {
            return false;
        }
        bound.push(y.clone());
        let r = in_term(delta, bound, x, body);
        bound.pop();
        return r;
    }
    let (head, args) = m.spine();
    match head {
        Expr::Var(v) if v == x => {
            let mut seen: Vec<Name> = Vec::new();
            args.iter().all(|a| match eta_var(a) {
                Some(y) if bound.contains(&y) && !seen.contains(&y) => {
                    seen.push(y);
                    true
                }
                _ => false,
            })
        }
        Expr::Const(_) => args.iter().any(|a| in_term(delta, bound, x, a)),
        Expr::Var(v) if !delta.contains(v) => args.iter().any(|a| in_term(delta, bound, x, a)),
        // Π-bound variables and meta-variables can be instantiated
        _ => false,
    }
}

/// The variable an η-expanded variable contracts to.
fn eta_var(e: &Expr) -> Option<Name> {
    let mut params = Vec::new();
    let mut body = e;
    while let Expr::Lam(w, _, b) = body {
        params.push(w.clone());
        body = b;
    }
    let (head, args) = body.spine();
    let Expr::Var(v) = head else { return None };
    if args.len() != params.len() || params.contains(v) {
        return None;
    }
    let contracts = args.iter().zip(&params).all(|(a, w)| eta_var(a).as_ref() == Some(w));
    contracts.then(|| v.clone())
}
