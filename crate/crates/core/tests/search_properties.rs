use std::collections::{BTreeSet, HashMap};

use lfhh::elab::{elaborate_query, elaborate_signature};
use lfhh::engine::{Database, Limits, Solver};
use lfhh::invert::{invert_solution, Answer};
use lfhh::lf::{Context, Expr, Level, MetaContext, Signature, DEFAULT_FUEL};
use lfhh::name::Name;
use lfhh::translate::{translate_query, translate_signature, Mode};
use lfhh::typecheck::{check_object, Checker};

const APPEND: &str = include_str!("data/append.elf");

fn append_sig() -> Signature {
    elaborate_signature(APPEND).unwrap()
}

fn symbols(m: &Expr) -> usize {
    match m {
        Expr::Lam(_, _, b) => 1 + symbols(b),
        Expr::App(f, a) => symbols(f) + symbols(a),
        _ => 1,
    }
}

fn solve(sig: &Signature, query: &str, mode: Mode, limits: Limits) -> Vec<Answer> {
    let program = translate_signature(sig, mode).unwrap();
    let clauses: Vec<_> = program.clauses.iter().map(|(_, c)| c.clone()).collect();
    let db = Database::new(&clauses);
    let q = elaborate_query(query, sig).unwrap();
    let g = translate_query(sig, &q, mode).unwrap();
    let mut report: Vec<_> = g.metas.iter().map(|(_, v)| v.clone()).collect();
    report.push(g.proof.clone());
    Solver::new(&db, g.goal.clone(), report, limits)
        .map(|s| invert_solution(sig, &q, &g, &s, DEFAULT_FUEL).unwrap())
        .collect()
}

const QUERIES: [&str; 9] = [
    "append L1 L2 (cons z (cons z nil))",
    "append (cons z nil) L (cons z (cons z nil))",
    "append L (cons z nil) (cons (s z) (cons z nil))",
    "append (cons z nil) nil L",
    "append nil L1 L2",
    "append L1 nil L2",
    "append (cons X nil) nil L",
    "{x:nat} append (cons x nil) nil (L x)",
    "append (cons z nil) (cons z nil) (cons z nil)",
];

/// The value of each query meta-variable under an answer, with unsolved
/// ones standing for themselves.
fn values(a: &Answer, metas: &[Name]) -> Vec<Expr> {
    metas
        .iter()
        .map(|n| {
            a.bindings
                .iter()
                .find(|(m, _)| m == n)
                .map_or(Expr::Meta(n.clone()), |(_, e)| e.clone())
        })
        .collect()
}

/// First-order matching of `p` against `t`, extending `sub`.
fn matches(p: &Expr, t: &Expr, sub: &mut HashMap<Name, Expr>) -> bool {
    match (p, t) {
        (Expr::Meta(n), _) => match sub.get(n) {
            Some(e) => e.alpha_eq(t),
            None => {
                sub.insert(n.clone(), t.clone());
                true
            }
        },
        (Expr::App(f, a), Expr::App(g, b)) => matches(f, g, sub) && matches(a, b, sub),
        (Expr::Lam(x, a, m), Expr::Lam(y, b, n)) => x == y && a.alpha_eq(b) && matches(m, n, sub),
        _ => p.alpha_eq(t),
    }
}

fn covers(general: &[Expr], specific: &[Expr]) -> bool {
    let mut sub = HashMap::new();
    general.iter().zip(specific).all(|(g, s)| matches(g, s, &mut sub))
}

fn free_metas(es: &[Expr]) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::new();
    for e in es {
        for m in e.metas() {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// All instances of `vals` obtained by replacing its meta-variables with
/// closed objects of their types, keeping those whose values have at most
/// six symbols.
fn small_instances(vals: &[Expr], types: &MetaContext, objects: &[(Expr, Expr)]) -> Vec<Vec<Expr>> {
    let mut out = vec![vals.to_vec()];
    for m in free_metas(vals) {
        let candidates: Vec<&Expr> = objects
            .iter()
            .filter(|(_, a)| a.alpha_eq(&types[&m]))
            .map(|(o, _)| o)
            .collect();
        out = out
            .iter()
            .flat_map(|vs| {
                let m = &m;
                candidates.iter().map(move |c| {
                    vs.iter()
                        .map(|v| v.substitute_meta(&[(m.clone(), (*c).clone())]))
                        .collect::<Vec<_>>()
                })
            })
            .filter(|vs| vs.iter().all(|v| symbols(v) <= 6))
            .collect();
    }
    out
}

#[test]
fn naive_and_optimized_translations_agree() {
    // The naive encoding type-checks every list it touches, so it returns
    // ground instances where the optimized one may return a more general
    // answer. The two agree when every naive answer is an instance of an
    // optimized one and every small ground instance of an optimized answer
    // is found by the naive search.
    let sig = append_sig();
    let objects = well_typed_objects(&sig, 6);
    for q in QUERIES {
        let query = elaborate_query(q, &sig).unwrap();
        let metas: Vec<Name> = query.named_metas().map(|(n, _)| n.clone()).collect();
        let small = |a: &Answer| a.bindings.iter().all(|(_, m)| symbols(m) <= 6);
        let opt: Vec<Answer> = solve(
            &sig,
            q,
            Mode::Optimized,
            Limits {
                depth: 8,
                solutions: None,
            },
        );
        let naive: Vec<Answer> = solve(
            &sig,
            q,
            Mode::Naive,
            Limits {
                depth: 6,
                solutions: None,
            },
        );
        let opt_vals: Vec<Vec<Expr>> = opt.iter().filter(|a| small(a)).map(|a| values(a, &metas)).collect();
        let naive_vals: Vec<Vec<Expr>> = naive.iter().filter(|a| small(a)).map(|a| values(a, &metas)).collect();
        for n in &naive_vals {
            assert!(
                opt_vals.iter().any(|o| covers(o, n)),
                "{q}: naive answer {n:?} not covered"
            );
        }
        let mut types = query.metas.clone();
        for a in &opt {
            types.extend(a.fresh.clone());
        }
        for o in &opt_vals {
            for inst in small_instances(o, &types, &objects) {
                assert!(
                    naive_vals.iter().any(|n| covers(n, &inst)),
                    "{q}: instance {inst:?} missing from naive answers"
                );
            }
        }
    }
}

#[test]
fn answers_are_stable() {
    // instantiating the query with an answer leaves a query whose only
    // solution is the same proof with nothing left to bind
    let sig = append_sig();
    for q in QUERIES {
        let query = elaborate_query(q, &sig).unwrap();
        for a in solve(
            &sig,
            q,
            Mode::Optimized,
            Limits {
                depth: 6,
                solutions: Some(5),
            },
        ) {
            let inst = query
                .ty
                .substitute_meta(&a.bindings)
                .beta_normalize(DEFAULT_FUEL)
                .unwrap();
            if inst.has_metas() {
                continue;
            }
            let again = solve(
                &sig,
                &inst.to_string(),
                Mode::Optimized,
                Limits {
                    depth: 6,
                    solutions: Some(2),
                },
            );
            assert_eq!(again.len(), 1, "{inst}");
            assert!(again[0].bindings.is_empty());
            assert!(
                again[0].proof.as_ref().unwrap().alpha_eq(a.proof.as_ref().unwrap()),
                "{inst}"
            );
        }
    }
}

/// Closed well-typed objects by size, built bottom-up with the type checker
/// deciding which applications to keep.
fn well_typed_objects(sig: &Signature, max: usize) -> Vec<(Expr, Expr)> {
    let consts: Vec<(Name, usize)> = sig
        .decls()
        .iter()
        .filter(|d| d.level == Level::ObjConst)
        .map(|d| {
            let mut n = 0;
            let mut a = &d.classifier;
            while let Expr::Pi(_, _, b) = a {
                n += 1;
                a = b;
            }
            (d.name.clone(), n)
        })
        .collect();
    let mut by_size: HashMap<usize, Vec<Expr>> = HashMap::new();
    let mut out = Vec::new();
    for n in 1..=max {
        let mut here = Vec::new();
        for (c, arity) in &consts {
            if n < 1 + arity {
                continue;
            }
            for parts in compositions(n - 1, *arity) {
                let mut partial = vec![Expr::Const(c.clone())];
                for k in parts {
                    let args = by_size.get(&k).cloned().unwrap_or_default();
                    partial = partial
                        .iter()
                        .flat_map(|f| args.iter().map(move |a| Expr::app(f.clone(), a.clone())))
                        .collect();
                }
                for m in partial {
                    if let Ok(ty) = Checker::new(sig).synth_object(&mut Context::new(), &m) {
                        out.push((m.clone(), ty));
                        here.push(m);
                    }
                }
            }
        }
        by_size.insert(n, here);
    }
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (1..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn list_text(len: usize) -> String {
    (0..len).fold("nil".to_string(), |acc, _| format!("(cons z {acc})"))
}

#[test]
fn search_finds_every_small_proof() {
    let sig = append_sig();
    let objects = well_typed_objects(&sig, 10);
    for l1 in 0..=3 {
        for l2 in 0..=3 {
            for l3 in 0..=3 {
                let goal = format!("append {} {} {}", list_text(l1), list_text(l2), list_text(l3));
                let ty = elaborate_query(&goal, &sig).unwrap().ty;
                let expected: BTreeSet<String> = objects
                    .iter()
                    .filter(|(_, a)| a.alpha_eq(&ty))
                    .map(|(m, _)| m.to_string())
                    .collect();
                for mode in [Mode::Optimized, Mode::Naive] {
                    let found: BTreeSet<String> = solve(&sig, &goal, mode, Limits::default())
                        .iter()
                        .map(|a| a.proof.clone().unwrap())
                        .filter(|m| symbols(m) <= 10)
                        .map(|m| m.to_string())
                        .collect();
                    assert_eq!(found, expected, "{goal} ({mode:?})");
                }
                // every proof the engine returns is well typed
                for a in solve(&sig, &goal, Mode::Optimized, Limits::default()) {
                    let m = a.proof.unwrap();
                    assert!(check_object(&sig, &Context::new(), &MetaContext::new(), &m, &ty).is_ok());
                }
            }
        }
    }
}
