use lfhh::elab::{elaborate_query, elaborate_signature};
use lfhh::engine::{solve, Limits, Solution};
use lfhh::lf::Signature;
use lfhh::translate::{translate_query, translate_signature, Mode, QueryGoal};

const APPEND: &str = include_str!("data/append.elf");

fn run(sig: &Signature, query: &str, mode: Mode, limits: Limits) -> (QueryGoal, Vec<Solution>) {
    let program = translate_signature(sig, mode).unwrap();
    let q = elaborate_query(query, sig).unwrap();
    let g = translate_query(sig, &q, mode).unwrap();
    let clauses: Vec<_> = program.clauses.iter().map(|(_, c)| c.clone()).collect();
    let mut report: Vec<_> = g.metas.iter().map(|(_, v)| v.clone()).collect();
    report.push(g.proof.clone());
    let sols = solve(&clauses, g.goal.clone(), report, limits);
    (g, sols)
}

fn binding(g: &QueryGoal, s: &Solution, name: &str) -> String {
    let v = if name == "proof" {
        &g.proof
    } else {
        &g.metas.iter().find(|(n, _)| n.to_string() == name).unwrap().1
    };
    s.substitution.get(v).unwrap().to_string()
}

// Naive clauses check the type of an output list before the premise
// that determines it, so exhaustive naive search enumerates every list up
// to the depth bound. Naive runs stop at the first solution.
fn first_only() -> Limits {
    Limits {
        solutions: Some(1),
        ..Limits::default()
    }
}

#[test]
fn ground_append() {
    let sig = elaborate_signature(APPEND).unwrap();
    let (_, sols) = run(&sig, "append (cons z nil) nil L", Mode::Optimized, Limits::default());
    assert_eq!(sols.len(), 1);
    for mode in [Mode::Optimized, Mode::Naive] {
        let (g, sols) = run(&sig, "append (cons z nil) nil L", mode, first_only());
        assert_eq!(binding(&g, &sols[0], "L"), "cons z nil");
        assert_eq!(binding(&g, &sols[0], "proof"), "app-cons nil nil nil z (app-nil nil)");
        assert!(sols[0].disagreements.is_empty());
    }
}

#[test]
fn parametric_append() {
    let sig = elaborate_signature(APPEND).unwrap();
    let query = "{x:nat} append (cons x nil) (cons z (cons x nil)) (L x)";
    let (_, sols) = run(&sig, query, Mode::Optimized, Limits::default());
    assert_eq!(sols.len(), 1);
    // the naive proof nests five backchaining steps deep
    let shallow = Limits {
        depth: 6,
        ..first_only()
    };
    for (mode, limits) in [(Mode::Optimized, first_only()), (Mode::Naive, shallow)] {
        let (g, sols) = run(&sig, query, mode, limits);
        assert_eq!(binding(&g, &sols[0], "L"), "y\\ cons y (cons z (cons y nil))");
    }
}

#[test]
fn splitting_a_list() {
    let sig = elaborate_signature(APPEND).unwrap();
    let (g, sols) = run(
        &sig,
        "append L1 L2 (cons z (cons z nil))",
        Mode::Optimized,
        Limits::default(),
    );
    let pairs: Vec<(String, String)> = sols
        .iter()
        .map(|s| (binding(&g, s, "L1"), binding(&g, s, "L2")))
        .collect();
    assert_eq!(
        pairs,
        [
            ("nil".into(), "cons z (cons z nil)".into()),
            ("cons z nil".into(), "cons z nil".into()),
            ("cons z (cons z nil)".into(), "nil".into()),
        ]
    );
}
