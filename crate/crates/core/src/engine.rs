//! Depth-first proof search for hohh goals.
//!
//! Goals are simplified first: `⊤` succeeds, an implication assumes its
//! clause and a universal goal introduces a fresh eigenconstant. Atomic
//! goals are solved by backchaining, trying assumed clauses (most recent
//! first) before program clauses (in program order), with chronological
//! backtracking over a stack of choice points.

use std::collections::HashMap;
use std::sync::Arc;

use crate::hohh::{Clause, DisagreementSet, Eigen, Goal, Head, LVar, Store, Substitution, Term, Ty};
use crate::name::Name;

pub const DEFAULT_DEPTH: usize = 512;

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Maximum nesting of backchaining steps along one branch. Deeper
    /// branches are pruned.
    pub depth: usize,
    pub solutions: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            depth: DEFAULT_DEPTH,
            solutions: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Bindings of the variables the solver was asked to report.
    pub substitution: Substitution,
    pub disagreements: DisagreementSet,
}

/// Program clauses indexed by the predicate of their head.
#[derive(Clone, Debug, Default)]
pub struct Database {
    by_predicate: HashMap<Name, Vec<Clause>>,
}

impl Database {
    pub fn new<'c>(clauses: impl IntoIterator<Item = &'c Clause>) -> Database {
        let mut by_predicate: HashMap<Name, Vec<Clause>> = HashMap::new();
        for c in clauses {
            if let Some(p) = predicate(c.head()) {
                by_predicate.entry(p.clone()).or_default().push(c.clone());
            }
        }
        Database { by_predicate }
    }

    fn clauses(&self, p: &Name) -> &[Clause] {
        self.by_predicate.get(p).map_or(&[], Vec::as_slice)
    }
}

fn predicate(atom: &Term) -> Option<&Name> {
    match atom {
        Term::App(Head::Const(n, _), _) => Some(n),
        _ => None,
    }
}

type Hyps = Option<Arc<HypNode>>;

struct HypNode {
    clause: Clause,
    next: Hyps,
}

#[derive(Clone)]
struct Task {
    goal: Goal,
    level: u32,
    hyps: Hyps,
    depth: usize,
}

type Goals = Option<Arc<GoalNode>>;

struct GoalNode {
    task: Task,
    next: Goals,
}

fn push(task: Task, next: Goals) -> Goals {
    Some(Arc::new(GoalNode { task, next }))
}

struct Choice {
    mark: usize,
    atom: Term,
    task: Task,
    rest: Goals,
    alternatives: Vec<Clause>,
    next: usize,
}

enum State {
    Fresh,
    Yielded,
    Done,
}

/// Enumerates solutions of one goal lazily.
pub struct Solver<'d> {
    db: &'d Database,
    store: Store,
    goals: Goals,
    choices: Vec<Choice>,
    report: Vec<Arc<LVar>>,
    limits: Limits,
    state: State,
    found: usize,
    pruned: usize,
}

impl<'d> Solver<'d> {
    /// `report` lists the logic variables whose bindings make up a solution.
    pub fn new(db: &'d Database, goal: Goal, report: Vec<Arc<LVar>>, limits: Limits) -> Self {
        let task = Task {
            goal,
            level: 0,
            hyps: None,
            depth: 0,
        };
        Solver {
            db,
            store: Store::new(),
            goals: push(task, None),
            choices: Vec::new(),
            report,
            limits,
            state: State::Fresh,
            found: 0,
            pruned: 0,
        }
    }

    /// Number of branches cut off by the depth bound so far.
    pub fn pruned(&self) -> usize {
        self.pruned
    }

    fn solution(&self) -> Solution {
        Solution {
            substitution: self.store.substitution(&self.report),
            disagreements: self.store.disagreements(),
        }
    }

    fn assume(hyps: &Hyps, d: &Clause) -> Hyps {
        Some(Arc::new(HypNode {
            clause: d.clone(),
            next: hyps.clone(),
        }))
    }

    fn fresh_eigen(x: &Name, ty: &Ty, level: u32) -> Arc<Eigen> {
        Eigen::new(x.clone(), ty.clone(), level + 1)
    }

    fn alternatives(&self, atom: &Term, hyps: &Hyps) -> Vec<Clause> {
        let Some(p) = predicate(atom) else { return Vec::new() };
        let mut out = Vec::new();
        let mut h = hyps;
        while let Some(node) = h {
            if predicate(node.clause.head()) == Some(p) {
                out.push(node.clause.clone());
            }
            h = &node.next;
        }
        out.extend_from_slice(self.db.clauses(p));
        out
    }

    /// Replace the clause's quantifiers by fresh logic variables, returning
    /// its head and premises.
    fn instantiate(clause: &Clause, level: u32) -> (Term, Vec<Goal>) {
        let mut premises = Vec::new();
        let mut d = clause.clone();
        loop {
            match d {
                Clause::Forall(x, ty, body) => {
                    let v = LVar::new(Name::new(&x.base().to_uppercase()), ty.clone(), level);
                    d = body.instantiate(&[Term::eta(Head::Var(v), &ty)]);
                }
                Clause::Implies(g, body) => {
                    premises.push((*g).clone());
                    d = (*body).clone();
                }
                Clause::Atom(t) => return (t, premises),
            }
        }
    }

    /// Try the remaining alternatives of a choice point. On success the
    /// premises are scheduled and the choice point is kept if alternatives
    /// remain.
    fn resume(&mut self, mut ch: Choice) -> bool {
        while ch.next < ch.alternatives.len() {
            let clause = ch.alternatives[ch.next].clone();
            ch.next += 1;
            self.store.undo_to(ch.mark);
            let (head, premises) = Self::instantiate(&clause, ch.task.level);
            if self.store.unify(&head, &ch.atom).is_ok() {
                let mut goals = ch.rest.clone();
                for g in premises.into_iter().rev() {
                    let task = Task {
                        goal: g,
                        level: ch.task.level,
                        hyps: ch.task.hyps.clone(),
                        depth: ch.task.depth + 1,
                    };
                    goals = push(task, goals);
                }
                self.goals = goals;
                if ch.next < ch.alternatives.len() {
                    self.choices.push(ch);
                }
                return true;
            }
        }
        self.store.undo_to(ch.mark);
        false
    }

    fn backtrack(&mut self) -> bool {
        while let Some(ch) = self.choices.pop() {
            if self.resume(ch) {
                return true;
            }
        }
        false
    }

    /// Run until the goal list is empty (a solution) or no choice points
    /// remain (failure).
    fn run(&mut self) -> bool {
        loop {
            let Some(node) = self.goals.take() else { return true };
            self.goals = node.next.clone();
            let task = &node.task;
            match &task.goal {
                Goal::True => {}
                Goal::Implies(d, g) => {
                    let next = Task {
                        goal: (**g).clone(),
                        hyps: Self::assume(&task.hyps, d),
                        ..task.clone()
                    };
                    self.goals = push(next, self.goals.take());
                }
                Goal::Forall(x, ty, g) => {
                    let c = Self::fresh_eigen(x, ty, task.level);
                    let next = Task {
                        goal: g.instantiate(&[Term::eta(Head::Eigen(c), ty)]),
                        level: task.level + 1,
                        ..task.clone()
                    };
                    self.goals = push(next, self.goals.take());
                }
                Goal::Atom(a) => {
                    let progressed = if task.depth >= self.limits.depth {
                        self.pruned += 1;
                        false
                    } else {
                        let ch = Choice {
                            mark: self.store.mark(),
                            atom: a.clone(),
                            alternatives: self.alternatives(a, &task.hyps),
                            task: task.clone(),
                            rest: self.goals.clone(),
                            next: 0,
                        };
                        self.resume(ch)
                    };
                    if !progressed && !self.backtrack() {
                        return false;
                    }
                }
            }
        }
    }
}

impl Iterator for Solver<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        if self.limits.solutions.is_some_and(|n| self.found >= n) {
            return None;
        }
        match self.state {
            State::Done => return None,
            State::Yielded => {
                if !self.backtrack() {
                    self.state = State::Done;
                    return None;
                }
            }
            State::Fresh => {}
        }
        if self.run() {
            self.state = State::Yielded;
            self.found += 1;
            Some(self.solution())
        } else {
            self.state = State::Done;
            None
        }
    }
}

/// All solutions of `goal` against `clauses`, up to the limits.
pub fn solve(clauses: &[Clause], goal: Goal, report: Vec<Arc<LVar>>, limits: Limits) -> Vec<Solution> {
    let db = Database::new(clauses);
    Solver::new(&db, goal, report, limits).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Ty {
        Ty::atom("nat")
    }

    fn p() -> Head {
        Head::Const(Name::new("p"), Ty::arrow(nat(), Ty::o()))
    }

    fn c(n: &str) -> Term {
        Term::cnst(n, nat())
    }

    #[test]
    fn true_has_one_empty_solution() {
        let sols = solve(&[], Goal::True, Vec::new(), Limits::default());
        assert_eq!(sols.len(), 1);
        assert!(sols[0].substitution.is_empty());
    }

    #[test]
    fn facts_in_program_order() {
        let prog = [
            Clause::Atom(Term::app(p(), vec![c("a")])),
            Clause::Atom(Term::app(p(), vec![c("b")])),
        ];
        let x = LVar::new("X", nat(), 0);
        let goal = Goal::Atom(Term::app(p(), vec![Term::var(&x)]));
        let sols = solve(&prog, goal, vec![x.clone()], Limits::default());
        let vals: Vec<String> = sols
            .iter()
            .map(|s| s.substitution.get(&x).unwrap().to_string())
            .collect();
        assert_eq!(vals, ["a", "b"]);
    }

    #[test]
    fn assumed_clause_is_tried_first() {
        let prog = [Clause::Atom(Term::app(p(), vec![c("a")]))];
        let x = LVar::new("X", nat(), 0);
        let goal = Goal::implies(
            Clause::Atom(Term::app(p(), vec![c("b")])),
            Goal::Atom(Term::app(p(), vec![Term::var(&x)])),
        );
        let sols = solve(&prog, goal, vec![x.clone()], Limits::default());
        let vals: Vec<String> = sols
            .iter()
            .map(|s| s.substitution.get(&x).unwrap().to_string())
            .collect();
        assert_eq!(vals, ["b", "a"]);
    }

    #[test]
    fn assumption_is_dropped_on_backtracking() {
        // (p b => p a) ; then p b must fail outside the implication
        let q = Head::Const(Name::new("q"), Ty::o());
        let prog = [Clause::implies(
            Goal::implies(
                Clause::Atom(Term::app(p(), vec![c("b")])),
                Goal::Atom(Term::app(p(), vec![c("b")])),
            ),
            Clause::Atom(Term::head(q.clone())),
        )];
        let goal = Goal::Atom(Term::head(q));
        assert_eq!(solve(&prog, goal, Vec::new(), Limits::default()).len(), 1);
        let outside = Goal::Atom(Term::app(p(), vec![c("b")]));
        assert!(solve(&prog, outside, Vec::new(), Limits::default()).is_empty());
    }

    #[test]
    fn universal_goal_uses_a_fresh_constant() {
        // ∀y. p y cannot be solved from p a
        let prog = [Clause::Atom(Term::app(p(), vec![c("a")]))];
        let goal = Goal::forall("y", nat(), Goal::Atom(Term::app(p(), vec![Term::bound(0)])));
        assert!(solve(&prog, goal, Vec::new(), Limits::default()).is_empty());
        // but ∀y. (p y => p y) can
        let goal = Goal::forall(
            "y",
            nat(),
            Goal::implies(
                Clause::Atom(Term::app(p(), vec![Term::bound(0)])),
                Goal::Atom(Term::app(p(), vec![Term::bound(0)])),
            ),
        );
        assert_eq!(solve(&prog, goal, Vec::new(), Limits::default()).len(), 1);
    }

    #[test]
    fn variables_cannot_capture_later_eigenconstants() {
        // ∃X. ∀y. (p y => p X) has no solution
        let x = LVar::new("X", nat(), 0);
        let goal = Goal::forall(
            "y",
            nat(),
            Goal::implies(
                Clause::Atom(Term::app(p(), vec![Term::bound(0)])),
                Goal::Atom(Term::app(p(), vec![Term::var(&x)])),
            ),
        );
        assert!(solve(&[], goal, vec![x], Limits::default()).is_empty());
    }

    #[test]
    fn depth_bound_prunes_infinite_branches() {
        // p X :- p X.  p a.
        let loopy = Clause::forall(
            "x",
            nat(),
            Clause::implies(
                Goal::Atom(Term::app(p(), vec![Term::bound(0)])),
                Clause::Atom(Term::app(p(), vec![Term::bound(0)])),
            ),
        );
        let prog = [loopy, Clause::Atom(Term::app(p(), vec![c("a")]))];
        let db = Database::new(&prog);
        let goal = Goal::Atom(Term::app(p(), vec![c("a")]));
        let mut s = Solver::new(
            &db,
            goal,
            Vec::new(),
            Limits {
                depth: 10,
                solutions: None,
            },
        );
        let n = s.by_ref().count();
        // one proof per number of loop steps below the bound
        assert_eq!(n, 10);
        assert!(s.pruned() > 0);
    }

    #[test]
    fn solution_limit() {
        let prog = [
            Clause::Atom(Term::app(p(), vec![c("a")])),
            Clause::Atom(Term::app(p(), vec![c("b")])),
        ];
        let x = LVar::new("X", nat(), 0);
        let goal = Goal::Atom(Term::app(p(), vec![Term::var(&x)]));
        let sols = solve(
            &prog,
            goal,
            vec![x],
            Limits {
                depth: 5,
                solutions: Some(1),
            },
        );
        assert_eq!(sols.len(), 1);
    }
}
