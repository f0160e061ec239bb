use lfhh::elab::elaborate_signature;
use lfhh::lf::{canonicalize, Context, Expr, MetaContext, Signature, DEFAULT_FUEL};
use lfhh::typecheck::{check_object, Checker};
use proptest::prelude::*;

const APPEND: &str = include_str!("data/append.elf");

fn append_sig() -> Signature {
    elaborate_signature(APPEND).unwrap()
}

fn nat() -> Expr {
    Expr::cnst("nat")
}

/// The context `x:nat, y:nat` in which generated terms are typed.
fn ctx() -> Context {
    Context::from_entries(vec![("x".into(), nat()), ("y".into(), nat())])
}

/// Terms of type `nat` in context `x:nat, y:nat`, with β-redexes that
/// rebind `x` and `y` (shadowing the context) and higher-order redexes.
fn nat_term() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::cnst("z")), Just(Expr::var("x")), Just(Expr::var("y"))];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|m| Expr::app(Expr::cnst("s"), m)),
            (inner.clone(), inner.clone(), prop::bool::ANY).prop_map(|(body, arg, which)| {
                let x = if which { "x" } else { "y" };
                Expr::app(Expr::lam(x, nat(), body), arg)
            }),
            // ([f:nat -> nat] f m) ([x:nat] n)
            (inner.clone(), inner).prop_map(|(m, n)| {
                let f = Expr::lam("f", Expr::arrow(nat(), nat()), Expr::app(Expr::var("f"), m));
                Expr::app(f, Expr::lam("x", nat(), n))
            }),
        ]
    })
}

fn norm(e: &Expr) -> Expr {
    e.beta_normalize(DEFAULT_FUEL).unwrap()
}

proptest! {
    #[test]
    fn normalization_is_idempotent(m in nat_term()) {
        let n = norm(&m);
        prop_assert!(n.is_beta_normal());
        prop_assert!(norm(&n).alpha_eq(&n));
    }

    #[test]
    fn substitution_commutes_with_normalization(m in nat_term(), n in nat_term()) {
        let direct = norm(&m.substitute(&[("x".into(), n.clone())]));
        let staged = norm(&norm(&m).substitute(&[("x".into(), norm(&n))]));
        prop_assert!(direct.alpha_eq(&staged), "{direct} vs {staged}");
    }

    #[test]
    fn generated_terms_are_well_typed(m in nat_term()) {
        let sig = append_sig();
        prop_assert!(check_object(&sig, &ctx(), &MetaContext::new(), &m, &nat()).is_ok());
    }

    #[test]
    fn canonicalize_preserves_typing(m in nat_term()) {
        let sig = append_sig();
        let c = canonicalize(&m, &nat(), &sig, &ctx()).unwrap();
        prop_assert!(check_object(&sig, &ctx(), &MetaContext::new(), &c, &nat()).is_ok());
        prop_assert!(c.alpha_eq(&norm(&m)));
    }

    #[test]
    fn meta_substitution_preserves_typing(m in nat_term(), n in nat_term()) {
        // y becomes a meta-variable X : nat, then X is replaced by a closed term
        let sig = append_sig();
        let with_meta = m.substitute(&[("y".into(), Expr::meta("X"))]);
        let mut metas = MetaContext::new();
        metas.insert("X".into(), nat());
        let ctx_x = Context::from_entries(vec![("x".into(), nat())]);
        prop_assert!(check_object(&sig, &ctx_x, &metas, &with_meta, &nat()).is_ok());
        let closed = norm(&n.substitute(&[("x".into(), Expr::cnst("z")), ("y".into(), Expr::cnst("z"))]));
        let instance = norm(&with_meta.substitute_meta(&[("X".into(), closed)]));
        prop_assert!(check_object(&sig, &ctx_x, &MetaContext::new(), &instance, &nat()).is_ok());
    }
}

#[test]
fn eta_expansion_of_constants() {
    let sig = append_sig();
    let ty = Expr::arrow(nat(), nat());
    let c = canonicalize(&Expr::cnst("s"), &ty, &sig, &Context::new()).unwrap();
    assert!(c.alpha_eq(&Expr::lam("n", nat(), Expr::app(Expr::cnst("s"), Expr::var("n")))));
    let mut checker = Checker::new(&sig);
    assert!(checker.check_object(&mut Context::new(), &c, &ty).is_ok());
}

#[test]
fn printed_declarations_elaborate_to_themselves() {
    let sig = append_sig();
    let text: String = sig
        .decls()
        .iter()
        .map(|d| format!("{} : {}.\n", d.name, d.classifier))
        .collect();
    let again = elaborate_signature(&text).unwrap();
    assert_eq!(again.len(), sig.len());
    for (a, b) in sig.decls().iter().zip(again.decls()) {
        assert_eq!(a.name, b.name);
        assert!(
            a.classifier.alpha_eq(&b.classifier),
            "{} vs {}",
            a.classifier,
            b.classifier
        );
        assert_eq!(b.implicit, 0);
    }
}

#[test]
fn implicit_binders_count_distinct_uppercase_variables() {
    let sig = append_sig();
    let implicit = |n: &str| sig.get(&n.into()).unwrap().implicit;
    assert_eq!(implicit("app-nil"), 1);
    assert_eq!(implicit("app-cons"), 4);
    assert_eq!(implicit("cons"), 0);
}
