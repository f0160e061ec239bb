//! Decision procedures for the LF judgments: valid signatures, contexts and
//! kinds, type kinding, and object typing with meta-variables.

use crate::lf::{
    canonicalize_in, freshen_binder, Category, Context, Expr, Level, LfError, MetaContext, Signature, DEFAULT_FUEL,
};

/// Typechecker over a fixed signature and meta-variable context.
pub struct Checker<'a> {
    sig: &'a Signature,
    meta: &'a MetaContext,
    fuel: u64,
}

static EMPTY_META: std::sync::LazyLock<MetaContext> = std::sync::LazyLock::new(MetaContext::new);

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Self::with_meta(sig, &EMPTY_META)
    }

    pub fn with_meta(sig: &'a Signature, meta: &'a MetaContext) -> Self {
        Checker {
            sig,
            meta,
            fuel: DEFAULT_FUEL,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    fn norm(&mut self, e: &Expr) -> Result<Expr, LfError> {
        e.beta_normalize_with(&mut self.fuel)
    }

    /// Definitional equality of two well-formed classifiers: α-equality of
    /// their canonical β-normal forms.
    fn equal(&mut self, ctx: &Context, a: &Expr, b: &Expr) -> Result<bool, LfError> {
        let a = self.norm(a)?;
        let b = self.norm(b)?;
        if a.alpha_eq(&b) {
            return Ok(true);
        }
        let ca = canonicalize_in(&a, &Expr::Type, self.sig, ctx, self.meta);
        let cb = canonicalize_in(&b, &Expr::Type, self.sig, ctx, self.meta);
        Ok(match (ca, cb) {
            (Ok(x), Ok(y)) => x.alpha_eq(&y),
            _ => false,
        })
    }

    pub fn check_context(&mut self, ctx: &Context) -> Result<(), LfError> {
        let mut prefix = Context::new();
        for (x, ty) in ctx.entries() {
            if prefix.contains(x) {
                return Err(LfError::DuplicateVariable(x.clone()));
            }
            self.check_type(&mut prefix, ty, &Expr::Type)?;
            prefix.push(x.clone(), ty.clone());
        }
        Ok(())
    }

    pub fn check_kind(&mut self, ctx: &mut Context, k: &Expr) -> Result<(), LfError> {
        match k {
            Expr::Type => Ok(()),
            Expr::Pi(x, a, body) => {
                self.check_type(ctx, a, &Expr::Type)?;
                let (x, body) = freshen_binder(ctx, x, body);
                ctx.push(x, (**a).clone());
                let r = self.check_kind(ctx, &body);
                ctx.pop();
                r
            }
            other => Err(LfError::Category(format!("`{other}` is not a kind"))),
        }
    }

    /// Infer the kind of a type family.
    pub fn synth_family(&mut self, ctx: &mut Context, a: &Expr) -> Result<Expr, LfError> {
        match a {
            Expr::Const(c) => {
                let d = self.sig.get(c).ok_or_else(|| LfError::UnboundConstant(c.clone()))?;
                if d.level != Level::TypeConst {
                    return Err(LfError::Category(format!("object constant `{c}` used as a type")));
                }
                self.norm(&d.classifier)
            }
            Expr::Pi(x, dom, body) => {
                self.check_type(ctx, dom, &Expr::Type)?;
                let (x, body) = freshen_binder(ctx, x, body);
                ctx.push(x, (**dom).clone());
                let k = self.synth_family(ctx, &body);
                ctx.pop();
                match k? {
                    Expr::Type => Ok(Expr::Type),
                    other => Err(LfError::mismatch(Expr::Type, other, body.clone())),
                }
            }
            Expr::App(f, m) => {
                let k = self.synth_family(ctx, f)?;
                match self.norm(&k)? {
                    Expr::Pi(x, dom, cod) => {
                        self.check_object(ctx, m, &dom)?;
                        self.norm(&cod.substitute(&[(x, (**m).clone())]))
                    }
                    other => Err(LfError::not_a_function((**f).clone(), other)),
                }
            }
            other => Err(LfError::Category(format!("`{other}` is not a type"))),
        }
    }

    pub fn check_type(&mut self, ctx: &mut Context, a: &Expr, k: &Expr) -> Result<(), LfError> {
        let found = self.synth_family(ctx, a)?;
        if self.equal(ctx, &found, k)? {
            Ok(())
        } else {
            Err(LfError::mismatch(k.clone(), found, a.clone()))
        }
    }

    /// Infer the β-normal type of an object.
    pub fn synth_object(&mut self, ctx: &mut Context, m: &Expr) -> Result<Expr, LfError> {
        match m {
            Expr::Const(c) => {
                let d = self.sig.get(c).ok_or_else(|| LfError::UnboundConstant(c.clone()))?;
                if d.level != Level::ObjConst {
                    return Err(LfError::Category(format!("type constant `{c}` used as an object")));
                }
                self.norm(&d.classifier)
            }
            Expr::Var(x) => {
                let ty = ctx
                    .lookup(x)
                    .cloned()
                    .ok_or_else(|| LfError::UnboundVariable(x.clone()))?;
                self.norm(&ty)
            }
            Expr::Meta(x) => {
                let ty = self
                    .meta
                    .get(x)
                    .cloned()
                    .ok_or_else(|| LfError::UnboundMeta(x.clone()))?;
                self.norm(&ty)
            }
            Expr::Lam(x, a, body) => {
                self.check_type(ctx, a, &Expr::Type)?;
                let (x, body) = freshen_binder(ctx, x, body);
                ctx.push(x.clone(), (**a).clone());
                let b = self.synth_object(ctx, &body);
                ctx.pop();
                Ok(Expr::pi(x, self.norm(a)?, b?))
            }
            Expr::App(f, n) => {
                let fty = self.synth_object(ctx, f)?;
                match fty {
                    Expr::Pi(x, dom, cod) => {
                        self.check_object(ctx, n, &dom)?;
                        self.norm(&cod.substitute(&[(x, (**n).clone())]))
                    }
                    other => Err(LfError::not_a_function((**f).clone(), other)),
                }
            }
            other => Err(LfError::Category(format!("`{other}` is not an object"))),
        }
    }

    pub fn check_object(&mut self, ctx: &mut Context, m: &Expr, a: &Expr) -> Result<(), LfError> {
        let found = self.synth_object(ctx, m)?;
        if self.equal(ctx, &found, a)? {
            Ok(())
        } else {
            Err(LfError::mismatch(self.norm(a)?, found, m.clone()))
        }
    }
}

/// Check every declaration left to right against the signature before it.
pub fn check_signature(sig: &Signature) -> Result<(), LfError> {
    for (i, d) in sig.decls().iter().enumerate() {
        check_decl(&sig.prefix(i), d.name.clone(), &d.classifier, d.level).map_err(|e| LfError::InDecl {
            name: d.name.clone(),
            source: Box::new(e),
        })?;
    }
    Ok(())
}

pub(crate) fn check_decl(
    prefix: &Signature,
    name: crate::name::Name,
    classifier: &Expr,
    level: Level,
) -> Result<(), LfError> {
    if prefix.get(&name).is_some() {
        return Err(LfError::Duplicate(name));
    }
    if !classifier.free_vars().is_empty() || classifier.has_metas() {
        return Err(LfError::NotClosed(name));
    }
    let mut checker = Checker::new(prefix);
    let mut ctx = Context::new();
    match level {
        Level::TypeConst => {
            classifier.check_category(Category::Kind)?;
            checker.check_kind(&mut ctx, classifier)
        }
        Level::ObjConst => {
            classifier.check_category(Category::Family)?;
            checker.check_type(&mut ctx, classifier, &Expr::Type)
        }
    }
}

pub fn check_context(sig: &Signature, ctx: &Context) -> Result<(), LfError> {
    Checker::new(sig).check_context(ctx)
}

pub fn check_kind(sig: &Signature, ctx: &Context, k: &Expr) -> Result<(), LfError> {
    let mut checker = Checker::new(sig);
    checker.check_context(ctx)?;
    checker.check_kind(&mut ctx.clone(), k)
}

pub fn check_type(sig: &Signature, ctx: &Context, a: &Expr, k: &Expr) -> Result<(), LfError> {
    let mut checker = Checker::new(sig);
    checker.check_context(ctx)?;
    checker.check_type(&mut ctx.clone(), a, k)
}

pub fn check_object(sig: &Signature, ctx: &Context, meta: &MetaContext, m: &Expr, a: &Expr) -> Result<(), LfError> {
    let mut checker = Checker::with_meta(sig, meta);
    checker.check_context(ctx)?;
    checker.check_object(&mut ctx.clone(), m, a)
}
