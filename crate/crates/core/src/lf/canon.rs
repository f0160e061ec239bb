use super::{freshen_binder, Context, Expr, LfError, MetaContext, Signature, DEFAULT_FUEL};
use crate::name::Name;

/// η-expand a well-typed β-normal expression so that every constant and
/// variable occurrence is fully applied.
///
/// `classifier` is the type of `u` when `u` is an object, or a kind when `u`
/// is a type family. Kinds themselves are canonicalized when `u` is a kind.
pub fn canonicalize(u: &Expr, classifier: &Expr, sig: &Signature, ctx: &Context) -> Result<Expr, LfError> {
    canonicalize_in(u, classifier, sig, ctx, &MetaContext::new())
}

/// [`canonicalize`] with meta-variables typed by `meta`.
pub fn canonicalize_in(
    u: &Expr,
    classifier: &Expr,
    sig: &Signature,
    ctx: &Context,
    meta: &MetaContext,
) -> Result<Expr, LfError> {
    let mut c = Canon {
        sig,
        meta,
        ctx: ctx.clone(),
        fuel: DEFAULT_FUEL,
    };
    let u = c.norm(u)?;
    if u.is_kind() {
        c.kind(&u)
    } else if classifier.is_kind() {
        c.family(&u)
    } else {
        let ty = c.norm(classifier)?;
        c.object(&u, &ty)
    }
}

pub(crate) struct Canon<'a> {
    pub sig: &'a Signature,
    pub meta: &'a MetaContext,
    pub ctx: Context,
    pub fuel: u64,
}

impl Canon<'_> {
    fn norm(&mut self, e: &Expr) -> Result<Expr, LfError> {
        e.beta_normalize_with(&mut self.fuel)
    }

    fn head_type(&self, head: &Expr) -> Result<Expr, LfError> {
        match head {
            Expr::Const(c) => self
                .sig
                .get(c)
                .map(|d| d.classifier.clone())
                .ok_or_else(|| LfError::UnboundConstant(c.clone())),
            Expr::Var(x) => self
                .ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| LfError::UnboundVariable(x.clone())),
            Expr::Meta(x) => self.meta.get(x).cloned().ok_or_else(|| LfError::UnboundMeta(x.clone())),
            other => Err(LfError::Category(format!("`{other}` cannot head an application"))),
        }
    }

    fn binder_name(&self, x: &Name, avoid: &Expr) -> Name {
        let x = if x.base() == "_" { Name::new("x") } else { x.clone() };
        x.fresh(|n| self.ctx.contains(n) || avoid.has_free_var(n))
    }

    pub fn kind(&mut self, k: &Expr) -> Result<Expr, LfError> {
        match k {
            Expr::Type => Ok(Expr::Type),
            Expr::Pi(x, a, body) => {
                let a2 = self.family(a)?;
                let (x, body) = freshen_binder(&self.ctx, x, body);
                self.ctx.push(x.clone(), (**a).clone());
                let body2 = self.kind(&body);
                self.ctx.pop();
                Ok(Expr::pi(x, a2, body2?))
            }
            other => Err(LfError::Category(format!("`{other}` is not a kind"))),
        }
    }

    pub fn family(&mut self, a: &Expr) -> Result<Expr, LfError> {
        match a {
            Expr::Pi(x, dom, body) => {
                let dom2 = self.family(dom)?;
                let (x, body) = freshen_binder(&self.ctx, x, body);
                self.ctx.push(x.clone(), (**dom).clone());
                let body2 = self.family(&body);
                self.ctx.pop();
                Ok(Expr::pi(x, dom2, body2?))
            }
            _ => Ok(self.neutral(a)?.0),
        }
    }

    pub fn object(&mut self, m: &Expr, ty: &Expr) -> Result<Expr, LfError> {
        match ty {
            Expr::Pi(x, dom, cod) => {
                let (y, body, body_ty) = match m {
                    Expr::Lam(y, _, body) if x == y => (y.clone(), (**body).clone(), (**cod).clone()),
                    Expr::Lam(y, _, body) => {
                        let (y, body) = if cod.has_free_var(y) {
                            let y2 = y.fresh(|n| cod.has_free_var(n) || body.has_free_var(n));
                            let body = body.substitute(&[(y.clone(), Expr::Var(y2.clone()))]);
                            (y2, body)
                        } else {
                            (y.clone(), (**body).clone())
                        };
                        let cod = cod.substitute(&[(x.clone(), Expr::Var(y.clone()))]);
                        (y, body, cod)
                    }
                    _ => {
                        let y = self.binder_name(x, m);
                        let cod = cod.substitute(&[(x.clone(), Expr::Var(y.clone()))]);
                        (y.clone(), Expr::app(m.clone(), Expr::Var(y)), cod)
                    }
                };
                let dom2 = self.family(dom)?;
                let (y, body, body_ty) = if self.ctx.contains(&y) {
                    let y2 = y.fresh(|n| self.ctx.contains(n) || body.has_free_var(n) || body_ty.has_free_var(n));
                    let ren = [(y.clone(), Expr::Var(y2.clone()))];
                    (y2, body.substitute(&ren), body_ty.substitute(&ren))
                } else {
                    (y, body, body_ty)
                };
                self.ctx.push(y.clone(), (**dom).clone());
                let body_ty = self.norm(&body_ty);
                let r = body_ty.and_then(|t| self.object(&body, &t));
                self.ctx.pop();
                Ok(Expr::lam(y, dom2, r?))
            }
            _ => match m {
                Expr::Lam(..) => Err(LfError::mismatch(
                    ty.clone(),
                    Expr::Const(Name::new("<function>")),
                    m.clone(),
                )),
                _ => Ok(self.neutral(m)?.0),
            },
        }
    }

    /// Canonicalize an application spine, returning it with its type.
    pub fn neutral(&mut self, m: &Expr) -> Result<(Expr, Expr), LfError> {
        let (head, args) = m.spine();
        let mut ty = self.head_type(head)?;
        let mut out = head.clone();
        for arg in args {
            ty = self.norm(&ty)?;
            match &ty {
                Expr::Pi(x, dom, cod) => {
                    let arg2 = self.object(arg, dom)?;
                    let next = cod.substitute(&[(x.clone(), arg2.clone())]);
                    out = Expr::app(out, arg2);
                    ty = next;
                }
                _ => return Err(LfError::not_a_function(out, ty.clone())),
            }
        }
        Ok((out, self.norm(&ty)?))
    }
}
