use super::lexer::{tokenize, Tok};
use super::{RawDecl, RawExpr, Span, SyntaxError};

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

/// Parse a sequence of `name : expr.` declarations.
pub fn parse_signature(src: &str) -> Result<Vec<RawDecl>, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        let span = p.span();
        let name = p.ident()?;
        p.expect(Tok::Colon, "`:`")?;
        let expr = p.expr()?;
        p.expect(Tok::Dot, "`.` at end of declaration")?;
        out.push(RawDecl { name, expr, span });
    }
    Ok(out)
}

/// Parse a single expression, optionally terminated by `.`.
pub fn parse_expr(src: &str) -> Result<RawExpr, SyntaxError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.peek() == &Tok::Dot {
        p.pos += 1;
    }
    if p.peek() != &Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

impl Parser {
    fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            t => format!("{t:?}"),
        };
        SyntaxError {
            span: self.span(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn expr(&mut self) -> Result<RawExpr, SyntaxError> {
        if matches!(self.peek(), Tok::LBrace | Tok::LBracket) {
            return self.binder();
        }
        let span = self.span();
        let lhs = self.app()?;
        if *self.peek() == Tok::Arrow {
            self.pos += 1;
            let rhs = self.expr()?;
            return Ok(RawExpr::Pi(None, Box::new(lhs), Box::new(rhs), span));
        }
        Ok(lhs)
    }

    fn binder(&mut self) -> Result<RawExpr, SyntaxError> {
        let span = self.span();
        let pi = *self.peek() == Tok::LBrace;
        self.pos += 1;
        let x = self.ident()?;
        self.expect(Tok::Colon, "`:` and a type annotation")?;
        let ty = self.expr()?;
        if pi {
            self.expect(Tok::RBrace, "`}`")?;
        } else {
            self.expect(Tok::RBracket, "`]`")?;
        }
        let body = self.expr()?;
        Ok(if pi {
            RawExpr::Pi(Some(x), Box::new(ty), Box::new(body), span)
        } else {
            RawExpr::Lam(x, Box::new(ty), Box::new(body), span)
        })
    }

    fn app(&mut self) -> Result<RawExpr, SyntaxError> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::Type | Tok::LParen => {
                    let a = self.atom()?;
                    e = RawExpr::App(Box::new(e), Box::new(a));
                }
                // a binder extends to the right, so it can only be the last argument
                Tok::LBrace | Tok::LBracket => {
                    let a = self.binder()?;
                    return Ok(RawExpr::App(Box::new(e), Box::new(a)));
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<RawExpr, SyntaxError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(RawExpr::Ident(s, span))
            }
            Tok::Type => {
                self.pos += 1;
                Ok(RawExpr::Type(span))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.error("an expression")),
        }
    }
}
