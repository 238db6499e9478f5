//! Recursive-descent parser for the loop grammar:
//!
//! ```text
//! program   := init_line* "while" "*" "do" stmt* "done"
//! init_line := "init" id "=" number | "init" id "in" "[" number "," number "]"
//! stmt      := "skip" ";" | "(" ids ")" ":=" "(" exprs ")" ";" | id ":=" expr ";"
//! expr      := term (("+" | "-") term)*
//! term      := factor ("*" factor)*
//! factor    := "-" factor | number | id | "non_det" "(" expr "," expr ")" | "(" expr ")"
//! ```

use super::lexer::{lex, Tok, Token};
use super::{InitLine, IrError, RawExpr, RawStmt, SourceAst, Span};
use crate::Rat;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Token, IrError> {
        if std::mem::discriminant(self.peek()) == std::mem::discriminant(want) {
            Ok(self.bump())
        } else {
            Err(IrError::Syntax { span: self.span(), msg: format!("expected {what}") })
        }
    }

    fn signed_number(&mut self) -> Result<Rat, IrError> {
        let neg = if matches!(self.peek(), Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump().tok {
            Tok::Number(v) => Ok(if neg { -v } else { v }),
            _ => Err(IrError::Syntax { span: self.span(), msg: "expected a number".into() }),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), IrError> {
        let span = self.span();
        match self.bump().tok {
            Tok::Ident(name) => Ok((name, span)),
            _ => Err(IrError::Syntax { span, msg: format!("expected {what}") }),
        }
    }

    fn program(&mut self) -> Result<SourceAst, IrError> {
        let mut inits = Vec::new();
        while matches!(self.peek(), Tok::Init) {
            inits.push(self.init_line()?);
        }
        self.expect(&Tok::While, "`while`")?;
        self.expect(&Tok::Star, "`*` (the loop guard is nondeterministic)")?;
        self.expect(&Tok::Do, "`do`")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                Tok::Done => {
                    self.bump();
                    break;
                }
                Tok::While => return Err(IrError::NestedLoop { span: self.span() }),
                Tok::If => return Err(IrError::ConditionalNotSupported { span: self.span() }),
                Tok::Eof => {
                    return Err(IrError::Syntax { span: self.span(), msg: "expected `done`".into() })
                }
                _ => stmts.push(self.stmt()?),
            }
        }
        match self.peek() {
            Tok::Eof => Ok(SourceAst { inits, stmts }),
            _ => Err(IrError::Syntax {
                span: self.span(),
                msg: "trailing input after `done` (exactly one loop per program)".into(),
            }),
        }
    }

    fn init_line(&mut self) -> Result<InitLine, IrError> {
        let span = self.span();
        self.expect(&Tok::Init, "`init`")?;
        let (var, _) = self.ident("a variable name")?;
        match self.bump().tok {
            Tok::Eq => {
                let v = self.signed_number()?;
                Ok(InitLine { var, lo: v.clone(), hi: v, span })
            }
            Tok::In => {
                self.expect(&Tok::LBracket, "`[`")?;
                let lo = self.signed_number()?;
                self.expect(&Tok::Comma, "`,`")?;
                let hi = self.signed_number()?;
                self.expect(&Tok::RBracket, "`]`")?;
                if lo > hi {
                    return Err(IrError::InitBoundsInverted { name: var, span });
                }
                Ok(InitLine { var, lo, hi, span })
            }
            _ => Err(IrError::Syntax { span: self.span(), msg: "expected `=` or `in`".into() }),
        }
    }

    fn stmt(&mut self) -> Result<RawStmt, IrError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Skip => {
                self.bump();
                self.expect(&Tok::Semi, "`;`")?;
                Ok(RawStmt { targets: Vec::new(), rhs: Vec::new(), span })
            }
            Tok::LParen => {
                self.bump();
                let mut targets = Vec::new();
                loop {
                    let (name, nspan) = self.ident("a variable name")?;
                    if targets.contains(&name) {
                        return Err(IrError::DuplicateTarget { name, span: nspan });
                    }
                    targets.push(name);
                    match self.bump().tok {
                        Tok::Comma => continue,
                        Tok::RParen => break,
                        _ => {
                            return Err(IrError::Syntax {
                                span: self.span(),
                                msg: "expected `,` or `)`".into(),
                            })
                        }
                    }
                }
                self.expect(&Tok::Assign, "`:=`")?;
                self.expect(&Tok::LParen, "`(`")?;
                let mut rhs = Vec::new();
                loop {
                    rhs.push(self.expr()?);
                    match self.bump().tok {
                        Tok::Comma => continue,
                        Tok::RParen => break,
                        _ => {
                            return Err(IrError::Syntax {
                                span: self.span(),
                                msg: "expected `,` or `)`".into(),
                            })
                        }
                    }
                }
                self.expect(&Tok::Semi, "`;`")?;
                if targets.len() != rhs.len() {
                    return Err(IrError::ArityMismatch {
                        targets: targets.len(),
                        exprs: rhs.len(),
                        span,
                    });
                }
                Ok(RawStmt { targets, rhs, span })
            }
            Tok::Ident(_) => {
                let (name, _) = self.ident("a variable name")?;
                self.expect(&Tok::Assign, "`:=`")?;
                let e = self.expr()?;
                self.expect(&Tok::Semi, "`;`")?;
                Ok(RawStmt { targets: vec![name], rhs: vec![e], span })
            }
            Tok::While => Err(IrError::NestedLoop { span }),
            Tok::If => Err(IrError::ConditionalNotSupported { span }),
            _ => Err(IrError::Syntax { span, msg: "expected a statement".into() }),
        }
    }

    fn expr(&mut self) -> Result<RawExpr, IrError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = RawExpr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = RawExpr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RawExpr, IrError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Tok::Star) {
            self.bump();
            acc = RawExpr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RawExpr, IrError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(RawExpr::Neg(Box::new(self.factor()?)))
            }
            Tok::Number(v) => {
                self.bump();
                Ok(RawExpr::Const(v))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(RawExpr::Var(name, span))
            }
            Tok::NonDet => {
                self.bump();
                self.expect(&Tok::LParen, "`(`")?;
                let lo = self.expr()?;
                self.expect(&Tok::Comma, "`,`")?;
                let hi = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(RawExpr::NonDet(Box::new(lo), Box::new(hi), span))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::If => Err(IrError::ConditionalNotSupported { span }),
            _ => Err(IrError::Syntax { span, msg: "expected an expression".into() }),
        }
    }
}

/// Parses source text to the raw statement-level AST.
pub fn parse_source(source: &str) -> Result<SourceAst, IrError> {
    let toks = lex(source)?;
    Parser { toks, pos: 0 }.program()
}
