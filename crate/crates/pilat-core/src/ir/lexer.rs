use crate::num::ratio::rat_from_decimal;
use crate::Rat;

use super::{IrError, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(Rat),
    While,
    Do,
    Done,
    Skip,
    Init,
    In,
    NonDet,
    If,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Eq,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Tokenizes a source file. `#` starts a comment running to end of line.
pub fn lex(source: &str) -> Result<Vec<Token>, IrError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = source.chars().peekable();

    macro_rules! push {
        ($tok:expr, $span:expr) => {
            out.push(Token { tok: $tok, span: $span })
        };
    }

    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '*' => {
                chars.next();
                col += 1;
                push!(Tok::Star, span);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, span);
            }
            '-' => {
                chars.next();
                col += 1;
                push!(Tok::Minus, span);
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, span);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, span);
            }
            '[' => {
                chars.next();
                col += 1;
                push!(Tok::LBracket, span);
            }
            ']' => {
                chars.next();
                col += 1;
                push!(Tok::RBracket, span);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, span);
            }
            ';' => {
                chars.next();
                col += 1;
                push!(Tok::Semi, span);
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Eq, span);
            }
            ':' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Assign, span);
                } else {
                    return Err(IrError::Syntax { span, msg: "expected `:=`".into() });
                }
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                let mut seen_dot = false;
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || (c == '.' && !seen_dot) {
                        if c == '.' {
                            seen_dot = true;
                        }
                        text.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let Some(value) = rat_from_decimal(&text) else {
                    return Err(IrError::Syntax { span, msg: format!("bad number literal `{text}`") });
                };
                push!(Tok::Number(value), span);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = match name.as_str() {
                    "while" => Tok::While,
                    "do" => Tok::Do,
                    "done" => Tok::Done,
                    "skip" => Tok::Skip,
                    "init" => Tok::Init,
                    "in" => Tok::In,
                    "non_det" => Tok::NonDet,
                    "if" | "then" | "else" => Tok::If,
                    _ => Tok::Ident(name),
                };
                push!(tok, span);
            }
            other => {
                return Err(IrError::Syntax { span, msg: format!("unexpected character `{other}`") });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}
