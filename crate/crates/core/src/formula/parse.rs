use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Var(usize),
    Bang,
    Dot,
    Plus,
    Star,
    Bar,
    Amp,
    Dash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |start: usize| {
        let mut j = start;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let single = match c {
            b'!' => Some(Tok::Bang),
            b'.' => Some(Tok::Dot),
            b'+' => Some(Tok::Plus),
            b'*' => Some(Tok::Star),
            b'|' => Some(Tok::Bar),
            b'&' => Some(Tok::Amp),
            b'-' => Some(Tok::Dash),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, i));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let end = digits(i);
            let n = text[i..end].parse::<u64>().map_err(|_| ParseError {
                pos: i,
                message: "integer literal too large".into(),
            })?;
            out.push((Tok::Int(n), i));
            i = end;
        } else if c == b'x' || c == b'X' {
            let end = digits(i + 1);
            if end == i + 1 {
                return Err(ParseError { pos: i, message: "expected variable index after 'x'".into() });
            }
            let index = text[i + 1..end].parse::<usize>().map_err(|_| ParseError {
                pos: i,
                message: "variable index too large".into(),
            })?;
            if index == 0 {
                return Err(ParseError { pos: i, message: "variable indices start at 1".into() });
            }
            out.push((Tok::Var(index), i));
            i = end;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError { pos: i, message: format!("unexpected character {ch:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: message.into() })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    /// One left-associative precedence level.
    fn level(
        &mut self,
        op: Tok,
        build: fn(Formula, Formula) -> Formula,
        next: fn(&mut Self) -> Result<Formula, ParseError>,
    ) -> Result<Formula, ParseError> {
        let mut lhs = next(self)?;
        while self.eat(&op) {
            let rhs = next(self)?;
            lhs = build(lhs, rhs);
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        self.level(Tok::Bar, Formula::join, Self::conj)
    }
    fn conj(&mut self) -> Result<Formula, ParseError> {
        self.level(Tok::Amp, Formula::meet, Self::minus)
    }
    fn minus(&mut self) -> Result<Formula, ParseError> {
        self.level(Tok::Dash, Formula::minus, Self::sum)
    }
    fn sum(&mut self) -> Result<Formula, ParseError> {
        self.level(Tok::Plus, Formula::oplus, Self::prod)
    }
    fn prod(&mut self) -> Result<Formula, ParseError> {
        self.level(Tok::Star, Formula::otimes, Self::unary)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.at += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::Int(n)) if self.toks.get(self.at + 1).map(|(t, _)| t) == Some(&Tok::Dot) => {
                if n == 0 {
                    return self.error("scalar multiplier must be at least 1");
                }
                let n = u32::try_from(n).or_else(|_| self.error("scalar multiplier too large"))?;
                self.at += 2;
                Ok(Formula::scalar(n, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(0)) => {
                self.at += 1;
                Ok(Formula::Zero)
            }
            Some(Tok::Int(1)) => {
                self.at += 1;
                Ok(Formula::One)
            }
            Some(Tok::Int(n)) => self.error(format!("constant {n} is not 0 or 1; write {n}.f for scalars")),
            Some(Tok::Var(i)) => {
                self.at += 1;
                Ok(Formula::Var(i))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.disj()?;
                if !self.eat(&Tok::RParen) {
                    return self.error("expected ')'");
                }
                Ok(inner)
            }
            Some(t) => self.error(format!("unexpected token {t:?}")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a formula in the ASCII grammar
/// `| & - + *` (loosest to tightest), prefix `!` and `n.`, atoms `0 1 xN`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let f = p.disj()?;
    if p.at != p.toks.len() {
        return p.error("trailing input");
    }
    Ok(f)
}
