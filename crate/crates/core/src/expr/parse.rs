//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' int)?
//! atom    := number | 'u' ('[' int (',' int)* ']')? | 'exp' '(' expr ')'
//!          | coordinate | symbol | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::node::Node;
use super::poly::Q;
use super::var::{MultiIndex, MAX_VARS};
use super::Expr;
use crate::error::{Error, Result};
use crate::jet::JetContext;

pub fn parse_expr(text: &str, ctx: &JetContext) -> Result<Expr> {
    parse_node(text, ctx)?.normalize()
}

pub fn parse_node(text: &str, ctx: &JetContext) -> Result<Node> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, ctx };
    let n = p.expr()?;
    p.ws();
    if p.pos < p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(n)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    ctx: &'a JetContext,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { offset: self.pos, message: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(Node::Product(vec![Node::int(-1), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Node::Sum(terms) })
    }

    fn term(&mut self) -> Result<Node> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.eat(b'/') {
                let d = self.unary()?;
                factors.push(Node::Power(Box::new(d), -1));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Node::Product(factors) })
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            let x = self.unary()?;
            return Ok(Node::Product(vec![Node::int(-1), x]));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.ws();
        let at = self.pos;
        let k = self.uint()?;
        if paren {
            self.expect(b')')?;
        }
        let k = i64::try_from(k).map_err(|_| Error::Syntax { offset: at, message: "exponent too large".into() })?;
        let k = if neg { -k } else { k };
        if k == 0 {
            return Ok(Node::int(1));
        }
        Ok(Node::Power(Box::new(base), k))
    }

    fn uint(&mut self) -> Result<u64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a nonnegative integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        txt.parse::<u64>().map_err(|_| Error::Syntax { offset: start, message: "integer too large".into() })
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
        let mut frac = String::new();
        if self.pos < self.s.len() && self.s[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac = std::str::from_utf8(&self.s[fs..self.pos]).unwrap().to_string();
        }
        let digits = format!("{int_part}{frac}");
        let n: BigInt = digits.parse().map_err(|_| Error::Syntax { offset: start, message: "malformed number".into() })?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Node::Rational(Q::new(n, d)))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string()
    }

    fn atom(&mut self) -> Result<Node> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.err("unexpected end of input")),
        };
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if !(c.is_ascii_alphabetic() || c == b'_') {
            return Err(self.err(&format!("unexpected character `{}`", c as char)));
        }
        let start = self.pos;
        let name = self.ident();
        match name.as_str() {
            "u" => {
                if self.peek() == Some(b'[') {
                    self.pos += 1;
                    let mut entries = vec![];
                    loop {
                        let k = self.uint()?;
                        if k > 255 {
                            return Err(self.err("jet order too large"));
                        }
                        entries.push(k as u32);
                        if self.eat(b',') {
                            continue;
                        }
                        self.expect(b']')?;
                        break;
                    }
                    if entries.len() != self.ctx.n {
                        return Err(Error::JetLength { expected: self.ctx.n, found: entries.len(), offset: start });
                    }
                    return Ok(Node::Jet(MultiIndex::new(&entries)));
                }
                Ok(Node::Dep)
            }
            "exp" if self.peek() == Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(Node::Exp(Box::new(e)))
            }
            _ => {
                if self.ctx.symbol(&name).is_some() {
                    return Ok(Node::Symbol(name));
                }
                match self.ctx.coord_slot(&name) {
                    Some(i) if i < MAX_VARS => Ok(Node::Coord(i)),
                    _ => Err(Error::UnknownIdentifier { name, offset: start }),
                }
            }
        }
    }
}
