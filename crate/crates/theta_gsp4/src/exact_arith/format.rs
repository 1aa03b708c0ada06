//! Canonical text form: terms in descending lex order, `q^k` for even powers of u.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::{Mono, Poly, Rat, Sym};
use super::ratfunc::RatFunc;
use super::ArithError;

fn mono_to_string(m: &Mono) -> String {
    let mut parts = Vec::new();
    for s in Sym::ALL {
        let e = m[s.index()];
        if e == 0 {
            continue;
        }
        let (letter, e) = if s == Sym::U && e % 2 == 0 { ('q', e / 2) } else { (s.letter(), e) };
        if e == 1 {
            parts.push(letter.to_string());
        } else {
            parts.push(format!("{letter}^{e}"));
        }
    }
    parts.join("*")
}

pub fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let ms = mono_to_string(m);
        if ms.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&ms);
        } else {
            out.push_str(&format!("{a}*{ms}"));
        }
    }
    out
}

pub fn ratfunc_to_string(f: &RatFunc) -> String {
    if f.denom().is_one() {
        poly_to_string(f.numer())
    } else {
        format!("({})/({})", poly_to_string(f.numer()), poly_to_string(f.denom()))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Sym(char),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, ArithError> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().unwrap()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == 'q' || Sym::from_letter(c).is_some() {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(ArithError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc, ArithError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ArithError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                acc = acc.checked_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ArithError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ArithError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            if !neg {
                self.eat('+');
            }
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    i32::try_from(n.clone()).map_err(|_| ArithError::Parse("exponent too large".into()))?
                }
                _ => return Err(ArithError::Parse("expected integer exponent".into())),
            };
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, ArithError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RatFunc::from_rat(Rat::from_integer(n)))
            }
            Some(Tok::Sym('q')) => {
                self.pos += 1;
                Ok(RatFunc::q())
            }
            Some(Tok::Sym(c)) => {
                self.pos += 1;
                Ok(RatFunc::var(Sym::from_letter(c).unwrap()))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(ArithError::Parse("unbalanced parenthesis".into()));
                }
                Ok(v)
            }
            Some(t) => Err(ArithError::Parse(format!("unexpected token {t:?}"))),
            None => Err(ArithError::Parse("unexpected end of input".into())),
        }
    }
}

pub fn parse(s: &str) -> Result<RatFunc, ArithError> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(ArithError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ArithError::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(v)
}
