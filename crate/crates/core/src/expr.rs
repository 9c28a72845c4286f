//! Text grammar for Steenrod-algebra and dual-algebra elements.
//!
//! Steenrod side: `Sq[i1,...]`, `Sq3` (single square), `SqM(e1,...)` (Milnor basis),
//! `Q0`, `Q1`, ..., `chi(...)`, `1`, `0`, combined with `+`, `*`, `^k` and parentheses.
//! Dual side: `xi[j1,...]`, `xi2` (single generator), `zeta[n]`, `1`, `0`, same operators.

use crate::error::{Error, Result};
use crate::milnor::{self, DualElt, MilnorSeq, XiMonomial};
use crate::steenrod::{self, SteenrodElt};

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer { s: s.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
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
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(w.as_bytes()) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn has_digit(&self) -> bool {
        self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit())
    }

    fn list(&mut self, open: u8, close: u8) -> Result<Vec<u32>> {
        self.expect(open)?;
        let mut v = Vec::new();
        if self.eat(close) {
            return Ok(v);
        }
        loop {
            v.push(self.number()?);
            if self.eat(close) {
                return Ok(v);
            }
            self.expect(b',')?;
        }
    }

    fn error(&self, msg: &str) -> Error {
        let shown = String::from_utf8_lossy(self.s);
        Error::Parse(format!("{msg} at position {} in {shown:?}", self.pos))
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("unexpected trailing input")),
        }
    }
}

/// Operations shared by both grammars.
trait Ring: Sized + Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn atom(lx: &mut Lexer) -> Result<Self>;
}

fn parse_sum<R: Ring>(lx: &mut Lexer) -> Result<R> {
    let mut acc = parse_product::<R>(lx)?;
    while lx.eat(b'+') {
        acc = acc.add(&parse_product::<R>(lx)?);
    }
    Ok(acc)
}

fn parse_product<R: Ring>(lx: &mut Lexer) -> Result<R> {
    let mut acc = parse_power::<R>(lx)?;
    while lx.eat(b'*') {
        acc = acc.mul(&parse_power::<R>(lx)?);
    }
    Ok(acc)
}

fn parse_power<R: Ring>(lx: &mut Lexer) -> Result<R> {
    let base = if lx.eat(b'(') {
        let inner = parse_sum::<R>(lx)?;
        lx.expect(b')')?;
        inner
    } else {
        R::atom(lx)?
    };
    if lx.eat(b'^') {
        let k = lx.number()?;
        let mut acc = R::one();
        for _ in 0..k {
            acc = acc.mul(&base);
        }
        return Ok(acc);
    }
    Ok(base)
}

fn parse_all<R: Ring>(s: &str) -> Result<R> {
    let mut lx = Lexer::new(s);
    if lx.peek().is_none() {
        return Err(Error::Parse("empty expression".into()));
    }
    let v = parse_sum::<R>(&mut lx)?;
    lx.finish()?;
    Ok(v)
}

impl Ring for SteenrodElt {
    fn zero() -> Self {
        SteenrodElt::zero()
    }
    fn one() -> Self {
        SteenrodElt::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn atom(lx: &mut Lexer) -> Result<Self> {
        if lx.eat_word("SqM") {
            let e = lx.list(b'(', b')')?;
            return milnor::milnor_to_admissible(&MilnorSeq::new(e));
        }
        if lx.eat_word("Sq") {
            if lx.has_digit() {
                return Ok(SteenrodElt::sq(lx.number()?));
            }
            if lx.peek() == Some(b'^') {
                lx.eat(b'^');
                return Ok(SteenrodElt::sq(lx.number()?));
            }
            let w = lx.list(b'[', b']')?;
            return Ok(steenrod::word(&w));
        }
        if lx.eat_word("chi") {
            lx.expect(b'(')?;
            let inner = parse_sum::<SteenrodElt>(lx)?;
            lx.expect(b')')?;
            return Ok(steenrod::antipode(&inner));
        }
        if lx.eat_word("Q") {
            if !lx.has_digit() {
                return Err(lx.error("expected Q index"));
            }
            let i = lx.number()? as usize;
            if i > 8 {
                return Err(lx.error("Q index too large"));
            }
            return Ok(milnor::q(i));
        }
        constant(lx)
    }
}

impl Ring for DualElt {
    fn zero() -> Self {
        DualElt::zero()
    }
    fn one() -> Self {
        DualElt::one()
    }
    fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        s.add_assign(o);
        s
    }
    fn mul(&self, o: &Self) -> Self {
        DualElt::mul(self, o)
    }
    fn atom(lx: &mut Lexer) -> Result<Self> {
        if lx.eat_word("xi") {
            if lx.has_digit() {
                let n = lx.number()? as usize;
                if n == 0 {
                    return Ok(DualElt::one());
                }
                return Ok(DualElt::xi(n));
            }
            let e = lx.list(b'[', b']')?;
            return Ok(DualElt::from_monomial(XiMonomial::new(e)));
        }
        if lx.eat_word("zeta") {
            let n = if lx.has_digit() {
                lx.number()?
            } else {
                let v = lx.list(b'[', b']')?;
                match v.as_slice() {
                    [n] => *n,
                    _ => return Err(lx.error("zeta takes one index")),
                }
            };
            return Ok(milnor::zeta(n as usize));
        }
        constant(lx)
    }
}

fn constant<R: Ring>(lx: &mut Lexer) -> Result<R> {
    match lx.peek() {
        Some(b'0') | Some(b'1') => {
            let n = lx.number()?;
            match n {
                0 => Ok(R::zero()),
                1 => Ok(R::one()),
                _ => Err(lx.error("only the constants 0 and 1 are allowed")),
            }
        }
        _ => Err(lx.error("expected an element")),
    }
}

/// Parse an element of the Steenrod algebra.
pub fn parse_steenrod(s: &str) -> Result<SteenrodElt> {
    parse_all(s)
}

/// Parse an element of the dual Steenrod algebra.
pub fn parse_dual(s: &str) -> Result<DualElt> {
    parse_all(s)
}

/// Parse a Milnor-basis index list written `SqM(e1,...)` or `e1,...`.
pub fn parse_milnor_seq(s: &str) -> Result<MilnorSeq> {
    let mut lx = Lexer::new(s);
    lx.eat_word("SqM");
    let e = if lx.peek() == Some(b'(') {
        lx.list(b'(', b')')?
    } else {
        let mut v = vec![lx.number()?];
        while lx.eat(b',') {
            v.push(lx.number()?);
        }
        v
    };
    lx.finish()?;
    Ok(MilnorSeq::new(e))
}
