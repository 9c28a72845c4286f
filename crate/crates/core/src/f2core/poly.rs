use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq, Hash)]
struct RingInner {
    names: Vec<String>,
    degrees: Vec<u32>,
}

/// Polynomial ring over F₂ on named generators of positive degree.
#[derive(Clone, Debug)]
pub struct WeightedPolyRing(Arc<RingInner>);

impl PartialEq for WeightedPolyRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for WeightedPolyRing {}

impl WeightedPolyRing {
    pub fn new<S: AsRef<str>>(gens: &[(S, u32)]) -> Result<Self> {
        let mut seen = HashSet::new();
        for (name, deg) in gens {
            let name = name.as_ref();
            if !valid_name(name) {
                return Err(Error::Invalid(format!("bad generator name {name:?}")));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::Invalid(format!("duplicate generator {name}")));
            }
            if *deg == 0 {
                return Err(Error::Invalid(format!("generator {name} has degree 0")));
            }
        }
        Ok(WeightedPolyRing(Arc::new(RingInner {
            names: gens.iter().map(|(n, _)| n.as_ref().to_string()).collect(),
            degrees: gens.iter().map(|(_, d)| *d).collect(),
        })))
    }

    pub fn ngens(&self) -> usize {
        self.0.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.0.degrees[i]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0.degrees
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(&self.0.degrees).map(|(e, d)| e * d).sum()
    }

    /// Ring on the generators of `self` followed by those of `other`.
    pub fn tensor(&self, other: &WeightedPolyRing) -> Result<WeightedPolyRing> {
        let gens: Vec<(String, u32)> = (0..self.ngens())
            .map(|i| (self.name(i).to_string(), self.degree(i)))
            .chain((0..other.ngens()).map(|i| (other.name(i).to_string(), other.degree(i))))
            .collect();
        WeightedPolyRing::new(&gens)
    }

    /// All monomials of weighted degree `d`, ascending in lex order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let n = self.ngens();
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(ring: &WeightedPolyRing, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == ring.ngens() {
                if left == 0 {
                    out.push(Monomial(cur.clone()));
                }
                return;
            }
            let dg = ring.degree(i);
            for e in 0..=left / dg {
                cur[i] = e;
                rec(ring, i + 1, left - e * dg, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if d == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(self, 0, d, &mut cur, &mut out);
        out.sort();
        out
    }

    pub fn zero(&self) -> F2Poly {
        F2Poly { ring: self.clone(), terms: BTreeSet::new() }
    }

    pub fn one(&self) -> F2Poly {
        self.monomial(Monomial(vec![0; self.ngens()]))
    }

    pub fn gen(&self, i: usize) -> F2Poly {
        let mut e = vec![0; self.ngens()];
        e[i] = 1;
        self.monomial(Monomial(e))
    }

    pub fn gen_named(&self, name: &str) -> Result<F2Poly> {
        self.index_of(name).map(|i| self.gen(i)).ok_or_else(|| Error::Parse(format!("unknown generator {name}")))
    }

    pub fn monomial(&self, m: Monomial) -> F2Poly {
        assert_eq!(m.0.len(), self.ngens());
        F2Poly { ring: self.clone(), terms: BTreeSet::from([m]) }
    }

    pub fn parse(&self, s: &str) -> Result<F2Poly> {
        F2Poly::parse(self, s)
    }
}

fn valid_name(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic()) && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

/// Exponent vector, one entry per generator. Ordered lexicographically by generator index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Element of a [`WeightedPolyRing`]: a set of monomials (coefficients are F₂).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct F2Poly {
    ring: WeightedPolyRing,
    terms: BTreeSet<Monomial>,
}

impl F2Poly {
    pub fn ring(&self) -> &WeightedPolyRing {
        &self.ring
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    pub fn from_monomials(ring: &WeightedPolyRing, ms: impl IntoIterator<Item = Monomial>) -> F2Poly {
        let mut p = ring.zero();
        for m in ms {
            p.toggle(m);
        }
        p
    }

    pub fn toggle(&mut self, m: Monomial) {
        debug_assert_eq!(m.0.len(), self.ring.ngens());
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    fn check_ring(&self, other: &F2Poly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &F2Poly) -> Result<F2Poly> {
        self.check_ring(other)?;
        Ok(F2Poly { ring: self.ring.clone(), terms: self.terms.symmetric_difference(&other.terms).cloned().collect() })
    }

    pub fn try_mul(&self, other: &F2Poly) -> Result<F2Poly> {
        self.check_ring(other)?;
        let mut acc: HashSet<Monomial> = HashSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let m = a.mul(b);
                if !acc.remove(&m) {
                    acc.insert(m);
                }
            }
        }
        Ok(F2Poly { ring: self.ring.clone(), terms: acc.into_iter().collect() })
    }

    pub fn add_assign(&mut self, other: &F2Poly) {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }

    /// Frobenius: squaring is additive in characteristic 2.
    pub fn square(&self) -> F2Poly {
        F2Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|m| Monomial(m.0.iter().map(|e| 2 * e).collect())).collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> F2Poly {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Weighted degree if the polynomial is nonzero and homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|m| self.ring.monomial_degree(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.iter().map(|m| self.ring.monomial_degree(m)).max()
    }

    pub fn homogeneous_part(&self, d: u32) -> F2Poly {
        F2Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|m| self.ring.monomial_degree(m) == d).cloned().collect(),
        }
    }

    /// Partition into homogeneous slices.
    pub fn parts(&self) -> BTreeMap<u32, F2Poly> {
        let mut out: BTreeMap<u32, F2Poly> = BTreeMap::new();
        for m in &self.terms {
            out.entry(self.ring.monomial_degree(m)).or_insert_with(|| self.ring.zero()).terms.insert(m.clone());
        }
        out
    }

    /// Drop every monomial of degree above `d`.
    pub fn truncate(&self, d: u32) -> F2Poly {
        F2Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|m| self.ring.monomial_degree(m) <= d).cloned().collect(),
        }
    }

    /// Ring homomorphism sending generator i to `images[i]`.
    pub fn substitute(&self, target: &WeightedPolyRing, images: &[F2Poly]) -> Result<F2Poly> {
        if images.len() != self.ring.ngens() {
            return Err(Error::Dimension { expected: self.ring.ngens(), got: images.len() });
        }
        if images.iter().any(|p| p.ring != *target) {
            return Err(Error::RingMismatch);
        }
        let mut powers: Vec<BTreeMap<u32, F2Poly>> = vec![BTreeMap::new(); images.len()];
        let mut out = target.zero();
        for m in &self.terms {
            let mut t = target.one();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers[i].entry(e).or_insert_with(|| images[i].pow(e)).clone();
                t = &t * &p;
                if t.is_zero() {
                    break;
                }
            }
            out.add_assign(&t);
        }
        Ok(out)
    }

    pub fn parse(ring: &WeightedPolyRing, s: &str) -> Result<F2Poly> {
        let toks = tokenize(s)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Parser { ring, toks, pos: 0 };
        let v = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("unexpected token {:?}", p.toks[p.pos])));
        }
        Ok(v)
    }

    pub fn format_monomial(ring: &WeightedPolyRing, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, &e)| if e == 1 { ring.name(i).to_string() } else { format!("{}^{}", ring.name(i), e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.terms.iter().rev().map(|m| F2Poly::format_monomial(&self.ring, m)).collect();
        write!(f, "{}", s.join(" + "))
    }
}

impl std::ops::Add for &F2Poly {
    type Output = F2Poly;
    fn add(self, rhs: &F2Poly) -> F2Poly {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl std::ops::Mul for &F2Poly {
    type Output = F2Poly;
    fn mul(self, rhs: &F2Poly) -> F2Poly {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Int(u64),
    Plus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let st = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let v: String = cs[st..i].iter().collect();
                out.push(Tok::Int(v.parse().map_err(|_| Error::Parse(format!("bad integer {v}")))?));
            }
            c if c.is_ascii_alphabetic() => {
                let st = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Name(cs[st..i].iter().collect()));
            }
            _ => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a WeightedPolyRing,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn sum(&mut self) -> Result<F2Poly> {
        let mut acc = self.product()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            acc = &acc + &self.product()?;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<F2Poly> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<F2Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Int(e)) => {
                    self.pos += 1;
                    let e = u32::try_from(e).map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                t => Err(Error::Parse(format!("expected exponent, found {t:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<F2Poly> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match t {
            Some(Tok::Name(n)) => self.ring.gen_named(&n),
            Some(Tok::Int(v)) => Ok(if v % 2 == 1 { self.ring.one() } else { self.ring.zero() }),
            Some(Tok::LParen) => {
                let v = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            t => Err(Error::Parse(format!("unexpected {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(gens: &[(&str, u32)]) -> WeightedPolyRing {
        WeightedPolyRing::new(gens).unwrap()
    }

    #[test]
    fn frobenius_and_product_of_three() {
        let r = ring(&[("x1", 1), ("x2", 1)]);
        let p = r.parse("1+x2").unwrap();
        assert_eq!(&p * &p, r.parse("1+x2^2").unwrap());
        let lhs = &(&r.parse("1+x1").unwrap() * &r.parse("1+x2").unwrap()) * &r.parse("1+x1+x2").unwrap();
        let rhs = r.parse("1 + (x1^2+x1*x2+x2^2) + (x1^2*x2+x1*x2^2)").unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn print_order() {
        let r = ring(&[("t2", 2), ("t3", 3), ("t8", 8), ("t12", 12)]);
        let p = r.parse("t8 +   t3*t2^2").unwrap();
        assert_eq!(p.to_string(), "t2^2*t3 + t8");
        assert_eq!(r.parse(&p.to_string()).unwrap(), p);
        assert_eq!(r.zero().to_string(), "0");
        assert_eq!(r.parse("t2 + t2").unwrap().to_string(), "0");
    }

    #[test]
    fn ring_mismatch_and_bad_names() {
        let a = ring(&[("x", 1)]);
        let b = ring(&[("y", 1)]);
        assert_eq!(a.gen(0).try_mul(&b.gen(0)), Err(Error::RingMismatch));
        assert!(WeightedPolyRing::new(&[("x", 1), ("x", 2)]).is_err());
        assert!(WeightedPolyRing::new(&[("x", 0)]).is_err());
        assert!(a.parse("x +").is_err());
        assert!(a.parse("z").is_err());
    }

    #[test]
    fn slices_and_substitution() {
        let r = ring(&[("a", 2), ("b", 3)]);
        let p = r.parse("a + b + a*b + 1").unwrap();
        let parts = p.parts();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![0, 2, 3, 5]);
        assert_eq!(r.monomials_of_degree(6).len(), 2);
        let s = ring(&[("x", 1)]);
        let img = [s.parse("x^2").unwrap(), s.parse("x^3").unwrap()];
        assert_eq!(p.substitute(&s, &img).unwrap(), s.parse("1+x^2+x^3+x^5").unwrap());
    }
}
