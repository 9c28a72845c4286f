//! The mod-2 Steenrod algebra in the admissible (Serre–Cartan) basis.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::f2core::binom_mod2;

/// A word Sq^{i1} Sq^{i2} ... with every entry positive. Empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SqWord(Vec<u32>);

impl SqWord {
    /// Zero entries are elided (Sq⁰ = 1).
    pub fn new(entries: impl IntoIterator<Item = u32>) -> Self {
        SqWord(entries.into_iter().filter(|e| *e > 0).collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= 2 * w[1])
    }
}

/// Admissible sequence: i_j ≥ 2 i_{j+1}.
///
/// Ordered by length first, then lexicographically starting from the rightmost entry.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, serde::Serialize)]
pub struct AdmissibleSeq(Vec<u32>);

impl AdmissibleSeq {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let w = SqWord::new(entries.iter().copied());
        if w.0.len() != entries.len() || !w.is_admissible() {
            return Err(Error::Invalid(format!("{entries:?} is not admissible")));
        }
        Ok(AdmissibleSeq(entries))
    }

    pub fn unit() -> Self {
        AdmissibleSeq(vec![])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// i₁ − i₂ − … − i_r, which equals Σ_j (i_j − 2i_{j+1}).
    pub fn excess(&self) -> u32 {
        self.0.first().map_or(0, |f| 2 * f - self.degree())
    }

    pub fn as_word(&self) -> SqWord {
        SqWord(self.0.clone())
    }
}

/// Basis order on sequences: longer is greater; equal lengths compare from the right.
pub fn right_lex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

impl Ord for AdmissibleSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        right_lex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for AdmissibleSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_seq(s: &[u32]) -> String {
    if s.is_empty() {
        "1".into()
    } else {
        format!("Sq[{}]", s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
    }
}

impl fmt::Display for AdmissibleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_seq(&self.0))
    }
}

impl fmt::Display for SqWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_seq(&self.0))
    }
}

/// Element of A: a set of admissible monomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SteenrodElt {
    terms: BTreeSet<AdmissibleSeq>,
}

impl SteenrodElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_adm(AdmissibleSeq::unit())
    }

    pub fn from_adm(a: AdmissibleSeq) -> Self {
        SteenrodElt { terms: BTreeSet::from([a]) }
    }

    /// Sq^n as an element (Sq⁰ = 1).
    pub fn sq(n: u32) -> Self {
        if n == 0 {
            Self::one()
        } else {
            Self::from_adm(AdmissibleSeq(vec![n]))
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = AdmissibleSeq>) -> Self {
        let mut s = Self::zero();
        for t in terms {
            s.toggle(t);
        }
        s
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &AdmissibleSeq> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn contains(&self, a: &AdmissibleSeq) -> bool {
        self.terms.contains(a)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, a: AdmissibleSeq) {
        if !self.terms.remove(&a) {
            self.terms.insert(a);
        }
    }

    pub fn add_assign(&mut self, other: &SteenrodElt) {
        for t in &other.terms {
            self.toggle(t.clone());
        }
    }

    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|t| t.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Counit: coefficient of the unit.
    pub fn counit(&self) -> bool {
        self.terms.contains(&AdmissibleSeq::unit())
    }
}

impl fmt::Display for SteenrodElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let s: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&s.join(" + "))
    }
}

impl std::ops::Add for &SteenrodElt {
    type Output = SteenrodElt;
    fn add(self, rhs: &SteenrodElt) -> SteenrodElt {
        let mut s = self.clone();
        s.add_assign(rhs);
        s
    }
}

impl std::ops::Mul for &SteenrodElt {
    type Output = SteenrodElt;
    fn mul(self, rhs: &SteenrodElt) -> SteenrodElt {
        multiply(self, rhs)
    }
}

/// Terms of the Adem relation for Sq^m Sq^n with m < 2n: pairs (m+n−i, i), i = 0 means a single Sq.
pub fn adem_terms(m: u32, n: u32) -> Vec<(u32, u32)> {
    debug_assert!(m < 2 * n);
    (0..=m / 2)
        .filter(|&i| binom_mod2((n - i - 1) as u64, (m - 2 * i) as u64))
        .map(|i| (m + n - i, i))
        .collect()
}

/// Which inadmissible pair to rewrite first.
#[derive(Clone, Copy, Debug)]
pub enum RewriteStrategy {
    Leftmost,
    Rightmost,
    /// Pseudo-random choice among inadmissible positions, seeded.
    Shuffled(u64),
}

type Cache = RwLock<HashMap<Vec<u32>, Arc<Vec<AdmissibleSeq>>>>;

fn normalize_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn rewrite_at(w: &[u32], i: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
    adem_terms(w[i], w[i + 1]).into_iter().map(move |(a, b)| {
        let mut v = Vec::with_capacity(w.len());
        v.extend_from_slice(&w[..i]);
        v.push(a);
        if b > 0 {
            v.push(b);
        }
        v.extend_from_slice(&w[i + 2..]);
        v
    })
}

fn normalize_leftmost(w: &[u32]) -> Arc<Vec<AdmissibleSeq>> {
    if let Some(hit) = normalize_cache().read().unwrap().get(w) {
        return hit.clone();
    }
    let res = match w.windows(2).position(|p| p[0] < 2 * p[1]) {
        None => vec![AdmissibleSeq(w.to_vec())],
        Some(i) => {
            let mut acc = BTreeSet::new();
            for v in rewrite_at(w, i) {
                for t in normalize_leftmost(&v).iter() {
                    if !acc.remove(t) {
                        acc.insert(t.clone());
                    }
                }
            }
            acc.into_iter().collect()
        }
    };
    let res = Arc::new(res);
    normalize_cache().write().unwrap().insert(w.to_vec(), res.clone());
    res
}

/// Reduce a word to admissible form via Adem relations (leftmost inadmissible pair first).
pub fn adem_normalize(w: &SqWord) -> SteenrodElt {
    SteenrodElt { terms: normalize_leftmost(&w.0).iter().cloned().collect() }
}

/// Uncached normalization with an explicit rewrite strategy; used to test confluence.
pub fn adem_normalize_with(w: &SqWord, strategy: RewriteStrategy) -> SteenrodElt {
    let mut rng = StdRng::seed_from_u64(match strategy {
        RewriteStrategy::Shuffled(s) => s,
        _ => 0,
    });
    let mut out = SteenrodElt::zero();
    let mut stack = vec![w.0.clone()];
    while let Some(v) = stack.pop() {
        let bad: Vec<usize> = (0..v.len().saturating_sub(1)).filter(|&i| v[i] < 2 * v[i + 1]).collect();
        if bad.is_empty() {
            out.toggle(AdmissibleSeq(v));
            continue;
        }
        let i = match strategy {
            RewriteStrategy::Leftmost => bad[0],
            RewriteStrategy::Rightmost => *bad.last().unwrap(),
            RewriteStrategy::Shuffled(_) => bad[rng.random_range(0..bad.len())],
        };
        stack.extend(rewrite_at(&v, i));
    }
    out
}

pub fn multiply(a: &SteenrodElt, b: &SteenrodElt) -> SteenrodElt {
    let mut out = SteenrodElt::zero();
    for x in &a.terms {
        for y in &b.terms {
            let mut w = x.0.clone();
            w.extend_from_slice(&y.0);
            for t in normalize_leftmost(&w).iter() {
                out.toggle(t.clone());
            }
        }
    }
    out
}

/// Product of a sequence of Sq^{n_i}; convenience for words.
pub fn word(entries: &[u32]) -> SteenrodElt {
    adem_normalize(&SqWord::new(entries.iter().copied()))
}

/// Element of A ⊗ A.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TensorElt {
    terms: BTreeSet<(AdmissibleSeq, AdmissibleSeq)>,
}

impl TensorElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> impl Iterator<Item = &(AdmissibleSeq, AdmissibleSeq)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, a: AdmissibleSeq, b: AdmissibleSeq) {
        let k = (a, b);
        if !self.terms.remove(&k) {
            self.terms.insert(k);
        }
    }

    pub fn add_assign(&mut self, other: &TensorElt) {
        for (a, b) in &other.terms {
            self.toggle(a.clone(), b.clone());
        }
    }

    /// Componentwise product (a⊗b)(c⊗d) = ac⊗bd.
    pub fn mul(&self, other: &TensorElt) -> TensorElt {
        let mut out = TensorElt::zero();
        for (a, b) in &self.terms {
            for (c, d) in &other.terms {
                let left = multiply(&SteenrodElt::from_adm(a.clone()), &SteenrodElt::from_adm(c.clone()));
                if left.is_zero() {
                    continue;
                }
                let right = multiply(&SteenrodElt::from_adm(b.clone()), &SteenrodElt::from_adm(d.clone()));
                for l in left.terms() {
                    for r in right.terms() {
                        out.toggle(l.clone(), r.clone());
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for TensorElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let s: Vec<String> = self.terms.iter().map(|(a, b)| format!("{a} ⊗ {b}")).collect();
        f.write_str(&s.join(" + "))
    }
}

/// All componentwise splittings I = I₁ + I₂ of a word, zeros dropped (before normalization).
pub fn word_splittings(w: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = vec![(vec![], vec![])];
    for &i in w {
        let mut next = Vec::with_capacity(out.len() * (i as usize + 1));
        for (l, r) in &out {
            for a in 0..=i {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                if a > 0 {
                    l2.push(a);
                }
                if i - a > 0 {
                    r2.push(i - a);
                }
                next.push((l2, r2));
            }
        }
        out = next;
    }
    out
}

/// Coproduct of a word, expanded over componentwise splittings and normalized.
pub fn coproduct_word(w: &SqWord) -> TensorElt {
    let mut out = TensorElt::zero();
    for (l, r) in word_splittings(&w.0) {
        let ln = normalize_leftmost(&l);
        if ln.is_empty() {
            continue;
        }
        let rn = normalize_leftmost(&r);
        for a in ln.iter() {
            for b in rn.iter() {
                out.toggle(a.clone(), b.clone());
            }
        }
    }
    out
}

pub fn coproduct(x: &SteenrodElt) -> TensorElt {
    let mut out = TensorElt::zero();
    for t in x.terms() {
        out.add_assign(&coproduct_word(&t.as_word()));
    }
    out
}

type ChiCache = RwLock<HashMap<AdmissibleSeq, SteenrodElt>>;

fn chi_cache() -> &'static ChiCache {
    static C: OnceLock<ChiCache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn antipode_basis(a: &AdmissibleSeq) -> SteenrodElt {
    if a.0.is_empty() {
        return SteenrodElt::one();
    }
    if let Some(hit) = chi_cache().read().unwrap().get(a) {
        return hit.clone();
    }
    // Σ χ(x′)x″ = 0, so χ(x) = Σ_{deg x″ > 0} χ(x′)x″.
    let mut out = SteenrodElt::zero();
    for (l, r) in coproduct_word(&a.as_word()).terms() {
        if r.0.is_empty() {
            continue;
        }
        out.add_assign(&multiply(&antipode_basis(l), &SteenrodElt::from_adm(r.clone())));
    }
    chi_cache().write().unwrap().insert(a.clone(), out.clone());
    out
}

pub fn antipode(x: &SteenrodElt) -> SteenrodElt {
    let mut out = SteenrodElt::zero();
    for t in x.terms() {
        out.add_assign(&antipode_basis(t));
    }
    out
}

/// Admissible sequences of degree n, in canonical order.
pub fn basis(n: u32) -> Vec<AdmissibleSeq> {
    // Build from the right: choose the last entry, then each earlier entry is ≥ twice its successor.
    fn rec(left: u32, min_first: u32, suffix: &mut Vec<u32>, out: &mut Vec<AdmissibleSeq>) {
        if left == 0 {
            let mut v = suffix.clone();
            v.reverse();
            out.push(AdmissibleSeq(v));
            return;
        }
        for i in min_first.max(1)..=left {
            suffix.push(i);
            rec(left - i, 2 * i, suffix, out);
            suffix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Expression tree over the generators Sq^{2^k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SqExpr {
    One,
    Gen(u32),
    Sum(Vec<SqExpr>),
    Prod(Vec<SqExpr>),
}

impl SqExpr {
    pub fn eval(&self) -> SteenrodElt {
        match self {
            SqExpr::One => SteenrodElt::one(),
            SqExpr::Gen(n) => SteenrodElt::sq(*n),
            SqExpr::Sum(v) => v.iter().fold(SteenrodElt::zero(), |acc, e| &acc + &e.eval()),
            SqExpr::Prod(v) => v.iter().fold(SteenrodElt::one(), |acc, e| multiply(&acc, &e.eval())),
        }
    }

    /// Generators appearing in the tree.
    pub fn generators(&self) -> BTreeSet<u32> {
        match self {
            SqExpr::One => BTreeSet::new(),
            SqExpr::Gen(n) => BTreeSet::from([*n]),
            SqExpr::Sum(v) | SqExpr::Prod(v) => v.iter().flat_map(|e| e.generators()).collect(),
        }
    }
}

impl fmt::Display for SqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqExpr::One => f.write_str("1"),
            SqExpr::Gen(n) => write!(f, "Sq[{n}]"),
            SqExpr::Sum(v) => {
                let s: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", s.join(" + "))
            }
            SqExpr::Prod(v) => {
                let s: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                f.write_str(&s.join("*"))
            }
        }
    }
}

/// Write Sq^n as a polynomial in the Sq^{2^k}, by descending on the top power of two below n.
pub fn express_in_2power_generators(n: u32) -> Result<SqExpr> {
    if n == 0 {
        return Err(Error::Invalid("Sq^0 is the unit, not a generator".into()));
    }
    Ok(descend(n))
}

fn descend(n: u32) -> SqExpr {
    if n.is_power_of_two() {
        return SqExpr::Gen(n);
    }
    let p = 1u32 << (31 - n.leading_zeros());
    let m = n - p;
    // Sq^m Sq^p = Sq^n + Σ_{c≥1} C(p−c−1, m−2c) Sq^{n−c} Sq^c
    let mut terms = vec![SqExpr::Prod(vec![descend(m), SqExpr::Gen(p)])];
    for c in 1..=m / 2 {
        if binom_mod2((p - c - 1) as u64, (m - 2 * c) as u64) {
            terms.push(SqExpr::Prod(vec![descend(n - c), descend(c)]));
        }
    }
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        SqExpr::Sum(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adm(v: &[u32]) -> AdmissibleSeq {
        AdmissibleSeq::new(v.to_vec()).unwrap()
    }

    fn el(ts: &[&[u32]]) -> SteenrodElt {
        SteenrodElt::from_terms(ts.iter().map(|t| adm(t)))
    }

    #[test]
    fn adem_examples() {
        assert_eq!(word(&[1, 2]), el(&[&[3]]));
        assert_eq!(word(&[2, 2]), el(&[&[3, 1]]));
        assert_eq!(word(&[2, 3]), el(&[&[4, 1], &[5]]));
        assert_eq!(word(&[1, 1]), SteenrodElt::zero());
        assert_eq!(word(&[2, 2, 2]), el(&[&[5, 1]]));
        assert_eq!(word(&[0, 2, 0]), el(&[&[2]]));
    }

    #[test]
    fn splittings_count() {
        assert_eq!(word_splittings(&[3, 5, 2]).len(), 72);
    }

    #[test]
    fn small_coproducts_and_antipodes() {
        assert_eq!(coproduct(&SteenrodElt::sq(1)).to_string(), "1 ⊗ Sq[1] + Sq[1] ⊗ 1");
        assert_eq!(coproduct(&SteenrodElt::one()).to_string(), "1 ⊗ 1");
        assert_eq!(antipode(&SteenrodElt::sq(1)), SteenrodElt::sq(1));
        assert_eq!(antipode(&SteenrodElt::sq(2)), SteenrodElt::sq(2));
        assert_eq!(antipode(&SteenrodElt::sq(3)), el(&[&[2, 1]]));
    }

    #[test]
    fn basis_and_order() {
        assert_eq!(basis(0), vec![AdmissibleSeq::unit()]);
        assert_eq!(basis(3), vec![adm(&[3]), adm(&[2, 1])]);
        let mut v = vec![vec![0, 0, 1], vec![4, 1], vec![5], vec![0, 2], vec![3, 1]];
        v.sort_by(|a, b| right_lex_cmp(a, b));
        assert_eq!(v, vec![vec![5], vec![3, 1], vec![4, 1], vec![0, 2], vec![0, 0, 1]]);
    }

    #[test]
    fn generation_descent() {
        let e = express_in_2power_generators(3).unwrap();
        assert_eq!(e, SqExpr::Prod(vec![SqExpr::Gen(1), SqExpr::Gen(2)]));
        assert_eq!(express_in_2power_generators(8).unwrap(), SqExpr::Gen(8));
        for n in 1..=40 {
            let e = express_in_2power_generators(n).unwrap();
            assert_eq!(e.eval(), SteenrodElt::sq(n), "n={n}");
            assert!(e.generators().iter().all(|g| g.is_power_of_two()));
        }
        assert!(express_in_2power_generators(0).is_err());
    }

    #[test]
    fn excess() {
        assert_eq!(adm(&[4, 2, 1]).excess(), 1);
        assert_eq!(adm(&[5, 1]).excess(), 4);
    }
}
