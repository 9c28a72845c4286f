//! Stiefel–Whitney classes as symmetric functions in degree-one roots, the
//! quotient presentations of H*BSO, H*BSpin and H*BSpin^c, and their primitives.
//!
//! Internally a w-monomial is its multiset of indices stored as a descending
//! byte string, so w₁w₂² is `[2, 2, 1]`. Public values are [`F2Poly`]s in the
//! ring F₂[w₁, …, w_N].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::cartan::{wu_terms, SqAlgebraPresentation};
use crate::error::{Error, Result};
use crate::f2core::{alpha, F2Poly, F2Vector, Monomial, WeightedPolyRing};
use crate::steenrod;

type Mono = Vec<u8>;
type Poly = FxHashSet<Mono>;
type Tensor = FxHashSet<(Mono, Mono)>;

/// Largest supported degree (monomial parts are stored as bytes).
pub const MAX_CAP: u32 = 128;
/// Cap used by the shared presentations behind [`primitives`].
pub const DEFAULT_CAP: u32 = 64;

/// Degrees up to this are solved by the full reduced-coproduct kernel by
/// default; chosen so that each space stays within a few seconds at cap 64.
pub fn default_literal_max(space: Space) -> u32 {
    match space {
        Space::Bo => 24,
        Space::Bso => 32,
        Space::Bspin => 64,
        Space::Bspinc => 40,
    }
}

fn toggle<T: Hash + Eq>(s: &mut FxHashSet<T>, x: T) {
    if !s.remove(&x) {
        s.insert(x);
    }
}

fn mono_mul(a: &[u8], b: &[u8]) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] >= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}


fn mono_square(m: &[u8]) -> Mono {
    m.iter().flat_map(|&p| [p, p]).collect()
}

fn one() -> Poly {
    std::iter::once(Vec::new()).collect()
}

fn single(m: Mono) -> Poly {
    std::iter::once(m).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::default();
    for x in a {
        for y in b {
            toggle(&mut out, mono_mul(x, y));
        }
    }
    out
}

fn poly_add_assign(a: &mut Poly, b: &Poly) {
    for m in b {
        toggle(a, m.clone());
    }
}

fn poly_square(a: &Poly) -> Poly {
    a.iter().map(|m| mono_square(m)).collect()
}

fn poly_pow2(a: &Poly, times: u32) -> Poly {
    (0..times).fold(a.clone(), |p, _| poly_square(&p))
}

/// Descending partitions of `n` with every part accepted by `allowed`.
fn partitions(n: u32, allowed: &dyn Fn(u32) -> bool) -> Vec<Mono> {
    fn go(n: u32, max: u32, allowed: &dyn Fn(u32) -> bool, cur: &mut Mono, out: &mut Vec<Mono>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(n)).rev() {
            if allowed(p) {
                cur.push(p as u8);
                go(n - p, p, allowed, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, n, allowed, &mut Vec::new(), &mut out);
    out
}

fn is_two_power_plus_one(n: u32) -> bool {
    n >= 2 && (n - 1).is_power_of_two()
}

/// Ring F₂[w₁, …, w_n] with deg w_i = i.
pub fn w_ring(n: u32) -> WeightedPolyRing {
    let gens: Vec<(String, u32)> = (1..=n).map(|i| (format!("w{i}"), i)).collect();
    WeightedPolyRing::new(&gens).expect("valid ring")
}

fn to_f2(ring: &WeightedPolyRing, p: &Poly) -> F2Poly {
    let n = ring.ngens();
    F2Poly::from_monomials(
        ring,
        p.iter().map(|m| {
            let mut e = vec![0u32; n];
            for &part in m {
                e[part as usize - 1] += 1;
            }
            Monomial(e)
        }),
    )
}

fn from_f2(p: &F2Poly) -> Result<Poly> {
    let ring = p.ring();
    let mut out = Poly::default();
    for m in p.terms() {
        let mut parts = Mono::new();
        for (i, &e) in m.exponents().iter().enumerate().rev() {
            let name = ring.name(i);
            let idx: u32 = name
                .strip_prefix('w')
                .and_then(|s| s.parse().ok())
                .filter(|&k| k == ring.degree(i) && k <= MAX_CAP)
                .ok_or_else(|| Error::Invalid(format!("{name} is not a Stiefel–Whitney generator")))?;
            parts.extend(std::iter::repeat_n(idx as u8, e as usize));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        toggle(&mut out, parts);
    }
    Ok(out)
}

/// Collects the monomials of `vectors` into coordinates and returns the
/// combinations of the input vectors that vanish (a kernel basis, as index sets).
fn dependencies(vectors: &[Poly]) -> Vec<Vec<usize>> {
    let mut index: FxHashMap<&Mono, usize> = FxHashMap::default();
    for v in vectors {
        for m in v {
            let k = index.len();
            index.entry(m).or_insert(k);
        }
    }
    let dense: Vec<Vec<usize>> = vectors.iter().map(|v| v.iter().map(|m| index[m]).collect()).collect();
    dependencies_sparse(&dense, index.len())
}

fn dependencies_sparse(vectors: &[Vec<usize>], len: usize) -> Vec<Vec<usize>> {
    let k = vectors.len();
    let mut pivots: HashMap<usize, (F2Vector, F2Vector)> = HashMap::new();
    let mut out = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut vec = F2Vector::from_support(len, v.iter().copied());
        let mut comb = F2Vector::from_support(k, [i]);
        loop {
            match vec.first_one() {
                None => {
                    out.push(comb.support().collect());
                    break;
                }
                Some(p) => match pivots.get(&p) {
                    Some((pv, pc)) => {
                        vec.add_assign(pv);
                        comb.add_assign(pc);
                    }
                    None => {
                        pivots.insert(p, (vec, comb));
                        break;
                    }
                },
            }
        }
    }
    out
}

fn rank(vectors: &[Poly]) -> usize {
    vectors.len() - dependencies(vectors).len()
}

fn same_span(a: &[Poly], b: &[Poly]) -> bool {
    let ra = rank(a);
    let rb = rank(b);
    let both: Vec<Poly> = a.iter().chain(b).cloned().collect();
    ra == rb && rank(&both) == ra
}

// ---------------------------------------------------------------------------
// Power sums

/// Integer polynomial in the w's; keys are descending partitions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntWPoly {
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntWPoly {
    pub fn coefficient(&self, parts: &[u32]) -> BigInt {
        let mut key = parts.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reduce_mod2(&self, ring: &WeightedPolyRing) -> F2Poly {
        let two = BigInt::from(2);
        let p: Poly = self
            .terms
            .iter()
            .filter(|(_, c)| (*c % &two) != BigInt::from(0))
            .map(|(k, _)| k.iter().map(|&x| x as u8).collect())
            .collect();
        to_f2(ring, &p)
    }
}

impl fmt::Display for IntWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| b.cmp(a)));
        for (i, k) in keys.into_iter().enumerate() {
            let c = &self.terms[k];
            let neg = c.sign() == num_bigint::Sign::Minus;
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for &p in k {
                *counts.entry(p).or_default() += 1;
            }
            let body: Vec<String> =
                counts.iter().map(|(p, e)| if *e == 1 { format!("w{p}") } else { format!("w{p}^{e}") }).collect();
            if mag != BigInt::from(1) {
                write!(f, "{mag}*")?;
            }
            write!(f, "{}", body.join("*"))?;
        }
        Ok(())
    }
}

/// Newton's identities modulo `modulus` (2 or 4): s_n = Σ_{i<n} (−1)^{i−1} w_i s_{n−i} + (−1)^{n−1} n w_n.
fn power_sums_mod(modulus: u8, n_max: u32, drop_w1: bool) -> Vec<FxHashMap<Mono, u8>> {
    let m = modulus as u32;
    let mut s: Vec<FxHashMap<Mono, u8>> = vec![FxHashMap::default()];
    for n in 1..=n_max {
        let mut cur: FxHashMap<Mono, u8> = FxHashMap::default();
        let lo = if drop_w1 { 2 } else { 1 };
        for i in lo..n {
            let sign = if i % 2 == 1 { 1 } else { m - 1 };
            for (mono, c) in &s[(n - i) as usize] {
                let key = mono_mul(&[i as u8], mono);
                let e = cur.entry(key).or_insert(0);
                *e = ((*e as u32 + sign * *c as u32) % m) as u8;
            }
        }
        if n >= lo {
            let sign = if n % 2 == 1 { 1 } else { m - 1 };
            let e = cur.entry(vec![n as u8]).or_insert(0);
            *e = ((*e as u32 + sign * (n % m)) % m) as u8;
        }
        cur.retain(|_, c| *c != 0);
        s.push(cur);
    }
    s
}

/// s_{n,n} mod 2 as (s_n² − s_{2n})/2, computed with coefficients mod 4.
fn s_nn_from(s4: &[FxHashMap<Mono, u8>], n: u32) -> Result<Poly> {
    let sn = &s4[n as usize];
    let mut sq: FxHashMap<Mono, u8> = FxHashMap::default();
    for (a, ca) in sn {
        for (b, cb) in sn {
            let e = sq.entry(mono_mul(a, b)).or_insert(0);
            *e = ((*e as u32 + *ca as u32 * *cb as u32) % 4) as u8;
        }
    }
    for (m, c) in &s4[2 * n as usize] {
        let e = sq.entry(m.clone()).or_insert(0);
        *e = ((*e as u32 + 4 - *c as u32) % 4) as u8;
    }
    let mut out = Poly::default();
    for (m, c) in sq {
        match c {
            0 => {}
            2 => {
                out.insert(m);
            }
            _ => return Err(Error::Internal(format!("s_{{{n},{n}}}: odd coefficient before halving"))),
        }
    }
    Ok(out)
}

/// Power sums of N degree-one roots written in their elementary symmetric functions w_i.
#[derive(Clone, Debug)]
pub struct SymFunContext {
    n_vars: u32,
    ring: WeightedPolyRing,
}

impl SymFunContext {
    pub fn new(n_vars: u32) -> Result<Self> {
        if n_vars == 0 || n_vars > MAX_CAP {
            return Err(Error::Invalid(format!("variable count must be in 1..={MAX_CAP}")));
        }
        Ok(SymFunContext { n_vars, ring: w_ring(n_vars) })
    }

    pub fn n_vars(&self) -> u32 {
        self.n_vars
    }

    pub fn ring(&self) -> &WeightedPolyRing {
        &self.ring
    }

    fn check(&self, n: u32) -> Result<()> {
        if n > self.n_vars {
            return Err(Error::DegreeCap { requested: n, cap: self.n_vars });
        }
        Ok(())
    }

    /// s_n over ℤ.
    pub fn power_sum_int(&self, n: u32) -> Result<IntWPoly> {
        self.check(n)?;
        let mut s: Vec<BTreeMap<Vec<u32>, BigInt>> = vec![BTreeMap::new()];
        for k in 1..=n {
            let mut cur: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
            for i in 1..k {
                let sign = if i % 2 == 1 { 1 } else { -1 };
                for (mono, c) in &s[(k - i) as usize] {
                    let mut key = mono.clone();
                    key.push(i);
                    key.sort_unstable_by(|a, b| b.cmp(a));
                    *cur.entry(key).or_default() += c * sign;
                }
            }
            let sign: i64 = if k % 2 == 1 { 1 } else { -1 };
            *cur.entry(vec![k]).or_default() += BigInt::from(sign * k as i64);
            cur.retain(|_, c| *c != BigInt::from(0));
            s.push(cur);
        }
        Ok(IntWPoly { terms: s.pop().unwrap_or_default() })
    }

    /// s_n mod 2.
    pub fn power_sum(&self, n: u32) -> Result<F2Poly> {
        self.check(n)?;
        let s = power_sums_mod(2, n, false);
        Ok(to_f2(&self.ring, &s[n as usize].keys().cloned().collect()))
    }

    /// The monomial symmetric function Σ_{i<j} x_i^n x_j^n mod 2.
    pub fn s_nn(&self, n: u32) -> Result<F2Poly> {
        self.check(2 * n)?;
        let s4 = power_sums_mod(4, 2 * n, false);
        Ok(to_f2(&self.ring, &s_nn_from(&s4, n)?))
    }

    pub fn w(&self, i: u32) -> Result<F2Poly> {
        self.check(i)?;
        Ok(self.ring.gen(i as usize - 1))
    }
}

// ---------------------------------------------------------------------------
// Classifying spaces

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Space {
    Bo,
    Bso,
    Bspin,
    Bspinc,
}

impl Space {
    pub const ALL: [Space; 4] = [Space::Bo, Space::Bso, Space::Bspin, Space::Bspinc];

    pub fn name(self) -> &'static str {
        match self {
            Space::Bo => "BO",
            Space::Bso => "BSO",
            Space::Bspin => "BSpin",
            Space::Bspinc => "BSpinc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['^', '_', '-'], "").as_str() {
            "bo" => Ok(Space::Bo),
            "bso" => Ok(Space::Bso),
            "bspin" => Ok(Space::Bspin),
            "bspinc" => Ok(Space::Bspinc),
            _ => Err(Error::Parse(format!("unknown space {s:?} (expected BO, BSO, BSpin or BSpinc)"))),
        }
    }

    /// Whether w_n survives as a polynomial generator of the quotient.
    pub fn has_generator(self, n: u32) -> bool {
        match self {
            Space::Bo => n >= 1,
            Space::Bso => n >= 2,
            Space::Bspin => n >= 4 && !is_two_power_plus_one(n),
            Space::Bspinc => n == 2 || (n >= 4 && !is_two_power_plus_one(n)),
        }
    }

    fn drops_w1(self) -> bool {
        self != Space::Bo
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sq^i of a polynomial in H*BO (or H*BSO when `drop_w1`), from the Wu formula and Cartan.
fn sq_mono(i: u32, m: &[u8], drop_w1: bool) -> Poly {
    let iu = i as usize;
    let mut acc: Vec<Poly> = vec![Poly::default(); iu + 1];
    acc[0] = one();
    for &j in m {
        let j = j as u32;
        let mut next: Vec<Poly> = vec![Poly::default(); iu + 1];
        for used in 0..=iu {
            if acc[used].is_empty() {
                continue;
            }
            for a in 0..=j.min(i - used as u32) {
                let mut sqw = Poly::default();
                for (x, y) in wu_terms(a, j) {
                    if drop_w1 && (x == 1 || y == 1) {
                        continue;
                    }
                    let mut parts: Mono = [y as u8, x as u8].into_iter().filter(|&p| p > 0).collect();
                    parts.sort_unstable_by(|a, b| b.cmp(a));
                    toggle(&mut sqw, parts);
                }
                if !sqw.is_empty() {
                    let prod = poly_mul(&acc[used], &sqw);
                    poly_add_assign(&mut next[used + a as usize], &prod);
                }
            }
        }
        acc = next;
    }
    acc.swap_remove(iu)
}

fn sq_poly(i: u32, p: &Poly, drop_w1: bool) -> Poly {
    let mut out = Poly::default();
    for m in p {
        poly_add_assign(&mut out, &sq_mono(i, m, drop_w1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PrimitiveMethod {
    /// Kernel of the reduced coproduct on the whole degree-n slice.
    Literal,
    /// Squares of the half-degree primitives, plus the reduced power sum in odd generator degrees.
    Frobenius,
}

/// Primitives of one degree, compared against the closed formula.
#[derive(Clone, Debug)]
pub struct PrimitiveReport {
    pub space: Space,
    pub degree: u32,
    pub basis: Vec<F2Poly>,
    pub method: PrimitiveMethod,
    pub named_label: Option<String>,
    pub named: Option<F2Poly>,
    pub matches: bool,
}

impl PrimitiveReport {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// H*BO, H*BSO, H*BSpin or H*BSpin^c as a polynomial ring in the surviving w's.
///
/// Killed generators are replaced by polynomials in the surviving ones: for
/// BSpin the chain w₂, w₃ = Sq¹w₂, w₅ ≡ Sq²w₃, w₉ ≡ Sq⁴w₅, … and for BSpin^c the
/// chain starting at w₃. Each killed class w_{2m−1} is read off from
/// Sq^{m−1}(w_m − φ(w_m)), which lies in the ideal.
pub struct ClassifyingSpacePresentation {
    space: Space,
    cap: u32,
    literal_max: u32,
    ring: WeightedPolyRing,
    images: Vec<Option<Poly>>,
    gen_delta: Vec<Vec<(Mono, Mono, u32)>>,
    power_sums: OnceLock<Vec<Poly>>,
    power_sums4: Mutex<Option<Arc<Vec<FxHashMap<Mono, u8>>>>>,
    primitive_cache: Mutex<BTreeMap<u32, (Vec<Poly>, PrimitiveMethod)>>,
}

impl fmt::Debug for ClassifyingSpacePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassifyingSpacePresentation").field("space", &self.space).field("cap", &self.cap).finish()
    }
}

impl ClassifyingSpacePresentation {
    pub fn new(space: Space, cap: u32) -> Result<Self> {
        if cap == 0 || cap > MAX_CAP {
            return Err(Error::Invalid(format!("cap must be in 1..={MAX_CAP}")));
        }
        let mut p = ClassifyingSpacePresentation {
            space,
            cap,
            literal_max: default_literal_max(space),
            ring: w_ring(cap),
            images: vec![None; cap as usize + 1],
            gen_delta: vec![Vec::new(); cap as usize + 1],
            power_sums: OnceLock::new(),
            power_sums4: Mutex::new(None),
            primitive_cache: Mutex::new(BTreeMap::new()),
        };
        if space.drops_w1() {
            p.images[1] = Some(Poly::default());
        }
        let start = match space {
            Space::Bspin => Some(2u32),
            Space::Bspinc => Some(3),
            _ => None,
        };
        if let Some(mut prev) = start {
            if prev <= cap {
                p.images[prev as usize] = Some(Poly::default());
            }
            while 2 * prev - 1 <= cap {
                let target = 2 * prev - 1;
                let mut lift = single(vec![prev as u8]);
                poly_add_assign(&mut lift, p.images[prev as usize].as_ref().expect("killed"));
                let mut rel = sq_poly(prev - 1, &lift, true);
                if !rel.remove(&vec![target as u8]) {
                    return Err(Error::Internal(format!("w{target} missing from its defining relation")));
                }
                let img = p.nf(&rel);
                p.images[target as usize] = Some(img);
                prev = target;
            }
        }
        for g in 1..=cap {
            if !space.has_generator(g) {
                continue;
            }
            let mut d = Vec::new();
            for a in 0..=g {
                let l = p.nf_gen(a);
                let r = p.nf_gen(g - a);
                for x in &l {
                    for y in &r {
                        d.push((x.clone(), y.clone(), a));
                    }
                }
            }
            p.gen_delta[g as usize] = d;
        }
        Ok(p)
    }

    /// Degrees at and below `m` are solved by the full kernel (default [`default_literal_max`]).
    pub fn with_literal_max(mut self, m: u32) -> Self {
        self.literal_max = m;
        self
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn literal_max(&self) -> u32 {
        self.literal_max
    }

    pub fn ring(&self) -> &WeightedPolyRing {
        &self.ring
    }

    fn check(&self, n: u32) -> Result<()> {
        if n > self.cap {
            return Err(Error::DegreeCap { requested: n, cap: self.cap });
        }
        Ok(())
    }

    pub fn generators(&self) -> Vec<u32> {
        (1..=self.cap).filter(|&g| self.space.has_generator(g)).collect()
    }

    fn nf_gen(&self, i: u32) -> Poly {
        if i == 0 {
            return one();
        }
        match &self.images[i as usize] {
            Some(p) => p.clone(),
            None => single(vec![i as u8]),
        }
    }

    fn nf(&self, p: &Poly) -> Poly {
        let mut out = Poly::default();
        for m in p {
            if m.iter().all(|&g| self.images[g as usize].is_none()) {
                toggle(&mut out, m.clone());
                continue;
            }
            let mut acc = one();
            for &g in m {
                acc = poly_mul(&acc, &self.nf_gen(g as u32));
                if acc.is_empty() {
                    break;
                }
            }
            poly_add_assign(&mut out, &acc);
        }
        out
    }

    /// Image of the killed generator w_i in the surviving ones; `None` if w_i survives.
    pub fn relation(&self, i: u32) -> Result<Option<F2Poly>> {
        self.check(i)?;
        Ok(self.images[i as usize].as_ref().map(|p| to_f2(&self.ring, p)))
    }

    /// Reduces a polynomial in w₁, …, w_cap (any ring whose generators are named w_i) to normal form.
    pub fn normal_form(&self, x: &F2Poly) -> Result<F2Poly> {
        let p = from_f2(x)?;
        if p.iter().flatten().any(|&g| g as u32 > self.cap) {
            return Err(Error::DegreeCap { requested: x.max_degree().unwrap_or(0), cap: self.cap });
        }
        Ok(to_f2(&self.ring, &self.nf(&p)))
    }

    /// Sets every killed generator to zero, ignoring the relations.
    pub fn naive_reduction(&self, x: &F2Poly) -> Result<F2Poly> {
        let p = from_f2(x)?;
        let kept: Poly = p.into_iter().filter(|m| m.iter().all(|&g| self.space.has_generator(g as u32))).collect();
        Ok(to_f2(&self.ring, &kept))
    }

    /// Sq^i on the ambient H*BO or H*BSO, followed by reduction.
    pub fn sq(&self, i: u32, x: &F2Poly) -> Result<F2Poly> {
        let p = from_f2(x)?;
        Ok(to_f2(&self.ring, &self.nf(&sq_poly(i, &p, self.space.drops_w1()))))
    }

    pub fn monomial_basis(&self, n: u32) -> Result<Vec<F2Poly>> {
        self.check(n)?;
        Ok(self.basis(n).iter().map(|m| to_f2(&self.ring, &single(m.clone()))).collect())
    }

    fn basis(&self, n: u32) -> Vec<Mono> {
        let space = self.space;
        partitions(n, &|p| space.has_generator(p))
    }

    pub fn dimension(&self, n: u32) -> usize {
        self.basis(n).len()
    }

    /// The part of Δ(m) whose left factor has degree at most `left_max`.
    fn coproduct_mono(&self, m: &[u8], left_max: u32) -> FxHashMap<(Mono, Mono), u32> {
        let mut acc: FxHashMap<(Mono, Mono), u32> = FxHashMap::default();
        acc.insert((Vec::new(), Vec::new()), 0);
        for &g in m {
            let mut next: FxHashMap<(Mono, Mono), u32> = FxHashMap::default();
            for ((l, r), ld) in &acc {
                for (dl, dr, a) in &self.gen_delta[g as usize] {
                    let d = ld + a;
                    if d > left_max {
                        continue;
                    }
                    let key = (mono_mul(l, dl), mono_mul(r, dr));
                    if next.remove(&key).is_none() {
                        next.insert(key, d);
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// Components of Δ̄x in left degrees 1..=⌊n/2⌋. By cocommutativity these
    /// vanish exactly when Δ̄x does.
    fn reduced_coproduct_half(&self, x: &Poly, n: u32) -> Tensor {
        let mut out = Tensor::default();
        for m in x {
            for (key, d) in self.coproduct_mono(m, n / 2) {
                if d >= 1 {
                    toggle(&mut out, key);
                }
            }
        }
        out
    }

    /// Full Δ̄x = Δx − x⊗1 − 1⊗x for homogeneous x in normal form, as (left, right) pairs.
    pub fn reduced_coproduct(&self, x: &F2Poly) -> Result<Vec<(F2Poly, F2Poly)>> {
        let n = self.homogeneous_degree(x)?;
        let p = self.nf(&from_f2(x)?);
        let mut out = Tensor::default();
        for m in &p {
            for (key, d) in self.coproduct_mono(m, n) {
                if d >= 1 && d < n {
                    toggle(&mut out, key);
                }
            }
        }
        let mut v: Vec<(Mono, Mono)> = out.into_iter().collect();
        v.sort();
        Ok(v.into_iter().map(|(l, r)| (to_f2(&self.ring, &single(l)), to_f2(&self.ring, &single(r)))).collect())
    }

    fn homogeneous_degree(&self, x: &F2Poly) -> Result<u32> {
        if !x.is_homogeneous() {
            return Err(Error::Invalid("expected a homogeneous class".into()));
        }
        let n = x.degree().unwrap_or(0);
        self.check(n)?;
        Ok(n)
    }

    /// Literal test Δ̄(x) = 0 in the quotient coalgebra.
    pub fn is_primitive(&self, x: &F2Poly) -> Result<bool> {
        let n = self.homogeneous_degree(x)?;
        let p = self.nf(&from_f2(x)?);
        Ok(self.reduced_coproduct_half(&p, n).is_empty())
    }

    fn literal_primitives(&self, n: u32) -> Vec<Poly> {
        let basis = self.basis(n);
        let mut index: FxHashMap<(Mono, Mono), usize> = FxHashMap::default();
        let mut columns = Vec::with_capacity(basis.len());
        for m in &basis {
            let mut col = Vec::new();
            for (key, d) in self.coproduct_mono(m, n / 2) {
                if d >= 1 {
                    let k = index.len();
                    col.push(*index.entry(key).or_insert(k));
                }
            }
            columns.push(col);
        }
        let mut out: Vec<Poly> = dependencies_sparse(&columns, index.len())
            .into_iter()
            .map(|c| c.into_iter().map(|i| basis[i].clone()).collect())
            .collect();
        out.sort_by_key(|p: &Poly| {
            let mut v: Vec<&Mono> = p.iter().collect();
            v.sort();
            v.into_iter().cloned().collect::<Vec<_>>()
        });
        out
    }

    /// s_k reduced to normal form, k ≤ cap (Newton's identity applied in the quotient ring).
    fn power_sums_nf(&self) -> &Vec<Poly> {
        self.power_sums.get_or_init(|| {
            let mut s: Vec<Poly> = vec![Poly::default()];
            let imgs: Vec<Poly> = (0..=self.cap).map(|i| self.nf_gen(i)).collect();
            for k in 1..=self.cap {
                let cur = if k % 2 == 0 {
                    poly_square(&s[k as usize / 2])
                } else {
                    let mut cur = imgs[k as usize].clone();
                    for i in 1..k {
                        if imgs[i as usize].is_empty() {
                            continue;
                        }
                        poly_add_assign(&mut cur, &poly_mul(&imgs[i as usize], &s[(k - i) as usize]));
                    }
                    cur
                };
                s.push(cur);
            }
            s
        })
    }

    fn s_nn_nf(&self, m: u32) -> Result<Poly> {
        let need = 2 * m;
        let s4 = {
            let mut guard = self.power_sums4.lock().unwrap();
            match guard.as_ref() {
                Some(v) if v.len() > need as usize => v.clone(),
                _ => {
                    let v = Arc::new(power_sums_mod(4, need, self.space.drops_w1()));
                    *guard = Some(v.clone());
                    v
                }
            }
        };
        Ok(self.nf(&s_nn_from(&s4, m)?))
    }

    /// Reduced power sum s_k.
    pub fn power_sum(&self, k: u32) -> Result<F2Poly> {
        self.check(k)?;
        Ok(to_f2(&self.ring, &self.power_sums_nf()[k as usize]))
    }

    /// Reduced s_{m,m}; needs 2m ≤ cap.
    pub fn s_nn(&self, m: u32) -> Result<F2Poly> {
        self.check(2 * m)?;
        Ok(to_f2(&self.ring, &self.s_nn_nf(m)?))
    }

    fn primitive_basis(&self, n: u32) -> (Vec<Poly>, PrimitiveMethod) {
        if let Some(hit) = self.primitive_cache.lock().unwrap().get(&n) {
            return hit.clone();
        }
        let g = |k: u32| self.space.has_generator(k);
        let result = if n == 0 {
            (Vec::new(), PrimitiveMethod::Literal)
        } else if n <= self.literal_max || (n % 2 == 0 && g(n) && !g(n / 2)) {
            (self.literal_primitives(n), PrimitiveMethod::Literal)
        } else {
            // Primitives meet the squares exactly in the squares of primitives, and
            // modulo squares they inject into the indecomposables, which are spanned by
            // w_n when n is a generator degree. For even n with w_{n/2} a generator the
            // dual primitive is a square in the dual, so nothing new appears; for odd n
            // the power sum supplies the new class.
            let mut basis: Vec<Poly> = Vec::new();
            if n % 2 == 0 {
                basis.extend(self.primitive_basis(n / 2).0.iter().map(poly_square));
            } else if g(n) {
                basis.push(self.power_sums_nf()[n as usize].clone());
            }
            (basis, PrimitiveMethod::Frobenius)
        };
        self.primitive_cache.lock().unwrap().insert(n, result.clone());
        result
    }

    /// The closed formula for the degree-n primitive, if the degree admits one.
    fn named(&self, n: u32) -> Result<Option<(String, Poly)>> {
        let s = |k: u32| self.power_sums_nf()[k as usize].clone();
        let odd_part = |n: u32| n >> n.trailing_zeros();
        Ok(match self.space {
            Space::Bo => (n >= 1).then(|| (format!("s_{n}"), s(n))),
            Space::Bso => match n {
                0 | 1 => None,
                2 => Some(("w_2".into(), single(vec![2]))),
                _ if n % 2 == 1 => Some((format!("s_{n}"), s(n))),
                _ => self.named(n / 2)?.map(|(_, p)| (format!("v_{}^2", n / 2), poly_square(&p))),
            },
            Space::Bspin => {
                if n < 4 || is_two_power_plus_one(n) {
                    None
                } else if n % 2 == 1 {
                    Some((format!("s_{n}"), s(n)))
                } else if alpha(n as u64) == 1 {
                    Some((format!("w_4^{}", n / 4), poly_pow2(&single(vec![4]), (n / 4).trailing_zeros())))
                } else if alpha(n as u64) == 2 {
                    let m = odd_part(n);
                    let k = n.trailing_zeros();
                    let base = self.s_nn_nf(m)?;
                    Some((format!("s_{{{m},{m}}}^{}", 1u32 << (k - 1)), poly_pow2(&base, k - 1)))
                } else {
                    self.named(n / 2)?.map(|(_, p)| (format!("z_{}^2", n / 2), poly_square(&p)))
                }
            }
            Space::Bspinc => {
                if n < 2 || (n >= 3 && is_two_power_plus_one(n)) {
                    None
                } else if alpha(n as u64) >= 3 {
                    Some((format!("s_{n}"), s(n)))
                } else if alpha(n as u64) == 2 {
                    let h = n / 2;
                    Some((format!("s_{{{h},{h}}}"), self.s_nn_nf(h)?))
                } else {
                    Some((format!("w_2^{}", n / 2), poly_pow2(&single(vec![2]), (n / 2).trailing_zeros())))
                }
            }
        })
    }

    /// Primitives of degree n, with the method used and the comparison against the closed formula.
    pub fn primitives(&self, n: u32) -> Result<PrimitiveReport> {
        self.check(n)?;
        let (basis, method) = self.primitive_basis(n);
        let named = self.named(n)?;
        let matches = match &named {
            None => basis.is_empty(),
            Some((_, p)) => !p.is_empty() && same_span(&basis, std::slice::from_ref(p)),
        };
        Ok(PrimitiveReport {
            space: self.space,
            degree: n,
            basis: basis.iter().map(|p| to_f2(&self.ring, p)).collect(),
            method,
            named_label: named.as_ref().map(|(l, _)| l.clone()),
            named: named.map(|(_, p)| to_f2(&self.ring, &p)),
            matches,
        })
    }

    /// The full reduced-coproduct kernel in degree n regardless of size.
    pub fn literal_primitive_basis(&self, n: u32) -> Result<Vec<F2Poly>> {
        self.check(n)?;
        Ok(self.literal_primitives(n).iter().map(|p| to_f2(&self.ring, p)).collect())
    }

    /// Compares the ideal generated by A·w₂ (BSpin) or A·w₃ (BSpin^c) inside H*BSO,
    /// built degreewise from every admissible Sq^I, against the kernel of the
    /// normal-form map through degree `max`.
    pub fn ideal_check(&self, max: u32) -> Result<IdealCheck> {
        self.check(max)?;
        let gen = match self.space {
            Space::Bspin => 2u32,
            Space::Bspinc => 3,
            _ => {
                return Ok(IdealCheck { rows: Vec::new(), generators_reduce_to_zero: true });
            }
        };
        let mut module: Vec<(u32, Poly)> = Vec::new();
        for d in (0..=max).take_while(|d| gen + d <= max) {
            for adm in steenrod::basis(d) {
                let mut p = single(vec![gen as u8]);
                for &e in adm.entries().iter().rev() {
                    p = sq_poly(e, &p, true);
                }
                if !p.is_empty() {
                    module.push((gen + d, p));
                }
            }
        }
        let generators_reduce_to_zero = module.iter().all(|(_, p)| self.nf(p).is_empty());
        let mut rows = Vec::new();
        for d in 1..=max {
            let mut span: Vec<Poly> = Vec::new();
            for (e, p) in &module {
                if *e > d {
                    continue;
                }
                for m in partitions(d - e, &|k| k >= 2) {
                    span.push(p.iter().map(|x| mono_mul(x, &m)).collect());
                }
            }
            let ideal_dim = rank(&span);
            let ambient = partitions(d, &|k| k >= 2).len();
            rows.push(IdealRow { degree: d, ambient, ideal: ideal_dim, quotient: self.dimension(d) });
        }
        Ok(IdealCheck { rows, generators_reduce_to_zero })
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct IdealRow {
    pub degree: u32,
    pub ambient: usize,
    pub ideal: usize,
    pub quotient: usize,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct IdealCheck {
    pub rows: Vec<IdealRow>,
    pub generators_reduce_to_zero: bool,
}

impl IdealCheck {
    pub fn holds(&self) -> bool {
        self.generators_reduce_to_zero && self.rows.iter().all(|r| r.ambient == r.ideal + r.quotient)
    }
}

fn shared(space: Space) -> &'static ClassifyingSpacePresentation {
    static CELLS: [OnceLock<ClassifyingSpacePresentation>; 4] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = Space::ALL.iter().position(|s| *s == space).expect("listed");
    CELLS[i].get_or_init(|| ClassifyingSpacePresentation::new(space, DEFAULT_CAP).expect("default cap is valid"))
}

/// Shared presentation with cap [`DEFAULT_CAP`].
pub fn presentation(space: Space) -> &'static ClassifyingSpacePresentation {
    shared(space)
}

pub fn primitives(space: Space, n: u32) -> Result<PrimitiveReport> {
    shared(space).primitives(n)
}

// ---------------------------------------------------------------------------
// Total squares of power sums

#[derive(Clone, Debug, serde::Serialize)]
pub struct LemmaZReport {
    pub k: u32,
    pub total_square_identity: bool,
    pub top_square_identity: bool,
    /// `None` when s_{2^k+1} is beyond the presentation cap.
    pub vanishes_in_bspin: Option<bool>,
}

impl LemmaZReport {
    pub fn holds(&self) -> bool {
        self.total_square_identity && self.top_square_identity && self.vanishes_in_bspin != Some(false)
    }
}

/// For m = 2^k+1: Sq(s_m) = s_m + s_{m+1} + s_{2m−1} + s_{2m} and Sq^{2^k}(s_m) = s_{2m−1},
/// computed on 2^{k+1}+2 degree-one roots; plus the vanishing of s_m in H*BSpin.
pub fn lemma_z_check(k: u32) -> Result<LemmaZReport> {
    if k > 5 {
        return Err(Error::Invalid("k must be at most 5".into()));
    }
    let m = (1u32 << k) + 1;
    let nroots = (1usize << (k + 1)) + 2;
    let names: Vec<String> = (1..=nroots).map(|i| format!("x{i}")).collect();
    let roots = SqAlgebraPresentation::degree_one(&names)?;
    let r = roots.ring();
    let s = |j: u32| {
        let mut p = r.zero();
        for i in 0..nroots {
            let mut e = vec![0u32; nroots];
            e[i] = j;
            p.toggle(Monomial(e));
        }
        p
    };
    let lhs = roots.total_sq(&s(m));
    let rhs = &(&(&s(m) + &s(m + 1)) + &s(2 * m - 1)) + &s(2 * m);
    let top = roots.sq(1 << k, &s(m)) == s(2 * m - 1);
    let bspin = shared(Space::Bspin);
    let vanishes = (m <= bspin.cap()).then(|| bspin.power_sums_nf()[m as usize].is_empty());
    Ok(LemmaZReport { k, total_square_identity: lhs == rhs, top_square_identity: top, vanishes_in_bspin: vanishes })
}

/// s₁₇ with w₁, w₂, w₃, w₅, w₉, w₁₇ set to zero and no further relations.
pub fn s17_naive() -> Result<F2Poly> {
    let ctx = SymFunContext::new(17)?;
    let s = ctx.power_sum(17)?;
    let p = ClassifyingSpacePresentation::new(Space::Bspin, 17)?;
    p.naive_reduction(&s)
}

// ---------------------------------------------------------------------------
// Homology indecomposables of the Spin^c quotient

#[derive(Clone, Debug, serde::Serialize)]
pub struct IndecomposableRow {
    pub degree: u32,
    pub generators: Vec<String>,
    pub expected: usize,
}

impl IndecomposableRow {
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct IndecomposableTable {
    pub rows: Vec<IndecomposableRow>,
}

impl IndecomposableTable {
    pub fn mismatches(&self) -> Vec<&IndecomposableRow> {
        self.rows.iter().filter(|r| r.dimension() != r.expected).collect()
    }

    pub fn holds(&self) -> bool {
        self.mismatches().is_empty()
    }
}

fn is_two_power_pm1(n: u32) -> bool {
    (n + 1).is_power_of_two() || (n >= 2 && (n - 1).is_power_of_two())
}

/// Generators of H_*BSpin^c are x_i² (α(i) < 3) and x_j (α(j) ≥ 3); the subring
/// R is generated by x₁², x₃², and x_{2^k−1} for k ≥ 3. The quotient keeps the
/// remaining generators; this counts them per degree.
pub fn spinc_homology_indecomposables(n_max: u32) -> IndecomposableTable {
    let mut by_degree: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let in_r_square = |i: u32| i == 1 || i == 3;
    let in_r_plain = |j: u32| (j + 1).is_power_of_two() && j >= 7;
    for i in 1..=n_max {
        if alpha(i as u64) < 3 {
            if 2 * i <= n_max && !in_r_square(i) {
                by_degree.entry(2 * i).or_default().push(format!("x{i}^2"));
            }
        } else if !in_r_plain(i) {
            by_degree.entry(i).or_default().push(format!("x{i}"));
        }
    }
    let rows = (1..=n_max)
        .map(|n| IndecomposableRow {
            degree: n,
            generators: by_degree.remove(&n).unwrap_or_default(),
            expected: usize::from(n >= 4 && !is_two_power_pm1(n)),
        })
        .collect();
    IndecomposableTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_count() {
        assert_eq!(partitions(10, &|_| true).len(), 42);
        assert_eq!(partitions(10, &|k| k >= 2).len(), 12);
    }

    #[test]
    fn mono_mul_merges() {
        assert_eq!(mono_mul(&[5, 2], &[3, 2, 1]), vec![5, 3, 2, 2, 1]);
    }

    #[test]
    fn bspin_relations_low() {
        let p = ClassifyingSpacePresentation::new(Space::Bspin, 20).unwrap();
        assert_eq!(p.images[2], Some(Poly::default()));
        assert_eq!(p.images[3], Some(Poly::default()));
        assert_eq!(p.images[5], Some(Poly::default()));
        assert_eq!(p.images[9], Some(Poly::default()));
        let w17 = p.relation(17).unwrap().unwrap();
        assert_eq!(w17, p.ring().parse("w7*w10 + w6*w11 + w4*w13").unwrap());
    }

    #[test]
    fn bspinc_w9() {
        let p = ClassifyingSpacePresentation::new(Space::Bspinc, 12).unwrap();
        assert_eq!(p.relation(9).unwrap().unwrap(), p.ring().parse("w2*w7").unwrap());
        assert!(p.relation(5).unwrap().unwrap().is_zero());
    }
}
