//! The dual Steenrod algebra A_* = F₂[ξ₁, ξ₂, …], its pairing with A,
//! Milnor-basis conversion and the sub-Hopf algebras A(n), E(n).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::f2core::{F2Matrix, F2Vector};
use crate::steenrod::{self, right_lex_cmp, word_splittings, AdmissibleSeq, SqWord, SteenrodElt};

/// ξ₁^{j₁} ξ₂^{j₂} ⋯, stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, serde::Serialize)]
pub struct XiMonomial(Vec<u32>);

impl XiMonomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        XiMonomial(exps)
    }

    pub fn one() -> Self {
        XiMonomial(vec![])
    }

    /// ξ_n^e.
    pub fn xi_pow(n: usize, e: u32) -> Self {
        if n == 0 || e == 0 {
            return Self::one();
        }
        let mut v = vec![0; n];
        v[n - 1] = e;
        XiMonomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().enumerate().map(|(k, j)| j * ((1u32 << (k + 1)) - 1)).sum()
    }

    pub fn mul(&self, other: &XiMonomial) -> XiMonomial {
        let n = self.0.len().max(other.0.len());
        XiMonomial::new((0..n).map(|i| self.0.get(i).unwrap_or(&0) + other.0.get(i).unwrap_or(&0)).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for XiMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        right_lex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for XiMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for XiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        write!(f, "xi[{}]", self.0.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Element of A_*.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DualElt {
    terms: BTreeSet<XiMonomial>,
}

impl DualElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(XiMonomial::one())
    }

    pub fn from_monomial(m: XiMonomial) -> Self {
        DualElt { terms: BTreeSet::from([m]) }
    }

    /// ξ_n (ξ₀ = 1).
    pub fn xi(n: usize) -> Self {
        Self::from_monomial(XiMonomial::xi_pow(n, 1))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &XiMonomial> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, m: XiMonomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &DualElt) {
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }

    pub fn mul(&self, other: &DualElt) -> DualElt {
        let mut out = DualElt::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    pub fn square(&self) -> DualElt {
        DualElt { terms: self.terms.iter().map(|m| XiMonomial(m.0.iter().map(|e| 2 * e).collect())).collect() }
    }

    pub fn pow(&self, mut n: u32) -> DualElt {
        let mut base = self.clone();
        let mut acc = DualElt::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|m| m.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

impl fmt::Display for DualElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let s: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&s.join(" + "))
    }
}

/// Element of A_* ⊗ A_*.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DualTensor {
    terms: BTreeSet<(XiMonomial, XiMonomial)>,
}

impl DualTensor {
    pub fn terms(&self) -> impl Iterator<Item = &(XiMonomial, XiMonomial)> {
        self.terms.iter()
    }

    pub fn toggle(&mut self, a: XiMonomial, b: XiMonomial) {
        let k = (a, b);
        if !self.terms.remove(&k) {
            self.terms.insert(k);
        }
    }

    pub fn one() -> Self {
        let mut t = DualTensor::default();
        t.toggle(XiMonomial::one(), XiMonomial::one());
        t
    }

    pub fn mul(&self, other: &DualTensor) -> DualTensor {
        let mut out = DualTensor::default();
        for (a, b) in &self.terms {
            for (c, d) in &other.terms {
                out.toggle(a.mul(c), b.mul(d));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for DualTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let s: Vec<String> = self.terms.iter().map(|(a, b)| format!("{a} ⊗ {b}")).collect();
        f.write_str(&s.join(" + "))
    }
}

/// μ*(ξ_n)^{2^b} = Σ_i ξ_{n−i}^{2^{i+b}} ⊗ ξ_i^{2^b}.
fn coproduct_xi_power2(n: usize, b: u32) -> DualTensor {
    let mut t = DualTensor::default();
    for i in 0..=n {
        t.toggle(XiMonomial::xi_pow(n - i, 1 << (i as u32 + b)), XiMonomial::xi_pow(i, 1 << b));
    }
    t
}

pub fn dual_coproduct_monomial(m: &XiMonomial) -> DualTensor {
    let mut out = DualTensor::one();
    for (k, &j) in m.0.iter().enumerate() {
        for b in 0..32 {
            if (j >> b) & 1 == 1 {
                out = out.mul(&coproduct_xi_power2(k + 1, b));
            }
        }
    }
    out
}

pub fn dual_coproduct(x: &DualElt) -> DualTensor {
    let mut out = DualTensor::default();
    for m in x.terms() {
        for (a, b) in dual_coproduct_monomial(m).terms {
            out.toggle(a, b);
        }
    }
    out
}

/// ζ_n = χ(ξ_n) expanded in ξ-monomials.
pub fn zeta(n: usize) -> DualElt {
    let mut z = vec![DualElt::one()];
    for k in 1..=n {
        let mut acc = DualElt::xi(k);
        for i in 1..k {
            acc.add_assign(&DualElt::xi(i).pow(1 << (k - i)).mul(&z[k - i]));
        }
        z.push(acc);
    }
    z.swap_remove(n)
}

/// I_n = (2^{n−1}, …, 2, 1), the admissible sequence dual to ξ_n.
pub fn i_n(n: usize) -> AdmissibleSeq {
    AdmissibleSeq::new((0..n).rev().map(|k| 1u32 << k).collect()).expect("I_n is admissible")
}

/// σ(j₁,…,j_n) = (j₁−2j₂, …, j_{n−1}−2j_n, j_n).
pub fn sigma(a: &AdmissibleSeq) -> XiMonomial {
    let e = a.entries();
    XiMonomial::new((0..e.len()).map(|k| e[k] - 2 * e.get(k + 1).copied().unwrap_or(0)).collect())
}

/// Inverse of σ on exponent sequences: i_k = Σ_{l≥k} 2^{l−k} j_l.
pub fn sigma_inverse(m: &XiMonomial) -> AdmissibleSeq {
    let j = &m.0;
    let mut out = vec![0u32; j.len()];
    let mut acc = 0u32;
    for k in (0..j.len()).rev() {
        acc = 2 * acc + j[k];
        out[k] = acc;
    }
    AdmissibleSeq::new(out).expect("σ⁻¹ lands in admissible sequences")
}

/// All ξ-monomials of degree d, σ-ordered (ascending).
pub fn xi_monomials(d: u32) -> Vec<XiMonomial> {
    let mut out: Vec<XiMonomial> = steenrod::basis(d).iter().map(sigma).collect();
    out.sort();
    out
}

/// ξ-monomials of degree d by direct enumeration of exponent sequences; independent of σ.
pub fn xi_monomials_enumerated(d: u32) -> Vec<XiMonomial> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<XiMonomial>) {
        let w = (1u32 << k) - 1;
        if w > left {
            if left == 0 {
                out.push(XiMonomial::new(cur.clone()));
            }
            return;
        }
        for j in 0..=left / w {
            cur.push(j);
            rec(k + 1, left - j * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

type PairCache = RwLock<HashMap<(XiMonomial, AdmissibleSeq), bool>>;

fn pair_cache() -> &'static PairCache {
    static C: OnceLock<PairCache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn pair_word(m: &XiMonomial, w: &[u32]) -> bool {
    let mut acc = false;
    for t in steenrod::adem_normalize(&SqWord::new(w.iter().copied())).terms() {
        acc ^= pair_basis(m, t);
    }
    acc
}

/// ⟨ξ^m, Sq^a⟩ by peeling off the highest ξ_n and splitting Sq^a via the coproduct.
fn pair_basis(m: &XiMonomial, a: &AdmissibleSeq) -> bool {
    if m.degree() != a.degree() {
        return false;
    }
    if m.is_one() {
        return a.entries().is_empty();
    }
    let n = m.0.len();
    if m.0.iter().sum::<u32>() == 1 {
        return *a == i_n(n);
    }
    let key = (m.clone(), a.clone());
    if let Some(&v) = pair_cache().read().unwrap().get(&key) {
        return v;
    }
    let mut rest = m.0.clone();
    rest[n - 1] -= 1;
    let rest = XiMonomial::new(rest);
    let top = (1u32 << n) - 1;
    let mut v = false;
    for (w1, w2) in word_splittings(a.entries()) {
        if w1.iter().sum::<u32>() != top {
            continue;
        }
        if steenrod::adem_normalize(&SqWord::new(w1.iter().copied())).contains(&i_n(n)) {
            v ^= pair_word(&rest, &w2);
        }
    }
    pair_cache().write().unwrap().insert(key, v);
    v
}

pub fn pair_monomial(m: &XiMonomial, s: &SteenrodElt) -> bool {
    s.terms().fold(false, |acc, t| acc ^ pair_basis(m, t))
}

/// Bilinear pairing ⟨d, s⟩ ∈ F₂.
pub fn pair(d: &DualElt, s: &SteenrodElt) -> bool {
    d.terms().fold(false, |acc, m| acc ^ pair_monomial(m, s))
}

/// ⟨d, word⟩ with the word normalized first.
pub fn pair_with_word(d: &DualElt, w: &SqWord) -> bool {
    pair(d, &steenrod::adem_normalize(w))
}

/// Pairing matrix in degree d: rows are σ-ordered ξ-monomials, columns admissible sequences.
pub fn pairing_matrix(d: u32) -> (Vec<XiMonomial>, Vec<AdmissibleSeq>, F2Matrix) {
    let rows = xi_monomials(d);
    let cols = steenrod::basis(d);
    let mut m = F2Matrix::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            if pair_basis(r, c) {
                m.set(i, j, true);
            }
        }
    }
    (rows, cols, m)
}

/// Sq(e₁,…,e_r): the Milnor basis element dual to ξ^e.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct MilnorSeq(XiMonomial);

impl MilnorSeq {
    pub fn new(exps: Vec<u32>) -> Self {
        MilnorSeq(XiMonomial::new(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0 .0
    }

    pub fn degree(&self) -> u32 {
        self.0.degree()
    }

    pub fn dual(&self) -> &XiMonomial {
        &self.0
    }

    /// Q_i = Sq(0,…,0,1) with the 1 in position i+1.
    pub fn q(i: usize) -> Self {
        MilnorSeq(XiMonomial::xi_pow(i + 1, 1))
    }
}

impl fmt::Display for MilnorSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SqM({})", self.0 .0.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// F₂-sum of Milnor basis elements.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MilnorElt {
    terms: BTreeSet<MilnorSeq>,
}

impl MilnorElt {
    pub fn terms(&self) -> impl Iterator<Item = &MilnorSeq> {
        self.terms.iter()
    }

    pub fn toggle(&mut self, m: MilnorSeq) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for MilnorElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let s: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&s.join(" + "))
    }
}

struct DegreeInverse {
    rows: Vec<XiMonomial>,
    cols: Vec<AdmissibleSeq>,
    inverse: F2Matrix,
}

type InvCache = RwLock<HashMap<u32, Arc<DegreeInverse>>>;

fn inverse_for(d: u32) -> Result<Arc<DegreeInverse>> {
    static C: OnceLock<InvCache> = OnceLock::new();
    let cache = C.get_or_init(Default::default);
    if let Some(hit) = cache.read().unwrap().get(&d) {
        return Ok(hit.clone());
    }
    let (rows, cols, m) = pairing_matrix(d);
    let inverse = m.inverse().map_err(|_| Error::Internal(format!("pairing matrix singular in degree {d}")))?;
    let v = Arc::new(DegreeInverse { rows, cols, inverse });
    cache.write().unwrap().insert(d, v.clone());
    Ok(v)
}

/// The admissible expansion of Sq(e): pairs to 1 with ξ^e and 0 with every other ξ-monomial.
pub fn milnor_to_admissible(m: &MilnorSeq) -> Result<SteenrodElt> {
    let inv = inverse_for(m.degree())?;
    let r = inv.rows.iter().position(|x| x == m.dual()).ok_or_else(|| Error::Internal("missing ξ-monomial".into()))?;
    // P c = e_r  ⇔  c = P⁻¹ e_r, the r-th column of the inverse.
    let mut out = SteenrodElt::zero();
    for (j, a) in inv.cols.iter().enumerate() {
        if inv.inverse.get(j, r) {
            out.toggle(a.clone());
        }
    }
    Ok(out)
}

pub fn milnor_elt_to_admissible(m: &MilnorElt) -> Result<SteenrodElt> {
    let mut out = SteenrodElt::zero();
    for t in m.terms() {
        out.add_assign(&milnor_to_admissible(t)?);
    }
    Ok(out)
}

/// s = Σ_e ⟨ξ^e, s⟩ Sq(e).
pub fn admissible_to_milnor(s: &SteenrodElt) -> MilnorElt {
    let mut out = MilnorElt::default();
    let degrees: BTreeSet<u32> = s.terms().map(|t| t.degree()).collect();
    for d in degrees {
        for x in xi_monomials(d) {
            if pair_monomial(&x, s) {
                out.toggle(MilnorSeq(x));
            }
        }
    }
    out
}

/// Q_i as an admissible-basis element.
pub fn q(i: usize) -> SteenrodElt {
    milnor_to_admissible(&MilnorSeq::q(i)).expect("pairing is perfect")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum SubHopfAlgebra {
    A(u32),
    E(u32),
}

impl fmt::Display for SubHopfAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubHopfAlgebra::A(n) => write!(f, "A({n})"),
            SubHopfAlgebra::E(n) => write!(f, "E({n})"),
        }
    }
}

/// Sq¹/Sq² words spanning A(1).
pub const A1_WORDS: [&[u32]; 8] = [&[], &[1], &[2], &[1, 2], &[2, 1], &[1, 2, 1], &[2, 1, 2], &[2, 1, 2, 1]];

pub fn subalgebra_basis(h: SubHopfAlgebra) -> Result<Vec<SteenrodElt>> {
    match h {
        SubHopfAlgebra::A(0) => Ok(vec![SteenrodElt::one(), SteenrodElt::sq(1)]),
        SubHopfAlgebra::A(1) => Ok(A1_WORDS.iter().map(|w| steenrod::word(w)).collect()),
        SubHopfAlgebra::A(n) if n <= 3 => a_n_profile_basis(n),
        SubHopfAlgebra::E(n) if n <= 2 => {
            let qs: Vec<SteenrodElt> = (0..=n as usize).map(q).collect();
            let mut out = Vec::new();
            for mask in 0u32..(1 << (n + 1)) {
                let mut x = SteenrodElt::one();
                for (i, qi) in qs.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        x = steenrod::multiply(&x, qi);
                    }
                }
                out.push(x);
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("basis of {h}"))),
    }
}

/// A(n) via its Milnor profile: Sq(e) with e_k < 2^{n+2−k}.
pub fn a_n_profile_basis(n: u32) -> Result<Vec<SteenrodElt>> {
    let bounds: Vec<u32> = (1..=n + 1).map(|k| 1u32 << (n + 2 - k)).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; bounds.len()];
    loop {
        out.push(milnor_to_admissible(&MilnorSeq::new(cur.clone()))?);
        let mut k = 0;
        loop {
            if k == cur.len() {
                return Ok(out);
            }
            cur[k] += 1;
            if cur[k] < bounds[k] {
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

/// Generators of the dual quotient (A//h)_* as ξ-monomials, up to `max_degree`.
pub fn dual_quotient_generators(h: SubHopfAlgebra, max_degree: u32) -> Result<Vec<XiMonomial>> {
    let exp_for = |k: u32| -> u32 {
        match h {
            SubHopfAlgebra::A(n) => {
                if k <= n + 1 {
                    1 << (n + 2 - k)
                } else {
                    1
                }
            }
            SubHopfAlgebra::E(n) => {
                if k <= n + 1 {
                    2
                } else {
                    1
                }
            }
        }
    };
    let mut out = Vec::new();
    for k in 1..32u32 {
        let m = XiMonomial::xi_pow(k as usize, exp_for(k));
        if ((1u64 << k) - 1) > max_degree as u64 {
            break;
        }
        if m.degree() <= max_degree {
            out.push(m);
        }
    }
    Ok(out)
}

/// Monomials in the given generators up to `max_degree` (the dual quotient ring, truncated).
pub fn ring_monomials(gens: &[XiMonomial], max_degree: u32) -> Vec<XiMonomial> {
    fn rec(gens: &[XiMonomial], i: usize, cur: XiMonomial, max: u32, out: &mut Vec<XiMonomial>) {
        if i == gens.len() {
            out.push(cur);
            return;
        }
        let mut m = cur;
        loop {
            rec(gens, i + 1, m.clone(), max, out);
            m = m.mul(&gens[i]);
            if m.degree() > max {
                break;
            }
        }
    }
    let mut out = Vec::new();
    rec(gens, 0, XiMonomial::one(), max_degree, &mut out);
    out.sort();
    out
}

/// Components Σ ⟨d′, b⟩ d″ of (π_h ⊗ 1)μ*(x) for each positive-degree b in the basis of h.
fn coaction_defects(x: &DualElt, hb: &[SteenrodElt]) -> Vec<DualElt> {
    let cop = dual_coproduct(x);
    hb.iter()
        .filter(|b| !b.counit())
        .map(|b| {
            let mut acc = DualElt::zero();
            for (l, r) in cop.terms() {
                if pair_monomial(l, b) {
                    acc.toggle(r.clone());
                }
            }
            acc
        })
        .collect()
}

/// True iff (π_h ⊗ 1)μ*(x) = 1 ⊗ x.
pub fn verify_cotensor_member(x: &DualElt, h: SubHopfAlgebra) -> Result<bool> {
    if x.degree().is_none() && !x.is_zero() {
        return Err(Error::Invalid("cotensor check needs a homogeneous element".into()));
    }
    let hb = subalgebra_basis(h)?;
    Ok(coaction_defects(x, &hb).iter().all(|d| d.is_zero()))
}

/// Dimension of the cotensor kernel {x ∈ (A_*)_d : (π_h ⊗ 1)μ*(x) = 1 ⊗ x}.
pub fn cotensor_kernel_dim(h: SubHopfAlgebra, d: u32) -> Result<usize> {
    let hb = subalgebra_basis(h)?;
    let monos = xi_monomials(d);
    let mut rows: Vec<Vec<(usize, XiMonomial)>> = Vec::new();
    let mut index: HashMap<(usize, XiMonomial), usize> = HashMap::new();
    for m in &monos {
        let defects = coaction_defects(&DualElt::from_monomial(m.clone()), &hb);
        let mut col = Vec::new();
        for (bi, dfx) in defects.into_iter().enumerate() {
            for t in dfx.terms() {
                col.push((bi, t.clone()));
            }
        }
        rows.push(col);
    }
    for col in &rows {
        for k in col {
            let n = index.len();
            index.entry(k.clone()).or_insert(n);
        }
    }
    // Columns = monomials of degree d, rows = defect coordinates.
    let mut mat = F2Matrix::zeros(index.len(), monos.len());
    for (j, col) in rows.iter().enumerate() {
        for k in col {
            mat.flip(index[k], j);
        }
    }
    Ok(monos.len() - mat.rank())
}

/// Whether the span of `a` equals the span of `b` (homogeneous Steenrod elements).
pub fn same_span(a: &[SteenrodElt], b: &[SteenrodElt]) -> bool {
    let mut idx: HashMap<AdmissibleSeq, usize> = HashMap::new();
    for t in a.iter().chain(b).flat_map(|x| x.terms()) {
        let n = idx.len();
        idx.entry(t.clone()).or_insert(n);
    }
    let to_vec = |x: &SteenrodElt| F2Vector::from_support(idx.len(), x.terms().map(|t| idx[t]));
    let ma = F2Matrix::from_rows(idx.len(), a.iter().map(to_vec).collect()).unwrap();
    let mb = F2Matrix::from_rows(idx.len(), b.iter().map(to_vec).collect()).unwrap();
    let both = F2Matrix::from_rows(idx.len(), a.iter().chain(b).map(to_vec).collect()).unwrap();
    let r = both.rank();
    ma.rank() == r && mb.rank() == r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::word;

    #[test]
    fn xi2_coproduct() {
        assert_eq!(dual_coproduct(&DualElt::xi(2)).to_string(), "1 ⊗ xi[0,1] + xi[2] ⊗ xi[1] + xi[0,1] ⊗ 1");
        let sq = dual_coproduct(&DualElt::xi(1).square());
        assert_eq!(sq.to_string(), "1 ⊗ xi[2] + xi[2] ⊗ 1");
    }

    #[test]
    fn zetas() {
        assert_eq!(zeta(0), DualElt::one());
        assert_eq!(zeta(1), DualElt::xi(1));
        let mut z2 = DualElt::xi(2);
        z2.toggle(XiMonomial::new(vec![3]));
        assert_eq!(zeta(2), z2);
    }

    #[test]
    fn pairing_examples() {
        assert!(pair(&DualElt::xi(2), &word(&[2, 1])));
        assert!(!pair(&DualElt::xi(2), &word(&[3])));
        assert!(pair(&DualElt::one(), &SteenrodElt::one()));
    }

    #[test]
    fn conversions() {
        for n in 1..=4 {
            assert_eq!(milnor_to_admissible(&MilnorSeq::new(vec![n])).unwrap(), SteenrodElt::sq(n));
        }
        assert_eq!(q(0), SteenrodElt::sq(1));
        assert_eq!(q(1), &word(&[3]) + &word(&[2, 1]));
        assert_eq!(admissible_to_milnor(&word(&[3])).to_string(), "SqM(3)");
        assert_eq!(admissible_to_milnor(&word(&[2, 1])).to_string(), "SqM(3) + SqM(0,1)");
    }

    #[test]
    fn sigma_roundtrip() {
        for d in 0..=14 {
            for a in steenrod::basis(d) {
                assert_eq!(sigma_inverse(&sigma(&a)), a);
            }
            assert_eq!(xi_monomials(d), xi_monomials_enumerated(d));
        }
    }

    #[test]
    fn a1_basis_matches_listed_elements() {
        let b = subalgebra_basis(SubHopfAlgebra::A(1)).unwrap();
        let listed: Vec<String> = b.iter().map(|x| x.to_string()).collect();
        assert_eq!(
            listed,
            ["1", "Sq[1]", "Sq[2]", "Sq[3]", "Sq[2,1]", "Sq[3,1]", "Sq[5] + Sq[4,1]", "Sq[5,1]"]
        );
        let profile = a_n_profile_basis(1).unwrap();
        assert_eq!(profile.len(), 8);
        assert!(same_span(&b, &profile));
    }

    #[test]
    fn cotensor_examples() {
        let e1 = SubHopfAlgebra::E(1);
        assert!(verify_cotensor_member(&DualElt::xi(1).square(), e1).unwrap());
        assert!(!verify_cotensor_member(&DualElt::xi(1), e1).unwrap());
        assert!(verify_cotensor_member(&DualElt::one(), SubHopfAlgebra::A(1)).unwrap());
    }
}
