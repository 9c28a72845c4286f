//! Steenrod squares on polynomial algebras, extended from generators by the Cartan formula.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::f2core::{binom_mod2, F2Matrix, F2Poly, F2Vector, Monomial, WeightedPolyRing};
use crate::steenrod::adem_terms;

/// A polynomial ring with Sq^k declared on each generator for 1 ≤ k ≤ deg.
#[derive(Clone, Debug)]
pub struct SqAlgebraPresentation {
    ring: WeightedPolyRing,
    /// action[g][k] = Sq^k(g), k = 0..=deg g.
    action: Vec<Vec<F2Poly>>,
}

impl SqAlgebraPresentation {
    /// `action[g]` lists Sq¹(g), …, Sq^{deg g}(g).
    pub fn new(ring: WeightedPolyRing, action: Vec<Vec<F2Poly>>) -> Result<Self> {
        if action.len() != ring.ngens() {
            return Err(Error::Dimension { expected: ring.ngens(), got: action.len() });
        }
        let mut full = Vec::with_capacity(action.len());
        for (g, sqs) in action.into_iter().enumerate() {
            let d = ring.degree(g);
            if sqs.len() != d as usize {
                return Err(Error::Invalid(format!("{} needs {} squares, got {}", ring.name(g), d, sqs.len())));
            }
            let mut row = vec![ring.gen(g)];
            for (k, p) in sqs.into_iter().enumerate() {
                if p.ring() != &ring {
                    return Err(Error::RingMismatch);
                }
                let want = d + k as u32 + 1;
                if !p.is_zero() && p.degree() != Some(want) {
                    return Err(Error::Invalid(format!("Sq^{}({}) = {p} is not homogeneous of degree {want}", k + 1, ring.name(g))));
                }
                row.push(p);
            }
            let sq_top = &row[d as usize];
            if *sq_top != ring.gen(g).square() {
                return Err(Error::Invalid(format!("Sq^{d}({}) must be its square, got {sq_top}", ring.name(g))));
            }
            full.push(row);
        }
        Ok(SqAlgebraPresentation { ring, action: full })
    }

    /// Build from `(generator, k, polynomial string)` triples; unlisted Sq^k vanish
    /// except the top square, which is forced to g².
    pub fn from_table(ring: WeightedPolyRing, table: &[(&str, u32, &str)]) -> Result<Self> {
        let mut action: Vec<Vec<F2Poly>> = (0..ring.ngens())
            .map(|g| {
                let d = ring.degree(g);
                (1..=d).map(|k| if k == d { ring.gen(g).square() } else { ring.zero() }).collect()
            })
            .collect();
        for (name, k, poly) in table {
            let g = ring.index_of(name).ok_or_else(|| Error::Parse(format!("unknown generator {name}")))?;
            if *k == 0 || *k > ring.degree(g) {
                return Err(Error::Invalid(format!("Sq^{k} on {name} is outside 1..=deg")));
            }
            action[g][*k as usize - 1] = ring.parse(poly)?;
        }
        Self::new(ring, action)
    }

    /// Every generator of degree 1: Sq(x) = x + x².
    pub fn degree_one<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let gens: Vec<(&str, u32)> = names.iter().map(|n| (n.as_ref(), 1)).collect();
        let ring = WeightedPolyRing::new(&gens)?;
        Self::from_table(ring, &[])
    }

    /// Degree-2 generators with Sq²x = x² and Sq¹x = 0 (mod-2 Chern roots).
    pub fn degree_two<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let gens: Vec<(&str, u32)> = names.iter().map(|n| (n.as_ref(), 2)).collect();
        let ring = WeightedPolyRing::new(&gens)?;
        Self::from_table(ring, &[])
    }

    /// Pull the action back along an injective ring map into a presentation that already has one.
    pub fn derive_via(source: WeightedPolyRing, images: Vec<F2Poly>, target: &SqAlgebraPresentation) -> Result<Self> {
        let map = AlgebraMap::new(source.clone(), target.ring().clone(), images)?;
        let mut action = Vec::new();
        for g in 0..source.ngens() {
            let img = map.image(g).clone();
            let mut row = Vec::new();
            for k in 1..=source.degree(g) {
                let v = target.sq(k, &img);
                let pre = map.preimage(&v)?.ok_or_else(|| {
                    Error::Internal(format!("Sq^{k}({}) = {v} has no preimage", source.name(g)))
                })?;
                row.push(pre);
            }
            action.push(row);
        }
        Self::new(source, action)
    }

    pub fn ring(&self) -> &WeightedPolyRing {
        &self.ring
    }

    /// Sq^k on a generator.
    pub fn gen_sq(&self, g: usize, k: u32) -> F2Poly {
        self.action[g].get(k as usize).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Σ_{j ≤ k} Sq^j(m) graded by j, via the Cartan formula on generator powers.
    fn monomial_total(&self, m: &Monomial, k: u32) -> Vec<F2Poly> {
        let k = k as usize;
        let mut acc = vec![self.ring.zero(); k + 1];
        acc[0] = self.ring.one();
        for (g, &e) in m.exponents().iter().enumerate() {
            for b in 0..32 {
                if (e >> b) & 1 == 0 {
                    continue;
                }
                // (Sq g)^{2^b} = Σ_j (Sq^j g)^{2^b}, living in extra degree j·2^b
                let factor: Vec<(usize, F2Poly)> = self.action[g]
                    .iter()
                    .enumerate()
                    .map(|(j, p)| (j << b, p))
                    .filter(|(j, p)| *j <= k && !p.is_zero())
                    .map(|(j, p)| {
                        let mut q = p.clone();
                        for _ in 0..b {
                            q = q.square();
                        }
                        (j, q)
                    })
                    .collect();
                let mut next = vec![self.ring.zero(); k + 1];
                for (i, a) in acc.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, f) in &factor {
                        if i + j <= k {
                            next[i + j].add_assign(&(a * f));
                        }
                    }
                }
                acc = next;
            }
        }
        acc
    }

    /// Sq^k(f).
    pub fn sq(&self, k: u32, f: &F2Poly) -> F2Poly {
        assert_eq!(f.ring(), &self.ring, "ring mismatch");
        if k == 0 {
            return f.clone();
        }
        let mut out = self.ring.zero();
        for m in f.terms() {
            if self.ring.monomial_degree(m) < k {
                continue;
            }
            out.add_assign(&self.monomial_total(m, k).swap_remove(k as usize));
        }
        out
    }

    /// Sq^k(f) with a signed degree argument; negative k is an error.
    pub fn sq_checked(&self, k: i64, f: &F2Poly) -> Result<F2Poly> {
        if k < 0 {
            return Err(Error::Invalid(format!("Sq^{k} is undefined")));
        }
        if f.ring() != &self.ring {
            return Err(Error::RingMismatch);
        }
        Ok(self.sq(k as u32, f))
    }

    /// Apply the word Sq^{a₁}⋯Sq^{a_r} (rightmost first).
    pub fn sq_word(&self, word: &[u32], f: &F2Poly) -> F2Poly {
        word.iter().rev().fold(f.clone(), |acc, &k| self.sq(k, &acc))
    }

    /// Total square Σ_k Sq^k(f).
    pub fn total_sq(&self, f: &F2Poly) -> F2Poly {
        let mut out = self.ring.zero();
        for m in f.terms() {
            let d = self.ring.monomial_degree(m);
            for p in self.monomial_total(m, d) {
                out.add_assign(&p);
            }
        }
        out
    }

    /// Verify instability, the Cartan formula on products, and Adem relations on every
    /// monomial of degree ≤ `degree_max`.
    pub fn check(&self, degree_max: u32) -> CheckReport {
        let monos: Vec<Monomial> = (0..=degree_max).flat_map(|d| self.ring.monomials_of_degree(d)).collect();
        let polys: Vec<F2Poly> = monos.iter().map(|m| self.ring.monomial(m.clone())).collect();
        let mut failures = Vec::new();
        let mut note = |relation: &str, f: &F2Poly, lhs: F2Poly, rhs: F2Poly| {
            if lhs != rhs && !failures.iter().any(|w: &Witness| w.relation == relation) {
                failures.push(Witness { relation: relation.to_string(), input: f.to_string(), lhs: lhs.to_string(), rhs: rhs.to_string() });
            }
        };
        for f in &polys {
            let d = f.degree().unwrap_or(0);
            note("instability Sq^deg(x) = x^2", f, self.sq(d, f), f.square());
            note("instability Sq^(deg+1)(x) = 0", f, self.sq(d + 1, f), self.ring.zero());
        }
        for f in &polys {
            note("Sq1Sq1 = 0", f, self.sq_word(&[1, 1], f), self.ring.zero());
        }
        for f in &polys {
            note("Sq2Sq2 = Sq1Sq2Sq1", f, self.sq_word(&[2, 2], f), self.sq_word(&[1, 2, 1], f));
        }
        for f in &polys {
            note("Sq1Sq2 = Sq3", f, self.sq_word(&[1, 2], f), self.sq(3, f));
        }
        // Remaining Adem relations Sq^a Sq^b with a < 2b, a + b ≤ 8.
        for f in &polys {
            for b in 1..=8u32 {
                for a in 1..(2 * b).min(9 - b) {
                    let mut rhs = self.ring.zero();
                    for (x, y) in adem_terms(a, b) {
                        rhs.add_assign(&self.sq_word(&[x, y], f));
                    }
                    note(&format!("Adem Sq{a}Sq{b}"), f, self.sq_word(&[a, b], f), rhs);
                }
            }
        }
        // Cartan on products of pairs.
        let small: Vec<&F2Poly> = polys.iter().filter(|p| p.degree().unwrap_or(0) > 0).collect();
        for (i, f) in small.iter().enumerate() {
            for g in &small[i..] {
                let fg = *f * *g;
                if fg.degree().unwrap_or(0) > degree_max {
                    continue;
                }
                for k in 1..=fg.degree().unwrap_or(0) {
                    let mut rhs = self.ring.zero();
                    for j in 0..=k {
                        rhs.add_assign(&(&self.sq(j, f) * &self.sq(k - j, g)));
                    }
                    note("Cartan", &fg, self.sq(k, &fg), rhs);
                }
            }
        }
        CheckReport { degree_max, failures }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PresentationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let gens: Vec<(&str, u32)> = spec.generators.iter().map(|g| (g.name.as_str(), g.degree)).collect();
        let ring = WeightedPolyRing::new(&gens)?;
        let mut table = Vec::new();
        for g in &spec.generators {
            for (k, v) in &g.sq {
                let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad square index {k}")))?;
                table.push((g.name.as_str(), k, v.as_str()));
            }
        }
        Self::from_table(ring, &table)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = (0..self.ring.ngens())
            .map(|g| {
                let sq: BTreeMap<String, String> = (1..=self.ring.degree(g))
                    .filter(|&k| !self.action[g][k as usize].is_zero())
                    .map(|k| (k.to_string(), self.action[g][k as usize].to_string()))
                    .collect();
                serde_json::json!({"name": self.ring.name(g), "degree": self.ring.degree(g), "sq": sq})
            })
            .collect();
        serde_json::json!({ "generators": gens })
    }
}

#[derive(Deserialize)]
struct PresentationFile {
    generators: Vec<GeneratorSpec>,
}

#[derive(Deserialize)]
struct GeneratorSpec {
    name: String,
    degree: u32,
    #[serde(default)]
    sq: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Witness {
    pub relation: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails on {}: {} vs {}", self.relation, self.input, self.lhs, self.rhs)
    }
}

/// Outcome of [`SqAlgebraPresentation::check`]: the first witness for each failing relation.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckReport {
    pub degree_max: u32,
    pub failures: Vec<Witness>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first(&self) -> Option<&Witness> {
        self.failures.first()
    }
}

/// Ring homomorphism between weighted polynomial rings, given on generators.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    source: WeightedPolyRing,
    target: WeightedPolyRing,
    images: Vec<F2Poly>,
}

impl AlgebraMap {
    pub fn new(source: WeightedPolyRing, target: WeightedPolyRing, images: Vec<F2Poly>) -> Result<Self> {
        if images.len() != source.ngens() {
            return Err(Error::Dimension { expected: source.ngens(), got: images.len() });
        }
        for (g, p) in images.iter().enumerate() {
            if p.ring() != &target {
                return Err(Error::RingMismatch);
            }
            if !p.is_zero() && p.degree() != Some(source.degree(g)) {
                return Err(Error::Invalid(format!("image of {} is not homogeneous of degree {}", source.name(g), source.degree(g))));
            }
        }
        Ok(AlgebraMap { source, target, images })
    }

    /// Images given as strings in the target ring, in source-generator order.
    pub fn from_strings(source: WeightedPolyRing, target: WeightedPolyRing, images: &[&str]) -> Result<Self> {
        let imgs = images.iter().map(|s| target.parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, imgs)
    }

    pub fn source(&self) -> &WeightedPolyRing {
        &self.source
    }

    pub fn target(&self) -> &WeightedPolyRing {
        &self.target
    }

    pub fn image(&self, g: usize) -> &F2Poly {
        &self.images[g]
    }

    pub fn apply(&self, f: &F2Poly) -> Result<F2Poly> {
        if f.ring() != &self.source {
            return Err(Error::RingMismatch);
        }
        f.substitute(&self.target, &self.images)
    }

    /// Images of the degree-d source monomials, in ascending monomial order.
    pub fn degree_matrix(&self, d: u32) -> (Vec<Monomial>, Vec<Monomial>, F2Matrix) {
        let src = self.source.monomials_of_degree(d);
        let tgt = self.target.monomials_of_degree(d);
        let idx: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = F2Matrix::zeros(tgt.len(), src.len());
        let cache = &mut HashMap::new();
        for (j, m) in src.iter().enumerate() {
            let img = self.apply_monomial(m, cache);
            for t in img.terms() {
                mat.flip(idx[t], j);
            }
        }
        (src, tgt, mat)
    }

    fn apply_monomial(&self, m: &Monomial, cache: &mut HashMap<(usize, u32), F2Poly>) -> F2Poly {
        let mut t = self.target.one();
        for (g, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                let p = cache.entry((g, e)).or_insert_with(|| self.images[g].pow(e));
                t = &t * p;
            }
        }
        t
    }

    /// Some source element mapping to f, if one exists. f must be homogeneous.
    pub fn preimage(&self, f: &F2Poly) -> Result<Option<F2Poly>> {
        if f.ring() != &self.target {
            return Err(Error::RingMismatch);
        }
        if f.is_zero() {
            return Ok(Some(self.source.zero()));
        }
        let d = f.degree().ok_or_else(|| Error::Invalid("preimage needs a homogeneous element".into()))?;
        let (src, tgt, mat) = self.degree_matrix(d);
        let idx: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let b = F2Vector::from_support(tgt.len(), f.terms().map(|t| idx[t]));
        match mat.solve(&b) {
            Ok(x) => Ok(Some(F2Poly::from_monomials(&self.source, x.support().map(|j| src[j].clone())))),
            Err(Error::NoSolution) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Rank equals the source dimension in every degree ≤ d.
    pub fn injective_through(&self, d: u32) -> bool {
        (0..=d).all(|k| {
            let (src, _, mat) = self.degree_matrix(k);
            mat.rank() == src.len()
        })
    }

    /// Sq^k∘φ = φ∘Sq^k on every source monomial of degree ≤ `degree_max`. Returns the first failure.
    pub fn check_equivariant(
        &self,
        src: &SqAlgebraPresentation,
        tgt: &SqAlgebraPresentation,
        degree_max: u32,
    ) -> Result<Option<Witness>> {
        if src.ring() != &self.source || tgt.ring() != &self.target {
            return Err(Error::RingMismatch);
        }
        for d in 1..=degree_max {
            for m in self.source.monomials_of_degree(d) {
                let f = self.source.monomial(m);
                let phi_f = self.apply(&f)?;
                for k in 1..=d {
                    let lhs = tgt.sq(k, &phi_f);
                    let rhs = self.apply(&src.sq(k, &f))?;
                    if lhs != rhs {
                        return Ok(Some(Witness {
                            relation: format!("Sq{k} naturality"),
                            input: f.to_string(),
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Wu formula: Sq^k(w_m) = Σ_{t=0}^{k} C(m−k+t−1, t) w_{k−t} w_{m+t}, as (coefficient, k−t, m+t) triples.
pub fn wu_terms(k: u32, m: u32) -> Vec<(u32, u32)> {
    if k > m {
        return vec![];
    }
    (0..=k)
        .filter(|&t| t == 0 || binom_mod2((m - k + t - 1) as u64, t as u64))
        .map(|t| (k - t, m + t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_total_square() {
        let p = SqAlgebraPresentation::degree_one(&["x"]).unwrap();
        let x = p.ring().gen(0);
        assert_eq!(p.total_sq(&x), p.ring().parse("x + x^2").unwrap());
        assert_eq!(p.total_sq(&x.square()), p.ring().parse("x^2 + x^4").unwrap());
        assert_eq!(p.total_sq(&p.ring().one()), p.ring().one());
        assert!(p.sq_checked(-1, &x).is_err());
    }

    #[test]
    fn top_square_is_enforced() {
        let r = WeightedPolyRing::new(&[("a", 2)]).unwrap();
        let bad = vec![vec![r.zero(), r.zero()]];
        assert!(SqAlgebraPresentation::new(r, bad).is_err());
    }

    #[test]
    fn wu_small_cases() {
        // Sq¹w₂ = w₁w₂ + w₃
        assert_eq!(wu_terms(1, 2), vec![(1, 2), (0, 3)]);
        // Sq²w₂ = w₂²
        assert_eq!(wu_terms(2, 2), vec![(2, 2)]);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"generators":[{"name":"y4","degree":4,"sq":{"2":"y6"}},{"name":"y6","degree":6,"sq":{"4":"y4*y6"}}]}"#;
        let p = SqAlgebraPresentation::from_json(text).unwrap();
        let q = SqAlgebraPresentation::from_json(&p.to_json().to_string()).unwrap();
        let y4 = p.ring().gen(0);
        assert_eq!(p.sq(2, &y4).to_string(), "y6");
        assert_eq!(q.sq(2, &q.ring().gen(0)).to_string(), "y6");
    }
}
