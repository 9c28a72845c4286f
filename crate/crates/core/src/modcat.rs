//! Finite graded modules over A(1) and E(1): construction, Margolis homology,
//! decomposition into standard pieces, and the split-injection criterion.
//!
//! A module is a window of degrees `[d_min, d_max]` with a basis dimension per
//! degree and one matrix per algebra generator and source degree. Matrices act on
//! column vectors: `op(k, d)` has `dim(d + s_k)` rows and `dim(d)` columns.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::cartan::SqAlgebraPresentation;
use crate::error::{Error, Result};
use crate::f2core::{F2Matrix, F2Poly, F2Vector};
use crate::milnor::{self, SubHopfAlgebra};
use crate::steenrod::{self, AdmissibleSeq, SteenrodElt};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum ModAlgebra {
    A1,
    E1,
}

impl ModAlgebra {
    /// Degrees of the two generators (Sq¹, Sq² or Q₀, Q₁).
    pub fn generator_degrees(self) -> [i32; 2] {
        match self {
            ModAlgebra::A1 => [1, 2],
            ModAlgebra::E1 => [1, 3],
        }
    }

    pub fn generator_names(self) -> [&'static str; 2] {
        match self {
            ModAlgebra::A1 => ["Sq1", "Sq2"],
            ModAlgebra::E1 => ["Q0", "Q1"],
        }
    }

    fn generators(self) -> [SteenrodElt; 2] {
        match self {
            ModAlgebra::A1 => [SteenrodElt::sq(1), SteenrodElt::sq(2)],
            ModAlgebra::E1 => [SteenrodElt::sq(1), milnor::q(1)],
        }
    }

    fn hopf(self) -> SubHopfAlgebra {
        match self {
            ModAlgebra::A1 => SubHopfAlgebra::A(1),
            ModAlgebra::E1 => SubHopfAlgebra::E(1),
        }
    }

    pub fn families(self) -> &'static [Family] {
        match self {
            ModAlgebra::A1 => &[Family::Z2, Family::I, Family::J, Family::K, Family::A1],
            ModAlgebra::E1 => &[Family::Z2, Family::L, Family::C, Family::E1],
        }
    }
}

impl fmt::Display for ModAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModAlgebra::A1 => "A(1)",
            ModAlgebra::E1 => "E(1)",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum MargolisOp {
    Q0,
    Q1,
}

impl MargolisOp {
    pub fn degree(self) -> i32 {
        match self {
            MargolisOp::Q0 => 1,
            MargolisOp::Q1 => 3,
        }
    }
}

/// Margolis homology dimensions; `reliable[i]` is false near a truncated window edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MargolisDims {
    pub d_min: i32,
    pub dims: Vec<usize>,
    pub reliable: Vec<bool>,
}

impl MargolisDims {
    pub fn get(&self, d: i32) -> usize {
        idx(self.d_min, self.dims.len(), d).map_or(0, |i| self.dims[i])
    }

    pub fn is_reliable(&self, d: i32) -> bool {
        idx(self.d_min, self.dims.len(), d).is_none_or(|i| self.reliable[i])
    }

    /// (degree, dimension) for every nonzero degree.
    pub fn nonzero(&self) -> Vec<(i32, usize)> {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (self.d_min + i as i32, n))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }
}

fn idx(d_min: i32, len: usize, d: i32) -> Option<usize> {
    let i = d.checked_sub(d_min)?;
    (i >= 0 && (i as usize) < len).then_some(i as usize)
}

/// Reduced echelon basis of a subspace of F₂ⁿ.
#[derive(Clone, Debug)]
struct Subspace {
    n: usize,
    rows: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    fn new(n: usize) -> Self {
        Subspace { n, rows: Vec::new(), pivots: Vec::new() }
    }

    fn spanned_by(n: usize, vecs: impl IntoIterator<Item = F2Vector>) -> Self {
        let mut s = Subspace::new(n);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &F2Vector) -> F2Vector {
        let mut v = v.clone();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.add_assign(r);
            }
        }
        v
    }

    /// Adds `v`; returns false if it was already in the span.
    fn insert(&mut self, v: F2Vector) -> bool {
        let v = self.reduce(&v);
        let Some(p) = v.first_one() else { return false };
        for r in &mut self.rows {
            if r.get(p) {
                r.add_assign(&v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    /// Coordinates of `v` in the echelon basis, or None if `v` is outside the span.
    fn coords(&self, v: &F2Vector) -> Option<F2Vector> {
        if !self.reduce(v).is_zero() {
            return None;
        }
        Some(F2Vector::from_support(self.dim(), self.pivots.iter().enumerate().filter(|(_, &p)| v.get(p)).map(|(i, _)| i)))
    }

    fn non_pivots(&self) -> Vec<usize> {
        (0..self.n).filter(|c| self.pivots.binary_search(c).is_err()).collect()
    }
}

fn block_diag(a: &F2Matrix, b: &F2Matrix) -> F2Matrix {
    let mut m = F2Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        for c in a.row(r).support() {
            m.set(r, c, true);
        }
    }
    for r in 0..b.rows() {
        for c in b.row(r).support() {
            m.set(a.rows() + r, a.cols() + c, true);
        }
    }
    m
}

fn column(m: &F2Matrix, c: usize) -> F2Vector {
    F2Vector::from_support(m.rows(), (0..m.rows()).filter(|&r| m.get(r, c)))
}

fn matrix_from_columns(rows: usize, cols: &[F2Vector]) -> F2Matrix {
    let mut m = F2Matrix::zeros(rows, cols.len());
    for (c, v) in cols.iter().enumerate() {
        for r in v.support() {
            m.set(r, c, true);
        }
    }
    m
}

/// A finite graded module over A(1) or E(1), possibly a truncation of an infinite one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModule {
    algebra: ModAlgebra,
    d_min: i32,
    dims: Vec<usize>,
    ops: [Vec<F2Matrix>; 2],
    truncated_below: bool,
    truncated_above: bool,
    labels: Vec<Vec<String>>,
}

impl FiniteModule {
    /// Validates shapes and the defining relations of the algebra.
    pub fn new(algebra: ModAlgebra, d_min: i32, dims: Vec<usize>, ops: [Vec<F2Matrix>; 2]) -> Result<Self> {
        let labels = dims.iter().map(|&n| (0..n).map(|i| format!("b{i}")).collect()).collect();
        let m = FiniteModule { algebra, d_min, dims, ops, truncated_below: false, truncated_above: false, labels };
        m.check_shapes()?;
        m.check_relations()?;
        Ok(m)
    }

    pub fn zero(algebra: ModAlgebra) -> Self {
        FiniteModule {
            algebra,
            d_min: 0,
            dims: Vec::new(),
            ops: [Vec::new(), Vec::new()],
            truncated_below: false,
            truncated_above: false,
            labels: Vec::new(),
        }
    }

    /// The trivial module F₂ in degree `d`.
    pub fn trivial(algebra: ModAlgebra, d: i32) -> Self {
        let mut m = FiniteModule::zero(algebra);
        m.d_min = d;
        m.dims = vec![1];
        m.ops = [vec![F2Matrix::zeros(0, 1)], vec![F2Matrix::zeros(0, 1)]];
        m.labels = vec![vec!["1".into()]];
        m
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.dims.len() || labels.iter().zip(&self.dims).any(|(l, &n)| l.len() != n) {
            return Err(Error::Invalid("label shape does not match dimensions".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Marks the window as cut off from a larger module.
    pub fn with_truncation(mut self, below: bool, above: bool) -> Self {
        self.truncated_below = below;
        self.truncated_above = above;
        self
    }

    fn check_shapes(&self) -> Result<()> {
        for k in 0..2 {
            if self.ops[k].len() != self.dims.len() {
                return Err(Error::Dimension { expected: self.dims.len(), got: self.ops[k].len() });
            }
            let s = self.algebra.generator_degrees()[k];
            for (i, m) in self.ops[k].iter().enumerate() {
                let d = self.d_min + i as i32;
                if m.cols() != self.dims[i] || m.rows() != self.dim(d + s) {
                    return Err(Error::Invalid(format!(
                        "{} matrix from degree {d} is {}x{}, expected {}x{}",
                        self.algebra.generator_names()[k],
                        m.rows(),
                        m.cols(),
                        self.dim(d + s),
                        self.dims[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks Sq¹Sq¹ = 0 and Sq²Sq² = Sq¹Sq²Sq¹ (A(1)) or Q₀² = Q₁² = 0 and Q₀Q₁ = Q₁Q₀ (E(1))
    /// wherever both ends lie in the window.
    pub fn check_relations(&self) -> Result<()> {
        for d in self.degrees() {
            let rels: Vec<(&str, F2Matrix)> = match self.algebra {
                ModAlgebra::A1 => vec![
                    ("Sq1 Sq1 = 0", self.compose(&[0, 0], d)),
                    ("Sq2 Sq2 = Sq1 Sq2 Sq1", self.compose(&[1, 1], d).add(&self.compose(&[0, 1, 0], d))?),
                ],
                ModAlgebra::E1 => vec![
                    ("Q0 Q0 = 0", self.compose(&[0, 0], d)),
                    ("Q1 Q1 = 0", self.compose(&[1, 1], d)),
                    ("Q0 Q1 = Q1 Q0", self.compose(&[0, 1], d).add(&self.compose(&[1, 0], d))?),
                ],
            };
            for (name, m) in rels {
                if !m.is_zero() {
                    return Err(Error::Invalid(format!("relation {name} fails from degree {d}")));
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> ModAlgebra {
        self.algebra
    }

    pub fn d_min(&self) -> i32 {
        self.d_min
    }

    pub fn d_max(&self) -> i32 {
        self.d_min + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.d_min..=self.d_max()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, d: i32) -> usize {
        idx(self.d_min, self.dims.len(), d).map_or(0, |i| self.dims[i])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Equality up to basis labels and truncation flags.
    pub fn same_structure(&self, other: &FiniteModule) -> bool {
        self.algebra == other.algebra
            && self.d_min == other.d_min
            && self.dims == other.dims
            && self.ops == other.ops
    }

    /// Index of the basis element labelled `label` in degree `d`.
    pub fn basis_index(&self, d: i32, label: &str) -> Option<usize> {
        self.labels(d).iter().position(|l| l == label)
    }

    pub fn truncated_above(&self) -> bool {
        self.truncated_above
    }

    pub fn truncated_below(&self) -> bool {
        self.truncated_below
    }

    pub fn labels(&self, d: i32) -> &[String] {
        idx(self.d_min, self.dims.len(), d).map_or(&[], |i| &self.labels[i])
    }

    /// Matrix of generator `k` (0 or 1) out of degree `d`.
    pub fn op(&self, k: usize, d: i32) -> F2Matrix {
        let s = self.algebra.generator_degrees()[k];
        match idx(self.d_min, self.dims.len(), d) {
            Some(i) => self.ops[k][i].clone(),
            None => F2Matrix::zeros(self.dim(d + s), 0),
        }
    }

    /// Product of generators applied right to left: `word = [a, b]` means op_a ∘ op_b.
    pub fn compose(&self, word: &[usize], d: i32) -> F2Matrix {
        let mut m = F2Matrix::identity(self.dim(d));
        let mut cur = d;
        for &k in word.iter().rev() {
            m = self.op(k, cur).mul(&m).expect("shapes agree");
            cur += self.algebra.generator_degrees()[k];
        }
        m
    }

    /// Q₀ or Q₁ out of degree `d` (for A(1)-modules, Q₁ = Sq¹Sq² + Sq²Sq¹).
    pub fn q_matrix(&self, which: MargolisOp, d: i32) -> F2Matrix {
        match (self.algebra, which) {
            (_, MargolisOp::Q0) => self.op(0, d),
            (ModAlgebra::E1, MargolisOp::Q1) => self.op(1, d),
            (ModAlgebra::A1, MargolisOp::Q1) => {
                self.compose(&[0, 1], d).add(&self.compose(&[1, 0], d)).expect("shapes agree")
            }
        }
    }

    /// Whether degree `d` is at least 3 away from every truncated edge.
    pub fn is_reliable(&self, d: i32) -> bool {
        (!self.truncated_above || d + 3 <= self.d_max()) && (!self.truncated_below || d - 3 >= self.d_min)
    }

    pub fn margolis(&self, which: MargolisOp) -> MargolisDims {
        let s = which.degree();
        let dims = self
            .degrees()
            .map(|d| {
                let ker = self.dim(d) - self.q_matrix(which, d).rank();
                ker - self.q_matrix(which, d - s).rank()
            })
            .collect();
        let reliable = self.degrees().map(|d| self.is_reliable(d)).collect();
        MargolisDims { d_min: self.d_min, dims, reliable }
    }

    /// Restriction of scalars along E(1) ⊂ A(1).
    pub fn restrict_to_e1(&self) -> FiniteModule {
        if self.algebra == ModAlgebra::E1 {
            return self.clone();
        }
        let q0 = self.degrees().map(|d| self.q_matrix(MargolisOp::Q0, d)).collect();
        let q1 = self.degrees().map(|d| self.q_matrix(MargolisOp::Q1, d)).collect();
        FiniteModule { algebra: ModAlgebra::E1, ops: [q0, q1], ..self.clone() }
    }

    pub fn suspend(&self, k: i32) -> FiniteModule {
        FiniteModule { d_min: self.d_min + k, ..self.clone() }
    }

    pub fn direct_sum(&self, other: &FiniteModule) -> Result<FiniteModule> {
        if self.algebra != other.algebra {
            return Err(Error::Invalid("direct sum of modules over different algebras".into()));
        }
        if self.dims.is_empty() {
            return Ok(other.clone());
        }
        if other.dims.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.d_min.min(other.d_min);
        let hi = self.d_max().max(other.d_max());
        let dims: Vec<usize> = (lo..=hi).map(|d| self.dim(d) + other.dim(d)).collect();
        let ops = [0, 1].map(|k| (lo..=hi).map(|d| block_diag(&self.op(k, d), &other.op(k, d))).collect());
        let labels = (lo..=hi)
            .map(|d| self.labels(d).iter().chain(other.labels(d)).cloned().collect())
            .collect();
        Ok(FiniteModule {
            algebra: self.algebra,
            d_min: lo,
            dims,
            ops,
            truncated_below: self.truncated_below || other.truncated_below,
            truncated_above: self.truncated_above || other.truncated_above,
            labels,
        })
    }

    /// Drops zero-dimensional degrees at the ends of the window (never at a truncated edge).
    pub fn trimmed(&self) -> FiniteModule {
        let Some(first) = self.dims.iter().position(|&n| n > 0) else {
            return FiniteModule { truncated_below: self.truncated_below, truncated_above: self.truncated_above, ..FiniteModule::zero(self.algebra) };
        };
        let last = self.dims.iter().rposition(|&n| n > 0).unwrap();
        let first = if self.truncated_below { 0 } else { first };
        let last = if self.truncated_above { self.dims.len() - 1 } else { last };
        FiniteModule {
            algebra: self.algebra,
            d_min: self.d_min + first as i32,
            dims: self.dims[first..=last].to_vec(),
            ops: [0, 1].map(|k| self.ops[k][first..=last].to_vec()),
            truncated_below: self.truncated_below,
            truncated_above: self.truncated_above,
            labels: self.labels[first..=last].to_vec(),
        }
    }

    /// The degrees ≤ `hi` of this module, marked as truncated above.
    pub fn truncate_above(&self, hi: i32) -> FiniteModule {
        if hi >= self.d_max() {
            return self.clone();
        }
        if hi < self.d_min {
            return FiniteModule { truncated_above: true, ..FiniteModule::zero(self.algebra) };
        }
        let n = (hi - self.d_min + 1) as usize;
        let ops = [0, 1].map(|k| {
            let s = self.algebra.generator_degrees()[k];
            (0..n)
                .map(|i| {
                    let d = self.d_min + i as i32;
                    if d + s > hi { F2Matrix::zeros(0, self.dims[i]) } else { self.ops[k][i].clone() }
                })
                .collect()
        });
        FiniteModule {
            algebra: self.algebra,
            d_min: self.d_min,
            dims: self.dims[..n].to_vec(),
            ops,
            truncated_below: self.truncated_below,
            truncated_above: true,
            labels: self.labels[..n].to_vec(),
        }
    }

    /// The submodule spanned degreewise by `span`; errors if it is not closed under the action.
    pub fn submodule(&self, span: &BTreeMap<i32, Vec<F2Vector>>) -> Result<FiniteModule> {
        let subs: Vec<Subspace> =
            self.degrees().map(|d| Subspace::spanned_by(self.dim(d), span.get(&d).cloned().unwrap_or_default())).collect();
        let sub_at = |d: i32| idx(self.d_min, self.dims.len(), d).map(|i| &subs[i]);
        let mut ops: [Vec<F2Matrix>; 2] = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let s = self.algebra.generator_degrees()[k];
            for d in self.degrees() {
                let src = sub_at(d).unwrap();
                let op = self.op(k, d);
                let tgt_dim = sub_at(d + s).map_or(0, |t| t.dim());
                let mut cols = Vec::new();
                for v in &src.rows {
                    let w = op.mul_vec(v)?;
                    let c = match sub_at(d + s) {
                        Some(t) => t.coords(&w),
                        None => w.is_zero().then(|| F2Vector::zeros(0)),
                    };
                    cols.push(c.ok_or_else(|| Error::Invalid(format!("subspace not closed under the action at degree {d}")))?);
                }
                ops[k].push(matrix_from_columns(tgt_dim, &cols));
            }
        }
        let labels = self
            .degrees()
            .zip(&subs)
            .map(|(d, s)| {
                s.rows
                    .iter()
                    .map(|v| v.support().map(|j| self.labels(d)[j].clone()).collect::<Vec<_>>().join(" + "))
                    .collect()
            })
            .collect();
        let dims = subs.iter().map(|s| s.dim()).collect();
        Ok(FiniteModule { algebra: self.algebra, d_min: self.d_min, dims, ops, labels, ..self.clone() })
    }

    /// The quotient by the submodule spanned degreewise by `span`.
    pub fn quotient(&self, span: &BTreeMap<i32, Vec<F2Vector>>) -> Result<FiniteModule> {
        // closure check
        self.submodule(span)?;
        let subs: Vec<Subspace> =
            self.degrees().map(|d| Subspace::spanned_by(self.dim(d), span.get(&d).cloned().unwrap_or_default())).collect();
        let keep: Vec<Vec<usize>> = subs.iter().map(|s| s.non_pivots()).collect();
        let mut ops: [Vec<F2Matrix>; 2] = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let s = self.algebra.generator_degrees()[k];
            for (i, d) in self.degrees().enumerate() {
                let op = self.op(k, d);
                let cols: Vec<F2Vector> = match idx(self.d_min, self.dims.len(), d + s) {
                    Some(t) => keep[i]
                        .iter()
                        .map(|&j| {
                            let w = subs[t].reduce(&column(&op, j));
                            F2Vector::from_support(keep[t].len(), keep[t].iter().enumerate().filter(|(_, &c)| w.get(c)).map(|(n, _)| n))
                        })
                        .collect(),
                    None => keep[i].iter().map(|_| F2Vector::zeros(0)).collect(),
                };
                let rows = idx(self.d_min, self.dims.len(), d + s).map_or(0, |t| keep[t].len());
                ops[k].push(matrix_from_columns(rows, &cols));
            }
        }
        let labels = self.degrees().zip(&keep).map(|(d, ks)| ks.iter().map(|&j| self.labels(d)[j].clone()).collect()).collect();
        let dims = keep.iter().map(|k| k.len()).collect();
        Ok(FiniteModule { algebra: self.algebra, d_min: self.d_min, dims, ops, labels, ..self.clone() })
    }

    /// The module given by a cohomology presentation on the degrees `lo..=hi`,
    /// with the monomial basis in each degree.
    pub fn from_presentation(p: &SqAlgebraPresentation, algebra: ModAlgebra, lo: u32, hi: u32) -> Result<FiniteModule> {
        if lo > hi {
            return Err(Error::Invalid(format!("empty window [{lo}, {hi}]")));
        }
        let ring = p.ring();
        let monos: Vec<_> = (lo..=hi).map(|d| ring.monomials_of_degree(d)).collect();
        let index: Vec<BTreeMap<_, usize>> =
            monos.iter().map(|ms| ms.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect()).collect();
        let to_vec = |d: u32, f: &F2Poly| -> Result<Option<F2Vector>> {
            if d > hi {
                return Ok(None);
            }
            let ix = &index[(d - lo) as usize];
            let mut v = F2Vector::zeros(ix.len());
            for m in f.terms() {
                let i = ix.get(m).ok_or_else(|| Error::Internal("action is not homogeneous".into()))?;
                v.set(*i, true);
            }
            Ok(Some(v))
        };
        let mut ops: [Vec<F2Matrix>; 2] = [Vec::new(), Vec::new()];
        for d in lo..=hi {
            let ms = &monos[(d - lo) as usize];
            for k in 0..2 {
                let s = algebra.generator_degrees()[k] as u32;
                let rows = if d + s <= hi { monos[(d + s - lo) as usize].len() } else { 0 };
                let mut cols = Vec::with_capacity(ms.len());
                for m in ms {
                    let f = ring.monomial(m.clone());
                    let img = match (algebra, k) {
                        (_, 0) => p.sq(1, &f),
                        (ModAlgebra::A1, _) => p.sq(2, &f),
                        (ModAlgebra::E1, _) => &p.sq(3, &f) + &p.sq_word(&[2, 1], &f),
                    };
                    cols.push(to_vec(d + s, &img)?.unwrap_or_else(|| F2Vector::zeros(0)));
                }
                ops[k].push(matrix_from_columns(rows, &cols));
            }
        }
        let dims = monos.iter().map(|m| m.len()).collect();
        let labels = monos.iter().map(|ms| ms.iter().map(|m| F2Poly::format_monomial(ring, m)).collect()).collect();
        let m = FiniteModule {
            algebra,
            d_min: lo as i32,
            dims,
            ops,
            truncated_below: lo > 0,
            truncated_above: ring.ngens() > 0,
            labels,
        };
        m.check_shapes()?;
        m.check_relations()?;
        Ok(m)
    }

    /// JSON form: window, dimensions, labels and sparse action matrices.
    pub fn to_json(&self) -> serde_json::Value {
        let mut actions = Vec::new();
        for k in 0..2 {
            for d in self.degrees() {
                let m = self.op(k, d);
                let entries: Vec<[usize; 2]> =
                    (0..m.rows()).flat_map(|r| m.row(r).support().map(move |c| [r, c]).collect::<Vec<_>>()).collect();
                if !entries.is_empty() {
                    actions.push(json!({"op": self.algebra.generator_names()[k], "degree": d, "entries": entries}));
                }
            }
        }
        json!({
            "algebra": self.algebra.to_string(),
            "window": [self.d_min, self.d_max()],
            "dims": self.dims,
            "truncated_below": self.truncated_below,
            "truncated_above": self.truncated_above,
            "labels": self.labels,
            "actions": actions,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<FiniteModule> {
        let bad = |what: &str| Error::Parse(format!("module JSON: {what}"));
        let algebra = match v["algebra"].as_str() {
            Some("A(1)") => ModAlgebra::A1,
            Some("E(1)") => ModAlgebra::E1,
            _ => return Err(bad("algebra must be \"A(1)\" or \"E(1)\"")),
        };
        let d_min = v["window"][0].as_i64().ok_or_else(|| bad("window"))? as i32;
        let dims: Vec<usize> = v["dims"]
            .as_array()
            .ok_or_else(|| bad("dims"))?
            .iter()
            .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| bad("dims")))
            .collect::<Result<_>>()?;
        let dim = |d: i32| idx(d_min, dims.len(), d).map_or(0, |i| dims[i]);
        let mut ops = [0, 1].map(|k| {
            let s = algebra.generator_degrees()[k];
            (0..dims.len()).map(|i| F2Matrix::zeros(dim(d_min + i as i32 + s), dims[i])).collect::<Vec<_>>()
        });
        for a in v["actions"].as_array().map(|a| a.as_slice()).unwrap_or(&[]) {
            let k = algebra
                .generator_names()
                .iter()
                .position(|n| Some(*n) == a["op"].as_str())
                .ok_or_else(|| bad("unknown op"))?;
            let d = a["degree"].as_i64().ok_or_else(|| bad("degree"))? as i32;
            let i = idx(d_min, dims.len(), d).ok_or_else(|| bad("degree outside window"))?;
            for e in a["entries"].as_array().ok_or_else(|| bad("entries"))? {
                let (r, c) = (e[0].as_u64().ok_or_else(|| bad("entry"))? as usize, e[1].as_u64().ok_or_else(|| bad("entry"))? as usize);
                if r >= ops[k][i].rows() || c >= ops[k][i].cols() {
                    return Err(bad("entry out of range"));
                }
                ops[k][i].set(r, c, true);
            }
        }
        let mut m = FiniteModule::new(algebra, d_min, dims, ops)?.with_truncation(
            v["truncated_below"].as_bool().unwrap_or(false),
            v["truncated_above"].as_bool().unwrap_or(false),
        );
        if let Some(ls) = v["labels"].as_array() {
            let labels = ls
                .iter()
                .map(|l| l.as_array().map(|xs| xs.iter().map(|x| x.as_str().unwrap_or("").to_string()).collect()).unwrap_or_default())
                .collect();
            m = m.with_labels(labels)?;
        }
        Ok(m)
    }

    /// Graphviz picture: one node per basis element, stacked by degree; the first
    /// generator drawn solid, the second dashed.
    pub fn to_dot(&self, name: &str) -> String {
        let node = |d: i32, i: usize| format!("n{}_{i}", d - self.d_min);
        let mut out = format!("digraph \"{}\" {{\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n", name.replace('"', "'"));
        for d in self.degrees() {
            if self.dim(d) == 0 {
                continue;
            }
            out.push_str("  { rank=same;");
            for (i, l) in self.labels(d).iter().enumerate() {
                out.push_str(&format!(" {} [label=\"{}\\n({d})\"];", node(d, i), l.replace('"', "'")));
            }
            out.push_str(" }\n");
        }
        let names = self.algebra.generator_names();
        for k in 0..2 {
            let style = if k == 0 { "solid" } else { "dashed" };
            let s = self.algebra.generator_degrees()[k];
            for d in self.degrees() {
                let m = self.op(k, d);
                for r in 0..m.rows() {
                    for c in m.row(r).support() {
                        out.push_str(&format!(
                            "  {} -> {} [style={style}, label=\"{}\"];\n",
                            node(d, c),
                            node(d + s, r),
                            names[k]
                        ));
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Templates built from the algebras themselves.

fn coords_in(x: &SteenrodElt, basis: &[&SteenrodElt]) -> Result<F2Vector> {
    let mut terms: Vec<AdmissibleSeq> = basis.iter().flat_map(|b| b.terms().cloned()).collect();
    terms.extend(x.terms().cloned());
    terms.sort();
    terms.dedup();
    let col = |e: &SteenrodElt| F2Vector::from_support(terms.len(), e.terms().map(|t| terms.binary_search(t).unwrap()));
    let cols: Vec<F2Vector> = basis.iter().map(|b| col(b)).collect();
    let a = matrix_from_columns(terms.len(), &cols);
    a.solve(&col(x)).map_err(|_| Error::Internal(format!("{x} is not in the span of the subalgebra basis")))
}

struct RegularRep {
    module: FiniteModule,
    by_degree: Vec<Vec<SteenrodElt>>,
}

impl RegularRep {
    fn build(algebra: ModAlgebra) -> Result<RegularRep> {
        let basis = milnor::subalgebra_basis(algebra.hopf())?;
        let top = basis.iter().filter_map(|b| b.degree()).max().unwrap_or(0) as usize;
        let mut by_degree: Vec<Vec<SteenrodElt>> = vec![Vec::new(); top + 1];
        for b in basis {
            let d = b.degree().ok_or_else(|| Error::Internal("inhomogeneous basis element".into()))? as usize;
            by_degree[d].push(b);
        }
        let gens = algebra.generators();
        let mut ops: [Vec<F2Matrix>; 2] = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let s = algebra.generator_degrees()[k] as usize;
            for d in 0..=top {
                let tgt: Vec<&SteenrodElt> = by_degree.get(d + s).map(|v| v.iter().collect()).unwrap_or_default();
                let mut cols = Vec::new();
                for b in &by_degree[d] {
                    let x = steenrod::multiply(&gens[k], b);
                    cols.push(if tgt.is_empty() {
                        if !x.is_zero() {
                            return Err(Error::Internal("product leaves the subalgebra".into()));
                        }
                        F2Vector::zeros(0)
                    } else {
                        coords_in(&x, &tgt)?
                    });
                }
                ops[k].push(matrix_from_columns(tgt.len(), &cols));
            }
        }
        let dims = by_degree.iter().map(|v| v.len()).collect();
        let labels = by_degree.iter().map(|v| v.iter().map(|b| b.to_string()).collect()).collect();
        let module = FiniteModule::new(algebra, 0, dims, ops)?.with_labels(labels)?;
        Ok(RegularRep { module, by_degree })
    }

    /// Degreewise span of the left ideal generated by `gens`.
    fn left_ideal(&self, gens: &[SteenrodElt]) -> Result<BTreeMap<i32, Vec<F2Vector>>> {
        let mut out: BTreeMap<i32, Vec<F2Vector>> = BTreeMap::new();
        for level in &self.by_degree {
            for b in level {
                for g in gens {
                    let x = steenrod::multiply(b, g);
                    if x.is_zero() {
                        continue;
                    }
                    let d = x.degree().unwrap() as usize;
                    let tgt: Vec<&SteenrodElt> = self
                        .by_degree
                        .get(d)
                        .map(|v| v.iter().collect())
                        .ok_or_else(|| Error::Internal("product leaves the subalgebra".into()))?;
                    out.entry(d as i32).or_default().push(coords_in(&x, &tgt)?);
                }
            }
        }
        Ok(out)
    }

    fn augmentation_ideal(&self) -> BTreeMap<i32, Vec<F2Vector>> {
        let m = &self.module;
        m.degrees()
            .filter(|&d| d > 0)
            .map(|d| (d, (0..m.dim(d)).map(|i| F2Vector::from_support(m.dim(d), [i])).collect()))
            .collect()
    }
}

/// Names of the standard pieces.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum Family {
    Z2,
    /// Augmentation ideal of A(1).
    I,
    /// A(1)/A(1)Sq³.
    J,
    /// A(1)/A(1){Sq¹, Sq²Sq³}.
    K,
    A1,
    /// Augmentation ideal of E(1).
    L,
    /// E(1)/E(1)Sq¹.
    C,
    E1,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Z2 => "Z2",
            Family::I => "I",
            Family::J => "J",
            Family::K => "K",
            Family::A1 => "A(1)",
            Family::L => "L",
            Family::C => "C",
            Family::E1 => "E(1)",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        [Family::Z2, Family::I, Family::J, Family::K, Family::A1, Family::L, Family::C, Family::E1]
            .into_iter()
            .find(|f| f.name() == s || format!("{f:?}") == s)
    }

    pub fn is_free(self) -> bool {
        matches!(self, Family::A1 | Family::E1)
    }

    pub fn belongs_to(self, algebra: ModAlgebra) -> bool {
        algebra.families().contains(&self)
    }

    /// The template module (unsuspended) over `algebra`.
    pub fn template(self, algebra: ModAlgebra) -> Result<&'static FiniteModule> {
        if !self.belongs_to(algebra) {
            return Err(Error::Invalid(format!("{} is not an {algebra}-module piece", self.name())));
        }
        let all = templates()?;
        Ok(&all[&(algebra, self)])
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn build_templates() -> Result<BTreeMap<(ModAlgebra, Family), FiniteModule>> {
    let mut out = BTreeMap::new();
    let a1 = RegularRep::build(ModAlgebra::A1)?;
    let e1 = RegularRep::build(ModAlgebra::E1)?;
    out.insert((ModAlgebra::A1, Family::Z2), FiniteModule::trivial(ModAlgebra::A1, 0));
    out.insert((ModAlgebra::A1, Family::A1), a1.module.clone());
    out.insert((ModAlgebra::A1, Family::I), a1.module.submodule(&a1.augmentation_ideal())?.trimmed());
    out.insert((ModAlgebra::A1, Family::J), a1.module.quotient(&a1.left_ideal(&[SteenrodElt::sq(3)])?)?.trimmed());
    out.insert(
        (ModAlgebra::A1, Family::K),
        a1.module.quotient(&a1.left_ideal(&[SteenrodElt::sq(1), steenrod::word(&[2, 3])])?)?.trimmed(),
    );
    out.insert((ModAlgebra::E1, Family::Z2), FiniteModule::trivial(ModAlgebra::E1, 0));
    out.insert((ModAlgebra::E1, Family::E1), e1.module.clone());
    out.insert((ModAlgebra::E1, Family::L), e1.module.submodule(&e1.augmentation_ideal())?.trimmed());
    out.insert((ModAlgebra::E1, Family::C), e1.module.quotient(&e1.left_ideal(&[SteenrodElt::sq(1)])?)?.trimmed());
    Ok(out)
}

fn templates() -> Result<&'static BTreeMap<(ModAlgebra, Family), FiniteModule>> {
    static CELL: OnceLock<std::result::Result<BTreeMap<(ModAlgebra, Family), FiniteModule>, Error>> = OnceLock::new();
    CELL.get_or_init(build_templates).as_ref().map_err(|e| e.clone())
}

/// A suspended standard piece.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct StandardPiece {
    pub family: Family,
    pub suspension: i32,
}

impl StandardPiece {
    pub fn new(family: Family, suspension: i32) -> Self {
        StandardPiece { family, suspension }
    }

    pub fn module(&self, algebra: ModAlgebra) -> Result<FiniteModule> {
        Ok(self.family.template(algebra)?.suspend(self.suspension))
    }
}

impl fmt::Display for StandardPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.suspension {
            0 => write!(f, "{}", self.family),
            s => write!(f, "Σ^{s} {}", self.family),
        }
    }
}

/// Direct sum of pieces.
pub fn sum_of_pieces(algebra: ModAlgebra, pieces: &[StandardPiece]) -> Result<FiniteModule> {
    let mut m = FiniteModule::zero(algebra);
    for p in pieces {
        m = m.direct_sum(&p.module(algebra)?)?;
    }
    Ok(m)
}

/// A family allowed at suspensions `s ≡ residue (mod modulus)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct CatalogEntry {
    pub family: Family,
    pub modulus: i32,
    pub residue: i32,
}

impl CatalogEntry {
    pub fn any(family: Family) -> Self {
        CatalogEntry { family, modulus: 1, residue: 0 }
    }

    pub fn periodic(family: Family, modulus: i32, residue: i32) -> Self {
        CatalogEntry { family, modulus, residue: residue.rem_euclid(modulus) }
    }

    fn allows(&self, s: i32) -> bool {
        s.rem_euclid(self.modulus) == self.residue
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Catalog {
    pub algebra: ModAlgebra,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn new(algebra: ModAlgebra, entries: Vec<CatalogEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| !e.family.belongs_to(algebra) || e.modulus < 1) {
            return Err(Error::Invalid(format!("catalog entry {} is not valid over {algebra}", e.family)));
        }
        Ok(Catalog { algebra, entries })
    }

    /// Every family of the algebra at every suspension.
    pub fn full(algebra: ModAlgebra) -> Self {
        Catalog { algebra, entries: algebra.families().iter().map(|&f| CatalogEntry::any(f)).collect() }
    }

    pub fn of_families(algebra: ModAlgebra, families: &[Family]) -> Result<Self> {
        Catalog::new(algebra, families.iter().map(|&f| CatalogEntry::any(f)).collect())
    }

    /// Free A(1) anywhere plus 8i-fold suspensions of Z₂, Σ⁻¹I, Σ⁴J, Σ⁴K, where J is
    /// centred on degree 0; with the template J in degrees 0..4 that is Σ²J.
    pub fn bpsp3() -> Self {
        Catalog {
            algebra: ModAlgebra::A1,
            entries: vec![
                CatalogEntry::periodic(Family::Z2, 8, 0),
                CatalogEntry::periodic(Family::I, 8, -1),
                CatalogEntry::periodic(Family::J, 8, 2),
                CatalogEntry::periodic(Family::K, 8, 4),
                CatalogEntry::any(Family::A1),
            ],
        }
    }
}

/// Outcome of [`stable_type_solve`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableTypeReport {
    /// Piece multisets matching all invariants, sorted, in search order.
    pub solutions: Vec<Vec<StandardPiece>>,
    /// False if the search stopped at the solution limit or node budget.
    pub exhaustive: bool,
    /// Conclusions in degrees above this are provisional (window truncated).
    pub provisional_above: Option<i32>,
    /// For a unique solution: whether an explicit isomorphism was constructed.
    pub isomorphism_verified: Option<bool>,
}

impl StableTypeReport {
    pub fn unique(&self) -> Option<&[StandardPiece]> {
        (self.exhaustive && self.solutions.len() == 1).then(|| self.solutions[0].as_slice())
    }

    pub fn is_ambiguous(&self) -> bool {
        self.solutions.len() > 1
    }
}

struct PieceProfile {
    entry: usize,
    family: Family,
    offset: i32,
    dims: Vec<i64>,
    h0: Vec<i64>,
    h1: Vec<i64>,
}

struct Solver<'a> {
    lo: i32,
    /// Degrees branched on (and matched exactly); the rest only bound from above.
    solve_len: usize,
    dims: Vec<i64>,
    h0: Vec<i64>,
    h1: Vec<i64>,
    reliable: Vec<bool>,
    complete_above: bool,
    profiles: &'a [PieceProfile],
    rules: &'a [CatalogEntry],
    acc: [Vec<i64>; 3],
    chosen: Vec<StandardPiece>,
    solutions: Vec<Vec<StandardPiece>>,
    limit: usize,
    nodes: u64,
    budget: u64,
    stopped: bool,
}

impl Solver<'_> {
    fn len(&self) -> usize {
        self.dims.len()
    }

    /// Adds `n` copies of a profile with bottom at index `i`; returns false if a bound breaks.
    fn add(&mut self, p: &PieceProfile, i: usize, n: i64) -> bool {
        let mut ok = true;
        for (j, ((&a, &b), &c)) in p.dims.iter().zip(&p.h0).zip(&p.h1).enumerate() {
            let t = i + j;
            if t >= self.len() {
                break;
            }
            self.acc[0][t] += n * a;
            self.acc[1][t] += n * b;
            self.acc[2][t] += n * c;
            if n > 0
                && (self.acc[0][t] > self.dims[t]
                    || (self.reliable[t] && (self.acc[1][t] > self.h0[t] || self.acc[2][t] > self.h1[t])))
            {
                ok = false;
            }
        }
        ok
    }

    fn run(&mut self, i: usize) {
        self.nodes += 1;
        if self.stopped || self.nodes > self.budget {
            self.stopped = true;
            return;
        }
        if i == self.solve_len {
            let mut s = self.chosen.clone();
            s.sort();
            self.solutions.push(s);
            if self.solutions.len() >= self.limit {
                self.stopped = true;
            }
            return;
        }
        let d = self.lo + i as i32;
        let cands: Vec<usize> = (0..self.profiles.len())
            .filter(|&c| {
                let p = &self.profiles[c];
                let s = d - p.offset;
                let fits = !self.complete_above || i + p.dims.len() <= self.len();
                fits && p.dims[0] > 0 && self.catalog_allows(c, s)
            })
            .collect();
        let r = self.dims[i] - self.acc[0][i];
        self.assign(i, &cands, 0, r);
    }

    fn catalog_allows(&self, c: usize, s: i32) -> bool {
        self.rules[self.profiles[c].entry].allows(s)
    }

    fn assign(&mut self, i: usize, cands: &[usize], k: usize, r: i64) {
        if self.stopped {
            return;
        }
        if k == cands.len() {
            if r == 0 && (!self.reliable[i] || (self.acc[1][i] == self.h0[i] && self.acc[2][i] == self.h1[i])) {
                self.run(i + 1);
            }
            return;
        }
        let p = &self.profiles[cands[k]];
        let s = self.lo + i as i32 - p.offset;
        let max = r / p.dims[0];
        for n in (0..=max).rev() {
            let ok = self.add(p, i, n);
            if ok {
                for _ in 0..n {
                    self.chosen.push(StandardPiece::new(p.family, s));
                }
                self.assign(i, cands, k + 1, r - n * p.dims[0]);
                self.chosen.truncate(self.chosen.len() - n as usize);
            }
            self.add(p, i, -n);
            if self.stopped {
                return;
            }
        }
    }
}

/// Default cap on the number of solutions collected.
pub const DEFAULT_SOLUTION_LIMIT: usize = 16;
const NODE_BUDGET: u64 = 5_000_000;

/// Decomposes `m` into catalog pieces by matching the Poincaré series and both
/// Margolis homologies degree by degree (bounded exhaustive search). A unique
/// solution is confirmed by building an explicit isomorphism.
pub fn stable_type_solve(m: &FiniteModule, catalog: &Catalog, max_solutions: usize) -> Result<StableTypeReport> {
    if catalog.algebra != m.algebra {
        return Err(Error::Invalid(format!("catalog is over {} but module is over {}", catalog.algebra, m.algebra)));
    }
    let m = m.trimmed();
    let provisional_above = m.truncated_above.then(|| m.d_max() - 3);
    if m.is_zero() {
        return Ok(StableTypeReport { solutions: vec![Vec::new()], exhaustive: true, provisional_above, isomorphism_verified: Some(true) });
    }
    let profiles: Vec<PieceProfile> = catalog
        .entries
        .iter()
        .enumerate()
        .map(|(entry, e)| {
            let t = e.family.template(m.algebra)?;
            let h0 = t.margolis(MargolisOp::Q0);
            let h1 = t.margolis(MargolisOp::Q1);
            Ok(PieceProfile {
                entry,
                family: e.family,
                offset: t.d_min(),
                dims: t.dims().iter().map(|&n| n as i64).collect(),
                h0: h0.dims.iter().map(|&n| n as i64).collect(),
                h1: h1.dims.iter().map(|&n| n as i64).collect(),
            })
        })
        .collect::<Result<_>>()?;
    let h0 = m.margolis(MargolisOp::Q0);
    let h1 = m.margolis(MargolisOp::Q1);
    let n = m.dims().len();
    let mut solver = Solver {
        lo: m.d_min(),
        solve_len: if m.truncated_above { n.saturating_sub(3) } else { n },
        dims: m.dims().iter().map(|&x| x as i64).collect(),
        h0: h0.dims.iter().map(|&x| x as i64).collect(),
        h1: h1.dims.iter().map(|&x| x as i64).collect(),
        reliable: h0.reliable.clone(),
        complete_above: !m.truncated_above,
        profiles: &profiles,
        rules: &catalog.entries,
        acc: [vec![0; n], vec![0; n], vec![0; n]],
        chosen: Vec::new(),
        solutions: Vec::new(),
        limit: max_solutions.max(2),
        nodes: 0,
        budget: NODE_BUDGET,
        stopped: false,
    };
    solver.run(0);
    let exhaustive = !solver.stopped;
    let mut solutions = solver.solutions;
    if solutions.is_empty() {
        return Err(Error::NotInCatalog(if exhaustive {
            "no combination of pieces matches the Poincaré and Margolis series".into()
        } else {
            "search budget exhausted before a match was found".into()
        }));
    }
    solutions.truncate(max_solutions.max(1));
    let isomorphism_verified = if exhaustive && solutions.len() == 1 {
        let window = if m.truncated_above { m.truncate_above(m.d_max() - 3) } else { m.clone() };
        Some(verify_isomorphism(&window, &solutions[0])?)
    } else {
        None
    };
    Ok(StableTypeReport { solutions, exhaustive, provisional_above, isomorphism_verified })
}

/// Basis of Hom(p, m) in the category of graded modules, as degreewise matrices.
pub fn hom_basis(p: &FiniteModule, m: &FiniteModule) -> Result<Vec<Vec<F2Matrix>>> {
    if p.algebra != m.algebra {
        return Err(Error::Invalid("modules over different algebras".into()));
    }
    let mut offsets = BTreeMap::new();
    let mut nvars = 0usize;
    for d in p.degrees() {
        offsets.insert(d, nvars);
        nvars += p.dim(d) * m.dim(d);
    }
    let var = |d: i32, r: usize, c: usize| offsets[&d] + r * p.dim(d) + c;
    let mut rows = Vec::new();
    for k in 0..2 {
        let s = p.algebra.generator_degrees()[k];
        for d in p.degrees() {
            let t = d + s;
            let (opp, opm) = (p.op(k, d), m.op(k, d));
            for r in 0..m.dim(t) {
                for c in 0..p.dim(d) {
                    let mut row = F2Vector::zeros(nvars);
                    // (f_t ∘ opP)[r][c] = Σ_j f_t[r][j] opP[j][c]
                    if p.dim(t) > 0 {
                        for j in 0..p.dim(t) {
                            if opp.get(j, c) {
                                row.flip(var(t, r, j));
                            }
                        }
                    }
                    // (opM ∘ f_d)[r][c] = Σ_j opM[r][j] f_d[j][c]
                    for j in opm.row(r).support() {
                        row.flip(var(d, j, c));
                    }
                    if !row.is_zero() {
                        rows.push(row);
                    }
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..nvars).map(|i| F2Vector::from_support(nvars, [i])).collect()
    } else {
        F2Matrix::from_rows(nvars, rows)?.kernel()
    };
    Ok(kernel
        .into_iter()
        .map(|v| {
            p.degrees()
                .map(|d| {
                    let mut f = F2Matrix::zeros(m.dim(d), p.dim(d));
                    for r in 0..m.dim(d) {
                        for c in 0..p.dim(d) {
                            if v.get(var(d, r, c)) {
                                f.set(r, c, true);
                            }
                        }
                    }
                    f
                })
                .collect()
        })
        .collect())
}

const EMBEDDING_ATTEMPTS: u64 = 24;
const TRIES_PER_PIECE: usize = 64;

/// Embeds the pieces into `m` one at a time (free pieces first, then larger pieces,
/// lowest degree first) using random elements of each Hom space, restarting with a new
/// seed on a dead end; true once the combined map is an isomorphism on the window.
/// A false result means no embedding was found, not that none exists.
fn verify_isomorphism(m: &FiniteModule, pieces: &[StandardPiece]) -> Result<bool> {
    let mut order: Vec<&StandardPiece> = pieces.iter().collect();
    order.sort_by_key(|p| (!p.family.is_free(), std::cmp::Reverse(p.family.template(m.algebra).map_or(0, |t| t.total_dim())), p.suspension, p.family));
    let mut homs: BTreeMap<StandardPiece, (FiniteModule, Vec<Vec<F2Matrix>>)> = BTreeMap::new();
    for p in &order {
        if !homs.contains_key(p) {
            let mut src = p.module(m.algebra)?;
            if m.truncated_above {
                src = src.truncate_above(m.d_max());
            }
            let h = hom_basis(&src, m)?;
            homs.insert(**p, (src, h));
        }
    }
    'attempt: for seed in 0..EMBEDDING_ATTEMPTS {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut images: BTreeMap<i32, Subspace> = m.degrees().map(|d| (d, Subspace::new(m.dim(d)))).collect();
        for p in &order {
            let (src, basis) = &homs[p];
            let mut placed = false;
            for _ in 0..TRIES_PER_PIECE {
                let pick: Vec<bool> = basis.iter().map(|_| rng.random()).collect();
                let mut trial = images.clone();
                let ok = src.degrees().enumerate().all(|(i, d)| {
                    let mut f = F2Matrix::zeros(m.dim(d), src.dim(d));
                    for (h, _) in basis.iter().zip(&pick).filter(|(_, &b)| b) {
                        f = f.add(&h[i]).expect("same shape");
                    }
                    match trial.get_mut(&d) {
                        Some(sp) => (0..f.cols()).all(|c| sp.insert(column(&f, c))),
                        None => f.cols() == 0,
                    }
                });
                if ok {
                    images = trial;
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'attempt;
            }
        }
        return Ok(m.degrees().all(|d| images[&d].dim() == m.dim(d)));
    }
    Ok(false)
}

/// A degree-preserving module map, stored by source degree.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    source: FiniteModule,
    target: FiniteModule,
    maps: Vec<F2Matrix>,
}

impl ModuleMap {
    /// Validates shapes and that the map commutes with both generators.
    pub fn new(source: FiniteModule, target: FiniteModule, maps: Vec<F2Matrix>) -> Result<Self> {
        if source.algebra != target.algebra {
            return Err(Error::Invalid("source and target are over different algebras".into()));
        }
        if maps.len() != source.dims.len() {
            return Err(Error::Dimension { expected: source.dims.len(), got: maps.len() });
        }
        for (d, f) in source.degrees().zip(&maps) {
            if f.cols() != source.dim(d) || f.rows() != target.dim(d) {
                return Err(Error::Invalid(format!("map at degree {d} has the wrong shape")));
            }
        }
        let f = ModuleMap { source, target, maps };
        for k in 0..2 {
            let s = f.source.algebra.generator_degrees()[k];
            for d in f.source.degrees() {
                if f.target.truncated_above && d + s > f.target.d_max() {
                    continue;
                }
                let lhs = f.at(d + s).mul(&f.source.op(k, d))?;
                let rhs = f.target.op(k, d).mul(&f.at(d))?;
                if lhs != rhs {
                    return Err(Error::Invalid(format!(
                        "map does not commute with {} at degree {d}",
                        f.source.algebra.generator_names()[k]
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn identity(m: &FiniteModule) -> Self {
        let maps = m.degrees().map(|d| F2Matrix::identity(m.dim(d))).collect();
        ModuleMap { source: m.clone(), target: m.clone(), maps }
    }

    pub fn zero(source: &FiniteModule, target: &FiniteModule) -> Result<Self> {
        let maps = source.degrees().map(|d| F2Matrix::zeros(target.dim(d), source.dim(d))).collect();
        ModuleMap::new(source.clone(), target.clone(), maps)
    }

    /// Some module map sending `x ∈ source_d` to `y ∈ target_d` (for a cyclic source
    /// generated by `x` it is the unique one).
    pub fn extending(source: &FiniteModule, target: &FiniteModule, d: i32, x: &F2Vector, y: &F2Vector) -> Result<Self> {
        let homs = hom_basis(source, target)?;
        let i = idx(source.d_min, source.dims.len(), d).ok_or_else(|| Error::Invalid(format!("degree {d} outside source")))?;
        if x.len() != source.dim(d) || y.len() != target.dim(d) {
            return Err(Error::Dimension { expected: source.dim(d), got: x.len() });
        }
        let cols: Vec<F2Vector> = homs.iter().map(|h| h[i].mul_vec(x)).collect::<Result<_>>()?;
        let coeffs = matrix_from_columns(target.dim(d), &cols).solve(y)?;
        let maps = (0..source.dims.len())
            .map(|j| {
                let mut acc = F2Matrix::zeros(target.dim(source.d_min + j as i32), source.dims[j]);
                for b in coeffs.support() {
                    acc = acc.add(&homs[b][j]).expect("same shape");
                }
                acc
            })
            .collect();
        ModuleMap::new(source.clone(), target.clone(), maps)
    }

    pub fn source(&self) -> &FiniteModule {
        &self.source
    }

    pub fn target(&self) -> &FiniteModule {
        &self.target
    }

    pub fn at(&self, d: i32) -> F2Matrix {
        match idx(self.source.d_min, self.source.dims.len(), d) {
            Some(i) => self.maps[i].clone(),
            None => F2Matrix::zeros(self.target.dim(d), 0),
        }
    }

    /// First degree where the map is not injective.
    pub fn injectivity_failure(&self) -> Option<i32> {
        self.source.degrees().find(|&d| self.at(d).rank() < self.source.dim(d))
    }

    /// First degree where the induced map on Q₀-Margolis homology is not injective.
    pub fn q0_margolis_failure(&self) -> Option<i32> {
        let (c, t) = (&self.source, &self.target);
        c.degrees().find(|&d| {
            let ker = c.q_matrix(MargolisOp::Q0, d).kernel();
            let im_c = c.q_matrix(MargolisOp::Q0, d - 1).rank();
            let h_c = ker.len() - im_c;
            if h_c == 0 {
                return false;
            }
            let q_in = t.q_matrix(MargolisOp::Q0, d - 1);
            let im_t: Vec<F2Vector> = (0..q_in.cols()).map(|j| column(&q_in, j)).collect();
            let base = Subspace::spanned_by(t.dim(d), im_t.clone());
            let f = self.at(d);
            let mut both = base.clone();
            for z in &ker {
                both.insert(f.mul_vec(z).expect("shape"));
            }
            // dim of f(ker) modulo im must equal the rank of H(C) in this degree
            both.dim() - base.dim() < h_c
        })
    }
}

/// Result of the split-injection test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitCertificate {
    pub hypotheses_met: bool,
    pub f_injective: bool,
    pub q0_margolis_injective: bool,
    pub split_guaranteed: bool,
    /// First degree where injectivity (of f or of H(f; Q₀)) fails.
    pub witness_degree: Option<i32>,
    pub source_type: Option<Vec<StandardPiece>>,
    pub target_type: Option<Vec<StandardPiece>>,
}

/// Source a sum of Z₂, J, A(1) suspensions, target a sum of Z₂, I, J, K, A(1)
/// suspensions, f injective and injective on Q₀-Margolis homology ⇒ f splits.
pub fn check_split_criterion(f: &ModuleMap) -> Result<SplitCertificate> {
    let (c, d) = (&f.source, &f.target);
    if c.truncated_above || d.truncated_above || c.truncated_below || d.truncated_below {
        return Err(Error::Invalid("split criterion needs complete (untruncated) modules".into()));
    }
    if !c.is_zero() && (c.d_min < d.d_min.min(c.d_min) || c.degrees().any(|x| c.dim(x) > 0 && x > d.d_max() && !d.is_zero())) {
        return Err(Error::Invalid("source window is not contained in the target window".into()));
    }
    let kind = |m: &FiniteModule, fams: &[Family]| -> Result<Option<Vec<StandardPiece>>> {
        if m.algebra != ModAlgebra::A1 {
            return Ok(None);
        }
        match stable_type_solve(m, &Catalog::of_families(ModAlgebra::A1, fams)?, 1) {
            Ok(r) => Ok(r.solutions.into_iter().next()),
            Err(Error::NotInCatalog(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let source_type = kind(c, &[Family::Z2, Family::J, Family::A1])?;
    let target_type = kind(d, &[Family::Z2, Family::I, Family::J, Family::K, Family::A1])?;
    let hypotheses_met = source_type.is_some() && target_type.is_some();
    let inj = f.injectivity_failure();
    let marg = f.q0_margolis_failure();
    Ok(SplitCertificate {
        hypotheses_met,
        f_injective: inj.is_none(),
        q0_margolis_injective: marg.is_none(),
        split_guaranteed: hypotheses_met && inj.is_none() && marg.is_none(),
        witness_degree: inj.or(marg),
        source_type,
        target_type,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(f: Family, a: ModAlgebra) -> &'static FiniteModule {
        f.template(a).unwrap()
    }

    #[test]
    fn template_dimensions() {
        use ModAlgebra::{A1 as OverA, E1 as OverE};
        let a = |f| (t(f, OverA).d_min(), t(f, OverA).dims().to_vec());
        let e = |f| (t(f, OverE).d_min(), t(f, OverE).dims().to_vec());
        assert_eq!(a(Family::A1), (0, vec![1, 1, 1, 2, 1, 1, 1]));
        assert_eq!(a(Family::I), (1, vec![1, 1, 2, 1, 1, 1]));
        assert_eq!(a(Family::J), (0, vec![1, 1, 1, 1, 1]));
        assert_eq!(a(Family::K), (0, vec![1, 0, 1, 1]));
        assert_eq!(e(Family::E1), (0, vec![1, 1, 0, 1, 1]));
        assert_eq!(e(Family::L), (1, vec![1, 0, 1, 1]));
        assert_eq!(e(Family::C), (0, vec![1, 0, 0, 1]));
    }

    #[test]
    fn zero_module_has_empty_type() {
        let r = stable_type_solve(&FiniteModule::zero(ModAlgebra::E1), &Catalog::full(ModAlgebra::E1), 4).unwrap();
        assert_eq!(r.unique(), Some(&[][..]));
    }

    #[test]
    fn free_module_recognized() {
        let a1 = t(Family::A1, ModAlgebra::A1);
        let r = stable_type_solve(a1, &Catalog::full(ModAlgebra::A1), 4).unwrap();
        assert_eq!(r.unique(), Some(&[StandardPiece::new(Family::A1, 0)][..]));
        assert_eq!(r.isomorphism_verified, Some(true));
    }

    #[test]
    fn bad_relation_rejected() {
        // Sq¹ twice nonzero: 0 → 1 → 2
        let ops = [
            vec![F2Matrix::identity(1), F2Matrix::identity(1), F2Matrix::zeros(0, 1)],
            vec![F2Matrix::zeros(1, 1), F2Matrix::zeros(0, 1), F2Matrix::zeros(0, 1)],
        ];
        assert!(FiniteModule::new(ModAlgebra::A1, 0, vec![1, 1, 1], ops).is_err());
    }

    #[test]
    fn json_round_trip() {
        let j = t(Family::J, ModAlgebra::A1);
        let back = FiniteModule::from_json(&j.to_json()).unwrap();
        assert_eq!(&back, j);
    }
}
