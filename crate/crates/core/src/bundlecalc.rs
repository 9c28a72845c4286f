//! Leray–Hirsch reduction and integration along the fiber for the CP² and HP² bundles.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::cartan::{AlgebraMap, SqAlgebraPresentation};
use crate::error::{Error, Result};
use crate::f2core::{F2Matrix, F2Poly, F2Vector, Monomial};
use crate::presets;

/// Which of the two bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum BundleKind {
    /// CP² → BS(U(1)×U(2)) → BSU(3)
    Cp2,
    /// HP² → BPSp(2,1) → BPSp(3)
    Hp2,
}

struct DegreeSystem {
    /// (basis index, base monomial) per column.
    columns: Vec<(usize, Monomial)>,
    total_monos: HashMap<Monomial, usize>,
    inverse: F2Matrix,
}

/// Base and total cohomology with π*, the Leray–Hirsch basis and w(τ).
pub struct FiberBundleData {
    pub kind: BundleKind,
    pub base: SqAlgebraPresentation,
    pub total: SqAlgebraPresentation,
    pub pullback: AlgebraMap,
    pub fiber_dim: u32,
    pub lh_basis: Vec<F2Poly>,
    pub w_tau: F2Poly,
    pub max_degree: u32,
    systems: RwLock<HashMap<u32, Arc<DegreeSystem>>>,
}

impl std::fmt::Debug for FiberBundleData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiberBundleData").field("kind", &self.kind).field("lh_basis", &self.lh_basis).finish()
    }
}

pub const DEFAULT_MAX_DEGREE: u32 = 96;

impl FiberBundleData {
    pub fn preset(kind: BundleKind) -> Result<Self> {
        match kind {
            BundleKind::Cp2 => {
                let total = presets::cp2_total()?;
                let r = total.ring().clone();
                Ok(FiberBundleData {
                    kind,
                    base: presets::bsu3()?,
                    pullback: presets::cp2_pullback()?,
                    fiber_dim: 4,
                    lh_basis: vec![r.one(), r.parse("x2")?, r.parse("x2^2")?],
                    w_tau: r.parse("1 + x2 + x4")?,
                    total,
                    max_degree: DEFAULT_MAX_DEGREE,
                    systems: RwLock::default(),
                })
            }
            BundleKind::Hp2 => {
                let total = presets::bpsp21()?;
                let r = total.ring().clone();
                let w4 = r.parse("u2^2 + u4")?;
                Ok(FiberBundleData {
                    kind,
                    base: presets::bpsp3()?,
                    pullback: presets::hp2_pullback()?,
                    fiber_dim: 8,
                    lh_basis: vec![r.one(), w4.clone(), w4.square()],
                    w_tau: r.parse("1 + (u4 + u2^2) + (u3^2 + u2*u4) + u3*u4 + u8")?,
                    total,
                    max_degree: DEFAULT_MAX_DEGREE,
                    systems: RwLock::default(),
                })
            }
        }
    }

    pub fn with_max_degree(mut self, d: u32) -> Self {
        self.max_degree = d;
        self
    }

    fn system(&self, n: u32) -> Result<Arc<DegreeSystem>> {
        if n > self.max_degree {
            return Err(Error::DegreeCap { requested: n, cap: self.max_degree });
        }
        if let Some(s) = self.systems.read().unwrap().get(&n) {
            return Ok(s.clone());
        }
        let tr = self.total.ring();
        let total_list = tr.monomials_of_degree(n);
        let total_monos: HashMap<Monomial, usize> = total_list.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut columns = Vec::new();
        let mut cols = Vec::new();
        for (i, b) in self.lh_basis.iter().enumerate() {
            let db = b.degree().unwrap_or(0);
            if db > n {
                continue;
            }
            for m in self.base.ring().monomials_of_degree(n - db) {
                let img = &self.pullback.apply(&self.base.ring().monomial(m.clone()))? * b;
                cols.push(F2Vector::from_support(total_list.len(), img.terms().map(|t| total_monos[t])));
                columns.push((i, m));
            }
        }
        if cols.len() != total_list.len() {
            return Err(Error::Internal(format!(
                "Leray–Hirsch count fails in degree {n}: {} products for {} monomials",
                cols.len(),
                total_list.len()
            )));
        }
        let mat = F2Matrix::from_rows(total_list.len(), cols)?.transpose();
        let inverse = mat
            .inverse()
            .map_err(|_| Error::Internal(format!("Leray–Hirsch products are dependent in degree {n}")))?;
        let s = Arc::new(DegreeSystem { columns, total_monos, inverse });
        self.systems.write().unwrap().insert(n, s.clone());
        Ok(s)
    }

    /// Unique base coefficients r_i with f = Σ π*(r_i)·b_i.
    pub fn lh_reduce(&self, f: &F2Poly) -> Result<Vec<F2Poly>> {
        if f.ring() != self.total.ring() {
            return Err(Error::RingMismatch);
        }
        let br = self.base.ring();
        let mut out = vec![br.zero(); self.lh_basis.len()];
        for (n, part) in f.parts() {
            let sys = self.system(n)?;
            let v = F2Vector::from_support(sys.total_monos.len(), part.terms().map(|t| sys.total_monos[t]));
            let x = sys.inverse.mul_vec(&v)?;
            for j in x.support() {
                let (i, m) = &sys.columns[j];
                out[*i].toggle(m.clone());
            }
        }
        Ok(out)
    }

    /// π_!(f): the coefficient of the top Leray–Hirsch basis element.
    pub fn fiber_integrate(&self, f: &F2Poly) -> Result<F2Poly> {
        Ok(self.lh_reduce(f)?.pop().expect("nonempty basis"))
    }

    /// Re-expand Σ π*(r_i)·b_i.
    pub fn lh_expand(&self, coeffs: &[F2Poly]) -> Result<F2Poly> {
        let mut acc = self.total.ring().zero();
        for (r, b) in coeffs.iter().zip(&self.lh_basis) {
            acc.add_assign(&(&self.pullback.apply(r)? * b));
        }
        Ok(acc)
    }

    /// dim total_n = Σ_i dim base_{n − deg b_i} for all n ≤ d.
    pub fn dimension_bookkeeping(&self, d: u32) -> bool {
        let bs = self.base.ring().series(d);
        let ts = self.total.ring().series(d);
        (0..=d).all(|n| {
            let sum: u64 = self
                .lh_basis
                .iter()
                .filter_map(|b| b.degree().or(Some(0)))
                .filter(|&db| db <= n)
                .map(|db| bs.get(n - db))
                .sum();
            sum == ts.get(n)
        })
    }

    /// Reduce a base-ring element modulo the last base generator (y6 or t12).
    pub fn mod_top_generator(&self, f: &F2Poly) -> F2Poly {
        let last = self.base.ring().ngens() - 1;
        F2Poly::from_monomials(self.base.ring(), f.terms().filter(|m| m.exponents()[last] == 0).cloned())
    }
}

/// A failing table entry.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TableMismatch {
    pub check: String,
    pub input: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of a transfer-table sweep.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct TableReport {
    pub checked: usize,
    pub mismatches: Vec<TableMismatch>,
}

impl TableReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn record(&mut self, check: &str, input: &F2Poly, expected: &F2Poly, got: &F2Poly) {
        self.checked += 1;
        if expected != got {
            self.mismatches.push(TableMismatch {
                check: check.into(),
                input: input.to_string(),
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
    }
}

/// Check π_! against the recurrences, factorization rules and closed tables, exponents ≤ `n_max`.
pub fn verify_transfer_tables(b: &FiberBundleData, n_max: u32) -> Result<TableReport> {
    match b.kind {
        BundleKind::Cp2 => verify_cp2(b, n_max),
        BundleKind::Hp2 => verify_hp2(b, n_max.min(4), n_max.min(3)),
    }
}

fn verify_cp2(b: &FiberBundleData, n_max: u32) -> Result<TableReport> {
    let tr = b.total.ring();
    let br = b.base.ring();
    let x2 = tr.gen(0);
    let x4 = tr.gen(1);
    let y4 = br.gen(0);
    let y6 = br.gen(1);
    let pi = |f: &F2Poly| b.fiber_integrate(f);
    let mut rep = TableReport::default();

    let base_cases = [
        (tr.one(), br.zero()),
        (x2.clone(), br.zero()),
        (x2.square(), br.one()),
        (x4.clone(), br.one()),
        (x4.square(), y4.clone()),
    ];
    for (f, want) in &base_cases {
        rep.record("base case", f, want, &pi(f)?);
    }
    for n in 3..=n_max {
        let lhs = pi(&x2.pow(n))?;
        let rhs = &(&pi(&x2.pow(n - 2))? * &y4) + &(&pi(&x2.pow(n - 3))? * &y6);
        rep.record("x2 recurrence", &x2.pow(n), &rhs, &lhs);
        let lhs = pi(&x4.pow(n))?;
        let rhs = &(&pi(&x4.pow(n - 1))? * &y4) + &(&pi(&x4.pow(n - 3))? * &y6.square());
        rep.record("x4 recurrence", &x4.pow(n), &rhs, &lhs);
    }
    for n in 0..=n_max {
        for k in 0..=n_max - n {
            let f = &x2.pow(n + k) * &x4.pow(n);
            rep.record("factor x2", &f, &(&y6.pow(n) * &pi(&x2.pow(k))?), &pi(&f)?);
            let f = &x2.pow(n) * &x4.pow(n + k);
            rep.record("factor x4", &f, &(&y6.pow(n) * &pi(&x4.pow(k))?), &pi(&f)?);
        }
    }
    for a in 0..=n_max {
        for c in 0..=n_max {
            let f = &x2.pow(a) * &x4.pow(c);
            let want = if a > 0 && a % 2 == 0 && c == 0 {
                y4.pow(a / 2 - 1)
            } else if a == 0 && c > 0 {
                y4.pow(c - 1)
            } else {
                br.zero()
            };
            rep.record("closed mod y6", &f, &want, &b.mod_top_generator(&pi(&f)?));
        }
    }
    Ok(rep)
}

fn verify_hp2(b: &FiberBundleData, cd_max: u32, ab_max: u32) -> Result<TableReport> {
    let tr = b.total.ring();
    let br = b.base.ring();
    let g = |s: &str| tr.gen_named(s).expect("generator");
    let (u2, u3, u4, u8) = (g("u2"), g("u3"), g("u4"), g("u8"));
    let t = |s: &str| br.gen_named(s).expect("generator");
    let (t2, t3, t8) = (t("t2"), t("t3"), t("t8"));
    let mut rep = TableReport::default();
    for a in 0..=ab_max {
        for bb in 0..=ab_max {
            for c in 0..=cd_max {
                for d in 0..=cd_max {
                    let f = &(&(&u3.pow(a) * &u2.pow(bb)) * &u4.pow(c)) * &u8.pow(d);
                    let lead = &t3.pow(a) * &t2.pow(bb);
                    let want = if c > 0 && c % 2 == 0 && d == 0 {
                        &lead * &t8.pow(c / 2 - 1)
                    } else if c == 0 && d > 0 {
                        &lead * &t8.pow(d - 1)
                    } else {
                        br.zero()
                    };
                    rep.record("closed mod t12", &f, &want, &b.mod_top_generator(&b.fiber_integrate(&f)?));
                }
            }
        }
    }
    Ok(rep)
}

/// Checks the module property π_!(π*(y)·x) = y·π_!(x) on a pair.
pub fn module_property_holds(b: &FiberBundleData, y: &F2Poly, x: &F2Poly) -> Result<bool> {
    let lhs = b.fiber_integrate(&(&b.pullback.apply(y)? * x))?;
    let rhs = y * &b.fiber_integrate(x)?;
    Ok(lhs == rhs)
}

/// One named polynomial identity.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.holds)
    }

    fn record(&mut self, name: impl Into<String>, lhs: &F2Poly, rhs: &F2Poly) {
        self.checks.push(IdentityCheck { name: name.into(), lhs: lhs.to_string(), rhs: rhs.to_string(), holds: lhs == rhs });
    }
}

/// Re-derives the rank-4 restriction formulas and the Sq¹/Sq² action on
/// H*BPSp(3) from the degree-one action on F₂[x1,x2,y1,y2].
pub fn appendix_a_verify(swap_indexing: bool) -> Result<IdentityReport> {
    let c = presets::Rank4Classes::new(swap_indexing);
    let m = &c.model;
    let r = m.ring();
    let p = |s: &str| r.parse(s);
    let one = r.one();
    let mut rep = IdentityReport::default();
    let t = &(&one + &c.t2) + &c.t3;

    let (x1, x2) = (p("x1")?, p("x2")?);
    let lin = |a: &F2Poly| &one + a;
    let diag = &(&lin(&x1) * &lin(&x2)) * &lin(&(&x1 + &x2));
    rep.record("w(R_ii) = 1 + t2 + t3", &diag, &t);
    let labels = ["w(R_23) = 1 + t2 + t3 + s1", "w(R_13) = 1 + t2 + t3 + s2", "w(R_12) = 1 + t2 + t3 + s3"];
    for (k, y) in c.y_for_s.iter().enumerate() {
        let prod = &(&(&lin(y) * &lin(&(&x1 + y))) * &lin(&(&x2 + y))) * &lin(&(&(&x1 + &x2) + y));
        rep.record(labels[k], &prod, &(&t + &c.s[k]));
    }
    rep.record("s1 + s2 = s3", &(&c.s[0] + &c.s[1]), &c.s[2]);

    let t3p = t.pow(3);
    let lhs = &(&(&t3p * &(&t + &c.s[0])) * &(&t + &c.s[1])) * &(&t + &c.s[2]);
    let rhs = &(&(&c.t12 * &t3p) + &(&c.t8 * &t.pow(4))) + &t.pow(6);
    rep.record("w(adjoint) = t12 t^3 + t8 t^4 + t^6", &lhs, &rhs);

    let zero = r.zero();
    let sq_table: [(&str, u32, &F2Poly, F2Poly); 16] = [
        ("Sq1 t2 = t3", 1, &c.t2, c.t3.clone()),
        ("Sq1 t3 = 0", 1, &c.t3, zero.clone()),
        ("Sq1 t8 = 0", 1, &c.t8, zero.clone()),
        ("Sq1 t12 = 0", 1, &c.t12, zero.clone()),
        ("Sq2 t2 = t2^2", 2, &c.t2, c.t2.square()),
        ("Sq2 t3 = t2 t3", 2, &c.t3, &c.t2 * &c.t3),
        ("Sq2 t8 = 0", 2, &c.t8, zero.clone()),
        ("Sq2 t12 = t2 t12", 2, &c.t12, &c.t2 * &c.t12),
        ("Sq1 s1 = 0", 1, &c.s[0], zero.clone()),
        ("Sq1 s2 = 0", 1, &c.s[1], zero.clone()),
        ("Sq2 s1 = t2 s1", 2, &c.s[0], &c.t2 * &c.s[0]),
        ("Sq2 s2 = t2 s2", 2, &c.s[1], &c.t2 * &c.s[1]),
        ("Sq1 t8 via s", 1, &c.t8, &(&m.sq(1, &c.s[0]) * &c.s[1]) + &(&c.s[0] * &m.sq(1, &c.s[1]))),
        ("Sq2 t8 via s", 2, &c.t8, &(&m.sq(2, &c.s[0]) * &c.s[1]) + &(&c.s[0] * &m.sq(2, &c.s[1]))),
        ("Sq1 t12 via s", 1, &c.t12, {
            let s12 = &c.s[0] * &c.s[1];
            let s3 = &c.s[0] + &c.s[1];
            &(&m.sq(1, &s12) * &s3) + &(&s12 * &m.sq(1, &s3))
        }),
        ("Sq2 t12 via s", 2, &c.t12, &c.t2 * &(&(&c.s[0] * &c.s[1]) * &(&c.s[0] + &c.s[1]))),
    ];
    for (name, k, x, want) in sq_table.iter() {
        rep.record(*name, &m.sq(*k, x), want);
    }

    let u4 = &c.s[0] + &c.s[1];
    let u8 = &c.s[0] * &c.s[1];
    rep.record("t8 = u4^2 + u8", &c.t8, &(&u4.square() + &u8));
    rep.record("t12 = u4 u8", &c.t12, &(&u4 * &u8));
    let w_tau = &(&t + &c.s[0]) * &(&t + &c.s[1]);
    let mut expanded = &one + &u4;
    for term in [c.t2.square(), c.t3.square(), &c.t2 * &u4, &c.t3 * &u4, u8.clone()] {
        expanded = &expanded + &term;
    }
    rep.record("w(tau) = (t + s1)(t + s2) expanded", &w_tau, &expanded);
    let hp2 = FiberBundleData::preset(BundleKind::Hp2)?;
    let detect = presets::bpsp21_detection(&c)?;
    rep.record("w(tau) of the HP2 preset", &detect.apply(&hp2.w_tau)?, &w_tau);
    Ok(rep)
}

/// How w(τ) enters the substitution w_i ↦ w_i(τ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum TangentClass {
    /// w_i ↦ w_i(τ).
    Direct,
    /// w_i ↦ w_i(−τ), the degree-i part of w(τ)⁻¹.
    Inverted,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Lemma37Row {
    pub degree: u32,
    pub label: String,
    pub z: String,
    pub cp2: String,
    pub hp2: String,
    pub nonzero: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Lemma37Report {
    pub mode: TangentClass,
    pub rows: Vec<Lemma37Row>,
    pub skipped: Vec<u32>,
}

impl Lemma37Report {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.nonzero)
    }

    pub fn failures(&self) -> Vec<&Lemma37Row> {
        self.rows.iter().filter(|r| !r.nonzero).collect()
    }
}

fn w_images(b: &FiberBundleData, ngens: usize, mode: TangentClass, max: u32) -> Vec<F2Poly> {
    let class = match mode {
        TangentClass::Direct => b.w_tau.clone(),
        TangentClass::Inverted => {
            let a = &b.w_tau + &b.total.ring().one();
            let mut inv = b.total.ring().one();
            let mut power = b.total.ring().one();
            loop {
                power = (&power * &a).truncate(max);
                if power.is_zero() {
                    break;
                }
                inv.add_assign(&power);
            }
            inv
        }
    };
    (1..=ngens as u32).map(|i| class.homogeneous_part(i)).collect()
}

/// For 4 ≤ n ≤ n_max, n ≠ 2^k ± 1, pushes the Spin^c primitive z_n through both
/// bundles (w_i ↦ w_i(τ), then π_!) and records whether either image is nonzero.
pub fn lemma37_check(n_max: u32, mode: TangentClass) -> Result<Lemma37Report> {
    use crate::charclass::{self, Space};
    let cp2 = FiberBundleData::preset(BundleKind::Cp2)?;
    let hp2 = FiberBundleData::preset(BundleKind::Hp2)?;
    let pres = charclass::presentation(Space::Bspinc);
    if n_max > pres.cap() {
        return Err(Error::DegreeCap { requested: n_max, cap: pres.cap() });
    }
    let ngens = pres.ring().ngens();
    let img_cp2 = w_images(&cp2, ngens, mode, n_max);
    let img_hp2 = w_images(&hp2, ngens, mode, n_max);
    let excluded = |n: u32| (n + 1).is_power_of_two() || (n - 1).is_power_of_two();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for n in 4..=n_max {
        if excluded(n) {
            skipped.push(n);
            continue;
        }
        let rep = pres.primitives(n)?;
        if rep.basis.len() != 1 {
            return Err(Error::Internal(format!("BSpinc has {} primitives in degree {n}", rep.basis.len())));
        }
        let z = &rep.basis[0];
        let a = cp2.fiber_integrate(&z.substitute(cp2.total.ring(), &img_cp2)?)?;
        let b = hp2.fiber_integrate(&z.substitute(hp2.total.ring(), &img_hp2)?)?;
        rows.push(Lemma37Row {
            degree: n,
            label: rep.named_label.unwrap_or_default(),
            z: z.to_string(),
            nonzero: !a.is_zero() || !b.is_zero(),
            cp2: a.to_string(),
            hp2: b.to_string(),
        });
    }
    Ok(Lemma37Report { mode, rows, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cp2_reduce_examples() {
        let b = FiberBundleData::preset(BundleKind::Cp2).unwrap();
        let tr = b.total.ring();
        let r = b.lh_reduce(&tr.parse("x2^2 + x4").unwrap()).unwrap();
        assert_eq!(r.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["y4", "0", "0"]);
        let f = tr.parse("x2^2").unwrap();
        let r = b.lh_reduce(&f).unwrap();
        assert_eq!(b.lh_expand(&r).unwrap(), f);
        assert_eq!(r.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["0", "0", "1"]);
        let r = b.lh_reduce(&tr.one()).unwrap();
        assert_eq!(r.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["1", "0", "0"]);
        assert_eq!(b.fiber_integrate(&tr.parse("x4^2").unwrap()).unwrap().to_string(), "y4");
    }

    #[test]
    fn cap_is_enforced() {
        let b = FiberBundleData::preset(BundleKind::Cp2).unwrap().with_max_degree(10);
        let tr = b.total.ring();
        assert!(matches!(b.fiber_integrate(&tr.parse("x4^3").unwrap()), Err(Error::DegreeCap { .. })));
    }
}
