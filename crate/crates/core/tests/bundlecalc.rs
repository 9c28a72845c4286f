use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use sqalg::bundlecalc::{self, BundleKind, FiberBundleData, TangentClass};
use sqalg::charclass::{self, Space};
use sqalg::{F2Poly, WeightedPolyRing};

/// Root oracle for π_! in the CP^2 bundle over BSU(3). With roots a, b, c of the SU(3)
/// bundle (a + b + c = 0) and x2 = a, x4 = y4 + a^2 mod 2, the pushforward of a^k is the
/// complete symmetric polynomial h_(k-2), and sum h_m t^m = 1/(1 + y4 t^2 + y6 t^3) mod 2.
struct RootOracle {
    base: WeightedPolyRing,
    h: Vec<F2Poly>,
}

impl RootOracle {
    fn new(base: &WeightedPolyRing, max: usize) -> Self {
        let (y4, y6) = (base.parse("y4").unwrap(), base.parse("y6").unwrap());
        let mut h: Vec<F2Poly> = vec![base.one()];
        for m in 1..=max {
            let mut v = base.zero();
            if m >= 2 {
                v.add_assign(&(&y4 * &h[m - 2]));
            }
            if m >= 3 {
                v.add_assign(&(&y6 * &h[m - 3]));
            }
            h.push(v);
        }
        RootOracle { base: base.clone(), h }
    }

    fn push(&self, f: &F2Poly) -> F2Poly {
        let y4 = self.base.parse("y4").unwrap();
        let mut out = self.base.zero();
        for m in f.terms() {
            let (i, j) = (m.exponents()[0] as usize, m.exponents()[1]);
            for l in 0..=j {
                if sqalg::binom_mod2(j as u64, l as u64) && i + 2 * l as usize >= 2 {
                    out.add_assign(&(&y4.pow(j - l) * &self.h[i + 2 * l as usize - 2]));
                }
            }
        }
        out
    }
}

fn cp2() -> FiberBundleData {
    FiberBundleData::preset(BundleKind::Cp2).unwrap()
}

#[test]
fn cp2_pushforward_matches_roots() {
    let b = cp2();
    let oracle = RootOracle::new(b.base.ring(), 80);
    let r = b.total.ring();
    for i in 0..=12u32 {
        for j in 0..=8u32 {
            let f = r.parse(&format!("x2^{i}*x4^{j}")).unwrap();
            assert_eq!(b.fiber_integrate(&f).unwrap(), oracle.push(&f), "x2^{i} x4^{j}");
        }
    }
}

#[test]
fn cp2_base_cases() {
    let b = cp2();
    let r = b.total.ring();
    let pi = |s: &str| b.fiber_integrate(&r.parse(s).unwrap()).unwrap().to_string();
    assert_eq!(pi("1"), "0");
    assert_eq!(pi("x2"), "0");
    assert_eq!(pi("x2^2"), "1");
    assert_eq!(pi("x4"), "1");
    assert_eq!(pi("x4^2"), "y4");
}

#[test]
fn leray_hirsch_dimensions() {
    for kind in [BundleKind::Cp2, BundleKind::Hp2] {
        assert!(FiberBundleData::preset(kind).unwrap().dimension_bookkeeping(60), "{kind:?}");
    }
}

#[test]
fn transfer_tables() {
    for kind in [BundleKind::Cp2, BundleKind::Hp2] {
        let b = FiberBundleData::preset(kind).unwrap();
        let rep = bundlecalc::verify_transfer_tables(&b, 10).unwrap();
        assert!(rep.ok(), "{kind:?}: {:?}", rep.mismatches.first());
        assert!(rep.checked > 20);
    }
}

#[test]
fn module_property_on_random_pairs() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for kind in [BundleKind::Cp2, BundleKind::Hp2] {
        let b = FiberBundleData::preset(kind).unwrap();
        let (br, tr) = (b.base.ring(), b.total.ring());
        for _ in 0..40 {
            let y = random_poly(br, 16, &mut rng);
            let x = random_poly(tr, 16, &mut rng);
            assert!(bundlecalc::module_property_holds(&b, &y, &x).unwrap(), "{kind:?}: y = {y}, x = {x}");
        }
    }
}

fn random_poly(r: &WeightedPolyRing, max: u32, rng: &mut impl Rng) -> F2Poly {
    let mut f = r.zero();
    for _ in 0..3 {
        let d = rng.random_range(0..=max);
        let ms = r.monomials_of_degree(d);
        if !ms.is_empty() {
            f.toggle(ms[rng.random_range(0..ms.len())].clone());
        }
    }
    f
}

#[test]
fn wrong_ring_is_rejected() {
    let b = cp2();
    let y = b.base.ring().parse("y4").unwrap();
    assert!(b.lh_reduce(&y).is_err());
    let capped = cp2().with_max_degree(8);
    assert!(capped.fiber_integrate(&capped.total.ring().parse("x4^3").unwrap()).is_err());
}

#[test]
fn appendix_identities() {
    let rep = bundlecalc::appendix_a_verify(false).unwrap();
    assert!(rep.ok(), "{:?}", rep.first_failure());
    assert!(rep.checks.len() >= 20);
    assert!(bundlecalc::appendix_a_verify(true).unwrap().ok());
}

#[test]
fn lemma37_cp2_leg_matches_roots_and_degree_6_is_undetected() {
    let b = cp2();
    let oracle = RootOracle::new(b.base.ring(), 40);
    let pres = charclass::presentation(Space::Bspinc);
    let ngens = pres.ring().ngens() as u32;
    let images: Vec<F2Poly> = (1..=ngens).map(|i| b.w_tau.homogeneous_part(i)).collect();
    let rep = bundlecalc::lemma37_check(24, TangentClass::Direct).unwrap();
    for row in &rep.rows {
        let z = &pres.primitives(row.degree).unwrap().basis[0];
        let pushed = oracle.push(&z.substitute(b.total.ring(), &images).unwrap());
        assert_eq!(pushed.to_string(), row.cp2, "degree {}", row.degree);
    }
    let failures: Vec<u32> = rep.failures().iter().map(|r| r.degree).collect();
    assert_eq!(failures, [6]);
    // The inverted tangent class gives the same verdicts.
    let inv = bundlecalc::lemma37_check(24, TangentClass::Inverted).unwrap();
    assert_eq!(inv.rows.iter().map(|r| r.nonzero).collect::<Vec<_>>(), rep.rows.iter().map(|r| r.nonzero).collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduce_then_expand_is_identity(i in 0u32..8, j in 0u32..5, k in 0u32..3, l in 0u32..2) {
        let b = FiberBundleData::preset(BundleKind::Hp2).unwrap();
        let f = b.total.ring().parse(&format!("u2^{i}*u3^{k}*u4^{j}*u8^{l} + u4^{l}")).unwrap();
        let r = b.lh_reduce(&f).unwrap();
        prop_assert_eq!(b.lh_expand(&r).unwrap(), f.clone());
        for (n, part) in f.parts() {
            let p = b.fiber_integrate(&part).unwrap();
            prop_assert!(p.is_zero() || p.degree() == Some(n - 8));
        }
    }
}
