use proptest::prelude::*;
use sqalg::cartan::{wu_terms, AlgebraMap, SqAlgebraPresentation};
use sqalg::{presets, F2Poly, WeightedPolyRing};

/// Elementary symmetric polynomial e_m in the generators of a degree-one presentation.
fn elementary(p: &SqAlgebraPresentation, m: usize) -> F2Poly {
    let r = p.ring();
    let n = r.ngens();
    let mut e = vec![r.one()];
    for i in 0..n {
        let x = r.gen(i);
        let mut next = e.clone();
        next.push(r.zero());
        for j in 1..next.len() {
            next[j] = &e.get(j).cloned().unwrap_or_else(|| r.zero()) + &(&e[j - 1] * &x);
        }
        e = next;
    }
    e.get(m).cloned().unwrap_or_else(|| r.zero())
}

#[test]
fn wu_formula_matches_roots() {
    let names: Vec<String> = (1..=9).map(|i| format!("x{i}")).collect();
    let roots = SqAlgebraPresentation::degree_one(&names).unwrap();
    for m in 1..=9u32 {
        for k in 0..=m {
            let lhs = roots.sq(k, &elementary(&roots, m as usize));
            let mut rhs = roots.ring().zero();
            for (a, b) in wu_terms(k, m) {
                rhs.add_assign(&(&elementary(&roots, a as usize) * &elementary(&roots, b as usize)));
            }
            assert_eq!(lhs, rhs, "Sq^{k} w_{m}");
        }
    }
}

#[test]
fn presets_satisfy_instability_adem_and_cartan() {
    // The degree-one rank-4 model has many more monomials, so it gets a lower bound.
    for (name, p, max) in [
        ("bpsp3", presets::bpsp3().unwrap(), 16),
        ("bpsp21", presets::bpsp21().unwrap(), 14),
        ("bsu3", presets::bsu3().unwrap(), 20),
        ("bu3", presets::bu3().unwrap(), 16),
        ("cp2", presets::cp2_total().unwrap(), 20),
        ("rank4", presets::rank4_model(), 7),
    ] {
        let rep = p.check(max);
        assert!(rep.ok(), "{name}: {:?}", rep.first());
    }
}

#[test]
fn chern_class_squares() {
    let p = presets::bu3().unwrap();
    let g = |s: &str| p.ring().parse(s).unwrap();
    assert_eq!(p.sq(2, &g("c2")), g("c2^2"));
    assert_eq!(p.sq(2, &g("c4")), g("c2*c4 + c6"));
    assert_eq!(p.sq(2, &g("c6")), g("c2*c6"));
    assert_eq!(p.sq(4, &g("c4")), g("c4^2"));
    assert!(p.sq(1, &g("c4")).is_zero());
    let su = presets::bsu3().unwrap();
    let h = |s: &str| su.ring().parse(s).unwrap();
    assert_eq!(su.sq(2, &h("y4")), h("y6"));
    assert!(su.sq(2, &h("y6")).is_zero());
}

#[test]
fn pullbacks_are_equivariant() {
    let cp2 = presets::cp2_pullback().unwrap();
    assert_eq!(cp2.check_equivariant(&presets::bsu3().unwrap(), &presets::cp2_total().unwrap(), 16).unwrap(), None);
    let hp2 = presets::hp2_pullback().unwrap();
    assert_eq!(hp2.check_equivariant(&presets::bpsp3().unwrap(), &presets::bpsp21().unwrap(), 16).unwrap(), None);
    assert!(cp2.injective_through(16));
}

#[test]
fn non_equivariant_map_is_caught() {
    let src = presets::bsu3().unwrap();
    let tgt = presets::cp2_total().unwrap();
    let bad = AlgebraMap::from_strings(src.ring().clone(), tgt.ring().clone(), &["x4", "x2*x4"]).unwrap();
    let w = bad.check_equivariant(&src, &tgt, 8).unwrap().expect("failure expected");
    assert!(w.relation.starts_with("Sq"));
}

#[test]
fn json_round_trip() {
    let p = presets::bpsp3().unwrap();
    let text = p.to_json().to_string();
    let q = SqAlgebraPresentation::from_json(&text).unwrap();
    let g = |s: &str| q.ring().parse(s).unwrap();
    assert_eq!(q.sq(1, &g("t2*t12")), g("t3*t12"));
    assert_eq!(q.to_json(), p.to_json());
    assert!(SqAlgebraPresentation::from_json("{").is_err());
    assert!(SqAlgebraPresentation::from_json(r#"{"generators":[{"name":"x","degree":1,"sq":{"2":"x"}}]}"#).is_err());
}

#[test]
fn bad_inputs() {
    let p = presets::bsu3().unwrap();
    let f = p.ring().parse("y4").unwrap();
    assert!(p.sq_checked(-1, &f).is_err());
    let other = WeightedPolyRing::new(&[("z", 2)]).unwrap();
    assert!(p.sq_checked(1, &other.gen(0)).is_err());
    // Sq^k vanishes above the degree.
    assert!(p.sq(5, &f).is_zero());
    assert_eq!(p.sq(0, &f), f);
}

fn arb_bpsp3_poly() -> impl Strategy<Value = String> {
    prop::collection::vec((0u32..3, 0u32..3, 0u32..2, 0u32..2), 1..4).prop_map(|ms| {
        ms.iter().map(|(a, b, c, d)| format!("t2^{a}*t3^{b}*t8^{c}*t12^{d}")).collect::<Vec<_>>().join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_square_is_multiplicative(f in arb_bpsp3_poly(), g in arb_bpsp3_poly()) {
        let p = presets::bpsp3().unwrap();
        let (f, g) = (p.ring().parse(&f).unwrap(), p.ring().parse(&g).unwrap());
        prop_assert_eq!(p.total_sq(&(&f * &g)), &p.total_sq(&f) * &p.total_sq(&g));
        prop_assert_eq!(p.total_sq(&(&f + &g)), &p.total_sq(&f) + &p.total_sq(&g));
    }

    #[test]
    fn sq1_squares_to_zero(f in arb_bpsp3_poly()) {
        let p = presets::bpsp3().unwrap();
        let f = p.ring().parse(&f).unwrap();
        prop_assert!(p.sq_word(&[1, 1], &f).is_zero());
        prop_assert_eq!(p.sq_word(&[2, 2], &f), p.sq_word(&[3, 1], &f));
    }
}
