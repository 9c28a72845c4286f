use proptest::prelude::*;
use sqalg::modcat::*;
use sqalg::presets;
use sqalg::{F2Matrix, F2Vector};

const A: ModAlgebra = ModAlgebra::A1;
const E: ModAlgebra = ModAlgebra::E1;

fn pieces(list: &[(Family, i32)]) -> Vec<StandardPiece> {
    let mut v: Vec<_> = list.iter().map(|&(f, s)| StandardPiece::new(f, s)).collect();
    v.sort();
    v
}

fn solve_unique(m: &FiniteModule, cat: &Catalog) -> Vec<StandardPiece> {
    let r = stable_type_solve(m, cat, 8).unwrap();
    assert!(r.exhaustive, "search not exhaustive");
    assert_eq!(r.solutions.len(), 1, "ambiguous: {:?}", r.solutions);
    assert_eq!(r.isomorphism_verified, Some(true));
    r.solutions[0].clone()
}

/// Margolis homology by listing every vector of each degree.
fn brute_margolis(m: &FiniteModule, which: MargolisOp) -> Vec<(i32, usize)> {
    let all = |n: usize| (0u32..1 << n).map(move |mask| F2Vector::from_support(n, (0..n).filter(|i| mask >> i & 1 == 1)));
    let log2 = |x: usize| x.trailing_zeros() as usize;
    let s = which.degree();
    let mut out = Vec::new();
    for d in m.degrees() {
        let q = m.q_matrix(which, d);
        let ker = all(m.dim(d)).filter(|x| q.mul_vec(x).unwrap().is_zero()).count();
        let qin = m.q_matrix(which, d - s);
        let mut im: Vec<Vec<bool>> =
            all(m.dim(d - s)).map(|y| { let v = qin.mul_vec(&y).unwrap(); (0..v.len()).map(|i| v.get(i)).collect() }).collect();
        im.sort();
        im.dedup();
        let h = log2(ker) - log2(im.len().max(1));
        if h > 0 {
            out.push((d, h));
        }
    }
    out
}

#[test]
fn template_margolis_matches_fixture_and_brute_force() {
    let fixture: serde_json::Value = serde_json::from_str(include_str!("fixtures/margolis_templates.json")).unwrap();
    for (alg, key) in [(A, "A(1)"), (E, "E(1)")] {
        for &f in alg.families() {
            let t = f.template(alg).unwrap();
            for (op, name) in [(MargolisOp::Q0, "Q0"), (MargolisOp::Q1, "Q1")] {
                let table = fixture[key][f.name()][name].as_object().unwrap();
                let mut want: Vec<(i32, usize)> =
                    table.iter().map(|(d, n)| (d.parse().unwrap(), n.as_u64().unwrap() as usize)).collect();
                want.sort();
                assert_eq!(t.margolis(op).nonzero(), want, "{key} {f} {name}");
                assert_eq!(brute_margolis(t, op), want, "{key} {f} {name} brute force");
            }
        }
    }
}

#[test]
fn free_e1_has_no_margolis_homology() {
    let e1 = Family::E1.template(E).unwrap();
    assert_eq!(e1.total_dim(), 4);
    assert!(e1.margolis(MargolisOp::Q0).nonzero().is_empty());
    assert!(e1.margolis(MargolisOp::Q1).nonzero().is_empty());
}

#[test]
fn restriction_decompositions() {
    let full = Catalog::full(E);
    let restrict = |f: Family| f.template(A).unwrap().restrict_to_e1();
    assert_eq!(solve_unique(&restrict(Family::A1), &full), pieces(&[(Family::E1, 0), (Family::E1, 2)]));
    assert_eq!(solve_unique(&restrict(Family::I), &full), pieces(&[(Family::L, 0), (Family::E1, 2)]));
    // J centred on degree 0 restricts to Z₂ ⊕ Σ⁻²E(1)
    assert_eq!(solve_unique(&restrict(Family::J).suspend(-2), &full), pieces(&[(Family::Z2, 0), (Family::E1, -2)]));
    assert_eq!(solve_unique(&restrict(Family::K), &full), pieces(&[(Family::L, -1)]));
}

#[test]
fn restriction_keeps_underlying_space() {
    for &f in A.families() {
        let t = f.template(A).unwrap();
        let r = t.restrict_to_e1();
        assert_eq!(r.dims(), t.dims());
        assert_eq!(r.algebra(), E);
        for d in t.degrees() {
            assert_eq!(r.op(0, d), t.op(0, d));
        }
    }
}

#[test]
fn trivial_module_is_the_z2_template() {
    let m = FiniteModule::new(A, 0, vec![1], [vec![F2Matrix::zeros(0, 1)], vec![F2Matrix::zeros(0, 1)]]).unwrap();
    assert!(m.same_structure(Family::Z2.template(A).unwrap()));
    assert_eq!(solve_unique(&m, &Catalog::full(A)), pieces(&[(Family::Z2, 0)]));
}

#[test]
fn bsu3_presentation_actions() {
    let p = presets::bsu3().unwrap();
    let over_e = FiniteModule::from_presentation(&p, E, 0, 20).unwrap();
    let over_a = FiniteModule::from_presentation(&p, A, 0, 20).unwrap();
    let y4 = F2Vector::from_support(1, [over_e.basis_index(4, "y4").unwrap()]);
    assert!(over_e.op(0, 4).mul_vec(&y4).unwrap().is_zero());
    assert!(over_e.op(1, 4).mul_vec(&y4).unwrap().is_zero());
    let img = over_a.op(1, 4).mul_vec(&y4).unwrap();
    assert_eq!(img.support().map(|i| over_a.labels(6)[i].as_str()).collect::<Vec<_>>(), ["y6"]);
    assert!(over_a.truncated_above());
    assert!(!over_a.is_reliable(18));
    assert!(over_a.is_reliable(17));
}

#[test]
fn bpsp3_presentation_matches_action_table() {
    let m = FiniteModule::from_presentation(&presets::bpsp3().unwrap(), A, 0, 24).unwrap();
    let table = [
        ("t2", 2, "t3", "t2^2"),
        ("t3", 3, "0", "t2*t3"),
        ("t8", 8, "0", "0"),
        ("t12", 12, "0", "t2*t12"),
    ];
    for (g, d, sq1, sq2) in table {
        let x = F2Vector::from_support(m.dim(d), [m.basis_index(d, g).unwrap()]);
        for (k, want) in [(0usize, sq1), (1, sq2)] {
            let img = m.op(k, d).mul_vec(&x).unwrap();
            let got: Vec<&str> = img.support().map(|i| m.labels(d + 1 + k as i32)[i].as_str()).collect();
            let want: Vec<&str> = if want == "0" { vec![] } else { vec![want] };
            assert_eq!(got, want, "Sq{} {g}", k + 1);
        }
    }
}

#[test]
fn bsu3_over_e1_is_trivial_pieces() {
    let m = FiniteModule::from_presentation(&presets::bsu3().unwrap(), E, 0, 40).unwrap();
    let r = stable_type_solve(&m, &Catalog::full(E), 4).unwrap();
    assert_eq!(r.provisional_above, Some(37));
    let sol = r.unique().expect("unique on the reliable window");
    assert!(sol.iter().all(|p| p.family == Family::Z2));
    // one trivial piece per monomial y4^a y6^b in degrees ≤ 37
    let monomials = (0..=37).filter(|d| d % 2 == 0).map(|d: i32| (0..=d / 4).filter(|a| (d - 4 * a) % 6 == 0).count()).sum::<usize>();
    assert_eq!(sol.len(), monomials);
    assert_eq!(r.isomorphism_verified, Some(true));
}

#[test]
fn bpsp3_window_is_consistent_with_periodic_catalog() {
    let m = FiniteModule::from_presentation(&presets::bpsp3().unwrap(), A, 0, 40).unwrap();
    let r = stable_type_solve(&m, &Catalog::bpsp3(), 4).unwrap();
    assert!(!r.solutions.is_empty());
    let first = &r.solutions[0];
    assert!(first.contains(&StandardPiece::new(Family::Z2, 0)));
    assert!(first.contains(&StandardPiece::new(Family::J, 2)));
    assert!(first.contains(&StandardPiece::new(Family::K, 12)));
}

#[test]
fn zero_module_solves_to_nothing() {
    let r = stable_type_solve(&FiniteModule::zero(A), &Catalog::full(A), 4).unwrap();
    assert_eq!(r.unique(), Some(&[][..]));
}

#[test]
fn not_in_catalog_is_an_error() {
    let j = Family::J.template(A).unwrap();
    let cat = Catalog::of_families(A, &[Family::Z2, Family::A1]).unwrap();
    assert!(matches!(stable_type_solve(j, &cat, 4), Err(sqalg::Error::NotInCatalog(_))));
}

#[test]
fn split_criterion_identity() {
    let a1 = Family::A1.template(A).unwrap();
    let c = check_split_criterion(&ModuleMap::identity(a1)).unwrap();
    assert!(c.hypotheses_met && c.f_injective && c.q0_margolis_injective && c.split_guaranteed);
}

#[test]
fn split_criterion_counterexample() {
    // Σ²J → A(1) sending the generator to Sq²
    let a1 = Family::A1.template(A).unwrap();
    let j2 = Family::J.template(A).unwrap().suspend(2);
    let one = F2Vector::from_support(1, [0]);
    let sq2 = F2Vector::from_support(1, [a1.basis_index(2, "Sq[2]").unwrap()]);
    let f = ModuleMap::extending(&j2, a1, 2, &one, &sq2).unwrap();
    let c = check_split_criterion(&f).unwrap();
    assert!(c.hypotheses_met);
    assert!(c.f_injective);
    assert!(!c.q0_margolis_injective);
    assert!(!c.split_guaranteed);
    assert_eq!(c.witness_degree, Some(4));
}

#[test]
fn split_criterion_zero_map() {
    let a1 = Family::A1.template(A).unwrap();
    let c = check_split_criterion(&ModuleMap::zero(a1, a1).unwrap()).unwrap();
    assert!(!c.f_injective);
    assert!(!c.split_guaranteed);
    assert_eq!(c.witness_degree, Some(0));
}

#[test]
fn non_equivariant_map_rejected() {
    let a1 = Family::A1.template(A).unwrap();
    let z = FiniteModule::trivial(A, 0);
    // 1 ↦ 1 from Z₂ into A(1) ignores Sq¹
    assert!(ModuleMap::new(z.clone(), a1.clone(), vec![F2Matrix::identity(1)]).is_err());
    // the augmentation A(1) → Z₂ is a module map
    let aug = (0..7).map(|d| if d == 0 { F2Matrix::identity(1) } else { F2Matrix::zeros(0, a1.dim(d)) }).collect();
    assert!(ModuleMap::new(a1.clone(), z, aug).is_ok());
}

#[test]
fn dot_picture_of_joker() {
    let dot = Family::J.template(A).unwrap().to_dot("J");
    assert!(dot.starts_with("digraph \"J\""));
    assert_eq!(dot.matches("label=\"Sq1\"").count(), 2);
    assert_eq!(dot.matches("label=\"Sq2\"").count(), 3);
}

#[test]
fn json_round_trip_of_presentation_module() {
    let m = FiniteModule::from_presentation(&presets::bsu3().unwrap(), A, 0, 16).unwrap();
    let back = FiniteModule::from_json(&m.to_json()).unwrap();
    assert_eq!(back, m);
}

fn arb_pieces(alg: ModAlgebra) -> impl Strategy<Value = Vec<StandardPiece>> {
    let fams = alg.families().to_vec();
    prop::collection::vec((0..fams.len(), -3i32..10), 0..4)
        .prop_map(move |v| v.into_iter().map(|(f, s)| StandardPiece::new(fams[f], s)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stable_type_is_additive(x in arb_pieces(E), y in arb_pieces(E)) {
        let mx = sum_of_pieces(E, &x).unwrap();
        let my = sum_of_pieces(E, &y).unwrap();
        let cat = Catalog::full(E);
        let (rx, ry) = (stable_type_solve(&mx, &cat, 4).unwrap(), stable_type_solve(&my, &cat, 4).unwrap());
        if let (Some(sx), Some(sy)) = (rx.unique(), ry.unique()) {
            let rxy = stable_type_solve(&mx.direct_sum(&my).unwrap(), &cat, 4).unwrap();
            let mut both: Vec<_> = sx.iter().chain(sy).copied().collect();
            both.sort();
            prop_assert_eq!(rxy.unique(), Some(both.as_slice()));
        }
    }

    #[test]
    fn sums_of_pieces_recover_their_type(x in arb_pieces(A)) {
        let m = sum_of_pieces(A, &x).unwrap();
        let r = stable_type_solve(&m, &Catalog::full(A), 8).unwrap();
        let mut want = x.clone();
        want.sort();
        prop_assert!(r.solutions.contains(&want));
    }

    #[test]
    fn margolis_of_sum_is_sum_of_margolis(x in arb_pieces(A), y in arb_pieces(A)) {
        let mx = sum_of_pieces(A, &x).unwrap();
        let my = sum_of_pieces(A, &y).unwrap();
        let s = mx.direct_sum(&my).unwrap();
        for op in [MargolisOp::Q0, MargolisOp::Q1] {
            let (hx, hy, hs) = (mx.margolis(op), my.margolis(op), s.margolis(op));
            for d in s.degrees() {
                prop_assert_eq!(hs.get(d), hx.get(d) + hy.get(d));
            }
        }
    }
}
