//! Steenrod-algebra arithmetic checked against its action on F2[x1, ..., xn], |xi| = 1.
//! The action on x1...xn is faithful in degrees <= n, so equal actions mean equal elements.

use std::collections::BTreeSet;

use proptest::prelude::*;
use sqalg::milnor::{self, DualElt, MilnorSeq, SubHopfAlgebra, XiMonomial};
use sqalg::steenrod::{self, AdmissibleSeq, RewriteStrategy, SqWord, SteenrodElt};

type Poly = BTreeSet<Vec<u32>>;

fn toggle(p: &mut Poly, m: Vec<u32>) {
    if !p.remove(&m) {
        p.insert(m);
    }
}

fn binom_odd(a: u32, k: u32) -> bool {
    k <= a && a & k == k
}

/// Sq^k on one monomial by the Cartan formula and Sq^k(x^a) = C(a,k) x^(a+k).
fn sq_monomial(k: u32, m: &[u32], out: &mut Poly) {
    fn go(k: u32, m: &[u32], i: usize, cur: &mut Vec<u32>, out: &mut Poly) {
        if i == m.len() {
            if k == 0 {
                toggle(out, cur.clone());
            }
            return;
        }
        for j in 0..=k.min(m[i]) {
            if binom_odd(m[i], j) {
                cur.push(m[i] + j);
                go(k - j, m, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    go(k, m, 0, &mut Vec::new(), out);
}

fn sq(k: u32, p: &Poly) -> Poly {
    let mut out = Poly::new();
    for m in p {
        sq_monomial(k, m, &mut out);
    }
    out
}

fn act_word(w: &[u32], p: &Poly) -> Poly {
    w.iter().rev().fold(p.clone(), |acc, &k| sq(k, &acc))
}

fn act(x: &SteenrodElt, p: &Poly) -> Poly {
    let mut out = Poly::new();
    for t in x.terms() {
        for m in act_word(t.entries(), p) {
            toggle(&mut out, m);
        }
    }
    out
}

fn product(n: usize) -> Poly {
    Poly::from([vec![1; n]])
}

/// Milnor's formula: Sq(r1, r2, ...) on x1...xn sends exactly r_k of the x_j to x_j^(2^k).
fn milnor_act(r: &[u32], n: usize) -> Poly {
    let mut out = Poly::new();
    fn go(r: &mut Vec<u32>, j: usize, n: usize, cur: &mut Vec<u32>, out: &mut Poly) {
        if j == n {
            if r.iter().all(|&c| c == 0) {
                toggle(out, cur.clone());
            }
            return;
        }
        cur.push(1);
        go(r, j + 1, n, cur, out);
        cur.pop();
        for k in 0..r.len() {
            if r[k] > 0 {
                r[k] -= 1;
                cur.push(1 << (k + 1));
                go(r, j + 1, n, cur, out);
                cur.pop();
                r[k] += 1;
            }
        }
    }
    go(&mut r.to_vec(), 0, n, &mut Vec::new(), &mut out);
    out
}

fn milnor_degree(r: &[u32]) -> u32 {
    r.iter().enumerate().map(|(i, &e)| e * ((1 << (i + 1)) - 1)).sum()
}

fn elt(w: &[u32]) -> SteenrodElt {
    steenrod::word(w)
}

/// Number of sequences (r1, r2, ...) with sum r_i (2^i - 1) = n.
fn milnor_count(n: u32) -> usize {
    let mut ways = vec![0usize; n as usize + 1];
    ways[0] = 1;
    let mut w = 1u32;
    while w <= n {
        for d in w..=n {
            ways[d as usize] += ways[(d - w) as usize];
        }
        w = 2 * w + 1;
    }
    ways[n as usize]
}

fn arb_word() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..7, 1..5).prop_filter("degree at most 11", |w| w.iter().sum::<u32>() <= 11)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_admissible_and_acts_like_the_word(w in arb_word()) {
        let x = steenrod::adem_normalize(&SqWord::new(w.clone()));
        let d: u32 = w.iter().sum();
        for t in x.terms() {
            prop_assert!(t.as_word().is_admissible());
            prop_assert_eq!(t.degree(), d);
        }
        let p = product(d as usize);
        prop_assert_eq!(act(&x, &p), act_word(&w, &p));
    }

    #[test]
    fn rewriting_is_confluent(w in arb_word(), seed in any::<u64>()) {
        let w = SqWord::new(w);
        let a = steenrod::adem_normalize_with(&w, RewriteStrategy::Leftmost);
        prop_assert_eq!(&a, &steenrod::adem_normalize_with(&w, RewriteStrategy::Rightmost));
        prop_assert_eq!(&a, &steenrod::adem_normalize_with(&w, RewriteStrategy::Shuffled(seed)));
    }

    #[test]
    fn multiplication_is_composition(a in arb_word(), b in arb_word()) {
        let (x, y) = (elt(&a), elt(&b));
        let d = (a.iter().sum::<u32>() + b.iter().sum::<u32>()) as usize;
        prop_assume!(d <= 14);
        let p = product(d);
        prop_assert_eq!(act(&(&x * &y), &p), act(&x, &act(&y, &p)));
    }

    #[test]
    fn milnor_basis_matches_milnor_formula(r in prop::collection::vec(0u32..5, 1..4)) {
        let d = milnor_degree(&r);
        prop_assume!(d <= 12 && d > 0);
        let x = milnor::milnor_to_admissible(&MilnorSeq::new(r.clone())).unwrap();
        prop_assert_eq!(act(&x, &product(d as usize)), milnor_act(&r, d as usize));
        let back = milnor::milnor_elt_to_admissible(&milnor::admissible_to_milnor(&x)).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn six_relations() {
    assert_eq!(elt(&[1, 2]), SteenrodElt::sq(3));
    assert_eq!(elt(&[2, 2]), elt(&[3, 1]));
    assert_eq!(elt(&[2, 1, 2]), &elt(&[4, 1]) + &elt(&[5]));
    assert_eq!(elt(&[2, 2, 2]), elt(&[5, 1]));
    assert_eq!(steenrod::antipode(&SteenrodElt::sq(3)), elt(&[2, 1]));
    assert_eq!(milnor::subalgebra_basis(SubHopfAlgebra::A(1)).unwrap().len(), 8);
}

#[test]
fn admissible_basis_size_matches_milnor_count() {
    for n in 0..=24 {
        assert_eq!(steenrod::basis(n).len(), milnor_count(n), "degree {n}");
        assert_eq!(milnor::xi_monomials(n).len(), milnor_count(n));
    }
}

#[test]
fn admissible_basis_is_independent_under_the_action() {
    for n in 1..=9u32 {
        let p = product(n as usize);
        let images: BTreeSet<Vec<Vec<u32>>> = steenrod::basis(n)
            .into_iter()
            .map(|a| act(&SteenrodElt::from_adm(a), &p).into_iter().collect())
            .collect();
        assert_eq!(images.len(), steenrod::basis(n).len());
        // Rank over F2, not just distinctness.
        let monos: Vec<Vec<u32>> = images.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let rows: Vec<Vec<bool>> = images.iter().map(|img| monos.iter().map(|m| img.contains(m)).collect()).collect();
        assert_eq!(sqalg::F2Matrix::from_bools(&rows).unwrap().rank(), rows.len(), "degree {n}");
    }
}

#[test]
fn coproduct_is_the_cartan_formula() {
    // theta(f g) = sum theta'(f) theta''(g) with f = x1...xp, g = x(p+1)...x(p+q).
    for n in 1..=7u32 {
        for a in steenrod::basis(n) {
            let x = SteenrodElt::from_adm(a.clone());
            let (p, q) = (n as usize, n as usize);
            let whole = act(&x, &product(p + q));
            let mut split = Poly::new();
            for (l, r) in steenrod::coproduct(&x).terms() {
                let fl = act(&SteenrodElt::from_adm(l.clone()), &product(p));
                let gr = act(&SteenrodElt::from_adm(r.clone()), &product(q));
                for u in &fl {
                    for v in &gr {
                        toggle(&mut split, u.iter().chain(v).copied().collect());
                    }
                }
            }
            assert_eq!(whole, split, "coproduct of {a}");
        }
    }
}

#[test]
fn hopf_axioms_through_degree_10() {
    for n in 1..=10u32 {
        for a in steenrod::basis(n) {
            let x = SteenrodElt::from_adm(a.clone());
            let d = steenrod::coproduct(&x);
            // Antipode axiom: sum chi(x') x'' = 0 in positive degree.
            let mut s = SteenrodElt::zero();
            for (l, r) in d.terms() {
                s.add_assign(&(&steenrod::antipode(&SteenrodElt::from_adm(l.clone())) * &SteenrodElt::from_adm(r.clone())));
            }
            assert!(s.is_zero(), "antipode axiom fails on {a}");
            assert_eq!(steenrod::antipode(&steenrod::antipode(&x)), x);
            // Counit: the term 1 (x) x is present.
            assert!(d.terms().any(|(l, r)| l.entries().is_empty() && r == &a));
        }
    }
    assert_eq!(steenrod::antipode(&SteenrodElt::sq(4)), &elt(&[4]) + &elt(&[3, 1]));
}

#[test]
fn coproduct_is_multiplicative() {
    for (a, b) in [(&[2u32][..], &[2u32][..]), (&[1], &[2, 1]), (&[3], &[4]), (&[2, 1], &[4, 2])] {
        let lhs = steenrod::coproduct(&(&elt(a) * &elt(b)));
        let rhs = steenrod::coproduct(&elt(a)).mul(&steenrod::coproduct(&elt(b)));
        assert_eq!(lhs.to_string(), rhs.to_string(), "{a:?} * {b:?}");
    }
}

#[test]
fn milnor_examples() {
    let sq3 = SteenrodElt::sq(3);
    assert_eq!(milnor::admissible_to_milnor(&elt(&[2, 1])).to_string(), "SqM(3) + SqM(0,1)");
    assert_eq!(milnor::milnor_to_admissible(&MilnorSeq::new(vec![0, 1])).unwrap(), &sq3 + &elt(&[2, 1]));
    for i in 0..=3 {
        let q = milnor::q(i);
        assert!((&q * &q).is_zero(), "Q{i}^2");
        assert_eq!(milnor::admissible_to_milnor(&q).to_string(), MilnorSeq::q(i).to_string());
    }
    assert!((&(&milnor::q(0) * &milnor::q(1)) + &(&milnor::q(1) * &milnor::q(0))).is_zero());
    assert_eq!(milnor::q(1), &sq3 + &elt(&[2, 1]));
}

#[test]
fn pairing_is_dual_to_the_milnor_basis() {
    for n in 1..=10u32 {
        let monos = milnor::xi_monomials(n);
        for r in &monos {
            for s in &monos {
                let x = milnor::milnor_to_admissible(&MilnorSeq::new(s.exponents().to_vec())).unwrap();
                assert_eq!(milnor::pair(&DualElt::from_monomial(r.clone()), &x), r == s, "<{r}, Sq{s}>");
            }
        }
        let (_, _, m) = milnor::pairing_matrix(n);
        assert_eq!(m.rank(), monos.len());
    }
}

#[test]
fn dual_coproduct_of_xi2() {
    let d = milnor::dual_coproduct(&DualElt::xi(2));
    let want: BTreeSet<(XiMonomial, XiMonomial)> = [
        (XiMonomial::new(vec![0, 1]), XiMonomial::one()),
        (XiMonomial::new(vec![2]), XiMonomial::new(vec![1])),
        (XiMonomial::one(), XiMonomial::new(vec![0, 1])),
    ]
    .into_iter()
    .collect();
    assert_eq!(d.terms().cloned().collect::<BTreeSet<_>>(), want);
}

#[test]
fn zeta_recursion() {
    // sum_{i+j=n} xi_i^(2^j) zeta_j = 0 for n >= 1.
    for n in 1..=6usize {
        let mut s = DualElt::zero();
        for j in 0..=n {
            let xi = if n == j { DualElt::one() } else { DualElt::xi(n - j) };
            s.add_assign(&xi.pow(1 << j).mul(&milnor::zeta(j)));
        }
        assert!(s.is_zero(), "n = {n}: {s}");
    }
}

#[test]
fn sub_hopf_algebras() {
    let a1 = milnor::subalgebra_basis(SubHopfAlgebra::A(1)).unwrap();
    assert!(milnor::same_span(&a1, &milnor::a_n_profile_basis(1).unwrap()));
    assert_eq!(milnor::subalgebra_basis(SubHopfAlgebra::A(2)).unwrap().len(), 64);
    assert_eq!(milnor::subalgebra_basis(SubHopfAlgebra::E(1)).unwrap().len(), 4);
    assert_eq!(milnor::subalgebra_basis(SubHopfAlgebra::A(0)).unwrap().len(), 2);
    // Closed under products.
    for x in &a1 {
        for y in &a1 {
            let p = x * y;
            if !p.is_zero() {
                let mut span = a1.clone();
                span.push(p);
                assert!(milnor::same_span(&span, &a1));
            }
        }
    }
}

#[test]
fn excess_and_unit() {
    let a = AdmissibleSeq::new(vec![4, 2, 1]).unwrap();
    assert_eq!(a.excess(), 1);
    assert_eq!(a.degree(), 7);
    assert!(AdmissibleSeq::new(vec![1, 2]).is_err());
    assert_eq!(SteenrodElt::one().to_string(), "1");
    assert!(SteenrodElt::sq(0) == SteenrodElt::one());
}
