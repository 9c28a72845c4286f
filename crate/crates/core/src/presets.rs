//! Fixed cohomology presentations: BSU(3), BPSp(3), and the total spaces of the
//! CP² and HP² bundles over them, together with the detection models they are read from.

use crate::cartan::{AlgebraMap, SqAlgebraPresentation};
use crate::error::Result;
use crate::f2core::{F2Poly, WeightedPolyRing};

/// F₂[x1,x2,y1,y2], all in degree 1: the cohomology of an elementary abelian 2-group of rank 4.
pub fn rank4_model() -> SqAlgebraPresentation {
    SqAlgebraPresentation::degree_one(&["x1", "x2", "y1", "y2"]).expect("valid ring")
}

/// Classes of the rank-4 model used to detect BPSp(3) and BPSp(2,1).
#[derive(Clone, Debug)]
pub struct Rank4Classes {
    pub model: SqAlgebraPresentation,
    pub t2: F2Poly,
    pub t3: F2Poly,
    /// y_ℓ attached to s_k: s1 uses y2, s2 uses y1, s3 uses y1+y2 (swapped if `swap_indexing`).
    pub y_for_s: [F2Poly; 3],
    pub s: [F2Poly; 3],
    pub t8: F2Poly,
    pub t12: F2Poly,
}

impl Rank4Classes {
    /// `swap_indexing` swaps the roles of y1 and y2 in s1, s2.
    pub fn new(swap_indexing: bool) -> Self {
        let model = rank4_model();
        let r = model.ring().clone();
        let p = |s: &str| r.parse(s).expect("valid polynomial");
        let t2 = p("x1^2 + x1*x2 + x2^2");
        let t3 = p("x1*x2*(x1 + x2)");
        let (ya, yb) = if swap_indexing { (p("y1"), p("y2")) } else { (p("y2"), p("y1")) };
        let y3 = &ya + &yb;
        let s_of = |y: &F2Poly| &(&(&t3 * y) + &(&t2 * &y.square())) + &y.square().square();
        let s = [s_of(&ya), s_of(&yb), s_of(&y3)];
        let t8 = &(&s[0].square() + &(&s[0] * &s[1])) + &s[1].square();
        let t12 = &(&s[0] * &s[1]) * &(&s[0] + &s[1]);
        Rank4Classes { model, t2, t3, y_for_s: [ya, yb, y3], s, t8, t12 }
    }
}

pub fn bpsp3_ring() -> WeightedPolyRing {
    WeightedPolyRing::new(&[("t2", 2), ("t3", 3), ("t8", 8), ("t12", 12)]).expect("valid ring")
}

pub fn bpsp21_ring() -> WeightedPolyRing {
    WeightedPolyRing::new(&[("u2", 2), ("u3", 3), ("u4", 4), ("u8", 8)]).expect("valid ring")
}

/// Inclusion of H*BPSp(3) into the rank-4 model.
pub fn bpsp3_detection(c: &Rank4Classes) -> Result<AlgebraMap> {
    AlgebraMap::new(bpsp3_ring(), c.model.ring().clone(), vec![c.t2.clone(), c.t3.clone(), c.t8.clone(), c.t12.clone()])
}

/// Inclusion of H*BPSp(2,1) into the rank-4 model: u4 = s1+s2, u8 = s1·s2.
pub fn bpsp21_detection(c: &Rank4Classes) -> Result<AlgebraMap> {
    AlgebraMap::new(
        bpsp21_ring(),
        c.model.ring().clone(),
        vec![c.t2.clone(), c.t3.clone(), &c.s[0] + &c.s[1], &c.s[0] * &c.s[1]],
    )
}

/// H*BPSp(3) with its full Steenrod action, read off the rank-4 model.
pub fn bpsp3() -> Result<SqAlgebraPresentation> {
    let c = Rank4Classes::new(false);
    let m = bpsp3_detection(&c)?;
    SqAlgebraPresentation::derive_via(bpsp3_ring(), (0..4).map(|g| m.image(g).clone()).collect(), &c.model)
}

/// H*BPSp(2,1) = F₂[u2,u3,u4,u8] with its full Steenrod action.
pub fn bpsp21() -> Result<SqAlgebraPresentation> {
    let c = Rank4Classes::new(false);
    let m = bpsp21_detection(&c)?;
    SqAlgebraPresentation::derive_via(bpsp21_ring(), (0..4).map(|g| m.image(g).clone()).collect(), &c.model)
}

/// Three mod-2 Chern roots a, b, c in degree 2.
pub fn chern_roots3() -> SqAlgebraPresentation {
    SqAlgebraPresentation::degree_two(&["a", "b", "c"]).expect("valid ring")
}

pub fn bu3_ring() -> WeightedPolyRing {
    WeightedPolyRing::new(&[("c2", 2), ("c4", 4), ("c6", 6)]).expect("valid ring")
}

/// H*BU(3) = F₂[c2,c4,c6] via its three Chern roots.
pub fn bu3() -> Result<SqAlgebraPresentation> {
    let roots = chern_roots3();
    let r = roots.ring();
    let imgs = ["a + b + c", "a*b + a*c + b*c", "a*b*c"].iter().map(|s| r.parse(s)).collect::<Result<Vec<_>>>()?;
    SqAlgebraPresentation::derive_via(bu3_ring(), imgs, &roots)
}

pub fn bsu3_ring() -> WeightedPolyRing {
    WeightedPolyRing::new(&[("y4", 4), ("y6", 6)]).expect("valid ring")
}

/// H*BSU(3) = F₂[y4,y6], via roots a, b, a+b (the roots sum to zero).
pub fn bsu3() -> Result<SqAlgebraPresentation> {
    let roots = SqAlgebraPresentation::degree_two(&["a", "b"])?;
    let r = roots.ring();
    let imgs = vec![r.parse("a^2 + a*b + b^2")?, r.parse("a*b*(a + b)")?];
    SqAlgebraPresentation::derive_via(bsu3_ring(), imgs, &roots)
}

pub fn cp2_total_ring() -> WeightedPolyRing {
    WeightedPolyRing::new(&[("x2", 2), ("x4", 4)]).expect("valid ring")
}

/// H*BS(U(1)×U(2)) = F₂[x2,x4], via U(2)-roots p, q with x2 = p+q, x4 = pq.
pub fn cp2_total() -> Result<SqAlgebraPresentation> {
    let roots = SqAlgebraPresentation::degree_two(&["p", "q"])?;
    let r = roots.ring();
    let imgs = vec![r.parse("p + q")?, r.parse("p*q")?];
    SqAlgebraPresentation::derive_via(cp2_total_ring(), imgs, &roots)
}

pub fn bu1xbu2_ring() -> WeightedPolyRing {
    WeightedPolyRing::new(&[("a2", 2), ("b2", 2), ("b4", 4)]).expect("valid ring")
}

/// j*: H*BU(3) → H*B(U(1)×U(2)) from the product formula for Chern classes.
pub fn j_star() -> Result<AlgebraMap> {
    AlgebraMap::from_strings(bu3_ring(), bu1xbu2_ring(), &["a2 + b2", "a2*b2 + b4", "a2*b4"])
}

/// f*: H*B(U(1)×U(2)) → H*BS(U(1)×U(2)), a2, b2 ↦ x2 and b4 ↦ x4.
pub fn f_star() -> Result<AlgebraMap> {
    AlgebraMap::from_strings(bu1xbu2_ring(), cp2_total_ring(), &["x2", "x2", "x4"])
}

/// π*: H*BSU(3) → H*BS(U(1)×U(2)).
pub fn cp2_pullback() -> Result<AlgebraMap> {
    AlgebraMap::from_strings(bsu3_ring(), cp2_total_ring(), &["x2^2 + x4", "x2*x4"])
}

/// π*: H*BPSp(3) → H*BPSp(2,1).
pub fn hp2_pullback() -> Result<AlgebraMap> {
    AlgebraMap::from_strings(bpsp3_ring(), bpsp21_ring(), &["u2", "u3", "u4^2 + u8", "u4*u8"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsu3_action() {
        let p = bsu3().unwrap();
        let r = p.ring();
        let y4 = r.gen(0);
        let y6 = r.gen(1);
        assert!(p.sq(1, &y4).is_zero());
        assert_eq!(p.sq(2, &y4), y6);
        assert!(p.sq(1, &y6).is_zero());
        assert!(p.sq(2, &y6).is_zero());
        assert_eq!(p.sq(4, &y6), &y4 * &y6);
        assert!(p.sq(3, &y6).is_zero());
    }

    #[test]
    fn cp2_total_action() {
        let p = cp2_total().unwrap();
        let r = p.ring();
        assert_eq!(p.sq(2, &r.gen(0)).to_string(), "x2^2");
        assert_eq!(p.sq(2, &r.gen(1)).to_string(), "x2*x4");
        assert!(p.sq(1, &r.gen(1)).is_zero());
        assert!(p.sq(3, &r.gen(1)).is_zero());
    }

    #[test]
    fn bpsp3_low_squares() {
        let p = bpsp3().unwrap();
        let r = p.ring();
        let g = |s: &str| r.parse(s).unwrap();
        assert_eq!(p.sq(1, &g("t2")), g("t3"));
        assert_eq!(p.sq(2, &g("t2")), g("t2^2"));
        assert!(p.sq(1, &g("t3")).is_zero());
        assert_eq!(p.sq(2, &g("t3")), g("t2*t3"));
        assert!(p.sq(1, &g("t8")).is_zero());
        assert!(p.sq(2, &g("t8")).is_zero());
        assert!(p.sq(1, &g("t12")).is_zero());
        assert_eq!(p.sq(2, &g("t12")), g("t2*t12"));
    }
}
