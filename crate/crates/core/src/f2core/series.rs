use std::fmt;

use super::WeightedPolyRing;
use crate::error::{Error, Result};

/// Truncated Poincaré series: `coeffs[d]` is the dimension in degree `d`.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize)]
pub struct PoincareSeries {
    coeffs: Vec<u64>,
}

impl PoincareSeries {
    pub fn zero(max_degree: u32) -> Self {
        PoincareSeries { coeffs: vec![0; max_degree as usize + 1] }
    }

    pub fn one(max_degree: u32) -> Self {
        let mut s = Self::zero(max_degree);
        s.coeffs[0] = 1;
        s
    }

    pub fn from_coeffs(coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("series needs at least one coefficient".into()));
        }
        Ok(PoincareSeries { coeffs })
    }

    /// Sum of t^d over the given degrees (a finite polynomial), truncated.
    pub fn from_degrees(max_degree: u32, degrees: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::zero(max_degree);
        for d in degrees {
            if d <= max_degree {
                s.coeffs[d as usize] += 1;
            }
        }
        s
    }

    /// 1/(1 − t^d) truncated.
    pub fn geometric(max_degree: u32, d: u32) -> Self {
        assert!(d > 0);
        Self::from_degrees(max_degree, (0..=max_degree / d).map(|k| k * d))
    }

    pub fn max_degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn get(&self, d: u32) -> u64 {
        self.coeffs.get(d as usize).copied().unwrap_or(0)
    }

    pub fn set(&mut self, d: u32, v: u64) {
        self.coeffs[d as usize] = v;
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::Dimension { expected: self.coeffs.len(), got: other.coeffs.len() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(PoincareSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(PoincareSeries { coeffs: out })
    }

    /// Multiply by t^k (k may be negative; coefficients shifted below 0 must vanish).
    pub fn shift(&self, k: i32) -> Result<Self> {
        let mut out = Self::zero(self.max_degree());
        for (d, &c) in self.coeffs.iter().enumerate() {
            let nd = d as i64 + k as i64;
            if c == 0 || nd > self.max_degree() as i64 {
                continue;
            }
            if nd < 0 {
                return Err(Error::Invalid("shift moves a nonzero coefficient below degree 0".into()));
            }
            out.coeffs[nd as usize] += c;
        }
        Ok(out)
    }
}

impl fmt::Display for PoincareSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Degreewise monomial count of a weighted polynomial ring.
pub fn series_of_ring(ring: &WeightedPolyRing, max_degree: u32) -> PoincareSeries {
    let mut c = vec![0u64; max_degree as usize + 1];
    c[0] = 1;
    for &d in ring.degrees() {
        let d = d as usize;
        for i in d..c.len() {
            c[i] += c[i - d];
        }
    }
    PoincareSeries { coeffs: c }
}

impl WeightedPolyRing {
    pub fn series(&self, max_degree: u32) -> PoincareSeries {
        series_of_ring(self, max_degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsp3_series_matches_product_of_geometrics() {
        let r = WeightedPolyRing::new(&[("t2", 2), ("t3", 3), ("t8", 8), ("t12", 12)]).unwrap();
        let mut expect = PoincareSeries::one(60);
        for d in [2, 3, 8, 12] {
            expect = expect.mul(&PoincareSeries::geometric(60, d)).unwrap();
        }
        assert_eq!(r.series(60), expect);
    }

    #[test]
    fn bsu3_degree_ten_by_enumeration() {
        let r = WeightedPolyRing::new(&[("y4", 4), ("y6", 6)]).unwrap();
        let brute = (0..=10u32).flat_map(|a| (0..=10u32).map(move |b| (a, b))).filter(|(a, b)| 4 * a + 6 * b == 10).count();
        assert_eq!(brute, 1);
        assert_eq!(r.series(10).get(10), 1);
    }

    #[test]
    fn empty_ring_series() {
        let r = WeightedPolyRing::new::<&str>(&[]).unwrap();
        assert_eq!(r.series(4).coeffs(), &[1, 0, 0, 0, 0]);
    }
}
