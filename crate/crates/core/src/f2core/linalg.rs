use crate::error::{Error, Result};

const W: usize = 64;

#[inline]
fn words(n: usize) -> usize {
    n.div_ceil(W)
}

/// Packed vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F2Vector {
    len: usize,
    bits: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector { len, bits: vec![0; words(len)] }
    }

    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            assert!(i < len, "index {i} out of range {len}");
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_support(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bits[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, val: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % W);
        if val {
            self.bits[i / W] |= m;
        } else {
            self.bits[i / W] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.bits[i / W] ^= 1u64 << (i % W);
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * W + t)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.support().next()
    }

    pub fn add_assign(&mut self, other: &F2Vector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }
}

/// Dense matrix over F₂, rows packed into u64 words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix { rows, cols, data: vec![F2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<F2Vector>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::Dimension { expected: cols, got: r.len() });
            }
        }
        Ok(F2Matrix { rows: rows.len(), cols, data: rows })
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| F2Vector::from_bools(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.data[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.support() {
                t.data[j].flip(i);
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &F2Vector) -> Result<F2Vector> {
        if x.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: x.len() });
        }
        Ok(F2Vector::from_bools(&self.data.iter().map(|r| r.dot(x)).collect::<Vec<_>>()))
    }

    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, got: other.rows });
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            for k in r.support() {
                out.data[i].add_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.add_assign(b);
        }
        Ok(out)
    }

    /// Reduced row echelon form in place; returns pivot columns in row order.
    /// Pivots are chosen at the lowest available column index.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.data[i].get(c)) else { continue };
            self.data.swap(r, p);
            let pivot_row = self.data[r].clone();
            for i in 0..self.rows {
                if i != r && self.data[i].get(c) {
                    self.data[i].add_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Some x with Ax=b; free variables are set to zero.
    pub fn solve(&self, b: &F2Vector) -> Result<F2Vector> {
        if b.len() != self.rows {
            return Err(Error::Dimension { expected: self.rows, got: b.len() });
        }
        let mut aug = F2Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in self.data[i].support() {
                aug.data[i].set(j, true);
            }
            aug.data[i].set(self.cols, b.get(i));
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = F2Vector::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if aug.data[r].get(self.cols) {
                x.set(c, true);
            }
        }
        Ok(x)
    }

    /// Basis of the null space {x : Ax = 0}.
    pub fn kernel(&self) -> Vec<F2Vector> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = F2Vector::zeros(self.cols);
            x.set(free, true);
            for (r, &c) in pivots.iter().enumerate() {
                if m.data[r].get(free) {
                    x.set(c, true);
                }
            }
            basis.push(x);
        }
        basis
    }

    pub fn inverse(&self) -> Result<F2Matrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut aug = F2Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in self.data[i].support() {
                aug.data[i].set(j, true);
            }
            aug.data[i].set(n + i, true);
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::NoSolution);
        }
        let mut inv = F2Matrix::zeros(n, n);
        for i in 0..n {
            for j in aug.data[i].support().filter(|&j| j >= n) {
                inv.data[i].set(j - n, true);
            }
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let b = F2Vector::from_support(5, [0, 3, 4]);
        assert_eq!(F2Matrix::identity(5).solve(&b).unwrap(), b);
    }

    #[test]
    fn zero_matrix_no_solution() {
        let b = F2Vector::from_support(3, [1]);
        assert_eq!(F2Matrix::zeros(3, 3).solve(&b), Err(Error::NoSolution));
        assert!(matches!(F2Matrix::zeros(3, 3).solve(&F2Vector::zeros(2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn two_by_two_against_exhaustive() {
        let a = F2Matrix::from_bools(&[vec![true, true], vec![false, true]]).unwrap();
        let b = F2Vector::from_bools(&[true, true]);
        let sols: Vec<_> = (0..4u8)
            .map(|m| F2Vector::from_bools(&[m & 1 == 1, m & 2 == 2]))
            .filter(|x| a.mul_vec(x).unwrap() == b)
            .collect();
        assert_eq!(sols, vec![F2Vector::from_bools(&[false, true])]);
        assert_eq!(a.solve(&b).unwrap(), sols[0]);
    }

    #[test]
    fn kernel_and_inverse() {
        let a = F2Matrix::from_bools(&[vec![true, true, false], vec![false, true, true]]).unwrap();
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).unwrap().is_zero());
        let m = F2Matrix::from_bools(&[vec![true, true], vec![false, true]]).unwrap();
        assert_eq!(m.mul(&m.inverse().unwrap()).unwrap(), F2Matrix::identity(2));
        assert!(F2Matrix::zeros(2, 2).inverse().is_err());
    }

    #[test]
    fn wide_vectors_cross_word_boundary() {
        let v = F2Vector::from_support(130, [0, 63, 64, 129]);
        assert_eq!(v.support().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.weight(), 4);
    }
}
