use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::IntMat;

/// Column-compressed integer matrix. Each column holds `(row, value)` pairs
/// sorted by row with no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, BigInt)>>,
}

impl SparseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, data: (0..n).map(|i| vec![(i, BigInt::from(1))]).collect() }
    }

    /// Sums duplicate positions and drops zeros.
    pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, BigInt)>) -> Self {
        t.sort_by_key(|a| (a.1, a.0));
        let mut data: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); cols];
        for (i, j, v) in t {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            let col = &mut data[j];
            match col.last_mut() {
                Some((r, x)) if *r == i => *x += v,
                _ => col.push((i, v)),
            }
        }
        for col in &mut data {
            col.retain(|(_, v)| !v.is_zero());
        }
        Self { rows, cols, data }
    }

    /// Columns given as sparse vectors (any order, duplicates summed).
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigInt)>>) -> Self {
        let cols = columns.len();
        let t = columns.into_iter().enumerate().flat_map(|(j, c)| c.into_iter().map(move |(i, v)| (i, j, v))).collect();
        Self::from_triplets(rows, cols, t)
    }

    pub fn from_dense(m: &IntMat) -> Self {
        let data = (0..m.cols())
            .map(|j| (0..m.rows()).filter(|&i| !m.get(i, j).is_zero()).map(|i| (i, m.get(i, j).clone())).collect())
            .collect();
        Self { rows: m.rows(), cols: m.cols(), data }
    }

    pub fn to_dense(&self) -> IntMat {
        let mut m = IntMat::zeros(self.rows, self.cols);
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn col(&self, j: usize) -> &[(usize, BigInt)] {
        &self.data[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, BigInt)>] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.data[j].binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) => self.data[j][k].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.data.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                data[*i].push((j, v.clone()));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn neg(&self) -> Self {
        let data = self.data.iter().map(|c| c.iter().map(|(i, v)| (*i, -v)).collect()).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let data = self.data.iter().map(|c| c.iter().map(|(i, v)| (*i, v * k)).collect()).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "sum shape mismatch");
        let t = self.triplets().chain(other.triplets()).map(|(i, j, v)| (i, j, v.clone())).collect();
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![BigInt::zero(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (i, x) in col {
                out[*i] += x * &v[j];
            }
        }
        out
    }

    /// Applies the matrix to a sparse vector.
    pub fn mul_sparse(&self, v: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
        let mut acc: std::collections::BTreeMap<usize, BigInt> = Default::default();
        for (j, x) in v {
            for (i, a) in &self.data[*j] {
                *acc.entry(*i).or_default() += a * x;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Submatrix on the given rows (in order) and all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            pos[r] = k;
        }
        let data = self
            .data
            .iter()
            .map(|c| {
                let mut v: Vec<(usize, BigInt)> =
                    c.iter().filter(|(i, _)| pos[*i] != usize::MAX).map(|(i, x)| (pos[*i], x.clone())).collect();
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect();
        Self { rows: rows.len(), cols: self.cols, data }
    }

    pub fn max_abs(&self) -> BigInt {
        self.triplets().map(|(_, _, v)| num_traits::Signed::abs(v)).max().unwrap_or_default()
    }

    /// `{"rows", "cols", "entries": [[i, j, v], ...]}`; values that do not fit
    /// in 64 bits are written as decimal strings.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .triplets()
            .map(|(i, j, v)| match v.to_i64() {
                Some(x) => json!([i, j, x]),
                None => json!([i, j, v.to_string()]),
            })
            .collect();
        json!({ "rows": self.rows, "cols": self.cols, "entries": entries })
    }
}

impl Mul for &SparseMat {
    type Output = SparseMat;

    fn mul(self, rhs: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, rhs.rows, "product shape mismatch");
        let data = rhs.data.iter().map(|c| self.mul_sparse(c)).collect();
        SparseMat { rows: self.rows, cols: rhs.cols, data }
    }
}

/// Accumulates a block matrix from sparse pieces placed at offsets.
#[derive(Debug)]
pub struct BlockBuilder {
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, BigInt)>,
}

impl BlockBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, triplets: Vec::new() }
    }

    /// Adds `sign * block` with its top-left corner at `(r0, c0)`.
    pub fn add(&mut self, r0: usize, c0: usize, block: &SparseMat, negate: bool) {
        assert!(r0 + block.rows() <= self.rows && c0 + block.cols() <= self.cols, "block out of range");
        for (i, j, v) in block.triplets() {
            let v = if negate { -v } else { v.clone() };
            self.triplets.push((r0 + i, c0 + j, v));
        }
    }

    pub fn build(self) -> SparseMat {
        SparseMat::from_triplets(self.rows, self.cols, self.triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_product() {
        let a = IntMat::from_rows(&[[1, 0, 2], [0, -3, 0]]);
        let b = IntMat::from_rows(&[[1, 1], [2, 0], [0, 5]]);
        let sa = SparseMat::from_dense(&a);
        assert_eq!(sa.to_dense(), a);
        assert_eq!((&sa * &SparseMat::from_dense(&b)).to_dense(), &a * &b);
        assert_eq!(sa.transpose().to_dense(), a.transpose());
        assert_eq!(sa.nnz(), 3);
    }

    #[test]
    fn triplets_cancel() {
        let m = SparseMat::from_triplets(2, 2, vec![(0, 0, 1.into()), (0, 0, (-1).into()), (1, 0, 2.into())]);
        assert_eq!(m.col(0), &[(1, BigInt::from(2))]);
    }
}
