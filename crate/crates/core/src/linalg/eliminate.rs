//! Sparse integer elimination: ranks, invariant factors and saturated kernels.
//!
//! Work starts in checked `i64` arithmetic and restarts with `BigInt` the
//! first time an operation would overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lattice::kernel_basis;
use super::snf::{div_nearest, normalize_diagonal};
use super::{IntMat, SparseMat};

#[derive(Debug)]
struct Overflow;

type Res<T> = Result<T, Overflow>;

trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn from_big(b: &BigInt) -> Res<Self>;
    fn to_big(&self) -> BigInt;
    /// `self - f * b`
    fn sub_mul(&self, f: &Self, b: &Self) -> Res<Self>;
    fn mul(&self, o: &Self) -> Res<Self>;
    fn abs_lt(&self, o: &Self) -> bool;
    fn div_nearest(&self, p: &Self) -> Res<Self>;
}

impl Scalar for i64 {
    fn nil() -> Self {
        0
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn from_big(b: &BigInt) -> Res<Self> {
        b.to_i64().filter(|x| *x != i64::MIN).ok_or(Overflow)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Res<Self> {
        f.checked_mul(*b).and_then(|x| self.checked_sub(x)).filter(|x| *x != i64::MIN).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Res<Self> {
        self.checked_mul(*o).filter(|x| *x != i64::MIN).ok_or(Overflow)
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.unsigned_abs() < o.unsigned_abs()
    }
    fn div_nearest(&self, p: &Self) -> Res<Self> {
        Self::from_big(&div_nearest(&self.to_big(), &p.to_big()))
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_nil(&self) -> bool {
        <BigInt as Zero>::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn from_big(b: &BigInt) -> Res<Self> {
        Ok(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Res<Self> {
        Ok(self - f * b)
    }
    fn mul(&self, o: &Self) -> Res<Self> {
        Ok(self * o)
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.abs() < o.abs()
    }
    fn div_nearest(&self, p: &Self) -> Res<Self> {
        Ok(div_nearest(self, p))
    }
}

type Row<T> = Vec<(u32, T)>;

fn find<T>(row: &Row<T>, c: u32) -> Option<&T> {
    row.binary_search_by_key(&c, |(j, _)| *j).ok().map(|k| &row[k].1)
}

/// `dst - f * src`; also reports columns that became nonzero.
fn axpy<T: Scalar>(dst: &Row<T>, f: &T, src: &Row<T>, fresh: &mut Vec<u32>) -> Res<Row<T>> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut a, mut b) = (0, 0);
    while a < dst.len() || b < src.len() {
        let ca = dst.get(a).map_or(u32::MAX, |x| x.0);
        let cb = src.get(b).map_or(u32::MAX, |x| x.0);
        if ca < cb {
            out.push(dst[a].clone());
            a += 1;
        } else if cb < ca {
            let v = T::nil().sub_mul(f, &src[b].1)?;
            if !v.is_nil() {
                out.push((cb, v));
                fresh.push(cb);
            }
            b += 1;
        } else {
            let v = dst[a].1.sub_mul(f, &src[b].1)?;
            if !v.is_nil() {
                out.push((ca, v));
            }
            a += 1;
            b += 1;
        }
    }
    Ok(out)
}

struct Engine<T> {
    rows: Vec<Row<T>>,
    row_alive: Vec<bool>,
    col_rows: Vec<Vec<u32>>,
    col_alive: Vec<bool>,
    /// `(column, pivot row snapshot)` of every unit pivot, in order.
    pivots: Vec<(u32, Row<T>)>,
    keep_pivots: bool,
}

impl<T: Scalar> Engine<T> {
    /// Rows of the engine are the columns of `m`.
    fn from_columns(m: &SparseMat, keep_pivots: bool) -> Res<Self> {
        let ncols = m.rows();
        let mut rows = Vec::with_capacity(m.cols());
        let mut col_rows = vec![Vec::new(); ncols];
        for (r, col) in m.columns().iter().enumerate() {
            let mut row = Vec::with_capacity(col.len());
            for (i, v) in col {
                row.push((*i as u32, T::from_big(v)?));
                col_rows[*i].push(r as u32);
            }
            rows.push(row);
        }
        let n = rows.len();
        Ok(Self {
            rows,
            row_alive: vec![true; n],
            col_rows,
            col_alive: vec![true; ncols],
            pivots: Vec::new(),
            keep_pivots,
        })
    }

    fn live_rows_in(&mut self, c: u32) -> Vec<u32> {
        let rows = &self.rows;
        let alive = &self.row_alive;
        let list = &mut self.col_rows[c as usize];
        list.sort_unstable();
        list.dedup();
        list.retain(|&r| alive[r as usize] && find(&rows[r as usize], c).is_some());
        list.clone()
    }

    /// Eliminates column `c` from every other live row using row `r`.
    fn clear_column(&mut self, r: u32, c: u32) -> Res<()> {
        let prow = self.rows[r as usize].clone();
        let p = find(&prow, c).unwrap().clone();
        let unit = p.is_unit();
        let mut fresh = Vec::new();
        for i in self.live_rows_in(c) {
            if i == r {
                continue;
            }
            let a = find(&self.rows[i as usize], c).unwrap().clone();
            let f = if unit { a.mul(&p)? } else { a.div_nearest(&p)? };
            fresh.clear();
            let new = axpy(&self.rows[i as usize], &f, &prow, &mut fresh)?;
            self.rows[i as usize] = new;
            for &j in &fresh {
                self.col_rows[j as usize].push(i);
            }
        }
        Ok(())
    }

    fn kill(&mut self, r: u32, c: u32) {
        self.row_alive[r as usize] = false;
        self.col_alive[c as usize] = false;
        self.col_rows[c as usize].clear();
    }

    /// Phase one: unit pivots in the spirit of Markowitz ordering.
    fn unit_phase(&mut self) -> Res<usize> {
        let mut count = 0;
        loop {
            let mut order: Vec<u32> = (0..self.col_alive.len() as u32)
                .filter(|&c| self.col_alive[c as usize] && !self.col_rows[c as usize].is_empty())
                .collect();
            order.sort_by_key(|&c| (self.col_rows[c as usize].len(), c));
            let mut progress = false;
            for c in order {
                if !self.col_alive[c as usize] {
                    continue;
                }
                let live = self.live_rows_in(c);
                let best = live
                    .iter()
                    .copied()
                    .filter(|&r| find(&self.rows[r as usize], c).is_some_and(T::is_unit))
                    .min_by_key(|&r| (self.rows[r as usize].len(), r));
                let Some(r) = best else { continue };
                self.clear_column(r, c)?;
                if self.keep_pivots {
                    self.pivots.push((c, self.rows[r as usize].clone()));
                }
                self.rows[r as usize] = Vec::new();
                self.kill(r, c);
                count += 1;
                progress = true;
            }
            if !progress {
                return Ok(count);
            }
        }
    }

    /// Phase two: Euclidean reduction of whatever is left. Returns the
    /// diagonal entries produced, in absolute value.
    fn euclid_phase(&mut self) -> Res<Vec<BigInt>> {
        let mut diag = Vec::new();
        loop {
            let mut best: Option<(usize, u32)> = None;
            for c in 0..self.col_alive.len() as u32 {
                if !self.col_alive[c as usize] {
                    continue;
                }
                let n = self.live_rows_in(c).len();
                if n > 0 && best.map_or(true, |b| (n, c) < b) {
                    best = Some((n, c));
                }
            }
            let Some((_, mut c)) = best else { break };
            loop {
                if !self.col_alive[c as usize] {
                    break;
                }
                let live = self.live_rows_in(c);
                let Some(r) = live.iter().copied().min_by(|&x, &y| {
                    let (a, b) = (find(&self.rows[x as usize], c).unwrap(), find(&self.rows[y as usize], c).unwrap());
                    if a.abs_lt(b) {
                        std::cmp::Ordering::Less
                    } else if b.abs_lt(a) {
                        std::cmp::Ordering::Greater
                    } else {
                        (self.rows[x as usize].len(), x).cmp(&(self.rows[y as usize].len(), y))
                    }
                }) else {
                    break;
                };
                self.clear_column(r, c)?;
                if self.live_rows_in(c).len() > 1 {
                    continue;
                }
                // column c is now p e_r; reduce row r by column operations
                let p = find(&self.rows[r as usize], c).unwrap().clone();
                let mut next: Option<(u32, T)> = None;
                let mut row = std::mem::take(&mut self.rows[r as usize]);
                for (j, v) in row.iter_mut() {
                    if *j == c {
                        continue;
                    }
                    let q = v.div_nearest(&p)?;
                    *v = v.sub_mul(&q, &p)?;
                    if !v.is_nil() && next.as_ref().map_or(true, |(_, w)| v.abs_lt(w)) {
                        next = Some((*j, v.clone()));
                    }
                }
                row.retain(|(j, v)| *j == c || !v.is_nil());
                self.rows[r as usize] = row;
                match next {
                    None => {
                        diag.push(p.to_big().abs());
                        self.rows[r as usize] = Vec::new();
                        self.kill(r, c);
                        break;
                    }
                    Some((j, _)) => c = j,
                }
            }
        }
        Ok(diag)
    }

    fn live_core(&self) -> Vec<u32> {
        (0..self.rows.len() as u32)
            .filter(|&r| self.row_alive[r as usize] && !self.rows[r as usize].is_empty())
            .collect()
    }
}

fn with_fallback<R>(f: impl Fn(bool) -> Res<R>) -> R {
    match f(false) {
        Ok(r) => r,
        Err(Overflow) => f(true).expect("arbitrary precision never overflows"),
    }
}

fn invariant_diagonal<T: Scalar>(m: &SparseMat) -> Res<Vec<BigInt>> {
    let mut e = Engine::<T>::from_columns(m, false)?;
    let units = e.unit_phase()?;
    let mut diag = vec![BigInt::one(); units];
    diag.extend(e.euclid_phase()?);
    Ok(diag)
}

/// Nonzero invariant factors of `m` (including the ones), as a divisibility chain.
pub fn invariant_factors(m: &SparseMat) -> Vec<BigInt> {
    let d = with_fallback(|big| if big { invariant_diagonal::<BigInt>(m) } else { invariant_diagonal::<i64>(m) });
    normalize_diagonal(d)
}

/// Rank over the rationals.
pub fn rank(m: &SparseMat) -> usize {
    invariant_factors(m).len()
}

/// Saturated basis of `{x ∈ Z^cols : m x = 0}` with exact coordinate solves.
///
/// Basis order: unconstrained variables (ascending) first, then the basis of
/// the residual dense system.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    dim: usize,
    free: Vec<usize>,
    core_cols: Vec<usize>,
    /// Echelon rows; row `i` is a basis vector restricted to `core_cols`.
    core_rows: IntMat,
    core_leads: Vec<usize>,
    pivots: Vec<(usize, Vec<(usize, BigInt)>)>,
}

impl KernelBasis {
    pub fn new(m: &SparseMat) -> Self {
        with_fallback(|big| if big { Self::build::<BigInt>(m) } else { Self::build::<i64>(m) })
    }

    fn build<T: Scalar>(m: &SparseMat) -> Res<Self> {
        let dim = m.cols();
        let mut e = Engine::<T>::from_columns(&m.transpose(), true)?;
        e.unit_phase()?;
        let core = e.live_core();
        let mut in_core = vec![false; dim];
        for &r in &core {
            for (j, _) in &e.rows[r as usize] {
                in_core[*j as usize] = true;
            }
        }
        let alive: Vec<usize> = (0..dim).filter(|&c| e.col_alive[c]).collect();
        let free: Vec<usize> = alive.iter().copied().filter(|&c| !in_core[c]).collect();
        let core_cols: Vec<usize> = alive.iter().copied().filter(|&c| in_core[c]).collect();
        let mut pos = vec![usize::MAX; dim];
        for (k, &c) in core_cols.iter().enumerate() {
            pos[c] = k;
        }
        let mut dense = IntMat::zeros(core.len(), core_cols.len());
        for (i, &r) in core.iter().enumerate() {
            for (j, v) in &e.rows[r as usize] {
                dense.set(i, pos[*j as usize], v.to_big());
            }
        }
        let core_rows = kernel_basis(&dense).transpose();
        let core_leads = (0..core_rows.rows())
            .map(|i| (0..core_rows.cols()).find(|&j| !core_rows.get(i, j).is_zero()).unwrap())
            .collect();
        let pivots = e
            .pivots
            .iter()
            .map(|(c, row)| (*c as usize, row.iter().map(|(j, v)| (*j as usize, v.to_big())).collect()))
            .collect();
        Ok(Self { dim, free, core_cols, core_rows, core_leads, pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.free.len() + self.core_rows.rows()
    }

    /// Basis vectors as the columns of an `ambient × rank` matrix.
    pub fn vectors(&self) -> SparseMat {
        use rayon::prelude::*;
        let seeds: Vec<Vec<(usize, BigInt)>> = self
            .free
            .iter()
            .map(|&f| vec![(f, BigInt::one())])
            .chain((0..self.core_rows.rows()).map(|i| {
                self.core_cols
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| !self.core_rows.get(i, *k).is_zero())
                    .map(|(k, &c)| (c, self.core_rows.get(i, k).clone()))
                    .collect()
            }))
            .collect();
        let cols: Vec<Vec<(usize, BigInt)>> = seeds.into_par_iter().map(|s| self.extend(s)).collect();
        SparseMat::from_columns(self.dim, cols)
    }

    fn extend(&self, seed: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
        let mut x = vec![BigInt::zero(); self.dim];
        for (c, v) in seed {
            x[c] = v;
        }
        for (c, row) in self.pivots.iter().rev() {
            let mut p = BigInt::zero();
            let mut s = BigInt::zero();
            for (j, v) in row {
                if j == c {
                    p = v.clone();
                } else if !x[*j].is_zero() {
                    s += v * &x[*j];
                }
            }
            // p is a unit, so p^{-1} = p
            x[*c] = -(p * s);
        }
        x.into_iter().enumerate().filter(|(_, v)| !v.is_nil()).collect()
    }

    /// Coordinates of a kernel element in this basis; `None` if `y` is not in
    /// the kernel lattice.
    pub fn coordinates(&self, y: &[(usize, BigInt)]) -> Option<Vec<BigInt>> {
        let mut full = vec![BigInt::zero(); self.dim];
        for (i, v) in y {
            full[*i] = v.clone();
        }
        let mut out: Vec<BigInt> = self.free.iter().map(|&f| full[f].clone()).collect();
        let mut rest: Vec<BigInt> = self.core_cols.iter().map(|&c| full[c].clone()).collect();
        for (i, &lead) in self.core_leads.iter().enumerate() {
            let h = self.core_rows.get(i, lead);
            if !rest[lead].is_multiple_of(h) {
                return None;
            }
            let z = &rest[lead] / h;
            if !z.is_zero() {
                for (k, r) in rest.iter_mut().enumerate() {
                    *r -= &z * self.core_rows.get(i, k);
                }
            }
            out.push(z);
        }
        if rest.iter().any(|v| !v.is_nil()) {
            return None;
        }
        let back = self.extend(
            self.free
                .iter()
                .zip(&out)
                .map(|(&f, z)| (f, z.clone()))
                .chain(self.core_cols.iter().enumerate().map(|(k, &c)| {
                    let v: BigInt =
                        (0..self.core_rows.rows()).map(|i| &out[self.free.len() + i] * self.core_rows.get(i, k)).sum();
                    (c, v)
                }))
                .collect(),
        );
        let yv: Vec<(usize, BigInt)> = full.into_iter().enumerate().filter(|(_, v)| !v.is_nil()).collect();
        (back == yv).then_some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::snf::snf;

    fn sp(rows: &[&[i64]]) -> SparseMat {
        SparseMat::from_dense(&IntMat::from_rows(rows))
    }

    #[test]
    fn factors_match_dense() {
        let m = sp(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let dense = snf(&m.to_dense()).diagonal();
        assert_eq!(invariant_factors(&m), dense);
        assert_eq!(invariant_factors(&sp(&[&[2, 4], &[6, 8]])), vec![BigInt::from(2), BigInt::from(4)]);
        assert!(invariant_factors(&SparseMat::zeros(3, 0)).is_empty());
    }

    #[test]
    fn overflow_falls_back() {
        let big = i64::MAX / 3;
        let m = sp(&[&[big, 1], &[1, big]]);
        let d = invariant_factors(&m);
        let det = BigInt::from(big) * BigInt::from(big) - 1;
        assert_eq!(d, vec![BigInt::one(), det]);
    }

    #[test]
    fn kernel_coordinates() {
        let m = sp(&[&[1, 1, 0, 2], &[0, 2, 2, 0]]);
        let k = KernelBasis::new(&m);
        assert_eq!(k.rank(), 2);
        let v = k.vectors();
        assert!((&m * &v).is_zero());
        for j in 0..v.cols() {
            let c = k.coordinates(v.col(j)).unwrap();
            let mut expect = vec![BigInt::zero(); 2];
            expect[j] = BigInt::one();
            assert_eq!(c, expect);
        }
        assert!(k.coordinates(&[(0, BigInt::one())]).is_none());
    }
}
