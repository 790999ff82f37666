use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMat;

/// Smith normal form with transforms: `u * m * v == s`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl SnfResult {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).take_while(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

/// Quotient rounding to nearest, so that `|a - q b| <= |b| / 2`.
pub(crate) fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice = &r * 2;
    if b.is_positive() {
        if twice > *b {
            q + 1
        } else {
            q
        }
    } else if twice < *b {
        q + 1
    } else {
        q
    }
}

/// Smith normal form by pivoting on minimal-absolute-value entries.
pub fn snf(m: &IntMat) -> SnfResult {
    let (rows, cols) = m.shape();
    let mut s = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_abs_entry(&s, t) else {
                return SnfResult { s, u, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = div_nearest(s.get(i, t), &p);
                let nq = -q;
                s.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = div_nearest(s.get(t, j), &p);
                let nq = -q;
                s.add_col_multiple(j, t, &nq);
                v.add_col_multiple(j, t, &nq);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { s, u, v }
}

fn min_abs_entry(s: &IntMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().map_or(true, |(_, _, b)| a < *b) {
                let unit = a.is_one();
                best = Some((i, j, a));
                if unit {
                    let (i, j, _) = best.unwrap();
                    return Some((i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Turns an arbitrary list of nonzero diagonal entries into invariant factors
/// (positive, each dividing the next).
pub fn normalize_diagonal(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.retain(|x| !x.is_zero());
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            if d[j].is_multiple_of(&d[i]) {
                continue;
            }
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.sort();
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &IntMat) -> Vec<i64> {
        snf(m).diagonal().iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(diag(&IntMat::from_rows(&[[2, 0], [0, 3]])), vec![1, 6]);
        assert!(diag(&IntMat::zeros(2, 3)).is_empty());
        assert_eq!(diag(&IntMat::from_rows(&[[2, 4], [6, 8]])), vec![2, 4]);
        let r = snf(&IntMat::zeros(0, 4));
        assert_eq!(r.s.shape(), (0, 4));
        assert_eq!(r.v.shape(), (4, 4));
    }

    #[test]
    fn transforms_are_consistent() {
        let m = IntMat::from_rows(&[[4, 6, 2], [2, 8, 0], [6, 2, 4]]);
        let r = snf(&m);
        assert_eq!(&(&r.u * &m) * &r.v, r.s);
        assert!(r.u.is_unimodular());
        assert!(r.v.is_unimodular());
    }

    #[test]
    fn diagonal_normalization() {
        let d = normalize_diagonal(vec![BigInt::from(4), BigInt::from(-6), BigInt::from(1)]);
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(2), BigInt::from(12)]);
    }
}
