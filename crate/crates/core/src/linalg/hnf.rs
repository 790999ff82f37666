use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMat;

/// Row-style Hermite normal form: returns `(h, u)` with `h == u * m`, `u`
/// unimodular, pivots positive, entries above each pivot reduced into
/// `[0, pivot)` and zero rows at the bottom. The form depends only on the row
/// lattice of `m`.
pub fn hnf(m: &IntMat) -> (IntMat, IntMat) {
    let (rows, cols) = m.shape();
    let mut h = m.clone();
    let mut u = IntMat::identity(rows);
    let mut pr = 0;
    for j in 0..cols {
        if pr == rows {
            break;
        }
        // gcd-combine column j into row pr
        loop {
            let mut best: Option<usize> = None;
            for i in pr..rows {
                if h.get(i, j).is_zero() {
                    continue;
                }
                if best.map_or(true, |b| h.get(i, j).abs() < h.get(b, j).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pr, b);
            u.swap_rows(pr, b);
            let mut done = true;
            for i in pr + 1..rows {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = -h.get(i, j).div_floor(h.get(pr, j));
                h.add_row_multiple(i, pr, &q);
                u.add_row_multiple(i, pr, &q);
                if !h.get(i, j).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(pr, j).is_zero() {
            continue;
        }
        if h.get(pr, j).is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        let p = h.get(pr, j).clone();
        for i in 0..pr {
            let q: BigInt = -h.get(i, j).div_floor(&p);
            h.add_row_multiple(i, pr, &q);
            u.add_row_multiple(i, pr, &q);
        }
        pr += 1;
    }
    (h, u)
}

/// Nonzero rows of the Hermite form: a canonical basis of the row lattice.
pub fn row_lattice_basis(m: &IntMat) -> IntMat {
    let (h, _) = hnf(m);
    let r = (0..h.rows()).take_while(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    h.row_range(0, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_permutation() {
        let id = IntMat::identity(3);
        let (h, u) = hnf(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);

        let p = IntMat::from_rows(&[[0, 1], [1, 0]]);
        let (h, u) = hnf(&p);
        assert_eq!(h, IntMat::identity(2));
        assert_eq!(&u * &p, h);
    }

    #[test]
    fn reduced_above_pivots() {
        let m = IntMat::from_rows(&[[2, 2], [2, 0]]);
        let (h, u) = hnf(&m);
        assert_eq!(&u * &m, h);
        assert_eq!(h, IntMat::from_rows(&[[2, 0], [0, 2]]));
    }
}
