use crate::arrangement::AffineSubtorus;
use crate::complexes::{Coeff, HomologySummary};
use crate::linalg::{cokernel_invariants, saturate, snf, IntMat, InvariantFactors};

fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..q).collect();
    if q > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..q).rev().find(|&i| cur[i] < n - q + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..q {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn minors(m: &IntMat, q: usize) -> IntMat {
    let rs = subsets(m.rows(), q);
    let cs = subsets(m.cols(), q);
    let mut out = IntMat::zeros(rs.len(), cs.len());
    for (i, r) in rs.iter().enumerate() {
        for (j, c) in cs.iter().enumerate() {
            out.set(i, j, m.select(r, c).det());
        }
    }
    out
}

/// `H^*(T, T_1)` from the long exact sequence of the pair: the restriction
/// `Λ^q(Z^{n*}) -> Λ^q(Hom(tangent lattice, Z))` is `Λ^q(D^T)` for a saturated
/// direction basis `D`, and `H^q = ker f_q ⊕ coker f_{q-1}`.
pub fn oracle_single(n: usize, t: &AffineSubtorus) -> HomologySummary {
    let dirs = if t.directions.cols() == 0 { IntMat::zeros(0, n) } else { saturate(&t.directions.transpose()) };
    let f = |q: usize| minors(&dirs, q);
    let groups = (0..=n)
        .map(|q| {
            let fq = f(q);
            let kernel = fq.cols() - snf(&fq).rank();
            let coker = if q == 0 { InvariantFactors::default() } else { cokernel_invariants(&f(q - 1)) };
            InvariantFactors::new(kernel + coker.free_rank, coker.torsion)
        })
        .collect();
    HomologySummary { coeff: Coeff::Z, groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn subtorus(n: usize, dirs: &[&[i64]]) -> AffineSubtorus {
        let mut d = IntMat::zeros(n, dirs.len());
        for (j, v) in dirs.iter().enumerate() {
            for i in 0..n {
                d.set(i, j, v[i].into());
            }
        }
        AffineSubtorus::new(d, vec![BigRational::zero(); n])
    }

    #[test]
    fn circle_in_plane_torus() {
        let h = oracle_single(2, &subtorus(2, &[&[0, 1]]));
        assert_eq!(h.ranks(), vec![0, 1, 1]);
    }

    #[test]
    fn point_in_plane_torus() {
        let h = oracle_single(2, &subtorus(2, &[]));
        assert_eq!(h.ranks(), vec![0, 2, 1]);
    }

    #[test]
    fn coordinate_hypertorus() {
        for n in 1..=4 {
            let dirs: Vec<Vec<i64>> = (1..n).map(|i| (0..n).map(|j| i64::from(j == i)).collect()).collect();
            let refs: Vec<&[i64]> = dirs.iter().map(|v| v.as_slice()).collect();
            let h = oracle_single(n, &subtorus(n, &refs));
            // complement T^{n-1} x (0,1): H_j = binom(n-1, j), H^q = H_{n-q}
            for q in 0..=n {
                let want = crate::binomial::gamma_rank(n - 1, n - q);
                assert_eq!(h.groups[q], InvariantFactors::free(want), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn closed_form() {
        let h = oracle_single(3, &subtorus(3, &[&[1, 2, 0], &[0, 1, 3]]));
        for q in 0..=3 {
            let want = crate::binomial::gamma_rank(3, q) - crate::binomial::gamma_rank(2, q);
            assert_eq!(h.groups[q], InvariantFactors::free(want));
        }
    }
}
