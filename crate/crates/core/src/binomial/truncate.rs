use num_bigint::BigInt;
use rayon::prelude::*;

use crate::complexes::FreeCochainComplex;
use crate::error::{Error, Result};
use crate::linalg::{KernelBasis, SparseMat};

/// `τ_{≤n}` together with the kernel basis used in degree `n`.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub complex: FreeCochainComplex,
    pub degree: usize,
    /// `None` when nothing above degree `n` was stored.
    pub kernel: Option<KernelBasis>,
    /// Columns of `kernel`, in ambient coordinates.
    pub kernel_vectors: Option<SparseMat>,
}

/// Canonical truncation: degree `n` becomes `ker d_n`, higher degrees drop.
pub fn tau_truncate(cx: &FreeCochainComplex, n: usize) -> FreeCochainComplex {
    truncate_with_basis(cx, n).complex
}

pub fn truncate_with_basis(cx: &FreeCochainComplex, n: usize) -> Truncated {
    if n + 1 >= cx.len() || cx.rank(n + 1) == 0 {
        return Truncated { complex: cx.clone().with_len(n + 1), degree: n, kernel: None, kernel_vectors: None };
    }
    let kernel = KernelBasis::new(&cx.diff(n));
    let mut ranks = cx.ranks()[..n].to_vec();
    ranks.push(kernel.rank());
    let mut diffs: Vec<SparseMat> = (0..n.saturating_sub(1)).map(|q| cx.diff(q)).collect();
    if n > 0 {
        diffs.push(into_kernel(&kernel, &cx.diff(n - 1)).expect("image of d lies in ker d"));
    }
    let complex = FreeCochainComplex::new(ranks, diffs).expect("truncation shapes");
    let vectors = kernel.vectors();
    Truncated { complex, degree: n, kernel: Some(kernel), kernel_vectors: Some(vectors) }
}

/// Rewrites the columns of `m` (kernel elements) in kernel coordinates.
fn into_kernel(kernel: &KernelBasis, m: &SparseMat) -> Result<SparseMat> {
    let cols: Result<Vec<Vec<(usize, BigInt)>>> = m
        .columns()
        .par_iter()
        .map(|c| {
            kernel
                .coordinates(c)
                .map(|z| z.into_iter().enumerate().filter(|(_, v)| v != &BigInt::from(0)).collect())
                .ok_or_else(|| Error::Inconsistent("vector outside the kernel lattice".into()))
        })
        .collect();
    Ok(SparseMat::from_columns(kernel.rank(), cols?))
}

/// Restricts a chain map (one matrix per degree) to the truncations.
pub fn restrict_map(src: &Truncated, tgt: &Truncated, maps: &[SparseMat]) -> Result<Vec<SparseMat>> {
    let n = src.degree;
    assert_eq!(n, tgt.degree);
    let mut out: Vec<SparseMat> = (0..n).map(|q| maps.get(q).cloned().unwrap_or_else(|| zero(tgt, src, q))).collect();
    let top = match maps.get(n) {
        None => zero(tgt, src, n),
        Some(f) => {
            let f = match &src.kernel_vectors {
                Some(k) => f * k,
                None => f.clone(),
            };
            match &tgt.kernel {
                Some(k) => into_kernel(k, &f)?,
                None => f,
            }
        }
    };
    out.push(top);
    Ok(out)
}

fn zero(tgt: &Truncated, src: &Truncated, q: usize) -> SparseMat {
    SparseMat::zeros(tgt.complex.rank(q), src.complex.rank(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{cohomology, Coeff};
    use crate::linalg::IntMat;

    #[test]
    fn times_two_at_zero() {
        let cx = FreeCochainComplex::new(vec![1, 1], vec![SparseMat::from_dense(&IntMat::from_rows(&[[2]]))]).unwrap();
        let t = tau_truncate(&cx, 0);
        assert_eq!(t.ranks(), &[0]);
    }

    #[test]
    fn top_degree_is_unchanged() {
        let cx = FreeCochainComplex::new(vec![1, 1], vec![SparseMat::from_dense(&IntMat::from_rows(&[[2]]))]).unwrap();
        let t = tau_truncate(&cx, 1);
        assert_eq!(cohomology(&t, Coeff::Z), cohomology(&cx, Coeff::Z));
    }

    #[test]
    fn keeps_low_cohomology() {
        // Z -> Z^2 -> Z with d0 = (1,1)^T, d1 = (1,-1)
        let d0 = SparseMat::from_dense(&IntMat::from_rows(&[[1], [1]]));
        let d1 = SparseMat::from_dense(&IntMat::from_rows(&[[1, -1]]));
        let cx = FreeCochainComplex::new(vec![1, 2, 1], vec![d0, d1]).unwrap();
        let t = tau_truncate(&cx, 1);
        t.check().unwrap();
        assert_eq!(t.ranks(), &[1, 1]);
        let h = cohomology(&t, Coeff::Z);
        assert!(h.groups.iter().all(|g| g.is_zero()));
    }
}
