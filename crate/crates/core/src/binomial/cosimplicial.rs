use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::level::{bin_images, polys_to_matrix, AffineSubst, BinLevel, MahlerArith, Poly};
use crate::complexes::FreeCochainComplex;
use crate::error::{Error, Result};
use crate::linalg::{IntMat, SparseMat};

/// `K^0 -> K^1` between free modules of ranks `a` and `b`; `d` is `b × a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTermComplex {
    pub a: usize,
    pub b: usize,
    pub d: IntMat,
}

impl TwoTermComplex {
    pub fn new(d: IntMat) -> Self {
        Self { a: d.cols(), b: d.rows(), d }
    }

    /// `0 -> Z^b`.
    pub fn quotient(b: usize) -> Self {
        Self::new(IntMat::zeros(b, 0))
    }

    /// Rank of `X^m = K^0 ⊕ (K^1)^m`.
    pub fn level_dim(&self, m: usize) -> usize {
        self.a + m * self.b
    }

    /// `d^i: X^m -> X^{m+1}`, columns are images of generators.
    pub fn coface(&self, m: usize, i: usize) -> IntMat {
        assert!(i <= m + 1);
        let (a, b) = (self.a, self.b);
        let mut out = IntMat::zeros(self.level_dim(m + 1), self.level_dim(m));
        for k in 0..a {
            out.set(k, k, BigInt::one());
            if i == m + 1 {
                for r in 0..b {
                    out.set(a + m * b + r, k, self.d.get(r, k).clone());
                }
            }
        }
        for j in 1..=m {
            let targets: &[usize] = if i == 0 || j > i {
                &[j + 1]
            } else if j < i {
                &[j]
            } else {
                &[j, j + 1]
            };
            for r in 0..b {
                for &t in targets {
                    out.set(a + (t - 1) * b + r, a + (j - 1) * b + r, BigInt::one());
                }
            }
        }
        out
    }

    /// `s^j: X^{m+1} -> X^m`, deleting block `j + 1`.
    pub fn codegeneracy(&self, m: usize, j: usize) -> IntMat {
        assert!(j <= m);
        let (a, b) = (self.a, self.b);
        let mut out = IntMat::zeros(self.level_dim(m), self.level_dim(m + 1));
        for k in 0..a {
            out.set(k, k, BigInt::one());
        }
        for t in 1..=m + 1 {
            if t == j + 1 {
                continue;
            }
            let dst = if t <= j { t } else { t - 1 };
            for r in 0..b {
                out.set(a + (dst - 1) * b + r, a + (t - 1) * b + r, BigInt::one());
            }
        }
        out
    }
}

/// Levels `X^0..X^M` with all cofaces.
#[derive(Clone, Debug)]
pub struct CosimplicialLevels {
    pub k: TwoTermComplex,
    pub top: usize,
    /// `cofaces[m][i] = d^i: X^m -> X^{m+1}`.
    pub cofaces: Vec<Vec<IntMat>>,
}

impl CosimplicialLevels {
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top).map(|m| self.k.level_dim(m)).collect()
    }

    pub fn codegeneracy(&self, m: usize, j: usize) -> IntMat {
        self.k.codegeneracy(m, j)
    }

    /// Unnormalized Moore complex: `Σ (-1)^i d^i`.
    pub fn moore_complex(&self) -> FreeCochainComplex {
        let diffs = self
            .cofaces
            .iter()
            .map(|faces| {
                let mut acc = SparseMat::zeros(faces[0].rows(), faces[0].cols());
                for (i, f) in faces.iter().enumerate() {
                    let s = SparseMat::from_dense(f);
                    acc = acc.add(&if i % 2 == 0 { s } else { s.neg() });
                }
                acc
            })
            .collect();
        FreeCochainComplex::new(self.dims(), diffs).expect("coface shapes")
    }
}

pub fn cosimplicialize(k: &TwoTermComplex, top: usize) -> CosimplicialLevels {
    let cofaces = (0..top).map(|m| (0..=m + 1).map(|i| k.coface(m, i)).collect()).collect();
    CosimplicialLevels { k: k.clone(), top, cofaces }
}

/// Monomial bases of `Bin_{≤N}(X^m)`, `m = 0..=top`.
pub fn bin_levels(k: &TwoTermComplex, cap: usize, top: usize, normalized: bool) -> Vec<BinLevel> {
    (0..=top)
        .map(|m| {
            let (a, b) = (k.a, k.b);
            if normalized {
                BinLevel::filtered(k.level_dim(m), cap, |e| {
                    (0..m).all(|j| e[a + j * b..a + (j + 1) * b].iter().any(|&x| x > 0))
                })
            } else {
                BinLevel::new(k.level_dim(m), cap)
            }
        })
        .collect()
}

fn moore_bin(k: &TwoTermComplex, levels: &[BinLevel]) -> Result<FreeCochainComplex> {
    let diffs: Result<Vec<SparseMat>> = (0..levels.len().saturating_sub(1))
        .into_par_iter()
        .map(|m| {
            let mut arith = MahlerArith::default();
            let mut total: Vec<Poly> = vec![Poly::new(); levels[m].len()];
            for i in 0..=m + 1 {
                let map = AffineSubst::linear(&k.coface(m, i));
                for (acc, p) in total.iter_mut().zip(bin_images(&map, &levels[m], &mut arith)) {
                    for (e, v) in p {
                        let slot = acc.entry(e).or_insert_with(BigInt::zero);
                        if i % 2 == 0 {
                            *slot += v;
                        } else {
                            *slot -= v;
                        }
                    }
                }
            }
            polys_to_matrix(total, &levels[m + 1])
        })
        .collect();
    FreeCochainComplex::new(levels.iter().map(BinLevel::len).collect(), diffs?)
}

/// `Bin_{≤N}` applied levelwise, Moore complex in degrees `0..=top`.
pub fn moore_bin_complex(k: &TwoTermComplex, cap: usize, top: usize) -> Result<FreeCochainComplex> {
    moore_bin(k, &bin_levels(k, cap, top, false))
}

/// Normalized subcomplex (monomials of positive degree in every `K^1` block),
/// degrees `0..=N`; it vanishes above `N`.
pub fn normalized_bin_complex(k: &TwoTermComplex, cap: usize) -> Result<FreeCochainComplex> {
    moore_bin(k, &bin_levels(k, cap, cap, true))
}

/// Map of two-term complexes with integer constants on `K^0` generators:
/// `a_j ↦ Σ_k f0[k][j] a'_k + consts[j]`, `b ↦ f1 b`.
#[derive(Clone, Debug)]
pub struct TwoTermMap {
    pub f0: IntMat,
    pub f1: IntMat,
    pub consts: Vec<BigInt>,
}

impl TwoTermMap {
    pub fn check(&self, src: &TwoTermComplex, tgt: &TwoTermComplex) -> Result<()> {
        if self.f0.shape() != (tgt.a, src.a) || self.f1.shape() != (tgt.b, src.b) || self.consts.len() != src.a {
            return Err(Error::ShapeMismatch("two-term map shapes".into()));
        }
        if &tgt.d * &self.f0 != &self.f1 * &src.d {
            return Err(Error::Inconsistent("two-term map does not commute with d".into()));
        }
        Ok(())
    }

    /// Substitution on `X^m`.
    pub fn level(&self, src: &TwoTermComplex, tgt: &TwoTermComplex, m: usize) -> AffineSubst {
        let mut lin = IntMat::zeros(tgt.level_dim(m), src.level_dim(m));
        for j in 0..src.a {
            for k in 0..tgt.a {
                lin.set(k, j, self.f0.get(k, j).clone());
            }
        }
        for blk in 0..m {
            for j in 0..src.b {
                for k in 0..tgt.b {
                    lin.set(tgt.a + blk * tgt.b + k, src.a + blk * src.b + j, self.f1.get(k, j).clone());
                }
            }
        }
        let mut consts = self.consts.clone();
        consts.resize(src.level_dim(m), BigInt::zero());
        AffineSubst::linear(&lin).with_consts(consts)
    }
}

/// Levelwise `Bin` of a two-term map between given level bases.
pub fn bin_chain_map(
    f: &TwoTermMap,
    src: &TwoTermComplex,
    tgt: &TwoTermComplex,
    src_levels: &[BinLevel],
    tgt_levels: &[BinLevel],
) -> Result<Vec<SparseMat>> {
    f.check(src, tgt)?;
    (0..src_levels.len().min(tgt_levels.len()))
        .into_par_iter()
        .map(|m| {
            let mut arith = MahlerArith::default();
            let images = bin_images(&f.level(src, tgt, m), &src_levels[m], &mut arith);
            polys_to_matrix(images, &tgt_levels[m])
        })
        .collect()
}
