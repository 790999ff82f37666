use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, is_prime, InvariantFactors, SparseMat};

/// Coefficient ring for cohomology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coeff {
    Z,
    Q,
    /// Integers localized at a prime.
    Zp(u64),
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Z => write!(f, "Z"),
            Coeff::Q => write!(f, "Q"),
            Coeff::Zp(p) => write!(f, "Z_({p})"),
        }
    }
}

impl FromStr for Coeff {
    type Err = String;

    /// `z`, `q` or `zp:<prime>`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(Coeff::Z),
            "q" => Ok(Coeff::Q),
            other => {
                let p = other
                    .strip_prefix("zp:")
                    .ok_or_else(|| format!("unknown coefficient ring \"{s}\" (expected q, z or zp:<p>)"))?;
                let p: u64 = p.parse().map_err(|_| format!("\"{p}\" is not a prime"))?;
                if !is_prime(p) {
                    return Err(format!("{p} is not a prime"));
                }
                Ok(Coeff::Zp(p))
            }
        }
    }
}

/// Non-negatively graded complex of free modules with `d_q: C^q -> C^{q+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCochainComplex {
    ranks: Vec<usize>,
    /// `diffs[q]` is `ranks[q+1] × ranks[q]`.
    diffs: Vec<SparseMat>,
}

impl FreeCochainComplex {
    /// Checks shapes; `diffs.len()` must be `ranks.len() - 1` (or 0 when empty).
    pub fn new(ranks: Vec<usize>, diffs: Vec<SparseMat>) -> Result<Self> {
        if diffs.len() + 1 != ranks.len().max(1) {
            return Err(Error::ShapeMismatch(format!("{} differentials for {} degrees", diffs.len(), ranks.len())));
        }
        for (q, d) in diffs.iter().enumerate() {
            if d.shape() != (ranks[q + 1], ranks[q]) {
                return Err(Error::ShapeMismatch(format!(
                    "d_{q} is {:?}, expected {:?}",
                    d.shape(),
                    (ranks[q + 1], ranks[q])
                )));
            }
        }
        Ok(Self { ranks, diffs })
    }

    pub fn zero() -> Self {
        Self { ranks: Vec::new(), diffs: Vec::new() }
    }

    /// Zero differentials.
    pub fn free(ranks: Vec<usize>) -> Self {
        let diffs = (1..ranks.len()).map(|q| SparseMat::zeros(ranks[q], ranks[q - 1])).collect();
        Self { ranks, diffs }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Rank in degree `q` (0 outside the stored range).
    pub fn rank(&self, q: usize) -> usize {
        self.ranks.get(q).copied().unwrap_or(0)
    }

    /// Number of stored degrees.
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    /// `d_q`, or a zero matrix outside the stored range.
    pub fn diff(&self, q: usize) -> SparseMat {
        self.diffs.get(q).cloned().unwrap_or_else(|| SparseMat::zeros(self.rank(q + 1), self.rank(q)))
    }

    pub fn diff_ref(&self, q: usize) -> Option<&SparseMat> {
        self.diffs.get(q)
    }

    pub fn diffs(&self) -> &[SparseMat] {
        &self.diffs
    }

    /// Pads or cuts to exactly `len` degrees (cutting drops higher terms).
    pub fn with_len(mut self, len: usize) -> Self {
        while self.ranks.len() < len {
            let q = self.ranks.len();
            self.ranks.push(0);
            if q > 0 {
                self.diffs.push(SparseMat::zeros(0, self.ranks[q - 1]));
            }
        }
        self.ranks.truncate(len);
        self.diffs.truncate(len.saturating_sub(1));
        self
    }

    /// Verifies `d_{q+1} d_q = 0` for every `q`.
    pub fn check(&self) -> Result<()> {
        for q in 0..self.diffs.len().saturating_sub(1) {
            if !(&self.diffs[q + 1] * &self.diffs[q]).is_zero() {
                return Err(Error::Inconsistent(format!("d_{} d_{q} != 0", q + 1)));
            }
        }
        Ok(())
    }

    pub fn euler(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(q, &r)| if q % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }

    /// Direct sum, block diagonal in the given order.
    pub fn direct_sum(parts: &[FreeCochainComplex]) -> Self {
        let len = parts.iter().map(|c| c.len()).max().unwrap_or(0);
        let parts: Vec<FreeCochainComplex> = parts.iter().map(|c| c.clone().with_len(len)).collect();
        let ranks: Vec<usize> = (0..len).map(|q| parts.iter().map(|c| c.rank(q)).sum()).collect();
        let diffs = (0..len.saturating_sub(1))
            .map(|q| block_diagonal(&parts.iter().map(|c| c.diff(q)).collect::<Vec<_>>()))
            .collect();
        Self { ranks, diffs }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ranks": self.ranks,
            "differentials": self.diffs.iter().map(SparseMat::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn block_diagonal(blocks: &[SparseMat]) -> SparseMat {
    let rows = blocks.iter().map(SparseMat::rows).sum();
    let cols = blocks.iter().map(SparseMat::cols).sum();
    let mut b = crate::linalg::BlockBuilder::new(rows, cols);
    let (mut r, mut c) = (0, 0);
    for m in blocks {
        b.add(r, c, m, false);
        r += m.rows();
        c += m.cols();
    }
    b.build()
}

/// Cohomology in every stored degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologySummary {
    pub coeff: Coeff,
    pub groups: Vec<InvariantFactors>,
}

impl HomologySummary {
    pub fn ranks(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.free_rank).collect()
    }

    pub fn group(&self, q: usize) -> InvariantFactors {
        self.groups.get(q).cloned().unwrap_or_default()
    }

    /// Alternating sum of free ranks.
    pub fn euler(&self) -> i64 {
        self.groups
            .iter()
            .enumerate()
            .map(|(q, g)| if q % 2 == 0 { g.free_rank as i64 } else { -(g.free_rank as i64) })
            .sum()
    }

    /// Re-expresses a `Z` answer over another ring.
    pub fn change_ring(&self, coeff: Coeff) -> HomologySummary {
        assert_eq!(self.coeff, Coeff::Z, "only integral answers can be localized");
        let groups = self
            .groups
            .iter()
            .map(|g| match coeff {
                Coeff::Z => g.clone(),
                Coeff::Q => InvariantFactors::free(g.free_rank),
                Coeff::Zp(p) => g.localize(&BigInt::from(p)),
            })
            .collect();
        HomologySummary { coeff, groups }
    }

    /// Pads with zero groups up to `len` degrees.
    pub fn padded(mut self, len: usize) -> Self {
        while self.groups.len() < len {
            self.groups.push(InvariantFactors::default());
        }
        self
    }

    pub fn torsion_primes(&self) -> Vec<BigInt> {
        let mut ps: Vec<BigInt> = self.groups.iter().flat_map(InvariantFactors::torsion_primes).collect();
        ps.sort();
        ps.dedup();
        ps
    }
}

impl fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.groups.iter().map(ToString::to_string).collect();
        write!(f, "[{}] over {}", parts.join(", "), self.coeff)
    }
}

/// `H^q = ker d_q / im d_{q-1}` from the invariant factors of each differential.
pub fn cohomology(cx: &FreeCochainComplex, coeff: Coeff) -> HomologySummary {
    let len = cx.len();
    let factors: Vec<Vec<BigInt>> =
        (0..len.saturating_sub(1)).into_par_iter().map(|q| invariant_factors(&cx.diffs[q])).collect();
    let groups = (0..len)
        .map(|q| {
            let out = factors.get(q).map_or(0, Vec::len);
            let inc = if q == 0 { &[][..] } else { &factors[q - 1][..] };
            let free = cx.ranks[q] - out - inc.len();
            let torsion: Vec<BigInt> = inc.iter().filter(|t| !t.is_one()).cloned().collect();
            let g = InvariantFactors::new(free, torsion);
            match coeff {
                Coeff::Z => g,
                Coeff::Q => InvariantFactors::free(free),
                Coeff::Zp(p) => g.localize(&BigInt::from(p)),
            }
        })
        .collect();
    HomologySummary { coeff, groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMat;

    fn times(k: i64) -> FreeCochainComplex {
        FreeCochainComplex::new(vec![1, 1], vec![SparseMat::from_dense(&IntMat::from_rows(&[[k]]))]).unwrap()
    }

    #[test]
    fn multiplication_by_two() {
        let cx = times(2);
        let h = cohomology(&cx, Coeff::Z);
        assert!(h.groups[0].is_zero());
        assert_eq!(h.groups[1], InvariantFactors::new(0, vec![2.into()]));
        assert!(cohomology(&cx, Coeff::Zp(3)).groups.iter().all(InvariantFactors::is_zero));
        assert!(cohomology(&cx, Coeff::Q).groups.iter().all(InvariantFactors::is_zero));
        assert_eq!(cohomology(&cx, Coeff::Zp(2)).groups[1].torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn zero_differentials() {
        let h = cohomology(&FreeCochainComplex::free(vec![2, 0, 3]), Coeff::Z);
        assert_eq!(h.ranks(), vec![2, 0, 3]);
    }

    #[test]
    fn parse_coefficients() {
        assert_eq!("zp:5".parse::<Coeff>(), Ok(Coeff::Zp(5)));
        assert!("zp:4".parse::<Coeff>().is_err());
        assert_eq!("Q".parse::<Coeff>(), Ok(Coeff::Q));
    }

    #[test]
    fn detects_nonzero_square() {
        let one = SparseMat::from_dense(&IntMat::from_rows(&[[1]]));
        let cx = FreeCochainComplex::new(vec![1, 1, 1], vec![one.clone(), one]).unwrap();
        assert!(cx.check().is_err());
    }
}
