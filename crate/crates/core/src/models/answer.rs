use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use super::build::{bin_general_with, model_bin_connected, model_cohomology_e1, BinOptions, Splitting};
use crate::arrangement::CubeAtlas;
use crate::complexes::{cohomology, mv_assemble, total_complex, CocubicalComplex, Coeff, HomologySummary};
use crate::error::{Error, Result};
use crate::linalg::InvariantFactors;

/// Which cochain model produced an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ModelTag {
    RationalE1,
    IntegralE1,
    BinConnected,
    BinGeneral,
    /// `Q` ranks plus `p`-parts of a binomial model.
    Assembled,
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::RationalE1 => "rational-E1",
            ModelTag::IntegralE1 => "integral-E1",
            ModelTag::BinConnected => "bin-connected",
            ModelTag::BinGeneral => "bin-general",
            ModelTag::Assembled => "assembled",
        })
    }
}

/// `H^*(T, ∪T_i)` and `H_*(T - ∪T_i)` over one coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementAnswer {
    pub coeff: Coeff,
    /// Degrees `0..=n`.
    pub relative: HomologySummary,
    /// `complement.groups[j] = relative.groups[n - j]`.
    pub complement: HomologySummary,
    pub model: ModelTag,
    pub primes_checked: Vec<u64>,
    pub notes: Vec<String>,
}

impl ComplementAnswer {
    fn from_relative(n: usize, relative: HomologySummary, model: ModelTag) -> Self {
        let relative = relative.padded(n + 1);
        let complement =
            HomologySummary { coeff: relative.coeff, groups: (0..=n).map(|j| relative.group(n - j)).collect() };
        Self { coeff: relative.coeff, relative, complement, model, primes_checked: Vec::new(), notes: Vec::new() }
    }

    pub fn from_relative_groups(n: usize, coeff: Coeff, groups: Vec<InvariantFactors>, model: ModelTag) -> Self {
        Self::from_relative(n, HomologySummary { coeff, groups }, model)
    }

    /// `{"complement": [...], "relative": [...], "model", "primes_checked", ...}`;
    /// torsion as prime-power elementary divisors.
    pub fn to_json(&self) -> Value {
        json!({
            "coeff": self.coeff.to_string(),
            "complement": groups_json(&self.complement),
            "relative": groups_json(&self.relative),
            "model": self.model.to_string(),
            "primes_checked": self.primes_checked,
            "notes": self.notes,
        })
    }

    /// Answer for an arrangement containing `T` itself: the complement is empty.
    pub fn empty_complement(n: usize, coeff: Coeff) -> Self {
        let zero = HomologySummary { coeff, groups: vec![InvariantFactors::default(); n + 1] };
        let mut a = Self::from_relative(n, zero, ModelTag::RationalE1);
        a.notes.push("a member equals T, so the complement is empty".into());
        a
    }
}

/// Model choices for `homology_complement`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnswerOptions {
    pub bin: BinOptions,
    /// Report the integral E1 model as the `Z` answer.
    pub assert_free_lift: bool,
    /// Use the connected-strata model for `p`-local answers.
    pub force_connected: bool,
}

impl AnswerOptions {
    pub fn for_dim(n: usize) -> Self {
        Self { bin: BinOptions::for_dim(n), assert_free_lift: false, force_connected: false }
    }
}

/// Cohomology of the total complex of a cube model, over `Z`.
pub fn total_cohomology(cc: &CocubicalComplex) -> Result<HomologySummary> {
    let dc = mv_assemble(cc)?;
    Ok(cohomology(&total_complex(&dc), Coeff::Z))
}

/// Lazily computed models for one atlas.
pub struct Workbench<'a> {
    pub atlas: &'a CubeAtlas,
    pub opts: AnswerOptions,
    e1: OnceLock<Result<HomologySummary>>,
    bin: OnceLock<Result<HomologySummary>>,
}

impl<'a> Workbench<'a> {
    pub fn new(atlas: &'a CubeAtlas, opts: AnswerOptions) -> Result<Self> {
        if let Some(index) = atlas.full_torus_member() {
            return Err(Error::FullTorusMember { index });
        }
        Ok(Self { atlas, opts, e1: OnceLock::new(), bin: OnceLock::new() })
    }

    /// `H^*` of `MV({H^*(T_I, Z)})`.
    pub fn e1(&self) -> Result<HomologySummary> {
        self.e1.get_or_init(|| total_cohomology(&model_cohomology_e1(self.atlas))).clone()
    }

    /// `H^*` of the binomial model in use (general or connected), over `Z`.
    pub fn bin(&self) -> Result<HomologySummary> {
        self.bin
            .get_or_init(|| {
                let cc = if self.opts.force_connected {
                    model_bin_connected(self.atlas, self.opts.bin)?
                } else {
                    bin_general_with(self.atlas, self.opts.bin, Splitting::Pushout)?
                };
                total_cohomology(&cc)
            })
            .clone()
    }

    fn bin_tag(&self) -> ModelTag {
        if self.opts.force_connected {
            ModelTag::BinConnected
        } else {
            ModelTag::BinGeneral
        }
    }

    pub fn candidates(&self) -> Result<Vec<u64>> {
        Ok(primes_u64(&self.e1()?.torsion_primes()))
    }

    pub fn answer(&self, coeff: Coeff) -> Result<ComplementAnswer> {
        let n = self.atlas.n;
        let mut notes = Vec::new();
        let (relative, model, primes) = match coeff {
            Coeff::Q => (self.e1()?.change_ring(Coeff::Q), ModelTag::RationalE1, Vec::new()),
            Coeff::Zp(p) => (self.bin()?.change_ring(Coeff::Zp(p)), self.bin_tag(), vec![p]),
            Coeff::Z if self.opts.assert_free_lift => {
                notes.push("free lift of H_1 asserted by the user; integral E1 reported as the Z answer".into());
                (self.e1()?, ModelTag::IntegralE1, self.candidates()?)
            }
            Coeff::Z => {
                let primes = self.candidates()?;
                let bin = self.bin()?;
                let rational = self.e1()?;
                let assembled = assemble(&rational, &bin, &primes);
                let full = bin.clone().padded(assembled.groups.len());
                if full != assembled {
                    notes.push(format!("full integral reduction of the {} model differs: {}", self.bin_tag(), full));
                }
                let e1 = rational.clone().padded(assembled.groups.len());
                if e1 != assembled {
                    notes.push(format!("integral E1 differs from the assembled answer: {e1}"));
                }
                (assembled, ModelTag::Assembled, primes)
            }
        };
        if relative.groups.iter().skip(n + 1).any(|g| !g.is_zero()) {
            notes.push(format!("nonzero cohomology above degree {n}: {relative}"));
        }
        let mut out = ComplementAnswer::from_relative(n, truncate_groups(relative, n + 1), model);
        out.primes_checked = primes;
        out.notes = notes;
        Ok(out)
    }
}

fn groups_json(h: &HomologySummary) -> Vec<Value> {
    h.groups
        .iter()
        .enumerate()
        .map(|(q, g)| {
            let torsion: Vec<String> = g.elementary_divisors().iter().map(|(p, e)| format!("{p}^{e}")).collect();
            json!({ "degree": q, "rank": g.free_rank, "torsion": torsion })
        })
        .collect()
}

fn truncate_groups(mut h: HomologySummary, len: usize) -> HomologySummary {
    h.groups.truncate(len);
    h
}

fn primes_u64(ps: &[BigInt]) -> Vec<u64> {
    ps.iter().map(|p| p.to_u64().expect("torsion prime fits in 64 bits")).collect()
}

/// Free ranks of `rational` with the `p`-parts of `local` for each `p`.
pub fn assemble(rational: &HomologySummary, local: &HomologySummary, primes: &[u64]) -> HomologySummary {
    let len = rational.groups.len().max(local.groups.len());
    let groups = (0..len)
        .map(|q| {
            let g = local.group(q);
            let torsion = primes.iter().flat_map(|&p| g.localize(&BigInt::from(p)).torsion).collect();
            InvariantFactors::new(rational.group(q).free_rank, torsion)
        })
        .collect();
    HomologySummary { coeff: Coeff::Z, groups }
}

/// Primes dividing the torsion of `H^*(MV({H^*(T_I, Z)}))`.
pub fn torsion_prime_candidates(atlas: &CubeAtlas) -> Result<BTreeSet<u64>> {
    let h = total_cohomology(&model_cohomology_e1(atlas))?;
    Ok(primes_u64(&h.torsion_primes()).into_iter().collect())
}

/// One-shot answer for a single coefficient ring.
pub fn homology_complement(atlas: &CubeAtlas, coeff: Coeff, opts: AnswerOptions) -> Result<ComplementAnswer> {
    Workbench::new(atlas, opts)?.answer(coeff)
}
