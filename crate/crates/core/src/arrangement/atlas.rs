use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::spec::{forms_apply, forms_of, is_integral, AffineSubtorus, ArrangementSpec};
use crate::error::{Error, Result};
use crate::linalg::{cokernel_invariants, frac_vec, saturate, snf, solve_integer_affine, IntMat};

/// A subset of `{0, …, k-1}` as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_members(ms: &[usize]) -> Self {
        Subset(ms.iter().fold(0, |acc, &i| acc | (1 << i)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order (0-based).
    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// All subsets of `{0..k}` with `p` elements, lexicographically ordered.
    pub fn of_size(k: usize, p: usize) -> Vec<Subset> {
        let mut v: Vec<Subset> = (0u32..1 << k).map(Subset).filter(|s| s.len() == p).collect();
        v.sort_by_key(|s| s.members());
        v
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = self.members().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", ms.join(","))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The intersection `T_I` of the members of `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub subset: Subset,
    pub occupied: bool,
    /// Rows generate `L_I`, the sum of the members' form lattices.
    pub form_lattice: IntMat,
    /// Canonical basis of the saturation of `L_I`.
    pub form_lattice_sat: IntMat,
    /// One anchor per component, sorted lexicographically.
    pub components: Vec<Vec<BigRational>>,
    pub tangent_rank: usize,
}

impl Stratum {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Number of generators of the saturated form lattice.
    pub fn form_rank(&self) -> usize {
        self.form_lattice_sat.rows()
    }
}

/// Strata for every subset together with the component inclusions.
#[derive(Clone, Debug)]
pub struct CubeAtlas {
    pub n: usize,
    pub k: usize,
    pub subtori: Vec<AffineSubtorus>,
    strata: Vec<Stratum>,
    covering: BTreeMap<(Subset, Subset), Vec<usize>>,
}

impl CubeAtlas {
    pub fn stratum(&self, s: Subset) -> &Stratum {
        &self.strata[s.0 as usize]
    }

    pub fn strata(&self) -> impl Iterator<Item = &Stratum> {
        self.strata.iter()
    }

    /// Strata ordered by size, then lexicographically.
    pub fn ordered_subsets(&self) -> Vec<Subset> {
        (0..=self.k).flat_map(|p| Subset::of_size(self.k, p)).collect()
    }

    /// Component map for a covering pair `J ⊂ I`, `|I| = |J| + 1`.
    pub fn covering_map(&self, j: Subset, i: Subset) -> Option<&[usize]> {
        self.covering.get(&(j, i)).map(Vec::as_slice)
    }

    pub fn covering_maps(&self) -> &BTreeMap<(Subset, Subset), Vec<usize>> {
        &self.covering
    }

    /// Index of the first member equal to the whole torus.
    pub fn full_torus_member(&self) -> Option<usize> {
        self.subtori.iter().position(AffineSubtorus::is_full)
    }

    /// `true` if every occupied stratum is connected.
    pub fn strata_connected(&self) -> bool {
        self.strata.iter().all(|s| s.components.len() <= 1)
    }
}

/// Builds the atlas of a normalized arrangement.
pub fn build_atlas(spec: &ArrangementSpec) -> Result<CubeAtlas> {
    let n = spec.dim;
    let k = spec.k();
    if k > 20 {
        return Err(Error::InvalidInput(format!("{k} subtori is more than the supported 20")));
    }
    for (i, t) in spec.subtori.iter().enumerate() {
        if t.n != n {
            return Err(Error::InvalidInput(format!("subtori[{i}] lives in dimension {}, expected {n}", t.n)));
        }
    }
    let forms: Vec<IntMat> = spec.subtori.iter().map(forms_of).collect();
    let rhs: Vec<Vec<BigRational>> = spec.subtori.iter().zip(&forms).map(|(t, f)| forms_apply(f, &t.shift)).collect();

    let strata: Vec<Stratum> =
        (0u32..1 << k).into_par_iter().map(|mask| build_stratum(n, Subset(mask), &forms, &rhs)).collect();

    let mut atlas = CubeAtlas { n, k, subtori: spec.subtori.clone(), strata, covering: BTreeMap::new() };
    let pairs: Vec<(Subset, Subset)> = (0u32..1 << k)
        .map(Subset)
        .flat_map(|i| i.members().into_iter().map(move |m| (i.without(m), i)))
        .filter(|(j, i)| atlas.stratum(*i).occupied && atlas.stratum(*j).occupied)
        .collect();
    let maps: Vec<((Subset, Subset), Vec<usize>)> = pairs
        .into_par_iter()
        .map(|(j, i)| {
            let m = (0..atlas.stratum(i).n_components())
                .map(|c| component_map(&atlas, j, i, c))
                .collect::<Result<Vec<_>>>()?;
            Ok(((j, i), m))
        })
        .collect::<Result<_>>()?;
    atlas.covering = maps.into_iter().collect();
    Ok(atlas)
}

fn build_stratum(n: usize, s: Subset, forms: &[IntMat], rhs: &[Vec<BigRational>]) -> Stratum {
    let mut c = IntMat::zeros(0, n);
    let mut d: Vec<BigRational> = Vec::new();
    for i in s.members() {
        c = c.vstack(&forms[i]);
        d.extend(rhs[i].iter().cloned());
    }
    let sat = saturate(&c);
    let tangent_rank = n - sat.rows();
    let Some(x0) = solve_integer_affine(&c, &d) else {
        return Stratum {
            subset: s,
            occupied: false,
            form_lattice: c,
            form_lattice_sat: sat,
            components: Vec::new(),
            tangent_rank,
        };
    };

    // Components are the cosets of the torsion of Z^n* / L_I; each lift of a
    // torsion element gives a point, sorted out by its saturated form values.
    let r = snf(&c);
    let diag = r.diagonal();
    let mut keys: Vec<Vec<BigRational>> = Vec::new();
    let mut counter = vec![BigInt::zero(); diag.len()];
    loop {
        let w: Vec<BigRational> = (0..n)
            .map(|i| match diag.get(i) {
                Some(di) => BigRational::new(counter[i].clone(), di.clone()),
                None => BigRational::zero(),
            })
            .collect();
        let y: Vec<BigRational> = (0..n)
            .map(|i| {
                (0..n).map(|j| BigRational::from_integer(r.v.get(i, j).clone()) * &w[j]).sum::<BigRational>() + &x0[i]
            })
            .collect();
        keys.push(frac_vec(&forms_apply(&sat, &y)));
        if !advance(&mut counter, &diag) {
            break;
        }
    }
    keys.sort();
    keys.dedup();
    let torsion = cokernel_invariants(&c.transpose()).torsion_order();
    debug_assert_eq!(BigInt::from(keys.len()), torsion);
    let mut components: Vec<Vec<BigRational>> =
        keys.iter().map(|key| solve_integer_affine(&sat, key).expect("component key is realized")).collect();
    components.sort();
    Stratum { subset: s, occupied: true, form_lattice: c, form_lattice_sat: sat, components, tangent_rank }
}

fn advance(counter: &mut [BigInt], limits: &[BigInt]) -> bool {
    for (c, l) in counter.iter_mut().zip(limits) {
        *c += 1;
        if &*c < l {
            return true;
        }
        *c = BigInt::zero();
    }
    false
}

/// The component of `T_J` containing component `c` of `T_I`, for `J ⊆ I`.
pub fn component_map(atlas: &CubeAtlas, j: Subset, i: Subset, c: usize) -> Result<usize> {
    if !j.is_subset_of(i) {
        return Err(Error::Inconsistent(format!("{j} is not a subset of {i}")));
    }
    if i == j {
        return Ok(c);
    }
    let si = atlas.stratum(i);
    let sj = atlas.stratum(j);
    let y = si.components.get(c).ok_or_else(|| Error::Inconsistent(format!("{i} has no component {c}")))?;
    let hits: Vec<usize> = sj
        .components
        .iter()
        .enumerate()
        .filter(|(_, x)| {
            let diff: Vec<BigRational> = y.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
            is_integral(&forms_apply(&sj.form_lattice_sat, &diff))
        })
        .map(|(k, _)| k)
        .collect();
    match hits.as_slice() {
        [h] => Ok(*h),
        [] => Err(Error::Inconsistent(format!("component {c} of {i} lies in no component of {j}"))),
        _ => Err(Error::Inconsistent(format!("component {c} of {i} lies in several components of {j}"))),
    }
}

/// Euler characteristic of `T_I`: number of components if it is a finite set, else 0.
pub fn stratum_euler(s: &Stratum) -> i64 {
    if !s.occupied || s.tangent_rank > 0 {
        0
    } else {
        s.components.len() as i64
    }
}

/// `χ(∪ T_i)` by inclusion-exclusion over the atlas.
pub fn union_euler(atlas: &CubeAtlas) -> i64 {
    atlas
        .strata()
        .filter(|s| !s.subset.is_empty())
        .map(|s| if s.subset.len() % 2 == 1 { 1 } else { -1 } * stratum_euler(s))
        .sum()
}
