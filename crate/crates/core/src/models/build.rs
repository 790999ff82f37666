use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::exterior::lambda_power;
use crate::arrangement::{forms_apply, CubeAtlas, Stratum, Subset};
use crate::binomial::{
    bin_chain_map, bin_levels, gamma_rank, moore_bin_complex, normalized_bin_complex, restrict_map,
    truncate_with_basis, BinLevel, Truncated, TwoTermComplex, TwoTermMap,
};
use crate::complexes::{CocubicalComplex, FreeCochainComplex};
use crate::error::{Error, Result};
use crate::linalg::{snf, solve_diophantine, BlockBuilder, IntMat, SparseMat};

/// Per-stratum data shared by all models.
#[derive(Clone, Debug)]
pub struct StratumKData {
    pub subset: Subset,
    /// `K(I) = [L_I^sat -> Z^{n*}]`, `d = (L_I^sat)^T`.
    pub k: TwoTermComplex,
    /// `Z^{n*} -> Z^{n*} / L_I^sat ≅ Z^{n - r}`.
    pub quotient: IntMat,
    /// A section of `quotient`.
    pub section: IntMat,
    pub components: usize,
}

impl StratumKData {
    pub fn new(n: usize, s: &Stratum) -> Self {
        let l = &s.form_lattice_sat;
        let r = l.rows();
        let (quotient, section) = if r == 0 {
            (IntMat::identity(n), IntMat::identity(n))
        } else {
            let res = snf(l);
            let v = &res.v;
            let vinv = unimodular_inverse(v);
            (v.col_range(r, n).transpose(), vinv.row_range(r, n).transpose())
        };
        Self {
            subset: s.subset,
            k: TwoTermComplex::new(l.transpose()),
            quotient,
            section,
            components: s.n_components(),
        }
    }

    /// Rank of `H^1` of a component.
    pub fn h1_rank(&self) -> usize {
        self.quotient.rows()
    }
}

fn unimodular_inverse(v: &IntMat) -> IntMat {
    let n = v.rows();
    let mut out = IntMat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = 1.into();
        let x = solve_diophantine(v, &e).expect("unimodular");
        for i in 0..n {
            out.set(i, j, x[i].clone());
        }
    }
    out
}

/// Presentation data for every occupied stratum.
pub fn stratum_data(atlas: &CubeAtlas) -> BTreeMap<Subset, StratumKData> {
    atlas
        .strata()
        .filter(|s| s.occupied)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| (s.subset, StratumKData::new(atlas.n, s)))
        .collect()
}

/// `H^1(T_J) -> H^1(T_I)` in the chosen quotient bases.
pub fn quotient_map(data: &BTreeMap<Subset, StratumKData>, j: Subset, i: Subset) -> IntMat {
    &data[&i].quotient * &data[&j].section
}

/// Rows of `L_J^sat` written in the basis `L_I^sat`: `R L_I = L_J`.
fn form_inclusion(atlas: &CubeAtlas, j: Subset, i: Subset) -> Result<IntMat> {
    let lj = &atlas.stratum(j).form_lattice_sat;
    let li = &atlas.stratum(i).form_lattice_sat;
    let lit = li.transpose();
    let mut r = IntMat::zeros(lj.rows(), li.rows());
    for row in 0..lj.rows() {
        let x = solve_diophantine(&lit, lj.row(row))
            .ok_or_else(|| Error::Inconsistent(format!("forms of {j} are not forms of {i}")))?;
        for (c, v) in x.into_iter().enumerate() {
            r.set(row, c, v);
        }
    }
    Ok(r)
}

/// Covering pairs with both strata occupied, in a fixed order.
fn pairs(atlas: &CubeAtlas) -> Vec<(Subset, Subset)> {
    atlas.covering_maps().keys().copied().collect()
}

/// Places per-component blocks `(c, parent(c))` into one edge matrix.
fn component_blocks(parents: &[usize], n_src: usize, blocks: &[SparseMat]) -> SparseMat {
    let rows: usize = blocks.iter().map(SparseMat::rows).sum();
    let width = blocks.first().map_or(0, SparseMat::cols);
    let mut b = BlockBuilder::new(rows, width * n_src);
    let mut r0 = 0;
    for (blk, &p) in blocks.iter().zip(parents) {
        b.add(r0, p * width, blk, false);
        r0 += blk.rows();
    }
    b.build()
}

fn repeat(cx: &FreeCochainComplex, times: usize) -> FreeCochainComplex {
    FreeCochainComplex::direct_sum(&vec![cx.clone(); times])
}

/// `MV({H^*(T_I)})`: exterior algebras on `H^1` with zero differential.
pub fn model_cohomology_e1(atlas: &CubeAtlas) -> CocubicalComplex {
    let n = atlas.n;
    let data = stratum_data(atlas);
    let mut cc = CocubicalComplex::new(atlas.k);
    for (s, d) in &data {
        let one = FreeCochainComplex::free((0..=n).map(|q| gamma_rank(d.h1_rank(), q)).collect());
        cc.nodes.insert(*s, repeat(&one, d.components));
    }
    let edges: Vec<((Subset, Subset), Vec<SparseMat>)> = pairs(atlas)
        .into_par_iter()
        .map(|(j, i)| {
            let m = quotient_map(&data, j, i);
            let parents = atlas.covering_map(j, i).expect("covering map");
            let maps = (0..=n)
                .map(|q| {
                    let lam = SparseMat::from_dense(&lambda_power(&m, q));
                    component_blocks(parents, data[&j].components, &vec![lam; parents.len()])
                })
                .collect();
            ((j, i), maps)
        })
        .collect();
    cc.edges = edges.into_iter().collect();
    cc
}

/// Truncation cap and Moore-complex flavour for the binomial models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinOptions {
    pub cap: usize,
    pub normalized: bool,
}

impl BinOptions {
    pub fn for_dim(n: usize) -> Self {
        Self { cap: n, normalized: true }
    }
}

struct BinNode {
    k: TwoTermComplex,
    levels: Vec<BinLevel>,
    trunc: Truncated,
}

fn bin_node(k: &TwoTermComplex, opts: BinOptions) -> Result<BinNode> {
    let (raw, levels) = if opts.normalized {
        (normalized_bin_complex(k, opts.cap)?, bin_levels(k, opts.cap, opts.cap, true))
    } else {
        (moore_bin_complex(k, opts.cap, opts.cap + 1)?, bin_levels(k, opts.cap, opts.cap + 1, false))
    };
    let trunc = truncate_with_basis(&raw, opts.cap);
    Ok(BinNode { k: k.clone(), levels, trunc })
}

fn bin_edge(src: &BinNode, tgt: &BinNode, f: &TwoTermMap) -> Result<Vec<SparseMat>> {
    let maps = bin_chain_map(f, &src.k, &tgt.k, &src.levels, &tgt.levels)?;
    restrict_map(&src.trunc, &tgt.trunc, &maps)
}

/// How constants enter the edge maps of the general model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// Bin of the affine restriction with the anchor offsets as constants.
    Pushout,
    /// Constant-free maps (evaluation at anchors split off).
    Anchored,
}

/// `B(T_I)`: per component `τ_{≤N} Bin_{≤N}(K(I))`; edges are `Bin` of the
/// restriction `K(J) -> K(I)` written through the anchors.
pub fn model_bin_general(atlas: &CubeAtlas, opts: BinOptions) -> Result<CocubicalComplex> {
    bin_general_with(atlas, opts, Splitting::Pushout)
}

pub fn bin_general_with(atlas: &CubeAtlas, opts: BinOptions, split: Splitting) -> Result<CocubicalComplex> {
    let data = stratum_data(atlas);
    let nodes: BTreeMap<Subset, BinNode> =
        data.par_iter().map(|(s, d)| Ok((*s, bin_node(&d.k, opts)?))).collect::<Result<_>>()?;
    let mut cc = CocubicalComplex::new(atlas.k);
    for (s, node) in &nodes {
        cc.nodes.insert(*s, repeat(&node.trunc.complex, data[s].components));
    }
    let n = atlas.n;
    let edges: Vec<((Subset, Subset), Vec<SparseMat>)> = pairs(atlas)
        .into_par_iter()
        .map(|(j, i)| {
            let r = form_inclusion(atlas, j, i)?;
            let parents = atlas.covering_map(j, i).expect("covering map");
            let (sj, si) = (atlas.stratum(j), atlas.stratum(i));
            let lj = &sj.form_lattice_sat;
            let blocks: Vec<Vec<SparseMat>> = parents
                .iter()
                .enumerate()
                .map(|(c, &p)| {
                    let consts = match split {
                        Splitting::Anchored => vec![BigInt::zero(); lj.rows()],
                        Splitting::Pushout => anchor_offsets(lj, &si.components[c], &sj.components[p])?,
                    };
                    let f = TwoTermMap { f0: r.transpose(), f1: IntMat::identity(n), consts };
                    bin_edge(&nodes[&j], &nodes[&i], &f)
                })
                .collect::<Result<_>>()?;
            let len = blocks.first().map_or(0, Vec::len);
            let maps = (0..len)
                .map(|q| {
                    let per: Vec<SparseMat> = blocks.iter().map(|b| b[q].clone()).collect();
                    component_blocks(parents, data[&j].components, &per)
                })
                .collect();
            Ok(((j, i), maps))
        })
        .collect::<Result<_>>()?;
    cc.edges = edges.into_iter().collect();
    Ok(cc)
}

/// `-(φ(y) - φ(x))` for the forms `φ` of `T_J`; integral because `y` lies in
/// the component of `x`.
fn anchor_offsets(forms: &IntMat, y: &[BigRational], x: &[BigRational]) -> Result<Vec<BigInt>> {
    let diff: Vec<BigRational> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    forms_apply(forms, &diff)
        .into_iter()
        .map(|v| {
            if v.is_integer() {
                Ok(-v.to_integer())
            } else {
                Err(Error::Inconsistent("anchor offset is not integral".into()))
            }
        })
        .collect()
}

/// `τ_{≤N} Bin_{≤N}(H^1(T_I)[-1])` on connected strata, edges `Bin` of the
/// quotient maps.
pub fn model_bin_connected(atlas: &CubeAtlas, opts: BinOptions) -> Result<CocubicalComplex> {
    for s in atlas.strata().filter(|s| s.occupied) {
        if s.n_components() != 1 {
            return Err(Error::DisconnectedStratum { subset: s.subset, components: s.n_components() });
        }
    }
    let data = stratum_data(atlas);
    let nodes: BTreeMap<Subset, BinNode> = data
        .par_iter()
        .map(|(s, d)| Ok((*s, bin_node(&TwoTermComplex::quotient(d.h1_rank()), opts)?)))
        .collect::<Result<_>>()?;
    let mut cc = CocubicalComplex::new(atlas.k);
    for (s, node) in &nodes {
        cc.nodes.insert(*s, node.trunc.complex.clone());
    }
    let edges: Vec<((Subset, Subset), Vec<SparseMat>)> = pairs(atlas)
        .into_par_iter()
        .map(|(j, i)| {
            let f = TwoTermMap { f0: IntMat::zeros(0, 0), f1: quotient_map(&data, j, i), consts: Vec::new() };
            Ok(((j, i), bin_edge(&nodes[&j], &nodes[&i], &f)?))
        })
        .collect::<Result<_>>()?;
    cc.edges = edges.into_iter().collect();
    Ok(cc)
}
