use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::complex::{block_diagonal, cohomology, Coeff, FreeCochainComplex};
use crate::arrangement::Subset;
use crate::error::{Error, Result};
use crate::linalg::{rank, BlockBuilder, InvariantFactors, KernelBasis, SparseMat};

/// A functor from the cube of subsets of `{0..k}` to cochain complexes,
/// given on nodes and covering inclusions. Absent nodes are zero.
#[derive(Clone, Debug, Default)]
pub struct CocubicalComplex {
    pub k: usize,
    pub nodes: BTreeMap<Subset, FreeCochainComplex>,
    /// `(J, I) -> [E_q]`, with `E_q: node(J)^q -> node(I)^q`.
    pub edges: BTreeMap<(Subset, Subset), Vec<SparseMat>>,
}

impl CocubicalComplex {
    pub fn new(k: usize) -> Self {
        Self { k, ..Default::default() }
    }

    pub fn node(&self, s: Subset) -> Option<&FreeCochainComplex> {
        self.nodes.get(&s)
    }

    /// Number of degrees covered by the longest node.
    pub fn degree_len(&self) -> usize {
        self.nodes.values().map(FreeCochainComplex::len).max().unwrap_or(0)
    }

    fn node_rank(&self, s: Subset, q: usize) -> usize {
        self.nodes.get(&s).map_or(0, |c| c.rank(q))
    }

    /// Edge map in degree `q`, zero if not stored.
    pub fn edge(&self, j: Subset, i: Subset, q: usize) -> SparseMat {
        self.edges
            .get(&(j, i))
            .and_then(|e| e.get(q).cloned())
            .unwrap_or_else(|| SparseMat::zeros(self.node_rank(i, q), self.node_rank(j, q)))
    }

    /// Shapes, cochain-map property and commutativity of every square.
    pub fn validate(&self) -> Result<()> {
        let len = self.degree_len();
        for ((j, i), maps) in &self.edges {
            if !j.is_subset_of(*i) || i.len() != j.len() + 1 {
                return Err(Error::ShapeMismatch(format!("edge {j} -> {i} is not a covering pair")));
            }
            for (q, e) in maps.iter().enumerate() {
                if e.shape() != (self.node_rank(*i, q), self.node_rank(*j, q)) {
                    return Err(Error::ShapeMismatch(format!("edge {j} -> {i} in degree {q}")));
                }
            }
            for q in 0..len.saturating_sub(1) {
                let (cj, ci) = (self.nodes.get(j), self.nodes.get(i));
                let dj = cj.map_or_else(|| SparseMat::zeros(0, 0), |c| c.diff(q));
                let di = ci.map_or_else(|| SparseMat::zeros(0, 0), |c| c.diff(q));
                if ci.is_none() || cj.is_none() {
                    continue;
                }
                let lhs = &di * &self.edge(*j, *i, q);
                let rhs = &self.edge(*j, *i, q + 1) * &dj;
                if lhs != rhs {
                    return Err(Error::Inconsistent(format!("edge {j} -> {i} is not a cochain map in degree {q}")));
                }
            }
        }
        for &i in self.nodes.keys() {
            let ms = i.members();
            for (x, &a) in ms.iter().enumerate() {
                for &b in &ms[x + 1..] {
                    let (ja, jb, kk) = (i.without(a), i.without(b), i.without(a).without(b));
                    for q in 0..len {
                        let p1 = &self.edge(ja, i, q) * &self.edge(kk, ja, q);
                        let p2 = &self.edge(jb, i, q) * &self.edge(kk, jb, q);
                        if p1 != p2 {
                            return Err(Error::Inconsistent(format!("square over {i} in degree {q} does not commute")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|(s, c)| json!({ "subset": s.members().iter().map(|m| m + 1).collect::<Vec<_>>(), "complex": c.to_json() }))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|((j, i), e)| {
                json!({
                    "from": j.members().iter().map(|m| m + 1).collect::<Vec<_>>(),
                    "to": i.members().iter().map(|m| m + 1).collect::<Vec<_>>(),
                    "maps": e.iter().map(SparseMat::to_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "k": self.k, "nodes": nodes, "edges": edges })
    }
}

/// `C^{p,q} = ⊕_{|I| = p} node(I)^q` with vertical `d` and the alternating
/// restriction `δ`.
#[derive(Clone, Debug)]
pub struct MVDoubleComplex {
    cube: CocubicalComplex,
    /// Nonzero subsets of each size, lexicographically.
    columns: Vec<Vec<Subset>>,
    qlen: usize,
}

/// Builds the double complex; block order is lexicographic in the subsets.
pub fn mv_assemble(cc: &CocubicalComplex) -> Result<MVDoubleComplex> {
    for (s, c) in &cc.nodes {
        if s.0 >> cc.k != 0 {
            return Err(Error::ShapeMismatch(format!("node {s} outside the {}-cube", cc.k)));
        }
        c.check()?;
    }
    let columns = (0..=cc.k)
        .map(|p| Subset::of_size(cc.k, p).into_iter().filter(|s| cc.nodes.contains_key(s)).collect())
        .collect();
    Ok(MVDoubleComplex { cube: cc.clone(), columns, qlen: cc.degree_len() })
}

impl MVDoubleComplex {
    pub fn cube(&self) -> &CocubicalComplex {
        &self.cube
    }

    pub fn p_len(&self) -> usize {
        self.columns.len()
    }

    pub fn q_len(&self) -> usize {
        self.qlen
    }

    pub fn column(&self, p: usize) -> &[Subset] {
        self.columns.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn rank(&self, p: usize, q: usize) -> usize {
        self.column(p).iter().map(|s| self.cube.node_rank(*s, q)).sum()
    }

    fn offsets(&self, p: usize, q: usize) -> BTreeMap<Subset, usize> {
        let mut off = 0;
        let mut out = BTreeMap::new();
        for s in self.column(p) {
            out.insert(*s, off);
            off += self.cube.node_rank(*s, q);
        }
        out
    }

    /// `d: C^{p,q} -> C^{p,q+1}`.
    pub fn vertical(&self, p: usize, q: usize) -> SparseMat {
        let blocks: Vec<SparseMat> = self.column(p).iter().map(|s| self.cube.nodes[s].diff(q)).collect();
        let m = block_diagonal(&blocks);
        debug_assert_eq!(m.shape(), (self.rank(p, q + 1), self.rank(p, q)));
        m
    }

    /// `δ: C^{p,q} -> C^{p+1,q}`, `(δc)_I = Σ_j (-1)^{j+1} c_{I - i_j}|_I`.
    pub fn horizontal(&self, p: usize, q: usize) -> SparseMat {
        let src = self.offsets(p, q);
        let tgt = self.offsets(p + 1, q);
        let mut b = BlockBuilder::new(self.rank(p + 1, q), self.rank(p, q));
        for (&i, &r0) in &tgt {
            for (pos, m) in i.members().into_iter().enumerate() {
                let j = i.without(m);
                let Some(&c0) = src.get(&j) else { continue };
                // pos is 0-based, so (-1)^{j+1} is negative for odd pos
                b.add(r0, c0, &self.cube.edge(j, i, q), pos % 2 == 1);
            }
        }
        b.build()
    }

    /// `d² = 0`, `δ² = 0` and `dδ = δd`.
    pub fn check(&self) -> Result<()> {
        for p in 0..self.p_len() {
            for q in 0..self.qlen {
                let d = self.vertical(p, q);
                let h = self.horizontal(p, q);
                if q + 1 < self.qlen && !(&self.vertical(p, q + 1) * &d).is_zero() {
                    return Err(Error::Inconsistent(format!("d² != 0 at ({p},{q})")));
                }
                if !(&self.horizontal(p + 1, q) * &h).is_zero() {
                    return Err(Error::Inconsistent(format!("δ² != 0 at ({p},{q})")));
                }
                if &self.vertical(p + 1, q) * &h != &self.horizontal(p, q + 1) * &d {
                    return Err(Error::Inconsistent(format!("dδ != δd at ({p},{q})")));
                }
            }
        }
        Ok(())
    }

    /// Column `p` as a complex in `q`.
    pub fn column_complex(&self, p: usize) -> FreeCochainComplex {
        let parts: Vec<FreeCochainComplex> =
            self.column(p).iter().map(|s| self.cube.nodes[s].clone().with_len(self.qlen)).collect();
        if parts.is_empty() {
            return FreeCochainComplex::free(vec![0; self.qlen]);
        }
        FreeCochainComplex::direct_sum(&parts)
    }
}

/// `Tot^m = ⊕_{p+q=m} C^{p,q}` (ordered by `p`), `D = δ + (-1)^p d`.
pub fn total_complex(dc: &MVDoubleComplex) -> FreeCochainComplex {
    let plen = dc.p_len();
    let qlen = dc.q_len();
    if qlen == 0 {
        return FreeCochainComplex::zero();
    }
    let len = plen + qlen - 1;
    let layout = |m: usize| -> Vec<(usize, usize, usize)> {
        let mut off = 0;
        let mut v = Vec::new();
        for p in 0..plen.min(m + 1) {
            let q = m - p;
            if q < qlen {
                v.push((p, q, off));
                off += dc.rank(p, q);
            }
        }
        v
    };
    let ranks: Vec<usize> = (0..len).map(|m| layout(m).iter().map(|&(p, q, _)| dc.rank(p, q)).sum()).collect();
    let diffs: Vec<SparseMat> = (0..len.saturating_sub(1))
        .into_par_iter()
        .map(|m| {
            let src = layout(m);
            let tgt: BTreeMap<(usize, usize), usize> = layout(m + 1).into_iter().map(|(p, q, o)| ((p, q), o)).collect();
            let mut b = BlockBuilder::new(ranks[m + 1], ranks[m]);
            for (p, q, c0) in src {
                if let Some(&r0) = tgt.get(&(p + 1, q)) {
                    b.add(r0, c0, &dc.horizontal(p, q), false);
                }
                if let Some(&r0) = tgt.get(&(p, q + 1)) {
                    b.add(r0, c0, &dc.vertical(p, q), p % 2 == 1);
                }
            }
            b.build()
        })
        .collect();
    FreeCochainComplex::new(ranks, diffs).expect("total complex shapes")
}

/// `E_1^{p,q} = ⊕_{|I|=p} H^q(node(I))`.
pub fn e1_page(dc: &MVDoubleComplex, coeff: Coeff) -> BTreeMap<(usize, usize), InvariantFactors> {
    let mut out = BTreeMap::new();
    for p in 0..dc.p_len() {
        let h = cohomology(&dc.column_complex(p), coeff);
        for (q, g) in h.groups.into_iter().enumerate() {
            out.insert((p, q), g);
        }
    }
    out
}

fn hstack(a: &SparseMat, b: &SparseMat) -> SparseMat {
    assert_eq!(a.rows(), b.rows());
    let cols = a.columns().iter().chain(b.columns()).cloned().collect();
    SparseMat::from_columns(a.rows(), cols)
}

/// Rational dimensions of `E_2^{p,q}`, from the map induced by `δ` on vertical cohomology.
pub fn e2_ranks(dc: &MVDoubleComplex) -> BTreeMap<(usize, usize), usize> {
    let plen = dc.p_len();
    let qlen = dc.q_len();
    let cells: Vec<(usize, usize)> = (0..plen).flat_map(|p| (0..qlen).map(move |q| (p, q))).collect();
    let induced: BTreeMap<(usize, usize), usize> = cells
        .par_iter()
        .map(|&(p, q)| {
            if p + 1 >= plen {
                return ((p, q), 0);
            }
            let cycles = KernelBasis::new(&dc.vertical(p, q)).vectors();
            let image = &dc.horizontal(p, q) * &cycles;
            let bounds = if q == 0 { SparseMat::zeros(dc.rank(p + 1, q), 0) } else { dc.vertical(p + 1, q - 1) };
            ((p, q), rank(&hstack(&image, &bounds)) - rank(&bounds))
        })
        .collect();
    let e1 = e1_page(dc, Coeff::Q);
    cells
        .into_iter()
        .map(|(p, q)| {
            let dim = e1[&(p, q)].free_rank;
            let out = induced[&(p, q)];
            let inc = if p == 0 { 0 } else { induced[&(p - 1, q)] };
            ((p, q), dim - out - inc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMat;

    fn id(n: usize) -> SparseMat {
        SparseMat::identity(n)
    }

    fn point_node() -> FreeCochainComplex {
        FreeCochainComplex::free(vec![1])
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let mut cc = CocubicalComplex::new(1);
        cc.nodes.insert(Subset(0), point_node());
        cc.nodes.insert(Subset(1), point_node());
        cc.edges.insert((Subset(0), Subset(1)), vec![id(1)]);
        cc.validate().unwrap();
        let dc = mv_assemble(&cc).unwrap();
        dc.check().unwrap();
        let tot = total_complex(&dc);
        assert_eq!(tot.ranks(), &[1, 1]);
        assert!(cohomology(&tot, Coeff::Z).groups.iter().all(InvariantFactors::is_zero));
        let e1 = e1_page(&dc, Coeff::Z);
        assert_eq!(e1[&(0, 0)].free_rank, 1);
        assert!(e2_ranks(&dc).values().all(|&r| r == 0));
    }

    #[test]
    fn nerve_of_square() {
        let mut cc = CocubicalComplex::new(2);
        for m in 0..4 {
            cc.nodes.insert(Subset(m), point_node());
        }
        for (j, i) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            cc.edges.insert((Subset(j), Subset(i)), vec![id(1)]);
        }
        cc.validate().unwrap();
        let dc = mv_assemble(&cc).unwrap();
        assert_eq!(dc.horizontal(0, 0).to_dense(), IntMat::from_rows(&[[1], [1]]));
        assert_eq!(dc.horizontal(1, 0).to_dense(), IntMat::from_rows(&[[-1, 1]]));
        let tot = total_complex(&dc);
        assert_eq!(tot.ranks(), &[1, 2, 1]);
        tot.check().unwrap();
    }

    #[test]
    fn single_column_and_row() {
        let mut cc = CocubicalComplex::new(0);
        let cx = FreeCochainComplex::new(vec![1, 1], vec![SparseMat::from_dense(&IntMat::from_rows(&[[3]]))]).unwrap();
        cc.nodes.insert(Subset(0), cx.clone());
        let tot = total_complex(&mv_assemble(&cc).unwrap());
        assert_eq!(tot, cx);
    }

    #[test]
    fn noncommuting_square_is_rejected() {
        let mut cc = CocubicalComplex::new(2);
        for m in 0..4 {
            cc.nodes.insert(Subset(m), point_node());
        }
        for (j, i) in [(0, 1), (0, 2), (1, 3)] {
            cc.edges.insert((Subset(j), Subset(i)), vec![id(1)]);
        }
        cc.edges.insert((Subset(2), Subset(3)), vec![id(1).scaled(&2.into())]);
        assert!(cc.validate().is_err());
    }
}
