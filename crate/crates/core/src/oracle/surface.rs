use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arrangement::{AffineSubtorus, CubeAtlas};
use crate::complexes::{Coeff, HomologySummary};
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, saturate, InvariantFactors, SparseMat};

type Point = (BigRational, BigRational);

/// A closed geodesic `{x : w·x ≡ c}` on `T^2` with primitive direction `v`.
#[derive(Clone, Debug)]
struct Family {
    w: (i64, i64),
    c: BigRational,
    v: (i64, i64),
    base: Point,
    input: bool,
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

impl Family {
    fn new(v: (i64, i64), base: Point, input: bool) -> Self {
        let (v, w) = if v.0 < 0 || (v.0 == 0 && v.1 < 0) { ((-v.0, -v.1), (v.1, -v.0)) } else { (v, (-v.1, v.0)) };
        let c = frac(&(rat(w.0) * &base.0 + rat(w.1) * &base.1));
        Self { w, c, v, base, input }
    }

    fn form(&self, x: &Point) -> BigRational {
        rat(self.w.0) * &x.0 + rat(self.w.1) * &x.1
    }

    fn at(&self, t: &BigRational) -> Point {
        (frac(&(&self.base.0 + t * rat(self.v.0))), frac(&(&self.base.1 + t * rat(self.v.1))))
    }

    /// Parameters in `[0,1)` where this circle meets `other`.
    fn meets(&self, other: &Family) -> Vec<BigRational> {
        let s = other.w.0 * self.v.0 + other.w.1 * self.v.1;
        if s == 0 {
            return Vec::new();
        }
        let t0 = (&other.c - other.form(&self.base)) / rat(s);
        (0..s.abs()).map(|k| frac(&(&t0 + BigRational::new(k.into(), s.abs().into())))).collect()
    }
}

/// Cellular structure of `(T^2, U)`.
#[derive(Clone, Debug)]
pub struct CellPair {
    pub vertices: Vec<Point>,
    /// `(tail, head)` vertex indices; edges are oriented along their circle.
    pub edges: Vec<(usize, usize)>,
    /// Boundary of each face as `(edge, sign)`, traversed counterclockwise.
    pub faces: Vec<Vec<(usize, i64)>>,
    pub vertex_in_u: Vec<bool>,
    pub edge_in_u: Vec<bool>,
}

impl CellPair {
    pub fn euler(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn coboundary0(&self) -> SparseMat {
        let mut t = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            t.push((e, b, BigInt::from(1)));
            t.push((e, a, BigInt::from(-1)));
        }
        SparseMat::from_triplets(self.edges.len(), self.vertices.len(), t)
    }

    pub fn coboundary1(&self) -> SparseMat {
        let t = self
            .faces
            .iter()
            .enumerate()
            .flat_map(|(f, bd)| bd.iter().map(move |&(e, s)| (f, e, BigInt::from(s))))
            .collect();
        SparseMat::from_triplets(self.faces.len(), self.edges.len(), t)
    }

    /// `δδ = 0`, `χ = 0`, and `U` is a subcomplex.
    pub fn check(&self) -> Result<()> {
        if !(&self.coboundary1() * &self.coboundary0()).is_zero() {
            return Err(Error::Inconsistent("cellular coboundary does not square to zero".into()));
        }
        if self.euler() != 0 {
            return Err(Error::Inconsistent(format!("V - E + F = {} on the torus", self.euler())));
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if self.edge_in_u[e] && !(self.vertex_in_u[a] && self.vertex_in_u[b]) {
                return Err(Error::Inconsistent("U is not a subcomplex".into()));
            }
        }
        Ok(())
    }

    /// `H^*(T^2, U)` from cochains vanishing on `U`.
    pub fn relative_cohomology(&self) -> HomologySummary {
        let keep_v: Vec<usize> = (0..self.vertices.len()).filter(|&i| !self.vertex_in_u[i]).collect();
        let keep_e: Vec<usize> = (0..self.edges.len()).filter(|&i| !self.edge_in_u[i]).collect();
        let d0 = self.coboundary0().select_rows(&keep_e);
        let d0 = SparseMat::from_columns(keep_e.len(), keep_v.iter().map(|&c| d0.col(c).to_vec()).collect());
        let d1 = self.coboundary1();
        let d1 = SparseMat::from_columns(self.faces.len(), keep_e.iter().map(|&c| d1.col(c).to_vec()).collect());
        let ranks = [keep_v.len(), keep_e.len(), self.faces.len()];
        let f = [invariant_factors(&d0), invariant_factors(&d1)];
        let groups = (0..3)
            .map(|q| {
                let out = if q < 2 { f[q].len() } else { 0 };
                let inc: &[BigInt] = if q == 0 { &[] } else { &f[q - 1] };
                let torsion = inc.iter().filter(|t| **t > BigInt::from(1)).cloned().collect();
                InvariantFactors::new(ranks[q] - out - inc.len(), torsion)
            })
            .collect();
        HomologySummary { coeff: Coeff::Z, groups }
    }
}

fn half_plane(d: (i64, i64)) -> u8 {
    u8::from(!(d.1 > 0 || (d.1 == 0 && d.0 > 0)))
}

/// Counterclockwise angular order of nonzero integer directions.
fn angle_cmp(a: (i64, i64), b: (i64, i64)) -> Ordering {
    half_plane(a).cmp(&half_plane(b)).then_with(|| (b.0 * a.1).cmp(&(a.0 * b.1)))
}

/// Builds the cell structure for circles and points on `T^2`.
pub fn cell_pair(members: &[AffineSubtorus]) -> Result<CellPair> {
    let zero = (BigRational::zero(), BigRational::zero());
    let mut fams: Vec<Family> = vec![Family::new((1, 0), zero.clone(), false), Family::new((0, 1), zero, false)];
    let mut points: Vec<Point> = Vec::new();
    for t in members {
        let base = (t.shift[0].clone(), t.shift[1].clone());
        match t.directions.cols() {
            0 => {
                fams.push(Family::new((1, 0), base.clone(), false));
                fams.push(Family::new((0, 1), base.clone(), false));
                points.push((frac(&base.0), frac(&base.1)));
            }
            1 => {
                let v = saturate(&t.directions.transpose());
                let v = (v.get(0, 0).to_i64().unwrap(), v.get(0, 1).to_i64().unwrap());
                fams.push(Family::new(v, base, true));
            }
            _ => return Err(Error::Unsupported("the surface oracle takes circles and points only".into())),
        }
    }
    // one family per geodesic; input wins over auxiliary
    let mut uniq: BTreeMap<((i64, i64), BigRational), Family> = BTreeMap::new();
    for f in fams {
        uniq.entry((f.w, f.c.clone())).and_modify(|g| g.input |= f.input).or_insert(f);
    }
    let fams: Vec<Family> = uniq.into_values().collect();

    let mut vertex_id: BTreeMap<Point, usize> = BTreeMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut vertex_in_u: Vec<bool> = Vec::new();
    let mut edges = Vec::new();
    let mut edge_in_u = Vec::new();
    let mut edge_dir = Vec::new();
    for (g, fam) in fams.iter().enumerate() {
        let mut ts: Vec<BigRational> =
            fams.iter().enumerate().filter(|(h, _)| *h != g).flat_map(|(_, other)| fam.meets(other)).collect();
        ts.sort();
        ts.dedup();
        let ids: Vec<usize> = ts
            .iter()
            .map(|t| {
                let p = fam.at(t);
                *vertex_id.entry(p.clone()).or_insert_with(|| {
                    vertices.push(p);
                    vertex_in_u.push(false);
                    vertices.len() - 1
                })
            })
            .collect();
        for (i, &id) in ids.iter().enumerate() {
            if fam.input {
                vertex_in_u[id] = true;
            }
            edges.push((id, ids[(i + 1) % ids.len()]));
            edge_in_u.push(fam.input);
            edge_dir.push(fam.v);
        }
    }
    for p in &points {
        let id = vertex_id[p];
        vertex_in_u[id] = true;
    }

    // rotation system: outgoing half-edges (edge, forward) sorted by angle
    let mut out: Vec<Vec<(usize, bool)>> = vec![Vec::new(); vertices.len()];
    let dir = |e: usize, fwd: bool| if fwd { edge_dir[e] } else { (-edge_dir[e].0, -edge_dir[e].1) };
    for (e, &(a, b)) in edges.iter().enumerate() {
        out[a].push((e, true));
        out[b].push((e, false));
    }
    for o in &mut out {
        o.sort_by(|x, y| angle_cmp(dir(x.0, x.1), dir(y.0, y.1)));
    }
    let head = |e: usize, fwd: bool| if fwd { edges[e].1 } else { edges[e].0 };
    let mut seen = vec![[false; 2]; edges.len()];
    let mut faces = Vec::new();
    for e0 in 0..edges.len() {
        for fwd0 in [true, false] {
            if seen[e0][usize::from(fwd0)] {
                continue;
            }
            let mut bd = Vec::new();
            let (mut e, mut fwd) = (e0, fwd0);
            while !seen[e][usize::from(fwd)] {
                seen[e][usize::from(fwd)] = true;
                bd.push((e, if fwd { 1 } else { -1 }));
                let w = head(e, fwd);
                let pos = out[w].iter().position(|&h| h == (e, !fwd)).expect("twin half-edge");
                (e, fwd) = out[w][(pos + out[w].len() - 1) % out[w].len()];
            }
            faces.push(bd);
        }
    }
    let pair = CellPair { vertices, edges, faces, vertex_in_u, edge_in_u };
    pair.check()?;
    Ok(pair)
}

/// `H^*(T^2, ∪T_i)` over `Z` from the cellular pair, or the closed form for
/// points only.
pub fn oracle_surface(atlas: &CubeAtlas) -> Result<HomologySummary> {
    if atlas.n != 2 {
        return Err(Error::UnsupportedDimension(atlas.n));
    }
    if atlas.k > 0 && atlas.subtori.iter().all(|t| t.directions.cols() == 0) {
        let mut pts: Vec<Point> = atlas.subtori.iter().map(|t| (frac(&t.shift[0]), frac(&t.shift[1]))).collect();
        pts.sort();
        pts.dedup();
        let m = pts.len();
        let groups = vec![InvariantFactors::default(), InvariantFactors::free(m + 1), InvariantFactors::free(1)];
        return Ok(HomologySummary { coeff: Coeff::Z, groups });
    }
    Ok(cell_pair(&atlas.subtori)?.relative_cohomology())
}

/// `H^*(T^1, m points) = (0, Z^m)`.
pub fn oracle_circle(atlas: &CubeAtlas) -> Result<HomologySummary> {
    if atlas.n != 1 {
        return Err(Error::UnsupportedDimension(atlas.n));
    }
    let mut pts: Vec<BigRational> =
        atlas.subtori.iter().filter(|t| t.directions.cols() == 0).map(|t| frac(&t.shift[0])).collect();
    pts.sort();
    pts.dedup();
    let groups = if pts.is_empty() {
        vec![InvariantFactors::free(1), InvariantFactors::free(1)]
    } else {
        vec![InvariantFactors::default(), InvariantFactors::free(pts.len())]
    };
    Ok(HomologySummary { coeff: Coeff::Z, groups })
}
