use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{IntMat, SparseMat};

/// Exponent vector `L` standing for `∏ binom(x_i, l_i)`.
pub type Exps = Vec<u8>;

/// `rk Bin_{≤N}(Z^d) = binom(N + d, d)`.
pub fn bin_rank(d: usize, cap: usize) -> usize {
    binomial_usize(cap + d, d)
}

/// `binom(d, q)`: rank of `H^q` of the binomial model on `Z^d[-1]`.
pub fn gamma_rank(d: usize, q: usize) -> usize {
    binomial_usize(d, q)
}

fn binomial_usize(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Integer binomial coefficient `binom(x, a)` for any integer `x`.
pub fn binom_int(x: &BigInt, a: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..a {
        num *= x - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `binom(x, a)` for rational `x`.
pub fn binom_rat(x: &BigRational, a: usize) -> BigRational {
    let mut out = BigRational::one();
    for i in 0..a {
        out = out * (x - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    out
}

/// Monomial basis of `Bin_{≤N}(Z^d)`: total degree ≤ N, ordered by degree,
/// then with larger exponents on earlier variables first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinLevel {
    pub vars: usize,
    pub cap: usize,
    basis: Vec<Exps>,
    index: HashMap<Exps, usize>,
}

impl BinLevel {
    pub fn new(vars: usize, cap: usize) -> Self {
        Self::filtered(vars, cap, |_| true)
    }

    /// Only the monomials accepted by `keep`, in the standard order.
    pub fn filtered(vars: usize, cap: usize, keep: impl Fn(&[u8]) -> bool) -> Self {
        let mut basis = Vec::new();
        let mut cur = vec![0u8; vars];
        enumerate(&mut cur, 0, cap, &mut basis);
        basis.retain(|e| keep(e));
        basis.sort_by(|a, b| {
            let (da, db): (u32, u32) = (a.iter().map(|&x| x as u32).sum(), b.iter().map(|&x| x as u32).sum());
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let index = basis.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { vars, cap, basis, index }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Exps] {
        &self.basis
    }

    pub fn position(&self, e: &[u8]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

fn enumerate(cur: &mut Vec<u8>, i: usize, left: usize, out: &mut Vec<Exps>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for v in 0..=left {
        cur[i] = v as u8;
        enumerate(cur, i + 1, left - v, out);
    }
    cur[i] = 0;
}

/// Mahler coefficients of a polynomial of total degree ≤ N in `d` variables,
/// from its values on the simplex grid, as iterated finite differences at 0.
/// Output follows the order of `BinLevel::new(d, cap)`.
pub fn mahler_expand(d: usize, cap: usize, f: impl Fn(&[u8]) -> BigRational) -> Result<Vec<BigInt>> {
    let level = BinLevel::new(d, cap);
    let values: HashMap<Exps, BigRational> = level.basis().iter().map(|e| (e.clone(), f(e))).collect();
    level
        .basis()
        .iter()
        .map(|l| {
            let mut acc = BigRational::zero();
            let mut k = vec![0u8; d];
            loop {
                let sign = l.iter().zip(&k).map(|(a, b)| (a - b) as u32).sum::<u32>() % 2;
                let weight: BigInt = l.iter().zip(&k).map(|(&a, &b)| binom_int(&BigInt::from(a), b as usize)).product();
                let term = BigRational::from_integer(weight) * &values[&k];
                if sign == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
                if !step(&mut k, l) {
                    break;
                }
            }
            if acc.is_integer() {
                Ok(acc.to_integer())
            } else {
                Err(Error::NonIntegralCoefficient(acc.to_string()))
            }
        })
        .collect()
}

fn step(k: &mut [u8], bound: &[u8]) -> bool {
    for (x, &b) in k.iter_mut().zip(bound) {
        if *x < b {
            *x += 1;
            return true;
        }
        *x = 0;
    }
    false
}

/// Sparse polynomial in the Mahler basis.
pub type Poly = HashMap<Exps, BigInt>;

/// Coefficients of `binom(s t, a)` in the basis `binom(t, k)`, `k = 0..=a`.
fn mahler_univariate(s: i64, a: usize) -> Vec<BigInt> {
    let vals: Vec<BigInt> = (0..=a).map(|t| binom_int(&BigInt::from(s * t as i64), a)).collect();
    (0..=a)
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let c = binom_int(&BigInt::from(k), i) * &vals[i];
                    if (k - i) % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .sum()
        })
        .collect()
}

/// `binom(y, a) binom(y, b) = Σ_k binom(k, a) binom(a, k - b) binom(y, k)`.
fn product_rule(a: usize, b: usize) -> Vec<(usize, BigInt)> {
    (a.max(b)..=a + b)
        .map(|k| (k, binom_int(&BigInt::from(k), a) * binom_int(&BigInt::from(a), k - b)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Multiplication of Mahler-basis polynomials.
#[derive(Default)]
pub struct MahlerArith {
    rules: HashMap<(usize, usize), Vec<(usize, BigInt)>>,
    univariate: HashMap<(i64, usize), Vec<BigInt>>,
}

impl MahlerArith {
    fn rule(&mut self, a: usize, b: usize) -> &[(usize, BigInt)] {
        self.rules.entry((a, b)).or_insert_with(|| product_rule(a, b))
    }

    fn univariate(&mut self, s: i64, a: usize) -> &[BigInt] {
        self.univariate.entry((s, a)).or_insert_with(|| mahler_univariate(s, a))
    }

    pub fn mul(&mut self, p: &Poly, q: &Poly) -> Poly {
        let mut out: Poly = HashMap::new();
        for (e1, c1) in p {
            for (e2, c2) in q {
                let c = c1 * c2;
                let mut terms: Vec<(Exps, BigInt)> = vec![(Vec::with_capacity(e1.len()), c)];
                for (&x, &y) in e1.iter().zip(e2) {
                    if x == 0 || y == 0 {
                        for (e, _) in terms.iter_mut() {
                            e.push(x.max(y));
                        }
                        continue;
                    }
                    let rule = self.rule(x as usize, y as usize).to_vec();
                    let mut next = Vec::with_capacity(terms.len() * rule.len());
                    for (e, v) in &terms {
                        for (k, w) in &rule {
                            let mut e2 = e.clone();
                            e2.push(*k as u8);
                            next.push((e2, v * w));
                        }
                    }
                    terms = next;
                }
                for (e, v) in terms {
                    *out.entry(e).or_default() += v;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// `binom(Σ_j s_j y_j + c, l)` over `d2` target variables.
    pub fn affine_binomial(&mut self, form: &[(usize, i64)], c: &BigInt, l: usize, d2: usize) -> Poly {
        let mut out: Poly = HashMap::new();
        let mut comp = vec![0usize; form.len()];
        loop {
            let used: usize = comp.iter().sum();
            if used <= l {
                let c0 = binom_int(c, l - used);
                if !c0.is_zero() {
                    let mut terms: Vec<(Exps, BigInt)> = vec![(vec![0u8; d2], c0)];
                    for (&(j, s), &a) in form.iter().zip(&comp) {
                        if a == 0 {
                            continue;
                        }
                        let mu = self.univariate(s, a).to_vec();
                        let mut next = Vec::new();
                        for (e, v) in &terms {
                            for (k, m) in mu.iter().enumerate() {
                                if m.is_zero() {
                                    continue;
                                }
                                let mut e2 = e.clone();
                                e2[j] = k as u8;
                                next.push((e2, v * m));
                            }
                        }
                        terms = next;
                    }
                    for (e, v) in terms {
                        *out.entry(e).or_default() += v;
                    }
                }
            }
            // next composition with parts ≤ l
            let mut i = 0;
            loop {
                if i == comp.len() {
                    out.retain(|_, v| !v.is_zero());
                    return out;
                }
                if comp[i] < l {
                    comp[i] += 1;
                    break;
                }
                comp[i] = 0;
                i += 1;
            }
        }
    }
}

/// A `Z`-linear map `Z^{d1} -> Z^{d2}` with per-generator integer constants:
/// `x_i ↦ Σ_j phi[j][i] y_j + c_i`.
#[derive(Clone, Debug)]
pub struct AffineSubst {
    pub d1: usize,
    pub d2: usize,
    /// Sparse image of each source generator.
    pub forms: Vec<Vec<(usize, i64)>>,
    pub consts: Vec<BigInt>,
}

impl AffineSubst {
    pub fn linear(phi: &IntMat) -> Self {
        let forms = (0..phi.cols())
            .map(|i| {
                (0..phi.rows())
                    .filter(|&j| !phi.get(j, i).is_zero())
                    .map(|j| (j, phi.get(j, i).to_i64().expect("substitution coefficient fits in 64 bits")))
                    .collect()
            })
            .collect();
        Self { d1: phi.cols(), d2: phi.rows(), forms, consts: vec![BigInt::zero(); phi.cols()] }
    }

    pub fn with_consts(mut self, consts: Vec<BigInt>) -> Self {
        assert_eq!(consts.len(), self.d1);
        self.consts = consts;
        self
    }
}

/// Images of the basis monomials of `src` under `Bin` of an affine substitution.
pub fn bin_images(map: &AffineSubst, src: &BinLevel, arith: &mut MahlerArith) -> Vec<Poly> {
    assert_eq!(src.vars, map.d1);
    let mut cache: HashMap<(usize, usize), Poly> = HashMap::new();
    src.basis()
        .iter()
        .map(|e| {
            let mut acc: Poly = HashMap::from([(vec![0u8; map.d2], BigInt::one())]);
            for (i, &l) in e.iter().enumerate() {
                if l == 0 {
                    continue;
                }
                let factor = cache
                    .entry((i, l as usize))
                    .or_insert_with(|| arith.affine_binomial(&map.forms[i], &map.consts[i], l as usize, map.d2));
                acc = arith.mul(&acc, factor);
            }
            acc
        })
        .collect()
}

/// Writes polynomials as columns over `tgt`; every monomial must be in `tgt`.
pub fn polys_to_matrix(polys: Vec<Poly>, tgt: &BinLevel) -> Result<SparseMat> {
    let mut columns = Vec::with_capacity(polys.len());
    for p in polys {
        let mut col = Vec::with_capacity(p.len());
        for (t, v) in p {
            if v.is_zero() {
                continue;
            }
            match tgt.position(&t) {
                Some(k) => col.push((k, v)),
                None => return Err(Error::Inconsistent(format!("image monomial {t:?} outside the target basis"))),
            }
        }
        columns.push(col);
    }
    Ok(SparseMat::from_columns(tgt.len(), columns))
}

/// Matrix of `Bin_{≤N}` of an affine substitution between the given bases.
pub fn bin_matrix(map: &AffineSubst, src: &BinLevel, tgt: &BinLevel, arith: &mut MahlerArith) -> Result<SparseMat> {
    assert_eq!(tgt.vars, map.d2);
    polys_to_matrix(bin_images(map, src, arith), tgt)
}

/// `Bin_{≤N}(φ)` for `φ: Z^{d1} -> Z^{d2}` (`d2 × d1`) with optional rational
/// constants added to the image of each source generator.
pub fn bin_functor_matrix(phi: &IntMat, consts: Option<&[BigRational]>, cap: usize) -> Result<SparseMat> {
    let src = BinLevel::new(phi.cols(), cap);
    let tgt = BinLevel::new(phi.rows(), cap);
    let mut arith = MahlerArith::default();
    match consts {
        None => bin_matrix(&AffineSubst::linear(phi), &src, &tgt, &mut arith),
        Some(c) if c.iter().all(BigRational::is_integer) => {
            let map = AffineSubst::linear(phi).with_consts(c.iter().map(BigRational::to_integer).collect());
            bin_matrix(&map, &src, &tgt, &mut arith)
        }
        Some(c) => rational_shift_matrix(phi, c, &src, &tgt),
    }
}

/// Rational constants: expand through the grid and reject non-integral output.
fn rational_shift_matrix(phi: &IntMat, c: &[BigRational], src: &BinLevel, tgt: &BinLevel) -> Result<SparseMat> {
    let mut columns = Vec::with_capacity(src.len());
    for e in src.basis() {
        let coeffs = mahler_expand(tgt.vars, tgt.cap, |y| {
            e.iter()
                .enumerate()
                .map(|(i, &l)| {
                    let lin: BigInt = (0..phi.rows()).map(|j| phi.get(j, i) * BigInt::from(y[j])).sum();
                    binom_rat(&(BigRational::from_integer(lin) + &c[i]), l as usize)
                })
                .product()
        })?;
        columns.push(coeffs.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
    }
    Ok(SparseMat::from_columns(tgt.len(), columns))
}

/// Evaluates a Mahler-basis polynomial at an integer point.
pub fn eval_mahler(p: &[(Exps, BigInt)], y: &[i64]) -> BigInt {
    p.iter()
        .map(|(e, c)| c * e.iter().zip(y).map(|(&l, &v)| binom_int(&BigInt::from(v), l as usize)).product::<BigInt>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn ranks() {
        assert_eq!(bin_rank(2, 2), 6);
        assert_eq!(bin_rank(5, 0), 1);
        assert_eq!(bin_rank(0, 4), 1);
        assert_eq!(BinLevel::new(3, 2).len(), bin_rank(3, 2));
        assert_eq!(gamma_rank(2, 1), 2);
        assert_eq!(gamma_rank(3, 3), 1);
        assert_eq!(gamma_rank(2, 3), 0);
    }

    #[test]
    fn basis_order() {
        let b = BinLevel::new(2, 2);
        let e: Vec<Exps> = b.basis().to_vec();
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn expand_examples() {
        let sq = mahler_expand(1, 2, |x| rat(x[0] as i64 * x[0] as i64)).unwrap();
        assert_eq!(ints(&sq), vec![0, 1, 2]);
        assert_eq!(ints(&mahler_expand(2, 0, |_| rat(1)).unwrap()), vec![1]);
        let v = mahler_expand(2, 2, |x| BigRational::from_integer(binom_int(&BigInt::from(x[0] + x[1]), 2))).unwrap();
        // basis: 1, x, y, C(x,2), xy, C(y,2)
        assert_eq!(ints(&v), vec![0, 0, 0, 1, 1, 1]);
        let half = mahler_expand(1, 1, |x| BigRational::new((x[0] as i64).into(), 2.into()));
        assert!(matches!(half, Err(Error::NonIntegralCoefficient(_))));
    }

    #[test]
    fn functor_examples() {
        let id = bin_functor_matrix(&IntMat::identity(2), None, 3).unwrap();
        assert_eq!(id.to_dense(), IntMat::identity(bin_rank(2, 3)));
        let two = bin_functor_matrix(&IntMat::from_rows(&[[2]]), None, 2).unwrap().to_dense();
        // binom(2x, 2) = x + 4 binom(x, 2)
        assert_eq!(two, IntMat::from_rows(&[[1, 0, 0], [0, 2, 1], [0, 0, 4]]));
        let ev = bin_functor_matrix(&IntMat::zeros(0, 1), Some(&[rat(1)]), 3).unwrap().to_dense();
        assert_eq!(ev, IntMat::from_rows(&[[1, 1, 0, 0]]));
        let bad = bin_functor_matrix(&IntMat::zeros(0, 1), Some(&[BigRational::new(1.into(), 2.into())]), 2);
        assert!(matches!(bad, Err(Error::NonIntegralCoefficient(_))));
    }

    #[test]
    fn symbolic_agrees_with_grid() {
        let phi = IntMat::from_rows(&[[1, -2], [3, 0], [0, 1]]);
        let consts = [rat(-1), rat(2)];
        let sym = bin_functor_matrix(&phi, Some(&consts), 3).unwrap();
        let src = BinLevel::new(2, 3);
        let tgt = BinLevel::new(3, 3);
        let grid = rational_shift_matrix(&phi, &consts, &src, &tgt).unwrap();
        assert_eq!(sym, grid);
    }
}
