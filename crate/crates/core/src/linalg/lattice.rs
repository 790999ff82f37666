use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::hnf::{hnf, row_lattice_basis};
use super::snf::{normalize_diagonal, snf};
use super::IntMat;

/// A finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/t_i` with
/// `t_1 | t_2 | ...` and every `t_i > 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantFactors {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl InvariantFactors {
    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    /// Builds from any list of torsion orders; normalizes to the divisibility chain.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Self {
        let torsion = normalize_diagonal(torsion).into_iter().filter(|t| !t.is_one()).collect();
        Self { free_rank, torsion }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Keeps only the `p`-primary part of the torsion.
    pub fn localize(&self, p: &BigInt) -> Self {
        let torsion = self.torsion.iter().map(|t| p_part(t, p)).filter(|t| !t.is_one()).collect();
        Self { free_rank: self.free_rank, torsion }
    }

    /// Elementary divisors as `(prime, exponent)` pairs, sorted.
    pub fn elementary_divisors(&self) -> Vec<(BigInt, u32)> {
        let mut out = Vec::new();
        for t in &self.torsion {
            for (p, e) in factorize(t) {
                out.push((p, e));
            }
        }
        out.sort();
        out
    }

    pub fn torsion_primes(&self) -> Vec<BigInt> {
        let mut ps: Vec<BigInt> = self.elementary_divisors().into_iter().map(|(p, _)| p).collect();
        ps.dedup();
        ps
    }
}

impl std::fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Largest power of `p` dividing `t`.
pub fn p_part(t: &BigInt, p: &BigInt) -> BigInt {
    let mut t = t.abs();
    let mut out = BigInt::one();
    if t.is_zero() {
        return out;
    }
    while t.is_multiple_of(p) {
        t /= p;
        out *= p;
    }
    out
}

/// Trial-division factorization of a nonzero integer.
pub fn factorize(t: &BigInt) -> Vec<(BigInt, u32)> {
    let mut t = t.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= t {
        let mut e = 0;
        while t.is_multiple_of(&p) {
            t /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if t > BigInt::one() {
        out.push((t, 1));
    }
    out
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Basis of the integer kernel `{x : M x = 0}` as columns, in canonical
/// (Hermite) form. The kernel of an integer matrix is always saturated.
pub fn kernel_basis(m: &IntMat) -> IntMat {
    let (h, u) = hnf(&m.transpose());
    let r = (0..h.rows()).take_while(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let k = u.row_range(r, u.rows());
    row_lattice_basis(&k).transpose()
}

/// Saturation of the row lattice of `l` inside `Z^cols`, as canonical rows.
pub fn saturate(l: &IntMat) -> IntMat {
    if l.rows() == 0 {
        return l.clone();
    }
    let k = kernel_basis(l);
    if k.cols() == 0 {
        return IntMat::identity(l.cols());
    }
    kernel_basis(&k.transpose()).transpose()
}

/// Is `v` in the row lattice of `l`?
pub fn in_row_lattice(l: &IntMat, v: &[BigInt]) -> bool {
    solve_diophantine(&l.transpose(), v).is_some()
}

/// Row lattices equal?
pub fn same_row_lattice(a: &IntMat, b: &IntMat) -> bool {
    a.cols() == b.cols() && row_lattice_basis(a) == row_lattice_basis(b)
}

/// Invariant factors of `Z^rows / (column span of m)`.
pub fn cokernel_invariants(m: &IntMat) -> InvariantFactors {
    let d = snf(m).diagonal();
    InvariantFactors::new(m.rows() - d.len(), d)
}

/// An integer solution of `a x = b`, if one exists.
pub fn solve_diophantine(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len());
    let r = snf(a);
    let c = r.u.mul_vec(b);
    let d = r.diagonal();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        match d.get(i) {
            Some(di) => {
                if !ci.is_multiple_of(di) {
                    return None;
                }
                y[i] = ci / di;
            }
            None => {
                if !ci.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(r.v.mul_vec(&y))
}

fn lcm_denominators(d: &[BigRational]) -> BigInt {
    d.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Solves `C x ≡ d (mod Z^m)` over the rationals.
///
/// Among all solutions in `[0,1)^n` the one with the smallest common
/// denominator is returned, ties broken lexicographically.
pub fn solve_integer_affine(c: &IntMat, d: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(c.rows(), d.len(), "right-hand side length");
    let m = c.rows();
    let base = lcm_denominators(d);

    // Existence and a denominator bound from the Smith form.
    let r = snf(c);
    let diag = r.diagonal();
    let ud: Vec<BigRational> =
        (0..m).map(|i| (0..m).map(|j| BigRational::from_integer(r.u.get(i, j).clone()) * &d[j]).sum()).collect();
    if ud.iter().skip(diag.len()).any(|x| !x.is_integer()) {
        return None;
    }
    let top = diag.last().cloned().unwrap_or_else(BigInt::one);

    let mut t = BigInt::one();
    while t <= top {
        let q = &base * &t;
        if let Some(z) = lex_least_numerators(c, d, &q) {
            return Some(z.into_iter().map(|zi| BigRational::new(zi, q.clone())).collect::<Vec<_>>());
        }
        t += 1;
    }
    // The Smith form guarantees a solution with denominator dividing base * top.
    unreachable!("congruence system solvable but no solution found up to the bound")
}

/// Lexicographically least `z ∈ [0,q)^n` with `C z / q ≡ d (mod Z)`.
fn lex_least_numerators(c: &IntMat, d: &[BigRational], q: &BigInt) -> Option<Vec<BigInt>> {
    let n = c.cols();
    let m = c.rows();
    // q d must be integral for C z - q d ∈ q Z^m
    let qd: Vec<BigInt> = d
        .iter()
        .map(|x| {
            let y = x * BigRational::from_integer(q.clone());
            y.is_integer().then(|| y.to_integer())
        })
        .collect::<Option<_>>()?;
    let feasible = |fixed: &[BigInt]| -> bool {
        let k = fixed.len();
        let free = c.col_range(k, n);
        let a = free.hstack(&scalar_identity(m, q));
        let rhs: Vec<BigInt> = (0..m)
            .map(|i| {
                let s: BigInt = (0..k).map(|j| c.get(i, j) * &fixed[j]).sum();
                &qd[i] - s
            })
            .collect();
        solve_diophantine(&a, &rhs).is_some()
    };
    if !feasible(&[]) {
        return None;
    }
    let mut z: Vec<BigInt> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v = BigInt::zero();
        loop {
            z.push(v.clone());
            if feasible(&z) {
                break;
            }
            z.pop();
            v += 1;
            debug_assert!(&v < q);
        }
    }
    Some(z)
}

fn scalar_identity(m: usize, q: &BigInt) -> IntMat {
    let mut out = IntMat::zeros(m, m);
    for i in 0..m {
        out.set(i, i, q.clone());
    }
    out
}

/// Reduces a rational vector into `[0,1)^n`.
pub fn frac_vec(x: &[BigRational]) -> Vec<BigRational> {
    x.iter().map(|v| v - v.floor()).collect()
}
