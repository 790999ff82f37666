use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use subtori_core::binomial::*;
use subtori_core::complexes::{cohomology, Coeff};
use subtori_core::linalg::{cokernel_invariants, IntMat, InvariantFactors};

fn mat(rows: usize, cols: usize, v: &[i64]) -> IntMat {
    IntMat::from_vec(rows, cols, v.iter().map(|&x| BigInt::from(x)).collect())
}

fn small_mat(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMat> {
    (0..=max_rows, 0..=max_cols)
        .prop_flat_map(|(r, c)| prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| mat(r, c, &v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coface_identities(d in small_mat(3, 3)) {
        let k = TwoTermComplex::new(d);
        for m in 0..3 {
            for j in 1..=m + 2 {
                for i in 0..j {
                    let lhs = &k.coface(m + 1, j) * &k.coface(m, i);
                    let rhs = &k.coface(m + 1, i) * &k.coface(m, j - 1);
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn moore_cohomology_is_kernel_and_cokernel(d in small_mat(3, 3)) {
        let k = TwoTermComplex::new(d.clone());
        let h = cohomology(&cosimplicialize(&k, 4).moore_complex(), Coeff::Z);
        let rank = subtori_core::linalg::snf(&d).rank();
        prop_assert_eq!(h.group(0), InvariantFactors::free(k.a - rank));
        prop_assert_eq!(h.group(1), cokernel_invariants(&d));
        prop_assert!(h.group(2).is_zero() && h.group(3).is_zero());
    }

    #[test]
    fn functor_composition(phi in small_mat(2, 2), seed in prop::collection::vec(-2i64..=2, 4)) {
        let d1 = phi.cols();
        let psi = mat(d1, 2, &seed[..2 * d1]);
        let lhs = bin_functor_matrix(&(&phi * &psi), None, 3).unwrap();
        let rhs = &bin_functor_matrix(&phi, None, 3).unwrap() * &bin_functor_matrix(&psi, None, 3).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbolic_matches_grid(phi in small_mat(2, 2), c in prop::collection::vec(-2i64..=2, 2)) {
        let consts: Vec<BigRational> = c[..phi.cols()].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let m = bin_functor_matrix(&phi, Some(&consts), 3).unwrap();
        for (j, e) in BinLevel::new(phi.cols(), 3).basis().iter().enumerate() {
            let col = mahler_expand(phi.rows(), 3, |y| {
                e.iter().enumerate().map(|(i, &l)| {
                    let lin: BigInt = (0..phi.rows()).map(|r| phi.get(r, i) * BigInt::from(y[r])).sum();
                    binom_rat(&(BigRational::from_integer(lin) + &consts[i]), l as usize)
                }).product()
            }).unwrap();
            let got: Vec<BigInt> = (0..m.rows()).map(|i| m.get(i, j)).collect();
            prop_assert_eq!(got, col);
        }
    }
}

fn truncated_groups(k: &TwoTermComplex, n: usize, top: usize) -> Vec<InvariantFactors> {
    let cx = moore_bin_complex(k, n, top).unwrap();
    cx.check().unwrap();
    cohomology(&tau_truncate(&cx, n), Coeff::Z).groups
}

#[test]
fn exterior_law() {
    for r in 0..=3 {
        for n in 1..=3 {
            let g = truncated_groups(&TwoTermComplex::quotient(r), n, n + 1);
            for q in 0..=n {
                assert_eq!(g[q], InvariantFactors::free(gamma_rank(r, q)), "r={r} N={n} q={q}");
            }
        }
    }
}

#[test]
fn exterior_law_normalized() {
    for r in 0..=4 {
        let g = cohomology(&normalized_bin_complex(&TwoTermComplex::quotient(r), 4).unwrap(), Coeff::Z).groups;
        for q in 0..=4 {
            assert_eq!(g.get(q).cloned().unwrap_or_default(), InvariantFactors::free(gamma_rank(r, q)));
        }
    }
}

#[test]
fn truncation_example() {
    let g = truncated_groups(&TwoTermComplex::quotient(2), 2, 3);
    assert_eq!(g.iter().map(|x| x.free_rank).collect::<Vec<_>>(), vec![1, 2, 1]);
}

#[test]
fn split_kernel_law() {
    for (a, b) in [(1, 1), (1, 2), (2, 1)] {
        let mut d = IntMat::zeros(a + b, a);
        for i in 0..a {
            d.set(i, i, 1.into());
        }
        let g = truncated_groups(&TwoTermComplex::new(d), 2, 3);
        for q in 0..=2 {
            assert_eq!(g[q], InvariantFactors::free(gamma_rank(b, q)));
        }
    }
}

#[test]
fn rank_formula_per_level() {
    let k = TwoTermComplex::new(mat(2, 1, &[1, 3]));
    let cx = moore_bin_complex(&k, 2, 3).unwrap();
    assert_eq!(cx.ranks(), &[bin_rank(1, 2), bin_rank(3, 2), bin_rank(5, 2), bin_rank(7, 2)]);
}

#[test]
fn chain_maps_commute_with_differentials() {
    // inclusion ⟨2 e1⟩ ⊆ Z^2 of form lattices into Z^2 with a constant
    let src = TwoTermComplex::new(mat(2, 1, &[2, 0]));
    let tgt = TwoTermComplex::new(mat(2, 1, &[1, 0]));
    let f = TwoTermMap { f0: mat(1, 1, &[2]), f1: IntMat::identity(2), consts: vec![BigInt::from(-1)] };
    for normalized in [false, true] {
        let top = if normalized { 2 } else { 3 };
        let sl = bin_levels(&src, 2, top, normalized);
        let tl = bin_levels(&tgt, 2, top, normalized);
        let cs = if normalized { normalized_bin_complex(&src, 2) } else { moore_bin_complex(&src, 2, 3) }.unwrap();
        let ct = if normalized { normalized_bin_complex(&tgt, 2) } else { moore_bin_complex(&tgt, 2, 3) }.unwrap();
        let maps = bin_chain_map(&f, &src, &tgt, &sl, &tl).unwrap();
        for q in 0..top {
            assert_eq!(&ct.diff(q) * &maps[q], &maps[q + 1] * &cs.diff(q));
        }
        let ts = truncate_with_basis(&cs, 2);
        let tt = truncate_with_basis(&ct, 2);
        let r = restrict_map(&ts, &tt, &maps).unwrap();
        for q in 0..2 {
            assert_eq!(&tt.complex.diff(q) * &r[q], &r[q + 1] * &ts.complex.diff(q));
        }
    }
}
