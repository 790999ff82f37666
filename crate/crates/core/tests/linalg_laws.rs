use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use subtori_core::linalg::{invariant_factors, snf, IntMat, KernelBasis, SparseMat};

fn sparse_mat(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMat> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -4i64..=4], r * c)
            .prop_map(move |v| IntMat::from_vec(r, c, v.into_iter().map(BigInt::from).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sparse_factors_match_dense_snf(m in sparse_mat(7, 7)) {
        let dense: Vec<BigInt> = snf(&m).diagonal().iter().map(|d| d.abs()).collect();
        prop_assert_eq!(invariant_factors(&SparseMat::from_dense(&m)), dense);
    }

    #[test]
    fn kernel_basis_spans_kernel(m in sparse_mat(6, 7)) {
        let sm = SparseMat::from_dense(&m);
        let kb = KernelBasis::new(&sm);
        prop_assert_eq!(kb.rank(), m.cols() - snf(&m).rank());
        let vs = kb.vectors();
        for j in 0..vs.cols() {
            let v: Vec<BigInt> = (0..vs.rows()).map(|i| vs.get(i, j)).collect();
            prop_assert!(sm.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }
}

#[test]
fn hopping_pivot_keeps_all_columns() {
    let m = IntMat::from_vec(3, 3, [2, 2, 2, -2, 0, 1, 0, 3, 0].iter().map(|&x| BigInt::from(x)).collect());
    let f = invariant_factors(&SparseMat::from_dense(&m));
    assert_eq!(f, vec![BigInt::from(1), BigInt::from(1), BigInt::from(18)]);
}
