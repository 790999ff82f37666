use subtori_core::complexes::{mv_assemble, Coeff};
use subtori_core::linalg::{cokernel_invariants, IntMat, InvariantFactors};
use subtori_core::models::*;
use subtori_core::{build_atlas, ArrangementSpec, CubeAtlas, Error, Subset};

fn atlas(json: &str) -> CubeAtlas {
    build_atlas(&ArrangementSpec::from_json_str(json).unwrap()).unwrap()
}

const CIRCLE: &str = r#"{"dim": 2, "subtori": [{"directions": [[0, 1]], "shift": [0, 0]}]}"#;
const CROSS: &str = r#"{"dim": 2, "subtori": [{"directions": [[1, 1]]}, {"directions": [[1, -1]]}]}"#;
const PARALLEL: &str =
    r#"{"dim": 2, "subtori": [{"directions": [[0, 1]]}, {"directions": [[0, 1]], "shift": ["1/2", 0]}]}"#;
const POINT: &str = r#"{"dim": 2, "subtori": [{"shift": ["1/3", "1/2"]}]}"#;

fn ranks(a: &ComplementAnswer) -> Vec<usize> {
    a.complement.ranks()
}

fn torsion_free(a: &ComplementAnswer) -> bool {
    a.complement.groups.iter().all(|g| g.torsion.is_empty())
}

fn answer(json: &str, coeff: Coeff) -> ComplementAnswer {
    let at = atlas(json);
    homology_complement(&at, coeff, AnswerOptions::for_dim(at.n)).unwrap()
}

#[test]
fn empty_arrangement_is_the_torus() {
    for n in 1..=3 {
        let a = answer(&format!("{{\"dim\": {n}, \"subtori\": []}}"), Coeff::Z);
        let want: Vec<usize> = (0..=n).map(|q| subtori_core::binomial::gamma_rank(n, q)).collect();
        assert_eq!(ranks(&a), want);
        assert!(torsion_free(&a));
    }
}

#[test]
fn annulus() {
    for coeff in [Coeff::Q, Coeff::Z, Coeff::Zp(2), Coeff::Zp(3)] {
        let a = answer(CIRCLE, coeff);
        assert_eq!(ranks(&a), vec![1, 1, 0], "{coeff}");
        assert_eq!(a.relative.ranks(), vec![0, 1, 1]);
    }
}

#[test]
fn two_disks() {
    let a = answer(CROSS, Coeff::Z);
    assert_eq!(ranks(&a), vec![2, 0, 0]);
    assert!(torsion_free(&a));
    assert_eq!(a.model, ModelTag::Assembled);
    let p = answer(CROSS, Coeff::Zp(2));
    assert_eq!(
        p.relative.groups,
        vec![InvariantFactors::default(), InvariantFactors::default(), InvariantFactors::free(2)]
    );
}

#[test]
fn two_annuli() {
    let a = answer(PARALLEL, Coeff::Z);
    assert_eq!(ranks(&a), vec![2, 2, 0]);
    assert!(torsion_free(&a));
}

#[test]
fn punctured_torus() {
    let a = answer(POINT, Coeff::Z);
    assert_eq!(ranks(&a), vec![1, 2, 0]);
}

#[test]
fn e1_cross_edge_has_two_torsion() {
    let at = atlas(CROSS);
    let cc = model_cohomology_e1(&at);
    let e = cc.edges[&(Subset::EMPTY, Subset::from_members(&[0]))][1].to_dense();
    let f = cc.edges[&(Subset::EMPTY, Subset::from_members(&[1]))][1].to_dense();
    let stacked = e.vstack(&f);
    assert_eq!(stacked.shape(), (2, 2));
    assert_eq!(cokernel_invariants(&stacked), InvariantFactors::new(0, vec![2.into()]));
    let cands = torsion_prime_candidates(&at).unwrap();
    assert!(cands.iter().all(|&p| p == 2));
}

#[test]
fn single_circle_e1_kills_dx1() {
    let at = atlas(r#"{"dim": 2, "subtori": [{"directions": [[0, 1]]}]}"#);
    let cc = model_cohomology_e1(&at);
    let e = cc.edges[&(Subset::EMPTY, Subset::from_members(&[0]))][1].to_dense();
    assert_eq!(e.shape(), (1, 2));
    assert!(e.get(0, 0) == &0.into());
    assert!(e.get(0, 1) != &0.into());
    assert!(torsion_prime_candidates(&at).unwrap().is_empty());
}

#[test]
fn models_are_cube_functors() {
    for json in [CIRCLE, CROSS, PARALLEL, POINT] {
        let at = atlas(json);
        model_cohomology_e1(&at).validate().unwrap();
        for normalized in [true, false] {
            let opts = BinOptions { cap: 2, normalized };
            let cc = model_bin_general(&at, opts).unwrap();
            cc.validate().unwrap();
            mv_assemble(&cc).unwrap().check().unwrap();
        }
    }
}

#[test]
fn normalized_and_unnormalized_agree() {
    for json in [CIRCLE, CROSS, PARALLEL, POINT] {
        let at = atlas(json);
        let a = total_cohomology(&model_bin_general(&at, BinOptions { cap: 2, normalized: true }).unwrap()).unwrap();
        let b = total_cohomology(&model_bin_general(&at, BinOptions { cap: 2, normalized: false }).unwrap()).unwrap();
        assert_eq!(a.padded(4).groups[..3], b.padded(4).groups[..3]);
    }
}

#[test]
fn connected_model() {
    let at = atlas(CROSS);
    assert_eq!(
        model_bin_connected(&at, BinOptions::for_dim(2)).unwrap_err(),
        Error::DisconnectedStratum { subset: Subset::from_members(&[0, 1]), components: 2 }
    );
    let central = atlas(
        r#"{"dim": 2, "subtori": [{"directions": [[1, 0]]}, {"directions": [[0, 1]]}, {"directions": [[1, 1]]}]}"#,
    );
    let opts = AnswerOptions::for_dim(2);
    let general = homology_complement(&central, Coeff::Z, opts).unwrap();
    let connected = homology_complement(&central, Coeff::Z, AnswerOptions { force_connected: true, ..opts }).unwrap();
    assert_eq!(general.complement, connected.complement);
    assert_eq!(ranks(&general), vec![2, 0, 0]);
}

#[test]
fn full_torus_member() {
    let at = atlas(r#"{"dim": 2, "subtori": [{"directions": [[1, 0], [0, 1]]}]}"#);
    assert!(matches!(
        homology_complement(&at, Coeff::Q, AnswerOptions::for_dim(2)),
        Err(Error::FullTorusMember { index: 0 })
    ));
}

#[test]
fn lambda_power_law() {
    let m = IntMat::from_rows(&[[2, 1], [0, 3]]);
    assert_eq!(lambda_power(&m, 2), IntMat::from_rows(&[[6]]));
}
