use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use subtori_core::binomial::{moore_bin_complex, normalized_bin_complex, TwoTermComplex};
use subtori_core::complexes::{cohomology, Coeff};
use subtori_core::models::{AnswerOptions, Workbench};
use subtori_core::{build_atlas, ArrangementSpec, CubeAtlas};

fn load(name: &str) -> CubeAtlas {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let spec = ArrangementSpec::from_json_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    build_atlas(&spec).unwrap()
}

fn moore_complexes(c: &mut Criterion) {
    let mut g = c.benchmark_group("bin_complex");
    for r in 1..=3 {
        let k = TwoTermComplex::quotient(r);
        let n = r + 1;
        g.bench_with_input(BenchmarkId::new("normalized", r), &k, |b, k| {
            b.iter(|| cohomology(&normalized_bin_complex(black_box(k), n).unwrap(), Coeff::Z))
        });
        g.bench_with_input(BenchmarkId::new("unnormalized", r), &k, |b, k| {
            b.iter(|| cohomology(&moore_bin_complex(black_box(k), n, n + 1).unwrap(), Coeff::Z))
        });
    }
    g.finish();
}

fn corpus_answers(c: &mut Criterion) {
    let mut g = c.benchmark_group("answer_z");
    g.sample_size(20);
    for name in ["t2_cross.json", "t2_four_circles.json", "t3_four_members.json", "t3_lines_and_point.json"] {
        let atlas = load(name);
        g.bench_function(name, |b| {
            b.iter(|| {
                let wb = Workbench::new(black_box(&atlas), AnswerOptions::for_dim(atlas.n)).unwrap();
                wb.answer(Coeff::Z).unwrap()
            })
        });
    }
    g.finish();
}

fn atlas(c: &mut Criterion) {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/t3_four_members.json"))
        .unwrap();
    let spec = ArrangementSpec::from_json_str(&text).unwrap();
    c.bench_function("build_atlas/t3_four_members", |b| b.iter(|| build_atlas(black_box(&spec)).unwrap()));
}

criterion_group!(benches, moore_complexes, corpus_answers, atlas);
criterion_main!(benches);
