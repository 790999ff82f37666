use std::path::PathBuf;

use subtori_core::oracle::{certify, CertifyOptions};
use subtori_core::{build_atlas, ArrangementSpec};

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn corpus_certifies() {
    for (name, text) in corpus() {
        let atlas = build_atlas(&ArrangementSpec::from_json_str(&text).unwrap()).unwrap();
        let mut opts = CertifyOptions::for_dim(atlas.n);
        opts.paranoid = true;
        let report = certify(&atlas, opts);
        println!("== {name}\n{report}{}", report.answer.complement);
        assert!(report.passed(), "{name}\n{report}");
    }
}

#[test]
fn injected_fault_is_caught() {
    for (_, text) in corpus().into_iter().take(3) {
        let atlas = build_atlas(&ArrangementSpec::from_json_str(&text).unwrap()).unwrap();
        let opts = CertifyOptions { inject_fault: true, ..CertifyOptions::for_dim(atlas.n) };
        assert!(!certify(&atlas, opts).passed());
    }
}
