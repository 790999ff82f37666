use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use super::{oracle_circle, oracle_single, oracle_surface};
use crate::arrangement::{union_euler, CubeAtlas};
use crate::complexes::{mv_assemble, CocubicalComplex, Coeff, HomologySummary};
use crate::error::Result;
use crate::linalg::{InvariantFactors, SparseMat};
use crate::models::{
    assemble, bin_general_with, model_bin_connected, model_cohomology_e1, total_cohomology, AnswerOptions,
    ComplementAnswer, ModelTag, Splitting,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub checks: Vec<Check>,
    /// The assembled `Z` answer.
    pub answer: ComplementAnswer,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> Value {
        json!({ "passed": self.passed(), "checks": self.checks, "answer": self.answer.to_json() })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", c.status, c.name, c.detail)?;
        }
        let fails = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), fails)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub answer: AnswerOptions,
    /// Rebuild with unnormalized Moore complexes and with the anchored splitting.
    pub paranoid: bool,
    /// Corrupt one differential of the binomial model (test fixture).
    pub inject_fault: bool,
}

impl CertifyOptions {
    pub fn for_dim(n: usize) -> Self {
        Self { answer: AnswerOptions::for_dim(n), paranoid: false, inject_fault: false }
    }
}

struct Log(Vec<Check>);

impl Log {
    fn push(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), status, detail: detail.into() });
    }

    fn expect(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    fn result<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(name, Status::Fail, e.to_string());
                None
            }
        }
    }
}

fn groups(h: &HomologySummary, len: usize) -> Vec<InvariantFactors> {
    h.clone().padded(len).groups[..len].to_vec()
}

fn fmt_groups(g: &[InvariantFactors]) -> String {
    format!("[{}]", g.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn corrupt(cc: &mut CocubicalComplex) {
    let Some(node) = cc.nodes.values_mut().next() else { return };
    let d0 = node.diff(0);
    if d0.rows() == 0 || d0.cols() == 0 {
        return;
    }
    let bump = SparseMat::from_triplets(d0.rows(), d0.cols(), vec![(0, 0, BigInt::one())]);
    let mut diffs = node.diffs().to_vec();
    diffs[0] = d0.add(&bump);
    *node = crate::complexes::FreeCochainComplex::new(node.ranks().to_vec(), diffs).expect("same shapes");
}

fn empty() -> HomologySummary {
    HomologySummary { coeff: Coeff::Z, groups: Vec::new() }
}

fn p_torsion_order(h: &HomologySummary, p: u64) -> BigInt {
    h.groups.iter().map(|g| g.localize(&BigInt::from(p)).torsion_order()).product()
}

/// Runs every applicable oracle and cross-model invariant.
pub fn certify(atlas: &CubeAtlas, opts: CertifyOptions) -> Report {
    let n = atlas.n;
    let len = n + 1;
    let mut log = Log(Vec::new());
    if let Some(i) = atlas.full_torus_member() {
        log.push("full torus member", Status::Pass, format!("subtori[{i}] is T; the complement is empty"));
        return Report { checks: log.0, answer: ComplementAnswer::empty_complement(n, Coeff::Z) };
    }

    let e1_cube = model_cohomology_e1(atlas);
    log.expect("E1 cube functor", e1_cube.validate().is_ok(), "edge maps commute on every square");
    let e1 = log.result("E1 cohomology", total_cohomology(&e1_cube)).unwrap_or_else(empty);
    let candidates: Vec<u64> = e1.torsion_primes().iter().map(|p| u64::try_from(p).expect("small prime")).collect();
    log.push("torsion prime candidates", Status::Info, format!("{candidates:?}"));

    let mut bin_cube = match bin_general_with(atlas, opts.answer.bin, Splitting::Pushout) {
        Ok(c) => c,
        Err(e) => {
            log.push("bin-general model", Status::Fail, e.to_string());
            CocubicalComplex::new(atlas.k)
        }
    };
    if opts.inject_fault {
        corrupt(&mut bin_cube);
        log.push("fault injection", Status::Info, "one differential of the bin-general model was corrupted");
    }
    let valid = bin_cube.validate().and_then(|_| mv_assemble(&bin_cube)?.check());
    log.expect(
        "bin-general complex",
        valid.is_ok(),
        valid.err().map_or("d^2 = 0, cochain edge maps, commuting squares".into(), |e| e.to_string()),
    );
    let bin = log.result("bin-general cohomology", total_cohomology(&bin_cube)).unwrap_or_else(empty);

    let high: Vec<InvariantFactors> = bin.groups.iter().skip(len).filter(|g| !g.is_zero()).cloned().collect();
    log.expect("vanishing above dim T", high.is_empty(), if high.is_empty() { "ok".into() } else { fmt_groups(&high) });

    let q_e1: Vec<usize> = groups(&e1, len).iter().map(|g| g.free_rank).collect();
    let q_bin: Vec<usize> = groups(&bin, len).iter().map(|g| g.free_rank).collect();
    log.expect("Q ranks bin-general = rational E1", q_e1 == q_bin, format!("{q_bin:?} vs {q_e1:?}"));

    let outside: Vec<BigInt> =
        bin.torsion_primes().into_iter().filter(|p| !candidates.iter().any(|c| BigInt::from(*c) == *p)).collect();
    log.expect("torsion primes within candidates", outside.is_empty(), format!("outside: {outside:?}"));
    for &p in &candidates {
        let (a, b) = (p_torsion_order(&bin, p), p_torsion_order(&e1, p));
        log.expect(&format!("{p}-torsion bound"), (&b % &a) == BigInt::from(0), format!("|{a}| divides |{b}|"));
    }

    let chi = union_euler(atlas);
    let euler = bin.euler();
    log.expect("Euler identity", euler == -chi, format!("sum (-1)^q rk H^q = {euler}, -chi(U) = {}", -chi));

    let assembled = assemble(&e1, &bin, &candidates);
    let answer_z = groups(&assembled, len);
    let rings: Vec<(Coeff, Vec<InvariantFactors>)> = [Coeff::Z, Coeff::Q, Coeff::Zp(2), Coeff::Zp(3)]
        .into_iter()
        .map(|c| {
            let g = match c {
                Coeff::Z => answer_z.clone(),
                Coeff::Q => groups(&e1.change_ring(Coeff::Q), len),
                Coeff::Zp(p) => groups(&bin.change_ring(Coeff::Zp(p)), len),
            };
            (c, g)
        })
        .collect();

    let mut oracles = 0;
    if atlas.k == 1 {
        oracles += 1;
        let want = groups(&oracle_single(n, &atlas.subtori[0]), len);
        for (c, got) in &rings {
            let w = groups(&HomologySummary { coeff: Coeff::Z, groups: want.clone() }.change_ring(*c), len);
            log.expect(
                &format!("single-subtorus oracle over {c}"),
                *got == w,
                format!("{} vs {}", fmt_groups(got), fmt_groups(&w)),
            );
        }
    }
    let planar = match n {
        1 => Some(("points-on-a-circle oracle", oracle_circle(atlas))),
        2 => Some(("surface oracle", oracle_surface(atlas))),
        _ => None,
    };
    if let Some((name, result)) = planar {
        oracles += 1;
        match result {
            Ok(h) => {
                for (c, got) in &rings {
                    let w = groups(&h.change_ring(*c), len);
                    log.expect(
                        &format!("{name} over {c}"),
                        *got == w,
                        format!("{} vs {}", fmt_groups(got), fmt_groups(&w)),
                    );
                }
            }
            Err(e) => log.push(name, Status::Fail, e.to_string()),
        }
    }
    if oracles == 0 {
        log.push(
            "independent oracle",
            Status::Info,
            "none applicable for n >= 3 with several members; relying on cross-model and Euler checks",
        );
    }

    if atlas.strata_connected() {
        match model_bin_connected(atlas, opts.answer.bin).and_then(|c| total_cohomology(&c)) {
            Ok(conn) => {
                let ok_q = groups(&conn, len).iter().map(|g| g.free_rank).collect::<Vec<_>>() == q_bin;
                log.expect("bin-connected Q ranks", ok_q, "matches bin-general");
                for &p in &candidates {
                    let a = groups(&conn.change_ring(Coeff::Zp(p)), len);
                    let b = groups(&bin.change_ring(Coeff::Zp(p)), len);
                    log.expect(
                        &format!("bin-connected over Z_({p})"),
                        a == b,
                        format!("{} vs {}", fmt_groups(&a), fmt_groups(&b)),
                    );
                }
            }
            Err(e) => log.push("bin-connected model", Status::Fail, e.to_string()),
        }
    }

    let e1_z = groups(&e1, len);
    if e1_z != answer_z {
        log.push(
            "integral E1 vs assembled",
            Status::Info,
            format!("differ: {} vs {}", fmt_groups(&e1_z), fmt_groups(&answer_z)),
        );
    }
    let full = groups(&bin, len);
    if full != answer_z {
        log.push("full bin-general SNF vs assembled", Status::Info, format!("differ: {}", fmt_groups(&full)));
    }

    if opts.paranoid {
        let other = crate::models::BinOptions { normalized: !opts.answer.bin.normalized, ..opts.answer.bin };
        match bin_general_with(atlas, other, Splitting::Pushout).and_then(|c| total_cohomology(&c)) {
            Ok(h) => {
                let g = groups(&h, len);
                let name = if other.normalized { "normalized rebuild" } else { "unnormalized rebuild" };
                log.expect(name, g == full, format!("{} vs {}", fmt_groups(&g), fmt_groups(&full)));
            }
            Err(e) => log.push("Moore-complex rebuild", Status::Fail, e.to_string()),
        }
        match bin_general_with(atlas, opts.answer.bin, Splitting::Anchored).and_then(|c| total_cohomology(&c)) {
            Ok(h) => {
                let g = groups(&h, len);
                let same = if g == full { "agrees" } else { "differs" };
                log.push("anchored splitting", Status::Info, format!("{same}: {}", fmt_groups(&g)));
            }
            Err(e) => log.push("anchored splitting", Status::Info, e.to_string()),
        }
    }

    let mut answer = ComplementAnswer::from_relative_groups(n, Coeff::Z, answer_z, ModelTag::Assembled);
    answer.primes_checked = candidates;
    Report { checks: log.0, answer }
}
