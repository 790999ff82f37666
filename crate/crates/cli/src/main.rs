mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use subtori_core::arrangement::{build_atlas, ArrangementSpec, CubeAtlas};
use subtori_core::complexes::Coeff;
use subtori_core::models::{
    bin_general_with, model_bin_connected, model_cohomology_e1, AnswerOptions, ComplementAnswer, Splitting, Workbench,
};
use subtori_core::oracle::{certify, CertifyOptions};
use subtori_core::Error;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_CERTIFY: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Strata, components, anchors and component maps.
    Poset,
    /// Homology of the complement and relative cohomology.
    Homology,
    /// Run every applicable oracle and cross-model check.
    Certify,
    /// Model complexes as JSON.
    Dump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CoeffSel {
    One(Coeff),
    All,
}

fn parse_coeff(s: &str) -> Result<CoeffSel, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(CoeffSel::All)
    } else {
        s.parse().map(CoeffSel::One)
    }
}

/// Homology of complements of affine subtorus arrangements.
#[derive(Debug, Parser)]
#[command(name = "subtori", version)]
struct Cli {
    command: Command,
    /// Arrangement file (JSON).
    input: PathBuf,
    /// q, z, zp:<p> or all.
    #[arg(long, default_value = "z", value_parser = parse_coeff)]
    coeff: CoeffSel,
    /// Report the integral E1 model as the Z answer.
    #[arg(long)]
    assert_free_lift: bool,
    /// Rebuild the binomial model with the other Moore complex and the anchored splitting.
    #[arg(long)]
    paranoid: bool,
    /// Truncation degree of the binomial models (default: dim T).
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    /// Use unnormalized Moore complexes in the binomial models.
    #[arg(long)]
    unnormalized: bool,
    /// Use the connected-strata model for p-local answers.
    #[arg(long)]
    connected: bool,
    /// Emit JSON.
    #[arg(long)]
    json: bool,
    /// Worker threads (0: one per core).
    #[arg(long, env = "SUBTORI_THREADS", default_value_t = 0)]
    threads: usize,
    /// Also write the model complexes as JSON to this path.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::NonRationalShift { .. } | Error::RankDeficientDirections { .. } => {
                EXIT_INPUT
            }
            Error::DisconnectedStratum { .. } => EXIT_PRECONDITION,
            _ => EXIT_INTERNAL,
        };
        Self::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(cli: &Cli) -> Result<CubeAtlas, Failure> {
    let text = std::fs::read_to_string(&cli.input)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", cli.input.display())))?;
    let spec = ArrangementSpec::from_json_str(&text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", cli.input.display())))?;
    Ok(build_atlas(&spec)?)
}

fn answer_options(cli: &Cli, n: usize) -> AnswerOptions {
    let mut opts = AnswerOptions::for_dim(n);
    if let Some(t) = cli.truncation {
        if t < n {
            eprintln!("warning: truncation {t} is below dim T = {n}; the finite-rank guarantee no longer applies");
        }
        opts.bin.cap = t;
    }
    opts.bin.normalized = !cli.unnormalized;
    opts.assert_free_lift = cli.assert_free_lift;
    opts.force_connected = cli.connected;
    opts
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    let atlas = load(cli)?;
    let opts = answer_options(cli, atlas.n);
    if let Some(path) = &cli.dump {
        let v = dump(&atlas, opts)?;
        std::fs::write(path, to_text(&v))
            .map_err(|e| Failure::new(EXIT_INTERNAL, format!("{}: {e}", path.display())))?;
    }
    match cli.command {
        Command::Poset => {
            let out = if cli.json { to_text(&render::poset_json(&atlas)) } else { render::poset_text(&atlas) };
            Ok((out, 0))
        }
        Command::Homology => {
            let answers = homology(cli, &atlas, opts)?;
            let out = if cli.json {
                match answers.as_slice() {
                    [one] if cli.coeff != CoeffSel::All => to_text(&one.to_json()),
                    _ => to_text(
                        &json!({ "answers": answers.iter().map(ComplementAnswer::to_json).collect::<Vec<_>>() }),
                    ),
                }
            } else {
                answers.iter().map(|a| render::answer_text(atlas.n, a)).collect::<Vec<_>>().join("\n")
            };
            Ok((out, 0))
        }
        Command::Certify => {
            let report = certify(
                &atlas,
                CertifyOptions { answer: opts, paranoid: cli.paranoid, inject_fault: cli.inject_fault },
            );
            let out = if cli.json {
                to_text(&report.to_json())
            } else {
                format!("{report}\n{}", render::answer_text(atlas.n, &report.answer))
            };
            Ok((out, if report.passed() { 0 } else { EXIT_CERTIFY }))
        }
        Command::Dump => Ok((to_text(&dump(&atlas, opts)?), 0)),
    }
}

fn homology(cli: &Cli, atlas: &CubeAtlas, opts: AnswerOptions) -> Result<Vec<ComplementAnswer>, Failure> {
    let n = atlas.n;
    if atlas.full_torus_member().is_some() {
        let rings = match cli.coeff {
            CoeffSel::One(c) => vec![c],
            CoeffSel::All => vec![Coeff::Q, Coeff::Z],
        };
        return Ok(rings.into_iter().map(|c| ComplementAnswer::empty_complement(n, c)).collect());
    }
    let wb = Workbench::new(atlas, opts)?;
    let rings = match cli.coeff {
        CoeffSel::One(c) => vec![c],
        CoeffSel::All => {
            let mut v = vec![Coeff::Q];
            v.extend(wb.candidates()?.into_iter().map(Coeff::Zp));
            v.push(Coeff::Z);
            v
        }
    };
    Ok(rings.into_iter().map(|c| wb.answer(c)).collect::<Result<_, _>>()?)
}

fn dump(atlas: &CubeAtlas, opts: AnswerOptions) -> Result<Value, Failure> {
    let mut out = json!({ "dim": atlas.n, "k": atlas.k });
    if let Some(i) = atlas.full_torus_member() {
        out["notes"] = json!([format!("subtori[{i}] equals T; no models built")]);
        return Ok(out);
    }
    out["e1"] = model_cohomology_e1(atlas).to_json();
    out["bin_general"] = bin_general_with(atlas, opts.bin, Splitting::Pushout)?.to_json();
    if atlas.strata_connected() {
        out["bin_connected"] = model_bin_connected(atlas, opts.bin)?.to_json();
    }
    Ok(out)
}
