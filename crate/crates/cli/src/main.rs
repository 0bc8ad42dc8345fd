use std::fmt::Debug;
use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cubecut::cover::{CoverBall, CoverError};
use cubecut::cube_complex::{CubeComplex, CubeError};
use cubecut::simplicial::{self, SimplicialError};
use cubecut::splittings::{
    candidate_subcomplexes, classify_cut, detect_periodic_2cut, search_ball, search_free_splitting,
    unfold_grushko, whitehead_lemma_certificate, CutReport, SplitError,
};
use cubecut::whitehead::{bounding_walls, whitehead_complex, WhiteheadError};
use cubecut::words::{
    double_complex, mapping_cylinder_complex, shenitzer_test, subdivide, whitehead_graph, CyclicWord,
    ShenitzerVerdict, WordError,
};
use cubecut::corpus;

#[derive(Parser)]
#[command(name = "cubecut", version, about = "Whitehead complexes and splittings of NPC cube complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Echoed in the report so property-test failures can be replayed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall-clock timing (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(clap::Args)]
struct Input {
    /// JSON complex, or `corpus:<name>` for a built-in one.
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a complex.
    Validate(Input),
    /// Link of a vertex.
    Link {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: String,
    },
    /// Check that every vertex link is flag.
    NpcCheck(Input),
    /// Whitehead complex of the hull of some ball vertices.
    Whitehead {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Base vertex id of the ball centre (default: first vertex).
        #[arg(long)]
        basepoint: Option<String>,
        /// Paths from the centre, separated by `;` (empty path = centre).
        #[arg(long, default_value = "")]
        at: String,
    },
    /// Link certificate for one-endedness.
    OneEndCert(Input),
    /// Search for a 0-cut at scale R.
    FreeSplit {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Unfold a square complex into its Grushko pieces.
    Grushko {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Least k-cut among candidate subcomplexes at scale R.
    FindCuts {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
    /// Search for a periodic 2-cut at scale R.
    #[command(name = "periodic-2cut")]
    Periodic2Cut {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        width_max: usize,
    },
    /// Classical Whitehead graph of a cyclic word.
    WordGraph(WordArgs),
    /// Shenitzer test for free splittings relative to a word.
    Shenitzer(WordArgs),
    /// Build the double (or mapping cylinder) complex of a word.
    BuildDouble {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long)]
        mapping_cylinder: bool,
    },
    /// DOT export of the 1-skeleton, or of a vertex link.
    ExportDot {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: Option<String>,
    },
}

#[derive(clap::Args)]
struct WordArgs {
    /// Word such as `abAB` (uppercase = inverse).
    #[arg(long)]
    word: String,
    #[arg(long)]
    rank: Option<usize>,
}

const EXIT_INVALID: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

struct Failure {
    code: String,
    message: String,
}

fn variant_name<E: Debug>(e: &E) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

macro_rules! failure_from {
    ($($ty:ty => $module:literal),* $(,)?) => {$(
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure { code: format!("{}::{}", $module, variant_name(&e)), message: e.to_string() }
            }
        }
    )*};
}

failure_from!(
    CubeError => "cube_complex",
    CoverError => "cover",
    SimplicialError => "simplicial",
    WhiteheadError => "whitehead",
    SplitError => "splittings",
    WordError => "words",
);

fn invalid(code: &str, message: impl Into<String>) -> Failure {
    Failure { code: code.into(), message: message.into() }
}

#[derive(Serialize)]
struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Report {
    command: String,
    input_digest: String,
    verdict: String,
    witnesses: Value,
    parameters: Parameters,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

struct Outcome {
    verdict: String,
    witnesses: Value,
    stabilized: Option<bool>,
    dot: Option<String>,
    inconclusive: bool,
}

impl Outcome {
    fn new(verdict: &str, witnesses: Value) -> Self {
        Outcome {
            verdict: verdict.into(),
            witnesses,
            stabilized: None,
            dot: None,
            inconclusive: false,
        }
    }
}

fn load(input: &Input, digest: &mut Vec<u8>) -> Result<CubeComplex, Failure> {
    if let Some(name) = input.input.strip_prefix("corpus:") {
        digest.extend_from_slice(input.input.as_bytes());
        return corpus::by_name(name).ok_or_else(|| {
            invalid("cli::UnknownCorpus", format!("unknown corpus entry {name:?}; known: {}", corpus::NAMES.join(", ")))
        });
    }
    let text = fs::read_to_string(&input.input)
        .map_err(|e| invalid("cli::Io", format!("cannot read {}: {e}", input.input)))?;
    digest.extend_from_slice(text.as_bytes());
    Ok(CubeComplex::from_json(&text)?)
}

fn vertex_index(x: &CubeComplex, id: &str) -> Result<usize, Failure> {
    x.vertex_index(id).ok_or_else(|| invalid("cli::UnknownVertex", format!("no vertex {id:?}")))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn cut_outcome(found: Option<CutReport>, verdict: &str) -> Outcome {
    match found {
        Some(r) => {
            let mut o = Outcome::new(verdict, to_value(&r));
            o.stabilized = Some(r.stabilized);
            o
        }
        None => Outcome {
            inconclusive: true,
            ..Outcome::new("inconclusive-at-scale", Value::Null)
        },
    }
}

fn word(args: &WordArgs, digest: &mut Vec<u8>) -> Result<CyclicWord, Failure> {
    digest.extend_from_slice(args.word.as_bytes());
    if let Some(r) = args.rank {
        digest.extend_from_slice(format!("/{r}").as_bytes());
    }
    Ok(CyclicWord::parse(&args.word, args.rank)?)
}

fn run(cli: &Cli, digest: &mut Vec<u8>, params: &mut Parameters) -> Result<Outcome, Failure> {
    Ok(match &cli.command {
        Command::Validate(input) => {
            let x = load(input, digest)?;
            let npc = x.check_npc();
            Outcome::new(
                "valid",
                json!({
                    "dimension": x.dimension(),
                    "cells": x.cell_counts(),
                    "euler_characteristic": x.euler_characteristic(),
                    "npc": npc.npc,
                    "h1": x.homology_h1().to_string(),
                    "hyperplanes": x.hyperplanes().len(),
                }),
            )
        }
        Command::Link { input, vertex } => {
            let x = load(input, digest)?;
            let lk = x.vertex_link(vertex_index(&x, vertex)?);
            let mut o = Outcome::new(
                if lk.is_flag() { "flag" } else { "not-flag" },
                json!({ "vertex": vertex, "link": lk, "components": lk.num_components() }),
            );
            o.dot = Some(simplicial::to_dot(&lk, &format!("link {vertex}")));
            o
        }
        Command::NpcCheck(input) => {
            let x = load(input, digest)?;
            let v = x.check_npc();
            Outcome::new(if v.npc { "npc" } else { "not-npc" }, to_value(&v))
        }
        Command::Whitehead { input, radius, basepoint, at } => {
            params.radius = Some(*radius);
            let x = load(input, digest)?;
            let base = match basepoint {
                Some(id) => vertex_index(&x, id)?,
                None => 0,
            };
            let ball = CoverBall::develop(&x, base, *radius)?;
            let mut gens = Vec::new();
            for path in at.split(';') {
                let w = ball
                    .parse_word(path)
                    .ok_or_else(|| invalid("cli::BadPath", format!("cannot parse path {path:?}")))?;
                gens.push(ball.follow(&w)?);
            }
            let y = ball.convex_hull(&gens)?;
            let walls = bounding_walls(&ball, &y)?;
            let wh = whitehead_complex(&ball, &y)?;
            let mut o = Outcome::new(
                "computed",
                json!({ "y": y, "bounding_walls": walls, "whitehead": wh }),
            );
            o.stabilized = Some(wh.stabilized);
            o.dot = Some(simplicial::to_dot(&wh.complex, "whitehead"));
            o
        }
        Command::OneEndCert(input) => {
            let x = load(input, digest)?;
            let c = whitehead_lemma_certificate(&x)?;
            Outcome::new(if c.is_certified() { "certified" } else { "inapplicable" }, to_value(&c))
        }
        Command::FreeSplit { input, radius } => {
            params.radius = Some(*radius);
            let x = load(input, digest)?;
            cut_outcome(search_free_splitting(&x, *radius)?, "free-splitting")
        }
        Command::Grushko { input, max_steps } => {
            let x = load(input, digest)?;
            let r = unfold_grushko(&x, *max_steps)?;
            Outcome::new("decomposed", to_value(&r))
        }
        Command::FindCuts { input, radius, k_max } => {
            params.radius = Some(*radius);
            params.k_max = Some(*k_max);
            let x = load(input, digest)?;
            let ball = search_ball(&x, *radius)?;
            let mut best: Option<CutReport> = None;
            for y in candidate_subcomplexes(&ball) {
                match classify_cut(&ball, &y, *k_max) {
                    Ok(Some(r)) if best.as_ref().is_none_or(|b| r.k < b.k) => best = Some(r),
                    Ok(_) | Err(SplitError::NotStabilized) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            let verdict = best.as_ref().map(|r| format!("{}-cut", r.k)).unwrap_or_default();
            cut_outcome(best, &verdict)
        }
        Command::Periodic2Cut { input, radius, width_max } => {
            params.radius = Some(*radius);
            params.width_max = Some(*width_max);
            let x = load(input, digest)?;
            match detect_periodic_2cut(&x, *radius, *width_max) {
                Ok(Some(cut)) => {
                    let mut o = Outcome::new("periodic-2-cut", to_value(&cut));
                    o.stabilized = Some(cut.report.stabilized);
                    o
                }
                Ok(None) => cut_outcome(None, ""),
                Err(SplitError::Preflight { k, report, .. }) => {
                    Outcome::new("preflight-failed", json!({ "k": k, "report": report }))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::WordGraph(args) => {
            let w = word(args, digest)?;
            let g = whitehead_graph(&w);
            let sd = subdivide(&g);
            let mut o = Outcome::new(
                "computed",
                json!({
                    "word": w.to_string(),
                    "edges": g.labelled_edges(),
                    "connected": sd.is_connected(),
                }),
            );
            o.dot = Some(g.to_dot(&w.to_string()));
            o
        }
        Command::Shenitzer(args) => {
            let w = word(args, digest)?;
            let v = shenitzer_test(&w);
            let verdict = match v {
                ShenitzerVerdict::NoFreeSplitting => "no-free-splitting",
                ShenitzerVerdict::Inconclusive { .. } => "inconclusive",
            };
            Outcome::new(verdict, to_value(&v))
        }
        Command::BuildDouble { word: args, mapping_cylinder } => {
            let w = word(args, digest)?;
            let x = if *mapping_cylinder { mapping_cylinder_complex(&w) } else { double_complex(&w) };
            let mut o = Outcome::new("built", serde_json::from_str(&x.to_json()).expect("valid JSON"));
            o.dot = Some(x.to_dot(&w.to_string()));
            o
        }
        Command::ExportDot { input, vertex } => {
            let x = load(input, digest)?;
            let dot = match vertex {
                Some(v) => simplicial::to_dot(&x.vertex_link(vertex_index(&x, v)?), &format!("link {v}")),
                None => x.to_dot("complex"),
            };
            let mut o = Outcome::new("exported", Value::String(dot.clone()));
            o.dot = Some(dot);
            o
        }
    })
}

fn text_lines(report: &Report) -> String {
    let mut out = format!("verdict: {}\ninput: {}\n", report.verdict, report.input_digest);
    if let Some(s) = report.stabilized {
        out.push_str(&format!("stabilized: {s}\n"));
    }
    if let Value::Object(map) = &report.witnesses {
        for (k, v) in map {
            out.push_str(&format!("{k}: {v}\n"));
        }
    } else if !report.witnesses.is_null() {
        out.push_str(&format!("{}\n", report.witnesses));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut digest = Vec::new();
    let mut params = Parameters {
        radius: None,
        k_max: None,
        width_max: None,
        seed: cli.seed,
    };
    let outcome = match run(&cli, &mut digest, &mut params) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, f.message);
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let report = Report {
        command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        input_digest: hex::encode(Sha256::digest(&digest)),
        verdict: outcome.verdict,
        witnesses: outcome.witnesses,
        parameters: params,
        stabilized: outcome.stabilized,
        timing_ms: cli.timing.then(|| start.elapsed().as_millis()),
    };
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable")),
        Format::Text => text_lines(&report),
        Format::Dot => match outcome.dot {
            Some(d) => d,
            None => {
                eprintln!("error[cli::NoDot]: this command has no DOT output");
                return ExitCode::from(EXIT_INVALID);
            }
        },
    };
    // a closed pipe downstream is not our failure
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if outcome.inconclusive {
        ExitCode::from(EXIT_INCONCLUSIVE)
    } else {
        ExitCode::SUCCESS
    }
}
