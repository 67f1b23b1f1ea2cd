//! Command line front end. Every subcommand builds one [`Report`] holding
//! both the text and the JSON rendering, so the two formats carry the same
//! verdicts and witnesses.
//!
//! Exit codes: 0 success or property holds, 1 property fails, 2 usage
//! error, 3 malformed input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::FiniteAlgebra;
use crate::axioms::{check_diagonal, check_top_simple, AxiomProfile};
use crate::finder::{self, counts_by_size, EnumerationTask, FinderError};
use crate::frame::{algebra_to_frame, frame_to_algebra, RelevanceFrame};
use crate::game::gamma::{GammaMove, GammaOutcome};
use crate::game::pebble::MoveRecord;
use crate::game::sigma::{sigma_formula, DEFAULT_SIGMA_LIMIT};
use crate::game::{decide_gamma, solve_pebble_game, FrameNetwork, Winner};
use crate::io::{self, IoError, Structure};
use crate::models::catalog::{catalog, catalog_files};
use crate::models::representation::verify_representation;
use crate::models::{build_wk, WkAlgebra};
use crate::report::{AxiomReport, Outcome, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wkra", version, about = "Finite weakening relation algebras: axioms, frames, games, models")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for enumeration (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an algebra (or the algebra of a frame) against an axiom profile.
    Check {
        file: PathBuf,
        /// `base`, `wkra2`, `wkra3`, `assoc`, `diagonal`, `all`, or a `+` list.
        #[arg(long, default_value = "base")]
        profile: AxiomProfile,
    },
    /// Convert an algebra to its frame of join-irreducibles.
    ToFrame {
        file: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Convert a frame to its algebra of downsets.
    ToAlgebra {
        file: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Solve the pebble game Gⁿ, or decide the bounded game Γ_r.
    Game {
        file: PathBuf,
        #[arg(long)]
        pebbles: Option<usize>,
        /// Solve Gⁿ on the frame by fixpoint.
        #[arg(long, conflicts_with = "rounds", requires = "pebbles")]
        solve: bool,
        /// Decide Γ_r on the algebra by exhaustive search.
        #[arg(long)]
        rounds: Option<usize>,
        /// Write the certificate or losing play as JSON.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Enumerate algebras up to isomorphism.
    Enumerate {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = "base")]
        profile: AxiomProfile,
        /// Directory for `<canonical key>.json` files.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build wk(X) for a poset file.
    Wk {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Verify a representation map.
    VerifyRep {
        #[arg(long)]
        map: PathBuf,
    },
    /// List the built-in catalog.
    Catalog {
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Print the sentence σₙ.
    Sigma {
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SIGMA_LIMIT)]
        limit: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Evaluate the discriminator term on all triples.
    Discriminator { file: PathBuf },
}

/// Rendered result of one command.
struct Report {
    code: i32,
    text: String,
    json: Value,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Write { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Runs the tool on `args` (including the program name), printing to
/// standard output, and returns the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match execute(&cli.command) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("json")),
            }
            report.code
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn execute(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Check { file, profile } => check(file, *profile),
        Command::ToFrame { file, emit } => to_frame(file, emit.as_deref()),
        Command::ToAlgebra { file, emit } => to_algebra(file, emit.as_deref()),
        Command::Game { file, pebbles, solve, rounds, transcript } => {
            game(file, *pebbles, *solve, *rounds, transcript.as_deref())
        }
        Command::Enumerate { size, profile, emit } => enumerate(*size, *profile, emit.as_deref()),
        Command::Wk { poset, emit } => wk(poset, emit.as_deref()),
        Command::VerifyRep { map } => verify_rep(map),
        Command::Catalog { emit } => list_catalog(emit.as_deref()),
        Command::Sigma { n, limit, emit } => sigma(*n, *limit, emit.as_deref()),
        Command::Discriminator { file } => discriminator(file),
    }
}

fn code_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn load_algebra_like(path: &Path) -> Result<FiniteAlgebra, Failure> {
    match io::load_structure(path)? {
        Structure::Algebra(a) => Ok(a),
        Structure::Frame(f) => {
            frame_to_algebra(&f).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
    }
}

fn load_frame_like(path: &Path) -> Result<RelevanceFrame, Failure> {
    Ok(match io::load_structure(path)? {
        Structure::Algebra(a) => algebra_to_frame(&a),
        Structure::Frame(f) => f,
    })
}

fn named_witness(w: &Witness, names: &[String]) -> Value {
    let map: serde_json::Map<String, Value> = w
        .vars
        .iter()
        .map(|(v, e)| (v.clone(), Value::String(names.get(*e).cloned().unwrap_or_else(|| "?".into()))))
        .collect();
    Value::Object(map)
}

fn report_json(report: &AxiomReport, names: &[String]) -> Value {
    report
        .checks
        .iter()
        .map(|c| match &c.outcome {
            Outcome::Pass => json!({"label": c.label, "verdict": "pass"}),
            Outcome::Fail { witness } => {
                json!({"label": c.label, "verdict": "fail", "witness": named_witness(witness, names)})
            }
        })
        .collect()
}

fn check(file: &Path, profile: AxiomProfile) -> Result<Report, Failure> {
    let alg = load_algebra_like(file)?;
    let report = profile.check(&alg);
    let passed = report.passed();
    let mut text = format!("{} ({} elements), profile {profile}\n", alg.name(), alg.size());
    text.push_str(&report.render(alg.elements()));
    let _ = writeln!(text, "{}", if passed { "all checks pass" } else { "some checks fail" });
    let json = json!({
        "algebra": alg.name(),
        "profile": profile.to_string(),
        "passed": passed,
        "checks": report_json(&report, alg.elements()),
    });
    Ok(Report { code: code_for(passed), text, json })
}

fn frame_summary(f: &RelevanceFrame) -> String {
    let idents: Vec<&str> = (0..f.len()).filter(|&p| f.ident(p)).map(|p| f.points[p].as_str()).collect();
    let hats: Vec<String> = (0..f.len()).map(|p| format!("{}^={}", f.points[p], f.points[f.hat(p)])).collect();
    format!(
        "{}: {} points [{}]\n  hat: {}\n  I: {{{}}}\n  R: {} triples\n",
        f.name,
        f.len(),
        f.points.join(", "),
        hats.join(", "),
        idents.join(", "),
        f.triples().count()
    )
}

fn to_frame(file: &Path, emit: Option<&Path>) -> Result<Report, Failure> {
    let alg = load_algebra_like(file)?;
    let f = algebra_to_frame(&alg);
    if let Some(out) = emit {
        io::save_frame(out, &f)?;
    }
    let text = match emit {
        Some(out) => format!("{}wrote {}\n", frame_summary(&f), out.display()),
        None => format!("{}\n", serde_json::to_string_pretty(&f.to_raw()).expect("json")),
    };
    Ok(Report { code: EXIT_OK, text, json: serde_json::to_value(f.to_raw()).expect("json") })
}

fn to_algebra(file: &Path, emit: Option<&Path>) -> Result<Report, Failure> {
    let f = io::load_frame(file)?;
    let alg = frame_to_algebra(&f).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    if let Some(out) = emit {
        io::save_algebra(out, &alg)?;
    }
    let text = match emit {
        Some(out) => format!("{}: {} elements\nwrote {}\n", alg.name(), alg.size(), out.display()),
        None => format!("{}\n", serde_json::to_string_pretty(&alg.to_raw()).expect("json")),
    };
    Ok(Report { code: EXIT_OK, text, json: serde_json::to_value(alg.to_raw()).expect("json") })
}

fn frame_net_json(f: &RelevanceFrame, n: &FrameNetwork) -> Value {
    (0..n.nodes).map(|x| (0..n.nodes).map(|y| f.points[n.label(x, y)].clone()).collect::<Vec<_>>()).collect()
}

fn pebble_moves_json(f: &RelevanceFrame, moves: &[MoveRecord]) -> Value {
    let net = |n: Option<&FrameNetwork>| n.map(|m| frame_net_json(f, m)).unwrap_or(Value::Null);
    moves
        .iter()
        .map(|m| match m {
            MoveRecord::Init { point, network_after } => json!({
                "move": "init",
                "point": f.points[*point],
                "network-after": net(network_after.as_ref()),
            }),
            MoveRecord::Witness { demand, network_after } => json!({
                "move": "witness",
                "keep": demand.subset,
                "x": demand.x,
                "y": demand.y,
                "b": f.points[demand.b],
                "c": f.points[demand.c],
                "network-after": net(network_after.as_ref()),
            }),
        })
        .collect()
}

fn gamma_move_json(alg: &FiniteAlgebra, mv: &GammaMove) -> Value {
    let n = |e: usize| alg.element_name(e).to_string();
    match *mv {
        GammaMove::Join { x, y, t, a, b } => json!({"move": "join", "x": x, "y": y, "t": n(t), "a": n(a), "b": n(b)}),
        GammaMove::Involution { x, y, a } => json!({"move": "involution", "x": x, "y": y, "a": n(a)}),
        GammaMove::Composition { x, y, z, t, t2 } => {
            json!({"move": "composition", "x": x, "y": y, "z": z, "t": n(t), "t2": n(t2)})
        }
        GammaMove::Witness { x, y, t, b, c } => json!({"move": "witness", "x": x, "y": y, "t": n(t), "b": n(b), "c": n(c)}),
    }
}

fn write_transcript(path: Option<&Path>, value: &Value) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(value).expect("json");
        std::fs::write(p, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn game(
    file: &Path,
    pebbles: Option<usize>,
    solve: bool,
    rounds: Option<usize>,
    transcript: Option<&Path>,
) -> Result<Report, Failure> {
    match (solve, rounds) {
        (true, _) => {
            let n = pebbles.expect("clap requires --pebbles with --solve");
            if n < 2 {
                return Err(Failure::Usage("the pebble game needs at least two pebbles".into()));
            }
            let f = load_frame_like(file)?;
            let v = solve_pebble_game(&f, n);
            let verdict = match v.winner {
                Winner::Exists => "∃ wins",
                Winner::Forall => "∀ wins",
            };
            let mut text = format!("G^{n} on {}: {verdict}\n", f.name);
            let certificate = match v.winner {
                Winner::Exists => {
                    let _ = writeln!(text, "  surviving basis: {} networks, {} deletion rounds", v.basis.len(), v.rounds);
                    json!({"basis": v.basis.iter().map(|m| frame_net_json(&f, m)).collect::<Vec<_>>()})
                }
                Winner::Forall => {
                    for m in &v.transcript {
                        let after = m.network_after().map(|n| n.render(&f)).unwrap_or_else(|| "no consistent answer".into());
                        match m {
                            MoveRecord::Init { point, .. } => {
                                let _ = writeln!(text, "  ∀ init {} -> {after}", f.points[*point]);
                            }
                            MoveRecord::Witness { demand: d, .. } => {
                                let _ = writeln!(
                                    text,
                                    "  ∀ keeps {:?}, witness ({}, {}) on ({}, {}) -> {after}",
                                    d.subset, f.points[d.b], f.points[d.c], d.x, d.y
                                );
                            }
                        }
                    }
                    json!({"transcript": pebble_moves_json(&f, &v.transcript)})
                }
            };
            write_transcript(transcript, &certificate)?;
            let json = json!({
                "game": "pebble",
                "frame": f.name,
                "pebbles": n,
                "winner": v.winner,
                "verdict": verdict,
                "rounds": v.rounds,
                "certificate": certificate,
            });
            Ok(Report { code: code_for(v.winner == Winner::Exists), text, json })
        }
        (false, Some(r)) => {
            let alg = load_algebra_like(file)?;
            let v = decide_gamma(&alg, r);
            let mut text = format!("Γ_{r} on {}: {}\n", alg.name(), v.outcome);
            if let Some(reason) = &v.reason {
                let _ = writeln!(text, "  {reason}");
            }
            let mut plays = Vec::new();
            if let Some((a, b)) = v.pair {
                let _ = writeln!(text, "  ∀ initialises with {} ≰ {}", alg.element_name(a), alg.element_name(b));
                for (i, play) in v.transcripts.iter().enumerate() {
                    let _ = writeln!(text, "  from the {}-node network:", i + 1);
                    let mut moves = Vec::new();
                    if play.is_empty() {
                        let _ = writeln!(text, "    already inconsistent");
                    }
                    for step in play {
                        let mv = gamma_move_json(&alg, &step.mv);
                        let _ = writeln!(text, "    {mv} -> consistent: {}", step.consistent);
                        let mut entry = mv;
                        entry["network-after"] = json!(step.network_after);
                        moves.push(entry);
                    }
                    plays.push(Value::Array(moves));
                }
            }
            let json = json!({
                "game": "gamma",
                "algebra": alg.name(),
                "rounds": r,
                "outcome": v.outcome,
                "verdict": v.outcome.to_string(),
                "pair": v.pair.map(|(a, b)| [alg.element_name(a), alg.element_name(b)]),
                "plays": plays,
                "states": v.states,
            });
            write_transcript(transcript, &json)?;
            Ok(Report { code: code_for(v.outcome == GammaOutcome::Exists), text, json })
        }
        (false, None) => Err(Failure::Usage("game needs --solve (with --pebbles) or --rounds".into())),
    }
}

fn enumerate(size: usize, profile: AxiomProfile, emit: Option<&Path>) -> Result<Report, Failure> {
    let task = EnumerationTask { max_size: size, profile, emit: emit.map(Path::to_path_buf) };
    let found = finder::enumerate(&task).map_err(|e| match e {
        FinderError::Io { .. } => Failure::Usage(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    })?;
    if let Some(dir) = emit {
        finder::emit(dir, &found).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let counts = counts_by_size(&found);
    let diagonal = found.iter().filter(|f| check_diagonal(&f.algebra)).count();
    let mut text = format!("profile {profile}, size ≤ {size}\n");
    for (k, c) in &counts {
        let _ = writeln!(text, "size {k}: {c}");
    }
    let _ = writeln!(text, "diagonal: {diagonal}");
    let _ = writeln!(text, "total: {}", found.len());
    let json = json!({
        "profile": profile.to_string(),
        "max_size": size,
        "counts": counts.iter().map(|(k, c)| (k.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "diagonal": diagonal,
        "total": found.len(),
        "keys": found.iter().map(|f| f.key.to_hex()).collect::<Vec<_>>(),
    });
    Ok(Report { code: EXIT_OK, text, json })
}

fn wk(poset: &Path, emit: Option<&Path>) -> Result<Report, Failure> {
    let p = io::load_poset(poset)?;
    let bound = io::wk_bound_from_env().map_err(|e| Failure::Usage(e.to_string()))?;
    let WkAlgebra { algebra, .. } = build_wk(&p, bound).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(out) = emit {
        io::save_algebra(out, &algebra)?;
    }
    let mut text = format!("{}: {} elements\n  {}\n", algebra.name(), algebra.size(), algebra.elements().join(", "));
    if let Some(out) = emit {
        let _ = writeln!(text, "wrote {}", out.display());
    }
    let json = json!({"algebra": algebra.to_raw()});
    Ok(Report { code: EXIT_OK, text, json })
}

fn verify_rep(map: &Path) -> Result<Report, Failure> {
    let (alg, rep) = io::load_rep_map(map)?;
    let result = verify_representation(&alg, &rep).map_err(|e| Failure::Input(format!("{}: {e}", map.display())))?;
    let (text, json, ok) = match result {
        Ok(()) => (
            format!("{}: representation verifies\n", alg.name()),
            json!({"algebra": alg.name(), "verified": true}),
            true,
        ),
        Err(fail) => (
            format!(
                "{}: representation fails `{}` [{}]\n",
                alg.name(),
                fail.condition,
                fail.witness.render(alg.elements())
            ),
            json!({
                "algebra": alg.name(),
                "verified": false,
                "condition": fail.condition,
                "witness": named_witness(&fail.witness, alg.elements()),
            }),
            false,
        ),
    };
    Ok(Report { code: code_for(ok), text, json })
}

fn list_catalog(emit: Option<&Path>) -> Result<Report, Failure> {
    if let Some(dir) = emit {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        for (file, raw) in catalog_files() {
            let text = serde_json::to_string_pretty(&raw).expect("json") + "\n";
            let path = dir.join(file);
            std::fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
    }
    let mut text = String::new();
    let mut rows = Vec::new();
    for a in catalog() {
        let phi3 = AxiomProfile::wkra3().with_associativity().admits(&a);
        let diag = check_diagonal(&a);
        let _ = writeln!(
            text,
            "{:<6} {} elements  wkra3+assoc: {}  diagonal: {}  [{}]",
            a.name(),
            a.size(),
            phi3,
            diag,
            a.elements().join(", ")
        );
        rows.push(json!({"name": a.name(), "size": a.size(), "wkra3_assoc": phi3, "diagonal": diag, "elements": a.elements()}));
    }
    if let Some(dir) = emit {
        let _ = writeln!(text, "wrote {} files to {}", rows.len(), dir.display());
    }
    Ok(Report { code: EXIT_OK, text, json: Value::Array(rows) })
}

fn sigma(n: usize, limit: usize, emit: Option<&Path>) -> Result<Report, Failure> {
    match sigma_formula(n, limit) {
        Ok(f) => {
            let body = f.to_string();
            let size = f.size();
            let text = match emit {
                Some(out) => {
                    std::fs::write(out, format!("{body}\n"))
                        .map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
                    format!("sigma_{n}: {size} formula nodes, wrote {}\n", out.display())
                }
                None => format!("{body}\n"),
            };
            Ok(Report { code: EXIT_OK, text, json: json!({"n": n, "size": size, "formula": body}) })
        }
        Err(e) => Ok(Report {
            code: EXIT_FAIL,
            text: format!("{e}\n"),
            json: json!({"n": n, "error": e.to_string()}),
        }),
    }
}

fn discriminator(file: &Path) -> Result<Report, Failure> {
    let alg = load_algebra_like(file)?;
    let m = alg.size();
    let mut bad = Vec::new();
    for (a, b, c) in itertools::iproduct!(0..m, 0..m, 0..m) {
        let want = if a == b { c } else { a };
        let got = alg.eval_discriminator_term(a, b, c);
        if got != want {
            bad.push((a, b, c, got, want));
        }
    }
    let diagonal = check_diagonal(&alg);
    let simple = check_top_simple(&alg);
    let n = |e: usize| alg.element_name(e);
    let mut text = format!(
        "{}: diagonal {diagonal}, top-simple {simple}, d(a,b,c) discriminates on {}/{} triples\n",
        alg.name(),
        m * m * m - bad.len(),
        m * m * m
    );
    if let Some(&(a, b, c, got, want)) = bad.first() {
        let _ = writeln!(text, "  first failure: d({}, {}, {}) = {}, expected {}", n(a), n(b), n(c), n(got), n(want));
    }
    let json = json!({
        "algebra": alg.name(),
        "diagonal": diagonal,
        "top_simple": simple,
        "triples": m * m * m,
        "failures": bad.len(),
        "first_failure": bad.first().map(|&(a, b, c, got, want)| json!({"a": n(a), "b": n(b), "c": n(c), "got": n(got), "expected": n(want)})),
    });
    Ok(Report { code: code_for(bad.is_empty()), text, json })
}
