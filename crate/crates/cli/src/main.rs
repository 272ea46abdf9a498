use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use gmpa_core::datum::{construct_gamma, Datum};
use gmpa_core::examples::{build_example, Example};
use gmpa_core::galois::{galois_search, galois_theorem_check, SearchOutcome, UnitalView};
use gmpa_core::groupoid::{GroupTypeData, PartialGroupoidAction};
use gmpa_core::grouptype::iso_chain_check;
use gmpa_core::io::{block_codec, datum_document, gamma_document, ring_tables, Codec, Document, RingDesc, Workspace};
use gmpa_core::skew::SkewRing;
use gmpa_core::suite::{check_document, run_suite, Focus, Input, SuiteReport, BUILTINS};
use gmpa_core::{Budget, Error};

/// Exact checks for partial group actions on finite generalized matrix rings.
///
/// Exit status: 0 ok, 1 a check failed, 2 an internal cross-check disagreed,
/// 3 budget exceeded or unreadable input.
#[derive(Parser)]
#[command(name = "gmpa", version)]
struct Cli {
    /// Largest composite carrier to enumerate; overrides GMPA_BUDGET.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a document: `check FILE` runs everything, `check KIND FILE` one part.
    Check(CheckArgs),
    /// Build a derived object and write it as a document.
    Build {
        what: BuildKind,
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Export a skew ring even when it is not associative.
        #[arg(long)]
        allow_nonassociative: bool,
    },
    /// Galois verdicts for the ring and each component, with coordinate systems.
    Galois {
        file: PathBuf,
        /// Largest number of pairs searched; defaults to n |G|.
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// The skew groupoid ring isomorphism chain, stage by stage.
    Chain { file: PathBuf },
    /// Run the verification suite on built-in instances and documents.
    Suite {
        #[arg(long = "builtin")]
        builtins: Vec<String>,
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one JSON line per check.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Keep per-check timings in the JSON lines.
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        m_max: Option<usize>,
        /// List the built-in instances.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct CheckArgs {
    /// `[KIND] FILE` with KIND one of genmatrix, action, datum, morita, groupoid-action.
    #[arg(num_args = 1..=2, required = true)]
    target: Vec<String>,
    /// Block indices for `morita`, 1-based.
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Gamma,
    Datum,
    Skewring,
}

fn code_of(e: &Error) -> u8 {
    if e.is_bug_signal() {
        2
    } else if e.is_budget() || e.is_io() {
        3
    } else {
        1
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    println!("{}", json!({ "error": e.to_string() }));
    ExitCode::from(code_of(&e))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(Error::from)
}

fn finish(report: &SuiteReport, json_out: Option<&Path>, timings: bool) -> ExitCode {
    for r in report.records.iter().filter(|r| r.status != gmpa_core::suite::Status::Pass) {
        println!("{}", serde_json::to_string(r).expect("json"));
    }
    print!("{}", report.summary());
    if let Some(p) = json_out {
        if let Err(e) = write(p, &report.to_jsonl(timings)) {
            return fail(e);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn check(args: CheckArgs, budget: &Budget) -> ExitCode {
    let (kind, file) = match args.target.as_slice() {
        [f] => (None, f),
        [k, f] => (Some(k.as_str()), f),
        _ => unreachable!("clap bounds the arity"),
    };
    let focus = match kind {
        None => Focus::All,
        Some("genmatrix") => Focus::GenMatrix,
        Some("action") => Focus::Action,
        Some("datum") => Focus::Datum,
        Some("groupoid-action") => Focus::GroupoidAction,
        Some("morita") => match (args.i, args.j) {
            (Some(i), Some(j)) if i >= 1 && j >= 1 => Focus::Morita(i - 1, j - 1),
            _ => return fail(Error::InvalidParameters("morita needs --i and --j, both at least 1".into())),
        },
        Some(k) => return fail(Error::InvalidParameters(format!("unknown check kind {k:?}"))),
    };
    let doc = match Document::from_path(Path::new(file)) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    finish(&check_document(file, doc, focus, budget), args.json.as_deref(), false)
}

/// The datum of a document, from its `datum` section or its example, with a
/// codec for elements of the matrix ring.
fn load_datum(ws: &Workspace) -> Result<(Datum, Codec), Error> {
    if ws.doc.datum.is_some() {
        return Ok((ws.datum()?, ws.genmatrix()?.codec));
    }
    let spec = ws.doc.example.as_ref().ok_or_else(|| Error::Schema("no datum section and no example".into()))?;
    let d = match build_example(spec, &ws.budget)? {
        Example::Bundle(b) => b.induced.datum,
        Example::Sec63(s) => s.bundle.induced.datum,
        Example::GroupType { datum, .. } => datum.datum,
        Example::CoarseSkew(_) => return Err(Error::Schema("the coarse skew example has no datum".into())),
    };
    let codec = block_codec(&d.parent);
    Ok((d, codec))
}

fn load_groupoid_action(ws: &Workspace) -> Result<(PartialGroupoidAction, Option<GroupTypeData>), Error> {
    if ws.doc.groupoid_action.is_some() {
        return ws.groupoid_action();
    }
    let spec = ws.doc.example.as_ref().ok_or_else(|| Error::Schema("no groupoid_action section and no example".into()))?;
    match build_example(spec, &ws.budget)? {
        Example::GroupType { instance, .. } => Ok((instance.action, Some(instance.data))),
        _ => Err(Error::Schema("the example has no groupoid action".into())),
    }
}

fn build(what: BuildKind, file: &Path, out: &Path, allow: bool, budget: &Budget) -> Result<(), Error> {
    let ws = Workspace::from_path(file, *budget)?;
    let doc = match what {
        BuildKind::Gamma => {
            let (d, _) = load_datum(&ws)?;
            let g = construct_gamma(&d, budget)?;
            gamma_document(&d, &g, budget)?
        }
        BuildKind::Datum => datum_document(&load_datum(&ws)?.0, budget)?,
        BuildKind::Skewring => {
            let a = ws.partial_action()?;
            let s = SkewRing::of_group_action(&a, budget)?;
            let rep = s.verify_associativity();
            if !rep.is_ok() && !allow {
                return Err(Error::HypothesisFails(format!("skew ring is not associative: {rep}")));
            }
            let mut doc = Document::default();
            doc.rings.insert("skew".into(), RingDesc::Def(ring_tables(&s, budget)?));
            doc
        }
    };
    write(out, &doc.to_json())
}

fn system_json(o: &SearchOutcome, codec: &Codec) -> Value {
    match o {
        SearchOutcome::Found(s) => Value::Array(s.pairs.iter().map(|&(a, b)| json!([codec.write(a), codec.write(b)])).collect()),
        _ => Value::Null,
    }
}

fn galois(file: &Path, m_max: Option<usize>, budget: &Budget) -> Result<u8, Error> {
    let ws = Workspace::from_path(file, *budget)?;
    let (d, codec) = load_datum(&ws)?;
    let gamma = construct_gamma(&d, budget)?;
    let view = UnitalView::for_gamma(&d, &gamma, budget)?;
    let m = m_max.unwrap_or(d.size() * d.group.order());
    let t = galois_theorem_check(&d, &view, m, budget)?;
    let ambient = galois_search(&view, m, budget)?;
    let mut components = Vec::new();
    for (i, a) in d.actions.iter().enumerate() {
        let cv = UnitalView::new(a.clone())?;
        let c = Codec::Plain(d.parent.ring(i).order());
        components.push(system_json(&galois_search(&cv, m, budget)?, &c));
    }
    let out = json!({
        "m_max": m,
        "ambient": t.ambient,
        "components": t.components,
        "agree": t.agree,
        "projection_uniform": t.projection_uniform,
        "ambient_system": system_json(&ambient, &codec),
        "component_systems": components,
        "lifted_system": t.lifted.as_ref().map(|s| s.pairs.iter().map(|&(a, b)| json!([codec.write(a), codec.write(b)])).collect::<Vec<_>>()),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(if !t.agree {
        2
    } else if !t.ambient.is_decided() || t.components.iter().any(|v| !v.is_decided()) {
        3
    } else {
        0
    })
}

fn chain(file: &Path, budget: &Budget) -> Result<(), Error> {
    let ws = Workspace::from_path(file, *budget)?;
    let (a, data) = load_groupoid_action(&ws)?;
    let data = data.ok_or_else(|| Error::NotGroupType("no base object with full-domain morphisms".into()))?;
    let rep = iso_chain_check(&a, &data, budget)?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("json"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut budget = Budget::from_env();
    if let Some(b) = cli.budget {
        budget.max_elements = b;
    }
    match cli.cmd {
        Cmd::Check(args) => check(args, &budget),
        Cmd::Build { what, file, output, allow_nonassociative } => match build(what, &file, &output, allow_nonassociative, &budget) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Cmd::Galois { file, m_max } => match galois(&file, m_max, &budget) {
            Ok(c) => ExitCode::from(c),
            Err(e) => fail(e),
        },
        Cmd::Chain { file } => match chain(&file, &budget) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Cmd::Suite { builtins, files, seed, json, timings, m_max, list } => {
            if list {
                for (name, what) in BUILTINS {
                    println!("{name:<14} {what}");
                }
                return ExitCode::SUCCESS;
            }
            let mut inputs: Vec<Input> = builtins.into_iter().map(Input::Builtin).collect();
            inputs.extend(files.into_iter().map(Input::File));
            if inputs.is_empty() {
                inputs.push(Input::Builtin("smoke".into()));
            }
            finish(&run_suite(&inputs, seed, m_max, &budget), json.as_deref(), timings)
        }
    }
}
