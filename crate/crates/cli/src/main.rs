use std::error::Error;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use discocat_core::diagrams::{render_baez_stay, render_cancellation};
use discocat_core::distributional::{
    build_model, build_verbs, cooccurrence, load_triples, Corpus, VectorSpaceModel, VerbMethod,
    Weighting,
};
use discocat_core::evaluation::{load_dataset, report, Composer};
use discocat_core::lexicon::{tokenize_sentence, Grammar};
use discocat_core::semantics::{meaning, Logic, SemanticsError};
use discocat_core::{lambek, pregroup};

/// Exit status for a well-formed but ungrammatical sentence.
const UNGRAMMATICAL: u8 = 1;
/// Exit status for I/O, validation and other operational failures.
const FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "discocat", version, about = "Type-logical parsing and tensor semantics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide grammaticality and print the reduction or derivation.
    Parse(ParseArgs),
    /// Render a cancellation (pregroup) or clasp (Lambek) diagram as SVG.
    Diagram(ParseArgs),
    /// Count a corpus into a vector space model.
    BuildModel(BuildModelArgs),
    /// Add verb tensors to a model from a triples file.
    BuildVerbs(BuildVerbsArgs),
    /// Compute a sentence meaning.
    Meaning(MeaningArgs),
    /// Score a sentence-pair dataset and report rank correlations.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LogicArg {
    Pregroup,
    Lambek,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::Pregroup => Logic::Pregroup,
            LogicArg::Lambek => Logic::Lambek,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cat1,
    Cat2,
}

impl From<MethodArg> for VerbMethod {
    fn from(m: MethodArg) -> VerbMethod {
        match m {
            MethodArg::Cat1 => VerbMethod::Cat1,
            MethodArg::Cat2 => VerbMethod::Cat2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Tfidf,
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Args)]
struct ParseArgs {
    sentence: String,
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long, value_enum, default_value = "pregroup")]
    logic: LogicArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct BuildModelArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 2000)]
    basis_size: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, value_enum, default_value = "tfidf")]
    weighting: WeightingArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildVerbsArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    triples: PathBuf,
    /// Build only this construction (default: both).
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Sum raw corpus counts instead of the model's weighted vectors for
    /// cat1; needs `--corpus`.
    #[arg(long, requires = "corpus")]
    raw: bool,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Output path (default: overwrite `--model`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeaningArgs {
    sentence: String,
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "pregroup")]
    logic: LogicArg,
    #[arg(long, value_enum, default_value = "cat1")]
    method: MethodArg,
    #[arg(long)]
    emit_plan: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated list of add, multiply, cat1, cat2, baseline.
    #[arg(long, value_delimiter = ',', default_value = "baseline,add,multiply,cat1,cat2")]
    composers: Vec<Composer>,
    #[arg(long, value_enum, default_value = "pregroup")]
    logic: LogicArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

type Res<T> = Result<T, Box<dyn Error>>;

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render(v: &Value, pretty: bool) -> String {
    let mut s = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("json value");
    s.push('\n');
    s
}

fn load_grammar(path: &Path) -> Res<Grammar> {
    Grammar::load(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_model(path: &Path) -> Res<VectorSpaceModel> {
    VectorSpaceModel::load(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn ungrammatical(pretty: bool) -> Res<u8> {
    eprintln!("ungrammatical");
    print!("{}", render(&json!({ "grammatical": false }), pretty));
    Ok(UNGRAMMATICAL)
}

fn cmd_parse(a: &ParseArgs) -> Res<u8> {
    let g = load_grammar(&a.grammar)?;
    let words = tokenize_sentence(&a.sentence);
    let v = match a.logic {
        LogicArg::Pregroup => {
            let Some(p) = pregroup::parse(&g, &words).map_err(|w| format!("unknown word `{w}`"))?
            else {
                return ungrammatical(a.pretty);
            };
            json!({
                "grammatical": true,
                "logic": "pregroup",
                "target": p.target.to_string(),
                "words": words,
                "types": p.entries.iter().map(|e| e.lambek_type.to_string()).collect::<Vec<_>>(),
                "reduction": p.reduction,
            })
        }
        LogicArg::Lambek => {
            let Some(p) = lambek::parse(&g, &words).map_err(|w| format!("unknown word `{w}`"))?
            else {
                return ungrammatical(a.pretty);
            };
            json!({
                "grammatical": true,
                "logic": "lambek",
                "target": p.target.to_string(),
                "words": words,
                "types": p.entries.iter().map(|e| e.lambek_type.to_string()).collect::<Vec<_>>(),
                "derivation": p.derivation.to_string(),
            })
        }
    };
    emit(a.out.as_deref(), &render(&v, a.pretty))?;
    Ok(0)
}

fn cmd_diagram(a: &ParseArgs) -> Res<u8> {
    let g = load_grammar(&a.grammar)?;
    let words = tokenize_sentence(&a.sentence);
    let svg = match a.logic {
        LogicArg::Pregroup => {
            let Some(p) = pregroup::parse(&g, &words).map_err(|w| format!("unknown word `{w}`"))?
            else {
                return ungrammatical(false);
            };
            render_cancellation(&p.reduction, &words, &p.word_spans)?
        }
        LogicArg::Lambek => {
            let Some(p) = lambek::parse(&g, &words).map_err(|w| format!("unknown word `{w}`"))?
            else {
                return ungrammatical(false);
            };
            let labels: Vec<String> = p
                .entries
                .iter()
                .flat_map(|e| {
                    let n = e.lambek_type.flatten().len();
                    std::iter::repeat_n(e.word.clone(), n)
                })
                .collect();
            render_baez_stay(&p.derivation, &labels)?
        }
    };
    emit(a.out.as_deref(), &svg)?;
    Ok(0)
}

fn cmd_build_model(a: &BuildModelArgs) -> Res<u8> {
    let corpus = Corpus::load(&a.corpus)?;
    let weighting = match a.weighting {
        WeightingArg::Tfidf => Weighting::Tfidf,
        WeightingArg::Raw => Weighting::Raw,
    };
    let model = build_model(&corpus, a.basis_size, a.window, weighting)?;
    emit(a.out.as_deref(), &model.to_json())?;
    Ok(0)
}

fn cmd_build_verbs(a: &BuildVerbsArgs) -> Res<u8> {
    let mut model = load_model(&a.model)?;
    let triples = load_triples(&a.triples)?;
    let raw = match (&a.corpus, a.raw) {
        (Some(c), true) => Some(cooccurrence(
            &Corpus::load(c)?,
            &model.basis,
            model.meta.window,
        )?),
        _ => None,
    };
    let before = model.verbs.clone();
    build_verbs(&mut model, &triples, raw.as_ref())?;
    if let Some(m) = a.method {
        // Keep previously built tensors of the other construction.
        let keep: VerbMethod = m.into();
        for (word, list) in model.verbs.iter_mut() {
            for v in list.iter_mut() {
                let old = before
                    .get(word)
                    .and_then(|l| l.iter().find(|o| o.arity == v.arity));
                match keep {
                    VerbMethod::Cat1 => v.cat2 = old.and_then(|o| o.cat2.clone()),
                    VerbMethod::Cat2 => v.cat1 = old.and_then(|o| o.cat1.clone()),
                }
            }
        }
    }
    let out = a.out.as_deref().unwrap_or(&a.model);
    model.save(out)?;
    Ok(0)
}

fn cmd_meaning(a: &MeaningArgs) -> Res<u8> {
    let g = load_grammar(&a.grammar)?;
    let model = load_model(&a.model)?;
    let words = tokenize_sentence(&a.sentence);
    let view = model.view(a.method.into());
    let m = match meaning(&words, &g, &view, a.logic.into()) {
        Ok(m) => m,
        Err(SemanticsError::Ungrammatical) => return ungrammatical(a.pretty),
        Err(e) => return Err(e.into()),
    };
    let mut v = json!({ "vector": m.vector });
    if a.emit_plan {
        v["plan"] = serde_json::to_value(&m.plan)?;
    }
    emit(a.out.as_deref(), &render(&v, a.pretty))?;
    Ok(0)
}

fn cmd_eval(a: &EvalArgs) -> Res<u8> {
    let dataset = load_dataset(&a.dataset)?;
    let g = load_grammar(&a.grammar)?;
    let model = load_model(&a.model)?;
    let r = report(&dataset, &g, &model, &a.composers, a.logic.into());
    for row in &r.rows {
        for s in &row.skipped {
            eprintln!("warning: {} skipped row {}: {}", row.composer, s.row + 1, s.reason);
        }
    }
    let text = match a.format {
        FormatArg::Json => r.to_json(a.pretty),
        FormatArg::Text => r.to_text(),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Diagram(a) => cmd_diagram(a),
        Command::BuildModel(a) => cmd_build_model(a),
        Command::BuildVerbs(a) => cmd_build_verbs(a),
        Command::Meaning(a) => cmd_meaning(a),
        Command::Eval(a) => cmd_eval(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FAILURE)
        }
    }
}
