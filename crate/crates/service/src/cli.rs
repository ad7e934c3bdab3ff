//! The `vbd` command line. Every subcommand runs against the same core the
//! HTTP service uses.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vbd_core::dss::{expand_name, CaseManager, CaseStore, DssError, Observation, PatientCase, Suggestions};
use vbd_core::kb::{kb_report, load_graphs, load_kb, load_queries, KnowledgeBase, BENCH_DIR, QUERIES_DIR};
use vbd_core::metrics::{MetricsReport, Population};
use vbd_core::par::ExecMode;
use vbd_core::query::{bench, execute, parse_query_with};
use vbd_core::rules::{apply_rules_with, EngineOptions, Strategy};
use vbd_core::store::{Graph, Triple};
use vbd_core::text::{emit_rdf, extract_text};
use vbd_core::turtle::{parse_turtle_into, serialize_turtle};

use crate::api::{self, AppState};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_LOAD: u8 = 3;
pub const EXIT_FINDINGS: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "vbd", version, about = "Vector-borne disease decision support")]
pub struct Cli {
    /// Knowledge-base directory.
    #[arg(long, global = true, env = "VBD_KB", default_value = "kb")]
    pub kb: PathBuf,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the knowledge base and print its census.
    Load,
    /// Run the rule corpus over facts files and print derived facts with provenance.
    Infer(InferArgs),
    /// Run a query file over datasets.
    Query(QueryArgs),
    /// Ontology quality metrics.
    Metrics(MetricsArgs),
    /// Extract clinical facts from notes.
    Extract(ExtractArgs),
    /// Time the benchmark queries on each dataset and on their union.
    Bench(BenchArgs),
    /// Work with stored patient cases.
    Case(CaseArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    SemiNaive,
    Naive,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Turtle facts files; the KB ontology is always included.
    #[arg(long, required = true, num_args = 1..)]
    pub facts: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "semi-naive")]
    pub strategy: StrategyArg,
    /// Evaluate rules on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long = "q")]
    pub query: PathBuf,
    /// Turtle datasets. Defaults to the KB ontology plus fixtures.
    #[arg(long = "data", num_args = 1..)]
    pub data: Vec<PathBuf>,
    /// Also run on the union of the datasets and print timing rows.
    #[arg(long)]
    pub combined: bool,
    #[arg(long, default_value_t = 9)]
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PopulationArg {
    Inferred,
    Direct,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Which members make a class populated.
    #[arg(long, value_enum, default_value = "inferred")]
    pub population: PopulationArg,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// A note file, or a directory of `.txt` notes.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Patient IRI or name, e.g. `:p9`.
    #[arg(long)]
    pub patient: String,
    /// Lexicon directory. Defaults to the KB lexicon.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Write Turtle here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 9)]
    pub reps: usize,
    /// Query directory. Defaults to `<kb>/queries`.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Dataset directory. Defaults to `<kb>/bench`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Write the tab-separated report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    /// Case store directory.
    #[arg(long, env = "VBD_STORE", default_value = "cases")]
    pub store: PathBuf,
    #[command(subcommand)]
    pub action: CaseAction,
}

#[derive(Debug, Subcommand)]
pub enum CaseAction {
    /// Open a new case.
    Create {
        id: String,
        #[arg(long)]
        patient: Option<String>,
        /// Demographic facts as `predicate=value`.
        #[arg(long = "demo")]
        demographics: Vec<String>,
    },
    /// Record an observation or test result.
    Assert {
        id: String,
        predicate: String,
        object: String,
        #[arg(long)]
        datatype: Option<String>,
    },
    /// Withdraw an earlier assertion by its sequence number.
    Retract { id: String, seq: u64 },
    /// Run inference and print suggestions.
    Infer { id: String },
    /// Print the event log and current facts.
    Show { id: String },
    /// List stored cases.
    List,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "VBD_STORE", default_value = "cases")]
    pub store: PathBuf,
    #[arg(long, env = "VBD_ADDR", default_value = "127.0.0.1:8080")]
    pub addr: String,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn load(message: impl std::fmt::Display) -> Failure {
        Failure { code: EXIT_LOAD, message: message.to_string() }
    }

    fn usage(message: impl std::fmt::Display) -> Failure {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }
}

impl From<DssError> for Failure {
    fn from(e: DssError) -> Failure {
        match e {
            DssError::Corrupt { .. } | DssError::Io { .. } => Failure::load(e),
            _ => Failure::usage(e),
        }
    }
}

/// Standard output text and the exit code.
pub struct Outcome {
    pub output: String,
    pub code: u8,
}

impl Outcome {
    fn ok(output: String) -> Outcome {
        Outcome { output, code: EXIT_OK }
    }
}

fn render<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> String {
    if json {
        serde_json::to_string_pretty(value).expect("serializable") + "\n"
    } else {
        text()
    }
}

fn kb_of(cli: &Cli) -> Result<KnowledgeBase, Failure> {
    load_kb(&cli.kb).map_err(Failure::load)
}

fn read_graph(path: &Path, kb: &KnowledgeBase) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::load(format!("{}: {e}", path.display())))?;
    parse_turtle_into(&text, &mut kb.prefixes.clone()).map_err(|e| Failure::load(format!("{}:{e}", path.display())))
}

/// Runs a parsed command line. `serve` blocks until the server stops.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Load => {
            let kb = kb_of(cli)?;
            let report = kb_report(&kb);
            Ok(Outcome::ok(render(cli.json, &report, || report.to_string())))
        }
        Command::Infer(args) => infer(cli, args),
        Command::Query(args) => query(cli, args),
        Command::Metrics(args) => {
            let kb = kb_of(cli)?;
            let population = match args.population {
                PopulationArg::Inferred => Population::Inferred,
                PopulationArg::Direct => Population::Direct,
            };
            let report = MetricsReport::compute(kb.schema.count_metrics(&kb.ontology), population)
                .map_err(|e| Failure { code: EXIT_FINDINGS, message: e.to_string() })?;
            Ok(Outcome::ok(render(cli.json, &report, || report.to_string())))
        }
        Command::Extract(args) => extract(cli, args),
        Command::Bench(args) => run_bench(cli, args),
        Command::Case(args) => case(cli, args),
        Command::Serve(args) => serve(cli, args),
    }
}

#[derive(Serialize)]
struct InferOutput<'a> {
    derived: Vec<api::DerivedView>,
    violations: &'a [vbd_core::rules::Violation],
    rounds: usize,
}

fn infer(cli: &Cli, args: &InferArgs) -> Result<Outcome, Failure> {
    let kb = kb_of(cli)?;
    let mut graph = kb.ontology.clone();
    for path in &args.facts {
        graph.extend_from(&read_graph(path, &kb)?);
    }
    let options = EngineOptions {
        strategy: match args.strategy {
            StrategyArg::SemiNaive => Strategy::SemiNaive,
            StrategyArg::Naive => Strategy::Naive,
        },
        exec: if args.sequential { ExecMode::Sequential } else { ExecMode::Parallel },
        ..EngineOptions::default()
    };
    let result = apply_rules_with(&graph, &kb.rules, &kb.schema, &options);
    let out =
        InferOutput { derived: api::derived_view(&result), violations: &result.violations, rounds: result.rounds };
    let output = render(cli.json, &out, || {
        let mut s = String::new();
        for d in &out.derived {
            let rules: Vec<&str> = d.provenance.iter().map(|p| p.rule_id.as_str()).collect();
            let _ = writeln!(s, "{}\t[{}]", d.triple, rules.join(", "));
        }
        for v in out.violations {
            let _ = writeln!(s, "violation\t{}", v.message);
        }
        let _ =
            writeln!(s, "# {} derived, {} violations, {} rounds", out.derived.len(), out.violations.len(), out.rounds);
        s
    });
    let code = if result.violations.is_empty() { EXIT_OK } else { EXIT_FINDINGS };
    Ok(Outcome { output, code })
}

fn query(cli: &Cli, args: &QueryArgs) -> Result<Outcome, Failure> {
    let kb = kb_of(cli)?;
    let text = fs::read_to_string(&args.query).map_err(|e| Failure::load(format!("{}: {e}", args.query.display())))?;
    let q = parse_query_with(&text, &mut kb.prefixes.clone())
        .map_err(|e| Failure::usage(format!("{}:{e}", args.query.display())))?;
    let datasets: Vec<(String, Graph)> = if args.data.is_empty() {
        vec![("kb".into(), kb.graph_with_fixtures())]
    } else {
        args.data.iter().map(|p| Ok((p.display().to_string(), read_graph(p, &kb)?))).collect::<Result<_, Failure>>()?
    };
    let name = args.query.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if args.combined {
        let report = bench(&[(name, q)], &datasets, args.reps).map_err(Failure::usage)?;
        return Ok(Outcome::ok(render(cli.json, &report, || report.to_tsv())));
    }
    let mut union = Graph::new();
    for (_, g) in &datasets {
        union.extend_from(g);
    }
    let table = execute(&q, &union);
    Ok(Outcome::ok(render(cli.json, &table, || table.to_tsv())))
}

fn notes(input: &Path) -> Result<Vec<(String, String)>, Failure> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Failure::load(format!("{}: {e}", p.display())));
    if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .map_err(|e| Failure::load(format!("{}: {e}", input.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "txt"))
            .collect();
        files.sort();
        files.iter().map(|p| Ok((p.display().to_string(), read(p)?))).collect()
    } else {
        Ok(vec![(input.display().to_string(), read(input)?)])
    }
}

fn extract(cli: &Cli, args: &ExtractArgs) -> Result<Outcome, Failure> {
    let kb = kb_of(cli)?;
    let lexicon = match &args.lexicon {
        Some(dir) => vbd_core::text::Lexicon::load(dir).map_err(Failure::load)?,
        None => kb.lexicon.clone(),
    };
    let patient =
        expand_name(&kb, &args.patient).ok_or_else(|| Failure::usage(format!("cannot expand `{}`", args.patient)))?;
    let mut graph = Graph::new();
    let mut mentions = Vec::new();
    for (_, text) in notes(&args.input)? {
        let found = extract_text(&text, &lexicon);
        for t in emit_rdf(&found, &patient, &lexicon).map_err(Failure::load)? {
            graph.insert(t).expect("IRI subject");
        }
        mentions.extend(found);
    }
    let turtle = serialize_turtle(&graph, &kb.prefixes);
    let output = match &args.out {
        Some(path) => {
            fs::write(path, &turtle).map_err(|e| Failure::load(format!("{}: {e}", path.display())))?;
            render(cli.json, &mentions, || {
                format!("{} mentions, {} triples written to {}\n", mentions.len(), graph.len(), path.display())
            })
        }
        None => render(cli.json, &graph.iter().collect::<Vec<Triple>>(), || turtle.clone()),
    };
    Ok(Outcome::ok(output))
}

fn run_bench(cli: &Cli, args: &BenchArgs) -> Result<Outcome, Failure> {
    let kb = kb_of(cli)?;
    let qdir = args.queries.clone().unwrap_or_else(|| cli.kb.join(QUERIES_DIR));
    let ddir = args.data.clone().unwrap_or_else(|| cli.kb.join(BENCH_DIR));
    let queries = load_queries(&qdir, &kb.prefixes).map_err(Failure::load)?;
    let datasets = load_graphs(&ddir, &kb.prefixes).map_err(Failure::load)?;
    if queries.is_empty() || datasets.is_empty() {
        return Err(Failure::load(format!("need queries in {} and datasets in {}", qdir.display(), ddir.display())));
    }
    let report = bench(&queries, &datasets, args.reps).map_err(Failure::usage)?;
    if let Some(path) = &args.out {
        fs::write(path, report.to_tsv()).map_err(|e| Failure::load(format!("{}: {e}", path.display())))?;
    }
    Ok(Outcome::ok(render(cli.json, &report, || {
        let mut s = String::from("query\tseparate_sum_ms\tcombined_ms\n");
        for q in &report.summaries {
            let _ = writeln!(
                s,
                "{}\t{:.3}\t{:.3}",
                q.query,
                q.separate_sum.as_secs_f64() * 1e3,
                q.combined.as_secs_f64() * 1e3
            );
        }
        s
    })))
}

fn suggestions_text(s: &Suggestions) -> String {
    use vbd_core::vocab::local_name;
    let mut out = String::new();
    let ids = |v: &[String]| v.join(", ");
    for d in &s.suspected {
        let _ = writeln!(out, "suspected\t{}\t[{}]", d.label, ids(&d.rule_ids));
    }
    for t in &s.recommended_tests {
        let _ = writeln!(out, "test\t{}\t[{}]", local_name(&t.test), ids(&t.rule_ids));
    }
    for p in &s.prescriptions {
        let extra = match (p.duration_days, p.day) {
            (Some(d), Some(day)) => format!(" for {d} days, on day {day}"),
            (Some(d), None) => format!(" for {d} days"),
            (None, Some(day)) => format!(" on day {day}"),
            (None, None) => String::new(),
        };
        let _ = writeln!(out, "prescription\t{}{extra}\t[{}]", local_name(&p.drug), ids(&p.rule_ids));
    }
    for f in &s.findings {
        let _ = writeln!(out, "finding\t{} = {}\t[{}]", local_name(&f.predicate), f.value, ids(&f.rule_ids));
    }
    for v in &s.violations {
        let _ = writeln!(out, "violation\t{}", v.message);
    }
    if out.is_empty() {
        out.push_str("no findings\n");
    }
    out
}

fn show_text(case: &PatientCase) -> String {
    let mut out = format!("case {} patient <{}>\n", case.id, case.patient);
    for e in case.events() {
        let what = match (&e.p, &e.o, e.target) {
            (_, _, Some(t)) => format!("retracts {t}"),
            (Some(p), Some(o), _) => format!("{} {o}", vbd_core::vocab::local_name(p)),
            (None, Some(o), _) => o.clone(),
            _ => String::new(),
        };
        let kind = serde_json::to_value(e.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let _ = writeln!(out, "{}\t{}\t{kind}\t{what}", e.seq, e.at);
    }
    out
}

#[derive(Serialize)]
struct CaseOutput<'a> {
    id: &'a str,
    patient: &'a str,
    events: &'a [vbd_core::dss::Event],
    facts: Vec<Triple>,
}

fn case(cli: &Cli, args: &CaseArgs) -> Result<Outcome, Failure> {
    let kb = Arc::new(kb_of(cli)?);
    let manager = CaseManager::new(kb, CaseStore::open(&args.store)?);
    let show = |case: &PatientCase| {
        let out = CaseOutput {
            id: &case.id,
            patient: &case.patient,
            events: case.events(),
            facts: case.facts().iter().collect(),
        };
        render(cli.json, &out, || show_text(case))
    };
    let output = match &args.action {
        CaseAction::Create { id, patient, demographics } => {
            let demo = demographics
                .iter()
                .map(|d| {
                    d.split_once('=')
                        .map(|(p, o)| Observation::new(p, o))
                        .ok_or_else(|| Failure::usage(format!("expected predicate=value, got `{d}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            show(&manager.create(id, patient.as_deref(), &demo)?)
        }
        CaseAction::Assert { id, predicate, object, datatype } => {
            let obs = Observation { p: predicate.clone(), o: object.clone(), datatype: datatype.clone() };
            let e = manager.assert(id, &obs)?;
            render(cli.json, &e, || format!("{}\tasserted\n", e.seq))
        }
        CaseAction::Retract { id, seq } => {
            let e = manager.retract(id, *seq)?;
            render(cli.json, &e, || format!("{}\tretracts {seq}\n", e.seq))
        }
        CaseAction::Infer { id } => {
            let (s, _) = manager.infer(id)?;
            let output = render(cli.json, &s, || suggestions_text(&s));
            let code = if s.violations.is_empty() { EXIT_OK } else { EXIT_FINDINGS };
            return Ok(Outcome { output, code });
        }
        CaseAction::Show { id } => show(&manager.get(id)?),
        CaseAction::List => {
            let ids = manager.list()?;
            render(cli.json, &ids, || ids.iter().map(|i| format!("{i}\n")).collect())
        }
    };
    Ok(Outcome::ok(output))
}

fn serve(cli: &Cli, args: &ServeArgs) -> Result<Outcome, Failure> {
    let kb = Arc::new(kb_of(cli)?);
    let datasets: BTreeMap<String, Graph> =
        load_graphs(&cli.kb.join(BENCH_DIR), &kb.prefixes).map_err(Failure::load)?.into_iter().collect();
    let manager = Arc::new(CaseManager::new(kb, CaseStore::open(&args.store)?));
    let app = api::router(AppState::new(manager, datasets));
    let runtime = tokio::runtime::Runtime::new().map_err(Failure::load)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.addr)
            .await
            .map_err(|e| Failure::usage(format!("cannot bind {}: {e}", args.addr)))?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(Failure::load)?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(Failure::load)
    })?;
    Ok(Outcome::ok(String::new()))
}
