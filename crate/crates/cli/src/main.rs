use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use sdskg::coversheet::{
    build_cover_sheet, collect_sds, export_network, render, BuildOptions, GeneralHazardList, ProductSelection,
    RenderFormat,
};
use sdskg::graph::{parse, serialize, Graph, RdfFormat};
use sdskg::shacl::{apply_rules, load_rules, parse_shapes, validate, Shapes, DEFAULT_MAX_ITERATIONS};
use sdskg::skos::{check_integrity, compile_authoring_json, load_taxonomy};
use sdskg::store::{IngestStatus, SdsStore, StoreConfig};
use sdskg_service::ServiceConfig;
use serde::Serialize;

/// Exit status: 0 success, 1 validation violations, 2 input error,
/// 3 internal error.
const EXIT_VIOLATIONS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "sdskg", version, about = "GHS safety data sheet knowledge graph")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest SDS documents (JSON or plain text) into a store directory.
    Ingest {
        /// Files to ingest; `-` reads stdin.
        #[arg(required = true)]
        files: Vec<String>,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
    /// Validate a Turtle/N-Triples graph against SHACL shapes.
    Validate {
        file: String,
        /// Shapes graph; the bundled shapes when omitted. Repeatable.
        #[arg(long)]
        shapes: Vec<String>,
        /// Do not merge the bundled taxonomy into the data graph.
        #[arg(long)]
        no_taxonomy: bool,
    },
    /// Run forward-chaining rules over a graph and print what they add.
    Infer {
        file: String,
        /// Rules file; the bundled mixture rules when omitted.
        #[arg(long)]
        rules: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
        /// Print the whole closed graph instead of the inferred triples.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Nt)]
        output: GraphFormat,
    },
    /// Evaluate a SPARQL SELECT query against a store.
    Query {
        store: PathBuf,
        /// Query file; `-` reads stdin.
        #[arg(long)]
        sparql: String,
    },
    /// Build a cover sheet for a selection of stored SDS.
    Coversheet {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        selection: SelectionArgs,
        /// General hazard list file; the bundled GHS Rev.10 list when omitted.
        #[arg(long)]
        hgen: Option<String>,
        #[arg(long, default_value = "md")]
        format: RenderFormat,
        #[arg(long)]
        latest_only: bool,
        /// Fixed generation timestamp (RFC 3339).
        #[arg(long)]
        generated_at: Option<DateTime<Utc>>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Export the hazard network of a selection as node-link JSON.
    Network {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        selection: SelectionArgs,
    },
    /// Taxonomy tools.
    Taxonomy {
        #[command(subcommand)]
        command: TaxonomyCommand,
    },
    /// Run the HTTP service.
    Serve {
        /// TOML config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Listen address, overriding the config.
        #[arg(long)]
        listen: Option<String>,
    },
}

#[derive(Subcommand)]
enum TaxonomyCommand {
    /// Check a taxonomy (Turtle, N-Triples or authoring JSON) for structural defects.
    Check { file: String },
}

#[derive(clap::Args)]
struct SelectionArgs {
    /// SDS ids, comma separated, or a file with one id per line (`-` for stdin).
    #[arg(long)]
    select: Option<String>,
    /// Select every stored SDS of a compound. Repeatable.
    #[arg(long)]
    compound: Vec<String>,
    #[arg(long, default_value = "Product")]
    product_name: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Nt,
    Ttl,
}

/// Bad arguments or unreadable input; exits with status 2.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(message: impl Into<String>) -> anyhow::Error {
    InputError(message.into()).into()
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input_err(format!("stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| input_err(format!("{path}: {e}")))
}

fn graph_format(path: &str) -> RdfFormat {
    if path == "-" {
        RdfFormat::Turtle
    } else {
        RdfFormat::from_path(Path::new(path))
    }
}

fn read_graph(path: &str) -> Result<Graph> {
    let text = read_input(path)?;
    parse(&text, graph_format(path)).map_err(|e| input_err(format!("{path}: {e}")))
}

fn open_store(dir: &Path) -> Result<SdsStore> {
    SdsStore::open(dir, StoreConfig::bundled()).map_err(|e| input_err(e.to_string()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.chain().any(|e| e.is::<InputError>()) {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_INTERNAL)
            }
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .any(|e| e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe))
}

fn run(cli: Cli) -> Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Ingest { files, store, format } => ingest(&files, &store, format, json),
        Command::Validate {
            file,
            shapes,
            no_taxonomy,
        } => validate_cmd(&file, &shapes, no_taxonomy, json),
        Command::Infer {
            file,
            rules,
            max_iterations,
            all,
            output,
        } => infer(&file, rules.as_deref(), max_iterations, all, output, json),
        Command::Query { store, sparql } => query(&store, &sparql, json),
        Command::Coversheet {
            store,
            selection,
            hgen,
            format,
            latest_only,
            generated_at,
            output,
        } => {
            let store = open_store(&store)?;
            let selection = resolve_selection(&selection, &store)?;
            let hgen = match hgen {
                Some(path) => GeneralHazardList::parse(&read_input(&path)?).map_err(|e| input_err(format!("{path}: {e}")))?,
                None => GeneralHazardList::ghs_rev10(),
            };
            let options = BuildOptions {
                latest_only,
                generated_at,
            };
            let sheet = build_cover_sheet(&selection, &store, &hgen, &options).map_err(|e| input_err(e.to_string()))?;
            // --json forces the JSON render.
            let text = render(&sheet, if json { RenderFormat::Json } else { format });
            match output {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => {
                    let mut out = std::io::stdout().lock();
                    out.write_all(text.as_bytes())?;
                    if !text.ends_with('\n') {
                        writeln!(out)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Network { store, selection } => {
            let store = open_store(&store)?;
            let selection = resolve_selection(&selection, &store)?;
            let network = export_network(&selection, &store).map_err(|e| input_err(e.to_string()))?;
            print_json(&network)?;
            Ok(0)
        }
        Command::Taxonomy {
            command: TaxonomyCommand::Check { file },
        } => taxonomy_check(&file, json),
        Command::Serve { config, listen } => serve(config.as_deref(), listen.as_deref()),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct IngestOutcome {
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<sdskg::store::IngestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn is_json(path: &str, text: &str, format: InputFormat) -> bool {
    match format {
        InputFormat::Json => true,
        InputFormat::Text => false,
        InputFormat::Auto => match Path::new(path).extension().and_then(|e| e.to_str()) {
            Some("json") => true,
            Some("txt") => false,
            _ => text.trim_start().starts_with('{'),
        },
    }
}

fn ingest(files: &[String], dir: &Path, format: InputFormat, json: bool) -> Result<u8> {
    let mut store = open_store(dir)?;
    let mut outcomes = Vec::new();
    let mut changed = false;
    let mut code = 0;
    for file in files {
        let result = read_input(file).and_then(|text| {
            let parsed = if is_json(file, &text, format) {
                store.ingest_json(&text)
            } else {
                store.ingest_text(&text)
            };
            parsed.map_err(|e| input_err(format!("{file}: {e}")))
        });
        match result {
            Ok(report) => {
                match report.status {
                    IngestStatus::Created => changed = true,
                    IngestStatus::Quarantined => {
                        changed = true;
                        code = code.max(EXIT_VIOLATIONS);
                    }
                    IngestStatus::Unchanged => {}
                }
                if !json {
                    let status = serde_json::to_value(report.status)?;
                    // Progress output never aborts a write to the store.
                    let _ = writeln!(std::io::stdout().lock(), "{:<12} {} {}", status.as_str().unwrap_or_default(), report.sds_id, file);
                    for v in report.validation.violations() {
                        let _ = writeln!(std::io::stdout().lock(), "    {}: {}", v.component_name(), v.message);
                    }
                }
                outcomes.push(IngestOutcome {
                    file: file.clone(),
                    report: Some(report),
                    error: None,
                });
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                code = EXIT_INPUT;
                outcomes.push(IngestOutcome {
                    file: file.clone(),
                    report: None,
                    error: Some(format!("{e:#}")),
                });
            }
        }
    }
    if changed || !dir.join(sdskg::store::CATALOG_FILE).exists() {
        store.snapshot(dir)?;
    }
    if json {
        print_json(&outcomes)?;
    }
    Ok(code)
}

fn load_shapes(paths: &[String]) -> Result<Shapes> {
    if paths.is_empty() {
        return Ok(sdskg::bundled::shapes());
    }
    let mut graph = Graph::new();
    for p in paths {
        graph.merge_apart(&read_graph(p)?);
    }
    parse_shapes(&graph).map_err(|e| input_err(format!("shapes: {e}")))
}

fn validate_cmd(file: &str, shapes: &[String], no_taxonomy: bool, json: bool) -> Result<u8> {
    let data = read_graph(file)?;
    let shapes = load_shapes(shapes)?;
    let graph = if no_taxonomy {
        data
    } else {
        let mut g = sdskg::bundled::taxonomy_graph();
        g.merge_apart(&data);
        g
    };
    let report = validate(&graph, &shapes);
    if json {
        print_json(&report)?;
    } else if report.conforms {
        writeln!(std::io::stdout().lock(), "conforms")?;
    } else {
        for r in &report.results {
            writeln!(
                std::io::stdout().lock(),
                "{:?} {} focus={} path={}: {}",
                r.severity,
                r.component_name(),
                r.focus_node,
                r.path.as_deref().unwrap_or("-"),
                r.message
            )?;
        }
    }
    Ok(if report.conforms { 0 } else { EXIT_VIOLATIONS })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct InferOutput<'a> {
    iterations: usize,
    capped: bool,
    inferred: &'a [sdskg::shacl::TraceEntry],
}

fn infer(file: &str, rules: Option<&str>, max_iterations: usize, all: bool, output: GraphFormat, json: bool) -> Result<u8> {
    let data = read_graph(file)?;
    let rules = match rules {
        Some(p) => load_rules(&read_input(p)?).map_err(|e| input_err(format!("{p}: {e}")))?,
        None => sdskg::bundled::rules(),
    };
    let outcome = apply_rules(&data, &rules, max_iterations);
    if json {
        return print_json(&InferOutput {
            iterations: outcome.iterations,
            capped: outcome.capped,
            inferred: &outcome.trace,
        })
        .map(|_| 0);
    }
    let graph = if all {
        outcome.graph.clone()
    } else {
        let mut g = Graph::new();
        for (p, ns) in data.prefixes() {
            g.set_prefix(p.clone(), ns.clone());
        }
        g.extend(outcome.inferred());
        g
    };
    let format = match output {
        GraphFormat::Nt => RdfFormat::NTriples,
        GraphFormat::Ttl => RdfFormat::Turtle,
    };
    write!(std::io::stdout().lock(), "{}", serialize(&graph, format))?;
    if outcome.capped {
        eprintln!("warning: stopped after {max_iterations} iterations without reaching a fixpoint");
    }
    Ok(0)
}

fn query(dir: &Path, sparql: &str, json: bool) -> Result<u8> {
    let store = open_store(dir)?;
    let text = read_input(sparql)?;
    let solutions = store.query(&text).map_err(|e| input_err(format!("{sparql}: {e}")))?;
    if json {
        print_json(&solutions)?;
    } else {
        writeln!(std::io::stdout().lock(), "{}", solutions.variables.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t"))?;
        for row in &solutions.rows {
            writeln!(std::io::stdout().lock(), "{}", row.iter().map(ToString::to_string).collect::<Vec<_>>().join("\t"))?;
        }
    }
    Ok(0)
}

fn resolve_selection(args: &SelectionArgs, store: &SdsStore) -> Result<ProductSelection> {
    let mut ids: Vec<String> = Vec::new();
    if let Some(select) = &args.select {
        let text = if select == "-" || Path::new(select).is_file() {
            read_input(select)?
        } else {
            select.replace(',', "\n")
        };
        ids.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        );
    }
    for compound in &args.compound {
        let found = collect_sds(store, compound);
        if found.is_empty() {
            return Err(input_err(format!("no stored SDS for compound {compound:?}")));
        }
        ids.extend(found.into_iter().map(|r| r.id.clone()));
    }
    let mut seen = std::collections::BTreeSet::new();
    ids.retain(|id| seen.insert(id.clone()));
    ProductSelection::new(args.product_name.clone(), ids).map_err(|e| input_err(e.to_string()))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TaxonomyReport {
    concepts: usize,
    violations: Vec<sdskg::skos::IntegrityViolation>,
    dangling: Vec<sdskg::skos::DanglingReference>,
}

fn taxonomy_check(file: &str, json: bool) -> Result<u8> {
    let graph = if file.ends_with(".json") {
        compile_authoring_json(&read_input(file)?).map_err(|e| input_err(format!("{file}: {e}")))?
    } else {
        read_graph(file)?
    };
    let index = load_taxonomy(&graph);
    let report = TaxonomyReport {
        concepts: index.concepts().len(),
        violations: check_integrity(&index),
        dangling: index.dangling().to_vec(),
    };
    if json {
        print_json(&report)?;
    } else {
        writeln!(std::io::stdout().lock(), "{} concepts", report.concepts)?;
        for v in &report.violations {
            writeln!(std::io::stdout().lock(), "violation: {}", v.describe())?;
        }
        for d in &report.dangling {
            writeln!(std::io::stdout().lock(), "warning: {} {} refers to undeclared {}", d.concept, d.property, d.target)?;
        }
    }
    Ok(if report.violations.is_empty() { 0 } else { EXIT_VIOLATIONS })
}

fn serve(config: Option<&Path>, listen: Option<&str>) -> Result<u8> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let mut config = match config {
        Some(path) => ServiceConfig::load(path).map_err(|e| input_err(e.to_string()))?,
        None => ServiceConfig::default(),
    }
    .with_env(|k| std::env::var(k).ok())
    .map_err(|e| input_err(e.to_string()))?;
    if let Some(addr) = listen {
        config.listen = addr.parse().map_err(|e| input_err(format!("--listen {addr:?}: {e}")))?;
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime
        .block_on(sdskg_service::serve(config, StoreConfig::bundled()))
        .map_err(|e| match e {
            sdskg_service::ServiceError::Store(_) | sdskg_service::ServiceError::Hgen { .. } => input_err(e.to_string()),
            other => anyhow::Error::new(other),
        })?;
    Ok(0)
}
