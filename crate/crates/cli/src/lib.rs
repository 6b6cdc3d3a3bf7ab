//! The `dsocket` command line.
//!
//! Results go to stdout as canonical bytes; diagnostics go to stderr.
//! Exit status is 0 on success, 1 when the input parses but something in
//! it fails (a violation, an identity breakdown, a bad delta) and 2 for
//! usage and I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dsocket::delta::{evaluate, Classification};
use dsocket::intangible::build_intangible;
use dsocket::pattern::{detect, to_graph, validate};
use dsocket::product_line::expand;
use dsocket::registry::builtin_corpus;
use dsocket::textio::{graph_to_dot, ontology_to_dot, parse_bytes, serialize, serialize_document, Document, Item};
use dsocket::{diff, PluggableOntology};

pub const SUCCESS: i32 = 0;
pub const FAILURE: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dsocket", version, about = "Pluggable ontologies for Non-concepts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every item of a file.
    Validate { file: PathBuf },
    /// Print the canonical pluggable ontology of a nonconcept or intangible.
    Derive {
        file: PathBuf,
        #[arg(long)]
        nonconcept: String,
    },
    /// List DSocket pattern instances in a graph block.
    Detect {
        file: PathBuf,
        #[arg(long)]
        graph: String,
    },
    /// Compare two nonconcepts over the same base.
    Diff {
        file: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Classify and derive every variant of a product line.
    Expand {
        file: PathBuf,
        #[arg(long)]
        productline: String,
    },
    /// Write a DOT graph of a nonconcept, intangible or graph block.
    Render {
        file: PathBuf,
        #[arg(long)]
        item: String,
        /// Output file; stdout when omitted.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print the built-in concepts as a document.
    Corpus,
}

/// Ends a command early with an exit status, after writing a diagnostic.
struct Exit(i32, String);

type Outcome = Result<i32, Exit>;

fn usage(message: impl Into<String>) -> Exit {
    Exit(USAGE, message.into())
}

fn failure(message: impl Into<String>) -> Exit {
    Exit(FAILURE, message.into())
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return if err.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                SUCCESS
            };
        }
    };

    let mut out = Vec::new();
    let mut diag = Vec::new();
    let status = match dispatch(cli.command, &mut out, &mut diag) {
        Ok(status) => status,
        Err(Exit(status, message)) => {
            diag.extend_from_slice(message.as_bytes());
            diag.push(b'\n');
            status
        }
    };
    if stdout.write_all(&out).and_then(|_| stdout.flush()).is_err() {
        return USAGE;
    }
    let _ = stderr.write_all(&diag);
    status
}

fn dispatch(command: Command, out: &mut Vec<u8>, diag: &mut Vec<u8>) -> Outcome {
    match command {
        Command::Validate { file } => cmd_validate(&load(&file)?, out, diag),
        Command::Derive { file, nonconcept } => cmd_derive(&load(&file)?, &nonconcept, out),
        Command::Detect { file, graph } => cmd_detect(&load(&file)?, &graph, out),
        Command::Diff { file, a, b } => cmd_diff(&load(&file)?, &a, &b, out),
        Command::Expand { file, productline } => cmd_expand(&load(&file)?, &productline, out, diag),
        Command::Render { file, item, output } => {
            let dot = render(&load(&file)?, &item)?;
            match output {
                Some(path) => fs::write(&path, dot).map_err(|e| usage(format!("{}: {e}", path.display())))?,
                None => out.extend_from_slice(dot.as_bytes()),
            }
            Ok(SUCCESS)
        }
        Command::Corpus => {
            let document = Document::from_registry(&builtin_corpus());
            out.extend_from_slice(serialize_document(&document).as_bytes());
            Ok(SUCCESS)
        }
    }
}

fn load(path: &Path) -> Result<Document, Exit> {
    let bytes = fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_bytes(&bytes).map_err(|e| failure(format!("{}:{e}", path.display())))
}

fn line(out: &mut Vec<u8>, text: impl AsRef<str>) {
    out.extend_from_slice(text.as_ref().as_bytes());
    out.push(b'\n');
}

fn breakdown(name: &str, cause: &str) -> String {
    format!("{name}: identity breakdown: essential part {cause} was removed")
}

/// Validates each nonconcept, intangible, product line and graph. One
/// report line per finding, or `ok` when an item has none.
fn cmd_validate(document: &Document, out: &mut Vec<u8>, diag: &mut Vec<u8>) -> Outcome {
    let registry = document.registry();
    let mut failed = false;
    for item in &document.items {
        let head = format!("{} {}", item.keyword(), item.name());
        let mut findings = Vec::new();
        match item {
            Item::Concept(_) => {}
            Item::NonConcept(def) => {
                let base = registry.get(def.delta.base.as_str()).expect("parser resolves bases");
                match evaluate(base, &def.delta) {
                    Err(e) => findings.push(e.to_string()),
                    Ok(outcome) => {
                        if let Classification::IdentityBreakdown(cause) = &outcome.classification {
                            findings.push(format!("identity breakdown: essential part {cause} was removed"));
                        }
                        if let Some(ontology) = &outcome.ontology {
                            findings.extend(ontology_findings(ontology));
                        }
                    }
                }
            }
            Item::Intangible(spec) => findings.extend(ontology_findings(&build_intangible(spec))),
            Item::ProductLine(def) => match expand(&registry, &def.set) {
                Err(e) => findings.push(e.to_string()),
                Ok(expansion) => {
                    for (variant, outcome) in &expansion {
                        if let Classification::IdentityBreakdown(cause) = &outcome.classification {
                            findings.push(format!(
                                "variant {variant}: identity breakdown: essential part {cause} was removed"
                            ));
                        }
                        if let Some(ontology) = &outcome.ontology {
                            findings.extend(
                                ontology_findings(ontology)
                                    .into_iter()
                                    .map(|f| format!("variant {variant}: {f}")),
                            );
                        }
                    }
                }
            },
            Item::Graph(def) => {
                let report = validate(&def.graph);
                findings.extend(report.violations.iter().map(ToString::to_string));
                for warning in &report.warnings {
                    line(diag, format!("warning: {head}: {warning}"));
                }
            }
        }
        if findings.is_empty() {
            line(out, format!("{head}: ok"));
        } else {
            failed = true;
            for finding in findings {
                line(out, format!("{head}: {finding}"));
            }
        }
    }
    Ok(if failed { FAILURE } else { SUCCESS })
}

fn ontology_findings(ontology: &PluggableOntology) -> Vec<String> {
    validate(&to_graph(ontology))
        .violations
        .iter()
        .map(ToString::to_string)
        .collect()
}

fn derive_item(document: &Document, name: &str) -> Result<PluggableOntology, Exit> {
    if let Some(def) = document.nonconcept(name) {
        let registry = document.registry();
        let base = registry.get(def.delta.base.as_str()).expect("parser resolves bases");
        let outcome = evaluate(base, &def.delta).map_err(|e| failure(format!("{name}: {e}")))?;
        return match outcome.classification {
            Classification::NonConcept => Ok(outcome.ontology.expect("nonconcepts carry an ontology")),
            Classification::IdentityBreakdown(cause) => Err(failure(breakdown(name, cause.as_str()))),
            Classification::Original => Err(failure(format!(
                "{name}: the delta leaves {} unchanged; nothing to derive",
                def.delta.base
            ))),
        };
    }
    if let Some(spec) = document.intangible(name) {
        return Ok(build_intangible(spec));
    }
    Err(usage(format!("no nonconcept or intangible named {name}")))
}

fn cmd_derive(document: &Document, name: &str, out: &mut Vec<u8>) -> Outcome {
    let ontology = derive_item(document, name)?;
    out.extend_from_slice(serialize(&ontology).as_bytes());
    Ok(SUCCESS)
}

fn cmd_detect(document: &Document, name: &str, out: &mut Vec<u8>) -> Outcome {
    let def = document
        .graph(name)
        .ok_or_else(|| usage(format!("no graph named {name}")))?;
    for instance in detect(&def.graph) {
        line(out, instance.to_string());
    }
    Ok(SUCCESS)
}

fn cmd_diff(document: &Document, a: &str, b: &str, out: &mut Vec<u8>) -> Outcome {
    let lookup = |name: &str| {
        document
            .nonconcept(name)
            .ok_or_else(|| usage(format!("no nonconcept named {name}")))
    };
    let (left, right) = (lookup(a)?, lookup(b)?);
    let registry = document.registry();
    let base = registry.get(left.delta.base.as_str()).expect("parser resolves bases");
    let result = diff(base, &left.delta, &right.delta).map_err(|e| failure(format!("{a} vs {b}: {e}")))?;
    for (kind, name, state) in &result.only_a {
        line(out, format!("only-a {kind} {name} {state}"));
    }
    for (kind, name, state) in &result.only_b {
        line(out, format!("only-b {kind} {name} {state}"));
    }
    for (kind, name, sa, sb) in &result.changed {
        line(out, format!("changed {kind} {name} {sa} -> {sb}"));
    }
    Ok(SUCCESS)
}

/// One header per variant in name order, followed by the canonical
/// ontology for Non-concept variants.
fn cmd_expand(document: &Document, name: &str, out: &mut Vec<u8>, diag: &mut Vec<u8>) -> Outcome {
    let def = document
        .productline(name)
        .ok_or_else(|| usage(format!("no productline named {name}")))?;
    let expansion = expand(&document.registry(), &def.set).map_err(|e| failure(format!("{name}: {e}")))?;
    let mut status = SUCCESS;
    let stages: std::collections::BTreeMap<_, _> = def.set.variants().iter().map(|v| (&v.name, v.stage)).collect();
    for (i, (variant, outcome)) in expansion.iter().enumerate() {
        if i > 0 {
            out.push(b'\n');
        }
        line(
            out,
            format!(
                "variant {variant} stage {}: {}",
                stages[variant], outcome.classification
            ),
        );
        if let Some(ontology) = &outcome.ontology {
            out.extend_from_slice(serialize(ontology).as_bytes());
        }
        if let Classification::IdentityBreakdown(cause) = &outcome.classification {
            line(diag, breakdown(variant.as_str(), cause.as_str()));
            status = FAILURE;
        }
    }
    Ok(status)
}

fn render(document: &Document, name: &str) -> Result<String, Exit> {
    if document.nonconcept(name).is_some() || document.intangible(name).is_some() {
        return Ok(ontology_to_dot(&derive_item(document, name)?));
    }
    if let Some(def) = document.graph(name) {
        return Ok(graph_to_dot(def.name.as_str(), &def.graph));
    }
    Err(usage(format!("no nonconcept, intangible or graph named {name}")))
}
