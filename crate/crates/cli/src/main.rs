//! Command-line front end: validate, explore, analyze, compose and merge
//! variable-Petri-net models.
//!
//! Exit codes: 0 when the command succeeds and every checked property holds;
//! 1 when a property fails (a report is printed); 2 on usage, parse or
//! validation-input errors; 3 when exploration hit its bounds and the verdict
//! is only good within them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vpnet_cli::export;
use vpnet_cli::model::{self, Diagnostic, GroupKind, ModelDocument};
use vpnet_core::analysis::{analyze_connectivity, analyze_soundness, analyze_validity, AnalysisReport};
use vpnet_core::compose::{
    merge_async, merge_shared_virtual, merge_sync, AsyncMergeSpec, SharedPlaceSpec, SyncMergeSpec,
};
use vpnet_core::decl::TupleLit;
use vpnet_core::space::{build_ct, ct_to_cg, DedupMode, ExplorationBounds};
use vpnet_core::term::Guard;
use vpnet_core::VpnNet;

#[derive(Parser)]
#[command(name = "vpnet", version, about = "Variable Petri net exploration and property analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Connectivity,
    Soundness,
    Validity,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DedupArg {
    Global,
    Path,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model and check its structural rules
    Validate {
        file: PathBuf,
    },
    /// Build the configuration tree (or graph) and export it
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long, default_value_t = 200)]
        max_depth: usize,
        #[arg(long, value_enum, default_value = "global")]
        dedup: DedupArg,
        /// Output file; format chosen by extension (.json or .dot)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Export the deduplicated graph instead of the tree
        #[arg(long)]
        graph: bool,
    },
    /// Check system connectivity, interaction soundness and data validity
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        property: Property,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long, default_value_t = 200)]
        max_depth: usize,
    },
    /// Fuse the components of several model files into one net
    Compose {
        files: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge two nets per a merge specification file
    Merge {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_document(path: &Path) -> Result<ModelDocument, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    match model::parse_model(&text) {
        Ok(doc) => Ok(doc),
        Err(diags) => Err(format_diagnostics(path, &diags)),
    }
}

fn format_diagnostics(path: &Path, diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        if d.line == 0 {
            out.push_str(&format!("{}: {}\n", path.display(), d.message));
        } else {
            out.push_str(&format!("{}:{}\n", path.display(), d));
        }
    }
    out.push_str(&format!("{} diagnostic(s)", diags.len()));
    out
}

fn bounds_from(max_configs: usize, max_depth: usize, dedup: DedupArg) -> ExplorationBounds {
    ExplorationBounds {
        max_configs: max_configs.max(1),
        max_depth: max_depth.max(1),
        dedup: match dedup {
            DedupArg::Global => DedupMode::Global,
            DedupArg::Path => DedupMode::Path,
        },
        ..Default::default()
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { file } => {
            let doc = read_document(&file)?;
            let mcn = doc.to_mcn().map_err(|e| e.to_string())?;
            let report = mcn.net.validate();
            if report.is_valid() {
                println!(
                    "ok: {} places, {} transitions",
                    mcn.net.places().count(),
                    mcn.net.transition_count()
                );
                Ok(ExitCode::SUCCESS)
            } else {
                for v in &report.violations {
                    println!("violation: {v}");
                }
                Ok(ExitCode::from(1))
            }
        }

        Command::Explore {
            file,
            max_configs,
            max_depth,
            dedup,
            out,
            graph,
        } => {
            let doc = read_document(&file)?;
            let mcn = doc.to_mcn().map_err(|e| e.to_string())?;
            let bounds = bounds_from(max_configs, max_depth, dedup);
            let ct = build_ct(&mcn.net, &bounds).map_err(|e| e.to_string())?;
            println!(
                "{} configurations, {} complete paths{}",
                ct.len(),
                ct.complete_paths().len(),
                if ct.truncated() { " (truncated)" } else { "" }
            );
            if let Some(out_path) = out {
                let ext = out_path
                    .extension()
                    .and_then(|e| e.to_str())
                    .unwrap_or("json");
                let payload = match (ext, graph) {
                    ("dot", false) => export::tree_to_dot(&ct),
                    ("dot", true) => export::graph_to_dot(&ct_to_cg(&ct), ct.net()),
                    (_, false) => serde_json::to_string_pretty(&export::tree_to_json(&ct))
                        .map_err(|e| e.to_string())?,
                    (_, true) => serde_json::to_string_pretty(&export::graph_to_json(
                        &ct_to_cg(&ct),
                        ct.net(),
                        ct.truncated(),
                    ))
                    .map_err(|e| e.to_string())?,
                };
                fs::write(&out_path, payload).map_err(|e| format!("{}: {e}", out_path.display()))?;
                println!("wrote {}", out_path.display());
            }
            if ct.truncated() {
                Ok(ExitCode::from(3))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }

        Command::Analyze {
            file,
            property,
            report,
            max_configs,
            max_depth,
        } => {
            let doc = read_document(&file)?;
            let mcn = doc.to_mcn().map_err(|e| e.to_string())?;
            let bounds = bounds_from(max_configs, max_depth, DedupArg::Global);
            let ct = build_ct(&mcn.net, &bounds).map_err(|e| e.to_string())?;
            let connectivity = match analyze_connectivity(&mcn, &ct) {
                Ok(v) => v,
                Err(vpnet_core::analysis::AnalysisError::NoInterfaceDeclared) => {
                    vpnet_core::analysis::ConnectivityVerdict {
                        holds: false,
                        mapping_sets: Default::default(),
                        reason: Some("no interface variable is declared".into()),
                    }
                }
                Err(e) => return Err(e.to_string()),
            };
            let soundness =
                analyze_soundness(&mcn, &ct, mcn.net.interfaces()).map_err(|e| e.to_string())?;
            let validity = analyze_validity(&mcn, &ct).map_err(|e| e.to_string())?;
            let full = AnalysisReport {
                connectivity,
                soundness,
                validity,
                truncated: ct.truncated(),
                configurations: ct.len(),
                complete_paths: ct.complete_paths().len(),
            };
            match report {
                ReportFormat::Text => print!("{}", export::render_report_text(&full, &mcn.net)),
                ReportFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&export::report_to_json(&full, &mcn.net))
                        .map_err(|e| e.to_string())?
                ),
            }
            let positive = match property {
                Property::Connectivity => full.connectivity.holds,
                Property::Soundness => full.soundness.sound,
                Property::Validity => full.validity.valid,
                Property::All => full.all_hold(),
            };
            Ok(if !positive {
                ExitCode::from(1)
            } else if full.truncated {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Compose { files, out } => {
            if files.is_empty() {
                return Err("compose needs at least one input file".into());
            }
            let mut components = Vec::new();
            let mut isns = Vec::new();
            for path in &files {
                let doc = read_document(path)?;
                if doc.groups.is_empty() {
                    // A bare net becomes one component.
                    let name = path
                        .file_stem()
                        .and_then(|s| s.to_str())
                        .unwrap_or("net")
                        .to_string();
                    components.push(vpnet_core::compose::ComponentNet {
                        name,
                        decl: doc.decl.clone(),
                        finals: doc.finals.clone(),
                    });
                } else {
                    let mcn = doc.to_mcn().map_err(|e| e.to_string())?;
                    components.extend(mcn.components);
                    isns.extend(mcn.interactions);
                }
            }
            let mcn =
                vpnet_core::compose::compose_mcn(&components, &isns).map_err(|e| e.to_string())?;
            let finals: Vec<String> = mcn
                .finals
                .iter()
                .map(|&p| mcn.net.universe().name(p).to_string())
                .collect();
            let mut doc = model::document_from_net(&mcn.net, &finals);
            doc.groups = components
                .iter()
                .map(|c| model::GroupDecl {
                    name: c.name.clone(),
                    kind: GroupKind::Component,
                    places: c.decl.places.iter().map(|p| p.name.clone()).collect(),
                    transitions: c.decl.transitions.iter().map(|t| t.name.clone()).collect(),
                    variables: Vec::new(),
                    members: Vec::new(),
                    finals: c.finals.clone(),
                    connects: Vec::new(),
                })
                .chain(isns.iter().map(|i| model::GroupDecl {
                    name: i.name.clone(),
                    kind: GroupKind::Isn,
                    places: i.decl.places.iter().map(|p| p.name.clone()).collect(),
                    transitions: i.decl.transitions.iter().map(|t| t.name.clone()).collect(),
                    variables: i.decl.vars.clone(),
                    members: i.members.clone(),
                    finals: Vec::new(),
                    connects: i.connects.clone(),
                }))
                .collect();
            fs::write(&out, model::serialize_document(&doc))
                .map_err(|e| format!("{}: {e}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Merge { a, b, spec, out } => {
            let da = read_document(&a)?;
            let db = read_document(&b)?;
            let spec_text =
                fs::read_to_string(&spec).map_err(|e| format!("{}: {e}", spec.display()))?;
            let merged = run_merge(&da, &db, &spec_text)?;
            let doc = model::document_from_net(&merged, &[]);
            fs::write(&out, model::serialize_document(&doc))
                .map_err(|e| format!("{}: {e}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Merge specification files are line-oriented `key value` pairs. The `mode`
/// key selects the operator; expression-valued keys reuse the model syntax.
fn run_merge(a: &ModelDocument, b: &ModelDocument, spec: &str) -> Result<VpnNet, String> {
    let mut fields: Vec<(String, String)> = Vec::new();
    for line in spec.lines() {
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("merge spec line `{line}` has no value"))?;
        fields.push((key.to_string(), value.trim().to_string()));
    }
    let get = |key: &str| -> Result<String, String> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| format!("merge spec is missing `{key}`"))
    };
    let get_opt = |key: &str| -> Option<String> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
    };
    let parse_guard = |text: &str| -> Result<Guard<String>, String> {
        model::parse_guard_text(text).map_err(|d| format!("guard `{text}`: {}", d.message))
    };
    let parse_expr = |text: &str| -> Result<Vec<TupleLit>, String> {
        model::parse_expr_text(text).map_err(|d| format!("expression `{text}`: {}", d.message))
    };
    let parse_place_expr = |text: &str| -> Result<(String, Vec<TupleLit>), String> {
        let (place, expr) = text
            .split_once(':')
            .ok_or_else(|| format!("expected `place : expr`, got `{text}`"))?;
        Ok((place.trim().to_string(), parse_expr(expr.trim())?))
    };

    let mode = get("mode")?;
    let merged = match mode.as_str() {
        "async" => {
            let spec = AsyncMergeSpec {
                producer: get("producer")?,
                consumer: get("consumer")?,
                buffer_from: get("buffer_from")?,
                buffer_to: get("buffer_to")?,
                bridge: get("bridge")?,
                guard: match get_opt("guard") {
                    Some(g) => parse_guard(&g)?,
                    None => Guard::True,
                },
                payload: parse_expr(&get("payload")?)?,
            };
            merge_async(&a.decl, &b.decl, &spec)
        }
        "sync" => {
            let spec = SyncMergeSpec {
                bridge: get("bridge")?,
                guard: match get_opt("guard") {
                    Some(g) => parse_guard(&g)?,
                    None => Guard::True,
                },
                take_left: parse_place_expr(&get("take_left")?)?,
                take_right: parse_place_expr(&get("take_right")?)?,
                give_left: get_opt("give_left").map(|v| parse_place_expr(&v)).transpose()?,
                give_right: get_opt("give_right")
                    .map(|v| parse_place_expr(&v))
                    .transpose()?,
            };
            merge_sync(&a.decl, &b.decl, &spec)
        }
        "shared" => {
            let spec = SharedPlaceSpec {
                shared: get("shared")?,
                requester_send: get("requester_send")?,
                requester_recv: get("requester_recv")?,
                responder_recv: get("responder_recv")?,
                responder_send: get("responder_send")?,
            };
            merge_shared_virtual(&a.decl, &b.decl, &spec)
        }
        other => return Err(format!("unknown merge mode `{other}`")),
    }
    .map_err(|e| e.to_string())?;

    // Surface rule violations of the merged net immediately.
    let report = merged.validate();
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(format!("merged net fails validation: {}", msgs.join("; ")));
    }
    Ok(merged)
}
