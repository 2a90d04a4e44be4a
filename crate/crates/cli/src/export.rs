//! Exporters: configuration trees and graphs as DOT or lossless JSON, and
//! analysis reports as text or JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use vpnet_core::analysis::AnalysisReport;
use vpnet_core::config::{Binding, Configuration};
use vpnet_core::space::{ConfigGraph, ConfigTree, LinkSet, NodeStatus};
use vpnet_core::VpnNet;

pub const GRAPH_SCHEMA: &str = "vpn-graph/1";
pub const REPORT_SCHEMA: &str = "vpn-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonGraph {
    pub schema_version: String,
    pub kind: String,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete_paths: Option<usize>,
    pub root: usize,
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<JsonEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonNode {
    pub id: usize,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    pub digest: String,
    pub marking: BTreeMap<String, Vec<(u64, Vec<String>)>>,
    pub places: Vec<String>,
    pub gamma: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub from: usize,
    pub to: usize,
    pub transition: String,
    pub binding: BTreeMap<String, String>,
}

/// Short stable digest of a configuration, used as the node label.
pub fn config_digest(net: &VpnNet, cfg: &Configuration) -> String {
    let mut hasher = Sha256::new();
    hasher.update(cfg.display(net.universe()).as_bytes());
    let hash = hasher.finalize();
    hash.iter().take(4).map(|b| format!("{b:02x}")).collect()
}

fn json_node(net: &VpnNet, id: usize, cfg: &Configuration, status: &str, depth: Option<usize>) -> JsonNode {
    let u = net.universe();
    let marking = cfg
        .marked_places()
        .map(|(p, bag)| {
            (
                u.name(p).to_string(),
                bag.iter()
                    .map(|(tok, c)| (c, tok.0.iter().map(|&s| u.name(s).to_string()).collect()))
                    .collect(),
            )
        })
        .collect();
    JsonNode {
        id,
        status: status.to_string(),
        depth,
        digest: config_digest(net, cfg),
        marking,
        places: cfg.places().iter().map(|&p| u.name(p).to_string()).collect(),
        gamma: cfg
            .gamma()
            .iter()
            .map(|(&v, range)| {
                (
                    u.name(v).to_string(),
                    range.iter().map(|&c| u.name(c).to_string()).collect(),
                )
            })
            .collect(),
    }
}

fn json_binding(net: &VpnNet, b: &Binding) -> BTreeMap<String, String> {
    let u = net.universe();
    b.iter()
        .map(|(v, c)| (u.name(v).to_string(), u.name(c).to_string()))
        .collect()
}

pub fn tree_to_json(ct: &ConfigTree) -> JsonGraph {
    let net = ct.net();
    JsonGraph {
        schema_version: GRAPH_SCHEMA.to_string(),
        kind: "tree".to_string(),
        truncated: ct.truncated(),
        complete_paths: Some(ct.complete_paths().len()),
        root: ct.root(),
        nodes: ct
            .nodes()
            .map(|(id, n)| json_node(net, id, &n.config, n.status.keyword(), Some(n.depth)))
            .collect(),
        edges: ct
            .edges()
            .map(|(from, to, t, b)| JsonEdge {
                from,
                to,
                transition: net.transition_name(t).to_string(),
                binding: json_binding(net, b),
            })
            .collect(),
    }
}

pub fn graph_to_json(cg: &ConfigGraph, net: &VpnNet, truncated: bool) -> JsonGraph {
    JsonGraph {
        schema_version: GRAPH_SCHEMA.to_string(),
        kind: "graph".to_string(),
        truncated,
        complete_paths: None,
        root: 0,
        nodes: cg
            .nodes()
            .map(|(id, cfg)| json_node(net, id, cfg, "state", None))
            .collect(),
        edges: cg
            .edges()
            .map(|(from, to, t, b)| JsonEdge {
                from: *from,
                to: *to,
                transition: net.transition_name(*t).to_string(),
                binding: json_binding(net, b),
            })
            .collect(),
    }
}

/// Re-imports a JSON export. The graph shape is preserved losslessly, so
/// export/import round-trips are exact.
pub fn json_to_graph(text: &str) -> Result<JsonGraph, serde_json::Error> {
    serde_json::from_str(text)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn binding_label(net: &VpnNet, b: &Binding) -> String {
    let u = net.universe();
    let parts: Vec<String> = b
        .iter()
        .map(|(v, c)| format!("{}->{}", u.name(v), u.name(c)))
        .collect();
    format!("[{}]", parts.join(", "))
}

pub fn tree_to_dot(ct: &ConfigTree) -> String {
    let net = ct.net();
    let mut out = String::from("digraph ct {\n  rankdir=TB;\n  node [shape=box];\n");
    for (id, n) in ct.nodes() {
        let label = format!("{}\\n{}", config_digest(net, &n.config), n.status.keyword());
        let extra = match n.status {
            NodeStatus::DeadlockLeaf => ", style=filled, fillcolor=lightyellow",
            NodeStatus::DuplicateLeaf => ", style=dashed",
            NodeStatus::BoundLeaf => ", style=dotted",
            NodeStatus::Interior => "",
        };
        out.push_str(&format!("  n{id} [label=\"{}\"{extra}];\n", dot_escape(&label)));
    }
    for (from, to, t, b) in ct.edges() {
        let label = format!("{} {}", net.transition_name(t), binding_label(net, b));
        out.push_str(&format!(
            "  n{from} -> n{to} [label=\"{}\"];\n",
            dot_escape(&label)
        ));
    }
    out.push_str("}\n");
    out
}

pub fn graph_to_dot(cg: &ConfigGraph, net: &VpnNet) -> String {
    let mut out = String::from("digraph cg {\n  rankdir=TB;\n  node [shape=box];\n");
    for (id, cfg) in cg.nodes() {
        out.push_str(&format!(
            "  n{id} [label=\"{}\"];\n",
            dot_escape(&config_digest(net, cfg))
        ));
    }
    for (from, to, t, b) in cg.edges() {
        let label = format!("{} {}", net.transition_name(*t), binding_label(net, b));
        out.push_str(&format!(
            "  n{from} -> n{to} [label=\"{}\"];\n",
            dot_escape(&label)
        ));
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub schema_version: String,
    pub truncated: bool,
    pub configurations: usize,
    pub complete_paths: usize,
    pub connectivity: JsonConnectivity,
    pub soundness: JsonSoundness,
    pub validity: JsonValidity,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonConnectivity {
    pub holds: bool,
    pub mapping_sets: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonSoundness {
    pub sound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub link_set: JsonLinkSet,
    pub observed_interfaces: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<JsonStep>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonLinkSet {
    pub sustained: Vec<(String, String)>,
    pub created: Vec<(String, String)>,
    pub broken: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonValidity {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_clause: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<JsonStep>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonStep {
    pub transition: String,
    pub binding: BTreeMap<String, String>,
}

fn json_link_set(net: &VpnNet, ls: &LinkSet) -> JsonLinkSet {
    let u = net.universe();
    let pairs = |set: &std::collections::BTreeSet<(vpnet_core::SymbolId, vpnet_core::SymbolId)>| {
        set.iter()
            .map(|&(v, c)| (u.name(v).to_string(), u.name(c).to_string()))
            .collect()
    };
    JsonLinkSet {
        sustained: pairs(&ls.sustained),
        created: pairs(&ls.created),
        broken: pairs(&ls.broken),
    }
}

fn json_witness(
    net: &VpnNet,
    w: &Option<vpnet_core::analysis::PathWitness>,
) -> Option<Vec<JsonStep>> {
    w.as_ref().map(|w| {
        w.trace
            .iter()
            .map(|(t, b)| JsonStep {
                transition: net.transition_name(*t).to_string(),
                binding: json_binding(net, b),
            })
            .collect()
    })
}

pub fn report_to_json(report: &AnalysisReport, net: &VpnNet) -> JsonReport {
    let u = net.universe();
    JsonReport {
        schema_version: REPORT_SCHEMA.to_string(),
        truncated: report.truncated,
        configurations: report.configurations,
        complete_paths: report.complete_paths,
        connectivity: JsonConnectivity {
            holds: report.connectivity.holds,
            mapping_sets: report
                .connectivity
                .mapping_sets
                .iter()
                .map(|(&v, set)| {
                    (
                        u.name(v).to_string(),
                        set.iter().map(|&c| u.name(c).to_string()).collect(),
                    )
                })
                .collect(),
            reason: report.connectivity.reason.clone(),
        },
        soundness: JsonSoundness {
            sound: report.soundness.sound,
            failed_step: report.soundness.failed_step,
            reason: report.soundness.reason.clone(),
            link_set: json_link_set(net, &report.soundness.link_set),
            observed_interfaces: report
                .soundness
                .observed_interfaces
                .iter()
                .map(|&c| u.name(c).to_string())
                .collect(),
            witness: json_witness(net, &report.soundness.witness),
        },
        validity: JsonValidity {
            valid: report.validity.valid,
            failed_clause: report.validity.failed_clause,
            reason: report.validity.reason.clone(),
            witness: json_witness(net, &report.validity.witness),
        },
    }
}

fn verdict_word(positive: bool, truncated: bool, yes: &str, no: &str) -> String {
    match (positive, truncated) {
        (true, false) => yes.to_string(),
        (true, true) => format!("{yes} (within explored bounds)"),
        (false, _) => no.to_string(),
    }
}

pub fn render_report_text(report: &AnalysisReport, net: &VpnNet) -> String {
    let u = net.universe();
    let mut out = String::new();
    out.push_str(&format!(
        "explored {} configurations, {} complete paths{}\n",
        report.configurations,
        report.complete_paths,
        if report.truncated {
            " (truncated at bounds)"
        } else {
            ""
        }
    ));

    out.push_str(&format!(
        "connectivity: {}\n",
        verdict_word(report.connectivity.holds, report.truncated, "holds", "fails")
    ));
    for (v, set) in &report.connectivity.mapping_sets {
        let names: Vec<&str> = set.iter().map(|&c| u.name(c)).collect();
        out.push_str(&format!(
            "  mapping set of {}: {{{}}}\n",
            u.name(*v),
            names.join(", ")
        ));
    }
    if let Some(r) = &report.connectivity.reason {
        out.push_str(&format!("  reason: {r}\n"));
    }

    out.push_str(&format!(
        "soundness: {}\n",
        verdict_word(report.soundness.sound, report.truncated, "sound", "unsound")
    ));
    let ls = &report.soundness.link_set;
    let fmt_pairs = |set: &std::collections::BTreeSet<(
        vpnet_core::SymbolId,
        vpnet_core::SymbolId,
    )>| {
        let parts: Vec<String> = set
            .iter()
            .map(|&(v, c)| format!("{}->{}", u.name(v), u.name(c)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    };
    out.push_str(&format!("  sustained links: {}\n", fmt_pairs(&ls.sustained)));
    out.push_str(&format!("  created links:   {}\n", fmt_pairs(&ls.created)));
    out.push_str(&format!("  broken links:    {}\n", fmt_pairs(&ls.broken)));
    let observed: Vec<&str> = report
        .soundness
        .observed_interfaces
        .iter()
        .map(|&c| u.name(c))
        .collect();
    out.push_str(&format!(
        "  observed interfaces: {{{}}}\n",
        observed.join(", ")
    ));
    if let Some(step) = report.soundness.failed_step {
        out.push_str(&format!("  failed at step {step}"));
        if let Some(r) = &report.soundness.reason {
            out.push_str(&format!(": {r}"));
        }
        out.push('\n');
    }
    if let Some(w) = &report.soundness.witness {
        out.push_str(&format!("  counterexample: {}\n", trace_line(net, &w.trace)));
    }

    out.push_str(&format!(
        "validity: {}\n",
        verdict_word(report.validity.valid, report.truncated, "valid", "invalid")
    ));
    if let Some(clause) = report.validity.failed_clause {
        out.push_str(&format!("  failed at clause {clause}"));
        if let Some(r) = &report.validity.reason {
            out.push_str(&format!(": {r}"));
        }
        out.push('\n');
    }
    if let Some(w) = &report.validity.witness {
        out.push_str(&format!("  counterexample: {}\n", trace_line(net, &w.trace)));
    }

    out
}

fn trace_line(net: &VpnNet, trace: &[(vpnet_core::TransitionId, Binding)]) -> String {
    let parts: Vec<String> = trace
        .iter()
        .map(|(t, b)| format!("{} {}", net.transition_name(*t), binding_label(net, b)))
        .collect();
    parts.join(" ; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use vpnet_core::decl::{ArcDecl, NetDecl, TransDecl};
    use vpnet_core::net::PlaceClass;
    use vpnet_core::space::{build_ct, ct_to_cg, ExplorationBounds};

    fn small_tree() -> ConfigTree {
        let mut d = NetDecl::new();
        d.place("a", 1, PlaceClass::Process)
            .place("b", 1, PlaceClass::Process);
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("b", &[&["eps"]]));
        d.transition(t);
        d.mark("a", &[&["eps"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        build_ct(&net, &ExplorationBounds::default()).unwrap()
    }

    #[test]
    fn single_node_tree_dot() {
        let mut d = NetDecl::new();
        d.place("a", 1, PlaceClass::Process);
        let net = VpnNet::from_decl(&d).unwrap();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        let dot = tree_to_dot(&ct);
        assert_eq!(dot.matches("n0 [").count(), 1);
        assert!(!dot.contains("->"), "no edges in a single-node tree");
    }

    #[test]
    fn json_roundtrip_is_identical() {
        let ct = small_tree();
        let g = tree_to_json(&ct);
        let text = serde_json::to_string_pretty(&g).unwrap();
        let back = json_to_graph(&text).unwrap();
        assert_eq!(g, back);
        let cg = ct_to_cg(&ct);
        let g2 = graph_to_json(&cg, ct.net(), ct.truncated());
        let text2 = serde_json::to_string(&g2).unwrap();
        assert_eq!(g2, json_to_graph(&text2).unwrap());
    }

    #[test]
    fn digests_are_stable() {
        let ct = small_tree();
        let a = config_digest(ct.net(), &ct.node(0).config);
        let b = config_digest(ct.net(), &ct.node(0).config);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
    }
}
