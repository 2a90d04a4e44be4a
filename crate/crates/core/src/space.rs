//! Configuration trees and graphs, and the behavior artifacts derived from
//! them: control/data/connectivity languages, mapping sets, binding
//! functions, connectivity sets and link sets.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::config::{gamma_added, gamma_pairs, gamma_removed, Binding, Configuration, Gamma, GammaDiff};
use crate::kernel::{enabled_bindings, fire, KernelError};
use crate::net::{TransitionId, ValidationReport, VpnNet};
use crate::symbol::SymbolId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("net fails validation with {} violation(s)", .0.violations.len())]
    InvalidNet(ValidationReport),
    #[error("configuration is not a node of the graph")]
    UnknownConfiguration,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// How revisited configurations end a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupMode {
    /// Any configuration seen anywhere before ends the branch.
    #[default]
    Global,
    /// Only a configuration already on the branch's own root path ends it.
    Path,
}

/// Exploration limits. Trees can be infinite (place creation is unbounded in
/// general), so truncation is tracked, never silent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationBounds {
    pub max_configs: usize,
    pub max_depth: usize,
    pub max_language_len: usize,
    pub dedup: DedupMode,
}

impl Default for ExplorationBounds {
    fn default() -> Self {
        ExplorationBounds {
            max_configs: 100_000,
            max_depth: 200,
            max_language_len: 8,
            dedup: DedupMode::Global,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Interior,
    /// No transition is enabled here.
    DeadlockLeaf,
    /// The configuration already occurred (per the dedup mode).
    DuplicateLeaf,
    /// Successors exist but were cut off by a bound.
    BoundLeaf,
}

impl NodeStatus {
    pub fn keyword(self) -> &'static str {
        match self {
            NodeStatus::Interior => "interior",
            NodeStatus::DeadlockLeaf => "deadlock",
            NodeStatus::DuplicateLeaf => "duplicate",
            NodeStatus::BoundLeaf => "bound",
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct CtEdge {
    pub parent: NodeId,
    pub transition: TransitionId,
    pub binding: Binding,
}

#[derive(Debug, Clone)]
pub struct CtNode {
    pub config: Configuration,
    pub parent: Option<CtEdge>,
    pub children: Vec<NodeId>,
    pub status: NodeStatus,
    pub depth: usize,
}

/// Labeled tree of reachable configurations. Nodes are held in BFS order, so
/// ids are deterministic for a given net and bounds.
#[derive(Debug, Clone)]
pub struct ConfigTree {
    net: Arc<VpnNet>,
    nodes: Vec<CtNode>,
    truncated: bool,
}

impl ConfigTree {
    pub fn net(&self) -> &VpnNet {
        &self.net
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &CtNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &CtNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether a bound cut off the exploration anywhere.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// All edges as (parent, child, transition, binding).
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, TransitionId, &Binding)> {
        self.nodes.iter().enumerate().filter_map(|(child, n)| {
            n.parent
                .as_ref()
                .map(|e| (e.parent, child, e.transition, &e.binding))
        })
    }

    /// Node ids from the root to `id`, inclusive.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(edge) = &self.nodes[cur].parent {
            cur = edge.parent;
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// The firing trace leading to `id`, replayable from the initial
    /// configuration.
    pub fn trace_to(&self, id: NodeId) -> Vec<(TransitionId, Binding)> {
        let mut trace = Vec::new();
        let mut cur = id;
        while let Some(edge) = &self.nodes[cur].parent {
            trace.push((edge.transition, edge.binding.clone()));
            cur = edge.parent;
        }
        trace.reverse();
        trace
    }

    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &CtNode)> {
        self.nodes()
            .filter(|(_, n)| !matches!(n.status, NodeStatus::Interior))
    }

    /// Root paths ending in a terminal (deadlocked) configuration: the
    /// complete runs of the modeled system.
    pub fn complete_paths(&self) -> Vec<Vec<NodeId>> {
        self.nodes()
            .filter(|(_, n)| n.status == NodeStatus::DeadlockLeaf)
            .map(|(id, _)| self.path_to(id))
            .collect()
    }

    /// All root-to-leaf paths, regardless of how the leaf ended.
    pub fn maximal_paths(&self) -> Vec<Vec<NodeId>> {
        self.nodes()
            .filter(|(_, n)| !matches!(n.status, NodeStatus::Interior))
            .map(|(id, _)| self.path_to(id))
            .collect()
    }
}

/// Breadth-first construction of the configuration tree under `bounds`.
///
/// A node whose configuration was already seen (per the dedup mode) becomes a
/// duplicate leaf and is not expanded. Nodes whose successors are cut off by
/// the depth or size bound become bound leaves and set the truncation flag.
pub fn build_ct(net: &VpnNet, bounds: &ExplorationBounds) -> Result<ConfigTree, SpaceError> {
    let report = net.validate();
    if !report.is_valid() {
        return Err(SpaceError::InvalidNet(report));
    }

    let net = Arc::new(net.clone());
    let root_cfg = net.initial_configuration();
    let mut nodes = vec![CtNode {
        config: root_cfg.clone(),
        parent: None,
        children: Vec::new(),
        status: NodeStatus::Interior,
        depth: 0,
    }];
    let mut seen: HashMap<Configuration, NodeId> = HashMap::new();
    seen.insert(root_cfg, 0);
    let mut queue: VecDeque<NodeId> = VecDeque::from([0]);
    let mut truncated = false;

    while let Some(id) = queue.pop_front() {
        let cfg = nodes[id].config.clone();
        let depth = nodes[id].depth;

        let mut successors: Vec<(TransitionId, Binding, Configuration)> = Vec::new();
        for (t, _) in net.transitions() {
            for binding in enabled_bindings(&net, t, &cfg)? {
                let child = fire(&net, t, &binding, &cfg)?;
                successors.push((t, binding, child));
            }
        }

        if successors.is_empty() {
            nodes[id].status = NodeStatus::DeadlockLeaf;
            continue;
        }
        if depth >= bounds.max_depth {
            nodes[id].status = NodeStatus::BoundLeaf;
            truncated = true;
            continue;
        }

        let mut budget_hit = false;
        for (t, binding, child_cfg) in successors {
            if nodes.len() >= bounds.max_configs {
                truncated = true;
                budget_hit = true;
                break;
            }
            let duplicate = match bounds.dedup {
                DedupMode::Global => seen.contains_key(&child_cfg),
                DedupMode::Path => {
                    let mut cur = Some(id);
                    let mut found = false;
                    while let Some(n) = cur {
                        if nodes[n].config == child_cfg {
                            found = true;
                            break;
                        }
                        cur = nodes[n].parent.as_ref().map(|e| e.parent);
                    }
                    found
                }
            };
            let child_id = nodes.len();
            nodes.push(CtNode {
                config: child_cfg.clone(),
                parent: Some(CtEdge {
                    parent: id,
                    transition: t,
                    binding,
                }),
                children: Vec::new(),
                status: if duplicate {
                    NodeStatus::DuplicateLeaf
                } else {
                    NodeStatus::Interior
                },
                depth: depth + 1,
            });
            nodes[id].children.push(child_id);
            if !duplicate {
                if bounds.dedup == DedupMode::Global {
                    seen.insert(child_cfg, child_id);
                }
                queue.push_back(child_id);
            }
        }
        // A node whose successor set was cut off is frontier, even when some
        // children made it in before the budget ran out.
        if budget_hit {
            nodes[id].status = NodeStatus::BoundLeaf;
        }
    }

    Ok(ConfigTree {
        net,
        nodes,
        truncated,
    })
}

/// Quotient of the tree by configuration equality: equal nodes merge into
/// one, edges keep their labels (the edge multiset is preserved modulo
/// endpoint merging). Node ids follow first appearance in BFS order.
#[derive(Debug, Clone)]
pub struct ConfigGraph {
    nodes: Vec<Configuration>,
    edges: Vec<(usize, usize, TransitionId, Binding)>,
    index: HashMap<Configuration, usize>,
}

impl ConfigGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, &Configuration)> {
        self.nodes.iter().enumerate()
    }

    pub fn node(&self, id: usize) -> &Configuration {
        &self.nodes[id]
    }

    pub fn node_id(&self, cfg: &Configuration) -> Option<usize> {
        self.index.get(cfg).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = &(usize, usize, TransitionId, Binding)> {
        self.edges.iter()
    }

    pub fn successors(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |(from, _, _, _)| *from == id)
            .map(|(_, to, _, _)| *to)
    }
}

pub fn ct_to_cg(ct: &ConfigTree) -> ConfigGraph {
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut nodes = Vec::new();
    for (_, node) in ct.nodes() {
        index.entry(node.config.clone()).or_insert_with(|| {
            nodes.push(node.config.clone());
            nodes.len() - 1
        });
    }
    let mut edges: Vec<(usize, usize, TransitionId, Binding)> = ct
        .edges()
        .map(|(p, c, t, b)| {
            (
                index[&ct.node(p).config],
                index[&ct.node(c).config],
                t,
                b.clone(),
            )
        })
        .collect();
    edges.sort();
    ConfigGraph {
        nodes,
        edges,
        index,
    }
}

/// All configurations reachable from `from` in the graph, including `from`
/// itself.
pub fn reachability_set(
    cg: &ConfigGraph,
    from: &Configuration,
) -> Result<BTreeSet<Configuration>, SpaceError> {
    let start = cg.node_id(from).ok_or(SpaceError::UnknownConfiguration)?;
    let mut visited = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for succ in cg.successors(n) {
            if visited.insert(succ) {
                queue.push_back(succ);
            }
        }
    }
    Ok(visited.into_iter().map(|i| cg.node(i).clone()).collect())
}

/// Where language sequences are anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Anchor {
    /// Sequences start at the initial configuration.
    #[default]
    Root,
    /// Sequences may start at any reachable configuration.
    Any,
}

/// The five behavior languages read off the tree, each prefix-closed and
/// truncated at a length bound plus a hard element cap.
///
/// Sequences are index-aligned: the k-th entry of a connectivity sequence is
/// the constraint function reached after the k-th firing of the matching
/// control sequence (the constant initial function is available from the
/// net), and the difference sequences pair up the same way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Languages {
    pub control: BTreeSet<Vec<TransitionId>>,
    pub data: BTreeSet<Vec<Binding>>,
    pub connectivity: BTreeSet<Vec<Gamma>>,
    pub new_link: BTreeSet<Vec<GammaDiff>>,
    pub broken_link: BTreeSet<Vec<GammaDiff>>,
    pub truncated: bool,
}

/// Default cap on the number of sequences materialized per language.
pub const DEFAULT_SEQUENCE_CAP: usize = 10_000;

pub fn languages(ct: &ConfigTree, max_len: usize) -> Languages {
    languages_with_options(ct, max_len, DEFAULT_SEQUENCE_CAP, Anchor::Root)
}

pub fn languages_with_options(
    ct: &ConfigTree,
    max_len: usize,
    cap: usize,
    anchor: Anchor,
) -> Languages {
    let mut langs = Languages {
        control: BTreeSet::new(),
        data: BTreeSet::new(),
        connectivity: BTreeSet::new(),
        new_link: BTreeSet::new(),
        broken_link: BTreeSet::new(),
        truncated: false,
    };
    let starts: Vec<NodeId> = match anchor {
        Anchor::Root => vec![ct.root()],
        Anchor::Any => ct.nodes().map(|(id, _)| id).collect(),
    };
    for start in starts {
        let mut stack: Vec<(NodeId, usize)> = vec![(start, 0)];
        // Running labels along the DFS path from `start`.
        let mut control: Vec<TransitionId> = Vec::new();
        let mut data: Vec<Binding> = Vec::new();
        let mut connectivity: Vec<Gamma> = Vec::new();
        let mut new_link: Vec<GammaDiff> = Vec::new();
        let mut broken_link: Vec<GammaDiff> = Vec::new();

        // Record the empty sequence at the anchor.
        if !langs.record(&control, &data, &connectivity, &new_link, &broken_link, cap) {
            return langs;
        }

        while let Some((node, next_child)) = stack.pop() {
            let n = ct.node(node);
            let done = control.len() >= max_len || next_child >= n.children.len();
            if done {
                // Leaving this frame for good: retract the edge that led here.
                if node != start {
                    control.pop();
                    data.pop();
                    connectivity.pop();
                    new_link.pop();
                    broken_link.pop();
                }
                continue;
            }
            let child = n.children[next_child];
            stack.push((node, next_child + 1));
            let edge = ct.node(child).parent.as_ref().expect("child has an edge");
            let parent_gamma = n.config.gamma();
            let child_gamma = ct.node(child).config.gamma();
            control.push(edge.transition);
            data.push(edge.binding.clone());
            connectivity.push(child_gamma.clone());
            new_link.push(gamma_added(parent_gamma, child_gamma));
            broken_link.push(gamma_removed(parent_gamma, child_gamma));
            if !langs.record(&control, &data, &connectivity, &new_link, &broken_link, cap) {
                return langs;
            }
            stack.push((child, 0));
        }
    }
    langs
}

impl Languages {
    /// Records one sequence in every language; `false` once the cap is hit.
    fn record(
        &mut self,
        control: &[TransitionId],
        data: &[Binding],
        connectivity: &[Gamma],
        new_link: &[GammaDiff],
        broken_link: &[GammaDiff],
        cap: usize,
    ) -> bool {
        if self.control.len() >= cap {
            self.truncated = true;
            return false;
        }
        self.control.insert(control.to_vec());
        self.data.insert(data.to_vec());
        self.connectivity.insert(connectivity.to_vec());
        self.new_link.insert(new_link.to_vec());
        self.broken_link.insert(broken_link.to_vec());
        true
    }
}

/// Filters every sequence down to the symbols in `keep`.
pub fn project_language<T: Ord + Clone>(
    language: &BTreeSet<Vec<T>>,
    keep: &BTreeSet<T>,
) -> BTreeSet<Vec<T>> {
    language
        .iter()
        .map(|seq| {
            seq.iter()
                .filter(|s| keep.contains(s))
                .cloned()
                .collect::<Vec<T>>()
        })
        .collect()
}

/// Inverse image of projection: all sequences over `alphabet`, up to
/// `max_len`, whose projection onto `onto` is a member of `language`.
pub fn extend_language<T: Ord + Clone>(
    language: &BTreeSet<Vec<T>>,
    onto: &BTreeSet<T>,
    alphabet: &BTreeSet<T>,
    max_len: usize,
) -> BTreeSet<Vec<T>> {
    // Prefixes of members, used to prune the enumeration.
    let mut viable: BTreeSet<Vec<T>> = BTreeSet::new();
    for seq in language {
        for k in 0..=seq.len() {
            viable.insert(seq[..k].to_vec());
        }
    }
    let mut out = BTreeSet::new();
    let mut frontier: Vec<(Vec<T>, Vec<T>)> = vec![(Vec::new(), Vec::new())];
    while let Some((seq, proj)) = frontier.pop() {
        if language.contains(&proj) {
            out.insert(seq.clone());
        }
        if seq.len() == max_len {
            continue;
        }
        for sym in alphabet {
            let mut next_seq = seq.clone();
            next_seq.push(sym.clone());
            let mut next_proj = proj.clone();
            if onto.contains(sym) {
                next_proj.push(sym.clone());
                if !viable.contains(&next_proj) {
                    continue;
                }
            }
            frontier.push((next_seq, next_proj));
        }
    }
    out
}

/// All constants the variable is bound to across the tree's edges.
pub fn mapping_set(ct: &ConfigTree, var: SymbolId) -> Result<BTreeSet<SymbolId>, SpaceError> {
    let u = ct.net().universe();
    if !u.ids().any(|id| id == var) || !u.is_variable(var) {
        return Err(SpaceError::UnknownVariable(
            u.ids()
                .find(|&id| id == var)
                .map(|id| u.name(id).to_string())
                .unwrap_or_else(|| format!("{var}")),
        ));
    }
    let mut out = BTreeSet::new();
    for (_, _, _, binding) in ct.edges() {
        if let Some(c) = binding.get(var) {
            out.insert(c);
        }
    }
    Ok(out)
}

/// All bindings under which the transition fires anywhere in the tree.
pub fn binding_function(ct: &ConfigTree, t: TransitionId) -> Result<BTreeSet<Binding>, SpaceError> {
    if ct.net().transition(t).is_none() {
        return Err(SpaceError::UnknownTransition(format!("{t:?}")));
    }
    Ok(ct
        .edges()
        .filter(|(_, _, et, _)| *et == t)
        .map(|(_, _, _, b)| b.clone())
        .collect())
}

/// The initial constraint function plus every constraint function of a
/// reachable configuration.
pub fn connectivity_set(ct: &ConfigTree) -> BTreeSet<Gamma> {
    let mut out = BTreeSet::new();
    out.insert(ct.net().gamma0().clone());
    for (_, node) in ct.nodes() {
        out.insert(node.config.gamma().clone());
    }
    out
}

/// Sustained, created and broken links observed across the tree.
///
/// Created links are pairs added by some firing, broken links are pairs
/// removed by some firing, and sustained links are pairs that occur in some
/// reachable constraint function (the initial one included) and are never
/// broken anywhere. A pair can be both created and sustained; a pair removed
/// on any path is never sustained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkSet {
    pub sustained: GammaDiff,
    pub created: GammaDiff,
    pub broken: GammaDiff,
}

impl LinkSet {
    /// Constants occurring in any of the three parts: the actual interfaces
    /// the system ever links to.
    pub fn constants(&self) -> BTreeSet<SymbolId> {
        self.sustained
            .iter()
            .chain(self.created.iter())
            .chain(self.broken.iter())
            .map(|&(_, c)| c)
            .collect()
    }
}

pub fn link_set(ct: &ConfigTree) -> LinkSet {
    let mut created = GammaDiff::new();
    let mut broken = GammaDiff::new();
    for (parent, child, _, _) in ct.edges() {
        let before = ct.node(parent).config.gamma();
        let after = ct.node(child).config.gamma();
        created.extend(gamma_added(before, after));
        broken.extend(gamma_removed(before, after));
    }
    let mut ever_present = GammaDiff::new();
    for gamma in connectivity_set(ct) {
        ever_present.extend(gamma_pairs(&gamma));
    }
    let sustained = ever_present.difference(&broken).copied().collect();
    LinkSet {
        sustained,
        created,
        broken,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decl::{ArcDecl, NetDecl, TransDecl};
    use crate::net::PlaceClass;
    use crate::term::{Guard, LinkClause, LinkOp, LinkRule};

    fn tiny_net() -> VpnNet {
        let mut d = NetDecl::new();
        d.place("p1", 1, PlaceClass::Process)
            .place("q", 1, PlaceClass::Process)
            .variable("v");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("v", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("q", &[&["eps"]]));
        d.transition(t);
        d.gamma_entry("v", &["p1"]);
        d.mark("p1", &[&["eps"]]);
        VpnNet::from_decl(&d).unwrap()
    }

    /// One transition that adds a link (to a declared place) and stops.
    fn single_add_net() -> VpnNet {
        let mut d = NetDecl::new();
        d.place("c", 1, PlaceClass::Process)
            .place("src", 1, PlaceClass::Process)
            .variable("w");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("src", &[&["w"]]));
        t.outputs.push(ArcDecl::empty("w"));
        t.rho = LinkRule {
            clauses: vec![LinkClause {
                condition: Guard::True,
                actions: vec![("w".into(), LinkOp::Add)],
            }],
        };
        d.transition(t);
        d.mark("src", &[&["c"]]);
        VpnNet::from_decl(&d).unwrap()
    }

    fn sym(net: &VpnNet, name: &str) -> SymbolId {
        net.universe().lookup(name).unwrap()
    }

    #[test]
    fn deadlocked_root_is_single_node() {
        let mut d = NetDecl::new();
        d.place("p", 1, PlaceClass::Process);
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("p", &[&["eps"]]));
        d.transition(t);
        let net = VpnNet::from_decl(&d).unwrap();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        assert_eq!(ct.len(), 1);
        assert_eq!(ct.node(ct.root()).status, NodeStatus::DeadlockLeaf);
        assert!(!ct.truncated());
        let cg = ct_to_cg(&ct);
        let r = reachability_set(&cg, &net.initial_configuration()).unwrap();
        assert_eq!(r.len(), 1, "deadlocked root reaches only itself");
    }

    #[test]
    fn tiny_net_tree_and_languages() {
        let net = tiny_net();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        assert_eq!(ct.len(), 2);
        let t = net.transition_id("t").unwrap();
        let langs = languages(&ct, 4);
        assert!(langs.control.contains(&vec![]));
        assert!(langs.control.contains(&vec![t]));
        assert_eq!(langs.control.len(), 2);
        // Control and data sequences align index-wise.
        for c in &langs.control {
            assert!(langs.data.iter().any(|d| d.len() == c.len()));
        }
        // Zero-length languages collapse to the empty sequence.
        let l0 = languages(&ct, 0);
        assert_eq!(l0.control, [vec![]].into());
        assert_eq!(l0.data, [vec![]].into());
        assert_eq!(l0.connectivity, [vec![]].into());
        assert_eq!(l0.new_link, [vec![]].into());
        assert_eq!(l0.broken_link, [vec![]].into());
        // Mapping set and binding function of the single edge.
        assert_eq!(
            mapping_set(&ct, sym(&net, "v")).unwrap(),
            [sym(&net, "p1")].into()
        );
        assert_eq!(binding_function(&ct, t).unwrap().len(), 1);
        // Unknown names are rejected; constants are not variables.
        assert!(matches!(
            mapping_set(&ct, sym(&net, "p1")),
            Err(SpaceError::UnknownVariable(_))
        ));
        assert!(matches!(
            binding_function(&ct, TransitionId(99)),
            Err(SpaceError::UnknownTransition(_))
        ));
    }

    #[test]
    fn no_rho_means_constant_connectivity() {
        let net = tiny_net();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        let gammas = connectivity_set(&ct);
        assert_eq!(gammas.len(), 1);
        let ls = link_set(&ct);
        assert!(ls.created.is_empty());
        assert!(ls.broken.is_empty());
        assert_eq!(ls.sustained, gamma_pairs(net.gamma0()));
        // Every difference sequence is a sequence of empty sets.
        let langs = languages(&ct, 4);
        for seq in langs.new_link.iter().chain(langs.broken_link.iter()) {
            assert!(seq.iter().all(|d| d.is_empty()));
        }
    }

    #[test]
    fn single_add_rule_link_set() {
        let net = single_add_net();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        let ls = link_set(&ct);
        let pair = (sym(&net, "w"), sym(&net, "c"));
        assert_eq!(ls.created, [pair].into());
        assert!(ls.broken.is_empty());
        assert!(ls.sustained.contains(&pair));
        // One add rule fired once: initial function plus its extension.
        assert_eq!(connectivity_set(&ct).len(), 2);
    }

    #[test]
    fn duplicate_detection_merges_in_graph() {
        // Two transitions from the root both reach the same configuration.
        let mut d = NetDecl::new();
        d.place("a", 1, PlaceClass::Process)
            .place("b", 1, PlaceClass::Process);
        let mut t1 = TransDecl::new("t1");
        t1.inputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        t1.outputs.push(ArcDecl::tuples("b", &[&["eps"]]));
        let mut t2 = TransDecl::new("t2");
        t2.inputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        t2.outputs.push(ArcDecl::tuples("b", &[&["eps"]]));
        d.transition(t1).transition(t2);
        d.mark("a", &[&["eps"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        assert_eq!(ct.len(), 3, "root plus two children");
        let cg = ct_to_cg(&ct);
        assert_eq!(cg.node_count(), 2, "equal children merge");
        assert!(cg.node_count() <= ct.len());
    }

    #[test]
    fn projection_and_extension() {
        let l: BTreeSet<Vec<u8>> = [vec![1, 2, 1]].into();
        let keep: BTreeSet<u8> = [1].into();
        assert_eq!(project_language(&l, &keep), [vec![1, 1]].into());
        // Identity when keeping the full alphabet.
        let full: BTreeSet<u8> = [1, 2].into();
        assert_eq!(project_language(&l, &full), l);
        // Everything maps to the empty sequence under an empty target.
        assert_eq!(
            project_language(&l, &BTreeSet::new()),
            [vec![]].into()
        );
        // Extension recovers supersequences.
        let short: BTreeSet<Vec<u8>> = [vec![1]].into();
        let onto: BTreeSet<u8> = [1].into();
        let ext = extend_language(&short, &onto, &full, 2);
        assert!(ext.contains(&vec![1]));
        assert!(ext.contains(&vec![1, 2]));
        assert!(ext.contains(&vec![2, 1]));
        assert!(!ext.contains(&vec![2, 2]));
        assert!(!ext.contains(&vec![1, 1]));
    }

    #[test]
    fn reachability_includes_self_and_chain() {
        let net = tiny_net();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        let cg = ct_to_cg(&ct);
        let r = reachability_set(&cg, &net.initial_configuration()).unwrap();
        assert_eq!(r.len(), 2);
        // Unknown configurations are rejected.
        let bogus = Configuration::new(Default::default(), Default::default(), Default::default());
        assert!(matches!(
            reachability_set(&cg, &bogus),
            Err(SpaceError::UnknownConfiguration)
        ));
        // Idempotence.
        assert_eq!(r, reachability_set(&cg, &net.initial_configuration()).unwrap());
    }

    #[test]
    fn depth_bound_marks_truncation() {
        // A transition that keeps accumulating tokens never revisits a
        // configuration and runs into the depth bound.
        let mut d = NetDecl::new();
        d.place("a", 1, PlaceClass::Process)
            .place("b", 1, PlaceClass::Process);
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        t.outputs.push(ArcDecl {
            other_end: "a".into(),
            expr: vec![(1, vec!["eps".into()])],
        });
        t.outputs.push(ArcDecl {
            other_end: "b".into(),
            expr: vec![(1, vec!["eps".into()])],
        });
        d.transition(t);
        d.mark("a", &[&["eps"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let bounds = ExplorationBounds {
            max_depth: 3,
            ..Default::default()
        };
        let ct = build_ct(&net, &bounds).unwrap();
        assert!(ct.truncated());
        assert!(ct.nodes().any(|(_, n)| n.status == NodeStatus::BoundLeaf));
    }

    #[test]
    fn self_loop_becomes_duplicate_leaf() {
        let mut d = NetDecl::new();
        d.place("a", 1, PlaceClass::Process);
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        d.transition(t);
        d.mark("a", &[&["eps"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        assert!(!ct.truncated());
        assert_eq!(ct.len(), 2);
        assert_eq!(ct.node(1).status, NodeStatus::DuplicateLeaf);
    }

    #[test]
    fn edges_replay_under_fire() {
        let net = single_add_net();
        let ct = build_ct(&net, &ExplorationBounds::default()).unwrap();
        for (parent, child, t, binding) in ct.edges() {
            let replayed = fire(&net, t, binding, &ct.node(parent).config).unwrap();
            assert_eq!(replayed, ct.node(child).config);
        }
    }
}
