//! Component nets, interaction structure nets, multi-component fusion,
//! pairwise merge operators and bounded liveness checking.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::config::Configuration;
use crate::decl::{ArcDecl, NetDecl, PlaceDecl, TransDecl, TupleLit};
use crate::net::{BuildError, PlaceClass, TransClass, TransitionId, VpnNet};
use crate::space::{build_ct, ct_to_cg, ExplorationBounds, NodeStatus, SpaceError};
use crate::symbol::SymbolId;
use crate::term::Guard;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("kind conflict on `{name}`: {detail}")]
    KindConflict { name: String, detail: String },
    #[error("class conflict on `{name}`: declared both {a} and {b}")]
    ClassConflict {
        name: String,
        a: &'static str,
        b: &'static str,
    },
    #[error("guard conflict on transition `{0}`: parts declare different non-trivial guards")]
    GuardConflict(String),
    #[error("link-rule conflict on transition `{0}`")]
    RhoConflict(String),
    #[error("arc conflict between `{transition}` and `{end}`: parts declare different expressions")]
    ArcConflict { transition: String, end: String },
    #[error("nets share place `{0}`")]
    SharedPlace(String),
    #[error("nets share transition `{0}`")]
    SharedTransition(String),
    #[error("missing transition `{0}`")]
    MissingTransition(String),
    #[error("missing place `{0}`")]
    MissingPlace(String),
    #[error("merge pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("component rule violation: {0}")]
    ClassRule(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// A component net: one component's internal process, with classified places
/// and transitions, plus its declared final places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentNet {
    pub name: String,
    pub decl: NetDecl,
    pub finals: Vec<String>,
}

impl ComponentNet {
    pub fn build(&self) -> Result<VpnNet, BuildError> {
        VpnNet::from_decl(&self.decl)
    }

    /// Classification rules: at least one initial place (an initial/final
    /// class place that is initially marked), at least one final place of the
    /// initial/final class, and every interaction transition's postset made of
    /// virtual places or interface-class places only.
    pub fn validate(&self) -> Result<(), ComposeError> {
        let classes: BTreeMap<&str, PlaceClass> = self
            .decl
            .places
            .iter()
            .map(|p| (p.name.as_str(), p.class))
            .collect();
        let marked: BTreeSet<&str> = self
            .decl
            .marking
            .iter()
            .filter(|(_, toks)| !toks.is_empty())
            .map(|(p, _)| p.as_str())
            .collect();
        let has_initial = self
            .decl
            .places
            .iter()
            .any(|p| p.class == PlaceClass::InitialFinal && marked.contains(p.name.as_str()));
        if !has_initial {
            return Err(ComposeError::ClassRule(format!(
                "component `{}` has no marked initial/final place",
                self.name
            )));
        }
        if self.finals.is_empty() {
            return Err(ComposeError::ClassRule(format!(
                "component `{}` declares no final place",
                self.name
            )));
        }
        for f in &self.finals {
            match classes.get(f.as_str()) {
                Some(PlaceClass::InitialFinal) => {}
                Some(_) => {
                    return Err(ComposeError::ClassRule(format!(
                        "final place `{f}` of component `{}` is not of the initial/final class",
                        self.name
                    )))
                }
                None => {
                    return Err(ComposeError::ClassRule(format!(
                        "final place `{f}` of component `{}` is not declared",
                        self.name
                    )))
                }
            }
        }
        let vars: BTreeSet<&str> = self.decl.vars.iter().map(String::as_str).collect();
        for t in &self.decl.transitions {
            if t.class != TransClass::Interaction {
                continue;
            }
            for arc in &t.outputs {
                let end = arc.other_end.as_str();
                if vars.contains(end) {
                    continue;
                }
                match classes.get(end) {
                    Some(PlaceClass::Interface) => {}
                    _ => {
                        return Err(ComposeError::ClassRule(format!(
                            "interaction transition `{}` of `{}` outputs to `{end}`, \
                             which is neither a virtual place nor an interface place",
                            t.name, self.name
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

/// An interaction structure net: interface places and interaction transitions
/// connecting components. Internal interaction transitions owned by the
/// components are referenced by name in `members`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionStructureNet {
    pub name: String,
    pub decl: NetDecl,
    /// Names of component transitions that take part in the interaction.
    pub members: Vec<String>,
    /// Names of the components this net connects.
    pub connects: Vec<String>,
}

impl InteractionStructureNet {
    /// An interaction structure net owns only interface-class places, and the
    /// transitions it owns are interaction transitions, not process ones.
    pub fn validate(&self) -> Result<(), ComposeError> {
        for p in &self.decl.places {
            if p.class != PlaceClass::Interface {
                return Err(ComposeError::ClassRule(format!(
                    "interaction structure net `{}` owns non-interface place `{}`",
                    self.name, p.name
                )));
            }
        }
        for t in &self.decl.transitions {
            if t.class == TransClass::Process {
                return Err(ComposeError::ClassRule(format!(
                    "interaction structure net `{}` owns process transition `{}`",
                    self.name, t.name
                )));
            }
        }
        Ok(())
    }
}

/// A fused multi-component net, keeping its parts for per-component checks.
#[derive(Debug, Clone)]
pub struct MultiComponentNet {
    pub components: Vec<ComponentNet>,
    pub interactions: Vec<InteractionStructureNet>,
    pub net: VpnNet,
    /// Final places of all components, resolved in the fused universe.
    pub finals: BTreeSet<SymbolId>,
    /// Virtual interface places declared by the interaction structure nets.
    pub interface_vars: BTreeSet<SymbolId>,
    /// Interaction transitions: those classed interaction/external plus the
    /// members referenced by interaction structure nets.
    pub interaction_transitions: BTreeSet<TransitionId>,
}

/// Merges part declarations into one, checking that shared names agree.
pub fn merge_decls(parts: &[&NetDecl]) -> Result<NetDecl, ComposeError> {
    let mut consts: BTreeMap<String, usize> = BTreeMap::new();
    let mut vars: BTreeSet<String> = BTreeSet::new();
    let mut places: BTreeMap<String, PlaceDecl> = BTreeMap::new();
    let mut transitions: BTreeMap<String, TransDecl> = BTreeMap::new();
    let mut gamma: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut marking: BTreeMap<String, Vec<TupleLit>> = BTreeMap::new();
    let mut interfaces: BTreeSet<String> = BTreeSet::new();

    for part in parts {
        for c in &part.consts {
            if let Some(&arity) = consts.get(&c.name) {
                if arity != c.arity {
                    return Err(ComposeError::KindConflict {
                        name: c.name.clone(),
                        detail: format!("constant arities {arity} and {}", c.arity),
                    });
                }
            }
            consts.insert(c.name.clone(), c.arity);
        }
        for v in &part.vars {
            vars.insert(v.clone());
        }
        for p in &part.places {
            match places.get(&p.name) {
                None => {
                    places.insert(p.name.clone(), p.clone());
                }
                Some(prev) => {
                    if prev.arity != p.arity {
                        return Err(ComposeError::KindConflict {
                            name: p.name.clone(),
                            detail: format!("place arities {} and {}", prev.arity, p.arity),
                        });
                    }
                    if prev.class != p.class {
                        return Err(ComposeError::ClassConflict {
                            name: p.name.clone(),
                            a: prev.class.keyword(),
                            b: p.class.keyword(),
                        });
                    }
                }
            }
        }
        for t in &part.transitions {
            match transitions.get_mut(&t.name) {
                None => {
                    transitions.insert(t.name.clone(), t.clone());
                }
                Some(prev) => merge_transition(prev, t)?,
            }
        }
        for (v, range) in &part.gamma {
            gamma
                .entry(v.clone())
                .or_default()
                .extend(range.iter().cloned());
        }
        for (p, toks) in &part.marking {
            marking.entry(p.clone()).or_default().extend(toks.clone());
        }
        interfaces.extend(part.interfaces.iter().cloned());
    }

    // Place declarations subsume constant declarations of the same name.
    for (name, place) in &places {
        if let Some(&arity) = consts.get(name) {
            if arity != place.arity {
                return Err(ComposeError::KindConflict {
                    name: name.clone(),
                    detail: format!("constant arity {arity}, place arity {}", place.arity),
                });
            }
            consts.remove(name);
        }
        if vars.contains(name) {
            return Err(ComposeError::KindConflict {
                name: name.clone(),
                detail: "declared both place and variable".into(),
            });
        }
    }
    for v in &vars {
        if consts.contains_key(v) {
            return Err(ComposeError::KindConflict {
                name: v.clone(),
                detail: "declared both constant and variable".into(),
            });
        }
    }

    let mut out = NetDecl::new();
    out.consts = consts
        .into_iter()
        .map(|(name, arity)| crate::decl::ConstDecl { name, arity })
        .collect();
    out.vars = vars.into_iter().collect();
    out.places = places.into_values().collect();
    out.transitions = transitions.into_values().collect();
    out.gamma = gamma
        .into_iter()
        .map(|(v, range)| (v, range.into_iter().collect()))
        .collect();
    out.marking = marking.into_iter().collect();
    out.interfaces = interfaces.into_iter().collect();
    out.canonicalize();
    Ok(out)
}

/// Identifies two same-named transitions. Arcs union (agreeing on shared
/// endpoints), defaults yield, and conflicting non-trivial guards, rules or
/// classes are rejected so that composition stays order-insensitive.
fn merge_transition(into: &mut TransDecl, from: &TransDecl) -> Result<(), ComposeError> {
    if into.guard != from.guard {
        if into.guard.is_true() {
            into.guard = from.guard.clone();
        } else if !from.guard.is_true() {
            return Err(ComposeError::GuardConflict(into.name.clone()));
        }
    }
    if into.rho != from.rho {
        if into.rho.is_empty() {
            into.rho = from.rho.clone();
        } else if !from.rho.is_empty() {
            return Err(ComposeError::RhoConflict(into.name.clone()));
        }
    }
    if into.class != from.class {
        if into.class == TransClass::Process {
            into.class = from.class;
        } else if from.class != TransClass::Process {
            return Err(ComposeError::ClassConflict {
                name: into.name.clone(),
                a: into.class.keyword(),
                b: from.class.keyword(),
            });
        }
    }
    for (mine, theirs) in [
        (&mut into.inputs, &from.inputs),
        (&mut into.outputs, &from.outputs),
    ] {
        for arc in theirs {
            match mine.iter().find(|a| a.other_end == arc.other_end) {
                None => mine.push(arc.clone()),
                Some(existing) => {
                    let mut a = existing.expr.clone();
                    let mut b = arc.expr.clone();
                    a.sort();
                    b.sort();
                    if a != b {
                        return Err(ComposeError::ArcConflict {
                            transition: into.name.clone(),
                            end: arc.other_end.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Fuses component nets and interaction structure nets into one net: the
/// union of places, transitions, arcs, constraint functions, guards, link
/// rules and markings, with same-named elements identified.
pub fn compose_mcn(
    components: &[ComponentNet],
    interactions: &[InteractionStructureNet],
) -> Result<MultiComponentNet, ComposeError> {
    for cn in components {
        cn.validate()?;
    }
    for isn in interactions {
        isn.validate()?;
    }
    let parts: Vec<&NetDecl> = components
        .iter()
        .map(|c| &c.decl)
        .chain(interactions.iter().map(|i| &i.decl))
        .collect();
    let fused_decl = merge_decls(&parts)?;
    let net = VpnNet::from_decl(&fused_decl)?;

    let mut finals = BTreeSet::new();
    for cn in components {
        for f in &cn.finals {
            let id = net
                .universe()
                .lookup(f)
                .ok_or_else(|| ComposeError::MissingPlace(f.clone()))?;
            finals.insert(id);
        }
    }
    let mut interaction_transitions = BTreeSet::new();
    for (id, t) in net.transitions() {
        if matches!(t.class, TransClass::Interaction | TransClass::External) {
            interaction_transitions.insert(id);
        }
    }
    for isn in interactions {
        for name in isn
            .members
            .iter()
            .chain(isn.decl.transitions.iter().map(|t| &t.name))
        {
            let id = net
                .transition_id(name)
                .ok_or_else(|| ComposeError::MissingTransition(name.clone()))?;
            interaction_transitions.insert(id);
        }
    }
    // The interface variables are the virtual places touched by the
    // interaction transitions.
    let mut interface_vars = BTreeSet::new();
    for &tid in &interaction_transitions {
        let t = net.transition(tid).expect("transition exists");
        for (end, _) in t.inputs.iter().chain(t.outputs.iter()) {
            if net.universe().is_variable(*end) {
                interface_vars.insert(*end);
            }
        }
    }

    Ok(MultiComponentNet {
        components: components.to_vec(),
        interactions: interactions.to_vec(),
        net,
        finals,
        interface_vars,
        interaction_transitions,
    })
}

/// Wraps a bare net as a single-component system, using its top-level final
/// and interface declarations.
pub fn mcn_from_net(decl: &NetDecl, finals: &[String]) -> Result<MultiComponentNet, ComposeError> {
    let net = VpnNet::from_decl(decl)?;
    let mut final_ids = BTreeSet::new();
    for f in finals {
        let id = net
            .universe()
            .lookup(f)
            .ok_or_else(|| ComposeError::MissingPlace(f.clone()))?;
        final_ids.insert(id);
    }
    let mut interaction_transitions = BTreeSet::new();
    for (id, t) in net.transitions() {
        if matches!(t.class, TransClass::Interaction | TransClass::External) {
            interaction_transitions.insert(id);
        }
    }
    // Every variable used as a virtual place counts as an interface variable
    // when no interaction structure is declared.
    let mut interface_vars = BTreeSet::new();
    for (_, t) in net.transitions() {
        for (end, _) in t.inputs.iter().chain(t.outputs.iter()) {
            if net.universe().is_variable(*end) {
                interface_vars.insert(*end);
            }
        }
    }
    Ok(MultiComponentNet {
        components: Vec::new(),
        interactions: Vec::new(),
        net,
        finals: final_ids,
        interface_vars,
        interaction_transitions,
    })
}

fn disjoint_places(n1: &NetDecl, n2: &NetDecl) -> Result<(), ComposeError> {
    let left: BTreeSet<&str> = n1.places.iter().map(|p| p.name.as_str()).collect();
    for p in &n2.places {
        if left.contains(p.name.as_str()) {
            return Err(ComposeError::SharedPlace(p.name.clone()));
        }
    }
    Ok(())
}

fn require_transition(decl: &NetDecl, name: &str) -> Result<(), ComposeError> {
    if decl.transitions.iter().any(|t| t.name == name) {
        Ok(())
    } else {
        Err(ComposeError::MissingTransition(name.to_string()))
    }
}

fn require_place(decl: &NetDecl, name: &str) -> Result<(), ComposeError> {
    if decl.places.iter().any(|p| p.name == name) {
        Ok(())
    } else {
        Err(ComposeError::MissingPlace(name.to_string()))
    }
}

fn payload_arity(payload: &[TupleLit]) -> usize {
    payload.first().map(|(_, t)| t.len()).unwrap_or(1)
}

/// Asynchronous communication merge: a producer in the first net feeds a
/// buffer, a bridging transition moves the data to a second buffer, and a
/// consumer in the second net drains it. The bridge guard is the conjunction
/// of whatever guards the parts already declare for it plus the spec's own.
#[derive(Debug, Clone)]
pub struct AsyncMergeSpec {
    pub producer: String,
    pub consumer: String,
    pub buffer_from: String,
    pub buffer_to: String,
    pub bridge: String,
    pub guard: Guard<String>,
    pub payload: Vec<TupleLit>,
}

pub fn merge_async(
    n1: &NetDecl,
    n2: &NetDecl,
    spec: &AsyncMergeSpec,
) -> Result<VpnNet, ComposeError> {
    disjoint_places(n1, n2)?;
    require_transition(n1, &spec.producer)?;
    require_transition(n2, &spec.consumer)?;
    let mut merged = merge_decls(&[n1, n2])?;
    let arity = payload_arity(&spec.payload);
    for buffer in [&spec.buffer_from, &spec.buffer_to] {
        if merged.places.iter().any(|p| &p.name == buffer) {
            return Err(ComposeError::SharedPlace(buffer.clone()));
        }
        merged.place(buffer, arity, PlaceClass::Interface);
    }
    attach_output(&mut merged, &spec.producer, &spec.buffer_from, &spec.payload);
    attach_input(&mut merged, &spec.consumer, &spec.buffer_to, &spec.payload);
    let bridge = ensure_transition(&mut merged, &spec.bridge);
    conjoin_guard(bridge, &spec.guard);
    attach_input(&mut merged, &spec.bridge, &spec.buffer_from, &spec.payload);
    attach_output(&mut merged, &spec.bridge, &spec.buffer_to, &spec.payload);
    merged.canonicalize();
    Ok(VpnNet::from_decl(&merged)?)
}

/// Synchronous communication merge: one shared transition consumes from both
/// nets at once (and optionally hands tokens back), with guard conjunction.
#[derive(Debug, Clone)]
pub struct SyncMergeSpec {
    pub bridge: String,
    pub guard: Guard<String>,
    pub take_left: (String, Vec<TupleLit>),
    pub take_right: (String, Vec<TupleLit>),
    pub give_left: Option<(String, Vec<TupleLit>)>,
    pub give_right: Option<(String, Vec<TupleLit>)>,
}

pub fn merge_sync(n1: &NetDecl, n2: &NetDecl, spec: &SyncMergeSpec) -> Result<VpnNet, ComposeError> {
    disjoint_places(n1, n2)?;
    require_place(n1, &spec.take_left.0)?;
    require_place(n2, &spec.take_right.0)?;
    if let Some((p, _)) = &spec.give_left {
        require_place(n1, p)?;
    }
    if let Some((p, _)) = &spec.give_right {
        require_place(n2, p)?;
    }
    let mut merged = merge_decls(&[n1, n2])?;
    let bridge = ensure_transition(&mut merged, &spec.bridge);
    conjoin_guard(bridge, &spec.guard);
    attach_input(&mut merged, &spec.bridge, &spec.take_left.0, &spec.take_left.1);
    attach_input(
        &mut merged,
        &spec.bridge,
        &spec.take_right.0,
        &spec.take_right.1,
    );
    if let Some((p, e)) = &spec.give_left {
        attach_output(&mut merged, &spec.bridge, p, e);
    }
    if let Some((p, e)) = &spec.give_right {
        attach_output(&mut merged, &spec.bridge, p, e);
    }
    merged.canonicalize();
    Ok(VpnNet::from_decl(&merged)?)
}

/// Request-response merge over a shared virtual place: the requester's send
/// and receive transitions and the responder's receive and send transitions
/// all touch the shared variable; merging unions the nets and the variable's
/// constraint entries.
#[derive(Debug, Clone)]
pub struct SharedPlaceSpec {
    pub shared: String,
    pub requester_send: String,
    pub requester_recv: String,
    pub responder_recv: String,
    pub responder_send: String,
}

pub fn merge_shared_virtual(
    n1: &NetDecl,
    n2: &NetDecl,
    spec: &SharedPlaceSpec,
) -> Result<VpnNet, ComposeError> {
    let left: BTreeSet<&str> = n1.transitions.iter().map(|t| t.name.as_str()).collect();
    for t in &n2.transitions {
        if left.contains(t.name.as_str()) {
            return Err(ComposeError::SharedTransition(t.name.clone()));
        }
    }
    for (decl, var) in [(n1, &spec.shared), (n2, &spec.shared)] {
        if !decl.vars.contains(var) {
            return Err(ComposeError::PatternMismatch(format!(
                "shared virtual place `{var}` is not declared in both nets"
            )));
        }
    }
    let touches = |decl: &NetDecl, trans: &str, output: bool| -> Result<(), ComposeError> {
        let t = decl
            .transitions
            .iter()
            .find(|t| t.name == trans)
            .ok_or_else(|| ComposeError::MissingTransition(trans.to_string()))?;
        let arcs = if output { &t.outputs } else { &t.inputs };
        if arcs.iter().any(|a| a.other_end == spec.shared) {
            Ok(())
        } else {
            Err(ComposeError::PatternMismatch(format!(
                "transition `{trans}` has no {} arc on `{}`",
                if output { "output" } else { "input" },
                spec.shared
            )))
        }
    };
    touches(n1, &spec.requester_send, true)?;
    touches(n1, &spec.requester_recv, false)?;
    touches(n2, &spec.responder_recv, false)?;
    touches(n2, &spec.responder_send, true)?;
    let merged = merge_decls(&[n1, n2])?;
    Ok(VpnNet::from_decl(&merged)?)
}

fn ensure_transition<'a>(decl: &'a mut NetDecl, name: &str) -> &'a mut TransDecl {
    if let Some(pos) = decl.transitions.iter().position(|t| t.name == name) {
        &mut decl.transitions[pos]
    } else {
        decl.transitions.push(TransDecl::new(name));
        decl.transitions.last_mut().unwrap()
    }
}

fn conjoin_guard(t: &mut TransDecl, extra: &Guard<String>) {
    if extra.is_true() {
        return;
    }
    t.guard = if t.guard.is_true() {
        extra.clone()
    } else {
        t.guard.clone().and(extra.clone())
    };
}

fn attach_output(decl: &mut NetDecl, trans: &str, place: &str, payload: &[TupleLit]) {
    let t = ensure_transition(decl, trans);
    t.outputs.push(ArcDecl {
        other_end: place.to_string(),
        expr: payload.to_vec(),
    });
}

fn attach_input(decl: &mut NetDecl, trans: &str, place: &str, payload: &[TupleLit]) {
    let t = ensure_transition(decl, trans);
    t.inputs.push(ArcDecl {
        other_end: place.to_string(),
        expr: payload.to_vec(),
    });
}

/// Verdict of the bounded liveness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LivenessVerdict {
    /// Every configuration can go on to re-enable every transition. Exact
    /// when exploration was exhaustive; under truncation the verdict rests on
    /// a cycle certificate showing every transition re-fires along some loop.
    Live,
    /// Some configuration can never re-enable the named transition: its
    /// explored continuations are closed and none of them fires it.
    NotLive {
        witness: Configuration,
        transition: TransitionId,
    },
    /// The bound cut exploration before a verdict could be justified.
    Unknown,
}

/// Bounded liveness over the deduplicated configuration graph.
pub fn check_liveness(
    net: &VpnNet,
    bounds: &ExplorationBounds,
) -> Result<LivenessVerdict, SpaceError> {
    check_liveness_excluding(net, bounds, &BTreeSet::new())
}

/// Bounded liveness that ignores designated final configurations: nodes
/// marking every place in `final_places` are exempt from the re-enabling
/// requirement, so terminating workflows can be judged on their cyclic part.
pub fn check_liveness_excluding(
    net: &VpnNet,
    bounds: &ExplorationBounds,
    final_places: &BTreeSet<SymbolId>,
) -> Result<LivenessVerdict, SpaceError> {
    let ct = build_ct(net, bounds)?;
    let cg = ct_to_cg(&ct);
    let truncated = ct.truncated();

    // Configurations whose successor set is fully known: they occur somewhere
    // with an expanded or deadlocked status. Bound leaves are frontier only.
    // Under global dedup a duplicate leaf's configuration is expanded at its
    // first occurrence; under path dedup it may stay frontier, which only
    // narrows the quantifier.
    let mut expanded: BTreeSet<usize> = BTreeSet::new();
    for (_, node) in ct.nodes() {
        if matches!(node.status, NodeStatus::Interior | NodeStatus::DeadlockLeaf) {
            let id = cg.node_id(&node.config).expect("node is in the graph");
            expanded.insert(id);
        }
    }
    let frontier: BTreeSet<usize> = (0..cg.node_count())
        .filter(|id| !expanded.contains(id))
        .collect();

    let excluded = |cfg: &Configuration| -> bool {
        !final_places.is_empty() && final_places.iter().all(|&p| cfg.is_marked(p))
    };

    // Reverse adjacency for backward reachability.
    let mut reverse: HashMap<usize, Vec<usize>> = HashMap::new();
    for (from, to, _, _) in cg.edges() {
        reverse.entry(*to).or_default().push(*from);
    }
    let back_reach = |targets: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut seen = targets.clone();
        let mut queue: VecDeque<usize> = targets.iter().copied().collect();
        while let Some(n) = queue.pop_front() {
            if let Some(preds) = reverse.get(&n) {
                for &p in preds {
                    if seen.insert(p) {
                        queue.push_back(p);
                    }
                }
            }
        }
        seen
    };

    let reaches_frontier = back_reach(&frontier);
    for (t, _) in net.transitions() {
        let enabled_at: BTreeSet<usize> = cg
            .edges()
            .filter(|(_, _, et, _)| *et == t)
            .map(|(from, _, _, _)| *from)
            .collect();
        let can_reach = back_reach(&enabled_at);
        for &n in &expanded {
            if can_reach.contains(&n) || excluded(cg.node(n)) {
                continue;
            }
            // The node's explored continuations never fire `t`. If they are
            // closed (no frontier beyond them), that is definite even under
            // truncation; otherwise the answer lies beyond the bound.
            if !reaches_frontier.contains(&n) {
                return Ok(LivenessVerdict::NotLive {
                    witness: cg.node(n).clone(),
                    transition: t,
                });
            }
        }
    }

    if !truncated {
        return Ok(LivenessVerdict::Live);
    }

    // Truncated with no definite violation: accept only with a lasso
    // certificate, i.e. every transition fires on some explored cycle.
    for (t, _) in net.transitions() {
        let mut on_cycle = false;
        for (from, to, et, _) in cg.edges() {
            if *et != t {
                continue;
            }
            if *to == *from || back_reach(&BTreeSet::from([*from])).contains(to) {
                on_cycle = true;
                break;
            }
        }
        if !on_cycle {
            return Ok(LivenessVerdict::Unknown);
        }
    }
    Ok(LivenessVerdict::Live)
}
