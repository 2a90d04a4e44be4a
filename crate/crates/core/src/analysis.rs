//! The three system properties: connectivity, interaction soundness and data
//! validity, each computed over a shared configuration tree with
//! machine-checkable witnesses.

use std::collections::{BTreeMap, BTreeSet};

use crate::compose::MultiComponentNet;
use crate::config::{gamma_added, gamma_removed, Binding, Configuration};
use crate::kernel::{check_enabled, fire};
use crate::net::{PlaceClass, TransitionId};
use crate::space::{
    binding_function, build_ct, link_set, mapping_set, ConfigTree, ExplorationBounds, LinkSet,
    NodeId, SpaceError,
};
use crate::symbol::SymbolId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("no interface variable is declared")]
    NoInterfaceDeclared,
    #[error("some component declares no final place")]
    MissingFinalPlaces,
    #[error("links were observed but no interface set is declared")]
    MissingInterfaceSet,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A replayable counterexample: the trace from the initial configuration to
/// the offending node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    pub nodes: Vec<NodeId>,
    pub trace: Vec<(TransitionId, Binding)>,
}

impl PathWitness {
    fn to_node(ct: &ConfigTree, node: NodeId) -> Self {
        PathWitness {
            nodes: ct.path_to(node),
            trace: ct.trace_to(node),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityVerdict {
    pub holds: bool,
    /// Mapping set of every declared interface variable.
    pub mapping_sets: BTreeMap<SymbolId, BTreeSet<SymbolId>>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessVerdict {
    pub sound: bool,
    /// 1: final places unreachable; 3: observed interfaces exceed the
    /// declared set; 4: a created or sustained link is never usable;
    /// 5: a broken link is used while disconnected.
    pub failed_step: Option<u8>,
    pub reason: Option<String>,
    /// Node in which every declared final place is marked.
    pub final_witness: Option<NodeId>,
    pub link_set: LinkSet,
    /// Actual interface constants occurring in the link set.
    pub observed_interfaces: BTreeSet<SymbolId>,
    pub witness: Option<PathWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityVerdict {
    pub valid: bool,
    /// 1: a tree edge fails replay; 2: repeated send into a non-empty
    /// interface; 3: interface data that is never consumed.
    pub failed_clause: Option<u8>,
    pub reason: Option<String>,
    pub witness: Option<PathWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub connectivity: ConnectivityVerdict,
    pub soundness: SoundnessVerdict,
    pub validity: ValidityVerdict,
    /// Exploration hit a bound: positive verdicts only cover the explored
    /// space.
    pub truncated: bool,
    pub configurations: usize,
    pub complete_paths: usize,
}

impl AnalysisReport {
    pub fn all_hold(&self) -> bool {
        self.connectivity.holds && self.soundness.sound && self.validity.valid
    }
}

/// Link capacity: every declared interface variable can be instantiated at
/// all, i.e. its mapping set is non-empty.
pub fn analyze_connectivity(
    mcn: &MultiComponentNet,
    ct: &ConfigTree,
) -> Result<ConnectivityVerdict, AnalysisError> {
    if mcn.interface_vars.is_empty() {
        return Err(AnalysisError::NoInterfaceDeclared);
    }
    let mut mapping_sets = BTreeMap::new();
    let mut holds = true;
    let mut reason = None;
    for &var in &mcn.interface_vars {
        let set = mapping_set(ct, var)?;
        if set.is_empty() {
            holds = false;
            reason.get_or_insert_with(|| {
                format!(
                    "interface variable `{}` has an empty mapping set",
                    ct.net().universe().name(var)
                )
            });
        }
        mapping_sets.insert(var, set);
    }
    Ok(ConnectivityVerdict {
        holds,
        mapping_sets,
        reason,
    })
}

/// Interaction soundness per the five-step analysis: final places reachable,
/// link set computed, observed interfaces within the declared set, created
/// and sustained links usable by some interaction transition, and broken
/// links never used while disconnected.
pub fn analyze_soundness(
    mcn: &MultiComponentNet,
    ct: &ConfigTree,
    interfaces: &BTreeSet<SymbolId>,
) -> Result<SoundnessVerdict, AnalysisError> {
    if !mcn.components.is_empty() && mcn.components.iter().any(|c| c.finals.is_empty()) {
        return Err(AnalysisError::MissingFinalPlaces);
    }
    let links = link_set(ct);
    if interfaces.is_empty() && !links.constants().is_empty() {
        return Err(AnalysisError::MissingInterfaceSet);
    }

    let fail = |step: u8, reason: String, witness: Option<PathWitness>| SoundnessVerdict {
        sound: false,
        failed_step: Some(step),
        reason: Some(reason),
        final_witness: None,
        link_set: links.clone(),
        observed_interfaces: links.constants(),
        witness,
    };

    // Step 1: some reachable configuration marks every declared final place.
    let final_witness = ct
        .nodes()
        .find(|(_, n)| mcn.finals.iter().all(|&p| n.config.is_marked(p)))
        .map(|(id, _)| id);
    let Some(final_witness) = final_witness else {
        let names: Vec<&str> = mcn
            .finals
            .iter()
            .map(|&p| ct.net().universe().name(p))
            .collect();
        return Ok(fail(
            1,
            format!(
                "no reachable configuration marks the final places {{{}}}",
                names.join(", ")
            ),
            None,
        ));
    };

    // Steps 2 and 3: the link set's constants stay within the declared
    // interface set.
    let observed = links.constants();
    if let Some(&outside) = observed.iter().find(|c| !interfaces.contains(c)) {
        return Ok(fail(
            3,
            format!(
                "observed interface `{}` is outside the declared interface set",
                ct.net().universe().name(outside)
            ),
            None,
        ));
    }

    // Step 4: every created or sustained link of an interface variable is
    // usable: some interaction transition fires with that very binding.
    let mut interaction_bindings: Vec<BTreeSet<Binding>> = Vec::new();
    for &t in &mcn.interaction_transitions {
        interaction_bindings.push(binding_function(ct, t)?);
    }
    for &(var, constant) in links.created.iter().chain(links.sustained.iter()) {
        if !mcn.interface_vars.contains(&var) {
            continue;
        }
        let usable = interaction_bindings
            .iter()
            .flatten()
            .any(|b| b.get(var) == Some(constant));
        if !usable {
            return Ok(fail(
                4,
                format!(
                    "link {}->{} is never instantiated by an interaction transition",
                    ct.net().universe().name(var),
                    ct.net().universe().name(constant)
                ),
                None,
            ));
        }
    }

    // Step 5: after a link is removed, no later binding on that path may use
    // the removed constant to move data through the variable before the link
    // is re-added. Bindings on empty-labelled arcs (connection maintenance,
    // the restoring edge included) carry no data and are exempt.
    let carries_data = |t: TransitionId, var: SymbolId| -> bool {
        let trans = ct.net().transition(t).expect("transition exists");
        trans
            .inputs
            .iter()
            .chain(trans.outputs.iter())
            .any(|(end, expr)| *end == var && !expr.is_empty())
    };
    for path in ct.maximal_paths() {
        let mut disconnected: BTreeSet<(SymbolId, SymbolId)> = BTreeSet::new();
        for pair in path.windows(2) {
            let (parent, child) = (pair[0], pair[1]);
            let edge = ct.node(child).parent.as_ref().expect("tree edge");
            let before = ct.node(parent).config.gamma();
            let after = ct.node(child).config.gamma();
            let added = gamma_added(before, after);
            for &(var, constant) in &disconnected {
                if !mcn.interface_vars.contains(&var) {
                    continue;
                }
                if edge.binding.get(var) == Some(constant)
                    && carries_data(edge.transition, var)
                    && !added.contains(&(var, constant))
                {
                    return Ok(fail(
                        5,
                        format!(
                            "binding maps `{}` to disconnected `{}`",
                            ct.net().universe().name(var),
                            ct.net().universe().name(constant)
                        ),
                        Some(PathWitness::to_node(ct, child)),
                    ));
                }
            }
            for p in gamma_removed(before, after) {
                disconnected.insert(p);
            }
            for p in added {
                disconnected.remove(&p);
            }
        }
    }

    Ok(SoundnessVerdict {
        sound: true,
        failed_step: None,
        reason: None,
        final_witness: Some(final_witness),
        link_set: links.clone(),
        observed_interfaces: observed,
        witness: None,
    })
}

/// Data validity: every edge replays (one instantiation per formal parameter
/// per firing), no repeated send into a still-loaded interface place, and no
/// interface data left unconsumed on any maximal path that does not end in
/// the final configuration.
pub fn analyze_validity(
    mcn: &MultiComponentNet,
    ct: &ConfigTree,
) -> Result<ValidityVerdict, AnalysisError> {
    let net = ct.net();
    let u = net.universe();

    // Actual interface places: declared interface-class places plus places
    // created at runtime by instantiating a virtual place.
    let is_interface_place = |cfg: &Configuration, p: SymbolId| -> bool {
        match net.place_class(p) {
            Some(PlaceClass::Interface) => true,
            Some(_) => false,
            None => cfg.has_place(p),
        }
    };

    // Clause 1: replay every edge.
    for (parent, child, t, binding) in ct.edges() {
        let parent_cfg = &ct.node(parent).config;
        let ok = check_enabled(net, t, binding, parent_cfg).map_err(SpaceError::from)?;
        if !ok || fire(net, t, binding, parent_cfg).map_err(SpaceError::from)? != ct.node(child).config
        {
            return Ok(ValidityVerdict {
                valid: false,
                failed_clause: Some(1),
                reason: Some(format!(
                    "edge `{}` does not replay",
                    net.transition_name(t)
                )),
                witness: Some(PathWitness::to_node(ct, child)),
            });
        }
    }

    // Clause 2: non-repeatability. Walking each path, a transition that
    // deposits into an actual interface place twice with no consumption in
    // between, while the place still holds data, is a repeated send.
    for path in ct.maximal_paths() {
        let mut pending: BTreeSet<(TransitionId, SymbolId)> = BTreeSet::new();
        for pair in path.windows(2) {
            let (parent, child) = (pair[0], pair[1]);
            let edge = ct.node(child).parent.as_ref().expect("tree edge");
            let parent_cfg = &ct.node(parent).config;
            let trans = net.transition(edge.transition).expect("transition exists");

            let mut consumed: BTreeMap<SymbolId, crate::multiset::Multiset<crate::term::TupleToken>> =
                BTreeMap::new();
            for (end, expr) in &trans.inputs {
                let place = match edge.binding.resolve(u, *end) {
                    Some(p) => p,
                    None => continue,
                };
                let demand = crate::kernel::instantiate_expr(u, expr, &edge.binding)
                    .map_err(SpaceError::from)?;
                if !demand.is_empty() {
                    let slot = consumed.entry(place).or_default();
                    *slot = slot.add(&demand);
                }
            }
            let mut deposited: BTreeSet<SymbolId> = BTreeSet::new();
            for (end, expr) in &trans.outputs {
                let place = match edge.binding.resolve(u, *end) {
                    Some(p) => p,
                    None => continue,
                };
                let supply = crate::kernel::instantiate_expr(u, expr, &edge.binding)
                    .map_err(SpaceError::from)?;
                if !supply.is_empty() {
                    deposited.insert(place);
                }
            }

            // Consumption clears pending sends for the place, whoever sent.
            for place in consumed.keys() {
                pending.retain(|(_, p)| p != place);
            }
            for &place in &deposited {
                if !is_interface_place(parent_cfg, place) {
                    continue;
                }
                let residual = consumed
                    .get(&place)
                    .map(|d| parent_cfg.tokens(place).saturating_sub(d))
                    .unwrap_or_else(|| parent_cfg.tokens(place));
                if pending.contains(&(edge.transition, place)) && !residual.is_empty() {
                    return Ok(ValidityVerdict {
                        valid: false,
                        failed_clause: Some(2),
                        reason: Some(format!(
                            "`{}` sends into `{}` again before its data is consumed",
                            trans.name,
                            u.name(place)
                        )),
                        witness: Some(PathWitness::to_node(ct, child)),
                    });
                }
                pending.insert((edge.transition, place));
            }
        }
    }

    // Clause 3: no stuck data. Over the deduplicated configuration graph,
    // every state holding data in an interface place must be bound to drain
    // it on every continuation; runs are allowed to end in the declared final
    // configuration. Computed as a least fixpoint: a state is settled for a
    // place when the place is empty, when the run ends there with all final
    // places marked, or when every successor is settled. Frontier states cut
    // off by a bound are given the benefit of the doubt; the truncation flag
    // already downgrades the verdict.
    let cg = crate::space::ct_to_cg(ct);
    let expanded: BTreeSet<usize> = ct
        .nodes()
        .filter(|(_, n)| {
            matches!(
                n.status,
                crate::space::NodeStatus::Interior | crate::space::NodeStatus::DeadlockLeaf
            )
        })
        .map(|(_, n)| cg.node_id(&n.config).expect("node in graph"))
        .collect();
    let successors: Vec<Vec<usize>> = (0..cg.node_count())
        .map(|i| cg.successors(i).collect())
        .collect();
    let is_final_cfg = |cfg: &Configuration| -> bool {
        !mcn.finals.is_empty() && mcn.finals.iter().all(|&p| cfg.is_marked(p))
    };

    let mut interface_places: BTreeSet<SymbolId> = BTreeSet::new();
    for (_, cfg) in cg.nodes() {
        for (place, _) in cfg.marked_places() {
            if is_interface_place(cfg, place) {
                interface_places.insert(place);
            }
        }
    }
    for place in interface_places {
        let mut settled: Vec<bool> = cg
            .nodes()
            .map(|(id, cfg)| {
                cfg.tokens(place).is_empty()
                    || (is_final_cfg(cfg) && successors[id].is_empty())
                    || !expanded.contains(&id)
            })
            .collect();
        loop {
            let mut changed = false;
            for id in 0..cg.node_count() {
                if settled[id] || successors[id].is_empty() {
                    continue;
                }
                if successors[id].iter().all(|&s| settled[s]) {
                    settled[id] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some((offender, _)) = cg.nodes().find(|(id, _)| !settled[*id]) {
            let witness_node = ct
                .nodes()
                .find(|(_, n)| cg.node_id(&n.config) == Some(offender))
                .map(|(id, _)| id)
                .expect("graph node has a tree occurrence");
            return Ok(ValidityVerdict {
                valid: false,
                failed_clause: Some(3),
                reason: Some(format!(
                    "data in interface place `{}` is never consumed",
                    u.name(place)
                )),
                witness: Some(PathWitness::to_node(ct, witness_node)),
            });
        }
    }

    Ok(ValidityVerdict {
        valid: true,
        failed_clause: None,
        reason: None,
        witness: None,
    })
}

/// Explores once and runs the three analyses over the shared tree. A missing
/// interface declaration fails connectivity rather than erroring, so plain
/// nets still get a report.
pub fn full_report(
    mcn: &MultiComponentNet,
    bounds: &ExplorationBounds,
) -> Result<AnalysisReport, AnalysisError> {
    let ct = build_ct(&mcn.net, bounds)?;
    let connectivity = match analyze_connectivity(mcn, &ct) {
        Ok(v) => v,
        Err(AnalysisError::NoInterfaceDeclared) => ConnectivityVerdict {
            holds: false,
            mapping_sets: BTreeMap::new(),
            reason: Some("no interface variable is declared".into()),
        },
        Err(e) => return Err(e),
    };
    let soundness = analyze_soundness(mcn, &ct, mcn.net.interfaces())?;
    let validity = analyze_validity(mcn, &ct)?;
    Ok(AnalysisReport {
        connectivity,
        soundness,
        validity,
        truncated: ct.truncated(),
        configurations: ct.len(),
        complete_paths: ct.complete_paths().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::mcn_from_net;
    use crate::decl::{ArcDecl, NetDecl, TransDecl};

    /// A sender that can fire twice into an interface place with no consumer.
    fn double_send_net() -> NetDecl {
        let mut d = NetDecl::new();
        d.place("src", 1, PlaceClass::Process)
            .place("ia", 1, PlaceClass::Interface);
        let mut t = TransDecl::new("send");
        t.inputs.push(ArcDecl::tuples("src", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("ia", &[&["eps"]]));
        d.transition(t);
        d.mark("src", &[&["eps"], &["eps"]]);
        d
    }

    #[test]
    fn double_send_fails_clause_two() {
        let decl = double_send_net();
        let mcn = mcn_from_net(&decl, &[]).unwrap();
        let report = full_report(&mcn, &ExplorationBounds::default()).unwrap();
        assert!(!report.validity.valid);
        assert_eq!(report.validity.failed_clause, Some(2));
        let w = report.validity.witness.unwrap();
        assert_eq!(w.trace.len(), 2, "two sends back to back");
    }

    #[test]
    fn stranded_token_fails_clause_three() {
        let mut d = NetDecl::new();
        d.place("src", 1, PlaceClass::Process)
            .place("ia", 1, PlaceClass::Interface);
        let mut t = TransDecl::new("send");
        t.inputs.push(ArcDecl::tuples("src", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("ia", &[&["eps"]]));
        d.transition(t);
        d.mark("src", &[&["eps"]]);
        let mcn = mcn_from_net(&d, &[]).unwrap();
        let report = full_report(&mcn, &ExplorationBounds::default()).unwrap();
        assert!(!report.validity.valid);
        assert_eq!(report.validity.failed_clause, Some(3));
    }

    #[test]
    fn vacuous_validity_without_interfaces_or_variables() {
        let mut d = NetDecl::new();
        d.place("a", 1, PlaceClass::Process)
            .place("b", 1, PlaceClass::Process);
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("a", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("b", &[&["eps"]]));
        d.transition(t);
        d.mark("a", &[&["eps"]]);
        let mcn = mcn_from_net(&d, &[]).unwrap();
        let report = full_report(&mcn, &ExplorationBounds::default()).unwrap();
        assert!(report.validity.valid);
        assert!(report.soundness.sound, "no links, vacuously sound");
        assert!(!report.connectivity.holds, "no interface variable");
    }

    #[test]
    fn empty_net_report() {
        let mcn = mcn_from_net(&NetDecl::new(), &[]).unwrap();
        let report = full_report(&mcn, &ExplorationBounds::default()).unwrap();
        assert!(!report.connectivity.holds);
        assert!(report.soundness.sound);
        assert!(report.validity.valid);
    }

    #[test]
    fn reports_are_deterministic() {
        let decl = double_send_net();
        let mcn = mcn_from_net(&decl, &[]).unwrap();
        let a = full_report(&mcn, &ExplorationBounds::default()).unwrap();
        let b = full_report(&mcn, &ExplorationBounds::default()).unwrap();
        assert_eq!(a, b);
    }
}
