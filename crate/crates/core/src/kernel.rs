//! Binding enumeration, guard evaluation, enabledness and the firing rule.
//!
//! All operations are pure: configurations are immutable values and firing
//! returns a fresh one, so the kernel is safe to drive from concurrent
//! workers without shared state.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::{Binding, Configuration};
use crate::multiset::Multiset;
use crate::net::{TransitionId, VpnNet};
use crate::symbol::{SymbolId, Universe};
use crate::term::{ArcExpr, Guard, TupleToken};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("unknown transition id {0:?}")]
    UnknownTransition(TransitionId),
    #[error("unbound variable `{0}` during evaluation")]
    UnboundVariable(String),
    #[error("transition `{transition}` is not enabled under the given binding")]
    NotEnabled { transition: String },
    #[error("invalid trace at step {step}: `{transition}` not enabled")]
    InvalidTrace { step: usize, transition: String },
}

/// Evaluates a guard after substituting the binding. Every variable in the
/// guard must be bound.
pub fn eval_guard(u: &Universe, guard: &Guard, binding: &Binding) -> Result<bool, KernelError> {
    let resolve = |sym: SymbolId| -> Result<SymbolId, KernelError> {
        binding
            .resolve(u, sym)
            .ok_or_else(|| KernelError::UnboundVariable(u.name(sym).to_string()))
    };
    Ok(match guard {
        Guard::True => true,
        Guard::Eq(a, b) => resolve(*a)? == resolve(*b)?,
        Guard::Ne(a, b) => resolve(*a)? != resolve(*b)?,
        Guard::And(a, b) => eval_guard(u, a, binding)? && eval_guard(u, b, binding)?,
        Guard::Or(a, b) => eval_guard(u, a, binding)? || eval_guard(u, b, binding)?,
        Guard::Not(a) => !eval_guard(u, a, binding)?,
    })
}

/// Instantiates an arc expression under a binding, yielding the demanded or
/// supplied bag of tokens.
pub fn instantiate_expr(
    u: &Universe,
    expr: &ArcExpr,
    binding: &Binding,
) -> Result<Multiset<TupleToken>, KernelError> {
    let mut out = Multiset::new();
    for (tuple, count) in expr.terms.iter() {
        let mut token = Vec::with_capacity(tuple.len());
        for &sym in &tuple.0 {
            let c = binding
                .resolve(u, sym)
                .ok_or_else(|| KernelError::UnboundVariable(u.name(sym).to_string()))?;
            token.push(c);
        }
        out.insert(TupleToken(token), count);
    }
    Ok(out)
}

/// Checks whether `binding` is admissible for `t` and enables it in `cfg`.
///
/// Admissibility covers the binding-validity side conditions: every virtual
/// place bound by the transition must receive a constant whose arity matches
/// the arc expression's tuple length (empty expressions are exempt), and an
/// empty-labelled virtual output arc may only bind to an already existing
/// place, since a fresh place would have no inferable arity.
///
/// Enabledness is then the three-clause check: the guard holds; each solid
/// input arc's demand is covered and each virtual input arc binds to a place
/// that exists, is permitted by the constraint function, and covers the
/// demand; and virtual input arcs that collapse onto one place are covered
/// jointly.
pub fn check_enabled(
    net: &VpnNet,
    t: TransitionId,
    binding: &Binding,
    cfg: &Configuration,
) -> Result<bool, KernelError> {
    let u = net.universe();
    let trans = net
        .transition(t)
        .ok_or(KernelError::UnknownTransition(t))?;

    // Admissibility of the binding for every virtual arc.
    for (end, expr) in trans.inputs.iter().chain(trans.outputs.iter()) {
        if !u.is_variable(*end) {
            continue;
        }
        let Some(place) = binding.get(*end) else {
            return Ok(false);
        };
        if let Some(len) = expr.tuple_len() {
            if u.arity(place) != Some(len) {
                return Ok(false);
            }
        }
    }
    for (end, expr) in &trans.outputs {
        if u.is_variable(*end) && expr.is_empty() {
            let place = binding.get(*end).expect("checked above");
            if !cfg.has_place(place) {
                return Ok(false);
            }
        }
    }

    // (1) Guard.
    if !eval_guard(u, &trans.guard, binding)? {
        return Ok(false);
    }

    // (2) Per-arc demand, existence and constraint membership.
    let mut virtual_demand: BTreeMap<SymbolId, Multiset<TupleToken>> = BTreeMap::new();
    for (end, expr) in &trans.inputs {
        let demand = instantiate_expr(u, expr, binding)?;
        if u.is_variable(*end) {
            let place = binding.get(*end).expect("checked above");
            if !cfg.gamma_range(*end).contains(&place) {
                return Ok(false);
            }
            if !cfg.has_place(place) {
                return Ok(false);
            }
            if !cfg.tokens(place).covers(&demand) {
                return Ok(false);
            }
            let entry = virtual_demand.entry(place).or_default();
            *entry = entry.add(&demand);
        } else {
            if !cfg.tokens(*end).covers(&demand) {
                return Ok(false);
            }
        }
    }

    // (3) Joint demand of virtual inputs bound to the same place.
    for (place, demand) in &virtual_demand {
        if !cfg.tokens(*place).covers(demand) {
            return Ok(false);
        }
    }

    Ok(true)
}

/// Enumerates exactly the bindings under which `t` is enabled in `cfg`.
///
/// Candidates are generated token-first: virtual pre-place variables range
/// over the intersection of their constraint set with the current place set,
/// and variables inside input-arc expressions collect the constants found at
/// their positions in the matching tokens of the (bound) source place. The
/// candidate product is then filtered through [`check_enabled`], which keeps
/// the search space finite without losing any admissible binding.
pub fn enabled_bindings(
    net: &VpnNet,
    t: TransitionId,
    cfg: &Configuration,
) -> Result<BTreeSet<Binding>, KernelError> {
    let u = net.universe();
    let trans = net
        .transition(t)
        .ok_or(KernelError::UnknownTransition(t))?;

    let all_vars = trans.variables(u);
    let vpre: Vec<SymbolId> = trans.virtual_inputs(u).collect();
    let rest: Vec<SymbolId> = all_vars
        .iter()
        .copied()
        .filter(|v| !vpre.contains(v))
        .collect();

    // Virtual pre-place variables range over their constraint set restricted
    // to existing places.
    let vpre_domains: Vec<Vec<SymbolId>> = vpre
        .iter()
        .map(|&v| {
            cfg.gamma_range(v)
                .intersection(cfg.places())
                .copied()
                .collect()
        })
        .collect();

    let mut result = BTreeSet::new();
    for_each_assignment(&vpre, &vpre_domains, Binding::new(), &mut |partial| {
        let Some(domains) = candidate_sets(u, trans, cfg, &partial, &rest) else {
            return Ok(());
        };
        for_each_assignment(&rest, &domains, partial, &mut |binding| {
            if check_enabled(net, t, &binding, cfg)? {
                result.insert(binding);
            }
            Ok(())
        })
    })?;
    Ok(result)
}

/// Calls `f` once per total assignment of `vars` drawn from `domains`,
/// extending `base`. With no variables this is a single call on `base`; an
/// empty domain short-circuits to no calls.
fn for_each_assignment(
    vars: &[SymbolId],
    domains: &[Vec<SymbolId>],
    base: Binding,
    f: &mut impl FnMut(Binding) -> Result<(), KernelError>,
) -> Result<(), KernelError> {
    match vars.split_first() {
        None => f(base),
        Some((&v, rest_vars)) => {
            let (domain, rest_domains) = domains.split_first().expect("domain per variable");
            for &c in domain {
                let mut extended = base.clone();
                extended.bind(v, c);
                for_each_assignment(rest_vars, rest_domains, extended, f)?;
            }
            Ok(())
        }
    }
}

/// Per-variable candidate constants for `vars`, under the partial binding of
/// the virtual pre-places. For each occurrence of a variable in an input-arc
/// tuple, the tokens of the (bound) source place contribute the constants at
/// the variable's positions; occurrences constrain conjunctively, so the
/// final set is the intersection over all occurrences. Returns `None` when
/// some variable has an empty candidate set.
fn candidate_sets(
    u: &Universe,
    trans: &crate::net::Transition,
    cfg: &Configuration,
    partial: &Binding,
    vars: &[SymbolId],
) -> Option<Vec<Vec<SymbolId>>> {
    let mut sets: BTreeMap<SymbolId, Option<BTreeSet<SymbolId>>> =
        vars.iter().map(|&v| (v, None)).collect();

    for (end, expr) in &trans.inputs {
        let place = if u.is_variable(*end) {
            match partial.get(*end) {
                Some(p) => p,
                None => continue,
            }
        } else {
            *end
        };
        let tokens = cfg.tokens(place);
        for (tuple, _) in expr.terms.iter() {
            // Which positions hold an unbound variable we still track?
            let tracked: Vec<(usize, SymbolId)> = tuple
                .0
                .iter()
                .enumerate()
                .filter(|(_, &s)| {
                    u.is_variable(s) && !partial.contains(s) && sets.contains_key(&s)
                })
                .map(|(i, &s)| (i, s))
                .collect();
            if tracked.is_empty() {
                continue;
            }
            let mut per_tuple: BTreeMap<SymbolId, BTreeSet<SymbolId>> = BTreeMap::new();
            for (tok, _) in tokens.iter() {
                if tok.len() != tuple.len() {
                    continue;
                }
                // Fixed positions must agree; repeated variables must match
                // the same constant within one token.
                let mut local: BTreeMap<SymbolId, SymbolId> = BTreeMap::new();
                let mut ok = true;
                for (i, &sym) in tuple.0.iter().enumerate() {
                    if let Some(c) = partial.resolve(u, sym) {
                        if tok.0[i] != c {
                            ok = false;
                            break;
                        }
                    } else {
                        match local.get(&sym) {
                            Some(&prev) if prev != tok.0[i] => {
                                ok = false;
                                break;
                            }
                            _ => {
                                local.insert(sym, tok.0[i]);
                            }
                        }
                    }
                }
                if !ok {
                    continue;
                }
                for (i, v) in &tracked {
                    per_tuple.entry(*v).or_default().insert(tok.0[*i]);
                }
            }
            // Intersect this occurrence's set into the accumulated candidates,
            // once per distinct variable (a variable may repeat within the
            // tuple). A variable with no matching token gets the empty set:
            // no binding can cover this tuple's demand.
            let distinct: BTreeSet<SymbolId> = tracked.iter().map(|(_, v)| *v).collect();
            for v in distinct {
                let occurrence = per_tuple.remove(&v).unwrap_or_default();
                let slot = sets.get_mut(&v).unwrap();
                *slot = Some(match slot.take() {
                    None => occurrence,
                    Some(acc) => acc.intersection(&occurrence).copied().collect(),
                });
            }
        }
    }

    let mut out = Vec::with_capacity(vars.len());
    for v in vars {
        match &sets[v] {
            Some(s) if !s.is_empty() => out.push(s.iter().copied().collect()),
            // No occurrence anywhere, or an occurrence with no matching
            // token: no admissible value exists.
            _ => return None,
        }
    }
    Some(out)
}

/// Fires `t` under `binding`, producing the successor configuration.
///
/// Fresh places are created for virtual outputs bound to constants outside
/// the current place set; the link rule then updates the constraint function;
/// finally the marking moves: demand is subtracted from solid and bound
/// virtual inputs and supply added to solid and bound virtual outputs.
/// Subtraction saturates at zero, which only matters when solid and virtual
/// demand overlap on one place beyond its tokens — a case the three
/// enabledness clauses do not rule out.
pub fn fire(
    net: &VpnNet,
    t: TransitionId,
    binding: &Binding,
    cfg: &Configuration,
) -> Result<Configuration, KernelError> {
    let u = net.universe();
    let trans = net
        .transition(t)
        .ok_or(KernelError::UnknownTransition(t))?;
    if !check_enabled(net, t, binding, cfg)? {
        return Err(KernelError::NotEnabled {
            transition: trans.name.clone(),
        });
    }

    let (mut marking, mut places, mut gamma) = cfg.clone().into_parts();

    // (1) Instantiate missing places for virtual outputs.
    for (end, _) in &trans.outputs {
        if u.is_variable(*end) {
            let place = binding.get(*end).expect("enabled binding is total");
            places.insert(place);
        }
    }

    // (2) Apply the link rule.
    for clause in &trans.rho.clauses {
        if !eval_guard(u, &clause.condition, binding)? {
            continue;
        }
        for (var, op) in &clause.actions {
            let constant = binding
                .get(*var)
                .ok_or_else(|| KernelError::UnboundVariable(u.name(*var).to_string()))?;
            match op {
                crate::term::LinkOp::Add => {
                    gamma.entry(*var).or_default().insert(constant);
                }
                crate::term::LinkOp::Remove => {
                    if let Some(range) = gamma.get_mut(var) {
                        range.remove(&constant);
                    }
                }
            }
        }
    }

    // (3) Move tokens.
    for (end, expr) in &trans.inputs {
        let place = if u.is_variable(*end) {
            binding.get(*end).expect("enabled binding is total")
        } else {
            *end
        };
        let demand = instantiate_expr(u, expr, binding)?;
        if demand.is_empty() {
            continue;
        }
        let bag = marking.entry(place).or_default();
        *bag = bag.saturating_sub(&demand);
    }
    for (end, expr) in &trans.outputs {
        let place = if u.is_variable(*end) {
            binding.get(*end).expect("enabled binding is total")
        } else {
            *end
        };
        let supply = instantiate_expr(u, expr, binding)?;
        if supply.is_empty() {
            continue;
        }
        let bag = marking.entry(place).or_default();
        *bag = bag.add(&supply);
    }

    Ok(Configuration::new(marking, places, gamma))
}

/// Replays a firing trace from the initial configuration, confirming that the
/// data-synchronization property holds: each step's binding assigns exactly
/// one constant per variable — guaranteed by the binding representation — and
/// each step is genuinely enabled.
pub fn check_data_sync(
    net: &VpnNet,
    trace: &[(TransitionId, Binding)],
) -> Result<bool, KernelError> {
    let mut cfg = net.initial_configuration();
    for (step, (t, binding)) in trace.iter().enumerate() {
        if !check_enabled(net, *t, binding, &cfg)? {
            return Err(KernelError::InvalidTrace {
                step,
                transition: net
                    .transition(*t)
                    .map(|tr| tr.name.clone())
                    .unwrap_or_else(|| format!("{t:?}")),
            });
        }
        cfg = fire(net, *t, binding, &cfg)?;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decl::{ArcDecl, NetDecl, TransDecl};
    use crate::net::PlaceClass;

    /// One transition `t` with virtual pre-place `v` (constraint {p1}),
    /// demand one black token, and a solid output to `q`.
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

    fn sym(net: &VpnNet, name: &str) -> SymbolId {
        net.universe().lookup(name).unwrap()
    }

    #[test]
    fn guard_evaluation() {
        let mut d = NetDecl::new();
        d.constant("f1", 1).constant("f2", 1).variable("F");
        d.variable("x").variable("y");
        let net = VpnNet::from_decl(&d).unwrap();
        let u = net.universe();
        let f = sym(&net, "F");
        let f1 = sym(&net, "f1");

        let mut b = Binding::new();
        b.bind(f, f1);
        assert!(eval_guard(u, &Guard::Eq(f, f1), &b).unwrap());

        assert!(eval_guard(u, &Guard::True, &Binding::new()).unwrap());

        // (x = y) and (x != y) is false under any binding.
        let x = sym(&net, "x");
        let y = sym(&net, "y");
        let contradiction = Guard::Eq(x, y).and(Guard::Ne(x, y));
        let mut b2 = Binding::new();
        b2.bind(x, f1);
        b2.bind(y, f1);
        assert!(!eval_guard(u, &contradiction, &b2).unwrap());

        // Unbound variable is an error.
        assert!(matches!(
            eval_guard(u, &Guard::Eq(x, f1), &Binding::new()),
            Err(KernelError::UnboundVariable(_))
        ));
    }

    #[test]
    fn tiny_net_enabled_bindings() {
        let net = tiny_net();
        let cfg = net.initial_configuration();
        let t = net.transition_id("t").unwrap();
        let bindings = enabled_bindings(&net, t, &cfg).unwrap();
        let mut expected = Binding::new();
        expected.bind(sym(&net, "v"), sym(&net, "p1"));
        assert_eq!(bindings, [expected].into());
    }

    #[test]
    fn empty_constraint_set_disables() {
        let mut d = NetDecl::new();
        d.place("p1", 1, PlaceClass::Process)
            .place("q", 1, PlaceClass::Process)
            .variable("v");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("v", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("q", &[&["eps"]]));
        d.transition(t);
        d.mark("p1", &[&["eps"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let t = net.transition_id("t").unwrap();
        let bindings = enabled_bindings(&net, t, &net.initial_configuration()).unwrap();
        assert!(bindings.is_empty());
    }

    #[test]
    fn tiny_net_fire_moves_token() {
        let net = tiny_net();
        let cfg = net.initial_configuration();
        let t = net.transition_id("t").unwrap();
        let binding = enabled_bindings(&net, t, &cfg)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let next = fire(&net, t, &binding, &cfg).unwrap();
        assert!(next.tokens(sym(&net, "p1")).is_empty());
        let eps = net.universe().epsilon();
        assert_eq!(next.tokens(sym(&net, "q")).count(&TupleToken(vec![eps])), 1);
        // Purity: the input configuration is untouched, refiring is equal.
        assert_eq!(
            cfg.tokens(sym(&net, "p1")).count(&TupleToken(vec![eps])),
            1
        );
        assert_eq!(next, fire(&net, t, &binding, &cfg).unwrap());
    }

    #[test]
    fn fresh_place_creation_and_rho_add() {
        // `t` reads a directory token naming `c`, emits into virtual `w`
        // bound to `c` (not yet a place) and records the link.
        let mut d = NetDecl::new();
        d.constant("c", 1)
            .place("dir", 1, PlaceClass::Data)
            .variable("w");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("dir", &[&["w"]]));
        t.outputs.push(ArcDecl::tuples("w", &[&["eps"]]));
        t.rho.clauses.push(crate::term::LinkClause {
            condition: Guard::True,
            actions: vec![("w".into(), crate::term::LinkOp::Add)],
        });
        d.transition(t);
        d.mark("dir", &[&["c"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        assert!(net.validate().is_valid());
        let t = net.transition_id("t").unwrap();
        let cfg = net.initial_configuration();
        let bindings = enabled_bindings(&net, t, &cfg).unwrap();
        assert_eq!(bindings.len(), 1);
        let b = bindings.into_iter().next().unwrap();
        let c = sym(&net, "c");
        assert_eq!(b.get(sym(&net, "w")), Some(c));
        let next = fire(&net, t, &b, &cfg).unwrap();
        assert!(next.has_place(c), "fresh place is added to the place set");
        assert_eq!(next.tokens(c).total(), 1);
        assert!(next.gamma_range(sym(&net, "w")).contains(&c));
    }

    #[test]
    fn rho_remove_is_total_on_absent_entries() {
        let mut d = NetDecl::new();
        d.place("p", 1, PlaceClass::Process).variable("w");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("p", &[&["w"]]));
        t.outputs.push(ArcDecl::empty("w"));
        t.rho.clauses.push(crate::term::LinkClause {
            condition: Guard::True,
            actions: vec![("w".into(), crate::term::LinkOp::Remove)],
        });
        d.transition(t);
        d.mark("p", &[&["p"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let t = net.transition_id("t").unwrap();
        let cfg = net.initial_configuration();
        let bindings = enabled_bindings(&net, t, &cfg).unwrap();
        assert_eq!(bindings.len(), 1);
        let b = bindings.into_iter().next().unwrap();
        // Removing a link that is not present must not fail.
        let next = fire(&net, t, &b, &cfg).unwrap();
        assert!(next.gamma_range(sym(&net, "w")).is_empty());
    }

    #[test]
    fn empty_virtual_output_requires_existing_place() {
        // Same shape as above, but the bound constant is not a place, and the
        // virtual output arc is empty: the binding must be rejected.
        let mut d = NetDecl::new();
        d.constant("c", 1)
            .place("p", 1, PlaceClass::Process)
            .variable("w");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("p", &[&["w"]]));
        t.outputs.push(ArcDecl::empty("w"));
        d.transition(t);
        d.mark("p", &[&["c"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let t = net.transition_id("t").unwrap();
        let bindings = enabled_bindings(&net, t, &net.initial_configuration()).unwrap();
        assert!(bindings.is_empty());
    }

    #[test]
    fn data_sync_holds_on_fired_traces() {
        let net = tiny_net();
        let t = net.transition_id("t").unwrap();
        let cfg = net.initial_configuration();
        let b = enabled_bindings(&net, t, &cfg)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        assert!(check_data_sync(&net, &[(t, b)]).unwrap());
        // An impossible second firing invalidates the trace.
        let b2 = enabled_bindings(&net, t, &cfg)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let err = check_data_sync(&net, &[(t, b2.clone()), (t, b2)]).unwrap_err();
        assert!(matches!(err, KernelError::InvalidTrace { step: 1, .. }));
    }

    #[test]
    fn joint_virtual_demand_is_checked() {
        // Two virtual pre-places may bind to the same place; the summed
        // demand must be covered.
        let mut d = NetDecl::new();
        d.place("p", 1, PlaceClass::Process)
            .place("q", 1, PlaceClass::Process)
            .variable("v1")
            .variable("v2");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("v1", &[&["eps"]]));
        t.inputs.push(ArcDecl::tuples("v2", &[&["eps"]]));
        t.outputs.push(ArcDecl::tuples("q", &[&["eps"]]));
        d.transition(t);
        d.gamma_entry("v1", &["p"]).gamma_entry("v2", &["p"]);
        d.mark("p", &[&["eps"]]);
        let net = VpnNet::from_decl(&d).unwrap();
        let t = net.transition_id("t").unwrap();
        // One token, joint demand two: no binding maps both to `p`.
        let bindings = enabled_bindings(&net, t, &net.initial_configuration()).unwrap();
        assert!(bindings.is_empty());
    }
}
