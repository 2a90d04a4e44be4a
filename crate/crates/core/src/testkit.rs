//! Independent oracles and random net generators used by the test suites.
//!
//! Everything here re-derives semantics straight from the definitions rather
//! than calling into the kernel's enumeration or firing paths, so agreement
//! between the two is meaningful evidence.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

use crate::config::{Binding, Configuration};
use crate::decl::{ArcDecl, NetDecl, TransDecl};
use crate::multiset::Multiset;
use crate::net::{PlaceClass, TransitionId, VpnNet};
use crate::symbol::SymbolId;
use crate::term::{Guard, LinkClause, LinkOp, LinkRule, TupleToken};

/// A plain place/transition net with weighted arcs and black tokens, plus a
/// breadth-first reachability routine. Deliberately separate from the
/// variable-net kernel.
#[derive(Debug, Clone)]
pub struct ClassicalNet {
    pub places: usize,
    /// Per transition: (consume weights, produce weights), indexed by place.
    pub transitions: Vec<(Vec<u64>, Vec<u64>)>,
    pub m0: Vec<u64>,
}

impl ClassicalNet {
    fn enabled(&self, marking: &[u64], t: usize) -> bool {
        self.transitions[t]
            .0
            .iter()
            .zip(marking)
            .all(|(w, m)| m >= w)
    }

    fn fire(&self, marking: &[u64], t: usize) -> Vec<u64> {
        let (consume, produce) = &self.transitions[t];
        marking
            .iter()
            .zip(consume.iter().zip(produce))
            .map(|(m, (c, p))| m - c + p)
            .collect()
    }

    /// All reachable markings from the initial one.
    pub fn reachable(&self) -> BTreeSet<Vec<u64>> {
        let mut seen = BTreeSet::from([self.m0.clone()]);
        let mut queue = VecDeque::from([self.m0.clone()]);
        while let Some(m) = queue.pop_front() {
            for t in 0..self.transitions.len() {
                if self.enabled(&m, t) {
                    let next = self.fire(&m, t);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        seen
    }
}

/// Random classical net with at most `max_places` places and `max_tokens`
/// initial tokens. Transitions never produce more than they consume, so the
/// reachable set is finite.
pub fn random_classical_net(
    rng: &mut impl Rng,
    max_places: usize,
    max_tokens: u64,
) -> ClassicalNet {
    let places = rng.gen_range(1..=max_places);
    let n_trans = rng.gen_range(1..=5);
    let mut transitions = Vec::new();
    for _ in 0..n_trans {
        let consume: Vec<u64> = (0..places).map(|_| rng.gen_range(0..=2)).collect();
        let budget: u64 = consume.iter().sum();
        let mut produce = vec![0u64; places];
        let mut left = rng.gen_range(0..=budget);
        while left > 0 {
            produce[rng.gen_range(0..places)] += 1;
            left -= 1;
        }
        transitions.push((consume, produce));
    }
    let mut m0 = vec![0u64; places];
    let mut tokens = rng.gen_range(0..=max_tokens);
    while tokens > 0 {
        m0[rng.gen_range(0..places)] += 1;
        tokens -= 1;
    }
    ClassicalNet {
        places,
        transitions,
        m0,
    }
}

/// The same classical net as a variable-net declaration: one black-token
/// place per index, no variables, no guards, no link rules.
pub fn classical_to_decl(net: &ClassicalNet) -> NetDecl {
    let mut d = NetDecl::new();
    let place_name = |i: usize| format!("p{i}");
    for i in 0..net.places {
        d.place(&place_name(i), 1, PlaceClass::Process);
    }
    for (ti, (consume, produce)) in net.transitions.iter().enumerate() {
        let mut t = TransDecl::new(format!("t{ti}"));
        for (i, &w) in consume.iter().enumerate() {
            if w > 0 {
                t.inputs.push(ArcDecl {
                    other_end: place_name(i),
                    expr: vec![(w, vec!["eps".into()])],
                });
            }
        }
        for (i, &w) in produce.iter().enumerate() {
            if w > 0 {
                t.outputs.push(ArcDecl {
                    other_end: place_name(i),
                    expr: vec![(w, vec!["eps".into()])],
                });
            }
        }
        d.transition(t);
    }
    for (i, &w) in net.m0.iter().enumerate() {
        if w > 0 {
            d.marking.push((place_name(i), vec![(w, vec!["eps".into()])]));
        }
    }
    d
}

/// Extracts the black-token count vector of a configuration, for comparison
/// against the classical oracle.
pub fn marking_vector(net: &VpnNet, cfg: &Configuration, places: usize) -> Vec<u64> {
    let eps = net.universe().epsilon();
    (0..places)
        .map(|i| {
            let id = net.universe().lookup(&format!("p{i}")).expect("place");
            cfg.tokens(id).count(&TupleToken(vec![eps]))
        })
        .collect()
}

/// All bindings enabling `t` in `cfg`, found by enumerating every total
/// assignment of the transition's variables to constants and filtering it
/// through a from-scratch reading of the enabledness definition.
pub fn brute_force_bindings(
    net: &VpnNet,
    t: TransitionId,
    cfg: &Configuration,
) -> BTreeSet<Binding> {
    let u = net.universe();
    let trans = net.transition(t).expect("transition");
    let vars: Vec<SymbolId> = trans.variables(u).into_iter().collect();
    let consts: Vec<SymbolId> = u.constants().collect();

    let mut out = BTreeSet::new();
    let mut indices = vec![0usize; vars.len()];
    loop {
        let binding: Binding = vars
            .iter()
            .zip(indices.iter())
            .map(|(&v, &i)| (v, consts[i]))
            .collect();
        if definition_enabled(net, t, &binding, cfg) {
            out.insert(binding);
        }
        // Odometer.
        let mut pos = 0;
        loop {
            if pos == vars.len() {
                return out;
            }
            indices[pos] += 1;
            if indices[pos] < consts.len() {
                break;
            }
            indices[pos] = 0;
            pos += 1;
        }
        if vars.is_empty() {
            return out;
        }
    }
}

/// Literal reading of the enabledness definition, shared with no kernel code.
fn definition_enabled(net: &VpnNet, t: TransitionId, b: &Binding, cfg: &Configuration) -> bool {
    let u = net.universe();
    let trans = net.transition(t).expect("transition");

    let subst = |sym: SymbolId| -> Option<SymbolId> {
        if u.is_variable(sym) {
            b.get(sym)
        } else {
            Some(sym)
        }
    };

    // Binding validity: virtual-arc tuple lengths agree with the bound
    // place's arity unless the expression is empty; and an empty virtual
    // output arc must bind to an existing place.
    for (end, expr) in trans.inputs.iter().chain(trans.outputs.iter()) {
        if !u.is_variable(*end) {
            continue;
        }
        let Some(place) = b.get(*end) else {
            return false;
        };
        if let Some(tup) = expr.terms.elements().next() {
            if u.arity(place) != Some(tup.len()) {
                return false;
            }
        }
    }
    for (end, expr) in &trans.outputs {
        if u.is_variable(*end) && expr.is_empty() {
            let place = b.get(*end).expect("checked above");
            if !cfg.has_place(place) {
                return false;
            }
        }
    }

    // Clause 1: the guard.
    fn eval(g: &Guard, subst: &dyn Fn(SymbolId) -> Option<SymbolId>) -> Option<bool> {
        Some(match g {
            Guard::True => true,
            Guard::Eq(a, c) => subst(*a)? == subst(*c)?,
            Guard::Ne(a, c) => subst(*a)? != subst(*c)?,
            Guard::And(a, c) => eval(a, subst)? && eval(c, subst)?,
            Guard::Or(a, c) => eval(a, subst)? || eval(c, subst)?,
            Guard::Not(a) => !eval(a, subst)?,
        })
    }
    match eval(&trans.guard, &subst) {
        Some(true) => {}
        _ => return false,
    }

    let demand_of = |expr: &crate::term::ArcExpr| -> Option<Multiset<TupleToken>> {
        let mut m = Multiset::new();
        for (tup, c) in expr.terms.iter() {
            let mut tok = Vec::new();
            for &s in &tup.0 {
                tok.push(subst(s)?);
            }
            m.insert(TupleToken(tok), c);
        }
        Some(m)
    };

    // Clause 2, solid and virtual input arcs.
    let mut joint: BTreeMap<SymbolId, Multiset<TupleToken>> = BTreeMap::new();
    for (end, expr) in &trans.inputs {
        let Some(demand) = demand_of(expr) else {
            return false;
        };
        if u.is_variable(*end) {
            let place = b.get(*end).expect("checked above");
            if !cfg.gamma_range(*end).contains(&place) {
                return false;
            }
            if !cfg.has_place(place) {
                return false;
            }
            let have = cfg.tokens(place);
            for (tok, c) in demand.iter() {
                if have.count(tok) < c {
                    return false;
                }
            }
            let slot = joint.entry(place).or_default();
            *slot = slot.add(&demand);
        } else {
            let have = cfg.tokens(*end);
            for (tok, c) in demand.iter() {
                if have.count(tok) < c {
                    return false;
                }
            }
        }
    }

    // Clause 3: joint demand of virtual inputs collapsing onto one place.
    for (place, demand) in &joint {
        let have = cfg.tokens(*place);
        for (tok, c) in demand.iter() {
            if have.count(tok) < c {
                return false;
            }
        }
    }

    true
}

/// Configuration options for [`random_vpn`].
#[derive(Debug, Clone)]
pub struct VpnGenConfig {
    pub max_constants: usize,
    pub max_variables: usize,
    pub max_transitions: usize,
    pub max_tokens: usize,
}

impl Default for VpnGenConfig {
    fn default() -> Self {
        VpnGenConfig {
            max_constants: 5,
            max_variables: 4,
            max_transitions: 2,
            max_tokens: 6,
        }
    }
}

/// Generates a random net that passes structural validation by construction:
/// output-side variables are drawn from the input side, guard and rule
/// variables from input-bound ones, and all arities line up.
pub fn random_vpn(rng: &mut impl Rng, cfg: &VpnGenConfig) -> VpnNet {
    loop {
        let decl = random_vpn_decl(rng, cfg);
        let net = VpnNet::from_decl(&decl).expect("generated declaration builds");
        if net.validate().is_valid() {
            return net;
        }
    }
}

fn random_vpn_decl(rng: &mut impl Rng, gen: &VpnGenConfig) -> NetDecl {
    let mut d = NetDecl::new();

    // Universe: a few places, a few plain constants, a few variables. The
    // pre-interned `eps` counts toward the constant budget.
    let n_places = rng.gen_range(1..=3.min(gen.max_constants - 1));
    let mut place_names = Vec::new();
    for i in 0..n_places {
        let arity = rng.gen_range(1..=2);
        let name = format!("p{i}");
        d.place(&name, arity, PlaceClass::Process);
        place_names.push((name, arity));
    }
    let n_consts = rng.gen_range(0..=gen.max_constants.saturating_sub(n_places + 1));
    let mut const_names: Vec<String> = vec!["eps".into()];
    for i in 0..n_consts {
        let name = format!("c{i}");
        d.constant(&name, 1);
        const_names.push(name);
    }
    let mut element_pool: Vec<String> = const_names.clone();
    element_pool.extend(place_names.iter().map(|(n, _)| n.clone()));

    let n_vars = rng.gen_range(1..=gen.max_variables);
    let var_names: Vec<String> = (0..n_vars).map(|i| format!("x{i}")).collect();
    for v in &var_names {
        d.variable(v);
    }

    let pick = |rng: &mut dyn rand::RngCore, pool: &[String]| -> String {
        pool[rng.gen_range(0..pool.len())].clone()
    };

    let n_trans = rng.gen_range(1..=gen.max_transitions);
    for ti in 0..n_trans {
        let mut t = TransDecl::new(format!("t{ti}"));
        let mut used_inputs: BTreeSet<String> = BTreeSet::new();
        let mut input_vars: Vec<String> = Vec::new();

        // Solid input arcs with tuples mixing constants and variables.
        for _ in 0..rng.gen_range(0..=2usize) {
            let (place, arity) = place_names[rng.gen_range(0..place_names.len())].clone();
            if !used_inputs.insert(place.clone()) {
                continue;
            }
            let mut tuples = Vec::new();
            for _ in 0..rng.gen_range(1..=2usize) {
                let mut tup = Vec::new();
                for _ in 0..arity {
                    if rng.gen_bool(0.5) {
                        let v = pick(rng, &var_names);
                        if !input_vars.contains(&v) {
                            input_vars.push(v.clone());
                        }
                        tup.push(v);
                    } else {
                        tup.push(pick(rng, &element_pool));
                    }
                }
                tuples.push((1, tup));
            }
            t.inputs.push(ArcDecl {
                other_end: place,
                expr: tuples,
            });
        }

        // Possibly one virtual input arc.
        if rng.gen_bool(0.6) {
            let v = pick(rng, &var_names);
            if used_inputs.insert(v.clone()) {
                if !input_vars.contains(&v) {
                    input_vars.push(v.clone());
                }
                let expr = if rng.gen_bool(0.3) {
                    Vec::new()
                } else {
                    let len = rng.gen_range(1..=2usize);
                    let mut tup = Vec::new();
                    for _ in 0..len {
                        if rng.gen_bool(0.4) {
                            let w = pick(rng, &var_names);
                            if !input_vars.contains(&w) {
                                input_vars.push(w.clone());
                            }
                            tup.push(w);
                        } else {
                            tup.push(pick(rng, &element_pool));
                        }
                    }
                    vec![(1, tup)]
                };
                t.inputs.push(ArcDecl {
                    other_end: v,
                    expr,
                });
            }
        }

        // Output arcs draw variables from the input side only.
        let mut used_outputs: BTreeSet<String> = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=2usize) {
            let (place, arity) = place_names[rng.gen_range(0..place_names.len())].clone();
            if !used_outputs.insert(place.clone()) {
                continue;
            }
            let mut tup = Vec::new();
            for _ in 0..arity {
                if !input_vars.is_empty() && rng.gen_bool(0.5) {
                    tup.push(pick(rng, &input_vars));
                } else {
                    tup.push(pick(rng, &element_pool));
                }
            }
            t.outputs.push(ArcDecl {
                other_end: place,
                expr: vec![(1, tup)],
            });
        }
        let mut virtual_posts: Vec<String> = Vec::new();
        if !input_vars.is_empty() && rng.gen_bool(0.5) {
            let v = pick(rng, &input_vars);
            if used_outputs.insert(v.clone()) {
                virtual_posts.push(v.clone());
                let expr = if rng.gen_bool(0.3) {
                    Vec::new()
                } else {
                    let len = rng.gen_range(1..=2usize);
                    let mut tup = Vec::new();
                    for _ in 0..len {
                        if rng.gen_bool(0.4) {
                            tup.push(pick(rng, &input_vars));
                        } else {
                            tup.push(pick(rng, &element_pool));
                        }
                    }
                    vec![(1, tup)]
                };
                t.outputs.push(ArcDecl {
                    other_end: v,
                    expr,
                });
            }
        }

        // Guard over input-bound variables and constants.
        if rng.gen_bool(0.5) {
            t.guard = random_guard(rng, &input_vars, &element_pool, 2);
        }

        // Link rule acting on a virtual post-place.
        if !virtual_posts.is_empty() && rng.gen_bool(0.6) {
            let op = if rng.gen_bool(0.5) {
                LinkOp::Add
            } else {
                LinkOp::Remove
            };
            t.rho = LinkRule {
                clauses: vec![LinkClause {
                    condition: random_guard(rng, &input_vars, &element_pool, 1),
                    actions: vec![(virtual_posts[0].clone(), op)],
                }],
            };
        }

        d.transition(t);
    }

    // Constraint function: a random slice of constants per variable.
    for v in &var_names {
        if rng.gen_bool(0.8) {
            let n = rng.gen_range(0..=element_pool.len());
            let mut range: Vec<&str> = Vec::new();
            for name in element_pool.iter().take(n) {
                range.push(name);
            }
            if !range.is_empty() {
                d.gamma_entry(v, &range);
            }
        }
    }

    // Initial marking with arity-correct tuples.
    let mut tokens_left = rng.gen_range(0..=gen.max_tokens);
    while tokens_left > 0 {
        let (place, arity) = place_names[rng.gen_range(0..place_names.len())].clone();
        let tup: Vec<String> = (0..arity).map(|_| pick(rng, &element_pool)).collect();
        d.marking.push((place, vec![(1, tup)]));
        tokens_left -= 1;
    }

    d
}

fn random_guard(
    rng: &mut impl Rng,
    vars: &[String],
    consts: &[String],
    depth: usize,
) -> Guard<String> {
    let atom = |rng: &mut dyn rand::RngCore| -> Guard<String> {
        let side = |rng: &mut dyn rand::RngCore| -> String {
            if !vars.is_empty() && rng.gen_bool(0.6) {
                vars[rng.gen_range(0..vars.len())].clone()
            } else {
                consts[rng.gen_range(0..consts.len())].clone()
            }
        };
        let a = side(rng);
        let b = side(rng);
        if rng.gen_bool(0.5) {
            Guard::Eq(a, b)
        } else {
            Guard::Ne(a, b)
        }
    };
    if depth == 0 || rng.gen_bool(0.5) {
        return atom(rng);
    }
    match rng.gen_range(0..3) {
        0 => random_guard(rng, vars, consts, depth - 1).and(atom(rng)),
        1 => random_guard(rng, vars, consts, depth - 1).or(atom(rng)),
        _ => random_guard(rng, vars, consts, depth - 1).negate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classical_oracle_explores_simple_chain() {
        let net = ClassicalNet {
            places: 2,
            transitions: vec![(vec![1, 0], vec![0, 1])],
            m0: vec![2, 0],
        };
        let reach = net.reachable();
        assert_eq!(reach.len(), 3);
        assert!(reach.contains(&vec![0, 2]));
    }

    #[test]
    fn generated_nets_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let net = random_vpn(&mut rng, &VpnGenConfig::default());
            assert!(net.validate().is_valid());
        }
    }

    #[test]
    fn brute_force_agrees_on_tiny_net() {
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
        let net = VpnNet::from_decl(&d).unwrap();
        let t = net.transition_id("t").unwrap();
        let cfg = net.initial_configuration();
        let brute = brute_force_bindings(&net, t, &cfg);
        let fast = crate::kernel::enabled_bindings(&net, t, &cfg).unwrap();
        assert_eq!(brute, fast);
        assert_eq!(brute.len(), 1);
    }
}
