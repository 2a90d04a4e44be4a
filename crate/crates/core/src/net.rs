//! The variable Petri net structure: places, transitions, arcs, the
//! constraint function and the initial marking, plus structural validation.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::{Configuration, Gamma};
use crate::decl::{ArcDecl, ConstDecl, NetDecl, PlaceDecl, TransDecl, TupleLit};
use crate::multiset::Multiset;
use crate::symbol::{SymbolId, SymbolKind, Universe};
use crate::term::{ArcExpr, ExprTuple, Guard, LinkRule, TupleToken};

/// Role of a place within a component net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum PlaceClass {
    /// Initial or final place of a component.
    InitialFinal,
    /// Internal control-flow place.
    #[default]
    Process,
    /// Data or state storage.
    Data,
    /// Contextual place (location, environment).
    Contextual,
    /// Interface place: a communication channel or its bookkeeping.
    Interface,
}

impl PlaceClass {
    pub fn keyword(self) -> &'static str {
        match self {
            PlaceClass::InitialFinal => "initial_final",
            PlaceClass::Process => "process",
            PlaceClass::Data => "data",
            PlaceClass::Contextual => "contextual",
            PlaceClass::Interface => "interface",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "initial_final" => PlaceClass::InitialFinal,
            "process" => PlaceClass::Process,
            "data" => PlaceClass::Data,
            "contextual" => PlaceClass::Contextual,
            "interface" => PlaceClass::Interface,
            _ => return None,
        })
    }
}

/// Role of a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum TransClass {
    /// Internal control process of a component.
    #[default]
    Process,
    /// Connection or disconnection transition inside a component. Its postset
    /// may contain only virtual places and interface-class places.
    Interaction,
    /// External interaction transition owned by an interaction structure net.
    External,
}

impl TransClass {
    pub fn keyword(self) -> &'static str {
        match self {
            TransClass::Process => "process",
            TransClass::Interaction => "interaction",
            TransClass::External => "external",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "process" => TransClass::Process,
            "interaction" => TransClass::Interaction,
            "external" => TransClass::External,
            _ => return None,
        })
    }
}

/// Index of a transition within its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub class: PlaceClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub class: TransClass,
    pub guard: Guard,
    pub rho: LinkRule,
    /// Pre-arcs: `(endpoint, expression)`. The endpoint is a place constant
    /// (solid arc) or a variable (virtual arc). Sorted by endpoint.
    pub inputs: Vec<(SymbolId, ArcExpr)>,
    /// Post-arcs, same shape.
    pub outputs: Vec<(SymbolId, ArcExpr)>,
}

impl Transition {
    /// Variables syntactically attached to this transition: in the guard, in
    /// arc expressions, as virtual pre/post places, or in the link rule.
    pub fn variables(&self, u: &Universe) -> BTreeSet<SymbolId> {
        let mut vars = BTreeSet::new();
        vars.extend(self.guard.variables(u));
        for (end, expr) in self.inputs.iter().chain(self.outputs.iter()) {
            if u.is_variable(*end) {
                vars.insert(*end);
            }
            vars.extend(expr.variables(u));
        }
        for clause in &self.rho.clauses {
            vars.extend(clause.condition.variables(u));
            vars.extend(clause.actions.iter().map(|(v, _)| *v));
        }
        vars
    }

    /// Variables available on the input side: virtual pre-places and
    /// variables inside input-arc expressions.
    pub fn input_side_variables(&self, u: &Universe) -> BTreeSet<SymbolId> {
        let mut vars = BTreeSet::new();
        for (end, expr) in &self.inputs {
            if u.is_variable(*end) {
                vars.insert(*end);
            }
            vars.extend(expr.variables(u));
        }
        vars
    }

    /// Virtual pre-places of the transition.
    pub fn virtual_inputs<'a>(&'a self, u: &'a Universe) -> impl Iterator<Item = SymbolId> + 'a {
        self.inputs
            .iter()
            .map(|(e, _)| *e)
            .filter(move |&e| u.is_variable(e))
    }
}

/// A variable Petri net over an interned universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VpnNet {
    universe: Universe,
    places: BTreeMap<SymbolId, Place>,
    transitions: Vec<Transition>,
    gamma0: Gamma,
    m0: BTreeMap<SymbolId, Multiset<TupleToken>>,
    interfaces: BTreeSet<SymbolId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("line-less reference to undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` used as a place but declared as a variable")]
    VariableAsPlace(String),
    #[error("`{0}` used as a variable but declared as a constant")]
    ConstantAsVariable(String),
    #[error("place `{0}` declared twice with different arity or class")]
    DuplicatePlace(String),
    #[error("transition `{0}` declared twice")]
    DuplicateTransition(String),
    #[error("duplicate arc between `{transition}` and `{end}`")]
    DuplicateArc { transition: String, end: String },
    #[error("symbol conflict: {0}")]
    Symbol(#[from] crate::symbol::SymbolError),
    #[error("marking for undeclared place `{0}`")]
    MarkingUnknownPlace(String),
    #[error("gamma entry for non-variable `{0}`")]
    GammaNonVariable(String),
    #[error("gamma range of `{var}` contains non-constant `{entry}`")]
    GammaNonConstantRange { var: String, entry: String },
}

/// A structural rule violation. Diagnostics are data: validation returns all
/// of them instead of failing on the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A name is both a place and a transition.
    PlaceTransitionOverlap { name: String },
    /// A variable on the output side of a transition never occurs on its
    /// input side.
    VariableSymmetry { transition: String, var: String },
    /// A guard (or link-rule condition) variable is neither in an input-arc
    /// expression nor a virtual pre-place.
    GuardVariableUnbound { transition: String, var: String },
    /// A link-rule action names a variable that is not a virtual post-place.
    RhoActionNotPostPlace { transition: String, var: String },
    /// An initial-marking token has the wrong arity for its place.
    MarkingArity {
        place: String,
        expected: usize,
        got: usize,
    },
    /// A solid-arc expression tuple does not match the place arity.
    ArcArity {
        transition: String,
        place: String,
        expected: usize,
        got: usize,
    },
    /// A virtual-arc expression mixes tuple lengths.
    VirtualArcNonUniform { transition: String, var: String },
    /// An interface-set entry is not a constant.
    InterfaceNotConstant { name: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::PlaceTransitionOverlap { name } => {
                write!(f, "place/transition overlap: `{name}` names both")
            }
            Violation::VariableSymmetry { transition, var } => write!(
                f,
                "variable symmetry: `{var}` is output-side of `{transition}` but never input-side"
            ),
            Violation::GuardVariableUnbound { transition, var } => write!(
                f,
                "guard variable `{var}` of `{transition}` is not bound by any input arc or virtual pre-place"
            ),
            Violation::RhoActionNotPostPlace { transition, var } => write!(
                f,
                "link rule of `{transition}` acts on `{var}`, which is not a virtual post-place"
            ),
            Violation::MarkingArity {
                place,
                expected,
                got,
            } => write!(
                f,
                "arity: initial token of length {got} in place `{place}` of arity {expected}"
            ),
            Violation::ArcArity {
                transition,
                place,
                expected,
                got,
            } => write!(
                f,
                "arity: arc between `{transition}` and `{place}` carries a tuple of length {got}, place arity is {expected}"
            ),
            Violation::VirtualArcNonUniform { transition, var } => write!(
                f,
                "virtual arc between `{transition}` and `{var}` mixes tuple lengths"
            ),
            Violation::InterfaceNotConstant { name } => {
                write!(f, "interface set entry `{name}` is not a constant")
            }
        }
    }
}

/// Result of structural validation; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl VpnNet {
    /// Builds a net from its declaration. Reference and duplication errors are
    /// hard failures; rule violations are left for [`VpnNet::validate`].
    pub fn from_decl(decl: &NetDecl) -> Result<VpnNet, BuildError> {
        let mut universe = Universe::new();
        for c in &decl.consts {
            universe.intern(&c.name, SymbolKind::Constant { arity: c.arity })?;
        }
        for v in &decl.vars {
            universe.intern(v, SymbolKind::Variable)?;
        }
        // Places are constants; declaring one interns the constant.
        let mut places = BTreeMap::new();
        for p in &decl.places {
            let id = universe.intern(&p.name, SymbolKind::Constant { arity: p.arity })?;
            let prev = places.insert(id, Place { class: p.class });
            if let Some(prev) = prev {
                if prev.class != p.class {
                    return Err(BuildError::DuplicatePlace(p.name.clone()));
                }
            }
        }

        let resolve = |universe: &Universe, name: &str| -> Result<SymbolId, BuildError> {
            universe
                .lookup(name)
                .ok_or_else(|| BuildError::UnknownSymbol(name.to_string()))
        };

        let mut transitions = Vec::new();
        let mut seen_names = BTreeSet::new();
        let mut sorted_decls: Vec<&TransDecl> = decl.transitions.iter().collect();
        sorted_decls.sort_by(|a, b| a.name.cmp(&b.name));
        for td in sorted_decls {
            if !seen_names.insert(td.name.clone()) {
                return Err(BuildError::DuplicateTransition(td.name.clone()));
            }
            let guard = td.guard.map(&mut |s: &String| resolve(&universe, s))?;
            let mut rho = LinkRule::none();
            for clause in &td.rho.clauses {
                let condition = clause.condition.map(&mut |s: &String| resolve(&universe, s))?;
                let mut actions = Vec::new();
                for (v, op) in &clause.actions {
                    let id = resolve(&universe, v)?;
                    if !universe.is_variable(id) {
                        return Err(BuildError::ConstantAsVariable(v.clone()));
                    }
                    actions.push((id, *op));
                }
                rho.clauses.push(crate::term::LinkClause { condition, actions });
            }
            let inputs = Self::resolve_arcs(&universe, &td.name, &td.inputs)?;
            let outputs = Self::resolve_arcs(&universe, &td.name, &td.outputs)?;
            transitions.push(Transition {
                name: td.name.clone(),
                class: td.class,
                guard,
                rho,
                inputs,
                outputs,
            });
        }

        let mut gamma0: Gamma = BTreeMap::new();
        for (var, range) in &decl.gamma {
            let vid = resolve(&universe, var)?;
            if !universe.is_variable(vid) {
                return Err(BuildError::GammaNonVariable(var.clone()));
            }
            let entry = gamma0.entry(vid).or_default();
            for c in range {
                let cid = resolve(&universe, c)?;
                if !universe.is_constant(cid) {
                    return Err(BuildError::GammaNonConstantRange {
                        var: var.clone(),
                        entry: c.clone(),
                    });
                }
                entry.insert(cid);
            }
            if entry.is_empty() {
                gamma0.remove(&vid);
            }
        }

        let mut m0: BTreeMap<SymbolId, Multiset<TupleToken>> = BTreeMap::new();
        for (place, tokens) in &decl.marking {
            let pid = resolve(&universe, place)?;
            if !places.contains_key(&pid) {
                return Err(BuildError::MarkingUnknownPlace(place.clone()));
            }
            let bag = m0.entry(pid).or_default();
            for (count, elems) in tokens {
                let mut tok = Vec::new();
                for e in elems {
                    let eid = resolve(&universe, e)?;
                    if universe.is_variable(eid) {
                        return Err(BuildError::ConstantAsVariable(e.clone()));
                    }
                    tok.push(eid);
                }
                bag.insert(TupleToken(tok), *count);
            }
        }
        m0.retain(|_, bag| !bag.is_empty());

        let mut interfaces = BTreeSet::new();
        for name in &decl.interfaces {
            interfaces.insert(resolve(&universe, name)?);
        }

        Ok(VpnNet {
            universe,
            places,
            transitions,
            gamma0,
            m0,
            interfaces,
        })
    }

    fn resolve_arcs(
        universe: &Universe,
        transition: &str,
        arcs: &[ArcDecl],
    ) -> Result<Vec<(SymbolId, ArcExpr)>, BuildError> {
        let mut out: Vec<(SymbolId, ArcExpr)> = Vec::new();
        for arc in arcs {
            let end = universe
                .lookup(&arc.other_end)
                .ok_or_else(|| BuildError::UnknownSymbol(arc.other_end.clone()))?;
            let mut tuples = Vec::new();
            for (count, elems) in &arc.expr {
                let mut tup = Vec::new();
                for e in elems {
                    let eid = universe
                        .lookup(e)
                        .ok_or_else(|| BuildError::UnknownSymbol(e.clone()))?;
                    tup.push(eid);
                }
                tuples.push((ExprTuple(tup), *count));
            }
            if out.iter().any(|(e, _)| *e == end) {
                return Err(BuildError::DuplicateArc {
                    transition: transition.to_string(),
                    end: arc.other_end.clone(),
                });
            }
            out.push((end, ArcExpr::from_tuples(tuples)));
        }
        out.sort_by_key(|(e, _)| *e);
        Ok(out)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn places(&self) -> impl Iterator<Item = (SymbolId, &Place)> {
        self.places.iter().map(|(&id, p)| (id, p))
    }

    pub fn is_place(&self, id: SymbolId) -> bool {
        self.places.contains_key(&id)
    }

    pub fn place_class(&self, id: SymbolId) -> Option<PlaceClass> {
        self.places.get(&id).map(|p| p.class)
    }

    pub fn place_arity(&self, id: SymbolId) -> Option<usize> {
        self.universe.arity(id)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (TransitionId, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .map(|(i, t)| (TransitionId(i), t))
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn transition(&self, id: TransitionId) -> Option<&Transition> {
        self.transitions.get(id.0)
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t.name == name)
            .map(TransitionId)
    }

    pub fn transition_name(&self, id: TransitionId) -> &str {
        &self.transitions[id.0].name
    }

    pub fn gamma0(&self) -> &Gamma {
        &self.gamma0
    }

    pub fn m0(&self) -> &BTreeMap<SymbolId, Multiset<TupleToken>> {
        &self.m0
    }

    pub fn interfaces(&self) -> &BTreeSet<SymbolId> {
        &self.interfaces
    }

    /// The initial configuration: initial marking, declared place set, and
    /// initial constraint function.
    pub fn initial_configuration(&self) -> Configuration {
        Configuration::new(
            self.m0.clone(),
            self.places.keys().copied().collect(),
            self.gamma0.clone(),
        )
    }

    /// Checks every structural invariant and returns all violations.
    pub fn validate(&self) -> ValidationReport {
        let u = &self.universe;
        let mut violations = Vec::new();

        for t in &self.transitions {
            if u.lookup(&t.name).is_some_and(|id| self.is_place(id)) {
                violations.push(Violation::PlaceTransitionOverlap {
                    name: t.name.clone(),
                });
            }

            let input_side = t.input_side_variables(u);

            // Output-side variables must also occur on the input side.
            let mut output_side: BTreeSet<SymbolId> = BTreeSet::new();
            for (end, expr) in &t.outputs {
                if u.is_variable(*end) {
                    output_side.insert(*end);
                }
                output_side.extend(expr.variables(u));
            }
            for v in output_side.difference(&input_side) {
                violations.push(Violation::VariableSymmetry {
                    transition: t.name.clone(),
                    var: u.name(*v).to_string(),
                });
            }

            // Guard and link-rule condition variables must be input-bound.
            let mut cond_vars: BTreeSet<SymbolId> = t.guard.variables(u).collect();
            for clause in &t.rho.clauses {
                cond_vars.extend(clause.condition.variables(u));
            }
            for v in cond_vars.difference(&input_side) {
                violations.push(Violation::GuardVariableUnbound {
                    transition: t.name.clone(),
                    var: u.name(*v).to_string(),
                });
            }

            // Link-rule actions must target virtual post-places.
            let virtual_posts: BTreeSet<SymbolId> = t
                .outputs
                .iter()
                .map(|(e, _)| *e)
                .filter(|&e| u.is_variable(e))
                .collect();
            for clause in &t.rho.clauses {
                for (v, _) in &clause.actions {
                    if !virtual_posts.contains(v) {
                        violations.push(Violation::RhoActionNotPostPlace {
                            transition: t.name.clone(),
                            var: u.name(*v).to_string(),
                        });
                    }
                }
            }

            // Arc expression arities.
            for (end, expr) in t.inputs.iter().chain(t.outputs.iter()) {
                if u.is_variable(*end) {
                    if !expr.uniform() {
                        violations.push(Violation::VirtualArcNonUniform {
                            transition: t.name.clone(),
                            var: u.name(*end).to_string(),
                        });
                    }
                } else if let Some(expected) = u.arity(*end) {
                    for tup in expr.terms.elements() {
                        if tup.len() != expected {
                            violations.push(Violation::ArcArity {
                                transition: t.name.clone(),
                                place: u.name(*end).to_string(),
                                expected,
                                got: tup.len(),
                            });
                        }
                    }
                }
            }
        }

        for (&pid, bag) in &self.m0 {
            let expected = u.arity(pid).unwrap_or(0);
            for tok in bag.elements() {
                if tok.len() != expected {
                    violations.push(Violation::MarkingArity {
                        place: u.name(pid).to_string(),
                        expected,
                        got: tok.len(),
                    });
                }
            }
        }

        for &i in &self.interfaces {
            if !u.is_constant(i) {
                violations.push(Violation::InterfaceNotConstant {
                    name: u.name(i).to_string(),
                });
            }
        }

        ValidationReport { violations }
    }

    /// The canonical name-based declaration of this net. Deterministic and
    /// sorted, so it doubles as a structural fingerprint: two nets are
    /// structurally equal iff their declarations are equal.
    pub fn to_decl(&self) -> NetDecl {
        let u = &self.universe;
        let mut decl = NetDecl::new();
        for id in u.constants() {
            if self.places.contains_key(&id) {
                continue;
            }
            decl.consts.push(ConstDecl {
                name: u.name(id).to_string(),
                arity: u.arity(id).unwrap(),
            });
        }
        for id in u.variables() {
            decl.vars.push(u.name(id).to_string());
        }
        for (&id, p) in &self.places {
            decl.places.push(PlaceDecl {
                name: u.name(id).to_string(),
                arity: u.arity(id).unwrap(),
                class: p.class,
            });
        }
        for t in &self.transitions {
            let arcs_out = |arcs: &[(SymbolId, ArcExpr)]| -> Vec<ArcDecl> {
                arcs.iter()
                    .map(|(end, expr)| ArcDecl {
                        other_end: u.name(*end).to_string(),
                        expr: expr
                            .terms
                            .iter()
                            .map(|(tup, c)| {
                                (c, tup.0.iter().map(|&s| u.name(s).to_string()).collect())
                            })
                            .collect(),
                    })
                    .collect()
            };
            decl.transitions.push(TransDecl {
                name: t.name.clone(),
                class: t.class,
                guard: t
                    .guard
                    .map::<String, std::convert::Infallible>(&mut |s| Ok(u.name(*s).to_string()))
                    .unwrap(),
                rho: LinkRule {
                    clauses: t
                        .rho
                        .clauses
                        .iter()
                        .map(|c| crate::term::LinkClause {
                            condition: c
                                .condition
                                .map::<String, std::convert::Infallible>(&mut |s| {
                                    Ok(u.name(*s).to_string())
                                })
                                .unwrap(),
                            actions: c
                                .actions
                                .iter()
                                .map(|(v, op)| (u.name(*v).to_string(), *op))
                                .collect(),
                        })
                        .collect(),
                },
                inputs: arcs_out(&t.inputs),
                outputs: arcs_out(&t.outputs),
            });
        }
        for (&v, range) in &self.gamma0 {
            decl.gamma.push((
                u.name(v).to_string(),
                range.iter().map(|&c| u.name(c).to_string()).collect(),
            ));
        }
        for (&p, bag) in &self.m0 {
            let tokens: Vec<TupleLit> = bag
                .iter()
                .map(|(tok, c)| (c, tok.0.iter().map(|&s| u.name(s).to_string()).collect()))
                .collect();
            decl.marking.push((u.name(p).to_string(), tokens));
        }
        for &i in &self.interfaces {
            decl.interfaces.push(u.name(i).to_string());
        }
        decl.canonicalize();
        decl
    }

    /// Structural equality by canonical declaration, independent of interning
    /// order.
    pub fn structurally_equal(&self, other: &VpnNet) -> bool {
        self.to_decl() == other.to_decl()
    }

    pub fn display_binding(&self, b: &crate::config::Binding) -> String {
        b.display(&self.universe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decl::TransDecl;

    fn tiny_decl() -> NetDecl {
        // One transition `t`; virtual pre-place `v` constrained to `p1`;
        // solid output place `q`.
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
        d
    }

    #[test]
    fn build_and_roundtrip_decl() {
        let net = VpnNet::from_decl(&tiny_decl()).unwrap();
        assert!(net.validate().is_valid());
        let decl = net.to_decl();
        let net2 = VpnNet::from_decl(&decl).unwrap();
        assert!(net.structurally_equal(&net2));
    }

    #[test]
    fn empty_net_is_valid() {
        let net = VpnNet::from_decl(&NetDecl::new()).unwrap();
        assert!(net.validate().is_valid());
    }

    #[test]
    fn variable_symmetry_violation_detected() {
        let mut d = NetDecl::new();
        d.place("q", 1, PlaceClass::Process).variable("v");
        let mut t = TransDecl::new("t");
        t.outputs.push(ArcDecl::tuples("v", &[&["eps"]]));
        d.transition(t);
        let net = VpnNet::from_decl(&d).unwrap();
        let report = net.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::VariableSymmetry { var, .. } if var == "v")));
    }

    #[test]
    fn marking_arity_violation_detected() {
        let mut d = NetDecl::new();
        d.constant("a", 1).place("p", 1, PlaceClass::Process);
        d.marking
            .push(("p".into(), vec![(1, vec!["a".into(), "a".into()])]));
        let net = VpnNet::from_decl(&d).unwrap();
        let report = net.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MarkingArity { got: 2, .. })));
    }

    #[test]
    fn guard_variable_rule() {
        let mut d = NetDecl::new();
        d.place("p", 1, PlaceClass::Process).variable("x");
        let mut t = TransDecl::new("t");
        t.inputs.push(ArcDecl::tuples("p", &[&["eps"]]));
        t.guard = Guard::Eq("x".into(), "eps".into());
        d.transition(t);
        let net = VpnNet::from_decl(&d).unwrap();
        assert!(net
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v, Violation::GuardVariableUnbound { var, .. } if var == "x")));
    }
}
