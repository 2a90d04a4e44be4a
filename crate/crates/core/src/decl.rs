//! Name-based declaration form of a net.
//!
//! `NetDecl` is the interchange shape between the parser, the serializer and
//! the composition operators: everything is referred to by name, so two
//! declarations can be merged without reconciling interned ids. A built
//! [`crate::net::VpnNet`] can be turned back into its canonical declaration
//! with [`crate::net::VpnNet::to_decl`], which sorts every section, so the
//! declaration doubles as a structural fingerprint for equality tests.

use crate::net::{PlaceClass, TransClass};
use crate::term::{Guard, LinkRule};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConstDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlaceDecl {
    pub name: String,
    pub arity: usize,
    pub class: PlaceClass,
}

/// A tuple literal with a multiplicity: `2 <a, b>` is `(2, ["a", "b"])`.
pub type TupleLit = (u64, Vec<String>);

/// One arc of a transition. `other_end` names a place (solid arc) or a
/// variable (virtual arc); direction comes from which list the arc sits in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ArcDecl {
    pub other_end: String,
    pub expr: Vec<TupleLit>,
}

impl ArcDecl {
    pub fn empty(other_end: impl Into<String>) -> Self {
        ArcDecl {
            other_end: other_end.into(),
            expr: Vec::new(),
        }
    }

    pub fn tuples(other_end: impl Into<String>, tuples: &[&[&str]]) -> Self {
        ArcDecl {
            other_end: other_end.into(),
            expr: tuples
                .iter()
                .map(|t| (1, t.iter().map(|s| s.to_string()).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransDecl {
    pub name: String,
    pub class: TransClass,
    pub guard: Guard<String>,
    pub rho: LinkRule<String>,
    pub inputs: Vec<ArcDecl>,
    pub outputs: Vec<ArcDecl>,
}

impl TransDecl {
    pub fn new(name: impl Into<String>) -> Self {
        TransDecl {
            name: name.into(),
            class: TransClass::Process,
            guard: Guard::True,
            rho: LinkRule::none(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

/// Declaration of a whole net, by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NetDecl {
    pub consts: Vec<ConstDecl>,
    pub vars: Vec<String>,
    pub places: Vec<PlaceDecl>,
    pub transitions: Vec<TransDecl>,
    /// Constraint function: variable name to the constants it may take.
    pub gamma: Vec<(String, Vec<String>)>,
    /// Initial marking: place name to token literals.
    pub marking: Vec<(String, Vec<TupleLit>)>,
    /// Declared interface set (a set of constants).
    pub interfaces: Vec<String>,
}

impl NetDecl {
    pub fn new() -> Self {
        NetDecl::default()
    }

    pub fn constant(&mut self, name: &str, arity: usize) -> &mut Self {
        self.consts.push(ConstDecl {
            name: name.to_string(),
            arity,
        });
        self
    }

    pub fn variable(&mut self, name: &str) -> &mut Self {
        self.vars.push(name.to_string());
        self
    }

    pub fn place(&mut self, name: &str, arity: usize, class: PlaceClass) -> &mut Self {
        self.places.push(PlaceDecl {
            name: name.to_string(),
            arity,
            class,
        });
        self
    }

    pub fn transition(&mut self, t: TransDecl) -> &mut Self {
        self.transitions.push(t);
        self
    }

    pub fn gamma_entry(&mut self, var: &str, consts: &[&str]) -> &mut Self {
        self.gamma.push((
            var.to_string(),
            consts.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    pub fn mark(&mut self, place: &str, tokens: &[&[&str]]) -> &mut Self {
        self.marking.push((
            place.to_string(),
            tokens
                .iter()
                .map(|t| (1, t.iter().map(|s| s.to_string()).collect()))
                .collect(),
        ));
        self
    }

    pub fn interface(&mut self, name: &str) -> &mut Self {
        self.interfaces.push(name.to_string());
        self
    }

    /// Sorts every section by name and merges duplicate marking/gamma entries,
    /// yielding the canonical declaration used for structural comparison.
    pub fn canonicalize(&mut self) {
        self.consts.sort();
        self.consts.dedup();
        self.vars.sort();
        self.vars.dedup();
        self.places.sort();
        self.places.dedup();
        self.transitions.sort_by(|a, b| a.name.cmp(&b.name));
        for t in &mut self.transitions {
            t.inputs.sort();
            t.outputs.sort();
        }
        self.gamma.sort();
        self.gamma.dedup();
        for (_, range) in &mut self.gamma {
            range.sort();
            range.dedup();
        }
        self.marking.sort();
        for (_, tokens) in &mut self.marking {
            tokens.sort();
        }
        self.interfaces.sort();
        self.interfaces.dedup();
    }
}
