//! Variable Petri nets: a Petri net extension in which variables act as
//! virtual places, a constraint function limits their instantiations, and a
//! link function rewires those constraints at firings.
//!
//! The crate is organized bottom-up:
//!
//! - [`symbol`], [`multiset`], [`term`]: the symbol universe, bag arithmetic,
//!   tuple tokens, arc expressions, guards and link rules;
//! - [`net`] and [`decl`]: the net structure itself plus a name-based
//!   declaration form used for building, composing and serializing nets;
//! - [`kernel`]: binding enumeration, enabledness and the firing rule;
//! - [`space`]: configuration trees/graphs and the behavior artifacts derived
//!   from them (languages, mapping sets, binding functions, link sets);
//! - [`compose`]: component nets, interaction structure nets, multi-component
//!   fusion, merge operators and bounded liveness checking;
//! - [`analysis`]: the three system properties (connectivity, interaction
//!   soundness, data validity);
//! - [`testkit`]: independent oracles and random net generators used by the
//!   test suites.

pub mod analysis;
pub mod compose;
pub mod config;
pub mod decl;
pub mod kernel;
pub mod multiset;
pub mod net;
pub mod space;
pub mod symbol;
pub mod term;
pub mod testkit;

pub use config::{Binding, Configuration, Gamma, GammaDiff};
pub use decl::{ArcDecl, ConstDecl, NetDecl, PlaceDecl, TransDecl};
pub use kernel::{check_data_sync, enabled_bindings, eval_guard, fire, KernelError};
pub use multiset::Multiset;
pub use net::{
    BuildError, PlaceClass, TransClass, Transition, TransitionId, ValidationReport, Violation,
    VpnNet,
};
pub use space::{
    binding_function, build_ct, connectivity_set, ct_to_cg, extend_language, languages,
    languages_with_options, link_set, mapping_set, project_language, reachability_set, Anchor,
    ConfigGraph, ConfigTree, DedupMode, ExplorationBounds, Languages, LinkSet, NodeId, NodeStatus,
    SpaceError,
};
pub use symbol::{SymbolId, SymbolKind, Universe};
pub use term::{ArcExpr, ExprTuple, Guard, LinkClause, LinkOp, LinkRule, TupleToken};
