//! The symbol universe: interned constant and variable names.
//!
//! Every name used by a net (places, token elements, arc-expression entries,
//! guard operands) lives in one universe and is either a constant with an
//! arity or a variable. Places are constants; a constant that is not yet a
//! place may still become one at runtime when a virtual place is instantiated
//! to it.

use std::collections::BTreeMap;
use std::fmt;

/// Index of an interned symbol within its universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// An actual parameter. The arity is the tuple length the constant carries
    /// when it is used as a place.
    Constant { arity: usize },
    /// A formal parameter, substituted by a constant at each firing.
    Variable,
}

/// Name of the ordinary (black) token constant, pre-interned in every universe.
pub const EPSILON: &str = "eps";

/// Interner for the symbol universe.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
    kinds: Vec<SymbolKind>,
    by_name: BTreeMap<String, SymbolId>,
}

impl Universe {
    /// New universe containing only the black-token constant `eps`.
    pub fn new() -> Self {
        let mut u = Universe {
            names: Vec::new(),
            kinds: Vec::new(),
            by_name: BTreeMap::new(),
        };
        u.intern(EPSILON, SymbolKind::Constant { arity: 1 })
            .expect("interning eps in a fresh universe cannot fail");
        u
    }

    /// The black-token constant.
    pub fn epsilon(&self) -> SymbolId {
        self.by_name[EPSILON]
    }

    /// Interns `name` with `kind`. Re-interning with the same kind is a no-op
    /// returning the existing id; a kind or arity mismatch is an error.
    pub fn intern(&mut self, name: &str, kind: SymbolKind) -> Result<SymbolId, SymbolError> {
        if let Some(&id) = self.by_name.get(name) {
            let existing = self.kinds[id.index()];
            if existing == kind {
                return Ok(id);
            }
            return Err(SymbolError::KindMismatch {
                name: name.to_string(),
                existing,
                requested: kind,
            });
        }
        let id = SymbolId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.kinds.push(kind);
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.names[id.index()]
    }

    pub fn kind(&self, id: SymbolId) -> SymbolKind {
        self.kinds[id.index()]
    }

    pub fn is_variable(&self, id: SymbolId) -> bool {
        matches!(self.kind(id), SymbolKind::Variable)
    }

    pub fn is_constant(&self, id: SymbolId) -> bool {
        matches!(self.kind(id), SymbolKind::Constant { .. })
    }

    /// Arity of a constant; `None` for variables.
    pub fn arity(&self, id: SymbolId) -> Option<usize> {
        match self.kind(id) {
            SymbolKind::Constant { arity } => Some(arity),
            SymbolKind::Variable => None,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// All symbol ids, in interning order.
    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.names.len() as u32).map(SymbolId)
    }

    /// All constants, in interning order.
    pub fn constants(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.ids().filter(|&id| self.is_constant(id))
    }

    /// All variables, in interning order.
    pub fn variables(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.ids().filter(|&id| self.is_variable(id))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolError {
    #[error("symbol `{name}` already interned as {existing:?}, requested {requested:?}")]
    KindMismatch {
        name: String,
        existing: SymbolKind,
        requested: SymbolKind,
    },
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_is_preinterned_arity_one() {
        let u = Universe::new();
        let eps = u.epsilon();
        assert_eq!(u.name(eps), "eps");
        assert_eq!(u.arity(eps), Some(1));
    }

    #[test]
    fn reintern_same_kind_is_idempotent() {
        let mut u = Universe::new();
        let a = u.intern("a", SymbolKind::Constant { arity: 2 }).unwrap();
        let b = u.intern("a", SymbolKind::Constant { arity: 2 }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let mut u = Universe::new();
        u.intern("x", SymbolKind::Variable).unwrap();
        assert!(u.intern("x", SymbolKind::Constant { arity: 1 }).is_err());
        assert!(u
            .intern("eps", SymbolKind::Constant { arity: 3 })
            .is_err());
    }
}
