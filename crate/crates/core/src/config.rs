//! Bindings and configurations: the dynamic state of a net.

use std::collections::{BTreeMap, BTreeSet};

use crate::multiset::Multiset;
use crate::symbol::{SymbolId, Universe};
use crate::term::TupleToken;

/// Constraint function: each variable maps to the set of constants it may
/// currently instantiate to. Variables with an empty set are not stored, so
/// structural equality coincides with function equality.
pub type Gamma = BTreeMap<SymbolId, BTreeSet<SymbolId>>;

/// A set difference between two constraint functions, as (variable, constant)
/// pairs.
pub type GammaDiff = BTreeSet<(SymbolId, SymbolId)>;

/// Flattens a constraint function into (variable, constant) pairs.
pub fn gamma_pairs(gamma: &Gamma) -> GammaDiff {
    gamma
        .iter()
        .flat_map(|(&v, range)| range.iter().map(move |&c| (v, c)))
        .collect()
}

/// Pairs present in `after` but not in `before`.
pub fn gamma_added(before: &Gamma, after: &Gamma) -> GammaDiff {
    gamma_pairs(after)
        .difference(&gamma_pairs(before))
        .copied()
        .collect()
}

/// Pairs present in `before` but not in `after`.
pub fn gamma_removed(before: &Gamma, after: &Gamma) -> GammaDiff {
    gamma_pairs(before)
        .difference(&gamma_pairs(after))
        .copied()
        .collect()
}

/// A per-firing substitution of variables by constants. Total over the fired
/// transition's variables, forgotten after the step.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    map: BTreeMap<SymbolId, SymbolId>,
}

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn bind(&mut self, var: SymbolId, constant: SymbolId) {
        self.map.insert(var, constant);
    }

    pub fn get(&self, var: SymbolId) -> Option<SymbolId> {
        self.map.get(&var).copied()
    }

    pub fn contains(&self, var: SymbolId) -> bool {
        self.map.contains_key(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, SymbolId)> + '_ {
        self.map.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Resolves a symbol under this binding: variables are substituted,
    /// constants pass through. `None` for an unbound variable.
    pub fn resolve(&self, u: &Universe, sym: SymbolId) -> Option<SymbolId> {
        if u.is_variable(sym) {
            self.get(sym)
        } else {
            Some(sym)
        }
    }

    pub fn display(&self, u: &Universe) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .map(|(&v, &c)| format!("{}->{}", u.name(v), u.name(c)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FromIterator<(SymbolId, SymbolId)> for Binding {
    fn from_iter<I: IntoIterator<Item = (SymbolId, SymbolId)>>(iter: I) -> Self {
        Binding {
            map: iter.into_iter().collect(),
        }
    }
}

/// The full dynamic state of a net: a marking, the current place set and the
/// current constraint function.
///
/// Normalized on construction (empty bags and empty constraint sets dropped),
/// so two configurations are equal iff marking, place set and constraint
/// function coincide — which makes them directly usable as dedup keys.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    marking: BTreeMap<SymbolId, Multiset<TupleToken>>,
    places: BTreeSet<SymbolId>,
    gamma: Gamma,
}

impl Configuration {
    pub fn new(
        mut marking: BTreeMap<SymbolId, Multiset<TupleToken>>,
        places: BTreeSet<SymbolId>,
        mut gamma: Gamma,
    ) -> Self {
        marking.retain(|_, bag| !bag.is_empty());
        gamma.retain(|_, range| !range.is_empty());
        Configuration {
            marking,
            places,
            gamma,
        }
    }

    /// Tokens in `place`; empty for unmarked or unknown places.
    pub fn tokens(&self, place: SymbolId) -> Multiset<TupleToken> {
        self.marking.get(&place).cloned().unwrap_or_default()
    }

    pub fn tokens_ref(&self, place: SymbolId) -> Option<&Multiset<TupleToken>> {
        self.marking.get(&place)
    }

    pub fn marked_places(&self) -> impl Iterator<Item = (SymbolId, &Multiset<TupleToken>)> {
        self.marking.iter().map(|(&p, bag)| (p, bag))
    }

    pub fn has_place(&self, place: SymbolId) -> bool {
        self.places.contains(&place)
    }

    pub fn places(&self) -> &BTreeSet<SymbolId> {
        &self.places
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    /// Constants currently allowed for `var`.
    pub fn gamma_range(&self, var: SymbolId) -> BTreeSet<SymbolId> {
        self.gamma.get(&var).cloned().unwrap_or_default()
    }

    pub fn is_marked(&self, place: SymbolId) -> bool {
        self.marking.contains_key(&place)
    }

    /// Builder-style mutation helpers for the firing rule; normalization is
    /// re-applied by `finish`.
    pub(crate) fn into_parts(
        self,
    ) -> (
        BTreeMap<SymbolId, Multiset<TupleToken>>,
        BTreeSet<SymbolId>,
        Gamma,
    ) {
        (self.marking, self.places, self.gamma)
    }

    pub fn display(&self, u: &Universe) -> String {
        let mut parts = Vec::new();
        for (p, bag) in &self.marking {
            let tokens: Vec<String> = bag
                .iter()
                .map(|(t, c)| {
                    if c == 1 {
                        t.display(u)
                    } else {
                        format!("{} {}", c, t.display(u))
                    }
                })
                .collect();
            parts.push(format!("{}{{{}}}", u.name(*p), tokens.join(", ")));
        }
        let mut gparts = Vec::new();
        for (v, range) in &self.gamma {
            let cs: Vec<&str> = range.iter().map(|&c| u.name(c)).collect();
            gparts.push(format!("{}->{{{}}}", u.name(*v), cs.join(", ")));
        }
        format!("M[{}] G[{}]", parts.join(", "), gparts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_drops_empty_entries() {
        let mut marking = BTreeMap::new();
        marking.insert(SymbolId(0), Multiset::new());
        let mut gamma: Gamma = BTreeMap::new();
        gamma.insert(SymbolId(1), BTreeSet::new());
        let c1 = Configuration::new(marking, [SymbolId(0)].into(), gamma);
        let c2 = Configuration::new(BTreeMap::new(), [SymbolId(0)].into(), BTreeMap::new());
        assert_eq!(c1, c2);
    }

    #[test]
    fn gamma_diffs() {
        let mut before: Gamma = BTreeMap::new();
        before.insert(SymbolId(0), [SymbolId(1), SymbolId(2)].into());
        let mut after: Gamma = BTreeMap::new();
        after.insert(SymbolId(0), [SymbolId(2), SymbolId(3)].into());
        assert_eq!(
            gamma_added(&before, &after),
            [(SymbolId(0), SymbolId(3))].into()
        );
        assert_eq!(
            gamma_removed(&before, &after),
            [(SymbolId(0), SymbolId(1))].into()
        );
    }
}
