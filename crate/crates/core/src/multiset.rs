//! Multisets (bags) with the arithmetic the firing rule needs.

use std::collections::BTreeMap;
use std::fmt;

/// A multiset over `T`. No entry is ever stored with multiplicity zero, so
/// structural equality and hashing coincide with bag equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord> {
    entries: BTreeMap<T, u64>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset::new()
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Multiset {
            entries: BTreeMap::new(),
        }
    }

    pub fn singleton(elem: T) -> Self {
        let mut m = Multiset::new();
        m.insert(elem, 1);
        m
    }

    pub fn insert(&mut self, elem: T, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry(elem).or_insert(0) += count;
    }

    pub fn count(&self, elem: &T) -> u64 {
        self.entries.get(elem).copied().unwrap_or(0)
    }

    pub fn contains(&self, elem: &T) -> bool {
        self.entries.contains_key(elem)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total multiplicity.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Number of distinct elements.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> {
        self.entries.iter().map(|(e, &c)| (e, c))
    }

    /// Bag inclusion: every multiplicity of `other` is covered by `self`.
    pub fn covers(&self, other: &Multiset<T>) -> bool {
        other.iter().all(|(e, c)| self.count(e) >= c)
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn elements(&self) -> impl Iterator<Item = &T> {
        self.entries.keys()
    }

    /// Bag sum.
    pub fn add(&self, other: &Multiset<T>) -> Multiset<T> {
        let mut out = self.clone();
        for (e, c) in other.iter() {
            out.insert(e.clone(), c);
        }
        out
    }

    /// Bag difference, saturating at zero per element.
    pub fn saturating_sub(&self, other: &Multiset<T>) -> Multiset<T> {
        let mut out = Multiset::new();
        for (e, c) in self.iter() {
            let rem = c.saturating_sub(other.count(e));
            if rem > 0 {
                out.entries.insert(e.clone(), rem);
            }
        }
        out
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for e in iter {
            m.insert(e, 1);
        }
        m
    }
}

impl<T: Ord> FromIterator<(T, u64)> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = (T, u64)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (e, c) in iter {
            m.insert(e, c);
        }
        m
    }
}

impl<T: Ord + fmt::Display> fmt::Display for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (e, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if c == 1 {
                write!(f, "{e}")?;
            } else {
                write!(f, "{c} {e}")?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bag_arithmetic() {
        let a: Multiset<&str> = [("x", 2), ("y", 1)].into_iter().collect();
        let b: Multiset<&str> = [("x", 1)].into_iter().collect();
        assert!(a.covers(&b));
        assert!(!b.covers(&a));
        assert_eq!(a.saturating_sub(&b).count(&"x"), 1);
        assert_eq!(a.add(&b).count(&"x"), 3);
        assert_eq!(a.total(), 3);
    }

    #[test]
    fn no_zero_entries_after_sub() {
        let a: Multiset<u32> = [(1u32, 1)].into_iter().collect();
        let d = a.saturating_sub(&a);
        assert!(d.is_empty());
        assert_eq!(d, Multiset::new());
    }

    #[test]
    fn saturation_never_underflows() {
        let a: Multiset<u32> = [(7u32, 1)].into_iter().collect();
        let b: Multiset<u32> = [(7u32, 5)].into_iter().collect();
        assert!(a.saturating_sub(&b).is_empty());
    }
}
