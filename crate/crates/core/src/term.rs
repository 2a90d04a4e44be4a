//! Tokens, arc expressions, guards and link rules.

use crate::multiset::Multiset;
use crate::symbol::{SymbolId, Universe};

/// A token: a tuple of constants. Its length must equal the arity of the
/// place holding it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleToken(pub Vec<SymbolId>);

impl TupleToken {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn display(&self, u: &Universe) -> String {
        let elems: Vec<&str> = self.0.iter().map(|&s| u.name(s)).collect();
        format!("<{}>", elems.join(", "))
    }
}

/// A tuple in an arc expression: each element a constant or a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprTuple(pub Vec<SymbolId>);

impl ExprTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Variables occurring in this tuple.
    pub fn variables<'a>(&'a self, u: &'a Universe) -> impl Iterator<Item = SymbolId> + 'a {
        self.0.iter().copied().filter(|&s| u.is_variable(s))
    }

    pub fn display(&self, u: &Universe) -> String {
        let elems: Vec<&str> = self.0.iter().map(|&s| u.name(s)).collect();
        format!("<{}>", elems.join(", "))
    }
}

/// An arc label: a bag of tuples over the universe, possibly empty.
///
/// An empty expression on a virtual input arc still forces the bound place to
/// exist and to be permitted by the constraint function, so it acts as a pure
/// connectivity guard.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ArcExpr {
    pub terms: Multiset<ExprTuple>,
}

impl ArcExpr {
    pub fn empty() -> Self {
        ArcExpr {
            terms: Multiset::new(),
        }
    }

    pub fn from_tuples<I: IntoIterator<Item = (ExprTuple, u64)>>(tuples: I) -> Self {
        ArcExpr {
            terms: tuples.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Tuple length shared by all terms, or `None` for the empty expression.
    /// Mixed lengths only arise on solid arcs of malformed nets and are
    /// reported by validation, not here.
    pub fn tuple_len(&self) -> Option<usize> {
        self.terms.elements().next().map(|t| t.len())
    }

    /// Whether all terms share one tuple length (vacuously true when empty).
    pub fn uniform(&self) -> bool {
        let mut lens = self.terms.elements().map(|t| t.len());
        match lens.next() {
            None => true,
            Some(first) => lens.all(|l| l == first),
        }
    }

    pub fn variables<'a>(&'a self, u: &'a Universe) -> impl Iterator<Item = SymbolId> + 'a {
        self.terms.elements().flat_map(move |t| t.variables(u))
    }

    pub fn display(&self, u: &Universe) -> String {
        if self.is_empty() {
            return "{}".to_string();
        }
        let mut parts = Vec::new();
        for (t, c) in self.terms.iter() {
            if c == 1 {
                parts.push(t.display(u));
            } else {
                parts.push(format!("{} {}", c, t.display(u)));
            }
        }
        parts.join(", ")
    }
}

/// Guard expression over equality and inequality atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard<S = SymbolId> {
    True,
    Eq(S, S),
    Ne(S, S),
    And(Box<Guard<S>>, Box<Guard<S>>),
    Or(Box<Guard<S>>, Box<Guard<S>>),
    Not(Box<Guard<S>>),
}

impl<S> Guard<S> {
    pub fn and(self, other: Guard<S>) -> Guard<S> {
        Guard::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Guard<S>) -> Guard<S> {
        Guard::Or(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Guard<S> {
        Guard::Not(Box::new(self))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Guard::True)
    }

    /// Maps every operand, preserving structure.
    pub fn map<T, E>(&self, f: &mut impl FnMut(&S) -> Result<T, E>) -> Result<Guard<T>, E> {
        Ok(match self {
            Guard::True => Guard::True,
            Guard::Eq(a, b) => Guard::Eq(f(a)?, f(b)?),
            Guard::Ne(a, b) => Guard::Ne(f(a)?, f(b)?),
            Guard::And(a, b) => Guard::And(Box::new(a.map(f)?), Box::new(b.map(f)?)),
            Guard::Or(a, b) => Guard::Or(Box::new(a.map(f)?), Box::new(b.map(f)?)),
            Guard::Not(a) => Guard::Not(Box::new(a.map(f)?)),
        })
    }

    /// All operands, left to right.
    pub fn operands(&self) -> Vec<&S> {
        let mut out = Vec::new();
        self.collect_operands(&mut out);
        out
    }

    fn collect_operands<'a>(&'a self, out: &mut Vec<&'a S>) {
        match self {
            Guard::True => {}
            Guard::Eq(a, b) | Guard::Ne(a, b) => {
                out.push(a);
                out.push(b);
            }
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.collect_operands(out);
                b.collect_operands(out);
            }
            Guard::Not(a) => a.collect_operands(out),
        }
    }
}

impl Guard<SymbolId> {
    pub fn variables<'a>(&'a self, u: &'a Universe) -> impl Iterator<Item = SymbolId> + 'a {
        self.operands()
            .into_iter()
            .copied()
            .filter(|&s| u.is_variable(s))
            .collect::<Vec<_>>()
            .into_iter()
    }

    pub fn display(&self, u: &Universe) -> String {
        match self {
            Guard::True => "true".to_string(),
            Guard::Eq(a, b) => format!("{} = {}", u.name(*a), u.name(*b)),
            Guard::Ne(a, b) => format!("{} != {}", u.name(*a), u.name(*b)),
            Guard::And(a, b) => format!("({} and {})", a.display(u), b.display(u)),
            Guard::Or(a, b) => format!("({} or {})", a.display(u), b.display(u)),
            Guard::Not(a) => format!("not {}", a.display(u)),
        }
    }
}

/// Add or remove a constraint entry for a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkOp {
    Add,
    Remove,
}

/// One conditional batch of constraint updates. Each action's variable must
/// be a virtual post-place of the owning transition; the firing binding
/// supplies the constant that is added to or removed from the variable's
/// constraint set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkClause<S = SymbolId> {
    pub condition: Guard<S>,
    pub actions: Vec<(S, LinkOp)>,
}

/// The link rule of a transition: a sequence of clauses applied in order.
/// The empty rule is the do-nothing rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinkRule<S = SymbolId> {
    pub clauses: Vec<LinkClause<S>>,
}

impl<S> LinkRule<S> {
    pub fn none() -> Self {
        LinkRule {
            clauses: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

impl LinkRule<SymbolId> {
    pub fn display(&self, u: &Universe) -> String {
        let mut parts = Vec::new();
        for clause in &self.clauses {
            let acts: Vec<String> = clause
                .actions
                .iter()
                .map(|(v, op)| match op {
                    LinkOp::Add => format!("+{}", u.name(*v)),
                    LinkOp::Remove => format!("-{}", u.name(*v)),
                })
                .collect();
            parts.push(format!(
                "if {} then {}",
                clause.condition.display(u),
                acts.join(", ")
            ));
        }
        parts.join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::SymbolKind;

    #[test]
    fn expr_uniformity() {
        let mut u = Universe::new();
        let a = u.intern("a", SymbolKind::Constant { arity: 1 }).unwrap();
        let b = u.intern("b", SymbolKind::Constant { arity: 1 }).unwrap();
        let uniform = ArcExpr::from_tuples([(ExprTuple(vec![a]), 1), (ExprTuple(vec![b]), 2)]);
        assert!(uniform.uniform());
        assert_eq!(uniform.tuple_len(), Some(1));
        let mixed = ArcExpr::from_tuples([(ExprTuple(vec![a]), 1), (ExprTuple(vec![a, b]), 1)]);
        assert!(!mixed.uniform());
        assert!(ArcExpr::empty().uniform());
        assert_eq!(ArcExpr::empty().tuple_len(), None);
    }

    #[test]
    fn guard_operands_and_variables() {
        let mut u = Universe::new();
        let x = u.intern("x", SymbolKind::Variable).unwrap();
        let c = u.intern("c", SymbolKind::Constant { arity: 1 }).unwrap();
        let g = Guard::Eq(x, c).and(Guard::Ne(c, c));
        assert_eq!(g.operands().len(), 4);
        let vars: Vec<_> = g.variables(&u).collect();
        assert_eq!(vars, vec![x]);
    }
}
