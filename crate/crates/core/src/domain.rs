//! Finite domains equipped with a partial order.

use std::collections::HashMap;

use crate::ModelError;

/// Outcome of comparing two values of a [`Domain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueOrdering {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// Values strictly below and strictly above a given value, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alternatives {
    pub below: Vec<String>,
    pub above: Vec<String>,
}

/// A finite set of opaque value tokens with a declared partial order.
///
/// The order is given as pairs `(a, b)` meaning `a < b` and is closed
/// reflexively and transitively on construction. Tokens carry no implicit
/// numeric meaning: `"0" < "1"` holds only if it was declared.
#[derive(Debug, Clone)]
pub struct Domain {
    name: String,
    values: Vec<String>,
    index: HashMap<String, usize>,
    /// `leq[a][b]` iff `values[a] <= values[b]`.
    leq: Vec<Vec<bool>>,
    binary: Option<BinaryIndices>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BinaryIndices {
    pub(crate) zero: usize,
    pub(crate) one: usize,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.values == other.values && self.leq == other.leq
    }
}

impl Eq for Domain {}

impl Domain {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
        order: &[(String, String)],
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(ModelError::EmptyDomain(name));
        }
        let mut index = HashMap::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(ModelError::DuplicateValue {
                    domain: name,
                    value: v.clone(),
                });
            }
        }
        let n = values.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in order {
            let lookup = |v: &String| {
                index
                    .get(v)
                    .copied()
                    .ok_or_else(|| ModelError::UndeclaredOrderValue {
                        domain: name.clone(),
                        value: v.clone(),
                    })
            };
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if ia == ib {
                return Err(ModelError::CyclicOrder {
                    domain: name,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            leq[ia][ib] = true;
        }
        // Warshall closure.
        for k in 0..n {
            let via = leq[k].clone();
            for row in leq.iter_mut().filter(|row| row[k]) {
                for (cell, &kj) in row.iter_mut().zip(&via) {
                    *cell |= kj;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(ModelError::CyclicOrder {
                        domain: name,
                        a: values[i].clone(),
                        b: values[j].clone(),
                    });
                }
            }
        }
        let binary = match (index.get("0"), index.get("1")) {
            (Some(&zero), Some(&one)) if n == 2 && leq[zero][one] => {
                Some(BinaryIndices { zero, one })
            }
            _ => None,
        };
        Ok(Domain {
            name,
            values,
            index,
            leq,
            binary,
        })
    }

    /// The canonical binary domain `{0 < 1}`.
    pub fn binary(name: impl Into<String>) -> Self {
        Self::chain(name, ["0", "1"])
    }

    /// A totally ordered domain, listed from least to greatest.
    pub fn chain<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        let order: Vec<(String, String)> = values
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        Self::new(name, values, &order).expect("a chain of distinct values is a valid order")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, value: &str) -> bool {
        self.index.contains_key(value)
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.index.get(value).copied()
    }

    pub fn value(&self, index: usize) -> &str {
        &self.values[index]
    }

    /// Whether this is the canonical binary domain (values `0`, `1` with `0 < 1`).
    pub fn is_binary(&self) -> bool {
        self.binary.is_some()
    }

    pub(crate) fn binary_indices(&self) -> Option<BinaryIndices> {
        self.binary
    }

    /// Whether every pair of values is comparable.
    pub fn is_total(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.leq[i][j] || self.leq[j][i]))
    }

    pub(crate) fn leq_idx(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub(crate) fn less_idx(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub(crate) fn compare_idx(&self, a: usize, b: usize) -> ValueOrdering {
        if a == b {
            ValueOrdering::Equal
        } else if self.leq[a][b] {
            ValueOrdering::Less
        } else if self.leq[b][a] {
            ValueOrdering::Greater
        } else {
            ValueOrdering::Incomparable
        }
    }

    /// Number of values at or below `a`; a strictly monotone rank on total orders.
    pub(crate) fn rank(&self, a: usize) -> usize {
        (0..self.len()).filter(|&b| self.leq[b][a]).count()
    }

    fn require(&self, value: &str) -> Result<usize, ModelError> {
        self.index_of(value).ok_or_else(|| ModelError::ValueNotInDomain {
            domain: self.name.clone(),
            value: value.to_string(),
        })
    }

    pub fn compare(&self, a: &str, b: &str) -> Result<ValueOrdering, ModelError> {
        Ok(self.compare_idx(self.require(a)?, self.require(b)?))
    }

    pub(crate) fn alternatives_idx(&self, v: usize) -> (Vec<usize>, Vec<usize>) {
        let below = (0..self.len()).filter(|&w| self.less_idx(w, v)).collect();
        let above = (0..self.len()).filter(|&w| self.less_idx(v, w)).collect();
        (below, above)
    }

    /// Values strictly below and strictly above `value`; incomparable values appear in neither.
    pub fn ordered_alternatives(&self, value: &str) -> Result<Alternatives, ModelError> {
        let (below, above) = self.alternatives_idx(self.require(value)?);
        let names = |idx: Vec<usize>| idx.into_iter().map(|i| self.values[i].clone()).collect();
        Ok(Alternatives {
            below: names(below),
            above: names(above),
        })
    }

    /// The covering pairs (Hasse diagram) of the order, as value indices.
    pub(crate) fn covering_idx(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.less_idx(a, b) && !(0..n).any(|c| self.less_idx(a, c) && self.less_idx(c, b)) {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// The covering pairs of the order, as value tokens.
    pub fn covering_pairs(&self) -> Vec<(String, String)> {
        self.covering_idx()
            .into_iter()
            .map(|(a, b)| (self.values[a].clone(), self.values[b].clone()))
            .collect()
    }

    /// Whether the values, in declaration order, form a chain `v0 < v1 < ...`.
    pub(crate) fn is_declared_chain(&self) -> bool {
        self.is_total() && (1..self.len()).all(|i| self.less_idx(i - 1, i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
        p.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn binary_compare() {
        let d = Domain::binary("Bool");
        assert!(d.is_binary());
        assert_eq!(d.compare("0", "1").unwrap(), ValueOrdering::Less);
        assert_eq!(d.compare("1", "0").unwrap(), ValueOrdering::Greater);
        assert_eq!(d.compare("1", "1").unwrap(), ValueOrdering::Equal);
    }

    #[test]
    fn incomparable_values() {
        let d = Domain::new("P", ["low", "mid", "high"], &pairs(&[("low", "mid"), ("low", "high")]))
            .unwrap();
        assert_eq!(d.compare("mid", "high").unwrap(), ValueOrdering::Incomparable);
        assert_eq!(d.compare("low", "high").unwrap(), ValueOrdering::Less);
        assert!(!d.is_total());
        assert!(!d.is_binary());
    }

    #[test]
    fn compare_rejects_foreign_value() {
        let d = Domain::binary("Bool");
        assert!(matches!(
            d.compare("0", "2"),
            Err(ModelError::ValueNotInDomain { .. })
        ));
        assert!(d.ordered_alternatives("x").is_err());
    }

    #[test]
    fn alternatives() {
        let d = Domain::binary("Bool");
        let a = d.ordered_alternatives("0").unwrap();
        assert!(a.below.is_empty());
        assert_eq!(a.above, ["1"]);
        let a = d.ordered_alternatives("1").unwrap();
        assert_eq!(a.below, ["0"]);
        assert!(a.above.is_empty());

        let c = Domain::chain("Level", ["low", "mid", "high"]);
        let a = c.ordered_alternatives("mid").unwrap();
        assert_eq!(a.below, ["low"]);
        assert_eq!(a.above, ["high"]);
    }

    #[test]
    fn transitive_closure() {
        let d = Domain::new("C", ["a", "b", "c"], &pairs(&[("a", "b"), ("b", "c")])).unwrap();
        assert_eq!(d.compare("a", "c").unwrap(), ValueOrdering::Less);
        assert_eq!(d.covering_pairs(), pairs(&[("a", "b"), ("b", "c")]));
        assert!(d.is_declared_chain());
    }

    #[test]
    fn cyclic_order_rejected() {
        let err = Domain::new("C", ["a", "b"], &pairs(&[("a", "b"), ("b", "a")])).unwrap_err();
        assert!(matches!(err, ModelError::CyclicOrder { .. }));
        let err = Domain::new("C", ["a"], &pairs(&[("a", "a")])).unwrap_err();
        assert!(matches!(err, ModelError::CyclicOrder { .. }));
    }

    #[test]
    fn malformed_domains_rejected() {
        assert!(matches!(
            Domain::new("D", Vec::<String>::new(), &[]),
            Err(ModelError::EmptyDomain(_))
        ));
        assert!(matches!(
            Domain::new("D", ["a", "a"], &[]),
            Err(ModelError::DuplicateValue { .. })
        ));
        assert!(matches!(
            Domain::new("D", ["a"], &pairs(&[("a", "z")])),
            Err(ModelError::UndeclaredOrderValue { .. })
        ));
    }

    #[test]
    fn binary_needs_declared_order() {
        assert!(!Domain::new("B", ["0", "1"], &[]).unwrap().is_binary());
        assert!(!Domain::chain("B", ["1", "0"]).is_binary());
        assert!(Domain::new("B", ["1", "0"], &pairs(&[("0", "1")])).unwrap().is_binary());
    }

    /// Enumerates every triple to confirm `compare` is a partial order.
    fn assert_partial_order(d: &Domain) {
        let n = d.len();
        for a in 0..n {
            assert_eq!(d.compare_idx(a, a), ValueOrdering::Equal);
            for b in 0..n {
                let ab = d.compare_idx(a, b);
                let ba = d.compare_idx(b, a);
                let flipped = match ab {
                    ValueOrdering::Less => ValueOrdering::Greater,
                    ValueOrdering::Greater => ValueOrdering::Less,
                    other => other,
                };
                assert_eq!(ba, flipped, "antisymmetry");
                for c in 0..n {
                    if d.leq_idx(a, b) && d.leq_idx(b, c) {
                        assert!(d.leq_idx(a, c), "transitivity");
                    }
                }
            }
        }
    }

    #[test]
    fn compare_is_partial_order() {
        assert_partial_order(&Domain::binary("B"));
        assert_partial_order(&Domain::chain("C", ["a", "b", "c", "d"]));
        assert_partial_order(
            &Domain::new(
                "P",
                ["a", "b", "c", "d", "e"],
                &pairs(&[("a", "b"), ("a", "c"), ("c", "d"), ("b", "d")]),
            )
            .unwrap(),
        );
    }
}
