use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A t-tuple of (factor index, value index) pairs, sorted by factor index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueCombination {
    pairs: Vec<(u32, u32)>,
}

impl ValueCombination {
    /// Builds a combination from pairs in any order. Rejects empty input and
    /// repeated factors.
    pub fn new(mut pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Validation("value combination is empty".into()));
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!(
                "value combination repeats a factor: {pairs:?}"
            )));
        }
        Ok(ValueCombination { pairs })
    }

    /// Caller guarantees `pairs` is non-empty with strictly increasing factors.
    pub(crate) fn from_sorted(pairs: Vec<(u32, u32)>) -> Self {
        debug_assert!(!pairs.is_empty());
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        ValueCombination { pairs }
    }

    pub fn strength(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn factors(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(f, _)| f as usize)
    }

    /// True if every pair of `other` also appears in `self`.
    pub fn contains(&self, other: &ValueCombination) -> bool {
        let mut mine = self.pairs.iter();
        'outer: for pair in &other.pairs {
            for candidate in mine.by_ref() {
                if candidate == pair {
                    continue 'outer;
                }
                if candidate.0 >= pair.0 {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// True if the fully assigned row agrees with every pair.
    pub fn matches(&self, values: &[u32]) -> bool {
        self.pairs
            .iter()
            .all(|&(f, v)| values.get(f as usize) == Some(&v))
    }
}

/// A duplicate-free set of combinations of one strength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationSet {
    t: usize,
    members: BTreeSet<ValueCombination>,
}

impl CombinationSet {
    pub fn new(t: usize) -> Self {
        CombinationSet {
            t,
            members: BTreeSet::new(),
        }
    }

    pub fn strength(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, combo: &ValueCombination) -> bool {
        self.members.contains(combo)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ValueCombination> {
        self.members.iter()
    }

    /// Returns whether the combination was newly added.
    pub fn insert(&mut self, combo: ValueCombination) -> Result<bool> {
        self.check_strength(combo.strength())?;
        Ok(self.members.insert(combo))
    }

    pub(crate) fn insert_unchecked(&mut self, combo: ValueCombination) -> bool {
        debug_assert_eq!(combo.strength(), self.t);
        self.members.insert(combo)
    }

    pub fn union(&self, other: &CombinationSet) -> Result<CombinationSet> {
        self.check_strength(other.t)?;
        Ok(CombinationSet {
            t: self.t,
            members: self.members.union(&other.members).cloned().collect(),
        })
    }

    /// Members of `self` that are absent from `other`.
    pub fn difference(&self, other: &CombinationSet) -> Result<CombinationSet> {
        self.check_strength(other.t)?;
        Ok(CombinationSet {
            t: self.t,
            members: self.members.difference(&other.members).cloned().collect(),
        })
    }

    pub fn intersection_len(&self, other: &CombinationSet) -> Result<usize> {
        self.check_strength(other.t)?;
        Ok(self.members.intersection(&other.members).count())
    }

    pub fn is_subset(&self, other: &CombinationSet) -> bool {
        self.t == other.t && self.members.is_subset(&other.members)
    }

    fn check_strength(&self, t: usize) -> Result<()> {
        if t != self.t {
            return Err(Error::Validation(format!(
                "mixing {t}-way combinations into a {}-way set",
                self.t
            )));
        }
        Ok(())
    }
}

impl IntoIterator for CombinationSet {
    type Item = ValueCombination;
    type IntoIter = std::collections::btree_set::IntoIter<ValueCombination>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

impl<'a> IntoIterator for &'a CombinationSet {
    type Item = &'a ValueCombination;
    type IntoIter = std::collections::btree_set::Iter<'a, ValueCombination>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn combo(pairs: &[(u32, u32)]) -> ValueCombination {
        ValueCombination::new(pairs.to_vec()).unwrap()
    }

    #[test]
    fn new_sorts_and_rejects_repeated_factors() {
        assert_eq!(combo(&[(2, 0), (0, 1)]).pairs(), &[(0, 1), (2, 0)]);
        assert!(ValueCombination::new(vec![(1, 0), (1, 1)]).is_err());
        assert!(ValueCombination::new(vec![]).is_err());
    }

    #[test]
    fn containment() {
        let big = combo(&[(0, 1), (2, 0), (3, 3)]);
        assert!(big.contains(&combo(&[(0, 1), (3, 3)])));
        assert!(big.contains(&big));
        assert!(!big.contains(&combo(&[(0, 0)])));
        assert!(!big.contains(&combo(&[(1, 0)])));
        assert!(!big.contains(&combo(&[(3, 3), (4, 0)])));
        assert!(!combo(&[(0, 1)]).contains(&big));
    }

    #[test]
    fn set_algebra_is_exact() {
        let mut a = CombinationSet::new(2);
        let mut b = CombinationSet::new(2);
        assert!(a.insert(combo(&[(0, 0), (1, 0)])).unwrap());
        assert!(!a.insert(combo(&[(1, 0), (0, 0)])).unwrap());
        a.insert(combo(&[(0, 0), (2, 1)])).unwrap();
        b.insert(combo(&[(0, 0), (2, 1)])).unwrap();
        b.insert(combo(&[(1, 1), (2, 1)])).unwrap();

        assert_eq!(a.len(), 2);
        assert_eq!(a.union(&b).unwrap().len(), 3);
        let diff = a.difference(&b).unwrap();
        assert_eq!(diff.len(), 1);
        assert!(diff.contains(&combo(&[(0, 0), (1, 0)])));
        assert_eq!(a.intersection_len(&b).unwrap(), 1);
        assert!(diff.is_subset(&a));
    }

    #[test]
    fn strength_mismatch_is_rejected() {
        let mut a = CombinationSet::new(2);
        assert!(a.insert(combo(&[(0, 0)])).is_err());
        assert!(a.union(&CombinationSet::new(3)).is_err());
    }
}
