/// A sorted, deduplicated set of ordered node pairs.
///
/// Iteration order is deterministic, which keeps seeded sampling reproducible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairSet(Vec<(usize, usize)>);

impl PairSet {
    pub fn from_unsorted(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        PairSet(pairs)
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.0.binary_search(&pair).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<(usize, usize)> {
        self.0
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.0.iter().all(|&p| other.contains(p))
    }

    /// Pairs of `self` not in `other`, in order.
    pub fn difference(&self, other: &PairSet) -> PairSet {
        PairSet(self.0.iter().copied().filter(|&p| !other.contains(p)).collect())
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PairSet::from_unsorted(v)
    }
}

impl FromIterator<(usize, usize)> for PairSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        PairSet::from_unsorted(iter.into_iter().collect())
    }
}
