//! Candidates, voters, preferences and profiles.
//!
//! Candidates and voters are dense indices. A [`Preference`] keeps both
//! its order and the inverse rank map so pairwise lookups are `O(1)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(pub usize);

impl CandidateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoterId(pub usize);

impl VoterId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// An unordered pair of distinct candidates, stored as `(low, high)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidatePair {
    low: CandidateId,
    high: CandidateId,
}

impl CandidatePair {
    pub fn new(x: CandidateId, y: CandidateId) -> Result<Self> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(Self { low: x, high: y }),
            std::cmp::Ordering::Greater => Ok(Self { low: y, high: x }),
            std::cmp::Ordering::Equal => Err(Error::SelfComparison(x.0)),
        }
    }

    pub fn low(self) -> CandidateId {
        self.low
    }

    pub fn high(self) -> CandidateId {
        self.high
    }

    /// All `C(m, 2)` pairs in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = CandidatePair> {
        (0..m).flat_map(move |a| {
            (a + 1..m).map(move |b| CandidatePair {
                low: CandidateId(a),
                high: CandidateId(b),
            })
        })
    }

    /// Dense index of this pair among `CandidatePair::all(m)`.
    pub fn dense_index(self, m: usize) -> usize {
        let (a, b) = (self.low.0, self.high.0);
        a * (2 * m - a - 1) / 2 + (b - a - 1)
    }
}

impl fmt::Display for CandidatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.low, self.high)
    }
}

/// `C(m, 2)`.
pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// A strict total order over `m` candidates, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Preference {
    order: Vec<CandidateId>,
    rank: Vec<usize>,
}

impl Preference {
    pub fn new(order: Vec<CandidateId>) -> Result<Self> {
        let m = order.len();
        let mut rank = vec![usize::MAX; m];
        for (pos, c) in order.iter().enumerate() {
            if c.0 >= m {
                return Err(Error::UnknownCandidate(c.0));
            }
            if rank[c.0] != usize::MAX {
                return Err(Error::NotAPermutation(format!("candidate {} repeated", c.0)));
            }
            rank[c.0] = pos;
        }
        if m == 0 {
            return Err(Error::NotAPermutation("empty preference".into()));
        }
        Ok(Self { order, rank })
    }

    pub fn from_indices(order: &[usize]) -> Result<Self> {
        Self::new(order.iter().copied().map(CandidateId).collect())
    }

    /// `c0 ≻ c1 ≻ … ≻ c(m-1)`.
    pub fn identity(m: usize) -> Self {
        Self {
            order: (0..m).map(CandidateId).collect(),
            rank: (0..m).collect(),
        }
    }

    pub fn num_candidates(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[CandidateId] {
        &self.order
    }

    pub fn rank(&self, c: CandidateId) -> usize {
        self.rank[c.0]
    }

    pub fn at(&self, position: usize) -> CandidateId {
        self.order[position]
    }

    /// Whether `x` is ranked above `y`.
    pub fn prefers(&self, x: CandidateId, y: CandidateId) -> bool {
        self.rank[x.0] < self.rank[y.0]
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self::new(order).expect("reversal of a permutation")
    }

    /// Swaps the candidates at `position` and `position + 1`.
    pub fn swap_adjacent(&mut self, position: usize) {
        self.order.swap(position, position + 1);
        self.rank[self.order[position].0] = position;
        self.rank[self.order[position + 1].0] = position + 1;
    }

    /// Restricts the order to `subset`, keeping the relative order of the
    /// retained candidates.
    pub fn restrict(&self, subset: &[CandidateId]) -> Result<Restriction> {
        if subset.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        let mut candidates = subset.to_vec();
        candidates.sort_unstable();
        candidates.dedup();
        if let Some(c) = candidates.iter().find(|c| c.0 >= self.num_candidates()) {
            return Err(Error::UnknownCandidate(c.0));
        }
        let mut retained = candidates.clone();
        retained.sort_by_key(|c| self.rank(*c));
        let local: Vec<CandidateId> = retained
            .iter()
            .map(|c| CandidateId(candidates.binary_search(c).expect("retained candidate")))
            .collect();
        Ok(Restriction {
            candidates,
            preference: Preference::new(local)?,
        })
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(" > ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A preference over a subset of candidates. The inner preference is over
/// local indices `0..k`; `candidates[local]` maps back to the original id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub candidates: Vec<CandidateId>,
    pub preference: Preference,
}

impl Restriction {
    pub fn global(&self, local: CandidateId) -> CandidateId {
        self.candidates[local.0]
    }

    /// The retained candidates in preference order, with original ids.
    pub fn order(&self) -> Vec<CandidateId> {
        self.preference
            .order()
            .iter()
            .map(|&c| self.global(c))
            .collect()
    }
}

/// A permutation of the voters, e.g. a single-crossing order or an arrival
/// order. `at(k)` is the voter at position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VoterOrdering {
    perm: Vec<VoterId>,
    position: Vec<usize>,
}

impl VoterOrdering {
    pub fn new(perm: Vec<VoterId>) -> Result<Self> {
        let n = perm.len();
        let mut position = vec![usize::MAX; n];
        for (k, v) in perm.iter().enumerate() {
            if v.0 >= n {
                return Err(Error::UnknownVoter(v.0));
            }
            if position[v.0] != usize::MAX {
                return Err(Error::NotAPermutation(format!("voter {} repeated", v.0)));
            }
            position[v.0] = k;
        }
        Ok(Self { perm, position })
    }

    pub fn from_indices(perm: &[usize]) -> Result<Self> {
        Self::new(perm.iter().copied().map(VoterId).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).map(VoterId).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn at(&self, k: usize) -> VoterId {
        self.perm[k]
    }

    pub fn position(&self, v: VoterId) -> usize {
        self.position[v.0]
    }

    pub fn voters(&self) -> &[VoterId] {
        &self.perm
    }

    pub fn reversed(&self) -> Self {
        let mut perm = self.perm.clone();
        perm.reverse();
        Self::new(perm).expect("reversal of a permutation")
    }
}

pub fn reverse_ordering(o: &VoterOrdering) -> VoterOrdering {
    o.reversed()
}

/// `n` preferences over a common set of `m` candidates, indexed by voter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    m: usize,
    prefs: Vec<Preference>,
    certificate: Option<VoterOrdering>,
}

impl Profile {
    pub fn new(m: usize, prefs: Vec<Preference>) -> Result<Self> {
        if m == 0 {
            return Err(Error::ProfileMismatch("no candidates".into()));
        }
        if prefs.is_empty() {
            return Err(Error::ProfileMismatch("no voters".into()));
        }
        if let Some((v, p)) = prefs
            .iter()
            .enumerate()
            .find(|(_, p)| p.num_candidates() != m)
        {
            return Err(Error::ProfileMismatch(format!(
                "voter {v} ranks {} candidates, expected {m}",
                p.num_candidates()
            )));
        }
        Ok(Self {
            m,
            prefs,
            certificate: None,
        })
    }

    /// Attaches a voter ordering claimed to be single crossing. The claim is
    /// not checked here; see [`crate::verify::is_single_crossing`].
    pub fn with_certificate(mut self, order: VoterOrdering) -> Result<Self> {
        if order.len() != self.prefs.len() {
            return Err(Error::ProfileMismatch(format!(
                "certificate covers {} voters, profile has {}",
                order.len(),
                self.prefs.len()
            )));
        }
        self.certificate = Some(order);
        Ok(self)
    }

    pub fn without_certificate(mut self) -> Self {
        self.certificate = None;
        self
    }

    pub fn certificate(&self) -> Option<&VoterOrdering> {
        self.certificate.as_ref()
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn num_voters(&self) -> usize {
        self.prefs.len()
    }

    pub fn voter(&self, v: VoterId) -> &Preference {
        &self.prefs[v.0]
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn restrict(&self, subset: &[CandidateId]) -> Result<Profile> {
        let prefs = self
            .prefs
            .iter()
            .map(|p| p.restrict(subset).map(|r| r.preference))
            .collect::<Result<Vec<_>>>()?;
        let k = prefs[0].num_candidates();
        let p = Profile::new(k, prefs)?;
        match &self.certificate {
            Some(o) => p.with_certificate(o.clone()),
            None => Ok(p),
        }
    }
}

/// Same preferences, ignoring the certificate.
pub fn same_votes(a: &Profile, b: &Profile) -> bool {
    a.m == b.m && a.prefs == b.prefs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessMode {
    Random,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Access {
    Random,
    Sequential(VoterOrdering),
}

impl Access {
    pub fn mode(&self) -> AccessMode {
        match self {
            Access::Random => AccessMode::Random,
            Access::Sequential(_) => AccessMode::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Knowledge {
    KnownOrder(VoterOrdering),
    UnknownOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub access: Access,
    pub knowledge: Knowledge,
}

impl Scenario {
    pub fn random(knowledge: Knowledge) -> Self {
        Self {
            access: Access::Random,
            knowledge,
        }
    }

    pub fn sequential(arrival: VoterOrdering, knowledge: Knowledge) -> Self {
        Self {
            access: Access::Sequential(arrival),
            knowledge,
        }
    }

    pub fn known_order(&self) -> Option<&VoterOrdering> {
        match &self.knowledge {
            Knowledge::KnownOrder(o) => Some(o),
            Knowledge::UnknownOrder => None,
        }
    }
}

/// Disjoint blocks of candidates covering all `m` candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePartition {
    blocks: Vec<Vec<CandidateId>>,
    width: usize,
}

impl CandidatePartition {
    pub fn new(m: usize, blocks: Vec<Vec<CandidateId>>) -> Result<Self> {
        let mut seen = vec![false; m];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for c in block {
                if c.0 >= m {
                    return Err(Error::UnknownCandidate(c.0));
                }
                if std::mem::replace(&mut seen[c.0], true) {
                    return Err(Error::InvalidPartition(format!(
                        "candidate {} in two blocks",
                        c.0
                    )));
                }
            }
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("candidate {c} not covered")));
        }
        let width = blocks.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { blocks, width })
    }

    pub fn singletons(m: usize) -> Self {
        Self {
            blocks: (0..m).map(|c| vec![CandidateId(c)]).collect(),
            width: 1,
        }
    }

    pub fn blocks(&self) -> &[Vec<CandidateId>] {
        &self.blocks
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_candidates(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// One candidate per block: the first listed.
    pub fn representatives(&self) -> Vec<CandidateId> {
        self.blocks.iter().map(|b| b[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm_strategy(max: usize) -> impl Strategy<Value = Vec<usize>> {
        (1..=max).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    }

    #[test]
    fn reverse_small() {
        let o = VoterOrdering::from_indices(&[0, 1, 2]).unwrap();
        assert_eq!(reverse_ordering(&o).voters(), &[VoterId(2), VoterId(1), VoterId(0)]);
        let one = VoterOrdering::identity(1);
        assert_eq!(reverse_ordering(&one), one);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn reverse_is_involution(perm in perm_strategy(10)) {
            let o = VoterOrdering::from_indices(&perm).unwrap();
            prop_assert_eq!(reverse_ordering(&reverse_ordering(&o)), o);
        }

        #[test]
        fn rank_and_order_are_inverse(perm in perm_strategy(12)) {
            let p = Preference::from_indices(&perm).unwrap();
            for (k, &c) in p.order().iter().enumerate() {
                prop_assert_eq!(p.rank(c), k);
            }
        }
    }

    #[test]
    fn restrict_examples() {
        // a > b > c with a=0, b=1, c=2
        let p = Preference::identity(3);
        let r = p.restrict(&[CandidateId(0), CandidateId(2)]).unwrap();
        assert_eq!(r.order(), vec![CandidateId(0), CandidateId(2)]);
        let full = p
            .restrict(&[CandidateId(0), CandidateId(1), CandidateId(2)])
            .unwrap();
        assert_eq!(full.preference, p);
        assert_eq!(p.restrict(&[]), Err(Error::EmptyRestriction));
    }

    #[test]
    fn restrict_all_subsets_preserves_pairs() {
        let p = Preference::from_indices(&[3, 0, 5, 1, 4, 2]).unwrap();
        for mask in 1u32..(1 << 6) {
            let subset: Vec<_> = (0..6).filter(|i| mask >> i & 1 == 1).map(CandidateId).collect();
            let r = p.restrict(&subset).unwrap();
            let order = r.order();
            for i in 0..order.len() {
                for j in i + 1..order.len() {
                    assert!(p.prefers(order[i], order[j]));
                }
            }
            assert_eq!(order.len(), subset.len());
        }
    }

    #[test]
    fn rejects_bad_permutations() {
        assert!(Preference::from_indices(&[0, 0]).is_err());
        assert!(Preference::from_indices(&[0, 2]).is_err());
        assert!(VoterOrdering::from_indices(&[1, 1]).is_err());
    }

    #[test]
    fn pair_dense_index_matches_enumeration() {
        for m in 2..9 {
            for (k, pair) in CandidatePair::all(m).enumerate() {
                assert_eq!(pair.dense_index(m), k);
            }
            assert_eq!(CandidatePair::all(m).count(), pair_count(m));
        }
    }

    #[test]
    fn partition_validation() {
        let c = |i| CandidateId(i);
        assert!(CandidatePartition::new(3, vec![vec![c(0), c(1)], vec![c(2)]]).is_ok());
        assert!(CandidatePartition::new(3, vec![vec![c(0), c(1)]]).is_err());
        assert!(CandidatePartition::new(3, vec![vec![c(0), c(1)], vec![c(1), c(2)]]).is_err());
        assert_eq!(CandidatePartition::singletons(4).width(), 1);
    }

    #[test]
    fn swap_adjacent_keeps_rank_consistent() {
        let mut p = Preference::identity(4);
        p.swap_adjacent(1);
        assert_eq!(p, Preference::from_indices(&[0, 2, 1, 3]).unwrap());
    }
}
