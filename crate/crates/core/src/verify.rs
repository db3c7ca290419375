//! Ground-truth checkers: single-crossing certificates, brute-force order
//! search, distinct-vote counting, splitting pairs, and the per-pair
//! bad-cost audits for the insertion-based algorithms.

use std::collections::{BTreeMap, HashSet};

use crate::domain::{CandidatePair, Preference, Profile, VoterId, VoterOrdering};
use crate::elicit::InsertionTrace;
use crate::error::{Error, Result};

/// For each unordered pair, the positions along a voter ordering at which
/// its orientation flips. Position `k` means voters at `k - 1` and `k`
/// disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingTable {
    m: usize,
    flips: Vec<Vec<usize>>,
}

impl CrossingTable {
    pub fn flips(&self, pair: CandidatePair) -> &[usize] {
        &self.flips[pair.dense_index(self.m)]
    }

    pub fn is_single_crossing(&self) -> bool {
        self.flips.iter().all(|f| f.len() <= 1)
    }

    /// Pairs whose orientation flips more than once.
    pub fn violations(&self) -> Vec<CandidatePair> {
        CandidatePair::all(self.m)
            .filter(|p| self.flips(*p).len() > 1)
            .collect()
    }
}

pub fn crossing_table(p: &Profile, o: &VoterOrdering) -> CrossingTable {
    let m = p.num_candidates();
    let mut flips = vec![Vec::new(); crate::domain::pair_count(m)];
    for k in 1..o.len() {
        let (prev, cur) = (p.voter(o.at(k - 1)), p.voter(o.at(k)));
        for (i, pair) in CandidatePair::all(m).enumerate() {
            if prev.prefers(pair.low(), pair.high()) != cur.prefers(pair.low(), pair.high()) {
                flips[i].push(k);
            }
        }
    }
    CrossingTable { m, flips }
}

/// Whether every pair's orientation flips at most once along `o`.
pub fn is_single_crossing(p: &Profile, o: &VoterOrdering) -> bool {
    o.len() == p.num_voters() && crossing_table(p, o).is_single_crossing()
}

/// Searches all voter orderings (with pruning) for a single-crossing one.
pub fn find_sc_order_bruteforce(p: &Profile) -> Result<Option<VoterOrdering>> {
    let n = p.num_voters();
    if n > 10 {
        return Err(Error::BruteForceLimit(n));
    }
    let m = p.num_candidates();
    let orient: Vec<Vec<bool>> = p
        .preferences()
        .iter()
        .map(|v| {
            CandidatePair::all(m)
                .map(|pair| v.prefers(pair.low(), pair.high()))
                .collect()
        })
        .collect();

    fn extend(
        orient: &[Vec<bool>],
        chosen: &mut Vec<usize>,
        used: &mut [bool],
        flipped: &[bool],
    ) -> bool {
        if chosen.len() == orient.len() {
            return true;
        }
        for v in 0..orient.len() {
            if used[v] {
                continue;
            }
            let mut next = flipped.to_vec();
            if let Some(&last) = chosen.last() {
                let mut ok = true;
                for (k, f) in next.iter_mut().enumerate() {
                    if orient[last][k] != orient[v][k] {
                        if *f {
                            ok = false;
                            break;
                        }
                        *f = true;
                    }
                }
                if !ok {
                    continue;
                }
            }
            used[v] = true;
            chosen.push(v);
            if extend(orient, chosen, used, &next) {
                return true;
            }
            chosen.pop();
            used[v] = false;
        }
        false
    }

    let mut chosen = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let flipped = vec![false; crate::domain::pair_count(m)];
    if extend(&orient, &mut chosen, &mut used, &flipped) {
        Ok(Some(VoterOrdering::from_indices(&chosen)?))
    } else {
        Ok(None)
    }
}

pub fn distinct_count(p: &Profile) -> usize {
    p.preferences().iter().collect::<HashSet<_>>().len()
}

/// The first pair (lexicographically) that splits `votes` into two sides of
/// at least `⌊k/2⌋` votes each. Requires at least two votes.
pub fn find_splitting_pair(votes: &[&Preference]) -> Result<CandidatePair> {
    if votes.len() < 2 {
        return Err(Error::NoSplittingPair);
    }
    let m = votes[0].num_candidates();
    let half = votes.len() / 2;
    CandidatePair::all(m)
        .find(|pair| {
            let above = votes
                .iter()
                .filter(|v| v.prefers(pair.low(), pair.high()))
                .count();
            above >= half && votes.len() - above >= half
        })
        .ok_or(Error::NoSplittingPair)
}

/// Voters at which each pair was compared as a bad pair, in trace order.
pub fn bad_contributions(traces: &[InsertionTrace]) -> BTreeMap<CandidatePair, Vec<VoterId>> {
    let mut out: BTreeMap<CandidatePair, Vec<VoterId>> = BTreeMap::new();
    for t in traces {
        for pair in &t.bad_pairs {
            out.entry(*pair).or_default().push(t.voter);
        }
    }
    out
}

/// A failure of the gap-halving property for one bad contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalvingViolation {
    pub pair: CandidatePair,
    pub voter: VoterId,
    pub reason: String,
}

/// Replays an arrival sequence and checks, for every bad contribution of a
/// pair at voter `l`, that `l` falls strictly inside the gap between the
/// nearest already-elicited voters on opposite sides of the pair's
/// crossing, and that this gap at least halves. Also checks each pair has
/// at most `⌈log₂ n⌉ + 1` contributions.
pub fn check_gap_halving(
    truth: &Profile,
    sc_order: &VoterOrdering,
    arrival: &VoterOrdering,
    traces: &[InsertionTrace],
) -> Vec<HalvingViolation> {
    let m = truth.num_candidates();
    let n = truth.num_voters();
    let limit = crate::elicit::bounds::ceil_log2(n) + 1;
    let mut bad_at: HashSet<(VoterId, CandidatePair)> = HashSet::new();
    for t in traces {
        bad_at.extend(t.bad_pairs.iter().map(|p| (t.voter, *p)));
    }
    let mut violations = Vec::new();
    for pair in CandidatePair::all(m) {
        // Positions of elicited voters on the "low preferred" side and the other side.
        let mut low_side: Vec<usize> = Vec::new();
        let mut high_side: Vec<usize> = Vec::new();
        let mut contributions = 0;
        for &v in arrival.voters() {
            let pos = sc_order.position(v);
            let prefers_low = truth.voter(v).prefers(pair.low(), pair.high());
            if bad_at.contains(&(v, pair)) {
                contributions += 1;
                if let Some(gap) = side_gap(&low_side, &high_side) {
                    let inside = pos > gap.0 && pos < gap.1;
                    let mut low2 = low_side.clone();
                    let mut high2 = high_side.clone();
                    if prefers_low {
                        low2.push(pos);
                    } else {
                        high2.push(pos);
                    }
                    let before = gap.1 - gap.0;
                    match side_gap(&low2, &high2) {
                        Some(after) if inside && 2 * (after.1 - after.0) <= before => {}
                        after => violations.push(HalvingViolation {
                            pair,
                            voter: v,
                            reason: format!(
                                "gap {gap:?} -> {after:?}, voter position {pos}, inside: {inside}"
                            ),
                        }),
                    }
                }
            }
            if prefers_low {
                low_side.push(pos);
            } else {
                high_side.push(pos);
            }
        }
        if contributions > limit {
            violations.push(HalvingViolation {
                pair,
                voter: VoterId(usize::MAX),
                reason: format!("{contributions} bad contributions exceed {limit}"),
            });
        }
    }
    violations
}

/// The open interval `(inner edge, inner edge)` separating the two sides,
/// or `None` if one side is empty. Sides that interleave yield a zero-width
/// interval marker `(a, a)`.
fn side_gap(low: &[usize], high: &[usize]) -> Option<(usize, usize)> {
    if low.is_empty() || high.is_empty() {
        return None;
    }
    let (lmin, lmax) = (*low.iter().min()?, *low.iter().max()?);
    let (hmin, hmax) = (*high.iter().min()?, *high.iter().max()?);
    if lmax < hmin {
        Some((lmax, hmin))
    } else if hmax < lmin {
        Some((hmax, lmin))
    } else {
        Some((lmax, lmax))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CandidateId;

    fn pref(order: &[usize]) -> Preference {
        Preference::from_indices(order).unwrap()
    }

    fn chain3() -> Profile {
        // 012 -> 102 -> 120 -> 210
        Profile::new(
            3,
            vec![pref(&[0, 1, 2]), pref(&[1, 0, 2]), pref(&[1, 2, 0]), pref(&[2, 1, 0])],
        )
        .unwrap()
    }

    #[test]
    fn single_voter_is_single_crossing() {
        let p = Profile::new(4, vec![pref(&[3, 1, 0, 2])]).unwrap();
        assert!(is_single_crossing(&p, &VoterOrdering::identity(1)));
        assert_eq!(
            find_sc_order_bruteforce(&p).unwrap(),
            Some(VoterOrdering::identity(1))
        );
    }

    #[test]
    fn chain_order_checks() {
        let p = chain3();
        let id = VoterOrdering::identity(4);
        assert!(is_single_crossing(&p, &id));
        assert!(is_single_crossing(&p, &id.reversed()));
        // Vote 1 placed between votes 3 and 4.
        let bad = VoterOrdering::from_indices(&[1, 2, 0, 3]).unwrap();
        assert!(!is_single_crossing(&p, &bad));
        assert!(!is_single_crossing(&p, &bad.reversed()));
        let table = crossing_table(&p, &bad);
        assert!(!table.violations().is_empty());
    }

    #[test]
    fn condorcet_cycle_has_no_order() {
        let p = Profile::new(3, vec![pref(&[0, 1, 2]), pref(&[1, 2, 0]), pref(&[2, 0, 1])]).unwrap();
        assert_eq!(find_sc_order_bruteforce(&p).unwrap(), None);
    }

    #[test]
    fn bruteforce_limit() {
        let p = Profile::new(2, vec![Preference::identity(2); 11]).unwrap();
        assert_eq!(find_sc_order_bruteforce(&p), Err(Error::BruteForceLimit(11)));
    }

    #[test]
    fn distinct_counts() {
        let p = Profile::new(3, vec![Preference::identity(3); 5]).unwrap();
        assert_eq!(distinct_count(&p), 1);
        assert_eq!(distinct_count(&chain3()), 4);
    }

    #[test]
    fn splitting_pairs() {
        let a = pref(&[0, 1, 2]);
        let b = pref(&[0, 2, 1]);
        let pair = find_splitting_pair(&[&a, &b]).unwrap();
        assert_eq!(pair, CandidatePair::new(CandidateId(1), CandidateId(2)).unwrap());

        let chain = chain3();
        let votes: Vec<&Preference> = chain.preferences().iter().collect();
        let pair = find_splitting_pair(&votes).unwrap();
        let above = votes
            .iter()
            .filter(|v| v.prefers(pair.low(), pair.high()))
            .count();
        assert_eq!(above, 2);

        assert_eq!(find_splitting_pair(&[&a]), Err(Error::NoSplittingPair));
        // Identical votes cannot be split.
        assert_eq!(find_splitting_pair(&[&a, &a]), Err(Error::NoSplittingPair));
    }
}
