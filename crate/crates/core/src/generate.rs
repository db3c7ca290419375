//! Seeded generators for single-crossing profiles.
//!
//! Profiles are built from a [`CrossingSchedule`]: a start order plus a
//! sequence of adjacent transpositions, each of which inverts a pair that
//! is still in its start orientation. Every pair is therefore transposed at
//! most once, which is exactly the single-crossing property along the
//! schedule.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    pair_count, CandidateId, CandidatePartition, Preference, Profile, VoterId, VoterOrdering,
};
use crate::error::{Error, Result};
use crate::verify::is_single_crossing;

/// A start order and the positions of successive adjacent swaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSchedule {
    pub start: Preference,
    pub swaps: Vec<usize>,
}

impl CrossingSchedule {
    /// Random schedule with `len` swaps; `len ≤ C(m, 2)`.
    fn random(m: usize, len: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let start = Preference::from_indices(&order).expect("shuffled permutation");
        let mut current = start.clone();
        let mut swaps = Vec::with_capacity(len);
        for _ in 0..len {
            let open: Vec<usize> = (0..m - 1)
                .filter(|&j| start.prefers(current.at(j), current.at(j + 1)))
                .collect();
            let j = *open.choose(rng).expect("fewer than C(m,2) inversions so far");
            current.swap_adjacent(j);
            swaps.push(j);
        }
        Self { start, swaps }
    }

    /// The `swaps.len() + 1` preferences visited by the schedule.
    pub fn chain(&self) -> Vec<Preference> {
        let mut current = self.start.clone();
        let mut out = Vec::with_capacity(self.swaps.len() + 1);
        out.push(current.clone());
        for &j in &self.swaps {
            current.swap_adjacent(j);
            out.push(current.clone());
        }
        out
    }
}

/// A random single-crossing profile and its certificate ordering.
///
/// Voter ids are shuffled, so the certificate is generally not the
/// identity. With `distinct`, all `n` votes differ, which needs
/// `n ≤ C(m, 2) + 1`.
pub fn gen_single_crossing(
    m: usize,
    n: usize,
    seed: u64,
    distinct: bool,
) -> Result<(Profile, VoterOrdering)> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("m and n must be at least 1".into()));
    }
    let max = pair_count(m);
    if distinct && n > max + 1 {
        return Err(Error::TooManyDistinct { n, max: max + 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain_len = if distinct {
        rng.gen_range(n - 1..=max)
    } else {
        rng.gen_range(0..=max)
    };
    let chain = CrossingSchedule::random(m, chain_len, &mut rng).chain();

    let mut steps: Vec<usize> = if distinct {
        index::sample(&mut rng, chain.len(), n).into_vec()
    } else {
        (0..n).map(|_| rng.gen_range(0..chain.len())).collect()
    };
    steps.sort_unstable();

    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let mut prefs = vec![None; n];
    for (k, &step) in steps.iter().enumerate() {
        prefs[ids[k]] = Some(chain[step].clone());
    }
    let prefs: Vec<Preference> = prefs.into_iter().map(|p| p.expect("filled")).collect();
    let order = VoterOrdering::from_indices(&ids)?;
    let profile = Profile::new(m, prefs)?.with_certificate(order.clone())?;
    assert!(
        is_single_crossing(&profile, &order),
        "generator produced a non-single-crossing profile"
    );
    Ok((profile, order))
}

/// The `C(m, 2) + 1` votes of a bubble-sort chain from the identity order
/// to its reverse, in chain order.
pub fn gen_maximal_chain(m: usize) -> Profile {
    let mut current = Preference::identity(m.max(1));
    let mut prefs = vec![current.clone()];
    for pass in 0..m.saturating_sub(1) {
        for j in 0..m - 1 - pass {
            current.swap_adjacent(j);
            prefs.push(current.clone());
        }
    }
    let n = prefs.len();
    Profile::new(m.max(1), prefs)
        .and_then(|p| p.with_certificate(VoterOrdering::identity(n)))
        .expect("chain profile is well formed")
}

/// How candidates inside a block are ordered in a width-`w` profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockMode {
    /// Each block's internal order is the same for every voter.
    #[default]
    Fixed,
    /// Each voter orders each block independently at random.
    Free,
}

/// A profile of single-crossing width `w`: candidates are split into
/// blocks of at most `w`, every block is contiguous in every vote, and the
/// profile restricted to one representative per block is single crossing
/// with respect to the returned ordering.
pub fn gen_width_w(
    m: usize,
    n: usize,
    w: usize,
    seed: u64,
) -> Result<(Profile, VoterOrdering, CandidatePartition)> {
    gen_width_w_with(m, n, w, seed, BlockMode::Fixed)
}

pub fn gen_width_w_with(
    m: usize,
    n: usize,
    w: usize,
    seed: u64,
    mode: BlockMode,
) -> Result<(Profile, VoterOrdering, CandidatePartition)> {
    if w == 0 || w > m {
        return Err(Error::InvalidArgument(format!("width {w} not in 1..={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5743_4944_5448);
    let mut candidates: Vec<CandidateId> = (0..m).map(CandidateId).collect();
    candidates.shuffle(&mut rng);
    let blocks: Vec<Vec<CandidateId>> = candidates.chunks(w).map(<[_]>::to_vec).collect();
    let k = blocks.len();
    let (meta, order) = gen_single_crossing(k, n, rng.gen(), false)?;

    let prefs = (0..n)
        .map(|v| {
            let mut full = Vec::with_capacity(m);
            for &b in meta.voter(VoterId(v)).order() {
                let mut block = blocks[b.0].clone();
                if mode == BlockMode::Free {
                    block.shuffle(&mut rng);
                }
                full.extend(block);
            }
            Preference::new(full)
        })
        .collect::<Result<Vec<_>>>()?;
    let profile = Profile::new(m, prefs)?.with_certificate(order.clone())?;
    let partition = CandidatePartition::new(m, blocks)?;
    Ok((profile, order, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CandidatePair;
    use crate::verify::distinct_count;

    #[test]
    fn single_voter() {
        let (p, o) = gen_single_crossing(3, 1, 1, false).unwrap();
        assert_eq!(p.num_voters(), 1);
        assert!(is_single_crossing(&p, &o));
    }

    #[test]
    fn two_candidates_flip_at_most_once() {
        for seed in 0..20 {
            let (p, o) = gen_single_crossing(2, 5, seed, false).unwrap();
            let flips = o
                .voters()
                .windows(2)
                .filter(|w| p.voter(w[0]) != p.voter(w[1]))
                .count();
            assert!(flips <= 1);
        }
    }

    #[test]
    fn seeded_draws_are_single_crossing() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..500u64 {
            let m = rng.gen_range(1..=7);
            let n = rng.gen_range(1..=12);
            let distinct = n <= pair_count(m) + 1 && seed % 2 == 0;
            let (p, o) = gen_single_crossing(m, n, seed, distinct).unwrap();
            assert!(is_single_crossing(&p, &o));
            if distinct {
                assert_eq!(distinct_count(&p), n);
            }
        }
    }

    #[test]
    fn same_seed_same_profile() {
        let a = gen_single_crossing(6, 15, 42, false).unwrap();
        let b = gen_single_crossing(6, 15, 42, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_many_distinct() {
        assert_eq!(
            gen_single_crossing(3, 5, 0, true).unwrap_err(),
            Error::TooManyDistinct { n: 5, max: 4 }
        );
        assert!(gen_single_crossing(3, 4, 0, true).is_ok());
    }

    #[test]
    fn maximal_chains() {
        let p2 = gen_maximal_chain(2);
        assert_eq!(
            p2.preferences(),
            &[Preference::identity(2), Preference::from_indices(&[1, 0]).unwrap()]
        );
        for m in 2..=7 {
            let p = gen_maximal_chain(m);
            assert_eq!(p.num_voters(), pair_count(m) + 1);
            assert_eq!(distinct_count(&p), pair_count(m) + 1);
            assert!(is_single_crossing(&p, &VoterOrdering::identity(p.num_voters())));
            assert_eq!(p.voter(VoterId(p.num_voters() - 1)), &Preference::identity(m).reversed());
            for k in 1..p.num_voters() {
                let (a, b) = (p.voter(VoterId(k - 1)), p.voter(VoterId(k)));
                let differ = CandidatePair::all(m)
                    .filter(|q| a.prefers(q.low(), q.high()) != b.prefers(q.low(), q.high()))
                    .count();
                assert_eq!(differ, 1);
            }
        }
    }

    #[test]
    fn width_one_is_plain_single_crossing() {
        let (p, o, part) = gen_width_w(5, 6, 1, 3).unwrap();
        assert_eq!(part.width(), 1);
        assert_eq!(part.blocks().len(), 5);
        assert!(is_single_crossing(&p, &o));
    }

    #[test]
    fn full_width_single_block() {
        let (p, _, part) = gen_width_w(4, 1, 4, 3).unwrap();
        assert_eq!(part.blocks().len(), 1);
        assert_eq!(p.num_voters(), 1);
    }

    #[test]
    fn width_two_representatives_single_crossing() {
        for mode in [BlockMode::Fixed, BlockMode::Free] {
            for seed in 0..30 {
                let (p, o, part) = gen_width_w_with(6, 8, 2, seed, mode).unwrap();
                let reps = p.restrict(&part.representatives()).unwrap();
                assert!(is_single_crossing(&reps, &o));
                for pref in p.preferences() {
                    for block in part.blocks() {
                        let ranks: Vec<usize> = block.iter().map(|&c| pref.rank(c)).collect();
                        let (lo, hi) = (ranks.iter().min().unwrap(), ranks.iter().max().unwrap());
                        assert_eq!(hi - lo + 1, block.len(), "block not contiguous");
                    }
                }
            }
        }
    }
}
