//! Elicitation for profiles of bounded single-crossing width.
//!
//! The inner strategy runs on a view that exposes only one representative
//! per block. Each voter's blocks are merge-sorted while that voter is
//! still available: on release in sequential mode, afterwards in random
//! access mode.

use crate::domain::{
    AccessMode, CandidateId, CandidatePair, CandidatePartition, Preference, VoterId,
};
use crate::error::{Error, Result};
use crate::oracle::{Oracle, QueryLedger};

use super::{sort_candidates, CostSplit, ElicitResult, Strategy};

/// An oracle over block representatives. Local candidate `i` is the first
/// candidate of block `i`.
pub struct CandidateView<'a, O: Oracle + ?Sized> {
    inner: &'a mut O,
    partition: &'a CandidatePartition,
    block_orders: Vec<Option<Vec<Vec<CandidateId>>>>,
}

impl<'a, O: Oracle + ?Sized> CandidateView<'a, O> {
    pub fn new(inner: &'a mut O, partition: &'a CandidatePartition) -> Result<Self> {
        if partition.num_candidates() != inner.num_candidates() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} candidates, oracle has {}",
                partition.num_candidates(),
                inner.num_candidates()
            )));
        }
        let n = inner.num_voters();
        Ok(Self {
            inner,
            partition,
            block_orders: vec![None; n],
        })
    }

    fn global(&self, local: CandidateId) -> Result<CandidateId> {
        self.partition
            .blocks()
            .get(local.0)
            .map(|b| b[0])
            .ok_or(Error::UnknownCandidate(local.0))
    }

    fn sort_blocks(&mut self, voter: VoterId) -> Result<()> {
        if self.block_orders[voter.0].is_some() {
            return Ok(());
        }
        let orders = self
            .partition
            .blocks()
            .iter()
            .map(|b| sort_candidates(self.inner, voter, b))
            .collect::<Result<Vec<_>>>()?;
        self.block_orders[voter.0] = Some(orders);
        Ok(())
    }
}

impl<O: Oracle + ?Sized> Oracle for CandidateView<'_, O> {
    fn num_candidates(&self) -> usize {
        self.partition.blocks().len()
    }

    fn num_voters(&self) -> usize {
        self.inner.num_voters()
    }

    fn access_mode(&self) -> AccessMode {
        self.inner.access_mode()
    }

    fn current_voter(&self) -> Option<VoterId> {
        self.inner.current_voter()
    }

    fn query(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> Result<bool> {
        let (gx, gy) = (self.global(x)?, self.global(y)?);
        self.inner.query(voter, gx, gy)
    }

    fn release(&mut self) -> Result<Option<VoterId>> {
        if let Some(v) = self.inner.current_voter() {
            self.sort_blocks(v)?;
        }
        self.inner.release()
    }

    fn ledger(&self) -> &QueryLedger {
        self.inner.ledger()
    }
}

/// Elicits the representative-restricted profile with `inner`, then sorts
/// every block of every voter and splices the block orders in.
///
/// Every block must occupy a contiguous run of positions in every vote.
pub fn elicit_width<O: Oracle + ?Sized>(
    o: &mut O,
    partition: &CandidatePartition,
    inner: &Strategy,
) -> Result<ElicitResult> {
    let (rep_result, block_orders) = {
        let mut view = CandidateView::new(o, partition)?;
        let r = inner.run(&mut view)?;
        if view.access_mode() == AccessMode::Sequential {
            if let Some(v) = view.current_voter() {
                view.sort_blocks(v)?;
            }
        } else {
            for v in 0..view.num_voters() {
                view.sort_blocks(VoterId(v))?;
            }
        }
        (r, view.block_orders)
    };

    let m = o.num_candidates();
    let mut prefs = Vec::with_capacity(o.num_voters());
    for (v, orders) in block_orders.into_iter().enumerate() {
        let orders = orders.ok_or(Error::VoterNotAvailable(v))?;
        let mut full = Vec::with_capacity(m);
        for &block in rep_result.profile.voter(VoterId(v)).order() {
            full.extend_from_slice(&orders[block.0]);
        }
        prefs.push(Some(Preference::new(full)?));
    }

    let reps = partition.representatives();
    let insertions = rep_result
        .good_bad
        .map(|_| {
            rep_result
                .insertions
                .into_iter()
                .map(|mut t| {
                    t.bad_pairs = t
                        .bad_pairs
                        .iter()
                        .map(|p| CandidatePair::new(reps[p.low().0], reps[p.high().0]))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(t)
                })
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let mut result = ElicitResult::collect(o, prefs, insertions, rep_result.full_sorts)?;
    if result.good_bad.is_some() {
        result.good_bad = rep_result.good_bad.or(Some(CostSplit::default()));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{same_votes, Knowledge, Profile, Scenario, VoterOrdering};
    use crate::elicit::bounds;
    use crate::elicit::sort_elicit;
    use crate::generate::{gen_width_w, gen_width_w_with, BlockMode};
    use crate::oracle::OracleSession;
    use crate::verify::distinct_count;

    fn run(p: &Profile, scenario: Scenario, part: &CandidatePartition, inner: &Strategy) -> ElicitResult {
        let mut s = OracleSession::new(p, scenario).unwrap();
        elicit_width(&mut s, part, inner).unwrap()
    }

    #[test]
    fn width_one_equals_inner() {
        for seed in 0..20 {
            // Identity singletons, so local and global labels coincide.
            let (p, o, _) = gen_width_w(5, 7, 1, seed).unwrap();
            let part = CandidatePartition::singletons(5);
            let scenario = Scenario::sequential(o.clone(), Knowledge::KnownOrder(o.clone()));
            let r = run(&p, scenario.clone(), &part, &Strategy::SequentialSc);
            let mut s = OracleSession::new(&p, scenario).unwrap();
            let direct = Strategy::SequentialSc.run(&mut s).unwrap();
            assert!(same_votes(&r.profile, &p));
            assert_eq!(r.queries, direct.queries);
        }
    }

    #[test]
    fn single_block_is_independent_sorts() {
        let (p, _, part) = gen_width_w_with(4, 5, 4, 2, BlockMode::Free).unwrap();
        let r = run(&p, Scenario::random(Knowledge::UnknownOrder), &part, &Strategy::Unknown);
        assert!(same_votes(&r.profile, &p));
        let mut expected = 0;
        for v in 0..5 {
            let single = Profile::new(4, vec![p.voter(VoterId(v)).clone()]).unwrap();
            let mut s = OracleSession::new(&single, Scenario::random(Knowledge::UnknownOrder)).unwrap();
            sort_elicit(&mut s, VoterId(0)).unwrap();
            expected += s.ledger().count();
        }
        assert_eq!(r.queries, expected);
    }

    #[test]
    fn width_two_all_inner_strategies() {
        for mode in [BlockMode::Fixed, BlockMode::Free] {
            for seed in 0..25 {
                let (p, o, part) = gen_width_w_with(6, 8, 2, seed, mode).unwrap();
                let reps = p.restrict(&part.representatives()).unwrap();
                let d = distinct_count(&reps);
                let k = part.blocks().len();
                let block_cost = bounds::block_sort_bound(part.blocks().iter().map(Vec::len), 8);
                let arrival = VoterOrdering::from_indices(&[3, 0, 7, 5, 1, 6, 2, 4]).unwrap();
                let cases = [
                    (Scenario::random(Knowledge::KnownOrder(o.clone())), Strategy::KnownRandom(o.clone())),
                    (Scenario::sequential(o.clone(), Knowledge::KnownOrder(o.clone())), Strategy::SequentialSc),
                    (
                        Scenario::sequential(arrival.clone(), Knowledge::KnownOrder(o.clone())),
                        Strategy::SequentialKnownAny(o.clone()),
                    ),
                    (Scenario::sequential(arrival.clone(), Knowledge::UnknownOrder), Strategy::Unknown),
                ];
                for (scenario, inner) in cases {
                    let r = run(&p, scenario, &part, &inner);
                    assert!(same_votes(&r.profile, &p), "{inner:?}");
                    assert!(r.queries <= inner.bound(k, 8, d) + block_cost, "{inner:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_mismatched_partition() {
        let (p, _, _) = gen_width_w(4, 2, 2, 0).unwrap();
        let part = CandidatePartition::singletons(3);
        let mut s = OracleSession::new(&p, Scenario::random(Knowledge::UnknownOrder)).unwrap();
        assert!(matches!(
            elicit_width(&mut s, &part, &Strategy::Unknown),
            Err(Error::InvalidPartition(_))
        ));
    }
}
