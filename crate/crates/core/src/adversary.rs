//! Adaptive answer sources that force the query lower bounds.
//!
//! All three adversaries use the reference order `c0 ≻ c1 ≻ … ≻ c(m-1)`
//! and pair the candidates as `{c0, c1}, {c2, c3}, …`; with odd `m` the
//! last candidate is unpaired. After a run, [`verdict`] either certifies
//! the algorithm's output or refutes it with a single-crossing witness
//! profile that replays every logged answer and disagrees with the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    CandidateId, CandidatePair, Knowledge, Preference, Profile, Scenario, VoterId, VoterOrdering,
};
use crate::elicit::{self, ElicitResult};
use crate::error::Result;
use crate::oracle::{AnswerSource, Oracle, OracleSession, QueryLedger};
use crate::verify::is_single_crossing;

/// Index `k` of the intra pair `{c(2k), c(2k+1)}`, if `{x, y}` is one.
pub fn intra_pair_index(pair: CandidatePair) -> Option<usize> {
    let (a, b) = (pair.low().0, pair.high().0);
    (a % 2 == 0 && b == a + 1).then_some(a / 2)
}

fn intra_pair(k: usize) -> CandidatePair {
    CandidatePair::new(CandidateId(2 * k), CandidateId(2 * k + 1)).expect("distinct")
}

/// Ledger entries that compare the two members of an intra pair.
pub fn intra_pair_queries(ledger: &QueryLedger) -> usize {
    ledger
        .entries()
        .iter()
        .filter(|q| intra_pair_index(q.pair).is_some())
        .count()
}

/// The reference order with the given intra pairs transposed.
fn reference_with_swaps(m: usize, swapped: impl Fn(usize) -> bool) -> Preference {
    let mut p = Preference::identity(m);
    for k in 0..m / 2 {
        if swapped(k) {
            p.swap_adjacent(2 * k);
        }
    }
    p
}

/// An adversary's proposed completion of the profile.
#[derive(Debug, Clone)]
pub struct Witness {
    pub profile: Profile,
    pub order: VoterOrdering,
    /// Where the witness is designed to contradict the output, if anywhere.
    pub target: Option<(VoterId, CandidatePair)>,
}

#[derive(Debug, Clone)]
pub struct Refutation {
    pub witness: Profile,
    pub order: VoterOrdering,
    pub voter: VoterId,
    pub pair: CandidatePair,
}

#[derive(Debug, Clone)]
pub enum AdversaryVerdict {
    Certified { queries: usize },
    Refuted(Refutation),
}

impl AdversaryVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, AdversaryVerdict::Certified { .. })
    }
}

pub trait Adversary: AnswerSource {
    /// The access model and order knowledge the adversary is built for.
    fn scenario(&self) -> Scenario;
    /// Completions to try, most damaging first.
    fn witnesses(&self, output: &Profile) -> Vec<Witness>;
}

/// Whether `witness` explains every logged answer.
pub fn replays(witness: &Profile, ledger: &QueryLedger) -> bool {
    ledger.entries().iter().all(|q| {
        witness.voter(q.voter).prefers(q.pair.low(), q.pair.high()) == q.low_preferred
    })
}

/// Refutes only with a witness that is single crossing, replays the ledger
/// and disagrees with `output`; certifies otherwise.
pub fn verdict<A: Adversary + ?Sized>(
    adversary: &A,
    ledger: &QueryLedger,
    output: &Profile,
) -> AdversaryVerdict {
    for w in adversary.witnesses(output) {
        if w.profile.num_voters() != output.num_voters()
            || w.profile.num_candidates() != output.num_candidates()
            || !is_single_crossing(&w.profile, &w.order)
            || !replays(&w.profile, ledger)
        {
            continue;
        }
        if let Some((voter, pair)) = disagreement(&w.profile, output, w.target) {
            return AdversaryVerdict::Refuted(Refutation {
                witness: w.profile,
                order: w.order,
                voter,
                pair,
            });
        }
    }
    AdversaryVerdict::Certified {
        queries: ledger.count(),
    }
}

fn disagreement(
    witness: &Profile,
    output: &Profile,
    target: Option<(VoterId, CandidatePair)>,
) -> Option<(VoterId, CandidatePair)> {
    let differs = |v: VoterId, pair: CandidatePair| {
        witness.voter(v).prefers(pair.low(), pair.high())
            != output.voter(v).prefers(pair.low(), pair.high())
    };
    if let Some((v, pair)) = target {
        if differs(v, pair) {
            return Some((v, pair));
        }
    }
    (0..witness.num_voters()).map(VoterId).find_map(|v| {
        CandidatePair::all(witness.num_candidates())
            .find(|&pair| differs(v, pair))
            .map(|pair| (v, pair))
    })
}

/// Per-pair state of the random-access known-order adversary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairState {
    /// Largest voter answered with the first member on top.
    pub theta: usize,
    /// Smallest voter answered with the second member on top.
    pub beta: usize,
}

/// Random access, single crossing with respect to the identity order.
/// Intra-pair queries are answered according to whichever of `theta` and
/// `beta` is closer, ties going to `theta`.
#[derive(Debug, Clone)]
pub struct RandomKnownAdversary {
    m: usize,
    n: usize,
    pairs: Vec<PairState>,
}

pub fn adv_random_known(m: usize, n: usize) -> RandomKnownAdversary {
    RandomKnownAdversary {
        m,
        n,
        pairs: vec![
            PairState {
                theta: 0,
                beta: n.saturating_sub(1),
            };
            m / 2
        ],
    }
}

impl RandomKnownAdversary {
    pub fn pair_states(&self) -> &[PairState] {
        &self.pairs
    }

    /// Profile where intra pair `k` flips at voter `crossing[k]`.
    fn completion(&self, crossing: &[usize]) -> Profile {
        let prefs = (0..self.n)
            .map(|v| reference_with_swaps(self.m, |k| v >= crossing[k]))
            .collect();
        Profile::new(self.m, prefs).expect("well formed")
    }
}

impl AnswerSource for RandomKnownAdversary {
    fn num_candidates(&self) -> usize {
        self.m
    }

    fn num_voters(&self) -> usize {
        self.n
    }

    fn answer(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> bool {
        let pair = CandidatePair::new(x, y).expect("distinct candidates");
        let Some(k) = intra_pair_index(pair) else {
            return x < y;
        };
        let l = voter.0;
        let state = &mut self.pairs[k];
        let first_on_top = l.abs_diff(state.theta) <= l.abs_diff(state.beta);
        if first_on_top {
            state.theta = state.theta.max(l);
        } else {
            state.beta = state.beta.min(l);
        }
        first_on_top == (x == pair.low())
    }
}

impl Adversary for RandomKnownAdversary {
    fn scenario(&self) -> Scenario {
        Scenario::random(Knowledge::KnownOrder(VoterOrdering::identity(self.n)))
    }

    fn witnesses(&self, output: &Profile) -> Vec<Witness> {
        let order = VoterOrdering::identity(self.n);
        let default: Vec<usize> = self.pairs.iter().map(|s| s.theta + 1).collect();
        let mut out = Vec::new();
        for (k, s) in self.pairs.iter().enumerate() {
            if s.beta < s.theta + 2 {
                continue;
            }
            let kappa = VoterId(s.theta + 1);
            let pair = intra_pair(k);
            let guessed_first = output.voter(kappa).prefers(pair.low(), pair.high());
            let mut crossing = default.clone();
            crossing[k] = if guessed_first { s.theta + 1 } else { s.beta };
            out.push(Witness {
                profile: self.completion(&crossing),
                order: order.clone(),
                target: Some((kappa, pair)),
            });
        }
        out.push(Witness {
            profile: self.completion(&default),
            order,
            target: None,
        });
        out
    }
}

/// Sequential access in the identity order, which is single crossing.
/// Answers follow the reference order until a voter is released without
/// one of its intra pairs compared; later voters see that pair swapped.
#[derive(Debug, Clone)]
pub struct SequentialScAdversary {
    m: usize,
    n: usize,
    asked: Vec<Vec<bool>>,
    skipped: Option<(VoterId, usize)>,
}

pub fn adv_sequential_sc(m: usize, n: usize) -> SequentialScAdversary {
    SequentialScAdversary {
        m,
        n,
        asked: vec![vec![false; m / 2]; n],
        skipped: None,
    }
}

impl SequentialScAdversary {
    /// The first released voter that skipped an intra pair, and the pair.
    pub fn skipped(&self) -> Option<(VoterId, CandidatePair)> {
        self.skipped.map(|(v, k)| (v, intra_pair(k)))
    }

    fn first_gap(&self) -> Option<(VoterId, usize)> {
        self.skipped.or_else(|| {
            (0..self.n).find_map(|v| {
                self.asked[v]
                    .iter()
                    .position(|asked| !asked)
                    .map(|k| (VoterId(v), k))
            })
        })
    }
}

impl AnswerSource for SequentialScAdversary {
    fn num_candidates(&self) -> usize {
        self.m
    }

    fn num_voters(&self) -> usize {
        self.n
    }

    fn answer(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> bool {
        let pair = CandidatePair::new(x, y).expect("distinct candidates");
        let k = intra_pair_index(pair);
        if let Some(k) = k {
            self.asked[voter.0][k] = true;
        }
        let flipped = matches!(
            (self.skipped, k),
            (Some((kappa, sk)), Some(k)) if voter > kappa && sk == k
        );
        (x < y) != flipped
    }

    fn on_release(&mut self, voter: VoterId) {
        if self.skipped.is_none() {
            if let Some(k) = self.asked[voter.0].iter().position(|asked| !asked) {
                self.skipped = Some((voter, k));
            }
        }
    }
}

impl Adversary for SequentialScAdversary {
    fn scenario(&self) -> Scenario {
        let id = VoterOrdering::identity(self.n);
        Scenario::sequential(id.clone(), Knowledge::KnownOrder(id))
    }

    fn witnesses(&self, output: &Profile) -> Vec<Witness> {
        let order = VoterOrdering::identity(self.n);
        let build = |kappa: VoterId, k: usize, at_kappa_swapped: bool| {
            let prefs = (0..self.n)
                .map(|v| {
                    let swapped = v > kappa.0 || (v == kappa.0 && at_kappa_swapped);
                    reference_with_swaps(self.m, |j| j == k && swapped)
                })
                .collect();
            Profile::new(self.m, prefs).expect("well formed")
        };
        let mut out = Vec::new();
        if let Some((kappa, k)) = self.first_gap() {
            let pair = intra_pair(k);
            let guessed_first = output.voter(kappa).prefers(pair.low(), pair.high());
            out.push(Witness {
                profile: build(kappa, k, guessed_first),
                order: order.clone(),
                target: Some((kappa, pair)),
            });
            out.push(Witness {
                profile: build(kappa, k, false),
                order: order.clone(),
                target: None,
            });
        }
        let plain = (0..self.n).map(|_| Preference::identity(self.m)).collect();
        out.push(Witness {
            profile: Profile::new(self.m, plain).expect("well formed"),
            order,
            target: None,
        });
        out
    }
}

/// Random access with no order knowledge. Every answer follows the
/// reference order; any voter whose intra pair was never compared can be
/// moved to the end of a single-crossing order with that pair swapped.
#[derive(Debug, Clone)]
pub struct RandomUnknownAdversary {
    m: usize,
    n: usize,
    asked: Vec<Vec<bool>>,
}

pub fn adv_random_unknown(m: usize, n: usize) -> RandomUnknownAdversary {
    RandomUnknownAdversary {
        m,
        n,
        asked: vec![vec![false; m / 2]; n],
    }
}

impl AnswerSource for RandomUnknownAdversary {
    fn num_candidates(&self) -> usize {
        self.m
    }

    fn num_voters(&self) -> usize {
        self.n
    }

    fn answer(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> bool {
        if let Some(k) = intra_pair_index(CandidatePair::new(x, y).expect("distinct candidates")) {
            self.asked[voter.0][k] = true;
        }
        x < y
    }
}

impl Adversary for RandomUnknownAdversary {
    fn scenario(&self) -> Scenario {
        Scenario::random(Knowledge::UnknownOrder)
    }

    fn witnesses(&self, output: &Profile) -> Vec<Witness> {
        let mut out = Vec::new();
        let gap = (0..self.n).find_map(|v| {
            self.asked[v]
                .iter()
                .position(|asked| !asked)
                .map(|k| (VoterId(v), k))
        });
        if let Some((kappa, k)) = gap {
            let pair = intra_pair(k);
            let swap = output.voter(kappa).prefers(pair.low(), pair.high());
            let prefs = (0..self.n)
                .map(|v| reference_with_swaps(self.m, |j| j == k && v == kappa.0 && swap))
                .collect();
            let mut order: Vec<usize> = (0..self.n).filter(|&v| v != kappa.0).collect();
            order.push(kappa.0);
            out.push(Witness {
                profile: Profile::new(self.m, prefs).expect("well formed"),
                order: VoterOrdering::from_indices(&order).expect("permutation"),
                target: Some((kappa, pair)),
            });
        }
        let plain = (0..self.n).map(|_| Preference::identity(self.m)).collect();
        out.push(Witness {
            profile: Profile::new(self.m, plain).expect("well formed"),
            order: VoterOrdering::identity(self.n),
            target: None,
        });
        out
    }
}

/// A deliberately faulty strategy for exercising the adversaries. One
/// seeded victim voter gets no queries at all and is assigned a copy of
/// the previously elicited vote (the identity order if it comes first).
/// Everyone else is elicited honestly: a merge sort for the first voter,
/// insertion against the previous vote afterwards.
pub fn cheat_copy_previous<O: Oracle + ?Sized>(o: &mut O, seed: u64) -> Result<ElicitResult> {
    let n = o.num_voters();
    let m = o.num_candidates();
    let victim = ChaCha8Rng::seed_from_u64(seed).gen_range(0..n.max(1));
    let mut prefs: Vec<Option<Preference>> = vec![None; n];
    let mut previous: Option<Preference> = None;
    let mut current = elicit::first_voter(o);
    let mut visited = 0;
    while let Some(v) = current {
        let pref = if visited == victim {
            previous.clone().unwrap_or_else(|| Preference::identity(m))
        } else {
            match &previous {
                None => elicit::sort_elicit(o, v)?,
                Some(reference) => elicit::insertion_elicit(o, reference, v)?,
            }
        };
        prefs[v.0] = Some(pref.clone());
        previous = Some(pref);
        visited += 1;
        current = elicit::next_voter(o, v)?;
    }
    ElicitResult::collect(o, prefs, None, 0)
}

/// Strategies that can be played against an adversary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Victim {
    KnownRandom,
    SequentialSc,
    Unknown,
    /// [`cheat_copy_previous`] with the given seed.
    Cheat(u64),
}

/// Outcome of one game between an adversary and a strategy.
#[derive(Debug, Clone)]
pub struct Game {
    pub verdict: AdversaryVerdict,
    pub ledger: QueryLedger,
    pub output: Profile,
}

impl Game {
    pub fn intra_queries(&self) -> usize {
        intra_pair_queries(&self.ledger)
    }
}

/// Runs `victim` against `adversary` in the adversary's own scenario and
/// judges the output.
pub fn play<A: Adversary>(adversary: A, victim: Victim) -> Result<Game> {
    let scenario = adversary.scenario();
    let n = adversary.num_voters();
    let mut s = OracleSession::new(adversary, scenario)?;
    let result = match victim {
        Victim::KnownRandom => elicit::elicit_known_random(&mut s, &VoterOrdering::identity(n))?,
        Victim::SequentialSc => elicit::elicit_sequential_sc(&mut s)?,
        Victim::Unknown => elicit::elicit_unknown(&mut s)?,
        Victim::Cheat(seed) => cheat_copy_previous(&mut s, seed)?,
    };
    let (adversary, ledger) = s.into_parts();
    Ok(Game {
        verdict: verdict(&adversary, &ledger, &result.profile),
        ledger,
        output: result.profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elicit::{elicit_known_random, elicit_sequential_sc, elicit_unknown};

    fn session<A: Adversary>(adv: A) -> OracleSession<A> {
        let scenario = adv.scenario();
        OracleSession::new(adv, scenario).unwrap()
    }

    #[test]
    fn random_known_cross_pairs_follow_reference() {
        let mut s = session(adv_random_known(6, 16));
        for v in 0..16 {
            assert!(s.query(VoterId(v), CandidateId(0), CandidateId(2)).unwrap());
            assert!(!s.query(VoterId(v), CandidateId(5), CandidateId(1)).unwrap());
            // c1 and c2 sit in different pairs.
            assert!(s.query(VoterId(v), CandidateId(1), CandidateId(2)).unwrap());
        }
    }

    #[test]
    fn random_known_boundary_voters() {
        let mut s = session(adv_random_known(4, 8));
        assert!(s.query(VoterId(0), CandidateId(0), CandidateId(1)).unwrap());
        assert!(!s.query(VoterId(7), CandidateId(2), CandidateId(3)).unwrap());
    }

    #[test]
    fn random_known_gap_halves_at_most() {
        // Simulated halving: each query on a pair shrinks beta - theta by at
        // most a factor of two, so fewer than log2(n) - 2 queries leave a gap.
        for n in [8usize, 16, 32, 64, 100] {
            let mut s = session(adv_random_known(2, n));
            let budget = (n as f64).log2() as usize - 2;
            for _ in 0..budget.saturating_sub(1) {
                let st = s.source().pair_states()[0];
                let mid = (st.theta + st.beta) / 2;
                let gap = st.beta - st.theta;
                s.query(VoterId(mid), CandidateId(0), CandidateId(1)).unwrap();
                let after = s.source().pair_states()[0];
                assert!(2 * (after.beta - after.theta) >= gap);
            }
            let st = s.source().pair_states()[0];
            assert!(st.beta - st.theta >= 2, "n = {n}, state {st:?}");
        }
    }

    #[test]
    fn known_random_is_certified() {
        for m in [4, 5, 6] {
            for n in [1, 2, 8, 13, 32] {
                let mut s = session(adv_random_known(m, n));
                let r = elicit_known_random(&mut s, &VoterOrdering::identity(n)).unwrap();
                let (adv, ledger) = s.into_parts();
                assert!(verdict(&adv, &ledger, &r.profile).is_certified(), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn under_queried_pair_is_refuted() {
        let n = 16;
        let mut s = session(adv_random_known(2, n));
        s.query(VoterId(0), CandidateId(0), CandidateId(1)).unwrap();
        s.query(VoterId(8), CandidateId(0), CandidateId(1)).unwrap();
        // Guess: every voter below 8 keeps c0 on top, the rest flip.
        let prefs = (0..n)
            .map(|v| if v < 8 { Preference::identity(2) } else { Preference::identity(2).reversed() })
            .collect();
        let guess = Profile::new(2, prefs).unwrap();
        let (adv, ledger) = s.into_parts();
        match verdict(&adv, &ledger, &guess) {
            AdversaryVerdict::Refuted(r) => {
                assert!(is_single_crossing(&r.witness, &r.order));
                assert!(replays(&r.witness, &ledger));
                assert_ne!(r.witness.voter(r.voter), guess.voter(r.voter));
            }
            v => panic!("expected refutation, got {v:?}"),
        }
    }

    #[test]
    fn sequential_sc_full_coverage_certified() {
        let (m, n) = (6, 12);
        let mut s = session(adv_sequential_sc(m, n));
        let r = elicit_sequential_sc(&mut s).unwrap();
        let (adv, ledger) = s.into_parts();
        assert!(adv.skipped().is_none());
        assert!(verdict(&adv, &ledger, &r.profile).is_certified());
        assert!(ledger.count() >= m * n / 2);
    }

    #[test]
    fn sequential_sc_skip_at_voter_three() {
        let (m, n) = (4, 6);
        let mut s = session(adv_sequential_sc(m, n));
        let mut prefs = Vec::new();
        for v in 0..n {
            let p = if v == 3 {
                // Ask only the cross pairs and {c2, c3}.
                s.query(VoterId(v), CandidateId(1), CandidateId(2)).unwrap();
                s.query(VoterId(v), CandidateId(2), CandidateId(3)).unwrap();
                Preference::identity(m)
            } else {
                elicit::sort_elicit(&mut s, VoterId(v)).unwrap()
            };
            prefs.push(p);
            s.release().unwrap();
        }
        let output = Profile::new(m, prefs).unwrap();
        let (adv, ledger) = s.into_parts();
        let pair01 = CandidatePair::new(CandidateId(0), CandidateId(1)).unwrap();
        assert_eq!(adv.skipped(), Some((VoterId(3), pair01)));
        match verdict(&adv, &ledger, &output) {
            AdversaryVerdict::Refuted(r) => {
                assert_eq!((r.voter, r.pair), (VoterId(3), pair01));
                assert!(is_single_crossing(&r.witness, &r.order));
                assert!(replays(&r.witness, &ledger));
            }
            v => panic!("expected refutation, got {v:?}"),
        }
    }

    #[test]
    fn sequential_sc_single_voter_skip() {
        let mut s = session(adv_sequential_sc(2, 1));
        s.release().unwrap();
        let (adv, ledger) = s.into_parts();
        for guess in [Preference::identity(2), Preference::identity(2).reversed()] {
            let output = Profile::new(2, vec![guess]).unwrap();
            assert!(!verdict(&adv, &ledger, &output).is_certified());
        }
    }

    #[test]
    fn random_unknown_full_coverage_certified() {
        let (m, n) = (6, 10);
        let mut s = session(adv_random_unknown(m, n));
        let r = elicit_unknown(&mut s).unwrap();
        let (adv, ledger) = s.into_parts();
        assert!(verdict(&adv, &ledger, &r.profile).is_certified());
        assert!(ledger.count() >= m * n / 2);
    }

    #[test]
    fn random_unknown_two_candidates_every_voter_asked() {
        let n = 5;
        for skip in 0..n {
            let mut s = session(adv_random_unknown(2, n));
            for v in (0..n).filter(|&v| v != skip) {
                s.query(VoterId(v), CandidateId(0), CandidateId(1)).unwrap();
            }
            let output = Profile::new(2, vec![Preference::identity(2); n]).unwrap();
            let (adv, ledger) = s.into_parts();
            match verdict(&adv, &ledger, &output) {
                AdversaryVerdict::Refuted(r) => assert_eq!(r.voter, VoterId(skip)),
                v => panic!("expected refutation, got {v:?}"),
            }
        }
    }

    #[test]
    fn cheater_is_refuted() {
        for seed in 0..30 {
            let mut s = session(adv_sequential_sc(6, 9));
            let r = cheat_copy_previous(&mut s, seed).unwrap();
            let (adv, ledger) = s.into_parts();
            assert!(!verdict(&adv, &ledger, &r.profile).is_certified(), "seed {seed}");

            let mut s = session(adv_random_unknown(6, 9));
            let r = cheat_copy_previous(&mut s, seed).unwrap();
            let (adv, ledger) = s.into_parts();
            assert!(!verdict(&adv, &ledger, &r.profile).is_certified(), "seed {seed}");
        }
    }

    #[test]
    fn odd_m_leaves_last_candidate_unpaired() {
        let mut s = session(adv_random_known(5, 8));
        assert_eq!(s.source().pair_states().len(), 2);
        assert!(s.query(VoterId(7), CandidateId(3), CandidateId(4)).unwrap());
    }
}
