//! Comparison oracles, access-model enforcement and query accounting.
//!
//! Query complexity is the number of distinct `(voter, {x, y})` tuples an
//! algorithm compares. [`OracleSession`] memoizes every answer, so asking
//! the same comparison again (in either argument order) is free.

use std::collections::HashMap;

use crate::domain::{
    Access, AccessMode, CandidateId, CandidatePair, Preference, Profile, Scenario, VoterId,
};
use crate::error::{Error, Result};

/// Something that can answer "does `voter` prefer `x` to `y`?".
///
/// Ground-truth profiles and the adversaries both implement this, so an
/// algorithm running against an [`OracleSession`] cannot tell them apart.
pub trait AnswerSource {
    fn num_candidates(&self) -> usize;
    fn num_voters(&self) -> usize;
    fn answer(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> bool;
    /// Called when a sequential session releases `voter`.
    fn on_release(&mut self, _voter: VoterId) {}
}

impl AnswerSource for Profile {
    fn num_candidates(&self) -> usize {
        Profile::num_candidates(self)
    }

    fn num_voters(&self) -> usize {
        Profile::num_voters(self)
    }

    fn answer(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> bool {
        self.voter(voter).prefers(x, y)
    }
}

impl AnswerSource for &Profile {
    fn num_candidates(&self) -> usize {
        Profile::num_candidates(self)
    }

    fn num_voters(&self) -> usize {
        Profile::num_voters(self)
    }

    fn answer(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> bool {
        self.voter(voter).prefers(x, y)
    }
}

/// One recorded comparison. `low_preferred` is whether `pair.low()` was
/// reported above `pair.high()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoggedQuery {
    pub voter: VoterId,
    pub pair: CandidatePair,
    pub low_preferred: bool,
}

impl LoggedQuery {
    /// Whether `voter` was reported to prefer `x` over the other member.
    pub fn prefers(&self, x: CandidateId) -> bool {
        (x == self.pair.low()) == self.low_preferred
    }
}

/// The set of distinct `(voter, {x, y})` comparisons, in first-asked order.
#[derive(Debug, Clone, Default)]
pub struct QueryLedger {
    log: Vec<LoggedQuery>,
    index: HashMap<(VoterId, CandidatePair), usize>,
    raw_calls: usize,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Query complexity so far.
    pub fn count(&self) -> usize {
        self.log.len()
    }

    /// Calls received including memo hits. Diagnostic only.
    pub fn raw_calls(&self) -> usize {
        self.raw_calls
    }

    pub fn entries(&self) -> &[LoggedQuery] {
        &self.log
    }

    pub fn lookup(&self, voter: VoterId, pair: CandidatePair) -> Option<&LoggedQuery> {
        self.index.get(&(voter, pair)).map(|&i| &self.log[i])
    }

    pub fn contains(&self, voter: VoterId, pair: CandidatePair) -> bool {
        self.index.contains_key(&(voter, pair))
    }

    /// Distinct comparisons per voter, indexed by voter id.
    pub fn per_voter(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; n];
        for q in &self.log {
            counts[q.voter.0] += 1;
        }
        counts
    }

    fn record(&mut self, q: LoggedQuery) {
        self.index.insert((q.voter, q.pair), self.log.len());
        self.log.push(q);
    }
}

/// The algorithm-facing query interface.
pub trait Oracle {
    fn num_candidates(&self) -> usize;
    fn num_voters(&self) -> usize;
    fn access_mode(&self) -> AccessMode;
    /// The voter currently available in sequential mode; `None` in random
    /// access mode or after the stream ends.
    fn current_voter(&self) -> Option<VoterId>;
    /// Whether `voter` prefers `x` over `y`.
    fn query(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> Result<bool>;
    /// Releases the current voter and returns the next one.
    fn release(&mut self) -> Result<Option<VoterId>>;
    /// The underlying ledger. Candidate ids are those of the root session.
    fn ledger(&self) -> &QueryLedger;
}

/// An answer source plus access model plus ledger.
#[derive(Debug)]
pub struct OracleSession<S> {
    source: S,
    scenario: Scenario,
    ledger: QueryLedger,
    cursor: usize,
}

impl<S: AnswerSource> OracleSession<S> {
    pub fn new(source: S, scenario: Scenario) -> Result<Self> {
        if let Access::Sequential(arrival) = &scenario.access {
            if arrival.len() != source.num_voters() {
                return Err(Error::ProfileMismatch(format!(
                    "arrival order covers {} voters, source has {}",
                    arrival.len(),
                    source.num_voters()
                )));
            }
        }
        if let Some(o) = scenario.known_order() {
            if o.len() != source.num_voters() {
                return Err(Error::ProfileMismatch(format!(
                    "known order covers {} voters, source has {}",
                    o.len(),
                    source.num_voters()
                )));
            }
        }
        Ok(Self {
            source,
            scenario,
            ledger: QueryLedger::new(),
            cursor: 0,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn into_parts(self) -> (S, QueryLedger) {
        (self.source, self.ledger)
    }

    /// Whether `voter` has been released (sequential mode only).
    pub fn is_released(&self, voter: VoterId) -> bool {
        match &self.scenario.access {
            Access::Random => false,
            Access::Sequential(arrival) => arrival.position(voter) < self.cursor,
        }
    }
}

impl<S: AnswerSource> Oracle for OracleSession<S> {
    fn num_candidates(&self) -> usize {
        self.source.num_candidates()
    }

    fn num_voters(&self) -> usize {
        self.source.num_voters()
    }

    fn access_mode(&self) -> AccessMode {
        self.scenario.access.mode()
    }

    fn current_voter(&self) -> Option<VoterId> {
        match &self.scenario.access {
            Access::Random => None,
            Access::Sequential(arrival) => {
                (self.cursor < arrival.len()).then(|| arrival.at(self.cursor))
            }
        }
    }

    fn query(&mut self, voter: VoterId, x: CandidateId, y: CandidateId) -> Result<bool> {
        let m = self.num_candidates();
        for c in [x, y] {
            if c.0 >= m {
                return Err(Error::UnknownCandidate(c.0));
            }
        }
        if voter.0 >= self.num_voters() {
            return Err(Error::UnknownVoter(voter.0));
        }
        let pair = CandidatePair::new(x, y)?;
        if self.scenario.access.mode() == AccessMode::Sequential
            && self.current_voter() != Some(voter)
        {
            return Err(Error::VoterNotAvailable(voter.0));
        }
        self.ledger.raw_calls += 1;
        if let Some(q) = self.ledger.lookup(voter, pair) {
            return Ok(q.prefers(x));
        }
        let low_preferred = self.source.answer(voter, pair.low(), pair.high());
        let q = LoggedQuery {
            voter,
            pair,
            low_preferred,
        };
        self.ledger.record(q);
        Ok(q.prefers(x))
    }

    fn release(&mut self) -> Result<Option<VoterId>> {
        let current = match &self.scenario.access {
            Access::Random => return Err(Error::NoReleaseInRandomAccess),
            Access::Sequential(_) => self.current_voter(),
        };
        if let Some(v) = current {
            self.source.on_release(v);
            self.cursor += 1;
        }
        Ok(self.current_voter())
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryClass {
    Good,
    Bad,
}

/// Good iff `reference` and `truth` order `{x, y}` the same way.
pub fn classify_query(
    reference: &Preference,
    truth: &Preference,
    x: CandidateId,
    y: CandidateId,
) -> QueryClass {
    debug_assert_ne!(x, y);
    if reference.prefers(x, y) == truth.prefers(x, y) {
        QueryClass::Good
    } else {
        QueryClass::Bad
    }
}
