//! Elicitation procedures for single-crossing profiles.
//!
//! All of them consume only the [`Oracle`] interface and return the full
//! profile together with the ledger count and, for the insertion-based
//! procedures, a per-call good/bad split.

pub mod bounds;
mod width;

use std::collections::BTreeMap;

pub use width::{elicit_width, CandidateView};

use crate::domain::{
    AccessMode, CandidateId, CandidatePair, Preference, Profile, VoterId, VoterOrdering,
};
use crate::error::{Error, Result};
use crate::oracle::{classify_query, Oracle, QueryClass};
use crate::verify::find_splitting_pair;

/// Queries between good and bad pairs of candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostSplit {
    pub good: usize,
    pub bad: usize,
}

/// One insertion-sort elicitation of `voter` against a reference vote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionTrace {
    pub voter: VoterId,
    /// The already-elicited voter whose vote served as reference.
    pub reference_voter: Option<VoterId>,
    pub good: usize,
    pub bad: usize,
    /// Newly compared pairs that the reference and the result order
    /// differently.
    pub bad_pairs: Vec<CandidatePair>,
}

#[derive(Debug, Clone)]
pub struct ElicitResult {
    pub profile: Profile,
    /// Distinct comparisons in the ledger.
    pub queries: usize,
    /// Distinct comparisons per voter, indexed by voter id.
    pub per_voter: Vec<usize>,
    pub good_bad: Option<CostSplit>,
    pub insertions: Vec<InsertionTrace>,
    /// Number of full merge-sort elicitations performed.
    pub full_sorts: usize,
}

impl ElicitResult {
    pub(crate) fn collect<O: Oracle + ?Sized>(
        o: &O,
        prefs: Vec<Option<Preference>>,
        insertions: Option<Vec<InsertionTrace>>,
        full_sorts: usize,
    ) -> Result<Self> {
        let m = o.num_candidates();
        let prefs = prefs
            .into_iter()
            .enumerate()
            .map(|(v, p)| p.ok_or(Error::VoterNotAvailable(v)))
            .collect::<Result<Vec<_>>>()?;
        let good_bad = insertions.as_ref().map(|ts| CostSplit {
            good: ts.iter().map(|t| t.good).sum(),
            bad: ts.iter().map(|t| t.bad).sum(),
        });
        Ok(Self {
            profile: Profile::new(m, prefs)?,
            queries: o.ledger().count(),
            per_voter: o.ledger().per_voter(o.num_voters()),
            good_bad,
            insertions: insertions.unwrap_or_default(),
            full_sorts,
        })
    }
}

/// Sorts `items` by `voter`'s preference with a top-down merge sort.
pub(crate) fn sort_candidates<O: Oracle + ?Sized>(
    o: &mut O,
    voter: VoterId,
    items: &[CandidateId],
) -> Result<Vec<CandidateId>> {
    if items.len() <= 1 {
        return Ok(items.to_vec());
    }
    let (left, right) = items.split_at(items.len() / 2);
    let left = sort_candidates(o, voter, left)?;
    let right = sort_candidates(o, voter, right)?;
    let mut merged = Vec::with_capacity(items.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if o.query(voter, left[i], right[j])? {
            merged.push(left[i]);
            i += 1;
        } else {
            merged.push(right[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    Ok(merged)
}

/// Elicits one vote from scratch with at most `m⌈log₂ m⌉` comparisons.
pub fn sort_elicit<O: Oracle + ?Sized>(o: &mut O, voter: VoterId) -> Result<Preference> {
    let all: Vec<CandidateId> = (0..o.num_candidates()).map(CandidateId).collect();
    Preference::new(sort_candidates(o, voter, &all)?)
}

/// Insertion sort of `voter`'s vote, inserting candidates in `reference`
/// order and scanning the partial result from its end.
pub fn insertion_elicit<O: Oracle + ?Sized>(
    o: &mut O,
    reference: &Preference,
    voter: VoterId,
) -> Result<Preference> {
    insertion_elicit_traced(o, reference, voter).map(|(p, _)| p)
}

/// [`insertion_elicit`] plus the good/bad classification of every new
/// comparison it made.
pub fn insertion_elicit_traced<O: Oracle + ?Sized>(
    o: &mut O,
    reference: &Preference,
    voter: VoterId,
) -> Result<(Preference, InsertionTrace)> {
    let m = reference.num_candidates();
    let mut compared = Vec::new();
    let mut partial: Vec<CandidateId> = Vec::with_capacity(m);
    partial.push(reference.at(0));
    for i in 1..m {
        let c = reference.at(i);
        let mut pos = partial.len();
        while pos > 0 {
            let before = o.ledger().count();
            let above = o.query(voter, c, partial[pos - 1])?;
            if o.ledger().count() > before {
                compared.push(CandidatePair::new(c, partial[pos - 1])?);
            }
            if !above {
                break;
            }
            pos -= 1;
        }
        partial.insert(pos, c);
    }
    let result = Preference::new(partial)?;
    let mut trace = InsertionTrace {
        voter,
        reference_voter: None,
        good: 0,
        bad: 0,
        bad_pairs: Vec::new(),
    };
    for pair in compared {
        match classify_query(reference, &result, pair.low(), pair.high()) {
            QueryClass::Good => trace.good += 1,
            QueryClass::Bad => {
                trace.bad += 1;
                trace.bad_pairs.push(pair);
            }
        }
    }
    Ok((result, trace))
}

/// Whether `voter`'s vote is exactly `w`, checking the `m − 1` adjacent
/// pairs of `w` and stopping at the first mismatch.
pub fn same_check<O: Oracle + ?Sized>(o: &mut O, w: &Preference, voter: VoterId) -> Result<bool> {
    for pair in w.order().windows(2) {
        if !o.query(voter, pair[0], pair[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn first_voter<O: Oracle + ?Sized>(o: &O) -> Option<VoterId> {
    match o.access_mode() {
        AccessMode::Random => (o.num_voters() > 0).then_some(VoterId(0)),
        AccessMode::Sequential => o.current_voter(),
    }
}

pub(crate) fn next_voter<O: Oracle + ?Sized>(o: &mut O, current: VoterId) -> Result<Option<VoterId>> {
    match o.access_mode() {
        AccessMode::Random => Ok((current.0 + 1 < o.num_voters()).then_some(VoterId(current.0 + 1))),
        AccessMode::Sequential => o.release(),
    }
}

fn require_known_order<O: Oracle + ?Sized>(o: &O, sc_order: &VoterOrdering) -> Result<()> {
    if sc_order.len() != o.num_voters() {
        return Err(Error::ProfileMismatch(format!(
            "order covers {} voters, oracle has {}",
            sc_order.len(),
            o.num_voters()
        )));
    }
    Ok(())
}

/// Random access with a known single-crossing order: for every pair, one
/// orientation probe at the first voter of `sc_order` and a binary search
/// for the first position where the orientation differs.
pub fn elicit_known_random<O: Oracle + ?Sized>(
    o: &mut O,
    sc_order: &VoterOrdering,
) -> Result<ElicitResult> {
    if o.access_mode() != AccessMode::Random {
        return Err(Error::RequiresRandomAccess);
    }
    require_known_order(o, sc_order)?;
    let m = o.num_candidates();
    let n = o.num_voters();
    // (orientation at the first voter, crossing position; n if none)
    let mut crossings = Vec::with_capacity(crate::domain::pair_count(m));
    for pair in CandidatePair::all(m) {
        let first = o.query(sc_order.at(0), pair.low(), pair.high())?;
        let (mut lo, mut hi) = (1, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if o.query(sc_order.at(mid), pair.low(), pair.high())? != first {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        crossings.push((pair, first, lo));
    }

    let mut prefs = vec![None; n];
    for (position, &v) in sc_order.voters().iter().enumerate() {
        let mut wins = vec![0usize; m];
        for &(pair, first, crossing) in &crossings {
            let low_above = first != (position >= crossing);
            let winner = if low_above { pair.low() } else { pair.high() };
            wins[winner.0] += 1;
        }
        let mut order = vec![None; m];
        for (c, w) in wins.iter().enumerate() {
            let slot = &mut order[m - 1 - w];
            if slot.replace(CandidateId(c)).is_some() {
                return Err(Error::InconsistentAnswers);
            }
        }
        let order = order
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::InconsistentAnswers)?;
        prefs[v.0] = Some(Preference::new(order)?);
    }
    ElicitResult::collect(o, prefs, None, 0)
}

/// Sequential access in a single-crossing order: the first voter is
/// sorted, every later voter is insertion-sorted against the previous one.
pub fn elicit_sequential_sc<O: Oracle + ?Sized>(o: &mut O) -> Result<ElicitResult> {
    if o.access_mode() != AccessMode::Sequential {
        return Err(Error::RequiresSequentialAccess);
    }
    let n = o.num_voters();
    let mut prefs: Vec<Option<Preference>> = vec![None; n];
    let mut traces = Vec::new();
    let mut previous: Option<(VoterId, Preference)> = None;
    let mut full_sorts = 0;
    let mut current = o.current_voter();
    while let Some(v) = current {
        let pref = match &previous {
            None => {
                full_sorts += 1;
                sort_elicit(o, v)?
            }
            Some((u, reference)) => {
                let (pref, mut trace) = insertion_elicit_traced(o, reference, v)?;
                trace.reference_voter = Some(*u);
                traces.push(trace);
                pref
            }
        };
        prefs[v.0] = Some(pref.clone());
        previous = Some((v, pref));
        current = o.release()?;
    }
    ElicitResult::collect(o, prefs, Some(traces), full_sorts)
}

/// Sequential access in any order with a known single-crossing order: each
/// voter is insertion-sorted against the already-elicited voter nearest to
/// it in `sc_order`, ties going to the smaller position.
pub fn elicit_sequential_known_any<O: Oracle + ?Sized>(
    o: &mut O,
    sc_order: &VoterOrdering,
) -> Result<ElicitResult> {
    if o.access_mode() != AccessMode::Sequential {
        return Err(Error::RequiresSequentialAccess);
    }
    require_known_order(o, sc_order)?;
    let n = o.num_voters();
    let mut prefs: Vec<Option<Preference>> = vec![None; n];
    let mut traces = Vec::new();
    // sc position -> voter
    let mut elicited: BTreeMap<usize, VoterId> = BTreeMap::new();
    let mut full_sorts = 0;
    let mut current = o.current_voter();
    while let Some(v) = current {
        let p = sc_order.position(v);
        let before = elicited.range(..p).next_back().map(|(&q, &u)| (p - q, u));
        let after = elicited.range(p + 1..).next().map(|(&q, &u)| (q - p, u));
        let nearest = match (before, after) {
            (Some((db, ub)), Some((da, ua))) => Some(if db <= da { ub } else { ua }),
            (Some((_, u)), None) | (None, Some((_, u))) => Some(u),
            (None, None) => None,
        };
        let pref = match nearest {
            None => {
                full_sorts += 1;
                sort_elicit(o, v)?
            }
            Some(u) => {
                let reference = prefs[u.0].clone().expect("elicited voter");
                let (pref, mut trace) = insertion_elicit_traced(o, &reference, v)?;
                trace.reference_voter = Some(u);
                traces.push(trace);
                pref
            }
        };
        prefs[v.0] = Some(pref);
        elicited.insert(p, v);
        current = o.release()?;
    }
    ElicitResult::collect(o, prefs, Some(traces), full_sorts)
}

/// No order knowledge: keep a dictionary of the distinct votes seen so
/// far, narrow it to one candidate match by querying splitting pairs,
/// confirm with [`same_check`], and fall back to sorting on a mismatch.
///
/// Works in both access modes; in random access voters are visited by id.
pub fn elicit_unknown<O: Oracle + ?Sized>(o: &mut O) -> Result<ElicitResult> {
    let n = o.num_voters();
    let mut prefs: Vec<Option<Preference>> = vec![None; n];
    let mut dictionary: Vec<Preference> = Vec::new();
    let mut current = first_voter(o);
    while let Some(v) = current {
        let matched = if dictionary.is_empty() {
            None
        } else {
            let mut survivors: Vec<usize> = (0..dictionary.len()).collect();
            while survivors.len() > 1 {
                let votes: Vec<&Preference> = survivors.iter().map(|&i| &dictionary[i]).collect();
                let pair = find_splitting_pair(&votes)?;
                let low_above = o.query(v, pair.low(), pair.high())?;
                survivors.retain(|&i| dictionary[i].prefers(pair.low(), pair.high()) == low_above);
            }
            let w = &dictionary[survivors[0]];
            same_check(o, w, v)?.then(|| w.clone())
        };
        let pref = match matched {
            Some(w) => w,
            None => {
                let pref = sort_elicit(o, v)?;
                dictionary.push(pref.clone());
                pref
            }
        };
        prefs[v.0] = Some(pref);
        current = next_voter(o, v)?;
    }
    let full_sorts = dictionary.len();
    ElicitResult::collect(o, prefs, None, full_sorts)
}

/// A non-width elicitation procedure, selectable at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    KnownRandom(VoterOrdering),
    SequentialSc,
    SequentialKnownAny(VoterOrdering),
    Unknown,
}

impl Strategy {
    pub fn run<O: Oracle + ?Sized>(&self, o: &mut O) -> Result<ElicitResult> {
        match self {
            Strategy::KnownRandom(order) => elicit_known_random(o, order),
            Strategy::SequentialSc => elicit_sequential_sc(o),
            Strategy::SequentialKnownAny(order) => elicit_sequential_known_any(o, order),
            Strategy::Unknown => elicit_unknown(o),
        }
    }

    /// The explicit query bound for `m` candidates, `n` voters and
    /// `distinct` distinct votes in the truth.
    pub fn bound(&self, m: usize, n: usize, distinct: usize) -> usize {
        match self {
            Strategy::KnownRandom(_) => bounds::known_random_bound(m, n),
            Strategy::SequentialSc => bounds::sequential_sc_bound(m, n),
            Strategy::SequentialKnownAny(_) => bounds::sequential_known_any_bound(m, n),
            Strategy::Unknown => bounds::unknown_bound(m, n, distinct),
        }
    }

    pub fn access_mode(&self) -> Option<AccessMode> {
        match self {
            Strategy::KnownRandom(_) => Some(AccessMode::Random),
            Strategy::SequentialSc | Strategy::SequentialKnownAny(_) => {
                Some(AccessMode::Sequential)
            }
            Strategy::Unknown => None,
        }
    }
}
