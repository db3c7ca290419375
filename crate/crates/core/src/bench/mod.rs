//! Experiment runner, report rows and the command-line front end.

pub mod cli;
pub mod scp;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{
    same_votes, AccessMode, CandidatePartition, Knowledge, Profile, Scenario, VoterOrdering,
};
use crate::elicit::{bounds, elicit_width, ElicitResult, Strategy};
use crate::error::{Error, Result};
use crate::generate::{gen_single_crossing, gen_width_w};
use crate::oracle::OracleSession;
use crate::verify::distinct_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgoId {
    KnownRandom,
    SequentialSc,
    SequentialKnownAny,
    Unknown,
    Width,
}

impl AlgoId {
    pub const ALL: [AlgoId; 5] = [
        AlgoId::KnownRandom,
        AlgoId::SequentialSc,
        AlgoId::SequentialKnownAny,
        AlgoId::Unknown,
        AlgoId::Width,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgoId::KnownRandom => "known-random",
            AlgoId::SequentialSc => "seq-sc",
            AlgoId::SequentialKnownAny => "seq-known-any",
            AlgoId::Unknown => "unknown",
            AlgoId::Width => "width",
        }
    }

    pub fn needs_known_order(self) -> bool {
        matches!(
            self,
            AlgoId::KnownRandom | AlgoId::SequentialSc | AlgoId::SequentialKnownAny
        )
    }

    /// Access model used when none is given.
    pub fn default_access(self) -> AccessMode {
        match self {
            AlgoId::KnownRandom => AccessMode::Random,
            _ => AccessMode::Sequential,
        }
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgoId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm {s:?}")))
    }
}

/// How sequential voters arrive, relative to the single-crossing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrival {
    /// The single-crossing order itself.
    Sc,
    /// The single-crossing order reversed (also single crossing).
    Reverse,
    /// A seeded random permutation.
    Shuffle,
    /// Bit-reversed positions of the single-crossing order.
    Interleave,
}

impl Arrival {
    pub fn name(self) -> &'static str {
        match self {
            Arrival::Sc => "sc",
            Arrival::Reverse => "reverse",
            Arrival::Shuffle => "shuffle",
            Arrival::Interleave => "interleave",
        }
    }

    pub fn is_single_crossing(self) -> bool {
        matches!(self, Arrival::Sc | Arrival::Reverse)
    }

    pub fn ordering(self, sc: &VoterOrdering, rng: &mut ChaCha8Rng) -> VoterOrdering {
        let mut voters = sc.voters().to_vec();
        match self {
            Arrival::Sc => {}
            Arrival::Reverse => voters.reverse(),
            Arrival::Shuffle => voters.shuffle(rng),
            Arrival::Interleave => {
                let bits = bounds::ceil_log2(voters.len()) as u32;
                let key = |k: usize| {
                    if bits == 0 {
                        0
                    } else {
                        (k as u64).reverse_bits() >> (64 - bits)
                    }
                };
                let mut positions: Vec<usize> = (0..voters.len()).collect();
                positions.sort_by_key(|&k| key(k));
                voters = positions.into_iter().map(|k| sc.at(k)).collect();
            }
        }
        VoterOrdering::new(voters).expect("rearranged permutation")
    }
}

impl FromStr for Arrival {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Arrival::Sc, Arrival::Reverse, Arrival::Shuffle, Arrival::Interleave]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown arrival pattern {s:?}")))
    }
}

/// The arrival order [`run_on_profile`] uses for `seed`.
pub fn arrival_ordering(arrival: Arrival, sc: &VoterOrdering, seed: u64) -> VoterOrdering {
    arrival.ordering(sc, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Algorithm plus access model, validated before any oracle call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub algo: AlgoId,
    /// Inner strategy for [`AlgoId::Width`].
    pub inner: Option<AlgoId>,
    pub access: AccessMode,
    pub arrival: Arrival,
}

impl RunConfig {
    pub fn new(algo: AlgoId, access: AccessMode, arrival: Arrival) -> Self {
        Self {
            algo,
            inner: None,
            access,
            arrival,
        }
    }

    pub fn width(inner: AlgoId, access: AccessMode, arrival: Arrival) -> Self {
        Self {
            algo: AlgoId::Width,
            inner: Some(inner),
            access,
            arrival,
        }
    }

    /// The strategy that talks to the (possibly restricted) oracle.
    fn effective(&self) -> Result<AlgoId> {
        match (self.algo, self.inner) {
            (AlgoId::Width, Some(AlgoId::Width)) => Err(Error::InvalidArgument(
                "width cannot nest inside width".into(),
            )),
            (AlgoId::Width, Some(inner)) => Ok(inner),
            (AlgoId::Width, None) => Err(Error::InvalidArgument(
                "width needs an inner algorithm".into(),
            )),
            (algo, _) => Ok(algo),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let algo = self.effective()?;
        match (algo, self.access) {
            (AlgoId::KnownRandom, AccessMode::Sequential) => Err(Error::RequiresRandomAccess),
            (AlgoId::SequentialSc | AlgoId::SequentialKnownAny, AccessMode::Random) => {
                Err(Error::RequiresSequentialAccess)
            }
            (AlgoId::SequentialSc, AccessMode::Sequential) if !self.arrival.is_single_crossing() => {
                Err(Error::InvalidArgument(format!(
                    "seq-sc needs a single-crossing arrival, got {}",
                    self.arrival.name()
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn needs_known_order(&self) -> bool {
        self.effective().map(AlgoId::needs_known_order).unwrap_or(false)
    }

    pub fn label(&self) -> String {
        let access = match self.access {
            AccessMode::Random => "random".to_string(),
            AccessMode::Sequential => format!("seq:{}", self.arrival.name()),
        };
        match self.inner {
            Some(inner) if self.algo == AlgoId::Width => format!("width/{inner}@{access}"),
            _ => format!("{}@{access}", self.algo),
        }
    }
}

/// Result of one elicitation run against a ground-truth profile.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: ElicitResult,
    pub bound: usize,
    pub exact: bool,
    pub micros: u128,
}

impl RunOutcome {
    pub fn within_bound(&self) -> bool {
        self.result.queries <= self.bound
    }

    pub fn ok(&self) -> bool {
        self.exact && self.within_bound()
    }
}

/// Runs `cfg` against `truth`. Known-order strategies use `sc_order`;
/// sequential arrival is derived from it (or from the identity order when
/// none is given).
pub fn run_on_profile(
    cfg: &RunConfig,
    truth: &Profile,
    sc_order: Option<&VoterOrdering>,
    partition: Option<&CandidatePartition>,
    seed: u64,
) -> Result<RunOutcome> {
    cfg.validate()?;
    let n = truth.num_voters();
    let m = truth.num_candidates();
    if cfg.needs_known_order() && sc_order.is_none() {
        return Err(Error::InvalidArgument(
            "profile has no single-crossing certificate".into(),
        ));
    }
    let identity = VoterOrdering::identity(n);
    let base = sc_order.unwrap_or(&identity);
    let knowledge = match sc_order {
        Some(o) if cfg.needs_known_order() => Knowledge::KnownOrder(o.clone()),
        _ => Knowledge::UnknownOrder,
    };
    let scenario = match cfg.access {
        AccessMode::Random => Scenario::random(knowledge),
        AccessMode::Sequential => {
            Scenario::sequential(arrival_ordering(cfg.arrival, base, seed), knowledge)
        }
    };
    let strategy = match cfg.effective()? {
        AlgoId::KnownRandom => Strategy::KnownRandom(base.clone()),
        AlgoId::SequentialSc => Strategy::SequentialSc,
        AlgoId::SequentialKnownAny => Strategy::SequentialKnownAny(base.clone()),
        AlgoId::Unknown => Strategy::Unknown,
        AlgoId::Width => unreachable!("rejected by effective()"),
    };

    let mut session = OracleSession::new(truth, scenario)?;
    let (result, bound, micros) = if cfg.algo == AlgoId::Width {
        let partition = partition
            .ok_or_else(|| Error::InvalidArgument("width needs a candidate partition".into()))?;
        let reps = truth.restrict(&partition.representatives())?;
        let k = partition.blocks().len();
        let bound = strategy.bound(k, n, distinct_count(&reps))
            + bounds::block_sort_bound(partition.blocks().iter().map(Vec::len), n);
        let start = Instant::now();
        let r = elicit_width(&mut session, partition, &strategy)?;
        (r, bound, start.elapsed().as_micros())
    } else {
        let bound = strategy.bound(m, n, distinct_count(truth));
        let start = Instant::now();
        let r = strategy.run(&mut session)?;
        (r, bound, start.elapsed().as_micros())
    };
    let exact = same_votes(&result.profile, truth);
    Ok(RunOutcome {
        result,
        bound,
        exact,
        micros,
    })
}

/// One grid of runs over candidate and voter counts.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub config: RunConfig,
    /// Block width for [`AlgoId::Width`]; clamped to `m`.
    pub width: usize,
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Record wall time; off makes reports byte-identical across runs.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub algo: String,
    pub m: usize,
    pub n: usize,
    pub trial: usize,
    pub queries: usize,
    pub good: usize,
    pub bad: usize,
    pub bound: usize,
    pub ok: bool,
    pub micros: u128,
    #[serde(skip)]
    pub per_voter: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn extend(&mut self, other: RunReport) {
        self.rows.extend(other.rows);
    }

    /// Writes the CSV with header `algo,m,n,trial,queries,good,bad,bound,ok,micros`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(["algo", "m", "n", "trial", "queries", "good", "bad", "bound", "ok", "micros"])?;
        }
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn cell_seed(seed: u64, m: usize, n: usize, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ ((m as u64) << 48)
        ^ ((n as u64) << 24)
        ^ trial as u64
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunReport> {
    spec.config.validate()?;
    if spec.m_values.is_empty() || spec.n_values.is_empty() || spec.trials == 0 {
        return Err(Error::InvalidArgument(
            "experiment needs nonempty m and n ranges and at least one trial".into(),
        ));
    }
    if let Some(&m) = spec.m_values.iter().find(|&&m| m == 0) {
        return Err(Error::InvalidArgument(format!("m = {m} is not allowed")));
    }
    if spec.n_values.contains(&0) {
        return Err(Error::InvalidArgument("n = 0 is not allowed".into()));
    }
    let mut rows = Vec::new();
    for &m in &spec.m_values {
        for &n in &spec.n_values {
            for trial in 0..spec.trials {
                let seed = cell_seed(spec.seed, m, n, trial);
                let (profile, order, partition) = if spec.config.algo == AlgoId::Width {
                    let (p, o, part) = gen_width_w(m, n, spec.width.clamp(1, m), seed)?;
                    (p, o, Some(part))
                } else {
                    let (p, o) = gen_single_crossing(m, n, seed, false)?;
                    (p, o, None)
                };
                let outcome =
                    run_on_profile(&spec.config, &profile, Some(&order), partition.as_ref(), seed)?;
                let split = outcome.result.good_bad.unwrap_or_default();
                rows.push(ReportRow {
                    algo: spec.config.label(),
                    m,
                    n,
                    trial,
                    queries: outcome.result.queries,
                    good: split.good,
                    bad: split.bad,
                    bound: outcome.bound,
                    ok: outcome.ok(),
                    micros: if spec.timing { outcome.micros } else { 0 },
                    per_voter: outcome.result.per_voter.clone(),
                });
            }
        }
    }
    Ok(RunReport { rows })
}

/// Every algorithm under every access model it supports.
pub fn default_suite(seed: u64, timing: bool) -> Vec<ExperimentSpec> {
    use AccessMode::{Random, Sequential};
    let configs = [
        RunConfig::new(AlgoId::KnownRandom, Random, Arrival::Sc),
        RunConfig::new(AlgoId::SequentialSc, Sequential, Arrival::Sc),
        RunConfig::new(AlgoId::SequentialSc, Sequential, Arrival::Reverse),
        RunConfig::new(AlgoId::SequentialKnownAny, Sequential, Arrival::Reverse),
        RunConfig::new(AlgoId::SequentialKnownAny, Sequential, Arrival::Shuffle),
        RunConfig::new(AlgoId::SequentialKnownAny, Sequential, Arrival::Interleave),
        RunConfig::new(AlgoId::Unknown, Random, Arrival::Sc),
        RunConfig::new(AlgoId::Unknown, Sequential, Arrival::Shuffle),
        RunConfig::width(AlgoId::KnownRandom, Random, Arrival::Sc),
        RunConfig::width(AlgoId::SequentialSc, Sequential, Arrival::Sc),
        RunConfig::width(AlgoId::Unknown, Sequential, Arrival::Shuffle),
    ];
    configs
        .into_iter()
        .map(|config| ExperimentSpec {
            config,
            width: 2,
            m_values: vec![2, 4, 6, 8],
            n_values: vec![1, 8, 16, 32],
            trials: 3,
            seed,
            timing,
        })
        .collect()
}
