//! Query-efficient preference elicitation for single-crossing profiles.
//!
//! Every algorithm talks to voters only through the [`oracle::Oracle`]
//! interface, which counts distinct `(voter, {x, y})` comparisons. The
//! [`adversary`] module provides adaptive answer sources that force the
//! matching lower bounds, and [`bench`] drives experiments and the CLI.

pub mod adversary;
pub mod bench;
pub mod domain;
pub mod elicit;
pub mod error;
pub mod generate;
pub mod oracle;
pub mod verify;

pub use domain::{
    CandidateId, CandidatePair, CandidatePartition, Preference, Profile, Scenario, VoterId,
    VoterOrdering,
};
pub use error::{Error, Result};
pub use oracle::{Oracle, OracleSession, QueryLedger};
