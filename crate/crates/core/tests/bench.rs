use proptest::prelude::*;

use scelicit::bench::{run_experiment, scp, AlgoId, Arrival, ExperimentSpec, RunConfig};
use scelicit::domain::AccessMode;
use scelicit::generate::{gen_single_crossing, gen_width_w};

fn spec(config: RunConfig, m: Vec<usize>, n: Vec<usize>) -> ExperimentSpec {
    ExperimentSpec {
        config,
        width: 2,
        m_values: m,
        n_values: n,
        trials: 2,
        seed: 11,
        timing: false,
    }
}

proptest! {
    #[test]
    fn scp_round_trip(m in 1usize..9, n in 1usize..25, seed in any::<u64>()) {
        let (p, _) = gen_single_crossing(m, n, seed, false).unwrap();
        prop_assert_eq!(scp::parse(&scp::serialize(&p)).unwrap(), p);
    }

    #[test]
    fn scp_round_trip_width(m in 2usize..9, n in 1usize..12, seed in any::<u64>()) {
        let (p, _, _) = gen_width_w(m, n, 2, seed).unwrap();
        prop_assert_eq!(scp::parse(&scp::serialize(&p)).unwrap(), p);
    }
}

#[test]
fn reports_are_deterministic() {
    let cfg = RunConfig::width(AlgoId::SequentialKnownAny, AccessMode::Sequential, Arrival::Shuffle);
    let s = spec(cfg, vec![4, 7], vec![5, 13]);
    assert_eq!(run_experiment(&s).unwrap(), run_experiment(&s).unwrap());
}

#[test]
fn known_random_growth_bounded_per_doubling() {
    let cfg = RunConfig::new(AlgoId::KnownRandom, AccessMode::Random, Arrival::Sc);
    let report = run_experiment(&spec(cfg, vec![4], vec![8, 16, 32, 64])).unwrap();
    assert!(report.all_ok());
    let mean = |n: usize| {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.n == n).collect();
        rows.iter().map(|r| r.queries).sum::<usize>() as f64 / rows.len() as f64
    };
    for w in [8, 16, 32, 64].windows(2) {
        let step = mean(w[1]) - mean(w[0]);
        assert!(step <= 2.0 * 6.0, "n {} -> {}: {step}", w[0], w[1]);
    }
}

#[test]
fn sequential_sc_counts_match_insertion_cost() {
    // Every insertion after the first voter checks at least m-1 pairs.
    let cfg = RunConfig::new(AlgoId::SequentialSc, AccessMode::Sequential, Arrival::Sc);
    let report = run_experiment(&spec(cfg, vec![5], vec![1, 6])).unwrap();
    for row in &report.rows {
        let first = row.per_voter.iter().copied().max().unwrap();
        assert!(row.queries <= row.bound);
        assert!(row.queries >= first + (row.n - 1) * 4);
    }
}
